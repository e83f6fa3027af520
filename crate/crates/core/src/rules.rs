//! Temporal inference over an annotated pair: the closed constraint
//! network, the accessor functions, rules R1 to R6 and the supervisor.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::allen::{relate_concrete, AllenRelation, Inconsistent, RelationSet, TemporalNetwork};
use crate::annotation::{
    merge_identity, natural_cmp, normalize_pair, tlink_to_allen, AdverbialTable, AnnotatedPair,
    IdentityError, IdentityMerge, NeLexicon, Normalized, Side,
};
use crate::lexicon::{event_relation, subjects_equivalent, LexicalVerdict};
use crate::resources::Resources;
use crate::values::{
    difference, equality, inclusion, retranche, somme, CalendarDate, Duration, DurationUnit,
    TemporalKind, TemporalValue, VagueThresholds,
};

use AllenRelation::*;

const INCLUDED: RelationSet = RelationSet::of(&[During, Starts, Finishes]);
const BOUNDARY: RelationSet = RelationSet::of(&[Starts, StartedBy, Finishes, FinishedBy]);
const SHARES_START: RelationSet = RelationSet::of(&[Starts, StartedBy, Equals]);
const SHARES_END: RelationSet = RelationSet::of(&[Finishes, FinishedBy, Equals]);
const INSIDE: RelationSet = RelationSet::of(&[During, Starts, Finishes, Equals]);
const EARLIER: RelationSet = RelationSet::of(&[Before, Meets]);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, rename_all = "kebab-case", deny_unknown_fields)]
pub struct EngineConfig {
    /// Slack allowed when comparing results of year arithmetic.
    pub tolerance_years: u32,
    /// "Many days" means more than this many days.
    pub many_days_threshold: u32,
    /// Treat hypernyms and hyponyms as equivalent events.
    pub generalization_as_equivalence: bool,
    /// Anchor for relative expressions when the corpus gives none.
    pub reference_date: CalendarDate,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            tolerance_years: 1,
            many_days_threshold: 2,
            generalization_as_equivalence: false,
            reference_date: CalendarDate::ymd(2008, 1, 1).expect("valid date"),
        }
    }
}

impl EngineConfig {
    pub fn thresholds(&self) -> VagueThresholds {
        VagueThresholds {
            many_days: self.many_days_threshold,
        }
    }

    /// Tolerance for a comparison whose arithmetic was done in `unit`.
    pub fn tolerance_for(&self, unit: DurationUnit) -> Duration {
        match unit {
            DurationUnit::Years => Duration::years(self.tolerance_years),
            other => Duration::new(0, other),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Identity(#[from] IdentityError),
    #[error(transparent)]
    Inconsistent(#[from] Inconsistent),
}

/// Which timex values an accessor looks at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AnchorKind {
    Date,
    Duration,
    DurationOrInterval,
}

impl AnchorKind {
    pub fn accepts(self, k: TemporalKind) -> bool {
        match self {
            AnchorKind::Date => k == TemporalKind::Date,
            AnchorKind::Duration => k == TemporalKind::Duration,
            AnchorKind::DurationOrInterval => k != TemporalKind::Date,
        }
    }
}

/// A timex an event is related to, with the relation from the event.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TimeAnchor<'a> {
    pub tid: &'a str,
    pub value: TemporalValue,
    pub set: RelationSet,
}

impl fmt::Display for TimeAnchor<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} ({})", self.set, self.tid, self.value)
    }
}

/// A normalized pair with its closed constraint network.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairAnalysis {
    pub pair: AnnotatedPair,
    pub network: TemporalNetwork,
    pub trace: Vec<String>,
    merge: IdentityMerge,
}

/// Network node standing for an event: its first instance, after identity
/// merging.
pub fn event_node(pair: &AnnotatedPair, merge: &IdentityMerge, eid: &str) -> String {
    let inst = pair
        .instances_of(eid)
        .next()
        .map(|i| i.eiid.as_str())
        .unwrap_or(eid);
    merge.representative(inst).to_string()
}

/// Builds the constraint network of a normalized pair: annotated links,
/// then edges between timexes with known extents, then closure.
pub fn build_network(
    pair: &AnnotatedPair,
    merge: &IdentityMerge,
) -> Result<TemporalNetwork, Inconsistent> {
    let mut net = TemporalNetwork::new();
    for (_, e) in pair.events() {
        net.add_node(&event_node(pair, merge, &e.eid));
    }
    let timexes = pair.timexes();
    for t in &timexes {
        net.add_node(merge.representative(t.tid));
    }
    for l in &merge.links {
        if let Some(set) = tlink_to_allen(l.rel) {
            net.constrain_names(l.from.id(), l.to.id(), set)?;
        }
    }
    let spans: Vec<(&str, (i64, i64))> = timexes
        .iter()
        .filter_map(|t| Some((merge.representative(t.tid), t.value?.span_minutes()?)))
        .collect();
    for (i, (a, sa)) in spans.iter().enumerate() {
        for (b, sb) in &spans[i + 1..] {
            if let Ok(r) = relate_concrete(*sa, *sb) {
                net.constrain_names(a, b, r.into())?;
            }
        }
    }
    net.closure()
}

/// Anchoring inference: when two date timexes denote the same time, or one
/// is anchored on the other without contradicting it, the events included
/// in each become simultaneous. The result is closed again.
pub fn enrich_tlinks(
    net: &TemporalNetwork,
    pair: &AnnotatedPair,
    merge: &IdentityMerge,
) -> Result<(TemporalNetwork, Vec<String>), Inconsistent> {
    let zero = Duration::minutes(0);
    let timexes: Vec<_> = pair
        .timexes()
        .into_iter()
        .filter(|t| t.value.is_none_or(|v| v.kind() == TemporalKind::Date))
        .collect();
    let events: Vec<String> = pair
        .events()
        .map(|(_, e)| event_node(pair, merge, &e.eid))
        .collect();
    let included_in = |tid: &str| -> Vec<&String> {
        let Some(t) = net.node(merge.representative(tid)) else {
            return Vec::new();
        };
        events
            .iter()
            .filter(|e| net.node(e).is_some_and(|n| net.edge(n, t).is_subset(INCLUDED)))
            .collect()
    };

    let mut out = net.clone();
    let mut notes = Vec::new();
    for (i, a) in timexes.iter().enumerate() {
        for b in &timexes[i + 1..] {
            let anchored = a.anchor == Some(b.tid) || b.anchor == Some(a.tid);
            let same = match (a.value, b.value) {
                (Some(va), Some(vb)) => equality(va, vb, &zero).unwrap_or(anchored),
                _ => anchored,
            };
            if !same {
                continue;
            }
            for ea in included_in(a.tid) {
                for eb in included_in(b.tid) {
                    if ea != eb {
                        out.constrain_names(ea, eb, Equals.into())?;
                        notes.push(format!("{ea} = {eb} through {} ~ {}", a.tid, b.tid));
                    }
                }
            }
        }
    }
    if notes.is_empty() {
        return Ok((out, notes));
    }
    Ok((out.closure()?, notes))
}

impl PairAnalysis {
    pub fn build(
        pair: &AnnotatedPair,
        ne_lexicon: &NeLexicon,
        adverbials: &AdverbialTable,
        reference: &CalendarDate,
    ) -> Result<Self, AnalysisError> {
        let Normalized { pair, mut trace } = normalize_pair(pair, ne_lexicon, adverbials, reference);
        let merge = merge_identity(&pair.tlinks)?;
        let net = build_network(&pair, &merge)?;
        let (network, notes) = enrich_tlinks(&net, &pair, &merge)?;
        trace.extend(notes);
        Ok(PairAnalysis {
            pair,
            network,
            trace,
            merge,
        })
    }

    pub fn event_node(&self, eid: &str) -> String {
        event_node(&self.pair, &self.merge, eid)
    }

    pub fn side_of(&self, eid: &str) -> Option<Side> {
        self.pair.event(eid).map(|(s, _)| s)
    }

    /// Closed relation from event `e1` to event `e2`; full when unknown.
    pub fn event_edge(&self, e1: &str, e2: &str) -> RelationSet {
        self.network
            .edge_by_name(&self.event_node(e1), &self.event_node(e2))
            .unwrap_or(RelationSet::FULL)
    }

    /// Closed relation from event `eid` to timex `tid`.
    pub fn timex_edge(&self, eid: &str, tid: &str) -> RelationSet {
        self.network
            .edge_by_name(&self.event_node(eid), self.merge.representative(tid))
            .unwrap_or(RelationSet::FULL)
    }

    /// The tightest informative link from `eid` to a valued timex of its
    /// own segment that passes `accept`. Ties go to the smallest tid.
    pub fn anchor_where(
        &self,
        eid: &str,
        accept: impl Fn(&TemporalValue, RelationSet) -> bool,
    ) -> Option<TimeAnchor<'_>> {
        let side = self.side_of(eid)?;
        self.pair
            .timexes()
            .into_iter()
            .filter(|t| t.side == side)
            .filter_map(|t| {
                let value = *t.value?;
                let set = self.timex_edge(eid, t.tid);
                (!set.is_full() && accept(&value, set)).then_some(TimeAnchor {
                    tid: t.tid,
                    value,
                    set,
                })
            })
            .min_by(|a, b| a.set.len().cmp(&b.set.len()).then_with(|| natural_cmp(a.tid, b.tid)))
    }

    pub fn relation(&self, eid: &str, kind: AnchorKind) -> Option<TimeAnchor<'_>> {
        self.anchor_where(eid, |v, _| kind.accepts(v.kind()))
    }

    /// Like [`relation`](Self::relation) but ignores links that only pin
    /// one boundary of the event.
    pub fn located(&self, eid: &str, kind: AnchorKind) -> Option<TimeAnchor<'_>> {
        self.anchor_where(eid, |v, s| kind.accepts(v.kind()) && !s.is_subset(BOUNDARY))
    }

    pub fn debut(&self, eid: &str) -> Option<CalendarDate> {
        let a = self.anchor_where(eid, |v, s| v.as_date().is_some() && s.is_subset(SHARES_START))?;
        a.value.as_date().copied()
    }

    pub fn fin(&self, eid: &str) -> Option<CalendarDate> {
        let a = self.anchor_where(eid, |v, s| v.as_date().is_some() && s.is_subset(SHARES_END))?;
        a.value.as_date().copied()
    }

    pub fn before(&self, e1: &str, e2: &str) -> bool {
        let edge = self.event_edge(e1, e2);
        if !edge.is_full() {
            return edge.is_subset(EARLIER);
        }
        // Nothing known in the network: fall back on dated extents.
        let extent = |e: &str| {
            self.anchor_where(e, |v, s| v.span_minutes().is_some() && s.is_subset(INSIDE))
                .and_then(|a| a.value.span_minutes())
        };
        match (extent(e1), extent(e2)) {
            (Some((_, end1)), Some((start2, _))) => end1 <= start2,
            _ => false,
        }
    }

    pub fn after(&self, e1: &str, e2: &str) -> bool {
        self.before(e2, e1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum RuleId {
    R1,
    R2,
    R3,
    R4,
    R5,
    R6,
}

impl RuleId {
    pub const ALL: [RuleId; 6] = [RuleId::R1, RuleId::R2, RuleId::R3, RuleId::R4, RuleId::R5, RuleId::R6];

    /// Rules that run for equivalent events and for contrary events.
    pub fn group(self) -> LexicalVerdict {
        match self {
            RuleId::R6 => LexicalVerdict::Contrary,
            _ => LexicalVerdict::Equivalent,
        }
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RuleOutcome {
    pub rule: RuleId,
    /// `None` when the rule does not apply.
    pub verdict: Option<bool>,
    pub trace: String,
}

impl RuleOutcome {
    pub fn inapplicable(rule: RuleId, why: impl Into<String>) -> Self {
        RuleOutcome {
            rule,
            verdict: None,
            trace: why.into(),
        }
    }

    pub fn decided(rule: RuleId, verdict: bool, trace: impl Into<String>) -> Self {
        RuleOutcome {
            rule,
            verdict: Some(verdict),
            trace: trace.into(),
        }
    }

    pub fn applicable(&self) -> bool {
        self.verdict.is_some()
    }
}

impl fmt::Display for RuleOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = match self.verdict {
            Some(true) => "holds",
            Some(false) => "fails",
            None => "n/a",
        };
        write!(f, "{} {v}: {}", self.rule, self.trace)
    }
}

/// One event of T matched against one event of H.
#[derive(Debug, Clone, Copy)]
pub struct PairContext<'a> {
    pub analysis: &'a PairAnalysis,
    pub e1: &'a str,
    pub e2: &'a str,
    pub lexical: LexicalVerdict,
    pub config: &'a EngineConfig,
}

pub trait Rule: Send + Sync {
    fn id(&self) -> RuleId;
    fn evaluate(&self, ctx: &PairContext<'_>) -> RuleOutcome;
}

fn compatible(a: RelationSet, b: RelationSet) -> bool {
    a.is_subset(b) || b.is_subset(a)
}

/// Same relation and same or included time.
pub struct R1;
/// Span between start and end equals a duration.
pub struct R2;
/// Start plus duration equals an end.
pub struct R3;
/// End minus duration equals a start.
pub struct R4;
/// A date falls inside an interval or a vague span.
pub struct R5;
/// Contrary events must be ordered in time.
pub struct R6;

impl Rule for R1 {
    fn id(&self) -> RuleId {
        RuleId::R1
    }

    fn evaluate(&self, ctx: &PairContext<'_>) -> RuleOutcome {
        let a = ctx.analysis;
        let found = match (a.located(ctx.e1, AnchorKind::Date), a.located(ctx.e2, AnchorKind::Date)) {
            (Some(x), Some(y)) => Some((x, y)),
            _ => a
                .located(ctx.e1, AnchorKind::Duration)
                .zip(a.located(ctx.e2, AnchorKind::Duration)),
        };
        let Some((x, y)) = found else {
            return RuleOutcome::inapplicable(self.id(), "no date or duration on both sides");
        };
        let inc = inclusion(&x.value, &y.value, &ctx.config.thresholds());
        let eq = equality(&x.value, &y.value, &Duration::minutes(0));
        if inc.is_err() && eq.is_err() {
            return RuleOutcome::inapplicable(self.id(), format!("{} and {} do not compare", x.value, y.value));
        }
        let same_rel = compatible(x.set, y.set);
        let holds = same_rel && (inc == Ok(true) || eq == Ok(true));
        RuleOutcome::decided(
            self.id(),
            holds,
            format!(
                "{} {x} / {} {y}: same relation {same_rel}, inclut {}, egale {}",
                ctx.e1,
                ctx.e2,
                inc.unwrap_or(false),
                eq.unwrap_or(false)
            ),
        )
    }
}

impl Rule for R2 {
    fn id(&self) -> RuleId {
        RuleId::R2
    }

    fn evaluate(&self, ctx: &PairContext<'_>) -> RuleOutcome {
        let a = ctx.analysis;
        let (Some(start), Some(end)) = (a.debut(ctx.e1), a.fin(ctx.e1)) else {
            return RuleOutcome::inapplicable(self.id(), format!("{} lacks a start or an end", ctx.e1));
        };
        let Some(dur) = a.relation(ctx.e2, AnchorKind::Duration) else {
            return RuleOutcome::inapplicable(self.id(), format!("{} has no duration", ctx.e2));
        };
        let span = difference(&end, &start);
        let unit = dur.value.as_duration().map_or(span.unit, |d| d.unit);
        let tol = ctx.config.tolerance_for(unit);
        let span_v = TemporalValue::Duration(span);
        let Ok(holds) = equality(&span_v, &dur.value, &tol)
            .or_else(|_| inclusion(&span_v, &dur.value, &ctx.config.thresholds()))
        else {
            return RuleOutcome::inapplicable(self.id(), format!("{span} and {} do not compare", dur.value));
        };
        RuleOutcome::decided(
            self.id(),
            holds,
            format!("difference({end}, {start}) = {span} vs {} {dur}, tolerance {tol}", ctx.e2),
        )
    }
}

impl Rule for R3 {
    fn id(&self) -> RuleId {
        RuleId::R3
    }

    fn evaluate(&self, ctx: &PairContext<'_>) -> RuleOutcome {
        let a = ctx.analysis;
        let Some(start) = a.debut(ctx.e1) else {
            return RuleOutcome::inapplicable(self.id(), format!("{} has no start", ctx.e1));
        };
        let Some(dur) = a.relation(ctx.e1, AnchorKind::Duration).and_then(|d| d.value.as_duration().copied())
        else {
            return RuleOutcome::inapplicable(self.id(), format!("{} has no exact duration", ctx.e1));
        };
        let Some(end) = a.fin(ctx.e2) else {
            return RuleOutcome::inapplicable(self.id(), format!("{} has no end", ctx.e2));
        };
        let computed = match somme(&start, &dur) {
            Ok(d) => d,
            Err(e) => return RuleOutcome::inapplicable(self.id(), e.to_string()),
        };
        let tol = ctx.config.tolerance_for(dur.unit);
        let holds = equality(&computed.into(), &end.into(), &tol).unwrap_or(false);
        RuleOutcome::decided(
            self.id(),
            holds,
            format!("somme({start}, {dur}) = {computed} vs end {end}, tolerance {tol}"),
        )
    }
}

impl Rule for R4 {
    fn id(&self) -> RuleId {
        RuleId::R4
    }

    fn evaluate(&self, ctx: &PairContext<'_>) -> RuleOutcome {
        let a = ctx.analysis;
        let Some(dur) = a.relation(ctx.e1, AnchorKind::Duration).and_then(|d| d.value.as_duration().copied())
        else {
            return RuleOutcome::inapplicable(self.id(), format!("{} has no exact duration", ctx.e1));
        };
        let Some(end) = a.fin(ctx.e1) else {
            return RuleOutcome::inapplicable(self.id(), format!("{} has no end", ctx.e1));
        };
        let Some(start) = a.debut(ctx.e2) else {
            return RuleOutcome::inapplicable(self.id(), format!("{} has no start", ctx.e2));
        };
        let computed = match retranche(&end, &dur) {
            Ok(d) => d,
            Err(e) => return RuleOutcome::inapplicable(self.id(), e.to_string()),
        };
        let tol = ctx.config.tolerance_for(dur.unit);
        let holds = equality(&computed.into(), &start.into(), &tol).unwrap_or(false);
        RuleOutcome::decided(
            self.id(),
            holds,
            format!("retranche({end}, {dur}) = {computed} vs start {start}, tolerance {tol}"),
        )
    }
}

impl Rule for R5 {
    fn id(&self) -> RuleId {
        RuleId::R5
    }

    fn evaluate(&self, ctx: &PairContext<'_>) -> RuleOutcome {
        let a = ctx.analysis;
        let (Some(x), Some(y)) = (
            a.located(ctx.e1, AnchorKind::Date),
            a.located(ctx.e2, AnchorKind::DurationOrInterval),
        ) else {
            return RuleOutcome::inapplicable(self.id(), "no date against an interval");
        };
        if !compatible(x.set, y.set) {
            return RuleOutcome::inapplicable(self.id(), format!("relations {} and {} differ", x.set, y.set));
        }
        match inclusion(&x.value, &y.value, &ctx.config.thresholds()) {
            Ok(holds) => RuleOutcome::decided(
                self.id(),
                holds,
                format!("inclut({}, {}) for {} / {}", x.value, y.value, ctx.e1, ctx.e2),
            ),
            Err(e) => RuleOutcome::inapplicable(self.id(), e.to_string()),
        }
    }
}

impl Rule for R6 {
    fn id(&self) -> RuleId {
        RuleId::R6
    }

    fn evaluate(&self, ctx: &PairContext<'_>) -> RuleOutcome {
        let a = ctx.analysis;
        let dated = |e| a.relation(e, AnchorKind::Date).is_some();
        let (before, after) = (a.before(ctx.e1, ctx.e2), a.after(ctx.e1, ctx.e2));
        if !(dated(ctx.e1) && dated(ctx.e2)) && !before && !after {
            return RuleOutcome::inapplicable(self.id(), "events neither dated nor ordered");
        }
        RuleOutcome::decided(
            self.id(),
            before || after,
            format!(
                "{} {} {}: before {before}, after {after}",
                ctx.e1,
                a.event_edge(ctx.e1, ctx.e2),
                ctx.e2
            ),
        )
    }
}

/// The rules a supervisor may run, dispatched by lexical verdict.
pub struct RuleBook {
    rules: Vec<Box<dyn Rule>>,
}

impl RuleBook {
    pub fn new(rules: Vec<Box<dyn Rule>>) -> Self {
        RuleBook { rules }
    }

    pub fn standard() -> Self {
        RuleBook::new(vec![
            Box::new(R1),
            Box::new(R2),
            Box::new(R3),
            Box::new(R4),
            Box::new(R5),
            Box::new(R6),
        ])
    }

    pub fn ids(&self) -> Vec<RuleId> {
        self.rules.iter().map(|r| r.id()).collect()
    }

    /// Runs the group matching the context's lexical verdict; unrelated
    /// events run nothing. Outcomes come back sorted by rule id.
    pub fn run(&self, ctx: &PairContext<'_>) -> Vec<RuleOutcome> {
        let mut out: Vec<RuleOutcome> = self
            .rules
            .iter()
            .filter(|r| ctx.lexical != LexicalVerdict::Unrelated && r.id().group() == ctx.lexical)
            .map(|r| r.evaluate(ctx))
            .collect();
        out.sort_by_key(|o| o.rule);
        out
    }
}

impl Default for RuleBook {
    fn default() -> Self {
        Self::standard()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Decision {
    Entailed,
    NotEntailed,
}

impl Decision {
    pub fn as_bool(self) -> bool {
        self == Decision::Entailed
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Reason {
    RuleSupported,
    RuleRefuted,
    NoLexicalInference,
    NoTemporalEvidence,
}

impl fmt::Display for Reason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Reason::RuleSupported => "rule-supported",
            Reason::RuleRefuted => "rule-refuted",
            Reason::NoLexicalInference => "no-lexical-inference",
            Reason::NoTemporalEvidence => "no-temporal-evidence",
        })
    }
}

/// Conjunction over the applicable outcomes of one context.
pub fn decide(outcomes: &[RuleOutcome]) -> (Decision, Reason) {
    let applicable: Vec<bool> = outcomes.iter().filter_map(|o| o.verdict).collect();
    if applicable.is_empty() {
        (Decision::NotEntailed, Reason::NoTemporalEvidence)
    } else if applicable.iter().all(|&v| v) {
        (Decision::Entailed, Reason::RuleSupported)
    } else {
        (Decision::NotEntailed, Reason::RuleRefuted)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub decision: Decision,
    pub reason: Reason,
    /// Applicable outcomes behind the decision.
    pub fired: Vec<RuleOutcome>,
    pub trace: Vec<String>,
}

impl Verdict {
    fn new(decision: Decision, reason: Reason, fired: Vec<RuleOutcome>, trace: Vec<String>) -> Self {
        Verdict {
            decision,
            reason,
            fired,
            trace,
        }
    }
}

/// A T event and an H event whose subjects match and whose lemmas relate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Candidate {
    pub e1: String,
    pub e2: String,
    pub lexical: LexicalVerdict,
}

/// Event pairs worth testing, plus notes on how they were found.
pub fn candidates(pair: &AnnotatedPair, resources: &Resources) -> (Vec<Candidate>, Vec<String>) {
    let mut out = Vec::new();
    let mut notes = Vec::new();
    let mut subject_match = false;
    for s1 in pair.t.subjects() {
        for s2 in pair.h.subjects() {
            if !subjects_equivalent(&s1.text, &s2.text, &resources.lexicon, &resources.stoplist) {
                continue;
            }
            subject_match = true;
            notes.push(format!("subjects `{}` ~ `{}`", s1.text, s2.text));
            for e1 in &s1.events {
                for e2 in &s2.events {
                    let (Some((_, ev1)), Some((_, ev2))) = (pair.event(e1), pair.event(e2)) else {
                        continue;
                    };
                    let lexical = event_relation(ev1, ev2, &resources.lexicon, &resources.stoplist);
                    notes.push(format!("{e1} `{}` / {e2} `{}`: {lexical}", ev1.lemma(), ev2.lemma()));
                    let c = Candidate {
                        e1: e1.clone(),
                        e2: e2.clone(),
                        lexical,
                    };
                    if lexical != LexicalVerdict::Unrelated && !out.contains(&c) {
                        out.push(c);
                    }
                }
            }
        }
    }
    if !subject_match {
        notes.push("no subjects match".into());
    }
    (out, notes)
}

/// Resources, configuration and rules, ready to judge pairs.
pub struct Engine {
    resources: Resources,
    config: EngineConfig,
    rules: RuleBook,
}

impl Engine {
    pub fn new(mut resources: Resources, config: EngineConfig) -> Self {
        resources.lexicon = resources.lexicon.with_generalization(config.generalization_as_equivalence);
        Engine {
            resources,
            config,
            rules: RuleBook::standard(),
        }
    }

    pub fn with_rules(mut self, rules: RuleBook) -> Self {
        self.rules = rules;
        self
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    pub fn resources(&self) -> &Resources {
        &self.resources
    }

    pub fn rules(&self) -> &RuleBook {
        &self.rules
    }

    pub fn analyze(&self, pair: &AnnotatedPair, reference: &CalendarDate) -> Result<PairAnalysis, AnalysisError> {
        PairAnalysis::build(pair, &self.resources.ne_lexicon, &self.resources.adverbials, reference)
    }

    pub fn supervise(&self, pair: &AnnotatedPair) -> Verdict {
        self.supervise_at(pair, &self.config.reference_date)
    }

    /// Judges a pair whose relative expressions count from `reference`.
    pub fn supervise_at(&self, pair: &AnnotatedPair, reference: &CalendarDate) -> Verdict {
        let (found, mut trace) = candidates(pair, &self.resources);
        if found.is_empty() {
            return Verdict::new(Decision::NotEntailed, Reason::NoLexicalInference, Vec::new(), trace);
        }
        let analysis = match self.analyze(pair, reference) {
            Ok(a) => a,
            Err(e) => {
                trace.push(format!("no temporal reasoning: {e}"));
                return Verdict::new(Decision::NotEntailed, Reason::NoTemporalEvidence, Vec::new(), trace);
            }
        };
        trace.extend(analysis.trace.iter().cloned());

        let mut refuted: Option<Vec<RuleOutcome>> = None;
        for c in &found {
            let ctx = PairContext {
                analysis: &analysis,
                e1: &c.e1,
                e2: &c.e2,
                lexical: c.lexical,
                config: &self.config,
            };
            let outcomes = self.rules.run(&ctx);
            trace.extend(outcomes.iter().map(|o| format!("{}/{}: {o}", c.e1, c.e2)));
            let fired: Vec<RuleOutcome> = outcomes.into_iter().filter(RuleOutcome::applicable).collect();
            match decide(&fired) {
                (Decision::Entailed, reason) => {
                    return Verdict::new(Decision::Entailed, reason, fired, trace);
                }
                (_, Reason::RuleRefuted) if refuted.is_none() => refuted = Some(fired),
                _ => {}
            }
        }
        match refuted {
            Some(fired) => Verdict::new(Decision::NotEntailed, Reason::RuleRefuted, fired, trace),
            None => Verdict::new(Decision::NotEntailed, Reason::NoTemporalEvidence, Vec::new(), trace),
        }
    }
}

/// Judges one pair with a fresh engine.
pub fn supervise(pair: &AnnotatedPair, resources: &Resources, config: &EngineConfig) -> Verdict {
    Engine::new(resources.clone(), config.clone()).supervise(pair)
}
