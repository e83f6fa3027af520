//! TimeML-lite annotations for text/hypothesis pairs.

mod normalize;
mod xml;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::allen::{AllenRelation, RelationSet};
use crate::values::{CalendarDate, TemporalValue};

pub use normalize::{
    normalize_pair, AdverbialTable, NeLexicon, NeLexiconError, Normalized,
};
pub use xml::{
    parse_corpus, parse_simple_xml, serialize_corpus, CorpusError, CorpusErrorKind, SimpleDoc,
    SimpleDocError,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown {what} `{value}`")]
pub struct UnknownLabel {
    pub what: &'static str,
    pub value: String,
}

fn label_key(s: &str) -> String {
    s.trim().to_ascii_uppercase().replace('-', "_")
}

macro_rules! label_enum {
    ($(#[$m:meta])* $name:ident, $what:literal { $($variant:ident => $text:literal),+ $(,)? }) => {
        $(#[$m])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum $name { $($variant),+ }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn as_str(self) -> &'static str {
                match self { $($name::$variant => $text),+ }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $name {
            type Err = UnknownLabel;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                match label_key(s).as_str() {
                    $($text => Ok($name::$variant),)+
                    _ => Err(UnknownLabel { what: $what, value: s.to_string() }),
                }
            }
        }
    };
}

label_enum!(EventClass, "event class" {
    Occurrence => "OCCURRENCE",
    State => "STATE",
    Reporting => "REPORTING",
    IAction => "I_ACTION",
    IState => "I_STATE",
    Aspectual => "ASPECTUAL",
    Perception => "PERCEPTION",
});

label_enum!(Polarity, "polarity" {
    Pos => "POS",
    Neg => "NEG",
});

label_enum!(TimexType, "timex type" {
    Date => "DATE",
    Time => "TIME",
    Duration => "DURATION",
});

label_enum!(TLinkRel, "TLINK relation" {
    Before => "BEFORE",
    After => "AFTER",
    IBefore => "IBEFORE",
    IAfter => "IAFTER",
    Includes => "INCLUDES",
    IsIncluded => "IS_INCLUDED",
    During => "DURING",
    DuringInv => "DURING_INV",
    Simultaneous => "SIMULTANEOUS",
    Identity => "IDENTITY",
    Begins => "BEGINS",
    BegunBy => "BEGUN_BY",
    Ends => "ENDS",
    EndedBy => "ENDED_BY",
});

label_enum!(SLinkRel, "SLINK relation" {
    Modal => "MODAL",
    Evidential => "EVIDENTIAL",
    NegEvidential => "NEG_EVIDENTIAL",
    Factive => "FACTIVE",
    CounterFactive => "COUNTER_FACTIVE",
    Conditional => "CONDITIONAL",
});

impl TimexType {
    /// Whether a value of this shape may appear under this TYPE.
    pub fn admits(self, v: &TemporalValue) -> bool {
        use TemporalValue as V;
        match self {
            TimexType::Date => !matches!(v, V::Duration(_) | V::Time(_)),
            TimexType::Time => !matches!(v, V::Duration(_) | V::Interval(_)),
            TimexType::Duration => !matches!(v, V::Date(_) | V::Time(_)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NeType {
    Date,
    Duree,
}

impl NeType {
    pub fn as_str(self) -> &'static str {
        match self {
            NeType::Date => "date",
            NeType::Duree => "durée",
        }
    }

    pub fn timex_type(self) -> TimexType {
        match self {
            NeType::Date => TimexType::Date,
            NeType::Duree => TimexType::Duration,
        }
    }
}

impl FromStr for NeType {
    type Err = UnknownLabel;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_lowercase().as_str() {
            "date" => Ok(NeType::Date),
            "durée" | "duree" => Ok(NeType::Duree),
            _ => Err(UnknownLabel {
                what: "named-entity type",
                value: s.to_string(),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Event {
    pub eid: String,
    pub class: EventClass,
    /// Annotated lemma; the lowercased surface text stands in when absent.
    pub stem: Option<String>,
    pub text: String,
}

impl Event {
    pub fn lemma(&self) -> String {
        match &self.stem {
            Some(s) => s.to_lowercase(),
            None => self.text.trim().to_lowercase(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventInstance {
    pub eiid: String,
    pub event_id: String,
    pub tense: String,
    pub aspect: String,
    pub pos: String,
    pub polarity: Polarity,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Timex {
    pub tid: String,
    pub ttype: TimexType,
    /// Missing until normalization fills it from the surface text.
    pub value: Option<TemporalValue>,
    pub anchor: Option<String>,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedEntity {
    pub ne_type: NeType,
    pub value: Option<TemporalValue>,
    /// Lets links point at the entity as if it were a timex.
    pub tid: Option<String>,
    pub text: String,
}

/// A stretch of a segment, either plain text or one annotated span.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Span {
    Text(String),
    Event(Event),
    Timex(Timex),
    Entity(NamedEntity),
    Subject(String),
}

impl Span {
    pub fn text(&self) -> &str {
        match self {
            Span::Text(t) | Span::Subject(t) => t,
            Span::Event(e) => &e.text,
            Span::Timex(t) => &t.text,
            Span::Entity(n) => &n.text,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Segment {
    pub spans: Vec<Span>,
}

/// A subject span with the events of its clause.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subject {
    pub text: String,
    pub events: Vec<String>,
}

impl Segment {
    pub fn text(&self) -> String {
        self.spans.iter().map(Span::text).collect()
    }

    pub fn events(&self) -> impl Iterator<Item = &Event> {
        self.spans.iter().filter_map(|s| match s {
            Span::Event(e) => Some(e),
            _ => None,
        })
    }

    /// Subjects in order. An event belongs to the closest subject before
    /// it; events ahead of every subject go to the first one.
    pub fn subjects(&self) -> Vec<Subject> {
        let mut out: Vec<Subject> = Vec::new();
        let mut leading = Vec::new();
        for span in &self.spans {
            match span {
                Span::Subject(t) => out.push(Subject {
                    text: t.clone(),
                    events: Vec::new(),
                }),
                Span::Event(e) => match out.last_mut() {
                    Some(s) => s.events.push(e.eid.clone()),
                    None => leading.push(e.eid.clone()),
                },
                _ => {}
            }
        }
        if let Some(first) = out.first_mut() {
            leading.append(&mut first.events);
            first.events = leading;
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Text,
    Hypothesis,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Text => "T",
            Side::Hypothesis => "H",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LinkEnd {
    Instance(String),
    Time(String),
}

impl LinkEnd {
    pub fn id(&self) -> &str {
        match self {
            LinkEnd::Instance(s) | LinkEnd::Time(s) => s,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TLink {
    pub lid: Option<String>,
    pub from: LinkEnd,
    pub to: LinkEnd,
    pub rel: TLinkRel,
    /// Provenance attributes carried through untouched.
    pub extra: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SLink {
    pub lid: Option<String>,
    pub rel: SLinkRel,
    pub from: String,
    pub to: String,
}

/// Aspectual links are stored and written back, nothing more.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ALink {
    pub attrs: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotatedPair {
    pub id: u32,
    pub gold: bool,
    pub task: Option<String>,
    pub t: Segment,
    pub h: Segment,
    pub instances: Vec<EventInstance>,
    pub tlinks: Vec<TLink>,
    pub slinks: Vec<SLink>,
    pub alinks: Vec<ALink>,
}

/// A timex as seen by the reasoner: a TIMEX3 span or a named entity that
/// carries an id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimexRef<'a> {
    pub tid: &'a str,
    pub side: Side,
    pub ttype: TimexType,
    pub value: Option<&'a TemporalValue>,
    pub anchor: Option<&'a str>,
    pub text: &'a str,
}

impl AnnotatedPair {
    pub fn segment(&self, side: Side) -> &Segment {
        match side {
            Side::Text => &self.t,
            Side::Hypothesis => &self.h,
        }
    }

    pub fn segment_mut(&mut self, side: Side) -> &mut Segment {
        match side {
            Side::Text => &mut self.t,
            Side::Hypothesis => &mut self.h,
        }
    }

    pub fn events(&self) -> impl Iterator<Item = (Side, &Event)> {
        [Side::Text, Side::Hypothesis]
            .into_iter()
            .flat_map(move |side| self.segment(side).events().map(move |e| (side, e)))
    }

    pub fn event(&self, eid: &str) -> Option<(Side, &Event)> {
        self.events().find(|(_, e)| e.eid == eid)
    }

    pub fn timexes(&self) -> Vec<TimexRef<'_>> {
        let mut out = Vec::new();
        for side in [Side::Text, Side::Hypothesis] {
            for span in &self.segment(side).spans {
                match span {
                    Span::Timex(t) => out.push(TimexRef {
                        tid: &t.tid,
                        side,
                        ttype: t.ttype,
                        value: t.value.as_ref(),
                        anchor: t.anchor.as_deref(),
                        text: &t.text,
                    }),
                    Span::Entity(NamedEntity {
                        ne_type,
                        value,
                        tid: Some(tid),
                        text,
                    }) => out.push(TimexRef {
                        tid,
                        side,
                        ttype: ne_type.timex_type(),
                        value: value.as_ref(),
                        anchor: None,
                        text,
                    }),
                    _ => {}
                }
            }
        }
        out
    }

    pub fn timex(&self, tid: &str) -> Option<TimexRef<'_>> {
        self.timexes().into_iter().find(|t| t.tid == tid)
    }

    pub fn instances_of<'a>(&'a self, eid: &'a str) -> impl Iterator<Item = &'a EventInstance> {
        self.instances.iter().filter(move |i| i.event_id == eid)
    }

    pub fn instance(&self, eiid: &str) -> Option<&EventInstance> {
        self.instances.iter().find(|i| i.eiid == eiid)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    pub reference: Option<CalendarDate>,
    pub pairs: Vec<AnnotatedPair>,
}

/// Orders ids like `t2` before `t10`.
pub fn natural_cmp(a: &str, b: &str) -> Ordering {
    let split = |s: &str| {
        let cut = s.trim_end_matches(|c: char| c.is_ascii_digit()).len();
        let (head, digits) = s.split_at(cut);
        (head.to_string(), digits.parse::<u64>().ok())
    };
    split(a).cmp(&split(b)).then_with(|| a.cmp(b))
}

/// The Allen relations a TLINK type stands for. Identity has no interval
/// reading and must be merged away first.
pub fn tlink_to_allen(rel: TLinkRel) -> Option<RelationSet> {
    use AllenRelation::*;
    Some(match rel {
        TLinkRel::Before => RelationSet::single(Before),
        TLinkRel::After => RelationSet::single(After),
        TLinkRel::IBefore => RelationSet::single(Meets),
        TLinkRel::IAfter => RelationSet::single(MetBy),
        TLinkRel::Includes => RelationSet::of(&[Contains, StartedBy, FinishedBy]),
        TLinkRel::IsIncluded => RelationSet::of(&[During, Starts, Finishes]),
        TLinkRel::During => RelationSet::single(During),
        TLinkRel::DuringInv => RelationSet::single(Contains),
        TLinkRel::Simultaneous => RelationSet::single(Equals),
        TLinkRel::Begins => RelationSet::single(Starts),
        TLinkRel::BegunBy => RelationSet::single(StartedBy),
        TLinkRel::Ends => RelationSet::single(Finishes),
        TLinkRel::EndedBy => RelationSet::single(FinishedBy),
        TLinkRel::Identity => return None,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("identity link joins event instance `{instance}` with timex `{time}`")]
pub struct IdentityError {
    pub instance: String,
    pub time: String,
}

/// Links after identity merging, plus the representative of every merged
/// id.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct IdentityMerge {
    pub links: Vec<TLink>,
    pub alias: BTreeMap<String, String>,
}

impl IdentityMerge {
    pub fn representative<'a>(&'a self, id: &'a str) -> &'a str {
        self.alias.get(id).map(String::as_str).unwrap_or(id)
    }
}

/// Collapses IDENTITY links: every class of identical nodes is replaced by
/// its smallest id and the identity links themselves are dropped.
pub fn merge_identity(links: &[TLink]) -> Result<IdentityMerge, IdentityError> {
    let mut parent: BTreeMap<LinkEnd, LinkEnd> = BTreeMap::new();

    fn find(parent: &mut BTreeMap<LinkEnd, LinkEnd>, x: &LinkEnd) -> LinkEnd {
        let mut root = x.clone();
        while let Some(p) = parent.get(&root) {
            if *p == root {
                break;
            }
            root = p.clone();
        }
        parent.insert(x.clone(), root.clone());
        root
    }

    for l in links.iter().filter(|l| l.rel == TLinkRel::Identity) {
        match (&l.from, &l.to) {
            (LinkEnd::Instance(i), LinkEnd::Time(t)) | (LinkEnd::Time(t), LinkEnd::Instance(i)) => {
                return Err(IdentityError {
                    instance: i.clone(),
                    time: t.clone(),
                })
            }
            _ => {}
        }
        let a = find(&mut parent, &l.from);
        let b = find(&mut parent, &l.to);
        if a != b {
            let (keep, drop) = if natural_cmp(a.id(), b.id()) == Ordering::Greater {
                (b, a)
            } else {
                (a, b)
            };
            parent.insert(drop, keep);
        }
    }

    let mut alias = BTreeMap::new();
    let nodes: Vec<LinkEnd> = parent.keys().cloned().collect();
    for n in nodes {
        let root = find(&mut parent, &n);
        if root != n {
            alias.insert(n.id().to_string(), root.id().to_string());
        }
    }

    let rename = |end: &LinkEnd| -> LinkEnd {
        match (end, alias.get(end.id())) {
            (LinkEnd::Instance(_), Some(r)) => LinkEnd::Instance(r.clone()),
            (LinkEnd::Time(_), Some(r)) => LinkEnd::Time(r.clone()),
            _ => end.clone(),
        }
    };
    let links = links
        .iter()
        .filter(|l| l.rel != TLinkRel::Identity)
        .map(|l| TLink {
            from: rename(&l.from),
            to: rename(&l.to),
            ..l.clone()
        })
        .collect();
    Ok(IdentityMerge { links, alias })
}

#[cfg(test)]
mod tests {
    use super::*;
    use AllenRelation::*;

    fn link(from: LinkEnd, rel: TLinkRel, to: LinkEnd) -> TLink {
        TLink {
            lid: None,
            from,
            to,
            rel,
            extra: Vec::new(),
        }
    }

    fn ei(s: &str) -> LinkEnd {
        LinkEnd::Instance(s.into())
    }

    fn t(s: &str) -> LinkEnd {
        LinkEnd::Time(s.into())
    }

    #[test]
    fn tlink_mapping() {
        assert_eq!(tlink_to_allen(TLinkRel::Before), Some(RelationSet::single(Before)));
        assert_eq!(
            tlink_to_allen(TLinkRel::IsIncluded),
            Some(RelationSet::of(&[During, Starts, Finishes]))
        );
        assert_eq!(tlink_to_allen(TLinkRel::Identity), None);
        for &rel in TLinkRel::ALL {
            if let Some(s) = tlink_to_allen(rel) {
                assert!(!s.is_empty());
            }
        }
        // converse TLINK types map to converse sets
        let pairs = [
            (TLinkRel::Before, TLinkRel::After),
            (TLinkRel::IBefore, TLinkRel::IAfter),
            (TLinkRel::Includes, TLinkRel::IsIncluded),
            (TLinkRel::During, TLinkRel::DuringInv),
            (TLinkRel::Begins, TLinkRel::BegunBy),
            (TLinkRel::Ends, TLinkRel::EndedBy),
        ];
        for (a, b) in pairs {
            assert_eq!(tlink_to_allen(a).unwrap().inverse(), tlink_to_allen(b).unwrap());
        }
    }

    #[test]
    fn labels_parse_loosely_print_canonically() {
        assert_eq!("is-included".parse::<TLinkRel>().unwrap(), TLinkRel::IsIncluded);
        assert_eq!("i_state".parse::<EventClass>().unwrap(), EventClass::IState);
        assert_eq!(EventClass::IState.to_string(), "I_STATE");
        assert!("EPIPHANY".parse::<EventClass>().is_err());
        assert_eq!("durée".parse::<NeType>().unwrap(), NeType::Duree);
    }

    #[test]
    fn identity_merges_to_smallest_id() {
        let links = vec![
            link(ei("ei10"), TLinkRel::Identity, ei("ei2")),
            link(ei("ei2"), TLinkRel::Identity, ei("ei7")),
            link(ei("ei7"), TLinkRel::Before, t("t1")),
        ];
        let m = merge_identity(&links).unwrap();
        assert_eq!(m.links.len(), 1);
        assert_eq!(m.links[0].from, ei("ei2"));
        assert_eq!(m.representative("ei10"), "ei2");
        assert_eq!(m.representative("ei7"), "ei2");
        assert_eq!(m.representative("t1"), "t1");
    }

    #[test]
    fn identity_between_event_and_time_rejected() {
        let links = vec![link(ei("ei1"), TLinkRel::Identity, t("t1"))];
        assert!(merge_identity(&links).is_err());
    }

    #[test]
    fn natural_order() {
        assert_eq!(natural_cmp("t2", "t10"), Ordering::Less);
        assert_eq!(natural_cmp("t10", "t10"), Ordering::Equal);
        assert_eq!(natural_cmp("e9", "t1"), Ordering::Less);
    }

    #[test]
    fn subjects_take_their_clause_events() {
        let ev = |id: &str| {
            Span::Event(Event {
                eid: id.into(),
                class: EventClass::Occurrence,
                stem: None,
                text: id.into(),
            })
        };
        let seg = Segment {
            spans: vec![
                ev("e0"),
                Span::Subject("Mark".into()),
                ev("e1"),
                Span::Text(", ".into()),
                Span::Subject("Celine".into()),
                ev("e2"),
            ],
        };
        let subs = seg.subjects();
        assert_eq!(subs[0].events, vec!["e0", "e1"]);
        assert_eq!(subs[1].events, vec!["e2"]);
    }

    #[test]
    fn timex_type_admits() {
        let v = |s: &str| s.parse::<TemporalValue>().unwrap();
        assert!(TimexType::Date.admits(&v("1948")));
        assert!(!TimexType::Date.admits(&v("7y")));
        assert!(TimexType::Time.admits(&v("T14:00")));
        assert!(TimexType::Time.admits(&v("AFTERNOON")));
        assert!(TimexType::Duration.admits(&v("1940/1950")));
        assert!(TimexType::Duration.admits(&v("PMD")));
        assert!(!TimexType::Duration.admits(&v("1945")));
    }
}
