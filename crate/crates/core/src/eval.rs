//! Scoring against gold labels, annotator agreement and error breakdowns.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::annotation::Corpus;
use crate::rules::{Engine, EngineConfig, Reason, RuleId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("no labels")]
    Empty,
    #[error("expected {expected} labels, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("line {line}: `{value}` is not TRUE or FALSE")]
    Label { line: usize, value: String },
    #[error("line {line}: {message}")]
    Cause { line: usize, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairRow {
    pub id: u32,
    pub gold: bool,
    pub system: bool,
    pub reason: Reason,
    pub fired: Vec<RuleId>,
}

impl PairRow {
    pub fn matches(&self) -> bool {
        self.gold == self.system
    }
}

/// Gold label by system decision.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Confusion {
    pub true_positive: usize,
    pub false_negative: usize,
    pub false_positive: usize,
    pub true_negative: usize,
}

impl Confusion {
    pub fn add(&mut self, gold: bool, system: bool) {
        match (gold, system) {
            (true, true) => self.true_positive += 1,
            (true, false) => self.false_negative += 1,
            (false, true) => self.false_positive += 1,
            (false, false) => self.true_negative += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.true_positive + self.false_negative + self.false_positive + self.true_negative
    }

    pub fn off_diagonal(&self) -> usize {
        self.false_negative + self.false_positive
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreReport {
    pub total: usize,
    pub matches: usize,
    pub accuracy: f64,
    pub confusion: Confusion,
    pub rows: Vec<PairRow>,
    pub config_fingerprint: String,
}

/// Matches over total; an empty corpus scores 0.
pub fn accuracy(matches: usize, total: usize) -> f64 {
    if total == 0 {
        0.0
    } else {
        matches as f64 / total as f64
    }
}

/// SHA-256 of the configuration as JSON.
pub fn fingerprint(config: &EngineConfig) -> String {
    let json = serde_json::to_vec(config).expect("config serializes");
    Sha256::digest(&json).iter().fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

impl ScoreReport {
    pub fn from_rows(mut rows: Vec<PairRow>, config: &EngineConfig) -> Self {
        rows.sort_by_key(|r| r.id);
        let mut confusion = Confusion::default();
        for r in &rows {
            confusion.add(r.gold, r.system);
        }
        let matches = rows.iter().filter(|r| r.matches()).count();
        ScoreReport {
            total: rows.len(),
            matches,
            accuracy: accuracy(matches, rows.len()),
            confusion,
            rows,
            config_fingerprint: fingerprint(config),
        }
    }

    pub fn render_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{:>6}  {:<5}  {:<5}  {:<22}  fired", "pair", "gold", "sys", "reason");
        for r in &self.rows {
            let fired: Vec<String> = r.fired.iter().map(|f| f.to_string()).collect();
            let fired = if fired.is_empty() { "-".to_string() } else { fired.join(",") };
            let _ = writeln!(
                s,
                "{:>6}  {:<5}  {:<5}  {:<22}  {}{}",
                r.id,
                label(r.gold),
                label(r.system),
                r.reason.to_string(),
                fired,
                if r.matches() { "" } else { "  *" }
            );
        }
        let c = &self.confusion;
        let _ = writeln!(s);
        let _ = writeln!(
            s,
            "accuracy {:.4} ({}/{})",
            self.accuracy, self.matches, self.total
        );
        let _ = writeln!(
            s,
            "gold TRUE: {} entailed, {} not; gold FALSE: {} entailed, {} not",
            c.true_positive, c.false_negative, c.false_positive, c.true_negative
        );
        let _ = writeln!(s, "config {}", self.config_fingerprint);
        s
    }
}

fn label(b: bool) -> &'static str {
    if b {
        "TRUE"
    } else {
        "FALSE"
    }
}

/// Runs the engine on every pair. Pairs are judged in parallel; rows come
/// back ordered by pair id.
pub fn score(corpus: &Corpus, engine: &Engine) -> ScoreReport {
    let reference = corpus.reference.unwrap_or(engine.config().reference_date);
    let rows: Vec<PairRow> = corpus
        .pairs
        .par_iter()
        .map(|p| {
            let v = engine.supervise_at(p, &reference);
            log::debug!("pair {}: {:?} ({})", p.id, v.decision, v.reason);
            PairRow {
                id: p.id,
                gold: p.gold,
                system: v.decision.as_bool(),
                reason: v.reason,
                fired: v.fired.iter().map(|o| o.rule).collect(),
            }
        })
        .collect();
    ScoreReport::from_rows(rows, engine.config())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AgreementReport {
    pub po: f64,
    pub pe: f64,
    /// `None` when chance agreement is total but observed agreement is not.
    pub kappa: Option<f64>,
}

/// Cohen's kappa for two binary annotations of the same items.
pub fn kappa(a: &[bool], b: &[bool]) -> Result<AgreementReport, EvalError> {
    if a.len() != b.len() {
        return Err(EvalError::LengthMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    if a.is_empty() {
        return Err(EvalError::Empty);
    }
    let n = a.len() as f64;
    let po = a.iter().zip(b).filter(|(x, y)| x == y).count() as f64 / n;
    let pa = a.iter().filter(|x| **x).count() as f64 / n;
    let pb = b.iter().filter(|x| **x).count() as f64 / n;
    let pe = pa * pb + (1.0 - pa) * (1.0 - pb);
    let kappa = if pe < 1.0 {
        Some((po - pe) / (1.0 - pe))
    } else if po == 1.0 {
        Some(1.0)
    } else {
        None
    };
    Ok(AgreementReport { po, pe, kappa })
}

/// One TRUE/FALSE label per line; blank lines and `#` comments skipped.
pub fn parse_labels(src: &str) -> Result<Vec<bool>, EvalError> {
    let mut out = Vec::new();
    for (i, raw) in src.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        match line.to_ascii_uppercase().as_str() {
            "" => {}
            "TRUE" | "YES" | "1" => out.push(true),
            "FALSE" | "NO" | "0" => out.push(false),
            _ => {
                return Err(EvalError::Label {
                    line: i + 1,
                    value: line.to_string(),
                })
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Filtered {
    pub corpus: Corpus,
    pub warnings: Vec<String>,
}

/// Keeps the pairs both annotators agree on, labelled with that agreement.
pub fn filter_disagreements(corpus: &Corpus, a: &[bool], b: &[bool]) -> Result<Filtered, EvalError> {
    for labels in [a, b] {
        if labels.len() != corpus.pairs.len() {
            return Err(EvalError::LengthMismatch {
                expected: corpus.pairs.len(),
                found: labels.len(),
            });
        }
    }
    let pairs: Vec<_> = corpus
        .pairs
        .iter()
        .zip(a.iter().zip(b))
        .filter(|(_, (x, y))| x == y)
        .map(|(p, (x, _))| {
            let mut p = p.clone();
            p.gold = *x;
            p
        })
        .collect();
    let mut warnings = Vec::new();
    let dropped = corpus.pairs.len() - pairs.len();
    if dropped > 0 {
        warnings.push(format!("dropped {dropped} of {} pairs on disagreement", corpus.pairs.len()));
    }
    if pairs.is_empty() && !corpus.pairs.is_empty() {
        warnings.push("annotators agree on no pair; corpus is empty".into());
    }
    for w in &warnings {
        log::warn!("{w}");
    }
    Ok(Filtered {
        corpus: Corpus {
            reference: corpus.reference,
            pairs,
        },
        warnings,
    })
}

pub const UNCATEGORIZED: &str = "uncategorized";

/// `pair-id<TAB>cause` lines.
pub fn parse_causes(src: &str) -> Result<BTreeMap<u32, String>, EvalError> {
    let mut out = BTreeMap::new();
    for (i, raw) in src.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| EvalError::Cause { line: i + 1, message };
        let (id, cause) = line
            .split_once('\t')
            .ok_or_else(|| err("expected `id<TAB>cause`".into()))?;
        let id: u32 = id.trim().parse().map_err(|_| err(format!("bad pair id `{id}`")))?;
        out.insert(id, cause.trim().to_string());
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CauseShare {
    pub cause: String,
    pub count: usize,
    pub percent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorBreakdown {
    pub errors: usize,
    /// Largest share first, then by name.
    pub causes: Vec<CauseShare>,
}

/// Share of each tagged cause among mismatched pairs.
pub fn error_report(report: &ScoreReport, causes: &BTreeMap<u32, String>) -> ErrorBreakdown {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    let mut errors = 0;
    for r in report.rows.iter().filter(|r| !r.matches()) {
        errors += 1;
        let cause = causes.get(&r.id).map_or(UNCATEGORIZED, String::as_str);
        *counts.entry(cause).or_default() += 1;
    }
    let mut causes: Vec<CauseShare> = counts
        .into_iter()
        .map(|(cause, count)| CauseShare {
            cause: cause.to_string(),
            count,
            percent: 100.0 * count as f64 / errors as f64,
        })
        .collect();
    causes.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.cause.cmp(&b.cause)));
    ErrorBreakdown { errors, causes }
}

impl ErrorBreakdown {
    pub fn render_text(&self) -> String {
        let mut s = format!("{} errors\n", self.errors);
        for c in &self.causes {
            let _ = writeln!(s, "  {:<24} {:>4}  {:>6.2}%", c.cause, c.count, c.percent);
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn row(id: u32, gold: bool, system: bool) -> PairRow {
        PairRow {
            id,
            gold,
            system,
            reason: if system { Reason::RuleSupported } else { Reason::RuleRefuted },
            fired: vec![],
        }
    }

    #[test]
    fn accuracy_fraction() {
        assert!((accuracy(500, 800) - 0.625).abs() < 1e-9);
        assert_eq!(accuracy(3, 3), 1.0);
        assert_eq!(accuracy(0, 0), 0.0);
    }

    #[test]
    fn kappa_values() {
        // 80% agreement with both annotators split evenly.
        let a = [true, true, true, true, true, false, false, false, false, false];
        let b = [true, true, true, true, false, true, false, false, false, false];
        let k = kappa(&a, &b).unwrap();
        assert!((k.po - 0.8).abs() < 1e-9);
        assert!((k.pe - 0.5).abs() < 1e-9);
        assert!((k.kappa.unwrap() - 0.6).abs() < 1e-9);

        assert_eq!(kappa(&a, &a).unwrap().kappa, Some(1.0));

        let all = vec![true; 30];
        let alt: Vec<bool> = (0..30).map(|i| i % 2 == 0).collect();
        let k = kappa(&all, &alt).unwrap();
        assert!((k.po - 0.5).abs() < 1e-9 && (k.pe - 0.5).abs() < 1e-9);
        assert!(k.kappa.unwrap().abs() < 1e-9);

        assert_eq!(kappa(&[true], &[true]).unwrap().kappa, Some(1.0));
        assert_eq!(kappa(&[true, true], &[true, true]).unwrap().pe, 1.0);
        assert_eq!(kappa(&[], &[]), Err(EvalError::Empty));
        assert!(matches!(kappa(&[true], &[]), Err(EvalError::LengthMismatch { .. })));
    }

    #[test]
    fn labels_and_causes() {
        assert_eq!(parse_labels("TRUE\nfalse\n\n# x\n1\n").unwrap(), vec![true, false, true]);
        assert!(matches!(parse_labels("TRUE\nmaybe\n"), Err(EvalError::Label { line: 2, .. })));
        let c = parse_causes("3\tlexicon-gap\n4\tannotation-gap\n").unwrap();
        assert_eq!(c[&3], "lexicon-gap");
        assert!(parse_causes("3 lexicon-gap\n").is_err());
    }

    #[test]
    fn breakdown_shares() {
        let rows = vec![row(1, true, false), row(2, true, false), row(3, false, true), row(4, true, false), row(5, true, true)];
        let report = ScoreReport::from_rows(rows, &EngineConfig::default());
        let causes: BTreeMap<u32, String> =
            [(1, "a"), (2, "a"), (3, "a"), (4, "b")].into_iter().map(|(k, v)| (k, v.to_string())).collect();
        let b = error_report(&report, &causes);
        assert_eq!(b.errors, 4);
        assert_eq!((b.causes[0].cause.as_str(), b.causes[0].percent), ("a", 75.0));
        assert_eq!((b.causes[1].cause.as_str(), b.causes[1].percent), ("b", 25.0));

        let b = error_report(&report, &BTreeMap::new());
        assert_eq!(b.causes[0].cause, UNCATEGORIZED);

        let clean = ScoreReport::from_rows(vec![row(1, true, true)], &EngineConfig::default());
        assert!(error_report(&clean, &causes).causes.is_empty());
    }

    #[test]
    fn fingerprint_tracks_config() {
        let a = EngineConfig::default();
        let b = EngineConfig {
            tolerance_years: 0,
            ..EngineConfig::default()
        };
        assert_eq!(fingerprint(&a), fingerprint(&a.clone()));
        assert_ne!(fingerprint(&a), fingerprint(&b));
        assert_eq!(fingerprint(&a).len(), 64);
    }

    fn labels(n: usize) -> impl Strategy<Value = (Vec<bool>, Vec<bool>)> {
        (prop::collection::vec(any::<bool>(), n), prop::collection::vec(any::<bool>(), n))
    }

    proptest! {
        #[test]
        fn kappa_properties((a, b) in (1usize..40).prop_flat_map(labels)) {
            let k = kappa(&a, &b).unwrap();
            let swapped = kappa(&b, &a).unwrap();
            prop_assert!((0.0..=1.0).contains(&k.po) && (0.0..=1.0).contains(&k.pe));
            prop_assert_eq!(k.kappa.map(|x| (x * 1e9).round()), swapped.kappa.map(|x| (x * 1e9).round()));
            if let Some(v) = k.kappa {
                prop_assert!(v <= k.po + 1e-12);
                if k.pe < 1.0 {
                    prop_assert_eq!(v >= 1.0 - 1e-12, k.po == 1.0);
                }
            }
        }

        #[test]
        fn report_invariants(gs in prop::collection::vec((any::<bool>(), any::<bool>()), 0..50)) {
            let rows: Vec<PairRow> = gs.iter().enumerate().map(|(i, (g, s))| row(i as u32, *g, *s)).collect();
            let r = ScoreReport::from_rows(rows, &EngineConfig::default());
            prop_assert!(r.matches <= r.total);
            prop_assert_eq!(r.confusion.total(), r.total);
            if r.total > 0 {
                let expected = 1.0 - r.confusion.off_diagonal() as f64 / r.total as f64;
                prop_assert!((r.accuracy - expected).abs() < 1e-12);
            }
        }
    }
}
