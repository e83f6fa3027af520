mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{golden, negatives, pair, random_pair_xml};
use timinf::annotation::{parse_corpus, AnnotatedPair};
use timinf::lexicon::LexicalVerdict;
use timinf::resources::Resources;
use timinf::rules::{
    decide, AnchorKind, Decision, Engine, EngineConfig, PairContext, Reason, Rule, RuleBook, RuleId, R1, R2,
    R3, R4, R5, R6,
};
use timinf::values::{CalendarDate, Duration, TemporalValue};

fn engine() -> Engine {
    Engine::new(Resources::embedded(), EngineConfig::default())
}

fn reference() -> CalendarDate {
    CalendarDate::ymd(2008, 1, 1).unwrap()
}

fn one_pair(body: &str) -> AnnotatedPair {
    let xml = format!(r#"<corpus><pair id="1" value="TRUE">{body}</pair></corpus>"#);
    parse_corpus(xml.as_bytes()).unwrap().pairs.remove(0)
}

/// A random pair whose two main events share a lemma, so the engine
/// actually reaches the rules.
fn random_matching_pair(seed: u64) -> AnnotatedPair {
    let xml = random_pair_xml(&mut ChaCha8Rng::seed_from_u64(seed))
        .replace(">a</EVENT>", ">zeta</EVENT>")
        .replace(">b</EVENT>", ">zeta</EVENT>");
    parse_corpus(xml.as_bytes()).unwrap().pairs.remove(0)
}

#[test]
fn relation_filters_by_value_kind() {
    let g = golden();
    let a = engine().analyze(pair(&g, 4), &reference()).unwrap();
    let d = a.relation("e2", AnchorKind::Duration).unwrap();
    assert_eq!(d.value, TemporalValue::Duration(Duration::years(5)));
    assert!(a.relation("e2", AnchorKind::Date).is_none());
    assert_eq!(a.debut("e1"), Some(CalendarDate::year(1880).unwrap()));
    assert_eq!(a.fin("e1"), Some(CalendarDate::ym(1885, 7).unwrap()));
}

#[test]
fn start_boundary_from_begun_by_link() {
    let g = golden();
    let a = engine().analyze(pair(&g, 3), &reference()).unwrap();
    assert_eq!(a.debut("e2"), Some(CalendarDate::ymd(1954, 11, 1).unwrap()));
    assert_eq!(a.fin("e3"), Some(CalendarDate::ymd(1962, 7, 5).unwrap()));
    // Boundary links do not locate an event.
    assert!(a.located("e2", AnchorKind::Date).is_none());
}

#[test]
fn ordering_is_derived_through_a_chain() {
    let p = one_pair(
        r#"<t><SUBJ>s</SUBJ> <EVENT eid="e1" class="OCCURRENCE">x</EVENT> <EVENT eid="e3" class="OCCURRENCE">y</EVENT></t>
<h><SUBJ>s</SUBJ> <EVENT eid="e2" class="OCCURRENCE">x</EVENT></h>
<MAKEINSTANCE eventID="e1" eiid="ei1"/><MAKEINSTANCE eventID="e2" eiid="ei2"/><MAKEINSTANCE eventID="e3" eiid="ei3"/>
<TLINK lid="l1" eventInstanceID="ei1" relatedToEventInstance="ei3" relType="BEFORE"/>
<TLINK lid="l2" eventInstanceID="ei3" relatedToEventInstance="ei2" relType="IBEFORE"/>"#,
    );
    let a = engine().analyze(&p, &reference()).unwrap();
    assert!(a.before("e1", "e2"));
    assert!(a.after("e2", "e1"));
    assert!(!a.before("e2", "e1"));
}

#[test]
fn zero_span_is_not_a_duration() {
    let p = one_pair(
        r#"<t><SUBJ>s</SUBJ> <EVENT eid="e1" class="OCCURRENCE">x</EVENT> <TIMEX3 tid="t1" TYPE="DATE" VAL="1880">a</TIMEX3></t>
<h><SUBJ>s</SUBJ> <EVENT eid="e2" class="OCCURRENCE">x</EVENT> <TIMEX3 tid="t3" TYPE="DURATION" VAL="5y">c</TIMEX3></h>
<MAKEINSTANCE eventID="e1" eiid="ei1"/><MAKEINSTANCE eventID="e2" eiid="ei2"/>
<TLINK lid="l1" eventInstanceID="ei1" relatedToTime="t1" relType="SIMULTANEOUS"/>
<TLINK lid="l2" eventInstanceID="ei2" relatedToTime="t3" relType="DURING"/>"#,
    );
    let e = engine();
    let a = e.analyze(&p, &reference()).unwrap();
    assert_eq!(a.debut("e1"), a.fin("e1"));
    let ctx = PairContext {
        analysis: &a,
        e1: "e1",
        e2: "e2",
        lexical: LexicalVerdict::Equivalent,
        config: e.config(),
    };
    assert_eq!(R2.evaluate(&ctx).verdict, Some(false));
}

#[test]
fn same_year_is_not_an_order() {
    let n = negatives();
    let a = engine().analyze(pair(&n, 1002), &reference()).unwrap();
    let cfg = EngineConfig::default();
    let ctx = PairContext {
        analysis: &a,
        e1: "e1",
        e2: "e2",
        lexical: LexicalVerdict::Contrary,
        config: &cfg,
    };
    assert_eq!(R6.evaluate(&ctx).verdict, Some(false));
}

#[test]
fn contrary_events_without_anchors_are_undecided() {
    let p = one_pair(
        r#"<t><SUBJ>s</SUBJ> <EVENT eid="e1" class="OCCURRENCE">independence</EVENT></t>
<h><SUBJ>s</SUBJ> <EVENT eid="e2" class="OCCURRENCE">colonize</EVENT></h>
<MAKEINSTANCE eventID="e1" eiid="ei1"/><MAKEINSTANCE eventID="e2" eiid="ei2"/>"#,
    );
    let e = engine();
    let a = e.analyze(&p, &reference()).unwrap();
    let ctx = PairContext {
        analysis: &a,
        e1: "e1",
        e2: "e2",
        lexical: LexicalVerdict::Contrary,
        config: e.config(),
    };
    assert!(!R6.evaluate(&ctx).applicable());
    let v = e.supervise(&p);
    assert_eq!((v.decision, v.reason), (Decision::NotEntailed, Reason::NoTemporalEvidence));
}

#[test]
fn contradictory_links_block_entailment() {
    let p = one_pair(
        r#"<t><SUBJ>s</SUBJ> <EVENT eid="e1" class="OCCURRENCE">x</EVENT> <TIMEX3 tid="t1" TYPE="DATE" VAL="1990">a</TIMEX3></t>
<h><SUBJ>s</SUBJ> <EVENT eid="e2" class="OCCURRENCE">x</EVENT> <TIMEX3 tid="t2" TYPE="DATE" VAL="1990">b</TIMEX3></h>
<MAKEINSTANCE eventID="e1" eiid="ei1"/><MAKEINSTANCE eventID="e2" eiid="ei2"/>
<TLINK lid="l1" eventInstanceID="ei1" relatedToTime="t1" relType="BEFORE"/>
<TLINK lid="l2" eventInstanceID="ei1" relatedToTime="t1" relType="AFTER"/>
<TLINK lid="l3" eventInstanceID="ei2" relatedToTime="t2" relType="IS_INCLUDED"/>"#,
    );
    let e = engine();
    assert!(e.analyze(&p, &reference()).is_err());
    let v = e.supervise(&p);
    assert_eq!((v.decision, v.reason), (Decision::NotEntailed, Reason::NoTemporalEvidence));
    assert!(!v.trace.is_empty());
}

fn reversed() -> RuleBook {
    RuleBook::new(vec![
        Box::new(R6),
        Box::new(R5),
        Box::new(R4),
        Box::new(R3),
        Box::new(R2),
        Box::new(R1),
    ])
}

fn verdicts() -> impl Strategy<Value = LexicalVerdict> {
    prop_oneof![
        Just(LexicalVerdict::Equivalent),
        Just(LexicalVerdict::Contrary),
        Just(LexicalVerdict::Unrelated),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn rule_order_does_not_matter(seed in any::<u64>(), lexical in verdicts()) {
        let e = engine();
        let p = random_matching_pair(seed);
        if let Ok(a) = e.analyze(&p, &reference()) {
            let ctx = PairContext { analysis: &a, e1: "e1", e2: "e2", lexical, config: e.config() };
            prop_assert_eq!(RuleBook::standard().run(&ctx), reversed().run(&ctx));
        }
        let rev = Engine::new(Resources::embedded(), EngineConfig::default()).with_rules(reversed());
        prop_assert_eq!(e.supervise(&p), rev.supervise(&p));
    }

    #[test]
    fn dispatch_follows_lexical_verdict(seed in any::<u64>(), lexical in verdicts()) {
        let e = engine();
        let p = random_matching_pair(seed);
        if let Ok(a) = e.analyze(&p, &reference()) {
            let ctx = PairContext { analysis: &a, e1: "e1", e2: "e2", lexical, config: e.config() };
            let out = RuleBook::standard().run(&ctx);
            match lexical {
                LexicalVerdict::Unrelated => prop_assert!(out.is_empty()),
                LexicalVerdict::Contrary => prop_assert_eq!(out.iter().map(|o| o.rule).collect::<Vec<_>>(), vec![RuleId::R6]),
                LexicalVerdict::Equivalent => prop_assert_eq!(
                    out.iter().map(|o| o.rule).collect::<Vec<_>>(),
                    vec![RuleId::R1, RuleId::R2, RuleId::R3, RuleId::R4, RuleId::R5]
                ),
            }
        }
    }

    #[test]
    fn supervision_is_deterministic(seed in any::<u64>()) {
        let p = random_matching_pair(seed);
        prop_assert_eq!(engine().supervise(&p), engine().supervise(&p));
    }

    #[test]
    fn entailment_needs_a_consistent_network(seed in any::<u64>()) {
        let e = engine();
        let p = random_matching_pair(seed);
        let v = e.supervise(&p);
        if e.analyze(&p, &reference()).is_err() {
            prop_assert_eq!(v.decision, Decision::NotEntailed);
            prop_assert_eq!(v.reason, Reason::NoTemporalEvidence);
        }
        if v.decision == Decision::Entailed {
            prop_assert!(!v.fired.is_empty());
            prop_assert!(v.fired.iter().all(|o| o.verdict == Some(true)));
            prop_assert_eq!(decide(&v.fired), (Decision::Entailed, Reason::RuleSupported));
        }
    }
}
