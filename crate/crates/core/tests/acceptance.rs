//! One line per acceptance criterion. Exits non-zero if any fails.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::process::ExitCode;
use std::sync::Mutex;
use std::time::{Duration as Elapsed, Instant};

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use common::{golden, negatives, pair, random_pair, OUT_OF_SCOPE};
use timinf::allen::{compose, invert, AllenRelation, ConcreteInterval, RelationSet, TemporalNetwork};
use timinf::annotation::{normalize_pair, parse_corpus, serialize_corpus, AdverbialTable, Corpus};
use timinf::eval::{accuracy, kappa};
use timinf::lexicon::LexicalVerdict;
use timinf::resources::Resources;
use timinf::rules::{
    decide, Decision, Engine, EngineConfig, PairContext, Rule, RuleBook, RuleId, RuleOutcome, R1, R2, R3, R4, R5,
    R6,
};
use timinf::values::{difference, retranche, CalendarDate, CodedAdverbial, Duration, TemporalValue, TimeOfDay};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Elapsed) -> Result<String, String> {
    let took = start.elapsed();
    ensure(took < limit, || format!("took {took:?}, limit {limit:?}"))?;
    Ok(format!("{took:.2?}"))
}

fn intervals(max: i32) -> Vec<ConcreteInterval<i32>> {
    let mut out = Vec::new();
    for s in 0..max {
        for e in s + 1..=max {
            out.push(ConcreteInterval::new(s, e).unwrap());
        }
    }
    out
}

fn composition_oracle() -> Check {
    use AllenRelation::*;
    let start = Instant::now();
    let ivs = intervals(8);
    let mut seen: BTreeMap<(AllenRelation, AllenRelation), RelationSet> = BTreeMap::new();
    for a in &ivs {
        for b in &ivs {
            let r1 = a.relate(b);
            for c in &ivs {
                let s = seen.entry((r1, b.relate(c))).or_default();
                s.insert(a.relate(c));
            }
        }
    }
    ensure(seen.len() == 169, || format!("only {} pairs witnessed", seen.len()))?;
    for ((r1, r2), s) in &seen {
        let got = compose(*r1, *r2);
        ensure(got == *s, || format!("compose({r1:?},{r2:?}) = {got}, witnessed {s}"))?;
    }
    ensure(compose(Before, Before) == RelationSet::single(Before), || "before;before".into())?;
    ensure(compose(Meets, During) == RelationSet::of(&[Overlaps, During, Starts]), || {
        "meets;during".into()
    })?;
    within(start, Elapsed::from_secs(5)).map(|t| format!("169 entries match enumeration in {t}"))
}

fn closure_soundness() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xA11E);
    let names = ["a", "b", "c", "d"];
    for round in 0..200 {
        let ivs: Vec<ConcreteInterval<i32>> = (0..4)
            .map(|_| {
                let s = rng.gen_range(0..9);
                ConcreteInterval::new(s, rng.gen_range(s + 1..=10)).unwrap()
            })
            .collect();
        let mut net = TemporalNetwork::new();
        for n in names {
            net.add_node(n);
        }
        for i in 0..4 {
            for j in i + 1..4 {
                if rng.gen_bool(0.2) {
                    continue;
                }
                let truth = ivs[i].relate(&ivs[j]);
                let noise = RelationSet::from_bits(rng.gen::<u16>());
                let set = noise.union(RelationSet::single(truth)).intersection(RelationSet::FULL);
                net.constrain(i, j, set).map_err(|e| format!("round {round}: {e}"))?;
            }
        }
        let closed = net.closure().map_err(|e| format!("round {round}: realizable network rejected: {e}"))?;
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    let truth = ivs[i].relate(&ivs[j]);
                    ensure(closed.edge(i, j).contains(truth), || {
                        format!("round {round}: {}-{} lost {truth:?}", names[i], names[j])
                    })?;
                }
            }
        }
        let again = closed.closure().map_err(|e| format!("round {round}: {e}"))?;
        ensure(again == closed, || format!("round {round}: closure not idempotent"))?;
    }
    within(start, Elapsed::from_secs(10)).map(|t| format!("200 networks in {t}"))
}

fn inversion() -> Check {
    use AllenRelation::*;
    let table = [
        (Before, After),
        (Meets, MetBy),
        (Overlaps, OverlappedBy),
        (During, Contains),
        (Starts, StartedBy),
        (Finishes, FinishedBy),
        (Equals, Equals),
    ];
    for r in AllenRelation::ALL {
        ensure(invert(invert(r)) == r, || format!("{r:?} is not an involution"))?;
        let a = ConcreteInterval::new(0, 3).unwrap();
        for b in intervals(6) {
            if a.relate(&b) == r {
                ensure(b.relate(&a) == invert(r), || format!("{r:?} inverse disagrees with intervals"))?;
            }
        }
    }
    for (r, s) in table {
        ensure(invert(r) == s && invert(s) == r, || format!("{r:?} should pair with {s:?}"))?;
    }
    Ok("13 relations, 7 pairings".into())
}

fn golden_verdicts() -> Check {
    let g = golden();
    let e = Engine::new(Resources::embedded(), EngineConfig::default());
    let start = Instant::now();
    let reference = g.reference.unwrap();
    let mut checked = 0;
    for p in g.pairs.iter().filter(|p| !OUT_OF_SCOPE.contains(&p.id)) {
        let v = e.supervise_at(p, &reference);
        ensure(v.decision.as_bool() == p.gold, || {
            format!("pair {}: got {:?} ({}), gold {}", p.id, v.decision, v.reason, p.gold)
        })?;
        checked += 1;
    }
    let t = within(start, Elapsed::from_secs(1))?;
    Ok(format!("{checked} in-scope pairs, pairs {OUT_OF_SCOPE:?} out of scope, {t}"))
}

fn per_rule() -> Check {
    let e = Engine::new(Resources::embedded(), EngineConfig::default());
    let (g, n) = (golden(), negatives());
    let cases: [(&dyn Rule, u32, u32); 6] = [
        (&R1, 8, 1008),
        (&R2, 4, 1004),
        (&R3, 3, 1003),
        (&R4, 10, 1010),
        (&R5, 1, 1001),
        (&R6, 2, 1002),
    ];
    for (rule, pos, neg) in cases {
        for (corpus, id, want) in [(&g, pos, true), (&n, neg, false)] {
            let p = pair(corpus, id);
            let reference = corpus.reference.unwrap();
            let a = e.analyze(p, &reference).map_err(|err| format!("pair {id}: {err}"))?;
            let (cands, _) = timinf::rules::candidates(p, e.resources());
            let c = cands.first().ok_or_else(|| format!("pair {id}: no candidate"))?;
            let ctx = PairContext {
                analysis: &a,
                e1: &c.e1,
                e2: &c.e2,
                lexical: c.lexical,
                config: e.config(),
            };
            let out = rule.evaluate(&ctx);
            ensure(out.verdict == Some(want), || format!("{:?} on pair {id}: {out}", rule.id()))?;
        }
    }
    Ok("R1..R6 true on their pair, false on its variant".into())
}

fn metrics() -> Check {
    let acc = accuracy(500, 800);
    ensure((acc - 0.625).abs() < 1e-9, || format!("accuracy {acc}"))?;
    let a = [true, true, true, true, true, false, false, false, false, false];
    let mut b = a;
    b[0] = false;
    b[9] = true;
    let k = kappa(&a, &b).map_err(|e| e.to_string())?;
    ensure((k.po - 0.8).abs() < 1e-9, || format!("po {}", k.po))?;
    let kv = k.kappa.ok_or("kappa undefined")?;
    ensure((kv - 0.6).abs() < 1e-9, || format!("kappa {kv}"))?;
    Ok(format!("accuracy {acc}, kappa {kv:.4}"))
}

fn calendar() -> Check {
    let d = difference(&CalendarDate::year(1885).unwrap(), &CalendarDate::year(1880).unwrap());
    ensure(d == Duration::years(5), || format!("difference gave {d}"))?;
    let back = retranche(&CalendarDate::ymd(1804, 12, 2).unwrap(), &Duration::years(1)).map_err(|e| e.to_string())?;
    ensure(back.year_value() == 1803, || format!("retranche gave {back}"))?;

    let g = golden();
    let reference = g.reference.unwrap();
    let p3 = pair(&g, 3);
    let verdict = |tol| {
        let cfg = EngineConfig {
            tolerance_years: tol,
            ..EngineConfig::default()
        };
        Engine::new(Resources::embedded(), cfg).supervise_at(p3, &reference).decision
    };
    ensure(verdict(1) == Decision::Entailed, || "pair 3 fails with tolerance 1".into())?;
    ensure(verdict(0) == Decision::NotEntailed, || "pair 3 passes with tolerance 0".into())?;
    Ok("5y, 1803, tolerance pinned at 1 year".into())
}

fn adverbials() -> Check {
    use CodedAdverbial as C;
    let table = AdverbialTable::standard();
    let days = ["monday", "tuesday", "wednesday", "thursday", "friday", "saturday", "sunday"];
    let mut expected: Vec<(&str, CodedAdverbial)> =
        days.iter().enumerate().map(|(i, d)| (*d, C::Weekday(i as u8 + 1))).collect();
    expected.extend([
        ("the day before yesterday", C::relative_days(-2)),
        ("two days ago", C::relative_days(-2)),
        ("yesterday", C::relative_days(-1)),
        ("every day", C::Often),
        ("someday", C::Psd),
        ("many days", C::Pmd),
        ("in the morning", C::Morning),
        ("in the evening", C::Night),
        ("in the afternoon", C::Afternoon),
    ]);
    for (form, code) in &expected {
        let got = table.lookup(form);
        ensure(got == Some(*code), || format!("`{form}` gave {got:?}, want {code}"))?;
    }
    let afternoon = TemporalValue::Code(C::Afternoon);
    let at = |h, m| TemporalValue::Time(TimeOfDay::new(h, m).unwrap());
    ensure(timinf::values::inclut(&at(14, 0), &afternoon), || "14:00 outside afternoon".into())?;
    ensure(!timinf::values::inclut(&at(11, 59), &afternoon), || "11:59 inside afternoon".into())?;
    Ok(format!("{} surface forms, afternoon bounds", expected.len()))
}

fn round_trip() -> Check {
    let start = Instant::now();
    let r = Resources::embedded();
    for c in [golden(), negatives()] {
        let xml = serialize_corpus(&c);
        let back = parse_corpus(xml.as_bytes()).map_err(|e| e.to_string())?;
        ensure(back == c, || "parse . serialize is not the identity".into())?;
        let reference = c.reference.unwrap();
        let norm = |c: &Corpus| {
            let mut out = c.clone();
            for p in &mut out.pairs {
                *p = normalize_pair(p, &r.ne_lexicon, &r.adverbials, &reference).pair;
            }
            out
        };
        let once = norm(&c);
        let twice = norm(&parse_corpus(serialize_corpus(&once).as_bytes()).map_err(|e| e.to_string())?);
        ensure(serialize_corpus(&once) == serialize_corpus(&twice), || {
            "normalized form not byte stable".into()
        })?;
    }
    within(start, Elapsed::from_secs(1)).map(|t| format!("both fixtures in {t}"))
}

static LOG: Mutex<Vec<RuleId>> = Mutex::new(Vec::new());

/// Wraps a rule and records every evaluation.
struct Spy<R>(R);

impl<R: Rule> Rule for Spy<R> {
    fn id(&self) -> RuleId {
        self.0.id()
    }

    fn evaluate(&self, ctx: &PairContext<'_>) -> RuleOutcome {
        LOG.lock().unwrap().push(self.0.id());
        self.0.evaluate(ctx)
    }
}

fn dispatch() -> Check {
    let book = RuleBook::new(vec![
        Box::new(Spy(R1)),
        Box::new(Spy(R2)),
        Box::new(Spy(R3)),
        Box::new(Spy(R4)),
        Box::new(Spy(R5)),
        Box::new(Spy(R6)),
    ]);
    let e = Engine::new(Resources::embedded(), EngineConfig::default());
    let reference = CalendarDate::ymd(2008, 1, 1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0xD15);
    let verdicts = [LexicalVerdict::Equivalent, LexicalVerdict::Contrary, LexicalVerdict::Unrelated];
    let mut evaluated = 0;
    let mut contexts = 0;
    while contexts < 1000 {
        let p = random_pair(&mut rng);
        let Ok(a) = e.analyze(&p, &reference) else { continue };
        contexts += 1;
        let lexical = *verdicts.choose(&mut rng).unwrap();
        let ctx = PairContext {
            analysis: &a,
            e1: "e1",
            e2: "e2",
            lexical,
            config: e.config(),
        };
        LOG.lock().unwrap().clear();
        let out = book.run(&ctx);
        let ran: BTreeSet<RuleId> = LOG.lock().unwrap().iter().copied().collect();
        evaluated += ran.len();
        let group1: BTreeSet<RuleId> = RuleId::ALL.iter().copied().filter(|r| *r != RuleId::R6).collect();
        match lexical {
            LexicalVerdict::Contrary => ensure(ran.is_disjoint(&group1), || format!("contrary ran {ran:?}"))?,
            LexicalVerdict::Equivalent => ensure(!ran.contains(&RuleId::R6), || "equivalent ran R6".into())?,
            LexicalVerdict::Unrelated => ensure(ran.is_empty(), || format!("unrelated ran {ran:?}"))?,
        }
        let applicable: Vec<bool> = out.iter().filter_map(|o| o.verdict).collect();
        let entailed = decide(&out).0 == Decision::Entailed;
        ensure(entailed == (!applicable.is_empty() && applicable.iter().all(|&v| v)), || {
            format!("decide disagrees on {out:?}")
        })?;
    }
    Ok(format!("{contexts} contexts, {evaluated} rule evaluations"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("composition matches interval enumeration", composition_oracle),
        ("closure is sound and idempotent", closure_soundness),
        ("inverse is an involution with the standard pairings", inversion),
        ("golden pairs reproduce their verdicts", golden_verdicts),
        ("each rule decides its pair and its negative variant", per_rule),
        ("accuracy and kappa formulas", metrics),
        ("calendar arithmetic and tolerance", calendar),
        ("adverbial table and day parts", adverbials),
        ("corpus round trip", round_trip),
        ("supervisor dispatch under random contexts", dispatch),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {:>2}: PASS  {name} ({detail})", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2}: FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
