#![allow(dead_code)]

use rand::prelude::*;

use timinf::annotation::{parse_corpus, AnnotatedPair, Corpus};
use timinf::resources::{GOLDEN_CORPUS, NEGATIVE_CORPUS};

pub fn golden() -> Corpus {
    parse_corpus(GOLDEN_CORPUS.as_bytes()).expect("golden corpus parses")
}

pub fn negatives() -> Corpus {
    parse_corpus(NEGATIVE_CORPUS.as_bytes()).expect("negative corpus parses")
}

pub fn pair(corpus: &Corpus, id: u32) -> &AnnotatedPair {
    corpus.pairs.iter().find(|p| p.id == id).unwrap_or_else(|| panic!("no pair {id}"))
}

/// Golden pairs whose mechanism is outside the engine.
pub const OUT_OF_SCOPE: [u32; 2] = [22, 26];

/// The 30-pair desk corpus: in-scope golden pairs plus every negative.
pub fn desk_corpus() -> Corpus {
    let mut c = golden();
    c.pairs.retain(|p| !OUT_OF_SCOPE.contains(&p.id));
    c.pairs.extend(negatives().pairs);
    c
}

const RELS: &[&str] = &[
    "BEFORE", "AFTER", "IBEFORE", "IAFTER", "INCLUDES", "IS_INCLUDED", "DURING", "DURING_INV",
    "SIMULTANEOUS", "BEGINS", "BEGUN_BY", "ENDS", "ENDED_BY",
];

const VALUES: &[(&str, &[&str])] = &[
    ("DATE", &["1948", "1950", "1803", "2006-07", "2006-07-12", "1804-12-02", "W2", ""]),
    ("TIME", &["T14:00", "T11:59", "AFTERNOON", "aMORNING"]),
    ("DURATION", &["5y", "7y", "1y", "10d", "PMD", "PSD", "1940/1950"]),
];

fn timexes(rng: &mut impl Rng, first: usize, n: usize) -> (String, Vec<String>) {
    let mut text = String::new();
    let mut tids = Vec::new();
    for i in first..first + n {
        let (ty, vals) = VALUES.choose(rng).unwrap();
        let v = vals.choose(rng).unwrap();
        text.push_str(&format!(r#" <TIMEX3 tid="t{i}" TYPE="{ty}" VAL="{v}">x</TIMEX3>"#));
        tids.push(format!("t{i}"));
    }
    (text, tids)
}

/// A small random pair: events e1 (and maybe e3) in T, e2 in H, a few
/// timexes per side and random links between them.
pub fn random_pair_xml(rng: &mut impl Rng) -> String {
    let nt = rng.gen_range(1..=3);
    let nh = rng.gen_range(1..=2);
    let (tt, ttids) = timexes(rng, 1, nt);
    let (ht, htids) = timexes(rng, 1 + nt, nh);
    let extra = rng.gen_bool(0.4);
    let mut links = String::new();
    let mut lid = 0;
    let mut link = |links: &mut String, from: &str, to: &str, rng: &mut dyn RngCore| {
        lid += 1;
        let rel = RELS.choose(rng).unwrap();
        let to_attr = if to.starts_with('t') { "relatedToTime" } else { "relatedToEventInstance" };
        links.push_str(&format!(
            r#"<TLINK lid="l{lid}" eventInstanceID="{from}" {to_attr}="{to}" relType="{rel}"/>"#
        ));
    };
    let mut events = vec![("ei1", &ttids), ("ei2", &htids)];
    if extra {
        events.push(("ei3", &ttids));
    }
    for (ei, tids) in &events {
        for _ in 0..rng.gen_range(0..=3) {
            let t = tids.choose(rng).unwrap();
            link(&mut links, ei, t, rng);
        }
    }
    if rng.gen_bool(0.3) {
        link(&mut links, "ei1", "ei2", rng);
    }
    if extra && rng.gen_bool(0.5) {
        link(&mut links, "ei3", "ei1", rng);
    }
    let e3 = if extra { r#" <EVENT eid="e3" class="OCCURRENCE">c</EVENT>"# } else { "" };
    let mk3 = if extra { r#"<MAKEINSTANCE eventID="e3" eiid="ei3"/>"# } else { "" };
    format!(
        r#"<corpus reference="2008-01-01"><pair id="1" value="TRUE">
<t><SUBJ>s</SUBJ> <EVENT eid="e1" class="OCCURRENCE">a</EVENT>{e3}{tt}</t>
<h><SUBJ>s</SUBJ> <EVENT eid="e2" class="OCCURRENCE">b</EVENT>{ht}</h>
<MAKEINSTANCE eventID="e1" eiid="ei1"/><MAKEINSTANCE eventID="e2" eiid="ei2"/>{mk3}
{links}
</pair></corpus>"#
    )
}

pub fn random_pair(rng: &mut impl Rng) -> AnnotatedPair {
    let xml = random_pair_xml(rng);
    let mut c = parse_corpus(xml.as_bytes()).unwrap_or_else(|e| panic!("{e}\n{xml}"));
    c.pairs.remove(0)
}
