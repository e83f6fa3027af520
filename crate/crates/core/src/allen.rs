//! Allen's interval algebra: the thirteen basic relations, relation sets,
//! composition and path-consistency closure over a labelled network.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AllenRelation {
    Before,
    After,
    Meets,
    MetBy,
    Overlaps,
    OverlappedBy,
    During,
    Contains,
    Starts,
    StartedBy,
    Finishes,
    FinishedBy,
    Equals,
}

use AllenRelation::{
    After as A, Before as B, Contains as DI, During as D, Equals as E, FinishedBy as FI,
    Finishes as F, Meets as M, MetBy as MI, OverlappedBy as OI, Overlaps as O, StartedBy as SI,
    Starts as S,
};

impl AllenRelation {
    pub const ALL: [AllenRelation; 13] = [B, A, M, MI, O, OI, D, DI, S, SI, F, FI, E];

    pub const fn index(self) -> usize {
        self as usize
    }

    pub const fn inverse(self) -> AllenRelation {
        match self {
            B => A,
            A => B,
            M => MI,
            MI => M,
            O => OI,
            OI => O,
            D => DI,
            DI => D,
            S => SI,
            SI => S,
            F => FI,
            FI => F,
            E => E,
        }
    }

    pub const fn symbol(self) -> &'static str {
        match self {
            B => "<",
            A => ">",
            M => "m",
            MI => "mi",
            O => "o",
            OI => "oi",
            D => "d",
            DI => "di",
            S => "s",
            SI => "si",
            F => "f",
            FI => "fi",
            E => "=",
        }
    }

    pub const fn name(self) -> &'static str {
        match self {
            B => "before",
            A => "after",
            M => "meets",
            MI => "met_by",
            O => "overlaps",
            OI => "overlapped_by",
            D => "during",
            DI => "contains",
            S => "starts",
            SI => "started_by",
            F => "finishes",
            FI => "finished_by",
            E => "equals",
        }
    }
}

impl fmt::Display for AllenRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown Allen relation `{0}`")]
pub struct UnknownRelation(pub String);

impl FromStr for AllenRelation {
    type Err = UnknownRelation;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let norm = t.to_ascii_lowercase().replace('-', "_");
        AllenRelation::ALL
            .into_iter()
            .find(|r| r.symbol() == t || r.name() == norm)
            .or(match norm.as_str() {
                "includes" | "di" => Some(DI),
                "met_by" | "mi" => Some(MI),
                "b" => Some(B),
                "a" | "bi" => Some(A),
                "=" | "e" | "eq" | "equal" => Some(E),
                _ => None,
            })
            .ok_or_else(|| UnknownRelation(s.to_string()))
    }
}

/// A disjunction of basic relations. Empty means inconsistent, full means
/// nothing is known.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct RelationSet(u16);

const FULL_BITS: u16 = (1 << 13) - 1;

const fn set(rels: &[AllenRelation]) -> RelationSet {
    let mut bits = 0u16;
    let mut i = 0;
    while i < rels.len() {
        bits |= 1 << rels[i] as u16;
        i += 1;
    }
    RelationSet(bits)
}

impl RelationSet {
    pub const EMPTY: RelationSet = RelationSet(0);
    pub const FULL: RelationSet = RelationSet(FULL_BITS);

    pub const fn of(rels: &[AllenRelation]) -> RelationSet {
        set(rels)
    }

    pub const fn single(r: AllenRelation) -> RelationSet {
        RelationSet(1 << r as u16)
    }

    pub fn from_bits(bits: u16) -> RelationSet {
        RelationSet(bits & FULL_BITS)
    }

    pub const fn bits(self) -> u16 {
        self.0
    }

    pub const fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub const fn is_full(self) -> bool {
        self.0 == FULL_BITS
    }

    pub const fn len(self) -> u32 {
        self.0.count_ones()
    }

    pub const fn contains(self, r: AllenRelation) -> bool {
        self.0 & (1 << r as u16) != 0
    }

    pub fn insert(&mut self, r: AllenRelation) {
        self.0 |= 1 << r as u16;
    }

    pub const fn union(self, other: RelationSet) -> RelationSet {
        RelationSet(self.0 | other.0)
    }

    pub const fn intersection(self, other: RelationSet) -> RelationSet {
        RelationSet(self.0 & other.0)
    }

    pub const fn is_subset(self, other: RelationSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = AllenRelation> {
        AllenRelation::ALL.into_iter().filter(move |r| self.contains(*r))
    }

    pub fn inverse(self) -> RelationSet {
        self.iter().map(AllenRelation::inverse).collect()
    }

    /// The only member, if there is exactly one.
    pub fn as_single(self) -> Option<AllenRelation> {
        if self.len() == 1 {
            self.iter().next()
        } else {
            None
        }
    }
}

impl FromIterator<AllenRelation> for RelationSet {
    fn from_iter<I: IntoIterator<Item = AllenRelation>>(iter: I) -> Self {
        let mut s = RelationSet::EMPTY;
        for r in iter {
            s.insert(r);
        }
        s
    }
}

impl From<AllenRelation> for RelationSet {
    fn from(r: AllenRelation) -> Self {
        RelationSet::single(r)
    }
}

impl fmt::Debug for RelationSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for RelationSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, r) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str(r.name())?;
        }
        f.write_str("}")
    }
}

impl FromStr for RelationSet {
    type Err = UnknownRelation;

    /// Accepts `{a, b}`, `a,b`, `a|b`, or `*` for the full set.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let inner = s.trim().trim_start_matches('{').trim_end_matches('}').trim();
        if inner == "*" || inner.eq_ignore_ascii_case("full") {
            return Ok(RelationSet::FULL);
        }
        inner
            .split([',', '|'])
            .map(str::trim)
            .filter(|p| !p.is_empty())
            .map(AllenRelation::from_str)
            .collect()
    }
}

/// Composition of basic relations: `COMPOSITION[r1][r2]` holds every `r`
/// such that `x r1 y` and `y r2 z` admit `x r z`.
#[rustfmt::skip]
pub const COMPOSITION: [[RelationSet; 13]; 13] = [
    [
        set(&[B]),
        set(&[B, A, M, MI, O, OI, D, DI, S, SI, F, FI, E]),
        set(&[B]),
        set(&[B, M, O, D, S]),
        set(&[B]),
        set(&[B, M, O, D, S]),
        set(&[B, M, O, D, S]),
        set(&[B]),
        set(&[B]),
        set(&[B]),
        set(&[B, M, O, D, S]),
        set(&[B]),
        set(&[B]),
    ],
    [
        set(&[B, A, M, MI, O, OI, D, DI, S, SI, F, FI, E]),
        set(&[A]),
        set(&[A, MI, OI, D, F]),
        set(&[A]),
        set(&[A, MI, OI, D, F]),
        set(&[A]),
        set(&[A, MI, OI, D, F]),
        set(&[A]),
        set(&[A, MI, OI, D, F]),
        set(&[A]),
        set(&[A]),
        set(&[A]),
        set(&[A]),
    ],
    [
        set(&[B]),
        set(&[A, MI, OI, DI, SI]),
        set(&[B]),
        set(&[F, FI, E]),
        set(&[B]),
        set(&[O, D, S]),
        set(&[O, D, S]),
        set(&[B]),
        set(&[M]),
        set(&[M]),
        set(&[O, D, S]),
        set(&[B]),
        set(&[M]),
    ],
    [
        set(&[B, M, O, DI, FI]),
        set(&[A]),
        set(&[S, SI, E]),
        set(&[A]),
        set(&[OI, D, F]),
        set(&[A]),
        set(&[OI, D, F]),
        set(&[A]),
        set(&[OI, D, F]),
        set(&[A]),
        set(&[MI]),
        set(&[MI]),
        set(&[MI]),
    ],
    [
        set(&[B]),
        set(&[A, MI, OI, DI, SI]),
        set(&[B]),
        set(&[OI, DI, SI]),
        set(&[B, M, O]),
        set(&[O, OI, D, DI, S, SI, F, FI, E]),
        set(&[O, D, S]),
        set(&[B, M, O, DI, FI]),
        set(&[O]),
        set(&[O, DI, FI]),
        set(&[O, D, S]),
        set(&[B, M, O]),
        set(&[O]),
    ],
    [
        set(&[B, M, O, DI, FI]),
        set(&[A]),
        set(&[O, DI, FI]),
        set(&[A]),
        set(&[O, OI, D, DI, S, SI, F, FI, E]),
        set(&[A, MI, OI]),
        set(&[OI, D, F]),
        set(&[A, MI, OI, DI, SI]),
        set(&[OI, D, F]),
        set(&[A, MI, OI]),
        set(&[OI]),
        set(&[OI, DI, SI]),
        set(&[OI]),
    ],
    [
        set(&[B]),
        set(&[A]),
        set(&[B]),
        set(&[A]),
        set(&[B, M, O, D, S]),
        set(&[A, MI, OI, D, F]),
        set(&[D]),
        set(&[B, A, M, MI, O, OI, D, DI, S, SI, F, FI, E]),
        set(&[D]),
        set(&[A, MI, OI, D, F]),
        set(&[D]),
        set(&[B, M, O, D, S]),
        set(&[D]),
    ],
    [
        set(&[B, M, O, DI, FI]),
        set(&[A, MI, OI, DI, SI]),
        set(&[O, DI, FI]),
        set(&[OI, DI, SI]),
        set(&[O, DI, FI]),
        set(&[OI, DI, SI]),
        set(&[O, OI, D, DI, S, SI, F, FI, E]),
        set(&[DI]),
        set(&[O, DI, FI]),
        set(&[DI]),
        set(&[OI, DI, SI]),
        set(&[DI]),
        set(&[DI]),
    ],
    [
        set(&[B]),
        set(&[A]),
        set(&[B]),
        set(&[MI]),
        set(&[B, M, O]),
        set(&[OI, D, F]),
        set(&[D]),
        set(&[B, M, O, DI, FI]),
        set(&[S]),
        set(&[S, SI, E]),
        set(&[D]),
        set(&[B, M, O]),
        set(&[S]),
    ],
    [
        set(&[B, M, O, DI, FI]),
        set(&[A]),
        set(&[O, DI, FI]),
        set(&[MI]),
        set(&[O, DI, FI]),
        set(&[OI]),
        set(&[OI, D, F]),
        set(&[DI]),
        set(&[S, SI, E]),
        set(&[SI]),
        set(&[OI]),
        set(&[DI]),
        set(&[SI]),
    ],
    [
        set(&[B]),
        set(&[A]),
        set(&[M]),
        set(&[A]),
        set(&[O, D, S]),
        set(&[A, MI, OI]),
        set(&[D]),
        set(&[A, MI, OI, DI, SI]),
        set(&[D]),
        set(&[A, MI, OI]),
        set(&[F]),
        set(&[F, FI, E]),
        set(&[F]),
    ],
    [
        set(&[B]),
        set(&[A, MI, OI, DI, SI]),
        set(&[M]),
        set(&[OI, DI, SI]),
        set(&[O]),
        set(&[OI, DI, SI]),
        set(&[O, D, S]),
        set(&[DI]),
        set(&[O]),
        set(&[DI]),
        set(&[F, FI, E]),
        set(&[FI]),
        set(&[FI]),
    ],
    [
        set(&[B]),
        set(&[A]),
        set(&[M]),
        set(&[MI]),
        set(&[O]),
        set(&[OI]),
        set(&[D]),
        set(&[DI]),
        set(&[S]),
        set(&[SI]),
        set(&[F]),
        set(&[FI]),
        set(&[E]),
    ],
];

pub fn compose(r1: AllenRelation, r2: AllenRelation) -> RelationSet {
    COMPOSITION[r1.index()][r2.index()]
}

pub fn compose_sets(s1: RelationSet, s2: RelationSet) -> RelationSet {
    let mut out = RelationSet::EMPTY;
    for a in s1.iter() {
        for b in s2.iter() {
            out = out.union(compose(a, b));
            if out.is_full() {
                return out;
            }
        }
    }
    out
}

pub fn invert(r: AllenRelation) -> AllenRelation {
    r.inverse()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("interval end must be strictly after its start")]
pub struct DegenerateInterval;

/// An interval with totally ordered endpoints, `start < end`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ConcreteInterval<T> {
    start: T,
    end: T,
}

impl<T: Ord + Copy> ConcreteInterval<T> {
    pub fn new(start: T, end: T) -> Result<Self, DegenerateInterval> {
        if start < end {
            Ok(ConcreteInterval { start, end })
        } else {
            Err(DegenerateInterval)
        }
    }

    pub fn start(&self) -> T {
        self.start
    }

    pub fn end(&self) -> T {
        self.end
    }

    /// The unique basic relation holding between `self` and `other`.
    pub fn relate(&self, other: &Self) -> AllenRelation {
        use std::cmp::Ordering::*;
        let (s1, e1, s2, e2) = (self.start, self.end, other.start, other.end);
        if e1 < s2 {
            return B;
        }
        if e2 < s1 {
            return A;
        }
        if e1 == s2 {
            return M;
        }
        if e2 == s1 {
            return MI;
        }
        match (s1.cmp(&s2), e1.cmp(&e2)) {
            (Equal, Equal) => E,
            (Equal, Less) => S,
            (Equal, Greater) => SI,
            (Greater, Equal) => F,
            (Less, Equal) => FI,
            (Greater, Less) => D,
            (Less, Greater) => DI,
            (Less, Less) => O,
            (Greater, Greater) => OI,
        }
    }
}

/// Relates two endpoint pairs, rejecting degenerate intervals.
pub fn relate_concrete<T: Ord + Copy>(
    a: (T, T),
    b: (T, T),
) -> Result<AllenRelation, DegenerateInterval> {
    let a = ConcreteInterval::new(a.0, a.1)?;
    let b = ConcreteInterval::new(b.0, b.1)?;
    Ok(a.relate(&b))
}

pub type NodeId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("inconsistent network: no relation can hold between `{from}` and `{to}`")]
pub struct Inconsistent {
    pub from: String,
    pub to: String,
}

/// A qualitative constraint network over named intervals. Every ordered
/// pair carries a relation set; unconstrained pairs hold the full set.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TemporalNetwork {
    names: Vec<String>,
    index: BTreeMap<String, NodeId>,
    edges: Vec<RelationSet>,
}

impl TemporalNetwork {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// Returns the id of `name`, creating the node if needed.
    pub fn add_node(&mut self, name: &str) -> NodeId {
        if let Some(&id) = self.index.get(name) {
            return id;
        }
        let n = self.names.len();
        let mut edges = vec![RelationSet::FULL; (n + 1) * (n + 1)];
        for i in 0..n {
            for j in 0..n {
                edges[i * (n + 1) + j] = self.edges[i * n + j];
            }
        }
        edges[n * (n + 1) + n] = RelationSet::single(E);
        self.edges = edges;
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), n);
        n
    }

    pub fn node(&self, name: &str) -> Option<NodeId> {
        self.index.get(name).copied()
    }

    pub fn name(&self, id: NodeId) -> &str {
        &self.names[id]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn edge(&self, i: NodeId, j: NodeId) -> RelationSet {
        self.edges[i * self.len() + j]
    }

    pub fn edge_by_name(&self, a: &str, b: &str) -> Option<RelationSet> {
        Some(self.edge(self.node(a)?, self.node(b)?))
    }

    fn set_edge(&mut self, i: NodeId, j: NodeId, s: RelationSet) {
        let n = self.len();
        self.edges[i * n + j] = s;
        self.edges[j * n + i] = s.inverse();
    }

    /// Intersects the edge `i -> j` with `s` (and `j -> i` with its inverse).
    pub fn constrain(&mut self, i: NodeId, j: NodeId, s: RelationSet) -> Result<(), Inconsistent> {
        let s = if i == j { s.intersection(RelationSet::single(E)) } else { s };
        let next = self.edge(i, j).intersection(s);
        if next.is_empty() {
            return Err(self.inconsistent(i, j));
        }
        self.set_edge(i, j, next);
        Ok(())
    }

    pub fn constrain_names(&mut self, a: &str, b: &str, s: RelationSet) -> Result<(), Inconsistent> {
        let i = self.add_node(a);
        let j = self.add_node(b);
        self.constrain(i, j, s)
    }

    fn inconsistent(&self, i: NodeId, j: NodeId) -> Inconsistent {
        Inconsistent {
            from: self.names[i].clone(),
            to: self.names[j].clone(),
        }
    }

    /// Path-consistency closure. Each edge is tightened by the composition
    /// along every two-step path until nothing changes.
    pub fn closure(&self) -> Result<TemporalNetwork, Inconsistent> {
        let mut net = self.clone();
        let n = net.len();
        for i in 0..n {
            for j in 0..n {
                if net.edge(i, j).is_empty() {
                    return Err(net.inconsistent(i, j));
                }
            }
        }
        let mut queued = vec![false; n * n];
        let mut queue = VecDeque::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if !net.edge(i, j).is_full() {
                    queued[i * n + j] = true;
                    queue.push_back((i, j));
                }
            }
        }
        while let Some((i, j)) = queue.pop_front() {
            queued[i * n + j] = false;
            let rij = net.edge(i, j);
            for k in 0..n {
                if k == i || k == j {
                    continue;
                }
                // i -> k through j
                let cur = net.edge(i, k);
                let next = cur.intersection(compose_sets(rij, net.edge(j, k)));
                if next != cur {
                    if next.is_empty() {
                        return Err(net.inconsistent(i, k));
                    }
                    net.set_edge(i, k, next);
                    enqueue(&mut queue, &mut queued, n, i, k);
                }
                // k -> j through i
                let cur = net.edge(k, j);
                let next = cur.intersection(compose_sets(net.edge(k, i), rij));
                if next != cur {
                    if next.is_empty() {
                        return Err(net.inconsistent(k, j));
                    }
                    net.set_edge(k, j, next);
                    enqueue(&mut queue, &mut queued, n, k, j);
                }
            }
        }
        Ok(net)
    }

    /// Non-trivial edges `i < j`, as `(from, set, to)`.
    pub fn constraints(&self) -> Vec<(&str, RelationSet, &str)> {
        let mut out = Vec::new();
        for i in 0..self.len() {
            for j in (i + 1)..self.len() {
                let s = self.edge(i, j);
                if !s.is_full() {
                    out.push((self.name(i), s, self.name(j)));
                }
            }
        }
        out
    }
}

fn enqueue(queue: &mut VecDeque<(NodeId, NodeId)>, queued: &mut [bool], n: usize, a: NodeId, b: NodeId) {
    let (a, b) = if a < b { (a, b) } else { (b, a) };
    if !queued[a * n + b] {
        queued[a * n + b] = true;
        queue.push_back((a, b));
    }
}

pub fn closure(net: &TemporalNetwork) -> Result<TemporalNetwork, Inconsistent> {
    net.closure()
}
