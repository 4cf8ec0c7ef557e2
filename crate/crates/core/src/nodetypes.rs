//! The sixteen node types and the sign logic of their interactions.
//!
//! A node's type is the pair (incoming class, outgoing class), each class
//! being one of none / all positive / all negative / mixed. Only observed
//! signs take part; hidden edges are the business of [`crate::bayes`].

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::graph::{DegreeTally, SignedDigraph};

/// Guard against zero denominators in the property ratios.
pub const EPSILON: f64 = 1e-10;

pub const NUM_TYPES: usize = 16;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EdgeClass {
    None,
    AllPositive,
    AllNegative,
    Mixed,
}

impl EdgeClass {
    pub const ALL: [EdgeClass; 4] = [
        EdgeClass::None,
        EdgeClass::AllPositive,
        EdgeClass::AllNegative,
        EdgeClass::Mixed,
    ];

    pub fn from_counts(pos: u32, neg: u32) -> EdgeClass {
        match (pos > 0, neg > 0) {
            (false, false) => EdgeClass::None,
            (true, false) => EdgeClass::AllPositive,
            (false, true) => EdgeClass::AllNegative,
            (true, true) => EdgeClass::Mixed,
        }
    }

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }
}

/// Node type label 1..=16.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NodeTypeId(u8);

use EdgeClass::{AllNegative as Neg, AllPositive as Pos, Mixed as Mix, None as Non};

/// (incoming, outgoing) class pair for N1..N16.
const TYPE_CLASSES: [(EdgeClass, EdgeClass); NUM_TYPES] = [
    (Non, Pos),
    (Non, Neg),
    (Non, Mix),
    (Pos, Non),
    (Neg, Non),
    (Mix, Non),
    (Neg, Neg),
    (Pos, Pos),
    (Pos, Neg),
    (Neg, Pos),
    (Mix, Neg),
    (Mix, Pos),
    (Pos, Mix),
    (Neg, Mix),
    (Mix, Mix),
    (Non, Non),
];

/// Inverse of `TYPE_CLASSES`, indexed `[in][out]`, holding 1-based labels.
const CLASS_TYPES: [[u8; 4]; 4] = {
    let mut table = [[0u8; 4]; 4];
    let mut i = 0;
    while i < NUM_TYPES {
        let (a, b) = TYPE_CLASSES[i];
        table[a as usize][b as usize] = (i + 1) as u8;
        i += 1;
    }
    table
};

impl NodeTypeId {
    pub fn new(label: u8) -> Option<NodeTypeId> {
        (1..=NUM_TYPES as u8).contains(&label).then_some(NodeTypeId(label))
    }

    pub fn from_classes(incoming: EdgeClass, outgoing: EdgeClass) -> NodeTypeId {
        NodeTypeId(CLASS_TYPES[incoming.index()][outgoing.index()])
    }

    pub fn all() -> impl Iterator<Item = NodeTypeId> {
        (1..=NUM_TYPES as u8).map(NodeTypeId)
    }

    /// 1..=16
    pub fn label(self) -> u8 {
        self.0
    }

    /// 0..16, position in type vectors.
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize - 1
    }

    pub fn incoming(self) -> EdgeClass {
        TYPE_CLASSES[self.index()].0
    }

    pub fn outgoing(self) -> EdgeClass {
        TYPE_CLASSES[self.index()].1
    }
}

impl fmt::Display for NodeTypeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "N{}", self.0)
    }
}

/// Type from observed signs only. `include_hidden` is accepted for
/// diagnostics but hidden edges never decide a class.
pub fn classify_node(tally: &DegreeTally, include_hidden: bool) -> NodeTypeId {
    let _ = include_hidden;
    NodeTypeId::from_classes(
        EdgeClass::from_counts(tally.in_pos, tally.in_neg),
        EdgeClass::from_counts(tally.out_pos, tally.out_neg),
    )
}

/// Ratios of positive / negative edges on each side of a node.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeProperties {
    pub p_in_pos: f64,
    pub p_in_neg: f64,
    pub p_out_pos: f64,
    pub p_out_neg: f64,
}

impl NodeProperties {
    pub fn to_array(self) -> [f64; 4] {
        [self.p_in_pos, self.p_in_neg, self.p_out_pos, self.p_out_neg]
    }
}

/// Fully observed node properties; hidden counts are ignored.
pub fn node_properties(tally: &DegreeTally) -> NodeProperties {
    let (ip, in_, op, on) = (
        tally.in_pos as f64,
        tally.in_neg as f64,
        tally.out_pos as f64,
        tally.out_neg as f64,
    );
    let din = ip + in_ + EPSILON;
    let dout = op + on + EPSILON;
    NodeProperties {
        p_in_pos: ip / din,
        p_in_neg: in_ / din,
        p_out_pos: op / dout,
        p_out_neg: on / dout,
    }
}

pub fn type_onehot(t: NodeTypeId) -> [f64; NUM_TYPES] {
    let mut v = [0.0; NUM_TYPES];
    v[t.index()] = 1.0;
    v
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SignConstraint {
    MustPositive,
    MustNegative,
    Undetermined,
    /// The two types cannot be joined by an edge in this direction.
    Forbidden,
}

/// What the source's outgoing class and the target's incoming class say
/// about the sign of an edge between them.
pub fn interaction_sign(source: NodeTypeId, target: NodeTypeId) -> SignConstraint {
    use SignConstraint::*;
    match (source.outgoing(), target.incoming()) {
        (Non, _) | (_, Non) => Forbidden,
        (Pos, Neg) | (Neg, Pos) => Forbidden,
        (Pos, _) | (_, Pos) => MustPositive,
        (Neg, _) | (_, Neg) => MustNegative,
        (Mix, Mix) => Undetermined,
    }
}

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Census {
    pub must_positive: usize,
    pub must_negative: usize,
    pub undetermined: usize,
    /// Edges whose endpoint types contradict each other. Zero on any
    /// fully observed graph.
    pub forbidden: usize,
}

impl Census {
    pub fn determined(&self) -> usize {
        self.must_positive + self.must_negative
    }
}

/// Classify every edge by the interaction of its endpoint types, with types
/// computed from the graph's observed signs.
pub fn census_determined(g: &SignedDigraph) -> Census {
    let types: Vec<NodeTypeId> = g.tallies().iter().map(|t| classify_node(t, false)).collect();
    let mut c = Census::default();
    for e in g.edges() {
        match interaction_sign(types[e.source as usize], types[e.target as usize]) {
            SignConstraint::MustPositive => c.must_positive += 1,
            SignConstraint::MustNegative => c.must_negative += 1,
            SignConstraint::Undetermined => c.undetermined += 1,
            SignConstraint::Forbidden => c.forbidden += 1,
        }
    }
    c
}

/// Fraction of nodes of each type, indexed by `NodeTypeId::index`.
pub fn type_fractions(g: &SignedDigraph) -> [f64; NUM_TYPES] {
    let mut counts = [0usize; NUM_TYPES];
    for t in g.tallies() {
        counts[classify_node(&t, false).index()] += 1;
    }
    let n = g.node_count().max(1) as f64;
    counts.map(|c| c as f64 / n)
}
