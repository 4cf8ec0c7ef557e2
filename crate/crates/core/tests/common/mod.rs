//! Brute-force reference implementations used by property and acceptance
//! tests. Nothing here calls the code paths it is checking.
#![allow(dead_code)]

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use signtypes::bayes::SignPrior;
use signtypes::graph::{EdgeId, NodeId, Sign, SignedDigraph};
use signtypes::model::LogisticObjective;

/// (incoming, outgoing) class of each type label 1..=16, classes encoded
/// as 0 none, 1 all-positive, 2 all-negative, 3 mixed.
pub const TYPE_TABLE: [(u8, u8); 16] = [
    (0, 1),
    (0, 2),
    (0, 3),
    (1, 0),
    (2, 0),
    (3, 0),
    (2, 2),
    (1, 1),
    (1, 2),
    (2, 1),
    (3, 2),
    (3, 1),
    (1, 3),
    (2, 3),
    (3, 3),
    (0, 0),
];

pub fn class_of(pos: u32, neg: u32) -> u8 {
    match (pos > 0, neg > 0) {
        (false, false) => 0,
        (true, false) => 1,
        (false, true) => 2,
        (true, true) => 3,
    }
}

/// Zero-based type index for a pair of classes.
pub fn type_index(incoming: u8, outgoing: u8) -> usize {
    TYPE_TABLE
        .iter()
        .position(|&p| p == (incoming, outgoing))
        .expect("every class pair has a type")
}

/// Random graph with up to `m` distinct edges; each edge is hidden with
/// probability `hidden`, otherwise positive with probability `p_pos`.
pub fn random_graph(n: usize, m: usize, p_pos: f64, hidden: f64, seed: u64) -> SignedDigraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = n.max(2);
    let m = m.min(n * (n - 1));
    let mut seen = HashSet::new();
    let mut edges = Vec::new();
    let mut attempts = 0;
    while edges.len() < m && attempts < 20 * m + 100 {
        attempts += 1;
        let (x, y) = (rng.random_range(0..n), rng.random_range(0..n));
        if x == y || !seen.insert((x, y)) {
            continue;
        }
        let sign = if rng.random::<f64>() < hidden {
            Sign::Hidden
        } else if rng.random::<f64>() < p_pos {
            Sign::Positive
        } else {
            Sign::Negative
        };
        edges.push((x as NodeId, y as NodeId, sign));
    }
    SignedDigraph::from_edges(n, edges).unwrap()
}

/// Signed degree counts by scanning the edge list.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub struct Counts {
    pub in_pos: u32,
    pub in_neg: u32,
    pub in_hidden: u32,
    pub out_pos: u32,
    pub out_neg: u32,
    pub out_hidden: u32,
}

pub fn counts(g: &SignedDigraph, v: NodeId) -> Counts {
    let mut c = Counts::default();
    for e in g.edges() {
        if e.source == v {
            match e.sign {
                Sign::Positive => c.out_pos += 1,
                Sign::Negative => c.out_neg += 1,
                Sign::Hidden => c.out_hidden += 1,
            }
        }
        if e.target == v {
            match e.sign {
                Sign::Positive => c.in_pos += 1,
                Sign::Negative => c.in_neg += 1,
                Sign::Hidden => c.in_hidden += 1,
            }
        }
    }
    c
}

/// Class distribution of one side by enumerating all 2^k sign draws.
pub fn enumerate_class_distribution(pos: u32, neg: u32, k: u32, q: SignPrior) -> [f64; 4] {
    let mut p = [0.0; 4];
    for mask in 0u64..(1u64 << k) {
        let npos = mask.count_ones();
        let prob = q.p_pos.powi(npos as i32) * q.p_neg.powi((k - npos) as i32);
        p[class_of(pos + npos, neg + (k - npos)) as usize] += prob;
    }
    p
}

/// Type distribution of a node by enumerating every joint draw of its
/// hidden incoming and outgoing signs.
pub fn enumerate_type_distribution(c: &Counts, q_in: SignPrior, q_out: SignPrior) -> [f64; 16] {
    let (u, v) = (c.in_hidden, c.out_hidden);
    let mut p = [0.0; 16];
    for a in 0u64..(1u64 << u) {
        let ap = a.count_ones();
        let pa = q_in.p_pos.powi(ap as i32) * q_in.p_neg.powi((u - ap) as i32);
        let cin = class_of(c.in_pos + ap, c.in_neg + (u - ap));
        for b in 0u64..(1u64 << v) {
            let bp = b.count_ones();
            let pb = q_out.p_pos.powi(bp as i32) * q_out.p_neg.powi((v - bp) as i32);
            let cout = class_of(c.out_pos + bp, c.out_neg + (v - bp));
            p[type_index(cin, cout)] += pa * pb;
        }
    }
    p
}

/// Leg index: forward+ 0, forward- 1, backward+ 2, backward- 3.
fn leg(forward: bool, sign: Sign) -> Option<usize> {
    match (forward, sign) {
        (true, Sign::Positive) => Some(0),
        (true, Sign::Negative) => Some(1),
        (false, Sign::Positive) => Some(2),
        (false, Sign::Negative) => Some(3),
        _ => None,
    }
}

/// Triad counts by looping over every third node and every pair of edges.
pub fn enumerate_triads(g: &SignedDigraph, x: NodeId, y: NodeId) -> [f64; 16] {
    let edges: Vec<_> = g.edges().collect();
    let mut out = [0.0; 16];
    for z in 0..g.node_count() as NodeId {
        if z == x || z == y {
            continue;
        }
        for e1 in &edges {
            let first = if e1.source == x && e1.target == z {
                leg(true, e1.sign)
            } else if e1.source == z && e1.target == x {
                leg(false, e1.sign)
            } else {
                None
            };
            let Some(a) = first else { continue };
            for e2 in &edges {
                let second = if e2.source == z && e2.target == y {
                    leg(true, e2.sign)
                } else if e2.source == y && e2.target == z {
                    leg(false, e2.sign)
                } else {
                    None
                };
                if let Some(b) = second {
                    out[4 * a + b] += 1.0;
                }
            }
        }
    }
    out
}

/// Nodes adjacent (in either direction, any sign) to both endpoints.
pub fn enumerate_embeddedness(g: &SignedDigraph, x: NodeId, y: NodeId) -> usize {
    let adjacent = |a: NodeId, z: NodeId| g.edges().any(|e| (e.source == a && e.target == z) || (e.source == z && e.target == a));
    (0..g.node_count() as NodeId)
        .filter(|&z| z != x && z != y && adjacent(x, z) && adjacent(y, z))
        .count()
}

/// Expected type features of a hidden edge: average the features of the
/// two graphs in which the edge is revealed, weighted by the prior.
pub fn revealed_mixture<F>(g: &SignedDigraph, e: EdgeId, prior: SignPrior, features: F) -> Vec<f64>
where
    F: Fn(&SignedDigraph) -> Vec<f64>,
{
    let fp = features(&g.with_edge_sign(e, Sign::Positive));
    let fn_ = features(&g.with_edge_sign(e, Sign::Negative));
    fp.iter()
        .zip(&fn_)
        .map(|(a, b)| prior.p_pos * a + prior.p_neg * b)
        .collect()
}

/// Central finite-difference gradient.
pub fn finite_difference_gradient(obj: &LogisticObjective<'_>, params: &[f64], h: f64) -> Vec<f64> {
    (0..params.len())
        .map(|j| {
            let mut up = params.to_vec();
            let mut down = params.to_vec();
            up[j] += h;
            down[j] -= h;
            (obj.value(&up) - obj.value(&down)) / (2.0 * h)
        })
        .collect()
}
