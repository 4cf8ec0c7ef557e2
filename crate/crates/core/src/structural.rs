//! Local-structure features of an edge `x -> y`: directed signed triad
//! counts and the seven degree features.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{NodeId, Sign, SignedDigraph};

pub const NUM_CONTEXTS: usize = 16;
pub const NUM_DEGREE_FEATURES: usize = 7;

/// Configuration of one leg of a triad, seen along the path x - z - y.
/// `Forward` is x->z on the first leg and z->y on the second.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Leg {
    ForwardPos,
    ForwardNeg,
    BackwardPos,
    BackwardNeg,
}

impl Leg {
    pub const ALL: [Leg; 4] = [Leg::ForwardPos, Leg::ForwardNeg, Leg::BackwardPos, Leg::BackwardNeg];

    fn new(forward: bool, sign: Sign) -> Option<Leg> {
        match (forward, sign) {
            (true, Sign::Positive) => Some(Leg::ForwardPos),
            (true, Sign::Negative) => Some(Leg::ForwardNeg),
            (false, Sign::Positive) => Some(Leg::BackwardPos),
            (false, Sign::Negative) => Some(Leg::BackwardNeg),
            (_, Sign::Hidden) => None,
        }
    }

    fn flipped(self) -> Leg {
        match self {
            Leg::ForwardPos => Leg::BackwardPos,
            Leg::ForwardNeg => Leg::BackwardNeg,
            Leg::BackwardPos => Leg::ForwardPos,
            Leg::BackwardNeg => Leg::ForwardNeg,
        }
    }

    fn arrow(self) -> &'static str {
        match self {
            Leg::ForwardPos => "->+",
            Leg::ForwardNeg => "->-",
            Leg::BackwardPos => "<-+",
            Leg::BackwardNeg => "<--",
        }
    }
}

/// One of the sixteen `(x, y; z)` contexts. Index is `4 * xz + zy` with
/// each leg ordered `->+, ->-, <-+, <--`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TriadContext {
    pub xz: Leg,
    pub zy: Leg,
}

impl TriadContext {
    pub fn index(self) -> usize {
        4 * self.xz as usize + self.zy as usize
    }

    pub fn from_index(i: usize) -> TriadContext {
        TriadContext {
            xz: Leg::ALL[i / 4],
            zy: Leg::ALL[i % 4],
        }
    }

    /// The same triad seen from the edge `y -> x`.
    pub fn mirrored(self) -> TriadContext {
        TriadContext {
            xz: self.zy.flipped(),
            zy: self.xz.flipped(),
        }
    }

    /// e.g. `x->+z z<--y`
    pub fn describe(self) -> String {
        let zy = match self.zy {
            Leg::ForwardPos => "z->+y",
            Leg::ForwardNeg => "z->-y",
            Leg::BackwardPos => "z<-+y",
            Leg::BackwardNeg => "z<--y",
        };
        format!("x{}z {}", self.xz.arrow(), zy)
    }
}

/// Legs between `a` and `z`; `forward` means a->z.
#[inline]
fn legs_between(g: &SignedDigraph, a: NodeId, z: NodeId, a_first: bool) -> [Option<Leg>; 2] {
    let out = g.find_edge(a, z).and_then(|e| Leg::new(a_first, g.sign(e)));
    let back = g.find_edge(z, a).and_then(|e| Leg::new(!a_first, g.sign(e)));
    [out, back]
}

/// Triad context counts around `x -> y`. Every observed-sign x-z edge is
/// paired with every observed-sign z-y edge.
pub fn triad_features(g: &SignedDigraph, x: NodeId, y: NodeId) -> Result<[f64; NUM_CONTEXTS]> {
    if x == y {
        return Err(Error::SameEndpoints(x));
    }
    for v in [x, y] {
        if v as usize >= g.node_count() {
            return Err(Error::UnknownNode(v));
        }
    }
    Ok(triad_counts_unchecked(g, x, y))
}

pub(crate) fn triad_counts_unchecked(g: &SignedDigraph, x: NodeId, y: NodeId) -> [f64; NUM_CONTEXTS] {
    let mut counts = [0.0; NUM_CONTEXTS];
    g.for_each_common_neighbor(x, y, |z| {
        let xz = legs_between(g, x, z, true);
        // z->y is forward on the second leg
        let zy = {
            let fwd = g.find_edge(z, y).and_then(|e| Leg::new(true, g.sign(e)));
            let back = g.find_edge(y, z).and_then(|e| Leg::new(false, g.sign(e)));
            [fwd, back]
        };
        for a in xz.iter().flatten() {
            for b in zy.iter().flatten() {
                counts[TriadContext { xz: *a, zy: *b }.index()] += 1.0;
            }
        }
    });
    counts
}

/// `d_in+(y), d_in-(y), d_out+(x), d_out-(x), C(x,y), d_out(x), d_in(y)`.
/// Signed counts use observed signs; the totals include hidden edges.
pub fn degree_features(g: &SignedDigraph, x: NodeId, y: NodeId) -> Result<[f64; NUM_DEGREE_FEATURES]> {
    if x == y {
        return Err(Error::SameEndpoints(x));
    }
    let tx = g.degree_tally(x)?;
    let ty = g.degree_tally(y)?;
    let c = g.embeddedness_unchecked(x, y);
    Ok(degree_features_from_parts(&tx, &ty, c))
}

pub(crate) fn degree_features_from_parts(
    tx: &crate::graph::DegreeTally,
    ty: &crate::graph::DegreeTally,
    embeddedness: usize,
) -> [f64; NUM_DEGREE_FEATURES] {
    [
        ty.in_pos as f64,
        ty.in_neg as f64,
        tx.out_pos as f64,
        tx.out_neg as f64,
        embeddedness as f64,
        tx.out_degree() as f64,
        ty.in_degree() as f64,
    ]
}
