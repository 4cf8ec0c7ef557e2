//! Bayesian node features for partially observed graphs.
//!
//! Hidden edge signs are treated as independent Bernoulli draws. For a node
//! with `k` hidden edges on one side, the class of that side follows in
//! closed form from the observed class and the side's prior; the two sides
//! are independent, so the type distribution is their outer product.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{DegreeTally, NodeId, Sign, SignedDigraph};
use crate::nodetypes::{classify_node, EdgeClass, NodeTypeId, EPSILON, NUM_TYPES};

/// Probability that an edge is positive / negative.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignPrior {
    pub p_pos: f64,
    pub p_neg: f64,
}

impl SignPrior {
    pub fn new(p_pos: f64) -> SignPrior {
        SignPrior {
            p_pos,
            p_neg: 1.0 - p_pos,
        }
    }

    /// Scale a non-negative pair to sum to one; `None` if both are zero.
    pub fn normalized(pos: f64, neg: f64) -> Option<SignPrior> {
        let s = pos + neg;
        (s > 0.0).then(|| SignPrior {
            p_pos: pos / s,
            p_neg: neg / s,
        })
    }
}

/// Fraction of positive edges among the observed-sign edges.
pub fn global_sign_prior(g: &SignedDigraph) -> Result<SignPrior> {
    let (pos, neg, _) = g.sign_counts();
    if pos + neg == 0 {
        return Err(Error::NoObservedEdges);
    }
    Ok(SignPrior::new(pos as f64 / (pos + neg) as f64))
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BayesNodeProperties {
    pub p_in_pos: f64,
    pub p_in_neg: f64,
    pub p_out_pos: f64,
    pub p_out_neg: f64,
}

impl BayesNodeProperties {
    pub fn to_array(self) -> [f64; 4] {
        [self.p_in_pos, self.p_in_neg, self.p_out_pos, self.p_out_neg]
    }
}

/// Edge ratios with hidden edges counted at their expected sign under the
/// prior.
pub fn bayes_node_properties(tally: &DegreeTally, prior: SignPrior) -> BayesNodeProperties {
    let u = tally.in_hidden as f64;
    let v = tally.out_hidden as f64;
    let (ip, in_) = (tally.in_pos as f64, tally.in_neg as f64);
    let (op, on) = (tally.out_pos as f64, tally.out_neg as f64);
    let din = ip + in_ + u + EPSILON;
    let dout = op + on + v + EPSILON;
    BayesNodeProperties {
        p_in_pos: (ip + prior.p_pos * u) / din,
        p_in_neg: (in_ + prior.p_neg * u) / din,
        p_out_pos: (op + prior.p_pos * v) / dout,
        p_out_neg: (on + prior.p_neg * v) / dout,
    }
}

/// Distribution over [`EdgeClass`], indexed by `EdgeClass::index`.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct ClassDistribution(pub [f64; 4]);

impl ClassDistribution {
    pub fn point(c: EdgeClass) -> ClassDistribution {
        let mut p = [0.0; 4];
        p[c.index()] = 1.0;
        ClassDistribution(p)
    }

    pub fn get(&self, c: EdgeClass) -> f64 {
        self.0[c.index()]
    }
}

/// `q^k`: repeated multiplication up to 64, `exp(k ln q)` above.
pub(crate) fn pow_k(q: f64, k: u32) -> f64 {
    if k <= 64 {
        let mut acc = 1.0;
        for _ in 0..k {
            acc *= q;
        }
        acc
    } else if q <= 0.0 {
        0.0
    } else {
        (k as f64 * q.ln()).exp()
    }
}

/// Class of one side of a node once its `k` hidden edges are drawn from `q`.
pub fn class_distribution(observed: EdgeClass, k: u32, q: SignPrior) -> ClassDistribution {
    if k == 0 || observed == EdgeClass::Mixed {
        return ClassDistribution::point(observed);
    }
    let all_pos = pow_k(q.p_pos, k);
    let all_neg = pow_k(q.p_neg, k);
    let mut p = [0.0; 4];
    match observed {
        EdgeClass::None => {
            p[EdgeClass::AllPositive.index()] = all_pos;
            p[EdgeClass::AllNegative.index()] = all_neg;
            // one edge cannot be mixed
            p[EdgeClass::Mixed.index()] = if k == 1 {
                0.0
            } else {
                (1.0 - all_pos - all_neg).max(0.0)
            };
        }
        EdgeClass::AllPositive => {
            p[EdgeClass::AllPositive.index()] = all_pos;
            p[EdgeClass::Mixed.index()] = 1.0 - all_pos;
        }
        EdgeClass::AllNegative => {
            p[EdgeClass::AllNegative.index()] = all_neg;
            p[EdgeClass::Mixed.index()] = 1.0 - all_neg;
        }
        EdgeClass::Mixed => unreachable!(),
    }
    ClassDistribution(p)
}

/// Probability distribution over the sixteen node types, indexed by
/// `NodeTypeId::index`.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct TypeDistribution(pub [f64; NUM_TYPES]);

impl TypeDistribution {
    pub fn onehot(t: NodeTypeId) -> TypeDistribution {
        let mut p = [0.0; NUM_TYPES];
        p[t.index()] = 1.0;
        TypeDistribution(p)
    }

    pub fn get(&self, t: NodeTypeId) -> f64 {
        self.0[t.index()]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }
}

/// Type distribution of a node given the priors for its hidden incoming and
/// outgoing edges.
pub fn bayes_type_distribution(
    tally: &DegreeTally,
    in_prior: SignPrior,
    out_prior: SignPrior,
) -> TypeDistribution {
    let observed = classify_node(tally, false);
    let din = class_distribution(observed.incoming(), tally.in_hidden, in_prior);
    let dout = class_distribution(observed.outgoing(), tally.out_hidden, out_prior);
    let mut p = [0.0; NUM_TYPES];
    for a in EdgeClass::ALL {
        let pa = din.get(a);
        if pa == 0.0 {
            continue;
        }
        for b in EdgeClass::ALL {
            p[NodeTypeId::from_classes(a, b).index()] += pa * dout.get(b);
        }
    }
    TypeDistribution(p)
}

/// Node-local priors for hidden incoming and outgoing edges: the node's
/// Bayesian properties renormalised to sum to one, or `global` on a side
/// with no edges at all.
pub fn local_priors(tally: &DegreeTally, global: SignPrior) -> (SignPrior, SignPrior) {
    let b = bayes_node_properties(tally, global);
    (
        SignPrior::normalized(b.p_in_pos, b.p_in_neg).unwrap_or(global),
        SignPrior::normalized(b.p_out_pos, b.p_out_neg).unwrap_or(global),
    )
}

/// Bayesian node type with node-local priors.
pub fn node_type_distribution(tally: &DegreeTally, global: SignPrior) -> TypeDistribution {
    let (pin, pout) = local_priors(tally, global);
    bayes_type_distribution(tally, pin, pout)
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TypeEncoding {
    Concat,
    Kronecker,
}

impl TypeEncoding {
    pub fn dim(self) -> usize {
        match self {
            TypeEncoding::Concat => 2 * NUM_TYPES,
            TypeEncoding::Kronecker => NUM_TYPES * NUM_TYPES,
        }
    }
}

pub fn encode_concat(vx: &TypeDistribution, vy: &TypeDistribution) -> [f64; 2 * NUM_TYPES] {
    let mut out = [0.0; 2 * NUM_TYPES];
    out[..NUM_TYPES].copy_from_slice(&vx.0);
    out[NUM_TYPES..].copy_from_slice(&vy.0);
    out
}

/// Entry `i * 16 + j` is `vx[i] * vy[j]`.
pub fn encode_kronecker(vx: &TypeDistribution, vy: &TypeDistribution) -> [f64; NUM_TYPES * NUM_TYPES] {
    let mut out = [0.0; NUM_TYPES * NUM_TYPES];
    for (i, &a) in vx.0.iter().enumerate() {
        if a == 0.0 {
            continue;
        }
        for (j, &b) in vy.0.iter().enumerate() {
            out[i * NUM_TYPES + j] = a * b;
        }
    }
    out
}

fn encode_into(out: &mut [f64], weight: f64, vx: &TypeDistribution, vy: &TypeDistribution, enc: TypeEncoding) {
    match enc {
        TypeEncoding::Concat => {
            for (o, v) in out.iter_mut().zip(encode_concat(vx, vy)) {
                *o += weight * v;
            }
        }
        TypeEncoding::Kronecker => {
            for (o, v) in out.iter_mut().zip(encode_kronecker(vx, vy)) {
                *o += weight * v;
            }
        }
    }
}

/// Type-interaction features of an edge from its endpoint tallies.
///
/// `sign` is the edge's own sign in the graph the tallies came from. For a
/// hidden edge both hypotheses are encoded (the edge revealed as + and as -
/// in the source's outgoing and the target's incoming tallies) and mixed
/// with the global prior.
pub fn edge_type_features_from_tallies(
    source: &DegreeTally,
    target: &DegreeTally,
    sign: Sign,
    prior: SignPrior,
    encoding: TypeEncoding,
) -> Vec<f64> {
    let mut out = vec![0.0; encoding.dim()];
    if sign.is_observed() {
        let vx = node_type_distribution(source, prior);
        let vy = node_type_distribution(target, prior);
        encode_into(&mut out, 1.0, &vx, &vy, encoding);
        return out;
    }
    for (s, w) in [(Sign::Positive, prior.p_pos), (Sign::Negative, prior.p_neg)] {
        if w == 0.0 {
            continue;
        }
        let vx = node_type_distribution(&source.reveal_out(s), prior);
        let vy = node_type_distribution(&target.reveal_in(s), prior);
        encode_into(&mut out, w, &vx, &vy, encoding);
    }
    out
}

/// Type-interaction features of the existing edge `x -> y`.
pub fn edge_type_features(
    g: &SignedDigraph,
    x: NodeId,
    y: NodeId,
    prior: SignPrior,
    encoding: TypeEncoding,
) -> Result<Vec<f64>> {
    let e = g.find_edge(x, y).ok_or(Error::EdgeNotFound(x, y))?;
    Ok(edge_type_features_from_tallies(
        &g.tally_unchecked(x),
        &g.tally_unchecked(y),
        g.sign(e),
        prior,
        encoding,
    ))
}

pub fn edge_property_features_from_tallies(
    source: &DegreeTally,
    target: &DegreeTally,
    prior: SignPrior,
) -> [f64; 8] {
    let mut out = [0.0; 8];
    out[..4].copy_from_slice(&bayes_node_properties(source, prior).to_array());
    out[4..].copy_from_slice(&bayes_node_properties(target, prior).to_array());
    out
}

/// `[bnp(x) ‖ bnp(y)]` for the existing edge `x -> y`.
pub fn edge_property_features(g: &SignedDigraph, x: NodeId, y: NodeId, prior: SignPrior) -> Result<[f64; 8]> {
    g.find_edge(x, y).ok_or(Error::EdgeNotFound(x, y))?;
    Ok(edge_property_features_from_tallies(
        &g.tally_unchecked(x),
        &g.tally_unchecked(y),
        prior,
    ))
}
