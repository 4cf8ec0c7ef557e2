//! Seeded synthetic signed digraphs for tests, benchmarks and demos.
//!
//! Endpoints are drawn with heavy-tailed activity weights. Each node has a
//! latent status, an outgoing generosity and an incoming reputation; an
//! edge x -> y is positive with probability
//! `sigmoid(bias + status_weight * (status_y - status_x) + gen_x + rep_y)`.

use std::collections::HashSet;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Normal, Pareto};

use crate::graph::{NodeId, Sign, SignedDigraph};

#[derive(Clone, Debug)]
pub struct SynthConfig {
    pub nodes: usize,
    pub edges: usize,
    pub seed: u64,
    /// Baseline log-odds of a positive edge.
    pub bias: f64,
    pub status_weight: f64,
    /// Spread of per-node generosity and reputation.
    pub node_spread: f64,
    /// Pareto shape of node activity; smaller is heavier-tailed.
    pub activity_shape: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            nodes: 2000,
            edges: 20000,
            seed: 1,
            bias: 1.8,
            status_weight: 1.5,
            node_spread: 2.0,
            activity_shape: 1.6,
        }
    }
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Generate a graph with exactly `min(edges, n(n-1))` edges.
pub fn generate(cfg: &SynthConfig) -> SignedDigraph {
    let n = cfg.nodes.max(2);
    let m = cfg.edges.min(n * (n - 1));
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let pareto = Pareto::new(1.0, cfg.activity_shape).expect("positive shape");
    let normal = Normal::new(0.0, 1.0).expect("unit normal");

    let out_w: Vec<f64> = (0..n).map(|_| pareto.sample(&mut rng)).collect();
    let in_w: Vec<f64> = (0..n).map(|_| pareto.sample(&mut rng)).collect();
    let status: Vec<f64> = (0..n).map(|_| normal.sample(&mut rng)).collect();
    let generosity: Vec<f64> = (0..n).map(|_| cfg.node_spread * normal.sample(&mut rng)).collect();
    let reputation: Vec<f64> = (0..n).map(|_| cfg.node_spread * normal.sample(&mut rng)).collect();
    let pick_out = WeightedIndex::new(&out_w).expect("positive weights");
    let pick_in = WeightedIndex::new(&in_w).expect("positive weights");

    let mut seen = HashSet::with_capacity(m);
    let mut edges = Vec::with_capacity(m);
    let mut attempts = 0usize;
    while edges.len() < m {
        attempts += 1;
        // fall back to uniform endpoints if the weighted draw saturates
        let (x, y) = if attempts < 50 * m {
            (pick_out.sample(&mut rng), pick_in.sample(&mut rng))
        } else {
            (rng.random_range(0..n), rng.random_range(0..n))
        };
        if x == y || !seen.insert((x, y)) {
            continue;
        }
        let logit = cfg.bias + cfg.status_weight * (status[y] - status[x]) + generosity[x] + reputation[y];
        let sign = if rng.random::<f64>() < sigmoid(logit) {
            Sign::Positive
        } else {
            Sign::Negative
        };
        edges.push((x as NodeId, y as NodeId, sign));
    }
    SignedDigraph::from_edges(n, edges).expect("generator emits valid edges")
}

/// Uniform random graph with independent fair-coin signs.
pub fn random_graph(nodes: usize, edges: usize, seed: u64) -> SignedDigraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = nodes.max(2);
    let m = edges.min(n * (n - 1));
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(m);
    while out.len() < m {
        let (x, y) = (rng.random_range(0..n), rng.random_range(0..n));
        if x == y || !seen.insert((x, y)) {
            continue;
        }
        let s = if rng.random::<bool>() { Sign::Positive } else { Sign::Negative };
        out.push((x as NodeId, y as NodeId, s));
    }
    SignedDigraph::from_edges(n, out).expect("valid edges")
}
