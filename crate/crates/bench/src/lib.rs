//! Shared fixtures for the benchmarks under `benches/`.

use signtypes::graph::{mask_edges, Holdout};
use signtypes::synth::{generate, SynthConfig};
use signtypes::SignedDigraph;

/// A synthetic graph with 10% of its signs hidden.
pub fn masked_fixture(nodes: usize, edges: usize) -> (SignedDigraph, Holdout) {
    let g = generate(&SynthConfig {
        nodes,
        edges,
        seed: 42,
        ..Default::default()
    });
    mask_edges(&g, 0.1, 1).expect("fully observed synthetic graph")
}
