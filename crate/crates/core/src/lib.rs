//! Edge sign prediction in signed directed networks from node types,
//! Bayesian node features and triad features.
//!
//! The usual flow is: load a graph ([`graph::load_edge_list`]), hide a
//! fraction of signs ([`graph::mask_edges`]), extract features for observed
//! and hidden edges ([`features::FeatureExtractor`]), fit a logistic model
//! on the observed ones ([`model::fit`]) and predict the hidden ones.
//! [`experiment`] wraps that loop into repeated holdout runs.

pub mod bayes;
pub mod error;
pub mod experiment;
pub mod features;
pub mod graph;
pub mod model;
pub mod nodetypes;
pub mod structural;
pub mod synth;

pub use bayes::{SignPrior, TypeDistribution, TypeEncoding};
pub use error::{Error, Result};
pub use experiment::{DatasetStats, ExperimentConfig, ExperimentReport};
pub use features::{FeatureExtractor, FeatureFamily, FeatureRecipe};
pub use graph::{DegreeTally, EdgeId, Holdout, NodeId, Sign, SignedDigraph};
pub use model::{Design, FitOptions, TrainedModel};
pub use nodetypes::{EdgeClass, NodeTypeId, SignConstraint};
