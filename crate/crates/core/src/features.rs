//! Feature families, recipes, and per-edge extraction into design matrices.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bayes::{
    edge_property_features_from_tallies, edge_type_features_from_tallies, global_sign_prior, SignPrior,
    TypeEncoding,
};
use crate::error::{Error, Result};
use crate::graph::{DegreeTally, EdgeId, SignedDigraph};
use crate::model::Design;
use crate::structural::{degree_features_from_parts, triad_counts_unchecked};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FeatureFamily {
    /// Bayesian node types, concatenated (32).
    Bntc,
    /// Bayesian node types, Kronecker product (256).
    Bntk,
    /// Bayesian node properties of both endpoints (8).
    Bnp,
    /// Directed signed triad counts (16).
    Triad,
    /// Degree features (7).
    Degree,
}

impl FeatureFamily {
    pub const ALL: [FeatureFamily; 5] = [
        FeatureFamily::Bntc,
        FeatureFamily::Bntk,
        FeatureFamily::Bnp,
        FeatureFamily::Triad,
        FeatureFamily::Degree,
    ];

    pub fn dim(self) -> usize {
        match self {
            FeatureFamily::Bntc => 32,
            FeatureFamily::Bntk => 256,
            FeatureFamily::Bnp => 8,
            FeatureFamily::Triad => 16,
            FeatureFamily::Degree => 7,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FeatureFamily::Bntc => "BNTC",
            FeatureFamily::Bntk => "BNTK",
            FeatureFamily::Bnp => "BNP",
            FeatureFamily::Triad => "Triad",
            FeatureFamily::Degree => "Degree",
        }
    }

    pub fn column_names(self) -> Vec<String> {
        let d = self.dim();
        match self {
            FeatureFamily::Bntc => (0..d).map(|i| format!("bntc_{i:02}")).collect(),
            FeatureFamily::Bntk => (0..d).map(|i| format!("bntk_{i:03}")).collect(),
            FeatureFamily::Bnp => (0..d).map(|i| format!("bnp_{i}")).collect(),
            FeatureFamily::Triad => (0..d).map(|i| format!("triad_{i:02}")).collect(),
            FeatureFamily::Degree => (0..d).map(|i| format!("deg_{i}")).collect(),
        }
    }
}

impl FromStr for FeatureFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "bntc" => Ok(FeatureFamily::Bntc),
            "bntk" => Ok(FeatureFamily::Bntk),
            "bnp" => Ok(FeatureFamily::Bnp),
            "triad" | "triads" => Ok(FeatureFamily::Triad),
            "degree" | "deg" => Ok(FeatureFamily::Degree),
            other => Err(Error::InvalidRecipe(format!("unknown feature family {other:?}"))),
        }
    }
}

impl fmt::Display for FeatureFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Ordered, non-empty list of families whose blocks are concatenated.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct FeatureRecipe(Vec<FeatureFamily>);

impl FeatureRecipe {
    pub fn new(families: Vec<FeatureFamily>) -> Result<FeatureRecipe> {
        if families.is_empty() {
            return Err(Error::InvalidRecipe("empty recipe".into()));
        }
        for (i, f) in families.iter().enumerate() {
            if families[..i].contains(f) {
                return Err(Error::InvalidRecipe(format!("{f} listed twice")));
            }
        }
        if families.contains(&FeatureFamily::Bntc) && families.contains(&FeatureFamily::Bntk) {
            return Err(Error::InvalidRecipe("BNTC and BNTK cannot be combined".into()));
        }
        Ok(FeatureRecipe(families))
    }

    pub fn families(&self) -> &[FeatureFamily] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.iter().map(|f| f.dim()).sum()
    }

    pub fn manifest(&self) -> Vec<String> {
        self.0.iter().flat_map(|f| f.column_names()).collect()
    }

    /// Recover the recipe a model manifest was built from.
    pub fn from_manifest(manifest: &[String]) -> Result<FeatureRecipe> {
        let mut families = Vec::new();
        let mut rest = manifest;
        while let Some(first) = rest.first() {
            let family = FeatureFamily::ALL
                .into_iter()
                .find(|f| f.column_names()[0] == *first)
                .ok_or_else(|| Error::InvalidRecipe(format!("unrecognised column {first:?}")))?;
            let names = family.column_names();
            if rest.len() < names.len() || rest[..names.len()] != names[..] {
                return Err(Error::InvalidRecipe(format!("truncated {family} block")));
            }
            families.push(family);
            rest = &rest[names.len()..];
        }
        FeatureRecipe::new(families)
    }
}

impl FromStr for FeatureRecipe {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let families = s
            .split('+')
            .filter(|t| !t.trim().is_empty())
            .map(FeatureFamily::from_str)
            .collect::<Result<Vec<_>>>()?;
        FeatureRecipe::new(families)
    }
}

impl fmt::Display for FeatureRecipe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.0.iter().map(|f| f.name()).collect();
        f.write_str(&names.join("+"))
    }
}

impl TryFrom<String> for FeatureRecipe {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<FeatureRecipe> for String {
    fn from(r: FeatureRecipe) -> String {
        r.to_string()
    }
}

/// Computes feature rows for edges of one (possibly partially observed)
/// graph. Tallies are computed once up front.
pub struct FeatureExtractor<'g> {
    graph: &'g SignedDigraph,
    prior: SignPrior,
    tallies: Vec<DegreeTally>,
}

impl<'g> FeatureExtractor<'g> {
    /// Uses the graph's own global sign prior.
    pub fn new(graph: &'g SignedDigraph) -> Result<FeatureExtractor<'g>> {
        let prior = global_sign_prior(graph)?;
        Ok(Self::with_prior(graph, prior))
    }

    pub fn with_prior(graph: &'g SignedDigraph, prior: SignPrior) -> FeatureExtractor<'g> {
        FeatureExtractor {
            graph,
            prior,
            tallies: graph.tallies(),
        }
    }

    pub fn prior(&self) -> SignPrior {
        self.prior
    }

    pub fn graph(&self) -> &SignedDigraph {
        self.graph
    }

    /// Dense feature block of one family for one edge.
    pub fn edge_block(&self, family: FeatureFamily, e: EdgeId) -> Vec<f64> {
        let edge = self.graph.edge(e);
        let tx = &self.tallies[edge.source as usize];
        let ty = &self.tallies[edge.target as usize];
        match family {
            FeatureFamily::Bntc => {
                edge_type_features_from_tallies(tx, ty, edge.sign, self.prior, TypeEncoding::Concat)
            }
            FeatureFamily::Bntk => {
                edge_type_features_from_tallies(tx, ty, edge.sign, self.prior, TypeEncoding::Kronecker)
            }
            FeatureFamily::Bnp => edge_property_features_from_tallies(tx, ty, self.prior).to_vec(),
            FeatureFamily::Triad => triad_counts_unchecked(self.graph, edge.source, edge.target).to_vec(),
            FeatureFamily::Degree => {
                let c = self.graph.embeddedness_unchecked(edge.source, edge.target);
                degree_features_from_parts(tx, ty, c).to_vec()
            }
        }
    }

    /// Dense row for a recipe.
    pub fn edge_row(&self, recipe: &FeatureRecipe, e: EdgeId) -> Vec<f64> {
        recipe
            .families()
            .iter()
            .flat_map(|&f| self.edge_block(f, e))
            .collect()
    }

    /// One family's block for `edges`, in order.
    pub fn family_design(&self, family: FeatureFamily, edges: &[EdgeId]) -> Design {
        let rows: Vec<(Vec<u32>, Vec<f64>)> = edges
            .par_iter()
            .with_min_len(1024)
            .map(|&e| {
                let dense = self.edge_block(family, e);
                let mut idx = Vec::new();
                let mut val = Vec::new();
                for (j, v) in dense.into_iter().enumerate() {
                    if v != 0.0 {
                        idx.push(j as u32);
                        val.push(v);
                    }
                }
                (idx, val)
            })
            .collect();
        let mut d = Design::new(family.dim());
        for (idx, val) in rows {
            d.push_sparse(&idx, &val);
        }
        d
    }

    pub fn design(&self, recipe: &FeatureRecipe, edges: &[EdgeId]) -> Design {
        let blocks: Vec<Design> = recipe
            .families()
            .iter()
            .map(|&f| self.family_design(f, edges))
            .collect();
        let refs: Vec<&Design> = blocks.iter().collect();
        Design::hstack(&refs).expect("blocks share row count")
    }
}
