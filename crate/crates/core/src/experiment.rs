//! Evaluation protocol: repeated sign holdouts, embeddedness-stratified
//! accuracy, cross-dataset transfer and dataset statistics.

use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::features::{FeatureExtractor, FeatureFamily, FeatureRecipe};
use crate::graph::{mask_edges, EdgeId, Holdout, Sign, SignedDigraph};
use crate::model::{fit, select_l2, sign_for, Design, FitOptions, TrainedModel};
use crate::nodetypes::{census_determined, type_fractions, Census, NodeTypeId};

pub const REPORT_SCHEMA_VERSION: u32 = 1;
/// Curve buckets with fewer test edges than this are flagged.
pub const LOW_SUPPORT: usize = 50;

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub fraction: f64,
    pub seeds: Vec<u64>,
    pub fit: FitOptions,
    /// Minimum-embeddedness levels for the accuracy curve; empty for none.
    pub curve_levels: Vec<usize>,
    /// When non-empty, pick L2 per fit from this grid on a validation
    /// split of the training edges.
    pub l2_grid: Vec<f64>,
    pub threshold: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            fraction: 0.1,
            seeds: (1..=5).collect(),
            fit: FitOptions::default(),
            curve_levels: Vec::new(),
            l2_grid: Vec::new(),
            threshold: 0.5,
        }
    }
}

pub fn default_curve_levels() -> Vec<usize> {
    (0..=25).collect()
}

/// Counts with "positive" meaning a positive edge sign.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub true_pos: usize,
    pub false_pos: usize,
    pub true_neg: usize,
    pub false_neg: usize,
}

impl Confusion {
    fn add(&mut self, truth: Sign, predicted: Sign) {
        match (truth, predicted) {
            (Sign::Positive, Sign::Positive) => self.true_pos += 1,
            (Sign::Negative, Sign::Positive) => self.false_pos += 1,
            (Sign::Negative, Sign::Negative) => self.true_neg += 1,
            (Sign::Positive, Sign::Negative) => self.false_neg += 1,
            _ => {}
        }
    }

    fn merge(&mut self, o: &Confusion) {
        self.true_pos += o.true_pos;
        self.false_pos += o.false_pos;
        self.true_neg += o.true_neg;
        self.false_neg += o.false_neg;
    }

    pub fn total(&self) -> usize {
        self.true_pos + self.false_pos + self.true_neg + self.false_neg
    }

    pub fn accuracy(&self) -> f64 {
        (self.true_pos + self.true_neg) as f64 / self.total().max(1) as f64
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RepeatResult {
    pub seed: u64,
    pub n_train: usize,
    pub n_test: usize,
    pub accuracy: f64,
    /// Accuracy of predicting every test edge positive.
    pub all_positive_accuracy: f64,
    pub l2: f64,
    pub fit_iterations: usize,
    pub confusion: Confusion,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub min_embeddedness: usize,
    pub n_test: usize,
    pub accuracy: Option<f64>,
    pub low_support: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema_version: u32,
    /// Dataset the test edges come from.
    pub dataset: String,
    /// Set for cross-dataset runs.
    pub train_dataset: Option<String>,
    pub recipe: FeatureRecipe,
    pub fraction: f64,
    pub repeats: usize,
    pub seeds: Vec<u64>,
    pub accuracies: Vec<f64>,
    pub mean_accuracy: f64,
    pub std_accuracy: f64,
    pub mean_all_positive_accuracy: f64,
    pub per_repeat: Vec<RepeatResult>,
    pub confusion: Confusion,
    /// Pooled over repeats.
    pub curve: Option<Vec<CurvePoint>>,
    /// Wall-clock seconds; not serialised so reports stay reproducible.
    #[serde(skip)]
    pub runtime_secs: f64,
}

/// Mean and sample standard deviation (n - 1; zero for a single value).
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Per-test-edge outcome used for the embeddedness curve.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct EdgeOutcome {
    pub embeddedness: usize,
    pub correct: bool,
}

/// Accuracy over test edges with embeddedness at least each level.
pub fn embeddedness_curve(outcomes: &[EdgeOutcome], levels: &[usize]) -> Vec<CurvePoint> {
    levels
        .iter()
        .map(|&level| {
            let (n, ok) = outcomes
                .iter()
                .filter(|o| o.embeddedness >= level)
                .fold((0usize, 0usize), |(n, ok), o| (n + 1, ok + o.correct as usize));
            CurvePoint {
                min_embeddedness: level,
                n_test: n,
                accuracy: (n > 0).then(|| ok as f64 / n as f64),
                low_support: n < LOW_SUPPORT,
            }
        })
        .collect()
}

/// Training and test blocks of one masked graph, computed lazily per
/// family and shared by every recipe.
struct SplitFeatures<'g> {
    fx: FeatureExtractor<'g>,
    train: Vec<EdgeId>,
    test: Vec<EdgeId>,
    blocks: Vec<(FeatureFamily, Design, Design)>,
}

impl<'g> SplitFeatures<'g> {
    fn new(masked: &'g SignedDigraph) -> Result<SplitFeatures<'g>> {
        Ok(SplitFeatures {
            fx: FeatureExtractor::new(masked)?,
            train: masked.observed_edges(),
            test: masked.hidden_edges(),
            blocks: Vec::new(),
        })
    }

    fn ensure(&mut self, recipe: &FeatureRecipe, need_train: bool) {
        for &f in recipe.families() {
            if self.blocks.iter().any(|(g, _, _)| *g == f) {
                continue;
            }
            let tr = if need_train {
                self.fx.family_design(f, &self.train)
            } else {
                Design::new(f.dim())
            };
            let te = self.fx.family_design(f, &self.test);
            self.blocks.push((f, tr, te));
        }
    }

    fn assemble(&self, recipe: &FeatureRecipe, train: bool) -> Design {
        let parts: Vec<&Design> = recipe
            .families()
            .iter()
            .map(|f| {
                let (_, tr, te) = self.blocks.iter().find(|(g, _, _)| g == f).expect("block computed");
                if train {
                    tr
                } else {
                    te
                }
            })
            .collect();
        Design::hstack(&parts).expect("equal rows")
    }

    fn train_labels(&self) -> Vec<f64> {
        let g = self.fx.graph();
        self.train
            .iter()
            .map(|&e| if g.sign(e) == Sign::Positive { 1.0 } else { 0.0 })
            .collect()
    }
}

fn train_model(split: &SplitFeatures<'_>, recipe: &FeatureRecipe, config: &ExperimentConfig, seed: u64) -> Result<TrainedModel> {
    let x = split.assemble(recipe, true);
    let y = split.train_labels();
    let mut opts = config.fit.clone();
    if !config.l2_grid.is_empty() {
        opts.l2 = select_l2(&x, &y, &config.l2_grid, 0.2, seed, &config.fit)?;
    }
    fit(&x, &y, &opts, recipe.manifest())
}

#[allow(clippy::too_many_arguments)]
fn score_split(
    split: &SplitFeatures<'_>,
    holdout: &Holdout,
    recipe: &FeatureRecipe,
    model: &TrainedModel,
    config: &ExperimentConfig,
    seed: u64,
    n_train: usize,
    outcomes: &mut Vec<EdgeOutcome>,
) -> Result<RepeatResult> {
    let x = split.assemble(recipe, false);
    let proba = model.predict_design(&x)?;
    let g = split.fx.graph();
    let mut confusion = Confusion::default();
    let mut positives = 0usize;
    debug_assert!(holdout.edges.iter().map(|h| h.edge).eq(split.test.iter().copied()));
    let emb: Vec<usize> = if config.curve_levels.is_empty() {
        Vec::new()
    } else {
        split
            .test
            .par_iter()
            .map(|&e| {
                let edge = g.edge(e);
                g.embeddedness_unchecked(edge.source, edge.target)
            })
            .collect()
    };
    for (k, (h, &p)) in holdout.edges.iter().zip(&proba).enumerate() {
        let predicted = sign_for(p, config.threshold);
        confusion.add(h.sign, predicted);
        positives += (h.sign == Sign::Positive) as usize;
        if !emb.is_empty() {
            outcomes.push(EdgeOutcome {
                embeddedness: emb[k],
                correct: predicted == h.sign,
            });
        }
    }
    let n_test = holdout.edges.len();
    Ok(RepeatResult {
        seed,
        n_train,
        n_test,
        accuracy: confusion.accuracy(),
        all_positive_accuracy: positives as f64 / n_test.max(1) as f64,
        l2: model.l2,
        fit_iterations: model.metadata.iterations,
        confusion,
    })
}

fn finish_report(
    dataset: &str,
    train_dataset: Option<&str>,
    recipe: &FeatureRecipe,
    config: &ExperimentConfig,
    per_repeat: Vec<RepeatResult>,
    outcomes: &[EdgeOutcome],
    runtime_secs: f64,
) -> ExperimentReport {
    let accuracies: Vec<f64> = per_repeat.iter().map(|r| r.accuracy).collect();
    let (mean, std) = mean_std(&accuracies);
    let baseline: Vec<f64> = per_repeat.iter().map(|r| r.all_positive_accuracy).collect();
    let mut confusion = Confusion::default();
    for r in &per_repeat {
        confusion.merge(&r.confusion);
    }
    ExperimentReport {
        schema_version: REPORT_SCHEMA_VERSION,
        dataset: dataset.to_owned(),
        train_dataset: train_dataset.map(str::to_owned),
        recipe: recipe.clone(),
        fraction: config.fraction,
        repeats: per_repeat.len(),
        seeds: config.seeds.clone(),
        accuracies,
        mean_accuracy: mean,
        std_accuracy: std,
        mean_all_positive_accuracy: mean_std(&baseline).0,
        per_repeat,
        confusion,
        curve: (!config.curve_levels.is_empty()).then(|| embeddedness_curve(outcomes, &config.curve_levels)),
        runtime_secs,
    }
}

/// Within-dataset holdout runs. Every recipe sees the same masks, so the
/// reports are paired comparisons.
pub fn run_holdout_experiment(
    g: &SignedDigraph,
    dataset: &str,
    recipes: &[FeatureRecipe],
    config: &ExperimentConfig,
) -> Result<Vec<ExperimentReport>> {
    let mut per_recipe: Vec<(Vec<RepeatResult>, Vec<EdgeOutcome>, f64)> =
        recipes.iter().map(|_| (Vec::new(), Vec::new(), 0.0)).collect();
    for &seed in &config.seeds {
        let (masked, holdout) = mask_edges(g, config.fraction, seed)?;
        let mut split = SplitFeatures::new(&masked)?;
        for (k, recipe) in recipes.iter().enumerate() {
            let t = Instant::now();
            split.ensure(recipe, true);
            let model = train_model(&split, recipe, config, seed)?;
            let (results, outcomes, secs) = &mut per_recipe[k];
            let n_train = split.train.len();
            results.push(score_split(&split, &holdout, recipe, &model, config, seed, n_train, outcomes)?);
            *secs += t.elapsed().as_secs_f64();
        }
    }
    Ok(recipes
        .iter()
        .zip(per_recipe)
        .map(|(recipe, (results, outcomes, secs))| {
            finish_report(dataset, None, recipe, config, results, &outcomes, secs)
        })
        .collect())
}

/// Train on `train`'s observed edges and evaluate on each test graph's
/// hidden edges. Both sides are masked with the same seed per repeat; test
/// features use the test graph's own prior, and only the weights and the
/// standardisation carry over.
pub fn cross_dataset(
    train: (&str, &SignedDigraph),
    tests: &[(&str, &SignedDigraph)],
    recipe: &FeatureRecipe,
    config: &ExperimentConfig,
) -> Result<Vec<ExperimentReport>> {
    let mut per_test: Vec<(Vec<RepeatResult>, Vec<EdgeOutcome>, f64)> =
        tests.iter().map(|_| (Vec::new(), Vec::new(), 0.0)).collect();
    for &seed in &config.seeds {
        let t = Instant::now();
        let (masked, _) = mask_edges(train.1, config.fraction, seed)?;
        let mut split = SplitFeatures::new(&masked)?;
        split.ensure(recipe, true);
        let model = train_model(&split, recipe, config, seed)?;
        let n_train = split.train.len();
        let train_secs = t.elapsed().as_secs_f64();
        drop(split);
        for (k, (_, test_g)) in tests.iter().enumerate() {
            let t = Instant::now();
            let (tmasked, tholdout) = mask_edges(test_g, config.fraction, seed)?;
            let mut tsplit = SplitFeatures::new(&tmasked)?;
            tsplit.ensure(recipe, false);
            let (results, outcomes, secs) = &mut per_test[k];
            results.push(score_split(&tsplit, &tholdout, recipe, &model, config, seed, n_train, outcomes)?);
            *secs += t.elapsed().as_secs_f64() + train_secs;
        }
    }
    Ok(tests
        .iter()
        .zip(per_test)
        .map(|((name, _), (results, outcomes, secs))| {
            finish_report(name, Some(train.0), recipe, config, results, &outcomes, secs)
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TypeFraction {
    pub type_id: u8,
    pub fraction: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetStats {
    pub nodes: usize,
    pub edges: usize,
    pub positive_edges: usize,
    pub negative_edges: usize,
    pub hidden_edges: usize,
    /// Among observed-sign edges.
    pub positive_fraction: f64,
    pub negative_fraction: f64,
    pub zero_embeddedness_fraction: f64,
    /// Edge counts by embeddedness 0..=24; the last entry counts 25 and up.
    pub embeddedness_histogram: Vec<usize>,
    pub type_fractions: Vec<TypeFraction>,
    pub census: Census,
}

pub const HISTOGRAM_CAP: usize = 25;

pub fn dataset_stats(g: &SignedDigraph) -> DatasetStats {
    let (pos, neg, hidden) = g.sign_counts();
    let observed = (pos + neg).max(1) as f64;
    let emb: Vec<usize> = (0..g.edge_count())
        .into_par_iter()
        .map(|e| {
            let edge = g.edge(e);
            g.embeddedness_unchecked(edge.source, edge.target)
        })
        .collect();
    let mut hist = vec![0usize; HISTOGRAM_CAP + 1];
    for &c in &emb {
        hist[c.min(HISTOGRAM_CAP)] += 1;
    }
    let fr = type_fractions(g);
    DatasetStats {
        nodes: g.node_count(),
        edges: g.edge_count(),
        positive_edges: pos,
        negative_edges: neg,
        hidden_edges: hidden,
        positive_fraction: pos as f64 / observed,
        negative_fraction: neg as f64 / observed,
        zero_embeddedness_fraction: hist[0] as f64 / g.edge_count().max(1) as f64,
        embeddedness_histogram: hist,
        type_fractions: NodeTypeId::all()
            .map(|t| TypeFraction {
                type_id: t.label(),
                fraction: fr[t.index()],
            })
            .collect(),
        census: census_determined(g),
    }
}

impl DatasetStats {
    /// `type_id,fraction` rows.
    pub fn type_fraction_csv(&self) -> String {
        let mut s = String::from("type_id,fraction\n");
        for t in &self.type_fractions {
            let _ = writeln!(s, "{},{}", t.type_id, t.fraction);
        }
        s
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "nodes                {:>12}", self.nodes);
        let _ = writeln!(s, "edges                {:>12}", self.edges);
        let _ = writeln!(s, "positive edges       {:>12}  ({:.2}%)", self.positive_edges, 100.0 * self.positive_fraction);
        let _ = writeln!(s, "negative edges       {:>12}  ({:.2}%)", self.negative_edges, 100.0 * self.negative_fraction);
        if self.hidden_edges > 0 {
            let _ = writeln!(s, "hidden edges         {:>12}", self.hidden_edges);
        }
        let _ = writeln!(s, "zero embeddedness    {:>11.2}%", 100.0 * self.zero_embeddedness_fraction);
        let c = &self.census;
        let _ = writeln!(s, "determined edges     {:>12}  (+ {}, - {})", c.determined(), c.must_positive, c.must_negative);
        let _ = writeln!(s, "undetermined edges   {:>12}", c.undetermined);
        let _ = writeln!(s, "forbidden edges      {:>12}", c.forbidden);
        let _ = writeln!(s, "\ntype  fraction");
        for t in &self.type_fractions {
            let _ = writeln!(s, "N{:<4} {:.6}", t.type_id, t.fraction);
        }
        s
    }
}

impl ExperimentReport {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let target = match &self.train_dataset {
            Some(t) => format!("{} (trained on {t})", self.dataset),
            None => self.dataset.clone(),
        };
        let _ = writeln!(s, "dataset   {target}");
        let _ = writeln!(s, "recipe    {}", self.recipe);
        let _ = writeln!(s, "holdout   {} x {} (seeds {:?})", self.fraction, self.repeats, self.seeds);
        let _ = writeln!(
            s,
            "accuracy  {:.2}% (+/- {:.2})   all-positive {:.2}%",
            100.0 * self.mean_accuracy,
            100.0 * self.std_accuracy,
            100.0 * self.mean_all_positive_accuracy
        );
        let _ = writeln!(s, "runtime   {:.1}s", self.runtime_secs);
        let _ = writeln!(s, "{:>8} {:>9} {:>8} {:>9} {:>6}", "seed", "n_train", "n_test", "accuracy", "iters");
        for r in &self.per_repeat {
            let _ = writeln!(
                s,
                "{:>8} {:>9} {:>8} {:>8.2}% {:>6}",
                r.seed,
                r.n_train,
                r.n_test,
                100.0 * r.accuracy,
                r.fit_iterations
            );
        }
        s
    }

    /// `min_embeddedness,n_test,accuracy` rows; empty accuracy when a bucket
    /// has no edges.
    pub fn curve_csv(&self) -> Option<String> {
        let curve = self.curve.as_ref()?;
        let mut s = String::from("min_embeddedness,n_test,accuracy\n");
        for p in curve {
            let acc = p.accuracy.map(|a| a.to_string()).unwrap_or_default();
            let _ = writeln!(s, "{},{},{}", p.min_embeddedness, p.n_test, acc);
        }
        Some(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_std_values() {
        let (m, s) = mean_std(&[1.0, 2.0, 3.0]);
        assert_eq!(m, 2.0);
        assert!((s - 1.0).abs() < 1e-15);
        assert_eq!(mean_std(&[4.0]), (4.0, 0.0));
    }

    #[test]
    fn curve_levels() {
        let outcomes: Vec<EdgeOutcome> = (0..10)
            .map(|i| EdgeOutcome {
                embeddedness: i,
                correct: i % 2 == 0,
            })
            .collect();
        let c = embeddedness_curve(&outcomes, &[0, 5, 20]);
        assert_eq!(c[0].n_test, 10);
        assert_eq!(c[0].accuracy, Some(0.5));
        assert_eq!(c[1].n_test, 5);
        assert_eq!(c[1].accuracy, Some(0.4));
        assert_eq!(c[2].n_test, 0);
        assert_eq!(c[2].accuracy, None);
        assert!(c.iter().all(|p| p.low_support));
    }

    #[test]
    fn single_edge_stats() {
        let g = crate::graph::load_edge_list("a b -1".as_bytes()).unwrap();
        let s = dataset_stats(&g);
        assert_eq!(s.zero_embeddedness_fraction, 1.0);
        let nonzero: Vec<u8> = s.type_fractions.iter().filter(|t| t.fraction > 0.0).map(|t| t.type_id).collect();
        assert_eq!(nonzero, vec![2, 5]);
        assert!(s.type_fraction_csv().starts_with("type_id,fraction\n1,0\n2,0.5\n"));
    }
}
