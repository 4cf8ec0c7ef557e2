//! L2-regularised logistic regression over standardised features.
//!
//! Feature rows are stored sparse ([`Design`]); standardisation is folded
//! into the weights at evaluation time so implicit zeros stay implicit.
//! Fitting is deterministic: gradients are accumulated over fixed-size row
//! chunks and the partial sums are reduced in chunk order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Sign;

const CHUNK_ROWS: usize = 4096;
const MODEL_FORMAT: &str = "signtypes-logistic";
const MODEL_VERSION: u32 = 1;

/// Row-compressed sparse feature matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Design {
    n_cols: usize,
    indptr: Vec<usize>,
    indices: Vec<u32>,
    values: Vec<f64>,
}

impl Design {
    pub fn new(n_cols: usize) -> Design {
        Design {
            n_cols,
            indptr: vec![0],
            indices: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn from_dense<R: AsRef<[f64]>>(n_cols: usize, rows: &[R]) -> Result<Design> {
        let mut d = Design::new(n_cols);
        for r in rows {
            d.push_dense(r.as_ref())?;
        }
        Ok(d)
    }

    /// Append a dense row; exact zeros are not stored.
    pub fn push_dense(&mut self, row: &[f64]) -> Result<()> {
        if row.len() != self.n_cols {
            return Err(Error::DimensionMismatch {
                expected: self.n_cols,
                actual: row.len(),
            });
        }
        for (j, &v) in row.iter().enumerate() {
            if v != 0.0 {
                self.indices.push(j as u32);
                self.values.push(v);
            }
        }
        self.indptr.push(self.indices.len());
        Ok(())
    }

    /// Append a sparse row given as strictly increasing column indices.
    pub fn push_sparse(&mut self, indices: &[u32], values: &[f64]) {
        debug_assert_eq!(indices.len(), values.len());
        debug_assert!(indices.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(indices.last().is_none_or(|&j| (j as usize) < self.n_cols));
        self.indices.extend_from_slice(indices);
        self.values.extend_from_slice(values);
        self.indptr.push(self.indices.len());
    }

    pub fn rows(&self) -> usize {
        self.indptr.len() - 1
    }

    pub fn cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    #[inline]
    pub fn row(&self, i: usize) -> (&[u32], &[f64]) {
        let (a, b) = (self.indptr[i], self.indptr[i + 1]);
        (&self.indices[a..b], &self.values[a..b])
    }

    pub fn dense_row(&self, i: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.n_cols];
        let (idx, val) = self.row(i);
        for (&j, &v) in idx.iter().zip(val) {
            out[j as usize] = v;
        }
        out
    }

    /// Keep the given rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> Design {
        let mut d = Design::new(self.n_cols);
        for &i in rows {
            let (idx, val) = self.row(i);
            d.push_sparse(idx, val);
        }
        d
    }

    /// Column-wise concatenation of blocks with equal row counts.
    pub fn hstack(blocks: &[&Design]) -> Result<Design> {
        let rows = blocks.first().map_or(0, |b| b.rows());
        for b in blocks {
            if b.rows() != rows {
                return Err(Error::DimensionMismatch {
                    expected: rows,
                    actual: b.rows(),
                });
            }
        }
        let n_cols = blocks.iter().map(|b| b.cols()).sum();
        let mut d = Design::new(n_cols);
        d.indices.reserve(blocks.iter().map(|b| b.nnz()).sum());
        d.values.reserve(d.indices.capacity());
        for i in 0..rows {
            let mut offset = 0u32;
            for b in blocks {
                let (idx, val) = b.row(i);
                d.indices.extend(idx.iter().map(|&j| j + offset));
                d.values.extend_from_slice(val);
                offset += b.cols() as u32;
            }
            d.indptr.push(d.indices.len());
        }
        Ok(d)
    }

    pub fn check_finite(&self) -> Result<()> {
        for i in 0..self.rows() {
            let (idx, val) = self.row(i);
            if let Some(k) = val.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFinite {
                    row: i,
                    column: idx[k] as usize,
                });
            }
        }
        Ok(())
    }
}

/// Per-column z-score transform.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub means: Vec<f64>,
    /// Standard deviations; 1 for constant columns.
    pub scales: Vec<f64>,
}

impl Standardizer {
    pub fn fit(x: &Design) -> Standardizer {
        let n = x.rows().max(1) as f64;
        let d = x.cols();
        let mut sums = vec![0.0; d];
        let mut counts = vec![0usize; d];
        for i in 0..x.rows() {
            let (idx, val) = x.row(i);
            for (&j, &v) in idx.iter().zip(val) {
                sums[j as usize] += v;
                counts[j as usize] += 1;
            }
        }
        let means: Vec<f64> = sums.iter().map(|s| s / n).collect();
        // two-pass: stored entries, then the implicit zeros
        let mut sq = vec![0.0; d];
        for i in 0..x.rows() {
            let (idx, val) = x.row(i);
            for (&j, &v) in idx.iter().zip(val) {
                let c = v - means[j as usize];
                sq[j as usize] += c * c;
            }
        }
        let scales = (0..d)
            .map(|j| {
                let zeros = (x.rows() - counts[j]) as f64;
                let var = (sq[j] + zeros * means[j] * means[j]) / n;
                let sd = var.sqrt();
                if sd > 1e-12 * means[j].abs().max(1.0) {
                    sd
                } else {
                    1.0
                }
            })
            .collect();
        Standardizer { means, scales }
    }

    pub fn identity(d: usize) -> Standardizer {
        Standardizer {
            means: vec![0.0; d],
            scales: vec![1.0; d],
        }
    }
}

#[inline]
fn sigmoid(s: f64) -> f64 {
    if s >= 0.0 {
        1.0 / (1.0 + (-s).exp())
    } else {
        let e = s.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^s)`
#[inline]
fn softplus(s: f64) -> f64 {
    s.max(0.0) + (-s.abs()).exp().ln_1p()
}

/// Mean negative log-likelihood plus `l2 / 2 * |w|^2` (bias unpenalised),
/// over parameters `[w_1..w_d, b]` in standardised feature space.
pub struct LogisticObjective<'a> {
    x: &'a Design,
    y: &'a [f64],
    std: &'a Standardizer,
    l2: f64,
}

impl<'a> LogisticObjective<'a> {
    pub fn new(x: &'a Design, y: &'a [f64], std: &'a Standardizer, l2: f64) -> Self {
        LogisticObjective { x, y, std, l2 }
    }

    pub fn dim(&self) -> usize {
        self.x.cols() + 1
    }

    /// Raw-space weights and intercept equivalent to `params`.
    fn fold(&self, params: &[f64]) -> (Vec<f64>, f64) {
        let d = self.x.cols();
        let a: Vec<f64> = (0..d).map(|j| params[j] / self.std.scales[j]).collect();
        let c = params[d] - a.iter().zip(&self.std.means).map(|(a, m)| a * m).sum::<f64>();
        (a, c)
    }

    fn chunks(&self) -> Vec<(usize, usize)> {
        let n = self.x.rows();
        (0..n.div_ceil(CHUNK_ROWS))
            .map(|k| (k * CHUNK_ROWS, ((k + 1) * CHUNK_ROWS).min(n)))
            .collect()
    }

    fn penalty(&self, params: &[f64]) -> f64 {
        let d = self.x.cols();
        0.5 * self.l2 * params[..d].iter().map(|w| w * w).sum::<f64>()
    }

    pub fn value(&self, params: &[f64]) -> f64 {
        let (a, c) = self.fold(params);
        let partial: Vec<f64> = self
            .chunks()
            .into_par_iter()
            .map(|(lo, hi)| {
                let mut acc = 0.0;
                for i in lo..hi {
                    let s = score(self.x, i, &a, c);
                    acc += softplus(s) - self.y[i] * s;
                }
                acc
            })
            .collect();
        partial.iter().sum::<f64>() / self.x.rows() as f64 + self.penalty(params)
    }

    pub fn value_and_gradient(&self, params: &[f64]) -> (f64, Vec<f64>) {
        let d = self.x.cols();
        let (a, c) = self.fold(params);
        let partial: Vec<(f64, f64, Vec<f64>)> = self
            .chunks()
            .into_par_iter()
            .map(|(lo, hi)| {
                let mut loss = 0.0;
                let mut rsum = 0.0;
                let mut gx = vec![0.0; d];
                for i in lo..hi {
                    let s = score(self.x, i, &a, c);
                    loss += softplus(s) - self.y[i] * s;
                    let r = sigmoid(s) - self.y[i];
                    rsum += r;
                    let (idx, val) = self.x.row(i);
                    for (&j, &v) in idx.iter().zip(val) {
                        gx[j as usize] += r * v;
                    }
                }
                (loss, rsum, gx)
            })
            .collect();
        let mut loss = 0.0;
        let mut rsum = 0.0;
        let mut gx = vec![0.0; d];
        for (l, r, g) in partial {
            loss += l;
            rsum += r;
            for (acc, v) in gx.iter_mut().zip(g) {
                *acc += v;
            }
        }
        let n = self.x.rows() as f64;
        let mut grad = vec![0.0; d + 1];
        for j in 0..d {
            grad[j] = (gx[j] - self.std.means[j] * rsum) / (self.std.scales[j] * n) + self.l2 * params[j];
        }
        grad[d] = rsum / n;
        (loss / n + self.penalty(params), grad)
    }
}

#[inline]
fn score(x: &Design, i: usize, a: &[f64], c: f64) -> f64 {
    let (idx, val) = x.row(i);
    let mut s = c;
    for (&j, &v) in idx.iter().zip(val) {
        s += a[j as usize] * v;
    }
    s
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Solver {
    /// Limited-memory BFGS with Armijo backtracking.
    Lbfgs,
    /// Steepest descent with Armijo backtracking.
    GradientDescent,
}

#[derive(Clone, Debug)]
pub struct FitOptions {
    pub l2: f64,
    /// Stop when the gradient's max-norm is at or below this.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// `None` starts from zero; `Some(seed)` from small seeded noise.
    pub seed: Option<u64>,
    pub solver: Solver,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            l2: 1e-4,
            tolerance: 1e-6,
            max_iterations: 5000,
            seed: None,
            solver: Solver::Lbfgs,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitMetadata {
    pub iterations: usize,
    pub objective: f64,
    pub gradient_max_norm: f64,
    pub converged: bool,
    /// Objective after every accepted step, starting with the initial point.
    #[serde(skip)]
    pub trace: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub manifest: Vec<String>,
    pub means: Vec<f64>,
    pub scales: Vec<f64>,
    pub weights: Vec<f64>,
    pub bias: f64,
    pub l2: f64,
    pub metadata: FitMetadata,
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: String,
    version: u32,
    #[serde(flatten)]
    model: TrainedModel,
}

fn max_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Validate inputs, standardise, and minimise the regularised NLL.
///
/// `labels` are 1 for positive edges and 0 for negative ones. `manifest`
/// names the columns; pass an empty vector to get `f0, f1, ...`.
pub fn fit(x: &Design, labels: &[f64], opts: &FitOptions, manifest: Vec<String>) -> Result<TrainedModel> {
    if x.rows() == 0 {
        return Err(Error::EmptyTrainingSet);
    }
    if labels.len() != x.rows() {
        return Err(Error::DimensionMismatch {
            expected: x.rows(),
            actual: labels.len(),
        });
    }
    if let Some(&bad) = labels.iter().find(|&&l| l != 0.0 && l != 1.0) {
        return Err(Error::NonBinaryLabel(bad));
    }
    x.check_finite()?;
    let manifest = if manifest.is_empty() {
        (0..x.cols()).map(|j| format!("f{j}")).collect()
    } else if manifest.len() != x.cols() {
        return Err(Error::DimensionMismatch {
            expected: x.cols(),
            actual: manifest.len(),
        });
    } else {
        manifest
    };

    let std = Standardizer::fit(x);
    let obj = LogisticObjective::new(x, labels, &std, opts.l2);
    let d = x.cols();
    let mut params = vec![0.0; d + 1];
    if let Some(seed) = opts.seed {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for p in params.iter_mut() {
            *p = rng.random_range(-0.1..0.1);
        }
    }
    let meta = minimize(&obj, &mut params, opts);
    Ok(TrainedModel {
        manifest,
        means: std.means,
        scales: std.scales,
        weights: params[..d].to_vec(),
        bias: params[d],
        l2: opts.l2,
        metadata: meta,
    })
}

fn minimize(obj: &LogisticObjective<'_>, params: &mut [f64], opts: &FitOptions) -> FitMetadata {
    const MEMORY: usize = 10;
    const ARMIJO: f64 = 1e-4;
    const MAX_BACKTRACKS: usize = 60;

    let (mut f, mut g) = obj.value_and_gradient(params);
    let mut trace = vec![f];
    let mut history: Vec<(Vec<f64>, Vec<f64>, f64)> = Vec::new();
    let mut gd_step = 1.0;
    let mut iterations = 0;

    while iterations < opts.max_iterations && max_norm(&g) > opts.tolerance {
        let mut dir = match opts.solver {
            Solver::GradientDescent => g.iter().map(|v| -v).collect::<Vec<_>>(),
            Solver::Lbfgs => two_loop(&g, &history),
        };
        let mut slope = dot(&g, &dir);
        if slope >= 0.0 {
            history.clear();
            dir = g.iter().map(|v| -v).collect();
            slope = dot(&g, &dir);
        }
        let mut step = match opts.solver {
            Solver::Lbfgs if !history.is_empty() => 1.0,
            Solver::Lbfgs => (1.0 / max_norm(&g)).min(1.0),
            Solver::GradientDescent => gd_step,
        };
        let mut accepted = None;
        for _ in 0..MAX_BACKTRACKS {
            let trial: Vec<f64> = params.iter().zip(&dir).map(|(p, d)| p + step * d).collect();
            let ft = obj.value(&trial);
            if ft <= f + ARMIJO * step * slope {
                accepted = Some((trial, ft));
                break;
            }
            step *= 0.5;
        }
        let Some((trial, ft)) = accepted else {
            break;
        };
        let (_, gt) = obj.value_and_gradient(&trial);
        let s: Vec<f64> = trial.iter().zip(params.iter()).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = gt.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 * dot(&s, &s).sqrt() * dot(&y, &y).sqrt() {
            history.push((s, y, 1.0 / sy));
            if history.len() > MEMORY {
                history.remove(0);
            }
        }
        params.copy_from_slice(&trial);
        let improved = ft < f;
        f = ft;
        g = gt;
        trace.push(f);
        gd_step = step * 2.0;
        iterations += 1;
        if !improved {
            break;
        }
    }
    let gmax = max_norm(&g);
    FitMetadata {
        iterations,
        objective: f,
        gradient_max_norm: gmax,
        converged: gmax <= opts.tolerance,
        trace,
    }
}

/// L-BFGS two-loop recursion; returns the search direction.
fn two_loop(g: &[f64], history: &[(Vec<f64>, Vec<f64>, f64)]) -> Vec<f64> {
    let mut q: Vec<f64> = g.to_vec();
    let mut alphas = Vec::with_capacity(history.len());
    for (s, y, rho) in history.iter().rev() {
        let a = rho * dot(s, &q);
        for (qi, yi) in q.iter_mut().zip(y) {
            *qi -= a * yi;
        }
        alphas.push(a);
    }
    if let Some((s, y, _)) = history.last() {
        let gamma = dot(s, y) / dot(y, y);
        for qi in q.iter_mut() {
            *qi *= gamma;
        }
    }
    for ((s, y, rho), a) in history.iter().zip(alphas.into_iter().rev()) {
        let b = rho * dot(y, &q);
        for (qi, si) in q.iter_mut().zip(s) {
            *qi += (a - b) * si;
        }
    }
    q.iter().map(|v| -v).collect()
}

impl TrainedModel {
    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    fn check_row(&self, len: usize) -> Result<()> {
        if len != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: len,
            });
        }
        Ok(())
    }

    #[inline]
    fn score_dense(&self, row: &[f64]) -> f64 {
        let mut s = self.bias;
        for (((v, w), m), sc) in row.iter().zip(&self.weights).zip(&self.means).zip(&self.scales) {
            s += w * (v - m) / sc;
        }
        s
    }

    /// Probability that the edge is positive.
    pub fn predict_proba(&self, row: &[f64]) -> Result<f64> {
        self.check_row(row.len())?;
        if let Some(j) = row.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { row: 0, column: j });
        }
        Ok(sigmoid(self.score_dense(row)))
    }

    /// +1 iff the positive probability is at least `threshold`.
    pub fn predict_sign(&self, row: &[f64], threshold: f64) -> Result<Sign> {
        Ok(sign_for(self.predict_proba(row)?, threshold))
    }

    /// Probabilities for every row of a design matrix.
    pub fn predict_design(&self, x: &Design) -> Result<Vec<f64>> {
        self.check_row(x.cols())?;
        x.check_finite()?;
        let a: Vec<f64> = self.weights.iter().zip(&self.scales).map(|(w, s)| w / s).collect();
        let c = self.bias - a.iter().zip(&self.means).map(|(a, m)| a * m).sum::<f64>();
        Ok((0..x.rows())
            .into_par_iter()
            .with_min_len(CHUNK_ROWS)
            .map(|i| sigmoid(score(x, i, &a, c)))
            .collect())
    }

    pub fn to_json(&self) -> Result<String> {
        let file = ModelFile {
            format: MODEL_FORMAT.into(),
            version: MODEL_VERSION,
            model: self.clone(),
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    pub fn from_json(text: &str) -> Result<TrainedModel> {
        let file: ModelFile = serde_json::from_str(text)?;
        if file.format != MODEL_FORMAT || file.version != MODEL_VERSION {
            return Err(Error::ModelFormat(format!("{} v{}", file.format, file.version)));
        }
        let m = file.model;
        let d = m.weights.len();
        for len in [m.means.len(), m.scales.len(), m.manifest.len()] {
            if len != d {
                return Err(Error::DimensionMismatch { expected: d, actual: len });
            }
        }
        if m.scales.iter().any(|&s| s.is_nan() || s <= 0.0) {
            return Err(Error::ModelFormat("non-positive scale".into()));
        }
        Ok(m)
    }
}

pub fn sign_for(proba: f64, threshold: f64) -> Sign {
    if proba >= threshold {
        Sign::Positive
    } else {
        Sign::Negative
    }
}

/// Pick an L2 strength from `grid` by validation log-loss on a seeded split
/// of the training rows (`valid_fraction` held out). Ties go to the
/// earlier grid entry.
pub fn select_l2(x: &Design, labels: &[f64], grid: &[f64], valid_fraction: f64, seed: u64, base: &FitOptions) -> Result<f64> {
    use rand::seq::SliceRandom;
    let n = x.rows();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let n_valid = ((n as f64 * valid_fraction).round() as usize).clamp(1, n.saturating_sub(1).max(1));
    let (valid, train) = order.split_at(n_valid);
    let (mut valid, mut train) = (valid.to_vec(), train.to_vec());
    valid.sort_unstable();
    train.sort_unstable();
    if train.is_empty() {
        return Ok(base.l2);
    }
    let xt = x.select_rows(&train);
    let yt: Vec<f64> = train.iter().map(|&i| labels[i]).collect();
    let xv = x.select_rows(&valid);
    let yv: Vec<f64> = valid.iter().map(|&i| labels[i]).collect();
    let mut best = (f64::INFINITY, base.l2);
    for &l2 in grid {
        let m = fit(&xt, &yt, &FitOptions { l2, ..base.clone() }, Vec::new())?;
        let p = m.predict_design(&xv)?;
        let loss: f64 = p
            .iter()
            .zip(&yv)
            .map(|(&p, &y)| {
                let p = p.clamp(1e-15, 1.0 - 1e-15);
                -(y * p.ln() + (1.0 - y) * (1.0 - p).ln())
            })
            .sum::<f64>()
            / yv.len() as f64;
        if loss < best.0 {
            best = (loss, l2);
        }
    }
    Ok(best.1)
}
