//! Class-weighted, L1-regularized logistic regression.
//!
//! The objective is
//!
//! ```text
//! F(w, b) = Σᵢ cᵢ · ℓ(yᵢ, w·xᵢ + b) + λ‖w‖₁
//! ```
//!
//! where `ℓ` is the logistic log-loss and `cᵢ = W` for positive instances,
//! `1` otherwise. The bias is not penalized. Training is a monotone
//! accelerated proximal-gradient method with backtracking, started from
//! zero. Columns are centered inside the solver and steps are taken in a
//! diagonal metric built from per-coordinate curvature bounds, so the bias
//! and dense columns do not throttle the step length of the sparse term
//! columns.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::compute_metrics;
use crate::features::FeatureVector;

/// Sparse vector as `(index, value)` pairs.
pub type SparseVector = Vec<(usize, f64)>;

/// Initial step length tried by the line search.
pub const INITIAL_STEP: f64 = 1.0;
/// Step shrink factor on a failed line-search test.
pub const STEP_SHRINK: f64 = 0.5;
/// Sufficient-decrease constant for accepting an accelerated step.
pub const SUFFICIENT_DECREASE: f64 = 1e-4;

/// Labelled instances stored row-compressed.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Dataset {
    dim: usize,
    offsets: Vec<usize>,
    indices: Vec<u32>,
    values: Vec<f64>,
    labels: Vec<bool>,
}

impl Dataset {
    pub fn new(dim: usize) -> Self {
        Dataset {
            dim,
            offsets: vec![0],
            ..Default::default()
        }
    }

    /// Appends an instance. Entries must have indices below `dim`.
    pub fn push(&mut self, x: &[(usize, f64)], label: bool) -> Result<()> {
        if let Some(&(i, _)) = x.iter().find(|(i, _)| *i >= self.dim) {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: i + 1,
            });
        }
        for &(i, v) in x {
            self.indices.push(i as u32);
            self.values.push(v);
        }
        self.offsets.push(self.indices.len());
        self.labels.push(label);
        Ok(())
    }

    pub fn from_rows<'a>(
        dim: usize,
        rows: impl IntoIterator<Item = (&'a [(usize, f64)], bool)>,
    ) -> Result<Self> {
        let mut d = Dataset::new(dim);
        for (x, y) in rows {
            d.push(x, y)?;
        }
        Ok(d)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[bool] {
        &self.labels
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.offsets[i]..self.offsets[i + 1];
        self.indices[span.clone()]
            .iter()
            .zip(&self.values[span])
            .map(|(&j, &v)| (j as usize, v))
    }

    fn dot(&self, i: usize, w: &[f64]) -> f64 {
        let span = self.offsets[i]..self.offsets[i + 1];
        self.indices[span.clone()]
            .iter()
            .zip(&self.values[span])
            .map(|(&j, &v)| w[j as usize] * v)
            .sum()
    }

    fn check_finite(&self) -> Result<()> {
        for i in 0..self.len() {
            if self.row(i).any(|(_, v)| !v.is_finite()) {
                return Err(Error::NonFinite(i));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    /// L1 strength λ.
    pub lambda: f64,
    /// Loss multiplier W applied to positive instances.
    pub class_weight: f64,
    pub max_iters: usize,
    /// Stop once an accepted step lowers the objective by less than this
    /// fraction.
    pub tolerance: f64,
    /// Unused by the deterministic solver; kept so configs round-trip.
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            lambda: 1e-3,
            class_weight: 1.0,
            max_iters: 500,
            tolerance: 1e-6,
            seed: 0,
        }
    }
}

impl TrainConfig {
    /// Defaults with λ = 1 / number of training instances.
    pub fn for_instances(n: usize) -> Self {
        TrainConfig {
            lambda: 1.0 / n.max(1) as f64,
            ..Default::default()
        }
    }

    pub fn with_class_weight(self, w: f64) -> Self {
        TrainConfig {
            class_weight: w,
            ..self
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = self.lambda >= 0.0
            && self.lambda.is_finite()
            && self.class_weight > 0.0
            && self.class_weight.is_finite()
            && self.max_iters > 0
            && self.tolerance > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("bad training config {self:?}")))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "ParamsRepr", into = "ParamsRepr")]
pub struct ModelParams {
    pub weights: Vec<f64>,
    pub bias: f64,
}

#[derive(Serialize, Deserialize)]
struct ParamsRepr {
    dim: usize,
    bias: f64,
    weights: Vec<(usize, f64)>,
}

impl From<ModelParams> for ParamsRepr {
    fn from(p: ModelParams) -> Self {
        ParamsRepr {
            dim: p.weights.len(),
            bias: p.bias,
            weights: p.nonzero().collect(),
        }
    }
}

impl From<ParamsRepr> for ModelParams {
    fn from(r: ParamsRepr) -> Self {
        let mut weights = vec![0.0; r.dim];
        for (i, v) in r.weights {
            if i < r.dim {
                weights[i] = v;
            }
        }
        ModelParams {
            weights,
            bias: r.bias,
        }
    }
}

impl ModelParams {
    pub fn zeros(dim: usize) -> Self {
        ModelParams {
            weights: vec![0.0; dim],
            bias: 0.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn nonzero(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.weights
            .iter()
            .enumerate()
            .filter(|(_, w)| **w != 0.0)
            .map(|(i, w)| (i, *w))
    }

    pub fn n_nonzero(&self) -> usize {
        self.nonzero().count()
    }

    pub fn l1(&self) -> f64 {
        self.weights.iter().map(|w| w.abs()).sum()
    }

    fn margins(&self, data: &Dataset) -> Vec<f64> {
        (0..data.len())
            .map(|i| data.dot(i, &self.weights) + self.bias)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub probability: f64,
    pub label: bool,
}

impl Prediction {
    pub fn from_margin(z: f64) -> Self {
        let probability = sigmoid(z);
        Prediction {
            probability,
            label: probability >= 0.5,
        }
    }
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// ln(1 + e^z) without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

fn instance_weight(label: bool, class_weight: f64) -> f64 {
    if label {
        class_weight
    } else {
        1.0
    }
}

fn smooth_from_margins(margins: &[f64], labels: &[bool], class_weight: f64) -> f64 {
    margins
        .iter()
        .zip(labels)
        .map(|(&z, &y)| {
            // -log σ(z) = softplus(-z); -log(1 - σ(z)) = softplus(z)
            let loss = if y { softplus(-z) } else { softplus(z) };
            instance_weight(y, class_weight) * loss
        })
        .sum()
}

fn gradient_from_margins(
    margins: &[f64],
    data: &Dataset,
    class_weight: f64,
) -> (Vec<f64>, f64) {
    let mut gw = vec![0.0; data.dim()];
    let mut gb = 0.0;
    for (i, (&z, &y)) in margins.iter().zip(data.labels()).enumerate() {
        let r = instance_weight(y, class_weight) * (sigmoid(z) - if y { 1.0 } else { 0.0 });
        gb += r;
        for (j, v) in data.row(i) {
            gw[j] += r * v;
        }
    }
    (gw, gb)
}

/// Weighted negative log-likelihood plus λ‖w‖₁.
pub fn objective(params: &ModelParams, data: &Dataset, cfg: &TrainConfig) -> f64 {
    smooth_from_margins(&params.margins(data), data.labels(), cfg.class_weight)
        + cfg.lambda * params.l1()
}

/// Gradient of the weighted log-loss alone (no L1 term), as
/// `(weight gradient, bias gradient)`.
pub fn smooth_gradient(params: &ModelParams, data: &Dataset, cfg: &TrainConfig) -> (Vec<f64>, f64) {
    gradient_from_margins(&params.margins(data), data, cfg.class_weight)
}

/// Proximal operator of `t·|v|`.
pub fn soft_threshold(v: f64, t: f64) -> f64 {
    debug_assert!(t >= 0.0);
    if v > t {
        v - t
    } else if v < -t {
        v + t
    } else {
        0.0
    }
}

/// What happened during a training run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainTrace {
    /// Objective after each accepted step, starting with the zero model.
    pub objectives: Vec<f64>,
    pub iterations: usize,
    /// Accelerated steps rejected by the monotonicity test.
    pub restarts: usize,
    pub converged: bool,
    pub final_step: f64,
}

pub fn train(data: &Dataset, cfg: &TrainConfig) -> Result<ModelParams> {
    train_with_trace(data, cfg).map(|(p, _)| p)
}

pub fn train_with_trace(data: &Dataset, cfg: &TrainConfig) -> Result<(ModelParams, TrainTrace)> {
    cfg.validate()?;
    data.check_finite()?;
    let n_pos = data.labels().iter().filter(|&&y| y).count();
    if n_pos == 0 || n_pos == data.len() {
        return Err(Error::SingleClass);
    }

    let lambda = cfg.lambda;
    let labels = data.labels();
    let penalized = |p: &ModelParams, smooth: f64| smooth + lambda * p.l1();
    let metric = Metric::new(data, cfg.class_weight);

    // iterates hold the centered bias b + μ·w; see `Metric`
    let mut x = ModelParams::zeros(data.dim());
    let mut x_margins = metric.margins(&x, data);
    let mut x_obj = penalized(&x, smooth_from_margins(&x_margins, labels, cfg.class_weight));
    let mut y = x.clone();
    let mut y_margins = x_margins.clone();
    let mut t = 1.0_f64;
    let mut step = INITIAL_STEP;
    let mut trace = TrainTrace {
        objectives: vec![x_obj],
        iterations: 0,
        restarts: 0,
        converged: false,
        final_step: step,
    };

    while trace.iterations < cfg.max_iters {
        trace.iterations += 1;
        let y_smooth = smooth_from_margins(&y_margins, labels, cfg.class_weight);
        let (gw, gb) = gradient_from_margins(&y_margins, data, cfg.class_weight);
        let gw: Vec<f64> = gw.iter().zip(&metric.mean).map(|(g, m)| g - m * gb).collect();

        // backtracking on the quadratic upper bound at y
        let (candidate, cand_margins, cand_smooth) = loop {
            let weights: Vec<f64> = y
                .weights
                .iter()
                .zip(&gw)
                .zip(&metric.weights)
                .map(|((&w, &g), &h)| soft_threshold(w - step * g / h, step * lambda / h))
                .collect();
            let cand = ModelParams {
                weights,
                bias: y.bias - step * gb / metric.bias,
            };
            let margins = metric.margins(&cand, data);
            let smooth = smooth_from_margins(&margins, labels, cfg.class_weight);
            let mut linear = (cand.bias - y.bias) * gb;
            for ((c, yw), g) in cand.weights.iter().zip(&y.weights).zip(&gw) {
                linear += (c - yw) * g;
            }
            let sq = metric.dist_sq(&cand, &y);
            if smooth <= y_smooth + linear + sq / (2.0 * step) || step < 1e-300 {
                break (cand, margins, smooth);
            }
            step *= STEP_SHRINK;
        };

        let cand_obj = penalized(&candidate, cand_smooth);
        let moved = metric.dist_sq(&candidate, &x);
        if cand_obj <= x_obj - SUFFICIENT_DECREASE * moved / (2.0 * step) {
            let decrease = x_obj - cand_obj;
            let t_next = (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0;
            let momentum = (t - 1.0) / t_next;
            let x_prev = std::mem::replace(&mut x, candidate);
            let prev_margins = std::mem::replace(&mut x_margins, cand_margins);
            x_obj = cand_obj;
            trace.objectives.push(x_obj);
            y = extrapolate(&x, &x_prev, momentum);
            // margins are affine in the parameters
            y_margins = x_margins
                .iter()
                .zip(&prev_margins)
                .map(|(a, b)| a + momentum * (a - b))
                .collect();
            t = t_next;
            if decrease <= cfg.tolerance * x_obj.abs().max(f64::MIN_POSITIVE) {
                trace.converged = true;
                break;
            }
        } else {
            // restart momentum from the last accepted iterate
            trace.restarts += 1;
            y = x.clone();
            y_margins = x_margins.clone();
            t = 1.0;
        }
    }
    trace.final_step = step;
    Ok((metric.uncenter(x), trace))
}

/// Coordinates and metric for the proximal steps.
///
/// Columns are centered at their weighted means μ: the solver works with
/// margins `w·(x − μ) + b̃`, which is the same model with `b = b̃ − μ·w`.
/// Only the bias moves, and the bias is unpenalized, so the problem is
/// unchanged; dense all-positive columns just stop pulling against the
/// bias. Steps use per-coordinate curvature bounds `Σᵢ cᵢ (xᵢⱼ − μⱼ)² / 4`.
struct Metric {
    mean: Vec<f64>,
    weights: Vec<f64>,
    bias: f64,
}

impl Metric {
    fn new(data: &Dataset, class_weight: f64) -> Self {
        let mut sum = vec![0.0; data.dim()];
        let mut sq = vec![0.0; data.dim()];
        let mut total = 0.0;
        for (i, &y) in data.labels().iter().enumerate() {
            let c = instance_weight(y, class_weight);
            total += c;
            for (j, v) in data.row(i) {
                sum[j] += c * v;
                sq[j] += c * v * v;
            }
        }
        let mean: Vec<f64> = sum.iter().map(|s| s / total).collect();
        let weights = sum
            .iter()
            .zip(&sq)
            .zip(&mean)
            .map(|((&s, &q), &m)| {
                let spread = q - s * m;
                // near-constant columns keep the uncentered bound
                if spread > 1e-9 * q {
                    spread / 4.0
                } else if q > 0.0 {
                    q / 4.0
                } else {
                    1.0
                }
            })
            .collect();
        Metric {
            mean,
            weights,
            bias: total / 4.0,
        }
    }

    fn offset(&self, p: &ModelParams) -> f64 {
        p.bias - self.mean.iter().zip(&p.weights).map(|(m, w)| m * w).sum::<f64>()
    }

    fn margins(&self, p: &ModelParams, data: &Dataset) -> Vec<f64> {
        let b = self.offset(p);
        (0..data.len()).map(|i| data.dot(i, &p.weights) + b).collect()
    }

    fn uncenter(&self, p: ModelParams) -> ModelParams {
        ModelParams {
            bias: self.offset(&p),
            weights: p.weights,
        }
    }

    fn dist_sq(&self, a: &ModelParams, b: &ModelParams) -> f64 {
        a.weights
            .iter()
            .zip(&b.weights)
            .zip(&self.weights)
            .map(|((p, q), h)| h * (p - q).powi(2))
            .sum::<f64>()
            + self.bias * (a.bias - b.bias).powi(2)
    }
}

fn extrapolate(x: &ModelParams, prev: &ModelParams, momentum: f64) -> ModelParams {
    ModelParams {
        weights: x
            .weights
            .iter()
            .zip(&prev.weights)
            .map(|(a, b)| a + momentum * (a - b))
            .collect(),
        bias: x.bias + momentum * (x.bias - prev.bias),
    }
}

/// Scores a sparse input. Indices at or beyond the model dimension are a
/// dimension mismatch.
pub fn predict_sparse(params: &ModelParams, x: &[(usize, f64)]) -> Result<Prediction> {
    let mut z = params.bias;
    for &(i, v) in x {
        let w = params.weights.get(i).ok_or(Error::DimensionMismatch {
            expected: params.dim(),
            got: i + 1,
        })?;
        z += w * v;
    }
    Ok(Prediction::from_margin(z))
}

pub fn predict(params: &ModelParams, x: &FeatureVector) -> Result<Prediction> {
    if x.dim() != params.dim() {
        return Err(Error::DimensionMismatch {
            expected: params.dim(),
            got: x.dim(),
        });
    }
    predict_sparse(params, &x.to_sparse())
}

pub fn predict_dataset(params: &ModelParams, data: &Dataset) -> Vec<Prediction> {
    params
        .margins(data)
        .into_iter()
        .map(Prediction::from_margin)
        .collect()
}

/// Log-spaced class-weight grid: `min, min·factor, …` up to `max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WGrid {
    pub min: f64,
    pub max: f64,
    pub factor: f64,
    /// Also try best·√factor and best/√factor after the coarse pass.
    pub refine: bool,
}

impl Default for WGrid {
    fn default() -> Self {
        WGrid {
            min: 2f64.powi(-4),
            max: 2f64.powi(8),
            factor: 2.0,
            refine: true,
        }
    }
}

impl WGrid {
    pub fn values(&self) -> Vec<f64> {
        let mut out = Vec::new();
        let mut k = 0;
        loop {
            let w = self.min * self.factor.powi(k);
            if w > self.max * (1.0 + 1e-12) {
                break;
            }
            out.push(w);
            k += 1;
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        if self.min > 0.0 && self.max >= self.min && self.factor > 1.0 {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("bad W grid {self:?}")))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tuning {
    pub w: f64,
    pub f1: f64,
    /// Every `(W, validation F1)` evaluated, in evaluation order.
    pub evaluated: Vec<(f64, f64)>,
}

fn better(a: (f64, f64), b: (f64, f64)) -> bool {
    // higher F1, then W closer to 1 on a log scale, then smaller W
    if a.1 != b.1 {
        return a.1 > b.1;
    }
    let (da, db) = (a.0.ln().abs(), b.0.ln().abs());
    if da != db {
        return da < db;
    }
    a.0 < b.0
}

/// Picks the class weight maximizing validation F1 over `grid`.
pub fn tune_class_weight(
    train_data: &Dataset,
    valid: &Dataset,
    cfg: &TrainConfig,
    grid: &WGrid,
) -> Result<Tuning> {
    grid.validate()?;
    if !valid.labels().iter().any(|&y| y) {
        return Err(Error::NoPositives);
    }
    let score = |w: f64| -> Result<(f64, f64)> {
        let params = train(train_data, &cfg.with_class_weight(w))?;
        let preds: Vec<bool> = predict_dataset(&params, valid).iter().map(|p| p.label).collect();
        Ok((w, compute_metrics(&preds, valid.labels())?.f1))
    };
    let mut evaluated: Vec<(f64, f64)> = grid
        .values()
        .into_par_iter()
        .map(score)
        .collect::<Result<_>>()?;
    let pick = |ev: &[(f64, f64)]| {
        ev.iter()
            .copied()
            .reduce(|best, c| if better(c, best) { c } else { best })
            .unwrap()
    };
    let mut best = pick(&evaluated);
    if grid.refine {
        let half = grid.factor.sqrt();
        let extra: Vec<(f64, f64)> = [best.0 / half, best.0 * half]
            .into_par_iter()
            .map(score)
            .collect::<Result<_>>()?;
        evaluated.extend(extra);
        best = pick(&evaluated);
    }
    Ok(Tuning {
        w: best.0,
        f1: best.1,
        evaluated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_positive(dim: usize) -> Dataset {
        let mut d = Dataset::new(dim);
        d.push(&[(0, 1.0)], true).unwrap();
        d
    }

    #[test]
    fn objective_at_zero() {
        let d = one_positive(2);
        let p = ModelParams::zeros(2);
        let cfg = TrainConfig {
            lambda: 0.0,
            ..Default::default()
        };
        assert!((objective(&p, &d, &cfg) - 2f64.ln()).abs() < 1e-12);
        let cfg3 = cfg.with_class_weight(3.0);
        assert!((objective(&p, &d, &cfg3) - 3.0 * 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn objective_adds_l1() {
        let d = one_positive(2);
        let p = ModelParams {
            weights: vec![0.5, -1.5],
            bias: 0.2,
        };
        let base = TrainConfig {
            lambda: 0.0,
            ..Default::default()
        };
        let reg = TrainConfig {
            lambda: 0.7,
            ..Default::default()
        };
        let diff = objective(&p, &d, &reg) - objective(&p, &d, &base);
        assert!((diff - 0.7 * 2.0).abs() < 1e-12);
    }

    #[test]
    fn soft_threshold_cases() {
        assert!((soft_threshold(0.5, 0.2) - 0.3).abs() < 1e-15);
        assert_eq!(soft_threshold(-0.1, 0.2), 0.0);
        assert_eq!(soft_threshold(-0.7, 0.0), -0.7);
        assert_eq!(soft_threshold(1.25, 0.0), 1.25);
    }

    #[test]
    fn unit_weight_matches_unweighted_gradient() {
        let mut d = Dataset::new(2);
        d.push(&[(0, 1.0), (1, -2.0)], true).unwrap();
        d.push(&[(1, 0.5)], false).unwrap();
        let p = ModelParams {
            weights: vec![0.3, -0.1],
            bias: 0.05,
        };
        let (gw, gb) = smooth_gradient(&p, &d, &TrainConfig::default());
        let mut ew = [0.0; 2];
        let mut eb = 0.0;
        for i in 0..2 {
            let z: f64 = d.row(i).map(|(j, v)| p.weights[j] * v).sum::<f64>() + p.bias;
            let r = sigmoid(z) - if d.labels()[i] { 1.0 } else { 0.0 };
            eb += r;
            for (j, v) in d.row(i) {
                ew[j] += r * v;
            }
        }
        assert!((gb - eb).abs() < 1e-15);
        assert!((gw[0] - ew[0]).abs() < 1e-15 && (gw[1] - ew[1]).abs() < 1e-15);
    }

    #[test]
    fn saturated_gradient_vanishes() {
        let mut d = Dataset::new(1);
        d.push(&[(0, 1.0)], true).unwrap();
        d.push(&[(0, -1.0)], false).unwrap();
        let p = ModelParams {
            weights: vec![60.0],
            bias: 0.0,
        };
        let (gw, gb) = smooth_gradient(&p, &d, &TrainConfig::default());
        assert!(gw[0].abs() < 1e-20 && gb.abs() < 1e-20);
    }

    #[test]
    fn predict_edge_cases() {
        let p = ModelParams::zeros(3);
        let pr = predict_sparse(&p, &[(1, 2.0)]).unwrap();
        assert_eq!(pr.probability, 0.5);
        assert!(pr.label);
        let p = ModelParams {
            weights: vec![0.0; 3],
            bias: 10.0,
        };
        assert!(predict_sparse(&p, &[]).unwrap().probability > 0.9999);
        assert!(matches!(
            predict_sparse(&p, &[(3, 1.0)]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn huge_lambda_zeroes_weights_and_fits_prior() {
        let mut d = Dataset::new(2);
        for i in 0..10 {
            d.push(&[(0, i as f64 / 10.0), (1, 1.0)], i < 3).unwrap();
        }
        let cfg = TrainConfig {
            lambda: 1e6,
            class_weight: 2.0,
            max_iters: 2000,
            tolerance: 1e-12,
            seed: 0,
        };
        let p = train(&d, &cfg).unwrap();
        assert!(p.weights.iter().all(|&w| w == 0.0));
        // weighted prior: σ(b) = W·P / (W·P + N) = 6/13
        assert!((sigmoid(p.bias) - 6.0 / 13.0).abs() < 1e-6, "{}", sigmoid(p.bias));
    }

    #[test]
    fn single_class_rejected() {
        let mut d = Dataset::new(1);
        d.push(&[(0, 1.0)], false).unwrap();
        assert!(matches!(train(&d, &TrainConfig::default()), Err(Error::SingleClass)));
        let mut d = Dataset::new(1);
        d.push(&[(0, f64::NAN)], false).unwrap();
        d.push(&[(0, 1.0)], true).unwrap();
        assert!(matches!(train(&d, &TrainConfig::default()), Err(Error::NonFinite(0))));
    }

    #[test]
    fn grid_spans_observed_weights() {
        let g = WGrid::default().values();
        assert_eq!(g.len(), 13);
        assert!(g[0] <= 0.25 && *g.last().unwrap() >= 256.0);
    }

    #[test]
    fn tie_break_prefers_weight_near_one() {
        assert!(better((1.0, 0.5), (4.0, 0.5)));
        assert!(better((0.5, 0.5), (4.0, 0.5)));
        assert!(better((8.0, 0.6), (1.0, 0.5)));
    }

    #[test]
    fn params_serialize_sparse() {
        let p = ModelParams {
            weights: vec![0.0, 1.5, 0.0],
            bias: -0.5,
        };
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"dim":3,"bias":-0.5,"weights":[[1,1.5]]}"#);
        assert_eq!(serde_json::from_str::<ModelParams>(&s).unwrap(), p);
    }
}
