//! Two-layer perceptron classifier trained with Adam on mean cross-entropy,
//! plus the stratified k-fold evaluation protocol.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MlpError {
    #[error("shape mismatch: expected {expected}, got {got}")]
    ShapeMismatch { expected: String, got: String },
    #[error("label {label} out of range for {classes} classes")]
    LabelOutOfRange { label: usize, classes: usize },
    #[error("training data holds a single class")]
    DegenerateData,
    #[error("{samples} samples cannot fill {folds} folds")]
    TooFewSamples { samples: usize, folds: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

fn shape_err(expected: impl ToString, got: impl ToString) -> MlpError {
    MlpError::ShapeMismatch {
        expected: expected.to_string(),
        got: got.to_string(),
    }
}

/// Row-major matrix of reals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self, MlpError> {
        if data.len() != rows * cols {
            return Err(shape_err(
                format!("{} values", rows * cols),
                format!("{} values", data.len()),
            ));
        }
        Ok(DenseMatrix { rows, cols, data })
    }

    /// All rows must have the same length. An empty list gives a 0x0 matrix.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, MlpError> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(shape_err(
                    format!("{cols} columns"),
                    format!("{} in row {i}", r.len()),
                ));
            }
            data.extend_from_slice(r);
        }
        Ok(DenseMatrix {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn select_rows(&self, idx: &[usize]) -> DenseMatrix {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        DenseMatrix {
            rows: idx.len(),
            cols: self.cols,
            data,
        }
    }

    /// `self · x` for a column vector `x`.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|r| self.row(r).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Uniform in `±1/√cols`.
    pub fn random_uniform(rows: usize, cols: usize, rng: &mut impl Rng) -> Self {
        let bound = 1.0 / (cols.max(1) as f64).sqrt();
        let data = (0..rows * cols)
            .map(|_| rng.gen_range(-bound..bound))
            .collect();
        DenseMatrix { rows, cols, data }
    }
}

/// Parameters of `logits = W2 · relu(W1 · x + b1) + b2`.
///
/// Also used to hold gradients and optimizer moments of the same shape.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpParams {
    pub w1: DenseMatrix,
    pub b1: Vec<f64>,
    pub w2: DenseMatrix,
    pub b2: Vec<f64>,
}

pub const HIDDEN_WIDTH: usize = 64;

impl MlpParams {
    pub fn new_random(input: usize, hidden: usize, classes: usize, rng: &mut impl Rng) -> Self {
        let w1 = DenseMatrix::random_uniform(hidden, input, rng);
        let bound1 = 1.0 / (input.max(1) as f64).sqrt();
        let b1 = (0..hidden)
            .map(|_| rng.gen_range(-bound1..bound1))
            .collect();
        let w2 = DenseMatrix::random_uniform(classes, hidden, rng);
        let bound2 = 1.0 / (hidden.max(1) as f64).sqrt();
        let b2 = (0..classes)
            .map(|_| rng.gen_range(-bound2..bound2))
            .collect();
        MlpParams { w1, b1, w2, b2 }
    }

    pub fn zeros_like(other: &MlpParams) -> Self {
        MlpParams {
            w1: DenseMatrix::zeros(other.w1.rows, other.w1.cols),
            b1: vec![0.0; other.b1.len()],
            w2: DenseMatrix::zeros(other.w2.rows, other.w2.cols),
            b2: vec![0.0; other.b2.len()],
        }
    }

    pub fn input_width(&self) -> usize {
        self.w1.cols
    }

    pub fn hidden_width(&self) -> usize {
        self.w1.rows
    }

    pub fn classes(&self) -> usize {
        self.w2.rows
    }

    fn check(&self) -> Result<(), MlpError> {
        let (h, c) = (self.w1.rows, self.w2.rows);
        if self.b1.len() != h || self.w2.cols != h || self.b2.len() != c {
            return Err(shape_err(
                format!("b1[{h}], w2[{c}x{h}], b2[{c}]"),
                format!(
                    "b1[{}], w2[{}x{}], b2[{}]",
                    self.b1.len(),
                    self.w2.rows,
                    self.w2.cols,
                    self.b2.len()
                ),
            ));
        }
        Ok(())
    }

    /// Flat views of the four tensors, in a fixed order.
    pub fn slices(&self) -> [&[f64]; 4] {
        [&self.w1.data, &self.b1, &self.w2.data, &self.b2]
    }

    pub fn slices_mut(&mut self) -> [&mut [f64]; 4] {
        [
            &mut self.w1.data,
            &mut self.b1,
            &mut self.w2.data,
            &mut self.b2,
        ]
    }
}

struct ForwardCache {
    hidden: DenseMatrix,
    logits: DenseMatrix,
}

fn forward_cached(p: &MlpParams, x: &DenseMatrix) -> Result<ForwardCache, MlpError> {
    p.check()?;
    if x.cols != p.input_width() {
        return Err(shape_err(
            format!("{} input columns", p.input_width()),
            x.cols,
        ));
    }
    let (h, c) = (p.hidden_width(), p.classes());
    let mut hidden = DenseMatrix::zeros(x.rows, h);
    let mut logits = DenseMatrix::zeros(x.rows, c);
    for r in 0..x.rows {
        let xr = x.row(r);
        for j in 0..h {
            let z: f64 = p.w1.row(j).iter().zip(xr).map(|(w, v)| w * v).sum::<f64>() + p.b1[j];
            hidden.set(r, j, z.max(0.0));
        }
        for k in 0..c {
            let z: f64 =
                p.w2.row(k)
                    .iter()
                    .zip(hidden.row(r))
                    .map(|(w, v)| w * v)
                    .sum::<f64>()
                    + p.b2[k];
            logits.set(r, k, z);
        }
    }
    Ok(ForwardCache { hidden, logits })
}

/// Logits for every row of `x`.
pub fn mlp_forward(p: &MlpParams, x: &DenseMatrix) -> Result<DenseMatrix, MlpError> {
    Ok(forward_cached(p, x)?.logits)
}

fn log_softmax(row: &[f64]) -> Vec<f64> {
    let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lse = max + row.iter().map(|z| (z - max).exp()).sum::<f64>().ln();
    row.iter().map(|z| z - lse).collect()
}

fn check_labels(labels: &[usize], rows: usize, classes: usize) -> Result<(), MlpError> {
    if labels.len() != rows {
        return Err(shape_err(format!("{rows} labels"), labels.len()));
    }
    if let Some(&label) = labels.iter().find(|&&l| l >= classes) {
        return Err(MlpError::LabelOutOfRange { label, classes });
    }
    Ok(())
}

/// Mean cross-entropy of the batch.
pub fn mlp_loss(p: &MlpParams, x: &DenseMatrix, labels: &[usize]) -> Result<f64, MlpError> {
    let logits = mlp_forward(p, x)?;
    check_labels(labels, x.rows, p.classes())?;
    if x.rows == 0 {
        return Ok(0.0);
    }
    let total: f64 = (0..x.rows)
        .map(|r| -log_softmax(logits.row(r))[labels[r]])
        .sum();
    Ok(total / x.rows as f64)
}

/// Exact gradients of the mean cross-entropy, and the loss itself.
pub fn mlp_backward(
    p: &MlpParams,
    x: &DenseMatrix,
    labels: &[usize],
) -> Result<(MlpParams, f64), MlpError> {
    let cache = forward_cached(p, x)?;
    check_labels(labels, x.rows, p.classes())?;
    let mut grad = MlpParams::zeros_like(p);
    if x.rows == 0 {
        return Ok((grad, 0.0));
    }
    let (h, c) = (p.hidden_width(), p.classes());
    let scale = 1.0 / x.rows as f64;
    let mut loss = 0.0;
    let mut d_hidden = vec![0.0; h];
    for r in 0..x.rows {
        let logp = log_softmax(cache.logits.row(r));
        loss -= logp[labels[r]];
        // dL/dlogits = softmax - onehot, averaged.
        let d_logits: Vec<f64> = (0..c)
            .map(|k| (logp[k].exp() - f64::from(u8::from(k == labels[r]))) * scale)
            .collect();
        let hr = cache.hidden.row(r);
        d_hidden.iter_mut().for_each(|d| *d = 0.0);
        for k in 0..c {
            grad.b2[k] += d_logits[k];
            let wrow = &mut grad.w2.data[k * h..(k + 1) * h];
            for j in 0..h {
                wrow[j] += d_logits[k] * hr[j];
                d_hidden[j] += d_logits[k] * p.w2.get(k, j);
            }
        }
        let xr = x.row(r);
        let input = p.input_width();
        for j in 0..h {
            if hr[j] <= 0.0 {
                continue;
            }
            let d = d_hidden[j];
            grad.b1[j] += d;
            let wrow = &mut grad.w1.data[j * input..(j + 1) * input];
            for (w, v) in wrow.iter_mut().zip(xr) {
                *w += d * v;
            }
        }
    }
    Ok((grad, loss * scale))
}

pub fn predict(p: &MlpParams, x: &DenseMatrix) -> Result<Vec<usize>, MlpError> {
    let logits = mlp_forward(p, x)?;
    Ok((0..logits.rows)
        .map(|r| {
            let row = logits.row(r);
            // First maximum wins ties.
            (0..row.len()).fold(0, |best, k| if row[k] > row[best] { k } else { best })
        })
        .collect())
}

fn accuracy_of(pred: &[usize], labels: &[usize]) -> f64 {
    if labels.is_empty() {
        return 0.0;
    }
    pred.iter().zip(labels).filter(|(a, b)| a == b).count() as f64 / labels.len() as f64
}

/// Adam with the usual constants.
#[derive(Debug, Clone)]
pub struct Adam {
    lr: f64,
    beta1: f64,
    beta2: f64,
    eps: f64,
    t: i32,
    m: MlpParams,
    v: MlpParams,
}

impl Adam {
    pub fn new(params: &MlpParams, lr: f64) -> Self {
        Adam {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            t: 0,
            m: MlpParams::zeros_like(params),
            v: MlpParams::zeros_like(params),
        }
    }

    pub fn step(&mut self, params: &mut MlpParams, grad: &MlpParams) {
        self.t += 1;
        let c1 = 1.0 - self.beta1.powi(self.t);
        let c2 = 1.0 - self.beta2.powi(self.t);
        let (b1, b2, lr, eps) = (self.beta1, self.beta2, self.lr, self.eps);
        for (((p, g), m), v) in params
            .slices_mut()
            .into_iter()
            .zip(grad.slices())
            .zip(self.m.slices_mut())
            .zip(self.v.slices_mut())
        {
            for i in 0..p.len() {
                m[i] = b1 * m[i] + (1.0 - b1) * g[i];
                v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
                p[i] -= lr * (m[i] / c1) / ((v[i] / c2).sqrt() + eps);
            }
        }
    }
}

/// Per-column standardization with statistics fit on a training split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Standardizer {
    /// Columns with zero spread keep a divisor of 1.
    pub fn fit(x: &DenseMatrix) -> Self {
        let n = x.rows.max(1) as f64;
        let mut mean = vec![0.0; x.cols];
        for r in 0..x.rows {
            for (m, v) in mean.iter_mut().zip(x.row(r)) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut var = vec![0.0; x.cols];
        for r in 0..x.rows {
            for ((s, v), m) in var.iter_mut().zip(x.row(r)).zip(&mean) {
                *s += (v - m) * (v - m);
            }
        }
        let std = var
            .into_iter()
            .map(|s| {
                let sd = (s / n).sqrt();
                if sd > 1e-12 {
                    sd
                } else {
                    1.0
                }
            })
            .collect();
        Standardizer { mean, std }
    }

    pub fn apply(&self, x: &DenseMatrix) -> DenseMatrix {
        let mut out = x.clone();
        for r in 0..x.rows {
            let row = &mut out.data[r * x.cols..(r + 1) * x.cols];
            for ((v, m), s) in row.iter_mut().zip(&self.mean).zip(&self.std) {
                *v = (*v - m) / s;
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub batch_size: usize,
    pub max_epochs: usize,
    pub patience: usize,
    pub seed: u64,
    pub validation_fraction: f64,
    pub hidden: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 0.001,
            batch_size: 32,
            max_epochs: 100,
            patience: 15,
            seed: 0,
            validation_fraction: 0.10,
            hidden: HIDDEN_WIDTH,
        }
    }
}

impl TrainConfig {
    fn check(&self) -> Result<(), MlpError> {
        let bad = |what: &str| Err(MlpError::InvalidConfig(what.to_string()));
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad("learning rate must be positive");
        }
        if self.batch_size == 0 || self.max_epochs == 0 || self.patience == 0 || self.hidden == 0 {
            return bad("batch size, epochs, patience and hidden width must be positive");
        }
        if !(0.0..1.0).contains(&self.validation_fraction) {
            return bad("validation fraction must lie in [0, 1)");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochStats {
    pub train_loss: f64,
    pub val_accuracy: f64,
    pub val_loss: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub params: MlpParams,
    pub standardizer: Standardizer,
    pub history: Vec<EpochStats>,
    /// 1-based epoch whose parameters were kept.
    pub best_epoch: usize,
}

impl TrainedModel {
    pub fn epochs_run(&self) -> usize {
        self.history.len()
    }

    pub fn predict(&self, x: &DenseMatrix) -> Result<Vec<usize>, MlpError> {
        predict(&self.params, &self.standardizer.apply(x))
    }

    pub fn accuracy(&self, x: &DenseMatrix, labels: &[usize]) -> Result<f64, MlpError> {
        Ok(accuracy_of(&self.predict(x)?, labels))
    }
}

/// Shuffles each class separately and deals the concatenation round-robin,
/// so folds differ in size by at most one and keep class ratios.
pub fn stratified_folds(labels: &[usize], folds: usize, rng: &mut impl Rng) -> Vec<Vec<usize>> {
    let classes = labels.iter().copied().max().map_or(0, |m| m + 1);
    let mut order = Vec::with_capacity(labels.len());
    for c in 0..classes {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == c).collect();
        members.shuffle(rng);
        order.extend(members);
    }
    let mut out = vec![Vec::new(); folds];
    for (i, idx) in order.into_iter().enumerate() {
        out[i % folds].push(idx);
    }
    for f in &mut out {
        f.sort_unstable();
    }
    out
}

/// Splits off a stratified validation share of `fraction` (at least one
/// sample when the fraction is positive).
fn validation_split(
    labels: &[usize],
    fraction: f64,
    rng: &mut impl Rng,
) -> (Vec<usize>, Vec<usize>) {
    let n = labels.len();
    if fraction <= 0.0 || n < 2 {
        return ((0..n).collect(), Vec::new());
    }
    let n_val = ((n as f64 * fraction).round() as usize).clamp(1, n - 1);
    // Deal into ⌈n / n_val⌉ folds and take one; this is stratified.
    let parts = n.div_ceil(n_val);
    let folds = stratified_folds(labels, parts, rng);
    let val = folds[0].clone();
    let mut train: Vec<usize> = folds[1..].iter().flatten().copied().collect();
    train.sort_unstable();
    (train, val)
}

fn better(acc: f64, loss: f64, best: Option<(f64, f64)>) -> bool {
    match best {
        None => true,
        Some((ba, bl)) => acc > ba || (acc == ba && loss < bl),
    }
}

/// Trains a classifier on `features`/`labels`.
///
/// A stratified validation share is held out for early stopping; the kept
/// parameters are those of the epoch with the best validation accuracy, ties
/// going to the lower validation loss. Standardization statistics come from
/// the rows used for gradient updates only.
pub fn train_classifier(
    features: &DenseMatrix,
    labels: &[usize],
    cfg: &TrainConfig,
) -> Result<TrainedModel, MlpError> {
    cfg.check()?;
    if labels.len() != features.rows {
        return Err(shape_err(format!("{} labels", features.rows), labels.len()));
    }
    let mut distinct = labels.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 2 {
        return Err(MlpError::DegenerateData);
    }
    let classes = distinct.last().unwrap() + 1;

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (train_idx, val_idx) = validation_split(labels, cfg.validation_fraction, &mut rng);
    let raw_train = features.select_rows(&train_idx);
    let standardizer = Standardizer::fit(&raw_train);
    let x_train = standardizer.apply(&raw_train);
    let y_train: Vec<usize> = train_idx.iter().map(|&i| labels[i]).collect();
    let (x_val, y_val) = if val_idx.is_empty() {
        (x_train.clone(), y_train.clone())
    } else {
        (
            standardizer.apply(&features.select_rows(&val_idx)),
            val_idx.iter().map(|&i| labels[i]).collect(),
        )
    };

    let mut params = MlpParams::new_random(features.cols, cfg.hidden, classes, &mut rng);
    let mut adam = Adam::new(&params, cfg.learning_rate);
    let mut order: Vec<usize> = (0..x_train.rows).collect();
    let mut history = Vec::new();
    let mut best: Option<(f64, f64)> = None;
    let mut best_params = params.clone();
    let mut best_epoch = 0;
    let mut since_best = 0;

    for epoch in 1..=cfg.max_epochs {
        order.shuffle(&mut rng);
        let mut loss_sum = 0.0;
        for chunk in order.chunks(cfg.batch_size) {
            let xb = x_train.select_rows(chunk);
            let yb: Vec<usize> = chunk.iter().map(|&i| y_train[i]).collect();
            let (grad, loss) = mlp_backward(&params, &xb, &yb)?;
            adam.step(&mut params, &grad);
            loss_sum += loss * chunk.len() as f64;
        }
        let train_loss = loss_sum / x_train.rows.max(1) as f64;
        let val_accuracy = accuracy_of(&predict(&params, &x_val)?, &y_val);
        let val_loss = mlp_loss(&params, &x_val, &y_val)?;
        history.push(EpochStats {
            train_loss,
            val_accuracy,
            val_loss,
        });
        if better(val_accuracy, val_loss, best) {
            best = Some((val_accuracy, val_loss));
            best_params = params.clone();
            best_epoch = epoch;
            since_best = 0;
        } else {
            since_best += 1;
            if since_best >= cfg.patience {
                break;
            }
        }
    }

    Ok(TrainedModel {
        params: best_params,
        standardizer,
        history,
        best_epoch,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub fold_accuracies: Vec<f64>,
    pub mean: f64,
    /// Population standard deviation over folds.
    pub std: f64,
    pub fold_epochs: Vec<usize>,
}

/// Stratified k-fold cross-validation; folds train independently and are
/// merged in fold order.
pub fn kfold_cv(
    features: &DenseMatrix,
    labels: &[usize],
    folds: usize,
    cfg: &TrainConfig,
) -> Result<CvReport, MlpError> {
    cfg.check()?;
    if folds < 2 || labels.len() < folds {
        return Err(MlpError::TooFewSamples {
            samples: labels.len(),
            folds,
        });
    }
    if labels.len() != features.rows {
        return Err(shape_err(format!("{} labels", features.rows), labels.len()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let parts = stratified_folds(labels, folds, &mut rng);

    let results: Vec<Result<(f64, usize), MlpError>> = (0..folds)
        .into_par_iter()
        .map(|k| {
            let test = &parts[k];
            let train: Vec<usize> = (0..folds)
                .filter(|&j| j != k)
                .flat_map(|j| parts[j].iter().copied())
                .collect();
            let fold_cfg = TrainConfig {
                seed: cfg
                    .seed
                    .wrapping_mul(0x9E37_79B9_7F4A_7C15)
                    .wrapping_add(k as u64 + 1),
                ..cfg.clone()
            };
            let y_train: Vec<usize> = train.iter().map(|&i| labels[i]).collect();
            let model = train_classifier(&features.select_rows(&train), &y_train, &fold_cfg)?;
            let y_test: Vec<usize> = test.iter().map(|&i| labels[i]).collect();
            let acc = model.accuracy(&features.select_rows(test), &y_test)?;
            Ok((acc, model.epochs_run()))
        })
        .collect();

    let mut fold_accuracies = Vec::with_capacity(folds);
    let mut fold_epochs = Vec::with_capacity(folds);
    for r in results {
        let (a, e) = r?;
        fold_accuracies.push(a);
        fold_epochs.push(e);
    }
    let mean = fold_accuracies.iter().sum::<f64>() / folds as f64;
    let std = (fold_accuracies
        .iter()
        .map(|a| (a - mean).powi(2))
        .sum::<f64>()
        / folds as f64)
        .sqrt();
    Ok(CvReport {
        fold_accuracies,
        mean,
        std,
        fold_epochs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hand_params() -> MlpParams {
        MlpParams {
            w1: DenseMatrix::from_vec(1, 1, vec![1.0]).unwrap(),
            b1: vec![0.0],
            w2: DenseMatrix::from_vec(2, 1, vec![2.0, -2.0]).unwrap(),
            b2: vec![0.0, 0.0],
        }
    }

    #[test]
    fn forward_by_hand() {
        let x = DenseMatrix::from_vec(1, 1, vec![3.0]).unwrap();
        let logits = mlp_forward(&hand_params(), &x).unwrap();
        assert_eq!(logits.row(0), &[6.0, -6.0]);
    }

    #[test]
    fn zero_weights_give_zero_logits() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = MlpParams::new_random(3, 4, 2, &mut rng);
        let mut z = MlpParams::zeros_like(&p);
        let x = DenseMatrix::from_vec(2, 3, vec![1.0, -2.0, 3.0, 0.5, 0.5, 0.5]).unwrap();
        assert!(mlp_forward(&z, &x)
            .unwrap()
            .data()
            .iter()
            .all(|&v| v == 0.0));
        z.w1 = DenseMatrix::from_vec(4, 3, {
            let mut d = vec![0.0; 12];
            d[0] = 1.0;
            d[4] = 1.0;
            d[8] = 1.0;
            d
        })
        .unwrap();
        assert!(mlp_forward(&z, &x)
            .unwrap()
            .data()
            .iter()
            .all(|&v| v == 0.0));
    }

    #[test]
    fn shape_errors() {
        let x = DenseMatrix::from_vec(1, 2, vec![1.0, 2.0]).unwrap();
        assert!(matches!(
            mlp_forward(&hand_params(), &x),
            Err(MlpError::ShapeMismatch { .. })
        ));
        let x = DenseMatrix::from_vec(1, 1, vec![1.0]).unwrap();
        assert_eq!(
            mlp_backward(&hand_params(), &x, &[2]).unwrap_err(),
            MlpError::LabelOutOfRange {
                label: 2,
                classes: 2
            }
        );
    }

    #[test]
    fn uniform_logits_cost_ln2() {
        let mut p = hand_params();
        p.w2 = DenseMatrix::zeros(2, 1);
        let x = DenseMatrix::from_vec(3, 1, vec![1.0, 2.0, 3.0]).unwrap();
        let (_, loss) = mlp_backward(&p, &x, &[0, 1, 1]).unwrap();
        assert!((loss - std::f64::consts::LN_2).abs() < 1e-12);
    }

    #[test]
    fn duplicated_rows_keep_the_mean_gradient() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let p = MlpParams::new_random(3, 5, 3, &mut rng);
        let row = vec![0.3, -1.2, 0.8];
        let one = DenseMatrix::from_vec(1, 3, row.clone()).unwrap();
        let many = DenseMatrix::from_rows(&[row.clone(), row.clone(), row]).unwrap();
        let (g1, l1) = mlp_backward(&p, &one, &[2]).unwrap();
        let (g3, l3) = mlp_backward(&p, &many, &[2, 2, 2]).unwrap();
        assert!((l1 - l3).abs() < 1e-12);
        for (a, b) in g1.slices().iter().zip(g3.slices()) {
            for (x, y) in a.iter().zip(b.iter()) {
                assert!((x - y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn folds_partition_indices() {
        let labels: Vec<usize> = (0..20).map(|i| usize::from(i % 3 == 0)).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let folds = stratified_folds(&labels, 10, &mut rng);
        assert!(folds.iter().all(|f| f.len() == 2));
        let mut all: Vec<usize> = folds.concat();
        all.sort_unstable();
        assert_eq!(all, (0..20).collect::<Vec<_>>());
    }

    #[test]
    fn single_class_is_rejected() {
        let x = DenseMatrix::zeros(4, 2);
        assert_eq!(
            train_classifier(&x, &[1, 1, 1, 1], &TrainConfig::default()).unwrap_err(),
            MlpError::DegenerateData
        );
        assert!(matches!(
            kfold_cv(&x, &[0, 1, 0, 1], 10, &TrainConfig::default()),
            Err(MlpError::TooFewSamples { .. })
        ));
    }

    #[test]
    fn standardizer_uses_only_its_rows() {
        let x = DenseMatrix::from_rows(&[vec![1.0, 5.0], vec![3.0, 5.0]]).unwrap();
        let s = Standardizer::fit(&x);
        assert_eq!(s.mean, vec![2.0, 5.0]);
        assert_eq!(s.std, vec![1.0, 1.0]);
        assert_eq!(s.apply(&x).row(0), &[-1.0, 0.0]);
    }
}
