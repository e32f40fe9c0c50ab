// Index-based loops keep the row-major weight layout explicit, and the
// negated comparisons deliberately treat NaN as invalid.
#![allow(clippy::needless_range_loop)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::type_complexity)]

//! A small feedforward network, written from first principles, that learns
//! the map from an input to its type-II opposite from a mined pair set.
//!
//! One tanh hidden layer, identity output, min-max normalization on both
//! sides, full-batch Adam with early stopping. Everything is deterministic
//! given the seeds.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::opposition::MinedSet;

const MODEL_FILE_VERSION: u32 = 1;

/// Layer sizes. Inputs and outputs both live in the problem's variable
/// space, so `input_dim == output_dim`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Architecture {
    pub input_dim: usize,
    pub hidden_units: usize,
    pub output_dim: usize,
}

impl Architecture {
    pub fn new(input_dim: usize, hidden_units: usize, output_dim: usize) -> Result<Architecture> {
        let arch = Architecture {
            input_dim,
            hidden_units,
            output_dim,
        };
        arch.validate()?;
        Ok(arch)
    }

    /// Square architecture for a problem of the given arity.
    pub fn for_arity(arity: usize, hidden_units: usize) -> Result<Architecture> {
        Architecture::new(arity, hidden_units, arity)
    }

    pub fn validate(&self) -> Result<()> {
        if self.input_dim == 0 || self.output_dim == 0 {
            return Err(Error::usage("layer dimensions must be positive".to_string()));
        }
        if self.hidden_units == 0 {
            return Err(Error::usage("need at least one hidden unit".to_string()));
        }
        if self.input_dim != self.output_dim {
            return Err(Error::usage(format!(
                "an opposite map is square: input_dim {} != output_dim {}",
                self.input_dim, self.output_dim
            )));
        }
        Ok(())
    }
}

/// Per-dimension affine min-max scaling to `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinMaxNorm {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl MinMaxNorm {
    /// Identity placeholder used before any data has been seen.
    fn identity(dim: usize) -> MinMaxNorm {
        MinMaxNorm {
            min: vec![0.0; dim],
            max: vec![1.0; dim],
        }
    }

    fn fit<'a>(rows: impl Iterator<Item = &'a Vec<f64>>, dim: usize) -> Result<MinMaxNorm> {
        let mut min = vec![f64::INFINITY; dim];
        let mut max = vec![f64::NEG_INFINITY; dim];
        for row in rows {
            for d in 0..dim {
                min[d] = min[d].min(row[d]);
                max[d] = max[d].max(row[d]);
            }
        }
        for d in 0..dim {
            if !(min[d] < max[d]) {
                return Err(Error::Degenerate(format!(
                    "column {d} is constant ({}); min-max scaling is not invertible",
                    min[d]
                )));
            }
        }
        Ok(MinMaxNorm { min, max })
    }

    pub fn dim(&self) -> usize {
        self.min.len()
    }

    pub fn normalize(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.min.iter().zip(&self.max))
            .map(|(v, (lo, hi))| (v - lo) / (hi - lo))
            .collect()
    }

    pub fn denormalize(&self, u: &[f64]) -> Vec<f64> {
        u.iter()
            .zip(self.min.iter().zip(&self.max))
            .map(|(v, (lo, hi))| lo + v * (hi - lo))
            .collect()
    }
}

/// The trained (or trainable) opposite regressor.
///
/// `w1` is `hidden_units x input_dim` row-major, `w2` is
/// `output_dim x hidden_units` row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressorModel {
    pub arch: Architecture,
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    pub w2: Vec<f64>,
    pub b2: Vec<f64>,
    pub norm_in: MinMaxNorm,
    pub norm_out: MinMaxNorm,
    pub seed: u64,
}

/// Fresh model with Glorot-uniform weights and zero biases.
pub fn init(arch: &Architecture, seed: u64) -> Result<RegressorModel> {
    arch.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let limit1 = (6.0 / (arch.input_dim + arch.hidden_units) as f64).sqrt();
    let limit2 = (6.0 / (arch.hidden_units + arch.output_dim) as f64).sqrt();
    let w1 = (0..arch.hidden_units * arch.input_dim)
        .map(|_| rng.random_range(-limit1..limit1))
        .collect();
    let w2 = (0..arch.output_dim * arch.hidden_units)
        .map(|_| rng.random_range(-limit2..limit2))
        .collect();
    Ok(RegressorModel {
        arch: *arch,
        w1,
        b1: vec![0.0; arch.hidden_units],
        w2,
        b2: vec![0.0; arch.output_dim],
        norm_in: MinMaxNorm::identity(arch.input_dim),
        norm_out: MinMaxNorm::identity(arch.output_dim),
        seed,
    })
}

impl RegressorModel {
    /// Forward pass in normalized space, also returning the hidden
    /// activations (needed for backprop).
    fn forward(&self, u: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let arch = &self.arch;
        let mut hidden = vec![0.0; arch.hidden_units];
        for j in 0..arch.hidden_units {
            let mut z = self.b1[j];
            for i in 0..arch.input_dim {
                z += self.w1[j * arch.input_dim + i] * u[i];
            }
            hidden[j] = z.tanh();
        }
        let mut out = vec![0.0; arch.output_dim];
        for k in 0..arch.output_dim {
            let mut z = self.b2[k];
            for j in 0..arch.hidden_units {
                z += self.w2[k * arch.hidden_units + j] * hidden[j];
            }
            out[k] = z;
        }
        (out, hidden)
    }
}

/// Training hyperparameters.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    /// `None` trains full-batch; `Some(k)` uses shuffled mini-batches of `k`.
    pub batch: Option<usize>,
    /// Fraction of the data held out for validation, in `(0, 0.5]`.
    pub validation_fraction: f64,
    /// Epochs without validation improvement before stopping.
    pub patience: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> TrainConfig {
        TrainConfig {
            epochs: 4000,
            learning_rate: 0.2,
            batch: None,
            validation_fraction: 0.2,
            patience: 400,
            seed: 0,
        }
    }
}

impl TrainConfig {
    fn validate(&self) -> Result<()> {
        if self.epochs == 0 {
            return Err(Error::usage("epochs must be at least 1".to_string()));
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(Error::usage(format!(
                "learning rate must be positive (got {})",
                self.learning_rate
            )));
        }
        if !(self.validation_fraction > 0.0 && self.validation_fraction <= 0.5) {
            return Err(Error::usage(format!(
                "validation fraction must lie in (0, 0.5] (got {})",
                self.validation_fraction
            )));
        }
        if self.batch == Some(0) {
            return Err(Error::usage("mini-batch size must be positive".to_string()));
        }
        Ok(())
    }
}

/// Train/validation losses of one epoch (mean squared error in normalized
/// space, summed over output dimensions).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochLoss {
    pub epoch: usize,
    pub train_mse: f64,
    pub val_mse: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    pub history: Vec<EpochLoss>,
    pub best_epoch: usize,
    pub best_val_mse: f64,
}

fn mse(model: &RegressorModel, xs: &[Vec<f64>], ts: &[Vec<f64>]) -> f64 {
    let mut total = 0.0;
    for (x, t) in xs.iter().zip(ts) {
        let (out, _) = model.forward(x);
        for (o, t) in out.iter().zip(t) {
            let r = o - t;
            total += r * r;
        }
    }
    total / xs.len() as f64
}

/// Mean (over samples) gradient of the half squared error, accumulated onto
/// flat parameter buffers laid out like the model's own.
fn accumulate_gradient(
    model: &RegressorModel,
    xs: &[Vec<f64>],
    ts: &[Vec<f64>],
    gw1: &mut [f64],
    gb1: &mut [f64],
    gw2: &mut [f64],
    gb2: &mut [f64],
) {
    let arch = &model.arch;
    gw1.fill(0.0);
    gb1.fill(0.0);
    gw2.fill(0.0);
    gb2.fill(0.0);
    for (x, t) in xs.iter().zip(ts) {
        let (out, hidden) = model.forward(x);
        // dJ/d(out) for J = 1/2 * ||out - t||^2
        let residual: Vec<f64> = out.iter().zip(t).map(|(o, t)| o - t).collect();
        for k in 0..arch.output_dim {
            gb2[k] += residual[k];
            for j in 0..arch.hidden_units {
                gw2[k * arch.hidden_units + j] += residual[k] * hidden[j];
            }
        }
        for j in 0..arch.hidden_units {
            let mut dh = 0.0;
            for k in 0..arch.output_dim {
                dh += residual[k] * model.w2[k * arch.hidden_units + j];
            }
            let dz = dh * (1.0 - hidden[j] * hidden[j]);
            gb1[j] += dz;
            for i in 0..arch.input_dim {
                gw1[j * arch.input_dim + i] += dz * x[i];
            }
        }
    }
    let inv = 1.0 / xs.len() as f64;
    for g in gw1.iter_mut() {
        *g *= inv;
    }
    for g in gb1.iter_mut() {
        *g *= inv;
    }
    for g in gw2.iter_mut() {
        *g *= inv;
    }
    for g in gb2.iter_mut() {
        *g *= inv;
    }
}

// Adam moment buffers for one parameter group.
struct Moments {
    m: Vec<f64>,
    v: Vec<f64>,
}

impl Moments {
    fn new(len: usize) -> Moments {
        Moments {
            m: vec![0.0; len],
            v: vec![0.0; len],
        }
    }
}

/// Full-batch Adam state over the four parameter groups.
struct AdamState {
    lr: f64,
    step: i32,
    groups: [Moments; 4],
}

const ADAM_BETA1: f64 = 0.9;
const ADAM_BETA2: f64 = 0.999;
const ADAM_EPS: f64 = 1e-8;

impl AdamState {
    fn new(lr: f64, model: &RegressorModel) -> AdamState {
        AdamState {
            lr,
            step: 0,
            groups: [
                Moments::new(model.w1.len()),
                Moments::new(model.b1.len()),
                Moments::new(model.w2.len()),
                Moments::new(model.b2.len()),
            ],
        }
    }

    fn apply(&mut self, model: &mut RegressorModel, grads: [&[f64]; 4]) {
        self.step += 1;
        let bc1 = 1.0 - ADAM_BETA1.powi(self.step);
        let bc2 = 1.0 - ADAM_BETA2.powi(self.step);
        let params: [&mut Vec<f64>; 4] = [
            &mut model.w1,
            &mut model.b1,
            &mut model.w2,
            &mut model.b2,
        ];
        for ((moments, param), grad) in self.groups.iter_mut().zip(params).zip(grads) {
            for i in 0..param.len() {
                let g = grad[i];
                moments.m[i] = ADAM_BETA1 * moments.m[i] + (1.0 - ADAM_BETA1) * g;
                moments.v[i] = ADAM_BETA2 * moments.v[i] + (1.0 - ADAM_BETA2) * g * g;
                let m_hat = moments.m[i] / bc1;
                let v_hat = moments.v[i] / bc2;
                param[i] -= self.lr * m_hat / (v_hat.sqrt() + ADAM_EPS);
            }
        }
    }
}

/// Fit the model to a mined pair set by minimizing the mean squared error in
/// normalized space with Adam.
///
/// Normalization is fitted on the training split only; the model keeps the
/// weights of the epoch with the best validation loss.
pub fn train(
    model: &mut RegressorModel,
    data: &MinedSet,
    cfg: &TrainConfig,
) -> Result<TrainReport> {
    cfg.validate()?;
    if data.is_empty() {
        return Err(Error::usage("cannot train on an empty mined set".to_string()));
    }
    if data.arity() != model.arch.input_dim {
        return Err(Error::usage(format!(
            "model expects arity {}, mined set has arity {}",
            model.arch.input_dim,
            data.arity()
        )));
    }

    // Deterministic split.
    let n = data.len();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let n_val = if n == 1 {
        0
    } else {
        ((cfg.validation_fraction * n as f64).floor() as usize).clamp(1, n - 1)
    };
    let n_train = n - n_val;
    let (train_idx, val_idx) = order.split_at(n_train);
    let val_idx = if val_idx.is_empty() { train_idx } else { val_idx };

    model.norm_in = MinMaxNorm::fit(
        train_idx.iter().map(|&i| &data.inputs[i]),
        model.arch.input_dim,
    )?;
    model.norm_out = MinMaxNorm::fit(
        train_idx.iter().map(|&i| &data.opposites[i]),
        model.arch.output_dim,
    )?;

    let norm_rows = |idx: &[usize], rows: &[Vec<f64>], norm: &MinMaxNorm| -> Vec<Vec<f64>> {
        idx.iter().map(|&i| norm.normalize(&rows[i])).collect()
    };
    let train_x = norm_rows(train_idx, &data.inputs, &model.norm_in);
    let train_t = norm_rows(train_idx, &data.opposites, &model.norm_out);
    let val_x = norm_rows(val_idx, &data.inputs, &model.norm_in);
    let val_t = norm_rows(val_idx, &data.opposites, &model.norm_out);

    let mut gw1 = vec![0.0; model.w1.len()];
    let mut gb1 = vec![0.0; model.b1.len()];
    let mut gw2 = vec![0.0; model.w2.len()];
    let mut gb2 = vec![0.0; model.b2.len()];

    let mut history = Vec::with_capacity(cfg.epochs);
    let mut best_val = f64::INFINITY;
    let mut best_epoch = 0;
    let mut best_weights = (
        model.w1.clone(),
        model.b1.clone(),
        model.w2.clone(),
        model.b2.clone(),
    );
    let mut stale_epochs = 0;
    let mut batch_order: Vec<usize> = (0..train_x.len()).collect();

    let mut adam = AdamState::new(cfg.learning_rate, model);
    for epoch in 1..=cfg.epochs {
        match cfg.batch {
            None => {
                accumulate_gradient(model, &train_x, &train_t, &mut gw1, &mut gb1, &mut gw2, &mut gb2);
                adam.apply(model, [&gw1, &gb1, &gw2, &gb2]);
            }
            Some(batch) => {
                batch_order.shuffle(&mut rng);
                for chunk in batch_order.chunks(batch) {
                    let xs: Vec<Vec<f64>> = chunk.iter().map(|&i| train_x[i].clone()).collect();
                    let ts: Vec<Vec<f64>> = chunk.iter().map(|&i| train_t[i].clone()).collect();
                    accumulate_gradient(model, &xs, &ts, &mut gw1, &mut gb1, &mut gw2, &mut gb2);
                    adam.apply(model, [&gw1, &gb1, &gw2, &gb2]);
                }
            }
        }

        let train_mse = mse(model, &train_x, &train_t);
        let val_mse = mse(model, &val_x, &val_t);
        if !train_mse.is_finite() || !val_mse.is_finite() {
            return Err(Error::Diverged {
                epoch,
                message: format!("loss became non-finite (train {train_mse}, val {val_mse})"),
            });
        }
        history.push(EpochLoss {
            epoch,
            train_mse,
            val_mse,
        });

        if val_mse < best_val {
            best_val = val_mse;
            best_epoch = epoch;
            best_weights = (
                model.w1.clone(),
                model.b1.clone(),
                model.w2.clone(),
                model.b2.clone(),
            );
            stale_epochs = 0;
        } else {
            stale_epochs += 1;
            if stale_epochs >= cfg.patience {
                break;
            }
        }
    }
    (model.w1, model.b1, model.w2, model.b2) = best_weights;
    Ok(TrainReport {
        history,
        best_epoch,
        best_val_mse: best_val,
    })
}

/// Predict the type-II opposite of `x`: normalized forward pass, denormalized
/// and clamped componentwise into the training input box.
pub fn predict(model: &RegressorModel, x: &[f64]) -> Result<Vec<f64>> {
    if x.len() != model.arch.input_dim {
        return Err(Error::usage(format!(
            "model expects {} input(s), got {}",
            model.arch.input_dim,
            x.len()
        )));
    }
    let u = model.norm_in.normalize(x);
    let (out, _) = model.forward(&u);
    let mut y = model.norm_out.denormalize(&out);
    for (v, (lo, hi)) in y
        .iter_mut()
        .zip(model.norm_in.min.iter().zip(&model.norm_in.max))
    {
        *v = v.clamp(*lo, *hi);
    }
    Ok(y)
}

/// Compare analytic backpropagation gradients against central finite
/// differences (step `1e-6`) at the current weights; returns the largest
/// relative discrepancy over all parameters.
pub fn grad_check(model: &RegressorModel, data: &MinedSet) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::usage("cannot check gradients on an empty set".to_string()));
    }
    if data.arity() != model.arch.input_dim {
        return Err(Error::usage(format!(
            "model expects arity {}, mined set has arity {}",
            model.arch.input_dim,
            data.arity()
        )));
    }
    let xs: Vec<Vec<f64>> = data.inputs.iter().map(|x| model.norm_in.normalize(x)).collect();
    let ts: Vec<Vec<f64>> = data
        .opposites
        .iter()
        .map(|t| model.norm_out.normalize(t))
        .collect();

    let mut gw1 = vec![0.0; model.w1.len()];
    let mut gb1 = vec![0.0; model.b1.len()];
    let mut gw2 = vec![0.0; model.w2.len()];
    let mut gb2 = vec![0.0; model.b2.len()];
    accumulate_gradient(model, &xs, &ts, &mut gw1, &mut gb1, &mut gw2, &mut gb2);

    // Loss matching the accumulated gradient: mean over samples of the half
    // squared error.
    let loss = |m: &RegressorModel| 0.5 * mse(m, &xs, &ts);

    const STEP: f64 = 1e-6;
    let mut worst: f64 = 0.0;
    let mut probe = model.clone();
    let groups: [(&[f64], fn(&mut RegressorModel) -> &mut Vec<f64>); 4] = [
        (&gw1, |m| &mut m.w1),
        (&gb1, |m| &mut m.b1),
        (&gw2, |m| &mut m.w2),
        (&gb2, |m| &mut m.b2),
    ];
    for (analytic, param_of) in groups {
        for p in 0..analytic.len() {
            let original = param_of(&mut probe)[p];
            param_of(&mut probe)[p] = original + STEP;
            let plus = loss(&probe);
            param_of(&mut probe)[p] = original - STEP;
            let minus = loss(&probe);
            param_of(&mut probe)[p] = original;
            let numeric = (plus - minus) / (2.0 * STEP);
            let a = analytic[p];
            let rel = (a - numeric).abs() / (a.abs() + numeric.abs()).max(1e-3);
            worst = worst.max(rel);
        }
    }
    Ok(worst)
}

#[derive(Serialize, Deserialize)]
struct LayerWeights {
    w: Vec<f64>,
    b: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    version: u32,
    arch: Architecture,
    norm_in: MinMaxNorm,
    norm_out: MinMaxNorm,
    weights: Vec<LayerWeights>,
    seed: u64,
}

/// Write the model as versioned JSON. The round trip through [`load`] is
/// bit-exact on weights and normalization parameters.
pub fn save(model: &RegressorModel, path: &Path) -> Result<()> {
    let file = ModelFile {
        version: MODEL_FILE_VERSION,
        arch: model.arch,
        norm_in: model.norm_in.clone(),
        norm_out: model.norm_out.clone(),
        weights: vec![
            LayerWeights {
                w: model.w1.clone(),
                b: model.b1.clone(),
            },
            LayerWeights {
                w: model.w2.clone(),
                b: model.b2.clone(),
            },
        ],
        seed: model.seed,
    };
    let mut out = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut out, &file)
        .map_err(|e| Error::format(format!("{}: {e}", path.display())))?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}

/// Load a model written by [`save`], validating version and shapes.
pub fn load(path: &Path) -> Result<RegressorModel> {
    let file = File::open(path)?;
    let parsed: ModelFile = serde_json::from_reader(BufReader::new(file))
        .map_err(|e| Error::format(format!("{}: {e}", path.display())))?;
    let at = |field: &str| format!("{}: field `{field}`", path.display());

    if parsed.version != MODEL_FILE_VERSION {
        return Err(Error::format(format!(
            "{}: unknown version {} (expected {MODEL_FILE_VERSION})",
            path.display(),
            parsed.version
        )));
    }
    parsed
        .arch
        .validate()
        .map_err(|e| Error::format(format!("{}: {e}", at("arch"))))?;
    let arch = parsed.arch;
    if parsed.weights.len() != 2 {
        return Err(Error::format(format!(
            "{}: expected 2 layers, got {}",
            at("weights"),
            parsed.weights.len()
        )));
    }
    let shape_checks = [
        (parsed.weights[0].w.len(), arch.hidden_units * arch.input_dim, "weights[0].w"),
        (parsed.weights[0].b.len(), arch.hidden_units, "weights[0].b"),
        (parsed.weights[1].w.len(), arch.output_dim * arch.hidden_units, "weights[1].w"),
        (parsed.weights[1].b.len(), arch.output_dim, "weights[1].b"),
        (parsed.norm_in.min.len(), arch.input_dim, "norm_in.min"),
        (parsed.norm_in.max.len(), arch.input_dim, "norm_in.max"),
        (parsed.norm_out.min.len(), arch.output_dim, "norm_out.min"),
        (parsed.norm_out.max.len(), arch.output_dim, "norm_out.max"),
    ];
    for (got, want, field) in shape_checks {
        if got != want {
            return Err(Error::format(format!(
                "{}: length {got} does not match the declared architecture (expected {want})",
                at(field)
            )));
        }
    }
    for (norm, field) in [(&parsed.norm_in, "norm_in"), (&parsed.norm_out, "norm_out")] {
        for d in 0..norm.dim() {
            if !(norm.min[d].is_finite() && norm.max[d].is_finite() && norm.min[d] < norm.max[d]) {
                return Err(Error::format(format!(
                    "{}: dimension {d} is not an invertible range [{}, {}]",
                    at(field),
                    norm.min[d],
                    norm.max[d]
                )));
            }
        }
    }
    let mut weights = parsed.weights;
    let second = weights.pop().expect("length checked");
    let first = weights.pop().expect("length checked");
    let all_finite = first
        .w
        .iter()
        .chain(&first.b)
        .chain(&second.w)
        .chain(&second.b)
        .all(|v| v.is_finite());
    if !all_finite {
        return Err(Error::format(format!("{}: non-finite value", at("weights"))));
    }
    Ok(RegressorModel {
        arch,
        w1: first.w,
        b1: first.b,
        w2: second.w,
        b2: second.b,
        norm_in: parsed.norm_in,
        norm_out: parsed.norm_out,
        seed: parsed.seed,
    })
}
