use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tfidf::SparseRow;
use crate::error::{Error, Result};
use crate::tensor::argmax;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmConfig {
    /// Inverse regularization strength; the penalty is `||w||^2 / (2 C n)`.
    pub c: f64,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for SvmConfig {
    fn default() -> Self {
        Self {
            c: 1.0,
            epochs: 20,
            seed: 0,
        }
    }
}

/// One weight vector and bias per class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub weights: Vec<Vec<f64>>,
    pub bias: Vec<f64>,
    pub c: f64,
}

impl LinearModel {
    pub fn num_classes(&self) -> usize {
        self.weights.len()
    }

    pub fn num_features(&self) -> usize {
        self.weights.first().map_or(0, Vec::len)
    }

    pub fn scores(&self, row: &SparseRow) -> Vec<f64> {
        self.weights
            .iter()
            .zip(&self.bias)
            .map(|(w, b)| b + row.iter().map(|&(c, v)| w[c] * v).sum::<f64>())
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct SvmOutcome {
    pub model: LinearModel,
    /// Regularized hinge objective after each epoch, summed over classes.
    pub objective: Vec<f64>,
}

fn binary_objective(w: &[f64], b: f64, lambda: f64, rows: &[SparseRow], ys: &[f64]) -> f64 {
    let reg = 0.5 * lambda * w.iter().map(|x| x * x).sum::<f64>();
    let hinge: f64 = rows
        .iter()
        .zip(ys)
        .map(|(r, &y)| {
            let m = y * (b + r.iter().map(|&(c, v)| w[c] * v).sum::<f64>());
            (1.0 - m).max(0.0)
        })
        .sum();
    reg + hinge / rows.len() as f64
}

/// Stochastic subgradient descent on one binary problem, step
/// `eta_t = 1 / (1 + lambda t)`. The weight vector is kept as `scale * v`
/// so that shrinking is O(1) per step.
fn train_binary(
    rows: &[SparseRow],
    ys: &[f64],
    dim: usize,
    lambda: f64,
    epochs: usize,
    rng: &mut ChaCha8Rng,
) -> (Vec<f64>, f64, Vec<f64>) {
    let mut v = vec![0.0; dim];
    let mut scale = 1.0;
    let mut b = 0.0;
    let mut t = 1.0;
    let mut order: Vec<usize> = (0..rows.len()).collect();
    let mut history = Vec::with_capacity(epochs);
    for _ in 0..epochs {
        order.shuffle(rng);
        for &i in &order {
            let eta = 1.0 / (1.0 + lambda * t);
            let row = &rows[i];
            let margin = ys[i] * (b + scale * row.iter().map(|&(c, x)| v[c] * x).sum::<f64>());
            scale *= 1.0 - eta * lambda;
            if margin < 1.0 {
                let step = eta * ys[i] / scale;
                for &(c, x) in row {
                    v[c] += step * x;
                }
                b += eta * ys[i];
            }
            if scale < 1e-9 {
                for x in &mut v {
                    *x *= scale;
                }
                scale = 1.0;
            }
            t += 1.0;
        }
        let w: Vec<f64> = v.iter().map(|x| x * scale).collect();
        history.push(binary_objective(&w, b, lambda, rows, ys));
    }
    let w = v.iter().map(|x| x * scale).collect();
    (w, b, history)
}

/// One-vs-rest linear SVM. Classes are trained in parallel, each from its
/// own RNG stream derived from the seed, so results do not depend on the
/// thread count.
pub fn svm_train(
    rows: &[SparseRow],
    labels: &[usize],
    num_classes: usize,
    num_features: usize,
    cfg: &SvmConfig,
) -> Result<SvmOutcome> {
    if rows.len() != labels.len() {
        return Err(Error::contract("one label per feature row"));
    }
    if num_classes < 2 {
        return Err(Error::contract("an SVM needs at least 2 classes"));
    }
    if let Some(&bad) = labels.iter().find(|&&y| y >= num_classes) {
        return Err(Error::contract(format!("label {bad} out of range for {num_classes} classes")));
    }
    if labels.iter().all(|&y| y == labels[0]) {
        return Err(Error::data("training labels contain a single class"));
    }
    if cfg.c.is_nan() || cfg.c <= 0.0 {
        return Err(Error::contract("C must be positive"));
    }
    if let Some(&(c, _)) = rows.iter().flatten().find(|(c, _)| *c >= num_features) {
        return Err(Error::contract(format!("feature column {c} beyond {num_features} features")));
    }
    let lambda = 1.0 / (cfg.c * rows.len() as f64);
    let per_class: Vec<(Vec<f64>, f64, Vec<f64>)> = (0..num_classes)
        .into_par_iter()
        .map(|k| {
            let ys: Vec<f64> = labels.iter().map(|&y| if y == k { 1.0 } else { -1.0 }).collect();
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(k as u64);
            train_binary(rows, &ys, num_features, lambda, cfg.epochs, &mut rng)
        })
        .collect();
    let mut objective = vec![0.0; cfg.epochs];
    let mut weights = Vec::with_capacity(num_classes);
    let mut bias = Vec::with_capacity(num_classes);
    for (w, b, h) in per_class {
        for (o, x) in objective.iter_mut().zip(h) {
            *o += x;
        }
        weights.push(w);
        bias.push(b);
    }
    if weights.iter().flatten().chain(&bias).any(|x| !x.is_finite()) {
        return Err(Error::non_finite("SVM weights"));
    }
    Ok(SvmOutcome {
        model: LinearModel {
            weights,
            bias,
            c: cfg.c,
        },
        objective,
    })
}

/// Highest-scoring class (lowest index on ties) and all class scores.
pub fn svm_predict(model: &LinearModel, row: &SparseRow) -> (usize, Vec<f64>) {
    let scores = model.scores(row);
    (argmax(&scores), scores)
}
