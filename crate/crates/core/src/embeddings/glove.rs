//! Weighted least-squares factorization of log co-occurrence counts with
//! AdaGrad updates, following the usual GloVe recipe.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::cooc::CooccurrenceTable;
use super::vectors::WordVectors;
use super::vocab::Vocabulary;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GloveConfig {
    pub dim: usize,
    pub iterations: usize,
    pub learning_rate: f64,
    pub x_max: f64,
    pub alpha: f64,
    pub seed: u64,
}

impl Default for GloveConfig {
    fn default() -> Self {
        Self {
            dim: 60,
            iterations: 50,
            learning_rate: 0.05,
            x_max: 100.0,
            alpha: 0.75,
            seed: 0,
        }
    }
}

impl GloveConfig {
    pub fn weight(&self, x: f64) -> f64 {
        if x < self.x_max {
            (x / self.x_max).powf(self.alpha)
        } else {
            1.0
        }
    }
}

/// Main and context tables with their biases.
#[derive(Debug, Clone, PartialEq)]
pub struct GloveModel {
    pub dim: usize,
    pub main: Vec<f64>,
    pub context: Vec<f64>,
    pub bias_main: Vec<f64>,
    pub bias_context: Vec<f64>,
}

impl GloveModel {
    fn init(vocab_size: usize, dim: usize, rng: &mut ChaCha8Rng) -> Self {
        let mut draw = |n: usize| -> Vec<f64> {
            (0..n)
                .map(|_| (rng.random::<f64>() - 0.5) / dim as f64)
                .collect()
        };
        Self {
            dim,
            main: draw(vocab_size * dim),
            context: draw(vocab_size * dim),
            bias_main: draw(vocab_size),
            bias_context: draw(vocab_size),
        }
    }

    fn residual(&self, i: usize, j: usize, x: f64) -> f64 {
        let d = self.dim;
        let wi = &self.main[i * d..(i + 1) * d];
        let wj = &self.context[j * d..(j + 1) * d];
        let dot: f64 = wi.iter().zip(wj).map(|(a, b)| a * b).sum();
        dot + self.bias_main[i] + self.bias_context[j] - x.ln()
    }

    /// `sum f(X_ij) (w_i . w~_j + b_i + b~_j - ln X_ij)^2` over nonzero cells.
    pub fn objective(&self, table: &CooccurrenceTable, cfg: &GloveConfig) -> f64 {
        table
            .entries()
            .iter()
            .map(|&(i, j, x)| {
                let r = self.residual(i as usize, j as usize, x);
                cfg.weight(x) * r * r
            })
            .sum()
    }

    /// `w_i . w~_j + b_i + b~_j`.
    pub fn predict_log(&self, i: usize, j: usize) -> f64 {
        self.residual(i, j, 1.0)
    }

    /// Final vectors: main + context.
    pub fn to_vectors(&self, vocab: &Vocabulary) -> WordVectors {
        let data = self
            .main
            .iter()
            .zip(&self.context)
            .map(|(a, b)| a + b)
            .collect();
        WordVectors::new(vocab.tokens().to_vec(), self.dim, data)
            .expect("main and context tables share the vocabulary shape")
    }
}

#[derive(Debug, Clone)]
pub struct GloveOutcome {
    pub model: GloveModel,
    pub initial_objective: f64,
    /// Objective accumulated during each pass (one value per iteration).
    pub epoch_objective: Vec<f64>,
    pub final_objective: f64,
}

/// Trains on all nonzero cells, visiting them in a seeded shuffled order each pass.
pub fn train_embeddings(table: &CooccurrenceTable, cfg: &GloveConfig) -> Result<GloveOutcome> {
    if table.is_empty() {
        return Err(Error::data("co-occurrence table is empty"));
    }
    if cfg.dim == 0 || cfg.learning_rate <= 0.0 {
        return Err(Error::contract("embedding dimension and learning rate must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let v = table.vocab_size();
    let d = cfg.dim;
    let mut m = GloveModel::init(v, d, &mut rng);
    let initial_objective = m.objective(table, cfg);

    // AdaGrad accumulators start at 1 so the first step is the raw learning rate.
    let mut gsq_main = vec![1.0f64; v * d];
    let mut gsq_ctx = vec![1.0f64; v * d];
    let mut gsq_bm = vec![1.0f64; v];
    let mut gsq_bc = vec![1.0f64; v];

    let mut order: Vec<usize> = (0..table.len()).collect();
    let mut epoch_objective = Vec::with_capacity(cfg.iterations);
    let lr = cfg.learning_rate;
    for epoch in 0..cfg.iterations {
        order.shuffle(&mut rng);
        let mut cost = 0.0;
        for &k in &order {
            let (i, j, x) = table.entries()[k];
            let (i, j) = (i as usize, j as usize);
            let diff = m.residual(i, j, x);
            let fdiff = cfg.weight(x) * diff;
            cost += fdiff * diff;
            for c in 0..d {
                let wi = m.main[i * d + c];
                let wj = m.context[j * d + c];
                let gi = fdiff * wj;
                let gj = fdiff * wi;
                m.main[i * d + c] -= lr * gi / gsq_main[i * d + c].sqrt();
                m.context[j * d + c] -= lr * gj / gsq_ctx[j * d + c].sqrt();
                gsq_main[i * d + c] += gi * gi;
                gsq_ctx[j * d + c] += gj * gj;
            }
            m.bias_main[i] -= lr * fdiff / gsq_bm[i].sqrt();
            m.bias_context[j] -= lr * fdiff / gsq_bc[j].sqrt();
            gsq_bm[i] += fdiff * fdiff;
            gsq_bc[j] += fdiff * fdiff;
        }
        if !cost.is_finite() {
            return Err(Error::non_finite(format!(
                "embedding objective at iteration {epoch} ({cost})"
            )));
        }
        epoch_objective.push(cost);
    }
    let final_objective = m.objective(table, cfg);
    Ok(GloveOutcome {
        model: m,
        initial_objective,
        epoch_objective,
        final_objective,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_table_is_an_error() {
        let t = CooccurrenceTable::from_entries(3, vec![]);
        assert!(train_embeddings(&t, &GloveConfig::default()).is_err());
    }

    #[test]
    fn single_pair_fits_its_log_count() {
        let e = std::f64::consts::E;
        let t = CooccurrenceTable::from_entries(3, vec![(1, 2, e), (2, 1, e)]);
        let cfg = GloveConfig {
            dim: 4,
            iterations: 3000,
            ..GloveConfig::default()
        };
        let out = train_embeddings(&t, &cfg).unwrap();
        let fit = out.model.predict_log(1, 2);
        assert!((fit - 1.0).abs() < 1e-2, "fit {fit}");
        assert!(out.final_objective < out.initial_objective);
    }

    #[test]
    fn weighting_function() {
        let cfg = GloveConfig::default();
        assert_eq!(cfg.weight(100.0), 1.0);
        assert_eq!(cfg.weight(500.0), 1.0);
        assert!((cfg.weight(10.0) - 0.1f64.powf(0.75)).abs() < 1e-15);
    }
}
