use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::adam::{adam_step, AdamState};
use crate::corpus::{CorpusSplit, Part};
use crate::error::{Error, Result};
use crate::networks::{Input, Network, Prediction};
use crate::tensor::{argmax, Gradients, Tape};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub batch_size: usize,
    pub max_epochs: usize,
    /// Epochs without a validation improvement before stopping.
    pub patience: usize,
    pub seed: u64,
    pub train_embeddings: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.001,
            batch_size: 32,
            max_epochs: 50,
            patience: 5,
            seed: 0,
            train_embeddings: true,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.learning_rate.is_finite() || self.learning_rate < 0.0 {
            return Err(Error::contract("learning rate must be a finite non-negative number"));
        }
        if self.batch_size == 0 || self.patience == 0 {
            return Err(Error::contract("batch size and patience must be at least 1"));
        }
        Ok(())
    }
}

/// A document ready for the network, with its class index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Example {
    pub input: Input,
    pub label: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainHistory {
    pub train_loss: Vec<f64>,
    pub train_accuracy: Vec<f64>,
    pub valid_accuracy: Vec<f64>,
    /// Epoch (0-based) whose parameters were kept.
    pub best_epoch: usize,
    #[serde(skip)]
    pub wall_time_secs: f64,
}

impl TrainHistory {
    pub fn best_valid_accuracy(&self) -> f64 {
        self.valid_accuracy[self.best_epoch]
    }

    pub fn epochs(&self) -> usize {
        self.valid_accuracy.len()
    }
}

/// Encodes one part of `split` for `net`.
pub fn examples_for(net: &Network, split: &CorpusSplit, part: Part) -> Result<Vec<Example>> {
    split
        .part(part)
        .iter()
        .map(|d| {
            Ok(Example {
                input: net.input(d)?,
                label: split.class_of(d)?,
            })
        })
        .collect()
}

/// Documents per worker task when a minibatch is split across threads.
/// The split is fixed so gradient sums do not depend on the thread count.
const CHUNK: usize = 4;

struct BatchStats {
    grads: Gradients,
    loss: f64,
    correct: usize,
}

fn batch_gradients(net: &Network, data: &[Example], batch: &[usize]) -> Result<BatchStats> {
    let partial: Vec<Result<BatchStats>> = batch
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut grads = Gradients::zeros_like(net.params());
            let mut loss = 0.0;
            let mut correct = 0;
            for &i in chunk {
                let ex = &data[i];
                let mut tape = Tape::new(net.params());
                let f = net.forward(&mut tape, &ex.input)?;
                if argmax(tape.value(f.probs)) == ex.label {
                    correct += 1;
                }
                let l = tape.cross_entropy(f.probs, ex.label)?;
                loss += tape.scalar(l);
                tape.backward(l, &mut grads)?;
            }
            Ok(BatchStats { grads, loss, correct })
        })
        .collect();
    let mut it = partial.into_iter();
    let mut total = it.next().expect("non-empty batch")?;
    for p in it {
        let p = p?;
        total.grads.add_assign(&p.grads);
        total.loss += p.loss;
        total.correct += p.correct;
    }
    Ok(total)
}

/// Predictions for every input, computed in parallel, in input order.
pub fn predict_all(net: &Network, inputs: &[Input]) -> Result<Vec<Prediction>> {
    inputs.par_iter().map(|x| net.predict(x)).collect()
}

pub fn accuracy_on(net: &Network, data: &[Example]) -> Result<f64> {
    let correct: Vec<bool> = data
        .par_iter()
        .map(|ex| Ok(argmax(&net.predict(&ex.input)?.probs) == ex.label))
        .collect::<Result<_>>()?;
    Ok(correct.iter().filter(|&&c| c).count() as f64 / data.len() as f64)
}

/// Minibatch Adam on cross-entropy with validation-based early stopping.
///
/// Training examples are reshuffled every epoch from a seeded RNG. The
/// parameters of the epoch with the highest validation accuracy (earliest on
/// ties) are returned.
pub fn train(mut net: Network, train: &[Example], valid: &[Example], cfg: &TrainConfig) -> Result<(Network, TrainHistory)> {
    cfg.validate()?;
    if train.is_empty() || valid.is_empty() {
        return Err(Error::data("training and validation sets must be non-empty"));
    }
    let k = net.config().num_classes;
    if let Some(ex) = train.iter().chain(valid).find(|e| e.label >= k) {
        return Err(Error::data(format!("label {} out of range for {k} classes", ex.label)));
    }
    let start = Instant::now();
    net.set_embeddings_trainable(cfg.train_embeddings && net.config().train_embeddings);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut adam = AdamState::new(net.params());
    let mut order: Vec<usize> = (0..train.len()).collect();
    let mut history = TrainHistory {
        train_loss: Vec::new(),
        train_accuracy: Vec::new(),
        valid_accuracy: Vec::new(),
        best_epoch: 0,
        wall_time_secs: 0.0,
    };
    let mut best_params = net.params().clone();
    let mut best_acc = f64::NEG_INFINITY;
    let mut since_best = 0;

    for epoch in 0..cfg.max_epochs {
        order.shuffle(&mut rng);
        let mut loss = 0.0;
        let mut correct = 0;
        for batch in order.chunks(cfg.batch_size) {
            let diverged = |e: Error| match e {
                Error::NonFinite(m) => Error::non_finite(format!("{m} at epoch {}", epoch + 1)),
                other => other,
            };
            let mut stats = batch_gradients(&net, train, batch).map_err(diverged)?;
            loss += stats.loss;
            correct += stats.correct;
            stats.grads.scale(1.0 / batch.len() as f64);
            adam_step(net.params_mut(), &stats.grads, &mut adam, cfg.learning_rate).map_err(diverged)?;
        }
        let valid_acc = accuracy_on(&net, valid)?;
        history.train_loss.push(loss / train.len() as f64);
        history.train_accuracy.push(correct as f64 / train.len() as f64);
        history.valid_accuracy.push(valid_acc);
        if valid_acc > best_acc {
            best_acc = valid_acc;
            best_params = net.params().clone();
            history.best_epoch = epoch;
            since_best = 0;
        } else {
            since_best += 1;
            if since_best >= cfg.patience {
                break;
            }
        }
    }
    *net.params_mut() = best_params;
    history.wall_time_secs = start.elapsed().as_secs_f64();
    Ok((net, history))
}
