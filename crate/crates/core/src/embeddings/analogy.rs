use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::vectors::WordVectors;
use crate::error::{Error, Result};

/// Word pairs that all express one relation, e.g. benign -> malignant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationSet {
    pub name: String,
    pub pairs: Vec<(String, String)>,
}

impl RelationSet {
    /// One `a b` pair per line; the set is named after the file stem.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut pairs = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let words: Vec<&str> = line.split_whitespace().collect();
            match words.as_slice() {
                [] => {}
                [a, b] => pairs.push((a.to_uppercase(), b.to_uppercase())),
                _ => {
                    return Err(Error::parse(
                        format!("{}:{}", path.display(), n + 1),
                        "expected two words",
                    ))
                }
            }
        }
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        Ok(Self { name, pairs })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalogyResult {
    pub name: String,
    pub queries: usize,
    pub correct: usize,
    /// `None` when no query could be formed.
    pub accuracy: Option<f64>,
    pub skipped_pairs: usize,
}

/// For every ordered pair of distinct pairs `((a, b), (c, d))`, looks up the
/// cosine nearest neighbour of `b - a + c` (excluding a, b and c) and counts
/// a hit when it is `d`. Pairs with an out-of-vocabulary word are skipped.
pub fn analogy_eval(vectors: &WordVectors, relations: &[RelationSet]) -> Vec<AnalogyResult> {
    let dim = vectors.dim();
    let normed: Vec<f64> = (0..vectors.len())
        .flat_map(|i| {
            let r = vectors.row(i);
            let n = r.iter().map(|x| x * x).sum::<f64>().sqrt();
            r.iter()
                .map(move |x| if n > 0.0 { x / n } else { 0.0 })
                .collect::<Vec<_>>()
        })
        .collect();

    relations
        .iter()
        .map(|rel| {
            let mut pairs = Vec::new();
            let mut skipped = 0;
            for (a, b) in &rel.pairs {
                match (vectors.index(a), vectors.index(b)) {
                    (Some(ia), Some(ib)) => pairs.push((ia, ib)),
                    _ => skipped += 1,
                }
            }
            let mut queries = 0;
            let mut correct = 0;
            for (p, &(a, b)) in pairs.iter().enumerate() {
                for (q, &(c, d)) in pairs.iter().enumerate() {
                    if p == q {
                        continue;
                    }
                    queries += 1;
                    let query: Vec<f64> = (0..dim)
                        .map(|k| vectors.row(b)[k] - vectors.row(a)[k] + vectors.row(c)[k])
                        .collect();
                    let mut best = None;
                    let mut best_sim = f64::NEG_INFINITY;
                    for w in 0..vectors.len() {
                        if w == a || w == b || w == c {
                            continue;
                        }
                        let row = &normed[w * dim..(w + 1) * dim];
                        let sim: f64 = row.iter().zip(&query).map(|(x, y)| x * y).sum();
                        if sim > best_sim {
                            best_sim = sim;
                            best = Some(w);
                        }
                    }
                    if best == Some(d) {
                        correct += 1;
                    }
                }
            }
            AnalogyResult {
                name: rel.name.clone(),
                queries,
                correct,
                accuracy: (queries > 0).then(|| correct as f64 / queries as f64),
                skipped_pairs: skipped,
            }
        })
        .collect()
}

/// Settings for a corpus whose co-occurrence structure plants analogies.
///
/// Word `W{base}{role}` appears next to context words specific to its base
/// and context words specific to its role, so in a log-bilinear fit its
/// vector is roughly `base + role` and `(W{i}0, W{i}1)` pairs all share one
/// offset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationalSpec {
    pub bases: usize,
    pub context_per_base: usize,
    pub context_per_role: usize,
    pub docs_per_word: usize,
    /// Context words drawn from each of the two groups per document.
    pub context_draws: usize,
    pub seed: u64,
}

impl Default for RelationalSpec {
    fn default() -> Self {
        Self {
            bases: 8,
            context_per_base: 4,
            context_per_role: 4,
            docs_per_word: 60,
            context_draws: 3,
            seed: 0,
        }
    }
}

/// Returns tokenized documents plus the relation set `(W{i}0, W{i}1)`.
pub fn generate_relational_corpus(spec: &RelationalSpec) -> (Vec<Vec<String>>, RelationSet) {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let word = |i: usize, r: usize| format!("W{i}R{r}");
    let base_ctx = |i: usize, k: usize| format!("B{i}X{k}");
    let role_ctx = |r: usize, k: usize| format!("R{r}X{k}");
    let mut docs = Vec::new();
    for i in 0..spec.bases {
        for r in 0..2 {
            for _ in 0..spec.docs_per_word {
                let mut ctx = Vec::with_capacity(2 * spec.context_draws + 1);
                for _ in 0..spec.context_draws {
                    ctx.push(base_ctx(i, rng.random_range(0..spec.context_per_base)));
                    ctx.push(role_ctx(r, rng.random_range(0..spec.context_per_role)));
                }
                ctx.shuffle(&mut rng);
                let mid = ctx.len() / 2;
                ctx.insert(mid, word(i, r));
                docs.push(ctx);
            }
        }
    }
    docs.shuffle(&mut rng);
    let pairs = (0..spec.bases).map(|i| (word(i, 0), word(i, 1))).collect();
    (
        docs,
        RelationSet {
            name: "planted".into(),
            pairs,
        },
    )
}
