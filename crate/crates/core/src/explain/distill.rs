use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{write_split, CorpusSplit, Document, Part};
use crate::error::{Error, Result};
use crate::networks::Network;

/// Positions of the `k` highest scores, returned in ascending order.
/// Equal scores favor the earlier position.
pub fn top_k_positions(scores: &[f64], k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    idx.truncate(k);
    idx.sort_unstable();
    idx
}

/// Keeps the `k` tokens whose largest class importance is highest, in
/// their original order.
pub fn distill_document(net: &Network, doc: &Document, k: usize) -> Result<Document> {
    if k == 0 {
        return Err(Error::contract("distillation needs k >= 1"));
    }
    if !net.config().is_interpretable() {
        return Err(Error::contract(format!(
            "{} has no per-word class importances",
            net.config().family
        )));
    }
    if doc.len() <= k {
        return Ok(doc.clone());
    }
    let pred = net.predict_doc(doc)?;
    let scores = pred.importance.expect("interpretable model yields importances").token_scores();
    let tokens = top_k_positions(&scores, k)
        .into_iter()
        .map(|t| doc.tokens[t].clone())
        .collect();
    Ok(Document {
        tokens,
        sentences: None,
        label: doc.label.clone(),
        inserted_at: doc.inserted_at,
    })
}

/// A corpus reduced to each document's `k` most important words.
#[derive(Debug, Clone, PartialEq)]
pub struct DistilledCorpus {
    pub k: usize,
    /// Where the full-text corpus came from, if known.
    pub source: Option<String>,
    pub split: CorpusSplit,
}

#[derive(Serialize, Deserialize)]
struct Provenance {
    distilled_k: usize,
    source: Option<String>,
}

impl DistilledCorpus {
    /// Writes the split files (each record tagged with `distilled_k`) and a
    /// `distillation.json` naming the source.
    pub fn write(&self, dir: &Path) -> Result<()> {
        write_split(dir, &self.split, Some(self.k))?;
        let path = dir.join("distillation.json");
        let p = Provenance {
            distilled_k: self.k,
            source: self.source.clone(),
        };
        let text = serde_json::to_string_pretty(&p).map_err(|e| Error::parse("provenance", e))?;
        fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))
    }
}

/// Distills every part of `split` with the interpretable model `net`.
pub fn distill_top_k(net: &Network, split: &CorpusSplit, k: usize, source: Option<String>) -> Result<DistilledCorpus> {
    let mut out = CorpusSplit {
        train: Vec::new(),
        valid: Vec::new(),
        test: Vec::new(),
        class_map: split.class_map.clone(),
    };
    for part in Part::ALL {
        *out.part_mut(part) = split
            .part(part)
            .par_iter()
            .map(|d| distill_document(net, d, k))
            .collect::<Result<Vec<_>>>()?;
    }
    Ok(DistilledCorpus { k, source, split: out })
}
