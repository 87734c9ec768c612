use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sparse row: `(column, value)` pairs sorted by column.
pub type SparseRow = Vec<(usize, f64)>;

/// Term columns and smoothed inverse document frequencies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "TfidfRepr")]
pub struct TfidfModel {
    ngram_max: usize,
    terms: Vec<String>,
    df: Vec<usize>,
    idf: Vec<f64>,
    num_docs: usize,
    #[serde(skip)]
    index: HashMap<String, usize>,
}

#[derive(Deserialize)]
struct TfidfRepr {
    ngram_max: usize,
    terms: Vec<String>,
    df: Vec<usize>,
    idf: Vec<f64>,
    num_docs: usize,
}

impl From<TfidfRepr> for TfidfModel {
    fn from(r: TfidfRepr) -> Self {
        let mut m = Self {
            ngram_max: r.ngram_max,
            terms: r.terms,
            df: r.df,
            idf: r.idf,
            num_docs: r.num_docs,
            index: HashMap::new(),
        };
        m.rebuild_index();
        m
    }
}

fn ngrams(tokens: &[String], ngram_max: usize) -> Vec<String> {
    let mut out: Vec<String> = tokens.to_vec();
    for n in 2..=ngram_max {
        out.extend(tokens.windows(n).map(|w| w.join(" ")));
    }
    out
}

impl TfidfModel {
    /// Columns are the training terms in lexicographic order.
    /// `idf = ln((1 + N) / (1 + df)) + 1`.
    pub fn fit<'a, I>(docs: I, ngram_max: usize) -> Result<Self>
    where
        I: IntoIterator<Item = &'a [String]>,
    {
        if !(1..=2).contains(&ngram_max) {
            return Err(Error::contract("ngram_max must be 1 or 2"));
        }
        let mut df: BTreeMap<String, usize> = BTreeMap::new();
        let mut n = 0;
        for doc in docs {
            n += 1;
            let mut seen: Vec<String> = ngrams(doc, ngram_max);
            seen.sort_unstable();
            seen.dedup();
            for t in seen {
                *df.entry(t).or_default() += 1;
            }
        }
        if n == 0 {
            return Err(Error::data("cannot fit tf-idf on an empty corpus"));
        }
        let (terms, df): (Vec<String>, Vec<usize>) = df.into_iter().unzip();
        let idf = df
            .iter()
            .map(|&d| ((1.0 + n as f64) / (1.0 + d as f64)).ln() + 1.0)
            .collect();
        let mut m = Self {
            ngram_max,
            terms,
            df,
            idf,
            num_docs: n,
            index: HashMap::new(),
        };
        m.rebuild_index();
        Ok(m)
    }

    fn rebuild_index(&mut self) {
        self.index = self.terms.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
    }

    pub fn num_features(&self) -> usize {
        self.terms.len()
    }

    pub fn ngram_max(&self) -> usize {
        self.ngram_max
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn idf(&self) -> &[f64] {
        &self.idf
    }

    pub fn df(&self) -> &[usize] {
        &self.df
    }

    pub fn num_docs(&self) -> usize {
        self.num_docs
    }

    pub fn column(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }

    /// Raw counts times idf, L2-normalized. Unseen terms are dropped.
    pub fn transform(&self, tokens: &[String]) -> SparseRow {
        let mut counts: BTreeMap<usize, f64> = BTreeMap::new();
        for g in ngrams(tokens, self.ngram_max) {
            if let Some(c) = self.column(&g) {
                *counts.entry(c).or_default() += 1.0;
            }
        }
        let mut row: SparseRow = counts.into_iter().map(|(c, tf)| (c, tf * self.idf[c])).collect();
        let norm = row.iter().map(|(_, v)| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            for (_, v) in &mut row {
                *v /= norm;
            }
        }
        row
    }
}

/// Fits on `docs` and returns the model with the transformed training rows.
pub fn tfidf_fit_transform(docs: &[Vec<String>], ngram_max: usize) -> Result<(TfidfModel, Vec<SparseRow>)> {
    let model = TfidfModel::fit(docs.iter().map(Vec::as_slice), ngram_max)?;
    let rows = docs.iter().map(|d| model.transform(d)).collect();
    Ok((model, rows))
}
