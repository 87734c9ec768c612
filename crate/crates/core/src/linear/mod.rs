//! Bag-of-words TF-IDF features with a one-vs-rest linear SVM.

mod svm;
mod tfidf;

pub use svm::{svm_predict, svm_train, LinearModel, SvmConfig, SvmOutcome};
pub use tfidf::{tfidf_fit_transform, SparseRow, TfidfModel};

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// Featurizer plus classifier, stored together.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearClassifier {
    pub tfidf: TfidfModel,
    pub svm: LinearModel,
}

impl LinearClassifier {
    /// Fits the featurizer on `docs` and trains the SVM on the result.
    /// Returns the classifier and the per-epoch objective.
    pub fn fit(
        docs: &[Vec<String>],
        labels: &[usize],
        num_classes: usize,
        ngram_max: usize,
        cfg: &SvmConfig,
    ) -> Result<(Self, Vec<f64>)> {
        let (tfidf, rows) = tfidf_fit_transform(docs, ngram_max)?;
        let out = svm_train(&rows, labels, num_classes, tfidf.num_features(), cfg)?;
        Ok((
            Self {
                tfidf,
                svm: out.model,
            },
            out.objective,
        ))
    }

    pub fn num_classes(&self) -> usize {
        self.svm.num_classes()
    }

    pub fn scores(&self, tokens: &[String]) -> Vec<f64> {
        self.svm.scores(&self.tfidf.transform(tokens))
    }

    pub fn predict(&self, tokens: &[String]) -> usize {
        svm_predict(&self.svm, &self.tfidf.transform(tokens)).0
    }
}
