//! Records, documents and corpus splits.
//!
//! A [`RawRecord`] carries the three free-text fields of a report. It is
//! turned into a [`Document`] (uppercase tokens, optional sentence ranges)
//! by [`preprocess`], then deduplicated, split by insertion date and
//! filtered for rare classes.

mod io;
mod split;
mod synthetic;
mod text;

pub use io::{
    document_to_record, read_class_map, read_documents, read_records, read_split, write_class_map,
    write_documents, write_records, write_split,
};
pub use split::{deduplicate, filter_rare_classes, temporal_split, CorpusSplit, Part};
pub use synthetic::{
    generate_synthetic, DocCounts, SyntheticCorpus, SyntheticMetadata, SyntheticSpec,
};
pub use text::{preprocess, segment_sentences, tokenize};

use std::ops::Range;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::Result;

/// One line of a corpus file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub macroscopy: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnosis: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anamnesis: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub inserted_at: NaiveDate,
    /// Set on corpora produced by top-k distillation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distilled_k: Option<usize>,
}

impl RawRecord {
    pub fn with_diagnosis(text: impl Into<String>, label: Option<String>, date: NaiveDate) -> Self {
        Self {
            macroscopy: None,
            diagnosis: Some(text.into()),
            anamnesis: None,
            label,
            inserted_at: date,
            distilled_k: None,
        }
    }

    pub fn is_usable(&self) -> bool {
        [&self.macroscopy, &self.diagnosis, &self.anamnesis]
            .iter()
            .any(|f| f.as_deref().is_some_and(|s| !s.trim().is_empty()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub tokens: Vec<String>,
    /// Half-open token ranges, in order, covering `0..tokens.len()`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sentences: Option<Vec<Range<usize>>>,
    pub label: Option<String>,
    pub inserted_at: NaiveDate,
}

impl Document {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Stored sentence ranges, or the period rule applied on the fly.
    pub fn sentence_ranges(&self) -> Vec<Range<usize>> {
        match &self.sentences {
            Some(s) => s.clone(),
            None => text::sentence_ranges(&self.tokens),
        }
    }

    pub fn text(&self) -> String {
        self.tokens.join(" ")
    }
}

/// Preprocesses records (skipping empty ones), segments sentences,
/// deduplicates, splits by date and drops classes with fewer than
/// `min_test` test documents.
pub fn prepare_split(records: &[RawRecord], test_frac: f64, valid_frac: f64, min_test: usize) -> Result<CorpusSplit> {
    let docs: Vec<Document> = records.iter().filter_map(preprocess).map(segment_sentences).collect();
    let split = temporal_split(deduplicate(docs), test_frac, valid_frac)?;
    filter_rare_classes(split, min_test)
}
