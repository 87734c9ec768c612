use serde::{Deserialize, Serialize};

use crate::corpus::Document;
use crate::error::{Error, Result};
use crate::networks::{ImportanceMatrix, Network, Prediction};

pub const HIGH_THRESHOLD: f64 = 0.8;
pub const MEDIUM_THRESHOLD: f64 = 0.3;
pub const LOW_THRESHOLD: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Band {
    Low,
    Medium,
    High,
}

impl Band {
    /// `[0.8, 1]` high, `[0.3, 0.8)` medium, `[0.1, 0.3)` low, below that nothing.
    pub fn of(u: f64) -> Option<Band> {
        if u >= HIGH_THRESHOLD {
            Some(Band::High)
        } else if u >= MEDIUM_THRESHOLD {
            Some(Band::Medium)
        } else if u >= LOW_THRESHOLD {
            Some(Band::Low)
        } else {
            None
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Band::Low => "low",
            Band::Medium => "medium",
            Band::High => "high",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mark {
    pub class: usize,
    pub band: Band,
}

/// Tokens with their banded importance marks per class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HighlightedDocument {
    pub tokens: Vec<String>,
    /// Marks per token, in class order.
    pub marks: Vec<Vec<Mark>>,
    /// Classes with at least one marked token, ascending.
    pub relevant: Vec<usize>,
}

impl HighlightedDocument {
    pub fn from_importance(tokens: Vec<String>, importance: &ImportanceMatrix) -> Result<Self> {
        if tokens.len() != importance.len() {
            return Err(Error::contract(format!(
                "{} tokens but importance for {} positions",
                tokens.len(),
                importance.len()
            )));
        }
        let marks: Vec<Vec<Mark>> = (0..tokens.len())
            .map(|t| {
                (0..importance.classes())
                    .filter_map(|class| Band::of(importance.get(class, t)).map(|band| Mark { class, band }))
                    .collect()
            })
            .collect();
        let mut relevant: Vec<usize> = marks.iter().flatten().map(|m| m.class).collect();
        relevant.sort_unstable();
        relevant.dedup();
        Ok(Self {
            tokens,
            marks,
            relevant,
        })
    }

    pub fn marked_tokens(&self, class: usize) -> Vec<(usize, Band)> {
        self.marks
            .iter()
            .enumerate()
            .filter_map(|(t, ms)| ms.iter().find(|m| m.class == class).map(|m| (t, m.band)))
            .collect()
    }
}

/// Runs the interpretable model on `doc` and bands its word importances.
pub fn extract_importance(net: &Network, doc: &Document) -> Result<(HighlightedDocument, Prediction)> {
    if !net.config().is_interpretable() {
        return Err(Error::contract(format!(
            "{} has no per-word class importances",
            net.config().family
        )));
    }
    let pred = net.predict_doc(doc)?;
    let importance = pred.importance.as_ref().expect("interpretable model yields importances");
    let highlighted = HighlightedDocument::from_importance(doc.tokens.clone(), importance)?;
    Ok((highlighted, pred))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn band_edges() {
        assert_eq!(Band::of(0.8), Some(Band::High));
        assert_eq!(Band::of(0.7999), Some(Band::Medium));
        assert_eq!(Band::of(0.3), Some(Band::Medium));
        assert_eq!(Band::of(0.2999), Some(Band::Low));
        assert_eq!(Band::of(0.1), Some(Band::Low));
        assert_eq!(Band::of(0.0999), None);
    }

    #[test]
    fn relevance_rule() {
        let tokens: Vec<String> = ["a", "b", "c"].map(String::from).to_vec();
        let quiet = ImportanceMatrix::new(2, 3, vec![0.05; 6]).unwrap();
        assert!(HighlightedDocument::from_importance(tokens.clone(), &quiet)
            .unwrap()
            .relevant
            .is_empty());
        let m = ImportanceMatrix::new(2, 3, vec![0.0, 0.9, 0.2, 0.0, 0.0, 0.1]).unwrap();
        let h = HighlightedDocument::from_importance(tokens.clone(), &m).unwrap();
        assert_eq!(h.relevant, vec![0, 1]);
        assert_eq!(h.marked_tokens(0), vec![(1, Band::High), (2, Band::Low)]);
        assert_eq!(h.marked_tokens(1), vec![(2, Band::Low)]);
        assert!(HighlightedDocument::from_importance(tokens[..2].to_vec(), &m).is_err());
    }
}
