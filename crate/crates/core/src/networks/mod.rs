//! Recurrent and convolutional document classifiers built on the tape.
//!
//! Every recurrent family shares the same pipeline: embed each token, run a
//! bidirectional GRU, map each position through an MLP `G`, pool positions
//! with an aggregator and classify. Families differ in the aggregator, in
//! whether the pooled vector is already the logit vector (the interpretable
//! variant) and in whether the pipeline runs twice, over words then over
//! sentences (the hierarchical variants).

mod layers;
mod model;

pub use layers::{
    aggregate_attention, aggregate_max, apply_stack, encode_bidirectional, gru_step, Activation,
    Attention, BiEncoder, BoundAttention, BoundDense, BoundEncoder, BoundGru, Dense, Encoded,
    GruCell,
};
pub use model::{Forward, ImportanceMatrix, Input, Network, Prediction};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Model families, named as in the usual results tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "SVM")]
    Svm,
    #[serde(rename = "CNN")]
    Cnn,
    /// Bidirectional GRU with concatenated extreme states.
    #[serde(rename = "GRU")]
    Gru,
    #[serde(rename = "ATT")]
    Att,
    #[serde(rename = "MAX")]
    Max,
    /// Interpretable max-pooling model: `u_t` has one entry per class.
    #[serde(rename = "MAXi")]
    MaxI,
    #[serde(rename = "MAXh")]
    MaxH,
    #[serde(rename = "ATTh")]
    AttH,
}

impl Family {
    pub const ALL: [Family; 8] = [
        Family::Svm,
        Family::Cnn,
        Family::Gru,
        Family::Att,
        Family::Max,
        Family::MaxI,
        Family::MaxH,
        Family::AttH,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Svm => "SVM",
            Family::Cnn => "CNN",
            Family::Gru => "GRU",
            Family::Att => "ATT",
            Family::Max => "MAX",
            Family::MaxI => "MAXi",
            Family::MaxH => "MAXh",
            Family::AttH => "ATTh",
        }
    }

    pub fn is_neural(self) -> bool {
        self != Family::Svm
    }

    pub fn is_recurrent(self) -> bool {
        !matches!(self, Family::Svm | Family::Cnn)
    }

    /// Aggregator used by a recurrent family (`None` for SVM and CNN).
    pub fn aggregator(self) -> Option<Aggregator> {
        match self {
            Family::Gru => Some(Aggregator::Concat),
            Family::Att | Family::AttH => Some(Aggregator::Attention),
            Family::Max | Family::MaxI | Family::MaxH => Some(Aggregator::Max),
            Family::Svm | Family::Cnn => None,
        }
    }

    pub fn is_hierarchical(self) -> bool {
        matches!(self, Family::MaxH | Family::AttH)
    }

    pub fn is_interpretable(self) -> bool {
        self == Family::MaxI
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                Error::parse(
                    "model family",
                    format!("unknown family {s:?} (expected one of SVM, CNN, GRU, ATT, MAX, MAXi, MAXh, ATTh)"),
                )
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Aggregator {
    /// `(h_T^f, h_1^r)`.
    Concat,
    Attention,
    Max,
}

/// Architecture hyperparameters of a neural model.
///
/// `g_layers` counts every layer of `G`, including the output layer.
/// For the interpretable family the output layer has `num_classes` units and
/// `g_width` applies only to the layers before it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub family: Family,
    pub num_classes: usize,
    pub embedding_dim: usize,
    pub train_embeddings: bool,
    pub rnn_layers: usize,
    pub rnn_width: usize,
    pub g_layers: usize,
    pub g_width: usize,
    pub attention_width: usize,
    /// Sentence-level GRU of the hierarchical families.
    pub sentence_rnn_layers: usize,
    pub sentence_rnn_width: usize,
    pub sentence_attention_width: usize,
    /// Width of the per-token projection in front of the convolutions.
    pub cnn_projection: usize,
    /// Filters per convolution width.
    pub cnn_filters: usize,
}

/// Convolution widths of the CNN baseline.
pub const CNN_WIDTHS: [usize; 3] = [3, 4, 5];

impl ModelConfig {
    /// Small defaults that train in seconds on desk-scale corpora.
    pub fn new(family: Family, num_classes: usize, embedding_dim: usize) -> Self {
        let g_layers = match family {
            Family::Gru | Family::Cnn | Family::Svm => 0,
            _ => 1,
        };
        Self {
            family,
            num_classes,
            embedding_dim,
            train_embeddings: true,
            rnn_layers: 1,
            rnn_width: 32,
            g_layers,
            g_width: 64,
            attention_width: 32,
            sentence_rnn_layers: 1,
            sentence_rnn_width: 32,
            sentence_attention_width: 32,
            cnn_projection: 32,
            cnn_filters: 32,
        }
    }

    pub fn aggregator(&self) -> Option<Aggregator> {
        self.family.aggregator()
    }

    pub fn is_hierarchical(&self) -> bool {
        self.family.is_hierarchical()
    }

    pub fn is_interpretable(&self) -> bool {
        self.family.is_interpretable()
    }

    /// Width of `u_t`, the per-position output of `G`.
    pub fn u_width(&self) -> usize {
        if self.is_interpretable() {
            self.num_classes
        } else if self.g_layers == 0 {
            2 * self.rnn_width
        } else {
            self.g_width
        }
    }

    pub fn validate(&self) -> Result<()> {
        let f = self.family;
        if !f.is_neural() {
            return Err(Error::contract("SVM is not a neural family"));
        }
        if self.num_classes < 2 {
            return Err(Error::contract("a classifier needs at least 2 classes"));
        }
        if self.embedding_dim == 0 {
            return Err(Error::contract("embedding dimension must be positive"));
        }
        if f == Family::Cnn {
            if self.cnn_projection == 0 || self.cnn_filters == 0 {
                return Err(Error::contract("CNN projection and filter counts must be positive"));
            }
            return Ok(());
        }
        if self.rnn_layers == 0 || self.rnn_width == 0 {
            return Err(Error::contract("GRU layers and width must be positive"));
        }
        if self.aggregator() == Some(Aggregator::Concat) && self.g_layers != 0 {
            return Err(Error::contract("the concat aggregator uses no G layers"));
        }
        if self.is_interpretable() && self.g_layers == 0 {
            return Err(Error::contract(
                "the interpretable model needs at least one G layer (its output layer)",
            ));
        }
        let needs_g_width = if self.is_interpretable() {
            self.g_layers > 1
        } else {
            self.g_layers > 0
        };
        if needs_g_width && self.g_width == 0 {
            return Err(Error::contract("G width must be positive"));
        }
        if self.aggregator() == Some(Aggregator::Attention) && self.attention_width == 0 {
            return Err(Error::contract("attention width must be positive"));
        }
        if self.is_hierarchical() {
            if self.sentence_rnn_layers == 0 || self.sentence_rnn_width == 0 {
                return Err(Error::contract("sentence GRU layers and width must be positive"));
            }
            if self.aggregator() == Some(Aggregator::Attention) && self.sentence_attention_width == 0 {
                return Err(Error::contract("sentence attention width must be positive"));
            }
        }
        Ok(())
    }

    /// Names accepted by [`ModelConfig::set_axis`].
    pub const AXES: [&'static str; 11] = [
        "embedding_dim",
        "rnn_layers",
        "rnn_width",
        "g_layers",
        "g_width",
        "attention_width",
        "sentence_rnn_layers",
        "sentence_rnn_width",
        "sentence_attention_width",
        "cnn_projection",
        "cnn_filters",
    ];

    /// Sets one integer hyperparameter by name.
    pub fn set_axis(&mut self, name: &str, value: usize) -> Result<()> {
        let slot = match name {
            "embedding_dim" => &mut self.embedding_dim,
            "rnn_layers" => &mut self.rnn_layers,
            "rnn_width" => &mut self.rnn_width,
            "g_layers" => &mut self.g_layers,
            "g_width" => &mut self.g_width,
            "attention_width" => &mut self.attention_width,
            "sentence_rnn_layers" => &mut self.sentence_rnn_layers,
            "sentence_rnn_width" => &mut self.sentence_rnn_width,
            "sentence_attention_width" => &mut self.sentence_attention_width,
            "cnn_projection" => &mut self.cnn_projection,
            "cnn_filters" => &mut self.cnn_filters,
            other => {
                return Err(Error::contract(format!("unknown model hyperparameter {other:?}")))
            }
        };
        *slot = value;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_names_round_trip() {
        for f in Family::ALL {
            assert_eq!(f.name().parse::<Family>().unwrap(), f);
            let json = serde_json::to_string(&f).unwrap();
            assert_eq!(json, format!("\"{}\"", f.name()));
        }
        assert_eq!("maxi".parse::<Family>().unwrap(), Family::MaxI);
        assert!("LSTM".parse::<Family>().is_err());
    }

    #[test]
    fn config_invariants() {
        let mut c = ModelConfig::new(Family::Gru, 3, 8);
        assert!(c.validate().is_ok());
        c.g_layers = 1;
        assert!(c.validate().is_err());

        let mut c = ModelConfig::new(Family::MaxI, 5, 8);
        assert_eq!(c.u_width(), 5);
        c.g_layers = 0;
        assert!(c.validate().is_err());

        let c = ModelConfig::new(Family::Max, 1, 8);
        assert!(c.validate().is_err());
        assert!(ModelConfig::new(Family::Svm, 3, 8).validate().is_err());
    }

    #[test]
    fn set_axis_by_name() {
        let mut c = ModelConfig::new(Family::Max, 3, 8);
        for (i, axis) in ModelConfig::AXES.iter().enumerate() {
            c.set_axis(axis, i + 1).unwrap();
        }
        assert_eq!(c.rnn_width, 3);
        assert!(c.set_axis("dropout", 1).is_err());
    }
}
