//! Classifiers that assign category codes to short free-text reports.
//!
//! The crate is organised bottom-up:
//!
//! * [`tensor`]: dense tensors, a reverse-mode tape and gradient checking.
//! * [`corpus`]: record preprocessing, splitting and a synthetic corpus generator.
//! * [`embeddings`]: vocabulary, co-occurrence counting and word-vector training.
//! * [`networks`]: bidirectional GRU classifiers (concat, attention, max,
//!   interpretable, hierarchical) and a convolutional baseline.
//! * [`linear`]: tf-idf features with a one-vs-rest linear SVM.
//! * [`model_file`]: the on-disk container for both kinds of model.
//! * [`training`]: Adam, the training loop and grid search.
//! * [`evaluation`]: accuracy, top-l accuracy, macro F1, fidelity and
//!   significance tests.
//! * [`explain`]: word-importance extraction, highlighting and top-k distillation.

pub mod corpus;
pub mod embeddings;
pub mod error;
pub mod evaluation;
pub mod explain;
pub mod linear;
pub mod model_file;
pub mod networks;
pub mod tensor;
pub mod training;

pub use error::{Error, Result};
