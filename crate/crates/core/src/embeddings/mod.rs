//! Vocabulary, windowed co-occurrence counts and word-vector training.

mod analogy;
mod cooc;
mod glove;
mod vectors;
mod vocab;

pub use analogy::{
    analogy_eval, generate_relational_corpus, AnalogyResult, RelationSet, RelationalSpec,
};
pub use cooc::{count_cooccurrences, CooccurrenceTable};
pub use glove::{train_embeddings, GloveConfig, GloveModel, GloveOutcome};
pub use vectors::{cosine, WordVectors};
pub use vocab::{Vocabulary, UNK, UNK_TOKEN};

/// Default window for co-occurrence counting.
pub const DEFAULT_WINDOW: usize = 15;
/// Default minimum token count for the embedding vocabulary.
pub const DEFAULT_MIN_COUNT: u64 = 5;
