//! Word-importance highlighting and top-k distillation with the
//! interpretable model.

mod distill;
mod highlight;
mod render;

pub use distill::{distill_document, distill_top_k, top_k_positions, DistilledCorpus};
pub use highlight::{
    extract_importance, Band, HighlightedDocument, Mark, HIGH_THRESHOLD, LOW_THRESHOLD, MEDIUM_THRESHOLD,
};
pub use render::{render_html, render_terminal, tokens_from_markup, PALETTE};
