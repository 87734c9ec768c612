//! Accuracy, top-l accuracy, macro F1, fidelity, difficulty groups and the
//! paired significance tests.

mod metrics;
mod report;
mod significance;

pub use metrics::{
    accuracy, fidelity, group_by_difficulty, macro_f1, macro_f1_from_labels, ranking, top_l_accuracy, ClassScores,
    Difficulty, DifficultyGroups, F1Report, GroupScore, PredictionSet,
};
pub use report::{compare_to_reference, Comparison, MetricsReport, SignificanceTable, TopL};
pub use significance::{macro_t_test, mcnemar_from_counts, mcnemar_test, stars, McNemar, MacroTTest};
