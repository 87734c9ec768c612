//! Adam, the minibatch training loop and grid search.

mod adam;
mod grid;
mod trainer;

pub use adam::{adam_step, AdamState, ADAM_EPS, BETA1, BETA2};
pub use grid::{
    apply_point, grid_search, rank_results, reference_grid, write_results_csv, GridPoint, GridResult,
    HyperGrid, PointOutcome, Task,
};
pub use trainer::{accuracy_on, examples_for, predict_all, train, Example, TrainConfig, TrainHistory};
