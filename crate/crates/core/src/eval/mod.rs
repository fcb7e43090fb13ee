//! Evaluation: datasets, cross-validation, accuracy over observation
//! fractions, and generators for synthetic fixtures.

pub mod cv;
pub mod dataset;
pub mod experiment;
pub mod grid;
pub mod metrics;
pub mod synthetic;

pub use cv::{make_cv_plan, CvPlan, Fold};
pub use dataset::{load_dataset, DatasetEntry, RecognitionDataset};
pub use experiment::{default_lambda_grid, run_experiment, AccuracyTable, ExperimentConfig, ExperimentResult, Method};
pub use grid::{generate_gridworld, GridSpec, GridWorld};
pub use metrics::{accuracy, lenient_accuracy, prefix_index, ProblemOutcome};
