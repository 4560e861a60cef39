//! Synthetic shapes, dataset handling and accuracy evaluation.

pub mod dataset;
pub mod evaluate;
pub mod suite;
pub mod synth;

pub use dataset::{build_registry_from_dir, list_dataset, DatasetEntry, RegistryBuildOptions};
pub use evaluate::{evaluate_dir, evaluate_queries, EvalOptions, EvaluationReport, Outcome, Query};
pub use suite::{SuiteConfig, SyntheticSample};
pub use synth::{generate_synthetic, perturb_boundary, ShapeKind, SynthSpec};
