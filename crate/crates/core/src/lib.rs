//! Online bagging ensembles for imbalanced, drifting data streams.
//!
//! The crate bundles everything needed to run the comparison end to end:
//!
//! - [`stream`]: examples, the sliding window with its kNN query, decayed
//!   class sizes and seeded random streams;
//! - [`generator`]: synthetic streams with borderline/rare minority examples,
//!   sub-cluster splits, merges and moves, and class-ratio drift;
//! - [`tree`]: the Hoeffding tree used as base learner;
//! - [`ensemble`]: OB, OOB, UOB, NOOB, NUOB and the hybrid HNOB;
//! - [`evaluation`]: prequential recall and G-mean;
//! - [`stats`]: Friedman ranks and Nemenyi critical differences;
//! - [`experiment`]: the seeded experiment runner behind the CLI.

pub mod ensemble;
pub mod error;
pub mod evaluation;
pub mod experiment;
pub mod generator;
pub mod stats;
pub mod stream;
pub mod tree;

pub use ensemble::{build_classifier, ClassifierKind, EnsembleConfig, EnsembleModel, HybridModel, StreamClassifier};
pub use generator::{parse_scenario, GeneratorState, ScenarioSpec};
pub use stream::{ClassLabel, Example};
