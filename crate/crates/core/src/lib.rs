//! Predicting which MOOC forum threads an instructor will step into.
//!
//! The pipeline runs from a JSONL thread corpus through text
//! canonicalization, thread features and a class-weighted L1 logistic
//! regression, to an evaluation harness with per-course cross validation,
//! leave-one-course-out runs, feature studies, baselines and annotator
//! agreement. [`syngen`] produces seeded synthetic courses for all of it.
//!
//! ```no_run
//! use intervene::{eval, syngen};
//!
//! let corpus = syngen::generate(&syngen::default_d14_like_spec())?;
//! let courses = eval::prepare_corpus(&corpus, &intervene::TextProcessor::default());
//! let report = eval::loo_course_cv(&courses, &eval::ExperimentConfig::default())?;
//! println!("weighted F1 {:.3}", report.weighted_macro.f1);
//! # Ok::<(), intervene::Error>(())
//! ```

pub mod artifact;
pub mod cli;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod features;
pub mod model;
pub mod report;
pub mod syngen;
pub mod textprep;

pub use artifact::ModelArtifact;
pub use corpus::{AuthorRole, Comment, Corpus, Course, ForumType, Post, Thread};
pub use error::{Error, Result};
pub use eval::{ExperimentConfig, ExperimentReport, Metrics};
pub use features::{FeatureGroup, FeatureGroups};
pub use model::{ModelParams, TrainConfig};
pub use textprep::{TextConfig, TextProcessor};
