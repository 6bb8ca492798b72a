//! Search-based fairness testing over the hyperparameter space of learning
//! algorithms.
//!
//! The crate evaluates configurations of an instrumented learner on a fixed
//! train/validation split, archives those that are not Pareto-dominated on
//! accuracy against either low or high group bias (EOD/AOD), and explains the
//! archive by clustering it in the accuracy/bias plane and fitting a shallow
//! CART tree over the hyperparameters.
//!
//! | module | role |
//! |---|---|
//! | [`data`] | CSV loading, protected groups, 75/25 split |
//! | [`space`] | hyperparameter domains, sampling, mutation |
//! | [`learners`] | logistic regression, decision tree, random forest |
//! | [`metrics`] | per-group confusion counts, accuracy, EOD, AOD |
//! | [`search`] | random / black-box / gray-box search loop and corpus |
//! | [`explain`] | spectral clustering, CART explanations, frequency mining |
//! | [`campaign`] | repeated runs, summaries, mitigation, report files |
//! | [`synthetic`] | generators for planted-bias benchmarks |
//!
//! Runnable walkthroughs live in the crate's `examples/` directory.

pub mod campaign;
pub mod data;
pub mod error;
pub mod explain;
pub mod learners;
pub mod metrics;
pub mod search;
pub mod space;
pub mod stats;
pub mod synthetic;

pub use data::{group_indices, load_dataset, split_dataset, DataSplit, Dataset, DatasetSchema, FeatureMatrix};
pub use error::{Error, ErrorKind, Result};
pub use learners::{train, LearnerKind, TraceLog, TrainedModel};
pub use metrics::{aod, eod, evaluate, group_confusion, FairnessReport, GroupStats};
pub use search::{
    is_promising, path_signature, run_search, run_search_observed, weighted_pick, SearchSettings, SearchType, TestCase,
    TestCorpus,
};
pub use space::{mutate_config, parse_space, sample_uniform, Configuration, HyperparameterSpace, ParamDomain, ParamValue};
