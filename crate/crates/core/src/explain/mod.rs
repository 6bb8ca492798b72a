//! Statistical debugging of a corpus: cluster test cases in the
//! accuracy/bias plane, then explain the clusters with a depth-3 CART tree
//! over the hyperparameters.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::search::{Metric, TestCase, TestCorpus};
use crate::space::{Configuration, HyperparameterSpace};

pub mod cart;
pub mod mining;
pub mod spectral;

pub use cart::{fit_cart, parse_node, render_node, ExplanationTree, Node, Predicate};
pub use mining::{mine_frequent, MiningReport, MiningRow};
pub use spectral::{spectral_cluster, ClusterModel, MAX_CLUSTERS};

pub const EXPLANATION_FORMAT: &str = "parfait-explanation";
pub const EXPLANATION_VERSION: u32 = 1;

/// Clusters `points` with k = 2 and, if allowed, k = 3, explains each clustering,
/// and keeps k = 3 only when its tree is strictly more accurate.
pub fn choose_cluster_count(
    points: &[(f64, f64)],
    configs: &[Configuration],
    space: &HyperparameterSpace,
    clusters_max: usize,
    seed: u64,
) -> Result<(ClusterModel, ExplanationTree)> {
    if points.len() != configs.len() {
        return Err(Error::LengthMismatch(format!(
            "{} points, {} configurations",
            points.len(),
            configs.len()
        )));
    }
    if points.len() < 3 {
        return Err(Error::Size(format!("need at least 3 cases, got {}", points.len())));
    }
    if !(2..=MAX_CLUSTERS).contains(&clusters_max) {
        return Err(Error::validation(
            "clusters_max",
            format!("must be 2 or 3, got {clusters_max}"),
        ));
    }
    let fit = |k: usize| -> Result<(ClusterModel, ExplanationTree)> {
        let clusters = spectral_cluster(points, k, seed)?;
        let tree = fit_cart(configs, &clusters.labels, space)?;
        Ok((clusters, tree))
    };
    let two = fit(2)?;
    if clusters_max < 3 {
        return Ok(two);
    }
    let three = fit(3)?;
    log::debug!(
        "explanation accuracy k=2 {:.4}, k=3 {:.4}",
        two.1.training_accuracy,
        three.1.training_accuracy
    );
    Ok(if three.1.training_accuracy > two.1.training_accuracy {
        three
    } else {
        two
    })
}

/// A full explanation of a set of test cases.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Explanation {
    pub format: String,
    pub version: u32,
    /// Dataset the explained corpus came from; used when mining many trees.
    #[serde(default)]
    pub dataset: String,
    pub axis: Metric,
    pub seed: u64,
    pub clusters: ClusterModel,
    pub tree: ExplanationTree,
}

impl Explanation {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::format("explanation", e))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let e: Explanation = serde_json::from_str(text).map_err(|e| Error::format("explanation", e))?;
        if e.format != EXPLANATION_FORMAT || e.version != EXPLANATION_VERSION {
            return Err(Error::format(
                "explanation",
                format!("unsupported format {:?} version {}", e.format, e.version),
            ));
        }
        Ok(e)
    }
}

/// Clusters `cases` on (accuracy, `axis`) and explains the clusters.
pub fn explain_cases(
    cases: &[TestCase],
    space: &HyperparameterSpace,
    axis: Metric,
    clusters_max: usize,
    seed: u64,
) -> Result<Explanation> {
    let points: Vec<(f64, f64)> = cases.iter().map(|c| (c.accuracy, axis.of(c))).collect();
    let configs: Vec<Configuration> = cases.iter().map(|c| c.config.clone()).collect();
    let (clusters, tree) = choose_cluster_count(&points, &configs, space, clusters_max, seed)?;
    Ok(Explanation {
        format: EXPLANATION_FORMAT.into(),
        version: EXPLANATION_VERSION,
        dataset: String::new(),
        axis,
        seed,
        clusters,
        tree,
    })
}

/// Explains the valid cases of a corpus.
pub fn explain_corpus(corpus: &TestCorpus, axis: Metric, clusters_max: usize, seed: u64) -> Result<Explanation> {
    let valid: Vec<TestCase> = corpus.valid_cases().cloned().collect();
    let mut e = explain_cases(&valid, &corpus.space, axis, clusters_max, seed)?;
    e.dataset = corpus.dataset.clone();
    Ok(e)
}
