//! Frequency of hyperparameters across many explanation trees.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::cart::ExplanationTree;

pub const DEFAULT_OVERALL_THRESHOLD: usize = 50;
pub const DEFAULT_DATASET_THRESHOLD: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MiningRow {
    pub parameter: String,
    /// Number of trees with at least one internal node on this parameter.
    pub appearances: usize,
    /// Number of distinct datasets among those trees.
    pub dataset_count: usize,
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MiningReport {
    pub overall_threshold: usize,
    pub dataset_threshold: usize,
    /// Sorted by appearances (descending), then parameter name.
    pub rows: Vec<MiningRow>,
}

impl MiningReport {
    pub fn row(&self, parameter: &str) -> Option<&MiningRow> {
        self.rows.iter().find(|r| r.parameter == parameter)
    }

    pub fn flagged(&self) -> impl Iterator<Item = &MiningRow> {
        self.rows.iter().filter(|r| r.flagged)
    }
}

/// Counts, per parameter, the trees that split on it and the datasets those trees come from.
/// A parameter is flagged when both counts strictly exceed their thresholds.
pub fn mine_frequent(
    trees: &[(ExplanationTree, String)],
    overall_threshold: usize,
    dataset_threshold: usize,
) -> MiningReport {
    let mut per_param: BTreeMap<&str, (usize, BTreeSet<&str>)> = BTreeMap::new();
    for (tree, dataset) in trees {
        let params: BTreeSet<&str> = tree.root.split_params().into_iter().map(|(_, p)| p).collect();
        for p in params {
            let entry = per_param.entry(p).or_default();
            entry.0 += 1;
            entry.1.insert(dataset);
        }
    }
    let mut rows: Vec<MiningRow> = per_param
        .into_iter()
        .map(|(p, (appearances, datasets))| MiningRow {
            parameter: p.to_string(),
            appearances,
            dataset_count: datasets.len(),
            flagged: appearances > overall_threshold && datasets.len() > dataset_threshold,
        })
        .collect();
    rows.sort_by(|a, b| b.appearances.cmp(&a.appearances).then_with(|| a.parameter.cmp(&b.parameter)));
    MiningReport {
        overall_threshold,
        dataset_threshold,
        rows,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::explain::cart::{Node, Predicate};

    fn stump(param: &str) -> ExplanationTree {
        ExplanationTree {
            root: Node::Split {
                predicate: Predicate::Le {
                    param: param.into(),
                    threshold: 0.5,
                },
                counts: vec![1, 1],
                yes: Box::new(Node::Leaf { counts: vec![1, 0], label: 0 }),
                no: Box::new(Node::Leaf { counts: vec![0, 1], label: 1 }),
            },
            n_classes: 2,
            training_accuracy: 1.0,
        }
    }

    fn corpus(param: &str, n: usize) -> Vec<(ExplanationTree, String)> {
        (0..n).map(|i| (stump(param), format!("d{}", i % 4))).collect()
    }

    #[test]
    fn threshold_rule() {
        let r = mine_frequent(&corpus("tol", 60), 50, 3);
        assert_eq!(r.row("tol").unwrap(), &MiningRow {
            parameter: "tol".into(),
            appearances: 60,
            dataset_count: 4,
            flagged: true
        });
        let r = mine_frequent(&corpus("tol", 49), 50, 3);
        assert!(!r.row("tol").unwrap().flagged);
        // exactly at the threshold is not enough
        let r = mine_frequent(&corpus("tol", 50), 50, 3);
        assert!(!r.row("tol").unwrap().flagged);
    }

    #[test]
    fn zero_thresholds_flag_everything() {
        let mut trees = corpus("tol", 3);
        trees.extend(corpus("solver", 1));
        let r = mine_frequent(&trees, 0, 0);
        assert!(r.rows.iter().all(|row| row.flagged));
        assert_eq!(r.rows[0].parameter, "tol");
    }

    #[test]
    fn repeated_nodes_count_once_per_tree() {
        let mut t = stump("tol");
        if let Node::Split { yes, .. } = &mut t.root {
            **yes = stump("tol").root;
        }
        let r = mine_frequent(&[(t, "d".into())], 0, 0);
        assert_eq!(r.row("tol").unwrap().appearances, 1);
    }

    #[test]
    fn order_invariant() {
        let mut trees = corpus("tol", 7);
        trees.extend(corpus("C", 5));
        let a = mine_frequent(&trees, 2, 1);
        trees.reverse();
        assert_eq!(a, mine_frequent(&trees, 2, 1));
    }
}
