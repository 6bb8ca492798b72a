//! Random forest of CART trees.
//!
//! Tree `i` draws its split randomness from ChaCha stream `i` of the
//! `random_state` seed, and its bootstrap sample from a separate stream family,
//! so results do not depend on scheduling. A single unbootstrapped tree is
//! therefore identical to [`super::tree::fit`] with the same parameters.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::trace::{site_table, Site, Tracer};
use super::tree::{self, DecisionTree, TreeParams};
use super::{get_bool, get_int};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::space::Configuration;

pub const PARAMS: &[&str] = &[
    "n_estimators",
    "bootstrap",
    "criterion",
    "splitter",
    "max_depth",
    "min_samples_split",
    "min_samples_leaf",
    "min_weight_fraction_leaf",
    "max_features",
    "max_leaf_nodes",
    "random_state",
];

site_table!(SITES {
    BOOTSTRAP_ON = 0x7200,
    BOOTSTRAP_OFF = 0x7201,
    SINGLE_TREE = 0x7202,
    ENSEMBLE = 0x7203,
});

const BOOTSTRAP_SALT: u64 = 0x9e37_79b9_7f4a_7c15;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestParams {
    pub n_estimators: usize,
    pub bootstrap: bool,
    pub tree: TreeParams,
}

impl ForestParams {
    pub fn from_config(c: &Configuration) -> Result<Self> {
        let n_estimators = get_int(c, "n_estimators", 10)?;
        if n_estimators < 1 {
            return Err(Error::InvalidCombination(format!(
                "n_estimators must be at least 1, got {n_estimators}"
            )));
        }
        Ok(Self {
            n_estimators: n_estimators as usize,
            bootstrap: get_bool(c, "bootstrap", true)?,
            tree: TreeParams::from_config(c)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomForest {
    pub trees: Vec<DecisionTree>,
}

impl RandomForest {
    /// Soft vote over per-tree leaf probabilities; ties predict 0.
    pub fn predict_row(&self, row: &[f64]) -> u8 {
        let (mut p0, mut p1) = (0.0, 0.0);
        for t in &self.trees {
            let p = t.proba_row(row);
            p0 += p[0];
            p1 += p[1];
        }
        u8::from(p1 > p0)
    }
}

pub(crate) fn fit(params: &ForestParams, data: &Dataset, tracer: &mut Tracer<'_>) -> RandomForest {
    let n = data.n_rows();
    tracer.hit(if params.bootstrap { BOOTSTRAP_ON } else { BOOTSTRAP_OFF });
    tracer.hit(if params.n_estimators == 1 { SINGLE_TREE } else { ENSEMBLE });
    let seed = params.tree.random_state;
    let trees = (0..params.n_estimators)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let weights = if params.bootstrap {
                let mut boot = ChaCha8Rng::seed_from_u64(seed ^ BOOTSTRAP_SALT);
                boot.set_stream(i as u64);
                let mut w = vec![0.0; n];
                for _ in 0..n {
                    w[boot.random_range(0..n)] += 1.0;
                }
                w
            } else {
                vec![1.0; n]
            };
            tree::grow(&params.tree, data, &weights, &mut rng, &mut tracer.reborrow())
        })
        .collect();
    RandomForest { trees }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::FeatureMatrix;
    use crate::learners::{train, LearnerKind, ModelParams, TraceLog};
    use crate::space::ParamValue;

    fn noisy(n: usize, seed: u64) -> Dataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut x = Vec::new();
        let mut y = Vec::new();
        for _ in 0..n {
            let a: f64 = rng.random_range(-1.0..1.0);
            let b: f64 = rng.random_range(-1.0..1.0);
            x.extend([a, b]);
            y.push(u8::from(a + 0.5 * b + rng.random_range(-0.3..0.3) > 0.0));
        }
        Dataset::new(
            "n",
            FeatureMatrix::new(x, 2).unwrap(),
            y,
            (0..n).map(|i| i % 2).collect(),
            vec!["a".into(), "b".into()],
            1,
        )
        .unwrap()
    }

    #[test]
    fn bootstrap_changes_trees() {
        let d = noisy(200, 1);
        let c = Configuration::default()
            .with("n_estimators", ParamValue::Int(5))
            .with("bootstrap", ParamValue::Bool(true));
        let m = train(LearnerKind::RandomForest, &c, &d, None).unwrap();
        let ModelParams::Forest(f) = m.params else { unreachable!() };
        assert_eq!(f.trees.len(), 5);
        assert_ne!(f.trees[0], f.trees[1]);
    }

    #[test]
    fn forest_is_deterministic() {
        let d = noisy(150, 2);
        let c = Configuration::default()
            .with("n_estimators", ParamValue::Int(4))
            .with("max_features", ParamValue::Cat("sqrt".into()));
        let a = train(LearnerKind::RandomForest, &c, &d, None).unwrap();
        let b = train(LearnerKind::RandomForest, &c, &d, None).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn forest_trace_includes_tree_sites() {
        let d = noisy(50, 3);
        let mut log = TraceLog::new();
        train(LearnerKind::RandomForest, &Configuration::default(), &d, Some(&mut log)).unwrap();
        assert!(log.contains(BOOTSTRAP_ON));
        assert!(log.contains(tree::SPLIT_ACCEPTED));
    }
}
