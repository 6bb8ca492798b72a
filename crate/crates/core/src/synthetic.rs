//! Synthetic datasets with known structure, used by the examples, the
//! property tests and the planted-bias benchmark.
//!
//! The planted-bias generator gives the minority group a more lenient labeling
//! threshold on the signal feature. A learner only recovers the minority rule
//! by splitting on the group indicator inside a narrow band of the signal, so
//! anything that starves the tree of candidate features or of small leaves
//! drops the rule and lowers minority TPR while costing little accuracy.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::data::{Dataset, FeatureMatrix};
use crate::error::Result;
use crate::learners::LearnerKind;
use crate::space::{HyperparameterSpace, ParamDomain};

#[derive(Debug, Clone, PartialEq)]
pub struct PlantedBias {
    pub n_rows: usize,
    /// Probability that a row belongs to the minority group.
    pub minority_share: f64,
    /// Signal cut points; a row is positive when an odd number of cuts lie below its signal.
    pub cuts: Vec<f64>,
    /// For minority rows the cut at 0 moves down to `-shift`, widening the positive band above it.
    pub shift: f64,
    /// Probability of flipping each label.
    pub label_noise: f64,
    /// Flip probability for minority rows inside the shifted band, replacing `label_noise` there.
    pub band_noise: f64,
    pub n_noise_features: usize,
    pub seed: u64,
}

impl Default for PlantedBias {
    fn default() -> Self {
        Self {
            n_rows: 2000,
            minority_share: 0.1,
            cuts: vec![0.0],
            shift: 0.6,
            label_noise: 0.1,
            band_noise: 0.5,
            n_noise_features: 4,
            seed: 0,
        }
    }
}

impl PlantedBias {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Columns: `signal`, `group`, then `noise_1..`. Group 0 is the majority.
    pub fn generate(&self) -> Result<Dataset> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let width = 2 + self.n_noise_features;
        let mut values = Vec::with_capacity(self.n_rows * width);
        let mut labels = Vec::with_capacity(self.n_rows);
        let mut groups = Vec::with_capacity(self.n_rows);
        for _ in 0..self.n_rows {
            let g = usize::from(rng.random_bool(self.minority_share));
            let signal: f64 = StandardNormal.sample(&mut rng);
            values.push(signal);
            values.push(g as f64);
            for _ in 0..self.n_noise_features {
                values.push(StandardNormal.sample(&mut rng));
            }
            let in_band = g == 1 && signal > -self.shift && signal <= 0.0;
            let below = self.cuts.iter().filter(|&&c| c < signal).count();
            let clean = (below % 2 == 1) ^ in_band;
            let noise = if in_band { self.band_noise } else { self.label_noise };
            labels.push(u8::from(clean ^ rng.random_bool(noise)));
            groups.push(g);
        }
        let mut names = vec!["signal".to_string(), "group".to_string()];
        names.extend((1..=self.n_noise_features).map(|i| format!("noise_{i}")));
        Dataset::new(
            format!("planted-{}", self.seed),
            FeatureMatrix::new(values, width)?,
            labels,
            groups,
            vec!["majority".into(), "minority".into()],
            1,
        )?
        .with_feature_names(names)
    }
}

/// Decision-tree space for the planted benchmark. Defaults follow common
/// library defaults: a fully grown tree over all features.
pub fn planted_space() -> HyperparameterSpace {
    HyperparameterSpace::new(
        LearnerKind::DecisionTree,
        vec![
            ParamDomain::categorical("criterion", &["gini", "entropy"], "gini"),
            ParamDomain::categorical("splitter", &["best", "random"], "best"),
            ParamDomain::integer("max_depth", 2, 30, 30),
            ParamDomain::integer("min_samples_split", 2, 40, 2),
            ParamDomain::integer("min_samples_leaf", 1, 40, 1),
            ParamDomain::real("min_weight_fraction_leaf", 0.0, 0.5, 0.0),
            ParamDomain::categorical("max_features", &["all", "sqrt", "log2", "1"], "all"),
            ParamDomain::integer("random_state", 0, 9, 0),
        ],
    )
    .expect("planted space is well formed")
}

/// Two isotropic Gaussian blobs in `dims` dimensions whose centers sit
/// `separation` apart along the first axis. Groups alternate by row.
pub fn gaussian_blobs(n_rows: usize, dims: usize, separation: f64, seed: u64) -> Result<Dataset> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = Vec::with_capacity(n_rows * dims);
    let mut labels = Vec::with_capacity(n_rows);
    for _ in 0..n_rows {
        let y = rng.random_bool(0.5);
        for d in 0..dims {
            let z: f64 = StandardNormal.sample(&mut rng);
            let center = if d == 0 && y { separation } else { 0.0 };
            values.push(center + z);
        }
        labels.push(u8::from(y));
    }
    Dataset::new(
        format!("blobs-{seed}"),
        FeatureMatrix::new(values, dims)?,
        labels,
        (0..n_rows).map(|i| i % 2).collect(),
        vec!["a".into(), "b".into()],
        1,
    )
}

/// Uniform random features with labels from a random axis-aligned rule plus noise.
pub fn random_tabular(n_rows: usize, n_features: usize, noise: f64, seed: u64) -> Result<Dataset> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values: Vec<f64> = (0..n_rows * n_features).map(|_| rng.random_range(0.0..1.0)).collect();
    let col = rng.random_range(0..n_features);
    let cut = rng.random_range(0.2..0.8);
    let labels = (0..n_rows)
        .map(|i| u8::from((values[i * n_features + col] > cut) ^ rng.random_bool(noise)))
        .collect();
    Dataset::new(
        format!("tabular-{seed}"),
        FeatureMatrix::new(values, n_features)?,
        labels,
        (0..n_rows).map(|i| i % 2).collect(),
        vec!["a".into(), "b".into()],
        1,
    )
}
