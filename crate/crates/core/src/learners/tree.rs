//! CART classification tree with sample weights.
//!
//! Nodes are grown depth-first, or best-first by weighted impurity decrease when
//! `max_leaf_nodes` is set. Equal-gain candidates resolve to the lowest feature
//! index, then the lowest threshold; leaf ties predict label 0.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::trace::{site_table, Site, Tracer};
use super::{get_cat, get_int, get_real};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::space::{Configuration, ParamValue};

pub const PARAMS: &[&str] = &[
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
    CRITERION_GINI = 0x7100,
    CRITERION_ENTROPY = 0x7101,
    SPLITTER_BEST = 0x7102,
    SPLITTER_RANDOM = 0x7103,
    FEATURES_ALL = 0x7104,
    FEATURES_SUBSET = 0x7105,
    GROWTH_DEPTH_FIRST = 0x7106,
    GROWTH_BEST_FIRST = 0x7107,
    LEAF_MAX_DEPTH = 0x7110,
    LEAF_MIN_SAMPLES_SPLIT = 0x7111,
    LEAF_MIN_SAMPLES_LEAF = 0x7112,
    LEAF_MIN_WEIGHT_LEAF = 0x7113,
    LEAF_PURE = 0x7114,
    LEAF_NO_VALID_SPLIT = 0x7115,
    LEAF_MAX_LEAF_NODES = 0x7116,
    SPLIT_ACCEPTED = 0x7120,
    CANDIDATE_REJECTED_MIN_LEAF = 0x7121,
    CANDIDATE_REJECTED_MIN_WEIGHT = 0x7122,
    CANDIDATE_CONSTANT_FEATURE = 0x7123,
});

/// Gains within this distance count as equal.
const GAIN_TIE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Criterion {
    Gini,
    Entropy,
}

impl Criterion {
    fn impurity(self, w: [f64; 2]) -> f64 {
        let total = w[0] + w[1];
        if total <= 0.0 {
            return 0.0;
        }
        let p = [w[0] / total, w[1] / total];
        match self {
            Criterion::Gini => 1.0 - p[0] * p[0] - p[1] * p[1],
            Criterion::Entropy => -p
                .iter()
                .filter(|&&q| q > 0.0)
                .map(|&q| q * q.log2())
                .sum::<f64>(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Splitter {
    Best,
    Random,
}

/// How many features are considered at each split.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum MaxFeatures {
    All,
    Sqrt,
    Log2,
    Fraction(f64),
    Count(usize),
}

impl MaxFeatures {
    /// Number of candidate features out of `m`; always in `1..=m`.
    pub fn resolve(self, m: usize) -> usize {
        let k = match self {
            MaxFeatures::All => m,
            MaxFeatures::Sqrt => (m as f64).sqrt().ceil() as usize,
            MaxFeatures::Log2 => (m as f64).log2().ceil() as usize,
            MaxFeatures::Fraction(f) => (f * m as f64).floor() as usize,
            MaxFeatures::Count(c) => c,
        };
        k.clamp(1, m.max(1))
    }

    fn from_value(v: Option<&ParamValue>) -> Result<Self> {
        let invalid = |m: String| Error::InvalidCombination(format!("max_features: {m}"));
        let fraction = |f: f64| {
            if f > 0.0 && f <= 1.0 {
                Ok(MaxFeatures::Fraction(f))
            } else {
                Err(invalid(format!("fraction {f} outside (0, 1]")))
            }
        };
        let count = |c: i64| {
            if c >= 1 {
                Ok(MaxFeatures::Count(c as usize))
            } else {
                Err(invalid(format!("count {c} below 1")))
            }
        };
        match v {
            None => Ok(MaxFeatures::All),
            Some(ParamValue::Real(f)) => fraction(*f),
            Some(ParamValue::Int(c)) => count(*c),
            Some(ParamValue::Cat(s)) => match s.as_str() {
                "all" | "none" | "auto" => Ok(MaxFeatures::All),
                "sqrt" => Ok(MaxFeatures::Sqrt),
                "log2" => Ok(MaxFeatures::Log2),
                other if other.contains('.') => fraction(
                    other
                        .parse()
                        .map_err(|_| invalid(format!("unrecognized value {other:?}")))?,
                ),
                other => count(
                    other
                        .parse()
                        .map_err(|_| invalid(format!("unrecognized value {other:?}")))?,
                ),
            },
            Some(ParamValue::Bool(_)) => Err(invalid("boolean value".into())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeParams {
    pub criterion: Criterion,
    pub splitter: Splitter,
    /// `None` grows until the other limits stop it.
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
    pub min_samples_leaf: usize,
    pub min_weight_fraction_leaf: f64,
    pub max_features: MaxFeatures,
    pub max_leaf_nodes: Option<usize>,
    pub random_state: u64,
}

impl Default for TreeParams {
    fn default() -> Self {
        Self {
            criterion: Criterion::Gini,
            splitter: Splitter::Best,
            max_depth: None,
            min_samples_split: 2,
            min_samples_leaf: 1,
            min_weight_fraction_leaf: 0.0,
            max_features: MaxFeatures::All,
            max_leaf_nodes: None,
            random_state: 0,
        }
    }
}

impl TreeParams {
    /// Reads tree parameters; a negative `max_depth` or a `max_leaf_nodes` of 0 means unlimited.
    pub fn from_config(c: &Configuration) -> Result<Self> {
        let criterion = match get_cat(c, "criterion", "gini")? {
            "gini" => Criterion::Gini,
            "entropy" => Criterion::Entropy,
            other => return Err(Error::validation("criterion", format!("unknown value {other:?}"))),
        };
        let splitter = match get_cat(c, "splitter", "best")? {
            "best" => Splitter::Best,
            "random" => Splitter::Random,
            other => return Err(Error::validation("splitter", format!("unknown value {other:?}"))),
        };
        let max_depth = get_int(c, "max_depth", -1)?;
        let min_samples_split = get_int(c, "min_samples_split", 2)?;
        if min_samples_split < 2 {
            return Err(Error::InvalidCombination(format!(
                "min_samples_split must be at least 2, got {min_samples_split}"
            )));
        }
        let min_samples_leaf = get_int(c, "min_samples_leaf", 1)?;
        if min_samples_leaf < 1 {
            return Err(Error::InvalidCombination(format!(
                "min_samples_leaf must be at least 1, got {min_samples_leaf}"
            )));
        }
        let min_weight_fraction_leaf = get_real(c, "min_weight_fraction_leaf", 0.0)?;
        if !(0.0..=0.5).contains(&min_weight_fraction_leaf) {
            return Err(Error::InvalidCombination(format!(
                "min_weight_fraction_leaf must lie in [0, 0.5], got {min_weight_fraction_leaf}"
            )));
        }
        let max_leaf_nodes = match get_int(c, "max_leaf_nodes", 0)? {
            0 => None,
            n if n >= 2 => Some(n as usize),
            n => {
                return Err(Error::InvalidCombination(format!(
                    "max_leaf_nodes must be 0 (unlimited) or at least 2, got {n}"
                )))
            }
        };
        Ok(Self {
            criterion,
            splitter,
            max_depth: usize::try_from(max_depth).ok(),
            min_samples_split: min_samples_split as usize,
            min_samples_leaf: min_samples_leaf as usize,
            min_weight_fraction_leaf,
            max_features: MaxFeatures::from_value(c.get("max_features"))?,
            max_leaf_nodes,
            random_state: get_int(c, "random_state", 0)? as u64,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum Node {
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
        depth: usize,
        n_samples: usize,
        /// Features that were eligible at this node.
        candidates: Vec<usize>,
    },
    Leaf {
        class_weight: [f64; 2],
        depth: usize,
        n_samples: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub nodes: Vec<Node>,
    pub n_features: usize,
}

impl DecisionTree {
    fn leaf_for(&self, row: &[f64]) -> [f64; 2] {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                    ..
                } => i = if row[*feature] <= *threshold { *left } else { *right },
                Node::Leaf { class_weight, .. } => return *class_weight,
            }
        }
    }

    pub fn predict_row(&self, row: &[f64]) -> u8 {
        let w = self.leaf_for(row);
        u8::from(w[1] > w[0])
    }

    /// Class probabilities at the leaf reached by `row`.
    pub fn proba_row(&self, row: &[f64]) -> [f64; 2] {
        let w = self.leaf_for(row);
        let total = w[0] + w[1];
        if total > 0.0 {
            [w[0] / total, w[1] / total]
        } else {
            [1.0, 0.0]
        }
    }

    pub fn depth(&self) -> usize {
        self.nodes
            .iter()
            .map(|n| match n {
                Node::Split { depth, .. } | Node::Leaf { depth, .. } => *depth,
            })
            .max()
            .unwrap_or(0)
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, Node::Leaf { .. }))
            .count()
    }
}

pub(crate) fn fit(params: &TreeParams, data: &Dataset, tracer: &mut Tracer<'_>) -> DecisionTree {
    let weights = vec![1.0; data.n_rows()];
    let mut rng = ChaCha8Rng::seed_from_u64(params.random_state);
    grow(params, data, &weights, &mut rng, tracer)
}

struct SplitChoice {
    feature: usize,
    threshold: f64,
    gain: f64,
    candidates: Vec<usize>,
}

struct Pending {
    id: usize,
    rows: Vec<usize>,
    depth: usize,
    class_weight: [f64; 2],
    split: Option<SplitChoice>,
    /// Weighted impurity decrease, used to order best-first growth.
    priority: f64,
}

struct Grower<'a, 'b, R: Rng> {
    params: &'a TreeParams,
    columns: Vec<Vec<f64>>,
    labels: &'a [u8],
    weights: &'a [f64],
    total_weight: f64,
    min_weight_leaf: f64,
    rng: &'a mut R,
    tracer: &'a mut Tracer<'b>,
    buf: Vec<(f64, usize)>,
}

/// Grows a tree on the rows with positive weight.
pub(crate) fn grow<R: Rng>(
    params: &TreeParams,
    data: &Dataset,
    weights: &[f64],
    rng: &mut R,
    tracer: &mut Tracer<'_>,
) -> DecisionTree {
    let m = data.n_features();
    tracer.hit(match params.criterion {
        Criterion::Gini => CRITERION_GINI,
        Criterion::Entropy => CRITERION_ENTROPY,
    });
    tracer.hit(match params.splitter {
        Splitter::Best => SPLITTER_BEST,
        Splitter::Random => SPLITTER_RANDOM,
    });
    tracer.hit(if params.max_features.resolve(m) == m {
        FEATURES_ALL
    } else {
        FEATURES_SUBSET
    });
    tracer.hit(if params.max_leaf_nodes.is_some() {
        GROWTH_BEST_FIRST
    } else {
        GROWTH_DEPTH_FIRST
    });

    let total_weight: f64 = weights.iter().sum();
    let mut g = Grower {
        params,
        columns: (0..m).map(|j| data.features.column(j)).collect(),
        labels: &data.labels,
        weights,
        total_weight,
        min_weight_leaf: params.min_weight_fraction_leaf * total_weight,
        rng,
        tracer,
        buf: Vec::new(),
    };

    let root_rows: Vec<usize> = (0..data.n_rows()).filter(|&i| weights[i] > 0.0).collect();
    let mut nodes: Vec<Option<Node>> = vec![None];
    let root = g.pending(0, root_rows, 0);
    let mut frontier = Vec::new();
    let mut n_leaves = 0usize;
    g.enqueue(root, &mut frontier, &mut nodes, &mut n_leaves);

    while !frontier.is_empty() {
        let pick = match params.max_leaf_nodes {
            None => frontier.len() - 1,
            Some(limit) => {
                if n_leaves + frontier.len() >= limit {
                    for p in frontier.drain(..) {
                        g.tracer.hit(LEAF_MAX_LEAF_NODES);
                        nodes[p.id] = Some(leaf(&p));
                    }
                    break;
                }
                // highest priority, earliest id on ties
                let mut best = 0;
                for (i, p) in frontier.iter().enumerate() {
                    let b: &Pending = &frontier[best];
                    if p.priority > b.priority || (p.priority == b.priority && p.id < b.id) {
                        best = i;
                    }
                }
                best
            }
        };
        let p = frontier.swap_remove(pick);
        let split = p.split.expect("frontier nodes carry a split");
        g.tracer.hit(SPLIT_ACCEPTED);
        let col = &g.columns[split.feature];
        let (left_rows, right_rows): (Vec<usize>, Vec<usize>) =
            p.rows.iter().partition(|&&i| col[i] <= split.threshold);
        let left_id = nodes.len();
        let right_id = left_id + 1;
        nodes.push(None);
        nodes.push(None);
        nodes[p.id] = Some(Node::Split {
            feature: split.feature,
            threshold: split.threshold,
            left: left_id,
            right: right_id,
            depth: p.depth,
            n_samples: p.rows.len(),
            candidates: split.candidates,
        });
        let left = g.pending(left_id, left_rows, p.depth + 1);
        let right = g.pending(right_id, right_rows, p.depth + 1);
        // depth-first pops from the back, so the left child goes last
        g.enqueue(right, &mut frontier, &mut nodes, &mut n_leaves);
        g.enqueue(left, &mut frontier, &mut nodes, &mut n_leaves);
    }

    DecisionTree {
        nodes: nodes.into_iter().map(|n| n.expect("every node finalized")).collect(),
        n_features: m,
    }
}

fn leaf(p: &Pending) -> Node {
    Node::Leaf {
        class_weight: p.class_weight,
        depth: p.depth,
        n_samples: p.rows.len(),
    }
}

impl<R: Rng> Grower<'_, '_, R> {
    fn class_weight(&self, rows: &[usize]) -> [f64; 2] {
        let mut w = [0.0; 2];
        for &i in rows {
            w[self.labels[i] as usize] += self.weights[i];
        }
        w
    }

    fn enqueue(
        &mut self,
        p: Pending,
        frontier: &mut Vec<Pending>,
        nodes: &mut [Option<Node>],
        n_leaves: &mut usize,
    ) {
        if p.split.is_some() {
            frontier.push(p);
        } else {
            nodes[p.id] = Some(leaf(&p));
            *n_leaves += 1;
        }
    }

    fn pending(&mut self, id: usize, rows: Vec<usize>, depth: usize) -> Pending {
        let class_weight = self.class_weight(&rows);
        let split = self.choose_split(&rows, depth, class_weight);
        let priority = split.as_ref().map_or(0.0, |s| {
            s.gain * (class_weight[0] + class_weight[1]) / self.total_weight
        });
        Pending {
            id,
            rows,
            depth,
            class_weight,
            split,
            priority,
        }
    }

    fn choose_split(&mut self, rows: &[usize], depth: usize, w: [f64; 2]) -> Option<SplitChoice> {
        let p = self.params;
        let n = rows.len();
        let node_weight = w[0] + w[1];
        let parent = p.criterion.impurity(w);
        let stop = if p.max_depth.is_some_and(|d| depth >= d) {
            Some(LEAF_MAX_DEPTH)
        } else if n < p.min_samples_split {
            Some(LEAF_MIN_SAMPLES_SPLIT)
        } else if n < 2 * p.min_samples_leaf {
            Some(LEAF_MIN_SAMPLES_LEAF)
        } else if node_weight < 2.0 * self.min_weight_leaf {
            Some(LEAF_MIN_WEIGHT_LEAF)
        } else if parent <= GAIN_TIE {
            Some(LEAF_PURE)
        } else {
            None
        };
        if let Some(site) = stop {
            self.tracer.hit(site);
            return None;
        }

        let m = self.columns.len();
        let k = p.max_features.resolve(m);
        let candidates: Vec<usize> = if k >= m {
            (0..m).collect()
        } else {
            let mut c = index::sample(self.rng, m, k).into_vec();
            c.sort_unstable();
            c
        };

        let mut best: Option<(usize, f64, f64)> = None;
        let mut flags = [false; 3];
        for &f in &candidates {
            let found = match p.splitter {
                Splitter::Best => self.best_threshold(f, rows, w, parent, &mut flags),
                Splitter::Random => self.random_threshold(f, rows, w, parent, &mut flags),
            };
            if let Some((threshold, gain)) = found {
                if best.is_none_or(|(_, _, g)| gain > g + GAIN_TIE) {
                    best = Some((f, threshold, gain));
                }
            }
        }
        for (hit, site) in flags.iter().zip([
            CANDIDATE_REJECTED_MIN_LEAF,
            CANDIDATE_REJECTED_MIN_WEIGHT,
            CANDIDATE_CONSTANT_FEATURE,
        ]) {
            if *hit {
                self.tracer.hit(site);
            }
        }
        match best {
            Some((feature, threshold, gain)) => Some(SplitChoice {
                feature,
                threshold,
                gain,
                candidates,
            }),
            None => {
                self.tracer.hit(LEAF_NO_VALID_SPLIT);
                None
            }
        }
    }

    /// Weighted impurity decrease of a partition, or `None` if it violates a leaf limit.
    fn gain(
        &self,
        left: ([f64; 2], usize),
        right: ([f64; 2], usize),
        parent: f64,
        flags: &mut [bool; 3],
    ) -> Option<f64> {
        let p = self.params;
        if left.1 < p.min_samples_leaf || right.1 < p.min_samples_leaf {
            flags[0] = true;
            return None;
        }
        let wl = left.0[0] + left.0[1];
        let wr = right.0[0] + right.0[1];
        if wl < self.min_weight_leaf || wr < self.min_weight_leaf {
            flags[1] = true;
            return None;
        }
        let total = wl + wr;
        let child =
            (wl / total) * p.criterion.impurity(left.0) + (wr / total) * p.criterion.impurity(right.0);
        Some(parent - child)
    }

    fn best_threshold(
        &mut self,
        f: usize,
        rows: &[usize],
        w: [f64; 2],
        parent: f64,
        flags: &mut [bool; 3],
    ) -> Option<(f64, f64)> {
        let col = &self.columns[f];
        let mut buf = std::mem::take(&mut self.buf);
        buf.clear();
        buf.extend(rows.iter().map(|&i| (col[i], i)));
        buf.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let n = buf.len();
        if buf[0].0 == buf[n - 1].0 {
            flags[2] = true;
            self.buf = buf;
            return None;
        }
        let mut left = [0.0; 2];
        let mut best: Option<(f64, f64)> = None;
        for i in 1..n {
            let (prev, row) = buf[i - 1];
            left[self.labels[row] as usize] += self.weights[row];
            let next = buf[i].0;
            if next <= prev {
                continue;
            }
            let right = [w[0] - left[0], w[1] - left[1]];
            if let Some(gain) = self.gain((left, i), (right, n - i), parent, flags) {
                if best.is_none_or(|(_, g)| gain > g + GAIN_TIE) {
                    let mut threshold = prev + (next - prev) / 2.0;
                    if threshold >= next {
                        threshold = prev;
                    }
                    best = Some((threshold, gain));
                }
            }
        }
        self.buf = buf;
        best
    }

    fn random_threshold(
        &mut self,
        f: usize,
        rows: &[usize],
        w: [f64; 2],
        parent: f64,
        flags: &mut [bool; 3],
    ) -> Option<(f64, f64)> {
        let col = &self.columns[f];
        let (lo, hi) = rows
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &i| {
                (lo.min(col[i]), hi.max(col[i]))
            });
        if hi <= lo {
            flags[2] = true;
            return None;
        }
        let threshold = self.rng.random_range(lo..hi);
        let mut left = [0.0; 2];
        let mut n_left = 0;
        for &i in rows {
            if col[i] <= threshold {
                left[self.labels[i] as usize] += self.weights[i];
                n_left += 1;
            }
        }
        let right = [w[0] - left[0], w[1] - left[1]];
        self.gain((left, n_left), (right, rows.len() - n_left), parent, flags)
            .map(|g| (threshold, g))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::FeatureMatrix;
    use crate::learners::{train, LearnerKind, TraceLog};

    fn ds(x: Vec<f64>, cols: usize, y: Vec<u8>) -> Dataset {
        let n = y.len();
        Dataset::new(
            "t",
            FeatureMatrix::new(x, cols).unwrap(),
            y,
            (0..n).map(|i| i % 2).collect(),
            vec!["a".into(), "b".into()],
            1,
        )
        .unwrap()
    }

    fn cfg(pairs: &[(&str, ParamValue)]) -> Configuration {
        let mut c = Configuration::default();
        for (k, v) in pairs {
            c.set(*k, v.clone());
        }
        c
    }

    #[test]
    fn separable_points_fit_exactly() {
        let d = ds(vec![0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 1.0, 1.0], 2, vec![0, 1, 0, 1]);
        let c = cfg(&[("max_depth", ParamValue::Int(2))]);
        let m = train(LearnerKind::DecisionTree, &c, &d, None).unwrap();
        assert_eq!(m.predict(&d.features).unwrap(), d.labels);
    }

    #[test]
    fn zero_depth_predicts_majority() {
        let d = ds(vec![0.0, 1.0, 2.0, 3.0, 4.0], 1, vec![1, 1, 0, 1, 0]);
        let c = cfg(&[("max_depth", ParamValue::Int(0))]);
        let m = train(LearnerKind::DecisionTree, &c, &d, None).unwrap();
        assert_eq!(m.predict(&d.features).unwrap(), vec![1; 5]);
    }

    #[test]
    fn leaf_tie_predicts_zero() {
        let d = ds(vec![0.0, 1.0, 2.0, 3.0], 1, vec![0, 1, 1, 0]);
        let c = cfg(&[("max_depth", ParamValue::Int(0))]);
        let m = train(LearnerKind::DecisionTree, &c, &d, None).unwrap();
        assert_eq!(m.predict(&d.features).unwrap(), vec![0; 4]);
    }

    #[test]
    fn equal_gain_prefers_lowest_feature() {
        // both columns separate the labels perfectly
        let d = ds(vec![0.0, 5.0, 0.0, 5.0, 1.0, 9.0, 1.0, 9.0], 2, vec![0, 0, 1, 1]);
        let t = fit(&TreeParams::default(), &d, &mut Tracer(None));
        match &t.nodes[0] {
            Node::Split { feature, threshold, .. } => {
                assert_eq!(*feature, 0);
                assert_eq!(*threshold, 0.5);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn max_features_resolution() {
        assert_eq!(MaxFeatures::Sqrt.resolve(14), 4);
        assert_eq!(MaxFeatures::Log2.resolve(14), 4);
        assert_eq!(MaxFeatures::Log2.resolve(8), 3);
        assert_eq!(MaxFeatures::Fraction(0.5).resolve(7), 3);
        assert_eq!(MaxFeatures::Fraction(0.01).resolve(7), 1);
        assert_eq!(MaxFeatures::All.resolve(7), 7);
        assert_eq!(MaxFeatures::Log2.resolve(1), 1);
    }

    #[test]
    fn invalid_values_are_invalid_combinations() {
        let d = ds(vec![0.0, 1.0, 2.0, 3.0], 1, vec![0, 1, 1, 0]);
        for c in [
            cfg(&[("min_weight_fraction_leaf", ParamValue::Real(0.6))]),
            cfg(&[("max_leaf_nodes", ParamValue::Int(1))]),
            cfg(&[("min_samples_split", ParamValue::Int(1))]),
            cfg(&[("max_features", ParamValue::Real(1.5))]),
        ] {
            assert!(matches!(
                train(LearnerKind::DecisionTree, &c, &d, None),
                Err(Error::InvalidCombination(_))
            ));
        }
    }

    #[test]
    fn max_leaf_nodes_caps_leaves() {
        let x: Vec<f64> = (0..40).map(f64::from).collect();
        let y: Vec<u8> = (0..40).map(|i| ((i / 3) % 2) as u8).collect();
        let d = ds(x, 1, y);
        let c = cfg(&[("max_leaf_nodes", ParamValue::Int(4))]);
        let m = train(LearnerKind::DecisionTree, &c, &d, None).unwrap();
        match m.params {
            crate::learners::ModelParams::Tree(t) => assert_eq!(t.n_leaves(), 4),
            _ => unreachable!(),
        }
    }

    #[test]
    fn trace_mentions_stop_reasons() {
        let d = ds(vec![0.0, 1.0, 2.0, 3.0], 1, vec![0, 0, 1, 1]);
        let mut log = TraceLog::new();
        train(LearnerKind::DecisionTree, &Configuration::default(), &d, Some(&mut log)).unwrap();
        assert!(log.contains(SPLIT_ACCEPTED));
        assert!(log.contains(LEAF_PURE));
        assert!(log.sites.iter().all(|s| SITES.iter().any(|t| t.id == *s)));
    }
}
