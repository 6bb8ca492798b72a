//! Instrumented subject learners: logistic regression, CART decision tree and
//! random forest.
//!
//! Every learner reads its hyperparameters from a [`Configuration`] by name.
//! Parameters a space does not declare fall back to the learner's defaults, so
//! a space may search any subset. Combinations the learner cannot honor are
//! reported as [`Error::InvalidCombination`]; the search discards those samples.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::data::{Dataset, FeatureMatrix};
use crate::error::{Error, Result};
use crate::space::{Configuration, ParamValue};

pub mod forest;
pub mod logistic;
pub mod trace;
pub mod tree;

pub use forest::RandomForest;
pub use logistic::LogisticModel;
pub use trace::{Site, TraceLog};
pub use tree::DecisionTree;

use trace::Tracer;

pub const MODEL_FORMAT: &str = "parfait-model";
pub const MODEL_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LearnerKind {
    LogisticRegression,
    DecisionTree,
    RandomForest,
}

impl LearnerKind {
    pub const ALL: [LearnerKind; 3] = [
        LearnerKind::LogisticRegression,
        LearnerKind::DecisionTree,
        LearnerKind::RandomForest,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LearnerKind::LogisticRegression => "logistic_regression",
            LearnerKind::DecisionTree => "decision_tree",
            LearnerKind::RandomForest => "random_forest",
        }
    }

    /// Hyperparameter names this learner understands.
    pub fn known_params(self) -> &'static [&'static str] {
        match self {
            LearnerKind::LogisticRegression => logistic::PARAMS,
            LearnerKind::DecisionTree => tree::PARAMS,
            LearnerKind::RandomForest => forest::PARAMS,
        }
    }

    /// Every site the learner may emit.
    pub fn sites(self) -> Vec<Site> {
        match self {
            LearnerKind::LogisticRegression => logistic::SITES.to_vec(),
            LearnerKind::DecisionTree => tree::SITES.to_vec(),
            LearnerKind::RandomForest => forest::SITES.iter().chain(tree::SITES).copied().collect(),
        }
    }
}

impl fmt::Display for LearnerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LearnerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "logistic_regression" | "lr" | "logreg" => Ok(LearnerKind::LogisticRegression),
            "decision_tree" | "dt" | "tree" => Ok(LearnerKind::DecisionTree),
            "random_forest" | "rf" | "forest" => Ok(LearnerKind::RandomForest),
            other => Err(Error::validation("learner", format!("unknown learner {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ModelParams {
    Logistic(LogisticModel),
    Tree(DecisionTree),
    Forest(RandomForest),
}

/// A fitted model together with the configuration that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub learner: LearnerKind,
    pub config: Configuration,
    pub n_features: usize,
    pub params: ModelParams,
}

#[derive(Serialize, Deserialize)]
struct ModelDocument {
    format: String,
    version: u32,
    model: TrainedModel,
}

impl TrainedModel {
    /// One label in {0,1} per row.
    pub fn predict(&self, features: &FeatureMatrix) -> Result<Vec<u8>> {
        if features.n_cols() != self.n_features {
            return Err(Error::Shape {
                expected: self.n_features,
                actual: features.n_cols(),
            });
        }
        Ok(match &self.params {
            ModelParams::Logistic(m) => features.rows().map(|r| m.predict_row(r)).collect(),
            ModelParams::Tree(t) => features.rows().map(|r| t.predict_row(r)).collect(),
            ModelParams::Forest(f) => features.rows().map(|r| f.predict_row(r)).collect(),
        })
    }

    pub fn to_json(&self) -> Result<String> {
        let doc = ModelDocument {
            format: MODEL_FORMAT.into(),
            version: MODEL_VERSION,
            model: self.clone(),
        };
        serde_json::to_string(&doc).map_err(|e| Error::format("model", e))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ModelDocument = serde_json::from_str(text).map_err(|e| Error::format("model", e))?;
        if doc.format != MODEL_FORMAT || doc.version != MODEL_VERSION {
            return Err(Error::format(
                "model",
                format!("unsupported document {} v{}", doc.format, doc.version),
            ));
        }
        Ok(doc.model)
    }
}

/// Fits `learner` on `train` under `config`, appending visited sites to `trace`.
pub fn train(
    learner: LearnerKind,
    config: &Configuration,
    train: &Dataset,
    trace: Option<&mut TraceLog>,
) -> Result<TrainedModel> {
    if let Some(unknown) = config
        .values
        .keys()
        .find(|k| !learner.known_params().contains(&k.as_str()))
    {
        return Err(Error::validation(
            unknown,
            format!("not a {learner} hyperparameter"),
        ));
    }
    if train.n_rows() == 0 {
        return Err(Error::Degenerate("empty training set".into()));
    }
    if !(train.labels.contains(&0) && train.labels.contains(&1)) {
        return Err(Error::Degenerate("training labels contain a single class".into()));
    }
    let mut tracer = Tracer(trace);
    let params = match learner {
        LearnerKind::LogisticRegression => {
            let p = logistic::LogisticParams::from_config(config)?;
            ModelParams::Logistic(logistic::fit(&p, train, &mut tracer))
        }
        LearnerKind::DecisionTree => {
            let p = tree::TreeParams::from_config(config)?;
            ModelParams::Tree(tree::fit(&p, train, &mut tracer))
        }
        LearnerKind::RandomForest => {
            let p = forest::ForestParams::from_config(config)?;
            ModelParams::Forest(forest::fit(&p, train, &mut tracer))
        }
    };
    Ok(TrainedModel {
        learner,
        config: config.clone(),
        n_features: train.n_features(),
        params,
    })
}

// Typed lookups with defaults. Integers are accepted where reals are expected.

pub(crate) fn get_int(c: &Configuration, name: &str, default: i64) -> Result<i64> {
    match c.get(name) {
        None => Ok(default),
        Some(ParamValue::Int(v)) => Ok(*v),
        Some(other) => Err(Error::validation(name, format!("expected integer, got {other}"))),
    }
}

pub(crate) fn get_real(c: &Configuration, name: &str, default: f64) -> Result<f64> {
    match c.get(name) {
        None => Ok(default),
        Some(ParamValue::Real(v)) => Ok(*v),
        Some(ParamValue::Int(v)) => Ok(*v as f64),
        Some(other) => Err(Error::validation(name, format!("expected number, got {other}"))),
    }
}

pub(crate) fn get_bool(c: &Configuration, name: &str, default: bool) -> Result<bool> {
    match c.get(name) {
        None => Ok(default),
        Some(ParamValue::Bool(v)) => Ok(*v),
        Some(other) => Err(Error::validation(name, format!("expected boolean, got {other}"))),
    }
}

pub(crate) fn get_cat<'a>(c: &'a Configuration, name: &str, default: &'a str) -> Result<&'a str> {
    match c.get(name) {
        None => Ok(default),
        Some(ParamValue::Cat(v)) => Ok(v),
        Some(other) => Err(Error::validation(name, format!("expected category, got {other}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Dataset;

    fn separable() -> Dataset {
        let x = FeatureMatrix::new(vec![0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 1.0, 1.0], 2).unwrap();
        Dataset::new("sep", x, vec![0, 0, 1, 1], vec![0, 1, 0, 1], vec!["a".into(), "b".into()], 1)
            .unwrap()
    }

    #[test]
    fn shape_mismatch() {
        let m = train(LearnerKind::DecisionTree, &Configuration::default(), &separable(), None).unwrap();
        let wrong = FeatureMatrix::new(vec![1.0, 2.0, 3.0], 3).unwrap();
        assert!(matches!(m.predict(&wrong), Err(Error::Shape { expected: 2, actual: 3 })));
        assert!(m.predict(&FeatureMatrix::empty(2)).unwrap().is_empty());
    }

    #[test]
    fn unknown_param_rejected() {
        let c = Configuration::default().with("n_estimators", ParamValue::Int(3));
        assert!(matches!(
            train(LearnerKind::DecisionTree, &c, &separable(), None),
            Err(Error::Validation { .. })
        ));
    }

    #[test]
    fn model_json_round_trip() {
        for kind in LearnerKind::ALL {
            let d = separable();
            let m = train(kind, &Configuration::default(), &d, None).unwrap();
            let back = TrainedModel::from_json(&m.to_json().unwrap()).unwrap();
            assert_eq!(back.predict(&d.features).unwrap(), m.predict(&d.features).unwrap());
        }
    }

    #[test]
    fn learner_names_parse() {
        for kind in LearnerKind::ALL {
            assert_eq!(kind.name().parse::<LearnerKind>().unwrap(), kind);
        }
    }
}
