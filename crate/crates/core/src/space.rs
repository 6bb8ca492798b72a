//! Hyperparameter domains, configurations, and the two search moves over them:
//! uniform sampling and single-coordinate unit mutation.
//!
//! # Space file format
//!
//! Line oriented, `#` starts a comment. The first non-blank line is the
//! version header, the second names the learner, and every further line
//! declares one parameter:
//!
//! ```text
//! parfait-space 1
//! learner decision_tree
//! param criterion categorical values=gini,entropy default=gini
//! param max_depth integer lo=1 hi=32 default=8
//! param min_weight_fraction_leaf real lo=0 hi=0.5 default=0 step=0.005
//! param bootstrap boolean default=true
//! ```
//!
//! `step` is optional: integers default to 1 and reals to `(hi - lo) / 100`.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::fs;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::learners::LearnerKind;

pub const SPACE_HEADER: &str = "parfait-space";
pub const SPACE_VERSION: u32 = 1;

/// A single hyperparameter value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Bool(bool),
    Int(i64),
    Real(f64),
    Cat(String),
}

impl ParamValue {
    /// Numeric view used by threshold predicates; `None` for categorical values.
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            ParamValue::Bool(b) => Some(f64::from(u8::from(*b))),
            ParamValue::Int(i) => Some(*i as f64),
            ParamValue::Real(r) => Some(*r),
            ParamValue::Cat(_) => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            ParamValue::Cat(s) => Some(s),
            _ => None,
        }
    }
}

impl fmt::Display for ParamValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamValue::Bool(b) => write!(f, "{b}"),
            ParamValue::Int(i) => write!(f, "{i}"),
            ParamValue::Real(r) => write!(f, "{r}"),
            ParamValue::Cat(s) => write!(f, "{s}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Domain {
    Boolean,
    Categorical { categories: Vec<String> },
    Integer { lo: i64, hi: i64, step: i64 },
    Real { lo: f64, hi: f64, step: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamDomain {
    pub name: String,
    pub domain: Domain,
    pub default: ParamValue,
}

impl ParamDomain {
    pub fn boolean(name: &str, default: bool) -> Self {
        Self {
            name: name.into(),
            domain: Domain::Boolean,
            default: ParamValue::Bool(default),
        }
    }

    pub fn categorical(name: &str, categories: &[&str], default: &str) -> Self {
        Self {
            name: name.into(),
            domain: Domain::Categorical {
                categories: categories.iter().map(|c| c.to_string()).collect(),
            },
            default: ParamValue::Cat(default.into()),
        }
    }

    pub fn integer(name: &str, lo: i64, hi: i64, default: i64) -> Self {
        Self {
            name: name.into(),
            domain: Domain::Integer { lo, hi, step: 1 },
            default: ParamValue::Int(default),
        }
    }

    pub fn real(name: &str, lo: f64, hi: f64, default: f64) -> Self {
        Self {
            name: name.into(),
            domain: Domain::Real {
                lo,
                hi,
                step: (hi - lo) / 100.0,
            },
            default: ParamValue::Real(default),
        }
    }

    pub fn with_real_step(mut self, step: f64) -> Self {
        if let Domain::Real { step: s, .. } = &mut self.domain {
            *s = step;
        }
        self
    }

    pub fn contains(&self, value: &ParamValue) -> bool {
        match (&self.domain, value) {
            (Domain::Boolean, ParamValue::Bool(_)) => true,
            (Domain::Categorical { categories }, ParamValue::Cat(c)) => categories.contains(c),
            (Domain::Integer { lo, hi, .. }, ParamValue::Int(v)) => lo <= v && v <= hi,
            (Domain::Real { lo, hi, .. }, ParamValue::Real(v)) => *lo <= *v && *v <= *hi,
            _ => false,
        }
    }

    /// Whether the domain holds more than one value.
    pub fn is_mutable(&self) -> bool {
        match &self.domain {
            Domain::Boolean => true,
            Domain::Categorical { categories } => categories.len() > 1,
            Domain::Integer { lo, hi, .. } => lo < hi,
            Domain::Real { lo, hi, .. } => lo < hi,
        }
    }

    pub fn is_numeric(&self) -> bool {
        matches!(self.domain, Domain::Integer { .. } | Domain::Real { .. })
    }

    fn validate(&self) -> Result<()> {
        let err = |m: String| Err(Error::validation(&self.name, m));
        match &self.domain {
            Domain::Boolean => {}
            Domain::Categorical { categories } => {
                if categories.is_empty() {
                    return err("categorical domain has no values".into());
                }
                let unique: HashSet<_> = categories.iter().collect();
                if unique.len() != categories.len() {
                    return err("duplicate category".into());
                }
            }
            Domain::Integer { lo, hi, step } => {
                if lo > hi {
                    return err(format!("lo {lo} > hi {hi}"));
                }
                if *step <= 0 {
                    return err(format!("step must be positive, got {step}"));
                }
            }
            Domain::Real { lo, hi, step } => {
                if !(lo.is_finite() && hi.is_finite()) {
                    return err("bounds must be finite".into());
                }
                if lo > hi {
                    return err(format!("lo {lo} > hi {hi}"));
                }
                if (step.is_nan() || *step <= 0.0) && lo < hi {
                    return err(format!("step must be positive, got {step}"));
                }
            }
        }
        if !self.contains(&self.default) {
            return err(format!("default {} outside the domain", self.default));
        }
        Ok(())
    }

    fn sample(&self, rng: &mut impl Rng) -> ParamValue {
        match &self.domain {
            Domain::Boolean => ParamValue::Bool(rng.random_bool(0.5)),
            Domain::Categorical { categories } => {
                ParamValue::Cat(categories[rng.random_range(0..categories.len())].clone())
            }
            Domain::Integer { lo, hi, .. } => ParamValue::Int(rng.random_range(*lo..=*hi)),
            Domain::Real { lo, hi, .. } => {
                if lo == hi {
                    ParamValue::Real(*lo)
                } else {
                    ParamValue::Real(rng.random_range(*lo..=*hi))
                }
            }
        }
    }

    /// One unit move away from `value`; never returns `value` itself.
    fn step_from(&self, value: &ParamValue, rng: &mut impl Rng) -> ParamValue {
        let up = rng.random_bool(0.5);
        match (&self.domain, value) {
            (Domain::Boolean, ParamValue::Bool(b)) => ParamValue::Bool(!b),
            (Domain::Categorical { categories }, ParamValue::Cat(current)) => {
                let others: Vec<&String> = categories.iter().filter(|c| *c != current).collect();
                ParamValue::Cat(others[rng.random_range(0..others.len())].clone())
            }
            (Domain::Integer { lo, hi, step }, ParamValue::Int(v)) => {
                let moved = |up: bool| {
                    if up {
                        v.saturating_add(*step).min(*hi)
                    } else {
                        v.saturating_sub(*step).max(*lo)
                    }
                };
                let next = moved(up);
                ParamValue::Int(if next == *v { moved(!up) } else { next })
            }
            (Domain::Real { lo, hi, step }, ParamValue::Real(v)) => {
                let moved = |up: bool| {
                    if up {
                        (v + step).min(*hi)
                    } else {
                        (v - step).max(*lo)
                    }
                };
                let next = moved(up);
                ParamValue::Real(if next == *v { moved(!up) } else { next })
            }
            // value of the wrong type: replace with a fresh draw
            _ => self.sample(rng),
        }
    }
}

/// A concrete point in a [`HyperparameterSpace`].
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Configuration {
    pub values: BTreeMap<String, ParamValue>,
}

impl Configuration {
    pub fn get(&self, name: &str) -> Option<&ParamValue> {
        self.values.get(name)
    }

    pub fn set(&mut self, name: impl Into<String>, value: ParamValue) {
        self.values.insert(name.into(), value);
    }

    pub fn with(mut self, name: &str, value: ParamValue) -> Self {
        self.set(name, value);
        self
    }

    /// Number of parameters whose values differ.
    pub fn hamming(&self, other: &Configuration) -> usize {
        let names: HashSet<&String> = self.values.keys().chain(other.values.keys()).collect();
        names
            .into_iter()
            .filter(|n| self.values.get(*n) != other.values.get(*n))
            .count()
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.values.iter().map(|(k, v)| format!("{k}={v}")).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// Ordered product of parameter domains for one learner.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperparameterSpace {
    pub learner: LearnerKind,
    pub params: Vec<ParamDomain>,
}

impl HyperparameterSpace {
    pub fn new(learner: LearnerKind, params: Vec<ParamDomain>) -> Result<Self> {
        let space = Self { learner, params };
        space.validate()?;
        Ok(space)
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen = HashSet::new();
        for p in &self.params {
            if !seen.insert(p.name.as_str()) {
                return Err(Error::validation(&p.name, "duplicate parameter name"));
            }
            p.validate()?;
        }
        Ok(())
    }

    pub fn param(&self, name: &str) -> Option<&ParamDomain> {
        self.params.iter().find(|p| p.name == name)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.params.iter().position(|p| p.name == name)
    }

    pub fn default_config(&self) -> Configuration {
        Configuration {
            values: self
                .params
                .iter()
                .map(|p| (p.name.clone(), p.default.clone()))
                .collect(),
        }
    }

    /// Checks that `config` has exactly the declared parameters, each in domain.
    pub fn check(&self, config: &Configuration) -> Result<()> {
        for p in &self.params {
            match config.get(&p.name) {
                None => return Err(Error::validation(&p.name, "missing from configuration")),
                Some(v) if !p.contains(v) => {
                    return Err(Error::validation(&p.name, format!("value {v} outside the domain")))
                }
                _ => {}
            }
        }
        if let Some(extra) = config.values.keys().find(|k| self.param(k).is_none()) {
            return Err(Error::validation(extra, "not declared in the space"));
        }
        Ok(())
    }

    pub fn contains(&self, config: &Configuration) -> bool {
        self.check(config).is_ok()
    }

    pub fn parse(text: &str) -> Result<Self> {
        parse_space_text(text)
    }

    pub fn to_text(&self) -> String {
        render_space(self)
    }
}

/// Reads and validates a space-definition file.
pub fn parse_space(path: impl AsRef<Path>) -> Result<HyperparameterSpace> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_space_text(&text)
}

fn parse_space_text(text: &str) -> Result<HyperparameterSpace> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let syntax = |line: usize, message: String| Error::SpaceSyntax { line, message };

    let (n, header) = lines.next().ok_or_else(|| syntax(1, "empty space file".into()))?;
    let version = header
        .strip_prefix(SPACE_HEADER)
        .map(str::trim)
        .ok_or_else(|| syntax(n, format!("expected header `{SPACE_HEADER} {SPACE_VERSION}`")))?;
    if version != SPACE_VERSION.to_string() {
        return Err(syntax(n, format!("unsupported space version {version:?}")));
    }

    let (n, learner_line) = lines
        .next()
        .ok_or_else(|| syntax(n + 1, "missing `learner` line".into()))?;
    let learner = learner_line
        .strip_prefix("learner")
        .map(str::trim)
        .ok_or_else(|| syntax(n, "expected `learner <name>`".into()))?
        .parse::<LearnerKind>()
        .map_err(|e| syntax(n, e.to_string()))?;

    let mut params = Vec::new();
    for (n, line) in lines {
        params.push(parse_param_line(n, line)?);
    }
    HyperparameterSpace::new(learner, params)
}

fn parse_param_line(n: usize, line: &str) -> Result<ParamDomain> {
    let syntax = |message: String| Error::SpaceSyntax { line: n, message };
    let mut tokens = line.split_whitespace();
    if tokens.next() != Some("param") {
        return Err(syntax("expected `param <name> <kind> key=value...`".into()));
    }
    let name = tokens.next().ok_or_else(|| syntax("missing parameter name".into()))?;
    let kind = tokens.next().ok_or_else(|| syntax(format!("missing kind for {name}")))?;
    let mut attrs = BTreeMap::new();
    for tok in tokens {
        let (k, v) = tok
            .split_once('=')
            .ok_or_else(|| syntax(format!("expected key=value, got {tok:?}")))?;
        attrs.insert(k, v);
    }
    let invalid = |m: String| Error::validation(name, m);
    let get = |key: &str| attrs.get(key).copied().ok_or_else(|| invalid(format!("missing `{key}`")));
    let int = |key: &str| -> Result<i64> {
        get(key)?
            .parse()
            .map_err(|_| invalid(format!("`{key}` is not an integer")))
    };
    let real = |key: &str| -> Result<f64> {
        get(key)?
            .parse()
            .map_err(|_| invalid(format!("`{key}` is not a number")))
    };

    let allowed: &[&str] = match kind {
        "boolean" => &["default"],
        "categorical" => &["values", "default"],
        "integer" | "real" => &["lo", "hi", "default", "step"],
        other => return Err(invalid(format!("unknown kind {other:?}"))),
    };
    if let Some(k) = attrs.keys().find(|k| !allowed.contains(k)) {
        return Err(invalid(format!("unexpected attribute `{k}` for {kind}")));
    }

    let param = match kind {
        "boolean" => {
            let default = match get("default")? {
                "true" => true,
                "false" => false,
                other => return Err(invalid(format!("boolean default {other:?}"))),
            };
            ParamDomain::boolean(name, default)
        }
        "categorical" => {
            let values: Vec<&str> = get("values")?.split(',').collect();
            let default = get("default")?;
            ParamDomain::categorical(name, &values, default)
        }
        "integer" => {
            let mut p = ParamDomain::integer(name, int("lo")?, int("hi")?, int("default")?);
            if attrs.contains_key("step") {
                let step = int("step")?;
                if let Domain::Integer { step: s, .. } = &mut p.domain {
                    *s = step;
                }
            }
            p
        }
        _ => {
            let p = ParamDomain::real(name, real("lo")?, real("hi")?, real("default")?);
            if attrs.contains_key("step") {
                p.with_real_step(real("step")?)
            } else {
                p
            }
        }
    };
    param.validate()?;
    Ok(param)
}

fn render_space(space: &HyperparameterSpace) -> String {
    let mut out = format!("{SPACE_HEADER} {SPACE_VERSION}\nlearner {}\n", space.learner);
    for p in &space.params {
        let line = match &p.domain {
            Domain::Boolean => format!("param {} boolean default={}", p.name, p.default),
            Domain::Categorical { categories } => format!(
                "param {} categorical values={} default={}",
                p.name,
                categories.join(","),
                p.default
            ),
            Domain::Integer { lo, hi, step } => format!(
                "param {} integer lo={lo} hi={hi} default={} step={step}",
                p.name, p.default
            ),
            Domain::Real { lo, hi, step } => format!(
                "param {} real lo={lo} hi={hi} default={} step={step}",
                p.name, p.default
            ),
        };
        out.push_str(&line);
        out.push('\n');
    }
    out
}

/// Draws every parameter independently and uniformly over its domain.
pub fn sample_uniform(space: &HyperparameterSpace, rng: &mut impl Rng) -> Configuration {
    Configuration {
        values: space
            .params
            .iter()
            .map(|p| (p.name.clone(), p.sample(rng)))
            .collect(),
    }
}

/// Changes exactly one parameter, chosen uniformly among those with more than
/// one value, by one unit step (or to a different category).
pub fn mutate_config(
    c: &Configuration,
    space: &HyperparameterSpace,
    rng: &mut impl Rng,
) -> Result<Configuration> {
    let mutable: Vec<&ParamDomain> = space.params.iter().filter(|p| p.is_mutable()).collect();
    if mutable.is_empty() {
        return Err(Error::MutationImpossible(
            "no parameter has more than one value".into(),
        ));
    }
    let p = mutable[rng.random_range(0..mutable.len())];
    let mut next = c.clone();
    let current = c.get(&p.name).unwrap_or(&p.default);
    next.set(p.name.clone(), p.step_from(current, rng));
    Ok(next)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn space_of(params: Vec<ParamDomain>) -> HyperparameterSpace {
        HyperparameterSpace::new(LearnerKind::DecisionTree, params).unwrap()
    }

    #[test]
    fn parse_single_param() {
        let s = HyperparameterSpace::parse(
            "parfait-space 1\nlearner decision_tree\nparam max_depth integer lo=1 hi=32 default=8\n",
        )
        .unwrap();
        assert_eq!(s.params.len(), 1);
        assert_eq!(s.default_config().get("max_depth"), Some(&ParamValue::Int(8)));
    }

    #[test]
    fn parse_errors_name_parameter() {
        let bad_default = "parfait-space 1\nlearner decision_tree\nparam max_depth integer lo=1 hi=32 default=64\n";
        assert!(matches!(
            HyperparameterSpace::parse(bad_default),
            Err(Error::Validation { param, .. }) if param == "max_depth"
        ));
        let dup = "parfait-space 1\nlearner decision_tree\nparam a boolean default=true\nparam a boolean default=false\n";
        assert!(matches!(
            HyperparameterSpace::parse(dup),
            Err(Error::Validation { param, message }) if param == "a" && message.contains("duplicate")
        ));
        let kind = "parfait-space 1\nlearner decision_tree\nparam a complex default=1\n";
        assert!(matches!(
            HyperparameterSpace::parse(kind),
            Err(Error::Validation { message, .. }) if message.contains("unknown kind")
        ));
        let inverted = "parfait-space 1\nlearner decision_tree\nparam a real lo=2 hi=1 default=1\n";
        assert!(matches!(
            HyperparameterSpace::parse(inverted),
            Err(Error::Validation { message, .. }) if message.contains("lo")
        ));
        assert!(matches!(
            HyperparameterSpace::parse("learner decision_tree\n"),
            Err(Error::SpaceSyntax { line: 1, .. })
        ));
    }

    #[test]
    fn render_parse_round_trip() {
        let s = space_of(vec![
            ParamDomain::categorical("criterion", &["gini", "entropy"], "gini"),
            ParamDomain::integer("max_depth", 1, 32, 8),
            ParamDomain::real("min_weight_fraction_leaf", 0.0, 0.5, 0.0),
            ParamDomain::boolean("bootstrap", true),
        ]);
        assert_eq!(HyperparameterSpace::parse(&s.to_text()).unwrap(), s);
    }

    #[test]
    fn sampling_is_seeded() {
        let s = space_of(vec![
            ParamDomain::integer("a", 0, 1000, 0),
            ParamDomain::real("b", 0.0, 1.0, 0.5),
        ]);
        let a = sample_uniform(&s, &mut ChaCha8Rng::seed_from_u64(3));
        let b = sample_uniform(&s, &mut ChaCha8Rng::seed_from_u64(3));
        assert_eq!(a, b);
    }

    #[test]
    fn boolean_frequency() {
        let s = space_of(vec![ParamDomain::boolean("b", true)]);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let trues = (0..10_000)
            .filter(|_| sample_uniform(&s, &mut rng).get("b") == Some(&ParamValue::Bool(true)))
            .count();
        let freq = trues as f64 / 10_000.0;
        assert!((0.48..=0.52).contains(&freq), "{freq}");
    }

    #[test]
    fn integer_frequencies() {
        let s = space_of(vec![ParamDomain::integer("k", 1, 4, 1)]);
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let mut counts = [0usize; 4];
        for _ in 0..40_000 {
            if let Some(ParamValue::Int(v)) = sample_uniform(&s, &mut rng).get("k") {
                counts[(*v - 1) as usize] += 1;
            }
        }
        // chi-square with 3 dof; 11.34 is the 0.99 quantile
        let expected = 10_000.0;
        let chi2: f64 = counts
            .iter()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum();
        assert!(chi2 < 11.34, "chi2 {chi2}");
        for c in counts {
            let f = c as f64 / 40_000.0;
            assert!((0.24..=0.26).contains(&f), "{f}");
        }
    }

    #[test]
    fn mutation_unit_step() {
        let s = space_of(vec![ParamDomain::integer("max_depth", 1, 32, 8)]);
        let c = s.default_config();
        for seed in 0..20 {
            let m = mutate_config(&c, &s, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
            let v = m.get("max_depth").unwrap();
            assert!(*v == ParamValue::Int(7) || *v == ParamValue::Int(9));
        }
    }

    #[test]
    fn mutation_reflects_at_bound() {
        let s = space_of(vec![ParamDomain::integer("max_depth", 1, 32, 1)]);
        let c = s.default_config();
        for seed in 0..20 {
            let m = mutate_config(&c, &s, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
            assert_eq!(m.get("max_depth"), Some(&ParamValue::Int(2)));
        }
    }

    #[test]
    fn mutation_picks_other_category() {
        let s = space_of(vec![ParamDomain::categorical("solver", &["gd", "newton"], "gd")]);
        let m = mutate_config(&s.default_config(), &s, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert_eq!(m.get("solver"), Some(&ParamValue::Cat("newton".into())));
    }

    #[test]
    fn mutation_impossible() {
        let s = space_of(vec![ParamDomain::categorical("only", &["x"], "x")]);
        let r = mutate_config(&s.default_config(), &s, &mut ChaCha8Rng::seed_from_u64(0));
        assert!(matches!(r, Err(Error::MutationImpossible(_))));
    }

    #[test]
    fn real_step_defaults_to_hundredth() {
        let p = ParamDomain::real("tol", 0.0, 2.0, 1.0);
        assert_eq!(p.domain, Domain::Real { lo: 0.0, hi: 2.0, step: 0.02 });
    }
}
