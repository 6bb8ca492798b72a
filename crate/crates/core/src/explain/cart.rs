//! Shallow Gini CART over hyperparameter values, used to explain which
//! parameters separate clusters.
//!
//! Numeric parameters split as `param <= threshold` at midpoints between
//! adjacent distinct values. Categorical and boolean parameters split as
//! `param == value`, one category against the rest.
//!
//! # Text form
//!
//! ```text
//! max_features == sqrt — samples [4, 30]
//!   T: class 1 — samples [0, 30]
//!   F: min_weight_fraction_leaf <= 0.0125 — samples [4, 0]
//!     T: class 0 — samples [3, 0]
//!     F: class 0 — samples [1, 0]
//! ```

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::{Configuration, Domain, HyperparameterSpace, ParamValue};

pub const MAX_DEPTH: usize = 3;
const GAIN_EPS: f64 = 1e-12;
const SEP: &str = " — samples ";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op")]
pub enum Predicate {
    #[serde(rename = "<=")]
    Le { param: String, threshold: f64 },
    #[serde(rename = "==")]
    Eq { param: String, value: ParamValue },
}

impl Predicate {
    pub fn param(&self) -> &str {
        match self {
            Predicate::Le { param, .. } | Predicate::Eq { param, .. } => param,
        }
    }

    /// Evaluates the predicate; a parameter absent from `config` takes the space default.
    pub fn holds(&self, config: &Configuration, space: &HyperparameterSpace) -> bool {
        let value = config
            .get(self.param())
            .or_else(|| space.param(self.param()).map(|p| &p.default));
        match (self, value) {
            (Predicate::Le { threshold, .. }, Some(v)) => v.as_f64().is_some_and(|x| x <= *threshold),
            (Predicate::Eq { value: want, .. }, Some(v)) => v == want,
            (_, None) => false,
        }
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Predicate::Le { param, threshold } => write!(f, "{param} <= {threshold}"),
            Predicate::Eq { param, value } => write!(f, "{param} == {value}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Node {
    Split {
        predicate: Predicate,
        counts: Vec<usize>,
        yes: Box<Node>,
        no: Box<Node>,
    },
    Leaf {
        counts: Vec<usize>,
        label: usize,
    },
}

impl Node {
    pub fn counts(&self) -> &[usize] {
        match self {
            Node::Split { counts, .. } | Node::Leaf { counts, .. } => counts,
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Node::Leaf { .. } => 0,
            Node::Split { yes, no, .. } => 1 + yes.depth().max(no.depth()),
        }
    }

    /// Parameter names of internal nodes, with their depth, in preorder.
    pub fn split_params(&self) -> Vec<(usize, &str)> {
        let mut out = Vec::new();
        self.collect_params(0, &mut out);
        out
    }

    fn collect_params<'a>(&'a self, depth: usize, out: &mut Vec<(usize, &'a str)>) {
        if let Node::Split { predicate, yes, no, .. } = self {
            out.push((depth, predicate.param()));
            yes.collect_params(depth + 1, out);
            no.collect_params(depth + 1, out);
        }
    }

    pub fn predict(&self, config: &Configuration, space: &HyperparameterSpace) -> usize {
        match self {
            Node::Leaf { label, .. } => *label,
            Node::Split { predicate, yes, no, .. } => {
                if predicate.holds(config, space) {
                    yes.predict(config, space)
                } else {
                    no.predict(config, space)
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplanationTree {
    pub root: Node,
    pub n_classes: usize,
    /// Accuracy on the configurations the tree was fit to.
    pub training_accuracy: f64,
}

impl ExplanationTree {
    pub fn depth(&self) -> usize {
        self.root.depth()
    }

    pub fn predict(&self, config: &Configuration, space: &HyperparameterSpace) -> usize {
        self.root.predict(config, space)
    }

    pub fn render(&self) -> String {
        render_node(&self.root)
    }
}

fn gini(counts: &[usize]) -> f64 {
    let n: usize = counts.iter().sum();
    if n == 0 {
        return 0.0;
    }
    1.0 - counts
        .iter()
        .map(|&c| (c as f64 / n as f64).powi(2))
        .sum::<f64>()
}

fn majority(counts: &[usize]) -> usize {
    // first maximum, so ties go to the lowest label
    counts
        .iter()
        .enumerate()
        .fold((0, 0), |(bi, bc), (i, &c)| if c > bc { (i, c) } else { (bi, bc) })
        .0
}

struct Fitter<'a> {
    space: &'a HyperparameterSpace,
    values: Vec<Vec<ParamValue>>, // [param][row]
    labels: &'a [usize],
    n_classes: usize,
}

impl Fitter<'_> {
    fn counts(&self, rows: &[usize]) -> Vec<usize> {
        let mut c = vec![0; self.n_classes];
        for &r in rows {
            c[self.labels[r]] += 1;
        }
        c
    }

    fn candidates(&self, p: usize, rows: &[usize]) -> Vec<Predicate> {
        let param = &self.space.params[p];
        let name = param.name.clone();
        match &param.domain {
            Domain::Integer { .. } | Domain::Real { .. } => {
                let mut xs: Vec<f64> = rows.iter().filter_map(|&r| self.values[p][r].as_f64()).collect();
                xs.sort_by(f64::total_cmp);
                xs.dedup();
                xs.windows(2)
                    .map(|w| Predicate::Le {
                        param: name.clone(),
                        threshold: w[0] + (w[1] - w[0]) / 2.0,
                    })
                    .collect()
            }
            Domain::Categorical { categories } => categories
                .iter()
                .map(|c| Predicate::Eq {
                    param: name.clone(),
                    value: ParamValue::Cat(c.clone()),
                })
                .collect(),
            Domain::Boolean => vec![Predicate::Eq {
                param: name,
                value: ParamValue::Bool(true),
            }],
        }
    }

    fn holds(&self, pred: &Predicate, p: usize, row: usize) -> bool {
        let v = &self.values[p][row];
        match pred {
            Predicate::Le { threshold, .. } => v.as_f64().is_some_and(|x| x <= *threshold),
            Predicate::Eq { value, .. } => v == value,
        }
    }

    fn grow(&self, rows: &[usize], depth: usize) -> Node {
        let counts = self.counts(rows);
        let parent = gini(&counts);
        if depth >= MAX_DEPTH || parent == 0.0 {
            return Node::Leaf {
                label: majority(&counts),
                counts,
            };
        }
        let n = rows.len() as f64;
        let mut best: Option<(f64, Predicate, usize)> = None;
        for p in 0..self.space.params.len() {
            for pred in self.candidates(p, rows) {
                let (yes, no): (Vec<usize>, Vec<usize>) = rows.iter().partition(|&&r| self.holds(&pred, p, r));
                if yes.is_empty() || no.is_empty() {
                    continue;
                }
                let child = (yes.len() as f64 * gini(&self.counts(&yes))
                    + no.len() as f64 * gini(&self.counts(&no)))
                    / n;
                let gain = parent - child;
                if gain > GAIN_EPS && best.as_ref().is_none_or(|(g, _, _)| gain > g + GAIN_EPS) {
                    best = Some((gain, pred, p));
                }
            }
        }
        match best {
            None => Node::Leaf {
                label: majority(&counts),
                counts,
            },
            Some((_, predicate, p)) => {
                let (yes, no): (Vec<usize>, Vec<usize>) =
                    rows.iter().partition(|&&r| self.holds(&predicate, p, r));
                Node::Split {
                    yes: Box::new(self.grow(&yes, depth + 1)),
                    no: Box::new(self.grow(&no, depth + 1)),
                    predicate,
                    counts,
                }
            }
        }
    }
}

/// Fits a depth-3 Gini tree predicting `labels` from the configurations.
pub fn fit_cart(
    configs: &[Configuration],
    labels: &[usize],
    space: &HyperparameterSpace,
) -> Result<ExplanationTree> {
    if configs.len() != labels.len() {
        return Err(Error::LengthMismatch(format!(
            "{} configurations, {} labels",
            configs.len(),
            labels.len()
        )));
    }
    let n_classes = labels.iter().max().map_or(0, |m| m + 1);
    let distinct = {
        let mut seen = vec![false; n_classes];
        labels.iter().for_each(|&l| seen[l] = true);
        seen.iter().filter(|&&s| s).count()
    };
    if distinct < 2 {
        return Err(Error::Degenerate(format!(
            "explanation needs two classes, found {distinct}"
        )));
    }
    let values = space
        .params
        .iter()
        .map(|p| {
            configs
                .iter()
                .map(|c| c.get(&p.name).unwrap_or(&p.default).clone())
                .collect()
        })
        .collect();
    let fitter = Fitter {
        space,
        values,
        labels,
        n_classes,
    };
    let rows: Vec<usize> = (0..configs.len()).collect();
    let root = fitter.grow(&rows, 0);
    let correct = configs
        .iter()
        .zip(labels)
        .filter(|(c, &l)| root.predict(c, space) == l)
        .count();
    Ok(ExplanationTree {
        root,
        n_classes,
        training_accuracy: correct as f64 / configs.len() as f64,
    })
}

fn fmt_counts(counts: &[usize]) -> String {
    let inner: Vec<String> = counts.iter().map(|c| c.to_string()).collect();
    format!("[{}]", inner.join(", "))
}

pub fn render_node(root: &Node) -> String {
    fn go(node: &Node, indent: usize, prefix: &str, out: &mut String) {
        out.push_str(&"  ".repeat(indent));
        out.push_str(prefix);
        match node {
            Node::Leaf { counts, label } => {
                out.push_str(&format!("class {label}{SEP}{}\n", fmt_counts(counts)));
            }
            Node::Split { predicate, counts, yes, no } => {
                out.push_str(&format!("{predicate}{SEP}{}\n", fmt_counts(counts)));
                go(yes, indent + 1, "T: ", out);
                go(no, indent + 1, "F: ", out);
            }
        }
    }
    let mut out = String::new();
    go(root, 0, "", &mut out);
    out
}

fn parse_value(text: &str) -> ParamValue {
    match text {
        "true" => ParamValue::Bool(true),
        "false" => ParamValue::Bool(false),
        other => ParamValue::Cat(other.to_string()),
    }
}

/// Parses the output of [`render_node`].
pub fn parse_node(text: &str) -> Result<Node> {
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .collect();
    let mut pos = 0;
    let node = parse_at(&lines, &mut pos, 0, "")?;
    if pos != lines.len() {
        return Err(Error::format("tree text", format!("trailing content at line {}", lines[pos].0 + 1)));
    }
    Ok(node)
}

fn parse_at(lines: &[(usize, &str)], pos: &mut usize, indent: usize, prefix: &str) -> Result<Node> {
    let (lineno, raw) = *lines
        .get(*pos)
        .ok_or_else(|| Error::format("tree text", "unexpected end of input"))?;
    let bad = |m: &str| Error::format("tree text", format!("line {}: {m}", lineno + 1));
    let body = raw
        .strip_prefix(&"  ".repeat(indent))
        .and_then(|s| s.strip_prefix(prefix))
        .ok_or_else(|| bad(&format!("expected indentation {indent} and prefix {prefix:?}")))?;
    let (head, counts) = body.split_once(SEP).ok_or_else(|| bad("missing sample counts"))?;
    let counts: Vec<usize> = counts
        .trim()
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| bad("counts must be bracketed"))?
        .split(',')
        .map(|c| c.trim().parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| bad("bad count"))?;
    *pos += 1;
    if let Some(label) = head.strip_prefix("class ") {
        let label = label.parse().map_err(|_| bad("bad class label"))?;
        return Ok(Node::Leaf { counts, label });
    }
    let mut parts = head.splitn(3, ' ');
    let (param, op, value) = match (parts.next(), parts.next(), parts.next()) {
        (Some(p), Some(o), Some(v)) => (p.to_string(), o, v),
        _ => return Err(bad("expected `param op value`")),
    };
    let predicate = match op {
        "<=" => Predicate::Le {
            param,
            threshold: value.parse().map_err(|_| bad("bad threshold"))?,
        },
        "==" => Predicate::Eq {
            param,
            value: parse_value(value),
        },
        other => return Err(bad(&format!("unknown operator {other:?}"))),
    };
    let yes = parse_at(lines, pos, indent + 1, "T: ")?;
    let no = parse_at(lines, pos, indent + 1, "F: ")?;
    Ok(Node::Split {
        predicate,
        counts,
        yes: Box::new(yes),
        no: Box::new(no),
    })
}
