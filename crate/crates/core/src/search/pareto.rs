//! Twin dominance on (accuracy, bias).
//!
//! A member `g` fairness-dominates candidate `c` under metric `F` when it is
//! strictly more accurate and strictly less biased; it bias-dominates `c` when
//! it is strictly more accurate and strictly more biased. Keeping both kinds
//! of non-dominated points preserves the low-bias and the high-bias frontier.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::{TestCase, TestCorpus, ACC_SLACK};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Eod,
    Aod,
}

impl Metric {
    pub const ALL: [Metric; 2] = [Metric::Eod, Metric::Aod];

    pub fn of(self, case: &TestCase) -> f64 {
        match self {
            Metric::Eod => case.eod,
            Metric::Aod => case.aod,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Metric::Eod => "eod",
            Metric::Aod => "aod",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Front {
    /// Not fairness-dominated: best accuracy for its low bias.
    Fairness,
    /// Not bias-dominated: best accuracy for its high bias.
    Bias,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reason {
    NonDominated(Metric),
    UnseenPath,
    Dominated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Verdict {
    pub accepted: bool,
    pub reason: Reason,
}

fn fairness_dominates(g: &TestCase, c: &TestCase, m: Metric) -> bool {
    c.accuracy < g.accuracy && m.of(c) > m.of(g)
}

fn bias_dominates(g: &TestCase, c: &TestCase, m: Metric) -> bool {
    c.accuracy < g.accuracy && m.of(c) < m.of(g)
}

fn undominated(c: &TestCase, members: &[TestCase], m: Metric) -> bool {
    !members
        .iter()
        .any(|g| fairness_dominates(g, c, m) || bias_dominates(g, c, m))
}

/// Decides whether `candidate` belongs in `corpus`.
///
/// With `graybox` set, a candidate that fails the dominance test is still
/// accepted when its path signature is unseen and its accuracy is within
/// `epsilon` of the default's.
pub fn is_promising(candidate: &TestCase, corpus: &TestCorpus, epsilon: f64, graybox: bool) -> Verdict {
    for m in Metric::ALL {
        if undominated(candidate, &corpus.cases, m) {
            return Verdict {
                accepted: true,
                reason: Reason::NonDominated(m),
            };
        }
    }
    if graybox {
        if let Some(sig) = candidate.path_sig {
            if !corpus.seen_paths.contains(&sig)
                && candidate.accuracy >= corpus.default_accuracy - epsilon - ACC_SLACK
            {
                return Verdict {
                    accepted: true,
                    reason: Reason::UnseenPath,
                };
            }
        }
    }
    Verdict {
        accepted: false,
        reason: Reason::Dominated,
    }
}

/// Indices of `cases` on the given frontier for metric `m`.
pub fn pareto_front(cases: &[TestCase], m: Metric, front: Front) -> Vec<usize> {
    (0..cases.len())
        .filter(|&i| {
            !cases.iter().enumerate().any(|(j, g)| {
                j != i
                    && match front {
                        Front::Fairness => fairness_dominates(g, &cases[i], m),
                        Front::Bias => bias_dominates(g, &cases[i], m),
                    }
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learners::LearnerKind;
    use crate::search::{SearchStats, SearchType};
    use crate::space::{Configuration, HyperparameterSpace};
    use std::collections::BTreeSet;

    pub(crate) fn case(acc: f64, eod: f64, aod: f64) -> TestCase {
        TestCase {
            config: Configuration::default(),
            accuracy: acc,
            eod,
            aod,
            path_sig: None,
            eval_index: 0,
            wall_time: 0.0,
        }
    }

    fn corpus(cases: Vec<TestCase>) -> TestCorpus {
        TestCorpus {
            learner: LearnerKind::DecisionTree,
            space: HyperparameterSpace::new(LearnerKind::DecisionTree, vec![]).unwrap(),
            dataset: "t".into(),
            search_type: SearchType::BlackBox,
            seed: 0,
            epsilon: 0.01,
            default_accuracy: cases[0].accuracy,
            seen_paths: cases.iter().filter_map(|c| c.path_sig).collect::<BTreeSet<_>>(),
            cases,
            stats: SearchStats::default(),
        }
    }

    #[test]
    fn dominance_examples() {
        let k = corpus(vec![case(0.80, 0.10, 0.10)]);
        // less accurate and more biased
        assert!(!is_promising(&case(0.78, 0.12, 0.12), &k, 0.01, false).accepted);
        // less accurate and less biased
        assert!(!is_promising(&case(0.78, 0.05, 0.05), &k, 0.01, false).accepted);
        // more accurate
        assert!(is_promising(&case(0.82, 0.30, 0.30), &k, 0.01, false).accepted);
        // tie on accuracy is never dominated
        assert!(is_promising(&case(0.80, 0.50, 0.50), &k, 0.01, false).accepted);
        // less accurate but equal bias on one metric
        let v = is_promising(&case(0.70, 0.30, 0.10), &k, 0.01, false);
        assert_eq!(v.reason, Reason::NonDominated(Metric::Aod));
    }

    #[test]
    fn graybox_path_rule() {
        let mut base = case(0.80, 0.10, 0.10);
        base.path_sig = Some(1);
        let k = corpus(vec![base]);
        let mut c = case(0.795, 0.2, 0.2);
        c.path_sig = Some(2);
        let v = is_promising(&c, &k, 0.01, true);
        assert_eq!(v.reason, Reason::UnseenPath);
        assert!(!is_promising(&c, &k, 0.01, false).accepted);
        c.path_sig = Some(1);
        assert!(!is_promising(&c, &k, 0.01, true).accepted);
        c.path_sig = Some(3);
        c.accuracy = 0.70;
        assert!(!is_promising(&c, &k, 0.01, true).accepted);
    }

    #[test]
    fn fronts() {
        let cases = vec![case(0.9, 0.2, 0.2), case(0.8, 0.1, 0.1), case(0.8, 0.3, 0.3), case(0.9, 0.05, 0.05)];
        assert_eq!(pareto_front(&cases, Metric::Eod, Front::Fairness), vec![0, 3]);
        assert_eq!(pareto_front(&cases, Metric::Eod, Front::Bias), vec![0, 2, 3]);
    }
}
