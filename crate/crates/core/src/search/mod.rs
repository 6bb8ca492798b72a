//! The detection loop: seed the corpus with the default configuration, then
//! repeatedly generate a candidate, train and score it, and archive it when it
//! is promising.
//!
//! Candidates come from uniform sampling (random search) or from mutating a
//! corpus member picked with weights favoring recent entries (black-box and
//! gray-box search). Gray-box search additionally archives any candidate whose
//! training path signature is new, provided its accuracy stays within the
//! margin of the default's.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::DataSplit;
use crate::error::{Error, Result};
use crate::learners::{self, LearnerKind, TraceLog};
use crate::metrics;
use crate::space::{mutate_config, sample_uniform, Configuration, HyperparameterSpace};

mod io;
mod pareto;

pub use io::{read_corpus, write_corpus, CorpusHeader, CORPUS_FORMAT, CORPUS_VERSION};
pub use pareto::{is_promising, pareto_front, Front, Metric, Reason, Verdict};

/// Default accuracy margin for validity and gray-box acceptance.
pub const DEFAULT_EPSILON: f64 = 0.01;

/// Slack for comparing accuracies that are ratios of small integers.
pub(crate) const ACC_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchType {
    Random,
    BlackBox,
    GrayBox,
}

impl SearchType {
    pub const ALL: [SearchType; 3] = [SearchType::Random, SearchType::BlackBox, SearchType::GrayBox];

    pub fn name(self) -> &'static str {
        match self {
            SearchType::Random => "random",
            SearchType::BlackBox => "blackbox",
            SearchType::GrayBox => "graybox",
        }
    }
}

impl fmt::Display for SearchType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SearchType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(SearchType::Random),
            "blackbox" | "black-box" => Ok(SearchType::BlackBox),
            "graybox" | "gray-box" | "greybox" => Ok(SearchType::GrayBox),
            other => Err(Error::validation("search", format!("unknown search type {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchSettings {
    pub search_type: SearchType,
    /// Wall-clock budget in seconds. `None` runs in deterministic mode, bounded by `max_evals`.
    pub timeout_seconds: Option<f64>,
    pub epsilon: f64,
    pub seed: u64,
    pub max_evals: Option<usize>,
}

impl SearchSettings {
    /// Deterministic settings bounded only by an evaluation count.
    pub fn deterministic(search_type: SearchType, seed: u64, max_evals: usize) -> Self {
        Self {
            search_type,
            timeout_seconds: None,
            epsilon: DEFAULT_EPSILON,
            seed,
            max_evals: Some(max_evals),
        }
    }

    pub fn timed(search_type: SearchType, seed: u64, timeout_seconds: f64) -> Self {
        Self {
            search_type,
            timeout_seconds: Some(timeout_seconds),
            epsilon: DEFAULT_EPSILON,
            seed,
            max_evals: None,
        }
    }

    pub fn is_deterministic(&self) -> bool {
        self.timeout_seconds.is_none()
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.epsilon) {
            return Err(Error::validation("epsilon", format!("{} outside [0, 1)", self.epsilon)));
        }
        match (self.timeout_seconds, self.max_evals) {
            (Some(t), _) if t.is_nan() || t <= 0.0 => {
                Err(Error::validation("timeout", format!("must be positive, got {t}")))
            }
            (None, None) => Err(Error::validation(
                "max_evals",
                "a timeout or an evaluation cap is required",
            )),
            _ => Ok(()),
        }
    }
}

/// One evaluated configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestCase {
    pub config: Configuration,
    pub accuracy: f64,
    pub eod: f64,
    pub aod: f64,
    #[serde(with = "io::hex_signature")]
    pub path_sig: Option<u64>,
    pub eval_index: usize,
    /// Seconds since the search started; 0 in deterministic mode.
    pub wall_time: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SearchStats {
    pub evaluations: usize,
    pub accepted: usize,
    pub accepted_new_path: usize,
    pub rejected: usize,
    pub invalid_combinations: usize,
    pub undefined_metrics: usize,
}

/// The archive of promising test cases. `cases[0]` is always the default configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct TestCorpus {
    pub learner: LearnerKind,
    pub space: HyperparameterSpace,
    pub dataset: String,
    pub search_type: SearchType,
    pub seed: u64,
    pub epsilon: f64,
    pub cases: Vec<TestCase>,
    pub default_accuracy: f64,
    pub seen_paths: BTreeSet<u64>,
    pub stats: SearchStats,
}

impl TestCorpus {
    pub fn len(&self) -> usize {
        self.cases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cases.is_empty()
    }

    pub fn default_case(&self) -> &TestCase {
        &self.cases[0]
    }

    pub fn push(&mut self, case: TestCase) {
        if let Some(sig) = case.path_sig {
            self.seen_paths.insert(sig);
        }
        self.cases.push(case);
    }

    /// Whether `case` keeps accuracy within `epsilon` of the default's.
    pub fn is_valid(&self, case: &TestCase) -> bool {
        case.accuracy >= self.default_accuracy - self.epsilon - ACC_SLACK
    }

    pub fn valid_cases(&self) -> impl Iterator<Item = &TestCase> {
        self.cases.iter().filter(|c| self.is_valid(c))
    }

    /// `max - min` of a metric over valid cases.
    pub fn spread(&self, metric: Metric) -> f64 {
        let (lo, hi) = self
            .valid_cases()
            .map(|c| metric.of(c))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
        if hi >= lo {
            hi - lo
        } else {
            0.0
        }
    }
}

/// 1-based position `i` of an `n`-element population drawn with probability `2i / (n(n+1))`,
/// returned as a 0-based index.
pub fn weighted_index(n: usize, rng: &mut impl Rng) -> usize {
    debug_assert!(n > 0);
    let total = (n as u64) * (n as u64 + 1) / 2;
    triangular_position(rng.random_range(0..total))
}

/// 0-based index of the band containing `u`, where band `i` has width `i + 1`.
fn triangular_position(u: u64) -> usize {
    // smallest i with i(i+1)/2 > u
    let mut i = (((8.0 * u as f64 + 1.0).sqrt() - 1.0) / 2.0).floor() as u64 + 1;
    while i * (i + 1) / 2 <= u {
        i += 1;
    }
    while i > 1 && (i - 1) * i / 2 > u {
        i -= 1;
    }
    (i - 1) as usize
}

/// Picks a corpus configuration, favoring recent entries linearly.
pub fn weighted_pick<'a>(corpus: &'a TestCorpus, rng: &mut impl Rng) -> Result<&'a Configuration> {
    if corpus.is_empty() {
        return Err(Error::State("cannot pick from an empty corpus".into()));
    }
    Ok(&corpus.cases[weighted_index(corpus.len(), rng)].config)
}

fn mix64(mut z: u64) -> u64 {
    // splitmix64 finalizer
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Xor of the hashes of the distinct sites in `trace`; 0 for an empty trace.
pub fn path_signature(trace: &TraceLog) -> u64 {
    trace
        .sites
        .iter()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .fold(0, |acc, &site| acc ^ mix64(site))
}

struct Evaluation {
    accuracy: f64,
    eod: f64,
    aod: f64,
    path_sig: Option<u64>,
}

fn evaluate_config(
    learner: LearnerKind,
    config: &Configuration,
    split: &DataSplit,
    with_path: bool,
) -> Result<Evaluation> {
    let mut trace = TraceLog::new();
    let model = learners::train(learner, config, &split.train, with_path.then_some(&mut trace))?;
    let report = metrics::evaluate(&model, &split.validation)?;
    Ok(Evaluation {
        accuracy: report.accuracy,
        eod: report.eod,
        aod: report.aod,
        path_sig: with_path.then(|| path_signature(&trace)),
    })
}

/// Runs one search from the default configuration.
pub fn run_search(
    learner: LearnerKind,
    space: &HyperparameterSpace,
    split: &DataSplit,
    settings: &SearchSettings,
) -> Result<TestCorpus> {
    run_search_observed(learner, space, split, settings, &mut |_, _| {})
}

/// [`run_search`] that also reports every evaluated case, accepted or not, to `observe`.
/// The default case is reported first as accepted.
pub fn run_search_observed(
    learner: LearnerKind,
    space: &HyperparameterSpace,
    split: &DataSplit,
    settings: &SearchSettings,
    observe: &mut dyn FnMut(&TestCase, bool),
) -> Result<TestCorpus> {
    settings.validate()?;
    if space.learner != learner {
        return Err(Error::Setup(format!(
            "space is declared for {} but the learner is {learner}",
            space.learner
        )));
    }
    let graybox = settings.search_type == SearchType::GrayBox;
    let started = Instant::now();
    let default = space.default_config();
    let eval = evaluate_config(learner, &default, split, graybox)
        .map_err(|e| Error::Setup(format!("default configuration failed: {e}")))?;
    let mut corpus = TestCorpus {
        learner,
        space: space.clone(),
        dataset: split.train.name.clone(),
        search_type: settings.search_type,
        seed: settings.seed,
        epsilon: settings.epsilon,
        cases: Vec::new(),
        default_accuracy: eval.accuracy,
        seen_paths: BTreeSet::new(),
        stats: SearchStats::default(),
    };
    let default_case = TestCase {
        config: default,
        accuracy: eval.accuracy,
        eod: eval.eod,
        aod: eval.aod,
        path_sig: eval.path_sig,
        eval_index: 0,
        wall_time: if settings.is_deterministic() {
            0.0
        } else {
            started.elapsed().as_secs_f64()
        },
    };
    observe(&default_case, true);
    corpus.push(default_case);
    continue_search_observed(&mut corpus, split, settings, observe)?;
    Ok(corpus)
}

/// Extends an existing corpus (for example one read back from disk).
///
/// `max_evals` counts the evaluations of this call; evaluation indices continue
/// from the corpus' previous total.
pub fn continue_search(
    corpus: &mut TestCorpus,
    split: &DataSplit,
    settings: &SearchSettings,
) -> Result<()> {
    continue_search_observed(corpus, split, settings, &mut |_, _| {})
}

pub fn continue_search_observed(
    corpus: &mut TestCorpus,
    split: &DataSplit,
    settings: &SearchSettings,
    observe: &mut dyn FnMut(&TestCase, bool),
) -> Result<()> {
    settings.validate()?;
    if corpus.is_empty() {
        return Err(Error::State("corpus has no default case".into()));
    }
    let graybox = settings.search_type == SearchType::GrayBox;
    // resumed runs draw from a distinct stream so they do not replay the first run's candidates
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    rng.set_stream(corpus.stats.evaluations as u64);
    let started = Instant::now();
    let budget = settings.timeout_seconds;
    let mut done = 0usize;

    loop {
        if settings.max_evals.is_some_and(|m| done >= m) {
            break;
        }
        if budget.is_some_and(|t| started.elapsed().as_secs_f64() >= t) {
            break;
        }
        done += 1;
        corpus.stats.evaluations += 1;
        let eval_index = corpus.stats.evaluations;

        let candidate = match settings.search_type {
            SearchType::Random => sample_uniform(&corpus.space, &mut rng),
            SearchType::BlackBox | SearchType::GrayBox => {
                let parent = weighted_pick(corpus, &mut rng)?.clone();
                mutate_config(&parent, &corpus.space, &mut rng)?
            }
        };
        let eval = match evaluate_config(corpus.learner, &candidate, split, graybox) {
            Ok(e) => e,
            Err(Error::InvalidCombination(msg)) => {
                log::trace!("eval {eval_index}: discarded ({msg})");
                corpus.stats.invalid_combinations += 1;
                continue;
            }
            Err(Error::UndefinedMetric(msg)) => {
                log::trace!("eval {eval_index}: discarded ({msg})");
                corpus.stats.undefined_metrics += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        let case = TestCase {
            config: candidate,
            accuracy: eval.accuracy,
            eod: eval.eod,
            aod: eval.aod,
            path_sig: eval.path_sig,
            eval_index,
            wall_time: if settings.is_deterministic() {
                0.0
            } else {
                started.elapsed().as_secs_f64()
            },
        };
        let verdict = is_promising(&case, corpus, settings.epsilon, graybox);
        observe(&case, verdict.accepted);
        if verdict.accepted {
            corpus.stats.accepted += 1;
            if verdict.reason == Reason::UnseenPath {
                corpus.stats.accepted_new_path += 1;
            }
            corpus.push(case);
        } else {
            corpus.stats.rejected += 1;
        }
    }
    log::debug!(
        "{} search seed {}: {} evaluations, corpus size {}",
        settings.search_type,
        settings.seed,
        corpus.stats.evaluations,
        corpus.len()
    );
    Ok(())
}
