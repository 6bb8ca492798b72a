//! Experiment plumbing: repeated searches with summary tables, explanation
//! reports, mitigation, and tree mining. Everything here writes plain files
//! (JSONL, CSV, JSON, text) into an output directory.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::data::{load_dataset, split_dataset, DataSplit, Dataset, DatasetSchema};
use crate::error::{Error, Result};
use crate::explain::{explain_corpus, mine_frequent, Explanation, MiningReport};
use crate::learners::LearnerKind;
use crate::search::{read_corpus, run_search, run_search_observed, write_corpus, ACC_SLACK, Metric, SearchSettings, SearchType, TestCase, TestCorpus};
use crate::space::{parse_space, HyperparameterSpace};
use crate::stats::{mean_ci, MeanCi};

pub const SUMMARY_HEADER: &str = "# parfait-summary v1";
pub const RUNS_HEADER: &str = "# parfait-runs v1";
pub const CLUSTERS_HEADER: &str = "# parfait-clusters v1";
pub const SCATTER_HEADER: &str = "# parfait-scatter v1";
pub const MINING_HEADER: &str = "# parfait-mining v1";
pub const MITIGATION_FORMAT: &str = "parfait-mitigation";

/// Width of the accuracy band used for the "top" columns of the summary.
pub const TOP_BAND: f64 = 0.01;
pub const DEFAULT_REPETITIONS: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignConfig {
    pub dataset: PathBuf,
    pub space: PathBuf,
    pub learner: LearnerKind,
    /// Overrides the protected column named in the schema.
    pub protected: Option<String>,
    pub settings: SearchSettings,
    pub repetitions: usize,
    pub out: PathBuf,
}

/// On-disk form of a campaign, every field optional so command-line flags can fill gaps.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignFile {
    pub dataset: Option<PathBuf>,
    pub space: Option<PathBuf>,
    pub algorithm: Option<String>,
    pub protected: Option<String>,
    pub search: Option<String>,
    pub timeout: Option<f64>,
    pub max_evals: Option<usize>,
    pub epsilon: Option<f64>,
    pub clusters_max: Option<usize>,
    pub seed: Option<u64>,
    pub reps: Option<usize>,
    pub out: Option<PathBuf>,
}

impl CampaignFile {
    /// Reads a TOML campaign; relative paths resolve against the file's directory.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut f: CampaignFile = toml::from_str(&text).map_err(|e| Error::format(path.display().to_string(), e))?;
        let dir = path.parent().unwrap_or(Path::new(""));
        for p in [&mut f.dataset, &mut f.space, &mut f.out].into_iter().flatten() {
            if p.is_relative() {
                *p = dir.join(&*p);
            }
        }
        Ok(f)
    }
}

impl CampaignConfig {
    pub fn validate(&self) -> Result<()> {
        for (what, p) in [("dataset", &self.dataset), ("space", &self.space)] {
            if !p.is_file() {
                return Err(Error::validation(what, format!("{} does not exist", p.display())));
            }
        }
        if self.repetitions == 0 {
            return Err(Error::validation("reps", "must be at least 1"));
        }
        self.settings.validate()
    }

    pub fn load_dataset(&self) -> Result<Dataset> {
        let mut schema = DatasetSchema::from_file(&self.dataset)?;
        if let Some(p) = &self.protected {
            schema.protected = p.clone();
        }
        let csv = schema
            .csv
            .clone()
            .ok_or_else(|| Error::Schema(format!("{} does not name a csv file", self.dataset.display())))?;
        load_dataset(csv, &schema)
    }

    pub fn load_space(&self) -> Result<HyperparameterSpace> {
        let space = parse_space(&self.space)?;
        if space.learner != self.learner {
            return Err(Error::validation(
                "space",
                format!("{} is declared for {}, not {}", self.space.display(), space.learner, self.learner),
            ));
        }
        Ok(space)
    }

    /// The split is drawn once from the base seed and shared by every repetition.
    fn prepare(&self) -> Result<(HyperparameterSpace, DataSplit)> {
        self.validate()?;
        let space = self.load_space()?;
        let data = self.load_dataset()?;
        let split = split_dataset(&data, self.settings.seed)?;
        Ok((space, split))
    }

    fn run_seed(&self, run: usize) -> u64 {
        self.settings.seed.wrapping_add(run as u64)
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Timing lines go to a sidecar log so the other artifacts stay reproducible.
fn append_log(dir: &Path, line: &str) -> Result<()> {
    use std::io::Write;
    let path = dir.join("timing.log");
    let mut f = fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(&path)
        .map_err(|e| Error::io(&path, e))?;
    writeln!(f, "{line}").map_err(|e| Error::io(&path, e))
}

/// Per-run statistics in the column layout of the summary table.
/// `None` means the run had no valid case.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunSummary {
    pub valid: usize,
    pub accuracy: Option<(f64, f64)>,
    pub aod: Option<(f64, f64)>,
    pub aod_top: Option<(f64, f64)>,
    pub eod: Option<(f64, f64)>,
    pub eod_top: Option<(f64, f64)>,
}

fn min_max(xs: impl Iterator<Item = f64>) -> Option<(f64, f64)> {
    xs.fold(None, |acc, x| match acc {
        None => Some((x, x)),
        Some((lo, hi)) => Some((lo.min(x), hi.max(x))),
    })
}

/// `top` ranges are taken over the valid cases within [`TOP_BAND`] of the best valid accuracy.
pub fn summarize_run(corpus: &TestCorpus) -> RunSummary {
    let valid: Vec<&TestCase> = corpus.valid_cases().collect();
    let accuracy = min_max(valid.iter().map(|c| c.accuracy));
    let top: Vec<&TestCase> = match accuracy {
        Some((_, best)) => valid.iter().copied().filter(|c| c.accuracy >= best - TOP_BAND).collect(),
        None => Vec::new(),
    };
    RunSummary {
        valid: valid.len(),
        accuracy,
        aod: min_max(valid.iter().map(|c| c.aod)),
        aod_top: min_max(top.iter().map(|c| c.aod)),
        eod: min_max(valid.iter().map(|c| c.eod)),
        eod_top: min_max(top.iter().map(|c| c.eod)),
    }
}

pub const SUMMARY_COLUMNS: [&str; 11] = [
    "valid_inputs",
    "accuracy_min",
    "accuracy_max",
    "aod_min",
    "aod_max",
    "aod_min_top",
    "aod_max_top",
    "eod_min",
    "eod_max",
    "eod_min_top",
    "eod_max_top",
];

impl RunSummary {
    /// Values in [`SUMMARY_COLUMNS`] order.
    pub fn values(&self) -> [Option<f64>; 11] {
        let lo = |r: Option<(f64, f64)>| r.map(|r| r.0);
        let hi = |r: Option<(f64, f64)>| r.map(|r| r.1);
        [
            Some(self.valid as f64),
            lo(self.accuracy),
            hi(self.accuracy),
            lo(self.aod),
            hi(self.aod),
            lo(self.aod_top),
            hi(self.aod_top),
            lo(self.eod),
            hi(self.eod),
            lo(self.eod_top),
            hi(self.eod_top),
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub column: &'static str,
    /// `None` when no run produced a value.
    pub ci: Option<MeanCi>,
}

pub fn summarize_runs(runs: &[RunSummary]) -> Vec<SummaryRow> {
    SUMMARY_COLUMNS
        .iter()
        .enumerate()
        .map(|(i, &column)| {
            let xs: Vec<f64> = runs.iter().filter_map(|r| r.values()[i]).collect();
            SummaryRow { column, ci: mean_ci(&xs) }
        })
        .collect()
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".to_string(), |x| format!("{x}"))
}

pub fn render_summary(rows: &[SummaryRow]) -> String {
    let mut s = format!("{SUMMARY_HEADER}\nstatistic,n,mean,ci_low,ci_high\n");
    for r in rows {
        match r.ci {
            Some(ci) => writeln!(s, "{},{},{},{},{}", r.column, ci.n, ci.mean, ci.lower(), ci.upper()),
            None => writeln!(s, "{},0,n/a,n/a,n/a", r.column),
        }
        .expect("writing to a string");
    }
    s
}

pub fn render_runs(runs: &[(u64, RunSummary)]) -> String {
    let mut s = format!("{RUNS_HEADER}\nrun,seed,{}\n", SUMMARY_COLUMNS.join(","));
    for (i, (seed, r)) in runs.iter().enumerate() {
        let vals: Vec<String> = r.values().into_iter().map(fmt_opt).collect();
        writeln!(s, "{i},{seed},{}", vals.join(",")).expect("writing to a string");
    }
    s
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub corpus_files: Vec<PathBuf>,
    pub summary_file: PathBuf,
    pub runs: Vec<RunSummary>,
    /// Runs whose corpus held no valid case.
    pub empty_runs: Vec<usize>,
}

pub fn corpus_file_name(run: usize) -> String {
    format!("run_{run:02}.jsonl")
}

/// Runs `repetitions` seeded searches (seed, seed + 1, ...) and writes one corpus
/// per run plus `runs.csv` and `summary.csv`.
pub fn cmd_search(campaign: &CampaignConfig) -> Result<SearchOutcome> {
    let (space, split) = campaign.prepare()?;
    create_dir(&campaign.out)?;
    let mut corpus_files = Vec::new();
    let mut runs = Vec::new();
    let mut empty_runs = Vec::new();
    for run in 0..campaign.repetitions {
        let seed = campaign.run_seed(run);
        let settings = SearchSettings {
            seed,
            ..campaign.settings.clone()
        };
        let started = Instant::now();
        let corpus = run_search(campaign.learner, &space, &split, &settings).map_err(|e| Error::Run {
            run,
            source: Box::new(e),
        })?;
        let path = campaign.out.join(corpus_file_name(run));
        write_corpus(&corpus, &path)?;
        append_log(
            &campaign.out,
            &format!("search run {run} seed {seed}: {:.3}s", started.elapsed().as_secs_f64()),
        )?;
        let summary = summarize_run(&corpus);
        if summary.valid == 0 {
            log::warn!("run {run}: no valid case, summary columns marked n/a");
            empty_runs.push(run);
        }
        runs.push((seed, summary));
        corpus_files.push(path);
    }
    let runs_file = campaign.out.join("runs.csv");
    write_text(&runs_file, &render_runs(&runs))?;
    let runs: Vec<RunSummary> = runs.into_iter().map(|(_, r)| r).collect();
    let summary_file = campaign.out.join("summary.csv");
    write_text(&summary_file, &render_summary(&summarize_runs(&runs)))?;
    Ok(SearchOutcome {
        corpus_files,
        summary_file,
        runs,
        empty_runs,
    })
}

#[derive(Debug, Clone)]
pub struct ExplainOutcome {
    pub explanation: Explanation,
    pub tree_json: PathBuf,
    pub tree_text: PathBuf,
    pub clusters_csv: PathBuf,
    pub scatter_csv: PathBuf,
}

/// Explains one corpus file and writes `<stem>.tree.json`, `<stem>.tree.txt`,
/// `<stem>.clusters.csv` and `<stem>.scatter.csv` into `out`.
pub fn cmd_explain(corpus_path: &Path, axis: Metric, clusters_max: usize, seed: u64, out: &Path) -> Result<ExplainOutcome> {
    let corpus = read_corpus(corpus_path)?;
    let explanation = explain_corpus(&corpus, axis, clusters_max, seed)?;
    create_dir(out)?;
    let stem = corpus_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "corpus".into());
    let valid: Vec<&TestCase> = corpus.valid_cases().collect();
    let labels = &explanation.clusters.labels;

    let mut clusters = format!("{CLUSTERS_HEADER}\neval_index,cluster\n");
    let mut scatter = format!("{SCATTER_HEADER}\naccuracy,aod,eod,cluster\n");
    for (c, l) in valid.iter().zip(labels) {
        writeln!(clusters, "{},{l}", c.eval_index).expect("writing to a string");
        writeln!(scatter, "{},{},{},{l}", c.accuracy, c.aod, c.eod).expect("writing to a string");
    }
    let tree_text = format!(
        "# k={} axis={} accuracy={}\n{}",
        explanation.clusters.k,
        explanation.axis,
        explanation.tree.training_accuracy,
        explanation.tree.render()
    );

    let o = ExplainOutcome {
        tree_json: out.join(format!("{stem}.tree.json")),
        tree_text: out.join(format!("{stem}.tree.txt")),
        clusters_csv: out.join(format!("{stem}.clusters.csv")),
        scatter_csv: out.join(format!("{stem}.scatter.csv")),
        explanation,
    };
    write_text(&o.tree_json, &o.explanation.to_json()?)?;
    write_text(&o.tree_text, &tree_text)?;
    write_text(&o.clusters_csv, &clusters)?;
    write_text(&o.scatter_csv, &scatter)?;
    Ok(o)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MitigationReport {
    pub format: String,
    pub version: u32,
    pub primary: Metric,
    pub default: TestCase,
    pub chosen: TestCase,
    /// False when no valid case beat the default on the primary metric.
    pub improved: bool,
    pub evaluations: usize,
}

fn rank_key(c: &TestCase, primary: Metric) -> (f64, f64, f64, usize) {
    let secondary = match primary {
        Metric::Eod => Metric::Aod,
        Metric::Aod => Metric::Eod,
    };
    (primary.of(c), secondary.of(c), -c.accuracy, c.eval_index)
}

/// Lowest primary metric among valid `evaluated` cases (accuracy at least the
/// default's minus `epsilon`), then lowest secondary metric, then highest
/// accuracy, then earliest evaluation. Falls back to `default` unless the pick
/// is strictly better on the primary metric.
pub fn select_mitigation(evaluated: &[TestCase], default: &TestCase, epsilon: f64, primary: Metric) -> (TestCase, bool) {
    let floor = default.accuracy - epsilon - ACC_SLACK;
    let best = evaluated
        .iter()
        .filter(|c| c.accuracy >= floor)
        .min_by(|a, b| {
            let (ka, kb) = (rank_key(a, primary), rank_key(b, primary));
            ka.0.total_cmp(&kb.0)
                .then(ka.1.total_cmp(&kb.1))
                .then(ka.2.total_cmp(&kb.2))
                .then(ka.3.cmp(&kb.3))
        })
        .unwrap_or(default);
    if primary.of(best) < primary.of(default) {
        (best.clone(), true)
    } else {
        (default.clone(), false)
    }
}

/// Black-box search under `settings`' budget, then [`select_mitigation`] over
/// every configuration the search evaluated. The archive alone is not enough:
/// it only admits cases no archived member beats on accuracy, so a cheaper but
/// fairer configuration found after a more accurate one would be lost.
pub fn mitigate(
    learner: LearnerKind,
    space: &HyperparameterSpace,
    split: &DataSplit,
    settings: &SearchSettings,
    primary: Metric,
) -> Result<(MitigationReport, TestCorpus)> {
    let settings = SearchSettings {
        search_type: SearchType::BlackBox,
        ..settings.clone()
    };
    let mut evaluated = Vec::new();
    let corpus = run_search_observed(learner, space, split, &settings, &mut |c, _| evaluated.push(c.clone()))?;
    let (chosen, improved) = select_mitigation(&evaluated, corpus.default_case(), settings.epsilon, primary);
    if !improved {
        log::warn!("no configuration improved on the default {primary}");
    }
    let report = MitigationReport {
        format: MITIGATION_FORMAT.into(),
        version: 1,
        primary,
        default: corpus.default_case().clone(),
        chosen,
        improved,
        evaluations: corpus.stats.evaluations,
    };
    Ok((report, corpus))
}

/// [`mitigate`] on a campaign; writes `mitigation.json` and the searched corpus into `out`.
pub fn cmd_mitigate(campaign: &CampaignConfig, primary: Metric) -> Result<MitigationReport> {
    let (space, split) = campaign.prepare()?;
    let (report, corpus) = mitigate(campaign.learner, &space, &split, &campaign.settings, primary)?;
    create_dir(&campaign.out)?;
    write_corpus(&corpus, campaign.out.join("mitigation_corpus.jsonl"))?;
    let json = serde_json::to_string_pretty(&report).map_err(|e| Error::format("mitigation", e))?;
    write_text(&campaign.out.join("mitigation.json"), &json)?;
    Ok(report)
}

pub fn render_mining(report: &MiningReport) -> String {
    let mut s = format!(
        "{MINING_HEADER}\n# overall_threshold={} dataset_threshold={}\nparameter,appearances,dataset_count,flagged\n",
        report.overall_threshold, report.dataset_threshold
    );
    for r in &report.rows {
        writeln!(s, "{},{},{},{}", r.parameter, r.appearances, r.dataset_count, r.flagged).expect("writing to a string");
    }
    s
}

/// Reads explanation files (their `dataset` field identifies the task) and
/// writes `mining.csv` into `out`.
pub fn cmd_mine(tree_files: &[PathBuf], overall_threshold: usize, dataset_threshold: usize, out: &Path) -> Result<MiningReport> {
    if tree_files.is_empty() {
        return Err(Error::validation("trees", "no tree files given"));
    }
    let mut trees = Vec::with_capacity(tree_files.len());
    for path in tree_files {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let e = Explanation::from_json(&text).map_err(|e| Error::format(path.display().to_string(), e))?;
        trees.push((e.tree, e.dataset));
    }
    let report = mine_frequent(&trees, overall_threshold, dataset_threshold);
    create_dir(out)?;
    write_text(&out.join("mining.csv"), &render_mining(&report))?;
    Ok(report)
}
