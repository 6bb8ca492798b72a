use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use parfait::campaign::{self, CampaignConfig, CampaignFile, DEFAULT_REPETITIONS};
use parfait::explain::mining::{DEFAULT_DATASET_THRESHOLD, DEFAULT_OVERALL_THRESHOLD};
use parfait::search::{Metric, DEFAULT_EPSILON};
use parfait::{Error, LearnerKind, Result, SearchSettings, SearchType};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Search,
    Explain,
    Mitigate,
    Mine,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Axis {
    Aod,
    Eod,
}

impl From<Axis> for Metric {
    fn from(a: Axis) -> Self {
        match a {
            Axis::Aod => Metric::Aod,
            Axis::Eod => Metric::Eod,
        }
    }
}

/// Fairness testing and debugging over learner hyperparameters.
///
/// search and mitigate read a dataset schema and a space file; explain takes
/// corpus files and mine takes explanation (.tree.json) files as positional inputs.
#[derive(Debug, Parser)]
#[command(name = "parfait", version)]
struct Cli {
    #[arg(long, value_enum)]
    mode: Mode,
    /// TOML campaign file; flags given on the command line take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// logistic_regression | decision_tree | random_forest
    #[arg(long)]
    algorithm: Option<String>,
    /// Dataset schema (TOML).
    #[arg(long)]
    dataset: Option<PathBuf>,
    #[arg(long)]
    space: Option<PathBuf>,
    /// Protected column, overriding the schema.
    #[arg(long)]
    protected: Option<String>,
    /// random | blackbox | graybox
    #[arg(long)]
    search: Option<String>,
    /// Seconds per run.
    #[arg(long)]
    timeout: Option<f64>,
    #[arg(long)]
    max_evals: Option<usize>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    clusters_max: Option<usize>,
    /// Overridden by PARFAIT_SEED.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Explanation axis.
    #[arg(long, value_enum, default_value = "aod")]
    axis: Axis,
    /// Metric minimized by mitigate.
    #[arg(long, value_enum, default_value = "eod")]
    primary: Axis,
    #[arg(long, default_value_t = DEFAULT_OVERALL_THRESHOLD)]
    overall_threshold: usize,
    #[arg(long, default_value_t = DEFAULT_DATASET_THRESHOLD)]
    dataset_threshold: usize,
    inputs: Vec<PathBuf>,
}

fn seed(cli: &Cli, file: &CampaignFile) -> Result<u64> {
    match std::env::var("PARFAIT_SEED") {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| Error::validation("PARFAIT_SEED", format!("not an unsigned integer: {s:?}"))),
        Err(_) => Ok(cli.seed.or(file.seed).unwrap_or(0)),
    }
}

fn campaign(cli: &Cli, file: &CampaignFile) -> Result<CampaignConfig> {
    let need = |v: Option<PathBuf>, flag: &str| v.ok_or_else(|| Error::validation(flag, "required for this mode"));
    let learner: LearnerKind = cli
        .algorithm
        .clone()
        .or(file.algorithm.clone())
        .ok_or_else(|| Error::validation("algorithm", "required for this mode"))?
        .parse()?;
    let search_type: SearchType = cli.search.clone().or(file.search.clone()).unwrap_or("blackbox".into()).parse()?;
    let settings = SearchSettings {
        search_type,
        timeout_seconds: cli.timeout.or(file.timeout),
        epsilon: cli.epsilon.or(file.epsilon).unwrap_or(DEFAULT_EPSILON),
        seed: seed(cli, file)?,
        max_evals: cli.max_evals.or(file.max_evals),
    };
    Ok(CampaignConfig {
        dataset: need(cli.dataset.clone().or(file.dataset.clone()), "dataset")?,
        space: need(cli.space.clone().or(file.space.clone()), "space")?,
        learner,
        protected: cli.protected.clone().or(file.protected.clone()),
        settings,
        repetitions: cli.reps.or(file.reps).unwrap_or(DEFAULT_REPETITIONS),
        out: cli.out.clone().or(file.out.clone()).unwrap_or_else(|| "parfait-out".into()),
    })
}

fn run(cli: &Cli) -> Result<()> {
    let file = match &cli.config {
        Some(p) => CampaignFile::from_file(p)?,
        None => CampaignFile::default(),
    };
    let out = cli.out.clone().or(file.out.clone()).unwrap_or_else(|| "parfait-out".into());
    match cli.mode {
        Mode::Search => {
            let o = campaign::cmd_search(&campaign(cli, &file)?)?;
            println!("{} corpus files, summary in {}", o.corpus_files.len(), o.summary_file.display());
            if !o.empty_runs.is_empty() {
                eprintln!("warning: runs {:?} had no valid case", o.empty_runs);
            }
        }
        Mode::Explain => {
            if cli.inputs.is_empty() {
                return Err(Error::validation("inputs", "explain needs at least one corpus file"));
            }
            let clusters_max = cli.clusters_max.or(file.clusters_max).unwrap_or(3);
            let seed = seed(cli, &file)?;
            for path in &cli.inputs {
                let o = campaign::cmd_explain(path, cli.axis.into(), clusters_max, seed, &out)?;
                println!(
                    "{}: k={} tree accuracy {:.4} -> {}",
                    path.display(),
                    o.explanation.clusters.k,
                    o.explanation.tree.training_accuracy,
                    o.tree_json.display()
                );
            }
        }
        Mode::Mitigate => {
            let r = campaign::cmd_mitigate(&campaign(cli, &file)?, cli.primary.into())?;
            println!(
                "default: accuracy {:.4} eod {:.4} aod {:.4}",
                r.default.accuracy, r.default.eod, r.default.aod
            );
            println!(
                "chosen:  accuracy {:.4} eod {:.4} aod {:.4}{}",
                r.chosen.accuracy,
                r.chosen.eod,
                r.chosen.aod,
                if r.improved { "" } else { " (no improvement)" }
            );
        }
        Mode::Mine => {
            let r = campaign::cmd_mine(&cli.inputs, cli.overall_threshold, cli.dataset_threshold, &out)?;
            for row in r.flagged() {
                println!("{} appears in {} trees over {} datasets", row.parameter, row.appearances, row.dataset_count);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.kind().exit_code() as u8)
        }
    }
}
