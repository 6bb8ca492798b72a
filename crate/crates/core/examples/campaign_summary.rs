//! A small repeated campaign on the toy dataset: corpus files plus the summary
//! table with 95% intervals, written to a temporary directory.

use std::path::Path;

use parfait::campaign::{cmd_search, CampaignConfig};
use parfait::{LearnerKind, SearchSettings, SearchType};

fn main() -> parfait::Result<()> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR"));
    let out = std::env::temp_dir().join("parfait-campaign-example");
    let campaign = CampaignConfig {
        dataset: root.join("data/toy.schema.toml"),
        space: root.join("spaces/random_forest.space"),
        learner: LearnerKind::RandomForest,
        protected: None,
        settings: SearchSettings::deterministic(SearchType::GrayBox, 1, 100),
        repetitions: 4,
        out: out.clone(),
    };
    let o = cmd_search(&campaign)?;
    println!("wrote {} corpora to {}", o.corpus_files.len(), out.display());
    print!("{}", std::fs::read_to_string(&o.summary_file).map_err(|e| parfait::Error::io(&o.summary_file, e))?);
    Ok(())
}
