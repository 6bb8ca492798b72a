//! Run random, black-box and gray-box search with the same budget and compare
//! the archives they build.

use std::path::Path;

use parfait::data::load_from_schema;
use parfait::search::Metric;
use parfait::{parse_space, run_search, split_dataset, LearnerKind, SearchSettings, SearchType};

fn main() -> parfait::Result<()> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR"));
    let data = load_from_schema(root.join("data/toy.schema.toml"))?;
    let split = split_dataset(&data, 0)?;
    let space = parse_space(root.join("spaces/decision_tree.space"))?;
    for st in SearchType::ALL {
        let corpus = run_search(LearnerKind::DecisionTree, &space, &split, &SearchSettings::deterministic(st, 9, 300))?;
        let s = &corpus.stats;
        println!(
            "{st:<8} archive {:>3} (new paths {:>3})  invalid {:>2}  valid {:>3}  EOD spread {:.3}  AOD spread {:.3}",
            corpus.len(),
            s.accepted_new_path,
            s.invalid_combinations,
            corpus.valid_cases().count(),
            corpus.spread(Metric::Eod),
            corpus.spread(Metric::Aod)
        );
    }
    Ok(())
}
