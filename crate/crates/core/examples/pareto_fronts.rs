//! Search once, then extract the low-bias and high-bias frontiers from the archive.

use parfait::search::{pareto_front, Front, Metric};
use parfait::synthetic::{planted_space, PlantedBias};
use parfait::{run_search, split_dataset, LearnerKind, SearchSettings, SearchType};

fn main() -> parfait::Result<()> {
    let data = PlantedBias::default().with_seed(1).generate()?;
    let split = split_dataset(&data, 1)?;
    let corpus = run_search(
        LearnerKind::DecisionTree,
        &planted_space(),
        &split,
        &SearchSettings::deterministic(SearchType::BlackBox, 1, 500),
    )?;
    for front in [Front::Fairness, Front::Bias] {
        println!("{front:?} front on EOD:");
        let mut last = None;
        for i in pareto_front(&corpus.cases, Metric::Eod, front) {
            let c = &corpus.cases[i];
            // equal points recur as the search revisits a plateau; show the first
            if last == Some((c.accuracy, c.eod)) {
                continue;
            }
            last = Some((c.accuracy, c.eod));
            println!("  #{:<4} accuracy {:.3} eod {:.3}  {:?}", c.eval_index, c.accuracy, c.eod, c.config.get("max_features"));
        }
    }
    Ok(())
}
