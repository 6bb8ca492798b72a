//! Explain several corpora from different datasets and count which parameters
//! their trees split on.

use parfait::explain::{explain_corpus, mine_frequent};
use parfait::search::Metric;
use parfait::synthetic::{planted_space, PlantedBias};
use parfait::{run_search, split_dataset, LearnerKind, SearchSettings, SearchType};

fn main() -> parfait::Result<()> {
    let mut trees = Vec::new();
    for seed in 0..4 {
        let data = PlantedBias::default().with_seed(seed).generate()?;
        let split = split_dataset(&data, seed)?;
        for st in [SearchType::Random, SearchType::BlackBox] {
            let corpus = run_search(
                LearnerKind::DecisionTree,
                &planted_space(),
                &split,
                &SearchSettings::deterministic(st, seed, 400),
            )?;
            match explain_corpus(&corpus, Metric::Aod, 3, seed) {
                Ok(e) => trees.push((e.tree, data.name.clone())),
                Err(e) => println!("{} {st}: {e}", data.name),
            }
        }
    }
    let report = mine_frequent(&trees, 2, 1);
    println!("{:<26} {:>11} {:>8} {:>7}", "parameter", "appearances", "datasets", "flagged");
    for r in &report.rows {
        println!("{:<26} {:>11} {:>8} {:>7}", r.parameter, r.appearances, r.dataset_count, r.flagged);
    }
    Ok(())
}
