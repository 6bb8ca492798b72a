//! Cluster a black-box corpus in the accuracy/EOD plane and print the CART tree
//! that separates the clusters.

use parfait::explain::explain_corpus;
use parfait::search::Metric;
use parfait::synthetic::{planted_space, PlantedBias};
use parfait::{run_search, split_dataset, LearnerKind, SearchSettings, SearchType};

fn main() -> parfait::Result<()> {
    let seed = 4;
    let data = PlantedBias::default().with_seed(seed).generate()?;
    let split = split_dataset(&data, seed)?;
    let corpus = run_search(
        LearnerKind::DecisionTree,
        &planted_space(),
        &split,
        &SearchSettings::deterministic(SearchType::BlackBox, seed, 1000),
    )?;
    let e = explain_corpus(&corpus, Metric::Eod, 3, seed)?;
    println!(
        "{} valid cases, k = {}, cluster sizes {:?}, tree accuracy {:.3}",
        e.clusters.labels.len(),
        e.clusters.k,
        e.clusters.sizes(),
        e.tree.training_accuracy
    );
    print!("{}", e.tree.render());
    Ok(())
}
