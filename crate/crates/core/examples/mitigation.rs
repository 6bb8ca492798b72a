//! Pick the lowest-EOD configuration a black-box search finds within 1% of the
//! default accuracy, and compare it with the default.

use parfait::campaign::mitigate;
use parfait::search::Metric;
use parfait::synthetic::{planted_space, PlantedBias};
use parfait::{split_dataset, LearnerKind, SearchSettings, SearchType};

fn main() -> parfait::Result<()> {
    for seed in 0..3 {
        let data = PlantedBias::default().with_seed(seed).generate()?;
        let split = split_dataset(&data, seed)?;
        let settings = SearchSettings::deterministic(SearchType::BlackBox, seed, 1000);
        let (r, _) = mitigate(LearnerKind::DecisionTree, &planted_space(), &split, &settings, Metric::Eod)?;
        println!(
            "seed {seed}: default acc {:.3} eod {:.3} aod {:.3} -> chosen acc {:.3} eod {:.3} aod {:.3}{}",
            r.default.accuracy,
            r.default.eod,
            r.default.aod,
            r.chosen.accuracy,
            r.chosen.eod,
            r.chosen.aod,
            if r.improved { "" } else { " (no improvement)" }
        );
        let changed: Vec<_> = r
            .chosen
            .config
            .values
            .iter()
            .filter(|(k, v)| r.default.config.get(k) != Some(*v))
            .map(|(k, v)| format!("{k}={v}"))
            .collect();
        println!("    changed: {}", changed.join(", "));
    }
    Ok(())
}
