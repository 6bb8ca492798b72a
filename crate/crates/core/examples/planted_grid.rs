//! The planted-bias benchmark: sweep each value of max_features and a grid of
//! min_weight_fraction_leaf with everything else at its default, showing the EOD
//! range a search can reach among configurations within 1% of the default's accuracy.

use parfait::space::ParamValue;
use parfait::synthetic::{planted_space, PlantedBias};
use parfait::{evaluate, split_dataset, train, LearnerKind};

fn main() -> parfait::Result<()> {
    let space = planted_space();
    for seed in 0..3 {
        let data = PlantedBias::default().with_seed(seed).generate()?;
        let split = split_dataset(&data, seed)?;
        let run = |c: &parfait::Configuration| -> parfait::Result<(f64, f64)> {
            let r = evaluate(&train(LearnerKind::DecisionTree, c, &split.train, None)?, &split.validation)?;
            Ok((r.accuracy, r.eod))
        };
        let default = space.default_config();
        let (acc0, eod0) = run(&default)?;
        let mut points = vec![];
        for mf in ["all", "sqrt", "log2", "1"] {
            for step in 0..=20 {
                let c = default
                    .clone()
                    .with("max_features", ParamValue::Cat(mf.into()))
                    .with("min_weight_fraction_leaf", ParamValue::Real(step as f64 * 0.005));
                points.push(run(&c)?);
            }
        }
        let valid: Vec<f64> = points.iter().filter(|p| p.0 >= acc0 - 0.01).map(|p| p.1).collect();
        let lo = valid.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = valid.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        println!(
            "seed {seed}: default accuracy {acc0:.3} eod {eod0:.3}; {} of {} grid points valid, EOD {lo:.3}..{hi:.3} (spread {:.3})",
            valid.len(),
            points.len(),
            hi - lo
        );
    }
    Ok(())
}
