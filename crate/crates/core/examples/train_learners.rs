//! Train each learner at its default configuration and report accuracy, EOD and AOD
//! on the validation split, along with the number of distinct trace sites visited.

use std::path::Path;

use parfait::data::load_from_schema;
use parfait::{evaluate, parse_space, split_dataset, train, LearnerKind, TraceLog};

fn main() -> parfait::Result<()> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR"));
    let data = load_from_schema(root.join("data/toy.schema.toml"))?;
    let split = split_dataset(&data, 0)?;
    for learner in LearnerKind::ALL {
        let space = parse_space(root.join(format!("spaces/{learner}.space")))?;
        let mut trace = TraceLog::new();
        let model = train(learner, &space.default_config(), &split.train, Some(&mut trace))?;
        let r = evaluate(&model, &split.validation)?;
        println!(
            "{learner:<20} accuracy {:.3}  eod {:.3}  aod {:.3}  path signature {:016x}",
            r.accuracy,
            r.eod,
            r.aod,
            parfait::path_signature(&trace)
        );
        for (g, s) in r.group_stats.groups.iter().enumerate() {
            println!("    {:<2} tpr {:?} fpr {:?}", data.group_names[g], s.tpr(), s.fpr());
        }
    }
    Ok(())
}
