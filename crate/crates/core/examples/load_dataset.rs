//! Load a CSV through its schema and split it 75/25 with every group on both sides.

use std::path::Path;

use parfait::data::load_from_schema;
use parfait::{group_indices, split_dataset};

fn main() -> parfait::Result<()> {
    let schema = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/toy.schema.toml");
    let data = load_from_schema(&schema)?;
    println!("{}: {} rows, features {:?}", data.name, data.n_rows(), data.feature_names);
    for (g, rows) in group_indices(&data).iter().enumerate() {
        let favorable = rows.iter().filter(|&&i| data.labels[i] == data.favorable_label).count();
        println!("  group {:<2} {:>4} rows, {:.1}% favorable", data.group_names[g], rows.len(), 100.0 * favorable as f64 / rows.len() as f64);
    }
    let split = split_dataset(&data, 42)?;
    println!("split: {} train / {} validation", split.train.n_rows(), split.validation.n_rows());
    Ok(())
}
