//! Parse a space file, sample uniformly, and walk a few unit mutations from the default.

use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use parfait::{mutate_config, parse_space, sample_uniform};

fn main() -> parfait::Result<()> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("spaces/logistic_regression.space");
    let space = parse_space(&path)?;
    print!("{}", space.to_text());

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    println!("\nuniform: {:?}", sample_uniform(&space, &mut rng).values);

    let mut c = space.default_config();
    for step in 1..=5 {
        let next = mutate_config(&c, &space, &mut rng)?;
        let changed: Vec<_> = next.values.iter().filter(|(k, v)| c.get(k) != Some(*v)).collect();
        println!("mutation {step}: {changed:?}");
        c = next;
    }
    Ok(())
}
