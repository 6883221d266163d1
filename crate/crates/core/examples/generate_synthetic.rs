//! Seeded synthetic instances: disjoint and overlapping groups, written to
//! and read back from the JSON instance format.
//!
//! cargo run --example generate_synthetic

use fair_ksupplier::data::{generate, GroupMode, SyntheticSpec};
use fair_ksupplier::{read_instance, write_instance};

fn main() -> fair_ksupplier::Result<()> {
    let disjoint = generate(&SyntheticSpec::new(1_000, 5, 5, 10, 1))?;
    println!(
        "disjoint: n_c = {}, n_f = {}, group sizes {:?}, alpha {:?}",
        disjoint.clients().len(),
        disjoint.facilities().len(),
        disjoint.groups().iter().map(Vec::len).collect::<Vec<_>>(),
        disjoint.alpha()
    );

    let mut spec = SyntheticSpec::new(1_000, 5, 4, 5, 1);
    spec.group_mode = GroupMode::Overlapping { overlap_factor: 2.0 };
    let overlapping = generate(&spec)?;
    println!(
        "overlapping: group sizes {:?} (target ~ {}), disjoint: {}",
        overlapping.groups().iter().map(Vec::len).collect::<Vec<_>>(),
        2 * overlapping.facilities().len() / 4,
        overlapping.is_disjoint()
    );

    let path = std::env::temp_dir().join("fair_ksupplier_example.json");
    write_instance(&path, &disjoint, Some(serde_json::to_value(&spec)?))?;
    let back = read_instance(&path)?;
    println!("round trip through {}: same groups = {}", path.display(), back.groups() == disjoint.groups());
    Ok(())
}
