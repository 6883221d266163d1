//! Loading a CSV through a TOML config: one-hot encoding, min-max scaling,
//! facility predicate and grouping. Uses the toy fixture by default; pass a
//! config path (e.g. one of `configs/*.toml` with its dataset downloaded) to
//! load something else.
//!
//! cargo run --example tabular_ingest [-- path/to/config.toml]

use std::path::PathBuf;

use fair_ksupplier::data::{load_tabular, TabularConfig};
use fair_ksupplier::{solve_disjoint, unfair_ksupplier, SolveOptions, StartRule};

fn main() -> fair_ksupplier::Result<()> {
    let path = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| {
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/toy.toml")
    });
    let data = load_tabular(&TabularConfig::from_file(&path)?)?;
    let p = &data.provenance;
    println!("{}", path.display());
    println!("  rows read {}, dropped {}", p.rows_read, p.rows_dropped);
    println!("  n = {}, d = {}, n_c = {}, n_f = {}", p.n, p.d, p.n_c, p.n_f);
    println!("  groups {:?} with sizes {:?}", p.group_labels, p.group_sizes);
    println!("  features {:?}", p.features);

    let fair = solve_disjoint(&data.instance, &SolveOptions::default())?;
    let unfair = unfair_ksupplier(&data.instance, data.instance.k(), StartRule::default())?;
    println!("  fair cost {:.4}, unfair cost {:.4}", fair.cost, unfair.cost);
    Ok(())
}
