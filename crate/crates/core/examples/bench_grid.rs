//! The benchmark harness as a library: run a grid, write the versioned CSV
//! and print the per-configuration summary with the price of fairness.
//!
//! cargo run --release --example bench_grid [-- grid.toml]

use fair_ksupplier::bench::{format_summary, run_grid, summarize, write_csv, GridConfig};

const DEFAULT_GRID: &str = r#"
base_seed = 1
instances = 3
repeats = 3
algorithms = ["unfair-3apx", "fair-disjoint-3apx", "fair-intersecting-3apx"]
n = [2000]
d = [5]
t = [2, 4]
k = [4]
"#;

fn main() -> fair_ksupplier::Result<()> {
    let grid = match std::env::args().nth(1) {
        Some(path) => GridConfig::from_file(path)?,
        None => GridConfig::from_toml(DEFAULT_GRID)?,
    };
    let rows = run_grid(&grid, 4)?;
    let path = std::env::temp_dir().join("fair_ksupplier_bench.csv");
    write_csv(std::fs::File::create(&path)?, &rows)?;
    println!("{} rows written to {}", rows.len(), path.display());
    print!("{}", format_summary(&summarize(&rows)));
    Ok(())
}
