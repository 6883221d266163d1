//! Runtime of the disjoint solver and the baseline as n grows (t = 5,
//! k = 10, d = 5, alpha = 2 per group).
//!
//! cargo run --release --example scalability [-- max_n]

use std::time::Instant;

use fair_ksupplier::data::{generate, SyntheticSpec};
use fair_ksupplier::{solve_disjoint, unfair_ksupplier, SearchMode, SolveOptions, StartRule};

fn main() -> fair_ksupplier::Result<()> {
    let max_n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1_000_000);
    println!("{:>10} {:>12} {:>12} {:>12}", "n", "unfair (s)", "fair (s)", "binary (s)");
    let sizes = (4..=7).flat_map(|e| [1, 2, 5].map(|m| m * 10usize.pow(e)));
    for n in sizes.filter(|&n| n <= max_n) {
        let instance = generate(&SyntheticSpec::new(n, 5, 5, 10, 1))?;
        let t = Instant::now();
        unfair_ksupplier(&instance, 10, StartRule::default())?;
        let unfair = t.elapsed().as_secs_f64();
        let t = Instant::now();
        solve_disjoint(&instance, &SolveOptions::default())?;
        let fair = t.elapsed().as_secs_f64();
        let t = Instant::now();
        solve_disjoint(
            &instance,
            &SolveOptions {
                search: SearchMode::Binary,
                ..SolveOptions::default()
            },
        )?;
        let binary = t.elapsed().as_secs_f64();
        println!("{n:>10} {unfair:>12.4} {fair:>12.4} {binary:>12.4}");
    }
    Ok(())
}
