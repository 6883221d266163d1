//! Fair versus unconstrained cost on synthetic instances, with the exact
//! optimum as a reference on small ones.
//!
//! cargo run --release --example price_of_fairness

use fair_ksupplier::data::{generate, AlphaRule, SyntheticSpec};
use fair_ksupplier::{
    solve_disjoint, solve_exact, unfair_ksupplier, ExactOptions, SolveOptions, StartRule,
};

fn main() -> fair_ksupplier::Result<()> {
    println!("{:>6} {:>10} {:>10} {:>10} {:>8}", "seed", "unfair", "fair", "optimum", "fair/unf");
    for seed in 0..8 {
        // skewed requirements force centers into one group
        let spec = SyntheticSpec {
            alpha: AlphaRule::Explicit(vec![3, 0]),
            ..SyntheticSpec::new(36, 2, 2, 4, seed)
        };
        let instance = generate(&spec)?;
        let unfair = unfair_ksupplier(&instance, instance.k(), StartRule::Seeded(seed))?;
        let fair = solve_disjoint(
            &instance,
            &SolveOptions {
                start: StartRule::Seeded(seed),
                ..SolveOptions::default()
            },
        )?;
        let opt = solve_exact(&instance, &ExactOptions::default())?.solution.cost;
        println!(
            "{seed:>6} {:>10.4} {:>10.4} {opt:>10.4} {:>8.3}",
            unfair.cost,
            fair.cost,
            fair.cost / unfair.cost
        );
    }
    Ok(())
}
