//! The brute-force oracle: optimum, assignment and the work limit guard.
//!
//! cargo run --example exact_oracle

use fair_ksupplier::data::{generate, SyntheticSpec};
use fair_ksupplier::{solve_disjoint, solve_exact, Error, ExactOptions, SolveOptions};

fn main() -> fair_ksupplier::Result<()> {
    let instance = generate(&SyntheticSpec::new(30, 2, 2, 4, 8))?;
    let ex = solve_exact(&instance, &ExactOptions::default())?;
    println!(
        "optimum {:?} cost {:.4} after {} subsets",
        ex.solution.centers, ex.solution.cost, ex.subsets_examined
    );
    println!("client -> center: {:?}", instance.clients().iter().zip(&ex.assignment).collect::<Vec<_>>());

    let approx = solve_disjoint(&instance, &SolveOptions::default())?;
    println!("3-approximation cost {:.4} (ratio {:.3})", approx.cost, approx.cost / ex.solution.cost);

    let big = generate(&SyntheticSpec::new(400, 2, 2, 8, 8))?;
    match solve_exact(&big, &ExactOptions::default()) {
        Err(Error::WorkLimit(msg)) => println!("larger instance refused: {msg}"),
        other => println!("unexpected: {other:?}"),
    }
    Ok(())
}
