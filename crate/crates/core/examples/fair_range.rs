//! Lower and upper bounds per group ("fair range"): only the intersecting
//! solver and the exact oracle accept upper bounds.
//!
//! cargo run --example fair_range

use fair_ksupplier::data::{generate, SyntheticSpec};
use fair_ksupplier::{
    check_feasible, run_algorithm, solve_exact, Algorithm, ExactOptions, SolveOptions,
};

fn main() -> fair_ksupplier::Result<()> {
    let base = generate(&SyntheticSpec::new(60, 2, 3, 4, 3))?;
    // at least one and at most two centers from each group
    let instance = base.with_requirements(4, vec![1, 1, 1], Some(vec![2, 2, 2]))?;

    let opts = SolveOptions::default();
    let exact = ExactOptions::default();
    let out = run_algorithm(&instance, Algorithm::FairIntersecting, &opts, &exact)?;
    let report = check_feasible(&instance, &out.solution.centers)?;
    println!("range solution {:?} cost {:.4}", out.solution.centers, out.solution.cost);
    for g in &report.groups {
        println!("  group {}: {} chosen, bounds [{}, {:?}]", g.group, g.count, g.alpha, g.beta);
    }
    let opt = solve_exact(&instance, &exact)?.solution.cost;
    println!("optimum {opt:.4}, ratio {:.3}", out.solution.cost / opt);

    match run_algorithm(&instance, Algorithm::FairDisjoint, &opts, &exact) {
        Err(e) => println!("fair-disjoint refuses upper bounds: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
