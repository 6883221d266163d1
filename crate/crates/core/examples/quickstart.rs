//! Smallest end-to-end use: build an instance by hand, solve it with the
//! fair solver and the unconstrained baseline, and inspect feasibility.
//!
//! cargo run --example quickstart

use fair_ksupplier::{
    check_feasible, solve_disjoint, unfair_ksupplier, Instance, Metric, PointSet, SolveOptions,
    StartRule,
};

fn main() -> fair_ksupplier::Result<()> {
    // Clients at x = 0 and x = 10; facilities at 1 (group "red") and at 9, 11
    // (group "blue"). One center from each group, two in total.
    let points = PointSet::new(&[vec![0.0], vec![10.0], vec![1.0], vec![9.0], vec![11.0]])?;
    let instance = Instance::new(
        Metric::Euclidean(points),
        vec![0, 1],
        vec![2, 3, 4],
        vec![vec![2], vec![3, 4]],
        vec![1, 1],
        None,
        2,
    )?;

    let fair = solve_disjoint(&instance, &SolveOptions::default())?;
    println!("fair:   centers {:?}, cost {}", fair.centers, fair.cost);
    println!("        per-group counts {:?}", fair.per_group_counts);

    let unfair = unfair_ksupplier(&instance, instance.k(), StartRule::default())?;
    let report = check_feasible(&instance, &unfair.centers)?;
    println!(
        "unfair: centers {:?}, cost {}, meets requirements: {}",
        unfair.centers, unfair.cost, report.feasible
    );
    Ok(())
}
