//! Overlapping groups: the facility cells, the feasible multisets the solver
//! enumerates, and the resulting solution compared with the exact optimum.
//!
//! cargo run --example intersecting_groups

use fair_ksupplier::data::{generate, AlphaRule, GroupMode, SyntheticSpec};
use fair_ksupplier::intersecting::solve_intersecting_with_stats;
use fair_ksupplier::{partition_facilities, solve_exact, ExactOptions, SolveOptions};

fn main() -> fair_ksupplier::Result<()> {
    let spec = SyntheticSpec {
        group_mode: GroupMode::Overlapping { overlap_factor: 1.6 },
        alpha: AlphaRule::Explicit(vec![1, 2, 1]),
        ..SyntheticSpec::new(40, 2, 3, 3, 11)
    };
    let instance = generate(&spec)?;

    let cells = partition_facilities(&instance);
    println!("{} cells:", cells.len());
    for cell in &cells.cells {
        let bits: String = cell.vector.0.iter().map(|&b| if b { '1' } else { '0' }).collect();
        println!("  {bits}: {} facilities", cell.members.len());
    }

    let run = solve_intersecting_with_stats(&instance, &SolveOptions::default())?;
    println!(
        "examined {} multisets ({} feasible, bound {}), best multiset {:?}",
        run.examined, run.feasible, run.bound, run.multiset
    );
    let opt = solve_exact(&instance, &ExactOptions::default())?.solution.cost;
    println!(
        "cost {:.4}, optimum {:.4}, ratio {:.3}",
        run.solution.cost,
        opt,
        run.solution.cost / opt
    );
    Ok(())
}
