//! Uniform entry point over all solvers, shared by the CLI and the bench
//! harness.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::disjoint::{solve_disjoint, SolveOptions};
use crate::error::{usage, Error, Result};
use crate::exact::{solve_exact, ExactOptions};
use crate::intersecting::solve_intersecting_with_stats;
use crate::model::{check_feasible, FeasibilityReport, Instance, Solution};
use crate::traversal::unfair_ksupplier;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Algorithm {
    #[serde(rename = "unfair-3apx", alias = "unfair")]
    Unfair,
    #[serde(rename = "fair-disjoint-3apx", alias = "fair-disjoint")]
    FairDisjoint,
    #[serde(rename = "fair-intersecting-3apx", alias = "fair-intersecting")]
    FairIntersecting,
    #[serde(rename = "exact")]
    Exact,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::Unfair,
        Algorithm::FairDisjoint,
        Algorithm::FairIntersecting,
        Algorithm::Exact,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Algorithm::Unfair => "unfair-3apx",
            Algorithm::FairDisjoint => "fair-disjoint-3apx",
            Algorithm::FairIntersecting => "fair-intersecting-3apx",
            Algorithm::Exact => "exact",
        }
    }

    pub fn is_fair(self) -> bool {
        !matches!(self, Algorithm::Unfair)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unfair" | "unfair-3apx" => Ok(Algorithm::Unfair),
            "fair-disjoint" | "fair-disjoint-3apx" | "disjoint" => Ok(Algorithm::FairDisjoint),
            "fair-intersecting" | "fair-intersecting-3apx" | "intersecting" => {
                Ok(Algorithm::FairIntersecting)
            }
            "exact" => Ok(Algorithm::Exact),
            other => Err(usage(format!("unknown algorithm `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub solution: Solution,
    /// Feasible multisets solved (intersecting solver only).
    pub multisets: Option<u64>,
}

pub fn run_algorithm(
    instance: &Instance,
    algorithm: Algorithm,
    options: &SolveOptions,
    exact: &ExactOptions,
) -> Result<RunOutcome> {
    if instance.beta().is_some() && matches!(algorithm, Algorithm::Unfair | Algorithm::FairDisjoint) {
        return Err(usage(format!(
            "upper bounds are not supported by {}; use fair-intersecting or exact",
            algorithm.id()
        )));
    }
    let (solution, multisets) = match algorithm {
        Algorithm::Unfair => (unfair_ksupplier(instance, instance.k(), options.start)?, None),
        Algorithm::FairDisjoint => (solve_disjoint(instance, options)?, None),
        Algorithm::FairIntersecting => {
            let run = solve_intersecting_with_stats(instance, options)?;
            (run.solution, Some(run.feasible))
        }
        Algorithm::Exact => (solve_exact(instance, exact)?.solution, None),
    };
    Ok(RunOutcome { solution, multisets })
}

/// JSON document printed by `solve`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub algo: String,
    pub seed: u64,
    pub centers: Vec<usize>,
    pub cost: f64,
    pub feasible: bool,
    pub constraints: FeasibilityReport,
    /// True when the algorithm ignores the group requirements.
    pub constraints_ignored: bool,
    pub wall_time: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub multisets: Option<u64>,
}

impl SolveReport {
    pub fn new(instance: &Instance, algorithm: Algorithm, seed: u64, outcome: &RunOutcome) -> Result<Self> {
        let constraints = check_feasible(instance, &outcome.solution.centers)?;
        Ok(Self {
            algo: algorithm.id().to_string(),
            seed,
            centers: outcome.solution.centers.clone(),
            cost: outcome.solution.cost,
            feasible: constraints.feasible,
            constraints,
            constraints_ignored: !algorithm.is_fair(),
            wall_time: outcome.solution.wall_time,
            multisets: outcome.multisets,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::three_facility_line;

    #[test]
    fn ids_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.id().parse::<Algorithm>().unwrap(), a);
        }
        assert!("kmeans".parse::<Algorithm>().is_err());
    }

    #[test]
    fn upper_bounds_need_a_capable_solver() {
        let inst = three_facility_line()
            .with_requirements(2, vec![1, 1], Some(vec![1, 1]))
            .unwrap();
        let opts = SolveOptions::default();
        let ex = ExactOptions::default();
        assert!(run_algorithm(&inst, Algorithm::FairDisjoint, &opts, &ex).is_err());
        assert!(run_algorithm(&inst, Algorithm::Unfair, &opts, &ex).is_err());
        assert!(run_algorithm(&inst, Algorithm::Exact, &opts, &ex).is_ok());
        assert!(run_algorithm(&inst, Algorithm::FairIntersecting, &opts, &ex).is_ok());
    }

    #[test]
    fn report_marks_ignored_constraints() {
        let inst = three_facility_line();
        let out = run_algorithm(&inst, Algorithm::Unfair, &SolveOptions::default(), &ExactOptions::default())
            .unwrap();
        let report = SolveReport::new(&inst, Algorithm::Unfair, 0, &out).unwrap();
        assert!(report.constraints_ignored);
        assert_eq!(report.cost, out.solution.cost);
    }
}
