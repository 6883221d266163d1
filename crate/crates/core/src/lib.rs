//! Approximation algorithms for the fair k-supplier problem.
//!
//! Given clients, facilities partitioned into (possibly overlapping) groups,
//! a budget `k` and per-group lower bounds (optionally upper bounds), pick at
//! most `k` facilities meeting every bound while minimizing the largest
//! client-to-nearest-center distance.
//!
//! - [`disjoint::solve_disjoint`]: polynomial-time 3-approximation when the
//!   groups are pairwise disjoint.
//! - [`intersecting::solve_intersecting`]: 3-approximation for overlapping
//!   groups and for lower+upper bounds, exponential only in `t * k`.
//! - [`traversal::unfair_ksupplier`]: the unconstrained 3-approximation
//!   baseline.
//! - [`exact::solve_exact`]: brute-force optimum for small instances.
//!
//! Synthetic and tabular instance sources live in [`data`]; the experiment
//! harness behind the `fair-ksupplier` binary lives in [`bench`] and
//! [`algo`].

pub mod algo;
pub mod bench;
pub mod data;
pub mod disjoint;
pub mod error;
pub mod exact;
pub mod intersecting;
pub mod matching;
pub mod model;
pub mod traversal;

pub use algo::{run_algorithm, Algorithm, RunOutcome};
pub use disjoint::{build_candidate, solve_disjoint, CandidateContext, SearchMode, SolveOptions};
pub use error::{Error, Result};
pub use exact::{solve_exact, ExactOptions, ExactSolution};
pub use intersecting::{
    enumerate_feasible_multisets, partition_facilities, solve_intersecting, CellPartition,
    CharacteristicVector,
};
pub use matching::{build_threshold_graph, max_matching, BipartiteGraph, Matching};
pub use model::{
    check_feasible, eval_cost, normalize_disjoint, read_instance, write_instance,
    FeasibilityReport, Instance, InstanceFile, Metric, PointSet, Solution,
};
pub use traversal::{farthest_first, unfair_ksupplier, StartRule, TraversalResult};
