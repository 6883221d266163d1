//! Brute-force optimum for small instances.
//!
//! Used as ground truth by the tests and the benchmark harness. Subsets are
//! visited in lexicographic order with per-group counts maintained
//! incrementally; branches that can no longer meet a lower bound or that
//! already break an upper bound are cut.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Instance, Solution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactOptions {
    /// Refuse when the number of candidate subsets exceeds this.
    pub limit: u64,
    /// Enumerate every size `1..=k` even when the largest size suffices.
    pub all_sizes: bool,
}

impl Default for ExactOptions {
    fn default() -> Self {
        Self {
            limit: 10_000_000,
            all_sizes: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactSolution {
    pub solution: Solution,
    /// Nearest chosen center of each client, aligned with `instance.clients()`
    /// (lowest index on ties).
    pub assignment: Vec<usize>,
    pub subsets_examined: u64,
}

fn binomial(n: u64, r: u64) -> u64 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 0..r {
        acc = acc * u128::from(n - i) / u128::from(i + 1);
        if acc > u128::from(u64::MAX) {
            return u64::MAX;
        }
    }
    acc as u64
}

/// Sizes the oracle enumerates: `min(k, n_f)` only, unless upper bounds are
/// present or `all_sizes` is set (cost never increases when a set grows, so
/// without upper bounds the largest size contains an optimum).
fn sizes(instance: &Instance, options: &ExactOptions) -> Vec<usize> {
    let top = instance.k().min(instance.facilities().len());
    if options.all_sizes || instance.beta().is_some() {
        (1..=top).collect()
    } else {
        vec![top]
    }
}

/// Minimum-cost feasible center set, ties broken by lexicographically
/// smallest sorted index list.
pub fn solve_exact(instance: &Instance, options: &ExactOptions) -> Result<ExactSolution> {
    let timer = Instant::now();
    let sizes = sizes(instance, options);
    let n_f = instance.facilities().len() as u64;
    let total = sizes
        .iter()
        .fold(0u64, |acc, &s| acc.saturating_add(binomial(n_f, s as u64)));
    if total > options.limit {
        return Err(Error::WorkLimit(format!(
            "{total} candidate subsets exceed the oracle limit of {}",
            options.limit
        )));
    }

    let mut search = Search::new(instance);
    for &size in &sizes {
        search.run(size);
    }
    let Some((_, centers)) = search.best else {
        return Err(Error::Infeasible("no subset satisfies the requirements".into()));
    };
    let assignment = instance
        .clients()
        .iter()
        .map(|&c| {
            let mut best = (centers[0], f64::INFINITY);
            for &s in &centers {
                let d = instance.dist(c, s);
                if d < best.1 {
                    best = (s, d);
                }
            }
            best.0
        })
        .collect();
    let mut solution = Solution::from_valid(instance, centers, 0.0);
    solution.wall_time = timer.elapsed().as_secs_f64();
    Ok(ExactSolution {
        solution,
        assignment,
        subsets_examined: search.examined,
    })
}

struct Search<'a> {
    instance: &'a Instance,
    /// Groups of each facility position.
    membership: Vec<Vec<usize>>,
    /// `remaining[g][pos]`: members of group `g` at facility positions >= pos.
    remaining: Vec<Vec<usize>>,
    counts: Vec<usize>,
    chosen: Vec<usize>,
    /// One row of client-to-chosen distances per depth.
    near: Vec<Vec<f64>>,
    best: Option<(f64, Vec<usize>)>,
    examined: u64,
}

impl<'a> Search<'a> {
    fn new(instance: &'a Instance) -> Self {
        let facilities = instance.facilities();
        let t = instance.num_groups();
        let mut membership = vec![Vec::new(); facilities.len()];
        for (g, group) in instance.groups().iter().enumerate() {
            for f in group {
                membership[facilities.binary_search(f).unwrap()].push(g);
            }
        }
        let mut remaining = vec![vec![0; facilities.len() + 1]; t];
        for pos in (0..facilities.len()).rev() {
            for g in 0..t {
                remaining[g][pos] = remaining[g][pos + 1];
            }
            for &g in &membership[pos] {
                remaining[g][pos] += 1;
            }
        }
        let far = vec![f64::INFINITY; instance.clients().len()];
        Self {
            instance,
            membership,
            remaining,
            counts: vec![0; t],
            chosen: Vec::new(),
            near: vec![far],
            best: None,
            examined: 0,
        }
    }

    fn run(&mut self, size: usize) {
        self.descend(0, size);
    }

    fn descend(&mut self, from: usize, left: usize) {
        if left == 0 {
            self.examined += 1;
            let alpha = self.instance.alpha();
            if self.counts.iter().zip(alpha).any(|(c, a)| c < a) {
                return;
            }
            let cost = self.near.last().unwrap().iter().copied().fold(0.0, f64::max);
            let better = match &self.best {
                None => true,
                Some((bc, bs)) => cost < *bc || (cost == *bc && self.chosen < *bs),
            };
            if better {
                self.best = Some((cost, self.chosen.clone()));
            }
            return;
        }
        let facilities = self.instance.facilities();
        let alpha = self.instance.alpha();
        let beta = self.instance.beta();
        for pos in from..=facilities.len() - left {
            // with `left` picks from positions >= pos, every deficit must still be coverable
            let reachable = (0..alpha.len()).all(|g| {
                let deficit = alpha[g].saturating_sub(self.counts[g]);
                deficit <= left && deficit <= self.remaining[g][pos]
            });
            if !reachable {
                // later positions only see fewer remaining members
                break;
            }
            let f = facilities[pos];
            for &g in &self.membership[pos] {
                self.counts[g] += 1;
            }
            let over = beta.is_some_and(|b| self.membership[pos].iter().any(|&g| self.counts[g] > b[g]));
            if !over {
                let row: Vec<f64> = self
                    .near
                    .last()
                    .unwrap()
                    .iter()
                    .zip(self.instance.clients())
                    .map(|(&d, &c)| d.min(self.instance.dist(c, f)))
                    .collect();
                self.near.push(row);
                self.chosen.push(f);
                self.descend(pos + 1, left - 1);
                self.chosen.pop();
                self.near.pop();
            }
            for &g in &self.membership[pos] {
                self.counts[g] -= 1;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::{line, three_facility_line};
    use crate::model::{check_feasible, eval_cost, Metric};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn three_facility_line_optimum() {
        let inst = three_facility_line();
        let ex = solve_exact(&inst, &ExactOptions::default()).unwrap();
        assert_eq!(ex.solution.centers, vec![2, 3]);
        assert_eq!(ex.solution.cost, 1.0);
        assert_eq!(ex.assignment, vec![2, 3]);
    }

    #[test]
    fn unconstrained_full_budget_takes_everything() {
        let inst = Instance::new(
            line(&[0.0, 7.0, 1.0, 5.0, 12.0]),
            vec![0, 1],
            vec![2, 3, 4],
            vec![vec![2, 3, 4]],
            vec![0],
            None,
            3,
        )
        .unwrap();
        let ex = solve_exact(&inst, &ExactOptions::default()).unwrap();
        assert_eq!(ex.solution.centers, vec![2, 3, 4]);
        assert_eq!(ex.solution.cost, eval_cost(&inst, &[2, 3, 4]).unwrap());
    }

    #[test]
    fn refuses_oversized_enumeration() {
        let inst = three_facility_line();
        let opts = ExactOptions { limit: 2, all_sizes: false };
        assert!(matches!(solve_exact(&inst, &opts), Err(Error::WorkLimit(_))));
    }

    #[test]
    fn infeasible_when_nothing_fits() {
        let inst = Instance::new(
            line(&[0.0, 1.0, 2.0]),
            vec![0],
            vec![1, 2],
            vec![vec![1], vec![2]],
            vec![1, 1],
            None,
            1,
        )
        .unwrap();
        assert!(matches!(
            solve_exact(&inst, &ExactOptions::default()),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn upper_bounds_can_force_smaller_sets() {
        let inst = Instance::new(
            line(&[0.0, 1.0, 2.0]),
            vec![0],
            vec![1, 2],
            vec![vec![1, 2]],
            vec![0],
            Some(vec![1]),
            2,
        )
        .unwrap();
        let ex = solve_exact(&inst, &ExactOptions::default()).unwrap();
        assert_eq!(ex.solution.centers, vec![1]);
    }

    fn random_instance(seed: u64) -> Instance {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts: Vec<f64> = (0..14).map(|_| rng.gen_range(0.0..50.0)).collect();
        let facilities: Vec<usize> = (6..14).collect();
        let mut groups = vec![Vec::new(), Vec::new()];
        for &f in &facilities {
            groups[rng.gen_range(0..2)].push(f);
        }
        if groups[0].is_empty() {
            let f = groups[1].pop().unwrap();
            groups[0].push(f);
        }
        if groups[1].is_empty() {
            let f = groups[0].pop().unwrap();
            groups[1].push(f);
        }
        Instance::new(line(&pts), (0..6).collect(), facilities, groups, vec![1, 1], None, 3).unwrap()
    }

    #[test]
    fn never_worse_than_random_feasible_subsets() {
        for seed in 0..10 {
            let inst = random_instance(seed);
            let ex = solve_exact(&inst, &ExactOptions::default()).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed + 100);
            let fac = inst.facilities();
            for _ in 0..200 {
                let size = rng.gen_range(1..=3);
                let mut s: Vec<usize> = (0..size).map(|_| fac[rng.gen_range(0..fac.len())]).collect();
                s.sort_unstable();
                s.dedup();
                if check_feasible(&inst, &s).unwrap().feasible {
                    assert!(ex.solution.cost <= eval_cost(&inst, &s).unwrap());
                }
            }
        }
    }

    #[test]
    fn largest_size_suffices_without_upper_bounds() {
        for seed in 0..10 {
            let inst = random_instance(seed);
            let quick = solve_exact(&inst, &ExactOptions::default()).unwrap();
            let full = solve_exact(
                &inst,
                &ExactOptions {
                    all_sizes: true,
                    ..Default::default()
                },
            )
            .unwrap();
            assert_eq!(quick.solution.cost, full.solution.cost);
        }
    }

    #[test]
    fn optimum_is_invariant_under_relabeling() {
        for seed in 0..5 {
            let inst = random_instance(seed);
            let base = solve_exact(&inst, &ExactOptions::default()).unwrap().solution.cost;
            // reverse the point order
            let Metric::Euclidean(ps) = inst.metric() else { unreachable!() };
            let n = ps.len();
            let pts: Vec<Vec<f64>> = (0..n).rev().map(|i| ps.point(i).to_vec()).collect();
            let map = |i: &usize| n - 1 - i;
            let relabeled = Instance::new(
                Metric::Euclidean(crate::model::PointSet::new(&pts).unwrap()),
                inst.clients().iter().map(map).collect(),
                inst.facilities().iter().map(map).collect(),
                inst.groups().iter().map(|g| g.iter().map(map).collect()).collect(),
                inst.alpha().to_vec(),
                None,
                inst.k(),
            )
            .unwrap();
            let cost = solve_exact(&relabeled, &ExactOptions::default()).unwrap().solution.cost;
            assert_eq!(base, cost);
        }
    }
}
