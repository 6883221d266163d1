//! 3-approximation for fair k-supplier with pairwise disjoint groups.
//!
//! Pipeline: normalize requirements so they sum to the budget, traverse `k`
//! clients farthest-first, then for each examined prefix length find the
//! smallest radius whose client/group-slot threshold graph has a matching
//! covering the prefix. Each such (prefix, radius) pair yields a candidate:
//! one facility per matched edge, padded per group up to its requirement.
//! The cheapest candidate wins.

use std::collections::HashMap;
use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{usage, Error, Result};
use crate::matching::{build_threshold_graph, max_matching};
use crate::model::{normalize_disjoint, Instance, Solution};
use crate::traversal::{farthest_first, StartRule, TraversalResult};

/// How prefix lengths are examined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchMode {
    /// Every prefix length `1..=k`.
    #[default]
    Exhaustive,
    /// Binary search for the crossing of `2 * lambda_min(l)` and the
    /// traversal radius, then the crossing index and its successor.
    Binary,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub search: SearchMode,
    pub start: StartRule,
    /// Intersecting solver refuses instances with `t * k` above this.
    pub work_limit: usize,
    /// Skip subinstances whose cost lower bound cannot beat the incumbent.
    pub prune: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            search: SearchMode::Exhaustive,
            start: StartRule::default(),
            work_limit: 40,
            prune: false,
        }
    }
}

/// Prefix-to-group distances and candidate radii for one group system.
#[derive(Debug, Clone)]
pub struct CandidateContext {
    pub traversal: TraversalResult,
    groups: Vec<Arc<[usize]>>,
    alpha: Vec<usize>,
    /// `dmin[i][j]`: distance from prefix client `i` to the nearest member of
    /// group `j` (infinite for an empty group).
    pub dmin: Vec<Vec<f64>>,
    nearest: Vec<Vec<usize>>,
    /// `radii[l - 1]`: sorted distinct finite entries of the first `l` rows.
    pub radii: Vec<Vec<f64>>,
}

impl CandidateContext {
    /// Context over the groups and requirements of `instance` (normally the
    /// normalized instance).
    pub fn new(instance: &Instance, traversal: TraversalResult) -> Self {
        let groups = instance.groups().iter().map(|g| Arc::from(g.as_slice())).collect();
        Self::from_groups(instance, traversal, groups, instance.alpha().to_vec())
    }

    pub(crate) fn from_groups(
        instance: &Instance,
        traversal: TraversalResult,
        groups: Vec<Arc<[usize]>>,
        alpha: Vec<usize>,
    ) -> Self {
        let mut dmin = Vec::with_capacity(traversal.len());
        let mut nearest = Vec::with_capacity(traversal.len());
        for &c in &traversal.order {
            let mut drow = Vec::with_capacity(groups.len());
            let mut nrow = Vec::with_capacity(groups.len());
            for g in &groups {
                let mut best = (usize::MAX, f64::INFINITY);
                for &f in g.iter() {
                    let d = instance.dist(c, f);
                    if d < best.1 {
                        best = (f, d);
                    }
                }
                nrow.push(best.0);
                drow.push(best.1);
            }
            dmin.push(drow);
            nearest.push(nrow);
        }
        let mut ctx = Self {
            traversal,
            groups,
            alpha,
            dmin,
            nearest,
            radii: Vec::new(),
        };
        ctx.radii = ctx.collect_radii();
        ctx
    }

    /// Restriction to a subset of groups with new requirements.
    pub(crate) fn select(&self, columns: &[usize], alpha: Vec<usize>) -> Self {
        let pick = |rows: &Vec<Vec<f64>>| -> Vec<Vec<f64>> {
            rows.iter().map(|r| columns.iter().map(|&j| r[j]).collect()).collect()
        };
        let mut ctx = Self {
            traversal: self.traversal.clone(),
            groups: columns.iter().map(|&j| self.groups[j].clone()).collect(),
            alpha,
            dmin: pick(&self.dmin),
            nearest: self
                .nearest
                .iter()
                .map(|r| columns.iter().map(|&j| r[j]).collect())
                .collect(),
            radii: Vec::new(),
        };
        ctx.radii = ctx.collect_radii();
        ctx
    }

    fn collect_radii(&self) -> Vec<Vec<f64>> {
        let mut out = Vec::with_capacity(self.dmin.len());
        let mut acc: Vec<f64> = Vec::new();
        for row in &self.dmin {
            acc.extend(row.iter().copied().filter(|d| d.is_finite()));
            acc.sort_by(f64::total_cmp);
            acc.dedup();
            out.push(acc.clone());
        }
        out
    }

    pub fn prefix_len(&self) -> usize {
        self.dmin.len()
    }

    pub fn alpha(&self) -> &[usize] {
        &self.alpha
    }

    fn saturates(&self, ell: usize, lambda: f64) -> bool {
        build_threshold_graph(&self.dmin[..ell], &self.alpha, lambda)
            .map(|g| max_matching(&g).saturates_left)
            .unwrap_or(false)
    }

    /// Smallest radius in `radii[ell - 1]` at which the first `ell` prefix
    /// clients can all be matched, or `None` if no radius works.
    pub fn min_feasible_radius(&self, ell: usize) -> Option<f64> {
        if ell == 0 {
            return Some(0.0);
        }
        let radii = &self.radii[ell - 1];
        let &largest = radii.last()?;
        if !self.saturates(ell, largest) {
            return None;
        }
        // feasibility is monotone in the radius
        let (mut lo, mut hi) = (0, radii.len() - 1);
        while lo < hi {
            let mid = (lo + hi) / 2;
            if self.saturates(ell, radii[mid]) {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        Some(radii[lo])
    }

    /// Facilities picked for the matched prefix, padded group by group with
    /// the lowest-index unused members. `None` if the prefix cannot be
    /// matched at `lambda`.
    pub(crate) fn candidate_centers(&self, ell: usize, lambda: f64) -> Option<Vec<usize>> {
        let graph = build_threshold_graph(&self.dmin[..ell], &self.alpha, lambda).ok()?;
        let matching = max_matching(&graph);
        if !matching.saturates_left {
            return None;
        }
        let mut centers: Vec<usize> = matching
            .pairs
            .iter()
            .map(|&(i, slot)| self.nearest[i][graph.slot_group(slot)])
            .collect();
        centers.sort_unstable();
        centers.dedup();

        for (group, &need) in self.groups.iter().zip(&self.alpha) {
            let have = centers.iter().filter(|c| group.binary_search(c).is_ok()).count();
            if have >= need {
                continue;
            }
            let extra: Vec<usize> = group
                .iter()
                .copied()
                .filter(|f| centers.binary_search(f).is_err())
                .take(need - have)
                .collect();
            assert_eq!(extra.len(), need - have, "group smaller than its requirement");
            centers.extend(extra);
            centers.sort_unstable();
        }
        Some(centers)
    }
}

/// Materializes the candidate for prefix length `ell` at radius `lambda`.
/// `Ok(None)` means the prefix has no covering matching at that radius.
pub fn build_candidate(
    instance: &Instance,
    context: &CandidateContext,
    ell: usize,
    lambda: f64,
) -> Result<Option<Solution>> {
    if ell > context.prefix_len() || (ell == 0 && context.prefix_len() > 0) {
        return Err(usage(format!(
            "prefix length {ell} outside 1..={}",
            context.prefix_len()
        )));
    }
    if lambda.is_nan() || lambda < 0.0 {
        return Err(usage("radius must be non-negative"));
    }
    Ok(context
        .candidate_centers(ell, lambda)
        .map(|centers| Solution::from_valid(instance, centers, 0.0)))
}

/// Memoized objective values keyed by sorted center set.
#[derive(Debug, Default)]
pub(crate) struct CostCache {
    seen: HashMap<Vec<usize>, f64>,
}

impl CostCache {
    pub(crate) fn cost(&mut self, instance: &Instance, centers: &[usize]) -> f64 {
        if let Some(&c) = self.seen.get(centers) {
            return c;
        }
        let c = instance.cost_unchecked(centers);
        self.seen.insert(centers.to_vec(), c);
        c
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Best {
    pub centers: Vec<usize>,
    pub cost: f64,
    pub ell: usize,
    pub lambda: f64,
}

/// Where the winning candidate came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisjointTrace {
    pub ell: usize,
    pub lambda: f64,
    pub traversal: TraversalResult,
}

pub(crate) fn search_context(
    instance: &Instance,
    ctx: &CandidateContext,
    mode: SearchMode,
    cache: &mut CostCache,
) -> Option<Best> {
    let m = ctx.prefix_len();
    let mut best: Option<Best> = None;
    let mut consider = |ell: usize, lambda: f64, best: &mut Option<Best>| {
        if let Some(centers) = ctx.candidate_centers(ell, lambda) {
            let cost = cache.cost(instance, &centers);
            if ell > 0 {
                debug_assert!(
                    cost <= ctx.traversal.step_radius[ell - 1] + lambda + 1e-9 * (1.0 + cost),
                    "candidate exceeds its triangle-inequality bound"
                );
            }
            if best.as_ref().is_none_or(|b| cost < b.cost) {
                *best = Some(Best { centers, cost, ell, lambda });
            }
        }
    };

    if m == 0 {
        consider(0, 0.0, &mut best);
        return best;
    }

    match mode {
        SearchMode::Exhaustive => {
            for ell in 1..=m {
                if let Some(lambda) = ctx.min_feasible_radius(ell) {
                    consider(ell, lambda, &mut best);
                }
            }
        }
        SearchMode::Binary => {
            let mut memo: Vec<Option<Option<f64>>> = vec![None; m + 1];
            let mut lambda_at = |ell: usize| *memo[ell].get_or_insert_with(|| ctx.min_feasible_radius(ell));
            let radius = &ctx.traversal.step_radius;
            // largest ell with 2 * lambda_min(ell) <= radius(ell); 0 if none
            let (mut lo, mut hi) = (0usize, m);
            while lo < hi {
                let mid = (lo + hi).div_ceil(2);
                let holds = lambda_at(mid).is_some_and(|l| 2.0 * l <= radius[mid - 1]);
                if holds {
                    lo = mid;
                } else {
                    hi = mid - 1;
                }
            }
            let picks = if lo == 0 { vec![1] } else { vec![lo, lo + 1] };
            for ell in picks.into_iter().filter(|&l| l <= m) {
                if let Some(lambda) = lambda_at(ell) {
                    consider(ell, lambda, &mut best);
                }
            }
        }
    }
    best
}

fn check_disjoint_preconditions(instance: &Instance) -> Result<()> {
    if instance.beta().is_some() {
        return Err(usage(
            "upper bounds are only supported by the intersecting and exact solvers",
        ));
    }
    if !instance.is_disjoint() {
        return Err(usage("groups intersect; use the intersecting solver"));
    }
    let total: usize = instance.alpha().iter().sum();
    if total > instance.k() {
        return Err(Error::Infeasible(format!(
            "requirements sum to {total}, more than k = {}",
            instance.k()
        )));
    }
    Ok(())
}

/// Traversal of up to `k` clients, empty when there are no clients.
pub(crate) fn traverse(instance: &Instance, start: StartRule) -> Result<TraversalResult> {
    if instance.clients().is_empty() {
        return Ok(TraversalResult {
            order: Vec::new(),
            step_radius: Vec::new(),
        });
    }
    farthest_first(instance, instance.k(), start)
}

/// Fair k-supplier with disjoint groups; cost is at most three times optimal.
pub fn solve_disjoint(instance: &Instance, options: &SolveOptions) -> Result<Solution> {
    solve_disjoint_traced(instance, options).map(|(s, _)| s)
}

/// [`solve_disjoint`] plus the prefix length and radius of the winner.
pub fn solve_disjoint_traced(
    instance: &Instance,
    options: &SolveOptions,
) -> Result<(Solution, DisjointTrace)> {
    let timer = Instant::now();
    check_disjoint_preconditions(instance)?;
    let normalized = normalize_disjoint(instance)?;
    let traversal = traverse(instance, options.start)?;
    let ctx = CandidateContext::new(&normalized, traversal);
    let mut cache = CostCache::default();
    let best = search_context(instance, &ctx, options.search, &mut cache)
        .ok_or_else(|| Error::Infeasible("no prefix admits a covering matching".into()))?;
    let mut solution = Solution::from_valid(instance, best.centers, 0.0);
    solution.wall_time = timer.elapsed().as_secs_f64();
    let trace = DisjointTrace {
        ell: best.ell,
        lambda: best.lambda,
        traversal: ctx.traversal,
    };
    Ok((solution, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::{line, three_facility_line};
    use crate::model::check_feasible;

    #[test]
    fn line_instance_within_three_of_optimum() {
        let inst = three_facility_line();
        for mode in [SearchMode::Exhaustive, SearchMode::Binary] {
            for start in [0, 1] {
                let opts = SolveOptions {
                    search: mode,
                    start: StartRule::Point(start),
                    ..Default::default()
                };
                let sol = solve_disjoint(&inst, &opts).unwrap();
                assert!(check_feasible(&inst, &sol.centers).unwrap().feasible);
                assert!(sol.cost >= 1.0 && sol.cost <= 3.0, "{sol:?}");
            }
        }
    }

    #[test]
    fn coinciding_points_cost_zero() {
        // one client sitting on the single facility of each of three groups
        let inst = Instance::new(
            line(&[4.0, 4.0, 4.0, 4.0]),
            vec![0],
            vec![1, 2, 3],
            vec![vec![1], vec![2], vec![3]],
            vec![1, 1, 1],
            None,
            3,
        )
        .unwrap();
        let sol = solve_disjoint(&inst, &SolveOptions::default()).unwrap();
        assert_eq!(sol.cost, 0.0);
        assert_eq!(sol.centers, vec![1, 2, 3]);
    }

    #[test]
    fn oversubscribed_requirements_are_infeasible() {
        let inst = three_facility_line().with_requirements(1, vec![1, 1], None).unwrap();
        assert!(matches!(
            solve_disjoint(&inst, &SolveOptions::default()),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn upper_bounds_are_refused() {
        let inst = three_facility_line()
            .with_requirements(2, vec![1, 1], Some(vec![1, 1]))
            .unwrap();
        assert!(matches!(
            solve_disjoint(&inst, &SolveOptions::default()),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn radii_are_sorted_distinct_prefix_values() {
        let inst = three_facility_line();
        let tr = farthest_first(&inst, 2, StartRule::Point(0)).unwrap();
        let ctx = CandidateContext::new(&inst, tr);
        // client 0 at 0: groups at distance 1 and 9; client 1 at 10: 9 and 1
        assert_eq!(ctx.dmin, vec![vec![1.0, 9.0], vec![9.0, 1.0]]);
        assert_eq!(ctx.radii, vec![vec![1.0, 9.0], vec![1.0, 9.0]]);
        assert_eq!(ctx.min_feasible_radius(1), Some(1.0));
        assert_eq!(ctx.min_feasible_radius(2), Some(1.0));
    }

    #[test]
    fn candidate_at_full_radius_is_feasible() {
        let inst = three_facility_line();
        let tr = farthest_first(&inst, 2, StartRule::Point(0)).unwrap();
        let ctx = CandidateContext::new(&inst, tr);
        let sol = build_candidate(&inst, &ctx, 2, 9.0).unwrap().unwrap();
        assert!(check_feasible(&inst, &sol.centers).unwrap().feasible);
        assert!(build_candidate(&inst, &ctx, 2, 0.5).unwrap().is_none());
        assert!(build_candidate(&inst, &ctx, 3, 1.0).is_err());
    }

    #[test]
    fn padding_fills_groups_nobody_matched() {
        let inst = Instance::new(
            line(&[0.0, 0.5, 50.0, 51.0, 52.0]),
            vec![0],
            vec![1, 2, 3, 4],
            vec![vec![1], vec![2, 3, 4]],
            vec![1, 2],
            None,
            3,
        )
        .unwrap();
        let sol = solve_disjoint(&inst, &SolveOptions::default()).unwrap();
        assert_eq!(sol.centers, vec![1, 2, 3]);
        assert_eq!(sol.cost, 0.5);
    }

    #[test]
    fn slack_group_lets_extra_centers_go_anywhere() {
        // clients at 0 and 100, one group far from everyone; k leaves room
        let inst = Instance::new(
            line(&[0.0, 100.0, 0.0, 100.0, 50.0]),
            vec![0, 1],
            vec![2, 3, 4],
            vec![vec![2, 3], vec![4]],
            vec![0, 1],
            None,
            3,
        )
        .unwrap();
        let sol = solve_disjoint(&inst, &SolveOptions::default()).unwrap();
        assert_eq!(sol.cost, 0.0);
        assert_eq!(sol.centers.len(), 3);
    }

    #[test]
    fn no_clients_still_returns_feasible_centers() {
        let inst = Instance::new(line(&[1.0, 2.0]), vec![], vec![0, 1], vec![vec![0], vec![1]], vec![1, 0], None, 2)
            .unwrap();
        let sol = solve_disjoint(&inst, &SolveOptions::default()).unwrap();
        assert_eq!(sol.cost, 0.0);
        assert!(check_feasible(&inst, &sol.centers).unwrap().feasible);
    }
}
