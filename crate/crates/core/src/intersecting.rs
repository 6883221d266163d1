//! Fair k-supplier with intersecting groups, and the lower+upper bound
//! ("fair range") variant.
//!
//! Facilities are partitioned into cells of identical group membership. For
//! every feasible way of drawing `k` centers from those cells, the cells
//! become a disjoint-group subinstance whose requirements are the draw
//! counts; the disjoint solver runs on each and the cheapest result wins.
//! Running time is exponential in `t * k` only.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::disjoint::{search_context, traverse, Best, CandidateContext, CostCache, SolveOptions};
use crate::error::{Error, Result};
use crate::model::{Instance, Solution};

/// Group membership of a facility: bit `j` set iff it belongs to group `j`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CharacteristicVector(pub Vec<bool>);

impl CharacteristicVector {
    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|b| !b)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cell {
    pub vector: CharacteristicVector,
    /// Sorted point indices.
    pub members: Vec<usize>,
}

/// Non-empty cells in descending order of characteristic vector, so that
/// disjoint groups come out in group order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellPartition {
    pub cells: Vec<Cell>,
}

impl CellPartition {
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }
}

/// Groups facilities by characteristic vector. Facilities outside every
/// group form an all-zero cell; they count towards the budget but never
/// towards a requirement.
pub fn partition_facilities(instance: &Instance) -> CellPartition {
    let t = instance.num_groups();
    let facilities = instance.facilities();
    let mut bits = vec![vec![false; t]; facilities.len()];
    for (j, group) in instance.groups().iter().enumerate() {
        for f in group {
            let pos = facilities.binary_search(f).expect("group members are facilities");
            bits[pos][j] = true;
        }
    }
    let mut cells: BTreeMap<Vec<bool>, Vec<usize>> = BTreeMap::new();
    for (&f, b) in facilities.iter().zip(bits) {
        cells.entry(b).or_default().push(f);
    }
    CellPartition {
        cells: cells
            .into_iter()
            .rev()
            .map(|(v, members)| Cell {
                vector: CharacteristicVector(v),
                members,
            })
            .collect(),
    }
}

/// All multiplicity vectors `m` with `sum(m) = size`, `m[i] <= |cell i|`,
/// in descending lexicographic order. Feasibility against the requirements
/// is applied by [`FeasibleMultisets`].
#[derive(Debug, Clone)]
pub struct Compositions {
    caps: Vec<usize>,
    current: Option<Vec<usize>>,
}

impl Compositions {
    pub fn new(caps: Vec<usize>, size: usize) -> Self {
        let current = fill_left(&caps, 0, size);
        Self { caps, current }
    }
}

/// Greedily places `amount` into `caps[from..]`, leftmost first.
fn fill_left(caps: &[usize], from: usize, amount: usize) -> Option<Vec<usize>> {
    let mut out = vec![0; caps.len()];
    let mut left = amount;
    for i in from..caps.len() {
        let take = caps[i].min(left);
        out[i] = take;
        left -= take;
    }
    (left == 0).then_some(out)
}

impl Iterator for Compositions {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let current = self.current.take()?;
        let p = self.caps.len();
        // successor: decrement the rightmost position whose suffix can absorb one more unit
        let mut suffix_sum = 0;
        let mut suffix_cap = 0;
        for i in (0..p).rev() {
            if i + 1 < p {
                suffix_sum += current[i + 1];
                suffix_cap += self.caps[i + 1];
            }
            if current[i] > 0 && suffix_cap > suffix_sum {
                let mut next = current.clone();
                next[i] -= 1;
                let tail = fill_left(&self.caps[i + 1..], 0, suffix_sum + 1)
                    .expect("suffix has room");
                next[i + 1..].copy_from_slice(&tail);
                self.current = Some(next);
                break;
            }
        }
        Some(current)
    }
}

/// Stream of multiplicity vectors whose summed characteristic vectors lie
/// within `[alpha, beta]`.
#[derive(Debug, Clone)]
pub struct FeasibleMultisets<'a> {
    cells: &'a CellPartition,
    alpha: &'a [usize],
    beta: Option<&'a [usize]>,
    inner: Compositions,
    examined: u64,
}

impl FeasibleMultisets<'_> {
    /// Compositions looked at so far, feasible or not.
    pub fn examined(&self) -> u64 {
        self.examined
    }
}

impl Iterator for FeasibleMultisets<'_> {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        for m in self.inner.by_ref() {
            self.examined += 1;
            if dominates(self.cells, &m, self.alpha, self.beta) {
                return Some(m);
            }
        }
        None
    }
}

fn dominates(cells: &CellPartition, m: &[usize], alpha: &[usize], beta: Option<&[usize]>) -> bool {
    let mut sum = vec![0usize; alpha.len()];
    for (cell, &mult) in cells.cells.iter().zip(m) {
        if mult == 0 {
            continue;
        }
        for (s, &bit) in sum.iter_mut().zip(&cell.vector.0) {
            if bit {
                *s += mult;
            }
        }
    }
    sum.iter().zip(alpha).all(|(s, a)| s >= a)
        && beta.is_none_or(|b| sum.iter().zip(b).all(|(s, b)| s <= b))
}

/// Feasible `size`-multisets of cells in deterministic order.
pub fn enumerate_feasible_multisets<'a>(
    cells: &'a CellPartition,
    size: usize,
    alpha: &'a [usize],
    beta: Option<&'a [usize]>,
) -> FeasibleMultisets<'a> {
    let caps = cells.cells.iter().map(|c| c.members.len()).collect();
    FeasibleMultisets {
        cells,
        alpha,
        beta,
        inner: Compositions::new(caps, size),
        examined: 0,
    }
}

/// `C(p + size - 1, size)`, saturating.
pub fn multiset_count(p: usize, size: usize) -> u128 {
    if p == 0 {
        return u128::from(size == 0);
    }
    let (n, r) = ((p + size - 1) as u128, size.min(p - 1) as u128);
    let mut acc: u128 = 1;
    for i in 0..r {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

/// Multiset sizes worth enumerating.
///
/// Without upper bounds a solution can always be grown to `min(k, n_f)`
/// facilities without raising its cost, so that size alone suffices. With
/// upper bounds smaller solutions may be the only feasible ones.
pub(crate) fn multiset_sizes(instance: &Instance) -> Vec<usize> {
    let top = instance.k().min(instance.facilities().len());
    if instance.beta().is_some() {
        (1..=top).rev().collect()
    } else {
        vec![top]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntersectingRun {
    pub solution: Solution,
    pub cells: usize,
    /// Compositions examined across all sizes.
    pub examined: u64,
    /// Compositions that passed the requirement check.
    pub feasible: u64,
    /// Upper bound on `examined` from the multiset count.
    pub bound: u128,
    /// Multiplicity vector of the winning subinstance.
    pub multiset: Vec<usize>,
}

/// Fair k-supplier with (possibly) intersecting groups and optional upper
/// bounds; cost is at most three times optimal.
pub fn solve_intersecting(instance: &Instance, options: &SolveOptions) -> Result<Solution> {
    solve_intersecting_with_stats(instance, options).map(|r| r.solution)
}

pub fn solve_intersecting_with_stats(instance: &Instance, options: &SolveOptions) -> Result<IntersectingRun> {
    let timer = Instant::now();
    let work = instance.num_groups().saturating_mul(instance.k());
    if work > options.work_limit {
        return Err(Error::WorkLimit(format!(
            "t * k = {work} exceeds the limit of {}",
            options.work_limit
        )));
    }

    let cells = partition_facilities(instance);
    let traversal = traverse(instance, options.start)?;
    let groups: Vec<Arc<[usize]>> = cells
        .cells
        .iter()
        .map(|c| Arc::from(c.members.as_slice()))
        .collect();
    let full = CandidateContext::from_groups(instance, traversal, groups, vec![0; cells.len()]);

    let mut cache = CostCache::default();
    let mut best: Option<(Best, Vec<usize>)> = None;
    let (mut examined, mut feasible, mut bound) = (0u64, 0u64, 0u128);

    for size in multiset_sizes(instance) {
        bound = bound.saturating_add(multiset_count(cells.len(), size));
        let mut stream = enumerate_feasible_multisets(&cells, size, instance.alpha(), instance.beta());
        for m in stream.by_ref() {
            feasible += 1;
            let columns: Vec<usize> = (0..m.len()).filter(|&i| m[i] > 0).collect();
            if options.prune {
                if let Some((incumbent, _)) = &best {
                    if lower_bound(&full, &columns) >= incumbent.cost {
                        continue;
                    }
                }
            }
            let alpha: Vec<usize> = columns.iter().map(|&i| m[i]).collect();
            let ctx = full.select(&columns, alpha);
            if let Some(candidate) = search_context(instance, &ctx, options.search, &mut cache) {
                if best.as_ref().is_none_or(|(b, _)| candidate.cost < b.cost) {
                    best = Some((candidate, m));
                }
            }
        }
        examined += stream.examined();
    }
    debug_assert!(u128::from(examined) <= bound);

    let (best, multiset) = best.ok_or_else(|| {
        Error::Infeasible("no multiset of facility cells satisfies the requirements".into())
    })?;
    let mut solution = Solution::from_valid(instance, best.centers, 0.0);
    solution.wall_time = timer.elapsed().as_secs_f64();
    Ok(IntersectingRun {
        solution,
        cells: cells.len(),
        examined,
        feasible,
        bound,
        multiset,
    })
}

/// Any center set drawn from `columns` leaves some prefix client at least
/// this far away.
fn lower_bound(ctx: &CandidateContext, columns: &[usize]) -> f64 {
    ctx.dmin
        .iter()
        .map(|row| columns.iter().map(|&j| row[j]).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max)
}
