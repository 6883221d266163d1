//! Problem instances, the Euclidean metric, objective evaluation and
//! feasibility checks shared by every solver.
//!
//! All indices handed to or returned from this module are *point indices*
//! into the instance's metric. Clients and facilities are subsets of those
//! points and may overlap.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, usage, Error, Result};

/// Dense `d`-dimensional coordinates stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    dim: usize,
    coords: Vec<f64>,
}

impl PointSet {
    pub fn new(points: &[Vec<f64>]) -> Result<Self> {
        let dim = points.first().map_or(0, Vec::len);
        if dim == 0 && !points.is_empty() {
            return Err(invalid("points must have dimension >= 1"));
        }
        let mut coords = Vec::with_capacity(points.len() * dim);
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(invalid(format!(
                    "point {i} has dimension {}, expected {dim}",
                    p.len()
                )));
            }
            coords.extend_from_slice(p);
        }
        Self::from_flat(dim.max(1), coords)
    }

    pub fn from_flat(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("dimension must be >= 1"));
        }
        if coords.len() % dim != 0 {
            return Err(invalid("coordinate buffer is not a multiple of the dimension"));
        }
        if let Some(pos) = coords.iter().position(|x| !x.is_finite()) {
            return Err(invalid(format!(
                "point {} has a non-finite coordinate",
                pos / dim
            )));
        }
        Ok(Self { dim, coords })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    #[inline]
    fn l2(&self, a: usize, b: usize) -> f64 {
        self.point(a)
            .iter()
            .zip(self.point(b))
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt()
    }
}

/// Where distances come from.
///
/// `Matrix` exists for tiny hand-built test instances; everything at scale
/// uses `Euclidean`, which computes distances on demand.
#[derive(Debug, Clone, PartialEq)]
pub enum Metric {
    Euclidean(PointSet),
    Matrix { n: usize, data: Vec<f64> },
}

impl Metric {
    pub fn matrix(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(invalid(format!("distance row {i} is not of length {n}")));
            }
            data.extend_from_slice(row);
        }
        for i in 0..n {
            if data[i * n + i] != 0.0 {
                return Err(invalid(format!("distance matrix diagonal at {i} is not zero")));
            }
            for j in 0..n {
                let v = data[i * n + j];
                if !v.is_finite() || v < 0.0 {
                    return Err(invalid(format!("distance ({i},{j}) is negative or not finite")));
                }
                if v != data[j * n + i] {
                    return Err(invalid(format!("distance matrix is not symmetric at ({i},{j})")));
                }
            }
        }
        Ok(Metric::Matrix { n, data })
    }

    pub fn len(&self) -> usize {
        match self {
            Metric::Euclidean(p) => p.len(),
            Metric::Matrix { n, .. } => *n,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub(crate) fn dist(&self, a: usize, b: usize) -> f64 {
        match self {
            Metric::Euclidean(p) => p.l2(a, b),
            Metric::Matrix { n, data } => data[a * n + b],
        }
    }
}

/// A fair k-supplier instance. Immutable once constructed.
#[derive(Debug, Clone)]
pub struct Instance {
    metric: Metric,
    clients: Vec<usize>,
    facilities: Vec<usize>,
    groups: Vec<Vec<usize>>,
    alpha: Vec<usize>,
    beta: Option<Vec<usize>>,
    k: usize,
    disjoint: bool,
    uncovered: Vec<usize>,
}

const NOT_A_FACILITY: u32 = u32::MAX;

impl Instance {
    /// Validates and builds an instance. Client, facility and group lists are
    /// sorted and must not contain duplicates.
    pub fn new(
        metric: Metric,
        mut clients: Vec<usize>,
        mut facilities: Vec<usize>,
        groups: Vec<Vec<usize>>,
        alpha: Vec<usize>,
        beta: Option<Vec<usize>>,
        k: usize,
    ) -> Result<Self> {
        let n = metric.len();
        if k == 0 {
            return Err(invalid("k must be >= 1"));
        }
        if groups.is_empty() {
            return Err(invalid("at least one group is required"));
        }
        sort_unique(&mut clients, "clients")?;
        sort_unique(&mut facilities, "facilities")?;
        if let Some(&bad) = clients.iter().chain(&facilities).find(|&&i| i >= n) {
            return Err(invalid(format!("point index {bad} out of range (n = {n})")));
        }
        if facilities.is_empty() {
            return Err(invalid("the facility set is empty"));
        }
        if facilities.len() >= NOT_A_FACILITY as usize {
            return Err(invalid("too many facilities"));
        }

        let mut position = vec![NOT_A_FACILITY; n];
        for (pos, &f) in facilities.iter().enumerate() {
            position[f] = pos as u32;
        }
        let mut memberships = vec![0u32; facilities.len()];
        let mut sorted_groups = Vec::with_capacity(groups.len());
        for (g, mut members) in groups.into_iter().enumerate() {
            sort_unique(&mut members, &format!("group {g}"))?;
            for &f in &members {
                if f >= n || position[f] == NOT_A_FACILITY {
                    return Err(invalid(format!("group {g} member {f} is not a facility")));
                }
                memberships[position[f] as usize] += 1;
            }
            sorted_groups.push(members);
        }

        let t = sorted_groups.len();
        if alpha.len() != t {
            return Err(invalid(format!("alpha has {} entries for {t} groups", alpha.len())));
        }
        for (g, (&a, members)) in alpha.iter().zip(&sorted_groups).enumerate() {
            if a > members.len() {
                return Err(invalid(format!(
                    "alpha[{g}] = {a} exceeds group size {}",
                    members.len()
                )));
            }
        }
        if let Some(beta) = &beta {
            if beta.len() != t {
                return Err(invalid(format!("beta has {} entries for {t} groups", beta.len())));
            }
            if let Some(g) = (0..t).find(|&g| alpha[g] > beta[g]) {
                return Err(invalid(format!("alpha[{g}] exceeds beta[{g}]")));
            }
        }

        let uncovered: Vec<usize> = facilities
            .iter()
            .zip(&memberships)
            .filter(|(_, &m)| m == 0)
            .map(|(&f, _)| f)
            .collect();
        if !uncovered.is_empty() {
            log::warn!(
                "{} facilities belong to no group; fair solvers cannot use them to meet requirements",
                uncovered.len()
            );
        }
        let disjoint = memberships.iter().all(|&m| m <= 1);

        Ok(Self {
            metric,
            clients,
            facilities,
            groups: sorted_groups,
            alpha,
            beta,
            k,
            disjoint,
            uncovered,
        })
    }

    /// Same points and groups with different requirements.
    pub fn with_requirements(
        &self,
        k: usize,
        alpha: Vec<usize>,
        beta: Option<Vec<usize>>,
    ) -> Result<Self> {
        Self::new(
            self.metric.clone(),
            self.clients.clone(),
            self.facilities.clone(),
            self.groups.clone(),
            alpha,
            beta,
            k,
        )
    }

    pub fn metric(&self) -> &Metric {
        &self.metric
    }
    pub fn clients(&self) -> &[usize] {
        &self.clients
    }
    pub fn facilities(&self) -> &[usize] {
        &self.facilities
    }
    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }
    pub fn alpha(&self) -> &[usize] {
        &self.alpha
    }
    pub fn beta(&self) -> Option<&[usize]> {
        self.beta.as_deref()
    }
    pub fn k(&self) -> usize {
        self.k
    }
    pub fn num_groups(&self) -> usize {
        self.groups.len()
    }
    /// True iff no facility belongs to two groups.
    pub fn is_disjoint(&self) -> bool {
        self.disjoint
    }
    /// Facilities outside every group.
    pub fn uncovered(&self) -> &[usize] {
        &self.uncovered
    }

    pub fn is_client(&self, p: usize) -> bool {
        self.clients.binary_search(&p).is_ok()
    }

    pub fn is_facility(&self, p: usize) -> bool {
        self.facilities.binary_search(&p).is_ok()
    }

    /// Euclidean (or matrix) distance between two points.
    pub fn distance(&self, a: usize, b: usize) -> Result<f64> {
        let n = self.metric.len();
        if a >= n || b >= n {
            return Err(usage(format!("point index out of range (n = {n})")));
        }
        Ok(self.metric.dist(a, b))
    }

    #[inline]
    pub(crate) fn dist(&self, a: usize, b: usize) -> f64 {
        self.metric.dist(a, b)
    }

    /// Distance from `p` to its nearest point in `centers`.
    #[inline]
    pub(crate) fn dist_to_set(&self, p: usize, centers: &[usize]) -> f64 {
        centers
            .iter()
            .map(|&c| self.dist(p, c))
            .fold(f64::INFINITY, f64::min)
    }

    /// Objective without index validation. Zero when there are no clients.
    pub(crate) fn cost_unchecked(&self, centers: &[usize]) -> f64 {
        self.clients
            .iter()
            .map(|&c| self.dist_to_set(c, centers))
            .fold(0.0, f64::max)
    }

    /// Number of chosen facilities in each group.
    pub(crate) fn group_counts(&self, centers: &[usize]) -> Vec<usize> {
        self.groups
            .iter()
            .map(|g| centers.iter().filter(|c| g.binary_search(c).is_ok()).count())
            .collect()
    }

    fn validate_centers(&self, centers: &[usize]) -> Result<Vec<usize>> {
        let mut set = centers.to_vec();
        set.sort_unstable();
        set.dedup();
        if let Some(&bad) = set.iter().find(|&&c| !self.is_facility(c)) {
            return Err(usage(format!("center {bad} is not a facility")));
        }
        Ok(set)
    }
}

fn sort_unique(v: &mut [usize], what: &str) -> Result<()> {
    v.sort_unstable();
    if v.windows(2).any(|w| w[0] == w[1]) {
        return Err(invalid(format!("{what} contains duplicate indices")));
    }
    Ok(())
}

/// `max_{c in C} min_{s in centers} d(c, s)`.
pub fn eval_cost(instance: &Instance, centers: &[usize]) -> Result<f64> {
    if centers.is_empty() {
        return Err(usage("cannot evaluate an empty center set"));
    }
    let set = instance.validate_centers(centers)?;
    Ok(instance.cost_unchecked(&set))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    Budget { size: usize, k: usize },
    Lower { group: usize, count: usize, alpha: usize },
    Upper { group: usize, count: usize, beta: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupStatus {
    pub group: usize,
    pub count: usize,
    pub alpha: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<usize>,
    pub satisfied: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeasibilityReport {
    pub feasible: bool,
    pub size: usize,
    pub k: usize,
    pub groups: Vec<GroupStatus>,
    pub violations: Vec<Violation>,
}

/// Checks the budget, every lower bound and (when present) every upper bound.
pub fn check_feasible(instance: &Instance, centers: &[usize]) -> Result<FeasibilityReport> {
    let set = instance.validate_centers(centers)?;
    let counts = instance.group_counts(&set);
    let mut violations = Vec::new();
    if set.len() > instance.k {
        violations.push(Violation::Budget {
            size: set.len(),
            k: instance.k,
        });
    }
    let mut groups = Vec::with_capacity(counts.len());
    for (g, &count) in counts.iter().enumerate() {
        let alpha = instance.alpha[g];
        let beta = instance.beta.as_ref().map(|b| b[g]);
        let mut satisfied = true;
        if count < alpha {
            violations.push(Violation::Lower { group: g, count, alpha });
            satisfied = false;
        }
        if let Some(beta) = beta {
            if count > beta {
                violations.push(Violation::Upper { group: g, count, beta });
                satisfied = false;
            }
        }
        groups.push(GroupStatus {
            group: g,
            count,
            alpha,
            beta,
            satisfied,
        });
    }
    Ok(FeasibilityReport {
        feasible: violations.is_empty(),
        size: set.len(),
        k: instance.k,
        groups,
        violations,
    })
}

/// Adds a slack group containing every facility so the requirements sum to
/// the budget.
///
/// The slack requirement is `min(k, n_f) - sum(alpha)`: a solution can never
/// hold more than `n_f` facilities, so asking for more would make the
/// normalized instance infeasible. The slack group is appended last.
pub fn normalize_disjoint(instance: &Instance) -> Result<Instance> {
    if !instance.disjoint {
        return Err(usage("normalize_disjoint needs pairwise disjoint groups"));
    }
    let total: usize = instance.alpha.iter().sum();
    if total > instance.k {
        return Err(Error::Infeasible(format!(
            "requirements sum to {total}, more than k = {}",
            instance.k
        )));
    }
    let target = instance.k.min(instance.facilities.len());
    if total >= target {
        return Ok(instance.clone());
    }
    let mut groups = instance.groups.clone();
    groups.push(instance.facilities.clone());
    let mut alpha = instance.alpha.clone();
    alpha.push(target - total);
    let beta = instance.beta.as_ref().map(|b| {
        let mut b = b.clone();
        b.push(instance.facilities.len());
        b
    });
    Instance::new(
        instance.metric.clone(),
        instance.clients.clone(),
        instance.facilities.clone(),
        groups,
        alpha,
        beta,
        instance.k,
    )
}

/// A chosen center set together with its objective.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub centers: Vec<usize>,
    pub cost: f64,
    pub per_group_counts: Vec<usize>,
    pub wall_time: f64,
}

impl Solution {
    /// Recomputes cost and group counts from `centers`.
    pub fn evaluate(instance: &Instance, centers: Vec<usize>, wall_time: f64) -> Result<Self> {
        if centers.is_empty() {
            return Err(usage("a solution needs at least one center"));
        }
        let centers = instance.validate_centers(&centers)?;
        Ok(Self::from_valid(instance, centers, wall_time))
    }

    pub(crate) fn from_valid(instance: &Instance, mut centers: Vec<usize>, wall_time: f64) -> Self {
        centers.sort_unstable();
        centers.dedup();
        let cost = instance.cost_unchecked(&centers);
        let per_group_counts = instance.group_counts(&centers);
        Self {
            centers,
            cost,
            per_group_counts,
            wall_time,
        }
    }
}

/// On-disk JSON layout of an instance.
///
/// Either `points` (with `dimension`) or an explicit `distances` matrix must
/// be given. `metadata` is free-form and ignored by the solvers.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dimension: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distances: Option<Vec<Vec<f64>>>,
    pub clients: Vec<usize>,
    pub facilities: Vec<usize>,
    pub groups: Vec<Vec<usize>>,
    pub alpha: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<Vec<usize>>,
    pub k: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<serde_json::Value>,
}

impl InstanceFile {
    pub fn from_instance(instance: &Instance, metadata: Option<serde_json::Value>) -> Self {
        let (dimension, points, distances) = match &instance.metric {
            Metric::Euclidean(ps) => (
                Some(ps.dim()),
                Some((0..ps.len()).map(|i| ps.point(i).to_vec()).collect()),
                None,
            ),
            Metric::Matrix { n, data } => (
                None,
                None,
                Some(data.chunks(*n).map(<[f64]>::to_vec).collect()),
            ),
        };
        Self {
            dimension,
            points,
            distances,
            clients: instance.clients.clone(),
            facilities: instance.facilities.clone(),
            groups: instance.groups.clone(),
            alpha: instance.alpha.clone(),
            beta: instance.beta.clone(),
            k: instance.k,
            metadata,
        }
    }

    pub fn into_instance(self) -> Result<Instance> {
        let metric = match (self.points, self.distances) {
            (Some(points), None) => {
                let ps = PointSet::new(&points)?;
                if let Some(d) = self.dimension {
                    if !points.is_empty() && d != ps.dim() {
                        return Err(invalid(format!(
                            "declared dimension {d} but points have dimension {}",
                            ps.dim()
                        )));
                    }
                }
                Metric::Euclidean(ps)
            }
            (None, Some(rows)) => Metric::matrix(&rows)?,
            (Some(_), Some(_)) => {
                return Err(invalid("give either `points` or `distances`, not both"))
            }
            (None, None) => return Err(invalid("missing `points`")),
        };
        Instance::new(
            metric,
            self.clients,
            self.facilities,
            self.groups,
            self.alpha,
            self.beta,
            self.k,
        )
    }
}

pub fn read_instance(path: impl AsRef<Path>) -> Result<Instance> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str::<InstanceFile>(&text)?.into_instance()
}

pub fn write_instance(
    path: impl AsRef<Path>,
    instance: &Instance,
    metadata: Option<serde_json::Value>,
) -> Result<()> {
    let file = InstanceFile::from_instance(instance, metadata);
    fs::write(path, serde_json::to_string(&file)?)?;
    Ok(())
}
