//! Farthest-first traversal over clients and the unconstrained k-supplier
//! baseline built on top of it.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{usage, Result};
use crate::model::{Instance, Solution};

/// How the first client of a traversal is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StartRule {
    /// A fixed client, given as a point index.
    Point(usize),
    /// A uniformly random client drawn from a generator seeded with this value.
    Seeded(u64),
}

impl Default for StartRule {
    fn default() -> Self {
        StartRule::Seeded(0)
    }
}

impl StartRule {
    pub(crate) fn resolve(self, instance: &Instance) -> Result<usize> {
        let clients = instance.clients();
        if clients.is_empty() {
            return Err(usage("farthest-first traversal needs at least one client"));
        }
        match self {
            StartRule::Point(p) if instance.is_client(p) => Ok(p),
            StartRule::Point(p) => Err(usage(format!("start point {p} is not a client"))),
            StartRule::Seeded(seed) => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                Ok(clients[rng.gen_range(0..clients.len())])
            }
        }
    }
}

/// Ordered client prefix `c_1..c_m` with `step_radius[i]` the largest
/// client distance to `{c_1..c_{i+1}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraversalResult {
    pub order: Vec<usize>,
    pub step_radius: Vec<f64>,
}

impl TraversalResult {
    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }
}

/// Greedy farthest-first traversal of up to `k` clients.
///
/// Keeps each client's distance to the current prefix and refreshes it with
/// the newest pick only, so the whole traversal costs `O(k * n_c)` distance
/// evaluations. Ties on the argmax go to the lowest point index. Stops early
/// when every client has been picked.
pub fn farthest_first(instance: &Instance, k: usize, start: StartRule) -> Result<TraversalResult> {
    if k == 0 {
        return Err(usage("k must be >= 1"));
    }
    let first = start.resolve(instance)?;
    let clients = instance.clients();
    let steps = k.min(clients.len());

    let mut taken = vec![false; clients.len()];
    let first_pos = clients.binary_search(&first).expect("resolved start is a client");
    taken[first_pos] = true;
    let mut near: Vec<f64> = clients.iter().map(|&c| instance.dist(c, first)).collect();

    let mut order = Vec::with_capacity(steps);
    let mut step_radius = Vec::with_capacity(steps);
    order.push(first);

    loop {
        // farthest untaken client; strict > keeps the lowest index on ties
        let mut best: Option<(usize, f64)> = None;
        for (pos, &d) in near.iter().enumerate() {
            if !taken[pos] && best.is_none_or(|(_, bd)| d > bd) {
                best = Some((pos, d));
            }
        }
        match best {
            Some((pos, d)) if order.len() < steps => {
                step_radius.push(d);
                taken[pos] = true;
                let newest = clients[pos];
                order.push(newest);
                for (slot, &c) in near.iter_mut().zip(clients) {
                    let d = instance.dist(c, newest);
                    if d < *slot {
                        *slot = d;
                    }
                }
            }
            Some((_, d)) => {
                step_radius.push(d);
                break;
            }
            None => {
                step_radius.push(0.0);
                break;
            }
        }
    }

    Ok(TraversalResult { order, step_radius })
}

/// Nearest facility to `p`, lowest index on ties.
pub(crate) fn nearest_facility(instance: &Instance, p: usize) -> usize {
    let mut best = (instance.facilities()[0], f64::INFINITY);
    for &f in instance.facilities() {
        let d = instance.dist(p, f);
        if d < best.1 {
            best = (f, d);
        }
    }
    best.0
}

/// Classic 3-approximation for k-supplier without fairness constraints:
/// traverse `k` clients farthest-first and open the nearest facility of each.
/// Groups and requirements are ignored.
pub fn unfair_ksupplier(instance: &Instance, k: usize, start: StartRule) -> Result<Solution> {
    let timer = Instant::now();
    let centers: Vec<usize> = if instance.clients().is_empty() {
        vec![instance.facilities()[0]]
    } else {
        farthest_first(instance, k, start)?
            .order
            .iter()
            .map(|&c| nearest_facility(instance, c))
            .collect()
    };
    let mut solution = Solution::from_valid(instance, centers, 0.0);
    solution.wall_time = timer.elapsed().as_secs_f64();
    Ok(solution)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::line;
    use crate::model::{Metric, PointSet};

    fn line_instance(clients: &[f64], facilities: &[f64], k: usize) -> Instance {
        let mut xs = clients.to_vec();
        xs.extend_from_slice(facilities);
        let nc = clients.len();
        let fac: Vec<usize> = (nc..xs.len()).collect();
        Instance::new(line(&xs), (0..nc).collect(), fac.clone(), vec![fac], vec![0], None, k)
            .unwrap()
    }

    #[test]
    fn hand_checked_line() {
        let inst = line_instance(&[0.0, 1.0, 9.0], &[0.0], 2);
        let tr = farthest_first(&inst, 2, StartRule::Point(0)).unwrap();
        assert_eq!(tr.order, vec![0, 2]);
        assert_eq!(tr.step_radius, vec![9.0, 1.0]);
    }

    #[test]
    fn single_step_reports_eccentricity() {
        let inst = line_instance(&[0.0, 1.0, 9.0], &[0.0], 1);
        let tr = farthest_first(&inst, 1, StartRule::Point(1)).unwrap();
        assert_eq!(tr.order, vec![1]);
        assert_eq!(tr.step_radius, vec![8.0]);
    }

    #[test]
    fn stops_when_clients_run_out() {
        let inst = line_instance(&[0.0, 4.0], &[0.0], 5);
        let tr = farthest_first(&inst, 5, StartRule::Point(0)).unwrap();
        assert_eq!(tr.order, vec![0, 1]);
        assert_eq!(tr.step_radius, vec![4.0, 0.0]);
    }

    #[test]
    fn rejects_non_client_start() {
        let inst = line_instance(&[0.0, 4.0], &[2.0], 1);
        assert!(farthest_first(&inst, 1, StartRule::Point(2)).is_err());
    }

    #[test]
    fn duplicate_clients_are_still_distinct_picks() {
        let inst = line_instance(&[3.0, 3.0, 3.0], &[0.0], 3);
        let tr = farthest_first(&inst, 3, StartRule::Point(1)).unwrap();
        assert_eq!(tr.order, vec![1, 0, 2]);
        assert_eq!(tr.step_radius, vec![0.0, 0.0, 0.0]);
    }

    /// Recomputes every distance to the prefix from scratch at each step.
    fn quadratic_reference(inst: &Instance, k: usize, first: usize) -> TraversalResult {
        let clients = inst.clients();
        let mut order = vec![first];
        let mut step_radius = Vec::new();
        loop {
            let far = |c: usize| {
                order
                    .iter()
                    .map(|&p| inst.distance(c, p).unwrap())
                    .fold(f64::INFINITY, f64::min)
            };
            let radius = clients.iter().map(|&c| far(c)).fold(0.0, f64::max);
            step_radius.push(radius);
            if order.len() == k.min(clients.len()) {
                break;
            }
            let mut best = None;
            for &c in clients {
                if order.contains(&c) {
                    continue;
                }
                let d = far(c);
                if best.is_none_or(|(_, bd)| d > bd) {
                    best = Some((c, d));
                }
            }
            order.push(best.unwrap().0);
        }
        TraversalResult { order, step_radius }
    }

    #[test]
    fn matches_quadratic_reference() {
        use rand::Rng;
        for seed in 0..20 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let pts: Vec<Vec<f64>> = (0..20).map(|_| vec![rng.gen(), rng.gen()]).collect();
            let inst = Instance::new(
                Metric::Euclidean(PointSet::new(&pts).unwrap()),
                (0..15).collect(),
                (15..20).collect(),
                vec![(15..20).collect()],
                vec![0],
                None,
                4,
            )
            .unwrap();
            let start = StartRule::Seeded(seed);
            let first = start.resolve(&inst).unwrap();
            let fast = farthest_first(&inst, 4, start).unwrap();
            assert_eq!(fast, quadratic_reference(&inst, 4, first));
            assert!(fast.step_radius.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn seeded_start_is_deterministic() {
        let inst = line_instance(&[0.0, 1.0, 5.0, 7.0, 20.0], &[0.0], 3);
        let a = farthest_first(&inst, 3, StartRule::Seeded(42)).unwrap();
        let b = farthest_first(&inst, 3, StartRule::Seeded(42)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn unfair_baseline_on_line() {
        let inst = line_instance(&[0.0, 10.0], &[1.0, 9.0], 2);
        let sol = unfair_ksupplier(&inst, 2, StartRule::Point(0)).unwrap();
        assert_eq!(sol.centers, vec![2, 3]);
        assert_eq!(sol.cost, 1.0);
    }

    #[test]
    fn unfair_baseline_is_exact_when_clients_are_facilities() {
        let xs = [0.0, 3.0, 8.0, 13.0];
        let inst = Instance::new(line(&xs), vec![0, 1, 2, 3], vec![0, 1, 2, 3], vec![vec![0, 1, 2, 3]], vec![0], None, 4)
            .unwrap();
        let sol = unfair_ksupplier(&inst, 4, StartRule::Seeded(1)).unwrap();
        assert_eq!(sol.cost, 0.0);
    }
}
