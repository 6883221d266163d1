//! Random small instances shared by the integration tests.

#![allow(dead_code)]

use fair_ksupplier::{Instance, Metric, PointSet};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Points in the plane: uniform reals, or a coarse integer grid so that ties
/// and coincident points show up.
fn points(rng: &mut ChaCha8Rng, n: usize) -> Metric {
    let grid = rng.gen_bool(0.5);
    let pts: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            (0..2)
                .map(|_| {
                    if grid {
                        f64::from(rng.gen_range(0..6))
                    } else {
                        rng.gen_range(0.0..10.0)
                    }
                })
                .collect()
        })
        .collect();
    Metric::Euclidean(PointSet::new(&pts).unwrap())
}

/// Clients and facilities drawn from `0..n`; they overlap on some seeds.
fn split(rng: &mut ChaCha8Rng, n: usize) -> (Vec<usize>, Vec<usize>) {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(rng);
    let n_c = rng.gen_range(1..n);
    let mut clients = idx[..n_c].to_vec();
    let mut facilities = idx[n_c..].to_vec();
    if rng.gen_bool(0.2) {
        // shared points: a few clients may also serve
        facilities.extend(clients.iter().take(2).copied());
    }
    clients.sort_unstable();
    facilities.sort_unstable();
    (clients, facilities)
}

/// Disjoint instance with `n <= 30`, `t <= 4`, `k <= 4` and `sum(alpha) <= k`.
/// Some facilities may belong to no group.
pub fn disjoint_instance(seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let n = rng.gen_range(6..=30);
        let t = rng.gen_range(1..=4);
        let k = rng.gen_range(1..=4);
        let metric = points(&mut rng, n);
        let (clients, mut facilities) = split(&mut rng, n);
        if facilities.len() < t {
            continue;
        }
        facilities.shuffle(&mut rng);
        let covered = if rng.gen_bool(0.2) { facilities.len() - 1 } else { facilities.len() };
        let mut groups = vec![Vec::new(); t];
        for (i, &f) in facilities[..covered].iter().enumerate() {
            let g = if i < t { i } else { rng.gen_range(0..t) };
            groups[g].push(f);
        }
        let mut alpha = vec![0; t];
        let mut budget = rng.gen_range(0..=k);
        for _ in 0..budget * 2 {
            let g = rng.gen_range(0..t);
            if budget > 0 && alpha[g] < groups[g].len() {
                alpha[g] += 1;
                budget -= 1;
            }
        }
        return Instance::new(metric, clients, facilities, groups, alpha, None, k).unwrap();
    }
}

/// Instance whose groups may overlap, with `n <= 25`, `t <= 3`, `k <= 3`;
/// upper bounds when `with_beta`. May be infeasible.
pub fn intersecting_instance(seed: u64, with_beta: bool) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let n = rng.gen_range(6..=25);
        let t = rng.gen_range(1..=3);
        let k = rng.gen_range(1..=3);
        let metric = points(&mut rng, n);
        let (clients, facilities) = split(&mut rng, n);
        let mut groups = vec![Vec::new(); t];
        for &f in &facilities {
            for g in groups.iter_mut() {
                if rng.gen_bool(0.5) {
                    g.push(f);
                }
            }
        }
        if groups.iter().any(Vec::is_empty) {
            continue;
        }
        let alpha: Vec<usize> = groups
            .iter()
            .map(|g| rng.gen_range(0..=g.len().min(2)))
            .collect();
        let beta = with_beta.then(|| {
            alpha
                .iter()
                .zip(&groups)
                .map(|(&a, g)| (a + rng.gen_range(0..=1)).min(g.len()))
                .collect()
        });
        return Instance::new(metric, clients, facilities, groups, alpha, beta, k).unwrap();
    }
}

/// Relative tolerance for float comparisons against the oracle.
pub const REL: f64 = 1e-9;

pub fn within_factor(cost: f64, opt: f64, factor: f64) -> bool {
    cost >= opt - REL * opt && cost <= factor * opt + REL * opt
}
