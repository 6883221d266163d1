use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{usage, Error, Result};
use crate::model::{Instance, Metric, PointSet};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum GroupMode {
    /// Facilities split into `t` near-equal random groups.
    Disjoint,
    /// Disjoint split first, then each group grows by random extra
    /// facilities until it holds `overlap_factor * n_f / t` members.
    Overlapping { overlap_factor: f64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlphaRule {
    /// `k / t` (integer division) for every group.
    Uniform,
    Explicit(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub n: usize,
    pub d: usize,
    pub t: usize,
    pub k: usize,
    pub client_fraction: f64,
    pub group_mode: GroupMode,
    pub alpha: AlphaRule,
    pub seed: u64,
}

impl SyntheticSpec {
    pub fn new(n: usize, d: usize, t: usize, k: usize, seed: u64) -> Self {
        Self {
            n,
            d,
            t,
            k,
            client_fraction: 0.5,
            group_mode: GroupMode::Disjoint,
            alpha: AlphaRule::Uniform,
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(usage("n must be at least 2"));
        }
        if self.d == 0 || self.t == 0 || self.k == 0 {
            return Err(usage("d, t and k must be positive"));
        }
        if !(self.client_fraction > 0.0 && self.client_fraction < 1.0) {
            return Err(usage("client fraction must lie strictly between 0 and 1"));
        }
        if let GroupMode::Overlapping { overlap_factor } = self.group_mode {
            if !(overlap_factor >= 1.0) {
                return Err(usage("overlap factor must be at least 1"));
            }
        }
        if let AlphaRule::Explicit(a) = &self.alpha {
            if a.len() != self.t {
                return Err(usage(format!("alpha has {} entries for t = {}", a.len(), self.t)));
            }
        }
        Ok(())
    }

    fn alpha(&self) -> Vec<usize> {
        match &self.alpha {
            AlphaRule::Uniform => vec![self.k / self.t; self.t],
            AlphaRule::Explicit(a) => a.clone(),
        }
    }
}

const GROUP_RETRIES: usize = 16;

/// Uniform points in `[0, 1]^d`, a random client/facility split and random
/// groups. The same spec always produces the same instance.
pub fn generate(spec: &SyntheticSpec) -> Result<Instance> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let coords: Vec<f64> = (0..spec.n * spec.d).map(|_| rng.gen::<f64>()).collect();
    let points = PointSet::from_flat(spec.d, coords)?;

    let mut order: Vec<usize> = (0..spec.n).collect();
    order.shuffle(&mut rng);
    let n_c = ((spec.n as f64 * spec.client_fraction).round() as usize).clamp(1, spec.n - 1);
    let mut clients = order[..n_c].to_vec();
    let mut facilities = order[n_c..].to_vec();
    clients.sort_unstable();
    facilities.sort_unstable();
    if facilities.len() < spec.t {
        return Err(usage(format!(
            "{} facilities cannot fill {} groups",
            facilities.len(),
            spec.t
        )));
    }

    let alpha = spec.alpha();
    for _ in 0..GROUP_RETRIES {
        let groups = assign_groups(&facilities, spec, &mut rng);
        if groups.iter().zip(&alpha).all(|(g, &a)| a <= g.len()) {
            return Instance::new(
                Metric::Euclidean(points),
                clients,
                facilities,
                groups,
                alpha,
                None,
                spec.k,
            );
        }
    }
    Err(Error::Infeasible(format!(
        "requirements {alpha:?} do not fit the generated groups after {GROUP_RETRIES} attempts"
    )))
}

fn assign_groups(facilities: &[usize], spec: &SyntheticSpec, rng: &mut ChaCha8Rng) -> Vec<Vec<usize>> {
    let mut shuffled = facilities.to_vec();
    shuffled.shuffle(rng);
    let mut groups = vec![Vec::new(); spec.t];
    for (i, &f) in shuffled.iter().enumerate() {
        groups[i % spec.t].push(f);
    }
    if let GroupMode::Overlapping { overlap_factor } = spec.group_mode {
        let n_f = facilities.len();
        let target = ((overlap_factor * n_f as f64 / spec.t as f64).round() as usize).min(n_f);
        for group in &mut groups {
            let mut members: HashSet<usize> = group.iter().copied().collect();
            while members.len() < target {
                let f = facilities[rng.gen_range(0..n_f)];
                if members.insert(f) {
                    group.push(f);
                }
            }
        }
    }
    for g in &mut groups {
        g.sort_unstable();
    }
    groups
}
