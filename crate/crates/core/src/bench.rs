//! Experiment grids: generate instances, run solvers with derived seeds and
//! write one CSV row per run.
//!
//! The CSV layout is versioned by its first line (`BENCH_CSV_VERSION`);
//! columns are fixed and only ever appended to in a new version.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algo::{run_algorithm, Algorithm};
use crate::data::{generate, load_tabular, AlphaRule, GroupMode, SyntheticSpec, TabularConfig};
use crate::disjoint::{SearchMode, SolveOptions};
use crate::error::{usage, Error, Result};
use crate::exact::ExactOptions;
use crate::model::{check_feasible, eval_cost, Instance};
use crate::traversal::StartRule;

pub const BENCH_CSV_VERSION: &str = "# fair-ksupplier bench v1";

fn one() -> u32 {
    1
}

fn default_fraction() -> f64 {
    0.5
}

fn default_modes() -> Vec<GridMode> {
    vec![GridMode::Disjoint]
}

fn default_overlap() -> Vec<f64> {
    vec![2.0]
}

fn default_exact_limit() -> u64 {
    ExactOptions::default().limit
}

fn default_work_limit() -> usize {
    SolveOptions::default().work_limit
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridMode {
    Disjoint,
    Overlapping,
}

/// Parameter grid; synthetic configurations are the cartesian product of
/// the list-valued fields. Tabular datasets are appended as extra
/// configurations with their own `k` and requirements.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default)]
    pub base_seed: u64,
    /// Instances generated per synthetic configuration.
    #[serde(default = "one")]
    pub instances: u32,
    /// Runs of each algorithm per instance, with distinct seeds.
    #[serde(default = "one")]
    pub repeats: u32,
    pub algorithms: Vec<Algorithm>,
    #[serde(default)]
    pub n: Vec<usize>,
    #[serde(default)]
    pub d: Vec<usize>,
    #[serde(default)]
    pub t: Vec<usize>,
    #[serde(default)]
    pub k: Vec<usize>,
    #[serde(default = "default_modes")]
    pub mode: Vec<GridMode>,
    /// Used by overlapping configurations only.
    #[serde(default = "default_overlap")]
    pub overlap: Vec<f64>,
    #[serde(default = "default_fraction")]
    pub client_fraction: f64,
    /// Multiplier on the uniform `k / t` requirement.
    #[serde(default)]
    pub alpha_factor: Option<usize>,
    /// Explicit requirement vector; overrides `alpha_factor`.
    #[serde(default)]
    pub alpha: Option<Vec<usize>>,
    #[serde(default)]
    pub search_mode: SearchMode,
    #[serde(default = "default_exact_limit")]
    pub exact_limit: u64,
    #[serde(default = "default_work_limit")]
    pub work_limit: usize,
    /// Tabular dataset configs (relative to the grid file).
    #[serde(default)]
    pub tabular: Vec<PathBuf>,
}

impl GridConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let grid: Self = toml::from_str(text)?;
        grid.validate()?;
        Ok(grid)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut grid = Self::from_toml(&fs::read_to_string(path)?)?;
        if let Some(dir) = path.parent() {
            for p in &mut grid.tabular {
                if p.is_relative() {
                    *p = dir.join(&*p);
                }
            }
        }
        Ok(grid)
    }

    fn validate(&self) -> Result<()> {
        if self.algorithms.is_empty() {
            return Err(usage("grid lists no algorithms"));
        }
        if self.instances == 0 || self.repeats == 0 {
            return Err(usage("`instances` and `repeats` must be positive"));
        }
        let synthetic = [self.n.len(), self.d.len(), self.t.len(), self.k.len()];
        if synthetic.iter().any(|&l| l > 0) && synthetic.contains(&0) {
            return Err(usage("synthetic grids need all of n, d, t and k"));
        }
        if synthetic[0] == 0 && self.tabular.is_empty() {
            return Err(usage("grid has neither synthetic parameters nor tabular datasets"));
        }
        Ok(())
    }

    /// Synthetic configurations in a fixed order.
    pub fn synthetic_specs(&self) -> Vec<SyntheticSpec> {
        let mut out = Vec::new();
        for &n in &self.n {
            for &d in &self.d {
                for &t in &self.t {
                    for &k in &self.k {
                        for &mode in &self.mode {
                            let modes: Vec<GroupMode> = match mode {
                                GridMode::Disjoint => vec![GroupMode::Disjoint],
                                GridMode::Overlapping => self
                                    .overlap
                                    .iter()
                                    .map(|&f| GroupMode::Overlapping { overlap_factor: f })
                                    .collect(),
                            };
                            for group_mode in modes {
                                let alpha = match (&self.alpha, self.alpha_factor) {
                                    (Some(a), _) => AlphaRule::Explicit(a.clone()),
                                    (None, Some(f)) => AlphaRule::Explicit(vec![f * (k / t); t]),
                                    (None, None) => AlphaRule::Uniform,
                                };
                                out.push(SyntheticSpec {
                                    n,
                                    d,
                                    t,
                                    k,
                                    client_fraction: self.client_fraction,
                                    group_mode,
                                    alpha,
                                    seed: 0,
                                });
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

/// SplitMix64 finalizer; decorrelates nearby seeds.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of instance `instance` in configuration `config`.
pub fn instance_seed(base: u64, config: usize, instance: u32) -> u64 {
    mix(mix(mix(base) ^ config as u64) ^ u64::from(instance))
}

/// Seed of a solver run; depends on the instance seed and the repeat only,
/// so every algorithm sees the same start points.
pub fn run_seed(instance_seed: u64, repeat: u32) -> u64 {
    mix(instance_seed ^ mix(u64::from(repeat) + 1))
}

/// One CSV row. Field order is the column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub config: usize,
    pub dataset: String,
    pub n: usize,
    pub d: usize,
    pub n_c: usize,
    pub n_f: usize,
    pub t: usize,
    pub k: usize,
    pub mode: String,
    /// Overlap factor; empty for disjoint and tabular data.
    pub overlap: Option<f64>,
    /// Space-separated vector.
    pub alpha: String,
    pub beta: String,
    pub algo: String,
    pub instance: u32,
    pub instance_seed: u64,
    pub repeat: u32,
    pub seed: u64,
    pub cost: Option<f64>,
    pub wall_time: Option<f64>,
    pub feasible: Option<bool>,
    pub multisets: Option<u64>,
    pub error: String,
}

pub const BENCH_COLUMNS: [&str; 22] = [
    "config",
    "dataset",
    "n",
    "d",
    "n_c",
    "n_f",
    "t",
    "k",
    "mode",
    "overlap",
    "alpha",
    "beta",
    "algo",
    "instance",
    "instance_seed",
    "repeat",
    "seed",
    "cost",
    "wall_time",
    "feasible",
    "multisets",
    "error",
];

fn join(v: &[usize]) -> String {
    v.iter().map(usize::to_string).collect::<Vec<_>>().join(" ")
}

struct Job {
    config: usize,
    dataset: String,
    mode: String,
    overlap: Option<f64>,
    instance: u32,
    instance_seed: u64,
    source: Source,
}

enum Source {
    Synthetic(SyntheticSpec),
    Tabular(TabularConfig),
}

fn jobs(grid: &GridConfig) -> Result<Vec<Job>> {
    let mut out = Vec::new();
    let specs = grid.synthetic_specs();
    for (config, spec) in specs.iter().enumerate() {
        let (mode, overlap) = match spec.group_mode {
            GroupMode::Disjoint => ("disjoint", None),
            GroupMode::Overlapping { overlap_factor } => ("overlapping", Some(overlap_factor)),
        };
        for instance in 0..grid.instances {
            let seed = instance_seed(grid.base_seed, config, instance);
            out.push(Job {
                config,
                dataset: "synthetic".into(),
                mode: mode.into(),
                overlap,
                instance,
                instance_seed: seed,
                source: Source::Synthetic(SyntheticSpec { seed, ..spec.clone() }),
            });
        }
    }
    for (i, path) in grid.tabular.iter().enumerate() {
        let tab = TabularConfig::from_file(path)?;
        let dataset = tab.name.clone().unwrap_or_else(|| {
            path.file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default()
        });
        out.push(Job {
            config: specs.len() + i,
            dataset,
            mode: "tabular".into(),
            overlap: None,
            instance: 0,
            instance_seed: 0,
            source: Source::Tabular(tab),
        });
    }
    Ok(out)
}

fn run_job(grid: &GridConfig, job: &Job) -> Vec<BenchRecord> {
    let loaded = match &job.source {
        Source::Synthetic(spec) => generate(spec),
        Source::Tabular(tab) => load_tabular(tab).map(|d| d.instance),
    };
    let mut rows = Vec::new();
    for repeat in 0..grid.repeats {
        let seed = run_seed(job.instance_seed, repeat);
        for &algo in &grid.algorithms {
            let mut row = BenchRecord {
                config: job.config,
                dataset: job.dataset.clone(),
                n: 0,
                d: 0,
                n_c: 0,
                n_f: 0,
                t: 0,
                k: 0,
                mode: job.mode.clone(),
                overlap: job.overlap,
                alpha: String::new(),
                beta: String::new(),
                algo: algo.id().into(),
                instance: job.instance,
                instance_seed: job.instance_seed,
                repeat,
                seed,
                cost: None,
                wall_time: None,
                feasible: None,
                multisets: None,
                error: String::new(),
            };
            match &loaded {
                Ok(instance) => {
                    describe(&mut row, instance);
                    if let Err(e) = solve_into(&mut row, grid, instance, algo, seed) {
                        row.error = e.to_string();
                    }
                }
                Err(e) => row.error = e.to_string(),
            }
            rows.push(row);
        }
    }
    rows
}

fn describe(row: &mut BenchRecord, instance: &Instance) {
    row.n = instance.metric().len();
    row.d = match instance.metric() {
        crate::model::Metric::Euclidean(ps) => ps.dim(),
        crate::model::Metric::Matrix { .. } => 0,
    };
    row.n_c = instance.clients().len();
    row.n_f = instance.facilities().len();
    row.t = instance.num_groups();
    row.k = instance.k();
    row.alpha = join(instance.alpha());
    row.beta = instance.beta().map(join).unwrap_or_default();
}

fn solve_into(row: &mut BenchRecord, grid: &GridConfig, instance: &Instance, algo: Algorithm, seed: u64) -> Result<()> {
    let options = SolveOptions {
        search: grid.search_mode,
        start: StartRule::Seeded(seed),
        work_limit: grid.work_limit,
        prune: false,
    };
    let exact = ExactOptions {
        limit: grid.exact_limit,
        all_sizes: false,
    };
    let out = run_algorithm(instance, algo, &options, &exact)?;
    // recomputed from the stored centers rather than trusted from the solver
    row.cost = Some(eval_cost(instance, &out.solution.centers)?);
    row.feasible = Some(check_feasible(instance, &out.solution.centers)?.feasible);
    row.wall_time = Some(out.solution.wall_time);
    row.multisets = out.multisets;
    Ok(())
}

/// Runs the whole grid on up to `jobs` threads. Row order does not depend
/// on scheduling.
pub fn run_grid(grid: &GridConfig, jobs_limit: usize) -> Result<Vec<BenchRecord>> {
    let work = jobs(grid)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs_limit.max(1))
        .build()
        .map_err(|e| Error::Usage(format!("cannot start worker pool: {e}")))?;
    let rows: Vec<Vec<BenchRecord>> = pool.install(|| {
        work.par_iter()
            .map(|job| {
                log::info!("config {} instance {}", job.config, job.instance);
                run_job(grid, job)
            })
            .collect()
    });
    Ok(rows.into_iter().flatten().collect())
}

pub fn write_csv<W: io::Write>(mut out: W, rows: &[BenchRecord]) -> Result<()> {
    writeln!(out, "{BENCH_CSV_VERSION}")?;
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(BENCH_COLUMNS)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: io::Read>(input: R) -> Result<Vec<BenchRecord>> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != BENCH_COLUMNS {
        return Err(Error::Load(format!("unexpected bench header {header:?}")));
    }
    Ok(r.deserialize().collect::<Result<Vec<BenchRecord>, _>>()?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlgoSummary {
    pub config: usize,
    pub dataset: String,
    pub algo: String,
    pub runs: usize,
    pub errors: usize,
    pub mean_wall_time: f64,
    /// Sample standard deviation (0 for a single run).
    pub std_wall_time: f64,
    pub min_cost: f64,
    /// Min cost divided by the unfair baseline's min cost in the same
    /// configuration, when that baseline ran.
    pub price_of_fairness: Option<f64>,
}

/// Per-(configuration, algorithm) aggregates over successful rows.
pub fn summarize(rows: &[BenchRecord]) -> Vec<AlgoSummary> {
    let mut keys: Vec<(usize, String)> = Vec::new();
    for r in rows {
        let key = (r.config, r.algo.clone());
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    let mut out: Vec<AlgoSummary> = keys
        .into_iter()
        .map(|(config, algo)| {
            let group: Vec<&BenchRecord> = rows
                .iter()
                .filter(|r| r.config == config && r.algo == algo)
                .collect();
            let ok: Vec<&&BenchRecord> = group.iter().filter(|r| r.error.is_empty()).collect();
            let times: Vec<f64> = ok.iter().filter_map(|r| r.wall_time).collect();
            let mean = if times.is_empty() {
                f64::NAN
            } else {
                times.iter().sum::<f64>() / times.len() as f64
            };
            let std = if times.len() < 2 {
                0.0
            } else {
                (times.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (times.len() - 1) as f64).sqrt()
            };
            let min_cost = ok
                .iter()
                .filter_map(|r| r.cost)
                .fold(f64::INFINITY, f64::min);
            AlgoSummary {
                config,
                dataset: group[0].dataset.clone(),
                algo,
                runs: group.len(),
                errors: group.len() - ok.len(),
                mean_wall_time: mean,
                std_wall_time: std,
                min_cost,
                price_of_fairness: None,
            }
        })
        .collect();
    let unfair: Vec<(usize, f64)> = out
        .iter()
        .filter(|s| s.algo == Algorithm::Unfair.id() && s.min_cost.is_finite())
        .map(|s| (s.config, s.min_cost))
        .collect();
    for s in &mut out {
        if let Some(&(_, base)) = unfair.iter().find(|(c, _)| *c == s.config) {
            if s.min_cost.is_finite() && base > 0.0 {
                s.price_of_fairness = Some(s.min_cost / base);
            }
        }
    }
    out
}

/// Human-readable summary table (one line per configuration and algorithm).
pub fn format_summary(summary: &[AlgoSummary]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:>6} {:<14} {:<24} {:>5} {:>4} {:>22} {:>12} {:>8}",
        "config", "dataset", "algo", "runs", "err", "wall_time (s)", "min_cost", "pof"
    );
    for a in summary {
        let pof = a.price_of_fairness.map_or_else(|| "-".to_string(), |p| format!("{p:.4}"));
        let _ = writeln!(
            s,
            "{:>6} {:<14} {:<24} {:>5} {:>4} {:>22} {:>12.6} {:>8}",
            a.config,
            a.dataset,
            a.algo,
            a.runs,
            a.errors,
            format!("{:.4} ± {:.4}", a.mean_wall_time, a.std_wall_time),
            a.min_cost,
            pof
        );
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = r#"
        base_seed = 3
        instances = 2
        repeats = 2
        algorithms = ["unfair-3apx", "fair-disjoint-3apx"]
        n = [60]
        d = [2]
        t = [2]
        k = [4]
    "#;

    #[test]
    fn one_row_per_instance_algorithm_and_repeat() {
        let grid = GridConfig::from_toml(SMALL).unwrap();
        let rows = run_grid(&grid, 1).unwrap();
        assert_eq!(rows.len(), 8);
        assert!(rows.iter().all(|r| r.error.is_empty() && r.feasible.is_some()));
    }

    #[test]
    fn reruns_reproduce_costs_regardless_of_jobs() {
        let grid = GridConfig::from_toml(SMALL).unwrap();
        let a = run_grid(&grid, 1).unwrap();
        let b = run_grid(&grid, 4).unwrap();
        let costs = |rows: &[BenchRecord]| rows.iter().map(|r| (r.seed, r.cost)).collect::<Vec<_>>();
        assert_eq!(costs(&a), costs(&b));
    }

    #[test]
    fn csv_round_trips_with_version_line() {
        let grid = GridConfig::from_toml(SMALL).unwrap();
        let rows = run_grid(&grid, 2).unwrap();
        let mut buf = Vec::new();
        write_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with(BENCH_CSV_VERSION));
        assert_eq!(read_csv(&buf[..]).unwrap(), rows);
    }

    #[test]
    fn failures_become_error_rows() {
        let grid = GridConfig::from_toml(
            r#"
            algorithms = ["exact"]
            n = [60]
            d = [2]
            t = [2]
            k = [4]
            exact_limit = 5
            "#,
        )
        .unwrap();
        let rows = run_grid(&grid, 1).unwrap();
        assert_eq!(rows.len(), 1);
        assert!(rows[0].error.contains("work limit"));
        assert!(rows[0].cost.is_none());
    }

    #[test]
    fn seeds_are_distinct() {
        let mut seen = std::collections::HashSet::new();
        for c in 0..10 {
            for i in 0..10 {
                let s = instance_seed(0, c, i);
                assert!(seen.insert(s));
                for r in 0..5 {
                    assert!(seen.insert(run_seed(s, r)));
                }
            }
        }
    }

    #[test]
    fn summary_statistics() {
        let grid = GridConfig::from_toml(SMALL).unwrap();
        let rows = run_grid(&grid, 1).unwrap();
        let summary = summarize(&rows);
        assert_eq!(summary.len(), 2);
        let fair = &summary[1];
        let min = rows
            .iter()
            .filter(|r| r.algo == fair.algo)
            .map(|r| r.cost.unwrap())
            .fold(f64::INFINITY, f64::min);
        assert_eq!(fair.min_cost, min);
        assert_eq!(fair.price_of_fairness, Some(min / summary[0].min_cost));
        assert!(format_summary(&summary).contains("fair-disjoint-3apx"));
    }

    #[test]
    fn bad_grids_are_usage_errors() {
        assert!(GridConfig::from_toml("algorithms = []\nn=[1]\nd=[1]\nt=[1]\nk=[1]").is_err());
        assert!(GridConfig::from_toml("algorithms = [\"exact\"]\nn=[10]").is_err());
    }
}
