//! Benchmark protocol: repeated independent sizing runs per algorithm,
//! aggregate statistics, percent differences against the overall best,
//! payback periods, and a deterministic file export.
//!
//! Every run's seed is derived from the master seed, the algorithm tag,
//! and the run index, so a report is a pure function of its inputs; the
//! exported files contain no timing data and are byte-identical across
//! reruns and thread counts.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::components::ComponentCatalog;
use crate::dispatch::{simulate_year, DesignVector};
use crate::economics::{fitness, payback_period_days, EconConfig, FitnessConfig};
use crate::optimize::{minimize, Algorithm, OptimizerConfig, SearchSpace};
use crate::seeding;
use crate::timeseries::ScenarioData;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid bench config: {0}")]
    BadConfig(String),
    #[error("objective rejected the benchmark inputs: {0}")]
    BadInputs(String),
    #[error("writing {path}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Optimize(#[from] crate::optimize::OptimizeError),
}

/// The full benchmark recipe: how many independent runs per algorithm,
/// the shared optimizer budget, which algorithms compete, the search box,
/// and the fitness settings. `scenario` is a label recorded in the report
/// (the data itself is passed to [`run_benchmark`]).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub runs: usize,
    /// Budget template; `seed` is the master seed and `algorithm` is
    /// overridden per run.
    pub optimizer: OptimizerConfig,
    pub algorithms: Vec<Algorithm>,
    pub scenario: String,
    /// Worker threads for the run pool; 0 means one per available core.
    pub parallelism: usize,
    pub space: SearchSpace,
    pub fitness: FitnessConfig,
}

impl BenchConfig {
    /// Digest of everything that determines report *content* (timing and
    /// parallelism excluded, since neither changes any exported value).
    pub fn digest(&self) -> u64 {
        let mut text = String::new();
        let _ = write!(
            text,
            "runs={};pop={};iters={};seed={};params={:?};algs={:?};scenario={};space={:?};fitness={:?}",
            self.runs,
            self.optimizer.population,
            self.optimizer.iterations,
            self.optimizer.seed,
            self.optimizer.algorithm_params,
            self.algorithms.iter().map(|a| a.tag()).collect::<Vec<_>>(),
            self.scenario,
            self.space,
            self.fitness,
        );
        seeding::fnv1a(text.as_bytes())
    }
}

/// Named budget presets: `desk` keeps a full benchmark under a quarter
/// hour on one core; `paper` is the heavyweight comparison protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BenchProfile {
    Desk,
    Paper,
}

impl BenchProfile {
    pub fn apply(self, cfg: &mut BenchConfig) {
        match self {
            BenchProfile::Desk => {
                cfg.runs = 5;
                cfg.optimizer.population = 50;
                cfg.optimizer.iterations = 100;
            }
            BenchProfile::Paper => {
                cfg.runs = 30;
                cfg.optimizer.population = 150;
                cfg.optimizer.iterations = 300;
            }
        }
    }
}

impl FromStr for BenchProfile {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "desk" => Ok(BenchProfile::Desk),
            "paper" => Ok(BenchProfile::Paper),
            other => Err(BenchError::BadConfig(format!(
                "unknown profile {other:?} (expected desk or paper)"
            ))),
        }
    }
}

/// One independent optimizer run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub algorithm: Algorithm,
    pub run_index: usize,
    pub seed: u64,
    pub best_cost_usd: f64,
    pub best_design: DesignVector,
    pub evaluations: u64,
    pub non_finite_evaluations: u64,
    pub wall_time_s: f64,
    /// Populated when the run failed; its statistics are then excluded.
    pub error: Option<String>,
}

/// Aggregate over one algorithm's runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmSummary {
    pub algorithm: Algorithm,
    pub best_cost_usd: f64,
    pub mean_cost_usd: f64,
    /// Population standard deviation (n divisor); 0 for a single run.
    pub std_dev_usd: f64,
    pub best_design: DesignVector,
    /// Reliability and annual served energy of the best design, from a
    /// fresh simulation.
    pub best_lpsp: f64,
    pub annual_energy_kwh: f64,
    /// Element-wise mean of the runs' best-so-far traces.
    pub mean_convergence: Vec<f64>,
    /// 100·(best − overall_min)/overall_min at full precision (the
    /// exported table rounds to 2 decimals); 0 exactly for the winner.
    pub percent_difference: f64,
    pub payback_days: Option<f64>,
    pub payback: Option<String>,
    pub seeds: Vec<u64>,
    /// Summed run time across this algorithm's runs (CPU-facing, not
    /// wall-clock of the pool).
    pub run_time_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub scenario: String,
    pub master_seed: u64,
    pub population: usize,
    pub iterations: usize,
    pub runs: usize,
    pub config_digest: u64,
    /// Summaries in the configured algorithm order.
    pub algorithms: Vec<AlgorithmSummary>,
    /// Every run, ordered by (algorithm position, run index).
    pub run_records: Vec<RunRecord>,
    /// True when at least one run failed and statistics are incomplete.
    pub partial: bool,
    pub wall_time_s: f64,
}

impl BenchReport {
    /// Copy with every timing field zeroed — what two reports must agree
    /// on when only parallelism or machine speed differed.
    pub fn strip_timing(&self) -> BenchReport {
        let mut stripped = self.clone();
        stripped.wall_time_s = 0.0;
        for s in &mut stripped.algorithms {
            s.run_time_s = 0.0;
        }
        for r in &mut stripped.run_records {
            r.wall_time_s = 0.0;
        }
        stripped
    }
}

/// Percent distance of each cost from the cheapest one, rounded to two
/// decimals. Errors on an empty mapping or non-positive costs.
pub fn percent_difference(
    costs: &BTreeMap<Algorithm, f64>,
) -> Result<BTreeMap<Algorithm, f64>, BenchError> {
    if costs.is_empty() {
        return Err(BenchError::BadConfig(
            "percent_difference over an empty mapping".to_string(),
        ));
    }
    let mut min = f64::INFINITY;
    for (alg, &c) in costs {
        if !(c > 0.0) {
            return Err(BenchError::BadConfig(format!(
                "cost for {alg} must be positive, got {c}"
            )));
        }
        min = min.min(c);
    }
    Ok(costs
        .iter()
        .map(|(&alg, &c)| (alg, round2(100.0 * (c - min) / min)))
        .collect())
}

fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

/// Render a day count as `"Xyears Ymonths Zdays"` (year = 365 days,
/// month = 30.42 days, all unit words plural). Errors on negative input.
pub fn format_duration(days: f64) -> Result<String, BenchError> {
    if !(days >= 0.0) {
        return Err(BenchError::BadConfig(format!(
            "duration must be non-negative, got {days}"
        )));
    }
    const MONTH_DAYS: f64 = 30.42;
    let years = (days / 365.0).floor();
    let after_years = days - years * 365.0;
    let months = (after_years / MONTH_DAYS).floor();
    let rest = (after_years - months * MONTH_DAYS).floor();
    Ok(format!("{years:.0}years {months:.0}months {rest:.0}days"))
}

/// Execute the full protocol: `cfg.runs` independent minimize calls per
/// algorithm (seeded from the master seed, the algorithm tag, and the run
/// index), then aggregation. The result is independent of `parallelism`.
pub fn run_benchmark(
    cfg: &BenchConfig,
    scenario: &ScenarioData,
    catalog: &ComponentCatalog,
    econ: &EconConfig,
) -> Result<BenchReport, BenchError> {
    if cfg.runs < 1 {
        return Err(BenchError::BadConfig("runs must be at least 1".to_string()));
    }
    if cfg.algorithms.is_empty() {
        return Err(BenchError::BadConfig("algorithm list is empty".to_string()));
    }
    {
        let mut seen = cfg.algorithms.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != cfg.algorithms.len() {
            return Err(BenchError::BadConfig(
                "algorithm list contains duplicates".to_string(),
            ));
        }
    }
    if cfg.space.dim() != crate::dispatch::DESIGN_DIM {
        return Err(BenchError::BadConfig(format!(
            "search space has {} dimensions, designs have {}",
            cfg.space.dim(),
            crate::dispatch::DESIGN_DIM
        )));
    }
    // Surface scenario/catalog problems once, rather than as a wall of
    // +inf fitness values.
    let mut probe = cfg.space.lower.clone();
    cfg.space.repair(&mut probe);
    fitness(
        &DesignVector::from_position(&probe),
        scenario,
        catalog,
        econ,
        &cfg.fitness,
    )
    .map_err(|e| BenchError::BadInputs(e.to_string()))?;

    let objective = |x: &[f64]| -> f64 {
        match fitness(
            &DesignVector::from_position(x),
            scenario,
            catalog,
            econ,
            &cfg.fitness,
        ) {
            Ok(v) => v,
            Err(_) => f64::INFINITY,
        }
    };

    let started = Instant::now();
    let jobs: Vec<(usize, usize, u64)> = cfg
        .algorithms
        .iter()
        .enumerate()
        .flat_map(|(ai, alg)| {
            (0..cfg.runs)
                .map(move |run| (ai, run, seeding::derive_named(cfg.optimizer.seed, alg.tag(), run as u64)))
        })
        .collect();

    let execute = |&(ai, run, seed): &(usize, usize, u64)| -> (RunRecord, Vec<f64>) {
        let algorithm = cfg.algorithms[ai];
        let run_config = OptimizerConfig {
            population: cfg.optimizer.population,
            iterations: cfg.optimizer.iterations,
            seed,
            algorithm,
            algorithm_params: cfg.optimizer.algorithm_params.clone(),
        };
        match minimize(objective, &cfg.space, &run_config) {
            Ok(result) => (
                RunRecord {
                    algorithm,
                    run_index: run,
                    seed,
                    best_cost_usd: result.best_fitness,
                    best_design: DesignVector::from_position(&result.best_position),
                    evaluations: result.evaluations,
                    non_finite_evaluations: result.non_finite_evaluations,
                    wall_time_s: result.wall_time_s,
                    error: None,
                },
                result.convergence,
            ),
            Err(e) => (
                RunRecord {
                    algorithm,
                    run_index: run,
                    seed,
                    best_cost_usd: f64::INFINITY,
                    best_design: DesignVector::from_position(&probe),
                    evaluations: 0,
                    non_finite_evaluations: 0,
                    wall_time_s: 0.0,
                    error: Some(e.to_string()),
                },
                Vec::new(),
            ),
        }
    };

    // The reduction is order-fixed: results come back keyed by job index
    // regardless of which worker finished first.
    let outcomes: Vec<(RunRecord, Vec<f64>)> = if cfg.parallelism == 1 {
        jobs.iter().map(execute).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.parallelism) // 0 lets the pool pick
            .build()
            .map_err(|e| BenchError::BadConfig(format!("thread pool: {e}")))?;
        pool.install(|| jobs.par_iter().map(execute).collect())
    };
    let (run_records, traces): (Vec<RunRecord>, Vec<Vec<f64>>) = outcomes.into_iter().unzip();
    let partial = run_records.iter().any(|r| r.error.is_some());

    let mut summaries = Vec::with_capacity(cfg.algorithms.len());
    let mut best_costs = BTreeMap::new();
    for &algorithm in &cfg.algorithms {
        let indices: Vec<usize> = (0..run_records.len())
            .filter(|&k| run_records[k].algorithm == algorithm && run_records[k].error.is_none())
            .collect();
        if indices.is_empty() {
            return Err(BenchError::BadInputs(format!(
                "every run of {algorithm} failed"
            )));
        }
        let best = indices
            .iter()
            .map(|&k| &run_records[k])
            .min_by(|a, b| a.best_cost_usd.total_cmp(&b.best_cost_usd))
            .expect("non-empty");
        let costs: Vec<f64> = indices.iter().map(|&k| run_records[k].best_cost_usd).collect();
        let mean = costs.iter().sum::<f64>() / costs.len() as f64;
        let variance =
            costs.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / costs.len() as f64;

        let mut mean_convergence = vec![0.0; cfg.optimizer.iterations];
        for &k in &indices {
            for (slot, value) in mean_convergence.iter_mut().zip(&traces[k]) {
                *slot += value;
            }
        }
        mean_convergence
            .iter_mut()
            .for_each(|v| *v /= indices.len() as f64);

        best_costs.insert(algorithm, best.best_cost_usd);
        summaries.push(AlgorithmSummary {
            algorithm,
            best_cost_usd: best.best_cost_usd,
            mean_cost_usd: mean,
            std_dev_usd: variance.sqrt(),
            best_design: best.best_design,
            best_lpsp: f64::NAN, // filled below
            annual_energy_kwh: f64::NAN,
            mean_convergence,
            percent_difference: f64::NAN,
            payback_days: None,
            payback: None,
            seeds: run_records
                .iter()
                .filter(|r| r.algorithm == algorithm)
                .map(|r| r.seed)
                .collect(),
            run_time_s: run_records
                .iter()
                .filter(|r| r.algorithm == algorithm)
                .map(|r| r.wall_time_s)
                .sum(),
        });
    }

    // The stored percent difference keeps full precision so that exactly
    // one algorithm — the overall winner — sits at 0.0 even when the
    // runners-up are within display rounding of it; the exported table
    // rounds to two decimals.
    let min_cost = best_costs.values().fold(f64::INFINITY, |m, &c| m.min(c));
    for summary in &mut summaries {
        summary.percent_difference = 100.0 * (summary.best_cost_usd - min_cost) / min_cost;
        let sim = simulate_year(
            &summary.best_design,
            scenario,
            catalog,
            &cfg.fitness.simulation,
        )
        .map_err(|e| BenchError::BadInputs(e.to_string()))?;
        summary.best_lpsp = sim.lpsp;
        summary.annual_energy_kwh = sim.energy_served_wh / 1000.0;
        summary.payback_days = payback_period_days(
            summary.best_cost_usd,
            summary.annual_energy_kwh,
            econ.tariff_usd_per_kwh,
        );
        summary.payback = match summary.payback_days {
            Some(d) => Some(format_duration(d)?),
            None => None,
        };
    }

    Ok(BenchReport {
        scenario: cfg.scenario.clone(),
        master_seed: cfg.optimizer.seed,
        population: cfg.optimizer.population,
        iterations: cfg.optimizer.iterations,
        runs: cfg.runs,
        config_digest: cfg.digest(),
        algorithms: summaries,
        run_records,
        partial,
        wall_time_s: started.elapsed().as_secs_f64(),
    })
}

/// Write the report's tables into `dir`: `summary.csv` (cost statistics
/// and percent differences), `sizing.csv` (best design per algorithm),
/// `profitability.csv` (payback), one `convergence_{TAG}.csv` per
/// algorithm, and `report.json` (the whole report). Every file is
/// timing-free, so re-exporting the same configuration's report yields
/// byte-identical output. Returns the written paths.
pub fn export_report(report: &BenchReport, dir: &Path) -> Result<Vec<PathBuf>, BenchError> {
    if report.algorithms.is_empty() {
        return Err(BenchError::BadConfig(
            "report has no algorithm summaries".to_string(),
        ));
    }
    fs::create_dir_all(dir).map_err(|e| BenchError::Io {
        path: dir.display().to_string(),
        source: e,
    })?;
    let mut files = Vec::new();

    let mut summary =
        String::from("algorithm,best_cost_usd,mean_cost_usd,std_dev_usd,percent_difference\n");
    for s in &report.algorithms {
        let _ = writeln!(
            summary,
            "{},{:.2},{:.2},{:.2},{:.2}",
            s.algorithm, s.best_cost_usd, s.mean_cost_usd, s.std_dev_usd, s.percent_difference
        );
    }
    files.push(write_file(dir, "summary.csv", &summary)?);

    let mut sizing = String::from(
        "algorithm,best_cost_usd,n_wg,n_pv,n_bat_parallel,tilt_deg,hub_height_m,n_bio,lpsp\n",
    );
    for s in &report.algorithms {
        let d = &s.best_design;
        let _ = writeln!(
            sizing,
            "{},{:.2},{},{},{},{:.4},{:.4},{},{:.6}",
            s.algorithm,
            s.best_cost_usd,
            d.n_wg,
            d.n_pv,
            d.n_bat_parallel,
            d.tilt_deg,
            d.hub_height_m,
            d.n_bio,
            s.best_lpsp
        );
    }
    files.push(write_file(dir, "sizing.csv", &sizing)?);

    let mut profitability =
        String::from("algorithm,best_cost_usd,annual_energy_kwh,payback_days,payback\n");
    for s in &report.algorithms {
        let days = s
            .payback_days
            .map(|d| format!("{d:.2}"))
            .unwrap_or_default();
        let _ = writeln!(
            profitability,
            "{},{:.2},{:.3},{},{}",
            s.algorithm,
            s.best_cost_usd,
            s.annual_energy_kwh,
            days,
            s.payback.as_deref().unwrap_or("")
        );
    }
    files.push(write_file(dir, "profitability.csv", &profitability)?);

    for s in &report.algorithms {
        let mut convergence = String::from("iteration,mean_best_cost_usd\n");
        for (i, v) in s.mean_convergence.iter().enumerate() {
            let _ = writeln!(convergence, "{},{:.6}", i + 1, v);
        }
        files.push(write_file(
            dir,
            &format!("convergence_{}.csv", s.algorithm),
            &convergence,
        )?);
    }

    let json = serde_json::to_string_pretty(&report.strip_timing())
        .expect("report serializes")
        + "\n";
    files.push(write_file(dir, "report.json", &json)?);
    Ok(files)
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, BenchError> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| BenchError::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    Ok(path)
}
