//! Bound-constrained, mixed-integer-aware minimization by population
//! metaheuristics.
//!
//! Seven algorithms share one harness: positions live in a continuous box,
//! integer-masked dimensions are rounded to the lattice at every evaluation
//! and state commit, a non-finite objective value becomes `+inf` (and is
//! counted) instead of crashing, and the best-so-far fitness is recorded
//! after every iteration, so convergence traces are monotone by
//! construction. Runs are pure functions of `(objective, space, config)`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

mod aquila;
mod dandelion;
mod gazelle;
mod osprey;
mod pelican;
mod pso;
mod zebra;

#[derive(Debug, Error, PartialEq)]
pub enum OptimizeError {
    #[error("invalid search space: {0}")]
    BadSpace(String),
    #[error("invalid optimizer config: {0}")]
    BadConfig(String),
    #[error("unknown algorithm {0:?} (expected one of pso, ao, poa, doa, goa, zoa, ooa)")]
    UnknownAlgorithm(String),
}

/// Box bounds plus the integer lattice mask. Masked dimensions only ever
/// take integer values at evaluation and commit time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchSpace {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub integer_mask: Vec<bool>,
}

impl SearchSpace {
    pub fn new(
        lower: Vec<f64>,
        upper: Vec<f64>,
        integer_mask: Vec<bool>,
    ) -> Result<Self, OptimizeError> {
        if lower.len() != upper.len() || lower.len() != integer_mask.len() {
            return Err(OptimizeError::BadSpace(format!(
                "bounds/mask lengths differ: {}/{}/{}",
                lower.len(),
                upper.len(),
                integer_mask.len()
            )));
        }
        if lower.is_empty() {
            return Err(OptimizeError::BadSpace("zero dimensions".to_string()));
        }
        for i in 0..lower.len() {
            if !(lower[i] < upper[i]) || !lower[i].is_finite() || !upper[i].is_finite() {
                return Err(OptimizeError::BadSpace(format!(
                    "dimension {i}: need finite lower < upper, got {}..{}",
                    lower[i], upper[i]
                )));
            }
            if integer_mask[i] && lower[i].ceil() > upper[i].floor() {
                return Err(OptimizeError::BadSpace(format!(
                    "dimension {i}: no integer inside {}..{}",
                    lower[i], upper[i]
                )));
            }
        }
        Ok(Self {
            lower,
            upper,
            integer_mask,
        })
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    /// Pull a position back into the box; masked dimensions land on the
    /// nearest integer inside the bounds. Non-finite coordinates are
    /// replaced by the nearest bound (NaN by the lower).
    pub fn repair(&self, x: &mut [f64]) {
        for i in 0..x.len() {
            let (lo, hi) = (self.lower[i], self.upper[i]);
            let mut v = x[i];
            if v.is_nan() {
                v = lo;
            }
            v = v.clamp(lo, hi);
            if self.integer_mask[i] {
                v = v.round().clamp(lo.ceil(), hi.floor());
            }
            x[i] = v;
        }
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let mut x: Vec<f64> = (0..self.dim())
            .map(|i| rng.gen_range(self.lower[i]..=self.upper[i]))
            .collect();
        self.repair(&mut x);
        x
    }
}

/// The seven search algorithms, named by their customary abbreviations:
/// particle swarm (`pso`), aquila (`ao`), pelican (`poa`), dandelion
/// (`doa`), gazelle (`goa`), zebra (`zoa`), and osprey (`ooa`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Pso,
    Ao,
    Poa,
    Doa,
    Goa,
    Zoa,
    Ooa,
}

impl Algorithm {
    pub const ALL: [Algorithm; 7] = [
        Algorithm::Pso,
        Algorithm::Ao,
        Algorithm::Poa,
        Algorithm::Doa,
        Algorithm::Goa,
        Algorithm::Zoa,
        Algorithm::Ooa,
    ];

    /// Uppercase tag used in reports and file names.
    pub fn tag(self) -> &'static str {
        match self {
            Algorithm::Pso => "PSO",
            Algorithm::Ao => "AO",
            Algorithm::Poa => "POA",
            Algorithm::Doa => "DOA",
            Algorithm::Goa => "GOA",
            Algorithm::Zoa => "ZOA",
            Algorithm::Ooa => "OOA",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Algorithm {
    type Err = OptimizeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "pso" => Ok(Algorithm::Pso),
            "ao" => Ok(Algorithm::Ao),
            "poa" => Ok(Algorithm::Poa),
            "doa" => Ok(Algorithm::Doa),
            "goa" => Ok(Algorithm::Goa),
            "zoa" => Ok(Algorithm::Zoa),
            "ooa" => Ok(Algorithm::Ooa),
            other => Err(OptimizeError::UnknownAlgorithm(other.to_string())),
        }
    }
}

/// One run's budget, seed, algorithm choice, and tuning overrides.
/// Unrecognized `algorithm_params` keys are ignored by the algorithms;
/// each module documents the keys it reads and their defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerConfig {
    pub population: usize,
    pub iterations: usize,
    pub seed: u64,
    pub algorithm: Algorithm,
    pub algorithm_params: BTreeMap<String, f64>,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            population: 150,
            iterations: 300,
            seed: 1,
            algorithm: Algorithm::Pso,
            algorithm_params: BTreeMap::new(),
        }
    }
}

/// Outcome of one independent minimize run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub best_position: Vec<f64>,
    pub best_fitness: f64,
    /// Best-so-far fitness after each iteration; monotone non-increasing.
    pub convergence: Vec<f64>,
    pub evaluations: u64,
    /// Objective calls that returned a non-finite value (scored `+inf`).
    pub non_finite_evaluations: u64,
    pub wall_time_s: f64,
}

/// Uniformly sample `n` positions inside the space (integer dimensions on
/// the lattice). Deterministic for a given generator state.
pub fn init_population(space: &SearchSpace, n: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    (0..n).map(|_| space.sample(rng)).collect()
}

/// Population state shared by every algorithm: repaired positions, their
/// fitnesses, and elitist best bookkeeping.
pub(crate) struct Swarm {
    pub positions: Vec<Vec<f64>>,
    pub fitness: Vec<f64>,
    pub best_position: Vec<f64>,
    pub best_fitness: f64,
    pub evaluations: u64,
    pub non_finite: u64,
}

impl Swarm {
    fn new<F: Fn(&[f64]) -> f64>(space: &SearchSpace, n: usize, rng: &mut ChaCha8Rng, obj: &F) -> Self {
        let positions = init_population(space, n, rng);
        let mut swarm = Self {
            fitness: vec![f64::INFINITY; n],
            best_position: positions[0].clone(),
            best_fitness: f64::INFINITY,
            positions,
            evaluations: 0,
            non_finite: 0,
        };
        for i in 0..n {
            let x = swarm.positions[i].clone();
            swarm.fitness[i] = swarm.score(obj, &x);
        }
        swarm
    }

    /// Evaluate an already-repaired position, mapping non-finite objective
    /// values to `+inf` and updating the global best.
    pub fn score<F: Fn(&[f64]) -> f64>(&mut self, obj: &F, x: &[f64]) -> f64 {
        let mut f = obj(x);
        self.evaluations += 1;
        if !f.is_finite() {
            f = f64::INFINITY;
            self.non_finite += 1;
        }
        if f < self.best_fitness {
            self.best_fitness = f;
            self.best_position = x.to_vec();
        }
        f
    }

    /// Repair and evaluate a candidate for member `i`, keeping it only if
    /// it improves on the member's current fitness.
    pub fn try_improve<F: Fn(&[f64]) -> f64>(
        &mut self,
        space: &SearchSpace,
        obj: &F,
        i: usize,
        mut candidate: Vec<f64>,
    ) {
        space.repair(&mut candidate);
        let f = self.score(obj, &candidate);
        if f < self.fitness[i] {
            self.positions[i] = candidate;
            self.fitness[i] = f;
        }
    }

    /// Repair, evaluate, and unconditionally commit a candidate for member
    /// `i` (generational replacement).
    pub fn commit<F: Fn(&[f64]) -> f64>(
        &mut self,
        space: &SearchSpace,
        obj: &F,
        i: usize,
        mut candidate: Vec<f64>,
    ) {
        space.repair(&mut candidate);
        let f = self.score(obj, &candidate);
        self.positions[i] = candidate;
        self.fitness[i] = f;
    }

    pub fn dim(&self) -> usize {
        self.best_position.len()
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    /// Coordinate-wise mean of the population.
    pub fn mean_position(&self) -> Vec<f64> {
        let d = self.dim();
        let mut mean = vec![0.0; d];
        for p in &self.positions {
            for j in 0..d {
                mean[j] += p[j];
            }
        }
        let n = self.len() as f64;
        mean.iter_mut().for_each(|m| *m /= n);
        mean
    }
}

/// Iteration context handed to each algorithm step.
pub(crate) struct StepCtx<'a> {
    pub space: &'a SearchSpace,
    pub rng: &'a mut ChaCha8Rng,
    /// Zero-based iteration index.
    pub t: usize,
    /// Total iteration count.
    pub t_max: usize,
    pub params: &'a BTreeMap<String, f64>,
}

impl StepCtx<'_> {
    /// Fraction of the run completed after this iteration, in (0, 1].
    pub fn progress(&self) -> f64 {
        (self.t + 1) as f64 / self.t_max as f64
    }

    pub fn param(&self, key: &str, default: f64) -> f64 {
        self.params.get(key).copied().unwrap_or(default)
    }

    /// One standard normal draw.
    pub fn normal(&mut self) -> f64 {
        StandardNormal.sample(self.rng)
    }

    /// Heavy-tailed Lévy flight vector (Mantegna construction, β = 1.5).
    pub fn levy_vec(&mut self, d: usize) -> Vec<f64> {
        (0..d).map(|_| levy_sample(self.rng)).collect()
    }

    /// A uniformly random position inside the bounds (not repaired).
    pub fn random_position(&mut self) -> Vec<f64> {
        (0..self.space.dim())
            .map(|i| self.rng.gen_range(self.space.lower[i]..=self.space.upper[i]))
            .collect()
    }
}

/// Mantegna scale for β = 1.5:
/// `(Γ(1+β)·sin(πβ/2) / (Γ((1+β)/2)·β·2^((β−1)/2)))^(1/β)`.
pub(crate) const LEVY_SIGMA_U: f64 = 0.696_574_502_557_696_7;
const LEVY_BETA: f64 = 1.5;

/// One heavy-tailed step: `u / |v|^(1/β)` with `u ~ N(0, σ_u)`, `v ~ N(0,1)`.
pub(crate) fn levy_sample(rng: &mut ChaCha8Rng) -> f64 {
    let u: f64 = {
        let z: f64 = StandardNormal.sample(rng);
        z * LEVY_SIGMA_U
    };
    let v: f64 = StandardNormal.sample(rng);
    u / v.abs().powf(1.0 / LEVY_BETA)
}

/// Run one full minimization: seeded init plus `iterations` generation
/// updates of the configured algorithm. Deterministic given the seed.
pub fn minimize<F: Fn(&[f64]) -> f64>(
    objective: F,
    space: &SearchSpace,
    config: &OptimizerConfig,
) -> Result<RunResult, OptimizeError> {
    if config.population < 2 {
        return Err(OptimizeError::BadConfig(format!(
            "population {} below 2",
            config.population
        )));
    }
    if config.iterations < 1 {
        return Err(OptimizeError::BadConfig("iterations below 1".to_string()));
    }
    // Re-validate the space so hand-built structs get the same checks.
    SearchSpace::new(
        space.lower.clone(),
        space.upper.clone(),
        space.integer_mask.clone(),
    )?;

    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut swarm = Swarm::new(space, config.population, &mut rng, &objective);
    let mut pso_state = (config.algorithm == Algorithm::Pso)
        .then(|| pso::State::new(&swarm, space, &mut rng));

    let mut convergence = Vec::with_capacity(config.iterations);
    for t in 0..config.iterations {
        let mut ctx = StepCtx {
            space,
            rng: &mut rng,
            t,
            t_max: config.iterations,
            params: &config.algorithm_params,
        };
        match config.algorithm {
            Algorithm::Pso => pso::step(
                pso_state.as_mut().expect("state built for PSO above"),
                &mut swarm,
                &mut ctx,
                &objective,
            ),
            Algorithm::Ao => aquila::step(&mut swarm, &mut ctx, &objective),
            Algorithm::Poa => pelican::step(&mut swarm, &mut ctx, &objective),
            Algorithm::Doa => dandelion::step(&mut swarm, &mut ctx, &objective),
            Algorithm::Goa => gazelle::step(&mut swarm, &mut ctx, &objective),
            Algorithm::Zoa => zebra::step(&mut swarm, &mut ctx, &objective),
            Algorithm::Ooa => osprey::step(&mut swarm, &mut ctx, &objective),
        }
        convergence.push(swarm.best_fitness);
    }

    Ok(RunResult {
        best_position: swarm.best_position,
        best_fitness: swarm.best_fitness,
        convergence,
        evaluations: swarm.evaluations,
        non_finite_evaluations: swarm.non_finite,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sphere(x: &[f64]) -> f64 {
        x.iter().map(|v| v * v).sum()
    }

    fn box_space(dim: usize, lo: f64, hi: f64) -> SearchSpace {
        SearchSpace::new(vec![lo; dim], vec![hi; dim], vec![false; dim]).unwrap()
    }

    #[test]
    fn search_space_validation() {
        assert!(SearchSpace::new(vec![0.0], vec![1.0], vec![false]).is_ok());
        assert!(SearchSpace::new(vec![1.0], vec![1.0], vec![false]).is_err());
        assert!(SearchSpace::new(vec![0.0], vec![1.0, 2.0], vec![false]).is_err());
        assert!(SearchSpace::new(vec![], vec![], vec![]).is_err());
        assert!(SearchSpace::new(vec![f64::NAN], vec![1.0], vec![false]).is_err());
        // no integer inside (0.2, 0.7)
        assert!(SearchSpace::new(vec![0.2], vec![0.7], vec![true]).is_err());
        assert!(SearchSpace::new(vec![0.2], vec![1.7], vec![true]).is_ok());
    }

    #[test]
    fn repair_clamps_rounds_and_heals_non_finite() {
        let space = SearchSpace::new(
            vec![0.0, -5.0, 1.2],
            vec![10.0, 5.0, 7.8],
            vec![true, false, true],
        )
        .unwrap();
        let mut x = [11.3, -6.0, 7.7];
        space.repair(&mut x);
        assert_eq!(x, [10.0, -5.0, 7.0]);
        let mut x = [2.5, f64::NAN, 1.3];
        space.repair(&mut x);
        assert_eq!(x[1], -5.0);
        assert_eq!(x[2], 2.0); // 1.3 clamps to 1.3, rounds to 1, lattice floor is 2
        let mut x = [f64::INFINITY, 0.0, 5.0];
        space.repair(&mut x);
        assert_eq!(x[0], 10.0);
    }

    #[test]
    fn init_population_is_uniform_and_deterministic() {
        let space = box_space(1, 0.0, 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let pop = init_population(&space, 10_000, &mut rng);
        let mean: f64 = pop.iter().map(|p| p[0]).sum::<f64>() / 10_000.0;
        assert!((mean - 0.5).abs() < 0.02, "mean {mean}");

        let mut rng_a = ChaCha8Rng::seed_from_u64(4);
        let mut rng_b = ChaCha8Rng::seed_from_u64(4);
        assert_eq!(
            init_population(&space, 50, &mut rng_a),
            init_population(&space, 50, &mut rng_b)
        );

        // 1-wide integer dimension collapses to the single lattice point
        let degenerate =
            SearchSpace::new(vec![2.6], vec![3.4], vec![true]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for p in init_population(&degenerate, 20, &mut rng) {
            assert_eq!(p[0], 3.0);
        }
    }

    #[test]
    fn algorithm_tags_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.tag().parse::<Algorithm>().unwrap(), a);
            assert_eq!(a.tag().to_lowercase().parse::<Algorithm>().unwrap(), a);
        }
        assert!("nope".parse::<Algorithm>().is_err());
    }

    #[test]
    fn minimize_validates_inputs() {
        let space = box_space(2, -1.0, 1.0);
        let bad_pop = OptimizerConfig {
            population: 1,
            ..OptimizerConfig::default()
        };
        assert!(minimize(sphere, &space, &bad_pop).is_err());
        let bad_iter = OptimizerConfig {
            iterations: 0,
            ..OptimizerConfig::default()
        };
        assert!(minimize(sphere, &space, &bad_iter).is_err());
    }

    #[test]
    fn every_algorithm_improves_is_deterministic_and_stays_in_bounds() {
        let space = SearchSpace::new(
            vec![-10.0, -10.0, 0.0],
            vec![10.0, 10.0, 8.0],
            vec![false, false, true],
        )
        .unwrap();
        for algorithm in Algorithm::ALL {
            let config = OptimizerConfig {
                population: 20,
                iterations: 60,
                seed: 11,
                algorithm,
                algorithm_params: BTreeMap::new(),
            };
            let a = minimize(sphere, &space, &config).unwrap();
            let b = minimize(sphere, &space, &config).unwrap();
            assert_eq!(a.best_position, b.best_position, "{algorithm} not deterministic");
            assert_eq!(a.convergence, b.convergence, "{algorithm} not deterministic");

            assert_eq!(a.convergence.len(), 60);
            assert!(
                a.convergence.windows(2).all(|w| w[1] <= w[0]),
                "{algorithm} trace not monotone"
            );
            assert_eq!(*a.convergence.last().unwrap(), a.best_fitness);
            assert!(
                a.best_fitness < 1.0,
                "{algorithm} failed to improve on sphere: {}",
                a.best_fitness
            );
            for (i, &v) in a.best_position.iter().enumerate() {
                assert!((space.lower[i]..=space.upper[i]).contains(&v), "{algorithm} out of bounds");
                if space.integer_mask[i] {
                    assert_eq!(v, v.round(), "{algorithm} left the integer lattice");
                }
            }
        }
    }

    #[test]
    fn integer_mask_lands_on_lattice_optimum() {
        // distance to an interior point; masked dims must settle on the
        // rounded lattice point
        let target = [3.0, -2.0, 0.4];
        let objective = move |x: &[f64]| -> f64 {
            x.iter()
                .zip(target.iter())
                .map(|(a, b)| (a - b) * (a - b))
                .sum()
        };
        let space = SearchSpace::new(
            vec![-5.0, -5.0, -5.0],
            vec![5.0, 5.0, 5.0],
            vec![true, true, false],
        )
        .unwrap();
        for algorithm in Algorithm::ALL {
            let config = OptimizerConfig {
                population: 25,
                iterations: 80,
                seed: 3,
                algorithm,
                algorithm_params: BTreeMap::new(),
            };
            let r = minimize(objective, &space, &config).unwrap();
            assert_eq!(r.best_position[0], 3.0, "{algorithm}");
            assert_eq!(r.best_position[1], -2.0, "{algorithm}");
            assert!((r.best_position[2] - 0.4).abs() < 0.2, "{algorithm}");
        }
    }

    #[test]
    fn non_finite_objectives_are_counted_not_fatal() {
        // a pit of NaN in half the space; the optimizer must still finish
        // with a finite best
        let objective = |x: &[f64]| -> f64 {
            if x[0] < 0.0 {
                f64::NAN
            } else {
                (x[0] - 1.0) * (x[0] - 1.0)
            }
        };
        let space = box_space(1, -10.0, 10.0);
        for algorithm in Algorithm::ALL {
            let config = OptimizerConfig {
                population: 15,
                iterations: 40,
                seed: 5,
                algorithm,
                algorithm_params: BTreeMap::new(),
            };
            let r = minimize(objective, &space, &config).unwrap();
            assert!(r.best_fitness.is_finite(), "{algorithm}");
            assert!(r.non_finite_evaluations > 0, "{algorithm} never hit the pit");
            assert!(r.best_fitness < 0.5, "{algorithm} best {}", r.best_fitness);
        }
    }

    #[test]
    fn levy_steps_are_symmetric_and_heavy_tailed() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let n = 200_000;
        let samples: Vec<f64> = (0..n).map(|_| levy_sample(&mut rng)).collect();
        let frac_positive = samples.iter().filter(|s| **s > 0.0).count() as f64 / n as f64;
        assert!((frac_positive - 0.5).abs() < 0.01);
        let frac_large = samples.iter().filter(|s| s.abs() > 10.0).count() as f64 / n as f64;
        // a Gaussian would put ~0 mass beyond 10 sigma; the Lévy tail keeps
        // a visible fraction
        assert!(frac_large > 0.005, "tail too light: {frac_large}");
    }
}
