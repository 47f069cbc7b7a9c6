//! Dandelion search: every member is carried through three seed-flight
//! stages per iteration — rising (a vortex lift toward a random spot on
//! clear days, a multiplicative local shrink on rainy days), descending
//! (Brownian drift against the population mean), and landing (a Lévy
//! settle around the elite). The composed position replaces the member
//! unconditionally; elitism lives in the global best bookkeeping.
//!
//! The rainy-day damping uses the simplified ramp `k = 1 − r·(t/T)`
//! rather than the full quadratic dome; both shrink from ~1 toward the
//! same floor and the simple form keeps the stage monotone in `t`.
//!
//! `algorithm_params` keys and defaults: `clear_day_threshold` (1.5 —
//! a standard normal draw below it selects the clear-day lift).

use rand::Rng;
use rand_distr::{Distribution, LogNormal};
use std::f64::consts::PI;

use super::{StepCtx, Swarm};

pub(crate) fn step<F: Fn(&[f64]) -> f64>(swarm: &mut Swarm, ctx: &mut StepCtx<'_>, obj: &F) {
    let d = swarm.dim();
    let n = swarm.len();
    let clear_threshold = ctx.param("clear_day_threshold", 1.5);

    let t1 = (ctx.t + 1) as f64;
    let t_max = ctx.t_max as f64;
    let lift_decay = (1.0 - t1 / t_max).powi(2);
    let delta = 2.0 * t1 / t_max;
    let log_normal = LogNormal::new(0.0, 1.0).expect("valid lognormal parameters");

    // weather is drawn once per iteration and shared by the population
    let clear_day = ctx.normal() < clear_threshold;
    let mean = swarm.mean_position();
    let elite = swarm.best_position.clone();

    for i in 0..n {
        let mut x = swarm.positions[i].clone();

        // rising
        if clear_day {
            let theta = ctx.rng.gen_range(-PI..PI);
            let vortex = (-theta).exp();
            let vx = vortex * theta.cos();
            let vy = vortex * theta.sin();
            let lift: f64 = log_normal.sample(ctx.rng);
            let target = ctx.random_position();
            let alpha = ctx.rng.gen::<f64>() * lift_decay;
            for j in 0..d {
                x[j] += alpha * vx * vy * lift * (target[j] - x[j]);
            }
        } else {
            let damping = 1.0 - ctx.rng.gen::<f64>() * (t1 / t_max);
            for v in x.iter_mut() {
                *v *= damping;
            }
        }

        // descending
        let alpha = ctx.rng.gen::<f64>() * lift_decay;
        let brownian = ctx.normal();
        for j in 0..d {
            x[j] -= alpha * brownian * (mean[j] - alpha * brownian * x[j]);
        }

        // landing
        let alpha = ctx.rng.gen::<f64>() * lift_decay;
        let levy = ctx.levy_vec(d);
        for j in 0..d {
            x[j] = elite[j] + levy[j] * alpha * (elite[j] - delta * x[j]);
        }

        swarm.commit(ctx.space, obj, i, x);
    }
}

#[cfg(test)]
mod tests {
    use crate::optimize::{minimize, Algorithm, OptimizerConfig, SearchSpace};
    use std::collections::BTreeMap;

    #[test]
    fn converges_on_sphere() {
        let sphere = |x: &[f64]| -> f64 { x.iter().map(|v| v * v).sum() };
        let space =
            SearchSpace::new(vec![-100.0; 3], vec![100.0; 3], vec![false; 3]).unwrap();
        let config = OptimizerConfig {
            population: 25,
            iterations: 150,
            seed: 10,
            algorithm: Algorithm::Doa,
            algorithm_params: BTreeMap::new(),
        };
        let r = minimize(sphere, &space, &config).unwrap();
        assert!(r.best_fitness < 1e-2, "best {}", r.best_fitness);
        // one generational sweep per iteration
        assert_eq!(r.evaluations, 25 + 150 * 25);
    }
}
