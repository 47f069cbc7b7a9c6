//! Gazelle search: Brownian grazing around the elite while no predator is
//! sensed, Lévy-driven flight (front half of the herd) and elite-centered
//! Brownian regrouping (rear half) when one is, followed by a
//! predator-success sweep that either relocates a member inside the
//! bounds or swaps it along the line between two random herd members.
//! Every move is kept only if it improves the member.
//!
//! `algorithm_params` keys and defaults: `grazing_speed` (0.88),
//! `top_speed` (0.88), `levy_scale` (0.05), `predator_success_rate`
//! (0.34).

use rand::Rng;

use super::{StepCtx, Swarm};

pub(crate) fn step<F: Fn(&[f64]) -> f64>(swarm: &mut Swarm, ctx: &mut StepCtx<'_>, obj: &F) {
    let d = swarm.dim();
    let n = swarm.len();
    let grazing_speed = ctx.param("grazing_speed", 0.88);
    let top_speed = ctx.param("top_speed", 0.88);
    let levy_scale = ctx.param("levy_scale", 0.05);
    let psr = ctx.param("predator_success_rate", 0.34);

    let t1 = (ctx.t + 1) as f64;
    let t_max = ctx.t_max as f64;
    // cumulative-decay factor: near 1 early, 0 at the end
    let cf = (1.0 - t1 / t_max).powf(2.0 * t1 / t_max);
    // direction changer flips every iteration
    let mu = if (ctx.t + 1) % 2 == 0 { -1.0 } else { 1.0 };
    let elite = swarm.best_position.clone();
    let predator_spotted = ctx.rng.gen::<f64>() <= 0.5;

    for i in 0..n {
        let x = swarm.positions[i].clone();
        let candidate: Vec<f64> = if !predator_spotted {
            // graze: Brownian drift toward the elite
            (0..d)
                .map(|j| {
                    let r: f64 = ctx.rng.gen();
                    let rb = ctx.normal();
                    x[j] + grazing_speed * r * rb * (elite[j] - rb * x[j])
                })
                .collect()
        } else if i < n / 2 {
            // flee: Lévy sprint relative to the elite
            (0..d)
                .map(|j| {
                    let r: f64 = ctx.rng.gen();
                    let rl = levy_scale * super::levy_sample(ctx.rng);
                    x[j] + top_speed * mu * r * rl * (elite[j] - rl * x[j])
                })
                .collect()
        } else {
            // regroup: Brownian step taken from the elite, shrinking with cf
            (0..d)
                .map(|j| {
                    let rb = ctx.normal();
                    elite[j] + top_speed * mu * cf * rb * (rb * elite[j] - x[j])
                })
                .collect()
        };
        swarm.try_improve(ctx.space, obj, i, candidate);
    }

    // predator-success sweep: relocate inside the box or swap along the
    // line between two random members
    for i in 0..n {
        let x = swarm.positions[i].clone();
        let candidate: Vec<f64> = if ctx.rng.gen::<f64>() < psr {
            (0..d)
                .map(|j| {
                    let r: f64 = ctx.rng.gen();
                    let flag = if ctx.rng.gen::<f64>() < psr { 1.0 } else { 0.0 };
                    x[j] + cf
                        * (ctx.space.lower[j] + r * (ctx.space.upper[j] - ctx.space.lower[j]))
                        * flag
                })
                .collect()
        } else {
            let r: f64 = ctx.rng.gen();
            let a = ctx.rng.gen_range(0..n);
            let b = ctx.rng.gen_range(0..n);
            let scale = psr * (1.0 - r) + r;
            (0..d)
                .map(|j| x[j] + scale * (swarm.positions[a][j] - swarm.positions[b][j]))
                .collect()
        };
        swarm.try_improve(ctx.space, obj, i, candidate);
    }
}
