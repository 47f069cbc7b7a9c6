//! Aquila search: two exploration moves for the first two-thirds of the
//! run (high soar toward the best/mean region, then a log-spiral contour
//! flight with Lévy steps around a random member) and two exploitation
//! moves after that (low descent into the bounded neighborhood of the
//! best, then a quality-weighted swoop). Candidates are kept greedily.
//!
//! `algorithm_params` keys and defaults: `descent_alpha` (0.1),
//! `descent_delta` (0.1), `spiral_radius` (10.0), `spiral_growth`
//! (0.00565), `spiral_angle_rate` (0.005).

use rand::Rng;
use std::f64::consts::PI;

use super::{StepCtx, Swarm};

pub(crate) fn step<F: Fn(&[f64]) -> f64>(swarm: &mut Swarm, ctx: &mut StepCtx<'_>, obj: &F) {
    let d = swarm.dim();
    let n = swarm.len();
    let alpha = ctx.param("descent_alpha", 0.1);
    let delta = ctx.param("descent_delta", 0.1);
    let spiral_radius = ctx.param("spiral_radius", 10.0);
    let spiral_growth = ctx.param("spiral_growth", 0.00565);
    let spiral_angle_rate = ctx.param("spiral_angle_rate", 0.005);

    let t1 = (ctx.t + 1) as f64;
    let t_max = ctx.t_max as f64;
    let explore = t1 <= t_max * 2.0 / 3.0;
    let mean = swarm.mean_position();
    let best = swarm.best_position.clone();

    for i in 0..n {
        let x = swarm.positions[i].clone();
        let candidate: Vec<f64> = if explore {
            if ctx.rng.gen::<f64>() < 0.5 {
                // high soar: shrink toward the best, offset by the swarm mean
                let r: f64 = ctx.rng.gen();
                (0..d)
                    .map(|j| best[j] * (1.0 - t1 / t_max) + (mean[j] - best[j] * r))
                    .collect()
            } else {
                // contour flight: Lévy-perturbed best plus a spiral around a
                // random member
                let other = swarm.positions[ctx.rng.gen_range(0..n)].clone();
                let levy = ctx.levy_vec(d);
                let r: f64 = ctx.rng.gen();
                (0..d)
                    .map(|j| {
                        let k = (j + 1) as f64;
                        let radius = spiral_radius + spiral_growth * k;
                        let theta = -spiral_angle_rate * k + 3.0 * PI / 2.0;
                        let y = radius * theta.cos();
                        let xs = radius * theta.sin();
                        best[j] * levy[j] + other[j] + (y - xs) * r
                    })
                    .collect()
            }
        } else if ctx.rng.gen::<f64>() < 0.5 {
            // low descent: probe the scaled box around the best/mean gap
            let ra: f64 = ctx.rng.gen();
            let rb: f64 = ctx.rng.gen();
            (0..d)
                .map(|j| {
                    (best[j] - mean[j]) * alpha - ra
                        + ((ctx.space.upper[j] - ctx.space.lower[j]) * rb + ctx.space.lower[j])
                            * delta
                })
                .collect()
        } else {
            // swoop: quality-function pull toward the best with decaying
            // Lévy noise
            let rq: f64 = ctx.rng.gen();
            let quality = t1.powf((2.0 * rq - 1.0) / (1.0 - t_max).powi(2));
            let g1 = 2.0 * ctx.rng.gen::<f64>() - 1.0;
            let g2 = 2.0 * (1.0 - t1 / t_max);
            let levy = ctx.levy_vec(d);
            let r: f64 = ctx.rng.gen();
            (0..d)
                .map(|j| quality * best[j] - g1 * x[j] * r - g2 * levy[j] + r * g1)
                .collect()
        };
        swarm.try_improve(ctx.space, obj, i, candidate);
    }
}
