//! Zebra search: a foraging sweep pulls every member toward the pioneer
//! (current best), then a defense sweep either scatters a member in place
//! (escape, shrinking with progress) or converges it on a random herd
//! member (counterattack). Both sweeps keep candidates greedily.
//!
//! `algorithm_params` keys and defaults: `defense_mode_probability`
//! (0.5 — chance of the escape mode), `defense_step` (0.01 — escape
//! amplitude).

use rand::Rng;

use super::{StepCtx, Swarm};

pub(crate) fn step<F: Fn(&[f64]) -> f64>(swarm: &mut Swarm, ctx: &mut StepCtx<'_>, obj: &F) {
    let d = swarm.dim();
    let n = swarm.len();
    let escape_probability = ctx.param("defense_mode_probability", 0.5);
    let escape_step = ctx.param("defense_step", 0.01);

    // foraging: follow the pioneer; one scalar step coefficient per move
    let pioneer = swarm.best_position.clone();
    for i in 0..n {
        let intensity = 1.0 + ctx.rng.gen_range(0..2) as f64;
        let r: f64 = ctx.rng.gen();
        let x = swarm.positions[i].clone();
        let candidate: Vec<f64> = (0..d)
            .map(|j| x[j] + r * (pioneer[j] - intensity * x[j]))
            .collect();
        swarm.try_improve(ctx.space, obj, i, candidate);
    }

    // defense: escape in place or rally around a random member
    let remaining = 1.0 - ctx.progress();
    for i in 0..n {
        let x = swarm.positions[i].clone();
        let candidate: Vec<f64> = if ctx.rng.gen::<f64>() < escape_probability {
            let r: f64 = ctx.rng.gen();
            let factor = 1.0 + escape_step * (2.0 * r - 1.0) * remaining;
            x.iter().map(|v| v * factor).collect()
        } else {
            let ally = swarm.positions[ctx.rng.gen_range(0..n)].clone();
            let intensity = 1.0 + ctx.rng.gen_range(0..2) as f64;
            let r: f64 = ctx.rng.gen();
            (0..d)
                .map(|j| x[j] + r * (ally[j] - intensity * x[j]))
                .collect()
        };
        swarm.try_improve(ctx.space, obj, i, candidate);
    }
}
