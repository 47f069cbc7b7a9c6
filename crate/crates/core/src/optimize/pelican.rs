//! Pelican search: each iteration a random "prey" position is drawn and
//! scored, every member either advances on it (if the prey is better than
//! the member) or retreats from it, and then performs a shrinking local
//! surface sweep. Both moves are kept only when they improve the member.
//!
//! `algorithm_params` keys and defaults: `surface_coefficient` (0.2 —
//! amplitude of the local sweep, decaying linearly over the run).

use rand::Rng;

use super::{StepCtx, Swarm};

pub(crate) fn step<F: Fn(&[f64]) -> f64>(swarm: &mut Swarm, ctx: &mut StepCtx<'_>, obj: &F) {
    let d = swarm.dim();
    let n = swarm.len();
    let surface = ctx.param("surface_coefficient", 0.2);

    // one shared prey per iteration, scored like any other candidate
    let mut prey = ctx.random_position();
    ctx.space.repair(&mut prey);
    let prey_fitness = swarm.score(obj, &prey);

    for i in 0..n {
        // move toward promising prey, away from poor prey; the step
        // coefficient is one scalar draw per move
        let toward = prey_fitness < swarm.fitness[i];
        let intensity = 1.0 + ctx.rng.gen_range(0..2) as f64;
        let r: f64 = ctx.rng.gen();
        let x = swarm.positions[i].clone();
        let candidate: Vec<f64> = (0..d)
            .map(|j| {
                if toward {
                    x[j] + r * (prey[j] - intensity * x[j])
                } else {
                    x[j] + r * (x[j] - prey[j])
                }
            })
            .collect();
        swarm.try_improve(ctx.space, obj, i, candidate);

        // wing-beat sweep over the water surface: a uniform rescale of the
        // whole position, shrinking with progress
        let shrink = surface * (1.0 - ctx.progress());
        let r: f64 = ctx.rng.gen();
        let factor = 1.0 + shrink * (2.0 * r - 1.0);
        let candidate: Vec<f64> = swarm.positions[i].iter().map(|v| v * factor).collect();
        swarm.try_improve(ctx.space, obj, i, candidate);
    }
}
