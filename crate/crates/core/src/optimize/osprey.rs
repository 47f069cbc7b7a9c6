//! Osprey search: in the hunting sweep each member dives at a random
//! "fish" — a strictly better member, or the global best — and in the
//! carrying sweep it makes a small bounded adjustment whose radius decays
//! as `1/t`. Both sweeps keep candidates greedily. No tuning parameters.

use rand::Rng;

use super::{StepCtx, Swarm};

pub(crate) fn step<F: Fn(&[f64]) -> f64>(swarm: &mut Swarm, ctx: &mut StepCtx<'_>, obj: &F) {
    let d = swarm.dim();
    let n = swarm.len();

    // hunting: strike a randomly chosen better member (the best always
    // counts as one of the fish)
    for i in 0..n {
        let school: Vec<usize> = (0..n)
            .filter(|&k| swarm.fitness[k] < swarm.fitness[i])
            .collect();
        let pick = ctx.rng.gen_range(0..=school.len());
        let fish = if pick == school.len() {
            swarm.best_position.clone()
        } else {
            swarm.positions[school[pick]].clone()
        };
        let intensity = 1.0 + ctx.rng.gen_range(0..2) as f64;
        let r: f64 = ctx.rng.gen();
        let x = swarm.positions[i].clone();
        let candidate: Vec<f64> = (0..d)
            .map(|j| x[j] + r * (fish[j] - intensity * x[j]))
            .collect();
        swarm.try_improve(ctx.space, obj, i, candidate);
    }

    // carrying: settle into a better eating position with a 1/t radius
    let t1 = (ctx.t + 1) as f64;
    for i in 0..n {
        let r: f64 = ctx.rng.gen();
        let x = swarm.positions[i].clone();
        let candidate: Vec<f64> = (0..d)
            .map(|j| {
                x[j]
                    + (ctx.space.lower[j] + r * (ctx.space.upper[j] - ctx.space.lower[j])) / t1
            })
            .collect();
        swarm.try_improve(ctx.space, obj, i, candidate);
    }
}
