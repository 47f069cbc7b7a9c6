//! Particle swarm: velocity-driven flight with personal and global
//! memory, linearly decaying inertia, and per-dimension velocity caps.
//!
//! `algorithm_params` keys and defaults: `inertia_start` (0.9),
//! `inertia_end` (0.4), `cognitive` (2.0), `social` (2.0), and
//! `velocity_cap_fraction` (0.2 — cap as a fraction of each dimension's
//! range).

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{SearchSpace, StepCtx, Swarm};

pub(crate) struct State {
    velocities: Vec<Vec<f64>>,
    personal_best: Vec<Vec<f64>>,
    personal_best_fitness: Vec<f64>,
}

impl State {
    pub fn new(swarm: &Swarm, _space: &SearchSpace, _rng: &mut ChaCha8Rng) -> Self {
        Self {
            velocities: vec![vec![0.0; swarm.dim()]; swarm.len()],
            personal_best: swarm.positions.clone(),
            personal_best_fitness: swarm.fitness.clone(),
        }
    }
}

pub(crate) fn step<F: Fn(&[f64]) -> f64>(
    state: &mut State,
    swarm: &mut Swarm,
    ctx: &mut StepCtx<'_>,
    obj: &F,
) {
    let d = swarm.dim();
    let w_start = ctx.param("inertia_start", 0.9);
    let w_end = ctx.param("inertia_end", 0.4);
    let c1 = ctx.param("cognitive", 2.0);
    let c2 = ctx.param("social", 2.0);
    let cap_fraction = ctx.param("velocity_cap_fraction", 0.2);
    let inertia = if ctx.t_max > 1 {
        w_start - (w_start - w_end) * ctx.t as f64 / (ctx.t_max - 1) as f64
    } else {
        w_end
    };

    // synchronous update: all particles chase the best known at the start
    // of the iteration
    let global_best = swarm.best_position.clone();
    for i in 0..swarm.len() {
        let mut candidate = swarm.positions[i].clone();
        for j in 0..d {
            let r1: f64 = ctx.rng.gen();
            let r2: f64 = ctx.rng.gen();
            let cap = cap_fraction * (ctx.space.upper[j] - ctx.space.lower[j]);
            let v = (inertia * state.velocities[i][j]
                + c1 * r1 * (state.personal_best[i][j] - candidate[j])
                + c2 * r2 * (global_best[j] - candidate[j]))
                .clamp(-cap, cap);
            state.velocities[i][j] = v;
            candidate[j] += v;
        }
        // particles always move; memory lives in the personal bests
        swarm.commit(ctx.space, obj, i, candidate);
        if swarm.fitness[i] < state.personal_best_fitness[i] {
            state.personal_best_fitness[i] = swarm.fitness[i];
            state.personal_best[i] = swarm.positions[i].clone();
        }
    }
}
