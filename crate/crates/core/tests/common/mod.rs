#![allow(dead_code)]

use rand::Rng;
use tpg_nav::evolution::variation::random_program;
use tpg_nav::tpg::{Ensemble, EnsembleId, GraphConfig, Learner, LearnerId, ProgramGraph, ProgramId};

/// A random graph of `nodes` ensembles. Every ensemble holds at least two
/// learners with their own action programs; the rest point anywhere,
/// including back at themselves, so cycles are common. Learners are
/// sometimes shared between ensembles.
pub fn random_graph<R: Rng>(rng: &mut R, state_dim: usize, nodes: u64, max_len: usize) -> ProgramGraph {
    let config = GraphConfig::new(state_dim);
    let mut g = ProgramGraph::new(config);
    let mut next_program = 1u64;
    let mut next_learner = 1u64;
    let mut made: Vec<LearnerId> = Vec::new();
    for e in 1..=nodes {
        let size = rng.gen_range(2..=4usize);
        let mut members = Vec::new();
        for k in 0..size {
            if k >= 2 && !made.is_empty() && rng.gen_bool(0.2) {
                let l = made[rng.gen_range(0..made.len())];
                if !members.contains(&l) {
                    members.push(l);
                    continue;
                }
            }
            let context = ProgramId(next_program);
            let action = ProgramId(next_program + 1);
            next_program += 2;
            g.insert_program(random_program(context, max_len, &config, rng));
            g.insert_program(random_program(action, max_len, &config, rng));
            let pointer = (k >= 2 && rng.gen_bool(0.7)).then(|| EnsembleId(rng.gen_range(1..=nodes)));
            let id = LearnerId(next_learner);
            next_learner += 1;
            g.insert_learner(Learner {
                id,
                context,
                action,
                pointer,
            });
            made.push(id);
            members.push(id);
        }
        g.insert_ensemble(Ensemble::new(EnsembleId(e), members));
    }
    g
}

/// Random frame-like state in [0, 1] with a sprinkling of exact zeros.
pub fn random_state<R: Rng>(rng: &mut R, dim: usize) -> Vec<f32> {
    (0..dim)
        .map(|_| if rng.gen_bool(0.1) { 0.0 } else { rng.gen::<f32>() })
        .collect()
}
