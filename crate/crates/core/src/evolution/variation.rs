//! Program, learner and ensemble variation operators.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::tpg::{
    EnsembleId, GraphConfig, Instruction, Learner, LearnerId, Mode, Op, Program, ProgramGraph, ProgramId,
};

use super::params::{EvolutionParams, Phase};
use super::population::Populations;

pub fn random_instruction<R: Rng + ?Sized>(config: &GraphConfig, rng: &mut R) -> Instruction {
    Instruction {
        mode: if rng.gen_bool(0.5) { Mode::Register } else { Mode::Input },
        target: rng.gen_range(0..config.num_registers) as u8,
        op: Op::ALL[rng.gen_range(0..Op::ALL.len())],
        source: rng.gen_range(0..config.num_registers) as u8,
        input: rng.gen_range(0..config.state_dim) as u32,
    }
}

/// Program of uniformly random length in `1..=max_len` with uniform fields.
pub fn random_program<R: Rng + ?Sized>(id: ProgramId, max_len: usize, config: &GraphConfig, rng: &mut R) -> Program {
    let len = rng.gen_range(1..=max_len);
    Program::new(id, (0..len).map(|_| random_instruction(config, rng)).collect())
}

/// Rewrites one field of one instruction with a fresh uniform value. The
/// operand field is whichever of register source or input the mode reads.
fn point_mutate<R: Rng + ?Sized>(ins: &mut Instruction, config: &GraphConfig, rng: &mut R) {
    match rng.gen_range(0..4) {
        0 => ins.mode = if rng.gen_bool(0.5) { Mode::Register } else { Mode::Input },
        1 => ins.target = rng.gen_range(0..config.num_registers) as u8,
        2 => ins.op = Op::ALL[rng.gen_range(0..Op::ALL.len())],
        _ => match ins.mode {
            Mode::Register => ins.source = rng.gen_range(0..config.num_registers) as u8,
            Mode::Input => ins.input = rng.gen_range(0..config.state_dim) as u32,
        },
    }
}

/// Applies `mutate_count` rounds of delete, add, swap and point mutation,
/// each gated by its own probability. Length stays within `1..=max_instructions`.
pub fn mutate_program<R: Rng + ?Sized>(
    program: &mut Program,
    params: &EvolutionParams,
    config: &GraphConfig,
    rng: &mut R,
) {
    let ins = &mut program.instructions;
    for _ in 0..params.mutate_count {
        if rng.gen_bool(params.p_instr_delete) && ins.len() > 1 {
            let i = rng.gen_range(0..ins.len());
            ins.remove(i);
        }
        if rng.gen_bool(params.p_instr_add) && ins.len() < params.max_instructions {
            let i = rng.gen_range(0..=ins.len());
            ins.insert(i, random_instruction(config, rng));
        }
        if rng.gen_bool(params.p_instr_swap) && ins.len() > 1 {
            let i = rng.gen_range(0..ins.len());
            let mut j = rng.gen_range(0..ins.len() - 1);
            if j >= i {
                j += 1;
            }
            ins.swap(i, j);
        }
        if rng.gen_bool(params.p_instr_point) {
            let i = rng.gen_range(0..ins.len());
            point_mutate(&mut ins[i], config, rng);
        }
    }
}

/// Pools both learner lists and deals each learner to one side or the other
/// with even odds, then repairs both sides to legal sizes with at least two
/// distinct action programs by drawing from the pool. Returns `None` if
/// either side cannot be repaired.
pub fn crossover_ensembles<R: Rng + ?Sized>(
    a: &[LearnerId],
    b: &[LearnerId],
    graph: &ProgramGraph,
    params: &EvolutionParams,
    rng: &mut R,
) -> Option<(Vec<LearnerId>, Vec<LearnerId>)> {
    let pool: Vec<LearnerId> = a.iter().chain(b).copied().collect();
    let mut left = Vec::new();
    let mut right = Vec::new();
    for &l in &pool {
        let side = if rng.gen_bool(0.5) { &mut left } else { &mut right };
        if !side.contains(&l) {
            side.push(l);
        }
    }
    let left = repair(left, &pool, graph, params, rng)?;
    let right = repair(right, &pool, graph, params, rng)?;
    Some((left, right))
}

fn distinct_actions(members: &[LearnerId], graph: &ProgramGraph) -> BTreeSet<ProgramId> {
    members
        .iter()
        .filter_map(|&l| graph.learner(l).ok().and_then(|l| l.active_action()))
        .collect()
}

fn repair<R: Rng + ?Sized>(
    mut members: Vec<LearnerId>,
    pool: &[LearnerId],
    graph: &ProgramGraph,
    params: &EvolutionParams,
    rng: &mut R,
) -> Option<Vec<LearnerId>> {
    let mut unique_pool: Vec<LearnerId> = pool.to_vec();
    unique_pool.sort_unstable();
    unique_pool.dedup();
    while members.len() > params.max_team {
        let i = rng.gen_range(0..members.len());
        members.swap_remove(i);
    }
    while members.len() < params.min_team {
        let spare: Vec<LearnerId> = unique_pool.iter().copied().filter(|l| !members.contains(l)).collect();
        members.push(*spare.choose(rng)?);
    }
    let mut guard = 0;
    while distinct_actions(&members, graph).len() < 2 {
        guard += 1;
        if guard > 4 * params.max_team {
            return None;
        }
        let present = distinct_actions(&members, graph);
        let helpful: Vec<LearnerId> = unique_pool
            .iter()
            .copied()
            .filter(|l| !members.contains(l))
            .filter(|&l| {
                graph
                    .learner(l)
                    .ok()
                    .and_then(|l| l.active_action())
                    .is_some_and(|a| !present.contains(&a))
            })
            .collect();
        let pick = *helpful.choose(rng)?;
        if members.len() < params.max_team {
            members.push(pick);
        } else {
            // replace a learner that adds nothing new
            let redundant: Vec<usize> = (0..members.len())
                .filter(|&i| {
                    let mut rest = members.clone();
                    rest.remove(i);
                    distinct_actions(&rest, graph).len() == present.len()
                })
                .collect();
            let i = *redundant.choose(rng)?;
            members[i] = pick;
        }
    }
    Some(members)
}

/// What Algorithm-1 style action mutation did to a cloned learner.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ActionChange {
    Unchanged,
    Mutated,
    Pointer(EnsembleId),
}

/// Clones `source` under a fresh id with a mutated copy of its context
/// program, then applies action mutation: with probability `p_mn` either the
/// action program is copied and mutated and any pointer cleared, or (with
/// probability `p_action` for the phase) the learner is pointed at an
/// ensemble drawn uniformly from `targets` and its action program disabled.
/// The new learner and programs are inserted into `pops`.
pub fn mutate_learner<R: Rng + ?Sized>(
    pops: &mut Populations,
    source: LearnerId,
    targets: &[EnsembleId],
    params: &EvolutionParams,
    phase: Phase,
    rng: &mut R,
) -> crate::Result<(LearnerId, ActionChange)> {
    let original: Learner = pops.graph.learner(source)?.clone();
    let config = pops.graph.config;

    let mut context = pops.graph.program(original.context)?.clone();
    mutate_program(&mut context, params, &config, rng);
    let context = pops.add_program(context);

    let mut action = original.action;
    let mut pointer = original.pointer;
    let mut change = ActionChange::Unchanged;
    if rng.gen_bool(params.p_mn) {
        let p_action = params.p_action(phase);
        if rng.gen_bool(p_action) && !targets.is_empty() {
            let t = targets[rng.gen_range(0..targets.len())];
            pointer = Some(t);
            change = ActionChange::Pointer(t);
        } else {
            let mut a = pops.graph.program(original.action)?.clone();
            mutate_program(&mut a, params, &config, rng);
            action = pops.add_program(a);
            pointer = None;
            change = ActionChange::Mutated;
        }
    }
    Ok((pops.add_learner(context, action, pointer), change))
}

/// Clone of `source` differing only in a mutated context program.
pub(crate) fn clone_with_new_context<R: Rng + ?Sized>(
    pops: &mut Populations,
    source: LearnerId,
    params: &EvolutionParams,
    rng: &mut R,
) -> crate::Result<LearnerId> {
    let original = pops.graph.learner(source)?.clone();
    let config = pops.graph.config;
    let mut context = pops.graph.program(original.context)?.clone();
    mutate_program(&mut context, params, &config, rng);
    let context = pops.add_program(context);
    Ok(pops.add_learner(context, original.action, original.pointer))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use crate::tpg::graph::fixtures::*;
    use crate::tpg::{Ensemble, GraphConfig};

    fn config() -> GraphConfig {
        GraphConfig::new(64)
    }

    #[test]
    fn random_programs_are_valid() {
        let mut rng = stream(1, &[]);
        for i in 0..200 {
            let p = random_program(ProgramId(i), 128, &config(), &mut rng);
            assert!((1..=128).contains(&p.len()));
            p.validate(8, 64).unwrap();
        }
    }

    #[test]
    fn mutation_respects_length_bounds() {
        let params = EvolutionParams {
            max_instructions: 6,
            ..Default::default()
        };
        let mut rng = stream(2, &[]);
        let mut p = random_program(ProgramId(1), 6, &config(), &mut rng);
        for _ in 0..500 {
            mutate_program(&mut p, &params, &config(), &mut rng);
            assert!((1..=6).contains(&p.len()));
            p.validate(8, 64).unwrap();
        }
    }

    #[test]
    fn delete_keeps_last_instruction_and_swap_of_one_is_identity() {
        let params = EvolutionParams {
            p_instr_add: 0.0,
            p_instr_delete: 1.0,
            p_instr_swap: 1.0,
            p_instr_point: 0.0,
            ..Default::default()
        };
        let mut rng = stream(3, &[]);
        let mut p = random_program(ProgramId(1), 1, &config(), &mut rng);
        let before = p.clone();
        mutate_program(&mut p, &params, &config(), &mut rng);
        assert_eq!(p, before);
    }

    fn pool_graph() -> ProgramGraph {
        let mut g = ProgramGraph::new(config());
        for i in 1..=6u64 {
            g.insert_program(bidder(i, &[i as u32]));
            g.insert_program(actor(100 + i, (i % 3) as u8, 0));
            g.insert_learner(learner(i, i, 100 + i, None));
        }
        g
    }

    #[test]
    fn crossover_of_identical_parents_stays_within_them() {
        let g = pool_graph();
        let params = EvolutionParams::default();
        let a = [LearnerId(1), LearnerId(2), LearnerId(3)];
        let mut rng = stream(4, &[]);
        for _ in 0..100 {
            let (x, y) = crossover_ensembles(&a, &a, &g, &params, &mut rng).unwrap();
            for side in [&x, &y] {
                assert!(side.iter().all(|l| a.contains(l)));
                assert!((2..=4).contains(&side.len()));
                g.check_ensemble(&Ensemble::new(EnsembleId(1), side.clone())).unwrap();
            }
        }
    }

    #[test]
    fn crossover_sizes_are_repaired() {
        let g = pool_graph();
        let params = EvolutionParams::default();
        let a = [LearnerId(1), LearnerId(2)];
        let b = [LearnerId(3), LearnerId(4), LearnerId(5), LearnerId(6)];
        let mut rng = stream(5, &[]);
        for _ in 0..200 {
            let (x, y) = crossover_ensembles(&a, &b, &g, &params, &mut rng).unwrap();
            for side in [&x, &y] {
                assert!((2..=4).contains(&side.len()));
                let set: BTreeSet<_> = side.iter().collect();
                assert_eq!(set.len(), side.len());
                assert!(side.iter().all(|l| a.contains(l) || b.contains(l)));
                g.check_ensemble(&Ensemble::new(EnsembleId(1), side.clone())).unwrap();
            }
        }
    }

    #[test]
    fn crossover_fails_without_enough_distinct_actions() {
        let mut g = ProgramGraph::new(config());
        g.insert_program(bidder(1, &[0]));
        g.insert_program(actor(2, 0, 0));
        g.insert_learner(learner(1, 1, 2, None));
        g.insert_learner(learner(2, 1, 2, None));
        let params = EvolutionParams::default();
        let a = [LearnerId(1), LearnerId(2)];
        assert!(crossover_ensembles(&a, &a, &g, &params, &mut stream(6, &[])).is_none());
    }

    fn tiny_pops() -> Populations {
        let params = EvolutionParams {
            pop_size: 4,
            max_instructions: 8,
            ..Default::default()
        };
        Populations::init(&params, 64, &mut stream(7, &[])).unwrap()
    }

    #[test]
    fn phase_one_never_creates_pointers() {
        let mut pops = tiny_pops();
        let params = EvolutionParams {
            p_mn: 1.0,
            max_instructions: 8,
            ..Default::default()
        };
        let targets = pops.roots();
        let source = pops.graph.learners().next().unwrap().id;
        let mut rng = stream(8, &[]);
        for _ in 0..100 {
            let (l, change) = mutate_learner(&mut pops, source, &targets, &params, Phase::P1, &mut rng).unwrap();
            assert_eq!(change, ActionChange::Mutated);
            let l = pops.graph.learner(l).unwrap();
            assert!(l.pointer.is_none());
            assert_ne!(l.id, source);
        }
    }

    #[test]
    fn phase_two_points_at_targets_and_keeps_action() {
        let mut pops = tiny_pops();
        let params = EvolutionParams {
            p_mn: 1.0,
            p_action_p2: 1.0,
            ..Default::default()
        };
        let targets = pops.roots();
        let source = pops.graph.learners().next().unwrap().clone();
        let (l, change) = mutate_learner(&mut pops, source.id, &targets, &params, Phase::P2, &mut stream(9, &[])).unwrap();
        let l = pops.graph.learner(l).unwrap();
        let ActionChange::Pointer(t) = change else { panic!("{change:?}") };
        assert!(targets.contains(&t));
        assert_eq!(l.pointer, Some(t));
        assert_eq!(l.action, source.action);
        assert_ne!(l.context, source.context);
    }

    #[test]
    fn gate_closed_leaves_action_alone() {
        let mut pops = tiny_pops();
        let params = EvolutionParams {
            p_mn: 0.0,
            ..Default::default()
        };
        let source = pops.graph.learners().next().unwrap().clone();
        let (l, change) = mutate_learner(&mut pops, source.id, &[], &params, Phase::P2, &mut stream(10, &[])).unwrap();
        assert_eq!(change, ActionChange::Unchanged);
        let l = pops.graph.learner(l).unwrap();
        assert_eq!((l.action, l.pointer), (source.action, source.pointer));
    }
}
