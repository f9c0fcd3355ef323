use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::Rng;

use crate::tpg::serial::{parse_num, read_graph, write_graph, Lines};
use crate::tpg::{Ensemble, EnsembleId, GraphConfig, Learner, LearnerId, Program, ProgramGraph, ProgramId};
use crate::{Error, Result};

use super::params::EvolutionParams;
use super::variation::random_program;

pub const CHECKPOINT_HEADER: &str = "tpg-checkpoint v1";

/// Learner and ensemble populations sharing one program store, plus the
/// fitness of every root evaluated in the latest generation.
#[derive(Clone, Debug, PartialEq)]
pub struct Populations {
    pub graph: ProgramGraph,
    pub fitness: BTreeMap<EnsembleId, f64>,
    /// Number of completed generations.
    pub generation: u32,
    next_program: u64,
    next_learner: u64,
    next_ensemble: u64,
}

impl Populations {
    pub fn empty(config: GraphConfig) -> Self {
        Populations {
            graph: ProgramGraph::new(config),
            fitness: BTreeMap::new(),
            generation: 0,
            next_program: 1,
            next_learner: 1,
            next_ensemble: 1,
        }
    }

    /// `pop_size` root ensembles of fresh learners, none with a pointer.
    pub fn init<R: Rng + ?Sized>(params: &EvolutionParams, state_dim: usize, rng: &mut R) -> Result<Self> {
        params.validate()?;
        let config = GraphConfig {
            num_registers: params.max_registers,
            ..GraphConfig::new(state_dim)
        };
        config.validate()?;
        let mut pops = Populations::empty(config);
        while pops.graph.num_ensembles() < params.pop_size {
            let size = rng.gen_range(params.min_team..=params.max_team);
            let mut members = Vec::with_capacity(size);
            for _ in 0..size {
                let context = pops.new_random_program(params, rng);
                let action = pops.new_random_program(params, rng);
                members.push(pops.add_learner(context, action, None));
            }
            let e = Ensemble::new(pops.fresh_ensemble_id(), members);
            if pops.graph.check_ensemble(&e).is_ok() && !pops.graph.has_complement(e.learners(), None) {
                pops.graph.insert_ensemble(e);
            }
        }
        pops.graph.collect_garbage();
        Ok(pops)
    }

    pub fn fresh_program_id(&mut self) -> ProgramId {
        self.next_program += 1;
        ProgramId(self.next_program - 1)
    }

    pub fn fresh_learner_id(&mut self) -> LearnerId {
        self.next_learner += 1;
        LearnerId(self.next_learner - 1)
    }

    pub fn fresh_ensemble_id(&mut self) -> EnsembleId {
        self.next_ensemble += 1;
        EnsembleId(self.next_ensemble - 1)
    }

    pub(crate) fn new_random_program<R: Rng + ?Sized>(&mut self, params: &EvolutionParams, rng: &mut R) -> ProgramId {
        let id = self.fresh_program_id();
        let p = random_program(id, params.max_instructions, &self.graph.config, rng);
        self.graph.insert_program(p);
        id
    }

    pub(crate) fn add_program(&mut self, mut p: Program) -> ProgramId {
        p.id = self.fresh_program_id();
        let id = p.id;
        self.graph.insert_program(p);
        id
    }

    pub(crate) fn add_learner(&mut self, context: ProgramId, action: ProgramId, pointer: Option<EnsembleId>) -> LearnerId {
        let id = self.fresh_learner_id();
        self.graph.insert_learner(Learner {
            id,
            context,
            action,
            pointer,
        });
        id
    }

    pub fn roots(&self) -> Vec<EnsembleId> {
        self.graph.roots()
    }

    /// Deletes the given roots, then every learner no surviving ensemble
    /// holds and every non-root that lost its last reference, repeatedly,
    /// and finally unused programs.
    pub fn delete_roots(&mut self, doomed: &[EnsembleId]) {
        let roots_before: Vec<EnsembleId> = self.graph.roots();
        for &e in doomed {
            self.graph.remove_ensemble(e);
            self.fitness.remove(&e);
        }
        loop {
            for l in self.graph.orphan_learners() {
                self.graph.remove_learner(l);
            }
            let stranded: Vec<EnsembleId> = self
                .graph
                .roots()
                .into_iter()
                .filter(|e| roots_before.binary_search(e).is_err())
                .collect();
            if stranded.is_empty() {
                break;
            }
            for e in stranded {
                self.graph.remove_ensemble(e);
                self.fitness.remove(&e);
            }
        }
        self.graph.collect_garbage();
    }

    /// Number of ensembles reachable from each root, averaged over roots.
    pub fn mean_graph_size(&self) -> Result<f64> {
        let roots = self.roots();
        if roots.is_empty() {
            return Ok(0.0);
        }
        let mut total = 0usize;
        for r in &roots {
            total += self.graph.reachable(*r)?.ensembles.len();
        }
        Ok(total as f64 / roots.len() as f64)
    }

    pub fn to_checkpoint(&self, seed: u64) -> String {
        let mut out = String::new();
        out.push_str(CHECKPOINT_HEADER);
        out.push('\n');
        let _ = writeln!(out, "seed {seed}");
        let _ = writeln!(out, "generation {}", self.generation);
        let _ = writeln!(out, "next {} {} {}", self.next_program, self.next_learner, self.next_ensemble);
        for (e, f) in &self.fitness {
            let _ = writeln!(out, "fitness {} {f:?}", e.0);
        }
        write_graph(&self.graph, &mut out);
        out
    }

    /// Parses a checkpoint, returning the master seed it was written with.
    pub fn from_checkpoint(text: &str) -> Result<(u64, Self)> {
        let mut lines = Lines::new(text);
        let (n, header) = lines.next_required("header")?;
        if header.join(" ") != CHECKPOINT_HEADER {
            return Err(Error::parse(n, format!("expected '{CHECKPOINT_HEADER}'")));
        }
        let seed = lines.keyed_u64("seed")?;
        let generation = lines.keyed_u64("generation")?;
        let generation = u32::try_from(generation)
            .map_err(|_| Error::parse(lines.line_no(), "generation out of range"))?;
        let (n, toks) = lines.next_required("next")?;
        let [next_program, next_learner, next_ensemble] = match toks.as_slice() {
            ["next", p, l, e] => [parse_num(n, p)?, parse_num(n, l)?, parse_num(n, e)?],
            _ => return Err(Error::parse(n, "expected 'next <program> <learner> <ensemble>'")),
        };
        let mut fitness = BTreeMap::new();
        let mut fitness_lines = Vec::new();
        while let Some((n, toks)) = lines.peek() {
            match toks {
                ["fitness", id, value] => {
                    let id = EnsembleId(parse_num(n, id)?);
                    let value: f64 = parse_num(n, value)?;
                    fitness.insert(id, value);
                    fitness_lines.push((n, id));
                }
                ["fitness", ..] => return Err(Error::parse(n, "expected 'fitness <ensemble> <value>'")),
                _ => break,
            }
            lines.advance();
        }
        let graph = read_graph(&mut lines)?;
        lines.expect_end()?;
        for (n, id) in fitness_lines {
            if !graph.contains_ensemble(id) {
                return Err(Error::parse(n, format!("fitness for missing ensemble {id}")));
            }
        }
        let max_p = graph.programs().map(|p| p.id.0).max().unwrap_or(0);
        let max_l = graph.learners().map(|l| l.id.0).max().unwrap_or(0);
        let max_e = graph.ensembles().map(|e| e.id.0).max().unwrap_or(0);
        if next_program <= max_p || next_learner <= max_l || next_ensemble <= max_e {
            return Err(Error::parse(n, "next ids must exceed every id in the graph"));
        }
        Ok((
            seed,
            Populations {
                graph,
                fitness,
                generation,
                next_program,
                next_learner,
                next_ensemble,
            },
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    fn small() -> EvolutionParams {
        EvolutionParams {
            pop_size: 12,
            max_instructions: 16,
            ..Default::default()
        }
    }

    #[test]
    fn init_builds_legal_roots_without_pointers() {
        let pops = Populations::init(&small(), 48, &mut stream(3, &[])).unwrap();
        assert_eq!(pops.roots().len(), 12);
        assert_eq!(pops.graph.num_ensembles(), 12);
        assert!(pops.graph.learners().all(|l| l.pointer.is_none()));
        pops.graph.audit().unwrap();
        assert!(pops.graph.orphan_learners().is_empty());
        assert!(pops.graph.orphan_programs().is_empty());
    }

    #[test]
    fn checkpoint_round_trips() {
        let mut pops = Populations::init(&small(), 48, &mut stream(4, &[])).unwrap();
        pops.generation = 7;
        let roots = pops.roots();
        pops.fitness.insert(roots[0], -0.21);
        pops.fitness.insert(roots[1], 0.1 + 0.2);
        let text = pops.to_checkpoint(99);
        let (seed, back) = Populations::from_checkpoint(&text).unwrap();
        assert_eq!(seed, 99);
        assert_eq!(back, pops);
        assert_eq!(back.to_checkpoint(99), text);
    }

    #[test]
    fn checkpoint_rejects_stale_counters() {
        let pops = Populations::init(&small(), 48, &mut stream(4, &[])).unwrap();
        let text = pops.to_checkpoint(1);
        let bad = text
            .lines()
            .map(|l| if l.starts_with("next ") { "next 1 1 1" } else { l })
            .collect::<Vec<_>>()
            .join("\n");
        let err = Populations::from_checkpoint(&bad).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 4, .. }), "{err}");
    }

    #[test]
    fn deleting_a_root_cascades_to_unreferenced_children() {
        let mut pops = Populations::init(&small(), 48, &mut stream(5, &[])).unwrap();
        let roots = pops.roots();
        // make roots[1] a child of roots[0] through a new pointer learner
        let l0 = pops.graph.ensemble(roots[0]).unwrap().learners()[0];
        let proto = pops.graph.learner(l0).unwrap().clone();
        let ptr = pops.add_learner(proto.context, proto.action, Some(roots[1]));
        let mut members = pops.graph.ensemble(roots[0]).unwrap().learners().to_vec();
        members.push(ptr);
        if members.len() > crate::tpg::MAX_ENSEMBLE {
            members.remove(0);
        }
        pops.graph.insert_ensemble(Ensemble::new(roots[0], members));
        pops.graph.audit().unwrap();
        assert!(!pops.roots().contains(&roots[1]));

        pops.delete_roots(&[roots[0]]);
        assert!(!pops.graph.contains_ensemble(roots[0]));
        assert!(!pops.graph.contains_ensemble(roots[1]));
        assert_eq!(pops.roots().len(), 10);
        assert!(pops.graph.orphan_learners().is_empty());
        pops.graph.audit().unwrap();
    }
}
