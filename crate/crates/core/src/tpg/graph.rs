//! Learners, ensembles and the store that owns them.
//!
//! Programs, learners and ensembles are kept in id-indexed maps and refer to
//! each other by id, so one learner can sit in several ensembles and one
//! program in several learners. A champion is a [`ProgramGraph`] restricted to
//! what its root can reach.

use std::collections::{BTreeMap, BTreeSet};

use crate::env::Action;
use crate::{Error, Result};

use super::ids::{EnsembleId, LearnerId, ProgramId};
use super::program::{Program, DEFAULT_REGISTERS, MAX_REGISTERS};

pub const MIN_ENSEMBLE: usize = 2;
pub const MAX_ENSEMBLE: usize = 4;

/// A context program paired with an action. The action program is always
/// stored; while `pointer` is set it is disabled and the learner defers to
/// that ensemble instead.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Learner {
    pub id: LearnerId,
    pub context: ProgramId,
    pub action: ProgramId,
    pub pointer: Option<EnsembleId>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LearnerTarget {
    Action(ProgramId),
    Ensemble(EnsembleId),
}

impl Learner {
    pub fn target(&self) -> LearnerTarget {
        match self.pointer {
            Some(e) => LearnerTarget::Ensemble(e),
            None => LearnerTarget::Action(self.action),
        }
    }

    pub fn active_action(&self) -> Option<ProgramId> {
        match self.target() {
            LearnerTarget::Action(p) => Some(p),
            LearnerTarget::Ensemble(_) => None,
        }
    }
}

/// A node of the policy graph. Member ids are kept sorted and unique so two
/// ensembles with the same complement compare equal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ensemble {
    pub id: EnsembleId,
    learners: Vec<LearnerId>,
}

impl Ensemble {
    pub fn new(id: EnsembleId, mut learners: Vec<LearnerId>) -> Self {
        learners.sort_unstable();
        learners.dedup();
        Ensemble { id, learners }
    }

    pub fn learners(&self) -> &[LearnerId] {
        &self.learners
    }

    pub fn len(&self) -> usize {
        self.learners.len()
    }

    pub fn is_empty(&self) -> bool {
        self.learners.is_empty()
    }

    pub fn contains(&self, l: LearnerId) -> bool {
        self.learners.binary_search(&l).is_ok()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GraphConfig {
    pub state_dim: usize,
    pub num_registers: usize,
    pub num_actions: usize,
}

impl GraphConfig {
    pub fn new(state_dim: usize) -> Self {
        GraphConfig {
            state_dim,
            num_registers: DEFAULT_REGISTERS,
            num_actions: Action::COUNT,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.state_dim == 0 {
            return Err(Error::Config("state_dim must be positive".into()));
        }
        if self.num_registers < self.num_actions || self.num_registers > MAX_REGISTERS {
            return Err(Error::Config(format!(
                "registers must be in {}..={MAX_REGISTERS}, got {}",
                self.num_actions, self.num_registers
            )));
        }
        if self.num_actions != Action::COUNT {
            return Err(Error::Config(format!("expected {} actions", Action::COUNT)));
        }
        Ok(())
    }
}

/// Closure of everything reachable from one root.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Reachable {
    pub ensembles: BTreeSet<EnsembleId>,
    pub learners: BTreeSet<LearnerId>,
    pub programs: BTreeSet<ProgramId>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProgramGraph {
    pub config: GraphConfig,
    programs: BTreeMap<ProgramId, Program>,
    learners: BTreeMap<LearnerId, Learner>,
    ensembles: BTreeMap<EnsembleId, Ensemble>,
}

impl ProgramGraph {
    pub fn new(config: GraphConfig) -> Self {
        ProgramGraph {
            config,
            programs: BTreeMap::new(),
            learners: BTreeMap::new(),
            ensembles: BTreeMap::new(),
        }
    }

    pub fn insert_program(&mut self, p: Program) {
        self.programs.insert(p.id, p);
    }

    pub fn insert_learner(&mut self, l: Learner) {
        self.learners.insert(l.id, l);
    }

    pub fn insert_ensemble(&mut self, e: Ensemble) {
        self.ensembles.insert(e.id, e);
    }

    pub fn remove_program(&mut self, id: ProgramId) -> Option<Program> {
        self.programs.remove(&id)
    }

    pub fn remove_learner(&mut self, id: LearnerId) -> Option<Learner> {
        self.learners.remove(&id)
    }

    pub fn remove_ensemble(&mut self, id: EnsembleId) -> Option<Ensemble> {
        self.ensembles.remove(&id)
    }

    pub fn program(&self, id: ProgramId) -> Result<&Program> {
        self.programs
            .get(&id)
            .ok_or_else(|| Error::Dangling(format!("program {id}")))
    }

    pub fn learner(&self, id: LearnerId) -> Result<&Learner> {
        self.learners
            .get(&id)
            .ok_or_else(|| Error::Dangling(format!("learner {id}")))
    }

    pub fn ensemble(&self, id: EnsembleId) -> Result<&Ensemble> {
        self.ensembles
            .get(&id)
            .ok_or_else(|| Error::Dangling(format!("ensemble {id}")))
    }

    pub fn programs(&self) -> impl Iterator<Item = &Program> + '_ {
        self.programs.values()
    }

    pub fn learners(&self) -> impl Iterator<Item = &Learner> + '_ {
        self.learners.values()
    }

    pub fn ensembles(&self) -> impl Iterator<Item = &Ensemble> + '_ {
        self.ensembles.values()
    }

    pub fn num_programs(&self) -> usize {
        self.programs.len()
    }

    pub fn num_learners(&self) -> usize {
        self.learners.len()
    }

    pub fn num_ensembles(&self) -> usize {
        self.ensembles.len()
    }

    pub fn contains_ensemble(&self, id: EnsembleId) -> bool {
        self.ensembles.contains_key(&id)
    }

    /// Number of distinct learners, held by some ensemble, pointing at each ensemble.
    pub fn in_degrees(&self) -> BTreeMap<EnsembleId, usize> {
        let mut deg: BTreeMap<EnsembleId, usize> = self.ensembles.keys().map(|&e| (e, 0)).collect();
        let held: BTreeSet<LearnerId> = self
            .ensembles
            .values()
            .flat_map(|e| e.learners.iter().copied())
            .collect();
        for l in held {
            if let Some(Some(target)) = self.learners.get(&l).map(|l| l.pointer) {
                if let Some(d) = deg.get_mut(&target) {
                    *d += 1;
                }
            }
        }
        deg
    }

    pub fn in_degree(&self, id: EnsembleId) -> usize {
        self.in_degrees().get(&id).copied().unwrap_or(0)
    }

    /// Ensembles nothing points at, in id order.
    pub fn roots(&self) -> Vec<EnsembleId> {
        self.in_degrees()
            .into_iter()
            .filter(|&(_, d)| d == 0)
            .map(|(e, _)| e)
            .collect()
    }

    pub fn reachable(&self, root: EnsembleId) -> Result<Reachable> {
        let mut out = Reachable::default();
        let mut stack = vec![root];
        while let Some(e) = stack.pop() {
            if !out.ensembles.insert(e) {
                continue;
            }
            for &lid in self.ensemble(e)?.learners() {
                let l = self.learner(lid)?;
                out.learners.insert(lid);
                out.programs.insert(l.context);
                // disabled action programs travel with the learner
                out.programs.insert(l.action);
                if let Some(next) = l.pointer {
                    stack.push(next);
                }
            }
        }
        for &p in &out.programs {
            self.program(p)?;
        }
        Ok(out)
    }

    /// Copy of the closed subgraph under `root`.
    pub fn subgraph(&self, root: EnsembleId) -> Result<ProgramGraph> {
        let reach = self.reachable(root)?;
        let mut g = ProgramGraph::new(self.config);
        for e in &reach.ensembles {
            g.insert_ensemble(self.ensembles[e].clone());
        }
        for l in &reach.learners {
            g.insert_learner(self.learners[l].clone());
        }
        for p in &reach.programs {
            g.insert_program(self.programs[p].clone());
        }
        Ok(g)
    }

    /// Size bounds, member existence and at least two distinct active action programs.
    pub fn check_ensemble(&self, e: &Ensemble) -> Result<()> {
        if e.len() < MIN_ENSEMBLE || e.len() > MAX_ENSEMBLE {
            return Err(Error::Illegal(format!(
                "ensemble {} has {} learners, expected {MIN_ENSEMBLE}..={MAX_ENSEMBLE}",
                e.id,
                e.len()
            )));
        }
        let mut actions = BTreeSet::new();
        for &lid in e.learners() {
            if let Some(a) = self.learner(lid)?.active_action() {
                actions.insert(a);
            }
        }
        if actions.len() < 2 {
            return Err(Error::Illegal(format!(
                "ensemble {} has {} distinct action programs, expected at least 2",
                e.id,
                actions.len()
            )));
        }
        Ok(())
    }

    /// Full structural audit: legal ensembles with unique complements, no
    /// dangling references, in-bounds programs.
    pub fn audit(&self) -> Result<()> {
        self.config.validate()?;
        let mut complements = BTreeSet::new();
        for e in self.ensembles.values() {
            self.check_ensemble(e)?;
            if !complements.insert(e.learners.clone()) {
                return Err(Error::Illegal(format!("ensemble {} duplicates another complement", e.id)));
            }
        }
        for l in self.learners.values() {
            self.program(l.context)?;
            self.program(l.action)?;
            if let Some(t) = l.pointer {
                self.ensemble(t)?;
            }
        }
        for p in self.programs.values() {
            p.validate(self.config.num_registers, self.config.state_dim)?;
        }
        Ok(())
    }

    /// Whether some ensemble other than `except` already has this complement.
    pub fn has_complement(&self, learners: &[LearnerId], except: Option<EnsembleId>) -> bool {
        self.ensembles
            .values()
            .any(|e| Some(e.id) != except && e.learners == learners)
    }

    /// Learners held by no ensemble.
    pub fn orphan_learners(&self) -> Vec<LearnerId> {
        let held: BTreeSet<LearnerId> = self
            .ensembles
            .values()
            .flat_map(|e| e.learners.iter().copied())
            .collect();
        self.learners.keys().filter(|l| !held.contains(l)).copied().collect()
    }

    /// Programs used by no learner.
    pub fn orphan_programs(&self) -> Vec<ProgramId> {
        let used: BTreeSet<ProgramId> = self
            .learners
            .values()
            .flat_map(|l| [l.context, l.action])
            .collect();
        self.programs.keys().filter(|p| !used.contains(p)).copied().collect()
    }

    /// Removes orphan learners, then orphan programs.
    pub fn collect_garbage(&mut self) {
        for l in self.orphan_learners() {
            self.learners.remove(&l);
        }
        for p in self.orphan_programs() {
            self.programs.remove(&p);
        }
    }
}
