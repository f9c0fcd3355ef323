//! Bidding and graph traversal.

use std::collections::BTreeSet;

use crate::env::{Action, Frame, Policy};
use crate::{Error, Result, Scalar};

use super::graph::ProgramGraph;
use super::ids::{EnsembleId, LearnerId};

/// Outcome of one decision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decision {
    pub action: Action,
    /// Learner whose action program acted.
    pub learner: LearnerId,
    /// Ensembles in the order they bid.
    pub visited: Vec<EnsembleId>,
}

impl ProgramGraph {
    /// Highest `R[0]` bid among the ensemble's learners; ties go to the
    /// lowest learner id.
    pub fn select_winner<T: Scalar>(&self, ensemble: EnsembleId, state: &[T]) -> Result<LearnerId> {
        self.select_winner_excluding(ensemble, state, &[])
    }

    /// As [`select_winner`](Self::select_winner), skipping learners that
    /// point at an ensemble in `visited`.
    pub fn select_winner_excluding<T: Scalar>(
        &self,
        ensemble: EnsembleId,
        state: &[T],
        visited: &[EnsembleId],
    ) -> Result<LearnerId> {
        let regs = self.config.num_registers;
        let mut best: Option<(LearnerId, T)> = None;
        // members are sorted, so a strict comparison keeps the lowest id on ties
        for &lid in self.ensemble(ensemble)?.learners() {
            let learner = self.learner(lid)?;
            if matches!(learner.pointer, Some(t) if visited.contains(&t)) {
                continue;
            }
            let bid = self.program(learner.context)?.execute(state, regs).bid();
            if best.is_none_or(|(_, b)| bid > b) {
                best = Some((lid, bid));
            }
        }
        best.map(|(l, _)| l).ok_or_else(|| {
            Error::Illegal(format!("ensemble {ensemble} has no eligible bidder"))
        })
    }

    /// Follows winning learners from `root` until one holds an action
    /// program. Each ensemble bids at most once per decision.
    pub fn evaluate<T: Scalar>(&self, root: EnsembleId, state: &[T]) -> Result<Decision> {
        let mut visited = vec![root];
        let mut current = root;
        loop {
            let winner = self.select_winner_excluding(current, state, &visited)?;
            let learner = self.learner(winner)?;
            match learner.pointer {
                Some(next) => {
                    visited.push(next);
                    current = next;
                }
                None => {
                    let regs = self.program(learner.action)?.execute(state, self.config.num_registers);
                    let index = regs.argmax(self.config.num_actions);
                    let action = Action::from_index(index)
                        .ok_or_else(|| Error::Illegal(format!("action index {index}")))?;
                    return Ok(Decision {
                        action,
                        learner: winner,
                        visited,
                    });
                }
            }
        }
    }

    /// Every attribute read by a context program or an enabled action program
    /// reachable from `root`.
    pub fn reachable_attributes(&self, root: EnsembleId) -> Result<BTreeSet<u32>> {
        let reach = self.reachable(root)?;
        let mut out = BTreeSet::new();
        for &lid in &reach.learners {
            let l = self.learner(lid)?;
            out.extend(self.program(l.context)?.indexed_attributes());
            if let Some(a) = l.active_action() {
                out.extend(self.program(a)?.indexed_attributes());
            }
        }
        Ok(out)
    }
}

/// A rooted graph acting as an environment policy.
pub struct GraphPolicy<'a> {
    graph: &'a ProgramGraph,
    root: EnsembleId,
    attributes: Vec<usize>,
}

impl<'a> GraphPolicy<'a> {
    pub fn new(graph: &'a ProgramGraph, root: EnsembleId) -> Result<Self> {
        let attributes = graph
            .reachable_attributes(root)?
            .into_iter()
            .map(|a| a as usize)
            .collect();
        Ok(GraphPolicy { graph, root, attributes })
    }
}

impl<T: Scalar> Policy<T> for GraphPolicy<'_> {
    fn act(&mut self, frame: &Frame<T>) -> Result<Action> {
        let state = frame.as_slice();
        if state.len() != self.graph.config.state_dim {
            return Err(Error::StateDimMismatch {
                expected: self.graph.config.state_dim,
                found: state.len(),
            });
        }
        Ok(self.graph.evaluate(self.root, state)?.action)
    }

    fn is_reactive(&self) -> bool {
        true
    }

    fn attributes(&self) -> Option<Vec<usize>> {
        Some(self.attributes.clone())
    }
}
