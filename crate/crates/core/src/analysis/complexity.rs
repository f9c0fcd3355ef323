//! Size and state-footprint statistics of a champion graph.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::tpg::{Champion, EnsembleId, ProgramGraph};
use crate::Result;

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexityReport {
    pub state_dim: usize,
    pub ensembles: usize,
    pub learners: usize,
    pub programs: usize,
    /// Distinct attributes read per context program, averaged over learners.
    pub mean_context_pixels: f64,
    /// Distinct attributes read per enabled action program, averaged over
    /// learners that hold one.
    pub mean_action_pixels: f64,
    /// Largest attribute set read by the winning learners' context and action
    /// programs along any root-to-action decision path.
    pub path_footprint: usize,
    /// As `path_footprint`, but counting every context program that bids on
    /// the path, winners or not.
    pub executed_footprint: usize,
    /// Number of root-to-action decision paths enumerated.
    pub decision_paths: usize,
}

impl ComplexityReport {
    pub fn path_fraction(&self) -> f64 {
        self.path_footprint as f64 / self.state_dim as f64
    }

    pub fn executed_fraction(&self) -> f64 {
        self.executed_footprint as f64 / self.state_dim as f64
    }

    /// Flat `key value` lines.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "state_dim {}", self.state_dim);
        let _ = writeln!(out, "ensembles {}", self.ensembles);
        let _ = writeln!(out, "learners {}", self.learners);
        let _ = writeln!(out, "programs {}", self.programs);
        let _ = writeln!(out, "mean_context_pixels {:.3}", self.mean_context_pixels);
        let _ = writeln!(out, "mean_action_pixels {:.3}", self.mean_action_pixels);
        let _ = writeln!(out, "decision_paths {}", self.decision_paths);
        let _ = writeln!(out, "path_footprint {}", self.path_footprint);
        let _ = writeln!(out, "path_fraction {:.6}", self.path_fraction());
        let _ = writeln!(out, "executed_footprint {}", self.executed_footprint);
        let _ = writeln!(out, "executed_fraction {:.6}", self.executed_fraction());
        out
    }
}

pub fn complexity_report(champion: &Champion) -> Result<ComplexityReport> {
    let g = &champion.graph;
    let reach = g.reachable(champion.root)?;

    let mut ctx_total = 0usize;
    let mut act_total = 0usize;
    let mut act_count = 0usize;
    for &lid in &reach.learners {
        let l = g.learner(lid)?;
        ctx_total += g.program(l.context)?.indexed_attributes().len();
        if let Some(a) = l.active_action() {
            act_total += g.program(a)?.indexed_attributes().len();
            act_count += 1;
        }
    }

    let mut walk = Walk {
        graph: g,
        paths: 0,
        winners_max: 0,
        executed_max: 0,
    };
    walk.visit(champion.root, &mut vec![champion.root], &BTreeSet::new(), &BTreeSet::new())?;

    Ok(ComplexityReport {
        state_dim: g.config.state_dim,
        ensembles: reach.ensembles.len(),
        learners: reach.learners.len(),
        programs: reach.programs.len(),
        mean_context_pixels: mean(ctx_total, reach.learners.len()),
        mean_action_pixels: mean(act_total, act_count),
        path_footprint: walk.winners_max,
        executed_footprint: walk.executed_max,
        decision_paths: walk.paths,
    })
}

fn mean(total: usize, n: usize) -> f64 {
    if n == 0 {
        0.0
    } else {
        total as f64 / n as f64
    }
}

/// Depth-first enumeration of every winner sequence the evaluator can take.
/// A learner is eligible at an ensemble unless it points at one already
/// visited, exactly as during evaluation.
struct Walk<'a> {
    graph: &'a ProgramGraph,
    paths: usize,
    winners_max: usize,
    executed_max: usize,
}

impl Walk<'_> {
    fn visit(
        &mut self,
        ensemble: EnsembleId,
        visited: &mut Vec<EnsembleId>,
        winners: &BTreeSet<u32>,
        executed: &BTreeSet<u32>,
    ) -> Result<()> {
        let g = self.graph;
        let eligible: Vec<_> = g
            .ensemble(ensemble)?
            .learners()
            .iter()
            .map(|&l| g.learner(l))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .filter(|l| !matches!(l.pointer, Some(t) if visited.contains(&t)))
            .collect();
        let mut executed = executed.clone();
        for l in &eligible {
            executed.extend(g.program(l.context)?.indexed_attributes());
        }
        for l in eligible {
            let mut w = winners.clone();
            w.extend(g.program(l.context)?.indexed_attributes());
            match l.pointer {
                Some(next) => {
                    visited.push(next);
                    self.visit(next, visited, &w, &executed)?;
                    visited.pop();
                }
                None => {
                    let act = g.program(l.action)?.indexed_attributes();
                    w.extend(act.iter().copied());
                    let e: BTreeSet<u32> = executed.union(&act).copied().collect();
                    self.paths += 1;
                    self.winners_max = self.winners_max.max(w.len());
                    self.executed_max = self.executed_max.max(e.len());
                }
            }
        }
        Ok(())
    }
}
