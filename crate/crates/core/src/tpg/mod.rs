//! Tangled program graphs: programs, learners, ensembles and their evaluation.

pub mod eval;
pub mod graph;
pub mod ids;
pub mod program;
pub mod serial;

pub use eval::{Decision, GraphPolicy};
pub use graph::{Ensemble, GraphConfig, Learner, LearnerTarget, ProgramGraph, Reachable, MAX_ENSEMBLE, MIN_ENSEMBLE};
pub use ids::{EnsembleId, LearnerId, ProgramId};
pub use program::{Instruction, Mode, Op, Program, Registers, DEFAULT_REGISTERS, MAX_INSTRUCTIONS, MAX_REGISTERS};
pub use serial::Champion;
