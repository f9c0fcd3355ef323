//! Breeder-model evolution of tangled program graphs.
//!
//! Each generation evaluates every root ensemble, deletes the worst `gap`
//! share, and refills the population with varied clones of uniformly chosen
//! survivors. Pointers to other ensembles only appear in the second phase.

pub mod champion;
pub mod generation;
pub mod params;
pub mod population;
pub mod run;
pub mod variation;

pub use champion::{pick_best, select_champion, validation_starts};
pub use generation::{evaluate_agent, run_generation, training_starts, Experiment, GenerationStats};
pub use params::{EvolutionParams, Phase};
pub use population::Populations;
pub use run::{Trainer, CHAMPION_FILE, CHECKPOINT_FILE, RUN_LOG};
pub use variation::{crossover_ensembles, mutate_learner, mutate_program, ActionChange};
