//! Tangled program graphs (TPG) evolved against a partially observable,
//! first-person labyrinth.
//!
//! The crate is split into:
//!
//! - [`env`]: the labyrinth, agent kinematics, rewards and a column raycaster.
//! - [`tpg`]: the register-machine interpreter, learners, ensembles and graph traversal.
//! - [`evolution`]: the breeder loop, variation operators and champion selection.
//! - [`analysis`]: the post-training test protocol, sign test, probes, plots and
//!   complexity statistics.
//!
//! Program execution and observations are generic over the register scalar
//! (see [`Scalar`]); the aliases below fix the common choices.

pub mod analysis;
pub mod env;
pub mod error;
pub mod evolution;
pub mod num;
pub mod rng;
pub mod tpg;

pub use error::{Error, Result};
pub use num::Scalar;

/// Scalar used by the command line tools.
pub type Real = f32;

pub type Frame32 = env::Frame<f32>;
pub type Frame64 = env::Frame<f64>;
pub type Registers32 = tpg::Registers<f32>;
pub type Registers64 = tpg::Registers<f64>;
pub type Frame = env::Frame<Real>;
