//! Episode rewards.
//!
//! Every elapsed step costs 0.0001; reaching the vest adds a bonus of 1.0 and
//! running out of time adds nothing. Returns are computed in closed form from
//! integer step counts so that, e.g., a timeout is exactly `-0.21`.

use crate::{Error, Result};

pub const EPISODE_CAP: u32 = 2_100;
pub const STEP_COST: f64 = 0.0001;
pub const GOAL_BONUS: f64 = 1.0;
const COST_DENOMINATOR: f64 = 10_000.0;

/// Per-step reward for step `t` (1-based) of an episode capped at `cap` steps.
pub fn reward(reached_goal: bool, t: u32, cap: u32) -> Result<f64> {
    if t == 0 || t > cap {
        return Err(Error::OutOfRange(format!("step {t} outside 1..={cap}")));
    }
    Ok(if reached_goal {
        GOAL_BONUS - STEP_COST
    } else {
        -STEP_COST
    })
}

/// Sum of rewards for an episode that ended after `steps` steps.
pub fn episode_return(reached_goal: bool, steps: u32) -> f64 {
    let cost = steps as f64;
    if reached_goal {
        (COST_DENOMINATOR - cost) / COST_DENOMINATOR
    } else {
        -cost / COST_DENOMINATOR
    }
}

/// Return in units of the step cost, so sums of returns are exact.
pub fn episode_units(reached_goal: bool, steps: u32) -> i64 {
    if reached_goal {
        COST_DENOMINATOR as i64 - steps as i64
    } else {
        -(steps as i64)
    }
}

/// Mean of episode returns given in step-cost units. Exact integer
/// accumulation makes the result independent of episode order.
pub fn mean_return(units: &[i64]) -> f64 {
    if units.is_empty() {
        return 0.0;
    }
    let total: i64 = units.iter().sum();
    total as f64 / (COST_DENOMINATOR * units.len() as f64)
}
