//! Spawning and the render, decide, step loop.

use std::collections::HashMap;

use rand::Rng;

use crate::{Error, Result, Scalar};

use super::map::{LabyrinthMap, RegionLabel, CELL_SIZE};
use super::pose::{step, Action, AgentPose};
use super::render::{render_into, render_pixels, Frame, PixelPlan};
use super::reward::episode_return;
use super::EnvConfig;

/// Spawn headings are multiples of this many degrees, which keeps turning
/// by whole degrees exact in floating point.
pub const HEADING_QUANTUM: f64 = 1.0 / 65_536.0;

pub trait Policy<T: Scalar> {
    fn act(&mut self, frame: &Frame<T>) -> Result<Action>;

    /// True when `act` is a pure function of the frame. The episode loop
    /// then stops as soon as a pose repeats, since the remaining trajectory
    /// is a loop that never reaches the goal.
    fn is_reactive(&self) -> bool {
        false
    }

    /// State attributes the policy may read. `None` means all of them;
    /// otherwise only these pixels are rendered.
    fn attributes(&self) -> Option<Vec<usize>> {
        None
    }
}

/// Adapts a closure into a [`Policy`].
pub struct FnPolicy<F> {
    f: F,
    reactive: bool,
}

impl<F> FnPolicy<F> {
    pub fn new(f: F) -> Self {
        FnPolicy { f, reactive: false }
    }

    pub fn reactive(f: F) -> Self {
        FnPolicy { f, reactive: true }
    }
}

impl<T: Scalar, F: FnMut(&Frame<T>) -> Action> Policy<T> for FnPolicy<F> {
    fn act(&mut self, frame: &Frame<T>) -> Result<Action> {
        Ok((self.f)(frame))
    }

    fn is_reactive(&self) -> bool {
        self.reactive
    }
}

pub fn random_heading<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.gen_range(0..360 * 65_536u32) as f64 * HEADING_QUANTUM
}

/// Uniform over spawn regions, at the region centre, facing a random direction.
pub fn spawn<R: Rng + ?Sized>(map: &LabyrinthMap, rng: &mut R) -> Result<AgentPose> {
    let regions: Vec<_> = map.spawn_regions().collect();
    if regions.is_empty() {
        return Err(Error::InvalidGeometry("map has no spawn region".into()));
    }
    let region = regions[rng.gen_range(0..regions.len())];
    Ok(AgentPose::new(region.centre.0, region.centre.1, random_heading(rng)))
}

pub fn spawn_in<R: Rng + ?Sized>(map: &LabyrinthMap, label: RegionLabel, rng: &mut R) -> Result<AgentPose> {
    let region = map.spawn_region(label)?;
    Ok(AgentPose::new(region.centre.0, region.centre.1, random_heading(rng)))
}

/// The agent has found the vest once it is within one collision radius of a goal cell.
pub fn reached_goal(map: &LabyrinthMap, pose: &AgentPose, radius: f64) -> bool {
    map.goal_cells().iter().any(|&(cx, cy)| {
        let x0 = cx as f64 * CELL_SIZE;
        let y0 = cy as f64 * CELL_SIZE;
        let dx = (x0 - pose.x).max(0.0).max(pose.x - (x0 + CELL_SIZE));
        let dy = (y0 - pose.y).max(0.0).max(pose.y - (y0 + CELL_SIZE));
        dx * dx + dy * dy <= radius * radius
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct EpisodeOutcome {
    pub episode_return: f64,
    pub steps: u32,
    pub reached_goal: bool,
    /// Initial pose followed by one pose per step; empty unless recorded.
    pub trajectory: Vec<AgentPose>,
}

pub fn run_episode<T: Scalar, P: Policy<T> + ?Sized>(
    map: &LabyrinthMap,
    config: &EnvConfig,
    start: AgentPose,
    policy: &mut P,
    record: bool,
) -> Result<EpisodeOutcome> {
    let cap = config.episode_cap;
    let radius = config.kinematics.radius;
    let mut trajectory = Vec::new();
    if record {
        trajectory.reserve(cap as usize + 1);
        trajectory.push(start);
    }
    if reached_goal(map, &start, radius) {
        return Ok(EpisodeOutcome {
            episode_return: episode_return(true, 0),
            steps: 0,
            reached_goal: true,
            trajectory,
        });
    }

    let reactive = policy.is_reactive();
    let plan = policy
        .attributes()
        .map(|a| PixelPlan::from_attributes(a, &config.camera));
    let mut seen: HashMap<(u64, u64, u64), u32> = HashMap::new();
    let mut frame = Frame::new(config.camera.width, config.camera.height);
    let mut pose = start;

    for t in 1..=cap {
        if reactive {
            if let Some(&first) = seen.get(&pose.key()) {
                if record {
                    let period = (t - 1 - first) as usize;
                    let first = first as usize;
                    while trajectory.len() < cap as usize + 1 {
                        let i = trajectory.len();
                        trajectory.push(trajectory[first + (i - first) % period]);
                    }
                }
                break;
            }
            seen.insert(pose.key(), t - 1);
        }
        match &plan {
            Some(plan) => render_pixels(map, &pose, &config.camera, plan, &mut frame),
            None => render_into(map, &pose, &config.camera, None, &mut frame),
        }
        let action = policy.act(&frame).map_err(|e| Error::PolicyAbort {
            step: t,
            message: e.to_string(),
        })?;
        pose = step(map, &pose, action, &config.kinematics);
        if record {
            trajectory.push(pose);
        }
        if reached_goal(map, &pose, radius) {
            return Ok(EpisodeOutcome {
                episode_return: episode_return(true, t),
                steps: t,
                reached_goal: true,
                trajectory,
            });
        }
    }
    Ok(EpisodeOutcome {
        episode_return: episode_return(false, cap),
        steps: cap,
        reached_goal: false,
        trajectory,
    })
}
