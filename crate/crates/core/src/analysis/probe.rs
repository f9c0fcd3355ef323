//! Releasing an agent in a single goal-less room.

use rayon::prelude::*;

use crate::env::episode::random_heading;
use crate::env::map::{room_surface, ROOM_LABELS};
use crate::env::{run_episode, AgentPose, EnvConfig, EpisodeOutcome, LabyrinthMap, Policy, SurfaceId, CELL_SIZE};
use crate::rng::{stream, TAG_PROBE};
use crate::{Error, Result, Scalar};

use super::svg::TrajectoryPlot;

/// Probe room side: the long side of the labyrinth.
pub fn default_side_length(map: &LabyrinthMap) -> f64 {
    let (w, h) = map.world_size();
    w.max(h)
}

#[derive(Clone, Debug)]
pub struct ProbeBundle {
    pub surface: SurfaceId,
    pub room: LabyrinthMap,
    pub outcomes: Vec<EpisodeOutcome>,
}

impl ProbeBundle {
    pub fn trajectories(&self) -> Vec<Vec<AgentPose>> {
        self.outcomes.iter().map(|o| o.trajectory.clone()).collect()
    }

    pub fn plot(&self) -> TrajectoryPlot<'_> {
        let mut plot = TrajectoryPlot::new(&self.room);
        plot.title = format!("empty room, surface {}", self.surface);
        for o in &self.outcomes {
            plot.add_trajectory(&o.trajectory);
        }
        plot
    }
}

/// Runs `episodes` recorded episodes from the centre of a square room with
/// walls of `surface` and no goal.
pub fn run_empty_room_probe<T, P, F>(
    surface: SurfaceId,
    side_length: f64,
    env: &EnvConfig,
    master: u64,
    episodes: u32,
    make_policy: F,
) -> Result<ProbeBundle>
where
    T: Scalar,
    P: Policy<T>,
    F: Fn() -> Result<P> + Sync,
{
    let room = LabyrinthMap::probe_room(surface, side_length, env.kinematics.radius)?;
    let centre = room
        .regions()
        .first()
        .map(|r| r.centre)
        .ok_or_else(|| Error::InvalidGeometry("probe room has no region".into()))?;
    let outcomes = (0..episodes)
        .into_par_iter()
        .map(|k| {
            let heading = random_heading(&mut stream(master, &[TAG_PROBE, surface as u64, k as u64]));
            let mut policy = make_policy()?;
            run_episode::<T, _>(&room, env, AgentPose::new(centre.0, centre.1, heading), &mut policy, true)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ProbeBundle { surface, room, outcomes })
}

/// Plots each room-surface bundle inside the labyrinth room that uses the
/// surface, scaled down from the probe room to the room's floor.
pub fn composite_plot<'a>(labyrinth: &'a LabyrinthMap, bundles: &[ProbeBundle]) -> Result<TrajectoryPlot<'a>> {
    let mut plot = TrajectoryPlot::new(labyrinth);
    plot.title = "empty rooms by wall surface".into();
    for b in bundles {
        let label = ROOM_LABELS
            .iter()
            .copied()
            .find(|&l| room_surface(l) == Some(b.surface))
            .ok_or_else(|| Error::OutOfRange(format!("surface {} belongs to no room", b.surface)))?;
        let (x0, y0, x1, y1) = labyrinth.spawn_region(label)?.bounds();
        let (rw, rh) = b.room.world_size();
        let (ox, oy) = (x0 as f64 * CELL_SIZE, y0 as f64 * CELL_SIZE);
        let (sx, sy) = ((x1 - x0) as f64 * CELL_SIZE / rw, (y1 - y0) as f64 * CELL_SIZE / rh);
        for o in &b.outcomes {
            plot.add_points(o.trajectory.iter().map(|p| (ox + p.x * sx, oy + p.y * sy)).collect());
        }
    }
    Ok(plot)
}
