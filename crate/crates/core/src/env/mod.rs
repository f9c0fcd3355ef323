//! The labyrinth world: geometry, kinematics, rendering, rewards and episodes.

pub mod episode;
pub mod map;
pub mod pose;
pub mod render;
pub mod reward;

pub use episode::{run_episode, spawn, spawn_in, EpisodeOutcome, FnPolicy, Policy};
pub use map::{Cell, LabyrinthMap, Region, RegionKind, RegionLabel, SurfaceId, CELL_SIZE};
pub use pose::{step, Action, AgentPose, Kinematics};
pub use render::{render, render_into, render_pixels, Camera, Frame, PixelPlan};
pub use reward::{episode_return, episode_units, mean_return, reward, EPISODE_CAP};

/// Everything about the world that is not the map.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnvConfig {
    pub camera: Camera,
    pub kinematics: Kinematics,
    pub episode_cap: u32,
}

impl Default for EnvConfig {
    fn default() -> Self {
        EnvConfig {
            camera: Camera::default(),
            kinematics: Kinematics::default(),
            episode_cap: EPISODE_CAP,
        }
    }
}

impl EnvConfig {
    pub fn with_resolution(width: usize, height: usize) -> Self {
        EnvConfig {
            camera: Camera {
                width,
                height,
                ..Camera::default()
            },
            ..EnvConfig::default()
        }
    }

    pub fn state_dim(&self) -> usize {
        self.camera.state_dim()
    }
}
