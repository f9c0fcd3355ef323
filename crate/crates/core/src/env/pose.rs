//! Agent state and kinematics for the three discrete actions.

use std::fmt;

use super::map::{LabyrinthMap, CELL_SIZE};

/// Action order is fixed: action programs map register `i` to `Action::ALL[i]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Action {
    MoveForward = 0,
    TurnLeft = 1,
    TurnRight = 2,
}

impl Action {
    pub const ALL: [Action; 3] = [Action::MoveForward, Action::TurnLeft, Action::TurnRight];
    pub const COUNT: usize = 3;

    pub fn from_index(i: usize) -> Option<Action> {
        Action::ALL.get(i).copied()
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Action::MoveForward => "MoveForward",
            Action::TurnLeft => "TurnLeft",
            Action::TurnRight => "TurnRight",
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Position in world units (x east, y south) and heading in degrees.
///
/// Heading 0 faces east and increases counter-clockwise as seen on the map,
/// so heading 90 faces north.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AgentPose {
    pub x: f64,
    pub y: f64,
    pub heading: f64,
}

impl AgentPose {
    pub fn new(x: f64, y: f64, heading: f64) -> Self {
        AgentPose {
            x,
            y,
            heading: normalize_heading(heading),
        }
    }

    /// Unit facing vector in grid orientation (y grows southwards).
    pub fn direction(&self) -> (f64, f64) {
        let r = self.heading.to_radians();
        (r.cos(), -r.sin())
    }

    pub fn cell(&self) -> (i64, i64) {
        (
            (self.x / CELL_SIZE).floor() as i64,
            (self.y / CELL_SIZE).floor() as i64,
        )
    }

    /// Bit pattern used for exact revisit detection.
    pub fn key(&self) -> (u64, u64, u64) {
        (self.x.to_bits(), self.y.to_bits(), self.heading.to_bits())
    }
}

pub fn normalize_heading(h: f64) -> f64 {
    let n = h.rem_euclid(360.0);
    // rem_euclid can round up to exactly 360 for tiny negative inputs
    if n >= 360.0 {
        0.0
    } else {
        n
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Kinematics {
    /// Degrees per turn decision.
    pub turn_delta: f64,
    /// World units per forward decision.
    pub move_step: f64,
    /// Half-width of the agent's square collision box.
    pub radius: f64,
}

impl Default for Kinematics {
    fn default() -> Self {
        Kinematics {
            turn_delta: 10.0,
            move_step: 3.2,
            radius: 4.0,
        }
    }
}

/// Whether a box of half-width `r` centred at (x, y) touches a wall cell.
/// Boxes that only share an edge with a wall do not overlap it.
pub fn box_overlaps_wall(map: &LabyrinthMap, x: f64, y: f64, r: f64) -> bool {
    let x0 = ((x - r) / CELL_SIZE).floor() as i64;
    let x1 = ((x + r) / CELL_SIZE).ceil() as i64 - 1;
    let y0 = ((y - r) / CELL_SIZE).floor() as i64;
    let y1 = ((y + r) / CELL_SIZE).ceil() as i64 - 1;
    for cy in y0..=y1 {
        for cx in x0..=x1 {
            if map.is_wall(cx, cy) {
                return true;
            }
        }
    }
    false
}

/// Moves along one axis; on contact the agent stops flush against the wall.
fn slide_axis(map: &LabyrinthMap, pose: &mut AgentPose, delta: f64, horizontal: bool, r: f64) {
    if delta == 0.0 {
        return;
    }
    let (nx, ny) = if horizontal {
        (pose.x + delta, pose.y)
    } else {
        (pose.x, pose.y + delta)
    };
    if !box_overlaps_wall(map, nx, ny, r) {
        pose.x = nx;
        pose.y = ny;
        return;
    }
    let along = if horizontal { nx } else { ny };
    let limit = if delta > 0.0 {
        ((along + r) / CELL_SIZE).ceil() - 1.0
    } else {
        ((along - r) / CELL_SIZE).floor() + 1.0
    };
    let clamped = if delta > 0.0 {
        (limit * CELL_SIZE - r).max(if horizontal { pose.x } else { pose.y })
    } else {
        (limit * CELL_SIZE + r).min(if horizontal { pose.x } else { pose.y })
    };
    let (cx, cy) = if horizontal {
        (clamped, pose.y)
    } else {
        (pose.x, clamped)
    };
    if !box_overlaps_wall(map, cx, cy, r) {
        pose.x = cx;
        pose.y = cy;
    }
}

/// Applies one action. Forward motion is resolved in sub-steps of at most
/// half a cell, x before y, sliding along whatever blocks it.
pub fn step(map: &LabyrinthMap, pose: &AgentPose, action: Action, kin: &Kinematics) -> AgentPose {
    let mut next = *pose;
    match action {
        Action::TurnLeft => next.heading = normalize_heading(pose.heading + kin.turn_delta),
        Action::TurnRight => next.heading = normalize_heading(pose.heading - kin.turn_delta),
        Action::MoveForward => {
            let (dx, dy) = pose.direction();
            let max_sub = CELL_SIZE / 2.0;
            let n = (kin.move_step / max_sub).ceil().max(1.0) as usize;
            let sx = dx * kin.move_step / n as f64;
            let sy = dy * kin.move_step / n as f64;
            for _ in 0..n {
                slide_axis(map, &mut next, sx, true, kin.radius);
                slide_axis(map, &mut next, sy, false, kin.radius);
            }
        }
    }
    next
}
