//! Column-per-ray renderer producing single-channel frames.
//!
//! Column `c` depends only on the pose and the ray through that column, so a
//! caller that reads a handful of pixels can ask for just the columns it
//! needs; the result for those columns is identical to a full render.

use crate::Scalar;

use super::map::{Cell, LabyrinthMap, SurfaceId, CELL_SIZE};
use super::pose::AgentPose;

pub const CEILING_SHADE: f64 = 0.12;
pub const FLOOR_SHADE: f64 = 0.25;
pub const VEST_SHADE: f64 = 1.0;
/// Vest radius in cells.
pub const VEST_RADIUS: f64 = 0.35;
/// Vest height as a fraction of the wall height.
pub const VEST_HEIGHT: f64 = 0.6;

const BASE_SHADES: [f64; 9] = [0.55, 0.30, 0.38, 0.46, 0.62, 0.70, 0.78, 0.86, 0.94];
const STRIPE_DARK: f64 = 0.75;
const FACE_Y_DARK: f64 = 0.85;
const ATTENUATION: f64 = 0.04;

#[derive(Clone, Debug, PartialEq)]
pub struct Frame<T> {
    width: usize,
    height: usize,
    intensities: Vec<T>,
}

impl<T: Scalar> Frame<T> {
    pub fn new(width: usize, height: usize) -> Self {
        Frame {
            width,
            height,
            intensities: vec![T::zero(); width * height],
        }
    }

    pub fn from_vec(width: usize, height: usize, intensities: Vec<T>) -> Option<Self> {
        (intensities.len() == width * height).then_some(Frame {
            width,
            height,
            intensities,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn pixel(&self, x: usize, y: usize) -> T {
        self.intensities[y * self.width + x]
    }

    /// Row-major attribute vector handed to programs.
    #[inline]
    pub fn as_slice(&self) -> &[T] {
        &self.intensities
    }

    pub fn column(&self, x: usize) -> impl Iterator<Item = T> + '_ {
        (0..self.height).map(move |y| self.pixel(x, y))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Camera {
    pub width: usize,
    pub height: usize,
    /// Horizontal field of view in degrees.
    pub fov: f64,
}

impl Default for Camera {
    fn default() -> Self {
        Camera {
            width: 160,
            height: 120,
            fov: 90.0,
        }
    }
}

impl Camera {
    pub fn state_dim(&self) -> usize {
        self.width * self.height
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Face {
    /// Crossed a vertical grid line (east or west face).
    X,
    /// Crossed a horizontal grid line.
    Y,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ColumnHit {
    /// Distance to the camera plane, in cells.
    pub perp_distance: f64,
    pub surface: SurfaceId,
    pub face: Face,
    /// Position across the wall face in [0, 1).
    pub texture_u: f64,
    /// Perpendicular distance of an unoccluded vest hit, in cells.
    pub vest_distance: Option<f64>,
}

pub fn base_shade(surface: SurfaceId) -> f64 {
    BASE_SHADES
        .get(surface as usize)
        .copied()
        .unwrap_or(0.3 + 0.61 * ((surface as f64 * 0.618_033_988_75) % 1.0))
}

fn stripe(surface: SurfaceId, u: f64) -> f64 {
    let stripes = 2.0 + (surface % 3) as f64;
    if ((u * stripes * 2.0).floor() as i64) % 2 == 0 {
        1.0
    } else {
        STRIPE_DARK
    }
}

pub fn wall_shade(hit: &ColumnHit) -> f64 {
    let face = match hit.face {
        Face::X => 1.0,
        Face::Y => FACE_Y_DARK,
    };
    base_shade(hit.surface) * stripe(hit.surface, hit.texture_u) * face
        / (1.0 + ATTENUATION * hit.perp_distance)
}

/// Wall slice height in pixels (unclipped) for a perpendicular distance in cells.
pub fn slice_height(perp_distance: f64, screen_height: usize) -> f64 {
    screen_height as f64 / perp_distance
}

fn ray_circle(px: f64, py: f64, rx: f64, ry: f64, cx: f64, cy: f64, radius: f64) -> Option<f64> {
    let ox = px - cx;
    let oy = py - cy;
    let a = rx * rx + ry * ry;
    let b = 2.0 * (ox * rx + oy * ry);
    let c = ox * ox + oy * oy - radius * radius;
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return None;
    }
    let sq = disc.sqrt();
    let t0 = (-b - sq) / (2.0 * a);
    let t1 = (-b + sq) / (2.0 * a);
    if t0 > 0.0 {
        Some(t0)
    } else if t1 > 0.0 {
        Some(t1)
    } else {
        None
    }
}

/// Casts the ray for one screen column.
pub fn cast_column(map: &LabyrinthMap, pose: &AgentPose, camera: &Camera, column: usize) -> ColumnHit {
    let (dx, dy) = pose.direction();
    // right-hand vector in grid orientation
    let (qx, qy) = (-dy, dx);
    let plane = (camera.fov.to_radians() / 2.0).tan();
    let u = 2.0 * (column as f64 + 0.5) / camera.width as f64 - 1.0;
    let rx = dx + qx * plane * u;
    let ry = dy + qy * plane * u;

    let px = pose.x / CELL_SIZE;
    let py = pose.y / CELL_SIZE;
    let mut mx = px.floor() as i64;
    let mut my = py.floor() as i64;
    let delta_x = if rx == 0.0 { f64::INFINITY } else { (1.0 / rx).abs() };
    let delta_y = if ry == 0.0 { f64::INFINITY } else { (1.0 / ry).abs() };
    let (step_x, mut side_x) = if rx < 0.0 {
        (-1, (px - mx as f64) * delta_x)
    } else {
        (1, (mx as f64 + 1.0 - px) * delta_x)
    };
    let (step_y, mut side_y) = if ry < 0.0 {
        (-1, (py - my as f64) * delta_y)
    } else {
        (1, (my as f64 + 1.0 - py) * delta_y)
    };

    let max_steps = map.width() + map.height() + 2;
    let mut face = Face::X;
    let mut surface = 0;
    for _ in 0..max_steps {
        if side_x < side_y {
            side_x += delta_x;
            mx += step_x;
            face = Face::X;
        } else {
            side_y += delta_y;
            my += step_y;
            face = Face::Y;
        }
        if let Cell::Wall(s) = map.cell(mx, my) {
            surface = s;
            break;
        }
    }
    let perp = match face {
        Face::X => side_x - delta_x,
        Face::Y => side_y - delta_y,
    }
    .max(1e-6);
    let along = match face {
        Face::X => py + perp * ry,
        Face::Y => px + perp * rx,
    };
    let texture_u = along - along.floor();

    let vest_distance = map.vest().and_then(|(vx, vy)| {
        ray_circle(px, py, rx, ry, vx / CELL_SIZE, vy / CELL_SIZE, VEST_RADIUS).filter(|&t| t < perp)
    });

    ColumnHit {
        perp_distance: perp,
        surface,
        face,
        texture_u,
        vest_distance,
    }
}

struct ColumnShading {
    start: f64,
    end: f64,
    wall: f64,
    vest: Option<(f64, f64)>,
}

impl ColumnShading {
    fn new(hit: &ColumnHit, camera: &Camera) -> Self {
        let h = camera.height as f64;
        let line = slice_height(hit.perp_distance, camera.height);
        let vest = hit.vest_distance.map(|t| {
            let l = slice_height(t, camera.height);
            let bottom = h / 2.0 + l / 2.0;
            (bottom - VEST_HEIGHT * l, bottom)
        });
        ColumnShading {
            start: h / 2.0 - line / 2.0,
            end: h / 2.0 + line / 2.0,
            wall: wall_shade(hit),
            vest,
        }
    }

    #[inline]
    fn row(&self, y: usize) -> f64 {
        let yc = y as f64 + 0.5;
        match self.vest {
            Some((top, bottom)) if yc >= top && yc < bottom => VEST_SHADE,
            _ if yc < self.start => CEILING_SHADE,
            _ if yc >= self.end => FLOOR_SHADE,
            _ => self.wall,
        }
    }
}

/// Pixels to render, grouped by column.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PixelPlan {
    columns: Vec<(usize, Vec<usize>)>,
}

impl PixelPlan {
    /// Plan covering the given row-major attribute indices.
    pub fn from_attributes(attributes: impl IntoIterator<Item = usize>, camera: &Camera) -> Self {
        let mut by_column: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for a in attributes {
            if a < camera.state_dim() {
                by_column.entry(a % camera.width).or_default().push(a / camera.width);
            }
        }
        let columns = by_column
            .into_iter()
            .map(|(c, mut rows)| {
                rows.sort_unstable();
                rows.dedup();
                (c, rows)
            })
            .collect();
        PixelPlan { columns }
    }

    pub fn num_columns(&self) -> usize {
        self.columns.len()
    }

    pub fn num_pixels(&self) -> usize {
        self.columns.iter().map(|(_, r)| r.len()).sum()
    }
}

/// Renders whole columns (all of them when `columns` is `None`) into `frame`.
pub fn render_into<T: Scalar>(
    map: &LabyrinthMap,
    pose: &AgentPose,
    camera: &Camera,
    columns: Option<&[usize]>,
    frame: &mut Frame<T>,
) {
    if frame.width != camera.width || frame.height != camera.height {
        *frame = Frame::new(camera.width, camera.height);
    }
    let mut shade = |c: usize| {
        let s = ColumnShading::new(&cast_column(map, pose, camera, c), camera);
        for y in 0..camera.height {
            frame.intensities[y * camera.width + c] = T::from_f64_lossy(s.row(y));
        }
    };
    match columns {
        Some(cols) => cols.iter().for_each(|&c| shade(c)),
        None => (0..camera.width).for_each(shade),
    }
}

/// Renders only the planned pixels; they match a full render exactly.
pub fn render_pixels<T: Scalar>(
    map: &LabyrinthMap,
    pose: &AgentPose,
    camera: &Camera,
    plan: &PixelPlan,
    frame: &mut Frame<T>,
) {
    if frame.width != camera.width || frame.height != camera.height {
        *frame = Frame::new(camera.width, camera.height);
    }
    for (c, rows) in &plan.columns {
        let s = ColumnShading::new(&cast_column(map, pose, camera, *c), camera);
        for &y in rows {
            frame.intensities[y * camera.width + c] = T::from_f64_lossy(s.row(y));
        }
    }
}

pub fn render<T: Scalar>(map: &LabyrinthMap, pose: &AgentPose, camera: &Camera) -> Frame<T> {
    let mut frame = Frame::new(camera.width, camera.height);
    render_into(map, pose, camera, None, &mut frame);
    frame
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::pose::{step, Action, Kinematics};

    fn wall_pixels(frame: &Frame<f64>, column: usize) -> usize {
        frame
            .column(column)
            .filter(|&v| v != CEILING_SHADE && v != FLOOR_SHADE)
            .count()
    }

    #[test]
    fn rendering_is_deterministic() {
        let map = LabyrinthMap::my_way_home();
        let r = map.spawn_region(22).unwrap();
        let pose = AgentPose::new(r.centre.0, r.centre.1, 37.5);
        let cam = Camera::default();
        let a: Frame<f32> = render(&map, &pose, &cam);
        let b: Frame<f32> = render(&map, &pose, &cam);
        assert_eq!(a, b);
        assert_eq!(a.as_slice().len(), 19_200);
    }

    #[test]
    fn intensities_in_unit_interval() {
        let map = LabyrinthMap::my_way_home();
        let cam = Camera::default();
        for r in map.spawn_regions() {
            for h in [0.0, 90.0, 180.0, 270.0, 33.3] {
                let f: Frame<f64> = render(&map, &AgentPose::new(r.centre.0, r.centre.1, h), &cam);
                assert!(f.as_slice().iter().all(|v| v.is_finite() && (0.0..=1.0).contains(v)));
            }
        }
    }

    #[test]
    fn slice_height_halves_when_distance_doubles() {
        // agent on the horizontal mid-line of a 20-cell room, facing the east wall
        let map = LabyrinthMap::probe_room(4, 20.0 * CELL_SIZE, 4.0).unwrap();
        let cam = Camera::default();
        let wall_x = 21.0 * CELL_SIZE;
        let y = 11.0 * CELL_SIZE;
        let near: Frame<f64> = render(&map, &AgentPose::new(wall_x - 2.0 * CELL_SIZE, y, 0.0), &cam);
        let far: Frame<f64> = render(&map, &AgentPose::new(wall_x - 4.0 * CELL_SIZE, y, 0.0), &cam);
        let c = cam.width / 2;
        let (hn, hf) = (wall_pixels(&near, c) as f64, wall_pixels(&far, c) as f64);
        assert_eq!(hn, 60.0);
        assert_eq!(hf, 30.0);
        assert!((hn / hf - 2.0).abs() <= 2.0 / hf);
    }

    #[test]
    fn full_turn_reproduces_frame() {
        let map = LabyrinthMap::my_way_home();
        let kin = Kinematics::default();
        let cam = Camera::default();
        let r = map.spawn_region(16).unwrap();
        let start = AgentPose::new(r.centre.0, r.centre.1, 71.25);
        let mut p = start;
        for _ in 0..36 {
            p = step(&map, &p, Action::TurnRight, &kin);
        }
        let a: Frame<f32> = render(&map, &start, &cam);
        let b: Frame<f32> = render(&map, &p, &cam);
        assert_eq!(a, b);
    }

    #[test]
    fn partial_render_matches_full_render_on_requested_columns() {
        let map = LabyrinthMap::my_way_home();
        let cam = Camera::default();
        let r = map.spawn_region(25).unwrap();
        let pose = AgentPose::new(r.centre.0, r.centre.1, 270.0);
        let full: Frame<f32> = render(&map, &pose, &cam);
        let mut part = Frame::new(cam.width, cam.height);
        let cols = [0, 17, 80, 159];
        render_into(&map, &pose, &cam, Some(&cols), &mut part);
        for &c in &cols {
            assert!(full.column(c).eq(part.column(c)));
        }
        let attrs = [0usize, 5, 160 * 60 + 80, 160 * 119 + 159, 160 * 60 + 81];
        let plan = PixelPlan::from_attributes(attrs, &cam);
        assert_eq!((plan.num_columns(), plan.num_pixels()), (5, 5));
        let mut sparse: Frame<f32> = Frame::new(cam.width, cam.height);
        render_pixels(&map, &pose, &cam, &plan, &mut sparse);
        for a in attrs {
            assert_eq!(sparse.as_slice()[a], full.as_slice()[a]);
        }
    }

    #[test]
    fn vest_visible_down_the_final_corridor() {
        // corridor 25 lines up with the vest corridor through room 26
        let map = LabyrinthMap::my_way_home();
        let cam = Camera::default();
        let r = map.spawn_region(25).unwrap();
        let facing: Frame<f64> = render(&map, &AgentPose::new(r.centre.0, r.centre.1, 270.0), &cam);
        assert!(facing.as_slice().contains(&VEST_SHADE));
        let away: Frame<f64> = render(&map, &AgentPose::new(r.centre.0, r.centre.1, 90.0), &cam);
        assert!(!away.as_slice().contains(&VEST_SHADE));
    }

    #[test]
    fn vest_hidden_behind_walls() {
        let map = LabyrinthMap::my_way_home();
        let cam = Camera::default();
        let r = map.spawn_region(10).unwrap();
        for h in (0..36).map(|i| i as f64 * 10.0) {
            let f: Frame<f64> = render(&map, &AgentPose::new(r.centre.0, r.centre.1, h), &cam);
            assert!(!f.as_slice().contains(&VEST_SHADE));
        }
    }

    #[test]
    fn rooms_look_different() {
        let map = LabyrinthMap::my_way_home();
        assert_ne!(base_shade(1), base_shade(2));
        let cam = Camera::default();
        let a: Frame<f32> = render(&map, &AgentPose::new(map.spawn_region(10).unwrap().centre.0, map.spawn_region(10).unwrap().centre.1, 0.0), &cam);
        let b: Frame<f32> = render(&map, &AgentPose::new(map.spawn_region(12).unwrap().centre.0, map.spawn_region(12).unwrap().centre.1, 0.0), &cam);
        assert_ne!(a, b);
    }
}
