//! Labyrinth geometry: an occupancy grid of wall and floor cells, labelled
//! regions, and the goal.

use std::collections::VecDeque;
use std::fmt::Write as _;

use crate::{Error, Result};

/// Side length of one grid cell in world units.
pub const CELL_SIZE: f64 = 16.0;

/// Surface shared by every corridor wall.
pub const CORRIDOR_SURFACE: SurfaceId = 0;

/// Room side in cells. Corridors are as long as a room and a third as wide.
pub const ROOM_CELLS: usize = 9;
pub const CORRIDOR_WIDTH: usize = ROOM_CELLS / 3;
const SLOT_PITCH: usize = 2 * ROOM_CELLS;

pub type SurfaceId = u8;

/// Display number of a spawnable room or corridor.
pub type RegionLabel = u16;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cell {
    Floor,
    Wall(SurfaceId),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RegionKind {
    Room,
    Corridor,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Region {
    pub label: RegionLabel,
    pub kind: RegionKind,
    pub surface: SurfaceId,
    /// Floor cells as (column, row).
    pub cells: Vec<(usize, usize)>,
    /// Spawn point in world units.
    pub centre: (f64, f64),
    pub spawnable: bool,
}

impl Region {
    pub fn centre_cell(&self) -> (usize, usize) {
        (
            (self.centre.0 / CELL_SIZE).floor() as usize,
            (self.centre.1 / CELL_SIZE).floor() as usize,
        )
    }

    /// Bounding box of the region's cells, in cells: (x0, y0, x1, y1), exclusive max.
    pub fn bounds(&self) -> (usize, usize, usize, usize) {
        let x0 = self.cells.iter().map(|c| c.0).min().unwrap_or(0);
        let y0 = self.cells.iter().map(|c| c.1).min().unwrap_or(0);
        let x1 = self.cells.iter().map(|c| c.0 + 1).max().unwrap_or(0);
        let y1 = self.cells.iter().map(|c| c.1 + 1).max().unwrap_or(0);
        (x0, y0, x1, y1)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LabyrinthMap {
    width: usize,
    height: usize,
    cells: Vec<Cell>,
    region_of: Vec<Option<usize>>,
    regions: Vec<Region>,
    goal: Vec<(usize, usize)>,
    vest: Option<(f64, f64)>,
}

#[derive(Clone, Copy)]
enum Dir {
    East,
    South,
}

struct Slot(usize, usize);

impl Slot {
    fn origin(&self) -> (usize, usize) {
        (1 + SLOT_PITCH * self.0, 1 + SLOT_PITCH * self.1)
    }
}

fn room_rect(slot: Slot) -> (usize, usize, usize, usize) {
    let (x, y) = slot.origin();
    (x, y, ROOM_CELLS, ROOM_CELLS)
}

fn corridor_rect(from: Slot, dir: Dir) -> (usize, usize, usize, usize) {
    let (x, y) = from.origin();
    match dir {
        Dir::East => (x + ROOM_CELLS, y + CORRIDOR_WIDTH, ROOM_CELLS, CORRIDOR_WIDTH),
        Dir::South => (x + CORRIDOR_WIDTH, y + ROOM_CELLS, CORRIDOR_WIDTH, ROOM_CELLS),
    }
}

struct Builder {
    width: usize,
    height: usize,
    region_of: Vec<Option<usize>>,
    regions: Vec<Region>,
}

impl Builder {
    fn new(width: usize, height: usize) -> Self {
        Builder {
            width,
            height,
            region_of: vec![None; width * height],
            regions: Vec::new(),
        }
    }

    fn carve(
        &mut self,
        label: RegionLabel,
        kind: RegionKind,
        surface: SurfaceId,
        (x0, y0, w, h): (usize, usize, usize, usize),
        spawnable: bool,
    ) {
        let index = self.regions.len();
        let mut cells = Vec::with_capacity(w * h);
        for y in y0..y0 + h {
            for x in x0..x0 + w {
                debug_assert!(self.region_of[y * self.width + x].is_none());
                self.region_of[y * self.width + x] = Some(index);
                cells.push((x, y));
            }
        }
        let centre = (
            (x0 as f64 + w as f64 / 2.0) * CELL_SIZE,
            (y0 as f64 + h as f64 / 2.0) * CELL_SIZE,
        );
        self.regions.push(Region {
            label,
            kind,
            surface,
            cells,
            centre,
            spawnable,
        });
    }

    /// Walls take the surface of an adjacent room if there is one, otherwise
    /// the corridor surface.
    fn finish(self, goal: Vec<(usize, usize)>, default_surface: SurfaceId) -> LabyrinthMap {
        let Builder {
            width,
            height,
            region_of,
            regions,
        } = self;
        let mut cells = vec![Cell::Floor; width * height];
        for y in 0..height {
            for x in 0..width {
                if region_of[y * width + x].is_some() {
                    continue;
                }
                let mut surface = None;
                for dy in -1i64..=1 {
                    for dx in -1i64..=1 {
                        let nx = x as i64 + dx;
                        let ny = y as i64 + dy;
                        if nx < 0 || ny < 0 || nx >= width as i64 || ny >= height as i64 {
                            continue;
                        }
                        if let Some(r) = region_of[ny as usize * width + nx as usize] {
                            let region = &regions[r];
                            match (surface, region.kind) {
                                (_, RegionKind::Room) => surface = Some(region.surface),
                                (None, RegionKind::Corridor) => surface = Some(region.surface),
                                _ => {}
                            }
                        }
                    }
                }
                cells[y * width + x] = Cell::Wall(surface.unwrap_or(default_surface));
            }
        }
        let vest = goal_centre(&goal);
        LabyrinthMap {
            width,
            height,
            cells,
            region_of,
            regions,
            goal,
            vest,
        }
    }
}

fn goal_centre(goal: &[(usize, usize)]) -> Option<(f64, f64)> {
    if goal.is_empty() {
        return None;
    }
    let n = goal.len() as f64;
    let sx: f64 = goal.iter().map(|c| c.0 as f64 + 0.5).sum();
    let sy: f64 = goal.iter().map(|c| c.1 as f64 + 0.5).sum();
    Some((sx / n * CELL_SIZE, sy / n * CELL_SIZE))
}

/// Room labels in surface order: room `ROOM_LABELS[i]` has surface `i + 1`.
pub const ROOM_LABELS: [RegionLabel; 8] = [10, 12, 14, 16, 18, 22, 24, 26];

impl LabyrinthMap {
    /// The eight-room, ten-corridor labyrinth.
    ///
    /// Rooms sit on a 4 x 3 lattice of slots (north is row 0):
    ///
    /// ```text
    ///          col 0      col 1      col 2      col 3
    /// row 0               [14] -21- [22] -23- [24]
    ///                      |15        |19        |25
    /// row 1    [12] -13- [16] -17- [18]       [26]
    ///           |11                   |20        |vest
    /// row 2    [10]
    /// ```
    ///
    /// Corridor 20 is a dead end, as is the unlabelled corridor holding the
    /// vest south of room 26. The labelled rooms and corridors 10..=26 are the
    /// seventeen spawn regions.
    pub fn my_way_home() -> Self {
        let width = 1 + 4 * ROOM_CELLS + 3 * ROOM_CELLS + 1;
        let height = 1 + 3 * ROOM_CELLS + 2 * ROOM_CELLS + 1;
        let mut b = Builder::new(width, height);

        let rooms: [(RegionLabel, Slot); 8] = [
            (10, Slot(0, 2)),
            (12, Slot(0, 1)),
            (14, Slot(1, 0)),
            (16, Slot(1, 1)),
            (18, Slot(2, 1)),
            (22, Slot(2, 0)),
            (24, Slot(3, 0)),
            (26, Slot(3, 1)),
        ];
        for (label, slot) in rooms {
            let surface = room_surface(label).expect("room label");
            b.carve(label, RegionKind::Room, surface, room_rect(slot), true);
        }

        let corridors: [(RegionLabel, Slot, Dir); 9] = [
            (11, Slot(0, 1), Dir::South),
            (13, Slot(0, 1), Dir::East),
            (15, Slot(1, 0), Dir::South),
            (17, Slot(1, 1), Dir::East),
            (19, Slot(2, 0), Dir::South),
            (20, Slot(2, 1), Dir::South),
            (21, Slot(1, 0), Dir::East),
            (23, Slot(2, 0), Dir::East),
            (25, Slot(3, 0), Dir::South),
        ];
        for (label, slot, dir) in corridors {
            b.carve(
                label,
                RegionKind::Corridor,
                CORRIDOR_SURFACE,
                corridor_rect(slot, dir),
                true,
            );
        }

        let (gx, gy, gw, gh) = corridor_rect(Slot(3, 1), Dir::South);
        b.carve(0, RegionKind::Corridor, CORRIDOR_SURFACE, (gx, gy, gw, gh), false);
        let mut goal = Vec::new();
        for y in gy + gh - CORRIDOR_WIDTH..gy + gh {
            for x in gx..gx + gw {
                goal.push((x, y));
            }
        }

        let map = b.finish(goal, CORRIDOR_SURFACE);
        debug_assert!(map.validate().is_ok());
        map
    }

    /// A single square room with no goal and one spawn region at its centre.
    ///
    /// `side_length` is in world units and is rounded up to whole cells.
    pub fn probe_room(surface: SurfaceId, side_length: f64, agent_radius: f64) -> Result<Self> {
        if !side_length.is_finite() || side_length < 2.0 * agent_radius || side_length <= 0.0 {
            return Err(Error::InvalidGeometry(format!(
                "probe room side {side_length} is smaller than the agent diameter {}",
                2.0 * agent_radius
            )));
        }
        let n = (side_length / CELL_SIZE).ceil().max(1.0) as usize;
        let mut b = Builder::new(n + 2, n + 2);
        b.carve(0, RegionKind::Room, surface, (1, 1, n, n), true);
        Ok(b.finish(Vec::new(), surface))
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// World extent (width, height) in world units.
    pub fn world_size(&self) -> (f64, f64) {
        (self.width as f64 * CELL_SIZE, self.height as f64 * CELL_SIZE)
    }

    /// Cells outside the grid read as walls.
    #[inline]
    pub fn cell(&self, x: i64, y: i64) -> Cell {
        if x < 0 || y < 0 || x >= self.width as i64 || y >= self.height as i64 {
            return Cell::Wall(CORRIDOR_SURFACE);
        }
        self.cells[y as usize * self.width + x as usize]
    }

    #[inline]
    pub fn is_wall(&self, x: i64, y: i64) -> bool {
        matches!(self.cell(x, y), Cell::Wall(_))
    }

    pub fn regions(&self) -> &[Region] {
        &self.regions
    }

    pub fn spawn_regions(&self) -> impl Iterator<Item = &Region> + '_ {
        self.regions.iter().filter(|r| r.spawnable)
    }

    pub fn spawn_labels(&self) -> Vec<RegionLabel> {
        self.spawn_regions().map(|r| r.label).collect()
    }

    pub fn spawn_region(&self, label: RegionLabel) -> Result<&Region> {
        self.spawn_regions()
            .find(|r| r.label == label)
            .ok_or(Error::UnknownRegion(label))
    }

    pub fn region_at(&self, x: usize, y: usize) -> Option<&Region> {
        if x >= self.width || y >= self.height {
            return None;
        }
        self.region_of[y * self.width + x].map(|i| &self.regions[i])
    }

    pub fn goal_cells(&self) -> &[(usize, usize)] {
        &self.goal
    }

    pub fn is_goal_cell(&self, x: usize, y: usize) -> bool {
        self.goal.contains(&(x, y))
    }

    /// Centre of the goal region in world units, where the vest is drawn.
    pub fn vest(&self) -> Option<(f64, f64)> {
        self.vest
    }

    /// Checks the structural invariants: spawn regions are floor and disjoint
    /// from the goal, and every floor cell is 4-connected to the goal.
    pub fn validate(&self) -> Result<()> {
        for region in self.spawn_regions() {
            for &(x, y) in &region.cells {
                if self.is_wall(x as i64, y as i64) {
                    return Err(Error::InvalidGeometry(format!(
                        "region {} has a wall at ({x}, {y})",
                        region.label
                    )));
                }
                if self.is_goal_cell(x, y) {
                    return Err(Error::InvalidGeometry(format!(
                        "region {} overlaps the goal",
                        region.label
                    )));
                }
            }
        }
        if self.goal.is_empty() {
            return Ok(());
        }
        let mut seen = vec![false; self.width * self.height];
        let mut queue: VecDeque<(usize, usize)> = self.goal.iter().copied().collect();
        for &(x, y) in &self.goal {
            seen[y * self.width + x] = true;
        }
        while let Some((x, y)) = queue.pop_front() {
            for (dx, dy) in [(1i64, 0i64), (-1, 0), (0, 1), (0, -1)] {
                let nx = x as i64 + dx;
                let ny = y as i64 + dy;
                if self.is_wall(nx, ny) {
                    continue;
                }
                let i = ny as usize * self.width + nx as usize;
                if !seen[i] {
                    seen[i] = true;
                    queue.push_back((nx as usize, ny as usize));
                }
            }
        }
        for y in 0..self.height {
            for x in 0..self.width {
                if !self.is_wall(x as i64, y as i64) && !seen[y * self.width + x] {
                    return Err(Error::InvalidGeometry(format!(
                        "floor cell ({x}, {y}) cannot reach the goal"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Plain-text export: a legend, the grid (one character per cell) and the
    /// region table.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str("# labyrinth map v1\n");
        out.push_str("# legend: '.' floor, 'G' goal floor, '0'-'9' 'a'-'z' wall with that surface id\n");
        let _ = writeln!(out, "size {} {}", self.width, self.height);
        let _ = writeln!(out, "cell_size {CELL_SIZE}");
        for y in 0..self.height {
            for x in 0..self.width {
                let c = match self.cells[y * self.width + x] {
                    Cell::Floor if self.is_goal_cell(x, y) => 'G',
                    Cell::Floor => '.',
                    Cell::Wall(s) => std::char::from_digit(s as u32 % 36, 36).unwrap_or('#'),
                };
                out.push(c);
            }
            out.push('\n');
        }
        out.push_str("# region label kind surface spawnable centre_x centre_y cells\n");
        for r in &self.regions {
            let kind = match r.kind {
                RegionKind::Room => "room",
                RegionKind::Corridor => "corridor",
            };
            let _ = writeln!(
                out,
                "region {} {} {} {} {} {} {}",
                r.label,
                kind,
                r.surface,
                r.spawnable,
                r.centre.0,
                r.centre.1,
                r.cells.len()
            );
        }
        out
    }
}

/// Surface id of a labelled room, `None` for corridors.
pub fn room_surface(label: RegionLabel) -> Option<SurfaceId> {
    ROOM_LABELS
        .iter()
        .position(|&l| l == label)
        .map(|i| i as SurfaceId + 1)
}
