//! Deterministic procedural house simulator.
//!
//! A [`House`] is an immutable 2D floor plan: rectangular rooms, doors on
//! shared walls, objects, and an occupancy grid at 0.25 m resolution. The
//! agent moves on the grid with 90-degree turns and one-cell forward steps,
//! and perceives the world through line-of-sight raycasts.

mod generate;
mod io;
mod perception;

pub use generate::{generate_house, GenError, HouseSpec};
pub use io::{house_from_json, house_to_json, HOUSE_SCHEMA_VERSION};
pub use perception::{look_around, Observation, Percept, PerceptKind, PerceptionConfig};

use std::collections::HashSet;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Grid resolution; also the forward-step distance, so one move-forward
/// action traverses exactly one cell.
pub const CELL_SIZE: f64 = 0.25;

/// Primitive-step cost charged for a full look-around sweep (one 90-degree
/// capture per facing).
pub const LOOK_AROUND_COST: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cell {
    pub x: i32,
    pub y: i32,
}

impl Cell {
    pub fn new(x: i32, y: i32) -> Cell {
        Cell { x, y }
    }

    /// Center of the cell in meters.
    pub fn center(&self) -> (f64, f64) {
        (
            (self.x as f64 + 0.5) * CELL_SIZE,
            (self.y as f64 + 0.5) * CELL_SIZE,
        )
    }

    /// Cell containing a point given in meters.
    pub fn containing(x: f64, y: f64) -> Cell {
        Cell {
            x: (x / CELL_SIZE).floor() as i32,
            y: (y / CELL_SIZE).floor() as i32,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CellKind {
    Free,
    Wall,
    /// A doorway; passability depends on the referenced door's open flag.
    Door(u16),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OccupancyGrid {
    pub width: usize,
    pub height: usize,
    pub cell_size: f64,
    cells: Vec<CellKind>,
}

impl OccupancyGrid {
    pub fn new(width: usize, height: usize) -> OccupancyGrid {
        OccupancyGrid {
            width,
            height,
            cell_size: CELL_SIZE,
            cells: vec![CellKind::Wall; width * height],
        }
    }

    pub fn in_bounds(&self, cell: Cell) -> bool {
        cell.x >= 0 && cell.y >= 0 && (cell.x as usize) < self.width && (cell.y as usize) < self.height
    }

    pub fn kind(&self, cell: Cell) -> CellKind {
        if !self.in_bounds(cell) {
            return CellKind::Wall;
        }
        self.cells[cell.y as usize * self.width + cell.x as usize]
    }

    pub fn set_kind(&mut self, cell: Cell, kind: CellKind) {
        assert!(self.in_bounds(cell));
        self.cells[cell.y as usize * self.width + cell.x as usize] = kind;
    }

    /// Row-major cell index, used for deterministic tie-breaking.
    pub fn index(&self, cell: Cell) -> usize {
        cell.y as usize * self.width + cell.x as usize
    }

    pub(crate) fn cells(&self) -> &[CellKind] {
        &self.cells
    }

    pub(crate) fn from_cells(width: usize, height: usize, cells: Vec<CellKind>) -> OccupancyGrid {
        assert_eq!(cells.len(), width * height);
        OccupancyGrid {
            width,
            height,
            cell_size: CELL_SIZE,
            cells,
        }
    }
}

/// Axis-aligned rectangle in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub min_x: f64,
    pub min_y: f64,
    pub max_x: f64,
    pub max_y: f64,
}

impl Rect {
    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= self.min_x && x <= self.max_x && y >= self.min_y && y <= self.max_y
    }

    pub fn center(&self) -> (f64, f64) {
        (
            (self.min_x + self.max_x) / 2.0,
            (self.min_y + self.max_y) / 2.0,
        )
    }

    pub fn expand_to(&mut self, x: f64, y: f64) {
        self.min_x = self.min_x.min(x);
        self.min_y = self.min_y.min(y);
        self.max_x = self.max_x.max(x);
        self.max_y = self.max_y.max(y);
    }

    pub fn intersects(&self, other: &Rect) -> bool {
        self.min_x < other.max_x
            && other.min_x < self.max_x
            && self.min_y < other.max_y
            && other.min_y < self.max_y
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Room {
    pub id: usize,
    pub bounds: Rect,
    pub room_type: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Door {
    pub id: usize,
    /// Door center in meters.
    pub position: (f64, f64),
    pub cell: Cell,
    pub connects: (usize, usize),
    pub open: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ObjectInstance {
    pub id: usize,
    pub category: String,
    pub position: [f64; 3],
    pub max_dimension: f64,
    pub room_id: usize,
}

/// Ground-truth world. Immutable after generation; safe to share across
/// concurrent episode runs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct House {
    pub id: u64,
    pub rooms: Vec<Room>,
    pub doors: Vec<Door>,
    pub objects: Vec<ObjectInstance>,
    pub grid: OccupancyGrid,
}

impl House {
    /// A cell is passable if it is free or an open doorway.
    pub fn passable(&self, cell: Cell) -> bool {
        match self.grid.kind(cell) {
            CellKind::Free => true,
            CellKind::Wall => false,
            CellKind::Door(idx) => self.doors[idx as usize].open,
        }
    }

    /// A cell blocks sight if it is a wall or a closed door.
    pub fn opaque(&self, cell: Cell) -> bool {
        !self.passable(cell)
    }

    /// Room whose bounds contain the point, if any.
    pub fn room_at(&self, x: f64, y: f64) -> Option<usize> {
        self.rooms.iter().find(|r| r.bounds.contains(x, y)).map(|r| r.id)
    }

    /// Room at the point, falling back to the nearest room when the point
    /// sits on a wall or doorway.
    pub fn room_at_or_nearest(&self, x: f64, y: f64) -> usize {
        if let Some(id) = self.room_at(x, y) {
            return id;
        }
        let mut best = (f64::INFINITY, 0usize);
        for r in &self.rooms {
            let dx = (r.bounds.min_x - x).max(0.0).max(x - r.bounds.max_x);
            let dy = (r.bounds.min_y - y).max(0.0).max(y - r.bounds.max_y);
            let d = dx * dx + dy * dy;
            if d < best.0 {
                best = (d, r.id);
            }
        }
        best.1
    }

    /// Flood-fill of all cells reachable from `from` through free cells and
    /// open doorways. Contains `from`.
    pub fn reachable_cells(&self, from: Cell) -> HashSet<Cell> {
        let mut seen = HashSet::new();
        if !self.passable(from) {
            return seen;
        }
        let mut queue = std::collections::VecDeque::new();
        seen.insert(from);
        queue.push_back(from);
        while let Some(c) = queue.pop_front() {
            for (dx, dy) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
                let n = Cell::new(c.x + dx, c.y + dy);
                if self.passable(n) && seen.insert(n) {
                    queue.push_back(n);
                }
            }
        }
        seen
    }

    /// Map a point in meters to its cell, or the nearest passable cell
    /// within a two-cell ring (object cells may sit against walls).
    pub fn nearest_passable_cell(&self, x: f64, y: f64) -> Option<Cell> {
        let c = Cell::containing(x, y);
        if self.passable(c) {
            return Some(c);
        }
        for radius in 1i32..=2 {
            let mut best: Option<(usize, Cell)> = None;
            for dy in -radius..=radius {
                for dx in -radius..=radius {
                    if dx.abs().max(dy.abs()) != radius {
                        continue;
                    }
                    let n = Cell::new(c.x + dx, c.y + dy);
                    if self.passable(n) {
                        let idx = self.grid.index(n);
                        if best.is_none_or(|(b, _)| idx < b) {
                            best = Some((idx, n));
                        }
                    }
                }
            }
            if let Some((_, n)) = best {
                return Some(n);
            }
        }
        None
    }
}

/// Axis-aligned agent heading.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Heading {
    East,
    North,
    West,
    South,
}

impl Heading {
    pub fn degrees(&self) -> u16 {
        match self {
            Heading::East => 0,
            Heading::North => 90,
            Heading::West => 180,
            Heading::South => 270,
        }
    }

    pub fn from_degrees(deg: u16) -> Option<Heading> {
        match deg {
            0 => Some(Heading::East),
            90 => Some(Heading::North),
            180 => Some(Heading::West),
            270 => Some(Heading::South),
            _ => None,
        }
    }

    pub fn left(&self) -> Heading {
        match self {
            Heading::East => Heading::North,
            Heading::North => Heading::West,
            Heading::West => Heading::South,
            Heading::South => Heading::East,
        }
    }

    pub fn right(&self) -> Heading {
        match self {
            Heading::East => Heading::South,
            Heading::South => Heading::West,
            Heading::West => Heading::North,
            Heading::North => Heading::East,
        }
    }

    /// Unit cell offset for a forward step.
    pub fn delta(&self) -> (i32, i32) {
        match self {
            Heading::East => (1, 0),
            Heading::North => (0, 1),
            Heading::West => (-1, 0),
            Heading::South => (0, -1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Action {
    MoveForward,
    TurnLeft,
    TurnRight,
    Stop,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgentState {
    pub cell: Cell,
    pub heading: Heading,
    pub step_count: usize,
    pub path_length: f64,
}

impl AgentState {
    pub fn new(cell: Cell, heading: Heading) -> AgentState {
        AgentState {
            cell,
            heading,
            step_count: 0,
            path_length: 0.0,
        }
    }

    /// Continuous position in meters (cell center).
    pub fn position(&self) -> (f64, f64) {
        self.cell.center()
    }
}

/// Execute one primitive action. Blocked moves leave the position unchanged
/// and report `collided = true`; step_count always increments.
pub fn step(house: &House, state: &AgentState, action: Action) -> (AgentState, bool) {
    let mut next = *state;
    next.step_count += 1;
    let mut collided = false;
    match action {
        Action::TurnLeft => next.heading = state.heading.left(),
        Action::TurnRight => next.heading = state.heading.right(),
        Action::Stop => {}
        Action::MoveForward => {
            let (dx, dy) = state.heading.delta();
            let target = Cell::new(state.cell.x + dx, state.cell.y + dy);
            if house.passable(target) {
                next.cell = target;
                next.path_length += CELL_SIZE;
            } else {
                collided = true;
            }
        }
    }
    (next, collided)
}

/// Pose snapshot recorded after every primitive action, for trace files and
/// trajectory rendering.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoseSample {
    pub step: usize,
    pub x: f64,
    pub y: f64,
    pub heading_deg: u16,
}

/// Single-threaded per-episode simulator session: agent state plus the
/// seeded perception noise stream.
pub struct SimSession<'a> {
    pub house: &'a House,
    pub state: AgentState,
    pub cfg: PerceptionConfig,
    rng: ChaCha8Rng,
    pub pose_log: Vec<PoseSample>,
}

impl<'a> SimSession<'a> {
    pub fn new(house: &'a House, state: AgentState, cfg: PerceptionConfig, seed: u64) -> Self {
        let mut s = SimSession {
            house,
            state,
            cfg,
            rng: ChaCha8Rng::seed_from_u64(seed),
            pose_log: Vec::new(),
        };
        s.log_pose();
        s
    }

    fn log_pose(&mut self) {
        let (x, y) = self.state.position();
        self.pose_log.push(PoseSample {
            step: self.state.step_count,
            x,
            y,
            heading_deg: self.state.heading.degrees(),
        });
    }

    pub fn step(&mut self, action: Action) -> bool {
        let (next, collided) = step(self.house, &self.state, action);
        self.state = next;
        self.log_pose();
        collided
    }

    /// Full 360-degree perception sweep at the current pose. Costs
    /// [`LOOK_AROUND_COST`] primitive steps.
    pub fn look_around(&mut self) -> Observation {
        let obs = look_around(self.house, &self.state, &self.cfg, &mut self.rng);
        self.state.step_count += LOOK_AROUND_COST;
        obs
    }
}
