//! Perception queries: line-of-sight raycasting over the occupancy grid.
//!
//! A look-around sweep covers the full 360 degrees (four 90-degree captures)
//! and reports labeled percepts with estimated 3D positions. Ground-truth
//! mode bypasses the range/size/noise gates and reports the exact entities
//! of the current room.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{AgentState, Cell, CellKind, House, CELL_SIZE};

/// Reference dimension used for the angular-size gate on doors.
const DOOR_DIMENSION: f64 = 0.9;
/// Ray fan density for wall detection (one ray per 5 degrees).
const WALL_RAYS: usize = 72;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PerceptionConfig {
    pub fov_degrees: f64,
    pub max_range: f64,
    /// Angular-size cutoff in radians; the analog of dropping tiny
    /// segmentation masks.
    pub min_angular_size: f64,
    pub position_noise_sigma: f64,
    pub gt_mode: bool,
}

impl Default for PerceptionConfig {
    fn default() -> Self {
        PerceptionConfig {
            fov_degrees: 90.0,
            max_range: 5.0,
            min_angular_size: 0.02,
            position_noise_sigma: 0.05,
            gt_mode: false,
        }
    }
}

impl PerceptionConfig {
    /// Ground-truth perception: exact entities of the current room, no noise.
    pub fn ground_truth() -> Self {
        PerceptionConfig {
            position_noise_sigma: 0.0,
            gt_mode: true,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PerceptKind {
    Object,
    Door,
    WallSegment,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Percept {
    pub category: String,
    pub position: [f64; 3],
    pub kind: PerceptKind,
    pub door_open: Option<bool>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Observation {
    pub pose: AgentState,
    pub percepts: Vec<Percept>,
}

/// True if the straight segment between two points crosses no wall and no
/// closed door. `ignore` exempts one cell (used when sighting a door cell
/// itself).
pub fn line_of_sight(house: &House, from: (f64, f64), to: (f64, f64), ignore: Option<Cell>) -> bool {
    let dx = to.0 - from.0;
    let dy = to.1 - from.1;
    let len = (dx * dx + dy * dy).sqrt();
    if len < 1e-9 {
        return true;
    }
    let steps = (len / (CELL_SIZE * 0.25)).ceil() as usize;
    let start_cell = Cell::containing(from.0, from.1);
    for i in 1..steps {
        let t = i as f64 / steps as f64;
        let px = from.0 + dx * t;
        let py = from.1 + dy * t;
        // Do not let the target's immediate surroundings occlude it.
        if (1.0 - t) * len < CELL_SIZE * 0.5 {
            break;
        }
        let cell = Cell::containing(px, py);
        if cell == start_cell || Some(cell) == ignore {
            continue;
        }
        if house.opaque(cell) {
            return false;
        }
    }
    true
}

fn truncated_gauss(rng: &mut ChaCha8Rng, sigma: f64) -> f64 {
    if sigma <= 0.0 {
        return 0.0;
    }
    loop {
        // Box-Muller; resample outside 3 sigma.
        let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
        let u2: f64 = rng.gen_range(0.0..1.0);
        let z = (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos();
        if z.abs() <= 3.0 {
            return z * sigma;
        }
    }
}

/// Full 360-degree perception sweep at the given pose.
pub fn look_around(
    house: &House,
    state: &AgentState,
    cfg: &PerceptionConfig,
    rng: &mut ChaCha8Rng,
) -> Observation {
    let pose = *state;
    let eye = state.position();
    let mut percepts = Vec::new();

    if cfg.gt_mode {
        let room = house.room_at_or_nearest(eye.0, eye.1);
        for obj in house.objects.iter().filter(|o| o.room_id == room) {
            percepts.push(Percept {
                category: obj.category.clone(),
                position: obj.position,
                kind: PerceptKind::Object,
                door_open: None,
            });
        }
        for door in house.doors.iter().filter(|d| d.connects.0 == room || d.connects.1 == room) {
            percepts.push(Percept {
                category: "door".into(),
                position: [door.position.0, door.position.1, 0.0],
                kind: PerceptKind::Door,
                door_open: Some(door.open),
            });
        }
        // Exact room extent, reported as the four wall corners.
        let b = house.rooms[room].bounds;
        for (x, y) in [
            (b.min_x, b.min_y),
            (b.min_x, b.max_y),
            (b.max_x, b.min_y),
            (b.max_x, b.max_y),
        ] {
            percepts.push(Percept {
                category: "wall".into(),
                position: [x, y, 0.0],
                kind: PerceptKind::WallSegment,
                door_open: None,
            });
        }
        return Observation { pose, percepts };
    }

    for obj in &house.objects {
        let dx = obj.position[0] - eye.0;
        let dy = obj.position[1] - eye.1;
        let dist = (dx * dx + dy * dy).sqrt();
        if dist > cfg.max_range {
            continue;
        }
        let angular = obj.max_dimension / dist.max(1e-6);
        if angular < cfg.min_angular_size {
            continue;
        }
        if !line_of_sight(house, eye, (obj.position[0], obj.position[1]), None) {
            continue;
        }
        let mut pos = obj.position;
        pos[0] += truncated_gauss(rng, cfg.position_noise_sigma);
        pos[1] += truncated_gauss(rng, cfg.position_noise_sigma);
        percepts.push(Percept {
            category: obj.category.clone(),
            position: pos,
            kind: PerceptKind::Object,
            door_open: None,
        });
    }

    for door in &house.doors {
        let dx = door.position.0 - eye.0;
        let dy = door.position.1 - eye.1;
        let dist = (dx * dx + dy * dy).sqrt();
        if dist > cfg.max_range {
            continue;
        }
        if DOOR_DIMENSION / dist.max(1e-6) < cfg.min_angular_size {
            continue;
        }
        if !line_of_sight(house, eye, door.position, Some(door.cell)) {
            continue;
        }
        let mut pos = [door.position.0, door.position.1, 0.0];
        pos[0] += truncated_gauss(rng, cfg.position_noise_sigma);
        pos[1] += truncated_gauss(rng, cfg.position_noise_sigma);
        percepts.push(Percept {
            category: "door".into(),
            position: pos,
            kind: PerceptKind::Door,
            door_open: Some(door.open),
        });
    }

    // Wall hits from a fan of rays; rays pass through open doorways.
    for i in 0..WALL_RAYS {
        let theta = i as f64 / WALL_RAYS as f64 * std::f64::consts::TAU;
        let (s, c) = theta.sin_cos();
        let step_len = CELL_SIZE * 0.4;
        let mut t = step_len;
        while t <= cfg.max_range {
            let px = eye.0 + c * t;
            let py = eye.1 + s * t;
            let cell = Cell::containing(px, py);
            match house.grid.kind(cell) {
                CellKind::Wall => {
                    let mut pos = [px, py, 0.0];
                    pos[0] += truncated_gauss(rng, cfg.position_noise_sigma);
                    pos[1] += truncated_gauss(rng, cfg.position_noise_sigma);
                    percepts.push(Percept {
                        category: "wall".into(),
                        position: pos,
                        kind: PerceptKind::WallSegment,
                        door_open: None,
                    });
                    break;
                }
                CellKind::Door(idx) if !house.doors[idx as usize].open => break,
                _ => {}
            }
            t += step_len;
        }
    }

    Observation { pose, percepts }
}
