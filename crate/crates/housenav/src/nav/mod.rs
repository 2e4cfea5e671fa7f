//! Point-goal navigation: an exact A* oracle and a stochastic surrogate
//! calibrated to published point-goal success statistics.
//!
//! Both planners execute through the simulator session as primitive
//! turn/move actions, so replaying a `NavResult`'s action list reproduces
//! the terminal pose exactly.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::sim::{Action, AgentState, Cell, House, SimSession, CELL_SIZE};

/// Point-goal sub-task: reach a coordinate within the success radius under
/// a primitive-step cap.
#[derive(Debug, Clone, Copy)]
pub struct PointGoal {
    pub target: (f64, f64),
    pub success_radius: f64,
    pub max_steps: usize,
}

impl PointGoal {
    pub fn new(target: (f64, f64)) -> PointGoal {
        PointGoal {
            target,
            success_radius: 1.5,
            max_steps: 300,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NavResult {
    pub success: bool,
    pub steps_taken: usize,
    pub path_length: f64,
    pub actions: Vec<Action>,
    pub end_state: AgentState,
}

/// Calibration targets for the stochastic surrogate.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SurrogateParams {
    pub sr_same_room: f64,
    pub spl_same_room: f64,
    pub sr_global: f64,
    pub spl_global: f64,
    pub rng_seed: u64,
}

impl SurrogateParams {
    pub fn calibrated(rng_seed: u64) -> SurrogateParams {
        SurrogateParams {
            sr_same_room: 0.985,
            spl_same_room: 0.930,
            sr_global: 0.845,
            spl_global: 0.782,
            rng_seed,
        }
    }

    /// Degenerate parameters: behaves exactly like the oracle.
    pub fn oracle_equivalent(rng_seed: u64) -> SurrogateParams {
        SurrogateParams {
            sr_same_room: 1.0,
            spl_same_room: 1.0,
            sr_global: 1.0,
            spl_global: 1.0,
            rng_seed,
        }
    }
}

/// Minimum-length 4-connected path between two cells, inclusive of both
/// endpoints. Manhattan heuristic, ties broken toward the lower cell index.
pub fn astar_path(house: &House, from: Cell, to: Cell) -> Option<Vec<Cell>> {
    if !house.passable(from) || !house.passable(to) {
        return None;
    }
    let grid = &house.grid;
    let manhattan = |c: Cell| ((c.x - to.x).abs() + (c.y - to.y).abs()) as u32;

    let mut g_score: std::collections::HashMap<Cell, u32> = std::collections::HashMap::new();
    let mut came: std::collections::HashMap<Cell, Cell> = std::collections::HashMap::new();
    let mut open: BinaryHeap<Reverse<(u32, usize, Cell)>> = BinaryHeap::new();
    g_score.insert(from, 0);
    open.push(Reverse((manhattan(from), grid.index(from), from)));

    while let Some(Reverse((_, _, cell))) = open.pop() {
        if cell == to {
            let mut path = vec![to];
            let mut cur = to;
            while let Some(&prev) = came.get(&cur) {
                path.push(prev);
                cur = prev;
            }
            path.reverse();
            return Some(path);
        }
        let g = g_score[&cell];
        for (dx, dy) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
            let n = Cell::new(cell.x + dx, cell.y + dy);
            if !house.passable(n) {
                continue;
            }
            let tentative = g + 1;
            if g_score.get(&n).is_none_or(|&old| tentative < old) {
                g_score.insert(n, tentative);
                came.insert(n, cell);
                open.push(Reverse((tentative + manhattan(n), grid.index(n), n)));
            }
        }
    }
    None
}

/// A* travel distance in meters between two points, or `None` if
/// unreachable.
pub fn astar_distance(house: &House, from: (f64, f64), to: (f64, f64)) -> Option<f64> {
    let a = house.nearest_passable_cell(from.0, from.1)?;
    let b = house.nearest_passable_cell(to.0, to.1)?;
    astar_path(house, a, b).map(|p| (p.len() - 1) as f64 * CELL_SIZE)
}

fn quarter(h: crate::sim::Heading) -> i32 {
    (h.degrees() / 90) as i32
}

fn turns_between(cur: crate::sim::Heading, dx: i32, dy: i32) -> Vec<Action> {
    let desired = match (dx, dy) {
        (1, 0) => 0,
        (0, 1) => 1,
        (-1, 0) => 2,
        (0, -1) => 3,
        _ => unreachable!("route cells must be 4-adjacent"),
    };
    match (desired - quarter(cur)).rem_euclid(4) {
        0 => vec![],
        1 => vec![Action::TurnLeft],
        2 => vec![Action::TurnLeft, Action::TurnLeft],
        3 => vec![Action::TurnRight],
        _ => unreachable!(),
    }
}

/// Execute a cell route as turn/move primitives under a step cap. Returns
/// the actions issued and whether the full route fit inside the cap.
fn execute_route(session: &mut SimSession<'_>, route: &[Cell], max_steps: usize) -> (Vec<Action>, bool) {
    let mut actions = Vec::new();
    for window in route.windows(2) {
        let (cur, next) = (window[0], window[1]);
        let (dx, dy) = (next.x - cur.x, next.y - cur.y);
        for action in turns_between(session.state.heading, dx, dy)
            .into_iter()
            .chain(std::iter::once(Action::MoveForward))
        {
            if actions.len() >= max_steps {
                return (actions, false);
            }
            session.step(action);
            actions.push(action);
        }
    }
    (actions, true)
}

fn euclid(a: (f64, f64), b: (f64, f64)) -> f64 {
    ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt()
}

fn result(session: &SimSession<'_>, goal: &PointGoal, actions: Vec<Action>, start_len: f64) -> NavResult {
    let within = euclid(session.state.position(), goal.target) <= goal.success_radius;
    NavResult {
        success: within && actions.len() <= goal.max_steps,
        steps_taken: actions.len(),
        path_length: session.state.path_length - start_len,
        actions,
        end_state: session.state,
    }
}

fn failed_result(session: &SimSession<'_>) -> NavResult {
    NavResult {
        success: false,
        steps_taken: 0,
        path_length: 0.0,
        actions: Vec::new(),
        end_state: session.state,
    }
}

/// Oracle low-level planner: executes the exact A* path as primitives.
pub fn navigate_ornav(session: &mut SimSession<'_>, goal: &PointGoal) -> NavResult {
    let start_len = session.state.path_length;
    if euclid(session.state.position(), goal.target) <= goal.success_radius {
        return result(session, goal, Vec::new(), start_len);
    }
    let Some(goal_cell) = session.house.nearest_passable_cell(goal.target.0, goal.target.1) else {
        return failed_result(session);
    };
    let Some(path) = astar_path(session.house, session.state.cell, goal_cell) else {
        return failed_result(session);
    };
    let (actions, _) = execute_route(session, &path, goal.max_steps);
    result(session, goal, actions, start_len)
}

/// Stochastic point-goal surrogate, calibrated so that empirical success
/// rate matches the configured rate and the mean shortest/actual path
/// ratio over successes matches spl/sr. Deterministic per (seed,
/// invocation index).
pub struct PnavSurrogate {
    pub params: SurrogateParams,
    invocation: u64,
}

impl PnavSurrogate {
    pub fn new(params: SurrogateParams) -> PnavSurrogate {
        PnavSurrogate {
            params,
            invocation: 0,
        }
    }

    pub fn navigate(&mut self, session: &mut SimSession<'_>, goal: &PointGoal) -> NavResult {
        self.invocation += 1;
        let mut rng = ChaCha8Rng::seed_from_u64(
            self.params
                .rng_seed
                .wrapping_add(self.invocation.wrapping_mul(0x9E37_79B9_7F4A_7C15)),
        );
        let start = session.state.position();
        let same_room = match (
            session.house.room_at(start.0, start.1),
            session.house.room_at(goal.target.0, goal.target.1),
        ) {
            (Some(a), Some(b)) => a == b,
            _ => false,
        };
        let (sr, spl) = if same_room {
            (self.params.sr_same_room, self.params.spl_same_room)
        } else {
            (self.params.sr_global, self.params.spl_global)
        };

        if !rng.gen_bool(sr.clamp(0.0, 1.0)) {
            return self.random_walk_failure(session, &mut rng);
        }

        let start_len = session.state.path_length;
        if euclid(start, goal.target) <= goal.success_radius {
            return result(session, goal, Vec::new(), start_len);
        }
        let Some(goal_cell) = session.house.nearest_passable_cell(goal.target.0, goal.target.1)
        else {
            return failed_result(session);
        };
        let Some(path) = astar_path(session.house, session.state.cell, goal_cell) else {
            return failed_result(session);
        };

        let route = self.inflate_with_detours(session.house, path, sr, spl, &mut rng);
        let (actions, _) = execute_route(session, &route, goal.max_steps);
        result(session, goal, actions, start_len)
    }

    /// Insert out-and-back detours so the expected shortest/actual ratio
    /// over successes equals spl/sr.
    fn inflate_with_detours(
        &self,
        house: &House,
        path: Vec<Cell>,
        sr: f64,
        spl: f64,
        rng: &mut ChaCha8Rng,
    ) -> Vec<Cell> {
        let shortest = (path.len() - 1) as f64 * CELL_SIZE;
        let target_ratio = (spl / sr).min(1.0);
        if shortest <= 0.0 || target_ratio >= 1.0 - 1e-12 {
            return path;
        }
        let lo = (target_ratio - 0.05).max(0.5);
        let hi = (target_ratio + 0.05).min(1.0);
        let ratio = if hi > lo { rng.gen_range(lo..hi) } else { target_ratio };
        // Each detour pair adds two moves (0.5 m); probabilistic rounding
        // keeps the expectation on target.
        let want = shortest * (1.0 / ratio - 1.0) / (2.0 * CELL_SIZE);
        let mut pairs = want.floor() as usize;
        if rng.gen_bool((want - want.floor()).clamp(0.0, 1.0)) {
            pairs += 1;
        }

        let mut route = path.clone();
        let mut inserted = 0;
        let mut attempts = 0;
        while inserted < pairs && attempts < pairs * 12 + 12 {
            attempts += 1;
            if route.len() < 2 {
                break;
            }
            let i = rng.gen_range(0..route.len() - 1);
            let cell = route[i];
            let side = [(1, 0), (-1, 0), (0, 1), (0, -1)][rng.gen_range(0..4)];
            let off = Cell::new(cell.x + side.0, cell.y + side.1);
            if !house.passable(off) || route.get(i + 1) == Some(&off) {
                continue;
            }
            if i > 0 && route[i - 1] == off {
                continue;
            }
            route.splice(i + 1..i + 1, [off, cell]);
            inserted += 1;
        }
        route
    }

    /// Failed sub-tasks still burn a realistic budget: a bounded random
    /// walk, then a failure report.
    fn random_walk_failure(&self, session: &mut SimSession<'_>, rng: &mut ChaCha8Rng) -> NavResult {
        let start_len = session.state.path_length;
        let n = rng.gen_range(20..=100);
        let mut actions = Vec::with_capacity(n);
        for _ in 0..n {
            let action = match rng.gen_range(0..10) {
                0..=5 => Action::MoveForward,
                6..=7 => Action::TurnLeft,
                _ => Action::TurnRight,
            };
            session.step(action);
            actions.push(action);
        }
        NavResult {
            success: false,
            steps_taken: actions.len(),
            path_length: session.state.path_length - start_len,
            actions,
            end_state: session.state,
        }
    }
}

#[cfg(test)]
mod tests;
