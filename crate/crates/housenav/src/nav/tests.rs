use super::*;
use crate::sim::{
    AgentState, Cell, CellKind, Heading, House, OccupancyGrid, PerceptionConfig, Rect, Room,
};

/// One rectangular room with the given free interior size (in cells).
fn open_house(w: i32, h: i32) -> House {
    let mut grid = OccupancyGrid::new((w + 2) as usize, (h + 2) as usize);
    for y in 1..=h {
        for x in 1..=w {
            grid.set_kind(Cell::new(x, y), CellKind::Free);
        }
    }
    House {
        id: 0,
        rooms: vec![Room {
            id: 0,
            bounds: Rect {
                min_x: CELL_SIZE,
                min_y: CELL_SIZE,
                max_x: (w + 1) as f64 * CELL_SIZE,
                max_y: (h + 1) as f64 * CELL_SIZE,
            },
            room_type: "office".into(),
        }],
        doors: vec![],
        objects: vec![],
        grid,
    }
}

fn session(house: &House, cell: Cell) -> SimSession<'_> {
    SimSession::new(
        house,
        AgentState::new(cell, Heading::East),
        PerceptionConfig::ground_truth(),
        7,
    )
}

#[test]
fn straight_line_path_has_exact_length() {
    let house = open_house(5, 5);
    let path = astar_path(&house, Cell::new(1, 1), Cell::new(1, 5)).unwrap();
    assert_eq!(path.len() - 1, 4);
    assert_eq!((path.len() - 1) as f64 * CELL_SIZE, 1.0);
}

fn bfs_length(house: &House, from: Cell, to: Cell) -> Option<usize> {
    let mut dist = std::collections::HashMap::new();
    let mut queue = std::collections::VecDeque::new();
    dist.insert(from, 0usize);
    queue.push_back(from);
    while let Some(c) = queue.pop_front() {
        if c == to {
            return Some(dist[&c]);
        }
        for (dx, dy) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
            let n = Cell::new(c.x + dx, c.y + dy);
            if house.passable(n) && !dist.contains_key(&n) {
                dist.insert(n, dist[&c] + 1);
                queue.push_back(n);
            }
        }
    }
    None
}

#[test]
fn u_shaped_wall_detour_matches_bfs_oracle() {
    let mut house = open_house(9, 9);
    // Wall with a gap only at the bottom, forcing a detour.
    for y in 3..=9 {
        house.grid.set_kind(Cell::new(5, y), CellKind::Wall);
    }
    let (from, to) = (Cell::new(2, 5), Cell::new(8, 5));
    let path = astar_path(&house, from, to).unwrap();
    assert_eq!(path.len() - 1, bfs_length(&house, from, to).unwrap());
}

#[test]
fn unreachable_target_is_no_path() {
    let mut house = open_house(9, 3);
    for y in 1..=3 {
        house.grid.set_kind(Cell::new(5, y), CellKind::Wall);
    }
    assert!(astar_path(&house, Cell::new(1, 1), Cell::new(8, 1)).is_none());
}

#[test]
fn ornav_succeeds_without_moving_when_already_in_radius() {
    let house = open_house(8, 8);
    let mut s = session(&house, Cell::new(2, 2));
    let goal = PointGoal::new(Cell::new(4, 2).center());
    let r = navigate_ornav(&mut s, &goal);
    assert!(r.success);
    assert_eq!(r.steps_taken, 0);
    assert_eq!(r.path_length, 0.0);
}

#[test]
fn ornav_corridor_length_is_exact() {
    // 10 m corridor: 40 cells of travel.
    let house = open_house(42, 1);
    let mut s = session(&house, Cell::new(1, 1));
    let goal = PointGoal {
        target: Cell::new(41, 1).center(),
        success_radius: 0.1,
        max_steps: 300,
    };
    let r = navigate_ornav(&mut s, &goal);
    assert!(r.success);
    assert_eq!(r.path_length, 10.0);
}

#[test]
fn ornav_fails_at_step_cap() {
    // Optimal primitive count 320 > 300.
    let house = open_house(322, 1);
    let mut s = session(&house, Cell::new(1, 1));
    let goal = PointGoal {
        target: Cell::new(321, 1).center(),
        success_radius: 1.5,
        max_steps: 300,
    };
    let r = navigate_ornav(&mut s, &goal);
    assert!(!r.success);
    assert_eq!(r.steps_taken, 300);
}

#[test]
fn replaying_actions_reproduces_terminal_pose() {
    let mut house = open_house(12, 12);
    for y in 4..=12 {
        house.grid.set_kind(Cell::new(6, y), CellKind::Wall);
    }
    let start = AgentState::new(Cell::new(2, 8), Heading::North);
    let mut s = SimSession::new(&house, start, PerceptionConfig::ground_truth(), 3);
    let goal = PointGoal::new(Cell::new(10, 9).center());
    let r = navigate_ornav(&mut s, &goal);
    assert!(r.success);

    let mut replay = start;
    for action in &r.actions {
        replay = crate::sim::step(&house, &replay, *action).0;
    }
    assert_eq!(replay, r.end_state);
}

#[test]
fn degenerate_surrogate_matches_oracle() {
    let mut house = open_house(14, 14);
    for x in 3..=10 {
        house.grid.set_kind(Cell::new(x, 7), CellKind::Wall);
    }
    let goal = PointGoal::new(Cell::new(12, 12).center());

    let mut s1 = session(&house, Cell::new(2, 2));
    let oracle = navigate_ornav(&mut s1, &goal);

    let mut s2 = session(&house, Cell::new(2, 2));
    let mut pnav = PnavSurrogate::new(SurrogateParams::oracle_equivalent(99));
    let surrogate = pnav.navigate(&mut s2, &goal);

    assert_eq!(oracle.actions, surrogate.actions);
    assert_eq!(oracle.path_length, surrogate.path_length);
    assert_eq!(oracle.end_state, surrogate.end_state);
}

#[test]
fn surrogate_success_set_dominated_by_oracle() {
    let house = open_house(20, 20);
    let mut pnav = PnavSurrogate::new(SurrogateParams::calibrated(5));
    for i in 0..50 {
        let start = Cell::new(1 + (i % 5) * 3, 1 + (i % 7) * 2);
        let goal = PointGoal::new(Cell::new(19, 19).center());
        let mut s1 = session(&house, start);
        let oracle = navigate_ornav(&mut s1, &goal);
        let mut s2 = session(&house, start);
        let surrogate = pnav.navigate(&mut s2, &goal);
        if surrogate.success {
            assert!(oracle.success);
        }
    }
}
