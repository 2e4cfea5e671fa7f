//! Incrementally built four-level scene graph: small objects, large
//! objects, rooms, and the house root.
//!
//! Every edge is one of four triplet kinds: small `near` large, large `in`
//! room, room-door-room, and room `in` house. Observations are integrated
//! idempotently; node counts and exploration flags only ever grow.

use std::collections::{BTreeSet, HashSet};

use serde::Serialize;
use thiserror::Error;

use crate::knowledge::KnowledgeBase;
use crate::sim::{Observation, PerceptKind, Rect};

/// Objects at or above this maximum dimension are classified large even
/// when their category is not in the landmark list.
pub const LARGE_DIMENSION_THRESHOLD: f64 = 0.8;
/// Percepts within this 2D distance of a same-category node are treated as
/// re-observations of that node.
pub const ASSOCIATION_RADIUS: f64 = 0.5;
/// Small objects attach `near` the closest large node within this radius,
/// else directly to the room.
pub const NEAR_RADIUS: f64 = 1.5;

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("unknown room {0}")]
    UnknownRoom(String),
    #[error("no unexplored door remains")]
    NoUnexploredDoor,
    #[error("unknown category {0} with no dimension")]
    UnknownCategory(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SizeClass {
    Large,
    Small,
}

/// Large iff the category is a known landmark or the dimension reaches the
/// threshold. Deterministic per category and dimension.
pub fn classify_size(
    kb: &KnowledgeBase,
    category: &str,
    max_dimension: Option<f64>,
) -> Result<SizeClass, GraphError> {
    if kb.is_landmark_category(category) {
        return Ok(SizeClass::Large);
    }
    let dim = max_dimension
        .or_else(|| kb.dimension(category))
        .ok_or_else(|| GraphError::UnknownCategory(category.to_string()))?;
    if dim >= LARGE_DIMENSION_THRESHOLD {
        Ok(SizeClass::Large)
    } else {
        Ok(SizeClass::Small)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoomNode {
    pub id: String,
    pub seq: u64,
    /// Known extent; grows monotonically as walls are observed.
    pub bounds: Option<Rect>,
    pub room_type: Option<String>,
    pub investigated: bool,
    /// Target categories judged infeasible here, deferring the room for a
    /// possible revisit.
    pub skipped_for: BTreeSet<String>,
    #[serde(skip)]
    seen: HashSet<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LargeObjectNode {
    pub id: String,
    pub seq: u64,
    pub category: String,
    /// Running average over observations.
    pub position: [f64; 3],
    pub observation_count: usize,
    /// `in` edge to its room.
    pub room: usize,
    #[serde(skip)]
    seen: HashSet<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SmallParent {
    /// `near` edge to a large node (by index).
    Near(usize),
    /// Fallback `in` edge to a room (by index).
    InRoom(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SmallObjectNode {
    pub id: String,
    pub seq: u64,
    pub category: String,
    pub position: [f64; 3],
    pub observation_count: usize,
    pub parent: SmallParent,
    #[serde(skip)]
    seen: HashSet<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DoorEdge {
    pub id: String,
    pub seq: u64,
    pub position: [f64; 3],
    /// Near-side room index and far side; `None` is a provisional stub for
    /// a room not yet entered.
    pub rooms: (usize, Option<usize>),
    pub open_estimate: bool,
    pub traversed: bool,
    #[serde(skip)]
    seen: HashSet<u64>,
}

/// Created/updated node ids from one integration call.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GraphDelta {
    pub created: Vec<String>,
    pub updated: Vec<String>,
    pub rejected_percepts: usize,
}

impl GraphDelta {
    pub fn is_empty(&self) -> bool {
        self.created.is_empty() && self.updated.is_empty()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SceneGraph {
    next_seq: u64,
    pub rooms: Vec<RoomNode>,
    pub larges: Vec<LargeObjectNode>,
    pub smalls: Vec<SmallObjectNode>,
    pub doors: Vec<DoorEdge>,
}

fn dist2d(a: [f64; 3], b: [f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

fn fingerprint(p: [f64; 3], kind: PerceptKind) -> u64 {
    use std::hash::{Hash, Hasher};
    let mut h = std::collections::hash_map::DefaultHasher::new();
    p[0].to_bits().hash(&mut h);
    p[1].to_bits().hash(&mut h);
    p[2].to_bits().hash(&mut h);
    (kind as u8).hash(&mut h);
    h.finish()
}

impl SceneGraph {
    pub fn new() -> SceneGraph {
        SceneGraph::default()
    }

    fn next_id(&mut self, label: &str) -> (String, u64) {
        self.next_seq += 1;
        (format!("{label}_{}", self.next_seq), self.next_seq)
    }

    /// Create a new room node (spawn room, or the far side of a door).
    pub fn create_room(&mut self) -> usize {
        let (id, seq) = self.next_id("room");
        self.rooms.push(RoomNode {
            id,
            seq,
            bounds: None,
            room_type: None,
            investigated: false,
            skipped_for: BTreeSet::new(),
            seen: HashSet::new(),
        });
        self.rooms.len() - 1
    }

    pub fn room_index(&self, room_id: &str) -> Option<usize> {
        self.rooms.iter().position(|r| r.id == room_id)
    }

    /// Room whose known bounds contain the point; falls back to `current`.
    pub fn room_containing(&self, x: f64, y: f64, current: usize) -> usize {
        self.rooms
            .iter()
            .position(|r| r.bounds.is_some_and(|b| b.contains(x, y)))
            .unwrap_or(current)
    }

    pub fn set_room_type(&mut self, room: usize, label: &str) {
        self.rooms[room].room_type = Some(label.to_string());
    }

    pub fn mark_investigated(&mut self, room: usize) {
        self.rooms[room].investigated = true;
    }

    pub fn mark_skipped(&mut self, room: usize, categories: impl IntoIterator<Item = String>) {
        self.rooms[room].skipped_for.extend(categories);
    }

    /// Integrate a full look-around sweep taken inside `current_room`.
    /// Idempotent: re-integrating an identical observation yields an empty
    /// delta.
    pub fn integrate_observation(
        &mut self,
        kb: &KnowledgeBase,
        current_room: usize,
        obs: &Observation,
    ) -> GraphDelta {
        let mut delta = GraphDelta::default();
        for percept in &obs.percepts {
            if !percept.position.iter().all(|v| v.is_finite()) {
                delta.rejected_percepts += 1;
                continue;
            }
            let fp = fingerprint(percept.position, percept.kind);
            match percept.kind {
                PerceptKind::WallSegment => {
                    let room = &mut self.rooms[current_room];
                    if !room.seen.insert(fp) {
                        continue;
                    }
                    let (x, y) = (percept.position[0], percept.position[1]);
                    let changed = match &mut room.bounds {
                        Some(b) => {
                            let before = *b;
                            b.expand_to(x, y);
                            *b != before
                        }
                        None => {
                            room.bounds = Some(Rect {
                                min_x: x,
                                min_y: y,
                                max_x: x,
                                max_y: y,
                            });
                            true
                        }
                    };
                    if changed {
                        delta.updated.push(self.rooms[current_room].id.clone());
                    }
                }
                PerceptKind::Door => {
                    let hit = self
                        .doors
                        .iter()
                        .position(|d| dist2d(d.position, percept.position) <= ASSOCIATION_RADIUS);
                    match hit {
                        Some(i) => {
                            let open = percept.door_open.unwrap_or(true);
                            let door = &mut self.doors[i];
                            let open_changed = door.open_estimate != open;
                            // Open state can only be corrected upward once
                            // traversal proved the door passable.
                            if !door.traversed {
                                door.open_estimate = open;
                            }
                            if door.seen.insert(fp) {
                                let n = door.seen.len() as f64;
                                for k in 0..3 {
                                    door.position[k] +=
                                        (percept.position[k] - door.position[k]) / n;
                                }
                                delta.updated.push(door.id.clone());
                            } else if open_changed {
                                delta.updated.push(self.doors[i].id.clone());
                            }
                        }
                        None => {
                            let (id, seq) = self.next_id("door");
                            let mut seen = HashSet::new();
                            seen.insert(fp);
                            self.doors.push(DoorEdge {
                                id: id.clone(),
                                seq,
                                position: percept.position,
                                rooms: (current_room, None),
                                open_estimate: percept.door_open.unwrap_or(true),
                                traversed: false,
                                seen,
                            });
                            delta.created.push(id);
                        }
                    }
                }
                PerceptKind::Object => {
                    let class = match classify_size(kb, &percept.category, None) {
                        Ok(c) => c,
                        Err(_) => {
                            delta.rejected_percepts += 1;
                            continue;
                        }
                    };
                    match class {
                        SizeClass::Large => self.integrate_large(percept, current_room, fp, &mut delta),
                        SizeClass::Small => self.integrate_small(percept, current_room, fp, &mut delta),
                    }
                }
            }
        }
        delta
    }

    fn integrate_large(
        &mut self,
        percept: &crate::sim::Percept,
        current_room: usize,
        fp: u64,
        delta: &mut GraphDelta,
    ) {
        let hit = self.larges.iter().position(|n| {
            n.category == percept.category && dist2d(n.position, percept.position) <= ASSOCIATION_RADIUS
        });
        match hit {
            Some(i) => {
                let node = &mut self.larges[i];
                if node.seen.insert(fp) {
                    node.observation_count += 1;
                    let n = node.observation_count as f64;
                    for k in 0..3 {
                        node.position[k] += (percept.position[k] - node.position[k]) / n;
                    }
                    delta.updated.push(node.id.clone());
                }
            }
            None => {
                let room =
                    self.room_containing(percept.position[0], percept.position[1], current_room);
                let (id, seq) = self.next_id(&percept.category);
                let mut seen = HashSet::new();
                seen.insert(fp);
                self.larges.push(LargeObjectNode {
                    id: id.clone(),
                    seq,
                    category: percept.category.clone(),
                    position: percept.position,
                    observation_count: 1,
                    room,
                    seen,
                });
                delta.created.push(id);
            }
        }
    }

    fn nearest_large_within(&self, position: [f64; 3], radius: f64) -> Option<usize> {
        self.larges
            .iter()
            .enumerate()
            .map(|(i, n)| (dist2d(n.position, position), n.seq, i))
            .filter(|(d, _, _)| *d <= radius)
            .min_by(|a, b| (a.0, a.1).partial_cmp(&(b.0, b.1)).unwrap())
            .map(|(_, _, i)| i)
    }

    fn integrate_small(
        &mut self,
        percept: &crate::sim::Percept,
        current_room: usize,
        fp: u64,
        delta: &mut GraphDelta,
    ) {
        let hit = self.smalls.iter().position(|n| {
            n.category == percept.category && dist2d(n.position, percept.position) <= ASSOCIATION_RADIUS
        });
        match hit {
            Some(i) => {
                if self.smalls[i].seen.insert(fp) {
                    self.smalls[i].observation_count += 1;
                    let n = self.smalls[i].observation_count as f64;
                    for k in 0..3 {
                        self.smalls[i].position[k] +=
                            (percept.position[k] - self.smalls[i].position[k]) / n;
                    }
                    // Re-associate the single parent edge after the move.
                    let pos = self.smalls[i].position;
                    let parent = match self.nearest_large_within(pos, NEAR_RADIUS) {
                        Some(l) => SmallParent::Near(l),
                        None => match self.smalls[i].parent {
                            SmallParent::InRoom(r) => SmallParent::InRoom(r),
                            SmallParent::Near(_) => SmallParent::InRoom(current_room),
                        },
                    };
                    self.smalls[i].parent = parent;
                    delta.updated.push(self.smalls[i].id.clone());
                }
            }
            None => {
                let parent = match self.nearest_large_within(percept.position, NEAR_RADIUS) {
                    Some(l) => SmallParent::Near(l),
                    None => SmallParent::InRoom(current_room),
                };
                let (id, seq) = self.next_id(&percept.category);
                let mut seen = HashSet::new();
                seen.insert(fp);
                self.smalls.push(SmallObjectNode {
                    id: id.clone(),
                    seq,
                    category: percept.category.clone(),
                    position: percept.position,
                    observation_count: 1,
                    parent,
                    seen,
                });
                delta.created.push(id);
            }
        }
    }

    /// Room index of a small node, following its parent edge.
    pub fn small_room(&self, small: usize) -> usize {
        match self.smalls[small].parent {
            SmallParent::InRoom(r) => r,
            SmallParent::Near(l) => self.larges[l].room,
        }
    }

    pub fn all_doors_explored(&self) -> bool {
        self.doors.iter().all(|d| !d.open_estimate || d.traversed)
    }

    /// Nearest unexplored door by the supplied travel-cost function;
    /// ties break on the lowest id. Callers must check
    /// [`Self::all_doors_explored`] first.
    pub fn find_next_unexplored_door(
        &self,
        travel_cost: impl Fn(f64, f64) -> Option<f64>,
    ) -> Result<usize, GraphError> {
        self.doors
            .iter()
            .enumerate()
            .filter(|(_, d)| d.open_estimate && !d.traversed)
            .map(|(i, d)| {
                let cost = travel_cost(d.position[0], d.position[1]).unwrap_or(f64::INFINITY);
                (cost, d.seq, i)
            })
            .min_by(|a, b| (a.0, a.1).partial_cmp(&(b.0, b.1)).unwrap())
            .map(|(_, _, i)| i)
            .ok_or(GraphError::NoUnexploredDoor)
    }

    /// Traverse a door from `from_room`: concretizes the far-side stub
    /// (creating a room node when needed), marks the edge traversed, and
    /// returns the destination room index.
    pub fn traverse_door(&mut self, door: usize, from_room: usize) -> usize {
        let (a, b) = self.doors[door].rooms;
        let dest = if a == from_room {
            match b {
                Some(b) => b,
                None => {
                    let new_room = self.create_room();
                    self.doors[door].rooms.1 = Some(new_room);
                    new_room
                }
            }
        } else if b == Some(from_room) {
            a
        } else {
            // Door recorded from elsewhere; treat the far side as unknown.
            match b {
                Some(b) => b,
                None => {
                    let new_room = self.create_room();
                    self.doors[door].rooms.1 = Some(new_room);
                    new_room
                }
            }
        };
        self.doors[door].traversed = true;
        if self.doors[door].rooms.1.is_none() {
            self.doors[door].rooms.1 = Some(dest);
        }
        dest
    }

    /// JSON snapshot of nodes, edges, and flags, for rendering and golden
    /// tests.
    pub fn snapshot_json(&self) -> serde_json::Value {
        serde_json::json!({
            "root": "house",
            "graph": serde_json::to_value(self).expect("scene graph serializes"),
        })
    }
}

mod subgraph;
pub use subgraph::{extract_subgraph, subgraph_to_text, SubDoor, SubLarge, SubSmall, Subgraph};
