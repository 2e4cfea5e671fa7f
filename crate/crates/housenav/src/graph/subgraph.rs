//! Local subgraph extraction and its canonical text rendering for the
//! high-level planner prompt.

use serde::Serialize;

use super::{GraphError, SceneGraph, SmallParent};

#[derive(Debug, Clone, Serialize)]
pub struct SubSmall {
    pub id: String,
    pub category: String,
    pub position: [f64; 3],
}

#[derive(Debug, Clone, Serialize)]
pub struct SubLarge {
    pub id: String,
    pub category: String,
    pub position: [f64; 3],
    pub smalls: Vec<SubSmall>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SubDoor {
    pub id: String,
    pub position: [f64; 3],
    pub open: bool,
    pub traversed: bool,
}

/// The planner's view of one room: the room node, its large objects with
/// their small objects, and its door edges. Nothing from other rooms.
#[derive(Debug, Clone, Serialize)]
pub struct Subgraph {
    pub room_id: String,
    pub room_type: Option<String>,
    pub larges: Vec<SubLarge>,
    /// Small objects attached directly to the room (no nearby landmark).
    pub room_smalls: Vec<SubSmall>,
    pub doors: Vec<SubDoor>,
}

impl Subgraph {
    pub fn node_count(&self) -> usize {
        1 + self.larges.len()
            + self.larges.iter().map(|l| l.smalls.len()).sum::<usize>()
            + self.room_smalls.len()
    }

    pub fn edge_count(&self) -> usize {
        self.larges.len()
            + self.larges.iter().map(|l| l.smalls.len()).sum::<usize>()
            + self.room_smalls.len()
            + self.doors.len()
    }

    /// Position of a navigable target (large object or door) by node id.
    pub fn target_position(&self, id: &str) -> Option<[f64; 3]> {
        self.larges
            .iter()
            .find(|l| l.id == id)
            .map(|l| l.position)
            .or_else(|| self.doors.iter().find(|d| d.id == id).map(|d| d.position))
    }

    pub fn has_target(&self, id: &str) -> bool {
        self.target_position(id).is_some()
    }

    /// All object categories observed in the room.
    pub fn categories(&self) -> Vec<&str> {
        self.larges
            .iter()
            .map(|l| l.category.as_str())
            .chain(
                self.larges
                    .iter()
                    .flat_map(|l| l.smalls.iter().map(|s| s.category.as_str())),
            )
            .chain(self.room_smalls.iter().map(|s| s.category.as_str()))
            .collect()
    }

    pub fn landmark_categories_present(&self) -> Vec<&str> {
        self.larges.iter().map(|l| l.category.as_str()).collect()
    }
}

/// Extract the local subgraph for one room, in stable (creation) order.
pub fn extract_subgraph(graph: &SceneGraph, room: usize) -> Result<Subgraph, GraphError> {
    if room >= graph.rooms.len() {
        return Err(GraphError::UnknownRoom(format!("#{room}")));
    }
    let room_node = &graph.rooms[room];

    let mut larges: Vec<(u64, SubLarge)> = graph
        .larges
        .iter()
        .enumerate()
        .filter(|(_, l)| l.room == room)
        .map(|(idx, l)| {
            let mut smalls: Vec<(u64, SubSmall)> = graph
                .smalls
                .iter()
                .filter(|s| s.parent == SmallParent::Near(idx))
                .map(|s| {
                    (
                        s.seq,
                        SubSmall {
                            id: s.id.clone(),
                            category: s.category.clone(),
                            position: s.position,
                        },
                    )
                })
                .collect();
            smalls.sort_by_key(|(seq, _)| *seq);
            (
                l.seq,
                SubLarge {
                    id: l.id.clone(),
                    category: l.category.clone(),
                    position: l.position,
                    smalls: smalls.into_iter().map(|(_, s)| s).collect(),
                },
            )
        })
        .collect();
    larges.sort_by_key(|(seq, _)| *seq);

    let mut room_smalls: Vec<(u64, SubSmall)> = graph
        .smalls
        .iter()
        .filter(|s| s.parent == SmallParent::InRoom(room))
        .map(|s| {
            (
                s.seq,
                SubSmall {
                    id: s.id.clone(),
                    category: s.category.clone(),
                    position: s.position,
                },
            )
        })
        .collect();
    room_smalls.sort_by_key(|(seq, _)| *seq);

    let mut doors: Vec<(u64, SubDoor)> = graph
        .doors
        .iter()
        .filter(|d| d.rooms.0 == room || d.rooms.1 == Some(room))
        .map(|d| {
            (
                d.seq,
                SubDoor {
                    id: d.id.clone(),
                    position: d.position,
                    open: d.open_estimate,
                    traversed: d.traversed,
                },
            )
        })
        .collect();
    doors.sort_by_key(|(seq, _)| *seq);

    Ok(Subgraph {
        room_id: room_node.id.clone(),
        room_type: room_node.room_type.clone(),
        larges: larges.into_iter().map(|(_, l)| l).collect(),
        room_smalls: room_smalls.into_iter().map(|(_, s)| s).collect(),
        doors: doors.into_iter().map(|(_, d)| d).collect(),
    })
}

/// Canonical, stable-ordered text listing of a subgraph. Golden-file
/// stable: two graphs equal up to node insertion order render identically.
pub fn subgraph_to_text(sub: &Subgraph) -> String {
    let mut out = String::new();
    let room_type = sub.room_type.as_deref().unwrap_or("unknown");
    out.push_str(&format!("room {} ({})\n", sub.room_id, room_type));
    if sub.larges.is_empty() && sub.room_smalls.is_empty() {
        out.push_str("- no objects observed\n");
    } else {
        for large in &sub.larges {
            if large.smalls.is_empty() {
                out.push_str(&format!("- {}\n", large.id));
            } else {
                let ids: Vec<&str> = large.smalls.iter().map(|s| s.id.as_str()).collect();
                out.push_str(&format!("- {}: {}\n", large.id, ids.join(", ")));
            }
        }
        for small in &sub.room_smalls {
            out.push_str(&format!("- {}\n", small.id));
        }
    }
    for door in &sub.doors {
        let state = if door.open { "open" } else { "closed" };
        out.push_str(&format!("- {}: {}\n", door.id, state));
    }
    out
}
