//! Procedural house generation.
//!
//! Rooms are laid out column-wise on the occupancy grid, every pair of
//! adjacent rooms gets a doorway on the shared wall, and a spanning tree of
//! doors is forced open so the house is connected. Object placement follows
//! the knowledge-base priors (bed in bedroom, spoon near the dining table).

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::knowledge::KnowledgeBase;
use crate::sim::{Cell, CellKind, Door, House, ObjectInstance, OccupancyGrid, Rect, Room, CELL_SIZE};

/// Probability that a non-spanning-tree door is generated open. Closed
/// doors are impassable for the whole episode.
const DOOR_OPEN_PROB: f64 = 0.9;
/// Room-prior score at or above which a landmark is always placed in a
/// room of that type.
const MANDATORY_LANDMARK_SCORE: f64 = 0.85;
/// Minimum separation between two instances of the same category, so
/// graph association cannot merge distinct ground-truth objects.
const SAME_CATEGORY_SEPARATION: f64 = 1.2;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HouseSpec {
    pub num_rooms: usize,
    /// Requested room types with counts; remaining rooms are typed randomly.
    pub room_type_mix: Vec<(String, usize)>,
    /// Range of additional small objects per room (inclusive).
    pub objects_per_room: (usize, usize),
    pub rng_seed: u64,
}

impl HouseSpec {
    pub fn new(num_rooms: usize, rng_seed: u64) -> HouseSpec {
        HouseSpec {
            num_rooms,
            room_type_mix: Vec::new(),
            objects_per_room: (2, 5),
            rng_seed,
        }
    }
}

#[derive(Debug, Error)]
pub enum GenError {
    #[error("infeasible house spec: {0}")]
    Infeasible(String),
}

struct RoomSlot {
    /// Interior cell ranges (inclusive start, exclusive end).
    x0: i32,
    x1: i32,
    y0: i32,
    y1: i32,
}

impl RoomSlot {
    fn bounds(&self) -> Rect {
        Rect {
            min_x: self.x0 as f64 * CELL_SIZE,
            min_y: self.y0 as f64 * CELL_SIZE,
            max_x: self.x1 as f64 * CELL_SIZE,
            max_y: self.y1 as f64 * CELL_SIZE,
        }
    }
}

/// Split `total` into `parts` pieces of at least `min_size` each.
fn split_lengths(rng: &mut ChaCha8Rng, total: i32, parts: usize, min_size: i32) -> Vec<i32> {
    let mut sizes = vec![min_size; parts];
    let mut spare = total - min_size * parts as i32;
    debug_assert!(spare >= 0);
    while spare > 0 {
        let i = rng.gen_range(0..parts);
        sizes[i] += 1;
        spare -= 1;
    }
    sizes
}

pub fn generate_house(spec: &HouseSpec, kb: &KnowledgeBase) -> Result<House, GenError> {
    if spec.num_rooms == 0 {
        return Err(GenError::Infeasible("num_rooms must be at least 1".into()));
    }
    if spec.num_rooms > 16 {
        return Err(GenError::Infeasible(
            "num_rooms above 16 cannot be tiled at desk scale".into(),
        ));
    }
    let mix_total: usize = spec.room_type_mix.iter().map(|(_, n)| n).sum();
    if mix_total > spec.num_rooms {
        return Err(GenError::Infeasible(format!(
            "room_type_mix requests {mix_total} rooms but num_rooms is {}",
            spec.num_rooms
        )));
    }
    for (label, _) in &spec.room_type_mix {
        if !kb.is_room_type(label) {
            return Err(GenError::Infeasible(format!("unknown room type {label}")));
        }
    }
    if spec.objects_per_room.0 > spec.objects_per_room.1 {
        return Err(GenError::Infeasible("objects_per_room range is inverted".into()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.rng_seed);
    let n = spec.num_rooms;

    // Column layout: ceil(sqrt(n)) columns, rooms stacked inside each.
    let ncols = (n as f64).sqrt().ceil() as usize;
    let base = n / ncols;
    let rem = n % ncols;
    let col_rooms: Vec<usize> = (0..ncols).map(|i| base + usize::from(i < rem)).collect();
    let max_stack = *col_rooms.iter().max().unwrap();

    let col_widths: Vec<i32> = (0..ncols).map(|_| rng.gen_range(12..=18)).collect();
    // Shared interior height across columns, sized for the tallest stack.
    let interior_h = (max_stack as i32) * rng.gen_range(12..=16) + (max_stack as i32 - 1);

    let width = 1 + col_widths.iter().map(|w| w + 1).sum::<i32>();
    let height = interior_h + 2;
    let mut grid = OccupancyGrid::new(width as usize, height as usize);

    let mut slots: Vec<RoomSlot> = Vec::new();
    let mut col_of_room: Vec<usize> = Vec::new();
    let mut x0 = 1;
    for (col, (&w, &stack)) in col_widths.iter().zip(&col_rooms).enumerate() {
        let stack = stack as i32;
        let heights = split_lengths(&mut rng, interior_h - (stack - 1), stack as usize, 9);
        let mut y0 = 1;
        for h in heights {
            slots.push(RoomSlot {
                x0,
                x1: x0 + w,
                y0,
                y1: y0 + h,
            });
            col_of_room.push(col);
            y0 += h + 1;
        }
        x0 += w + 1;
    }

    for slot in &slots {
        for y in slot.y0..slot.y1 {
            for x in slot.x0..slot.x1 {
                grid.set_kind(Cell::new(x, y), CellKind::Free);
            }
        }
    }

    // Doors: one candidate per adjacent room pair.
    struct Candidate {
        cell: Cell,
        connects: (usize, usize),
    }
    let mut candidates: Vec<Candidate> = Vec::new();
    for a in 0..slots.len() {
        for b in (a + 1)..slots.len() {
            let (sa, sb) = (&slots[a], &slots[b]);
            if col_of_room[a] == col_of_room[b] && sb.y0 == sa.y1 + 1 {
                // Stacked in the same column: door on the horizontal wall.
                let x = rng.gen_range(sa.x0 + 1..sa.x1 - 1);
                candidates.push(Candidate {
                    cell: Cell::new(x, sa.y1),
                    connects: (a, b),
                });
            } else if col_of_room[b] == col_of_room[a] + 1 && sb.x0 == sa.x1 + 1 {
                // Side by side: door on the vertical wall where they overlap.
                let lo = sa.y0.max(sb.y0);
                let hi = sa.y1.min(sb.y1);
                if hi - lo >= 3 {
                    let y = rng.gen_range(lo + 1..hi - 1);
                    candidates.push(Candidate {
                        cell: Cell::new(sa.x1, y),
                        connects: (a, b),
                    });
                }
            }
        }
    }

    // Spanning-tree doors stay open; the rest are open with high probability.
    let mut comp: Vec<usize> = (0..slots.len()).collect();
    fn find(comp: &mut Vec<usize>, i: usize) -> usize {
        if comp[i] != i {
            let root = find(comp, comp[i]);
            comp[i] = root;
        }
        comp[i]
    }
    let mut doors: Vec<Door> = Vec::new();
    for cand in candidates {
        let (ra, rb) = cand.connects;
        let (ca, cb) = (find(&mut comp, ra), find(&mut comp, rb));
        let open = if ca != cb {
            comp[ca] = cb;
            true
        } else {
            rng.gen_bool(DOOR_OPEN_PROB)
        };
        let id = doors.len();
        grid.set_kind(cand.cell, CellKind::Door(id as u16));
        doors.push(Door {
            id,
            position: cand.cell.center(),
            cell: cand.cell,
            connects: cand.connects,
            open,
        });
    }
    if n > 1 {
        let root = find(&mut comp, 0);
        if (1..n).any(|i| find(&mut comp, i) != root) {
            return Err(GenError::Infeasible(
                "room layout produced a disconnected adjacency graph".into(),
            ));
        }
    }

    // Room types: requested mix first, random fills after, shuffled over slots.
    let mut labels: Vec<String> = Vec::new();
    for (label, count) in &spec.room_type_mix {
        labels.extend(std::iter::repeat_n(label.clone(), *count));
    }
    while labels.len() < n {
        let t = &kb.room_types[rng.gen_range(0..kb.room_types.len())];
        labels.push(t.clone());
    }
    labels.shuffle(&mut rng);

    let rooms: Vec<Room> = slots
        .iter()
        .enumerate()
        .map(|(id, slot)| Room {
            id,
            bounds: slot.bounds(),
            room_type: labels[id].clone(),
        })
        .collect();

    // Object placement.
    let mut objects: Vec<ObjectInstance> = Vec::new();
    let mut next_obj = 0usize;
    for (room_id, slot) in slots.iter().enumerate() {
        let room_type = &rooms[room_id].room_type;
        let mut placed_here: Vec<usize> = Vec::new();

        let place = |rng: &mut ChaCha8Rng,
                         objects: &mut Vec<ObjectInstance>,
                         placed_here: &mut Vec<usize>,
                         next_obj: &mut usize,
                         category: &str,
                         near: Option<[f64; 3]>,
                         z: f64| {
            let dim = kb.dimension(category).unwrap_or(0.3);
            for _ in 0..24 {
                let (x, y) = match near {
                    Some(anchor) => {
                        let angle = rng.gen_range(0.0..std::f64::consts::TAU);
                        let r = rng.gen_range(0.25..0.55);
                        (anchor[0] + angle.cos() * r, anchor[1] + angle.sin() * r)
                    }
                    None => {
                        let cx = rng.gen_range(slot.x0 + 1..slot.x1 - 1);
                        let cy = rng.gen_range(slot.y0 + 1..slot.y1 - 1);
                        Cell::new(cx, cy).center()
                    }
                };
                let b = slot.bounds();
                if x < b.min_x + 0.3 || x > b.max_x - 0.3 || y < b.min_y + 0.3 || y > b.max_y - 0.3 {
                    continue;
                }
                let too_close = placed_here.iter().any(|&i| {
                    let o = &objects[i];
                    let d = ((o.position[0] - x).powi(2) + (o.position[1] - y).powi(2)).sqrt();
                    (o.category == category && d < SAME_CATEGORY_SEPARATION)
                        || (near.is_none() && d < 0.6)
                });
                if too_close {
                    continue;
                }
                let id = *next_obj;
                *next_obj += 1;
                objects.push(ObjectInstance {
                    id,
                    category: category.to_string(),
                    position: [x, y, z],
                    max_dimension: dim,
                    room_id,
                });
                placed_here.push(objects.len() - 1);
                return true;
            }
            false
        };

        // Landmarks: mandatory ones always, likely ones by coin flip.
        let landmark_cats: Vec<String> = kb.landmark_categories().map(String::from).collect();
        for cat in &landmark_cats {
            let score = kb.room_prior(cat, room_type);
            let wanted = if score >= MANDATORY_LANDMARK_SCORE {
                true
            } else if score >= 0.4 {
                rng.gen_bool(score * 0.5)
            } else {
                false
            };
            if wanted {
                place(&mut rng, &mut objects, &mut placed_here, &mut next_obj, cat, None, 0.0);
            }
        }

        // Small objects, weighted by room prior, anchored near a matching landmark.
        let small_cats: Vec<String> = kb
            .small_categories()
            .filter(|c| kb.room_prior(c, room_type) >= 0.3)
            .map(String::from)
            .collect();
        if !small_cats.is_empty() {
            let count = rng.gen_range(spec.objects_per_room.0..=spec.objects_per_room.1);
            for _ in 0..count {
                let weights: Vec<f64> = small_cats
                    .iter()
                    .map(|c| kb.room_prior(c, room_type))
                    .collect();
                let total: f64 = weights.iter().sum();
                let mut pick = rng.gen_range(0.0..total);
                let mut chosen = small_cats.len() - 1;
                for (i, w) in weights.iter().enumerate() {
                    if pick < *w {
                        chosen = i;
                        break;
                    }
                    pick -= w;
                }
                let cat = &small_cats[chosen];
                // Anchor near the best-matching landmark present in this room.
                let anchor = placed_here
                    .iter()
                    .map(|&i| &objects[i])
                    .filter(|o| kb.is_landmark_category(&o.category))
                    .max_by(|a, b| {
                        kb.landmark_prior(cat, &a.category)
                            .partial_cmp(&kb.landmark_prior(cat, &b.category))
                            .unwrap()
                    })
                    .filter(|o| kb.landmark_prior(cat, &o.category) >= 0.3)
                    .map(|o| o.position);
                place(&mut rng, &mut objects, &mut placed_here, &mut next_obj, cat, anchor, 0.5);
            }
        }
    }

    let house = House {
        id: spec.rng_seed,
        rooms,
        doors,
        objects,
        grid,
    };

    // Connectivity invariant over open doors.
    if n > 1 {
        let start = Cell::new(slots[0].x0, slots[0].y0);
        let reach = house.reachable_cells(start);
        for slot in &slots {
            if !reach.contains(&Cell::new(slot.x0, slot.y0)) {
                return Err(GenError::Infeasible(
                    "open-door adjacency graph is not connected".into(),
                ));
            }
        }
    }

    Ok(house)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kb() -> KnowledgeBase {
        KnowledgeBase::bundled()
    }

    #[test]
    fn three_rooms_connected_with_doors() {
        let house = generate_house(&HouseSpec::new(3, 7), &kb()).unwrap();
        assert_eq!(house.rooms.len(), 3);
        assert!(house.doors.len() >= 2);
        let start = house
            .rooms
            .iter()
            .map(|r| r.bounds.center())
            .map(|(x, y)| Cell::containing(x, y))
            .next()
            .unwrap();
        let reach = house.reachable_cells(start);
        for room in &house.rooms {
            let (x, y) = room.bounds.center();
            assert!(reach.contains(&Cell::containing(x, y)));
        }
    }

    #[test]
    fn same_seed_gives_byte_identical_houses() {
        let spec = HouseSpec::new(5, 42);
        let a = generate_house(&spec, &kb()).unwrap();
        let b = generate_house(&spec, &kb()).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn requested_bedroom_contains_a_bed() {
        let mut spec = HouseSpec::new(3, 11);
        spec.room_type_mix = vec![("bedroom".into(), 1)];
        let house = generate_house(&spec, &kb()).unwrap();
        let bedroom = house
            .rooms
            .iter()
            .find(|r| r.room_type == "bedroom")
            .expect("requested bedroom must exist");
        assert!(
            house
                .objects
                .iter()
                .any(|o| o.room_id == bedroom.id && o.category == "bed"),
            "mandatory landmark from the placement-prior table"
        );
    }

    #[test]
    fn house_invariants_hold_across_seeds() {
        for seed in 0..20u64 {
            let n = 3 + (seed as usize % 8);
            let house = generate_house(&HouseSpec::new(n, seed), &kb()).unwrap();
            // Disjoint room interiors.
            for a in &house.rooms {
                for b in &house.rooms {
                    if a.id != b.id {
                        assert!(!a.bounds.intersects(&b.bounds));
                    }
                }
            }
            // Objects inside their rooms.
            for o in &house.objects {
                assert!(house.rooms[o.room_id]
                    .bounds
                    .contains(o.position[0], o.position[1]));
            }
            // Doors sit on door cells connecting two distinct rooms.
            for d in &house.doors {
                assert_ne!(d.connects.0, d.connects.1);
                assert!(matches!(house.grid.kind(d.cell), CellKind::Door(_)));
            }
        }
    }

    #[test]
    fn infeasible_specs_error_without_partial_house() {
        assert!(generate_house(&HouseSpec::new(0, 1), &kb()).is_err());
        let mut spec = HouseSpec::new(2, 1);
        spec.room_type_mix = vec![("garage".into(), 1)];
        assert!(generate_house(&spec, &kb()).is_err());
        let mut spec = HouseSpec::new(2, 1);
        spec.room_type_mix = vec![("bedroom".into(), 3)];
        assert!(generate_house(&spec, &kb()).is_err());
    }
}
