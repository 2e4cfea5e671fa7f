//! Benchmark harness: episode dataset generation and IO, metrics, and the
//! privileged baseline agent.

use std::collections::BTreeSet;
use std::io::{BufRead, Write};
use std::ops::RangeInclusive;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::knowledge::KnowledgeBase;
use crate::nav::astar_distance;
use crate::sim::{generate_house, Cell, GenError, House, HouseSpec};

mod render;
pub use render::{render_topdown, RenderError};

pub const EPISODE_SCHEMA_VERSION: u32 = 1;
/// Fresh (house, start, targets) draws before dataset generation gives up
/// on one episode slot.
const MAX_ATTEMPTS_PER_EPISODE: usize = 50;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("dataset io: {0}")]
    Io(#[from] std::io::Error),
    #[error("dataset line {0} malformed: {1}")]
    Malformed(usize, String),
    #[error("dataset line {0} corrupt: {1}")]
    Corrupt(usize, String),
    #[error("house generation: {0}")]
    Gen(#[from] GenError),
    #[error("could not assemble a valid episode after {MAX_ATTEMPTS_PER_EPISODE} attempts")]
    Exhausted,
    #[error("metric input invalid: {0}")]
    Metric(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Target {
    pub category: String,
    /// Ground-truth instance position in meters.
    pub position: [f64; 2],
}

/// One benchmark episode. Field names follow the common multi-object
/// navigation episode layout; the house is regenerated from
/// (num_rooms, house_seed) rather than stored inline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Episode {
    pub schema: u32,
    pub data_type: String,
    pub house_idx: usize,
    pub num_rooms: usize,
    pub num_targets: usize,
    pub targets: Vec<Target>,
    pub start_position: [f64; 2],
    pub start_heading: u16,
    /// Target categories in the A*-optimal visiting order.
    pub shortest_path_targets_order: Vec<String>,
    /// A* length (meters) start -> targets along the optimal order.
    pub shortest_path_length: f64,
    pub house_seed: u64,
}

impl Episode {
    pub fn start_cell(&self) -> Cell {
        Cell::containing(self.start_position[0], self.start_position[1])
    }

    pub fn target_position(&self, category: &str) -> Option<[f64; 2]> {
        self.targets
            .iter()
            .find(|t| t.category == category)
            .map(|t| t.position)
    }
}

/// Regenerate the episode's house from its stored seed.
pub fn episode_house(ep: &Episode, kb: &KnowledgeBase) -> Result<House, GenError> {
    generate_house(&HouseSpec::new(ep.num_rooms, ep.house_seed), kb)
}

/// A* length of start -> t0 -> t1 -> t2 for one category order. `None`
/// when any leg is unreachable.
fn order_length(house: &House, start: [f64; 2], targets: &[&Target]) -> Option<f64> {
    let mut total = 0.0;
    let mut at = (start[0], start[1]);
    for t in targets {
        let next = (t.position[0], t.position[1]);
        total += astar_distance(house, at, next)?;
        at = next;
    }
    Some(total)
}

/// Best visiting order over all 3! permutations, with its A* length.
fn optimal_order(house: &House, start: [f64; 2], targets: &[Target]) -> Option<(Vec<String>, f64)> {
    let idx = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    let mut best: Option<(Vec<String>, f64)> = None;
    for perm in idx {
        let ordered: Vec<&Target> = perm.iter().map(|&i| &targets[i]).collect();
        let Some(len) = order_length(house, start, &ordered) else {
            continue;
        };
        if best.as_ref().is_none_or(|(_, b)| len < *b - 1e-12) {
            best = Some((ordered.iter().map(|t| t.category.clone()).collect(), len));
        }
    }
    best
}

/// Generate `n` episodes over `n` distinct procedurally generated houses.
/// Deterministic per seed. Houses with fewer than three distinct placeable
/// categories are discarded and redrawn.
pub fn generate_dataset(
    n: usize,
    rooms: RangeInclusive<usize>,
    data_type: &str,
    seed: u64,
    kb: &KnowledgeBase,
) -> Result<Vec<Episode>, BenchError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut episodes = Vec::with_capacity(n);
    for house_idx in 0..n {
        let mut made = None;
        for _ in 0..MAX_ATTEMPTS_PER_EPISODE {
            let num_rooms = rng.gen_range(rooms.clone());
            let house_seed: u64 = rng.gen();
            let Ok(house) = generate_house(&HouseSpec::new(num_rooms, house_seed), kb) else {
                continue;
            };

            let mut categories: Vec<&str> = house
                .objects
                .iter()
                .map(|o| o.category.as_str())
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect();
            if categories.len() < 3 {
                continue;
            }
            categories.shuffle(&mut rng);
            let targets: Vec<Target> = categories[..3]
                .iter()
                .map(|cat| {
                    let inst = house
                        .objects
                        .iter()
                        .find(|o| o.category == *cat)
                        .expect("category came from the object list");
                    Target {
                        category: (*cat).to_string(),
                        position: [inst.position[0], inst.position[1]],
                    }
                })
                .collect();

            let Some(start) = random_passable_cell(&house, &mut rng) else {
                continue;
            };
            let (sx, sy) = start.center();
            let Some((order, length)) = optimal_order(&house, [sx, sy], &targets) else {
                continue;
            };
            if length <= 0.0 {
                continue;
            }
            made = Some(Episode {
                schema: EPISODE_SCHEMA_VERSION,
                data_type: data_type.to_string(),
                house_idx,
                num_rooms,
                num_targets: 3,
                targets,
                start_position: [sx, sy],
                start_heading: *[0u16, 90, 180, 270].choose(&mut rng).unwrap(),
                shortest_path_targets_order: order,
                shortest_path_length: length,
                house_seed,
            });
            break;
        }
        episodes.push(made.ok_or(BenchError::Exhausted)?);
    }
    Ok(episodes)
}

fn random_passable_cell(house: &House, rng: &mut ChaCha8Rng) -> Option<Cell> {
    let (w, h) = (house.grid.width as i32, house.grid.height as i32);
    for _ in 0..256 {
        let c = Cell::new(rng.gen_range(0..w), rng.gen_range(0..h));
        if house.passable(c) {
            return Some(c);
        }
    }
    None
}

/// Write episodes as JSON-lines, one episode per line.
pub fn write_dataset(path: &std::path::Path, episodes: &[Episode]) -> Result<(), BenchError> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    for ep in episodes {
        serde_json::to_writer(&mut out, ep).map_err(|e| BenchError::Malformed(0, e.to_string()))?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Load a dataset, re-verifying each episode's stored shortest path
/// against A* on the regenerated house. Corrupt lines are rejected.
pub fn load_dataset(path: &std::path::Path, kb: &KnowledgeBase) -> Result<Vec<Episode>, BenchError> {
    let file = std::io::BufReader::new(std::fs::File::open(path)?);
    let mut episodes = Vec::new();
    for (i, line) in file.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let ep: Episode =
            serde_json::from_str(&line).map_err(|e| BenchError::Malformed(i + 1, e.to_string()))?;
        verify_episode(&ep, kb).map_err(|msg| BenchError::Corrupt(i + 1, msg))?;
        episodes.push(ep);
    }
    Ok(episodes)
}

fn verify_episode(ep: &Episode, kb: &KnowledgeBase) -> Result<(), String> {
    if ep.schema != EPISODE_SCHEMA_VERSION {
        return Err(format!("schema {} unsupported", ep.schema));
    }
    if ep.num_targets != 3 || ep.targets.len() != 3 {
        return Err("episodes carry exactly 3 targets".to_string());
    }
    let cats: BTreeSet<&str> = ep.targets.iter().map(|t| t.category.as_str()).collect();
    if cats.len() != 3 {
        return Err("target categories must be distinct".to_string());
    }
    let order: BTreeSet<&str> = ep
        .shortest_path_targets_order
        .iter()
        .map(|s| s.as_str())
        .collect();
    if order != cats {
        return Err("optimal order is not a permutation of the targets".to_string());
    }
    let house = episode_house(ep, kb).map_err(|e| e.to_string())?;
    if !house.passable(ep.start_cell()) {
        return Err("start cell not passable".to_string());
    }
    let ordered: Vec<&Target> = ep
        .shortest_path_targets_order
        .iter()
        .map(|c| ep.targets.iter().find(|t| &t.category == c).unwrap())
        .collect();
    match order_length(&house, ep.start_position, &ordered) {
        Some(len) if (len - ep.shortest_path_length).abs() < 1e-6 => Ok(()),
        Some(len) => Err(format!(
            "stored shortest_path_length {} disagrees with A* {len}",
            ep.shortest_path_length
        )),
        None => Err("stored order is unreachable".to_string()),
    }
}

/// One episode's contribution inputs to SPL.
#[derive(Debug, Clone, Copy)]
pub struct SplItem {
    pub success: bool,
    /// Shortest possible path (meters), > 0.
    pub shortest: f64,
    /// Path actually taken (meters).
    pub actual: f64,
}

/// Success weighted by path length: (1/N) * sum S_i * l_i / max(p_i, l_i).
pub fn spl(items: &[SplItem]) -> Result<f64, BenchError> {
    if items.is_empty() {
        return Err(BenchError::Metric("spl over zero episodes".to_string()));
    }
    let mut total = 0.0;
    for it in items {
        if it.shortest <= 0.0 {
            return Err(BenchError::Metric("shortest path must be positive".to_string()));
        }
        if it.actual < 0.0 {
            return Err(BenchError::Metric("actual path must be nonnegative".to_string()));
        }
        if it.success {
            total += it.shortest / it.actual.max(it.shortest);
        }
    }
    Ok(total / items.len() as f64)
}

/// Kendall rank correlation between the discovered order and the optimal
/// order: tau = 1 - 4D / (n(n-1)) where D counts discordant pairs.
pub fn kendall_tau(found_order: &[String], optimal_order: &[String]) -> Result<f64, BenchError> {
    let n = optimal_order.len();
    if n < 2 || found_order.len() != n {
        return Err(BenchError::Metric("orders must have equal length >= 2".to_string()));
    }
    let set_a: BTreeSet<&String> = found_order.iter().collect();
    let set_b: BTreeSet<&String> = optimal_order.iter().collect();
    if set_a.len() != n || set_a != set_b {
        return Err(BenchError::Metric(
            "orders must be permutations of the same distinct items".to_string(),
        ));
    }
    let rank = |cat: &String| optimal_order.iter().position(|c| c == cat).unwrap();
    let mut discordant = 0i64;
    for i in 0..n {
        for j in i + 1..n {
            if rank(&found_order[i]) > rank(&found_order[j]) {
                discordant += 1;
            }
        }
    }
    // Integer numerator keeps the -1/3 and 1/3 cases exact.
    let pairs = (n * (n - 1) / 2) as i64;
    Ok((pairs - 2 * discordant) as f64 / pairs as f64)
}

/// Privileged baseline: three sequential point goals at the ground-truth
/// target positions in the optimal order. No scene graph, no planner.
pub fn baseline_agent(
    house: &House,
    ep: &Episode,
    low_level: crate::episode::LowLevelKind,
    seed: u64,
) -> crate::episode::EpisodeResult {
    use crate::episode::{
        EpisodeResult, FailureReason, FoundTarget, LowLevelKind, TraceEvent,
    };
    use crate::nav::{navigate_ornav, PnavSurrogate, PointGoal, SurrogateParams};
    use crate::sim::{AgentState, Heading, PerceptionConfig, SimSession};

    let start = AgentState::new(ep.start_cell(), Heading::from_degrees(ep.start_heading).unwrap_or(Heading::East));
    let mut session = SimSession::new(house, start, PerceptionConfig::ground_truth(), seed);
    let mut pnav = PnavSurrogate::new(SurrogateParams::calibrated(seed ^ 1));
    let mut trace = Vec::new();
    let mut found = Vec::new();
    let mut pose_cursor = 1;
    let (sx, sy) = session.state.position();
    trace.push(TraceEvent::Start {
        step: 0,
        house_id: house.id,
        x: sx,
        y: sy,
        heading: ep.start_heading,
    });

    let mut success = true;
    for category in &ep.shortest_path_targets_order {
        let pos = ep
            .target_position(category)
            .expect("order is a permutation of the targets");
        let goal = PointGoal::new((pos[0], pos[1]));
        let r = match low_level {
            LowLevelKind::OrNav => navigate_ornav(&mut session, &goal),
            LowLevelKind::PNavS => pnav.navigate(&mut session, &goal),
        };
        for p in &session.pose_log[pose_cursor..] {
            trace.push(TraceEvent::Pose {
                step: p.step,
                x: p.x,
                y: p.y,
                heading: p.heading_deg,
            });
        }
        pose_cursor = session.pose_log.len();
        trace.push(TraceEvent::Nav {
            step: session.state.step_count,
            target: category.clone(),
            success: r.success,
            steps_taken: r.steps_taken,
            path_length: r.path_length,
        });
        if !r.success {
            success = false;
            break;
        }
        trace.push(TraceEvent::Found {
            step: session.state.step_count,
            category: category.clone(),
            x: pos[0],
            y: pos[1],
        });
        found.push(FoundTarget {
            category: category.clone(),
            step_index: session.state.step_count,
            position: pos,
        });
    }

    let failure_reason = if success {
        FailureReason::None
    } else {
        FailureReason::NavError
    };
    trace.push(TraceEvent::End {
        step: session.state.step_count,
        success,
        failure_reason,
    });
    EpisodeResult {
        success,
        found,
        path_length: session.state.path_length,
        steps: session.state.step_count,
        failure_reason,
        trace,
    }
}

/// Aggregated metrics for one configuration over a dataset.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricsSummary {
    pub sr: f64,
    pub spl: f64,
    /// Mean over successful episodes; `None` when no episode succeeded or
    /// the metric does not apply (baseline).
    pub kendall_tau: Option<f64>,
    pub n_episodes: usize,
    pub n_success: usize,
}
