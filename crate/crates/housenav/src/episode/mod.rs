//! End-to-end episode orchestration: spawn, perceive, type and gate rooms,
//! plan, execute, explore doors, revisit skipped rooms, and terminate with
//! a structured, fully traced result.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::bench::{episode_house, kendall_tau, spl, Episode, MetricsSummary, SplItem};
use crate::graph::{extract_subgraph, SceneGraph};
use crate::knowledge::KnowledgeBase;
use crate::nav::{
    astar_distance, navigate_ornav, NavResult, PnavSurrogate, PointGoal, SurrogateParams,
};
use crate::plan::{
    on_plan_exhausted, HeuristicPlanner, HttpChatTransport, LlmConfig, LlmPlanner, Memory,
    NextAction, PlanBackend, PlannerConfig, StepKind,
};
use crate::sim::{AgentState, Cell, CellKind, Heading, House, PerceptionConfig, SimSession};

/// Primitive-step budget per episode; roughly six point-goal caps, enough
/// for three targets across a ten-room house.
pub const DEFAULT_STEP_BUDGET: usize = 2000;
/// Failed door traversals before a door is locally excluded this episode.
const DOOR_FAILURE_LIMIT: u32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SceneGraphMode {
    /// Ground-truth perception: exact room contents per sweep.
    Gt,
    /// Visual-observation perception: raycast gates plus position noise.
    Vo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LowLevelKind {
    OrNav,
    PNavS,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BackendKind {
    Heuristic,
    Llm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MemoryKind {
    Graph,
    Llm,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub scene_graph_mode: SceneGraphMode,
    pub low_level: LowLevelKind,
    pub backend: BackendKind,
    pub memory: MemoryKind,
    pub step_budget: usize,
    pub seed: u64,
    pub planner: PlannerConfig,
    /// Transport settings when backend or memory is LLM-based.
    pub llm: Option<LlmConfig>,
}

impl RunConfig {
    pub fn new(scene_graph_mode: SceneGraphMode, low_level: LowLevelKind, seed: u64) -> RunConfig {
        RunConfig {
            scene_graph_mode,
            low_level,
            backend: BackendKind::Heuristic,
            memory: MemoryKind::Graph,
            step_budget: DEFAULT_STEP_BUDGET,
            seed,
            planner: PlannerConfig::default(),
            llm: None,
        }
    }

    /// Per-episode seed so episodes are independent but reproducible.
    pub fn episode_seed(&self, house_idx: usize) -> u64 {
        self.seed
            .wrapping_add((house_idx as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureReason {
    None,
    DoorsExhausted,
    StepBudget,
    NavError,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoundTarget {
    pub category: String,
    pub step_index: usize,
    pub position: [f64; 2],
}

/// One line of the episode trace; serialized as JSON-lines for the
/// renderer and the invariant-checking tests.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum TraceEvent {
    Start { step: usize, house_id: u64, x: f64, y: f64, heading: u16 },
    Pose { step: usize, x: f64, y: f64, heading: u16 },
    Look { step: usize, room: String, percepts: usize },
    GraphDelta { step: usize, created: Vec<String>, updated: usize, rejected: usize },
    RoomType { step: usize, room: String, label: String },
    Feasibility { step: usize, room: String, feasible: Vec<String>, infeasible: Vec<String> },
    PlanGenerated { step: usize, room: String, unfound: Vec<String>, source: String, text: String },
    Nav { step: usize, target: String, success: bool, steps_taken: usize, path_length: f64 },
    DoorTraversed { step: usize, door: String, from_room: String, to_room: String },
    Found { step: usize, category: String, x: f64, y: f64 },
    Wander { step: usize, room: String },
    Revisit { step: usize, room: String },
    Skipped { step: usize, room: String, categories: Vec<String> },
    End { step: usize, success: bool, failure_reason: FailureReason },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeResult {
    pub success: bool,
    /// Targets in discovery order; step indices strictly increase.
    pub found: Vec<FoundTarget>,
    pub path_length: f64,
    pub steps: usize,
    pub failure_reason: FailureReason,
    pub trace: Vec<TraceEvent>,
}

pub fn write_trace(path: &std::path::Path, trace: &[TraceEvent]) -> std::io::Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    for event in trace {
        serde_json::to_writer(&mut out, event)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_trace(path: &std::path::Path) -> std::io::Result<Vec<TraceEvent>> {
    let file = std::io::BufReader::new(std::fs::File::open(path)?);
    let mut events = Vec::new();
    for line in file.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        events.push(serde_json::from_str(&line).map_err(std::io::Error::other)?);
    }
    Ok(events)
}

enum LowLevel {
    Or,
    Pnav(PnavSurrogate),
}

impl LowLevel {
    fn navigate(&mut self, session: &mut SimSession<'_>, goal: &PointGoal) -> NavResult {
        match self {
            LowLevel::Or => navigate_ornav(session, goal),
            LowLevel::Pnav(p) => p.navigate(session, goal),
        }
    }
}

/// Run one episode end to end. Never aborts: internal errors become
/// `nav_error` failures in the result.
pub fn run_episode(
    house: &House,
    ep: &Episode,
    cfg: &RunConfig,
    kb: &KnowledgeBase,
) -> EpisodeResult {
    let memory = build_memory(cfg);
    match cfg.backend {
        BackendKind::Heuristic => {
            let mut backend = HeuristicPlanner::new(kb, cfg.planner.clone());
            run_episode_with(house, ep, cfg, kb, &mut backend, memory)
        }
        BackendKind::Llm => match HttpChatTransport::new(cfg.llm.clone().unwrap_or_default()) {
            Ok(transport) => {
                let mut backend =
                    LlmPlanner::new(kb, cfg.planner.clone(), Box::new(transport));
                run_episode_with(house, ep, cfg, kb, &mut backend, memory)
            }
            // No usable endpoint: degrade to the offline backend.
            Err(_) => {
                let mut backend = HeuristicPlanner::new(kb, cfg.planner.clone());
                run_episode_with(house, ep, cfg, kb, &mut backend, memory)
            }
        },
    }
}

fn build_memory<'a>(cfg: &RunConfig) -> Memory<'a> {
    match cfg.memory {
        MemoryKind::Graph => Memory::graph_annotation(),
        MemoryKind::Llm => match HttpChatTransport::new(cfg.llm.clone().unwrap_or_default()) {
            Ok(transport) => Memory::llm_tracker(Box::new(transport)),
            Err(_) => Memory::graph_annotation(),
        },
    }
}

struct EpisodeState<'a, 'h> {
    session: SimSession<'h>,
    graph: SceneGraph,
    current: usize,
    unfound: BTreeSet<String>,
    found: Vec<FoundTarget>,
    trace: Vec<TraceEvent>,
    pose_cursor: usize,
    low: LowLevel,
    kb: &'a KnowledgeBase,
}

impl EpisodeState<'_, '_> {
    fn step_count(&self) -> usize {
        self.session.state.step_count
    }

    fn drain_poses(&mut self) {
        for p in &self.session.pose_log[self.pose_cursor..] {
            self.trace.push(TraceEvent::Pose {
                step: p.step,
                x: p.x,
                y: p.y,
                heading: p.heading_deg,
            });
        }
        self.pose_cursor = self.session.pose_log.len();
    }

    /// Sweep, integrate into the current belief room, and detect targets.
    fn look_and_integrate(&mut self) {
        let obs = self.session.look_around();
        self.trace.push(TraceEvent::Look {
            step: self.step_count(),
            room: self.graph.rooms[self.current].id.clone(),
            percepts: obs.percepts.len(),
        });
        let delta = self
            .graph
            .integrate_observation(self.kb, self.current, &obs);
        self.trace.push(TraceEvent::GraphDelta {
            step: self.step_count(),
            created: delta.created.clone(),
            updated: delta.updated.len(),
            rejected: delta.rejected_percepts,
        });
        self.detect_targets();
    }

    /// A target counts as found the moment a matching-category node exists
    /// in the scene graph (detection, not proximity).
    fn detect_targets(&mut self) {
        let mut hits: Vec<(u64, String, [f64; 3])> = Vec::new();
        for n in &self.graph.larges {
            if self.unfound.contains(&n.category) {
                hits.push((n.seq, n.category.clone(), n.position));
            }
        }
        for n in &self.graph.smalls {
            if self.unfound.contains(&n.category) {
                hits.push((n.seq, n.category.clone(), n.position));
            }
        }
        // Nearer detections are logged first so that several targets spotted
        // in one sweep enter the discovery order the way a shortest tour
        // would visit them; seq breaks exact distance ties deterministically.
        let (ax, ay) = self.session.state.position();
        hits.sort_by(|(sa, _, pa), (sb, _, pb)| {
            let da = (pa[0] - ax).powi(2) + (pa[1] - ay).powi(2);
            let db = (pb[0] - ax).powi(2) + (pb[1] - ay).powi(2);
            da.partial_cmp(&db).unwrap().then(sa.cmp(sb))
        });
        for (_, category, pos) in hits {
            if !self.unfound.remove(&category) {
                continue;
            }
            // Discoveries within one sweep share a step count; keep found
            // indices strictly increasing by sub-ordering on detection.
            let step = self
                .found
                .last()
                .map_or(self.step_count(), |f| self.step_count().max(f.step_index + 1));
            self.trace.push(TraceEvent::Found {
                step,
                category: category.clone(),
                x: pos[0],
                y: pos[1],
            });
            self.found.push(FoundTarget {
                category,
                step_index: step,
                position: [pos[0], pos[1]],
            });
        }
    }

    /// Navigate with one retry on failure, tracing every attempt.
    fn nav_with_retry(&mut self, target: (f64, f64), radius: f64, label: &str) -> bool {
        for _attempt in 0..2 {
            let goal = PointGoal {
                target,
                success_radius: radius,
                max_steps: 300,
            };
            let r = self.low.navigate(&mut self.session, &goal);
            self.drain_poses();
            self.trace.push(TraceEvent::Nav {
                step: self.step_count(),
                target: label.to_string(),
                success: r.success,
                steps_taken: r.steps_taken,
                path_length: r.path_length,
            });
            if r.success {
                return true;
            }
        }
        false
    }
}

fn unfound_key(unfound: &BTreeSet<String>) -> String {
    unfound.iter().cloned().collect::<Vec<_>>().join(",")
}

/// Find the passable cell just beyond a door, seen from `from`.
fn far_side_of_door(house: &House, door_pos: [f64; 3], from: (f64, f64)) -> Option<Cell> {
    let approx = Cell::containing(door_pos[0], door_pos[1]);
    let mut door_cell = None;
    'scan: for dy in -1..=1 {
        for dx in -1..=1 {
            let c = Cell::new(approx.x + dx, approx.y + dy);
            if matches!(house.grid.kind(c), CellKind::Door(_)) {
                door_cell = Some(c);
                break 'scan;
            }
        }
    }
    let door_cell = door_cell?;
    [(1, 0), (-1, 0), (0, 1), (0, -1)]
        .iter()
        .map(|(dx, dy)| Cell::new(door_cell.x + dx, door_cell.y + dy))
        .filter(|c| house.passable(*c))
        .max_by(|a, b| {
            let da = dist(a.center(), from);
            let db = dist(b.center(), from);
            da.partial_cmp(&db).unwrap()
        })
}

fn dist(a: (f64, f64), b: (f64, f64)) -> f64 {
    ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt()
}

/// Episode loop with an externally supplied plan backend, so callers can
/// inject scripted LLM transports and keep the transcript.
pub fn run_episode_with(
    house: &House,
    ep: &Episode,
    cfg: &RunConfig,
    kb: &KnowledgeBase,
    backend: &mut dyn PlanBackend,
    mut memory: Memory<'_>,
) -> EpisodeResult {
    let seed = cfg.episode_seed(ep.house_idx);
    let perception = match cfg.scene_graph_mode {
        SceneGraphMode::Gt => PerceptionConfig::ground_truth(),
        SceneGraphMode::Vo => PerceptionConfig::default(),
    };
    let start = AgentState::new(ep.start_cell(), Heading::from_degrees(ep.start_heading).unwrap_or(Heading::East));
    let low = match cfg.low_level {
        LowLevelKind::OrNav => LowLevel::Or,
        LowLevelKind::PNavS => {
            LowLevel::Pnav(PnavSurrogate::new(SurrogateParams::calibrated(seed ^ 1)))
        }
    };

    let mut graph = SceneGraph::new();
    let current = graph.create_room();
    let mut st = EpisodeState {
        session: SimSession::new(house, start, perception, seed),
        graph,
        current,
        unfound: ep.targets.iter().map(|t| t.category.clone()).collect(),
        found: Vec::new(),
        trace: Vec::new(),
        pose_cursor: 1,
        low,
        kb,
    };
    let (sx, sy) = st.session.state.position();
    st.trace.push(TraceEvent::Start {
        step: 0,
        house_id: house.id,
        x: sx,
        y: sy,
        heading: ep.start_heading,
    });
    st.look_and_integrate();

    let mut planned: HashSet<(usize, String)> = HashSet::new();
    let mut wander_used: HashMap<usize, u32> = HashMap::new();
    let mut door_failures: HashMap<usize, u32> = HashMap::new();
    let mut revisited: HashSet<usize> = HashSet::new();

    let mut guard = 0usize;
    let (success, failure_reason) = loop {
        guard += 1;
        if guard > 5000 {
            break (false, FailureReason::NavError);
        }
        if st.unfound.is_empty() {
            break (true, FailureReason::None);
        }
        if st.step_count() >= cfg.step_budget {
            break (false, FailureReason::StepBudget);
        }

        let Ok(sub) = extract_subgraph(&st.graph, st.current) else {
            break (false, FailureReason::NavError);
        };
        if st.graph.rooms[st.current].room_type.is_none() {
            let label = backend.identify_room_type(&sub);
            st.trace.push(TraceEvent::RoomType {
                step: st.step_count(),
                room: st.graph.rooms[st.current].id.clone(),
                label: label.clone(),
            });
            if label != "unknown" {
                st.graph.set_room_type(st.current, &label);
            }
        }

        let key = unfound_key(&st.unfound);
        let visited = memory.visited(&st.graph, st.current);
        if !visited || !planned.contains(&(st.current, key.clone())) {
            planned.insert((st.current, key.clone()));
            let room_id = st.graph.rooms[st.current].id.clone();
            let room_type = st.graph.rooms[st.current]
                .room_type
                .clone()
                .unwrap_or_else(|| "unknown".to_string());
            let verdicts = backend.assess_feasibility(&room_type, &st.unfound);
            let feasible: BTreeSet<String> = verdicts
                .iter()
                .filter(|(_, v)| **v)
                .map(|(c, _)| c.clone())
                .collect();
            st.trace.push(TraceEvent::Feasibility {
                step: st.step_count(),
                room: room_id.clone(),
                feasible: feasible.iter().cloned().collect(),
                infeasible: verdicts
                    .iter()
                    .filter(|(_, v)| !**v)
                    .map(|(c, _)| c.clone())
                    .collect(),
            });

            if feasible.is_empty() {
                st.graph.mark_skipped(st.current, st.unfound.iter().cloned());
                st.trace.push(TraceEvent::Skipped {
                    step: st.step_count(),
                    room: room_id,
                    categories: st.unfound.iter().cloned().collect(),
                });
                memory.record_visit(&mut st.graph, st.current, &room_type, "skipped");
            } else {
                let sub = extract_subgraph(&st.graph, st.current).expect("room exists");
                let plan = backend.generate_plan(&sub, &feasible);
                st.trace.push(TraceEvent::PlanGenerated {
                    step: st.step_count(),
                    room: room_id,
                    unfound: st.unfound.iter().cloned().collect(),
                    source: format!("{:?}", plan.source),
                    text: plan.raw_text.clone(),
                });
                memory.record_visit(&mut st.graph, st.current, &room_type, "searched");

                for step in &plan.steps {
                    if st.unfound.is_empty() || st.step_count() >= cfg.step_budget {
                        break;
                    }
                    match step.kind {
                        StepKind::Navigate => {
                            let Some(id) = step.target.as_deref() else { continue };
                            let Some(pos) = sub.target_position(id) else { continue };
                            st.nav_with_retry((pos[0], pos[1]), 1.5, id);
                        }
                        StepKind::Look => st.look_and_integrate(),
                    }
                }
                // Re-evaluate from the top: discoveries shrink the unfound
                // set and trigger a fresh plan for the new situation.
                continue;
            }
        }

        // Plan exhausted for this situation: fall back per the ladder.
        let pos = st.session.state.position();
        let wander_left = cfg
            .planner
            .wander_budget_per_room
            .saturating_sub(*wander_used.get(&st.current).unwrap_or(&0));
        let failures = door_failures.clone();
        let doors = &st.graph.doors;
        let cost = |x: f64, y: f64| {
            // Locally excluded doors get infinite cost.
            let excluded = doors.iter().enumerate().any(|(i, d)| {
                d.position[0] == x
                    && d.position[1] == y
                    && failures.get(&i).copied().unwrap_or(0) >= DOOR_FAILURE_LIMIT
            });
            if excluded {
                None
            } else {
                astar_distance(house, pos, (x, y))
            }
        };
        match on_plan_exhausted(&st.graph, false, wander_left, cost) {
            NextAction::Replan => continue,
            NextAction::GoToDoor(door) => {
                if door_failures.get(&door).copied().unwrap_or(0) >= DOOR_FAILURE_LIMIT {
                    // Every remaining door is excluded; burn the wander
                    // budget, then exhaust.
                    if wander_left == 0 {
                        break (false, FailureReason::DoorsExhausted);
                    }
                    *wander_used.entry(st.current).or_insert(0) += 1;
                    st.look_and_integrate();
                    continue;
                }
                let door_pos = st.graph.doors[door].position;
                let door_id = st.graph.doors[door].id.clone();
                match far_side_of_door(house, door_pos, pos) {
                    Some(far) => {
                        if st.nav_with_retry(far.center(), 0.3, &door_id) {
                            let from_id = st.graph.rooms[st.current].id.clone();
                            let dest = st.graph.traverse_door(door, st.current);
                            st.current = dest;
                            st.trace.push(TraceEvent::DoorTraversed {
                                step: st.step_count(),
                                door: door_id,
                                from_room: from_id,
                                to_room: st.graph.rooms[dest].id.clone(),
                            });
                            st.look_and_integrate();
                        } else {
                            *door_failures.entry(door).or_insert(0) += 1;
                        }
                    }
                    // Belief door has no real doorway nearby: exclude it.
                    None => {
                        *door_failures.entry(door).or_insert(0) += DOOR_FAILURE_LIMIT;
                    }
                }
            }
            NextAction::RefineWander => {
                *wander_used.entry(st.current).or_insert(0) += 1;
                st.trace.push(TraceEvent::Wander {
                    step: st.step_count(),
                    room: st.graph.rooms[st.current].id.clone(),
                });
                if let Some(bounds) = st.graph.rooms[st.current].bounds {
                    let center = bounds.center();
                    st.nav_with_retry(center, 1.0, "wander");
                }
                st.look_and_integrate();
            }
            NextAction::Exhausted => {
                // Revisit each skipped room once before declaring failure.
                let candidate = st
                    .graph
                    .rooms
                    .iter()
                    .enumerate()
                    .find(|(i, r)| !r.skipped_for.is_empty() && !revisited.contains(i))
                    .map(|(i, r)| (i, r.bounds));
                match candidate {
                    Some((room, bounds)) => {
                        revisited.insert(room);
                        st.trace.push(TraceEvent::Revisit {
                            step: st.step_count(),
                            room: st.graph.rooms[room].id.clone(),
                        });
                        if let Some(b) = bounds {
                            st.nav_with_retry(b.center(), 1.0, "revisit");
                        }
                        st.current = room;
                        st.look_and_integrate();
                    }
                    None => break (false, FailureReason::DoorsExhausted),
                }
            }
        }
    };

    let steps = st.step_count();
    st.trace.push(TraceEvent::End {
        step: steps,
        success,
        failure_reason,
    });
    EpisodeResult {
        success,
        found: st.found,
        path_length: st.session.state.path_length,
        steps,
        failure_reason,
        trace: st.trace,
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixRow {
    pub name: String,
    pub metrics: MetricsSummary,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixReport {
    pub rows: Vec<MatrixRow>,
}

#[derive(Debug, thiserror::Error)]
pub enum MatrixError {
    #[error("config list must be nonempty")]
    NoConfigs,
    #[error("dataset must be nonempty")]
    NoEpisodes,
}

fn failed_placeholder() -> EpisodeResult {
    EpisodeResult {
        success: false,
        found: Vec::new(),
        path_length: 0.0,
        steps: 0,
        failure_reason: FailureReason::NavError,
        trace: Vec::new(),
    }
}

/// Aggregate per-config metrics over a dataset's results.
pub fn summarize(episodes: &[Episode], results: &[EpisodeResult]) -> MetricsSummary {
    assert_eq!(episodes.len(), results.len());
    let n = episodes.len();
    let n_success = results.iter().filter(|r| r.success).count();
    let items: Vec<SplItem> = episodes
        .iter()
        .zip(results)
        .map(|(ep, r)| SplItem {
            success: r.success,
            shortest: ep.shortest_path_length,
            actual: r.path_length,
        })
        .collect();
    let spl_value = spl(&items).unwrap_or(0.0);
    let taus: Vec<f64> = episodes
        .iter()
        .zip(results)
        .filter(|(_, r)| r.success)
        .filter_map(|(ep, r)| {
            let order: Vec<String> = r.found.iter().map(|f| f.category.clone()).collect();
            kendall_tau(&order, &ep.shortest_path_targets_order).ok()
        })
        .collect();
    MetricsSummary {
        sr: n_success as f64 / n as f64,
        spl: spl_value,
        kendall_tau: if taus.is_empty() {
            None
        } else {
            Some(taus.iter().sum::<f64>() / taus.len() as f64)
        },
        n_episodes: n,
        n_success,
    }
}

/// Run every episode under every config, in parallel across episodes, and
/// append the privileged baseline row. Crashing episodes count as failed.
pub fn run_matrix(
    episodes: &[Episode],
    configs: &[(String, RunConfig)],
    kb: &KnowledgeBase,
    baseline_seed: u64,
) -> Result<MatrixReport, MatrixError> {
    use rayon::prelude::*;
    if configs.is_empty() {
        return Err(MatrixError::NoConfigs);
    }
    if episodes.is_empty() {
        return Err(MatrixError::NoEpisodes);
    }
    let mut rows = Vec::new();
    for (name, cfg) in configs {
        let mut results: Vec<(usize, EpisodeResult)> = episodes
            .par_iter()
            .enumerate()
            .map(|(i, ep)| {
                let out = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| {
                    let house = episode_house(ep, kb).ok()?;
                    Some(run_episode(&house, ep, cfg, kb))
                }));
                (i, out.ok().flatten().unwrap_or_else(failed_placeholder))
            })
            .collect();
        results.sort_by_key(|(i, _)| *i);
        let results: Vec<EpisodeResult> = results.into_iter().map(|(_, r)| r).collect();
        rows.push(MatrixRow {
            name: name.clone(),
            metrics: summarize(episodes, &results),
        });
    }

    let mut baseline: Vec<(usize, EpisodeResult)> = episodes
        .par_iter()
        .enumerate()
        .map(|(i, ep)| {
            let out = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| {
                let house = episode_house(ep, kb).ok()?;
                Some(crate::bench::baseline_agent(
                    &house,
                    ep,
                    LowLevelKind::PNavS,
                    baseline_seed.wrapping_add(i as u64),
                ))
            }));
            (i, out.ok().flatten().unwrap_or_else(failed_placeholder))
        })
        .collect();
    baseline.sort_by_key(|(i, _)| *i);
    let baseline: Vec<EpisodeResult> = baseline.into_iter().map(|(_, r)| r).collect();
    let mut metrics = summarize(episodes, &baseline);
    // Discovery order is imposed, not chosen: the rank metric does not
    // apply to the baseline.
    metrics.kendall_tau = None;
    rows.push(MatrixRow {
        name: "baseline".to_string(),
        metrics,
    });
    Ok(MatrixReport { rows })
}

#[cfg(test)]
mod tests;
