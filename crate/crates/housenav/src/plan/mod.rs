//! High-level dynamic planner: room typing, feasibility gating, short
//! navigate/look plans from the current subgraph, fallback selection, and
//! visited-room memory.
//!
//! Two interchangeable backends generate plans: an offline heuristic over
//! the knowledge-base priors and a chat-completion LLM client that falls
//! back to the heuristic on any transport or parse failure.

mod heuristic;
mod llm;
mod memory;

pub use heuristic::HeuristicPlanner;
pub use llm::{
    ChatTransport, HttpChatTransport, LlmConfig, LlmError, LlmPlanner, ScriptedTransport,
    TranscriptEntry,
};
pub use memory::{Memory, MemoryMode};

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{SceneGraph, Subgraph};

/// Tunables the plan postconditions depend on.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlannerConfig {
    /// Room prior at or above which a target is feasible in a room type.
    pub feasibility_threshold: f64,
    /// Landmark prior at or above which a landmark enters the plan.
    pub landmark_cutoff: f64,
    /// Refine-wander attempts allowed per room.
    pub wander_budget_per_room: u32,
    /// LLM plan-generation retries before heuristic fallback.
    pub llm_retries: u32,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        PlannerConfig {
            feasibility_threshold: 0.2,
            landmark_cutoff: 0.1,
            wander_budget_per_room: 2,
            llm_retries: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StepKind {
    Navigate,
    Look,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanStep {
    pub kind: StepKind,
    /// Navigate: a large-object or door node id. Look: none.
    pub target: Option<String>,
    pub comment: String,
}

impl PlanStep {
    pub fn navigate(target: &str, comment: &str) -> PlanStep {
        PlanStep {
            kind: StepKind::Navigate,
            target: Some(target.to_string()),
            comment: comment.to_string(),
        }
    }

    pub fn look(comment: &str) -> PlanStep {
        PlanStep {
            kind: StepKind::Look,
            target: None,
            comment: comment.to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PlanSource {
    Llm,
    Heuristic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Plan {
    pub steps: Vec<PlanStep>,
    pub source: PlanSource,
    pub raw_text: String,
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("plan parse error at line {line}: {reason} ({text:?})")]
pub struct ParseError {
    pub line: usize,
    pub text: String,
    pub reason: String,
}

/// Parse plan text: one step per line, `navigate(<id>)` or `look()`, with
/// an optional trailing `# comment`. Blank lines and fenced-code markers
/// are skipped; consecutive duplicate steps are collapsed. Never panics on
/// arbitrary input.
pub fn parse_plan(text: &str) -> Result<Vec<PlanStep>, ParseError> {
    let mut steps: Vec<PlanStep> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with("```") {
            continue;
        }
        // Tolerate list markers some models prepend.
        let line = line
            .trim_start_matches(|c: char| c.is_ascii_digit())
            .trim_start_matches('.')
            .trim_start_matches('-')
            .trim_start();

        let (call, comment) = match line.split_once('#') {
            Some((c, comment)) => (c.trim(), comment.trim().to_string()),
            None => (line, String::new()),
        };
        if call.is_empty() {
            continue;
        }

        let err = |reason: &str| ParseError {
            line: lineno + 1,
            text: raw.to_string(),
            reason: reason.to_string(),
        };

        let open = call.find('(').ok_or_else(|| err("missing argument list"))?;
        let close = call.rfind(')').ok_or_else(|| err("unterminated argument list"))?;
        if close < open {
            return Err(err("malformed argument list"));
        }
        let func = call[..open].trim();
        let arg = call[open + 1..close].trim();
        if !call[close + 1..].trim().is_empty() {
            return Err(err("trailing text after call"));
        }

        let step = match func {
            "navigate" => {
                if arg.is_empty() {
                    return Err(err("navigate requires a node id"));
                }
                if !arg.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                    return Err(err("malformed node id"));
                }
                PlanStep::navigate(arg, &comment)
            }
            "look" => {
                if !arg.is_empty() {
                    return Err(err("look takes no arguments"));
                }
                PlanStep::look(&comment)
            }
            other => {
                return Err(ParseError {
                    line: lineno + 1,
                    text: raw.to_string(),
                    reason: format!("unknown function {other:?}"),
                })
            }
        };
        let duplicate = steps
            .last()
            .is_some_and(|prev: &PlanStep| prev.kind == step.kind && prev.target == step.target);
        if !duplicate {
            steps.push(step);
        }
    }
    if steps.is_empty() {
        return Err(ParseError {
            line: 0,
            text: text.chars().take(80).collect(),
            reason: "no valid steps".to_string(),
        });
    }
    Ok(steps)
}

/// Render steps back into the plan grammar; `parse_plan` of the result
/// returns the same steps with comments preserved verbatim.
pub fn render_plan(steps: &[PlanStep]) -> String {
    let mut out = String::new();
    for step in steps {
        let call = match step.kind {
            StepKind::Navigate => format!("navigate({})", step.target.as_deref().unwrap_or("")),
            StepKind::Look => "look()".to_string(),
        };
        if step.comment.is_empty() {
            out.push_str(&call);
        } else {
            out.push_str(&format!("{call} # {}", step.comment));
        }
        out.push('\n');
    }
    out
}

/// Pluggable plan generation backend. Both implementations satisfy the
/// same postconditions (valid targets, navigate/look alternation), so
/// episode logic never branches on backend identity.
pub trait PlanBackend {
    fn identify_room_type(&mut self, sub: &Subgraph) -> String;
    fn assess_feasibility(
        &mut self,
        room_type: &str,
        unfound: &BTreeSet<String>,
    ) -> BTreeMap<String, bool>;
    fn generate_plan(&mut self, sub: &Subgraph, unfound: &BTreeSet<String>) -> Plan;
    fn source(&self) -> PlanSource;
}

/// Fallback chosen when a plan is exhausted with targets remaining.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NextAction {
    /// New information appeared in the room: plan again.
    Replan,
    /// Move through the given unexplored door (by door index).
    GoToDoor(usize),
    /// Navigate to the room center and look around to refine the graph.
    RefineWander,
    /// Nothing left to try here; the agent loop decides (revisit or fail).
    Exhausted,
}

/// Fallback ladder after a plan finishes without completing the task:
/// replan on new information, else the nearest unexplored door, else a
/// bounded wander to collect more observations.
pub fn on_plan_exhausted(
    graph: &SceneGraph,
    new_info_in_room: bool,
    wander_budget_remaining: u32,
    travel_cost: impl Fn(f64, f64) -> Option<f64>,
) -> NextAction {
    if new_info_in_room {
        return NextAction::Replan;
    }
    if !graph.all_doors_explored() {
        if let Ok(door) = graph.find_next_unexplored_door(travel_cost) {
            return NextAction::GoToDoor(door);
        }
    }
    if wander_budget_remaining > 0 {
        return NextAction::RefineWander;
    }
    NextAction::Exhausted
}

#[cfg(test)]
mod tests;
