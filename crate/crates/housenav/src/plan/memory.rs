//! Visited-room memory. Two modes: annotation flags stored on the scene
//! graph itself, or an external tracker instance queried over the chat
//! transport with a compact per-visit digest history.

use crate::graph::SceneGraph;

use super::llm::{ChatTransport, ROOM_TRACKING_TEMPLATE};

const TRACKER_SYSTEM_PROMPT: &str =
    "You are a visit tracker for an indoor robot. Answer queries with exactly yes or no.";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MemoryMode {
    /// Visited/skipped flags live on the room nodes.
    GraphAnnotation,
    /// A tracker instance answers visited queries from a digest log.
    LlmTracker,
}

pub struct Memory<'a> {
    mode: MemoryMode,
    tracker: Option<Box<dyn ChatTransport + 'a>>,
    /// One line per visit; total stays small (a dozen rooms fit well under
    /// 2 kB) so the tracker context never grows unboundedly.
    digests: Vec<String>,
    /// Set permanently after a tracker failure; graph flags take over.
    degraded: bool,
}

impl<'a> Memory<'a> {
    pub fn graph_annotation() -> Memory<'a> {
        Memory {
            mode: MemoryMode::GraphAnnotation,
            tracker: None,
            digests: Vec::new(),
            degraded: false,
        }
    }

    pub fn llm_tracker(transport: Box<dyn ChatTransport + 'a>) -> Memory<'a> {
        Memory {
            mode: MemoryMode::LlmTracker,
            tracker: Some(transport),
            digests: Vec::new(),
            degraded: false,
        }
    }

    pub fn mode(&self) -> MemoryMode {
        self.mode
    }

    /// True once a tracker error forced the graph-annotation fallback.
    pub fn degraded(&self) -> bool {
        self.degraded
    }

    pub fn digest_log(&self) -> String {
        self.digests.join("\n")
    }

    /// Record a room visit. The graph flag is always set (it doubles as
    /// the fallback store); tracker mode additionally appends a digest.
    pub fn record_visit(
        &mut self,
        graph: &mut SceneGraph,
        room: usize,
        room_type: &str,
        outcome: &str,
    ) {
        graph.mark_investigated(room);
        if self.mode == MemoryMode::LlmTracker {
            self.digests.push(format!(
                "- {} type={room_type} outcome={outcome}",
                graph.rooms[room].id
            ));
        }
    }

    /// Has the room been visited? Tracker mode asks the tracker instance;
    /// on any transport error or unparsable answer it degrades to the
    /// graph flag for the rest of the episode.
    pub fn visited(&mut self, graph: &SceneGraph, room: usize) -> bool {
        let flag = graph.rooms[room].investigated;
        if self.mode == MemoryMode::GraphAnnotation || self.degraded {
            return flag;
        }
        let Some(tracker) = &self.tracker else {
            self.degraded = true;
            return flag;
        };
        let digest = if self.digests.is_empty() {
            "(empty)".to_string()
        } else {
            self.digests.join("\n")
        };
        let prompt = ROOM_TRACKING_TEMPLATE
            .replace("{DIGEST}", &digest)
            .replace("{ROOM_ID}", &graph.rooms[room].id);
        match tracker.complete(TRACKER_SYSTEM_PROMPT, &prompt) {
            Ok(reply) => {
                let answer = reply.trim().to_lowercase();
                if answer.starts_with("yes") {
                    true
                } else if answer.starts_with("no") {
                    false
                } else {
                    self.degraded = true;
                    flag
                }
            }
            Err(_) => {
                self.degraded = true;
                flag
            }
        }
    }
}
