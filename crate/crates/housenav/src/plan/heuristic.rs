//! Offline plan backend driven entirely by the knowledge-base priors.
//! Serves as the default backend and as the fallback for the LLM backend.

use std::collections::{BTreeMap, BTreeSet};

use crate::graph::Subgraph;
use crate::knowledge::KnowledgeBase;

use super::{Plan, PlanBackend, PlanSource, PlanStep, PlannerConfig, render_plan};

pub struct HeuristicPlanner<'a> {
    kb: &'a KnowledgeBase,
    cfg: PlannerConfig,
}

impl<'a> HeuristicPlanner<'a> {
    pub fn new(kb: &'a KnowledgeBase, cfg: PlannerConfig) -> HeuristicPlanner<'a> {
        HeuristicPlanner { kb, cfg }
    }
}

/// Room-type vote: each distinct landmark category present casts its room
/// priors as weighted votes. A clear winner names the room; a tie or an
/// empty room stays "unknown".
pub fn vote_room_type(kb: &KnowledgeBase, sub: &Subgraph) -> String {
    let mut votes: BTreeMap<&str, f64> = BTreeMap::new();
    let mut cats: Vec<&str> = sub.landmark_categories_present();
    cats.sort_unstable();
    cats.dedup();
    for cat in cats {
        for (room, score) in kb.room_signature(cat) {
            *votes.entry(room).or_insert(0.0) += score;
        }
    }
    let Some((&winner, &best)) = votes.iter().max_by(|a, b| a.1.partial_cmp(b.1).unwrap()) else {
        return "unknown".to_string();
    };
    let tied = votes
        .iter()
        .filter(|(r, v)| **r != winner && (best - **v).abs() < 1e-9)
        .count();
    if tied > 0 {
        return "unknown".to_string();
    }
    winner.to_string()
}

impl PlanBackend for HeuristicPlanner<'_> {
    fn identify_room_type(&mut self, sub: &Subgraph) -> String {
        vote_room_type(self.kb, sub)
    }

    fn assess_feasibility(
        &mut self,
        room_type: &str,
        unfound: &BTreeSet<String>,
    ) -> BTreeMap<String, bool> {
        unfound
            .iter()
            .map(|cat| {
                // An unidentified room cannot rule anything out.
                let feasible = room_type == "unknown"
                    || self.kb.room_prior(cat, room_type) >= self.cfg.feasibility_threshold;
                (cat.clone(), feasible)
            })
            .collect()
    }

    fn generate_plan(&mut self, sub: &Subgraph, unfound: &BTreeSet<String>) -> Plan {
        // Score each landmark by its best prior over the unfound targets;
        // visit high scorers first, stable on subgraph (creation) order.
        let mut scored: Vec<(f64, usize, &str, &str)> = Vec::new();
        for (idx, large) in sub.larges.iter().enumerate() {
            let mut best = 0.0;
            let mut best_cat = "";
            for cat in unfound {
                let p = self.kb.landmark_prior(cat, &large.category);
                if p > best {
                    best = p;
                    best_cat = cat;
                }
            }
            if best >= self.cfg.landmark_cutoff {
                scored.push((best, idx, large.id.as_str(), best_cat));
            }
        }
        scored.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));

        let mut steps = Vec::new();
        for (_, _, id, cat) in &scored {
            steps.push(PlanStep::navigate(id, &format!("check for {cat}")));
            steps.push(PlanStep::look("scan the surroundings"));
        }
        if steps.is_empty() {
            // Nothing promising in view: a single sweep may reveal more.
            steps.push(PlanStep::look("scan the room"));
        }
        let raw_text = render_plan(&steps);
        Plan {
            steps,
            source: PlanSource::Heuristic,
            raw_text,
        }
    }

    fn source(&self) -> PlanSource {
        PlanSource::Heuristic
    }
}
