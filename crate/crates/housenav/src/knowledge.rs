//! Common-sense placement knowledge shared by the house generator, the
//! heuristic planner backend, and the tests.
//!
//! The scores live in a single human-editable table (`data/knowledge.toml`)
//! so the generator priors, the planner priors, and the test expectations
//! cannot drift apart.

use std::collections::BTreeMap;

use serde::Deserialize;
use thiserror::Error;

/// Bundled table, compiled into the binary.
const BUNDLED_TABLE: &str = include_str!("../data/knowledge.toml");

#[derive(Debug, Error)]
pub enum KnowledgeError {
    #[error("failed to parse knowledge table: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("knowledge table invalid: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Deserialize)]
pub struct ObjectEntry {
    #[serde(default)]
    pub landmark: bool,
    /// Typical maximum dimension in meters.
    pub dimension: f64,
    /// Room-type prior: likelihood of finding this category in a room type.
    #[serde(default)]
    pub rooms: BTreeMap<String, f64>,
    /// Landmark prior: likelihood of finding this category near a landmark.
    #[serde(default)]
    pub near: BTreeMap<String, f64>,
}

/// The knowledge base: room-type priors, landmark priors, and the landmark
/// category list. Backing store for the heuristic planner and the house
/// generator's placement priors.
#[derive(Debug, Clone, Deserialize)]
pub struct KnowledgeBase {
    pub schema: u32,
    pub room_types: Vec<String>,
    pub objects: BTreeMap<String, ObjectEntry>,
}

impl KnowledgeBase {
    /// Load the bundled table.
    pub fn bundled() -> KnowledgeBase {
        Self::from_toml(BUNDLED_TABLE).expect("bundled knowledge table must be valid")
    }

    pub fn from_toml(text: &str) -> Result<KnowledgeBase, KnowledgeError> {
        let kb: KnowledgeBase = toml::from_str(text)?;
        kb.validate()?;
        Ok(kb)
    }

    fn validate(&self) -> Result<(), KnowledgeError> {
        for (cat, entry) in &self.objects {
            if entry.dimension <= 0.0 {
                return Err(KnowledgeError::Invalid(format!(
                    "{cat}: dimension must be positive"
                )));
            }
            if entry.rooms.is_empty() {
                return Err(KnowledgeError::Invalid(format!(
                    "{cat}: every category needs at least one room prior"
                )));
            }
            for (room, score) in &entry.rooms {
                if !self.room_types.iter().any(|r| r == room) {
                    return Err(KnowledgeError::Invalid(format!(
                        "{cat}: unknown room type {room}"
                    )));
                }
                if !(0.0..=1.0).contains(score) {
                    return Err(KnowledgeError::Invalid(format!(
                        "{cat}: room score {score} outside [0,1]"
                    )));
                }
            }
            for (lm, score) in &entry.near {
                if !(0.0..=1.0).contains(score) {
                    return Err(KnowledgeError::Invalid(format!(
                        "{cat}: near score {score} outside [0,1]"
                    )));
                }
                match self.objects.get(lm) {
                    Some(e) if e.landmark => {}
                    _ => {
                        return Err(KnowledgeError::Invalid(format!(
                            "{cat}: near target {lm} is not a landmark category"
                        )))
                    }
                }
            }
        }
        Ok(())
    }

    pub fn entry(&self, category: &str) -> Option<&ObjectEntry> {
        self.objects.get(category)
    }

    pub fn is_landmark_category(&self, category: &str) -> bool {
        self.objects.get(category).is_some_and(|e| e.landmark)
    }

    /// Typical maximum dimension for a category, if known.
    pub fn dimension(&self, category: &str) -> Option<f64> {
        self.objects.get(category).map(|e| e.dimension)
    }

    /// Likelihood of finding `category` in a room of `room_type`. Unknown
    /// pairs score zero.
    pub fn room_prior(&self, category: &str, room_type: &str) -> f64 {
        self.objects
            .get(category)
            .and_then(|e| e.rooms.get(room_type))
            .copied()
            .unwrap_or(0.0)
    }

    /// Likelihood of finding `category` near a `landmark`. Unknown pairs
    /// score zero.
    pub fn landmark_prior(&self, category: &str, landmark: &str) -> f64 {
        self.objects
            .get(category)
            .and_then(|e| e.near.get(landmark))
            .copied()
            .unwrap_or(0.0)
    }

    /// Room-type votes cast by a landmark category: its own room priors.
    pub fn room_signature(&self, landmark: &str) -> impl Iterator<Item = (&str, f64)> {
        self.objects
            .get(landmark)
            .into_iter()
            .filter(|e| e.landmark)
            .flat_map(|e| e.rooms.iter().map(|(r, s)| (r.as_str(), *s)))
    }

    /// All landmark categories, in stable order.
    pub fn landmark_categories(&self) -> impl Iterator<Item = &str> {
        self.objects
            .iter()
            .filter(|(_, e)| e.landmark)
            .map(|(c, _)| c.as_str())
    }

    /// All small (non-landmark, sub-threshold) categories, in stable order.
    pub fn small_categories(&self) -> impl Iterator<Item = &str> {
        self.objects
            .iter()
            .filter(|(_, e)| !e.landmark && e.dimension < crate::graph::LARGE_DIMENSION_THRESHOLD)
            .map(|(c, _)| c.as_str())
    }

    pub fn is_room_type(&self, label: &str) -> bool {
        self.room_types.iter().any(|r| r == label)
    }
}
