//! LLM plan backend: renders prompt templates, calls a chat-completion
//! endpoint through a pluggable transport, validates the reply, and falls
//! back to the heuristic backend on any failure.
//!
//! Credentials come from an environment variable, never from config files.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{subgraph_to_text, Subgraph};
use crate::knowledge::KnowledgeBase;

use super::{
    parse_plan, HeuristicPlanner, Plan, PlanBackend, PlanSource, PlannerConfig,
};

const SEARCH_PLAN_TEMPLATE: &str = include_str!("../../data/prompts/search_plan.txt");
const ROOM_TYPE_TEMPLATE: &str = include_str!("../../data/prompts/room_type.txt");
const FEASIBILITY_TEMPLATE: &str = include_str!("../../data/prompts/feasibility.txt");
pub(crate) const ROOM_TRACKING_TEMPLATE: &str = include_str!("../../data/prompts/room_tracking.txt");

const SYSTEM_PROMPT: &str =
    "You are a terse planning assistant for an indoor robot. Follow the requested output format exactly.";

#[derive(Debug, Error)]
pub enum LlmError {
    #[error("transport error: {0}")]
    Transport(String),
    #[error("missing credential: environment variable {0} is not set")]
    MissingCredential(String),
    #[error("unusable response: {0}")]
    BadResponse(String),
}

/// Minimal chat interface so tests and examples can script responses
/// without a network.
pub trait ChatTransport {
    fn complete(&self, system: &str, user: &str) -> Result<String, LlmError>;
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LlmConfig {
    /// Chat-completions endpoint URL.
    pub endpoint: String,
    pub model: String,
    pub temperature: f64,
    pub max_tokens: u32,
    pub timeout_secs: u64,
    /// Name of the environment variable holding the API key.
    pub api_key_env: String,
}

impl Default for LlmConfig {
    fn default() -> Self {
        LlmConfig {
            endpoint: std::env::var("HOUSENAV_LLM_ENDPOINT").unwrap_or_default(),
            model: std::env::var("HOUSENAV_LLM_MODEL")
                .unwrap_or_else(|_| "gpt-4o-mini".to_string()),
            temperature: 0.0,
            max_tokens: 512,
            timeout_secs: 30,
            api_key_env: "HOUSENAV_LLM_API_KEY".to_string(),
        }
    }
}

/// Blocking HTTP transport speaking the common chat-completions wire
/// format.
pub struct HttpChatTransport {
    cfg: LlmConfig,
    client: reqwest::blocking::Client,
}

impl HttpChatTransport {
    pub fn new(cfg: LlmConfig) -> Result<HttpChatTransport, LlmError> {
        if cfg.endpoint.is_empty() {
            return Err(LlmError::Transport("no endpoint configured".to_string()));
        }
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(cfg.timeout_secs))
            .build()
            .map_err(|e| LlmError::Transport(e.to_string()))?;
        Ok(HttpChatTransport { cfg, client })
    }
}

impl ChatTransport for HttpChatTransport {
    fn complete(&self, system: &str, user: &str) -> Result<String, LlmError> {
        let key = std::env::var(&self.cfg.api_key_env)
            .map_err(|_| LlmError::MissingCredential(self.cfg.api_key_env.clone()))?;
        let body = serde_json::json!({
            "model": self.cfg.model,
            "temperature": self.cfg.temperature,
            "max_tokens": self.cfg.max_tokens,
            "messages": [
                {"role": "system", "content": system},
                {"role": "user", "content": user},
            ],
        });
        let resp = self
            .client
            .post(&self.cfg.endpoint)
            .bearer_auth(key)
            .json(&body)
            .send()
            .map_err(|e| LlmError::Transport(e.to_string()))?;
        if !resp.status().is_success() {
            return Err(LlmError::Transport(format!("HTTP {}", resp.status())));
        }
        let value: serde_json::Value = resp
            .json()
            .map_err(|e| LlmError::BadResponse(e.to_string()))?;
        value["choices"][0]["message"]["content"]
            .as_str()
            .map(|s| s.to_string())
            .ok_or_else(|| LlmError::BadResponse("no message content in response".to_string()))
    }
}

/// Scripted transport for offline tests and examples: pops canned replies
/// in order, erroring when exhausted.
pub struct ScriptedTransport {
    responses: RefCell<VecDeque<Result<String, String>>>,
}

impl ScriptedTransport {
    pub fn new<I: IntoIterator<Item = S>, S: Into<String>>(responses: I) -> ScriptedTransport {
        ScriptedTransport {
            responses: RefCell::new(responses.into_iter().map(|s| Ok(s.into())).collect()),
        }
    }

    /// A transport whose every call fails, for exercising fallback paths.
    pub fn failing() -> ScriptedTransport {
        ScriptedTransport {
            responses: RefCell::new(VecDeque::new()),
        }
    }

    pub fn push_error(&self, message: &str) {
        self.responses
            .borrow_mut()
            .push_back(Err(message.to_string()));
    }
}

impl ChatTransport for ScriptedTransport {
    fn complete(&self, _system: &str, _user: &str) -> Result<String, LlmError> {
        match self.responses.borrow_mut().pop_front() {
            Some(Ok(text)) => Ok(text),
            Some(Err(msg)) => Err(LlmError::Transport(msg)),
            None => Err(LlmError::Transport("script exhausted".to_string())),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TranscriptEntry {
    pub operation: String,
    pub prompt: String,
    /// The raw reply, or the error text when the call failed.
    pub response: String,
    pub ok: bool,
}

/// LLM-backed planner. Every operation degrades to the heuristic backend
/// on transport failure or an unusable reply, so callers never see errors.
pub struct LlmPlanner<'a> {
    transport: Box<dyn ChatTransport + 'a>,
    heuristic: HeuristicPlanner<'a>,
    kb: &'a KnowledgeBase,
    cfg: PlannerConfig,
    transcript: Vec<TranscriptEntry>,
}

impl<'a> LlmPlanner<'a> {
    pub fn new(
        kb: &'a KnowledgeBase,
        cfg: PlannerConfig,
        transport: Box<dyn ChatTransport + 'a>,
    ) -> LlmPlanner<'a> {
        LlmPlanner {
            transport,
            heuristic: HeuristicPlanner::new(kb, cfg.clone()),
            kb,
            cfg,
            transcript: Vec::new(),
        }
    }

    pub fn transcript(&self) -> &[TranscriptEntry] {
        &self.transcript
    }

    pub fn take_transcript(&mut self) -> Vec<TranscriptEntry> {
        std::mem::take(&mut self.transcript)
    }

    fn call(&mut self, operation: &str, prompt: &str) -> Result<String, LlmError> {
        let result = self.transport.complete(SYSTEM_PROMPT, prompt);
        self.transcript.push(TranscriptEntry {
            operation: operation.to_string(),
            prompt: prompt.to_string(),
            response: match &result {
                Ok(text) => text.clone(),
                Err(e) => e.to_string(),
            },
            ok: result.is_ok(),
        });
        result
    }
}

impl PlanBackend for LlmPlanner<'_> {
    fn identify_room_type(&mut self, sub: &Subgraph) -> String {
        let mut cats: Vec<&str> = sub.categories();
        cats.sort_unstable();
        cats.dedup();
        if cats.is_empty() {
            return "unknown".to_string();
        }
        let prompt = ROOM_TYPE_TEMPLATE
            .replace("{ROOM_TYPES}", &self.kb.room_types.join(", "))
            .replace("{OBJECTS}", &cats.join(", "));
        match self.call("identify_room_type", &prompt) {
            Ok(reply) => {
                let label = reply.trim().trim_end_matches('.').to_lowercase();
                if label == "unknown" || self.kb.is_room_type(&label) {
                    label
                } else {
                    self.heuristic.identify_room_type(sub)
                }
            }
            Err(_) => self.heuristic.identify_room_type(sub),
        }
    }

    fn assess_feasibility(
        &mut self,
        room_type: &str,
        unfound: &BTreeSet<String>,
    ) -> BTreeMap<String, bool> {
        if room_type == "unknown" || unfound.is_empty() {
            return self.heuristic.assess_feasibility(room_type, unfound);
        }
        let targets: Vec<&str> = unfound.iter().map(|s| s.as_str()).collect();
        let prompt = FEASIBILITY_TEMPLATE
            .replace("{ROOM_TYPE}", room_type)
            .replace("{UNFOUND}", &targets.join(", "));
        let Ok(reply) = self.call("assess_feasibility", &prompt) else {
            return self.heuristic.assess_feasibility(room_type, unfound);
        };

        let mut verdicts: BTreeMap<String, bool> = BTreeMap::new();
        for line in reply.lines() {
            let Some((cat, answer)) = line.split_once(':') else {
                continue;
            };
            let cat = cat.trim().trim_start_matches('-').trim().to_lowercase();
            if unfound.contains(&cat) {
                let answer = answer.trim().to_lowercase();
                let verdict = match answer.as_str() {
                    a if a.starts_with("yes") => true,
                    a if a.starts_with("no") => false,
                    _ => continue,
                };
                verdicts.insert(cat, verdict);
            }
        }
        // Any target the reply did not cover gets the heuristic verdict.
        if verdicts.len() < unfound.len() {
            let fallback = self.heuristic.assess_feasibility(room_type, unfound);
            for (cat, verdict) in fallback {
                verdicts.entry(cat).or_insert(verdict);
            }
        }
        verdicts
    }

    fn generate_plan(&mut self, sub: &Subgraph, unfound: &BTreeSet<String>) -> Plan {
        let targets: Vec<&str> = unfound.iter().map(|s| s.as_str()).collect();
        let prompt = SEARCH_PLAN_TEMPLATE
            .replace("{SUBGRAPH}", subgraph_to_text(sub).trim_end())
            .replace("{UNFOUND}", &targets.join(", "));

        for _attempt in 0..=self.cfg.llm_retries {
            let Ok(reply) = self.call("generate_plan", &prompt) else {
                continue;
            };
            let Ok(steps) = parse_plan(&reply) else {
                continue;
            };
            // Every navigate target must exist in the current subgraph.
            let valid = steps
                .iter()
                .all(|s| s.target.as_deref().is_none_or(|t| sub.has_target(t)));
            if valid {
                return Plan {
                    steps,
                    source: PlanSource::Llm,
                    raw_text: reply,
                };
            }
        }
        self.heuristic.generate_plan(sub, unfound)
    }

    fn source(&self) -> PlanSource {
        PlanSource::Llm
    }
}
