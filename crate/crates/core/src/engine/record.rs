use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use super::types::{EpisodeOutcome, Message, MoveVerdict, Status};

pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RecordError {
    #[error("record is already finalized")]
    RecordFinalized,
    #[error("player response at turn {0} has no verdict")]
    UnannotatedRequest(u32),
    #[error("malformed message at turn {0}")]
    MalformedMessage(u32),
    #[error("turn index went backwards ({prev} -> {next})")]
    TurnRegression { prev: u32, next: u32 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordMeta {
    pub game: String,
    pub experiment: String,
    pub instance_id: u32,
    /// Role short name to player descriptor.
    pub players: BTreeMap<String, String>,
    pub started_at: String,
    pub ended_at: String,
    pub engine_version: String,
}

impl RecordMeta {
    pub fn new(game: &str, experiment: &str, instance_id: u32) -> Self {
        RecordMeta {
            game: game.to_string(),
            experiment: experiment.to_string(),
            instance_id,
            players: BTreeMap::new(),
            started_at: now(),
            ended_at: String::new(),
            engine_version: ENGINE_VERSION.to_string(),
        }
    }
}

pub fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    #[serde(flatten)]
    pub message: Message,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub annotation: Option<MoveVerdict>,
    /// Probe traffic that never enters the player's persistent context.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub aside: bool,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RequestCounts {
    pub request_count: u32,
    pub parsed_request_count: u32,
    pub violated_request_count: u32,
}

impl RequestCounts {
    fn count(&mut self, verdict: &MoveVerdict) {
        self.request_count += 1;
        if verdict.is_valid() {
            self.parsed_request_count += 1;
        } else {
            self.violated_request_count += 1;
        }
    }

    pub fn balanced(&self) -> bool {
        self.parsed_request_count + self.violated_request_count == self.request_count
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AbortCause {
    PlayerViolation,
    BackendFailure,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbortInfo {
    pub cause: AbortCause,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InteractionRecord {
    pub meta: RecordMeta,
    pub events: Vec<Event>,
    pub outcome: EpisodeOutcome,
    pub requests: RequestCounts,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub abort: Option<AbortInfo>,
    /// Game-specific state the scorer needs.
    #[serde(default)]
    pub game_log: Value,
}

impl InteractionRecord {
    pub fn backend_failure(&self) -> bool {
        matches!(&self.abort, Some(a) if a.cause == AbortCause::BackendFailure)
    }

    /// Sorted-key JSON, pretty printed.
    pub fn to_canonical_json(&self) -> String {
        canonical_json(self)
    }

    /// Request counters restricted to one turn.
    pub fn requests_in_turn(&self, turn: u32) -> RequestCounts {
        let mut c = RequestCounts::default();
        for e in self.events.iter().filter(|e| e.message.turn == turn && e.message.is_request()) {
            if let Some(v) = &e.annotation {
                c.count(v);
            }
        }
        c
    }

    pub fn exclusive_outcome(&self) -> bool {
        let s = self.outcome.status;
        [Status::Success, Status::Lose, Status::Aborted].iter().filter(|x| **x == s).count() == 1
            && (s == Status::Aborted) == self.abort.is_some()
    }
}

/// Serialize through `serde_json::Value`, whose maps are key-ordered.
pub fn canonical_json<T: Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("records serialize to JSON");
    let mut s = serde_json::to_string_pretty(&v).expect("JSON values serialize");
    s.push('\n');
    s
}

#[derive(Debug, Clone)]
pub struct RecordBuilder {
    meta: RecordMeta,
    events: Vec<Event>,
    requests: RequestCounts,
    finalized: bool,
}

impl RecordBuilder {
    pub fn new(meta: RecordMeta) -> Self {
        RecordBuilder { meta, events: Vec::new(), requests: RequestCounts::default(), finalized: false }
    }

    pub fn meta_mut(&mut self) -> &mut RecordMeta {
        &mut self.meta
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn requests(&self) -> RequestCounts {
        self.requests
    }

    pub fn append_event(&mut self, message: Message, annotation: Option<MoveVerdict>) -> Result<(), RecordError> {
        self.push(message, annotation, false)
    }

    pub fn append_aside(&mut self, message: Message, annotation: Option<MoveVerdict>) -> Result<(), RecordError> {
        self.push(message, annotation, true)
    }

    fn push(&mut self, message: Message, annotation: Option<MoveVerdict>, aside: bool) -> Result<(), RecordError> {
        if self.finalized {
            return Err(RecordError::RecordFinalized);
        }
        if !message.well_formed() {
            return Err(RecordError::MalformedMessage(message.turn));
        }
        if let Some(prev) = self.events.last().map(|e| e.message.turn) {
            if message.turn < prev {
                return Err(RecordError::TurnRegression { prev, next: message.turn });
            }
        }
        if message.is_request() {
            match &annotation {
                Some(v) => self.requests.count(v),
                None => return Err(RecordError::UnannotatedRequest(message.turn)),
            }
        }
        self.events.push(Event { message, annotation, aside });
        Ok(())
    }

    pub fn finalize(
        &mut self,
        outcome: EpisodeOutcome,
        abort: Option<AbortInfo>,
        game_log: Value,
    ) -> Result<InteractionRecord, RecordError> {
        if self.finalized {
            return Err(RecordError::RecordFinalized);
        }
        self.finalized = true;
        let mut meta = self.meta.clone();
        meta.ended_at = now();
        Ok(InteractionRecord {
            meta,
            events: std::mem::take(&mut self.events),
            outcome,
            requests: self.requests,
            abort,
            game_log,
        })
    }
}
