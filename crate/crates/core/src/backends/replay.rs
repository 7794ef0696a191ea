//! Plays back recorded responses in order, ignoring the context.

use std::path::Path;

use super::{BackendError, ChatContext, Player};
use crate::engine::{InteractionRecord, Role};

#[derive(Debug, Clone)]
pub struct ReplayPlayer {
    name: String,
    responses: Vec<String>,
    next: usize,
}

impl ReplayPlayer {
    pub fn new(name: impl Into<String>, responses: Vec<String>) -> Self {
        ReplayPlayer { name: name.into(), responses, next: 0 }
    }

    /// The responses `role` gave in a recorded episode, probes included.
    pub fn from_record(record: &InteractionRecord, role: Role) -> Self {
        let responses = record
            .events
            .iter()
            .filter(|e| e.message.is_request() && e.message.sender == role)
            .map(|e| e.message.text.clone())
            .collect();
        ReplayPlayer::new(format!("replay:{}:{role}", record.meta.game), responses)
    }

    /// Either a record file or a JSON array of strings.
    pub fn from_file(path: &Path, role: Role) -> Result<Self, BackendError> {
        let text =
            std::fs::read_to_string(path).map_err(|e| BackendError::Config(format!("{}: {e}", path.display())))?;
        if let Ok(list) = serde_json::from_str::<Vec<String>>(&text) {
            return Ok(ReplayPlayer::new(format!("replay:{}", path.display()), list));
        }
        let record: InteractionRecord =
            serde_json::from_str(&text).map_err(|e| BackendError::Config(format!("{}: {e}", path.display())))?;
        Ok(Self::from_record(&record, role))
    }
}

impl Player for ReplayPlayer {
    fn descriptor(&self) -> String {
        self.name.clone()
    }

    fn complete(&mut self, _: &ChatContext) -> Result<String, BackendError> {
        let r = self.responses.get(self.next).cloned().ok_or(BackendError::ReplayExhausted(self.next))?;
        self.next += 1;
        Ok(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn replays_in_order_then_exhausts() {
        let mut p = ReplayPlayer::new("r", vec!["CLUE: A trip taken for a specific purpose.".into()]);
        let ctx = ChatContext::default();
        assert_eq!(p.complete(&ctx).unwrap(), "CLUE: A trip taken for a specific purpose.");
        assert_eq!(p.complete(&ctx), Err(BackendError::ReplayExhausted(1)));
    }
}
