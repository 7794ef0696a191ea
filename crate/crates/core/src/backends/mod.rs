//! Players behind one "context in, text out" contract.

pub mod api;
pub mod catalog;
pub mod oracle;
pub mod replay;
pub mod scripted;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use api::{ApiConfig, ApiPlayer, ProviderConfig};
pub use catalog::{resolve_player, PlayerSpec};
pub use replay::ReplayPlayer;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Origin {
    System,
    #[serde(rename = "self")]
    Own,
    Other,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextMessage {
    pub origin: Origin,
    pub text: String,
}

/// What one player has seen so far, in episode order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatContext {
    pub messages: Vec<ContextMessage>,
}

impl ChatContext {
    pub fn push(&mut self, origin: Origin, text: impl Into<String>) {
        self.messages.push(ContextMessage { origin, text: text.into() });
    }

    pub fn is_empty(&self) -> bool {
        self.messages.is_empty()
    }

    pub fn len(&self) -> usize {
        self.messages.len()
    }

    pub fn last_other(&self) -> Option<&str> {
        self.messages.iter().rev().find(|m| m.origin == Origin::Other).map(|m| m.text.as_str())
    }

    pub fn others(&self) -> impl Iterator<Item = &str> {
        self.messages.iter().filter(|m| m.origin == Origin::Other).map(|m| m.text.as_str())
    }

    pub fn own(&self) -> impl Iterator<Item = &str> {
        self.messages.iter().filter(|m| m.origin == Origin::Own).map(|m| m.text.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BackendError {
    #[error("request timed out: {0}")]
    Timeout(String),
    #[error("authentication failed: {0}")]
    AuthFailure(String),
    #[error("rate limited: {0}")]
    RateLimited(String),
    #[error("replay exhausted after {0} responses")]
    ReplayExhausted(usize),
    #[error("transport error: {0}")]
    Transport(String),
    #[error("unexpected response: {0}")]
    Protocol(String),
    #[error("unknown bot `{0}`")]
    UnknownBot(String),
    #[error("bad backend configuration: {0}")]
    Config(String),
    #[error("session closed")]
    Closed,
}

impl BackendError {
    /// Errors worth another attempt with backoff.
    pub fn retryable(&self) -> bool {
        matches!(self, BackendError::Timeout(_) | BackendError::RateLimited(_) | BackendError::Transport(_))
    }
}

pub trait Player: Send {
    fn descriptor(&self) -> String;
    fn complete(&mut self, context: &ChatContext) -> Result<String, BackendError>;
}

impl<P: Player + ?Sized> Player for Box<P> {
    fn descriptor(&self) -> String {
        (**self).descriptor()
    }

    fn complete(&mut self, context: &ChatContext) -> Result<String, BackendError> {
        (**self).complete(context)
    }
}

/// A player defined by a plain function of the context.
pub struct FnPlayer<F> {
    name: String,
    f: F,
}

impl<F> FnPlayer<F>
where
    F: FnMut(&ChatContext) -> String + Send,
{
    pub fn new(name: impl Into<String>, f: F) -> Self {
        FnPlayer { name: name.into(), f }
    }
}

impl<F> Player for FnPlayer<F>
where
    F: FnMut(&ChatContext) -> String + Send,
{
    fn descriptor(&self) -> String {
        self.name.clone()
    }

    fn complete(&mut self, context: &ChatContext) -> Result<String, BackendError> {
        Ok((self.f)(context))
    }
}

/// Always answers with the same text.
pub struct EchoPlayer(pub String);

impl Player for EchoPlayer {
    fn descriptor(&self) -> String {
        "scripted:echo".into()
    }

    fn complete(&mut self, _: &ChatContext) -> Result<String, BackendError> {
        Ok(self.0.clone())
    }
}
