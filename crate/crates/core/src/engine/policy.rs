use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const DEFAULT_SAFETY_CAP: u32 = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolicyError {
    #[error("unknown violation class `{0}`")]
    UnknownViolationClass(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Reprompt,
    Abort,
}

/// Retry budget per violation class. Budgets count reprompts, so a class with
/// limit 2 allows three responses in total for one move.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepromptPolicy {
    pub max_retries: BTreeMap<String, u32>,
    #[serde(default)]
    pub unlimited: BTreeSet<String>,
    #[serde(default = "default_cap")]
    pub safety_cap: u32,
}

fn default_cap() -> u32 {
    DEFAULT_SAFETY_CAP
}

impl Default for RepromptPolicy {
    fn default() -> Self {
        RepromptPolicy { max_retries: BTreeMap::new(), unlimited: BTreeSet::new(), safety_cap: DEFAULT_SAFETY_CAP }
    }
}

impl RepromptPolicy {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn limit(mut self, class: &str, retries: u32) -> Self {
        self.max_retries.insert(class.to_string(), retries);
        self
    }

    pub fn unlimited(mut self, class: &str) -> Self {
        self.unlimited.insert(class.to_string());
        self
    }

    /// The same budget for every class in `classes`.
    pub fn uniform(classes: &[&str], retries: u32) -> Self {
        classes.iter().fold(Self::default(), |p, c| p.limit(c, retries))
    }

    pub fn allowed_retries(&self, class: &str) -> Result<u32, PolicyError> {
        if self.unlimited.contains(class) {
            Ok(self.safety_cap)
        } else {
            self.max_retries.get(class).copied().ok_or_else(|| PolicyError::UnknownViolationClass(class.to_string()))
        }
    }
}

pub fn decide_reprompt(policy: &RepromptPolicy, class: &str, attempts_so_far: u32) -> Result<Decision, PolicyError> {
    let allowed = policy.allowed_retries(class)?;
    Ok(if attempts_so_far < allowed { Decision::Reprompt } else { Decision::Abort })
}
