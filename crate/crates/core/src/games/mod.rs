//! The dialogue games and their shared plumbing.

pub mod drawing;
pub mod privateshared;
pub mod reference;
pub mod registry;
pub mod taboo;
pub mod wordle;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use registry::{GameKind, GameResources};

pub const MAIN_SCORE: &str = "main_score";

/// Named numeric scores for one episode plus a per-turn breakdown. A key
/// that is absent means "undefined" (e.g. speed of an aborted episode).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct GameScores {
    pub episode: BTreeMap<String, f64>,
    pub turns: Vec<TurnScores>,
}

impl GameScores {
    pub fn set(&mut self, key: &str, value: f64) {
        self.episode.insert(key.to_string(), value);
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.episode.get(key).copied()
    }

    pub fn set_main(&mut self, value: f64) {
        self.set(MAIN_SCORE, value);
    }

    pub fn main(&self) -> Option<f64> {
        self.get(MAIN_SCORE)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TurnScores {
    pub turn: u32,
    #[serde(flatten)]
    pub values: BTreeMap<String, f64>,
}

impl TurnScores {
    pub fn new(turn: u32) -> Self {
        TurnScores { turn, values: BTreeMap::new() }
    }

    pub fn set(&mut self, key: &str, value: f64) {
        self.values.insert(key.to_string(), value);
    }
}

/// ASCII case-insensitive substring search returning a byte offset.
pub fn find_ci(hay: &str, needle: &str) -> Option<usize> {
    let (h, n) = (hay.as_bytes(), needle.as_bytes());
    if n.is_empty() {
        return Some(0);
    }
    (0..h.len().saturating_sub(n.len() - 1)).find(|&i| h[i..i + n.len()].eq_ignore_ascii_case(n))
}

/// The rest of the line following `tag` (case-insensitive), where the tag is
/// not glued to a preceding word character.
pub fn find_tag<'a>(text: &'a str, tag: &str) -> Option<&'a str> {
    let mut from = 0;
    while let Some(off) = find_ci(&text[from..], tag) {
        let start = from + off;
        let glued = text[..start].chars().next_back().is_some_and(|c| c.is_alphanumeric() || c == '_');
        if !glued {
            let rest = &text[start + tag.len()..];
            return Some(rest.split('\n').next().unwrap_or(""));
        }
        from = start + tag.len();
    }
    None
}

/// Text after `prefix` when the response starts with it, ignoring leading
/// whitespace and the prefix's case.
pub fn strip_leading_tag<'a>(text: &'a str, prefix: &str) -> Option<&'a str> {
    let t = text.trim_start();
    if t.len() >= prefix.len() && t.as_bytes()[..prefix.len()].eq_ignore_ascii_case(prefix.as_bytes()) {
        Some(&t[prefix.len()..])
    } else {
        None
    }
}

pub fn whitespace_tokens(s: &str) -> usize {
    s.split_whitespace().count()
}
