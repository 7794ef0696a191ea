//! A Wordle guesser that only plays words consistent with all feedback.

use std::sync::Arc;

use thiserror::Error;

use super::{BackendError, ChatContext, Player};
use crate::games::wordle::feedback::{consistent, parse_feedback, LetterFeedback};
use crate::games::wordle::WordLists;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("no target word is consistent with the feedback so far")]
pub struct NoConsistentWord;

/// Smallest target word consistent with `history` that has not been
/// answered with feedback yet.
pub fn oracle_guess(history: &[LetterFeedback], targets: &[String]) -> Result<String, NoConsistentWord> {
    let tried: Vec<String> = history.iter().map(LetterFeedback::guess).collect();
    targets.iter().filter(|w| !tried.contains(w) && consistent(w, history)).min().cloned().ok_or(NoConsistentWord)
}

/// Feedback the GM sent so far, oldest first.
pub fn feedback_history(context: &ChatContext) -> Vec<LetterFeedback> {
    context
        .others()
        .filter(|t| t.trim_start().starts_with("guess_feedback:"))
        .filter_map(|t| parse_feedback(t.lines().next().unwrap_or("")).ok())
        .collect()
}

pub struct OracleGuesser {
    lists: Arc<WordLists>,
}

impl OracleGuesser {
    pub fn new(lists: Arc<WordLists>) -> Self {
        OracleGuesser { lists }
    }
}

impl Player for OracleGuesser {
    fn descriptor(&self) -> String {
        "scripted:wordle-oracle".into()
    }

    fn complete(&mut self, context: &ChatContext) -> Result<String, BackendError> {
        let guess = oracle_guess(&feedback_history(context), &self.lists.targets)
            .map_err(|e| BackendError::Protocol(e.to_string()))?;
        Ok(format!("guess: {guess}\nexplanation: the first remaining word that fits every hint"))
    }
}
