use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FeedbackError {
    #[error("`{0}` is not five lowercase letters")]
    BadWordShape(String),
    #[error("cannot parse feedback token `{0}`")]
    BadToken(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    Green,
    Yellow,
    Red,
}

impl Color {
    pub fn name(self) -> &'static str {
        match self {
            Color::Green => "green",
            Color::Yellow => "yellow",
            Color::Red => "red",
        }
    }

    pub fn points(self) -> u32 {
        match self {
            Color::Green => 5,
            Color::Yellow => 3,
            Color::Red => 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LetterFeedback {
    pub entries: [(char, Color); 5],
}

pub fn is_word(w: &str) -> bool {
    w.len() == 5 && w.bytes().all(|b| b.is_ascii_lowercase())
}

fn letters(w: &str) -> Result<[u8; 5], FeedbackError> {
    if !is_word(w) {
        return Err(FeedbackError::BadWordShape(w.to_string()));
    }
    let mut out = [0u8; 5];
    out.copy_from_slice(w.as_bytes());
    Ok(out)
}

/// Greens first, then yellows consume what is left of the target's letter
/// counts, scanning the guess left to right.
pub fn compute_feedback(target: &str, guess: &str) -> Result<LetterFeedback, FeedbackError> {
    let t = letters(target)?;
    let g = letters(guess)?;
    let mut remaining = [0u8; 26];
    let mut colors = [Color::Red; 5];
    for i in 0..5 {
        if g[i] == t[i] {
            colors[i] = Color::Green;
        } else {
            remaining[(t[i] - b'a') as usize] += 1;
        }
    }
    for i in 0..5 {
        if colors[i] == Color::Green {
            continue;
        }
        let slot = &mut remaining[(g[i] - b'a') as usize];
        if *slot > 0 {
            *slot -= 1;
            colors[i] = Color::Yellow;
        }
    }
    let mut entries = [(' ', Color::Red); 5];
    for i in 0..5 {
        entries[i] = (g[i] as char, colors[i]);
    }
    Ok(LetterFeedback { entries })
}

impl LetterFeedback {
    pub fn colors(&self) -> [Color; 5] {
        self.entries.map(|(_, c)| c)
    }

    pub fn guess(&self) -> String {
        self.entries.iter().map(|(l, _)| *l).collect()
    }

    pub fn all_green(&self) -> bool {
        self.entries.iter().all(|(_, c)| *c == Color::Green)
    }

    pub fn render(&self) -> String {
        render_feedback(self)
    }

    pub fn parse(text: &str) -> Result<LetterFeedback, FeedbackError> {
        parse_feedback(text)
    }
}

impl fmt::Display for LetterFeedback {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_feedback(self))
    }
}

pub fn render_feedback(f: &LetterFeedback) -> String {
    f.entries.iter().map(|(l, c)| format!("{l}<{}>", c.name())).collect::<Vec<_>>().join(" ")
}

pub fn parse_feedback(text: &str) -> Result<LetterFeedback, FeedbackError> {
    let text = text.trim();
    let text = text.strip_prefix("guess_feedback:").unwrap_or(text);
    let tokens: Vec<&str> = text.split_whitespace().collect();
    if tokens.len() != 5 {
        return Err(FeedbackError::BadToken(text.to_string()));
    }
    let mut entries = [(' ', Color::Red); 5];
    for (i, tok) in tokens.iter().enumerate() {
        let bad = || FeedbackError::BadToken(tok.to_string());
        let mut chars = tok.chars();
        let letter = chars.next().filter(|c| c.is_ascii_lowercase()).ok_or_else(bad)?;
        let color = match chars.as_str() {
            "<green>" => Color::Green,
            "<yellow>" => Color::Yellow,
            "<red>" => Color::Red,
            _ => return Err(bad()),
        };
        entries[i] = (letter, color);
    }
    Ok(LetterFeedback { entries })
}

pub fn closeness(f: &LetterFeedback) -> u32 {
    f.entries.iter().map(|(_, c)| c.points()).sum()
}

/// Whether `candidate` would have produced every feedback seen so far.
pub fn consistent(candidate: &str, history: &[LetterFeedback]) -> bool {
    history.iter().all(|f| compute_feedback(candidate, &f.guess()).map(|g| g == *f).unwrap_or(false))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use Color::*;

    fn colors(target: &str, guess: &str) -> [Color; 5] {
        compute_feedback(target, guess).unwrap().colors()
    }

    #[test]
    fn alone_against_apple() {
        assert_eq!(colors("apple", "alone"), [Green, Yellow, Red, Red, Green]);
    }

    #[test]
    fn clerk_against_model() {
        let f = compute_feedback("model", "clerk").unwrap();
        assert_eq!(f.render(), "c<red> l<yellow> e<yellow> r<red> k<red>");
        assert_eq!(closeness(&f), 6);
    }

    #[test]
    fn split_against_stiff() {
        let f = compute_feedback("stiff", "split").unwrap();
        assert_eq!(f.render(), "s<green> p<red> l<red> i<yellow> t<yellow>");
    }

    #[test]
    fn hello_against_model() {
        let f = compute_feedback("model", "hello").unwrap();
        assert_eq!(f.render(), "h<red> e<yellow> l<yellow> l<red> o<yellow>");
    }

    #[test]
    fn duplicate_guess_letter_only_colored_once() {
        // the target's only e is taken by the green
        assert_eq!(colors("apple", "eerie"), [Red, Red, Red, Red, Green]);
        assert_eq!(colors("spine", "eerie"), [Red, Red, Red, Yellow, Green]);
        assert_eq!(colors("those", "geese"), [Red, Red, Red, Green, Green]);
        assert_eq!(colors("eerie", "lever"), [Red, Green, Red, Yellow, Yellow]);
    }

    #[test]
    fn green_takes_precedence_over_earlier_yellow() {
        assert_eq!(colors("abbey", "babes"), [Yellow, Yellow, Green, Green, Red]);
        assert_eq!(colors("hello", "lllll"), [Red, Red, Green, Green, Red]);
    }

    #[test]
    fn all_green_renders_uniformly() {
        let f = compute_feedback("apple", "apple").unwrap();
        assert_eq!(f.render(), "a<green> p<green> p<green> l<green> e<green>");
        assert_eq!(closeness(&f), 25);
    }

    #[test]
    fn all_red_scores_zero() {
        assert_eq!(closeness(&compute_feedback("apple", "music").unwrap()), 0);
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(compute_feedback("apple", "crinkl").is_err());
        assert!(compute_feedback("Apple", "apple").is_err());
    }

    #[test]
    fn parses_prefixed_feedback() {
        let f = parse_feedback("guess_feedback: h<red> e<yellow> l<yellow> l<red> o<yellow>").unwrap();
        assert_eq!(f, compute_feedback("model", "hello").unwrap());
    }

    fn word() -> impl Strategy<Value = String> {
        "[a-e]{5}"
    }

    proptest! {
        #[test]
        fn render_parse_round_trip(t in word(), g in word()) {
            let f = compute_feedback(&t, &g).unwrap();
            prop_assert_eq!(parse_feedback(&render_feedback(&f)).unwrap(), f);
        }

        #[test]
        fn all_green_iff_equal(t in word(), g in word()) {
            let f = compute_feedback(&t, &g).unwrap();
            prop_assert_eq!(f.all_green(), t == g);
            prop_assert_eq!(closeness(&f) == 25, t == g);
        }

        #[test]
        fn greens_bounded_by_positional_matches(t in word(), g in word()) {
            let f = compute_feedback(&t, &g).unwrap();
            let greens = f.colors().iter().filter(|c| **c == Green).count();
            let same = t.bytes().zip(g.bytes()).filter(|(a, b)| a == b).count();
            prop_assert!(greens <= same);
        }

        #[test]
        fn target_is_consistent_with_its_own_feedback(t in word(), gs in proptest::collection::vec(word(), 1..5)) {
            let history: Vec<_> = gs.iter().map(|g| compute_feedback(&t, g).unwrap()).collect();
            prop_assert!(consistent(&t, &history));
        }
    }
}
