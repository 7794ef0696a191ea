//! Taboo: a describer explains a target word without the taboo words, a
//! guesser has a fixed number of tries to name it.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{strip_leading_tag, GameScores, TurnScores};
use crate::engine::{
    fill, Episode, GameMaster, InteractionRecord, Interrupt, PromptTemplate, RepromptPolicy, Role, Status, Terminal,
    Violation,
};

pub const CLUE_FORMAT: &str = "clue-format";
pub const TABOO_WORD: &str = "taboo-word";
pub const GUESS_FORMAT: &str = "guess-format";

pub const DEFAULT_MAX_GUESSES: u32 = 3;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TabooInstance {
    pub id: u32,
    pub target: String,
    pub related: Vec<String>,
    #[serde(default = "default_guesses")]
    pub max_guesses: u32,
    pub level: String,
}

fn default_guesses() -> u32 {
    DEFAULT_MAX_GUESSES
}

impl TabooInstance {
    pub fn validate(&self) -> Result<(), String> {
        if self.target.is_empty() || self.target != self.target.to_lowercase() {
            return Err(format!("target `{}` must be a lowercase word", self.target));
        }
        if self.related.contains(&self.target) {
            return Err("target appears among the related words".into());
        }
        if self.max_guesses == 0 {
            return Err("max_guesses must be at least 1".into());
        }
        Ok(())
    }

    fn forbidden(&self) -> impl Iterator<Item = &str> {
        std::iter::once(self.target.as_str()).chain(self.related.iter().map(String::as_str))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Judgement {
    Correct,
    Wrong,
}

pub fn parse_describer(text: &str) -> Result<String, Violation> {
    match strip_leading_tag(text, "CLUE:") {
        Some(rest) if !rest.trim().is_empty() => Ok(rest.trim().to_string()),
        Some(_) => Err(Violation::format(CLUE_FORMAT, "empty clue")),
        None => Err(Violation::format(CLUE_FORMAT, "response does not start with CLUE:")),
    }
}

pub fn parse_guesser(text: &str) -> Result<String, Violation> {
    let rest = strip_leading_tag(text, "GUESS:")
        .ok_or_else(|| Violation::format(GUESS_FORMAT, "response does not start with GUESS:"))?;
    let word = rest.trim().trim_matches(|c: char| !c.is_alphanumeric());
    if word.is_empty() {
        return Err(Violation::format(GUESS_FORMAT, "empty guess"));
    }
    if word.split_whitespace().count() > 1 {
        return Err(Violation::format(GUESS_FORMAT, "guess must be a single word"));
    }
    Ok(word.to_lowercase())
}

fn tokens(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphabetic()).filter(|t| !t.is_empty()).map(str::to_lowercase).collect()
}

fn normalize_spaces(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase()
}

/// Whether a clue token counts as a use of the forbidden word `w`.
pub fn part_of_word(token: &str, w: &str) -> bool {
    if token.chars().count() >= 3 && w.chars().count() >= 3 {
        token.contains(w) || w.contains(token)
    } else {
        token == w
    }
}

/// The first forbidden word the clue uses, if any.
pub fn taboo_hit(clue: &str, instance: &TabooInstance) -> Option<String> {
    let toks = tokens(clue);
    let flat = normalize_spaces(clue);
    for w in instance.forbidden() {
        let w = w.to_lowercase();
        let hit = if w.contains(char::is_whitespace) {
            flat.contains(&normalize_spaces(&w))
        } else {
            toks.iter().any(|t| part_of_word(t, &w))
        };
        if hit {
            return Some(w);
        }
    }
    None
}

pub fn validate_clue(clue: &str, instance: &TabooInstance) -> Result<(), Violation> {
    // the guesser sees the relayed form, so both spellings must be clean
    for form in [clue.to_string(), relay_form(clue)] {
        if let Some(w) = taboo_hit(&form, instance) {
            return Err(Violation::rule(TABOO_WORD, format!("clue uses taboo word `{w}`")));
        }
    }
    Ok(())
}

pub fn judge_guess(guess: &str, target: &str) -> Judgement {
    if guess.to_lowercase() == target.to_lowercase() {
        Judgement::Correct
    } else {
        Judgement::Wrong
    }
}

/// What the guesser is shown: commas dropped, trailing full stops removed.
pub fn relay_form(clue: &str) -> String {
    clue.replace(',', "").trim().trim_end_matches('.').trim_end().to_string()
}

const DESCRIBER: &str = "You are playing a collaborative word game. Describe a target word so that the other \
player can guess it.

Rules:
(a) Reply in the form CLUE: <your description>. The other player's guesses start with GUESS.
(b) Do not use the target word, any part of it, or any morphological variant of it.
(c) The same restriction applies to the related words listed below.

You both lose if your description uses the target word or a related word. You both win if the other player names \
the target word within $N$ tries.

Target word: $TARGET_WORD$

Related words: $REL_WORD$

Keep your descriptions short and to the point.";

const GUESSER: &str = "You are playing a collaborative word game. The other player describes a target word and \
you try to name it. You get one guess per turn and $N$ tries in total.

Each description starts with CLUE. Reply with a single word in the form: GUESS: <word>";

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TabooLog {
    pub target: String,
    pub clues: Vec<String>,
    pub guesses: Vec<String>,
}

pub struct TabooGame {
    instance: TabooInstance,
    log: TabooLog,
}

impl TabooGame {
    pub fn new(instance: TabooInstance) -> Self {
        let log = TabooLog { target: instance.target.clone(), ..Default::default() };
        TabooGame { instance, log }
    }

    pub fn policy() -> RepromptPolicy {
        RepromptPolicy::uniform(&[CLUE_FORMAT, TABOO_WORD, GUESS_FORMAT], 0)
    }

    pub fn describer_prompt(&self) -> String {
        let n = self.instance.max_guesses.to_string();
        let rel = self.instance.related.join(", ");
        fill(&PromptTemplate::new(DESCRIBER), &[("N", &n), ("TARGET_WORD", &self.instance.target), ("REL_WORD", &rel)])
            .expect("describer template bindings")
    }

    pub fn guesser_prompt(&self) -> String {
        let n = self.instance.max_guesses.to_string();
        fill(&PromptTemplate::new(GUESSER), &[("N", &n)]).expect("guesser template bindings")
    }
}

impl GameMaster for TabooGame {
    fn game_name(&self) -> &str {
        "taboo"
    }

    fn roles(&self) -> &'static [Role] {
        &[Role::PlayerA, Role::PlayerB]
    }

    fn default_policy(&self) -> RepromptPolicy {
        Self::policy()
    }

    fn play(&mut self, ep: &mut Episode<'_>) -> Result<Terminal, Interrupt> {
        let n = self.instance.max_guesses;
        let mut describer_prompt = self.describer_prompt();
        for turn in 1..=n {
            ep.set_turn(turn);
            let instance = self.instance.clone();
            let clue = ep.ask(Role::PlayerA, &describer_prompt, |text| {
                let clue = parse_describer(text)?;
                validate_clue(&clue, &instance)?;
                Ok(clue)
            })?;
            ep.note("[valid]");
            let relayed = format!("CLUE: {}", relay_form(&clue));
            self.log.clues.push(clue);
            let guesser_prompt = if turn == 1 { format!("{}\n\n{relayed}", self.guesser_prompt()) } else { relayed };
            let guess = ep.ask(Role::PlayerB, &guesser_prompt, parse_guesser)?;
            self.log.guesses.push(guess.clone());
            if judge_guess(&guess, &self.instance.target) == Judgement::Correct {
                ep.note("[correct]");
                return Ok(Terminal::success(turn));
            }
            ep.note("[valid, wrong]");
            if turn == n {
                break;
            }
            describer_prompt = format!("GUESS: {guess}");
        }
        Ok(Terminal::lose(n))
    }

    fn game_log(&self) -> Value {
        serde_json::to_value(&self.log).expect("log serializes")
    }
}

pub fn score_taboo(record: &InteractionRecord) -> GameScores {
    let log: TabooLog = serde_json::from_value(record.game_log.clone()).unwrap_or_default();
    let status = record.outcome.status;
    let mut s = GameScores::default();
    s.set("success", (status == Status::Success) as u8 as f64);
    s.set("aborted", (status == Status::Aborted) as u8 as f64);
    match status {
        Status::Success => s.set("speed", 100.0 / record.outcome.final_turn as f64),
        Status::Lose => s.set("speed", 0.0),
        Status::Aborted => {}
    }
    for (i, g) in log.guesses.iter().enumerate() {
        let mut t = TurnScores::new(i as u32 + 1);
        t.set("correct", (judge_guess(g, &log.target) == Judgement::Correct) as u8 as f64);
        s.turns.push(t);
    }
    if let Some(speed) = s.get("speed") {
        s.set_main(speed);
    }
    s
}
