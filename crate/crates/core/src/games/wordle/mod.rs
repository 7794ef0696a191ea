//! Wordle in three variants: plain, with a clue, and with a clue plus a critic.

pub mod feedback;
pub mod words;

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

pub use feedback::{closeness, compute_feedback, render_feedback, Color, LetterFeedback};
pub use words::WordLists;

use super::{find_ci, find_tag, GameScores, TurnScores};
use crate::engine::{
    fill, Episode, GameMaster, InteractionRecord, Interrupt, PromptTemplate, RepromptPolicy, Role, Status, Terminal,
    Violation,
};

pub const MAX_ATTEMPTS: u32 = 6;

pub const WRONG_LENGTH: &str = "wrong-length";
pub const BAD_FORMAT: &str = "bad-format";
pub const NOT_ALLOWED: &str = "not-in-allowed-list";
pub const CRITIC_FORMAT: &str = "critic-format";

const WRONG_LENGTH_REPROMPT: &str = "The word should have exactly 5 letters. Please try again.";
const BAD_FORMAT_REPROMPT: &str =
    "Please answer with the two tags \"guess:\" and \"explanation:\", for example:\nguess: apple\nexplanation: a common word to start with.";
const NOT_ALLOWED_REPROMPT: &str =
    "Your guess is not in the list of allowed words. Please guess a different valid five-letter English word.";
const CRITIC_REPROMPT: &str = "Please reply in exactly this form:\nagreement: yes or no\nexplanation: your reason";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Basic,
    Clue,
    ClueCritic,
}

impl Variant {
    pub fn game_name(self) -> &'static str {
        match self {
            Variant::Basic => "wordle",
            Variant::Clue => "wordle_withclue",
            Variant::ClueCritic => "wordle_withcritic",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordleInstance {
    pub id: u32,
    pub target: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clue: Option<String>,
    pub variant: Variant,
    pub frequency_group: String,
}

impl WordleInstance {
    pub fn validate(&self) -> Result<(), String> {
        if !feedback::is_word(&self.target) {
            return Err(format!("target `{}` is not five lowercase letters", self.target));
        }
        if self.clue.is_some() != (self.variant != Variant::Basic) {
            return Err("clue must be present exactly for the clue variants".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParsedGuess {
    pub guess: String,
    pub explanation: String,
}

/// Reads the `guess:` and `explanation:` tags.
pub fn parse_guess(text: &str) -> Result<ParsedGuess, Violation> {
    let bad = |d: &str| Violation::format(BAD_FORMAT, d).with_reprompt(BAD_FORMAT_REPROMPT);
    let guess = find_tag(text, "guess:").ok_or_else(|| bad("missing guess: tag"))?;
    let explanation = find_tag(text, "explanation:").ok_or_else(|| bad("missing explanation: tag"))?;
    let guess = match find_ci(guess, "explanation:") {
        Some(i) => &guess[..i],
        None => guess,
    };
    let word = guess.trim().trim_matches(|c: char| !c.is_alphanumeric()).to_lowercase();
    if word.is_empty() || word.split_whitespace().count() != 1 {
        return Err(bad("guess must be a single word"));
    }
    if !word.chars().all(|c| c.is_ascii_alphabetic()) {
        return Err(bad("guess contains characters other than letters"));
    }
    if word.len() != 5 {
        return Err(Violation::format(WRONG_LENGTH, format!("`{word}` does not have 5 letters"))
            .with_reprompt(WRONG_LENGTH_REPROMPT));
    }
    Ok(ParsedGuess { guess: word, explanation: explanation.trim().to_string() })
}

pub fn validate_guess(guess: &str, lists: &WordLists) -> Result<(), Violation> {
    if lists.is_allowed(guess) {
        Ok(())
    } else {
        Err(Violation::rule(NOT_ALLOWED, format!("`{guess}` is not an allowed guess"))
            .with_reprompt(NOT_ALLOWED_REPROMPT))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Agreement {
    Yes,
    No,
}

impl Agreement {
    pub fn as_str(self) -> &'static str {
        match self {
            Agreement::Yes => "yes",
            Agreement::No => "no",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CriticOpinion {
    pub agreement: Agreement,
    pub explanation: String,
}

pub fn parse_critic(text: &str) -> Result<CriticOpinion, Violation> {
    let bad = |d: &str| Violation::format(CRITIC_FORMAT, d).with_reprompt(CRITIC_REPROMPT);
    let raw = find_tag(text, "agreement:").ok_or_else(|| bad("missing agreement: tag"))?;
    let token = raw.trim().trim_matches(|c: char| !c.is_alphanumeric()).to_lowercase();
    let agreement = match token.as_str() {
        "yes" => Agreement::Yes,
        "no" => Agreement::No,
        _ => return Err(bad("agreement must be yes or no")),
    };
    let explanation = find_tag(text, "explanation:").ok_or_else(|| bad("missing explanation: tag"))?;
    Ok(CriticOpinion { agreement, explanation: explanation.trim().to_string() })
}

const INTRO_COMMON: &str = "You are playing Wordle. Find the hidden target word: a valid English word of exactly \
five lowercase letters (a-z). You have six attempts.

Answer every time with two tagged lines:
guess: <your five-letter word>
explanation: <a short reason for this guess>

After each guess you receive feedback for every letter. green: right letter in the right position. yellow: the \
letter occurs elsewhere in the word. red: the letter does not occur. Feedback looks like this:
guess_feedback: a<yellow> p<yellow> p<green> l<yellow> e<red>
";

const INTRO_CLUE: &str = "
You also receive a clue about the meaning of the target word. Use the clue together with the feedback.
";

const INTRO_CRITIC: &str = "
Before a guess is checked, a second player tells you whether they agree with it and why. Agreement does not mean \
the guess is right. You may keep your guess or replace it. Do not invent feedback or clues yourself.
";

const CRITIC_INTRO: &str = "We are playing a word game: find a five-letter English word that fits a clue. I will \
show you the clue, my guess and my explanation. From the second round on you also see the letter feedback for my \
previous guess (green: right letter and position, yellow: letter elsewhere in the word, red: letter absent).

Decide whether you agree with my guess. Reply in lowercase with exactly these two lines:
agreement: yes or no
explanation: <your reason>

Do not propose a word of your own.

$BLOCK$";

fn guesser_intro(variant: Variant, clue: Option<&str>) -> String {
    let mut s = INTRO_COMMON.to_string();
    if variant != Variant::Basic {
        s.push_str(INTRO_CLUE);
    }
    if variant == Variant::ClueCritic {
        s.push_str(INTRO_CRITIC);
    }
    s.push_str("\nMake your first guess.");
    if let Some(c) = clue {
        s.push_str(&format!("\n\nclue:{c}"));
    }
    s
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct WordleTurn {
    pub turn: u32,
    pub guess: String,
    pub feedback: String,
    pub closeness: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub guess_before_critic: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub critic_agreement: Option<Agreement>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct WordleLog {
    pub target: String,
    pub turns: Vec<WordleTurn>,
    pub repetitions: u32,
    pub opinion_changes: u32,
}

pub struct WordleGame {
    instance: WordleInstance,
    lists: Arc<WordLists>,
    log: WordleLog,
}

impl WordleGame {
    pub fn new(instance: WordleInstance, lists: Arc<WordLists>) -> Self {
        let log = WordleLog { target: instance.target.clone(), ..Default::default() };
        WordleGame { instance, lists, log }
    }

    pub fn policy() -> RepromptPolicy {
        RepromptPolicy::new().limit(WRONG_LENGTH, 2).limit(BAD_FORMAT, 2).unlimited(NOT_ALLOWED).limit(CRITIC_FORMAT, 2)
    }

    fn ask_guess(&self, ep: &mut Episode<'_>, prompt: &str) -> Result<ParsedGuess, Interrupt> {
        let lists = self.lists.clone();
        ep.ask(Role::PlayerA, prompt, move |text| {
            let g = parse_guess(text)?;
            validate_guess(&g.guess, &lists)?;
            Ok(g)
        })
    }
}

impl GameMaster for WordleGame {
    fn game_name(&self) -> &str {
        self.instance.variant.game_name()
    }

    fn roles(&self) -> &'static [Role] {
        match self.instance.variant {
            Variant::ClueCritic => &[Role::PlayerA, Role::PlayerB],
            _ => &[Role::PlayerA],
        }
    }

    fn default_policy(&self) -> RepromptPolicy {
        Self::policy()
    }

    fn play(&mut self, ep: &mut Episode<'_>) -> Result<Terminal, Interrupt> {
        let variant = self.instance.variant;
        let clue = self.instance.clue.clone();
        let mut prompt = guesser_intro(variant, clue.as_deref());
        let mut previous_feedback: Option<String> = None;
        let mut finals: Vec<String> = Vec::new();

        for turn in 1..=MAX_ATTEMPTS {
            ep.set_turn(turn);
            let first = self.ask_guess(ep, &prompt)?;
            let mut record = WordleTurn { turn, ..Default::default() };
            let mut guess = first.guess.clone();

            if variant == Variant::ClueCritic {
                let clue = clue.clone().unwrap_or_default();
                let mut block = format!("clue:{clue}\nguess:{}\nexplanation:{}", first.guess, first.explanation);
                if let Some(fb) = &previous_feedback {
                    block.push_str(&format!("\nguess_feedback: {fb}"));
                }
                let critic_prompt = if turn == 1 {
                    fill(&PromptTemplate::new(CRITIC_INTRO), &[("BLOCK", &block)]).unwrap()
                } else {
                    block
                };
                ep.note("Share the guess information with the critic");
                let opinion = ep.ask(Role::PlayerB, &critic_prompt, parse_critic)?;
                ep.note(match opinion.agreement {
                    Agreement::Yes => "Critic agrees with the guesser; sharing the critic's explanation",
                    Agreement::No => "Critic disagrees with the guesser; sharing the critic's explanation",
                });
                let relay = format!(
                    "clue:{clue}\nguess_agreement:{}\nagreement_explanation:{}",
                    opinion.agreement.as_str(),
                    opinion.explanation
                );
                let second = self.ask_guess(ep, &relay)?;
                if second.guess != first.guess {
                    self.log.opinion_changes += 1;
                    ep.note(format!(
                        "Change in player A's guess\nguess_before_critic_opinion: {}\ncritic_agreement: {}\nguess_after_critic_opinion: {}",
                        first.guess,
                        opinion.agreement.as_str(),
                        second.guess
                    ));
                } else {
                    ep.note("[no-change]");
                }
                record.guess_before_critic = Some(first.guess.clone());
                record.critic_agreement = Some(opinion.agreement);
                guess = second.guess;
            }

            if finals.contains(&guess) {
                self.log.repetitions += 1;
            }
            finals.push(guess.clone());

            let fb = compute_feedback(&self.instance.target, &guess).expect("validated guesses are five letters");
            let rendered = render_feedback(&fb);
            record.guess = guess;
            record.closeness = closeness(&fb);
            record.feedback = rendered.clone();
            self.log.turns.push(record);

            if fb.all_green() {
                ep.note("[correct]");
                return Ok(Terminal::success(turn));
            }
            ep.note(format!("[valid, wrong] guess_feedback: {rendered}"));
            if turn == MAX_ATTEMPTS {
                ep.note("game_result = LOSS");
                return Ok(Terminal::lose(turn));
            }
            prompt = format!("guess_feedback: {rendered}");
            previous_feedback = Some(rendered);
        }
        unreachable!("loop returns on the last attempt")
    }

    fn game_log(&self) -> Value {
        serde_json::to_value(&self.log).expect("log serializes")
    }
}

pub fn score_wordle(record: &InteractionRecord) -> GameScores {
    let log: WordleLog = serde_json::from_value(record.game_log.clone()).unwrap_or_default();
    let mut s = GameScores::default();
    let status = record.outcome.status;
    s.set("success", (status == Status::Success) as u8 as f64);
    s.set("aborted", (status == Status::Aborted) as u8 as f64);
    s.set("repetitions", log.repetitions as f64);
    s.set("opinion_changes", log.opinion_changes as f64);
    match status {
        Status::Success => s.set("speed", 100.0 / record.outcome.final_turn as f64),
        Status::Lose => s.set("speed", 0.0),
        Status::Aborted => {}
    }
    for t in &log.turns {
        let mut ts = TurnScores::new(t.turn);
        ts.set("closeness", t.closeness as f64);
        s.turns.push(ts);
    }
    if let Some(speed) = s.get("speed") {
        s.set_main(speed);
    }
    s
}
