//! Reference: A names one of three grids with a referring expression, B
//! picks which grid was meant from a possibly reordered display.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::drawing::Grid;
use super::{strip_leading_tag, whitespace_tokens, GameScores};
use crate::engine::{
    fill, Episode, GameMaster, InteractionRecord, Interrupt, PromptTemplate, RepromptPolicy, Role, Status, Terminal,
    Violation,
};

pub const EXPRESSION_FORMAT: &str = "expression-format";
pub const ANSWER_FORMAT: &str = "answer-format";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EditClass {
    Two,
    Four,
}

impl EditClass {
    pub fn experiment(self) -> &'static str {
        match self {
            EditClass::Two => "edit_distance_two",
            EditClass::Four => "edit_distance_four",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ordinal {
    First,
    Second,
    Third,
}

impl Ordinal {
    pub const ALL: [Ordinal; 3] = [Ordinal::First, Ordinal::Second, Ordinal::Third];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Ordinal {
        Ordinal::ALL[i]
    }

    pub fn name(self) -> &'static str {
        match self {
            Ordinal::First => "first",
            Ordinal::Second => "second",
            Ordinal::Third => "third",
        }
    }
}

/// `b_order[k]` is the index into `[target, d1, d2]` of the grid B sees in
/// position k.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReferenceInstance {
    pub id: u32,
    pub target: Grid,
    pub distractors: [Grid; 2],
    pub b_order: [usize; 3],
    pub edit_class: EditClass,
}

impl ReferenceInstance {
    pub fn grids(&self) -> [Grid; 3] {
        [self.target, self.distractors[0], self.distractors[1]]
    }

    pub fn b_grids(&self) -> [Grid; 3] {
        let g = self.grids();
        self.b_order.map(|i| g[i])
    }

    pub fn target_position(&self) -> Ordinal {
        Ordinal::from_index(self.b_order.iter().position(|&i| i == 0).expect("b_order is a permutation"))
    }

    pub fn validate(&self) -> Result<(), String> {
        let mut seen = self.b_order;
        seen.sort_unstable();
        if seen != [0, 1, 2] {
            return Err(format!("b_order {:?} is not a permutation", self.b_order));
        }
        let g = self.grids();
        if g[0] == g[1] || g[0] == g[2] || g[1] == g[2] {
            return Err("grids are not pairwise distinct".into());
        }
        Ok(())
    }
}

pub fn parse_expression(text: &str) -> Result<String, Violation> {
    let rest = strip_leading_tag(text, "Expression:").ok_or_else(|| {
        Violation::format(EXPRESSION_FORMAT, "response does not start with Expression:")
            .with_reprompt("Please reply with a single line starting with \"Expression:\".")
    })?;
    let rest = rest.trim();
    if rest.is_empty() {
        return Err(Violation::format(EXPRESSION_FORMAT, "empty expression"));
    }
    Ok(rest.to_string())
}

pub fn parse_answer(text: &str) -> Result<Ordinal, Violation> {
    let bad = |d: &str| {
        Violation::format(ANSWER_FORMAT, d)
            .with_reprompt("Please reply with \"Answer:\" followed by first, second or third.")
    };
    let rest = strip_leading_tag(text, "Answer:").ok_or_else(|| bad("response does not start with Answer:"))?;
    let word = rest.trim().trim_matches(|c: char| !c.is_alphanumeric()).to_lowercase();
    match word.as_str() {
        "first" => Ok(Ordinal::First),
        "second" => Ok(Ordinal::Second),
        "third" => Ok(Ordinal::Third),
        _ => Err(bad("answer must be first, second or third")),
    }
}

pub fn judge_reference(answer: Ordinal, instance: &ReferenceInstance) -> bool {
    instance.b_order[answer.index()] == 0
}

const SPEAKER: &str = "You will see three 5 by 5 grids. A cell holds either X or ▢, which marks an empty cell. \
Write one referring expression that lets someone else pick out the grid labelled \"Target grid\" when they see all \
three grids in an unknown order. Reply with one line that starts with \"Expression:\" and nothing else, for \
instance:
Expression: Filled as the letter L.

Target grid:
$G1$

Second grid:
$G2$

Third grid:
$G3$";

const LISTENER: &str = "You will see three 5 by 5 grids. A cell holds either X or ▢, which marks an empty cell. \
Someone has written an expression describing exactly one of them. Reply with one line that starts with \
\"Answer:\" followed by first, second or third, and nothing else.

First grid:
$G1$

Second grid:
$G2$

Third grid:
$G3$

Expression: $EXPRESSION$
Question: Which grid does the expression describe? Answer with first, second or third only.";

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ReferenceLog {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expression: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub answer: Option<Ordinal>,
    pub target_position: Option<Ordinal>,
}

pub struct ReferenceGame {
    instance: ReferenceInstance,
    log: ReferenceLog,
}

impl ReferenceGame {
    pub fn new(instance: ReferenceInstance) -> Self {
        let log = ReferenceLog { target_position: Some(instance.target_position()), ..Default::default() };
        ReferenceGame { instance, log }
    }

    pub fn policy() -> RepromptPolicy {
        RepromptPolicy::uniform(&[EXPRESSION_FORMAT, ANSWER_FORMAT], 1)
    }

    pub fn speaker_prompt(&self) -> String {
        let [a, b, c] = self.instance.grids().map(|g| g.render());
        fill(&PromptTemplate::new(SPEAKER), &[("G1", &a), ("G2", &b), ("G3", &c)]).expect("speaker bindings")
    }

    pub fn listener_prompt(&self, expression: &str) -> String {
        let [a, b, c] = self.instance.b_grids().map(|g| g.render());
        fill(&PromptTemplate::new(LISTENER), &[("G1", &a), ("G2", &b), ("G3", &c), ("EXPRESSION", expression)])
            .expect("listener bindings")
    }
}

impl GameMaster for ReferenceGame {
    fn game_name(&self) -> &str {
        "reference"
    }

    fn roles(&self) -> &'static [Role] {
        &[Role::PlayerA, Role::PlayerB]
    }

    fn default_policy(&self) -> RepromptPolicy {
        Self::policy()
    }

    fn play(&mut self, ep: &mut Episode<'_>) -> Result<Terminal, Interrupt> {
        let expression = ep.ask(Role::PlayerA, &self.speaker_prompt(), parse_expression)?;
        ep.note("[valid]");
        self.log.expression = Some(expression.clone());
        let answer = ep.ask(Role::PlayerB, &self.listener_prompt(&expression), parse_answer)?;
        self.log.answer = Some(answer);
        if judge_reference(answer, &self.instance) {
            ep.note("[correct]");
            Ok(Terminal::success(1))
        } else {
            ep.note("[wrong]");
            Ok(Terminal::lose(1))
        }
    }

    fn game_log(&self) -> Value {
        serde_json::to_value(&self.log).expect("log serializes")
    }
}

pub fn score_reference(record: &InteractionRecord) -> GameScores {
    let log: ReferenceLog = serde_json::from_value(record.game_log.clone()).unwrap_or_default();
    let status = record.outcome.status;
    let mut s = GameScores::default();
    s.set("success", (status == Status::Success) as u8 as f64);
    s.set("aborted", (status == Status::Aborted) as u8 as f64);
    if let Some(e) = &log.expression {
        s.set("expression_length", e.chars().count() as f64);
        s.set("expression_tokens", whitespace_tokens(e) as f64);
    }
    if status != Status::Aborted {
        s.set_main(if status == Status::Success { 100.0 } else { 0.0 });
    }
    s
}
