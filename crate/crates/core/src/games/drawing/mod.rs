//! Drawing: one player describes a 5x5 letter grid, the other redraws it.

pub mod grid;

use serde::{Deserialize, Serialize};
use serde_json::Value;

pub use grid::{changed_cells, compare_grids, parse_grid, Grid, GridComparison, EMPTY};

use super::{strip_leading_tag, whitespace_tokens, GameScores, TurnScores};
use crate::engine::{
    fill, Episode, GameMaster, InteractionRecord, Interrupt, PromptTemplate, RepromptPolicy, Role, Status, Terminal,
    Violation,
};

pub const INSTRUCTION_FORMAT: &str = "instruction-format";
pub const GRID_FORMAT: &str = "grid-format";

/// Upper bound on instructions when the giver never says DONE.
pub const MAX_TURNS: u32 = 25;

pub const NEXT_INSTRUCTION: &str = "What is your next instruction?";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridKind {
    Compact,
    Random,
}

impl GridKind {
    pub fn experiment(self) -> &'static str {
        match self {
            GridKind::Compact => "compact_grids",
            GridKind::Random => "random_grids",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DrawingInstance {
    pub id: u32,
    pub target: Grid,
    pub kind: GridKind,
}

impl DrawingInstance {
    pub fn validate(&self) -> Result<(), String> {
        let filled = self.target.filled();
        if self.kind == GridKind::Random {
            if !(5..=10).contains(&filled.len()) {
                return Err(format!("random grid has {} filled cells", filled.len()));
            }
            if filled.iter().any(|(_, _, c)| *c != filled[0].2) {
                return Err("random grid mixes letters".into());
            }
        }
        if filled.is_empty() {
            return Err("target grid is empty".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Instruction {
    Step(String),
    Done,
}

pub fn parse_instruction(text: &str) -> Result<Instruction, Violation> {
    let rest = strip_leading_tag(text, "Instruction:").ok_or_else(|| {
        Violation::format(INSTRUCTION_FORMAT, "response does not start with Instruction:").with_reprompt(
            "Please start your reply with \"Instruction:\" followed by the next step, or \"Instruction: DONE\".",
        )
    })?;
    let rest = rest.trim();
    let bare: String = rest.chars().filter(|c| !c.is_ascii_punctuation()).collect();
    if bare.trim().eq_ignore_ascii_case("done") {
        return Ok(Instruction::Done);
    }
    if rest.is_empty() {
        return Err(Violation::format(INSTRUCTION_FORMAT, "empty instruction"));
    }
    Ok(Instruction::Step(rest.to_string()))
}

pub fn parse_grid_move(text: &str) -> Result<Grid, Violation> {
    parse_grid(text).map_err(|e| {
        Violation::format(GRID_FORMAT, e.to_string())
            .with_reprompt("Please return only the updated 5 by 5 grid: five lines of five cells separated by spaces, with ▢ for empty cells.")
    })
}

const GIVER: &str = "We are going to play a drawing game. I will show you a 5 by 5 grid. Each cell holds either \
a capital letter or the symbol ▢, which marks an empty cell. An empty grid looks like this:

$EMPTY$

Your job is to tell another player, one step at a time, how to fill an empty grid so that it ends up identical to \
mine. You do not need to mention empty cells, only where the letters go. Start every reply with \"Instruction:\". \
After each step I will ask \"What is your next instruction?\". Describing a whole row, column or pattern in one \
step is fine. Once everything has been described, reply with \"Instruction: DONE\".

Here is the grid to describe:

$TARGET$

What is your next instruction?";

const FOLLOWER: &str = "We are going to draw on a 5 by 5 grid together. Each cell holds either a capital letter \
or the symbol ▢, which marks an empty cell. We start from an empty grid:

$EMPTY$

I will send you instructions one at a time, such as \"Instruction: put an X in the top left corner\". Apply each \
instruction to the grid, keeping everything you drew before, and reply with the whole updated grid: five lines of \
five cells separated by single spaces, with no other text.

Instruction: $INSTRUCTION$";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DrawingTurn {
    pub turn: u32,
    pub instruction: String,
    pub grid: Grid,
    pub changed: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DrawingLog {
    pub target: Grid,
    pub turns: Vec<DrawingTurn>,
    pub done: bool,
}

pub struct DrawingGame {
    instance: DrawingInstance,
    log: DrawingLog,
}

impl DrawingGame {
    pub fn new(instance: DrawingInstance) -> Self {
        let log = DrawingLog { target: instance.target, ..Default::default() };
        DrawingGame { instance, log }
    }

    pub fn policy() -> RepromptPolicy {
        RepromptPolicy::uniform(&[INSTRUCTION_FORMAT, GRID_FORMAT], 1)
    }

    pub fn giver_prompt(&self) -> String {
        let empty = Grid::empty().render();
        fill(&PromptTemplate::new(GIVER), &[("EMPTY", &empty), ("TARGET", &self.instance.target.render())])
            .expect("giver template bindings")
    }

    pub fn follower_prompt(instruction: &str) -> String {
        let empty = Grid::empty().render();
        fill(&PromptTemplate::new(FOLLOWER), &[("EMPTY", &empty), ("INSTRUCTION", instruction)])
            .expect("follower template bindings")
    }

    fn current(&self) -> Grid {
        self.log.turns.last().map(|t| t.grid).unwrap_or_default()
    }

    fn finish(&self, turn: u32) -> Terminal {
        if compare_grids(&self.instance.target, &self.current()).f1 == 100.0 {
            Terminal::success(turn)
        } else {
            Terminal::lose(turn)
        }
    }
}

impl GameMaster for DrawingGame {
    fn game_name(&self) -> &str {
        "drawing"
    }

    fn roles(&self) -> &'static [Role] {
        &[Role::PlayerA, Role::PlayerB]
    }

    fn default_policy(&self) -> RepromptPolicy {
        Self::policy()
    }

    fn play(&mut self, ep: &mut Episode<'_>) -> Result<Terminal, Interrupt> {
        let mut giver_prompt = self.giver_prompt();
        for turn in 1..=MAX_TURNS + 1 {
            ep.set_turn(turn);
            if turn > MAX_TURNS {
                ep.note("instruction limit reached");
                return Ok(self.finish(MAX_TURNS));
            }
            let instruction = match ep.ask(Role::PlayerA, &giver_prompt, parse_instruction)? {
                Instruction::Done => {
                    self.log.done = true;
                    ep.note("[done]");
                    return Ok(self.finish(turn));
                }
                Instruction::Step(s) => s,
            };
            ep.note("[valid]");
            let prompt =
                if turn == 1 { Self::follower_prompt(&instruction) } else { format!("Instruction: {instruction}") };
            let drawn = ep.ask(Role::PlayerB, &prompt, parse_grid_move)?;
            let changed = changed_cells(&self.current(), &drawn);
            let cmp = compare_grids(&self.instance.target, &drawn);
            ep.note(format!("[valid] changed cells: {changed}, F1: {:.2}", cmp.f1));
            self.log.turns.push(DrawingTurn { turn, instruction, grid: drawn, changed });
            giver_prompt = NEXT_INSTRUCTION.to_string();
        }
        unreachable!("loop returns once the limit is passed")
    }

    fn game_log(&self) -> Value {
        serde_json::to_value(&self.log).expect("log serializes")
    }
}

fn mean(xs: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    (n > 0).then(|| sum / n as f64)
}

/// Scores a drawing log; the final drawn grid decides P/R/F1.
pub fn score_drawing_log(log: &DrawingLog, status: Status) -> GameScores {
    let mut s = GameScores::default();
    let last = log.turns.last().map(|t| t.grid).unwrap_or_default();
    let cmp = compare_grids(&log.target, &last);
    s.set("aborted", (status == Status::Aborted) as u8 as f64);
    s.set("success", (status != Status::Aborted && cmp.f1 == 100.0) as u8 as f64);
    s.set("precision", cmp.precision);
    s.set("recall", cmp.recall);
    s.set("f1", cmp.f1);
    if let Some(m) = mean(log.turns.iter().map(|t| t.changed as f64)) {
        s.set("changed_cell_count", m);
    }
    if let Some(m) = mean(log.turns.iter().map(|t| t.instruction.chars().count() as f64)) {
        s.set("instruction_length", m);
    }
    if let Some(m) = mean(log.turns.iter().map(|t| whitespace_tokens(&t.instruction) as f64)) {
        s.set("instruction_tokens", m);
    }
    for t in &log.turns {
        let c = compare_grids(&log.target, &t.grid);
        let mut ts = TurnScores::new(t.turn);
        ts.set("precision", c.precision);
        ts.set("recall", c.recall);
        ts.set("f1", c.f1);
        ts.set("changed_cell_count", t.changed as f64);
        ts.set("instruction_length", t.instruction.chars().count() as f64);
        ts.set("instruction_tokens", whitespace_tokens(&t.instruction) as f64);
        s.turns.push(ts);
    }
    if status != Status::Aborted {
        s.set_main(cmp.f1);
    }
    s
}

pub fn score_drawing(record: &InteractionRecord) -> GameScores {
    let log: DrawingLog = serde_json::from_value(record.game_log.clone()).unwrap_or_default();
    score_drawing_log(&log, record.outcome.status)
}
