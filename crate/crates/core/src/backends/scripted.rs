//! Deterministic bots for tests and smoke runs. Each reads what it needs
//! from its own context only.

use super::{BackendError, ChatContext, Player};
use crate::games::drawing::{parse_grid, Grid};
use crate::games::find_tag;
use crate::games::privateshared::{probe_slot, question_slot, Domain};

/// A bot defined by a pure function of the context.
pub struct Scripted {
    name: &'static str,
    f: fn(&ChatContext) -> String,
}

impl Scripted {
    pub fn new(name: &'static str, f: fn(&ChatContext) -> String) -> Self {
        Scripted { name, f }
    }
}

impl Player for Scripted {
    fn descriptor(&self) -> String {
        format!("scripted:{}", self.name)
    }

    fn complete(&mut self, context: &ChatContext) -> Result<String, BackendError> {
        Ok((self.f)(context))
    }
}

fn first_other(ctx: &ChatContext) -> &str {
    ctx.others().next().unwrap_or("")
}

fn line_value<'a>(text: &'a str, label: &str) -> Option<&'a str> {
    text.lines().find_map(|l| l.trim().strip_prefix(label)).map(str::trim)
}

// taboo

/// Spells the target as alphabet positions, which no taboo check can see.
pub fn taboo_describer(ctx: &ChatContext) -> String {
    let target = line_value(first_other(ctx), "Target word:").unwrap_or("");
    let code: Vec<String> = target.bytes().filter(u8::is_ascii_lowercase).map(|b| (b - b'a' + 1).to_string()).collect();
    format!("CLUE: {}", code.join("-"))
}

pub fn taboo_guesser(ctx: &ChatContext) -> String {
    let clue = ctx.others().filter_map(|t| find_tag(t, "CLUE:")).last().unwrap_or("");
    let word: String = clue
        .split(|c: char| !c.is_ascii_digit())
        .filter_map(|n| n.parse::<u8>().ok())
        .filter(|n| (1..=26).contains(n))
        .map(|n| (b'a' + n - 1) as char)
        .collect();
    format!("GUESS: {}", if word.is_empty() { "nothing" } else { &word })
}

/// Uses the target word itself, a rule violation.
pub fn taboo_cheater(ctx: &ChatContext) -> String {
    let target = line_value(first_other(ctx), "Target word:").unwrap_or("word");
    format!("CLUE: It is {target}.")
}

pub fn taboo_wrong_guesser(_: &ChatContext) -> String {
    "GUESS: nothing".into()
}

// wordle

pub fn wordle_critic_agrees(_: &ChatContext) -> String {
    "agreement: yes\nexplanation: the guess fits the clue".into()
}

// drawing

/// Number words and digits 1-5 as zero-based indices.
fn index_after(words: &[String], key: &str) -> Option<usize> {
    const ORD: [&str; 5] = ["first", "second", "third", "fourth", "fifth"];
    let pos = words.iter().position(|w| w == key)?;
    let ord = |w: &str| {
        ORD.iter()
            .position(|o| *o == w)
            .or_else(|| w.parse::<usize>().ok().filter(|n| (1..=5).contains(n)).map(|n| n - 1))
    };
    let next = words.get(pos + 1).map(String::as_str);
    let digit = next.filter(|w| w.chars().all(|c| c.is_ascii_digit())).and_then(ord);
    digit.or_else(|| pos.checked_sub(1).and_then(|p| ord(&words[p]))).or_else(|| next.and_then(ord))
}

/// Applies "put L in row R column C" or "fill row/column N with L".
pub fn apply_instruction(grid: &mut Grid, instruction: &str) {
    let raw: Vec<&str> =
        instruction.split(|c: char| c.is_whitespace() || c == '.' || c == ',').filter(|w| !w.is_empty()).collect();
    let letter = raw
        .iter()
        .enumerate()
        .rfind(|(i, w)| {
            w.len() == 1
                && w.chars().all(|c| c.is_ascii_uppercase())
                && !(**w == "A"
                    && raw.get(i + 1).is_some_and(|n| n.len() == 1 && n.chars().all(|c| c.is_ascii_uppercase())))
        })
        .map(|(_, w)| w.chars().next().unwrap());
    let Some(letter) = letter else { return };
    let words: Vec<String> = raw.iter().map(|w| w.to_lowercase()).collect();
    let row = index_after(&words, "row");
    let col = index_after(&words, "column");
    match (row, col) {
        (Some(r), Some(c)) => grid.set(r, c, letter),
        (Some(r), None) => (0..5).for_each(|c| grid.set(r, c, letter)),
        (None, Some(c)) => (0..5).for_each(|r| grid.set(r, c, letter)),
        (None, None) => {}
    }
}

/// Redraws from scratch by applying every instruction seen so far.
pub fn drawing_follower(ctx: &ChatContext) -> String {
    let mut grid = Grid::empty();
    for text in ctx.others() {
        if let Some(i) = text.rfind("Instruction:") {
            apply_instruction(&mut grid, &text[i + "Instruction:".len()..]);
        }
    }
    grid.render()
}

/// Names one filled target cell per turn, then DONE.
pub fn drawing_giver(ctx: &ChatContext) -> String {
    let target = parse_grid(first_other(ctx)).unwrap_or_default();
    let given = ctx.own().count();
    match target.filled().get(given) {
        Some((r, c, l)) => format!("Instruction: Put {l} in row {} column {}.", r + 1, c + 1),
        None => "Instruction: DONE".into(),
    }
}

// reference

/// Lists the target's filled cells as row-column pairs.
pub fn reference_speaker(ctx: &ChatContext) -> String {
    let prompt = first_other(ctx);
    let target = prompt
        .find("Target grid:")
        .and_then(|i| prompt[i..].split("\n\n").next().and_then(|b| parse_grid(b).ok()))
        .unwrap_or_default();
    let cells: Vec<String> = target.filled().iter().map(|(r, c, _)| format!("{}-{}", r + 1, c + 1)).collect();
    format!("Expression: X at {}", cells.join(" "))
}

pub fn reference_listener(ctx: &ChatContext) -> String {
    let prompt = ctx.last_other().unwrap_or("");
    let expr = find_tag(prompt, "Expression:").unwrap_or("");
    let mut wanted = Grid::empty();
    for pair in expr.split_whitespace() {
        if let Some((r, c)) = pair.split_once('-') {
            if let (Ok(r), Ok(c)) = (r.parse::<usize>(), c.parse::<usize>()) {
                if (1..=5).contains(&r) && (1..=5).contains(&c) {
                    wanted.set(r - 1, c - 1, 'X');
                }
            }
        }
    }
    let labels = ["First grid:", "Second grid:", "Third grid:"];
    let names = ["first", "second", "third"];
    for (label, name) in labels.iter().zip(names) {
        let block = prompt.find(label).and_then(|i| prompt[i..].split("\n\n").next().and_then(|b| parse_grid(b).ok()));
        if block == Some(wanted) {
            return format!("Answer: {name}");
        }
    }
    "Answer: first".into()
}

// private/shared

fn ps_domain(intro: &str) -> Domain {
    if intro.contains("WHAT: Job") {
        Domain::Job
    } else {
        Domain::Travel
    }
}

fn ps_value(intro: &str, slot: &str) -> Option<String> {
    line_value(intro, &format!("{}:", slot.to_uppercase())).map(str::to_string)
}

fn ps_reply(ctx: &ChatContext, honest_probes: bool) -> String {
    let intro = first_other(ctx);
    let domain = ps_domain(intro);
    let last = ctx.last_other().unwrap_or("");
    if let Some(q) = last.strip_prefix("ME:") {
        if !honest_probes {
            return "ASIDE: no".into();
        }
        let shared = probe_slot(domain, q)
            .and_then(|s| ps_value(intro, s))
            .is_some_and(|v| ctx.own().any(|said| said.to_lowercase().contains(&v.to_lowercase())));
        return format!("ASIDE: {}", if shared { "yes" } else { "no" });
    }
    let value = question_slot(domain, last).and_then(|s| ps_value(intro, s)).unwrap_or_else(|| "I am not sure".into());
    format!("ANSWER: {value}")
}

pub fn ps_truthful(ctx: &ChatContext) -> String {
    ps_reply(ctx, true)
}

pub fn ps_always_no(ctx: &ChatContext) -> String {
    ps_reply(ctx, false)
}

/// Answers without any tag.
pub fn ps_untagged(ctx: &ChatContext) -> String {
    ps_reply(ctx, true).split_once(": ").map(|(_, v)| v.to_string()).unwrap_or_default()
}

/// Fits no game's response format.
pub fn mute(_: &ChatContext) -> String {
    "...".into()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backends::Origin;
    use crate::games::drawing::{compare_grids, EMPTY};

    fn ctx(msgs: &[(Origin, &str)]) -> ChatContext {
        let mut c = ChatContext::default();
        for (o, t) in msgs {
            c.push(*o, *t);
        }
        c
    }

    #[test]
    fn taboo_code_round_trip() {
        let c = ctx(&[(Origin::Other, "rules\nTarget word: expedition\n\nRelated words: journey")]);
        let clue = taboo_describer(&c);
        assert!(!clue.contains("expedition"));
        let g = ctx(&[(Origin::Other, &format!("intro\n\n{clue}"))]);
        assert_eq!(taboo_guesser(&g), "GUESS: expedition");
    }

    #[test]
    fn follower_understands_giver_phrasing() {
        let mut g = Grid::empty();
        apply_instruction(&mut g, "Put F in row 2 column 4.");
        assert_eq!(g.get(1, 3), 'F');
        apply_instruction(&mut g, "Fill the fifth column with T");
        assert!((0..5).all(|r| g.get(r, 4) == 'T'));
        apply_instruction(&mut g, "Put an E in second row third column");
        assert_eq!(g.get(1, 2), 'E');
        apply_instruction(&mut g, "Put a C in row 3 column 3");
        assert_eq!(g.get(2, 2), 'C');
        assert_eq!(g.get(0, 0), EMPTY);
    }

    #[test]
    fn giver_then_follower_reconstructs() {
        let target: Grid = "▢ F ▢ ▢ ▢\n▢ ▢ ▢ F F\n▢ ▢ ▢ ▢ ▢\nF ▢ ▢ ▢ ▢\n▢ ▢ ▢ ▢ ▢".parse().unwrap();
        let mut a = ctx(&[(Origin::Other, &format!("intro\n{}\n\nWhat is your next instruction?", target.render()))]);
        let mut b = ChatContext::default();
        loop {
            let instr = drawing_giver(&a);
            a.push(Origin::Own, instr.clone());
            if instr.ends_with("DONE") {
                break;
            }
            b.push(Origin::Other, instr);
            let out = drawing_follower(&b);
            b.push(Origin::Own, out);
            a.push(Origin::Other, "What is your next instruction?");
        }
        let drawn = parse_grid(b.own().last().unwrap()).unwrap();
        assert_eq!(compare_grids(&target, &drawn).f1, 100.0);
    }
}
