//! Private/shared: a programmatic questioner fills a form from the player's
//! answers while the GM probes, off the record, what the player believes has
//! been shared so far.

pub mod kappa;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

pub use kappa::{cohens_kappa, truncated, KappaError};

use super::{find_tag, strip_leading_tag, GameScores, TurnScores};
use crate::engine::{
    Episode, GameMaster, InteractionRecord, Interrupt, RepromptPolicy, Role, Status, Terminal, Violation,
};

pub const ANSWER_TAG: &str = "answer-tag";
pub const PROBE_FORMAT: &str = "probe-format";
pub const MAX_PROBE_FAILURES: u32 = 5;
/// Probing round whose accuracy is reported separately.
pub const MIDDLE_ROUND: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Travel,
    Job,
}

impl Domain {
    pub fn slot_names(self) -> [&'static str; 5] {
        match self {
            Domain::Travel => ["from", "to", "by", "class", "when"],
            Domain::Job => ["bachelor", "industry-experience", "highest-education", "other-skills", "availability"],
        }
    }

    pub fn questioner_tag(self) -> &'static str {
        match self {
            Domain::Travel => "TRAVEL-AGENT",
            Domain::Job => "RECRUITER",
        }
    }

    pub fn experiment(self) -> &'static str {
        match self {
            Domain::Travel => "travel",
            Domain::Job => "job",
        }
    }

    /// The questioner's fixed request for each slot.
    pub fn question(self, slot: &str) -> Option<&'static str> {
        Some(match (self, slot) {
            (Domain::Travel, "from") => "Where will you be travelling from?",
            (Domain::Travel, "to") => "What is your destination?",
            (Domain::Travel, "by") => "How would you like to travel?",
            (Domain::Travel, "class") => "Which class would you like to book?",
            (Domain::Travel, "when") => "When do you want to leave?",
            (Domain::Job, "bachelor") => "What did you study for your bachelor's degree?",
            (Domain::Job, "industry-experience") => "How much industry experience do you have?",
            (Domain::Job, "highest-education") => "What is your highest level of education?",
            (Domain::Job, "other-skills") => "Which other skills would you like to mention?",
            (Domain::Job, "availability") => "When could you start?",
            _ => return None,
        })
    }
}

/// Yes/no probe wordings per slot; instances pick one per probe.
pub fn probe_phrasings(domain: Domain, slot: &str) -> &'static [&'static str] {
    match (domain, slot) {
        (Domain::Travel, "from") => &[
            "Does the travel agent know where your trip starts?",
            "Have you told the travel agent your point of departure?",
            "Is the travel agent aware of the city you leave from?",
        ],
        (Domain::Travel, "to") => &[
            "Does the travel agent know your destination?",
            "Have you told the travel agent where you are heading?",
            "Is the travel agent aware of where the trip ends?",
        ],
        (Domain::Travel, "by") => &[
            "Does the travel agent know how you want to get there?",
            "Have you told the travel agent your preferred means of transport?",
            "Is the travel agent aware of the kind of transport you want?",
        ],
        (Domain::Travel, "class") => &[
            "Does the travel agent know which class you want?",
            "Have you told the travel agent your preferred class?",
            "Is the travel agent aware of the class you want to book?",
        ],
        (Domain::Travel, "when") => &[
            "Does the travel agent know when you want to leave?",
            "Have you told the travel agent your departure date?",
            "Is the travel agent aware of when the trip starts?",
        ],
        (Domain::Job, "bachelor") => &[
            "Does the recruiter know the subject of your bachelor's degree?",
            "Have you told the recruiter what your bachelor's degree is in?",
            "Is the recruiter aware of your bachelor's subject?",
        ],
        (Domain::Job, "industry-experience") => &[
            "Does the recruiter know how much industry experience you have?",
            "Have you told the recruiter about your industry experience?",
            "Is the recruiter aware of your years in industry?",
        ],
        (Domain::Job, "highest-education") => &[
            "Does the recruiter know your highest level of education?",
            "Have you told the recruiter your highest degree?",
            "Is the recruiter aware of your highest qualification?",
        ],
        (Domain::Job, "other-skills") => &[
            "Does the recruiter know about your other skills?",
            "Have you told the recruiter which other skills you have?",
            "Is the recruiter aware of your additional skills?",
        ],
        (Domain::Job, "availability") => &[
            "Does the recruiter know when you could start?",
            "Have you told the recruiter about your availability?",
            "Is the recruiter aware of your possible start date?",
        ],
        _ => &[],
    }
}

/// The slot a probe question is about, by exact phrasing.
pub fn probe_slot(domain: Domain, question: &str) -> Option<&'static str> {
    domain.slot_names().into_iter().find(|s| probe_phrasings(domain, s).iter().any(|p| question.contains(p)))
}

/// The slot a questioner request is about.
pub fn question_slot(domain: Domain, question: &str) -> Option<&'static str> {
    domain.slot_names().into_iter().find(|s| domain.question(s).is_some_and(|q| question.contains(q)))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Slot {
    pub name: String,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Probe {
    pub slot: String,
    pub question: String,
}

/// `probe_rounds[r]` holds the n probes of round r, already ordered and
/// phrased, so an instance replays identically.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PsInstance {
    pub id: u32,
    pub domain: Domain,
    pub slots: Vec<Slot>,
    pub question_order: Vec<String>,
    pub probe_rounds: Vec<Vec<Probe>>,
}

impl PsInstance {
    pub fn value(&self, slot: &str) -> Option<&str> {
        self.slots.iter().find(|s| s.name == slot).map(|s| s.value.as_str())
    }

    pub fn validate(&self) -> Result<(), String> {
        let names: Vec<&str> = self.slots.iter().map(|s| s.name.as_str()).collect();
        if names != self.domain.slot_names() {
            return Err(format!("slots {names:?} do not match the {:?} form", self.domain));
        }
        let mut order: Vec<&str> = self.question_order.iter().map(String::as_str).collect();
        order.sort_unstable();
        let mut expected = names.clone();
        expected.sort_unstable();
        if order != expected {
            return Err("question order must cover every slot once".into());
        }
        if self.probe_rounds.len() != names.len() + 1 {
            return Err(format!("expected {} probing rounds", names.len() + 1));
        }
        for round in &self.probe_rounds {
            let mut s: Vec<&str> = round.iter().map(|p| p.slot.as_str()).collect();
            s.sort_unstable();
            if s != expected {
                return Err("each probing round must ask about every slot once".into());
            }
        }
        Ok(())
    }
}

fn normalize(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase()
}

pub fn contains_value(answer: &str, value: &str) -> bool {
    let v = normalize(value);
    !v.is_empty() && normalize(answer).contains(&v)
}

pub fn parse_answer_ps(text: &str) -> Result<String, Violation> {
    match strip_leading_tag(text, "ANSWER:") {
        Some(rest) => Ok(rest.trim().to_string()),
        None => Err(Violation::format(ANSWER_TAG, "reply does not start with ANSWER:")),
    }
}

/// Reads the yes/no after an `ASIDE:` tag.
pub fn parse_probe(text: &str) -> Result<bool, Violation> {
    let bad = |d: &str| Violation::format(PROBE_FORMAT, d);
    let rest = find_tag(text, "ASIDE:").ok_or_else(|| bad("reply has no ASIDE: tag"))?;
    let word: String = rest.trim().chars().take_while(|c| c.is_alphabetic()).collect::<String>().to_lowercase();
    match word.as_str() {
        "yes" => Ok(true),
        "no" => Ok(false),
        _ => Err(bad("ASIDE: must be followed by yes or no")),
    }
}

/// Which slots have been disclosed so far. Never reverts.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SharingState {
    pub shared: BTreeMap<String, bool>,
}

impl SharingState {
    pub fn new(instance: &PsInstance) -> Self {
        SharingState { shared: instance.slots.iter().map(|s| (s.name.clone(), false)).collect() }
    }

    pub fn is_shared(&self, slot: &str) -> bool {
        self.shared.get(slot).copied().unwrap_or(false)
    }

    pub fn shared_count(&self) -> usize {
        self.shared.values().filter(|v| **v).count()
    }
}

/// Marks every slot whose value occurs in the answer. Returns whether the
/// asked slot itself was filled.
pub fn update_sharing(state: &mut SharingState, asked: &str, answer: &str, instance: &PsInstance) -> bool {
    for s in &instance.slots {
        if contains_value(answer, &s.value) {
            state.shared.insert(s.name.clone(), true);
        }
    }
    instance.value(asked).is_some_and(|v| contains_value(answer, v))
}

pub fn probing_truth(state: &SharingState, slot: &str) -> bool {
    state.is_shared(slot)
}

fn intro(instance: &PsInstance) -> String {
    let form: String = instance.slots.iter().map(|s| format!("{}: {}\n", s.name.to_uppercase(), s.value)).collect();
    let (setting, what, other) = match instance.domain {
        Domain::Travel => ("You want to book a trip through a travel agency.", "WHAT: Travel", "the travel agent"),
        Domain::Job => {
            ("You are applying for a job and talking to a recruiter.", "WHAT: Job Application", "the recruiter")
        }
    };
    let tag = instance.domain.questioner_tag();
    format!(
        "{setting} These are your details:\n\n{what}\n{form}\nSo far {other} knows none of this.\n\n\
Messages from {other} begin with {tag}. Reply to them as: ANSWER: <your reply>\n\n\
From time to time I will ask you something myself. My questions begin with ME: and you reply as: ASIDE: <your reply>\n\n\
Keep every reply short and only answer what was asked."
    )
}

pub fn probe_prompt(question: &str, clarify: bool) -> String {
    if clarify {
        format!("ME: {question} Please answer yes or no. Start your reply with ASIDE: and then give only yes or no.")
    } else {
        format!("ME: {question} Please answer yes or no.")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeResult {
    pub slot: String,
    pub truth: bool,
    /// `None` when no usable reply came within the attempt limit.
    pub answer: Option<bool>,
}

impl ProbeResult {
    pub fn correct(&self) -> bool {
        self.answer == Some(self.truth)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PsLog {
    pub rounds: Vec<Vec<ProbeResult>>,
    /// Per answered question: was the asked slot's value in the answer.
    pub filled: Vec<bool>,
    pub slots: usize,
}

pub struct PrivateSharedGame {
    instance: PsInstance,
    log: PsLog,
}

impl PrivateSharedGame {
    pub fn new(instance: PsInstance) -> Self {
        let log = PsLog { slots: instance.slots.len(), ..Default::default() };
        PrivateSharedGame { instance, log }
    }

    pub fn policy() -> RepromptPolicy {
        RepromptPolicy::new().limit(ANSWER_TAG, 0)
    }

    pub fn intro(&self) -> String {
        intro(&self.instance)
    }

    /// One probing round. Returns false if some probe got no valid reply.
    fn probe_round(&mut self, ep: &mut Episode<'_>, r: usize, state: &SharingState) -> Result<bool, Interrupt> {
        let mut results = Vec::new();
        let mut complete = true;
        for probe in self.instance.probe_rounds[r].clone() {
            let truth = probing_truth(state, &probe.slot);
            let mut answer = None;
            for attempt in 0..MAX_PROBE_FAILURES {
                let prompt = probe_prompt(&probe.question, attempt > 0);
                if let Ok(a) = ep.ask_aside(Role::PlayerA, &prompt, &mut parse_probe)? {
                    answer = Some(a);
                    break;
                }
            }
            if answer.is_none() {
                complete = false;
                ep.note(format!("probe on `{}` unanswered; using the invalid symbol", probe.slot));
            }
            results.push(ProbeResult { slot: probe.slot, truth, answer });
        }
        let acc = results.iter().filter(|p| p.correct()).count();
        ep.note(format!("probing round {r}: {acc}/{} correct", results.len()));
        self.log.rounds.push(results);
        Ok(complete)
    }
}

impl GameMaster for PrivateSharedGame {
    fn game_name(&self) -> &str {
        "privateshared"
    }

    fn roles(&self) -> &'static [Role] {
        &[Role::PlayerA]
    }

    fn default_policy(&self) -> RepromptPolicy {
        Self::policy()
    }

    fn play(&mut self, ep: &mut Episode<'_>) -> Result<Terminal, Interrupt> {
        let mut state = SharingState::new(&self.instance);
        ep.inform(Role::PlayerA, self.intro());
        if !self.probe_round(ep, 0, &state)? {
            return Err(Interrupt::Abort("probe replies unusable in round 0".into()));
        }
        let tag = self.instance.domain.questioner_tag();
        let order = self.instance.question_order.clone();
        for (i, slot) in order.iter().enumerate() {
            let turn = i as u32 + 1;
            ep.set_turn(turn);
            let question = self.instance.domain.question(slot).unwrap_or("Could you tell me more?");
            let answer = ep.ask(Role::PlayerA, &format!("{tag}: {question}"), parse_answer_ps)?;
            let filled = update_sharing(&mut state, slot, &answer, &self.instance);
            self.log.filled.push(filled);
            ep.note(format!(
                "slot `{slot}` {}; shared: {}",
                if filled { "filled" } else { "not filled" },
                state.shared_count()
            ));
            if !self.probe_round(ep, turn as usize, &state)? {
                return Err(Interrupt::Abort(format!("probe replies unusable in round {turn}")));
            }
        }
        let turn = order.len() as u32;
        if self.log.filled.iter().all(|f| *f) {
            Ok(Terminal::success(turn))
        } else {
            Ok(Terminal::lose(turn))
        }
    }

    fn game_log(&self) -> Value {
        serde_json::to_value(&self.log).expect("log serializes")
    }
}

pub fn harmonic_mean(a: f64, b: f64) -> f64 {
    if a <= 0.0 || b <= 0.0 {
        0.0
    } else {
        2.0 * a * b / (a + b)
    }
}

fn accuracy(probes: &[ProbeResult]) -> Option<f64> {
    (!probes.is_empty()).then(|| probes.iter().filter(|p| p.correct()).count() as f64 / probes.len() as f64)
}

/// Invalid replies count as wrong: for kappa they are taken as the opposite
/// of the truth.
pub fn score_ps_log(log: &PsLog, status: Status) -> GameScores {
    let mut s = GameScores::default();
    s.set("aborted", (status == Status::Aborted) as u8 as f64);
    s.set("success", (status == Status::Success) as u8 as f64);
    let all: Vec<ProbeResult> = log.rounds.iter().flatten().cloned().collect();
    if let Some(a) = accuracy(&all) {
        s.set("probing_accuracy", a);
    }
    if let Some(a) = log.rounds.get(MIDDLE_ROUND).and_then(|r| accuracy(r)) {
        s.set("middle_accuracy", a);
    }
    let pairs: Vec<(bool, bool)> = all.iter().map(|p| (p.answer.unwrap_or(!p.truth), p.truth)).collect();
    let kappa = cohens_kappa(&pairs).ok();
    if let Some(k) = kappa {
        s.set("kappa", k);
        s.set("truncated_kappa", truncated(k));
    }
    let sfa = if log.filled.is_empty() {
        0.0
    } else {
        log.filled.iter().filter(|f| **f).count() as f64 / log.filled.len() as f64
    };
    s.set("slot_filling_accuracy", sfa);
    for (r, round) in log.rounds.iter().enumerate() {
        let mut t = TurnScores::new(r as u32);
        if let Some(a) = accuracy(round) {
            t.set("accuracy", a);
        }
        if r >= 1 {
            if let Some(f) = log.filled.get(r - 1) {
                t.set("slot_filled", *f as u8 as f64);
            }
        }
        s.turns.push(t);
    }
    if status != Status::Aborted {
        s.set_main(100.0 * harmonic_mean(sfa, kappa.map(truncated).unwrap_or(0.0)));
    }
    s
}

pub fn score_privateshared(record: &InteractionRecord) -> GameScores {
    let log: PsLog = serde_json::from_value(record.game_log.clone()).unwrap_or_default();
    score_ps_log(&log, record.outcome.status)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn travel() -> PsInstance {
        let values = ["London", "Stuttgart", "Train", "Economy", "In May"];
        let names = Domain::Travel.slot_names();
        let probes: Vec<Probe> = names
            .iter()
            .map(|n| Probe { slot: n.to_string(), question: format!("Does the agent know {n}?") })
            .collect();
        PsInstance {
            id: 0,
            domain: Domain::Travel,
            slots: names.iter().zip(values).map(|(n, v)| Slot { name: n.to_string(), value: v.to_string() }).collect(),
            question_order: vec!["to".into(), "from".into(), "by".into(), "when".into(), "class".into()],
            probe_rounds: vec![probes; 6],
        }
    }

    #[test]
    fn answer_tag_is_required() {
        assert_eq!(parse_answer_ps("ANSWER: Economy.").unwrap(), "Economy.");
        assert_eq!(parse_answer_ps("ASIDE: Economy.").unwrap_err().class, ANSWER_TAG);
        assert_eq!(parse_answer_ps("Economy").unwrap_err().class, ANSWER_TAG);
    }

    #[test]
    fn probe_replies() {
        assert!(!parse_probe("ASIDE: No.").unwrap());
        assert!(parse_probe("ASIDE: Yes").unwrap());
        assert!(parse_probe("ASIDE: maybe").is_err());
        assert!(parse_probe("No.").is_err());
    }

    #[test]
    fn sharing_by_substring() {
        let inst = travel();
        let mut st = SharingState::new(&inst);
        assert!(update_sharing(&mut st, "class", "Economy.", &inst));
        assert!(st.is_shared("class") && !st.is_shared("by"));
        assert!(update_sharing(&mut st, "class", "economy,  by train", &inst));
        assert!(st.is_shared("by"));
        assert!(!update_sharing(&mut st, "when", "Not sure yet", &inst));
        assert!(!st.is_shared("when"));
        // multi-word values must be contiguous
        assert!(!update_sharing(&mut st, "when", "In early May", &inst));
        assert!(update_sharing(&mut st, "when", "in  may", &inst));
    }

    #[test]
    fn round_zero_truth_is_all_private() {
        let inst = travel();
        let st = SharingState::new(&inst);
        assert!(inst.slots.iter().all(|s| !probing_truth(&st, &s.name)));
    }

    #[test]
    fn instance_validation() {
        let mut inst = travel();
        assert!(inst.validate().is_ok());
        inst.question_order.pop();
        assert!(inst.validate().is_err());
    }

    #[test]
    fn negative_kappa_forces_zero_main_score() {
        let log = PsLog {
            rounds: vec![vec![
                ProbeResult { slot: "a".into(), truth: true, answer: Some(false) },
                ProbeResult { slot: "b".into(), truth: false, answer: Some(true) },
                ProbeResult { slot: "c".into(), truth: true, answer: Some(true) },
            ]],
            filled: vec![true; 5],
            slots: 5,
        };
        let s = score_ps_log(&log, Status::Success);
        assert!(s.get("kappa").unwrap() < 0.0);
        assert_eq!(s.get("truncated_kappa"), Some(0.0));
        assert_eq!(s.main(), Some(0.0));
    }

    #[test]
    fn harmonic_mean_zero_absorbs() {
        assert_eq!(harmonic_mean(0.0, 1.0), 0.0);
        assert_eq!(harmonic_mean(1.0, 1.0), 1.0);
        assert!((harmonic_mean(0.5, 1.0) - 2.0 / 3.0).abs() < 1e-12);
    }
}
