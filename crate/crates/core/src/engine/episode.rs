use std::collections::BTreeMap;

use serde_json::Value;

use super::policy::{decide_reprompt, Decision, RepromptPolicy};
use super::record::{AbortCause, AbortInfo, Event, InteractionRecord, RecordBuilder, RecordMeta};
use super::types::{EpisodeOutcome, Message, MoveVerdict, Role, Status, Violation};
use crate::backends::{BackendError, ChatContext, Origin, Player};

/// Why a game stopped before reaching a terminal state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Interrupt {
    Abort(String),
    Backend(BackendError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Terminal {
    pub status: Status,
    pub final_turn: u32,
}

impl Terminal {
    pub fn success(turn: u32) -> Self {
        Terminal { status: Status::Success, final_turn: turn }
    }

    pub fn lose(turn: u32) -> Self {
        Terminal { status: Status::Lose, final_turn: turn }
    }
}

/// A game definition bound to one instance.
pub trait GameMaster {
    fn game_name(&self) -> &str;
    fn roles(&self) -> &'static [Role];
    fn default_policy(&self) -> RepromptPolicy;
    fn play(&mut self, ep: &mut Episode<'_>) -> Result<Terminal, Interrupt>;
    /// Game state for the scorer, stored in the record.
    fn game_log(&self) -> Value;
}

/// Sees every event the moment it is recorded.
pub type EventObserver = Box<dyn FnMut(&Event) + Send>;

pub struct Seat<'p> {
    pub role: Role,
    pub player: &'p mut dyn Player,
}

/// Live state of one episode: routes messages between the GM logic and the
/// seated players and keeps the record in step.
pub struct Episode<'p> {
    builder: RecordBuilder,
    players: BTreeMap<Role, &'p mut dyn Player>,
    contexts: BTreeMap<Role, ChatContext>,
    policy: RepromptPolicy,
    turn: u32,
    observer: Option<EventObserver>,
}

impl<'p> Episode<'p> {
    pub fn new(meta: RecordMeta, seats: Vec<Seat<'p>>, policy: RepromptPolicy) -> Self {
        let mut builder = RecordBuilder::new(meta);
        let mut players = BTreeMap::new();
        for seat in seats {
            builder.meta_mut().players.insert(seat.role.short().to_string(), seat.player.descriptor());
            players.insert(seat.role, seat.player);
        }
        Episode { builder, players, contexts: BTreeMap::new(), policy, turn: 1, observer: None }
    }

    pub fn observe(&mut self, observer: EventObserver) {
        self.observer = Some(observer);
    }

    pub fn turn(&self) -> u32 {
        self.turn
    }

    pub fn set_turn(&mut self, turn: u32) {
        debug_assert!(turn >= self.turn);
        self.turn = turn;
    }

    pub fn context(&self, role: Role) -> Option<&ChatContext> {
        self.contexts.get(&role)
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.append(Message::internal(text, self.turn), None, false);
    }

    /// Adds a GM message to the player's context without asking for a reply.
    pub fn inform(&mut self, role: Role, text: impl Into<String>) {
        let text = text.into();
        self.contexts.entry(role).or_default().push(Origin::Other, text.clone());
        self.append(Message::to_player(role, text, self.turn), None, false);
    }

    /// One request/response round trip. The response is annotated with the
    /// parse outcome and counted as a request either way.
    pub fn ask_once<T>(
        &mut self,
        role: Role,
        prompt: &str,
        parse: &mut dyn FnMut(&str) -> Result<T, Violation>,
    ) -> Result<Result<T, Violation>, Interrupt> {
        self.exchange(role, prompt, false, parse)
    }

    /// Like [`ask_once`](Self::ask_once) but neither the prompt nor the reply
    /// is kept in the player's context afterwards.
    pub fn ask_aside<T>(
        &mut self,
        role: Role,
        prompt: &str,
        parse: &mut dyn FnMut(&str) -> Result<T, Violation>,
    ) -> Result<Result<T, Violation>, Interrupt> {
        self.exchange(role, prompt, true, parse)
    }

    /// Asks until the response parses, reprompting per the policy.
    pub fn ask<T>(
        &mut self,
        role: Role,
        prompt: &str,
        mut parse: impl FnMut(&str) -> Result<T, Violation>,
    ) -> Result<T, Interrupt> {
        let mut attempts: BTreeMap<&'static str, u32> = BTreeMap::new();
        let mut prompt = prompt.to_string();
        loop {
            match self.exchange(role, &prompt, false, &mut parse)? {
                Ok(v) => return Ok(v),
                Err(violation) => {
                    let used = attempts.entry(violation.class).or_insert(0);
                    let decision = decide_reprompt(&self.policy, violation.class, *used)
                        .map_err(|e| Interrupt::Abort(e.to_string()))?;
                    match decision {
                        Decision::Reprompt => {
                            *used += 1;
                            self.note(format!("reprompt {} ({}): {}", role, violation.class, violation.detail));
                            prompt = violation.reprompt;
                        }
                        Decision::Abort => return Err(Interrupt::Abort(violation.to_string())),
                    }
                }
            }
        }
    }

    fn exchange<T>(
        &mut self,
        role: Role,
        prompt: &str,
        aside: bool,
        parse: &mut dyn FnMut(&str) -> Result<T, Violation>,
    ) -> Result<Result<T, Violation>, Interrupt> {
        let mut context = self.contexts.get(&role).cloned().unwrap_or_default();
        context.push(Origin::Other, prompt);
        self.append(Message::to_player(role, prompt, self.turn), None, aside);

        let player = match self.players.get_mut(&role) {
            Some(p) => p,
            None => return Err(Interrupt::Abort(format!("no player seated as {role}"))),
        };
        let reply = player.complete(&context).map_err(Interrupt::Backend)?;
        let parsed = parse(&reply);
        let verdict = match &parsed {
            Ok(_) => MoveVerdict::Valid,
            Err(v) => v.verdict(),
        };
        self.append(Message::from_player(role, reply.clone(), self.turn), Some(verdict), aside);
        if !aside {
            context.push(Origin::Own, reply);
            self.contexts.insert(role, context);
        }
        Ok(parsed)
    }

    fn append(&mut self, message: Message, verdict: Option<MoveVerdict>, aside: bool) {
        let result = if aside {
            self.builder.append_aside(message, verdict)
        } else {
            self.builder.append_event(message, verdict)
        };
        result.expect("episode messages are well formed and annotated");
        if let (Some(obs), Some(e)) = (self.observer.as_mut(), self.builder.events().last()) {
            obs(e);
        }
    }

    fn finish(mut self, outcome: EpisodeOutcome, abort: Option<AbortInfo>, log: Value) -> InteractionRecord {
        self.builder.finalize(outcome, abort, log).expect("episode finalizes once")
    }
}

/// Plays one episode to the end and returns its finalized record.
pub fn run_episode(
    game: &mut dyn GameMaster,
    experiment: &str,
    instance_id: u32,
    seats: Vec<Seat<'_>>,
    policy: RepromptPolicy,
) -> InteractionRecord {
    run_episode_observed(game, experiment, instance_id, seats, policy, None)
}

pub fn run_episode_observed(
    game: &mut dyn GameMaster,
    experiment: &str,
    instance_id: u32,
    seats: Vec<Seat<'_>>,
    policy: RepromptPolicy,
    observer: Option<EventObserver>,
) -> InteractionRecord {
    let meta = RecordMeta::new(game.game_name(), experiment, instance_id);
    let mut ep = Episode::new(meta, seats, policy);
    if let Some(obs) = observer {
        ep.observe(obs);
    }
    let result = game.play(&mut ep);
    let (outcome, abort) = match result {
        Ok(t) => (EpisodeOutcome { status: t.status, final_turn: t.final_turn }, None),
        Err(Interrupt::Abort(detail)) => {
            ep.note("abort game");
            let info = AbortInfo { cause: AbortCause::PlayerViolation, detail };
            (EpisodeOutcome { status: Status::Aborted, final_turn: ep.turn }, Some(info))
        }
        Err(Interrupt::Backend(err)) => {
            ep.note(format!("backend failure: {err}"));
            let info = AbortInfo { cause: AbortCause::BackendFailure, detail: err.to_string() };
            (EpisodeOutcome { status: Status::Aborted, final_turn: ep.turn }, Some(info))
        }
    };
    let log = game.game_log();
    ep.finish(outcome, abort, log)
}
