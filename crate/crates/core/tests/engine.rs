use std::sync::{Arc, Mutex};

use clem_core::backends::{BackendError, ChatContext, FnPlayer, Origin, Player, ReplayPlayer};
use clem_core::engine::{
    run_episode, run_episode_observed, AbortCause, Episode, Event, GameMaster, Interrupt, RepromptPolicy, Role, Seat,
    Status, Terminal, Violation,
};
use proptest::prelude::*;
use serde_json::{json, Value};

/// A to-the-point two-player game: A must say "ok:<secret>", B must echo
/// what A said. Player A also gets one aside question.
struct Echo {
    secret: String,
}

fn parse_ok(text: &str) -> Result<String, Violation> {
    text.strip_prefix("ok:")
        .map(str::to_string)
        .ok_or_else(|| Violation::format("ok-format", "missing ok:").with_reprompt("Start with ok:"))
}

impl GameMaster for Echo {
    fn game_name(&self) -> &str {
        "echo"
    }

    fn roles(&self) -> &'static [Role] {
        &[Role::PlayerA, Role::PlayerB]
    }

    fn default_policy(&self) -> RepromptPolicy {
        RepromptPolicy::new().limit("ok-format", 1)
    }

    fn play(&mut self, ep: &mut Episode<'_>) -> Result<Terminal, Interrupt> {
        let said = ep.ask(Role::PlayerA, &format!("the secret is {}", self.secret), parse_ok)?;
        ep.note("[valid]");
        let _ =
            ep.ask_aside(Role::PlayerA, "aside: are you sure?", &mut |t: &str| Ok::<_, Violation>(t.to_string()))?;
        ep.set_turn(2);
        let echoed = ep.ask(Role::PlayerB, &format!("repeat: {said}"), parse_ok)?;
        Ok(if echoed == self.secret { Terminal::success(2) } else { Terminal::lose(2) })
    }

    fn game_log(&self) -> Value {
        json!({ "secret": self.secret })
    }
}

fn replay(lines: &[&str]) -> ReplayPlayer {
    ReplayPlayer::new("replay", lines.iter().map(|s| s.to_string()).collect())
}

#[test]
fn contexts_hold_only_addressed_messages() {
    let seen_b = Arc::new(Mutex::new(Vec::<ChatContext>::new()));
    let log = seen_b.clone();
    let mut a = replay(&["ok:blue", "yes"]);
    let mut b = FnPlayer::new("b", move |ctx: &ChatContext| {
        log.lock().unwrap().push(ctx.clone());
        "ok:blue".to_string()
    });
    let mut game = Echo { secret: "blue".into() };
    let policy = game.default_policy();
    let seats = vec![Seat { role: Role::PlayerA, player: &mut a }, Seat { role: Role::PlayerB, player: &mut b }];
    let rec = run_episode(&mut game, "e", 0, seats, policy);
    assert_eq!(rec.outcome.status, Status::Success);
    let ctx = &seen_b.lock().unwrap()[0];
    assert_eq!(ctx.len(), 1);
    assert_eq!(ctx.messages[0].origin, Origin::Other);
    assert!(!ctx.messages[0].text.contains("secret is"));
    assert!(rec.events.iter().any(|e| e.aside));
}

#[test]
fn asides_do_not_persist() {
    let seen = Arc::new(Mutex::new(Vec::<ChatContext>::new()));
    let log = seen.clone();
    struct Twice;
    impl GameMaster for Twice {
        fn game_name(&self) -> &str {
            "twice"
        }
        fn roles(&self) -> &'static [Role] {
            &[Role::PlayerA]
        }
        fn default_policy(&self) -> RepromptPolicy {
            RepromptPolicy::new()
        }
        fn play(&mut self, ep: &mut Episode<'_>) -> Result<Terminal, Interrupt> {
            ep.ask_aside(Role::PlayerA, "probe", &mut |t: &str| Ok::<_, Violation>(t.to_string()))?.ok();
            ep.ask_once(Role::PlayerA, "main", &mut |t: &str| Ok::<_, Violation>(t.to_string()))?.ok();
            Ok(Terminal::success(1))
        }
        fn game_log(&self) -> Value {
            Value::Null
        }
    }
    let mut a = FnPlayer::new("a", move |ctx: &ChatContext| {
        log.lock().unwrap().push(ctx.clone());
        "x".to_string()
    });
    run_episode(&mut Twice, "e", 0, vec![Seat { role: Role::PlayerA, player: &mut a }], RepromptPolicy::new());
    let seen = seen.lock().unwrap();
    assert_eq!(seen[1].len(), 1, "probe must not precede the main prompt");
    assert_eq!(seen[1].messages[0].text, "main");
}

#[test]
fn reprompt_budget_then_abort() {
    let mut a = replay(&["nope", "still nope"]);
    let mut b = replay(&[]);
    let mut game = Echo { secret: "x".into() };
    let policy = game.default_policy();
    let seats = vec![Seat { role: Role::PlayerA, player: &mut a }, Seat { role: Role::PlayerB, player: &mut b }];
    let rec = run_episode(&mut game, "e", 0, seats, policy);
    assert_eq!(rec.outcome.status, Status::Aborted);
    assert_eq!(rec.abort.as_ref().unwrap().cause, AbortCause::PlayerViolation);
    assert_eq!((rec.requests.request_count, rec.requests.violated_request_count), (2, 2));
    assert!(rec.events.iter().any(|e| e.message.text == "Start with ok:"));
    assert_eq!(rec.events.last().unwrap().message.text, "abort game");
}

#[test]
fn backend_failure_is_distinguished() {
    struct Down;
    impl Player for Down {
        fn descriptor(&self) -> String {
            "down".into()
        }
        fn complete(&mut self, _: &ChatContext) -> Result<String, BackendError> {
            Err(BackendError::Timeout("stub".into()))
        }
    }
    let (mut a, mut b) = (Down, Down);
    let mut game = Echo { secret: "x".into() };
    let policy = game.default_policy();
    let seats = vec![Seat { role: Role::PlayerA, player: &mut a }, Seat { role: Role::PlayerB, player: &mut b }];
    let rec = run_episode(&mut game, "e", 0, seats, policy);
    assert!(rec.backend_failure());
    assert!(rec.events.last().unwrap().message.text.starts_with("backend failure"));
}

#[test]
fn observer_sees_record_order() {
    let seen = Arc::new(Mutex::new(Vec::<Event>::new()));
    let log = seen.clone();
    let mut a = replay(&["bad", "ok:k", "sure"]);
    let mut b = replay(&["ok:k"]);
    let mut game = Echo { secret: "k".into() };
    let seats = vec![Seat { role: Role::PlayerA, player: &mut a }, Seat { role: Role::PlayerB, player: &mut b }];
    let obs = Box::new(move |e: &Event| log.lock().unwrap().push(e.clone()));
    let policy = game.default_policy();
    let rec = run_episode_observed(&mut game, "e", 0, seats, policy, Some(obs));
    assert_eq!(*seen.lock().unwrap(), rec.events);
    assert_eq!(rec.outcome.status, Status::Success);
}

#[test]
fn unknown_violation_class_aborts() {
    let mut a = replay(&["nope"]);
    let mut b = replay(&[]);
    let mut game = Echo { secret: "x".into() };
    let seats = vec![Seat { role: Role::PlayerA, player: &mut a }, Seat { role: Role::PlayerB, player: &mut b }];
    let rec = run_episode(&mut game, "e", 0, seats, RepromptPolicy::new());
    assert_eq!(rec.outcome.status, Status::Aborted);
    assert!(rec.abort.unwrap().detail.contains("ok-format"));
}

proptest! {
    #[test]
    fn requests_balance(replies in proptest::collection::vec(prop_oneof![Just("ok:s".to_string()), Just("junk".to_string()), ".{0,8}"], 1..6)) {
        let mut a = ReplayPlayer::new("a", replies.clone());
        let mut b = ReplayPlayer::new("b", replies);
        let mut game = Echo { secret: "s".into() };
        let policy = game.default_policy();
        let seats = vec![Seat { role: Role::PlayerA, player: &mut a }, Seat { role: Role::PlayerB, player: &mut b }];
        let rec = run_episode(&mut game, "e", 0, seats, policy);
        let r = rec.requests;
        prop_assert_eq!(r.parsed_request_count + r.violated_request_count, r.request_count);
        prop_assert!(rec.exclusive_outcome());
        prop_assert!(rec.events.iter().all(|e| e.message.well_formed()));
    }
}
