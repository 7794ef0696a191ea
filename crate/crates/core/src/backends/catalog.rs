//! Player specs as written on the command line, and their resolution.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use super::api::{ApiConfig, ApiPlayer};
use super::oracle::OracleGuesser;
use super::replay::ReplayPlayer;
use super::scripted::{self, Scripted};
use super::{BackendError, Player};
use crate::engine::Role;
use crate::games::{GameKind, GameResources};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PlayerSpec {
    /// A named bot, or the per-game aliases `perfect` and `violator`.
    Scripted(String),
    Replay(PathBuf),
    /// `api:<provider>/<model>`
    Api {
        provider: String,
        model: String,
    },
    Human,
}

impl FromStr for PlayerSpec {
    type Err = BackendError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        match kind {
            "scripted" if !rest.is_empty() => Ok(PlayerSpec::Scripted(rest.into())),
            "replay" if !rest.is_empty() => Ok(PlayerSpec::Replay(rest.into())),
            "api" => match rest.split_once('/') {
                Some((p, m)) if !p.is_empty() && !m.is_empty() => {
                    Ok(PlayerSpec::Api { provider: p.into(), model: m.into() })
                }
                _ => Err(BackendError::Config(format!("expected api:<provider>/<model>, got `{s}`"))),
            },
            "human" => Ok(PlayerSpec::Human),
            _ => Err(BackendError::Config(format!("cannot parse player spec `{s}`"))),
        }
    }
}

impl fmt::Display for PlayerSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlayerSpec::Scripted(n) => write!(f, "scripted:{n}"),
            PlayerSpec::Replay(p) => write!(f, "replay:{}", p.display()),
            PlayerSpec::Api { provider, model } => write!(f, "api:{provider}/{model}"),
            PlayerSpec::Human => f.write_str("human"),
        }
    }
}

pub const BOT_NAMES: &[&str] = &[
    "taboo-describer",
    "taboo-guesser",
    "taboo-cheater",
    "taboo-wrong-guesser",
    "wordle-oracle",
    "wordle-critic",
    "drawing-giver",
    "drawing-follower",
    "reference-speaker",
    "reference-listener",
    "ps-truthful",
    "ps-always-no",
    "ps-untagged",
    "mute",
];

/// The bot an alias stands for in a given seat.
pub fn alias(name: &str, game: GameKind, role: Role) -> Option<&'static str> {
    use GameKind::*;
    let a = role == Role::PlayerA;
    Some(match (name, game) {
        ("perfect", Taboo) => {
            if a {
                "taboo-describer"
            } else {
                "taboo-guesser"
            }
        }
        ("perfect", Wordle | WordleClue | WordleCritic) => {
            if a {
                "wordle-oracle"
            } else {
                "wordle-critic"
            }
        }
        ("perfect", Drawing) => {
            if a {
                "drawing-giver"
            } else {
                "drawing-follower"
            }
        }
        ("perfect", Reference) => {
            if a {
                "reference-speaker"
            } else {
                "reference-listener"
            }
        }
        ("perfect", PrivateShared) => "ps-truthful",
        ("violator", Taboo) => {
            if a {
                "taboo-cheater"
            } else {
                "mute"
            }
        }
        ("violator", PrivateShared) => "ps-untagged",
        ("violator", _) => "mute",
        _ => return None,
    })
}

pub fn bot(name: &str, resources: &GameResources) -> Result<Box<dyn Player>, BackendError> {
    let f: fn(&super::ChatContext) -> String = match name {
        "taboo-describer" => scripted::taboo_describer,
        "taboo-guesser" => scripted::taboo_guesser,
        "taboo-cheater" => scripted::taboo_cheater,
        "taboo-wrong-guesser" => scripted::taboo_wrong_guesser,
        "wordle-critic" => scripted::wordle_critic_agrees,
        "drawing-giver" => scripted::drawing_giver,
        "drawing-follower" => scripted::drawing_follower,
        "reference-speaker" => scripted::reference_speaker,
        "reference-listener" => scripted::reference_listener,
        "ps-truthful" => scripted::ps_truthful,
        "ps-always-no" => scripted::ps_always_no,
        "ps-untagged" => scripted::ps_untagged,
        "mute" => scripted::mute,
        "wordle-oracle" => {
            let lists = resources
                .wordle
                .clone()
                .ok_or_else(|| BackendError::Config("wordle-oracle needs the wordle word lists".into()))?;
            return Ok(Box::new(OracleGuesser::new(lists)));
        }
        other => return Err(BackendError::UnknownBot(other.into())),
    };
    let static_name = BOT_NAMES.iter().find(|n| **n == name).copied().unwrap_or("bot");
    Ok(Box::new(Scripted::new(static_name, f)))
}

/// Builds the player for one seat. Human seats are served by the gateway.
pub fn resolve_player(
    spec: &PlayerSpec,
    game: GameKind,
    role: Role,
    resources: &GameResources,
    api: Option<&ApiConfig>,
) -> Result<Box<dyn Player>, BackendError> {
    match spec {
        PlayerSpec::Scripted(name) => bot(alias(name, game, role).unwrap_or(name), resources),
        PlayerSpec::Replay(path) => Ok(Box::new(ReplayPlayer::from_file(path, role)?)),
        PlayerSpec::Api { provider, model } => {
            let cfg = api.ok_or_else(|| BackendError::Config("no provider configuration loaded".into()))?;
            Ok(Box::new(ApiPlayer::from_config(cfg, provider, model)?))
        }
        PlayerSpec::Human => Err(BackendError::Config("human players need a live session".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn specs_parse_and_print() {
        for s in ["scripted:perfect", "replay:/tmp/x.json", "api:openai/gpt-4", "human"] {
            assert_eq!(s.parse::<PlayerSpec>().unwrap().to_string(), s);
        }
        assert!("api:openai".parse::<PlayerSpec>().is_err());
        assert!("robot".parse::<PlayerSpec>().is_err());
    }

    #[test]
    fn unknown_bot_is_reported() {
        let r = resolve_player(
            &PlayerSpec::Scripted("nobody".into()),
            GameKind::Taboo,
            Role::PlayerA,
            &GameResources::default(),
            None,
        );
        assert!(matches!(r, Err(BackendError::UnknownBot(n)) if n == "nobody"));
    }

    #[test]
    fn every_named_bot_resolves_except_resource_bound() {
        for n in BOT_NAMES.iter().filter(|n| **n != "wordle-oracle") {
            assert!(bot(n, &GameResources::default()).is_ok(), "{n}");
        }
    }

    #[test]
    fn aliases_cover_every_seat() {
        for g in GameKind::ALL {
            for r in g.roles() {
                for a in ["perfect", "violator"] {
                    assert!(BOT_NAMES.contains(&alias(a, g, *r).unwrap()));
                }
            }
        }
    }
}
