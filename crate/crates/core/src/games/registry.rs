//! Name-based lookup of games, their instance files and scorers.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use super::drawing::{score_drawing, DrawingGame, DrawingInstance};
use super::privateshared::{score_privateshared, PrivateSharedGame, PsInstance};
use super::reference::{score_reference, ReferenceGame, ReferenceInstance};
use super::taboo::{score_taboo, TabooGame, TabooInstance};
use super::wordle::{score_wordle, Variant, WordLists, WordleGame, WordleInstance};
use super::GameScores;
use crate::engine::{GameMaster, InteractionRecord, Role};

#[derive(Debug, Error)]
pub enum RegistryError {
    #[error("unknown game `{0}`")]
    UnknownGame(String),
    #[error("unknown instance {experiment}/{id}")]
    UnknownInstance { experiment: String, id: u32 },
    #[error("instance file {path}: {reason}")]
    BadInstanceFile { path: String, reason: String },
    #[error("game `{0}` needs the wordle word lists")]
    MissingResources(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GameKind {
    Drawing,
    #[serde(rename = "privateshared")]
    PrivateShared,
    Reference,
    Taboo,
    Wordle,
    #[serde(rename = "wordle_withclue")]
    WordleClue,
    #[serde(rename = "wordle_withcritic")]
    WordleCritic,
}

impl GameKind {
    /// In results-table column order.
    pub const ALL: [GameKind; 7] = [
        GameKind::Drawing,
        GameKind::PrivateShared,
        GameKind::Reference,
        GameKind::Taboo,
        GameKind::Wordle,
        GameKind::WordleClue,
        GameKind::WordleCritic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GameKind::Drawing => "drawing",
            GameKind::PrivateShared => "privateshared",
            GameKind::Reference => "reference",
            GameKind::Taboo => "taboo",
            GameKind::Wordle => "wordle",
            GameKind::WordleClue => "wordle_withclue",
            GameKind::WordleCritic => "wordle_withcritic",
        }
    }

    /// Short column header for result tables.
    pub fn column(self) -> &'static str {
        match self {
            GameKind::Drawing => "drawing",
            GameKind::PrivateShared => "priv/sh",
            GameKind::Reference => "reference",
            GameKind::Taboo => "taboo",
            GameKind::Wordle => "wordle",
            GameKind::WordleClue => "wordle+cl",
            GameKind::WordleCritic => "wordle+cl+cr",
        }
    }

    pub fn from_name(name: &str) -> Result<GameKind, RegistryError> {
        GameKind::ALL.into_iter().find(|k| k.name() == name).ok_or_else(|| RegistryError::UnknownGame(name.into()))
    }

    pub fn roles(self) -> &'static [Role] {
        match self {
            GameKind::Wordle | GameKind::WordleClue | GameKind::PrivateShared => &[Role::PlayerA],
            _ => &[Role::PlayerA, Role::PlayerB],
        }
    }

    pub fn variant(self) -> Option<Variant> {
        match self {
            GameKind::Wordle => Some(Variant::Basic),
            GameKind::WordleClue => Some(Variant::Clue),
            GameKind::WordleCritic => Some(Variant::ClueCritic),
            _ => None,
        }
    }
}

impl fmt::Display for GameKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
#[allow(clippy::large_enum_variant)]
pub enum AnyInstance {
    Taboo(TabooInstance),
    Wordle(WordleInstance),
    Drawing(DrawingInstance),
    Reference(ReferenceInstance),
    PrivateShared(PsInstance),
}

impl AnyInstance {
    pub fn id(&self) -> u32 {
        match self {
            AnyInstance::Taboo(i) => i.id,
            AnyInstance::Wordle(i) => i.id,
            AnyInstance::Drawing(i) => i.id,
            AnyInstance::Reference(i) => i.id,
            AnyInstance::PrivateShared(i) => i.id,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        match self {
            AnyInstance::Taboo(i) => i.validate(),
            AnyInstance::Wordle(i) => i.validate(),
            AnyInstance::Drawing(i) => i.validate(),
            AnyInstance::Reference(i) => i.validate(),
            AnyInstance::PrivateShared(i) => i.validate(),
        }
    }

    fn from_value(kind: GameKind, v: Value) -> Result<AnyInstance, serde_json::Error> {
        Ok(match kind {
            GameKind::Taboo => AnyInstance::Taboo(serde_json::from_value(v)?),
            GameKind::Wordle | GameKind::WordleClue | GameKind::WordleCritic => {
                AnyInstance::Wordle(serde_json::from_value(v)?)
            }
            GameKind::Drawing => AnyInstance::Drawing(serde_json::from_value(v)?),
            GameKind::Reference => AnyInstance::Reference(serde_json::from_value(v)?),
            GameKind::PrivateShared => AnyInstance::PrivateShared(serde_json::from_value(v)?),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Experiment {
    pub name: String,
    pub instances: Vec<AnyInstance>,
}

/// Contents of `in/<game>/instances.json`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstanceFile {
    pub game: GameKind,
    pub experiments: Vec<Experiment>,
}

#[derive(Deserialize)]
struct RawFile {
    game: String,
    experiments: Vec<RawExperiment>,
}

#[derive(Deserialize)]
struct RawExperiment {
    name: String,
    instances: Vec<Value>,
}

impl InstanceFile {
    pub fn len(&self) -> usize {
        self.experiments.iter().map(|e| e.instances.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn parse(text: &str, origin: &str) -> Result<InstanceFile, RegistryError> {
        let bad = |reason: String| RegistryError::BadInstanceFile { path: origin.to_string(), reason };
        let raw: RawFile = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
        let game = GameKind::from_name(&raw.game)?;
        let mut experiments = Vec::new();
        for e in raw.experiments {
            let mut instances = Vec::new();
            for v in e.instances {
                let inst = AnyInstance::from_value(game, v).map_err(|err| bad(format!("{}: {err}", e.name)))?;
                inst.validate().map_err(|r| bad(format!("{} instance {}: {r}", e.name, inst.id())))?;
                instances.push(inst);
            }
            experiments.push(Experiment { name: e.name, instances });
        }
        Ok(InstanceFile { game, experiments })
    }

    pub fn load(path: &Path) -> Result<InstanceFile, RegistryError> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn find(&self, experiment: &str, id: u32) -> Result<&AnyInstance, RegistryError> {
        self.experiments
            .iter()
            .filter(|e| e.name == experiment)
            .flat_map(|e| e.instances.iter())
            .find(|i| i.id() == id)
            .ok_or_else(|| RegistryError::UnknownInstance { experiment: experiment.into(), id })
    }

    pub fn path_in(dir: &Path, game: GameKind) -> std::path::PathBuf {
        dir.join(game.name()).join("instances.json")
    }
}

/// Shared read-only data some games need at play time.
#[derive(Debug, Clone, Default)]
pub struct GameResources {
    pub wordle: Option<Arc<WordLists>>,
}

impl GameResources {
    /// Loads what exists under a resources directory.
    pub fn load(dir: &Path) -> Result<GameResources, RegistryError> {
        let wdir = dir.join("wordle");
        let wordle =
            if wdir.join("possible_words.txt").exists() { Some(Arc::new(WordLists::load(&wdir)?)) } else { None };
        Ok(GameResources { wordle })
    }
}

pub fn make_game(
    kind: GameKind,
    instance: &AnyInstance,
    resources: &GameResources,
) -> Result<Box<dyn GameMaster + Send>, RegistryError> {
    let mismatch = || RegistryError::BadInstanceFile {
        path: kind.name().into(),
        reason: format!("instance {} does not belong to {kind}", instance.id()),
    };
    Ok(match (kind, instance) {
        (GameKind::Taboo, AnyInstance::Taboo(i)) => Box::new(TabooGame::new(i.clone())),
        (GameKind::Wordle | GameKind::WordleClue | GameKind::WordleCritic, AnyInstance::Wordle(i)) => {
            if Some(i.variant) != kind.variant() {
                return Err(mismatch());
            }
            let lists = resources.wordle.clone().ok_or_else(|| RegistryError::MissingResources(kind.name().into()))?;
            Box::new(WordleGame::new(i.clone(), lists))
        }
        (GameKind::Drawing, AnyInstance::Drawing(i)) => Box::new(DrawingGame::new(i.clone())),
        (GameKind::Reference, AnyInstance::Reference(i)) => Box::new(ReferenceGame::new(i.clone())),
        (GameKind::PrivateShared, AnyInstance::PrivateShared(i)) => Box::new(PrivateSharedGame::new(i.clone())),
        _ => return Err(mismatch()),
    })
}

/// Recomputes game scores from a finalized record.
pub fn score_record(record: &InteractionRecord) -> Result<GameScores, RegistryError> {
    Ok(match GameKind::from_name(&record.meta.game)? {
        GameKind::Taboo => score_taboo(record),
        GameKind::Wordle | GameKind::WordleClue | GameKind::WordleCritic => score_wordle(record),
        GameKind::Drawing => score_drawing(record),
        GameKind::Reference => score_reference(record),
        GameKind::PrivateShared => score_privateshared(record),
    })
}
