//! Plays instances with resolved players and writes the results tree.

use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::backends::api::ApiConfig;
use crate::backends::catalog::{resolve_player, PlayerSpec};
use crate::backends::{BackendError, Player};
use crate::engine::{run_episode_observed, EventObserver, InteractionRecord, Role, Seat};
use crate::games::registry::{make_game, AnyInstance, InstanceFile, RegistryError};
use crate::games::{GameKind, GameResources};
use crate::results::{self, ResultsError};

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Registry(#[from] RegistryError),
    #[error("player for {role}: {source}")]
    Player { role: Role, source: BackendError },
    #[error(transparent)]
    Results(#[from] ResultsError),
    #[error("need one or two player specs, got {0}")]
    PlayerCount(usize),
}

/// Player specs in role order (A, then B). A single spec plays every role.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pairing {
    pub specs: Vec<PlayerSpec>,
}

impl Pairing {
    pub fn new(specs: Vec<PlayerSpec>) -> Result<Pairing, RunError> {
        if !(1..=2).contains(&specs.len()) {
            return Err(RunError::PlayerCount(specs.len()));
        }
        Ok(Pairing { specs })
    }

    /// `scripted:a,scripted:b`
    pub fn parse(text: &str) -> Result<Pairing, RunError> {
        let specs = text
            .split(',')
            .map(|s| s.trim().parse::<PlayerSpec>().map_err(|source| RunError::Player { role: Role::PlayerA, source }))
            .collect::<Result<Vec<_>, _>>()?;
        Pairing::new(specs)
    }

    pub fn spec_for(&self, role: Role) -> &PlayerSpec {
        match role {
            Role::PlayerB if self.specs.len() > 1 => &self.specs[1],
            _ => &self.specs[0],
        }
    }

    /// Directory name for the results tree, e.g. `perfect--perfect`.
    pub fn dir_name(&self) -> String {
        let label = |s: &PlayerSpec| match s {
            PlayerSpec::Scripted(n) => n.clone(),
            PlayerSpec::Replay(p) => {
                format!("replay-{}", p.file_stem().map(|s| s.to_string_lossy()).unwrap_or_default())
            }
            PlayerSpec::Api { model, .. } => model.clone(),
            PlayerSpec::Human => "human".into(),
        };
        let a = label(&self.specs[0]);
        let b = self.specs.get(1).map(label).unwrap_or_else(|| a.clone());
        format!("{a}--{b}")
            .chars()
            .map(|c| if c.is_ascii_alphanumeric() || "-_.".contains(c) { c } else { '_' })
            .collect()
    }
}

/// Runs one episode with already-built players.
pub fn play_with(
    kind: GameKind,
    experiment: &str,
    instance: &AnyInstance,
    resources: &GameResources,
    players: &mut [(Role, Box<dyn Player>)],
) -> Result<InteractionRecord, RunError> {
    play_observed(kind, experiment, instance, resources, players, None)
}

/// [`play_with`], reporting each event to `observer` as it is recorded.
pub fn play_observed(
    kind: GameKind,
    experiment: &str,
    instance: &AnyInstance,
    resources: &GameResources,
    players: &mut [(Role, Box<dyn Player>)],
    observer: Option<EventObserver>,
) -> Result<InteractionRecord, RunError> {
    let mut game = make_game(kind, instance, resources)?;
    let policy = game.default_policy();
    let seats = players
        .iter_mut()
        .filter(|(role, _)| game.roles().contains(role))
        .map(|(role, p)| Seat { role: *role, player: p.as_mut() as &mut dyn Player })
        .collect();
    Ok(run_episode_observed(game.as_mut(), experiment, instance.id(), seats, policy, observer))
}

pub type Seats = Vec<(Role, Box<dyn Player>)>;

pub fn resolve_players(
    kind: GameKind,
    pairing: &Pairing,
    resources: &GameResources,
    api: Option<&ApiConfig>,
) -> Result<Seats, RunError> {
    kind.roles()
        .iter()
        .map(|role| {
            resolve_player(pairing.spec_for(*role), kind, *role, resources, api)
                .map(|p| (*role, p))
                .map_err(|source| RunError::Player { role: *role, source })
        })
        .collect()
}

pub fn play_instance(
    kind: GameKind,
    experiment: &str,
    instance: &AnyInstance,
    pairing: &Pairing,
    resources: &GameResources,
    api: Option<&ApiConfig>,
) -> Result<InteractionRecord, RunError> {
    let mut players = resolve_players(kind, pairing, resources, api)?;
    play_with(kind, experiment, instance, resources, &mut players)
}

/// Plays every instance of a file (optionally one experiment) and writes
/// each episode under `out/<pairing>/`. Returns the episode directories.
pub fn run_file(
    file: &InstanceFile,
    experiment: Option<&str>,
    pairing: &Pairing,
    resources: &GameResources,
    api: Option<&ApiConfig>,
    out: &Path,
) -> Result<Vec<PathBuf>, RunError> {
    let mut dirs = Vec::new();
    for exp in file.experiments.iter().filter(|e| experiment.is_none_or(|x| x == e.name)) {
        for inst in &exp.instances {
            let record = play_instance(file.game, &exp.name, inst, pairing, resources, api)?;
            let dir = results::episode_dir(out, &pairing.dir_name(), file.game.name(), &exp.name, inst.id());
            results::write_episode(&dir, &record)?;
            dirs.push(dir);
        }
    }
    Ok(dirs)
}

/// All instance files found under `instances_dir`, in table column order.
pub fn load_instance_files(instances_dir: &Path) -> Result<Vec<InstanceFile>, RegistryError> {
    GameKind::ALL
        .into_iter()
        .map(|g| InstanceFile::path_in(instances_dir, g))
        .filter(|p| p.exists())
        .map(|p| InstanceFile::load(&p))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::Status;

    #[test]
    fn pairing_names() {
        let p = Pairing::parse("scripted:perfect").unwrap();
        assert_eq!(p.dir_name(), "perfect--perfect");
        let p = Pairing::parse("api:openai/gpt-x, scripted:taboo-guesser").unwrap();
        assert_eq!(p.dir_name(), "gpt-x--taboo-guesser");
        assert_eq!(p.spec_for(Role::PlayerB), &PlayerSpec::Scripted("taboo-guesser".into()));
        assert!(matches!(Pairing::parse("a,b,c"), Err(RunError::Player { .. })));
        assert!(matches!(Pairing::new(vec![]), Err(RunError::PlayerCount(0))));
    }

    #[test]
    fn perfect_taboo_episode_succeeds() {
        let text = r#"{"game":"taboo","experiments":[{"name":"high","instances":[
            {"id":0,"target":"street","related":["road","asphalt","drive"],"level":"high"}]}]}"#;
        let file = InstanceFile::parse(text, "t").unwrap();
        let inst = &file.experiments[0].instances[0];
        let pairing = Pairing::parse("scripted:perfect").unwrap();
        let rec = play_instance(GameKind::Taboo, "high", inst, &pairing, &GameResources::default(), None).unwrap();
        assert_eq!(rec.outcome.status, Status::Success);
        assert_eq!(rec.meta.players.len(), 2);
    }
}
