#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use clem_core::games::registry::{AnyInstance, InstanceFile};
use clem_core::games::{GameKind, GameResources};
use clem_core::instancegen::{generate_all, write_all, GenerationConfig};
use clem_gateway::session::SessionManager;

pub fn resources() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../resources")
}

/// Instance files generated once per test binary.
pub fn instances_dir() -> &'static Path {
    static DIR: OnceLock<tempfile::TempDir> = OnceLock::new();
    DIR.get_or_init(|| {
        let dir = tempfile::tempdir().expect("tempdir");
        let (files, _) = generate_all(&GenerationConfig::new(resources())).expect("instances generate");
        write_all(&files, dir.path()).expect("instances write");
        dir
    })
    .path()
}

pub fn manager() -> SessionManager {
    SessionManager::new(instances_dir(), GameResources::load(&resources()).expect("resources load"))
}

/// (experiment, instance) pairs of one game, in file order.
pub fn instances(game: GameKind) -> Vec<(String, AnyInstance)> {
    let file = InstanceFile::load(&InstanceFile::path_in(instances_dir(), game)).expect("instance file");
    file.experiments.iter().flat_map(|e| e.instances.iter().map(move |i| (e.name.clone(), i.clone()))).collect()
}
