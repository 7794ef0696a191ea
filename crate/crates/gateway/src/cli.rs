//! The `clem` command line.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::Context;
use clap::{Parser, Subcommand};
use clem_core::games::registry::{InstanceFile, RegistryError};
use clem_core::games::{GameKind, GameResources};
use clem_core::instancegen::{generate_all, write_all, GenerationConfig};
use clem_core::results::{self, find_records, read_record, render_transcript, rescore, write_episode, write_tables};
use clem_core::runner::{load_instance_files, play_instance, run_file, Pairing};

use crate::config::Config;
use crate::session::SessionManager;

#[derive(Debug, Parser)]
#[command(name = "clem", version, about = "Dialogue game benchmark runner")]
pub struct Cli {
    /// JSON configuration file.
    #[arg(long, env = "CLEM_CONFIG", global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate instance files for every game.
    Instances {
        #[arg(long)]
        resources: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Play episodes and write interaction records and scores.
    Run {
        /// Game name, or `all`.
        #[arg(long)]
        game: String,
        #[arg(long)]
        experiment: Option<String>,
        /// Play one instance; requires --experiment when ids repeat.
        #[arg(long)]
        instance: Option<u32>,
        /// One spec for every role, or `A,B`; e.g. `scripted:perfect`.
        #[arg(long)]
        players: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recompute scores.json for every record under PATH.
    Score { path: Option<PathBuf> },
    /// Write transcript.txt next to every record under PATH.
    Transcribe { path: Option<PathBuf> },
    /// Optionally run pairings over all instances, then write result tables.
    Bench {
        /// Repeatable; each value is a `--players` spec.
        #[arg(long = "pairing")]
        pairings: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Start the session service for human players.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: String,
    },
}

/// A mistake in what was asked for, as opposed to a failure doing it.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

pub const TRANSCRIPT_FILE: &str = "transcript.txt";

/// Parses `argv`, runs the command, and returns the process exit code.
pub fn main_with(argv: impl IntoIterator<Item = String>) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("clem: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                2
            } else {
                1
            }
        }
    }
}

pub fn execute(cli: Cli) -> anyhow::Result<()> {
    let cfg = Config::load(cli.config.as_deref())?;
    match cli.command {
        Command::Instances { resources, out, seed } => {
            let resources = resources.unwrap_or_else(|| cfg.resources_dir.clone());
            let out = out.unwrap_or_else(|| cfg.instances_dir.clone());
            let (files, report) = generate_all(&GenerationConfig { seed, resources })?;
            for (path, file) in write_all(&files, &out)?.iter().zip(&files) {
                println!("{:>4}  {}", file.len(), path.display());
            }
            println!("{:>4}  total", files.iter().map(InstanceFile::len).sum::<usize>());
            let [a, b, c] = report.wordle_group_sizes;
            println!(
                "taboo bins <= {:.2}, {:.2}; wordle groups {a}/{b}/{c}",
                report.taboo_bin_upper[0], report.taboo_bin_upper[1]
            );
        }
        Command::Run { game, experiment, instance, players, out } => {
            let pairing = Pairing::parse(&players).map_err(|e| usage(e.to_string()))?;
            let out = out.unwrap_or_else(|| cfg.results_dir.clone());
            let resources = GameResources::load(&cfg.resources_dir)?;
            let files = selected_files(&cfg.instances_dir, &game)?;
            let mut n = 0;
            for file in &files {
                let dirs = match instance {
                    Some(id) => vec![run_one(file, experiment.as_deref(), id, &pairing, &resources, &cfg, &out)?],
                    None => {
                        if let Some(x) = &experiment {
                            if !file.experiments.iter().any(|e| &e.name == x) {
                                return Err(usage(format!("{} has no experiment `{x}`", file.game)));
                            }
                        }
                        run_file(file, experiment.as_deref(), &pairing, &resources, cfg.api.as_ref(), &out)?
                    }
                };
                n += dirs.len();
            }
            println!("{n} episodes written under {}", out.join(pairing.dir_name()).display());
        }
        Command::Score { path } => {
            let root = path.unwrap_or_else(|| cfg.results_dir.clone());
            let scored = rescore(&root)?;
            for (p, s) in &scored {
                let main = s.game.main().map_or("-".to_string(), |m| format!("{m:.2}"));
                println!("{}  main={main}", p.parent().unwrap_or(&root).display());
            }
            println!("{} records scored", scored.len());
        }
        Command::Transcribe { path } => {
            let root = path.unwrap_or_else(|| cfg.results_dir.clone());
            let records = find_records(&root)?;
            for p in &records {
                let text = render_transcript(&read_record(p)?);
                let dest = p.with_file_name(TRANSCRIPT_FILE);
                std::fs::write(&dest, text).with_context(|| format!("writing {}", dest.display()))?;
            }
            println!("{} transcripts written", records.len());
        }
        Command::Bench { pairings, out } => {
            let out = out.unwrap_or_else(|| cfg.results_dir.clone());
            if !pairings.is_empty() {
                let parsed = pairings
                    .iter()
                    .map(|p| Pairing::parse(p).map_err(|e| usage(e.to_string())))
                    .collect::<anyhow::Result<Vec<_>>>()?;
                let resources = GameResources::load(&cfg.resources_dir)?;
                let files = load_instance_files(&cfg.instances_dir)?;
                if files.is_empty() {
                    anyhow::bail!("no instance files under {}", cfg.instances_dir.display());
                }
                for pairing in &parsed {
                    for file in &files {
                        run_file(file, None, pairing, &resources, cfg.api.as_ref(), &out)?;
                    }
                }
            }
            print!("{}", write_tables(&out)?);
        }
        Command::Serve { addr } => {
            let manager = Arc::new(SessionManager::from_config(&cfg)?);
            let rt = tokio::runtime::Builder::new_multi_thread().enable_all().build()?;
            rt.block_on(async move {
                let listener = tokio::net::TcpListener::bind(&addr).await.with_context(|| format!("binding {addr}"))?;
                eprintln!("clem: serving sessions on http://{}", listener.local_addr()?);
                crate::server::serve(manager, listener).await?;
                anyhow::Ok(())
            })?;
        }
    }
    Ok(())
}

fn selected_files(instances_dir: &Path, game: &str) -> anyhow::Result<Vec<InstanceFile>> {
    if game == "all" {
        let files = load_instance_files(instances_dir)?;
        if files.is_empty() {
            anyhow::bail!("no instance files under {}", instances_dir.display());
        }
        return Ok(files);
    }
    let kind = GameKind::from_name(game).map_err(|e| usage(e.to_string()))?;
    let path = InstanceFile::path_in(instances_dir, kind);
    Ok(vec![InstanceFile::load(&path).with_context(|| format!("loading {}", path.display()))?])
}

fn run_one(
    file: &InstanceFile,
    experiment: Option<&str>,
    id: u32,
    pairing: &Pairing,
    resources: &GameResources,
    cfg: &Config,
    out: &Path,
) -> anyhow::Result<PathBuf> {
    let hits: Vec<_> = file
        .experiments
        .iter()
        .filter(|e| experiment.is_none_or(|x| x == e.name))
        .filter_map(|e| e.instances.iter().find(|i| i.id() == id).map(|i| (e.name.as_str(), i)))
        .collect();
    let (exp, inst) = match hits.as_slice() {
        [one] => *one,
        [] => {
            let e = RegistryError::UnknownInstance { experiment: experiment.unwrap_or("*").into(), id };
            return Err(usage(e.to_string()));
        }
        _ => return Err(usage(format!("instance {id} occurs in several experiments; pass --experiment"))),
    };
    let record = play_instance(file.game, exp, inst, pairing, resources, cfg.api.as_ref())?;
    let dir = results::episode_dir(out, &pairing.dir_name(), file.game.name(), exp, id);
    write_episode(&dir, &record)?;
    Ok(dir)
}
