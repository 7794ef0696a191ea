//! The results tree: `<root>/<pairing>/<game>/<experiment>/episode_NNN/`
//! with `interactions.json` and `scores.json`, plus table files at the root.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::engine::{canonical_json, Channel, Event, InteractionRecord, MoveVerdict, Role};
use crate::games::GameKind;
use crate::metrics::{
    aggregate_game, render_csv, render_text, CommonScores, EpisodeScores, MetricsError, ResultsTable,
};

pub const RECORD_FILE: &str = "interactions.json";
pub const SCORES_FILE: &str = "scores.json";
pub const TABLE_TXT: &str = "results.txt";
pub const TABLE_CSV: &str = "results.csv";

#[derive(Debug, Error)]
pub enum ResultsError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {reason}")]
    BadRecord { path: String, reason: String },
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("no episodes under {0}")]
    Empty(String),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> ResultsError + '_ {
    move |source| ResultsError::Io { path: path.display().to_string(), source }
}

pub fn episode_dir(root: &Path, pairing: &str, game: &str, experiment: &str, id: u32) -> PathBuf {
    root.join(pairing).join(game).join(experiment).join(format!("episode_{id:03}"))
}

pub fn write_episode(dir: &Path, record: &InteractionRecord) -> Result<EpisodeScores, ResultsError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let rec_path = dir.join(RECORD_FILE);
    fs::write(&rec_path, record.to_canonical_json()).map_err(io_err(&rec_path))?;
    write_scores(dir, record)
}

pub fn write_scores(dir: &Path, record: &InteractionRecord) -> Result<EpisodeScores, ResultsError> {
    let scores = EpisodeScores::of(record);
    let path = dir.join(SCORES_FILE);
    fs::write(&path, canonical_json(&scores)).map_err(io_err(&path))?;
    Ok(scores)
}

pub fn read_record(path: &Path) -> Result<InteractionRecord, ResultsError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text)
        .map_err(|e| ResultsError::BadRecord { path: path.display().to_string(), reason: e.to_string() })
}

/// Every `interactions.json` below `root`, sorted by path.
pub fn find_records(root: &Path) -> Result<Vec<PathBuf>, ResultsError> {
    fn walk(dir: &Path, out: &mut Vec<PathBuf>) -> Result<(), ResultsError> {
        for entry in fs::read_dir(dir).map_err(io_err(dir))? {
            let path = entry.map_err(io_err(dir))?.path();
            if path.is_dir() {
                walk(&path, out)?;
            } else if path.file_name().is_some_and(|n| n == RECORD_FILE) {
                out.push(path);
            }
        }
        Ok(())
    }
    let mut out = Vec::new();
    if root.is_file() {
        out.push(root.to_path_buf());
    } else {
        walk(root, &mut out)?;
    }
    out.sort();
    Ok(out)
}

/// Recomputes `scores.json` next to every record below `root`.
pub fn rescore(root: &Path) -> Result<Vec<(PathBuf, EpisodeScores)>, ResultsError> {
    find_records(root)?
        .into_iter()
        .map(|p| {
            let rec = read_record(&p)?;
            let dir = p.parent().unwrap_or(Path::new("."));
            Ok((p.clone(), write_scores(dir, &rec)?))
        })
        .collect()
}

/// Groups episodes by pairing (first path component under `root`) and game.
pub fn collect_table(root: &Path) -> Result<ResultsTable, ResultsError> {
    let mut grouped: BTreeMap<String, BTreeMap<GameKind, Vec<CommonScores>>> = BTreeMap::new();
    for path in find_records(root)? {
        let rec = read_record(&path)?;
        let Ok(game) = GameKind::from_name(&rec.meta.game) else { continue };
        let pairing = path
            .strip_prefix(root)
            .ok()
            .and_then(|rel| rel.components().next())
            .map(|c| c.as_os_str().to_string_lossy().into_owned())
            .unwrap_or_default();
        grouped.entry(pairing).or_default().entry(game).or_default().push(EpisodeScores::of(&rec).common);
    }
    if grouped.is_empty() {
        return Err(ResultsError::Empty(root.display().to_string()));
    }
    let mut table = ResultsTable::new();
    for (pairing, games) in grouped {
        let row = table.entry(pairing).or_default();
        for (game, eps) in games {
            // A game whose episodes all failed on the backend side stays out.
            if let Ok(cell) = aggregate_game(&eps) {
                row.insert(game, cell);
            }
        }
    }
    Ok(table)
}

/// Writes `results.txt` and `results.csv` into `root`; returns the text.
pub fn write_tables(root: &Path) -> Result<String, ResultsError> {
    let table = collect_table(root)?;
    let text = render_text(&table);
    let txt = root.join(TABLE_TXT);
    fs::write(&txt, &text).map_err(io_err(&txt))?;
    let csv = root.join(TABLE_CSV);
    fs::write(&csv, render_csv(&table)?).map_err(io_err(&csv))?;
    Ok(text)
}

const LANE: usize = 24;

fn lane_tag(e: &Event) -> (usize, String) {
    let m = &e.message;
    match (m.sender, m.recipient, m.channel) {
        (_, _, Channel::Internal) => (1, "[GM|GM]".into()),
        (Role::Gm, Role::PlayerA, _) => (0, "[A<GM]".into()),
        (Role::PlayerA, _, _) => (0, "[A>GM]".into()),
        (Role::Gm, Role::PlayerB, _) => (2, "[GM>B]".into()),
        (Role::PlayerB, _, _) => (2, "[GM<B]".into()),
        (s, r, _) => (1, format!("[{s}>{r}]")),
    }
}

/// Plain-text transcript: player A's traffic on the left, GM notes in the
/// middle, player B's traffic on the right.
pub fn render_transcript(record: &InteractionRecord) -> String {
    let meta = &record.meta;
    let mut out = format!("{} / {} / instance {}\n", meta.game, meta.experiment, meta.instance_id);
    for (role, who) in &meta.players {
        out.push_str(&format!("  {role}: {who}\n"));
    }
    out.push_str(&format!("  outcome: {:?} at turn {}\n\n", record.outcome.status, record.outcome.final_turn));
    let mut turn = 0;
    for e in &record.events {
        if e.message.turn != turn {
            turn = e.message.turn;
            out.push_str(&format!("{:-^width$}\n", format!(" turn {turn} "), width = LANE * 3));
        }
        let (lane, tag) = lane_tag(e);
        let pad = " ".repeat(lane * LANE);
        let aside = if e.aside { " (aside)" } else { "" };
        out.push_str(&format!("{pad}{tag}{aside}\n"));
        for line in e.message.text.lines() {
            out.push_str(&format!("{pad}  {line}\n"));
        }
        if let Some(MoveVerdict::Violation { class, detail, .. }) = &e.annotation {
            out.push_str(&format!("{pad}  !! {class}: {detail}\n"));
        }
    }
    out
}
