//! Per-episode common scores and benchmark-level aggregation.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{InteractionRecord, Status};
use crate::games::registry::score_record;
use crate::games::{GameKind, GameScores};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricsError {
    #[error("cannot aggregate zero episodes")]
    EmptyInput,
    #[error("csv: {0}")]
    Csv(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CommonScores {
    pub aborted: u8,
    pub lose: u8,
    pub success: u8,
    pub request_count: u32,
    pub parsed_request_count: u32,
    pub violated_request_count: u32,
    pub request_success_ratio: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preferred_score: Option<f64>,
    /// Aborted because a player backend failed, not because of the player.
    #[serde(default)]
    pub backend_failure: bool,
}

pub fn common_scores_with(record: &InteractionRecord, game: &GameScores) -> CommonScores {
    let status = record.outcome.status;
    let r = record.requests;
    CommonScores {
        aborted: (status == Status::Aborted) as u8,
        lose: (status == Status::Lose) as u8,
        success: (status == Status::Success) as u8,
        request_count: r.request_count,
        parsed_request_count: r.parsed_request_count,
        violated_request_count: r.violated_request_count,
        request_success_ratio: if r.request_count == 0 {
            1.0
        } else {
            r.parsed_request_count as f64 / r.request_count as f64
        },
        preferred_score: if status == Status::Aborted { None } else { game.main() },
        backend_failure: record.backend_failure(),
    }
}

pub fn common_scores(record: &InteractionRecord) -> CommonScores {
    let game = score_record(record).unwrap_or_default();
    common_scores_with(record, &game)
}

/// Contents of `scores.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeScores {
    pub common: CommonScores,
    pub game: GameScores,
}

impl EpisodeScores {
    pub fn of(record: &InteractionRecord) -> EpisodeScores {
        let game = score_record(record).unwrap_or_default();
        EpisodeScores { common: common_scores_with(record, &game), game }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkCell {
    pub pct_played: f64,
    pub quality_mean: Option<f64>,
    pub quality_std: Option<f64>,
    pub n_episodes: usize,
}

/// Episodes lost to backend failures say nothing about the player and are
/// left out.
pub fn aggregate_game(episodes: &[CommonScores]) -> Result<BenchmarkCell, MetricsError> {
    let counted: Vec<&CommonScores> = episodes.iter().filter(|e| !e.backend_failure).collect();
    if counted.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    let n = counted.len();
    let aborted = counted.iter().filter(|e| e.aborted == 1).count();
    let quality: Vec<f64> = counted.iter().filter(|e| e.aborted == 0).filter_map(|e| e.preferred_score).collect();
    let (mean, std) = if quality.is_empty() {
        (None, None)
    } else {
        let m = quality.iter().sum::<f64>() / quality.len() as f64;
        let var = quality.iter().map(|q| (q - m).powi(2)).sum::<f64>() / quality.len() as f64;
        (Some(m), Some(var.sqrt()))
    };
    Ok(BenchmarkCell {
        pct_played: 100.0 * (1.0 - aborted as f64 / n as f64),
        quality_mean: mean,
        quality_std: std,
        n_episodes: n,
    })
}

/// Unweighted mean over games; games without quality are skipped for the
/// quality mean. No spread is reported for the average.
pub fn macro_average(cells: &BTreeMap<GameKind, BenchmarkCell>) -> BenchmarkCell {
    let n = cells.len().max(1) as f64;
    let pct = cells.values().map(|c| c.pct_played).sum::<f64>() / n;
    let q: Vec<f64> = cells.values().filter_map(|c| c.quality_mean).collect();
    BenchmarkCell {
        pct_played: pct,
        quality_mean: (!q.is_empty()).then(|| q.iter().sum::<f64>() / q.len() as f64),
        quality_std: None,
        n_episodes: cells.values().map(|c| c.n_episodes).sum(),
    }
}

/// Cells per pairing, keyed by game.
pub type ResultsTable = BTreeMap<String, BTreeMap<GameKind, BenchmarkCell>>;

pub fn fmt_pct(c: &BenchmarkCell) -> String {
    format!("{:.2}", c.pct_played)
}

pub fn fmt_quality(c: &BenchmarkCell) -> String {
    match (c.quality_mean, c.quality_std) {
        (Some(m), Some(s)) => format!("{m:.2} ({s:.2})"),
        (Some(m), None) => format!("{m:.2}"),
        _ => "/".into(),
    }
}

fn games_in(table: &ResultsTable) -> Vec<GameKind> {
    GameKind::ALL.into_iter().filter(|g| table.values().any(|row| row.contains_key(g))).collect()
}

/// Rows of rendered cells: header first, then two rows per pairing.
pub fn table_rows(table: &ResultsTable) -> Vec<Vec<String>> {
    let games = games_in(table);
    let mut header = vec!["pairing".to_string(), "metric".to_string(), "all".to_string()];
    header.extend(games.iter().map(|g| g.column().to_string()));
    let mut rows = vec![header];
    for (pairing, cells) in table {
        let all = macro_average(cells);
        let mut played = vec![pairing.clone(), "% played".into(), fmt_pct(&all)];
        let mut quality = vec![pairing.clone(), "qlty score".into(), fmt_quality(&all)];
        for g in &games {
            match cells.get(g) {
                Some(c) => {
                    played.push(fmt_pct(c));
                    quality.push(fmt_quality(c));
                }
                None => {
                    played.push("/".into());
                    quality.push("/".into());
                }
            }
        }
        rows.push(played);
        rows.push(quality);
    }
    rows
}

pub fn render_text(table: &ResultsTable) -> String {
    let rows = table_rows(table);
    let ncol = rows[0].len();
    let widths: Vec<usize> = (0..ncol).map(|i| rows.iter().map(|r| r[i].chars().count()).max().unwrap_or(0)).collect();
    let line = |r: &Vec<String>| {
        r.iter()
            .enumerate()
            .map(|(i, c)| format!("{c:<w$}", w = widths[i]))
            .collect::<Vec<_>>()
            .join(" | ")
            .trim_end()
            .to_string()
    };
    let mut out = String::new();
    out.push_str(&line(&rows[0]));
    out.push('\n');
    out.push_str(&widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().join("-+-"));
    out.push('\n');
    for r in &rows[1..] {
        out.push_str(&line(r));
        out.push('\n');
    }
    out
}

pub fn render_csv(table: &ResultsTable) -> Result<String, MetricsError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in table_rows(table) {
        w.write_record(&r).map_err(|e| MetricsError::Csv(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| MetricsError::Csv(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| MetricsError::Csv(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ep(aborted: bool, score: Option<f64>) -> CommonScores {
        CommonScores {
            aborted: aborted as u8,
            lose: 0,
            success: (!aborted) as u8,
            request_count: 1,
            parsed_request_count: (!aborted) as u32,
            violated_request_count: aborted as u32,
            request_success_ratio: 1.0,
            preferred_score: if aborted { None } else { score },
            backend_failure: false,
        }
    }

    #[test]
    fn seven_of_thirty_aborted() {
        let mut v: Vec<_> = (0..23).map(|_| ep(false, Some(50.0))).collect();
        v.extend((0..7).map(|_| ep(true, None)));
        let c = aggregate_game(&v).unwrap();
        assert!((c.pct_played - 76.67).abs() < 0.01);
    }

    #[test]
    fn all_aborted_renders_slash() {
        let c = aggregate_game(&[ep(true, None), ep(true, None)]).unwrap();
        assert_eq!(c.pct_played, 0.0);
        assert_eq!(fmt_quality(&c), "/");
    }

    #[test]
    fn constant_scores_have_zero_spread() {
        let c = aggregate_game(&[ep(false, Some(33.0)), ep(false, Some(33.0))]).unwrap();
        assert_eq!((c.quality_mean, c.quality_std), (Some(33.0), Some(0.0)));
    }

    #[test]
    fn population_std() {
        let c = aggregate_game(&[ep(false, Some(0.0)), ep(false, Some(100.0))]).unwrap();
        assert_eq!(c.quality_std, Some(50.0));
    }

    #[test]
    fn empty_is_an_error() {
        assert_eq!(aggregate_game(&[]), Err(MetricsError::EmptyInput));
    }

    #[test]
    fn backend_failures_are_left_out() {
        let mut failed = ep(true, None);
        failed.backend_failure = true;
        let c = aggregate_game(&[ep(false, Some(10.0)), failed]).unwrap();
        assert_eq!((c.pct_played, c.n_episodes), (100.0, 1));
    }

    #[test]
    fn macro_average_skips_absent_quality() {
        let mut cells = BTreeMap::new();
        cells.insert(GameKind::Taboo, aggregate_game(&[ep(false, Some(40.0))]).unwrap());
        cells.insert(GameKind::Drawing, aggregate_game(&[ep(true, None)]).unwrap());
        let all = macro_average(&cells);
        assert_eq!(all.pct_played, 50.0);
        assert_eq!(all.quality_mean, Some(40.0));
        let single: BTreeMap<_, _> = cells.iter().take(1).map(|(k, v)| (*k, *v)).collect();
        assert_eq!(macro_average(&single).pct_played, single.values().next().unwrap().pct_played);
    }

    #[test]
    fn taboo_only_table_has_two_value_columns() {
        let mut t = ResultsTable::new();
        t.entry("a--b".into()).or_default().insert(GameKind::Taboo, aggregate_game(&[ep(false, Some(50.0))]).unwrap());
        let rows = table_rows(&t);
        assert_eq!(rows[0][2..], ["all".to_string(), "taboo".to_string()]);
        let csv = render_csv(&t).unwrap();
        let mut rdr = csv::Reader::from_reader(csv.as_bytes());
        let back: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
        assert_eq!(back.len(), 2);
        assert_eq!(&back[1][3], "50.00 (0.00)");
        assert!(render_text(&t).contains("% played"));
    }

    proptest! {
        #[test]
        fn played_plus_aborted_is_one_hundred(flags in proptest::collection::vec(any::<bool>(), 1..50)) {
            let v: Vec<_> = flags.iter().map(|a| ep(*a, Some(1.0))).collect();
            let c = aggregate_game(&v).unwrap();
            let aborted = flags.iter().filter(|a| **a).count() as f64 / flags.len() as f64;
            prop_assert!((c.pct_played + 100.0 * aborted - 100.0).abs() < 1e-9);
        }

        #[test]
        fn permutation_invariant(scores in proptest::collection::vec(proptest::option::of(0.0f64..100.0), 1..30), seed in any::<u64>()) {
            let v: Vec<_> = scores.iter().map(|s| ep(s.is_none(), *s)).collect();
            let mut w = v.clone();
            let k = (seed as usize) % w.len();
            w.rotate_left(k);
            w.reverse();
            let (a, b) = (aggregate_game(&v).unwrap(), aggregate_game(&w).unwrap());
            prop_assert!((a.pct_played - b.pct_played).abs() < 1e-9);
            match (a.quality_mean, b.quality_mean) {
                (Some(x), Some(y)) => prop_assert!((x - y).abs() < 1e-9),
                (x, y) => prop_assert_eq!(x, y),
            }
        }
    }
}
