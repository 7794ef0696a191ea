//! Seeded generation of every instance file from the raw resources.
//!
//! Output is a pure function of the resource directory and the seed.

pub mod rng;

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

use crate::games::drawing::grid::{Grid, EMPTY};
use crate::games::drawing::{DrawingInstance, GridKind};
use crate::games::privateshared::{probe_phrasings, Domain, Probe, PsInstance, Slot};
use crate::games::reference::{EditClass, ReferenceInstance};
use crate::games::registry::{AnyInstance, Experiment, InstanceFile};
use crate::games::taboo::TabooInstance;
use crate::games::wordle::{Variant, WordleInstance};
use crate::games::GameKind;
pub use rng::GenRng;

pub const DEFAULT_SEED: u64 = 42;
/// Occurrences per million tokens below which a word is too rare for taboo.
pub const TABOO_MIN_FREQUENCY: f64 = 5.0;
pub const TABOO_LEVELS: [&str; 3] = ["low", "medium", "high"];
pub const WORDLE_GROUPS: [&str; 3] = ["high_frequency_words", "medium_frequency_words", "low_frequency_words"];
pub const PER_EXPERIMENT: usize = 10;
pub const DRAWING_PER_KIND: usize = 20;
pub const REFERENCE_PER_CLASS: usize = 18;

#[derive(Debug, Error)]
pub enum GenError {
    #[error("resource {0} is empty")]
    ResourceEmpty(String),
    #[error("level {level} has only {have} usable words")]
    InsufficientWords { level: String, have: usize },
    #[error("resource mismatch: {0}")]
    ResourceMismatch(String),
    #[error("bad curated file {path}: {reason}")]
    BadCuratedFile { path: String, reason: String },
    #[error("target {0} cannot yield two distinct distractors")]
    DegenerateTarget(String),
    #[error("no values for {domain}/{slot}")]
    EmptyValuePool { domain: String, slot: String },
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

fn read(path: &Path) -> Result<String, GenError> {
    fs::read_to_string(path).map_err(|source| GenError::Io { path: path.display().to_string(), source })
}

/// Word to occurrences per million tokens.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FrequencyTable {
    pub entries: BTreeMap<String, f64>,
}

impl FrequencyTable {
    pub fn parse_tsv(text: &str) -> FrequencyTable {
        let mut entries = BTreeMap::new();
        for line in text.lines() {
            let mut parts = line.split('\t');
            let (Some(w), Some(f)) = (parts.next(), parts.next()) else { continue };
            if let Ok(f) = f.trim().parse::<f64>() {
                entries.entry(w.trim().to_lowercase()).or_insert(f);
            }
        }
        FrequencyTable { entries }
    }

    pub fn load(path: &Path) -> Result<FrequencyTable, GenError> {
        Ok(Self::parse_tsv(&read(path)?))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TabooBins {
    /// Ascending by frequency: low, medium, high.
    pub bins: [Vec<String>; 3],
    /// Highest frequency in each bin.
    pub upper: [f64; 3],
}

pub fn taboo_frequency_bins(table: &FrequencyTable) -> Result<TabooBins, GenError> {
    let mut kept: Vec<(&String, f64)> =
        table.entries.iter().map(|(w, f)| (w, *f)).filter(|(_, f)| *f >= TABOO_MIN_FREQUENCY).collect();
    if kept.len() < 3 {
        return Err(GenError::ResourceEmpty("taboo frequency table".into()));
    }
    kept.sort_by(|a, b| a.1.total_cmp(&b.1).then_with(|| a.0.cmp(b.0)));
    let third = kept.len() / 3;
    let cuts = [0, third, 2 * third, kept.len()];
    let bin = |i: usize| kept[cuts[i]..cuts[i + 1]].iter().map(|(w, _)| (*w).clone()).collect::<Vec<_>>();
    let upper = |i: usize| kept[cuts[i + 1] - 1].1;
    Ok(TabooBins { bins: [bin(0), bin(1), bin(2)], upper: [upper(0), upper(1), upper(2)] })
}

/// `word<TAB>rel1|rel2|...`
pub fn parse_related(text: &str) -> HashMap<String, Vec<String>> {
    text.lines()
        .filter_map(|l| l.split_once('\t'))
        .map(|(w, rel)| {
            let rel = rel.split('|').map(|r| r.trim().to_lowercase()).filter(|r| !r.is_empty()).collect();
            (w.trim().to_lowercase(), rel)
        })
        .collect()
}

/// One word per line; `#` starts a comment.
pub fn parse_word_set(text: &str) -> HashSet<String> {
    text.lines().map(|l| l.split('#').next().unwrap_or("").trim().to_lowercase()).filter(|l| !l.is_empty()).collect()
}

pub fn generate_taboo(
    bins: &TabooBins,
    related: &HashMap<String, Vec<String>>,
    exclusions: &HashSet<String>,
    rng: &mut GenRng,
) -> Result<Vec<Experiment>, GenError> {
    let mut experiments = Vec::new();
    for (level, words) in TABOO_LEVELS.iter().zip(&bins.bins) {
        let mut order: Vec<&String> = words.iter().collect();
        rng.shuffle(&mut order);
        let picked: Vec<&String> = order
            .into_iter()
            .filter(|w| !exclusions.contains(*w) && related.get(*w).is_some_and(|r| !r.is_empty()))
            .take(PER_EXPERIMENT)
            .collect();
        if picked.len() < PER_EXPERIMENT {
            return Err(GenError::InsufficientWords { level: level.to_string(), have: picked.len() });
        }
        let instances = picked
            .into_iter()
            .enumerate()
            .map(|(i, w)| {
                AnyInstance::Taboo(TabooInstance {
                    id: i as u32,
                    target: w.clone(),
                    related: related[w].clone(),
                    max_guesses: 3,
                    level: level.to_string(),
                })
            })
            .collect();
        experiments.push(Experiment { name: level.to_string(), instances });
    }
    Ok(experiments)
}

/// Reads the `answer,clue` CSV.
pub fn parse_clues(text: &str) -> Result<HashMap<String, String>, GenError> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let mut out = HashMap::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| GenError::ResourceMismatch(format!("clue file: {e}")))?;
        if let (Some(w), Some(c)) = (rec.get(0), rec.get(1)) {
            out.insert(w.trim().to_lowercase(), c.trim().to_string());
        }
    }
    Ok(out)
}

/// Targets with both a frequency and a clue, split by descending frequency
/// into three groups (remainder to the last).
pub fn wordle_groups(
    targets: &[String],
    freqs: &FrequencyTable,
    clues: &HashMap<String, String>,
) -> Result<[Vec<String>; 3], GenError> {
    let mut cands: Vec<(&String, f64)> = targets
        .iter()
        .filter(|w| clues.contains_key(*w))
        .filter_map(|w| freqs.entries.get(w).map(|f| (w, *f)))
        .collect();
    if cands.len() < 3 * PER_EXPERIMENT {
        return Err(GenError::ResourceMismatch(format!("only {} wordle targets have frequency and clue", cands.len())));
    }
    cands.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    let third = cands.len() / 3;
    let cuts = [0, third, 2 * third, cands.len()];
    let group = |i: usize| cands[cuts[i]..cuts[i + 1]].iter().map(|(w, _)| (*w).clone()).collect();
    Ok([group(0), group(1), group(2)])
}

/// The same 30 targets for all three variants; only the clue differs.
pub fn generate_wordle(
    groups: &[Vec<String>; 3],
    clues: &HashMap<String, String>,
    rng: &mut GenRng,
) -> [Vec<Experiment>; 3] {
    let picks: Vec<Vec<&String>> =
        groups.iter().map(|g| rng.sample(g.len(), PER_EXPERIMENT).into_iter().map(|i| &g[i]).collect()).collect();
    [Variant::Basic, Variant::Clue, Variant::ClueCritic].map(|variant| {
        WORDLE_GROUPS
            .iter()
            .zip(&picks)
            .map(|(name, words)| Experiment {
                name: name.to_string(),
                instances: words
                    .iter()
                    .enumerate()
                    .map(|(i, w)| {
                        AnyInstance::Wordle(WordleInstance {
                            id: i as u32,
                            target: (*w).clone(),
                            clue: (variant != Variant::Basic).then(|| clues[*w].clone()),
                            variant,
                            frequency_group: name.to_string(),
                        })
                    })
                    .collect(),
            })
            .collect()
    })
}

/// A hand-drawn grid: five strings of five characters, `.` for empty.
#[derive(Debug, Clone, Deserialize)]
pub struct CuratedGrid {
    pub name: String,
    pub rows: Vec<String>,
}

impl CuratedGrid {
    pub fn grid(&self) -> Result<Grid, String> {
        let text: Vec<String> = self
            .rows
            .iter()
            .map(|r| {
                r.chars()
                    .map(|c| if c == '.' { EMPTY.to_string() } else { c.to_string() })
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect();
        text.join("\n").parse::<Grid>().map_err(|e| format!("{}: {e}", self.name))
    }
}

fn curated_grids(list: &[CuratedGrid], path: &str) -> Result<Vec<Grid>, GenError> {
    list.iter().map(|c| c.grid().map_err(|reason| GenError::BadCuratedFile { path: path.into(), reason })).collect()
}

pub fn random_drawing_grid(rng: &mut GenRng) -> Grid {
    let k = rng.between(5, 10);
    let letter = (b'A' + rng.below(26) as u8) as char;
    let mut g = Grid::empty();
    for cell in rng.sample(25, k) {
        g.set(cell / 5, cell % 5, letter);
    }
    g
}

pub fn generate_drawing(compact: &[Grid], rng: &mut GenRng) -> Result<Vec<Experiment>, GenError> {
    if compact.len() != DRAWING_PER_KIND {
        return Err(GenError::BadCuratedFile {
            path: "drawing/compact.json".into(),
            reason: format!("expected {DRAWING_PER_KIND} grids, found {}", compact.len()),
        });
    }
    let make = |kind: GridKind, grids: Vec<Grid>| Experiment {
        name: kind.experiment().into(),
        instances: grids
            .into_iter()
            .enumerate()
            .map(|(i, target)| AnyInstance::Drawing(DrawingInstance { id: i as u32, target, kind }))
            .collect(),
    };
    let random = (0..DRAWING_PER_KIND).map(|_| random_drawing_grid(rng)).collect();
    Ok(vec![make(GridKind::Compact, compact.to_vec()), make(GridKind::Random, random)])
}

/// Empties `d` distinct filled cells of `target`.
pub fn remove_cells(target: &Grid, d: usize, rng: &mut GenRng) -> Option<Grid> {
    let filled = target.filled();
    if filled.len() < d {
        return None;
    }
    let mut g = *target;
    for i in rng.sample(filled.len(), d) {
        let (r, c, _) = filled[i];
        g.set(r, c, EMPTY);
    }
    Some(g)
}

fn edits_for(class: EditClass, rng: &mut GenRng) -> usize {
    match class {
        EditClass::Two => rng.between(1, 2),
        EditClass::Four => 4,
    }
}

pub fn reference_instance(
    id: u32,
    name: &str,
    target: Grid,
    class: EditClass,
    rng: &mut GenRng,
) -> Result<ReferenceInstance, GenError> {
    let degenerate = || GenError::DegenerateTarget(name.to_string());
    let mut distractors: Vec<Grid> = Vec::new();
    let mut tries = 0;
    while distractors.len() < 2 {
        tries += 1;
        if tries > 200 {
            return Err(degenerate());
        }
        let d = edits_for(class, rng);
        let g = remove_cells(&target, d, rng).ok_or_else(degenerate)?;
        if g != target && !distractors.contains(&g) {
            distractors.push(g);
        }
    }
    let mut b_order = [0, 1, 2];
    rng.shuffle(&mut b_order);
    Ok(ReferenceInstance { id, target, distractors: [distractors[0], distractors[1]], b_order, edit_class: class })
}

#[derive(Debug, Clone, Deserialize)]
pub struct ReferenceTargets {
    pub edit_distance_two: Vec<CuratedGrid>,
    pub edit_distance_four: Vec<CuratedGrid>,
}

pub fn generate_reference(targets: &ReferenceTargets, rng: &mut GenRng) -> Result<Vec<Experiment>, GenError> {
    let path = "reference/targets.json";
    let mut out = Vec::new();
    for (class, list) in [(EditClass::Two, &targets.edit_distance_two), (EditClass::Four, &targets.edit_distance_four)]
    {
        if list.len() != REFERENCE_PER_CLASS {
            return Err(GenError::BadCuratedFile {
                path: path.into(),
                reason: format!("{}: expected {REFERENCE_PER_CLASS} targets, found {}", class.experiment(), list.len()),
            });
        }
        let grids = curated_grids(list, path)?;
        let mut instances = Vec::new();
        for (i, (c, g)) in list.iter().zip(grids).enumerate() {
            instances.push(AnyInstance::Reference(reference_instance(i as u32, &c.name, g, class, rng)?));
        }
        out.push(Experiment { name: class.experiment().into(), instances });
    }
    Ok(out)
}

/// Domain name to slot name to candidate values.
pub type ValuePools = BTreeMap<String, BTreeMap<String, Vec<String>>>;

pub fn privateshared_instance(
    id: u32,
    domain: Domain,
    pools: &ValuePools,
    rng: &mut GenRng,
) -> Result<PsInstance, GenError> {
    let names = domain.slot_names();
    let mut slots = Vec::new();
    for name in names {
        let pool = pools
            .get(domain.experiment())
            .and_then(|d| d.get(name))
            .filter(|p| !p.is_empty())
            .ok_or_else(|| GenError::EmptyValuePool { domain: domain.experiment().into(), slot: name.into() })?;
        slots.push(Slot { name: name.into(), value: rng.choose(pool).clone() });
    }
    let mut question_order: Vec<String> = names.iter().map(|s| s.to_string()).collect();
    rng.shuffle(&mut question_order);
    let probe_rounds = (0..=names.len())
        .map(|_| {
            let mut round: Vec<&str> = names.to_vec();
            rng.shuffle(&mut round);
            round
                .into_iter()
                .map(|slot| Probe {
                    slot: slot.into(),
                    question: rng.choose(probe_phrasings(domain, slot)).to_string(),
                })
                .collect()
        })
        .collect();
    Ok(PsInstance { id, domain, slots, question_order, probe_rounds })
}

pub fn generate_privateshared(pools: &ValuePools, rng: &mut GenRng) -> Result<Vec<Experiment>, GenError> {
    [Domain::Travel, Domain::Job]
        .into_iter()
        .map(|domain| {
            let instances = (0..PER_EXPERIMENT as u32)
                .map(|i| privateshared_instance(i, domain, pools, rng).map(AnyInstance::PrivateShared))
                .collect::<Result<_, _>>()?;
            Ok(Experiment { name: domain.experiment().into(), instances })
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct GenerationConfig {
    pub seed: u64,
    pub resources: PathBuf,
}

impl GenerationConfig {
    pub fn new(resources: impl Into<PathBuf>) -> GenerationConfig {
        GenerationConfig { seed: DEFAULT_SEED, resources: resources.into() }
    }
}

fn json_file<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, GenError> {
    serde_json::from_str(&read(path)?)
        .map_err(|e| GenError::BadCuratedFile { path: path.display().to_string(), reason: e.to_string() })
}

/// Diagnostics that are useful to print next to the generated files.
#[derive(Debug, Clone, PartialEq)]
pub struct GenerationReport {
    pub taboo_bin_upper: [f64; 3],
    pub wordle_candidates: usize,
    pub wordle_group_sizes: [usize; 3],
}

/// All seven instance files, in results-table column order.
pub fn generate_all(cfg: &GenerationConfig) -> Result<(Vec<InstanceFile>, GenerationReport), GenError> {
    let res = &cfg.resources;
    let seed = cfg.seed;

    let bins = taboo_frequency_bins(&FrequencyTable::load(&res.join("taboo/frequencies.tsv"))?)?;
    let related = parse_related(&read(&res.join("taboo/related_words.tsv"))?);
    let exclusions = parse_word_set(&read(&res.join("taboo/exclusions.txt"))?);
    let taboo = generate_taboo(&bins, &related, &exclusions, &mut GenRng::new(seed, 0))?;

    let mut targets: Vec<String> = parse_word_set(&read(&res.join("wordle/possible_words.txt"))?).into_iter().collect();
    targets.sort();
    let freqs = FrequencyTable::load(&res.join("wordle/frequencies.tsv"))?;
    let clues = parse_clues(&read(&res.join("wordle/clues.csv"))?)?;
    let groups = wordle_groups(&targets, &freqs, &clues)?;
    let [basic, clue, critic] = generate_wordle(&groups, &clues, &mut GenRng::new(seed, 1));

    let compact: Vec<CuratedGrid> = json_file(&res.join("drawing/compact.json"))?;
    let drawing = generate_drawing(&curated_grids(&compact, "drawing/compact.json")?, &mut GenRng::new(seed, 2))?;

    let refs: ReferenceTargets = json_file(&res.join("reference/targets.json"))?;
    let reference = generate_reference(&refs, &mut GenRng::new(seed, 3))?;

    let pools: ValuePools = json_file(&res.join("privateshared/values.json"))?;
    let ps = generate_privateshared(&pools, &mut GenRng::new(seed, 4))?;

    let file = |game, experiments| InstanceFile { game, experiments };
    let files = vec![
        file(GameKind::Drawing, drawing),
        file(GameKind::PrivateShared, ps),
        file(GameKind::Reference, reference),
        file(GameKind::Taboo, taboo),
        file(GameKind::Wordle, basic),
        file(GameKind::WordleClue, clue),
        file(GameKind::WordleCritic, critic),
    ];
    let report = GenerationReport {
        taboo_bin_upper: bins.upper,
        wordle_candidates: groups.iter().map(Vec::len).sum(),
        wordle_group_sizes: [groups[0].len(), groups[1].len(), groups[2].len()],
    };
    Ok((files, report))
}

pub fn render_instance_file(file: &InstanceFile) -> String {
    let mut s = serde_json::to_string_pretty(file).expect("instance files serialize");
    s.push('\n');
    s
}

/// Writes `<out>/<game>/instances.json` for each file; returns the paths.
pub fn write_all(files: &[InstanceFile], out: &Path) -> Result<Vec<PathBuf>, GenError> {
    let mut paths = Vec::new();
    for f in files {
        let path = InstanceFile::path_in(out, f.game);
        let io = |source| GenError::Io { path: path.display().to_string(), source };
        fs::create_dir_all(path.parent().expect("has parent")).map_err(io)?;
        fs::write(&path, render_instance_file(f)).map_err(io)?;
        paths.push(path);
    }
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn resources() -> PathBuf {
        Path::new(env!("CARGO_MANIFEST_DIR")).join("../../resources")
    }

    fn table(pairs: &[(&str, f64)]) -> FrequencyTable {
        FrequencyTable { entries: pairs.iter().map(|(w, f)| (w.to_string(), *f)).collect() }
    }

    #[test]
    fn three_words_one_per_bin() {
        let b = taboo_frequency_bins(&table(&[("c", 30.0), ("a", 6.0), ("b", 10.0), ("rare", 1.0)])).unwrap();
        assert_eq!(b.bins, [vec!["a".to_string()], vec!["b".to_string()], vec!["c".to_string()]]);
        assert_eq!(b.upper, [6.0, 10.0, 30.0]);
    }

    #[test]
    fn remainder_goes_to_last_bin() {
        let t: Vec<(String, f64)> = (0..11).map(|i| (format!("w{i:02}"), 5.0 + i as f64)).collect();
        let t = FrequencyTable { entries: t.into_iter().collect() };
        let b = taboo_frequency_bins(&t).unwrap();
        assert_eq!(b.bins.each_ref().map(Vec::len), [3, 3, 5]);
    }

    #[test]
    fn empty_table_is_rejected() {
        assert!(matches!(taboo_frequency_bins(&table(&[("x", 1.0)])), Err(GenError::ResourceEmpty(_))));
    }

    #[test]
    fn excluded_words_are_skipped_deterministically() {
        let words: Vec<String> = (0..40).map(|i| format!("w{i:02}")).collect();
        let bins = TabooBins { bins: [words.clone(), words.clone(), words.clone()], upper: [0.0; 3] };
        let related: HashMap<_, _> = words.iter().map(|w| (w.clone(), vec!["r".to_string()])).collect();
        let first = generate_taboo(&bins, &related, &HashSet::new(), &mut GenRng::new(1, 0)).unwrap();
        let AnyInstance::Taboo(dropped) = &first[0].instances[0] else { panic!() };
        let excl: HashSet<String> = [dropped.target.clone()].into();
        let a = generate_taboo(&bins, &related, &excl, &mut GenRng::new(1, 0)).unwrap();
        let b = generate_taboo(&bins, &related, &excl, &mut GenRng::new(1, 0)).unwrap();
        assert_eq!(a, b);
        assert!(a[0].instances.iter().all(|i| matches!(i, AnyInstance::Taboo(t) if t.target != dropped.target)));
    }

    #[test]
    fn too_few_words_is_an_error() {
        let words: Vec<String> = (0..5).map(|i| format!("w{i}")).collect();
        let bins = TabooBins { bins: [words.clone(), words.clone(), words.clone()], upper: [0.0; 3] };
        let related: HashMap<_, _> = words.iter().map(|w| (w.clone(), vec!["r".to_string()])).collect();
        let err = generate_taboo(&bins, &related, &HashSet::new(), &mut GenRng::new(1, 0)).unwrap_err();
        assert!(matches!(err, GenError::InsufficientWords { have: 5, .. }));
    }

    #[test]
    fn every_target_with_a_clue_but_one_missing_frequency() {
        let targets: Vec<String> =
            parse_word_set(&read(&resources().join("wordle/possible_words.txt")).unwrap()).into_iter().collect();
        let freqs = FrequencyTable::load(&resources().join("wordle/frequencies.tsv")).unwrap();
        let all_clued: HashMap<String, String> = targets.iter().map(|w| (w.clone(), "c".to_string())).collect();
        let g = wordle_groups(&targets, &freqs, &all_clued).unwrap();
        let missing = targets.iter().filter(|w| !freqs.entries.contains_key(*w)).count();
        assert_eq!(missing, 1);
        assert_eq!(g.iter().map(Vec::len).sum::<usize>(), targets.len() - missing);
    }

    #[test]
    fn random_grids_respect_bounds() {
        let mut rng = GenRng::new(5, 0);
        for _ in 0..500 {
            let g = random_drawing_grid(&mut rng);
            let f = g.filled();
            assert!((5..=10).contains(&f.len()));
            assert!(f.iter().all(|(_, _, c)| *c == f[0].2));
        }
    }

    #[test]
    fn cross_is_loaded_verbatim() {
        let compact: Vec<CuratedGrid> = json_file(&resources().join("drawing/compact.json")).unwrap();
        let cross = compact.iter().find(|c| c.name == "cross").unwrap().grid().unwrap();
        assert_eq!(cross.render(), "▢ ▢ M ▢ ▢\n▢ ▢ M ▢ ▢\nM M M M M\n▢ ▢ M ▢ ▢\n▢ ▢ M ▢ ▢");
    }

    #[test]
    fn four_removals_from_five_cells_leave_one() {
        let t = CuratedGrid {
            name: "t".into(),
            rows: vec!["X...X".into(), ".X.X.".into(), "..X..".into(), ".....".into(), ".....".into()],
        };
        let inst = reference_instance(0, "t", t.grid().unwrap(), EditClass::Four, &mut GenRng::new(3, 0)).unwrap();
        assert!(inst.distractors.iter().all(|d| d.filled_count() == 1));
    }

    #[test]
    fn too_small_target_is_degenerate() {
        let t = CuratedGrid {
            name: "t".into(),
            rows: vec!["XX...".into(), ".....".into(), ".....".into(), ".....".into(), ".....".into()],
        };
        let err = reference_instance(0, "t", t.grid().unwrap(), EditClass::Four, &mut GenRng::new(3, 0)).unwrap_err();
        assert!(matches!(err, GenError::DegenerateTarget(_)));
    }

    #[test]
    fn bad_curated_row_is_reported() {
        let t = CuratedGrid { name: "bad".into(), rows: vec!["xx".into()] };
        assert!(t.grid().is_err());
    }

    #[test]
    fn missing_pool_is_reported() {
        let err = privateshared_instance(0, Domain::Travel, &ValuePools::new(), &mut GenRng::new(0, 0)).unwrap_err();
        assert!(matches!(err, GenError::EmptyValuePool { .. }));
    }

    #[test]
    fn full_generation_validates_and_repeats() {
        let cfg = GenerationConfig::new(resources());
        let (files, report) = generate_all(&cfg).unwrap();
        assert_eq!(report.wordle_group_sizes, [756, 756, 757]);
        for f in &files {
            let text = render_instance_file(f);
            let back = InstanceFile::parse(&text, "generated").unwrap();
            assert_eq!(&back, f);
        }
        let counts: Vec<usize> = files.iter().map(InstanceFile::len).collect();
        assert_eq!(counts, [40, 20, 36, 30, 30, 30, 30]);
        let (again, _) = generate_all(&cfg).unwrap();
        assert_eq!(
            files.iter().map(render_instance_file).collect::<Vec<_>>(),
            again.iter().map(render_instance_file).collect::<Vec<_>>()
        );
    }

    #[test]
    fn reference_distractors_only_remove_cells() {
        let cfg = GenerationConfig::new(resources());
        let (files, _) = generate_all(&cfg).unwrap();
        let refs = files.iter().find(|f| f.game == GameKind::Reference).unwrap();
        for e in &refs.experiments {
            for i in &e.instances {
                let AnyInstance::Reference(r) = i else { panic!() };
                for d in &r.distractors {
                    let removed = r.target.filled_count() - d.filled_count();
                    match r.edit_class {
                        EditClass::Two => assert!((1..=2).contains(&removed)),
                        EditClass::Four => assert_eq!(removed, 4),
                    }
                    assert!(d.filled().iter().all(|(row, col, ch)| r.target.get(*row, *col) == *ch));
                }
            }
        }
    }
}
