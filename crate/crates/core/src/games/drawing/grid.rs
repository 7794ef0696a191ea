use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub const SIZE: usize = 5;
pub const EMPTY: char = '▢';

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GridError {
    #[error("expected 5 rows, found {0}")]
    RowCount(usize),
    #[error("row {row} has {found} cells")]
    RowWidth { row: usize, found: usize },
    #[error("bad cell `{0}`")]
    BadCell(String),
    #[error("no 5x5 grid found in the response")]
    NotFound,
}

/// A 5x5 board of uppercase letters and empty cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Grid {
    cells: [[char; SIZE]; SIZE],
}

impl Default for Grid {
    fn default() -> Self {
        Grid::empty()
    }
}

fn cell(token: &str) -> Option<char> {
    let mut it = token.chars();
    let c = it.next()?;
    if it.next().is_some() {
        return None;
    }
    (c == EMPTY || c.is_ascii_uppercase()).then_some(c)
}

fn row(line: &str) -> Option<[char; SIZE]> {
    let toks: Vec<&str> = line.split_whitespace().collect();
    if toks.len() != SIZE {
        return None;
    }
    let mut out = [EMPTY; SIZE];
    for (i, t) in toks.iter().enumerate() {
        out[i] = cell(t)?;
    }
    Some(out)
}

impl Grid {
    pub fn empty() -> Self {
        Grid { cells: [[EMPTY; SIZE]; SIZE] }
    }

    pub fn get(&self, r: usize, c: usize) -> char {
        self.cells[r][c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: char) {
        assert!(v == EMPTY || v.is_ascii_uppercase(), "cell value {v:?}");
        self.cells[r][c] = v;
    }

    pub fn is_filled(&self, r: usize, c: usize) -> bool {
        self.cells[r][c] != EMPTY
    }

    /// Filled positions in row-major order.
    pub fn filled(&self) -> Vec<(usize, usize, char)> {
        let mut v = Vec::new();
        for r in 0..SIZE {
            for c in 0..SIZE {
                if self.is_filled(r, c) {
                    v.push((r, c, self.cells[r][c]));
                }
            }
        }
        v
    }

    pub fn filled_count(&self) -> usize {
        self.cells.iter().flatten().filter(|c| **c != EMPTY).count()
    }

    pub fn render(&self) -> String {
        self.cells
            .iter()
            .map(|r| r.iter().map(char::to_string).collect::<Vec<_>>().join(" "))
            .collect::<Vec<_>>()
            .join("\n")
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Strict form: exactly five lines of five cells.
impl FromStr for Grid {
    type Err = GridError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lines: Vec<&str> = s.trim().lines().collect();
        if lines.len() != SIZE {
            return Err(GridError::RowCount(lines.len()));
        }
        let mut cells = [[EMPTY; SIZE]; SIZE];
        for (r, line) in lines.iter().enumerate() {
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != SIZE {
                return Err(GridError::RowWidth { row: r, found: toks.len() });
            }
            for (c, t) in toks.iter().enumerate() {
                cells[r][c] = cell(t).ok_or_else(|| GridError::BadCell(t.to_string()))?;
            }
        }
        Ok(Grid { cells })
    }
}

impl Serialize for Grid {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.render())
    }
}

impl<'de> Deserialize<'de> for Grid {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Finds the last run of five consecutive grid rows in free text. A leading
/// `OUTPUT:` on a row is ignored.
pub fn parse_grid(text: &str) -> Result<Grid, GridError> {
    let rows: Vec<Option<[char; SIZE]>> = text
        .lines()
        .map(|l| {
            let l = l.trim();
            let l = crate::games::strip_leading_tag(l, "OUTPUT:").unwrap_or(l);
            row(l)
        })
        .collect();
    let mut found = None;
    let mut run = 0;
    for (i, r) in rows.iter().enumerate() {
        run = if r.is_some() { run + 1 } else { 0 };
        if run >= SIZE {
            found = Some(i + 1 - SIZE);
        }
    }
    let start = found.ok_or(GridError::NotFound)?;
    let mut cells = [[EMPTY; SIZE]; SIZE];
    for k in 0..SIZE {
        cells[k] = rows[start + k].expect("run rows parsed");
    }
    Ok(Grid { cells })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridComparison {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

fn ratio(tp: usize, denom: usize, other_empty: bool) -> f64 {
    if denom == 0 {
        if other_empty {
            100.0
        } else {
            0.0
        }
    } else {
        100.0 * tp as f64 / denom as f64
    }
}

/// A drawn cell counts only when the target has the same letter there.
pub fn compare_grids(target: &Grid, drawn: &Grid) -> GridComparison {
    let mut tp = 0;
    for r in 0..SIZE {
        for c in 0..SIZE {
            if drawn.is_filled(r, c) && drawn.get(r, c) == target.get(r, c) {
                tp += 1;
            }
        }
    }
    let (nt, nd) = (target.filled_count(), drawn.filled_count());
    let precision = ratio(tp, nd, nt == 0);
    let recall = ratio(tp, nt, nd == 0);
    let f1 = if precision + recall == 0.0 { 0.0 } else { 2.0 * precision * recall / (precision + recall) };
    GridComparison { precision, recall, f1 }
}

pub fn changed_cells(prev: &Grid, next: &Grid) -> usize {
    (0..SIZE).flat_map(|r| (0..SIZE).map(move |c| (r, c))).filter(|&(r, c)| prev.get(r, c) != next.get(r, c)).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn g(s: &str) -> Grid {
        s.parse().unwrap()
    }

    #[test]
    fn render_is_space_and_newline_separated() {
        let mut grid = Grid::empty();
        grid.set(0, 4, 'T');
        assert_eq!(grid.render().lines().next().unwrap(), "▢ ▢ ▢ ▢ T");
        assert_eq!(grid.render().lines().count(), 5);
        assert_eq!(g(&grid.render()), grid);
    }

    #[test]
    fn parse_grid_skips_prose() {
        let text = "OUTPUT:\n▢ ▢ ▢ ▢ ▢\n▢ ▢ ▢ ▢ ▢\n▢ ▢ ▢ ▢ ▢\nL L L L L\n▢ ▢ ▢ ▢ ▢\nHope this helps.";
        let grid = parse_grid(text).unwrap();
        assert_eq!(grid.filled_count(), 5);
        assert_eq!(grid.get(3, 0), 'L');
    }

    #[test]
    fn parse_grid_prefix_on_first_row() {
        let grid = parse_grid("OUTPUT: X ▢ ▢ ▢ ▢\n▢ ▢ ▢ ▢ ▢\n▢ ▢ ▢ ▢ ▢\n▢ ▢ ▢ ▢ ▢\n▢ ▢ ▢ ▢ ▢").unwrap();
        assert_eq!(grid.get(0, 0), 'X');
    }

    #[test]
    fn parse_grid_takes_last_block() {
        let a = "X ▢ ▢ ▢ ▢\n▢ ▢ ▢ ▢ ▢\n▢ ▢ ▢ ▢ ▢\n▢ ▢ ▢ ▢ ▢\n▢ ▢ ▢ ▢ ▢";
        let b = "▢ ▢ ▢ ▢ Y\n▢ ▢ ▢ ▢ ▢\n▢ ▢ ▢ ▢ ▢\n▢ ▢ ▢ ▢ ▢\n▢ ▢ ▢ ▢ ▢";
        assert_eq!(parse_grid(&format!("before\n{a}\n\nafter\n{b}")).unwrap(), g(b));
    }

    #[test]
    fn fragments_are_rejected() {
        assert_eq!(parse_grid("▢ ▢ ▢ ▢ ▢\n▢ ▢ ▢ ▢ ▢\n▢ ▢ ▢ ▢ ▢\n▢ ▢ ▢ ▢ ▢"), Err(GridError::NotFound));
        assert!(parse_grid("x ▢ ▢ ▢ ▢\n▢ ▢ ▢ ▢ ▢\n▢ ▢ ▢ ▢ ▢\n▢ ▢ ▢ ▢ ▢\n▢ ▢ ▢ ▢ ▢").is_err());
    }

    #[test]
    fn empty_versus_empty_is_perfect() {
        let c = compare_grids(&Grid::empty(), &Grid::empty());
        assert_eq!((c.precision, c.recall, c.f1), (100.0, 100.0, 100.0));
    }

    #[test]
    fn empty_drawing_against_filled_target() {
        let mut t = Grid::empty();
        t.set(1, 1, 'A');
        let c = compare_grids(&t, &Grid::empty());
        assert_eq!((c.precision, c.recall, c.f1), (0.0, 0.0, 0.0));
    }

    #[test]
    fn wrong_letter_is_not_a_match() {
        let mut t = Grid::empty();
        t.set(0, 0, 'A');
        let mut d = Grid::empty();
        d.set(0, 0, 'B');
        assert_eq!(compare_grids(&t, &d).f1, 0.0);
    }

    fn arb_grid() -> impl Strategy<Value = Grid> {
        proptest::collection::vec(prop_oneof![3 => Just(EMPTY), 1 => Just('A'), 1 => Just('B')], 25).prop_map(|v| {
            let mut grid = Grid::empty();
            for (i, ch) in v.into_iter().enumerate() {
                grid.set(i / 5, i % 5, ch);
            }
            grid
        })
    }

    proptest! {
        #[test]
        fn self_comparison_is_perfect(grid in arb_grid()) {
            prop_assume!(grid.filled_count() > 0);
            let c = compare_grids(&grid, &grid);
            prop_assert_eq!((c.precision, c.recall, c.f1), (100.0, 100.0, 100.0));
        }

        #[test]
        fn swapping_swaps_precision_and_recall(a in arb_grid(), b in arb_grid()) {
            let (x, y) = (compare_grids(&a, &b), compare_grids(&b, &a));
            prop_assert_eq!(x.precision, y.recall);
            prop_assert_eq!(x.recall, y.precision);
        }

        #[test]
        fn changed_cells_triangle(a in arb_grid(), b in arb_grid(), c in arb_grid()) {
            prop_assert!(changed_cells(&a, &c) <= changed_cells(&a, &b) + changed_cells(&b, &c));
        }

        #[test]
        fn render_round_trips(grid in arb_grid()) {
            prop_assert_eq!(parse_grid(&grid.render()).unwrap(), grid);
        }
    }
}
