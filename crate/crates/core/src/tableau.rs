//! Coloured tableaux: the common substrate of component and reverse tableaux.
//!
//! A tableau is a list of columns, each a contiguous stack of cells starting at
//! row 1.  Cells carry a value in `1..=n` and a colour.  Column heights may
//! differ from the underlying diagram because constructions grow some columns
//! below their original bottom row and move blocks of cells sideways.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::diagram::{BoxPos, Diagram};
use crate::error::{Error, Result};

/// Cell colour.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    Black,
    Red,
}

/// One filled box.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cell {
    pub entry: usize,
    pub color: Color,
}

impl Cell {
    pub fn black(entry: usize) -> Self {
        Self { entry, color: Color::Black }
    }

    pub fn red(entry: usize) -> Self {
        Self { entry, color: Color::Red }
    }

    pub fn is_black(&self) -> bool {
        self.color == Color::Black
    }
}

/// Which construction produced a tableau.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    /// The initial column filling.
    Base,
    /// A component tableau with its strings drawn out to the right.
    ComponentInfinity,
    /// A component tableau with each string collapsed to its leftmost box.
    ComponentCollapsed,
    /// A tableau produced by implementing neighbouring pairs.
    Reverse,
}

/// A coloured filling with per-column heights.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Tableau {
    n: usize,
    columns: Vec<Vec<Cell>>,
    provenance: Provenance,
}

impl Tableau {
    /// The all-black standard filling: `1..=n` down columns, left to right.
    pub fn initial(d: &Diagram) -> Self {
        let columns = (1..=d.k()).map(|r| d.column_values(r).map(Cell::black).collect()).collect();
        Self { n: d.n(), columns, provenance: Provenance::Base }
    }

    /// Builds a tableau from explicit columns.
    pub fn from_columns(n: usize, columns: Vec<Vec<Cell>>, provenance: Provenance) -> Self {
        Self { n, columns, provenance }
    }

    /// Same cells, different provenance tag.
    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.columns.len()
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// Cells of column `r` from row 1 downwards.
    pub fn column(&self, r: usize) -> &[Cell] {
        &self.columns[r - 1]
    }

    pub(crate) fn column_mut(&mut self, r: usize) -> &mut Vec<Cell> {
        &mut self.columns[r - 1]
    }

    /// All columns.
    pub fn columns(&self) -> &[Vec<Cell>] {
        &self.columns
    }

    /// Number of filled boxes in column `r`.
    pub fn height(&self, r: usize) -> usize {
        self.columns[r - 1].len()
    }

    /// Row of the lowest black cell of column `r` (0 when there is none).
    pub fn black_height(&self, r: usize) -> usize {
        self.columns[r - 1].iter().rposition(|c| c.is_black()).map_or(0, |p| p + 1)
    }

    /// Number of rows in use.
    pub fn rows(&self) -> usize {
        self.columns.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// The cell at `(r, s)` if present.
    pub fn get(&self, r: usize, s: usize) -> Option<Cell> {
        if r == 0 || s == 0 {
            return None;
        }
        self.columns.get(r - 1).and_then(|c| c.get(s - 1)).copied()
    }

    /// Every cell with its box, column by column.
    pub fn cells(&self) -> impl Iterator<Item = (BoxPos, Cell)> + '_ {
        self.columns
            .iter()
            .enumerate()
            .flat_map(|(ri, col)| col.iter().enumerate().map(move |(si, c)| ((ri + 1, si + 1), *c)))
    }

    /// Boxes holding value `v`, ordered left to right.
    pub fn occurrences(&self, v: usize) -> Vec<(BoxPos, Cell)> {
        self.cells().filter(|(_, c)| c.entry == v).collect()
    }

    /// The rightmost box holding `v` (any colour).
    pub fn rightmost(&self, v: usize) -> Option<BoxPos> {
        self.cells().filter(|(_, c)| c.entry == v).map(|(b, _)| b).max_by_key(|b| b.0)
    }

    /// The leftmost box holding `v` (any colour).
    pub fn leftmost(&self, v: usize) -> Option<BoxPos> {
        self.cells().filter(|(_, c)| c.entry == v).map(|(b, _)| b).min_by_key(|b| b.0)
    }

    /// The box of the black copy of `v`, if any.
    pub fn black_position(&self, v: usize) -> Option<BoxPos> {
        self.cells().find(|(_, c)| c.entry == v && c.is_black()).map(|(b, _)| b)
    }

    /// Strictly increasing down every column and along every row.
    pub fn is_standard_with_multiplicities(&self) -> bool {
        self.standardness_violation().is_none()
    }

    /// First violation of standardness, described in words.
    pub fn standardness_violation(&self) -> Option<String> {
        for (ri, col) in self.columns.iter().enumerate() {
            for w in col.windows(2) {
                if w[0].entry >= w[1].entry {
                    return Some(format!("column C{} is not increasing ({} above {})", ri + 1, w[0].entry, w[1].entry));
                }
            }
        }
        for s in 1..=self.rows() {
            let mut last: Option<(usize, usize)> = None;
            for r in 1..=self.k() {
                if let Some(c) = self.get(r, s) {
                    if let Some((lr, le)) = last {
                        if le >= c.entry {
                            return Some(format!("row R{s} is not increasing ({le} in C{lr}, {} in C{r})", c.entry));
                        }
                    }
                    last = Some((r, c.entry));
                }
            }
        }
        None
    }

    /// Red entries with multiplicity.
    pub fn red_set(&self) -> RedSet {
        RedSet::new(self.cells().filter(|(_, c)| !c.is_black()).map(|(_, c)| c.entry).collect())
    }

    /// Checks the shape invariants of a completed reverse tableau: one black
    /// cell per value, at most one cell per value in any row, and strings that
    /// step down exactly one row per hop to the left, red except the leftmost.
    pub fn check_reverse_shape(&self) -> Result<()> {
        for s in self.strings()? {
            let black = s.cells.iter().filter(|(_, c)| c.is_black()).count();
            if black != 1 {
                return Err(Error::Structural(format!("value {} has {black} black cells", s.value)));
            }
            if !s.cells[0].1.is_black() {
                return Err(Error::Structural(format!("value {}: the leftmost cell is not black", s.value)));
            }
            for w in s.cells.windows(2) {
                let ((r0, s0), _) = w[0];
                let ((r1, s1), _) = w[1];
                if r0 >= r1 || s0 != s1 + 1 {
                    return Err(Error::Structural(format!(
                        "value {}: cells at (C{r0},R{s0}) and (C{r1},R{s1}) do not form a reverse string",
                        s.value
                    )));
                }
            }
        }
        Ok(())
    }

    /// Groups the cells by value; each group is ordered left to right.
    /// Fails when a value occurs twice in one row.
    pub fn strings(&self) -> Result<Vec<ValueString>> {
        let mut by_value: BTreeMap<usize, Vec<(BoxPos, Cell)>> = BTreeMap::new();
        for (b, c) in self.cells() {
            by_value.entry(c.entry).or_default().push((b, c));
        }
        let mut out = Vec::with_capacity(by_value.len());
        for (value, mut cells) in by_value {
            cells.sort_by_key(|((r, s), _)| (*r, *s));
            let mut rows: Vec<usize> = cells.iter().map(|((_, s), _)| *s).collect();
            rows.sort_unstable();
            rows.dedup();
            if rows.len() != cells.len() && self.provenance == Provenance::Reverse {
                return Err(Error::Structural(format!("value {value} occurs twice in one row")));
            }
            out.push(ValueString { value, cells });
        }
        Ok(out)
    }

    /// Deterministic rendering in one of the supported formats.
    pub fn render(&self, format: RenderFormat) -> String {
        match format {
            RenderFormat::Text => self.render_text(),
            RenderFormat::Latex => self.render_latex(),
            RenderFormat::Json => serde_json::to_string_pretty(&self.to_json()).expect("tableau json"),
        }
    }

    fn cell_width(&self) -> usize {
        let widest_value = self
            .cells()
            .map(|(_, c)| c.entry.to_string().len() + usize::from(!c.is_black()))
            .max()
            .unwrap_or(1);
        let widest_header = format!("C{}", self.k().max(1)).len();
        widest_value.max(widest_header)
    }

    /// Grid with `|` separators, `C1..Ck` header, `R1..` row labels and `r`
    /// marking red entries.
    pub fn render_text(&self) -> String {
        let w = self.cell_width();
        let label_w = format!("R{}", self.rows().max(1)).len();
        let mut out = String::new();
        out.push_str(&format!("{:label_w$}", ""));
        for r in 1..=self.k() {
            out.push_str(&format!(" | {:>w$}", format!("C{r}")));
        }
        out.push('\n');
        for s in 1..=self.rows() {
            out.push_str(&format!("{:<label_w$}", format!("R{s}")));
            for r in 1..=self.k() {
                let txt = match self.get(r, s) {
                    Some(c) if c.is_black() => c.entry.to_string(),
                    Some(c) => format!("r{}", c.entry),
                    None => String::new(),
                };
                out.push_str(&format!(" | {:>w$}", txt));
            }
            out.push('\n');
        }
        out
    }

    /// A LaTeX `array` in the usual drawing layout; red entries are
    /// wrapped in `\textcolor{red}{..}`.
    pub fn render_latex(&self) -> String {
        let mut out = String::new();
        out.push_str("\\begin{array}{");
        out.push_str(&"c".repeat(self.k()));
        out.push_str("}\n");
        for s in 1..=self.rows() {
            let row: Vec<String> = (1..=self.k())
                .map(|r| match self.get(r, s) {
                    Some(c) if c.is_black() => c.entry.to_string(),
                    Some(c) => format!("\\textcolor{{red}}{{{}}}", c.entry),
                    None => String::new(),
                })
                .collect();
            out.push_str(&row.join(" & "));
            out.push_str(" \\\\\n");
        }
        out.push_str("\\end{array}\n");
        out
    }

    /// JSON object `{shape, provenance, cells:[{col,row,entry,color}]}`;
    /// indices are 1-based.
    pub fn to_json(&self) -> serde_json::Value {
        let cells: Vec<serde_json::Value> = self
            .cells()
            .map(|((r, s), c)| serde_json::json!({"col": r, "row": s, "entry": c.entry, "color": c.color}))
            .collect();
        let shape: Vec<usize> = self.columns.iter().map(Vec::len).collect();
        serde_json::json!({
            "indexing": "1-based",
            "provenance": self.provenance,
            "shape": shape,
            "cells": cells,
        })
    }

    /// Parses the text rendering back into a tableau.  The value range `n` is
    /// taken to be the largest entry; the provenance must be supplied.
    pub fn parse_text(text: &str, provenance: Provenance) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::InvalidInput("empty tableau text".into()))?;
        let k = header.split('|').skip(1).count();
        let mut grid: Vec<Vec<Option<Cell>>> = vec![Vec::new(); k];
        for line in lines {
            let fields: Vec<&str> = line.split('|').skip(1).collect();
            if fields.len() != k {
                return Err(Error::InvalidInput(format!("row `{line}` does not have {k} columns")));
            }
            for (r, f) in fields.iter().enumerate() {
                let f = f.trim();
                let cell = if f.is_empty() {
                    None
                } else if let Some(v) = f.strip_prefix('r') {
                    Some(Cell::red(v.parse().map_err(|_| Error::InvalidInput(format!("bad cell `{f}`")))?))
                } else {
                    Some(Cell::black(f.parse().map_err(|_| Error::InvalidInput(format!("bad cell `{f}`")))?))
                };
                grid[r].push(cell);
            }
        }
        let mut columns = Vec::with_capacity(k);
        for (r, col) in grid.into_iter().enumerate() {
            let len = col.iter().rposition(Option::is_some).map_or(0, |p| p + 1);
            let cells: Option<Vec<Cell>> = col.into_iter().take(len).collect();
            columns.push(cells.ok_or_else(|| Error::InvalidInput(format!("column C{} has a gap", r + 1)))?);
        }
        let n = columns.iter().flatten().map(|c| c.entry).max().unwrap_or(0);
        Ok(Self { n, columns, provenance })
    }
}

impl fmt::Display for Tableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render_text())
    }
}

/// Output formats for tableaux and reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RenderFormat {
    #[default]
    Text,
    Latex,
    Json,
}

/// All cells carrying one value, ordered left to right.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValueString {
    pub value: usize,
    pub cells: Vec<(BoxPos, Cell)>,
}

/// A multiset of red values, stored sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct RedSet(Vec<usize>);

impl RedSet {
    pub fn new(mut values: Vec<usize>) -> Self {
        values.sort_unstable();
        Self(values)
    }

    /// Values with multiplicity, ascending.
    pub fn values(&self) -> &[usize] {
        &self.0
    }

    /// Cardinality counted with multiplicity.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `value -> multiplicity`.
    pub fn multiplicities(&self) -> BTreeMap<usize, usize> {
        let mut m = BTreeMap::new();
        for &v in &self.0 {
            *m.entry(v).or_insert(0) += 1;
        }
        m
    }
}

impl fmt::Display for RedSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
        write!(f, "({})", s.join(","))
    }
}

impl FromStr for RedSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().trim_start_matches('(').trim_end_matches(')');
        if s.is_empty() {
            return Ok(RedSet::default());
        }
        let values = s
            .split(',')
            .map(|v| v.trim().parse::<usize>().map_err(|_| Error::InvalidInput(format!("bad red value `{v}`"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(RedSet::new(values))
    }
}

/// Label carried by a line between two entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LineLabel {
    /// A line labelled `1`: its coordinate is set to one on the slice.
    One,
    /// A line labelled `*`: its coordinate stays free on the slice.
    Star,
}

/// A line `ℓ_{i,j}` joining two entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Line {
    pub i: usize,
    pub j: usize,
    pub label: LineLabel,
    /// Box of the `i` end.
    pub from: BoxPos,
    /// Box of the `j` end.
    pub to: BoxPos,
}

impl Line {
    /// The matrix coordinate `(i, j)` of the line.
    pub fn coordinate(&self) -> (usize, usize) {
        (self.i, self.j)
    }
}
