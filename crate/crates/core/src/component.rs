//! Component tableaux: strings of equal entries running to the right.
//!
//! Rows are processed top to bottom and, within a row, columns left to right.
//! The entry at the end of each string tries to continue into the next column.
//! If the first empty box of that column is in the same row, the string moves
//! across horizontally.  If it is `m >= 1` rows lower, the string may descend
//! provided the surrounding neighbouring pairs of the `m` heights it crosses
//! are all still free; doing so consumes those pairs and colours the lowest
//! `m` entries of the column red (or, for later single-row descents into the
//! same column, adds another copy of its lowest red entry).  A string that
//! does not continue is stopped and joined by a line labelled `1` to the
//! lowest entry of the next column that lies in its row or above and is not
//! yet the end of such a line (red entries qualify only strictly above).
//! Every pair must be consumed exactly once.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::diagram::{Diagram, Pair};
use crate::error::{structural, Result};
use crate::geometry::RootSet;
use crate::reverse::{self, excluded_roots, HeightOrder, PlannedStep, ReverseState, ShiftMode};
use crate::tableau::{Cell, Line, LineLabel, Provenance, RedSet, Tableau};

/// Red data of one column.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ColumnRed {
    /// Column index (1-based).
    pub column: usize,
    /// Red entries of the column, top to bottom.
    pub entries: Vec<usize>,
    /// Number of distinct red entries.
    pub distinct: usize,
    /// Multiplicity of the lowest red entry.
    pub lowest_multiplicity: usize,
    /// Height of the column in the diagram.
    pub height: usize,
}

impl ColumnRed {
    /// The lowest red entry.
    pub fn lowest(&self) -> usize {
        *self.entries.last().expect("non-empty red column")
    }
}

/// Which string consumed a pair, and where.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PairUse {
    pub pair: Pair,
    /// Value of the descending string.
    pub value: usize,
    /// Row the string descended from.
    pub row: usize,
    /// Column the string left.
    pub column: usize,
}

/// A decision taken during enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ChoiceRecord {
    pub value: usize,
    pub row: usize,
    pub column: usize,
    pub descended: bool,
}

/// A completed component tableau.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentTableau {
    diagram: Diagram,
    /// Strings drawn out to the right; red cells are the red base entries.
    pub infinity: Tableau,
    /// The initial filling with the red entries marked.
    pub collapsed: Tableau,
    /// Red data per column, left to right.
    pub red_columns: Vec<ColumnRed>,
    /// Lines labelled `1`.
    pub lines_one: Vec<Line>,
    /// Lines labelled `*`, in the infinite tableau's geometry.
    pub lines_star: Vec<Line>,
    /// One record per neighbouring pair, in consumption order.
    pub used_pairs: Vec<PairUse>,
    /// The choices that led here.
    pub choice_trace: Vec<ChoiceRecord>,
}

impl ComponentTableau {
    pub fn diagram(&self) -> &Diagram {
        &self.diagram
    }

    /// Red entries with multiplicity.
    pub fn red_set(&self) -> RedSet {
        let mut v = Vec::new();
        for c in &self.red_columns {
            for (idx, &e) in c.entries.iter().enumerate() {
                let copies = if idx + 1 == c.entries.len() { c.lowest_multiplicity } else { 1 };
                v.extend(std::iter::repeat_n(e, copies));
            }
        }
        RedSet::new(v)
    }

    /// Coordinates of the lines labelled `1`.
    pub fn one_line_roots(&self) -> RootSet {
        self.lines_one.iter().map(Line::coordinate).collect()
    }

    /// Coordinates of the lines labelled `*`.
    pub fn star_line_roots(&self) -> RootSet {
        self.lines_star.iter().map(Line::coordinate).collect()
    }

    /// Star lines of the collapsed tableau: from the leftmost (original) box
    /// of `i` to the red `j`.
    pub fn collapsed_star_lines(&self) -> Vec<Line> {
        self.lines_star
            .iter()
            .map(|l| Line { from: self.diagram.position(l.i), to: self.diagram.position(l.j), ..*l })
            .collect()
    }

    /// Red entries in their total order (columns left to right, bottom to top
    /// within a column, copies of the lowest entry consecutive), each with
    /// the pair it consumed.
    pub fn red_order(&self) -> Vec<(usize, Pair)> {
        self.plan(HeightOrder::IncreaseThenDecrease).iter().map(|p| (p.value, p.pair)).collect()
    }

    /// The complete sequence of pairs induced by [`ComponentTableau::red_order`].
    pub fn induced_sequence(&self) -> Vec<Pair> {
        self.red_order().into_iter().map(|(_, p)| p).collect()
    }

    /// Implementation schedule rebuilding this tableau's red entries as a
    /// reverse tableau.
    pub fn plan(&self, order: HeightOrder) -> Vec<PlannedStep> {
        let d = &self.diagram;
        let mut out = Vec::new();
        for c in &self.red_columns {
            let r = c.column - 1;
            let j = c.lowest();
            let pair_at = |t: usize| d.surrounding_pair(t, r).expect("a consumed pair surrounds every red descent");
            let up: Vec<PlannedStep> = (c.height + 1..c.height + c.lowest_multiplicity)
                .map(|t| PlannedStep { pair: pair_at(t), value: j, column: c.column, string_copy: true })
                .collect();
            let down: Vec<PlannedStep> = (c.height + 1 - c.distinct..c.height)
                .rev()
                .map(|t| PlannedStep { pair: pair_at(t), value: d.entry(c.column, t), column: c.column, string_copy: false })
                .collect();
            out.push(PlannedStep { pair: pair_at(c.height), value: j, column: c.column, string_copy: false });
            match order {
                HeightOrder::IncreaseThenDecrease => {
                    out.extend(up);
                    out.extend(down);
                }
                HeightOrder::DecreaseThenIncrease => {
                    out.extend(down);
                    out.extend(up);
                }
            }
        }
        out
    }

    /// The reverse tableau with the same red multiset, built column by column.
    pub fn to_reverse(&self, order: HeightOrder, mode: ShiftMode) -> Result<ReverseState> {
        reverse::rebuild_from_plan(&self.diagram, &self.plan(order), mode)
    }

    /// Excluded roots: for each star line `(i, j)`, put a black `j` directly
    /// under `i` in the initial filling (its original copy turning red), push
    /// lower parts left, and collect the excluded roots of that tableau.
    pub fn excluded_roots(&self) -> Result<RootSet> {
        let mut out = RootSet::new();
        for l in &self.lines_star {
            out.extend(excluded_roots(&self.diagram, &self.auxiliary_tableau(l.i, l.j)?));
        }
        Ok(out)
    }

    /// The tableau obtained from the initial filling by placing `j` under `i`.
    pub fn auxiliary_tableau(&self, i: usize, j: usize) -> Result<Tableau> {
        let d = &self.diagram;
        let mut t = Tableau::initial(d).with_provenance(Provenance::Reverse);
        let (jr, js) = d.position(j);
        t.column_mut(jr)[js - 1] = Cell::red(j);
        let (ir, is) = d.position(i);
        reverse::insert_below(&mut t, ir, is, Cell::black(j), ShiftMode::Standard, 1, None)?;
        Ok(t)
    }

    /// JSON summary used by the command line.
    pub fn to_json(&self) -> serde_json::Value {
        let coords = |ls: &[Line]| ls.iter().map(|l| [l.i, l.j]).collect::<Vec<_>>();
        serde_json::json!({
            "redSet": self.red_set().values(),
            "multiplicities": self.red_set().multiplicities().into_iter().map(|(k, v)| [k, v]).collect::<Vec<_>>(),
            "redColumns": self.red_columns,
            "linesOne": coords(&self.lines_one),
            "linesStar": coords(&self.lines_star),
            "excludedRoots": self.excluded_roots().map(|x| x.into_iter().map(|(a, b)| [a, b]).collect::<Vec<_>>()).ok(),
            "completeSequence": self.induced_sequence().iter().map(|p| p.to_string()).collect::<Vec<_>>(),
            "tableauInfinity": self.infinity.to_json(),
            "tableauCollapsed": self.collapsed.to_json(),
        })
    }
}

/// Work-in-progress state of the enumeration.
#[derive(Clone)]
struct Build {
    columns: Vec<Vec<usize>>,
    used: Vec<bool>,
    uses: Vec<PairUse>,
    red: BTreeMap<usize, ColumnRed>,
    ones: Vec<Line>,
    one_targets: BTreeSet<usize>,
    stars: Vec<Line>,
    trace: Vec<ChoiceRecord>,
}

/// All component tableaux of `d`, sorted by Red Set.
///
/// Distinct tableaux are all returned; if two of them shared a Red Set the
/// caller can detect it with [`red_map_is_injective`].
pub fn enumerate_component_tableaux(d: &Diagram) -> Result<Vec<ComponentTableau>> {
    let start = Build {
        columns: (1..=d.k()).map(|r| d.column_values(r).collect()).collect(),
        used: vec![false; d.pair_count()],
        uses: Vec::new(),
        red: BTreeMap::new(),
        ones: Vec::new(),
        one_targets: BTreeSet::new(),
        stars: Vec::new(),
        trace: Vec::new(),
    };
    let mut done = Vec::new();
    explore(d, start, 1, 1, &mut done)?;
    let mut out: Vec<ComponentTableau> = Vec::new();
    for b in done {
        let ct = finish(d, b);
        if !out.iter().any(|o| o.infinity == ct.infinity && o.lines_one == ct.lines_one && o.lines_star == ct.lines_star) {
            out.push(ct);
        }
    }
    out.sort_by_cached_key(ComponentTableau::red_set);
    Ok(out)
}

/// True when distinct component tableaux have distinct Red Sets.
pub fn red_map_is_injective(tableaux: &[ComponentTableau]) -> bool {
    let sets: BTreeSet<RedSet> = tableaux.iter().map(ComponentTableau::red_set).collect();
    sets.len() == tableaux.len()
}

fn explore(d: &Diagram, mut b: Build, mut s: usize, mut r: usize, done: &mut Vec<Build>) -> Result<()> {
    let k = d.k();
    loop {
        if r > k {
            // Row finished: pairs of height <= s can no longer be consumed.
            if d.pairs().iter().enumerate().any(|(idx, p)| p.height <= s && !b.used[idx]) {
                return Ok(());
            }
            if !b.columns.iter().any(|c| c.len() > s) {
                if b.used.iter().all(|&u| u) {
                    done.push(b);
                }
                return Ok(());
            }
            s += 1;
            r = 1;
            continue;
        }
        if r == k || b.columns[r - 1].len() < s {
            r += 1;
            continue;
        }
        let value = b.columns[r - 1][s - 1];
        let first_empty = b.columns[r].len() + 1;
        if first_empty < s {
            structural!("C{} ends above R{} while C{r} reaches it", r + 1, s - 1);
        }
        let m = first_empty - s;
        if m == 0 {
            b.columns[r].push(value);
            r += 1;
            continue;
        }
        // Descending needs the surrounding pairs of heights s..s+m-1, all free.
        let needed: Option<Vec<usize>> = (s..s + m)
            .map(|t| d.surrounding_pair(t, r).and_then(|p| d.pair_index(&p)).filter(|&idx| !b.used[idx]))
            .collect();
        if let Some(idx) = needed {
            let mut down = b.clone();
            descend(d, &mut down, value, s, r, m, &idx)?;
            explore(d, down, s, r + 1, done)?;
        }
        stop(d, &mut b, value, s, r);
        r += 1;
    }
}

fn descend(d: &Diagram, b: &mut Build, value: usize, s: usize, r: usize, m: usize, pairs: &[usize]) -> Result<()> {
    let next = r + 1;
    let h = d.height(next);
    let row = b.columns[r].len() + 1;
    let to_targets: Vec<(usize, usize)> = if b.columns[r].len() == h {
        if m > h {
            structural!("descent of {value} by {m} rows into C{next} of height {h}");
        }
        let entries: Vec<usize> = (h + 1 - m..=h).map(|t| d.entry(next, t)).collect();
        b.red.insert(next, ColumnRed { column: next, entries: entries.clone(), distinct: m, lowest_multiplicity: 1, height: h });
        entries.iter().map(|&e| (e, d.position(e).1)).collect()
    } else {
        let Some(red) = b.red.get_mut(&next) else {
            structural!("C{next} was extended without a red entry");
        };
        if m != 1 {
            structural!("a later descent of {value} into C{next} spans {m} rows");
        }
        red.lowest_multiplicity += 1;
        vec![(red.lowest(), h)]
    };
    for (j, jrow) in to_targets {
        b.stars.push(Line { i: value, j, label: LineLabel::Star, from: (next, row), to: (next, jrow) });
    }
    for &idx in pairs {
        if b.used[idx] {
            structural!("pair {} consumed twice", d.pairs()[idx]);
        }
        b.used[idx] = true;
        b.uses.push(PairUse { pair: d.pairs()[idx], value, row: s, column: r });
    }
    b.columns[r].push(value);
    b.trace.push(ChoiceRecord { value, row: s, column: r, descended: true });
    Ok(())
}

fn stop(d: &Diagram, b: &mut Build, value: usize, s: usize, r: usize) {
    let next = r + 1;
    let h = d.height(next);
    b.trace.push(ChoiceRecord { value, row: s, column: r, descended: false });
    // A red entry of the next column is only a valid target strictly above the
    // stopped string; a horizontal line into it would duplicate a starred link.
    let is_red = |t: usize| b.red.get(&next).is_some_and(|c| c.entries.contains(&d.entry(next, t)));
    let free = |t: usize| !b.one_targets.contains(&d.entry(next, t)) && !(t == s && is_red(t));
    if let Some(t) = (1..=h.min(s)).rev().find(|&t| free(t)) {
        let j = d.entry(next, t);
        b.one_targets.insert(j);
        b.ones.push(Line { i: value, j, label: LineLabel::One, from: (r, s), to: (next, t) });
    }
}

fn finish(d: &Diagram, b: Build) -> ComponentTableau {
    let red_cells: BTreeSet<usize> = b.red.values().flat_map(|c| c.entries.iter().copied()).collect();
    let colour = |v: usize, base: bool| if base && red_cells.contains(&v) { Cell::red(v) } else { Cell::black(v) };
    let inf_cols = b
        .columns
        .iter()
        .enumerate()
        .map(|(ri, col)| col.iter().enumerate().map(|(si, &v)| colour(v, si < d.height(ri + 1))).collect())
        .collect();
    let collapsed_cols = (1..=d.k()).map(|r| d.column_values(r).map(|v| colour(v, true)).collect()).collect();
    ComponentTableau {
        diagram: d.clone(),
        infinity: Tableau::from_columns(d.n(), inf_cols, Provenance::ComponentInfinity),
        collapsed: Tableau::from_columns(d.n(), collapsed_cols, Provenance::ComponentCollapsed),
        red_columns: b.red.into_values().collect(),
        lines_one: b.ones,
        lines_star: b.stars,
        used_pairs: b.uses,
        choice_trace: b.trace,
    }
}
