//! Reverse tableaux: implementing neighbouring pairs one at a time.
//!
//! Starting from the initial filling, implementing a pair `(C, C')` of height
//! `s` picks a column whose lowest black entry sits in row `s`, recolours that
//! entry red and inserts a black copy one row further down in a column to its
//! left.  If the receiving box is occupied, the lower part of that column (the
//! cells strictly below row `s`) moves left as a block, possibly displacing
//! further lower parts.  Every step is checked against the structural
//! guarantees the construction relies on (eligible columns, standardness,
//! string shape).

use std::collections::BTreeSet;

use serde::Serialize;

use crate::diagram::{BoxPos, Diagram, Pair};
use crate::error::{structural, Error, Result};
use crate::geometry::RootSet;
use crate::tableau::{Cell, Color, Provenance, RedSet, Tableau};

/// How displaced lower parts travel to the left.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ShiftMode {
    /// Stop at the first column of height at least `s`.
    #[default]
    Standard,
    /// Also skip columns of height exactly `s`, except the left boundary column.
    Extreme,
}

/// One implemented pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Step {
    pub pair: Pair,
    /// Column whose lowest black entry was recoloured.
    pub column: usize,
    /// The recoloured value.
    pub value: usize,
    /// Column that received the new black copy.
    pub target: usize,
}

/// A reverse tableau together with the pairs implemented so far.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReverseState {
    diagram: Diagram,
    tableau: Tableau,
    steps: Vec<Step>,
}

/// A possible choice when implementing a pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Choice {
    pub column: usize,
    /// Value whose lowest black copy would be recoloured.
    pub value: usize,
    /// Whether that value started inside the pair's columns.
    pub allowed: bool,
}

/// The columns available when implementing a pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EligibleSet {
    pub pair: Pair,
    /// Column of the rightmost copy of the value initially at the bottom of `C`.
    pub left_boundary: usize,
    /// Columns of `[left_boundary, C']` with height `>= s` and black height `<= s`.
    pub columns: Vec<usize>,
    /// All columns of `columns` except the leftmost.
    pub choices: Vec<Choice>,
}

impl ReverseState {
    /// The initial filling, nothing implemented.
    pub fn new(d: &Diagram) -> Self {
        Self {
            diagram: d.clone(),
            tableau: Tableau::initial(d).with_provenance(Provenance::Reverse),
            steps: Vec::new(),
        }
    }

    pub fn diagram(&self) -> &Diagram {
        &self.diagram
    }

    pub fn tableau(&self) -> &Tableau {
        &self.tableau
    }

    /// Implemented steps in order.
    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    /// Implemented pairs in order.
    pub fn implemented(&self) -> Vec<Pair> {
        self.steps.iter().map(|s| s.pair).collect()
    }

    pub fn is_implemented(&self, p: &Pair) -> bool {
        self.steps.iter().any(|s| s.pair == *p)
    }

    /// True once every neighbouring pair has been implemented.
    pub fn is_complete(&self) -> bool {
        self.steps.len() == self.diagram.pair_count()
    }

    pub fn red_set(&self) -> RedSet {
        self.tableau.red_set()
    }

    /// Excluded roots of the current tableau.
    pub fn excluded_roots(&self) -> RootSet {
        excluded_roots(&self.diagram, &self.tableau)
    }

    /// Columns available for implementing `p`, with the eligibility
    /// guarantees asserted.
    pub fn eligible_set(&self, p: &Pair) -> Result<EligibleSet> {
        if self.is_implemented(p) {
            return Err(Error::InvalidInput(format!("{p} is already implemented")));
        }
        let s = p.height;
        let t = &self.tableau;
        let anchor = self.diagram.entry(p.left, s);
        let left_boundary = match t.rightmost(anchor) {
            Some((c, _)) => c,
            None => structural!("value {anchor} vanished from the tableau"),
        };
        if left_boundary > p.left {
            structural!("value {anchor} moved right of C{}", p.left);
        }
        let columns: Vec<usize> = (left_boundary..=p.right)
            .filter(|&x| t.height(x) >= s && t.black_height(x) <= s)
            .collect();
        for (idx, &x) in columns.iter().enumerate() {
            let bh = t.black_height(x);
            if idx > 0 && bh != s {
                structural!("implementing {p}: column C{x} has black height {bh} < {s} but is not leftmost");
            }
            if idx == 0 && bh < s && t.height(x) != s {
                structural!("implementing {p}: leftmost column C{x} has black height {bh} and height {}", t.height(x));
            }
        }
        let choices = columns
            .iter()
            .skip(1)
            .map(|&x| {
                let value = t.get(x, s).expect("eligible column reaches row s").entry;
                Choice { column: x, value, allowed: p.spans(self.diagram.block(value)) }
            })
            .collect();
        Ok(EligibleSet { pair: *p, left_boundary, columns, choices })
    }

    /// Implements `p` by recolouring the lowest black entry of `column`.
    pub fn implement(&self, p: &Pair, column: usize, mode: ShiftMode) -> Result<ReverseState> {
        let es = self.eligible_set(p)?;
        let choice = match es.choices.iter().find(|c| c.column == column) {
            Some(c) => *c,
            None => {
                return Err(Error::InvalidInput(format!(
                    "C{column} is not an eligible choice for {p} (choices: {:?})",
                    es.choices.iter().map(|c| c.column).collect::<Vec<_>>()
                )))
            }
        };
        if !choice.allowed {
            return Err(Error::HiddenRule(format!(
                "value {} started in C{}, outside {p}",
                choice.value,
                self.diagram.block(choice.value)
            )));
        }
        let s = p.height;
        let mut next = self.clone();
        next.tableau.column_mut(column)[s - 1].color = Color::Red;
        let target = match find_receiver(&next.tableau, column, es.left_boundary, s, mode, Some(es.left_boundary)) {
            Some(x) => x,
            None => structural!("implementing {p}: no column left of C{column} can take the black {}", choice.value),
        };
        insert_below(&mut next.tableau, target, s, Cell::black(choice.value), mode, es.left_boundary, Some(es.left_boundary))?;
        if let Some(v) = next.tableau.standardness_violation() {
            structural!("implementing {p} via C{column}: {v}");
        }
        next.tableau.check_reverse_shape()?;
        next.steps.push(Step { pair: *p, column, value: choice.value, target });
        Ok(next)
    }

    /// Boundaries and black count of the trapezium of `p` at this stage.
    pub fn trapezium(&self, p: &Pair) -> Result<TrapeziumState> {
        let s = p.height;
        let t = &self.tableau;
        let implemented = self.is_implemented(p);
        let mut left = Vec::with_capacity(s);
        let mut right = Vec::with_capacity(s);
        for row in 1..=s {
            let a = self.diagram.entry(p.left, row);
            let b = self.diagram.entry(p.right, row);
            let lb = t.rightmost(a).expect("value present");
            // Before the pair is implemented the leftmost copy of `b` sits in
            // row `row`; afterwards the copy left in that row bounds the region.
            let rb = t
                .occurrences(b)
                .into_iter()
                .map(|(bx, _)| bx)
                .find(|bx| bx.1 == row)
                .or_else(|| t.leftmost(b))
                .expect("value present");
            if lb.1 != row {
                structural!("trapezium of {p}: left boundary value {a} sits in R{} instead of R{row}", lb.1);
            }
            if !implemented {
                let cell = t.get(rb.0, rb.1).expect("cell");
                if rb.1 != row || !cell.is_black() {
                    structural!("trapezium of {p}: right boundary value {b} is not black in R{row}");
                }
            }
            left.push(lb);
            right.push(rb);
        }
        let mut left_trapezium = Vec::new();
        for row in 1..=s {
            let (lc, _) = left[row - 1];
            let (rc, _) = right[row - 1];
            for x in lc + 1..=rc {
                if let Some(c) = t.get(x, row) {
                    left_trapezium.push(((x, row), c));
                }
            }
        }
        let black_count = left_trapezium.iter().filter(|(_, c)| c.is_black()).count();
        let boundary_black = left.iter().filter(|&&(c, r)| t.get(c, r).is_some_and(|x| x.is_black())).count();
        let red_in_bottom_row = left_trapezium.iter().any(|((_, row), c)| *row == s && !c.is_black());
        Ok(TrapeziumState { pair: *p, stage: self.steps.len(), left_boundary: left, right_boundary: right, left_trapezium, black_count, closed_black_count: black_count + boundary_black, red_in_bottom_row })
    }

    /// The horizontal lines of the trapezium: in each row `t <= s`, the
    /// consecutive black entries from the left boundary to the right one.
    pub fn horizontal_lines(&self, p: &Pair) -> Result<Vec<(usize, usize)>> {
        let tz = self.trapezium(p)?;
        let mut lines = Vec::new();
        for row in 1..=p.height {
            let (lc, _) = tz.left_boundary[row - 1];
            let mut prev = self.tableau.get(lc, row).expect("boundary cell").entry;
            for ((_, r), c) in &tz.left_trapezium {
                if *r == row && c.is_black() {
                    lines.push((prev, c.entry));
                    prev = c.entry;
                }
            }
        }
        Ok(lines)
    }
}

/// Evolving region between the images of the two columns of a pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TrapeziumState {
    pub pair: Pair,
    /// Number of pairs implemented when the snapshot was taken.
    pub stage: usize,
    /// Rightmost box of each value of `C`, rows `1..=s`.
    pub left_boundary: Vec<BoxPos>,
    /// Leftmost box of each value of `C'`, rows `1..=s`.
    pub right_boundary: Vec<BoxPos>,
    /// Cells strictly right of the left boundary and weakly left of the right one.
    pub left_trapezium: Vec<(BoxPos, Cell)>,
    /// Black cells of the left trapezium (left boundary excluded).
    pub black_count: usize,
    /// Black cells including those of the left boundary.
    pub closed_black_count: usize,
    /// Whether a red entry sits in row `s` of the left trapezium.
    pub red_in_bottom_row: bool,
}

impl TrapeziumState {
    /// `Σ min(s, c_x) − s` over the trapezium's columns, where `c_x` counts
    /// the boxes of column `x` through which composite lines can pass: black
    /// cells of the trapezium and the left-boundary cells.
    pub fn composite_line_count(&self) -> usize {
        let s = self.pair.height;
        let lo = self.left_boundary.iter().map(|b| b.0).min().unwrap_or(0);
        let hi = self.right_boundary.iter().map(|b| b.0).max().unwrap_or(0);
        let mut total = 0;
        for x in lo..=hi {
            let boundary = self.left_boundary.iter().filter(|b| b.0 == x).count();
            let black = self.left_trapezium.iter().filter(|((c, _), cell)| *c == x && cell.is_black()).count();
            total += (boundary + black).min(s);
        }
        total - s
    }
}

/// First column strictly left of `from`, no further left than `stop`, able to
/// receive a cell in row `s + 1`.
fn find_receiver(t: &Tableau, from: usize, stop: usize, s: usize, mode: ShiftMode, boundary: Option<usize>) -> Option<usize> {
    (stop..from).rev().find(|&x| {
        let h = t.height(x);
        match mode {
            ShiftMode::Standard => h >= s,
            ShiftMode::Extreme => h > s || (Some(x) == boundary && h >= s),
        }
    })
}

/// Puts `cell` into row `s + 1` of column `target`, pushing lower parts left.
pub(crate) fn insert_below(
    t: &mut Tableau,
    target: usize,
    s: usize,
    cell: Cell,
    mode: ShiftMode,
    stop: usize,
    boundary: Option<usize>,
) -> Result<()> {
    let h = t.height(target);
    if h < s {
        structural!("column C{target} of height {h} cannot receive a cell in R{}", s + 1);
    }
    let mut carry = t.column_mut(target).split_off(s);
    t.column_mut(target).push(cell);
    let mut from = target;
    while !carry.is_empty() {
        let Some(x) = find_receiver(t, from, stop, s, mode, boundary) else {
            structural!("no column left of C{from} can receive the lower part starting with {}", carry[0].entry);
        };
        let displaced = t.column_mut(x).split_off(s);
        t.column_mut(x).extend(carry);
        carry = displaced;
        from = x;
    }
    Ok(())
}

/// Excluded roots of a tableau: `x_{i,j}` with `i < j` in different blocks
/// such that the rightmost copy of `i` lies strictly above the black `j`, in
/// the same column or a column to its right.
pub fn excluded_roots(d: &Diagram, t: &Tableau) -> RootSet {
    let n = d.n();
    let mut rightmost = vec![None; n + 1];
    let mut black = vec![None; n + 1];
    for ((r, s), c) in t.cells() {
        if rightmost[c.entry].is_none_or(|(pr, _)| r > pr) {
            rightmost[c.entry] = Some((r, s));
        }
        if c.is_black() {
            black[c.entry] = Some((r, s));
        }
    }
    let mut out = BTreeSet::new();
    for j in 1..=n {
        let Some((jr, js)) = black[j] else { continue };
        for i in 1..j {
            if !d.in_nilradical(i, j) {
                continue;
            }
            if let Some((ir, is)) = rightmost[i] {
                if is < js && ir >= jr {
                    out.insert((i, j));
                }
            }
        }
    }
    out
}

/// Why a branch of a reverse construction stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RejectReason {
    /// The chosen value did not start between the pair's columns.
    HiddenRule,
    /// The eligible-column guarantees failed.
    Enabling,
}

/// A refused choice, kept for flow charts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Rejection {
    pub stage: usize,
    pub pair: Pair,
    pub column: usize,
    pub value: usize,
    pub reason: RejectReason,
    /// Red multiset the branch would have produced at this step.
    pub would_be: RedSet,
    pub detail: String,
}

/// A node of the branching construction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FlowNode {
    pub id: usize,
    pub stage: usize,
    pub red_set: RedSet,
    #[serde(skip)]
    pub state: ReverseState,
}

/// An edge of the branching construction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FlowEdge {
    pub from: usize,
    /// `None` for rejected choices.
    pub to: Option<usize>,
    pub pair: Pair,
    pub column: usize,
    pub value: usize,
    pub rejected: Option<RejectReason>,
}

/// All branches of a construction along a fixed sequence of pairs.
#[derive(Debug, Clone, Default, Serialize)]
pub struct FlowChart {
    pub nodes: Vec<FlowNode>,
    pub edges: Vec<FlowEdge>,
    pub rejections: Vec<Rejection>,
    /// Node ids of completed tableaux.
    pub leaves: Vec<usize>,
}

impl FlowChart {
    /// Completed tableaux, in discovery order.
    pub fn leaf_states(&self) -> Vec<&ReverseState> {
        self.leaves.iter().map(|&i| &self.nodes[i].state).collect()
    }

    /// Distinct Red Sets of the leaves, sorted.
    pub fn leaf_red_sets(&self) -> Vec<RedSet> {
        let set: BTreeSet<RedSet> = self.leaves.iter().map(|&i| self.nodes[i].red_set.clone()).collect();
        set.into_iter().collect()
    }
}

/// Implements a complete sequence of pairs along every branch.
///
/// Choices refused by the hidden rule are recorded and pruned; structural
/// failures are returned as errors since they indicate a construction bug.
/// Branches reaching identical tableaux are merged.
pub fn enumerate_reverse(d: &Diagram, seq: &[Pair], mode: ShiftMode) -> Result<FlowChart> {
    validate_sequence(d, seq)?;
    let mut chart = FlowChart::default();
    let root = ReverseState::new(d);
    chart.nodes.push(FlowNode { id: 0, stage: 0, red_set: root.red_set(), state: root });
    let mut frontier = vec![0usize];
    for (stage, p) in seq.iter().enumerate() {
        let mut next_frontier = Vec::new();
        for &node in &frontier {
            let state = chart.nodes[node].state.clone();
            let es = state.eligible_set(p)?;
            for choice in &es.choices {
                match state.implement(p, choice.column, mode) {
                    Ok(child) => {
                        let existing = next_frontier.iter().copied().find(|&id: &usize| chart.nodes[id].state.tableau == child.tableau);
                        let id = match existing {
                            Some(id) => id,
                            None => {
                                let id = chart.nodes.len();
                                chart.nodes.push(FlowNode { id, stage: stage + 1, red_set: child.red_set(), state: child });
                                next_frontier.push(id);
                                id
                            }
                        };
                        chart.edges.push(FlowEdge { from: node, to: Some(id), pair: *p, column: choice.column, value: choice.value, rejected: None });
                    }
                    Err(Error::HiddenRule(detail)) => {
                        let mut red = state.red_set().values().to_vec();
                        red.push(choice.value);
                        chart.rejections.push(Rejection {
                            stage,
                            pair: *p,
                            column: choice.column,
                            value: choice.value,
                            reason: RejectReason::HiddenRule,
                            would_be: RedSet::new(red),
                            detail,
                        });
                        chart.edges.push(FlowEdge { from: node, to: None, pair: *p, column: choice.column, value: choice.value, rejected: Some(RejectReason::HiddenRule) });
                    }
                    Err(e) => return Err(e),
                }
            }
        }
        frontier = next_frontier;
    }
    chart.leaves = frontier;
    Ok(chart)
}

/// Checks that `seq` lists every neighbouring pair of `d` exactly once.
pub fn validate_sequence(d: &Diagram, seq: &[Pair]) -> Result<()> {
    let mut seen = BTreeSet::new();
    for p in seq {
        if d.pair_index(p).is_none() {
            return Err(Error::InvalidInput(format!("{p} is not a neighbouring pair")));
        }
        if !seen.insert(*p) {
            return Err(Error::InvalidInput(format!("{p} occurs twice in the sequence")));
        }
    }
    if seen.len() != d.pair_count() {
        return Err(Error::InvalidInput(format!("the sequence has {} of the {} pairs", seen.len(), d.pair_count())));
    }
    Ok(())
}

/// Parses `"C1,C3;C2,C4"` into pairs of `d`.
pub fn parse_sequence(d: &Diagram, s: &str) -> Result<Vec<Pair>> {
    s.split(';')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            let (l, r) = crate::diagram::parse_column_pair(p)?;
            d.pair_by_columns(l, r)
        })
        .collect()
}

/// Order of heights used when rebuilding a column's red entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum HeightOrder {
    /// Heights `h, h+1, …, h+m'−1`, then `h−1, …, h−m+1`.
    #[default]
    IncreaseThenDecrease,
    /// Heights `h, h−1, …, h−m+1`, then `h+1, …, h+m'−1`.
    DecreaseThenIncrease,
}

/// A scheduled implementation step of the component-to-reverse map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PlannedStep {
    pub pair: Pair,
    /// Value to be recoloured.
    pub value: usize,
    /// Column of the red copy in the component tableau.
    pub column: usize,
    /// True for the extra copies of the lowest red entry of a column.
    pub string_copy: bool,
}

/// Rebuilds a reverse tableau from per-column red data: for each column
/// `col` (left to right) with red entries `red` occupying its lowest `m` rows
/// and a lowest entry of multiplicity `m'`, implement the surrounding pairs of
/// the prescribed heights.  Returns the final state.
pub fn rebuild_from_plan(d: &Diagram, plan: &[PlannedStep], mode: ShiftMode) -> Result<ReverseState> {
    let mut state = ReverseState::new(d);
    for step in plan {
        let column = if step.string_copy {
            match state.tableau.black_position(step.value) {
                Some((c, _)) => c,
                None => structural!("value {} has no black copy", step.value),
            }
        } else {
            step.column
        };
        let es = state.eligible_set(&step.pair)?;
        let Some(choice) = es.choices.iter().find(|c| c.column == column) else {
            structural!("{}: C{column} is not eligible (value {})", step.pair, step.value);
        };
        if choice.value != step.value {
            structural!("{}: C{column} would recolour {} instead of {}", step.pair, choice.value, step.value);
        }
        state = state.implement(&step.pair, column, mode)?;
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dia(parts: &[usize]) -> Diagram {
        Diagram::from_parts(parts).unwrap()
    }

    fn cols(t: &Tableau) -> Vec<Vec<String>> {
        t.columns()
            .iter()
            .map(|c| c.iter().map(|x| if x.is_black() { x.entry.to_string() } else { format!("r{}", x.entry) }).collect())
            .collect()
    }

    fn grid(spec: &[&[&str]]) -> Vec<Vec<String>> {
        spec.iter().map(|c| c.iter().map(|s| s.to_string()).collect()).collect()
    }

    #[test]
    fn one_two_one_two_branches() {
        let d = dia(&[1, 2, 1, 2]);
        let p1 = d.pairs()[0];
        let p2 = d.pairs()[1];
        let r0 = ReverseState::new(&d);
        let es = r0.eligible_set(&p1).unwrap();
        assert_eq!(es.left_boundary, 1);
        assert_eq!(es.columns, vec![1, 3]);
        let r1 = r0.implement(&p1, 3, ShiftMode::Standard).unwrap();
        assert_eq!(cols(r1.tableau()), grid(&[&["1", "3"], &["2", "4"], &["r4"], &["5", "6"]]));
        let es = r1.eligible_set(&p2).unwrap();
        assert_eq!(es.left_boundary, 1);
        assert_eq!(es.columns, vec![1, 2, 4]);
        let upper = r1.implement(&p2, 2, ShiftMode::Standard).unwrap();
        assert_eq!(upper.red_set(), RedSet::new(vec![4, 4]));
        assert_eq!(cols(upper.tableau()), grid(&[&["1", "3", "4"], &["2", "r4"], &["r4"], &["5", "6"]]));
        let lower = r1.implement(&p2, 4, ShiftMode::Standard).unwrap();
        assert_eq!(lower.red_set(), RedSet::new(vec![4, 6]));
        assert_eq!(cols(lower.tableau()), grid(&[&["1", "3"], &["2", "4", "6"], &["r4"], &["5", "r6"]]));
        assert!(lower.tableau().is_standard_with_multiplicities());
    }

    #[test]
    fn hidden_rule_blocks_re_lowering() {
        let d = dia(&[1, 2, 2, 1]);
        let outer = d.pair_by_columns(1, 4).unwrap();
        let inner = d.pair_by_columns(2, 3).unwrap();
        let r1 = ReverseState::new(&d).implement(&outer, 4, ShiftMode::Standard).unwrap();
        assert_eq!(cols(r1.tableau()), grid(&[&["1", "3"], &["2", "5"], &["4", "6"], &["r6"]]));
        let es = r1.eligible_set(&inner).unwrap();
        let six = es.choices.iter().find(|c| c.value == 6).unwrap();
        assert!(!six.allowed);
        assert!(matches!(r1.implement(&inner, six.column, ShiftMode::Standard), Err(Error::HiddenRule(_))));
        let chart = enumerate_reverse(&d, &[outer, inner], ShiftMode::Standard).unwrap();
        assert_eq!(chart.leaf_red_sets(), vec![RedSet::new(vec![5, 6])]);
        assert_eq!(chart.rejections.len(), 1);
        assert_eq!(chart.rejections[0].would_be, RedSet::new(vec![6, 6]));
    }

    #[test]
    fn two_one_two_one_two_sequence() {
        let d = dia(&[2, 1, 2, 1, 2]);
        let seq = parse_sequence(&d, "C1,C3;C2,C4;C3,C5").unwrap();
        let chart = enumerate_reverse(&d, &seq, ShiftMode::Standard).unwrap();
        let got: Vec<String> = chart.leaf_red_sets().iter().map(|r| r.to_string()).collect();
        assert_eq!(got, vec!["(4,5,8)", "(5,6,6)", "(5,6,8)"]);
    }

    fn seven_column_chart(order: &str) -> FlowChart {
        let d = dia(&[1, 2, 3, 1, 1, 3, 2]);
        let seq = parse_sequence(&d, order).unwrap();
        enumerate_reverse(&d, &seq, ShiftMode::Standard).unwrap()
    }

    #[test]
    fn flow_chart_first_order() {
        let chart = seven_column_chart("C1,C4;C4,C5;C2,C7;C3,C6");
        let got: Vec<String> = chart.leaf_red_sets().iter().map(|r| r.to_string()).collect();
        assert_eq!(got, vec!["(7,7,7,8)", "(7,7,8,11)", "(7,8,8,8)", "(7,8,8,11)", "(7,8,11,13)"]);
        assert!(chart.rejections.iter().any(|r| r.would_be == RedSet::new(vec![7, 8, 13, 13])));
        // After the two height-one pairs the tableau is the common prefix.
        let prefix = chart.nodes.iter().find(|n| n.stage == 2).unwrap();
        assert_eq!(
            cols(prefix.state.tableau()),
            grid(&[&["1", "3"], &["2", "5", "6"], &["4", "7"], &["r7", "8"], &["r8"], &["9", "10", "11"], &["12", "13"]])
        );
        let stage3: Vec<&FlowNode> = chart.nodes.iter().filter(|n| n.stage == 3).collect();
        assert_eq!(stage3.len(), 3);
    }

    #[test]
    fn flow_chart_second_order() {
        let chart = seven_column_chart("C1,C4;C4,C5;C3,C6;C2,C7");
        let got: Vec<String> = chart.leaf_red_sets().iter().map(|r| r.to_string()).collect();
        assert_eq!(got, vec!["(7,7,8,11)", "(7,8,8,11)", "(7,8,10,11)", "(7,8,11,13)"]);
    }

    #[test]
    fn twenty_boxes_both_modes() {
        let d = dia(&[3, 4, 2, 1, 2, 4, 3, 1]);
        let order = [(3, 5, 5), (4, 8, 5), (2, 6, 6), (1, 7, 6)];
        for mode in [ShiftMode::Standard, ShiftMode::Extreme] {
            let mut st = ReverseState::new(&d);
            for (l, r, c) in order {
                st = st.implement(&d.pair_by_columns(l, r).unwrap(), c, mode).unwrap();
            }
            assert_eq!(st.red_set(), RedSet::new(vec![11, 12, 15, 16]));
            let expect = match mode {
                ShiftMode::Standard => grid(&[
                    &["1", "2", "3"],
                    &["4", "5", "6", "7", "16"],
                    &["8", "9", "12", "15"],
                    &["10", "11"],
                    &["r11", "r12"],
                    &["13", "14", "r15", "r16"],
                    &["17", "18", "19"],
                    &["20"],
                ]),
                ShiftMode::Extreme => grid(&[
                    &["1", "2", "3", "7", "16"],
                    &["4", "5", "6", "15"],
                    &["8", "9", "12"],
                    &["10", "11"],
                    &["r11", "r12"],
                    &["13", "14", "r15", "r16"],
                    &["17", "18", "19"],
                    &["20"],
                ]),
            };
            assert_eq!(cols(st.tableau()), expect, "{mode:?}");
        }
    }

    #[test]
    fn excluded_roots_of_one_two_one_two_one() {
        let d = dia(&[1, 2, 1, 2, 1]);
        let t = Tableau::from_columns(
            7,
            vec![
                vec![Cell::black(1), Cell::black(3), Cell::black(4)],
                vec![Cell::black(2), Cell::red(4)],
                vec![Cell::red(4), Cell::black(6)],
                vec![Cell::black(5), Cell::black(7)],
                vec![Cell::red(7)],
            ],
            Provenance::Reverse,
        );
        let x = excluded_roots(&d, &t);
        let expect: RootSet = [(1, 3), (1, 4), (2, 4), (3, 4), (4, 6), (5, 7)].into_iter().collect();
        assert_eq!(x, expect);
    }

    #[test]
    fn trapezium_at_rectangle_stage() {
        let d = dia(&[1, 2, 1, 2]);
        let st = ReverseState::new(&d);
        for p in d.pairs() {
            let tz = st.trapezium(p).unwrap();
            assert_eq!(tz.black_count, d.degree(p));
            assert_eq!(tz.composite_line_count(), d.degree(p));
        }
        let p2 = d.pairs()[1];
        assert_eq!(st.horizontal_lines(&p2).unwrap(), vec![(2, 4), (4, 5), (3, 6)]);
    }

    #[test]
    fn trapezium_count_drops_when_its_pair_is_implemented() {
        let d = dia(&[3, 1, 3, 1, 3]);
        let inner = d.pair_by_columns(2, 4).unwrap();
        let left = d.pair_by_columns(1, 3).unwrap();
        let watched = d.pair_by_columns(3, 5).unwrap();
        let st = ReverseState::new(&d);
        let a = st.eligible_set(&inner).unwrap().choices[0].column;
        let st = st.implement(&inner, a, ShiftMode::Standard).unwrap();
        let before = st.trapezium(&watched).unwrap();
        assert_eq!(before.black_count, d.degree(&watched));
        assert_eq!(before.black_count, 4);
        assert_eq!(before.closed_black_count, 7);
        let es = st.eligible_set(&left).unwrap();
        let c = es.choices.iter().find(|c| c.allowed).unwrap();
        assert_eq!(c.value, 7);
        let st2 = st.implement(&left, c.column, ShiftMode::Standard).unwrap();
        // The 7 of the left boundary turns red: the closed trapezium loses a
        // black entry while the left trapezium proper keeps all four.
        let after = st2.trapezium(&watched).unwrap();
        assert_eq!(after.closed_black_count, 6);
        assert_eq!(after.black_count, 4);
        assert!(!after.red_in_bottom_row);
        let es = st2.eligible_set(&watched).unwrap();
        let st3 = st2.implement(&watched, es.choices[0].column, ShiftMode::Standard).unwrap();
        let last = st3.trapezium(&watched).unwrap();
        assert_eq!(last.black_count, 3);
        assert!(last.red_in_bottom_row);
    }
}
