//! Compositions, column diagrams and their neighbouring-column catalogue.
//!
//! A composition `(c_1, …, c_k)` of `n` fixes a diagram with `k` columns of
//! heights `c_r`.  Columns and rows are numbered from 1.  The initial filling
//! puts `1..=n` down the columns from left to right, so column `r` holds a
//! contiguous range of values; that range is also the `r`-th diagonal block of
//! the matrix picture.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An ordered list of positive parts.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Composition {
    parts: Vec<usize>,
}

impl Composition {
    /// Builds a composition, rejecting empty lists and zero parts.
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidInput("a composition needs at least one part".into()));
        }
        if let Some(pos) = parts.iter().position(|&p| p == 0) {
            return Err(Error::InvalidInput(format!(
                "part {} is zero; every part must be positive",
                pos + 1
            )));
        }
        Ok(Self { parts })
    }

    /// The parts `c_1..c_k`.
    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    /// Number of parts `k`.
    pub fn k(&self) -> usize {
        self.parts.len()
    }

    /// The sum `n` of the parts.
    pub fn n(&self) -> usize {
        self.parts.iter().sum()
    }

    /// All `2^{n-1}` compositions of `n`, in lexicographic order of parts.
    pub fn all_of(n: usize) -> Vec<Composition> {
        assert!(n >= 1, "compositions of zero are not represented");
        let mut out = Vec::with_capacity(1 << (n - 1));
        // Bit `b` of `mask` set means "cut after position b+1".
        for mask in 0u64..(1u64 << (n - 1)) {
            let mut parts = Vec::new();
            let mut run = 1;
            for b in 0..n - 1 {
                if mask >> b & 1 == 1 {
                    parts.push(run);
                    run = 1;
                } else {
                    run += 1;
                }
            }
            parts.push(run);
            out.push(Composition { parts });
        }
        out.sort();
        out
    }
}

impl FromStr for Composition {
    type Err = Error;

    /// Parses a comma-separated list such as `"1,2,3,1,1,3,2"`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().trim_start_matches('(').trim_end_matches(')');
        if s.is_empty() {
            return Err(Error::InvalidInput("empty composition".into()));
        }
        let parts = s
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::InvalidInput(format!("`{}` is not a positive integer", p.trim())))
            })
            .collect::<Result<Vec<_>>>()?;
        Composition::new(parts)
    }
}

impl fmt::Display for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
        write!(f, "{}", s.join(","))
    }
}

/// Two equal-height columns with no column of that height strictly between.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Pair {
    /// Left column index (1-based).
    pub left: usize,
    /// Right column index (1-based).
    pub right: usize,
    /// Common height `s` of both columns.
    pub height: usize,
}

impl Pair {
    /// True when column `r` lies in the closed interval `[left, right]`.
    pub fn spans(&self, r: usize) -> bool {
        self.left <= r && r <= self.right
    }
}

impl fmt::Display for Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(C{},C{})", self.left, self.right)
    }
}

/// Parses `"C2,C4"` or `"2,4"` into a `(left, right)` column pair.
pub fn parse_column_pair(s: &str) -> Result<(usize, usize)> {
    let cols: Vec<&str> = s.trim().trim_start_matches('(').trim_end_matches(')').split(',').collect();
    if cols.len() != 2 {
        return Err(Error::InvalidInput(format!("`{s}` is not a column pair like C2,C4")));
    }
    let parse = |c: &str| {
        c.trim()
            .trim_start_matches(['C', 'c'])
            .parse::<usize>()
            .map_err(|_| Error::InvalidInput(format!("`{c}` is not a column name")))
    };
    Ok((parse(cols[0])?, parse(cols[1])?))
}

/// A box `(column, row)`, both 1-based.
pub type BoxPos = (usize, usize);

/// The rectangle `R^s ∩ [C, C']` cut out by a neighbouring pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Rectangle {
    /// The pair defining the rectangle.
    pub pair: Pair,
    /// All boxes of rows `1..=s` in columns `[C, C']`.
    pub boxes: Vec<BoxPos>,
    /// The same boxes without those of the left column `C`.
    pub left_boxes: Vec<BoxPos>,
}

impl Rectangle {
    /// Size of the left rectangle, which is the degree of the pair's invariant.
    pub fn degree(&self) -> usize {
        self.left_boxes.len()
    }
}

/// The column diagram of a composition together with derived geometry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagram {
    composition: Composition,
    /// First value of each column in the initial filling (index 0 = column 1).
    column_start: Vec<usize>,
    /// Column of each value (index 0 unused).
    block_of: Vec<usize>,
    pairs: Vec<Pair>,
}

impl Diagram {
    /// Builds the diagram of a composition and its neighbouring-pair catalogue.
    pub fn new(composition: Composition) -> Self {
        let mut column_start = Vec::with_capacity(composition.k());
        let mut block_of = vec![0; composition.n() + 1];
        let mut next = 1;
        for (r, &c) in composition.parts().iter().enumerate() {
            column_start.push(next);
            for v in next..next + c {
                block_of[v] = r + 1;
            }
            next += c;
        }
        let pairs = find_pairs(composition.parts());
        Self { composition, column_start, block_of, pairs }
    }

    /// Convenience constructor from a slice of parts.
    pub fn from_parts(parts: &[usize]) -> Result<Self> {
        Ok(Self::new(Composition::new(parts.to_vec())?))
    }

    /// The underlying composition.
    pub fn composition(&self) -> &Composition {
        &self.composition
    }

    /// Size of the matrices, `n`.
    pub fn n(&self) -> usize {
        self.composition.n()
    }

    /// Number of columns, `k`.
    pub fn k(&self) -> usize {
        self.composition.k()
    }

    /// Height of column `r` (1-based).
    pub fn height(&self, r: usize) -> usize {
        self.composition.parts()[r - 1]
    }

    /// Column heights in order.
    pub fn heights(&self) -> &[usize] {
        self.composition.parts()
    }

    /// All boxes in column-major order (down each column, then left to right).
    pub fn boxes(&self) -> Vec<BoxPos> {
        (1..=self.k()).flat_map(|r| (1..=self.height(r)).map(move |s| (r, s))).collect()
    }

    /// The value at box `(r, s)` of the initial filling.
    pub fn entry(&self, r: usize, s: usize) -> usize {
        debug_assert!(s >= 1 && s <= self.height(r));
        self.column_start[r - 1] + s - 1
    }

    /// The values of column `r` in the initial filling.
    pub fn column_values(&self, r: usize) -> std::ops::Range<usize> {
        let start = self.column_start[r - 1];
        start..start + self.height(r)
    }

    /// The column (equivalently the diagonal block) holding value `v` initially.
    pub fn block(&self, v: usize) -> usize {
        self.block_of[v]
    }

    /// The box of value `v` in the initial filling.
    pub fn position(&self, v: usize) -> BoxPos {
        let r = self.block_of[v];
        (r, v - self.column_start[r - 1] + 1)
    }

    /// True when `x_{i,j}` is a nilradical coordinate: `i < j` in different blocks.
    pub fn in_nilradical(&self, i: usize, j: usize) -> bool {
        i < j && self.block_of[i] != self.block_of[j]
    }

    /// All nilradical coordinates `(i, j)` in lexicographic order.
    pub fn nilradical(&self) -> Vec<(usize, usize)> {
        let n = self.n();
        let mut out = Vec::new();
        for i in 1..=n {
            for j in i + 1..=n {
                if self.in_nilradical(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Neighbouring pairs, by height and then by left column.
    pub fn pairs(&self) -> &[Pair] {
        &self.pairs
    }

    /// Number of neighbouring pairs, `g`.
    pub fn pair_count(&self) -> usize {
        self.pairs.len()
    }

    /// Index of a pair inside [`Diagram::pairs`].
    pub fn pair_index(&self, p: &Pair) -> Option<usize> {
        self.pairs.iter().position(|q| q == p)
    }

    /// Looks up the neighbouring pair with the given columns.
    pub fn pair_by_columns(&self, left: usize, right: usize) -> Result<Pair> {
        self.pairs
            .iter()
            .copied()
            .find(|p| p.left == left && p.right == right)
            .ok_or_else(|| Error::InvalidInput(format!("(C{left},C{right}) is not a neighbouring pair")))
    }

    /// The height-`s` pair whose interval contains both `C_r` and `C_{r+1}`.
    pub fn surrounding_pair(&self, s: usize, r: usize) -> Option<Pair> {
        let mut found = None;
        for p in self.pairs.iter().filter(|p| p.height == s) {
            if p.left <= r && r < p.right {
                debug_assert!(found.is_none(), "two height-{s} pairs surround C{r},C{}", r + 1);
                found = Some(*p);
            }
        }
        found
    }

    /// The rectangle of a pair and its left part.
    pub fn rectangle(&self, p: &Pair) -> Rectangle {
        let mut boxes = Vec::new();
        let mut left_boxes = Vec::new();
        for r in p.left..=p.right {
            for s in 1..=p.height.min(self.height(r)) {
                boxes.push((r, s));
                if r != p.left {
                    left_boxes.push((r, s));
                }
            }
        }
        Rectangle { pair: *p, boxes, left_boxes }
    }

    /// Degree of the invariant attached to a pair (size of its left rectangle).
    pub fn degree(&self, p: &Pair) -> usize {
        self.rectangle(p).degree()
    }

    /// JSON description `{parts, n, pairs:[{left,right,height}]}`.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "parts": self.composition.parts(),
            "n": self.n(),
            "pairs": self.pairs,
        })
    }
}

/// Scans every height for consecutive columns of that height.
fn find_pairs(heights: &[usize]) -> Vec<Pair> {
    let max = heights.iter().copied().max().unwrap_or(0);
    let mut pairs = Vec::new();
    for s in 1..=max {
        let cols: Vec<usize> = (1..=heights.len()).filter(|&r| heights[r - 1] == s).collect();
        for w in cols.windows(2) {
            pairs.push(Pair { left: w[0], right: w[1], height: s });
        }
    }
    pairs
}
