//! Root-set geometry: excluded, starred and labelled coordinates, covering,
//! and an exact tangent-space rank certificate for the codimension of a
//! candidate component.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::component::ComponentTableau;
use crate::diagram::Diagram;
use crate::error::Result;
use crate::reverse::ReverseState;
use crate::tableau::LineLabel;

/// A set of matrix coordinates `(i, j)`.
pub type RootSet = BTreeSet<(usize, usize)>;

/// Result of [`root_set_properties`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RootSetReport {
    /// Starred coordinates that are not excluded.
    pub stars_not_excluded: Vec<(usize, usize)>,
    /// Label-`1` coordinates that are excluded.
    pub ones_excluded: Vec<(usize, usize)>,
    /// Pairs of label-`1` coordinates sharing a matrix row or column.
    pub rook_conflicts: Vec<((usize, usize), (usize, usize))>,
    /// Excluded roots that are not starred.
    pub unstarred: Vec<(usize, usize)>,
}

impl RootSetReport {
    pub fn ok(&self) -> bool {
        self.stars_not_excluded.is_empty() && self.ones_excluded.is_empty() && self.rook_conflicts.is_empty()
    }
}

/// Checks that every starred root is excluded, that no labelled-`1` root is
/// excluded, and that the labelled-`1` roots use distinct rows and columns.
pub fn root_set_properties(excluded: &RootSet, stars: &RootSet, ones: &RootSet) -> RootSetReport {
    let mut rook_conflicts = Vec::new();
    let sv: Vec<_> = ones.iter().copied().collect();
    for (a, p) in sv.iter().enumerate() {
        for q in &sv[a + 1..] {
            if p.0 == q.0 || p.1 == q.1 {
                rook_conflicts.push((*p, *q));
            }
        }
    }
    RootSetReport {
        stars_not_excluded: stars.difference(excluded).copied().collect(),
        ones_excluded: ones.intersection(excluded).copied().collect(),
        rook_conflicts,
        unstarred: excluded.difference(stars).copied().collect(),
    }
}

/// Result of [`covering_check`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoveringReport {
    /// Unstarred excluded roots with no label-`1` coordinate strictly to their left in the same row.
    pub uncovered: Vec<(usize, usize)>,
    /// Starred coordinates that are (wrongly) covered.
    pub covered_stars: Vec<(usize, usize)>,
}

impl CoveringReport {
    pub fn ok(&self) -> bool {
        self.uncovered.is_empty() && self.covered_stars.is_empty()
    }
}

/// True when some `(i, k)` in `ones` has `k < j`.
pub fn is_covered(ones: &RootSet, (i, j): (usize, usize)) -> bool {
    ones.iter().any(|&(a, k)| a == i && k < j)
}

/// Every root of `targets` must be covered by `ones`; no starred root may be.
pub fn covering_check(ones: &RootSet, targets: &RootSet, stars: &RootSet) -> CoveringReport {
    CoveringReport {
        uncovered: targets.iter().copied().filter(|&c| !is_covered(ones, c)).collect(),
        covered_stars: stars.iter().copied().filter(|&c| is_covered(ones, c)).collect(),
    }
}

/// Which Lie algebra acts in the tangent computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Acting {
    /// Strictly upper triangular matrices.
    StrictlyUpper,
    /// All upper triangular matrices.
    Upper,
}

/// Result of [`tangent_rank_check`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RankReport {
    pub acting: Acting,
    /// Dimension of the nilradical.
    pub dim_m: usize,
    /// Dimension of the subspace `u`.
    pub dim_u: usize,
    /// Rank of the span of unit coordinates, starred roots and brackets.
    pub rank: usize,
    /// Coordinates whose unit vectors are not in the span.
    pub missing: Vec<(usize, usize)>,
}

impl RankReport {
    pub fn ok(&self) -> bool {
        self.rank == self.dim_m
    }

    pub fn deficit(&self) -> usize {
        self.dim_m - self.rank
    }
}

/// Rank of a list of sparse integer vectors over the rationals.
pub fn rational_rank(rows: &[BTreeMap<usize, i64>]) -> usize {
    let mut basis: Vec<BTreeMap<usize, BigRational>> = Vec::new();
    for row in rows {
        let mut v: BTreeMap<usize, BigRational> =
            row.iter().filter(|(_, &c)| c != 0).map(|(&k, &c)| (k, BigRational::from_integer(c.into()))).collect();
        for b in &basis {
            let (&pivot, pc) = b.iter().next().expect("basis vectors are nonzero");
            if let Some(vc) = v.get(&pivot).cloned() {
                let f = vc / pc;
                for (k, bc) in b {
                    let e = v.entry(*k).or_insert_with(BigRational::zero);
                    *e -= &f * bc;
                }
                v.retain(|_, c| !c.is_zero());
            }
        }
        if !v.is_empty() {
            // Keep basis in echelon form: pivot = smallest index.
            let (&p, pc) = v.iter().next().expect("nonzero");
            let pc = pc.clone();
            for b in basis.iter_mut() {
                if let Some(bc) = b.get(&p).cloned() {
                    let f = bc / &pc;
                    for (k, vc) in &v {
                        let e = b.entry(*k).or_insert_with(BigRational::zero);
                        *e -= &f * vc;
                    }
                    b.retain(|_, c| !c.is_zero());
                }
            }
            basis.push(v);
            basis.sort_by_key(|b| *b.keys().next().expect("nonzero"));
        }
    }
    basis.len()
}

/// Checks that the nilradical is spanned by three pieces: the coordinates
/// outside `excluded`, the starred coordinates, and the brackets of the
/// acting algebra with `Σ E_{i,j}` over `ones`, projected to the nilradical.
pub fn tangent_rank_check(d: &Diagram, excluded: &RootSet, ones: &RootSet, stars: &RootSet, acting: Acting) -> RankReport {
    let m = d.nilradical();
    let unit_coords: BTreeSet<(usize, usize)> =
        m.iter().copied().filter(|c| !excluded.contains(c) || stars.contains(c)).collect();
    // Unit vectors already span these coordinates; reduce the brackets modulo them.
    let z: Vec<(usize, usize)> = m.iter().copied().filter(|c| !unit_coords.contains(c)).collect();
    let zpos: BTreeMap<(usize, usize), usize> = z.iter().enumerate().map(|(k, &c)| (c, k)).collect();
    let n = d.n();
    let mut rows = Vec::new();
    for a in 1..=n {
        let from = if acting == Acting::Upper { a } else { a + 1 };
        for b in from..=n {
            // [E_ab, E_ij] = δ_bi E_aj − δ_ja E_ib.
            let mut v: BTreeMap<usize, i64> = BTreeMap::new();
            for &(i, j) in ones {
                if b == i {
                    if let Some(&k) = zpos.get(&(a, j)) {
                        *v.entry(k).or_default() += 1;
                    }
                }
                if j == a {
                    if let Some(&k) = zpos.get(&(i, b)) {
                        *v.entry(k).or_default() -= 1;
                    }
                }
            }
            v.retain(|_, c| *c != 0);
            if !v.is_empty() {
                rows.push(v);
            }
        }
    }
    let z_rank = rational_rank(&rows);
    let missing = if z_rank < z.len() {
        z.iter()
            .copied()
            .filter(|c| {
                let mut with = rows.clone();
                with.push(BTreeMap::from([(zpos[c], 1)]));
                rational_rank(&with) > z_rank
            })
            .collect()
    } else {
        Vec::new()
    };
    RankReport {
        acting,
        dim_m: m.len(),
        dim_u: m.iter().filter(|c| !excluded.contains(c)).count(),
        rank: unit_coords.len() + z_rank,
        missing,
    }
}

/// Everything checked for one component tableau.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComponentGeometry {
    pub sets: RootSetReport,
    pub covering: CoveringReport,
    pub rank_strict: RankReport,
    pub rank_upper: RankReport,
}

impl ComponentGeometry {
    /// Acceptance keys on the strictly upper triangular variant.
    pub fn ok(&self) -> bool {
        self.sets.ok() && self.covering.ok() && self.rank_strict.ok()
    }
}

/// Runs the root-set checks on a component tableau.
pub fn component_geometry(ct: &ComponentTableau) -> Result<ComponentGeometry> {
    let x = ct.excluded_roots()?;
    sets_geometry(ct.diagram(), &x, &ct.star_line_roots(), &ct.one_line_roots())
}

/// Runs the root-set checks on explicit sets.
pub fn sets_geometry(d: &Diagram, excluded: &RootSet, stars: &RootSet, ones: &RootSet) -> Result<ComponentGeometry> {
    let sets = root_set_properties(excluded, stars, ones);
    let unstarred: RootSet = sets.unstarred.iter().copied().collect();
    Ok(ComponentGeometry {
        covering: covering_check(ones, &unstarred, stars),
        rank_strict: tangent_rank_check(d, excluded, ones, stars, Acting::StrictlyUpper),
        rank_upper: tangent_rank_check(d, excluded, ones, stars, Acting::Upper),
        sets,
    })
}

/// Result of [`coincidence_check`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoincidenceReport {
    /// Excluded roots of the second tableau missing from the first.
    pub only_in_second: Vec<(usize, usize)>,
    /// Excluded roots of the first tableau missing from the second.
    pub only_in_first: Vec<(usize, usize)>,
    pub covering: CoveringReport,
    pub rank: RankReport,
}

impl CoincidenceReport {
    pub fn ok(&self) -> bool {
        self.covering.ok() && self.rank.ok()
    }
}

/// The two excluded-root sets define the same closure when their union,
/// starred roots aside, is still covered by `ones` and still has full
/// tangent rank.
pub fn coincidence_of_sets(d: &Diagram, first: &RootSet, second: &RootSet, ones: &RootSet, stars: &RootSet) -> CoincidenceReport {
    let union: RootSet = first.union(second).copied().collect();
    let unstarred: RootSet = union.difference(stars).copied().collect();
    CoincidenceReport {
        only_in_second: second.difference(first).copied().collect(),
        only_in_first: first.difference(second).copied().collect(),
        covering: covering_check(ones, &unstarred, stars),
        rank: tangent_rank_check(d, &union, ones, stars, Acting::StrictlyUpper),
    }
}

/// Coincidence of a component tableau with a reverse tableau of the same Red Set.
pub fn coincidence_check(ct: &ComponentTableau, rs: &ReverseState) -> Result<CoincidenceReport> {
    if ct.red_set() != rs.red_set() {
        return Err(crate::error::Error::InvalidInput(format!(
            "Red Sets differ: {} vs {}",
            ct.red_set(),
            rs.red_set()
        )));
    }
    Ok(coincidence_of_sets(ct.diagram(), &ct.excluded_roots()?, &rs.excluded_roots(), &ct.one_line_roots(), &ct.star_line_roots()))
}

/// Geometry of one label-`1` line inside the reverse tableau.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LinePlacement {
    pub i: usize,
    pub j: usize,
    /// Column of the rightmost `i` and of the black `j`.
    pub columns: (usize, usize),
    /// Rows descended from the rightmost `i` to the black `j`.
    pub descent: isize,
    /// Starred coordinates `(i, j')` with `j' < j`.
    pub expected: usize,
}

impl LinePlacement {
    pub fn ok(&self) -> bool {
        self.columns.1 > self.columns.0 && self.descent == self.expected as isize
    }
}

/// Result of [`line_geometry_check`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LineGeometryReport {
    pub lines: Vec<LinePlacement>,
    /// Starred coordinates that are not excluded roots of the reverse tableau.
    pub stars_not_excluded: Vec<(usize, usize)>,
}

impl LineGeometryReport {
    pub fn ok(&self) -> bool {
        self.lines.iter().all(LinePlacement::ok) && self.stars_not_excluded.is_empty()
    }
}

/// Places the label-`1` lines of `ct` in the reverse tableau `rs`: each must
/// run rightwards from the rightmost `i` to the black `j`, descending once for
/// every starred coordinate to its left in matrix row `i`; each starred
/// coordinate must be excluded in `rs`.
pub fn line_geometry_check(rs: &ReverseState, ct: &ComponentTableau) -> LineGeometryReport {
    let t = rs.tableau();
    let y = ct.star_line_roots();
    let mut lines = Vec::new();
    for l in ct.lines_one.iter().filter(|l| l.label == LineLabel::One) {
        let from = t.rightmost(l.i).expect("every value occurs");
        let to = t.black_position(l.j).expect("every value has a black copy");
        lines.push(LinePlacement {
            i: l.i,
            j: l.j,
            columns: (from.0, to.0),
            descent: to.1 as isize - from.1 as isize,
            expected: y.iter().filter(|&&(a, b)| a == l.i && b < l.j).count(),
        });
    }
    let x = rs.excluded_roots();
    LineGeometryReport { lines, stars_not_excluded: y.difference(&x).copied().collect() }
}
