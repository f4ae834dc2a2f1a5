//! Semi-invariant generators attached to neighbouring pairs.
//!
//! For a pair `(C, C')` of height `s`, restrict to the columns `C..=C'`
//! (their values form a contiguous range of size `N`), form
//! `c·Id + x` with `x` the generic nilradical matrix on that range, and take
//! the `(N−s)×(N−s)` minor on the first `N−s` rows and the last `N−s`
//! columns.  The coefficient of the lowest power of `c` in that minor is the
//! invariant.  It is multilinear of degree equal to the left rectangle size,
//! and is normalised so that the product of the horizontal links of the
//! rectangle's rows has coefficient `+1`.
//!
//! Two evaluation strategies are provided: an exact symbolic expansion (a
//! row-by-row Laplace expansion memoised on the set of used columns) and a
//! black box that evaluates the minor at a point for several values of `c`
//! and interpolates.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

use crate::component::ComponentTableau;
use crate::diagram::{Diagram, Pair};
use crate::error::{structural, Error, Result};
use crate::geometry::RootSet;
use crate::poly::{Assignment, Coord, Monomial, Polynomial, Substitution};
use crate::reverse::ReverseState;

/// The prime `2^61 − 1` used for randomised identity testing.
pub const PRIME: u64 = (1 << 61) - 1;

/// Default number of random evaluations per identity test.
pub const DEFAULT_TRIALS: u32 = 3;

/// Default seed of every randomised check.
pub const DEFAULT_SEED: u64 = 0x5eed_2024_0bad_cafe;

/// Largest matrix size expanded symbolically when every coordinate is kept.
pub const DEFAULT_SYMBOLIC_LIMIT: usize = 14;

fn mul_mod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % PRIME as u128) as u64
}

fn add_mod(a: u64, b: u64) -> u64 {
    let s = a + b;
    if s >= PRIME { s - PRIME } else { s }
}

fn sub_mod(a: u64, b: u64) -> u64 {
    if a >= b { a - b } else { a + PRIME - b }
}

fn pow_mod(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a);
        }
        a = mul_mod(a, a);
        e >>= 1;
    }
    r
}

fn inv_mod(a: u64) -> u64 {
    pow_mod(a, PRIME - 2)
}

/// Reduces a signed integer modulo [`PRIME`].
pub fn to_mod(v: i128) -> u64 {
    v.rem_euclid(PRIME as i128) as u64
}

/// Determinant modulo [`PRIME`] by Gaussian elimination.
pub fn det_mod(mut m: Vec<Vec<u64>>) -> u64 {
    let n = m.len();
    let mut det = 1u64;
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| m[r][col] != 0) else { return 0 };
        if piv != col {
            m.swap(piv, col);
            det = sub_mod(0, det);
        }
        det = mul_mod(det, m[col][col]);
        let inv = inv_mod(m[col][col]);
        for r in col + 1..n {
            if m[r][col] == 0 {
                continue;
            }
            let f = mul_mod(m[r][col], inv);
            for c in col..n {
                let t = mul_mod(f, m[col][c]);
                m[r][c] = sub_mod(m[r][c], t);
            }
        }
    }
    det
}

/// Exact determinant by fraction-free (Bareiss) elimination.
pub fn det_bareiss(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(piv) = (k + 1..n).find(|&r| !m[r][k].is_zero()) else { return BigInt::zero() };
            m.swap(piv, k);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

/// Coefficient of `t^k` of the polynomial of degree `< xs.len()` taking the
/// values `ys` at the points `xs`, over `Z/p`.
fn interpolate_coefficient_mod(xs: &[u64], ys: &[u64], k: usize) -> u64 {
    let n = xs.len();
    let mut acc = 0;
    for i in 0..n {
        // Basis polynomial prod_{j != i} (t - x_j) / (x_i - x_j).
        let mut basis = vec![1u64];
        let mut denom = 1u64;
        for j in 0..n {
            if j == i {
                continue;
            }
            let mut next = vec![0u64; basis.len() + 1];
            for (d, &b) in basis.iter().enumerate() {
                next[d + 1] = add_mod(next[d + 1], b);
                next[d] = sub_mod(next[d], mul_mod(b, xs[j]));
            }
            basis = next;
            denom = mul_mod(denom, sub_mod(xs[i], xs[j]));
        }
        let coeff = basis.get(k).copied().unwrap_or(0);
        acc = add_mod(acc, mul_mod(mul_mod(ys[i], coeff), inv_mod(denom)));
    }
    acc
}

/// Exact version of [`interpolate_coefficient_mod`].
fn interpolate_coefficient_exact(xs: &[BigInt], ys: &[BigInt], k: usize) -> BigRational {
    let n = xs.len();
    let mut acc = BigRational::zero();
    for i in 0..n {
        let mut basis = vec![BigInt::one()];
        let mut denom = BigInt::one();
        for j in 0..n {
            if j == i {
                continue;
            }
            let mut next = vec![BigInt::zero(); basis.len() + 1];
            for (d, b) in basis.iter().enumerate() {
                next[d + 1] += b;
                next[d] -= b * &xs[j];
            }
            basis = next;
            denom *= &xs[i] - &xs[j];
        }
        let coeff = basis.get(k).cloned().unwrap_or_default();
        acc += BigRational::new(&ys[i] * coeff, denom);
    }
    acc
}

/// An entry of the shifted generic matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Entry {
    Zero,
    C,
    Var(Coord),
}

/// The invariant of one neighbouring pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairInvariant {
    pair: Pair,
    /// First value of column `C`.
    base: usize,
    /// Column (block) of each local index.
    blocks: Vec<usize>,
    /// Size of the minor, `N − s`.
    size: usize,
    /// Power of `c` whose coefficient is taken.
    scalar_power: usize,
    degree: usize,
    distinguished: Monomial,
    sign: i128,
}

impl PairInvariant {
    /// Builds the invariant of `p` and fixes its sign.
    pub fn new(d: &Diagram, p: &Pair) -> Result<Self> {
        if d.pair_index(p).is_none() {
            return Err(Error::InvalidInput(format!("{p} is not a neighbouring pair")));
        }
        let s = p.height;
        let base = d.column_values(p.left).start;
        let end = d.column_values(p.right).end;
        let blocks: Vec<usize> = (base..end).map(|v| d.block(v)).collect();
        let total = blocks.len();
        let degree = d.degree(p);
        let size = total - s;
        if degree > size {
            structural!("degree {degree} exceeds minor size {size} for {p}");
        }
        let mut distinguished = Vec::new();
        for t in 1..=s {
            let cols: Vec<usize> = (p.left..=p.right).filter(|&r| d.height(r) >= t).collect();
            for w in cols.windows(2) {
                distinguished.push((d.entry(w[0], t), d.entry(w[1], t)));
            }
        }
        let mut inv = Self {
            pair: *p,
            base,
            blocks,
            size,
            scalar_power: size - degree,
            degree,
            distinguished: Monomial::from_coords(distinguished),
            sign: 1,
        };
        let at = inv.distinguished.clone();
        let raw = inv.eval_exact(|c| if at.exponent(c) > 0 { BigInt::one() } else { BigInt::zero() });
        inv.sign = if raw == BigInt::one() {
            1
        } else if raw == -BigInt::one() {
            -1
        } else {
            structural!("distinguished monomial of {p} has coefficient {raw}");
        };
        Ok(inv)
    }

    /// Invariants of every pair, in pair order.
    pub fn all(d: &Diagram) -> Result<Vec<Self>> {
        d.pairs().iter().map(|p| Self::new(d, p)).collect()
    }

    pub fn pair(&self) -> Pair {
        self.pair
    }

    /// Total degree (size of the left rectangle).
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// The normalising monomial (horizontal links of rows `1..=s`).
    pub fn distinguished(&self) -> &Monomial {
        &self.distinguished
    }

    /// Side of the minor.
    pub fn minor_size(&self) -> usize {
        self.size
    }

    /// Power of `c` whose coefficient is the invariant.
    pub fn scalar_power(&self) -> usize {
        self.scalar_power
    }

    /// Coordinates that may occur: nilradical coordinates of the column range.
    pub fn coordinates(&self) -> Vec<Coord> {
        let total = self.blocks.len();
        let mut out = Vec::new();
        for a in 0..total {
            for b in a + 1..total {
                if self.blocks[a] != self.blocks[b] {
                    out.push((self.base + a, self.base + b));
                }
            }
        }
        out
    }

    fn entry(&self, q: usize, q2: usize) -> Entry {
        let (a, b) = (q, q2 + self.pair.height);
        if a == b {
            Entry::C
        } else if a < b && self.blocks[a] != self.blocks[b] {
            Entry::Var((self.base + a, self.base + b))
        } else {
            Entry::Zero
        }
    }

    /// Number of distinct `c` values needed to interpolate the minor in `c`.
    fn c_points(&self) -> usize {
        self.size.saturating_sub(self.pair.height) + 1
    }

    /// Symbolic expansion after applying `sub` (pass the identity to keep
    /// everything).  Refuses sizes beyond `limit` when nothing is substituted
    /// and beyond `2 * limit` otherwise.
    pub fn symbolic(&self, sub: &Substitution, limit: usize) -> Result<Polynomial> {
        let cap = if *sub == Substitution::identity() { limit } else { 2 * limit };
        if self.blocks.len() > cap || self.size > 63 {
            return Err(Error::Capacity(format!(
                "{}: matrix of size {} exceeds the symbolic limit {cap}; use the black-box evaluator",
                self.pair,
                self.blocks.len()
            )));
        }
        let k0 = self.scalar_power;
        // State: used minor columns -> polynomial per power of c (0..=k0).
        let mut layer: HashMap<u64, Vec<Polynomial>> = HashMap::new();
        let mut start = vec![Polynomial::zero(); k0 + 1];
        start[0] = Polynomial::constant(1);
        layer.insert(0, start);
        for q in 0..self.size {
            let mut next: HashMap<u64, Vec<Polynomial>> = HashMap::new();
            for (mask, polys) in &layer {
                for q2 in 0..self.size {
                    if mask >> q2 & 1 == 1 {
                        continue;
                    }
                    let sign: i128 = if (mask >> (q2 + 1)).count_ones() % 2 == 0 { 1 } else { -1 };
                    let (shift, factor) = match self.entry(q, q2) {
                        Entry::Zero => continue,
                        Entry::C => (1, None),
                        Entry::Var(c) => match sub.get(c) {
                            Assignment::Value(0) => continue,
                            Assignment::Value(k) => (0, Some((None, k))),
                            Assignment::Keep => (0, Some((Some(c), 1))),
                        },
                    };
                    let slot = next.entry(mask | 1 << q2).or_insert_with(|| vec![Polynomial::zero(); k0 + 1]);
                    for (deg, p) in polys.iter().enumerate() {
                        if p.is_zero() || deg + shift > k0 {
                            continue;
                        }
                        let term = match factor {
                            None => p.scale(sign)?,
                            Some((None, k)) => p.scale(sign.checked_mul(k).ok_or(Error::Overflow("entry scaling"))?)?,
                            Some((Some(c), _)) => p.mul_var_scaled(c, sign)?,
                        };
                        slot[deg + shift].add_assign(&term)?;
                    }
                }
            }
            next.retain(|_, v| v.iter().any(|p| !p.is_zero()));
            layer = next;
        }
        let full = (1u64 << self.size) - 1;
        let Some(polys) = layer.remove(&full) else { return Ok(Polynomial::zero()) };
        if let Some(low) = polys[..k0].iter().position(|p| !p.is_zero()) {
            structural!("{}: minor has a nonzero coefficient at c^{low} below c^{k0}", self.pair);
        }
        polys[k0].scale(self.sign)
    }

    /// Evaluates modulo [`PRIME`] at the point given by `value`.
    pub fn eval_mod(&self, value: impl Fn(Coord) -> u64) -> u64 {
        let points = self.c_points();
        let xs: Vec<u64> = (1..=points as u64).collect();
        let ys: Vec<u64> = xs
            .iter()
            .map(|&cv| {
                let m = (0..self.size)
                    .map(|q| {
                        (0..self.size)
                            .map(|q2| match self.entry(q, q2) {
                                Entry::Zero => 0,
                                Entry::C => cv,
                                Entry::Var(c) => value(c) % PRIME,
                            })
                            .collect()
                    })
                    .collect();
                det_mod(m)
            })
            .collect();
        let v = interpolate_coefficient_mod(&xs, &ys, self.scalar_power);
        if self.sign < 0 { sub_mod(0, v) } else { v }
    }

    /// Exact evaluation over the integers (Bareiss at several `c`, then
    /// rational interpolation).
    pub fn eval_exact(&self, value: impl Fn(Coord) -> BigInt) -> BigInt {
        let points = self.c_points();
        let xs: Vec<BigInt> = (0..points as i64).map(BigInt::from).collect();
        let ys: Vec<BigInt> = xs
            .iter()
            .map(|cv| {
                let m = (0..self.size)
                    .map(|q| {
                        (0..self.size)
                            .map(|q2| match self.entry(q, q2) {
                                Entry::Zero => BigInt::zero(),
                                Entry::C => cv.clone(),
                                Entry::Var(c) => value(c),
                            })
                            .collect()
                    })
                    .collect();
                det_bareiss(m)
            })
            .collect();
        let v = interpolate_coefficient_exact(&xs, &ys, self.scalar_power);
        assert!(v.is_integer(), "interpolated coefficient of an integer polynomial is integral");
        v.to_integer() * BigInt::from(self.sign)
    }
}

/// Outcome of a randomised zero test.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroTest {
    pub pair: Pair,
    /// True when every evaluation vanished.
    pub zero: bool,
    pub trials: u32,
    /// Probability that a nonzero polynomial passed every trial.
    pub failure_bound: f64,
    /// The first nonzero value seen, which certifies non-vanishing.
    pub witness: Option<u64>,
}

/// Tests whether `inv` vanishes on the span of the nilradical coordinates
/// outside `excluded`, by evaluating at random points of that subspace.
pub fn is_zero_on_subspace(inv: &PairInvariant, excluded: &RootSet, trials: u32, rng: &mut ChaCha20Rng) -> ZeroTest {
    assert!(trials >= 1, "at least one trial");
    let coords = inv.coordinates();
    for _ in 0..trials {
        let values: HashMap<Coord, u64> =
            coords.iter().map(|&c| (c, if excluded.contains(&c) { 0 } else { rng.gen_range(0..PRIME) })).collect();
        let v = inv.eval_mod(|c| values[&c]);
        if v != 0 {
            return ZeroTest { pair: inv.pair, zero: false, trials, failure_bound: 0.0, witness: Some(v) };
        }
    }
    let bound = (inv.degree as f64 / PRIME as f64).powi(trials as i32);
    ZeroTest { pair: inv.pair, zero: true, trials, failure_bound: bound, witness: None }
}

/// A seeded generator for the randomised checks.
pub fn seeded_rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Restriction of an invariant to the subspace of a tableau, with the
/// verdict of both the randomised and (if small) the symbolic test.
pub fn vanishing_report(d: &Diagram, excluded: &RootSet, trials: u32, seed: u64) -> Result<Vec<ZeroTest>> {
    let mut rng = seeded_rng(seed);
    PairInvariant::all(d).map(|all| all.iter().map(|inv| is_zero_on_subspace(inv, excluded, trials, &mut rng)).collect())
}

/// Image of one invariant on the affine slice of a component tableau.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SliceImage {
    pub pair: Pair,
    /// The restricted polynomial, printed.
    pub image: String,
    /// `(sign, coordinate)` when the image is `±` one starred coordinate.
    pub linear: Option<(i128, Coord)>,
}

/// Result of [`weierstrass_check`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WeierstrassReport {
    pub images: Vec<SliceImage>,
    /// Every image is `±` a starred coordinate and they are all distinct.
    pub ok: bool,
}

/// Sets label-`1` coordinates to one, keeps label-`*` coordinates and zeroes
/// the rest; each invariant must become `±` a single starred coordinate, the
/// `g` of them distinct.
pub fn weierstrass_check(ct: &ComponentTableau, limit: usize) -> Result<WeierstrassReport> {
    let y = ct.star_line_roots();
    let mut sub = Substitution::keep_only(y.iter().copied());
    for c in ct.one_line_roots() {
        sub = sub.set(c, Assignment::Value(1));
    }
    let mut images = Vec::new();
    for inv in PairInvariant::all(ct.diagram())? {
        let p = inv.symbolic(&sub, limit)?;
        let linear = match p.terms().collect::<Vec<_>>()[..] {
            [(m, c)] if (c == 1 || c == -1) && m.degree() == 1 && y.contains(&m.factors()[0].0) => {
                Some((c, m.factors()[0].0))
            }
            _ => None,
        };
        images.push(SliceImage { pair: inv.pair(), image: p.to_string(), linear });
    }
    let hit: std::collections::BTreeSet<Coord> = images.iter().filter_map(|i| i.linear.map(|l| l.1)).collect();
    let ok = images.iter().all(|i| i.linear.is_some()) && hit.len() == images.len();
    Ok(WeierstrassReport { images, ok })
}

/// Result of [`horizontal_monomial_check`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HorizontalReport {
    pub pair: Pair,
    /// The horizontal lines of the trapezium.
    pub lines: Vec<Coord>,
    /// Coefficient of their product in the invariant.
    pub coefficient: i128,
    /// None of the lines is an excluded root.
    pub avoids_excluded: bool,
}

impl HorizontalReport {
    /// True when the monomial certifies non-vanishing on the subspace.
    pub fn certifies_nonzero(&self) -> bool {
        self.avoids_excluded && self.coefficient != 0
    }
}

/// Builds the horizontal lines of the trapezium of `p` and reads the
/// coefficient of their product in the invariant.  Since the invariant is
/// multilinear and homogeneous of degree equal to the number of lines,
/// keeping exactly those coordinates isolates that coefficient.
pub fn horizontal_monomial_check(state: &ReverseState, p: &Pair, limit: usize) -> Result<HorizontalReport> {
    let lines = state.horizontal_lines(p)?;
    let excluded = state.excluded_roots();
    let inv = PairInvariant::new(state.diagram(), p)?;
    if lines.len() != inv.degree() {
        structural!("{p}: {} horizontal lines for an invariant of degree {}", lines.len(), inv.degree());
    }
    let restricted = inv.symbolic(&Substitution::keep_only(lines.iter().copied()), limit)?;
    let coefficient = restricted.coefficient(&Monomial::from_coords(lines.iter().copied()));
    Ok(HorizontalReport { pair: *p, avoids_excluded: lines.iter().all(|l| !excluded.contains(l)), lines, coefficient })
}

/// Exact check that `inv(g x g⁻¹) = inv(x)` for a unipotent `g`.
///
/// `g` is given by its strictly upper entries that are allowed in the derived
/// parabolic (above the diagonal anywhere); `x` by its nilradical entries.
pub fn conjugation_preserves(
    d: &Diagram,
    inv: &PairInvariant,
    g_upper: &BTreeMap<Coord, i64>,
    x: &BTreeMap<Coord, i64>,
) -> bool {
    let n = d.n();
    let mut g = vec![vec![BigInt::zero(); n]; n];
    for (i, row) in g.iter_mut().enumerate() {
        row[i] = BigInt::one();
    }
    for (&(i, j), &v) in g_upper {
        assert!(i < j, "unipotent parameters are strictly upper triangular");
        g[i - 1][j - 1] = BigInt::from(v);
    }
    // Inverse of a unipotent upper-triangular integer matrix by back substitution.
    let mut ginv = vec![vec![BigInt::zero(); n]; n];
    for j in 0..n {
        ginv[j][j] = BigInt::one();
        for i in (0..j).rev() {
            let mut acc = BigInt::zero();
            for k in i + 1..=j {
                acc += &g[i][k] * &ginv[k][j];
            }
            ginv[i][j] = -acc;
        }
    }
    let mut xm = vec![vec![BigInt::zero(); n]; n];
    for (&(i, j), &v) in x {
        assert!(d.in_nilradical(i, j), "x lies in the nilradical");
        xm[i - 1][j - 1] = BigInt::from(v);
    }
    let mul = |a: &Vec<Vec<BigInt>>, b: &Vec<Vec<BigInt>>| {
        let mut out = vec![vec![BigInt::zero(); n]; n];
        for i in 0..n {
            for k in 0..n {
                if a[i][k].is_zero() {
                    continue;
                }
                for j in 0..n {
                    out[i][j] += &a[i][k] * &b[k][j];
                }
            }
        }
        out
    };
    let y = mul(&mul(&g, &xm), &ginv);
    let before = inv.eval_exact(|(i, j)| xm[i - 1][j - 1].clone());
    let after = inv.eval_exact(|(i, j)| y[i - 1][j - 1].clone());
    before == after
}

/// Converts a modular value to a signed representative, if small.
pub fn signed_residue(v: u64) -> i128 {
    let half = PRIME / 2;
    if v > half { v as i128 - PRIME as i128 } else { v as i128 }
}
