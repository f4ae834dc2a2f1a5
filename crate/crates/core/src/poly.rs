//! Exact sparse multivariate polynomials in the nilradical coordinates.
//!
//! Coefficients are `i128` with checked arithmetic; any overflow is reported
//! as [`Error::Overflow`] rather than silently wrapping.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use serde::Serialize;

use crate::error::{Error, Result};

/// A matrix coordinate `x_{i,j}`.
pub type Coord = (usize, usize);

/// A monomial: coordinates with positive exponents, sorted by coordinate.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(Vec<(Coord, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Self::default()
    }

    /// Product of distinct coordinates, each to the first power.
    pub fn from_coords(coords: impl IntoIterator<Item = Coord>) -> Self {
        let mut m = Self::one();
        for c in coords {
            m = m.mul(&Self(vec![(c, 1)]));
        }
        m
    }

    pub fn factors(&self) -> &[(Coord, u32)] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|f| f.1).sum()
    }

    pub fn exponent(&self, c: Coord) -> u32 {
        self.0.iter().find(|f| f.0 == c).map_or(0, |f| f.1)
    }

    pub fn is_multilinear(&self) -> bool {
        self.0.iter().all(|f| f.1 == 1)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut merged: BTreeMap<Coord, u32> = self.0.iter().copied().collect();
        for &(c, e) in &other.0 {
            *merged.entry(c).or_insert(0) += e;
        }
        Self(merged.into_iter().collect())
    }

    /// The monomial with `c` removed, if `c` divides it to the first power.
    fn without(&self, c: Coord) -> Option<Self> {
        let pos = self.0.iter().position(|f| f.0 == c)?;
        let mut v = self.0.clone();
        if v[pos].1 == 1 {
            v.remove(pos);
        } else {
            v[pos].1 -= 1;
        }
        Some(Self(v))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (idx, ((i, j), e)) in self.0.iter().enumerate() {
            if idx > 0 {
                write!(f, "*")?;
            }
            write!(f, "x{i},{j}")?;
            if *e > 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

fn checked_add(a: i128, b: i128) -> Result<i128> {
    a.checked_add(b).ok_or(Error::Overflow("polynomial addition"))
}

fn checked_mul(a: i128, b: i128) -> Result<i128> {
    a.checked_mul(b).ok_or(Error::Overflow("polynomial multiplication"))
}

/// A polynomial with integer coefficients; zero coefficients are never stored.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, i128>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: i128) -> Self {
        let mut p = Self::zero();
        if c != 0 {
            p.terms.insert(Monomial::one(), c);
        }
        p
    }

    pub fn var(c: Coord) -> Self {
        Self::term(1, Monomial::from_coords([c]))
    }

    pub fn term(coeff: i128, m: Monomial) -> Self {
        let mut p = Self::zero();
        if coeff != 0 {
            p.terms.insert(m, coeff);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, i128)> {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &Monomial) -> i128 {
        self.terms.get(m).copied().unwrap_or(0)
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn is_homogeneous(&self) -> bool {
        let degrees: BTreeSet<u32> = self.terms.keys().map(Monomial::degree).collect();
        degrees.len() <= 1
    }

    pub fn is_multilinear(&self) -> bool {
        self.terms.keys().all(Monomial::is_multilinear)
    }

    pub fn variables(&self) -> BTreeSet<Coord> {
        self.terms.keys().flat_map(|m| m.0.iter().map(|f| f.0)).collect()
    }

    /// Adds `coeff * m` in place.
    pub fn add_term(&mut self, coeff: i128, m: Monomial) -> Result<()> {
        if coeff == 0 {
            return Ok(());
        }
        let slot = self.terms.entry(m).or_insert(0);
        *slot = checked_add(*slot, coeff)?;
        if *slot == 0 {
            self.terms.retain(|_, c| *c != 0);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        out.add_assign(other)?;
        Ok(out)
    }

    pub fn add_assign(&mut self, other: &Self) -> Result<()> {
        for (m, &c) in &other.terms {
            let slot = self.terms.entry(m.clone()).or_insert(0);
            *slot = checked_add(*slot, c)?;
        }
        self.terms.retain(|_, c| *c != 0);
        Ok(())
    }

    pub fn neg(&self) -> Self {
        Self { terms: self.terms.iter().map(|(m, &c)| (m.clone(), -c)).collect() }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: i128) -> Result<Self> {
        if k == 0 {
            return Ok(Self::zero());
        }
        let mut terms = BTreeMap::new();
        for (m, &c) in &self.terms {
            terms.insert(m.clone(), checked_mul(c, k)?);
        }
        Ok(Self { terms })
    }

    /// Multiplies by `k * x_c`.
    pub fn mul_var_scaled(&self, c: Coord, k: i128) -> Result<Self> {
        let v = Monomial::from_coords([c]);
        let mut terms = BTreeMap::new();
        for (m, &a) in &self.terms {
            terms.insert(m.mul(&v), checked_mul(a, k)?);
        }
        Ok(Self { terms })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        let mut out = Self::zero();
        for (m1, &a) in &self.terms {
            for (m2, &b) in &other.terms {
                let slot = out.terms.entry(m1.mul(m2)).or_insert(0);
                *slot = checked_add(*slot, checked_mul(a, b)?)?;
            }
        }
        out.terms.retain(|_, c| *c != 0);
        Ok(out)
    }

    /// Partial derivative with respect to a coordinate.
    pub fn derivative(&self, c: Coord) -> Result<Self> {
        let mut out = Self::zero();
        for (m, &a) in &self.terms {
            let e = m.exponent(c);
            if e > 0 {
                let rest = m.without(c).expect("exponent is positive");
                out.add_term(checked_mul(a, e as i128)?, rest)?;
            }
        }
        Ok(out)
    }

    /// Greatest common divisor of the coefficients (positive; zero for zero).
    pub fn content(&self) -> i128 {
        fn gcd(a: i128, b: i128) -> i128 {
            if b == 0 { a.abs() } else { gcd(b, a % b) }
        }
        self.terms.values().fold(0, |g, &c| gcd(g, c))
    }

    /// Coefficient of the leading monomial: the smallest in the monomial
    /// order, which is also the term printed first.
    pub fn leading_coefficient(&self) -> i128 {
        self.terms.values().next().copied().unwrap_or(0)
    }

    /// Exact division by an integer that divides every coefficient.
    pub fn div_exact(&self, k: i128) -> Result<Self> {
        let mut terms = BTreeMap::new();
        for (m, &c) in &self.terms {
            if k == 0 || c % k != 0 {
                return Err(Error::InvalidInput(format!("{k} does not divide coefficient {c}")));
            }
            terms.insert(m.clone(), c / k);
        }
        Ok(Self { terms })
    }

    /// Evaluates at a point given by a coordinate lookup, with checked `i128` arithmetic.
    pub fn eval_i128(&self, point: impl Fn(Coord) -> i128) -> Result<i128> {
        let mut acc: i128 = 0;
        for (m, &c) in &self.terms {
            let mut t = c;
            for &(v, e) in &m.0 {
                for _ in 0..e {
                    t = checked_mul(t, point(v))?;
                }
            }
            acc = checked_add(acc, t)?;
        }
        Ok(acc)
    }

    /// Evaluates exactly over the integers.
    pub fn eval_big(&self, point: impl Fn(Coord) -> BigInt) -> BigInt {
        let mut acc = BigInt::from(0);
        for (m, &c) in &self.terms {
            let mut t = BigInt::from(c);
            for &(v, e) in &m.0 {
                t *= point(v).pow(e);
            }
            acc += t;
        }
        acc
    }

    /// Applies a substitution, returning the polynomial and whether the
    /// result is guaranteed homogeneous (only zeros and kept coordinates).
    pub fn restrict(&self, sub: &Substitution) -> Result<Restricted> {
        let mut out = Self::zero();
        'terms: for (m, &c) in &self.terms {
            let mut coeff = c;
            let mut kept = Vec::new();
            for &(v, e) in &m.0 {
                match sub.get(v) {
                    Assignment::Keep => kept.push((v, e)),
                    Assignment::Value(0) => continue 'terms,
                    Assignment::Value(k) => {
                        for _ in 0..e {
                            coeff = checked_mul(coeff, k)?;
                        }
                    }
                }
            }
            out.add_term(coeff, Monomial(kept))?;
        }
        Ok(Restricted { polynomial: out, homogeneous: sub.preserves_homogeneity() })
    }

    /// Serialisable form: sorted monomial list.
    pub fn to_json(&self) -> serde_json::Value {
        let terms: Vec<TermJson> = self
            .terms
            .iter()
            .map(|(m, &c)| TermJson { coeff: c.to_string(), vars: m.0.iter().map(|&((i, j), e)| [i, j, e as usize]).collect() })
            .collect();
        serde_json::to_value(terms).expect("terms serialise")
    }
}

#[derive(Serialize)]
struct TermJson {
    coeff: String,
    vars: Vec<[usize; 3]>,
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (m, &c)) in self.terms.iter().enumerate() {
            let sign = if c < 0 { "-" } else if idx > 0 { "+" } else { "" };
            if idx > 0 {
                write!(f, " {sign} ")?;
            } else {
                write!(f, "{sign}")?;
            }
            let a = c.unsigned_abs();
            if m.0.is_empty() {
                write!(f, "{a}")?;
            } else if a == 1 {
                write!(f, "{m}")?;
            } else {
                write!(f, "{a}*{m}")?;
            }
        }
        Ok(())
    }
}

/// What a substitution does to one coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Assignment {
    Keep,
    Value(i128),
}

/// A partial assignment of coordinates; unlisted coordinates follow `default`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Substitution {
    map: BTreeMap<Coord, Assignment>,
    default: Assignment,
}

impl Default for Substitution {
    fn default() -> Self {
        Self::identity()
    }
}

impl Substitution {
    /// Keeps every coordinate.
    pub fn identity() -> Self {
        Self { map: BTreeMap::new(), default: Assignment::Keep }
    }

    /// Keeps exactly `kept`; every other coordinate becomes zero.
    pub fn keep_only(kept: impl IntoIterator<Item = Coord>) -> Self {
        Self { map: kept.into_iter().map(|c| (c, Assignment::Keep)).collect(), default: Assignment::Value(0) }
    }

    pub fn set(mut self, c: Coord, a: Assignment) -> Self {
        self.map.insert(c, a);
        self
    }

    pub fn zero(self, coords: impl IntoIterator<Item = Coord>) -> Self {
        coords.into_iter().fold(self, |s, c| s.set(c, Assignment::Value(0)))
    }

    pub fn get(&self, c: Coord) -> Assignment {
        self.map.get(&c).copied().unwrap_or(self.default)
    }

    /// Zero and keep assignments preserve homogeneity; other values may not.
    pub fn preserves_homogeneity(&self) -> bool {
        let ok = |a: &Assignment| matches!(a, Assignment::Keep | Assignment::Value(0));
        ok(&self.default) && self.map.values().all(ok)
    }
}

impl FromStr for Substitution {
    type Err = Error;

    /// Parses `"x1,2=1;x1,3=0;x2,5=keep"`.
    fn from_str(s: &str) -> Result<Self> {
        let mut sub = Self::identity();
        for item in s.split(';').map(str::trim).filter(|x| !x.is_empty()) {
            let bad = || Error::InvalidInput(format!("cannot parse substitution item {item:?}"));
            let (lhs, rhs) = item.split_once('=').ok_or_else(bad)?;
            let lhs = lhs.trim().strip_prefix('x').ok_or_else(bad)?;
            let (i, j) = lhs.split_once(',').ok_or_else(bad)?;
            let coord = (i.trim().parse().map_err(|_| bad())?, j.trim().parse().map_err(|_| bad())?);
            let value = match rhs.trim() {
                "keep" => Assignment::Keep,
                v => Assignment::Value(v.parse().map_err(|_| bad())?),
            };
            if sub.map.insert(coord, value).is_some() {
                return Err(Error::InvalidInput(format!("x{},{} assigned twice", coord.0, coord.1)));
            }
        }
        Ok(sub)
    }
}

/// Result of [`Polynomial::restrict`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Restricted {
    pub polynomial: Polynomial,
    pub homogeneous: bool,
}

/// A factorisation into a constant and irreducible multilinear factors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub unit: i128,
    pub factors: Vec<Polynomial>,
}

impl Factorization {
    pub fn product(&self) -> Result<Polynomial> {
        self.factors.iter().try_fold(Polynomial::constant(self.unit), |acc, f| acc.mul(f))
    }
}

/// Factors a multilinear polynomial into irreducible factors.
///
/// Two variables `u`, `v` belong to the same factor exactly when
/// `P * d²P/dudv != dP/du * dP/dv`; each connected component of that graph
/// carries one factor, recovered by fixing the remaining variables at a point
/// where they do not vanish.  Factors are primitive with positive leading
/// coefficient and sorted by their smallest variable.
pub fn multilinear_factor(p: &Polynomial) -> Result<Factorization> {
    if !p.is_multilinear() {
        return Err(Error::InvalidInput("polynomial is not multilinear".into()));
    }
    if p.is_zero() {
        return Err(Error::InvalidInput("cannot factor the zero polynomial".into()));
    }
    let vars: Vec<Coord> = p.variables().into_iter().collect();
    let derivs: Vec<Polynomial> = vars.iter().map(|&v| p.derivative(v)).collect::<Result<_>>()?;
    let mut parent: Vec<usize> = (0..vars.len()).collect();
    fn root(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for a in 0..vars.len() {
        for b in a + 1..vars.len() {
            if root(&mut parent, a) == root(&mut parent, b) {
                continue;
            }
            let mixed = derivs[a].derivative(vars[b])?;
            if p.mul(&mixed)? != derivs[a].mul(&derivs[b])? {
                let (ra, rb) = (root(&mut parent, a), root(&mut parent, b));
                parent[ra] = rb;
            }
        }
    }
    let mut groups: BTreeMap<usize, BTreeSet<Coord>> = BTreeMap::new();
    for (idx, &v) in vars.iter().enumerate() {
        groups.entry(root(&mut parent, idx)).or_default().insert(v);
    }
    let mut factors = Vec::new();
    for group in groups.values() {
        factors.push(extract_factor(p, group)?);
    }
    factors.sort_by_key(|f| f.variables().into_iter().next());
    let product = factors.iter().try_fold(Polynomial::constant(1), |acc, f| acc.mul(f))?;
    let (m, c) = product.terms().next().map(|(m, c)| (m.clone(), c)).expect("nonzero product");
    let unit = p.coefficient(&m) / c;
    let out = Factorization { unit, factors };
    if out.product()? != *p {
        return Err(Error::Structural("factor reconstruction does not reproduce the input".into()));
    }
    Ok(out)
}

/// The factor of `p` involving exactly the variables in `group`.
fn extract_factor(p: &Polynomial, group: &BTreeSet<Coord>) -> Result<Polynomial> {
    // Deterministic search for a point where the other factors do not vanish.
    for attempt in 1..=64i128 {
        let mut sub = Substitution::identity();
        for (idx, v) in p.variables().into_iter().filter(|v| !group.contains(v)).enumerate() {
            sub = sub.set(v, Assignment::Value(1 + (attempt * (idx as i128 + 3)) % 7));
        }
        let f = p.restrict(&sub)?.polynomial;
        if f.variables() == *group {
            let content = f.content();
            let f = f.div_exact(content)?;
            return if f.leading_coefficient() < 0 { Ok(f.neg()) } else { Ok(f) };
        }
    }
    Err(Error::Structural("no point separates the factor".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn x(i: usize, j: usize) -> Polynomial {
        Polynomial::var((i, j))
    }

    #[test]
    fn arithmetic_and_display() {
        let p = x(2, 5).mul(&x(4, 6)).unwrap().sub(&x(2, 6).mul(&x(4, 5)).unwrap()).unwrap();
        assert_eq!(p.to_string(), "x2,5*x4,6 - x2,6*x4,5");
        assert_eq!(p.degree(), Some(2));
        assert!(p.is_homogeneous() && p.is_multilinear());
        assert_eq!(p.sub(&p).unwrap(), Polynomial::zero());
        assert_eq!(p.derivative((2, 5)).unwrap(), x(4, 6));
    }

    #[test]
    fn substitution_parsing_and_homogeneity() {
        let sub: Substitution = "x1,2=1; x1,3=0".parse().unwrap();
        assert_eq!(sub.get((1, 2)), Assignment::Value(1));
        assert_eq!(sub.get((2, 4)), Assignment::Keep);
        assert!(!sub.preserves_homogeneity());
        let p = x(1, 2).mul(&x(2, 4)).unwrap().add(&x(1, 3).mul(&x(3, 4)).unwrap()).unwrap();
        let r = p.restrict(&sub).unwrap();
        assert_eq!(r.polynomial, x(2, 4));
        assert!(!r.homogeneous);
        assert_eq!(p.restrict(&Substitution::identity()).unwrap().polynomial, p);
        assert!("x1=2".parse::<Substitution>().is_err());
        assert!("x1,2=1;x1,2=0".parse::<Substitution>().is_err());
    }

    #[test]
    fn factor_examples() {
        let det = x(2, 5).mul(&x(4, 6)).unwrap().sub(&x(2, 6).mul(&x(4, 5)).unwrap()).unwrap();
        let p = x(3, 4).mul(&det).unwrap().neg();
        let f = multilinear_factor(&p).unwrap();
        assert_eq!(f.factors.len(), 2);
        assert_eq!(f.product().unwrap(), p);
        let f = multilinear_factor(&x(2, 4).mul(&x(3, 5)).unwrap()).unwrap();
        assert_eq!(f.factors, vec![x(2, 4), x(3, 5)]);
        assert_eq!(multilinear_factor(&det).unwrap().factors.len(), 1);
        assert!(multilinear_factor(&x(1, 2).mul(&x(1, 2)).unwrap()).is_err());
    }

    #[test]
    fn co_occurrence_is_not_the_criterion() {
        // (a + b)(c + d): every variable pair across the factors co-occurs.
        let p = x(1, 2).add(&x(1, 3)).unwrap().mul(&x(2, 4).add(&x(3, 4)).unwrap()).unwrap();
        assert_eq!(multilinear_factor(&p).unwrap().factors.len(), 2);
    }

    /// Random products of variable-disjoint linear and bilinear pieces.
    fn piece(base: usize) -> impl Strategy<Value = Polynomial> {
        (1i128..4, 1i128..4, any::<bool>()).prop_map(move |(a, b, bilinear)| {
            let u = x(base, base + 1).scale(a).unwrap();
            let v = x(base, base + 2).scale(b).unwrap();
            if bilinear {
                u.mul(&x(base + 1, base + 3)).unwrap().add(&v.mul(&x(base + 2, base + 3)).unwrap()).unwrap()
            } else {
                u.add(&v).unwrap()
            }
        })
    }

    proptest! {
        #[test]
        fn factorisation_reconstructs(k in 1usize..4, pieces in proptest::collection::vec(piece(0), 3), unit in -3i128..4) {
            prop_assume!(unit != 0);
            let mut p = Polynomial::constant(unit);
            for (idx, q) in pieces.iter().take(k).enumerate() {
                // Shift variables so the pieces are disjoint.
                let shifted = Polynomial {
                    terms: q.terms.iter().map(|(m, &c)| (Monomial(m.0.iter().map(|&((i, j), e)| ((i + 10 * idx, j + 10 * idx), e)).collect()), c)).collect(),
                };
                p = p.mul(&shifted).unwrap();
            }
            let f = multilinear_factor(&p).unwrap();
            prop_assert_eq!(f.product().unwrap(), p);
            prop_assert_eq!(f.factors.len(), k);
        }

        #[test]
        fn evaluation_is_a_ring_map(a in -5i128..5, b in -5i128..5) {
            let p = x(1, 2).add(&Polynomial::constant(3)).unwrap();
            let q = x(1, 2).mul(&x(2, 3)).unwrap().sub(&Polynomial::constant(1)).unwrap();
            let pt = |c: Coord| if c == (1, 2) { a } else { b };
            prop_assert_eq!(p.mul(&q).unwrap().eval_i128(pt).unwrap(), p.eval_i128(pt).unwrap() * q.eval_i128(pt).unwrap());
        }
    }
}
