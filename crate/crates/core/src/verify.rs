//! The full property suite for one composition, shared by the command line
//! and the acceptance harness.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::component::{enumerate_component_tableaux, red_map_is_injective, ComponentTableau};
use crate::diagram::{Diagram, Pair};
use crate::error::{Error, Result};
use crate::geometry::{component_geometry, coincidence_check, is_covered, line_geometry_check, RootSet};
use crate::invariant::{
    horizontal_monomial_check, is_zero_on_subspace, seeded_rng, weierstrass_check, PairInvariant, DEFAULT_SYMBOLIC_LIMIT,
};
use crate::poly::Substitution;
use crate::reverse::{enumerate_reverse, HeightOrder, ReverseState, ShiftMode};

/// Knobs of [`verify_composition`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SuiteOptions {
    /// Random evaluations per zero test.
    pub trials: u32,
    pub seed: u64,
    /// Shift mode used for the reverse constructions.
    pub mode: ShiftMode,
    /// Repeat every vanishing test symbolically when `n` is at most this.
    pub symbolic_up_to: usize,
    /// Size bound handed to the symbolic expansion.
    pub symbolic_limit: usize,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            trials: crate::invariant::DEFAULT_TRIALS,
            seed: crate::invariant::DEFAULT_SEED,
            mode: ShiftMode::Standard,
            symbolic_up_to: 6,
            symbolic_limit: DEFAULT_SYMBOLIC_LIMIT,
        }
    }
}

/// Which family of checks a failure belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Check {
    /// Vanishing of implemented invariants on reverse tableaux.
    Vanishing,
    /// Non-vanishing of invariants whose pair is still open.
    NonVanishing,
    /// Black count, composite-line count and their drop by one.
    Counting,
    /// Horizontal-monomial certificate of non-vanishing.
    HorizontalCertificate,
    /// Excluded/starred/labelled sets, covering and tangent rank.
    Geometry,
    /// Coincidence of a component tableau with its reverse tableau.
    Coincidence,
    /// Placement of labelled lines inside the reverse tableau.
    LineGeometry,
    /// Injectivity of the red map and of the component-to-reverse map.
    Injectivity,
    /// Slice images of the invariants.
    Slice,
}

/// One failed check with enough context to reproduce it.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Failure {
    pub check: Check,
    pub composition: String,
    pub detail: String,
}

/// Outcome of [`verify_composition`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompositionReport {
    pub composition: String,
    pub components: usize,
    pub red_sets: Vec<String>,
    /// Distinct reverse tableaux reached from the induced sequences.
    pub reverse_states: usize,
    pub zero_tests: usize,
    pub symbolic_tests: usize,
    pub nonzero_tests: usize,
    pub horizontal_checks: usize,
    /// Largest failure probability reported by a passing zero test.
    pub worst_failure_bound: f64,
    pub failures: Vec<Failure>,
}

impl CompositionReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }

    /// Failures of the given family.
    pub fn failures_of(&self, check: Check) -> impl Iterator<Item = &Failure> {
        self.failures.iter().filter(move |f| f.check == check)
    }
}

/// Runs every property check on `d`.
///
/// Structural errors from the constructions themselves are returned as
/// errors; property violations are collected in the report.
pub fn verify_composition(d: &Diagram, opts: &SuiteOptions) -> Result<CompositionReport> {
    let comp = d.composition().to_string();
    let mut report = CompositionReport {
        composition: comp.clone(),
        components: 0,
        red_sets: Vec::new(),
        reverse_states: 0,
        zero_tests: 0,
        symbolic_tests: 0,
        nonzero_tests: 0,
        horizontal_checks: 0,
        worst_failure_bound: 0.0,
        failures: Vec::new(),
    };
    let mut fail = |check: Check, detail: String| Failure { check, composition: comp.clone(), detail };
    let mut failures = Vec::new();

    let cts = enumerate_component_tableaux(d)?;
    report.components = cts.len();
    report.red_sets = cts.iter().map(|c| c.red_set().to_string()).collect();
    if !red_map_is_injective(&cts) {
        failures.push(fail(Check::Injectivity, "two component tableaux share a Red Set".into()));
    }
    component_checks(&cts, &mut failures, &mut fail)?;

    let invariants = PairInvariant::all(d)?;
    let mut rng = seeded_rng(opts.seed);
    let mut seen: BTreeSet<String> = BTreeSet::new();
    let mut leaf_red_sets = BTreeSet::new();
    for ct in &cts {
        let seq = ct.induced_sequence();
        if seq.is_empty() {
            continue;
        }
        let chart = enumerate_reverse(d, &seq, opts.mode)?;
        leaf_red_sets.extend(chart.leaf_red_sets().into_iter().map(|r| r.to_string()));
        for edge in chart.edges.iter().filter(|e| e.rejected.is_none()) {
            let (from, to) = (&chart.nodes[edge.from].state, &chart.nodes[edge.to.expect("accepted")].state);
            drop_check(from, to, &edge.pair, &invariants, &mut failures, &mut fail)?;
        }
        for node in &chart.nodes {
            if !seen.insert(node.state.tableau().render_text()) {
                continue;
            }
            let x = node.state.excluded_roots();
            let at = || format!("{} at stage {} of {}", node.red_set, node.stage, seq_text(&seq));
            for inv in &invariants {
                let p = inv.pair();
                if node.state.is_implemented(&p) {
                    let z = is_zero_on_subspace(inv, &x, opts.trials, &mut rng);
                    report.zero_tests += 1;
                    if !z.zero {
                        failures.push(fail(Check::Vanishing, format!("{p} does not vanish on {}", at())));
                    } else {
                        report.worst_failure_bound = report.worst_failure_bound.max(z.failure_bound);
                    }
                    if d.n() <= opts.symbolic_up_to {
                        report.symbolic_tests += 1;
                        let restricted = inv.symbolic(&Substitution::identity().zero(x.iter().copied()), opts.symbolic_limit)?;
                        if !restricted.is_zero() {
                            failures.push(fail(Check::Vanishing, format!("{p} restricts to {restricted} on {}", at())));
                        }
                    }
                    continue;
                }
                let tz = node.state.trapezium(&p)?;
                if tz.red_in_bottom_row {
                    continue;
                }
                if tz.black_count != inv.degree() || tz.composite_line_count() != inv.degree() {
                    failures.push(fail(
                        Check::Counting,
                        format!(
                            "{p}: black count {} and composite-line count {} for degree {} on {}",
                            tz.black_count,
                            tz.composite_line_count(),
                            inv.degree(),
                            at()
                        ),
                    ));
                }
                report.nonzero_tests += 1;
                if is_zero_on_subspace(inv, &x, opts.trials, &mut rng).zero {
                    failures.push(fail(Check::NonVanishing, format!("{p} vanishes on {}", at())));
                }
                report.horizontal_checks += 1;
                let h = horizontal_monomial_check(&node.state, &p, opts.symbolic_limit)?;
                if !h.certifies_nonzero() {
                    let blocked: Vec<String> =
                        h.lines.iter().filter(|l| x.contains(l)).map(|(i, j)| format!("x{i},{j}")).collect();
                    failures.push(fail(
                        Check::HorizontalCertificate,
                        format!(
                            "{p} on {}: horizontal monomial has coefficient {} and uses excluded {}",
                            at(),
                            h.coefficient,
                            blocked.join(",")
                        ),
                    ));
                }
            }
        }
    }
    for r in &report.red_sets {
        if !leaf_red_sets.contains(r) && d.pair_count() > 0 {
            failures.push(fail(Check::Injectivity, format!("Red Set {r} is not reached by its induced sequence")));
        }
    }
    report.reverse_states = seen.len();
    failures.sort();
    report.failures = failures;
    Ok(report)
}

fn seq_text(seq: &[Pair]) -> String {
    seq.iter().map(Pair::to_string).collect::<Vec<_>>().join(";")
}

/// Component-side checks: slice images, sets, coincidence, line placement
/// and injectivity of the component-to-reverse map in both height orders.
fn component_checks(
    cts: &[ComponentTableau],
    failures: &mut Vec<Failure>,
    fail: &mut impl FnMut(Check, String) -> Failure,
) -> Result<()> {
    for order in [HeightOrder::IncreaseThenDecrease, HeightOrder::DecreaseThenIncrease] {
        let mut images: BTreeMap<String, String> = BTreeMap::new();
        for ct in cts {
            let red = ct.red_set();
            let rs = ct.to_reverse(order, ShiftMode::Standard)?;
            if rs.red_set() != red {
                failures.push(fail(Check::Injectivity, format!("{red} maps to a reverse tableau with Red Set {}", rs.red_set())));
            }
            if let Some(other) = images.insert(rs.tableau().render_text(), red.to_string()) {
                failures.push(fail(Check::Injectivity, format!("{red} and {other} map to the same reverse tableau ({order:?})")));
            }
            let co = coincidence_check(ct, &rs)?;
            if !co.ok() {
                failures.push(fail(Check::Coincidence, format!("{red} ({order:?}): {co:?}")));
            }
            let lg = line_geometry_check(&rs, ct);
            if !lg.ok() {
                failures.push(fail(Check::LineGeometry, format!("{red} ({order:?}): {lg:?}")));
            }
        }
    }
    for ct in cts {
        let red = ct.red_set();
        let g = component_geometry(ct)?;
        if !g.ok() {
            failures.push(fail(Check::Geometry, format!("{red}: {g:?}")));
        }
        match weierstrass_check(ct, DEFAULT_SYMBOLIC_LIMIT) {
            Ok(w) if w.ok => {}
            Ok(w) => failures.push(fail(Check::Slice, format!("{red}: {:?}", w.images))),
            Err(Error::Capacity(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(())
}

/// Implementing `p` must leave a red entry in the bottom row of its
/// trapezium and reduce both counts to one less than the degree.
fn drop_check(
    from: &ReverseState,
    to: &ReverseState,
    p: &Pair,
    invariants: &[PairInvariant],
    failures: &mut Vec<Failure>,
    fail: &mut impl FnMut(Check, String) -> Failure,
) -> Result<()> {
    let inv = invariants.iter().find(|i| i.pair() == *p).expect("every pair has an invariant");
    let before = from.trapezium(p)?;
    let after = to.trapezium(p)?;
    let degree = inv.degree();
    if before.red_in_bottom_row || before.black_count != degree {
        failures.push(fail(
            Check::Counting,
            format!("{p} implemented from {} with black count {} (degree {degree})", from.red_set(), before.black_count),
        ));
    }
    if !after.red_in_bottom_row || after.black_count + 1 != degree || after.composite_line_count() + 1 != degree {
        failures.push(fail(
            Check::Counting,
            format!(
                "{p} implemented into {}: red in bottom row {}, black count {}, composite-line count {} (degree {degree})",
                to.red_set(),
                after.red_in_bottom_row,
                after.black_count,
                after.composite_line_count()
            ),
        ));
    }
    Ok(())
}

/// Vanishing, covering and scale report for one reverse tableau given by
/// its Red Set, in both shift modes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RedSetReport {
    pub composition: String,
    pub red_set: String,
    /// Invariants tested, per mode.
    pub invariants: usize,
    pub standard_zero: bool,
    pub extreme_zero: bool,
    pub worst_failure_bound: f64,
    /// Excluded roots present only in extreme mode.
    pub extreme_extra: Vec<(usize, usize)>,
    /// Those of them not covered by the labelled lines.
    pub uncovered_extra: Vec<(usize, usize)>,
}

impl RedSetReport {
    pub fn ok(&self) -> bool {
        self.standard_zero && self.extreme_zero && self.uncovered_extra.is_empty()
    }
}

/// Builds the reverse tableau of the component with the given Red Set in
/// both shift modes and tests every invariant on it with the black box.
pub fn verify_red_set(d: &Diagram, red: &crate::tableau::RedSet, opts: &SuiteOptions) -> Result<RedSetReport> {
    let ct = enumerate_component_tableaux(d)?
        .into_iter()
        .find(|c| &c.red_set() == red)
        .ok_or_else(|| Error::InvalidInput(format!("no component tableau of {} has Red Set {red}", d.composition())))?;
    let standard = ct.to_reverse(HeightOrder::IncreaseThenDecrease, ShiftMode::Standard)?;
    let extreme = ct.to_reverse(HeightOrder::IncreaseThenDecrease, ShiftMode::Extreme)?;
    let invariants = PairInvariant::all(d)?;
    let mut rng = seeded_rng(opts.seed);
    let mut worst: f64 = 0.0;
    let mut all_zero = |x: &RootSet| {
        invariants.iter().all(|inv| {
            let z = is_zero_on_subspace(inv, x, opts.trials, &mut rng);
            worst = worst.max(z.failure_bound);
            z.zero
        })
    };
    let (xs, xe) = (standard.excluded_roots(), extreme.excluded_roots());
    let standard_zero = all_zero(&xs);
    let extreme_zero = all_zero(&xe);
    let s = ct.one_line_roots();
    let extreme_extra: Vec<_> = xe.difference(&xs).copied().collect();
    let uncovered_extra = extreme_extra.iter().copied().filter(|&c| !is_covered(&s, c)).collect();
    Ok(RedSetReport {
        composition: d.composition().to_string(),
        red_set: red.to_string(),
        invariants: invariants.len(),
        standard_zero,
        extreme_zero,
        worst_failure_bound: worst,
        extreme_extra,
        uncovered_extra,
    })
}
