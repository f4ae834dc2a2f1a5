//! Command-line surface: argument parsing, rendering of the documents each
//! command produces, and persistence of runs with a digest manifest.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::component::{enumerate_component_tableaux, ComponentTableau};
use crate::diagram::{parse_column_pair, Composition, Diagram, Pair};
use crate::error::{Error, Result};
use crate::invariant::{is_zero_on_subspace, seeded_rng, PairInvariant, DEFAULT_SEED, DEFAULT_SYMBOLIC_LIMIT};
use crate::poly::{multilinear_factor, Polynomial, Substitution};
use crate::reverse::{enumerate_reverse, parse_sequence, FlowChart, HeightOrder, ReverseState, ShiftMode};
use crate::tableau::{RedSet, RenderFormat, Tableau};
use crate::verify::{verify_composition, verify_red_set, Check, CompositionReport, SuiteOptions};

/// Exit status for success.
pub const EXIT_OK: i32 = 0;
/// Exit status when a verification finds a violation.
pub const EXIT_FAILURE: i32 = 1;
/// Exit status for malformed or unsupported requests.
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "nilfibre", version, about = "Tableaux, invariants and component geometry of nilfibres")]
pub struct Cli {
    /// Composition as comma-separated parts, e.g. 1,2,1,2.
    #[arg(short = 'c', long = "composition", global = true)]
    pub composition: Option<String>,
    /// Output format.
    #[arg(long, value_enum, default_value_t = RenderFormat::Text, global = true)]
    pub format: RenderFormat,
    /// Seed for the randomised tests (decimal or 0x-prefixed hex).
    #[arg(long, env = "NILFIBRE_SEED", value_parser = parse_seed, global = true)]
    pub seed: Option<u64>,
    /// Carry shifted entries past columns of exactly the pair's height.
    #[arg(long, global = true)]
    pub extreme: bool,
    /// Expand invariants symbolically instead of using the black box.
    #[arg(long, global = true)]
    pub symbolic: bool,
    /// Persist the output under `<OUT>/runs/<composition>/<command>-<seed>/`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the component tableaux of a composition.
    EnumComponents,
    /// Build reverse tableaux from a Red Set or along a sequence of pairs.
    Reverse {
        /// Red Set of a component tableau, e.g. 4,6.
        #[arg(long)]
        red_set: Option<String>,
        /// Complete sequence of pairs, e.g. "C1,C3;C2,C4".
        #[arg(long)]
        sequence: Option<String>,
        /// Order in which heights of one column are rebuilt.
        #[arg(long, value_enum, default_value_t = OrderArg::IncreaseThenDecrease)]
        order: OrderArg,
    },
    /// Show invariants, optionally restricted or substituted.
    Invariant {
        /// Only this pair, e.g. C2,C4.
        #[arg(long)]
        pair: Option<String>,
        /// Substitution such as "x1,2=1;x1,3=0" (implies symbolic output).
        #[arg(long)]
        substitute: Option<String>,
        /// Test vanishing on the subspace of this component's reverse tableau.
        #[arg(long)]
        red_set: Option<String>,
        /// Random evaluations per zero test.
        #[arg(long, default_value_t = crate::invariant::DEFAULT_TRIALS)]
        trials: u32,
    },
    /// Branching construction along a sequence with factorised invariants.
    Factorize {
        /// Complete sequence of pairs, e.g. "C1,C3;C2,C4".
        #[arg(long)]
        sequence: String,
    },
    /// Run the property suite.
    Verify {
        /// Verify every composition of every n up to this bound.
        #[arg(long)]
        all_n: Option<usize>,
        /// Only build and test the reverse tableau of this Red Set.
        #[arg(long)]
        red_set: Option<String>,
        /// Count missing horizontal-monomial certificates as failures.
        #[arg(long)]
        strict_certificate: bool,
        /// Random evaluations per zero test.
        #[arg(long, default_value_t = crate::invariant::DEFAULT_TRIALS)]
        trials: u32,
    },
    /// Render a tableau.
    Render {
        /// Red Set of a component tableau.
        #[arg(long)]
        red_set: Option<String>,
        /// Render the completed tableaux along this sequence.
        #[arg(long)]
        sequence: Option<String>,
        /// Which tableau of a component to draw.
        #[arg(long, value_enum, default_value_t = View::Collapsed)]
        view: View,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::EnumComponents => "enum-components",
            Command::Reverse { .. } => "reverse",
            Command::Invariant { .. } => "invariant",
            Command::Factorize { .. } => "factorize",
            Command::Verify { .. } => "verify",
            Command::Render { .. } => "render",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OrderArg {
    IncreaseThenDecrease,
    DecreaseThenIncrease,
}

impl From<OrderArg> for HeightOrder {
    fn from(o: OrderArg) -> Self {
        match o {
            OrderArg::IncreaseThenDecrease => HeightOrder::IncreaseThenDecrease,
            OrderArg::DecreaseThenIncrease => HeightOrder::DecreaseThenIncrease,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum View {
    /// The collapsed component tableau.
    Collapsed,
    /// The component tableau before collapsing.
    Infinity,
    /// The reverse tableau of the component.
    Reverse,
}

fn parse_seed(s: &str) -> std::result::Result<u64, String> {
    let s = s.trim().replace('_', "");
    match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    }
    .map_err(|e| format!("`{s}` is not a seed: {e}"))
}

/// What a command produced.
struct Document {
    text: String,
    json: Value,
    /// LaTeX rendering when the command has a natural one.
    latex: Option<String>,
    /// False when a verification failed.
    ok: bool,
}

impl Document {
    fn render(&self, format: RenderFormat) -> String {
        match format {
            RenderFormat::Text => self.text.clone(),
            RenderFormat::Json => format!("{}\n", serde_json::to_string_pretty(&self.json).expect("json document")),
            RenderFormat::Latex => match &self.latex {
                Some(l) => l.clone(),
                None => format!("\\begin{{verbatim}}\n{}\\end{{verbatim}}\n", self.text),
            },
        }
    }
}

/// Parses `args` (including the program name) and runs the command,
/// writing results to `out` and diagnostics to `err`.  Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let shown = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(shown.as_bytes());
                    EXIT_OK
                }
                _ => {
                    let _ = err.write_all(shown.as_bytes());
                    EXIT_USAGE
                }
            };
        }
    };
    match execute(&cli) {
        Ok(doc) => {
            let rendered = doc.render(cli.format);
            if out.write_all(rendered.as_bytes()).is_err() {
                return EXIT_FAILURE;
            }
            if let Some(root) = &cli.out {
                match persist(root, &cli, &doc) {
                    Ok(dir) => {
                        let _ = writeln!(err, "run written to {}", dir.display());
                    }
                    Err(e) => {
                        let _ = writeln!(err, "error: {e}");
                        return EXIT_FAILURE;
                    }
                }
            }
            if doc.ok {
                EXIT_OK
            } else {
                EXIT_FAILURE
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                Error::InvalidInput(_) | Error::Capacity(_) => EXIT_USAGE,
                _ => EXIT_FAILURE,
            }
        }
    }
}

fn seed_of(cli: &Cli) -> u64 {
    cli.seed.unwrap_or(DEFAULT_SEED)
}

fn diagram_of(cli: &Cli) -> Result<Diagram> {
    let c = cli
        .composition
        .as_deref()
        .ok_or_else(|| Error::InvalidInput("this command needs -c/--composition".into()))?;
    Ok(Diagram::new(c.parse::<Composition>()?))
}

fn mode_of(cli: &Cli) -> ShiftMode {
    if cli.extreme {
        ShiftMode::Extreme
    } else {
        ShiftMode::Standard
    }
}

fn execute(cli: &Cli) -> Result<Document> {
    match &cli.command {
        Command::EnumComponents => enum_components(&diagram_of(cli)?),
        Command::Reverse { red_set, sequence, order } => {
            reverse(&diagram_of(cli)?, red_set.as_deref(), sequence.as_deref(), (*order).into(), mode_of(cli))
        }
        Command::Invariant { pair, substitute, red_set, trials } => invariant(
            &diagram_of(cli)?,
            pair.as_deref(),
            substitute.as_deref(),
            red_set.as_deref(),
            cli.symbolic,
            *trials,
            seed_of(cli),
        ),
        Command::Factorize { sequence } => factorize(&diagram_of(cli)?, sequence, mode_of(cli)),
        Command::Verify { all_n, red_set, strict_certificate, trials } => {
            let opts = SuiteOptions { trials: *trials, seed: seed_of(cli), mode: mode_of(cli), ..SuiteOptions::default() };
            match (all_n, &cli.composition, red_set) {
                (Some(n), None, None) => verify_all(*n, &opts, *strict_certificate),
                (None, Some(_), Some(r)) => verify_one_red_set(&diagram_of(cli)?, r, &opts),
                (None, Some(_), None) => verify_one(&diagram_of(cli)?, &opts, *strict_certificate),
                _ => Err(Error::InvalidInput("verify takes either -c [--red-set] or --all-n".into())),
            }
        }
        Command::Render { red_set, sequence, view } => {
            render(&diagram_of(cli)?, red_set.as_deref(), sequence.as_deref(), *view, mode_of(cli))
        }
    }
}

/// Component tableaux as listed by the command line: a diagram without
/// neighbouring pairs has no invariants and therefore no records.
pub fn listed_components(d: &Diagram) -> Result<Vec<ComponentTableau>> {
    if d.pair_count() == 0 {
        return Ok(Vec::new());
    }
    enumerate_component_tableaux(d)
}

fn coords_text(c: impl IntoIterator<Item = (usize, usize)>) -> String {
    let v: Vec<String> = c.into_iter().map(|(i, j)| format!("x{i},{j}")).collect();
    if v.is_empty() {
        "-".into()
    } else {
        v.join(" ")
    }
}

fn seq_text(seq: &[Pair]) -> String {
    seq.iter().map(Pair::to_string).collect::<Vec<_>>().join(";")
}

fn enum_components(d: &Diagram) -> Result<Document> {
    let cts = listed_components(d)?;
    let mut text = format!("composition {}: {} component tableaux\n", d.composition(), cts.len());
    let mut latex = String::new();
    for (k, ct) in cts.iter().enumerate() {
        let _ = writeln!(text, "\n[{}] Red Set {}", k + 1, ct.red_set());
        let _ = writeln!(text, "sequence {}", seq_text(&ct.induced_sequence()));
        let _ = writeln!(text, "lines 1: {}", coords_text(ct.one_line_roots()));
        let _ = writeln!(text, "lines *: {}", coords_text(ct.star_line_roots()));
        text.push_str(&ct.collapsed.render_text());
        let _ = writeln!(latex, "% Red Set {}", ct.red_set());
        latex.push_str(&ct.collapsed.render_latex());
    }
    let records: Vec<Value> = cts.iter().map(ComponentTableau::to_json).collect();
    Ok(Document {
        text,
        json: json!({"composition": d.composition().parts(), "count": cts.len(), "records": records}),
        latex: Some(latex),
        ok: true,
    })
}

fn find_component(d: &Diagram, red: &str) -> Result<ComponentTableau> {
    let red: RedSet = red.parse()?;
    listed_components(d)?
        .into_iter()
        .find(|c| c.red_set() == red)
        .ok_or_else(|| Error::InvalidInput(format!("no component tableau of {} has Red Set {red}", d.composition())))
}

fn state_json(rs: &ReverseState) -> Value {
    json!({
        "redSet": rs.red_set().values(),
        "steps": rs.steps(),
        "excludedRoots": rs.excluded_roots().into_iter().map(|(i, j)| [i, j]).collect::<Vec<_>>(),
        "tableau": rs.tableau().to_json(),
    })
}

fn state_text(rs: &ReverseState) -> String {
    let mut t = format!("Red Set {}\n", rs.red_set());
    for s in rs.steps() {
        let _ = writeln!(t, "  {} value {} from C{} into C{}", s.pair, s.value, s.column, s.target);
    }
    let _ = writeln!(t, "excluded roots: {}", coords_text(rs.excluded_roots()));
    t.push_str(&rs.tableau().render_text());
    t
}

fn reverse(d: &Diagram, red: Option<&str>, sequence: Option<&str>, order: HeightOrder, mode: ShiftMode) -> Result<Document> {
    match (red, sequence) {
        (Some(r), None) => {
            let rs = find_component(d, r)?.to_reverse(order, mode)?;
            Ok(Document { text: state_text(&rs), json: state_json(&rs), latex: Some(rs.tableau().render_latex()), ok: true })
        }
        (None, Some(s)) => {
            let chart = enumerate_reverse(d, &parse_sequence(d, s)?, mode)?;
            let leaves = chart.leaf_states();
            let mut text = format!("{} completed reverse tableaux\n", leaves.len());
            let mut latex = String::new();
            for rs in &leaves {
                text.push('\n');
                text.push_str(&state_text(rs));
                latex.push_str(&rs.tableau().render_latex());
            }
            let json = json!({"sequence": s, "leaves": leaves.iter().map(|rs| state_json(rs)).collect::<Vec<_>>()});
            Ok(Document { text, json, latex: Some(latex), ok: true })
        }
        _ => Err(Error::InvalidInput("reverse needs exactly one of --red-set or --sequence".into())),
    }
}

fn selected_invariants(d: &Diagram, pair: Option<&str>) -> Result<Vec<PairInvariant>> {
    match pair {
        Some(p) => {
            let (l, r) = parse_column_pair(p)?;
            Ok(vec![PairInvariant::new(d, &d.pair_by_columns(l, r)?)?])
        }
        None => PairInvariant::all(d),
    }
}

fn factors_json(p: &Polynomial) -> Result<Value> {
    if p.is_zero() {
        return Ok(json!({"unit": "0", "factors": []}));
    }
    let f = multilinear_factor(p)?;
    Ok(json!({"unit": f.unit.to_string(), "factors": f.factors.iter().map(Polynomial::to_json).collect::<Vec<_>>()}))
}

fn factors_text(p: &Polynomial) -> Result<String> {
    if p.is_zero() {
        return Ok("0".into());
    }
    let f = multilinear_factor(p)?;
    let parts: Vec<String> = f.factors.iter().map(|q| format!("({q})")).collect();
    Ok(match f.unit {
        1 => parts.join(" * "),
        u => format!("{u} * {}", parts.join(" * ")),
    })
}

fn invariant(
    d: &Diagram,
    pair: Option<&str>,
    substitute: Option<&str>,
    red: Option<&str>,
    symbolic: bool,
    trials: u32,
    seed: u64,
) -> Result<Document> {
    let invs = selected_invariants(d, pair)?;
    let sub: Option<Substitution> = substitute.map(str::parse).transpose()?;
    let excluded = red.map(|r| find_component(d, r)?.to_reverse(HeightOrder::IncreaseThenDecrease, ShiftMode::Standard)).transpose()?.map(|rs| rs.excluded_roots());
    let mut rng = seeded_rng(seed);
    let mut text = String::new();
    let mut items = Vec::new();
    for inv in &invs {
        let p = inv.pair();
        let _ = writeln!(text, "{p} height {} degree {} minor {}", p.height, inv.degree(), inv.minor_size());
        let _ = writeln!(text, "  distinguished monomial {}", inv.distinguished());
        let mut item = json!({
            "pair": p.to_string(),
            "height": p.height,
            "degree": inv.degree(),
            "minorSize": inv.minor_size(),
            "distinguished": inv.distinguished().to_string(),
        });
        if symbolic || sub.is_some() {
            let mut s = sub.clone().unwrap_or_else(Substitution::identity);
            if let Some(x) = &excluded {
                s = s.zero(x.iter().copied());
            }
            let poly = inv.symbolic(&s, DEFAULT_SYMBOLIC_LIMIT)?;
            let _ = writeln!(text, "  polynomial {poly}");
            let _ = writeln!(text, "  factors {}", factors_text(&poly)?);
            item["polynomial"] = poly.to_json();
            item["factorization"] = factors_json(&poly)?;
        }
        if let Some(x) = &excluded {
            let z = is_zero_on_subspace(inv, x, trials, &mut rng);
            let verdict = if z.zero { format!("zero (failure bound {:.3e})", z.failure_bound) } else { "nonzero".into() };
            let _ = writeln!(text, "  on the component subspace: {verdict}");
            item["zeroTest"] = serde_json::to_value(&z).expect("zero test json");
        }
        items.push(item);
    }
    Ok(Document { text, json: json!({"composition": d.composition().parts(), "invariants": items}), latex: None, ok: true })
}

/// Restricted invariant of `p` at a node, with its factors when the
/// symbolic expansion fits.
fn node_factors(node: &ReverseState, p: &Pair) -> Result<(String, Value)> {
    let inv = PairInvariant::new(node.diagram(), p)?;
    let sub = Substitution::identity().zero(node.excluded_roots());
    match inv.symbolic(&sub, DEFAULT_SYMBOLIC_LIMIT) {
        Ok(poly) => Ok((
            format!("{poly}  =  {}", factors_text(&poly)?),
            json!({"polynomial": poly.to_json(), "factorization": factors_json(&poly)?}),
        )),
        Err(Error::Capacity(m)) => Ok((format!("unavailable ({m})"), json!({"unavailable": m}))),
        Err(e) => Err(e),
    }
}

fn factorize(d: &Diagram, sequence: &str, mode: ShiftMode) -> Result<Document> {
    let seq = parse_sequence(d, sequence)?;
    let chart: FlowChart = enumerate_reverse(d, &seq, mode)?;
    let mut text = format!("composition {} sequence {}\n", d.composition(), seq_text(&seq));
    let mut stages = Vec::new();
    for (stage, p) in seq.iter().enumerate() {
        let _ = writeln!(text, "\nstage {}: implement {p}", stage + 1);
        let mut nodes = Vec::new();
        for node in chart.nodes.iter().filter(|n| n.stage == stage) {
            let (ftext, fjson) = node_factors(&node.state, p)?;
            let _ = writeln!(text, "  node {} Red Set {}: invariant {ftext}", node.id, node.red_set);
            let mut edges = Vec::new();
            for e in chart.edges.iter().filter(|e| e.from == node.id) {
                match (e.to, e.rejected) {
                    (Some(to), _) => {
                        let _ = writeln!(
                            text,
                            "    value {} from C{} -> node {} Red Set {}",
                            e.value, e.column, to, chart.nodes[to].red_set
                        );
                        edges.push(json!({"value": e.value, "column": e.column, "to": to, "redSet": chart.nodes[to].red_set.values()}));
                    }
                    (None, reason) => {
                        let r = chart
                            .rejections
                            .iter()
                            .find(|r| r.stage == stage && r.column == e.column && r.value == e.value)
                            .expect("every rejected edge has a rejection record");
                        let _ = writeln!(
                            text,
                            "    value {} from C{} rejected ({}) would be {}",
                            e.value,
                            e.column,
                            serde_json::to_value(reason).expect("reason").as_str().unwrap_or_default(),
                            r.would_be
                        );
                        edges.push(json!({
                            "value": e.value,
                            "column": e.column,
                            "rejected": reason,
                            "wouldBe": r.would_be.values(),
                            "detail": r.detail,
                        }));
                    }
                }
            }
            nodes.push(json!({"id": node.id, "redSet": node.red_set.values(), "invariant": fjson, "edges": edges}));
        }
        stages.push(json!({"pair": p.to_string(), "nodes": nodes}));
    }
    let leaves: Vec<String> = chart.leaf_red_sets().iter().map(RedSet::to_string).collect();
    let _ = writeln!(text, "\nleaves: {}", leaves.join(" "));
    Ok(Document {
        text,
        json: json!({"composition": d.composition().parts(), "sequence": seq_text(&seq), "stages": stages, "leaves": leaves}),
        latex: None,
        ok: true,
    })
}

fn counts_ok(r: &CompositionReport, strict: bool) -> bool {
    r.failures.iter().all(|f| !strict && f.check == Check::HorizontalCertificate)
}

fn report_text(r: &CompositionReport, strict: bool) -> String {
    let gaps = r.failures_of(Check::HorizontalCertificate).count();
    let mut t = format!(
        "{}: {} components, {} reverse tableaux, {} zero tests ({} symbolic), {} nonzero tests, {} certificates ({} missing), worst bound {:.3e} -> {}\n",
        r.composition,
        r.components,
        r.reverse_states,
        r.zero_tests,
        r.symbolic_tests,
        r.nonzero_tests,
        r.horizontal_checks,
        gaps,
        r.worst_failure_bound,
        if counts_ok(r, strict) { "pass" } else { "FAIL" }
    );
    for f in &r.failures {
        let tag = if f.check == Check::HorizontalCertificate && !strict { "note" } else { "failure" };
        let _ = writeln!(t, "  {tag} [{}] {}", serde_json::to_value(f.check).expect("check").as_str().unwrap_or_default(), f.detail);
    }
    t
}

fn verify_one(d: &Diagram, opts: &SuiteOptions, strict: bool) -> Result<Document> {
    let r = verify_composition(d, opts)?;
    Ok(Document { text: report_text(&r, strict), json: serde_json::to_value(&r).expect("report json"), latex: None, ok: counts_ok(&r, strict) })
}

fn verify_all(max_n: usize, opts: &SuiteOptions, strict: bool) -> Result<Document> {
    if max_n == 0 {
        return Err(Error::InvalidInput("--all-n needs a positive bound".into()));
    }
    let compositions: Vec<Composition> = (1..=max_n).flat_map(Composition::all_of).collect();
    let mut reports: Vec<CompositionReport> =
        compositions.par_iter().map(|c| verify_composition(&Diagram::new(c.clone()), opts)).collect::<Result<_>>()?;
    reports.sort_by(|a, b| {
        let key = |r: &CompositionReport| r.composition.split(',').map(|p| p.parse::<usize>().unwrap_or(0)).collect::<Vec<_>>();
        let (ka, kb) = (key(a), key(b));
        ka.iter().sum::<usize>().cmp(&kb.iter().sum()).then(ka.cmp(&kb))
    });
    let mut text = String::new();
    let ok = reports.iter().all(|r| counts_ok(r, strict));
    for n in 1..=max_n {
        let of_n: Vec<&CompositionReport> =
            reports.iter().filter(|r| r.composition.split(',').filter_map(|p| p.parse::<usize>().ok()).sum::<usize>() == n).collect();
        let sum = |f: fn(&CompositionReport) -> usize| of_n.iter().map(|r| f(r)).sum::<usize>();
        let _ = writeln!(
            text,
            "n={n}: {} compositions, {} components, {} reverse tableaux, {} zero tests, {} nonzero tests, {} missing certificates",
            of_n.len(),
            sum(|r| r.components),
            sum(|r| r.reverse_states),
            sum(|r| r.zero_tests),
            sum(|r| r.nonzero_tests),
            sum(|r| r.failures_of(Check::HorizontalCertificate).count()),
        );
    }
    for r in reports.iter().filter(|r| !r.failures.is_empty()) {
        text.push_str(&report_text(r, strict));
    }
    let _ = writeln!(text, "{}", if ok { "pass" } else { "FAIL" });
    Ok(Document { text, json: json!({"maxN": max_n, "ok": ok, "reports": reports}), latex: None, ok })
}

fn verify_one_red_set(d: &Diagram, red: &str, opts: &SuiteOptions) -> Result<Document> {
    let r = verify_red_set(d, &red.parse()?, opts)?;
    let text = format!(
        "{} Red Set {}: {} invariants, standard {}, extreme {}, worst bound {:.3e}, {} extra excluded roots in extreme mode ({} uncovered) -> {}\n",
        r.composition,
        r.red_set,
        r.invariants,
        if r.standard_zero { "zero" } else { "NONZERO" },
        if r.extreme_zero { "zero" } else { "NONZERO" },
        r.worst_failure_bound,
        r.extreme_extra.len(),
        r.uncovered_extra.len(),
        if r.ok() { "pass" } else { "FAIL" }
    );
    Ok(Document { text, json: serde_json::to_value(&r).expect("report json"), latex: None, ok: r.ok() })
}

fn tableau_doc(t: &Tableau) -> Document {
    Document { text: t.render_text(), json: t.to_json(), latex: Some(t.render_latex()), ok: true }
}

fn render(d: &Diagram, red: Option<&str>, sequence: Option<&str>, view: View, mode: ShiftMode) -> Result<Document> {
    match (red, sequence) {
        (None, None) => Ok(tableau_doc(&Tableau::initial(d))),
        (Some(r), None) => {
            let ct = find_component(d, r)?;
            Ok(match view {
                View::Collapsed => tableau_doc(&ct.collapsed),
                View::Infinity => tableau_doc(&ct.infinity),
                View::Reverse => tableau_doc(ct.to_reverse(HeightOrder::IncreaseThenDecrease, mode)?.tableau()),
            })
        }
        (None, Some(s)) => {
            let chart = enumerate_reverse(d, &parse_sequence(d, s)?, mode)?;
            let leaves = chart.leaf_states();
            Ok(Document {
                text: leaves.iter().map(|rs| rs.tableau().render_text()).collect::<Vec<_>>().join("\n"),
                json: Value::Array(leaves.iter().map(|rs| rs.tableau().to_json()).collect()),
                latex: Some(leaves.iter().map(|rs| rs.tableau().render_latex()).collect()),
                ok: true,
            })
        }
        _ => Err(Error::InvalidInput("render takes at most one of --red-set or --sequence".into())),
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Directory of a persisted run: `runs/<composition>/<command>-<seed>/`.
pub fn run_dir(root: &Path, composition: &str, command: &str, seed: u64) -> PathBuf {
    root.join("runs").join(composition.replace(',', "-")).join(format!("{command}-{seed:x}"))
}

/// Writes the three renderings and a manifest with their digests.
fn persist(root: &Path, cli: &Cli, doc: &Document) -> Result<PathBuf> {
    let composition = match (&cli.command, &cli.composition) {
        (Command::Verify { all_n: Some(n), .. }, _) => format!("all-n-{n}"),
        (_, Some(c)) => c.parse::<Composition>()?.to_string(),
        (_, None) => "none".into(),
    };
    let seed = seed_of(cli);
    let dir = run_dir(root, &composition, cli.command.name(), seed);
    std::fs::create_dir_all(&dir)?;
    let mut digests = serde_json::Map::new();
    for (name, format) in [("output.txt", RenderFormat::Text), ("output.json", RenderFormat::Json), ("output.tex", RenderFormat::Latex)] {
        let body = doc.render(format);
        std::fs::write(dir.join(name), &body)?;
        digests.insert(name.into(), Value::String(hex(&Sha256::digest(body.as_bytes()))));
    }
    let timestamp = std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let manifest = json!({
        "composition": composition,
        "command": cli.command.name(),
        "seed": format!("{seed:#x}"),
        "flags": {"extreme": cli.extreme, "symbolic": cli.symbolic, "format": cli.format},
        "version": env!("CARGO_PKG_VERSION"),
        "timestamp": timestamp,
        "ok": doc.ok,
        "digests": digests,
    });
    std::fs::write(dir.join("manifest.json"), serde_json::to_string_pretty(&manifest).expect("manifest") + "\n")?;
    Ok(dir)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("nilfibre").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn seeds_parse_in_both_bases() {
        assert_eq!(parse_seed("17"), Ok(17));
        assert_eq!(parse_seed("0x5eed_2024_0bad_cafe"), Ok(DEFAULT_SEED));
        assert!(parse_seed("seed").is_err());
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run_str(&["enum-components", "-c", "0,2"]).0, EXIT_USAGE);
        assert_eq!(run_str(&["enum-components"]).0, EXIT_USAGE);
        assert_eq!(run_str(&["frobnicate"]).0, EXIT_USAGE);
        assert_eq!(run_str(&["factorize", "-c", "1,2,1,2", "--sequence", "C1,C3"]).0, EXIT_USAGE);
        assert_eq!(run_str(&["--help"]).0, EXIT_OK);
    }

    #[test]
    fn trivial_diagram_has_no_records() {
        let (code, out, _) = run_str(&["enum-components", "-c", "5", "--format", "json"]);
        assert_eq!(code, EXIT_OK);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["count"], 0);
    }

    #[test]
    fn run_directory_layout() {
        let p = run_dir(Path::new("/tmp/x"), "1,2,1,2", "verify", 255);
        assert_eq!(p, Path::new("/tmp/x/runs/1-2-1-2/verify-ff"));
    }
}
