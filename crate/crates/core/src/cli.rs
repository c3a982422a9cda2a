//! Command-line front end.
//!
//! Exit codes: 0 success, 1 an identity failed to hold, 2 usage or input error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;

use clap::{Args, Parser, Subcommand};
use num_traits::ToPrimitive;
use serde::Serialize;
use serde_json::{json, Value};

use crate::catalog::{resolve, standard_recipes, Catalog};
use crate::constructions::CatalogEntry;
use crate::error::{Error, Result};
use crate::gluing::{
    eval_glued, glue, glue_conjectural, glue_torus, GluedJson, GluedSeries, GluingSide, GluingSpec,
    SplitClass,
};
use crate::lattice::{HClass, MarkedSurface};
use crate::number::{parse_rational, Gaussian, Rational};
use crate::pairing_fit::{
    default_references, entry_coordinates, fit_diagonal, fitted_to_json, Reference,
};
use crate::series::{
    default_probes, finite_type_order, parity_holds, relation_poly, split_ws, ExpPolynomial,
    RelationPoly,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "donaldson",
    version,
    about = "Exact Donaldson series and fiber-sum gluing calculator"
)]
struct Cli {
    #[command(flatten)]
    output: OutputArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Copy)]
struct OutputArgs {
    /// JSON output (default).
    #[arg(long, global = true, conflicts_with = "table")]
    json: bool,
    /// Plain-text table output.
    #[arg(long, global = true)]
    table: bool,
    /// Also show decimal approximations in tables (display only).
    #[arg(long, global = true)]
    float: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List or show catalog entries.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Build an entry from a recipe: elliptic:n, bg:g, dia2:g':g, cg:g.
    Build {
        recipe: String,
        /// Write the entry into the catalog directory.
        #[arg(long)]
        store: bool,
    },
    /// Glue two entries along their genus-g surfaces.
    Glue {
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
        #[arg(long)]
        g: u32,
        /// Square of the glued w; defaults to w1² + w2².
        #[arg(long, allow_hyphen_values = true)]
        w_sq: Option<i64>,
        /// Genus-1 gluing with three sectors.
        #[arg(long)]
        torus: bool,
    },
    /// Evaluate a glued series (JSON file) on a split class.
    Eval {
        #[arg(long)]
        glued: String,
        /// Left piece: a class label or comma-separated coordinates.
        #[arg(long, allow_hyphen_values = true)]
        d1: String,
        #[arg(long, allow_hyphen_values = true)]
        d2: String,
        /// Σ·D; must agree with D1·Σ1 = D2·Σ2.
        #[arg(long, allow_hyphen_values = true)]
        sigma_d: String,
        /// Also print Taylor coefficients up to this order.
        #[arg(long)]
        expand_order: Option<usize>,
    },
    /// Run the identity suites on an entry.
    Check {
        #[arg(long)]
        entry: String,
    },
    /// Fit the diagonal pairing matrix from reference gluings.
    Fit {
        #[arg(long)]
        g: u32,
        /// Entries to use: `cg:g` pairs `B_g` against `C_g`, any other recipe is
        /// glued to itself. Defaults to the standard set.
        #[arg(long, value_delimiter = ',')]
        references: Vec<String>,
    },
    /// Experimental gluing of stabilized series (entry JSON files).
    Conjecture {
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
        #[arg(long)]
        g: u32,
        #[arg(long, allow_hyphen_values = true)]
        w_sq: Option<i64>,
    },
}

#[derive(Subcommand, Debug)]
enum CatalogAction {
    /// Standard recipes and stored entries.
    List,
    /// Print one entry.
    Show { name: String },
}

/// Outcome of a command that ran to completion.
struct Report {
    json: Value,
    table: String,
    ok: bool,
}

impl Report {
    fn ok(json: Value, table: String) -> Self {
        Self {
            json,
            table,
            ok: true,
        }
    }
}

pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if code == EXIT_OK {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    match execute(&cli) {
        Ok(report) => {
            let written = if cli.output.table {
                write!(out, "{}", report.table)
            } else {
                writeln!(
                    out,
                    "{}",
                    serde_json::to_string_pretty(&report.json).expect("serializable")
                )
            };
            if written.is_err() {
                return EXIT_USAGE;
            }
            if report.ok {
                EXIT_OK
            } else {
                EXIT_VIOLATION
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::CatalogMismatch(_)
        | Error::InconsistentReferences(_)
        | Error::InexactDivision(_) => EXIT_VIOLATION,
        _ => EXIT_USAGE,
    }
}

fn execute(cli: &Cli) -> Result<Report> {
    let float = cli.output.float;
    match &cli.command {
        Command::Catalog { action } => match action {
            CatalogAction::List => catalog_list(),
            CatalogAction::Show { name } => show_entry(&Catalog::from_env().load(name)?, float),
        },
        Command::Build { recipe, store } => {
            let entry = crate::catalog::lookup(recipe)?;
            if *store {
                Catalog::from_env().store(&entry)?;
            }
            show_entry(&entry, float)
        }
        Command::Glue {
            left,
            right,
            g,
            w_sq,
            torus,
        } => {
            let spec = spec_from_refs(left, right, *g, *w_sq)?;
            let gs = if *torus {
                glue_torus(&spec)?
            } else {
                glue(&spec)?
            };
            Ok(glued_report(&gs, float))
        }
        Command::Eval {
            glued,
            d1,
            d2,
            sigma_d,
            expand_order,
        } => eval_command(glued, d1, d2, sigma_d, *expand_order, float),
        Command::Check { entry } => check_command(entry),
        Command::Fit { g, references } => fit_command(*g, references),
        Command::Conjecture {
            left,
            right,
            g,
            w_sq,
        } => {
            let spec = spec_from_refs(left, right, *g, *w_sq)?;
            let gs = glue_conjectural(&spec)?;
            let mut report = glued_report(&gs, float);
            report.table = format!("EXPERIMENTAL: conjectural formula\n{}", report.table);
            Ok(report)
        }
    }
}

fn spec_from_refs(left: &str, right: &str, g: u32, w_sq: Option<i64>) -> Result<GluingSpec> {
    let l = GluingSide::for_genus(left, resolve(left)?, g)?;
    let r = GluingSide::for_genus(right, resolve(right)?, g)?;
    GluingSpec::new(l, r, w_sq)
}

fn fmt_rational(q: &Rational, float: bool) -> String {
    if float {
        format!("{q} (≈ {:.6})", q.to_f64().unwrap_or(f64::NAN))
    } else {
        q.to_string()
    }
}

fn catalog_list() -> Result<Report> {
    let catalog = Catalog::from_env();
    let stored = catalog.stored()?;
    let mismatched = catalog.verify()?;
    let standard: Vec<String> = standard_recipes().iter().map(ToString::to_string).collect();
    let stored_names: Vec<String> = stored.iter().map(ToString::to_string).collect();
    let mut table = String::from("standard recipes:\n");
    for r in &standard {
        table.push_str(&format!("  {r}\n"));
    }
    table.push_str(&format!("stored in {}:\n", catalog.dir().display()));
    for r in &stored {
        let flag = if mismatched.contains(r) {
            "  (differs from recipe)"
        } else {
            ""
        };
        table.push_str(&format!("  {r}{flag}\n"));
    }
    Ok(Report {
        json: json!({
            "standard": standard,
            "stored": stored_names,
            "mismatched": mismatched.iter().map(ToString::to_string).collect::<Vec<_>>(),
        }),
        table,
        ok: mismatched.is_empty(),
    })
}

fn show_entry(entry: &CatalogEntry, float: bool) -> Result<Report> {
    let lattice = entry.lattice();
    let mut table = format!(
        "{} ({})\n  b+ = {}, b1 = {}, rank {}\n  {}\n",
        entry.name(),
        entry.recipe,
        lattice.b_plus(),
        lattice.b_one(),
        lattice.rank(),
        entry.provenance
    );
    for s in &entry.surfaces {
        table.push_str(&format!(
            "  surface {} genus {} class {}\n",
            s.label, s.genus, s.class
        ));
    }
    table.push_str("  basic classes:\n");
    for e in entry.series.entries() {
        table.push_str(&format!(
            "    {}  {}\n",
            e.class,
            fmt_rational(&e.coeff, float)
        ));
    }
    Ok(Report::ok(serde_json::to_value(entry.descriptor())?, table))
}

fn glued_report(gs: &GluedSeries, float: bool) -> Report {
    let j = gs.to_json();
    let mut table = format!(
        "{} #_Σ {} (g = {}, {}), w² = {}\n",
        j.left,
        j.right,
        j.g,
        serde_json::to_value(j.kind)
            .expect("serializable")
            .as_str()
            .unwrap_or_default(),
        j.w_sq
    );
    if gs.is_empty() {
        table.push_str("  no basic classes\n");
    }
    for e in gs.entries() {
        table.push_str(&format!(
            "  {} K={} L={}  {}\n",
            e.sector,
            gs.left_class(e.j),
            gs.right_class(e.k),
            fmt_rational(&e.coeff, float)
        ));
    }
    Report::ok(serde_json::to_value(&j).expect("serializable"), table)
}

fn parse_side_class(entry: &CatalogEntry, text: &str) -> Result<HClass> {
    entry.lattice().parse_class(text)
}

fn eval_command(
    file: &str,
    d1: &str,
    d2: &str,
    sigma_d: &str,
    expand_order: Option<usize>,
    float: bool,
) -> Result<Report> {
    let text = fs::read_to_string(file)?;
    let parsed: GluedJson = serde_json::from_str(&text)?;
    let gs = GluedSeries::from_json(&parsed, resolve)?;
    let spec = gs.spec();
    let d1 = parse_side_class(&spec.left.entry, d1)?;
    let d2 = parse_side_class(&spec.right.entry, d2)?;
    let d = SplitClass::with_pairing(spec, d1, d2, parse_rational(sigma_d)?)?;
    let value = eval_glued(&gs, &d)?;
    let mut json = json!({ "value": value.to_json() });
    let mut table = format!("{value}\n");
    if let Some(order) = expand_order {
        let coeffs = value.expand(order);
        json["expansion"] = Value::from(coeffs.iter().map(ToString::to_string).collect::<Vec<_>>());
        for (n, c) in coeffs.iter().enumerate() {
            let approx = if float {
                format!("  (≈ {:.6})", c.re.to_f64().unwrap_or(f64::NAN))
            } else {
                String::new()
            };
            table.push_str(&format!("  t^{n}: {c}{approx}\n"));
        }
    }
    Ok(Report::ok(json, table))
}

/// Result of one identity suite.
#[derive(Clone, Debug, Serialize)]
pub struct SuiteResult {
    pub name: String,
    pub identity: String,
    pub passed: bool,
    pub detail: String,
}

impl SuiteResult {
    fn new(name: &str, identity: &str, failures: Vec<String>, checked: usize) -> Self {
        let passed = failures.is_empty();
        let detail = if passed {
            format!("{checked} case(s) checked")
        } else {
            failures.join("; ")
        };
        Self {
            name: name.into(),
            identity: identity.into(),
            passed,
            detail,
        }
    }
}

type Suite = fn(&CatalogEntry) -> Result<SuiteResult>;

/// The identity suites `check` runs, in order.
pub fn check_suites(entry: &CatalogEntry) -> Result<Vec<SuiteResult>> {
    let suites: [Suite; 6] = [
        suite_involution,
        suite_adjunction,
        suite_characteristic,
        suite_simple_type,
        suite_relation,
        suite_parity,
    ];
    std::thread::scope(|scope| {
        let handles: Vec<_> = suites
            .iter()
            .map(|s| scope.spawn(move || s(entry)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("suite worker panicked"))
            .collect()
    })
}

fn surfaces_with_w(entry: &CatalogEntry) -> Vec<(&MarkedSurface, &HClass)> {
    entry
        .surfaces
        .iter()
        .filter_map(|s| entry.w_choices.get(&s.label).map(|w| (s, w)))
        .collect()
}

fn suite_involution(entry: &CatalogEntry) -> Result<SuiteResult> {
    let bad = entry.series.check_involution()?;
    Ok(SuiteResult::new(
        "involution",
        "coefficient of -K equals (-1)^d0 times coefficient of K",
        bad.iter().map(|e| format!("K = {}", e.class)).collect(),
        entry.series.entries().len(),
    ))
}

fn suite_adjunction(entry: &CatalogEntry) -> Result<SuiteResult> {
    let mut failures = Vec::new();
    for s in &entry.surfaces {
        for v in entry.series.check_adjunction(s)?.violators {
            failures.push(format!("{}: K = {}", s.label, v.class));
        }
    }
    Ok(SuiteResult::new(
        "adjunction",
        "2g - 2 >= Σ² + |K·Σ| for every basic class and surface",
        failures,
        entry.surfaces.len(),
    ))
}

fn suite_characteristic(entry: &CatalogEntry) -> Result<SuiteResult> {
    let lattice = entry.lattice();
    let mut failures = Vec::new();
    for e in entry.series.entries() {
        if !lattice.is_characteristic(&e.class)? {
            failures.push(format!("K = {}", e.class));
        }
    }
    Ok(SuiteResult::new(
        "characteristic",
        "K·v ≡ v·v (mod 2) for every basic class K and basis vector v",
        failures,
        entry.series.entries().len(),
    ))
}

fn suite_simple_type(entry: &CatalogEntry) -> Result<SuiteResult> {
    let expected = if entry.series.is_zero() { 0 } else { 1 };
    let mut failures = Vec::new();
    let mut checked = 0;
    for (s, w) in surfaces_with_w(entry) {
        if default_probes(entry.lattice(), s)?.is_empty() {
            continue;
        }
        let n = finite_type_order(&entry.series, w, s, &[])?;
        checked += 1;
        if n != expected {
            failures.push(format!("{}: order {n}, expected {expected}", s.label));
        }
    }
    Ok(SuiteResult::new(
        "simple-type",
        "inserting (x² - 4) kills the series",
        failures,
        checked,
    ))
}

/// The relation polynomial for each genus >= 2 surface, at every probe
/// with `D·Σ = 1`, for both `w` and `w + Σ`.
pub fn relation_failures(
    entry: &CatalogEntry,
    s: &MarkedSurface,
    w: &HClass,
) -> Result<(Vec<String>, usize)> {
    let z: RelationPoly = relation_poly(s.genus)?;
    let mut failures = Vec::new();
    let mut checked = 0;
    let twists = [w.clone(), w.try_add(&s.class)?];
    for probe in default_probes(entry.lattice(), s)? {
        for tw in &twists {
            let value = split_ws(&entry.series, tw, s)?.apply(&probe, &z)?;
            checked += 1;
            if !value.is_zero() {
                failures.push(format!("{}: w = {tw}, D = {probe}", s.label));
            }
        }
    }
    Ok((failures, checked))
}

fn suite_relation(entry: &CatalogEntry) -> Result<SuiteResult> {
    let mut failures = Vec::new();
    let mut checked = 0;
    for (s, w) in surfaces_with_w(entry) {
        if s.genus < 2 {
            continue;
        }
        let (f, c) = relation_failures(entry, s, w)?;
        failures.extend(f);
        checked += c;
    }
    Ok(SuiteResult::new(
        "relation-poly",
        "the genus-g surface relation z vanishes at D with D·Σ = 1",
        failures,
        checked,
    ))
}

fn suite_parity(entry: &CatalogEntry) -> Result<SuiteResult> {
    let mut failures = Vec::new();
    let mut checked = 0;
    for (s, w) in surfaces_with_w(entry) {
        let mut probes = default_probes(entry.lattice(), s)?;
        probes.extend(entry.lattice().named_classes().values().cloned());
        for d in probes {
            checked += 1;
            if !parity_holds(&entry.series, w, s, &d)? {
                failures.push(format!("{}: D = {d}", s.label));
            }
        }
    }
    Ok(SuiteResult::new(
        "parity",
        "D^(w,Σ)(e^{tD}) is even or odd in t according to d0",
        failures,
        checked,
    ))
}

fn check_command(reference: &str) -> Result<Report> {
    let entry = resolve(reference)?;
    let results = check_suites(&entry)?;
    let ok = results.iter().all(|r| r.passed);
    let mut table = String::new();
    for r in &results {
        let tag = if r.passed { "PASS" } else { "FAIL" };
        table.push_str(&format!(
            "[{tag}] {}: {} ({})\n",
            r.name, r.identity, r.detail
        ));
    }
    Ok(Report {
        json: json!({ "entry": reference, "passed": ok, "suites": results }),
        table,
        ok,
    })
}

/// `cg:g` gives the closed-form reference; any other recipe is glued to
/// itself at `D = (w, w)` for its distinguished `w` (which must pair to 1 with Σ).
fn reference_for(spec: &str, g: u32) -> Result<Reference> {
    let entry = resolve(spec)?;
    if entry.recipe.starts_with("cg:") {
        let bg = crate::constructions::build_bg(i64::from(g))?;
        let f = bg.lattice().named("T1")?.clone();
        let side = entry_coordinates(&bg, "Sigma_g", &f)?;
        let hat = entry.lattice().named("Sigma_hat_2")?.clone();
        let target = entry_coordinates(&entry, "Sigma_g", &hat)?;
        return Reference::from_closed_form(
            format!("bg:{g} pair against {spec}"),
            side.clone(),
            side,
            &target,
        );
    }
    let side = || GluingSide::for_genus(spec, entry.clone(), g);
    let glue_spec = GluingSpec::new(side()?, side()?, None)?;
    let gs = glue(&glue_spec)?;
    let w = glue_spec.left.w.clone();
    let d = SplitClass::new(&glue_spec, w.clone(), w)?;
    Reference::from_gluing(format!("{spec} double"), &gs, &d)
}

fn fit_command(g: u32, references: &[String]) -> Result<Report> {
    let refs = if references.is_empty() {
        default_references(g)?
    } else {
        references
            .iter()
            .map(|r| reference_for(r, g))
            .collect::<Result<Vec<_>>>()?
    };
    let fitted = fit_diagonal(&refs, &[]);
    let (m, missing) = match fitted {
        Ok(m) => (m, Vec::new()),
        Err(Error::InsufficientData(_)) => {
            let mut m = std::collections::BTreeMap::new();
            let mut missing = Vec::new();
            for alpha in 1..=(2 * g as usize - 1) {
                match fit_diagonal(&refs, &[alpha]) {
                    Ok(one) => m.extend(one),
                    Err(Error::InsufficientData(a)) => missing.push(a),
                    Err(e) => return Err(e),
                }
            }
            (m, missing)
        }
        Err(e) => return Err(e),
    };
    let mut table = String::new();
    for (alpha, p) in &m {
        table.push_str(&format!("M[{alpha},{alpha}](t) = {}\n", describe(p)));
    }
    for a in &missing {
        table.push_str(&format!(
            "M[{a},{a}](t): not determined by the references\n"
        ));
    }
    Ok(Report::ok(
        json!({ "g": g, "entries": fitted_to_json(&m), "undetermined": missing }),
        table,
    ))
}

fn describe(p: &ExpPolynomial) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let parts: Vec<String> = p
        .terms()
        .iter()
        .map(|(l, c)| {
            let c = if c.is_real() {
                c.re.to_string()
            } else {
                c.to_string()
            };
            if l == &Gaussian::zero() {
                c
            } else {
                format!("{c}·e^({l} t)")
            }
        })
        .collect();
    parts.join(" + ")
}
