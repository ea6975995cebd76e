//! Argument definitions and the six subcommands.

use std::f64::consts::PI;
use std::io::Write;
use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use pj_core::bands::{self, support_bound};
use pj_core::exact::parse_rational;
use pj_core::measure::{gram_summary, OrthogonalityMeasure, MAX_GRAM_DEGREE};
use pj_core::quadrature::{Node, QuadOptions};
use pj_core::spectral::{phi_cf, ClosedForm, Entry, SpectralDensities};
use pj_core::suite::{self, Status};
use pj_core::RecurrenceSpec;

use crate::error::CliError;
use crate::table::{emit_csv, emit_json, Document, Table, Value};

/// Environment variable overriding the default suite tolerance.
pub const TOLERANCE_ENV: &str = "PJ_TOLERANCE";

#[derive(Debug, Clone, Parser)]
#[command(name = "pj", version, about = "Bands, measures and spectral data for period-N cosine recurrences")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Turning points, bands and mass points, for one period or a range.
    Bands(BandsArgs),
    /// Orthogonality weight on a clustered grid, point masses and totals.
    Measure(GridArgs),
    /// Gram matrix of the polynomials under the measure.
    Gram(GramArgs),
    /// The 2×2 spectral density matrix of the two-sided operator.
    Spectral(GridArgs),
    /// Closed-form Stieltjes transform against its continued fraction.
    Phi(PhiArgs),
    /// Runs the invariant suite and reports one record per check.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    fn as_str(&self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Coupling `a`: decimal (`0.9`, `-1.5e-1`) or fraction (`9/10`), read exactly.
    #[arg(long, allow_negative_numbers = true)]
    pub a: String,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write to this file instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
#[command(group(ArgGroup::new("period").required(true).args(["n", "n_range"])))]
pub struct BandsArgs {
    #[command(flatten)]
    pub common: Common,
    /// Period `N` of the recurrence coefficients, at least 1
    #[arg(long = "N", value_parser = clap::value_parser!(u32).range(1..))]
    pub n: Option<u32>,
    /// Inclusive range of periods, e.g. `1..15`.
    #[arg(long = "N-range")]
    pub n_range: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    #[command(flatten)]
    pub common: Common,
    /// Period `N` of the recurrence coefficients, at least 1
    #[arg(long = "N", value_parser = clap::value_parser!(u32).range(1..))]
    pub n: u32,
    /// Grid points per band.
    #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u32).range(2..))]
    pub points: u32,
}

#[derive(Debug, Clone, Args)]
pub struct GramArgs {
    #[command(flatten)]
    pub common: Common,
    /// Period `N` of the recurrence coefficients, at least 1
    #[arg(long = "N", value_parser = clap::value_parser!(u32).range(1..))]
    pub n: u32,
    #[arg(long = "max-deg", default_value_t = 10, value_parser = clap::value_parser!(u32).range(0..=MAX_GRAM_DEGREE as i64))]
    pub max_deg: u32,
}

#[derive(Debug, Clone, Args)]
pub struct PhiArgs {
    #[command(flatten)]
    pub common: Common,
    /// Period `N` of the recurrence coefficients, at least 1
    #[arg(long = "N", value_parser = clap::value_parser!(u32).range(1..))]
    pub n: u32,
    /// Real-part samples spanning the support plus a margin.
    #[arg(long, default_value_t = 9, value_parser = clap::value_parser!(u32).range(2..))]
    pub points: u32,
    /// Imaginary parts, comma separated; each must be positive.
    #[arg(long, value_delimiter = ',', default_values_t = [0.25, 0.5, 1.0])]
    pub im: Vec<f64>,
    /// Continued-fraction depth.
    #[arg(long, default_value_t = 400, value_parser = clap::value_parser!(u32).range(1..))]
    pub depth: u32,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: Common,
    /// Period `N` of the recurrence coefficients, at least 1
    #[arg(long = "N", value_parser = clap::value_parser!(u32).range(1..))]
    pub n: u32,
    /// Suite tolerance; overrides the environment variable.
    #[arg(long)]
    pub tolerance: Option<f64>,
}

/// What a command produced, plus the first failed check if any.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub document: Document,
    pub failed: Option<String>,
}

impl Outcome {
    fn ok(document: Document) -> Self {
        Outcome { document, failed: None }
    }
}

fn make_spec(a: &str, n: u32) -> Result<RecurrenceSpec, CliError> {
    let exact = parse_rational(a).ok_or_else(|| CliError::Usage(format!("cannot read {:?} as a rational coupling", a)))?;
    Ok(RecurrenceSpec::from_rational(exact, n as usize)?)
}

/// Parses `lo..hi` (inclusive) with `1 ≤ lo ≤ hi`.
pub fn parse_range(s: &str) -> Result<(u32, u32), CliError> {
    let bad = || CliError::Usage(format!("expected a period range like 1..15, got {:?}", s));
    let (lo, hi) = s.split_once("..").ok_or_else(bad)?;
    let lo: u32 = lo.trim().parse().map_err(|_| bad())?;
    let hi: u32 = hi.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
    if lo == 0 || lo > hi {
        return Err(bad());
    }
    Ok((lo, hi))
}

/// `points` nodes inside `(lo, hi)` at Chebyshev angles, ascending, so
/// they cluster toward both endpoints without touching them.
pub fn band_nodes(lo: f64, hi: f64, points: usize) -> Vec<Node> {
    let half = 0.5 * (hi - lo);
    (0..points)
        .map(|i| {
            let theta = (2 * i + 1) as f64 * PI / (2 * points) as f64;
            let (s, c) = (0.5 * theta).sin_cos();
            let from_lo = 2.0 * half * s * s;
            let from_hi = 2.0 * half * c * c;
            let x = if from_lo <= from_hi { lo + from_lo } else { hi - from_hi };
            Node { x, from_lo, from_hi }
        })
        .collect()
}

fn meta(command: &str, common: &Common, extra: Vec<(&str, Value)>) -> Vec<(String, Value)> {
    let mut m: Vec<(String, Value)> = vec![
        ("tool".into(), "pj".into()),
        ("version".into(), env!("CARGO_PKG_VERSION").into()),
        ("command".into(), command.into()),
        ("a".into(), common.a.clone().into()),
    ];
    if let Some(q) = parse_rational(&common.a) {
        m.push(("a_exact".into(), q.to_string().into()));
    }
    m.extend(extra.into_iter().map(|(k, v)| (k.to_string(), v)));
    m.push(("format".into(), common.format.as_str().into()));
    m
}

fn pairs(items: Vec<(&str, Value)>) -> Vec<(String, Value)> {
    items.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

fn cmd_bands(args: &BandsArgs) -> Result<Outcome, CliError> {
    let (lo, hi, period_meta) = match (&args.n, &args.n_range) {
        (Some(n), None) => (*n, *n, ("N", Value::Int(*n as i64))),
        (None, Some(r)) => {
            let (lo, hi) = parse_range(r)?;
            (lo, hi, ("N_range", Value::Text(format!("{}..{}", lo, hi))))
        }
        _ => return Err(CliError::Usage("give exactly one of --N and --N-range".into())),
    };
    let mut table = Table::new("bands", &["N", "kind", "k", "lo", "hi", "mass", "class"]);
    let mut doubles = 0usize;
    for n in lo..=hi {
        let spec = make_spec(&args.common.a, n)?;
        let t = bands::turning_points(&spec)?;
        let zeros = bands::zero_sets(&spec)?;
        let masses = pj_core::measure::masses(&spec, &zeros);
        let n = n as i64;
        for (i, (l, h)) in t.bands().into_iter().enumerate() {
            table.push(vec![n.into(), "band".into(), (i + 1).into(), l.into(), h.into(), Value::Null, Value::Null]);
        }
        for (i, (l, h)) in t.merged_intervals().into_iter().enumerate() {
            table.push(vec![n.into(), "interval".into(), (i + 1).into(), l.into(), h.into(), Value::Null, Value::Null]);
        }
        for &k in &t.double_roots {
            let x = t.xi[2 * k - 1];
            table.push(vec![n.into(), "double_root".into(), k.into(), x.into(), x.into(), Value::Null, Value::Null]);
            doubles += 1;
        }
        for (i, &(y, m)) in masses.iter().enumerate() {
            let class = if m > 0.0 { "positive" } else { "zero" };
            table.push(vec![n.into(), "mass".into(), (i + 1).into(), y.into(), y.into(), m.into(), class.into()]);
        }
    }
    let document = Document {
        meta: meta("bands", &args.common, vec![period_meta]),
        summary: pairs(vec![("double_roots", doubles.into())]),
        table,
    };
    Ok(Outcome::ok(document))
}

fn cmd_measure(args: &GridArgs) -> Result<Outcome, CliError> {
    let spec = make_spec(&args.common.a, args.n)?;
    let m = OrthogonalityMeasure::new(&spec)?;
    let mut table = Table::new("measure", &["kind", "index", "x", "value"]);
    for band in 0..m.bands().band_count() {
        let (lo, hi) = m.bands().band(band);
        for node in band_nodes(lo, hi, args.points as usize) {
            table.push(vec!["weight".into(), (band + 1).into(), node.x.into(), m.weight_at(band, node).into()]);
        }
    }
    for (k, &(y, mass)) in m.masses().iter().enumerate() {
        table.push(vec!["mass".into(), (k + 1).into(), y.into(), mass.into()]);
    }
    let continuous = m.continuous_mass()?;
    let discrete = m.discrete_mass();
    let total = continuous + discrete;
    for (kind, v) in [("continuous_mass", continuous), ("discrete_mass", discrete), ("total_mass", total)] {
        table.push(vec![kind.into(), Value::Null, Value::Null, v.into()]);
    }
    let document = Document {
        meta: meta("measure", &args.common, vec![("N", args.n.into_value()), ("points", args.points.into_value())]),
        summary: pairs(vec![
            ("continuous_mass", continuous.into()),
            ("discrete_mass", discrete.into()),
            ("total_mass", total.into()),
        ]),
        table,
    };
    Ok(Outcome::ok(document))
}

fn cmd_gram(args: &GramArgs) -> Result<Outcome, CliError> {
    let spec = make_spec(&args.common.a, args.n)?;
    let m = OrthogonalityMeasure::new(&spec)?;
    let g = m.gram_matrix(args.max_deg as usize, true)?;
    let mut table = Table::new("gram", &["m", "n", "value"]);
    for (i, row) in g.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            table.push(vec![i.into(), j.into(), v.into()]);
        }
    }
    let (off, diag) = gram_summary(&g);
    let document = Document {
        meta: meta("gram", &args.common, vec![("N", args.n.into_value()), ("max_deg", args.max_deg.into_value())]),
        summary: pairs(vec![("max_offdiagonal", off.into()), ("min_diagonal", diag.into())]),
        table,
    };
    Ok(Outcome::ok(document))
}

fn cmd_spectral(args: &GridArgs) -> Result<Outcome, CliError> {
    let spec = make_spec(&args.common.a, args.n)?;
    let d = SpectralDensities::new(&spec)?;
    let mut table = Table::new("spectral", &["band", "x", "d00", "d01", "d11"]);
    for band in 0..d.bands().band_count() {
        let (lo, hi) = d.bands().band(band);
        for node in band_nodes(lo, hi, args.points as usize) {
            table.push(vec![
                (band + 1).into(),
                node.x.into(),
                d.at(Entry::D00, band, node).into(),
                d.at(Entry::D01, band, node).into(),
                d.at(Entry::D11, band, node).into(),
            ]);
        }
    }
    let opts = QuadOptions::default();
    let m0 = d.integrate(&[Entry::D00, Entry::D11, Entry::D01], |_| 1.0, &opts)?;
    let m1 = d.integrate(&[Entry::D01], |x| x, &opts)?;
    let document = Document {
        meta: meta("spectral", &args.common, vec![("N", args.n.into_value()), ("points", args.points.into_value())]),
        summary: pairs(vec![
            ("integral_d00", m0[0].into()),
            ("integral_d11", m0[1].into()),
            ("integral_d01", m0[2].into()),
            ("integral_x_d01", m1[0].into()),
        ]),
        table,
    };
    Ok(Outcome::ok(document))
}

fn cmd_phi(args: &PhiArgs) -> Result<Outcome, CliError> {
    if args.im.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(CliError::Usage("--im values must be positive".into()));
    }
    let spec = make_spec(&args.common.a, args.n)?;
    let cf = ClosedForm::new(&spec)?;
    let reach = support_bound(spec.a()) + 0.5;
    let p = args.points as usize;
    let mut table = Table::new(
        "phi",
        &["re", "im", "phi_closed_re", "phi_closed_im", "phi_cf_re", "phi_cf_im", "abs_diff"],
    );
    let mut worst = 0.0f64;
    for &im in &args.im {
        for i in 0..p {
            let re = -reach + 2.0 * reach * i as f64 / (p - 1) as f64;
            let z = Complex64::new(re, im);
            let closed = cf.phi(z)?;
            let cont = phi_cf(&spec, z, args.depth as usize)?;
            let diff = (closed - cont).norm();
            worst = worst.max(diff);
            table.push(vec![
                re.into(),
                im.into(),
                closed.re.into(),
                closed.im.into(),
                cont.re.into(),
                cont.im.into(),
                diff.into(),
            ]);
        }
    }
    let im_list = args.im.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",");
    let document = Document {
        meta: meta(
            "phi",
            &args.common,
            vec![
                ("N", args.n.into_value()),
                ("points", args.points.into_value()),
                ("im", im_list.into()),
                ("depth", args.depth.into_value()),
            ],
        ),
        summary: pairs(vec![("max_abs_diff", worst.into())]),
        table,
    };
    Ok(Outcome::ok(document))
}

/// Suite tolerance from the flag, else the environment, else the default.
pub fn resolve_tolerance(flag: Option<f64>, env: Option<&str>) -> Result<f64, CliError> {
    let tol = match (flag, env) {
        (Some(t), _) => t,
        (None, Some(s)) => s
            .trim()
            .parse::<f64>()
            .map_err(|_| CliError::Usage(format!("{} must be a number, got {:?}", TOLERANCE_ENV, s)))?,
        (None, None) => suite::DEFAULT_TOLERANCE,
    };
    if !(tol.is_finite() && tol > 0.0) {
        return Err(CliError::Usage(format!("tolerance must be positive, got {}", tol)));
    }
    Ok(tol)
}

fn cmd_verify(args: &VerifyArgs) -> Result<Outcome, CliError> {
    let env = std::env::var(TOLERANCE_ENV).ok();
    let tol = resolve_tolerance(args.tolerance, env.as_deref())?;
    let spec = make_spec(&args.common.a, args.n)?;
    let records = suite::run_suite(&spec, tol)?;
    let mut table = Table::new("verify", &["check_name", "status", "max_residual", "threshold"]);
    for r in &records {
        table.push(vec![
            r.check_name.clone().into(),
            r.status.as_str().into(),
            r.max_residual.into(),
            r.threshold.into(),
        ]);
    }
    let count = |s: Status| records.iter().filter(|r| r.status == s).count();
    let failed = records.iter().find(|r| r.status == Status::Fail).map(|r| r.check_name.clone());
    let document = Document {
        meta: meta("verify", &args.common, vec![("N", args.n.into_value()), ("tolerance", tol.into())]),
        summary: pairs(vec![
            ("passed", count(Status::Pass).into()),
            ("failed", count(Status::Fail).into()),
            ("skipped", count(Status::Skip).into()),
        ]),
        table,
    };
    Ok(Outcome { document, failed })
}

trait IntoValue {
    fn into_value(self) -> Value;
}

impl IntoValue for u32 {
    fn into_value(self) -> Value {
        Value::Int(self as i64)
    }
}

/// Runs a parsed command without writing anything.
pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Bands(a) => cmd_bands(a),
        Command::Measure(a) => cmd_measure(a),
        Command::Gram(a) => cmd_gram(a),
        Command::Spectral(a) => cmd_spectral(a),
        Command::Phi(a) => cmd_phi(a),
        Command::Verify(a) => cmd_verify(a),
    }
}

fn common(cli: &Cli) -> &Common {
    match &cli.command {
        Command::Bands(a) => &a.common,
        Command::Measure(a) | Command::Spectral(a) => &a.common,
        Command::Gram(a) => &a.common,
        Command::Phi(a) => &a.common,
        Command::Verify(a) => &a.common,
    }
}

/// Serializes a document in the requested format.
pub fn render(doc: &Document, format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => emit_json(doc),
        Format::Csv => emit_csv(&doc.table),
    }
}

/// Runs the command and writes its output to `--output` or `out`. A
/// failed check is reported after the output is written.
pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    let outcome = run(cli)?;
    let c = common(cli);
    let text = render(&outcome.document, c.format)?;
    match &c.output {
        Some(path) => std::fs::write(path, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    match outcome.failed {
        Some(name) => Err(CliError::ChecksFailed(name)),
        None => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_parse_inclusively() {
        assert_eq!(parse_range("1..15").unwrap(), (1, 15));
        assert_eq!(parse_range("4..=4").unwrap(), (4, 4));
        assert!(parse_range("0..3").is_err());
        assert!(parse_range("5..2").is_err());
        assert!(parse_range("7").is_err());
    }

    #[test]
    fn nodes_are_interior_and_ascending() {
        let nodes = band_nodes(-1.0, 2.0, 9);
        assert!(nodes.windows(2).all(|w| w[0].x < w[1].x));
        assert!(nodes.iter().all(|n| n.x > -1.0 && n.x < 2.0 && n.from_lo > 0.0 && n.from_hi > 0.0));
        // Symmetric about the midpoint.
        assert!((nodes[0].from_lo - nodes[8].from_hi).abs() < 1e-15);
    }

    #[test]
    fn tolerance_sources_in_order() {
        assert_eq!(resolve_tolerance(Some(1e-6), Some("1e-3")).unwrap(), 1e-6);
        assert_eq!(resolve_tolerance(None, Some("1e-3")).unwrap(), 1e-3);
        assert_eq!(resolve_tolerance(None, None).unwrap(), suite::DEFAULT_TOLERANCE);
        assert!(resolve_tolerance(None, Some("abc")).is_err());
        assert!(resolve_tolerance(Some(-1.0), None).is_err());
    }
}
