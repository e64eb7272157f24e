//! Command-line front end: evaluation, classification, minimum finding,
//! verification sweeps, dominance reports and kernel profiling.
//!
//! [`run`] is the whole program; `main` only forwards the process arguments
//! and exits with the status it returns.

mod verify;

use std::f64::consts::FRAC_2_PI;
use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use shafer_core::catalog::{best_enclosure, classify_regime, eval_bound, BoundId, Regime, ShaferParam};
use shafer_core::family::{find_minimum, SolverConfig};
use shafer_core::kernel::{error_profile, KernelSpec, DEFAULT_CROSSOVER};
use shafer_core::oracle::{dominance_report, DominanceConfig, DominanceReport, GridSpec, Precision, Spacing};
use shafer_core::ErrorProfile;

pub use verify::{Status, Suite, VerifyEntry, VerifyReport};

/// Exit status for a successful run.
pub const EXIT_OK: i32 = 0;
/// Exit status when a verification sweep finds a violation of a valid bound.
pub const EXIT_VERIFY_FAILED: i32 = 1;
/// Exit status for usage and numerical errors.
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "shafer", version, about = "Certified arctan bounds from the Shafer family")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Report format; inferred from the --output extension when omitted, text otherwise.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Write the report to this file instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    /// Decimal digits of the reference oracle.
    #[arg(long, global = true, env = "SHAFER_PRECISION_DIGITS", default_value_t = 60)]
    pub precision_digits: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one catalogued bound at x.
    #[command(allow_negative_numbers = true)]
    Eval {
        #[arg(long)]
        bound: BoundId,
        #[arg(long, value_parser = parse_param)]
        a: Option<f64>,
        #[arg(long)]
        x: f64,
    },
    /// Monotonicity regime of f_a.
    #[command(allow_negative_numbers = true)]
    Classify {
        #[arg(long, value_parser = parse_param)]
        a: f64,
    },
    /// Tightest enclosure of atan(x) over the given parameters.
    #[command(allow_negative_numbers = true)]
    Enclose {
        /// Family parameter; repeat to intersect several enclosures.
        #[arg(long = "a", value_parser = parse_param, required = true)]
        params: Vec<f64>,
        #[arg(long)]
        x: f64,
    },
    /// Interior minimum of f_a for 1/2 < a < 2/pi.
    #[command(allow_negative_numbers = true)]
    FindMin {
        #[arg(long, value_parser = parse_param)]
        a: f64,
        #[arg(long, default_value_t = 1e-12)]
        tolerance: f64,
        #[arg(long, default_value_t = 200)]
        max_iterations: usize,
    },
    /// Sweep a suite of bounds against the reference oracle.
    Verify {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Which of two same-side bounds is tighter, and where.
    #[command(allow_negative_numbers = true)]
    Dominance {
        #[arg(long)]
        bound_a: BoundId,
        #[arg(long, value_parser = parse_param)]
        a_a: Option<f64>,
        #[arg(long)]
        bound_b: BoundId,
        #[arg(long, value_parser = parse_param)]
        a_b: Option<f64>,
        /// Relative gap below which the bounds count as equal; 0 compares exactly.
        #[arg(long, default_value_t = 1e-15)]
        rel_tol: f64,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Certified versus actual error of the approximation kernel.
    Profile {
        #[arg(long, value_parser = parse_param, default_value = "0.5")]
        a_low: f64,
        #[arg(long, value_parser = parse_param, default_value = "2/pi")]
        a_high: f64,
        #[arg(long, default_value_t = DEFAULT_CROSSOVER)]
        crossover: f64,
        #[command(flatten)]
        grid: GridArgs,
    },
}

#[derive(Debug, Clone, Copy, Args)]
pub struct GridArgs {
    #[arg(long, default_value_t = 1e-8)]
    pub x_min: f64,
    #[arg(long, default_value_t = 1e8)]
    pub x_max: f64,
    #[arg(long, default_value_t = 10_000)]
    pub grid_points: usize,
    #[arg(long, value_enum, default_value_t = SpacingArg::Log)]
    pub spacing: SpacingArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SpacingArg {
    Log,
    Linear,
}

impl GridArgs {
    fn grid(&self) -> shafer_core::Result<GridSpec> {
        let spacing = match self.spacing {
            SpacingArg::Log => Spacing::Log,
            SpacingArg::Linear => Spacing::Linear,
        };
        GridSpec::new(self.x_min, self.x_max, self.grid_points, spacing)
    }
}

/// Accepts a decimal number or the literal `2/pi`, which is awkward to type
/// to full precision.
fn parse_param(s: &str) -> Result<f64, String> {
    if s.trim().eq_ignore_ascii_case("2/pi") {
        return Ok(FRAC_2_PI);
    }
    s.trim().parse::<f64>().map_err(|e| format!("'{s}' is not a number: {e}"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub bound: BoundId,
    pub a: Option<f64>,
    pub x: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifyReport {
    pub a: f64,
    pub regime: Regime,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncloseReport {
    pub x: f64,
    pub params: Vec<f64>,
    pub lower: f64,
    pub upper: f64,
    pub midpoint: f64,
    pub half_width: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FindMinReport {
    pub a: f64,
    pub x0: f64,
    pub value: f64,
    pub u: f64,
    pub residual: f64,
    pub iterations: usize,
}

/// A report renderable in every output format.
trait Report: Serialize {
    fn text(&self) -> String;
    fn csv(&self, out: &mut dyn Write) -> anyhow::Result<()>;
}

// Single-record reports share one CSV shape: a header and one row.
fn csv_record<T: Serialize>(record: &T, out: &mut dyn Write) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.serialize(record)?;
    w.flush()?;
    Ok(())
}

fn opt(a: Option<f64>) -> String {
    a.map_or_else(|| "-".to_string(), |v| v.to_string())
}

impl Report for EvalReport {
    fn text(&self) -> String {
        match self.a {
            Some(a) => format!("{}(a={a}, x={}) = {}\n", self.bound, self.x, self.value),
            None => format!("{}(x={}) = {}\n", self.bound, self.x, self.value),
        }
    }
    fn csv(&self, out: &mut dyn Write) -> anyhow::Result<()> {
        csv_record(self, out)
    }
}

impl Report for ClassifyReport {
    fn text(&self) -> String {
        format!("{}\n", self.regime)
    }
    fn csv(&self, out: &mut dyn Write) -> anyhow::Result<()> {
        csv_record(self, out)
    }
}

impl Report for EncloseReport {
    fn text(&self) -> String {
        format!(
            "{} <= atan({}) <= {}\nmidpoint {}  half-width {}\n",
            self.lower, self.x, self.upper, self.midpoint, self.half_width
        )
    }
    fn csv(&self, out: &mut dyn Write) -> anyhow::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["x", "lower", "upper", "midpoint", "half_width"])?;
        w.write_record(
            [self.x, self.lower, self.upper, self.midpoint, self.half_width].map(|v| v.to_string()),
        )?;
        w.flush()?;
        Ok(())
    }
}

impl Report for FindMinReport {
    fn text(&self) -> String {
        format!(
            "a = {}\nx0 = {}\nf(x0) = {}\nu = {}\nresidual = {:e}\niterations = {}\n",
            self.a, self.x0, self.value, self.u, self.residual, self.iterations
        )
    }
    fn csv(&self, out: &mut dyn Write) -> anyhow::Result<()> {
        csv_record(self, out)
    }
}

impl Report for VerifyReport {
    fn text(&self) -> String {
        let mut s = format!(
            "{:<20} {:>20} {:<6} {:<22} {:>10} {:>12}\n",
            "bound", "a", "side", "status", "violations", "min margin"
        );
        for e in &self.entries {
            let _ = writeln!(
                s,
                "{:<20} {:>20} {:<6} {:<22} {:>10} {:>12.3e}",
                e.bound.to_string(),
                opt(e.a),
                e.side,
                e.status.as_str(),
                e.violations,
                e.min_margin
            );
        }
        let failures = self.entries.iter().filter(|e| e.status.is_failure()).count();
        let _ = writeln!(
            s,
            "{} sweeps, {} failed ({} points on [{:e}, {:e}], {} digits)",
            self.entries.len(),
            failures,
            self.grid.points,
            self.grid.x_min,
            self.grid.x_max,
            self.precision_digits
        );
        s
    }
    fn csv(&self, out: &mut dyn Write) -> anyhow::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["bound", "a", "side", "status", "violations", "min_margin", "min_margin_x"])?;
        for e in &self.entries {
            w.write_record([
                e.bound.to_string(),
                e.a.map(|v| v.to_string()).unwrap_or_default(),
                e.side.clone(),
                e.status.as_str().to_string(),
                e.violations.to_string(),
                e.min_margin.to_string(),
                e.min_margin_x.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

impl Report for DominanceReport {
    fn text(&self) -> String {
        let mut s = format!(
            "A = {} (a = {})\nB = {} (a = {})\n",
            self.id_a,
            opt(self.a_a.map(|p| p.0)),
            self.id_b,
            opt(self.a_b.map(|p| p.0))
        );
        for r in &self.regions {
            let _ = writeln!(s, "{:?} tighter on [{:e}, {:e}] ({} points)", r.tighter, r.x_start, r.x_end, r.points);
        }
        if self.crossovers.is_empty() {
            s.push_str("no crossover\n");
        }
        for x in &self.crossovers {
            let _ = writeln!(s, "crossover at x = {x}");
        }
        s
    }
    fn csv(&self, out: &mut dyn Write) -> anyhow::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["tighter", "x_start", "x_end", "points"])?;
        for r in &self.regions {
            w.write_record([format!("{:?}", r.tighter), r.x_start.to_string(), r.x_end.to_string(), r.points.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

impl Report for ErrorProfile {
    fn text(&self) -> String {
        format!(
            "kernel a_low = {}, a_high = {}, crossover = {:e}\n\
             {} points on [{:e}, {:e}]\n\
             max certified error {:e}\nmax actual error    {:e}\nuncertified points  {}\n",
            self.spec.a_low,
            self.spec.a_high,
            self.spec.crossover,
            self.grid.points,
            self.grid.x_min,
            self.grid.x_max,
            self.max_certified,
            self.max_actual,
            self.uncertified
        )
    }
    fn csv(&self, out: &mut dyn Write) -> anyhow::Result<()> {
        self.write_csv(out)?;
        Ok(())
    }
}

fn resolve_format(explicit: Option<Format>, output: Option<&Path>) -> Format {
    explicit
        .or_else(|| match output?.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "json" => Some(Format::Json),
            "csv" => Some(Format::Csv),
            _ => None,
        })
        .unwrap_or(Format::Text)
}

fn emit<R: Report>(report: &R, cli: &Cli, out: &mut dyn Write) -> anyhow::Result<()> {
    let mut file;
    let sink: &mut dyn Write = match &cli.output {
        Some(path) => {
            file = io::BufWriter::new(
                File::create(path).with_context(|| format!("cannot create {}", path.display()))?,
            );
            &mut file
        }
        None => out,
    };
    match resolve_format(cli.format, cli.output.as_deref()) {
        Format::Text => sink.write_all(report.text().as_bytes())?,
        Format::Json => {
            serde_json::to_writer_pretty(&mut *sink, report)?;
            sink.write_all(b"\n")?;
        }
        Format::Csv => report.csv(sink)?,
    }
    sink.flush()?;
    Ok(())
}

fn param(a: Option<f64>) -> Option<ShaferParam> {
    a.map(ShaferParam)
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> anyhow::Result<i32> {
    let precision = || Precision::new(cli.precision_digits);
    match &cli.command {
        Command::Eval { bound, a, x } => {
            let value = eval_bound(*bound, param(*a), *x)?;
            emit(&EvalReport { bound: *bound, a: *a, x: *x, value }, cli, out)?;
        }
        Command::Classify { a } => {
            let regime = classify_regime(ShaferParam::new(*a)?);
            emit(&ClassifyReport { a: *a, regime }, cli, out)?;
        }
        Command::Enclose { params, x } => {
            let ps: Vec<ShaferParam> = params.iter().map(|&a| ShaferParam::new(a)).collect::<Result<_, _>>()?;
            let e = best_enclosure(*x, &ps)?;
            let report = EncloseReport {
                x: *x,
                params: params.clone(),
                lower: e.lower,
                upper: e.upper,
                midpoint: e.midpoint(),
                half_width: e.half_width,
            };
            emit(&report, cli, out)?;
        }
        Command::FindMin { a, tolerance, max_iterations } => {
            let cfg = SolverConfig::new(*tolerance, *max_iterations, SolverConfig::default().bracket_growth)?;
            let r = find_minimum(ShaferParam::new(*a)?, &cfg)?;
            let report = FindMinReport {
                a: *a,
                x0: r.x0,
                value: r.value,
                u: r.u,
                residual: r.residual,
                iterations: r.iterations,
            };
            emit(&report, cli, out)?;
        }
        Command::Verify { suite, grid } => {
            let report = verify::run_suite(*suite, grid.grid()?, precision()?)?;
            emit(&report, cli, out)?;
            if !report.passed {
                return Ok(EXIT_VERIFY_FAILED);
            }
        }
        Command::Dominance { bound_a, a_a, bound_b, a_b, rel_tol, grid } => {
            let cfg = DominanceConfig { rel_tol: *rel_tol, precision: precision()? };
            let report = dominance_report(*bound_a, param(*a_a), *bound_b, param(*a_b), &grid.grid()?, &cfg)?;
            emit(&report, cli, out)?;
        }
        Command::Profile { a_low, a_high, crossover, grid } => {
            let spec = KernelSpec::new(*a_low, *a_high, *crossover)?;
            let report = error_profile(&spec, &grid.grid()?, precision()?)?;
            emit(&report, cli, out)?;
        }
    }
    Ok(EXIT_OK)
}

/// Parses `args` (including the program name) and runs the command.
///
/// Reports go to `out` unless `--output` is given; diagnostics go to `err`.
/// Returns the process exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version are not errors
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(rendered.as_bytes()) } else { out.write_all(rendered.as_bytes()) };
            return code;
        }
    };
    match dispatch(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            // core errors display as "<ErrorName>: <detail>"
            let _ = writeln!(err, "error: {e:#}");
            EXIT_ERROR
        }
    }
}
