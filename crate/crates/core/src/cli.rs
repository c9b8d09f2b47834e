//! Command-line front end.
//!
//! Metrics are given as comma-separated scale factors `a₀,a₁,a₂,a₃` (the
//! `aⱼ` of `ds² = Σ aⱼ² (dxʲ)²`, not the metric components `aⱼ²`).
//! Single computations print one JSON record by default; sweeps print CSV.
//! Floating-point output always carries 17 significant digits.

use std::ffi::OsString;
use std::io::Write as _;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{DiagonalMetric, DoubledGeometry, Kappa};
use crate::hopf::{potential_closed, potential_via_conjecture, HopfMetric};
use crate::hypothesis::{run_hypothesis_suite, v_prime, PairFamily};
use crate::matchings::{
    c_coefficient, compare_series, count_n, count_n_inclusion_exclusion, odd_double_factorial,
    pattern_census, PerturbedForm, MAX_SERIES_ORDER,
};
use crate::quadrature::{action_density, kinetic_term, potential_numeric, SphereRule, MIN_LEVEL};

pub const THREADS_ENV: &str = "DOUBLED_SPECTRAL_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "doubled-spectral",
    version,
    about = "Spectral-action potential between the two metrics of a doubled geometry",
    after_help = "Metrics are comma-separated scale factors a0,a1,a2,a3 of ds² = Σ aj² (dx^j)²."
)]
pub struct Cli {
    /// Quadrature level (Gauss nodes in t; 2·level nodes per angle)
    #[arg(long, global = true, default_value_t = 64)]
    pub level: usize,

    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,

    #[arg(long, global = true, default_value_t = 1e-7)]
    pub tol: f64,

    /// Write the result here instead of stdout
    #[arg(long, short, global = true)]
    pub output: Option<String>,

    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Worker threads for quadrature; results do not depend on it
    #[arg(long, global = true, env = THREADS_ENV, default_value_t = 1)]
    pub threads: usize,

    /// Print the resolved run configuration (JSON) to stderr
    #[arg(long, global = true)]
    pub emit_config: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Numeric,
    Closed,
    Both,
    Conjecture,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Generic,
    Hopf,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Interaction potential V̂(g1, g2)
    Potential {
        #[arg(long, value_parser = parse_metric)]
        g1: DiagonalMetric,
        #[arg(long, value_parser = parse_metric)]
        g2: DiagonalMetric,
        #[arg(long, value_enum, default_value_t = Method::Numeric)]
        method: Method,
    },
    /// Kinetic term, potential and action density
    Action {
        #[arg(long, value_parser = parse_metric)]
        g1: DiagonalMetric,
        #[arg(long, value_parser = parse_metric)]
        g2: DiagonalMetric,
        /// |Φ|
        #[arg(long)]
        phi: f64,
        /// γ² = ±1
        #[arg(long, allow_negative_numbers = true, default_value_t = 1)]
        kappa: i8,
        #[arg(long)]
        lambda: f64,
        #[arg(long, allow_negative_numbers = true)]
        c: f64,
    },
    /// Randomized scaling / permutation / exchange checks of the bimetric form
    Hypothesis {
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, value_enum, default_value_t = Family::Generic)]
        family: Family,
    },
    /// Near-diagonal series of ∫ dS / (ξᵀAξ) against quadrature
    Series {
        #[arg(long, default_value_t = 1.0)]
        omega: f64,
        /// Upper triangle of ε in row order: e00,e01,e02,e03,e11,e12,e13,e22,e23,e33
        #[arg(long, allow_hyphen_values = true, value_parser = parse_upper)]
        eps: Upper,
        #[arg(long, default_value_t = 4)]
        order: usize,
    },
    /// Exact moment coefficient, matching counts and trace-pattern census
    Moments {
        #[arg(long)]
        m: usize,
    },
    /// Potential over a grid of g1 parameters (CSV)
    Sweep {
        /// Base g1; swept parameters override its entries
        #[arg(long, value_parser = parse_metric)]
        g1: DiagonalMetric,
        #[arg(long, value_parser = parse_metric)]
        g2: DiagonalMetric,
        /// NAME:MIN:MAX:STEPS with NAME one of axis0..axis3, b (axes 0,1), a (axes 2,3)
        #[arg(long = "axis", value_parser = parse_axis, required = true)]
        axes: Vec<SweepAxis>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Upper(pub [f64; 10]);

#[derive(Debug, Clone, PartialEq)]
pub struct SweepAxis {
    pub name: String,
    pub targets: Vec<usize>,
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl SweepAxis {
    pub fn values(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.min];
        }
        let h = (self.max - self.min) / (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| if i + 1 == self.steps { self.max } else { self.min + h * i as f64 })
            .collect()
    }
}

fn parse_floats<const N: usize>(s: &str) -> std::result::Result<[f64; N], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != N {
        return Err(format!("expected {N} comma-separated numbers, got {}", parts.len()));
    }
    let mut out = [0.0; N];
    for (o, p) in out.iter_mut().zip(parts) {
        *o = p.parse().map_err(|e| format!("`{p}`: {e}"))?;
    }
    Ok(out)
}

pub fn parse_metric(s: &str) -> std::result::Result<DiagonalMetric, String> {
    DiagonalMetric::new(parse_floats::<4>(s)?).map_err(|e| e.to_string())
}

fn parse_upper(s: &str) -> std::result::Result<Upper, String> {
    parse_floats::<10>(s).map(Upper)
}

pub fn parse_axis(s: &str) -> std::result::Result<SweepAxis, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [name, min, max, steps] = parts[..] else {
        return Err(format!("expected NAME:MIN:MAX:STEPS, got `{s}`"));
    };
    let targets = match name {
        "axis0" => vec![0],
        "axis1" => vec![1],
        "axis2" => vec![2],
        "axis3" => vec![3],
        "b" => vec![0, 1],
        "a" => vec![2, 3],
        other => return Err(format!("unknown sweep parameter `{other}`")),
    };
    let min: f64 = min.parse().map_err(|e| format!("min `{min}`: {e}"))?;
    let max: f64 = max.parse().map_err(|e| format!("max `{max}`: {e}"))?;
    let steps: usize = steps.parse().map_err(|e| format!("steps `{steps}`: {e}"))?;
    if !(min.is_finite() && max.is_finite() && min > 0.0 && max >= min) {
        return Err(format!("need 0 < min <= max, got {min}..{max}"));
    }
    if steps == 0 {
        return Err("steps must be at least 1".into());
    }
    Ok(SweepAxis { name: name.to_string(), targets, min, max, steps })
}

/// Resolved run configuration, printed by `--emit-config`.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub subcommand: &'static str,
    pub level: usize,
    pub seed: u64,
    pub tol: f64,
    pub output_path: Option<String>,
    pub format: Format,
    pub threads: usize,
}

impl Cli {
    pub fn run_config(&self) -> RunConfig {
        let (subcommand, default_format) = match &self.command {
            Command::Potential { .. } => ("potential", Format::Json),
            Command::Action { .. } => ("action", Format::Json),
            Command::Hypothesis { .. } => ("hypothesis", Format::Json),
            Command::Series { .. } => ("series", Format::Json),
            Command::Moments { .. } => ("moments", Format::Json),
            Command::Sweep { .. } => ("sweep", Format::Csv),
        };
        RunConfig {
            subcommand,
            level: self.level,
            seed: self.seed,
            tol: self.tol,
            output_path: self.output.clone(),
            format: self.format.unwrap_or(default_format),
            threads: self.threads.max(1),
        }
    }
}

/// serde_json formatter printing every float with 17 significant digits.
struct SigDigits;

impl serde_json::ser::Formatter for SigDigits {
    fn write_f64<W: ?Sized + std::io::Write>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()> {
        write!(writer, "{}", fmt_f64(value))
    }
}

/// `{:.16e}`; non-finite values print as `nan`, `inf`, `-inf`.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SigDigits);
    value.serialize(&mut ser).expect("records serialize infallibly");
    let mut s = String::from_utf8(buf).expect("serde_json emits UTF-8");
    s.push('\n');
    s
}

struct Csv {
    out: String,
}

impl Csv {
    fn new(header: &[&str]) -> Self {
        let mut out = header.join(",");
        out.push('\n');
        Self { out }
    }

    fn row(&mut self, cells: &[String]) {
        self.out.push_str(&cells.join(","));
        self.out.push('\n');
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

#[derive(Debug, Serialize)]
pub struct PotentialRecord {
    pub g1: DiagonalMetric,
    pub g2: DiagonalMetric,
    pub method: Method,
    pub level: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value_numeric: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value_closed: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value_conjecture: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub abs_difference: Option<f64>,
}

pub fn cmd_potential(
    g1: &DiagonalMetric,
    g2: &DiagonalMetric,
    method: Method,
    rule: &SphereRule,
) -> Result<PotentialRecord> {
    let hopf = || -> Result<(HopfMetric, HopfMetric)> {
        Ok((HopfMetric::from_diagonal(g1)?, HopfMetric::from_diagonal(g2)?))
    };
    let mut rec = PotentialRecord {
        g1: *g1,
        g2: *g2,
        method,
        level: rule.level(),
        value_numeric: None,
        value_closed: None,
        value_conjecture: None,
        abs_difference: None,
    };
    match method {
        Method::Numeric => rec.value_numeric = Some(potential_numeric(g1, g2, rule)?),
        Method::Closed => {
            let (h1, h2) = hopf()?;
            rec.value_closed = Some(potential_closed(&h1, &h2));
        }
        Method::Conjecture => {
            let (h1, h2) = hopf()?;
            rec.value_conjecture = Some(potential_via_conjecture(&h1, &h2));
        }
        Method::Both => {
            let (h1, h2) = hopf()?;
            let closed = potential_closed(&h1, &h2);
            let numeric = potential_numeric(g1, g2, rule)?;
            rec.value_closed = Some(closed);
            rec.value_numeric = Some(numeric);
            rec.abs_difference = Some((closed - numeric).abs());
        }
    }
    Ok(rec)
}

#[derive(Debug, Serialize)]
pub struct ActionRecord {
    pub g1: DiagonalMetric,
    pub g2: DiagonalMetric,
    pub phi: f64,
    pub kappa: Kappa,
    pub lambda: f64,
    pub c: f64,
    pub level: usize,
    pub lambda_e_sq: f64,
    pub alpha: f64,
    pub kinetic: f64,
    pub potential: f64,
    pub density: f64,
}

pub fn cmd_action(dg: &DoubledGeometry, rule: &SphereRule) -> Result<ActionRecord> {
    let p = dg.effective_params()?;
    Ok(ActionRecord {
        g1: dg.g1,
        g2: dg.g2,
        phi: dg.phi_abs(),
        kappa: dg.kappa,
        lambda: dg.lambda(),
        c: dg.c(),
        level: rule.level(),
        lambda_e_sq: p.lambda_e_sq,
        alpha: p.alpha,
        kinetic: kinetic_term(&dg.g1, &dg.g2, rule)?,
        potential: potential_numeric(&dg.g1, &dg.g2, rule)?,
        density: action_density(dg, rule)?,
    })
}

#[derive(Debug, Serialize)]
pub struct PatternCount {
    pub cycles: Vec<usize>,
    pub multiplicity: u64,
    pub vanishes_for_traceless: bool,
}

#[derive(Debug, Serialize)]
pub struct MomentsRecord {
    pub m: usize,
    /// `cₘ / π²` as an exact fraction.
    pub c_m_over_pi_sq: String,
    pub c_m: f64,
    pub matchings: u64,
    pub n_enumerated: u64,
    pub n_inclusion_exclusion: i128,
    pub patterns: Vec<PatternCount>,
}

pub fn cmd_moments(m: usize) -> Result<MomentsRecord> {
    if m > MAX_SERIES_ORDER {
        return Err(Error::OrderTooLarge { order: m, max: MAX_SERIES_ORDER });
    }
    let c = c_coefficient(m);
    Ok(MomentsRecord {
        m,
        c_m_over_pi_sq: c.coefficient().to_string(),
        c_m: c.to_f64(),
        matchings: odd_double_factorial(m) as u64,
        n_enumerated: count_n(m)?,
        n_inclusion_exclusion: count_n_inclusion_exclusion(m),
        patterns: pattern_census(m)?
            .into_iter()
            .map(|(p, multiplicity)| PatternCount {
                vanishes_for_traceless: p.vanishes_for_traceless(),
                cycles: p.cycle_lengths().to_vec(),
                multiplicity,
            })
            .collect(),
    })
}

/// Writes the sweep table as CSV.
pub fn cmd_sweep(
    g1_base: &DiagonalMetric,
    g2: &DiagonalMetric,
    axes: &[SweepAxis],
    rule: &SphereRule,
) -> Result<String> {
    if axes.is_empty() || axes.len() > 2 {
        return Err(Error::InvalidGrid(format!("expected 1 or 2 swept parameters, got {}", axes.len())));
    }
    if axes.len() == 2 && axes[0].targets.iter().any(|t| axes[1].targets.contains(t)) {
        return Err(Error::InvalidGrid(format!("`{}` and `{}` overlap", axes[0].name, axes[1].name)));
    }
    let outer = axes[0].values();
    let inner = axes.get(1).map(SweepAxis::values).unwrap_or_else(|| vec![f64::NAN]);

    let mut csv = Csv::new(&["g1_0", "g1_1", "g1_2", "g1_3", "v_numeric", "v_closed", "v_prime"]);
    for &u in &outer {
        for &w in &inner {
            let mut a = g1_base.scale_factors();
            for &t in &axes[0].targets {
                a[t] = u;
            }
            if let Some(ax) = axes.get(1) {
                for &t in &ax.targets {
                    a[t] = w;
                }
            }
            let g1 = DiagonalMetric::new(a)?;
            let numeric = potential_numeric(&g1, g2, rule)?;
            let closed = match (HopfMetric::from_diagonal(&g1), HopfMetric::from_diagonal(g2)) {
                (Ok(h1), Ok(h2)) => Some(potential_closed(&h1, &h2)),
                _ => None,
            };
            let vp = v_prime(&g1, g2, rule)?;
            let mut cells: Vec<String> = a.iter().map(|&v| fmt_f64(v)).collect();
            cells.extend([fmt_f64(numeric), opt(closed), fmt_f64(vp)]);
            csv.row(&cells);
        }
    }
    Ok(csv.out)
}

fn metric_cells(g: &DiagonalMetric) -> Vec<String> {
    g.scale_factors().iter().map(|&v| fmt_f64(v)).collect()
}

/// Runs a parsed command line and returns the text it would print.
pub fn execute(cli: &Cli) -> Result<String> {
    let config = cli.run_config();
    if cli.level < MIN_LEVEL {
        return Err(Error::LevelTooLow(cli.level));
    }
    if !(cli.tol.is_finite() && cli.tol >= 0.0) {
        return Err(Error::InvalidParameter { name: "tol", reason: format!("must be nonnegative, got {}", cli.tol) });
    }
    let rule = || SphereRule::new(cli.level)?.with_threads(config.threads);
    let format = config.format;

    let text = match &cli.command {
        Command::Potential { g1, g2, method } => {
            let rec = cmd_potential(g1, g2, *method, &rule()?)?;
            match format {
                Format::Json => to_json(&rec),
                Format::Csv => {
                    let mut csv = Csv::new(&[
                        "g1_0", "g1_1", "g1_2", "g1_3", "g2_0", "g2_1", "g2_2", "g2_3", "method", "level",
                        "value_numeric", "value_closed", "value_conjecture", "abs_difference",
                    ]);
                    let mut cells = metric_cells(&rec.g1);
                    cells.extend(metric_cells(&rec.g2));
                    cells.push(format!("{:?}", rec.method).to_lowercase());
                    cells.push(rec.level.to_string());
                    cells.extend([
                        opt(rec.value_numeric),
                        opt(rec.value_closed),
                        opt(rec.value_conjecture),
                        opt(rec.abs_difference),
                    ]);
                    csv.row(&cells);
                    csv.out
                }
            }
        }
        Command::Action { g1, g2, phi, kappa, lambda, c } => {
            let dg = DoubledGeometry::new(*g1, *g2, *phi, Kappa::try_from(*kappa)?, *lambda, *c)?;
            let rec = cmd_action(&dg, &rule()?)?;
            match format {
                Format::Json => to_json(&rec),
                Format::Csv => {
                    let mut csv = Csv::new(&[
                        "phi", "kappa", "lambda", "c", "level", "lambda_e_sq", "alpha", "kinetic", "potential",
                        "density",
                    ]);
                    csv.row(&[
                        fmt_f64(rec.phi),
                        i8::from(rec.kappa).to_string(),
                        fmt_f64(rec.lambda),
                        fmt_f64(rec.c),
                        rec.level.to_string(),
                        fmt_f64(rec.lambda_e_sq),
                        fmt_f64(rec.alpha),
                        fmt_f64(rec.kinetic),
                        fmt_f64(rec.potential),
                        fmt_f64(rec.density),
                    ]);
                    csv.out
                }
            }
        }
        Command::Hypothesis { trials, family } => {
            let family = match family {
                Family::Generic => PairFamily::Generic,
                Family::Hopf => PairFamily::Hopf,
            };
            let report = run_hypothesis_suite(*trials, cli.seed, family, &rule()?, cli.tol)?;
            match format {
                Format::Json => to_json(&report),
                Format::Csv => {
                    let mut csv = Csv::new(&[
                        "trials", "seed", "level", "tol", "failures", "max_violation", "max_scaling",
                        "max_permutation", "max_exchange", "max_closed_form",
                    ]);
                    csv.row(&[
                        report.trials.to_string(),
                        report.seed.to_string(),
                        report.level.to_string(),
                        fmt_f64(report.tol),
                        report.failures.len().to_string(),
                        fmt_f64(report.max_violation),
                        fmt_f64(report.max_scaling),
                        fmt_f64(report.max_permutation),
                        fmt_f64(report.max_exchange),
                        opt(report.max_closed_form),
                    ]);
                    csv.out
                }
            }
        }
        Command::Series { omega, eps, order } => {
            let pf = PerturbedForm::from_upper(*omega, eps.0)?;
            let report = compare_series(&pf, *order, &rule()?)?;
            match format {
                Format::Json => to_json(&report),
                Format::Csv => {
                    let mut csv = Csv::new(&[
                        "order", "candidate_term", "exact_term", "candidate_partial", "exact_partial", "ratio",
                        "value_quadrature",
                    ]);
                    for r in &report.rows {
                        csv.row(&[
                            r.order.to_string(),
                            fmt_f64(r.candidate_term),
                            fmt_f64(r.exact_term),
                            fmt_f64(r.candidate_partial),
                            fmt_f64(r.exact_partial),
                            opt(r.ratio),
                            fmt_f64(report.value_quadrature),
                        ]);
                    }
                    csv.out
                }
            }
        }
        Command::Moments { m } => {
            let rec = cmd_moments(*m)?;
            match format {
                Format::Json => to_json(&rec),
                Format::Csv => {
                    let mut csv = Csv::new(&[
                        "m", "c_m_over_pi_sq", "n_enumerated", "n_inclusion_exclusion", "pattern", "multiplicity",
                    ]);
                    for p in &rec.patterns {
                        let cycles: Vec<String> = p.cycles.iter().map(|k| k.to_string()).collect();
                        csv.row(&[
                            rec.m.to_string(),
                            rec.c_m_over_pi_sq.clone(),
                            rec.n_enumerated.to_string(),
                            rec.n_inclusion_exclusion.to_string(),
                            cycles.join(" "),
                            p.multiplicity.to_string(),
                        ]);
                    }
                    csv.out
                }
            }
        }
        Command::Sweep { g1, g2, axes } => cmd_sweep(g1, g2, axes, &rule()?)?,
    };
    Ok(text)
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::InvalidMetric(_) => "invalid_metric",
        Error::InvalidParameter { .. } => "invalid_parameter",
        Error::LevelTooLow(_) => "level_too_low",
        Error::NonFiniteIntegrand { .. } => "non_finite_integrand",
        Error::InvalidPerturbation(_) => "invalid_perturbation",
        Error::OrderTooLarge { .. } => "order_too_large",
        Error::NotHopfShaped(_) => "not_hopf_shaped",
        Error::InvalidGrid(_) => "invalid_grid",
        Error::Io(_) => "io",
    }
}

/// Structured error line for stderr.
pub fn error_json(e: &Error) -> String {
    #[derive(Serialize)]
    struct ErrorRecord<'a> {
        error: &'a str,
        message: String,
    }
    to_json(&ErrorRecord { error: error_kind(e), message: e.to_string() })
}

/// Entry point used by the binary; returns the process exit code.
pub fn main_entry<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    if cli.emit_config {
        eprint!("{}", to_json(&cli.run_config()));
    }
    let result = execute(&cli).and_then(|text| match &cli.output {
        Some(path) => std::fs::write(path, &text).map_err(Error::from),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(Error::from)
        }
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprint!("{}", error_json(&e));
            1
        }
    }
}
