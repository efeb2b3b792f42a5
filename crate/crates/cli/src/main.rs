//! `rw-entangle`: entanglement of field modes created by a tanh expansion.

mod config;
mod report;
mod sweep;

use std::ffi::OsString;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{CommandFactory, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use rw_entangle::estimation::{epsilon_lower_bound, estimate_rho, max_entanglement, optimal_k};
use rw_entangle::modeevolution::{
    agrees, comparison_error, oracle_pair, GRID_EPSILON, GRID_K, GRID_MASS, GRID_RHO,
};
use rw_entangle::{gamma_sq, sample, spectrum, Error, ExpansionParams, ModeParams, Statistics};

use report::{Fields, Report};
use sweep::{Axis, Point, Spacing, SweepFormat, SweepSpec};

pub const TOOL: &str = "rw-entangle";
const THREADS_ENV: &str = "RW_ENTANGLE_THREADS";

#[derive(Debug)]
pub enum CliError {
    /// Bad flags or parameter values: exit code 2.
    Usage(String),
    /// Domain, estimation, oracle or I/O failure: exit code 1.
    Failure(String),
}

/// Diagnostic naming the flag behind a parameter error.
pub fn flag_error(e: &Error) -> String {
    match e {
        Error::InvalidParameter {
            name,
            value,
            reason,
        } => {
            let flag = match *name {
                "k_observed" => "k-observed",
                "rho_lo" | "rho_hi" => "bracket",
                other => other,
            };
            format!("invalid value for --{flag}: {value} ({reason})")
        }
        other => other.to_string(),
    }
}

fn classify(e: Error) -> CliError {
    match e {
        Error::InvalidParameter { .. } => CliError::Usage(flag_error(&e)),
        other => CliError::Failure(format!("{}: {other}", other.kind())),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StatsChoice {
    Fermion,
    Boson,
    Both,
}

impl StatsChoice {
    pub fn fermion(self) -> bool {
        self != StatsChoice::Boson
    }

    pub fn boson(self) -> bool {
        self != StatsChoice::Fermion
    }

    fn list(self) -> Vec<Statistics> {
        let mut v = Vec::new();
        if self.fermion() {
            v.push(Statistics::Fermion);
        }
        if self.boson() {
            v.push(Statistics::Boson);
        }
        v
    }

    fn name(self) -> &'static str {
        match self {
            StatsChoice::Fermion => "fermion",
            StatsChoice::Boson => "boson",
            StatsChoice::Both => "both",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Kv,
    Json,
}

impl Format {
    fn name(self) -> &'static str {
        match self {
            Format::Kv => "kv",
            Format::Json => "json",
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "rw-entangle", version, about = "Entanglement of field modes created by cosmological expansion")]
struct Cli {
    /// key=value file supplying defaults for any flag (flag names as keys)
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Omit timestamps so identical flags give byte-identical output
    #[arg(long, global = true)]
    reproducible: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Debug, Clone)]
struct PointArgs {
    /// Field mass m
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    mass: f64,
    /// Mode momentum |k|
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    k: f64,
    /// Expansion rapidity rho
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    rho: f64,
    /// Volume expansion parameter epsilon
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    epsilon: f64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Ratio |beta/alpha|^2 and entanglement entropy at one point
    Entropy {
        #[command(flatten)]
        point: PointArgs,
        #[arg(long, value_enum, default_value_t = StatsChoice::Both)]
        stats: StatsChoice,
        #[arg(long, value_enum, default_value_t = Format::Kv)]
        format: Format,
    },
    /// Evaluate along one parameter axis
    Sweep {
        #[arg(long, value_enum)]
        axis: Axis,
        #[arg(long, allow_negative_numbers = true)]
        lo: f64,
        #[arg(long, allow_negative_numbers = true)]
        hi: f64,
        #[arg(long)]
        count: usize,
        #[arg(long, value_enum, default_value_t = Spacing::Log)]
        spacing: Spacing,
        #[command(flatten)]
        point: PointArgs,
        #[arg(long, value_enum, default_value_t = StatsChoice::Both)]
        stats: StatsChoice,
        #[arg(long, value_enum, default_value_t = SweepFormat::Csv)]
        format: SweepFormat,
        /// Output file; a provenance file `<out>.meta.json` is written next to it.
        /// Without it the table goes to standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Momentum maximizing the fermionic entropy
    OptimalK {
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        mass: f64,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        rho: f64,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        epsilon: f64,
        #[arg(long, value_enum, default_value_t = Format::Kv)]
        format: Format,
    },
    /// Largest fermionic entropy over mass and momentum
    MaxEntanglement {
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        rho: f64,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        epsilon: f64,
        #[arg(long, value_enum, default_value_t = Format::Kv)]
        format: Format,
    },
    /// Infer rho from the observed entanglement-maximizing momentum
    EstimateRho {
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        mass: f64,
        #[arg(long, allow_negative_numbers = true)]
        k_observed: f64,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        epsilon_ref: f64,
        /// Search interval for rho
        #[arg(long, num_args = 2, value_names = ["LO", "HI"], default_values_t = [1.0, 2000.0], allow_negative_numbers = true)]
        bracket: Vec<f64>,
        #[arg(long, value_enum, default_value_t = Format::Kv)]
        format: Format,
    },
    /// Lower bound on epsilon from the entropy of the optimal mode
    EpsilonBound {
        #[arg(long, allow_negative_numbers = true)]
        entropy: f64,
        #[arg(long, value_enum, default_value_t = Format::Kv)]
        format: Format,
    },
    /// Compare closed-form ratios with direct integration of the mode equations
    OracleCheck {
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = StatsChoice::Both)]
        stats: StatsChoice,
        #[arg(long, value_delimiter = ',', default_values_t = GRID_EPSILON)]
        epsilon_values: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_values_t = GRID_RHO)]
        rho_values: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_values_t = GRID_MASS)]
        mass_values: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_values_t = GRID_K)]
        k_values: Vec<f64>,
        #[arg(long, value_enum, default_value_t = Format::Kv)]
        format: Format,
    },
}

fn point_config(c: &mut Fields, p: &PointArgs) {
    c.push("mass", p.mass);
    c.push("k", p.k);
    c.push("rho", p.rho);
    c.push("epsilon", p.epsilon);
}

fn expansion(epsilon: f64, rho: f64) -> Result<ExpansionParams, CliError> {
    ExpansionParams::new(epsilon, rho).map_err(classify)
}

fn emit(report: &Report, format: Format) {
    match format {
        Format::Kv => print!("{}", report.to_kv()),
        Format::Json => print!("{}", report.to_json()),
    }
}

fn list(values: &[f64]) -> String {
    values.iter().map(|v| report::num(*v)).collect::<Vec<_>>().join(",")
}

fn run(cli: Cli) -> Result<(), CliError> {
    let reproducible = cli.reproducible;
    match cli.command {
        Command::Entropy {
            point,
            stats,
            format,
        } => {
            let mut c = Fields::default();
            point_config(&mut c, &point);
            c.push("stats", stats.name());
            c.push("format", format.name());
            let p = expansion(point.epsilon, point.rho)?;
            let mp = ModeParams::new(point.mass, point.k).map_err(classify)?;
            let mut r = Report::new("entropy", c, reproducible);
            for s in stats.list() {
                let e = sample(&p, &mp, s).map_err(classify)?;
                r.result
                    .push(&format!("log_gamma_sq_{}", s.name()), e.gamma_sq.log_value());
                r.result
                    .push(&format!("entropy_{}_bits", s.name()), e.entropy_bits);
            }
            emit(&r, format);
        }
        Command::Sweep {
            axis,
            lo,
            hi,
            count,
            spacing,
            point,
            stats,
            format,
            out,
        } => {
            let spec = SweepSpec {
                axis,
                lo,
                hi,
                count,
                spacing,
                fixed: Point {
                    k: point.k,
                    mass: point.mass,
                    rho: point.rho,
                    epsilon: point.epsilon,
                },
                stats,
            };
            spec.validate()?;
            let mut c = Fields::default();
            c.push("axis", axis.to_possible_value().unwrap().get_name().to_string());
            c.push("lo", lo);
            c.push("hi", hi);
            c.push("count", count);
            c.push("spacing", spacing.to_possible_value().unwrap().get_name().to_string());
            point_config(&mut c, &point);
            c.push("stats", stats.name());
            c.push("format", format.to_possible_value().unwrap().get_name().to_string());
            let rows = sweep::run(&spec)?;
            let body = sweep::render(&rows, format)?;
            match out {
                Some(path) => {
                    c.push("out", path.display().to_string());
                    sweep::write_files(&path, &body, &c, rows.len(), reproducible)?;
                }
                None => print!("{body}"),
            }
        }
        Command::OptimalK {
            mass,
            rho,
            epsilon,
            format,
        } => {
            let mut c = Fields::default();
            c.push("mass", mass);
            c.push("rho", rho);
            c.push("epsilon", epsilon);
            c.push("format", format.name());
            let p = expansion(epsilon, rho)?;
            let m = optimal_k(&p, mass).map_err(classify)?;
            if m.multimodal {
                eprintln!("warning: several peaks within 1e-9 bits; reporting the smallest k");
            }
            let mut r = Report::new("optimal-k", c, reproducible);
            r.result.push("k_star", m.k_star);
            r.result.push("entropy_at_peak", m.entropy_at_peak);
            r.result.push("log_gamma_sq_at_peak", m.log_gamma_sq_at_peak);
            r.result.push("scan_lo", m.scan_range.0);
            r.result.push("scan_hi", m.scan_range.1);
            r.result.push("multimodal", m.multimodal);
            emit(&r, format);
        }
        Command::MaxEntanglement {
            rho,
            epsilon,
            format,
        } => {
            let mut c = Fields::default();
            c.push("rho", rho);
            c.push("epsilon", epsilon);
            c.push("format", format.name());
            let m = max_entanglement(&expansion(epsilon, rho)?).map_err(classify)?;
            let mut r = Report::new("max-entanglement", c, reproducible);
            r.result.push("mass", m.mass);
            r.result.push("k_star", m.k_star);
            r.result.push("s_max", m.s_max);
            r.result.push("at_mass_floor", m.at_mass_floor);
            emit(&r, format);
        }
        Command::EstimateRho {
            mass,
            k_observed,
            epsilon_ref,
            bracket,
            format,
        } => {
            let mut c = Fields::default();
            c.push("mass", mass);
            c.push("k-observed", k_observed);
            c.push("epsilon-ref", epsilon_ref);
            c.push("bracket", list(&bracket));
            c.push("format", format.name());
            if !(epsilon_ref.is_finite() && epsilon_ref > 0.0) {
                return Err(CliError::Usage(format!(
                    "invalid value for --epsilon-ref: {epsilon_ref} (must be finite and > 0)"
                )));
            }
            let e = estimate_rho(mass, k_observed, epsilon_ref, (bracket[0], bracket[1]))
                .map_err(classify)?;
            let mut r = Report::new("estimate-rho", c, reproducible);
            estimation_fields(&mut r.result, &e);
            emit(&r, format);
        }
        Command::EpsilonBound { entropy, format } => {
            let mut c = Fields::default();
            c.push("entropy", entropy);
            c.push("format", format.name());
            let e = epsilon_lower_bound(entropy).map_err(classify)?;
            let mut r = Report::new("epsilon-bound", c, reproducible);
            estimation_fields(&mut r.result, &e);
            emit(&r, format);
        }
        Command::OracleCheck {
            tol,
            stats,
            epsilon_values,
            rho_values,
            mass_values,
            k_values,
            format,
        } => {
            if !(tol.is_finite() && tol > 0.0) {
                return Err(CliError::Usage(format!(
                    "invalid value for --tol: {tol} (must be finite and > 0)"
                )));
            }
            let mut c = Fields::default();
            c.push("tol", tol);
            c.push("stats", stats.name());
            c.push("epsilon-values", list(&epsilon_values));
            c.push("rho-values", list(&rho_values));
            c.push("mass-values", list(&mass_values));
            c.push("k-values", list(&k_values));
            c.push("format", format.name());
            let mut points = Vec::new();
            for &e in &epsilon_values {
                for &r in &rho_values {
                    for &m in &mass_values {
                        for &k in &k_values {
                            let p = expansion(e, r)?;
                            let mp = ModeParams::new(m, k).map_err(classify)?;
                            for s in stats.list() {
                                points.push((p, mp, s));
                            }
                        }
                    }
                }
            }
            let rows: Vec<(Fields, bool, f64)> = points
                .par_iter()
                .map(|(p, mp, s)| oracle_row(p, mp, *s, tol))
                .collect();
            let failures = rows.iter().filter(|r| !r.1).count();
            let max_error = rows.iter().map(|r| r.2).fold(0.0, f64::max);
            let mut r = Report::new("oracle-check", c, reproducible);
            r.rows = rows.into_iter().map(|r| r.0).collect();
            r.result.push("points", r.rows.len());
            r.result.push("failures", failures);
            r.result.push("max_error", max_error);
            r.result.push("all_pass", failures == 0);
            emit(&r, format);
            if failures > 0 {
                return Err(CliError::Failure(format!(
                    "oracle-mismatch: {failures} of {} comparisons outside tolerance",
                    r.rows.len()
                )));
            }
        }
    }
    Ok(())
}

fn estimation_fields(f: &mut Fields, e: &rw_entangle::estimation::EstimationResult) {
    f.push("estimate", e.estimate);
    f.push("bracket_lo", e.bracket.0);
    f.push("bracket_hi", e.bracket.1);
    f.push("residual", e.residual);
    f.push("iterations", e.iterations);
}

fn oracle_row(p: &ExpansionParams, mp: &ModeParams, s: Statistics, tol: f64) -> (Fields, bool, f64) {
    let mut f = Fields::default();
    f.push("epsilon", p.epsilon());
    f.push("rho", p.rho());
    f.push("mass", mp.mass());
    f.push("k", mp.k());
    f.push("statistics", s.name());
    let closed = gamma_sq(p, mp, s).value();
    f.push("closed_form", closed);
    match oracle_pair(p, mp, s) {
        Ok(pair) => {
            let oracle = match s {
                Statistics::Boson => pair.ratio_sq(),
                Statistics::Fermion => {
                    let sp = spectrum(p, mp);
                    let chi = sp.k / (sp.omega_out + sp.mu_out);
                    pair.ratio_sq() * chi * chi
                }
            };
            let err = comparison_error(oracle, closed);
            let mut pass = agrees(oracle, closed, tol);
            f.push("oracle", oracle);
            f.push("error", err);
            if s == Statistics::Boson {
                let w = pair.wronskian();
                pass &= (w - 1.0).abs() < 1e-6;
                f.push("wronskian", w);
            }
            f.push("pass", pass);
            (f, pass, err)
        }
        Err(e) => {
            f.push("oracle", f64::NAN);
            f.push("error", format!("{}: {e}", e.kind()));
            f.push("pass", false);
            (f, false, f64::INFINITY)
        }
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got `{v}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Failure(format!("thread pool: {e}")))
}

fn parse() -> Result<Cli, CliError> {
    let argv: Vec<OsString> = std::env::args_os().collect();
    let cli = Cli::try_parse_from(&argv).unwrap_or_else(|e| e.exit());
    let Some(path) = cli.config.clone() else {
        return Ok(cli);
    };
    let entries = config::load(&path)?;
    let mut command = Cli::command();
    let matches = command
        .clone()
        .try_get_matches_from(&argv)
        .unwrap_or_else(|e| e.exit());
    let merged = config::merge(argv, &mut command, &matches, &entries)?;
    Ok(Cli::try_parse_from(&merged).unwrap_or_else(|e| e.exit()))
}

fn main() -> ExitCode {
    let result = configure_threads().and_then(|_| parse()).and_then(run);
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
