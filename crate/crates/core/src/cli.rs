//! Command-line front end. `main` parses arguments and calls [`run`]; every
//! command is also callable directly and returns its output text together
//! with an exit status.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::dynamics::{default_energies, isochrony_sweep, logspace, DEFAULT_ODE_TOL};
use crate::error::{Error, Result};
use crate::families::{parse_address, FamilySpec};
use crate::implicit::{catalog_entry, implicit_involution, BranchSolveConfig, CATALOG_NAMES};
use crate::interval::Interval;
use crate::involution::{check_involution, grid_with_points, DefectTolerance, Involution};
use crate::potential::{
    check_global_inequality, check_necessary_conditions, family_potential, g_cmp, harmonic, inequality_margin,
    quartic_control, stillinger_force, NecessaryReport, Potential,
};

/// Process exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass = 0,
    Fail = 1,
    Usage = 2,
}

/// Text produced by a command and the status it ends with.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub status: Status,
    pub body: String,
    /// One-line explanation for stderr when the check failed.
    pub message: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "isochrone",
    version,
    about = "Involutions and globally isochronous potentials"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the available families and catalog entries.
    List(CommonArgs),
    /// Tabulate x, h(x), V(x), g(x) and the inequality margin.
    Sample(CommonArgs),
    /// Check h(h(x)) = x, monotonicity, h(0) = 0 and h'(0) = -1 on a grid.
    VerifyInvolution(CommonArgs),
    /// Compare orbit periods with 2π/ω over a set of energies.
    VerifyIsochrony(CommonArgs),
    /// Check V(x) ≥ ω²x²/8 on a grid.
    VerifyInequality(CommonArgs),
    /// Check the local derivative identities at the origin.
    VerifyNecessary(CommonArgs),
    /// Compare the (b, c) force law with the Stillinger force.
    CompareGcmp(CommonArgs),
    /// Write x, V, g, margin for a potential.
    Export(CommonArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Family address `name[:key=val,...]` or a JSON object such as
    /// `{"kind":"stillinger","lambda":1,"a":1}`.
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub omega: Option<f64>,
    /// Sampling window `lo:hi`; `inf` is accepted.
    #[arg(long, allow_hyphen_values = true)]
    pub range: Option<String>,
    #[arg(long)]
    pub points: Option<usize>,
    /// Comma-separated energies or `logspace:lo:hi:n`.
    #[arg(long)]
    pub energies: Option<String>,
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// JSON file with any of the above; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<f64>,
}

/// Contents of a `--config` file.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    family: Option<Value>,
    omega: Option<f64>,
    range: Option<String>,
    points: Option<usize>,
    energies: Option<Value>,
    tolerance: Option<f64>,
    output: Option<PathBuf>,
    format: Option<Format>,
    b: Option<f64>,
    c: Option<f64>,
}

/// Fully resolved settings for one command.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub family: Option<String>,
    pub omega: f64,
    pub range: Option<Interval>,
    pub points: usize,
    pub energies: Vec<f64>,
    pub tolerance: f64,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
    pub b: Option<f64>,
    pub c: Option<f64>,
}

impl RunConfig {
    pub fn from_args(args: &CommonArgs) -> Result<Self> {
        let file = match &args.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::Parameter(format!("cannot read config {}: {e}", path.display())))?;
                serde_json::from_str::<FileConfig>(&text)
                    .map_err(|e| Error::Parameter(format!("invalid config {}: {e}", path.display())))?
            }
            None => FileConfig::default(),
        };
        let family = match (&args.family, &file.family) {
            (Some(f), _) => Some(f.clone()),
            (None, Some(Value::String(s))) => Some(s.clone()),
            (None, Some(v)) => Some(v.to_string()),
            (None, None) => None,
        };
        let range = match args.range.as_ref().or(file.range.as_ref()) {
            Some(r) => Some(Interval::parse(r)?),
            None => None,
        };
        let energies = match (&args.energies, &file.energies) {
            (Some(s), _) => parse_energies(s)?,
            (None, Some(Value::String(s))) => parse_energies(s)?,
            (None, Some(Value::Array(items))) => items
                .iter()
                .map(|v| {
                    v.as_f64()
                        .ok_or_else(|| Error::Parameter(format!("energy {v} is not a number")))
                })
                .collect::<Result<_>>()?,
            (None, Some(v)) => return Err(Error::Parameter(format!("energies must be a list or string, got {v}"))),
            (None, None) => default_energies(),
        };
        let cfg = RunConfig {
            family,
            omega: args.omega.or(file.omega).unwrap_or(1.0),
            range,
            points: args.points.or(file.points).unwrap_or(1001),
            energies,
            tolerance: args.tolerance.or(file.tolerance).unwrap_or(1e-6),
            output: args.output.clone().or(file.output),
            format: args.format.or(file.format),
            b: args.b.or(file.b),
            c: args.c.or(file.c),
        };
        if cfg.points < 2 {
            return Err(Error::Parameter(format!(
                "points must be at least 2, got {}",
                cfg.points
            )));
        }
        if !(cfg.tolerance > 0.0) {
            return Err(Error::Parameter(format!(
                "tolerance must be positive, got {}",
                cfg.tolerance
            )));
        }
        Ok(cfg)
    }

    fn family_address(&self) -> Result<&str> {
        self.family
            .as_deref()
            .ok_or_else(|| Error::Parameter("--family is required for this command".into()))
    }

    fn range_or(&self, default: Interval) -> Interval {
        self.range.unwrap_or(default)
    }
}

/// `0.1,1,10` or `logspace:lo:hi:n`.
pub fn parse_energies(s: &str) -> Result<Vec<f64>> {
    let s = s.trim();
    let bad = |what: &str| Error::Parameter(format!("invalid energies '{s}': {what}"));
    let out = if let Some(rest) = s.strip_prefix("logspace:") {
        let parts: Vec<&str> = rest.split(':').collect();
        if parts.len() != 3 {
            return Err(bad("expected logspace:lo:hi:n"));
        }
        let lo: f64 = parts[0].trim().parse().map_err(|_| bad("lo"))?;
        let hi: f64 = parts[1].trim().parse().map_err(|_| bad("hi"))?;
        let n: usize = parts[2].trim().parse().map_err(|_| bad("n"))?;
        if !(lo > 0.0 && hi >= lo) || n == 0 {
            return Err(bad("need 0 < lo <= hi and n >= 1"));
        }
        logspace(lo, hi, n)
    } else {
        s.split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|_| bad(t)))
            .collect::<Result<Vec<_>>>()?
    };
    if out.is_empty() || out.iter().any(|e| !(*e > 0.0 && e.is_finite())) {
        return Err(bad("energies must be positive and finite"));
    }
    Ok(out)
}

/// What a `--family` address refers to.
#[derive(Clone)]
pub enum Family {
    Closed(FamilySpec),
    Catalog { address: String, involution: Involution },
    Harmonic,
    QuarticControl,
}

impl Family {
    pub fn parse(address: &str) -> Result<Self> {
        let trimmed = address.trim();
        if trimmed.starts_with('{') {
            let spec: FamilySpec =
                serde_json::from_str(trimmed).map_err(|e| Error::Parameter(format!("invalid family JSON: {e}")))?;
            spec.validate()?;
            return Ok(Family::Closed(spec));
        }
        let (name, _) = parse_address(trimmed)?;
        match name.as_str() {
            "harmonic" => Ok(Family::Harmonic),
            "quartic" | "quartic-control" => Ok(Family::QuarticControl),
            n if CATALOG_NAMES.contains(&n) => {
                let s = catalog_entry(trimmed)?;
                let involution = implicit_involution(s, BranchSolveConfig::default())?;
                Ok(Family::Catalog {
                    address: trimmed.to_string(),
                    involution,
                })
            }
            _ => {
                let spec: FamilySpec = trimmed.parse()?;
                spec.validate()?;
                Ok(Family::Closed(spec))
            }
        }
    }

    pub fn name(&self) -> String {
        match self {
            Family::Closed(spec) => spec.to_string(),
            Family::Catalog { address, .. } => address.clone(),
            Family::Harmonic => "harmonic".into(),
            Family::QuarticControl => "quartic-control".into(),
        }
    }

    pub fn involution(&self) -> Result<Involution> {
        match self {
            Family::Closed(spec) => spec.involution(),
            Family::Catalog { involution, .. } => Ok(involution.clone()),
            Family::Harmonic => Ok(Involution::negation()),
            Family::QuarticControl => Err(Error::Parameter(
                "quartic-control is a potential without an involution".into(),
            )),
        }
    }

    pub fn potential(&self, omega: f64) -> Result<Potential> {
        match self {
            Family::Closed(spec) => family_potential(spec, omega),
            Family::Catalog { involution, .. } => Potential::from_involution(involution.clone(), omega),
            Family::Harmonic => harmonic(omega),
            Family::QuarticControl => Ok(quartic_control()),
        }
    }

    fn defect_tolerance(&self) -> DefectTolerance {
        match self {
            Family::Catalog { .. } => DefectTolerance::IMPLICIT,
            _ => DefectTolerance::CLOSED_FORM,
        }
    }
}

/// Shortest representation that parses back to the same `f64`.
pub fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else if x == 0.0 || (1e-5..1e16).contains(&x.abs()) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn csv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

fn finite_or_null(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

fn report(check: &str, params: Value, max_defect: f64, pass: bool, extra: Value) -> Value {
    let mut v = json!({
        "check": check,
        "params": params,
        "max_defect": finite_or_null(max_defect),
        "pass": pass,
    });
    if let (Value::Object(map), Value::Object(more)) = (&mut v, extra) {
        map.extend(more);
    }
    v
}

fn verdict(pass: bool, body: String, message: impl FnOnce() -> String) -> Outcome {
    Outcome {
        status: if pass { Status::Pass } else { Status::Fail },
        body,
        message: if pass { None } else { Some(message()) },
    }
}

const SAMPLE_WINDOW: Interval = Interval { lo: -5.0, hi: 5.0 };
const CHECK_WINDOW: Interval = Interval { lo: -10.0, hi: 10.0 };

pub fn cmd_list(cfg: &RunConfig) -> Result<Outcome> {
    let mut entries = Vec::new();
    for spec in FamilySpec::defaults() {
        entries.push(("closed-form", spec.to_string()));
    }
    for name in CATALOG_NAMES {
        entries.push(("implicit", name.to_string()));
    }
    entries.push(("reference", "harmonic".into()));
    entries.push(("control", "quartic-control".into()));
    let body = match cfg.format.unwrap_or(Format::Json) {
        Format::Csv => csv(
            &["kind", "address"],
            entries.iter().map(|(k, a)| vec![k.to_string(), a.clone()]),
        ),
        Format::Json => json_text(&Value::Array(
            entries.iter().map(|(k, a)| json!({"kind": k, "address": a})).collect(),
        )),
    };
    Ok(Outcome {
        status: Status::Pass,
        body,
        message: None,
    })
}

/// One row of [`cmd_sample`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleRow {
    pub x: f64,
    pub h: Option<f64>,
    pub v: f64,
    pub g: f64,
    pub margin: f64,
}

pub fn sample_rows(cfg: &RunConfig) -> Result<Vec<SampleRow>> {
    let family = Family::parse(cfg.family_address()?)?;
    let p = family.potential(cfg.omega)?;
    let h = family.involution().ok();
    let grid = grid_with_points(p.domain(), cfg.range_or(SAMPLE_WINDOW), cfg.points)?;
    grid.into_iter()
        .map(|x| {
            Ok(SampleRow {
                x,
                h: h.as_ref().map(|h| h.eval(x)).transpose()?,
                v: p.v(x)?,
                g: p.g(x)?,
                margin: inequality_margin(&p, x)?,
            })
        })
        .collect()
}

pub fn cmd_sample(cfg: &RunConfig) -> Result<Outcome> {
    let rows = sample_rows(cfg)?;
    let body = match cfg.format.unwrap_or(Format::Csv) {
        Format::Csv => csv(
            &["x", "h", "V", "g", "margin"],
            rows.iter().map(|r| {
                vec![
                    fmt_float(r.x),
                    r.h.map(fmt_float).unwrap_or_default(),
                    fmt_float(r.v),
                    fmt_float(r.g),
                    fmt_float(r.margin),
                ]
            }),
        ),
        Format::Json => json_text(&Value::Array(
            rows.iter()
                .map(|r| json!({"x": r.x, "h": r.h, "V": r.v, "g": r.g, "margin": r.margin}))
                .collect(),
        )),
    };
    Ok(Outcome {
        status: Status::Pass,
        body,
        message: None,
    })
}

pub fn cmd_export(cfg: &RunConfig) -> Result<Outcome> {
    let rows = sample_rows(cfg)?;
    let body = match cfg.format.unwrap_or(Format::Csv) {
        Format::Csv => csv(
            &["x", "V", "g", "margin"],
            rows.iter()
                .map(|r| vec![fmt_float(r.x), fmt_float(r.v), fmt_float(r.g), fmt_float(r.margin)]),
        ),
        Format::Json => json_text(&Value::Array(
            rows.iter()
                .map(|r| json!({"x": r.x, "V": r.v, "g": r.g, "margin": r.margin}))
                .collect(),
        )),
    };
    Ok(Outcome {
        status: Status::Pass,
        body,
        message: None,
    })
}

fn base_params(cfg: &RunConfig, family: &Family) -> Value {
    json!({
        "family": family.name(),
        "omega": cfg.omega,
        "points": cfg.points,
    })
}

pub fn cmd_verify_involution(cfg: &RunConfig) -> Result<Outcome> {
    let family = Family::parse(cfg.family_address()?)?;
    let h = family.involution()?;
    let window = cfg.range_or(CHECK_WINDOW);
    let grid = grid_with_points(h.domain(), window, cfg.points)?;
    let r = check_involution(&h, &grid)?;
    let tol = family.defect_tolerance();
    let pass = r.passes(tol);
    let mut params = base_params(cfg, &family);
    params["range"] = json!(window.to_string());
    let body = json_text(&report(
        "involution",
        params,
        r.max_identity_defect,
        pass,
        json!({"details": r, "tolerance": {"atol": tol.atol, "rtol": tol.rtol}}),
    ));
    Ok(verdict(pass, body, || {
        format!(
            "involution check failed at x = {} (|h(h(x)) - x| = {})",
            fmt_float(r.worst_x),
            fmt_float(r.max_identity_defect)
        )
    }))
}

pub fn cmd_verify_inequality(cfg: &RunConfig) -> Result<Outcome> {
    let family = Family::parse(cfg.family_address()?)?;
    let p = family.potential(cfg.omega)?;
    let window = cfg.range_or(CHECK_WINDOW);
    let grid = grid_with_points(p.domain(), window, cfg.points)?;
    let r = check_global_inequality(&p, &grid)?;
    let pass = r.passes();
    let mut params = base_params(cfg, &family);
    params["range"] = json!(window.to_string());
    let body = json_text(&report(
        "inequality",
        params,
        (-r.min_margin).max(0.0),
        pass,
        json!({"min_margin": r.min_margin, "argmin": r.argmin, "violations": r.violations.len()}),
    ));
    Ok(verdict(pass, body, || {
        let (x, m) = r.violations[0];
        format!("V(x) < ω²x²/8 at x = {} (margin {})", fmt_float(x), fmt_float(m))
    }))
}

pub fn cmd_verify_necessary(cfg: &RunConfig) -> Result<Outcome> {
    let family = Family::parse(cfg.family_address()?)?;
    let p = family.potential(cfg.omega)?;
    let r = check_necessary_conditions(&p)?;
    let pass = r.passes();
    let body = json_text(&report(
        "necessary",
        base_params(cfg, &family),
        r.v4_normalized.max(r.v6_normalized),
        pass,
        json!({"details": r, "threshold": NecessaryReport::THRESHOLD}),
    ));
    Ok(verdict(pass, body, || {
        format!(
            "derivative identities violated at x = 0: v4 residual {}, v6 residual {}",
            fmt_float(r.v4_normalized),
            fmt_float(r.v6_normalized)
        )
    }))
}

pub fn cmd_verify_isochrony(cfg: &RunConfig) -> Result<Outcome> {
    let family = Family::parse(cfg.family_address()?)?;
    let p = family.potential(cfg.omega)?;
    let sweep = isochrony_sweep(&p, &cfg.energies, DEFAULT_ODE_TOL)?;
    let pass = sweep.passes(cfg.tolerance);
    let offender = sweep.first_offender(cfg.tolerance);
    let body = match cfg.format.unwrap_or(Format::Json) {
        Format::Csv => csv(
            &[
                "energy",
                "x_minus",
                "x_plus",
                "T_quadrature",
                "T_ode",
                "T_expected",
                "rel_deviation",
                "energy_drift",
            ],
            sweep.entries.iter().map(|e| match e.report {
                Some(r) => vec![
                    fmt_float(r.energy),
                    fmt_float(r.x_minus),
                    fmt_float(r.x_plus),
                    fmt_float(r.t_quadrature),
                    fmt_float(r.t_ode),
                    fmt_float(r.t_expected),
                    fmt_float(r.rel_deviation()),
                    fmt_float(r.max_energy_drift),
                ],
                None => {
                    let mut row = vec![String::new(); 8];
                    row[0] = fmt_float(e.energy);
                    row[5] = fmt_float(p.expected_period());
                    row
                }
            }),
        ),
        Format::Json => {
            let mut params = base_params(cfg, &family);
            params["energies"] = json!(cfg.energies);
            params["tolerance"] = json!(cfg.tolerance);
            json_text(&report(
                "isochrony",
                params,
                sweep.max_rel_period_deviation,
                pass,
                json!({
                    "max_quadrature_deviation": sweep.max_quadrature_deviation,
                    "max_ode_deviation": sweep.max_ode_deviation,
                    "failures": sweep.failures,
                    "skipped": sweep.skipped,
                    "first_offending_energy": offender,
                    "entries": sweep.entries,
                }),
            ))
        }
    };
    Ok(verdict(pass, body, || match offender {
        Some(e) => format!(
            "period deviates from 2π/ω beyond {} at E = {}",
            cfg.tolerance,
            fmt_float(e)
        ),
        None => "no admissible energy in the sweep".into(),
    }))
}

pub fn cmd_compare_gcmp(cfg: &RunConfig) -> Result<Outcome> {
    let (b, c) = match (cfg.b, cfg.c) {
        (Some(b), Some(c)) => (b, c),
        _ => return Err(Error::Parameter("compare-gcmp requires --b and --c".into())),
    };
    let g = g_cmp(cfg.omega, b, c)?;
    let (lambda, a) = g.stillinger_parameters();
    let window = cfg.range_or(CHECK_WINDOW);
    let grid = grid_with_points(Interval::REAL_LINE, window, cfg.points)?;
    let mut max_diff = 0.0_f64;
    let mut max_g = 0.0_f64;
    let mut worst_x = grid[0];
    let mut printed_map_diff = 0.0_f64;
    let lambda_printed = 4.0 * c - b * b;
    for &x in &grid {
        let lhs = g.g(x);
        let rhs = stillinger_force(lambda, a, g.omega, x);
        let d = (lhs - rhs).abs();
        if d > max_diff || d.is_nan() {
            max_diff = d;
            worst_x = x;
        }
        max_g = max_g.max(lhs.abs());
        printed_map_diff = printed_map_diff.max((lhs - stillinger_force(lambda_printed, a, g.omega, x)).abs());
    }
    let bound = 1e-9 * (1.0 + max_g);
    let pass = max_diff < bound;
    let body = json_text(&report(
        "gcmp",
        json!({"b": b, "c": c, "omega": g.omega, "points": cfg.points, "range": window.to_string()}),
        max_diff,
        pass,
        json!({
            "lambda": lambda,
            "a": a,
            "bound": bound,
            "max_abs_g": max_g,
            "lambda_4c_minus_b2": lambda_printed,
            "max_defect_with_lambda_4c_minus_b2": printed_map_diff,
        }),
    ));
    Ok(verdict(pass, body, || {
        format!(
            "force laws differ by {} at x = {}",
            fmt_float(max_diff),
            fmt_float(worst_x)
        )
    }))
}

pub fn execute(command: &Command) -> Result<(Outcome, Option<PathBuf>)> {
    let (args, f): (&CommonArgs, fn(&RunConfig) -> Result<Outcome>) = match command {
        Command::List(a) => (a, cmd_list),
        Command::Sample(a) => (a, cmd_sample),
        Command::VerifyInvolution(a) => (a, cmd_verify_involution),
        Command::VerifyIsochrony(a) => (a, cmd_verify_isochrony),
        Command::VerifyInequality(a) => (a, cmd_verify_inequality),
        Command::VerifyNecessary(a) => (a, cmd_verify_necessary),
        Command::CompareGcmp(a) => (a, cmd_compare_gcmp),
        Command::Export(a) => (a, cmd_export),
    };
    let cfg = RunConfig::from_args(args)?;
    Ok((f(&cfg)?, cfg.output))
}

/// Runs a parsed command line, writing output and diagnostics, and returns
/// the process exit code.
pub fn run(cli: Cli) -> i32 {
    match execute(&cli.command) {
        Ok((outcome, output)) => {
            let written = match output {
                Some(path) => {
                    std::fs::write(&path, &outcome.body).map_err(|e| format!("cannot write {}: {e}", path.display()))
                }
                None => {
                    print!("{}", outcome.body);
                    Ok(())
                }
            };
            if let Err(msg) = written {
                eprintln!("error: {msg}");
                return Status::Usage as i32;
            }
            if let Some(msg) = outcome.message {
                eprintln!("check failed: {msg}");
            }
            outcome.status as i32
        }
        Err(e) => {
            eprintln!("error: {e}");
            Status::Usage as i32
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(family: &str) -> RunConfig {
        RunConfig::from_args(&CommonArgs {
            family: Some(family.into()),
            ..Default::default()
        })
        .unwrap()
    }

    #[test]
    fn float_format_round_trips() {
        for x in [
            0.0,
            1.0,
            -0.1,
            1e-7,
            123456.789,
            1e300,
            f64::MIN_POSITIVE,
            std::f64::consts::PI,
        ] {
            let s = fmt_float(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
        assert_eq!(fmt_float(0.5), "0.5");
        assert_eq!(fmt_float(1e-7), "1e-7");
    }

    #[test]
    fn energies_grammar() {
        assert_eq!(parse_energies("0.1, 1,10").unwrap(), vec![0.1, 1.0, 10.0]);
        assert_eq!(parse_energies("logspace:1e-2:1e2:5").unwrap().len(), 5);
        assert!(parse_energies("1,-1").is_err());
        assert!(parse_energies("logspace:1:2").is_err());
    }

    #[test]
    fn family_addresses() {
        assert!(matches!(
            Family::parse("Stillinger:lambda=2,a=-1").unwrap(),
            Family::Closed(_)
        ));
        assert!(matches!(
            Family::parse(r#"{"kind":"dorignac","beta":0.5}"#).unwrap(),
            Family::Closed(_)
        ));
        assert!(matches!(Family::parse("exp:rho=1").unwrap(), Family::Catalog { .. }));
        assert!(matches!(Family::parse("harmonic").unwrap(), Family::Harmonic));
        assert!(Family::parse("nope").is_err());
        assert!(Family::parse("stillinger:lambda=-1").is_err());
    }

    #[test]
    fn sample_has_origin_row() {
        let mut c = cfg("quintic");
        c.range = Some(Interval::new(-2.0, 2.0).unwrap());
        c.points = 5;
        let rows = sample_rows(&c).unwrap();
        assert_eq!(rows.len(), 5);
        assert!(rows.iter().any(|r| r.x == 0.0 && r.h == Some(0.0)));
    }

    #[test]
    fn sample_is_deterministic() {
        let c = cfg("lambert:rho=1,a=1");
        assert_eq!(cmd_sample(&c).unwrap().body, cmd_sample(&c).unwrap().body);
    }

    #[test]
    fn gcmp_rejects_non_global() {
        let mut c = cfg("harmonic");
        c.b = Some(2.0);
        c.c = Some(1.0);
        let e = cmd_compare_gcmp(&c).unwrap_err().to_string();
        assert!(e.contains("b² - 4c < 0"), "{e}");
        c.b = Some(0.0);
        c.omega = 3.0;
        assert_eq!(cmd_compare_gcmp(&c).unwrap().status, Status::Pass);
    }

    #[test]
    fn quartic_fails_necessary_but_passes_inequality() {
        let c = cfg("quartic");
        assert_eq!(cmd_verify_necessary(&c).unwrap().status, Status::Fail);
        assert_eq!(cmd_verify_inequality(&c).unwrap().status, Status::Pass);
        assert!(cmd_verify_involution(&c).is_err());
    }
}
