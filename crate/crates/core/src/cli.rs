//! Command-line front end: `analyze`, `table`, `verify`.
//!
//! Exit codes: 0 on success, 1 when `verify` finds a violation, 2 on usage,
//! parse or I/O errors.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;

use crate::circulant::{symbol_values, FirstRow};
use crate::classify::{
    classify, Adjacency, ClassificationReport, Membership, Tolerances, DEFAULT_M_MAX,
};
use crate::classify::{cone_power_bound, phase_cone_with, positivity_power_bound};
use crate::experiments::{build_table, verify_sweep, SweepSpec, TableSpec};
use crate::scalar::parse_scalar;
use crate::table::{render, Format};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "circnorm",
    version,
    about = "Spectral norms and eventual positivity of circulant matrices"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify one first row.
    Analyze(AnalyzeArgs),
    /// Monte Carlo table of the positivity chain.
    Table(TableArgs),
    /// Randomized check of the C_n' characterizations.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ToleranceArgs {
    /// Relative slack under which two symbol moduli are equal.
    #[arg(long, default_value_t = Tolerances::default().tie)]
    pub tie: f64,
    /// Relative margin required to call the spectral gap strict.
    #[arg(long, default_value_t = Tolerances::default().gap)]
    pub gap: f64,
    /// Relative threshold for calling an entry positive or nonzero.
    #[arg(long, default_value_t = Tolerances::default().positivity)]
    pub positivity: f64,
}

impl ToleranceArgs {
    fn tolerances(&self) -> Tolerances {
        Tolerances {
            tie: self.tie,
            gap: self.gap,
            positivity: self.positivity,
        }
    }
}

fn scalar_arg(s: &str) -> Result<Complex64, String> {
    parse_scalar(s).map_err(|e| e.to_string())
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// First row entries: -2.5, 3/5, 1+0.5i, 2i, -1-i
    #[arg(required = true, allow_hyphen_values = true, value_parser = scalar_arg)]
    pub row: Vec<Complex64>,
    /// Largest power searched for positivity.
    #[arg(long, default_value_t = DEFAULT_M_MAX)]
    pub mmax: u32,
    /// Do not count (n-1, 0) as adjacent in the phase cone.
    #[arg(long)]
    pub linear_adjacency: bool,
    /// Emit the report as JSON.
    #[arg(long)]
    pub json: bool,
    #[command(flatten)]
    pub tol: ToleranceArgs,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    /// Dimensions, e.g. "2..10,20".
    #[arg(long, default_value = "2..10,20", value_parser = parse_dims)]
    pub dims: ::std::vec::Vec<usize>,
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: u64,
    /// Exponents m for the B^m > O columns.
    #[arg(long, default_value = "1,2,4,8,16,32", value_parser = parse_powers)]
    pub powers: ::std::vec::Vec<u32>,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "md")]
    pub format: Format,
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub tol: ToleranceArgs,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Random samples per dimension.
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
    #[arg(long, default_value_t = 2)]
    pub nmin: usize,
    #[arg(long, default_value_t = 10)]
    pub nmax: usize,
    #[arg(long, default_value_t = DEFAULT_M_MAX)]
    pub mmax: u32,
    /// Sample complex rows and check the phase-cone characterization.
    #[arg(long)]
    pub complex: bool,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[command(flatten)]
    pub tol: ToleranceArgs,
}

/// `"2..10,20"` to `[2, 3, ..., 10, 20]`.
pub fn parse_dims(s: &str) -> Result<Vec<usize>, String> {
    let mut dims = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part.split_once("..") {
            Some((a, b)) => {
                let a: usize = a
                    .trim()
                    .parse()
                    .map_err(|_| format!("bad range start in {part:?}"))?;
                let b: usize = b
                    .trim()
                    .parse()
                    .map_err(|_| format!("bad range end in {part:?}"))?;
                if a > b {
                    return Err(format!("empty range {part:?}"));
                }
                dims.extend(a..=b);
            }
            None => dims.push(
                part.parse()
                    .map_err(|_| format!("bad dimension {part:?}"))?,
            ),
        }
    }
    if dims.is_empty() {
        return Err("no dimensions".into());
    }
    Ok(dims)
}

pub fn parse_powers(s: &str) -> Result<Vec<u32>, String> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| p.parse().map_err(|_| format!("bad power {p:?}")))
        .collect()
}

fn join(values: impl IntoIterator<Item = String>) -> String {
    values.into_iter().collect::<Vec<_>>().join(", ")
}

fn fmt_scalar(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else if z.re == 0.0 {
        format!("{}i", z.im)
    } else {
        format!("{}{:+}i", z.re, z.im)
    }
}

fn format_report(x: &FirstRow, report: &ClassificationReport, args: &AnalyzeArgs) -> String {
    let tol = args.tol.tolerances();
    let mut s = String::new();
    let line = |s: &mut String, key: &str, value: String| {
        let _ = writeln!(s, "{key:<24}{value}");
    };

    line(&mut s, "n", report.n.to_string());
    line(
        &mut s,
        "row",
        join(x.entries().iter().map(|&z| fmt_scalar(z))),
    );
    line(&mut s, "spectral norm", format!("{}", report.spectral_norm));
    line(&mut s, "|row sum|", format!("{}", report.row_sum_abs));
    line(
        &mut s,
        "symbol moduli",
        join(report.symbol_moduli.iter().map(|m| format!("{m:.9}"))),
    );
    line(
        &mut s,
        "in C_n",
        format!(
            "{} (margin {:.3e})",
            report.in_cn.as_str(),
            report.cn_margin
        ),
    );
    line(
        &mut s,
        "in C_n'",
        format!(
            "{} (gap margin {:.3e})",
            report.in_cn_prime.as_str(),
            report.gap_margin
        ),
    );
    if let Some(k) = report.violating_root {
        line(&mut s, "violating root", format!("k = {k}"));
    }
    if let Some(sign) = report.sign_condition {
        line(&mut s, "sign condition", sign.as_str().to_string());
    }
    line(
        &mut s,
        "Gram row",
        join(report.gram_row.entries().iter().map(|&z| fmt_scalar(z))),
    );
    line(
        &mut s,
        "Gram >= O / > O",
        format!(
            "{} / {}",
            yes_no(report.gram_nonnegative),
            yes_no(report.gram_positive)
        ),
    );

    let symbol = symbol_values(x);
    let gap_ratio = Membership::from_symbol(&symbol, &tol).gap_ratio(&symbol);
    let gap_note = || match gap_ratio {
        Some(rho) if rho < 1.0 => {
            let bound = if x.is_real() {
                positivity_power_bound(x.len(), rho)
            } else {
                cone_power_bound(x.len(), rho)
            };
            format!(
                " (gap ratio c1/c0 = {rho:.9}, gap-implied bound m = {})",
                bound.unwrap_or(u64::MAX)
            )
        }
        Some(rho) => format!(" (gap ratio c1/c0 = {rho:.9}, no spectral gap)"),
        None => " (row sum is zero)".to_string(),
    };

    if let Some(search) = report.minimal_positive_power {
        let value = match search.found {
            Some(m) => m.to_string(),
            None => format!("none up to {}{}", search.bound, gap_note()),
        };
        line(&mut s, "minimal m with B^m > O", value);
    }
    if let Some(cone) = &report.phase_cone {
        let adjacency = if args.linear_adjacency {
            Adjacency::Linear
        } else {
            Adjacency::Cyclic
        };
        let input = phase_cone_with(x.entries(), &tol, adjacency);
        line(
            &mut s,
            "x in phase cone",
            format!(
                "{} (worst |arg| {:.6}, limit {:.6})",
                yes_no(input.holds),
                input.worst_phase,
                std::f64::consts::PI / (2.0 * x.len() as f64)
            ),
        );
        let value = match cone.holds_at_m {
            Some(m) => {
                let witness = cone
                    .adjacency_witness
                    .map(|(j, k)| format!(", adjacent pair ({j}, {k})"))
                    .unwrap_or_default();
                format!("{m}{witness}")
            }
            None => format!("none up to {}{}", cone.bound, gap_note()),
        };
        line(&mut s, "first m with B^m in cone", value);
    }
    s
}

fn yes_no(b: bool) -> String {
    if b { "yes" } else { "no" }.to_string()
}

fn cmd_analyze(args: &AnalyzeArgs, out: &mut dyn Write) -> anyhow::Result<i32> {
    let tol = args.tol.tolerances();
    let x = FirstRow::new(args.row.clone())?;
    let mut report = classify(&x, &tol, Some(args.mmax))?;
    if args.linear_adjacency {
        report = linear_cone(report, &x, &tol, args.mmax);
    }
    if args.json {
        serde_json::to_writer_pretty(&mut *out, &report)?;
        writeln!(out)?;
    } else {
        out.write_all(format_report(&x, &report, args).as_bytes())?;
    }
    Ok(EXIT_OK)
}

fn linear_cone(
    mut report: ClassificationReport,
    x: &FirstRow,
    tol: &Tolerances,
    m_max: u32,
) -> ClassificationReport {
    if let (Some(cone), Ok(powers)) = (
        report.phase_cone.as_mut(),
        crate::circulant::NormalizedPowers::new(x),
    ) {
        let hit = (1..=m_max).find_map(|m| {
            let c = phase_cone_with(&powers.row(m), tol, Adjacency::Linear);
            c.holds.then_some((m, c))
        });
        cone.holds_at_m = hit.map(|(m, _)| m);
        cone.adjacency_witness = hit.and_then(|(_, c)| c.adjacency_witness);
        cone.input_in_cone = phase_cone_with(x.entries(), tol, Adjacency::Linear).holds;
    }
    report
}

fn cmd_table(args: &TableArgs, out: &mut dyn Write) -> anyhow::Result<i32> {
    let spec = TableSpec {
        dims: args.dims.clone(),
        samples: args.samples,
        powers: args.powers.clone(),
        seed: args.seed,
        tolerances: args.tol.tolerances(),
    };
    spec.validate()?;
    let rows = build_table(&spec)?;
    let text = render(args.format, &spec, &rows);
    match &args.out {
        Some(path) => {
            std::fs::write(path, text)
                .with_context(|| format!("cannot write {}", path.display()))?;
        }
        None => out.write_all(text.as_bytes())?,
    }
    Ok(EXIT_OK)
}

fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write) -> anyhow::Result<i32> {
    if args.trials == 0 {
        bail!("--trials must be at least 1");
    }
    if args.nmin < 2 || args.nmin > args.nmax {
        bail!("need 2 <= nmin <= nmax");
    }
    let spec = SweepSpec {
        dims: (args.nmin..=args.nmax).collect(),
        trials: args.trials,
        m_max: args.mmax,
        complex: args.complex,
        seed: args.seed,
        tolerances: args.tol.tolerances(),
    };
    let rows = verify_sweep(&spec)?;

    let mode = if args.complex {
        format!(
            "complex: x in C_n' <=> some B^m row (m <= {}) in the phase cone",
            args.mmax
        )
    } else {
        format!("real: x in C_n' <=> B^m > O for some m <= {}", args.mmax)
    };
    writeln!(out, "{mode}")?;
    writeln!(
        out,
        "{:>4} {:>8} {:>9} {:>13} {:>12} {:>11}",
        "n", "trials", "boundary", "beyond_bound", "in_cn_prime", "violations"
    )?;
    for r in &rows {
        writeln!(
            out,
            "{:>4} {:>8} {:>9} {:>13} {:>12} {:>11}",
            r.n, r.trials, r.boundary, r.beyond_bound, r.in_cn_prime, r.violations
        )?;
    }
    let sum = |f: fn(&crate::experiments::SweepRow) -> u64| rows.iter().map(f).sum::<u64>();
    let violations = sum(|r| r.violations);
    writeln!(
        out,
        "trials {}, skipped {}, beyond bound {}, violations {}",
        sum(|r| r.trials),
        sum(|r| r.boundary),
        sum(|r| r.beyond_bound),
        violations
    )?;
    for r in rows.iter().filter(|r| r.violations > 0) {
        if let Some(first) = &r.first_violation {
            writeln!(out, "first violation at n = {}: {first}", r.n)?;
        }
    }
    Ok(if violations > 0 {
        EXIT_VIOLATION
    } else {
        EXIT_OK
    })
}

/// Runs a parsed command and returns the process exit code.
pub fn run(cli: &Cli, out: &mut dyn Write) -> anyhow::Result<i32> {
    match &cli.command {
        Command::Analyze(args) => cmd_analyze(args, out),
        Command::Table(args) => cmd_table(args, out),
        Command::Verify(args) => cmd_verify(args, out),
    }
}

/// Long options of `analyze` that take a value.
const ANALYZE_VALUED: [&str; 4] = ["--mmax", "--tie", "--gap", "--positivity"];

/// Moves `analyze` options ahead of the row. The row accepts values that
/// start with `-`, so clap would otherwise read a trailing `--json` as an entry.
fn hoist_analyze_options(args: Vec<OsString>) -> Vec<OsString> {
    let Some(pos) = args
        .iter()
        .skip(1)
        .position(|a| a == "analyze")
        .map(|p| p + 1)
    else {
        return args;
    };
    if args[1..pos]
        .iter()
        .any(|a| !a.to_string_lossy().starts_with('-'))
    {
        return args;
    }
    let mut head: Vec<OsString> = args[..=pos].to_vec();
    let mut row = Vec::new();
    let mut rest = args[pos + 1..].iter();
    while let Some(a) = rest.next() {
        let text = a.to_string_lossy();
        if text == "--" {
            row.push(a.clone());
            row.extend(rest.cloned());
            break;
        }
        if text.starts_with("--") || text == "-h" || text == "-V" {
            head.push(a.clone());
            if ANALYZE_VALUED.contains(&text.as_ref()) {
                head.extend(rest.next().cloned());
            }
        } else {
            row.push(a.clone());
        }
    }
    head.extend(row);
    head
}

/// Parses `args`, runs, and maps every failure to an exit code.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = hoist_analyze_options(args.into_iter().map(Into::into).collect());
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match run(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            EXIT_USAGE
        }
    }
}
