//! Command-line front end. [`run`] is the whole program minus process
//! plumbing, so it can be driven from tests.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::entanglement::{by_separation, distribution_with, local_purity, threshold_with, ThresholdOptions, DECISION_TOL};
use crate::error::{Error, Result};
use crate::mps::{build_mps, extract_circulant, ground_state_cm, long_range_cm, potential_matrix, RingSpec};
use crate::states::{building_block, format_matrix_text, parse_matrix_text, BondSpec, BuildingBlockParams, GaussianState};
use crate::symplectic::SymMatrix;

/// Default ring-size limit; `--allow-large` lifts it.
pub const MAX_SITES: usize = 64;

/// Agreement required between a ring state and the ground state of its
/// parent Hamiltonian.
pub const HAMILTONIAN_TOL: f64 = 1e-8;

#[derive(Debug, Parser)]
#[command(name = "gmps", version, about = "Gaussian matrix-product states on harmonic rings")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Write to this file instead of standard output.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    /// Prefix the output with a '#' line recording the command and parameters.
    #[arg(long, global = true)]
    pub header: bool,

    /// Output format for covariance matrices.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    MatrixText,
}

#[derive(Debug, Args)]
pub struct RingArgs {
    /// Number of ring sites.
    #[arg(long, default_value_t = 6)]
    pub n: usize,
    /// Local mixedness of the block's output mode (x >= 1).
    #[arg(long)]
    pub x: f64,
    /// Local mixedness of the block's input modes (s >= (x+1)/2).
    #[arg(long)]
    pub s: f64,
    /// Bond squeezing: 'inf' or a value of r.
    #[arg(long, default_value = "inf")]
    pub bond: String,
    /// Allow rings larger than 64 sites.
    #[arg(long)]
    pub allow_large: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the three-mode building block.
    Block {
        #[arg(long)]
        x: f64,
        #[arg(long)]
        s: f64,
    },
    /// Print the covariance matrix of the ring state.
    Build(RingArgs),
    /// Entanglement per separation class of a ring state.
    Distribution {
        /// Analyse this covariance matrix (matrix-text) instead of building a ring.
        #[arg(long, conflicts_with_all = ["x", "s"])]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 6)]
        n: usize,
        #[arg(long)]
        x: Option<f64>,
        #[arg(long)]
        s: Option<f64>,
        #[arg(long, default_value = "inf")]
        bond: String,
        /// Decision tolerance: entangled iff eta < 1 - tol.
        #[arg(long, default_value_t = DECISION_TOL)]
        tol: f64,
        #[arg(long)]
        allow_large: bool,
    },
    /// Entanglement thresholds s_k over a grid of x.
    Thresholds {
        #[arg(long, default_value_t = 6)]
        n: usize,
        #[arg(long, default_value = "inf")]
        bond: String,
        /// Separations, e.g. "1,2,3".
        #[arg(long, default_value = "1,2,3")]
        k: String,
        /// x values: "1.5,2,3" or "lo:hi:count".
        #[arg(long)]
        x: String,
        /// Bisection width in s.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long)]
        allow_large: bool,
    },
    /// Entanglement of formation over a grid of (x, d = s - s_min).
    ScanEof {
        #[arg(long, default_value_t = 6)]
        n: usize,
        #[arg(long)]
        x: String,
        #[arg(long)]
        d: String,
        #[arg(long, default_value = "inf")]
        bond: String,
        #[arg(long)]
        allow_large: bool,
    },
    /// Potential matrix V = C^2 of the parent Hamiltonian.
    Hamiltonian(RingArgs),
    /// Closed-form s -> infinity ring state.
    Longrange {
        #[arg(long, default_value_t = 6)]
        n: usize,
        #[arg(long)]
        x: f64,
        #[arg(long)]
        allow_large: bool,
    },
}

/// Runs the CLI and returns the process exit code: 0 on success, 2 on
/// invalid input, 3 on numerical failure.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{}", e.render());
                    return 0;
                }
                _ => 2,
            };
            let _ = write!(stderr, "{}", e.render());
            return code;
        }
    };
    match execute(&cli, stderr) {
        Ok(out) => {
            let body = if cli.header {
                format!("# {}\n{}", out.meta, out.body)
            } else {
                out.body
            };
            let written = match &cli.output {
                Some(path) => std::fs::write(path, body.as_bytes()).map_err(Error::from),
                None => stdout.write_all(body.as_bytes()).map_err(Error::from),
            };
            if let Err(e) = written {
                let _ = writeln!(stderr, "error: {e}");
                return 2;
            }
            for note in &out.failures {
                let _ = writeln!(stderr, "error: {note}");
            }
            if out.failures.is_empty() {
                0
            } else {
                3
            }
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    if e.is_validation() {
        2
    } else {
        3
    }
}

struct Output {
    meta: String,
    body: String,
    /// Numerical failures that did not stop the output (exit code 3).
    failures: Vec<String>,
}

impl Output {
    fn ok(meta: String, body: String) -> Self {
        Output { meta, body, failures: Vec::new() }
    }
}

/// `%.12g`-style formatting: 12 significant digits, trailing zeros trimmed.
pub fn fmt_num(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let sci = format!("{:.11e}", v);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(format!("{:.*}", decimals, v))
    } else {
        format!("{}e{}", trim_zeros(mantissa.to_string()), exp)
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// Comma-separated values, or `lo:hi:count` for an inclusive linear grid.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let bad = || Error::Parse(format!("bad grid '{text}'"));
    let parts: Vec<&str> = text.split(':').collect();
    let values = match parts.as_slice() {
        [lo, hi, count] => {
            let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
            let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
            let count: usize = count.trim().parse().map_err(|_| bad())?;
            match count {
                0 => return Err(bad()),
                1 => vec![lo],
                _ => (0..count)
                    .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
                    .collect(),
            }
        }
        [_] => text
            .split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<Vec<_>>>()?,
        _ => return Err(bad()),
    };
    if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
        return Err(bad());
    }
    Ok(values)
}

fn parse_list(text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad integer list '{text}'")))
        })
        .collect()
}

fn check_sites(n: usize, allow_large: bool) -> Result<()> {
    if n < 3 {
        return Err(Error::InvalidArgument(format!("a ring needs at least 3 sites, got {n}")));
    }
    if n > MAX_SITES && !allow_large {
        return Err(Error::InvalidArgument(format!(
            "n = {n} exceeds {MAX_SITES}; pass --allow-large to proceed"
        )));
    }
    Ok(())
}

fn ring_spec(n: usize, x: f64, s: f64, bond: &str, allow_large: bool) -> Result<RingSpec> {
    check_sites(n, allow_large)?;
    let block = BuildingBlockParams::new(s, x)?;
    RingSpec::new(n, block, bond.parse()?)
}

fn cm_output(cm: &SymMatrix, format: Option<Format>) -> String {
    match format.unwrap_or(Format::MatrixText) {
        Format::MatrixText => format_matrix_text(cm),
        Format::Csv => {
            let n = cm.dim() / 2;
            let mut out = String::new();
            let names: Vec<String> = (0..n)
                .map(|i| format!("q{i}"))
                .chain((0..n).map(|i| format!("p{i}")))
                .collect();
            let _ = writeln!(out, "{}", names.join(","));
            for i in 0..cm.dim() {
                let row: Vec<String> = (0..cm.dim()).map(|j| fmt_num(cm[(i, j)])).collect();
                let _ = writeln!(out, "{}", row.join(","));
            }
            out
        }
    }
}

fn table_only(format: Option<Format>) -> Result<()> {
    if format == Some(Format::MatrixText) {
        return Err(Error::InvalidArgument("this command only writes CSV".into()));
    }
    Ok(())
}

fn execute(cli: &Cli, stderr: &mut dyn Write) -> Result<Output> {
    match &cli.command {
        Command::Block { x, s } => {
            let p = BuildingBlockParams::new(*s, *x)?;
            let g = building_block(&p);
            let _ = writeln!(stderr, "det = {:.6}", g.determinant());
            Ok(Output::ok(
                format!("gmps block x={x} s={s}"),
                cm_output(g.cm(), cli.format),
            ))
        }
        Command::Build(a) => {
            let spec = ring_spec(a.n, a.x, a.s, &a.bond, a.allow_large)?;
            let g = build_mps(&spec)?;
            let _ = writeln!(stderr, "det = {:.6}", g.determinant());
            Ok(Output::ok(
                format!("gmps build n={} x={} s={} bond={}", a.n, a.x, a.s, spec.bond),
                cm_output(g.cm(), cli.format),
            ))
        }
        Command::Distribution { input, n, x, s, bond, tol, allow_large } => {
            table_only(cli.format)?;
            let (state, meta) = match input {
                Some(path) => {
                    let text = std::fs::read_to_string(path)?;
                    let g = GaussianState::new(parse_matrix_text(&text)?)?;
                    (g, format!("gmps distribution input={}", path.display()))
                }
                None => {
                    let (x, s) = match (x, s) {
                        (Some(x), Some(s)) => (*x, *s),
                        _ => {
                            return Err(Error::InvalidArgument(
                                "distribution needs --x and --s, or --input".into(),
                            ))
                        }
                    };
                    let spec = ring_spec(*n, x, s, bond, *allow_large)?;
                    (
                        build_mps(&spec)?,
                        format!("gmps distribution n={n} x={x} s={s} bond={}", spec.bond),
                    )
                }
            };
            let records = distribution_with(&state, *tol)?;
            let mut body = String::from("separation,eta,eof,entangled\n");
            for r in by_separation(&records) {
                let _ = writeln!(
                    body,
                    "{},{},{},{}",
                    r.separation,
                    fmt_num(r.eta),
                    fmt_num(r.eof),
                    r.entangled
                );
            }
            Ok(Output::ok(meta, body))
        }
        Command::Thresholds { n, bond, k, x, tol, allow_large } => {
            table_only(cli.format)?;
            check_sites(*n, *allow_large)?;
            let bond: BondSpec = bond.parse()?;
            let ks = parse_list(k)?;
            let xs = parse_grid(x)?;
            if let Some(bad) = xs.iter().find(|&&v| !(v > 1.0)) {
                return Err(Error::Unphysical(format!("thresholds need x > 1, got {bad}")));
            }
            let opts = ThresholdOptions { width: *tol, ..ThresholdOptions::default() };
            let jobs: Vec<(usize, f64)> = ks.iter().flat_map(|&k| xs.iter().map(move |&x| (k, x))).collect();
            let results: Vec<Result<_>> = jobs
                .par_iter()
                .map(|&(k, x)| threshold_with(k, x, *n, bond, opts))
                .collect();
            let mut body = String::from("k,x,s_k\n");
            let mut failures = Vec::new();
            for (&(k, x), res) in jobs.iter().zip(results) {
                match res {
                    Ok(t) => {
                        let _ = writeln!(body, "{k},{},{}", fmt_num(x), fmt_num(t.s_k));
                    }
                    Err(e @ Error::NoThreshold { .. }) => {
                        let _ = writeln!(body, "{k},{},", fmt_num(x));
                        failures.push(e.to_string());
                    }
                    Err(e) => return Err(e),
                }
            }
            Ok(Output {
                meta: format!("gmps thresholds n={n} bond={bond} k={k} x={x}"),
                body,
                failures,
            })
        }
        Command::ScanEof { n, x, d, bond, allow_large } => {
            table_only(cli.format)?;
            check_sites(*n, *allow_large)?;
            let bond_spec: BondSpec = bond.parse()?;
            let xs = parse_grid(x)?;
            let ds = parse_grid(d)?;
            if let Some(bad) = ds.iter().find(|&&v| v < 0.0) {
                return Err(Error::InvalidArgument(format!("d must be nonnegative, got {bad}")));
            }
            let jobs: Vec<(f64, f64)> = xs.iter().flat_map(|&x| ds.iter().map(move |&d| (x, d))).collect();
            let rows: Vec<Result<String>> = jobs
                .par_iter()
                .map(|&(x, d)| {
                    let s = BuildingBlockParams::s_min(x) + d;
                    let spec = RingSpec::new(*n, BuildingBlockParams::new(s, x)?, bond_spec)?;
                    let records = distribution_with(&build_mps(&spec)?, DECISION_TOL)?;
                    let mut out = String::new();
                    for r in by_separation(&records) {
                        let _ = writeln!(out, "{},{},{},{}", fmt_num(x), fmt_num(d), r.separation, fmt_num(r.eof));
                    }
                    Ok(out)
                })
                .collect();
            let mut body = String::from("x,d,k,eof\n");
            for row in rows {
                body.push_str(&row?);
            }
            Ok(Output::ok(
                format!("gmps scan-eof n={n} bond={bond_spec} x={x} d={d}"),
                body,
            ))
        }
        Command::Hamiltonian(a) => {
            table_only(cli.format)?;
            let spec = ring_spec(a.n, a.x, a.s, &a.bond, a.allow_large)?;
            let g = build_mps(&spec)?;
            let v = potential_matrix(&extract_circulant(&g)?);
            let verified = ground_state_cm(&v)?.cm().max_abs_diff(g.cm()) < HAMILTONIAN_TOL;
            let n = v.dim();
            let mut body = String::from("row");
            for j in 0..n {
                let _ = write!(body, ",v{j}");
            }
            body.push_str(",verified\n");
            for i in 0..n {
                let _ = write!(body, "{i}");
                for j in 0..n {
                    let _ = write!(body, ",{}", fmt_num(v[(i, j)]));
                }
                let _ = writeln!(body, ",{verified}");
            }
            Ok(Output::ok(
                format!("gmps hamiltonian n={} x={} s={} bond={}", a.n, a.x, a.s, spec.bond),
                body,
            ))
        }
        Command::Longrange { n, x, allow_large } => {
            check_sites(*n, *allow_large)?;
            let g = long_range_cm(*n, *x)?;
            let mu = local_purity(&g, 0)?;
            let _ = writeln!(stderr, "mu_loc = {}", fmt_num(mu));
            Ok(Output::ok(
                format!("gmps longrange n={n} x={x} mu_loc={}", fmt_num(mu)),
                cm_output(g.cm(), cli.format),
            ))
        }
    }
}
