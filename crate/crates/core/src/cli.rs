//! Command-line driver. Exit codes: 0 when every case passes, 1 on a
//! verification failure, 2 on usage or configuration errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::integrate::build_sphere_rule;
use crate::kernels::{calibrate_c, monogenic_kernel, zonal_harmonic, CalibrationStore};
use crate::poisson::{residual_dk, solve_on_stencil, solve_poisson, BumpSource, PoissonSolver, QuadSpec, Stencil};
use crate::spaces::dims;
use crate::verify::{run_suite, Suite};

pub const SCHEMA: u32 = 1;

#[derive(Debug, Parser)]
#[command(name = "cliffpde", version, about = "Operator calculus for bosonic Laplacians")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run exact verification suites.
    Verify(VerifyArgs),
    /// Print dimensions of H_k, M_k and M_{k-1}.
    Dims(DimsArgs),
    /// Emit a reproducing kernel or calibrate the fundamental-solution constant.
    Kernel(KernelArgs),
    /// Solve the Poisson problem for a bump source.
    Poisson(PoissonArgs),
    /// Emit a sphere quadrature rule.
    Rule(RuleArgs),
}

#[derive(Debug, clap::Args)]
pub struct VerifyArgs {
    /// green-scalar, green-clifford, self-adjoint, stokes, connection, maxwell or all
    #[arg(long, default_value = "all")]
    pub suite: String,
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Cases per suite (defaults depend on the suite).
    #[arg(long)]
    pub cases: Option<usize>,
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
pub struct DimsArgs {
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub k: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Emit {
    Zk,
    Zk1,
}

#[derive(Debug, clap::Args)]
pub struct KernelArgs {
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub k: usize,
    #[arg(long, value_enum)]
    pub emit: Option<Emit>,
    /// Calibrate the constant of H_k and store it.
    #[arg(long)]
    pub calibrate: bool,
    #[arg(long, default_value = "calibration.json")]
    pub calibration: PathBuf,
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
pub struct PoissonArgs {
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub k: usize,
    /// "c1,...,cm;R;s"
    #[arg(long, allow_hyphen_values = true)]
    pub bump: String,
    /// "i:c,..." coordinates over the harmonic basis
    #[arg(long, default_value = "0:1", allow_hyphen_values = true)]
    pub upart: String,
    /// JSON array of points, or one point per line
    #[arg(long)]
    pub points: Option<PathBuf>,
    #[arg(long)]
    pub json: Option<PathBuf>,
    #[arg(long, default_value = "calibration.json")]
    pub calibration: PathBuf,
    /// Use this constant instead of the calibration store.
    #[arg(long, allow_negative_numbers = true)]
    pub c: Option<f64>,
    #[arg(long, default_value_t = 24)]
    pub direction_degree: usize,
    /// Central-difference step of the residual check.
    #[arg(long, default_value_t = 0.05)]
    pub check_step: f64,
}

#[derive(Debug, clap::Args)]
pub struct RuleArgs {
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub degree: usize,
    #[arg(long)]
    pub json: Option<PathBuf>,
}

/// Write through a temporary file in the same directory, then rename.
pub fn write_atomic(path: &Path, text: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(&dir)?;
    tmp.write_all(text.as_bytes())?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| Error::Io(e.to_string()))?;
    Ok(())
}

fn timestamp() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

fn envelope(command: &str, pass: bool, body: Value) -> Value {
    let mut out = json!({
        "schema": SCHEMA,
        "command": command,
        "timestamp": timestamp(),
        "pass": pass,
    });
    if let (Some(o), Value::Object(b)) = (out.as_object_mut(), body) {
        o.extend(b);
    }
    out
}

fn emit(value: &Value, path: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    if let Some(p) = path {
        write_atomic(p, &text)?;
    }
    // a closed stdout (e.g. piped into `head`) is not an error
    let _ = writeln!(std::io::stdout().lock(), "{text}");
    Ok(())
}

fn check_m(m: usize) -> Result<()> {
    crate::clifford::check_dim(m)?;
    if m < 3 {
        return Err(Error::Config(format!("m must be at least 3, got {m}")));
    }
    Ok(())
}

fn is_usage_error(e: &Error) -> bool {
    matches!(
        e,
        Error::Config(_)
            | Error::Parse(_)
            | Error::Degenerate { .. }
            | Error::DimensionTooLarge(..)
            | Error::DimensionMismatch(..)
            | Error::IndexOutOfRange { .. }
            | Error::Uncalibrated { .. }
            | Error::Io(_)
    )
}

fn configure_threads() {
    if let Some(n) = std::env::var("CLIFFPDE_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // an already-initialized pool keeps its size
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

/// Parse `argv` (including the program name) and run; returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    configure_threads();
    match dispatch(&cli.command) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            if is_usage_error(&e) {
                2
            } else {
                1
            }
        }
    }
}

fn dispatch(cmd: &Command) -> Result<bool> {
    match cmd {
        Command::Verify(a) => verify(a),
        Command::Dims(a) => {
            check_m(a.m)?;
            let d = dims(a.m, a.k)?;
            let mut v = serde_json::to_value(d)?;
            if let Some(o) = v.as_object_mut() {
                o.insert("schema".into(), json!(SCHEMA));
            }
            let _ = writeln!(std::io::stdout().lock(), "{}", serde_json::to_string(&v)?);
            Ok(true)
        }
        Command::Kernel(a) => kernel(a),
        Command::Poisson(a) => poisson(a),
        Command::Rule(a) => {
            check_m(a.m)?;
            let rule = build_sphere_rule(a.m, a.degree)?;
            let body = json!({ "rule": serde_json::to_value(&rule)? });
            emit(&envelope("rule", true, body), a.json.as_deref())?;
            Ok(true)
        }
    }
}

fn verify(a: &VerifyArgs) -> Result<bool> {
    check_m(a.m)?;
    let suites: Vec<Suite> = if a.suite == "all" {
        Suite::ALL.to_vec()
    } else {
        vec![Suite::parse(&a.suite).ok_or_else(|| Error::Config(format!("unknown suite {:?}", a.suite)))?]
    };
    let mut reports = Vec::new();
    for s in suites {
        let cases = a.cases.unwrap_or_else(|| s.default_cases());
        reports.push(run_suite(s, a.m, a.k, a.seed, cases)?);
    }
    let pass = reports.iter().all(|r| r.pass());
    for r in &reports {
        let failed = r.cases.iter().filter(|c| !c.pass).count();
        eprintln!(
            "{:<15} m={} k={} cases={} {}",
            r.suite,
            r.m,
            r.k,
            r.cases.len(),
            if failed == 0 { "PASS".to_string() } else { format!("FAIL ({failed})") }
        );
    }
    let body = json!({
        "m": a.m,
        "k": a.k,
        "seed": a.seed,
        "reports": reports.iter().map(|r| r.to_json()).collect::<Vec<_>>(),
    });
    emit(&envelope("verify", pass, body), a.json.as_deref())?;
    Ok(pass)
}

fn kernel(a: &KernelArgs) -> Result<bool> {
    check_m(a.m)?;
    if a.emit.is_none() && !a.calibrate {
        return Err(Error::Config("nothing to do: pass --emit and/or --calibrate".into()));
    }
    let mut body = serde_json::Map::new();
    if let Some(e) = a.emit {
        let kern = match e {
            Emit::Zk => zonal_harmonic(a.m, a.k)?,
            Emit::Zk1 => monogenic_kernel(a.m, a.k)?,
        };
        body.insert("kernel".into(), serde_json::to_value(kern.to_json())?);
    }
    if a.calibrate {
        let entry = calibrate_c(a.m, a.k)?;
        let mut store = CalibrationStore::load(&a.calibration)?;
        store.insert(a.m, a.k, entry.clone());
        store.save(&a.calibration)?;
        body.insert("calibration".into(), serde_json::to_value(entry)?);
    }
    emit(&envelope("kernel", true, Value::Object(body)), a.json.as_deref())?;
    Ok(true)
}

fn read_points(path: &Path, m: usize) -> Result<Vec<Vec<f64>>> {
    let text = std::fs::read_to_string(path)?;
    let pts: Vec<Vec<f64>> = match serde_json::from_str(&text) {
        Ok(p) => p,
        Err(_) => text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| {
                l.split(|c: char| c == ',' || c.is_whitespace())
                    .filter(|t| !t.is_empty())
                    .map(|t| t.parse::<f64>().map_err(|e| Error::Parse(format!("{t:?}: {e}"))))
                    .collect()
            })
            .collect::<Result<_>>()?,
    };
    if let Some(p) = pts.iter().find(|p| p.len() != m) {
        return Err(Error::DimensionMismatch(p.len(), m));
    }
    Ok(pts)
}

fn poisson(a: &PoissonArgs) -> Result<bool> {
    check_m(a.m)?;
    let source = BumpSource::parse(a.m, a.k, &a.bump, &a.upart)?;
    let c = match a.c {
        Some(c) => c,
        None => CalibrationStore::load(&a.calibration)?.get(a.m, a.k)?,
    };
    let points = match &a.points {
        Some(p) => read_points(p, a.m)?,
        None => {
            let mut pts = vec![source.center.clone()];
            for r in [0.25, 0.5, 1.5, 3.0] {
                let mut y = source.center.clone();
                y[0] += r * source.radius;
                pts.push(y);
            }
            pts
        }
    };
    let quad = QuadSpec {
        direction_degree: a.direction_degree,
        ..QuadSpec::default()
    };
    let solver = PoissonSolver::new(source.clone(), c, quad)?;
    let mut field = solve_poisson(&solver, &points)?;
    let centers: Vec<Vec<f64>> = points
        .iter()
        .filter(|y| source.contains(y) && source.seam_distance(y) >= 0.2)
        .cloned()
        .collect();
    let mut pass = true;
    if !centers.is_empty() {
        let stencil = Stencil {
            centers,
            h: a.check_step,
        };
        let sfield = solve_on_stencil(&solver, &stencil)?;
        let res = residual_dk(&sfield, &source, a.check_step)?;
        pass = res.relative <= 0.05;
        field.residual = Some(res);
    }
    let body = json!({ "c": c, "field": serde_json::to_value(&field)? });
    emit(&envelope("poisson", pass, body), a.json.as_deref())?;
    Ok(pass)
}
