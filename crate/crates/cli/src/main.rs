//! `cfdim`: certified Hausdorff dimension bounds from the command line.
//!
//! Results are written as JSON (or CSV for eigenfunction dumps) to stdout or
//! to `--out`. Exit status is 0 on success, 1 when the solver fails and 2 on
//! invalid usage.

mod sets;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use cfdim::assembly::{assemble, Correction, OperatorSpec, SparseRowMatrix};
use cfdim::higher_order::TensorSpace;
use cfdim::solver::{bracket_dimension, radius_bounds_on, solve_uncorrected, DimensionBracket, SolveConfig};
use cfdim::spectral::power_method;
use cfdim::tail::{delta_upper, eta_lower};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::sets::SetSpec;

#[derive(Parser, Debug)]
#[command(name = "cfdim", version, about = "Certified Hausdorff dimension bounds for complex continued-fraction sets")]
struct Cli {
    /// Worker threads for assembly and matrix products (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Certified bracket [s_lower, s_upper] around the dimension.
    Dimension(DimensionArgs),
    /// Spectral radii of the lower and upper matrices at one s.
    Radius(RadiusArgs),
    /// Tail bounds delta and eta for I1 or I2.
    Tail(TailArgs),
    /// Uncorrected higher-order estimate of the dimension.
    HigherOrder(HigherOrderArgs),
    /// CSV of the positive eigenvector (x, y, v) at one s.
    DumpEigenfunction(EigenArgs),
    /// Re-check the certificates stored in a `dimension` JSON result.
    VerifyFrom(VerifyArgs),
}

#[derive(Args, Debug)]
struct MeshArgs {
    /// I1, I2, I3, special, or custom:<file> with one "re,im" pair per line.
    #[arg(long)]
    set: SetSpec,
    /// Mesh resolution N (even); h = 1/N.
    #[arg(long, conflicts_with = "h")]
    n: Option<i64>,
    /// Mesh width; must be the reciprocal of an even integer.
    #[arg(long)]
    h: Option<f64>,
    /// Truncation radius for I1 and I2.
    #[arg(long = "r", default_value_t = 100.0)]
    radius: f64,
    #[arg(long, default_value_t = 1e-10)]
    tol_eig: f64,
    #[arg(long, default_value_t = 1e-5)]
    tol_root: f64,
    /// Output file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct DimensionArgs {
    #[command(flatten)]
    mesh: MeshArgs,
    /// Write the certified matrices as `<prefix>_A.txt` and `<prefix>_B.txt`.
    #[arg(long, value_name = "PREFIX")]
    dump_matrix: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct RadiusArgs {
    #[command(flatten)]
    mesh: MeshArgs,
    #[arg(long)]
    s: f64,
    /// Write `A_s` and `B_s` as `<prefix>_A.txt` and `<prefix>_B.txt`.
    #[arg(long, value_name = "PREFIX")]
    dump_matrix: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct TailArgs {
    #[arg(long)]
    set: SetSpec,
    #[arg(long)]
    s: f64,
    #[arg(long = "r", default_value_t = 100.0)]
    radius: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct HigherOrderArgs {
    #[command(flatten)]
    mesh: MeshArgs,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=4))]
    degree: u32,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Side {
    Lower,
    Upper,
    Plain,
}

#[derive(Args, Debug)]
struct EigenArgs {
    #[command(flatten)]
    mesh: MeshArgs,
    #[arg(long)]
    s: f64,
    /// Which matrix to take the eigenvector of.
    #[arg(long, value_enum, default_value_t = Side::Upper)]
    matrix: Side,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// JSON written by `cfdim dimension`.
    path: PathBuf,
    /// Relative slack for diagnostics; certified claims use 0.
    #[arg(long, default_value_t = 0.0)]
    slack: f64,
}

enum Failure {
    Usage(String),
    Solver(String),
}

impl From<cfdim::Error> for Failure {
    fn from(e: cfdim::Error) -> Self {
        Failure::Solver(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Solver(format!("i/o error: {e}"))
    }
}

type CmdResult = Result<(), Failure>;

/// Rounds to 15 significant digits for display.
fn sig15(x: f64) -> f64 {
    if x.is_finite() {
        format!("{x:.14e}").parse().unwrap_or(x)
    } else {
        x
    }
}

fn resolution(mesh: &MeshArgs) -> Result<i64, Failure> {
    let n = match (mesh.n, mesh.h) {
        (Some(n), _) => n,
        (None, Some(h)) => {
            if !(h > 0.0 && h.is_finite()) {
                return Err(Failure::Usage(format!("--h {h} must be positive")));
            }
            let n = (1.0 / h).round();
            if (n * h - 1.0).abs() > 1e-3 {
                return Err(Failure::Usage(format!("--h {h} is not the reciprocal of an integer")));
            }
            n as i64
        }
        (None, None) => 50,
    };
    if n < 2 || n % 2 != 0 {
        return Err(Failure::Usage(format!("mesh resolution N = {n} must be even and >= 2")));
    }
    Ok(n)
}

fn solve_config(mesh: &MeshArgs) -> Result<SolveConfig, Failure> {
    let n = resolution(mesh)?;
    let alphabet = mesh.set.alphabet().map_err(Failure::Usage)?;
    let radius = if alphabet.is_finite() { f64::INFINITY } else { mesh.radius };
    let mut cfg = SolveConfig::new(alphabet, n, radius);
    cfg.tol_eig = mesh.tol_eig;
    cfg.tol_root = mesh.tol_root;
    Ok(cfg)
}

fn open_output(out: &Option<PathBuf>) -> io::Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json(out: &Option<PathBuf>, value: &impl serde::Serialize) -> CmdResult {
    let mut w = open_output(out)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| Failure::Solver(e.to_string()))?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn dump_matrix(path: &Path, m: &SparseRowMatrix) -> io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for (i, j, v) in m.triplets() {
        writeln!(w, "{i} {j} {v:e}")?;
    }
    w.flush()
}

fn dump_pair(prefix: &Path, a: &SparseRowMatrix, b: &SparseRowMatrix) -> io::Result<()> {
    let with = |suffix: &str| {
        let mut name = prefix.as_os_str().to_owned();
        name.push(suffix);
        PathBuf::from(name)
    };
    dump_matrix(&with("_A.txt"), a)?;
    dump_matrix(&with("_B.txt"), b)
}

fn require_mobius(set: &SetSpec, command: &str) -> CmdResult {
    if set.is_special() {
        return Err(Failure::Usage(format!(
            "the special example has no error-corrected matrices; use `higher-order` instead of `{command}`"
        )));
    }
    Ok(())
}

fn cmd_dimension(args: &DimensionArgs) -> CmdResult {
    require_mobius(&args.mesh.set, "dimension")?;
    let cfg = solve_config(&args.mesh)?;
    let bracket = bracket_dimension(&cfg)?;
    if let Some(prefix) = &args.dump_matrix {
        let (a, b) = bracket.matrices()?;
        dump_pair(prefix, &a, &b)?;
    }
    eprintln!(
        "{}: [{:.15}, {:.15}] (h = {:.15}, dof = {})",
        bracket.set,
        bracket.s_lower,
        bracket.s_upper,
        bracket.h,
        bracket.dof
    );
    // Full precision so the stored certificates re-verify exactly.
    write_json(&args.mesh.out, &bracket)
}

fn cmd_radius(args: &RadiusArgs) -> CmdResult {
    require_mobius(&args.mesh.set, "radius")?;
    let cfg = solve_config(&args.mesh)?;
    if !(args.s > cfg.s_floor()) {
        return Err(Failure::Usage(format!("--s must exceed {}", cfg.s_floor())));
    }
    let mesh = cfg.mesh()?;
    let rb = radius_bounds_on(&cfg, &mesh, args.s)?;
    if let Some(prefix) = &args.dump_matrix {
        let spec = |alpha, c| OperatorSpec::new(cfg.alphabet.clone(), args.s, cfg.radius, alpha, c);
        let a = assemble(&mesh, &spec(rb.alpha_lower, Correction::Lower))?;
        let b = assemble(&mesh, &spec(rb.alpha_upper, Correction::Upper))?;
        dump_pair(prefix, &a, &b)?;
    }
    let value = json!({
        "set": cfg.alphabet.label(),
        "n": cfg.n,
        "h": sig15(mesh.h()),
        "R": cfg.radius.is_finite().then_some(cfg.radius),
        "s": sig15(args.s),
        "r_lower": sig15(rb.r_lower()),
        "r_upper": sig15(rb.r_upper()),
        "cw_lower": [sig15(rb.lower.cw_lower), sig15(rb.lower.cw_upper)],
        "cw_upper": [sig15(rb.upper.cw_lower), sig15(rb.upper.cw_upper)],
        "alpha_lower": sig15(rb.alpha_lower),
        "alpha_upper": sig15(rb.alpha_upper),
        "dof": mesh.len(),
    });
    write_json(&args.mesh.out, &value)
}

fn cmd_tail(args: &TailArgs) -> CmdResult {
    let set = args
        .set
        .infinite_set()
        .ok_or_else(|| Failure::Usage("tail bounds apply to I1 and I2 only".into()))?;
    let delta = delta_upper(set, args.s, args.radius).map_err(|e| Failure::Usage(e.to_string()))?;
    let eta = eta_lower(set, args.s, args.radius).map_err(|e| Failure::Usage(e.to_string()))?;
    let value = json!({
        "set": set.name(),
        "s": sig15(args.s),
        "R": sig15(args.radius),
        "delta": sig15(delta),
        "eta": sig15(eta),
    });
    write_json(&args.out, &value)
}

fn cmd_higher_order(args: &HigherOrderArgs) -> CmdResult {
    let start = Instant::now();
    let mut cfg = solve_config(&args.mesh)?;
    if args.mesh.set.is_special() {
        cfg.s_init = (0.95, 1.05);
    }
    let weights = args.mesh.set.weights();
    let s_hat = solve_uncorrected(&cfg, args.degree, weights)?;
    let dof = TensorSpace::new(&cfg.mesh()?, args.degree)?.len();
    let value = json!({
        "set": args.mesh.set.to_string(),
        "degree": args.degree,
        "n": cfg.n,
        "h": sig15(1.0 / cfg.n as f64),
        "dof": dof,
        "s": sig15(s_hat),
        "runtime_s": sig15(start.elapsed().as_secs_f64()),
    });
    write_json(&args.mesh.out, &value)
}

fn cmd_dump_eigenfunction(args: &EigenArgs) -> CmdResult {
    let cfg = solve_config(&args.mesh)?;
    if !(args.s > cfg.s_floor()) {
        return Err(Failure::Usage(format!("--s must exceed {}", cfg.s_floor())));
    }
    let mesh = cfg.mesh()?;
    let (eta, delta) = cfg.alphas(args.s)?;
    let (alpha, correction) = match args.matrix {
        Side::Lower => (eta, Correction::Lower),
        Side::Upper => (delta, Correction::Upper),
        Side::Plain => (0.0, Correction::None),
    };
    let mut spec = OperatorSpec::new(cfg.alphabet.clone(), args.s, cfg.radius, alpha, correction);
    spec.weights = args.mesh.set.weights();
    if args.mesh.set.is_special() && correction != Correction::None {
        return Err(Failure::Usage("the special example only supports --matrix plain".into()));
    }
    let m = assemble(&mesh, &spec)?;
    let r = power_method(&m, cfg.tol_eig, cfdim::spectral::DEFAULT_MAX_ITER)?;
    let mut w = open_output(&args.mesh.out)?;
    writeln!(w, "x,y,v")?;
    for ((x, y), v) in mesh.points().iter_coords().zip(&r.vector) {
        writeln!(w, "{},{},{}", sig15(x), sig15(y), sig15(*v))?;
    }
    w.flush()?;
    eprintln!("eigenvalue {:.15} (dof = {})", r.lambda, mesh.len());
    Ok(())
}

fn cmd_verify_from(args: &VerifyArgs) -> CmdResult {
    let text = std::fs::read_to_string(&args.path)
        .map_err(|e| Failure::Usage(format!("{}: {e}", args.path.display())))?;
    let bracket: DimensionBracket =
        serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("invalid bracket JSON: {e}")))?;
    let (lower_ok, upper_ok) = bracket.verify_with_slack(args.slack)?;
    let value: Value = json!({
        "set": bracket.set,
        "s_lower": bracket.s_lower,
        "s_upper": bracket.s_upper,
        "lower_certificate": lower_ok,
        "upper_certificate": upper_ok,
    });
    write_json(&None, &value)?;
    if lower_ok && upper_ok {
        Ok(())
    } else {
        Err(Failure::Solver("stored certificate does not verify".into()))
    }
}

fn run(cli: &Cli) -> CmdResult {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(Failure::Usage("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Failure::Solver(e.to_string()))?;
    }
    match &cli.command {
        Command::Dimension(a) => cmd_dimension(a),
        Command::Radius(a) => cmd_radius(a),
        Command::Tail(a) => cmd_tail(a),
        Command::HigherOrder(a) => cmd_higher_order(a),
        Command::DumpEigenfunction(a) => cmd_dump_eigenfunction(a),
        Command::VerifyFrom(a) => cmd_verify_from(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Solver(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
