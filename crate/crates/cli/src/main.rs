use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use benson_core::benson::{BensonOptions, Selection};
use benson_core::convexprog::{Mode, ProblemInstance};
use benson_core::geometry::Polyhedron;
use benson_core::instances::{
    exact_projection, gen_random_polytope_cpp, generate, reference_upper_image, ExampleName,
};
use benson_core::metrics::{
    hausdorff_nested, hausdorff_sampled, hausdorff_upper_images, DistanceReport,
};
use benson_core::projection::{approximate_body, Algorithm, ApproxResult, Kind};
use benson_core::verify::{verify_all, CheckRow};
use benson_core::Error;
use clap::{Args, Parser, Subcommand};
use serde_json::Value;

/// Polyhedral inner and outer approximation of convex projections.
#[derive(Parser)]
#[command(name = "benson", version)]
struct Cli {
    /// Write log output to this file instead of standard error.
    #[arg(long, global = true)]
    log: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Approximate the body of an instance file.
    Approx(ApproxArgs),
    /// Hausdorff distance between two nested polyhedra.
    Hausdorff(HausdorffArgs),
    /// Write one of the built-in example instances.
    Example(ExampleArgs),
    /// Re-run the built-in examples and compare with their expectations.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct ApproxArgs {
    #[arg(long)]
    algorithm: Algorithm,
    #[arg(long)]
    eps: f64,
    #[arg(long)]
    input: PathBuf,
    /// Result JSON; standard output when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, default_value = "fifo")]
    selection: Selection,
}

#[derive(Args)]
struct HausdorffArgs {
    /// Polyhedron (or approx result) JSON of the smaller set.
    inner: PathBuf,
    /// Polyhedron (or approx result) JSON of the larger set.
    outer: PathBuf,
    /// Also report a sampled lower bound from this many points.
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct ExampleArgs {
    /// primal-mocp, primal-cpp, dual-cpp, dual-mocp or random.
    #[arg(long)]
    name: String,
    #[arg(long)]
    q: usize,
    #[arg(long)]
    eps: Option<f64>,
    /// Seed for `random`.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Instance JSON; expectations go next to it as `<stem>.expect.json`.
    /// Both are printed to standard output when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Only this q; both 2 and 3 by default.
    #[arg(long)]
    q: Option<usize>,
    #[arg(long, default_value = "lexmin")]
    selection: Selection,
    #[arg(long, default_value_t = 1e-9, hide = true)]
    tie_tol: f64,
}

/// Failure classes and their exit codes.
enum Failure {
    Input(anyhow::Error),
    Solver(anyhow::Error),
    NotNested(anyhow::Error),
    Check,
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Check => 1,
            Failure::Input(_) => 2,
            Failure::Solver(_) => 3,
            Failure::NotNested(_) => 4,
        }
    }
}

fn solver(e: Error) -> Failure {
    match e {
        Error::NotNested { .. } => Failure::NotNested(e.into()),
        Error::InvalidInput(_) => Failure::Input(e.into()),
        _ => Failure::Solver(e.into()),
    }
}

fn input<E: Into<anyhow::Error>>(e: E) -> Failure {
    Failure::Input(e.into())
}

/// Rounds every float to 12 significant digits.
fn round_numbers(v: &mut Value) {
    match v {
        Value::Number(n) if !(n.is_i64() || n.is_u64()) => {
            if let Some(x) = n.as_f64() {
                let r: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
                let r = if r == 0.0 { 0.0 } else { r };
                if let Some(m) = serde_json::Number::from_f64(r) {
                    *n = m;
                }
            }
        }
        Value::Array(a) => a.iter_mut().for_each(round_numbers),
        Value::Object(o) => o.values_mut().for_each(round_numbers),
        _ => {}
    }
}

fn to_rounded_json<T: serde::Serialize>(value: &T) -> String {
    let mut v = serde_json::to_value(value).expect("serializable");
    round_numbers(&mut v);
    serde_json::to_string_pretty(&v).expect("serializable")
}

fn fmt12(x: f64) -> String {
    let r: f64 = format!("{x:.11e}").parse().unwrap_or(x);
    format!("{r}")
}

fn emit(output: Option<&Path>, text: &str) -> Result<(), Failure> {
    match output {
        Some(p) => fs::write(p, format!("{text}\n"))
            .with_context(|| format!("writing {}", p.display()))
            .map_err(input),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(input)
}

/// Distance from the result to the exact upper image or body, when the
/// instance is polyhedral.
fn reference_distance(inst: &ProblemInstance, res: &ApproxResult) -> Option<f64> {
    let report = match (inst.mode, &res.y_level) {
        (Mode::Cpp, Some(y)) => {
            let exact = exact_projection(inst).ok()?;
            let y = y.complete().ok()?;
            match res.kind {
                Kind::Outer => hausdorff_nested(exact.vrep()?, y.vrep()?),
                Kind::Inner => hausdorff_nested(y.vrep()?, exact.vrep()?),
            }
        }
        _ => {
            let exact = reference_upper_image(inst).ok()?;
            match res.kind {
                Kind::Outer => hausdorff_upper_images(&exact, &res.p_level),
                Kind::Inner => hausdorff_upper_images(&res.p_level, &exact),
            }
        }
    };
    report.ok().map(|r| r.d_h)
}

fn cmd_approx(a: ApproxArgs) -> Result<(), Failure> {
    let inst = ProblemInstance::from_json(&read(&a.input)?).map_err(input)?;
    let opts = BensonOptions::with_selection(a.selection);
    let res = approximate_body(&inst, a.eps, a.algorithm, &opts).map_err(solver)?;
    emit(a.output.as_deref(), &to_rounded_json(&res))?;
    eprintln!("certified bound: {}", fmt12(res.certified_bound));
    eprintln!("cuts: {}, scalar solves: {}", res.cuts, res.solves);
    if let Some(d) = reference_distance(&inst, &res) {
        eprintln!("measured d_H: {}", fmt12(d));
    }
    Ok(())
}

/// A polyhedron file, or an approx result whose Y-level (else P-level) set
/// is used.
fn read_polyhedron(path: &Path) -> Result<Polyhedron, Failure> {
    let text = read(path)?;
    let v: Value = serde_json::from_str(&text)
        .with_context(|| format!("parsing {}", path.display()))
        .map_err(input)?;
    if v.get("p_level").is_some() {
        let res: ApproxResult = serde_json::from_value(v)
            .with_context(|| format!("parsing {}", path.display()))
            .map_err(input)?;
        return Ok(res.y_level.unwrap_or(res.p_level));
    }
    serde_json::from_value(v)
        .with_context(|| format!("parsing {}", path.display()))
        .map_err(input)
}

fn cmd_hausdorff(a: HausdorffArgs) -> Result<(), Failure> {
    let inner = read_polyhedron(&a.inner)?.complete().map_err(solver)?;
    let outer = read_polyhedron(&a.outer)?.complete().map_err(solver)?;
    if inner.dim() != outer.dim() {
        return Err(input(anyhow::anyhow!(
            "dimension mismatch: {} vs {}",
            inner.dim(),
            outer.dim()
        )));
    }
    let (iv, ov) = (
        inner.vrep().expect("completed"),
        outer.vrep().expect("completed"),
    );
    let bounded = iv.rays.is_empty() && ov.rays.is_empty();
    let report: DistanceReport = if bounded {
        hausdorff_nested(iv, ov)
    } else {
        hausdorff_upper_images(&inner, &outer)
    }
    .map_err(solver)?;
    let mut v = serde_json::to_value(&report).expect("serializable");
    if let (Some(n), true) = (a.samples, bounded) {
        let s = hausdorff_sampled(iv, ov, n, a.seed).map_err(solver)?;
        v["d_h_sampled"] = serde_json::json!(s);
    }
    round_numbers(&mut v);
    println!(
        "{}",
        serde_json::to_string_pretty(&v).expect("serializable")
    );
    Ok(())
}

fn expect_path(p: &Path) -> PathBuf {
    let stem = p
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    p.with_file_name(format!("{stem}.expect.json"))
}

fn cmd_example(a: ExampleArgs) -> Result<(), Failure> {
    let (instance, expect) = if a.name == "random" {
        let q = a.q.max(1);
        let inst = gen_random_polytope_cpp(q, q + 1, q + 3, a.seed).map_err(input)?;
        (inst, Value::Null)
    } else {
        let name: ExampleName = a.name.parse().map_err(input)?;
        let ex = generate(name, a.q, a.eps).map_err(input)?;
        (
            ex.instance,
            serde_json::to_value(&ex.expect).expect("serializable"),
        )
    };
    let inst_json = instance.to_json();
    match a.output {
        Some(p) => {
            emit(Some(&p), &inst_json)?;
            if !expect.is_null() {
                emit(
                    Some(&expect_path(&p)),
                    &serde_json::to_string_pretty(&expect).expect("serializable"),
                )?;
            }
        }
        None => {
            let both = serde_json::json!({
                "instance": serde_json::from_str::<Value>(&inst_json).expect("valid json"),
                "expectations": expect,
            });
            println!(
                "{}",
                serde_json::to_string_pretty(&both).expect("serializable")
            );
        }
    }
    Ok(())
}

fn cmd_verify(a: VerifyArgs) -> Result<(), Failure> {
    let qs: Vec<usize> = a.q.map(|q| vec![q]).unwrap_or_else(|| vec![2, 3]);
    let opts = BensonOptions {
        tie_tol: a.tie_tol,
        ..BensonOptions::with_selection(a.selection)
    };
    let rows = verify_all(&qs, &opts);
    print_table(&rows);
    let failed = rows.iter().filter(|r| !r.pass).count();
    println!("{} checks, {failed} failed", rows.len());
    if failed == 0 {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

fn print_table(rows: &[CheckRow]) {
    println!(
        "{:<12} {:>2}  {:<9} {:>16} {:>16}  result",
        "example", "q", "check", "expected", "measured"
    );
    for r in rows {
        println!(
            "{:<12} {:>2}  {:<9} {:>16} {:>16}  {}",
            r.example,
            r.q,
            r.check,
            fmt12(r.expected),
            fmt12(r.measured),
            if r.pass { "pass" } else { "FAIL" }
        );
    }
}

fn init_logging(log: Option<&Path>) -> anyhow::Result<()> {
    let env = env_logger::Env::new().filter_or("BENSON_LOG_LEVEL", "error");
    let mut b = env_logger::Builder::from_env(env);
    if let Some(p) = log {
        let f = fs::File::create(p).with_context(|| format!("creating {}", p.display()))?;
        b.target(env_logger::Target::Pipe(Box::new(f)));
    }
    b.try_init()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = init_logging(cli.log.as_deref()) {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    let outcome = match cli.command {
        Command::Approx(a) => cmd_approx(a),
        Command::Hausdorff(a) => cmd_hausdorff(a),
        Command::Example(a) => cmd_example(a),
        Command::Verify(a) => cmd_verify(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Input(e) | Failure::Solver(e) | Failure::NotNested(e) => {
                    eprintln!("error: {e:#}")
                }
                Failure::Check => eprintln!("verification failed"),
            }
            ExitCode::from(f.code())
        }
    }
}
