//! Command-line front end.
//!
//! Every subcommand prints one JSON report (or a CSV table with
//! `--format csv`) echoing its configuration. Output is byte-identical for
//! identical flags unless `--timing` adds the wall-clock time.

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use incompat_core::{
    cloning_coefficient, downward_closure_violations, feasibility_test, figure3_curves,
    fourier_mub_pair, jmd_bisection, mub_jmd_analytic, number_povm, phase_povm_binned,
    random_povm_pair, BoundaryRow, CloningDevice, CloningError, ComplexMatrix, ConstructionError,
    FeasibilityProblem, JmdBracket, NoisePoint, Povm, PovmError, SolverConfig, SolverError,
    Verdict, Witness,
};
use serde::Serialize;
use serde_json::{json, Value};

use crate::csv::{boundary_csv, curves_csv};
use crate::format::{write_json, FormatError, PairJson, PovmJson, WitnessJson};
use crate::parallel::{region_boundary_par, region_grid_par, ParallelError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_INVALID_INPUT: i32 = 2;
pub const EXIT_UNDECIDED: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "incompat",
    version,
    about = "Joint measurability of noisy quantum observables"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Exit with status 3 when a verdict stays undecided.
    #[arg(long, global = true)]
    pub strict: bool,
    /// Add the wall-clock time to the report (output is then run-dependent).
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fourier mutually unbiased bases in dimension d.
    Mub {
        #[arg(long)]
        dim: usize,
    },
    /// Bracket the joint measurability degree by bisection on λ = μ.
    Jmd(JmdArgs),
    /// Test one noise point (λ, μ).
    Feasible(FeasibleArgs),
    /// Map the boundary of the joint measurability region.
    Region(RegionArgs),
    /// Analytic MUB degree against the cloning bound for d = 2..=dmax.
    Curves {
        #[arg(long)]
        dmax: u64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Build the universal-cloning joint observable at (c(d), c(d)).
    CloningBound(CloningArgs),
    /// Two random POVMs in the pair file format.
    RandomPair {
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value_t = 2)]
        outcomes: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairKind {
    /// Fourier mutually unbiased bases.
    Mub,
    /// Number observable and binned canonical phase.
    NumberPhase,
    /// Pair file given by --file.
    File,
    /// Random POVMs from --seed and --outcomes.
    Random,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct PairArgs {
    #[arg(long, value_enum, default_value_t = PairKind::Mub)]
    pub pair: PairKind,
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    /// Phase bins for the number-phase pair.
    #[arg(long, default_value_t = 8)]
    pub bins: usize,
    /// Pair file for `--pair file`.
    #[arg(long)]
    pub file: Option<PathBuf>,
    /// Outcomes per observable for `--pair random`.
    #[arg(long, default_value_t = 2)]
    pub outcomes: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct SolverArgs {
    #[arg(long, default_value_t = 1e-7)]
    pub tol_feasible: f64,
    #[arg(long, default_value_t = 1e-5)]
    pub tol_infeasible: f64,
    #[arg(long, default_value_t = 50_000)]
    pub max_iters: usize,
    #[arg(long, default_value_t = 2_000)]
    pub stall_window: usize,
    #[arg(long, default_value_t = 0.999)]
    pub stall_factor: f64,
    /// Always iterate, even inside the triangle λ + μ ≤ 1.
    #[arg(long)]
    pub no_shortcuts: bool,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct JmdArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    #[arg(long, default_value_t = 5e-3)]
    pub tol: f64,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Write the witness at the certified lower end to this file.
    #[arg(long)]
    pub witness_out: Option<PathBuf>,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct FeasibleArgs {
    #[arg(long)]
    pub lambda: f64,
    #[arg(long)]
    pub mu: f64,
    #[command(flatten)]
    pub pair: PairArgs,
    /// Pin the trivial noises to tr(M(j))/d instead of optimizing them.
    #[arg(long)]
    pub fixed_noise: bool,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Write the witness of a Feasible verdict to this file.
    #[arg(long)]
    pub witness_out: Option<PathBuf>,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct RegionArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    /// Number of equally spaced μ values in [0, 1].
    #[arg(long, default_value_t = 21)]
    pub grid: usize,
    #[arg(long, default_value_t = 5e-3)]
    pub tol: f64,
    /// Also report raw verdicts on the grid × grid lattice.
    #[arg(long)]
    pub verdicts: bool,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    #[serde(skip)]
    pub format: Format,
    /// Worker threads; 0 uses every available core.
    #[arg(long, env = "INCOMPAT_JOBS", default_value_t = 0)]
    #[serde(skip)]
    pub jobs: usize,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct CloningArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    /// Check both margins and run the solver at (c(d), c(d)).
    #[arg(long)]
    pub verify: bool,
    #[command(flatten)]
    pub solver: SolverArgs,
}

impl SolverArgs {
    pub fn config(&self) -> SolverConfig {
        SolverConfig {
            tol_feasible: self.tol_feasible,
            tol_infeasible: self.tol_infeasible,
            max_iters: self.max_iters,
            stall_window: self.stall_window,
            stall_factor: self.stall_factor,
            constructive_shortcuts: !self.no_shortcuts,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error(transparent)]
    Povm(#[from] PovmError),
    #[error(transparent)]
    Construction(#[from] ConstructionError),
    #[error(transparent)]
    Cloning(#[from] CloningError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("cannot start worker pool: {0}")]
    Pool(String),
    #[error("verification failed: {0}")]
    Verification(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Format(FormatError::Write { .. })
            | CliError::Pool(_)
            | CliError::Verification(_) => EXIT_FAILURE,
            _ => EXIT_INVALID_INPUT,
        }
    }
}

impl From<ParallelError> for CliError {
    fn from(e: ParallelError) -> Self {
        match e {
            ParallelError::Pool(p) => CliError::Pool(p.to_string()),
            ParallelError::Solver(s) => CliError::Solver(s),
        }
    }
}

/// What a run printed and how it exited.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parses `argv` (program name first) and runs the subcommand.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome {
                    code: EXIT_INVALID_INPUT,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Outcome {
                    code: EXIT_OK,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    match execute(&cli) {
        Ok((stdout, undecided)) => {
            let code = if cli.strict && undecided {
                EXIT_UNDECIDED
            } else {
                EXIT_OK
            };
            Outcome {
                code,
                stdout,
                stderr: String::new(),
            }
        }
        Err(e) => Outcome {
            code: e.exit_code(),
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

/// A finished subcommand: its payload and whether anything stayed undecided.
struct Report {
    command: &'static str,
    config: Value,
    result: Value,
    stats: Value,
    undecided: bool,
}

fn execute(cli: &Cli) -> Result<(String, bool), CliError> {
    let start = Instant::now();
    let report = match &cli.command {
        Command::Mub { dim } => mub(*dim)?,
        Command::Jmd(args) => jmd(args)?,
        Command::Feasible(args) => feasible(args)?,
        Command::Region(args) => {
            if args.format == Format::Csv && !args.verdicts {
                let (rows, undecided) = region_rows(args)?;
                return Ok((boundary_csv(&rows), undecided));
            }
            region(args)?
        }
        Command::Curves { dmax, format } => {
            if *format == Format::Csv {
                return Ok((curves_csv(&figure3_curves(*dmax)), false));
            }
            curves(*dmax)
        }
        Command::CloningBound(args) => cloning_bound(args)?,
        Command::RandomPair {
            dim,
            outcomes,
            seed,
        } => {
            let (a, b) = random_povm_pair(*dim, (*outcomes, *outcomes), *seed)?;
            return Ok((to_json_line(&PairJson::new(&a, &b)), false));
        }
    };
    let mut out = json!({
        "command": report.command,
        "config": report.config,
        "result": report.result,
        "stats": report.stats,
    });
    if cli.timing {
        out["wall_time_s"] = json!(start.elapsed().as_secs_f64());
    }
    Ok((to_json_line(&out), report.undecided))
}

fn to_json_line<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("plain data serializes");
    text.push('\n');
    text
}

/// The pair selected on the command line.
pub fn load_pair(args: &PairArgs) -> Result<(Povm, Povm), CliError> {
    match args.pair {
        PairKind::Mub => {
            let pair = fourier_mub_pair(args.dim)?;
            Ok((pair.povm_a, pair.povm_b))
        }
        PairKind::NumberPhase => {
            if args.dim < 1 || args.bins < 2 {
                return Err(CliError::Input(format!(
                    "number-phase needs --dim ≥ 1 and --bins ≥ 2 (got {} and {})",
                    args.dim, args.bins
                )));
            }
            Ok((
                number_povm(args.dim),
                phase_povm_binned(args.dim, args.bins),
            ))
        }
        PairKind::File => {
            let path = args
                .file
                .as_ref()
                .ok_or_else(|| CliError::Input("--pair file needs --file PATH".into()))?;
            Ok(crate::format::read_pair(path)?)
        }
        PairKind::Random => Ok(random_povm_pair(
            args.dim,
            (args.outcomes, args.outcomes),
            args.seed,
        )?),
    }
}

fn config_value<T: Serialize>(args: &T) -> Value {
    serde_json::to_value(args).expect("plain data serializes")
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Feasible => "Feasible",
        Verdict::Infeasible => "Infeasible",
        Verdict::Undecided => "Undecided",
    }
}

fn check_unit(name: &str, x: f64) -> Result<(), CliError> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(CliError::Input(format!(
            "{name} must lie in [0, 1], got {x}"
        )))
    }
}

fn check_tol(tol: f64) -> Result<(), CliError> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(CliError::Input(format!(
            "--tol must be positive, got {tol}"
        )))
    }
}

fn mub(dim: usize) -> Result<Report, CliError> {
    let pair = fourier_mub_pair(dim)?;
    let result = json!({
        "first": PovmJson::from(&pair.povm_a),
        "second": PovmJson::from(&pair.povm_b),
        "unbiasedness_defect": pair.unbiasedness_defect(),
        "jmd_analytic": mub_jmd_analytic(dim as u64)?,
    });
    Ok(Report {
        command: "mub",
        config: json!({ "dim": dim }),
        result,
        stats: json!({}),
        undecided: false,
    })
}

fn bracket_value(b: &JmdBracket) -> Value {
    let probes: Vec<Value> = b
        .probes
        .iter()
        .map(|p| {
            json!({
                "t": p.t,
                "verdict": verdict_name(p.verdict),
                "residual": p.residual,
                "iterations": p.iterations,
                "retried": p.retried,
            })
        })
        .collect();
    json!({
        "certified_lower": b.certified_lower,
        "heuristic_upper": b.heuristic_upper,
        "probes": probes,
    })
}

fn export_witness(
    path: Option<&PathBuf>,
    witness: Option<&Witness>,
    point: NoisePoint,
) -> Result<(), CliError> {
    if let (Some(path), Some(w)) = (path, witness) {
        write_json(path, &WitnessJson::new(w, point))?;
    }
    Ok(())
}

fn jmd(args: &JmdArgs) -> Result<Report, CliError> {
    check_tol(args.tol)?;
    let (m1, m2) = load_pair(&args.pair)?;
    let bracket = jmd_bisection(&m1, &m2, &args.solver.config(), args.tol)?;
    let lower = NoisePoint::diagonal(bracket.certified_lower)?;
    export_witness(args.witness_out.as_ref(), bracket.witness.as_ref(), lower)?;
    let mut result = bracket_value(&bracket);
    if args.pair.pair == PairKind::Mub {
        result["analytic"] = json!(mub_jmd_analytic(args.pair.dim as u64)?);
    }
    result["cloning_bound"] = json!(cloning_coefficient(m1.dim().max(2) as u64));
    let undecided = bracket.undecided();
    Ok(Report {
        command: "jmd",
        config: config_value(args),
        result,
        stats: json!({
            "probes": bracket.probes.len(),
            "undecided": undecided,
            "iterations": bracket.total_iterations(),
        }),
        undecided: undecided > 0,
    })
}

fn feasible(args: &FeasibleArgs) -> Result<Report, CliError> {
    check_unit("--lambda", args.lambda)?;
    check_unit("--mu", args.mu)?;
    let (m1, m2) = load_pair(&args.pair)?;
    let point = NoisePoint::new(args.lambda, args.mu)?;
    let problem = FeasibilityProblem::new(m1, m2, point, !args.fixed_noise)?;
    let r = feasibility_test(&problem, &args.solver.config())?;
    export_witness(args.witness_out.as_ref(), r.witness.as_ref(), point)?;
    let method = match (r.verdict, r.iterations) {
        (Verdict::Feasible, 0) if point.lambda() == 0.0 || point.mu() == 0.0 => "axis",
        (Verdict::Feasible, 0) => "triangle",
        _ => "iterative",
    };
    let mut result = json!({
        "verdict": verdict_name(r.verdict),
        "method": method,
        "residual": r.residual,
    });
    if let Some(w) = &r.witness {
        result["noise_first"] = json!(w.noise_first.weights());
        result["noise_second"] = json!(w.noise_second.weights());
    }
    Ok(Report {
        command: "feasible",
        config: config_value(args),
        result,
        stats: json!({ "iterations": r.iterations }),
        undecided: r.verdict == Verdict::Undecided,
    })
}

fn region_rows(args: &RegionArgs) -> Result<(Vec<BoundaryRow>, bool), CliError> {
    check_tol(args.tol)?;
    if args.grid < 2 {
        return Err(CliError::Input(format!(
            "--grid must be at least 2, got {}",
            args.grid
        )));
    }
    let (m1, m2) = load_pair(&args.pair)?;
    let rows = region_boundary_par(
        &m1,
        &m2,
        args.grid,
        &args.solver.config(),
        args.tol,
        args.jobs,
    )?;
    let undecided = rows.iter().any(|r| r.undecided > 0);
    Ok((rows, undecided))
}

fn region(args: &RegionArgs) -> Result<Report, CliError> {
    let (rows, mut undecided) = region_rows(args)?;
    let boundary: Vec<Value> = rows
        .iter()
        .map(|r| {
            json!({
                "mu": r.mu,
                "lambda_lower": r.lambda_lower,
                "lambda_upper": r.lambda_upper,
                "undecided": r.undecided,
            })
        })
        .collect();
    let mut result = json!({ "boundary": boundary, "empirical": true });
    if args.verdicts {
        let (m1, m2) = load_pair(&args.pair)?;
        let samples = region_grid_par(&m1, &m2, args.grid, &args.solver.config(), args.jobs)?;
        undecided |= samples.iter().any(|s| s.verdict == Verdict::Undecided);
        let grid: Vec<Value> = samples
            .iter()
            .map(|s| {
                json!({
                    "lambda": s.point.lambda(),
                    "mu": s.point.mu(),
                    "verdict": verdict_name(s.verdict),
                })
            })
            .collect();
        result["grid"] = json!(grid);
        result["closure_violations"] = json!(downward_closure_violations(&samples).len());
    }
    Ok(Report {
        command: "region",
        config: config_value(args),
        result,
        stats: json!({
            "rows": rows.len(),
            "undecided": rows.iter().map(|r| r.undecided).sum::<usize>(),
        }),
        undecided,
    })
}

fn curves(dmax: u64) -> Report {
    let rows: Vec<Value> = figure3_curves(dmax)
        .iter()
        .map(|r| json!({ "d": r.d, "eq2": r.eq2, "cloning": r.cloning }))
        .collect();
    Report {
        command: "curves",
        config: json!({ "dmax": dmax }),
        result: json!({ "rows": rows }),
        stats: json!({}),
        undecided: false,
    }
}

/// Largest Frobenius deviation of the margins of `joint` from
/// `c·M(j) + (1−c)·tr(M(j))/d·I`.
fn margin_deviation(margins: &[ComplexMatrix], m: &Povm, c: f64) -> f64 {
    let d = m.dim() as f64;
    margins
        .iter()
        .zip(m.effects())
        .map(|(got, e)| {
            let mut want = e.scale(c);
            want.add_identity((1.0 - c) * e.trace_re() / d);
            got.distance(&want)
        })
        .fold(0.0, f64::max)
}

/// Margin deviations below this count as exact.
const CLONING_MARGIN_TOL: f64 = 1e-10;

fn cloning_bound(args: &CloningArgs) -> Result<Report, CliError> {
    let (m1, m2) = load_pair(&args.pair)?;
    let d = m1.dim();
    let device = CloningDevice::new(d)?;
    let (joint, t1, t2) = device.witness(&m1, &m2)?;
    let c = device.coefficient();
    let point = NoisePoint::diagonal(c)?;
    let witness = Witness {
        joint,
        noise_first: t1,
        noise_second: t2,
    };
    let mut result = json!({
        "dim": d,
        "coefficient": c,
        "witness": WitnessJson::new(&witness, point),
    });
    let mut undecided = false;
    let mut stats = json!({});
    if args.verify {
        let g = &witness.joint;
        let rows: Vec<ComplexMatrix> = (0..g.n1())
            .map(|j| (0..g.n2()).fold(ComplexMatrix::zeros(d), |acc, k| &acc + g.effect(j, k)))
            .collect();
        let cols: Vec<ComplexMatrix> = (0..g.n2())
            .map(|k| (0..g.n1()).fold(ComplexMatrix::zeros(d), |acc, j| &acc + g.effect(j, k)))
            .collect();
        let dev1 = margin_deviation(&rows, &m1, c);
        let dev2 = margin_deviation(&cols, &m2, c);
        let problem = FeasibilityProblem::new(m1.clone(), m2.clone(), point, true)?;
        let cert = incompat_core::check_witness(&witness, &problem);
        let solved = feasibility_test(&problem, &args.solver.config())?;
        undecided = solved.verdict == Verdict::Undecided;
        let margins_ok = dev1 <= CLONING_MARGIN_TOL && dev2 <= CLONING_MARGIN_TOL;
        result["verify"] = json!({
            "margin_deviation_first": dev1,
            "margin_deviation_second": dev2,
            "margins_ok": margins_ok,
            "certified": cert.ok,
            "min_eig": cert.min_eig,
            "solver_verdict": verdict_name(solved.verdict),
        });
        stats = json!({ "iterations": solved.iterations });
        if !margins_ok || !cert.ok || solved.verdict == Verdict::Infeasible {
            return Err(CliError::Verification(format!(
                "margins {dev1:.3e}/{dev2:.3e}, certified {}, solver {}",
                cert.ok,
                verdict_name(solved.verdict)
            )));
        }
    }
    Ok(Report {
        command: "cloning-bound",
        config: config_value(args),
        result,
        stats,
        undecided,
    })
}
