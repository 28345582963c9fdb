mod io;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use ndarray::Array1;
use nngfl::experiments::{
    balanced_labels, cross_validate, gen_synthetic, parse_grid, run_benchmark, stability_study, BetaKind,
    CvSettings, ModelKind, StudyConfig, SyntheticSpec,
};
use nngfl::flow::build_network;
use nngfl::oracle::{fit_oracle, prox_oracle};
use nngfl::solver::{full_kkt, Acceleration, LipschitzMode};
use nngfl::stability::{estimation_stability, multiset_dice, support_set};
use nngfl::tvprox::tv_prox_with_flows;
use nngfl::{check_kkt, fit, fused_prox, Loss, Problem, ProxInstance, SignConstraint, SolverConfig, TvInstance};
use serde::Serialize;
use serde_json::json;

use io::{emit, matrix_csv, vector_csv, write_text, Inputs, RunManifest};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    Solver(nngfl::Error),
}

impl From<nngfl::Error> for CliError {
    fn from(e: nngfl::Error) -> Self {
        CliError::Solver(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Solver(e) if e.is_numerical() => 2,
            _ => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage: {m}"),
            CliError::Io(m) => write!(f, "input/output: {m}"),
            CliError::Solver(e) => write!(f, "{e}"),
        }
    }
}

/// Nonnegative generalized fused lasso: fitting, proximal operators,
/// benchmarks and cross-validated stability.
#[derive(Parser)]
#[command(name = "nngfl", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic grid data set.
    Synth(SynthArgs),
    /// Fit a penalized regression or classification model.
    Fit(FitArgs),
    /// Fused proximal operator with sign constraint.
    Prox(ProxArgs),
    /// Graph total-variation proximal operator.
    Tvprox(TvproxArgs),
    /// Time fits on synthetic problems of growing size.
    Benchmark(BenchmarkArgs),
    /// Cross-validate a model over a regularization grid.
    Cv(CvArgs),
    /// Stability of coefficient vectors from different folds.
    Stability(StabilityArgs),
}

#[derive(Args, Serialize)]
struct SynthArgs {
    /// Number of variables (a perfect square, laid out as a 2D grid).
    #[arg(long)]
    d: usize,
    /// Number of samples [default: d/2].
    #[arg(long)]
    n_samples: Option<usize>,
    /// Standard deviation of the additive response noise.
    #[arg(long, default_value_t = 0.01)]
    noise: f64,
    /// Coefficient pattern: gaussian-random or piecewise-nonnegative.
    #[arg(long, default_value = "gaussian-random")]
    kind: BetaKind,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also write balanced +-1 labels (response thresholded at its median).
    #[arg(long)]
    labels: bool,
    /// Directory receiving x.csv, y.csv, beta.csv, graph.txt and manifest.json.
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args, Serialize)]
struct SolverArgs {
    /// Acceleration: fista or ista.
    #[arg(long, default_value = "fista")]
    accel: Acceleration,
    /// Relative objective change that stops the iteration.
    #[arg(long, default_value_t = 1e-7)]
    tol: f64,
    #[arg(long, default_value_t = 2000)]
    max_iters: usize,
    /// Use backtracking from this initial Lipschitz guess instead of the
    /// spectral estimate.
    #[arg(long)]
    backtrack_from: Option<f64>,
    /// Growth factor for backtracking.
    #[arg(long, default_value_t = 2.0)]
    backtrack_growth: f64,
    /// Tolerance of the flow-based prox.
    #[arg(long, default_value_t = 1e-10)]
    prox_tol: f64,
}

impl SolverArgs {
    fn config(&self, seed: u64) -> SolverConfig {
        SolverConfig {
            max_iters: self.max_iters,
            tol: self.tol,
            lipschitz: match self.backtrack_from {
                Some(initial) => LipschitzMode::Backtracking {
                    initial,
                    growth: self.backtrack_growth,
                },
                None => LipschitzMode::ExactSpectral,
            },
            accel: self.accel,
            prox_tol: self.prox_tol,
            seed,
        }
    }
}

#[derive(Args, Serialize)]
struct FitArgs {
    /// Design matrix CSV, d rows by N columns.
    #[arg(long)]
    x: PathBuf,
    /// Response CSV, one value per line (+-1 labels for logistic).
    #[arg(long)]
    y: PathBuf,
    /// Edge list with a `nodes N` header and `i j w` lines.
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    lambda1: f64,
    #[arg(long)]
    lambda2: f64,
    /// Loss: logistic or squared.
    #[arg(long, default_value = "logistic")]
    loss: Loss,
    /// Sign constraint: nonnegative, nonpositive or unconstrained.
    #[arg(long, default_value = "nonnegative")]
    mode: SignConstraint,
    #[command(flatten)]
    solver: SolverArgs,
    /// Seeds the Lipschitz estimate.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Skip one header row in every CSV input.
    #[arg(long)]
    header: bool,
    /// Cross-check against the slow reference fit (at most 15 variables).
    #[arg(long)]
    verify: bool,
    /// JSON report path [default: stdout].
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the coefficients as CSV.
    #[arg(long)]
    beta_out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct ProxArgs {
    /// Input vector CSV, one value per line.
    #[arg(long)]
    z: PathBuf,
    #[arg(long)]
    graph: PathBuf,
    /// l1 threshold.
    #[arg(long)]
    lambda1: f64,
    /// Fusion threshold, multiplied by each edge weight.
    #[arg(long)]
    lambda2: f64,
    #[arg(long, default_value = "nonnegative")]
    mode: SignConstraint,
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[arg(long)]
    header: bool,
    /// Cross-check against the reference prox (at most 15 variables).
    #[arg(long)]
    verify: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct TvproxArgs {
    #[arg(long)]
    z: PathBuf,
    #[arg(long)]
    graph: PathBuf,
    /// Fusion threshold, multiplied by each edge weight.
    #[arg(long)]
    lambda: f64,
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[arg(long)]
    header: bool,
    /// Output CSV [default: stdout].
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the flow network and its solution as JSON.
    #[arg(long)]
    dump_network: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct BenchmarkArgs {
    /// Comma-separated perfect squares.
    #[arg(long, value_delimiter = ',', default_value = "400,900,2500,4900,10000")]
    dims: Vec<usize>,
    #[arg(long, default_value_t = 1)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    solver: SolverArgs,
    /// JSON report path [default: stdout].
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the summary table as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct CvArgs {
    /// Design matrix CSV; without it a piecewise-nonnegative synthetic set is used.
    #[arg(long, requires_all = ["y", "graph"])]
    x: Option<PathBuf>,
    /// +-1 labels, one per line.
    #[arg(long)]
    y: Option<PathBuf>,
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Synthetic size when no data is given.
    #[arg(long, default_value_t = 400)]
    d: usize,
    /// Synthetic label noise when no data is given.
    #[arg(long, default_value_t = 3.0)]
    noise: f64,
    /// lasso, gfl, n2gfl, or all (all three on the same folds).
    #[arg(long, default_value = "all")]
    model: String,
    #[arg(long, default_value_t = 10)]
    folds: usize,
    /// `l1a:l1b:steps,l2a:l2b:steps`; geometric spacing when both ends are positive.
    #[arg(long, default_value = "0.0625:8:8,0.5:16:11")]
    grid: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads.
    #[arg(long, env = "NNGFL_JOBS", default_value_t = 1)]
    jobs: usize,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long)]
    header: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write one summary row per model as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct StabilityArgs {
    /// Comma-separated coefficient CSVs, one per fold.
    #[arg(long, value_delimiter = ',', required = true)]
    betas: Vec<PathBuf>,
    /// Design matrix CSV, d rows by N columns.
    #[arg(long)]
    x: PathBuf,
    #[arg(long)]
    header: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn report(
    name: &'static str,
    args: &impl Serialize,
    inputs: Inputs,
    start: Instant,
    result: impl Serialize,
) -> Result<String, CliError> {
    let manifest = RunManifest {
        subcommand: name,
        config: serde_json::to_value(args).map_err(|e| CliError::Io(e.to_string()))?,
        inputs: inputs.finish(),
        version: env!("CARGO_PKG_VERSION"),
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    let mut text = serde_json::to_string_pretty(&json!({ "manifest": manifest, "result": result }))
        .map_err(|e| CliError::Io(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

fn synth(args: &SynthArgs) -> Result<(), CliError> {
    let start = Instant::now();
    let spec = SyntheticSpec {
        d: args.d,
        n_samples: args.n_samples,
        noise: args.noise,
        beta_kind: args.kind,
        seed: args.seed,
    };
    let data = gen_synthetic(&spec)?;
    std::fs::create_dir_all(&args.out_dir).map_err(|e| CliError::Io(format!("{}: {e}", args.out_dir.display())))?;
    let y = if args.labels { balanced_labels(&data.y) } else { data.y };
    write_text(&args.out_dir.join("x.csv"), &matrix_csv(&data.x))?;
    write_text(&args.out_dir.join("y.csv"), &vector_csv(y.as_slice().expect("contiguous")))?;
    write_text(&args.out_dir.join("beta.csv"), &vector_csv(&data.true_beta))?;
    write_text(&args.out_dir.join("graph.txt"), &data.graph.to_edge_list())?;
    let summary = json!({ "d": spec.d, "n_samples": spec.samples(), "edges": data.graph.num_edges() });
    let text = report("synth", args, Inputs::default(), start, summary)?;
    write_text(&args.out_dir.join("manifest.json"), &text)
}

fn fit_cmd(args: &FitArgs) -> Result<(), CliError> {
    let start = Instant::now();
    let mut inputs = Inputs::default();
    let x = inputs.matrix(&args.x, args.header)?;
    let y = Array1::from(inputs.vector(&args.y, args.header)?);
    let graph = inputs.graph(&args.graph)?;
    let problem = Problem {
        x,
        y,
        lambda1: args.lambda1,
        lambda2: args.lambda2,
        graph,
        loss: args.loss,
        constraint: args.mode,
    };
    let result = fit(&problem, &args.solver.config(args.seed))?;
    let (kkt, grad_bias) = full_kkt(&problem, &result.beta, result.bias, 1e-8)?;
    let verify = if args.verify {
        let (beta, bias) = fit_oracle(&problem, 200_000)?;
        let diff = beta
            .iter()
            .zip(&result.beta)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        Some(json!({ "reference_beta": beta, "reference_bias": bias, "max_abs_diff": diff }))
    } else {
        None
    };
    if let Some(path) = &args.beta_out {
        write_text(path, &vector_csv(&result.beta))?;
    }
    let body = json!({
        "fit": result,
        "objective": result.objective(),
        "kkt": kkt,
        "bias_gradient": grad_bias,
        "verify": verify,
    });
    emit(args.out.as_ref(), &report("fit", args, inputs, start, body)?)
}

fn prox_cmd(args: &ProxArgs) -> Result<(), CliError> {
    let start = Instant::now();
    let mut inputs = Inputs::default();
    let z = inputs.vector(&args.z, args.header)?;
    let graph = inputs.graph(&args.graph)?;
    let theta_edge: Vec<f64> = graph.weights().iter().map(|w| args.lambda2 * w).collect();
    let inst = ProxInstance {
        z: &z,
        graph: &graph,
        theta_node: args.lambda1,
        theta_edge: &theta_edge,
        constraint: args.mode,
    };
    let beta = fused_prox(&inst, args.tol)?;
    let kkt = check_kkt(&beta, &inst, 1e-9);
    let verify = if args.verify {
        let reference = prox_oracle(&inst)?;
        let diff = reference
            .iter()
            .zip(&beta)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        Some(json!({ "reference": reference, "max_abs_diff": diff }))
    } else {
        None
    };
    let body = json!({ "beta": beta, "objective": inst.objective(&beta), "kkt": kkt, "verify": verify });
    emit(args.out.as_ref(), &report("prox", args, inputs, start, body)?)
}

fn tvprox_cmd(args: &TvproxArgs) -> Result<(), CliError> {
    let mut inputs = Inputs::default();
    let z = inputs.vector(&args.z, args.header)?;
    let graph = inputs.graph(&args.graph)?;
    let theta: Vec<f64> = graph.weights().iter().map(|w| args.lambda * w).collect();
    let inst = TvInstance::new(&z, &graph, &theta)?;
    let (beta, sol) = tv_prox_with_flows(&inst, args.tol)?;
    if let Some(path) = &args.dump_network {
        let net = build_network(&z, &graph, &theta)?;
        let text = serde_json::to_string_pretty(&json!({ "network": net, "solution": sol }))
            .map_err(|e| CliError::Io(e.to_string()))?;
        write_text(path, &text)?;
    }
    emit(args.out.as_ref(), &vector_csv(&beta))
}

fn benchmark_cmd(args: &BenchmarkArgs) -> Result<(), CliError> {
    let start = Instant::now();
    let report_data = run_benchmark(&args.dims, &args.solver.config(args.seed), args.trials, args.seed)?;
    if let Some(path) = &args.csv {
        write_text(path, &report_data.to_csv())?;
    }
    for row in &report_data.rows {
        eprintln!(
            "d={} median {:.3}s over {} trials, {} failures",
            row.d,
            row.median_time,
            row.times.len(),
            row.failures.len()
        );
    }
    emit(args.out.as_ref(), &report("benchmark", args, Inputs::default(), start, &report_data)?)
}

fn cv_cmd(args: &CvArgs) -> Result<(), CliError> {
    let start = Instant::now();
    let grid = parse_grid(&args.grid)?;
    let models: Vec<ModelKind> = if args.model == "all" {
        vec![ModelKind::Lasso, ModelKind::Gfl, ModelKind::N2gfl]
    } else {
        vec![args
            .model
            .parse()
            .map_err(|e: nngfl::Error| CliError::Usage(e.to_string()))?]
    };
    let solver = args.solver.config(args.seed);
    let mut inputs = Inputs::default();

    let reports = if let Some(x_path) = &args.x {
        let x = inputs.matrix(x_path, args.header)?;
        let y_path = args.y.as_ref().ok_or_else(|| CliError::Usage("--x needs --y".into()))?;
        let g_path = args.graph.as_ref().ok_or_else(|| CliError::Usage("--x needs --graph".into()))?;
        let y = Array1::from(inputs.vector(y_path, args.header)?);
        let graph = inputs.graph(g_path)?;
        models
            .iter()
            .map(|&model| {
                let settings = CvSettings {
                    folds: args.folds,
                    grid: grid.clone(),
                    model,
                    solver,
                    seed: args.seed,
                    jobs: args.jobs,
                };
                cross_validate(&x, &y, &graph, &settings)
            })
            .collect::<Result<Vec<_>, _>>()?
    } else if models.len() == 3 {
        let study = stability_study(&StudyConfig {
            d: args.d,
            noise: args.noise,
            folds: args.folds,
            grid,
            solver,
            seed: args.seed,
            jobs: args.jobs,
        })?;
        vec![study.lasso, study.gfl, study.n2gfl]
    } else {
        let spec = SyntheticSpec {
            noise: args.noise,
            ..SyntheticSpec::new(args.d, BetaKind::PiecewiseNonnegative, args.seed)
        };
        let data = gen_synthetic(&spec)?;
        let y = balanced_labels(&data.y);
        let settings = CvSettings {
            folds: args.folds,
            grid,
            model: models[0],
            solver,
            seed: args.seed,
            jobs: args.jobs,
        };
        vec![cross_validate(&data.x, &y, &data.graph, &settings)?]
    };

    if let Some(path) = &args.csv {
        let mut text = String::from("model,lambda1,lambda2,accuracy,es,mdc\n");
        for r in &reports {
            let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
            let model = serde_json::to_value(r.model).map_err(|e| CliError::Io(e.to_string()))?;
            text.push_str(&format!(
                "{},{},{},{},{},{}\n",
                model.as_str().unwrap_or_default(),
                r.lambda1,
                r.lambda2,
                r.accuracy,
                opt(r.es),
                opt(r.mdc)
            ));
        }
        write_text(path, &text)?;
    }
    emit(args.out.as_ref(), &report("cv", args, inputs, start, &reports)?)
}

fn stability_cmd(args: &StabilityArgs) -> Result<(), CliError> {
    let start = Instant::now();
    let mut inputs = Inputs::default();
    let x = inputs.matrix(&args.x, args.header)?;
    let betas = args
        .betas
        .iter()
        .map(|p| inputs.vector(p, args.header))
        .collect::<Result<Vec<_>, _>>()?;
    let supports: Vec<_> = betas.iter().map(|b| support_set(b)).collect();
    let es = estimation_stability(x.view(), &betas)?;
    let mdc = multiset_dice(&supports)?;
    let sizes: Vec<usize> = supports.iter().map(|s| s.len()).collect();
    let body = json!({ "es": es, "mdc": mdc, "support_sizes": sizes });
    emit(args.out.as_ref(), &report("stability", args, inputs, start, body)?)
}

fn run(cli: Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Synth(a) => synth(a),
        Command::Fit(a) => fit_cmd(a),
        Command::Prox(a) => prox_cmd(a),
        Command::Tvprox(a) => tvprox_cmd(a),
        Command::Benchmark(a) => benchmark_cmd(a),
        Command::Cv(a) => cv_cmd(a),
        Command::Stability(a) => stability_cmd(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
