use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hiclust::config::RunConfig;
use hiclust::continuation::{ModelKind, SolveReport};
use hiclust::dataio::{self, emit_profile};
use hiclust::init::{best_index, multistart, radial_search};
use hiclust::postprocess::SnappedSolution;
use hiclust::selfcheck::{self, CheckOptions, Fault};
use hiclust::{DataSet, Error};

/// Bilevel hierarchical clustering with smoothing and the DCA.
#[derive(Parser, Debug)]
#[command(name = "hiclust", version)]
struct Cli {
    /// Worker threads for multi-start and radial search (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve from random starts and write the best report.
    Solve(SolveArgs),
    /// Solve from radially spaced starts and write the best report with the
    /// cost profile.
    RadialSearch(RadialArgs),
    /// Price a tree given by node indices (0-based).
    EvalCost(EvalArgs),
    /// Repeat solves with both models and print a cost/time/iteration table.
    Bench(BenchArgs),
    /// Run the property suites on random instances.
    Check(CheckArgs),
}

#[derive(Args, Debug, Default)]
struct ParamArgs {
    /// TOML file with run parameters; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Model formulation: I or II.
    #[arg(long)]
    model: Option<ModelKind>,
    /// Number of cluster centers.
    #[arg(short, long)]
    k: Option<usize>,
    /// Initial penalty.
    #[arg(long)]
    lambda0: Option<f64>,
    /// Final penalty; exclusive with --sigma1.
    #[arg(long, conflicts_with = "sigma1")]
    lambda_max: Option<f64>,
    /// Penalty growth factor per outer iteration.
    #[arg(long)]
    sigma1: Option<f64>,
    /// Initial smoothing parameter.
    #[arg(long)]
    mu0: Option<f64>,
    /// Final smoothing parameter; exclusive with --sigma2.
    #[arg(long, conflicts_with = "sigma2")]
    mu_min: Option<f64>,
    /// Smoothing decay factor per outer iteration.
    #[arg(long)]
    sigma2: Option<f64>,
    /// Outer (penalty/smoothing) iterations.
    #[arg(long)]
    n_outer: Option<usize>,
    /// DCA steps per outer iteration at most.
    #[arg(long)]
    n_inner: Option<usize>,
    /// Inner stopping tolerance (0 runs every inner step).
    #[arg(long)]
    tol: Option<f64>,
    /// Seed of the first start.
    #[arg(long)]
    seed: Option<u64>,
    /// Start radius as a fraction of rad(A); random in (0, 1) when absent.
    #[arg(long)]
    gamma: Option<f64>,
}

impl ParamArgs {
    fn resolve(&self) -> Result<RunConfig, Error> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        macro_rules! set {
            ($($f:ident),*) => { $( if let Some(v) = self.$f { cfg.$f = v; } )* };
        }
        set!(model, k, lambda0, mu0, n_outer, n_inner, tol, seed);
        if self.lambda_max.is_some() || self.sigma1.is_some() {
            cfg.lambda_max = self.lambda_max;
            cfg.sigma1 = self.sigma1;
        }
        if self.mu_min.is_some() || self.sigma2.is_some() {
            cfg.mu_min = self.mu_min;
            cfg.sigma2 = self.sigma2;
        }
        if self.gamma.is_some() {
            cfg.gamma = self.gamma;
        }
        Ok(cfg)
    }
}

#[derive(Args, Debug)]
struct SolveArgs {
    /// TSPLIB or CSV point file.
    input: PathBuf,
    #[command(flatten)]
    params: ParamArgs,
    /// Number of random starts, seeded seed, seed+1, ...
    #[arg(long)]
    starts: Option<usize>,
    /// Add the elapsed time to the report (makes it non-reproducible).
    #[arg(long)]
    timing: bool,
    /// Report file (default: standard output).
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct RadialArgs {
    /// TSPLIB or CSV point file.
    input: PathBuf,
    #[command(flatten)]
    params: ParamArgs,
    /// Radial step in units of rad(A).
    #[arg(long)]
    r0: Option<f64>,
    /// Number of radial probes; probe i starts at radius i·r0·rad(A).
    #[arg(long)]
    n_probes: Option<usize>,
    /// Add the elapsed time to the report (makes it non-reproducible).
    #[arg(long)]
    timing: bool,
    /// Report file (default: standard output).
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Also write the (probe, multiplier, cost) table here.
    #[arg(long)]
    profile_output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EvalArgs {
    /// TSPLIB or CSV point file.
    input: PathBuf,
    /// Cluster center node indices, comma separated.
    #[arg(long, value_delimiter = ',', required_unless_present = "report")]
    centers: Vec<usize>,
    /// Total center node index; chosen by the usual rule when absent.
    #[arg(long)]
    total: Option<usize>,
    /// Re-snap and re-price the final centers of a saved report instead.
    #[arg(long, conflicts_with_all = ["centers", "total"])]
    report: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// One or more point files.
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    #[command(flatten)]
    params: ParamArgs,
    /// Runs per dataset and model.
    #[arg(long, default_value_t = 3)]
    repeats: usize,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FaultArg {
    Gradient,
    Conjugate,
    Subgradient,
}

#[derive(Args, Debug)]
struct CheckArgs {
    /// Seed of the random instances.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Random cases per suite.
    #[arg(long, default_value_t = 100)]
    samples: usize,
    /// Corrupt one oracle to confirm the suites catch it.
    #[arg(long, value_enum)]
    inject_fault: Option<FaultArg>,
}

enum Failure {
    Lib(Error),
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

const EXIT_CONFIG: u8 = 2;
const EXIT_IO: u8 = 3;
const EXIT_PARSE: u8 = 4;
const EXIT_NUMERIC: u8 = 5;
const EXIT_CHECK: u8 = 6;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::Domain(_) => EXIT_CONFIG,
        Error::Io { .. } => EXIT_IO,
        Error::Parse { .. } => EXIT_PARSE,
        Error::Numerical { .. } | Error::Dimension { .. } | Error::TooLarge { .. } => EXIT_NUMERIC,
    }
}

fn load(path: &Path) -> Result<DataSet, Error> {
    dataio::read_points(path)
        .map(|f| f.points)
        .map_err(|e| match e {
            Error::Parse { line, message } => Error::Parse {
                line,
                message: format!("{}: {message}", path.display()),
            },
            other => other,
        })
}

fn write_out(output: Option<&Path>, text: &str) -> Result<(), Error> {
    match output {
        Some(p) => dataio::write_text(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn first_error(results: Vec<Result<SolveReport, Error>>) -> Result<Vec<SolveReport>, Error> {
    results.into_iter().collect()
}

fn cmd_solve(args: &SolveArgs) -> Result<(), Failure> {
    let mut cfg = args.params.resolve()?;
    if let Some(s) = args.starts {
        cfg.starts = s;
    }
    cfg.validate()?;
    let data = load(&args.input)?;
    let mut opts = cfg.solve_options();
    opts.timing = args.timing;
    let reports = first_error(multistart(
        &data,
        cfg.model,
        cfg.k,
        &cfg.schedule()?,
        &cfg.seeds(),
        cfg.gamma,
        &opts,
    ))?;
    let best = best_index(reports.iter().map(Some)).expect("at least one start");
    write_out(args.output.as_deref(), &dataio::emit_report(&reports[best], None))?;
    Ok(())
}

fn cmd_radial(args: &RadialArgs) -> Result<(), Failure> {
    let mut cfg = args.params.resolve()?;
    if let Some(r) = args.r0 {
        cfg.r0 = r;
    }
    if let Some(n) = args.n_probes {
        cfg.n_probes = n;
    }
    cfg.validate()?;
    let data = load(&args.input)?;
    let mut opts = cfg.solve_options();
    opts.timing = args.timing;
    let search = radial_search(&data, cfg.model, cfg.k, &cfg.schedule()?, &cfg.start_spec(), &opts)?;
    let profile = search.profile();
    let Some(best) = search.best_report() else {
        let err = search
            .probes
            .into_iter()
            .find_map(|p| p.outcome.err())
            .expect("no best report means every probe failed");
        return Err(err.into());
    };
    write_out(args.output.as_deref(), &dataio::emit_report(best, Some(&profile)))?;
    if let Some(p) = &args.profile_output {
        dataio::write_text(p, &emit_profile(&profile))?;
    }
    Ok(())
}

fn cmd_eval(args: &EvalArgs) -> Result<(), Failure> {
    let data = load(&args.input)?;
    let m = data.rows();
    let snapped = if let Some(path) = &args.report {
        let file = dataio::parse_report(&dataio::read_text(path)?)?;
        SnappedSolution::from_centers(&file.report.final_centers, file.report.k, &data)?
    } else {
        if let Some(&bad) = args.centers.iter().chain(&args.total).find(|&&i| i >= m) {
            return Err(Error::Config(format!("node index {bad} out of range for {m} nodes")).into());
        }
        let total = match args.total {
            Some(t) => t,
            None => hiclust::postprocess::pick_total_center(&args.centers, &data)?,
        };
        SnappedSolution::from_indices(args.centers.clone(), total, &data)
    };
    let centers: Vec<String> = snapped.cluster_centers.iter().map(|c| c.to_string()).collect();
    println!("cluster_centers: {}", centers.join(" "));
    println!("total_center: {}", snapped.total_center);
    println!("cost: {}", snapped.cost);
    Ok(())
}

fn cmd_bench(args: &BenchArgs) -> Result<(), Failure> {
    let cfg = args.params.resolve()?;
    cfg.validate()?;
    if args.repeats == 0 {
        return Err(Error::Config("repeats must be at least 1".into()).into());
    }
    let schedule = cfg.schedule()?;
    let mut opts = cfg.solve_options();
    opts.timing = true;
    let seeds: Vec<u64> = (0..args.repeats as u64).map(|i| cfg.seed + i).collect();

    println!("dataset\tm\tn\tk\tseed\tcost1\tcost2\ttime1\ttime2\titer1\titer2");
    for input in &args.inputs {
        let data = load(input)?;
        let name = input.file_stem().map_or_else(|| input.display().to_string(), |s| s.to_string_lossy().into_owned());
        let mut runs = Vec::new();
        for model in [ModelKind::One, ModelKind::Two] {
            let start = Instant::now();
            let reports = first_error(multistart(&data, model, cfg.k, &schedule, &seeds, cfg.gamma, &opts))?;
            runs.push((reports, start.elapsed().as_secs_f64()));
        }
        for (i, seed) in seeds.iter().enumerate() {
            let (r1, r2) = (&runs[0].0[i], &runs[1].0[i]);
            println!(
                "{name}\t{}\t{}\t{}\t{seed}\t{:.6}\t{:.6}\t{:.4}\t{:.4}\t{}\t{}",
                data.rows(),
                data.cols(),
                cfg.k,
                r1.snapped.cost,
                r2.snapped.cost,
                r1.wall_time.unwrap_or(0.0),
                r2.wall_time.unwrap_or(0.0),
                r1.total_inner_iterations,
                r2.total_inner_iterations,
            );
        }
    }
    Ok(())
}

fn cmd_check(args: &CheckArgs) -> Result<(), Failure> {
    let opts = CheckOptions {
        seed: args.seed,
        samples: args.samples,
        fault: args.inject_fault.map(|f| match f {
            FaultArg::Gradient => Fault::Gradient,
            FaultArg::Conjugate => Fault::Conjugate,
            FaultArg::Subgradient => Fault::Subgradient,
        }),
    };
    let suites = selfcheck::run_all(&opts);
    for s in &suites {
        println!("{s}");
    }
    match suites.iter().find(|s| !s.passed()) {
        Some(s) => Err(Failure::Check(format!(
            "suite {} failed: {}",
            s.name,
            s.first_failure.as_deref().unwrap_or("no cases ran")
        ))),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot start {n} threads: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    }
    let result = match &cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::RadialSearch(a) => cmd_radial(a),
        Command::EvalCost(a) => cmd_eval(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Check(a) => cmd_check(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
        Err(Failure::Check(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_CHECK)
        }
    }
}
