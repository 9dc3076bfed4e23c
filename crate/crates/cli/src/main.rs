mod config;

use std::fs::File;
use std::io::{self, Read, Write};
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::{info, warn};
use ngppca::baselines::Baseline;
use ngppca::evidence::SampleSummary;
use ngppca::io::{read_csv_from, write_curves_csv, write_matrix_csv, IoError, ReportDocument};
use ngppca::linalg::DataMatrix;
use ngppca::rng::RngStream;
use ngppca::selection::{default_phi_grid, log_spaced, SelectionOptions, SlopeTest, DEFAULT_GRID_SIZE};
use ngppca::simulation::{run_benchmark, simulate_isotropic, BenchmarkConfig, Method, SimConfig};
use ngppca::SigmaConvention;

use config::RunConfig;

/// Latent dimension selection for PCA by exact normal-gamma evidence.
#[derive(Debug, Parser)]
#[command(name = "ngppca", version)]
struct Cli {
    /// Worker threads for parallel sections (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// More log output on stderr; repeat for more.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Select the latent dimension of a data set and write a JSON report.
    Select(SelectArgs),
    /// Run the baseline selectors and print their choices as CSV.
    Baselines(DataArgs),
    /// Simulate an isotropic PPCA data set as CSV.
    Simulate(SimulateArgs),
    /// Run the simulation benchmark and print the accuracy table as CSV.
    Benchmark(BenchmarkArgs),
    /// Evidence curve over d at a fixed phi, as CSV.
    Curve(CurveArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ConventionArg {
    Variance,
    MeanEigenvalue,
}

impl From<ConventionArg> for SigmaConvention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::Variance => SigmaConvention::Variance,
            ConventionArg::MeanEigenvalue => SigmaConvention::MeanEigenvalue,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SlopeArg {
    Magnitude,
    Signed,
}

impl From<SlopeArg> for SlopeTest {
    fn from(s: SlopeArg) -> Self {
        match s {
            SlopeArg::Magnitude => SlopeTest::Magnitude,
            SlopeArg::Signed => SlopeTest::Signed,
        }
    }
}

#[derive(Debug, Args)]
struct DataArgs {
    /// Input CSV, one observation per row; `-` or absent reads stdin.
    #[arg(long)]
    input: Option<PathBuf>,

    /// TOML file with defaults for any of the options below.
    #[arg(long)]
    config: Option<PathBuf>,

    /// The first row is a header.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    has_header: Option<bool>,

    /// Subtract column means first; with `false` the data must already be centred.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    center: Option<bool>,

    #[arg(long)]
    d_min: Option<usize>,

    #[arg(long)]
    d_max: Option<usize>,

    #[arg(long, value_enum)]
    sigma_convention: Option<ConventionArg>,

    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SelectArgs {
    #[command(flatten)]
    data: DataArgs,

    /// Smallest grid value of phi (default 1e-2 / mean eigenvalue).
    #[arg(long)]
    phi_min: Option<f64>,

    /// Largest grid value of phi (default 1e2 / mean eigenvalue).
    #[arg(long)]
    phi_max: Option<f64>,

    /// Number of log-spaced grid points.
    #[arg(long)]
    phi_count: Option<usize>,

    #[arg(long, value_enum)]
    slope_test: Option<SlopeArg>,

    /// Also write every curve of the phi sweep to this CSV.
    #[arg(long)]
    curves: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CurveArgs {
    #[command(flatten)]
    data: DataArgs,

    #[arg(long)]
    phi: f64,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    p: usize,
    #[arg(long)]
    d: usize,
    #[arg(long)]
    snr: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0)]
    stream: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BenchmarkArgs {
    #[arg(long, value_delimiter = ',', default_values_t = ngppca::simulation::DEFAULT_N_VALUES)]
    n_values: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = ngppca::simulation::DEFAULT_SNR_VALUES)]
    snr_values: Vec<f64>,
    #[arg(long, default_value_t = 50)]
    p: usize,
    #[arg(long, default_value_t = 20)]
    d: usize,
    #[arg(long, default_value_t = 50)]
    reps: usize,
    /// Comma-separated subset of ng, laplace, profile_likelihood, isotropic_ml.
    #[arg(long, value_delimiter = ',')]
    methods: Option<Vec<String>>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = ConventionArg::Variance)]
    sigma_convention: ConventionArg,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// A failed run, classified by exit code.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Data(String),
    Numeric(String),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Data(_) => 2,
            Failure::Numeric(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Data(m) | Failure::Numeric(m) => m,
        }
    }
}

impl From<ngppca::Error> for Failure {
    fn from(e: ngppca::Error) -> Self {
        use ngppca::Error as E;
        match e {
            E::Config(_) => Failure::Usage(e.to_string()),
            E::Precondition(_) | E::ZeroNorm { .. } => Failure::Data(e.to_string()),
            _ => Failure::Numeric(e.to_string()),
        }
    }
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        match e {
            IoError::Data(inner) => inner.into(),
            other => Failure::Data(format!("{} [{}]", other, other.code())),
        }
    }
}

fn write_failure(path: Option<&Path>) -> impl FnOnce(io::Error) -> Failure + '_ {
    move |e| match path {
        Some(p) => Failure::Data(format!("{}: {e}", p.display())),
        None => Failure::Data(format!("stdout: {e}")),
    }
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    match path {
        Some(p) => Ok(Box::new(File::create(p).map_err(write_failure(Some(p)))?)),
        None => Ok(Box::new(io::stdout().lock())),
    }
}

fn emit(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    let mut out = open_output(path)?;
    out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(write_failure(path))
}

fn load_data(input: Option<&Path>, cfg: &RunConfig) -> Result<DataMatrix, Failure> {
    let x = match input {
        Some(p) if p != Path::new("-") => {
            let file = File::open(p).map_err(|e| Failure::Data(format!("{}: {e}", p.display())))?;
            read_csv_from(file, cfg.has_header)?
        }
        _ => {
            let mut buf = Vec::new();
            io::stdin().read_to_end(&mut buf).map_err(|e| Failure::Data(format!("stdin: {e}")))?;
            read_csv_from(buf.as_slice(), cfg.has_header)?
        }
    };
    info!("read {} observations of dimension {}", x.nrows(), x.ncols());
    Ok(if cfg.center { x.center() } else { x.assume_centered(1e-10)? })
}

fn d_range(cfg: &RunConfig, summary: &SampleSummary) -> RangeInclusive<usize> {
    let default = summary.default_d_range();
    cfg.d_min.unwrap_or(*default.start())..=cfg.d_max.unwrap_or(*default.end())
}

fn phi_grid(cfg: &RunConfig, summary: &SampleSummary) -> Result<Vec<f64>, Failure> {
    let count = cfg.phi_count.unwrap_or(DEFAULT_GRID_SIZE);
    let default = default_phi_grid(summary.spectrum(), count.max(2))?;
    let lo = cfg.phi_min.unwrap_or(default[0]);
    let hi = cfg.phi_max.unwrap_or(default[default.len() - 1]);
    Ok(log_spaced(lo, hi, count)?)
}

fn cmd_select(args: SelectArgs) -> Result<(), Failure> {
    let cfg = RunConfig::resolve(&args.data, Some(&args))?;
    let x = load_data(args.data.input.as_deref(), &cfg)?;
    let summary = SampleSummary::new(&x)?;
    let range = d_range(&cfg, &summary);
    let grid = phi_grid(&cfg, &summary)?;
    let options = SelectionOptions {
        phi_grid: Some(grid.clone()),
        d_range: Some(range.clone()),
        convention: cfg.convention,
        slope_test: cfg.slope_test,
    };
    let report = summary.select(&options)?;
    for w in &report.warnings {
        warn!("{w}");
    }
    if let Some(path) = &args.curves {
        let curves = summary.curves(&grid, range, cfg.convention)?;
        let file = File::create(path).map_err(write_failure(Some(path)))?;
        write_curves_csv(&curves, file).map_err(write_failure(Some(path)))?;
    }
    emit(args.data.out.as_deref(), &ReportDocument::from(&report).to_json())
}

fn cmd_curve(args: CurveArgs) -> Result<(), Failure> {
    if !(args.phi > 0.0 && args.phi.is_finite()) {
        return Err(Failure::Usage(format!("--phi must be positive, got {}", args.phi)));
    }
    let cfg = RunConfig::resolve(&args.data, None)?;
    let x = load_data(args.data.input.as_deref(), &cfg)?;
    let summary = SampleSummary::new(&x)?;
    let curve = summary.curve(args.phi, d_range(&cfg, &summary), cfg.convention)?;
    let out = open_output(args.data.out.as_deref())?;
    write_curves_csv(&[curve], out).map_err(write_failure(args.data.out.as_deref()))
}

fn cmd_baselines(args: DataArgs) -> Result<(), Failure> {
    let cfg = RunConfig::resolve(&args, None)?;
    let x = load_data(args.input.as_deref(), &cfg)?;
    let summary = SampleSummary::new(&x)?;
    let range = d_range(&cfg, &summary);
    let mut out = String::from("method,chosen_d\n");
    for b in Baseline::ALL {
        let r = b.select(summary.spectrum(), summary.n(), range.clone())?;
        out.push_str(&format!("{},{}\n", b, r.chosen_d));
    }
    emit(args.out.as_deref(), &out)
}

fn cmd_simulate(args: SimulateArgs) -> Result<(), Failure> {
    let cfg = SimConfig { n: args.n, p: args.p, d_true: args.d, snr: args.snr, seed: args.seed };
    cfg.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    let x = simulate_isotropic(&cfg, &mut RngStream::new(args.seed, args.stream))?;
    let out = open_output(args.out.as_deref())?;
    write_matrix_csv(x.values(), out).map_err(write_failure(args.out.as_deref()))
}

fn cmd_benchmark(args: BenchmarkArgs, threads: Option<usize>) -> Result<(), Failure> {
    let methods = match &args.methods {
        Some(names) => names.iter().map(|s| s.parse::<Method>()).collect::<Result<Vec<_>, _>>()?,
        None => Method::ALL.to_vec(),
    };
    let config = BenchmarkConfig {
        n_values: args.n_values,
        snr_values: args.snr_values,
        p: args.p,
        d_true: args.d,
        replications: args.reps,
        methods,
        master_seed: args.seed,
        threads,
        convention: args.sigma_convention.into(),
    };
    let table = run_benchmark(&config).map_err(|e| match e {
        ngppca::Error::Domain { .. } => Failure::Usage(e.to_string()),
        other => other.into(),
    })?;
    for c in table.cells.iter().filter(|c| c.failed > 0) {
        warn!("{} failed on {} of {} replications at n={}, snr={}", c.method, c.failed, c.replications, c.n, c.snr());
    }
    emit(args.out.as_deref(), &table.to_csv())
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(Failure::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Failure::Usage(format!("could not start thread pool: {e}")))?;
    }
    match cli.command {
        Command::Select(a) => cmd_select(a),
        Command::Baselines(a) => cmd_baselines(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Benchmark(a) => cmd_benchmark(a, cli.threads),
        Command::Curve(a) => cmd_curve(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).format_timestamp(None).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.exit_code())
        }
    }
}
