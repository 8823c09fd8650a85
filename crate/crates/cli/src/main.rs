//! `retecs` — replay CI test histories under different prioritization
//! methods and report NAPFD results as tidy CSV.

use std::fs::File;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use retecs_core::evaluation::{block_differences, write_blocks_csv, write_results_csv};
use retecs_core::experiment::{
    run_experiment, sweep_history_length, sweep_schedule_ratio, ExperimentConfig, Method,
};
use retecs_core::ingestion::{
    generate_synthetic, load_csv, write_csv, CsvOptions, SyntheticSpec, VerdictConvention,
};
use retecs_core::{Dataset64, Error, RewardKind};

#[derive(Parser)]
#[command(
    name = "retecs",
    version,
    about = "Adaptive test case prioritization and selection over replayed CI histories"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write per-cycle NAPFD results
    Run(RunArgs),
    /// Compare two methods block-wise over the same dataset
    Compare(CompareArgs),
    /// Sweep the history length or the schedule-time ratio
    Sweep(SweepArgs),
    /// Generate a synthetic CI history CSV
    Generate(GenerateArgs),
}

/// Dataset source: a CSV file, or an inline synthetic spec.
#[derive(Args)]
struct DataArgs {
    /// CI history CSV (`cycle,test_id,duration,verdict` with a header)
    #[arg(long)]
    data: Option<PathBuf>,

    /// Interpret verdict 1 as "failed" instead of "passed"
    #[arg(long)]
    verdict_one_failed: bool,

    /// Synthetic: number of tests (enables synthetic data when --data is absent)
    #[arg(long)]
    gen_tests: Option<usize>,

    /// Synthetic: number of cycles
    #[arg(long)]
    gen_cycles: Option<usize>,

    /// Synthetic: stationary failure probability
    #[arg(long, default_value_t = 0.1)]
    failure_rate: f64,

    /// Synthetic: P(fail | failed in previous cycle)
    #[arg(long, default_value_t = 0.0)]
    temporal_correlation: f64,

    /// Synthetic: per-test per-cycle replacement probability
    #[arg(long, default_value_t = 0.0)]
    churn_rate: f64,

    /// Synthetic: minimum test duration in seconds
    #[arg(long, default_value_t = 1.0)]
    dur_min: f64,

    /// Synthetic: maximum test duration in seconds
    #[arg(long, default_value_t = 10.0)]
    dur_max: f64,

    /// Synthetic: generator seed
    #[arg(long, default_value_t = 1)]
    gen_seed: u64,
}

impl DataArgs {
    fn synthetic_spec(&self) -> Result<SyntheticSpec, CliError> {
        let (Some(n_tests), Some(n_cycles)) = (self.gen_tests, self.gen_cycles) else {
            return Err(CliError::Usage(
                "either --data FILE or both --gen-tests and --gen-cycles are required".into(),
            ));
        };
        Ok(SyntheticSpec {
            n_tests,
            n_cycles,
            failure_rate: self.failure_rate,
            temporal_correlation: self.temporal_correlation,
            churn_rate: self.churn_rate,
            duration_range: (self.dur_min, self.dur_max),
            seed: self.gen_seed,
        })
    }

    fn load(&self) -> Result<Dataset64, CliError> {
        match &self.data {
            Some(path) => {
                let options = CsvOptions {
                    verdict: if self.verdict_one_failed {
                        VerdictConvention::OneIsFailed
                    } else {
                        VerdictConvention::OneIsPassed
                    },
                };
                Ok(load_csv(path, &options)?)
            }
            None => Ok(generate_synthetic(&self.synthetic_spec()?)?),
        }
    }
}

/// Experiment settings; CLI flags override the config file, which overrides
/// the defaults.
#[derive(Args)]
struct ExperimentArgs {
    /// Flat `key = value` config file (keys match the documented set)
    #[arg(long)]
    config: Option<PathBuf>,

    /// random | sorting | weighting | tableau | network
    #[arg(long, value_parser = Method::from_str)]
    method: Option<Method>,

    /// failcount | tcfail | timerank
    #[arg(long, value_parser = RewardKind::from_str)]
    reward: Option<RewardKind>,

    /// Repetitions to average over
    #[arg(long)]
    reps: Option<usize>,

    /// Base seed; repetition i uses seed + i
    #[arg(long)]
    seed: Option<u64>,

    /// Verdict history length
    #[arg(long)]
    history: Option<usize>,

    /// Cycle time budget as a fraction of the full suite duration
    #[arg(long)]
    ratio: Option<f64>,

    /// Worker threads for repetitions (1 = sequential, 0 = all cores)
    #[arg(long)]
    jobs: Option<usize>,
}

impl ExperimentArgs {
    fn build(&self) -> Result<ExperimentConfig, CliError> {
        let mut config = ExperimentConfig::default();
        if let Some(path) = &self.config {
            config.apply_config_file(path)?;
        }
        if let Some(method) = self.method {
            config.method = method;
        }
        if let Some(reward) = self.reward {
            config.reward = reward;
        }
        if let Some(reps) = self.reps {
            config.repetitions = reps;
        }
        if let Some(seed) = self.seed {
            config.base_seed = seed;
        }
        if let Some(history) = self.history {
            config.history_length = history;
        }
        if let Some(ratio) = self.ratio {
            config.schedule_ratio = ratio;
        }
        if let Some(jobs) = self.jobs {
            config.jobs = jobs;
        }
        config.validate().map_err(CliError::usage_from)?;
        Ok(config)
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    experiment: ExperimentArgs,
    /// Results CSV path
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    experiment: ExperimentArgs,
    /// First method (A)
    #[arg(long, value_parser = Method::from_str)]
    method_a: Method,
    /// Reward for method A
    #[arg(long, value_parser = RewardKind::from_str, default_value = "tcfail")]
    reward_a: RewardKind,
    /// Second method (B)
    #[arg(long, value_parser = Method::from_str)]
    method_b: Method,
    /// Reward for method B
    #[arg(long, value_parser = RewardKind::from_str, default_value = "tcfail")]
    reward_b: RewardKind,
    /// Cycles per comparison block
    #[arg(long, default_value_t = 30)]
    block: usize,
    /// Block-difference CSV path
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    experiment: ExperimentArgs,
    /// What to sweep: history | ratio
    #[arg(long)]
    param: String,
    /// Comma-separated values, e.g. `1,2,4,8` or `0.1,0.5,0.9`
    #[arg(long)]
    values: String,
    /// Sweep table CSV path
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct GenerateArgs {
    /// Number of tests
    #[arg(long)]
    tests: usize,
    /// Number of cycles
    #[arg(long)]
    cycles: usize,
    #[arg(long, default_value_t = 0.1)]
    failure_rate: f64,
    #[arg(long, default_value_t = 0.0)]
    temporal_correlation: f64,
    #[arg(long, default_value_t = 0.0)]
    churn_rate: f64,
    #[arg(long, default_value_t = 1.0)]
    dur_min: f64,
    #[arg(long, default_value_t = 10.0)]
    dur_max: f64,
    /// Generator seed
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Dataset CSV path
    #[arg(long)]
    out: PathBuf,
}

enum CliError {
    /// Bad arguments: exit 2.
    Usage(String),
    /// Dataset / IO problems: exit 1.
    Data(Error),
}

impl CliError {
    /// Configuration errors are argument problems; everything else coming
    /// out of the core is a data error.
    fn usage_from(error: Error) -> Self {
        CliError::Usage(error.to_string())
    }
}

impl From<Error> for CliError {
    fn from(error: Error) -> Self {
        match error {
            Error::Config(_) => CliError::Usage(error.to_string()),
            other => CliError::Data(other),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(message)) => {
            eprintln!("error: {message}");
            eprintln!("run `retecs --help` for usage");
            ExitCode::from(2)
        }
        Err(CliError::Data(error)) => {
            eprintln!("error: {error}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Compare(args) => cmd_compare(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Generate(args) => cmd_generate(args),
    }
}

fn cmd_run(args: RunArgs) -> Result<(), CliError> {
    let dataset = args.data.load()?;
    let config = args.experiment.build()?;
    let result = run_experiment(&dataset, &config)?;
    let file = File::create(&args.out).map_err(|e| CliError::Data(e.into()))?;
    write_results_csv(
        file,
        config.method.token(),
        config.reward.token(),
        &result.per_rep,
    )?;
    println!(
        "mean NAPFD {:.4} over {} cycles x {} repetitions (method={}, reward={}, dataset={}) -> {}",
        result.summary.overall_mean,
        dataset.cycle_count(),
        config.repetitions,
        config.method,
        config.reward,
        dataset.name,
        args.out.display()
    );
    Ok(())
}

fn cmd_compare(args: CompareArgs) -> Result<(), CliError> {
    if args.block < 1 {
        return Err(CliError::Usage("--block must be >= 1".into()));
    }
    let dataset = args.data.load()?;
    let base = args.experiment.build()?;

    let mut config_a = base.clone();
    config_a.method = args.method_a;
    config_a.reward = args.reward_a;
    let mut config_b = base;
    config_b.method = args.method_b;
    config_b.reward = args.reward_b;

    let result_a = run_experiment(&dataset, &config_a)?;
    let result_b = run_experiment(&dataset, &config_b)?;
    let blocks = block_differences(&result_a.summary, &result_b.summary, args.block)?;
    let file = File::create(&args.out).map_err(|e| CliError::Data(e.into()))?;
    write_blocks_csv(file, &blocks)?;
    println!(
        "{}+{} vs {}+{}: overall NAPFD {:.4} vs {:.4} over {} blocks -> {}",
        config_a.method,
        config_a.reward,
        config_b.method,
        config_b.reward,
        result_a.summary.overall_mean,
        result_b.summary.overall_mean,
        blocks.len(),
        args.out.display()
    );
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> Result<(), CliError> {
    let dataset = args.data.load()?;
    let config = args.experiment.build()?;

    let rows: Vec<(String, f64)> = match args.param.as_str() {
        "history" => {
            let lengths = parse_values::<usize>(&args.values)?;
            sweep_history_length(&dataset, &config, &lengths)?
                .into_iter()
                .map(|(length, mean)| (length.to_string(), mean))
                .collect()
        }
        "ratio" => {
            let ratios = parse_values::<f64>(&args.values)?;
            sweep_schedule_ratio(&dataset, &config, &ratios)?
                .into_iter()
                .map(|(ratio, mean)| (ratio.to_string(), mean))
                .collect()
        }
        other => {
            return Err(CliError::Usage(format!(
                "unknown sweep parameter `{other}` (expected history|ratio)"
            )))
        }
    };

    let file = File::create(&args.out).map_err(|e| CliError::Data(e.into()))?;
    write_sweep_csv(file, &args.param, &rows)?;
    println!(
        "swept {} over {} values (method={}, reward={}) -> {}",
        args.param,
        rows.len(),
        config.method,
        config.reward,
        args.out.display()
    );
    Ok(())
}

fn write_sweep_csv(
    writer: impl std::io::Write,
    param: &str,
    rows: &[(String, f64)],
) -> Result<(), Error> {
    let mut out = csv_writer(writer);
    out.write_record(["param", "value", "mean_napfd"])?;
    for (value, mean) in rows {
        let fields = [param.to_string(), value.clone(), mean.to_string()];
        out.write_record(&fields)?;
    }
    out.flush()?;
    Ok(())
}

fn csv_writer<W: std::io::Write>(writer: W) -> csv::Writer<W> {
    csv::Writer::from_writer(writer)
}

fn cmd_generate(args: GenerateArgs) -> Result<(), CliError> {
    let spec = SyntheticSpec {
        n_tests: args.tests,
        n_cycles: args.cycles,
        failure_rate: args.failure_rate,
        temporal_correlation: args.temporal_correlation,
        churn_rate: args.churn_rate,
        duration_range: (args.dur_min, args.dur_max),
        seed: args.seed,
    };
    let dataset: Dataset64 = generate_synthetic(&spec)?;
    write_csv(&dataset, &args.out)?;
    println!(
        "generated {} cycles x {} tests ({} executions) -> {}",
        dataset.cycle_count(),
        spec.n_tests,
        dataset.verdict_count(),
        args.out.display()
    );
    Ok(())
}

fn parse_values<T: FromStr>(values: &str) -> Result<Vec<T>, CliError> {
    let parsed: Result<Vec<T>, _> = values.split(',').map(|v| v.trim().parse::<T>()).collect();
    match parsed {
        Ok(list) if !list.is_empty() => Ok(list),
        _ => Err(CliError::Usage(format!(
            "--values must be a non-empty comma-separated list, got `{values}`"
        ))),
    }
}
