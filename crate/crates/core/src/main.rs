use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use swarmwalk::harness::{
    format_table, read_results, run_experiment, run_single, sort_stats, stats_to_csv,
    write_results, write_runs, CellKey, OutputFormat,
};
use swarmwalk::{Algorithm, Benchmark, Error, ExperimentSpec};

#[derive(Debug, Parser)]
#[command(
    name = "swarmwalk",
    version,
    about = "Random-walk PSO benchmark harness"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run an experiment sweep and write aggregate results.
    Run(RunArgs),
    /// Pretty-print a results file as a side-by-side table.
    Table(TableArgs),
    /// Emit the best-fitness-per-iteration series of a single run.
    Trace(TraceArgs),
}

#[derive(Debug, Args)]
struct Overrides {
    /// JSON experiment config.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long = "function", value_parser = parse_function)]
    functions: Vec<Benchmark>,
    #[arg(long = "algo", value_parser = parse_algorithm)]
    algorithms: Vec<Algorithm>,
    #[arg(long = "pop")]
    populations: Vec<usize>,
    #[arg(long = "dim")]
    dimensions: Vec<usize>,
    #[arg(long = "max-iter")]
    max_iterations: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Fitness threshold for every selected function.
    #[arg(long)]
    threshold: Option<f64>,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[command(flatten)]
    overrides: Overrides,
    #[arg(long)]
    runs: Option<usize>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format; inferred from the --out extension when absent.
    #[arg(long, value_parser = parse_format)]
    format: Option<OutputFormat>,
    /// CSV of externally obtained rows (same columns) merged into the output.
    #[arg(long)]
    baseline: Option<PathBuf>,
    /// Per-run CSV with the seed of every run.
    #[arg(long)]
    runs_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct TableArgs {
    /// Results file (CSV or .json).
    input: PathBuf,
    /// Extra rows to show alongside, e.g. transcribed baseline numbers.
    #[arg(long)]
    baseline: Vec<PathBuf>,
}

#[derive(Debug, Args)]
struct TraceArgs {
    #[command(flatten)]
    overrides: Overrides,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_function(s: &str) -> Result<Benchmark, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_algorithm(s: &str) -> Result<Algorithm, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_format(s: &str) -> Result<OutputFormat, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Usage problems exit with 2, run failures with 1.
enum Failure {
    Usage(String),
    Run(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_)
            | Error::Parameter(_)
            | Error::Dimension(_)
            | Error::Arity { .. }
            | Error::Json { .. } => Failure::Usage(e.to_string()),
            other => Failure::Run(other.to_string()),
        }
    }
}

impl Overrides {
    fn spec(&self) -> Result<ExperimentSpec, Failure> {
        let mut spec = match &self.config {
            Some(path) => ExperimentSpec::from_json_file(path).map_err(|e| match e {
                Error::Io { .. } => Failure::Usage(e.to_string()),
                other => other.into(),
            })?,
            None => ExperimentSpec::default(),
        };
        if !self.functions.is_empty() {
            spec.functions.clone_from(&self.functions);
        }
        if !self.algorithms.is_empty() {
            spec.algorithms.clone_from(&self.algorithms);
        }
        if !self.populations.is_empty() {
            spec.population_sizes.clone_from(&self.populations);
        }
        if !self.dimensions.is_empty() {
            spec.dimensions.clone_from(&self.dimensions);
        }
        if let Some(n) = self.max_iterations {
            spec.max_iterations = n;
        }
        if let Some(seed) = self.seed {
            spec.base_seed = seed;
        }
        if let Some(t) = self.threshold {
            for &f in &spec.functions {
                spec.fitness_thresholds.insert(f, Some(t));
            }
        }
        Ok(spec)
    }
}

fn format_for(path: Option<&Path>, explicit: Option<OutputFormat>) -> OutputFormat {
    explicit.unwrap_or_else(|| match path {
        Some(p) if p.extension().is_some_and(|e| e == "json") => OutputFormat::Json,
        _ => OutputFormat::Csv,
    })
}

fn cmd_run(args: &RunArgs) -> Result<(), Failure> {
    let mut spec = args.overrides.spec()?;
    if let Some(runs) = args.runs {
        spec.runs_per_cell = runs;
    }
    spec.validate()?;
    let report = run_experiment(&spec)?;
    let mut stats = report.stats;
    if let Some(path) = &args.baseline {
        stats.extend(read_results(path)?);
        sort_stats(&mut stats);
    }
    let format = format_for(args.out.as_deref(), args.format);
    match &args.out {
        Some(path) => write_results(&stats, path, format)?,
        None => {
            let stdout = io::stdout().lock();
            match format {
                OutputFormat::Csv => {
                    stats_to_csv(&stats, stdout).map_err(|e| Failure::Run(e.to_string()))?
                }
                OutputFormat::Json => {
                    let mut out = stdout;
                    serde_json::to_writer_pretty(&mut out, &stats)
                        .map_err(|e| Failure::Run(e.to_string()))?;
                    writeln!(out).map_err(|e| Failure::Run(e.to_string()))?;
                }
            }
        }
    }
    if let Some(path) = &args.runs_out {
        write_runs(&report.runs, path)?;
    }
    if !report.failures.is_empty() {
        for f in &report.failures {
            eprintln!("cell {} failed: {}", f.cell, f.message);
        }
        return Err(Failure::Run(format!(
            "{} cell(s) failed",
            report.failures.len()
        )));
    }
    Ok(())
}

fn cmd_table(args: &TableArgs) -> Result<(), Failure> {
    let mut stats = read_results(&args.input)?;
    for path in &args.baseline {
        stats.extend(read_results(path)?);
    }
    print!("{}", format_table(&stats));
    Ok(())
}

fn single<T: Copy>(values: &[T], flag: &str) -> Result<Option<T>, Failure> {
    match values {
        [x] => Ok(Some(*x)),
        [] => Ok(None),
        _ => Err(Failure::Usage(format!("trace takes a single --{flag}"))),
    }
}

fn cmd_trace(args: &TraceArgs) -> Result<(), Failure> {
    let o = &args.overrides;
    let spec = o.spec()?;
    let algorithm = single(&o.algorithms, "algo")?.unwrap_or(Algorithm::Rwpso);
    let function = single(&o.functions, "function")?.unwrap_or(spec.functions[0]);
    let population = single(&o.populations, "pop")?.unwrap_or(spec.population_sizes[0]);
    let dimension = match single(&o.dimensions, "dim")? {
        Some(d) => d,
        None => function.fixed_dim().unwrap_or(spec.dimensions[0]),
    };
    let cell = CellKey {
        algorithm,
        function,
        population,
        dimension,
    };
    let seed = o.seed.unwrap_or(spec.base_seed);
    let result = run_single(&spec, &cell, seed)?;

    let mut text = String::from("iteration,best_fitness\n");
    for (i, f) in result.trace.iter().enumerate() {
        text.push_str(&format!("{},{}\n", i + 1, f));
    }
    match &args.out {
        Some(path) => std::fs::write(path, text).map_err(|source| {
            Failure::from(Error::Io {
                path: path.clone(),
                source,
            })
        })?,
        None => print!("{text}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let outcome = match &cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Table(args) => cmd_table(args),
        Command::Trace(args) => cmd_trace(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Run(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
