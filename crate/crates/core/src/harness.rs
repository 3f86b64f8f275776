//! Factorial benchmark sweeps over algorithm x function x population x dimension.
//!
//! Every cell runs `runs_per_cell` independent seeded runs and reduces them
//! to an [`AggregateStats`] row. Cells and runs execute on a rayon pool;
//! output order is canonical, so results are byte-identical regardless of
//! scheduling.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objective::{schaffer_domain, Benchmark, ObjectiveSpec, Position, SearchDomain, Sense};
use crate::pso::{pso_run, PsoConfig};
use crate::rwpso::{rwpso_run, RwpsoConfig};

pub const DEFAULT_BEST_FRACTION: f64 = 0.8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Rwpso,
    Pso,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Rwpso => "rwpso",
            Algorithm::Pso => "pso",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rwpso" => Ok(Algorithm::Rwpso),
            "pso" => Ok(Algorithm::Pso),
            other => Err(Error::Config(format!("unknown algorithm `{other}`"))),
        }
    }
}

/// Final state of a run, as handed over by an algorithm.
#[derive(Debug, Clone)]
pub struct RunRecord {
    pub best_fitness: f64,
    pub best_position: Position,
    pub trace: Vec<f64>,
    pub final_fitnesses: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub algorithm: Algorithm,
    pub function: Benchmark,
    pub population: usize,
    pub dimension: usize,
    pub seed: u64,
    pub iterations_used: usize,
    pub best_fitness: f64,
    pub best_position: Position,
    /// Best-so-far fitness after each iteration.
    pub trace: Vec<f64>,
    pub final_fitnesses: Vec<f64>,
    /// Mean of the best fraction of the final swarm (see [`mean_best_fitness`]).
    pub mean_best: f64,
    pub reached_threshold: bool,
}

impl RunResult {
    pub fn from_record(
        algorithm: Algorithm,
        objective: &ObjectiveSpec,
        seed: u64,
        threshold: Option<f64>,
        record: RunRecord,
    ) -> Result<Self> {
        let mean_best = mean_best_fitness(
            &record.final_fitnesses,
            DEFAULT_BEST_FRACTION,
            objective.sense,
        )?;
        Ok(Self {
            algorithm,
            function: objective.function,
            population: record.final_fitnesses.len(),
            dimension: objective.dim(),
            seed,
            iterations_used: record.trace.len(),
            reached_threshold: threshold
                .is_some_and(|t| objective.sense.reached(record.best_fitness, t)),
            best_fitness: record.best_fitness,
            best_position: record.best_position,
            trace: record.trace,
            final_fitnesses: record.final_fitnesses,
            mean_best,
        })
    }
}

/// Mean of the best `ceil(fraction * N)` values.
pub fn mean_best_fitness(fitnesses: &[f64], fraction: f64, sense: Sense) -> Result<f64> {
    if fitnesses.is_empty() {
        return Err(Error::Dimension(
            "mean best fitness of an empty swarm".into(),
        ));
    }
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::Parameter(format!(
            "best fraction must lie in (0, 1], got {fraction}"
        )));
    }
    let mut sorted = fitnesses.to_vec();
    sorted.sort_by(|a, b| sense.cmp_best_first(*a, *b));
    let keep = ((fraction * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    Ok(sorted[..keep].iter().sum::<f64>() / keep as f64)
}

/// Overrides of a function's default domain and scalarization.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ObjectiveOverride {
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub init_lower: Option<f64>,
    pub init_upper: Option<f64>,
    pub weights: Option<Vec<f64>>,
    /// Schaffer N.1 half-width `A`.
    pub bound: Option<f64>,
}

/// Default iterations-to-threshold targets.
pub fn default_threshold(function: Benchmark) -> Option<f64> {
    match function {
        Benchmark::Sphere => Some(1e-2),
        Benchmark::Rosenbrock => Some(100.0),
        Benchmark::Rastrigin => Some(50.0),
        Benchmark::Binh4 | Benchmark::SchafferN1 => None,
    }
}

/// A full sweep, as read from the JSON config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentSpec {
    pub functions: Vec<Benchmark>,
    pub algorithms: Vec<Algorithm>,
    pub population_sizes: Vec<usize>,
    pub dimensions: Vec<usize>,
    pub runs_per_cell: usize,
    pub max_iterations: usize,
    /// Per-function thresholds; `null` disables the threshold, a missing
    /// entry falls back to [`default_threshold`].
    pub fitness_thresholds: BTreeMap<Benchmark, Option<f64>>,
    pub base_seed: u64,
    pub best_fraction: f64,
    pub objectives: BTreeMap<Benchmark, ObjectiveOverride>,
    /// Algorithm parameters. Swarm size, iteration cap, threshold and seed
    /// are set per cell and ignored here.
    pub rwpso: RwpsoConfig,
    pub pso: PsoConfig,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        Self {
            functions: vec![
                Benchmark::Sphere,
                Benchmark::Rosenbrock,
                Benchmark::Rastrigin,
            ],
            algorithms: vec![Algorithm::Rwpso, Algorithm::Pso],
            population_sizes: vec![20, 40, 80, 160],
            dimensions: vec![10, 20, 30],
            runs_per_cell: 50,
            max_iterations: 1000,
            fitness_thresholds: BTreeMap::new(),
            base_seed: 0,
            best_fraction: DEFAULT_BEST_FRACTION,
            objectives: BTreeMap::new(),
            rwpso: RwpsoConfig::default(),
            pso: PsoConfig::default(),
        }
    }
}

/// One cell of the sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CellKey {
    pub algorithm: Algorithm,
    pub function: Benchmark,
    pub population: usize,
    pub dimension: usize,
}

impl fmt::Display for CellKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}/{}/pop={}/dim={}",
            self.algorithm, self.function, self.population, self.dimension
        )
    }
}

impl ExperimentSpec {
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|source| Error::Io {
            path: path.to_owned(),
            source,
        })?;
        serde_json::from_reader(BufReader::new(file)).map_err(|source| Error::Json {
            path: path.to_owned(),
            source,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.algorithms.is_empty() {
            return Err(Error::Config("no algorithms selected".into()));
        }
        if self.functions.is_empty() {
            return Err(Error::Config("no functions selected".into()));
        }
        if self.population_sizes.is_empty() || self.population_sizes.iter().any(|&p| p < 2) {
            return Err(Error::Config(
                "population sizes must be non-empty and >= 2".into(),
            ));
        }
        if self.dimensions.is_empty() || self.dimensions.contains(&0) {
            return Err(Error::Config(
                "dimensions must be non-empty and >= 1".into(),
            ));
        }
        if self.runs_per_cell == 0 {
            return Err(Error::Config("runs_per_cell must be >= 1".into()));
        }
        if self.max_iterations == 0 {
            return Err(Error::Config("max_iterations must be >= 1".into()));
        }
        if !(self.best_fraction > 0.0 && self.best_fraction <= 1.0) {
            return Err(Error::Config(format!(
                "best_fraction must lie in (0, 1], got {}",
                self.best_fraction
            )));
        }
        for cell in self.cells() {
            self.objective(cell.function, cell.dimension)?;
            match cell.algorithm {
                Algorithm::Rwpso => self.rwpso_config(&cell, 0).validate()?,
                Algorithm::Pso => self.pso_config(&cell, 0).validate()?,
            }
        }
        Ok(())
    }

    pub fn threshold(&self, function: Benchmark) -> Option<f64> {
        match self.fitness_thresholds.get(&function) {
            Some(t) => *t,
            None => default_threshold(function),
        }
    }

    /// The objective for `function` in `dim` dimensions with any overrides applied.
    pub fn objective(&self, function: Benchmark, dim: usize) -> Result<ObjectiveSpec> {
        let mut objective = ObjectiveSpec::standard(function, dim)?;
        let Some(ov) = self.objectives.get(&function) else {
            return Ok(objective);
        };
        if let Some(bound) = ov.bound {
            if function != Benchmark::SchafferN1 {
                return Err(Error::Config(format!(
                    "`bound` only applies to schaffer_n1, not {function}"
                )));
            }
            objective.domain = schaffer_domain(bound)?;
        }
        let d = &objective.domain;
        let pick =
            |v: Option<f64>, default: &[f64]| v.map_or_else(|| default.to_vec(), |v| vec![v; dim]);
        objective.domain = SearchDomain::new(
            pick(ov.lower, &d.lower),
            pick(ov.upper, &d.upper),
            pick(ov.init_lower, &d.init_lower),
            pick(ov.init_upper, &d.init_upper),
        )?;
        if let Some(w) = &ov.weights {
            objective.scalarization_weights.clone_from(w);
        }
        objective.validate()?;
        Ok(objective)
    }

    /// Every cell in canonical order. Functions with a fixed dimension use
    /// it in place of the configured dimension list.
    pub fn cells(&self) -> Vec<CellKey> {
        let mut cells = Vec::new();
        for &algorithm in &self.algorithms {
            for &function in &self.functions {
                for &population in &self.population_sizes {
                    let dims: Vec<usize> = match function.fixed_dim() {
                        Some(d) => vec![d],
                        None => self.dimensions.clone(),
                    };
                    for dimension in dims {
                        cells.push(CellKey {
                            algorithm,
                            function,
                            population,
                            dimension,
                        });
                    }
                }
            }
        }
        cells.sort();
        cells.dedup();
        cells
    }

    pub fn rwpso_config(&self, cell: &CellKey, seed: u64) -> RwpsoConfig {
        RwpsoConfig {
            swarm_size: cell.population,
            max_iterations: self.max_iterations,
            fitness_threshold: self.threshold(cell.function),
            seed,
            ..self.rwpso.clone()
        }
    }

    pub fn pso_config(&self, cell: &CellKey, seed: u64) -> PsoConfig {
        PsoConfig {
            swarm_size: cell.population,
            max_iterations: self.max_iterations,
            fitness_threshold: self.threshold(cell.function),
            seed,
            ..self.pso.clone()
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| {
        (h ^ b as u64).wrapping_mul(0x0100_0000_01b3)
    })
}

/// Seed of run `run` in the given cell.
///
/// `h = splitmix64(base_seed)`, then `h = splitmix64(h ^ x)` for `x` in
/// `[fnv1a64(function name), population, dimension, run]`. The algorithm is
/// not mixed in, so every algorithm sees the same initial swarms.
pub fn run_seed(
    base_seed: u64,
    function: Benchmark,
    population: usize,
    dimension: usize,
    run: usize,
) -> u64 {
    [
        fnv1a64(function.name().as_bytes()),
        population as u64,
        dimension as u64,
        run as u64,
    ]
    .into_iter()
    .fold(splitmix64(base_seed), |h, x| splitmix64(h ^ x))
}

/// One row of the results table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateStats {
    pub algorithm: String,
    pub function: String,
    pub population: usize,
    pub dimension: usize,
    pub runs: usize,
    pub mean_iterations: f64,
    pub mean_best_fitness: f64,
    pub std_best_fitness: f64,
    pub success_rate: f64,
}

impl AggregateStats {
    /// Reduces runs of one cell. `mean_best_fitness` averages each run's
    /// best-fraction statistic; `success_rate` is the fraction of runs that
    /// reached the threshold (0 when the cell has none).
    pub fn from_runs(cell: &CellKey, runs: &[RunResult]) -> Result<Self> {
        if runs.is_empty() {
            return Err(Error::Dimension(format!("no runs to aggregate for {cell}")));
        }
        let n = runs.len() as f64;
        let mean_iterations = runs.iter().map(|r| r.iterations_used as f64).sum::<f64>() / n;
        let mean_best_fitness = runs.iter().map(|r| r.mean_best).sum::<f64>() / n;
        let std_best_fitness = if runs.len() > 1 {
            (runs
                .iter()
                .map(|r| (r.mean_best - mean_best_fitness).powi(2))
                .sum::<f64>()
                / (n - 1.0))
                .sqrt()
        } else {
            0.0
        };
        let success_rate = runs.iter().filter(|r| r.reached_threshold).count() as f64 / n;
        Ok(Self {
            algorithm: cell.algorithm.name().to_owned(),
            function: cell.function.name().to_owned(),
            population: cell.population,
            dimension: cell.dimension,
            runs: runs.len(),
            mean_iterations,
            mean_best_fitness,
            std_best_fitness,
            success_rate,
        })
    }

    fn sort_key(&self) -> (&str, &str, usize, usize) {
        (
            &self.algorithm,
            &self.function,
            self.population,
            self.dimension,
        )
    }
}

/// Sorts rows into canonical order: algorithm, function, population, dimension.
pub fn sort_stats(stats: &mut [AggregateStats]) {
    stats.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
}

#[derive(Debug, Clone)]
pub struct CellOutcome {
    pub stats: AggregateStats,
    pub runs: Vec<RunResult>,
}

/// Runs one algorithm once with the cell's parameters.
pub fn run_single(spec: &ExperimentSpec, cell: &CellKey, seed: u64) -> Result<RunResult> {
    let objective = spec.objective(cell.function, cell.dimension)?;
    let mut result = match cell.algorithm {
        Algorithm::Rwpso => rwpso_run(&objective, &spec.rwpso_config(cell, seed)),
        Algorithm::Pso => pso_run(&objective, &spec.pso_config(cell, seed)),
    }?;
    result.mean_best =
        mean_best_fitness(&result.final_fitnesses, spec.best_fraction, objective.sense)?;
    Ok(result)
}

pub fn run_cell(spec: &ExperimentSpec, cell: &CellKey) -> Result<CellOutcome> {
    let runs = (0..spec.runs_per_cell)
        .into_par_iter()
        .map(|run| {
            let seed = run_seed(
                spec.base_seed,
                cell.function,
                cell.population,
                cell.dimension,
                run,
            );
            run_single(spec, cell, seed).map_err(|e| Error::RunFailed {
                seed,
                source: Box::new(e),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let stats = AggregateStats::from_runs(cell, &runs)?;
    Ok(CellOutcome { stats, runs })
}

#[derive(Debug, Clone)]
pub struct CellFailure {
    pub cell: CellKey,
    pub message: String,
}

#[derive(Debug, Clone, Default)]
pub struct ExperimentReport {
    pub stats: Vec<AggregateStats>,
    pub runs: Vec<RunResult>,
    pub failures: Vec<CellFailure>,
}

/// Runs every cell. A failing cell is reported and the rest still run.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentReport> {
    spec.validate()?;
    let cells = spec.cells();
    let outcomes: Vec<(CellKey, Result<CellOutcome>)> = cells
        .into_par_iter()
        .map(|cell| (cell, run_cell(spec, &cell)))
        .collect();
    let mut report = ExperimentReport::default();
    for (cell, outcome) in outcomes {
        match outcome {
            Ok(o) => {
                report.stats.push(o.stats);
                report.runs.extend(o.runs);
            }
            Err(e) => report.failures.push(CellFailure {
                cell,
                message: e.to_string(),
            }),
        }
    }
    sort_stats(&mut report.stats);
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::Config(format!("unknown format `{other}`"))),
        }
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|source| Error::Io {
            path: path.to_owned(),
            source,
        })
}

pub fn stats_to_csv<W: Write>(
    stats: &[AggregateStats],
    out: W,
) -> std::result::Result<(), csv::Error> {
    let mut writer = csv::Writer::from_writer(out);
    for row in stats {
        writer.serialize(row)?;
    }
    if stats.is_empty() {
        writer.write_record([
            "algorithm",
            "function",
            "population",
            "dimension",
            "runs",
            "mean_iterations",
            "mean_best_fitness",
            "std_best_fitness",
            "success_rate",
        ])?;
    }
    writer.flush()?;
    Ok(())
}

/// Writes aggregate rows as CSV or as a JSON array.
pub fn write_results(stats: &[AggregateStats], path: &Path, format: OutputFormat) -> Result<()> {
    let mut out = create(path)?;
    match format {
        OutputFormat::Csv => stats_to_csv(stats, &mut out).map_err(|source| Error::Csv {
            path: path.to_owned(),
            source,
        })?,
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut out, stats).map_err(|source| Error::Json {
                path: path.to_owned(),
                source,
            })?;
            out.write_all(b"\n").map_err(|source| Error::Io {
                path: path.to_owned(),
                source,
            })?;
        }
    }
    out.flush().map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })
}

/// Reads a results file written by [`write_results`] (or a hand-made
/// baseline file with the same columns). `.json` files are parsed as JSON,
/// anything else as CSV.
pub fn read_results(path: &Path) -> Result<Vec<AggregateStats>> {
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })?;
    if path.extension().is_some_and(|e| e == "json") {
        return serde_json::from_reader(BufReader::new(file)).map_err(|source| Error::Json {
            path: path.to_owned(),
            source,
        });
    }
    csv::Reader::from_reader(BufReader::new(file))
        .deserialize()
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|source| Error::Csv {
            path: path.to_owned(),
            source,
        })
}

#[derive(Debug, Serialize)]
struct RunRow<'a> {
    algorithm: &'a str,
    function: &'a str,
    population: usize,
    dimension: usize,
    seed: u64,
    iterations_used: usize,
    best_fitness: f64,
    mean_best: f64,
    reached_threshold: bool,
}

/// Per-run CSV: one row per run with the seed that reproduces it.
pub fn write_runs(runs: &[RunResult], path: &Path) -> Result<()> {
    let out = create(path)?;
    let mut writer = csv::Writer::from_writer(out);
    let csv_err = |source| Error::Csv {
        path: path.to_owned(),
        source,
    };
    for r in runs {
        writer
            .serialize(RunRow {
                algorithm: r.algorithm.name(),
                function: r.function.name(),
                population: r.population,
                dimension: r.dimension,
                seed: r.seed,
                iterations_used: r.iterations_used,
                best_fitness: r.best_fitness,
                mean_best: r.mean_best,
                reached_threshold: r.reached_threshold,
            })
            .map_err(csv_err)?;
    }
    writer.flush().map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })
}

/// Side-by-side table: one line per (function, population, dimension) and
/// an iterations / mean-best column pair per algorithm.
pub fn format_table(stats: &[AggregateStats]) -> String {
    let mut algorithms: Vec<&str> = stats.iter().map(|s| s.algorithm.as_str()).collect();
    algorithms.sort_unstable();
    algorithms.dedup();

    let mut rows: BTreeMap<(&str, usize, usize), BTreeMap<&str, &AggregateStats>> = BTreeMap::new();
    for s in stats {
        rows.entry((s.function.as_str(), s.population, s.dimension))
            .or_default()
            .insert(s.algorithm.as_str(), s);
    }

    let mut header = vec!["function".to_owned(), "pop".to_owned(), "dim".to_owned()];
    for a in &algorithms {
        header.push(format!("{a} iters"));
        header.push(format!("{a} mean best"));
    }
    let mut lines = vec![header];
    for ((function, pop, dim), cells) in &rows {
        let mut line = vec![function.to_string(), pop.to_string(), dim.to_string()];
        for a in &algorithms {
            match cells.get(a) {
                Some(s) => {
                    line.push(format!("{:.1}", s.mean_iterations));
                    line.push(format!("{:.4e}", s.mean_best_fitness));
                }
                None => {
                    line.push("-".into());
                    line.push("-".into());
                }
            }
        }
        lines.push(line);
    }

    let widths: Vec<usize> = (0..lines[0].len())
        .map(|c| lines.iter().map(|l| l[c].len()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for line in &lines {
        let cells: Vec<String> = line
            .iter()
            .enumerate()
            .map(|(c, v)| {
                if c < 3 {
                    format!("{v:<w$}", w = widths[c])
                } else {
                    format!("{v:>w$}", w = widths[c])
                }
            })
            .collect();
        let _ = writeln!(out, "{}", cells.join("  ").trim_end());
    }
    out
}
