//! Random-walk PSO.
//!
//! Each iteration rebuilds the [`SwarmGraph`] from the current swarm. Every
//! particle then draws `r ~ U[0, 1)` and picks a target from its transition
//! row: the least likely particle if `r` falls below the row minimum, the
//! most likely one otherwise. It moves by a drift `K` toward that target plus
//! a Gaussian perturbation `G`:
//!
//! ```text
//! x_new = clamp(x + K + G)
//! ```
//!
//! There is no velocity and no personal-best memory.

use rand::{Rng, SeedableRng};
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::SwarmGraph;
use crate::harness::{Algorithm, RunRecord, RunResult};
use crate::objective::{init_positions, ObjectiveSpec, Position, SearchDomain};
use crate::SwarmRng;

/// How the drift term `K` is derived from the offset to the target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DisplacementMode {
    /// `K_d = (1 - d/n) / 2`, the walk's step probability used directly.
    LiteralDelta,
    /// `K_d = d / n`, the mean step of a walk that reaches the target in `n` steps.
    #[default]
    TowardTarget,
}

/// How the standard deviation of the Gaussian term is chosen per dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SigmaMode {
    /// `sigma_d = gaussian_sigma`
    Fixed,
    /// `sigma_d = gaussian_sigma * (upper_d - lower_d)`
    #[default]
    RangeScaled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryPolicy {
    #[default]
    Clamp,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RwpsoConfig {
    pub swarm_size: usize,
    /// Step count `n` over which the drift reaches the target. `None` uses
    /// `max_iterations`.
    pub walk_horizon: Option<usize>,
    pub displacement_mode: DisplacementMode,
    pub gaussian_mu: f64,
    pub gaussian_sigma_mode: SigmaMode,
    pub gaussian_sigma: f64,
    /// Ratio of final to initial Gaussian scale; `None` keeps it constant.
    pub gaussian_decay: Option<f64>,
    pub max_iterations: usize,
    pub fitness_threshold: Option<f64>,
    pub boundary_policy: BoundaryPolicy,
    pub seed: u64,
}

impl Default for RwpsoConfig {
    fn default() -> Self {
        Self {
            swarm_size: 20,
            walk_horizon: Some(2),
            displacement_mode: DisplacementMode::TowardTarget,
            gaussian_mu: 0.0,
            gaussian_sigma_mode: SigmaMode::RangeScaled,
            gaussian_sigma: 0.1,
            gaussian_decay: Some(1e-4),
            max_iterations: 1000,
            fitness_threshold: None,
            boundary_policy: BoundaryPolicy::Clamp,
            seed: 0,
        }
    }
}

impl RwpsoConfig {
    pub fn horizon(&self) -> usize {
        self.walk_horizon.unwrap_or(self.max_iterations)
    }

    pub fn validate(&self) -> Result<()> {
        if self.swarm_size < 2 {
            return Err(Error::Parameter(format!(
                "swarm_size must be >= 2, got {}",
                self.swarm_size
            )));
        }
        if self.max_iterations == 0 {
            return Err(Error::Parameter("max_iterations must be >= 1".into()));
        }
        if self.horizon() == 0 {
            return Err(Error::Parameter("walk_horizon must be >= 1".into()));
        }
        if !(self.gaussian_sigma.is_finite() && self.gaussian_sigma > 0.0) {
            return Err(Error::Parameter(format!(
                "gaussian_sigma must be > 0, got {}",
                self.gaussian_sigma
            )));
        }
        if let Some(q) = self.gaussian_decay {
            if !(q > 0.0 && q <= 1.0) {
                return Err(Error::Parameter(format!(
                    "gaussian_decay must lie in (0, 1], got {q}"
                )));
            }
        }
        if !self.gaussian_mu.is_finite() {
            return Err(Error::Parameter("gaussian_mu must be finite".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RwpsoState {
    pub positions: Vec<Position>,
    pub fitnesses: Vec<f64>,
    pub iteration: usize,
    /// Best fitness seen so far, one entry per completed iteration.
    pub best_fitness_trace: Vec<f64>,
    pub best_fitness: f64,
    pub best_position: Position,
}

impl RwpsoState {
    /// Evaluates `positions` and starts an empty trace.
    pub fn new(positions: Vec<Position>, objective: &ObjectiveSpec) -> Result<Self> {
        let fitnesses = positions
            .iter()
            .map(|p| objective.evaluate(p))
            .collect::<Result<Vec<_>>>()?;
        let mut state = Self {
            positions,
            fitnesses,
            iteration: 0,
            best_fitness_trace: Vec::new(),
            best_fitness: objective.sense.worst(),
            best_position: Vec::new(),
        };
        state.record_best(objective);
        Ok(state)
    }

    fn record_best(&mut self, objective: &ObjectiveSpec) {
        for (p, &f) in self.positions.iter().zip(&self.fitnesses) {
            if self.best_position.is_empty() || objective.sense.better(f, self.best_fitness) {
                self.best_fitness = f;
                self.best_position.clone_from(p);
            }
        }
    }
}

/// Picks the row minimum holder if `r` is below the row minimum, the row
/// maximum holder otherwise. Ties go to the lowest index.
pub fn select_target(prob_row: &[f64], r: f64) -> Result<usize> {
    if prob_row.is_empty() {
        return Err(Error::Dimension("empty probability row".into()));
    }
    let mut argmin = 0;
    let mut argmax = 0;
    for (i, &p) in prob_row.iter().enumerate().skip(1) {
        if p < prob_row[argmin] {
            argmin = i;
        }
        if p > prob_row[argmax] {
            argmax = i;
        }
    }
    Ok(if r < prob_row[argmin] { argmin } else { argmax })
}

/// `(1 - d/n) / 2`
pub fn compute_delta(d: f64, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::Parameter("walk horizon must be >= 1".into()));
    }
    Ok((1.0 - d / n as f64) / 2.0)
}

pub fn displacement_vector(from: &[f64], target: &[f64], config: &RwpsoConfig) -> Result<Vec<f64>> {
    if from.len() != target.len() {
        return Err(Error::Dimension(format!(
            "position has {} coordinates, target has {}",
            from.len(),
            target.len()
        )));
    }
    let n = config.horizon();
    if n == 0 {
        return Err(Error::Parameter("walk horizon must be >= 1".into()));
    }
    from.iter()
        .zip(target)
        .map(|(x, t)| {
            let d = t - x;
            match config.displacement_mode {
                DisplacementMode::LiteralDelta => compute_delta(d, n),
                DisplacementMode::TowardTarget => Ok(d / n as f64),
            }
        })
        .collect()
}

/// Per-dimension standard deviation of the Gaussian term at zero-based
/// iteration `iteration`.
///
/// With `gaussian_decay = Some(q)` the base value shrinks geometrically and
/// reaches `q` times its start at `max_iterations`.
pub fn gaussian_sigmas(
    config: &RwpsoConfig,
    domain: &SearchDomain,
    iteration: usize,
) -> Result<Vec<f64>> {
    if !(config.gaussian_sigma.is_finite() && config.gaussian_sigma > 0.0) {
        return Err(Error::Parameter(format!(
            "gaussian_sigma must be > 0, got {}",
            config.gaussian_sigma
        )));
    }
    let scale = match config.gaussian_decay {
        Some(q) => q.powf(iteration as f64 / config.max_iterations.max(1) as f64),
        None => 1.0,
    };
    Ok((0..domain.dim())
        .map(|d| match config.gaussian_sigma_mode {
            SigmaMode::Fixed => config.gaussian_sigma * scale,
            SigmaMode::RangeScaled => config.gaussian_sigma * domain.width(d) * scale,
        })
        .collect())
}

/// Independent draws from `N(mu, sigma_d^2)` for each dimension.
pub fn gaussian_term<R: Rng + ?Sized>(
    config: &RwpsoConfig,
    domain: &SearchDomain,
    iteration: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    let sigmas = gaussian_sigmas(config, domain, iteration)?;
    sample_gaussian(config.gaussian_mu, &sigmas, rng)
}

fn sample_gaussian<R: Rng + ?Sized>(mu: f64, sigmas: &[f64], rng: &mut R) -> Result<Vec<f64>> {
    sigmas
        .iter()
        .map(|&s| {
            Normal::new(mu, s)
                .map(|n| n.sample(rng))
                .map_err(|e| Error::Parameter(format!("gaussian term: {e}")))
        })
        .collect()
}

/// `clamp(x + K + G)`
pub fn update_position(
    x: &[f64],
    drift: &[f64],
    noise: &[f64],
    domain: &SearchDomain,
) -> Result<Position> {
    let dim = domain.dim();
    if x.len() != dim || drift.len() != dim || noise.len() != dim {
        return Err(Error::Dimension(format!(
            "update needs {dim} coordinates, got position {}, drift {}, noise {}",
            x.len(),
            drift.len(),
            noise.len()
        )));
    }
    let mut next: Position = x
        .iter()
        .zip(drift)
        .zip(noise)
        .map(|((x, k), g)| x + k + g)
        .collect();
    domain.clamp(&mut next);
    Ok(next)
}

/// One synchronous iteration: every particle moves against the same graph
/// snapshot, then the whole swarm is re-evaluated.
pub fn rwpso_step<R: Rng + ?Sized>(
    state: &RwpsoState,
    objective: &ObjectiveSpec,
    config: &RwpsoConfig,
    rng: &mut R,
) -> Result<RwpsoState> {
    let graph = SwarmGraph::build(&state.positions, &state.fitnesses, objective.sense)?;
    let sigmas = gaussian_sigmas(config, &objective.domain, state.iteration)?;
    let mut positions = Vec::with_capacity(state.positions.len());
    for (j, current) in state.positions.iter().enumerate() {
        let r: f64 = rng.random();
        let target = select_target(&graph.prob_rows[j], r)?;
        let drift = displacement_vector(current, &state.positions[target], config)?;
        let noise = sample_gaussian(config.gaussian_mu, &sigmas, rng)?;
        positions.push(update_position(current, &drift, &noise, &objective.domain)?);
    }
    let fitnesses = positions
        .iter()
        .map(|p| objective.evaluate(p))
        .collect::<Result<Vec<_>>>()?;
    let mut next = RwpsoState {
        positions,
        fitnesses,
        iteration: state.iteration + 1,
        best_fitness_trace: state.best_fitness_trace.clone(),
        best_fitness: state.best_fitness,
        best_position: state.best_position.clone(),
    };
    next.record_best(objective);
    next.best_fitness_trace.push(next.best_fitness);
    Ok(next)
}

/// Runs until `max_iterations` or until the best-so-far fitness reaches the
/// threshold.
pub fn rwpso_run(objective: &ObjectiveSpec, config: &RwpsoConfig) -> Result<RunResult> {
    config.validate()?;
    objective.validate()?;
    let mut rng = SwarmRng::seed_from_u64(config.seed);
    let positions = init_positions(&objective.domain, config.swarm_size, &mut rng)?;
    let mut state = RwpsoState::new(positions, objective)?;
    while state.iteration < config.max_iterations {
        state = rwpso_step(&state, objective, config, &mut rng)?;
        if let Some(threshold) = config.fitness_threshold {
            if objective.sense.reached(state.best_fitness, threshold) {
                break;
            }
        }
    }
    RunResult::from_record(
        Algorithm::Rwpso,
        objective,
        config.seed,
        config.fitness_threshold,
        RunRecord {
            best_fitness: state.best_fitness,
            best_position: state.best_position,
            trace: state.best_fitness_trace,
            final_fitnesses: state.fitnesses,
        },
    )
}
