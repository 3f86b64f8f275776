//! Inertia-weight particle swarm optimization.
//!
//! ```text
//! v = w v + C1 R1 (local_best - x) + C2 R2 (global_best - x)
//! x = clamp(x + v)
//! ```
//!
//! `w` falls linearly from `w_start` to `w_end` over the run.

use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::{Algorithm, RunRecord, RunResult};
use crate::objective::{init_positions, ObjectiveSpec, Position, SearchDomain};
use crate::SwarmRng;

/// Granularity of the `R1`, `R2` draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RandomMode {
    /// One pair per particle per iteration.
    Scalar,
    /// One pair per coordinate.
    #[default]
    PerDimension,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PsoConfig {
    pub swarm_size: usize,
    pub c1: f64,
    pub c2: f64,
    pub w_start: f64,
    pub w_end: f64,
    /// Velocity clamp as a fraction of the domain width.
    pub v_max: Option<f64>,
    pub random_mode: RandomMode,
    /// Zero a velocity component when its coordinate lands on a bound.
    pub absorb_at_bounds: bool,
    pub max_iterations: usize,
    pub fitness_threshold: Option<f64>,
    pub seed: u64,
}

impl Default for PsoConfig {
    fn default() -> Self {
        Self {
            swarm_size: 20,
            c1: 2.0,
            c2: 2.0,
            w_start: 0.9,
            w_end: 0.4,
            v_max: None,
            random_mode: RandomMode::PerDimension,
            absorb_at_bounds: true,
            max_iterations: 1000,
            fitness_threshold: None,
            seed: 0,
        }
    }
}

impl PsoConfig {
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
        if !(self.c1 >= 0.0 && self.c2 >= 0.0) {
            return Err(Error::Parameter(
                "learning rates must be non-negative".into(),
            ));
        }
        if !(self.w_start >= self.w_end && self.w_end >= 0.0) {
            return Err(Error::Parameter(format!(
                "inertia schedule needs w_start >= w_end >= 0, got {} -> {}",
                self.w_start, self.w_end
            )));
        }
        if let Some(v) = self.v_max {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Parameter(format!("v_max must be > 0, got {v}")));
            }
        }
        Ok(())
    }

    /// Inertia weight at zero-based iteration `t`.
    pub fn inertia(&self, t: usize) -> f64 {
        if self.max_iterations <= 1 {
            return self.w_start;
        }
        let frac = t as f64 / (self.max_iterations - 1) as f64;
        self.w_start - (self.w_start - self.w_end) * frac
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PsoState {
    pub positions: Vec<Position>,
    pub velocities: Vec<Vec<f64>>,
    pub fitnesses: Vec<f64>,
    pub local_best_positions: Vec<Position>,
    pub local_best_fitnesses: Vec<f64>,
    pub global_best_position: Position,
    pub global_best_fitness: f64,
    pub iteration: usize,
    pub best_fitness_trace: Vec<f64>,
}

impl PsoState {
    /// Zero initial velocities; personal bests start at the initial positions.
    pub fn new(positions: Vec<Position>, objective: &ObjectiveSpec) -> Result<Self> {
        let fitnesses = positions
            .iter()
            .map(|p| objective.evaluate(p))
            .collect::<Result<Vec<_>>>()?;
        let dim = objective.dim();
        let mut best = 0;
        for (i, &f) in fitnesses.iter().enumerate() {
            if objective.sense.better(f, fitnesses[best]) {
                best = i;
            }
        }
        Ok(Self {
            velocities: vec![vec![0.0; dim]; positions.len()],
            local_best_positions: positions.clone(),
            local_best_fitnesses: fitnesses.clone(),
            global_best_position: positions[best].clone(),
            global_best_fitness: fitnesses[best],
            positions,
            fitnesses,
            iteration: 0,
            best_fitness_trace: Vec::new(),
        })
    }
}

/// `w v + c1r1 (local_best - x) + c2r2 (global_best - x)` for one coordinate.
pub fn velocity_component(
    v: f64,
    x: f64,
    local_best: f64,
    global_best: f64,
    w: f64,
    c1r1: f64,
    c2r2: f64,
) -> f64 {
    w * v + c1r1 * (local_best - x) + c2r2 * (global_best - x)
}

/// Absolute per-dimension velocity limits, if a clamp is configured.
pub fn velocity_limits(config: &PsoConfig, domain: &SearchDomain) -> Option<Vec<f64>> {
    config
        .v_max
        .map(|frac| (0..domain.dim()).map(|d| frac * domain.width(d)).collect())
}

pub fn pso_update_velocity<R: Rng + ?Sized>(
    state: &PsoState,
    i: usize,
    w: f64,
    config: &PsoConfig,
    limits: Option<&[f64]>,
    rng: &mut R,
) -> Vec<f64> {
    let x = &state.positions[i];
    let v = &state.velocities[i];
    let lb = &state.local_best_positions[i];
    let gb = &state.global_best_position;
    let (mut r1, mut r2): (f64, f64) = (rng.random(), rng.random());
    (0..x.len())
        .map(|d| {
            if d > 0 && config.random_mode == RandomMode::PerDimension {
                r1 = rng.random();
                r2 = rng.random();
            }
            let mut next =
                velocity_component(v[d], x[d], lb[d], gb[d], w, config.c1 * r1, config.c2 * r2);
            if let Some(lim) = limits {
                next = next.clamp(-lim[d], lim[d]);
            }
            next
        })
        .collect()
}

/// `clamp(x + v)`
pub fn pso_update_position(x: &[f64], v: &[f64], domain: &SearchDomain) -> Result<Position> {
    if x.len() != v.len() || x.len() != domain.dim() {
        return Err(Error::Dimension(format!(
            "position has {} coordinates, velocity {}, domain {}",
            x.len(),
            v.len(),
            domain.dim()
        )));
    }
    let mut next: Position = x.iter().zip(v).map(|(a, b)| a + b).collect();
    domain.clamp(&mut next);
    Ok(next)
}

/// One iteration: each particle updates velocity, position and personal
/// best in turn; the global best is refreshed as soon as a particle beats it.
pub fn pso_step<R: Rng + ?Sized>(
    state: &mut PsoState,
    objective: &ObjectiveSpec,
    config: &PsoConfig,
    rng: &mut R,
) -> Result<()> {
    let w = config.inertia(state.iteration);
    let limits = velocity_limits(config, &objective.domain);
    for i in 0..state.positions.len() {
        let mut v = pso_update_velocity(state, i, w, config, limits.as_deref(), rng);
        let x = pso_update_position(&state.positions[i], &v, &objective.domain)?;
        if config.absorb_at_bounds {
            for (d, vd) in v.iter_mut().enumerate() {
                if x[d] == objective.domain.lower[d] || x[d] == objective.domain.upper[d] {
                    *vd = 0.0;
                }
            }
        }
        let f = objective.evaluate(&x)?;
        if objective.sense.better(f, state.local_best_fitnesses[i]) {
            state.local_best_fitnesses[i] = f;
            state.local_best_positions[i].clone_from(&x);
            if objective.sense.better(f, state.global_best_fitness) {
                state.global_best_fitness = f;
                state.global_best_position.clone_from(&x);
            }
        }
        state.velocities[i] = v;
        state.positions[i] = x;
        state.fitnesses[i] = f;
    }
    state.iteration += 1;
    state.best_fitness_trace.push(state.global_best_fitness);
    Ok(())
}

pub fn pso_run(objective: &ObjectiveSpec, config: &PsoConfig) -> Result<RunResult> {
    config.validate()?;
    objective.validate()?;
    let mut rng = SwarmRng::seed_from_u64(config.seed);
    let positions = init_positions(&objective.domain, config.swarm_size, &mut rng)?;
    let mut state = PsoState::new(positions, objective)?;
    while state.iteration < config.max_iterations {
        pso_step(&mut state, objective, config, &mut rng)?;
        if let Some(threshold) = config.fitness_threshold {
            if objective
                .sense
                .reached(state.global_best_fitness, threshold)
            {
                break;
            }
        }
    }
    RunResult::from_record(
        Algorithm::Pso,
        objective,
        config.seed,
        config.fitness_threshold,
        RunRecord {
            best_fitness: state.global_best_fitness,
            best_position: state.global_best_position,
            trace: state.best_fitness_trace,
            final_fitnesses: state.fitnesses,
        },
    )
}
