//! Random-walk particle swarm optimization.
//!
//! [`rwpso`] moves each particle toward a target chosen from a rank- and
//! distance-weighted transition distribution over the whole swarm
//! ([`graph`]), with a drift term and a Gaussian perturbation instead of a
//! velocity. [`pso`] is the inertia-weight baseline, [`objective`] holds the
//! benchmark functions and [`harness`] runs factorial comparison sweeps.

pub mod error;
pub mod graph;
pub mod harness;
pub mod objective;
pub mod pso;
pub mod rwpso;
pub mod walk;

pub use error::{Error, Result};
pub use harness::{AggregateStats, Algorithm, ExperimentSpec, RunResult};
pub use objective::{Benchmark, ObjectiveSpec, Position, SearchDomain, Sense};
pub use pso::PsoConfig;
pub use rwpso::RwpsoConfig;

/// Random source used by every run. Seeded runs are reproducible across
/// platforms.
pub type SwarmRng = rand_chacha::ChaCha8Rng;
