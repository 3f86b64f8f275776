//! One-dimensional random walks: fair, biased and constrained (non-uniform steps).
//!
//! A step is `+step_plus` with probability `bias` and `-step_minus` otherwise.
//! These walks are the reference model for the displacement rule in
//! [`crate::rwpso`] and are tested against their closed-form expectation.

use rand::Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkSpec {
    pub steps: usize,
    pub bias: f64,
    pub step_plus: f64,
    pub step_minus: f64,
}

impl WalkSpec {
    /// Fair coin, unit steps.
    pub fn simple(steps: usize) -> Self {
        Self {
            steps,
            bias: 0.5,
            step_plus: 1.0,
            step_minus: 1.0,
        }
    }

    pub fn biased(steps: usize, bias: f64) -> Result<Self> {
        Self::constrained(steps, bias, 1.0, 1.0)
    }

    pub fn constrained(steps: usize, bias: f64, step_plus: f64, step_minus: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&bias) {
            return Err(Error::Parameter(format!(
                "walk bias must lie in [0, 1], got {bias}"
            )));
        }
        if !(step_plus.is_finite() && step_minus.is_finite()) {
            return Err(Error::Parameter("walk step sizes must be finite".into()));
        }
        Ok(Self {
            steps,
            bias,
            step_plus,
            step_minus,
        })
    }

    fn step<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        if rng.random_bool(self.bias) {
            self.step_plus
        } else {
            -self.step_minus
        }
    }

    /// Final position after `steps` steps from the origin.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        (0..self.steps).map(|_| self.step(rng)).sum()
    }

    /// Every partial sum `S_0 = 0, S_1, ..., S_n`. Consumes the same draws as
    /// [`WalkSpec::sample`], so the last element equals the sampled endpoint.
    pub fn path<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let mut path = Vec::with_capacity(self.steps + 1);
        let mut s = 0.0;
        path.push(s);
        for _ in 0..self.steps {
            s += self.step(rng);
            path.push(s);
        }
        path
    }

    pub fn expectation(&self) -> f64 {
        walk_expectation(self.steps, self.bias, self.step_plus, self.step_minus)
    }
}

/// Fair walk with unit steps; returns `S_n`.
pub fn simple_walk<R: Rng + ?Sized>(n: usize, rng: &mut R) -> i64 {
    (0..n)
        .map(|_| if rng.random_bool(0.5) { 1 } else { -1 })
        .sum()
}

/// Unit-step walk taking `+1` with probability `p`.
pub fn biased_walk<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Result<i64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Parameter(format!(
            "walk bias must lie in [0, 1], got {p}"
        )));
    }
    Ok((0..n)
        .map(|_| if rng.random_bool(p) { 1 } else { -1 })
        .sum())
}

/// Walk taking `+step_plus` with probability `p`, else `-step_minus`.
pub fn constrained_biased_walk<R: Rng + ?Sized>(
    n: usize,
    p: f64,
    step_plus: f64,
    step_minus: f64,
    rng: &mut R,
) -> Result<f64> {
    Ok(WalkSpec::constrained(n, p, step_plus, step_minus)?.sample(rng))
}

/// `n (p step_plus - (1 - p) step_minus)`
pub fn walk_expectation(n: usize, p: f64, step_plus: f64, step_minus: f64) -> f64 {
    n as f64 * (p * step_plus - (1.0 - p) * step_minus)
}
