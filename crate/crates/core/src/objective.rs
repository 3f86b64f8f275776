//! Benchmark functions, their search domains and asymmetric initialization ranges.
//!
//! Three single-objective functions (sphere, Rosenbrock, Rastrigin) and two
//! bi-objective ones (Binh 4, Schaffer N.1). The bi-objective functions are
//! collapsed to one fitness value by a weighted sum so that the swarm
//! algorithms can rank particles.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point in the search space.
pub type Position = Vec<f64>;

/// Rastrigin amplitude.
pub const RASTRIGIN_A: f64 = 10.0;

/// Default half-width `A` of the Schaffer N.1 domain `[-A, A]`.
pub const SCHAFFER_DEFAULT_BOUND: f64 = 100.0;

/// Binh 4 is defined on the open box `(-7, 4)^2`. Clamped particles are kept
/// this far inside it.
const BINH4_MARGIN: f64 = 1e-9;

/// Whether lower or higher fitness is better.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    #[default]
    Minimize,
    Maximize,
}

impl Sense {
    /// True if `a` is strictly better than `b`.
    pub fn better(self, a: f64, b: f64) -> bool {
        match self {
            Sense::Minimize => a < b,
            Sense::Maximize => a > b,
        }
    }

    /// True if `value` is at least as good as `threshold`.
    pub fn reached(self, value: f64, threshold: f64) -> bool {
        match self {
            Sense::Minimize => value <= threshold,
            Sense::Maximize => value >= threshold,
        }
    }

    /// Ordering that puts better values first.
    pub fn cmp_best_first(self, a: f64, b: f64) -> std::cmp::Ordering {
        match self {
            Sense::Minimize => a.total_cmp(&b),
            Sense::Maximize => b.total_cmp(&a),
        }
    }

    /// The worst possible value, used to seed best-so-far tracking.
    pub fn worst(self) -> f64 {
        match self {
            Sense::Minimize => f64::INFINITY,
            Sense::Maximize => f64::NEG_INFINITY,
        }
    }
}

/// Box-bounded search domain with a nested initialization sub-box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchDomain {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub init_lower: Vec<f64>,
    pub init_upper: Vec<f64>,
}

impl SearchDomain {
    pub fn new(
        lower: Vec<f64>,
        upper: Vec<f64>,
        init_lower: Vec<f64>,
        init_upper: Vec<f64>,
    ) -> Result<Self> {
        let domain = Self {
            lower,
            upper,
            init_lower,
            init_upper,
        };
        domain.validate()?;
        Ok(domain)
    }

    /// Same bounds in every dimension.
    pub fn uniform(
        dim: usize,
        lower: f64,
        upper: f64,
        init_lower: f64,
        init_upper: f64,
    ) -> Result<Self> {
        Self::new(
            vec![lower; dim],
            vec![upper; dim],
            vec![init_lower; dim],
            vec![init_upper; dim],
        )
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn width(&self, d: usize) -> f64 {
        self.upper[d] - self.lower[d]
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .enumerate()
                .all(|(d, &v)| v >= self.lower[d] && v <= self.upper[d])
    }

    /// Clamps every coordinate into `[lower, upper]`.
    pub fn clamp(&self, x: &mut [f64]) {
        for (d, v) in x.iter_mut().enumerate() {
            *v = v.clamp(self.lower[d], self.upper[d]);
        }
    }

    pub fn validate(&self) -> Result<()> {
        let dim = self.lower.len();
        if dim == 0 {
            return Err(Error::Dimension(
                "search domain needs at least one dimension".into(),
            ));
        }
        if self.upper.len() != dim || self.init_lower.len() != dim || self.init_upper.len() != dim {
            return Err(Error::Dimension(format!(
                "domain vectors disagree in length: lower {}, upper {}, init_lower {}, init_upper {}",
                dim,
                self.upper.len(),
                self.init_lower.len(),
                self.init_upper.len()
            )));
        }
        for d in 0..dim {
            let (lo, hi, ilo, ihi) = (
                self.lower[d],
                self.upper[d],
                self.init_lower[d],
                self.init_upper[d],
            );
            if ![lo, hi, ilo, ihi].iter().all(|v| v.is_finite()) {
                return Err(Error::Config(format!("non-finite bound in dimension {d}")));
            }
            if lo >= hi {
                return Err(Error::Config(format!(
                    "dimension {d}: lower {lo} is not below upper {hi}"
                )));
            }
            // A zero-width init range is accepted: it pins every particle to one point.
            if !(lo <= ilo && ilo <= ihi && ihi <= hi) {
                return Err(Error::Config(format!(
                    "dimension {d}: init range [{ilo}, {ihi}] not nested in [{lo}, {hi}]"
                )));
            }
        }
        Ok(())
    }
}

/// The benchmark functions shipped with the harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Benchmark {
    Sphere,
    Rosenbrock,
    Rastrigin,
    Binh4,
    SchafferN1,
}

impl Benchmark {
    pub const ALL: [Benchmark; 5] = [
        Benchmark::Sphere,
        Benchmark::Rosenbrock,
        Benchmark::Rastrigin,
        Benchmark::Binh4,
        Benchmark::SchafferN1,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Benchmark::Sphere => "sphere",
            Benchmark::Rosenbrock => "rosenbrock",
            Benchmark::Rastrigin => "rastrigin",
            Benchmark::Binh4 => "binh4",
            Benchmark::SchafferN1 => "schaffer_n1",
        }
    }

    /// Number of component objectives.
    pub fn arity(self) -> usize {
        match self {
            Benchmark::Binh4 | Benchmark::SchafferN1 => 2,
            _ => 1,
        }
    }

    /// Dimension of functions that are not scalable.
    pub fn fixed_dim(self) -> Option<usize> {
        match self {
            Benchmark::Binh4 => Some(2),
            Benchmark::SchafferN1 => Some(1),
            _ => None,
        }
    }

    pub fn min_dim(self) -> usize {
        match self {
            Benchmark::Rosenbrock => 2,
            _ => 1,
        }
    }

    /// Known optimum of the (scalarized) fitness, where one is defined.
    pub fn known_optimum(self) -> Option<f64> {
        match self {
            Benchmark::Sphere | Benchmark::Rosenbrock | Benchmark::Rastrigin => Some(0.0),
            Benchmark::Binh4 | Benchmark::SchafferN1 => None,
        }
    }
}

impl fmt::Display for Benchmark {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Benchmark {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Benchmark::ALL
            .into_iter()
            .find(|b| b.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown function `{s}`")))
    }
}

fn check_finite(x: &[f64]) -> Result<()> {
    match x.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(Error::NonFinite {
            index,
            value: x[index],
        }),
        None => Ok(()),
    }
}

/// `sum x_i^2`
pub fn eval_sphere(x: &[f64]) -> Result<f64> {
    if x.is_empty() {
        return Err(Error::Dimension(
            "sphere needs at least one dimension".into(),
        ));
    }
    check_finite(x)?;
    Ok(x.iter().map(|v| v * v).sum())
}

/// `sum_{i<n} 100 (x_{i+1} - x_i^2)^2 + (x_i - 1)^2`
pub fn eval_rosenbrock(x: &[f64]) -> Result<f64> {
    if x.len() < 2 {
        return Err(Error::Dimension(format!(
            "rosenbrock needs dim >= 2, got {}",
            x.len()
        )));
    }
    check_finite(x)?;
    Ok(x.windows(2)
        .map(|w| {
            let a = w[1] - w[0] * w[0];
            let b = w[0] - 1.0;
            100.0 * a * a + b * b
        })
        .sum())
}

/// `A n + sum x_i^2 - A cos(2 pi x_i)`
pub fn eval_rastrigin(x: &[f64], a: f64) -> Result<f64> {
    if x.is_empty() {
        return Err(Error::Dimension(
            "rastrigin needs at least one dimension".into(),
        ));
    }
    check_finite(x)?;
    let n = x.len() as f64;
    Ok(a * n
        + x.iter()
            .map(|v| v * v - a * (2.0 * PI * v).cos())
            .sum::<f64>())
}

/// Binh 4 objective pair `(x^2 - y, -x/2 - y - 1)` on the open box `(-7, 4)^2`.
pub fn eval_binh4(x: f64, y: f64) -> Result<(f64, f64)> {
    check_finite(&[x, y])?;
    for (name, v) in [("x", x), ("y", y)] {
        if !(v > -7.0 && v < 4.0) {
            return Err(Error::Domain(format!(
                "binh4 requires -7 < {name} < 4, got {v}"
            )));
        }
    }
    Ok((x * x - y, -0.5 * x - y - 1.0))
}

/// Schaffer N.1 objective pair `(x^2, (x - 2)^2)` on `[-bound, bound]`.
pub fn eval_schaffer_n1(x: f64, bound: f64) -> Result<(f64, f64)> {
    check_finite(&[x])?;
    if !(10.0..=1e5).contains(&bound) {
        return Err(Error::Parameter(format!(
            "schaffer bound must lie in [10, 1e5], got {bound}"
        )));
    }
    if x.abs() > bound {
        return Err(Error::Domain(format!(
            "schaffer n1 requires |x| <= {bound}, got {x}"
        )));
    }
    Ok((x * x, (x - 2.0) * (x - 2.0)))
}

/// Weighted sum of component objectives.
pub fn scalarize(objectives: &[f64], weights: &[f64]) -> Result<f64> {
    if objectives.len() != weights.len() {
        return Err(Error::Arity {
            objectives: objectives.len(),
            weights: weights.len(),
        });
    }
    validate_weights(weights)?;
    Ok(objectives.iter().zip(weights).map(|(f, w)| f * w).sum())
}

fn validate_weights(weights: &[f64]) -> Result<()> {
    if weights.is_empty() || weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
        return Err(Error::Parameter(format!(
            "weights must be non-negative, got {weights:?}"
        )));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::Parameter(format!(
            "weights must sum to 1, got {total}"
        )));
    }
    Ok(())
}

/// A benchmark instance: function, domain, optimization sense and scalarization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveSpec {
    pub function: Benchmark,
    pub domain: SearchDomain,
    pub sense: Sense,
    pub known_optimum_value: Option<f64>,
    pub scalarization_weights: Vec<f64>,
}

impl ObjectiveSpec {
    /// The default instance of `function` in dimension `dim`, using the
    /// asymmetric initialization ranges listed in the README.
    pub fn standard(function: Benchmark, dim: usize) -> Result<Self> {
        if let Some(fixed) = function.fixed_dim() {
            if dim != fixed {
                return Err(Error::Dimension(format!(
                    "{function} is defined only in dimension {fixed}, got {dim}"
                )));
            }
        }
        if dim < function.min_dim() {
            return Err(Error::Dimension(format!(
                "{function} needs dim >= {}, got {dim}",
                function.min_dim()
            )));
        }
        let domain = match function {
            Benchmark::Sphere => SearchDomain::uniform(dim, -100.0, 100.0, 50.0, 100.0)?,
            Benchmark::Rosenbrock => SearchDomain::uniform(dim, -30.0, 30.0, 15.0, 30.0)?,
            Benchmark::Rastrigin => SearchDomain::uniform(dim, -5.12, 5.12, 2.56, 5.12)?,
            Benchmark::Binh4 => SearchDomain::uniform(
                dim,
                -7.0 + BINH4_MARGIN,
                4.0 - BINH4_MARGIN,
                0.0,
                4.0 - BINH4_MARGIN,
            )?,
            Benchmark::SchafferN1 => schaffer_domain(SCHAFFER_DEFAULT_BOUND)?,
        };
        let arity = function.arity();
        Ok(Self {
            function,
            domain,
            sense: Sense::Minimize,
            known_optimum_value: function.known_optimum(),
            scalarization_weights: vec![1.0 / arity as f64; arity],
        })
    }

    pub fn name(&self) -> &'static str {
        self.function.name()
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn validate(&self) -> Result<()> {
        self.domain.validate()?;
        if self.scalarization_weights.len() != self.function.arity() {
            return Err(Error::Arity {
                objectives: self.function.arity(),
                weights: self.scalarization_weights.len(),
            });
        }
        validate_weights(&self.scalarization_weights)?;
        if let Some(fixed) = self.function.fixed_dim() {
            if self.dim() != fixed {
                return Err(Error::Dimension(format!(
                    "{} is defined only in dimension {fixed}",
                    self.function
                )));
            }
        }
        if self.dim() < self.function.min_dim() {
            return Err(Error::Dimension(format!(
                "{} needs dim >= {}",
                self.function,
                self.function.min_dim()
            )));
        }
        Ok(())
    }

    /// Component objective values at `x`.
    pub fn objectives(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim() {
            return Err(Error::Dimension(format!(
                "{} expects {} coordinates, got {}",
                self.function,
                self.dim(),
                x.len()
            )));
        }
        Ok(match self.function {
            Benchmark::Sphere => vec![eval_sphere(x)?],
            Benchmark::Rosenbrock => vec![eval_rosenbrock(x)?],
            Benchmark::Rastrigin => vec![eval_rastrigin(x, RASTRIGIN_A)?],
            Benchmark::Binh4 => {
                let (f1, f2) = eval_binh4(x[0], x[1])?;
                vec![f1, f2]
            }
            Benchmark::SchafferN1 => {
                let (f1, f2) = eval_schaffer_n1(x[0], self.domain.upper[0])?;
                vec![f1, f2]
            }
        })
    }

    /// Scalar fitness at `x`.
    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        scalarize(&self.objectives(x)?, &self.scalarization_weights)
    }
}

/// Schaffer N.1 domain `[-bound, bound]` with init range `[bound/2, bound]`.
pub fn schaffer_domain(bound: f64) -> Result<SearchDomain> {
    if !(10.0..=1e5).contains(&bound) {
        return Err(Error::Parameter(format!(
            "schaffer bound must lie in [10, 1e5], got {bound}"
        )));
    }
    SearchDomain::uniform(1, -bound, bound, bound / 2.0, bound)
}

/// Draws `n` positions uniformly from the init sub-box of `domain`.
pub fn init_positions<R: Rng + ?Sized>(
    domain: &SearchDomain,
    n: usize,
    rng: &mut R,
) -> Result<Vec<Position>> {
    if n < 2 {
        return Err(Error::Parameter(format!(
            "swarm needs at least 2 particles, got {n}"
        )));
    }
    domain.validate()?;
    Ok((0..n)
        .map(|_| {
            (0..domain.dim())
                .map(|d| rng.random_range(domain.init_lower[d]..=domain.init_upper[d]))
                .collect()
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sphere_values() {
        assert_eq!(eval_sphere(&[0.0; 7]).unwrap(), 0.0);
        assert_eq!(eval_sphere(&[1.0, 2.0, 3.0]).unwrap(), 14.0);
        assert_eq!(eval_sphere(&[-5.0]).unwrap(), 25.0);
        assert!(matches!(
            eval_sphere(&[1.0, f64::NAN]),
            Err(Error::NonFinite { index: 1, .. })
        ));
    }

    #[test]
    fn rosenbrock_values() {
        assert_eq!(eval_rosenbrock(&[1.0, 1.0]).unwrap(), 0.0);
        assert_eq!(eval_rosenbrock(&[1.0, 1.0, 1.0]).unwrap(), 0.0);
        assert_eq!(eval_rosenbrock(&[0.0, 0.0]).unwrap(), 1.0);
        assert!(matches!(eval_rosenbrock(&[1.0]), Err(Error::Dimension(_))));
    }

    #[test]
    fn rastrigin_values() {
        assert_eq!(eval_rastrigin(&[0.0, 0.0], 10.0).unwrap(), 0.0);
        assert!((eval_rastrigin(&[1.0, 1.0], 10.0).unwrap() - 2.0).abs() < 1e-12);
        assert!((eval_rastrigin(&[0.5], 10.0).unwrap() - 20.25).abs() < 1e-12);
        assert!(eval_rastrigin(&[f64::INFINITY], 10.0).is_err());
    }

    #[test]
    fn binh4_values() {
        assert_eq!(eval_binh4(0.0, 0.0).unwrap(), (0.0, -1.0));
        assert_eq!(eval_binh4(1.0, 1.0).unwrap(), (0.0, -2.5));
        let y = 4.0 - 1e-12;
        let (f1, f2) = eval_binh4(2.0, y).unwrap();
        assert!((f1 - (4.0 - y)).abs() < 1e-12 && (f2 - (-2.0 - y)).abs() < 1e-12);
        assert!(matches!(eval_binh4(4.0, 0.0), Err(Error::Domain(_))));
        assert!(matches!(eval_binh4(0.0, -7.0), Err(Error::Domain(_))));
    }

    #[test]
    fn schaffer_values() {
        assert_eq!(eval_schaffer_n1(0.0, 100.0).unwrap(), (0.0, 4.0));
        assert_eq!(eval_schaffer_n1(2.0, 100.0).unwrap(), (4.0, 0.0));
        assert_eq!(eval_schaffer_n1(1.0, 100.0).unwrap(), (1.0, 1.0));
        assert!(matches!(
            eval_schaffer_n1(101.0, 100.0),
            Err(Error::Domain(_))
        ));
        assert!(eval_schaffer_n1(0.0, 5.0).is_err());
    }

    #[test]
    fn scalarize_values() {
        assert_eq!(scalarize(&[0.0, 4.0], &[0.5, 0.5]).unwrap(), 2.0);
        assert_eq!(scalarize(&[3.25], &[1.0]).unwrap(), 3.25);
        assert_eq!(scalarize(&[1.0, 1.0], &[0.5, 0.5]).unwrap(), 1.0);
        assert!(matches!(
            scalarize(&[1.0], &[0.5, 0.5]),
            Err(Error::Arity { .. })
        ));
        assert!(scalarize(&[1.0, 1.0], &[0.7, 0.7]).is_err());
    }

    #[test]
    fn standard_objectives_hit_known_optima() {
        for (f, dim, x) in [
            (Benchmark::Sphere, 10, vec![0.0; 10]),
            (Benchmark::Rosenbrock, 10, vec![1.0; 10]),
            (Benchmark::Rastrigin, 10, vec![0.0; 10]),
        ] {
            let obj = ObjectiveSpec::standard(f, dim).unwrap();
            assert_eq!(obj.evaluate(&x).unwrap(), obj.known_optimum_value.unwrap());
        }
        let schaffer = ObjectiveSpec::standard(Benchmark::SchafferN1, 1).unwrap();
        assert_eq!(schaffer.evaluate(&[1.0]).unwrap(), 1.0);
        let binh = ObjectiveSpec::standard(Benchmark::Binh4, 2).unwrap();
        assert_eq!(binh.evaluate(&[0.0, 0.0]).unwrap(), -0.5);
        // Clamped particles sit on the domain edge and must still evaluate.
        assert!(binh.evaluate(&binh.domain.upper).is_ok());
        assert!(binh.evaluate(&binh.domain.lower).is_ok());
    }

    #[test]
    fn standard_rejects_bad_dimensions() {
        assert!(ObjectiveSpec::standard(Benchmark::Binh4, 3).is_err());
        assert!(ObjectiveSpec::standard(Benchmark::Rosenbrock, 1).is_err());
        assert!(ObjectiveSpec::standard(Benchmark::Sphere, 0).is_err());
    }

    #[test]
    fn init_positions_in_sub_range() {
        let domain = ObjectiveSpec::standard(Benchmark::Sphere, 10)
            .unwrap()
            .domain;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let ps = init_positions(&domain, 20, &mut rng).unwrap();
        assert_eq!(ps.len(), 20);
        assert!(ps.iter().flatten().all(|v| (50.0..=100.0).contains(v)));

        let again = init_positions(&domain, 20, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        assert_eq!(ps, again);
    }

    #[test]
    fn degenerate_init_range() {
        let domain = SearchDomain::uniform(3, -1.0, 1.0, 0.25, 0.25).unwrap();
        let ps = init_positions(&domain, 5, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert!(ps.iter().flatten().all(|&v| v == 0.25));
        assert!(init_positions(&domain, 1, &mut ChaCha8Rng::seed_from_u64(0)).is_err());
    }

    #[test]
    fn domain_validation() {
        assert!(SearchDomain::uniform(2, 1.0, 1.0, 1.0, 1.0).is_err());
        assert!(SearchDomain::uniform(2, -1.0, 1.0, 0.5, 2.0).is_err());
        assert!(SearchDomain::new(vec![0.0], vec![1.0, 2.0], vec![0.0], vec![1.0]).is_err());
    }

    #[test]
    fn benchmark_names_round_trip() {
        for b in Benchmark::ALL {
            assert_eq!(b.name().parse::<Benchmark>().unwrap(), b);
        }
        assert!("griewank".parse::<Benchmark>().is_err());
    }

    proptest! {
        #[test]
        fn sphere_and_rastrigin_are_even(x in prop::collection::vec(-100.0f64..100.0, 1..20)) {
            let neg: Vec<f64> = x.iter().map(|v| -v).collect();
            prop_assert_eq!(eval_sphere(&x).unwrap(), eval_sphere(&neg).unwrap());
            prop_assert_eq!(eval_rastrigin(&x, 10.0).unwrap(), eval_rastrigin(&neg, 10.0).unwrap());
        }

        #[test]
        fn single_weight_scalarization_is_identity(v in -1e6f64..1e6) {
            prop_assert_eq!(scalarize(&[v], &[1.0]).unwrap(), v);
        }

        #[test]
        fn init_stays_in_range(
            bounds in prop::collection::vec((-50.0f64..50.0, 0.1f64..20.0, 0.0f64..1.0, 0.0f64..1.0), 1..8),
            n in 2usize..30,
            seed in any::<u64>(),
        ) {
            let mut lower = Vec::new();
            let mut upper = Vec::new();
            let mut ilo = Vec::new();
            let mut ihi = Vec::new();
            for (lo, w, a, b) in bounds {
                let (a, b) = if a <= b { (a, b) } else { (b, a) };
                lower.push(lo);
                upper.push(lo + w);
                ilo.push(lo + a * w);
                ihi.push(lo + b * w);
            }
            let domain = SearchDomain::new(lower, upper, ilo, ihi).unwrap();
            let ps = init_positions(&domain, n, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
            for p in &ps {
                for (d, v) in p.iter().enumerate() {
                    prop_assert!(*v >= domain.init_lower[d] && *v <= domain.init_upper[d]);
                }
                prop_assert!(domain.contains(p));
            }
        }
    }
}
