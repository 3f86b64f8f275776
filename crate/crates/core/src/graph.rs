//! The per-iteration swarm graph.
//!
//! Every particle is a node of a complete weighted graph. Edge weights are
//! Euclidean distances, the self-loop weight is fixed at 1, and each node
//! carries a fitness rank (N for the best particle, 1 for the worst). The
//! probability of moving from node `j` to node `i` is
//!
//! ```text
//! P_ij = rank_i * A_ij / sum_k rank_k * A_kj
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objective::{Position, Sense};

/// Distance substituted for coincident particles.
pub const COINCIDENT_DISTANCE: f64 = 1e-9;

/// Self-loop weight `A_jj`.
pub const SELF_WEIGHT: f64 = 1.0;

/// Immutable snapshot of the swarm graph for one iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwarmGraph {
    pub positions: Vec<Position>,
    #[serde(rename = "A")]
    pub distances: Vec<Vec<f64>>,
    pub alpha: Vec<usize>,
    /// Row `j` holds `P_ij` for every target `i`, i.e. the distribution of
    /// moves out of particle `j`.
    pub prob_rows: Vec<Vec<f64>>,
}

impl SwarmGraph {
    pub fn build(positions: &[Position], fitnesses: &[f64], sense: Sense) -> Result<Self> {
        if positions.len() != fitnesses.len() {
            return Err(Error::Dimension(format!(
                "{} positions but {} fitness values",
                positions.len(),
                fitnesses.len()
            )));
        }
        let distances = build_distance_matrix(positions)?;
        let alpha = compute_ranks(fitnesses, sense)?;
        let prob_rows = (0..positions.len())
            .map(|j| transition_probabilities(&alpha, &distances, j))
            .collect::<Result<_>>()?;
        Ok(Self {
            positions: positions.to_vec(),
            distances,
            alpha,
            prob_rows,
        })
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("graph snapshot serializes")
    }
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Symmetric matrix of pairwise distances with `A[j][j] = 1`.
pub fn build_distance_matrix(positions: &[Position]) -> Result<Vec<Vec<f64>>> {
    let n = positions.len();
    if n < 2 {
        return Err(Error::Dimension(format!(
            "swarm graph needs at least 2 particles, got {n}"
        )));
    }
    let dim = positions[0].len();
    if let Some(bad) = positions.iter().position(|p| p.len() != dim) {
        return Err(Error::Dimension(format!(
            "particle {bad} has {} coordinates, particle 0 has {dim}",
            positions[bad].len()
        )));
    }
    let mut a = vec![vec![SELF_WEIGHT; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = euclidean(&positions[i], &positions[j]).max(COINCIDENT_DISTANCE);
            a[i][j] = d;
            a[j][i] = d;
        }
    }
    Ok(a)
}

/// Fitness ranks: the best particle gets `N`, the worst `1`. Equal fitness
/// values are ranked by index, lower index first.
pub fn compute_ranks(fitnesses: &[f64], sense: Sense) -> Result<Vec<usize>> {
    let n = fitnesses.len();
    if n < 2 {
        return Err(Error::Dimension(format!(
            "ranking needs at least 2 particles, got {n}"
        )));
    }
    if let Some(index) = fitnesses.iter().position(|f| !f.is_finite()) {
        return Err(Error::NonFinite {
            index,
            value: fitnesses[index],
        });
    }
    let mut order: Vec<usize> = (0..n).collect();
    // Stable sort keeps index order among ties.
    order.sort_by(|&a, &b| sense.cmp_best_first(fitnesses[a], fitnesses[b]));
    let mut ranks = vec![0; n];
    for (place, &idx) in order.iter().enumerate() {
        ranks[idx] = n - place;
    }
    Ok(ranks)
}

/// Distribution of moves out of particle `source`.
pub fn transition_probabilities(
    alpha: &[usize],
    distances: &[Vec<f64>],
    source: usize,
) -> Result<Vec<f64>> {
    let n = alpha.len();
    if distances.len() != n || distances.iter().any(|row| row.len() != n) {
        return Err(Error::Dimension(format!(
            "rank vector of length {n} does not match the distance matrix"
        )));
    }
    if source >= n {
        return Err(Error::Dimension(format!(
            "source {source} out of range for {n} particles"
        )));
    }
    let weights: Vec<f64> = (0..n)
        .map(|i| alpha[i] as f64 * distances[i][source])
        .collect();
    let total: f64 = weights.iter().sum();
    Ok(weights.into_iter().map(|w| w / total).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn worked_swarm() -> Vec<Position> {
        vec![
            vec![-2.0, 4.0],
            vec![5.0, 5.0],
            vec![8.0, -1.0],
            vec![4.0, -6.0],
            vec![-4.0, -3.0],
        ]
    }

    fn origin_distance(p: &[f64]) -> f64 {
        p.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    #[test]
    fn worked_example_distances() {
        let a = build_distance_matrix(&worked_swarm()).unwrap();
        assert!((a[1][0] - 7.07).abs() < 0.005);
        assert!((a[2][0] - 11.18).abs() < 0.005);
        assert!((a[3][0] - 11.66).abs() < 0.005);
        assert!((a[4][0] - 7.28).abs() < 0.005);
        for (j, row) in a.iter().enumerate() {
            assert_eq!(row[j], 1.0);
        }
    }

    #[test]
    fn worked_example_ranks() {
        let fit: Vec<f64> = worked_swarm().iter().map(|p| origin_distance(p)).collect();
        assert_eq!(
            compute_ranks(&fit, Sense::Minimize).unwrap(),
            vec![5, 3, 1, 2, 4]
        );
    }

    #[test]
    fn worked_example_probabilities() {
        let swarm = worked_swarm();
        let fit: Vec<f64> = swarm.iter().map(|p| origin_distance(p)).collect();
        let g = SwarmGraph::build(&swarm, &fit, Sense::Minimize).unwrap();
        let denom: f64 = (0..5).map(|k| g.alpha[k] as f64 * g.distances[k][0]).sum();
        assert!((denom - 89.83).abs() < 0.05, "denominator {denom}");
        let expected = [0.056, 0.236, 0.124, 0.260, 0.324];
        for (p, e) in g.prob_rows[0].iter().zip(expected) {
            assert!((p - e).abs() < 0.02, "{p} vs {e}");
        }
    }

    #[test]
    fn rank_examples() {
        assert_eq!(
            compute_ranks(&[3.0, 1.0, 2.0], Sense::Minimize).unwrap(),
            vec![1, 3, 2]
        );
        assert_eq!(
            compute_ranks(&[3.0, 1.0, 2.0], Sense::Maximize).unwrap(),
            vec![3, 1, 2]
        );
        assert_eq!(
            compute_ranks(&[7.0; 4], Sense::Minimize).unwrap(),
            vec![4, 3, 2, 1]
        );
        assert!(compute_ranks(&[1.0, f64::NAN], Sense::Minimize).is_err());
        assert!(compute_ranks(&[1.0], Sense::Minimize).is_err());
    }

    #[test]
    fn two_particle_probabilities() {
        let d = 3.5;
        let a = vec![vec![1.0, d], vec![d, 1.0]];
        let row = transition_probabilities(&[2, 1], &a, 0).unwrap();
        assert!((row[0] - 2.0 / (2.0 + d)).abs() < 1e-15);
        assert!((row[1] - d / (2.0 + d)).abs() < 1e-15);
    }

    #[test]
    fn coincident_particles_stay_in_distribution() {
        let ps = vec![vec![1.0, 1.0], vec![1.0, 1.0], vec![4.0, 5.0]];
        let a = build_distance_matrix(&ps).unwrap();
        assert_eq!(a[0][1], COINCIDENT_DISTANCE);
        let g = SwarmGraph::build(&ps, &[1.0, 2.0, 3.0], Sense::Minimize).unwrap();
        assert!(g.prob_rows.iter().flatten().all(|&p| p > 0.0 && p < 1.0));
    }

    #[test]
    fn shape_errors() {
        assert!(build_distance_matrix(&[vec![0.0, 1.0]]).is_err());
        assert!(build_distance_matrix(&[vec![0.0, 1.0], vec![0.0]]).is_err());
        assert!(SwarmGraph::build(&worked_swarm(), &[1.0, 2.0], Sense::Minimize).is_err());
    }

    #[test]
    fn json_dump_uses_documented_keys() {
        let swarm = worked_swarm();
        let g = SwarmGraph::build(&swarm, &[1.0, 2.0, 3.0, 4.0, 5.0], Sense::Minimize).unwrap();
        let v: serde_json::Value = serde_json::from_str(&g.to_json()).unwrap();
        for key in ["positions", "A", "alpha", "prob_rows"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
        let back: SwarmGraph = serde_json::from_str(&g.to_json()).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn self_probability_is_row_minimum_when_well_separated() {
        // Pairwise distances all exceed N, so rank N times 1 is the smallest weight.
        let ps: Vec<Position> = (0..6).map(|i| vec![10.0 * i as f64, 0.0]).collect();
        let fit: Vec<f64> = (0..6).map(|i| i as f64).collect();
        let g = SwarmGraph::build(&ps, &fit, Sense::Minimize).unwrap();
        let best = 0;
        assert_eq!(g.alpha[best], 6);
        let row = &g.prob_rows[best];
        let denom: f64 = (0..6)
            .map(|k| g.alpha[k] as f64 * g.distances[k][best])
            .sum();
        assert!((row[best] - 6.0 / denom).abs() < 1e-15);
        let min = row.iter().cloned().fold(f64::INFINITY, f64::min);
        assert_eq!(row[best], min);
    }

    proptest! {
        #[test]
        fn rows_are_stochastic(
            n in 2usize..60,
            dim in 1usize..12,
            seed in any::<u64>(),
        ) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let ps: Vec<Position> = (0..n)
                .map(|_| (0..dim).map(|_| rng.random_range(-100.0..100.0)).collect())
                .collect();
            let fit: Vec<f64> = ps.iter().map(|p| p.iter().map(|v| v * v).sum()).collect();
            let g = SwarmGraph::build(&ps, &fit, Sense::Minimize).unwrap();
            let mut sorted = g.alpha.clone();
            sorted.sort_unstable();
            prop_assert_eq!(sorted, (1..=n).collect::<Vec<_>>());
            for row in &g.prob_rows {
                prop_assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
                prop_assert!(row.iter().all(|&p| p > 0.0 && p < 1.0));
            }
            for i in 0..n {
                for j in 0..n {
                    prop_assert_eq!(g.distances[i][j], g.distances[j][i]);
                }
            }
        }
    }
}
