//! Seeded random instances for testing and benchmarking.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::game::{AshgInstance, Vertex, Weight};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RandomSpec {
    pub n: usize,
    pub max_degree: usize,
    pub min_weight: Weight,
    pub max_weight: Weight,
    /// Chance that a candidate pair becomes an edge.
    pub edge_probability: f64,
    /// Chance that an edge carries arcs in both directions.
    pub mutual_probability: f64,
}

impl Default for RandomSpec {
    fn default() -> Self {
        RandomSpec {
            n: 8,
            max_degree: 4,
            min_weight: -3,
            max_weight: 3,
            edge_probability: 0.5,
            mutual_probability: 0.7,
        }
    }
}

/// Candidate pairs are visited in random order and kept while both ends stay
/// within the degree bound, so the result always has Δ ≤ `max_degree`.
pub fn random_instance<R: Rng + ?Sized>(rng: &mut R, spec: &RandomSpec) -> AshgInstance {
    let n = spec.n;
    let mut pairs: Vec<(Vertex, Vertex)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    pairs.shuffle(rng);
    let mut degree = vec![0usize; n];
    let mut arcs = Vec::new();
    for (u, v) in pairs {
        if degree[u] >= spec.max_degree || degree[v] >= spec.max_degree || !rng.gen_bool(spec.edge_probability) {
            continue;
        }
        degree[u] += 1;
        degree[v] += 1;
        let mut weight = || rng.gen_range(spec.min_weight..=spec.max_weight);
        let (a, b) = (weight(), weight());
        if rng.gen_bool(spec.mutual_probability) {
            arcs.push((u, v, a));
            arcs.push((v, u, b));
        } else if rng.gen_bool(0.5) {
            arcs.push((u, v, a));
        } else {
            arcs.push((v, u, a));
        }
    }
    AshgInstance::new(n, arcs).expect("generated arcs are distinct and in range")
}

/// A path `0 - 1 - ... - n-1` with independent weights on both arcs of
/// every edge.
pub fn random_path<R: Rng + ?Sized>(rng: &mut R, n: usize, min_weight: Weight, max_weight: Weight) -> AshgInstance {
    let arcs: Vec<(Vertex, Vertex, Weight)> = (1..n)
        .flat_map(|i| [(i - 1, i), (i, i - 1)])
        .map(|(u, v)| (u, v, rng.gen_range(min_weight..=max_weight)))
        .collect();
    AshgInstance::new(n, arcs).expect("path arcs are distinct and in range")
}
