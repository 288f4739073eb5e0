//! Seeded graph families. All outputs are undirected with unit weights.
//!
//! Barabási–Albert graphs start from the complete graph on the first `m`
//! nodes; every later node attaches to `m` distinct earlier nodes drawn
//! one at a time without replacement, each draw proportional to the
//! degrees at the moment the new node arrives (uniform while all degrees
//! are zero, which only happens for `m = 1`). The edge count is therefore
//! `m*(m-1)/2 + m*(n-m)`.

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::graph::Graph;
use crate::rng::{self, StreamRng};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum Family {
    Path,
    Cycle,
    Complete,
    /// Node 1 is the center.
    Star,
    ErdosRenyi { p: f64 },
    BarabasiAlbert { m: usize },
}

impl Family {
    pub fn is_random(&self) -> bool {
        matches!(self, Family::ErdosRenyi { .. } | Family::BarabasiAlbert { .. })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GenSpec {
    pub family: Family,
    pub n: usize,
    pub seed: u64,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GenError {
    #[error("need at least {min} nodes, got {n}")]
    TooFewNodes { n: usize, min: usize },
    #[error("edge probability {0} outside (0, 1]")]
    BadProbability(f64),
    #[error("attachment count {m} must satisfy 1 <= m < n = {n}")]
    BadAttachment { m: usize, n: usize },
    #[error("no connected sample in {0} attempts")]
    AttemptsExhausted(usize),
}

impl GenSpec {
    pub fn new(family: Family, n: usize, seed: u64) -> Self {
        Self { family, n, seed }
    }

    pub fn validate(&self) -> Result<(), GenError> {
        let min = if self.family == Family::Cycle { 3 } else { 2 };
        if self.n < min {
            return Err(GenError::TooFewNodes { n: self.n, min });
        }
        match self.family {
            Family::ErdosRenyi { p } if !(p > 0.0 && p <= 1.0) => Err(GenError::BadProbability(p)),
            Family::BarabasiAlbert { m } if m == 0 || m >= self.n => {
                Err(GenError::BadAttachment { m, n: self.n })
            }
            _ => Ok(()),
        }
    }
}

/// Graph for `spec`, drawn from stream 0 of its seed.
pub fn generate(spec: &GenSpec) -> Result<Graph, GenError> {
    generate_from_stream(spec, 0)
}

fn generate_from_stream(spec: &GenSpec, stream: u64) -> Result<Graph, GenError> {
    spec.validate()?;
    let n = spec.n;
    let pairs: Vec<(usize, usize)> = match spec.family {
        Family::Path => (1..n).map(|i| (i, i + 1)).collect(),
        Family::Cycle => (1..=n).map(|i| (i, i % n + 1)).collect(),
        Family::Complete => complete_pairs(n),
        Family::Star => (2..=n).map(|i| (1, i)).collect(),
        Family::ErdosRenyi { p } => erdos_renyi(n, p, &mut rng::stream(spec.seed, stream)),
        Family::BarabasiAlbert { m } => barabasi_albert(n, m, &mut rng::stream(spec.seed, stream)),
    };
    Ok(Graph::unweighted(n, pairs, false).expect("generated edges are valid"))
}

fn complete_pairs(n: usize) -> Vec<(usize, usize)> {
    (1..=n)
        .flat_map(|i| (i + 1..=n).map(move |j| (i, j)))
        .collect()
}

/// Pairs visited in lexicographic order, one uniform draw each.
fn erdos_renyi(n: usize, p: f64, rng: &mut StreamRng) -> Vec<(usize, usize)> {
    complete_pairs(n)
        .into_iter()
        .filter(|_| rng.gen::<f64>() < p)
        .collect()
}

fn barabasi_albert(n: usize, m: usize, rng: &mut StreamRng) -> Vec<(usize, usize)> {
    let mut pairs = complete_pairs(m);
    let mut degree = vec![0u64; n];
    for &(a, b) in &pairs {
        degree[a - 1] += 1;
        degree[b - 1] += 1;
    }
    for new in m..n {
        let mut weights: Vec<u64> = degree[..new].to_vec();
        let mut chosen = Vec::with_capacity(m);
        for _ in 0..m {
            let total: u64 = weights.iter().sum();
            let pick = if total == 0 {
                let free: Vec<usize> = (0..new).filter(|i| !chosen.contains(i)).collect();
                free[rng.gen_range(0..free.len())]
            } else {
                let mut r = rng.gen_range(0..total);
                let mut k = 0;
                while r >= weights[k] {
                    r -= weights[k];
                    k += 1;
                }
                k
            };
            weights[pick] = 0;
            chosen.push(pick);
        }
        chosen.sort_unstable();
        for t in chosen {
            pairs.push((t + 1, new + 1));
            degree[t] += 1;
            degree[new] += 1;
        }
    }
    pairs
}

/// First connected sample; attempt `a` draws from stream `a` of the seed.
/// Returns the graph and the number of attempts used.
pub fn resample_until_connected(
    spec: &GenSpec,
    max_attempts: usize,
) -> Result<(Graph, usize), GenError> {
    spec.validate()?;
    let attempts = if spec.family.is_random() { max_attempts } else { max_attempts.min(1) };
    for a in 0..attempts {
        let g = generate_from_stream(spec, a as u64)?;
        if g.is_connected() {
            return Ok((g, a + 1));
        }
    }
    Err(GenError::AttemptsExhausted(max_attempts))
}
