//! Ground truth for the distance bounds: the controllability matrix
//! `Gamma = [B, (-L)B, ..., (-L)^(n-1) B]` and its rank, plus checks of the
//! zero pattern of `(-L)^r` and of `rank(Gamma) >= delta` over sampled
//! positive weightings.

use std::ops::{Add, Mul, Neg};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::bound::{BoundError, BoundReport, LeaderSet};
use crate::graph::{Graph, LaplacianMatrix, Weight};
use crate::matrix::{self, Matrix};
use crate::rng;

/// Exact rank is the automatic choice up to this many nodes.
pub const EXACT_NODE_LIMIT: usize = 30;

/// Inclusive range for sampled integer weights.
pub const SAMPLE_WEIGHT_RANGE: (i64, i64) = (1, 1000);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("Laplacian is {laplacian}x{laplacian} but input matrix has {input} rows")]
    DimensionMismatch { laplacian: usize, input: usize },
    #[error(transparent)]
    Bound(#[from] BoundError),
    #[error("weight {0} cannot be represented exactly")]
    NotRepresentable(String),
}

/// `B` with `B[l_j][j] = 1`, columns in ascending leader order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InputMatrix {
    n: usize,
    leaders: Vec<usize>,
}

impl InputMatrix {
    pub fn new(n: usize, leaders: &LeaderSet) -> Self {
        Self {
            n,
            leaders: leaders.indices().to_vec(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.leaders.len()
    }

    pub fn to_dense<T: Clone + Zero + One>(&self) -> Matrix<T> {
        Matrix::from_fn(self.n, self.leaders.len(), |i, j| {
            if self.leaders[j] == i {
                T::one()
            } else {
                T::zero()
            }
        })
    }
}

/// Nonzero entries of `-L` by row.
fn negated_sparse_rows<T>(l: &Matrix<T>) -> Vec<Vec<(usize, T)>>
where
    T: Clone + Zero + Neg<Output = T>,
{
    (0..l.rows())
        .map(|i| {
            l.row(i)
                .iter()
                .enumerate()
                .filter(|(_, x)| !x.is_zero())
                .map(|(j, x)| (j, -x.clone()))
                .collect()
        })
        .collect()
}

fn apply<T>(rows: &[Vec<(usize, T)>], v: &[T]) -> Vec<T>
where
    T: Clone + Zero + Mul<Output = T> + Add<Output = T>,
{
    rows.iter()
        .map(|row| {
            row.iter()
                .fold(T::zero(), |acc, (j, x)| acc + x.clone() * v[*j].clone())
        })
        .collect()
}

/// Controllability matrix, `n x (n*m)`: column `k*m + j` is
/// `(-L)^k b_j`, built by repeated sparse matrix-vector products.
pub fn ctrb_matrix<T>(l: &Matrix<T>, b: &InputMatrix) -> Result<Matrix<T>, OracleError>
where
    T: Clone + Zero + One + Neg<Output = T> + Mul<Output = T> + Add<Output = T>,
{
    let n = l.rows();
    if b.n() != n || l.cols() != n {
        return Err(OracleError::DimensionMismatch {
            laplacian: n,
            input: b.n(),
        });
    }
    let m = b.m();
    let neg_l = negated_sparse_rows(l);
    let dense_b: Matrix<T> = b.to_dense();
    let mut gamma = Matrix::zeros(n, n * m);
    for j in 0..m {
        let mut v: Vec<T> = dense_b.column(j).cloned().collect();
        for k in 0..n {
            if k > 0 {
                v = apply(&neg_l, &v);
            }
            for (i, x) in v.iter().enumerate() {
                gamma[(i, k * m + j)] = x.clone();
            }
        }
    }
    Ok(gamma)
}

/// `(-L)^0, ..., (-L)^max_power`.
pub fn neg_laplacian_powers<T>(l: &Matrix<T>, max_power: usize) -> Vec<Matrix<T>>
where
    T: Clone + Zero + One + Neg<Output = T> + Mul<Output = T> + Add<Output = T>,
{
    let n = l.rows();
    let neg_l = negated_sparse_rows(l);
    let mut out = vec![Matrix::from_fn(n, n, |i, j| {
        if i == j {
            T::one()
        } else {
            T::zero()
        }
    })];
    for _ in 0..max_power {
        let prev = out.last().unwrap();
        let cols: Vec<Vec<T>> = (0..n)
            .map(|j| apply(&neg_l, &prev.column(j).cloned().collect::<Vec<_>>()))
            .collect();
        out.push(Matrix::from_fn(n, n, |i, j| cols[j][i].clone()));
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum RankMethod {
    /// Exact when every weight is rational and `n <= EXACT_NODE_LIMIT`.
    #[default]
    Auto,
    Exact,
    Numerical,
}

/// Where the weights in a rank computation came from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightSample {
    Given,
    Uniform,
    RandomInteger {
        seed: u64,
        trial: u64,
        low: i64,
        high: i64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RankReport {
    pub rank: usize,
    /// `exact` or `numerical`.
    pub method: RankMethod,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    pub weights: WeightSample,
    /// Set when `auto` fell back to numerical rank, with the reason.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fallback: Option<String>,
}

/// Rank options for [`controllability_rank`].
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct RankOptions {
    pub method: RankMethod,
    /// Relative singular-value threshold; defaults to [`default_rel_tol`].
    pub rel_tol: Option<f64>,
}

/// `n * sqrt(eps)`. Rounding carried through the Krylov blocks leaves
/// residuals in exactly-spanned directions far above `n * eps`; for
/// integer weights up to 1000 and `n <= 12` these stay below `1e-10`
/// relative while genuine new directions stay above `1e-5`.
pub fn default_rel_tol(n: usize) -> f64 {
    n as f64 * f64::EPSILON.sqrt()
}

/// Exact integer controllability matrix, from `c * L` for the
/// denominator-clearing constant `c` (same rank, same zero pattern).
pub fn ctrb_matrix_exact(g: &Graph, leaders: &LeaderSet) -> Result<Matrix<BigInt>, OracleError> {
    let lap = exact_laplacian(g)?;
    let (l, _) = lap.to_integer_scaled().expect("exact laplacian");
    ctrb_matrix(&l, &InputMatrix::new(g.n(), leaders))
}

fn exact_laplacian(g: &Graph) -> Result<LaplacianMatrix, OracleError> {
    if g.has_exact_weights() {
        return Ok(g.laplacian());
    }
    // Finite floats are dyadic rationals and convert without loss.
    let weights = g
        .edges()
        .iter()
        .map(|e| match &e.w {
            Weight::Float(x) => BigRational::from_float(*x)
                .map(Weight::Exact)
                .ok_or_else(|| OracleError::NotRepresentable(e.w.to_string())),
            w => Ok(w.clone()),
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(g.reweighted(weights).expect("same topology").laplacian())
}

/// Rank of the controllability matrix for the graph's own weights.
pub fn controllability_rank(
    g: &Graph,
    leaders: &LeaderSet,
    opts: RankOptions,
) -> Result<RankReport, OracleError> {
    controllability_rank_labeled(g, leaders, opts, WeightSample::Given)
}

fn controllability_rank_labeled(
    g: &Graph,
    leaders: &LeaderSet,
    opts: RankOptions,
    weights: WeightSample,
) -> Result<RankReport, OracleError> {
    if let Some(&bad) = leaders.indices().iter().find(|&&l| l >= g.n()) {
        return Err(BoundError::LeaderOutOfRange {
            id: bad + 1,
            n: g.n(),
        }
        .into());
    }
    let (exact, fallback) = match opts.method {
        RankMethod::Exact => (true, None),
        RankMethod::Numerical => (false, None),
        RankMethod::Auto if !g.has_exact_weights() => {
            (false, Some("weights are not all rational".to_string()))
        }
        RankMethod::Auto if g.n() > EXACT_NODE_LIMIT => (
            false,
            Some(format!("n = {} exceeds exact limit {EXACT_NODE_LIMIT}", g.n())),
        ),
        RankMethod::Auto => (true, None),
    };
    if exact {
        let gamma = ctrb_matrix_exact(g, leaders)?;
        return Ok(RankReport {
            rank: matrix::rank_exact(&gamma),
            method: RankMethod::Exact,
            tolerance: None,
            weights,
            fallback: None,
        });
    }
    let l = g.laplacian().to_f64();
    let rel = opts.rel_tol.unwrap_or_else(|| default_rel_tol(g.n()));
    let (rank, tol) = krylov_rank_numerical(&l, &InputMatrix::new(g.n(), leaders), rel);
    Ok(RankReport {
        rank,
        method: RankMethod::Numerical,
        tolerance: Some(tol),
        weights,
        fallback,
    })
}

/// Numerical rank of the controllability matrix via an orthonormal basis
/// of its column space, grown one block at a time: each block is `-L`
/// applied to the directions the previous block added, with everything
/// already spanned projected out. A block's new directions are the left
/// singular vectors whose singular value exceeds `rel_tol * sigma_max`,
/// `sigma_max` taken over the block before projection.
///
/// This spans exactly `range(Gamma)`, but avoids the raw Krylov columns,
/// whose norms and directions degenerate too fast for a direct SVD.
/// Returns the rank and the largest absolute tolerance applied.
pub fn krylov_rank_numerical(l: &Matrix<f64>, b: &InputMatrix, rel_tol: f64) -> (usize, f64) {
    use nalgebra::{DMatrix, DVector};

    let n = l.rows();
    let neg_l = negated_sparse_rows(l);
    let mut basis: Vec<DVector<f64>> = Vec::new();
    let dense_b: Matrix<f64> = b.to_dense();
    let mut block: Vec<Vec<f64>> = (0..b.m())
        .map(|j| dense_b.column(j).copied().collect())
        .collect();
    let mut max_tol = 0.0_f64;
    while !block.is_empty() && basis.len() < n {
        let scale = block
            .iter()
            .map(|v| v.iter().map(|x| x * x).sum::<f64>().sqrt())
            .fold(0.0, f64::max);
        let tol = rel_tol * scale;
        max_tol = max_tol.max(tol);
        let mut residual: Vec<DVector<f64>> = block.iter().map(|v| DVector::from_column_slice(v)).collect();
        for r in residual.iter_mut() {
            // Two passes of modified Gram-Schmidt.
            for _ in 0..2 {
                for q in &basis {
                    let c = q.dot(r);
                    r.axpy(-c, q, 1.0);
                }
            }
        }
        let w = DMatrix::from_columns(&residual);
        let svd = w.svd(true, false);
        let u = svd.u.expect("left singular vectors");
        let mut added = Vec::new();
        for (k, &sigma) in svd.singular_values.iter().enumerate() {
            if sigma > tol && basis.len() < n {
                let q = u.column(k).into_owned();
                added.push(q.as_slice().to_vec());
                basis.push(q);
            }
        }
        block = added.iter().map(|q| apply(&neg_l, q)).collect();
    }
    (basis.len(), max_tol)
}

/// Integer weights drawn uniformly from [`SAMPLE_WEIGHT_RANGE`] for
/// `trial`, from its own stream of `seed`.
pub fn sample_weights(g: &Graph, seed: u64, trial: u64) -> Vec<Weight> {
    let mut rng = rng::stream(seed, trial);
    let (lo, hi) = SAMPLE_WEIGHT_RANGE;
    (0..g.edge_count())
        .map(|_| Weight::integer(rng.gen_range(lo..=hi)))
        .collect()
}

/// Exact rank for the `trial`-th sampled integer weighting.
pub fn sampled_rank(
    g: &Graph,
    leaders: &LeaderSet,
    seed: u64,
    trial: u64,
) -> Result<RankReport, OracleError> {
    let weighted = g.reweighted(sample_weights(g, seed, trial)).expect("same topology");
    let (low, high) = SAMPLE_WEIGHT_RANGE;
    controllability_rank_labeled(
        &weighted,
        leaders,
        RankOptions {
            method: RankMethod::Exact,
            rel_tol: None,
        },
        WeightSample::RandomInteger {
            seed,
            trial,
            low,
            high,
        },
    )
}

/// Exact rank at unit weights.
pub fn uniform_rank(g: &Graph, leaders: &LeaderSet) -> Result<RankReport, OracleError> {
    controllability_rank_labeled(
        &g.with_unit_weights(),
        leaders,
        RankOptions {
            method: RankMethod::Exact,
            rel_tol: None,
        },
        WeightSample::Uniform,
    )
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Counterexample {
    /// `[(-L)^r]_{ij}` broke the zero pattern; `i`, `j` are 1-based.
    ZeroPattern {
        trial: u64,
        i: usize,
        j: usize,
        r: usize,
        dist: usize,
        weights: Vec<String>,
    },
    RankBelowBound {
        trial: u64,
        rank: usize,
        delta: usize,
        weights: Vec<String>,
    },
    Disconnected,
}

/// Outcome of a sampled property check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub property: String,
    pub trials: usize,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Counterexample>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<usize>,
    /// Smallest rank observed over the sampled weightings.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_rank: Option<usize>,
}

pub const LEMMA_PROPERTY: &str = "power_zero_pattern";
pub const THEOREM_PROPERTY: &str = "rank_at_least_delta";

/// Checks, for one weighting, that `[(-L)^r]_{ij}` is zero for every
/// `r < dist(i, j)` and nonzero at `r = dist(i, j)`. Exact graphs are
/// checked in rational arithmetic; float graphs in floating point, where
/// structural zeros remain exact zeros.
///
/// Returns the first violation as `(i, j, r, dist)` with 0-based nodes.
pub fn zero_pattern_violation(g: &Graph) -> Option<(usize, usize, usize, usize)> {
    let dist = g.distances();
    let max_d = dist.max_distance().unwrap_or(0);
    match g.laplacian() {
        LaplacianMatrix::Exact(l) => first_violation(&neg_laplacian_powers(&l, max_d), &dist),
        LaplacianMatrix::Float(l) => first_violation(&neg_laplacian_powers(&l, max_d), &dist),
    }
}

fn first_violation<T: Zero>(
    powers: &[Matrix<T>],
    dist: &crate::graph::DistanceMatrix,
) -> Option<(usize, usize, usize, usize)> {
    let n = dist.n();
    for i in 0..n {
        for j in 0..n {
            let Some(d) = dist.get(i, j) else { continue };
            for (r, p) in powers.iter().enumerate().take(d + 1) {
                let zero = p[(i, j)].is_zero();
                if (r < d) != zero {
                    return Some((i, j, r, d));
                }
            }
        }
    }
    None
}

fn weight_strings(ws: &[Weight]) -> Vec<String> {
    ws.iter().map(ToString::to_string).collect()
}

/// Zero-pattern check over `trials` sampled integer weightings.
pub fn check_lemma1(g: &Graph, trials: usize, seed: u64) -> Verdict {
    let mut verdict = Verdict {
        property: LEMMA_PROPERTY.into(),
        trials,
        passed: true,
        counterexample: None,
        delta: None,
        min_rank: None,
    };
    if !g.is_bound_connected() {
        verdict.passed = false;
        verdict.counterexample = Some(Counterexample::Disconnected);
        return verdict;
    }
    let failures: Vec<Option<Counterexample>> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let ws = sample_weights(g, seed, t);
            let weighted = g.reweighted(ws.clone()).expect("same topology");
            zero_pattern_violation(&weighted).map(|(i, j, r, dist)| Counterexample::ZeroPattern {
                trial: t,
                i: i + 1,
                j: j + 1,
                r,
                dist,
                weights: weight_strings(&ws),
            })
        })
        .collect();
    verdict.counterexample = failures.into_iter().flatten().next();
    verdict.passed = verdict.counterexample.is_none();
    verdict
}

/// `rank(Gamma) >= delta` over `trials` sampled integer weightings.
pub fn check_theorem(
    g: &Graph,
    leaders: &LeaderSet,
    trials: usize,
    seed: u64,
) -> Result<Verdict, OracleError> {
    let report = BoundReport::compute(g, leaders)?;
    let delta = report.delta;
    let ranks: Vec<usize> = (0..trials as u64)
        .into_par_iter()
        .map(|t| sampled_rank(g, leaders, seed, t).map(|r| r.rank))
        .collect::<Result<_, _>>()?;
    let counterexample = ranks
        .iter()
        .enumerate()
        .find(|(_, &r)| r < delta)
        .map(|(t, &rank)| Counterexample::RankBelowBound {
            trial: t as u64,
            rank,
            delta,
            weights: weight_strings(&sample_weights(g, seed, t as u64)),
        });
    Ok(Verdict {
        property: THEOREM_PROPERTY.into(),
        trials,
        passed: counterexample.is_none(),
        counterexample,
        delta: Some(delta),
        min_rank: ranks.iter().copied().min(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> Graph {
        Graph::unweighted(n, (1..n).map(|i| (i, i + 1)), false).unwrap()
    }

    fn complete(n: usize) -> Graph {
        let pairs: Vec<_> = (1..=n)
            .flat_map(|i| (i + 1..=n).map(move |j| (i, j)))
            .collect();
        Graph::unweighted(n, pairs, false).unwrap()
    }

    fn ints(m: &Matrix<BigInt>) -> Vec<Vec<i64>> {
        (0..m.rows())
            .map(|i| m.row(i).iter().map(|x| i64::try_from(x).unwrap()).collect())
            .collect()
    }

    fn leaders(n: usize, ids: &[usize]) -> LeaderSet {
        LeaderSet::from_ids(n, ids).unwrap()
    }

    #[test]
    fn two_node_ctrb() {
        let g = path(2);
        let gamma = ctrb_matrix_exact(&g, &leaders(2, &[1])).unwrap();
        assert_eq!(ints(&gamma), vec![vec![1, -1], vec![0, 1]]);
        assert_eq!(matrix::rank_exact(&gamma), 2);
    }

    #[test]
    fn first_block_is_b() {
        let g = complete(4);
        let l = leaders(4, &[2, 4]);
        let gamma = ctrb_matrix_exact(&g, &l).unwrap();
        let b: Matrix<BigInt> = InputMatrix::new(4, &l).to_dense();
        for i in 0..4 {
            for j in 0..2 {
                assert_eq!(gamma[(i, j)], b[(i, j)]);
            }
        }
        assert_eq!(gamma.cols(), 8);
    }

    #[test]
    fn complete_graph_single_leader_spans_two_dims() {
        let g = complete(3);
        let r = controllability_rank(&g, &leaders(3, &[1]), RankOptions::default()).unwrap();
        assert_eq!(r.rank, 2);
        assert_eq!(r.method, RankMethod::Exact);
    }

    #[test]
    fn dimension_mismatch() {
        let l = Matrix::<BigInt>::zeros(3, 3);
        let b = InputMatrix::new(4, &leaders(4, &[1]));
        assert!(matches!(
            ctrb_matrix(&l, &b),
            Err(OracleError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn path_ranks() {
        let r = uniform_rank(&path(4), &leaders(4, &[1])).unwrap();
        assert_eq!(r.rank, 4);
        // Mid leader of P3: the two leaves stay symmetric.
        let r = uniform_rank(&path(3), &leaders(3, &[2])).unwrap();
        assert_eq!(r.rank, 2);
        let b = BoundReport::compute(&path(3), &leaders(3, &[2])).unwrap();
        assert_eq!((b.delta, b.upsilon), (2, 2));
    }

    #[test]
    fn auto_falls_back_for_float_weights() {
        let g = Graph::build(
            3,
            [(1, 2, Weight::Float(0.5)), (2, 3, Weight::Float(1.5))],
            false,
        )
        .unwrap();
        let l = leaders(3, &[1]);
        let r = controllability_rank(&g, &l, RankOptions::default()).unwrap();
        assert_eq!(r.method, RankMethod::Numerical);
        assert!(r.fallback.is_some() && r.tolerance.is_some());
        assert_eq!(r.rank, 3);
        let exact = controllability_rank(
            &g,
            &l,
            RankOptions {
                method: RankMethod::Exact,
                rel_tol: None,
            },
        )
        .unwrap();
        assert_eq!(exact.rank, 3);
    }

    #[test]
    fn path3_power_entries() {
        let g = Graph::build(
            3,
            [(1, 2, Weight::integer(3)), (2, 3, Weight::integer(5))],
            false,
        )
        .unwrap();
        let LaplacianMatrix::Exact(l) = g.laplacian() else {
            panic!()
        };
        let p = neg_laplacian_powers(&l, 2);
        assert!(p[1][(0, 2)].is_zero());
        assert_eq!(p[2][(0, 2)], BigRational::from_integer(15.into()));
        assert_eq!(zero_pattern_violation(&g), None);
    }

    #[test]
    fn complete_graph_first_power_is_dense() {
        let LaplacianMatrix::Exact(l) = complete(3).laplacian() else {
            panic!()
        };
        let p = neg_laplacian_powers(&l, 1);
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    assert!(!p[1][(i, j)].is_zero());
                }
            }
        }
    }

    #[test]
    fn lemma_and_theorem_checks_pass_on_small_graphs() {
        let v = check_lemma1(&path(5), 5, 1);
        assert!(v.passed, "{v:?}");
        let cycle = Graph::unweighted(5, (1..=5).map(|i| (i, i % 5 + 1)), false).unwrap();
        let v = check_theorem(&cycle, &leaders(5, &[1, 2]), 5, 3).unwrap();
        assert!(v.passed);
        assert_eq!((v.delta, v.min_rank), (Some(5), Some(5)));
        let v = check_theorem(&path(4), &leaders(4, &[2]), 5, 3).unwrap();
        assert!(v.passed && v.min_rank.unwrap() >= 2);
    }

    #[test]
    fn disconnected_graph_is_reported() {
        let g = Graph::unweighted(3, [(1, 2)], false).unwrap();
        let v = check_lemma1(&g, 2, 0);
        assert!(!v.passed);
        assert_eq!(v.counterexample, Some(Counterexample::Disconnected));
        assert!(matches!(
            check_theorem(&g, &leaders(3, &[1]), 2, 0),
            Err(OracleError::Bound(BoundError::Disconnected))
        ));
    }

    #[test]
    fn sampled_weights_are_reproducible_and_in_range() {
        let g = complete(5);
        let a = sample_weights(&g, 9, 2);
        assert_eq!(a, sample_weights(&g, 9, 2));
        assert_ne!(a, sample_weights(&g, 9, 3));
        for w in a {
            let x = w.to_f64();
            assert!((1.0..=1000.0).contains(&x) && x.fract() == 0.0);
        }
    }

    #[test]
    fn verdict_json_shape() {
        let v = check_lemma1(&path(3), 1, 0);
        let json = serde_json::to_value(&v).unwrap();
        assert_eq!(
            json,
            serde_json::json!({"property": "power_zero_pattern", "trials": 1, "passed": true})
        );
    }
}
