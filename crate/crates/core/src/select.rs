//! Minimal leader selection: the smallest leader set whose distance bound
//! reaches a target `k`, which by the rank bound guarantees a controllable
//! subspace of dimension at least `k` for every positive weighting.

use itertools::Itertools;
use rayon::prelude::*;
use serde::ser::{Serialize, SerializeStruct, Serializer};
use thiserror::Error;

use crate::bound::{delta_bound, upsilon_count, BoundError, DlMatrix, LeaderSet};
use crate::graph::Graph;

/// Subsets evaluated per parallel batch in exhaustive mode.
const BATCH: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SelectionMode {
    #[default]
    Exhaustive,
    Greedy,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SelectError {
    #[error("target k = {k} outside 1..={n}")]
    BadTarget { k: usize, n: usize },
    #[error("no leader set of size <= {budget} reaches delta >= {k}")]
    BudgetExceeded { budget: usize, k: usize },
    #[error(transparent)]
    Bound(#[from] BoundError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelectionProblem {
    pub k: usize,
    pub mode: SelectionMode,
    /// Largest leader count to try.
    pub budget: Option<usize>,
    /// Skip the delta computation when `upsilon < k`.
    pub prune: bool,
}

impl SelectionProblem {
    pub fn new(k: usize, mode: SelectionMode) -> Self {
        Self {
            k,
            mode,
            budget: None,
            prune: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelectionResult {
    pub leaders: LeaderSet,
    pub delta: usize,
    pub optimal: bool,
    /// Leader sets whose delta was computed.
    pub sets_evaluated: usize,
}

impl Serialize for SelectionResult {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("SelectionResult", 4)?;
        st.serialize_field("leaders", &self.leaders.ids())?;
        st.serialize_field("delta", &self.delta)?;
        st.serialize_field("optimal", &self.optimal)?;
        st.serialize_field("sets_evaluated", &self.sets_evaluated)?;
        st.end()
    }
}

/// False when `upsilon < k`, in which case `delta < k` as well.
pub fn prune_by_upsilon(g: &Graph, leaders: &LeaderSet, k: usize) -> Result<bool, BoundError> {
    Ok(upsilon_count(&DlMatrix::from_graph(g, leaders)?) >= k)
}

pub fn select(g: &Graph, p: &SelectionProblem) -> Result<SelectionResult, SelectError> {
    match p.mode {
        SelectionMode::Exhaustive => select_exhaustive(g, p),
        SelectionMode::Greedy => select_greedy(g, p),
    }
}

fn check_problem(g: &Graph, k: usize) -> Result<(), SelectError> {
    if k == 0 || k > g.n() {
        return Err(SelectError::BadTarget { k, n: g.n() });
    }
    if !g.is_bound_connected() {
        return Err(BoundError::Disconnected.into());
    }
    Ok(())
}

enum Eval {
    Pruned,
    Delta(usize),
}

/// Tries every leader set of size 1, 2, ... in lexicographic order of
/// sorted ids and returns the first with `delta >= k`. Always succeeds
/// without a budget since all nodes as leaders give `delta = n`.
pub fn select_exhaustive(g: &Graph, p: &SelectionProblem) -> Result<SelectionResult, SelectError> {
    check_problem(g, p.k)?;
    let n = g.n();
    let dist = g.distances();
    let eval = |set: &[usize]| -> Eval {
        let rows: Vec<Vec<usize>> = (0..n)
            .map(|i| set.iter().map(|&l| dist.get(i, l).unwrap()).collect())
            .collect();
        let dl = DlMatrix::from_rows(rows).expect("nonempty leaders");
        if p.prune && upsilon_count(&dl) < p.k {
            return Eval::Pruned;
        }
        Eval::Delta(delta_bound(&dl).delta)
    };
    let max_size = p.budget.unwrap_or(n).min(n);
    let mut evaluated = 0;
    for size in 1..=max_size {
        for batch in &(0..n).combinations(size).chunks(BATCH) {
            let batch: Vec<Vec<usize>> = batch.collect();
            let results: Vec<Eval> = batch.par_iter().map(|s| eval(s)).collect();
            for (set, r) in batch.into_iter().zip(results) {
                let Eval::Delta(delta) = r else { continue };
                evaluated += 1;
                if delta >= p.k {
                    return Ok(SelectionResult {
                        leaders: LeaderSet::from_indices(set)?,
                        delta,
                        optimal: true,
                        sets_evaluated: evaluated,
                    });
                }
            }
        }
    }
    Err(SelectError::BudgetExceeded {
        budget: max_size,
        k: p.k,
    })
}

/// Adds, one at a time, the node giving the largest delta (lowest id on
/// ties) until `delta >= k`.
pub fn select_greedy(g: &Graph, p: &SelectionProblem) -> Result<SelectionResult, SelectError> {
    check_problem(g, p.k)?;
    let n = g.n();
    let max_size = p.budget.unwrap_or(n).min(n);
    let mut chosen: Vec<usize> = Vec::new();
    let mut evaluated = 0;
    while chosen.len() < max_size {
        let candidates: Vec<usize> = (0..n).filter(|i| !chosen.contains(i)).collect();
        let deltas: Vec<usize> = candidates
            .par_iter()
            .map(|&c| {
                let mut set = chosen.clone();
                set.push(c);
                let leaders = LeaderSet::from_indices(set).expect("distinct");
                delta_bound(&DlMatrix::from_graph(g, &leaders).expect("connected")).delta
            })
            .collect();
        evaluated += candidates.len();
        let (best, delta) = candidates
            .iter()
            .zip(&deltas)
            .fold((usize::MAX, 0), |acc, (&c, &d)| if d > acc.1 { (c, d) } else { acc });
        chosen.push(best);
        if delta >= p.k {
            return Ok(SelectionResult {
                leaders: LeaderSet::from_indices(chosen)?,
                delta,
                optimal: false,
                sets_evaluated: evaluated,
            });
        }
    }
    Err(SelectError::BudgetExceeded {
        budget: max_size,
        k: p.k,
    })
}
