//! Distance-to-leaders (DL) vectors and the bounds built on them.
//!
//! For leaders `l_1 < ... < l_m`, node `i` has the DL vector
//! `d_i = (dist(i, l_1), ..., dist(i, l_m))`. A sequence of vectors is
//! pseudo-monotonically increasing (PMI) when every element `D_p` has a
//! coordinate `alpha(p)` strictly smaller than the same coordinate of all
//! later elements. Three counts are reported per instance:
//!
//! * `delta`: length of the longest PMI sequence of the DL vectors, a
//!   weight-independent lower bound on the rank of the controllability
//!   matrix;
//! * `mu`: one plus the largest node-to-leader distance;
//! * `upsilon`: the number of distinct DL vectors.
//!
//! They always satisfy `upsilon >= delta >= mu`.

use std::collections::HashSet;

use serde::ser::{Serialize, SerializeStruct, Serializer};
use thiserror::Error;

use crate::graph::Graph;

/// Default node cap for [`brute_force_delta`].
pub const BRUTE_FORCE_CAP: usize = 10;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BoundError {
    #[error("leader set is empty")]
    EmptyLeaders,
    #[error("leader id {id} out of range 1..={n}")]
    LeaderOutOfRange { id: usize, n: usize },
    #[error("leader id {0} listed twice")]
    DuplicateLeader(usize),
    #[error("graph is not connected (bounds require a connected graph, strongly connected if directed)")]
    Disconnected,
    #[error("vector {index} has dimension {got}, expected {expected}")]
    DimensionMismatch {
        index: usize,
        expected: usize,
        got: usize,
    },
    #[error("expected {expected} witnesses, got {got}")]
    WitnessLength { expected: usize, got: usize },
    #[error("witness coordinate {alpha} out of range for dimension {m}")]
    WitnessOutOfRange { alpha: usize, m: usize },
    #[error("brute force limited to {cap} vectors, got {n}")]
    CapExceeded { n: usize, cap: usize },
}

/// Sorted, duplicate-free set of leader node indices (0-based).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LeaderSet(Vec<usize>);

impl LeaderSet {
    /// From 1-based node ids in any order.
    pub fn from_ids(n: usize, ids: &[usize]) -> Result<Self, BoundError> {
        let mut idx = Vec::with_capacity(ids.len());
        for &id in ids {
            if id == 0 || id > n {
                return Err(BoundError::LeaderOutOfRange { id, n });
            }
            idx.push(id - 1);
        }
        Self::from_indices(idx)
    }

    /// From 0-based indices in any order.
    pub fn from_indices(mut idx: Vec<usize>) -> Result<Self, BoundError> {
        if idx.is_empty() {
            return Err(BoundError::EmptyLeaders);
        }
        idx.sort_unstable();
        if let Some(w) = idx.windows(2).find(|w| w[0] == w[1]) {
            return Err(BoundError::DuplicateLeader(w[0] + 1));
        }
        Ok(Self(idx))
    }

    pub fn all(n: usize) -> Self {
        Self((0..n).collect())
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn ids(&self) -> Vec<usize> {
        self.0.iter().map(|i| i + 1).collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// One DL vector per node, coordinates ordered by ascending leader id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DlMatrix {
    m: usize,
    directed: bool,
    leaders: Vec<usize>,
    rows: Vec<Vec<usize>>,
}

impl DlMatrix {
    /// DL vectors of `g` for `leaders`.
    pub fn from_graph(g: &Graph, leaders: &LeaderSet) -> Result<Self, BoundError> {
        if leaders.is_empty() {
            return Err(BoundError::EmptyLeaders);
        }
        if let Some(&bad) = leaders.indices().iter().find(|&&l| l >= g.n()) {
            return Err(BoundError::LeaderOutOfRange {
                id: bad + 1,
                n: g.n(),
            });
        }
        if !g.is_bound_connected() {
            return Err(BoundError::Disconnected);
        }
        let dist = g.distances();
        let rows = (0..g.n())
            .map(|i| {
                leaders
                    .indices()
                    .iter()
                    .map(|&l| dist.get(i, l).expect("connected graph"))
                    .collect()
            })
            .collect();
        Ok(Self {
            m: leaders.len(),
            directed: g.is_directed(),
            leaders: leaders.indices().to_vec(),
            rows,
        })
    }

    /// Raw vectors with no underlying graph, for worked examples and tests.
    pub fn from_rows(rows: Vec<Vec<usize>>) -> Result<Self, BoundError> {
        let m = rows.first().map_or(0, Vec::len);
        for (index, r) in rows.iter().enumerate() {
            if r.len() != m {
                return Err(BoundError::DimensionMismatch {
                    index,
                    expected: m,
                    got: r.len(),
                });
            }
        }
        if m == 0 {
            return Err(BoundError::EmptyLeaders);
        }
        Ok(Self {
            m,
            directed: false,
            leaders: Vec::new(),
            rows,
        })
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    /// Number of leaders (vector dimension).
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    /// 0-based leader indices; empty for matrices built with `from_rows`.
    pub fn leaders(&self) -> &[usize] {
        &self.leaders
    }

    pub fn row(&self, i: usize) -> &[usize] {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }
}

/// A PMI sequence as row indices into a [`DlMatrix`] plus the 0-based
/// coordinate `alpha` that certifies each element.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct PmiSequence {
    pub nodes: Vec<usize>,
    pub alphas: Vec<usize>,
}

impl PmiSequence {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn vectors<'a>(&self, dl: &'a DlMatrix) -> Vec<&'a [usize]> {
        self.nodes.iter().map(|&i| dl.row(i)).collect()
    }

    pub fn is_valid_for(&self, dl: &DlMatrix) -> bool {
        is_pmi(&self.vectors(dl), &self.alphas).unwrap_or(false)
    }
}

fn check_dims<V: AsRef<[usize]>>(seq: &[V]) -> Result<usize, BoundError> {
    let m = seq.first().map_or(0, |v| v.as_ref().len());
    for (index, v) in seq.iter().enumerate() {
        if v.as_ref().len() != m {
            return Err(BoundError::DimensionMismatch {
                index,
                expected: m,
                got: v.as_ref().len(),
            });
        }
    }
    Ok(m)
}

/// Suffix minima per coordinate: `out[i][j] = min_{k > i} seq[k][j]`, or
/// `usize::MAX` past the end.
fn suffix_minima<V: AsRef<[usize]>>(seq: &[V], m: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![usize::MAX; m]; seq.len()];
    for i in (0..seq.len().saturating_sub(1)).rev() {
        let (head, tail) = out.split_at_mut(i + 1);
        for ((slot, &after), &x) in head[i].iter_mut().zip(&tail[0]).zip(seq[i + 1].as_ref()) {
            *slot = after.min(x);
        }
    }
    out
}

/// Checks the PMI condition against given witnesses (0-based coordinates).
pub fn is_pmi<V: AsRef<[usize]>>(seq: &[V], alphas: &[usize]) -> Result<bool, BoundError> {
    let m = check_dims(seq)?;
    if alphas.len() != seq.len() {
        return Err(BoundError::WitnessLength {
            expected: seq.len(),
            got: alphas.len(),
        });
    }
    if let Some(&alpha) = alphas.iter().find(|&&a| a >= m) {
        return Err(BoundError::WitnessOutOfRange { alpha, m });
    }
    let suffix = suffix_minima(seq, m);
    Ok(alphas
        .iter()
        .enumerate()
        .all(|(i, &a)| seq[i].as_ref()[a] < suffix[i][a]))
}

/// Witness-free PMI check. The condition for element `i` involves only
/// `alpha(i)`, so searching all `m^len` assignments factors into an
/// independent choice per element. Returns the lowest valid witness per
/// element when the sequence is PMI.
pub fn find_pmi_witness<V: AsRef<[usize]>>(seq: &[V]) -> Result<Option<Vec<usize>>, BoundError> {
    let m = check_dims(seq)?;
    let suffix = suffix_minima(seq, m);
    Ok(seq
        .iter()
        .enumerate()
        .map(|(i, v)| (0..m).find(|&a| v.as_ref()[a] < suffix[i][a]))
        .collect())
}

/// Bit set over DL matrix rows.
#[derive(Clone, PartialEq, Eq, Hash)]
struct RowSet(Vec<u64>);

impl RowSet {
    fn full(n: usize) -> Self {
        let mut words = vec![u64::MAX; n.div_ceil(64)];
        if !n.is_multiple_of(64) {
            *words.last_mut().unwrap() = (1u64 << (n % 64)) - 1;
        }
        Self(words)
    }

    fn empty_like(&self) -> Self {
        Self(vec![0; self.0.len()])
    }

    fn insert(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(k, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(k * 64 + b)
            })
        })
    }
}

/// Candidate set in the search tree: the rows still eligible, and how it
/// was reached from the previous level.
struct Candidate {
    set: RowSet,
    parent: usize,
    alpha: usize,
}

/// Lowest-index row of `set` attaining the minimum of coordinate `j`.
fn argmin(dl: &DlMatrix, set: &RowSet, j: usize) -> (usize, usize) {
    set.iter()
        .map(|t| (dl.row(t)[j], t))
        .min()
        .map(|(v, t)| (t, v))
        .expect("nonempty candidate set")
}

/// Result of the candidate-set search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaOutcome {
    pub delta: usize,
    pub witness: PmiSequence,
    /// Distinct nonempty candidate sets generated over all levels.
    pub sets_generated: usize,
}

/// Longest PMI sequence length of the DL vectors.
///
/// A longest sequence can always take, as its `p`-th element, a vector
/// attaining the minimum of coordinate `alpha(p)` over the current
/// candidate set. So only the choice of `alpha(p)` branches: each
/// nonempty candidate set has `m` children, the child for coordinate `j`
/// dropping every vector that attains the coordinate-`j` minimum. The
/// answer is the number of levels holding a nonempty set. Children depend
/// only on their parent set, so duplicate sets within a level are merged.
pub fn delta_bound(dl: &DlMatrix) -> DeltaOutcome {
    let n = dl.n();
    if n == 0 {
        return DeltaOutcome {
            delta: 0,
            witness: PmiSequence::default(),
            sets_generated: 0,
        };
    }
    let mut levels: Vec<Vec<Candidate>> = vec![vec![Candidate {
        set: RowSet::full(n),
        parent: usize::MAX,
        alpha: 0,
    }]];
    let mut generated = 1;
    loop {
        let current = levels.last().unwrap();
        let mut seen = HashSet::new();
        let mut next = Vec::new();
        for (pi, cand) in current.iter().enumerate() {
            for j in 0..dl.m() {
                let (_, min) = argmin(dl, &cand.set, j);
                let mut child = cand.set.empty_like();
                for t in cand.set.iter() {
                    if dl.row(t)[j] > min {
                        child.insert(t);
                    }
                }
                if child.is_empty() || !seen.insert(child.clone()) {
                    continue;
                }
                next.push(Candidate {
                    set: child,
                    parent: pi,
                    alpha: j,
                });
            }
        }
        if next.is_empty() {
            break;
        }
        generated += next.len();
        levels.push(next);
    }

    let delta = levels.len();
    let mut nodes = vec![0; delta];
    let mut alphas = vec![0; delta];
    // The last element may use any coordinate; take the first.
    let mut at = 0;
    let last = &levels[delta - 1][at];
    nodes[delta - 1] = argmin(dl, &last.set, 0).0;
    for p in (0..delta - 1).rev() {
        let child = &levels[p + 1][at];
        let parent = &levels[p][child.parent];
        nodes[p] = argmin(dl, &parent.set, child.alpha).0;
        alphas[p] = child.alpha;
        at = child.parent;
    }
    DeltaOutcome {
        delta,
        witness: PmiSequence { nodes, alphas },
        sets_generated: generated,
    }
}

/// One plus the largest node-to-leader distance.
pub fn mu_bound(dl: &DlMatrix) -> usize {
    dl.rows().iter().flatten().copied().max().map_or(0, |d| d + 1)
}

/// Number of distinct DL vectors.
pub fn upsilon_count(dl: &DlMatrix) -> usize {
    dl.rows().iter().collect::<HashSet<_>>().len()
}

/// Exhaustive longest-PMI search with the default cap.
pub fn brute_force_delta(dl: &DlMatrix) -> Result<usize, BoundError> {
    brute_force_delta_capped(dl, BRUTE_FORCE_CAP)
}

/// Exhaustive longest-PMI search over every choice of next element and
/// witness coordinate, memoized on the remaining candidate set. Uses only
/// the PMI definition, never the minimum-element shortcut, so it serves
/// as an independent check on [`delta_bound`].
pub fn brute_force_delta_capped(dl: &DlMatrix, cap: usize) -> Result<usize, BoundError> {
    let n = dl.n();
    if n > cap || n > 24 {
        return Err(BoundError::CapExceeded { n, cap: cap.min(24) });
    }
    let mut memo = vec![u8::MAX; 1 << n];
    Ok(longest_from(dl, (1u32 << n) - 1, &mut memo) as usize)
}

fn longest_from(dl: &DlMatrix, mask: u32, memo: &mut [u8]) -> u8 {
    if mask == 0 {
        return 0;
    }
    if memo[mask as usize] != u8::MAX {
        return memo[mask as usize];
    }
    let mut best = 0;
    for r in 0..dl.n() {
        if mask & (1 << r) == 0 {
            continue;
        }
        for a in 0..dl.m() {
            let pivot = dl.row(r)[a];
            let mut rest = 0u32;
            for s in 0..dl.n() {
                if s != r && mask & (1 << s) != 0 && dl.row(s)[a] > pivot {
                    rest |= 1 << s;
                }
            }
            best = best.max(1 + longest_from(dl, rest, memo));
        }
    }
    memo[mask as usize] = best;
    best
}

/// Bounds for one graph and leader set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundReport {
    pub n: usize,
    pub directed: bool,
    /// 0-based leader indices.
    pub leaders: Vec<usize>,
    pub delta: usize,
    pub mu: usize,
    pub upsilon: usize,
    pub witness: PmiSequence,
}

impl BoundReport {
    /// Computes all three bounds. Panics if `upsilon >= delta >= mu` fails
    /// or the witness is not a PMI sequence, either of which is a bug.
    pub fn from_dl(dl: &DlMatrix) -> Self {
        let outcome = delta_bound(dl);
        let report = Self {
            n: dl.n(),
            directed: dl.is_directed(),
            leaders: dl.leaders().to_vec(),
            delta: outcome.delta,
            mu: mu_bound(dl),
            upsilon: upsilon_count(dl),
            witness: outcome.witness,
        };
        assert!(
            report.upsilon >= report.delta && report.delta >= report.mu,
            "bound chain violated: upsilon={} delta={} mu={}",
            report.upsilon,
            report.delta,
            report.mu
        );
        assert!(report.witness.is_valid_for(dl), "invalid PMI witness");
        report
    }

    pub fn compute(g: &Graph, leaders: &LeaderSet) -> Result<Self, BoundError> {
        Ok(Self::from_dl(&DlMatrix::from_graph(g, leaders)?))
    }
}

impl Serialize for BoundReport {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(serde::Serialize)]
        struct Witness {
            nodes: Vec<usize>,
            alphas: Vec<usize>,
        }
        let mut st = s.serialize_struct("BoundReport", 7)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("directed", &self.directed)?;
        let leaders: Vec<usize> = self.leaders.iter().map(|l| l + 1).collect();
        st.serialize_field("leaders", &leaders)?;
        st.serialize_field("delta", &self.delta)?;
        st.serialize_field("mu", &self.mu)?;
        st.serialize_field("upsilon", &self.upsilon)?;
        st.serialize_field(
            "witness",
            &Witness {
                nodes: self.witness.nodes.iter().map(|i| i + 1).collect(),
                alphas: self.witness.alphas.iter().map(|a| a + 1).collect(),
            },
        )?;
        st.end()
    }
}
