//! Weighted graphs, their Laplacians and hop-count distances.
//!
//! Node ids are 1-based at the API boundary (`Graph::build`, edge lists,
//! JSON) and 0-based indices everywhere else. For directed graphs an edge
//! `(u, v)` means `u` is influenced by `v`: it contributes `w` to `A[u][v]`
//! and to the out-degree of `u`, and it is traversed `u -> v` when
//! measuring distances.

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::matrix::Matrix;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("graph must have at least one node")]
    Empty,
    #[error("edge ({u}, {v}): node id out of range 1..={n}")]
    NodeOutOfRange { u: usize, v: usize, n: usize },
    #[error("edge ({0}, {0}) is a self-loop")]
    SelfLoop(usize),
    #[error("edge ({u}, {v}) has nonpositive weight {w}")]
    NonpositiveWeight { u: usize, v: usize, w: String },
    #[error("duplicate edge ({u}, {v})")]
    DuplicateEdge { u: usize, v: usize },
    #[error("expected {expected} weights, got {got}")]
    WeightCount { expected: usize, got: usize },
}

/// Edge weight. Integer and `p/q` text parses to an exact rational, any
/// other numeric text to a float.
#[derive(Clone, Debug, PartialEq)]
pub enum Weight {
    Exact(BigRational),
    Float(f64),
}

impl Weight {
    pub fn one() -> Self {
        Weight::Exact(BigRational::one())
    }

    pub fn integer(v: i64) -> Self {
        Weight::Exact(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn is_positive(&self) -> bool {
        match self {
            Weight::Exact(r) => r.is_positive(),
            Weight::Float(f) => f.is_finite() && *f > 0.0,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Weight::Exact(_))
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Weight::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            Weight::Float(f) => *f,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("invalid weight {0:?}")]
pub struct WeightParseError(pub String);

impl FromStr for Weight {
    type Err = WeightParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || WeightParseError(s.to_string());
        if let Some((p, q)) = s.split_once('/') {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            return Ok(Weight::Exact(BigRational::new(p, q)));
        }
        if let Ok(i) = s.parse::<BigInt>() {
            return Ok(Weight::Exact(BigRational::from_integer(i)));
        }
        match s.parse::<f64>() {
            Ok(f) if f.is_finite() => Ok(Weight::Float(f)),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Weight::Exact(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Weight::Exact(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            // Debug keeps a decimal point, so the value re-parses as a float.
            Weight::Float(x) => write!(f, "{x:?}"),
        }
    }
}

/// 0-based edge record.
#[derive(Clone, Debug, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: Weight,
}

/// Immutable weighted graph with positive weights and no self-loops.
#[derive(Clone, Debug, PartialEq)]
pub struct Graph {
    n: usize,
    directed: bool,
    edges: Vec<Edge>,
    /// Out-neighbors as (neighbor, edge index); both directions when undirected.
    adj: Vec<Vec<(usize, usize)>>,
}

impl Graph {
    /// Builds a graph from 1-based edges.
    pub fn build(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize, Weight)>,
        directed: bool,
    ) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::Empty);
        }
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for (u, v, w) in edges {
            if u == 0 || v == 0 || u > n || v > n {
                return Err(GraphError::NodeOutOfRange { u, v, n });
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            if !w.is_positive() {
                return Err(GraphError::NonpositiveWeight {
                    u,
                    v,
                    w: w.to_string(),
                });
            }
            let key = if directed { (u, v) } else { (u.min(v), u.max(v)) };
            if !seen.insert(key) {
                return Err(GraphError::DuplicateEdge { u, v });
            }
            out.push(Edge {
                u: u - 1,
                v: v - 1,
                w,
            });
        }
        Ok(Self::from_parts(n, directed, out))
    }

    /// Unit-weight graph from 1-based node pairs.
    pub fn unweighted(
        n: usize,
        pairs: impl IntoIterator<Item = (usize, usize)>,
        directed: bool,
    ) -> Result<Self, GraphError> {
        Self::build(
            n,
            pairs.into_iter().map(|(u, v)| (u, v, Weight::one())),
            directed,
        )
    }

    fn from_parts(n: usize, directed: bool, edges: Vec<Edge>) -> Self {
        let mut adj = vec![Vec::new(); n];
        for (k, e) in edges.iter().enumerate() {
            adj[e.u].push((e.v, k));
            if !directed {
                adj[e.v].push((e.u, k));
            }
        }
        Self {
            n,
            directed,
            edges,
            adj,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// 0-based out-neighbors of node index `i`.
    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[i].iter().map(|&(j, _)| j)
    }

    pub fn has_exact_weights(&self) -> bool {
        self.edges.iter().all(|e| e.w.is_exact())
    }

    pub fn has_uniform_weights(&self) -> bool {
        self.edges.windows(2).all(|w| w[0].w == w[1].w)
    }

    /// Same topology with new weights, one per edge in `edges()` order.
    pub fn reweighted(&self, weights: Vec<Weight>) -> Result<Self, GraphError> {
        if weights.len() != self.edges.len() {
            return Err(GraphError::WeightCount {
                expected: self.edges.len(),
                got: weights.len(),
            });
        }
        let edges = self
            .edges
            .iter()
            .zip(weights)
            .map(|(e, w)| (e.u + 1, e.v + 1, w));
        Self::build(self.n, edges, self.directed)
    }

    /// Same topology with every weight set to one.
    pub fn with_unit_weights(&self) -> Self {
        self.reweighted(vec![Weight::one(); self.edges.len()])
            .expect("same topology")
    }

    pub fn laplacian(&self) -> LaplacianMatrix {
        if self.has_exact_weights() {
            let mut l = Matrix::<BigRational>::zeros(self.n, self.n);
            for e in &self.edges {
                let Weight::Exact(w) = &e.w else { unreachable!() };
                add_edge_terms(&mut l, e.u, e.v, w, self.directed);
            }
            LaplacianMatrix::Exact(l)
        } else {
            let mut l = Matrix::<f64>::zeros(self.n, self.n);
            for e in &self.edges {
                add_edge_terms(&mut l, e.u, e.v, &e.w.to_f64(), self.directed);
            }
            LaplacianMatrix::Float(l)
        }
    }

    /// Hop-count distances by BFS from every node.
    pub fn distances(&self) -> DistanceMatrix {
        let mut dist = vec![None; self.n * self.n];
        let mut queue = VecDeque::new();
        for s in 0..self.n {
            let row = &mut dist[s * self.n..(s + 1) * self.n];
            row[s] = Some(0);
            queue.clear();
            queue.push_back(s);
            while let Some(x) = queue.pop_front() {
                let dx = row[x].unwrap();
                for &(y, _) in &self.adj[x] {
                    if row[y].is_none() {
                        row[y] = Some(dx + 1);
                        queue.push_back(y);
                    }
                }
            }
        }
        DistanceMatrix { n: self.n, dist }
    }

    /// Connectivity ignoring edge direction.
    pub fn is_connected(&self) -> bool {
        let mut und = vec![Vec::new(); self.n];
        for e in &self.edges {
            und[e.u].push(e.v);
            und[e.v].push(e.u);
        }
        reach_count(&und, 0) == self.n
    }

    /// Every node reaches every other node along edge directions. For
    /// undirected graphs this is ordinary connectivity.
    pub fn is_strongly_connected(&self) -> bool {
        if !self.directed {
            return self.is_connected();
        }
        let fwd: Vec<Vec<usize>> = (0..self.n).map(|i| self.neighbors(i).collect()).collect();
        let mut rev = vec![Vec::new(); self.n];
        for e in &self.edges {
            rev[e.v].push(e.u);
        }
        reach_count(&fwd, 0) == self.n && reach_count(&rev, 0) == self.n
    }

    /// The connectivity notion the distance bounds require: connected when
    /// undirected, strongly connected when directed.
    pub fn is_bound_connected(&self) -> bool {
        self.is_strongly_connected()
    }
}

fn reach_count(adj: &[Vec<usize>], start: usize) -> usize {
    let mut seen = vec![false; adj.len()];
    let mut stack = vec![start];
    seen[start] = true;
    let mut count = 1;
    while let Some(x) = stack.pop() {
        for &y in &adj[x] {
            if !seen[y] {
                seen[y] = true;
                count += 1;
                stack.push(y);
            }
        }
    }
    count
}

fn add_edge_terms<T>(l: &mut Matrix<T>, u: usize, v: usize, w: &T, directed: bool)
where
    T: Clone + std::ops::AddAssign + std::ops::SubAssign,
{
    l[(u, u)] += w.clone();
    l[(u, v)] -= w.clone();
    if !directed {
        l[(v, v)] += w.clone();
        l[(v, u)] -= w.clone();
    }
}

/// `L = Delta - A`, exact when every weight is exact.
#[derive(Clone, Debug, PartialEq)]
pub enum LaplacianMatrix {
    Exact(Matrix<BigRational>),
    Float(Matrix<f64>),
}

impl LaplacianMatrix {
    pub fn n(&self) -> usize {
        match self {
            LaplacianMatrix::Exact(m) => m.rows(),
            LaplacianMatrix::Float(m) => m.rows(),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, LaplacianMatrix::Exact(_))
    }

    pub fn to_f64(&self) -> Matrix<f64> {
        match self {
            LaplacianMatrix::Exact(m) => m.map(|x| x.to_f64().unwrap_or(f64::NAN)),
            LaplacianMatrix::Float(m) => m.clone(),
        }
    }

    /// `c * L` as an integer matrix, where `c` is the least common multiple
    /// of all denominators. Scaling `L` by a positive constant scales each
    /// block of the controllability matrix by a power of `c`, so rank and
    /// zero patterns are unchanged.
    pub fn to_integer_scaled(&self) -> Option<(Matrix<BigInt>, BigInt)> {
        let LaplacianMatrix::Exact(m) = self else {
            return None;
        };
        let mut scale = BigInt::one();
        for i in 0..m.rows() {
            for x in m.row(i) {
                scale = scale.lcm(x.denom());
            }
        }
        let scaled = m.map(|x| (x * BigRational::from_integer(scale.clone())).to_integer());
        Some((scaled, scale))
    }
}

/// All-pairs hop counts; `None` marks an unreachable pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistanceMatrix {
    n: usize,
    dist: Vec<Option<usize>>,
}

impl DistanceMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Distance from node index `i` to node index `j`.
    pub fn get(&self, i: usize, j: usize) -> Option<usize> {
        self.dist[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[Option<usize>] {
        &self.dist[i * self.n..(i + 1) * self.n]
    }

    pub fn all_reachable(&self) -> bool {
        self.dist.iter().all(Option::is_some)
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// Largest finite distance.
    pub fn max_distance(&self) -> Option<usize> {
        self.dist.iter().flatten().copied().max()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> Graph {
        Graph::unweighted(n, (1..n).map(|i| (i, i + 1)), false).unwrap()
    }

    fn cycle(n: usize, directed: bool) -> Graph {
        Graph::unweighted(n, (1..=n).map(|i| (i, i % n + 1)), directed).unwrap()
    }

    #[test]
    fn build_rejects_invalid_edges() {
        assert!(Graph::unweighted(2, [(1, 2)], false).is_ok());
        assert!(matches!(
            Graph::build(3, [(1, 2, Weight::integer(0))], false),
            Err(GraphError::NonpositiveWeight { .. })
        ));
        assert!(matches!(
            Graph::build(3, [(1, 2, Weight::Float(-0.5))], false),
            Err(GraphError::NonpositiveWeight { .. })
        ));
        assert_eq!(
            Graph::unweighted(3, [(2, 2)], false),
            Err(GraphError::SelfLoop(2))
        );
        assert!(matches!(
            Graph::unweighted(3, [(1, 4)], false),
            Err(GraphError::NodeOutOfRange { .. })
        ));
        assert!(matches!(
            Graph::unweighted(3, [(1, 2), (2, 1)], false),
            Err(GraphError::DuplicateEdge { .. })
        ));
        // Opposite arcs are distinct in a digraph.
        assert!(Graph::unweighted(3, [(1, 2), (2, 1)], true).is_ok());
        assert_eq!(Graph::unweighted(0, [], false), Err(GraphError::Empty));
    }

    #[test]
    fn two_node_laplacian() {
        let LaplacianMatrix::Exact(l) = path(2).laplacian() else {
            panic!("expected exact laplacian")
        };
        let expect = [[1, -1], [-1, 1]];
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(l[(i, j)], BigRational::from_integer(expect[i][j].into()));
            }
        }
    }

    #[test]
    fn path3_laplacian_and_row_sums() {
        let LaplacianMatrix::Exact(l) = path(3).laplacian() else {
            panic!()
        };
        let diag: Vec<_> = (0..3).map(|i| l[(i, i)].to_integer()).collect();
        assert_eq!(diag, vec![1.into(), 2.into(), 1.into()]);
        assert_eq!(l[(0, 1)], BigRational::from_integer((-1).into()));
        assert!(l[(0, 2)].is_zero());
        for i in 0..3 {
            assert!(l.row(i).iter().cloned().sum::<BigRational>().is_zero());
        }
    }

    #[test]
    fn float_laplacian_when_any_weight_is_float() {
        let g = Graph::build(
            3,
            [(1, 2, Weight::Float(0.5)), (2, 3, Weight::integer(2))],
            false,
        )
        .unwrap();
        let LaplacianMatrix::Float(l) = g.laplacian() else {
            panic!()
        };
        assert_eq!(l[(1, 1)], 2.5);
        assert_eq!(l[(1, 0)], -0.5);
    }

    #[test]
    fn directed_laplacian_uses_influence_rows() {
        // 1 is influenced by 2 with weight 3.
        let g = Graph::build(2, [(1, 2, Weight::integer(3))], true).unwrap();
        let LaplacianMatrix::Exact(l) = g.laplacian() else {
            panic!()
        };
        assert_eq!(l[(0, 0)].to_integer(), 3.into());
        assert_eq!(l[(0, 1)].to_integer(), (-3).into());
        assert!(l[(1, 0)].is_zero() && l[(1, 1)].is_zero());
    }

    #[test]
    fn scaled_integer_laplacian() {
        let g = Graph::build(
            3,
            [
                (1, 2, "1/2".parse().unwrap()),
                (2, 3, "2/3".parse().unwrap()),
            ],
            false,
        )
        .unwrap();
        let (m, scale) = g.laplacian().to_integer_scaled().unwrap();
        assert_eq!(scale, 6.into());
        assert_eq!(m[(1, 1)], 7.into());
        assert_eq!(m[(0, 1)], (-3).into());
    }

    #[test]
    fn bfs_examples() {
        assert_eq!(path(4).distances().get(0, 3), Some(3));
        assert_eq!(cycle(5, false).distances().get(0, 3), Some(2));
        let d = cycle(3, true).distances();
        assert_eq!(d.get(0, 2), Some(2));
        assert_eq!(d.get(2, 0), Some(1));
        assert!(!d.is_symmetric());
    }

    #[test]
    fn unreachable_pairs_are_marked() {
        let g = Graph::unweighted(3, [(1, 2)], false).unwrap();
        let d = g.distances();
        assert_eq!(d.get(0, 2), None);
        assert!(!d.all_reachable());
    }

    #[test]
    fn connectivity() {
        assert!(path(3).is_connected());
        assert!(!Graph::unweighted(2, [], false).unwrap().is_connected());
        let chain = Graph::unweighted(3, [(1, 2), (2, 3)], true).unwrap();
        assert!(chain.is_connected());
        assert!(!chain.is_strongly_connected());
        assert!(cycle(4, true).is_strongly_connected());
    }

    #[test]
    fn weight_text_round_trip() {
        for s in ["1", "3/7", "-2/5", "0.25", "1e-7", "2.0"] {
            let w: Weight = s.parse().unwrap();
            let back: Weight = w.to_string().parse().unwrap();
            assert_eq!(w, back, "{s}");
        }
        assert!(matches!("4/2".parse::<Weight>(), Ok(Weight::Exact(_))));
        assert_eq!("4/2".parse::<Weight>().unwrap().to_string(), "2");
        assert!("1/0".parse::<Weight>().is_err());
        assert!("abc".parse::<Weight>().is_err());
        assert!("inf".parse::<Weight>().is_err());
    }
}
