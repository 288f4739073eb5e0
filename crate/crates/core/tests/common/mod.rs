#![allow(dead_code)]

use dlbound::generators::{resample_until_connected, Family, GenSpec};
use dlbound::rng::{self, StreamRng};
use dlbound::{Graph, LeaderSet};
use rand::Rng;

pub fn path(n: usize) -> Graph {
    Graph::unweighted(n, (1..n).map(|i| (i, i + 1)), false).unwrap()
}

pub fn cycle(n: usize) -> Graph {
    Graph::unweighted(n, (1..=n).map(|i| (i, i % n + 1)), false).unwrap()
}

/// Graph whose DL vectors for leaders {1, 6} are
/// d1=(0,3) d2=(1,3) d3=(1,2) d4=(2,2) d5=(2,1) d6=(3,0).
pub fn worked_example_graph() -> Graph {
    Graph::unweighted(6, [(1, 2), (1, 3), (2, 4), (3, 5), (4, 5), (5, 6)], false).unwrap()
}

pub const WORKED_EXAMPLE_ROWS: [[usize; 2]; 6] = [[0, 3], [1, 3], [1, 2], [2, 2], [2, 1], [3, 0]];

/// Connected ER or BA graph with `n_min..=n_max` nodes.
pub fn random_connected(rng: &mut StreamRng, n_min: usize, n_max: usize) -> Graph {
    loop {
        let n = rng.gen_range(n_min..=n_max);
        let family = if rng.gen_bool(0.5) || n < 3 {
            Family::ErdosRenyi {
                p: rng.gen_range(0.15..0.85),
            }
        } else {
            Family::BarabasiAlbert {
                m: rng.gen_range(1..n.min(4)),
            }
        };
        let spec = GenSpec::new(family, n, rng.gen());
        if let Ok((g, _)) = resample_until_connected(&spec, 200) {
            return g;
        }
    }
}

/// Strongly connected random digraph; `(u, v)` means u is influenced by v.
pub fn random_strongly_connected(rng: &mut StreamRng, n_min: usize, n_max: usize) -> Graph {
    loop {
        let n = rng.gen_range(n_min..=n_max);
        let p = rng.gen_range(0.2..0.6);
        let mut arcs = Vec::new();
        for u in 1..=n {
            for v in 1..=n {
                if u != v && rng.gen_bool(p) {
                    arcs.push((u, v));
                }
            }
        }
        let g = Graph::unweighted(n, arcs, true).unwrap();
        if g.is_strongly_connected() {
            return g;
        }
    }
}

pub fn random_leaders(rng: &mut StreamRng, n: usize, max_m: usize) -> LeaderSet {
    let m = rng.gen_range(1..=max_m.min(n));
    LeaderSet::from_indices(rand::seq::index::sample(rng, n, m).into_vec()).unwrap()
}

pub fn test_rng(seed: u64) -> StreamRng {
    rng::stream(seed, 0xACCE)
}
