mod common;

use common::{worked_example_graph, WORKED_EXAMPLE_ROWS};
use dlbound::{brute_force_delta, delta_bound, is_pmi, BoundReport, DlMatrix, Graph, LeaderSet};
use itertools::Itertools as _;

fn dl_rows(g: &Graph) -> Option<Vec<[usize; 2]>> {
    let d = g.distances();
    (0..6)
        .map(|i| Some([d.get(i, 0)?, d.get(i, 5)?]))
        .collect()
}

#[test]
fn fixture_is_among_all_six_node_matches() {
    let pairs: Vec<(usize, usize)> = (1..=6).tuple_combinations().collect();
    let mut matches = Vec::new();
    for mask in 0u32..1 << pairs.len() {
        let edges = pairs
            .iter()
            .enumerate()
            .filter(|(k, _)| mask >> k & 1 == 1)
            .map(|(_, &p)| p);
        let g = Graph::unweighted(6, edges, false).unwrap();
        if dl_rows(&g).as_deref() == Some(&WORKED_EXAMPLE_ROWS[..]) {
            matches.push(g);
        }
    }
    assert!(matches.contains(&worked_example_graph()));
    // Every match shares the same bound values.
    let leaders = LeaderSet::from_ids(6, &[1, 6]).unwrap();
    for g in &matches {
        let r = BoundReport::compute(g, &leaders).unwrap();
        assert_eq!((r.delta, r.upsilon), (5, 6));
    }
}

#[test]
fn labelled_sequences() {
    let [d1, d2, d3, d4, d5, d6] = WORKED_EXAMPLE_ROWS;
    // (d1, d6) with alphas (1, 2) is PMI; reversing the order breaks it.
    assert!(is_pmi(&[d1, d6], &[0, 1]).unwrap());
    assert!(!is_pmi(&[d6, d1], &[0, 1]).unwrap());
    let dl = DlMatrix::from_rows(WORKED_EXAMPLE_ROWS.iter().map(|r| r.to_vec()).collect()).unwrap();
    let out = delta_bound(&dl);
    assert_eq!(out.delta, 5);
    assert_eq!(brute_force_delta(&dl).unwrap(), 5);
    assert!(out.witness.is_valid_for(&dl));
    // Six distinct vectors, yet no PMI ordering covers all of them.
    let all = [d1, d2, d3, d4, d5, d6];
    assert!(all
        .iter()
        .permutations(6)
        .all(|p| dlbound::bound::find_pmi_witness(&p.into_iter().copied().collect::<Vec<_>>())
            .unwrap()
            .is_none()));
}
