use proptest::prelude::*;

use polyw::covers::{elevations, stallings_complete, LabeledGraph};
use polyw::{cyclic_reduce, CyclicWord, Letter, Word};

fn cyclic(rank: u32, max_len: usize) -> impl Strategy<Value = CyclicWord> {
    prop::collection::vec((1..=rank, any::<bool>()), 1..=max_len).prop_filter_map("trivial", move |v| {
        let letters = v.into_iter().map(|(g, inv)| Letter::new(g, inv)).collect();
        cyclic_reduce(&Word::new(rank, letters).unwrap()).ok()
    })
}

/// A folded graph: each generator gets a random partial injection.
fn folded(rank: u32, max_v: usize) -> impl Strategy<Value = LabeledGraph> {
    (1..=max_v).prop_flat_map(move |n| {
        let perm = Just((0..n).collect::<Vec<usize>>()).prop_shuffle();
        let keep = prop::collection::vec(any::<bool>(), n);
        prop::collection::vec((perm, keep), rank as usize).prop_map(move |maps| {
            let mut g = LabeledGraph::new(rank, n);
            for (gi, (perm, keep)) in maps.into_iter().enumerate() {
                for (tail, head) in perm.into_iter().enumerate() {
                    if keep[tail] {
                        g.add_edge(gi as u32 + 1, tail, head).unwrap();
                    }
                }
            }
            g
        })
    })
}

proptest! {
    #[test]
    fn completion_keeps_vertices_and_edges(g in folded(3, 9)) {
        let c = stallings_complete(&g).unwrap();
        prop_assert_eq!(c.degree(), g.num_vertices);
        for (map, perm) in g.maps.iter().zip(&c.perms) {
            let mut sorted = perm.clone();
            sorted.sort();
            prop_assert_eq!(sorted, (0..g.num_vertices).collect::<Vec<_>>());
            for (t, h) in map.iter().enumerate() {
                if let Some(h) = h {
                    prop_assert_eq!(perm[t], *h);
                }
            }
        }
        prop_assert_eq!(stallings_complete(&g).unwrap(), c);
    }

    #[test]
    fn elevations_partition_vertices(g in folded(2, 9), w in cyclic(2, 8)) {
        let c = stallings_complete(&g).unwrap();
        let r = elevations(&c, &w).unwrap();
        prop_assert_eq!(r.elevations.iter().map(|e| e.n_g).sum::<usize>(), c.degree());
    }

    #[test]
    fn trivial_cover_has_one_elevation(w in cyclic(3, 10)) {
        let c = stallings_complete(&LabeledGraph::rose(3)).unwrap();
        prop_assert_eq!(elevations(&c, &w).unwrap().elevations.len(), 1);
    }
}
