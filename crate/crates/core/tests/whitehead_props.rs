use proptest::prelude::*;

use polyw::whitehead::{equivalent, is_diskbusting, minimal_orbit_with, minimize, WhiteheadMove};
use polyw::words::transform;
use polyw::{cyclic_reduce, CyclicWord, Executor, Letter, Relabeling, Word};

fn cyclic(rank: u32, max_len: usize) -> impl Strategy<Value = CyclicWord> {
    prop::collection::vec((1..=rank, any::<bool>()), 1..=max_len).prop_filter_map("trivial", move |v| {
        let letters = v.into_iter().map(|(g, inv)| Letter::new(g, inv)).collect();
        cyclic_reduce(&Word::new(rank, letters).unwrap()).ok()
    })
}

fn relabeling(rank: u32) -> impl Strategy<Value = Relabeling> {
    prop_oneof![
        Just((1..=rank).collect::<Vec<u32>>()).prop_shuffle().prop_map(Relabeling::Permute),
        prop::collection::btree_set(1..=rank, 1..=rank as usize)
            .prop_map(|s| Relabeling::InvertGenerators(s.into_iter().collect())),
        Just(Relabeling::Inverse),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn trace_replays_and_never_grows(w in cyclic(3, 12)) {
        let t = minimize(&w);
        prop_assert!(t.final_word.len() <= w.len());
        let mut cur = t.start.clone();
        let mut len = cur.len();
        for step in &t.steps {
            cur = step.mv.apply(&cur);
            prop_assert_eq!(&cur, &step.result);
            if matches!(step.mv, WhiteheadMove::SecondKind { .. }) {
                prop_assert!(cur.len() < len);
            }
            len = cur.len();
        }
        prop_assert_eq!(&cur, &t.final_word);
        prop_assert_eq!(t.replay(), t.final_word.clone());
        prop_assert_eq!(minimize(&t.final_word).final_word.len(), t.final_word.len());
    }

    #[test]
    fn equivalence_is_reflexive_and_symmetric(u in cyclic(2, 8), v in cyclic(2, 8)) {
        prop_assert!(equivalent(&u, &u).unwrap());
        prop_assert_eq!(equivalent(&u, &v).unwrap(), equivalent(&v, &u).unwrap());
    }

    #[test]
    fn equivalence_transitive_along_moves(w in cyclic(2, 8), i in 0usize..16, j in 0usize..16) {
        let moves = WhiteheadMove::all_second_kind(2);
        let u = moves[i % moves.len()].apply(&w);
        let v = moves[j % moves.len()].apply(&u);
        prop_assert!(equivalent(&w, &u).unwrap());
        prop_assert!(equivalent(&u, &v).unwrap());
        prop_assert!(equivalent(&w, &v).unwrap());
    }

    #[test]
    fn diskbusting_invariant_under_relabeling(w in cyclic(3, 10), t in relabeling(3)) {
        prop_assert_eq!(is_diskbusting(&w).unwrap(), is_diskbusting(&transform(&w, &t)).unwrap());
    }

    #[test]
    fn orbit_independent_of_workers(w in cyclic(2, 10)) {
        let seq = minimal_orbit_with(&w, 100_000, &Executor::sequential()).unwrap();
        let par = minimal_orbit_with(&w, 100_000, &Executor::with_jobs(3)).unwrap();
        prop_assert_eq!(seq, par);
    }
}
