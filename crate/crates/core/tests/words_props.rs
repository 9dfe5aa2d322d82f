use proptest::prelude::*;

use polyw::words::{primitive_root, syllable_decomposition};
use polyw::{cyclic_reduce, CyclicWord, Letter, Word};

fn word(rank: u32, max_len: usize) -> impl Strategy<Value = Word> {
    let gens = rank as i32;
    prop::collection::vec((1..=gens, any::<bool>()), 0..=max_len).prop_map(move |v| {
        let letters = v.into_iter().map(|(g, inv)| Letter::new(g as u32, inv)).collect();
        Word::new(rank, letters).unwrap()
    })
}

fn cyclic(rank: u32, max_len: usize) -> impl Strategy<Value = CyclicWord> {
    word(rank, max_len).prop_filter_map("trivial", |w| cyclic_reduce(&w).ok())
}

fn conjugate(w: &Word, by: &Word) -> Word {
    let letters = [by.inverse().letters(), w.letters(), by.letters()].concat();
    Word::new(w.rank(), letters).unwrap().reduced()
}

/// Every reduced word of length at most `n`.
fn all_words(rank: u32, n: usize) -> Vec<Word> {
    let letters: Vec<Letter> = (1..=rank).flat_map(|g| [Letter::new(g, false), Letter::new(g, true)]).collect();
    let mut out = vec![Word::new(rank, vec![]).unwrap()];
    let mut frontier = out.clone();
    for _ in 0..n {
        let mut next = Vec::new();
        for w in &frontier {
            for &x in &letters {
                if w.letters().last() == Some(&x.inverse()) {
                    continue;
                }
                next.push(Word::new(rank, [w.letters(), &[x]].concat()).unwrap());
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

proptest! {
    #[test]
    fn cyclic_reduce_is_idempotent_and_shortens(w in word(3, 14)) {
        if let Ok(c) = cyclic_reduce(&w) {
            prop_assert!(c.len() <= w.len());
            prop_assert_eq!(cyclic_reduce(&c.to_word()).unwrap(), c);
        }
    }

    #[test]
    fn conjugates_reduce_alike(w in word(2, 8), by in word(2, 5)) {
        prop_assert_eq!(cyclic_reduce(&w).ok(), cyclic_reduce(&conjugate(&w, &by)).ok());
    }

    #[test]
    fn syllables_expand_back(w in cyclic(3, 16)) {
        let s = syllable_decomposition(&w);
        prop_assert!(s.syllables.iter().all(|x| x.exponent != 0));
        let expanded = s.expand();
        let rotated = w.rotation(s.start);
        prop_assert_eq!(expanded, rotated);
    }

    #[test]
    fn root_rotation_fixes_word(w in cyclic(2, 6), k in 1usize..4) {
        let p = w.power(k);
        let (root, e) = primitive_root(&p);
        prop_assert!(e as usize >= k);
        prop_assert_eq!(p.rotation(root.len()), p.letters().to_vec());
        prop_assert_eq!(root.power(e as usize), p);
    }
}

/// Conjugacy by brute-force conjugator search agrees with equal cyclic
/// reductions. Conjugators of length 4 suffice for words of length 3.
#[test]
fn conjugacy_matches_brute_force() {
    let words: Vec<Word> = all_words(2, 3).into_iter().filter(|w| !w.is_empty()).collect();
    let conjugators = all_words(2, 4);
    for u in &words {
        for v in &words {
            let brute = conjugators.iter().any(|g| &conjugate(u, g) == v);
            assert_eq!(brute, cyclic_reduce(u).ok() == cyclic_reduce(v).ok(), "{u} vs {v}");
        }
    }
}
