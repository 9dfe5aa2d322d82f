use std::collections::BTreeSet;

use polyw::constructors::nonpolygonality_follower_obstruction;
use polyw::search::{decide_polygonal, enumerate_all, SearchBounds, SearchOutcome};
use polyw::{cyclic_reduce, parse_cyclic, CyclicWord, Letter, Word};

/// Cyclic words of rank 2 with length at most `max`, up to rotation.
fn all_cyclic(max: usize) -> Vec<CyclicWord> {
    let letters = [Letter::new(1, false), Letter::new(1, true), Letter::new(2, false), Letter::new(2, true)];
    let mut out = BTreeSet::new();
    let mut frontier = vec![Vec::<Letter>::new()];
    for _ in 0..max {
        let mut next = Vec::new();
        for w in &frontier {
            for &x in &letters {
                let mut v = w.clone();
                v.push(x);
                if let Ok(c) = cyclic_reduce(&Word::new(2, v.clone()).unwrap()) {
                    out.insert(c);
                }
                next.push(v);
            }
        }
        frontier = next;
    }
    out.into_iter().collect()
}

#[test]
fn found_certificates_pass_the_certifier() {
    for w in all_cyclic(5) {
        if w.is_proper_power() {
            continue;
        }
        let bounds = SearchBounds::new(2, 2 * w.len()).with_max_power(2);
        if let SearchOutcome::Found { certificate } = decide_polygonal(&w, &bounds) {
            assert!(certificate.verify() && certificate.is_polygonal(), "{w}");
        }
        for c in enumerate_all(&w, &SearchBounds::new(1, 2 * w.len()).with_max_power(2)) {
            assert!(c.verify() && c.is_polygonal(), "{w}");
        }
    }
}

#[test]
fn never_found_where_obstruction_fires() {
    let mut fired = 0;
    for w in all_cyclic(6) {
        if w.is_proper_power() || nonpolygonality_follower_obstruction(&w).is_none() {
            continue;
        }
        fired += 1;
        let out = decide_polygonal(&w, &SearchBounds::new(2, 2 * w.len()).with_max_power(2));
        assert!(!matches!(out, SearchOutcome::Found { .. }), "{w}");
    }
    assert!(fired > 0);
}

#[test]
fn finds_constructor_sized_surfaces() {
    // two disks of power one suffice for these
    for text in ["a^2 b^2", "a^2 b^-2", "a^2 b^3 a^-2 b^2", "a b a^-1 b^-1"] {
        let w = parse_cyclic(text, 2).unwrap();
        let out = decide_polygonal(&w, &SearchBounds::new(2, 2 * w.len()).with_max_power(1));
        assert!(matches!(out, SearchOutcome::Found { .. }), "{text}: {out:?}");
    }
}

#[test]
fn outcome_independent_of_jobs() {
    for text in ["a^2 b^2", "a b a b^2 a b^3", "a (a^2)^b", "a^2 b^-1 a^-1 b a b^-1 a b"] {
        let w = parse_cyclic(text, 2).unwrap();
        let base = SearchBounds::new(2, 3 * w.len()).with_max_power(2);
        let one = decide_polygonal(&w, &base.clone().with_jobs(1));
        let many = decide_polygonal(&w, &base.with_jobs(4));
        match (one, many) {
            (SearchOutcome::Found { certificate: a }, SearchOutcome::Found { certificate: b }) => {
                assert_eq!(a, b, "{text}")
            }
            (SearchOutcome::ExhaustedWithin { .. }, SearchOutcome::ExhaustedWithin { .. }) => {}
            (a, b) => panic!("{text}: {a:?} vs {b:?}"),
        }
    }
}
