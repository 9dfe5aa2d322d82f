use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::words::{transform, CyclicWord, Relabeling};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NeighborSide {
    Follower,
    Predecessor,
}

/// A generator all of whose occurrences share one follower (or one
/// predecessor) in the positive form of a rank-2 word.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FollowerEvidence {
    pub generator: u32,
    pub side: NeighborSide,
    pub neighbor: u32,
    /// Generators inverted to make the word positive.
    pub inverted: Vec<u32>,
}

/// Evidence that no closed `w`-polygonal surface has `χ < m`, or `None` when
/// the argument does not apply.
pub fn nonpolygonality_follower_obstruction(w: &CyclicWord) -> Option<FollowerEvidence> {
    if w.rank() != 2 || w.support().len() != 2 || w.is_proper_power() {
        return None;
    }
    let mut inverted = Vec::new();
    for g in 1..=2 {
        let signs: BTreeSet<bool> = w.letters().iter().filter(|l| l.generator() == g).map(|l| l.is_inverse()).collect();
        match signs.len() {
            1 if signs.contains(&true) => inverted.push(g),
            1 => {}
            _ => return None,
        }
    }
    let positive = transform(w, &Relabeling::InvertGenerators(inverted.clone()));
    let n = positive.len();
    for g in 1..=2u32 {
        for side in [NeighborSide::Follower, NeighborSide::Predecessor] {
            let neighbors: BTreeSet<u32> = (0..n)
                .filter(|&i| positive.letter_at(i).generator() == g)
                .map(|i| match side {
                    NeighborSide::Follower => positive.letter_at(i + 1).generator(),
                    NeighborSide::Predecessor => positive.letter_at(i + n - 1).generator(),
                })
                .collect();
            if neighbors.len() == 1 {
                let neighbor = *neighbors.first().unwrap();
                return Some(FollowerEvidence { generator: g, side, neighbor, inverted });
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::parse_cyclic;

    fn cw(text: &str) -> CyclicWord {
        parse_cyclic(text, 2).unwrap()
    }

    #[test]
    fn examples() {
        let e = nonpolygonality_follower_obstruction(&cw("a b a b^2 a b^3")).unwrap();
        assert_eq!((e.generator, e.side, e.neighbor), (1, NeighborSide::Follower, 2));
        assert_eq!(nonpolygonality_follower_obstruction(&cw("a^2 b^2")), None);
        assert!(nonpolygonality_follower_obstruction(&cw("a b")).is_some());
        let e = nonpolygonality_follower_obstruction(&cw("a^-1 b a^-1 b^2")).unwrap();
        assert_eq!(e.inverted, vec![1]);
        assert_eq!(nonpolygonality_follower_obstruction(&cw("a b a^-1 b^2")), None);
        assert_eq!(nonpolygonality_follower_obstruction(&cw("(a b)^2")), None);
    }
}
