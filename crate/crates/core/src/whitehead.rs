//! Whitehead automorphisms, peak reduction and the diskbusting test.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::par::Executor;
use crate::words::{cyclic_reduce, CyclicWord, Letter, Word};

pub const DEFAULT_ORBIT_CAP: usize = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WhiteheadError {
    #[error("inconclusive: minimal orbit exceeds {cap} words")]
    OrbitCap { cap: usize },
    #[error("rank mismatch: {0} vs {1}")]
    RankMismatch(u32, u32),
}

/// A Whitehead automorphism.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WhiteheadMove {
    /// `a_g ↦ a_{perm[g-1]}`, inverted when `g` is listed in `inverted`.
    FirstKind { perm: Vec<u32>, inverted: Vec<u32> },
    /// Multiplier `a` and a letter set `A` with `a ∈ A`, `a⁻¹ ∉ A`.
    SecondKind { multiplier: Letter, set: Vec<Letter> },
}

/// Letters in order `a, a⁻¹, b, b⁻¹, …`.
fn letter_of(index: usize) -> Letter {
    Letter::new(index as u32 / 2 + 1, index % 2 == 1)
}

impl WhiteheadMove {
    /// Second-kind move from its encoding: multiplier index in letter order
    /// and a bitmask over the remaining `2n - 2` letters.
    pub fn second_kind(rank: u32, multiplier: usize, mask: u64) -> WhiteheadMove {
        let a = letter_of(multiplier);
        let others: Vec<Letter> =
            (0..2 * rank as usize).map(letter_of).filter(|l| l.generator() != a.generator()).collect();
        let mut set = vec![a];
        set.extend(others.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, &l)| l));
        set.sort();
        WhiteheadMove::SecondKind { multiplier: a, set }
    }

    /// All `2n·4^{n-1}` second-kind moves, in encoding order.
    pub fn all_second_kind(rank: u32) -> Vec<WhiteheadMove> {
        let masks = 1u64 << (2 * (rank as u64 - 1));
        (0..2 * rank as usize).flat_map(|a| (0..masks).map(move |m| WhiteheadMove::second_kind(rank, a, m))).collect()
    }

    /// All `n!·2^n` first-kind moves.
    pub fn all_first_kind(rank: u32) -> Vec<WhiteheadMove> {
        let mut perms: Vec<Vec<u32>> = vec![Vec::new()];
        for _ in 0..rank {
            let mut next = Vec::new();
            for p in &perms {
                for g in (1..=rank).filter(|g| !p.contains(g)) {
                    let mut q = p.clone();
                    q.push(g);
                    next.push(q);
                }
            }
            perms = next;
        }
        perms
            .into_iter()
            .flat_map(|perm| {
                (0..1u32 << rank).map(move |m| WhiteheadMove::FirstKind {
                    perm: perm.clone(),
                    inverted: (1..=rank).filter(|g| m >> (g - 1) & 1 == 1).collect(),
                })
            })
            .collect()
    }

    /// Image of a single letter.
    pub fn image(&self, x: Letter) -> Vec<Letter> {
        match self {
            WhiteheadMove::FirstKind { perm, inverted } => {
                let g = x.generator();
                vec![Letter::new(perm[(g - 1) as usize], x.is_inverse() ^ inverted.contains(&g))]
            }
            WhiteheadMove::SecondKind { multiplier: a, set } => {
                if x.generator() == a.generator() {
                    return vec![x];
                }
                if x.is_inverse() {
                    return self.image(x.inverse()).iter().rev().map(|l| l.inverse()).collect();
                }
                let (has, has_inv) = (set.contains(&x), set.contains(&x.inverse()));
                match (has, has_inv) {
                    (true, false) => vec![x, *a],
                    (false, true) => vec![a.inverse(), x],
                    (true, true) => vec![a.inverse(), x, *a],
                    (false, false) => vec![x],
                }
            }
        }
    }

    pub fn apply(&self, w: &CyclicWord) -> CyclicWord {
        let letters: Vec<Letter> = w.letters().iter().flat_map(|&l| self.image(l)).collect();
        let word = Word::new(w.rank(), letters).expect("letters stay in rank");
        cyclic_reduce(&word).expect("automorphisms do not kill nontrivial words")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinimizationStep {
    #[serde(rename = "move")]
    pub mv: WhiteheadMove,
    pub result: CyclicWord,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinimizationTrace {
    pub start: CyclicWord,
    pub steps: Vec<MinimizationStep>,
    #[serde(rename = "final")]
    pub final_word: CyclicWord,
}

impl MinimizationTrace {
    /// Applies the recorded moves to the start word.
    pub fn replay(&self) -> CyclicWord {
        self.steps.iter().fold(self.start.clone(), |w, s| s.mv.apply(&w))
    }
}

/// Greedy peak reduction: repeatedly applies the second-kind move with the
/// largest length drop, ties going to the least encoding.
pub fn minimize(w: &CyclicWord) -> MinimizationTrace {
    let moves = WhiteheadMove::all_second_kind(w.rank());
    let mut cur = w.clone();
    let mut steps = Vec::new();
    loop {
        let mut best: Option<(usize, CyclicWord, &WhiteheadMove)> = None;
        for mv in &moves {
            let next = mv.apply(&cur);
            if next.len() < best.as_ref().map_or(cur.len(), |b| b.0) {
                best = Some((next.len(), next, mv));
            }
        }
        let Some((_, next, mv)) = best else { break };
        steps.push(MinimizationStep { mv: mv.clone(), result: next.clone() });
        cur = next;
    }
    MinimizationTrace { start: w.clone(), steps, final_word: cur }
}

/// All minimal words reachable from a minimal `w` through length-preserving
/// moves, closed under relabeling, each up to rotation and inversion.
pub fn minimal_orbit(w: &CyclicWord) -> Result<BTreeSet<CyclicWord>, WhiteheadError> {
    minimal_orbit_with(w, DEFAULT_ORBIT_CAP, &Executor::default())
}

pub fn minimal_orbit_with(w: &CyclicWord, cap: usize, exec: &Executor) -> Result<BTreeSet<CyclicWord>, WhiteheadError> {
    let rank = w.rank();
    let mut moves = WhiteheadMove::all_second_kind(rank);
    moves.extend(WhiteheadMove::all_first_kind(rank));
    let len = w.len();
    let start = w.unoriented();
    let mut seen = BTreeSet::from([start.clone()]);
    let mut frontier = vec![start];
    while !frontier.is_empty() {
        let found: Vec<Vec<CyclicWord>> = exec.map(&frontier, |u| {
            moves.iter().map(|mv| mv.apply(u)).filter(|v| v.len() == len).map(|v| v.unoriented()).collect()
        });
        let mut next = Vec::new();
        for v in found.into_iter().flatten() {
            if seen.insert(v.clone()) {
                if seen.len() > cap {
                    return Err(WhiteheadError::OrbitCap { cap });
                }
                next.push(v);
            }
        }
        frontier = next;
    }
    Ok(seen)
}

pub fn equivalent(w1: &CyclicWord, w2: &CyclicWord) -> Result<bool, WhiteheadError> {
    equivalent_with(w1, w2, DEFAULT_ORBIT_CAP, &Executor::default())
}

pub fn equivalent_with(w1: &CyclicWord, w2: &CyclicWord, cap: usize, exec: &Executor) -> Result<bool, WhiteheadError> {
    if w1.rank() != w2.rank() {
        return Err(WhiteheadError::RankMismatch(w1.rank(), w2.rank()));
    }
    let (m1, m2) = (minimize(w1).final_word, minimize(w2).final_word);
    if m1.len() != m2.len() {
        return Ok(false);
    }
    if m1.unoriented() == m2.unoriented() {
        return Ok(true);
    }
    Ok(minimal_orbit_with(&m1, cap, exec)?.contains(&m2.unoriented()))
}

/// False exactly when some minimal word equivalent to `w` misses a generator.
pub fn is_diskbusting(w: &CyclicWord) -> Result<bool, WhiteheadError> {
    is_diskbusting_with(w, DEFAULT_ORBIT_CAP, &Executor::default())
}

pub fn is_diskbusting_with(w: &CyclicWord, cap: usize, exec: &Executor) -> Result<bool, WhiteheadError> {
    let rank = w.rank() as usize;
    if rank < 2 {
        return Ok(false);
    }
    let m = minimize(w).final_word;
    if m.support().len() < rank {
        return Ok(false);
    }
    Ok(minimal_orbit_with(&m, cap, exec)?.iter().all(|v| v.support().len() == rank))
}
