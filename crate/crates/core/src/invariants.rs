//! The ρ invariant with `T_n` membership, and the boundary invariant λ with
//! membership in the monoid `U`.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::{Slot, SurfaceComplex};
use crate::words::{syllable_decomposition, CyclicWord};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InvariantError {
    #[error("membership search over {size} terms exceeds the cap of {cap}")]
    TooLarge { size: usize, cap: usize },
    #[error("boundary component {0} has no b-incident vertex")]
    NoBIncidence(usize),
    #[error("boundary component {0} mixes incoming and outgoing b-edges")]
    MixedBIncidence(usize),
    #[error("boundary component {0} is not a coherently oriented a-cycle")]
    IncoherentBoundary(usize),
}

pub const DEFAULT_TN_CAP: usize = 256;
pub const DEFAULT_U_CAP: usize = 1 << 20;

/// Canonical representative of `{(i,j), (-j,-i)}`.
pub fn canonical_pair(i: i32, j: i32) -> (i32, i32) {
    (i, j).min((-j, -i))
}

/// An element of `A_n`: a multiset of canonical pairs.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RhoElement {
    pub rank: u32,
    pairs: Vec<(i32, i32)>,
}

impl RhoElement {
    pub fn new(rank: u32, pairs: impl IntoIterator<Item = (i32, i32)>) -> RhoElement {
        let mut pairs: Vec<_> = pairs.into_iter().map(|(i, j)| canonical_pair(i, j)).collect();
        pairs.sort_unstable();
        RhoElement { rank, pairs }
    }

    pub fn pairs(&self) -> &[(i32, i32)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

impl fmt::Display for RhoElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.pairs.is_empty() {
            return f.write_str("0");
        }
        for (k, (i, j)) in self.pairs.iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({i},{j})")?;
        }
        Ok(())
    }
}

/// `ρ_i` for each cyclically consecutive syllable pair, in syllable order and
/// not canonicalized.
pub fn rho_terms(w: &CyclicWord) -> Vec<(i32, i32)> {
    let syl = syllable_decomposition(w).syllables;
    let l = syl.len();
    if l < 2 {
        return Vec::new();
    }
    let signed = |k: usize| syl[k].generator as i32 * syl[k].exponent.signum();
    (0..l).map(|i| (signed(i), signed((i + 1) % l))).collect()
}

pub fn rho(w: &CyclicWord) -> RhoElement {
    RhoElement::new(w.rank(), rho_terms(w))
}

/// One generator cycle `(c_1,c_2)+(c_2,c_3)+⋯+(c_r,c_1)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TnCycle {
    pub generators: Vec<i32>,
    /// Whether the `t`-th pair `(c_t, c_{t+1})` is the flipped form
    /// `(-j,-i)` of its canonical representative `(i,j)`.
    pub flipped: Vec<bool>,
}

impl TnCycle {
    /// The ordered pairs `(c_t, c_{t+1})`.
    pub fn pairs(&self) -> Vec<(i32, i32)> {
        let r = self.generators.len();
        (0..r).map(|t| (self.generators[t], self.generators[(t + 1) % r])).collect()
    }

    pub fn has_distinct_abs(&self) -> bool {
        let abs: BTreeSet<u32> = self.generators.iter().map(|c| c.unsigned_abs()).collect();
        abs.len() == self.generators.len() && self.generators.len() >= 2
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TnCertificate {
    pub cycles: Vec<TnCycle>,
}

impl TnCertificate {
    /// Re-sums the cycles and compares with `r`.
    pub fn verify(&self, r: &RhoElement) -> bool {
        let flips_ok = self.cycles.iter().all(|c| {
            c.flipped.len() == c.generators.len()
                && c.pairs().iter().zip(&c.flipped).all(|(&(i, j), &f)| f == ((i, j) != canonical_pair(i, j)))
        });
        let all_distinct = self.cycles.iter().all(TnCycle::has_distinct_abs);
        let summed = RhoElement::new(r.rank, self.cycles.iter().flat_map(TnCycle::pairs));
        flips_ok && all_distinct && summed.pairs == r.pairs
    }
}

struct TnSearch {
    types: Vec<(i32, i32)>,
    counts: Vec<u16>,
    failed: HashSet<Vec<u16>>,
    cycles: Vec<Vec<i32>>,
}

impl TnSearch {
    fn oriented(&self, t: usize, flip: bool) -> (i32, i32) {
        let (i, j) = self.types[t];
        if flip {
            (-j, -i)
        } else {
            (i, j)
        }
    }

    fn solve(&mut self) -> bool {
        let Some(t0) = self.counts.iter().position(|&c| c > 0) else {
            return true;
        };
        if self.failed.contains(&self.counts) {
            return false;
        }
        let key = self.counts.clone();
        self.counts[t0] -= 1;
        for flip in [false, true] {
            let (x, y) = self.oriented(t0, flip);
            let mut path = vec![x, y];
            if self.extend(&mut path) {
                return true;
            }
        }
        self.counts[t0] += 1;
        self.failed.insert(key);
        false
    }

    fn extend(&mut self, path: &mut Vec<i32>) -> bool {
        let (start, last) = (path[0], *path.last().unwrap());
        for t in 0..self.types.len() {
            if self.counts[t] == 0 {
                continue;
            }
            for flip in [false, true] {
                let (u, z) = self.oriented(t, flip);
                if u != last {
                    continue;
                }
                if z == start {
                    self.counts[t] -= 1;
                    self.cycles.push(path.clone());
                    if self.solve() {
                        return true;
                    }
                    self.cycles.pop();
                    self.counts[t] += 1;
                } else if path.iter().all(|c| c.unsigned_abs() != z.unsigned_abs()) {
                    self.counts[t] -= 1;
                    path.push(z);
                    if self.extend(path) {
                        return true;
                    }
                    path.pop();
                    self.counts[t] += 1;
                }
            }
        }
        false
    }
}

/// Decomposes `r` into generator cycles with pairwise distinct `|c_j|`.
pub fn tn_membership(r: &RhoElement) -> Result<Option<TnCertificate>, InvariantError> {
    tn_membership_with_cap(r, DEFAULT_TN_CAP)
}

pub fn tn_membership_with_cap(r: &RhoElement, cap: usize) -> Result<Option<TnCertificate>, InvariantError> {
    if r.len() > cap {
        return Err(InvariantError::TooLarge { size: r.len(), cap });
    }
    let mut grouped: BTreeMap<(i32, i32), u16> = BTreeMap::new();
    for &p in &r.pairs {
        *grouped.entry(p).or_default() += 1;
    }
    let mut search = TnSearch {
        types: grouped.keys().copied().collect(),
        counts: grouped.values().copied().collect(),
        failed: HashSet::new(),
        cycles: Vec::new(),
    };
    if r.is_empty() || !search.solve() {
        return Ok(None);
    }
    let cycles = search
        .cycles
        .into_iter()
        .map(|generators| {
            let cyc = TnCycle { flipped: Vec::new(), generators };
            let flipped = cyc.pairs().iter().map(|&(i, j)| (i, j) != canonical_pair(i, j)).collect();
            TnCycle { flipped, ..cyc }
        })
        .collect();
    Ok(Some(TnCertificate { cycles }))
}

/// `λ^±_{(c_1,…,c_r)}` with the composition stored as its least rotation.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LambdaTerm {
    pub positive: bool,
    pub composition: Vec<u32>,
}

fn least_rotation_u32(c: &[u32]) -> Vec<u32> {
    (0..c.len().max(1)).map(|s| c[s..].iter().chain(&c[..s]).copied().collect::<Vec<_>>()).min().unwrap_or_default()
}

impl LambdaTerm {
    /// # Panics
    /// If the composition is empty or has a zero entry.
    pub fn new(positive: bool, composition: &[u32]) -> LambdaTerm {
        assert!(!composition.is_empty() && composition.iter().all(|&c| c > 0), "invalid composition");
        LambdaTerm { positive, composition: least_rotation_u32(composition) }
    }

    pub fn plus(composition: &[u32]) -> LambdaTerm {
        LambdaTerm::new(true, composition)
    }

    pub fn minus(composition: &[u32]) -> LambdaTerm {
        LambdaTerm::new(false, composition)
    }

    pub fn sum(&self) -> u64 {
        self.composition.iter().map(|&c| c as u64).sum()
    }

    pub fn sign_swapped(&self) -> LambdaTerm {
        LambdaTerm { positive: !self.positive, composition: self.composition.clone() }
    }
}

impl fmt::Display for LambdaTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.composition.iter().map(u32::to_string).collect();
        write!(f, "λ{}({})", if self.positive { '+' } else { '-' }, parts.join(","))
    }
}

/// An element of the free abelian monoid `B`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LambdaMultiset {
    terms: Vec<LambdaTerm>,
}

impl LambdaMultiset {
    pub fn new(terms: impl IntoIterator<Item = LambdaTerm>) -> LambdaMultiset {
        let mut terms: Vec<_> = terms.into_iter().collect();
        terms.sort();
        LambdaMultiset { terms }
    }

    pub fn terms(&self) -> &[LambdaTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, t: LambdaTerm, times: usize) {
        let at = self.terms.partition_point(|x| x < &t);
        self.terms.splice(at..at, std::iter::repeat_n(t, times));
    }

    pub fn sum(&self, other: &LambdaMultiset) -> LambdaMultiset {
        LambdaMultiset::new(self.terms.iter().chain(&other.terms).cloned())
    }

    pub fn scaled(&self, k: usize) -> LambdaMultiset {
        LambdaMultiset::new((0..k).flat_map(|_| self.terms.iter().cloned()))
    }

    pub fn sign_swapped(&self) -> LambdaMultiset {
        LambdaMultiset::new(self.terms.iter().map(LambdaTerm::sign_swapped))
    }

    /// Distinct terms with multiplicities, in order.
    pub fn counts(&self) -> Vec<(LambdaTerm, usize)> {
        let mut out: Vec<(LambdaTerm, usize)> = Vec::new();
        for t in &self.terms {
            match out.last_mut() {
                Some((last, n)) if last == t => *n += 1,
                _ => out.push((t.clone(), 1)),
            }
        }
        out
    }
}

impl fmt::Display for LambdaMultiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (t, n)) in self.counts().iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            if *n > 1 {
                write!(f, "{n}")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

fn partial_sums(c: &[u32], shift: u64, m: u64) -> BTreeSet<u64> {
    let mut acc = shift;
    c.iter()
        .map(|&x| {
            acc += x as u64;
            acc % m
        })
        .collect()
}

/// Least `c` in `0..m` with `{c + partial sums of a}` and `{partial sums of b}`
/// disjoint modulo `m`.
pub fn same_sign_offset(a: &[u32], b: &[u32]) -> Option<u64> {
    let m: u64 = a.iter().map(|&x| x as u64).sum();
    if m == 0 || m != b.iter().map(|&x| x as u64).sum::<u64>() {
        return None;
    }
    let pb = partial_sums(b, 0, m);
    (0..m).find(|&c| partial_sums(a, c, m).is_disjoint(&pb))
}

/// Checks the modular disjointness condition for a given offset.
pub fn offset_is_disjoint(a: &[u32], b: &[u32], c: u64) -> bool {
    let m: u64 = a.iter().map(|&x| x as u64).sum();
    m > 0
        && m == b.iter().map(|&x| x as u64).sum::<u64>()
        && partial_sums(a, c % m, m).is_disjoint(&partial_sums(b, 0, m))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UPairKind {
    Opposite,
    SameSign { offset: u64 },
}

/// One generator of `U`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UPair {
    pub first: LambdaTerm,
    pub second: LambdaTerm,
    pub kind: UPairKind,
}

impl UPair {
    pub fn is_valid(&self) -> bool {
        if self.first.sum() != self.second.sum() {
            return false;
        }
        match self.kind {
            UPairKind::Opposite => self.first.positive != self.second.positive,
            UPairKind::SameSign { offset } => {
                self.first.positive == self.second.positive
                    && offset_is_disjoint(&self.first.composition, &self.second.composition, offset)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UCertificate {
    pub pairs: Vec<UPair>,
}

impl UCertificate {
    /// Checks every pair independently and that the pairs use exactly `l`.
    pub fn verify(&self, l: &LambdaMultiset) -> bool {
        let used = LambdaMultiset::new(self.pairs.iter().flat_map(|p| [p.first.clone(), p.second.clone()]));
        self.pairs.iter().all(UPair::is_valid) && used == *l
    }
}

fn pair_kind(a: &LambdaTerm, b: &LambdaTerm) -> Option<UPairKind> {
    if a.sum() != b.sum() {
        return None;
    }
    if a.positive != b.positive {
        return Some(UPairKind::Opposite);
    }
    same_sign_offset(&a.composition, &b.composition).map(|offset| UPairKind::SameSign { offset })
}

/// Decomposes `l` into generators of `U`.
pub fn u_membership(l: &LambdaMultiset) -> Result<Option<UCertificate>, InvariantError> {
    u_membership_with_cap(l, DEFAULT_U_CAP)
}

pub fn u_membership_with_cap(l: &LambdaMultiset, cap: usize) -> Result<Option<UCertificate>, InvariantError> {
    if l.len() > cap {
        return Err(InvariantError::TooLarge { size: l.len(), cap });
    }
    if l.len() % 2 == 1 {
        return Ok(None);
    }
    let grouped = l.counts();
    let types: Vec<&LambdaTerm> = grouped.iter().map(|(t, _)| t).collect();
    let mut counts: Vec<usize> = grouped.iter().map(|(_, n)| *n).collect();
    // partners[t]: compatible types u >= t, in order
    let partners: Vec<Vec<(usize, UPairKind)>> = (0..types.len())
        .map(|t| (t..types.len()).filter_map(|u| pair_kind(types[t], types[u]).map(|k| (u, k))).collect())
        .collect();

    struct Frame {
        t: usize,
        next: usize,
        chosen: usize,
    }
    let mut failed: HashSet<Vec<usize>> = HashSet::new();
    let mut stack: Vec<Frame> = Vec::new();
    let mut remaining = l.len();
    // true when a new frame should be opened at the current state
    let mut descend = true;
    loop {
        if descend {
            if remaining == 0 {
                break;
            }
            let t = counts.iter().position(|&c| c > 0).expect("remaining > 0");
            counts[t] -= 1;
            remaining -= 1;
            stack.push(Frame { t, next: 0, chosen: usize::MAX });
            descend = false;
        }
        let Some(frame) = stack.last_mut() else {
            return Ok(None);
        };
        let t = frame.t;
        let mut advanced = false;
        while frame.next < partners[t].len() {
            let (u, _) = partners[t][frame.next];
            frame.next += 1;
            if counts[u] == 0 {
                continue;
            }
            counts[u] -= 1;
            if failed.contains(&counts) {
                counts[u] += 1;
                continue;
            }
            remaining -= 1;
            frame.chosen = frame.next - 1;
            advanced = true;
            break;
        }
        if advanced {
            descend = true;
            continue;
        }
        // exhausted: restore the state this frame started from
        counts[t] += 1;
        remaining += 1;
        failed.insert(counts.clone());
        stack.pop();
        match stack.last() {
            Some(parent) => {
                let (u, _) = partners[parent.t][parent.chosen];
                counts[u] += 1;
                remaining += 1;
            }
            None => return Ok(None),
        }
    }
    let pairs = stack
        .iter()
        .map(|f| {
            let (u, kind) = &partners[f.t][f.chosen];
            UPair { first: types[f.t].clone(), second: types[*u].clone(), kind: kind.clone() }
        })
        .collect();
    Ok(Some(UCertificate { pairs }))
}

/// Offset witness for `2λ^±_{(c_1,…,c_r)} ∈ U` from the two sufficient
/// conditions on the composition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShortcutWitness {
    /// The composition, rotated so the witness applies as stated.
    pub rotation: Vec<u32>,
    pub offset: u64,
}

impl ShortcutWitness {
    pub fn is_valid(&self) -> bool {
        offset_is_disjoint(&self.rotation, &self.rotation, self.offset)
    }
}

pub fn submonoid_shortcut(term: &LambdaTerm) -> Option<ShortcutWitness> {
    let c = &term.composition;
    let m = term.sum();
    if c.iter().all(|&x| x > 1) {
        return Some(ShortcutWitness { rotation: c.clone(), offset: 1 });
    }
    let i0 = c.iter().position(|&x| 2 * x as u64 >= 2 + m)?;
    let rotation: Vec<u32> = c[i0..].iter().chain(&c[..i0]).copied().collect();
    let offset = m + 1 - rotation[0] as u64;
    Some(ShortcutWitness { rotation, offset })
}

/// A boundary component of a complex whose boundary consists of
/// coherently oriented edges of one generator, with its λ term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LambdaBoundary {
    pub component: usize,
    /// Boundary slots in edge-orientation order, starting at a b-incident
    /// vertex: slot `i` runs from `vertices[i]` to `vertices[i+1]`.
    pub slots: Vec<Slot>,
    pub vertices: Vec<usize>,
    /// Positions `i` where `vertices[i]` meets a b-edge.
    pub b_positions: Vec<usize>,
    pub term: LambdaTerm,
}

/// λ of each boundary component, for a complex whose b-edges are all paired.
pub fn boundary_lambda(s: &SurfaceComplex, b: u32) -> Result<Vec<LambdaBoundary>, InvariantError> {
    let mut b_out = vec![0u32; s.num_vertices()];
    let mut b_in = vec![0u32; s.num_vertices()];
    for e in s.edges().iter().filter(|e| e.generator == b) {
        b_out[e.tail] += 1;
        b_in[e.head] += 1;
    }
    let mut out = Vec::new();
    for (k, comp) in s.boundary().iter().enumerate() {
        let forward = comp.steps[0].forward;
        if comp.steps.iter().any(|st| st.forward != forward || s.reading(st.slot).generator() == b) {
            return Err(InvariantError::IncoherentBoundary(k));
        }
        // edge-oriented order of slots and their tails
        let mut slots: Vec<Slot> = comp.steps.iter().map(|st| st.slot).collect();
        if !forward {
            slots.reverse();
        }
        let tails: Vec<usize> = slots.iter().map(|&sl| s.edges()[s.edge_of(sl)].tail).collect();
        let Some(first) = tails.iter().position(|&v| b_out[v] + b_in[v] > 0) else {
            return Err(InvariantError::NoBIncidence(k));
        };
        slots.rotate_left(first);
        let mut vertices = tails;
        vertices.rotate_left(first);
        let b_positions: Vec<usize> =
            (0..vertices.len()).filter(|&i| b_out[vertices[i]] + b_in[vertices[i]] > 0).collect();
        let outgoing = b_positions.iter().all(|&i| b_out[vertices[i]] > 0 && b_in[vertices[i]] == 0);
        let incoming = b_positions.iter().all(|&i| b_in[vertices[i]] > 0 && b_out[vertices[i]] == 0);
        if !outgoing && !incoming {
            return Err(InvariantError::MixedBIncidence(k));
        }
        let m = vertices.len();
        let composition: Vec<u32> = (0..b_positions.len())
            .map(|t| {
                let next = b_positions.get(t + 1).copied().unwrap_or(m + b_positions[0]);
                (next - b_positions[t]) as u32
            })
            .collect();
        out.push(LambdaBoundary {
            component: k,
            slots,
            vertices,
            b_positions,
            term: LambdaTerm::new(outgoing, &composition),
        });
    }
    Ok(out)
}

pub fn lambda_of(s: &SurfaceComplex, b: u32) -> Result<LambdaMultiset, InvariantError> {
    Ok(LambdaMultiset::new(boundary_lambda(s, b)?.into_iter().map(|lb| lb.term)))
}

/// True when every syllable has exponent of absolute value at least 2.
pub fn has_no_isolated_generators(w: &CyclicWord) -> bool {
    syllable_decomposition(w).syllables.iter().all(|s| s.exponent.abs() > 1)
}

/// `w = ∏ a^{p_i} b^{q_i}` with every `|q_i| = 1` and every `|p_i| > 1`,
/// read from the first `a`-syllable of the decomposition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsolatedForm {
    pub a: u32,
    pub b: u32,
    pub p: Vec<i32>,
    pub q: Vec<i32>,
    /// Position in the canonical word where `a^{p_1}` begins.
    pub offset: usize,
}

impl IsolatedForm {
    /// `Σ (sign(p_i q_i) + sign(p_{i+1} q_i))`.
    pub fn sign_sum(&self) -> i64 {
        let l = self.p.len();
        (0..l)
            .map(|i| {
                (self.p[i].signum() * self.q[i].signum() + self.p[(i + 1) % l].signum() * self.q[i].signum()) as i64
            })
            .sum()
    }
}

pub fn isolated_form(w: &CyclicWord) -> Option<IsolatedForm> {
    if w.rank() != 2 || w.support().len() != 2 {
        return None;
    }
    let syl = syllable_decomposition(w);
    let s = &syl.syllables;
    if s.len() % 2 == 1 {
        return None;
    }
    for b in [2u32, 1] {
        let a = 3 - b;
        let first = if s[0].generator == a { 0 } else { 1 };
        let ok = (0..s.len()).all(|k| {
            let e = s[(first + k) % s.len()].exponent;
            if k % 2 == 0 {
                e.abs() > 1
            } else {
                e.abs() == 1
            }
        });
        if !ok {
            continue;
        }
        let offset = syl.start + s[..first].iter().map(|x| x.exponent.unsigned_abs() as usize).sum::<usize>();
        let rot: Vec<i32> = (0..s.len()).map(|k| s[(first + k) % s.len()].exponent).collect();
        return Some(IsolatedForm {
            a,
            b,
            p: rot.iter().step_by(2).copied().collect(),
            q: rot.iter().skip(1).step_by(2).copied().collect(),
            offset: offset % w.len(),
        });
    }
    None
}

/// `None` when `w` is not of the isolated-`b` form.
pub fn isolated_b_sign_condition(w: &CyclicWord) -> Option<bool> {
    isolated_form(w).map(|f| f.sign_sum() == 0)
}

/// `w = ∏ a^{p_i} b^{-1} a^{q_i} b` with the `p_i` of one sign and the `q_i`
/// of one sign.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeightOne {
    pub a: u32,
    pub b: u32,
    pub p_blocks: Vec<i32>,
    pub q_blocks: Vec<i32>,
    /// Position in the canonical word where `a^{p_1}` begins.
    pub offset: usize,
    /// `Σ|p_i|`.
    pub p: u64,
    /// `Σ|q_i|`.
    pub q: u64,
    /// `#{i : |p_i| = 1}`.
    pub p_prime: u64,
    /// `#{i : |q_i| = 1}`.
    pub q_prime: u64,
    pub l: usize,
}

impl HeightOne {
    pub fn condition(&self) -> bool {
        self.p * self.p_prime <= self.q * self.q && self.q * self.q_prime <= self.p * self.p
    }
}

pub fn is_simple_height_one(w: &CyclicWord) -> Option<HeightOne> {
    simple_height_one_with(w, 2).or_else(|| simple_height_one_with(w, 1))
}

/// Like [`is_simple_height_one`] with generator `b` in the conjugating role.
pub fn simple_height_one_with(w: &CyclicWord, b: u32) -> Option<HeightOne> {
    if w.rank() != 2 || w.support().len() != 2 || !(1..=2).contains(&b) {
        return None;
    }
    let syl = syllable_decomposition(w);
    let s = &syl.syllables;
    let n = s.len();
    if !n.is_multiple_of(4) {
        return None;
    }
    let a = 3 - b;
    // the p-block is the a-syllable just before a b^{-1}
    let first =
        (0..n).find(|&k| s[k].generator == a && s[(k + 1) % n].generator == b && s[(k + 1) % n].exponent == -1)?;
    let rot: Vec<_> = (0..n).map(|k| s[(first + k) % n]).collect();
    let shape_ok = rot.iter().enumerate().all(|(k, x)| match k % 4 {
        0 | 2 => x.generator == a,
        1 => x.generator == b && x.exponent == -1,
        _ => x.generator == b && x.exponent == 1,
    });
    if !shape_ok {
        return None;
    }
    let p_blocks: Vec<i32> = rot.iter().step_by(4).map(|x| x.exponent).collect();
    let q_blocks: Vec<i32> = rot.iter().skip(2).step_by(4).map(|x| x.exponent).collect();
    let one_sign = |v: &[i32]| v.iter().all(|&x| x > 0) || v.iter().all(|&x| x < 0);
    if !one_sign(&p_blocks) || !one_sign(&q_blocks) {
        return None;
    }
    let offset = syl.start + s[..first].iter().map(|x| x.exponent.unsigned_abs() as usize).sum::<usize>();
    let abs_sum = |v: &[i32]| v.iter().map(|&x| x.unsigned_abs() as u64).sum();
    let ones = |v: &[i32]| v.iter().filter(|&&x| x.abs() == 1).count() as u64;
    Some(HeightOne {
        a,
        b,
        p: abs_sum(&p_blocks),
        q: abs_sum(&q_blocks),
        p_prime: ones(&p_blocks),
        q_prime: ones(&q_blocks),
        l: p_blocks.len(),
        p_blocks,
        q_blocks,
        offset: offset % w.len(),
    })
}

/// `None` when `w` is not a simple height-one word.
pub fn height_one_condition(w: &CyclicWord) -> Option<bool> {
    is_simple_height_one(w).map(|h| h.condition())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::{parse_cyclic, Letter};

    fn cw(text: &str, rank: u32) -> CyclicWord {
        parse_cyclic(text, rank).unwrap()
    }

    #[test]
    fn rho_examples() {
        let w = cw("a^6 b^-3 c^5 b^4 c^-7", 3);
        assert_eq!(rho(&w), RhoElement::new(3, [(1, -2), (-2, 3), (3, 2), (2, -3), (-3, 1)]));
        let w = cw("a^2 b^2 c^3 b^-3", 3);
        assert_eq!(rho(&w), RhoElement::new(3, [(1, 2), (2, 3), (3, -2), (-2, 1)]));
        assert_eq!(rho(&cw("a^2 b^-3", 2)), RhoElement::new(2, [(1, -2), (-2, 1)]));
        assert!(rho(&cw("a^5", 2)).is_empty());
    }

    #[test]
    fn canonical_pairs() {
        assert_eq!(canonical_pair(3, 2), (-2, -3));
        assert_eq!(canonical_pair(1, -2), (1, -2));
        assert_eq!(canonical_pair(2, -1), (1, -2));
    }

    #[test]
    fn tn_examples() {
        let r = rho(&cw("a^6 b^-3 c^5 b^4 c^-7", 3));
        let cert = tn_membership(&r).unwrap().unwrap();
        assert!(cert.verify(&r));
        assert_eq!(tn_membership(&rho(&cw("a^2 b^2 c^3 b^-3", 3))).unwrap(), None);
        let r = rho(&cw("a^2 b^-3", 2));
        let cert = tn_membership(&r).unwrap().unwrap();
        assert_eq!(cert.cycles.len(), 1);
        assert!(cert.verify(&r));
    }

    #[test]
    fn tn_cap() {
        let r = RhoElement::new(2, std::iter::repeat_n((1, 2), 10));
        assert!(matches!(tn_membership_with_cap(&r, 4), Err(InvariantError::TooLarge { .. })));
    }

    #[test]
    fn u_examples() {
        let l = LambdaMultiset::new([LambdaTerm::minus(&[2]), LambdaTerm::minus(&[2]), LambdaTerm::plus(&[1, 1])]);
        let doubled = l.scaled(2);
        let cert = u_membership(&doubled).unwrap().unwrap();
        assert!(cert.verify(&doubled));

        let mut l = LambdaMultiset::default();
        l.add_term(LambdaTerm::minus(&[1, 1]), 4);
        l.add_term(LambdaTerm::plus(&[2, 2]), 4);
        l.add_term(LambdaTerm::minus(&[1, 1, 1, 1]), 4);
        l.add_term(LambdaTerm::plus(&[2]), 16);
        let cert = u_membership(&l).unwrap().unwrap();
        assert!(cert.verify(&l));

        assert_eq!(u_membership(&LambdaMultiset::new([LambdaTerm::plus(&[1])])).unwrap(), None);
        // same sign, sum 2, (1,1) with itself has no offset
        let l = LambdaMultiset::new([LambdaTerm::plus(&[1, 1]), LambdaTerm::plus(&[1, 1])]);
        assert_eq!(u_membership(&l).unwrap(), None);
    }

    #[test]
    fn u_backtracks() {
        // greedy pairing λ+(2) with λ-(2) strands λ+(1,1)... a valid matching
        // pairs λ+(1,1) with λ-(2) and λ+(2) with λ+(2).
        let l = LambdaMultiset::new([
            LambdaTerm::plus(&[1, 1]),
            LambdaTerm::minus(&[2]),
            LambdaTerm::plus(&[2]),
            LambdaTerm::plus(&[2]),
        ]);
        let cert = u_membership(&l).unwrap().unwrap();
        assert!(cert.verify(&l));
    }

    #[test]
    fn shortcut_examples() {
        let w = submonoid_shortcut(&LambdaTerm::plus(&[2, 3])).unwrap();
        assert_eq!(w.offset, 1);
        assert!(w.is_valid());
        let w = submonoid_shortcut(&LambdaTerm::minus(&[4, 1, 1])).unwrap();
        assert_eq!(w.rotation[0], 4);
        assert_eq!(w.offset, 6 + 1 - 4);
        assert!(w.is_valid());
        assert_eq!(submonoid_shortcut(&LambdaTerm::plus(&[1, 1])), None);
    }

    #[test]
    fn predicates() {
        assert!(has_no_isolated_generators(&cw("a^2 b^3", 2)));
        assert!(!has_no_isolated_generators(&cw("a b^3", 2)));
        assert_eq!(isolated_b_sign_condition(&cw("a^2 b a^2 b^-1", 2)), Some(true));
        assert_eq!(isolated_b_sign_condition(&cw("a^2 b a^3 b", 2)), Some(false));
        assert_eq!(isolated_form(&cw("a^2 b a^3 b", 2)).unwrap().sign_sum(), 4);
        assert_eq!(isolated_b_sign_condition(&cw("a^2 b^2", 2)), None);

        let h = is_simple_height_one(&cw("a (a^2)^b", 2)).unwrap();
        assert_eq!((h.p, h.q, h.p_prime, h.q_prime, h.l), (1, 2, 1, 0, 1));
        assert!(h.condition());
        let h = is_simple_height_one(&cw("a^3 (a^2)^b a (a^5)^b", 2)).unwrap();
        assert_eq!(h.p_blocks, vec![3, 1]);
        assert_eq!(h.q_blocks, vec![2, 5]);
        let rot = cw("a^3 (a^2)^b a (a^5)^b", 2).rotation(h.offset);
        assert_eq!(
            rot[..4],
            [Letter::new(1, false), Letter::new(1, false), Letter::new(1, false), Letter::new(2, true)]
        );
        assert!(is_simple_height_one(&cw("a^2 b^2", 2)).is_none());
        assert!(is_simple_height_one(&cw("a (a^-2)^b", 2)).is_some());
        assert!(is_simple_height_one(&cw("a (a^-2)^b a^-1 (a^2)^b", 2)).is_none());
    }
}
