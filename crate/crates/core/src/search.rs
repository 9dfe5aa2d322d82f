//! Bounded backtracking search for polygonal surfaces.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::complex::{certify, reading, DiskSpec, PolygonalityCertificate, SidePairing, Slot};
use crate::par::Executor;
use crate::words::CyclicWord;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBounds {
    pub max_disks: usize,
    /// Bound on the total number of boundary edges, `Σ |k_i| · |w|`.
    pub max_edges: usize,
    /// Largest `|k_i|`; `None` leaves it to `max_edges`.
    pub max_power: Option<u32>,
    pub allow_negative_powers: bool,
    pub time_budget: Option<Duration>,
    /// Worker threads: 0 for the global pool, 1 for sequential.
    pub jobs: usize,
}

impl SearchBounds {
    pub fn new(max_disks: usize, max_edges: usize) -> SearchBounds {
        SearchBounds { max_disks, max_edges, max_power: None, allow_negative_powers: false, time_budget: None, jobs: 0 }
    }

    pub fn with_max_power(mut self, p: u32) -> Self {
        self.max_power = Some(p);
        self
    }

    pub fn with_negative_powers(mut self, allow: bool) -> Self {
        self.allow_negative_powers = allow;
        self
    }

    pub fn with_time_budget(mut self, budget: Duration) -> Self {
        self.time_budget = Some(budget);
        self
    }

    pub fn with_jobs(mut self, jobs: usize) -> Self {
        self.jobs = jobs;
        self
    }

    /// Defaults scaled to the word: two disks, powers up to two.
    pub fn for_word(w: &CyclicWord) -> SearchBounds {
        SearchBounds::new(2, 4 * w.len()).with_max_power(2)
    }

    /// Disk multisets within bounds, in search order: by disk count, then
    /// lexicographically. Only multisets whose letter counts allow a closed
    /// pairing are listed.
    pub fn multisets(&self, w: &CyclicWord) -> Vec<Vec<i32>> {
        let n = w.len().max(1);
        let top = self.max_power.map_or(self.max_edges / n, |p| (p as usize).min(self.max_edges / n));
        let mut powers: Vec<i32> = (1..=top as i32).collect();
        if self.allow_negative_powers {
            powers = powers.iter().flat_map(|&p| [p, -p]).collect();
        }
        let counts: Vec<usize> =
            (1..=w.rank()).map(|g| w.letters().iter().filter(|l| l.generator() == g).count()).collect();
        let mut out = Vec::new();
        for m in 1..=self.max_disks {
            let mut cur = Vec::with_capacity(m);
            multisets_rec(&powers, m, 0, 0, self.max_edges / n, &mut cur, &mut |ks: &[usize]| {
                let ks: Vec<i32> = ks.iter().map(|&i| powers[i]).collect();
                let total: usize = ks.iter().map(|k| k.unsigned_abs() as usize).sum();
                if counts.iter().all(|c| (c * total).is_multiple_of(2)) {
                    out.push(ks);
                }
            });
        }
        out
    }
}

fn multisets_rec(
    powers: &[i32],
    m: usize,
    from: usize,
    used: usize,
    cap: usize,
    cur: &mut Vec<usize>,
    emit: &mut impl FnMut(&[usize]),
) {
    if cur.len() == m {
        emit(cur);
        return;
    }
    for i in from..powers.len() {
        let k = powers[i].unsigned_abs() as usize;
        if used + k * (m - cur.len()) > cap {
            continue;
        }
        cur.push(i);
        multisets_rec(powers, m, i, used + k, cap, cur, emit);
        cur.pop();
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum SearchOutcome {
    Found { certificate: Box<PolygonalityCertificate> },
    ExhaustedWithin { bounds: SearchBounds },
    TimedOut { nodes: u64 },
}

impl SearchOutcome {
    pub fn certificate(&self) -> Option<&PolygonalityCertificate> {
        match self {
            SearchOutcome::Found { certificate } => Some(certificate),
            _ => None,
        }
    }
}

/// Union-find with undo, no path compression.
struct Dsu {
    parent: Vec<usize>,
    size: Vec<usize>,
    history: Vec<Option<(usize, usize)>>,
}

impl Dsu {
    fn new(n: usize) -> Dsu {
        Dsu { parent: (0..n).collect(), size: vec![1; n], history: Vec::new() }
    }

    fn find(&self, mut x: usize) -> usize {
        while self.parent[x] != x {
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> usize {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            self.history.push(None);
            return a;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
        self.history.push(Some((a, b)));
        a
    }

    fn undo(&mut self) {
        if let Some(Some((a, b))) = self.history.pop() {
            self.parent[b] = b;
            self.size[a] -= self.size[b];
        }
    }
}

struct Problem<'a> {
    word: &'a CyclicWord,
    disks: Vec<DiskSpec>,
    slots: Vec<Slot>,
    generator: Vec<u32>,
    tail: Vec<usize>,
    head: Vec<usize>,
    disk_start: Vec<usize>,
}

impl<'a> Problem<'a> {
    fn new(word: &'a CyclicWord, powers: &[i32]) -> Problem<'a> {
        let disks: Vec<DiskSpec> = powers.iter().map(|&k| DiskSpec::new(k)).collect();
        let n = word.len();
        let mut p =
            Problem { word, disks, slots: vec![], generator: vec![], tail: vec![], head: vec![], disk_start: vec![] };
        for (d, &k) in powers.iter().enumerate() {
            let size = k.unsigned_abs() as usize * n;
            let base = p.slots.len();
            p.disk_start.push(base);
            for j in 0..size {
                let l = reading(word, k, j);
                let (c0, c1) = (base + j, base + (j + 1) % size);
                p.slots.push(Slot::new(d, j));
                p.generator.push(l.generator());
                let (t, h) = if l.is_inverse() { (c1, c0) } else { (c0, c1) };
                p.tail.push(t);
                p.head.push(h);
            }
        }
        p
    }

    fn pairing(&self, partner: &[Option<usize>]) -> SidePairing {
        SidePairing::from_pairs(
            partner
                .iter()
                .enumerate()
                .filter_map(|(s, t)| t.filter(|&t| s < t).map(|t| (self.slots[s], self.slots[t]))),
        )
    }
}

struct State {
    partner: Vec<Option<usize>>,
    touched: Vec<usize>,
    dsu: Dsu,
}

struct Ctx<'a> {
    deadline: Option<Instant>,
    nodes: &'a AtomicU64,
    timed_out: &'a AtomicBool,
}

impl Ctx<'_> {
    fn tick(&self) -> bool {
        let k = self.nodes.fetch_add(1, Ordering::Relaxed);
        if k.is_multiple_of(4096) {
            if let Some(d) = self.deadline {
                if Instant::now() > d {
                    self.timed_out.store(true, Ordering::Relaxed);
                }
            }
        }
        !self.timed_out.load(Ordering::Relaxed)
    }
}

enum Flow {
    Continue,
    Stop,
}

impl Problem<'_> {
    fn initial(&self) -> State {
        let c = self.slots.len();
        State { partner: vec![None; c], touched: vec![0; self.disks.len()], dsu: Dsu::new(c) }
    }

    /// Partners for `s` in ascending order, skipping copies of an untouched
    /// disk that differ only by disk order or a rotation by `|w|`.
    fn candidates(&self, st: &State, s: usize) -> Vec<usize> {
        let n = self.word.len();
        let ds = self.slots[s].disk;
        let mut out = Vec::new();
        for t in s + 1..self.slots.len() {
            if st.partner[t].is_some() || self.generator[t] != self.generator[s] {
                continue;
            }
            let dt = self.slots[t].disk;
            if dt != ds && st.touched[dt] == 0 {
                if self.slots[t].pos >= n {
                    continue;
                }
                let first_fresh = (0..self.disks.len())
                    .find(|&d| d != ds && st.touched[d] == 0 && self.disks[d] == self.disks[dt])
                    .expect("dt qualifies");
                if first_fresh != dt {
                    continue;
                }
            }
            out.push(t);
        }
        out
    }

    /// Whether every vertex class can still carry at most one incoming and
    /// one outgoing edge per label.
    fn vertex_ok(&self, st: &State, roots: &[usize]) -> bool {
        for &r in roots {
            let mut outs: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
            let mut ins: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
            for s in 0..self.slots.len() {
                if st.dsu.find(self.tail[s]) == r {
                    outs.entry(self.generator[s]).or_default().push(s);
                }
                if st.dsu.find(self.head[s]) == r {
                    ins.entry(self.generator[s]).or_default().push(s);
                }
            }
            for l in outs.values().chain(ins.values()) {
                let ok = match l.as_slice() {
                    [] | [_] => true,
                    &[x, y] => st.partner[x] == Some(y) || (st.partner[x].is_none() && st.partner[y].is_none()),
                    _ => false,
                };
                if !ok {
                    return false;
                }
            }
        }
        true
    }

    fn glue(&self, st: &mut State, s: usize, t: usize) -> bool {
        st.partner[s] = Some(t);
        st.partner[t] = Some(s);
        st.touched[self.slots[s].disk] += 1;
        st.touched[self.slots[t].disk] += 1;
        let a = st.dsu.union(self.tail[s], self.tail[t]);
        let b = st.dsu.union(self.head[s], self.head[t]);
        self.vertex_ok(st, &[a, b])
    }

    fn unglue(&self, st: &mut State, s: usize, t: usize) {
        st.dsu.undo();
        st.dsu.undo();
        st.touched[self.slots[s].disk] -= 1;
        st.touched[self.slots[t].disk] -= 1;
        st.partner[s] = None;
        st.partner[t] = None;
    }

    fn dfs(&self, st: &mut State, ctx: &Ctx, leaf: &mut impl FnMut(SidePairing) -> Flow) -> Flow {
        if !ctx.tick() {
            return Flow::Stop;
        }
        let Some(s) = (0..self.slots.len()).find(|&s| st.partner[s].is_none()) else {
            return leaf(self.pairing(&st.partner));
        };
        // every earlier disk is closed up; the rest would be a new component
        if st.touched[self.slots[s].disk] == 0 && s > 0 {
            return Flow::Continue;
        }
        for t in self.candidates(st, s) {
            let ok = self.glue(st, s, t);
            let flow = if ok { self.dfs(st, ctx, leaf) } else { Flow::Continue };
            self.unglue(st, s, t);
            if let Flow::Stop = flow {
                return Flow::Stop;
            }
        }
        Flow::Continue
    }
}

/// A top-level branch: a disk multiset and the partner of its first slot.
struct Branch {
    powers: Vec<i32>,
    first: usize,
}

fn branches(w: &CyclicWord, bounds: &SearchBounds) -> Vec<Branch> {
    let mut out = Vec::new();
    for powers in bounds.multisets(w) {
        let p = Problem::new(w, &powers);
        let st = p.initial();
        for first in p.candidates(&st, 0) {
            out.push(Branch { powers: powers.clone(), first });
        }
    }
    out
}

fn run_branch(w: &CyclicWord, b: &Branch, ctx: &Ctx, leaf: &mut impl FnMut(&Problem, SidePairing) -> Flow) {
    let p = Problem::new(w, &b.powers);
    let mut st = p.initial();
    if p.glue(&mut st, 0, b.first) {
        p.dfs(&mut st, ctx, &mut |pairing| leaf(&p, pairing));
    }
}

fn polygonal(p: &Problem, pairing: &SidePairing) -> Option<PolygonalityCertificate> {
    let cert = certify(p.word, &p.disks, pairing);
    cert.is_polygonal().then_some(cert)
}

/// Searches for a closed polygonal surface within `bounds`. Proper powers
/// get the declarative certificate.
pub fn decide_polygonal(w: &CyclicWord, bounds: &SearchBounds) -> SearchOutcome {
    if let Some(cert) = PolygonalityCertificate::proper_power(w) {
        return SearchOutcome::Found { certificate: Box::new(cert) };
    }
    let nodes = AtomicU64::new(0);
    let timed_out = AtomicBool::new(false);
    let ctx = Ctx { deadline: bounds.time_budget.map(|d| Instant::now() + d), nodes: &nodes, timed_out: &timed_out };
    let exec = Executor::with_jobs(bounds.jobs);
    let found = exec.find_map_first(&branches(w, bounds), |b| {
        let mut hit = None;
        run_branch(w, b, &ctx, &mut |p, pairing| match polygonal(p, &pairing) {
            Some(c) => {
                hit = Some(c);
                Flow::Stop
            }
            None => Flow::Continue,
        });
        hit.map(Ok).or_else(|| timed_out.load(Ordering::Relaxed).then_some(Err(())))
    });
    match found {
        Some(Ok(cert)) => SearchOutcome::Found { certificate: Box::new(cert) },
        Some(Err(())) => SearchOutcome::TimedOut { nodes: nodes.load(Ordering::Relaxed) },
        None => SearchOutcome::ExhaustedWithin { bounds: bounds.clone() },
    }
}

/// Canonical form of a gluing under reordering equal disks and rotating
/// base points by multiples of `|w|`.
pub fn canonical_key(w: &CyclicWord, disks: &[DiskSpec], pairing: &SidePairing) -> Vec<(Slot, Slot)> {
    let n = w.len();
    let m = disks.len();
    let mut perms: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..m {
        perms = perms
            .into_iter()
            .flat_map(|p| {
                (0..m)
                    .filter(|d| !p.contains(d) && disks[*d] == disks[p.len()])
                    .map(|d| {
                        let mut q = p.clone();
                        q.push(d);
                        q
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
    }
    let mut shifts: Vec<Vec<usize>> = vec![vec![]];
    for d in disks {
        let periods = d.power.unsigned_abs() as usize;
        shifts = shifts
            .into_iter()
            .flat_map(|s| {
                (0..periods).map(move |r| {
                    let mut t = s.clone();
                    t.push(r * n);
                    t
                })
            })
            .collect();
    }
    let mut best: Option<Vec<(Slot, Slot)>> = None;
    for perm in &perms {
        for shift in &shifts {
            let map = |s: Slot| {
                let size = disks[s.disk].power.unsigned_abs() as usize * n;
                Slot::new(perm[s.disk], (s.pos + shift[s.disk]) % size)
            };
            let key = pairing.map_slots(map).pairs().to_vec();
            if best.as_ref().is_none_or(|b| key < *b) {
                best = Some(key);
            }
        }
    }
    best.unwrap_or_default()
}

/// Every polygonal surface within `bounds`, one per canonical class.
pub fn enumerate_all(w: &CyclicWord, bounds: &SearchBounds) -> Vec<PolygonalityCertificate> {
    if w.is_proper_power() {
        return Vec::new();
    }
    let nodes = AtomicU64::new(0);
    let timed_out = AtomicBool::new(false);
    let ctx = Ctx { deadline: bounds.time_budget.map(|d| Instant::now() + d), nodes: &nodes, timed_out: &timed_out };
    let exec = Executor::with_jobs(bounds.jobs);
    let per_branch = exec.map(&branches(w, bounds), |b| {
        let mut found = Vec::new();
        run_branch(w, b, &ctx, &mut |p, pairing| {
            if let Some(c) = polygonal(p, &pairing) {
                found.push(((b.powers.len(), b.powers.clone(), canonical_key(w, &p.disks, &pairing)), c));
            }
            Flow::Continue
        });
        found
    });
    let census: BTreeMap<_, _> = per_branch.into_iter().flatten().collect();
    census.into_values().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::parse_cyclic;

    fn cw(text: &str, rank: u32) -> CyclicWord {
        parse_cyclic(text, rank).unwrap()
    }

    #[test]
    fn commutator_found_on_one_disk() {
        let w = cw("a b a^-1 b^-1", 2);
        let out = decide_polygonal(&w, &SearchBounds::new(1, 4));
        let cert = out.certificate().expect("found");
        let v = cert.verdict().unwrap();
        assert_eq!((v.chi, v.m), (0, 1));
        assert!(cert.verify());
    }

    #[test]
    fn multisets_respect_parity_and_edges() {
        let w = cw("a b a b^2 a b^3", 2);
        let ms = SearchBounds::new(2, 28).multisets(&w);
        assert_eq!(ms, vec![vec![2], vec![1, 1]]);
        let ms =
            SearchBounds::new(2, 40).with_max_power(2).with_negative_powers(true).multisets(&cw("a b a^-1 b^-1", 2));
        assert!(ms.contains(&vec![1, -1]) && ms.contains(&vec![-2]));
    }

    #[test]
    fn baumslag_solitar_found() {
        let w = cw("a (a^2)^b", 2);
        let out = decide_polygonal(&w, &SearchBounds::for_word(&w));
        assert!(out.certificate().is_some_and(|c| c.verify()));
    }

    #[test]
    fn obstructed_word_exhausts() {
        let w = cw("a b a b^2 a b^3", 2);
        let out = decide_polygonal(&w, &SearchBounds::new(2, 28).with_jobs(1));
        assert!(matches!(out, SearchOutcome::ExhaustedWithin { .. }));
    }

    #[test]
    fn proper_power_short_circuits() {
        let out = decide_polygonal(&cw("(a b)^2", 2), &SearchBounds::new(1, 8));
        assert!(out.certificate().is_some_and(|c| c.disks().is_none() && c.is_polygonal()));
        assert!(enumerate_all(&cw("a^2", 1), &SearchBounds::new(2, 8)).is_empty());
    }

    #[test]
    fn census_of_the_seven_vertex_surface() {
        let w = cw("a^2 b^-1 a^-1 b a b^-1 a b", 2);
        let bounds = SearchBounds::new(1, 18).with_max_power(2);
        let census = enumerate_all(&w, &bounds);
        assert!(census.iter().any(|c| {
            let v = c.verdict().unwrap();
            (v.chi, v.m, v.vertices, c.disks().unwrap()[0].power) == (-1, 1, 7, 2)
        }));
        assert!(census.iter().all(|c| c.verify()));
    }

    #[test]
    fn rank_one_census_empty() {
        assert!(enumerate_all(&cw("a", 1), &SearchBounds::new(2, 4)).is_empty());
    }

    #[test]
    fn sum_of_squares_census_nonempty() {
        let w = cw("a^2 b^2", 2);
        assert!(!enumerate_all(&w, &SearchBounds::new(1, 4)).is_empty());
    }

    #[test]
    fn deterministic_across_jobs() {
        let w = cw("a^2 b a^-1 b^-2", 2);
        let b = SearchBounds::for_word(&w);
        let seq = decide_polygonal(&w, &b.clone().with_jobs(1));
        let par = decide_polygonal(&w, &b.with_jobs(4));
        assert_eq!(seq, par);
    }

    #[test]
    fn canonical_key_identifies_rotations() {
        let w = cw("a b a^-1 b^-1", 2);
        let d = [DiskSpec::new(2)];
        let p1 = SidePairing::from_pairs([(Slot::new(0, 0), Slot::new(0, 2))]);
        let p2 = SidePairing::from_pairs([(Slot::new(0, 4), Slot::new(0, 6))]);
        assert_eq!(canonical_key(&w, &d, &p1), canonical_key(&w, &d, &p2));
    }
}
