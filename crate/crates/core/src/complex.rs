//! Polygonal disks glued along a side-pairing, and the certifier.
//!
//! Disk `i` has `|k_i|·|w|` boundary slots. Slot `j` runs from corner `j` to
//! corner `j+1` and reads the `j`-th letter of `w^{k_i}`; a positive letter
//! means the edge points from corner `j` to corner `j+1`. Paired slots are
//! glued tail to tail and head to head.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constructors::ConstructionPlan;
use crate::invariants::{TnCertificate, UCertificate};
use crate::words::{CyclicWord, Letter, Relabeling, WordError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ComplexError {
    #[error("no disks")]
    NoDisks,
    #[error("disk {0} has power 0")]
    ZeroPower(usize),
    #[error("slot {0} does not exist")]
    BadSlot(Slot),
    #[error("slot {0} is paired with itself")]
    SelfPaired(Slot),
    #[error("slot {0} occurs in more than one pair")]
    SlotReused(Slot),
    #[error("cannot pair {a} ({la}) with {b} ({lb}): labels differ")]
    LabelMismatch { a: Slot, b: Slot, la: Letter, lb: Letter },
    #[error("complex is not closed")]
    NotClosed,
    #[error("complex is not connected")]
    NotConnected,
    #[error("relabeling does not preserve the disk readings")]
    Relabel,
    #[error(transparent)]
    Word(#[from] WordError),
}

/// A polygonal disk whose boundary reads `w^power`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DiskSpec {
    pub power: i32,
}

impl DiskSpec {
    pub fn new(power: i32) -> DiskSpec {
        DiskSpec { power }
    }
}

/// Boundary position `pos` on disk `disk`. Serialized as `[disk, pos]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "[usize; 2]", into = "[usize; 2]")]
pub struct Slot {
    pub disk: usize,
    pub pos: usize,
}

impl Slot {
    pub fn new(disk: usize, pos: usize) -> Slot {
        Slot { disk, pos }
    }
}

impl From<[usize; 2]> for Slot {
    fn from(v: [usize; 2]) -> Slot {
        Slot { disk: v[0], pos: v[1] }
    }
}

impl From<Slot> for [usize; 2] {
    fn from(s: Slot) -> [usize; 2] {
        [s.disk, s.pos]
    }
}

impl std::fmt::Display for Slot {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{},{}]", self.disk, self.pos)
    }
}

/// A (partial) side-pairing, stored as sorted pairs with the lesser slot first.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "Vec<[Slot; 2]>", into = "Vec<[Slot; 2]>")]
pub struct SidePairing {
    pairs: Vec<(Slot, Slot)>,
}

impl From<Vec<[Slot; 2]>> for SidePairing {
    fn from(v: Vec<[Slot; 2]>) -> Self {
        SidePairing::from_pairs(v.into_iter().map(|[a, b]| (a, b)))
    }
}

impl From<SidePairing> for Vec<[Slot; 2]> {
    fn from(p: SidePairing) -> Self {
        p.pairs.into_iter().map(|(a, b)| [a, b]).collect()
    }
}

impl SidePairing {
    pub fn new() -> SidePairing {
        SidePairing::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Slot, Slot)>) -> SidePairing {
        let mut p: Vec<(Slot, Slot)> = pairs.into_iter().map(|(a, b)| if a <= b { (a, b) } else { (b, a) }).collect();
        p.sort();
        SidePairing { pairs: p }
    }

    pub fn push(&mut self, a: Slot, b: Slot) {
        let pair = if a <= b { (a, b) } else { (b, a) };
        let at = self.pairs.binary_search(&pair).unwrap_or_else(|i| i);
        self.pairs.insert(at, pair);
    }

    pub fn extend(&mut self, other: &SidePairing) {
        self.pairs.extend_from_slice(&other.pairs);
        self.pairs.sort();
    }

    pub fn pairs(&self) -> &[(Slot, Slot)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Applies `f` to every slot.
    pub fn map_slots(&self, f: impl Fn(Slot) -> Slot) -> SidePairing {
        SidePairing::from_pairs(self.pairs.iter().map(|&(a, b)| (f(a), f(b))))
    }
}

/// Letter read at boundary position `pos` of a disk reading `w^power`.
pub fn reading(word: &CyclicWord, power: i32, pos: usize) -> Letter {
    let n = power.unsigned_abs() as usize * word.len();
    if power > 0 {
        word.letter_at(pos)
    } else {
        word.letter_at(n - 1 - pos).inverse()
    }
}

/// Flat indexing of slots (and, identically, of corners).
#[derive(Clone, Debug)]
pub(crate) struct SlotIndex {
    offsets: Vec<usize>,
    sizes: Vec<usize>,
}

impl SlotIndex {
    pub(crate) fn new(word_len: usize, disks: &[DiskSpec]) -> SlotIndex {
        let sizes: Vec<usize> = disks.iter().map(|d| d.power.unsigned_abs() as usize * word_len).collect();
        let mut offsets = Vec::with_capacity(sizes.len());
        let mut acc = 0;
        for s in &sizes {
            offsets.push(acc);
            acc += s;
        }
        SlotIndex { offsets, sizes }
    }

    pub(crate) fn total(&self) -> usize {
        self.offsets.last().map_or(0, |o| o + self.sizes.last().unwrap())
    }

    pub(crate) fn size(&self, disk: usize) -> usize {
        self.sizes[disk]
    }

    pub(crate) fn flat(&self, s: Slot) -> usize {
        self.offsets[s.disk] + s.pos
    }

    pub(crate) fn contains(&self, s: Slot) -> bool {
        s.disk < self.sizes.len() && s.pos < self.sizes[s.disk]
    }

    pub(crate) fn slot(&self, flat: usize) -> Slot {
        let disk = match self.offsets.binary_search(&flat) {
            Ok(mut i) => {
                // skip empty disks sharing the offset
                while self.sizes[i] == 0 {
                    i += 1;
                }
                i
            }
            Err(i) => i - 1,
        };
        Slot { disk, pos: flat - self.offsets[disk] }
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut y = x;
        while self.parent[y] != r {
            let next = self.parent[y];
            self.parent[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub generator: u32,
    pub tail: usize,
    pub head: usize,
    /// One slot for a boundary edge, two for an interior edge.
    pub slots: Vec<Slot>,
}

/// One step along a boundary circle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryStep {
    pub slot: Slot,
    /// True when the step runs from the edge's tail to its head.
    pub forward: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryComponent {
    pub steps: Vec<BoundaryStep>,
    /// `vertices[k]` is where step `k` starts.
    pub vertices: Vec<usize>,
}

impl BoundaryComponent {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

/// The quotient CW complex `∐ P_i / ~`.
#[derive(Clone, Debug)]
pub struct SurfaceComplex {
    word: CyclicWord,
    disks: Vec<DiskSpec>,
    index: SlotIndex,
    vertex_of_corner: Vec<usize>,
    num_vertices: usize,
    edges: Vec<Edge>,
    edge_of_slot: Vec<usize>,
    partner: Vec<Option<Slot>>,
    boundary: Vec<BoundaryComponent>,
    /// Connected components as lists of disk indices.
    components: Vec<Vec<usize>>,
}

/// Tail and head corners of a slot, given its reading.
fn slot_ends(letter: Letter, pos: usize, size: usize) -> (usize, usize) {
    let next = (pos + 1) % size;
    if letter.is_inverse() {
        (next, pos)
    } else {
        (pos, next)
    }
}

/// Builds the quotient complex.
pub fn build_complex(
    word: &CyclicWord,
    disks: &[DiskSpec],
    pairing: &SidePairing,
) -> Result<SurfaceComplex, ComplexError> {
    if disks.is_empty() {
        return Err(ComplexError::NoDisks);
    }
    if let Some(i) = disks.iter().position(|d| d.power == 0) {
        return Err(ComplexError::ZeroPower(i));
    }
    let index = SlotIndex::new(word.len(), disks);
    let total = index.total();
    let read = |s: Slot| reading(word, disks[s.disk].power, s.pos);

    let mut partner: Vec<Option<Slot>> = vec![None; total];
    for &(a, b) in pairing.pairs() {
        for s in [a, b] {
            if !index.contains(s) {
                return Err(ComplexError::BadSlot(s));
            }
        }
        if a == b {
            return Err(ComplexError::SelfPaired(a));
        }
        let (la, lb) = (read(a), read(b));
        if la.generator() != lb.generator() {
            return Err(ComplexError::LabelMismatch { a, b, la, lb });
        }
        for s in [a, b] {
            if partner[index.flat(s)].is_some() {
                return Err(ComplexError::SlotReused(s));
            }
        }
        partner[index.flat(a)] = Some(b);
        partner[index.flat(b)] = Some(a);
    }

    // corners share the flat numbering of slots
    let corner = |s: Slot, c: usize| index.flat(Slot { disk: s.disk, pos: c });
    let ends = |s: Slot| {
        let (t, h) = slot_ends(read(s), s.pos, index.size(s.disk));
        (corner(s, t), corner(s, h))
    };
    let mut uf = UnionFind::new(total);
    let mut disk_uf = UnionFind::new(disks.len());
    for &(a, b) in pairing.pairs() {
        let (ta, ha) = ends(a);
        let (tb, hb) = ends(b);
        uf.union(ta, tb);
        uf.union(ha, hb);
        disk_uf.union(a.disk, b.disk);
    }
    let mut vertex_id: BTreeMap<usize, usize> = BTreeMap::new();
    let mut vertex_of_corner = vec![0; total];
    for (c, v) in vertex_of_corner.iter_mut().enumerate() {
        let root = uf.find(c);
        let next = vertex_id.len();
        *v = *vertex_id.entry(root).or_insert(next);
    }
    let num_vertices = vertex_id.len();

    let mut edges = Vec::new();
    let mut edge_of_slot = vec![usize::MAX; total];
    for f in 0..total {
        if edge_of_slot[f] != usize::MAX {
            continue;
        }
        let s = index.slot(f);
        let (t, h) = ends(s);
        let mut slots = vec![s];
        edge_of_slot[f] = edges.len();
        if let Some(p) = partner[f] {
            edge_of_slot[index.flat(p)] = edges.len();
            slots.push(p);
        }
        edges.push(Edge {
            generator: read(s).generator(),
            tail: vertex_of_corner[t],
            head: vertex_of_corner[h],
            slots,
        });
    }

    let mut comp_of_root: BTreeMap<usize, usize> = BTreeMap::new();
    let mut components: Vec<Vec<usize>> = Vec::new();
    for d in 0..disks.len() {
        let r = disk_uf.find(d);
        let next = components.len();
        let c = *comp_of_root.entry(r).or_insert(next);
        if c == components.len() {
            components.push(Vec::new());
        }
        components[c].push(d);
    }

    let mut complex = SurfaceComplex {
        word: word.clone(),
        disks: disks.to_vec(),
        index,
        vertex_of_corner,
        num_vertices,
        edges,
        edge_of_slot,
        partner,
        boundary: Vec::new(),
        components,
    };
    complex.boundary = complex.trace_boundary();
    Ok(complex)
}

impl SurfaceComplex {
    pub fn word(&self) -> &CyclicWord {
        &self.word
    }

    pub fn disks(&self) -> &[DiskSpec] {
        &self.disks
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// m(S), the number of 2-cells.
    pub fn num_faces(&self) -> usize {
        self.disks.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn is_closed(&self) -> bool {
        self.boundary.is_empty()
    }

    pub fn boundary(&self) -> &[BoundaryComponent] {
        &self.boundary
    }

    pub fn components(&self) -> &[Vec<usize>] {
        &self.components
    }

    pub fn disk_size(&self, disk: usize) -> usize {
        self.index.size(disk)
    }

    pub fn reading(&self, s: Slot) -> Letter {
        reading(&self.word, self.disks[s.disk].power, s.pos)
    }

    pub fn partner(&self, s: Slot) -> Option<Slot> {
        self.partner[self.index.flat(s)]
    }

    pub fn edge_of(&self, s: Slot) -> usize {
        self.edge_of_slot[self.index.flat(s)]
    }

    /// Vertex at corner `c` of disk `disk` (corner `c` precedes slot `c`).
    pub fn vertex_at(&self, disk: usize, c: usize) -> usize {
        self.vertex_of_corner[self.index.flat(Slot { disk, pos: c })]
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.num_vertices as i64 - self.edges.len() as i64 + self.disks.len() as i64
    }

    /// Face boundary of disk `d`: each slot's edge and whether the disk
    /// traverses it from tail to head.
    pub fn face(&self, d: usize) -> Vec<(usize, bool)> {
        (0..self.index.size(d))
            .map(|pos| {
                let s = Slot { disk: d, pos };
                (self.edge_of(s), !self.reading(s).is_inverse())
            })
            .collect()
    }

    fn trace_boundary(&self) -> Vec<BoundaryComponent> {
        // (slot, at_head) endpoints of boundary edges, grouped by vertex
        let mut ends: BTreeMap<usize, Vec<(Slot, bool)>> = BTreeMap::new();
        let mut boundary_slots = Vec::new();
        for (f, p) in self.partner.iter().enumerate() {
            if p.is_none() {
                let s = self.index.slot(f);
                let e = &self.edges[self.edge_of_slot[f]];
                ends.entry(e.tail).or_default().push((s, false));
                ends.entry(e.head).or_default().push((s, true));
                boundary_slots.push(s);
            }
        }
        let mut visited = std::collections::BTreeSet::new();
        let mut out = Vec::new();
        for &start in &boundary_slots {
            if visited.contains(&start) {
                continue;
            }
            let mut steps = Vec::new();
            let mut vertices = Vec::new();
            let mut slot = start;
            let mut forward = true;
            loop {
                visited.insert(slot);
                let e = &self.edges[self.edge_of(slot)];
                let (from, to) = if forward { (e.tail, e.head) } else { (e.head, e.tail) };
                steps.push(BoundaryStep { slot, forward });
                vertices.push(from);
                let arrived = (slot, forward);
                let next = ends[&to].iter().copied().find(|&end| end != arrived);
                let Some((next_slot, next_at_head)) = next else { break };
                if next_slot == start && visited.contains(&next_slot) {
                    break;
                }
                slot = next_slot;
                forward = !next_at_head;
                if visited.contains(&slot) {
                    break;
                }
            }
            out.push(BoundaryComponent { steps, vertices });
        }
        out
    }

    /// Per-component `(χ, m)`.
    pub fn component_counts(&self) -> Vec<(i64, usize)> {
        self.components
            .iter()
            .map(|disks| {
                let mut verts = std::collections::BTreeSet::new();
                let mut edges = std::collections::BTreeSet::new();
                for &d in disks {
                    for pos in 0..self.index.size(d) {
                        verts.insert(self.vertex_at(d, pos));
                        edges.insert(self.edge_of(Slot { disk: d, pos }));
                    }
                }
                (verts.len() as i64 - edges.len() as i64 + disks.len() as i64, disks.len())
            })
            .collect()
    }

    pub fn check_immersion(&self) -> ImmersionReport {
        let rank = self.word.rank() as usize;
        let mut out = vec![vec![0u32; rank + 1]; self.num_vertices];
        let mut inc = vec![vec![0u32; rank + 1]; self.num_vertices];
        for e in &self.edges {
            out[e.tail][e.generator as usize] += 1;
            inc[e.head][e.generator as usize] += 1;
        }
        let mut violations = Vec::new();
        for v in 0..self.num_vertices {
            for g in 1..=rank {
                if out[v][g] > 1 {
                    violations.push(ImmersionViolation {
                        vertex: v,
                        generator: g as u32,
                        incoming: false,
                        count: out[v][g],
                    });
                }
                if inc[v][g] > 1 {
                    violations.push(ImmersionViolation {
                        vertex: v,
                        generator: g as u32,
                        incoming: true,
                        count: inc[v][g],
                    });
                }
            }
        }
        ImmersionReport { ok: violations.is_empty(), violations }
    }

    /// Reads each face boundary back from the edge data and compares it with
    /// `w^k`.
    pub fn faces_read_powers(&self) -> bool {
        (0..self.disks.len()).all(|d| {
            self.face(d).iter().enumerate().all(|(pos, &(e, forward))| {
                let edge = &self.edges[e];
                let l = Letter::new(edge.generator, !forward);
                let (t, h) = (self.vertex_at(d, pos), self.vertex_at(d, (pos + 1) % self.disk_size(d)));
                let ends_ok = if forward { (edge.tail, edge.head) == (t, h) } else { (edge.tail, edge.head) == (h, t) };
                ends_ok && l == reading(&self.word, self.disks[d].power, pos)
            })
        })
    }

    /// Orientability and genus of a closed connected surface.
    pub fn genus_report(&self) -> Result<GenusReport, ComplexError> {
        if !self.is_closed() {
            return Err(ComplexError::NotClosed);
        }
        if self.components.len() != 1 {
            return Err(ComplexError::NotConnected);
        }
        let chi = self.euler_characteristic();
        let orientable = self.is_orientable();
        let genus = if orientable { (2 - chi) / 2 } else { 2 - chi };
        Ok(GenusReport { chi, orientable, genus })
    }

    /// Two-colours the faces so that every interior edge is traversed in
    /// opposite directions by its two sides.
    pub fn is_orientable(&self) -> bool {
        let n = self.disks.len();
        let mut sign: Vec<Option<i8>> = vec![None; n];
        // constraint edges: (d1, d2, product) with sign[d1]*sign[d2] == product
        let mut adj: Vec<Vec<(usize, i8)>> = vec![Vec::new(); n];
        for e in &self.edges {
            if let [a, b] = e.slots[..] {
                let da = if self.reading(a).is_inverse() { -1 } else { 1 };
                let db = if self.reading(b).is_inverse() { -1 } else { 1 };
                let product = -(da * db);
                adj[a.disk].push((b.disk, product));
                adj[b.disk].push((a.disk, product));
            }
        }
        for start in 0..n {
            if sign[start].is_some() {
                continue;
            }
            sign[start] = Some(1);
            let mut stack = vec![start];
            while let Some(d) = stack.pop() {
                let sd = sign[d].unwrap();
                for &(o, prod) in &adj[d] {
                    let want = sd * prod;
                    match sign[o] {
                        None => {
                            sign[o] = Some(want);
                            stack.push(o);
                        }
                        Some(x) if x != want => return false,
                        _ => {}
                    }
                }
            }
        }
        true
    }

    /// Two corners of one disk whose distance is a multiple of `|w|` that map
    /// to the same vertex.
    pub fn identified_period_corners(&self) -> Option<(usize, usize, usize)> {
        let len = self.word.len();
        for d in 0..self.disks.len() {
            let size = self.disk_size(d);
            for c in 0..size {
                let mut c2 = c + len;
                while c2 < size {
                    if self.vertex_at(d, c) == self.vertex_at(d, c2) {
                        return Some((d, c, c2));
                    }
                    c2 += len;
                }
            }
        }
        None
    }

    /// Graphviz rendering of the 1-skeleton.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph S1 {\n");
        for v in 0..self.num_vertices {
            let _ = writeln!(s, "  v{v};");
        }
        for (i, e) in self.edges.iter().enumerate() {
            let style = if e.slots.len() == 1 { ", style=dashed" } else { "" };
            let _ = writeln!(s, "  v{} -> v{} [label=\"a{}\", id=\"e{i}\"{style}];", e.tail, e.head, e.generator);
        }
        s.push_str("}\n");
        s
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImmersionViolation {
    pub vertex: usize,
    pub generator: u32,
    pub incoming: bool,
    pub count: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImmersionReport {
    pub ok: bool,
    pub violations: Vec<ImmersionViolation>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenusReport {
    pub chi: i64,
    pub orientable: bool,
    /// Handles if orientable, crosscaps otherwise.
    pub genus: i64,
}

/// The certifier's findings for a surface.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub chi: i64,
    pub m: usize,
    pub vertices: usize,
    pub edges: usize,
    pub immersion: bool,
    pub closed: bool,
    pub boundaries_read_powers: bool,
    /// `(χ, m)` of each connected component.
    pub components: Vec<(i64, usize)>,
    pub polygonal: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Verdict {
    fn rejected(err: &ComplexError, m: usize) -> Verdict {
        Verdict {
            chi: 0,
            m,
            vertices: 0,
            edges: 0,
            immersion: false,
            closed: false,
            boundaries_read_powers: false,
            components: Vec::new(),
            polygonal: false,
            error: Some(err.to_string()),
        }
    }
}

/// What a certificate rests on.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Evidence {
    /// A glued surface, re-checkable by [`certify`].
    Surface { disks: Vec<DiskSpec>, pairing: SidePairing, verdict: Verdict },
    /// Proper powers are polygonal by definition; no surface is built.
    ProperPower { root: CyclicWord, exponent: u32 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolygonalityCertificate {
    pub word: CyclicWord,
    pub evidence: Evidence,
    pub tn_certificate: Option<TnCertificate>,
    pub u_certificate: Option<UCertificate>,
    pub plan: Option<ConstructionPlan>,
}

/// Runs the certifier on `w`, the disks and the pairing.
pub fn certify(word: &CyclicWord, disks: &[DiskSpec], pairing: &SidePairing) -> PolygonalityCertificate {
    let verdict = match build_complex(word, disks, pairing) {
        Ok(s) => verdict_of(&s),
        Err(e) => Verdict::rejected(&e, disks.len()),
    };
    PolygonalityCertificate {
        word: word.clone(),
        evidence: Evidence::Surface { disks: disks.to_vec(), pairing: pairing.clone(), verdict },
        tn_certificate: None,
        u_certificate: None,
        plan: None,
    }
}

/// The verdict for an already built complex.
pub fn verdict_of(s: &SurfaceComplex) -> Verdict {
    let immersion = s.check_immersion().ok;
    let closed = s.is_closed();
    let boundaries_read_powers = s.faces_read_powers();
    let components = s.component_counts();
    let polygonal = closed && immersion && boundaries_read_powers && components.iter().all(|&(chi, m)| chi < m as i64);
    Verdict {
        chi: s.euler_characteristic(),
        m: s.num_faces(),
        vertices: s.num_vertices(),
        edges: s.num_edges(),
        immersion,
        closed,
        boundaries_read_powers,
        components,
        polygonal,
        error: None,
    }
}

impl PolygonalityCertificate {
    pub fn proper_power(word: &CyclicWord) -> Option<PolygonalityCertificate> {
        let (root, exponent) = word.primitive_root();
        (exponent > 1).then(|| PolygonalityCertificate {
            word: word.clone(),
            evidence: Evidence::ProperPower { root, exponent },
            tn_certificate: None,
            u_certificate: None,
            plan: None,
        })
    }

    pub fn is_polygonal(&self) -> bool {
        match &self.evidence {
            Evidence::Surface { verdict, .. } => verdict.polygonal,
            Evidence::ProperPower { .. } => true,
        }
    }

    pub fn verdict(&self) -> Option<&Verdict> {
        match &self.evidence {
            Evidence::Surface { verdict, .. } => Some(verdict),
            Evidence::ProperPower { .. } => None,
        }
    }

    pub fn disks(&self) -> Option<&[DiskSpec]> {
        match &self.evidence {
            Evidence::Surface { disks, .. } => Some(disks),
            Evidence::ProperPower { .. } => None,
        }
    }

    pub fn pairing(&self) -> Option<&SidePairing> {
        match &self.evidence {
            Evidence::Surface { pairing, .. } => Some(pairing),
            Evidence::ProperPower { .. } => None,
        }
    }

    pub fn complex(&self) -> Option<Result<SurfaceComplex, ComplexError>> {
        match &self.evidence {
            Evidence::Surface { disks, pairing, .. } => Some(build_complex(&self.word, disks, pairing)),
            Evidence::ProperPower { .. } => None,
        }
    }

    /// Re-runs the certifier on the stored data and compares verdicts.
    pub fn verify(&self) -> bool {
        match &self.evidence {
            Evidence::Surface { disks, pairing, verdict } => {
                let again = certify(&self.word, disks, pairing);
                again.verdict() == Some(verdict)
            }
            Evidence::ProperPower { root, exponent } => *exponent > 1 && root.power(*exponent as usize) == self.word,
        }
    }

    pub fn with_plan(mut self, plan: ConstructionPlan) -> Self {
        self.plan = Some(plan);
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&CertificateJson::from(self)).expect("certificate serializes")
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(CertificateJson::from(self)).expect("certificate serializes")
    }

    pub fn from_json(text: &str) -> Result<PolygonalityCertificate, CertificateParseError> {
        let raw: CertificateJson = serde_json::from_str(text)?;
        raw.try_into()
    }
}

#[derive(Debug, Error)]
pub enum CertificateParseError {
    #[error("invalid certificate json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid word in certificate: {0}")]
    Word(#[from] WordError),
    #[error("certificate has neither a surface nor a proper-power marker")]
    Incomplete,
}

#[derive(Serialize, Deserialize)]
struct DeclarativeJson {
    proper_power: ProperPowerJson,
}

#[derive(Serialize, Deserialize)]
struct ProperPowerJson {
    root: String,
    exponent: u32,
}

/// On-disk certificate layout.
#[derive(Serialize, Deserialize)]
struct CertificateJson {
    word: String,
    rank: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    disks: Option<Vec<DiskSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pairing: Option<SidePairing>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    verdict: Option<Verdict>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    declarative: Option<DeclarativeJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tn_certificate: Option<TnCertificate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    u_certificate: Option<UCertificate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    plan: Option<ConstructionPlan>,
}

impl From<&PolygonalityCertificate> for CertificateJson {
    fn from(c: &PolygonalityCertificate) -> Self {
        let mut out = CertificateJson {
            word: c.word.to_string(),
            rank: c.word.rank(),
            disks: None,
            pairing: None,
            verdict: None,
            declarative: None,
            tn_certificate: c.tn_certificate.clone(),
            u_certificate: c.u_certificate.clone(),
            plan: c.plan.clone(),
        };
        match &c.evidence {
            Evidence::Surface { disks, pairing, verdict } => {
                out.disks = Some(disks.clone());
                out.pairing = Some(pairing.clone());
                out.verdict = Some(verdict.clone());
            }
            Evidence::ProperPower { root, exponent } => {
                out.declarative = Some(DeclarativeJson {
                    proper_power: ProperPowerJson { root: root.to_string(), exponent: *exponent },
                });
            }
        }
        out
    }
}

impl Serialize for PolygonalityCertificate {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        CertificateJson::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PolygonalityCertificate {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = CertificateJson::deserialize(deserializer)?;
        PolygonalityCertificate::try_from(raw).map_err(serde::de::Error::custom)
    }
}

impl TryFrom<CertificateJson> for PolygonalityCertificate {
    type Error = CertificateParseError;
    fn try_from(raw: CertificateJson) -> Result<Self, Self::Error> {
        let word = crate::words::parse_cyclic(&raw.word, raw.rank)?;
        let evidence = match (raw.disks, raw.pairing, raw.verdict, raw.declarative) {
            (Some(disks), Some(pairing), Some(verdict), _) => Evidence::Surface { disks, pairing, verdict },
            (Some(disks), Some(pairing), None, _) => {
                let verdict = certify(&word, &disks, &pairing).verdict().cloned().expect("surface verdict");
                Evidence::Surface { disks, pairing, verdict }
            }
            (_, _, _, Some(d)) => Evidence::ProperPower {
                root: crate::words::parse_cyclic(&d.proper_power.root, raw.rank)?,
                exponent: d.proper_power.exponent,
            },
            _ => return Err(CertificateParseError::Incomplete),
        };
        Ok(PolygonalityCertificate {
            word,
            evidence,
            tn_certificate: raw.tn_certificate,
            u_certificate: raw.u_certificate,
            plan: raw.plan,
        })
    }
}

/// Finds `shift` with `reading(target, power, (j + shift) % n) == want[j]` for all `j`.
fn find_shift(target: &CyclicWord, power: i32, want: &[Letter]) -> Option<usize> {
    let n = want.len();
    (0..n).find(|&shift| (0..n).all(|j| reading(target, power, (j + shift) % n) == want[j]))
}

/// Carries a glued surface for `w` over to the image of `w` under a
/// relabeling. The disks keep their geometry; only labels, base points and,
/// for `Rotate`, disk order change.
pub fn relabel_gluing(
    word: &CyclicWord,
    disks: &[DiskSpec],
    pairing: &SidePairing,
    t: &Relabeling,
) -> Result<(CyclicWord, Vec<DiskSpec>, SidePairing), ComplexError> {
    t.validate(word.rank())?;
    let new_word = crate::words::transform(word, t);
    let index = SlotIndex::new(word.len(), disks);
    let len = word.len();
    let m = disks.len();
    // new disk index for each old disk
    let order: Vec<usize> = match t {
        Relabeling::Rotate(_) => (0..m).rev().collect(),
        _ => (0..m).collect(),
    };
    let mut new_disks = vec![DiskSpec::new(0); m];
    let mut shifts = vec![0usize; m];
    for d in 0..m {
        let power = disks[d].power;
        let n = index.size(d);
        let want: Vec<Letter> = (0..n)
            .map(|j| {
                let l = reading(word, power, j);
                t.map_letter(l).unwrap_or(l)
            })
            .collect();
        let (new_power, shift) = match t {
            Relabeling::Inverse => (-power, find_shift(&new_word, -power, &want)),
            Relabeling::Rotate(r) => {
                // base point moves forward by whole periods of the word
                let step = (r.max(&1) * len) % n.max(1);
                let shifted: Vec<Letter> = (0..n).map(|j| want[(j + step) % n]).collect();
                let s = find_shift(&new_word, power, &shifted).map(|s| (s + n - step) % n);
                (power, s)
            }
            _ => (power, find_shift(&new_word, power, &want)),
        };
        new_disks[order[d]] = DiskSpec::new(new_power);
        shifts[d] = shift.ok_or(ComplexError::Relabel)?;
    }
    let map = |s: Slot| {
        let n = index.size(s.disk);
        Slot { disk: order[s.disk], pos: (s.pos + shifts[s.disk]) % n }
    };
    let new_pairing = pairing.map_slots(map);
    Ok((new_word, new_disks, new_pairing))
}

/// Relabels a certificate; the verdict is recomputed from scratch.
pub fn relabel_certificate(
    cert: &PolygonalityCertificate,
    t: &Relabeling,
) -> Result<PolygonalityCertificate, ComplexError> {
    match &cert.evidence {
        Evidence::Surface { disks, pairing, .. } => {
            let (w, d, p) = relabel_gluing(&cert.word, disks, pairing, t)?;
            Ok(certify(&w, &d, &p))
        }
        Evidence::ProperPower { .. } => {
            let w = crate::words::transform(&cert.word, t);
            PolygonalityCertificate::proper_power(&w).ok_or(ComplexError::Relabel)
        }
    }
}
