use serde::{Deserialize, Serialize};

use super::{certified, ConstructError, ConstructionPlan};
use crate::complex::{build_complex, DiskSpec, PolygonalityCertificate, SidePairing, Slot, SurfaceComplex};
use crate::invariants::{canonical_pair, has_no_isolated_generators, rho, rho_terms, TnCertificate, TnCycle};
use crate::words::{syllable_decomposition, CyclicWord};

/// The boundary 2-cycle left at the junction of syllables `index` and
/// `index + 1` by the two-disk rotation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Junction {
    pub index: usize,
    /// `ρ_i`, not canonicalized.
    pub rho: (i32, i32),
    /// Slot on disk 0 carrying the last letter of syllable `index`.
    pub left: Slot,
    /// Slot on disk 1 carrying the first letter of syllable `index + 1`.
    pub right: Slot,
}

impl Junction {
    /// The slot labelled by `generator`.
    fn slot_for(&self, generator: u32) -> Slot {
        if self.rho.0.unsigned_abs() == generator {
            self.left
        } else {
            self.right
        }
    }
}

/// Two disks reading `w`, the second rotated by one position, glued wherever
/// the overlapping letters agree.
#[derive(Clone, Debug)]
pub struct TwoDiskRotation {
    pub word: CyclicWord,
    pub disks: Vec<DiskSpec>,
    pub pairing: SidePairing,
    pub junctions: Vec<Junction>,
}

impl TwoDiskRotation {
    pub fn complex(&self) -> SurfaceComplex {
        build_complex(&self.word, &self.disks, &self.pairing).expect("rotation pairing is well formed")
    }
}

pub fn two_disk_rotation(w: &CyclicWord) -> Result<TwoDiskRotation, ConstructError> {
    let syl = syllable_decomposition(w);
    if syl.len() < 2 {
        return Err(ConstructError::NotApplicable("the word has a single syllable".into()));
    }
    let n = w.len();
    let pairing = SidePairing::from_pairs(
        (0..n).filter(|&j| w.letter_at(j) == w.letter_at(j + 1)).map(|j| (Slot::new(0, j), Slot::new(1, (j + 1) % n))),
    );
    let terms = rho_terms(w);
    let mut end = syl.start;
    let junctions = syl
        .syllables
        .iter()
        .enumerate()
        .map(|(t, s)| {
            end += s.exponent.unsigned_abs() as usize;
            let last = (end + n - 1) % n;
            Junction { index: t, rho: terms[t], left: Slot::new(0, last), right: Slot::new(1, (last + 1) % n) }
        })
        .collect();
    Ok(TwoDiskRotation { word: w.clone(), disks: vec![DiskSpec::new(1); 2], pairing, junctions })
}

/// Closes the two-disk rotation along a `T_n` decomposition of `ρ(w)`.
pub fn construct_from_tn(w: &CyclicWord, cert: &TnCertificate) -> Result<PolygonalityCertificate, ConstructError> {
    if !has_no_isolated_generators(w) {
        return Err(ConstructError::NotApplicable("the word has an isolated generator".into()));
    }
    let base = two_disk_rotation(w)?;
    if !cert.verify(&rho(w)) {
        return Err(ConstructError::CertificateMismatch);
    }
    let mut used = vec![false; base.junctions.len()];
    let mut assignment = Vec::with_capacity(cert.cycles.len());
    for cycle in &cert.cycles {
        let mut ids = Vec::new();
        for (i, j) in cycle.pairs() {
            let want = canonical_pair(i, j);
            let k = (0..used.len())
                .find(|&k| !used[k] && canonical_pair(base.junctions[k].rho.0, base.junctions[k].rho.1) == want)
                .ok_or(ConstructError::CertificateMismatch)?;
            used[k] = true;
            ids.push(k);
        }
        assignment.push(ids);
    }
    let mut pairing = base.pairing.clone();
    for (cycle, ids) in cert.cycles.iter().zip(&assignment) {
        let r = ids.len();
        for j in 0..r {
            let g = cycle.generators[j].unsigned_abs();
            let prev = &base.junctions[ids[(j + r - 1) % r]];
            let here = &base.junctions[ids[j]];
            pairing.push(prev.slot_for(g), here.slot_for(g));
        }
    }
    let plan = ConstructionPlan::TnCycles { cycles: cert.cycles.clone(), junctions: assignment };
    let mut out = certified(w, &base.disks, &pairing, plan)?;
    out.tn_certificate = Some(cert.clone());
    Ok(out)
}

/// Counts of vertex types on an alternately clean/dirty oriented polygon.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceSinkCounts {
    pub sources: usize,
    pub sinks: usize,
    pub filters: usize,
    pub pollutants: usize,
}

/// `orientations[i]` is `+1` when edge `(v_{i+1}, v_{i+2})` follows the
/// polygon's orientation. Edges at even indices are clean.
pub fn sourcesink_classify(orientations: &[i32]) -> Result<SourceSinkCounts, ConstructError> {
    let len = orientations.len();
    if len < 2 || len % 2 == 1 || orientations.iter().any(|&h| h != 1 && h != -1) {
        return Err(ConstructError::InvalidParameter(format!(
            "need an even number (≥ 2) of ±1 entries, got {orientations:?}"
        )));
    }
    // 1-based: τ(i) = (1,0) for odd i, (0,1) for even i
    let tau = |i: usize| if i % 2 == 1 { (1, 0) } else { (0, 1) };
    let mut out = SourceSinkCounts::default();
    for i in 1..=len {
        let prev = if i == 1 { len } else { i - 1 };
        let (hi, hp) = (orientations[i - 1], orientations[prev - 1]);
        let (ti, tp) = (tau(i), tau(prev));
        match (hi * ti.0 - hp * tp.0, hi * ti.1 - hp * tp.1) {
            (1, 1) => out.sources += 1,
            (-1, -1) => out.sinks += 1,
            (1, -1) => out.filters += 1,
            (-1, 1) => out.pollutants += 1,
            other => unreachable!("σ_i = {other:?}"),
        }
    }
    Ok(out)
}

/// Rank-2 words without isolated generators.
pub fn construct_f2_no_isolated(w: &CyclicWord) -> Result<PolygonalityCertificate, ConstructError> {
    if w.rank() != 2 || w.support().len() != 2 {
        return Err(ConstructError::NotApplicable("needs a rank-2 word using both generators".into()));
    }
    if !has_no_isolated_generators(w) {
        return Err(ConstructError::NotApplicable("the word has an isolated generator".into()));
    }
    let r = rho(w);
    let count = |p: (i32, i32)| r.pairs().iter().filter(|&&x| x == p).count();
    let (sources, sinks) = (count((-2, 1)), count((1, -2)));
    let (filters, pollutants) = (count((-1, -2)), count((-2, -1)));
    debug_assert_eq!(sources + sinks + filters + pollutants, r.len());
    if sources != sinks || filters != pollutants {
        return Err(ConstructError::NotCertified(format!("unbalanced junctions in {r}")));
    }
    let cycle = |g: Vec<i32>| {
        let c = TnCycle { generators: g, flipped: Vec::new() };
        let flipped = c.pairs().iter().map(|&(i, j)| (i, j) != canonical_pair(i, j)).collect();
        TnCycle { flipped, ..c }
    };
    let cycles =
        std::iter::repeat_n(vec![1, -2], sources).chain(std::iter::repeat_n(vec![1, 2], filters)).map(cycle).collect();
    let tn = TnCertificate { cycles };
    let mut cert = construct_from_tn(w, &tn)?;
    cert.plan = Some(ConstructionPlan::F2NoIsolated { sources, filters });
    Ok(cert)
}
