use serde::{Deserialize, Serialize};

use super::{certified, two_disk_rotation, ConstructError, ConstructionPlan};
use crate::complex::{build_complex, BoundaryComponent, PolygonalityCertificate, Slot, SurfaceComplex};
use crate::invariants::isolated_form;
use crate::words::CyclicWord;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryKind {
    Source,
    Sink,
    Filter,
    Pollutant,
}

impl BoundaryKind {
    /// Type of the boundary around `b^{q_i}` from `(sign p_i, sign q_i, sign p_{i+1})`.
    pub fn of(r: (i32, i32, i32)) -> BoundaryKind {
        match r {
            (-1, 1, 1) | (-1, -1, 1) => BoundaryKind::Source,
            (1, 1, -1) | (1, -1, -1) => BoundaryKind::Sink,
            (1, 1, 1) | (-1, -1, -1) => BoundaryKind::Filter,
            _ => BoundaryKind::Pollutant,
        }
    }
}

/// The eight ways to lay one boundary circle onto another of the same
/// length, keeping only those that match labels and send tails to tails.
pub(crate) fn dihedral_gluings(
    s: &SurfaceComplex,
    a: &BoundaryComponent,
    b: &BoundaryComponent,
) -> Vec<Vec<(Slot, Slot)>> {
    let m = a.len();
    if m != b.len() {
        return Vec::new();
    }
    let label = |sl: Slot| s.reading(sl).generator();
    let mut out = Vec::new();
    for reflect in [false, true] {
        for r in 0..m {
            let partner = |k: usize| if reflect { (r + m - k) % m } else { (k + r) % m };
            let ok = (0..m).all(|k| {
                let (x, y) = (a.steps[k], b.steps[partner(k)]);
                label(x.slot) == label(y.slot) && (x.forward == y.forward) != reflect
            });
            if ok {
                out.push((0..m).map(|k| (a.steps[k].slot, b.steps[partner(k)].slot)).collect());
            }
        }
    }
    out
}

/// Rank-2 words `∏ a^{p_i} b^{±1}` with every `|p_i| > 1` and vanishing sign
/// sum.
pub fn construct_isolated_b(w: &CyclicWord) -> Result<PolygonalityCertificate, ConstructError> {
    let form = isolated_form(w)
        .ok_or_else(|| ConstructError::NotApplicable("not of the form ∏ a^{p_i} b^{±1} with |p_i| > 1".into()))?;
    if form.p.len() < 2 {
        return Err(ConstructError::NotApplicable("needs at least two b-syllables".into()));
    }
    if form.sign_sum() != 0 {
        return Err(ConstructError::NotApplicable(format!("sign sum is {}", form.sign_sum())));
    }
    let base = two_disk_rotation(w)?;
    let s = base.complex();
    let n = w.len();
    let l = form.p.len();
    let mut pos = form.offset;
    let mut comps = Vec::with_capacity(l);
    let mut kinds = Vec::with_capacity(l);
    for i in 0..l {
        pos += form.p[i].unsigned_abs() as usize;
        let b_slot = Slot::new(0, pos % n);
        pos += 1;
        let comp = s
            .boundary()
            .iter()
            .position(|c| c.steps.iter().any(|st| st.slot == b_slot))
            .ok_or_else(|| ConstructError::NotCertified(format!("b-slot {b_slot} is not on the boundary")))?;
        comps.push(comp);
        kinds.push(BoundaryKind::of((form.p[i].signum(), form.q[i].signum(), form.p[(i + 1) % l].signum())));
    }
    let of_kind = |k: BoundaryKind| (0..l).filter(|&i| kinds[i] == k).collect::<Vec<_>>();
    let mut matches: Vec<(usize, usize)> =
        of_kind(BoundaryKind::Source).into_iter().zip(of_kind(BoundaryKind::Sink)).collect();
    matches.extend(of_kind(BoundaryKind::Filter).into_iter().zip(of_kind(BoundaryKind::Pollutant)));
    if 2 * matches.len() != l {
        return Err(ConstructError::NotCertified("sources/sinks or filters/pollutants do not balance".into()));
    }

    let mut pairing = base.pairing.clone();
    for &(i, j) in &matches {
        let (a, b) = (&s.boundary()[comps[i]], &s.boundary()[comps[j]]);
        let candidates = dihedral_gluings(&s, a, b);
        let immersed = |glue: &Vec<(Slot, Slot)>| {
            let mut trial = pairing.clone();
            for &(x, y) in glue {
                trial.push(x, y);
            }
            build_complex(w, &base.disks, &trial).map(|c| c.check_immersion().ok).unwrap_or(false)
        };
        let glue = candidates
            .iter()
            .find(|g| immersed(g))
            .or(candidates.first())
            .ok_or_else(|| ConstructError::NotCertified(format!("boundaries {i} and {j} cannot be matched")))?;
        for &(x, y) in glue {
            pairing.push(x, y);
        }
    }
    certified(w, &base.disks, &pairing, ConstructionPlan::IsolatedB { matches, kinds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::parse_cyclic;

    fn cw(text: &str) -> CyclicWord {
        parse_cyclic(text, 2).unwrap()
    }

    #[test]
    fn isolated_examples() {
        for text in ["a^2 b a^2 b^-1", "a^2 (a^3)^b", "a^-2 (a^3)^b a^4 (a^-2)^b", "a^3 b a^-2 b a^2 b^-1 a^-5 b^-1"] {
            let cert = construct_isolated_b(&cw(text)).unwrap_or_else(|e| panic!("{text}: {e}"));
            assert!(cert.is_polygonal(), "{text}");
        }
        assert!(matches!(construct_isolated_b(&cw("a^2 b a^3 b")), Err(ConstructError::NotApplicable(_))));
        assert!(matches!(construct_isolated_b(&cw("a^2 b^2")), Err(ConstructError::NotApplicable(_))));
    }

    #[test]
    fn boundaries_are_four_cycles() {
        let w = cw("a^2 b a^2 b^-1");
        let s = two_disk_rotation(&w).unwrap().complex();
        assert!(s.boundary().iter().all(|b| b.len() == 4));
        assert_eq!(s.boundary().len(), 2);
    }

    #[test]
    fn kind_table() {
        assert_eq!(BoundaryKind::of((-1, 1, 1)), BoundaryKind::Source);
        assert_eq!(BoundaryKind::of((1, -1, -1)), BoundaryKind::Sink);
        assert_eq!(BoundaryKind::of((-1, -1, -1)), BoundaryKind::Filter);
        assert_eq!(BoundaryKind::of((1, -1, 1)), BoundaryKind::Pollutant);
    }
}
