use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{certified, ConstructError, ConstructionPlan};
use crate::complex::{build_complex, relabel_certificate, DiskSpec, PolygonalityCertificate, SidePairing, Slot};
use crate::invariants::{
    boundary_lambda, lambda_of, simple_height_one_with, u_membership, HeightOne, LambdaMultiset, UPairKind,
};
use crate::words::{transform, CyclicWord, Relabeling};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HeightOneOptions {
    /// Use `d = c!` instead of the order of the period permutation.
    pub factorial_d: bool,
    /// Use this `d`; it must satisfy `G^d = 1`.
    pub d_override: Option<u64>,
    /// Upper bound on the total number of boundary slots.
    pub max_slots: u64,
}

impl Default for HeightOneOptions {
    fn default() -> Self {
        HeightOneOptions { factorial_d: false, d_override: None, max_slots: 4_000_000 }
    }
}

/// Everything the construction chooses before gluing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeightOneParameters {
    /// The word actually built; the input with `b` inverted when `swapped`.
    pub word: CyclicWord,
    pub form: HeightOne,
    pub swapped: bool,
    /// `lcm(|q_j|)`, also the number of `P` disks and of `Q` disks.
    pub c: u64,
    pub d: u64,
    /// `pp' - qq'`.
    pub r: u64,
    /// Chosen indices `j ≤ pl` with `|p_j| = 1`, increasing.
    pub a_set: Vec<u64>,
    /// `x_j` for `j = 1..l`.
    pub x: Vec<u64>,
    /// `σ(k)` (1-based block index) for each element of `a_set`, in order.
    pub sigma: Vec<usize>,
    /// Order of the product of the `g_k` over one period.
    pub order: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeightOnePlan {
    pub swapped: bool,
    pub c: u64,
    pub d: u64,
    pub r: u64,
    pub a_set: Vec<u64>,
    pub x: Vec<u64>,
    pub sigma: Vec<usize>,
    /// λ of the surface before the a-edges are glued.
    pub lambda: LambdaMultiset,
    /// Whether the U-decomposition needed two copies of that surface.
    pub doubled: bool,
    /// Offset used for each matched boundary pair.
    pub offsets: Vec<u64>,
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

/// `g_k` on `1..=c` for a target block with `|q| = qs`.
fn g_apply(i: u64, qs: u64) -> u64 {
    if !i.is_multiple_of(qs) {
        i + 1
    } else {
        i + 1 - qs
    }
}

fn period_permutation(c: u64, sigma_q: &[u64]) -> Vec<u64> {
    (1..=c).map(|i| sigma_q.iter().fold(i, |acc, &qs| g_apply(acc, qs))).collect()
}

fn permutation_order(perm: &[u64]) -> u64 {
    let mut seen = vec![false; perm.len()];
    let mut order = 1;
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let (mut len, mut i) = (0, start);
        while !seen[i] {
            seen[i] = true;
            i = (perm[i] - 1) as usize;
            len += 1;
        }
        order = lcm(order, len);
    }
    order
}

fn is_identity_power(perm: &[u64], d: u64) -> bool {
    (1..=perm.len() as u64).all(|i0| {
        let mut i = i0;
        for _ in 0..d % permutation_order(perm).max(1) {
            i = perm[(i - 1) as usize];
        }
        i == i0
    })
}

/// Chooses `A`, `x_j`, `σ`, `c` and `d`.
pub fn height_one_parameters(w: &CyclicWord, opts: &HeightOneOptions) -> Result<HeightOneParameters, ConstructError> {
    let form = crate::invariants::is_simple_height_one(w)
        .ok_or_else(|| ConstructError::NotApplicable("not a simple height-one word".into()))?;
    if !form.condition() {
        return Err(ConstructError::NotApplicable(format!(
            "pp' = {} and qq' = {} against q² = {} and p² = {}",
            form.p * form.p_prime,
            form.q * form.q_prime,
            form.q * form.q,
            form.p * form.p
        )));
    }
    if w.is_proper_power() {
        return Err(ConstructError::NotApplicable("proper power".into()));
    }
    let (word, form, swapped) = if form.p * form.p_prime < form.q * form.q_prime {
        let inv = transform(w, &Relabeling::InvertGenerators(vec![form.b]));
        let f = simple_height_one_with(&inv, form.b).expect("inverting b swaps the blocks");
        (inv, f, true)
    } else {
        (w.clone(), form, false)
    };
    let (p, q, l) = (form.p, form.q, form.l);
    let r = p * form.p_prime - q * form.q_prime;
    let qabs: Vec<u64> = form.q_blocks.iter().map(|&x| x.unsigned_abs() as u64).collect();
    let c = qabs.iter().fold(1, |acc, &x| lcm(acc, x));

    let a_set: Vec<u64> = (1..=p * l as u64)
        .filter(|&j| form.p_blocks[((j - 1) % l as u64) as usize].abs() == 1)
        .take(r as usize)
        .collect();
    let mut x = vec![0u64; l];
    let mut by_capacity: Vec<usize> = (0..l).filter(|&j| qabs[j] != 1).collect();
    by_capacity.sort_by_key(|&j| (std::cmp::Reverse(q * qabs[j]), j));
    let mut rest = r;
    for j in by_capacity {
        x[j] = rest.min(q * qabs[j]);
        rest -= x[j];
    }
    if rest > 0 || a_set.len() as u64 != r {
        return Err(ConstructError::InvalidParameter(format!("cannot distribute r = {r} over the q-blocks")));
    }
    let targets: Vec<usize> = (0..l).flat_map(|j| std::iter::repeat_n(j + 1, x[j] as usize)).collect();
    let sigma = targets;
    let sigma_q: Vec<u64> = sigma.iter().map(|&j| qabs[j - 1]).collect();
    let perm = period_permutation(c, &sigma_q);
    let order = permutation_order(&perm);
    let d = match (opts.d_override, opts.factorial_d) {
        (Some(d), _) => {
            if d == 0 || !is_identity_power(&perm, d) {
                return Err(ConstructError::InvalidParameter(format!("G^{d} is not the identity")));
            }
            d
        }
        (None, true) => (1..=c)
            .try_fold(1u64, |acc, k| acc.checked_mul(k))
            .ok_or(ConstructError::TooLarge { slots: u64::MAX, cap: opts.max_slots })?,
        (None, false) => order,
    };
    let slots = (c as u128) * (d as u128) * ((p + q) as u128) * (word.len() as u128) * 2;
    if slots > opts.max_slots as u128 {
        return Err(ConstructError::TooLarge { slots: slots.min(u64::MAX as u128) as u64, cap: opts.max_slots });
    }
    Ok(HeightOneParameters { word, form, swapped, c, d, r, a_set, x, sigma, order })
}

impl HeightOneParameters {
    /// Disk position of the b-edge after block `j`'s first (`alpha`) or
    /// second (`beta`) a-interval; `j` is 1-based and may exceed `l`.
    fn b_slot(&self, disk: usize, power: u64, j: u64, alpha: bool) -> Slot {
        let f = &self.form;
        let l = f.l as u64;
        let n = self.word.len() as u64;
        let (period, jj) = ((j - 1) / l, ((j - 1) % l) as usize);
        let block_start: u64 =
            (0..jj).map(|t| (f.p_blocks[t].unsigned_abs() + f.q_blocks[t].unsigned_abs()) as u64 + 2).sum();
        let mut within = block_start + f.p_blocks[jj].unsigned_abs() as u64;
        if !alpha {
            within += 1 + f.q_blocks[jj].unsigned_abs() as u64;
        }
        Slot::new(disk, ((f.offset as u64 + period * n + within) % (power * n)) as usize)
    }

    /// The disks `P_1..P_c, Q_1..Q_c` and the b-side-pairing `∼'`.
    pub fn s_prime(&self) -> (Vec<DiskSpec>, SidePairing) {
        let f = &self.form;
        let (c, d, l) = (self.c, self.d, f.l as u64);
        let (pp, qq) = (d * f.p, d * f.q);
        let mut disks = vec![DiskSpec::new(pp as i32); c as usize];
        disks.extend(vec![DiskSpec::new(qq as i32); c as usize]);
        let pl = f.p * l;
        let q_of_target: BTreeMap<u64, u64> =
            self.a_set.iter().zip(&self.sigma).map(|(&k, &j)| (k, f.q_blocks[j - 1].unsigned_abs() as u64)).collect();
        let mut pairs = Vec::new();
        for i in 1..=c {
            let disk = (i - 1) as usize;
            for j in 1..=pp * l {
                let prev = if j == 1 { pp * l } else { j - 1 };
                let target = match q_of_target.get(&((j - 1) % pl + 1)) {
                    Some(&qs) => g_apply(i, qs),
                    None => i,
                };
                pairs.push((self.b_slot(disk, pp, prev, false), self.b_slot((target - 1) as usize, pp, j, true)));
            }
        }
        for i in 1..=c {
            let disk = (c + i - 1) as usize;
            for j in 1..=qq * l {
                pairs.push((self.b_slot(disk, qq, j, true), self.b_slot(disk, qq, j, false)));
            }
        }
        (disks, SidePairing::from_pairs(pairs))
    }
}

/// Simple height-one words with `pp' ≤ q²` and `qq' ≤ p²`.
pub fn construct_height_one(w: &CyclicWord) -> Result<PolygonalityCertificate, ConstructError> {
    construct_height_one_with(w, &HeightOneOptions::default())
}

pub fn construct_height_one_with(
    w: &CyclicWord,
    opts: &HeightOneOptions,
) -> Result<PolygonalityCertificate, ConstructError> {
    let params = height_one_parameters(w, opts)?;
    let word = &params.word;
    let b = params.form.b;
    let (disks, pairing) = params.s_prime();
    let s_prime = build_complex(word, &disks, &pairing)?;
    let lambda = lambda_of(&s_prime, b)?;

    let (disks, pairing, u, doubled) = match u_membership(&lambda)? {
        Some(u) => (disks, pairing, u, false),
        None => {
            let twice = lambda.scaled(2);
            let u = u_membership(&twice)?
                .ok_or_else(|| ConstructError::NotCertified(format!("2λ = {twice} has no U-decomposition")))?;
            let shift = disks.len();
            let mut both = disks.clone();
            both.extend(disks.iter().copied());
            let mut p2 = pairing.clone();
            p2.extend(&pairing.map_slots(|s| Slot::new(s.disk + shift, s.pos)));
            (both, p2, u, true)
        }
    };

    let complex = build_complex(word, &disks, &pairing)?;
    let boundaries = boundary_lambda(&complex, b)?;
    let mut buckets: BTreeMap<_, Vec<usize>> = BTreeMap::new();
    for (k, lb) in boundaries.iter().enumerate().rev() {
        buckets.entry(lb.term.clone()).or_default().push(k);
    }
    let mut glued = pairing;
    let mut offsets = Vec::with_capacity(u.pairs.len());
    for pair in &u.pairs {
        let mut take = |t| {
            buckets
                .get_mut(t)
                .and_then(Vec::pop)
                .ok_or_else(|| ConstructError::NotCertified(format!("no boundary left for {t}")))
        };
        let (x, y) = (take(&pair.first)?, take(&pair.second)?);
        let (bx, by) = (&boundaries[x], &boundaries[y]);
        let m = bx.slots.len();
        let offset = match pair.kind {
            UPairKind::Opposite => 0,
            UPairKind::SameSign { .. } => {
                let py: BTreeSet<usize> = by.b_positions.iter().copied().collect();
                (0..m)
                    .find(|&c| bx.b_positions.iter().all(|&s| !py.contains(&((s + c) % m))))
                    .ok_or_else(|| ConstructError::NotCertified(format!("no offset for {} and {}", bx.term, by.term)))?
            }
        };
        offsets.push(offset as u64);
        for i in 0..m {
            glued.push(bx.slots[i], by.slots[(i + offset) % m]);
        }
    }

    let plan = HeightOnePlan {
        swapped: params.swapped,
        c: params.c,
        d: params.d,
        r: params.r,
        a_set: params.a_set.clone(),
        x: params.x.clone(),
        sigma: params.sigma.clone(),
        lambda,
        doubled,
        offsets,
    };
    let plan = ConstructionPlan::HeightOne(Box::new(plan));
    let mut cert = certified(word, &disks, &glued, plan.clone())?;
    if params.swapped {
        cert = relabel_certificate(&cert, &Relabeling::InvertGenerators(vec![b]))?;
        if !cert.is_polygonal() {
            return Err(ConstructError::NotCertified("relabeled surface failed".into()));
        }
        cert.plan = Some(plan);
    }
    cert.u_certificate = Some(u);
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariants::LambdaTerm;
    use crate::words::parse_cyclic;

    fn cw(text: &str) -> CyclicWord {
        parse_cyclic(text, 2).unwrap()
    }

    #[test]
    fn bs12_parameters() {
        let params = height_one_parameters(&cw("a (a^2)^b"), &HeightOneOptions::default()).unwrap();
        assert_eq!((params.c, params.r, params.d), (2, 1, 2));
        assert_eq!(params.a_set, vec![1]);
        assert_eq!(params.x, vec![1]);
        assert_eq!(params.sigma, vec![1]);
        let (disks, _) = params.s_prime();
        assert_eq!(disks, vec![DiskSpec::new(2), DiskSpec::new(2), DiskSpec::new(4), DiskSpec::new(4)]);
    }

    #[test]
    fn bs12_intermediate_lambda() {
        let params = height_one_parameters(&cw("a (a^2)^b"), &HeightOneOptions::default()).unwrap();
        let (disks, pairing) = params.s_prime();
        // P disks alone
        let p_pairs = SidePairing::from_pairs(pairing.pairs().iter().copied().filter(|(s, _)| s.disk < 2));
        let s = build_complex(&params.word, &disks[..2], &p_pairs).unwrap();
        let mut want = LambdaMultiset::default();
        want.add_term(LambdaTerm::minus(&[1, 1]), 2);
        want.add_term(LambdaTerm::plus(&[2, 2]), 2);
        assert_eq!(lambda_of(&s, 2).unwrap(), want);
        // whole S'
        let s = build_complex(&params.word, &disks, &pairing).unwrap();
        want.add_term(LambdaTerm::minus(&[1, 1, 1, 1]), 2);
        want.add_term(LambdaTerm::plus(&[2]), 8);
        assert_eq!(lambda_of(&s, 2).unwrap(), want);
    }

    #[test]
    fn bs12_polygonal() {
        let cert = construct_height_one(&cw("a (a^2)^b")).unwrap();
        assert!(cert.is_polygonal());
        assert!(cert.verify());
        assert!(cert.u_certificate.is_some());
    }

    #[test]
    fn baumslag_solitar_family() {
        for p in 1..=3 {
            for q in 1..=3 {
                let text = format!("a^{p} (a^{q})^b");
                let cert = construct_height_one(&cw(&text)).unwrap_or_else(|e| panic!("{text}: {e}"));
                assert!(cert.is_polygonal(), "{text}");
            }
        }
    }

    #[test]
    fn mixed_signs() {
        for text in ["a^-1 (a^2)^b", "a^2 (a^-3)^b", "a^-2 (a^-1)^b", "a (a^2)^b a^3 (a)^b"] {
            let cert = construct_height_one(&cw(text)).unwrap_or_else(|e| panic!("{text}: {e}"));
            assert!(cert.is_polygonal(), "{text}");
        }
    }

    #[test]
    fn d_choices() {
        let w = cw("a (a^2)^b a (a^3)^b");
        let base = height_one_parameters(&w, &HeightOneOptions::default()).unwrap();
        for d in [base.order, 2 * base.order] {
            let opts = HeightOneOptions { d_override: Some(d), ..Default::default() };
            let cert = construct_height_one_with(&w, &opts).unwrap();
            assert!(cert.is_polygonal(), "d = {d}");
        }
        if base.order > 1 {
            let opts = HeightOneOptions { d_override: Some(base.order + 1), ..Default::default() };
            assert!(construct_height_one_with(&w, &opts).is_err());
        }
    }

    #[test]
    fn not_applicable() {
        assert!(matches!(construct_height_one(&cw("a^2 b^2")), Err(ConstructError::NotApplicable(_))));
        // pp' = 24 > q² = 9
        let w = cw("a (a)^b a (a)^b a^10 (a)^b");
        assert_eq!(crate::invariants::height_one_condition(&w), Some(false));
        assert!(matches!(construct_height_one(&w), Err(ConstructError::NotApplicable(_))));
    }
}
