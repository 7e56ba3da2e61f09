//! Product-vector constructions from orthogonality inequalities: each event
//! `(a|x)` picks, per site, element `a` of local basis `x`. When no two
//! vectors of different local bases are orthogonal (property (P)), event
//! orthogonality and product-vector orthogonality coincide, optimal
//! inequalities give weakly unextendible sets, and for qubits weak
//! unextendibility promotes to full unextendibility.
//!
//! Numerics are complex double precision with a fixed `1e-10` tolerance on
//! inner products; every orthogonality claim that has a combinatorial
//! counterpart is cross-checked against it exactly.

use alloc::{vec, vec::Vec};
use core::fmt;

use num_complex::Complex;
// Float supplies the f64 math methods on no_std builds.
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::{One, Zero};
use rand::{rngs::SmallRng, Rng, SeedableRng};

use crate::inequalities::LoInequality;
use crate::scenario::Scenario;

pub type C64 = Complex<f64>;

/// Tolerance on numeric inner products.
pub const INNER_TOLERANCE: f64 = 1e-10;

/// Samples drawn by the randomized falsification pass of
/// [`qubit_upb_check`].
pub const FALSIFICATION_SAMPLES: usize = 1_000_000;

#[derive(Clone, PartialEq, Debug)]
pub enum UpbError {
    /// Family shape does not match the scenario (bases or dimension).
    DimensionMismatch,
    /// A supplied basis is not orthonormal within tolerance.
    NotOrthonormal { basis: usize },
    /// Basis 0 must be the standard basis.
    BasisZeroNotStandard,
    /// Two vectors from different bases are orthogonal.
    PropertyPViolated { basis_a: usize, elem_a: usize, basis_b: usize, elem_b: usize },
    /// `qubit_upb_check` requires local dimension two.
    NotQubit,
    /// `qubit_upb_check` requires a weakly unextendible input set.
    NotWeaklyUnextendible,
}

impl fmt::Display for UpbError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UpbError::DimensionMismatch => write!(f, "basis family does not match scenario"),
            UpbError::NotOrthonormal { basis } => write!(f, "basis {basis} is not orthonormal"),
            UpbError::BasisZeroNotStandard => write!(f, "basis 0 must be the standard basis"),
            UpbError::PropertyPViolated { basis_a, elem_a, basis_b, elem_b } => write!(
                f,
                "element {elem_a} of basis {basis_a} is orthogonal to element {elem_b} of basis {basis_b}"
            ),
            UpbError::NotQubit => write!(f, "local dimension must be two"),
            UpbError::NotWeaklyUnextendible => write!(f, "set is not weakly unextendible"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for UpbError {}

/// `m` orthonormal bases of `C^d` with property (P): no element of one
/// basis is orthogonal to an element of another.
#[derive(Clone, Debug)]
pub struct BasisFamily {
    d: usize,
    m: usize,
    /// `bases[j][i]` = element `i` of basis `j`, a length-`d` vector.
    bases: Vec<Vec<Vec<C64>>>,
    /// Local gram matrix, `(m*d) x (m*d)`; same-basis blocks are exact
    /// Kronecker deltas.
    gram: Vec<C64>,
}

fn inner(u: &[C64], v: &[C64]) -> C64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

impl BasisFamily {
    pub fn new(m: usize, d: usize, bases: Vec<Vec<Vec<C64>>>) -> Result<Self, UpbError> {
        if bases.len() != m || d < 2 || m < 1 {
            return Err(UpbError::DimensionMismatch);
        }
        for (j, basis) in bases.iter().enumerate() {
            if basis.len() != d || basis.iter().any(|v| v.len() != d) {
                return Err(UpbError::DimensionMismatch);
            }
            for i in 0..d {
                for i2 in 0..d {
                    let ip = inner(&basis[i], &basis[i2]);
                    let expect = if i == i2 { C64::one() } else { C64::zero() };
                    if (ip - expect).norm() > INNER_TOLERANCE {
                        return Err(UpbError::NotOrthonormal { basis: j });
                    }
                }
            }
        }
        for i in 0..d {
            for k in 0..d {
                let expect = if i == k { 1.0 } else { 0.0 };
                if (bases[0][i][k] - C64::new(expect, 0.0)).norm() > INNER_TOLERANCE {
                    return Err(UpbError::BasisZeroNotStandard);
                }
            }
        }
        // property (P) across distinct bases
        let mut gram = vec![C64::zero(); (m * d) * (m * d)];
        for j in 0..m {
            for i in 0..d {
                for j2 in 0..m {
                    for i2 in 0..d {
                        let val = if j == j2 {
                            // exact within one orthonormal basis
                            if i == i2 {
                                C64::one()
                            } else {
                                C64::zero()
                            }
                        } else {
                            inner(&bases[j][i], &bases[j2][i2])
                        };
                        if j != j2 && val.norm() <= INNER_TOLERANCE {
                            return Err(UpbError::PropertyPViolated {
                                basis_a: j,
                                elem_a: i,
                                basis_b: j2,
                                elem_b: i2,
                            });
                        }
                        gram[(j * d + i) * m * d + (j2 * d + i2)] = val;
                    }
                }
            }
        }
        Ok(BasisFamily { d, m, bases, gram })
    }

    /// Reproducible default family. Basis 0 is standard. For `d = 2`,
    /// basis `j` is the plane rotation by `j` radians, so basis 1 is
    /// `{cos 1 |0> + sin 1 |1>, -sin 1 |0> + cos 1 |1>}`. For `d >= 3`,
    /// basis `j` is the discrete Fourier basis with quadratic phase
    /// offsets proportional to `j`.
    pub fn default_family(m: usize, d: usize) -> Result<Self, UpbError> {
        let mut bases = Vec::with_capacity(m);
        let standard: Vec<Vec<C64>> = (0..d)
            .map(|i| (0..d).map(|k| C64::new(if i == k { 1.0 } else { 0.0 }, 0.0)).collect())
            .collect();
        bases.push(standard);
        for j in 1..m {
            let mut basis = Vec::with_capacity(d);
            if d == 2 {
                let t = j as f64;
                basis.push(vec![C64::new(t.cos(), 0.0), C64::new(t.sin(), 0.0)]);
                basis.push(vec![C64::new(-t.sin(), 0.0), C64::new(t.cos(), 0.0)]);
            } else {
                let root = 1.0 / (d as f64).sqrt();
                for i in 0..d {
                    let mut v = Vec::with_capacity(d);
                    for k in 0..d {
                        let fourier = 2.0 * core::f64::consts::PI * (i * k) as f64 / d as f64;
                        let offset = (j * k * k) as f64;
                        let phase = fourier + offset;
                        v.push(C64::new(root * phase.cos(), root * phase.sin()));
                    }
                    basis.push(v);
                }
            }
            bases.push(basis);
        }
        Self::new(m, d, bases)
    }

    pub fn local_dimension(&self) -> usize {
        self.d
    }

    pub fn basis_count(&self) -> usize {
        self.m
    }

    /// Element `i` of basis `j`.
    pub fn vector(&self, j: usize, i: usize) -> &[C64] {
        &self.bases[j][i]
    }

    /// `<phi_i^j | phi_{i'}^{j'}>`, exact Kronecker delta within a basis.
    pub fn local_inner(&self, j: usize, i: usize, j2: usize, i2: usize) -> C64 {
        self.gram[(j * self.d + i) * self.m * self.d + (j2 * self.d + i2)]
    }
}

/// A family of product vectors given symbolically as per-site
/// `(basis, element)` pairs over a shared [`BasisFamily`].
#[derive(Clone, Debug)]
pub struct ProductVectorSet {
    sites: usize,
    members: Vec<Vec<(u8, u8)>>,
    family: BasisFamily,
}

/// Outcome of the numeric pairwise-orthogonality check.
#[derive(Clone, PartialEq, Debug)]
pub enum GramVerdict {
    Orthogonal,
    /// First offending pair and the modulus of its inner product.
    Pair { first: usize, second: usize, value: f64 },
}

impl ProductVectorSet {
    pub fn new(
        sites: usize,
        members: Vec<Vec<(u8, u8)>>,
        family: BasisFamily,
    ) -> Result<Self, UpbError> {
        for mem in &members {
            if mem.len() != sites
                || mem
                    .iter()
                    .any(|&(j, i)| j as usize >= family.m || i as usize >= family.d)
            {
                return Err(UpbError::DimensionMismatch);
            }
        }
        Ok(ProductVectorSet { sites, members, family })
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Per-site `(basis, element)` pairs of member `k`.
    pub fn member(&self, k: usize) -> &[(u8, u8)] {
        &self.members[k]
    }

    pub fn family(&self) -> &BasisFamily {
        &self.family
    }

    /// Numeric vector of member `k` in the full `d^sites`-dimensional
    /// product space (site-major Kronecker order).
    pub fn member_vector(&self, k: usize) -> Vec<C64> {
        let d = self.family.d;
        let mut out = vec![C64::one()];
        for &(j, i) in &self.members[k] {
            let site = self.family.vector(j as usize, i as usize);
            let mut next = Vec::with_capacity(out.len() * d);
            for amp in &out {
                for s in site {
                    next.push(amp * s);
                }
            }
            out = next;
        }
        out
    }

    /// Inner product of two product vectors: the product of per-site local
    /// inner products.
    fn member_inner(&self, k: usize, k2: usize) -> C64 {
        let mut p = C64::one();
        for (&(j, i), &(j2, i2)) in self.members[k].iter().zip(&self.members[k2]) {
            p *= self.family.local_inner(j as usize, i as usize, j2 as usize, i2 as usize);
        }
        p
    }

    /// True iff the members at `k`, `k2` share a basis with different
    /// elements at some site (the combinatorial orthogonality criterion).
    fn combinatorially_orthogonal(&self, k: usize, k2: usize) -> bool {
        self.members[k]
            .iter()
            .zip(&self.members[k2])
            .any(|(&(j, i), &(j2, i2))| j == j2 && i != i2)
    }
}

/// One product vector per event: the measurement choice picks the local
/// basis, the outcome picks the element.
pub fn vectors_from_inequality(
    i: &LoInequality,
    family: &BasisFamily,
) -> Result<ProductVectorSet, UpbError> {
    let s: &Scenario = i.scenario();
    if family.m != s.settings() || family.d != s.outcomes() {
        return Err(UpbError::DimensionMismatch);
    }
    let members = i
        .events()
        .iter()
        .map(|e| {
            e.settings
                .iter()
                .zip(&e.outcomes)
                .map(|(&x, &a)| (x, a))
                .collect()
        })
        .collect();
    ProductVectorSet::new(s.parties(), members, family.clone())
}

/// Pairwise orthogonality of the set, numerically; agreement with the
/// combinatorial criterion is asserted.
pub fn gram_orthogonality(pvs: &ProductVectorSet) -> GramVerdict {
    for k in 0..pvs.len() {
        for k2 in k + 1..pvs.len() {
            let value = pvs.member_inner(k, k2).norm();
            let numeric = value <= INNER_TOLERANCE;
            let combinatorial = pvs.combinatorially_orthogonal(k, k2);
            assert_eq!(
                numeric, combinatorial,
                "orthogonality criteria disagree on members {k}, {k2}"
            );
            if !numeric {
                return GramVerdict::Pair { first: k, second: k2, value };
            }
        }
    }
    GramVerdict::Orthogonal
}

/// True iff no product vector with all components drawn from the family's
/// bases is orthogonal to every member (exhaustive search over the
/// `(m d)^sites` symbolic candidates).
pub fn weak_unextendible(pvs: &ProductVectorSet) -> bool {
    let m = pvs.family.m;
    let d = pvs.family.d;
    let sites = pvs.sites;
    let total = (m * d).pow(sites as u32);
    let mut cand = vec![(0u8, 0u8); sites];
    for code in 0..total {
        let mut rest = code;
        for c in cand.iter_mut().rev() {
            let digit = rest % (m * d);
            rest /= m * d;
            *c = ((digit / d) as u8, (digit % d) as u8);
        }
        // orthogonal to a member iff some site shares the basis with a
        // different element (property (P) rules everything else out)
        let extends = pvs.members.iter().all(|mem| {
            mem.iter()
                .zip(&cand)
                .any(|(&(j, i), &(j2, i2))| j == j2 && i != i2)
        });
        if extends {
            return false;
        }
    }
    true
}

/// For qubit sites every weakly unextendible set is fully unextendible: a
/// hypothetical orthogonal product vector can be pushed into the bases
/// site by site. The claim is cross-validated by a seeded randomized
/// search for counterexamples; a hit would be a library bug and panics.
pub fn qubit_upb_check(pvs: &ProductVectorSet, seed: u64) -> Result<bool, UpbError> {
    if pvs.family.d != 2 {
        return Err(UpbError::NotQubit);
    }
    if !weak_unextendible(pvs) {
        return Err(UpbError::NotWeaklyUnextendible);
    }
    let mut rng = SmallRng::seed_from_u64(seed);
    let sites = pvs.sites;
    // precompute member site vectors
    let mut site_vecs: Vec<Vec<&[C64]>> = Vec::with_capacity(pvs.len());
    for mem in &pvs.members {
        site_vecs.push(
            mem.iter()
                .map(|&(j, i)| pvs.family.vector(j as usize, i as usize))
                .collect(),
        );
    }
    let mut cand: Vec<[C64; 2]> = vec![[C64::zero(); 2]; sites];
    for _ in 0..FALSIFICATION_SAMPLES {
        for c in cand.iter_mut() {
            // uniform pure qubit state
            let theta: f64 = rng.gen_range(0.0..core::f64::consts::PI);
            let phi: f64 = rng.gen_range(0.0..2.0 * core::f64::consts::PI);
            c[0] = C64::new((theta / 2.0).cos(), 0.0);
            c[1] = C64::new(phi.cos(), phi.sin()) * (theta / 2.0).sin();
        }
        let orthogonal_to_all = site_vecs.iter().all(|mem| {
            let mut p = C64::one();
            for (site, v) in mem.iter().enumerate() {
                p *= cand[site][0].conj() * v[0] + cand[site][1].conj() * v[1];
                if p.norm() <= INNER_TOLERANCE {
                    return true;
                }
            }
            p.norm() <= INNER_TOLERANCE
        });
        assert!(
            !orthogonal_to_all || pvs.is_empty() || pvs.len() == 0,
            "randomized search found an orthogonal product vector for a weak qubit UPB"
        );
    }
    Ok(true)
}

/// Orthonormal basis of the orthogonal complement of `span(rows)` in `C^d`,
/// by projecting the standard basis off a Gram-Schmidt basis of the span.
fn null_space(rows: &[&[C64]], d: usize) -> Vec<Vec<C64>> {
    let mut q: Vec<Vec<C64>> = Vec::new();
    for r in rows {
        let mut v: Vec<C64> = r.to_vec();
        for u in &q {
            let c = inner(u, &v);
            for (vi, ui) in v.iter_mut().zip(u) {
                *vi -= c * ui;
            }
        }
        let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-9 {
            for vi in v.iter_mut() {
                *vi /= norm;
            }
            q.push(v);
        }
    }
    let mut out = Vec::new();
    for k in 0..d {
        let mut v = vec![C64::zero(); d];
        v[k] = C64::one();
        for u in q.iter().chain(&out) {
            let c = inner(u, &v);
            for (vi, ui) in v.iter_mut().zip(u) {
                *vi -= c * ui;
            }
        }
        let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-9 {
            for vi in v.iter_mut() {
                *vi /= norm;
            }
            out.push(v);
        }
    }
    out
}

/// Search the structured candidate family for a product vector orthogonal
/// to every member: per site, the orthocomplement vectors of the spans of
/// up to `d-1` basis elements (all subsets across all bases). Returns a
/// certified vector (all inner products within tolerance) or `None`;
/// absence from this family is not a proof of unextendibility for `d >= 3`.
pub fn find_orthogonal_product_vector(pvs: &ProductVectorSet) -> Option<Vec<Vec<C64>>> {
    let d = pvs.family.d;
    let m = pvs.family.m;
    let sites = pvs.sites;
    let all: Vec<&[C64]> = (0..m)
        .flat_map(|j| (0..d).map(move |i| pvs.family.vector(j, i)))
        .collect();
    // candidate vectors per site (same family at every site)
    let mut candidates: Vec<Vec<C64>> = Vec::new();
    let subsets = 1usize << all.len();
    for mask in 1..subsets {
        if (mask as u32).count_ones() as usize > d - 1 {
            continue;
        }
        let rows: Vec<&[C64]> = (0..all.len()).filter(|k| mask >> k & 1 == 1).map(|k| all[k]).collect();
        candidates.extend(null_space(&rows, d));
    }
    if candidates.is_empty() {
        return None;
    }
    // inner products of candidates against all basis elements
    let ip: Vec<Vec<C64>> = candidates
        .iter()
        .map(|c| all.iter().map(|v| inner(c, v)).collect())
        .collect();
    let mut pick = vec![0usize; sites];
    loop {
        let certified = pvs.members.iter().all(|mem| {
            let mut p = C64::one();
            for (site, &(j, i)) in mem.iter().enumerate() {
                p *= ip[pick[site]][j as usize * d + i as usize];
            }
            p.norm() <= INNER_TOLERANCE
        });
        if certified {
            return Some(pick.iter().map(|&k| candidates[k].clone()).collect());
        }
        let mut s = sites;
        loop {
            if s == 0 {
                return None;
            }
            s -= 1;
            if pick[s] + 1 < candidates.len() {
                pick[s] += 1;
                for p in pick.iter_mut().skip(s + 1) {
                    *p = 0;
                }
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::Event;

    fn gyni() -> LoInequality {
        let s = Scenario::new(3, 2, 2).unwrap();
        let terms = [
            ([0u8, 0, 0], [0u8, 0, 0]),
            ([1, 1, 0], [0, 1, 1]),
            ([0, 1, 1], [1, 0, 1]),
            ([1, 0, 1], [1, 1, 0]),
        ];
        LoInequality::from_events(
            s,
            terms.iter().map(|(a, x)| Event::new(a.to_vec(), x.to_vec())).collect(),
        )
        .unwrap()
    }

    #[test]
    fn default_families_satisfy_property_p() {
        for (m, d) in [(2, 2), (3, 2), (2, 3), (2, 4)] {
            let fam = BasisFamily::default_family(m, d).unwrap();
            assert_eq!(fam.basis_count(), m);
            assert_eq!(fam.local_dimension(), d);
        }
    }

    #[test]
    fn gyni_maps_to_the_shifts_set() {
        let fam = BasisFamily::default_family(2, 2).unwrap();
        let pvs = vectors_from_inequality(&gyni(), &fam).unwrap();
        // |000>, |1 e_perp e>, |e 1 e_perp>, |e_perp e 1>
        let expected: Vec<Vec<(u8, u8)>> = vec![
            vec![(0, 0), (0, 0), (0, 0)],
            vec![(0, 1), (1, 1), (1, 0)],
            vec![(1, 0), (0, 1), (1, 1)],
            vec![(1, 1), (1, 0), (0, 1)],
        ];
        let members: Vec<Vec<(u8, u8)>> =
            (0..pvs.len()).map(|k| pvs.member(k).to_vec()).collect();
        assert_eq!(members, expected);
        assert_eq!(gram_orthogonality(&pvs), GramVerdict::Orthogonal);
        assert!(weak_unextendible(&pvs));
        assert!(qubit_upb_check(&pvs, 1).unwrap());
        assert!(find_orthogonal_product_vector(&pvs).is_none());
    }

    #[test]
    fn non_orthogonal_pair_is_reported() {
        let fam = BasisFamily::default_family(2, 2).unwrap();
        // |00> and |0e>: first sites equal, second sites non-orthogonal
        let pvs = ProductVectorSet::new(
            2,
            vec![vec![(0, 0), (0, 0)], vec![(0, 0), (1, 0)]],
            fam,
        )
        .unwrap();
        match gram_orthogonality(&pvs) {
            GramVerdict::Pair { first: 0, second: 1, value } => assert!(value > INNER_TOLERANCE),
            v => panic!("expected a pair, got {v:?}"),
        }
    }

    #[test]
    fn non_maximal_clique_gives_extendible_set() {
        // the 5-term two-PR-copy inequality is not maximal, so its vector
        // set must be extendible within the bases
        let s = Scenario::new(4, 2, 2).unwrap();
        let terms = [
            ([0u8, 0, 0, 0], [0u8, 0, 0, 0]),
            ([1, 1, 1, 0], [0, 0, 1, 1]),
            ([0, 0, 1, 1], [0, 1, 1, 0]),
            ([1, 1, 0, 1], [1, 0, 1, 1]),
            ([0, 1, 1, 1], [1, 1, 0, 1]),
        ];
        let ineq = LoInequality::from_events(
            s,
            terms.iter().map(|(a, x)| Event::new(a.to_vec(), x.to_vec())).collect(),
        )
        .unwrap();
        let fam = BasisFamily::default_family(2, 2).unwrap();
        let pvs = vectors_from_inequality(&ineq, &fam).unwrap();
        assert_eq!(gram_orthogonality(&pvs), GramVerdict::Orthogonal);
        assert!(!weak_unextendible(&pvs));
    }

    #[test]
    fn complete_basis_is_vacuously_unextendible() {
        let fam = BasisFamily::default_family(2, 2).unwrap();
        let mut members = Vec::new();
        for a in 0..2u8 {
            for b in 0..2u8 {
                members.push(vec![(0u8, a), (0u8, b)]);
            }
        }
        let pvs = ProductVectorSet::new(2, members, fam).unwrap();
        assert!(weak_unextendible(&pvs));
        assert!(qubit_upb_check(&pvs, 2).unwrap());
    }

    #[test]
    fn empty_set_yields_the_first_candidate() {
        let fam = BasisFamily::default_family(2, 2).unwrap();
        let pvs = ProductVectorSet::new(2, Vec::new(), fam).unwrap();
        assert!(find_orthogonal_product_vector(&pvs).is_some());
    }

    #[test]
    fn qutrit_weak_upb_is_not_a_upb() {
        // the 12-term three-qutrit inequality; its product-vector set is
        // weakly unextendible yet admits an orthogonal product vector
        let s = Scenario::new(3, 2, 3).unwrap();
        let rows = [
            "000|000", "001|000", "002|110", "010|000", "011|000", "012|110",
            "102|110", "112|110", "120|011", "220|011", "221|101", "222|101",
        ];
        let events: Vec<Event> = rows
            .iter()
            .map(|r| {
                let (a, x) = r.split_once('|').unwrap();
                Event::new(
                    a.bytes().map(|b| b - b'0').collect(),
                    x.bytes().map(|b| b - b'0').collect(),
                )
            })
            .collect();
        let ineq = LoInequality::from_events(s, events).unwrap();
        let fam = BasisFamily::default_family(2, 3).unwrap();
        let pvs = vectors_from_inequality(&ineq, &fam).unwrap();
        assert_eq!(pvs.len(), 12);
        assert_eq!(gram_orthogonality(&pvs), GramVerdict::Orthogonal);
        assert!(weak_unextendible(&pvs));
        let found = find_orthogonal_product_vector(&pvs).expect("orthogonal product vector");
        // certify against the full member vectors too
        for k in 0..pvs.len() {
            let mem = pvs.member_vector(k);
            let mut full = vec![C64::one()];
            for site in &found {
                let mut next = Vec::with_capacity(full.len() * 3);
                for amp in &full {
                    for s in site {
                        next.push(amp * s);
                    }
                }
                full = next;
            }
            let ip: C64 = full.iter().zip(&mem).map(|(a, b)| a.conj() * b).sum();
            assert!(ip.norm() <= INNER_TOLERANCE);
        }
    }
}
