//! The graded Fedosov algebra: formal sums of canonical terms
//!
//! ```text
//!   c · dx^{i1}∨…∨dx^{is} ⊗ e^{A1}∧…∧e^{Ad} ⊗ dx^{j1}∧…∧dx^{ja} · ħ^t
//! ```
//!
//! with a complex rational-function coefficient `c`. The symmetric
//! factor is a multiset (stored sorted), the two wedge factors are
//! strictly increasing index words (reordering signs are absorbed into
//! the coefficient). Four degrees live on a term — symmetric degree
//! `s`, Grassmann degree `d`, antisymmetric degree `a` and the ħ-power
//! `t` — and the total degree is `Deg = 2t + s + d`.
//!
//! Supercommutativity of the undeformed product reads
//! `G·F = (−1)^{d1·d2 + a1·a2} F·G`; no graded sign couples the
//! Grassmann factor with the antisymmetric factor.
//!
//! Elements are canonical by construction: no duplicate term keys, no
//! zero coefficients, deterministic term order. Two elements are equal
//! iff their representations are equal.

pub mod display;
pub mod ops;
pub mod sections;

use crate::scalar::CScalar;
use std::collections::BTreeMap;

/// 1-based coordinate or frame index.
pub type Idx = u8;

/// Sort a wedge word into strictly increasing order.
///
/// Returns `None` when an index repeats (the word vanishes), otherwise
/// the sorted word together with `true` when the permutation is odd.
pub fn sort_wedge(word: &[Idx]) -> Option<(Vec<Idx>, bool)> {
    let mut v = word.to_vec();
    let mut swaps = 0usize;
    // Insertion sort, counting inversions.
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            swaps += 1;
            j -= 1;
        }
    }
    for w in v.windows(2) {
        if w[0] == w[1] {
            return None;
        }
    }
    Some((v, swaps % 2 == 1))
}

/// Wedge-merge two strictly increasing words. `None` when they share
/// an index; the sign counts the transpositions needed to interleave.
pub fn merge_wedge(a: &[Idx], b: &[Idx]) -> Option<(Vec<Idx>, bool)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let mut inversions = 0usize;
    let (mut i, mut j) = (0usize, 0usize);
    while i < a.len() && j < b.len() {
        if a[i] == b[j] {
            return None;
        }
        if a[i] < b[j] {
            out.push(a[i]);
            i += 1;
        } else {
            // b[j] jumps over the remaining entries of a.
            inversions += a.len() - i;
            out.push(b[j]);
            j += 1;
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    Some((out, inversions % 2 == 1))
}

/// Merge two sorted multisets (the symmetric factor carries no sign).
pub fn merge_multiset(a: &[Idx], b: &[Idx]) -> Vec<Idx> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0usize, 0usize);
    while i < a.len() && j < b.len() {
        if a[i] <= b[j] {
            out.push(a[i]);
            i += 1;
        } else {
            out.push(b[j]);
            j += 1;
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// The basis data of a term; the canonical order is
/// `(t, s, d, a, sym, gra, asym)` lexicographically.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TermKey {
    pub hpow: u32,
    pub sym: Vec<Idx>,
    pub gra: Vec<Idx>,
    pub asym: Vec<Idx>,
}

impl TermKey {
    pub fn scalar() -> Self {
        TermKey {
            hpow: 0,
            sym: Vec::new(),
            gra: Vec::new(),
            asym: Vec::new(),
        }
    }

    pub fn deg_s(&self) -> u32 {
        self.sym.len() as u32
    }

    pub fn deg_e(&self) -> u32 {
        self.gra.len() as u32
    }

    pub fn deg_a(&self) -> u32 {
        self.asym.len() as u32
    }

    pub fn deg_h(&self) -> u32 {
        self.hpow
    }

    /// Total degree `2t + s + d`.
    pub fn total_deg(&self) -> u32 {
        2 * self.hpow + self.deg_s() + self.deg_e()
    }
}

impl Ord for TermKey {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.hpow, self.sym.len(), self.gra.len(), self.asym.len())
            .cmp(&(other.hpow, other.sym.len(), other.gra.len(), other.asym.len()))
            .then_with(|| self.sym.cmp(&other.sym))
            .then_with(|| self.gra.cmp(&other.gra))
            .then_with(|| self.asym.cmp(&other.asym))
    }
}

impl PartialOrd for TermKey {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Which degree map to apply.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DegreeKind {
    Sym,
    Grassmann,
    Antisym,
    Hbar,
    Total,
}

/// A finite element of the Fedosov algebra in canonical form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraElement {
    nvars: usize,
    terms: BTreeMap<TermKey, CScalar>,
}

impl AlgebraElement {
    pub fn zero(nvars: usize) -> Self {
        AlgebraElement {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::from_cscalar(CScalar::one(nvars))
    }

    /// Embed a scalar as the coefficient of the empty term.
    pub fn from_cscalar(c: CScalar) -> Self {
        let nvars = c.nvars();
        let mut el = AlgebraElement::zero(nvars);
        el.add_term(TermKey::scalar(), c);
        el
    }

    /// Build a term from raw index words; wedge words may arrive
    /// unsorted and their reordering sign is folded into the
    /// coefficient. Repeated wedge indices make the term vanish.
    pub fn from_raw_term(
        coeff: CScalar,
        sym: &[Idx],
        gra: &[Idx],
        asym: &[Idx],
        hpow: u32,
    ) -> Self {
        let nvars = coeff.nvars();
        let mut el = AlgebraElement::zero(nvars);
        let Some((gra, gneg)) = sort_wedge(gra) else {
            return el;
        };
        let Some((asym, aneg)) = sort_wedge(asym) else {
            return el;
        };
        let mut sym = sym.to_vec();
        sym.sort_unstable();
        let coeff = if gneg != aneg { coeff.neg() } else { coeff };
        el.add_term(
            TermKey {
                hpow,
                sym,
                gra,
                asym,
            },
            coeff,
        );
        el
    }

    /// The basis 1-form `dx^i` in the symmetric slot.
    pub fn sym_coord(i: Idx, nvars: usize) -> Self {
        Self::from_raw_term(CScalar::one(nvars), &[i], &[], &[], 0)
    }

    /// The frame covector `e^A`.
    pub fn frame_covector(a: Idx, nvars: usize) -> Self {
        Self::from_raw_term(CScalar::one(nvars), &[], &[a], &[], 0)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&TermKey, &CScalar)> {
        self.terms.iter()
    }

    pub fn coeff_of(&self, key: &TermKey) -> Option<&CScalar> {
        self.terms.get(key)
    }

    /// Merge a term into the element, dropping it if the sum vanishes.
    pub fn add_term(&mut self, key: TermKey, coeff: CScalar) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().add(&coeff);
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &AlgebraElement) -> AlgebraElement {
        assert_eq!(self.nvars, other.nvars, "chart mismatch");
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), c.clone());
        }
        out
    }

    pub fn add_assign(&mut self, other: &AlgebraElement) {
        assert_eq!(self.nvars, other.nvars, "chart mismatch");
        for (k, c) in &other.terms {
            self.add_term(k.clone(), c.clone());
        }
    }

    pub fn neg(&self) -> AlgebraElement {
        self.map_coeffs(|c| c.neg())
    }

    pub fn sub(&self, other: &AlgebraElement) -> AlgebraElement {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &CScalar) -> AlgebraElement {
        if c.is_zero() {
            return AlgebraElement::zero(self.nvars);
        }
        self.map_coeffs(|x| x.mul(c))
    }

    pub fn scale_int(&self, k: i64) -> AlgebraElement {
        if k == 0 {
            return AlgebraElement::zero(self.nvars);
        }
        self.map_coeffs(|x| x.scale_int(k))
    }

    fn map_coeffs(&self, f: impl Fn(&CScalar) -> CScalar) -> AlgebraElement {
        let mut out = AlgebraElement::zero(self.nvars);
        for (k, c) in &self.terms {
            out.add_term(k.clone(), f(c));
        }
        out
    }

    /// The undeformed (pointwise, supercommutative) product.
    pub fn mul(&self, other: &AlgebraElement) -> AlgebraElement {
        assert_eq!(self.nvars, other.nvars, "chart mismatch");
        let mut out = AlgebraElement::zero(self.nvars);
        for (k1, c1) in &self.terms {
            for (k2, c2) in &other.terms {
                let Some((gra, gneg)) = merge_wedge(&k1.gra, &k2.gra) else {
                    continue;
                };
                let Some((asym, aneg)) = merge_wedge(&k1.asym, &k2.asym) else {
                    continue;
                };
                let mut c = c1.mul(c2);
                if gneg != aneg {
                    c = c.neg();
                }
                out.add_term(
                    TermKey {
                        hpow: k1.hpow + k2.hpow,
                        sym: merge_multiset(&k1.sym, &k2.sym),
                        gra,
                        asym,
                    },
                    c,
                );
            }
        }
        out
    }

    pub fn pow_mul(&self, e: u32) -> AlgebraElement {
        let mut out = AlgebraElement::one(self.nvars);
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// Apply a degree map: each term is scaled by its eigenvalue.
    pub fn apply_degree(&self, which: DegreeKind) -> AlgebraElement {
        self.map_terms(|k, c| {
            let eig = match which {
                DegreeKind::Sym => k.deg_s(),
                DegreeKind::Grassmann => k.deg_e(),
                DegreeKind::Antisym => k.deg_a(),
                DegreeKind::Hbar => k.deg_h(),
                DegreeKind::Total => k.total_deg(),
            };
            (k.clone(), c.scale_int(eig as i64))
        })
    }

    /// `P_E = (−1)^{deg_E}` termwise.
    pub fn parity_e(&self) -> AlgebraElement {
        self.map_terms(|k, c| {
            let c = if k.deg_e() % 2 == 1 { c.neg() } else { c.clone() };
            (k.clone(), c)
        })
    }

    /// `P_ħ = (−1)^{deg_ħ}` termwise.
    pub fn parity_h(&self) -> AlgebraElement {
        self.map_terms(|k, c| {
            let c = if k.hpow % 2 == 1 { c.neg() } else { c.clone() };
            (k.clone(), c)
        })
    }

    /// Complex conjugation of the coefficients (ħ is treated as real).
    pub fn conjugate(&self) -> AlgebraElement {
        self.map_terms(|k, c| (k.clone(), c.conj()))
    }

    /// Whether every coefficient is real, i.e. `C(F) = F`.
    pub fn is_real(&self) -> bool {
        self.terms.values().all(|c| c.is_real())
    }

    pub fn map_terms(
        &self,
        f: impl Fn(&TermKey, &CScalar) -> (TermKey, CScalar),
    ) -> AlgebraElement {
        let mut out = AlgebraElement::zero(self.nvars);
        for (k, c) in &self.terms {
            let (k2, c2) = f(k, c);
            out.add_term(k2, c2);
        }
        out
    }

    /// Keep exactly the terms satisfying the predicate.
    pub fn filter(&self, pred: impl Fn(&TermKey) -> bool) -> AlgebraElement {
        let mut out = AlgebraElement::zero(self.nvars);
        for (k, c) in &self.terms {
            if pred(k) {
                out.add_term(k.clone(), c.clone());
            }
        }
        out
    }

    /// The component of total degree `k`.
    pub fn total_deg_component(&self, k: u32) -> AlgebraElement {
        self.filter(|t| t.total_deg() == k)
    }

    /// Drop terms of total degree above `k`.
    pub fn truncate_total_deg(&self, k: u32) -> AlgebraElement {
        self.filter(|t| t.total_deg() <= k)
    }

    /// Drop terms of ħ-power above `t`.
    pub fn truncate_hpow(&self, t: u32) -> AlgebraElement {
        self.filter(|t_| t_.hpow <= t)
    }

    pub fn max_total_deg(&self) -> u32 {
        self.terms.keys().map(|k| k.total_deg()).max().unwrap_or(0)
    }

    pub fn max_hpow(&self) -> u32 {
        self.terms.keys().map(|k| k.hpow).max().unwrap_or(0)
    }

    /// Whether the element lies in `C₀`: no symmetric or antisymmetric
    /// factor and no ħ-power.
    pub fn is_c0(&self) -> bool {
        self.terms
            .keys()
            .all(|k| k.sym.is_empty() && k.asym.is_empty() && k.hpow == 0)
    }

    /// Whether the element lies in `C = C₀[[ħ]]` (arbitrary ħ-powers).
    pub fn is_c(&self) -> bool {
        self.terms
            .keys()
            .all(|k| k.sym.is_empty() && k.asym.is_empty())
    }

    /// Split into the four `(deg_E mod 2, deg_a mod 2)` parity sectors;
    /// indexed `[d % 2][a % 2]`.
    pub fn parity_sectors(&self) -> [[AlgebraElement; 2]; 2] {
        let mut out = [
            [AlgebraElement::zero(self.nvars), AlgebraElement::zero(self.nvars)],
            [AlgebraElement::zero(self.nvars), AlgebraElement::zero(self.nvars)],
        ];
        for (k, c) in &self.terms {
            out[(k.deg_e() % 2) as usize][(k.deg_a() % 2) as usize]
                .add_term(k.clone(), c.clone());
        }
        out
    }

    /// Shift every term's ħ-power by `t` (multiplication by `ħ^t`).
    pub fn mul_hbar_pow(&self, t: u32) -> AlgebraElement {
        self.map_terms(|k, c| {
            (
                TermKey {
                    hpow: k.hpow + t,
                    sym: k.sym.clone(),
                    gra: k.gra.clone(),
                    asym: k.asym.clone(),
                },
                c.clone(),
            )
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::RationalExpr;

    fn one() -> CScalar {
        CScalar::one(2)
    }

    fn dx(i: Idx) -> AlgebraElement {
        AlgebraElement::sym_coord(i, 2)
    }

    fn e(a: Idx) -> AlgebraElement {
        AlgebraElement::frame_covector(a, 2)
    }

    fn da(i: Idx) -> AlgebraElement {
        AlgebraElement::from_raw_term(one(), &[], &[], &[i], 0)
    }

    #[test]
    fn wedge_sort_signs() {
        assert_eq!(sort_wedge(&[2, 1]), Some((vec![1, 2], true)));
        assert_eq!(sort_wedge(&[1, 2, 3]), Some((vec![1, 2, 3], false)));
        assert_eq!(sort_wedge(&[3, 1, 2]), Some((vec![1, 2, 3], false)));
        assert_eq!(sort_wedge(&[1, 1]), None);
    }

    #[test]
    fn symmetric_square_is_kept() {
        let p = dx(1).mul(&dx(1));
        assert_eq!(p.num_terms(), 1);
        let (k, c) = p.terms().next().unwrap();
        assert_eq!(k.sym, vec![1, 1]);
        assert_eq!(c, &one());
    }

    #[test]
    fn grassmann_nilpotency() {
        assert!(e(1).mul(&e(1)).is_zero());
    }

    #[test]
    fn mixed_reordering_sign() {
        // (1⊗e¹⊗dx²)·(1⊗e²⊗dx¹) = −(1⊗e¹∧e²⊗dx¹∧dx²):
        // the Grassmann merge e¹,e² is even, the antisymmetric merge
        // dx²,dx¹ is odd, and no cross sign couples the two factors.
        let f = AlgebraElement::from_raw_term(one(), &[], &[1], &[2], 0);
        let g = AlgebraElement::from_raw_term(one(), &[], &[2], &[1], 0);
        let expect = AlgebraElement::from_raw_term(one().neg(), &[], &[1, 2], &[1, 2], 0);
        assert_eq!(f.mul(&g), expect);
    }

    #[test]
    fn supercommutativity_sign() {
        // GF = (−1)^{d1 d2 + a1 a2} FG on factorized terms.
        let cases: Vec<AlgebraElement> = vec![
            dx(1),
            e(1),
            e(2),
            da(1),
            e(1).mul(&da(2)),
            dx(2).mul(&e(2)),
            e(1).mul(&e(2)),
        ];
        for f in &cases {
            for g in &cases {
                let (kf, _) = f.terms().next().unwrap();
                let (kg, _) = g.terms().next().unwrap();
                let sign = (kf.deg_e() * kg.deg_e() + kf.deg_a() * kg.deg_a()) % 2;
                let gf = g.mul(f);
                let fg = f.mul(g);
                let rhs = if sign == 1 { fg.neg() } else { fg };
                assert_eq!(gf, rhs);
            }
        }
    }

    #[test]
    fn total_degree_weights_hbar_twice() {
        let t = dx(1).mul(&e(1)).mul_hbar_pow(1);
        let deg = t.apply_degree(DegreeKind::Total);
        assert_eq!(deg, t.scale_int(4));
    }

    #[test]
    fn canonical_insertion_order_independent() {
        let c = CScalar::from_real(RationalExpr::coord(0, 2));
        let mut a = AlgebraElement::zero(2);
        a.add_assign(&AlgebraElement::from_raw_term(c.clone(), &[2, 1], &[2, 1], &[], 1));
        a.add_assign(&AlgebraElement::from_raw_term(one(), &[], &[], &[1], 0));
        let mut b = AlgebraElement::zero(2);
        b.add_assign(&AlgebraElement::from_raw_term(one(), &[], &[], &[1], 0));
        b.add_assign(&AlgebraElement::from_raw_term(c.neg(), &[1, 2], &[1, 2], &[], 1));
        assert_eq!(a, b);
    }

    #[test]
    fn parities_are_involutive_automorphisms() {
        let f = dx(1).mul(&e(1)).add(&e(2).mul(&da(1)).mul_hbar_pow(1));
        let g = e(1).add(&dx(2));
        assert_eq!(f.parity_e().parity_e(), f);
        assert_eq!(f.parity_h().parity_h(), f);
        assert_eq!(f.mul(&g).parity_e(), f.parity_e().mul(&g.parity_e()));
        assert_eq!(f.mul(&g).parity_h(), f.parity_h().mul(&g.parity_h()));
    }
}
