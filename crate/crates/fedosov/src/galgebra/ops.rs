//! Insertion operators and the δ-machinery.
//!
//! Sign conventions on a canonical term (fixed once here, verified by
//! the identity suite):
//!
//! * `i_s(∂_i)` — symmetric substitution, an even derivation: removes
//!   one copy of `i` from the symmetric factor and multiplies by its
//!   multiplicity. No sign.
//! * `i(e_A)` — left interior product on the Grassmann factor, a
//!   superderivation of type `(−1, 0)`: if `A` sits at position `p`
//!   (0-based) the sign is `(−1)^p`.
//! * `j(e_A) = P_E ∘ i(e_A)` — the right interior product: sign
//!   `(−1)^{p + d − 1}` where `d` is the Grassmann degree before
//!   removal.
//! * `i_a(∂_i)` — interior product on the antisymmetric factor, type
//!   `(+1, −1)`: sign `(−1)^p` within that factor alone (the Grassmann
//!   factor contributes no crossing sign).
//! * `δ` moves one symmetric index into the antisymmetric slot,
//!   `δ* ` moves one antisymmetric index into the symmetric slot;
//!   together `δδ* + δ*δ = deg_s + deg_a`, which pins the multiset
//!   normalization (`∨` is plain concatenation, the multiplicity
//!   factor lives in `i_s`).

use super::{AlgebraElement, Idx, TermKey};
use crate::scalar::CScalar;
use num_bigint::BigInt;
use num_rational::BigRational;

/// Which insertion operator to apply.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Insertion {
    /// `i_s(∂_i)` — symmetric substitution.
    SymVector(Idx),
    /// `i(e_A)` — left interior product on the Grassmann factor.
    FrameLeft(Idx),
    /// `j(e_A) = P_E i(e_A)` — right interior product.
    FrameRight(Idx),
    /// `i_a(∂_i)` — interior product on the antisymmetric factor.
    AsymVector(Idx),
}

/// Apply one insertion operator.
pub fn insert(f: &AlgebraElement, op: Insertion) -> AlgebraElement {
    let mut out = AlgebraElement::zero(f.nvars());
    for (k, c) in f.terms() {
        match op {
            Insertion::SymVector(i) => {
                let mult = k.sym.iter().filter(|&&x| x == i).count();
                if mult == 0 {
                    continue;
                }
                let mut sym = k.sym.clone();
                let pos = sym.iter().position(|&x| x == i).unwrap();
                sym.remove(pos);
                out.add_term(
                    TermKey {
                        hpow: k.hpow,
                        sym,
                        gra: k.gra.clone(),
                        asym: k.asym.clone(),
                    },
                    c.scale_int(mult as i64),
                );
            }
            Insertion::FrameLeft(a) | Insertion::FrameRight(a) => {
                let Some(pos) = k.gra.iter().position(|&x| x == a) else {
                    continue;
                };
                let mut gra = k.gra.clone();
                gra.remove(pos);
                let mut sign_odd = pos % 2 == 1;
                if matches!(op, Insertion::FrameRight(_)) {
                    // extra P_E on the lowered degree d − 1
                    sign_odd ^= (k.gra.len() - 1) % 2 == 1;
                }
                let coeff = if sign_odd { c.neg() } else { c.clone() };
                out.add_term(
                    TermKey {
                        hpow: k.hpow,
                        sym: k.sym.clone(),
                        gra,
                        asym: k.asym.clone(),
                    },
                    coeff,
                );
            }
            Insertion::AsymVector(i) => {
                let Some(pos) = k.asym.iter().position(|&x| x == i) else {
                    continue;
                };
                let mut asym = k.asym.clone();
                asym.remove(pos);
                let coeff = if pos % 2 == 1 { c.neg() } else { c.clone() };
                out.add_term(
                    TermKey {
                        hpow: k.hpow,
                        sym: k.sym.clone(),
                        gra: k.gra.clone(),
                        asym,
                    },
                    coeff,
                );
            }
        }
    }
    out
}

/// `δ`: for every distinct symmetric index `i`, remove one copy (with
/// multiplicity) and wedge `dx^i` onto the antisymmetric factor from
/// the left.
pub fn delta(f: &AlgebraElement) -> AlgebraElement {
    let mut out = AlgebraElement::zero(f.nvars());
    for (k, c) in f.terms() {
        let mut seen: Option<Idx> = None;
        for (pos, &i) in k.sym.iter().enumerate() {
            if seen == Some(i) {
                continue;
            }
            seen = Some(i);
            if k.asym.contains(&i) {
                continue;
            }
            let mult = k.sym.iter().filter(|&&x| x == i).count();
            let mut sym = k.sym.clone();
            sym.remove(pos);
            let before = k.asym.iter().filter(|&&x| x < i).count();
            let mut asym = k.asym.clone();
            asym.insert(before, i);
            let mut coeff = c.scale_int(mult as i64);
            if before % 2 == 1 {
                coeff = coeff.neg();
            }
            out.add_term(
                TermKey {
                    hpow: k.hpow,
                    sym,
                    gra: k.gra.clone(),
                    asym,
                },
                coeff,
            );
        }
    }
    out
}

/// `δ*`: for every antisymmetric index, remove it (with its interior
/// sign) and append it to the symmetric factor.
pub fn delta_star(f: &AlgebraElement) -> AlgebraElement {
    let mut out = AlgebraElement::zero(f.nvars());
    for (k, c) in f.terms() {
        for (pos, &i) in k.asym.iter().enumerate() {
            let mut asym = k.asym.clone();
            asym.remove(pos);
            let ins = k.sym.iter().filter(|&&x| x <= i).count();
            let mut sym = k.sym.clone();
            sym.insert(ins, i);
            let coeff = if pos % 2 == 1 { c.neg() } else { c.clone() };
            out.add_term(
                TermKey {
                    hpow: k.hpow,
                    sym,
                    gra: k.gra.clone(),
                    asym,
                },
                coeff,
            );
        }
    }
    out
}

/// `δ⁻¹`: termwise `δ*/(s+a)` on terms with `s + a ≥ 1`, zero on the
/// rest.
pub fn delta_inv(f: &AlgebraElement) -> AlgebraElement {
    let mut out = AlgebraElement::zero(f.nvars());
    for (k, c) in f.terms() {
        let sa = k.deg_s() + k.deg_a();
        if sa == 0 {
            continue;
        }
        let scale = BigRational::new(BigInt::from(1), BigInt::from(sa));
        let single = AlgebraElement::from_raw_term(
            c.scale_rat(&scale),
            &k.sym,
            &k.gra,
            &k.asym,
            k.hpow,
        );
        out.add_assign(&delta_star(&single));
    }
    out
}

/// `σ`: projection onto symmetric degree zero.
pub fn sigma(f: &AlgebraElement) -> AlgebraElement {
    f.filter(|k| k.sym.is_empty())
}

/// `(deg_s + deg_a)` as an operator, for the anticommutation identity.
pub fn deg_s_plus_a(f: &AlgebraElement) -> AlgebraElement {
    f.map_terms(|k, c| (k.clone(), c.scale_int((k.deg_s() + k.deg_a()) as i64)))
}

/// Helper used by the scalar embedding: multiply by `(i/2)^k ħ^k`, the
/// weight of one contraction order.
pub fn i_hbar_half_pow(f: &AlgebraElement, k: u32) -> AlgebraElement {
    f.scale(&CScalar::i_half_pow(k, f.nvars())).mul_hbar_pow(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::galgebra::DegreeKind;
    use crate::scalar::CScalar;

    fn one() -> CScalar {
        CScalar::one(2)
    }

    fn raw(sym: &[Idx], gra: &[Idx], asym: &[Idx]) -> AlgebraElement {
        AlgebraElement::from_raw_term(one(), sym, gra, asym, 0)
    }

    #[test]
    fn symmetric_substitution_multiplicity() {
        // i_s(∂₁)(dx¹∨dx¹) = 2 dx¹
        let f = raw(&[1, 1], &[], &[]);
        assert_eq!(insert(&f, Insertion::SymVector(1)), raw(&[1], &[], &[]).scale_int(2));
    }

    #[test]
    fn left_and_right_interior_products() {
        // i(e₁)(e¹∧e²) = e², j(e₂)(e¹∧e²) = e¹
        let f = raw(&[], &[1, 2], &[]);
        assert_eq!(insert(&f, Insertion::FrameLeft(1)), raw(&[], &[2], &[]));
        assert_eq!(insert(&f, Insertion::FrameRight(2)), raw(&[], &[1], &[]));
        // and the crossed ones pick up the signs
        assert_eq!(
            insert(&f, Insertion::FrameLeft(2)),
            raw(&[], &[1], &[]).neg()
        );
        assert_eq!(
            insert(&f, Insertion::FrameRight(1)),
            raw(&[], &[2], &[]).neg()
        );
    }

    #[test]
    fn delta_moves_sym_to_asym() {
        // δ(dx¹⊗1⊗1) = 1⊗1⊗dx¹
        assert_eq!(delta(&raw(&[1], &[], &[])), raw(&[], &[], &[1]));
    }

    #[test]
    fn delta_inv_examples() {
        // δ⁻¹(1⊗e¹⊗1) = 0 (s + a = 0)
        assert!(delta_inv(&raw(&[], &[1], &[])).is_zero());
        // δ⁻¹(1⊗1⊗dx¹) = dx¹⊗1⊗1
        assert_eq!(delta_inv(&raw(&[], &[], &[1])), raw(&[1], &[], &[]));
    }

    #[test]
    fn delta_squares_to_zero_on_samples() {
        let samples = vec![
            raw(&[1, 1, 2], &[1], &[]),
            raw(&[1, 2, 2], &[], &[1]),
            raw(&[1, 2], &[1, 2], &[2]),
            raw(&[2, 2], &[], &[1, 2]),
        ];
        for f in samples {
            assert!(delta(&delta(&f)).is_zero());
            assert!(delta_star(&delta_star(&f)).is_zero());
            // δδ* + δ*δ = deg_s + deg_a
            let lhs = delta(&delta_star(&f)).add(&delta_star(&delta(&f)));
            assert_eq!(lhs, deg_s_plus_a(&f));
        }
    }

    #[test]
    fn sigma_projects_and_multiplies() {
        let f = raw(&[1], &[1], &[]).add(&raw(&[], &[2], &[]));
        assert_eq!(sigma(&f), raw(&[], &[2], &[]));
        let g = raw(&[], &[1], &[]).add(&raw(&[2], &[], &[]));
        assert_eq!(sigma(&f.mul(&g)), sigma(&f).mul(&sigma(&g)));
        // σ ∘ δ⁻¹ = 0
        assert!(sigma(&delta_inv(&f)).is_zero());
    }

    #[test]
    fn degree_maps_are_derivations() {
        let f = raw(&[1, 2], &[1], &[]).mul_hbar_pow(1);
        let g = raw(&[2], &[2], &[1]);
        for kind in [
            DegreeKind::Sym,
            DegreeKind::Grassmann,
            DegreeKind::Antisym,
            DegreeKind::Hbar,
            DegreeKind::Total,
        ] {
            let lhs = f.mul(&g).apply_degree(kind);
            let rhs = f.apply_degree(kind).mul(&g).add(&f.mul(&g.apply_degree(kind)));
            assert_eq!(lhs, rhs);
        }
    }
}
