//! The quantization core.
//!
//! Over a validated geometry this module provides
//!
//! * the covariant derivative `∇` on the graded algebra (raising the
//!   antisymmetric degree by one),
//! * the fibrewise deformed product `∘`, a double contraction
//!   expansion
//!
//!   ```text
//!   F∘G = Σ_{k,l} (iħ/2)^{k+l}/(k!·l!) Λ^{i1j1}…Λ^{ikjk} q^{A1B1}…q^{AlBl}
//!         (i_s(∂_{i1})…i_s(∂_{ik}) j(e_{A1})…j(e_{Al}) F)
//!         (i_s(∂_{j1})…i_s(∂_{jk}) i(e_{B1})…i(e_{Bl}) G)
//!   ```
//!
//! * the graded commutator `[F,G] = F∘G − (−1)^{d1d2+a1a2} G∘F` and
//!   the exact division `(i/ħ)·` (an ħ-power decrement),
//! * the degree-by-degree recursion for the correction term `r`
//!
//!   ```text
//!   r⁽³⁾ = δ⁻¹R,   r⁽ᵏ⁺³⁾ = δ⁻¹(∇r⁽ᵏ⁺²⁾ + (i/ħ) Σ_l r⁽ˡ⁺²⁾∘r⁽ᵏ⁻ˡ⁺²⁾)
//!   ```
//!
//!   with its invariants (reality, even E-parity, dependence on ħ²,
//!   `δ⁻¹r = 0`, vanishing flatness obstruction) verified after the
//!   build,
//! * the flat derivation `D = −δ + ∇ + (i/ħ)ad(r)` with `D² = 0`,
//! * Taylor series `τ(φ)` (the unique `D`-flat prolongation with
//!   `σ(τφ) = φ`), the star product `φ∗ψ = σ(τφ∘τψ)` and the
//!   extraction of its `ħ`-order coefficients `M_t`.

use crate::galgebra::display::{parse_element, render_element};
use crate::galgebra::ops::{delta, delta_inv, sigma};
use crate::galgebra::{merge_multiset, merge_wedge, AlgebraElement, Idx, TermKey};
use crate::geometry::{Curvature, Geometry, GeometryError};
use crate::scalar::{CScalar, RationalExpr};
use num_bigint::BigInt;
use num_rational::BigRational;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FedosovError {
    #[error("total-degree cutoff must be at least 3, got {0}")]
    CutoffTooLow(u32),
    #[error(
        "cutoff too small: the computation needs r through total degree {needed}, built {have}"
    )]
    CutoffTooSmall { needed: u32, have: u32 },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invariant violated at total degree {degree}: {name}; residual: {residual}")]
    Invariant {
        degree: u32,
        name: String,
        residual: String,
    },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("serialized data: {0}")]
    Serialized(String),
}

/// Covariant derivative `∇` on the graded algebra: Christoffel action
/// on the symmetric factor, bundle-connection action on the Grassmann
/// factor, coefficient derivative, each wedged with `dx^i` from the
/// left.
pub fn nabla(f: &AlgebraElement, geo: &Geometry) -> AlgebraElement {
    let dim = geo.dim();
    let mut out = AlgebraElement::zero(f.nvars());
    for (k, c) in f.terms() {
        for i in 0..dim {
            let i1 = (i + 1) as Idx;
            // ∂_i of the coefficient
            let dc = c.partial(i);
            if !dc.is_zero() {
                out.add_assign(&wedge_front(dc, k, i1, None, f.nvars()));
            }
            // −Γ^u_{ij}: replace one dx^u by dx^j in the symmetric factor
            let mut seen: Option<Idx> = None;
            for (pos, &u) in k.sym.iter().enumerate() {
                if seen == Some(u) {
                    continue;
                }
                seen = Some(u);
                let mult = k.sym.iter().filter(|&&x| x == u).count() as i64;
                for j in 0..dim {
                    let gamma = geo.gamma().get((u - 1) as usize, i, j);
                    if gamma.is_zero() {
                        continue;
                    }
                    let coeff = c.scale_re(gamma).scale_int(-mult);
                    let mut sym = k.sym.clone();
                    sym.remove(pos);
                    let ins = sym.iter().filter(|&&x| x <= (j + 1) as Idx).count();
                    sym.insert(ins, (j + 1) as Idx);
                    out.add_assign(&wedge_front(
                        coeff,
                        k,
                        i1,
                        Some((sym, k.gra.clone())),
                        f.nvars(),
                    ));
                }
            }
            // −A^{a}_{ib}: replace one e^a by e^b in the Grassmann factor
            for (pos, &a) in k.gra.iter().enumerate() {
                for b in 0..geo.n() {
                    let conn = geo.conn_e().get((a - 1) as usize, i, b);
                    if conn.is_zero() {
                        continue;
                    }
                    let mut gra = k.gra.clone();
                    gra[pos] = (b + 1) as Idx;
                    let Some((gra, gneg)) = crate::galgebra::sort_wedge(&gra) else {
                        continue;
                    };
                    let mut coeff = c.scale_re(conn).neg();
                    if gneg {
                        coeff = coeff.neg();
                    }
                    out.add_assign(&wedge_front(
                        coeff,
                        k,
                        i1,
                        Some((k.sym.clone(), gra)),
                        f.nvars(),
                    ));
                }
            }
        }
    }
    out
}

/// One term of `∇`: coefficient, original key with possibly replaced
/// sym/gra parts, and `dx^i ∧ ·` on the antisymmetric factor.
fn wedge_front(
    coeff: CScalar,
    k: &TermKey,
    i: Idx,
    replace: Option<(Vec<Idx>, Vec<Idx>)>,
    nvars: usize,
) -> AlgebraElement {
    if k.asym.contains(&i) {
        return AlgebraElement::zero(nvars);
    }
    let before = k.asym.iter().filter(|&&x| x < i).count();
    let mut asym = k.asym.clone();
    asym.insert(before, i);
    let coeff = if before % 2 == 1 { coeff.neg() } else { coeff };
    let (sym, gra) = replace.unwrap_or_else(|| (k.sym.clone(), k.gra.clone()));
    let mut el = AlgebraElement::zero(nvars);
    el.add_term(
        TermKey {
            hpow: k.hpow,
            sym,
            gra,
            asym,
        },
        coeff,
    );
    el
}

/// The bundle-connection derivative `∇^E_{∂_i}` of a `C₀` element
/// (no `dx^i` wedge). Used by the closed-form bracket.
pub fn nabla_e_dir(phi: &AlgebraElement, geo: &Geometry, i: usize) -> AlgebraElement {
    assert!(phi.is_c0(), "nabla_e_dir expects a C₀ element");
    let mut out = AlgebraElement::zero(phi.nvars());
    for (k, c) in phi.terms() {
        let dc = c.partial(i);
        if !dc.is_zero() {
            out.add_assign(&AlgebraElement::from_raw_term(dc, &[], &k.gra, &[], 0));
        }
        for (pos, &a) in k.gra.iter().enumerate() {
            for b in 0..geo.n() {
                let conn = geo.conn_e().get((a - 1) as usize, i, b);
                if conn.is_zero() {
                    continue;
                }
                let mut gra = k.gra.clone();
                gra[pos] = (b + 1) as Idx;
                out.add_assign(&AlgebraElement::from_raw_term(
                    c.scale_re(conn).neg(),
                    &[],
                    &gra,
                    &[],
                    0,
                ));
            }
        }
    }
    out
}

fn factorial_recip(k: u32) -> BigRational {
    let mut f = BigInt::from(1);
    for i in 2..=k.max(1) {
        f *= BigInt::from(i);
    }
    BigRational::new(BigInt::from(1), f)
}

type PairStates = BTreeMap<(Vec<Idx>, Vec<Idx>), RationalExpr>;

/// Λ-contraction ladder on a pair of symmetric multisets: level `k`
/// holds `P^k(F⊗G)` restricted to the sym factors, where
/// `P = Λ^{uv} i_s(∂_u) ⊗ i_s(∂_v)`.
fn lambda_ladder(s1: &[Idx], s2: &[Idx], geo: &Geometry, max_k: u32) -> Vec<PairStates> {
    let nv = geo.dim();
    let mut levels = Vec::new();
    let mut cur: PairStates = BTreeMap::new();
    cur.insert((s1.to_vec(), s2.to_vec()), RationalExpr::one(nv));
    levels.push(cur);
    for _ in 0..max_k {
        let prev = levels.last().unwrap();
        if prev.is_empty() {
            break;
        }
        let mut next: PairStates = BTreeMap::new();
        for ((a, b), coeff) in prev {
            let mut seen_u: Option<Idx> = None;
            for (pu, &u) in a.iter().enumerate() {
                if seen_u == Some(u) {
                    continue;
                }
                seen_u = Some(u);
                let mu = a.iter().filter(|&&x| x == u).count() as i64;
                let mut seen_v: Option<Idx> = None;
                for (pv, &v) in b.iter().enumerate() {
                    if seen_v == Some(v) {
                        continue;
                    }
                    seen_v = Some(v);
                    let lam = geo.lambda().get((u - 1) as usize, (v - 1) as usize);
                    if lam.is_zero() {
                        continue;
                    }
                    let mv = b.iter().filter(|&&x| x == v).count() as i64;
                    let c = coeff.mul(lam).scale_int(mu * mv);
                    let mut a2 = a.clone();
                    a2.remove(pu);
                    let mut b2 = b.clone();
                    b2.remove(pv);
                    let entry = next
                        .entry((a2, b2))
                        .or_insert_with(|| RationalExpr::zero(nv));
                    *entry = entry.add(&c);
                }
            }
        }
        next.retain(|_, c| !c.is_zero());
        levels.push(next);
    }
    levels
}

/// q-contraction ladder on a pair of Grassmann words: level `l` holds
/// `S^l(F⊗G)` restricted to the Grassmann factors, where
/// `S = q^{AB} j(e_A) ⊗ i(e_B)`.
fn q_ladder(g1: &[Idx], g2: &[Idx], geo: &Geometry, max_l: u32) -> Vec<PairStates> {
    let nv = geo.dim();
    let mut levels = Vec::new();
    let mut cur: PairStates = BTreeMap::new();
    cur.insert((g1.to_vec(), g2.to_vec()), RationalExpr::one(nv));
    levels.push(cur);
    for _ in 0..max_l {
        let prev = levels.last().unwrap();
        if prev.is_empty() {
            break;
        }
        let mut next: PairStates = BTreeMap::new();
        for ((a, b), coeff) in prev {
            for (pa, &va) in a.iter().enumerate() {
                // j(e_A): sign (−1)^{pos + deg − 1}
                let ja_neg = (pa + a.len() - 1) % 2 == 1;
                for (pb, &vb) in b.iter().enumerate() {
                    let qq = geo.q_inv().get((va - 1) as usize, (vb - 1) as usize);
                    if qq.is_zero() {
                        continue;
                    }
                    let ib_neg = pb % 2 == 1;
                    let mut c = coeff.mul(qq);
                    if ja_neg != ib_neg {
                        c = c.neg();
                    }
                    let mut a2 = a.clone();
                    a2.remove(pa);
                    let mut b2 = b.clone();
                    b2.remove(pb);
                    let entry = next
                        .entry((a2, b2))
                        .or_insert_with(|| RationalExpr::zero(nv));
                    *entry = entry.add(&c);
                }
            }
        }
        next.retain(|_, c| !c.is_zero());
        levels.push(next);
    }
    levels
}

/// Contributions of one term pair to `F∘G`, accumulated into `out`.
#[allow(clippy::too_many_arguments)]
fn circ_pair_into(
    out: &mut AlgebraElement,
    k1: &TermKey,
    c1: &CScalar,
    k2: &TermKey,
    c2: &CScalar,
    geo: &Geometry,
    hbar_cut: Option<u32>,
    negate: bool,
) {
    let nv = geo.dim();
    let Some((asym, aneg)) = merge_wedge(&k1.asym, &k2.asym) else {
        return;
    };
    let base_h = k1.hpow + k2.hpow;
    if let Some(t) = hbar_cut {
        if base_h > t {
            return;
        }
    }
    let budget = hbar_cut.map(|t| t - base_h);
    let max_k = (k1.sym.len().min(k2.sym.len()) as u32).min(budget.unwrap_or(u32::MAX));
    let max_l = (k1.gra.len().min(k2.gra.len()) as u32).min(budget.unwrap_or(u32::MAX));
    let lam_levels = lambda_ladder(&k1.sym, &k2.sym, geo, max_k);
    let q_levels = q_ladder(&k1.gra, &k2.gra, geo, max_l);
    let c12 = c1.mul(c2);
    for (k, lam_states) in lam_levels.iter().enumerate() {
        for (l, q_states) in q_levels.iter().enumerate() {
            let order = (k + l) as u32;
            if let Some(b) = budget {
                if order > b {
                    continue;
                }
            }
            if lam_states.is_empty() || q_states.is_empty() {
                continue;
            }
            let pref = CScalar::i_half_pow(order, nv)
                .scale_rat(&factorial_recip(k as u32))
                .scale_rat(&factorial_recip(l as u32));
            let pref = c12.mul(&pref);
            let pref = if negate { pref.neg() } else { pref };
            for ((s1r, s2r), lc) in lam_states {
                for ((g1r, g2r), qc) in q_states {
                    let Some((gra, gneg)) = merge_wedge(g1r, g2r) else {
                        continue;
                    };
                    let mut coeff = pref.scale_re(lc).scale_re(qc);
                    if gneg != aneg {
                        coeff = coeff.neg();
                    }
                    out.add_term(
                        TermKey {
                            hpow: base_h + order,
                            sym: merge_multiset(s1r, s2r),
                            gra,
                            asym: asym.clone(),
                        },
                        coeff,
                    );
                }
            }
        }
    }
}

/// The fibrewise deformed product `F∘G`, optionally truncated at an
/// ħ-order (`∘` never lowers ħ-powers, so truncating intermediates is
/// exact for results up to the cutoff).
pub fn circ(
    f: &AlgebraElement,
    g: &AlgebraElement,
    geo: &Geometry,
    hbar_cut: Option<u32>,
) -> AlgebraElement {
    let mut out = AlgebraElement::zero(f.nvars());
    for (k1, c1) in f.terms() {
        for (k2, c2) in g.terms() {
            circ_pair_into(&mut out, k1, c1, k2, c2, geo, hbar_cut, false);
        }
    }
    out
}

/// The graded commutator `[F,G] = F∘G − (−1)^{d1d2+a1a2} G∘F`,
/// computed pairwise on homogeneous terms so inputs need no parity
/// annotations.
pub fn super_commutator(
    f: &AlgebraElement,
    g: &AlgebraElement,
    geo: &Geometry,
    hbar_cut: Option<u32>,
) -> AlgebraElement {
    let mut out = AlgebraElement::zero(f.nvars());
    for (k1, c1) in f.terms() {
        for (k2, c2) in g.terms() {
            circ_pair_into(&mut out, k1, c1, k2, c2, geo, hbar_cut, false);
            let sign = (k1.deg_e() * k2.deg_e() + k1.deg_a() * k2.deg_a()) % 2;
            // subtract (−1)^sign G∘F
            circ_pair_into(&mut out, k2, c2, k1, c1, geo, hbar_cut, sign == 0);
        }
    }
    out
}

/// `ad(F)G = [F,G]`.
pub fn ad(
    f: &AlgebraElement,
    g: &AlgebraElement,
    geo: &Geometry,
    hbar_cut: Option<u32>,
) -> AlgebraElement {
    super_commutator(f, g, geo, hbar_cut)
}

/// Exact multiplication by `i/ħ`: every term's ħ-power drops by one.
///
/// # Panics
///
/// Panics if a term carries no ħ — for commutators that indicates a
/// bug in the fibrewise product, since the undeformed parts must have
/// cancelled.
pub fn i_over_hbar(f: &AlgebraElement) -> AlgebraElement {
    f.map_terms(|k, c| {
        assert!(
            k.hpow >= 1,
            "i/ħ applied to an ħ-free term: fibrewise product bug"
        );
        (
            TermKey {
                hpow: k.hpow - 1,
                sym: k.sym.clone(),
                gra: k.gra.clone(),
                asym: k.asym.clone(),
            },
            c.mul_i_pow(1),
        )
    })
}

/// The recursively built correction term and everything derived from
/// it.
#[derive(Clone, Debug)]
pub struct FedosovData {
    geometry: Geometry,
    curvature: Curvature,
    k_max: u32,
    r: BTreeMap<u32, AlgebraElement>,
}

impl FedosovData {
    /// Run the recursion up to total degree `k_max` (≥ 3) and verify
    /// every invariant.
    pub fn build(geometry: Geometry, k_max: u32) -> Result<Self, FedosovError> {
        if k_max < 3 {
            return Err(FedosovError::CutoffTooLow(k_max));
        }
        let curvature = geometry.curvature()?;
        let nv = geometry.dim();
        let mut r: BTreeMap<u32, AlgebraElement> = BTreeMap::new();
        r.insert(3, delta_inv(curvature.element()));
        for d in 4..=k_max {
            let mut acc = nabla(&r[&(d - 1)], &geometry);
            let mut quad = AlgebraElement::zero(nv);
            for a in 3..=(d.saturating_sub(2)) {
                let b = d + 1 - a;
                if !(3..=d - 2).contains(&b) {
                    continue;
                }
                quad.add_assign(&circ(&r[&a], &r[&b], &geometry, None));
            }
            if !quad.is_zero() {
                acc.add_assign(&i_over_hbar(&quad));
            }
            r.insert(d, delta_inv(&acc));
        }
        r.retain(|_, el| !el.is_zero());
        let data = FedosovData {
            geometry,
            curvature,
            k_max,
            r,
        };
        data.verify()?;
        Ok(data)
    }

    /// Rebuild from deserialized components, re-verifying everything.
    pub fn from_components(
        geometry: Geometry,
        k_max: u32,
        r: BTreeMap<u32, AlgebraElement>,
    ) -> Result<Self, FedosovError> {
        if k_max < 3 {
            return Err(FedosovError::CutoffTooLow(k_max));
        }
        let curvature = geometry.curvature()?;
        let data = FedosovData {
            geometry,
            curvature,
            k_max,
            r,
        };
        data.verify()?;
        Ok(data)
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    pub fn curvature(&self) -> &Curvature {
        &self.curvature
    }

    /// Highest total degree to which `r` has been built.
    pub fn k_max(&self) -> u32 {
        self.k_max
    }

    /// The degree-`k` component `r⁽ᵏ⁾` (zero if outside `3..=k_max`).
    pub fn r_component(&self, k: u32) -> AlgebraElement {
        self.r
            .get(&k)
            .cloned()
            .unwrap_or_else(|| AlgebraElement::zero(self.geometry.dim()))
    }

    /// The full truncated correction term `Σ_k r⁽ᵏ⁾`.
    pub fn r_sum(&self) -> AlgebraElement {
        let mut out = AlgebraElement::zero(self.geometry.dim());
        for el in self.r.values() {
            out.add_assign(el);
        }
        out
    }

    /// The flatness obstruction `A = −δr + ∇r + R + (i/ħ) r∘r`,
    /// complete through total degree `k_max − 1`.
    pub fn obstruction(&self) -> AlgebraElement {
        let rsum = self.r_sum();
        let mut a = delta(&rsum).neg();
        a.add_assign(&nabla(&rsum, &self.geometry));
        a.add_assign(self.curvature.element());
        let quad = circ(&rsum, &rsum, &self.geometry, None);
        if !quad.is_zero() {
            a.add_assign(&i_over_hbar(&quad));
        }
        a
    }

    fn verify(&self) -> Result<(), FedosovError> {
        let coords = self.geometry.coords();
        let frame = self.geometry.frame();
        let fail = |degree: u32, name: &str, residual: &AlgebraElement| FedosovError::Invariant {
            degree,
            name: name.into(),
            residual: render_element(residual, coords, frame),
        };
        for (&d, rd) in &self.r {
            for (k, _) in rd.terms() {
                if k.deg_a() != 1 {
                    return Err(fail(d, "r must have antisymmetric degree 1", rd));
                }
                if k.total_deg() != d {
                    return Err(fail(d, "r component has mixed total degree", rd));
                }
                if k.deg_e() % 2 != 0 {
                    return Err(fail(d, "r must have even E-parity", rd));
                }
                if k.hpow % 2 != 0 {
                    return Err(fail(d, "r must depend on ħ only through ħ²", rd));
                }
            }
            if !rd.is_real() {
                return Err(fail(d, "r must be real", rd));
            }
            let di = delta_inv(rd);
            if !di.is_zero() {
                return Err(fail(d, "δ⁻¹ r = 0", &di));
            }
        }
        let obstruction = self.obstruction();
        for d in 2..self.k_max {
            let comp = obstruction.total_deg_component(d);
            if !comp.is_zero() {
                return Err(fail(d, "flatness obstruction −δr+∇r+R+(i/ħ)r∘r", &comp));
            }
        }
        Ok(())
    }

    /// Serialize `r` per degree, in the element grammar.
    pub fn serialize_r(&self) -> String {
        let mut out = format!("k_max = {}\n", self.k_max);
        for (d, rd) in &self.r {
            out.push_str(&format!(
                "r[{d}] = {}\n",
                render_element(rd, self.geometry.coords(), self.geometry.frame())
            ));
        }
        out
    }

    /// Parse the output of [`FedosovData::serialize_r`] against a
    /// validated geometry; all invariants are re-checked.
    pub fn parse_r(geometry: Geometry, text: &str) -> Result<Self, FedosovError> {
        let mut k_max: Option<u32> = None;
        let mut r = BTreeMap::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| FedosovError::Serialized(format!("bad line `{line}`")))?;
            let key = key.trim();
            let value = value.trim();
            if key == "k_max" {
                k_max = Some(
                    value
                        .parse()
                        .map_err(|_| FedosovError::Serialized("bad k_max".into()))?,
                );
            } else if let Some(d) = key.strip_prefix("r[").and_then(|s| s.strip_suffix(']')) {
                let d: u32 = d
                    .parse()
                    .map_err(|_| FedosovError::Serialized(format!("bad degree `{d}`")))?;
                let el = parse_element(value, geometry.coords(), geometry.frame())
                    .map_err(|e| FedosovError::Serialized(e.to_string()))?;
                if !el.is_zero() {
                    r.insert(d, el);
                }
            } else {
                return Err(FedosovError::Serialized(format!("unknown key `{key}`")));
            }
        }
        let k_max = k_max.ok_or_else(|| FedosovError::Serialized("missing k_max".into()))?;
        Self::from_components(geometry, k_max, r)
    }
}

/// The flat derivation `D = −δ + ∇ + (i/ħ) ad(r)`.
///
/// With `r` built through degree `K`, the result is complete through
/// total degree `K − 1` (the ad-term of a missing `r`-degree could
/// first enter at `K`).
pub fn fedosov_derivation(f: &AlgebraElement, data: &FedosovData) -> AlgebraElement {
    let mut out = delta(f).neg();
    out.add_assign(&nabla(f, data.geometry()));
    let comm = super_commutator(&data.r_sum(), f, data.geometry(), None);
    if !comm.is_zero() {
        out.add_assign(&i_over_hbar(&comm));
    }
    out
}

/// Taylor coefficients of `φ ∈ C₀` through total degree `k_tau`:
///
/// ```text
/// τ(φ)⁽ᵏ⁾ = φ⁽ᵏ⁾ + δ⁻¹( ∇τ(φ)⁽ᵏ⁻¹⁾ + (i/ħ) Σ_{l=1}^{k−2} [r⁽ˡ⁺²⁾, τ(φ)⁽ᵏ⁻¹⁻ˡ⁾] )
/// ```
///
/// where `φ⁽ᵏ⁾` is the Grassmann-degree-`k` part of `φ` (zero beyond
/// the bundle rank). The same uniform recursion covers every degree.
pub fn taylor(
    phi: &AlgebraElement,
    data: &FedosovData,
    k_tau: u32,
) -> Result<AlgebraElement, FedosovError> {
    if !phi.is_c0() {
        return Err(FedosovError::Precondition(
            "taylor expects a C₀ element (no symmetric/antisymmetric factor, no ħ)".into(),
        ));
    }
    if k_tau > data.k_max() {
        return Err(FedosovError::CutoffTooSmall {
            needed: k_tau,
            have: data.k_max(),
        });
    }
    let geo = data.geometry();
    let nv = geo.dim();
    let mut comps: Vec<AlgebraElement> = Vec::with_capacity(k_tau as usize + 1);
    comps.push(phi.filter(|k| k.deg_e() == 0));
    for k in 1..=k_tau {
        let mut acc = nabla(&comps[(k - 1) as usize], geo);
        let mut comm_sum = AlgebraElement::zero(nv);
        for l in 1..=k.saturating_sub(2) {
            let rpiece = data.r_component(l + 2);
            if rpiece.is_zero() {
                continue;
            }
            comm_sum.add_assign(&super_commutator(
                &rpiece,
                &comps[(k - 1 - l) as usize],
                geo,
                None,
            ));
        }
        if !comm_sum.is_zero() {
            acc.add_assign(&i_over_hbar(&comm_sum));
        }
        let mut comp = delta_inv(&acc);
        comp.add_assign(&phi.filter(|key| key.deg_e() == k));
        comps.push(comp);
    }
    let mut out = AlgebraElement::zero(nv);
    for c in comps {
        out.add_assign(&c);
    }
    Ok(out)
}

/// Taylor series of a `C = C₀[[ħ]]` element, componentwise in the
/// ħ-power (τ is ℂ[[ħ]]-linear); the component `ħ^t φ_t` is prolonged
/// so that the whole series is complete through total degree `k_tau`.
fn taylor_c(
    phi: &AlgebraElement,
    data: &FedosovData,
    k_tau: u32,
) -> Result<AlgebraElement, FedosovError> {
    if !phi.is_c() {
        return Err(FedosovError::Precondition(
            "star arguments must lie in C = C₀[[ħ]]".into(),
        ));
    }
    let nv = data.geometry().dim();
    let mut out = AlgebraElement::zero(nv);
    for t in 0..=phi.max_hpow() {
        if 2 * t > k_tau {
            break;
        }
        let comp = phi.filter(|k| k.hpow == t);
        if comp.is_zero() {
            continue;
        }
        let c0 = comp.map_terms(|k, c| {
            (
                TermKey {
                    hpow: 0,
                    sym: k.sym.clone(),
                    gra: k.gra.clone(),
                    asym: k.asym.clone(),
                },
                c.clone(),
            )
        });
        out.add_assign(&taylor(&c0, data, k_tau - 2 * t)?.mul_hbar_pow(t));
    }
    Ok(out)
}

/// The star product `φ∗ψ = σ(τ(φ)∘τ(ψ))` through ħ-order `t_order`,
/// with the default prolongation depth `k_tau = 2·t_order + n` (which
/// captures every `M_t`, `t ≤ t_order`, exactly). Requires `r` built
/// through `k_tau + 2`; refuses otherwise.
pub fn star(
    phi: &AlgebraElement,
    psi: &AlgebraElement,
    data: &FedosovData,
    t_order: u32,
) -> Result<AlgebraElement, FedosovError> {
    let k_tau = 2 * t_order + data.geometry().n() as u32;
    if data.k_max() < k_tau + 2 {
        return Err(FedosovError::CutoffTooSmall {
            needed: k_tau + 2,
            have: data.k_max(),
        });
    }
    star_with_k_tau(phi, psi, data, t_order, k_tau)
}

/// The star product with an explicit prolongation depth — used by the
/// truncation-stability check. `k_tau` below `2·t_order + n` is
/// refused since the result could silently miss contributions.
pub fn star_with_k_tau(
    phi: &AlgebraElement,
    psi: &AlgebraElement,
    data: &FedosovData,
    t_order: u32,
    k_tau: u32,
) -> Result<AlgebraElement, FedosovError> {
    let min_k = 2 * t_order + data.geometry().n() as u32;
    if k_tau < min_k {
        return Err(FedosovError::CutoffTooSmall {
            needed: min_k,
            have: k_tau,
        });
    }
    let tp = taylor_c(phi, data, k_tau)?;
    let tq = taylor_c(psi, data, k_tau)?;
    let prod = circ(&tp, &tq, data.geometry(), Some(t_order));
    Ok(sigma(&prod).truncate_hpow(t_order))
}

/// The coefficient `M_t(φ,ψ)` in `φ∗ψ = Σ_t (iħ/2)^t M_t(φ,ψ)`, as a
/// `C₀` element.
pub fn extract_mt(star_product: &AlgebraElement, t: u32) -> AlgebraElement {
    let nv = star_product.nvars();
    let unfactor = CScalar::minus_two_i_pow(t, nv);
    star_product.filter(|k| k.hpow == t).map_terms(|k, c| {
        (
            TermKey {
                hpow: 0,
                sym: k.sym.clone(),
                gra: k.gra.clone(),
                asym: k.asym.clone(),
            },
            c.mul(&unfactor),
        )
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{file::parse_geometry, GeometryInput};
    use crate::scalar::parse_expr;

    fn flat() -> Geometry {
        GeometryInput::flat(1, 2).validate().unwrap()
    }

    fn curved_bundle() -> Geometry {
        parse_geometry(include_str!("../geometries/curved_bundle.geom"))
            .unwrap()
            .validate()
            .unwrap()
    }

    fn el(geo: &Geometry, text: &str) -> AlgebraElement {
        crate::galgebra::display::parse_element(text, geo.coords(), geo.frame()).unwrap()
    }

    #[test]
    fn nabla_flat_is_de_rham_on_functions() {
        let geo = flat();
        let f = geo.parse_section("x1^2*x2").unwrap();
        let grad = nabla(&f, &geo);
        let names = geo.coords().to_vec();
        let d1 = parse_expr("2*x1*x2", &names).unwrap();
        let d2 = parse_expr("x1^2", &names).unwrap();
        let expect = AlgebraElement::from_raw_term(CScalar::from_real(d1), &[], &[], &[1], 0).add(
            &AlgebraElement::from_raw_term(CScalar::from_real(d2), &[], &[], &[2], 0),
        );
        assert_eq!(grad, expect);
    }

    #[test]
    fn circ_frame_covector_square() {
        // e¹∘e¹ = (iħ/2) with the identity fibre metric.
        let geo = flat();
        let e1 = geo.parse_section("e1").unwrap();
        let p = circ(&e1, &e1, &geo, None);
        assert_eq!(p, el(&geo, "(iħ/2)^1 * [1] 1 ⊗ 1 ⊗ 1"));
    }

    #[test]
    fn circ_symmetric_commutator_gives_lambda() {
        // [dx¹, dx²]∘ = iħ Λ^{12} = iħ = (iħ/2)·2
        let geo = flat();
        let dx1 = AlgebraElement::sym_coord(1, 2);
        let dx2 = AlgebraElement::sym_coord(2, 2);
        let comm = super_commutator(&dx1, &dx2, &geo, None);
        assert_eq!(comm, el(&geo, "(iħ/2)^1 * [2] 1 ⊗ 1 ⊗ 1"));
        let comm2 = super_commutator(&dx2, &dx1, &geo, None);
        assert_eq!(comm2, comm.neg());
    }

    #[test]
    fn circ_top_form_square() {
        // (e¹∧e²)∘(e¹∧e²) = −(iħ/2)²
        let geo = flat();
        let top = geo.parse_section("e1^e2").unwrap();
        let p = circ(&top, &top, &geo, None);
        assert_eq!(p, el(&geo, "(iħ/2)^2 * [-1] 1 ⊗ 1 ⊗ 1"));
    }

    #[test]
    fn circ_associative_on_samples() {
        let geo = curved_bundle();
        let samples = vec![
            el(&geo, "[1] dx1 ⊗ e1 ⊗ 1"),
            el(&geo, "[x2] dx2∨dx2 ⊗ 1 ⊗ 1 + [1] 1 ⊗ e2 ⊗ dx1"),
            el(&geo, "[x1] dx1 ⊗ e1∧e2 ⊗ 1 + [-2] dx2 ⊗ 1 ⊗ 1"),
        ];
        for f in &samples {
            for g in &samples {
                for h in &samples {
                    let lhs = circ(&circ(f, g, &geo, None), h, &geo, None);
                    let rhs = circ(f, &circ(g, h, &geo, None), &geo, None);
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn flat_geometry_has_zero_r() {
        let data = FedosovData::build(flat(), 6).unwrap();
        assert!(data.r_sum().is_zero());
    }

    #[test]
    fn curved_bundle_r3_frozen_value() {
        // R = −(1⊗e¹∧e²⊗dx¹∧dx²), so r³ = δ⁻¹R
        //   = −½ dx¹⊗e¹∧e²⊗dx² + ½ dx²⊗e¹∧e²⊗dx¹.
        let data = FedosovData::build(curved_bundle(), 5).unwrap();
        let geo = data.geometry().clone();
        let r3 = data.r_component(3);
        let expect = el(&geo, "[-1/2] dx1 ⊗ e1∧e2 ⊗ dx2 + [1/2] dx2 ⊗ e1∧e2 ⊗ dx1");
        assert_eq!(r3, expect);
    }

    #[test]
    fn derivation_square_vanishes_on_samples() {
        let data = FedosovData::build(curved_bundle(), 7).unwrap();
        let geo = data.geometry().clone();
        let samples = vec![
            el(&geo, "[x1] 1 ⊗ e1 ⊗ 1"),
            el(&geo, "[1] dx1 ⊗ e1∧e2 ⊗ 1 + [x2] dx2 ⊗ 1 ⊗ 1"),
            el(&geo, "[x1*x2] 1 ⊗ e2 ⊗ 1 + [1] dx1∨dx2 ⊗ 1 ⊗ 1"),
        ];
        for f in &samples {
            let d2 = fedosov_derivation(&fedosov_derivation(f, &data), &data);
            let bound = data.k_max() - 2;
            for k in 0..=bound {
                assert!(
                    d2.total_deg_component(k).is_zero(),
                    "D² nonzero at degree {k}"
                );
            }
        }
    }

    #[test]
    fn derivation_annihilates_obstruction_window() {
        // D applied to the flatness combination −δr + ∇r + R + (i/ħ)r∘r
        // vanishes wherever the computation is complete.
        let data = FedosovData::build(curved_bundle(), 7).unwrap();
        let da = fedosov_derivation(&data.obstruction(), &data);
        for k in 0..=data.k_max() - 2 {
            assert!(da.total_deg_component(k).is_zero(), "D(A) ≠ 0 at degree {k}");
        }
    }

    #[test]
    fn taylor_flat_symmetrized_derivatives() {
        // Flat chart: τ(x1²) = x1² + 2x1·dx¹ + dx¹∨dx¹ — the k-th
        // coefficient is the k-th symmetrized derivative over k!.
        let data = FedosovData::build(flat(), 6).unwrap();
        let geo = data.geometry().clone();
        let phi = geo.parse_section("x1^2").unwrap();
        let tau = taylor(&phi, &data, 6).unwrap();
        let expect = el(
            &geo,
            "[x1^2] 1 ⊗ 1 ⊗ 1 + [2*x1] dx1 ⊗ 1 ⊗ 1 + [1] dx1∨dx1 ⊗ 1 ⊗ 1",
        );
        assert_eq!(tau, expect);
    }

    #[test]
    fn taylor_flat_linear_function() {
        // Flat chart: τ(x1) = x1 + dx¹ and the series terminates.
        let data = FedosovData::build(flat(), 6).unwrap();
        let geo = data.geometry().clone();
        let phi = geo.parse_section("x1").unwrap();
        let tau = taylor(&phi, &data, 6).unwrap();
        assert_eq!(tau, el(&geo, "[x1] 1 ⊗ 1 ⊗ 1 + [1] dx1 ⊗ 1 ⊗ 1"));
    }

    #[test]
    fn taylor_of_one_is_one() {
        let data = FedosovData::build(curved_bundle(), 6).unwrap();
        let one = data.geometry().parse_section("1").unwrap();
        let tau = taylor(&one, &data, 6).unwrap();
        assert_eq!(tau, one);
    }

    #[test]
    fn taylor_projects_back_and_is_flat() {
        let data = FedosovData::build(curved_bundle(), 7).unwrap();
        let geo = data.geometry().clone();
        for text in ["x1*x2", "e1", "x2*e2", "e1^e2", "x1 + x2*e1^e2"] {
            let phi = geo.parse_section(text).unwrap();
            let k_tau = 5;
            let tau = taylor(&phi, &data, k_tau).unwrap();
            assert_eq!(sigma(&tau), phi, "σ(τφ) ≠ φ for {text}");
            let dtau = fedosov_derivation(&tau, &data);
            for k in 0..k_tau {
                assert!(
                    dtau.total_deg_component(k).is_zero(),
                    "D(τφ) ≠ 0 at degree {k} for {text}"
                );
            }
        }
    }

    #[test]
    fn star_flat_linear_functions() {
        // x1 ∗ x2 = x1·x2 + (iħ/2)Λ^{12} = x1·x2 + (iħ/2).
        let data = FedosovData::build(flat(), 8).unwrap();
        let geo = data.geometry().clone();
        let f = geo.parse_section("x1").unwrap();
        let g = geo.parse_section("x2").unwrap();
        let s = star(&f, &g, &data, 2).unwrap();
        assert_eq!(s, el(&geo, "[x1*x2] 1 ⊗ 1 ⊗ 1 + (iħ/2)^1 * [1] 1 ⊗ 1 ⊗ 1"));
        assert_eq!(extract_mt(&s, 1), geo.parse_section("1").unwrap());
        assert_eq!(extract_mt(&s, 2), AlgebraElement::zero(2));
    }

    #[test]
    fn star_order_zero_is_wedge() {
        let data = FedosovData::build(curved_bundle(), 8).unwrap();
        let geo = data.geometry().clone();
        let phi = geo.parse_section("x1*e1").unwrap();
        let psi = geo.parse_section("e2 + x2*e1").unwrap();
        let s = star(&phi, &psi, &data, 1).unwrap();
        assert_eq!(extract_mt(&s, 0), phi.mul(&psi));
    }

    #[test]
    fn star_unit_laws() {
        let data = FedosovData::build(curved_bundle(), 8).unwrap();
        let geo = data.geometry().clone();
        let one = geo.parse_section("1").unwrap();
        let psi = geo.parse_section("x1*e1 + e1^e2").unwrap();
        assert_eq!(star(&one, &psi, &data, 1).unwrap(), psi);
        assert_eq!(star(&psi, &one, &data, 1).unwrap(), psi);
    }

    #[test]
    fn star_refuses_insufficient_cutoff() {
        let data = FedosovData::build(curved_bundle(), 5).unwrap();
        let geo = data.geometry().clone();
        let f = geo.parse_section("x1").unwrap();
        match star(&f, &f, &data, 1) {
            Err(FedosovError::CutoffTooSmall { needed: 6, have: 5 }) => {}
            other => panic!("expected cutoff refusal, got {other:?}"),
        }
    }

    #[test]
    fn serialization_round_trip() {
        let data = FedosovData::build(curved_bundle(), 6).unwrap();
        let text = data.serialize_r();
        let reloaded = FedosovData::parse_r(data.geometry().clone(), &text).unwrap();
        assert_eq!(reloaded.serialize_r(), text);
        for d in 3..=6 {
            assert_eq!(reloaded.r_component(d), data.r_component(d));
        }
    }
}
