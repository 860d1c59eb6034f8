//! The closed-form super-Poisson bracket.
//!
//! The first-order coefficient `M₁` of the star product has a closed
//! form driven by two nilpotent matrices over the even Grassmann
//! algebra, multiplied with `•` (matrix composition combined with the
//! wedge product on entries):
//!
//! ```text
//! (R̂^E)^i_j = ¼ Λ^{ik} R^{(E)}_{ABkj} e^A∧e^B
//! ρ̂         = 1 − (1 − 2R̂^E)^{1/2}
//! φ₁         = dx^j ((1−ρ̂)^{−1})^i_j ∇^E_{∂_i} φ
//! M₁(φ,ψ)    = Λ^{ij} ((1−2R̂^E)^{−1/2})^k_i ∧ ((1−2R̂^E)^{−1/2})^l_j
//!                ∧ ∇^E_{∂_k}φ ∧ ∇^E_{∂_l}ψ
//!              + q^{AB} (j(e_A)φ)(i(e_B)ψ)
//! ```
//!
//! `ρ̂` is also what the recursion produces: raising the first index
//! of the symmetric-degree-1, ħ-degree-0 component of `r` with `Λ`
//! gives the same matrix, and both satisfy the quadratic equation
//! `ρ̂ − R̂^E = ½ ρ̂•ρ̂`. The matrix power series terminate because
//! every entry has strictly positive Grassmann degree.

use crate::galgebra::ops::{insert, Insertion};
use crate::galgebra::{AlgebraElement, Idx};
use crate::geometry::{Curvature, Geometry};
use crate::quantize::{nabla_e_dir, FedosovData};
use crate::scalar::CScalar;
use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BracketError {
    #[error("r is built to degree {have} but the bracket needs degree {needed}")]
    InsufficientDegree { needed: u32, have: u32 },
    #[error("matrix entry at ({0},{1}) has a Grassmann-degree-0 part; series does not terminate")]
    NotNilpotent(usize, usize),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

/// A `2m × 2m` matrix over the even Grassmann algebra, with the
/// `•`-multiplication `(P•Q)^i_j = Σ_k P^i_k ∧ Q^k_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BulletElement {
    dim: usize,
    nvars: usize,
    entries: Vec<AlgebraElement>,
}

impl BulletElement {
    pub fn zero(dim: usize, nvars: usize) -> Self {
        BulletElement {
            dim,
            nvars,
            entries: vec![AlgebraElement::zero(nvars); dim * dim],
        }
    }

    /// The `•`-unit: identity matrix with Grassmann part 1.
    pub fn identity(dim: usize, nvars: usize) -> Self {
        let mut out = Self::zero(dim, nvars);
        for i in 0..dim {
            out.entries[i * dim + i] = AlgebraElement::one(nvars);
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> &AlgebraElement {
        &self.entries[i * self.dim + j]
    }

    /// Set entry `(i,j)`; the entry must be a `C₀` element of even
    /// Grassmann degree.
    pub fn set(&mut self, i: usize, j: usize, v: AlgebraElement) {
        assert!(
            v.is_c0() && v.terms().all(|(k, _)| k.deg_e() % 2 == 0),
            "bullet entries live in the even Grassmann algebra"
        );
        self.entries[i * self.dim + j] = v;
    }

    pub fn add(&self, other: &BulletElement) -> BulletElement {
        assert_eq!(self.dim, other.dim);
        BulletElement {
            dim: self.dim,
            nvars: self.nvars,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn sub(&self, other: &BulletElement) -> BulletElement {
        self.add(&other.scale_int(-1))
    }

    pub fn scale_int(&self, k: i64) -> BulletElement {
        BulletElement {
            dim: self.dim,
            nvars: self.nvars,
            entries: self.entries.iter().map(|e| e.scale_int(k)).collect(),
        }
    }

    pub fn scale_rat(&self, c: &BigRational) -> BulletElement {
        let sc = CScalar::from_real(crate::scalar::RationalExpr::constant(
            c.clone(),
            self.nvars,
        ));
        BulletElement {
            dim: self.dim,
            nvars: self.nvars,
            entries: self.entries.iter().map(|e| e.scale(&sc)).collect(),
        }
    }

    /// `(P•Q)^i_j = Σ_k P^i_k ∧ Q^k_j`.
    pub fn bullet_mul(&self, other: &BulletElement) -> BulletElement {
        assert_eq!(self.dim, other.dim);
        let mut out = Self::zero(self.dim, self.nvars);
        for i in 0..self.dim {
            for j in 0..self.dim {
                let mut acc = AlgebraElement::zero(self.nvars);
                for k in 0..self.dim {
                    acc.add_assign(&self.get(i, k).mul(other.get(k, j)));
                }
                out.entries[i * self.dim + j] = acc;
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    /// Whether every entry has strictly positive Grassmann degree
    /// (hence the matrix is `•`-nilpotent).
    pub fn is_strictly_positive(&self) -> bool {
        self.entries
            .iter()
            .all(|e| e.terms().all(|(k, _)| k.deg_e() > 0))
    }
}

/// Binomial coefficient `C(α, k) = α(α−1)…(α−k+1)/k!` with exact
/// rational `α`.
fn binomial(alpha: &BigRational, k: u32) -> BigRational {
    let mut num = BigRational::from_integer(BigInt::from(1));
    for i in 0..k {
        num *= alpha - BigRational::from_integer(BigInt::from(i));
    }
    let mut fact = BigInt::from(1);
    for i in 2..=k.max(1) {
        fact *= BigInt::from(i);
    }
    num / BigRational::from_integer(fact)
}

/// The binomial series `(1 + B)^α = Σ_k C(α,k) B^{•k}` for a strictly
/// Grassmann-positive (hence nilpotent) `B`; the series terminates
/// when the `•`-powers vanish.
pub fn binomial_series(
    b: &BulletElement,
    alpha: &BigRational,
) -> Result<BulletElement, BracketError> {
    for i in 0..b.dim {
        for j in 0..b.dim {
            if b.get(i, j).terms().any(|(k, _)| k.deg_e() == 0) {
                return Err(BracketError::NotNilpotent(i + 1, j + 1));
            }
        }
    }
    let mut out = BulletElement::identity(b.dim, b.nvars);
    let mut power = BulletElement::identity(b.dim, b.nvars);
    let mut k = 1u32;
    loop {
        power = power.bullet_mul(b);
        if power.is_zero() {
            break;
        }
        out = out.add(&power.scale_rat(&binomial(alpha, k)));
        k += 1;
    }
    Ok(out)
}

/// `R̂^E`: the curvature endomorphism matrix
/// `(R̂^E)^i_j = ¼ Λ^{ik} R^{(E)}_{ABkj} e^A∧e^B`.
pub fn hat_re(curv: &Curvature, geo: &Geometry) -> BulletElement {
    let dim = geo.dim();
    let n = geo.n();
    let quarter = BigRational::new(BigInt::from(1), BigInt::from(4));
    let mut out = BulletElement::zero(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            let mut acc = AlgebraElement::zero(dim);
            for k in 0..dim {
                let lam = geo.lambda().get(i, k);
                if lam.is_zero() {
                    continue;
                }
                for a in 0..n {
                    for b in 0..n {
                        let c = curv.re(a, b, k, j).mul(lam).scale_rat(&quarter);
                        if c.is_zero() {
                            continue;
                        }
                        acc.add_assign(&AlgebraElement::from_raw_term(
                            CScalar::from_real(c),
                            &[],
                            &[(a + 1) as Idx, (b + 1) as Idx],
                            &[],
                            0,
                        ));
                    }
                }
            }
            out.set(i, j, acc);
        }
    }
    out
}

/// `ρ̂` extracted from the recursion: the symmetric-degree-1,
/// ħ-degree-0 component of `r` with its first index raised by `Λ`.
/// Degrees `3..=n+1` of `r` carry every contribution.
pub fn hat_rho_from_r(data: &FedosovData) -> Result<BulletElement, BracketError> {
    let geo = data.geometry();
    let dim = geo.dim();
    let needed = geo.n() as u32 + 1;
    if data.k_max() < needed {
        return Err(BracketError::InsufficientDegree {
            needed,
            have: data.k_max(),
        });
    }
    let rho = data.r_sum().filter(|k| k.deg_s() == 1 && k.hpow == 0);
    let mut out = BulletElement::zero(dim, dim);
    for (key, c) in rho.terms() {
        debug_assert_eq!(key.deg_a(), 1);
        let k = (key.sym[0] - 1) as usize; // the ∨ index
        let j = (key.asym[0] - 1) as usize; // the ∧ index
        for i in 0..dim {
            let lam = geo.lambda().get(i, k);
            if lam.is_zero() {
                continue;
            }
            let mut entry = out.get(i, j).clone();
            entry.add_assign(&AlgebraElement::from_raw_term(
                c.scale_re(lam),
                &[],
                &key.gra,
                &[],
                0,
            ));
            out.set(i, j, entry);
        }
    }
    Ok(out)
}

/// `ρ̂` in closed form: `1 − (1 − 2R̂^E)^{1/2}`.
pub fn hat_rho_closed(curv: &Curvature, geo: &Geometry) -> Result<BulletElement, BracketError> {
    let re = hat_re(curv, geo);
    let half = BigRational::new(BigInt::from(1), BigInt::from(2));
    let sqrt = binomial_series(&re.scale_int(-2), &half)?;
    Ok(BulletElement::identity(geo.dim(), geo.dim()).sub(&sqrt))
}

/// Residual of the quadratic equation `ρ̂ − R̂^E − ½ ρ̂•ρ̂`; zero for
/// a correct `ρ̂`.
pub fn rho_quadratic_residual(rho: &BulletElement, re: &BulletElement) -> BulletElement {
    let half = BigRational::new(BigInt::from(1), BigInt::from(2));
    rho.sub(re).sub(&rho.bullet_mul(rho).scale_rat(&half))
}

/// `(1 − 2R̂^E)^{−1/2}`, the matrix entering `φ₁` and `M₁`.
fn inverse_sqrt_matrix(curv: &Curvature, geo: &Geometry) -> Result<BulletElement, BracketError> {
    let re = hat_re(curv, geo);
    let minus_half = BigRational::new(BigInt::from(-1), BigInt::from(2));
    binomial_series(&re.scale_int(-2), &minus_half)
}

/// The symmetric-degree-1 Taylor coefficient in closed form:
/// `φ₁ = dx^j ((1−ρ̂)^{−1})^i_j ∇^E_{∂_i}φ` with
/// `(1−ρ̂)^{−1} = (1−2R̂^E)^{−1/2}`.
pub fn phi_one(
    phi: &AlgebraElement,
    geo: &Geometry,
    curv: &Curvature,
) -> Result<AlgebraElement, BracketError> {
    if !phi.is_c0() {
        return Err(BracketError::Precondition(
            "phi_one expects a C₀ element".into(),
        ));
    }
    let dim = geo.dim();
    let s = inverse_sqrt_matrix(curv, geo)?;
    let grad: Vec<AlgebraElement> = (0..dim).map(|i| nabla_e_dir(phi, geo, i)).collect();
    let mut out = AlgebraElement::zero(dim);
    for j in 0..dim {
        let dxj = AlgebraElement::sym_coord((j + 1) as Idx, dim);
        for (i, grad_i) in grad.iter().enumerate() {
            if s.get(i, j).is_zero() || grad_i.is_zero() {
                continue;
            }
            out.add_assign(&dxj.mul(&s.get(i, j).mul(grad_i)));
        }
    }
    Ok(out)
}

/// The closed-form super-Poisson bracket `M₁(φ,ψ)`.
pub fn closed_form_m1(
    phi: &AlgebraElement,
    psi: &AlgebraElement,
    geo: &Geometry,
    curv: &Curvature,
) -> Result<AlgebraElement, BracketError> {
    if !phi.is_c0() || !psi.is_c0() {
        return Err(BracketError::Precondition(
            "closed_form_m1 expects C₀ elements".into(),
        ));
    }
    let dim = geo.dim();
    let n = geo.n();
    let s = inverse_sqrt_matrix(curv, geo)?;
    let grad_phi: Vec<AlgebraElement> = (0..dim).map(|i| nabla_e_dir(phi, geo, i)).collect();
    let grad_psi: Vec<AlgebraElement> = (0..dim).map(|i| nabla_e_dir(psi, geo, i)).collect();
    let mut out = AlgebraElement::zero(dim);
    // Λ^{ij} S^k_i ∧ S^l_j ∧ ∇^E_k φ ∧ ∇^E_l ψ
    for i in 0..dim {
        for j in 0..dim {
            let lam = geo.lambda().get(i, j);
            if lam.is_zero() {
                continue;
            }
            for (k, grad_phi_k) in grad_phi.iter().enumerate() {
                if s.get(k, i).is_zero() || grad_phi_k.is_zero() {
                    continue;
                }
                for (l, grad_psi_l) in grad_psi.iter().enumerate() {
                    if s.get(l, j).is_zero() || grad_psi_l.is_zero() {
                        continue;
                    }
                    let prod = s
                        .get(k, i)
                        .mul(s.get(l, j))
                        .mul(grad_phi_k)
                        .mul(grad_psi_l);
                    out.add_assign(&prod.scale(&CScalar::from_real(lam.clone())));
                }
            }
        }
    }
    // q^{AB} (j(e_A)φ)(i(e_B)ψ)
    for a in 0..n {
        for b in 0..n {
            let q = geo.q_inv().get(a, b);
            if q.is_zero() {
                continue;
            }
            let ja = insert(phi, Insertion::FrameRight((a + 1) as Idx));
            if ja.is_zero() {
                continue;
            }
            let ib = insert(psi, Insertion::FrameLeft((b + 1) as Idx));
            if ib.is_zero() {
                continue;
            }
            out.add_assign(&ja.mul(&ib).scale(&CScalar::from_real(q.clone())));
        }
    }
    Ok(out)
}
