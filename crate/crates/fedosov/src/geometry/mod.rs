//! Chart-level geometric input and its validation.
//!
//! A geometry consists of a symplectic form `ω` on a `2m`-dimensional
//! chart, a torsion-free symplectic connection with Christoffel
//! symbols `Γ^k_{ij}` (the coefficient of `∂_k` in `∇_{∂_i}∂_j`), a
//! symmetric invertible fibre metric `q` on a rank-`n` bundle, and a
//! compatible bundle connection with coefficients `A^B_{iC}` (the
//! coefficient of `e_B` in `∇^E_{∂_i} e_C`). Validation checks every
//! defining identity exactly and reports each violation with the
//! offending indices and the residual expression.
//!
//! Conventions, fixed here and locked by the identity suite:
//!
//! * `Λ^{ik} ω_{jk} = δ^i_j`, i.e. `Λ = −ω⁻¹` as matrices;
//! * `R^{M,l}{}_{kij} = ∂_i Γ^l_{jk} − ∂_j Γ^l_{ik}
//!    + Γ^m_{jk} Γ^l_{im} − Γ^m_{ik} Γ^l_{jm}`;
//! * `R^{(M)}_{klij} = ω_{km} R^{M,m}{}_{lij}` (symmetric in `k,l`);
//! * `R^{E,B}{}_{Aij}` analogous with `A^B_{iC}`, and
//!   `R^{(E)}_{ABij} = −q_{AC} R^{E,C}{}_{Bij}` (antisymmetric in
//!   `A,B`);
//! * as elements, `R^{(M)} = ¼ R^{(M)}_{klij} dx^k∨dx^l ⊗ 1 ⊗
//!   dx^i∧dx^j` and `R^{(E)} = ¼ R^{(E)}_{ABij} ⊗ e^A∧e^B ⊗
//!   dx^i∧dx^j`, and `R = R^{(M)} + R^{(E)}`.

pub mod file;

use crate::galgebra::sections::parse_section;
use crate::galgebra::{ops, AlgebraElement, Idx};
use crate::scalar::{CScalar, Chart, ExprMatrix, ParseError, RationalExpr};
use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

/// A rank-3 array of rational expressions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tensor3 {
    d0: usize,
    d1: usize,
    d2: usize,
    data: Vec<RationalExpr>,
}

impl Tensor3 {
    pub fn zeros(d0: usize, d1: usize, d2: usize, nvars: usize) -> Self {
        Tensor3 {
            d0,
            d1,
            d2,
            data: vec![RationalExpr::zero(nvars); d0 * d1 * d2],
        }
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> &RationalExpr {
        &self.data[(i * self.d1 + j) * self.d2 + k]
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, v: RationalExpr) {
        self.data[(i * self.d1 + j) * self.d2 + k] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|e| e.is_zero())
    }
}

/// One failed identity, with enough context to fix the input.
#[derive(Clone, Debug)]
pub struct Violation {
    pub identity: String,
    pub indices: Vec<usize>,
    pub residual: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} at {:?}: residual {}",
            self.identity, self.indices, self.residual
        )
    }
}

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("geometry validation failed:\n{}", .0.iter().map(|v| format!("  {v}")).collect::<Vec<_>>().join("\n"))]
    Invalid(Vec<Violation>),
    #[error("degenerate structure: {0}")]
    Degenerate(String),
}

/// Unvalidated chart data as written in a geometry file.
#[derive(Clone, Debug)]
pub struct GeometryInput {
    pub m: usize,
    pub n: usize,
    pub coords: Vec<String>,
    pub frame: Vec<String>,
    /// `ω_{ij}`, antisymmetric.
    pub omega: ExprMatrix,
    /// `Γ^k_{ij}` indexed `[k][i][j]`, 0-based.
    pub gamma: Tensor3,
    /// `q_{AB}`, symmetric.
    pub q: ExprMatrix,
    /// `A^B_{iC}` indexed `[B][i][C]`, 0-based.
    pub conn_e: Tensor3,
}

impl GeometryInput {
    /// An all-zero skeleton over standard names.
    pub fn empty(m: usize, n: usize) -> Self {
        let dim = 2 * m;
        GeometryInput {
            m,
            n,
            coords: (1..=dim).map(|i| format!("x{i}")).collect(),
            frame: (1..=n).map(|a| format!("e{a}")).collect(),
            omega: ExprMatrix::zeros(dim, dim),
            gamma: Tensor3::zeros(dim, dim, dim, dim),
            q: ExprMatrix::zeros(n, dim),
            conn_e: Tensor3::zeros(n, dim, n, dim),
        }
    }

    /// The flat model: block-canonical `ω` (`ω_{i,m+i} = 1`), zero
    /// Christoffels, identity fibre metric, zero bundle connection.
    pub fn flat(m: usize, n: usize) -> Self {
        let dim = 2 * m;
        let mut g = Self::empty(m, n);
        for i in 0..m {
            g.omega.set(i, m + i, RationalExpr::one(dim));
            g.omega.set(m + i, i, RationalExpr::from_int(-1, dim));
        }
        for a in 0..n {
            g.q.set(a, a, RationalExpr::one(dim));
        }
        g
    }

    /// Validate every identity; on success fixes the Poisson tensor
    /// `Λ` and the inverse fibre metric.
    pub fn validate(self) -> Result<Geometry, GeometryError> {
        let dim = 2 * self.m;
        let mut violations = Vec::new();
        let names = &self.coords;

        // ω antisymmetric.
        for i in 0..dim {
            for j in i..dim {
                let r = self.omega.get(i, j).add(self.omega.get(j, i));
                if !r.is_zero() {
                    violations.push(Violation {
                        identity: "omega antisymmetry ω_ij + ω_ji = 0".into(),
                        indices: vec![i + 1, j + 1],
                        residual: r.render(names),
                    });
                }
            }
        }
        // dω = 0.
        for i in 0..dim {
            for j in (i + 1)..dim {
                for k in (j + 1)..dim {
                    let r = self
                        .omega
                        .get(j, k)
                        .partial(i)
                        .add(&self.omega.get(k, i).partial(j))
                        .add(&self.omega.get(i, j).partial(k));
                    if !r.is_zero() {
                        violations.push(Violation {
                            identity: "closedness ∂_i ω_jk + ∂_j ω_ki + ∂_k ω_ij = 0".into(),
                            indices: vec![i + 1, j + 1, k + 1],
                            residual: r.render(names),
                        });
                    }
                }
            }
        }
        // Γ torsion-free.
        for k in 0..dim {
            for i in 0..dim {
                for j in (i + 1)..dim {
                    let r = self.gamma.get(k, i, j).sub(self.gamma.get(k, j, i));
                    if !r.is_zero() {
                        violations.push(Violation {
                            identity: "torsion Γ^k_ij − Γ^k_ji = 0".into(),
                            indices: vec![k + 1, i + 1, j + 1],
                            residual: r.render(names),
                        });
                    }
                }
            }
        }
        // ∇ω = 0.
        for i in 0..dim {
            for j in 0..dim {
                for k in (j + 1)..dim {
                    let mut r = self.omega.get(j, k).partial(i);
                    for l in 0..dim {
                        r = r
                            .sub(&self.gamma.get(l, i, j).mul(self.omega.get(l, k)))
                            .sub(&self.gamma.get(l, i, k).mul(self.omega.get(j, l)));
                    }
                    if !r.is_zero() {
                        violations.push(Violation {
                            identity: "symplectic connection (∇_i ω)_jk = 0".into(),
                            indices: vec![i + 1, j + 1, k + 1],
                            residual: r.render(names),
                        });
                    }
                }
            }
        }
        // q symmetric.
        for a in 0..self.n {
            for b in (a + 1)..self.n {
                let r = self.q.get(a, b).sub(self.q.get(b, a));
                if !r.is_zero() {
                    violations.push(Violation {
                        identity: "fibre metric symmetry q_AB − q_BA = 0".into(),
                        indices: vec![a + 1, b + 1],
                        residual: r.render(names),
                    });
                }
            }
        }
        // ∇^E q = 0 (compatibility).
        for i in 0..dim {
            for a in 0..self.n {
                for b in a..self.n {
                    let mut r = self.q.get(a, b).partial(i);
                    for c in 0..self.n {
                        r = r
                            .sub(&self.conn_e.get(c, i, a).mul(self.q.get(c, b)))
                            .sub(&self.conn_e.get(c, i, b).mul(self.q.get(a, c)));
                    }
                    if !r.is_zero() {
                        violations.push(Violation {
                            identity:
                                "metric compatibility ∂_i q_AB − A^C_iA q_CB − A^C_iB q_AC = 0"
                                    .into(),
                            indices: vec![i + 1, a + 1, b + 1],
                            residual: r.render(names),
                        });
                    }
                }
            }
        }

        if !violations.is_empty() {
            return Err(GeometryError::Invalid(violations));
        }

        // Λ^{ik} ω_{jk} = δ^i_j  ⇔  Λ = (ωᵀ)⁻¹ = −ω⁻¹.
        let lambda = self
            .omega
            .invert()
            .map_err(|_| GeometryError::Degenerate("omega has zero determinant".into()))?
            .neg();
        let q_inv = self
            .q
            .invert()
            .map_err(|_| GeometryError::Degenerate("fibre metric has zero determinant".into()))?;
        debug_assert!(lambda.mul(&self.omega.transpose()).is_identity());
        Ok(Geometry {
            input: self,
            lambda,
            q_inv,
        })
    }
}

/// Validated geometry with the derived Poisson tensor and inverse
/// fibre metric.
#[derive(Clone, Debug)]
pub struct Geometry {
    input: GeometryInput,
    lambda: ExprMatrix,
    q_inv: ExprMatrix,
}

impl Geometry {
    pub fn m(&self) -> usize {
        self.input.m
    }

    pub fn n(&self) -> usize {
        self.input.n
    }

    /// Chart dimension `2m` — also the variable count of every scalar.
    pub fn dim(&self) -> usize {
        2 * self.input.m
    }

    pub fn input(&self) -> &GeometryInput {
        &self.input
    }

    pub fn coords(&self) -> &[String] {
        &self.input.coords
    }

    pub fn frame(&self) -> &[String] {
        &self.input.frame
    }

    pub fn chart(&self) -> Chart {
        Chart::new(self.input.coords.clone())
    }

    pub fn omega(&self) -> &ExprMatrix {
        &self.input.omega
    }

    pub fn q(&self) -> &ExprMatrix {
        &self.input.q
    }

    /// `Λ^{ij}` with `Λ^{ik}ω_{jk} = δ^i_j` (0-based accessors).
    pub fn lambda(&self) -> &ExprMatrix {
        &self.lambda
    }

    /// `q^{AB}`, the inverse fibre metric.
    pub fn q_inv(&self) -> &ExprMatrix {
        &self.q_inv
    }

    pub fn gamma(&self) -> &Tensor3 {
        &self.input.gamma
    }

    pub fn conn_e(&self) -> &Tensor3 {
        &self.input.conn_e
    }

    /// Parse a section expression over this chart and frame.
    pub fn parse_section(&self, text: &str) -> Result<AlgebraElement, ParseError> {
        parse_section(text, &self.input.coords, &self.input.frame)
    }

    /// Parse a scalar expression over this chart.
    pub fn parse_scalar(&self, text: &str) -> Result<RationalExpr, ParseError> {
        crate::scalar::parse_expr(text, &self.input.coords)
    }

    /// Compute both curvature tensors and the curvature element `R`.
    pub fn curvature(&self) -> Result<Curvature, GeometryError> {
        Curvature::compute(self)
    }
}

/// Curvature data of a validated geometry.
#[derive(Clone, Debug)]
pub struct Curvature {
    /// `R^{(M)}_{klij}` indexed `[k][l][i][j]` (flattened), 0-based.
    rm: Vec<RationalExpr>,
    /// `R^{(E)}_{ABij}` indexed `[A][B][i][j]` (flattened), 0-based.
    re: Vec<RationalExpr>,
    dim: usize,
    n: usize,
    rm_element: AlgebraElement,
    re_element: AlgebraElement,
    element: AlgebraElement,
}

impl Curvature {
    pub fn compute(geo: &Geometry) -> Result<Curvature, GeometryError> {
        let dim = geo.dim();
        let n = geo.n();
        let nv = dim;
        let gamma = geo.gamma();
        let ae = geo.conn_e();
        let mut violations = Vec::new();

        // R^{M,l}_{kij}
        let mut rm_up = vec![RationalExpr::zero(nv); dim * dim * dim * dim];
        let idx4 = |a: usize, b: usize, c: usize, d: usize| ((a * dim + b) * dim + c) * dim + d;
        for l in 0..dim {
            for k in 0..dim {
                for i in 0..dim {
                    for j in 0..dim {
                        let mut r = gamma
                            .get(l, j, k)
                            .partial(i)
                            .sub(&gamma.get(l, i, k).partial(j));
                        for mm in 0..dim {
                            r = r
                                .add(&gamma.get(mm, j, k).mul(gamma.get(l, i, mm)))
                                .sub(&gamma.get(mm, i, k).mul(gamma.get(l, j, mm)));
                        }
                        rm_up[idx4(l, k, i, j)] = r;
                    }
                }
            }
        }
        // Lower with ω: R^{(M)}_{klij} = ω_{km} R^{M,m}_{lij}
        let mut rm = vec![RationalExpr::zero(nv); dim * dim * dim * dim];
        for k in 0..dim {
            for l in 0..dim {
                for i in 0..dim {
                    for j in 0..dim {
                        let mut r = RationalExpr::zero(nv);
                        for mm in 0..dim {
                            r = r.add(&geo.omega().get(k, mm).mul(&rm_up[idx4(mm, l, i, j)]));
                        }
                        rm[idx4(k, l, i, j)] = r;
                    }
                }
            }
        }
        // R^{E,B}_{Aij}
        let idx4e = |a: usize, b: usize, c: usize, d: usize| ((a * n + b) * dim + c) * dim + d;
        let mut re_up = vec![RationalExpr::zero(nv); n * n * dim * dim];
        for b in 0..n {
            for a in 0..n {
                for i in 0..dim {
                    for j in 0..dim {
                        let mut r = ae.get(b, j, a).partial(i).sub(&ae.get(b, i, a).partial(j));
                        for c in 0..n {
                            r = r
                                .add(&ae.get(c, j, a).mul(ae.get(b, i, c)))
                                .sub(&ae.get(c, i, a).mul(ae.get(b, j, c)));
                        }
                        re_up[idx4e(b, a, i, j)] = r;
                    }
                }
            }
        }
        // Lower with −q: R^{(E)}_{ABij} = −q_{AC} R^{E,C}_{Bij}
        let mut re = vec![RationalExpr::zero(nv); n * n * dim * dim];
        for a in 0..n {
            for b in 0..n {
                for i in 0..dim {
                    for j in 0..dim {
                        let mut r = RationalExpr::zero(nv);
                        for c in 0..n {
                            r = r.sub(&geo.q().get(a, c).mul(&re_up[idx4e(c, b, i, j)]));
                        }
                        re[idx4e(a, b, i, j)] = r;
                    }
                }
            }
        }

        // Symmetry checks.
        for k in 0..dim {
            for l in (k + 1)..dim {
                for i in 0..dim {
                    for j in 0..dim {
                        let r = rm[idx4(k, l, i, j)].sub(&rm[idx4(l, k, i, j)]);
                        if !r.is_zero() {
                            violations.push(Violation {
                                identity: "R^(M) symmetry in first slot pair".into(),
                                indices: vec![k + 1, l + 1, i + 1, j + 1],
                                residual: r.render(geo.coords()),
                            });
                        }
                    }
                }
            }
        }
        for a in 0..n {
            for b in a..n {
                for i in 0..dim {
                    for j in 0..dim {
                        let r = re[idx4e(a, b, i, j)].add(&re[idx4e(b, a, i, j)]);
                        if !r.is_zero() {
                            violations.push(Violation {
                                identity: "R^(E) antisymmetry in first slot pair".into(),
                                indices: vec![a + 1, b + 1, i + 1, j + 1],
                                residual: r.render(geo.coords()),
                            });
                        }
                    }
                }
            }
        }
        if !violations.is_empty() {
            return Err(GeometryError::Invalid(violations));
        }

        // Assemble the elements with the ¼-factors.
        let quarter = BigRational::new(BigInt::from(1), BigInt::from(4));
        let mut rm_element = AlgebraElement::zero(nv);
        for k in 0..dim {
            for l in 0..dim {
                for i in 0..dim {
                    for j in 0..dim {
                        let c = rm[idx4(k, l, i, j)].scale_rat(&quarter);
                        if c.is_zero() {
                            continue;
                        }
                        rm_element.add_assign(&AlgebraElement::from_raw_term(
                            CScalar::from_real(c),
                            &[(k + 1) as Idx, (l + 1) as Idx],
                            &[],
                            &[(i + 1) as Idx, (j + 1) as Idx],
                            0,
                        ));
                    }
                }
            }
        }
        let mut re_element = AlgebraElement::zero(nv);
        for a in 0..n {
            for b in 0..n {
                for i in 0..dim {
                    for j in 0..dim {
                        let c = re[idx4e(a, b, i, j)].scale_rat(&quarter);
                        if c.is_zero() {
                            continue;
                        }
                        re_element.add_assign(&AlgebraElement::from_raw_term(
                            CScalar::from_real(c),
                            &[],
                            &[(a + 1) as Idx, (b + 1) as Idx],
                            &[(i + 1) as Idx, (j + 1) as Idx],
                            0,
                        ));
                    }
                }
            }
        }
        let element = rm_element.add(&re_element);

        // First Bianchi identity in the algebra: δR = 0.
        let dr = ops::delta(&element);
        if !dr.is_zero() {
            return Err(GeometryError::Invalid(vec![Violation {
                identity: "δR = 0".into(),
                indices: vec![],
                residual: crate::galgebra::display::render_element(
                    &dr,
                    geo.coords(),
                    geo.frame(),
                ),
            }]));
        }

        Ok(Curvature {
            rm,
            re,
            dim,
            n,
            rm_element,
            re_element,
            element,
        })
    }

    /// `R^{(M)}_{klij}` (0-based indices).
    pub fn rm(&self, k: usize, l: usize, i: usize, j: usize) -> &RationalExpr {
        &self.rm[((k * self.dim + l) * self.dim + i) * self.dim + j]
    }

    /// `R^{(E)}_{ABij}` (0-based indices).
    pub fn re(&self, a: usize, b: usize, i: usize, j: usize) -> &RationalExpr {
        &self.re[((a * self.n + b) * self.dim + i) * self.dim + j]
    }

    pub fn rm_element(&self) -> &AlgebraElement {
        &self.rm_element
    }

    pub fn re_element(&self) -> &AlgebraElement {
        &self.re_element
    }

    /// The combined curvature element `R`.
    pub fn element(&self) -> &AlgebraElement {
        &self.element
    }

    pub fn is_flat(&self) -> bool {
        self.element.is_zero()
    }
}

/// Heß symplectization: given any torsion-free Christoffels `Γ̃` and a
/// symplectic `ω`, return the Christoffels of a torsion-free
/// connection with `∇ω = 0`:
///
/// ```text
/// Γ^m_{ij} = Γ̃^m_{ij} + ⅓ [ (∇̃_i ω)_{jk} + (∇̃_j ω)_{ik} ] Λ^{mk}
/// ```
pub fn hess_symplectize(tilde: &Tensor3, omega: &ExprMatrix) -> Result<Tensor3, GeometryError> {
    let dim = omega.dim();
    let nv = omega.nvars();
    let lambda = omega
        .invert()
        .map_err(|_| GeometryError::Degenerate("omega has zero determinant".into()))?
        .neg();
    let third = BigRational::new(BigInt::from(1), BigInt::from(3));
    // (∇̃_i ω)_{jk}
    let nabla_omega = |i: usize, j: usize, k: usize| -> RationalExpr {
        let mut r = omega.get(j, k).partial(i);
        for l in 0..dim {
            r = r
                .sub(&tilde.get(l, i, j).mul(omega.get(l, k)))
                .sub(&tilde.get(l, i, k).mul(omega.get(j, l)));
        }
        r
    };
    let mut out = Tensor3::zeros(dim, dim, dim, nv);
    for mm in 0..dim {
        for i in 0..dim {
            for j in 0..dim {
                let mut corr = RationalExpr::zero(nv);
                for k in 0..dim {
                    let b = nabla_omega(i, j, k).add(&nabla_omega(j, i, k));
                    corr = corr.add(&b.mul(lambda.get(mm, k)));
                }
                out.set(mm, i, j, tilde.get(mm, i, j).add(&corr.scale_rat(&third)));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_geometry_validates() {
        let geo = GeometryInput::flat(1, 2).validate().unwrap();
        // Λ^{12} = 1 under Λ^{ik}ω_{jk} = δ^i_j with ω_{12} = 1.
        assert!(geo.lambda().get(0, 1).is_one());
        assert_eq!(*geo.lambda().get(1, 0), RationalExpr::from_int(-1, 2));
        let curv = geo.curvature().unwrap();
        assert!(curv.is_flat());
    }

    #[test]
    fn torsion_violation_reported() {
        let mut g = GeometryInput::flat(1, 2);
        g.gamma.set(0, 0, 1, RationalExpr::one(2)); // Γ^1_{12} ≠ Γ^1_{21}
        let err = g.validate().unwrap_err();
        match err {
            GeometryError::Invalid(vs) => {
                assert!(vs.iter().any(|v| v.identity.contains("torsion")));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn compatibility_violation_reported() {
        let mut g = GeometryInput::flat(1, 1);
        // q_11 = 1 + x1^2 but A = 0: ∂_1 q_11 ≠ 2 A^1_11 q_11.
        let one = RationalExpr::one(2);
        g.q.set(0, 0, one.add(&RationalExpr::coord(0, 2).pow(2)));
        let err = g.validate().unwrap_err();
        match err {
            GeometryError::Invalid(vs) => {
                let v = vs
                    .iter()
                    .find(|v| v.identity.contains("compatibility"))
                    .expect("compatibility violation");
                assert_eq!(v.residual, "2*x1");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn hess_on_flat_omega_is_identity_map() {
        let g = GeometryInput::flat(2, 2);
        let dim = 4;
        let tilde = Tensor3::zeros(dim, dim, dim, dim);
        let fixed = hess_symplectize(&tilde, &g.omega).unwrap();
        assert!(fixed.is_zero());
    }

    #[test]
    fn hess_curved_omega_known_values() {
        // ω_{12} = 1 + x1², Γ̃ = 0 ⇒
        //   Γ^1_{11} = (2/3) w'/w,  Γ^2_{12} = (1/3) w'/w,  rest 0.
        let nv = 2;
        let one = RationalExpr::one(nv);
        let w = one.add(&RationalExpr::coord(0, nv).pow(2));
        let mut omega = ExprMatrix::zeros(2, nv);
        omega.set(0, 1, w.clone());
        omega.set(1, 0, w.neg());
        let tilde = Tensor3::zeros(2, 2, 2, nv);
        let gamma = hess_symplectize(&tilde, &omega).unwrap();
        let wp = w.partial(0);
        let expect_111 = wp
            .scale_rat(&BigRational::new(2.into(), 3.into()))
            .div(&w)
            .unwrap();
        let expect_212 = wp
            .scale_rat(&BigRational::new(1.into(), 3.into()))
            .div(&w)
            .unwrap();
        assert_eq!(*gamma.get(0, 0, 0), expect_111);
        assert_eq!(*gamma.get(1, 0, 1), expect_212);
        assert_eq!(*gamma.get(1, 1, 0), expect_212);
        assert!(gamma.get(0, 0, 1).is_zero());
        assert!(gamma.get(0, 1, 1).is_zero());
        assert!(gamma.get(1, 1, 1).is_zero());

        // The output must pass the full symplectic validation.
        let mut g = GeometryInput::flat(1, 2);
        g.omega = omega;
        g.gamma = gamma;
        assert!(g.validate().is_ok());
    }

    #[test]
    fn curved_bundle_curvature_components() {
        // A^2_{11} = x2, A^1_{12} = −x2 over the flat base:
        // R^{E,B}_{A12} = −∂_2 A^B_{1A}, so R^{(E)}_{12,12} = −1.
        let nv = 2;
        let mut g = GeometryInput::flat(1, 2);
        let x2 = RationalExpr::coord(1, nv);
        g.conn_e.set(1, 0, 0, x2.clone());
        g.conn_e.set(0, 0, 1, x2.neg());
        let geo = g.validate().unwrap();
        let curv = geo.curvature().unwrap();
        assert_eq!(*curv.re(0, 1, 0, 1), RationalExpr::from_int(-1, nv));
        assert_eq!(*curv.re(1, 0, 0, 1), RationalExpr::from_int(1, nv));
        assert!(curv.rm_element().is_zero());
        // R = −(1 ⊗ e¹∧e² ⊗ dx¹∧dx²)
        let expect =
            AlgebraElement::from_raw_term(CScalar::from_int(-1, nv), &[], &[1, 2], &[1, 2], 0);
        assert_eq!(*curv.element(), expect);
    }
}
