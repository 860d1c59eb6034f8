//! Deformation quantization of Grassmann-valued observables on a
//! symplectic chart, done exactly.
//!
//! The crate implements, with exact rational-function coefficients:
//!
//! * the graded algebra of formal Weyl–Grassmann tensors with its
//!   undeformed product, degree maps, insertion operators and the
//!   `δ`, `δ*`, `δ⁻¹`, `σ` machinery ([`galgebra`]);
//! * chart-level geometric input — symplectic form, symplectic
//!   connection, fibre metric, compatible bundle connection — with full
//!   identity validation, Heß symplectization and curvature tensors
//!   ([`geometry`]);
//! * the fibrewise deformed product, the covariant derivative, the
//!   recursive construction of the flatness correction `r`, the flat
//!   derivation `D`, Taylor series `τ`, the induced star product and
//!   its `ħ`-order coefficients ([`quantize`]);
//! * the closed-form super-Poisson bracket built from nilpotent
//!   curvature matrices, cross-validated against the recursive route
//!   ([`bracket`]);
//! * identity suites and a batch CLI ([`checks`], [`cli`]).
//!
//! Every advertised identity is exact: no floating point appears
//! anywhere in the core.
//!
//! ```
//! use fedosov::geometry::GeometryInput;
//! use fedosov::quantize::{self, FedosovData};
//!
//! // Flat chart, rank-2 trivial bundle.
//! let geo = GeometryInput::flat(1, 2).validate().unwrap();
//! let data = FedosovData::build(geo, 6).unwrap();
//! let phi = data.geometry().parse_section("x1").unwrap();
//! let psi = data.geometry().parse_section("x2").unwrap();
//! let star = quantize::star(&phi, &psi, &data, 1).unwrap();
//! let m1 = quantize::extract_mt(&star, 1);
//! assert_eq!(m1, data.geometry().parse_section("1").unwrap());
//! ```

pub mod bracket;
pub mod checks;
pub mod cli;
pub mod galgebra;
pub mod geometry;
pub mod quantize;
pub mod scalar;

pub use galgebra::AlgebraElement;
pub use geometry::{Geometry, GeometryInput};
pub use quantize::FedosovData;
pub use scalar::{CScalar, Chart, RationalExpr};
