//! Exact multivariate rational functions: the coefficient field.
//!
//! Every value is kept in canonical form — numerator and denominator
//! coprime, denominator monic under the graded-lex order — so equality
//! is plain structural comparison.

use super::poly::{gcd, render_poly, MultiPoly};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("singular matrix: zero determinant")]
    SingularMatrix,
}

/// A quotient of two multivariate polynomials in canonical form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalExpr {
    num: MultiPoly,
    den: MultiPoly,
}

impl RationalExpr {
    pub fn zero(nvars: usize) -> Self {
        RationalExpr {
            num: MultiPoly::zero(nvars),
            den: MultiPoly::one(nvars),
        }
    }

    pub fn one(nvars: usize) -> Self {
        RationalExpr {
            num: MultiPoly::one(nvars),
            den: MultiPoly::one(nvars),
        }
    }

    pub fn from_int(k: i64, nvars: usize) -> Self {
        RationalExpr {
            num: MultiPoly::from_int(k, nvars),
            den: MultiPoly::one(nvars),
        }
    }

    pub fn constant(c: BigRational, nvars: usize) -> Self {
        RationalExpr {
            num: MultiPoly::constant(c, nvars),
            den: MultiPoly::one(nvars),
        }
    }

    pub fn from_rational(p: i64, q: i64, nvars: usize) -> Self {
        assert!(q != 0);
        Self::constant(
            BigRational::new(BigInt::from(p), BigInt::from(q)),
            nvars,
        )
    }

    /// The coordinate `x_i` (0-based).
    pub fn coord(i: usize, nvars: usize) -> Self {
        RationalExpr {
            num: MultiPoly::var(i, nvars),
            den: MultiPoly::one(nvars),
        }
    }

    pub fn from_poly(p: MultiPoly) -> Self {
        let nvars = p.nvars();
        RationalExpr {
            num: p,
            den: MultiPoly::one(nvars),
        }
    }

    /// Build from a numerator/denominator pair, reducing to canonical
    /// form. Fails on a zero denominator.
    pub fn new(num: MultiPoly, den: MultiPoly) -> Result<Self, ScalarError> {
        if den.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(Self::canonical(num, den))
    }

    fn canonical(num: MultiPoly, den: MultiPoly) -> Self {
        debug_assert!(!den.is_zero());
        let nvars = num.nvars();
        if num.is_zero() {
            return RationalExpr::zero(nvars);
        }
        let (num, den) = if den.is_constant() {
            let c = den.as_constant().unwrap();
            (num.scale(&c.recip()), MultiPoly::one(nvars))
        } else {
            let g = gcd(&num, &den);
            let num = num.div_exact(&g).expect("gcd must divide numerator");
            let den = den.div_exact(&g).expect("gcd must divide denominator");
            let lc = den.leading_coeff();
            (num.scale(&lc.recip()), den.monic())
        };
        RationalExpr { num, den }
    }

    pub fn nvars(&self) -> usize {
        self.num.nvars()
    }

    pub fn numerator(&self) -> &MultiPoly {
        &self.num
    }

    pub fn denominator(&self) -> &MultiPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_one()
    }

    pub fn as_constant(&self) -> Option<BigRational> {
        if self.den.is_one() {
            self.num.as_constant()
        } else {
            None
        }
    }

    pub fn add(&self, other: &RationalExpr) -> RationalExpr {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.den.is_one() && other.den.is_one() {
            return RationalExpr::from_poly(self.num.add(&other.num));
        }
        if self.den == other.den {
            return Self::canonical(self.num.add(&other.num), self.den.clone());
        }
        let num = self.num.mul(&other.den).add(&other.num.mul(&self.den));
        let den = self.den.mul(&other.den);
        Self::canonical(num, den)
    }

    pub fn neg(&self) -> RationalExpr {
        RationalExpr {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, other: &RationalExpr) -> RationalExpr {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &RationalExpr) -> RationalExpr {
        if self.is_zero() || other.is_zero() {
            return RationalExpr::zero(self.nvars());
        }
        if self.is_one() {
            return other.clone();
        }
        if other.is_one() {
            return self.clone();
        }
        // Cross-cancel first; the factors are then pairwise coprime and
        // only the monic normalization remains.
        let g1 = gcd(&self.num, &other.den);
        let g2 = gcd(&other.num, &self.den);
        let n1 = self.num.div_exact(&g1).unwrap();
        let d2 = other.den.div_exact(&g1).unwrap();
        let n2 = other.num.div_exact(&g2).unwrap();
        let d1 = self.den.div_exact(&g2).unwrap();
        let num = n1.mul(&n2);
        let den = d1.mul(&d2);
        if den.is_constant() {
            let c = den.as_constant().unwrap();
            RationalExpr {
                num: num.scale(&c.recip()),
                den: MultiPoly::one(self.nvars()),
            }
        } else {
            let lc = den.leading_coeff();
            RationalExpr {
                num: num.scale(&lc.recip()),
                den: den.monic(),
            }
        }
    }

    pub fn div(&self, other: &RationalExpr) -> Result<RationalExpr, ScalarError> {
        if other.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(self.mul(&other.recip()?))
    }

    pub fn recip(&self) -> Result<RationalExpr, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        // num/den canonical implies den/num canonical after re-scaling.
        let lc = self.num.leading_coeff();
        Ok(RationalExpr {
            num: self.den.scale(&lc.recip()),
            den: self.num.monic(),
        })
    }

    pub fn pow(&self, e: u32) -> RationalExpr {
        let mut out = RationalExpr::one(self.nvars());
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    pub fn scale_rat(&self, c: &BigRational) -> RationalExpr {
        if c.is_zero() {
            return RationalExpr::zero(self.nvars());
        }
        RationalExpr {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    pub fn scale_int(&self, k: i64) -> RationalExpr {
        self.scale_rat(&BigRational::from_integer(BigInt::from(k)))
    }

    /// Exact partial derivative (quotient rule) with respect to
    /// variable `i` (0-based).
    pub fn partial(&self, i: usize) -> RationalExpr {
        if self.den.is_one() {
            return RationalExpr::from_poly(self.num.partial(i));
        }
        let num = self
            .num
            .partial(i)
            .mul(&self.den)
            .sub(&self.num.mul(&self.den.partial(i)));
        let den = self.den.mul(&self.den);
        Self::canonical(num, den)
    }

    /// Deterministic rendering with the given variable names; the
    /// output re-parses to the same value.
    pub fn render(&self, names: &[String]) -> String {
        if self.den.is_one() {
            render_poly(&self.num, names)
        } else {
            format!(
                "({})/({})",
                render_poly(&self.num, names),
                render_poly(&self.den, names)
            )
        }
    }

    fn default_names(&self) -> Vec<String> {
        (1..=self.nvars()).map(|i| format!("x{i}")).collect()
    }
}

impl std::fmt::Display for RationalExpr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.render(&self.default_names()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: usize) -> RationalExpr {
        RationalExpr::coord(i, 2)
    }

    #[test]
    fn cancellation_to_one() {
        let a = x(0).div(&x(0)).unwrap();
        assert!(a.is_one());
    }

    #[test]
    fn gcd_reduction_in_add() {
        // x2/(1+x2) + 1/(1+x2) = 1
        let one = RationalExpr::one(2);
        let den = one.add(&x(1));
        let a = x(1).div(&den).unwrap();
        let b = one.div(&den).unwrap();
        assert!(a.add(&b).is_one());
    }

    #[test]
    fn mul_cancels_cross_factors() {
        // (x1/(1+x2)) * (1+x2) = x1
        let one = RationalExpr::one(2);
        let den = one.add(&x(1));
        let a = x(0).div(&den).unwrap();
        assert_eq!(a.mul(&den), x(0));
    }

    #[test]
    fn quotient_rule() {
        // d/dx1 ( 1/(1+x1^2) ) = -2 x1 / (1+x1^2)^2
        let one = RationalExpr::one(2);
        let den = one.add(&x(0).mul(&x(0)));
        let f = one.div(&den).unwrap();
        let expect = x(0)
            .scale_int(-2)
            .div(&den.mul(&den))
            .unwrap();
        assert_eq!(f.partial(0), expect);
    }

    #[test]
    fn mixed_partials_commute() {
        let one = RationalExpr::one(2);
        let f = x(0)
            .mul(&x(1))
            .add(&one)
            .div(&one.add(&x(0).mul(&x(0))).add(&x(1)))
            .unwrap();
        assert_eq!(f.partial(0).partial(1), f.partial(1).partial(0));
    }

    #[test]
    fn field_inverse() {
        let one = RationalExpr::one(2);
        let f = x(0).add(&one).div(&x(1)).unwrap();
        assert!(f.mul(&f.recip().unwrap()).is_one());
    }

    #[test]
    fn division_by_zero_reported() {
        let z = RationalExpr::zero(2);
        assert_eq!(x(0).div(&z), Err(ScalarError::DivisionByZero));
    }
}
