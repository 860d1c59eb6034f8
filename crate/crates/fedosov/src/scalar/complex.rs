//! Complex scalars as exact pairs of rational functions.
//!
//! The imaginary unit enters the deformed product only through the
//! prefactors `(i/2)^k`, so keeping real and imaginary parts as
//! separate [`RationalExpr`] values makes every coefficient exact.

use super::ratexpr::{RationalExpr, ScalarError};
use num_bigint::BigInt;
use num_rational::BigRational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CScalar {
    pub re: RationalExpr,
    pub im: RationalExpr,
}

impl CScalar {
    pub fn zero(nvars: usize) -> Self {
        CScalar {
            re: RationalExpr::zero(nvars),
            im: RationalExpr::zero(nvars),
        }
    }

    pub fn one(nvars: usize) -> Self {
        CScalar {
            re: RationalExpr::one(nvars),
            im: RationalExpr::zero(nvars),
        }
    }

    pub fn i(nvars: usize) -> Self {
        CScalar {
            re: RationalExpr::zero(nvars),
            im: RationalExpr::one(nvars),
        }
    }

    pub fn from_real(re: RationalExpr) -> Self {
        let nvars = re.nvars();
        CScalar {
            re,
            im: RationalExpr::zero(nvars),
        }
    }

    pub fn from_int(k: i64, nvars: usize) -> Self {
        Self::from_real(RationalExpr::from_int(k, nvars))
    }

    pub fn nvars(&self) -> usize {
        self.re.nvars()
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn add(&self, other: &CScalar) -> CScalar {
        CScalar {
            re: self.re.add(&other.re),
            im: self.im.add(&other.im),
        }
    }

    pub fn sub(&self, other: &CScalar) -> CScalar {
        CScalar {
            re: self.re.sub(&other.re),
            im: self.im.sub(&other.im),
        }
    }

    pub fn neg(&self) -> CScalar {
        CScalar {
            re: self.re.neg(),
            im: self.im.neg(),
        }
    }

    pub fn mul(&self, other: &CScalar) -> CScalar {
        // Fast path: real * complex is by far the common case.
        if self.im.is_zero() {
            return other.scale_re(&self.re);
        }
        if other.im.is_zero() {
            return self.scale_re(&other.re);
        }
        CScalar {
            re: self.re.mul(&other.re).sub(&self.im.mul(&other.im)),
            im: self.re.mul(&other.im).add(&self.im.mul(&other.re)),
        }
    }

    pub fn div(&self, other: &CScalar) -> Result<CScalar, ScalarError> {
        if other.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        if other.im.is_zero() {
            return Ok(CScalar {
                re: self.re.div(&other.re)?,
                im: self.im.div(&other.re)?,
            });
        }
        let norm = other.re.mul(&other.re).add(&other.im.mul(&other.im));
        let re = self.re.mul(&other.re).add(&self.im.mul(&other.im));
        let im = self.im.mul(&other.re).sub(&self.re.mul(&other.im));
        Ok(CScalar {
            re: re.div(&norm)?,
            im: im.div(&norm)?,
        })
    }

    pub fn conj(&self) -> CScalar {
        CScalar {
            re: self.re.clone(),
            im: self.im.neg(),
        }
    }

    pub fn scale_re(&self, c: &RationalExpr) -> CScalar {
        CScalar {
            re: self.re.mul(c),
            im: self.im.mul(c),
        }
    }

    pub fn scale_rat(&self, c: &BigRational) -> CScalar {
        CScalar {
            re: self.re.scale_rat(c),
            im: self.im.scale_rat(c),
        }
    }

    pub fn scale_int(&self, k: i64) -> CScalar {
        CScalar {
            re: self.re.scale_int(k),
            im: self.im.scale_int(k),
        }
    }

    /// Multiply by `i^k`.
    pub fn mul_i_pow(&self, k: u32) -> CScalar {
        match k % 4 {
            0 => self.clone(),
            1 => CScalar {
                re: self.im.neg(),
                im: self.re.clone(),
            },
            2 => self.neg(),
            _ => CScalar {
                re: self.im.clone(),
                im: self.re.neg(),
            },
        }
    }

    pub fn partial(&self, i: usize) -> CScalar {
        CScalar {
            re: self.re.partial(i),
            im: self.im.partial(i),
        }
    }

    /// `(i/2)^k` — the prefactor carried by one contraction order of
    /// the fibrewise product.
    pub fn i_half_pow(k: u32, nvars: usize) -> CScalar {
        let half = BigRational::new(BigInt::from(1), BigInt::from(2));
        let mut mag = BigRational::from_integer(BigInt::from(1));
        for _ in 0..k {
            mag *= &half;
        }
        CScalar::from_real(RationalExpr::constant(mag, nvars)).mul_i_pow(k)
    }

    /// `(-2i)^k` — the inverse factor, used when reading coefficients
    /// relative to `(i*hbar/2)^k`.
    pub fn minus_two_i_pow(k: u32, nvars: usize) -> CScalar {
        let mut mag = BigRational::from_integer(BigInt::from(1));
        for _ in 0..k {
            mag *= BigRational::from_integer(BigInt::from(-2));
        }
        CScalar::from_real(RationalExpr::constant(mag, nvars)).mul_i_pow(k)
    }

    /// Deterministic rendering; `i` denotes the imaginary unit.
    pub fn render(&self, names: &[String]) -> String {
        if self.im.is_zero() {
            return self.re.render(names);
        }
        let im_part = format!("i*({})", self.im.render(names));
        if self.re.is_zero() {
            im_part
        } else {
            format!("{} + {}", self.re.render(names), im_part)
        }
    }
}

impl std::fmt::Display for CScalar {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let names: Vec<String> = (1..=self.nvars()).map(|i| format!("x{i}")).collect();
        write!(f, "{}", self.render(&names))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn i_squared_is_minus_one() {
        let i = CScalar::i(1);
        assert_eq!(i.mul(&i), CScalar::from_int(-1, 1));
    }

    #[test]
    fn conjugation_is_antilinear() {
        let i = CScalar::i(1);
        let f = CScalar {
            re: RationalExpr::coord(0, 1),
            im: RationalExpr::from_int(2, 1),
        };
        assert_eq!(i.mul(&f).conj(), i.neg().mul(&f.conj()));
    }

    #[test]
    fn division_round_trip() {
        let a = CScalar {
            re: RationalExpr::coord(0, 1),
            im: RationalExpr::from_int(1, 1),
        };
        let b = CScalar {
            re: RationalExpr::from_int(3, 1),
            im: RationalExpr::coord(0, 1),
        };
        let q = a.div(&b).unwrap();
        assert_eq!(q.mul(&b), a);
    }

    #[test]
    fn prefactor_inverse_pair() {
        for k in 0..5 {
            let p = CScalar::i_half_pow(k, 1).mul(&CScalar::minus_two_i_pow(k, 1));
            assert_eq!(p, CScalar::one(1));
        }
    }
}
