//! Sparse multivariate polynomials over the rationals.
//!
//! Monomials are ordered graded-lexicographically (total degree first,
//! then exponent of the first variable, and so on). This order is what
//! makes leading terms, canonical gcd normalization and the printed
//! form deterministic.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::collections::BTreeMap;

/// Exponent vector of a monomial. The length equals the number of
/// chart variables and is fixed per computation.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u16>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    /// The monomial `x_i` (0-based variable index).
    pub fn var(i: usize, nvars: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a.checked_add(*b).expect("monomial exponent overflow"))
                .collect(),
        )
    }

    /// Whether `self` divides `other` componentwise.
    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `other / self`; caller must ensure divisibility.
    pub fn div_into(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| b - a).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        debug_assert_eq!(self.0.len(), other.0.len());
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A multivariate polynomial with exact rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiPoly {
    nvars: usize,
    terms: BTreeMap<Monomial, BigRational>,
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> Self {
        MultiPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(BigRational::one(), nvars)
    }

    pub fn constant(c: BigRational, nvars: usize) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::one(nvars), c);
        }
        MultiPoly { nvars, terms }
    }

    pub fn from_int(k: i64, nvars: usize) -> Self {
        Self::constant(BigRational::from_integer(BigInt::from(k)), nvars)
    }

    /// The variable `x_i` (0-based).
    pub fn var(i: usize, nvars: usize) -> Self {
        assert!(i < nvars, "variable index out of range");
        let mut terms = BTreeMap::new();
        terms.insert(Monomial::var(i, nvars), BigRational::one());
        MultiPoly { nvars, terms }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .iter()
                .next()
                .map(|(m, c)| m.is_one() && c.is_one())
                .unwrap_or(false)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.len() <= 1 && self.terms.keys().all(|m| m.is_one())
    }

    /// The constant value, if the polynomial is constant.
    pub fn as_constant(&self) -> Option<BigRational> {
        if self.terms.is_empty() {
            return Some(BigRational::zero());
        }
        if self.is_constant() {
            return self.terms.values().next().cloned();
        }
        None
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|m| m.total_degree())
            .max()
            .unwrap_or(0)
    }

    /// Leading (graded-lex maximal) term.
    pub fn leading(&self) -> Option<(&Monomial, &BigRational)> {
        self.terms.iter().next_back()
    }

    pub fn leading_coeff(&self) -> BigRational {
        self.leading()
            .map(|(_, c)| c.clone())
            .unwrap_or_else(BigRational::zero)
    }

    fn insert_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get() + &c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &MultiPoly) -> MultiPoly {
        assert_eq!(self.nvars, other.nvars, "variable count mismatch");
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert_term(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> MultiPoly {
        MultiPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &MultiPoly) -> MultiPoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &MultiPoly) -> MultiPoly {
        assert_eq!(self.nvars, other.nvars, "variable count mismatch");
        let mut out = MultiPoly::zero(self.nvars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.insert_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    pub fn scale(&self, c: &BigRational) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero(self.nvars);
        }
        MultiPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> MultiPoly {
        let mut out = MultiPoly::one(self.nvars);
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// Exact partial derivative with respect to variable `i` (0-based).
    pub fn partial(&self, i: usize) -> MultiPoly {
        assert!(i < self.nvars, "variable index out of range");
        let mut out = MultiPoly::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut em = m.clone();
            em.0[i] -= 1;
            out.insert_term(em, c * BigRational::from_integer(BigInt::from(e)));
        }
        out
    }

    /// Divide by leading coefficient so that the graded-lex leading
    /// coefficient is 1. Zero stays zero.
    pub fn monic(&self) -> MultiPoly {
        match self.leading() {
            None => self.clone(),
            Some((_, lc)) => {
                let inv = lc.recip();
                self.scale(&inv)
            }
        }
    }

    /// Exact polynomial division: `self / divisor` if the remainder is
    /// zero, `None` otherwise.
    pub fn div_exact(&self, divisor: &MultiPoly) -> Option<MultiPoly> {
        assert!(!divisor.is_zero(), "division by zero polynomial");
        if self.is_zero() {
            return Some(MultiPoly::zero(self.nvars));
        }
        if divisor.is_one() {
            return Some(self.clone());
        }
        if let Some(c) = divisor.as_constant() {
            return Some(self.scale(&c.recip()));
        }
        let (dm, dc) = divisor.leading().unwrap();
        let dm = dm.clone();
        let dc = dc.clone();
        let mut rem = self.clone();
        let mut quot = MultiPoly::zero(self.nvars);
        while let Some((rm, rc)) = rem.leading() {
            if !dm.divides(rm) {
                return None;
            }
            let qm = dm.div_into(rm);
            let qc = rc / &dc;
            let mut t = MultiPoly::zero(self.nvars);
            t.insert_term(qm, qc);
            rem = rem.sub(&t.mul(divisor));
            quot = quot.add(&t);
        }
        Some(quot)
    }

    /// Degree in variable `i` (0-based).
    pub fn degree_in(&self, i: usize) -> u16 {
        self.terms.keys().map(|m| m.0[i]).max().unwrap_or(0)
    }

    /// View as univariate in variable `v`: map from `v`-exponent to the
    /// coefficient polynomial (which has `v`-degree zero).
    fn coeffs_wrt(&self, v: usize) -> BTreeMap<u16, MultiPoly> {
        let mut out: BTreeMap<u16, MultiPoly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let e = m.0[v];
            let mut stripped = m.clone();
            stripped.0[v] = 0;
            out.entry(e)
                .or_insert_with(|| MultiPoly::zero(self.nvars))
                .insert_term(stripped, c.clone());
        }
        out
    }

    /// Leading coefficient with respect to variable `v`.
    fn lead_coeff_wrt(&self, v: usize) -> MultiPoly {
        let d = self.degree_in(v);
        let mut out = MultiPoly::zero(self.nvars);
        for (m, c) in &self.terms {
            if m.0[v] == d {
                let mut stripped = m.clone();
                stripped.0[v] = 0;
                out.insert_term(stripped, c.clone());
            }
        }
        out
    }

    /// Content with respect to `v`: gcd of the `v`-coefficients.
    fn content_wrt(&self, v: usize) -> MultiPoly {
        let mut g = MultiPoly::zero(self.nvars);
        for (_, c) in self.coeffs_wrt(v) {
            g = gcd(&g, &c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// The positive rational `c` such that `self / c` has coprime
    /// integer coefficients (1 for the zero polynomial).
    fn numeric_content(&self) -> BigRational {
        if self.is_zero() {
            return BigRational::one();
        }
        let mut num_gcd = BigInt::zero();
        let mut den_lcm = BigInt::one();
        for c in self.terms.values() {
            num_gcd = num_integer_gcd(&num_gcd, c.numer());
            den_lcm = num_integer_lcm(&den_lcm, c.denom());
        }
        BigRational::new(num_gcd, den_lcm)
    }

    /// Scale so the coefficients are coprime integers.
    fn numeric_primitive(&self) -> MultiPoly {
        let c = self.numeric_content();
        if c.is_one() {
            self.clone()
        } else {
            self.scale(&c.recip())
        }
    }

    fn mul_var_pow(&self, v: usize, e: u16) -> MultiPoly {
        MultiPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    let mut m2 = m.clone();
                    m2.0[v] += e;
                    (m2, c.clone())
                })
                .collect(),
        }
    }
}

fn num_integer_gcd(a: &BigInt, b: &BigInt) -> BigInt {
    let mut a = a.abs();
    let mut b = b.abs();
    while !b.is_zero() {
        let r = &a % &b;
        a = b;
        b = r;
    }
    a
}

fn num_integer_lcm(a: &BigInt, b: &BigInt) -> BigInt {
    if a.is_zero() || b.is_zero() {
        return BigInt::zero();
    }
    (a * b).abs() / num_integer_gcd(a, b)
}

/// Pseudo-remainder of `a` by `b` with respect to variable `v`
/// (`deg_v b > 0` required). Each step re-extracts the numeric content
/// to keep the coefficients from swelling.
fn pseudo_rem(a: &MultiPoly, b: &MultiPoly, v: usize) -> MultiPoly {
    let db = b.degree_in(v);
    let lb = b.lead_coeff_wrt(v);
    let lb_is_one = lb.is_one();
    let mut r = a.clone();
    while !r.is_zero() {
        let dr = r.degree_in(v);
        if dr < db {
            break;
        }
        let lr = r.lead_coeff_wrt(v);
        // r <- lb*r - lr*v^(dr-db)*b
        let head = lr.mul_var_pow(v, dr - db).mul(b);
        r = if lb_is_one { r.sub(&head) } else { r.mul(&lb).sub(&head) };
        r = r.numeric_primitive();
    }
    r
}

/// Gcd of two polynomials over the rationals, normalized so that the
/// graded-lex leading coefficient is 1. `gcd(0, 0) = 0`.
pub fn gcd(a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.is_constant() || b.is_constant() {
        return MultiPoly::one(a.nvars);
    }
    if a == b {
        return a.monic();
    }
    // Main variable: first one actually present.
    let v = (0..a.nvars)
        .find(|&i| a.degree_in(i) > 0 || b.degree_in(i) > 0)
        .expect("non-constant polynomial without variables");
    let da = a.degree_in(v);
    let db = b.degree_in(v);
    if da == 0 {
        return gcd(a, &b.content_wrt(v));
    }
    if db == 0 {
        return gcd(&a.content_wrt(v), b);
    }
    let ca = a.content_wrt(v);
    let cb = b.content_wrt(v);
    let pa = a.div_exact(&ca).expect("content must divide").numeric_primitive();
    let pb = b.div_exact(&cb).expect("content must divide").numeric_primitive();
    let cont = gcd(&ca, &cb);

    let (mut f, mut g) = if da >= db { (pa, pb) } else { (pb, pa) };
    let g = loop {
        let r = pseudo_rem(&f, &g, v);
        if r.is_zero() {
            break g;
        }
        if r.degree_in(v) == 0 {
            break MultiPoly::one(a.nvars);
        }
        f = g;
        let rc = r.content_wrt(v);
        g = r
            .div_exact(&rc)
            .expect("content must divide")
            .numeric_primitive();
    };
    cont.mul(&g).monic()
}

/// Render with the given variable names, emitting the expression
/// grammar accepted by the parser. Deterministic: terms descending in
/// graded-lex order.
pub fn render_poly(p: &MultiPoly, names: &[String]) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (idx, (m, c)) in p.terms.iter().rev().enumerate() {
        let neg = c.is_negative();
        let abs = c.abs();
        if idx == 0 {
            if neg {
                out.push('-');
            }
        } else if neg {
            out.push_str(" - ");
        } else {
            out.push_str(" + ");
        }
        let mut factors: Vec<String> = Vec::new();
        if !abs.is_one() || m.is_one() {
            if abs.is_integer() {
                factors.push(abs.numer().to_string());
            } else {
                factors.push(format!("{}/{}", abs.numer(), abs.denom()));
            }
        }
        for (i, &e) in m.0.iter().enumerate() {
            match e {
                0 => {}
                1 => factors.push(names[i].clone()),
                _ => factors.push(format!("{}^{}", names[i], e)),
            }
        }
        out.push_str(&factors.join("*"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: usize) -> MultiPoly {
        MultiPoly::var(i, 2)
    }

    #[test]
    fn graded_lex_order() {
        let m1 = Monomial(vec![1, 0]); // x1
        let m2 = Monomial(vec![0, 2]); // x2^2
        let m3 = Monomial(vec![1, 1]); // x1*x2
        assert!(m2 > m1); // higher total degree
        assert!(m3 > m2); // same degree, larger first exponent
    }

    #[test]
    fn arithmetic_basics() {
        let p = x(0).mul(&x(0)).add(&x(1)); // x1^2 + x2
        let q = p.sub(&p);
        assert!(q.is_zero());
        assert_eq!(p.partial(0), x(0).scale(&BigRational::from_integer(2.into())));
        assert_eq!(p.partial(1), MultiPoly::one(2));
    }

    #[test]
    fn exact_division() {
        let p = x(0).add(&x(1)); // x1 + x2
        let q = x(0).sub(&x(1)); // x1 - x2
        let prod = p.mul(&q);
        assert_eq!(prod.div_exact(&p).unwrap(), q);
        assert_eq!(prod.div_exact(&q).unwrap(), p);
        assert!(p.div_exact(&q).is_none());
    }

    #[test]
    fn gcd_shared_factor() {
        let p = x(0).add(&x(1)); // x1 + x2
        let a = p.mul(&p).mul(&x(0)); // (x1+x2)^2 x1
        let b = p.mul(&x(1)); // (x1+x2) x2
        let g = gcd(&a, &b);
        assert_eq!(g, p.monic());
    }

    #[test]
    fn gcd_coprime() {
        let a = x(0).mul(&x(0)).add(&MultiPoly::one(2)); // x1^2 + 1
        let b = x(1);
        assert!(gcd(&a, &b).is_one());
    }

    #[test]
    fn render_descending_with_signs() {
        let p = x(0)
            .mul(&x(0))
            .scale(&BigRational::from_integer((-3).into()))
            .add(&x(1))
            .add(&MultiPoly::from_int(2, 2));
        let names = vec!["x1".to_string(), "x2".to_string()];
        assert_eq!(render_poly(&p, &names), "-3*x1^2 + x2 + 2");
    }
}
