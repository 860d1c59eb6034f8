//! Exact coefficient field: multivariate rational functions over the
//! rationals in the chart coordinates, closed under partial
//! differentiation, plus complex pairs and small matrices thereof.
//!
//! Everything here is immutable after construction and all operations
//! are pure, so values can be shared freely between threads.

pub mod complex;
pub mod matrix;
pub mod parse;
pub mod poly;
pub mod ratexpr;

pub use complex::CScalar;
pub use matrix::ExprMatrix;
pub use parse::{parse_cexpr, parse_expr, ParseError};
pub use poly::MultiPoly;
pub use ratexpr::{RationalExpr, ScalarError};

/// The coordinate chart: an ordered list of coordinate names. The
/// number of names fixes the variable count of every scalar built over
/// the chart.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chart {
    names: Vec<String>,
}

impl Chart {
    pub fn new(names: Vec<String>) -> Self {
        assert!(!names.is_empty());
        Chart { names }
    }

    /// Default names `x1..xN`.
    pub fn standard(nvars: usize) -> Self {
        Chart::new((1..=nvars).map(|i| format!("x{i}")).collect())
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }
}

#[cfg(test)]
mod proptests {
    use super::*;
    use proptest::prelude::*;

    /// Random small rational expressions over two variables: a few
    /// monomials over a denominator drawn from a fixed nonzero pool
    /// (mirroring the coefficient shapes the geometry produces).
    fn arb_poly() -> impl Strategy<Value = RationalExpr> {
        proptest::collection::vec((0u16..3, 0u16..3, -3i64..4), 0..4).prop_map(|terms| {
            let mut acc = RationalExpr::zero(2);
            for (e1, e2, c) in terms {
                let m = RationalExpr::coord(0, 2)
                    .pow(e1 as u32)
                    .mul(&RationalExpr::coord(1, 2).pow(e2 as u32))
                    .scale_int(c);
                acc = acc.add(&m);
            }
            acc
        })
    }

    fn arb_ratexpr() -> impl Strategy<Value = RationalExpr> {
        (arb_poly(), 0usize..4).prop_map(|(n, pick)| {
            let one = RationalExpr::one(2);
            let x1 = RationalExpr::coord(0, 2);
            let x2 = RationalExpr::coord(1, 2);
            let den = match pick {
                0 => one,
                1 => one.add(&x1.mul(&x1)),
                2 => one.add(&x2.mul(&x2)),
                _ => RationalExpr::from_int(2, 2).add(&x1.mul(&x2)),
            };
            n.div(&den).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn field_associativity(a in arb_ratexpr(), b in arb_ratexpr(), c in arb_ratexpr()) {
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
            prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
        }

        #[test]
        fn field_distributivity(a in arb_ratexpr(), b in arb_ratexpr(), c in arb_ratexpr()) {
            prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        }

        #[test]
        fn field_commutativity(a in arb_ratexpr(), b in arb_ratexpr()) {
            prop_assert_eq!(a.mul(&b), b.mul(&a));
            prop_assert_eq!(a.add(&b), b.add(&a));
        }

        #[test]
        fn inverse_multiplies_to_one(a in arb_ratexpr()) {
            if !a.is_zero() {
                prop_assert!(a.mul(&a.recip().unwrap()).is_one());
            }
        }

        #[test]
        fn mixed_partials_commute(a in arb_ratexpr()) {
            prop_assert_eq!(a.partial(0).partial(1), a.partial(1).partial(0));
        }

        #[test]
        fn leibniz_rule(a in arb_ratexpr(), b in arb_ratexpr()) {
            let lhs = a.mul(&b).partial(0);
            let rhs = a.partial(0).mul(&b).add(&a.mul(&b.partial(0)));
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn render_round_trip(a in arb_ratexpr()) {
            let chart = Chart::standard(2);
            let printed = a.render(chart.names());
            let reparsed = parse_expr(&printed, chart.names()).unwrap();
            prop_assert_eq!(a, reparsed);
        }
    }
}
