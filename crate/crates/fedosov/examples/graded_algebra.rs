//! The graded algebra from the ground up: canonical terms, the
//! supercommutative product, insertion operators and the δ-machinery.
//!
//! ```bash
//! cargo run -p fedosov --example graded_algebra
//! ```

use fedosov::galgebra::ops::{delta, delta_inv, delta_star, deg_s_plus_a, insert, Insertion};
use fedosov::galgebra::AlgebraElement;
use fedosov::scalar::CScalar;

fn show(label: &str, el: &AlgebraElement) {
    let coords = vec!["x1".to_string(), "x2".to_string()];
    let frame = vec!["e1".to_string(), "e2".to_string()];
    println!("{label} = {}", fedosov::galgebra::display::render_element(el, &coords, &frame));
}

fn main() {
    let nv = 2;
    let one = CScalar::one(nv);

    // dx¹∨dx¹ ⊗ e¹∧e² ⊗ dx²  — a typical canonical term
    let f = AlgebraElement::from_raw_term(one.clone(), &[1, 1], &[1, 2], &[2], 0);
    show("F", &f);

    // The symmetric substitution carries the multiset multiplicity.
    show("i_s(∂₁) F", &insert(&f, Insertion::SymVector(1)));

    // Left and right interior products differ by the parity twist.
    show("i(e₂) F", &insert(&f, Insertion::FrameLeft(2)));
    show("j(e₂) F", &insert(&f, Insertion::FrameRight(2)));

    // δ moves a symmetric index into the antisymmetric slot; δ* the
    // other way; together they recover the degree operator.
    show("δF", &delta(&f));
    show("δ*F", &delta_star(&f));
    let anticomm = delta(&delta_star(&f)).add(&delta_star(&delta(&f)));
    show("(δδ* + δ*δ) F", &anticomm);
    assert_eq!(anticomm, deg_s_plus_a(&f));
    assert!(delta(&delta(&f)).is_zero());

    // δ⁻¹ is the normalized homotopy: δδ⁻¹ + δ⁻¹δ = id on this term.
    let homotopy = delta(&delta_inv(&f)).add(&delta_inv(&delta(&f)));
    assert_eq!(homotopy, f);
    println!("homotopy identity holds: δδ⁻¹ + δ⁻¹δ = id away from s = a = 0");

    // Supercommutativity with the sign (−1)^{d1d2+a1a2}.
    let g = AlgebraElement::from_raw_term(one, &[], &[1], &[1], 0);
    let fg = f.mul(&g);
    let gf = g.mul(&f);
    show("F·G", &fg);
    show("G·F", &gf);
    assert_eq!(gf, fg.neg()); // d1d2 = 2, a1a2 = 1 ⇒ sign −1
}
