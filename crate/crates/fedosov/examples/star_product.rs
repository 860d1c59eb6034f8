//! The star product φ∗ψ = σ(τφ ∘ τψ) and its ħ-expansion
//! φ∗ψ = Σ (iħ/2)^t M_t(φ,ψ).
//!
//! ```bash
//! cargo run -p fedosov --example star_product
//! ```

use fedosov::galgebra::display::render_element;
use fedosov::geometry::file::parse_geometry;
use fedosov::geometry::GeometryInput;
use fedosov::quantize::{extract_mt, star};
use fedosov::FedosovData;

fn main() {
    // Flat chart: the coordinate functions star-multiply to
    // x1·x2 + (iħ/2)Λ^{12}, and M₁ is the Poisson bracket.
    let flat = GeometryInput::flat(1, 2).validate().unwrap();
    let data = FedosovData::build(flat.clone(), 8).unwrap();
    let f = flat.parse_section("x1").unwrap();
    let g = flat.parse_section("x2").unwrap();
    let s = star(&f, &g, &data, 2).unwrap();
    println!(
        "flat chart: x1 ∗ x2 = {}",
        render_element(&s, flat.coords(), flat.frame())
    );
    assert_eq!(extract_mt(&s, 1), flat.parse_section("1").unwrap());

    // Curved bundle: Grassmann-valued sections acquire curvature
    // corrections in every order.
    let geo = parse_geometry(include_str!("../geometries/curved_bundle.geom"))
        .unwrap()
        .validate()
        .unwrap();
    let data = FedosovData::build(geo.clone(), 8).unwrap();
    let phi = geo.parse_section("x1*e1").unwrap();
    let psi = geo.parse_section("x2*e2 + e1^e2").unwrap();
    let s = star(&phi, &psi, &data, 2).unwrap();
    println!("\ncurved bundle: φ = x1*e1, ψ = x2*e2 + e1^e2");
    for t in 0..=2 {
        println!(
            "M[{t}] = {}",
            render_element(&extract_mt(&s, t), geo.coords(), geo.frame())
        );
    }
    assert_eq!(extract_mt(&s, 0), phi.mul(&psi));
}
