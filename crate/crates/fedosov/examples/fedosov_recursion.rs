//! The degree-by-degree recursion for the correction term r:
//!
//!   r⁽³⁾ = δ⁻¹R,   r⁽ᵏ⁺³⁾ = δ⁻¹(∇r⁽ᵏ⁺²⁾ + (i/ħ) Σ r⁽ˡ⁺²⁾∘r⁽ᵏ⁻ˡ⁺²⁾)
//!
//! and its guarantees: the flat derivation D = −δ + ∇ + (i/ħ)ad(r)
//! squares to zero because the obstruction −δr + ∇r + R + (i/ħ)r∘r
//! vanishes degree by degree.
//!
//! ```bash
//! cargo run -p fedosov --example fedosov_recursion
//! ```

use fedosov::galgebra::display::render_element;
use fedosov::geometry::file::parse_geometry;
use fedosov::FedosovData;

fn main() {
    let geo = parse_geometry(include_str!("../geometries/curved_bundle.geom"))
        .unwrap()
        .validate()
        .unwrap();
    let data = FedosovData::build(geo, 7).unwrap();

    for k in 3..=data.k_max() {
        let rk = data.r_component(k);
        println!(
            "r[{k}]: {} term(s)\n  {}",
            rk.num_terms(),
            render_element(&rk, data.geometry().coords(), data.geometry().frame())
        );
    }

    let obstruction = data.obstruction();
    for k in 2..data.k_max() {
        assert!(obstruction.total_deg_component(k).is_zero());
    }
    println!(
        "flatness obstruction vanishes in every total degree ≤ {}",
        data.k_max() - 1
    );
}
