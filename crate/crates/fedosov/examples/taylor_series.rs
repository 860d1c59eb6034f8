//! Taylor series τ(φ): the unique prolongation of a section to a
//! D-flat element of the Weyl–Grassmann algebra with σ(τφ) = φ.
//!
//! ```bash
//! cargo run -p fedosov --example taylor_series
//! ```

use fedosov::galgebra::display::render_element;
use fedosov::galgebra::ops::sigma;
use fedosov::geometry::file::parse_geometry;
use fedosov::quantize::{fedosov_derivation, taylor};
use fedosov::FedosovData;

fn main() {
    let geo = parse_geometry(include_str!("../geometries/curved_bundle.geom"))
        .unwrap()
        .validate()
        .unwrap();
    let data = FedosovData::build(geo.clone(), 7).unwrap();

    let phi = geo.parse_section("e1").unwrap();
    let k_tau = 5;
    let tau = taylor(&phi, &data, k_tau).unwrap();

    for k in 0..=k_tau {
        let comp = tau.total_deg_component(k);
        if !comp.is_zero() {
            println!(
                "τ(e1)[{k}] = {}",
                render_element(&comp, geo.coords(), geo.frame())
            );
        }
    }

    assert_eq!(sigma(&tau), phi);
    let dtau = fedosov_derivation(&tau, &data);
    for k in 0..k_tau {
        assert!(dtau.total_deg_component(k).is_zero());
    }
    println!("σ(τφ) = φ and D(τφ) = 0 through degree {}", k_tau - 1);
}
