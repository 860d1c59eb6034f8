//! Curvature of the symplectic and bundle connections, lowered to
//! R^(M) and R^(E), assembled into the curvature element R, with the
//! algebraic consequences of the Bianchi identities checked.
//!
//! ```bash
//! cargo run -p fedosov --example curvature_tensors
//! ```

use fedosov::galgebra::display::render_element;
use fedosov::galgebra::ops::delta;
use fedosov::geometry::file::parse_geometry;
use fedosov::quantize::nabla;

fn main() {
    let geo = parse_geometry(include_str!("../geometries/curved_base_bundle.geom"))
        .unwrap()
        .validate()
        .unwrap();
    let curv = geo.curvature().unwrap();

    for (label, get) in [("R^(M)", true), ("R^(E)", false)] {
        for a in 0..2 {
            for b in 0..2 {
                let v = if get {
                    curv.rm(a, b, 0, 1)
                } else {
                    curv.re(a, b, 0, 1)
                };
                if !v.is_zero() {
                    println!("{label}[{},{},1,2] = {}", a + 1, b + 1, v.render(geo.coords()));
                }
            }
        }
    }
    println!(
        "R = {}",
        render_element(curv.element(), geo.coords(), geo.frame())
    );

    assert!(delta(curv.element()).is_zero());
    assert!(nabla(curv.element(), &geo).is_zero());
    println!("Bianchi consequences hold: δR = 0 and ∇R = 0");
}
