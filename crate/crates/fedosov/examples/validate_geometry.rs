//! Parse and validate geometry files; every defining identity is
//! checked exactly and violations carry the offending indices and
//! residual expressions.
//!
//! ```bash
//! cargo run -p fedosov --example validate_geometry
//! ```

use fedosov::geometry::file::parse_geometry;

fn main() {
    let good = include_str!("../geometries/curved_base_bundle.geom");
    let geo = parse_geometry(good).unwrap().validate().unwrap();
    println!(
        "valid geometry: m = {}, n = {}, Λ[1,2] = {}",
        geo.m(),
        geo.n(),
        geo.lambda().get(0, 1).render(geo.coords())
    );

    // A curved omega with the zero connection is not symplectic.
    let bad = include_str!("../geometries/presymplectic.geom");
    match parse_geometry(bad).unwrap().validate() {
        Ok(_) => unreachable!("the zero connection cannot preserve a non-constant omega"),
        Err(e) => println!("\nrejected as expected:\n{e}"),
    }
}
