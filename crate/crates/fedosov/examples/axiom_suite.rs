//! Run the full identity suite over the curved rank-2 geometry: the
//! operator laws, curvature identities, fibrewise-product laws, the
//! recursion invariants, star-product theorems and the bracket
//! equivalences, each reported pass/fail.
//!
//! ```bash
//! cargo run -p fedosov --example axiom_suite
//! ```

use fedosov::checks::{run_all, SuiteOptions};
use fedosov::geometry::file::parse_geometry;

fn main() {
    let geo = parse_geometry(include_str!("../geometries/curved_bundle.geom"))
        .unwrap()
        .validate()
        .unwrap();
    let opts = SuiteOptions {
        samples: 25,
        triples: 3,
        t_order: 1,
        ..SuiteOptions::default()
    };
    let reports = run_all(&geo, &opts).unwrap();
    let mut failed = 0;
    for r in &reports {
        println!("{} {}", if r.passed { "PASS" } else { "FAIL" }, r.name);
        if !r.passed {
            failed += 1;
            println!("     {}", r.detail);
        }
    }
    println!("\n{} of {} identities hold", reports.len() - failed, reports.len());
    assert_eq!(failed, 0);
}
