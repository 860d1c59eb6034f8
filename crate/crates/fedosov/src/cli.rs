//! Batch front door: parse geometry files and section expressions,
//! drive validation, the recursion, Taylor series, star products,
//! brackets and the identity suites, with byte-deterministic text
//! output.
//!
//! Exit-code contract: `0` — all checks pass; `1` — input error
//! (unreadable file, parse error, bad arguments); `2` — identity
//! violation (bad geometry or a mathematics bug).

use crate::checks::{self, SuiteOptions};
use crate::galgebra::display::render_element;
use crate::galgebra::ops::sigma;
use crate::geometry::file::{parse_geometry, render_geometry};
use crate::geometry::{hess_symplectize, Geometry, GeometryError, GeometryInput};
use crate::quantize::{extract_mt, fedosov_derivation, star_with_k_tau, taylor, FedosovData};
use clap::{Parser, Subcommand};
use std::io::Write;
use std::path::PathBuf;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_IDENTITY: i32 = 2;

/// Batch job description, straight from the command line.
#[derive(Parser, Debug)]
#[command(
    name = "fedosov",
    about = "Exact deformation quantization of Grassmann-valued observables on a symplectic chart",
    version
)]
pub struct JobConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Validate a geometry file: every defining identity, exactly.
    Validate {
        /// Geometry file path.
        geometry: PathBuf,
    },
    /// Curvature tensors of both connections plus the combined
    /// curvature element, with its identities checked.
    Curvature {
        geometry: PathBuf,
        /// Also write the output to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Symplectize the file's Christoffels: treat them as an arbitrary
    /// torsion-free connection and produce one compatible with omega.
    Hess {
        geometry: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build the recursive correction term r through a total degree.
    #[command(name = "build-r")]
    BuildR {
        geometry: PathBuf,
        /// Total-degree cutoff (at least 3).
        #[arg(long = "K")]
        k: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Taylor coefficients of a section through a total degree.
    Taylor {
        geometry: PathBuf,
        /// Section expression, e.g. "x1*e1^e2 + (1/2)*e1".
        #[arg(long)]
        phi: String,
        /// Total-degree cutoff for the prolongation.
        #[arg(long = "K")]
        k: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Star product of two sections: prints every coefficient M_t,
    /// t ≤ order.
    Star {
        geometry: PathBuf,
        #[arg(long)]
        phi: String,
        #[arg(long)]
        psi: String,
        /// ħ-order of the expansion.
        #[arg(long)]
        order: u32,
        /// Prolongation-depth override; refused below 2·order + n.
        #[arg(long)]
        cutoff: Option<u32>,
        /// Recompute at depth K+1 and require identical coefficients.
        #[arg(long)]
        stability: bool,
        /// Additionally run the full identity suite.
        #[arg(long)]
        run_axioms: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The super-Poisson bracket both ways: closed form, recursive,
    /// and their difference (which must print 0).
    Bracket {
        geometry: PathBuf,
        #[arg(long)]
        phi: String,
        #[arg(long)]
        psi: String,
        /// Additionally run the full identity suite.
        #[arg(long)]
        run_axioms: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The full identity suite with one pass/fail line per law.
    Axioms {
        geometry: PathBuf,
        /// ħ-order for the star-product checks.
        #[arg(long, default_value_t = 2)]
        order: u32,
        /// Seed for the deterministic random elements.
        #[arg(long, default_value_t = 0xFED0_50FF)]
        seed: u64,
        /// Random elements per operator identity.
        #[arg(long, default_value_t = 40)]
        samples: usize,
        /// Random triples for associativity.
        #[arg(long, default_value_t = 5)]
        triples: usize,
        /// Include the truncation-stability re-run.
        #[arg(long)]
        stability: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

struct Output {
    buffer: String,
    out_path: Option<PathBuf>,
}

impl Output {
    fn new(out_path: Option<PathBuf>) -> Self {
        Output {
            buffer: String::new(),
            out_path,
        }
    }

    fn line(&mut self, s: impl AsRef<str>) {
        self.buffer.push_str(s.as_ref());
        self.buffer.push('\n');
    }

    fn finish(self, sink: &mut dyn Write, code: i32) -> i32 {
        let _ = sink.write_all(self.buffer.as_bytes());
        if let Some(path) = &self.out_path {
            if let Err(e) = std::fs::write(path, self.buffer.as_bytes()) {
                let _ = writeln!(sink, "error: cannot write {}: {e}", path.display());
                return EXIT_INPUT;
            }
        }
        code
    }
}

fn load_input(path: &PathBuf) -> Result<GeometryInput, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    parse_geometry(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_validated(path: &PathBuf) -> Result<Result<Geometry, GeometryError>, String> {
    Ok(load_input(path)?.validate())
}

/// Run one job; all text goes through `sink` (and `--out` if given).
pub fn run(cfg: &JobConfig, sink: &mut dyn Write) -> i32 {
    match &cfg.command {
        Command::Validate { geometry } => {
            let mut out = Output::new(None);
            let validated = match load_validated(geometry) {
                Ok(v) => v,
                Err(e) => {
                    out.line(format!("error: {e}"));
                    return out.finish(sink, EXIT_INPUT);
                }
            };
            match validated {
                Ok(geo) => {
                    out.line(format!(
                        "geometry OK: m = {}, n = {}, coords = {}, frame = {}",
                        geo.m(),
                        geo.n(),
                        geo.coords().join(" "),
                        geo.frame().join(" ")
                    ));
                    let dim = geo.dim();
                    for i in 0..dim {
                        for j in 0..dim {
                            let v = geo.lambda().get(i, j);
                            if !v.is_zero() {
                                out.line(format!(
                                    "Lambda[{},{}] = {}",
                                    i + 1,
                                    j + 1,
                                    v.render(geo.coords())
                                ));
                            }
                        }
                    }
                    out.finish(sink, EXIT_OK)
                }
                Err(e) => {
                    out.line(format!("{e}"));
                    out.finish(sink, EXIT_IDENTITY)
                }
            }
        }
        Command::Curvature { geometry, out: o } => {
            let mut out = Output::new(o.clone());
            let geo = match load_validated(geometry) {
                Ok(Ok(g)) => g,
                Ok(Err(e)) => {
                    out.line(format!("{e}"));
                    return out.finish(sink, EXIT_IDENTITY);
                }
                Err(e) => {
                    out.line(format!("error: {e}"));
                    return out.finish(sink, EXIT_INPUT);
                }
            };
            let curv = match geo.curvature() {
                Ok(c) => c,
                Err(e) => {
                    out.line(format!("{e}"));
                    return out.finish(sink, EXIT_IDENTITY);
                }
            };
            let dim = geo.dim();
            let n = geo.n();
            for k in 0..dim {
                for l in 0..dim {
                    for i in 0..dim {
                        for j in 0..dim {
                            let v = curv.rm(k, l, i, j);
                            if !v.is_zero() {
                                out.line(format!(
                                    "R^(M)[{},{},{},{}] = {}",
                                    k + 1,
                                    l + 1,
                                    i + 1,
                                    j + 1,
                                    v.render(geo.coords())
                                ));
                            }
                        }
                    }
                }
            }
            for a in 0..n {
                for b in 0..n {
                    for i in 0..dim {
                        for j in 0..dim {
                            let v = curv.re(a, b, i, j);
                            if !v.is_zero() {
                                out.line(format!(
                                    "R^(E)[{},{},{},{}] = {}",
                                    a + 1,
                                    b + 1,
                                    i + 1,
                                    j + 1,
                                    v.render(geo.coords())
                                ));
                            }
                        }
                    }
                }
            }
            out.line(format!(
                "R = {}",
                render_element(curv.element(), geo.coords(), geo.frame())
            ));
            let mut code = EXIT_OK;
            let opts = SuiteOptions {
                samples: 20,
                ..SuiteOptions::default()
            };
            for report in checks::curvature_suite(&geo, &opts) {
                out.line(format!(
                    "{} {}{}",
                    if report.passed { "PASS" } else { "FAIL" },
                    report.name,
                    if report.detail.is_empty() {
                        String::new()
                    } else {
                        format!(": {}", report.detail)
                    }
                ));
                if !report.passed {
                    code = EXIT_IDENTITY;
                }
            }
            out.finish(sink, code)
        }
        Command::Hess { geometry, out: o } => {
            let mut out = Output::new(o.clone());
            let input = match load_input(geometry) {
                Ok(g) => g,
                Err(e) => {
                    out.line(format!("error: {e}"));
                    return out.finish(sink, EXIT_INPUT);
                }
            };
            // The file's Gamma plays the role of the arbitrary
            // torsion-free input connection.
            let fixed = match hess_symplectize(&input.gamma, &input.omega) {
                Ok(g) => g,
                Err(e) => {
                    out.line(format!("{e}"));
                    return out.finish(sink, EXIT_IDENTITY);
                }
            };
            let mut amended = input.clone();
            amended.gamma = fixed;
            match amended.clone().validate() {
                Ok(_) => {
                    out.line("symplectized connection (passes the full validation):");
                    out.line(render_geometry(&amended).trim_end());
                    out.finish(sink, EXIT_OK)
                }
                Err(e) => {
                    out.line(format!("{e}"));
                    out.finish(sink, EXIT_IDENTITY)
                }
            }
        }
        Command::BuildR {
            geometry,
            k,
            out: o,
        } => {
            let mut out = Output::new(o.clone());
            let geo = match load_validated(geometry) {
                Ok(Ok(g)) => g,
                Ok(Err(e)) => {
                    out.line(format!("{e}"));
                    return out.finish(sink, EXIT_IDENTITY);
                }
                Err(e) => {
                    out.line(format!("error: {e}"));
                    return out.finish(sink, EXIT_INPUT);
                }
            };
            match FedosovData::build(geo, *k) {
                Ok(data) => {
                    out.line(data.serialize_r().trim_end());
                    out.line(format!(
                        "PASS invariants of r and flatness obstruction through degree {}",
                        data.k_max() - 1
                    ));
                    out.finish(sink, EXIT_OK)
                }
                Err(e) => {
                    out.line(format!("{e}"));
                    out.finish(sink, EXIT_IDENTITY)
                }
            }
        }
        Command::Taylor {
            geometry,
            phi,
            k,
            out: o,
        } => {
            let mut out = Output::new(o.clone());
            let geo = match load_validated(geometry) {
                Ok(Ok(g)) => g,
                Ok(Err(e)) => {
                    out.line(format!("{e}"));
                    return out.finish(sink, EXIT_IDENTITY);
                }
                Err(e) => {
                    out.line(format!("error: {e}"));
                    return out.finish(sink, EXIT_INPUT);
                }
            };
            let phi = match geo.parse_section(phi) {
                Ok(p) => p,
                Err(e) => {
                    out.line(format!("error: --phi: {e}"));
                    return out.finish(sink, EXIT_INPUT);
                }
            };
            let data = match FedosovData::build(geo.clone(), (k + 1).max(3)) {
                Ok(d) => d,
                Err(e) => {
                    out.line(format!("{e}"));
                    return out.finish(sink, EXIT_IDENTITY);
                }
            };
            let tau = match taylor(&phi, &data, *k) {
                Ok(t) => t,
                Err(e) => {
                    out.line(format!("error: {e}"));
                    return out.finish(sink, EXIT_INPUT);
                }
            };
            for d in 0..=*k {
                let comp = tau.total_deg_component(d);
                if !comp.is_zero() {
                    out.line(format!(
                        "tau[{d}] = {}",
                        render_element(&comp, geo.coords(), geo.frame())
                    ));
                }
            }
            let mut code = EXIT_OK;
            let proj_ok = sigma(&tau) == phi;
            out.line(format!(
                "{} σ(τφ) = φ",
                if proj_ok { "PASS" } else { "FAIL" }
            ));
            let dtau = fedosov_derivation(&tau, &data);
            let flat_ok = (0..*k).all(|d| dtau.total_deg_component(d).is_zero());
            out.line(format!(
                "{} D(τφ) = 0 through degree {}",
                if flat_ok { "PASS" } else { "FAIL" },
                k.saturating_sub(1)
            ));
            if !(proj_ok && flat_ok) {
                code = EXIT_IDENTITY;
            }
            out.finish(sink, code)
        }
        Command::Star {
            geometry,
            phi,
            psi,
            order,
            cutoff,
            stability,
            run_axioms,
            out: o,
        } => {
            let mut out = Output::new(o.clone());
            let geo = match load_validated(geometry) {
                Ok(Ok(g)) => g,
                Ok(Err(e)) => {
                    out.line(format!("{e}"));
                    return out.finish(sink, EXIT_IDENTITY);
                }
                Err(e) => {
                    out.line(format!("error: {e}"));
                    return out.finish(sink, EXIT_INPUT);
                }
            };
            let (phi, psi) = match (geo.parse_section(phi), geo.parse_section(psi)) {
                (Ok(a), Ok(b)) => (a, b),
                (Err(e), _) => {
                    out.line(format!("error: --phi: {e}"));
                    return out.finish(sink, EXIT_INPUT);
                }
                (_, Err(e)) => {
                    out.line(format!("error: --psi: {e}"));
                    return out.finish(sink, EXIT_INPUT);
                }
            };
            let n = geo.n() as u32;
            let min_k = 2 * order + n;
            let k_tau = cutoff.unwrap_or(min_k);
            if k_tau < min_k {
                out.line(format!(
                    "error: cutoff override {k_tau} refused: the expansion needs at least {min_k}"
                ));
                return out.finish(sink, EXIT_INPUT);
            }
            let extra = u32::from(*stability);
            let data = match FedosovData::build(geo.clone(), k_tau + 2 + extra) {
                Ok(d) => d,
                Err(e) => {
                    out.line(format!("{e}"));
                    return out.finish(sink, EXIT_IDENTITY);
                }
            };
            let s = match star_with_k_tau(&phi, &psi, &data, *order, k_tau) {
                Ok(s) => s,
                Err(e) => {
                    out.line(format!("error: {e}"));
                    return out.finish(sink, EXIT_INPUT);
                }
            };
            for t in 0..=*order {
                out.line(format!(
                    "M[{t}] = {}",
                    render_element(&extract_mt(&s, t), geo.coords(), geo.frame())
                ));
            }
            let mut code = EXIT_OK;
            if *stability {
                let deeper = star_with_k_tau(&phi, &psi, &data, *order, k_tau + 1)
                    .expect("depth within build");
                let stable = deeper == s;
                out.line(format!(
                    "{} M_t unchanged when recomputed at depth {}",
                    if stable { "PASS" } else { "FAIL" },
                    k_tau + 1
                ));
                if !stable {
                    code = EXIT_IDENTITY;
                }
            }
            if *run_axioms {
                code = code.max(run_axiom_suite(&geo, &default_axiom_opts(*order), &mut out));
            }
            out.finish(sink, code)
        }
        Command::Bracket {
            geometry,
            phi,
            psi,
            run_axioms,
            out: o,
        } => {
            let mut out = Output::new(o.clone());
            let geo = match load_validated(geometry) {
                Ok(Ok(g)) => g,
                Ok(Err(e)) => {
                    out.line(format!("{e}"));
                    return out.finish(sink, EXIT_IDENTITY);
                }
                Err(e) => {
                    out.line(format!("error: {e}"));
                    return out.finish(sink, EXIT_INPUT);
                }
            };
            let (phi, psi) = match (geo.parse_section(phi), geo.parse_section(psi)) {
                (Ok(a), Ok(b)) => (a, b),
                (Err(e), _) => {
                    out.line(format!("error: --phi: {e}"));
                    return out.finish(sink, EXIT_INPUT);
                }
                (_, Err(e)) => {
                    out.line(format!("error: --psi: {e}"));
                    return out.finish(sink, EXIT_INPUT);
                }
            };
            if !phi.is_c0() || !psi.is_c0() {
                out.line("error: bracket arguments must be sections (no ħ)");
                return out.finish(sink, EXIT_INPUT);
            }
            let n = geo.n() as u32;
            let data = match FedosovData::build(geo.clone(), 2 + n + 2) {
                Ok(d) => d,
                Err(e) => {
                    out.line(format!("{e}"));
                    return out.finish(sink, EXIT_IDENTITY);
                }
            };
            let curv = data.curvature().clone();
            let closed = match crate::bracket::closed_form_m1(&phi, &psi, &geo, &curv) {
                Ok(c) => c,
                Err(e) => {
                    out.line(format!("error: {e}"));
                    return out.finish(sink, EXIT_INPUT);
                }
            };
            let s = crate::quantize::star(&phi, &psi, &data, 1).expect("cutoff sufficient");
            let recursive = extract_mt(&s, 1);
            let diff = closed.sub(&recursive);
            out.line(format!(
                "closed-form M1 = {}",
                render_element(&closed, geo.coords(), geo.frame())
            ));
            out.line(format!(
                "recursive   M1 = {}",
                render_element(&recursive, geo.coords(), geo.frame())
            ));
            out.line(format!(
                "difference     = {}",
                render_element(&diff, geo.coords(), geo.frame())
            ));
            let mut code = if diff.is_zero() {
                EXIT_OK
            } else {
                EXIT_IDENTITY
            };
            if *run_axioms {
                code = code.max(run_axiom_suite(&geo, &default_axiom_opts(1), &mut out));
            }
            out.finish(sink, code)
        }
        Command::Axioms {
            geometry,
            order,
            seed,
            samples,
            triples,
            stability,
            out: o,
        } => {
            let mut out = Output::new(o.clone());
            let geo = match load_validated(geometry) {
                Ok(Ok(g)) => g,
                Ok(Err(e)) => {
                    out.line(format!("{e}"));
                    return out.finish(sink, EXIT_IDENTITY);
                }
                Err(e) => {
                    out.line(format!("error: {e}"));
                    return out.finish(sink, EXIT_INPUT);
                }
            };
            let opts = SuiteOptions {
                seed: *seed,
                samples: *samples,
                triples: *triples,
                t_order: *order,
                stability: *stability,
            };
            let code = run_axiom_suite(&geo, &opts, &mut out);
            out.finish(sink, code)
        }
    }
}

fn default_axiom_opts(order: u32) -> SuiteOptions {
    SuiteOptions {
        samples: 20,
        triples: 3,
        t_order: order,
        ..SuiteOptions::default()
    }
}

fn run_axiom_suite(geo: &Geometry, opts: &SuiteOptions, out: &mut Output) -> i32 {
    let reports = match checks::run_all(geo, opts) {
        Ok(r) => r,
        Err(e) => {
            out.line(format!("{e}"));
            return EXIT_IDENTITY;
        }
    };
    let mut failed = 0usize;
    for r in &reports {
        out.line(format!(
            "{} {}{}",
            if r.passed { "PASS" } else { "FAIL" },
            r.name,
            if r.detail.is_empty() {
                String::new()
            } else {
                format!(": {}", r.detail)
            }
        ));
        if !r.passed {
            failed += 1;
        }
    }
    out.line(format!(
        "{} of {} identities hold",
        reports.len() - failed,
        reports.len()
    ));
    if failed == 0 {
        EXIT_OK
    } else {
        EXIT_IDENTITY
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::Parser;

    fn run_args(args: &[&str]) -> (i32, String) {
        let cfg = JobConfig::parse_from(args);
        let mut buf = Vec::new();
        let code = run(&cfg, &mut buf);
        (code, String::from_utf8(buf).unwrap())
    }

    fn geom(name: &str) -> String {
        format!("{}/geometries/{name}", env!("CARGO_MANIFEST_DIR"))
    }

    #[test]
    fn validate_flat_geometry() {
        let (code, text) = run_args(&["fedosov", "validate", &geom("flat_m1_n2.geom")]);
        assert_eq!(code, EXIT_OK, "{text}");
        assert!(text.contains("geometry OK"));
        assert!(text.contains("Lambda[1,2] = 1"));
    }

    #[test]
    fn validate_presymplectic_fails_with_code_2() {
        let (code, text) = run_args(&["fedosov", "validate", &geom("presymplectic.geom")]);
        assert_eq!(code, EXIT_IDENTITY, "{text}");
        assert!(text.contains("symplectic connection"));
    }

    #[test]
    fn missing_file_is_input_error() {
        let (code, _) = run_args(&["fedosov", "validate", "/nonexistent.geom"]);
        assert_eq!(code, EXIT_INPUT);
    }

    #[test]
    fn hess_fixes_presymplectic_input() {
        let (code, text) = run_args(&["fedosov", "hess", &geom("presymplectic.geom")]);
        assert_eq!(code, EXIT_OK, "{text}");
        assert!(
            text.contains("Gamma[1,1,1]"),
            "expected symplectized Christoffels, got:\n{text}"
        );
    }

    #[test]
    fn bracket_flat_functions() {
        let (code, text) = run_args(&[
            "fedosov",
            "bracket",
            &geom("flat_m1_n2.geom"),
            "--phi",
            "x1",
            "--psi",
            "x2",
        ]);
        assert_eq!(code, EXIT_OK, "{text}");
        assert!(text.contains("closed-form M1 = [1] 1 ⊗ 1 ⊗ 1"));
        assert!(text.contains("difference     = 0"));
    }

    #[test]
    fn star_order_zero_prints_only_wedge() {
        let (code, text) = run_args(&[
            "fedosov",
            "star",
            &geom("flat_m1_n2.geom"),
            "--phi",
            "e1",
            "--psi",
            "e2",
            "--order",
            "0",
        ]);
        assert_eq!(code, EXIT_OK, "{text}");
        assert_eq!(text.trim(), "M[0] = [1] 1 ⊗ e1∧e2 ⊗ 1");
    }

    #[test]
    fn star_refuses_small_cutoff_override() {
        let (code, text) = run_args(&[
            "fedosov",
            "star",
            &geom("flat_m1_n2.geom"),
            "--phi",
            "x1",
            "--psi",
            "x2",
            "--order",
            "1",
            "--cutoff",
            "2",
        ]);
        assert_eq!(code, EXIT_INPUT, "{text}");
        assert!(text.contains("refused"));
    }

    #[test]
    fn output_is_byte_deterministic() {
        let args = [
            "fedosov",
            "axioms",
            &geom("curved_bundle.geom"),
            "--order",
            "1",
            "--samples",
            "6",
            "--triples",
            "1",
        ];
        let run1 = run_args(&args);
        let run2 = run_args(&args);
        assert_eq!(run1.0, EXIT_OK, "{}", run1.1);
        assert_eq!(run1, run2);
    }
}
