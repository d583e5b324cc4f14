//! The project's acceptance checklist, one test per item.
//!
//! Each test prints a single `criterion NN: PASS (t s)` line (visible with
//! `cargo test --test acceptance -- --nocapture`); a failing criterion
//! fails its test with the offending report.  Items 1–10 drive the library
//! directly on the shipped fixtures; item 11 runs the installed binary on
//! the corrupted documents and inspects the machine-readable reports.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};
use superpair_cli::doc::SpecDocument;
use superpair_core::graded::{
    hecke_algebra, matrix_superalgebra, tensor_product, twisted_group_algebra, GradedAlgebra,
};
use superpair_core::pdo::{
    commutator_trace_check, composition_associativity_check, matrix_lax, scalar_full_lax,
    scalar_kdv_lax, variational_annihilation_check, verify_hamiltonian_superpair, Slot,
};
use superpair_core::poisson::{
    cyclic_projection_check, epsilon_expansion_check, verify_superpair, AdlerVariant,
    PoissonSetup, SuperpairConfig,
};
use superpair_core::polarized::{
    build_from_pair, compute_filtration, laurent, matrix_laurent, verify_compatibility,
    verify_filtration_products,
};
use superpair_core::rat::{rat, ratio, Rat};
use superpair_core::superpoly::SuperPoly;
use superpair_core::{CheckStatus, Parity};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

fn pencil() -> Vec<Rat> {
    [0i64, 1, -1, 2].iter().map(|&n| rat(n)).collect()
}

fn config(triples: usize) -> SuperpairConfig {
    SuperpairConfig {
        seed: 0x5eed,
        triples,
        max_degree: 2,
        variant: AdlerVariant::MinusMinus,
    }
}

/// Builds the Poisson setup of a shipped lax-element fixture.
fn lax_setup(file: &str) -> PoissonSetup {
    let (doc, _) = SpecDocument::load(&fixture(file)).expect("fixture loads");
    let SpecDocument::LaxElement(d) = doc else {
        panic!("{file} is not a lax-element document");
    };
    d.build().expect("fixture builds").0
}

fn done(n: u32, started: Instant) {
    println!(
        "criterion {n:02}: PASS ({:.2} s)",
        started.elapsed().as_secs_f64()
    );
}

fn twisted_z2() -> GradedAlgebra {
    let table = vec![vec![0, 1], vec![1, 0]];
    let eps = vec![vec![rat(1), rat(1)], vec![rat(1), rat(-1)]];
    twisted_group_algebra(&table, &eps, &[Parity::Even, Parity::Even]).unwrap()
}

#[test]
fn criterion_01_algebra_axioms() {
    let started = Instant::now();
    let hecke = hecke_algebra(2, rat(1), ratio(1, 2)).unwrap();
    let algebras: Vec<(&str, GradedAlgebra)> = vec![
        ("matrix(3,2)", matrix_superalgebra(3, 2)),
        ("twisted-z2", twisted_z2()),
        ("hecke(2)", hecke.clone()),
        ("matrix(3,2)⊗twisted-z2", tensor_product(&matrix_superalgebra(3, 2), &twisted_z2())),
        ("twisted-z2⊗hecke(2)", tensor_product(&twisted_z2(), &hecke)),
    ];
    for (name, alg) in algebras {
        let one = Instant::now();
        let report = alg.verify();
        assert!(report.passed(), "{name}: {report}");
        assert!(
            one.elapsed() < Duration::from_secs(5),
            "{name} took {:?}",
            one.elapsed()
        );
    }
    done(1, started);
}

#[test]
fn criterion_02_polarization_round_trip() {
    let started = Instant::now();
    for (name, alg) in [
        ("laurent(8)", laurent(8)),
        ("matrix-laurent(2,1,6)", matrix_laurent(2, 1, 6)),
    ] {
        let pair = alg.extract_pair();
        let compat = verify_compatibility(&pair);
        assert!(compat.passed(), "{name}: {compat}");
        let (rebuilt, build) = build_from_pair(&pair);
        assert!(build.passed(), "{name}: {build}");
        assert_eq!(rebuilt.extract_pair(), pair, "{name}: restricted products changed");
        assert_eq!(
            rebuilt.mixed_entries(),
            alg.mixed_entries(),
            "{name}: mixed products changed"
        );
    }
    done(2, started);
}

#[test]
fn criterion_03_filtration() {
    let started = Instant::now();
    // On the Laurent band the filtration is spanned by the low powers:
    // level m = span{1, t, …, t^m}, one even dimension per power.
    let alg = laurent(8);
    let filt = compute_filtration(&alg, 6).unwrap();
    for m in 0..=6i32 {
        assert_eq!(filt.dim(m), m as usize + 1, "level {m} dimension");
        for k in 0..filt.dim(m) {
            let e = filt.element(&alg, m, k);
            for (s, _) in e.coords() {
                assert!(
                    s.is_plus() && s.magnitude() as i32 <= m + 1,
                    "level {m} contains {s}"
                );
            }
        }
    }
    let report = verify_filtration_products(&alg, &filt);
    assert!(report.passed(), "laurent: {report}");

    let alg = matrix_laurent(2, 1, 6);
    let filt = compute_filtration(&alg, 4).unwrap();
    let report = verify_filtration_products(&alg, &filt);
    assert!(report.passed(), "matrix-laurent: {report}");
    done(3, started);
}

#[test]
fn criterion_04_cyclic_projection() {
    let started = Instant::now();
    for (name, alg) in [
        ("laurent(8)", laurent(8)),
        ("matrix-laurent(2,1,6)", matrix_laurent(2, 1, 6)),
    ] {
        let report = cyclic_projection_check(&alg, 0x5eed, 60);
        assert!(report.passed(), "{name}: {report}");
    }
    done(4, started);
}

#[test]
fn criterion_05_poisson_pencil() {
    let started = Instant::now();
    for file in ["lax_element_laurent.json", "lax_element_matrix.json"] {
        let setup = lax_setup(file);
        let report = verify_superpair(&setup, &pencil(), &config(25));
        assert!(report.passed(), "{file}: {report}");
        for identity in ["skew", "jacobi", "leibniz"] {
            for lambda in ["0", "1", "-1", "2"] {
                let name = format!("{identity}(λ={lambda})");
                assert!(
                    report
                        .items
                        .iter()
                        .any(|i| i.name == name && i.status == CheckStatus::Pass),
                    "{file}: missing {name}"
                );
            }
        }
    }
    assert!(started.elapsed() < Duration::from_secs(600));
    done(5, started);
}

#[test]
fn criterion_06_deformation_expansion() {
    let started = Instant::now();
    for file in ["lax_element_laurent.json", "lax_element_matrix.json"] {
        let setup = lax_setup(file);
        let report = epsilon_expansion_check(&setup, &config(25));
        assert!(report.passed(), "{file}: {report}");
    }
    done(6, started);
}

#[test]
fn criterion_07_operator_calculus() {
    let started = Instant::now();
    let alg = matrix_superalgebra(2, 1);
    let report = composition_associativity_check(&alg, 0x5eed, 100);
    assert!(report.passed(), "associativity: {report}");
    let report = variational_annihilation_check(0x5eed, 60);
    assert!(report.passed(), "annihilation: {report}");
    let report = commutator_trace_check(&alg, 0x5eed, 50);
    assert!(report.passed(), "commutator traces: {report}");
    done(7, started);
}

#[test]
fn criterion_08_fractional_root() {
    let started = Instant::now();
    let lax = scalar_kdv_lax();
    let r = lax.root(-7).unwrap();

    // Order-matching oracle: write R = ∂ + f₁∂⁻¹ + f₂∂⁻² + f₃∂⁻³ + … and
    // match R² = ∂² + u order by order: 2f₁ = u, 2f₂ + f₁′ = 0,
    // 2f₃ + f₂′ + f₁² = 0.
    let u = SuperPoly::var(Slot::new(0, 0).var(Parity::Even));
    let f1 = u.scale(&ratio(1, 2));
    let f2 = f1.total_derivative().scale(&ratio(-1, 2));
    let f3 = (&f2.total_derivative() + &(&f1 * &f1)).scale(&ratio(-1, 2));
    assert_eq!(r.coeff(-1).coord(0), f1);
    assert_eq!(r.coeff(-2).coord(0), f2);
    assert_eq!(r.coeff(-3).coord(0), f3);

    // (root)² − L = 0 in every order down to −6.
    let sq = r.mul_to(&r, lax.algebra(), Some(-6)).unwrap();
    let diff = sq.sub(&lax.lax());
    assert!(diff.is_zero(), "residual {}", diff.display(lax.algebra()));
    done(8, started);
}

#[test]
fn criterion_09_hierarchy_conservation_and_curvature() {
    let started = Instant::now();
    let lax = scalar_kdv_lax();

    let one = Instant::now();
    let report = lax.conservation_check(3, &[1, 3, 5]);
    assert!(report.passed(), "{report}");
    assert!(one.elapsed() < Duration::from_secs(120));

    let one = Instant::now();
    let z = lax.zero_curvature_residual(2, 3).unwrap();
    assert!(z.is_zero(), "residual {}", z.display(lax.algebra()));
    assert!(one.elapsed() < Duration::from_secs(120));
    done(9, started);
}

#[test]
fn criterion_10_hamiltonian_pencil_for_operators() {
    let started = Instant::now();
    for (name, lax) in [
        ("scalar depth 8", scalar_full_lax(8)),
        ("matrix depth 5", matrix_lax(5)),
    ] {
        let report = verify_hamiltonian_superpair(&lax, &pencil(), &config(5));
        assert!(report.passed(), "{name}: {report}");
    }
    done(10, started);
}

/// Runs the binary on a fixture and returns (exit code, parsed report).
fn run_cli(args: &[String], report_name: &str) -> (i32, serde_json::Value) {
    let report_path = Path::new(env!("CARGO_TARGET_TMPDIR")).join(report_name);
    let out = Command::new(env!("CARGO_BIN_EXE_superpair"))
        .args(args)
        .arg("--report")
        .arg(&report_path)
        .output()
        .expect("binary runs");
    let code = out.status.code().expect("no signal");
    let report = std::fs::read(&report_path)
        .ok()
        .and_then(|b| serde_json::from_slice(&b).ok())
        .unwrap_or(serde_json::Value::Null);
    (code, report)
}

fn first_failure(report: &serde_json::Value) -> Option<(String, String)> {
    report["checks"].as_array()?.iter().find_map(|c| {
        (c["status"] == "fail").then(|| {
            (
                c["name"].as_str().unwrap_or_default().to_string(),
                c["witness"].as_str().unwrap_or_default().to_string(),
            )
        })
    })
}

#[test]
fn criterion_11_negative_controls() {
    let started = Instant::now();
    let path = |name: &str| fixture(name).to_str().unwrap().to_string();
    let cases: [(&str, Vec<String>); 3] = [
        (
            "perturbed structure constant",
            vec!["verify".into(), path("negative_perturbed_algebra.json")],
        ),
        (
            "non-central kappa",
            vec![
                "superpair".into(),
                path("negative_noncentral_kappa.json"),
                "--samples".into(),
                "5".into(),
            ],
        ),
        (
            "flipped projection",
            vec![
                "superpair".into(),
                path("negative_flipped_adler.json"),
                "--samples".into(),
                "5".into(),
            ],
        ),
    ];
    for (i, (label, args)) in cases.iter().enumerate() {
        let (code, report) = run_cli(args, &format!("negative_{i}.report.json"));
        assert_eq!(code, 1, "{label}: expected exit 1");
        let (name, witness) =
            first_failure(&report).unwrap_or_else(|| panic!("{label}: no failing check"));
        assert!(
            !witness.is_empty(),
            "{label}: failing check {name} has no witness"
        );
    }

    // A document that does not parse is reported on stderr with exit 2.
    let out = Command::new(env!("CARGO_BIN_EXE_superpair"))
        .args(["verify", fixture("malformed.json").to_str().unwrap()])
        .output()
        .expect("binary runs");
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
    done(11, started);
}
