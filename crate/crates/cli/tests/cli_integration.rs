//! End-to-end tests of the `superpair` binary: the exit-code contract,
//! report determinism, the report-directory environment variable, and the
//! build command's document output.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use superpair_cli::doc::{PairDoc, SpecDocument};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

fn tmp(name: &str) -> PathBuf {
    Path::new(env!("CARGO_TARGET_TMPDIR")).join(name)
}

fn cli() -> Command {
    Command::new(env!("CARGO_BIN_EXE_superpair"))
}

fn run(args: &[&str]) -> Output {
    cli().args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

#[test]
fn verify_passes_on_the_shipped_documents() {
    for name in [
        "algebra_matrix_3_2.json",
        "algebra_twisted_z2.json",
        "algebra_hecke_2.json",
        "algebra_hecke_3.json",
        "algebra_tensor.json",
        "polarized_laurent_8.json",
        "lax_element_laurent.json",
        "lax_element_matrix.json",
        "lax_pdo_scalar_kdv.json",
        "lax_pdo_scalar_full.json",
        "lax_pdo_matrix.json",
        "pair_laurent_8.json",
    ] {
        let out = run(&["verify", fixture(name).to_str().unwrap()]);
        assert_eq!(
            code(&out),
            0,
            "{name}: {}",
            String::from_utf8_lossy(&out.stdout)
        );
    }
}

#[test]
fn exit_codes_separate_failures_from_malformed_input() {
    let out = run(&["verify", fixture("negative_perturbed_algebra.json").to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    let out = run(&["verify", fixture("malformed.json").to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
    // A kind mismatch is a usage error, not a check failure.
    let out = run(&["superpair", fixture("algebra_hecke_2.json").to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    let out = run(&["hierarchy", fixture("lax_element_laurent.json").to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    let out = run(&["verify", "/nonexistent/nothing.json"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn reports_are_byte_identical_for_fixed_input_and_seed() {
    let spec = fixture("lax_element_matrix.json");
    let mut bytes = Vec::new();
    for i in 0..2 {
        let report = tmp(&format!("determinism_{i}.json"));
        let out = run(&[
            "superpair",
            spec.to_str().unwrap(),
            "--samples",
            "4",
            "--seed",
            "99",
            "--report",
            report.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0);
        bytes.push(std::fs::read(&report).unwrap());
    }
    assert_eq!(bytes[0], bytes[1]);
    let parsed: serde_json::Value = serde_json::from_slice(&bytes[0]).unwrap();
    assert_eq!(parsed["seed"], 99);
    assert_eq!(parsed["status"], "pass");
    assert!(parsed["digest"].as_str().unwrap().len() == 64);
}

#[test]
fn report_directory_comes_from_the_environment() {
    let dir = tmp("report_dir_env");
    let out = cli()
        .args(["verify", fixture("algebra_matrix_3_2.json").to_str().unwrap()])
        .env("SUPERPAIR_REPORT_DIR", &dir)
        .output()
        .expect("binary runs");
    assert_eq!(code(&out), 0);
    let report = dir.join("algebra_matrix_3_2.report.json");
    let parsed: serde_json::Value =
        serde_json::from_slice(&std::fs::read(report).unwrap()).unwrap();
    assert_eq!(parsed["kind"], "algebra");
}

#[test]
fn build_emits_a_verifiable_polarized_document() {
    let built = tmp("laurent_built.json");
    let out = run(&[
        "build",
        fixture("pair_laurent_8.json").to_str().unwrap(),
        "--out",
        built.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let (doc, _) = SpecDocument::load(&built).unwrap();
    let SpecDocument::Polarized(d) = &doc else {
        panic!("build must emit a polarized document");
    };
    d.algebra.build().unwrap();
    let out = run(&["verify", built.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn build_round_trips_a_polarized_document() {
    let built = tmp("matrix_laurent_roundtrip.json");
    let out = run(&[
        "build",
        fixture("polarized_matrix_laurent_2_1_6.json").to_str().unwrap(),
        "--out",
        built.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("round-trip"), "{text}");
}

#[test]
fn build_rejects_incompatible_constants() {
    // Perturb one restricted-product constant; the compatibility identities
    // then fail and nothing is emitted.
    let (doc, _) = SpecDocument::load(&fixture("pair_laurent_8.json")).unwrap();
    let SpecDocument::PairOfProducts(mut pair) = doc else {
        panic!("fixture is a pair document");
    };
    let entry = pair
        .plus
        .iter_mut()
        .find(|e| e.left == (0, 2) && e.right == (0, 2))
        .expect("t·t entry exists");
    entry.coeffs[0].1 = "2".to_string();
    let corrupted = tmp("pair_corrupted.json");
    std::fs::write(&corrupted, serde_json::to_string(&SpecDocument::PairOfProducts(pair)).unwrap())
        .unwrap();

    let built = tmp("pair_corrupted_built.json");
    let out = run(&[
        "build",
        corrupted.to_str().unwrap(),
        "--out",
        built.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 1);
    assert!(!built.exists());
}

#[test]
fn build_accepts_a_pair_with_no_products() {
    let empty = tmp("pair_empty.json");
    let doc = SpecDocument::PairOfProducts(PairDoc {
        name: Some("no products at all".into()),
        window: [2, 1],
        plus: Vec::new(),
        minus: Vec::new(),
    });
    std::fs::write(&empty, serde_json::to_string(&doc).unwrap()).unwrap();
    let built = tmp("pair_empty_built.json");
    let out = run(&[
        "build",
        empty.to_str().unwrap(),
        "--out",
        built.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let out = run(&["verify", built.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
}

#[test]
fn hierarchy_reports_floor_contamination_when_too_shallow() {
    let out = run(&[
        "hierarchy",
        fixture("lax_pdo_scalar_kdv.json").to_str().unwrap(),
        "--depth",
        "3",
    ]);
    assert_eq!(code(&out), 1);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("floor"), "{text}");
}

#[test]
fn repeated_flow_gives_a_trivial_zero_curvature() {
    let out = run(&[
        "hierarchy",
        fixture("lax_pdo_scalar_kdv.json").to_str().unwrap(),
        "--flows",
        "2,2",
        "--densities",
        "1",
    ]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("zero-curvature(2,2)"), "{text}");
}

#[test]
fn lambda_lists_accept_rationals() {
    let out = run(&[
        "superpair",
        fixture("lax_element_matrix.json").to_str().unwrap(),
        "--lambdas",
        "1/2,-3",
        "--samples",
        "3",
    ]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("jacobi(λ=1/2)"), "{text}");
    assert!(text.contains("jacobi(λ=-3)"), "{text}");
}
