//! The four batch commands.
//!
//! Each command reads one document, runs the checks appropriate to its
//! kind, prints a human summary and optionally writes the JSON report.
//! The returned exit code is `0` when every check passed, `1` when at least
//! one failed; schema and construction errors surface as `Err` and the
//! caller maps them to exit code `2`.

use crate::doc::{parse_lambdas, polarized_to_doc, CheckFamily, SpecDocument};
use crate::report::{machine_path, write_machine, Report};
use anyhow::{bail, Context, Result};
use std::path::{Path, PathBuf};
use std::time::Instant;
use superpair_core::pdo::verify_hamiltonian_superpair;
use superpair_core::poisson::{cyclic_projection_check, verify_superpair, SuperpairConfig};
use superpair_core::polarized::{
    build_from_pair, compute_filtration, verify_compatibility, verify_filtration_products,
    PairOfProducts, PolElement, PolarizedAlgebra,
};
use superpair_core::CheckReport;

/// Prints the report, writes the machine copy when requested, and turns the
/// outcome into an exit code.
fn finish(
    command: &str,
    input: &Path,
    bytes: &[u8],
    seed: Option<u64>,
    doc: &SpecDocument,
    checks: CheckReport,
    report_to: Option<&Path>,
    started: Instant,
) -> Result<i32> {
    let rep = Report::new(
        command,
        doc.kind(),
        doc.name().map(str::to_string),
        bytes,
        seed,
        &checks,
    );
    rep.print_human(started.elapsed());
    if let Some(path) = machine_path(report_to, input) {
        write_machine(&rep, &path)?;
        println!("report written to {}", path.display());
    }
    Ok(if rep.passed() { 0 } else { 1 })
}

/// `κ` must commute with every window symbol; products the window truncates
/// are noted rather than silently ignored.
fn kappa_centrality(alg: &PolarizedAlgebra, kappa: &PolElement, checks: &mut CheckReport) {
    let mut witness = None;
    let mut truncated = 0usize;
    for s in alg.symbols() {
        let e = PolElement::symbol(s);
        match (alg.mul(kappa, &e), alg.mul(&e, kappa)) {
            (Ok(ke), Ok(ek)) => {
                if witness.is_none() && ke.sub_elem(&ek) != PolElement::zero() {
                    witness = Some(format!("[κ, {s}] ≠ 0"));
                }
            }
            _ => truncated += 1,
        }
    }
    if truncated > 0 {
        checks.flag(format!(
            "κ-centrality: {truncated} products truncated by the window"
        ));
    }
    match witness {
        None => checks.pass("kappa-central"),
        Some(w) => checks.fail("kappa-central", w),
    }
}

/// Structural checks for every document kind: the algebra axioms, and for
/// polarized documents the pair compatibility, the cyclic projection
/// identity and the filtration product inclusions.
pub fn cmd_verify(
    input: &Path,
    seed: u64,
    samples: usize,
    report_to: Option<&Path>,
) -> Result<i32> {
    let started = Instant::now();
    let (doc, bytes) = SpecDocument::load(input)?;
    let mut checks = CheckReport::new();
    match &doc {
        SpecDocument::Algebra(d) => {
            checks.absorb("algebra: ", d.algebra.build()?.verify());
        }
        SpecDocument::Polarized(d) => {
            let alg = d.algebra.build()?;
            verify_polarized(&alg, seed, samples, &mut checks);
        }
        SpecDocument::PairOfProducts(d) => {
            checks.absorb("compatibility: ", verify_compatibility(&d.build()?));
        }
        SpecDocument::LaxElement(d) => {
            let (setup, _) = d.build()?;
            checks.pass("constructs");
            checks.absorb("algebra: ", setup.algebra().verify());
            kappa_centrality(setup.algebra(), setup.kappa(), &mut checks);
        }
        SpecDocument::LaxPdo(d) => {
            let lax = d.build()?;
            checks.pass("constructs");
            checks.absorb("algebra: ", lax.algebra().verify());
            match lax.algebra().centrality_witness(lax.kappa()) {
                None => checks.pass("kappa-central"),
                Some(w) => checks.fail("kappa-central", w),
            }
        }
    }
    finish("verify", input, &bytes, Some(seed), &doc, checks, report_to, started)
}

fn verify_polarized(alg: &PolarizedAlgebra, seed: u64, samples: usize, checks: &mut CheckReport) {
    checks.absorb("algebra: ", alg.verify());
    checks.absorb("compatibility: ", verify_compatibility(&alg.extract_pair()));
    checks.absorb("cyclic: ", cyclic_projection_check(alg, seed, samples));
    if !alg.has_levels() {
        checks.skip("filtration", "the document declares no levels");
        return;
    }
    let max_m = alg
        .symbols()
        .into_iter()
        .filter_map(|s| alg.level(s))
        .max()
        .unwrap_or(0)
        .max(0);
    match compute_filtration(alg, max_m) {
        Ok(filt) => checks.absorb("filtration: ", verify_filtration_products(alg, &filt)),
        Err(e) => checks.skip("filtration", format!("not computable on this window: {e}")),
    }
}

/// Randomized verification of the Poisson pencil attached to a Lax element:
/// κ-centrality, skew-symmetry, Jacobi and Leibniz per pencil value, and the
/// first-order deformation expansion.
pub fn cmd_superpair(
    input: &Path,
    lambdas_raw: &[String],
    seed: u64,
    samples: usize,
    report_to: Option<&Path>,
) -> Result<i32> {
    let started = Instant::now();
    let (doc, bytes) = SpecDocument::load(input)?;
    let SpecDocument::LaxElement(d) = &doc else {
        bail!(
            "superpair expects a lax-element document, found kind \"{}\"",
            doc.kind()
        );
    };
    let lambdas = parse_lambdas(lambdas_raw)?;
    let (setup, variant) = d.build()?;
    let cfg = SuperpairConfig {
        seed,
        triples: samples,
        max_degree: 2,
        variant,
    };
    let checks = verify_superpair(&setup, &lambdas, &cfg);
    finish("superpair", input, &bytes, Some(seed), &doc, checks, report_to, started)
}

/// Hierarchy checks for a Lax operator: conservation of the residue
/// densities along the listed flows, zero curvature for every flow pair,
/// and — when the document declares it — the Hamiltonian pencil identities.
#[allow(clippy::too_many_arguments)]
pub fn cmd_hierarchy(
    input: &Path,
    flows: &[u32],
    densities: &[u32],
    depth: Option<u32>,
    lambdas_raw: &[String],
    seed: u64,
    samples: usize,
    report_to: Option<&Path>,
) -> Result<i32> {
    let started = Instant::now();
    let (doc, bytes) = SpecDocument::load(input)?;
    let SpecDocument::LaxPdo(d) = &doc else {
        bail!(
            "hierarchy expects a lax-pdo document, found kind \"{}\"",
            doc.kind()
        );
    };
    let mut lax = d.build()?;
    if let Some(depth) = depth {
        lax = lax.with_work_floor(-(depth as i32));
    }
    let mut checks = CheckReport::new();
    for family in d.effective_checks() {
        match family {
            CheckFamily::Hierarchy => {
                for &m in flows {
                    checks.absorb("", lax.conservation_check(m, densities));
                }
                for (i, &m) in flows.iter().enumerate() {
                    for &n in &flows[i + 1..] {
                        let name = format!("zero-curvature({m},{n})");
                        match lax.zero_curvature_residual(m, n) {
                            Ok(z) if z.is_zero() => {
                                if let Some(f) = z.floor() {
                                    checks.flag(format!("{name} verified above order {f}"));
                                }
                                checks.pass(name);
                            }
                            Ok(z) => checks.fail(
                                name,
                                format!("residual {}", z.display(lax.algebra())),
                            ),
                            Err(e) => checks.fail(name, e.to_string()),
                        }
                    }
                }
            }
            CheckFamily::Superpair => {
                let lambdas = parse_lambdas(lambdas_raw)?;
                let cfg = SuperpairConfig {
                    seed,
                    triples: samples,
                    max_degree: 2,
                    variant: d.variant.into(),
                };
                checks.absorb("", verify_hamiltonian_superpair(&lax, &lambdas, &cfg));
            }
        }
    }
    finish("hierarchy", input, &bytes, Some(seed), &doc, checks, report_to, started)
}

/// Reassembles a polarized algebra from a pair of restricted products and
/// writes it as an inline polarized document.  A polarized document is also
/// accepted: its pair is extracted first and the reconstruction is compared
/// against the source (a round trip).
pub fn cmd_build(input: &Path, out: Option<&Path>, report_to: Option<&Path>) -> Result<i32> {
    let started = Instant::now();
    let (doc, bytes) = SpecDocument::load(input)?;
    let (pair, source): (PairOfProducts, Option<PolarizedAlgebra>) = match &doc {
        SpecDocument::PairOfProducts(d) => (d.build()?, None),
        SpecDocument::Polarized(d) => {
            let alg = d.algebra.build()?;
            (alg.extract_pair(), Some(alg))
        }
        other => bail!(
            "build expects a pair-of-products or polarized document, found kind \"{}\"",
            other.kind()
        ),
    };
    let mut checks = CheckReport::new();
    checks.absorb("compatibility: ", verify_compatibility(&pair));
    if checks.passed() {
        let (alg, rep) = build_from_pair(&pair);
        checks.absorb("build: ", rep);
        if let Some(orig) = &source {
            checks.require(
                "round-trip",
                alg.extract_pair() == pair && alg.mixed_entries() == orig.mixed_entries(),
                || "reassembled products differ from the source".to_string(),
            );
        }
        if checks.passed() {
            let out_doc = polarized_to_doc(doc.name().map(str::to_string), &alg);
            let mut json =
                serde_json::to_string_pretty(&out_doc).context("cannot serialize the output")?;
            json.push('\n');
            let out_path = out
                .map(Path::to_path_buf)
                .unwrap_or_else(|| default_out_path(input));
            std::fs::write(&out_path, json)
                .with_context(|| format!("cannot write {}", out_path.display()))?;
            println!("polarized document written to {}", out_path.display());
        }
    }
    finish("build", input, &bytes, None, &doc, checks, report_to, started)
}

fn default_out_path(input: &Path) -> PathBuf {
    let stem = input.file_stem().unwrap_or_default().to_string_lossy();
    input.with_file_name(format!("{stem}.built.json"))
}
