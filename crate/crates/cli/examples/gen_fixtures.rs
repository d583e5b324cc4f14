//! One-off generator for the derived fixtures (run manually, output is
//! committed): the pair-of-products extracted from the Laurent band and an
//! inline copy of the matrix superalgebra with one structure constant
//! perturbed.

use superpair_cli::doc::{pair_to_doc, AlgebraDoc, AlgebraSpec, SpecDocument};
use superpair_core::graded::{matrix_superalgebra, GradedAlgebra};
use superpair_core::polarized::laurent;
use superpair_core::rat::format_rat;

fn inline_of(alg: &GradedAlgebra) -> (Vec<String>, Vec<u8>, Vec<Vec<Vec<(usize, String)>>>, Vec<Vec<String>>, Option<Vec<(usize, String)>>) {
    let n = alg.dim();
    let labels: Vec<String> = (0..n).map(|i| alg.label(i).to_string()).collect();
    let parities: Vec<u8> = (0..n).map(|i| alg.parity(i).idx() as u8).collect();
    let product: Vec<Vec<Vec<(usize, String)>>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    alg.basis_mul(i, j)
                        .iter()
                        .map(|(k, c)| (*k, format_rat(c)))
                        .collect()
                })
                .collect()
        })
        .collect();
    let gram: Vec<Vec<String>> = (0..n)
        .map(|i| (0..n).map(|j| format_rat(alg.gram_at(i, j))).collect())
        .collect();
    let identity = alg
        .identity()
        .map(|v| v.iter().map(|(k, c)| (*k, format_rat(c))).collect());
    (labels, parities, product, gram, identity)
}

fn main() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");

    // Pair of restricted products of the Laurent band.
    let pair = laurent(8).extract_pair();
    let doc = pair_to_doc(
        Some("restricted products of the Laurent band, degrees -8..7".into()),
        &pair,
    );
    let mut json = serde_json::to_string_pretty(&doc).unwrap();
    json.push('\n');
    std::fs::write(dir.join("pair_laurent_8.json"), json).unwrap();

    // Matrix superalgebra with E21·E12 rescaled: associativity and the
    // invariance of the form both break, so `verify` fails with witnesses.
    let alg = matrix_superalgebra(2, 1);
    let (labels, parities, mut product, gram, identity) = inline_of(&alg);
    product[2][1] = vec![(3, "2".to_string())]; // E21·E12 = 2·E22
    let doc = SpecDocument::Algebra(AlgebraDoc {
        name: Some("negative control: matrix units with E21*E12 rescaled to 2*E22".into()),
        algebra: AlgebraSpec::Inline {
            labels,
            parities: parities.into_iter().collect(),
            product,
            gram,
            identity,
        },
    });
    let mut json = serde_json::to_string_pretty(&doc).unwrap();
    json.push('\n');
    std::fs::write(dir.join("negative_perturbed_algebra.json"), json).unwrap();

    println!("fixtures written to {}", dir.display());
}
