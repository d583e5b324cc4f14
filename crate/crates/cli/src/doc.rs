//! The on-disk document model: JSON descriptions of the algebras and Lax
//! data the batch commands operate on, plus the conversions into core
//! objects.
//!
//! Conventions shared by every document kind:
//!
//! - every coefficient is an exact rational written as a string, `"p"` or
//!   `"p/q"` (for example `"-3/4"`); floating point never appears;
//! - basis parities are `0` (even) or `1` (odd);
//! - a polarized symbol is `[parity, idx]` with positive `idx` for a `ς⁺`
//!   symbol and negative `idx` for a `ς⁻` symbol;
//! - a pseudo-differential slot is `[basis, order]`.
//!
//! The top-level `kind` tag selects the document type: `"algebra"`,
//! `"polarized"`, `"pair-of-products"`, `"lax-element"` (a Lax element of a
//! polarized algebra, driving the Poisson-pencil checks) or `"lax-pdo"` (a
//! Lax pseudo-differential operator, driving the variational checks and the
//! commuting flows).
//!
//! Conversion errors returned from this module mean the document itself is
//! unusable — a missing basis element, a malformed rational, an index
//! outside the window.  Data that is well-shaped but *wrong* (a product
//! table that fails associativity, a non-central κ) converts successfully
//! and is reported by the checks, witness included; that distinction is what
//! separates exit code 2 from exit code 1.

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;
use superpair_core::graded::{
    hecke_algebra, matrix_superalgebra, scalar_algebra, tensor_product, twisted_group_algebra,
    AlgElement, GradedAlgebra, SparseVec,
};
use superpair_core::pdo::{LaxPdo, Pdo, Slot};
use superpair_core::poisson::{AdlerVariant, PoissonSetup};
use superpair_core::polarized::{
    laurent, matrix_laurent, PairOfProducts, PolElement, PolarizedAlgebra, ProductEntry, SignedIdx,
};
use superpair_core::rat::{format_rat, parse_rat, Rat};
use superpair_core::superpoly::SuperPoly;
use superpair_core::Parity;

/// A parsed input document.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SpecDocument {
    Algebra(AlgebraDoc),
    Polarized(PolarizedDoc),
    PairOfProducts(PairDoc),
    LaxElement(LaxElementDoc),
    LaxPdo(LaxPdoDoc),
}

impl SpecDocument {
    /// Parses a document from raw JSON bytes.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        serde_json::from_slice(bytes).context("document does not match the schema")
    }

    /// Reads and parses a document, returning the raw bytes as well so the
    /// caller can digest exactly what was read.
    pub fn load(path: &Path) -> Result<(Self, Vec<u8>)> {
        let bytes =
            std::fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
        let doc = Self::from_bytes(&bytes)
            .with_context(|| format!("cannot parse {}", path.display()))?;
        Ok((doc, bytes))
    }

    pub fn kind(&self) -> &'static str {
        match self {
            SpecDocument::Algebra(_) => "algebra",
            SpecDocument::Polarized(_) => "polarized",
            SpecDocument::PairOfProducts(_) => "pair-of-products",
            SpecDocument::LaxElement(_) => "lax-element",
            SpecDocument::LaxPdo(_) => "lax-pdo",
        }
    }

    pub fn name(&self) -> Option<&str> {
        let name = match self {
            SpecDocument::Algebra(d) => &d.name,
            SpecDocument::Polarized(d) => &d.name,
            SpecDocument::PairOfProducts(d) => &d.name,
            SpecDocument::LaxElement(d) => &d.name,
            SpecDocument::LaxPdo(d) => &d.name,
        };
        name.as_deref()
    }
}

/// A `[parity, idx]` pair naming a polarized symbol.
pub type SymbolDoc = (u8, i32);

/// A `[basis, order]` pair naming a pseudo-differential slot.
pub type SlotDoc = (usize, i32);

fn parity_of(p: u8) -> Result<Parity> {
    match p {
        0 => Ok(Parity::Even),
        1 => Ok(Parity::Odd),
        _ => bail!("parity must be 0 or 1, found {p}"),
    }
}

fn rat_of(s: &str) -> Result<Rat> {
    parse_rat(s).with_context(|| format!("bad rational {s:?}"))
}

fn signed_of((p, idx): SymbolDoc) -> Result<SignedIdx> {
    if idx == 0 {
        bail!("symbol index must be nonzero");
    }
    Ok(SignedIdx::new(parity_of(p)?, idx))
}

fn symbol_doc(s: SignedIdx) -> SymbolDoc {
    (s.parity.idx() as u8, s.idx)
}

fn sparse_of(coords: &[(usize, String)], dim: usize) -> Result<SparseVec> {
    let mut out = SparseVec::new();
    for (i, c) in coords {
        if *i >= dim {
            bail!("basis index {i} out of range (dimension {dim})");
        }
        out.push((*i, rat_of(c)?));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// kind = "algebra"
// ---------------------------------------------------------------------------

/// A finite-dimensional graded algebra with its supersymmetric form.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AlgebraDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub algebra: AlgebraSpec,
}

/// Either a named construction or a raw structure-constant table.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum AlgebraSpec {
    /// The one-dimensional even algebra.
    Scalar,
    /// Matrix units `E_ab` on `k` rows with the first `k1` rows even.
    MatrixSuperalgebra { k: usize, k1: usize },
    /// A twisted group algebra: `table[g][h]` is the index of `gh` and
    /// `cocycle[g][h]` the twist `ε(g,h)`.
    TwistedGroup {
        table: Vec<Vec<usize>>,
        cocycle: Vec<Vec<String>>,
        parities: Vec<u8>,
    },
    /// The Hecke algebra on `k` strands with parameter `q` and Markov-trace
    /// parameter `zeta`.
    Hecke { k: usize, q: String, zeta: String },
    /// Graded tensor product of two other algebras.
    Tensor {
        left: Box<AlgebraSpec>,
        right: Box<AlgebraSpec>,
    },
    /// A raw table: `product[i][j]` expands the product of basis `i` and
    /// `j` as `[basis, coeff]` terms, `gram[i][j]` is `⟨e_i, e_j⟩`.
    Inline {
        labels: Vec<String>,
        parities: Vec<u8>,
        product: Vec<Vec<Vec<(usize, String)>>>,
        gram: Vec<Vec<String>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        identity: Option<Vec<(usize, String)>>,
    },
}

impl AlgebraSpec {
    pub fn build(&self) -> Result<GradedAlgebra> {
        match self {
            AlgebraSpec::Scalar => Ok(scalar_algebra()),
            AlgebraSpec::MatrixSuperalgebra { k, k1 } => {
                if *k < 1 || *k1 > *k {
                    bail!("matrix-superalgebra needs 1 ≤ k and k1 ≤ k, found k={k}, k1={k1}");
                }
                Ok(matrix_superalgebra(*k, *k1))
            }
            AlgebraSpec::TwistedGroup {
                table,
                cocycle,
                parities,
            } => {
                let eps = cocycle
                    .iter()
                    .map(|row| row.iter().map(|s| rat_of(s)).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()?;
                let pars = parities
                    .iter()
                    .map(|p| parity_of(*p))
                    .collect::<Result<Vec<_>>>()?;
                twisted_group_algebra(table, &eps, &pars)
                    .context("twisted group data is inconsistent")
            }
            AlgebraSpec::Hecke { k, q, zeta } => hecke_algebra(*k, rat_of(q)?, rat_of(zeta)?)
                .context("Hecke parameters are inconsistent"),
            AlgebraSpec::Tensor { left, right } => {
                Ok(tensor_product(&left.build()?, &right.build()?))
            }
            AlgebraSpec::Inline {
                labels,
                parities,
                product,
                gram,
                identity,
            } => {
                let n = labels.len();
                if parities.len() != n || product.len() != n || gram.len() != n {
                    bail!("inline algebra tables must all have {n} rows");
                }
                let pars = parities
                    .iter()
                    .map(|p| parity_of(*p))
                    .collect::<Result<Vec<_>>>()?;
                let mut tab = vec![vec![SparseVec::new(); n]; n];
                for (i, row) in product.iter().enumerate() {
                    if row.len() != n {
                        bail!("product row {i} must have {n} columns");
                    }
                    for (j, cell) in row.iter().enumerate() {
                        tab[i][j] = sparse_of(cell, n)?;
                    }
                }
                let mut gr = vec![vec![Rat::default(); n]; n];
                for (i, row) in gram.iter().enumerate() {
                    if row.len() != n {
                        bail!("gram row {i} must have {n} columns");
                    }
                    for (j, c) in row.iter().enumerate() {
                        gr[i][j] = rat_of(c)?;
                    }
                }
                let id = identity
                    .as_ref()
                    .map(|v| sparse_of(v, n))
                    .transpose()?;
                GradedAlgebra::new(labels.clone(), pars, tab, gr, id)
                    .context("inline algebra data is malformed")
            }
        }
    }
}

// ---------------------------------------------------------------------------
// kind = "polarized"
// ---------------------------------------------------------------------------

/// A polarized algebra presented on a finite index window.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolarizedDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub algebra: PolarizedSpec,
}

/// One product entry `left·right = Σ coeffs`; `complete: false` marks a
/// truncated expansion whose listed coefficients are exact anyway.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EntryDoc {
    pub left: SymbolDoc,
    pub right: SymbolDoc,
    pub coeffs: Vec<(SymbolDoc, String)>,
    #[serde(default = "default_true")]
    pub complete: bool,
}

fn default_true() -> bool {
    true
}

/// Either a named polarized construction or a raw product list.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum PolarizedSpec {
    /// Laurent polynomials `t^{-n}..t^{n-1}` split at degree 0.
    Laurent { n: u32 },
    /// Matrix-valued Laurent polynomials with a `(k, k1)` parity split.
    MatrixLaurent { k: usize, k1: usize, n: u32 },
    /// Raw window, products and (optionally) filtration levels.
    Inline {
        window: [u32; 2],
        products: Vec<EntryDoc>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        levels: Vec<(SymbolDoc, i32)>,
    },
}

impl PolarizedSpec {
    pub fn build(&self) -> Result<PolarizedAlgebra> {
        match self {
            PolarizedSpec::Laurent { n } => {
                if *n < 1 {
                    bail!("laurent window must have n ≥ 1");
                }
                Ok(laurent(*n))
            }
            PolarizedSpec::MatrixLaurent { k, k1, n } => {
                if *k < 1 || *k1 > *k || *n < 1 {
                    bail!("matrix-laurent needs 1 ≤ k, k1 ≤ k and n ≥ 1");
                }
                Ok(matrix_laurent(*k, *k1, *n))
            }
            PolarizedSpec::Inline {
                window,
                products,
                levels,
            } => {
                let prods = entry_map(products)?;
                let mut lvls = BTreeMap::new();
                for (s, m) in levels {
                    let s = signed_of(*s)?;
                    if lvls.insert(s, *m).is_some() {
                        bail!("duplicate level for {s}");
                    }
                }
                PolarizedAlgebra::new(*window, prods, lvls)
                    .context("inline polarized data is malformed")
            }
        }
    }
}

fn entry_map(entries: &[EntryDoc]) -> Result<BTreeMap<(SignedIdx, SignedIdx), ProductEntry>> {
    let mut out = BTreeMap::new();
    for e in entries {
        let a = signed_of(e.left)?;
        let b = signed_of(e.right)?;
        let mut coeffs = Vec::new();
        for (s, c) in &e.coeffs {
            coeffs.push((signed_of(*s)?, rat_of(c)?));
        }
        let mut entry = ProductEntry::from_coeffs(coeffs);
        entry.complete = e.complete;
        if out.insert((a, b), entry).is_some() {
            bail!("duplicate product entry {a}·{b}");
        }
    }
    Ok(out)
}

fn entry_docs(entries: &BTreeMap<(SignedIdx, SignedIdx), ProductEntry>) -> Vec<EntryDoc> {
    entries
        .iter()
        .map(|(&(a, b), e)| EntryDoc {
            left: symbol_doc(a),
            right: symbol_doc(b),
            coeffs: e
                .coeffs
                .iter()
                .map(|(s, c)| (symbol_doc(*s), format_rat(c)))
                .collect(),
            complete: e.complete,
        })
        .collect()
}

/// Serializes a built polarized algebra back into an inline document, the
/// output format of the `build` command.
pub fn polarized_to_doc(name: Option<String>, alg: &PolarizedAlgebra) -> SpecDocument {
    let mut products = BTreeMap::new();
    for a in alg.symbols() {
        for b in alg.symbols() {
            let entry = alg
                .product_entry(a, b)
                .expect("symbols come from the window");
            if entry.complete && entry.coeffs.is_empty() {
                continue; // an exact zero carries no information
            }
            products.insert((a, b), entry.clone());
        }
    }
    let levels = alg
        .symbols()
        .into_iter()
        .filter_map(|s| alg.level(s).map(|m| (symbol_doc(s), m)))
        .collect();
    SpecDocument::Polarized(PolarizedDoc {
        name,
        algebra: PolarizedSpec::Inline {
            window: alg.window(),
            products: entry_docs(&products),
            levels,
        },
    })
}

// ---------------------------------------------------------------------------
// kind = "pair-of-products"
// ---------------------------------------------------------------------------

/// The two restricted products `𝒜⁺×𝒜⁺` and `𝒜⁻×𝒜⁻` of a polarization,
/// the input of the `build` command.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub window: [u32; 2],
    pub plus: Vec<EntryDoc>,
    pub minus: Vec<EntryDoc>,
}

impl PairDoc {
    pub fn build(&self) -> Result<PairOfProducts> {
        Ok(PairOfProducts {
            window: self.window,
            plus: entry_map(&self.plus)?,
            minus: entry_map(&self.minus)?,
        })
    }
}

/// Serializes a pair of restricted products as a document.
pub fn pair_to_doc(name: Option<String>, pair: &PairOfProducts) -> SpecDocument {
    SpecDocument::PairOfProducts(PairDoc {
        name,
        window: pair.window,
        plus: entry_docs(&pair.plus),
        minus: entry_docs(&pair.minus),
    })
}

// ---------------------------------------------------------------------------
// kind = "lax-element"
// ---------------------------------------------------------------------------

/// Which projection the second Hamiltonian map uses.  `minus-plus` flips
/// the inner projection and is only useful as a negative control: on a
/// noncommutative algebra it breaks the bracket identities.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VariantDoc {
    #[default]
    MinusMinus,
    MinusPlus,
}

impl From<VariantDoc> for AdlerVariant {
    fn from(v: VariantDoc) -> AdlerVariant {
        match v {
            VariantDoc::MinusMinus => AdlerVariant::MinusMinus,
            VariantDoc::MinusPlus => AdlerVariant::MinusPlus,
        }
    }
}

/// A Lax element `L = L₀ + Σ u_{i,j}·ς⁺_{i,j}` of a polarized algebra,
/// together with the pencil parameter data: the constant part `l0`, the
/// deformation direction `kappa` and the number of `ς⁺` coordinates of each
/// parity that carry variables.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LaxElementDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub algebra: PolarizedSpec,
    pub iota: i32,
    pub l0: Vec<(SymbolDoc, String)>,
    pub kappa: Vec<(SymbolDoc, String)>,
    pub var_counts: [u32; 2],
    #[serde(default)]
    pub variant: VariantDoc,
}

fn pol_element(coords: &[(SymbolDoc, String)]) -> Result<PolElement> {
    let mut out = Vec::new();
    for (s, c) in coords {
        let coeff = SuperPoly::one().scale(&rat_of(c)?);
        out.push((signed_of(*s)?, coeff));
    }
    Ok(PolElement::from_coords(out))
}

impl LaxElementDoc {
    pub fn build(&self) -> Result<(PoissonSetup, AdlerVariant)> {
        let alg = self.algebra.build()?;
        let l0 = pol_element(&self.l0)?;
        let kappa = pol_element(&self.kappa)?;
        let setup = PoissonSetup::new(alg, self.iota, l0, kappa, self.var_counts)
            .context("Lax element data is malformed")?;
        Ok((setup, self.variant.into()))
    }
}

// ---------------------------------------------------------------------------
// kind = "lax-pdo"
// ---------------------------------------------------------------------------

/// Which check families a Lax operator document is meant to drive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckFamily {
    /// Conserved densities of the commuting flows and zero curvature.
    Hierarchy,
    /// Skew-symmetry and Jacobi for the Hamiltonian pencil.
    Superpair,
}

/// The variable pattern of a Lax operator.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum PatternDoc {
    /// One variable for every basis element at every order down to `-depth`;
    /// the operator is floored below to stand in for the infinite tail.
    Full { depth: u32 },
    /// Exactly the listed slots, with everything off the list constrained
    /// to zero.
    Explicit { slots: Vec<SlotDoc> },
}

/// A Lax pseudo-differential operator `L = L₀ + Σ u_slot·e_b ∂^o` over a
/// graded coefficient algebra.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LaxPdoDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub algebra: AlgebraSpec,
    pub iota: i32,
    /// Constant part, as `[order, [[basis, coeff], …]]` rows.
    pub l0: Vec<(i32, Vec<(usize, String)>)>,
    pub kappa: Vec<(usize, String)>,
    pub pattern: PatternDoc,
    /// Check families the document supports; defaults to `hierarchy` for an
    /// explicit pattern and `superpair` for a full one.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<CheckFamily>,
    #[serde(default)]
    pub variant: VariantDoc,
}

impl LaxPdoDoc {
    pub fn build(&self) -> Result<LaxPdo> {
        let alg = self.algebra.build()?;
        let dim = alg.dim();
        let mut l0 = Pdo::zero();
        for (order, coords) in &self.l0 {
            let coeff = AlgElement::from_constant(sparse_of(coords, dim)?);
            l0 = l0.add(&Pdo::term(coeff, *order));
        }
        let kappa = AlgElement::from_constant(sparse_of(&self.kappa, dim)?);
        let lax = match &self.pattern {
            PatternDoc::Full { depth } => LaxPdo::full_pattern(alg, self.iota, l0, kappa, *depth),
            PatternDoc::Explicit { slots } => {
                let mut pat = Vec::new();
                for (basis, order) in slots {
                    if *basis >= dim {
                        bail!("slot basis index {basis} out of range (dimension {dim})");
                    }
                    pat.push(Slot::new(*basis, *order));
                }
                LaxPdo::new(alg, self.iota, l0, kappa, pat)
            }
        };
        lax.context("Lax operator data is malformed")
    }

    /// The declared check families, or the pattern-derived default.
    pub fn effective_checks(&self) -> Vec<CheckFamily> {
        if !self.checks.is_empty() {
            return self.checks.clone();
        }
        match self.pattern {
            PatternDoc::Full { .. } => vec![CheckFamily::Superpair],
            PatternDoc::Explicit { .. } => vec![CheckFamily::Hierarchy],
        }
    }
}

/// Parses a `--lambdas` list, defaulting to the standard pencil sample
/// `{0, 1, −1, 2}` when empty.
pub fn parse_lambdas(raw: &[String]) -> Result<Vec<Rat>> {
    if raw.is_empty() {
        return Ok([0i64, 1, -1, 2].iter().map(|&n| Rat::from_integer(n.into())).collect());
    }
    raw.iter().map(|s| rat_of(s)).collect()
}
