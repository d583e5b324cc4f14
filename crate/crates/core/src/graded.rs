//! Finite-dimensional ℤ₂-graded associative algebras with supersymmetric
//! invariant forms.
//!
//! A [`GradedAlgebra`] is given by explicit data: a parity for every basis
//! symbol, the structure constants of the product, a Gram matrix for the
//! bilinear form, and optionally the identity element.  [`GradedAlgebra::verify`]
//! checks — exactly, over ℚ — that the data really is what it claims to be:
//!
//! * the product respects the grading and is associative;
//! * the form pairs equal parities only (`⟨A₀,A₁⟩ = 0`), is supersymmetric
//!   (`⟨u,v⟩ = (−1)^{|u||v|}⟨v,u⟩`), invariant (`⟨uv,w⟩ = ⟨u,vw⟩`), and
//!   nondegenerate.
//!
//! Constructors are provided for the standard examples: matrix superalgebras
//! with the supertrace form, Iwahori–Hecke algebras with a Markov trace,
//! twisted group algebras, and graded tensor products (with the Koszul sign
//! `(x⊗y)(z⊗w) = (−1)^{|y||z|} xz⊗yw`, so that odd elements of the two
//! factors anticommute).
//!
//! Elements ([`AlgElement`]) carry [`SuperPoly`] coefficients so the same
//! arithmetic serves both plain elements and the free modules over polynomial
//! rings used by the Poisson and pseudo-differential layers.  Coefficients
//! written on the left of basis symbols obey the Koszul convention
//! `(f·ς₁)(g·ς₂) = (−1)^{|ς₁||g|} fg·(ς₁ς₂)`, and the form follows the same
//! sign rule.

use crate::check::CheckReport;
use crate::linalg::RatMat;
use crate::parity::{koszul_sign, Parity};
use crate::rat::{format_rat, rat, Rat};
use crate::superpoly::SuperPoly;
use num::Zero;
use std::collections::BTreeMap;
use thiserror::Error;

/// A sparse vector over the basis: pairs `(basis index, coefficient)`.
pub type SparseVec = Vec<(usize, Rat)>;

#[derive(Debug, Error)]
pub enum AlgebraError {
    #[error("inconsistent algebra data: {0}")]
    Shape(String),
    #[error("basis index {index} out of range (dimension {dim})")]
    BasisIndex { index: usize, dim: usize },
    #[error("multiplication table is not a group: {0}")]
    GroupTable(String),
    #[error("cocycle is invalid: {0}")]
    Cocycle(String),
    #[error("Hecke algebra size {k} exceeds the supported maximum {max}")]
    HeckeSize { k: usize, max: usize },
    #[error("operation requires an identity element, but none is declared")]
    MissingIdentity,
    #[error("form is degenerate on the {parity} block; no dual basis exists")]
    SingularGram { parity: Parity },
}

/// A finite-dimensional graded algebra with an invariant bilinear form,
/// presented by structure constants.
#[derive(Debug, Clone)]
pub struct GradedAlgebra {
    labels: Vec<String>,
    parities: Vec<Parity>,
    /// `product[a][b]` = coordinates of `e_a·e_b`.
    product: Vec<Vec<SparseVec>>,
    /// `gram[a][b]` = `⟨e_a, e_b⟩`.
    gram: Vec<Vec<Rat>>,
    identity: Option<SparseVec>,
}

impl GradedAlgebra {
    /// Builds an algebra from raw data, validating shapes (not the axioms —
    /// that is [`GradedAlgebra::verify`]'s job, so that deliberately broken
    /// data can still be constructed and reported on).
    pub fn new(
        labels: Vec<String>,
        parities: Vec<Parity>,
        product: Vec<Vec<SparseVec>>,
        gram: Vec<Vec<Rat>>,
        identity: Option<SparseVec>,
    ) -> Result<Self, AlgebraError> {
        let n = labels.len();
        if parities.len() != n {
            return Err(AlgebraError::Shape(format!(
                "{n} labels but {} parities",
                parities.len()
            )));
        }
        if product.len() != n || product.iter().any(|row| row.len() != n) {
            return Err(AlgebraError::Shape(format!(
                "product table is not {n}×{n}"
            )));
        }
        if gram.len() != n || gram.iter().any(|row| row.len() != n) {
            return Err(AlgebraError::Shape(format!("Gram matrix is not {n}×{n}")));
        }
        let check_idx = |v: &SparseVec| -> Result<(), AlgebraError> {
            for &(c, _) in v {
                if c >= n {
                    return Err(AlgebraError::BasisIndex { index: c, dim: n });
                }
            }
            Ok(())
        };
        for row in &product {
            for entry in row {
                check_idx(entry)?;
            }
        }
        if let Some(id) = &identity {
            check_idx(id)?;
        }
        Ok(GradedAlgebra {
            labels,
            parities,
            product,
            gram,
            identity,
        })
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn label(&self, b: usize) -> &str {
        &self.labels[b]
    }

    pub fn parity(&self, b: usize) -> Parity {
        self.parities[b]
    }

    /// Structure constants of `e_a·e_b`.
    pub fn basis_mul(&self, a: usize, b: usize) -> &SparseVec {
        &self.product[a][b]
    }

    pub fn gram_at(&self, a: usize, b: usize) -> &Rat {
        &self.gram[a][b]
    }

    pub fn identity(&self) -> Option<&SparseVec> {
        self.identity.as_ref()
    }

    /// The identity as an element.
    pub fn identity_element(&self) -> Result<AlgElement, AlgebraError> {
        let id = self.identity.as_ref().ok_or(AlgebraError::MissingIdentity)?;
        Ok(AlgElement::from_constant(id.clone()))
    }

    /// Product of elements with polynomial coefficients, with the Koszul rule
    /// `(f·ς_a)(g·ς_b) = (−1)^{|ς_a||g|} f·g·(ς_a ς_b)`.
    pub fn mul(&self, x: &AlgElement, y: &AlgElement) -> AlgElement {
        let mut out = AlgElement::zero();
        for (&a, f) in &x.coords {
            for (&b, g) in &y.coords {
                for g_parity in Parity::BOTH {
                    let g_part = g.parity_part(g_parity);
                    if g_part.is_zero() {
                        continue;
                    }
                    let mut fg = f * &g_part;
                    if koszul_sign(self.parity(a), g_parity) < 0 {
                        fg = -&fg;
                    }
                    for (c, k) in self.basis_mul(a, b) {
                        out.add(*c, &fg.scale(k));
                    }
                }
            }
        }
        out
    }

    /// Bilinear form on elements, with the same Koszul rule as [`Self::mul`]:
    /// `⟨f·ς_a, g·ς_b⟩ = (−1)^{|ς_a||g|} f·g·⟨ς_a, ς_b⟩`.
    pub fn form(&self, x: &AlgElement, y: &AlgElement) -> SuperPoly {
        let mut out = SuperPoly::zero();
        for (&a, f) in &x.coords {
            for (&b, g) in &y.coords {
                let gram = self.gram_at(a, b);
                if gram.is_zero() {
                    continue;
                }
                for g_parity in Parity::BOTH {
                    let g_part = g.parity_part(g_parity);
                    if g_part.is_zero() {
                        continue;
                    }
                    let mut fg = (f * &g_part).scale(gram);
                    if koszul_sign(self.parity(a), g_parity) < 0 {
                        fg = -&fg;
                    }
                    out = &out + &fg;
                }
            }
        }
        out
    }

    /// The supersymmetric trace `Tr(x) = ⟨1, x⟩`.
    pub fn supertrace(&self, x: &AlgElement) -> Result<SuperPoly, AlgebraError> {
        let one = self.identity_element()?;
        Ok(self.form(&one, x))
    }

    /// Graded commutator `[x, y] = xy − (−1)^{|x||y|}yx`, computed bilinearly
    /// over the parity components so mixed-parity inputs are fine.
    pub fn commutator(&self, x: &AlgElement, y: &AlgElement) -> AlgElement {
        let mut out = AlgElement::zero();
        for px in Parity::BOTH {
            let xp = x.parity_part(self, px);
            if xp.is_zero() {
                continue;
            }
            for py in Parity::BOTH {
                let yp = y.parity_part(self, py);
                if yp.is_zero() {
                    continue;
                }
                let xy = self.mul(&xp, &yp);
                let yx = self.mul(&yp, &xp);
                out = out.add_elem(&xy);
                if koszul_sign(px, py) < 0 {
                    out = out.add_elem(&yx);
                } else {
                    out = out.sub_elem(&yx);
                }
            }
        }
        out
    }

    /// If `x` fails to commute with some basis element, returns a witness.
    pub fn centrality_witness(&self, x: &AlgElement) -> Option<String> {
        for b in 0..self.dim() {
            let e = AlgElement::from_basis(b);
            let left = self.mul(x, &e);
            let right = self.mul(&e, x);
            if left.sub_elem(&right) != AlgElement::zero() {
                return Some(format!(
                    "element does not commute with {}: x·{} = {}, {}·x = {}",
                    self.labels[b],
                    self.labels[b],
                    left.display(self),
                    self.labels[b],
                    right.display(self),
                ));
            }
        }
        None
    }

    /// For every basis symbol, the element dual to it under the form within
    /// its parity block: `⟨e_b, dual(c)⟩ = δ_{b,c}`.
    ///
    /// # Errors
    /// [`AlgebraError::SingularGram`] when the form is degenerate on a block.
    pub fn dual_basis(&self) -> Result<Vec<AlgElement>, AlgebraError> {
        let mut duals: Vec<AlgElement> = vec![AlgElement::zero(); self.dim()];
        for parity in Parity::BOTH {
            let block: Vec<usize> = (0..self.dim())
                .filter(|&b| self.parity(b) == parity)
                .collect();
            if block.is_empty() {
                continue;
            }
            let g = RatMat::from_rows(
                block
                    .iter()
                    .map(|&r| block.iter().map(|&c| self.gram[r][c].clone()).collect())
                    .collect(),
            );
            let inv = g
                .inverse()
                .ok_or(AlgebraError::SingularGram { parity })?;
            for (cj, &c) in block.iter().enumerate() {
                let mut coords = SparseVec::new();
                for (sj, &s) in block.iter().enumerate() {
                    let v = inv.at(sj, cj);
                    if !v.is_zero() {
                        coords.push((s, v.clone()));
                    }
                }
                duals[c] = AlgElement::from_constant(coords);
            }
        }
        Ok(duals)
    }

    /// Exact verification of all the axioms the data is supposed to satisfy.
    ///
    /// Families checked: product grading, identity laws (skipped when no
    /// identity is declared), associativity over all basis triples, form
    /// grading, supersymmetry, invariance over all basis triples, and
    /// nondegeneracy of the Gram matrix.  Failures carry concrete witnesses.
    pub fn verify(&self) -> CheckReport {
        let mut report = CheckReport::new();
        let n = self.dim();

        let mut witnesses = Vec::new();
        for a in 0..n {
            for b in 0..n {
                let want = self.parity(a) + self.parity(b);
                for &(c, _) in self.basis_mul(a, b) {
                    if self.parity(c) != want && witnesses.len() < 3 {
                        witnesses.push(format!(
                            "{}·{} contains {} of parity {}",
                            self.labels[a], self.labels[b], self.labels[c], self.parity(c)
                        ));
                    }
                }
            }
        }
        report.require("product-grading", witnesses.is_empty(), || {
            witnesses.join("; ")
        });

        match &self.identity {
            None => report.skip("identity-laws", "no identity declared"),
            Some(_) => {
                let one = self.identity_element().expect("declared above");
                let mut witnesses = Vec::new();
                for b in 0..n {
                    let e = AlgElement::from_basis(b);
                    if self.mul(&one, &e) != e && witnesses.len() < 3 {
                        witnesses.push(format!("1·{} ≠ {}", self.labels[b], self.labels[b]));
                    }
                    if self.mul(&e, &one) != e && witnesses.len() < 3 {
                        witnesses.push(format!("{}·1 ≠ {}", self.labels[b], self.labels[b]));
                    }
                }
                report.require("identity-laws", witnesses.is_empty(), || {
                    witnesses.join("; ")
                });
            }
        }

        let mut witnesses = Vec::new();
        'assoc: for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let ea = AlgElement::from_basis(a);
                    let eb = AlgElement::from_basis(b);
                    let ec = AlgElement::from_basis(c);
                    let lhs = self.mul(&self.mul(&ea, &eb), &ec);
                    let rhs = self.mul(&ea, &self.mul(&eb, &ec));
                    if lhs.sub_elem(&rhs) != AlgElement::zero() {
                        witnesses.push(format!(
                            "({}·{})·{} = {} but {}·({}·{}) = {}",
                            self.labels[a],
                            self.labels[b],
                            self.labels[c],
                            lhs.display(self),
                            self.labels[a],
                            self.labels[b],
                            self.labels[c],
                            rhs.display(self),
                        ));
                        if witnesses.len() >= 3 {
                            break 'assoc;
                        }
                    }
                }
            }
        }
        report.require("associativity", witnesses.is_empty(), || {
            witnesses.join("; ")
        });

        let mut witnesses = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if self.parity(a) != self.parity(b)
                    && !self.gram[a][b].is_zero()
                    && witnesses.len() < 3
                {
                    witnesses.push(format!(
                        "⟨{},{}⟩ = {} pairs different parities",
                        self.labels[a],
                        self.labels[b],
                        format_rat(&self.gram[a][b])
                    ));
                }
            }
        }
        report.require("form-grading", witnesses.is_empty(), || {
            witnesses.join("; ")
        });

        let mut witnesses = Vec::new();
        for a in 0..n {
            for b in 0..n {
                let sign = rat(koszul_sign(self.parity(a), self.parity(b)) as i64);
                if self.gram[a][b] != &sign * &self.gram[b][a] && witnesses.len() < 3 {
                    witnesses.push(format!(
                        "⟨{0},{1}⟩ = {2} but (−1)^{{|{0}||{1}|}}⟨{1},{0}⟩ = {3}",
                        self.labels[a],
                        self.labels[b],
                        format_rat(&self.gram[a][b]),
                        format_rat(&(&sign * &self.gram[b][a])),
                    ));
                }
            }
        }
        report.require("form-supersymmetry", witnesses.is_empty(), || {
            witnesses.join("; ")
        });

        let mut witnesses = Vec::new();
        'invar: for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    // ⟨ab, c⟩ vs ⟨a, bc⟩, both plain rationals here.
                    let lhs: Rat = self
                        .basis_mul(a, b)
                        .iter()
                        .map(|(d, k)| k * &self.gram[*d][c])
                        .sum();
                    let rhs: Rat = self
                        .basis_mul(b, c)
                        .iter()
                        .map(|(d, k)| {
                            // Constant coefficients: the Koszul sign in the
                            // form is trivial, so this is plain bilinearity.
                            k * &self.gram[a][*d]
                        })
                        .sum();
                    if lhs != rhs {
                        witnesses.push(format!(
                            "⟨{}·{},{}⟩ = {} ≠ {} = ⟨{},{}·{}⟩",
                            self.labels[a],
                            self.labels[b],
                            self.labels[c],
                            format_rat(&lhs),
                            format_rat(&rhs),
                            self.labels[a],
                            self.labels[b],
                            self.labels[c],
                        ));
                        if witnesses.len() >= 3 {
                            break 'invar;
                        }
                    }
                }
            }
        }
        report.require("form-invariance", witnesses.is_empty(), || {
            witnesses.join("; ")
        });

        let gram = RatMat::from_rows(self.gram.clone());
        let rank = gram.rank();
        report.require("form-nondegeneracy", rank == n, || {
            format!("Gram matrix has rank {rank} < dimension {n}")
        });

        report
    }
}

/// An element of (a free module over) a graded algebra: a sparse vector of
/// [`SuperPoly`] coefficients indexed by basis symbols.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AlgElement {
    coords: BTreeMap<usize, SuperPoly>,
}

impl AlgElement {
    pub fn zero() -> Self {
        AlgElement::default()
    }

    pub fn from_basis(b: usize) -> Self {
        let mut e = AlgElement::zero();
        e.add(b, &SuperPoly::one());
        e
    }

    /// An element with constant (rational) coordinates.
    pub fn from_constant(coords: SparseVec) -> Self {
        let mut e = AlgElement::zero();
        for (b, c) in coords {
            e.add(b, &SuperPoly::constant(c));
        }
        e
    }

    pub fn from_coords(coords: impl IntoIterator<Item = (usize, SuperPoly)>) -> Self {
        let mut e = AlgElement::zero();
        for (b, p) in coords {
            e.add(b, &p);
        }
        e
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn coords(&self) -> impl Iterator<Item = (usize, &SuperPoly)> {
        self.coords.iter().map(|(&b, p)| (b, p))
    }

    pub fn coord(&self, b: usize) -> SuperPoly {
        self.coords.get(&b).cloned().unwrap_or_else(SuperPoly::zero)
    }

    /// Adds `p·ς_b`, dropping the coordinate if it cancels.
    pub fn add(&mut self, b: usize, p: &SuperPoly) {
        if p.is_zero() {
            return;
        }
        let entry = self.coords.entry(b).or_insert_with(SuperPoly::zero);
        *entry = &*entry + p;
        if entry.is_zero() {
            self.coords.remove(&b);
        }
    }

    pub fn add_elem(&self, other: &AlgElement) -> AlgElement {
        let mut out = self.clone();
        for (&b, p) in &other.coords {
            out.add(b, p);
        }
        out
    }

    pub fn sub_elem(&self, other: &AlgElement) -> AlgElement {
        let mut out = self.clone();
        for (&b, p) in &other.coords {
            out.add(b, &-p);
        }
        out
    }

    pub fn neg_elem(&self) -> AlgElement {
        AlgElement::zero().sub_elem(self)
    }

    pub fn scale(&self, c: &Rat) -> AlgElement {
        if c.is_zero() {
            return AlgElement::zero();
        }
        AlgElement {
            coords: self
                .coords
                .iter()
                .map(|(&b, p)| (b, p.scale(c)))
                .collect(),
        }
    }

    /// Left multiplication of every coordinate by a polynomial: `f·(Σ gᵦςᵦ) =
    /// Σ (f·gᵦ)ςᵦ` — no Koszul sign, since `f` never moves past a symbol.
    pub fn mul_poly_left(&self, f: &SuperPoly) -> AlgElement {
        let mut out = AlgElement::zero();
        for (&b, p) in &self.coords {
            out.add(b, &(f * p));
        }
        out
    }

    /// Applies a map to every coordinate (used for coefficient-wise
    /// derivations).
    pub fn map_coords(&self, mut f: impl FnMut(&SuperPoly) -> SuperPoly) -> AlgElement {
        let mut out = AlgElement::zero();
        for (&b, p) in &self.coords {
            out.add(b, &f(p));
        }
        out
    }

    /// Total parity of `p·ς_b` terms is `|p| + |ς_b|`; returns `Some` iff all
    /// terms agree (zero counts as even).
    pub fn parity(&self, alg: &GradedAlgebra) -> Option<Parity> {
        let mut seen: Option<Parity> = None;
        for (&b, p) in &self.coords {
            for part in Parity::BOTH {
                if !p.parity_part(part).is_zero() {
                    let total = alg.parity(b) + part;
                    match seen {
                        None => seen = Some(total),
                        Some(q) if q != total => return None,
                        _ => {}
                    }
                }
            }
        }
        Some(seen.unwrap_or(Parity::Even))
    }

    /// The component of total parity `p`.
    pub fn parity_part(&self, alg: &GradedAlgebra, p: Parity) -> AlgElement {
        let mut out = AlgElement::zero();
        for (&b, poly) in &self.coords {
            let coeff_parity = p + alg.parity(b);
            out.add(b, &poly.parity_part(coeff_parity));
        }
        out
    }

    /// Human-readable rendering with basis labels, for witnesses.
    pub fn display(&self, alg: &GradedAlgebra) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        self.coords
            .iter()
            .map(|(&b, p)| format!("({p})·{}", alg.label(b)))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// The one-dimensional even algebra 𝔽 (basis `1`, `⟨1,1⟩ = 1`).
pub fn scalar_algebra() -> GradedAlgebra {
    GradedAlgebra::new(
        vec!["1".into()],
        vec![Parity::Even],
        vec![vec![vec![(0, rat(1))]]],
        vec![vec![rat(1)]],
        Some(vec![(0, rat(1))]),
    )
    .expect("static data")
}

/// The matrix superalgebra M_{k×k} with block sizes `(k1, k−k1)`.
///
/// Basis `E_ab` (1-based in labels), parity odd iff exactly one of `a`, `b`
/// lies in the first block; product `E_ab·E_cd = δ_bc E_ad`; form
/// `⟨A,B⟩ = Str(AB)` where `Str` is the supertrace (first block plus, second
/// block minus), giving `⟨E_ab,E_cd⟩ = δ_bc δ_ad ε_a` with `ε_a = ±1`.
///
/// # Example
/// ```
/// use superpair_core::graded::matrix_superalgebra;
/// let alg = matrix_superalgebra(2, 1);
/// assert!(alg.verify().passed());
/// ```
pub fn matrix_superalgebra(k: usize, k1: usize) -> GradedAlgebra {
    assert!(k >= 1 && k1 <= k, "block size must satisfy k1 ≤ k");
    let n = k * k;
    let idx = |a: usize, b: usize| a * k + b; // 0-based
    let eps = |a: usize| if a < k1 { rat(1) } else { rat(-1) };
    let mut labels = Vec::with_capacity(n);
    let mut parities = Vec::with_capacity(n);
    for a in 0..k {
        for b in 0..k {
            labels.push(format!("E{}{}", a + 1, b + 1));
            parities.push(Parity::from_odd((a < k1) != (b < k1)));
        }
    }
    let mut product = vec![vec![SparseVec::new(); n]; n];
    for a in 0..k {
        for b in 0..k {
            for c in 0..k {
                for d in 0..k {
                    if b == c {
                        product[idx(a, b)][idx(c, d)] = vec![(idx(a, d), rat(1))];
                    }
                }
            }
        }
    }
    let mut gram = vec![vec![Rat::zero(); n]; n];
    for a in 0..k {
        for b in 0..k {
            // ⟨E_ab, E_ba⟩ = Str(E_aa) = ε_a.
            gram[idx(a, b)][idx(b, a)] = eps(a);
        }
    }
    let identity = (0..k).map(|a| (idx(a, a), rat(1))).collect();
    GradedAlgebra::new(labels, parities, product, gram, Some(identity))
        .expect("constructed data is well-shaped")
}

/// A twisted group algebra 𝔽[G]_ε: basis `u_g` for `g` in a finite group
/// given by its multiplication table, product `u_g·u_h = ε(g,h)·u_{gh}`,
/// trace `Tr(u_g) = δ_{g,e}` and form `⟨u,v⟩ = Tr(uv)`.
///
/// `table[g][h]` is the index of `gh`; `cocycle[g][h]` is `ε(g,h)`, which
/// must be nonzero and satisfy the cocycle identity
/// `ε(g₁,g₂)ε(g₁g₂,g₃) = ε(g₁,g₂g₃)ε(g₂,g₃)`.  `parities` grades the basis
/// (pass all-even for the ungraded case); the grading must be a homomorphism.
pub fn twisted_group_algebra(
    table: &[Vec<usize>],
    cocycle: &[Vec<Rat>],
    parities: &[Parity],
) -> Result<GradedAlgebra, AlgebraError> {
    let n = table.len();
    if n == 0 {
        return Err(AlgebraError::GroupTable("empty table".into()));
    }
    if table.iter().any(|row| row.len() != n)
        || cocycle.len() != n
        || cocycle.iter().any(|row| row.len() != n)
        || parities.len() != n
    {
        return Err(AlgebraError::Shape(format!(
            "group data is not consistently {n}×{n}"
        )));
    }
    for row in table {
        for &v in row {
            if v >= n {
                return Err(AlgebraError::GroupTable(format!(
                    "product index {v} out of range"
                )));
            }
        }
    }
    // Find the two-sided identity.
    let e = (0..n)
        .find(|&e| (0..n).all(|g| table[e][g] == g && table[g][e] == g))
        .ok_or_else(|| AlgebraError::GroupTable("no identity element".into()))?;
    for g1 in 0..n {
        for g2 in 0..n {
            for g3 in 0..n {
                if table[table[g1][g2]][g3] != table[g1][table[g2][g3]] {
                    return Err(AlgebraError::GroupTable(format!(
                        "associativity fails at ({g1},{g2},{g3})"
                    )));
                }
            }
        }
    }
    // Inverses: each row must be a permutation hitting the identity.
    for g in 0..n {
        if !(0..n).any(|h| table[g][h] == e) {
            return Err(AlgebraError::GroupTable(format!("{g} has no inverse")));
        }
    }
    for g in 0..n {
        for h in 0..n {
            if cocycle[g][h].is_zero() {
                return Err(AlgebraError::Cocycle(format!("ε({g},{h}) = 0")));
            }
        }
    }
    for g1 in 0..n {
        for g2 in 0..n {
            for g3 in 0..n {
                let lhs = &cocycle[g1][g2] * &cocycle[table[g1][g2]][g3];
                let rhs = &cocycle[g1][table[g2][g3]] * &cocycle[g2][g3];
                if lhs != rhs {
                    return Err(AlgebraError::Cocycle(format!(
                        "cocycle identity fails at ({g1},{g2},{g3}): {} ≠ {}",
                        format_rat(&lhs),
                        format_rat(&rhs)
                    )));
                }
            }
        }
    }
    for g in 0..n {
        for h in 0..n {
            if parities[table[g][h]] != parities[g] + parities[h] {
                return Err(AlgebraError::GroupTable(format!(
                    "grading is not a homomorphism at ({g},{h})"
                )));
            }
        }
    }

    let labels: Vec<String> = (0..n).map(|g| format!("u{g}")).collect();
    let mut product = vec![vec![SparseVec::new(); n]; n];
    let mut gram = vec![vec![Rat::zero(); n]; n];
    for g in 0..n {
        for h in 0..n {
            product[g][h] = vec![(table[g][h], cocycle[g][h].clone())];
            // ⟨u_g, u_h⟩ = Tr(u_g u_h) = ε(g,h)·δ_{gh,e}.
            if table[g][h] == e {
                gram[g][h] = cocycle[g][h].clone();
            }
        }
    }
    // u_e is the identity element iff ε(e,·) and ε(·,e) are 1; otherwise
    // u_e/ε(e,e) is, but only when ε is that degenerate — declare the scaled
    // identity in the normalized case and none otherwise.
    let one = rat(1);
    let identity = if (0..n).all(|g| cocycle[e][g] == one && cocycle[g][e] == one) {
        Some(vec![(e, rat(1))])
    } else {
        None
    };
    GradedAlgebra::new(labels, parities.to_vec(), product, gram, identity)
}

/// Maximum supported Hecke-algebra rank (basis size is `k!`).
pub const HECKE_MAX_K: usize = 5;

/// The Iwahori–Hecke algebra ℋ_k over ℚ at parameter `q`, with the Markov
/// trace at parameter `ζ`, all in even degree.
///
/// Generators `T_1..T_{k−1}` satisfy the braid relations and
/// `T_i² = (q−1)T_i + q`; the basis is `{T_w}` over permutations `w` with
/// `T_w = T_{i_1}···T_{i_l}` along any reduced word.  The Markov trace is the
/// unique linear map with `Tr(1) = 1` and `Tr(a·T_n·b) = ζ·Tr(ab)` whenever
/// `a, b` involve only generators below `n`; the form is `⟨u,v⟩ = Tr(uv)`.
/// Nondegeneracy depends on `(q, ζ)` and is reported by
/// [`GradedAlgebra::verify`] on the concrete instance rather than decided in
/// closed form.
///
/// # Example
/// ```
/// use superpair_core::graded::hecke_algebra;
/// use superpair_core::rat::{rat, ratio};
/// // k = 2, q = 1, ζ = 1/2: Gram [[1, 1/2], [1/2, 1]].
/// let alg = hecke_algebra(2, rat(1), ratio(1, 2)).unwrap();
/// assert_eq!(*alg.gram_at(0, 1), ratio(1, 2));
/// assert!(alg.verify().passed());
/// ```
pub fn hecke_algebra(k: usize, q: Rat, zeta: Rat) -> Result<GradedAlgebra, AlgebraError> {
    if k == 0 || k > HECKE_MAX_K {
        return Err(AlgebraError::HeckeSize {
            k,
            max: HECKE_MAX_K,
        });
    }
    let perms = all_permutations(k);
    let index: BTreeMap<Vec<u8>, usize> = perms
        .iter()
        .enumerate()
        .map(|(i, p)| (p.clone(), i))
        .collect();
    let n = perms.len();

    // Right multiplication by one generator: T_w·T_i.
    let mul_gen = |acc: &BTreeMap<usize, Rat>, i: usize| -> BTreeMap<usize, Rat> {
        let mut out: BTreeMap<usize, Rat> = BTreeMap::new();
        let mut push = |w: usize, c: Rat| {
            let e = out.entry(w).or_insert_with(Rat::zero);
            *e += c;
            if e.is_zero() {
                out.remove(&w);
            }
        };
        for (&w, c) in acc {
            let perm = &perms[w];
            let mut swapped = perm.clone();
            swapped.swap(i, i + 1);
            let ws = index[&swapped];
            if perm[i] < perm[i + 1] {
                // Length goes up: T_w·T_i = T_{w·s_i}.
                push(ws, c.clone());
            } else {
                // Length goes down: T_w·T_i = (q−1)T_w + q·T_{w·s_i}.
                push(w, c * &(&q - &rat(1)));
                push(ws, c * &q);
            }
        }
        out
    };
    let mul_basis = |u: usize, v: usize| -> BTreeMap<usize, Rat> {
        let mut acc = BTreeMap::from([(u, rat(1))]);
        for i in reduced_word(&perms[v]) {
            acc = mul_gen(&acc, i);
        }
        acc
    };

    // Markov trace, by peeling the top generator: if w moves its largest
    // non-fixed point t, then T_w = T_a·T_{s_{t−1}}·T_b with a, b fixing
    // everything ≥ t, and Tr(T_w) = ζ·Tr(T_a·T_b).
    let mut trace: Vec<Option<Rat>> = vec![None; n];
    trace[index[&identity_perm(k)]] = Some(rat(1));
    // Process by increasing length so recursion targets are already done.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| inversions(&perms[i]));
    for &w in &order {
        if trace[w].is_some() {
            continue;
        }
        let perm = &perms[w];
        let t = (0..k).rev().find(|&j| perm[j] != j as u8).expect("not id");
        let p = perm.iter().position(|&x| x == t as u8).expect("t occurs");
        // a = w with entry t removed from position p and everything shifted:
        // a(j) = w(j) for j < p, a(j) = w(j+1) for p ≤ j < t, a(t) = t.
        let mut a = Vec::with_capacity(k);
        a.extend_from_slice(&perm[..p]);
        a.extend_from_slice(&perm[p + 1..=t]);
        a.push(t as u8);
        a.extend_from_slice(&perm[t + 1..]);
        let a_idx = index[&a];
        // b-word: generators t−2, t−3, …, p (may be empty).
        let mut combo = BTreeMap::from([(a_idx, rat(1))]);
        let mut i = t.saturating_sub(2);
        loop {
            if t < 2 || i < p {
                break;
            }
            combo = mul_gen(&combo, i);
            if i == p {
                break;
            }
            i -= 1;
        }
        let mut tr = Rat::zero();
        for (x, c) in combo {
            let tx = trace[x]
                .as_ref()
                .expect("product of shorter elements stays shorter")
                .clone();
            tr += c * tx;
        }
        trace[w] = Some(&zeta * &tr);
    }
    let trace: Vec<Rat> = trace.into_iter().map(Option::unwrap).collect();

    let labels: Vec<String> = perms
        .iter()
        .map(|p| {
            let digits: String = p.iter().map(|&x| (b'1' + x) as char).collect();
            format!("T[{digits}]")
        })
        .collect();
    let mut product = vec![vec![SparseVec::new(); n]; n];
    let mut gram = vec![vec![Rat::zero(); n]; n];
    for u in 0..n {
        for v in 0..n {
            let combo = mul_basis(u, v);
            gram[u][v] = combo.iter().map(|(&w, c)| c * &trace[w]).sum();
            product[u][v] = combo.into_iter().collect();
        }
    }
    let identity = vec![(index[&identity_perm(k)], rat(1))];
    GradedAlgebra::new(labels, vec![Parity::Even; n], product, gram, Some(identity))
}

fn identity_perm(k: usize) -> Vec<u8> {
    (0..k as u8).collect()
}

fn inversions(p: &[u8]) -> usize {
    let mut count = 0;
    for i in 0..p.len() {
        for j in (i + 1)..p.len() {
            if p[i] > p[j] {
                count += 1;
            }
        }
    }
    count
}

/// All permutations of `0..k`, ordered by (length, one-line lex) so the
/// identity comes first and the basis order is deterministic.
fn all_permutations(k: usize) -> Vec<Vec<u8>> {
    let mut all = Vec::new();
    let mut current: Vec<u8> = Vec::new();
    let mut used = vec![false; k];
    fn rec(k: usize, current: &mut Vec<u8>, used: &mut Vec<bool>, all: &mut Vec<Vec<u8>>) {
        if current.len() == k {
            all.push(current.clone());
            return;
        }
        for v in 0..k {
            if !used[v] {
                used[v] = true;
                current.push(v as u8);
                rec(k, current, used, all);
                current.pop();
                used[v] = false;
            }
        }
    }
    rec(k, &mut current, &mut used, &mut all);
    all.sort_by_key(|p| (inversions(p), p.clone()));
    all
}

/// A reduced word for `w` as generator indices (`i` swaps `i, i+1`),
/// peeling the first descent repeatedly.
fn reduced_word(w: &[u8]) -> Vec<usize> {
    let mut w = w.to_vec();
    let mut word = Vec::new();
    loop {
        let Some(i) = (0..w.len() - 1).find(|&i| w[i] > w[i + 1]) else {
            break;
        };
        w.swap(i, i + 1);
        word.push(i);
    }
    // We peeled from the left of the one-line notation, producing a word for
    // w⁻¹ read forwards — equivalently a word for w read backwards.
    word.reverse();
    word
}

/// Graded tensor product `A ⊗ B` with the Koszul sign:
/// `(x⊗y)(z⊗w) = (−1)^{|y||z|} xz ⊗ yw`, parity `|x⊗y| = |x|+|y|`, form
/// `⟨x⊗y, z⊗w⟩ = (−1)^{|y||z|} ⟨x,z⟩⟨y,w⟩`.
pub fn tensor_product(a: &GradedAlgebra, b: &GradedAlgebra) -> GradedAlgebra {
    let na = a.dim();
    let nb = b.dim();
    let n = na * nb;
    let idx = |i: usize, j: usize| i * nb + j;
    let mut labels = Vec::with_capacity(n);
    let mut parities = Vec::with_capacity(n);
    for i in 0..na {
        for j in 0..nb {
            labels.push(format!("{}⊗{}", a.label(i), b.label(j)));
            parities.push(a.parity(i) + b.parity(j));
        }
    }
    let mut product = vec![vec![SparseVec::new(); n]; n];
    let mut gram = vec![vec![Rat::zero(); n]; n];
    for i1 in 0..na {
        for j1 in 0..nb {
            for i2 in 0..na {
                for j2 in 0..nb {
                    let sign = rat(koszul_sign(b.parity(j1), a.parity(i2)) as i64);
                    let mut entry = SparseVec::new();
                    for (ci, ka) in a.basis_mul(i1, i2) {
                        for (cj, kb) in b.basis_mul(j1, j2) {
                            entry.push((idx(*ci, *cj), &sign * &(ka * kb)));
                        }
                    }
                    product[idx(i1, j1)][idx(i2, j2)] = entry;
                    gram[idx(i1, j1)][idx(i2, j2)] =
                        &sign * &(a.gram_at(i1, i2) * b.gram_at(j1, j2));
                }
            }
        }
    }
    let identity = match (a.identity(), b.identity()) {
        (Some(ia), Some(ib)) => {
            let mut id = SparseVec::new();
            for (i, ka) in ia {
                for (j, kb) in ib {
                    id.push((idx(*i, *j), ka * kb));
                }
            }
            Some(id)
        }
        _ => None,
    };
    GradedAlgebra::new(labels, parities, product, gram, identity)
        .expect("tensor data is well-shaped")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::ratio;

    #[test]
    fn scalar_algebra_verifies() {
        assert!(scalar_algebra().verify().passed());
    }

    #[test]
    fn matrix_superalgebra_21_structure() {
        let alg = matrix_superalgebra(2, 1);
        assert_eq!(alg.dim(), 4);
        // E12 and E21 are odd, E11 and E22 even.
        assert_eq!(alg.parity(0), Parity::Even); // E11
        assert_eq!(alg.parity(1), Parity::Odd); // E12
        assert_eq!(alg.parity(2), Parity::Odd); // E21
        assert_eq!(alg.parity(3), Parity::Even); // E22
        // E12·E21 = E11, E21·E12 = E22, E12·E12 = 0.
        assert_eq!(*alg.basis_mul(1, 2), vec![(0, rat(1))]);
        assert_eq!(*alg.basis_mul(2, 1), vec![(3, rat(1))]);
        assert!(alg.basis_mul(1, 1).is_empty());
        // Supertrace form: ⟨E12,E21⟩ = ε_1 = 1, ⟨E21,E12⟩ = ε_2 = −1.
        assert_eq!(*alg.gram_at(1, 2), rat(1));
        assert_eq!(*alg.gram_at(2, 1), rat(-1));
        assert!(alg.verify().passed());
    }

    #[test]
    fn matrix_superalgebra_32_verifies() {
        let alg = matrix_superalgebra(3, 2);
        assert_eq!(alg.dim(), 9);
        assert!(alg.verify().passed());
    }

    #[test]
    fn supertrace_of_matrix_elements() {
        let alg = matrix_superalgebra(2, 1);
        // Str(E11) = 1, Str(E22) = −1, Str(E12) = 0.
        let tr = |b: usize| alg.supertrace(&AlgElement::from_basis(b)).unwrap();
        assert_eq!(tr(0), SuperPoly::one());
        assert_eq!(tr(3), SuperPoly::constant(rat(-1)));
        assert!(tr(1).is_zero());
        // Str(AB) = (−1)^{|A||B|} Str(BA) on the odd pair E12, E21.
        let e12 = AlgElement::from_basis(1);
        let e21 = AlgElement::from_basis(2);
        let ab = alg.supertrace(&alg.mul(&e12, &e21)).unwrap();
        let ba = alg.supertrace(&alg.mul(&e21, &e12)).unwrap();
        assert_eq!(ab, -&ba);
    }

    #[test]
    fn twisted_z2_with_minus_one_square() {
        // ℤ/2 = {e, a}, ε(a,a) = −1: u_a² = −u_e, Gram diag(1, −1).
        let table = vec![vec![0, 1], vec![1, 0]];
        let eps = vec![vec![rat(1), rat(1)], vec![rat(1), rat(-1)]];
        let alg =
            twisted_group_algebra(&table, &eps, &[Parity::Even, Parity::Even]).unwrap();
        assert_eq!(*alg.basis_mul(1, 1), vec![(0, rat(-1))]);
        assert_eq!(*alg.gram_at(1, 1), rat(-1));
        assert_eq!(*alg.gram_at(0, 1), rat(0));
        assert!(alg.verify().passed());
    }

    #[test]
    fn twisted_group_algebra_rejects_bad_cocycle() {
        let table = vec![vec![0, 1], vec![1, 0]];
        // ε(e,a) = 2 but ε(a,e) = 1 breaks the cocycle identity at (a,e,a):
        // ε(a,e)ε(a,a) = ε(a,a)ε(e,a) forces ε(a,e) = ε(e,a).
        let eps = vec![vec![rat(1), rat(2)], vec![rat(1), rat(-1)]];
        let err =
            twisted_group_algebra(&table, &eps, &[Parity::Even, Parity::Even]).unwrap_err();
        assert!(matches!(err, AlgebraError::Cocycle(_)), "got {err}");
    }

    #[test]
    fn hecke_k2_frozen_gram() {
        // Basis {1, T1}: Tr(1) = 1, Tr(T1) = ζ, T1² = (q−1)T1 + q.
        let alg = hecke_algebra(2, rat(1), ratio(1, 2)).unwrap();
        assert_eq!(alg.dim(), 2);
        // Gram [[1, 1/2], [1/2, 1]], det 3/4.
        assert_eq!(*alg.gram_at(0, 0), rat(1));
        assert_eq!(*alg.gram_at(0, 1), ratio(1, 2));
        assert_eq!(*alg.gram_at(1, 0), ratio(1, 2));
        assert_eq!(*alg.gram_at(1, 1), rat(1));
        let gram = RatMat::from_rows(vec![
            vec![alg.gram_at(0, 0).clone(), alg.gram_at(0, 1).clone()],
            vec![alg.gram_at(1, 0).clone(), alg.gram_at(1, 1).clone()],
        ]);
        assert_eq!(gram.det(), ratio(3, 4));
        assert!(alg.verify().passed());
    }

    #[test]
    fn hecke_k3_trace_values() {
        // Generic-ish parameters; frozen values from the Markov recursion:
        // Tr(T_{s1}) = Tr(T_{s2}) = ζ, Tr(T_{s1}T_{s2}) = ζ², and
        // Tr(T_{s1}T_{s2}T_{s1}) = ζ((q−1)ζ + q).
        let q = rat(2);
        let zeta = ratio(1, 3);
        let alg = hecke_algebra(3, q.clone(), zeta.clone()).unwrap();
        assert_eq!(alg.dim(), 6);
        assert!(alg.verify().passed());
        let tr = |w: usize| {
            alg.supertrace(&AlgElement::from_basis(w))
                .unwrap()
                .constant_term()
        };
        // Basis order is (length, lex): 0 = id, then the two generators.
        assert_eq!(alg.label(0), "T[123]");
        assert_eq!(tr(0), rat(1));
        assert_eq!(tr(1), zeta);
        assert_eq!(tr(2), zeta);
        // T[321] is the longest element s1·s2·s1.
        let w0 = (0..6).find(|&w| alg.label(w) == "T[321]").unwrap();
        assert_eq!(tr(w0), &zeta * &(&(&(&q - &rat(1)) * &zeta) + &q));
    }

    #[test]
    fn hecke_rejects_oversized_k() {
        assert!(matches!(
            hecke_algebra(6, rat(1), rat(1)),
            Err(AlgebraError::HeckeSize { .. })
        ));
    }

    #[test]
    fn tensor_product_of_matrix_algebras_verifies() {
        let a = matrix_superalgebra(2, 1);
        let b = matrix_superalgebra(2, 1);
        let t = tensor_product(&a, &b);
        assert_eq!(t.dim(), 16);
        assert!(t.verify().passed(), "{}", t.verify());
    }

    #[test]
    fn tensor_sign_anticommutes_the_factors() {
        // The Koszul sign makes odd elements of the two slots anticommute:
        // (E12⊗1)(1⊗E12) = −(1⊗E12)(E12⊗1).
        let a = matrix_superalgebra(2, 1);
        let t = tensor_product(&a, &a);
        let idx = |i: usize, j: usize| i * a.dim() + j;
        // E12⊗1 and 1⊗E12, with 1 = E11 + E22.
        let oa = AlgElement::from_constant(vec![(idx(1, 0), rat(1)), (idx(1, 3), rat(1))]);
        let ob = AlgElement::from_constant(vec![(idx(0, 1), rat(1)), (idx(3, 1), rat(1))]);
        let ab = t.mul(&oa, &ob);
        let ba = t.mul(&ob, &oa);
        assert_eq!(ab, ba.neg_elem());
        // Both equal ±E12⊗E12.
        assert_eq!(ab, AlgElement::from_basis(idx(1, 1)));
    }

    #[test]
    fn commutator_and_centrality() {
        let alg = matrix_superalgebra(2, 1);
        let id = alg.identity_element().unwrap();
        assert!(alg.centrality_witness(&id).is_none());
        let e11 = AlgElement::from_basis(0);
        assert!(alg.centrality_witness(&e11).is_some());
        // [E12, E21] = E12·E21 + E21·E12 = E11 + E22 (both odd).
        let c = alg.commutator(&AlgElement::from_basis(1), &AlgElement::from_basis(2));
        assert_eq!(c, id);
    }

    #[test]
    fn dual_basis_pairs_to_delta() {
        for alg in [
            matrix_superalgebra(2, 1),
            hecke_algebra(2, rat(1), ratio(1, 2)).unwrap(),
        ] {
            let duals = alg.dual_basis().unwrap();
            for b in 0..alg.dim() {
                for c in 0..alg.dim() {
                    let v = alg.form(&AlgElement::from_basis(b), &duals[c]);
                    let want = if b == c {
                        SuperPoly::one()
                    } else {
                        SuperPoly::zero()
                    };
                    assert_eq!(v, want, "⟨e_{b}, dual_{c}⟩");
                }
            }
        }
    }

    #[test]
    fn verify_flags_a_perturbed_structure_constant() {
        let mut alg = matrix_superalgebra(2, 1);
        // Corrupt E12·E21 from E11 to E11 + E22: associativity must fail
        // with a witness naming the triple.
        alg.product[1][2] = vec![(0, rat(1)), (3, rat(1))];
        let report = alg.verify();
        assert!(!report.passed());
        let first = report.first_failure().unwrap();
        assert_eq!(first.name, "associativity");
        assert!(first.detail.as_ref().unwrap().contains("E12"));
    }

    #[test]
    fn element_koszul_rule() {
        use crate::superpoly::VarId;
        // (y·E12)(y'·E21) with y, y' odd coefficients: moving E12 past y'
        // gives a −1, so the product is −y·y'·E11.
        let alg = matrix_superalgebra(2, 1);
        let y = SuperPoly::var(VarId::new(Parity::Odd, 1));
        let yp = SuperPoly::var(VarId::new(Parity::Odd, 2));
        let x1 = AlgElement::from_coords([(1usize, y.clone())]);
        let x2 = AlgElement::from_coords([(2usize, yp.clone())]);
        let prod = alg.mul(&x1, &x2);
        let expect = AlgElement::from_coords([(0usize, -&(&y * &yp))]);
        assert_eq!(prod, expect);
    }
}
