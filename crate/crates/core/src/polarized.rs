//! Polarized graded algebras presented by windowed structure constants.
//!
//! A polarized algebra splits as `𝒜 = 𝒜⁻ ⊕ 𝒜⁺` with both summands graded
//! subalgebras and a homogeneous basis `ς^±_{i,j}` (`i` the ℤ₂-degree, `j ≥ 1`
//! the index) in which the supersymmetric invariant form is the duality
//! pairing
//!
//! ```text
//! ⟨ς⁻_{i₁,j₁}, ς⁺_{i₂,j₂}⟩ = δ_{i₁i₂} δ_{j₁j₂},
//! ⟨ς⁺_{i₁,j₁}, ς⁻_{i₂,j₂}⟩ = (−1)^{i₁} δ_{i₁i₂} δ_{j₁j₂},
//! ```
//!
//! and `𝒜⁺`, `𝒜⁻` are isotropic.  The index sets are typically infinite
//! (Laurent polynomials), so a [`PolarizedAlgebra`] stores the product table
//! for symbols inside a finite *window* `j ≤ window[i]`; an entry whose true
//! expansion leaves the window is marked incomplete, and every computation
//! either avoids such entries, reports the truncation as a flag, or fails
//! with [`PolarizedError::IncompleteProduct`].  The coefficients an
//! incomplete entry does list are still exact — only its tail outside the
//! window is unknown.
//!
//! The whole structure is determined by much less than the full table: the
//! two restricted products on `𝒜⁺` and on `𝒜⁻` ([`PairOfProducts`]) satisfy
//! two compatibility identities ([`verify_compatibility`]), and conversely
//! any compatible pair reassembles into the mixed products
//! ([`build_from_pair`]).  The derived filtration
//!
//! ```text
//! 𝒜^{(0)}    = {u ∈ 𝒜⁺ : 𝒜⁻u ⊆ 𝒜⁻},
//! 𝒜^{(m+1)}  = {u ∈ 𝒜⁺ : 𝒜⁻u ⊆ 𝒜^{(m)} + 𝒜⁻},
//! 𝒜^{(−1)}   = 𝒜⁻,
//! 𝒜^{(−2−m)} = {u ∈ 𝒜⁻ : ⟨u, 𝒜^{(m)}⟩ = 0}
//! ```
//!
//! is computed exactly by [`compute_filtration`], and the product inclusions
//! it satisfies are checked by [`verify_filtration_products`].

use crate::check::CheckReport;
use crate::linalg::{RatMat, RowSpace};
use crate::parity::{koszul_sign, Parity};
use crate::rat::{format_rat, rat, Rat};
use crate::superpoly::SuperPoly;
use num::Zero;
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

/// A basis symbol `ς^±_{i,j}`: `parity` is `i`, and `idx` is `+j` for a
/// `ς⁺` symbol or `−j` for a `ς⁻` symbol (`idx ≠ 0`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct SignedIdx {
    pub parity: Parity,
    pub idx: i32,
}

impl SignedIdx {
    /// # Panics
    /// Panics when `idx == 0`; indices are 1-based in both directions.
    pub fn new(parity: Parity, idx: i32) -> Self {
        assert!(idx != 0, "signed index must be nonzero");
        SignedIdx { parity, idx }
    }

    /// `ς⁺_{parity,j}`.
    pub fn plus(parity: Parity, j: u32) -> Self {
        SignedIdx::new(parity, j as i32)
    }

    /// `ς⁻_{parity,j}`.
    pub fn minus(parity: Parity, j: u32) -> Self {
        SignedIdx::new(parity, -(j as i32))
    }

    pub fn is_plus(self) -> bool {
        self.idx > 0
    }

    pub fn is_minus(self) -> bool {
        self.idx < 0
    }

    /// The index `j` without its sign.
    pub fn magnitude(self) -> u32 {
        self.idx.unsigned_abs()
    }

    /// The symbol dual to this one under the pairing: same `(i, j)`,
    /// opposite sign.
    pub fn dual(self) -> SignedIdx {
        SignedIdx::new(self.parity, -self.idx)
    }
}

impl fmt::Display for SignedIdx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ς({},{})", self.parity.idx(), self.idx)
    }
}

/// One product `ς_a·ς_b` expanded over the basis.  `complete` is false when
/// the true expansion has components outside the window; the listed
/// coefficients are exact either way.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ProductEntry {
    pub coeffs: Vec<(SignedIdx, Rat)>,
    pub complete: bool,
}

impl ProductEntry {
    pub fn zero() -> Self {
        ProductEntry {
            coeffs: Vec::new(),
            complete: true,
        }
    }

    pub fn truncated() -> Self {
        ProductEntry {
            coeffs: Vec::new(),
            complete: false,
        }
    }

    pub fn from_coeffs(mut coeffs: Vec<(SignedIdx, Rat)>) -> Self {
        coeffs.retain(|(_, c)| !c.is_zero());
        coeffs.sort_by_key(|(s, _)| *s);
        ProductEntry {
            coeffs,
            complete: true,
        }
    }

    /// The coefficient of `s` — exact even on incomplete entries, as long as
    /// `s` itself is inside the window.
    pub fn coeff(&self, s: SignedIdx) -> Rat {
        self.coeffs
            .iter()
            .find(|(t, _)| *t == s)
            .map(|(_, c)| c.clone())
            .unwrap_or_else(Rat::zero)
    }
}

#[derive(Debug, Error)]
pub enum PolarizedError {
    #[error("symbol {0} lies outside the declared window")]
    UnknownSymbol(SignedIdx),
    #[error("product {0}·{1} is truncated by the window; the result is not exactly representable")]
    IncompleteProduct(SignedIdx, SignedIdx),
    #[error("inconsistent data: {0}")]
    Shape(String),
}

/// A polarized algebra on the window `j ∈ 1..=window[i]` (both signs, both
/// parities), with its full product table and optional per-symbol levels.
///
/// `levels` is metadata: an additive degree (`level(ab) = level(a) +
/// level(b)` whenever the product is a single symbol chain) that, for the
/// built-in constructors, coincides with the filtration level of the symbol.
/// It guides sampling and shape checks but never feeds into arithmetic.
#[derive(Debug, Clone)]
pub struct PolarizedAlgebra {
    window: [u32; 2],
    products: BTreeMap<(SignedIdx, SignedIdx), ProductEntry>,
    levels: BTreeMap<SignedIdx, i32>,
}

static ZERO_ENTRY: ProductEntry = ProductEntry {
    coeffs: Vec::new(),
    complete: true,
};

impl PolarizedAlgebra {
    /// Builds an algebra from raw data.  Absent product entries mean an
    /// exact zero; truncated products must be stored explicitly as
    /// [`ProductEntry::truncated`].
    pub fn new(
        window: [u32; 2],
        products: BTreeMap<(SignedIdx, SignedIdx), ProductEntry>,
        levels: BTreeMap<SignedIdx, i32>,
    ) -> Result<Self, PolarizedError> {
        let alg = PolarizedAlgebra {
            window,
            products,
            levels,
        };
        for ((a, b), entry) in &alg.products {
            for s in [*a, *b].into_iter().chain(entry.coeffs.iter().map(|(s, _)| *s)) {
                if !alg.in_window(s) {
                    return Err(PolarizedError::UnknownSymbol(s));
                }
            }
            if entry.coeffs.iter().any(|(_, c)| c.is_zero()) {
                return Err(PolarizedError::Shape(format!(
                    "product {a}·{b} lists an explicit zero coefficient"
                )));
            }
        }
        for s in alg.levels.keys() {
            if !alg.in_window(*s) {
                return Err(PolarizedError::UnknownSymbol(*s));
            }
        }
        Ok(alg)
    }

    pub fn window(&self) -> [u32; 2] {
        self.window
    }

    pub fn in_window(&self, s: SignedIdx) -> bool {
        s.magnitude() >= 1 && s.magnitude() <= self.window[s.parity.idx()]
    }

    /// All `ς⁺` symbols, even parity first, ascending index.
    pub fn plus_symbols(&self) -> Vec<SignedIdx> {
        let mut out = Vec::new();
        for p in Parity::BOTH {
            for j in 1..=self.window[p.idx()] {
                out.push(SignedIdx::plus(p, j));
            }
        }
        out
    }

    /// All `ς⁻` symbols, in the order dual to [`Self::plus_symbols`].
    pub fn minus_symbols(&self) -> Vec<SignedIdx> {
        self.plus_symbols().into_iter().map(SignedIdx::dual).collect()
    }

    /// Every symbol in the window.
    pub fn symbols(&self) -> Vec<SignedIdx> {
        let mut out = self.minus_symbols();
        out.extend(self.plus_symbols());
        out
    }

    /// The declared level of a symbol, when known.
    pub fn level(&self, s: SignedIdx) -> Option<i32> {
        self.levels.get(&s).copied()
    }

    pub fn has_levels(&self) -> bool {
        !self.levels.is_empty()
    }

    /// The stored expansion of `ς_a·ς_b`.
    ///
    /// # Errors
    /// [`PolarizedError::UnknownSymbol`] when a factor is outside the window.
    pub fn product_entry(&self, a: SignedIdx, b: SignedIdx) -> Result<&ProductEntry, PolarizedError> {
        for s in [a, b] {
            if !self.in_window(s) {
                return Err(PolarizedError::UnknownSymbol(s));
            }
        }
        Ok(self.products.get(&(a, b)).unwrap_or(&ZERO_ENTRY))
    }

    /// Product of elements with polynomial coefficients, Koszul rule
    /// `(f·ς_a)(g·ς_b) = (−1)^{|ς_a||g|} fg·(ς_aς_b)`.
    ///
    /// # Errors
    /// [`PolarizedError::IncompleteProduct`] when a needed entry is
    /// truncated (only entries with a nonzero coefficient product count).
    pub fn mul(&self, x: &PolElement, y: &PolElement) -> Result<PolElement, PolarizedError> {
        let mut out = PolElement::zero();
        for (&a, f) in &x.coords {
            for (&b, g) in &y.coords {
                let entry = self.product_entry(a, b)?;
                if !entry.complete {
                    return Err(PolarizedError::IncompleteProduct(a, b));
                }
                if entry.coeffs.is_empty() {
                    continue;
                }
                for g_parity in Parity::BOTH {
                    let g_part = g.parity_part(g_parity);
                    if g_part.is_zero() {
                        continue;
                    }
                    let mut fg = f * &g_part;
                    if koszul_sign(a.parity, g_parity) < 0 {
                        fg = -&fg;
                    }
                    for (c, k) in &entry.coeffs {
                        out.add(*c, &fg.scale(k));
                    }
                }
            }
        }
        Ok(out)
    }

    /// The duality form, extended to polynomial coefficients with the same
    /// Koszul rule as [`Self::mul`].
    pub fn form(&self, x: &PolElement, y: &PolElement) -> SuperPoly {
        let mut out = SuperPoly::zero();
        for (&a, f) in &x.coords {
            let b = a.dual();
            let Some(g) = y.coords.get(&b) else { continue };
            // ⟨ς⁻,ς⁺⟩ = 1 and ⟨ς⁺,ς⁻⟩ = (−1)^i on dual pairs.
            let dual_sign = if a.is_plus() && a.parity.is_odd() { -1 } else { 1 };
            for g_parity in Parity::BOTH {
                let g_part = g.parity_part(g_parity);
                if g_part.is_zero() {
                    continue;
                }
                let mut fg = f * &g_part;
                if dual_sign * koszul_sign(a.parity, g_parity) < 0 {
                    fg = -&fg;
                }
                out = &out + &fg;
            }
        }
        out
    }

    /// Graded commutator `[x,y] = xy − (−1)^{|x||y|}yx` over total-parity
    /// parts.
    pub fn commutator(&self, x: &PolElement, y: &PolElement) -> Result<PolElement, PolarizedError> {
        let mut out = PolElement::zero();
        for px in Parity::BOTH {
            let xp = x.parity_part(px);
            if xp.is_zero() {
                continue;
            }
            for py in Parity::BOTH {
                let yp = y.parity_part(py);
                if yp.is_zero() {
                    continue;
                }
                let xy = self.mul(&xp, &yp)?;
                let yx = self.mul(&yp, &xp)?;
                out = out.add_elem(&xy);
                if koszul_sign(px, py) < 0 {
                    out = out.add_elem(&yx);
                } else {
                    out = out.sub_elem(&yx);
                }
            }
        }
        Ok(out)
    }

    /// Checks the algebra data: polarization closure of `𝒜⁺` and `𝒜⁻`,
    /// grading of the product, associativity, and invariance of the duality
    /// form, all over window triples with complete entries (truncation is
    /// flagged, not failed).
    pub fn verify(&self) -> CheckReport {
        let mut report = CheckReport::new();
        let symbols = self.symbols();

        let mut witnesses = Vec::new();
        for (&(a, b), entry) in &self.products {
            for (c, k) in &entry.coeffs {
                if a.is_plus() == b.is_plus() && (c.idx > 0) != a.is_plus() && witnesses.len() < 3 {
                    witnesses.push(format!(
                        "{a}·{b} contains {} (coefficient {})",
                        c,
                        format_rat(k)
                    ));
                }
            }
        }
        report.require("polarization-closure", witnesses.is_empty(), || {
            witnesses.join("; ")
        });

        let mut witnesses = Vec::new();
        for (&(a, b), entry) in &self.products {
            let want = a.parity + b.parity;
            for (c, k) in &entry.coeffs {
                if c.parity != want && witnesses.len() < 3 {
                    witnesses.push(format!(
                        "{a}·{b} contains {} (coefficient {}) of wrong parity",
                        c,
                        format_rat(k)
                    ));
                }
            }
        }
        report.require("product-grading", witnesses.is_empty(), || {
            witnesses.join("; ")
        });

        let mut witnesses = Vec::new();
        let mut skipped = 0usize;
        'assoc: for &a in &symbols {
            for &b in &symbols {
                for &c in &symbols {
                    let ea = PolElement::symbol(a);
                    let eb = PolElement::symbol(b);
                    let ec = PolElement::symbol(c);
                    let lhs = self
                        .mul(&ea, &eb)
                        .and_then(|ab| self.mul(&ab, &ec));
                    let rhs = self
                        .mul(&eb, &ec)
                        .and_then(|bc| self.mul(&ea, &bc));
                    match (lhs, rhs) {
                        (Ok(l), Ok(r)) => {
                            if l.sub_elem(&r) != PolElement::zero() {
                                witnesses.push(format!(
                                    "({a}·{b})·{c} ≠ {a}·({b}·{c}): {} vs {}",
                                    l, r
                                ));
                                if witnesses.len() >= 3 {
                                    break 'assoc;
                                }
                            }
                        }
                        _ => skipped += 1,
                    }
                }
            }
        }
        report.require("associativity", witnesses.is_empty(), || {
            witnesses.join("; ")
        });
        if skipped > 0 {
            report.flag(format!(
                "associativity: {skipped} window triples skipped (truncated products)"
            ));
        }

        let mut witnesses = Vec::new();
        let mut skipped = 0usize;
        'invar: for &a in &symbols {
            for &b in &symbols {
                for &c in &symbols {
                    let ea = PolElement::symbol(a);
                    let eb = PolElement::symbol(b);
                    let ec = PolElement::symbol(c);
                    match (self.mul(&ea, &eb), self.mul(&eb, &ec)) {
                        (Ok(ab), Ok(bc)) => {
                            let lhs = self.form(&ab, &ec);
                            let rhs = self.form(&ea, &bc);
                            if lhs != rhs {
                                witnesses.push(format!(
                                    "⟨{a}·{b},{c}⟩ = {lhs} ≠ {rhs} = ⟨{a},{b}·{c}⟩"
                                ));
                                if witnesses.len() >= 3 {
                                    break 'invar;
                                }
                            }
                        }
                        _ => skipped += 1,
                    }
                }
            }
        }
        report.require("form-invariance", witnesses.is_empty(), || {
            witnesses.join("; ")
        });
        if skipped > 0 {
            report.flag(format!(
                "form-invariance: {skipped} window triples skipped (truncated products)"
            ));
        }
        report.flag(format!(
            "checks quantify over the window [{}, {}] only",
            self.window[0], self.window[1]
        ));

        report
    }

    /// The two restricted products on `𝒜⁺` and `𝒜⁻`.
    pub fn extract_pair(&self) -> PairOfProducts {
        let mut plus = BTreeMap::new();
        let mut minus = BTreeMap::new();
        for (&(a, b), entry) in &self.products {
            if a.is_plus() && b.is_plus() {
                plus.insert((a, b), entry.clone());
            } else if a.is_minus() && b.is_minus() {
                minus.insert((a, b), entry.clone());
            }
        }
        PairOfProducts {
            window: self.window,
            plus,
            minus,
        }
    }

    /// The mixed product entries, for comparison against a reconstruction.
    pub fn mixed_entries(&self) -> BTreeMap<(SignedIdx, SignedIdx), ProductEntry> {
        self.products
            .iter()
            .filter(|((a, b), _)| a.is_plus() != b.is_plus())
            .filter(|(_, e)| !(e.complete && e.coeffs.is_empty()))
            .map(|(k, v)| (*k, v.clone()))
            .collect()
    }
}

/// An element `Σ f_ς·ς` with [`SuperPoly`] coefficients; parity of a term is
/// `|f| + |ς|`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PolElement {
    coords: BTreeMap<SignedIdx, SuperPoly>,
}

impl PolElement {
    pub fn zero() -> Self {
        PolElement::default()
    }

    pub fn symbol(s: SignedIdx) -> Self {
        let mut e = PolElement::zero();
        e.add(s, &SuperPoly::one());
        e
    }

    pub fn from_coords(coords: impl IntoIterator<Item = (SignedIdx, SuperPoly)>) -> Self {
        let mut e = PolElement::zero();
        for (s, p) in coords {
            e.add(s, &p);
        }
        e
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn coords(&self) -> impl Iterator<Item = (SignedIdx, &SuperPoly)> {
        self.coords.iter().map(|(&s, p)| (s, p))
    }

    pub fn coord(&self, s: SignedIdx) -> SuperPoly {
        self.coords.get(&s).cloned().unwrap_or_else(SuperPoly::zero)
    }

    pub fn add(&mut self, s: SignedIdx, p: &SuperPoly) {
        if p.is_zero() {
            return;
        }
        let entry = self.coords.entry(s).or_insert_with(SuperPoly::zero);
        *entry = &*entry + p;
        if entry.is_zero() {
            self.coords.remove(&s);
        }
    }

    pub fn add_elem(&self, other: &PolElement) -> PolElement {
        let mut out = self.clone();
        for (&s, p) in &other.coords {
            out.add(s, p);
        }
        out
    }

    pub fn sub_elem(&self, other: &PolElement) -> PolElement {
        let mut out = self.clone();
        for (&s, p) in &other.coords {
            out.add(s, &-p);
        }
        out
    }

    pub fn neg_elem(&self) -> PolElement {
        PolElement::zero().sub_elem(self)
    }

    pub fn scale(&self, c: &Rat) -> PolElement {
        if c.is_zero() {
            return PolElement::zero();
        }
        PolElement {
            coords: self.coords.iter().map(|(&s, p)| (s, p.scale(c))).collect(),
        }
    }

    /// Left multiplication of every coordinate by a polynomial.
    pub fn mul_poly_left(&self, f: &SuperPoly) -> PolElement {
        let mut out = PolElement::zero();
        for (&s, p) in &self.coords {
            out.add(s, &(f * p));
        }
        out
    }

    pub fn map_coords(&self, mut f: impl FnMut(&SuperPoly) -> SuperPoly) -> PolElement {
        let mut out = PolElement::zero();
        for (&s, p) in &self.coords {
            out.add(s, &f(p));
        }
        out
    }

    /// The projection onto `𝒜⁺` (coefficients untouched).
    pub fn plus_part(&self) -> PolElement {
        PolElement {
            coords: self
                .coords
                .iter()
                .filter(|(s, _)| s.is_plus())
                .map(|(&s, p)| (s, p.clone()))
                .collect(),
        }
    }

    /// The projection onto `𝒜⁻`.
    pub fn minus_part(&self) -> PolElement {
        PolElement {
            coords: self
                .coords
                .iter()
                .filter(|(s, _)| s.is_minus())
                .map(|(&s, p)| (s, p.clone()))
                .collect(),
        }
    }

    /// The component of total parity `p` (symbol parity plus coefficient
    /// parity).
    pub fn parity_part(&self, p: Parity) -> PolElement {
        let mut out = PolElement::zero();
        for (&s, poly) in &self.coords {
            out.add(s, &poly.parity_part(p + s.parity));
        }
        out
    }

    /// `Some(p)` when every term has total parity `p` (zero counts as even).
    pub fn parity(&self) -> Option<Parity> {
        let mut seen: Option<Parity> = None;
        for (&s, poly) in &self.coords {
            for part in Parity::BOTH {
                if !poly.parity_part(part).is_zero() {
                    let total = s.parity + part;
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
}

impl fmt::Display for PolElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .coords
            .iter()
            .map(|(s, p)| format!("({p})·{s}"))
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

/// The restrictions of a polarized product to `𝒜⁺×𝒜⁺` and `𝒜⁻×𝒜⁻`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairOfProducts {
    pub window: [u32; 2],
    pub plus: BTreeMap<(SignedIdx, SignedIdx), ProductEntry>,
    pub minus: BTreeMap<(SignedIdx, SignedIdx), ProductEntry>,
}

impl PairOfProducts {
    fn entry(&self, a: SignedIdx, b: SignedIdx) -> &ProductEntry {
        let map = if a.is_plus() { &self.plus } else { &self.minus };
        map.get(&(a, b)).unwrap_or(&ZERO_ENTRY)
    }

    /// `a^{+,j₃}_{i₁,j₁;i₂,j₂}`: the coefficient of `ς⁺_{i₁+i₂,j₃}` in
    /// `ς⁺_{i₁,j₁}·ς⁺_{i₂,j₂}`.
    pub fn a_plus(&self, x: (Parity, u32), y: (Parity, u32), j3: u32) -> Rat {
        let entry = self.entry(SignedIdx::plus(x.0, x.1), SignedIdx::plus(y.0, y.1));
        entry.coeff(SignedIdx::plus(x.0 + y.0, j3))
    }

    /// `a^{−,j₃}_{i₁,j₁;i₂,j₂}`: the coefficient of `ς⁻_{i₁+i₂,j₃}` in
    /// `ς⁻_{i₁,j₁}·ς⁻_{i₂,j₂}`.
    pub fn a_minus(&self, x: (Parity, u32), y: (Parity, u32), j3: u32) -> Rat {
        let entry = self.entry(SignedIdx::minus(x.0, x.1), SignedIdx::minus(y.0, y.1));
        entry.coeff(SignedIdx::minus(x.0 + y.0, j3))
    }

    fn plus_entry(&self, x: (Parity, u32), y: (Parity, u32)) -> &ProductEntry {
        self.entry(SignedIdx::plus(x.0, x.1), SignedIdx::plus(y.0, y.1))
    }

    fn minus_entry(&self, x: (Parity, u32), y: (Parity, u32)) -> &ProductEntry {
        self.entry(SignedIdx::minus(x.0, x.1), SignedIdx::minus(y.0, y.1))
    }
}

/// Checks the two compatibility identities a pair of restricted products
/// must satisfy to reassemble into a polarized algebra.
///
/// With `aᵖ(x;y)[j]`, `aᵐ(x;y)[j]` the structure constants of the two
/// products, the identities are, for all window symbols `(i₁,j₁)`, `(i₂,j₂)`,
/// `(i₃,j₃)` and all `j₅ ∈ I_{i₁+i₂+i₃}`:
///
/// ```text
/// (first)   Σ_{j₄∈I_{i₁+i₂}} aᵖ(i₁,j₁;i₂,j₂)[j₄]·aᵐ(i₃,j₃;i₁+i₂+i₃,j₅)[j₄]
///     = Σ_{j₄∈I_{i₂+i₃}} ( aᵐ(i₃,j₃;i₂+i₃,j₄)[j₂]·aᵖ(i₁,j₁;i₂+i₃,j₄)[j₅]
///                        + aᵖ(i₂+i₃,j₄;i₂,j₂)[j₃]·aᵐ(i₂+i₃,j₄;i₁+i₂+i₃,j₅)[j₁] )
///
/// (second)  Σ_{j₄∈I_{i₁+i₂}} ( (−1)^{i₂} aᵖ(i₁+i₂,j₄;i₃,j₃)[j₅]·aᵐ(i₂,j₂;i₁+i₂,j₄)[j₁]
///                            + (−1)^{i₁} aᵐ(i₁+i₂+i₃,j₅;i₁+i₂,j₄)[j₃]·aᵖ(i₁+i₂,j₄;i₁,j₁)[j₂] )
///     = Σ_{j₄∈I_{i₂+i₃}} ( (−1)^{i₂+i₃} aᵐ(i₂+i₃,j₄;i₁+i₂+i₃,j₅)[j₁]·aᵖ(i₃,j₃;i₂+i₃,j₄)[j₂]
///                        + aᵖ(i₁,j₁;i₂+i₃,j₄)[j₅]·aᵐ(i₂+i₃,j₄;i₂,j₂)[j₃] )
/// ```
///
/// Index sums are truncated to the window (flagged).  The first identity's
/// left side is a dot product of two entry expansions and is only exact when
/// at least one of the two entries is complete; instances where neither is
/// are skipped and counted in a flag.
pub fn verify_compatibility(pair: &PairOfProducts) -> CheckReport {
    let mut report = CheckReport::new();

    let mut witnesses = Vec::new();
    for (maps, sign) in [(&pair.plus, 1i32), (&pair.minus, -1i32)] {
        for (&(a, b), entry) in maps {
            let side_ok = if sign > 0 { a.is_plus() && b.is_plus() } else { a.is_minus() && b.is_minus() };
            if !side_ok && witnesses.len() < 3 {
                witnesses.push(format!("entry {a}·{b} is on the wrong side of the pair"));
            }
            for (c, k) in &entry.coeffs {
                if (c.idx > 0) != (sign > 0) && witnesses.len() < 3 {
                    witnesses.push(format!(
                        "{a}·{b} contains {c} (coefficient {}) across the polarization",
                        format_rat(k)
                    ));
                }
                if c.parity != a.parity + b.parity && witnesses.len() < 3 {
                    witnesses.push(format!("{a}·{b} contains {c} of wrong parity"));
                }
            }
        }
    }
    report.require("pair-shape", witnesses.is_empty(), || witnesses.join("; "));
    if !witnesses.is_empty() {
        return report;
    }

    let window = pair.window;
    let parities: Vec<Parity> = Parity::BOTH
        .into_iter()
        .filter(|p| window[p.idx()] > 0)
        .collect();
    let idxs = |i: Parity| 1..=window[i.idx()];

    let mut first_witnesses = Vec::new();
    let mut first_skipped = 0usize;
    let mut second_witnesses = Vec::new();

    for &i1 in &parities {
        for &i2 in &parities {
            for &i3 in &parities {
                let i12 = i1 + i2;
                let i23 = i2 + i3;
                let i123 = i12 + i3;
                for j1 in idxs(i1) {
                    for j2 in idxs(i2) {
                        for j3 in idxs(i3) {
                            for j5 in idxs(i123) {
                                // First identity.
                                let p1 = pair.plus_entry((i1, j1), (i2, j2));
                                let p2 = pair.minus_entry((i3, j3), (i123, j5));
                                if !p1.complete && !p2.complete {
                                    first_skipped += 1;
                                } else {
                                    let lhs: Rat = idxs(i12)
                                        .map(|j4| {
                                            &p1.coeff(SignedIdx::plus(i12, j4))
                                                * &p2.coeff(SignedIdx::minus(i12, j4))
                                        })
                                        .sum();
                                    let rhs: Rat = idxs(i23)
                                        .map(|j4| {
                                            &(&pair.a_minus((i3, j3), (i23, j4), j2)
                                                * &pair.a_plus((i1, j1), (i23, j4), j5))
                                                + &(&pair.a_plus((i23, j4), (i2, j2), j3)
                                                    * &pair.a_minus((i23, j4), (i123, j5), j1))
                                        })
                                        .sum();
                                    if lhs != rhs && first_witnesses.len() < 3 {
                                        first_witnesses.push(format!(
                                            "at (i₁,j₁)=({},{j1}), (i₂,j₂)=({},{j2}), (i₃,j₃)=({},{j3}), j₅={j5}: {} ≠ {}",
                                            i1.idx(), i2.idx(), i3.idx(),
                                            format_rat(&lhs), format_rat(&rhs)
                                        ));
                                    }
                                }

                                // Second identity.
                                let s2 = sign_if(i2.is_odd());
                                let s1 = sign_if(i1.is_odd());
                                let s23 = sign_if((i2 + i3).is_odd());
                                let lhs: Rat = idxs(i12)
                                    .map(|j4| {
                                        &(&(&s2 * &pair.a_plus((i12, j4), (i3, j3), j5))
                                            * &pair.a_minus((i2, j2), (i12, j4), j1))
                                            + &(&(&s1
                                                * &pair.a_minus((i123, j5), (i12, j4), j3))
                                                * &pair.a_plus((i12, j4), (i1, j1), j2))
                                    })
                                    .sum();
                                let rhs: Rat = idxs(i23)
                                    .map(|j4| {
                                        &(&(&s23 * &pair.a_minus((i23, j4), (i123, j5), j1))
                                            * &pair.a_plus((i3, j3), (i23, j4), j2))
                                            + &(&pair.a_plus((i1, j1), (i23, j4), j5)
                                                * &pair.a_minus((i23, j4), (i2, j2), j3))
                                    })
                                    .sum();
                                if lhs != rhs && second_witnesses.len() < 3 {
                                    second_witnesses.push(format!(
                                        "at (i₁,j₁)=({},{j1}), (i₂,j₂)=({},{j2}), (i₃,j₃)=({},{j3}), j₅={j5}: {} ≠ {}",
                                        i1.idx(), i2.idx(), i3.idx(),
                                        format_rat(&lhs), format_rat(&rhs)
                                    ));
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    report.require("first-compatibility", first_witnesses.is_empty(), || {
        first_witnesses.join("; ")
    });
    report.require("second-compatibility", second_witnesses.is_empty(), || {
        second_witnesses.join("; ")
    });
    if first_skipped > 0 {
        report.flag(format!(
            "first-compatibility: {first_skipped} instances skipped (both entries truncated)"
        ));
    }
    report.flag(format!(
        "index sums truncated to the window [{}, {}]",
        window[0], window[1]
    ));
    report
}

fn sign_if(odd: bool) -> Rat {
    if odd {
        rat(-1)
    } else {
        rat(1)
    }
}

/// Reassembles a full polarized algebra from its two restricted products:
/// the same-sign tables are copied, and the mixed products are
///
/// ```text
/// ς⁺_{i₁,j₁}ς⁻_{i₂,j₂} = Σ_{j₃∈I_{i₁+i₂}} ( (−1)^{i₂} aᵐ(i₂,j₂;i₁+i₂,j₃)[j₁]·ς⁺_{i₁+i₂,j₃}
///                                          + (−1)^{i₁} aᵖ(i₁+i₂,j₃;i₁,j₁)[j₂]·ς⁻_{i₁+i₂,j₃} )
/// ς⁻_{i₁,j₁}ς⁺_{i₂,j₂} = Σ_{j₃∈I_{i₁+i₂}} ( aᵖ(i₂,j₂;i₁+i₂,j₃)[j₁]·ς⁻_{i₁+i₂,j₃}
///                                          + aᵐ(i₁+i₂,j₃;i₁,j₁)[j₂]·ς⁺_{i₁+i₂,j₃} )
/// ```
///
/// with `j₃` truncated to the window (recorded as a flag on the report; the
/// built entries are marked complete).
pub fn build_from_pair(pair: &PairOfProducts) -> (PolarizedAlgebra, CheckReport) {
    let mut report = CheckReport::new();
    let window = pair.window;
    let mut products: BTreeMap<(SignedIdx, SignedIdx), ProductEntry> = BTreeMap::new();
    for map in [&pair.plus, &pair.minus] {
        for (&k, v) in map {
            products.insert(k, v.clone());
        }
    }

    let parities: Vec<Parity> = Parity::BOTH
        .into_iter()
        .filter(|p| window[p.idx()] > 0)
        .collect();
    for &i1 in &parities {
        for &i2 in &parities {
            let i12 = i1 + i2;
            for j1 in 1..=window[i1.idx()] {
                for j2 in 1..=window[i2.idx()] {
                    // ς⁺_{i₁,j₁}·ς⁻_{i₂,j₂}
                    let mut coeffs = Vec::new();
                    for j3 in 1..=window[i12.idx()] {
                        let cp = &sign_if(i2.is_odd()) * &pair.a_minus((i2, j2), (i12, j3), j1);
                        if !cp.is_zero() {
                            coeffs.push((SignedIdx::plus(i12, j3), cp));
                        }
                        let cm = &sign_if(i1.is_odd()) * &pair.a_plus((i12, j3), (i1, j1), j2);
                        if !cm.is_zero() {
                            coeffs.push((SignedIdx::minus(i12, j3), cm));
                        }
                    }
                    if !coeffs.is_empty() {
                        products.insert(
                            (SignedIdx::plus(i1, j1), SignedIdx::minus(i2, j2)),
                            ProductEntry::from_coeffs(coeffs),
                        );
                    }

                    // ς⁻_{i₁,j₁}·ς⁺_{i₂,j₂}
                    let mut coeffs = Vec::new();
                    for j3 in 1..=window[i12.idx()] {
                        let cm = pair.a_plus((i2, j2), (i12, j3), j1);
                        if !cm.is_zero() {
                            coeffs.push((SignedIdx::minus(i12, j3), cm));
                        }
                        let cp = pair.a_minus((i12, j3), (i1, j1), j2);
                        if !cp.is_zero() {
                            coeffs.push((SignedIdx::plus(i12, j3), cp));
                        }
                    }
                    if !coeffs.is_empty() {
                        products.insert(
                            (SignedIdx::minus(i1, j1), SignedIdx::plus(i2, j2)),
                            ProductEntry::from_coeffs(coeffs),
                        );
                    }
                }
            }
        }
    }

    report.flag(format!(
        "mixed products reassembled over the window [{}, {}] only",
        window[0], window[1]
    ));
    let alg = PolarizedAlgebra::new(window, products, BTreeMap::new())
        .expect("reassembled data stays inside the window");
    report.pass("reassembly");
    (alg, report)
}

/// The filtration of a polarized algebra, computed on the window.
///
/// Nonnegative levels are subspaces of `𝒜⁺` (coordinates over
/// [`PolarizedAlgebra::plus_symbols`]); levels `≤ −1` are subspaces of `𝒜⁻`
/// (coordinates over [`PolarizedAlgebra::minus_symbols`], which is the dual
/// order).  Basis vectors are parity-pure.
#[derive(Debug, Clone)]
pub struct Filtration {
    max_level: i32,
    levels: BTreeMap<i32, Vec<(Parity, Vec<Rat>)>>,
}

impl Filtration {
    pub fn max_level(&self) -> i32 {
        self.max_level
    }

    /// Basis of level `m` as `(parity, coordinate vector)` pairs.
    pub fn level_basis(&self, m: i32) -> &[(Parity, Vec<Rat>)] {
        self.levels
            .get(&m)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn dim(&self, m: i32) -> usize {
        self.level_basis(m).len()
    }

    pub fn dim_of_parity(&self, m: i32, p: Parity) -> usize {
        self.level_basis(m).iter().filter(|(q, _)| *q == p).count()
    }

    /// The `k`-th basis vector of level `m` as an element.
    pub fn element(&self, alg: &PolarizedAlgebra, m: i32, k: usize) -> PolElement {
        let (_, v) = &self.level_basis(m)[k];
        let symbols = if m >= 0 {
            alg.plus_symbols()
        } else {
            alg.minus_symbols()
        };
        PolElement::from_coords(
            symbols
                .into_iter()
                .zip(v.iter())
                .filter(|(_, c)| !c.is_zero())
                .map(|(s, c)| (s, SuperPoly::constant(c.clone()))),
        )
    }
}

/// Computes filtration levels `−(max_m+2) ..= max_m` exactly on the window.
///
/// # Errors
/// [`PolarizedError::IncompleteProduct`] when a product `ς⁻·ς⁺` needed by
/// the defining conditions is truncated.
pub fn compute_filtration(
    alg: &PolarizedAlgebra,
    max_m: i32,
) -> Result<Filtration, PolarizedError> {
    assert!(max_m >= 0, "max_m must be nonnegative");
    let plus_syms = alg.plus_symbols();
    let minus_syms = alg.minus_symbols();
    let d = plus_syms.len();
    let col: BTreeMap<SignedIdx, usize> = plus_syms
        .iter()
        .enumerate()
        .map(|(c, &s)| (s, c))
        .collect();

    // π₊(g·e) for every minus generator g and plus basis symbol e, as a
    // dense plus-coordinate vector.
    let mut action: Vec<Vec<Vec<Rat>>> = Vec::with_capacity(minus_syms.len());
    for &g in &minus_syms {
        let mut per_e = Vec::with_capacity(d);
        for &e in &plus_syms {
            let entry = alg.product_entry(g, e)?;
            if !entry.complete {
                return Err(PolarizedError::IncompleteProduct(g, e));
            }
            let mut v = vec![Rat::zero(); d];
            for (c, k) in &entry.coeffs {
                if c.is_plus() {
                    v[col[c]] = k.clone();
                }
            }
            per_e.push(v);
        }
        action.push(per_e);
    }

    let mut levels: BTreeMap<i32, Vec<(Parity, Vec<Rat>)>> = BTreeMap::new();

    // Nonnegative levels, per parity of the candidate element.
    let mut span = RowSpace::new(d); // V_{m−1}, initially {0}
    for m in 0..=max_m {
        let mut basis: Vec<(Parity, Vec<Rat>)> = Vec::new();
        for p in Parity::BOTH {
            let cols: Vec<usize> = (0..d).filter(|&j| plus_syms[j].parity == p).collect();
            if cols.is_empty() {
                continue;
            }
            // Rows: for each minus generator g and output coordinate t,
            // the reduced residual of π₊(g·e_j) must vanish.
            let mut rows: Vec<Vec<Rat>> = Vec::new();
            let mut residuals: Vec<Vec<Rat>> = Vec::new();
            for per_e in &action {
                for &j in &cols {
                    residuals.push(span.reduce(per_e[j].clone()));
                }
                for t in 0..d {
                    let row: Vec<Rat> = (0..cols.len())
                        .map(|jj| residuals[residuals.len() - cols.len() + jj][t].clone())
                        .collect();
                    if row.iter().any(|x| !x.is_zero()) {
                        rows.push(row);
                    }
                }
            }
            let kernel = if rows.is_empty() {
                // No constraints: the whole parity block qualifies.
                (0..cols.len())
                    .map(|j| {
                        let mut v = vec![Rat::zero(); cols.len()];
                        v[j] = rat(1);
                        v
                    })
                    .collect()
            } else {
                RatMat::from_rows(rows).nullspace()
            };
            for k in kernel {
                let mut full = vec![Rat::zero(); d];
                for (jj, &j) in cols.iter().enumerate() {
                    full[j] = k[jj].clone();
                }
                basis.push((p, full));
            }
        }
        for (_, v) in &basis {
            span.insert(v.clone());
        }
        levels.insert(m, basis);
    }

    // Level −1 is all of 𝒜⁻.
    let minus_d = minus_syms.len();
    levels.insert(
        -1,
        minus_syms
            .iter()
            .enumerate()
            .map(|(j, s)| {
                let mut v = vec![Rat::zero(); minus_d];
                v[j] = rat(1);
                (s.parity, v)
            })
            .collect(),
    );

    // Levels −2−m: the annihilator of level m under the duality pairing.
    // minus_symbols is the dual order of plus_symbols, so ⟨u, v⟩ with u in
    // minus coordinates and v in plus coordinates is the plain dot product.
    for m in 0..=max_m {
        let mut basis: Vec<(Parity, Vec<Rat>)> = Vec::new();
        for p in Parity::BOTH {
            let cols: Vec<usize> = (0..minus_d)
                .filter(|&j| minus_syms[j].parity == p)
                .collect();
            if cols.is_empty() {
                continue;
            }
            let rows: Vec<Vec<Rat>> = levels[&m]
                .iter()
                .filter(|(q, _)| *q == p)
                .map(|(_, v)| cols.iter().map(|&j| v[j].clone()).collect())
                .collect();
            let kernel = if rows.is_empty() {
                (0..cols.len())
                    .map(|j| {
                        let mut v = vec![Rat::zero(); cols.len()];
                        v[j] = rat(1);
                        v
                    })
                    .collect()
            } else {
                RatMat::from_rows(rows).nullspace()
            };
            for k in kernel {
                let mut full = vec![Rat::zero(); minus_d];
                for (jj, &j) in cols.iter().enumerate() {
                    full[j] = k[jj].clone();
                }
                basis.push((p, full));
            }
        }
        levels.insert(-2 - m, basis);
    }

    Ok(Filtration {
        max_level: max_m,
        levels,
    })
}

/// Checks the product inclusions of the filtration on all computed levels:
///
/// ```text
/// 𝒜^{(m)}𝒜^{(n)}        ⊆ 𝒜^{(m+n)}
/// 𝒜^{(m+n)}𝒜^{(−n−1)}   ⊆ 𝒜^{(m−1)} + 𝒜⁻      (both orders)
/// 𝒜^{(m)}𝒜^{(−m−n−2)}   ⊆ 𝒜^{(−n−2)}          (both orders)
/// 𝒜^{(−m−1)}𝒜^{(−n−1)}  ⊆ 𝒜^{(−m−n−2)}
/// ```
///
/// for `m, n ≥ 0`, `m+n ≤ max`.  Pairs whose product is truncated by the
/// window are skipped and counted in a flag.
pub fn verify_filtration_products(alg: &PolarizedAlgebra, filt: &Filtration) -> CheckReport {
    let mut report = CheckReport::new();
    let max = filt.max_level();
    let plus_syms = alg.plus_symbols();
    let minus_syms = alg.minus_symbols();
    let plus_col: BTreeMap<SignedIdx, usize> = plus_syms
        .iter()
        .enumerate()
        .map(|(c, &s)| (s, c))
        .collect();
    let minus_col: BTreeMap<SignedIdx, usize> = minus_syms
        .iter()
        .enumerate()
        .map(|(c, &s)| (s, c))
        .collect();

    let spans: BTreeMap<i32, RowSpace> = (-(max + 2)..=max)
        .map(|m| {
            let dim = if m >= 0 { plus_syms.len() } else { minus_syms.len() };
            let mut space = RowSpace::new(dim);
            for (_, v) in filt.level_basis(m) {
                space.insert(v.clone());
            }
            (m, space)
        })
        .collect();

    let plus_coords = |x: &PolElement| -> Vec<Rat> {
        let mut v = vec![Rat::zero(); plus_syms.len()];
        for (s, p) in x.coords() {
            if s.is_plus() {
                v[plus_col[&s]] = p.constant_term();
            }
        }
        v
    };
    let minus_coords = |x: &PolElement| -> Vec<Rat> {
        let mut v = vec![Rat::zero(); minus_syms.len()];
        for (s, p) in x.coords() {
            if s.is_minus() {
                v[minus_col[&s]] = p.constant_term();
            }
        }
        v
    };

    let mut skipped = 0usize;

    // 𝒜^{(m)}𝒜^{(n)} ⊆ 𝒜^{(m+n)}.
    let mut witnesses = Vec::new();
    for m in 0..=max {
        for n in 0..=(max - m) {
            for a in 0..filt.dim(m) {
                for b in 0..filt.dim(n) {
                    let u = filt.element(alg, m, a);
                    let v = filt.element(alg, n, b);
                    match alg.mul(&u, &v) {
                        Err(_) => skipped += 1,
                        Ok(w) => {
                            let ok = w.minus_part().is_zero()
                                && spans[&(m + n)].contains(&plus_coords(&w));
                            if !ok && witnesses.len() < 3 {
                                witnesses.push(format!(
                                    "level-{m} vector #{a} times level-{n} vector #{b} = {w} escapes level {}",
                                    m + n
                                ));
                            }
                        }
                    }
                }
            }
        }
    }
    report.require("plus-times-plus", witnesses.is_empty(), || {
        witnesses.join("; ")
    });

    // 𝒜^{(m+n)}𝒜^{(−n−1)} and 𝒜^{(−n−1)}𝒜^{(m+n)} ⊆ 𝒜^{(m−1)} + 𝒜⁻.
    let mut witnesses = Vec::new();
    for m in 0..=max {
        for n in 0..=(max - m) {
            for a in 0..filt.dim(m + n) {
                for b in 0..filt.dim(-n - 1) {
                    let u = filt.element(alg, m + n, a);
                    let v = filt.element(alg, -n - 1, b);
                    for (w, tag) in [(alg.mul(&u, &v), "u·v"), (alg.mul(&v, &u), "v·u")] {
                        match w {
                            Err(_) => skipped += 1,
                            Ok(w) => {
                                let p = plus_coords(&w);
                                let ok = if m == 0 {
                                    p.iter().all(Rat::is_zero)
                                } else {
                                    spans[&(m - 1)].contains(&p)
                                };
                                if !ok && witnesses.len() < 3 {
                                    witnesses.push(format!(
                                        "{tag} with u level {}, v level {}: {w} escapes level {} + 𝒜⁻",
                                        m + n,
                                        -n - 1,
                                        m - 1
                                    ));
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    report.require("plus-times-minus-drop", witnesses.is_empty(), || {
        witnesses.join("; ")
    });

    // 𝒜^{(m)}𝒜^{(−m−n−2)} and the reverse ⊆ 𝒜^{(−n−2)}.
    let mut witnesses = Vec::new();
    for m in 0..=max {
        for n in 0..=(max - m) {
            for a in 0..filt.dim(m) {
                for b in 0..filt.dim(-m - n - 2) {
                    let u = filt.element(alg, m, a);
                    let v = filt.element(alg, -m - n - 2, b);
                    for (w, tag) in [(alg.mul(&u, &v), "u·v"), (alg.mul(&v, &u), "v·u")] {
                        match w {
                            Err(_) => skipped += 1,
                            Ok(w) => {
                                let ok = w.plus_part().is_zero()
                                    && spans[&(-n - 2)].contains(&minus_coords(&w));
                                if !ok && witnesses.len() < 3 {
                                    witnesses.push(format!(
                                        "{tag} with u level {m}, v level {}: {w} escapes level {}",
                                        -m - n - 2,
                                        -n - 2
                                    ));
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    report.require("plus-times-deep-minus", witnesses.is_empty(), || {
        witnesses.join("; ")
    });

    // 𝒜^{(−m−1)}𝒜^{(−n−1)} ⊆ 𝒜^{(−m−n−2)}.
    let mut witnesses = Vec::new();
    for m in 0..=max {
        for n in 0..=(max - m) {
            for a in 0..filt.dim(-m - 1) {
                for b in 0..filt.dim(-n - 1) {
                    let u = filt.element(alg, -m - 1, a);
                    let v = filt.element(alg, -n - 1, b);
                    match alg.mul(&u, &v) {
                        Err(_) => skipped += 1,
                        Ok(w) => {
                            let ok = w.plus_part().is_zero()
                                && spans[&(-m - n - 2)].contains(&minus_coords(&w));
                            if !ok && witnesses.len() < 3 {
                                witnesses.push(format!(
                                    "levels {} × {}: {w} escapes level {}",
                                    -m - 1,
                                    -n - 1,
                                    -m - n - 2
                                ));
                            }
                        }
                    }
                }
            }
        }
    }
    report.require("minus-times-minus", witnesses.is_empty(), || {
        witnesses.join("; ")
    });

    if skipped > 0 {
        report.flag(format!(
            "{skipped} products skipped (truncated by the window)"
        ));
    }
    report
}

/// The Laurent algebra `𝔽[t,t⁻¹]` on a window of size `n`, all even:
/// `ς_{0,j} = t^{j−1}` and `ς_{0,−j} = t^{−j}` for `j = 1..n`, with
/// `⟨t^a, t^b⟩ = δ_{a+b,−1}`.  The declared level of a symbol is its
/// `t`-degree.
pub fn laurent(n: u32) -> PolarizedAlgebra {
    assert!(n >= 1);
    let deg = |s: SignedIdx| -> i64 {
        if s.is_plus() {
            s.idx as i64 - 1
        } else {
            s.idx as i64
        }
    };
    let sym_of_deg = |d: i64| -> Option<SignedIdx> {
        if d >= 0 && d < n as i64 {
            Some(SignedIdx::plus(Parity::Even, d as u32 + 1))
        } else if d < 0 && d >= -(n as i64) {
            Some(SignedIdx::minus(Parity::Even, (-d) as u32))
        } else {
            None
        }
    };
    let mut products = BTreeMap::new();
    let mut levels = BTreeMap::new();
    let mut symbols = Vec::new();
    for j in 1..=n {
        symbols.push(SignedIdx::plus(Parity::Even, j));
        symbols.push(SignedIdx::minus(Parity::Even, j));
    }
    for &a in &symbols {
        levels.insert(a, deg(a) as i32);
        for &b in &symbols {
            let d = deg(a) + deg(b);
            let entry = match sym_of_deg(d) {
                Some(s) => ProductEntry::from_coeffs(vec![(s, rat(1))]),
                None => ProductEntry::truncated(),
            };
            products.insert((a, b), entry);
        }
    }
    PolarizedAlgebra::new([n, 0], products, levels).expect("static data")
}

/// The matrix-superalgebra Laurent algebra `M_{k×k} ⊗ 𝔽[t,t⁻¹]` with block
/// sizes `(k1, k−k1)`, on a window of `n` `t`-degrees per sign.
///
/// Writing the parity-`i` matrix units in lexicographic order as
/// `u_0, …, u_{m_i−1}`, the basis is `ς_{i, d·m_i+r+1} = u_r ⊗ t^d` for
/// `d = 0..n−1` on the plus side, and `ς_{i,−(d·m_i+r+1)} = ε_b·E_{ba} ⊗
/// t^{−d−1}` for `u_r = E_{ab}` on the minus side (`ε` the supertrace
/// signs), which makes the trace form `⟨x⊗t^p, y⊗t^q⟩ = Str(xy)·δ_{p+q,−1}`
/// exactly the duality pairing.  Declared levels are `t`-degrees.
pub fn matrix_laurent(k: usize, k1: usize, n: u32) -> PolarizedAlgebra {
    assert!(k >= 1 && k1 <= k && n >= 1);
    let parity_of = |a: usize, b: usize| Parity::from_odd((a < k1) != (b < k1));
    let eps = |a: usize| if a < k1 { rat(1) } else { rat(-1) };
    // units[i] = the parity-i matrix units (a, b) in lex order.
    let mut units: [Vec<(usize, usize)>; 2] = [Vec::new(), Vec::new()];
    for a in 0..k {
        for b in 0..k {
            units[parity_of(a, b).idx()].push((a, b));
        }
    }
    let rank_of = |i: Parity, u: (usize, usize)| -> u32 {
        units[i.idx()].iter().position(|&v| v == u).expect("unit of this parity") as u32
    };
    let m = [units[0].len() as u32, units[1].len() as u32];
    let window = [n * m[0], n * m[1]];

    // (matrix unit, t-degree) of a symbol, and back; minus symbols carry the
    // ε prefactor recorded separately.
    let decode = |s: SignedIdx| -> ((usize, usize), i64, Rat) {
        let i = s.parity;
        let j = s.magnitude() - 1;
        let d = (j / m[i.idx()]) as i64;
        let r = (j % m[i.idx()]) as usize;
        let (a, b) = units[i.idx()][r];
        if s.is_plus() {
            ((a, b), d, rat(1))
        } else {
            // ς_{i,−j} = ε_b·E_{ba}⊗t^{−d−1}.
            ((b, a), -d - 1, eps(b))
        }
    };
    // E_{cd}⊗t^s as (symbol, coefficient), or None when out of window.
    let encode = |cd: (usize, usize), s: i64| -> Option<(SignedIdx, Rat)> {
        let i = parity_of(cd.0, cd.1);
        if s >= 0 {
            if s >= n as i64 {
                return None;
            }
            let r = rank_of(i, cd);
            Some((
                SignedIdx::plus(i, s as u32 * m[i.idx()] + r + 1),
                rat(1),
            ))
        } else {
            if s < -(n as i64) {
                return None;
            }
            // E_{cd}⊗t^s = ε_c·ς_{i,−j} for the unit (d, c) at degree −s−1.
            let r = rank_of(i, (cd.1, cd.0));
            let d = (-s - 1) as u32;
            Some((
                SignedIdx::minus(i, d * m[i.idx()] + r + 1),
                eps(cd.0),
            ))
        }
    };

    let mut symbols = Vec::new();
    for p in Parity::BOTH {
        for j in 1..=window[p.idx()] {
            symbols.push(SignedIdx::plus(p, j));
            symbols.push(SignedIdx::minus(p, j));
        }
    }
    let mut products = BTreeMap::new();
    let mut levels = BTreeMap::new();
    for &x in &symbols {
        let (_, dx, _) = decode(x);
        levels.insert(x, dx as i32);
        for &y in &symbols {
            let ((a, b), dx, cx) = decode(x);
            let ((c, dd), dy, cy) = decode(y);
            // (E_ab⊗t^dx)(E_cd⊗t^dy) = δ_bc E_ad ⊗ t^{dx+dy}; the Laurent
            // factor is even, so no Koszul sign.
            let entry = if b != c {
                ProductEntry::zero()
            } else {
                match encode((a, dd), dx + dy) {
                    Some((s, k)) => {
                        ProductEntry::from_coeffs(vec![(s, &(&cx * &cy) * &k)])
                    }
                    None => ProductEntry::truncated(),
                }
            };
            products.insert((x, y), entry);
        }
    }
    PolarizedAlgebra::new(window, products, levels).expect("static data")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(j: i32) -> SignedIdx {
        SignedIdx::new(Parity::Even, j)
    }

    #[test]
    fn laurent_products_and_form() {
        let alg = laurent(4);
        // t^2·t^{-3} = t^{-1}: ς_{0,3}·ς_{0,−3} = ς_{0,−1}.
        let e = alg.product_entry(sym(3), sym(-3)).unwrap();
        assert_eq!(e.coeffs, vec![(sym(-1), rat(1))]);
        assert!(e.complete);
        // t^3·t^2 = t^5 overflows the window.
        let e = alg.product_entry(sym(4), sym(3)).unwrap();
        assert!(!e.complete);
        // ⟨t^{-3}, t^2⟩ = 1 (dual pair), ⟨t^{-3}, t⟩ = 0.
        let f = alg.form(&PolElement::symbol(sym(-3)), &PolElement::symbol(sym(3)));
        assert_eq!(f, SuperPoly::one());
        let f = alg.form(&PolElement::symbol(sym(-3)), &PolElement::symbol(sym(2)));
        assert!(f.is_zero());
        assert_eq!(alg.level(sym(4)), Some(3));
        assert_eq!(alg.level(sym(-4)), Some(-4));
        assert!(alg.verify().passed());
    }

    #[test]
    fn matrix_laurent_structure() {
        let alg = matrix_laurent(2, 1, 3);
        assert_eq!(alg.window(), [6, 6]);
        let report = alg.verify();
        assert!(report.passed(), "{report}");
        // Duality: every minus symbol pairs to 1 with its own dual and to 0
        // with any other plus symbol — structural, but the constructor must
        // have chosen the minus basis so the *trace* form agrees; spot-check
        // ς_{1,−1} = ε_2·E21⊗t^{−1} against ς_{1,1} = E12⊗t^0:
        // (−E21 t^{−1})(E12 t^0) = −E22 t^{−1}, Str → +1.
        let x = PolElement::symbol(SignedIdx::minus(Parity::Odd, 1));
        let y = PolElement::symbol(SignedIdx::plus(Parity::Odd, 1));
        assert_eq!(alg.form(&x, &y), SuperPoly::one());
        // ⟨ς⁺, ς⁻⟩ on odd symbols carries (−1)^i.
        assert_eq!(alg.form(&y, &x), SuperPoly::constant(rat(-1)));
        // Product grading: odd·odd = even.
        let e = alg
            .product_entry(
                SignedIdx::plus(Parity::Odd, 1),
                SignedIdx::plus(Parity::Odd, 2),
            )
            .unwrap();
        for (c, _) in &e.coeffs {
            assert_eq!(c.parity, Parity::Even);
        }
    }

    #[test]
    fn compatibility_roundtrip_on_laurent() {
        let alg = laurent(5);
        let pair = alg.extract_pair();
        let report = verify_compatibility(&pair);
        assert!(report.passed(), "{report}");
        let (rebuilt, report) = build_from_pair(&pair);
        assert!(report.passed());
        assert_eq!(rebuilt.mixed_entries(), alg.mixed_entries());
    }

    #[test]
    fn compatibility_detects_a_perturbed_constant() {
        let alg = laurent(5);
        let mut pair = alg.extract_pair();
        // Corrupt t^0·t^1 = t^1 into 2t^1.
        let key = (sym(1), sym(2));
        pair.plus
            .insert(key, ProductEntry::from_coeffs(vec![(sym(2), rat(2))]));
        let report = verify_compatibility(&pair);
        assert!(!report.passed());
        let first = report.first_failure().unwrap();
        assert!(first.detail.is_some());
    }

    #[test]
    fn filtration_of_laurent_is_spanned_by_low_powers() {
        let alg = laurent(6);
        let filt = compute_filtration(&alg, 4).unwrap();
        for m in 0..=4 {
            // 𝒜^{(m)} = span{1, t, …, t^m}.
            assert_eq!(filt.dim(m), m as usize + 1, "level {m}");
            assert_eq!(filt.dim_of_parity(m, Parity::Even), m as usize + 1);
        }
        // 𝒜^{(−1)} = 𝒜⁻ has the full window dimension.
        assert_eq!(filt.dim(-1), 6);
        // 𝒜^{(−2−m)} = span{t^{−m−2}, …}: codimension m+1 in 𝒜⁻.
        for m in 0..=4 {
            assert_eq!(filt.dim(-2 - m), 6 - (m as usize + 1));
        }
        // Level 2 really is {1, t, t²}: check membership via elements.
        let w: Vec<PolElement> = (0..filt.dim(2)).map(|k| filt.element(&alg, 2, k)).collect();
        for e in &w {
            for (s, _) in e.coords() {
                assert!(s.is_plus() && s.magnitude() <= 3);
            }
        }
        let report = verify_filtration_products(&alg, &filt);
        assert!(report.passed(), "{report}");
    }

    #[test]
    fn filtration_of_matrix_laurent_has_doubled_dimensions() {
        let alg = matrix_laurent(2, 1, 4);
        let filt = compute_filtration(&alg, 2).unwrap();
        for m in 0..=2 {
            // k_{i,m} = 2(m+1) for each parity i.
            assert_eq!(filt.dim_of_parity(m, Parity::Even), 2 * (m as usize + 1));
            assert_eq!(filt.dim_of_parity(m, Parity::Odd), 2 * (m as usize + 1));
        }
        let report = verify_filtration_products(&alg, &filt);
        assert!(report.passed(), "{report}");
    }

    #[test]
    fn koszul_sign_in_products_with_odd_coefficients() {
        use crate::superpoly::VarId;
        let alg = matrix_laurent(2, 1, 2);
        // (1·ς)(θ·σ) with ς odd: the coefficient θ moves past ς.
        let odd = SignedIdx::plus(Parity::Odd, 1); // E12⊗1
        let odd2 = SignedIdx::plus(Parity::Odd, 2); // E21⊗1
        let theta = SuperPoly::var(VarId::new(Parity::Odd, 1));
        let x = PolElement::symbol(odd);
        let y = PolElement::from_coords([(odd2, theta.clone())]);
        let xy = alg.mul(&x, &y).unwrap();
        // ς·σ = E11⊗1 = ς_{0,1}; sign −1 from moving θ past the odd ς.
        let expected = PolElement::from_coords([(
            SignedIdx::plus(Parity::Even, 1),
            -&theta,
        )]);
        assert_eq!(xy, expected);
    }

    #[test]
    fn incomplete_products_are_reported_not_guessed() {
        let alg = laurent(3);
        let x = PolElement::symbol(sym(3)); // t²
        let err = alg.mul(&x, &x).unwrap_err();
        assert!(matches!(err, PolarizedError::IncompleteProduct(_, _)));
    }
}
