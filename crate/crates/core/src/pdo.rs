//! Pseudo-differential operators over a graded algebra, and Hamiltonian
//! superpairs in formal variational calculus.
//!
//! Coefficients live in the free module `Â = 𝒫·{basis of 𝒜}` where `𝒫` is
//! the ring of supercommutative polynomials in jet variables
//! `u^{(m)}_{i,(j₁,j₂)}`: one dependent variable per *slot* `(j₁, j₂)` —
//! basis element `j₁` of the algebra at power `∂^{j₂}` — differentiated `m`
//! times.  An operator is a finitely-supported sum `Σ φ_l ∂^l` in left
//! normal form with the composition rule
//!
//! ```text
//! (φ∂^m)(ψ∂^n) = Σ_{p≥0} C(m,p)·φψ^{(p)}·∂^{m+n−p},
//! ```
//!
//! `C(m,p)` the (falling-factorial) binomial, `ψ^{(p)}` the p-th total
//! derivative.  For `m < 0` the series is infinite, so every [`Pdo`] carries
//! an optional *floor*: coefficients at orders `≤ floor` are unknown.  The
//! floor is bookkept honestly — reading a contaminated coefficient is an
//! error, never a silent zero.
//!
//! On top of the operator algebra the module builds the variational
//! machinery: the variational derivative `δ = Σ_m (−∂)^m ∘ ∂_{u^{(m)}}`,
//! which annihilates total derivatives; densities modulo total derivatives
//! ([`TildeDensity`]); the trace pairing `⟨a,b⟩ = Tr(res(ab))`; and the
//! differential `χ_f`, characterized by `⟨v, χ_f⟩ = ∂_v(f)` modulo total
//! derivatives.  A [`LaxPdo`]
//!
//! ```text
//! L = L₀ + Σ_slots u_slot·ς_{j₁}∂^{j₂},      L₀ = Σ_{m≤ι+1} σ_m∂^m,
//! ```
//!
//! with a central even `κ` carries the two Adler-type maps
//!
//! ```text
//! H₁(ϖ) = κ[L,ϖ]₋ + [(κϖ)₋, L],        H₂(ϖ) = (Lϖ)₋L − L(ϖL)₋,
//! ```
//!
//! whose pencil of brackets `{f,g}_λ = ⟨(λH₁+H₂)(χ_f), χ_g⟩` is skew and
//! satisfies the super Jacobi identity in `𝒫̃ = 𝒫/∂𝒫`
//! ([`verify_hamiltonian_superpair`]).  When `L₀ = ∂^{ι+1}` is monic the
//! fractional root `L^{1/(ι+1)} = ∂ + Σ f_m∂^{−m}` exists
//! ([`LaxPdo::root`]) and yields the integrable hierarchy: flows
//! `dL/dt_m = [L, B_m]` with `B_m = (L^{m/(ι+1)})₊`, conserved densities
//! `Tr(res(L^{n/(ι+1)}))`, and zero curvature
//! `dB_m/dt_n − dB_n/dt_m = [B_m,B_n]`.

use crate::check::CheckReport;
use crate::graded::{AlgElement, AlgebraError, GradedAlgebra};
use crate::parity::{koszul_sign, Parity};
use crate::poisson::SuperpairConfig;
use crate::rat::{rat, Rat};
use crate::sample::{self, SampleRng};
use crate::superpoly::{SuperPoly, VarId};
use num::{BigInt, One, Zero};
use rand::Rng;
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

/// Half the stride of the slot→variable packing; slot orders must satisfy
/// `|order| < ORDER_BIAS`.
pub const ORDER_BIAS: i64 = 1_000_000;

/// A dependent-variable slot: the coefficient of `∂^{order}` on algebra
/// basis element `basis`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Slot {
    pub basis: usize,
    pub order: i32,
}

impl Slot {
    pub fn new(basis: usize, order: i32) -> Self {
        assert!(
            (order.unsigned_abs() as i64) < ORDER_BIAS,
            "slot order out of packable range"
        );
        Slot { basis, order }
    }

    /// The polynomial variable carrying this slot's dependent function; its
    /// parity is the parity of the basis element.
    pub fn var(self, parity: Parity) -> VarId {
        VarId::new(
            parity,
            self.basis as i64 * 2 * ORDER_BIAS + (self.order as i64 + ORDER_BIAS),
        )
    }
}

#[derive(Debug, Error)]
pub enum PdoError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("∂^{order} against a nonconstant coefficient generates an infinite series; a floor is required")]
    NeedsFloor { order: i32 },
    #[error("coefficient at order {order} lies at or below the floor {floor}; deepen the computation")]
    FloorContamination { order: i32, floor: i32 },
    #[error("operator is not monic: expected identity coefficient at order {expected}, found {found}")]
    NotMonic { expected: i32, found: String },
    #[error("inconsistent data: {0}")]
    Shape(String),
}

/// The variational derivative `δ(f) = Σ_m (−1)^m·D^m(∂f/∂u^{(m)})` with
/// respect to the dependent variable whose jet-0 id is `base`.
///
/// # Example
/// ```
/// use superpair_core::pdo::variational_derivative;
/// use superpair_core::rat::rat;
/// use superpair_core::{Parity, SuperPoly, VarId};
/// let u = VarId::new(Parity::Even, 7);
/// let f = &(&SuperPoly::var(u) * &SuperPoly::var(u)) * &SuperPoly::var(u);
/// let three_u_sq = (&SuperPoly::var(u) * &SuperPoly::var(u)).scale(&rat(3));
/// assert_eq!(variational_derivative(&f, u), three_u_sq);
/// ```
pub fn variational_derivative(f: &SuperPoly, base: VarId) -> SuperPoly {
    let max_jet = f
        .vars()
        .into_iter()
        .filter(|v| v.parity == base.parity && v.index == base.index)
        .map(|v| v.jet)
        .max();
    let Some(max_jet) = max_jet else {
        return SuperPoly::zero();
    };
    let mut out = SuperPoly::zero();
    for m in 0..=max_jet {
        let d = f.derive(VarId::with_jet(base.parity, base.index, m));
        if d.is_zero() {
            continue;
        }
        let t = d.nth_total_derivative(m);
        out = if m % 2 == 1 { &out - &t } else { &out + &t };
    }
    out
}

/// The prolonged evolutionary derivative with characteristic `rhs`:
/// `f ↦ Σ_v Σ_m D^m(rhs_v)·∂f/∂v^{(m)}`, the derivative of `f` along the
/// flow `dv/dt = rhs_v`.
pub fn evolutionary_derivative(rhs: &BTreeMap<VarId, SuperPoly>, f: &SuperPoly) -> SuperPoly {
    let mut out = SuperPoly::zero();
    for (base, r) in rhs {
        if r.is_zero() {
            continue;
        }
        let max_jet = f
            .vars()
            .into_iter()
            .filter(|v| v.parity == base.parity && v.index == base.index)
            .map(|v| v.jet)
            .max();
        let Some(max_jet) = max_jet else { continue };
        for m in 0..=max_jet {
            let d = f.derive(VarId::with_jet(base.parity, base.index, m));
            if !d.is_zero() {
                out = &out + &(&r.nth_total_derivative(m) * &d);
            }
        }
    }
    out
}

/// A density considered modulo total derivatives.  Triviality is decided by
/// the variational derivatives: a density is a total derivative exactly when
/// every `δ` of it vanishes and it has no constant term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TildeDensity {
    density: SuperPoly,
}

impl TildeDensity {
    pub fn new(density: SuperPoly) -> Self {
        TildeDensity { density }
    }

    /// A representative in the polynomial ring.
    pub fn density(&self) -> &SuperPoly {
        &self.density
    }

    /// Whether the class is zero, i.e. the representative is a total
    /// derivative.
    pub fn is_trivial(&self) -> bool {
        if !self.density.constant_term().is_zero() {
            return false;
        }
        let bases: BTreeSet<VarId> = self
            .density
            .vars()
            .into_iter()
            .map(|v| VarId::new(v.parity, v.index))
            .collect();
        bases
            .into_iter()
            .all(|b| variational_derivative(&self.density, b).is_zero())
    }
}

fn merge_floor(a: Option<i32>, b: Option<i32>) -> Option<i32> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.max(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

/// The generalized binomial `C(m,p) = m(m−1)⋯(m−p+1)/p!` for integer `m` of
/// either sign.
fn binom(m: i32, p: u32) -> Rat {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for t in 0..p {
        num *= BigInt::from(m as i64 - t as i64);
        den *= BigInt::from(t as i64 + 1);
    }
    Rat::new(num, den)
}

/// A pseudo-differential operator `Σ φ_l·∂^l` in left normal form, with
/// coefficients in the polynomial module over a graded algebra.
///
/// `floor == Some(F)` means coefficients at orders `≤ F` are unknown
/// (truncated); `floor == None` means the operator is exact.  All stored
/// terms lie strictly above the floor and are exact.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Pdo {
    terms: BTreeMap<i32, AlgElement>,
    floor: Option<i32>,
}

impl Pdo {
    pub fn zero() -> Self {
        Pdo::default()
    }

    /// `φ·∂^order` for a single coefficient.
    pub fn term(coeff: AlgElement, order: i32) -> Self {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(order, coeff);
        }
        Pdo { terms, floor: None }
    }

    /// `∂^m` with the identity coefficient.
    ///
    /// # Errors
    /// When the algebra declares no identity element.
    pub fn d(alg: &GradedAlgebra, m: i32) -> Result<Self, PdoError> {
        Ok(Pdo::term(alg.identity_element()?, m))
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (i32, AlgElement)>) -> Self {
        let mut out = Pdo::zero();
        for (order, coeff) in terms {
            out.add_term(order, &coeff);
        }
        out
    }

    pub fn floor(&self) -> Option<i32> {
        self.floor
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The highest order with a nonzero coefficient.
    pub fn top(&self) -> Option<i32> {
        self.terms.keys().next_back().copied()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, &AlgElement)> {
        self.terms.iter().map(|(&o, c)| (o, c))
    }

    /// The stored coefficient of `∂^{order}` (zero when absent).  The value
    /// is only meaningful above the floor; [`Pdo::coeff_exact`] checks.
    pub fn coeff(&self, order: i32) -> AlgElement {
        self.terms.get(&order).cloned().unwrap_or_else(AlgElement::zero)
    }

    /// # Errors
    /// [`PdoError::FloorContamination`] when `order` is not above the floor.
    pub fn coeff_exact(&self, order: i32) -> Result<AlgElement, PdoError> {
        match self.floor {
            Some(f) if order <= f => Err(PdoError::FloorContamination { order, floor: f }),
            _ => Ok(self.coeff(order)),
        }
    }

    fn add_term(&mut self, order: i32, coeff: &AlgElement) {
        if coeff.is_zero() {
            return;
        }
        if let Some(f) = self.floor {
            if order <= f {
                return;
            }
        }
        let entry = self.terms.entry(order).or_insert_with(AlgElement::zero);
        *entry = entry.add_elem(coeff);
        if entry.is_zero() {
            self.terms.remove(&order);
        }
    }

    fn with_floor(mut self, floor: Option<i32>) -> Self {
        self.floor = floor;
        if let Some(f) = floor {
            self.terms.retain(|&o, _| o > f);
        }
        self
    }

    pub fn add(&self, other: &Pdo) -> Pdo {
        let mut out = self.clone().with_floor(merge_floor(self.floor, other.floor));
        for (&o, c) in &other.terms {
            out.add_term(o, c);
        }
        out
    }

    pub fn sub(&self, other: &Pdo) -> Pdo {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Pdo {
        self.map_coeffs(|c| c.neg_elem())
    }

    pub fn scale(&self, c: &Rat) -> Pdo {
        self.map_coeffs(|x| x.scale(c))
    }

    /// Applies a linear map to every coefficient (floor preserved).
    pub fn map_coeffs(&self, mut f: impl FnMut(&AlgElement) -> AlgElement) -> Pdo {
        let mut out = Pdo::zero().with_floor(self.floor);
        for (&o, c) in &self.terms {
            out.add_term(o, &f(c));
        }
        out
    }

    /// The coefficient-wise total derivative `∂(Σφ_l∂^l) = Σφ_l′∂^l`.
    pub fn total_derivative(&self) -> Pdo {
        self.map_coeffs(|c| c.map_coords(|p| p.total_derivative()))
    }

    /// The differential-operator part `Σ_{l≥0} φ_l∂^l`.  Exact whenever the
    /// floor is negative, because the discarded tail is then fully known to
    /// be below order 0.
    pub fn plus_part(&self) -> Pdo {
        let floor = match self.floor {
            Some(f) if f >= 0 => Some(f),
            _ => None,
        };
        let mut out = Pdo::zero().with_floor(floor);
        for (&o, c) in self.terms.range(0..) {
            out.add_term(o, c);
        }
        out
    }

    /// The integral part `Σ_{l<0} φ_l∂^l` (keeps the floor).
    pub fn minus_part(&self) -> Pdo {
        let mut out = Pdo::zero().with_floor(self.floor);
        for (&o, c) in self.terms.range(..0) {
            out.add_term(o, c);
        }
        out
    }

    /// The coefficient of `∂^{−1}`.
    ///
    /// # Errors
    /// [`PdoError::FloorContamination`] when the floor reaches order −1.
    pub fn residue(&self) -> Result<AlgElement, PdoError> {
        self.coeff_exact(-1)
    }

    /// Total parity of all terms, `None` when mixed; the zero operator
    /// counts as even.
    pub fn parity(&self, alg: &GradedAlgebra) -> Option<Parity> {
        let mut seen: Option<Parity> = None;
        for c in self.terms.values() {
            match (seen, c.parity(alg)?) {
                (None, p) => seen = Some(p),
                (Some(q), p) if q != p => return None,
                _ => {}
            }
        }
        Some(seen.unwrap_or(Parity::Even))
    }

    /// Composition, truncated to the requested floor.  The result floor is
    /// the maximum of the request and the exactness limit inherited from the
    /// factors' floors; when every series terminates and both factors are
    /// exact, the result is exact.
    ///
    /// # Errors
    /// [`PdoError::NeedsFloor`] when a negative-order term meets a
    /// nonconstant coefficient (an infinite series) and no floor was given.
    pub fn mul_to(
        &self,
        other: &Pdo,
        alg: &GradedAlgebra,
        floor: Option<i32>,
    ) -> Result<Pdo, PdoError> {
        // Orders at which the unknown tails of either factor could
        // contribute: unknown(a)·known(b) reaches fa + top(b), and so on.
        let mut exact_limit: Option<i32> = None;
        if let (Some(fa), Some(tb)) = (self.floor, other.top()) {
            exact_limit = merge_floor(exact_limit, Some(fa + tb));
        }
        if let (Some(fb), Some(ta)) = (other.floor, self.top()) {
            exact_limit = merge_floor(exact_limit, Some(fb + ta));
        }
        if let (Some(fa), Some(fb)) = (self.floor, other.floor) {
            exact_limit = merge_floor(exact_limit, Some(fa + fb));
        }
        let cut = merge_floor(floor, exact_limit);

        let mut out = Pdo::zero();
        let mut truncated = false;
        for (&m, x) in &self.terms {
            for (&n, y0) in &other.terms {
                let mut y = y0.clone();
                let mut p: u32 = 0;
                loop {
                    if m >= 0 && (p as i32) > m {
                        break;
                    }
                    if y.is_zero() {
                        break;
                    }
                    let order = m + n - p as i32;
                    if let Some(c) = cut {
                        if order <= c {
                            truncated = true;
                            break;
                        }
                    }
                    let b = binom(m, p);
                    if !b.is_zero() {
                        out.add_term(order, &alg.mul(x, &y).scale(&b));
                    }
                    p += 1;
                    y = y.map_coords(|q| q.total_derivative());
                    if cut.is_none() && m < 0 && !y.is_zero() {
                        return Err(PdoError::NeedsFloor { order: m });
                    }
                }
            }
        }
        let result_floor = if truncated { cut } else { exact_limit };
        Ok(out.with_floor(result_floor))
    }

    /// Graded commutator `[a,b] = ab − (−1)^{|a||b|}ba`.
    ///
    /// # Errors
    /// [`PdoError::Shape`] when either operator has mixed parity.
    pub fn commutator_to(
        &self,
        other: &Pdo,
        alg: &GradedAlgebra,
        floor: Option<i32>,
    ) -> Result<Pdo, PdoError> {
        let pa = self
            .parity(alg)
            .ok_or_else(|| PdoError::Shape("commutator of a mixed-parity operator".into()))?;
        let pb = other
            .parity(alg)
            .ok_or_else(|| PdoError::Shape("commutator of a mixed-parity operator".into()))?;
        let ab = self.mul_to(other, alg, floor)?;
        let ba = other.mul_to(self, alg, floor)?;
        Ok(if koszul_sign(pa, pb) < 0 {
            ab.add(&ba)
        } else {
            ab.sub(&ba)
        })
    }

    /// `self^n`, truncated to the floor.
    pub fn pow_to(&self, n: u32, alg: &GradedAlgebra, floor: Option<i32>) -> Result<Pdo, PdoError> {
        let mut out = Pdo::d(alg, 0)?;
        for _ in 0..n {
            out = out.mul_to(self, alg, floor)?;
        }
        Ok(out)
    }

    /// The extended supertrace `Tr(Σφ_l∂^l) = str(φ_{−1})`.
    pub fn residue_trace(&self, alg: &GradedAlgebra) -> Result<SuperPoly, PdoError> {
        Ok(alg.supertrace(&self.residue()?)?)
    }

    /// Human-readable rendering for witnesses.
    pub fn display(&self, alg: &GradedAlgebra) -> String {
        let mut parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|(&o, c)| format!("({})·∂^{o}", c.display(alg)))
            .collect();
        if parts.is_empty() {
            parts.push("0".to_string());
        }
        let mut s = parts.join(" + ");
        if let Some(f) = self.floor {
            s.push_str(&format!("  [floor {f}]"));
        }
        s
    }
}

/// The trace pairing `⟨a,b⟩ = Tr(res(a·b))`, a density modulo total
/// derivatives.  It is supersymmetric and associative in `𝒫̃`.
///
/// # Errors
/// Floor errors when the product's residue is not exactly representable.
pub fn trace_pairing(
    a: &Pdo,
    b: &Pdo,
    alg: &GradedAlgebra,
) -> Result<TildeDensity, PdoError> {
    let prod = a.mul_to(b, alg, Some(-2))?;
    Ok(TildeDensity::new(prod.residue_trace(alg)?))
}

/// A Lax operator shape: constant part `L₀` of orders `≤ ι+1`, a central
/// even `κ`, and the slot pattern carrying one dependent variable each.
///
/// Two pattern regimes exist.  [`LaxPdo::new`] takes an explicit finite
/// slot list and treats the Lax operator as *exact* — the constrained shape
/// used for hierarchies (flows must then stay on the pattern).
/// [`LaxPdo::full_pattern`] is the unconstrained shape the Hamiltonian
/// pencil identities hold on, where every basis element carries a
/// variable at *every* order `≤ ι`: the infinite tail is materialized down
/// to a chosen depth and the Lax operator carries a floor just below it, so
/// bracket computations are exactly those of the infinite pattern whenever
/// the tracked windows close (and fail loudly otherwise).
#[derive(Debug, Clone)]
pub struct LaxPdo {
    alg: GradedAlgebra,
    iota: i32,
    l0: Pdo,
    kappa: AlgElement,
    pattern: Vec<Slot>,
    lax_floor: Option<i32>,
    work_floor: i32,
}

impl LaxPdo {
    /// A constrained Lax shape with exactly the given slots.
    ///
    /// Validates shapes: `L₀` constant even with orders `≤ ι+1`, `κ`
    /// constant even, pattern slots distinct with orders `≤ ι` and basis
    /// indices in range.  Centrality of `κ` is a reported check
    /// ([`verify_hamiltonian_superpair`]), not a constructor error.
    pub fn new(
        alg: GradedAlgebra,
        iota: i32,
        l0: Pdo,
        kappa: AlgElement,
        pattern: Vec<Slot>,
    ) -> Result<Self, PdoError> {
        if iota < 0 {
            return Err(PdoError::Shape(format!("ι = {iota} must be ≥ 0")));
        }
        if l0.floor().is_some() {
            return Err(PdoError::Shape("L₀ must be exact (no floor)".into()));
        }
        for (order, coeff) in l0.terms() {
            if order > iota + 1 {
                return Err(PdoError::Shape(format!(
                    "L₀ has a term at order {order} > ι+1 = {}",
                    iota + 1
                )));
            }
            for (b, p) in coeff.coords() {
                if p.degree() != Some(0) {
                    return Err(PdoError::Shape(format!(
                        "L₀ must have constant coefficients, found {p} on {}",
                        alg.label(b)
                    )));
                }
            }
            if coeff.parity(&alg) != Some(Parity::Even) {
                return Err(PdoError::Shape(format!(
                    "L₀ coefficient at order {order} is not even"
                )));
            }
        }
        for (b, p) in kappa.coords() {
            if p.degree() != Some(0) {
                return Err(PdoError::Shape(format!(
                    "κ must be constant, found {p} on {}",
                    alg.label(b)
                )));
            }
        }
        if !kappa.is_zero() && kappa.parity(&alg) != Some(Parity::Even) {
            return Err(PdoError::Shape("κ must be even".into()));
        }
        let mut seen = BTreeSet::new();
        let mut min_order = 0i32;
        for s in &pattern {
            if s.basis >= alg.dim() {
                return Err(PdoError::Shape(format!(
                    "slot basis {} out of range (dim {})",
                    s.basis,
                    alg.dim()
                )));
            }
            if s.order > iota {
                return Err(PdoError::Shape(format!(
                    "slot order {} exceeds ι = {iota}",
                    s.order
                )));
            }
            if (s.order.unsigned_abs() as i64) >= ORDER_BIAS {
                return Err(PdoError::Shape(format!("slot order {} unpackable", s.order)));
            }
            if !seen.insert(*s) {
                return Err(PdoError::Shape(format!(
                    "duplicate slot ({}, {})",
                    s.basis, s.order
                )));
            }
            min_order = min_order.min(s.order);
        }
        // Deep enough that every residue read downstream stays exact; the
        // hierarchy and bracket routines surface floor errors if not.
        let work_floor = min_order - 3 * (iota + 1) - 8;
        Ok(LaxPdo {
            alg,
            iota,
            l0,
            kappa,
            pattern,
            lax_floor: None,
            work_floor,
        })
    }

    /// The unconstrained Lax shape: one variable for every basis element at
    /// every order in `−depth..=ι`, with the operator floored at
    /// `−depth−1` to stand in for the tail of the full pattern.
    pub fn full_pattern(
        alg: GradedAlgebra,
        iota: i32,
        l0: Pdo,
        kappa: AlgElement,
        depth: u32,
    ) -> Result<Self, PdoError> {
        let mut pattern = Vec::new();
        for basis in 0..alg.dim() {
            for order in -(depth as i32)..=iota {
                pattern.push(Slot::new(basis, order));
            }
        }
        let mut lax = Self::new(alg, iota, l0, kappa, pattern)?;
        lax.lax_floor = Some(-(depth as i32) - 1);
        Ok(lax)
    }

    pub fn algebra(&self) -> &GradedAlgebra {
        &self.alg
    }

    pub fn iota(&self) -> i32 {
        self.iota
    }

    pub fn kappa(&self) -> &AlgElement {
        &self.kappa
    }

    pub fn pattern(&self) -> &[Slot] {
        &self.pattern
    }

    /// The truncation depth used by products; overridable for deeper runs.
    pub fn work_floor(&self) -> i32 {
        self.work_floor
    }

    pub fn with_work_floor(mut self, floor: i32) -> Self {
        self.work_floor = floor.min(-2);
        self
    }

    pub fn slot_parity(&self, s: Slot) -> Parity {
        self.alg.parity(s.basis)
    }

    /// The jet-0 variable of a slot.
    pub fn slot_var(&self, s: Slot) -> VarId {
        s.var(self.slot_parity(s))
    }

    /// All dependent variables of the pattern, in slot order.
    pub fn vars(&self) -> Vec<VarId> {
        self.pattern.iter().map(|&s| self.slot_var(s)).collect()
    }

    /// `L = L₀ + Σ_slots u_slot·ς_{basis}∂^{order}`; exact for an explicit
    /// pattern, floored below the materialized depth for the full pattern.
    pub fn lax(&self) -> Pdo {
        let mut l = self.l0.clone();
        for &s in &self.pattern {
            let coeff = AlgElement::from_coords([(s.basis, SuperPoly::var(self.slot_var(s)))]);
            l = l.add(&Pdo::term(coeff, s.order));
        }
        l.with_floor(self.lax_floor)
    }

    /// The differential `χ_f = Σ_slots ±∂^{−order−1}∘(δ_slot(f)·ς*_{basis})`
    /// with the dual basis `ς*` and sign `(−1)^{i(1+p)}` for `f` of parity
    /// `p` and slot parity `i`.  It represents `df`: for every operator `v`
    /// matching the pattern, `⟨v, χ_f⟩ = ∂_v(f)` modulo total derivatives,
    /// and `χ` kills total derivatives.
    ///
    /// # Errors
    /// [`PdoError::Shape`] when `f` is not parity-homogeneous.
    pub fn chi(&self, f: &SuperPoly) -> Result<Pdo, PdoError> {
        if f.is_zero() {
            return Ok(Pdo::zero());
        }
        let p = f
            .parity()
            .ok_or_else(|| PdoError::Shape("χ needs a parity-homogeneous density".into()))?;
        let duals = self.alg.dual_basis()?;
        let mut out = Pdo::zero();
        for &s in &self.pattern {
            let delta = variational_derivative(f, self.slot_var(s));
            if delta.is_zero() {
                continue;
            }
            let coeff = duals[s.basis].mul_poly_left(&delta);
            let term = Pdo::d(&self.alg, -s.order - 1)?.mul_to(
                &Pdo::term(coeff, 0),
                &self.alg,
                Some(self.work_floor),
            )?;
            let i = self.slot_parity(s);
            let signed = if koszul_sign(i, p.flip()) < 0 {
                term.neg()
            } else {
                term
            };
            out = out.add(&signed);
        }
        Ok(out)
    }

    /// The directional derivative `∂_v(f)` along an operator `v` whose
    /// pattern-slot coefficients act as the characteristic of an
    /// evolutionary vector field; off-pattern components of `v` act
    /// trivially.
    pub fn directional(&self, v: &Pdo, f: &SuperPoly) -> SuperPoly {
        let mut rhs = BTreeMap::new();
        for &s in &self.pattern {
            let a = v.coeff(s.order).coord(s.basis);
            if !a.is_zero() {
                rhs.insert(self.slot_var(s), a);
            }
        }
        evolutionary_derivative(&rhs, f)
    }

    /// `H₁(ϖ) = κ[L,ϖ]₋ + [(κϖ)₋, L]`.
    pub fn h1(&self, v: &Pdo) -> Result<Pdo, PdoError> {
        let w = Some(self.work_floor);
        let l = self.lax();
        let kap = Pdo::term(self.kappa.clone(), 0);
        // L is even, so both commutators are plain.
        let com = l.mul_to(v, &self.alg, w)?.sub(&v.mul_to(&l, &self.alg, w)?);
        let t1 = kap.mul_to(&com.minus_part(), &self.alg, w)?;
        let kv = kap.mul_to(v, &self.alg, w)?.minus_part();
        let t2 = kv.mul_to(&l, &self.alg, w)?.sub(&l.mul_to(&kv, &self.alg, w)?);
        Ok(t1.add(&t2))
    }

    /// `H₂(ϖ) = (Lϖ)₋L − L(ϖL)₋`; [`AdlerVariant::MinusPlus`] flips the
    /// second projection as a negative control.
    pub fn h2(&self, v: &Pdo, variant: crate::poisson::AdlerVariant) -> Result<Pdo, PdoError> {
        let w = Some(self.work_floor);
        let l = self.lax();
        let lv = l.mul_to(v, &self.alg, w)?;
        let vl = v.mul_to(&l, &self.alg, w)?;
        let first = lv.minus_part().mul_to(&l, &self.alg, w)?;
        let proj = match variant {
            crate::poisson::AdlerVariant::MinusMinus => vl.minus_part(),
            crate::poisson::AdlerVariant::MinusPlus => vl.plus_part(),
        };
        let second = l.mul_to(&proj, &self.alg, w)?;
        Ok(first.sub(&second))
    }

    /// The pencil bracket `{f,g}_λ = ⟨(λH₁+H₂)(χ_f), χ_g⟩` as a density
    /// class.
    pub fn bracket(
        &self,
        lambda: &Rat,
        f: &SuperPoly,
        g: &SuperPoly,
        variant: crate::poisson::AdlerVariant,
    ) -> Result<TildeDensity, PdoError> {
        let cf = self.chi(f)?;
        let cg = self.chi(g)?;
        let mut h = self.h2(&cf, variant)?;
        if !lambda.is_zero() {
            h = h.add(&self.h1(&cf)?.scale(lambda));
        }
        trace_pairing(&h, &cg, &self.alg)
    }

    /// The fractional root `R = ∂ + Σ_{m≥0} f_m∂^{−m}` with
    /// `R^{ι+1} = L`, solved order by order down to the requested floor.
    ///
    /// # Errors
    /// [`PdoError::NotMonic`] unless the top of `L` is exactly `1·∂^{ι+1}`.
    pub fn root(&self, floor: i32) -> Result<Pdo, PdoError> {
        let l = self.lax();
        let n = self.iota + 1;
        let identity = self.alg.identity_element()?;
        if l.top() != Some(n) || l.coeff(n) != identity {
            return Err(PdoError::NotMonic {
                expected: n,
                found: l.coeff(n).display(&self.alg),
            });
        }
        let defect_floor = Some(floor + self.iota);
        let mut r = Pdo::d(&self.alg, 1)?.with_floor(Some(floor));
        loop {
            let defect = l.sub(&r.pow_to(n as u32, &self.alg, defect_floor)?);
            let Some(top) = defect.top() else {
                return Ok(r);
            };
            let j = top - self.iota;
            if j <= floor {
                return Ok(r);
            }
            // The ansatz keeps non-∂ orders ≤ 0, so the top defect order is
            // produced only by the (ι+1)-fold linear term.
            let coeff = defect.coeff(top).scale(&Rat::new(BigInt::one(), BigInt::from(n)));
            r = r.add(&Pdo::term(coeff, j));
            let new_top = l
                .sub(&r.pow_to(n as u32, &self.alg, defect_floor)?)
                .top();
            if new_top.is_some_and(|t| t >= top) {
                return Err(PdoError::Shape(format!(
                    "root iteration stalled at order {top}"
                )));
            }
        }
    }

    /// `B_m = (L^{m/(ι+1)})₊`, a differential operator (exact).
    pub fn b_op(&self, m: u32) -> Result<Pdo, PdoError> {
        let r = self.root(self.work_floor)?;
        let pw = r.pow_to(m, &self.alg, Some(self.work_floor))?;
        let b = pw.plus_part();
        debug_assert!(b.floor().is_none());
        Ok(b)
    }

    /// The right-hand sides of the flow `dL/dt_m = [L, B_m]`, keyed by the
    /// slot variables of the pattern.
    ///
    /// # Errors
    /// [`PdoError::Shape`] with a witness when the commutator has a nonzero
    /// component off the variable pattern — the consistency condition for
    /// constrained Lax shapes.
    pub fn lax_rhs(&self, m: u32) -> Result<BTreeMap<VarId, SuperPoly>, PdoError> {
        let w = Some(self.work_floor);
        let b = self.b_op(m)?;
        let l = self.lax();
        let com = l.mul_to(&b, &self.alg, w)?.sub(&b.mul_to(&l, &self.alg, w)?);
        let on_pattern: BTreeSet<Slot> = self.pattern.iter().copied().collect();
        let mut rhs: BTreeMap<VarId, SuperPoly> =
            self.pattern.iter().map(|&s| (self.slot_var(s), SuperPoly::zero())).collect();
        for (order, coeff) in com.terms() {
            for (basis, poly) in coeff.coords() {
                let slot = Slot::new(basis, order);
                if on_pattern.contains(&slot) {
                    rhs.insert(self.slot_var(slot), poly.clone());
                } else {
                    return Err(PdoError::Shape(format!(
                        "flow {m} leaves the variable pattern: [L,B_{m}] has \
                         ({})·∂^{order} with coefficient {poly}",
                        self.alg.label(basis)
                    )));
                }
            }
        }
        Ok(rhs)
    }

    /// The conserved density `Tr(res(L^{n/(ι+1)}))`.
    pub fn conserved_density(&self, n: u32) -> Result<TildeDensity, PdoError> {
        let r = self.root(self.work_floor)?;
        let pw = r.pow_to(n, &self.alg, Some(self.work_floor))?;
        Ok(TildeDensity::new(pw.residue_trace(&self.alg)?))
    }

    /// Checks that each `Tr(res(L^{n/(ι+1)}))` is conserved along flow `m`:
    /// its evolutionary derivative is a total derivative.
    pub fn conservation_check(&self, m: u32, ns: &[u32]) -> CheckReport {
        let mut report = CheckReport::new();
        let rhs = match self.lax_rhs(m) {
            Ok(r) => r,
            Err(e) => {
                report.fail(format!("flow-{m}"), e.to_string());
                return report;
            }
        };
        for &n in ns {
            let name = format!("conserved({m},{n})");
            match self.conserved_density(n) {
                Ok(dens) => {
                    let ddt = evolutionary_derivative(&rhs, dens.density());
                    report.require(name, TildeDensity::new(ddt.clone()).is_trivial(), || {
                        format!("d/dt of density {} is {ddt}, not a total derivative", dens.density())
                    });
                }
                Err(e) => report.fail(name, e.to_string()),
            }
        }
        report
    }

    /// `dB_m/dt_n − dB_n/dt_m − [B_m, B_n]`, computed with the honest
    /// time-derivatives (evolutionary derivatives along the flows) — an
    /// exact differential operator that must vanish.
    pub fn zero_curvature_residual(&self, m: u32, n: u32) -> Result<Pdo, PdoError> {
        let bm = self.b_op(m)?;
        let bn = self.b_op(n)?;
        let rhs_m = self.lax_rhs(m)?;
        let rhs_n = self.lax_rhs(n)?;
        let dbm = bm.map_coeffs(|c| c.map_coords(|p| evolutionary_derivative(&rhs_n, p)));
        let dbn = bn.map_coeffs(|c| c.map_coords(|p| evolutionary_derivative(&rhs_m, p)));
        // B-operators are even and exact; the commutator is a finite sum.
        let com = bm.mul_to(&bn, &self.alg, None)?.sub(&bn.mul_to(&bm, &self.alg, None)?);
        Ok(dbm.sub(&dbn).sub(&com))
    }
}

/// Samples a parity-homogeneous polynomial in the given variables.
fn sample_density(
    rng: &mut SampleRng,
    vars: &[VarId],
    max_degree: u32,
) -> (SuperPoly, Parity) {
    let want_odd = rng.gen_bool(0.5);
    for parity in [Parity::from_odd(want_odd), Parity::from_odd(!want_odd)] {
        if let Some(p) = sample::homogeneous_poly(rng, vars, max_degree, parity) {
            return (p, parity);
        }
    }
    (SuperPoly::one(), Parity::Even)
}

/// Verifies the Hamiltonian-superpair axioms for the pencil
/// `λH₁ + H₂` at each `λ`, on seeded parity-homogeneous densities:
/// skewness `{f,g} + (−1)^{|f||g|}{g,f} ∈ ∂𝒫` and the super Jacobi identity
/// `(−1)^{|f||h|}{f,{g,h}} + (−1)^{|g||f|}{g,{h,f}} + (−1)^{|h||g|}{h,{f,g}}
/// ∈ ∂𝒫`, with nested brackets taken through representatives (well-defined
/// because `χ` kills total derivatives).  Also reports centrality of `κ`.
///
/// Sampled densities draw on the slots of order `≥ −1` (jets `≤ 1`); the
/// deeper slots still participate through the Lax operator.  Keeping the
/// sampled support shallow relative to the materialized depth is what lets
/// every nested bracket stay exactly representable.
pub fn verify_hamiltonian_superpair(
    lax: &LaxPdo,
    lambdas: &[Rat],
    cfg: &SuperpairConfig,
) -> CheckReport {
    let mut report = CheckReport::new();
    match lax.algebra().centrality_witness(lax.kappa()) {
        None => report.pass("kappa-central"),
        Some(w) => report.fail("kappa-central", w),
    }

    let mut vars: Vec<VarId> = lax
        .pattern()
        .iter()
        .filter(|s| s.order >= -1)
        .map(|&s| lax.slot_var(s))
        .collect();
    let raised: Vec<VarId> = vars.iter().map(|v| v.raised()).collect();
    vars.extend(raised);
    let mut rng = sample::rng(cfg.seed);

    for lambda in lambdas {
        let tag = format!("λ={}", crate::rat::format_rat(lambda));
        let b = |f: &SuperPoly, g: &SuperPoly| lax.bracket(lambda, f, g, cfg.variant);

        let mut witnesses = Vec::new();
        for _ in 0..cfg.triples {
            let (f, pf) = sample_density(&mut rng, &vars, cfg.max_degree);
            let (g, pg) = sample_density(&mut rng, &vars, cfg.max_degree);
            match (b(&f, &g), b(&g, &f)) {
                (Ok(fg), Ok(gf)) => {
                    let residual = if koszul_sign(pf, pg) < 0 {
                        fg.density() - gf.density()
                    } else {
                        fg.density() + gf.density()
                    };
                    if !TildeDensity::new(residual.clone()).is_trivial() && witnesses.len() < 2 {
                        witnesses.push(format!(
                            "f = {f}, g = {g}: skew residual {residual} is not a total derivative"
                        ));
                    }
                }
                (Err(e), _) | (_, Err(e)) => witnesses.push(format!("f = {f}, g = {g}: {e}")),
            }
        }
        report.require(format!("skew({tag})"), witnesses.is_empty(), || {
            witnesses.join("; ")
        });

        let mut witnesses = Vec::new();
        for _ in 0..cfg.triples {
            let (f, pf) = sample_density(&mut rng, &vars, cfg.max_degree);
            let (g, pg) = sample_density(&mut rng, &vars, cfg.max_degree);
            let (h, ph) = sample_density(&mut rng, &vars, cfg.max_degree);
            let jac = (|| -> Result<SuperPoly, PdoError> {
                let t1 = b(&f, b(&g, &h)?.density())?;
                let t2 = b(&g, b(&h, &f)?.density())?;
                let t3 = b(&h, b(&f, &g)?.density())?;
                let mut total = t1.density().scale(&rat(koszul_sign(pf, ph) as i64));
                total = &total + &t2.density().scale(&rat(koszul_sign(pg, pf) as i64));
                total = &total + &t3.density().scale(&rat(koszul_sign(ph, pg) as i64));
                Ok(total)
            })();
            match jac {
                Ok(j) => {
                    if !TildeDensity::new(j.clone()).is_trivial() && witnesses.len() < 2 {
                        witnesses.push(format!(
                            "f = {f}, g = {g}, h = {h}: Jacobi residual {j}"
                        ));
                    }
                }
                Err(e) => witnesses.push(format!("bracket failed: {e}")),
            }
        }
        report.require(format!("jacobi({tag})"), witnesses.is_empty(), || {
            witnesses.join("; ")
        });
    }
    report.flag(format!(
        "randomized checks: seed {}, {} triples per identity",
        cfg.seed, cfg.triples
    ));
    report
}

/// Checks associativity of the composition on seeded random operators,
/// exactly above the tracked floors.
pub fn composition_associativity_check(
    alg: &GradedAlgebra,
    seed: u64,
    triples: usize,
) -> CheckReport {
    let mut report = CheckReport::new();
    let mut rng = sample::rng(seed);
    let vars: Vec<VarId> = (0..alg.dim() * 2)
        .map(|k| Slot::new(k % alg.dim(), -((k / alg.dim()) as i32)))
        .map(|s| s.var(alg.parity(s.basis)))
        .collect();
    let sample_op = |rng: &mut SampleRng| -> Pdo {
        let mut out = Pdo::zero();
        for _ in 0..rng.gen_range(1..=3) {
            let order = rng.gen_range(-2..=2);
            let basis = rng.gen_range(0..alg.dim());
            let coeff =
                AlgElement::from_coords([(basis, sample::poly(rng, &vars, 2))]);
            out = out.add(&Pdo::term(coeff, order));
        }
        out
    };
    let floor = Some(-6);
    let mut witnesses = Vec::new();
    for _ in 0..triples {
        let a = sample_op(&mut rng);
        let b = sample_op(&mut rng);
        let c = sample_op(&mut rng);
        let check = (|| -> Result<Pdo, PdoError> {
            let left = a.mul_to(&b, alg, floor)?.mul_to(&c, alg, floor)?;
            let right = a.mul_to(&b.mul_to(&c, alg, floor)?, alg, floor)?;
            Ok(left.sub(&right))
        })();
        match check {
            Ok(diff) if diff.is_zero() => {}
            Ok(diff) => {
                if witnesses.len() < 2 {
                    witnesses.push(format!(
                        "(ab)c − a(bc) = {} for a = {}, b = {}, c = {}",
                        diff.display(alg),
                        a.display(alg),
                        b.display(alg),
                        c.display(alg)
                    ));
                }
            }
            Err(e) => witnesses.push(e.to_string()),
        }
    }
    report.require("composition-associativity", witnesses.is_empty(), || {
        witnesses.join("; ")
    });
    report.flag(format!("{triples} triples, seed {seed}"));
    report
}

/// Checks that every variational derivative annihilates total derivatives:
/// `δ(D(f)) = 0` exactly on seeded random polynomials.
pub fn variational_annihilation_check(seed: u64, samples: usize) -> CheckReport {
    let mut report = CheckReport::new();
    let mut rng = sample::rng(seed);
    let vars: Vec<VarId> = [
        Slot::new(0, 0).var(Parity::Even),
        Slot::new(0, -1).var(Parity::Even),
        Slot::new(1, 0).var(Parity::Odd),
        Slot::new(1, -1).var(Parity::Odd),
    ]
    .into_iter()
    .flat_map(|v| [v, v.raised()])
    .collect();
    let mut witnesses = Vec::new();
    for _ in 0..samples {
        let f = sample::poly(&mut rng, &vars, 3);
        let df = f.total_derivative();
        for v in &vars {
            let base = VarId::new(v.parity, v.index);
            let residual = variational_derivative(&df, base);
            if !residual.is_zero() && witnesses.len() < 2 {
                witnesses.push(format!("δ_{base}(D({f})) = {residual}"));
            }
        }
    }
    report.require("variational-annihilation", witnesses.is_empty(), || {
        witnesses.join("; ")
    });
    report.flag(format!("{samples} samples, seed {seed}"));
    report
}

/// Checks that the extended supertrace kills graded commutators modulo
/// total derivatives: `Tr(res([a,b])) ∈ ∂𝒫` on seeded homogeneous pairs.
pub fn commutator_trace_check(alg: &GradedAlgebra, seed: u64, pairs: usize) -> CheckReport {
    let mut report = CheckReport::new();
    let mut rng = sample::rng(seed);
    let vars: Vec<VarId> = (0..alg.dim())
        .map(|b| Slot::new(b, 0).var(alg.parity(b)))
        .collect();
    let sample_homogeneous = |rng: &mut SampleRng| -> Pdo {
        let target = Parity::from_odd(rng.gen_bool(0.5));
        let mut out = Pdo::zero();
        for _ in 0..rng.gen_range(1..=2) {
            let order = rng.gen_range(-2..=2);
            let basis = rng.gen_range(0..alg.dim());
            let coeff_parity = target + alg.parity(basis);
            let Some(poly) = sample::homogeneous_poly(rng, &vars, 2, coeff_parity) else {
                continue;
            };
            out = out.add(&Pdo::term(AlgElement::from_coords([(basis, poly)]), order));
        }
        out
    };
    let mut witnesses = Vec::new();
    let mut checked = 0usize;
    for _ in 0..pairs {
        let a = sample_homogeneous(&mut rng);
        let b = sample_homogeneous(&mut rng);
        let check = (|| -> Result<SuperPoly, PdoError> {
            let com = a.commutator_to(&b, alg, Some(-6))?;
            com.residue_trace(alg)
        })();
        match check {
            Ok(tr) => {
                checked += 1;
                if !TildeDensity::new(tr.clone()).is_trivial() && witnesses.len() < 2 {
                    witnesses.push(format!(
                        "Tr(res([a,b])) = {tr} for a = {}, b = {}",
                        a.display(alg),
                        b.display(alg)
                    ));
                }
            }
            Err(e) => witnesses.push(e.to_string()),
        }
    }
    report.require("commutator-trace", witnesses.is_empty(), || {
        witnesses.join("; ")
    });
    report.flag(format!("{checked} pairs checked, seed {seed}"));
    report
}

/// The scalar operator `L = ∂² + u` with its single dependent variable —
/// the smallest hierarchy fixture.
pub fn scalar_kdv_lax() -> LaxPdo {
    let alg = crate::graded::scalar_algebra();
    let l0 = Pdo::d(&alg, 2).expect("scalar algebra has an identity");
    let kappa = alg.identity_element().expect("scalar algebra has an identity");
    LaxPdo::new(alg, 1, l0, kappa, vec![Slot::new(0, 0)]).expect("valid fixture")
}

/// The scalar operator with the full variable pattern
/// `L = ∂² + Σ_{o≤1} u_o∂^o`, materialized to `depth` — the shape whose
/// Adler maps form a Hamiltonian superpair.
pub fn scalar_full_lax(depth: u32) -> LaxPdo {
    let alg = crate::graded::scalar_algebra();
    let l0 = Pdo::d(&alg, 2).expect("scalar algebra has an identity");
    let kappa = alg.identity_element().expect("scalar algebra has an identity");
    LaxPdo::full_pattern(alg, 1, l0, kappa, depth).expect("valid fixture")
}

/// The matrix-superalgebra fixture: `𝒜 = M_{2×2}` with one odd row/column
/// split, `ι = 0`, `L = ∂ + Σ_{b,o≤0} u_{b,o}·E_b∂^o` materialized to
/// `depth`, `κ = 1`.
pub fn matrix_lax(depth: u32) -> LaxPdo {
    let alg = crate::graded::matrix_superalgebra(2, 1);
    let l0 = Pdo::d(&alg, 1).expect("matrix algebra has an identity");
    let kappa = alg.identity_element().expect("matrix algebra has an identity");
    LaxPdo::full_pattern(alg, 0, l0, kappa, depth).expect("valid fixture")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded::{matrix_superalgebra, scalar_algebra};
    use crate::poisson::AdlerVariant;
    use crate::rat::ratio;

    fn u() -> VarId {
        Slot::new(0, 0).var(Parity::Even)
    }

    fn upoly(jet: u32) -> SuperPoly {
        SuperPoly::var(VarId::with_jet(Parity::Even, u().index, jet))
    }

    fn scalar_term(p: SuperPoly, order: i32) -> Pdo {
        Pdo::term(AlgElement::from_coords([(0, p)]), order)
    }

    #[test]
    fn composition_expands_the_negative_order_series() {
        // ∂^{−1}∘u = u∂^{−1} − u′∂^{−2} + u″∂^{−3} − … with the C(−1,p)
        // signs; ∂^{−2}∘u has the (p+1) pattern.
        let alg = scalar_algebra();
        let dinv = Pdo::d(&alg, -1).unwrap();
        let mu = scalar_term(upoly(0), 0);
        let prod = dinv.mul_to(&mu, &alg, Some(-5)).unwrap();
        for (order, expected) in [
            (-1, upoly(0)),
            (-2, -&upoly(1)),
            (-3, upoly(2)),
            (-4, -&upoly(3)),
        ] {
            assert_eq!(prod.coeff(order).coord(0), expected, "order {order}");
        }
        let dinv2 = Pdo::d(&alg, -2).unwrap();
        let prod2 = dinv2.mul_to(&mu, &alg, Some(-6)).unwrap();
        assert_eq!(prod2.coeff(-2).coord(0), upoly(0));
        assert_eq!(prod2.coeff(-3).coord(0), upoly(1).scale(&rat(-2)));
        assert_eq!(prod2.coeff(-4).coord(0), upoly(2).scale(&rat(3)));
    }

    #[test]
    fn infinite_series_without_a_floor_is_an_error() {
        let alg = scalar_algebra();
        let dinv = Pdo::d(&alg, -1).unwrap();
        let mu = scalar_term(upoly(0), 0);
        assert!(matches!(
            dinv.mul_to(&mu, &alg, None),
            Err(PdoError::NeedsFloor { .. })
        ));
        // A constant coefficient terminates the series: ∂^{−1}·c∂ = c∂⁰.
        let c = Pdo::d(&alg, 1).unwrap();
        let exact = dinv.mul_to(&c, &alg, None).unwrap();
        assert!(exact.floor().is_none());
        assert_eq!(exact.top(), Some(0));
    }

    #[test]
    fn residue_respects_the_floor() {
        let alg = scalar_algebra();
        let dinv = Pdo::d(&alg, -1).unwrap();
        let mu = scalar_term(upoly(0), 0);
        let shallow = dinv.mul_to(&mu, &alg, Some(-1)).unwrap();
        assert!(matches!(
            shallow.residue(),
            Err(PdoError::FloorContamination { .. })
        ));
        let deep = dinv.mul_to(&mu, &alg, Some(-2)).unwrap();
        assert_eq!(deep.residue().unwrap().coord(0), upoly(0));
    }

    #[test]
    fn trace_pairing_matches_the_coefficient_oracle() {
        // Independent oracle: rewrite b in right normal form b = Σ ∂^m∘ρ_m
        // (peeling from the top), then ⟨a,b⟩ = Σ_j ⟨a_j, ρ_{−j−1}⟩ exactly.
        let alg = matrix_superalgebra(2, 1);
        let vars: Vec<VarId> = (0..4).map(|b| Slot::new(b, 0).var(alg.parity(b))).collect();
        let mut rng = sample::rng(23);
        for _ in 0..12 {
            let sample_op = |rng: &mut SampleRng| -> Pdo {
                let mut out = Pdo::zero();
                for _ in 0..rng.gen_range(1..=2) {
                    let order = rng.gen_range(-3..=2);
                    let basis = rng.gen_range(0..4);
                    out = out.add(&Pdo::term(
                        AlgElement::from_coords([(basis, sample::poly(rng, &vars, 2))]),
                        order,
                    ));
                }
                out
            };
            let a = sample_op(&mut rng);
            let b = sample_op(&mut rng);

            // Right normal form of b: repeatedly remove ∂^top∘(top coeff).
            let mut right: BTreeMap<i32, AlgElement> = BTreeMap::new();
            let mut rest = b.clone();
            while let Some(t) = rest.top() {
                let rho = rest.coeff(t);
                right.insert(t, rho.clone());
                let peeled = Pdo::d(&alg, t)
                    .unwrap()
                    .mul_to(&Pdo::term(rho, 0), &alg, Some(rest.top().unwrap() - 12))
                    .unwrap();
                rest = rest.sub(&peeled);
                rest = Pdo::from_terms(rest.terms().map(|(o, c)| (o, c.clone())))
                    .with_floor(rest.floor());
                if rest.top().is_some_and(|nt| nt >= t) {
                    panic!("peeling failed to descend");
                }
                // Ignore everything at or below the junk horizon.
                if rest.top().is_some_and(|nt| nt <= b.top().unwrap() - 10) {
                    break;
                }
            }
            let mut oracle = SuperPoly::zero();
            for (j, aj) in a.terms() {
                if let Some(rho) = right.get(&(-j - 1)) {
                    oracle = &oracle + &alg.form(aj, rho);
                }
            }
            let pairing = trace_pairing(&a, &b, &alg).unwrap();
            assert_eq!(
                pairing.density(),
                &oracle,
                "a = {}, b = {}",
                a.display(&alg),
                b.display(&alg)
            );
        }
    }

    #[test]
    fn associativity_annihilation_and_commutator_traces() {
        let alg = matrix_superalgebra(2, 1);
        let r1 = composition_associativity_check(&alg, 5, 25);
        assert!(r1.passed(), "{r1}");
        let r2 = variational_annihilation_check(6, 25);
        assert!(r2.passed(), "{r2}");
        let r3 = commutator_trace_check(&alg, 7, 20);
        assert!(r3.passed(), "{r3}");
    }

    #[test]
    fn total_derivative_triviality_is_decided_by_variational_derivatives() {
        let f = &upoly(0) * &upoly(1); // uu′ = D(u²/2)
        assert!(TildeDensity::new(f).is_trivial());
        let g = &upoly(0) * &upoly(2); // uu″ ≡ −u′u′ ≠ 0
        assert!(!TildeDensity::new(g).is_trivial());
        assert!(TildeDensity::new(SuperPoly::zero()).is_trivial());
        assert!(!TildeDensity::new(SuperPoly::one()).is_trivial());
    }

    #[test]
    fn chi_kills_total_derivatives_and_represents_differentials() {
        let lax = scalar_full_lax(3);
        let mut rng = sample::rng(9);
        let vars: Vec<VarId> = lax.vars().into_iter().flat_map(|v| [v, v.raised()]).collect();
        for _ in 0..10 {
            let f = sample::poly(&mut rng, &vars, 2);
            let f = f.parity_part(Parity::Even);
            if f.is_zero() {
                continue;
            }
            assert!(lax.chi(&f.total_derivative()).unwrap().is_zero());

            // ⟨v, χ_f⟩ = ∂_v(f) modulo total derivatives for pattern-shaped v.
            let mut v = Pdo::zero();
            for &s in lax.pattern() {
                if rng.gen_bool(0.4) {
                    let coeff = AlgElement::from_coords([(
                        s.basis,
                        sample::poly(&mut rng, &vars, 1),
                    )]);
                    v = v.add(&Pdo::term(coeff, s.order));
                }
            }
            let lhs = trace_pairing(&v, &lax.chi(&f).unwrap(), lax.algebra()).unwrap();
            let rhs = lax.directional(&v, &f);
            let diff = lhs.density() - &rhs;
            assert!(
                TildeDensity::new(diff.clone()).is_trivial(),
                "f = {f}, difference {diff}"
            );
        }
    }

    #[test]
    fn chi_defining_property_holds_with_odd_variables() {
        let lax = matrix_lax(2);
        let mut rng = sample::rng(31);
        let vars = lax.vars();
        for _ in 0..8 {
            let (f, _) = sample_density(&mut rng, &vars, 2);
            let mut v = Pdo::zero();
            for &s in lax.pattern() {
                if rng.gen_bool(0.25) {
                    let coeff = AlgElement::from_coords([(
                        s.basis,
                        sample::poly(&mut rng, &vars, 1),
                    )]);
                    v = v.add(&Pdo::term(coeff, s.order));
                }
            }
            let lhs = trace_pairing(&v, &lax.chi(&f).unwrap(), lax.algebra()).unwrap();
            let rhs = lax.directional(&v, &f);
            let diff = lhs.density() - &rhs;
            assert!(
                TildeDensity::new(diff.clone()).is_trivial(),
                "f = {f}, difference {diff}"
            );
        }
    }

    #[test]
    fn square_root_of_the_schroedinger_operator() {
        // R = ∂ + (1/2)u∂^{−1} − (1/4)u′∂^{−2} + (1/8)(u″−u²)∂^{−3} + …
        let lax = scalar_kdv_lax();
        let r = lax.root(-7).unwrap();
        assert_eq!(r.coeff(1).coord(0), SuperPoly::one());
        assert!(r.coeff(0).is_zero());
        assert_eq!(r.coeff(-1).coord(0), upoly(0).scale(&ratio(1, 2)));
        assert_eq!(r.coeff(-2).coord(0), upoly(1).scale(&ratio(-1, 4)));
        let third = &upoly(2).scale(&ratio(1, 8)) - &(&upoly(0) * &upoly(0)).scale(&ratio(1, 8));
        assert_eq!(r.coeff(-3).coord(0), third);

        // (root)² − L vanishes in every exactly-known order down to −6.
        let sq = r.mul_to(&r, lax.algebra(), Some(-6)).unwrap();
        let diff = sq.sub(&lax.lax());
        assert!(diff.is_zero(), "residual {}", diff.display(lax.algebra()));
        assert!(diff.floor().unwrap() <= -6);
    }

    #[test]
    fn nonmonic_operator_has_no_root() {
        let alg = scalar_algebra();
        let l0 = Pdo::d(&alg, 2).unwrap().scale(&rat(2));
        let kappa = alg.identity_element().unwrap();
        let lax = LaxPdo::new(alg, 1, l0, kappa, vec![Slot::new(0, 0)]).unwrap();
        assert!(matches!(lax.root(-4), Err(PdoError::NotMonic { .. })));
    }

    #[test]
    fn third_flow_is_the_expected_evolution_equation() {
        // B₃ = ∂³ + (3/2)u∂ + (3/4)u′ and dL/dt₃ = [L,B₃] gives
        // u_t = −(1/4)u‴ − (3/2)uu′.
        let lax = scalar_kdv_lax();
        let b3 = lax.b_op(3).unwrap();
        let expected = Pdo::d(lax.algebra(), 3)
            .unwrap()
            .add(&scalar_term(upoly(0).scale(&ratio(3, 2)), 1))
            .add(&scalar_term(upoly(1).scale(&ratio(3, 4)), 0));
        assert_eq!(b3, expected);

        let rhs = lax.lax_rhs(3).unwrap();
        let got = rhs.get(&u()).unwrap();
        let want = &upoly(3).scale(&ratio(-1, 4))
            - &(&upoly(0) * &upoly(1)).scale(&ratio(3, 2));
        assert_eq!(got, &want);
    }

    #[test]
    fn off_pattern_flow_is_rejected_with_a_witness() {
        // L = ∂² + u∂ (variable at order 1 only): [L,B₁] produces an
        // order-0 component outside the pattern.
        let alg = scalar_algebra();
        let l0 = Pdo::d(&alg, 2).unwrap();
        let kappa = alg.identity_element().unwrap();
        let lax = LaxPdo::new(alg, 1, l0, kappa, vec![Slot::new(0, 1)]).unwrap();
        let err = lax.lax_rhs(1).unwrap_err();
        assert!(err.to_string().contains("pattern"), "{err}");
    }

    #[test]
    fn conserved_densities_of_the_scalar_hierarchy() {
        let lax = scalar_kdv_lax();
        // res(L^{1/2}) = u/2; res(L^{3/2}) = (3/8)u² + (1/8)u″.
        let d1 = lax.conserved_density(1).unwrap();
        assert_eq!(d1.density(), &upoly(0).scale(&ratio(1, 2)));
        let d3 = lax.conserved_density(3).unwrap();
        let want = &(&upoly(0) * &upoly(0)).scale(&ratio(3, 8)) + &upoly(2).scale(&ratio(1, 8));
        assert_eq!(d3.density(), &want);

        let report = lax.conservation_check(3, &[1, 3]);
        assert!(report.passed(), "{report}");
    }

    #[test]
    fn zero_curvature_for_the_second_and_third_flows() {
        let lax = scalar_kdv_lax();
        let residual = lax.zero_curvature_residual(2, 3).unwrap();
        assert!(
            residual.is_zero(),
            "residual {}",
            residual.display(lax.algebra())
        );
        assert!(residual.floor().is_none());
    }

    #[test]
    fn scalar_superpair_small_run() {
        let lax = scalar_full_lax(5);
        let cfg = SuperpairConfig {
            triples: 3,
            ..Default::default()
        };
        let report = verify_hamiltonian_superpair(&lax, &[rat(1)], &cfg);
        assert!(report.passed(), "{report}");
    }

    #[test]
    fn flipped_projection_breaks_the_hamiltonian_superpair() {
        let lax = scalar_full_lax(5);
        let cfg = SuperpairConfig {
            triples: 4,
            variant: AdlerVariant::MinusPlus,
            ..Default::default()
        };
        let report = verify_hamiltonian_superpair(&lax, &[rat(1)], &cfg);
        assert!(!report.passed(), "the negative control must fail");
        assert!(report.first_failure().unwrap().detail.is_some());
    }

    #[test]
    fn matrix_superpair_smoke() {
        let lax = matrix_lax(3);
        let cfg = SuperpairConfig {
            triples: 2,
            ..Default::default()
        };
        let report = verify_hamiltonian_superpair(&lax, &[rat(1)], &cfg);
        assert!(report.passed(), "{report}");
    }
}
