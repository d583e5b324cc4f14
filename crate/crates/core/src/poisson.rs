//! Poisson superpairs on polarized algebras.
//!
//! Fix a polarized algebra `𝒜` and a level `ι ≥ 0`.  The polynomial ring
//! `𝒫 = 𝔽[x_{i,j}]` has one variable of parity `i` per filtration index
//! `j ∈ I_i = {1..k_i}`, and the free module `Ḡ = 𝒫·ς` carries the algebra
//! product and duality form extended by the Koszul rule.  The *Lax element*
//! is
//!
//! ```text
//! L = L₀ + Σ_{i, j∈I_i} x_{i,j}·ς_{i,j},       L₀ ∈ 𝒜⁻₀ + 𝒜^{(ι+1)}₀,
//! ```
//!
//! together with a central even `κ`.  Every `f ∈ 𝒫` has a differential
//!
//! ```text
//! ς_{(f)} = Σ_{i, j∈I_i} (∂_{i,j}(f₀) + (−1)^i ∂_{i,j}(f₁))·ς_{i,−j}
//! ```
//!
//! (parts by coefficient parity), characterized by `⟨u, ς_{(f)}⟩ = ∂_u(f)`.
//! The two brackets of the superpair are
//!
//! ```text
//! {f,g}₁ = ⟨L, [ς_{(f)}, (κς_{(g)})₊] − [(κς_{(f)})₋, ς_{(g)}]⟩
//! {f,g}₂ = ⟨(Lς_{(f)})₋L − L(ς_{(f)}L)₋, ς_{(g)}⟩
//! ```
//!
//! and the pencil `{f,g}_λ = λ{f,g}₁ + {f,g}₂ `is a Poisson superbracket for
//! every `λ`.  Both arise from one Hamiltonian map: with `L̂ = L + εκ`,
//!
//! ```text
//! H_ε(u) = (L̂u)₋L̂ − L̂(uL̂)₋,        {f,g}_{H_ε} = ⟨H_ε(ς_{(f)}), ς_{(g)}⟩,
//! ```
//!
//! and expanding in a *formal* `ε` gives `{f,g}_{H_ε} = ε{f,g}₁ + {f,g}₂`
//! identically — the `ε²` term dies by centrality of `κ`
//! ([`epsilon_expansion_check`]).  [`verify_superpair`] checks skewness, the
//! super Jacobi identity and the Leibniz rule of the pencil on seeded random
//! triples, plus the Hamiltonian-map-level identities behind them;
//! [`cyclic_projection_check`] checks the cyclic projection identity for the
//! form, the engine of all the sign bookkeeping.
//!
//! Everything is exact: products that would leave the algebra window are
//! errors, never approximations.

use crate::check::CheckReport;
use crate::parity::{koszul_sign, Parity};
use crate::polarized::{PolElement, PolarizedAlgebra, PolarizedError, SignedIdx};
use crate::rat::{format_rat, Rat};
use crate::sample::{self, SampleRng};
use crate::superpoly::{SuperPoly, VarId};
use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PoissonError {
    #[error(transparent)]
    Algebra(#[from] PolarizedError),
    #[error("invalid setup: {0}")]
    Shape(String),
}

/// Which projection the second Adler term uses.  `MinusMinus` is the
/// Hamiltonian choice; `MinusPlus` replaces `(uL̂)₋` by `(uL̂)₊` and serves
/// as a negative control — it destroys the superpair axioms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AdlerVariant {
    #[default]
    MinusMinus,
    MinusPlus,
}

/// A Lax element and central element on a polarized algebra, with the
/// variable band `I_i = {1..var_counts[i]}`.
#[derive(Debug, Clone)]
pub struct PoissonSetup {
    alg: PolarizedAlgebra,
    iota: i32,
    l0: PolElement,
    kappa: PolElement,
    var_counts: [u32; 2],
}

/// The reserved even variable used as the formal `ε` in `L̂ = L + εκ`;
/// ordinary variables are indexed from 1.
pub fn eps_var() -> VarId {
    VarId::new(Parity::Even, 0)
}

impl PoissonSetup {
    /// Validates shapes only: coefficients of `l0` and `kappa` must be
    /// constants on window symbols, and the variable band must fit in the
    /// window.  Centrality of `kappa` and the level bound on `l0` are
    /// *checks* (reported by [`verify_superpair`]), not constructor errors,
    /// so that deliberately broken setups can be constructed and reported on.
    pub fn new(
        alg: PolarizedAlgebra,
        iota: i32,
        l0: PolElement,
        kappa: PolElement,
        var_counts: [u32; 2],
    ) -> Result<Self, PoissonError> {
        if iota < 0 {
            return Err(PoissonError::Shape(format!("ι = {iota} must be ≥ 0")));
        }
        for (name, e) in [("L₀", &l0), ("κ", &kappa)] {
            for (s, p) in e.coords() {
                if !alg.in_window(s) {
                    return Err(PoissonError::Shape(format!(
                        "{name} uses {s} outside the window"
                    )));
                }
                if p.degree() != Some(0) {
                    return Err(PoissonError::Shape(format!(
                        "{name} must have constant coefficients, found {p} on {s}"
                    )));
                }
            }
        }
        for p in Parity::BOTH {
            if var_counts[p.idx()] > alg.window()[p.idx()] {
                return Err(PoissonError::Shape(format!(
                    "variable band {} exceeds the window {} for parity {p}",
                    var_counts[p.idx()],
                    alg.window()[p.idx()]
                )));
            }
        }
        Ok(PoissonSetup {
            alg,
            iota,
            l0,
            kappa,
            var_counts,
        })
    }

    pub fn algebra(&self) -> &PolarizedAlgebra {
        &self.alg
    }

    pub fn iota(&self) -> i32 {
        self.iota
    }

    pub fn var_counts(&self) -> [u32; 2] {
        self.var_counts
    }

    /// The variable `x_{i,j}`, `j ∈ I_i`.
    pub fn x_var(&self, i: Parity, j: u32) -> VarId {
        assert!(j >= 1 && j <= self.var_counts[i.idx()], "x out of band");
        VarId::new(i, j as i64)
    }

    /// All variables, even parity first.
    pub fn vars(&self) -> Vec<VarId> {
        let mut out = Vec::new();
        for p in Parity::BOTH {
            for j in 1..=self.var_counts[p.idx()] {
                out.push(VarId::new(p, j as i64));
            }
        }
        out
    }

    /// `L = L₀ + Σ_{i, j∈I_i} x_{i,j}·ς_{i,j}`.
    pub fn lax(&self) -> PolElement {
        let mut l = self.l0.clone();
        for p in Parity::BOTH {
            for j in 1..=self.var_counts[p.idx()] {
                l.add(
                    SignedIdx::plus(p, j),
                    &SuperPoly::var(self.x_var(p, j)),
                );
            }
        }
        l
    }

    pub fn kappa(&self) -> &PolElement {
        &self.kappa
    }

    /// The differential `ς_{(f)}`, an element of `Ω = 𝒫·{ς_{i,−j} : j ∈ I_i}`.
    pub fn differential(&self, f: &SuperPoly) -> PolElement {
        let mut out = PolElement::zero();
        let f0 = f.parity_part(Parity::Even);
        let f1 = f.parity_part(Parity::Odd);
        for p in Parity::BOTH {
            for j in 1..=self.var_counts[p.idx()] {
                let v = self.x_var(p, j);
                let mut c = f0.derive(v);
                let d1 = f1.derive(v);
                if p.is_odd() {
                    c = &c - &d1;
                } else {
                    c = &c + &d1;
                }
                out.add(SignedIdx::minus(p, j), &c);
            }
        }
        out
    }

    /// The directional derivative `∂_ξ = Σ_{i, j∈I_i} ξ_{i,j}·∂_{i,j}` along
    /// the band components of `ξ` (other coordinates of `ξ` act trivially).
    pub fn directional(&self, xi: &PolElement, f: &SuperPoly) -> SuperPoly {
        let mut out = SuperPoly::zero();
        for p in Parity::BOTH {
            for j in 1..=self.var_counts[p.idx()] {
                let c = xi.coord(SignedIdx::plus(p, j));
                if c.is_zero() {
                    continue;
                }
                let d = f.derive(self.x_var(p, j));
                if !d.is_zero() {
                    out = &out + &(&c * &d);
                }
            }
        }
        out
    }

    /// `∂_ξ` applied coefficient-wise to an element.
    pub fn directional_elem(&self, xi: &PolElement, v: &PolElement) -> PolElement {
        v.map_coords(|c| self.directional(xi, c))
    }

    /// The Hamiltonian map `H_ε(u) = (L̂u)₋L̂ − L̂(uL̂)₋`, `L̂ = L + εκ`.
    /// `eps` may be a constant or the formal variable [`eps_var`]; the
    /// variant controls the second projection (see [`AdlerVariant`]).
    pub fn hamiltonian_map(
        &self,
        u: &PolElement,
        eps: &SuperPoly,
        variant: AdlerVariant,
    ) -> Result<PolElement, PolarizedError> {
        let l_hat = self.lax().add_elem(&self.kappa.mul_poly_left(eps));
        let lu = self.alg.mul(&l_hat, u)?;
        let ul = self.alg.mul(u, &l_hat)?;
        let first = self.alg.mul(&lu.minus_part(), &l_hat)?;
        let proj = match variant {
            AdlerVariant::MinusMinus => ul.minus_part(),
            AdlerVariant::MinusPlus => ul.plus_part(),
        };
        let second = self.alg.mul(&l_hat, &proj)?;
        Ok(first.sub_elem(&second))
    }

    /// The derivative of the Hamiltonian map along `ξ`:
    /// `∂_ξ(H)(v) = ∂_ξ(H(v)) − H(∂_ξ(v))`.
    pub fn map_derivative(
        &self,
        xi: &PolElement,
        v: &PolElement,
        eps: &SuperPoly,
        variant: AdlerVariant,
    ) -> Result<PolElement, PolarizedError> {
        let hv = self.hamiltonian_map(v, eps, variant)?;
        let dv = self.directional_elem(xi, v);
        let hdv = self.hamiltonian_map(&dv, eps, variant)?;
        Ok(self.directional_elem(xi, &hv).sub_elem(&hdv))
    }

    /// `{f,g}₁ = ⟨L, [ς_{(f)}, (κς_{(g)})₊] − [(κς_{(f)})₋, ς_{(g)}]⟩`.
    pub fn bracket1(&self, f: &SuperPoly, g: &SuperPoly) -> Result<SuperPoly, PolarizedError> {
        let sf = self.differential(f);
        let sg = self.differential(g);
        let ksg = self.alg.mul(&self.kappa, &sg)?;
        let ksf = self.alg.mul(&self.kappa, &sf)?;
        let t1 = self.alg.commutator(&sf, &ksg.plus_part())?;
        let t2 = self.alg.commutator(&ksf.minus_part(), &sg)?;
        Ok(self.alg.form(&self.lax(), &t1.sub_elem(&t2)))
    }

    /// `{f,g}₂ = ⟨(Lς_{(f)})₋L − L(ς_{(f)}L)₋, ς_{(g)}⟩` — the `ε = 0` slice
    /// of the Hamiltonian map.
    pub fn bracket2(
        &self,
        f: &SuperPoly,
        g: &SuperPoly,
        variant: AdlerVariant,
    ) -> Result<SuperPoly, PolarizedError> {
        self.bracket_h(f, g, &SuperPoly::zero(), variant)
    }

    /// `{f,g}_{H_ε} = ⟨H_ε(ς_{(f)}), ς_{(g)}⟩`.
    pub fn bracket_h(
        &self,
        f: &SuperPoly,
        g: &SuperPoly,
        eps: &SuperPoly,
        variant: AdlerVariant,
    ) -> Result<SuperPoly, PolarizedError> {
        let h = self.hamiltonian_map(&self.differential(f), eps, variant)?;
        Ok(self.alg.form(&h, &self.differential(g)))
    }

    /// The pencil `{f,g}_λ = λ{f,g}₁ + {f,g}₂`.
    pub fn bracket_lambda(
        &self,
        lambda: &Rat,
        f: &SuperPoly,
        g: &SuperPoly,
        variant: AdlerVariant,
    ) -> Result<SuperPoly, PolarizedError> {
        let b1 = self.bracket1(f, g)?;
        let b2 = self.bracket2(f, g, variant)?;
        Ok(&b1.scale(lambda) + &b2)
    }
}

/// Options for the randomized identity checks.
#[derive(Debug, Clone)]
pub struct SuperpairConfig {
    pub seed: u64,
    /// Number of sampled triples per identity and λ.
    pub triples: usize,
    /// Maximum polynomial degree of sampled Hamiltonians.
    pub max_degree: u32,
    pub variant: AdlerVariant,
}

impl Default for SuperpairConfig {
    fn default() -> Self {
        SuperpairConfig {
            seed: 0x5eed,
            triples: 25,
            max_degree: 2,
            variant: AdlerVariant::MinusMinus,
        }
    }
}

/// Samples a parity-homogeneous polynomial in the setup's variables; falls
/// back to parities that are actually realizable (a purely even band can
/// produce no odd polynomial).
fn sample_hamiltonian(
    setup: &PoissonSetup,
    rng: &mut SampleRng,
    max_degree: u32,
) -> (SuperPoly, Parity) {
    let vars = setup.vars();
    let want_odd = rng.gen_bool(0.5);
    for parity in [Parity::from_odd(want_odd), Parity::from_odd(!want_odd)] {
        if let Some(p) = sample::homogeneous_poly(rng, &vars, max_degree, parity) {
            return (p, parity);
        }
    }
    (SuperPoly::one(), Parity::Even)
}

/// Samples a parity-homogeneous element of `Ω` (band `ς⁻` symbols with
/// polynomial coefficients).  Returns `None` when the target parity cannot
/// be realized with the available variables.
fn sample_omega(
    setup: &PoissonSetup,
    rng: &mut SampleRng,
    target: Parity,
) -> Option<(PolElement, Parity)> {
    let vars = setup.vars();
    let mut out = PolElement::zero();
    let terms = rng.gen_range(1..=2);
    for _ in 0..terms {
        let p = Parity::from_odd(rng.gen_bool(0.5));
        let count = setup.var_counts()[p.idx()];
        let (p, count) = if count == 0 {
            let q = p.flip();
            (q, setup.var_counts()[q.idx()])
        } else {
            (p, count)
        };
        if count == 0 {
            return None;
        }
        let j = rng.gen_range(1..=count);
        let coeff_parity = target + p;
        let coeff = if coeff_parity == Parity::Even && rng.gen_bool(0.5) {
            SuperPoly::constant(sample::small_rat(rng))
        } else {
            sample::homogeneous_poly(rng, &vars, 1, coeff_parity)?
        };
        out.add(SignedIdx::minus(p, j), &coeff);
    }
    if out.is_zero() {
        return None;
    }
    Some((out, target))
}

/// Verifies the Poisson-superpair axioms for the pencil `λ{,}₁ + {,}₂` at
/// each given `λ`, on seeded random parity-homogeneous triples:
///
/// * centrality and evenness of `κ`, and the level bound on `L₀`;
/// * skewness `{f,g} = −(−1)^{|f||g|}{g,f}`;
/// * the super Jacobi identity
///   `(−1)^{|f||h|}{f,{g,h}} + (−1)^{|g||f|}{g,{h,f}} + (−1)^{|h||g|}{h,{f,g}} = 0`;
/// * the Leibniz rule `{f,gh} = {f,g}h + (−1)^{|f||g|}g{f,h}`;
/// * the Hamiltonian-map identities, with `ε` running over the same values:
///   `⟨H_ε(v),u⟩ = −(−1)^{|u||v|}⟨H_ε(u),v⟩` and the cyclic sum
///   `⟨∂_{H(u)}(H)(v),w⟩ + (−1)^{|u|(|v|+|w|)}⟨∂_{H(v)}(H)(w),u⟩
///    + (−1)^{(|u|+|v|)|w|}⟨∂_{H(w)}(H)(u),v⟩ = 0` on `Ω` triples;
/// * the formal-ε expansion (see [`epsilon_expansion_check`]).
pub fn verify_superpair(
    setup: &PoissonSetup,
    lambdas: &[Rat],
    cfg: &SuperpairConfig,
) -> CheckReport {
    let mut report = CheckReport::new();
    let alg = setup.algebra();

    // κ must be central and even; a failure is reported with a witness and
    // the remaining checks still run (they will typically fail too — that is
    // the point of the negative controls).
    let mut witness = None;
    for s in alg.symbols() {
        let e = PolElement::symbol(s);
        match (alg.mul(setup.kappa(), &e), alg.mul(&e, setup.kappa())) {
            (Ok(ke), Ok(ek)) => {
                if ke.sub_elem(&ek) != PolElement::zero() {
                    witness = Some(format!("κ·{s} = {ke} but {s}·κ = {ek}"));
                    break;
                }
            }
            _ => {
                witness = Some(format!("κ·{s} is truncated by the window"));
                break;
            }
        }
    }
    match witness {
        None => report.pass("kappa-central"),
        Some(w) => report.fail("kappa-central", w),
    }
    report.require("kappa-even", setup.kappa().parity() == Some(Parity::Even), || {
        "κ has an odd component".into()
    });

    if alg.has_levels() {
        let mut witnesses = Vec::new();
        for (name, e) in [("L₀", &setup.l0), ("κ", setup.kappa())] {
            for (s, _) in e.coords() {
                if s.is_plus() {
                    match alg.level(s) {
                        Some(l) if l <= setup.iota() + 1 => {}
                        Some(l) => witnesses.push(format!(
                            "{name} uses {s} of level {l} > ι+1 = {}",
                            setup.iota() + 1
                        )),
                        None => witnesses.push(format!("{name} uses {s} of unknown level")),
                    }
                }
            }
        }
        report.require("lax-shape", witnesses.is_empty(), || witnesses.join("; "));
    } else {
        report.skip("lax-shape", "algebra declares no levels");
    }
    report.require("lax-even", setup.lax().parity() == Some(Parity::Even), || {
        "L has an odd component".into()
    });

    let mut rng = sample::rng(cfg.seed);
    let ham = |rng: &mut SampleRng| sample_hamiltonian(setup, rng, cfg.max_degree);
    let mut saw_nonzero = false;

    for lambda in lambdas {
        let tag = format!("λ={}", format_rat(lambda));
        let b = |f: &SuperPoly, g: &SuperPoly| {
            setup.bracket_lambda(lambda, f, g, cfg.variant)
        };

        let mut witnesses = Vec::new();
        for _ in 0..cfg.triples {
            let (f, pf) = ham(&mut rng);
            let (g, pg) = ham(&mut rng);
            match (b(&f, &g), b(&g, &f)) {
                (Ok(fg), Ok(gf)) => {
                    saw_nonzero |= !fg.is_zero();
                    let residual = if koszul_sign(pf, pg) < 0 {
                        &fg - &gf
                    } else {
                        &fg + &gf
                    };
                    if !residual.is_zero() && witnesses.len() < 2 {
                        witnesses.push(format!(
                            "f = {f}, g = {g}: {{f,g}} + (−1)^{{|f||g|}}{{g,f}} = {residual}"
                        ));
                    }
                }
                _ => witnesses.push(format!("f = {f}, g = {g}: bracket left the window")),
            }
        }
        report.require(format!("skew({tag})"), witnesses.is_empty(), || {
            witnesses.join("; ")
        });

        let mut witnesses = Vec::new();
        for _ in 0..cfg.triples {
            let (f, pf) = ham(&mut rng);
            let (g, pg) = ham(&mut rng);
            let (h, ph) = ham(&mut rng);
            let jac = (|| -> Result<SuperPoly, PolarizedError> {
                let t1 = b(&f, &b(&g, &h)?)?.scale(&Rat::from(
                    num::BigInt::from(koszul_sign(pf, ph) as i64),
                ));
                let t2 = b(&g, &b(&h, &f)?)?.scale(&Rat::from(
                    num::BigInt::from(koszul_sign(pg, pf) as i64),
                ));
                let t3 = b(&h, &b(&f, &g)?)?.scale(&Rat::from(
                    num::BigInt::from(koszul_sign(ph, pg) as i64),
                ));
                Ok(&(&t1 + &t2) + &t3)
            })();
            match jac {
                Ok(j) if j.is_zero() => {}
                Ok(j) => {
                    if witnesses.len() < 2 {
                        witnesses.push(format!(
                            "f = {f}, g = {g}, h = {h}: cyclic sum = {j}"
                        ));
                    }
                }
                Err(_) => witnesses.push("bracket left the window".into()),
            }
        }
        report.require(format!("jacobi({tag})"), witnesses.is_empty(), || {
            witnesses.join("; ")
        });

        let mut witnesses = Vec::new();
        for _ in 0..cfg.triples {
            let (f, pf) = ham(&mut rng);
            let (g, pg) = ham(&mut rng);
            let (h, _) = ham(&mut rng);
            let leib = (|| -> Result<SuperPoly, PolarizedError> {
                let lhs = b(&f, &(&g * &h))?;
                let mut rhs = &b(&f, &g)? * &h;
                let gfh = &g * &b(&f, &h)?;
                if koszul_sign(pf, pg) < 0 {
                    rhs = &rhs - &gfh;
                } else {
                    rhs = &rhs + &gfh;
                }
                Ok(&lhs - &rhs)
            })();
            match leib {
                Ok(r) if r.is_zero() => {}
                Ok(r) => {
                    if witnesses.len() < 2 {
                        witnesses.push(format!("f = {f}, g = {g}, h = {h}: residual {r}"));
                    }
                }
                Err(_) => witnesses.push("bracket left the window".into()),
            }
        }
        report.require(format!("leibniz({tag})"), witnesses.is_empty(), || {
            witnesses.join("; ")
        });
    }

    // Hamiltonian-map level, ε over the same values.
    for lambda in lambdas {
        let tag = format!("ε={}", format_rat(lambda));
        let eps = SuperPoly::constant(lambda.clone());

        let mut witnesses = Vec::new();
        for _ in 0..cfg.triples {
            let pu = Parity::from_odd(rng.gen_bool(0.5));
            let pv = Parity::from_odd(rng.gen_bool(0.5));
            let (Some((u, pu)), Some((v, pv))) = (
                sample_omega(setup, &mut rng, pu),
                sample_omega(setup, &mut rng, pv),
            ) else {
                continue;
            };
            let check = (|| -> Result<SuperPoly, PolarizedError> {
                let hu = setup.hamiltonian_map(&u, &eps, cfg.variant)?;
                let hv = setup.hamiltonian_map(&v, &eps, cfg.variant)?;
                let lhs = alg.form(&hv, &u);
                let rhs = alg.form(&hu, &v);
                Ok(if koszul_sign(pu, pv) < 0 {
                    &lhs - &rhs
                } else {
                    &lhs + &rhs
                })
            })();
            match check {
                Ok(r) if r.is_zero() => {}
                Ok(r) => {
                    if witnesses.len() < 2 {
                        witnesses.push(format!("u = {u}, v = {v}: residual {r}"));
                    }
                }
                Err(_) => witnesses.push("map left the window".into()),
            }
        }
        report.require(format!("map-skew({tag})"), witnesses.is_empty(), || {
            witnesses.join("; ")
        });

        let mut witnesses = Vec::new();
        for _ in 0..cfg.triples {
            let ps: Vec<Parity> = (0..3).map(|_| Parity::from_odd(rng.gen_bool(0.5))).collect();
            let (Some((u, pu)), Some((v, pv)), Some((w, pw))) = (
                sample_omega(setup, &mut rng, ps[0]),
                sample_omega(setup, &mut rng, ps[1]),
                sample_omega(setup, &mut rng, ps[2]),
            ) else {
                continue;
            };
            let check = (|| -> Result<SuperPoly, PolarizedError> {
                let hu = setup.hamiltonian_map(&u, &eps, cfg.variant)?;
                let hv = setup.hamiltonian_map(&v, &eps, cfg.variant)?;
                let hw = setup.hamiltonian_map(&w, &eps, cfg.variant)?;
                let t1 = alg.form(&setup.map_derivative(&hu, &v, &eps, cfg.variant)?, &w);
                let t2 = alg.form(&setup.map_derivative(&hv, &w, &eps, cfg.variant)?, &u);
                let t3 = alg.form(&setup.map_derivative(&hw, &u, &eps, cfg.variant)?, &v);
                let s2 = koszul_sign(pu, pv + pw);
                let s3 = koszul_sign(pu + pv, pw);
                let mut total = t1;
                total = if s2 < 0 { &total - &t2 } else { &total + &t2 };
                total = if s3 < 0 { &total - &t3 } else { &total + &t3 };
                Ok(total)
            })();
            match check {
                Ok(r) if r.is_zero() => {}
                Ok(r) => {
                    if witnesses.len() < 2 {
                        witnesses.push(format!("u = {u}, v = {v}, w = {w}: residual {r}"));
                    }
                }
                Err(_) => witnesses.push("map left the window".into()),
            }
        }
        report.require(format!("map-jacobi({tag})"), witnesses.is_empty(), || {
            witnesses.join("; ")
        });
    }

    report.absorb("", epsilon_expansion_check(setup, cfg));
    if !saw_nonzero && !lambdas.is_empty() {
        report.flag(
            "every sampled bracket vanished identically — on a commutative \
             algebra both brackets are zero and the axioms hold vacuously",
        );
    }
    report.flag(format!(
        "randomized checks: seed {}, {} triples per identity",
        cfg.seed, cfg.triples
    ));
    report
}

/// Checks `{f,g}_{H_ε} − ε{f,g}₁ − {f,g}₂ = 0` *identically in a formal ε*
/// on seeded sample pairs: the `ε²` term of the expansion dies by centrality
/// of `κ` and the `ε¹` term reproduces the first bracket.
pub fn epsilon_expansion_check(setup: &PoissonSetup, cfg: &SuperpairConfig) -> CheckReport {
    let mut report = CheckReport::new();
    let eps = SuperPoly::var(eps_var());
    let mut rng = sample::rng(cfg.seed ^ 0xE95);
    let mut witnesses = Vec::new();
    for _ in 0..cfg.triples.max(4) {
        let (f, _) = sample_hamiltonian(setup, &mut rng, cfg.max_degree);
        let (g, _) = sample_hamiltonian(setup, &mut rng, cfg.max_degree);
        let check = (|| -> Result<SuperPoly, PolarizedError> {
            let full = setup.bracket_h(&f, &g, &eps, cfg.variant)?;
            let b1 = setup.bracket1(&f, &g)?;
            let b2 = setup.bracket2(&f, &g, cfg.variant)?;
            Ok(&(&full - &(&eps * &b1)) - &b2)
        })();
        match check {
            Ok(r) if r.is_zero() => {}
            Ok(r) => {
                if witnesses.len() < 2 {
                    witnesses.push(format!("f = {f}, g = {g}: residual {r}"));
                }
            }
            Err(_) => witnesses.push("bracket left the window".into()),
        }
    }
    report.require("epsilon-expansion", witnesses.is_empty(), || {
        witnesses.join("; ")
    });
    report
}

/// Checks the cyclic projection identity of the duality form on seeded
/// random parity-homogeneous triples `u, v, w`:
///
/// ```text
/// ⟨u,vw⟩ = ⟨u,v₊w₋⟩ + (−1)^{i₁(i₂+i₃)}⟨v,w₊u₋⟩ + (−1)^{(i₁+i₂)i₃}⟨w,u₊v₋⟩
/// ```
///
/// and the same with the two projections swapped.  Elements are sampled from
/// the level band whose pairwise products stay inside the window.
pub fn cyclic_projection_check(alg: &PolarizedAlgebra, seed: u64, triples: usize) -> CheckReport {
    let mut report = CheckReport::new();
    let mut rng = sample::rng(seed);

    // Symbols whose pairwise products are representable: levels in
    // [⌈min/2⌉, ⌊max/2⌋] when levels are declared, everything otherwise.
    let symbols: Vec<SignedIdx> = if alg.has_levels() {
        let all = alg.symbols();
        let min: i32 = all.iter().filter_map(|&s| alg.level(s)).min().unwrap_or(0);
        let max: i32 = all.iter().filter_map(|&s| alg.level(s)).max().unwrap_or(0);
        all.into_iter()
            .filter(|&s| {
                alg.level(s)
                    .is_some_and(|l| l >= min.div_euclid(2) && l <= max.div_euclid(2))
            })
            .collect()
    } else {
        alg.symbols()
    };
    if symbols.is_empty() {
        report.skip("cyclic-projection", "no symbols in the safe band");
        return report;
    }
    let vars = [
        VarId::new(Parity::Even, 1),
        VarId::new(Parity::Even, 2),
        VarId::new(Parity::Odd, 1),
        VarId::new(Parity::Odd, 2),
    ];
    let sample_elem = |rng: &mut SampleRng, target: Parity| -> PolElement {
        let mut out = PolElement::zero();
        for _ in 0..rng.gen_range(1..=2) {
            let s = symbols[rng.gen_range(0..symbols.len())];
            let coeff_parity = target + s.parity;
            let coeff = if coeff_parity == Parity::Even && rng.gen_bool(0.4) {
                SuperPoly::constant(sample::small_rat(rng))
            } else {
                match sample::homogeneous_poly(rng, &vars, 1, coeff_parity) {
                    Some(p) => p,
                    None => continue,
                }
            };
            out.add(s, &coeff);
        }
        out
    };

    let mut checked = 0usize;
    let mut witnesses = Vec::new();
    let mut skipped = 0usize;
    for _ in 0..triples {
        let pu = Parity::from_odd(rng.gen_bool(0.5));
        let pv = Parity::from_odd(rng.gen_bool(0.5));
        let pw = Parity::from_odd(rng.gen_bool(0.5));
        let u = sample_elem(&mut rng, pu);
        let v = sample_elem(&mut rng, pv);
        let w = sample_elem(&mut rng, pw);
        let s2 = koszul_sign(pu, pv + pw);
        let s3 = koszul_sign(pu + pv, pw);
        let run = |swap: bool| -> Result<SuperPoly, PolarizedError> {
            let part = |x: &PolElement, plus: bool| {
                if plus != swap {
                    x.plus_part()
                } else {
                    x.minus_part()
                }
            };
            let lhs = alg.form(&u, &alg.mul(&v, &w)?);
            let t1 = alg.form(&u, &alg.mul(&part(&v, true), &part(&w, false))?);
            let t2 = alg.form(&v, &alg.mul(&part(&w, true), &part(&u, false))?);
            let t3 = alg.form(&w, &alg.mul(&part(&u, true), &part(&v, false))?);
            let mut rhs = t1;
            rhs = if s2 < 0 { &rhs - &t2 } else { &rhs + &t2 };
            rhs = if s3 < 0 { &rhs - &t3 } else { &rhs + &t3 };
            Ok(&lhs - &rhs)
        };
        for swap in [false, true] {
            match run(swap) {
                Ok(r) if r.is_zero() => checked += 1,
                Ok(r) => {
                    if witnesses.len() < 2 {
                        witnesses.push(format!(
                            "swap = {swap}, u = {u}, v = {v}, w = {w}: residual {r}"
                        ));
                    }
                }
                Err(_) => skipped += 1,
            }
        }
    }
    report.require("cyclic-projection", witnesses.is_empty(), || {
        witnesses.join("; ")
    });
    if skipped > 0 {
        report.flag(format!("{skipped} triples skipped (window truncation)"));
    }
    report.flag(format!("{checked} projection identities checked, seed {seed}"));
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polarized::{laurent, matrix_laurent};
    use crate::rat::rat;

    fn laurent_setup(n: u32, iota: i32) -> PoissonSetup {
        let alg = laurent(n);
        // L₀ = t^{ι+1} = ς_{0,ι+2}, κ = 1 = ς_{0,1}.
        let l0 = PolElement::symbol(SignedIdx::plus(Parity::Even, (iota + 2) as u32));
        let kappa = PolElement::symbol(SignedIdx::plus(Parity::Even, 1));
        PoissonSetup::new(alg, iota, l0, kappa, [(iota + 1) as u32, 0]).unwrap()
    }

    fn matrix_setup(n: u32) -> PoissonSetup {
        let alg = matrix_laurent(2, 1, n);
        // ι = 1: L₀ = 1⊗t² = ς_{0,5}+ς_{0,6}, κ = 1⊗1 = ς_{0,1}+ς_{0,2},
        // I₀ = I₁ = {1..4}.
        let one_t = |d: u32| {
            PolElement::from_coords([
                (SignedIdx::plus(Parity::Even, 2 * d + 1), SuperPoly::one()),
                (SignedIdx::plus(Parity::Even, 2 * d + 2), SuperPoly::one()),
            ])
        };
        PoissonSetup::new(alg, 1, one_t(2), one_t(0), [4, 4]).unwrap()
    }

    #[test]
    fn differential_is_dual_to_directional_derivatives() {
        // ⟨u, ς_{(f)}⟩ = ∂_u(f) for band elements u with polynomial
        // coefficients, on an algebra with both parities.
        let setup = matrix_setup(4);
        let mut rng = sample::rng(7);
        let vars = setup.vars();
        for _ in 0..40 {
            let f = sample::poly(&mut rng, &vars, 3);
            let p = Parity::from_odd(rng.gen_bool(0.5));
            let j = rng.gen_range(1..=setup.var_counts()[p.idx()]);
            let coeff = sample::poly(&mut rng, &vars, 2);
            let u = PolElement::from_coords([(SignedIdx::plus(p, j), coeff)]);
            let lhs = setup.algebra().form(&u, &setup.differential(&f));
            let rhs = setup.directional(&u, &f);
            assert_eq!(lhs, rhs, "f = {f}, u = {u}");
        }
    }

    #[test]
    fn laurent_bracket_skew_and_jacobi() {
        let setup = laurent_setup(8, 1);
        let cfg = SuperpairConfig {
            triples: 6,
            ..Default::default()
        };
        let report = verify_superpair(&setup, &[rat(0), rat(1)], &cfg);
        assert!(report.passed(), "{report}");
    }

    #[test]
    fn matrix_superpair_small_run() {
        let setup = matrix_setup(6);
        let cfg = SuperpairConfig {
            triples: 3,
            ..Default::default()
        };
        let report = verify_superpair(&setup, &[rat(1)], &cfg);
        assert!(report.passed(), "{report}");
    }

    #[test]
    fn flipped_projection_breaks_the_superpair() {
        // On a commutative algebra both Adler brackets vanish identically
        // and any projection convention passes vacuously, so the control
        // runs on the noncommutative matrix fixture.
        let setup = matrix_setup(6);
        let cfg = SuperpairConfig {
            triples: 4,
            variant: AdlerVariant::MinusPlus,
            ..Default::default()
        };
        let report = verify_superpair(&setup, &[rat(1)], &cfg);
        assert!(!report.passed(), "the negative control must fail");
        assert!(report.first_failure().unwrap().detail.is_some());
    }

    #[test]
    fn commutative_fixture_is_flagged_as_vacuous() {
        let setup = laurent_setup(8, 1);
        let cfg = SuperpairConfig {
            triples: 4,
            ..Default::default()
        };
        let report = verify_superpair(&setup, &[rat(1)], &cfg);
        assert!(report.passed(), "{report}");
        assert!(report.flags.iter().any(|f| f.contains("vanished")));
    }

    #[test]
    fn noncentral_kappa_is_reported() {
        let alg = matrix_laurent(2, 1, 4);
        // κ = E11⊗1 = ς_{0,1} is not central.
        let l0 = PolElement::from_coords([
            (SignedIdx::plus(Parity::Even, 5), SuperPoly::one()),
            (SignedIdx::plus(Parity::Even, 6), SuperPoly::one()),
        ]);
        let kappa = PolElement::symbol(SignedIdx::plus(Parity::Even, 1));
        let setup = PoissonSetup::new(alg, 1, l0, kappa, [4, 4]).unwrap();
        let cfg = SuperpairConfig {
            triples: 2,
            ..Default::default()
        };
        let report = verify_superpair(&setup, &[rat(1)], &cfg);
        let central = report
            .items
            .iter()
            .find(|i| i.name == "kappa-central")
            .unwrap();
        assert_eq!(central.status, crate::check::CheckStatus::Fail);
    }

    #[test]
    fn cyclic_projection_on_both_fixtures() {
        for alg in [laurent(8), matrix_laurent(2, 1, 4)] {
            let report = cyclic_projection_check(&alg, 11, 20);
            assert!(report.passed(), "{report}");
        }
    }

    #[test]
    fn epsilon_expansion_is_exact() {
        let setup = laurent_setup(8, 1);
        let cfg = SuperpairConfig {
            triples: 4,
            ..Default::default()
        };
        let report = epsilon_expansion_check(&setup, &cfg);
        assert!(report.passed(), "{report}");
    }
}
