//! Deterministic random sampling for property checks.
//!
//! Verification of identities that are multilinear in several inputs runs on
//! seeded random samples; the same seed always produces the same inputs, so a
//! failing witness can be reproduced exactly.

use crate::parity::Parity;
use crate::rat::{ratio, Rat};
use crate::superpoly::{Monomial, SuperPoly, VarId};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The RNG used for all sampling in this crate.
pub type SampleRng = ChaCha8Rng;

/// A seeded sampling stream.
pub fn rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A small nonzero rational from a fixed palette — large enough to exercise
/// signs and denominators, small enough to keep exact arithmetic fast.
pub fn small_rat(rng: &mut SampleRng) -> Rat {
    const PALETTE: [(i64, i64); 10] = [
        (1, 1),
        (-1, 1),
        (2, 1),
        (-2, 1),
        (1, 2),
        (-1, 2),
        (3, 1),
        (1, 3),
        (-2, 3),
        (5, 2),
    ];
    let (n, d) = PALETTE[rng.gen_range(0..PALETTE.len())];
    ratio(n, d)
}

/// A random monomial in `vars` of total degree at most `max_degree`
/// (degree 0 gives the monomial 1).  Repeated odd picks retry, so the result
/// is always a nonzero canonical monomial.
pub fn monomial(rng: &mut SampleRng, vars: &[VarId], max_degree: u32) -> Monomial {
    assert!(!vars.is_empty() || max_degree == 0);
    for _ in 0..64 {
        let deg = rng.gen_range(0..=max_degree);
        let factors: Vec<(VarId, u32)> = (0..deg)
            .map(|_| (vars[rng.gen_range(0..vars.len())], 1))
            .collect();
        if let Some((m, _)) = Monomial::from_factors(&factors) {
            return m;
        }
    }
    Monomial::one()
}

/// A random parity-homogeneous polynomial in `vars` of degree ≤ `max_degree`,
/// with 1–3 terms.  Returns `None` when no monomial of the requested parity
/// exists within the degree bound (e.g. odd parity with no odd variables).
pub fn homogeneous_poly(
    rng: &mut SampleRng,
    vars: &[VarId],
    max_degree: u32,
    parity: Parity,
) -> Option<SuperPoly> {
    let n_terms = rng.gen_range(1..=3);
    let mut p = SuperPoly::zero();
    let mut tries = 0;
    while p.num_terms() < n_terms && tries < 200 {
        tries += 1;
        let m = monomial(rng, vars, max_degree);
        if m.parity() == parity {
            p.add_term(m, small_rat(rng));
        }
    }
    if p.is_zero() {
        None
    } else {
        Some(p)
    }
}

/// A random (possibly mixed-parity) polynomial.
pub fn poly(rng: &mut SampleRng, vars: &[VarId], max_degree: u32) -> SuperPoly {
    let n_terms = rng.gen_range(1..=3);
    let mut p = SuperPoly::zero();
    for _ in 0..n_terms {
        p.add_term(monomial(rng, vars, max_degree), small_rat(rng));
    }
    p
}
