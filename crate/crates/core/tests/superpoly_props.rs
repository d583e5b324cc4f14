//! Property-based tests for the supercommutative polynomial ring and its
//! derivations.
//!
//! These are the laws every downstream computation leans on:
//!  - ring laws: associativity, distributivity, additive commutativity
//!  - supercommutativity: f·g = (−1)^{|f||g|} g·f on homogeneous parts
//!  - odd elements square to zero (characteristic 0)
//!  - the total derivative D is an even derivation
//!  - left partial derivatives satisfy the graded Leibniz rule
//!  - the jet-shift commutation [∂/∂v^{(m)}, D] = ∂/∂v^{(m−1)}
//!  - variational derivatives annihilate total derivatives

use proptest::prelude::*;
use superpair_core::pdo::variational_derivative;
use superpair_core::rat::rat;
use superpair_core::{Parity, SuperPoly, VarId};

/// Two even and two odd dependent variables, with jets 0 and 1.
fn var_pool() -> Vec<VarId> {
    let bases = [
        VarId::new(Parity::Even, 1),
        VarId::new(Parity::Even, 2),
        VarId::new(Parity::Odd, 1),
        VarId::new(Parity::Odd, 2),
    ];
    bases.into_iter().flat_map(|v| [v, v.raised()]).collect()
}

fn poly_strategy() -> impl Strategy<Value = SuperPoly> {
    // A small sum of monomials: each term is a coefficient and up to three
    // factors drawn from the pool (repeats allowed; odd repeats vanish).
    prop::collection::vec(
        (-4i64..=4, prop::collection::vec(0usize..8, 0..3)),
        0..4,
    )
    .prop_map(|terms| {
        let pool = var_pool();
        let mut out = SuperPoly::zero();
        for (c, factors) in terms {
            let mut m = SuperPoly::one();
            for f in factors {
                m = &m * &SuperPoly::var(pool[f]);
            }
            out = &out + &m.scale(&rat(c));
        }
        out
    })
}

fn koszul(p: Parity, q: Parity) -> i64 {
    if p == Parity::Odd && q == Parity::Odd {
        -1
    } else {
        1
    }
}

// ============================================================================
// Ring laws
// ============================================================================

proptest! {
    #[test]
    fn addition_commutes_and_associates(
        f in poly_strategy(),
        g in poly_strategy(),
        h in poly_strategy()
    ) {
        prop_assert_eq!(&f + &g, &g + &f);
        prop_assert_eq!(&(&f + &g) + &h, &f + &(&g + &h));
    }

    #[test]
    fn multiplication_associates(
        f in poly_strategy(),
        g in poly_strategy(),
        h in poly_strategy()
    ) {
        prop_assert_eq!(&(&f * &g) * &h, &f * &(&g * &h));
    }

    #[test]
    fn multiplication_distributes_over_addition(
        f in poly_strategy(),
        g in poly_strategy(),
        h in poly_strategy()
    ) {
        prop_assert_eq!(&f * &(&g + &h), &(&f * &g) + &(&f * &h));
        prop_assert_eq!(&(&f + &g) * &h, &(&f * &h) + &(&g * &h));
    }

    #[test]
    fn homogeneous_parts_supercommute(f in poly_strategy(), g in poly_strategy()) {
        for p in [Parity::Even, Parity::Odd] {
            for q in [Parity::Even, Parity::Odd] {
                let fp = f.parity_part(p);
                let gq = g.parity_part(q);
                let lhs = &fp * &gq;
                let rhs = (&gq * &fp).scale(&rat(koszul(p, q)));
                prop_assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn odd_polynomials_square_to_zero(f in poly_strategy()) {
        let odd = f.parity_part(Parity::Odd);
        prop_assert!((&odd * &odd).is_zero());
    }

    #[test]
    fn parity_parts_decompose(f in poly_strategy()) {
        let sum = &f.parity_part(Parity::Even) + &f.parity_part(Parity::Odd);
        prop_assert_eq!(sum, f);
    }
}

// ============================================================================
// Derivations
// ============================================================================

proptest! {
    #[test]
    fn total_derivative_is_an_even_derivation(
        f in poly_strategy(),
        g in poly_strategy()
    ) {
        let lhs = (&f * &g).total_derivative();
        let rhs = &(&f.total_derivative() * &g) + &(&f * &g.total_derivative());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn partial_derivatives_obey_the_graded_leibniz_rule(
        f in poly_strategy(),
        g in poly_strategy()
    ) {
        for v in var_pool() {
            for p in [Parity::Even, Parity::Odd] {
                let fp = f.parity_part(p);
                let lhs = (&fp * &g).derive(v);
                let sign = koszul(v.parity, p);
                let rhs = &(&fp.derive(v) * &g) + &(&fp * &g.derive(v)).scale(&rat(sign));
                prop_assert_eq!(lhs, rhs, "variable {}", v);
            }
        }
    }

    #[test]
    fn jet_shift_commutation_with_the_total_derivative(f in poly_strategy()) {
        // ∂/∂v^{(m)} ∘ D = D ∘ ∂/∂v^{(m)} + ∂/∂v^{(m−1)}.
        let df = f.total_derivative();
        for v in var_pool() {
            for m in [1u32, 2] {
                let vm = VarId::with_jet(v.parity, v.index, m);
                let vm1 = VarId::with_jet(v.parity, v.index, m - 1);
                let lhs = df.derive(vm);
                let rhs = &f.derive(vm).total_derivative() + &f.derive(vm1);
                prop_assert_eq!(lhs, rhs, "variable {} jet {}", v, m);
            }
        }
    }

    #[test]
    fn variational_derivatives_annihilate_total_derivatives(f in poly_strategy()) {
        let df = f.total_derivative();
        for v in var_pool() {
            let base = VarId::new(v.parity, v.index);
            prop_assert!(
                variational_derivative(&df, base).is_zero(),
                "δ_{} of a total derivative must vanish",
                base
            );
        }
    }
}
