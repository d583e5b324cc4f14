//! Exact symbolic verification of Poisson superpairs and integrable hierarchies.
//!
//! This crate builds ℤ₂-graded associative algebras with supersymmetric
//! invariant bilinear forms, polarizes them into dual isotropic halves, and
//! constructs two families of compatible super Poisson brackets on top of them:
//!
//! * a **finite-dimensional family**: brackets on polynomials in the
//!   coordinates of a Lax element `L` of a windowed polarized algebra,
//!   defined through a pair of Adler-style maps ([`poisson`]);
//! * a **formal variational family**: brackets on local functionals of jet
//!   variables, where `L` is a pseudo-differential operator with coefficients
//!   in a graded algebra ([`pdo`]).
//!
//! Everything is computed over exact rationals ([`Rat`]); every check performed
//! by the `verify_*` entry points is an exact algebraic identity, not a
//! floating-point approximation.  Potential sources of incompleteness
//! (structure constants escaping a finite index window, coefficients pushed
//! below a pseudo-differential truncation floor) are tracked explicitly and
//! surface as errors or skipped-with-flag checks, never as silently wrong
//! values.
//!
//! Module map, bottom of the tower first:
//!
//! * [`superpoly`] — supercommutative polynomials over ℚ in even/odd
//!   variables, with super-derivations and the total jet derivative;
//! * [`graded`] — finite-dimensional graded algebras given by structure
//!   constants and a Gram matrix, with constructors for matrix superalgebras,
//!   Iwahori–Hecke algebras with Markov traces, twisted group algebras and
//!   graded tensor products;
//! * [`polarized`] — polarized algebras on a finite index window: the four
//!   product tables, reconstruction of the mixed products from the two
//!   isotropic halves, and the associated algebra filtration;
//! * [`poisson`] — the finite-dimensional Poisson superpair and its
//!   verification (skew symmetry, super Jacobi, super Leibniz);
//! * [`pdo`] — pseudo-differential operators with graded-algebra
//!   coefficients: variational derivatives, the Adler maps, fractional powers
//!   of Lax operators, conservation laws and zero-curvature equations;
//! * [`check`], [`linalg`], [`sample`] — report plumbing, exact linear
//!   algebra and seeded random sampling shared by the above.

pub mod check;
pub mod graded;
pub mod linalg;
pub mod parity;
pub mod pdo;
pub mod poisson;
pub mod polarized;
pub mod rat;
pub mod sample;
pub mod superpoly;

pub use check::{CheckItem, CheckReport, CheckStatus};
pub use parity::Parity;
pub use rat::Rat;
pub use superpoly::{Monomial, SuperPoly, VarId};
