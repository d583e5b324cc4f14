//! Supercommutative polynomials over ℚ.
//!
//! A [`SuperPoly`] is a polynomial in even and odd variables: even variables
//! commute with everything, odd variables anticommute with each other and
//! square to zero.  Monomials are kept in a canonical sorted form, and every
//! product records the Koszul sign picked up while sorting, so equality of
//! polynomials is literal equality of the canonical representation.
//!
//! Besides ring arithmetic the module provides the two derivations the rest
//! of the crate is built on:
//!
//! * [`SuperPoly::derive`] — the left super-derivation `∂_v` with
//!   `∂_v(x) = δ_{v,x}`, satisfying `∂_v(fg) = ∂_v(f)·g + (−1)^{|v||f|} f·∂_v(g)`;
//! * [`SuperPoly::total_derivative`] — the even derivation `∂` sending each
//!   variable to the same variable with its jet index raised by one
//!   (`∂ = Σ_v v⁽ᵐ⁺¹⁾ ∂/∂v⁽ᵐ⁾`), used by the variational-calculus layer.

use crate::parity::Parity;
use crate::rat::{rat, Rat};
use num::Zero;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// A polynomial variable: parity, an index, and a jet depth.
///
/// The jet depth counts total derivatives: `jet == 0` is the variable itself,
/// `jet == m` its m-th derivative.  Contexts without a derivative simply keep
/// `jet == 0`.  Variables order by `(parity, index, jet)`, which fixes the
/// canonical monomial order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId {
    pub parity: Parity,
    pub index: i64,
    pub jet: u32,
}

impl VarId {
    pub fn new(parity: Parity, index: i64) -> Self {
        VarId {
            parity,
            index,
            jet: 0,
        }
    }

    pub fn with_jet(parity: Parity, index: i64, jet: u32) -> Self {
        VarId { parity, index, jet }
    }

    /// The same variable one jet level up (its total derivative).
    pub fn raised(self) -> Self {
        VarId {
            jet: self.jet + 1,
            ..self
        }
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let base = match self.parity {
            Parity::Even => 'x',
            Parity::Odd => 'y',
        };
        write!(f, "{base}{}", self.index)?;
        match self.jet {
            0 => Ok(()),
            m @ 1..=3 => write!(f, "{}", "'".repeat(m as usize)),
            m => write!(f, "^({m})"),
        }
    }
}

/// A canonical supercommutative monomial: factors sorted by [`VarId`], even
/// exponents arbitrary, odd exponents exactly 1.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial {
    factors: Vec<(VarId, u32)>,
}

impl Monomial {
    /// The empty monomial `1`.
    pub fn one() -> Self {
        Monomial::default()
    }

    /// The monomial consisting of a single variable.
    pub fn var(v: VarId) -> Self {
        Monomial {
            factors: vec![(v, 1)],
        }
    }

    /// Builds a monomial from arbitrary factors, sorting them and collecting
    /// the Koszul sign; returns `None` when an odd variable repeats (the
    /// monomial is zero).
    ///
    /// # Example
    /// ```
    /// use superpair_core::{Monomial, Parity, VarId};
    /// let y1 = VarId::new(Parity::Odd, 1);
    /// let y2 = VarId::new(Parity::Odd, 2);
    /// // y2·y1 = −y1·y2: one odd transposition.
    /// let (m, sign) = Monomial::from_factors(&[(y2, 1), (y1, 1)]).unwrap();
    /// assert_eq!(sign, -1);
    /// assert_eq!(m, Monomial::var(y1).mul(&Monomial::var(y2)).unwrap().0);
    /// // y1·y1 = 0.
    /// assert!(Monomial::from_factors(&[(y1, 2)]).is_none());
    /// ```
    pub fn from_factors(factors: &[(VarId, u32)]) -> Option<(Self, i8)> {
        let mut acc = Monomial::one();
        let mut sign = 1i8;
        for &(v, e) in factors {
            if e == 0 {
                continue;
            }
            if v.parity.is_odd() && e > 1 {
                return None;
            }
            let single = Monomial {
                factors: vec![(v, e)],
            };
            // Fold one factor at a time; mul handles sorting and signs.
            let (m, s) = acc.mul(&single)?;
            acc = m;
            sign *= s;
        }
        Some((acc, sign))
    }

    pub fn factors(&self) -> &[(VarId, u32)] {
        &self.factors
    }

    pub fn degree(&self) -> u32 {
        self.factors.iter().map(|&(_, e)| e).sum()
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    /// Total parity: the number of odd factors mod 2.
    pub fn parity(&self) -> Parity {
        let odd = self
            .factors
            .iter()
            .filter(|(v, _)| v.parity.is_odd())
            .count();
        Parity::from_odd(odd % 2 == 1)
    }

    pub fn exponent_of(&self, v: VarId) -> u32 {
        self.factors
            .iter()
            .find(|&&(w, _)| w == v)
            .map_or(0, |&(_, e)| e)
    }

    /// Product of two canonical monomials: `None` if an odd variable repeats,
    /// otherwise the sorted product and the Koszul sign of the merge.
    pub fn mul(&self, other: &Monomial) -> Option<(Monomial, i8)> {
        let mut out = Vec::with_capacity(self.factors.len() + other.factors.len());
        let mut sign = 1i8;
        // Number of odd factors of `self` not yet emitted: each factor of
        // `other` that lands before them in sorted order must jump over all
        // of them, contributing one transposition sign per odd factor passed.
        let mut odd_left: u32 = self
            .factors
            .iter()
            .filter(|(v, _)| v.parity.is_odd())
            .count() as u32;
        let mut i = 0;
        let mut j = 0;
        while i < self.factors.len() && j < other.factors.len() {
            let (va, ea) = self.factors[i];
            let (vb, eb) = other.factors[j];
            match va.cmp(&vb) {
                std::cmp::Ordering::Less => {
                    out.push((va, ea));
                    if va.parity.is_odd() {
                        odd_left -= 1;
                    }
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    if vb.parity.is_odd() && odd_left % 2 == 1 {
                        sign = -sign;
                    }
                    out.push((vb, eb));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    if va.parity.is_odd() {
                        return None; // odd variable squared
                    }
                    out.push((va, ea + eb));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.factors[i..]);
        out.extend_from_slice(&other.factors[j..]);
        Some((Monomial { factors: out }, sign))
    }

    /// Left super-derivative by `v`: returns `(sign·exponent, reduced monomial)`
    /// or `None` when `v` does not occur.
    ///
    /// For odd `v` the sign is `(−1)^k` with `k` the number of odd factors
    /// strictly before `v`, from moving `∂_v` past them.
    pub fn derive(&self, v: VarId) -> Option<(Rat, Monomial)> {
        let pos = self.factors.iter().position(|&(w, _)| w == v)?;
        let (_, e) = self.factors[pos];
        let mut coeff = rat(e as i64);
        if v.parity.is_odd() {
            let odd_before = self.factors[..pos]
                .iter()
                .filter(|(w, _)| w.parity.is_odd())
                .count();
            if odd_before % 2 == 1 {
                coeff = -coeff;
            }
        }
        let mut factors = self.factors.clone();
        if e > 1 {
            factors[pos].1 = e - 1;
        } else {
            factors.remove(pos);
        }
        Some((coeff, Monomial { factors }))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        for (i, (v, e)) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, "·")?;
            }
            write!(f, "{v}")?;
            if *e > 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

/// A supercommutative polynomial: a finite ℚ-linear combination of canonical
/// monomials, stored without zero coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SuperPoly {
    terms: BTreeMap<Monomial, Rat>,
}

impl SuperPoly {
    pub fn zero() -> Self {
        SuperPoly::default()
    }

    pub fn one() -> Self {
        SuperPoly::constant(rat(1))
    }

    pub fn constant(c: Rat) -> Self {
        let mut p = SuperPoly::zero();
        p.add_term(Monomial::one(), c);
        p
    }

    pub fn var(v: VarId) -> Self {
        let mut p = SuperPoly::zero();
        p.add_term(Monomial::var(v), rat(1));
        p
    }

    pub fn monomial(m: Monomial, c: Rat) -> Self {
        let mut p = SuperPoly::zero();
        p.add_term(m, c);
        p
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, Rat)>) -> Self {
        let mut p = SuperPoly::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rat)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Coefficient of a canonical monomial (zero if absent).
    pub fn coeff(&self, m: &Monomial) -> Rat {
        self.terms.get(m).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn constant_term(&self) -> Rat {
        self.coeff(&Monomial::one())
    }

    /// Adds `c·m`, dropping the entry if the total cancels.
    pub fn add_term(&mut self, m: Monomial, c: Rat) {
        use std::collections::btree_map::Entry;
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &Rat) -> SuperPoly {
        if c.is_zero() {
            return SuperPoly::zero();
        }
        SuperPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, v)| (m.clone(), v * c))
                .collect(),
        }
    }

    /// `Some(p)` if every monomial has parity `p` (zero counts as even),
    /// `None` for a mixed-parity polynomial.
    pub fn parity(&self) -> Option<Parity> {
        let mut seen: Option<Parity> = None;
        for m in self.terms.keys() {
            let p = m.parity();
            match seen {
                None => seen = Some(p),
                Some(q) if q != p => return None,
                _ => {}
            }
        }
        Some(seen.unwrap_or(Parity::Even))
    }

    /// The part of the given parity.
    pub fn parity_part(&self, p: Parity) -> SuperPoly {
        SuperPoly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.parity() == p)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Left super-derivative `∂_v`.
    pub fn derive(&self, v: VarId) -> SuperPoly {
        let mut out = SuperPoly::zero();
        for (m, c) in &self.terms {
            if let Some((k, reduced)) = m.derive(v) {
                out.add_term(reduced, c * k);
            }
        }
        out
    }

    /// The total (jet-raising) derivative `∂ = Σ_v v.raised()·∂_v`.
    pub fn total_derivative(&self) -> SuperPoly {
        let mut out = SuperPoly::zero();
        for v in self.vars() {
            let d = self.derive(v);
            if !d.is_zero() {
                out = &out + &(&SuperPoly::var(v.raised()) * &d);
            }
        }
        out
    }

    /// `n`-fold total derivative.
    pub fn nth_total_derivative(&self, n: u32) -> SuperPoly {
        let mut p = self.clone();
        for _ in 0..n {
            p = p.total_derivative();
        }
        p
    }

    /// All variables occurring in the polynomial.
    pub fn vars(&self) -> BTreeSet<VarId> {
        self.terms
            .keys()
            .flat_map(|m| m.factors().iter().map(|&(v, _)| v))
            .collect()
    }

    /// Maximal total degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }
}

impl Add for &SuperPoly {
    type Output = SuperPoly;
    fn add(self, rhs: &SuperPoly) -> SuperPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &SuperPoly {
    type Output = SuperPoly;
    fn sub(self, rhs: &SuperPoly) -> SuperPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl Neg for &SuperPoly {
    type Output = SuperPoly;
    fn neg(self) -> SuperPoly {
        self.scale(&rat(-1))
    }
}

impl Mul for &SuperPoly {
    type Output = SuperPoly;
    fn mul(self, rhs: &SuperPoly) -> SuperPoly {
        let mut out = SuperPoly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                if let Some((m, sign)) = m1.mul(m2) {
                    let mut c = c1 * c2;
                    if sign < 0 {
                        c = -c;
                    }
                    out.add_term(m, c);
                }
            }
        }
        out
    }
}

impl fmt::Display for SuperPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let neg = c < &Rat::zero();
            let abs = if neg { -c.clone() } else { c.clone() };
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let unit_coeff = abs == rat(1);
            if m.is_one() {
                write!(f, "{}", crate::rat::format_rat(&abs))?;
            } else if unit_coeff {
                write!(f, "{m}")?;
            } else {
                write!(f, "{}·{m}", crate::rat::format_rat(&abs))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::ratio;

    fn ev(i: i64) -> VarId {
        VarId::new(Parity::Even, i)
    }
    fn od(i: i64) -> VarId {
        VarId::new(Parity::Odd, i)
    }

    #[test]
    fn odd_variables_anticommute_and_square_to_zero() {
        let y1 = SuperPoly::var(od(1));
        let y2 = SuperPoly::var(od(2));
        assert_eq!(&y1 * &y2, -&(&y2 * &y1));
        assert!((&y1 * &y1).is_zero());
    }

    #[test]
    fn even_variables_commute_with_everything() {
        let x = SuperPoly::var(ev(1));
        let y = SuperPoly::var(od(1));
        assert_eq!(&x * &y, &y * &x);
    }

    #[test]
    fn three_odd_factors_sort_with_the_right_sign() {
        // y3·y1·y2 = +y1·y2·y3 (two transpositions).
        let (m, sign) =
            Monomial::from_factors(&[(od(3), 1), (od(1), 1), (od(2), 1)]).unwrap();
        assert_eq!(sign, 1);
        assert_eq!(
            m,
            Monomial::from_factors(&[(od(1), 1), (od(2), 1), (od(3), 1)])
                .unwrap()
                .0
        );
        // y2·y1·y3 = −y1·y2·y3 (one transposition).
        let (_, sign) =
            Monomial::from_factors(&[(od(2), 1), (od(1), 1), (od(3), 1)]).unwrap();
        assert_eq!(sign, -1);
    }

    #[test]
    fn derive_satisfies_super_leibniz_on_a_sample() {
        // ∂_{y2}(y1·y2) = −y1: the derivation moves past the odd y1.
        let y1y2 = &SuperPoly::var(od(1)) * &SuperPoly::var(od(2));
        assert_eq!(y1y2.derive(od(2)), -&SuperPoly::var(od(1)));
        // ∂_{y1}(y1·y2) = y2.
        assert_eq!(y1y2.derive(od(1)), SuperPoly::var(od(2)));
        // Even powers: ∂_x(x³) = 3x².
        let x = SuperPoly::var(ev(1));
        let x3 = &(&x * &x) * &x;
        let mut expect = SuperPoly::zero();
        expect.add_term(Monomial::from_factors(&[(ev(1), 2)]).unwrap().0, rat(3));
        assert_eq!(x3.derive(ev(1)), expect);
    }

    #[test]
    fn odd_partials_anticommute() {
        let p = {
            // A polynomial with several odd variables in one monomial.
            let y1 = SuperPoly::var(od(1));
            let y2 = SuperPoly::var(od(2));
            let y3 = SuperPoly::var(od(3));
            &(&y1 * &y2) * &y3
        };
        let d12 = p.derive(od(1)).derive(od(2));
        let d21 = p.derive(od(2)).derive(od(1));
        assert_eq!(d12, -&d21);
    }

    #[test]
    fn total_derivative_is_an_even_derivation() {
        // ∂(y1·y2) = y1'·y2 + y1·y2' with no sign: the jet-raised
        // coefficient multiplies from the left, cancelling the Koszul sign.
        let y1 = SuperPoly::var(od(1));
        let y2 = SuperPoly::var(od(2));
        let p = &y1 * &y2;
        let d = p.total_derivative();
        let y1p = SuperPoly::var(od(1).raised());
        let y2p = SuperPoly::var(od(2).raised());
        assert_eq!(d, &(&y1p * &y2) + &(&y1 * &y2p));

        // Leibniz for the total derivative on a mixed product.
        let x = SuperPoly::var(ev(7));
        let fg = &p * &x;
        assert_eq!(
            fg.total_derivative(),
            &(&p.total_derivative() * &x) + &(&p * &x.total_derivative())
        );
    }

    #[test]
    fn parity_classification() {
        let x = SuperPoly::var(ev(1));
        let y = SuperPoly::var(od(1));
        assert_eq!(x.parity(), Some(Parity::Even));
        assert_eq!(y.parity(), Some(Parity::Odd));
        assert_eq!((&x + &y).parity(), None);
        assert_eq!(SuperPoly::zero().parity(), Some(Parity::Even));
        assert_eq!((&x + &y).parity_part(Parity::Odd), y);
    }

    #[test]
    fn display_is_readable() {
        let p = &SuperPoly::constant(ratio(-1, 2)) + &SuperPoly::var(ev(1));
        assert_eq!(p.to_string(), "-1/2 + x1");
        assert_eq!(SuperPoly::zero().to_string(), "0");
        let j = SuperPoly::var(ev(2).raised());
        assert_eq!(j.to_string(), "x2'");
    }

    #[test]
    fn cancellation_removes_terms() {
        let x = SuperPoly::var(ev(1));
        let d = &x - &x;
        assert!(d.is_zero());
        assert_eq!(d.num_terms(), 0);
    }
}
