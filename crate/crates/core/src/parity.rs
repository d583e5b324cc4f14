//! ℤ₂ grading degrees.

use std::fmt;
use std::ops::Add;

/// The degree of a homogeneous element of a ℤ₂-graded object.
///
/// `Even < Odd` in the derived order, which fixes the deterministic ordering
/// of variables and basis symbols throughout the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    /// Both parities, in order.
    pub const BOTH: [Parity; 2] = [Parity::Even, Parity::Odd];

    pub fn is_odd(self) -> bool {
        self == Parity::Odd
    }

    pub fn from_odd(odd: bool) -> Self {
        if odd {
            Parity::Odd
        } else {
            Parity::Even
        }
    }

    /// 0 for even, 1 for odd; handy as an array index.
    pub fn idx(self) -> usize {
        self as usize
    }

    pub fn flip(self) -> Self {
        Parity::from_odd(!self.is_odd())
    }
}

/// Degrees add mod 2: `Odd + Odd == Even`.
impl Add for Parity {
    type Output = Parity;
    fn add(self, rhs: Parity) -> Parity {
        Parity::from_odd(self.is_odd() != rhs.is_odd())
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Parity::Even => write!(f, "even"),
            Parity::Odd => write!(f, "odd"),
        }
    }
}

/// The Koszul sign `(-1)^{|a||b|}` picked up when homogeneous elements of
/// parities `a` and `b` move past each other: −1 iff both are odd.
pub fn koszul_sign(a: Parity, b: Parity) -> i8 {
    if a.is_odd() && b.is_odd() {
        -1
    } else {
        1
    }
}
