//! Arithmetic in the prime field `F_d = Z/dZ`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{invalid, Result};

/// Largest supported modulus. Symbols of the Pauli alphabet are `d²` and
/// coordinates are stored as `u32`, so this is only a sanity bound.
pub const MAX_MODULUS: u32 = 251;

/// A prime field `F_d`, checked for primality at construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrimeField {
    d: u32,
}

impl PrimeField {
    pub fn new(d: u32) -> Result<Self> {
        if d < 2 || d > MAX_MODULUS {
            return invalid(format!("field size {d} outside [2, {MAX_MODULUS}]"));
        }
        if !is_prime(d) {
            return invalid(format!("field size {d} is not prime"));
        }
        Ok(Self { d })
    }

    /// The binary field, used pervasively in tests and examples.
    pub fn binary() -> Self {
        Self { d: 2 }
    }

    #[inline]
    pub fn modulus(self) -> u32 {
        self.d
    }

    #[inline]
    pub fn elem(self, value: u32) -> FieldElem {
        FieldElem {
            value: value % self.d,
            modulus: self.d,
        }
    }

    #[inline]
    pub fn zero(self) -> FieldElem {
        self.elem(0)
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        (a + b) % self.d
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        (a + self.d - b) % self.d
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        (a * b) % self.d
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        (self.d - a) % self.d
    }

    /// Multiplicative inverse by Fermat's little theorem. `a` must be nonzero.
    pub fn inv(self, a: u32) -> u32 {
        debug_assert!(a % self.d != 0, "inverse of zero");
        let mut base = a % self.d;
        let mut exp = self.d - 2;
        let mut acc = 1;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }
}

fn is_prime(d: u32) -> bool {
    d >= 2 && (2..).take_while(|p| p * p <= d).all(|p| d % p != 0)
}

/// An element of `F_d` carrying its modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElem {
    value: u32,
    modulus: u32,
}

impl FieldElem {
    #[inline]
    pub fn value(self) -> u32 {
        self.value
    }

    #[inline]
    pub fn modulus(self) -> u32 {
        self.modulus
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    #[inline]
    fn check(self, other: Self) {
        assert_eq!(self.modulus, other.modulus, "mixed field moduli");
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Add for FieldElem {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.check(rhs);
        Self {
            value: (self.value + rhs.value) % self.modulus,
            modulus: self.modulus,
        }
    }
}

impl Sub for FieldElem {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self.check(rhs);
        Self {
            value: (self.value + self.modulus - rhs.value) % self.modulus,
            modulus: self.modulus,
        }
    }
}

impl Mul for FieldElem {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.check(rhs);
        Self {
            value: (self.value * rhs.value) % self.modulus,
            modulus: self.modulus,
        }
    }
}

impl Neg for FieldElem {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            value: (self.modulus - self.value) % self.modulus,
            modulus: self.modulus,
        }
    }
}
