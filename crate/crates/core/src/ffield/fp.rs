use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::arith::{is_prime, mul_mod, pow_mod};
use crate::error::{Error, Result};

/// Largest accepted modulus (exclusive).
pub const MAX_MODULUS: u64 = 1 << 31;

/// Residue modulo an odd word-size prime `p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FpElement {
    value: u64,
    p: u64,
}

pub(crate) fn check_modulus(p: u64) -> Result<()> {
    if p >= MAX_MODULUS {
        return Err(Error::invalid(format!("modulus {p} exceeds 2^31")));
    }
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    Ok(())
}

impl FpElement {
    pub fn new(value: i64, p: u64) -> Self {
        debug_assert!(p > 1);
        Self {
            value: value.rem_euclid(p as i64) as u64,
            p,
        }
    }

    /// From an already-reduced residue.
    pub(crate) fn from_reduced(value: u64, p: u64) -> Self {
        debug_assert!(value < p);
        Self { value, p }
    }

    pub fn zero(p: u64) -> Self {
        Self { value: 0, p }
    }

    pub fn one(p: u64) -> Self {
        Self { value: 1 % p, p }
    }

    pub fn value(self) -> u64 {
        self.value
    }

    pub fn modulus(self) -> u64 {
        self.p
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    pub fn pow(self, e: u64) -> Self {
        Self {
            value: pow_mod(self.value, e, self.p),
            p: self.p,
        }
    }

    pub fn inv(self) -> Option<Self> {
        if self.value == 0 {
            None
        } else {
            Some(self.pow(self.p - 2))
        }
    }

    /// Euler criterion: 1, -1 or 0.
    pub fn legendre(self) -> i32 {
        if self.value == 0 {
            return 0;
        }
        if self.pow((self.p - 1) / 2).value == 1 {
            1
        } else {
            -1
        }
    }

    /// Square root by Tonelli–Shanks, `None` for non-residues.
    pub fn sqrt(self) -> Option<Self> {
        let p = self.p;
        if self.value == 0 {
            return Some(self);
        }
        if p == 2 {
            return Some(self);
        }
        if self.legendre() != 1 {
            return None;
        }
        if p % 4 == 3 {
            return Some(self.pow((p + 1) / 4));
        }
        let mut q = p - 1;
        let mut s = 0u32;
        while q.is_multiple_of(2) {
            q /= 2;
            s += 1;
        }
        let z = (2..p)
            .map(|z| FpElement::from_reduced(z, p))
            .find(|z| z.legendre() == -1)
            .expect("odd prime has a non-residue");
        let mut m = s;
        let mut c = z.pow(q);
        let mut t = self.pow(q);
        let mut r = self.pow(q.div_ceil(2));
        while t.value != 1 {
            let mut i = 0;
            let mut t2 = t;
            while t2.value != 1 {
                t2 = t2 * t2;
                i += 1;
            }
            let b = c.pow(1 << (m - i - 1));
            m = i;
            c = b * b;
            t = t * c;
            r = r * b;
        }
        Some(r)
    }
}

impl fmt::Display for FpElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Add for FpElement {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        debug_assert_eq!(self.p, rhs.p);
        let s = self.value + rhs.value;
        Self {
            value: if s >= self.p { s - self.p } else { s },
            p: self.p,
        }
    }
}

impl Sub for FpElement {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        debug_assert_eq!(self.p, rhs.p);
        Self {
            value: if self.value >= rhs.value {
                self.value - rhs.value
            } else {
                self.value + self.p - rhs.value
            },
            p: self.p,
        }
    }
}

impl Neg for FpElement {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            value: if self.value == 0 {
                0
            } else {
                self.p - self.value
            },
            p: self.p,
        }
    }
}

impl Mul for FpElement {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        debug_assert_eq!(self.p, rhs.p);
        Self {
            value: mul_mod(self.value, rhs.value, self.p),
            p: self.p,
        }
    }
}

impl Div for FpElement {
    type Output = Self;
    /// Panics on division by zero.
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Self) -> Self {
        self * rhs.inv().expect("division by zero in F_p")
    }
}

/// Smallest positive `d` with `d^((p-1)/2) = -1 (mod p)`.
pub fn canonical_nonresidue(p: u64) -> Result<FpElement> {
    if p == 2 {
        return Err(Error::invalid("F_2 has no quadratic non-residue"));
    }
    check_modulus(p)?;
    Ok((2..p)
        .map(|d| FpElement::from_reduced(d, p))
        .find(|d| d.legendre() == -1)
        .expect("odd prime has a non-residue"))
}
