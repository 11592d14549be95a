use std::fmt;

use crate::arith::{mul_mod, pow_mod};
use crate::error::{Error, Result};

use super::fp::{check_modulus, FpElement, MAX_MODULUS};
use super::fp2::Fp2Element;

/// Dense polynomial over `F_p`, coefficients in ascending degree.
///
/// The representation is always trimmed: the zero polynomial has no
/// coefficients and otherwise the last coefficient is non-zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FpPoly {
    coeffs: Vec<u64>,
    p: u64,
}

impl FpPoly {
    /// Panics unless `2 <= p < 2^31`; primality is the caller's concern.
    pub fn new(coeffs: Vec<i64>, p: u64) -> Self {
        assert!((2..MAX_MODULUS).contains(&p), "modulus {p} out of range");
        let coeffs = coeffs
            .into_iter()
            .map(|c| c.rem_euclid(p as i64) as u64)
            .collect();
        Self::from_reduced(coeffs, p)
    }

    fn from_reduced(mut coeffs: Vec<u64>, p: u64) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Self { coeffs, p }
    }

    pub fn zero(p: u64) -> Self {
        Self { coeffs: vec![], p }
    }

    pub fn one(p: u64) -> Self {
        Self::from_reduced(vec![1], p)
    }

    /// The monomial `x`.
    pub fn x(p: u64) -> Self {
        Self::from_reduced(vec![0, 1], p)
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn coeffs(&self) -> Vec<FpElement> {
        self.coeffs
            .iter()
            .map(|&c| FpElement::new(c as i64, self.p))
            .collect()
    }

    pub fn raw_coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    fn lead(&self) -> u64 {
        *self
            .coeffs
            .last()
            .expect("leading coefficient of zero polynomial")
    }

    fn inv(&self, c: u64) -> u64 {
        pow_mod(c, self.p - 2, self.p)
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let l = self.inv(self.lead());
        Self::from_reduced(
            self.coeffs.iter().map(|&c| mul_mod(c, l, self.p)).collect(),
            self.p,
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let c = (0..n)
            .map(|i| {
                let s = self.coeffs.get(i).copied().unwrap_or(0)
                    + other.coeffs.get(i).copied().unwrap_or(0);
                s % self.p
            })
            .collect();
        Self::from_reduced(c, self.p)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let c = (0..n)
            .map(|i| {
                let a = self.coeffs.get(i).copied().unwrap_or(0);
                let b = other.coeffs.get(i).copied().unwrap_or(0);
                (a + self.p - b) % self.p
            })
            .collect();
        Self::from_reduced(c, self.p)
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.p);
        }
        let p = self.p;
        // coefficients are below 2^31, so each product fits in u64 and the
        // column sums fit in u128
        let mut acc = vec![0u128; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (slot, &b) in acc[i..].iter_mut().zip(&other.coeffs) {
                *slot += (a * b) as u128;
            }
        }
        let out = acc.into_iter().map(|v| (v % p as u128) as u64).collect();
        Self::from_reduced(out, p)
    }

    /// Euclidean division; panics if `divisor` is zero.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        assert!(!divisor.is_zero(), "polynomial division by zero");
        let p = self.p;
        let dd = divisor.coeffs.len() - 1;
        if self.coeffs.len() <= dd {
            return (Self::zero(p), self.clone());
        }
        let li = self.inv(divisor.lead());
        let mut rem = self.coeffs.clone();
        let mut quot = vec![0u64; rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = mul_mod(rem[k + dd], li, p);
            if c == 0 {
                continue;
            }
            quot[k] = c;
            for (r, &dc) in rem[k..].iter_mut().zip(&divisor.coeffs) {
                let v = *r + p - (c * dc) % p;
                *r = if v >= p { v - p } else { v };
            }
        }
        rem.truncate(dd);
        (Self::from_reduced(quot, p), Self::from_reduced(rem, p))
    }

    pub fn rem(&self, divisor: &Self) -> Self {
        self.div_rem(divisor).1
    }

    /// Monic gcd; `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn derivative(&self) -> Self {
        let p = self.p;
        let c = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| mul_mod(c, i as u64 % p, p))
            .collect();
        Self::from_reduced(c, p)
    }

    /// `self^e mod modulus` by square-and-multiply.
    pub fn pow_mod(&self, mut e: u128, modulus: &Self) -> Self {
        let mut base = self.rem(modulus);
        let mut acc = Self::one(self.p).rem(modulus);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).rem(modulus);
            }
            base = base.mul(&base).rem(modulus);
            e >>= 1;
        }
        acc
    }

    pub fn eval(&self, x: FpElement) -> FpElement {
        self.coeffs
            .iter()
            .rev()
            .fold(FpElement::zero(self.p), |acc, &c| {
                acc * x + FpElement::new(c as i64, self.p)
            })
    }

    pub fn eval_fp2(&self, x: &Fp2Element) -> Fp2Element {
        let f = x.field();
        self.coeffs
            .iter()
            .rev()
            .fold(f.zero(), |acc, &c| acc * *x + f.elem(c as i64, 0))
    }
}

impl fmt::Display for FpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match (i, c) {
                (0, _) => write!(f, "{c}")?,
                (1, 1) => write!(f, "x")?,
                (1, _) => write!(f, "{c}*x")?,
                (_, 1) => write!(f, "x^{i}")?,
                _ => write!(f, "{c}*x^{i}")?,
            }
        }
        Ok(())
    }
}

/// Legendre-form Hasse polynomial `sum_{i=0}^{m} C(m,i)^2 λ^i`, `m = (p-1)/2`.
pub fn hasse_poly(p: u64) -> Result<FpPoly> {
    if p == 2 || p == 3 {
        return Err(Error::invalid(
            "hasse_poly: p = 2, 3 are handled by the fixed small-prime census",
        ));
    }
    check_modulus(p)?;
    let m = (p - 1) / 2;
    let mut coeffs = Vec::with_capacity(m as usize + 1);
    // C(m, i) mod p; every i + 1 <= m < p is invertible
    let mut binom = 1u64;
    for i in 0..=m {
        coeffs.push(mul_mod(binom, binom, p));
        if i < m {
            binom = mul_mod(binom, (m - i) % p, p);
            binom = mul_mod(binom, pow_mod(i + 1, p - 2, p), p);
        }
    }
    Ok(FpPoly::from_reduced(coeffs, p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn poly(c: &[i64], p: u64) -> FpPoly {
        FpPoly::new(c.to_vec(), p)
    }

    #[test]
    fn hasse_small() {
        assert_eq!(hasse_poly(5).unwrap(), poly(&[1, 4, 1], 5));
        assert_eq!(hasse_poly(7).unwrap(), poly(&[1, 2, 2, 1], 7));
        assert!(hasse_poly(3).is_err());
        assert!(hasse_poly(2).is_err());
        assert!(hasse_poly(15).is_err());
    }

    #[test]
    fn hasse_degree_and_squarefree() {
        for p in crate::arith::primes_between(5, 199) {
            let h = hasse_poly(p).unwrap();
            assert_eq!(h.degree(), Some(((p - 1) / 2) as usize), "p = {p}");
            assert_eq!(h.gcd(&h.derivative()).degree(), Some(0), "p = {p}");
        }
    }

    #[test]
    fn trimming_and_display() {
        let f = poly(&[1, 0, 5, 0, 0], 5);
        assert_eq!(f.degree(), Some(0));
        assert_eq!(FpPoly::zero(5).degree(), None);
        assert_eq!(poly(&[1, 4, 1], 5).to_string(), "1 + 4*x + x^2");
    }

    #[test]
    fn x_to_the_p_is_frobenius() {
        // x^p ≡ x (mod x^p - x) and x^(p^2) reduces mod any f consistently
        let p = 13u64;
        let mut c = vec![0i64; p as usize + 1];
        c[1] = -1;
        c[p as usize] = 1;
        let modulus = poly(&c, p);
        assert_eq!(FpPoly::x(p).pow_mod(p as u128, &modulus), FpPoly::x(p));
    }

    fn arb_poly(p: u64) -> impl Strategy<Value = FpPoly> {
        proptest::collection::vec(0..p as i64, 0..12).prop_map(move |c| FpPoly::new(c, p))
    }

    proptest! {
        #[test]
        fn division_identity(a in arb_poly(101), b in arb_poly(101)) {
            prop_assume!(!b.is_zero());
            let (q, r) = a.div_rem(&b);
            prop_assert_eq!(q.mul(&b).add(&r), a);
            prop_assert!(r.degree().is_none_or(|d| d < b.degree().unwrap()));
        }

        #[test]
        fn gcd_divides_both(a in arb_poly(31), b in arb_poly(31)) {
            let g = a.gcd(&b);
            prop_assume!(!g.is_zero());
            prop_assert!(a.rem(&g).is_zero());
            prop_assert!(b.rem(&g).is_zero());
        }

        #[test]
        fn ring_laws(a in arb_poly(17), b in arb_poly(17), c in arb_poly(17)) {
            prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
            prop_assert_eq!(a.sub(&b).add(&b), a.clone());
            let x = FpElement::new(3, 17);
            prop_assert_eq!(a.mul(&b).eval(x), a.eval(x) * b.eval(x));
        }
    }
}
