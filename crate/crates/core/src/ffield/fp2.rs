use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::arith::mul_mod;
use crate::error::{Error, Result};

use super::fp::{canonical_nonresidue, FpElement};

/// `F_{p^2} = F_p[t]/(t^2 - d)` with `d` the smallest non-residue mod `p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fp2Field {
    p: u64,
    d: u64,
}

impl Fp2Field {
    pub fn new(p: u64) -> Result<Self> {
        let d = canonical_nonresidue(p)?.value();
        Ok(Self { p, d })
    }

    /// Descriptor used only to carry `j = 0` for `p` = 2, 3, where the
    /// Legendre path is not used. `d = 0` marks the missing quadratic model.
    pub(crate) fn small_prime(p: u64) -> Self {
        debug_assert!(p == 2 || p == 3);
        Self { p, d: 0 }
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn nonresidue(&self) -> u64 {
        self.d
    }

    pub fn elem(&self, a: i64, b: i64) -> Fp2Element {
        Fp2Element {
            a: a.rem_euclid(self.p as i64) as u64,
            b: b.rem_euclid(self.p as i64) as u64,
            field: *self,
        }
    }

    pub fn from_fp(&self, x: FpElement) -> Fp2Element {
        debug_assert_eq!(x.modulus(), self.p);
        Fp2Element {
            a: x.value(),
            b: 0,
            field: *self,
        }
    }

    pub fn zero(&self) -> Fp2Element {
        self.elem(0, 0)
    }

    pub fn one(&self) -> Fp2Element {
        self.elem(1, 0)
    }

    /// The adjoined square root `t` of `d`.
    pub fn generator(&self) -> Fp2Element {
        self.elem(0, 1)
    }

    /// All `p^2` elements, in `(a, b)` order.
    pub fn elements(&self) -> impl Iterator<Item = Fp2Element> + '_ {
        let p = self.p;
        (0..p).flat_map(move |b| (0..p).map(move |a| Fp2Element { a, b, field: *self }))
    }

    /// Parses the `a` / `a+b*t` text encoding.
    pub fn parse(&self, s: &str) -> Result<Fp2Element> {
        let s = s.trim();
        let bad = || Error::invalid(format!("malformed F_p^2 literal {s:?}"));
        let num = |x: &str| x.trim().parse::<i64>().map_err(|_| bad());
        if let Some(rest) = s.strip_suffix("*t") {
            let (a, b) = rest.rsplit_once('+').ok_or_else(bad)?;
            Ok(self.elem(num(a)?, num(b)?))
        } else {
            Ok(self.elem(num(s)?, 0))
        }
    }
}

/// Element `a + b t` of `F_{p^2}`. Equality includes the field descriptor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fp2Element {
    a: u64,
    b: u64,
    field: Fp2Field,
}

impl Fp2Element {
    pub fn a(&self) -> FpElement {
        FpElement::from_reduced(self.a, self.field.p)
    }

    pub fn b(&self) -> FpElement {
        FpElement::from_reduced(self.b, self.field.p)
    }

    pub fn coords(&self) -> (u64, u64) {
        (self.a, self.b)
    }

    pub fn field(&self) -> Fp2Field {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.a == 0 && self.b == 0
    }

    /// True when the element lies in the prime field.
    pub fn is_in_prime_field(&self) -> bool {
        self.b == 0
    }

    pub fn conjugate(&self) -> Self {
        Self {
            a: self.a,
            b: if self.b == 0 {
                0
            } else {
                self.field.p - self.b
            },
            field: self.field,
        }
    }

    /// `a^2 - d b^2`.
    pub fn norm(&self) -> FpElement {
        let p = self.field.p;
        let aa = mul_mod(self.a, self.a, p);
        let dbb = mul_mod(self.field.d, mul_mod(self.b, self.b, p), p);
        FpElement::from_reduced(aa, p) - FpElement::from_reduced(dbb, p)
    }

    pub fn pow(&self, mut e: u128) -> Self {
        let mut base = *self;
        let mut acc = self.field.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self) -> Option<Self> {
        let n = self.norm().inv()?;
        let c = self.conjugate();
        Some(Self {
            a: (c.a() * n).value(),
            b: (c.b() * n).value(),
            field: self.field,
        })
    }
}

/// `x -> x^p`, which on `a + b t` is `a - b t`.
pub fn frobenius(x: &Fp2Element) -> Fp2Element {
    x.conjugate()
}

impl fmt::Display for Fp2Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b == 0 {
            write!(f, "{}", self.a)
        } else {
            write!(f, "{}+{}*t", self.a, self.b)
        }
    }
}

impl Add for Fp2Element {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        debug_assert_eq!(self.field, rhs.field);
        Self {
            a: (self.a() + rhs.a()).value(),
            b: (self.b() + rhs.b()).value(),
            field: self.field,
        }
    }
}

impl Sub for Fp2Element {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        debug_assert_eq!(self.field, rhs.field);
        Self {
            a: (self.a() - rhs.a()).value(),
            b: (self.b() - rhs.b()).value(),
            field: self.field,
        }
    }
}

impl Neg for Fp2Element {
    type Output = Self;
    fn neg(self) -> Self {
        self.field.zero() - self
    }
}

impl Mul for Fp2Element {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        debug_assert_eq!(self.field, rhs.field);
        let p = self.field.p;
        let d = FpElement::from_reduced(self.field.d, p);
        let (a, b, c, e) = (self.a(), self.b(), rhs.a(), rhs.b());
        Self {
            a: (a * c + d * b * e).value(),
            b: (a * e + b * c).value(),
            field: self.field,
        }
    }
}

impl Div for Fp2Element {
    type Output = Self;
    /// Panics on division by zero.
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Self) -> Self {
        self * rhs.inv().expect("division by zero in F_p^2")
    }
}

/// Legendre `j`-invariant `2^8 (λ² - λ + 1)³ / (λ² (λ - 1)²)`.
pub fn lambda_to_j(lambda: &Fp2Element) -> Result<Fp2Element> {
    let field = lambda.field();
    let one = field.one();
    let l = *lambda;
    if l.is_zero() || l == one {
        return Err(Error::invalid(
            "lambda_to_j: λ ∈ {0, 1} gives a singular Legendre curve",
        ));
    }
    let num = l * l - l + one;
    let den = l * l * (l - one) * (l - one);
    Ok(field.elem(256, 0) * num * num * num / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn field(p: u64) -> Fp2Field {
        Fp2Field::new(p).unwrap()
    }

    #[test]
    fn generator_squares_to_d() {
        for p in [3u64, 5, 7, 11, 13, 101] {
            let f = field(p);
            let t = f.generator();
            assert_eq!(t * t, f.elem(f.nonresidue() as i64, 0));
        }
    }

    #[test]
    fn frobenius_examples() {
        let f = field(5);
        assert_eq!(frobenius(&f.elem(3, 0)), f.elem(3, 0));
        assert_eq!(frobenius(&f.elem(0, 1)), f.elem(0, 4));
        // against the definition x^p
        for x in f.elements() {
            assert_eq!(frobenius(&x), x.pow(5));
        }
    }

    #[test]
    fn distinct_descriptors_never_equal() {
        assert_ne!(field(5).elem(1, 0), field(7).elem(1, 0));
    }

    #[test]
    fn text_encoding() {
        let f = field(13);
        assert_eq!(f.elem(5, 0).to_string(), "5");
        assert_eq!(f.elem(0, 4).to_string(), "0+4*t");
        assert_eq!(f.elem(3, 7).to_string(), "3+7*t");
        for x in [f.elem(5, 0), f.elem(0, 4), f.elem(12, 12)] {
            assert_eq!(f.parse(&x.to_string()).unwrap(), x);
        }
        assert!(f.parse("3+t").is_err());
        assert!(f.parse("").is_err());
    }

    #[test]
    fn j_of_minus_one_is_1728() {
        for p in [5u64, 7, 11, 13, 17, 101, 997] {
            let f = field(p);
            assert_eq!(
                lambda_to_j(&f.elem(-1, 0)).unwrap(),
                f.elem((1728 % p) as i64, 0)
            );
        }
        let f7 = field(7);
        assert_eq!(lambda_to_j(&f7.elem(2, 0)).unwrap(), f7.elem(6, 0));
        assert!(lambda_to_j(&f7.zero()).is_err());
        assert!(lambda_to_j(&f7.one()).is_err());
    }

    #[test]
    fn whole_field_axioms_small() {
        let f = field(7);
        let elems: Vec<_> = f.elements().collect();
        assert_eq!(elems.len(), 49);
        for &x in &elems {
            assert_eq!(x.pow(49), x);
            if !x.is_zero() {
                assert_eq!(x * x.inv().unwrap(), f.one());
            }
        }
    }

    fn arb_elem(p: u64) -> impl Strategy<Value = Fp2Element> {
        let f = field(p);
        (0..p as i64, 0..p as i64).prop_map(move |(a, b)| f.elem(a, b))
    }

    proptest! {
        #[test]
        fn fp2_axioms(x in arb_elem(10007), y in arb_elem(10007), z in arb_elem(10007)) {
            prop_assert_eq!((x * y) * z, x * (y * z));
            prop_assert_eq!(x * (y + z), x * y + x * z);
            prop_assert_eq!((x - y) + y, x);
            if !x.is_zero() {
                prop_assert_eq!(x * x.inv().unwrap(), x.field().one());
            }
        }

        #[test]
        fn frobenius_is_automorphism(x in arb_elem(997), y in arb_elem(997)) {
            prop_assert_eq!(frobenius(&(x * y)), frobenius(&x) * frobenius(&y));
            prop_assert_eq!(frobenius(&(x + y)), frobenius(&x) + frobenius(&y));
            prop_assert_eq!(frobenius(&frobenius(&x)), x);
            prop_assert_eq!(x.pow(997 * 997), x);
        }

        #[test]
        fn j_is_invariant_under_s3(x in arb_elem(1009)) {
            let f = x.field();
            let one = f.one();
            prop_assume!(!x.is_zero() && x != one);
            let j = lambda_to_j(&x).unwrap();
            let orbit = [
                one - x,
                one / x,
                one / (one - x),
                x / (x - one),
                (x - one) / x,
            ];
            for l in orbit {
                prop_assert_eq!(lambda_to_j(&l).unwrap(), j);
            }
        }
    }
}
