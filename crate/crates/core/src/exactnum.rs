//! Exact integers and rationals, Bernoulli numbers and `ζ(1 - 2k)`.
//!
//! Rationals are `num_rational::BigRational`, which keeps every value in
//! lowest terms with a positive denominator.

use std::sync::{OnceLock, RwLock};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};

pub use num_rational::BigRational;

use crate::error::{Error, Result};

/// Binomial coefficient `C(n, k)` as an exact integer.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    BigInt::from(acc)
}

/// Integer as a rational.
pub fn rat(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

/// `num / den` reduced.
pub fn ratio(num: impl Into<BigInt>, den: impl Into<BigInt>) -> BigRational {
    BigRational::new(num.into(), den.into())
}

/// Memoized Bernoulli numbers `B_0, B_1, B_2, ...` with `B_1 = -1/2`.
///
/// Entries are filled in order from the recurrence
/// `sum_{j=0}^{m} C(m+1, j) B_j = 0`. Readers share a lock; extension takes
/// the write lock and re-checks the length, so each index is computed once
/// and every caller sees the same value.
#[derive(Debug, Default)]
pub struct BernoulliTable {
    // values[n] = B_n, odd n > 1 stored as zero
    values: RwLock<Vec<BigRational>>,
}

impl BernoulliTable {
    pub fn new() -> Self {
        Self {
            values: RwLock::new(vec![BigRational::one()]),
        }
    }

    pub fn get(&self, n: usize) -> BigRational {
        {
            let values = self.values.read().expect("bernoulli table poisoned");
            if n < values.len() {
                return values[n].clone();
            }
        }
        let mut values = self.values.write().expect("bernoulli table poisoned");
        if values.is_empty() {
            values.push(BigRational::one());
        }
        while values.len() <= n {
            let m = values.len() as u64;
            let value = if m > 1 && m % 2 == 1 {
                BigRational::zero()
            } else {
                // B_m = -1/(m+1) * sum_{j<m} C(m+1, j) B_j
                let mut sum = BigRational::zero();
                for (j, b) in values.iter().enumerate() {
                    if !b.is_zero() {
                        sum += b * rat(binomial(m + 1, j as u64));
                    }
                }
                -sum / rat(m + 1)
            };
            values.push(value);
        }
        values[n].clone()
    }

    /// Number of entries currently cached.
    pub fn len(&self) -> usize {
        self.values.read().map(|v| v.len()).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn shared_table() -> &'static BernoulliTable {
    static TABLE: OnceLock<BernoulliTable> = OnceLock::new();
    TABLE.get_or_init(BernoulliTable::new)
}

/// The Bernoulli number `B_n` (convention `B_1 = -1/2`).
pub fn bernoulli(n: usize) -> BigRational {
    shared_table().get(n)
}

/// `ζ(1 - 2k) = -B_{2k} / (2k)` for `k >= 1`.
pub fn zeta_negative(k: u32) -> Result<BigRational> {
    if k == 0 {
        return Err(Error::InvalidArgument(
            "zeta_negative: k must be positive (zeta has a pole at 1)".into(),
        ));
    }
    let two_k = 2 * k as usize;
    Ok(-bernoulli(two_k) / rat(two_k as u64))
}

/// True when `x` has denominator one.
pub fn is_integral(x: &BigRational) -> bool {
    x.denom().is_one()
}

/// Sign of a rational as -1, 0 or 1.
pub fn signum(x: &BigRational) -> i32 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

/// Serde adapter writing rationals as `{"num": "...", "den": "..."}`.
pub mod rational_json {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use super::BigRational;

    #[derive(Serialize, Deserialize)]
    struct Repr {
        num: String,
        den: String,
    }

    fn to_repr(x: &BigRational) -> Repr {
        Repr {
            num: x.numer().to_string(),
            den: x.denom().to_string(),
        }
    }

    fn from_repr<E: serde::de::Error>(r: Repr) -> Result<BigRational, E> {
        let num: BigInt = r.num.parse().map_err(E::custom)?;
        let den: BigInt = r.den.parse().map_err(E::custom)?;
        if den == BigInt::from(0) {
            return Err(E::custom("zero denominator"));
        }
        Ok(BigRational::new(num, den))
    }

    pub fn serialize<S: Serializer>(x: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        to_repr(x).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        from_repr(Repr::deserialize(d)?)
    }

    pub mod option {
        use super::*;

        pub fn serialize<S: Serializer>(x: &Option<BigRational>, s: S) -> Result<S::Ok, S::Error> {
            x.as_ref().map(to_repr).serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            d: D,
        ) -> Result<Option<BigRational>, D::Error> {
            Option::<Repr>::deserialize(d)?
                .map(from_repr::<D::Error>)
                .transpose()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Akiyama–Tanigawa; yields the `B_1 = +1/2` convention.
    fn akiyama_tanigawa(n: usize) -> BigRational {
        let mut a: Vec<BigRational> = Vec::with_capacity(n + 1);
        for m in 0..=n {
            a.push(ratio(1, m as i64 + 1));
            for j in (1..=m).rev() {
                a[j - 1] = rat(j as i64) * (&a[j - 1] - &a[j]);
            }
        }
        a[0].clone()
    }

    #[test]
    fn small_values() {
        assert_eq!(bernoulli(0), rat(1));
        assert_eq!(bernoulli(1), ratio(-1, 2));
        assert_eq!(bernoulli(2), ratio(1, 6));
        assert_eq!(bernoulli(3), rat(0));
        assert_eq!(bernoulli(12), ratio(-691, 2730));
    }

    #[test]
    fn agrees_with_akiyama_tanigawa() {
        for n in 2..=40 {
            assert_eq!(bernoulli(n), akiyama_tanigawa(n), "B_{n}");
        }
        assert_eq!(akiyama_tanigawa(1), -bernoulli(1));
    }

    #[test]
    fn recurrence_holds() {
        for m in 1..=30u64 {
            let mut s = BigRational::zero();
            for j in 0..=m {
                s += rat(binomial(m + 1, j)) * bernoulli(j as usize);
            }
            assert!(s.is_zero(), "m = {m}");
        }
    }

    #[test]
    fn zeta_values() {
        assert_eq!(zeta_negative(1).unwrap(), ratio(-1, 12));
        assert_eq!(zeta_negative(2).unwrap(), ratio(1, 120));
        assert_eq!(zeta_negative(3).unwrap(), ratio(-1, 252));
        assert_eq!(zeta_negative(4).unwrap(), ratio(1, 240));
        assert!(zeta_negative(0).is_err());
    }

    #[test]
    fn zeta_sign_alternates() {
        for k in 1..=20u32 {
            let expected = if k % 2 == 0 { 1 } else { -1 };
            assert_eq!(signum(&zeta_negative(k).unwrap()), expected, "k = {k}");
        }
    }

    #[test]
    fn fresh_table_matches_shared() {
        let t = BernoulliTable::new();
        assert_eq!(t.get(20), bernoulli(20));
        assert_eq!(t.len(), 21);
    }

    #[test]
    fn concurrent_fill_is_consistent() {
        let t = BernoulliTable::new();
        let results: Vec<BigRational> = std::thread::scope(|s| {
            let handles: Vec<_> = (0..8).map(|_| s.spawn(|| t.get(36))).collect();
            handles.into_iter().map(|h| h.join().unwrap()).collect()
        });
        assert!(results.iter().all(|r| *r == results[0]));
    }

    #[test]
    fn binomial_row() {
        let row: Vec<BigInt> = (0..=5).map(|k| binomial(5, k)).collect();
        let expected: Vec<BigInt> = [1, 5, 10, 10, 5, 1]
            .iter()
            .map(|&v| BigInt::from(v))
            .collect();
        assert_eq!(row, expected);
        assert!(binomial(3, 4).is_zero());
    }

    fn small_rational() -> impl Strategy<Value = BigRational> {
        (-10_000i64..10_000, 1i64..10_000).prop_map(|(n, d)| ratio(n, d))
    }

    proptest! {
        #[test]
        fn add_sub_round_trip(x in small_rational(), y in small_rational()) {
            prop_assert_eq!(&(&x + &y) - &y, x);
        }

        #[test]
        fn reciprocal_round_trip(x in small_rational()) {
            prop_assume!(!x.is_zero());
            prop_assert_eq!(&x * x.recip(), rat(1));
        }

        #[test]
        fn canonical_form(x in small_rational(), y in small_rational()) {
            let z = &x * &y;
            prop_assert!(z.denom().is_positive());
            prop_assert!(num_integer::Integer::gcd(z.numer(), z.denom()).is_one());
        }
    }
}
