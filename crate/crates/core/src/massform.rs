//! Mass formulas and level-`N` class numbers for the principal and
//! non-principal genera.
//!
//! With `ζ(1-2k) = -B_{2k}/2k`:
//!
//! ```text
//! M(g, p)  = (-1)^{g(g+1)/2} / 2^g · Π_{k=1}^{g} ζ(1-2k) · Π_{k=1}^{g} (p^k + (-1)^k)
//! H_N      = |GSp_{2g}(Z/N)| · M(g, p)                                   (N >= 3)
//! H'_N     = |GSp_{2g}(Z/N)| · (-1)^{g(g+1)/2} / 2^g · Π ζ(1-2k) · Π_{k=1}^{g/2} (p^{4k-2} - 1)
//! ```

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed};
use serde::{Deserialize, Serialize};

use crate::arith::{factorize, gcd, is_prime};
use crate::error::{Error, Result};
use crate::exactnum::{is_integral, rat, zeta_negative};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GenusKind {
    /// Principal polarizations.
    Principal,
    /// Polarizations with kernel `A[F]`; needs even `g`.
    NonPrincipal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MassParams {
    pub g: u32,
    pub p: u64,
    pub n: u64,
    pub genus_kind: GenusKind,
}

impl MassParams {
    pub fn new(g: u32, p: u64, n: u64, genus_kind: GenusKind) -> Result<Self> {
        if g == 0 {
            return Err(Error::invalid("g must be positive"));
        }
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if n == 0 {
            return Err(Error::invalid("N must be positive"));
        }
        if gcd(n, p) != 1 {
            return Err(Error::invalid(format!("N = {n} must be prime to p = {p}")));
        }
        if genus_kind == GenusKind::NonPrincipal && g % 2 == 1 {
            return Err(Error::invalid(format!(
                "the non-principal genus needs even g (got g = {g})"
            )));
        }
        Ok(Self {
            g,
            p,
            n,
            genus_kind,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MassResult {
    pub params: MassParams,
    /// The `N`-independent mass factor.
    pub mass: BigRational,
    /// `H_N` or `H'_N`, present for `N >= 3`.
    pub class_number: Option<BigInt>,
    pub gsp_order: BigInt,
    pub note: Option<&'static str>,
}

pub const NONPRINCIPAL_NOTE: &str = "H'_N counts the non-principal genus only when a base \
    point with polarization kernel A[F] exists; this depends on p and g (e.g. it exists \
    when (-1/p) = 1 or 4 | g)";

/// `|GSp_{2g}(Z/N)|`, multiplicative over the prime powers of `N`.
pub fn gsp_order(g: u32, n: u64) -> BigInt {
    let g = g as u64;
    let dim = 2 * g * g + g + 1;
    factorize(n)
        .into_iter()
        .map(|(l, a)| {
            let l = BigInt::from(l);
            let mut order = Pow::pow(&l, (a as u64 - 1) * dim) * (&l - 1) * Pow::pow(&l, g * g);
            for i in 1..=g {
                order *= Pow::pow(&l, 2 * i) - 1;
            }
            order
        })
        .product()
}

/// `(-1)^{g(g+1)/2} / 2^g · Π_{k=1}^{g} ζ(1-2k)`.
fn zeta_factor(g: u32) -> BigRational {
    let sign = if (g as u64 * (g as u64 + 1) / 2).is_multiple_of(2) {
        1
    } else {
        -1
    };
    let mut acc = rat(sign) / rat(BigInt::from(2).pow(g));
    for k in 1..=g {
        acc *= zeta_negative(k).expect("k >= 1");
    }
    acc
}

/// `M(g, p)`.
pub fn principal_mass(g: u32, p: u64) -> BigRational {
    let pp = BigInt::from(p);
    let mut acc = zeta_factor(g);
    for k in 1..=g {
        let sign = if k % 2 == 0 { 1 } else { -1 };
        acc *= rat(Pow::pow(&pp, k) + sign);
    }
    acc
}

/// The `N`-independent factor of `H'_N`.
pub fn nonprincipal_mass(g: u32, p: u64) -> Result<BigRational> {
    if g == 0 || g % 2 == 1 {
        return Err(Error::invalid(format!(
            "the non-principal genus needs even positive g (got g = {g})"
        )));
    }
    let pp = BigInt::from(p);
    let mut acc = zeta_factor(g);
    for k in 1..=g / 2 {
        acc *= rat(Pow::pow(&pp, 4 * k - 2) - 1);
    }
    Ok(acc)
}

fn check_level(n: u64, p: u64) -> Result<()> {
    if n < 3 {
        return Err(Error::invalid(format!(
            "class numbers need N >= 3 (got N = {n}); below level 3 automorphisms \
             are not rigidified and only the mass is defined"
        )));
    }
    if gcd(n, p) != 1 {
        return Err(Error::invalid(format!("N = {n} must be prime to p = {p}")));
    }
    Ok(())
}

fn integral(value: BigRational, what: &str) -> Result<BigInt> {
    if !is_integral(&value) || !value.is_positive() {
        return Err(Error::violation(format!(
            "{what} = {value} is not a positive integer"
        )));
    }
    Ok(value.to_integer())
}

/// `H_N` for the principal genus.
pub fn class_number_level(g: u32, p: u64, n: u64) -> Result<BigInt> {
    MassParams::new(g, p, n, GenusKind::Principal)?;
    check_level(n, p)?;
    integral(
        rat(gsp_order(g, n)) * principal_mass(g, p),
        &format!("H_N(g={g}, p={p}, N={n})"),
    )
}

/// `H'_N` for the non-principal genus.
pub fn nonprincipal_class_number_level(g: u32, p: u64, n: u64) -> Result<BigInt> {
    MassParams::new(g, p, n, GenusKind::NonPrincipal)?;
    check_level(n, p)?;
    integral(
        rat(gsp_order(g, n)) * nonprincipal_mass(g, p)?,
        &format!("H'_N(g={g}, p={p}, N={n})"),
    )
}

/// Evaluates mass, group order and (for `N >= 3`) the class number.
pub fn evaluate(params: MassParams) -> Result<MassResult> {
    let MassParams {
        g,
        p,
        n,
        genus_kind,
    } = params;
    let (mass, class_number, note) = match genus_kind {
        GenusKind::Principal => (
            principal_mass(g, p),
            if n >= 3 {
                Some(class_number_level(g, p, n)?)
            } else {
                None
            },
            None,
        ),
        GenusKind::NonPrincipal => (
            nonprincipal_mass(g, p)?,
            if n >= 3 {
                Some(nonprincipal_class_number_level(g, p, n)?)
            } else {
                None
            },
            Some(NONPRINCIPAL_NOTE),
        ),
    };
    Ok(MassResult {
        params,
        mass,
        class_number,
        gsp_order: gsp_order(g, n),
        note,
    })
}

/// `T = (H + tr) / 2`.
pub fn recover_type_number(h: &BigInt, trace: &BigInt) -> Result<BigInt> {
    if trace.is_negative() || trace > h {
        return Err(Error::invalid(format!(
            "trace {trace} outside [0, H = {h}]"
        )));
    }
    let sum = h + trace;
    if (&sum % 2u32) != BigInt::from(0) {
        return Err(Error::invalid(format!(
            "H + trace = {sum} is odd; inputs are inconsistent"
        )));
    }
    Ok(sum / 2)
}

/// Which genus indexes the components of the supersingular locus in
/// dimension `g`: principal for odd `g`, non-principal for even `g`.
pub fn component_genus(g: u32) -> GenusKind {
    if g % 2 == 1 {
        GenusKind::Principal
    } else {
        GenusKind::NonPrincipal
    }
}

/// First `count` primes not dividing `n`.
pub fn primes_coprime_to(n: u64, count: usize) -> Vec<u64> {
    (2u64..)
        .filter(|&q| is_prime(q) && gcd(q, n) == 1)
        .take(count)
        .collect()
}

impl MassResult {
    /// `class_number == gsp_order × mass` when present.
    pub fn is_consistent(&self) -> bool {
        match &self.class_number {
            Some(h) => {
                rat(h.clone()) == rat(self.gsp_order.clone()) * &self.mass && h >= &BigInt::one()
            }
            None => true,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::ratio;

    /// |GL_2(Z/n)| by counting matrices with unit determinant.
    fn gl2_count(n: i64) -> i64 {
        let mut count = 0;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        if gcd(((a * d - b * c).rem_euclid(n)) as u64, n as u64) == 1 {
                            count += 1;
                        }
                    }
                }
            }
        }
        count
    }

    #[test]
    fn gsp_orders() {
        assert_eq!(gsp_order(1, 1), BigInt::from(1));
        assert_eq!(gsp_order(1, 3), BigInt::from(48));
        assert_eq!(gsp_order(2, 2), BigInt::from(720));
        assert_eq!(gsp_order(2, 3), BigInt::from(103_680));
        for n in 2..=12 {
            assert_eq!(
                gsp_order(1, n as u64),
                BigInt::from(gl2_count(n)),
                "n = {n}"
            );
        }
    }

    #[test]
    fn gsp_order_multiplicative() {
        for g in 1..=4 {
            for (m, n) in [(3u64, 4u64), (4, 5), (5, 7), (8, 9), (3, 10)] {
                assert_eq!(gsp_order(g, m * n), gsp_order(g, m) * gsp_order(g, n));
            }
        }
    }

    #[test]
    fn masses() {
        for p in [2u64, 3, 5, 7, 11, 101, 997] {
            assert_eq!(principal_mass(1, p), ratio(p as i64 - 1, 24));
        }
        // (-1/4)(-1/12)(1/120)(2-1)(4+1) = 5/5760
        assert_eq!(principal_mass(2, 2), ratio(1, 1152));
        assert_eq!(principal_mass(1, 11), ratio(5, 12));
        // (3^2-1)/5760
        assert_eq!(nonprincipal_mass(2, 3).unwrap(), ratio(1, 720));
        assert_eq!(nonprincipal_mass(2, 2).unwrap(), ratio(1, 1920));
        assert!(nonprincipal_mass(3, 2).is_err());
    }

    #[test]
    fn g4_nonprincipal_uses_two_factors() {
        // zeta factor for g = 4: (+1)/16 · (-1/12)(1/120)(-1/252)(1/240)
        let zeta = ratio(1, 16) * ratio(-1, 12) * ratio(1, 120) * ratio(-1, 252) * ratio(1, 240);
        assert_eq!(nonprincipal_mass(4, 2).unwrap(), zeta * rat(3 * 63));
    }

    #[test]
    fn level_class_numbers() {
        assert_eq!(class_number_level(1, 5, 3).unwrap(), BigInt::from(8));
        assert_eq!(class_number_level(1, 11, 3).unwrap(), BigInt::from(20));
        // 1474560 · 20/5760
        assert_eq!(class_number_level(2, 3, 4).unwrap(), BigInt::from(5120));
        assert_eq!(
            nonprincipal_class_number_level(2, 2, 3).unwrap(),
            BigInt::from(54)
        );
        // 1474560 / 720
        assert_eq!(
            nonprincipal_class_number_level(2, 3, 4).unwrap(),
            BigInt::from(2048)
        );
    }

    #[test]
    fn level_errors() {
        assert!(class_number_level(1, 5, 2).is_err());
        assert!(class_number_level(1, 3, 3).is_err());
        assert!(class_number_level(1, 4, 3).is_err());
        assert!(nonprincipal_class_number_level(3, 2, 3).is_err());
        assert!(nonprincipal_class_number_level(2, 2, 2).is_err());
    }

    #[test]
    fn level_ratio() {
        for (n, m) in [(3u64, 2u64), (4, 3), (5, 2)] {
            let p = 7;
            let a = class_number_level(2, p, n).unwrap();
            let b = class_number_level(2, p, n * m).unwrap();
            assert_eq!(
                rat(b) / rat(a),
                rat(gsp_order(2, n * m)) / rat(gsp_order(2, n))
            );
        }
    }

    #[test]
    fn type_numbers() {
        let t = |h: i64, tr: i64| recover_type_number(&BigInt::from(h), &BigInt::from(tr));
        assert_eq!(t(2, 2).unwrap(), BigInt::from(2));
        assert_eq!(t(3, 1).unwrap(), BigInt::from(2));
        assert_eq!(t(1, 1).unwrap(), BigInt::from(1));
        assert!(t(3, 2).is_err());
        assert!(t(3, 4).is_err());
        assert!(t(3, -1).is_err());
    }

    #[test]
    fn genus_by_parity() {
        assert_eq!(component_genus(1), GenusKind::Principal);
        assert_eq!(component_genus(2), GenusKind::NonPrincipal);
        assert_eq!(component_genus(3), GenusKind::Principal);
    }

    #[test]
    fn evaluate_reports() {
        let r = evaluate(MassParams::new(1, 5, 3, GenusKind::Principal).unwrap()).unwrap();
        assert_eq!(r.class_number, Some(BigInt::from(8)));
        assert!(r.is_consistent());
        let r = evaluate(MassParams::new(1, 5, 1, GenusKind::Principal).unwrap()).unwrap();
        assert_eq!(r.class_number, None);
        assert_eq!(r.mass, ratio(1, 6));
        let r = evaluate(MassParams::new(2, 2, 3, GenusKind::NonPrincipal).unwrap()).unwrap();
        assert_eq!(r.class_number, Some(BigInt::from(54)));
        assert!(r.note.is_some());
        assert!(MassParams::new(3, 2, 3, GenusKind::NonPrincipal).is_err());
        assert!(MassParams::new(1, 3, 6, GenusKind::Principal).is_err());
    }

    #[test]
    fn positivity() {
        for g in 1..=6 {
            for p in [2u64, 3, 5, 7, 11, 13] {
                assert!(principal_mass(g, p).is_positive(), "g={g} p={p}");
                if g % 2 == 0 {
                    assert!(nonprincipal_mass(g, p).unwrap().is_positive());
                }
            }
        }
    }
}
