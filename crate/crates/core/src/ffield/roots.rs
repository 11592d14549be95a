//! Roots of `F_p` polynomials in `F_{p^2}`.
//!
//! `h = gcd(f, x^(p^2) - x)` collects every `F_{p^2}`-root once. Its part
//! `gcd(h, x^p - x)` splits into linear factors over `F_p`; the cofactor is a
//! product of distinct irreducible quadratics whose roots come from the
//! quadratic formula with `sqrt(disc) = s t`, `s^2 = disc / d`.

use std::collections::BTreeSet;

use crate::error::{Error, Result};

use super::fp::FpElement;
use super::fp2::{Fp2Element, Fp2Field};
use super::poly::FpPoly;

/// Below this characteristic a quadratic product that resists splitting is
/// finished off by scanning all of `F_{p^2}`.
const EXHAUSTIVE_LIMIT: u64 = 64;

/// `x^(p^k) - x reduced modulo f`, i.e. `(x^(p^k) mod f) - x`.
fn frobenius_minus_x(f: &FpPoly, k: u32) -> FpPoly {
    let p = f.modulus();
    let mut xq = FpPoly::x(p).rem(f);
    for _ in 0..k {
        xq = xq.pow_mod(p as u128, f);
    }
    xq.sub(&FpPoly::x(p)).rem(f)
}

/// Linear factors of a squarefree, completely split `g` over `F_p`.
fn split_linear(g: &FpPoly, out: &mut Vec<FpElement>) {
    let p = g.modulus();
    match g.degree() {
        None | Some(0) => return,
        Some(1) => {
            let c = g.monic().raw_coeffs()[0];
            out.push(-FpElement::new(c as i64, p));
            return;
        }
        _ => {}
    }
    if p == 2 {
        for v in 0..2 {
            if g.eval(FpElement::new(v, p)).is_zero() {
                out.push(FpElement::new(v, p));
            }
        }
        return;
    }
    let e = ((p - 1) / 2) as u128;
    for a in 0..p as i64 {
        let shifted = FpPoly::new(vec![a, 1], p);
        let w = shifted.pow_mod(e, g).sub(&FpPoly::one(p));
        let h = g.gcd(&w);
        let dh = h.degree().unwrap_or(0);
        if dh > 0 && dh < g.degree().unwrap() {
            split_linear(&h, out);
            split_linear(&g.div_rem(&h).0, out);
            return;
        }
    }
    unreachable!("distinct roots are separated by some shift");
}

/// Irreducible monic quadratic factors of a product of distinct ones.
fn split_quadratic(g: &FpPoly, out: &mut Vec<FpPoly>) -> bool {
    let p = g.modulus();
    match g.degree() {
        None | Some(0) => return true,
        Some(2) => {
            out.push(g.monic());
            return true;
        }
        _ => {}
    }
    let e = (p as u128 * p as u128 - 1) / 2;
    for a in 0..p as i64 {
        let shifted = FpPoly::new(vec![a, 1], p);
        let w = shifted.pow_mod(e, g).sub(&FpPoly::one(p));
        let h = g.gcd(&w);
        let dh = h.degree().unwrap_or(0);
        if dh > 0 && dh < g.degree().unwrap() {
            return split_quadratic(&h, out) && split_quadratic(&g.div_rem(&h).0, out);
        }
    }
    false
}

fn quadratic_roots(q: &FpPoly, field: &Fp2Field) -> Result<[Fp2Element; 2]> {
    let p = field.characteristic();
    let c = q.coeffs();
    let (c0, c1) = (c[0], c[1]);
    let two = FpElement::new(2, p);
    let disc = c1 * c1 - FpElement::new(4, p) * c0;
    let d = FpElement::new(field.nonresidue() as i64, p);
    let s = (disc / d)
        .sqrt()
        .ok_or_else(|| Error::violation(format!("factor {q} is not irreducible over F_{p}")))?;
    let re = -c1 / two;
    let im = s / two;
    Ok([
        field.elem(re.value() as i64, im.value() as i64),
        field.elem(re.value() as i64, (-im).value() as i64),
    ])
}

/// Every root of `f` in `F_{p^2}` by direct evaluation, sorted. Cost `O(p^2 deg f)`.
pub fn roots_in_fp2_exhaustive(f: &FpPoly, field: &Fp2Field) -> Result<Vec<Fp2Element>> {
    if f.is_zero() {
        return Err(Error::invalid("roots of the zero polynomial"));
    }
    let mut roots: Vec<Fp2Element> = field
        .elements()
        .filter(|x| f.eval_fp2(x).is_zero())
        .collect();
    roots.sort();
    Ok(roots)
}

/// Distinct roots of `f` in `F_{p^2}`, sorted.
pub fn roots_in_fp2(f: &FpPoly, field: &Fp2Field) -> Result<Vec<Fp2Element>> {
    if f.is_zero() {
        return Err(Error::invalid("roots of the zero polynomial"));
    }
    if f.modulus() != field.characteristic() {
        return Err(Error::invalid(
            "polynomial and field have different characteristic",
        ));
    }
    if f.degree() == Some(0) {
        return Ok(vec![]);
    }
    let all = f.gcd(&frobenius_minus_x(f, 2));
    let rational = all.gcd(&frobenius_minus_x(&all, 1));
    let quadratic = all.div_rem(&rational).0;

    let mut roots = BTreeSet::new();
    let mut linear = Vec::new();
    split_linear(&rational, &mut linear);
    roots.extend(linear.into_iter().map(|r| field.from_fp(r)));

    let mut quads = Vec::new();
    if split_quadratic(&quadratic, &mut quads) {
        for q in &quads {
            roots.extend(quadratic_roots(q, field)?);
        }
    } else if field.characteristic() < EXHAUSTIVE_LIMIT {
        roots.extend(roots_in_fp2_exhaustive(&quadratic, field)?);
    } else {
        return Err(Error::violation(format!(
            "could not split quadratic part of degree {:?} over F_{}",
            quadratic.degree(),
            field.characteristic()
        )));
    }
    Ok(roots.into_iter().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffield::hasse_poly;
    use crate::ffield::lambda_to_j;

    fn f5() -> Fp2Field {
        Fp2Field::new(5).unwrap()
    }

    #[test]
    fn simple_roots() {
        let f = f5();
        let r = roots_in_fp2(&FpPoly::new(vec![-1, 0, 1], 5), &f).unwrap();
        assert_eq!(r, vec![f.elem(1, 0), f.elem(4, 0)]);
        let r = roots_in_fp2(&FpPoly::new(vec![-2, 0, 1], 5), &f).unwrap();
        let mut expected = vec![f.elem(0, 1), f.elem(0, 4)];
        expected.sort();
        assert_eq!(r, expected);
        assert!(roots_in_fp2(&FpPoly::zero(5), &f).is_err());
        assert!(roots_in_fp2(&FpPoly::one(5), &f).unwrap().is_empty());
    }

    #[test]
    fn hasse_five_roots_give_j_zero() {
        let f = f5();
        let h = hasse_poly(5).unwrap();
        let fast = roots_in_fp2(&h, &f).unwrap();
        assert_eq!(fast, roots_in_fp2_exhaustive(&h, &f).unwrap());
        assert_eq!(fast.len(), 2);
        for r in fast {
            assert_eq!(lambda_to_j(&r).unwrap(), f.zero());
        }
    }

    #[test]
    fn hasse_roots_match_exhaustive_scan() {
        for p in crate::arith::primes_between(5, 60) {
            let f = Fp2Field::new(p).unwrap();
            let h = hasse_poly(p).unwrap();
            assert_eq!(
                roots_in_fp2(&h, &f).unwrap(),
                roots_in_fp2_exhaustive(&h, &f).unwrap(),
                "p = {p}"
            );
            // every supersingular λ is F_{p^2}-rational
            assert_eq!(roots_in_fp2(&h, &f).unwrap().len() as u64, (p - 1) / 2);
        }
    }

    #[test]
    fn repeated_and_irreducible_factors() {
        // (x-1)^3 (x^2 - 3)(x^2 - 3x + 5)(x^3 - 2) over F_7
        let p = 7u64;
        let field = Fp2Field::new(p).unwrap();
        let lin = FpPoly::new(vec![-1, 1], p);
        let f = lin
            .mul(&lin)
            .mul(&lin)
            .mul(&FpPoly::new(vec![-3, 0, 1], p))
            .mul(&FpPoly::new(vec![5, -3, 1], p))
            .mul(&FpPoly::new(vec![-2, 0, 0, 1], p));
        assert_eq!(
            roots_in_fp2(&f, &field).unwrap(),
            roots_in_fp2_exhaustive(&f, &field).unwrap()
        );
    }
}
