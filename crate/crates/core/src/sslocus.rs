//! The genus-one superspecial locus: supersingular `j`-invariants over
//! `F_{p^2}`, the Frobenius involution `j -> j^p`, and the counts
//! `H` (points), `F` (Frobenius-fixed points) and `T` (Frobenius orbits).

use std::collections::{BTreeMap, BTreeSet};
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use num_rational::BigRational;
use num_traits::Zero;

use crate::arith::is_prime;
use crate::cosettrace::involution_census;
use crate::error::{Error, Result};
use crate::exactnum::{rat, ratio};
use crate::ffield::{
    frobenius, hasse_poly, lambda_to_j, roots_in_fp2, Fp2Element, Fp2Field, FpElement,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Census {
    pub p: u64,
    /// Distinct supersingular `j`-invariants, sorted by `(a, b)`.
    pub j_points: Vec<Fp2Element>,
    /// `involution[i]` is the index of `j_points[i]^p`.
    pub involution: Vec<usize>,
    pub h: u64,
    pub f: u64,
    pub t: u64,
    /// `|Aut|` per point: 6 at `j = 0`, 4 at `j = 1728`, 2 otherwise (`p > 3`).
    /// The fixed small-prime censuses carry 24 (`p = 2`) and 12 (`p = 3`).
    pub aut_orders: Vec<u32>,
}

impl Census {
    pub fn field(&self) -> Option<Fp2Field> {
        self.j_points.first().map(|j| j.field())
    }

    /// Re-derives `involution`, `H`, `F`, `T` and the automorphism orders
    /// from `j_points` and checks the stored values against them.
    pub fn validate(&self) -> Result<()> {
        let fail = |what: &str| Err(Error::violation(format!("census p={}: {what}", self.p)));
        if self.p <= 3 {
            return if *self == small_prime_census(self.p) {
                Ok(())
            } else {
                fail("does not match the fixed small-prime census")
            };
        }
        if self.j_points.windows(2).any(|w| w[0] >= w[1]) {
            return fail("j_points not strictly sorted");
        }
        let field = match self.field() {
            Some(f) if f.characteristic() == self.p => f,
            _ => return fail("empty or wrong-characteristic j_points"),
        };
        if self.j_points.iter().any(|j| j.field() != field) {
            return fail("mixed field descriptors");
        }
        let p2 = self.p as u128 * self.p as u128;
        if self.j_points.iter().any(|j| j.pow(p2) != *j) {
            return fail("j not fixed by x -> x^(p^2)");
        }
        if let Some(j) = self.j_points.iter().find(|j| !is_supersingular(j)) {
            return fail(&format!("j = {j} is ordinary"));
        }
        if self.involution != frobenius_pairing(&self.j_points)? {
            return fail("involution is not j -> j^p");
        }
        let (h, f, t) = involution_census(self.involution.len(), |i| self.involution[i])?;
        if (h, f, t) != (self.h, self.f, self.t) {
            return fail("(H, F, T) disagree with the involution");
        }
        if self.f
            != self
                .j_points
                .iter()
                .filter(|j| j.is_in_prime_field())
                .count() as u64
        {
            return fail("F differs from the number of F_p-rational j");
        }
        if self.aut_orders != aut_orders(&self.j_points, self.p) {
            return fail("automorphism orders");
        }
        if !class_number_crosscheck(self)? {
            return fail("H differs from ⌊p/12⌋ + ε(p mod 12)");
        }
        if eichler_mass(self)? != expected_mass(self.p) {
            return fail("mass differs from (p - 1)/24");
        }
        Ok(())
    }
}

fn small_prime_census(p: u64) -> Census {
    // j = 0 = 1728 is the only supersingular invariant in characteristic 2
    // and 3; Aut has order 24 resp. 12.
    let field = Fp2Field::small_prime(p);
    Census {
        p,
        j_points: vec![field.zero()],
        involution: vec![0],
        h: 1,
        f: 1,
        t: 1,
        aut_orders: vec![if p == 2 { 24 } else { 12 }],
    }
}

fn frobenius_pairing(points: &[Fp2Element]) -> Result<Vec<usize>> {
    let index: BTreeMap<&Fp2Element, usize> =
        points.iter().enumerate().map(|(i, j)| (j, i)).collect();
    points
        .iter()
        .map(|j| {
            index
                .get(&frobenius(j))
                .copied()
                .ok_or_else(|| Error::violation(format!("j^p of {j} is not supersingular")))
        })
        .collect()
}

fn aut_orders(points: &[Fp2Element], p: u64) -> Vec<u32> {
    points
        .iter()
        .map(|j| {
            if j.is_zero() {
                6
            } else if j.coords() == (1728 % p, 0) {
                4
            } else {
                2
            }
        })
        .collect()
}

/// Supersingular census in characteristic `p`.
pub fn census(p: u64) -> Result<Census> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if p <= 3 {
        return Ok(small_prime_census(p));
    }
    let field = Fp2Field::new(p)?;
    let lambdas = roots_in_fp2(&hasse_poly(p)?, &field)?;
    let j_points: Vec<Fp2Element> = lambdas
        .iter()
        .map(lambda_to_j)
        .collect::<Result<BTreeSet<_>>>()?
        .into_iter()
        .collect();
    let involution = frobenius_pairing(&j_points)?;
    let (h, f, t) = involution_census(involution.len(), |i| involution[i])?;
    let aut_orders = aut_orders(&j_points, p);
    Ok(Census {
        p,
        j_points,
        involution,
        h,
        f,
        t,
        aut_orders,
    })
}

/// Supersingularity of the curve with invariant `j`, for `p > 3`.
///
/// Uses `y^2 = x^3 + a x + b` with `a = 3j(1728 - j)`, `b = 2j(1728 - j)^2`
/// (or the CM models at `j = 0, 1728`) and tests whether the coefficient of
/// `x^(p-1)` in `(x^3 + a x + b)^((p-1)/2)` vanishes. `O(p)` per point.
pub fn is_supersingular(j: &Fp2Element) -> bool {
    let field = j.field();
    let p = field.characteristic();
    if p <= 3 {
        return j.is_zero();
    }
    let c1728 = field.elem(1728, 0);
    if j.is_zero() {
        return p % 3 == 2;
    }
    if *j == c1728 {
        return p % 4 == 3;
    }
    let u = c1728 - *j;
    let a = field.elem(3, 0) * *j * u;
    let b = field.elem(2, 0) * *j * u * u;

    // factorials mod p up to m = (p - 1)/2
    let m = ((p - 1) / 2) as usize;
    let fp = |x: u64| FpElement::new(x as i64, p);
    let mut fact = vec![fp(1); m + 1];
    for i in 1..=m {
        fact[i] = fact[i - 1] * fp(i as u64);
    }
    // x^3 taken i times, a x taken k times, b taken l times:
    // i + k + l = m, 3i + k = p - 1
    let mut coeff = field.zero();
    let target = p as usize - 1;
    for i in 0..=m {
        if 3 * i > target {
            break;
        }
        let k = target - 3 * i;
        if i + k > m {
            continue;
        }
        let l = m - i - k;
        let multinomial = fact[m] / (fact[i] * fact[k] * fact[l]);
        coeff = coeff + field.from_fp(multinomial) * a.pow(k as u128) * b.pow(l as u128);
    }
    coeff.is_zero()
}

/// `tr R(π_0)`: the number of Frobenius-fixed points.
pub fn trace_r_pi0(c: &Census) -> u64 {
    c.f
}

/// Number of Frobenius orbits, `(H + F) / 2`.
pub fn type_number(c: &Census) -> u64 {
    c.t
}

/// `ε(p mod 12)` in the classical count `⌊p/12⌋ + ε`.
pub fn deuring_count(p: u64) -> Result<u64> {
    if p <= 3 {
        return Err(Error::invalid("deuring_count: formula holds for p > 3"));
    }
    let eps = match p % 12 {
        1 => 0,
        5 | 7 => 1,
        11 => 2,
        r => {
            return Err(Error::invalid(format!(
                "p ≡ {r} (mod 12) is not a prime > 3"
            )))
        }
    };
    Ok(p / 12 + eps)
}

pub fn class_number_crosscheck(c: &Census) -> Result<bool> {
    Ok(c.h == deuring_count(c.p)?)
}

/// `sum_j 1/|Aut(E_j)|`; equals `(p - 1)/24`.
pub fn eichler_mass(c: &Census) -> Result<BigRational> {
    if c.p <= 3 {
        return Err(Error::invalid("eichler_mass: requires p > 3"));
    }
    Ok(c.aut_orders
        .iter()
        .fold(BigRational::zero(), |acc, &a| acc + ratio(1, a)))
}

/// `(p - 1)/24` directly.
pub fn expected_mass(p: u64) -> BigRational {
    rat(p - 1) / rat(24)
}

/// One cache line: `p;j1,j2,...;F;T`.
pub fn encode_census_line(c: &Census) -> String {
    let js: Vec<String> = c.j_points.iter().map(|j| j.to_string()).collect();
    format!("{};{};{};{}", c.p, js.join(","), c.f, c.t)
}

/// Parses and rebuilds a census from a cache line, then validates it.
pub fn decode_census_line(line: &str) -> Result<Census> {
    let bad = |m: &str| Error::invalid(format!("cache line {line:?}: {m}"));
    let parts: Vec<&str> = line.trim().split(';').collect();
    if parts.len() != 4 {
        return Err(bad("expected 4 fields"));
    }
    let p: u64 = parts[0].parse().map_err(|_| bad("p"))?;
    let f: u64 = parts[2].parse().map_err(|_| bad("F"))?;
    let t: u64 = parts[3].parse().map_err(|_| bad("T"))?;
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let c = if p <= 3 {
        let mut c = small_prime_census(p);
        c.f = f;
        c.t = t;
        c
    } else {
        let field = Fp2Field::new(p)?;
        let j_points = parts[1]
            .split(',')
            .map(|s| field.parse(s))
            .collect::<Result<Vec<_>>>()?;
        let involution = frobenius_pairing(&j_points)?;
        Census {
            p,
            aut_orders: aut_orders(&j_points, p),
            h: j_points.len() as u64,
            j_points,
            involution,
            f,
            t,
        }
    };
    c.validate()?;
    Ok(c)
}

/// Append-only census cache; entries are revalidated when loaded.
#[derive(Debug)]
pub struct CensusCache {
    path: PathBuf,
    entries: BTreeMap<u64, Census>,
    rejected: usize,
}

impl CensusCache {
    /// Loads `path` if it exists. Lines failing validation are dropped.
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let mut entries = BTreeMap::new();
        let mut rejected = 0;
        if path.exists() {
            let io = |source| Error::Io {
                path: path.clone(),
                source,
            };
            let reader = BufReader::new(File::open(&path).map_err(io)?);
            for line in reader.lines() {
                let line = line.map_err(io)?;
                if line.trim().is_empty() {
                    continue;
                }
                match decode_census_line(&line) {
                    Ok(c) => {
                        entries.insert(c.p, c);
                    }
                    Err(_) => rejected += 1,
                }
            }
        }
        Ok(Self {
            path,
            entries,
            rejected,
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn get(&self, p: u64) -> Option<&Census> {
        self.entries.get(&p)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Lines dropped on load because they failed revalidation.
    pub fn rejected(&self) -> usize {
        self.rejected
    }

    /// Appends censuses not yet present, one line per write.
    pub fn insert_all<'a>(&mut self, censuses: impl IntoIterator<Item = &'a Census>) -> Result<()> {
        let fresh: Vec<&Census> = censuses
            .into_iter()
            .filter(|c| !self.entries.contains_key(&c.p))
            .collect();
        if fresh.is_empty() {
            return Ok(());
        }
        let io = |source| Error::Io {
            path: self.path.clone(),
            source,
        };
        if let Some(dir) = self.path.parent() {
            if !dir.as_os_str().is_empty() {
                std::fs::create_dir_all(dir).map_err(io)?;
            }
        }
        let mut file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&self.path)
            .map_err(io)?;
        for c in fresh {
            file.write_all(format!("{}\n", encode_census_line(c)).as_bytes())
                .map_err(io)?;
            self.entries.insert(c.p, c.clone());
        }
        Ok(())
    }
}
