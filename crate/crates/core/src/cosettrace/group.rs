//! Finite groups given by an explicit element table.
//!
//! Elements are stored as words (permutation images, residues or matrix
//! entries) and addressed by their index in the table.

use std::collections::HashMap;
use std::fmt;

use num_traits::ToPrimitive;

use crate::arith::gcd;
use crate::error::{Error, Result};
use crate::massform::gsp_order;

/// Largest group whose full element table is built.
pub const MAX_GROUP_ORDER: usize = 100_000;

/// Groups up to this order get a precomputed Cayley table.
const CAYLEY_LIMIT: usize = 1024;

/// Index of an element in its group's table.
pub type ElemId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupKind {
    /// `Z/n` under addition.
    Cyclic(u32),
    /// Permutations of `{1..n}`, composed right to left.
    Symmetric(u32),
    /// `GL_2(Z/n)`.
    Gl2(u32),
    /// `GSp_4(Z/n)`: 4×4 symplectic similitudes for `J = [[0, I], [-I, 0]]`.
    Gsp4(u32),
}

impl GroupKind {
    /// Parses `cyclic:n`, `sym:n`, `gl2:n` or `gsp2:n`.
    pub fn parse(s: &str) -> Result<Self> {
        let bad = || {
            Error::invalid(format!(
                "unknown group {s:?}; expected cyclic:n, sym:n, gl2:n or gsp2:n"
            ))
        };
        let (name, n) = s.trim().split_once(':').ok_or_else(bad)?;
        let n: u32 = n.trim().parse().map_err(|_| bad())?;
        if n == 0 {
            return Err(Error::invalid("group parameter must be positive"));
        }
        match name.trim() {
            "cyclic" => Ok(GroupKind::Cyclic(n)),
            "sym" => Ok(GroupKind::Symmetric(n)),
            "gl2" => Ok(GroupKind::Gl2(n)),
            "gsp2" => Ok(GroupKind::Gsp4(n)),
            _ => Err(bad()),
        }
    }

    /// Order computed without enumeration.
    pub fn expected_order(&self) -> Option<u64> {
        match *self {
            GroupKind::Cyclic(n) => Some(n as u64),
            GroupKind::Symmetric(n) => (1..=n as u64).try_fold(1u64, |acc, k| acc.checked_mul(k)),
            GroupKind::Gl2(n) => gsp_order(1, n as u64).to_u64(),
            GroupKind::Gsp4(n) => gsp_order(2, n as u64).to_u64(),
        }
    }

    fn modulus(&self) -> u32 {
        match *self {
            GroupKind::Cyclic(n)
            | GroupKind::Symmetric(n)
            | GroupKind::Gl2(n)
            | GroupKind::Gsp4(n) => n,
        }
    }

    fn matrix_dim(&self) -> Option<usize> {
        match self {
            GroupKind::Gl2(_) => Some(2),
            GroupKind::Gsp4(_) => Some(4),
            _ => None,
        }
    }

    fn identity_word(&self) -> Vec<u32> {
        match *self {
            GroupKind::Cyclic(_) => vec![0],
            GroupKind::Symmetric(n) => (0..n).collect(),
            GroupKind::Gl2(n) | GroupKind::Gsp4(n) => {
                let d = self.matrix_dim().unwrap();
                (0..d * d)
                    .map(|i| if i / d == i % d { 1 % n } else { 0 })
                    .collect()
            }
        }
    }

    fn compose(&self, x: &[u32], y: &[u32]) -> Vec<u32> {
        match *self {
            GroupKind::Cyclic(n) => vec![(x[0] + y[0]) % n],
            GroupKind::Symmetric(_) => y.iter().map(|&i| x[i as usize]).collect(),
            GroupKind::Gl2(n) | GroupKind::Gsp4(n) => {
                let d = self.matrix_dim().unwrap();
                let n = n as u64;
                let mut out = vec![0u32; d * d];
                for r in 0..d {
                    for c in 0..d {
                        let s: u64 = (0..d)
                            .map(|k| x[r * d + k] as u64 * y[k * d + c] as u64)
                            .sum();
                        out[r * d + c] = (s % n) as u32;
                    }
                }
                out
            }
        }
    }

    fn contains_word(&self, w: &[u32]) -> bool {
        let n = self.modulus();
        match *self {
            GroupKind::Cyclic(_) => w.len() == 1 && w[0] < n,
            GroupKind::Symmetric(_) => {
                let mut seen = vec![false; n as usize];
                w.len() == n as usize
                    && w.iter().all(|&i| {
                        (i as usize) < seen.len() && !std::mem::replace(&mut seen[i as usize], true)
                    })
            }
            GroupKind::Gl2(_) => {
                w.len() == 4 && w.iter().all(|&v| v < n) && {
                    let det = (w[0] as i64 * w[3] as i64 - w[1] as i64 * w[2] as i64)
                        .rem_euclid(n as i64) as u64;
                    gcd(det, n as u64) == 1
                }
            }
            GroupKind::Gsp4(_) => {
                w.len() == 16 && w.iter().all(|&v| v < n) && gsp4_multiplier(w, n).is_some()
            }
        }
    }

    fn enumerate(&self) -> Vec<Vec<u32>> {
        let n = self.modulus();
        match *self {
            GroupKind::Cyclic(_) => (0..n).map(|k| vec![k]).collect(),
            GroupKind::Symmetric(_) => permutations(n as usize),
            GroupKind::Gl2(_) | GroupKind::Gsp4(_) => {
                let len = self.matrix_dim().unwrap().pow(2);
                let mut out = Vec::new();
                let mut w = vec![0u32; len];
                loop {
                    if self.contains_word(&w) {
                        out.push(w.clone());
                    }
                    // odometer increment
                    let mut i = len;
                    loop {
                        if i == 0 {
                            return out;
                        }
                        i -= 1;
                        w[i] += 1;
                        if w[i] < n {
                            break;
                        }
                        w[i] = 0;
                    }
                }
            }
        }
    }
}

impl fmt::Display for GroupKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupKind::Cyclic(n) => write!(f, "cyclic:{n}"),
            GroupKind::Symmetric(n) => write!(f, "sym:{n}"),
            GroupKind::Gl2(n) => write!(f, "gl2:{n}"),
            GroupKind::Gsp4(n) => write!(f, "gsp2:{n}"),
        }
    }
}

/// `μ` with `Mᵀ J M = μ J`, `μ` a unit mod `n`.
#[allow(clippy::needless_range_loop)]
fn gsp4_multiplier(m: &[u32], n: u32) -> Option<u32> {
    const J: [[i64; 4]; 4] = [[0, 0, 1, 0], [0, 0, 0, 1], [-1, 0, 0, 0], [0, -1, 0, 0]];
    let n = n as i64;
    let at = |r: usize, c: usize| m[r * 4 + c] as i64;
    let mut form = [[0i64; 4]; 4];
    for (i, row) in form.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            let mut s = 0;
            for k in 0..4 {
                for l in 0..4 {
                    s += at(k, i) * J[k][l] * at(l, j);
                }
            }
            *cell = s.rem_euclid(n);
        }
    }
    let mu = form[0][2];
    for i in 0..4 {
        for j in 0..4 {
            if form[i][j] != (mu * J[i][j]).rem_euclid(n) {
                return None;
            }
        }
    }
    (gcd(mu as u64, n as u64) == 1).then_some(mu as u32)
}

fn permutations(n: usize) -> Vec<Vec<u32>> {
    let mut cur: Vec<u32> = (0..n as u32).collect();
    let mut out = vec![cur.clone()];
    // lexicographic successor
    loop {
        let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
        cur.swap(i - 1, j);
        cur[i..].reverse();
        out.push(cur.clone());
    }
}

#[derive(Debug)]
pub struct FiniteGroup {
    kind: GroupKind,
    words: Vec<Vec<u32>>,
    index: HashMap<Vec<u32>, ElemId>,
    inverses: Vec<ElemId>,
    identity: ElemId,
    cayley: Option<Vec<u32>>,
}

impl FiniteGroup {
    pub fn new(kind: GroupKind) -> Result<Self> {
        match kind.expected_order() {
            Some(order) if order as usize <= MAX_GROUP_ORDER => {}
            _ => {
                return Err(Error::invalid(format!(
                    "{kind} has more than {MAX_GROUP_ORDER} elements"
                )))
            }
        }
        let words = kind.enumerate();
        let index: HashMap<Vec<u32>, ElemId> = words
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, w)| (w, i))
            .collect();
        let identity = index[&kind.identity_word()];
        let mut group = Self {
            kind,
            words,
            index,
            inverses: Vec::new(),
            identity,
            cayley: None,
        };
        let order = group.order();
        if order <= CAYLEY_LIMIT {
            let mut table = vec![0u32; order * order];
            for x in 0..order {
                for y in 0..order {
                    table[x * order + y] = group.mul_slow(x, y) as u32;
                }
            }
            group.cayley = Some(table);
        }
        let mut inverses = vec![usize::MAX; order];
        for x in 0..order {
            if inverses[x] != usize::MAX {
                continue;
            }
            let y = (0..order)
                .find(|&y| group.mul(x, y) == identity)
                .expect("every element has an inverse");
            inverses[x] = y;
            inverses[y] = x;
        }
        group.inverses = inverses;
        Ok(group)
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    pub fn order(&self) -> usize {
        self.words.len()
    }

    pub fn identity(&self) -> ElemId {
        self.identity
    }

    pub fn elements(&self) -> std::ops::Range<ElemId> {
        0..self.order()
    }

    pub fn word(&self, x: ElemId) -> &[u32] {
        &self.words[x]
    }

    pub fn find(&self, word: &[u32]) -> Option<ElemId> {
        self.index.get(word).copied()
    }

    fn mul_slow(&self, x: ElemId, y: ElemId) -> ElemId {
        self.index[&self.kind.compose(&self.words[x], &self.words[y])]
    }

    #[inline]
    pub fn mul(&self, x: ElemId, y: ElemId) -> ElemId {
        match &self.cayley {
            Some(t) => t[x * self.order() + y] as ElemId,
            None => self.mul_slow(x, y),
        }
    }

    #[inline]
    pub fn inv(&self, x: ElemId) -> ElemId {
        self.inverses[x]
    }

    /// `x⁻¹ γ x`.
    #[inline]
    pub fn conj(&self, gamma: ElemId, x: ElemId) -> ElemId {
        self.mul(self.inv(x), self.mul(gamma, x))
    }

    pub fn commute(&self, x: ElemId, y: ElemId) -> bool {
        self.mul(x, y) == self.mul(y, x)
    }

    /// Parses an element literal (see [`FiniteGroup::format`]).
    ///
    /// Errors carry the 0-based character offset of the problem.
    pub fn parse_element(&self, s: &str) -> std::result::Result<ElemId, (usize, String)> {
        let word = parse_word(self.kind, s)?;
        if !self.kind.contains_word(&word) {
            return Err((0, format!("{s:?} is not an element of {}", self.kind)));
        }
        Ok(self.find(&word).expect("enumerated"))
    }

    /// Literal form: `e` for the identity; residues for `cyclic`; cycle
    /// notation `(1 2 3)(4 5)` for `sym`; `[a b; c d]` rows for matrices.
    pub fn format(&self, x: ElemId) -> String {
        if x == self.identity {
            return "e".to_string();
        }
        let w = &self.words[x];
        match self.kind {
            GroupKind::Cyclic(_) => w[0].to_string(),
            GroupKind::Symmetric(n) => {
                let mut seen = vec![false; n as usize];
                let mut out = String::new();
                for start in 0..n as usize {
                    if seen[start] || w[start] as usize == start {
                        continue;
                    }
                    let mut cycle = vec![];
                    let mut i = start;
                    while !seen[i] {
                        seen[i] = true;
                        cycle.push((i + 1).to_string());
                        i = w[i] as usize;
                    }
                    out.push('(');
                    out.push_str(&cycle.join(" "));
                    out.push(')');
                }
                out
            }
            GroupKind::Gl2(_) | GroupKind::Gsp4(_) => {
                let d = self.kind.matrix_dim().unwrap();
                let rows: Vec<String> = w
                    .chunks(d)
                    .map(|r| {
                        r.iter()
                            .map(|v| v.to_string())
                            .collect::<Vec<_>>()
                            .join(" ")
                    })
                    .collect();
                format!("[{}]", rows.join("; "))
            }
        }
    }
}

fn parse_word(kind: GroupKind, s: &str) -> std::result::Result<Vec<u32>, (usize, String)> {
    let t = s.trim();
    let lead = s.len() - s.trim_start().len();
    if t == "e" {
        return Ok(kind.identity_word());
    }
    let n = kind.modulus();
    match kind {
        GroupKind::Cyclic(_) => {
            let v: i64 = t
                .parse()
                .map_err(|_| (lead, format!("expected an integer, found {t:?}")))?;
            Ok(vec![v.rem_euclid(n as i64) as u32])
        }
        GroupKind::Symmetric(_) => {
            let mut images: Vec<u32> = (0..n).collect();
            let mut rest = t;
            let mut pos = lead;
            if rest == "()" {
                return Ok(images);
            }
            while !rest.is_empty() {
                if !rest.starts_with('(') {
                    return Err((pos, "expected '(' starting a cycle".into()));
                }
                let close = rest
                    .find(')')
                    .ok_or_else(|| (pos, "unterminated cycle".to_string()))?;
                let body = &rest[1..close];
                let points: Vec<u32> = if body.contains(|c: char| c == ',' || c.is_whitespace()) {
                    body.split(|c: char| c == ',' || c.is_whitespace())
                        .filter(|x| !x.is_empty())
                        .map(|x| x.parse::<u32>())
                        .collect::<std::result::Result<_, _>>()
                        .map_err(|_| (pos + 1, format!("bad cycle {body:?}")))?
                } else {
                    body.chars()
                        .map(|c| c.to_digit(10))
                        .collect::<Option<_>>()
                        .ok_or_else(|| (pos + 1, format!("bad cycle {body:?}")))?
                };
                let mut used = vec![false; n as usize + 1];
                for &pt in &points {
                    if pt == 0 || pt > n {
                        return Err((pos + 1, format!("point {pt} outside 1..={n}")));
                    }
                    if std::mem::replace(&mut used[pt as usize], true) {
                        return Err((pos + 1, format!("point {pt} repeated in cycle")));
                    }
                }
                // product of the cycles as written; the rightmost acts first
                let mut cyc: Vec<u32> = (0..n).collect();
                for (i, &pt) in points.iter().enumerate() {
                    cyc[pt as usize - 1] = points[(i + 1) % points.len()] - 1;
                }
                images = kind.compose(&images, &cyc);
                pos += close + 1;
                let trimmed = rest[close + 1..].trim_start();
                pos += rest[close + 1..].len() - trimmed.len();
                rest = trimmed;
            }
            Ok(images)
        }
        GroupKind::Gl2(_) | GroupKind::Gsp4(_) => {
            let d = kind.matrix_dim().unwrap();
            let inner = t
                .strip_prefix('[')
                .and_then(|x| x.strip_suffix(']'))
                .ok_or_else(|| (lead, "expected a matrix literal [a b; c d]".to_string()))?;
            let rows: Vec<&str> = inner.split(';').collect();
            if rows.len() != d {
                return Err((lead, format!("expected {d} rows, found {}", rows.len())));
            }
            let mut w = Vec::with_capacity(d * d);
            for row in rows {
                let vals: Vec<&str> = row
                    .split(|c: char| c == ',' || c.is_whitespace())
                    .filter(|x| !x.is_empty())
                    .collect();
                if vals.len() != d {
                    return Err((lead, format!("expected {d} entries in row {row:?}")));
                }
                for v in vals {
                    let v: i64 = v
                        .parse()
                        .map_err(|_| (lead, format!("bad matrix entry {v:?}")))?;
                    w.push(v.rem_euclid(n as i64) as u32);
                }
            }
            Ok(w)
        }
    }
}

/// A subgroup as a sorted member list plus a membership mask.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subgroup {
    members: Vec<ElemId>,
    mask: Vec<bool>,
}

impl Subgroup {
    /// Closure of `gens` under multiplication.
    pub fn generated(group: &FiniteGroup, gens: &[ElemId]) -> Self {
        let mut mask = vec![false; group.order()];
        let mut members = vec![group.identity()];
        mask[group.identity()] = true;
        let mut i = 0;
        while i < members.len() {
            let x = members[i];
            for &g in gens {
                let y = group.mul(x, g);
                if !mask[y] {
                    mask[y] = true;
                    members.push(y);
                }
            }
            i += 1;
        }
        members.sort_unstable();
        Self { members, mask }
    }

    pub fn trivial(group: &FiniteGroup) -> Self {
        Self::generated(group, &[])
    }

    pub fn whole(group: &FiniteGroup) -> Self {
        Self {
            members: group.elements().collect(),
            mask: vec![true; group.order()],
        }
    }

    /// Builds a subgroup from an explicit element list, checking closure.
    pub fn from_members(group: &FiniteGroup, members: &[ElemId]) -> Result<Self> {
        let mut mask = vec![false; group.order()];
        for &m in members {
            mask[m] = true;
        }
        let closed = members
            .iter()
            .all(|&x| mask[group.inv(x)] && members.iter().all(|&y| mask[group.mul(x, y)]));
        if members.is_empty() || !closed {
            return Err(Error::invalid("element list is not a subgroup"));
        }
        let mut members = members.to_vec();
        members.sort_unstable();
        members.dedup();
        Ok(Self { members, mask })
    }

    pub fn members(&self) -> &[ElemId] {
        &self.members
    }

    pub fn order(&self) -> usize {
        self.members.len()
    }

    #[inline]
    pub fn contains(&self, x: ElemId) -> bool {
        self.mask[x]
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.members.iter().all(|&x| other.contains(x))
    }

    /// True when `x H x⁻¹ = H`.
    pub fn is_normalized_by(&self, group: &FiniteGroup, x: ElemId) -> bool {
        let xi = group.inv(x);
        self.members
            .iter()
            .all(|&h| self.contains(group.conj(h, xi)))
    }

    /// `{x ∈ G : x H x⁻¹ = H}`.
    pub fn normalizer(&self, group: &FiniteGroup) -> Vec<ElemId> {
        group
            .elements()
            .filter(|&x| self.is_normalized_by(group, x))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orders_match_formulas() {
        for kind in [
            GroupKind::Cyclic(24),
            GroupKind::Symmetric(1),
            GroupKind::Symmetric(5),
            GroupKind::Gl2(2),
            GroupKind::Gl2(4),
            GroupKind::Gl2(6),
            GroupKind::Gsp4(2),
        ] {
            let g = FiniteGroup::new(kind).unwrap();
            assert_eq!(g.order() as u64, kind.expected_order().unwrap(), "{kind}");
        }
    }

    #[test]
    fn sp4_f2_has_720_elements() {
        // |Sp_4(F_2)| = |S_6|; over F_2 every multiplier is 1
        let g = FiniteGroup::new(GroupKind::Gsp4(2)).unwrap();
        assert_eq!(g.order(), 720);
        assert_eq!(
            g.order(),
            FiniteGroup::new(GroupKind::Symmetric(6)).unwrap().order()
        );
    }

    #[test]
    fn rejects_huge_groups() {
        assert!(FiniteGroup::new(GroupKind::Symmetric(9)).is_err());
        assert!(FiniteGroup::new(GroupKind::Gsp4(3)).is_err());
    }

    #[test]
    fn group_axioms_small() {
        for kind in [
            GroupKind::Symmetric(4),
            GroupKind::Gl2(3),
            GroupKind::Cyclic(9),
        ] {
            let g = FiniteGroup::new(kind).unwrap();
            for x in g.elements() {
                assert_eq!(g.mul(x, g.inv(x)), g.identity());
                assert_eq!(g.mul(g.identity(), x), x);
                for y in g.elements().step_by(3) {
                    for z in g.elements().step_by(5) {
                        assert_eq!(g.mul(g.mul(x, y), z), g.mul(x, g.mul(y, z)));
                    }
                }
            }
        }
    }

    #[test]
    fn literals_round_trip() {
        for kind in [
            GroupKind::Symmetric(5),
            GroupKind::Gl2(4),
            GroupKind::Cyclic(7),
            GroupKind::Gsp4(2),
        ] {
            let g = FiniteGroup::new(kind).unwrap();
            for x in g.elements() {
                assert_eq!(g.parse_element(&g.format(x)), Ok(x), "{kind}");
            }
        }
    }

    #[test]
    fn cycle_composition() {
        let g = FiniteGroup::new(GroupKind::Symmetric(3)).unwrap();
        let p = |s: &str| g.parse_element(s).unwrap();
        assert_eq!(g.conj(p("(12)"), p("(13)")), p("(23)"));
        assert_eq!(p("(12)(23)"), g.mul(p("(12)"), p("(23)")));
        assert_eq!(p("(1,2,3)"), p("(123)"));
        assert_eq!(p("()"), g.identity());
        assert!(g.parse_element("(14)").is_err());
        assert!(g.parse_element("(1 1)").is_err());
        assert!(g.parse_element("(12").is_err());
    }

    #[test]
    fn singular_matrix_rejected() {
        let g = FiniteGroup::new(GroupKind::Gl2(4)).unwrap();
        assert!(g.parse_element("[2 0; 0 1]").is_err());
        assert!(g.parse_element("[1 0 0; 0 1]").is_err());
        assert!(g.parse_element("[3 1; 0 1]").is_ok());
    }

    #[test]
    fn subgroups() {
        let g = FiniteGroup::new(GroupKind::Symmetric(4)).unwrap();
        let p = |s: &str| g.parse_element(s).unwrap();
        let v4 = Subgroup::generated(&g, &[p("(12)(34)"), p("(13)(24)")]);
        assert_eq!(v4.order(), 4);
        assert_eq!(v4.normalizer(&g).len(), 24);
        let c4 = Subgroup::generated(&g, &[p("(1234)")]);
        assert_eq!(c4.order(), 4);
        assert_eq!(c4.normalizer(&g).len(), 8);
        assert!(Subgroup::trivial(&g).is_subgroup_of(&c4));
        assert!(Subgroup::from_members(&g, &[g.identity(), p("(12)")]).is_ok());
        assert!(Subgroup::from_members(&g, &[g.identity(), p("(123)")]).is_err());
    }

    #[test]
    fn kind_parsing() {
        assert_eq!(GroupKind::parse("gl2:5").unwrap(), GroupKind::Gl2(5));
        assert_eq!(GroupKind::parse("gsp2:2").unwrap(), GroupKind::Gsp4(2));
        assert_eq!(GroupKind::parse(" sym:4 ").unwrap().to_string(), "sym:4");
        assert!(GroupKind::parse("dihedral:4").is_err());
        assert!(GroupKind::parse("cyclic:0").is_err());
    }
}
