//! Both sides of the trace formula for `R(π)` on `Γ\G/K`.
//!
//! Haar measures are counting measures scaled so that `vol(K) = 1` on `G`
//! and `vol(G_γ ∩ K) = 1` on each centralizer `G_γ`. With these,
//!
//! ```text
//! a(G_γ) = |G_γ| / (|Γ_γ| |G_γ ∩ K|)
//! O_γ    = |G_γ ∩ K| / (|G_γ| |K|) · #{x ∈ G : x⁻¹γx ∈ πK}
//!        = Σ_{[a] ∈ G_γ\E_γ/K} |G_γ ∩ K| / |G_γ ∩ aKa⁻¹|
//! ```
//!
//! and `Σ_{γ ∈ Γ/~} a(G_γ) O_γ` equals the number of double cosets fixed by
//! `[x] -> [xπ]`.

use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::{rat, ratio, rational_json};

use super::group::{ElemId, FiniteGroup, Subgroup};
use super::model::{DoubleCosetSpace, FiniteGroupModel};

/// Fixed points of `[x] -> [xπ]` on `Γ\G/K`.
pub fn kernel_trace(m: &FiniteGroupModel) -> Result<u64> {
    Ok(DoubleCosetSpace::new(m)?.fixed_points() as u64)
}

/// `Γ`-conjugacy classes of `Γ` as `(representative, size)`, representative
/// the smallest element index.
pub fn gamma_classes(m: &FiniteGroupModel) -> Vec<(ElemId, usize)> {
    let g = m.group();
    let gamma = m.gamma();
    let mut seen = vec![false; g.order()];
    let mut out = Vec::new();
    for &x in gamma.members() {
        if seen[x] {
            continue;
        }
        let mut size = 0;
        for &h in gamma.members() {
            let y = g.conj(x, h);
            if !seen[y] {
                seen[y] = true;
                size += 1;
            }
        }
        out.push((x, size));
    }
    out
}

pub fn centralizer(g: &FiniteGroup, x: ElemId) -> Subgroup {
    let members: Vec<ElemId> = g.elements().filter(|&y| g.commute(x, y)).collect();
    Subgroup::from_members(g, &members).expect("centralizers are subgroups")
}

fn intersection_order(a: &Subgroup, b: &Subgroup) -> usize {
    a.members().iter().filter(|&&x| b.contains(x)).count()
}

/// `#{x ∈ G : x⁻¹γx ∈ πK}`.
fn support_count(g: &FiniteGroup, gamma: ElemId, pi_k: &[bool]) -> usize {
    g.elements().filter(|&x| pi_k[g.conj(gamma, x)]).count()
}

/// `vol(Γ_γ\G_γ)` with `vol(G_γ ∩ K) = 1`.
fn volume_term(m: &FiniteGroupModel, g_gamma: &Subgroup) -> BigRational {
    let gamma_gamma = intersection_order(g_gamma, m.gamma());
    let gk = intersection_order(g_gamma, m.k());
    ratio(g_gamma.order() as u64, (gamma_gamma * gk) as u64)
}

/// Orbital integral from the direct count over `G`.
fn orbital_direct(
    m: &FiniteGroupModel,
    gamma: ElemId,
    g_gamma: &Subgroup,
    pi_k: &[bool],
) -> BigRational {
    let g = m.group();
    let gk = intersection_order(g_gamma, m.k());
    let count = support_count(g, gamma, pi_k);
    ratio(
        (gk * count) as u64,
        (g_gamma.order() * m.k().order()) as u64,
    )
}

/// Orbital integral as a sum over `G_γ\E_γ/K` of `vol(G_γ ∩ aKa⁻¹)⁻¹`.
fn orbital_cosets(
    m: &FiniteGroupModel,
    gamma: ElemId,
    g_gamma: &Subgroup,
    pi_k: &[bool],
) -> BigRational {
    let g = m.group();
    let k = m.k();
    let gk = intersection_order(g_gamma, k) as u64;
    let mut assigned = vec![false; g.order()];
    let mut total = BigRational::zero();
    for a in g.elements() {
        if assigned[a] || !pi_k[g.conj(gamma, a)] {
            continue;
        }
        for &h in g_gamma.members() {
            let ha = g.mul(h, a);
            for &kk in k.members() {
                assigned[g.mul(ha, kk)] = true;
            }
        }
        // |G_γ ∩ aKa⁻¹|
        let stab = g_gamma
            .members()
            .iter()
            .filter(|&&h| k.contains(g.conj(h, a)))
            .count() as u64;
        total += ratio(gk, stab);
    }
    total
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitalTerm {
    /// Literal of the class representative.
    pub class_rep: String,
    pub class_size: usize,
    #[serde(with = "rational_json")]
    pub a_value: BigRational,
    #[serde(with = "rational_json")]
    pub orbital_integral: BigRational,
    /// The same integral from the double-coset sum.
    #[serde(with = "rational_json")]
    pub orbital_integral_cosets: BigRational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceReport {
    pub group: String,
    pub gamma_order: usize,
    pub k_order: usize,
    pub pi: String,
    pub double_cosets: usize,
    pub kernel_trace: u64,
    pub orbital_terms: Vec<OrbitalTerm>,
    #[serde(with = "rational_json")]
    pub orbital_trace: BigRational,
    pub delta_k: Vec<String>,
    pub delta_f: Vec<String>,
    #[serde(with = "rational_json::option")]
    pub factored_value: Option<BigRational>,
    pub factored_note: Option<String>,
}

/// Runs both sides of the trace formula and checks they agree.
pub fn orbital_trace(m: &FiniteGroupModel) -> Result<TraceReport> {
    let g = m.group();
    let space = DoubleCosetSpace::new(m)?;
    let kernel = space.fixed_points() as u64;
    let pi_k = m.pi_k_mask();
    let mut terms = Vec::new();
    let mut total = BigRational::zero();
    for (rep, size) in gamma_classes(m) {
        let g_gamma = centralizer(g, rep);
        let a_value = volume_term(m, &g_gamma);
        let direct = orbital_direct(m, rep, &g_gamma, &pi_k);
        let cosets = orbital_cosets(m, rep, &g_gamma, &pi_k);
        if direct != cosets {
            return Err(Error::violation(format!(
                "orbital integral at {}: direct {direct} vs coset sum {cosets}",
                g.format(rep)
            )));
        }
        total += &a_value * &direct;
        terms.push(OrbitalTerm {
            class_rep: g.format(rep),
            class_size: size,
            a_value,
            orbital_integral: direct,
            orbital_integral_cosets: cosets,
        });
    }
    if total != rat(kernel) {
        return Err(Error::violation(format!(
            "orbital side {total} differs from fixed-point count {kernel}"
        )));
    }
    let deltas = delta_sets(m);
    let factored = match factored_trace(m) {
        Err(Error::InvariantViolation(msg)) => FactoredTrace {
            value: None,
            note: Some(format!("violation: {msg}")),
        },
        other => other?,
    };
    Ok(TraceReport {
        group: g.kind().to_string(),
        gamma_order: m.gamma().order(),
        k_order: m.k().order(),
        pi: g.format(m.pi()),
        double_cosets: space.len(),
        kernel_trace: kernel,
        orbital_terms: terms,
        orbital_trace: total,
        delta_k: deltas.delta_k.iter().map(|&x| g.format(x)).collect(),
        delta_f: deltas.delta_f.iter().map(|&x| g.format(x)).collect(),
        factored_value: factored.value,
        factored_note: factored.note,
    })
}

/// Class representatives (as in [`gamma_classes`]) of the two Δ-sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaSets {
    /// Classes meeting `πK` after `G`-conjugation.
    pub delta_k: Vec<ElemId>,
    /// Classes `G`-conjugate to `π`.
    pub delta_f: Vec<ElemId>,
}

pub fn delta_sets(m: &FiniteGroupModel) -> DeltaSets {
    let g = m.group();
    let pi_k = m.pi_k_mask();
    let mut pi_class = vec![false; g.order()];
    for x in g.elements() {
        pi_class[g.conj(m.pi(), x)] = true;
    }
    let mut delta_k = Vec::new();
    let mut delta_f = Vec::new();
    for (rep, _) in gamma_classes(m) {
        if g.elements().any(|x| pi_k[g.conj(rep, x)]) {
            delta_k.push(rep);
        }
        if pi_class[rep] {
            delta_f.push(rep);
        }
    }
    DeltaSets { delta_k, delta_f }
}

/// First index from which `Δ_K = Δ_f` holds at every later level of a
/// decreasing chain of level subgroups.
pub fn stabilization_level(chain: &[FiniteGroupModel]) -> Option<usize> {
    let mut level = None;
    for (i, m) in chain.iter().enumerate().rev() {
        let d = delta_sets(m);
        if d.delta_k != d.delta_f {
            break;
        }
        level = Some(i);
    }
    level
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactoredTrace {
    pub value: Option<BigRational>,
    pub note: Option<String>,
}

/// `|Δ_f(π)| · a(G_π) · O_π(φ_π)`, available once `Δ_K = Δ_f`.
///
/// `a(G_π) O_π` is taken at `π` when `π ∈ Γ`, otherwise at the first class
/// of `Δ_f`, a `Γ`-element conjugate to `π` in `G`. The term for
/// `γ = y⁻¹πy` equals that one only when `|Γ_γ|` is the same across `Δ_f`;
/// in a finite model that can fail (non-normal `Γ` fusing classes with
/// different centralizers), and the mismatch is reported as a violation.
pub fn factored_trace(m: &FiniteGroupModel) -> Result<FactoredTrace> {
    let deltas = delta_sets(m);
    if deltas.delta_k != deltas.delta_f {
        return Ok(FactoredTrace {
            value: None,
            note: Some(format!(
                "Δ_K has {} classes but Δ_f has {}; K is not small enough",
                deltas.delta_k.len(),
                deltas.delta_f.len()
            )),
        });
    }
    let g = m.group();
    let value = if deltas.delta_f.is_empty() {
        BigRational::zero()
    } else {
        let base = if m.gamma().contains(m.pi()) {
            m.pi()
        } else {
            deltas.delta_f[0]
        };
        let g_base = centralizer(g, base);
        let pi_k = m.pi_k_mask();
        rat(deltas.delta_f.len() as u64)
            * volume_term(m, &g_base)
            * orbital_direct(m, base, &g_base, &pi_k)
    };
    let kernel = kernel_trace(m)?;
    if value != rat(kernel) {
        return Err(Error::violation(format!(
            "factored trace {value} differs from fixed-point count {kernel}"
        )));
    }
    Ok(FactoredTrace {
        value: Some(value),
        note: None,
    })
}

/// Both sides of `vol(G_γ\G_γ a K) = vol(K) / vol(G_γ ∩ aKa⁻¹)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VolumeSides {
    pub quotient_measure: BigRational,
    pub stabilizer_formula: BigRational,
}

pub fn volume_sides(m: &FiniteGroupModel, gamma: ElemId, a: ElemId) -> VolumeSides {
    let g = m.group();
    let k = m.k();
    let g_gamma = centralizer(g, gamma);
    let gk = intersection_order(&g_gamma, k) as u64;
    // |G_γ a K| by enumeration
    let mut in_set = vec![false; g.order()];
    let mut size = 0u64;
    for &h in g_gamma.members() {
        let ha = g.mul(h, a);
        for &kk in k.members() {
            let y = g.mul(ha, kk);
            if !std::mem::replace(&mut in_set[y], true) {
                size += 1;
            }
        }
    }
    // vol_dx(S) / vol_dxγ(G_γ)
    let quotient_measure = ratio(size, k.order() as u64) / ratio(g_gamma.order() as u64, gk);
    let stab = g_gamma
        .members()
        .iter()
        .filter(|&&h| k.contains(g.conj(h, a)))
        .count() as u64;
    let stabilizer_formula = rat(1) / ratio(stab, gk);
    VolumeSides {
        quotient_measure,
        stabilizer_formula,
    }
}

pub fn volume_identity_check(m: &FiniteGroupModel, gamma: ElemId, a: ElemId) -> bool {
    let s = volume_sides(m, gamma, a);
    s.quotient_measure == s.stabilizer_formula
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::cosettrace::group::GroupKind;
    use crate::cosettrace::model::build_model;

    fn group(kind: GroupKind) -> Arc<FiniteGroup> {
        Arc::new(FiniteGroup::new(kind).unwrap())
    }

    /// Fixed points counted straight from the definition: Γ x π K = Γ x K.
    fn brute_kernel(m: &FiniteGroupModel) -> u64 {
        let g = m.group();
        let coset = |x: ElemId| {
            let mut s: Vec<ElemId> = m
                .gamma()
                .members()
                .iter()
                .flat_map(|&h| m.k().members().iter().map(move |&k| g.mul(g.mul(h, x), k)))
                .collect();
            s.sort_unstable();
            s.dedup();
            s
        };
        let mut seen = std::collections::BTreeSet::new();
        let mut fixed = 0;
        for x in g.elements() {
            let c = coset(x);
            if seen.insert(c.clone()) && coset(g.mul(x, m.pi())) == c {
                fixed += 1;
            }
        }
        fixed
    }

    #[test]
    fn cyclic_four_example() {
        let z4 = group(GroupKind::Cyclic(4));
        let m = build_model(z4, &[2], &[], 2).unwrap();
        assert_eq!(kernel_trace(&m).unwrap(), 2);
        let r = orbital_trace(&m).unwrap();
        assert_eq!(r.orbital_trace, rat(2));
        let two = r.orbital_terms.iter().find(|t| t.class_rep == "2").unwrap();
        assert_eq!(&two.a_value * &two.orbital_integral, rat(2));
        // |G_γ| / (|Γ_γ| |G_γ ∩ K|) = 4 / 2; four conjugators over |G_γ||K| = 4
        assert_eq!(two.a_value, rat(2));
        assert_eq!(two.orbital_integral, rat(1));
        let zero = r.orbital_terms.iter().find(|t| t.class_rep == "e").unwrap();
        assert!(zero.orbital_integral.is_zero());
        assert_eq!(r.delta_k, vec!["2"]);
        assert_eq!(r.delta_f, vec!["2"]);
        assert_eq!(r.factored_value, Some(rat(2)));
    }

    #[test]
    fn symmetric_three_examples() {
        let s3 = group(GroupKind::Symmetric(3));
        let p = |s: &str| s3.parse_element(s).unwrap();
        let m = build_model(s3.clone(), &[], &[], s3.identity()).unwrap();
        assert_eq!(kernel_trace(&m).unwrap(), 6);
        let m = build_model(s3.clone(), &[], &[], p("(12)")).unwrap();
        assert_eq!(kernel_trace(&m).unwrap(), 0);
        assert_eq!(orbital_trace(&m).unwrap().orbital_trace, rat(0));
        let m = build_model(s3.clone(), &[p("(123)")], &[], s3.identity()).unwrap();
        assert_eq!(orbital_trace(&m).unwrap().orbital_trace, rat(2));
        assert_eq!(factored_trace(&m).unwrap().value, Some(rat(2)));
    }

    #[test]
    fn kernel_matches_brute_force() {
        let g = group(GroupKind::Symmetric(4));
        let p = |s: &str| g.parse_element(s).unwrap();
        let cases = [
            (
                vec![p("(1234)")],
                vec![p("(12)(34)"), p("(13)(24)")],
                p("(123)"),
            ),
            (vec![p("(12)"), p("(34)")], vec![p("(12)")], p("(12)")),
            (vec![p("(123)")], vec![], p("(12)")),
            (vec![], vec![p("(1234)")], p("(13)")),
        ];
        for (gam, k, pi) in cases {
            let m = build_model(g.clone(), &gam, &k, pi).unwrap();
            assert_eq!(kernel_trace(&m).unwrap(), brute_kernel(&m));
            orbital_trace(&m).unwrap();
        }
    }

    #[test]
    fn whole_k_absorbs_everything() {
        let g = group(GroupKind::Symmetric(4));
        let p = |s: &str| g.parse_element(s).unwrap();
        let m = build_model(
            g.clone(),
            &[p("(123)"), p("(12)")],
            &[p("(1234)"), p("(12)")],
            p("(13)"),
        )
        .unwrap();
        assert_eq!(m.k().order(), 24);
        let d = delta_sets(&m);
        assert_eq!(d.delta_k.len(), gamma_classes(&m).len());
    }

    #[test]
    fn trivial_k_gives_equal_deltas() {
        let g = group(GroupKind::Gl2(3));
        for pi in g.elements().step_by(7) {
            let m = build_model(g.clone(), &[5, 17], &[], pi).unwrap();
            let d = delta_sets(&m);
            assert_eq!(d.delta_k, d.delta_f);
        }
    }

    #[test]
    fn identity_operator_counts_cosets() {
        let g = group(GroupKind::Gl2(3));
        let m = build_model(g.clone(), &[3, 11], &[], g.identity()).unwrap();
        let f = factored_trace(&m).unwrap();
        let cosets = DoubleCosetSpace::new(&m).unwrap().len();
        assert_eq!(f.value, Some(rat(cosets as u64)));
        assert_eq!(delta_sets(&m).delta_f.len(), 1);
    }

    #[test]
    fn non_uniform_centralizers_break_factorization() {
        // Γ = <(12), (34), (345)> ≅ S_2 × S_3 in S_5, π = (12), K = 1:
        // (12) and (34) are both G-conjugate to π but |Γ_(12)| = 12, |Γ_(34)| = 4,
        // so Σ a·O = N(1/12 + 1/4) while |Δ_f| a(G_π) O_π = 2N/12.
        let g = group(GroupKind::Symmetric(5));
        let p = |s: &str| g.parse_element(s).unwrap();
        let m = build_model(
            g.clone(),
            &[p("(12)"), p("(34)"), p("(345)")],
            &[],
            p("(12)"),
        )
        .unwrap();
        let d = delta_sets(&m);
        assert_eq!(d.delta_k, d.delta_f);
        assert_eq!(d.delta_f.len(), 2);
        let r = orbital_trace(&m).unwrap();
        assert_eq!(r.factored_value, None);
        assert!(r.factored_note.unwrap().starts_with("violation"));
        assert!(matches!(
            factored_trace(&m),
            Err(Error::InvariantViolation(_))
        ));
    }

    #[test]
    fn volume_identity_examples() {
        let g = group(GroupKind::Symmetric(4));
        let p = |s: &str| g.parse_element(s).unwrap();
        let m = build_model(
            g.clone(),
            &[p("(1234)")],
            &[p("(12)"), p("(34)")],
            p("(12)"),
        )
        .unwrap();
        for gamma in m.gamma().members().to_vec() {
            for a in g.elements() {
                assert!(volume_identity_check(&m, gamma, a));
            }
        }
        // central γ: G_γ = G
        let s = volume_sides(&m, g.identity(), p("(13)"));
        assert_eq!(
            s.quotient_measure,
            rat(1) / ratio(m.k().order() as u64, m.k().order() as u64)
        );
    }

    #[test]
    fn report_json_round_trip() {
        let g = group(GroupKind::Gl2(3));
        let m = build_model(g.clone(), &[3, 11], &[], 7).unwrap();
        let r = orbital_trace(&m).unwrap();
        let json = serde_json::to_string(&r).unwrap();
        let back: TraceReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn chain_stabilization_level() {
        let z = group(GroupKind::Cyclic(24));
        let chain: Vec<FiniteGroupModel> = [&[4usize][..], &[8], &[]]
            .iter()
            .map(|k| build_model(z.clone(), &[3], k, 6).unwrap())
            .collect();
        assert_eq!(stabilization_level(&chain), Some(1));
        assert_eq!(stabilization_level(&chain[..1]), None);
        assert_eq!(stabilization_level(&[]), None);
    }
}
