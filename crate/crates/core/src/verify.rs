//! End-to-end checks tying the genus-one census, the mass formulas and the
//! finite trace-formula model together. Each check is exact; the runtime
//! budgets are part of the pass condition.

use std::sync::{Arc, OnceLock};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::arith::primes_between;
use crate::cosettrace::{
    delta_sets, factored_trace, involution_census, kernel_trace, orbital_trace, random_model,
    stabilization_level, volume_identity_check, ElemId, Family, FiniteGroup, FiniteGroupModel,
    GroupKind, GroupLibrary, Subgroup,
};
use crate::error::Result;
use crate::exactnum::{is_integral, rat};
use crate::massform::{
    class_number_level, gsp_order, nonprincipal_class_number_level, nonprincipal_mass,
    primes_coprime_to, principal_mass,
};
use crate::sslocus::{census, deuring_count, eichler_mass, expected_mass, Census};

pub const SWEEP_MIN: u64 = 5;
pub const SWEEP_MAX: u64 = 1000;
pub const MODEL_SEED: u64 = 0x5eed_0009;
pub const MODEL_COUNT: usize = 100;
pub const VOLUME_CHECKS_PER_FAMILY: usize = 50;
pub const RANDOM_INVOLUTIONS: usize = 1000;

pub const SWEEP_BUDGET: Duration = Duration::from_secs(60);
pub const INTEGRALITY_BUDGET: Duration = Duration::from_secs(5);
pub const TRACE_BUDGET: Duration = Duration::from_secs(120);

#[derive(Clone, Debug)]
pub struct Outcome {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl std::fmt::Display for Outcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "[{}] {}. {} ({:.2?}): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.elapsed,
            self.detail
        )
    }
}

pub const NAMES: [&str; 9] = [
    "geometric identity F = 2T - H",
    "class-number oracle",
    "mass consistency",
    "integrality of level-N class numbers",
    "spot values",
    "trace formula equality",
    "factorization for small K",
    "volume identities",
    "involution census",
];

/// Holds the shared census sweep and random models between checks.
pub struct Suite {
    censuses: OnceLock<(std::result::Result<Vec<Census>, String>, Duration)>,
    library: GroupLibrary,
    models: OnceLock<std::result::Result<Vec<FiniteGroupModel>, String>>,
}

impl Default for Suite {
    fn default() -> Self {
        Self::new()
    }
}

fn outcome(id: u8, start: Instant, failures: Vec<String>, ok_detail: String) -> Outcome {
    let passed = failures.is_empty();
    let detail = if passed {
        ok_detail
    } else {
        let shown: Vec<&str> = failures.iter().take(5).map(String::as_str).collect();
        format!("{} failure(s): {}", failures.len(), shown.join("; "))
    };
    Outcome {
        id,
        name: NAMES[id as usize - 1],
        passed,
        detail,
        elapsed: start.elapsed(),
    }
}

impl Suite {
    pub fn new() -> Self {
        Self {
            censuses: OnceLock::new(),
            library: GroupLibrary::new(),
            models: OnceLock::new(),
        }
    }

    fn censuses(&self) -> (&std::result::Result<Vec<Census>, String>, Duration) {
        let (c, d) = self.censuses.get_or_init(|| {
            let start = Instant::now();
            let primes = primes_between(SWEEP_MIN, SWEEP_MAX);
            let res = primes
                .par_iter()
                .map(|&p| census(p))
                .collect::<Result<Vec<_>>>()
                .map_err(|e| e.to_string());
            (res, start.elapsed())
        });
        (c, *d)
    }

    /// The seeded models of the trace-formula check, families in rotation.
    pub fn models(&self) -> std::result::Result<&[FiniteGroupModel], String> {
        self.models
            .get_or_init(|| {
                let mut rng = ChaCha8Rng::seed_from_u64(MODEL_SEED);
                (0..MODEL_COUNT)
                    .map(|i| random_model(&self.library, Family::ALL[i % 3], &mut rng))
                    .collect::<Result<Vec<_>>>()
                    .map_err(|e| e.to_string())
            })
            .as_ref()
            .map(Vec::as_slice)
            .map_err(Clone::clone)
    }

    pub fn run(&self, id: u8) -> Outcome {
        match id {
            1 => self.geometric_identity(),
            2 => self.class_number_oracle(),
            3 => self.mass_consistency(),
            4 => integrality(),
            5 => spot_values(),
            6 => self.trace_equality(),
            7 => self.factorization(),
            8 => self.volume_identities(),
            9 => self.involution_universality(),
            _ => panic!("no check with id {id}"),
        }
    }

    pub fn run_all(&self) -> Vec<Outcome> {
        (1..=9).map(|id| self.run(id)).collect()
    }

    pub fn geometric_identity(&self) -> Outcome {
        let start = Instant::now();
        let (cs, sweep_time) = self.censuses();
        let mut failures = Vec::new();
        match cs {
            Err(e) => failures.push(e.clone()),
            Ok(cs) => {
                for c in cs {
                    if c.f as i64 != 2 * c.t as i64 - c.h as i64 {
                        failures.push(format!(
                            "p = {}: F = {}, 2T - H = {}",
                            c.p,
                            c.f,
                            2 * c.t as i64 - c.h as i64
                        ));
                    }
                    if let Err(e) = c.validate() {
                        failures.push(e.to_string());
                    }
                }
            }
        }
        let total = start.elapsed().max(sweep_time);
        if total > SWEEP_BUDGET {
            failures.push(format!("sweep took {total:.1?}, budget {SWEEP_BUDGET:?}"));
        }
        let n = cs.as_ref().map(Vec::len).unwrap_or(0);
        let mut o = outcome(
            1,
            start,
            failures,
            format!("{n} primes in [{SWEEP_MIN}, {SWEEP_MAX}]"),
        );
        o.elapsed = total;
        o
    }

    pub fn class_number_oracle(&self) -> Outcome {
        let start = Instant::now();
        let mut failures = Vec::new();
        match self.censuses().0 {
            Err(e) => failures.push(e.clone()),
            Ok(cs) => {
                for c in cs {
                    match deuring_count(c.p) {
                        Ok(h) if h == c.h => {}
                        Ok(h) => failures.push(format!("p = {}: H = {}, formula {h}", c.p, c.h)),
                        Err(e) => failures.push(e.to_string()),
                    }
                }
            }
        }
        outcome(
            2,
            start,
            failures,
            "H = ⌊p/12⌋ + ε(p mod 12) for every prime".into(),
        )
    }

    pub fn mass_consistency(&self) -> Outcome {
        let start = Instant::now();
        let mut failures = Vec::new();
        match self.censuses().0 {
            Err(e) => failures.push(e.clone()),
            Ok(cs) => {
                for c in cs {
                    let geometric = eichler_mass(c);
                    let analytic = principal_mass(1, c.p);
                    match geometric {
                        Ok(m) if m == analytic && m == expected_mass(c.p) => {}
                        Ok(m) => failures.push(format!(
                            "p = {}: Σ 1/|Aut| = {m}, zeta product {analytic}",
                            c.p
                        )),
                        Err(e) => failures.push(e.to_string()),
                    }
                }
            }
        }
        outcome(
            3,
            start,
            failures,
            "Σ 1/|Aut| = zeta product = (p - 1)/24".into(),
        )
    }

    pub fn trace_equality(&self) -> Outcome {
        let start = Instant::now();
        let mut failures = Vec::new();
        match self.models() {
            Err(e) => failures.push(e),
            Ok(models) => {
                for (i, m) in models.iter().enumerate() {
                    let kernel = kernel_trace(m);
                    // orbital_trace errors when the two orbital evaluations
                    // disagree or the sum misses the kernel count
                    match (kernel, orbital_trace(m)) {
                        (Ok(k), Ok(r)) => {
                            if r.orbital_trace != rat(k) || r.kernel_trace != k {
                                failures.push(format!(
                                    "model {i}: kernel {k}, orbital {}",
                                    r.orbital_trace
                                ));
                            }
                            if r.orbital_terms
                                .iter()
                                .any(|t| t.orbital_integral != t.orbital_integral_cosets)
                            {
                                failures.push(format!("model {i}: orbital strategies disagree"));
                            }
                        }
                        (Err(e), _) | (_, Err(e)) => failures.push(format!("model {i}: {e}")),
                    }
                }
            }
        }
        if start.elapsed() > TRACE_BUDGET {
            failures.push(format!(
                "took {:.1?}, budget {TRACE_BUDGET:?}",
                start.elapsed()
            ));
        }
        outcome(
            6,
            start,
            failures,
            format!("{MODEL_COUNT} seeded models, seed {MODEL_SEED:#x}"),
        )
    }

    pub fn factorization(&self) -> Outcome {
        let start = Instant::now();
        let mut failures = Vec::new();
        match self.models() {
            Err(e) => failures.push(e),
            Ok(models) => {
                for (i, m) in models.iter().enumerate() {
                    if let Err(e) = check_trivial_level(m) {
                        failures.push(format!("model {i} ({:?}): {e}", m.group().kind()));
                    }
                }
            }
        }
        let mut levels = Vec::new();
        match shrinking_chains() {
            Err(e) => failures.push(e.to_string()),
            Ok(chains) => {
                for (name, chain) in &chains {
                    if let Err(e) = check_chain(chain) {
                        failures.push(format!("chain {name}: {e}"));
                    }
                    let level = stabilization_level(chain).map_or("-".into(), |l| l.to_string());
                    levels.push(format!("{name} at level {level}"));
                }
            }
        }
        outcome(
            7,
            start,
            failures,
            format!(
                "{MODEL_COUNT} models at K = 1; chains stabilize: {}",
                levels.join(", ")
            ),
        )
    }

    pub fn volume_identities(&self) -> Outcome {
        let start = Instant::now();
        let mut failures = Vec::new();
        let mut rng = ChaCha8Rng::seed_from_u64(MODEL_SEED ^ 0x8);
        for family in Family::ALL {
            for n in 0..VOLUME_CHECKS_PER_FAMILY {
                match random_model(&self.library, family, &mut rng) {
                    Err(e) => failures.push(e.to_string()),
                    Ok(m) => {
                        let gamma = *m.gamma().members().choose(&mut rng).expect("Γ contains e");
                        let a = rng.gen_range(0..m.group().order());
                        if !volume_identity_check(&m, gamma, a) {
                            failures.push(format!(
                                "{family:?} check {n}: γ = {}, a = {}",
                                m.group().format(gamma),
                                m.group().format(a)
                            ));
                        }
                    }
                }
            }
        }
        outcome(
            8,
            start,
            failures,
            format!("{VOLUME_CHECKS_PER_FAMILY} pairs per family"),
        )
    }

    pub fn involution_universality(&self) -> Outcome {
        let start = Instant::now();
        let mut failures = Vec::new();
        let mut rng = ChaCha8Rng::seed_from_u64(MODEL_SEED ^ 0x9);
        for trial in 0..RANDOM_INVOLUTIONS {
            // built from a known number of fixed points and swapped pairs
            let fixed = rng.gen_range(0..=60usize);
            let pairs = rng.gen_range(0..=60usize);
            let n = fixed + 2 * pairs;
            let mut points: Vec<usize> = (0..n).collect();
            points.shuffle(&mut rng);
            let mut map: Vec<usize> = (0..n).collect();
            for pair in points[fixed..].chunks(2) {
                map[pair[0]] = pair[1];
                map[pair[1]] = pair[0];
            }
            let expected = (n as u64, fixed as u64, (fixed + pairs) as u64);
            match involution_census(n, |i| map[i]) {
                Ok(got) if got == expected => {}
                Ok(got) => failures.push(format!("trial {trial}: {got:?}, expected {expected:?}")),
                Err(e) => failures.push(format!("trial {trial}: {e}")),
            }
        }
        match self.censuses().0 {
            Err(e) => failures.push(e.clone()),
            Ok(cs) => {
                for c in cs {
                    match involution_census(c.involution.len(), |i| c.involution[i]) {
                        Ok(hft) if hft == (c.h, c.f, c.t) => {}
                        Ok(hft) => failures.push(format!("p = {}: {hft:?}", c.p)),
                        Err(e) => failures.push(format!("p = {}: {e}", c.p)),
                    }
                }
            }
        }
        outcome(
            9,
            start,
            failures,
            format!("{RANDOM_INVOLUTIONS} random involutions and every census involution"),
        )
    }
}

pub fn integrality() -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut checked = 0;
    for n in 3..=8u64 {
        let primes = primes_coprime_to(n, 10);
        for &p in &primes {
            for g in 1..=4u32 {
                let h = rat(gsp_order(g, n)) * principal_mass(g, p);
                checked += 1;
                if !is_integral(&h) || h < rat(1) {
                    failures.push(format!("principal g = {g}, p = {p}, N = {n}: {h}"));
                }
            }
            for g in [2u32, 4] {
                match nonprincipal_mass(g, p) {
                    Ok(m) => {
                        let h = rat(gsp_order(g, n)) * m;
                        checked += 1;
                        if !is_integral(&h) || h < rat(1) {
                            failures.push(format!("non-principal g = {g}, p = {p}, N = {n}: {h}"));
                        }
                    }
                    Err(e) => failures.push(e.to_string()),
                }
            }
        }
    }
    if start.elapsed() > INTEGRALITY_BUDGET {
        failures.push(format!(
            "took {:.1?}, budget {INTEGRALITY_BUDGET:?}",
            start.elapsed()
        ));
    }
    outcome(
        4,
        start,
        failures,
        format!("{checked} products integral and positive"),
    )
}

pub fn spot_values() -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut expect = |what: &str, got: Result<BigInt>, want: i64| match got {
        Ok(v) if v == BigInt::from(want) => {}
        Ok(v) => failures.push(format!("{what} = {v}, expected {want}")),
        Err(e) => failures.push(format!("{what}: {e}")),
    };
    expect(
        "class_number_level(1, 5, 3)",
        class_number_level(1, 5, 3),
        8,
    );
    expect(
        "class_number_level(1, 11, 3)",
        class_number_level(1, 11, 3),
        20,
    );
    expect(
        "nonprincipal_class_number_level(2, 2, 3)",
        nonprincipal_class_number_level(2, 2, 3),
        54,
    );
    expect("gsp_order(2, 2)", Ok(gsp_order(2, 2)), 720);
    outcome(5, start, failures, "8, 20, 54, 720".into())
}

fn check_trivial_level(m: &FiniteGroupModel) -> std::result::Result<(), String> {
    let trivial = Subgroup::trivial(m.group());
    let m = m.with_k(trivial).map_err(|e| e.to_string())?;
    let d = delta_sets(&m);
    if d.delta_k != d.delta_f {
        return Err(format!(
            "Δ_K has {} classes, Δ_f has {}",
            d.delta_k.len(),
            d.delta_f.len()
        ));
    }
    let kernel = kernel_trace(&m).map_err(|e| e.to_string())?;
    match factored_trace(&m) {
        Ok(f) if f.value == Some(rat(kernel)) => Ok(()),
        Ok(f) => Err(format!(
            "factored {:?} ({:?}), kernel {kernel}",
            f.value, f.note
        )),
        Err(e) => Err(e.to_string()),
    }
}

fn check_chain(chain: &[FiniteGroupModel]) -> std::result::Result<(), String> {
    let deltas: Vec<_> = chain.iter().map(delta_sets).collect();
    for (i, w) in deltas.windows(2).enumerate() {
        if !w[1].delta_k.iter().all(|c| w[0].delta_k.contains(c)) {
            return Err(format!("Δ_K grows between levels {i} and {}", i + 1));
        }
    }
    let last = deltas.last().ok_or("empty chain")?;
    if stabilization_level(chain).is_none() {
        return Err("Δ_K does not reach Δ_f at the last level".into());
    }
    // Δ_f does not depend on K
    if deltas.iter().any(|d| d.delta_f != last.delta_f) {
        return Err("Δ_f changes along the chain".into());
    }
    let m = chain.last().expect("non-empty");
    let kernel = kernel_trace(m).map_err(|e| e.to_string())?;
    match factored_trace(m) {
        Ok(f) if f.value == Some(rat(kernel)) => Ok(()),
        Ok(f) => Err(format!("factored {:?}, kernel {kernel}", f.value)),
        Err(e) => Err(e.to_string()),
    }
}

fn chain_from(
    group: Arc<FiniteGroup>,
    gamma: &[&str],
    levels: &[&[&str]],
    pi: &str,
) -> Result<Vec<FiniteGroupModel>> {
    let parse = |s: &str| -> Result<ElemId> {
        group
            .parse_element(s)
            .map_err(|(_, msg)| crate::error::Error::invalid(format!("{s}: {msg}")))
    };
    let gamma: Vec<ElemId> = gamma.iter().map(|s| parse(s)).collect::<Result<_>>()?;
    let pi = parse(pi)?;
    levels
        .iter()
        .map(|gens| {
            let k: Vec<ElemId> = gens.iter().map(|s| parse(s)).collect::<Result<_>>()?;
            crate::cosettrace::build_model(Arc::clone(&group), &gamma, &k, pi)
        })
        .collect()
}

/// Three decreasing level chains ending at `K = 1`: congruence-style
/// subgroups of `GL_2(Z/4)`, a normal series in `S_4`, and `Z/24`.
pub fn shrinking_chains() -> Result<Vec<(&'static str, Vec<FiniteGroupModel>)>> {
    let gl = Arc::new(FiniteGroup::new(GroupKind::Gl2(4))?);
    let gl_chain = chain_from(
        Arc::clone(&gl),
        &["[1 1; 0 1]", "[0 1; 1 0]"],
        &[
            // kernel of reduction mod 2
            &["[3 0; 0 1]", "[1 0; 0 3]", "[1 2; 0 1]", "[1 0; 2 1]"],
            &["[3 0; 0 3]"],
            &[],
        ],
        "[1 1; 0 1]",
    )?;
    let s4 = Arc::new(FiniteGroup::new(GroupKind::Symmetric(4))?);
    let s4_chain = chain_from(
        s4,
        &["(1 2 3 4)", "(1 3)"],
        &[&["(1 2)(3 4)", "(1 3)(2 4)"], &["(1 2)(3 4)"], &[]],
        "(1 2)",
    )?;
    let z24 = Arc::new(FiniteGroup::new(GroupKind::Cyclic(24))?);
    let z_chain = chain_from(z24, &["3"], &[&["4"], &["8"], &[]], "6")?;
    let chains = vec![("GL2(Z/4)", gl_chain), ("S4", s4_chain), ("Z/24", z_chain)];
    for (name, chain) in &chains {
        for w in chain.windows(2) {
            if !w[1].k().is_subgroup_of(w[0].k()) || w[1].k().order() >= w[0].k().order() {
                return Err(crate::error::Error::violation(format!(
                    "{name} chain is not decreasing"
                )));
            }
        }
        if chain.last().map(|m| m.k().order()) != Some(1) {
            return Err(crate::error::Error::violation(format!(
                "{name} chain does not end at 1"
            )));
        }
    }
    Ok(chains)
}

/// Number of trivial-level models among the seeded draws whose factored
/// trace disagrees with the kernel count.
pub fn trivial_level_failures(suite: &Suite) -> usize {
    suite
        .models()
        .map(|ms| {
            ms.iter()
                .filter(|m| check_trivial_level(m).is_err())
                .count()
        })
        .unwrap_or(0)
}
