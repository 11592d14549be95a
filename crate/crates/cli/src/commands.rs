use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use superspecial::cosettrace::{
    kernel_trace, orbital_trace, random_model_in, volume_identity_check, FiniteGroup, GroupKind,
    ModelSpec, TraceReport,
};
use superspecial::exactnum::{rational_json, BigRational};
use superspecial::massform::{evaluate, recover_type_number, GenusKind, MassParams};
use superspecial::sslocus::{self, Census, CensusCache};
use superspecial::verify::Suite;
use superspecial::{arith, Error};

use crate::{Format, MassArgs, SweepArgs, TraceDemoArgs};

pub const CACHE_ENV: &str = "SUPERSPECIAL_CACHE_DIR";
const CACHE_FILE: &str = "census-v1.txt";

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Violation(String),
    Io(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Violation(_) => 2,
            Failure::Io(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Violation(m) | Failure::Io(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvariantViolation(_) => Failure::Violation(e.to_string()),
            Error::Io { .. } => Failure::Io(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

/// Rendered output plus a failure that is reported after the output is
/// written (e.g. a sweep row whose checks failed).
pub struct Output {
    pub text: String,
    pub failure: Option<Failure>,
}

impl Output {
    fn ok(text: String) -> Self {
        Self {
            text,
            failure: None,
        }
    }
}

type CmdResult = Result<Output, Failure>;

pub fn emit(text: &str, path: Option<&Path>) -> Result<(), Failure> {
    match path {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| Failure::Io(format!("stdout: {e}")))
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusReport {
    pub p: u64,
    #[serde(rename = "H")]
    pub h: u64,
    #[serde(rename = "F")]
    pub f: u64,
    #[serde(rename = "T")]
    pub t: u64,
    pub j: Vec<String>,
    pub aut_orders: Vec<u32>,
    /// `Σ 1/|Aut|`; absent for p = 2, 3.
    #[serde(with = "rational_json::option")]
    pub mass: Option<BigRational>,
    pub checks: bool,
}

fn census_report(c: &Census) -> CensusReport {
    let checks = c.validate().is_ok() && c.f as i64 == 2 * c.t as i64 - c.h as i64;
    CensusReport {
        p: c.p,
        h: c.h,
        f: c.f,
        t: c.t,
        j: c.j_points.iter().map(ToString::to_string).collect(),
        aut_orders: c.aut_orders.clone(),
        mass: sslocus::eichler_mass(c).ok(),
        checks,
    }
}

const CSV_HEADER: &str = "p,H,F,T,mass_num,mass_den,checks";

fn csv_row(r: &CensusReport) -> String {
    let (num, den) = match &r.mass {
        Some(m) => (m.numer().to_string(), m.denom().to_string()),
        None => (String::new(), String::new()),
    };
    format!("{},{},{},{},{num},{den},{}", r.p, r.h, r.f, r.t, r.checks)
}

fn require_prime(p: u64) -> Result<(), Failure> {
    if arith::is_prime(p) {
        Ok(())
    } else {
        Err(Failure::Usage(format!("p must be prime (got {p})")))
    }
}

fn row_failure(rows: &[CensusReport]) -> Option<Failure> {
    let bad: Vec<String> = rows
        .iter()
        .filter(|r| !r.checks)
        .map(|r| r.p.to_string())
        .collect();
    (!bad.is_empty())
        .then(|| Failure::Violation(format!("census checks failed for p = {}", bad.join(", "))))
}

fn render_rows(rows: &[CensusReport], format: Format) -> String {
    match format {
        Format::Json => to_json(&rows),
        Format::Csv => {
            let mut s = format!("{CSV_HEADER}\n");
            for r in rows {
                let _ = writeln!(s, "{}", csv_row(r));
            }
            s
        }
    }
}

pub fn census(p: u64, format: Format) -> CmdResult {
    require_prime(p)?;
    let c = sslocus::census(p)?;
    let report = census_report(&c);
    let failure = row_failure(std::slice::from_ref(&report));
    let text = match format {
        Format::Json => to_json(&report),
        Format::Csv => render_rows(std::slice::from_ref(&report), Format::Csv),
    };
    Ok(Output { text, failure })
}

fn cache_dir(args: &SweepArgs) -> Option<PathBuf> {
    if let Some(dir) = &args.cache_dir {
        return Some(dir.clone());
    }
    if let Some(dir) = std::env::var_os(CACHE_ENV) {
        return Some(PathBuf::from(dir));
    }
    if let Some(dir) = std::env::var_os("XDG_CACHE_HOME") {
        return Some(PathBuf::from(dir).join("superspecial"));
    }
    std::env::var_os("HOME").map(|h| PathBuf::from(h).join(".cache").join("superspecial"))
}

pub fn sweep(args: &SweepArgs) -> CmdResult {
    if args.pmin > args.pmax {
        return Err(Failure::Usage(format!(
            "pmin = {} exceeds pmax = {}",
            args.pmin, args.pmax
        )));
    }
    let start = Instant::now();
    let primes = arith::primes_between(args.pmin, args.pmax);
    let mut cache = match (args.no_cache, cache_dir(args)) {
        (false, Some(dir)) => Some(CensusCache::open(dir.join(CACHE_FILE))?),
        _ => None,
    };
    let mut censuses: Vec<Option<Census>> = primes
        .iter()
        .map(|&p| cache.as_ref().and_then(|c| c.get(p)).cloned())
        .collect();
    let missing: Vec<u64> = primes
        .iter()
        .zip(&censuses)
        .filter(|(_, c)| c.is_none())
        .map(|(&p, _)| p)
        .collect();

    let jobs = args.jobs.unwrap_or_else(|| {
        std::thread::available_parallelism()
            .map(|n| n.get().min(8))
            .unwrap_or(1)
    });
    if jobs == 0 {
        return Err(Failure::Usage("--jobs must be positive".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Failure::Usage(format!("thread pool: {e}")))?;
    let fresh: Vec<Census> = pool.install(|| {
        missing
            .par_iter()
            .map(|&p| sslocus::census(p))
            .collect::<superspecial::Result<Vec<_>>>()
    })?;

    if let Some(cache) = cache.as_mut() {
        cache.insert_all(fresh.iter().filter(|c| c.validate().is_ok()))?;
    }
    let mut fresh_iter = fresh.into_iter();
    for slot in censuses.iter_mut().filter(|c| c.is_none()) {
        *slot = fresh_iter.next();
    }
    let rows: Vec<CensusReport> = censuses.iter().flatten().map(census_report).collect();

    if args.stats {
        let rejected = cache.as_ref().map_or(0, CensusCache::rejected);
        eprintln!(
            "primes: {}, cached: {}, computed: {}, rejected cache lines: {}, elapsed: {:.3?}",
            primes.len(),
            primes.len() - missing.len(),
            missing.len(),
            rejected,
            start.elapsed()
        );
    }
    Ok(Output {
        failure: row_failure(&rows),
        text: render_rows(&rows, args.format),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MassReport {
    pub g: u32,
    pub p: u64,
    #[serde(rename = "N")]
    pub n: Option<u64>,
    pub genus: GenusKind,
    #[serde(with = "rational_json")]
    pub mass: BigRational,
    pub gsp_order: String,
    pub class_number: Option<String>,
    pub trace: Option<String>,
    pub type_number: Option<String>,
    pub note: Option<String>,
}

pub fn mass(args: &MassArgs) -> CmdResult {
    require_prime(args.p)?;
    let kind = if args.nonprincipal {
        GenusKind::NonPrincipal
    } else {
        GenusKind::Principal
    };
    if let Some(n) = args.n {
        if n < 3 {
            return Err(Failure::Usage(format!(
                "N = {n}: the class number is |GSp_2g(Z/N)| × mass only for N >= 3, \
                 where the level structure leaves no non-trivial automorphisms"
            )));
        }
    }
    if args.trace.is_some() && args.n.is_none() {
        return Err(Failure::Usage("--trace needs a level -N >= 3".into()));
    }
    let params = MassParams::new(args.g, args.p, args.n.unwrap_or(1), kind)?;
    let result = evaluate(params)?;
    if !result.is_consistent() {
        return Err(Failure::Violation(
            "class number differs from |GSp| × mass".into(),
        ));
    }
    let type_number = match (&args.trace, &result.class_number) {
        (Some(tr), Some(h)) => {
            let tr: BigInt = tr
                .parse()
                .map_err(|_| Failure::Usage(format!("--trace must be an integer (got {tr})")))?;
            Some(recover_type_number(h, &tr)?.to_string())
        }
        _ => None,
    };
    let report = MassReport {
        g: args.g,
        p: args.p,
        n: args.n,
        genus: kind,
        mass: result.mass.clone(),
        gsp_order: result.gsp_order.to_string(),
        class_number: result.class_number.as_ref().map(ToString::to_string),
        trace: args.trace.clone(),
        type_number,
        note: result.note.map(str::to_string),
    };
    let text = match args.format {
        Format::Json => to_json(&report),
        Format::Csv => {
            let opt = |o: &Option<String>| o.clone().unwrap_or_default();
            format!(
                "g,p,N,genus,mass_num,mass_den,gsp_order,class_number,type_number\n{},{},{},{},{},{},{},{},{}\n",
                report.g,
                report.p,
                report.n.map(|n| n.to_string()).unwrap_or_default(),
                match kind {
                    GenusKind::Principal => "principal",
                    GenusKind::NonPrincipal => "nonprincipal",
                },
                report.mass.numer(),
                report.mass.denom(),
                report.gsp_order,
                opt(&report.class_number),
                opt(&report.type_number),
            )
        }
    };
    Ok(Output::ok(text))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialSummary {
    pub group: String,
    pub seed: u64,
    pub trials: usize,
    pub trace_equalities: usize,
    pub volume_identities: usize,
    /// Models with `Δ_K = Δ_f`.
    pub factored_available: usize,
    /// Of those, models where the factored form matches the kernel count.
    pub factored_agree: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DemoReport {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub report: Option<TraceReport>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub trials: Option<TrialSummary>,
}

fn run_trials(group: Arc<FiniteGroup>, trials: usize, seed: u64) -> Result<TrialSummary, Failure> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = TrialSummary {
        group: group.kind().to_string(),
        seed,
        trials,
        trace_equalities: 0,
        volume_identities: 0,
        factored_available: 0,
        factored_agree: 0,
    };
    for _ in 0..trials {
        let m = random_model_in(Arc::clone(&group), &mut rng)?;
        let kernel = kernel_trace(&m)?;
        match orbital_trace(&m) {
            Ok(r) => {
                if r.orbital_trace == BigRational::from_integer(kernel.into()) {
                    s.trace_equalities += 1;
                }
                if let Some(v) = &r.factored_value {
                    s.factored_available += 1;
                    if *v == BigRational::from_integer(kernel.into()) {
                        s.factored_agree += 1;
                    }
                } else if r
                    .factored_note
                    .as_deref()
                    .is_some_and(|n| n.starts_with("violation"))
                {
                    s.factored_available += 1;
                }
            }
            Err(Error::InvariantViolation(_)) => {}
            Err(e) => return Err(e.into()),
        }
        let gamma = *m.gamma().members().choose(&mut rng).expect("Γ contains e");
        let a = rng.gen_range(0..group.order());
        if volume_identity_check(&m, gamma, a) {
            s.volume_identities += 1;
        }
    }
    Ok(s)
}

pub fn trace_demo(args: &TraceDemoArgs) -> CmdResult {
    let spec = match &args.spec {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
            Some(ModelSpec::parse(&text).map_err(|e| match e {
                Error::Parse { .. } => Failure::Usage(format!("{}: {e}", path.display())),
                e => e.into(),
            })?)
        }
        None => None,
    };
    let kind = match (&spec, &args.group) {
        (Some(s), None) => s.kind,
        (Some(_), Some(_)) => {
            return Err(Failure::Usage(
                "--group conflicts with the spec file's group".into(),
            ))
        }
        (None, Some(g)) => GroupKind::parse(g)?,
        (None, None) => return Err(Failure::Usage("give a model spec file or --group".into())),
    };
    if spec.is_none() && args.trials.is_none() {
        return Err(Failure::Usage("--group needs --trials".into()));
    }
    let group = Arc::new(FiniteGroup::new(kind)?);
    let report = match &spec {
        Some(s) => {
            let model = s.build(Arc::clone(&group)).map_err(|e| match e {
                Error::Parse { .. } => Failure::Usage(format!(
                    "{}: {e}",
                    args.spec.as_ref().expect("spec path").display()
                )),
                e => e.into(),
            })?;
            Some(orbital_trace(&model)?)
        }
        None => None,
    };
    let trials = match args.trials {
        Some(n) => Some(run_trials(Arc::clone(&group), n, args.seed)?),
        None => None,
    };
    let failure = trials.as_ref().and_then(|t| {
        (t.trace_equalities != t.trials || t.volume_identities != t.trials).then(|| {
            Failure::Violation(format!(
                "{}/{} trace equalities, {}/{} volume identities",
                t.trace_equalities, t.trials, t.volume_identities, t.trials
            ))
        })
    });
    Ok(Output {
        text: to_json(&DemoReport { report, trials }),
        failure,
    })
}

pub fn verify() -> CmdResult {
    let suite = Suite::new();
    let mut text = String::new();
    let mut failed = Vec::new();
    for o in suite.run_all() {
        let _ = writeln!(text, "{o}");
        if !o.passed {
            failed.push(o.id.to_string());
        }
    }
    Ok(Output {
        failure: (!failed.is_empty())
            .then(|| Failure::Violation(format!("checks failed: {}", failed.join(", ")))),
        text,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn census_report_round_trips() {
        let report = census_report(&sslocus::census(37).unwrap());
        let back: CensusReport = serde_json::from_str(&to_json(&report)).unwrap();
        assert_eq!(back, report);
        let small = census_report(&sslocus::census(3).unwrap());
        let back: CensusReport = serde_json::from_str(&to_json(&small)).unwrap();
        assert_eq!(back, small);
        assert!(small.mass.is_none());
    }

    #[test]
    fn mass_report_round_trips() {
        let args = MassArgs {
            g: 2,
            p: 2,
            n: Some(3),
            nonprincipal: true,
            trace: None,
            format: Format::Json,
        };
        let out = mass(&args).unwrap();
        let back: MassReport = serde_json::from_str(&out.text).unwrap();
        assert_eq!(back.class_number.as_deref(), Some("54"));
        assert_eq!(to_json(&back), out.text);
    }

    #[test]
    fn demo_report_round_trips() {
        let args = TraceDemoArgs {
            spec: None,
            trials: Some(5),
            seed: 3,
            group: Some("sym:3".into()),
        };
        let out = trace_demo(&args).unwrap();
        let back: DemoReport = serde_json::from_str(&out.text).unwrap();
        assert_eq!(to_json(&back), out.text);

        let spec = ModelSpec::parse("group: cyclic:6\ngamma: 2\nk: 3\npi: 3\n").unwrap();
        let report = orbital_trace(&spec.to_model().unwrap()).unwrap();
        let demo = DemoReport {
            report: Some(report),
            trials: None,
        };
        let back: DemoReport = serde_json::from_str(&to_json(&demo)).unwrap();
        assert_eq!(back, demo);
    }

    #[test]
    fn csv_row_layout() {
        let r = census_report(&sslocus::census(13).unwrap());
        assert_eq!(csv_row(&r), "13,1,1,1,1,2,true");
    }
}
