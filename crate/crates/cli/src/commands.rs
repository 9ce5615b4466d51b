use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use clap::Parser;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sofic_core::census::{self, CountReport, Prop, Satisfied};
use sofic_core::convexity::{self, convex_combine, cut, CutResult, WeightVector};
use sofic_core::deamplify::deamplify;
use sofic_core::evidence::{self, Evidence, Verification};
use sofic_core::expansion::{self, check_expander, sample_expander_pair, ExpansionCertificate};
use sofic_core::perm::{coxeter, cycle, fix_trace, freeness, hamming};
use sofic_core::rational::format_rational;
use sofic_core::strange::{self, FamilyRequest};
use sofic_core::{conjugacy, rng, GenTuple, Limits, Perm, Subset};

use crate::args::*;
use crate::output::{csv_bytes, emit, emit_json, read_json, write_atomic, to_json, Artifact};

/// A malformed request; maps to exit status 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn config_error(msg: impl Into<String>) -> anyhow::Error {
    ConfigError(msg.into()).into()
}

/// 2 for invalid input, 3 for exhausted limits or budgets, 1 otherwise.
pub fn exit_code(err: &anyhow::Error) -> u8 {
    use sofic_core::Error as E;
    if let Some(e) = err.downcast_ref::<E>() {
        return match e {
            E::OverLimit { .. } | E::BudgetExceeded { .. } | E::TriesExhausted { .. } => 3,
            _ => 2,
        };
    }
    if err.downcast_ref::<ConfigError>().is_some()
        || err.downcast_ref::<serde_json::Error>().is_some()
        || err.downcast_ref::<std::io::Error>().is_some()
    {
        return 2;
    }
    1
}

pub fn dispatch(cli: Cli) -> Result<u8> {
    let limits = match &cli.limits {
        Some(p) => read_json::<Limits>(p)?,
        None => Limits::default(),
    };
    match cli.command {
        Command::Census(a) => census_cmd(&a, &limits),
        Command::Expander(a) => expander_cmd(&a, &limits),
        Command::Deamplify(a) => deamplify_cmd(&a, &limits),
        Command::Convexity(a) => convexity_cmd(&a),
        Command::Strange(a) => strange_cmd(&a, &limits),
        Command::Family(a) => family_cmd(&a, &limits),
        Command::Verify(a) => verify_cmd(&a, &limits),
        Command::Bench(a) => bench_cmd(&a, &limits),
        Command::Run(a) => run_cmd(&a),
        Command::Trend(a) => trend_cmd(&a, &limits),
    }
}

fn parse_prop(s: &str) -> Result<Prop> {
    let prop = match s {
        "5.12" => Some(Prop::HammingBall),
        "5.13" => Some(Prop::CycleCommuting),
        "3.5" => Some(Prop::NearCommuting),
        _ => Prop::ALL.into_iter().find(|p| p.name() == s),
    };
    prop.ok_or_else(|| {
        let names: Vec<_> = Prop::ALL.iter().map(|p| p.name()).collect();
        config_error(format!("unknown prop {s:?}; expected one of {}", names.join(", ")))
    })
}

fn named_perm(name: &str, n: usize) -> Result<Perm> {
    Ok(match name {
        "cycle" => cycle(n)?,
        "identity" => Perm::identity(n),
        "reversal" => Perm::reversal(n),
        path => {
            let p: Perm = read_json(Path::new(path))?;
            if p.degree() != n {
                return Err(config_error(format!("{path}: degree {} but --n {n}", p.degree())));
            }
            p
        }
    })
}

pub const CENSUS_COLUMNS: [&str; 7] = ["prop", "n", "parameter", "count", "bound", "verdict", "seconds"];

fn census_row(r: &CountReport) -> Vec<String> {
    vec![
        r.prop.name().to_string(),
        r.n.to_string(),
        format_rational(&r.parameter),
        r.count.to_string(),
        r.bound.to_string(),
        r.satisfied.to_string(),
        format!("{:.6}", r.elapsed.as_secs_f64()),
    ]
}

fn census_cmd(a: &CensusArgs, limits: &Limits) -> Result<u8> {
    let prop = parse_prop(&a.prop)?;
    let mut reports = Vec::new();
    let mut evidence = Vec::new();
    for &n in &a.n.0 {
        let center = match prop {
            Prop::HammingBall => Some(named_perm(a.center.as_deref().unwrap_or("identity"), n)?),
            Prop::NearCommuting | Prop::SBall => Some(named_perm(a.center.as_deref().unwrap_or("cycle"), n)?),
            _ => None,
        };
        let c = center.as_ref();
        let report = match prop {
            Prop::HammingBall => census::count_hamming_ball(c.expect("center"), &a.param, limits)?,
            Prop::CycleCommuting => census::count_cycle_commuting(n, &a.param, limits)?,
            Prop::NearCommuting => census::count_near_commuting(c.expect("center"), &a.param, limits)?,
            Prop::SBall => {
                let cert = census::count_s_ball(c.expect("center"), &a.param, limits)?;
                let report = cert.report.clone();
                evidence.push(Evidence::SBall(cert));
                report
            }
            Prop::LSet => census::count_l_set(n, &a.param, limits)?,
            Prop::KSet => census::count_k_set(n, &a.param, limits)?,
            Prop::TSet => census::count_t_set(n, &a.param, limits)?,
        };
        if prop != Prop::SBall {
            evidence.push(Evidence::Census { report: report.clone(), center });
        }
        reports.push(report);
    }
    match a.format {
        Format::Csv => {
            let rows: Vec<_> = reports.iter().map(census_row).collect();
            emit(a.out.as_deref(), &csv_bytes(&CENSUS_COLUMNS, &rows)?)?;
        }
        Format::Json => emit_json(a.out.as_deref(), &Artifact::new("census", a, &reports, evidence))?,
    }
    let violated = reports.iter().any(|r| r.satisfied == Satisfied::Violated);
    Ok(if a.strict && violated { 1 } else { 0 })
}

fn build_tuple(a: &ExpanderArgs) -> Result<GenTuple> {
    if let Some(p) = &a.tuple {
        return read_json(p);
    }
    let n = a.n.ok_or_else(|| config_error("--n or --tuple is required"))?;
    let mut perms = Vec::new();
    for (i, g) in a.gens.split(',').map(str::trim).enumerate() {
        perms.push(match g {
            "random" => Perm::random(n, &mut rng::stream(a.seed, i as u64)),
            other => named_perm(other, n)?,
        });
    }
    Ok(GenTuple::new(perms)?)
}

#[derive(Serialize)]
struct ExpanderOutput<'a> {
    tuple: &'a GenTuple,
    certificate: &'a ExpansionCertificate,
    #[serde(skip_serializing_if = "Option::is_none")]
    freeness: Option<&'a sofic_core::perm::Freeness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    tries: Option<usize>,
}

fn expander_cmd(a: &ExpanderArgs, limits: &Limits) -> Result<u8> {
    let (tuple, certificate, pair) = if a.sample_pair {
        let n = a.n.ok_or_else(|| config_error("--sample-pair needs --n"))?;
        let pair = sample_expander_pair(n, &a.lambda, a.radius, a.tries, a.seed, limits)?;
        (pair.tuple.clone(), pair.certificate.clone(), Some(pair))
    } else {
        let t = build_tuple(a)?;
        let cert = check_expander(&t, &a.lambda, a.seed, limits)?;
        (t, cert, None)
    };
    let out = ExpanderOutput {
        tuple: &tuple,
        certificate: &certificate,
        freeness: pair.as_ref().map(|p| &p.freeness),
        tries: pair.as_ref().map(|p| p.tries),
    };
    let evidence = vec![Evidence::Expander { tuple: tuple.clone(), certificate: certificate.clone() }];
    emit_json(a.out.as_deref(), &Artifact::new("expander", a, &out, evidence))?;
    if let (Some(path), Some(w)) = (&a.witness_out, &certificate.witness) {
        write_atomic(path, &to_json(w)?)?;
    }
    Ok(0)
}

fn deamplify_cmd(a: &DeamplifyArgs, limits: &Limits) -> Result<u8> {
    let x: GenTuple = read_json(&a.x)?;
    let y: GenTuple = read_json(&a.y)?;
    let u: Perm = read_json(&a.u)?;
    let y_cert: Option<ExpansionCertificate> = match (&a.y_cert, a.certify_y) {
        (Some(p), _) => Some(read_json(p)?),
        (None, true) => Some(check_expander(&y, &a.lambda, a.seed, limits)?),
        (None, false) => None,
    };
    let result = deamplify(&x, &y, &u, &a.lambda, y_cert.as_ref(), a.verbose)?;
    let evidence = vec![Evidence::Deamplify { x, y, u, lambda: a.lambda, y_cert, result: result.clone() }];
    emit_json(a.out.as_deref(), &Artifact::new("deamplify", a, &result, evidence))?;
    Ok(0)
}

/// One step of a convexity experiment file.
#[derive(Debug, Deserialize)]
#[serde(tag = "op", rename_all = "kebab-case")]
enum ConvexOp {
    /// Direct sum of amplifications with the given weights, then cut back.
    Combine {
        tuples: Vec<GenTuple>,
        weights: WeightVector,
        #[serde(default = "one")]
        scale: usize,
    },
    Cut { tuple: GenTuple, subset: Subset },
    /// Whether the subset splits the tuple as a direct sum.
    Decompose { tuple: GenTuple, subset: Subset },
    Orbits { tuple: GenTuple },
}

fn one() -> usize {
    1
}

#[derive(Serialize)]
#[serde(tag = "op", rename_all = "kebab-case")]
enum ConvexOutput {
    Combine {
        combination: convexity::ConvexCombination,
        cuts: Vec<CutResult>,
        recovered: bool,
    },
    Cut(CutResult),
    Decompose { invariant: bool, message: Option<String> },
    Orbits { orbits: Vec<Subset> },
}

fn convexity_cmd(a: &FileArgs) -> Result<u8> {
    let ops: Vec<ConvexOp> = read_json(&a.file)?;
    if ops.is_empty() {
        return Ok(0);
    }
    let mut outputs = Vec::with_capacity(ops.len());
    let mut evidence = Vec::new();
    for op in ops {
        outputs.push(match op {
            ConvexOp::Combine { tuples, weights, scale } => {
                let combination = convex_combine(&tuples, &weights, scale)?;
                let mut cuts = Vec::new();
                for block in &combination.blocks {
                    let c = cut(&combination.tuple, block)?;
                    evidence.push(Evidence::Cut { tuple: combination.tuple.clone(), subset: block.clone(), result: c.clone() });
                    cuts.push(c);
                }
                let mut recovered = true;
                for (i, t) in tuples.iter().enumerate() {
                    recovered &= combination.recover(i)? == *t;
                }
                ConvexOutput::Combine { combination, cuts, recovered }
            }
            ConvexOp::Cut { tuple, subset } => {
                let c = cut(&tuple, &subset)?;
                evidence.push(Evidence::Cut { tuple, subset, result: c.clone() });
                ConvexOutput::Cut(c)
            }
            ConvexOp::Decompose { tuple, subset } => match convexity::verify_decomposition(&tuple, &subset) {
                Ok(invariant) => ConvexOutput::Decompose { invariant, message: None },
                Err(e @ sofic_core::Error::NotInvariant { .. }) => {
                    ConvexOutput::Decompose { invariant: false, message: Some(e.to_string()) }
                }
                Err(e) => return Err(e.into()),
            },
            ConvexOp::Orbits { tuple } => ConvexOutput::Orbits { orbits: convexity::orbit_subsets(&tuple) },
        });
    }
    emit_json(a.out.as_deref(), &Artifact::new("convexity", a, &outputs, evidence))?;
    Ok(0)
}

fn strange_cmd(a: &StrangeArgs, limits: &Limits) -> Result<u8> {
    let c = strange::build_strange_candidate(a.n, &a.delta, a.seed, a.t_tries, a.k_trials, limits)?;
    emit_json(a.out.as_deref(), &Artifact::new("strange", a, &c, vec![Evidence::Strange(c.clone())]))?;
    Ok(0)
}

fn family_cmd(a: &FamilyArgs, limits: &Limits) -> Result<u8> {
    let req = FamilyRequest {
        n: a.n,
        k: a.k,
        lambda: a.lambda,
        separation: a.separation,
        radius: a.radius,
        seed: a.seed,
        budget: a.budget,
    };
    let fam = strange::pick_far_expanders(&req, limits)?;
    let complete = fam.is_complete();
    emit_json(a.out.as_deref(), &Artifact::new("family", a, &fam, vec![Evidence::Family(fam.clone())]))?;
    if !complete {
        eprintln!("family: {} of {} members within {} draws", fam.members.len(), a.k, a.budget);
        return Ok(3);
    }
    Ok(0)
}

#[derive(Serialize)]
struct VerifyEntry {
    file: PathBuf,
    index: usize,
    #[serde(flatten)]
    verification: Verification,
}

fn load_evidence(path: &Path) -> Result<Vec<Evidence>> {
    let value: serde_json::Value = read_json(path)?;
    let list = match value.get("evidence") {
        Some(ev) => serde_json::from_value(ev.clone()),
        None => serde_json::from_value(value).map(|e| vec![e]),
    };
    list.with_context(|| format!("{}: no evidence records", path.display()))
}

fn verify_cmd(a: &VerifyArgs, limits: &Limits) -> Result<u8> {
    let mut entries = Vec::new();
    for f in &a.files {
        for (index, e) in load_evidence(f)?.iter().enumerate() {
            entries.push(VerifyEntry { file: f.clone(), index, verification: evidence::verify(e, limits)? });
        }
    }
    for e in &entries {
        let failed: Vec<_> = e.verification.checks.iter().filter(|c| !c.ok).map(|c| c.name.as_str()).collect();
        let status = if e.verification.ok { "ok".to_string() } else { format!("FAILED ({})", failed.join(", ")) };
        eprintln!("{}[{}] {}: {status}", e.file.display(), e.index, e.verification.kind);
    }
    emit_json(a.out.as_deref(), &entries)?;
    Ok(if entries.iter().all(|e| e.verification.ok) { 0 } else { 1 })
}

fn time_reps<T>(reps: u32, mut f: impl FnMut() -> T) -> f64 {
    let start = Instant::now();
    for _ in 0..reps {
        std::hint::black_box(f());
    }
    start.elapsed().as_secs_f64() / reps.max(1) as f64
}

fn bench_cmd(a: &BenchArgs, limits: &Limits) -> Result<u8> {
    let mut rows = Vec::new();
    for &n in &a.n.0 {
        if n < 2 {
            return Err(config_error("bench degrees must be at least 2"));
        }
        let mut rng = rng::stream(a.seed, n as u64);
        let p = Perm::random(n, &mut rng);
        let q = Perm::random(n, &mut rng);
        let t = GenTuple::new(vec![cycle(n)?, q.clone()])?;
        let y = t.conjugate_by(&p)?;
        let mut push = |op: &str, secs: f64| rows.push(vec![op.to_string(), n.to_string(), a.reps.to_string(), format!("{secs:.9}")]);
        push("coxeter", time_reps(a.reps, || coxeter(&p)));
        push("hamming", time_reps(a.reps, || hamming(&p, &q)));
        push("fix-trace", time_reps(a.reps, || fix_trace(&p)));
        push("freeness-r3", time_reps(a.reps, || freeness(&t, 3, limits.word_budget)));
        push("anneal-10k", time_reps(a.reps, || conjugacy::anneal(&t, &y, 10_000, a.seed)));
        push("expander-check", time_reps(a.reps, || check_expander(&t, &expansion::default_lambda(), a.seed, limits)));
    }
    emit(a.out.as_deref(), &csv_bytes(&["op", "n", "reps", "seconds"], &rows)?)?;
    Ok(0)
}

pub const TREND_COLUMNS: [&str; 7] = ["kind", "n", "parameter", "trials", "successes", "fraction", "seconds"];

fn trend_cmd(a: &TrendArgs, limits: &Limits) -> Result<u8> {
    let mut rows = Vec::new();
    for &n in &a.n.0 {
        let start = Instant::now();
        let (param, report) = match a.kind {
            TrendKind::Expander => (a.lambda, expansion::expander_rate(n, &a.lambda, a.trials, a.seed, limits)?),
            TrendKind::Freeness => {
                (a.threshold, expansion::freeness_rate(n, a.radius, &a.threshold, a.trials, a.seed, limits)?)
            }
        };
        let kind = match a.kind {
            TrendKind::Expander => "expander".to_string(),
            TrendKind::Freeness => format!("freeness-r{}", a.radius),
        };
        rows.push(vec![
            kind,
            n.to_string(),
            format_rational(&param),
            report.trials.to_string(),
            report.successes.to_string(),
            format!("{:.6}", report.fraction()),
            format!("{:.6}", start.elapsed().as_secs_f64()),
        ]);
    }
    emit(a.out.as_deref(), &csv_bytes(&TREND_COLUMNS, &rows)?)?;
    Ok(0)
}

/// Items run on the pool; statuses come back in item order.
fn run_cmd(a: &FileArgs) -> Result<u8> {
    let items: Vec<Vec<String>> = read_json(&a.file)?;
    let codes: Vec<u8> = items
        .par_iter()
        .map(|argv| {
            let full = std::iter::once("sofic".to_string()).chain(argv.iter().cloned());
            match Cli::try_parse_from(full) {
                Ok(cli) => dispatch(cli).unwrap_or_else(|e| {
                    eprintln!("error: {e:#}");
                    exit_code(&e)
                }),
                Err(e) => {
                    eprintln!("{e}");
                    2
                }
            }
        })
        .collect();
    for (i, c) in codes.iter().enumerate() {
        eprintln!("item {i}: exit {c}");
    }
    if let Some(out) = &a.out {
        if !items.is_empty() {
            write_atomic(out, &to_json(&codes)?)?;
        }
    }
    Ok(codes.into_iter().max().unwrap_or(0))
}
