//! Exhaustive small-degree counts checked against closed-form bounds.
//!
//! Every count enumerates `P_n` (or `P_n × P_n`) in lexicographic order,
//! partitioned by first image. Bounds are compared in exact integer
//! arithmetic, including those with rational exponents: `count < n!/n^{p/q}`
//! is decided as `count^q · n^p < (n!)^q`.

use std::cmp::Ordering;
use std::fmt;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::conjugacy::{self, Conjugacy, SearchMode};
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::perm::{
    commutator_count, coxeter, cycle, for_each_perm, freeness, moved_count, par_count_perms,
    par_filter_map_perms, GenTuple, LexPerms, Perm, Word,
};
use crate::rational::{self, require_nonnegative, require_positive, Dist, Rational};
use crate::rng;

/// Which counting statement a report refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Prop {
    /// `|{y : d_H(x,y) < ε}| < n^⌊nε⌋`.
    HammingBall,
    /// `|{y : d_H(ay,ya) < ε}| < n^{⌊nε⌋+1}`.
    CycleCommuting,
    /// `|{c : d_H(bc,cb) < δ}| < n!/n^{4nδ}` when `d_H(b,1) > 11δ`, for large `n`.
    NearCommuting,
    /// `|{c : d_S((a,b),(a,c)) < λ}| < n^{2⌊nλ⌋+1}`.
    SBall,
    /// `|L_n^δ| > (1 - n^{-2δn})·n!`, for large `n`.
    LSet,
    /// `|K_n^δ| > (1 - n^{-δn})·n!`, for large `n`.
    KSet,
    /// `|T_n^δ| > δ^n·n!`, for large `n`.
    TSet,
}

impl Prop {
    pub const ALL: [Prop; 7] = [
        Prop::HammingBall,
        Prop::CycleCommuting,
        Prop::NearCommuting,
        Prop::SBall,
        Prop::LSet,
        Prop::KSet,
        Prop::TSet,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Prop::HammingBall => "hamming-ball",
            Prop::CycleCommuting => "cycle-commuting",
            Prop::NearCommuting => "near-commuting",
            Prop::SBall => "s-ball",
            Prop::LSet => "l-set",
            Prop::KSet => "k-set",
            Prop::TSet => "t-set",
        }
    }
}

impl fmt::Display for Prop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Satisfied {
    Strict,
    Equal,
    Violated,
    /// The statement only claims the inequality for large `n` (or under a
    /// hypothesis that fails here); the raw comparison is kept alongside.
    AsymptoticRegimeOnly,
}

impl fmt::Display for Satisfied {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Satisfied::Strict => "STRICT",
            Satisfied::Equal => "EQUAL",
            Satisfied::Violated => "VIOLATED",
            Satisfied::AsymptoticRegimeOnly => "ASYMPTOTIC_REGIME_ONLY",
        })
    }
}

/// Whether the count should fall below or above the bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Upper,
    Lower,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bound {
    pub side: Side,
    /// The closed form with this instance's numbers substituted.
    pub expr: String,
    /// Exact decimal value when the bound is an integer.
    pub exact: Option<String>,
    pub approx: f64,
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.exact {
            Some(v) => f.write_str(v),
            None => write!(f, "{:.6e}", self.approx),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountReport {
    pub prop: Prop,
    pub n: usize,
    /// `ε`, `δ` or `λ` depending on `prop`.
    #[serde(with = "rational::as_str")]
    pub parameter: Rational,
    pub count: u64,
    pub bound: Bound,
    pub satisfied: Satisfied,
    /// The comparison of `count` with `bound` alone, before regime labelling.
    pub comparison: Satisfied,
    /// Hypothesis of the statement, when it has one.
    pub hypothesis: Option<bool>,
    #[serde(skip)]
    pub elapsed: Duration,
}

fn upper_verdict(ord: Ordering) -> Satisfied {
    match ord {
        Ordering::Less => Satisfied::Strict,
        Ordering::Equal => Satisfied::Equal,
        Ordering::Greater => Satisfied::Violated,
    }
}

fn big(n: u64) -> BigUint {
    BigUint::from(n)
}

fn big_factorial(n: usize) -> BigUint {
    (1..=n as u64).fold(BigUint::one(), |acc, i| acc * i)
}

fn ln_factorial(n: usize) -> f64 {
    (1..=n).map(|i| (i as f64).ln()).sum()
}

/// `count < n^e` as an integer bound.
fn integer_power_bound(count: u64, n: usize, e: u64) -> (Bound, Satisfied) {
    let value = big(n as u64).pow(e as u32);
    let ord = big(count).cmp(&value);
    let bound = Bound {
        side: Side::Upper,
        expr: format!("{n}^{e}"),
        approx: value.to_f64().unwrap_or(f64::INFINITY),
        exact: Some(value.to_string()),
    };
    (bound, upper_verdict(ord))
}

/// `⌊n·r⌋` for nonnegative `r`.
fn floor_times(n: usize, r: &Rational) -> u64 {
    rational::floor_mul(n, r).max(0) as u64
}

/// `count/n < r` exactly.
#[inline]
fn frac_lt(count: usize, n: usize, r: &Rational) -> bool {
    (count as i128) * (*r.denom() as i128) < (*r.numer() as i128) * (n as i128)
}

/// `count/n > r` exactly.
#[inline]
fn frac_gt(count: usize, n: usize, r: &Rational) -> bool {
    (count as i128) * (*r.denom() as i128) > (*r.numer() as i128) * (n as i128)
}

fn check_limit(what: &'static str, n: usize, limit: usize) -> Result<()> {
    if n > limit {
        return Err(Error::OverLimit { what, n, limit });
    }
    Ok(())
}

/// Number of `y` with `d_H(x, y) < ε`, against `n^⌊nε⌋`.
pub fn count_hamming_ball(x: &Perm, eps: &Rational, limits: &Limits) -> Result<CountReport> {
    require_nonnegative("eps", eps)?;
    let n = x.degree();
    check_limit("hamming-ball census", n, limits.single_loop)?;
    let start = Instant::now();
    let xi = x.images();
    let count = par_count_perms(n, |y| {
        let diff = xi.iter().zip(y).filter(|(a, b)| a != b).count();
        frac_lt(diff, n, eps)
    });
    let (bound, verdict) = integer_power_bound(count, n, floor_times(n, eps));
    Ok(CountReport {
        prop: Prop::HammingBall,
        n,
        parameter: *eps,
        count,
        bound,
        satisfied: verdict,
        comparison: verdict,
        hypothesis: None,
        elapsed: start.elapsed(),
    })
}

/// Number of `y` with `d_H(a_n y, y a_n) < ε`, against `n^{⌊nε⌋+1}`.
pub fn count_cycle_commuting(n: usize, eps: &Rational, limits: &Limits) -> Result<CountReport> {
    require_nonnegative("eps", eps)?;
    check_limit("cycle-commuting census", n, limits.single_loop)?;
    let start = Instant::now();
    let a = cycle(n)?;
    let ai = a.images();
    let count = par_count_perms(n, |y| frac_lt(commutator_count(ai, y), n, eps));
    let (bound, verdict) = integer_power_bound(count, n, floor_times(n, eps) + 1);
    Ok(CountReport {
        prop: Prop::CycleCommuting,
        n,
        parameter: *eps,
        count,
        bound,
        satisfied: verdict,
        comparison: verdict,
        hypothesis: None,
        elapsed: start.elapsed(),
    })
}

/// `count < n!/n^{x}` for rational `x ≥ 0`, exactly.
fn compare_factorial_over_power(count: u64, n: usize, x: &Rational) -> Ordering {
    let (p, q) = (*x.numer() as u64, *x.denom() as u32);
    let lhs = big(count).pow(q) * big(n as u64).pow(p as u32);
    lhs.cmp(&big_factorial(n).pow(q))
}

/// Whether the logarithmic inequality that closes the counting argument,
/// `(5δn - 1)·ln((1 - 11δ)n) > 4nδ·ln n`, holds at this `n`.
pub fn near_commuting_regime(n: usize, delta: &Rational) -> bool {
    let d = *delta.numer() as f64 / *delta.denom() as f64;
    let n = n as f64;
    let shrink = (1.0 - 11.0 * d) * n;
    if shrink <= 1.0 || 5.0 * d * n - 1.0 <= 0.0 {
        return false;
    }
    (5.0 * d * n - 1.0) * shrink.ln() > 4.0 * n * d * n.ln()
}

/// Number of `c` with `d_H(bc, cb) < δ`, against `n!/n^{4nδ}`.
///
/// The statement needs `d_H(b, 1) > 11δ` and large `n`; when either fails the
/// verdict is `ASYMPTOTIC_REGIME_ONLY` with the raw comparison kept.
pub fn count_near_commuting(b: &Perm, delta: &Rational, limits: &Limits) -> Result<CountReport> {
    require_nonnegative("delta", delta)?;
    let n = b.degree();
    check_limit("near-commuting census", n, limits.single_loop)?;
    let start = Instant::now();
    let bi = b.images();
    let count = par_count_perms(n, |c| frac_lt(commutator_count(bi, c), n, delta));
    let exponent = *delta * Rational::from_integer(4 * n as i64);
    let comparison = upper_verdict(compare_factorial_over_power(count, n, &exponent));
    let hypothesis = frac_gt(moved_count(bi), n, &(*delta * Rational::from_integer(11)));
    let in_regime = hypothesis && near_commuting_regime(n, delta);
    let x = *exponent.numer() as f64 / *exponent.denom() as f64;
    let bound = Bound {
        side: Side::Upper,
        expr: format!("{n}!/{n}^({})", rational::format_rational(&exponent)),
        exact: exponent.is_integer().then(|| {
            let pw = big(n as u64).pow(exponent.to_integer() as u32);
            let f = big_factorial(n);
            if (&f % &pw).is_zero() {
                (f / pw).to_string()
            } else {
                format!("{f}/{pw}")
            }
        }),
        approx: (ln_factorial(n) - x * (n as f64).ln()).exp(),
    };
    Ok(CountReport {
        prop: Prop::NearCommuting,
        n,
        parameter: *delta,
        count,
        bound,
        satisfied: if in_regime { comparison } else { Satisfied::AsymptoticRegimeOnly },
        comparison,
        hypothesis: Some(hypothesis),
        elapsed: start.elapsed(),
    })
}

/// Conjugacy distance; `Exact` minimizes over `P_n`, `Heuristic` anneals
/// (falling back to the exact minimum at small degree).
pub fn s_distance(x: &GenTuple, y: &GenTuple, mode: SearchMode, seed: u64, limits: &Limits) -> Result<Conjugacy> {
    match mode {
        SearchMode::Exact => conjugacy::exact(x, y, limits.s_distance_exact),
        SearchMode::Heuristic => conjugacy::search(x, y, limits.anneal_steps, seed, limits.s_distance_exact),
    }
}

/// An S-ball count with a conjugator for every member, so membership can be
/// re-checked without the minimization.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SBallCertificate {
    pub report: CountReport,
    pub center: Perm,
    /// `(c, p)` with `d_H(a, p a p*) + d_H(b, p c p*) < λ`, in lexicographic order of `c`.
    pub members: Vec<(Perm, Perm)>,
}

/// Unnormalized `d_H(a, p a p*) + d_H(b, p c p*)`.
fn pair_cost(a: &[usize], b: &[usize], c: &[usize], p: &[usize]) -> usize {
    (0..p.len())
        .filter(|&i| a[p[i]] != p[a[i]])
        .count()
        + (0..p.len()).filter(|&i| b[p[i]] != p[c[i]]).count()
}

/// Number of `c` with `d_S((a, b), (a, c)) < λ`, against `n^{2⌊nλ⌋+1}`.
pub fn count_s_ball(b: &Perm, lambda: &Rational, limits: &Limits) -> Result<SBallCertificate> {
    require_nonnegative("lambda", lambda)?;
    let n = b.degree();
    check_limit("s-ball census", n, limits.s_ball)?;
    let start = Instant::now();
    let a = cycle(n)?;
    let ai = a.images();
    // conjugators whose a-term alone already stays below λ
    let useful: Vec<(usize, Vec<usize>)> = LexPerms::new(n)
        .filter_map(|p| {
            let pi = p.images();
            let ca = (0..n).filter(|&i| ai[pi[i]] != pi[ai[i]]).count();
            frac_lt(ca, n, lambda).then(|| (ca, pi.to_vec()))
        })
        .collect();
    let bi = b.images();
    let members: Vec<(Perm, Perm)> = par_filter_map_perms(n, |c| {
        useful.iter().find_map(|(_, p)| {
            frac_lt(pair_cost(ai, bi, c, p), n, lambda).then(|| {
                (Perm::from_images(c.to_vec()).expect("valid"), Perm::from_images(p.clone()).expect("valid"))
            })
        })
    });
    let count = members.len() as u64;
    let (bound, verdict) = integer_power_bound(count, n, 2 * floor_times(n, lambda) + 1);
    Ok(SBallCertificate {
        report: CountReport {
            prop: Prop::SBall,
            n,
            parameter: *lambda,
            count,
            bound,
            satisfied: verdict,
            comparison: verdict,
            hypothesis: None,
            elapsed: start.elapsed(),
        },
        center: b.clone(),
        members,
    })
}

/// Re-checks an S-ball certificate: each listed conjugator must witness
/// membership, the listed `c` must be distinct and match the count, and every
/// unlisted `c` must have no conjugator below `λ` (exhaustive).
pub fn verify_s_ball(cert: &SBallCertificate) -> Result<bool> {
    let n = cert.center.degree();
    let lambda = cert.report.parameter;
    let a = cycle(n)?;
    let (ai, bi) = (a.images(), cert.center.images());
    let mut listed = std::collections::HashSet::new();
    for (c, p) in &cert.members {
        if c.degree() != n || p.degree() != n || !listed.insert(c.images().to_vec()) {
            return Ok(false);
        }
        if !frac_lt(pair_cost(ai, bi, c.images(), p.images()), n, &lambda) {
            return Ok(false);
        }
    }
    if listed.len() as u64 != cert.report.count {
        return Ok(false);
    }
    let all: Vec<Perm> = LexPerms::new(n).collect();
    let missed = all.par_iter().any(|c| {
        !listed.contains(c.images())
            && all.iter().any(|p| frac_lt(pair_cost(ai, bi, c.images(), p.images()), n, &lambda))
    });
    let (_, verdict) = integer_power_bound(cert.report.count, n, 2 * floor_times(n, &lambda) + 1);
    Ok(!missed && verdict == cert.report.comparison)
}

/// Set membership with the permutation that rules it out.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Membership {
    pub member: bool,
    pub witness: Option<Perm>,
}

impl Membership {
    fn from_witness(w: Option<&[usize]>) -> Membership {
        Membership {
            member: w.is_none(),
            witness: w.map(|b| Perm::from_images(b.to_vec()).expect("valid")),
        }
    }
}

/// `L_n^δ` test data: the `b` with `d_H(b,1) > 11δ` and `d_H(ab,ba) < δ`.
/// Then `c ∈ L_n^δ` iff no such `b` has `d_H(cb,bc) < δ`.
pub struct LCondition {
    n: usize,
    delta: Rational,
    candidates: Vec<Vec<usize>>,
}

impl LCondition {
    pub fn new(n: usize, delta: &Rational, limits: &Limits) -> Result<LCondition> {
        require_positive("delta", delta)?;
        check_limit("L-set membership", n, limits.double_loop)?;
        let a = cycle(n)?;
        let ai = a.images();
        let eleven = *delta * Rational::from_integer(11);
        let candidates = par_filter_map_perms(n, |b| {
            (frac_gt(moved_count(b), n, &eleven) && frac_lt(commutator_count(ai, b), n, delta)).then(|| b.to_vec())
        });
        Ok(LCondition { n, delta: *delta, candidates })
    }

    /// Number of `b` that can rule a permutation out.
    pub fn candidate_count(&self) -> usize {
        self.candidates.len()
    }

    pub fn violator(&self, c: &[usize]) -> Option<&[usize]> {
        self.candidates
            .iter()
            .find(|b| frac_lt(commutator_count(c, b), self.n, &self.delta))
            .map(Vec::as_slice)
    }

    pub fn check(&self, c: &Perm) -> Result<Membership> {
        Error::mismatch(self.n, c.degree())?;
        Ok(Membership::from_witness(self.violator(c.images())))
    }
}

/// `K_n^δ` test data. A violating `b` needs `d_H(b,1) > 22·max(d_H(ab,ba), δ)`,
/// which depends on `b` alone, so those `b` are collected once; `c` is then a
/// member iff each of them has `d_H(b,1) ≤ 22·d_H(bc,cb)`.
pub struct KCondition {
    n: usize,
    delta: Rational,
    a: Perm,
    candidates: Vec<Vec<usize>>,
}

impl KCondition {
    pub fn new(n: usize, delta: &Rational, limits: &Limits) -> Result<KCondition> {
        require_positive("delta", delta)?;
        check_limit("K-set membership", n, limits.double_loop)?;
        let a = cycle(n)?;
        let ai = a.images();
        let twenty_two = *delta * Rational::from_integer(22);
        let candidates = par_filter_map_perms(n, |b| {
            let moved = moved_count(b);
            (moved > 22 * commutator_count(ai, b) && frac_gt(moved, n, &twenty_two)).then(|| b.to_vec())
        });
        Ok(KCondition { n, delta: *delta, a, candidates })
    }

    pub fn candidate_count(&self) -> usize {
        self.candidates.len()
    }

    pub fn violator(&self, c: &[usize]) -> Option<&[usize]> {
        self.candidates
            .iter()
            .find(|b| moved_count(b) > 22 * commutator_count(c, b))
            .map(Vec::as_slice)
    }

    pub fn check(&self, c: &Perm) -> Result<Membership> {
        Error::mismatch(self.n, c.degree())?;
        Ok(Membership::from_witness(self.violator(c.images())))
    }

    /// The defining condition checked against every `b ∈ P_n`.
    pub fn check_direct(&self, c: &Perm) -> Result<Membership> {
        Error::mismatch(self.n, c.degree())?;
        Ok(Membership::from_witness(k_violator_direct(self.a.images(), c.images(), &self.delta).as_deref()))
    }
}

/// `b` violates `d_H(b,1) ≤ 22·max(d_H(ab,ba), d_H(bc,cb), δ)`.
#[inline]
pub(crate) fn k_violates(a: &[usize], c: &[usize], b: &[usize], delta: &Rational) -> bool {
    let n = b.len();
    let moved = moved_count(b);
    let worst = commutator_count(a, b).max(commutator_count(c, b));
    moved > 22 * worst && frac_gt(moved, n, &(*delta * Rational::from_integer(22)))
}

fn k_violator_direct(a: &[usize], c: &[usize], delta: &Rational) -> Option<Vec<usize>> {
    let mut found = None;
    for_each_perm(c.len(), |b| {
        if found.is_none() && k_violates(a, c, b, delta) {
            found = Some(b.to_vec());
        }
    });
    found
}

/// `c ∈ L_n^δ` (the cycle `a_n` is fixed), by enumerating all `b`.
pub fn in_l(c: &Perm, delta: &Rational, limits: &Limits) -> Result<Membership> {
    LCondition::new(c.degree(), delta, limits)?.check(c)
}

/// `c ∈ K_n^δ` through the precomputed candidate set.
pub fn in_k(c: &Perm, delta: &Rational, limits: &Limits) -> Result<Membership> {
    KCondition::new(c.degree(), delta, limits)?.check(c)
}

/// `c ∈ K_n^δ` straight from the definition, one `b` at a time.
pub fn in_k_direct(c: &Perm, delta: &Rational, limits: &Limits) -> Result<Membership> {
    require_positive("delta", delta)?;
    let n = c.degree();
    check_limit("K-set membership", n, limits.double_loop)?;
    let a = cycle(n)?;
    Ok(Membership::from_witness(k_violator_direct(a.images(), c.images(), delta).as_deref()))
}

/// Everything measured when testing `p ∈ T_n^δ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TDiagnostics {
    pub member: bool,
    #[serde(with = "rational::as_str")]
    pub delta: Rational,
    pub coxeter: Dist,
    /// `ℓ_C(p) < 2δ`.
    pub coxeter_ok: bool,
    /// `⌊1/δ⌋`.
    pub radius: usize,
    /// Nontrivial word of length ≤ radius with the most fixed points under `(a_n, p)`.
    pub worst_word: Word,
    pub worst_fix_trace: Dist,
    /// Every such word has `d_H(w(a_n,p), 1) > 1 - δ`, i.e. fix trace below `δ`.
    pub freeness_ok: bool,
    pub words: u64,
}

/// `p ∈ T_n^δ`: `ℓ_C(p) < 2δ` and `d_H(w(a_n, p), 1) > 1 - δ` for every
/// nontrivial reduced `w` of length at most `1/δ`.
pub fn in_t(p: &Perm, delta: &Rational, word_budget: u128) -> Result<TDiagnostics> {
    require_positive("delta", delta)?;
    let n = p.degree();
    let radius = (delta.recip().to_integer()).max(1) as usize;
    let cox = coxeter(p);
    let coxeter_ok = cox.lt(&(*delta * Rational::from_integer(2)));
    let t = GenTuple::new(vec![cycle(n)?, p.clone()])?;
    let free = freeness(&t, radius, word_budget)?;
    let freeness_ok = free.defect.lt(delta);
    Ok(TDiagnostics {
        member: coxeter_ok && freeness_ok,
        delta: *delta,
        coxeter: cox,
        coxeter_ok,
        radius,
        worst_word: free.worst,
        worst_fix_trace: free.defect,
        freeness_ok,
        words: free.words,
    })
}

/// `count > (1 - n^{-x})·n!` exactly, for rational `x ≥ 0`.
fn compare_near_total(count: u64, n: usize, x: &Rational) -> Ordering {
    let total = big_factorial(n);
    let deficit = &total - big(count);
    let (p, q) = (*x.numer() as u32, *x.denom() as u32);
    // count > bound  ⟺  deficit^q · n^p < (n!)^q
    (total.pow(q)).cmp(&(deficit.pow(q) * big(n as u64).pow(p)))
}

fn lower_verdict(ord: Ordering) -> Satisfied {
    // ord compares count with the bound
    match ord {
        Ordering::Greater => Satisfied::Strict,
        Ordering::Equal => Satisfied::Equal,
        Ordering::Less => Satisfied::Violated,
    }
}

fn near_total_bound(n: usize, x: &Rational) -> Bound {
    let xf = *x.numer() as f64 / *x.denom() as f64;
    let nf = ln_factorial(n).exp();
    Bound {
        side: Side::Lower,
        expr: format!("(1 - {n}^-({}))·{n}!", rational::format_rational(x)),
        exact: None,
        approx: (1.0 - (n as f64).powf(-xf)) * nf,
    }
}

fn asymptotic_lower(prop: Prop, n: usize, delta: &Rational, count: u64, bound: Bound, cmp: Ordering, start: Instant) -> CountReport {
    let comparison = lower_verdict(cmp);
    CountReport {
        prop,
        n,
        parameter: *delta,
        count,
        bound,
        satisfied: if comparison == Satisfied::Strict { Satisfied::Strict } else { Satisfied::AsymptoticRegimeOnly },
        comparison,
        hypothesis: None,
        elapsed: start.elapsed(),
    }
}

/// `|L_n^δ|` against `(1 - n^{-2δn})·n!`.
pub fn count_l_set(n: usize, delta: &Rational, limits: &Limits) -> Result<CountReport> {
    let start = Instant::now();
    let cond = LCondition::new(n, delta, limits)?;
    let count = par_count_perms(n, |c| cond.violator(c).is_none());
    let x = *delta * Rational::from_integer(2 * n as i64);
    let cmp = compare_near_total(count, n, &x);
    Ok(asymptotic_lower(Prop::LSet, n, delta, count, near_total_bound(n, &x), cmp, start))
}

/// `|K_n^δ|` against `(1 - n^{-δn})·n!`.
pub fn count_k_set(n: usize, delta: &Rational, limits: &Limits) -> Result<CountReport> {
    let start = Instant::now();
    let cond = KCondition::new(n, delta, limits)?;
    let count = par_count_perms(n, |c| cond.violator(c).is_none());
    let x = *delta * Rational::from_integer(n as i64);
    let cmp = compare_near_total(count, n, &x);
    Ok(asymptotic_lower(Prop::KSet, n, delta, count, near_total_bound(n, &x), cmp, start))
}

/// `|T_n^δ|` against `δ^n·n!`.
pub fn count_t_set(n: usize, delta: &Rational, limits: &Limits) -> Result<CountReport> {
    require_positive("delta", delta)?;
    check_limit("T-set census", n, limits.single_loop)?;
    if *delta > Rational::from_integer(1) {
        return Err(Error::InvalidParameter("delta must be at most 1".into()));
    }
    let start = Instant::now();
    let radius = delta.recip().to_integer().max(1) as usize;
    let a = cycle(n)?;
    let two_delta = *delta * Rational::from_integer(2);
    let budget = limits.word_budget;
    // the ball size is the same for every p, so check it once up front
    let probe = GenTuple::new(vec![a.clone(), a.clone()])?;
    freeness(&probe, radius, budget)?;
    let count = par_count_perms(n, |p| {
        let p = Perm::from_images(p.to_vec()).expect("valid");
        if !coxeter(&p).lt(&two_delta) {
            return false;
        }
        let t = GenTuple::new(vec![a.clone(), p]).expect("same degree");
        freeness(&t, radius, budget).map(|f| f.defect.lt(delta)).unwrap_or(false)
    });
    let (dp, dq) = (*delta.numer() as u64, *delta.denom() as u64);
    // count > (p/q)^n · n!  ⟺  count · q^n > p^n · n!
    let lhs = big(count) * big(dq).pow(n as u32);
    let rhs = big(dp).pow(n as u32) * big_factorial(n);
    let df = dp as f64 / dq as f64;
    let bound = Bound {
        side: Side::Lower,
        expr: format!("({})^{n}·{n}!", rational::format_rational(delta)),
        exact: None,
        approx: df.powi(n as i32) * ln_factorial(n).exp(),
    };
    Ok(asymptotic_lower(Prop::TSet, n, delta, count, bound, lhs.cmp(&rhs), start))
}

/// Exhaustive comparison of `K_n^δ` with `∩_{j=0..k} L_n^{2^j δ}`, where `k` is
/// minimal with `2^{k+2}·δ > 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InclusionReport {
    pub n: usize,
    #[serde(with = "rational::as_str")]
    pub delta: Rational,
    pub levels: usize,
    pub l_sizes: Vec<u64>,
    pub intersection_size: u64,
    pub k_size: u64,
    /// Members of the intersection outside `K_n^δ`; empty when the inclusion holds.
    pub counterexamples: Vec<Perm>,
    /// Permutations on which the candidate-set test and the definition disagree.
    pub fast_direct_disagreements: Vec<Perm>,
}

impl InclusionReport {
    pub fn holds(&self) -> bool {
        self.counterexamples.is_empty() && self.fast_direct_disagreements.is_empty()
    }
}

/// Smallest `k` with `2^{k+2}·δ > 1`.
pub fn doubling_levels(delta: &Rational) -> usize {
    let mut k = 0;
    while Rational::from_integer(1 << (k + 2)) * *delta <= Rational::from_integer(1) {
        k += 1;
    }
    k
}

pub fn check_k_inclusion(n: usize, delta: &Rational, limits: &Limits) -> Result<InclusionReport> {
    let k = doubling_levels(delta);
    let ls: Vec<LCondition> = (0..=k)
        .map(|j| LCondition::new(n, &(*delta * Rational::from_integer(1 << j)), limits))
        .collect::<Result<_>>()?;
    let kc = KCondition::new(n, delta, limits)?;
    let a = cycle(n)?;
    let ai = a.images();
    struct Row {
        in_l: Vec<bool>,
        in_k: bool,
        disagree: bool,
        c: Vec<usize>,
    }
    let rows: Vec<Row> = par_filter_map_perms(n, |c| {
        let in_l: Vec<bool> = ls.iter().map(|l| l.violator(c).is_none()).collect();
        let in_k = kc.violator(c).is_none();
        let direct = k_violator_direct(ai, c, delta).is_none();
        Some(Row { in_l, in_k, disagree: in_k != direct, c: c.to_vec() })
    });
    let mut report = InclusionReport {
        n,
        delta: *delta,
        levels: k,
        l_sizes: vec![0; k + 1],
        intersection_size: 0,
        k_size: 0,
        counterexamples: Vec::new(),
        fast_direct_disagreements: Vec::new(),
    };
    for row in rows {
        for (j, &m) in row.in_l.iter().enumerate() {
            report.l_sizes[j] += m as u64;
        }
        report.k_size += row.in_k as u64;
        let in_all = row.in_l.iter().all(|&m| m);
        report.intersection_size += in_all as u64;
        if in_all && !row.in_k {
            report.counterexamples.push(Perm::from_images(row.c.clone())?);
        }
        if row.disagree {
            report.fast_direct_disagreements.push(Perm::from_images(row.c)?);
        }
    }
    Ok(report)
}

/// Sampled search for a `b` showing `c ∉ K_n^δ`, for degrees beyond
/// exhaustive enumeration.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KRefutation {
    #[serde(with = "rational::as_str")]
    pub delta: Rational,
    pub trials: u64,
    pub seed: u64,
    /// How many candidates of each family were tried, in [`B_FAMILIES`] order.
    pub by_family: Vec<u64>,
    pub witness: Option<Perm>,
    /// Sampled `b` with both commutator distances below `δ`, all of which had
    /// `d_H(b,1) ≤ 22δ` unless `witness` is set.
    pub near_commuting_seen: u64,
}

impl KRefutation {
    pub fn refuted(&self) -> bool {
        self.witness.is_some()
    }
}

/// Families the sampled refuter draws `b` from, by trial index modulo 6.
pub const B_FAMILIES: [&str; 6] = [
    "uniform",
    "power-of-cycle",
    "near-power-of-cycle",
    "small-support",
    "interval-swap",
    "power-of-candidate",
];

/// Candidate `b` number `i` of the sampled K refuter.
pub fn sample_b<R: Rng + ?Sized>(i: u64, a: &Perm, c: &Perm, rng: &mut R) -> Perm {
    let n = a.degree();
    match i % 6 {
        0 => Perm::random(n, rng),
        1 => a.pow(rng.gen_range(1..n.max(2)) as i64),
        2 => {
            let base = a.pow(rng.gen_range(0..n) as i64);
            let (x, y) = (rng.gen_range(0..n), rng.gen_range(0..n));
            Perm::transposition(n, x, y).expect("in range").compose(&base).expect("same degree")
        }
        3 => {
            let size = rng.gen_range(2..=n.min(6).max(2)).min(n);
            let mut pts: Vec<usize> = (0..n).collect();
            pts.shuffle(rng);
            let support = &pts[..size];
            let mut images: Vec<usize> = (0..n).collect();
            for (k, &x) in support.iter().enumerate() {
                images[x] = support[(k + 1) % size];
            }
            Perm::from_images(images).expect("cyclic shift of a support")
        }
        4 if n >= 2 => {
            let len = rng.gen_range(1..=n / 2);
            let lo = rng.gen_range(0..=n - 2 * len);
            let mut images: Vec<usize> = (0..n).collect();
            for t in 0..len {
                images.swap(lo + t, lo + len + t);
            }
            Perm::from_images(images).expect("swap of disjoint intervals")
        }
        4 => Perm::identity(n),
        _ => c.pow(rng.gen_range(1..=n as i64)),
    }
}

pub fn refute_k_sampled(c: &Perm, delta: &Rational, trials: u64, seed: u64) -> Result<KRefutation> {
    require_positive("delta", delta)?;
    let n = c.degree();
    let a = cycle(n)?;
    let (ai, ci) = (a.images(), c.images());
    struct Probe {
        family: usize,
        near: bool,
        b: Option<Perm>,
    }
    let probes: Vec<Probe> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng::stream(seed, i);
            let b = sample_b(i, &a, c, &mut rng);
            let bi = b.images();
            let violates = k_violates(ai, ci, bi, delta);
            let near = frac_lt(commutator_count(ai, bi), n, delta) && frac_lt(commutator_count(ci, bi), n, delta);
            Probe { family: (i % 6) as usize, near, b: violates.then_some(b) }
        })
        .collect();
    let mut by_family = vec![0u64; B_FAMILIES.len()];
    let mut near = 0;
    for p in &probes {
        by_family[p.family] += 1;
        near += p.near as u64;
    }
    Ok(KRefutation {
        delta: *delta,
        trials,
        seed,
        by_family,
        witness: probes.into_iter().find_map(|p| p.b),
        near_commuting_seen: near,
    })
}

/// Re-derives a K refutation record from its seed.
pub fn verify_k_refutation(c: &Perm, record: &KRefutation) -> Result<bool> {
    let again = refute_k_sampled(c, &record.delta, record.trials, record.seed)?;
    let witness_ok = match &record.witness {
        Some(b) => {
            let a = cycle(c.degree())?;
            k_violates(a.images(), c.images(), b.images(), &record.delta)
        }
        None => true,
    };
    Ok(witness_ok && again == *record)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn r(p: i64, q: i64) -> Rational {
        Rational::new(p, q)
    }

    fn lim() -> Limits {
        Limits::default()
    }

    /// Oracle for a count: plain loop over `LexPerms` with the textbook distances.
    fn brute_count(n: usize, mut pred: impl FnMut(&Perm) -> bool) -> u64 {
        LexPerms::new(n).filter(|p| pred(p)).count() as u64
    }

    #[test]
    fn hamming_ball_pinned_values() {
        let x = Perm::identity(4);
        let rep = count_hamming_ball(&x, &r(3, 10), &lim()).unwrap();
        assert_eq!((rep.count, rep.bound.exact.as_deref(), rep.satisfied), (1, Some("4"), Satisfied::Strict));
        let rep = count_hamming_ball(&x, &r(6, 10), &lim()).unwrap();
        assert_eq!((rep.count, rep.bound.exact.as_deref(), rep.satisfied), (7, Some("16"), Satisfied::Strict));
    }

    #[test]
    fn hamming_ball_is_translation_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 2..=6 {
            let base = count_hamming_ball(&Perm::identity(n), &r(1, 2), &lim()).unwrap().count;
            let x = Perm::random(n, &mut rng);
            assert_eq!(count_hamming_ball(&x, &r(1, 2), &lim()).unwrap().count, base);
            let oracle = brute_count(n, |y| crate::perm::hamming(&x, y).unwrap().lt(&r(1, 2)));
            assert_eq!(base, oracle);
            // nothing sits at distance exactly 1/n
            assert_eq!(count_hamming_ball(&x, &r(2, n as i64), &lim()).unwrap().count, 1);
        }
    }

    #[test]
    fn cycle_commuting_pinned_values() {
        let rep = count_cycle_commuting(4, &r(3, 10), &lim()).unwrap();
        assert_eq!((rep.count, rep.bound.exact.as_deref(), rep.satisfied), (4, Some("16"), Satisfied::Strict));
        // n^{⌊5·1/5⌋+1} = 25
        let rep = count_cycle_commuting(5, &r(1, 5), &lim()).unwrap();
        assert_eq!((rep.count, rep.bound.exact.as_deref(), rep.satisfied), (5, Some("25"), Satisfied::Strict));
        // below 1/n the bound drops to n itself and the centralizer meets it
        let rep = count_cycle_commuting(5, &r(1, 10), &lim()).unwrap();
        assert_eq!((rep.count, rep.bound.exact.as_deref(), rep.satisfied), (5, Some("5"), Satisfied::Equal));
        let rep = count_cycle_commuting(5, &r(0, 1), &lim()).unwrap();
        assert_eq!((rep.count, rep.satisfied), (0, Satisfied::Strict));
    }

    #[test]
    fn cycle_commuting_matches_oracle() {
        for n in 2..=6 {
            let a = cycle(n).unwrap();
            for eps in [r(1, 3), r(1, 2), r(3, 4)] {
                let oracle = brute_count(n, |y| {
                    crate::perm::hamming(&a.compose(y).unwrap(), &y.compose(&a).unwrap()).unwrap().lt(&eps)
                });
                assert_eq!(count_cycle_commuting(n, &eps, &lim()).unwrap().count, oracle);
            }
        }
    }

    #[test]
    fn near_commuting_examples() {
        let rep = count_near_commuting(&Perm::identity(5), &r(1, 10), &lim()).unwrap();
        assert_eq!(rep.hypothesis, Some(false));
        assert_eq!(rep.count, 120);
        assert_eq!(rep.satisfied, Satisfied::AsymptoticRegimeOnly);

        let rep = count_near_commuting(&cycle(6).unwrap(), &r(1, 12), &lim()).unwrap();
        assert_eq!(rep.count, 6);
        assert_eq!(rep.hypothesis, Some(true));
        // 4nδ = 2: bound 720/36 = 20
        assert_eq!(rep.bound.exact.as_deref(), Some("20"));
        assert_eq!(rep.comparison, Satisfied::Strict);
    }

    #[test]
    fn rational_exponent_comparison_is_exact() {
        // 5!/5^{1/2} ≈ 53.67
        assert_eq!(compare_factorial_over_power(53, 5, &r(1, 2)), Ordering::Less);
        assert_eq!(compare_factorial_over_power(54, 5, &r(1, 2)), Ordering::Greater);
        // 4!/4^{1/2} = 12 exactly
        assert_eq!(compare_factorial_over_power(12, 4, &r(1, 2)), Ordering::Equal);
        // (1 - 4^{-1/2})·24 = 12
        assert_eq!(compare_near_total(12, 4, &r(1, 2)), Ordering::Equal);
        assert_eq!(compare_near_total(11, 4, &r(1, 2)), Ordering::Less);
        assert_eq!(compare_near_total(13, 4, &r(1, 2)), Ordering::Greater);
        assert_eq!(compare_near_total(24, 4, &r(1, 2)), Ordering::Greater);
    }

    #[test]
    fn near_commuting_is_conjugation_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let b = Perm::random(6, &mut rng);
        let q = Perm::random(6, &mut rng);
        let x = count_near_commuting(&b, &r(1, 3), &lim()).unwrap();
        let y = count_near_commuting(&b.conjugate_by(&q).unwrap(), &r(1, 3), &lim()).unwrap();
        assert_eq!(x.count, y.count);
    }

    #[test]
    fn over_limit_errors() {
        assert!(matches!(count_cycle_commuting(10, &r(1, 2), &lim()), Err(Error::OverLimit { .. })));
        assert!(matches!(count_s_ball(&Perm::identity(6), &r(1, 2), &lim()), Err(Error::OverLimit { .. })));
        assert!(matches!(in_k(&Perm::identity(8), &r(1, 100), &lim()), Err(Error::OverLimit { .. })));
    }

    #[test]
    fn s_ball_examples() {
        let cert = count_s_ball(&Perm::identity(4), &r(0, 1), &lim()).unwrap();
        assert_eq!(cert.report.count, 0);
        let cert = count_s_ball(&Perm::identity(4), &r(3, 10), &lim()).unwrap();
        assert_eq!(cert.report.bound.exact.as_deref(), Some("64"));
        assert_eq!(cert.report.satisfied, Satisfied::Strict);
        assert!(verify_s_ball(&cert).unwrap());

        let a = cycle(5).unwrap();
        let cert = count_s_ball(&a.pow(2), &r(1, 5), &lim()).unwrap();
        assert_eq!(cert.report.bound.exact.as_deref(), Some("125"));
        assert!(verify_s_ball(&cert).unwrap());
        // oracle: exact d_S per c
        let t = GenTuple::new(vec![a.clone(), a.pow(2)]).unwrap();
        let oracle = brute_count(5, |c| {
            let u = GenTuple::new(vec![a.clone(), c.clone()]).unwrap();
            conjugacy::exact(&t, &u, 8).unwrap().value.lt(&r(1, 5))
        });
        assert_eq!(cert.report.count, oracle);

        let mut tampered = cert.clone();
        tampered.members.pop();
        tampered.report.count -= 1;
        assert!(!verify_s_ball(&tampered).unwrap());
    }

    #[test]
    fn s_distance_modes() {
        let a = cycle(4).unwrap();
        let x = GenTuple::new(vec![a.clone(), Perm::identity(4)]).unwrap();
        let y = GenTuple::new(vec![a.clone(), a.pow(2)]).unwrap();
        let e = s_distance(&x, &y, SearchMode::Exact, 0, &lim()).unwrap();
        let h = s_distance(&x, &y, SearchMode::Heuristic, 0, &lim()).unwrap();
        assert!(e.value.numer() > 0);
        assert_eq!(e.value, h.value);
        let t = GenTuple::single(a);
        assert_eq!(s_distance(&t, &t, SearchMode::Exact, 0, &lim()).unwrap().witness, Perm::identity(4));
    }

    #[test]
    fn l_and_k_examples() {
        let n = 5;
        // vacuous thresholds
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let c = Perm::random(n, &mut rng);
        assert!(in_l(&c, &r(1, 11), &lim()).unwrap().member);
        assert!(in_k(&c, &r(1, 22), &lim()).unwrap().member);
        assert!(in_k_direct(&c, &r(1, 22), &lim()).unwrap().member);
        // c = id: a itself commutes with both
        let id = Perm::identity(n);
        let l = in_l(&id, &r(1, 100), &lim()).unwrap();
        assert!(!l.member);
        let k = in_k(&id, &r(1, 100), &lim()).unwrap();
        assert!(!k.member);
        let kd = in_k_direct(&id, &r(1, 100), &lim()).unwrap();
        assert!(!kd.member);
        let a = cycle(n).unwrap();
        assert_eq!(k.witness, Some(a.clone()));
        assert_eq!(kd.witness, Some(a.clone()));
        assert_eq!(l.witness, Some(a));
    }

    #[test]
    fn l_matches_definition_and_is_monotone() {
        let n = 5;
        let a = cycle(n).unwrap();
        let delta = r(1, 12);
        let cond = LCondition::new(n, &delta, &lim()).unwrap();
        let wider = LCondition::new(n, &r(1, 6), &lim()).unwrap();
        for c in LexPerms::new(n) {
            let direct = LexPerms::new(n).any(|b| {
                crate::perm::hamming(&b, &Perm::identity(n)).unwrap().gt(&(delta * Rational::from_integer(11)))
                    && crate::perm::hamming(&a.compose(&b).unwrap(), &b.compose(&a).unwrap()).unwrap().lt(&delta)
                    && crate::perm::hamming(&c.compose(&b).unwrap(), &b.compose(&c).unwrap()).unwrap().lt(&delta)
            });
            let m = cond.check(&c).unwrap();
            assert_eq!(m.member, !direct);
            if m.member {
                assert!(wider.check(&c).unwrap().member);
            }
        }
    }

    #[test]
    fn k_inclusion_at_degree_five() {
        let rep = check_k_inclusion(5, &r(1, 44), &lim()).unwrap();
        assert_eq!(rep.levels, 4);
        assert!(rep.holds(), "{rep:?}");
        assert!(rep.k_size >= rep.intersection_size);
    }

    #[test]
    fn doubling_levels_values() {
        assert_eq!(doubling_levels(&r(1, 44)), 4);
        assert_eq!(doubling_levels(&r(1, 3)), 0);
        assert_eq!(doubling_levels(&r(1, 4)), 1);
        assert_eq!(doubling_levels(&r(1, 5)), 1);
    }

    #[test]
    fn t_membership_examples() {
        let d = in_t(&Perm::identity(8), &r(1, 3), 1 << 20).unwrap();
        assert!(!d.member);
        assert!(!d.freeness_ok);
        let d = in_t(&Perm::reversal(8), &r(1, 3), 1 << 20).unwrap();
        assert_eq!(d.coxeter, Dist::new(1, 1));
        assert!(!d.coxeter_ok);
        assert!(!d.member);
        assert_eq!(d.radius, 3);
    }

    #[test]
    fn set_counts_produce_reports() {
        let rep = count_l_set(5, &r(1, 22), &lim()).unwrap();
        assert_eq!(rep.prop, Prop::LSet);
        assert!(rep.count <= 120);
        let rep = count_k_set(5, &r(1, 44), &lim()).unwrap();
        assert!(rep.count <= 120);
        let rep = count_t_set(6, &r(1, 2), &lim()).unwrap();
        assert_eq!(rep.bound.side, Side::Lower);
    }

    #[test]
    fn sampled_k_refuter_finds_structured_violations() {
        // c = id commutes with a; b = a violates for small δ
        let rec = refute_k_sampled(&Perm::identity(30), &r(1, 100), 60, 5).unwrap();
        assert!(rec.refuted());
        assert!(verify_k_refutation(&Perm::identity(30), &rec).unwrap());
        // δ = 1/3 makes the condition vacuous
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let c = Perm::random(30, &mut rng);
        let rec = refute_k_sampled(&c, &r(1, 3), 600, 5).unwrap();
        assert!(!rec.refuted());
        assert_eq!(rec.by_family.iter().sum::<u64>(), 600);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn sampled_b_are_permutations(seed: u64, n in 2usize..40, i in 0u64..12) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let c = Perm::random(n, &mut rng);
            let b = sample_b(i, &cycle(n).unwrap(), &c, &mut rng);
            prop_assert_eq!(b.degree(), n);
        }

        #[test]
        fn k_fast_path_agrees_with_definition(seed: u64, n in 3usize..6, q in 10i64..60) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let c = Perm::random(n, &mut rng);
            let delta = r(1, q);
            prop_assert_eq!(
                in_k(&c, &delta, &lim()).unwrap().member,
                in_k_direct(&c, &delta, &lim()).unwrap().member
            );
        }
    }
}
