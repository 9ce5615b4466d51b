//! λ-expander verification.
//!
//! A tuple `(p_1, .., p_k)` is a λ-expander when every subset `S` with
//! `0 < |S| ≤ n/2` satisfies `λ·|S|/n < Σ_i |S Δ p_i(S)|/n`. The exact checker
//! enumerates all such subsets (Gray-code order, incremental images); the
//! sampled checker can only refute.

use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::perm::{cycle, freeness, Freeness, GenTuple, Perm, Subset};
use crate::rational::{self, require_nonnegative, Dist, Rational};
use crate::rng;

/// The expansion constant used unless configured otherwise.
pub fn default_lambda() -> Rational {
    Rational::new(1, 10)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    ExactPass,
    Refuted,
    SampledNoRefutation,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpansionCertificate {
    #[serde(with = "rational::as_str")]
    pub lambda: Rational,
    pub verdict: Verdict,
    /// A violating subset; present exactly when the verdict is `REFUTED`.
    pub witness: Option<Subset>,
    /// Smallest `boundary_sum / trace` seen: over all subsets for an exact
    /// check, over visited subsets for a sampled one.
    #[serde(with = "rational::opt_str")]
    pub min_ratio: Option<Rational>,
    /// Subsets examined (exact) or descent trials run (sampled).
    pub trials: u64,
    pub seed: u64,
}

impl ExpansionCertificate {
    pub fn is_exact_pass(&self) -> bool {
        self.verdict == Verdict::ExactPass
    }
}

/// `Σ_i d_H(e, p_i e p_i*) = Σ_i |S Δ p_i(S)| / n`.
pub fn boundary_sum(t: &GenTuple, s: &Subset) -> Result<Dist> {
    Error::mismatch(t.degree(), s.degree())?;
    let mut total = 0u64;
    for p in t.perms() {
        total += s.boundary_count(p)? as u64;
    }
    Ok(Dist::new(total, t.degree() as u64))
}

/// True when `S` violates the defining inequality: `S` is nonempty, has trace
/// at most 1/2, and `λ·Tr(S) ≥ boundary_sum(S)`.
pub fn violates(t: &GenTuple, lambda: &Rational, s: &Subset) -> Result<bool> {
    let size = s.len();
    if size == 0 || 2 * size > s.degree() {
        return Ok(false);
    }
    let b = boundary_sum(t, s)?.numer();
    Ok(!lambda_below(lambda, size as u64, b))
}

/// `λ·size < boundary` in exact integer arithmetic.
#[inline]
fn lambda_below(lambda: &Rational, size: u64, boundary: u64) -> bool {
    (*lambda.numer() as i128) * (size as i128) < (*lambda.denom() as i128) * (boundary as i128)
}

#[derive(Clone, Copy)]
struct Ratio {
    boundary: u64,
    size: u64,
}

impl Ratio {
    fn less_than(self, other: Ratio) -> bool {
        (self.boundary as u128) * (other.size as u128) < (other.boundary as u128) * (self.size as u128)
    }

    fn to_rational(self) -> Rational {
        Rational::new(self.boundary as i64, self.size as i64)
    }
}

struct ChunkScan {
    first_violation: Option<(u64, u64)>,
    best: Option<Ratio>,
    examined: u64,
}

const GRAY_CHUNK_BITS: u32 = 16;

/// Exhaustive check over all subsets with `0 < |S| ≤ n/2`.
///
/// Returns `EXACT_PASS` with the minimum of `boundary_sum/trace` when the
/// strict inequality always holds, otherwise `REFUTED` with the first violating
/// subset in Gray-code order.
pub fn check_expander_exact(t: &GenTuple, lambda: &Rational, limits: &Limits) -> Result<ExpansionCertificate> {
    require_nonnegative("lambda", lambda)?;
    let n = t.degree();
    let limit = limits.exact_expander.min(63);
    if n > limit {
        return Err(Error::OverLimit { what: "exact expander check", n, limit });
    }
    if n < 2 {
        return Err(Error::InvalidParameter(
            "expansion needs degree at least 2 (no subset has trace in (0, 1/2])".into(),
        ));
    }
    let gens: Vec<Vec<u64>> = t
        .perms()
        .iter()
        .map(|p| p.images().iter().map(|&v| 1u64 << v).collect())
        .collect();
    let total: u64 = 1u64 << n;
    let chunk = 1u64 << GRAY_CHUNK_BITS.min(n as u32);
    let chunks = total / chunk;
    let half = (n / 2) as u64;
    let cutoff = AtomicU64::new(u64::MAX);

    let scans: Vec<ChunkScan> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * chunk;
            let mut scan = ChunkScan { first_violation: None, best: None, examined: 0 };
            if start > cutoff.load(AtomicOrdering::Relaxed) {
                return scan;
            }
            let mut set = start ^ (start >> 1);
            let mut images: Vec<u64> = gens
                .iter()
                .map(|g| {
                    let mut img = 0u64;
                    let mut bits = set;
                    while bits != 0 {
                        let x = bits.trailing_zeros() as usize;
                        img |= g[x];
                        bits &= bits - 1;
                    }
                    img
                })
                .collect();
            for idx in start..start + chunk {
                if idx > start {
                    let x = idx.trailing_zeros() as usize;
                    set ^= 1u64 << x;
                    for (img, g) in images.iter_mut().zip(&gens) {
                        *img ^= g[x];
                    }
                }
                let size = set.count_ones() as u64;
                if size == 0 || size > half {
                    continue;
                }
                scan.examined += 1;
                let boundary: u64 = images.iter().map(|img| (set ^ img).count_ones() as u64).sum();
                let r = Ratio { boundary, size };
                if scan.best.map_or(true, |b| r.less_than(b)) {
                    scan.best = Some(r);
                }
                if !lambda_below(lambda, size, boundary) {
                    scan.first_violation = Some((idx, set));
                    cutoff.fetch_min(idx, AtomicOrdering::Relaxed);
                    break;
                }
            }
            scan
        })
        .collect();

    let examined = scans.iter().map(|s| s.examined).sum();
    if let Some((_, set)) = scans.iter().filter_map(|s| s.first_violation).min_by_key(|&(idx, _)| idx) {
        let witness = Subset::from_bits(n, set);
        let ratio = Ratio { boundary: boundary_sum(t, &witness)?.numer(), size: witness.len() as u64 };
        return Ok(ExpansionCertificate {
            lambda: *lambda,
            verdict: Verdict::Refuted,
            witness: Some(witness),
            min_ratio: Some(ratio.to_rational()),
            trials: examined,
            seed: 0,
        });
    }
    let best = scans
        .iter()
        .filter_map(|s| s.best)
        .reduce(|a, b| if b.less_than(a) { b } else { a })
        .expect("n >= 2 leaves at least one subset");
    Ok(ExpansionCertificate {
        lambda: *lambda,
        verdict: Verdict::ExactPass,
        witness: None,
        min_ratio: Some(best.to_rational()),
        trials: examined,
        seed: 0,
    })
}

/// Incremental state for local descent on `boundary / size`.
struct Descent<'a> {
    gens: &'a [Perm],
    inverses: &'a [Perm],
    member: Vec<bool>,
    size: usize,
    boundary: u64,
}

impl<'a> Descent<'a> {
    fn new(gens: &'a [Perm], inverses: &'a [Perm], member: Vec<bool>) -> Descent<'a> {
        let size = member.iter().filter(|&&b| b).count();
        let s = Subset::from_mask(member.clone());
        let boundary = gens.iter().map(|p| s.boundary_count(p).unwrap() as u64).sum();
        Descent { gens, inverses, member, size, boundary }
    }

    /// Change in total boundary if membership of `x` flips.
    fn toggle_delta(&self, x: usize) -> i64 {
        let inx = self.member[x];
        let mut delta = 0i64;
        for (p, pinv) in self.gens.iter().zip(self.inverses) {
            let px = p.image(x);
            if px == x {
                continue;
            }
            // term at x: [x ∈ S] xor [p⁻¹(x) ∈ S]; term at p(x): [p(x) ∈ S] xor [x ∈ S]
            let t1 = inx != self.member[pinv.image(x)];
            let t2 = self.member[px] != inx;
            delta += if t1 { -1 } else { 1 };
            delta += if t2 { -1 } else { 1 };
        }
        delta
    }

    fn toggle(&mut self, x: usize, delta: i64) {
        self.member[x] = !self.member[x];
        if self.member[x] {
            self.size += 1;
        } else {
            self.size -= 1;
        }
        self.boundary = (self.boundary as i64 + delta) as u64;
    }

    fn ratio(&self) -> Ratio {
        Ratio { boundary: self.boundary, size: self.size as u64 }
    }
}

struct TrialOutcome {
    violation: Option<Vec<bool>>,
    best: Option<Ratio>,
}

fn structured_starts(t: &GenTuple) -> Vec<Vec<bool>> {
    let n = t.degree();
    let half = n / 2;
    let mut starts = Vec::new();
    if half == 0 {
        return starts;
    }
    for p in t.perms() {
        let mut mask = vec![false; n];
        for &x in p.cycles().iter().flatten().take(half) {
            mask[x] = true;
        }
        starts.push(mask);
    }
    let orbits = crate::convexity::orbit_subsets(t);
    if let Some(small) = orbits.iter().filter(|o| o.len() <= half).min_by_key(|o| o.len()) {
        starts.push(small.mask().to_vec());
    }
    starts
}

fn run_trial(t: &GenTuple, inverses: &[Perm], lambda: &Rational, start: Vec<bool>) -> TrialOutcome {
    let n = t.degree();
    let half = n / 2;
    let mut d = Descent::new(t.perms(), inverses, start);
    let mut best: Option<Ratio> = None;
    let max_steps = 4 * n + 8;
    for _ in 0..=max_steps {
        if d.size >= 1 && d.size <= half {
            let r = d.ratio();
            if best.map_or(true, |b| r.less_than(b)) {
                best = Some(r);
            }
            if !lambda_below(lambda, d.size as u64, d.boundary) {
                return TrialOutcome { violation: Some(d.member.clone()), best };
            }
        }
        // steepest single-element move that stays within sizes 1..=n/2
        let mut choice: Option<(usize, i64, Ratio)> = None;
        for x in 0..n {
            let new_size = if d.member[x] { d.size - 1 } else { d.size + 1 };
            if new_size == 0 || new_size > half {
                continue;
            }
            let delta = d.toggle_delta(x);
            let r = Ratio { boundary: (d.boundary as i64 + delta) as u64, size: new_size as u64 };
            if choice.map_or(true, |(_, _, c)| r.less_than(c)) {
                choice = Some((x, delta, r));
            }
        }
        match choice {
            Some((x, delta, r)) if d.size == 0 || d.size > half || r.less_than(d.ratio()) => d.toggle(x, delta),
            _ => break,
        }
    }
    TrialOutcome { violation: None, best }
}

/// One-sided check for large degree: structured starting sets (arcs along
/// each generator's cycles, the smallest orbit) followed by uniformly random
/// ones, each improved by steepest single-element descent on
/// `boundary/size`. Any violation found is returned as a `REFUTED` witness.
pub fn refute_expander_sampled(t: &GenTuple, lambda: &Rational, trials: u64, seed: u64) -> Result<ExpansionCertificate> {
    require_nonnegative("lambda", lambda)?;
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    let n = t.degree();
    if n < 2 {
        return Err(Error::InvalidParameter("expansion needs degree at least 2".into()));
    }
    let inverses: Vec<Perm> = t.perms().iter().map(Perm::inverse).collect();
    let structured = structured_starts(t);
    let half = n / 2;

    let outcomes: Vec<TrialOutcome> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let start = match structured.get(i as usize) {
                Some(s) => s.clone(),
                None => {
                    let mut rng = rng::stream(seed, i);
                    let size = rng.gen_range(1..=half);
                    let mut pts: Vec<usize> = (0..n).collect();
                    pts.shuffle(&mut rng);
                    let mut mask = vec![false; n];
                    for &x in &pts[..size] {
                        mask[x] = true;
                    }
                    mask
                }
            };
            run_trial(t, &inverses, lambda, start)
        })
        .collect();

    let best = outcomes
        .iter()
        .filter_map(|o| o.best)
        .reduce(|a, b| if b.less_than(a) { b } else { a });
    if let Some(mask) = outcomes.iter().find_map(|o| o.violation.clone()) {
        let witness = Subset::from_mask(mask);
        let ratio = Ratio { boundary: boundary_sum(t, &witness)?.numer(), size: witness.len() as u64 };
        return Ok(ExpansionCertificate {
            lambda: *lambda,
            verdict: Verdict::Refuted,
            witness: Some(witness),
            min_ratio: Some(ratio.to_rational()),
            trials,
            seed,
        });
    }
    Ok(ExpansionCertificate {
        lambda: *lambda,
        verdict: Verdict::SampledNoRefutation,
        witness: None,
        min_ratio: best.map(Ratio::to_rational),
        trials,
        seed,
    })
}

/// Exact when `n` is within [`Limits::exact_expander`], sampled otherwise.
pub fn check_expander(t: &GenTuple, lambda: &Rational, seed: u64, limits: &Limits) -> Result<ExpansionCertificate> {
    if t.degree() <= limits.exact_expander {
        check_expander_exact(t, lambda, limits)
    } else {
        refute_expander_sampled(t, lambda, limits.sampled_trials as u64, seed)
    }
}

/// Re-checks a certificate against `t` from its own data: a `REFUTED` witness
/// must violate the inequality; an `EXACT_PASS` is re-run exhaustively.
pub fn revalidate(t: &GenTuple, cert: &ExpansionCertificate, limits: &Limits) -> Result<bool> {
    match cert.verdict {
        Verdict::Refuted => match &cert.witness {
            Some(w) => violates(t, &cert.lambda, w),
            None => Ok(false),
        },
        Verdict::ExactPass => {
            let again = check_expander_exact(t, &cert.lambda, limits)?;
            Ok(again.verdict == Verdict::ExactPass
                && again.min_ratio == cert.min_ratio
                && cert.min_ratio.map_or(false, |m| m > cert.lambda))
        }
        Verdict::SampledNoRefutation => Ok(cert.witness.is_none()),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpanderPair {
    pub tuple: GenTuple,
    pub certificate: ExpansionCertificate,
    pub freeness: Freeness,
    /// 1-based index of the successful draw.
    pub tries: usize,
}

/// Draws `c` uniformly until `(a_n, c)` is a λ-expander (exact check when the
/// degree allows, sampled otherwise) with freeness defect below 1/2 on the
/// ball of the given radius.
pub fn sample_expander_pair(
    n: usize,
    lambda: &Rational,
    radius: usize,
    max_tries: usize,
    seed: u64,
    limits: &Limits,
) -> Result<ExpanderPair> {
    if n < 2 {
        return Err(Error::InvalidParameter("expander pairs need n >= 2".into()));
    }
    let a = cycle(n)?;
    let half = Rational::new(1, 2);
    for i in 0..max_tries {
        let mut rng = rng::stream(seed, i as u64);
        let c = Perm::random(n, &mut rng);
        let t = GenTuple::new(vec![a.clone(), c])?;
        let cert = check_expander(&t, lambda, rng::derive_seed(seed, i as u64), limits)?;
        if cert.verdict == Verdict::Refuted {
            continue;
        }
        let free = freeness(&t, radius, limits.word_budget)?;
        if free.defect.lt(&half) {
            return Ok(ExpanderPair { tuple: t, certificate: cert, freeness: free, tries: i + 1 });
        }
    }
    Err(Error::TriesExhausted { what: "expander pair sampling", tries: max_tries })
}

/// Empirical counts for trend tables.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RateReport {
    pub n: usize,
    pub trials: u64,
    pub successes: u64,
}

impl RateReport {
    pub fn fraction(&self) -> f64 {
        self.successes as f64 / self.trials as f64
    }
}

/// How many uniformly random `c` make `(a_n, c)` pass [`check_expander`].
pub fn expander_rate(n: usize, lambda: &Rational, trials: u64, seed: u64, limits: &Limits) -> Result<RateReport> {
    let a = cycle(n)?;
    let passes: Vec<bool> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng::stream(seed, i);
            let t = GenTuple::new(vec![a.clone(), Perm::random(n, &mut rng)])?;
            Ok(check_expander(&t, lambda, rng::derive_seed(seed, i), limits)?.verdict != Verdict::Refuted)
        })
        .collect::<Result<_>>()?;
    Ok(RateReport { n, trials, successes: passes.iter().filter(|&&b| b).count() as u64 })
}

/// How many uniformly random `c` give `(a_n, c)` a freeness defect below `threshold`.
pub fn freeness_rate(
    n: usize,
    radius: usize,
    threshold: &Rational,
    trials: u64,
    seed: u64,
    limits: &Limits,
) -> Result<RateReport> {
    let a = cycle(n)?;
    let passes: Vec<bool> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng::stream(seed, i);
            let t = GenTuple::new(vec![a.clone(), Perm::random(n, &mut rng)])?;
            Ok(freeness(&t, radius, limits.word_budget)?.defect.lt(threshold))
        })
        .collect::<Result<_>>()?;
    Ok(RateReport { n, trials, successes: passes.iter().filter(|&&b| b).count() as u64 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::{direct_sum, LexPerms};
    use proptest::prelude::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn lam() -> Rational {
        default_lambda()
    }

    /// Independent oracle: every subset via plain bitmask loop, boundary by definition.
    fn brute_min_ratio(t: &GenTuple) -> (Rational, Vec<Subset>) {
        let n = t.degree();
        let mut best: Option<Rational> = None;
        let mut all = Vec::new();
        for bits in 1u64..(1 << n) {
            let s = Subset::from_bits(n, bits);
            if 2 * s.len() > n {
                continue;
            }
            let mut b = 0;
            for p in t.perms() {
                let img = s.image_under(p).unwrap();
                b += (0..n).filter(|&i| s.contains(i) != img.contains(i)).count();
            }
            let r = Rational::new(b as i64, s.len() as i64);
            if best.map_or(true, |x| r < x) {
                best = Some(r);
            }
            all.push(s);
        }
        (best.unwrap(), all)
    }

    #[test]
    fn boundary_sum_examples() {
        let a8 = GenTuple::single(cycle(8).unwrap());
        assert_eq!(boundary_sum(&a8, &Subset::full(8)).unwrap(), Dist::zero(8));
        let s = Subset::range(8, 0, 4).unwrap();
        assert_eq!(boundary_sum(&a8, &s).unwrap(), Dist::new(2, 8));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = Perm::random(10, &mut rng);
        let s = Subset::from_members(10, [0, 3, 4, 9]).unwrap();
        let single = boundary_sum(&GenTuple::single(p.clone()), &s).unwrap();
        let double = boundary_sum(&GenTuple::new(vec![p.clone(), p]).unwrap(), &s).unwrap();
        assert_eq!(double.numer(), 2 * single.numer());
    }

    #[test]
    fn single_cycle_of_length_8_is_an_expander() {
        let t = GenTuple::single(cycle(8).unwrap());
        let cert = check_expander_exact(&t, &lam(), &Limits::default()).unwrap();
        assert_eq!(cert.verdict, Verdict::ExactPass);
        // best set is a contiguous half: boundary 2 over 4 points
        assert_eq!(cert.min_ratio, Some(Rational::new(1, 2)));
        assert_eq!(cert.min_ratio, Some(brute_min_ratio(&t).0));
        assert!(revalidate(&t, &cert, &Limits::default()).unwrap());
    }

    #[test]
    fn identity_tuple_is_refuted() {
        let id = Perm::identity(6);
        let t = GenTuple::new(vec![id.clone(), id]).unwrap();
        let cert = check_expander_exact(&t, &Rational::new(1, 1000), &Limits::default()).unwrap();
        assert_eq!(cert.verdict, Verdict::Refuted);
        assert!(violates(&t, &cert.lambda, cert.witness.as_ref().unwrap()).unwrap());
        let sampled = refute_expander_sampled(&GenTuple::single(Perm::identity(30)), &lam(), 3, 1).unwrap();
        assert_eq!(sampled.verdict, Verdict::Refuted);
    }

    #[test]
    fn lambda_zero_detects_connectivity() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let t = GenTuple::random(9, 2, &mut rng);
            let connected = crate::convexity::orbit_subsets(&t).len() == 1;
            let cert = check_expander_exact(&t, &Rational::from_integer(0), &Limits::default()).unwrap();
            assert_eq!(cert.verdict == Verdict::ExactPass, connected);
        }
        let split = GenTuple::single(direct_sum(&cycle(4).unwrap(), &cycle(5).unwrap()));
        let cert = check_expander_exact(&split, &Rational::from_integer(0), &Limits::default()).unwrap();
        assert_eq!(cert.verdict, Verdict::Refuted);
    }

    #[test]
    fn exact_matches_brute_force_on_all_pairs_at_degree_5() {
        let a = cycle(5).unwrap();
        for c in LexPerms::new(5) {
            let t = GenTuple::new(vec![a.clone(), c]).unwrap();
            let (min, _) = brute_min_ratio(&t);
            for lambda in [Rational::new(1, 10), Rational::new(1, 2), Rational::new(1, 1), Rational::new(2, 1)] {
                let cert = check_expander_exact(&t, &lambda, &Limits::default()).unwrap();
                assert_eq!(cert.verdict == Verdict::ExactPass, min > lambda, "{t:?} at {lambda}");
                if cert.verdict == Verdict::ExactPass {
                    assert_eq!(cert.min_ratio, Some(min));
                } else {
                    assert!(violates(&t, &lambda, cert.witness.as_ref().unwrap()).unwrap());
                }
            }
        }
    }

    #[test]
    fn over_limit_and_tiny_degree() {
        let t = GenTuple::single(cycle(21).unwrap());
        assert!(matches!(
            check_expander_exact(&t, &lam(), &Limits::default()),
            Err(Error::OverLimit { .. })
        ));
        assert!(check_expander_exact(&GenTuple::single(Perm::identity(1)), &lam(), &Limits::default()).is_err());
    }

    #[test]
    fn long_cycle_is_refuted_by_a_contiguous_half() {
        let t = GenTuple::single(cycle(64).unwrap());
        let cert = refute_expander_sampled(&t, &lam(), 8, 42).unwrap();
        assert_eq!(cert.verdict, Verdict::Refuted);
        let w = cert.witness.unwrap();
        assert_eq!(w, Subset::range(64, 0, 32).unwrap());
        assert_eq!(boundary_sum(&t, &w).unwrap(), Dist::new(2, 64));
    }

    #[test]
    fn descent_delta_matches_recount() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let t = GenTuple::random(15, 3, &mut rng);
        let inverses: Vec<Perm> = t.perms().iter().map(Perm::inverse).collect();
        let mask: Vec<bool> = (0..15).map(|_| rng.gen_bool(0.4)).collect();
        let mut d = Descent::new(t.perms(), &inverses, mask);
        for step in 0..40 {
            let x = (step * 7) % 15;
            let delta = d.toggle_delta(x);
            d.toggle(x, delta);
            let recount = boundary_sum(&t, &Subset::from_mask(d.member.clone())).unwrap();
            assert_eq!(d.boundary, recount.numer());
        }
    }

    #[test]
    fn pair_sampling_small_degrees() {
        let limits = Limits::default();
        let pair = sample_expander_pair(8, &lam(), 2, 20, 1, &limits).unwrap();
        assert_eq!(pair.certificate.verdict, Verdict::ExactPass);
        assert_eq!(pair.tuple.perm(0), &cycle(8).unwrap());
        assert!(pair.tries <= 20);

        // n = 2: c is id or the swap; the word x1 x2^-1 or x2 is trivial, so the
        // freeness filter rejects every draw
        match sample_expander_pair(2, &lam(), 2, 10, 1, &limits) {
            Err(Error::TriesExhausted { tries: 10, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn sampled_never_contradicts_exact(seed: u64, n in 4usize..12, k in 1usize..3) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let t = GenTuple::random(n, k, &mut rng);
            let exact = check_expander_exact(&t, &lam(), &Limits::default()).unwrap();
            let sampled = refute_expander_sampled(&t, &lam(), 16, seed).unwrap();
            if exact.verdict == Verdict::ExactPass {
                prop_assert_eq!(sampled.verdict, Verdict::SampledNoRefutation);
                prop_assert!(sampled.min_ratio.unwrap() >= exact.min_ratio.unwrap());
            }
            if sampled.verdict == Verdict::Refuted {
                prop_assert!(violates(&t, &lam(), sampled.witness.as_ref().unwrap()).unwrap());
            }
        }

        #[test]
        fn verdicts_are_conjugation_invariant_and_monotone(seed: u64, n in 4usize..12) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let t = GenTuple::random(n, 2, &mut rng);
            let q = Perm::random(n, &mut rng);
            let limits = Limits::default();
            let a = check_expander_exact(&t, &lam(), &limits).unwrap();
            let b = check_expander_exact(&t.conjugate_by(&q).unwrap(), &lam(), &limits).unwrap();
            prop_assert_eq!(a.verdict, b.verdict);
            prop_assert_eq!(a.min_ratio, b.min_ratio);
            if a.verdict == Verdict::ExactPass {
                let lower = check_expander_exact(&t, &Rational::new(1, 20), &limits).unwrap();
                prop_assert_eq!(lower.verdict, Verdict::ExactPass);
            }
        }
    }
}
