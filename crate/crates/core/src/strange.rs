//! Builders for two constructions: families of expander pairs `(a_n, c_i)`
//! that are pairwise far in conjugacy distance, and block-diagonal
//! permutations of small Coxeter length with nearly free `(a_n, p)` and an
//! approximately trivial commutant.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::census::{in_t, k_violates, refute_k_sampled, KCondition, KRefutation, Membership, TDiagnostics};
use crate::conjugacy::{self, Conjugacy, SearchMode};
use crate::error::{Error, Result};
use crate::expansion::{check_expander, ExpansionCertificate, Verdict};
use crate::limits::Limits;
use crate::perm::{coxeter, cycle, freeness, GenTuple, Perm};
use crate::rational::{self, require_positive, Dist, Rational};
use crate::rng;

/// Largest number of elements per set: `10^k · t` must fit in `u128` with `t < 1` given to 12 digits.
pub const MAX_SET_ELEMENTS: usize = 26;

/// The truncation `{⌊10^k t⌋ : 1 ≤ k ≤ m}` for `t = digits / 10^12`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlmostDisjointSet {
    /// `t · 10^12`, in `[10^11, 10^12)`.
    pub digits: u64,
    pub elements: Vec<u128>,
}

/// `⌊10^k · p/q⌋` for `k = 1..=m`, exactly.
pub fn decimal_shifts(t: &Rational, m: usize) -> Result<Vec<u128>> {
    if *t.numer() < 0 {
        return Err(Error::InvalidParameter("t must be nonnegative".into()));
    }
    if m > MAX_SET_ELEMENTS {
        return Err(Error::InvalidParameter(format!("at most {MAX_SET_ELEMENTS} elements")));
    }
    let (p, q) = (*t.numer() as u128, *t.denom() as u128);
    let mut out = Vec::with_capacity(m);
    let mut scale = 1u128;
    for _ in 0..m {
        scale *= 10;
        let v = p.checked_mul(scale).ok_or_else(|| Error::InvalidParameter("t too large".into()))? / q;
        out.push(v);
    }
    Ok(out)
}

/// `count` sets with distinct `t` drawn uniformly from `[1/10, 1)` on a grid of
/// step `10^-12`. Two sets share elements only at indices where the decimal
/// expansions of their `t` still agree.
pub fn almost_disjoint_family(count: usize, m: usize, seed: u64) -> Result<Vec<AlmostDisjointSet>> {
    if count == 0 {
        return Err(Error::InvalidParameter("count must be at least 1".into()));
    }
    let mut rng = rng::stream(seed, 0);
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let digits: u64 = rng.gen_range(100_000_000_000..1_000_000_000_000);
        if !seen.insert(digits) {
            continue;
        }
        let elements = decimal_shifts(&Rational::new(digits as i64, 1_000_000_000_000), m)?;
        out.push(AlmostDisjointSet { digits, elements });
    }
    Ok(out)
}

/// `f_F(k) = max{i ∈ F : i ≤ k}`, the exponent schedule a set induces.
pub fn last_member_at_most(set: &[u128], k: u128) -> Option<u128> {
    set.iter().copied().filter(|&i| i <= k).max()
}

/// Conjugacy distance between two members, with how it was obtained.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairEvidence {
    pub i: usize,
    pub j: usize,
    /// Exact minimum (`EXACT`) or an upper bound from annealing (`HEURISTIC`).
    /// Only the exact value proves `d_S > λ`.
    pub distance: Conjugacy,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FarExpanderFamily {
    pub n: usize,
    pub members: Vec<Perm>,
    /// Expansion constant each `(a_n, c_i)` is checked against.
    #[serde(with = "rational::as_str")]
    pub lambda: Rational,
    /// Threshold the pairwise conjugacy distances must exceed.
    #[serde(with = "rational::as_str")]
    pub separation: Rational,
    pub radius: usize,
    /// Freeness defects must be below this (`min(1/k, 1/2)`).
    #[serde(with = "rational::as_str")]
    pub freeness_target: Rational,
    pub pairwise_evidence: Vec<PairEvidence>,
    pub expander_certs: Vec<ExpansionCertificate>,
    pub freeness: Vec<Dist>,
    pub requested: usize,
    pub draws: usize,
    pub seed: u64,
}

impl FarExpanderFamily {
    pub fn is_complete(&self) -> bool {
        self.members.len() == self.requested
    }

    /// True when every pairwise distance is an exact minimum above the separation.
    pub fn separation_certified(&self) -> bool {
        self.pairwise_evidence
            .iter()
            .all(|e| e.distance.mode == SearchMode::Exact && e.distance.value.gt(&self.separation))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyRequest {
    pub n: usize,
    pub k: usize,
    #[serde(with = "rational::as_str")]
    pub lambda: Rational,
    #[serde(with = "rational::as_str")]
    pub separation: Rational,
    pub radius: usize,
    pub seed: u64,
    /// Candidate draws before giving up.
    pub budget: usize,
}

/// Rejection sampling of `c_1, .., c_k`: each `(a_n, c)` must not be refuted as
/// a λ-expander, must have freeness defect below `min(1/k, 1/2)` on the ball
/// of `radius`, and must be farther than `separation` from every accepted
/// member (exact distance when `n ≤ limits.s_distance_exact`, an annealing
/// upper bound otherwise). An exhausted budget returns the partial family.
pub fn pick_far_expanders(req: &FamilyRequest, limits: &Limits) -> Result<FarExpanderFamily> {
    let FamilyRequest { n, k, lambda, separation, radius, seed, budget } = *req;
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    if n < 2 {
        return Err(Error::InvalidParameter("n must be at least 2".into()));
    }
    let a = cycle(n)?;
    let target = Rational::new(1, k as i64).min(Rational::new(1, 2));
    let mut fam = FarExpanderFamily {
        n,
        members: Vec::new(),
        lambda,
        separation,
        radius,
        freeness_target: target,
        pairwise_evidence: Vec::new(),
        expander_certs: Vec::new(),
        freeness: Vec::new(),
        requested: k,
        draws: 0,
        seed,
    };
    let mut accepted: Vec<GenTuple> = Vec::new();
    for draw in 0..budget {
        if accepted.len() == k {
            break;
        }
        fam.draws = draw + 1;
        let mut rng = rng::stream(seed, draw as u64);
        let c = Perm::random(n, &mut rng);
        if fam.members.contains(&c) {
            continue;
        }
        let t = GenTuple::new(vec![a.clone(), c.clone()])?;
        let cert = check_expander(&t, &lambda, rng::derive_seed(seed, draw as u64), limits)?;
        if cert.verdict == Verdict::Refuted {
            continue;
        }
        let free = freeness(&t, radius, limits.word_budget)?;
        if !free.defect.lt(&target) {
            continue;
        }
        let mut evidence = Vec::with_capacity(accepted.len());
        let mut far = true;
        for (i, other) in accepted.iter().enumerate() {
            let d = conjugacy::search(other, &t, limits.anneal_steps, rng::derive_seed(seed, draw as u64 ^ 0x5eed), limits.s_distance_exact)?;
            if !d.value.gt(&separation) {
                far = false;
                break;
            }
            evidence.push(PairEvidence { i, j: accepted.len(), distance: d });
        }
        if !far {
            continue;
        }
        fam.pairwise_evidence.extend(evidence);
        fam.members.push(c);
        fam.expander_certs.push(cert);
        fam.freeness.push(free.defect);
        accepted.push(t);
    }
    Ok(fam)
}

/// Block layout for `T`-candidates: `k = ⌊1/δ⌋` blocks of `m = ⌊n/k⌋` points,
/// the last one absorbing the remainder.
pub fn block_layout(n: usize, delta: &Rational) -> Result<Vec<(usize, usize)>> {
    require_positive("delta", delta)?;
    let k = delta.recip().to_integer().max(1) as usize;
    if n < k {
        return Err(Error::InvalidParameter(format!("n = {n} is below ⌊1/δ⌋ = {k}")));
    }
    let m = n / k;
    Ok((0..k).map(|b| (b * m, if b + 1 == k { n } else { (b + 1) * m })).collect())
}

/// `Σ_b s_b(s_b - 1)/2` inversions at most, over `n(n-1)/2`.
pub fn block_coxeter_bound(blocks: &[(usize, usize)], n: usize) -> Dist {
    let inv: u64 = blocks.iter().map(|&(lo, hi)| ((hi - lo) * (hi - lo).saturating_sub(1) / 2) as u64).sum();
    Dist::new(inv, ((n * n.saturating_sub(1)) / 2).max(1) as u64)
}

/// Every block is mapped into itself.
pub fn is_block_diagonal(p: &Perm, blocks: &[(usize, usize)]) -> bool {
    blocks.iter().all(|&(lo, hi)| (lo..hi).all(|i| (lo..hi).contains(&p.image(i))))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TCandidate {
    pub p: Perm,
    pub blocks: Vec<(usize, usize)>,
    pub diagnostics: TDiagnostics,
    pub coxeter_bound: Dist,
    /// 1-based index of the accepted draw.
    pub tries: usize,
    pub seed: u64,
}

fn block_perm(n: usize, blocks: &[(usize, usize)], seed: u64, attempt: u64) -> Perm {
    let mut rng = rng::stream(seed, attempt);
    let mut images = Vec::with_capacity(n);
    for &(lo, hi) in blocks {
        let q = Perm::random(hi - lo, &mut rng);
        images.extend(q.images().iter().map(|&v| lo + v));
    }
    Perm::from_images(images).expect("blockwise bijection")
}

/// First block-diagonal random permutation that lies in `T_n^δ`.
pub fn build_t_candidate(n: usize, delta: &Rational, seed: u64, tries: usize, limits: &Limits) -> Result<TCandidate> {
    let blocks = block_layout(n, delta)?;
    let bound = block_coxeter_bound(&blocks, n);
    for attempt in 0..tries {
        let p = block_perm(n, &blocks, seed, attempt as u64);
        debug_assert!(coxeter(&p) <= bound);
        let diagnostics = in_t(&p, delta, limits.word_budget)?;
        if diagnostics.member {
            assert!(diagnostics.coxeter <= bound, "block-diagonal inversions exceed the block bound");
            return Ok(TCandidate { p, blocks, diagnostics, coxeter_bound: bound, tries: attempt + 1, seed });
        }
    }
    Err(Error::TriesExhausted { what: "T-candidate search", tries })
}

/// How `p ∈ K_n^δ` was checked.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum KEvidence {
    /// Every `b ∈ P_n` examined.
    Exhaustive { member: bool, witness: Option<Perm> },
    /// Seeded sample of structured and uniform `b`; only a witness is conclusive.
    Sampled(KRefutation),
}

impl KEvidence {
    pub fn violation(&self) -> Option<&Perm> {
        match self {
            KEvidence::Exhaustive { witness, .. } => witness.as_ref(),
            KEvidence::Sampled(r) => r.witness.as_ref(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrangeCandidate {
    pub p: Perm,
    #[serde(with = "rational::as_str")]
    pub delta: Rational,
    pub coxeter: Dist,
    pub coxeter_bound: Dist,
    pub blocks: Vec<(usize, usize)>,
    pub t: TDiagnostics,
    pub k_evidence: KEvidence,
    pub t_tries: usize,
    pub seed: u64,
}

/// A `T`-candidate followed by a `K` check: exhaustive when
/// `n ≤ limits.double_loop`, sampled with `k_trials` draws otherwise.
pub fn build_strange_candidate(
    n: usize,
    delta: &Rational,
    seed: u64,
    t_tries: usize,
    k_trials: u64,
    limits: &Limits,
) -> Result<StrangeCandidate> {
    let cand = build_t_candidate(n, delta, seed, t_tries, limits)?;
    let k_evidence = if n <= limits.double_loop {
        let Membership { member, witness } = KCondition::new(n, delta, limits)?.check(&cand.p)?;
        KEvidence::Exhaustive { member, witness }
    } else {
        KEvidence::Sampled(refute_k_sampled(&cand.p, delta, k_trials, rng::derive_seed(seed, u64::MAX))?)
    };
    Ok(StrangeCandidate {
        coxeter: cand.diagnostics.coxeter,
        coxeter_bound: cand.coxeter_bound,
        p: cand.p,
        delta: *delta,
        blocks: cand.blocks,
        t: cand.diagnostics,
        k_evidence,
        t_tries: cand.tries,
        seed,
    })
}

/// Re-checks every acceptance predicate of a candidate from its own fields.
pub fn verify_strange(c: &StrangeCandidate, limits: &Limits) -> Result<Vec<(&'static str, bool)>> {
    let n = c.p.degree();
    let layout = block_layout(n, &c.delta)?;
    let t = in_t(&c.p, &c.delta, limits.word_budget)?;
    let mut checks = vec![
        ("layout", layout == c.blocks),
        ("block-diagonal", is_block_diagonal(&c.p, &c.blocks)),
        ("coxeter", coxeter(&c.p) == c.coxeter && c.coxeter.lt(&(c.delta * Rational::from_integer(2)))),
        ("coxeter-bound", c.coxeter <= block_coxeter_bound(&c.blocks, n) && c.coxeter_bound == block_coxeter_bound(&c.blocks, n)),
        ("t-membership", t == c.t && t.member),
    ];
    let k_ok = match &c.k_evidence {
        KEvidence::Exhaustive { member, witness } => {
            let again = KCondition::new(n, &c.delta, limits)?.check(&c.p)?;
            again.member == *member && again.witness == *witness
        }
        KEvidence::Sampled(rec) => crate::census::verify_k_refutation(&c.p, rec)?,
    };
    checks.push(("k-evidence", k_ok));
    if let Some(b) = c.k_evidence.violation() {
        let a = cycle(n)?;
        checks.push(("k-witness", k_violates(a.images(), c.p.images(), b.images(), &c.delta)));
    }
    Ok(checks)
}

/// Re-checks a family: expansion verdicts, freeness values, distinctness and
/// every pairwise distance at its recorded witness.
pub fn verify_family(f: &FarExpanderFamily, limits: &Limits) -> Result<Vec<(&'static str, bool)>> {
    let a = cycle(f.n)?;
    let tuples: Vec<GenTuple> = f
        .members
        .iter()
        .map(|c| GenTuple::new(vec![a.clone(), c.clone()]))
        .collect::<Result<_>>()?;
    let mut distinct = true;
    for (i, c) in f.members.iter().enumerate() {
        distinct &= !f.members[..i].contains(c);
    }
    let mut expansion_ok = f.expander_certs.len() == tuples.len();
    for (t, cert) in tuples.iter().zip(&f.expander_certs) {
        expansion_ok &= crate::expansion::revalidate(t, cert, limits)? && cert.verdict != Verdict::Refuted;
    }
    let mut freeness_ok = f.freeness.len() == tuples.len();
    for (t, d) in tuples.iter().zip(&f.freeness) {
        freeness_ok &= freeness(t, f.radius, limits.word_budget)?.defect == *d && d.lt(&f.freeness_target);
    }
    let mut pairs_ok = f.pairwise_evidence.len() == tuples.len() * tuples.len().saturating_sub(1) / 2;
    for e in &f.pairwise_evidence {
        let cost = conjugacy::conjugation_cost(&tuples[e.i], &tuples[e.j], &e.distance.witness)?;
        pairs_ok &= cost == e.distance.value.numer() && e.distance.value.gt(&f.separation);
        if e.distance.mode == SearchMode::Exact {
            pairs_ok &= conjugacy::exact(&tuples[e.i], &tuples[e.j], limits.s_distance_exact)?.value == e.distance.value;
        }
    }
    Ok(vec![
        ("distinct", distinct),
        ("expansion", expansion_ok),
        ("freeness", freeness_ok),
        ("pairwise", pairs_ok),
    ])
}
