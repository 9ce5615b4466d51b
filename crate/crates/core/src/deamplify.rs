//! Extracting a conjugator `v ∈ P_n` from an approximate intertwiner
//! `u ∈ P_{nr}` between amplified tuples.
//!
//! `u` is viewed as an `r × r` matrix of pieces `u(i, j)`. A block row `i`
//! whose pieces nearly intertwine `x` and `y` is selected, then the column `j`
//! whose piece has the largest range; completing that piece gives `v`. When
//! `y` is a λ-expander and `d_H(u(x_t ⊗ 1), (y_t ⊗ 1)u) ≤ ε` for every `t`,
//! the result satisfies `d_H(v x_t, y_t v) < 20k²ε/λ`.

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expansion::{ExpansionCertificate, Verdict};
use crate::perm::{block, complete, hamming, mismatch_count, range_projection, tensor_id, GenTuple, PartialPerm, Perm};
use crate::rational::{self, require_positive, Dist, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Guarantee {
    Certified,
    NoGuarantee,
}

/// Defects of one piece `f = u(i, j)` for one generator `t`, as counts over `n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockDefect {
    pub row: usize,
    pub col: usize,
    pub generator: usize,
    /// Points where `f x_t` and `y_t f` differ.
    pub forward: usize,
    /// Points where `x_t f*` and `f* y_t` differ.
    pub backward: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeamplifyResult {
    pub v: Perm,
    /// Measured `max_t d_H(u(x_t ⊗ 1), (y_t ⊗ 1)u)`.
    pub eps: Dist,
    pub chosen_row: usize,
    pub chosen_col: usize,
    /// Trace of the range of the chosen piece.
    pub tr_pj: Dist,
    /// `max_t d_H(v x_t, y_t v)`.
    pub achieved: Dist,
    /// `20k²ε/λ`.
    #[serde(with = "rational::as_str")]
    pub certified_bound: Rational,
    #[serde(with = "rational::as_str")]
    pub lambda: Rational,
    pub guarantee: Guarantee,
    /// `max_t max(Σ_j forward, Σ_j backward)` on the chosen row, over `n`.
    pub row_score: Dist,
    /// Whether `row_score ≤ 4kε`.
    pub block_sums_ok: bool,
    /// Whether the chosen row's ranges partition `{0, .., n-1}`.
    pub partition_ok: bool,
    pub expander_certified: bool,
    /// Every `(i, j, t)` defect, present only on request.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub block_matrix: Option<Vec<BlockDefect>>,
}

fn block_count(x: &GenTuple, u: &Perm) -> Result<usize> {
    let n = x.degree();
    if u.degree() % n != 0 {
        return Err(Error::NotDivisible { n: u.degree(), by: n });
    }
    Ok(u.degree() / n)
}

/// `max_t d_H(u (x_t ⊗ 1_r), (y_t ⊗ 1_r) u)`.
pub fn intertwiner_defect(x: &GenTuple, y: &GenTuple, u: &Perm) -> Result<Dist> {
    x.check_compatible(y)?;
    let r = block_count(x, u)?;
    let mut worst = 0u64;
    for (xt, yt) in x.perms().iter().zip(y.perms()) {
        let left = u.compose(&tensor_id(xt, r)?)?;
        let right = tensor_id(yt, r)?.compose(u)?;
        worst = worst.max(hamming(&left, &right)?.numer());
    }
    Ok(Dist::new(worst, u.degree() as u64))
}

fn partial_of(p: &Perm) -> PartialPerm {
    PartialPerm::from(p)
}

fn rows_differ(a: &PartialPerm, b: &PartialPerm) -> usize {
    a.images().iter().zip(b.images()).filter(|(p, q)| p != q).count()
}

fn block_defects(x: &GenTuple, y: &GenTuple, u: &Perm, r: usize) -> Result<Vec<BlockDefect>> {
    let n = x.degree();
    let xs: Vec<PartialPerm> = x.perms().iter().map(partial_of).collect();
    let ys: Vec<PartialPerm> = y.perms().iter().map(partial_of).collect();
    let cells: Vec<(usize, usize)> = (0..r).flat_map(|i| (0..r).map(move |j| (i, j))).collect();
    let rows: Vec<Vec<BlockDefect>> = cells
        .par_iter()
        .map(|&(i, j)| {
            let f = block(u, i, j, n, r)?;
            let fstar = f.adjoint();
            let mut out = Vec::with_capacity(xs.len());
            for (t, (xt, yt)) in xs.iter().zip(&ys).enumerate() {
                let forward = rows_differ(&f.compose(xt)?, &yt.compose(&f)?);
                let backward = rows_differ(&xt.compose(&fstar)?, &fstar.compose(yt)?);
                out.push(BlockDefect { row: i, col: j, generator: t, forward, backward });
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    Ok(rows.into_iter().flatten().collect())
}

/// Runs the extraction. `y_cert` must be an expansion certificate for `y`;
/// it is trusted as given, and only its verdict and λ are read.
pub fn deamplify(
    x: &GenTuple,
    y: &GenTuple,
    u: &Perm,
    lambda: &Rational,
    y_cert: Option<&ExpansionCertificate>,
    keep_matrix: bool,
) -> Result<DeamplifyResult> {
    require_positive("lambda", lambda)?;
    x.check_compatible(y)?;
    let n = x.degree();
    let k = x.len();
    let r = block_count(x, u)?;
    let eps = intertwiner_defect(x, y, u)?;
    let defects = block_defects(x, y, u, r)?;

    // row i: worst over t of the two block sums
    let mut fwd = vec![vec![0usize; k]; r];
    let mut bwd = vec![vec![0usize; k]; r];
    for d in &defects {
        fwd[d.row][d.generator] += d.forward;
        bwd[d.row][d.generator] += d.backward;
    }
    let score = |i: usize| (0..k).map(|t| fwd[i][t].max(bwd[i][t])).max().unwrap_or(0);
    let chosen_row = (0..r).min_by_key(|&i| (score(i), i)).expect("r >= 1");
    let row_score = Dist::new(score(chosen_row) as u64, n as u64);

    let pieces: Vec<PartialPerm> = (0..r).map(|j| block(u, chosen_row, j, n, r)).collect::<Result<_>>()?;
    let sizes: Vec<usize> = pieces.iter().map(PartialPerm::defined_count).collect();
    let chosen_col = (0..r).max_by_key(|&j| (sizes[j], std::cmp::Reverse(j))).expect("r >= 1");
    let mut covered = vec![0u8; n];
    for p in &pieces {
        for x in range_projection(p).iter() {
            covered[x] += 1;
        }
    }
    let partition_ok = covered.iter().all(|&c| c == 1);
    let tr_pj = Dist::new(sizes[chosen_col] as u64, n as u64);

    let v = complete(&pieces[chosen_col]);
    let mut achieved = 0u64;
    for (xt, yt) in x.perms().iter().zip(y.perms()) {
        achieved = achieved.max(mismatch_count(v.compose(xt)?.images(), yt.compose(&v)?.images()) as u64);
    }
    let achieved = Dist::new(achieved, n as u64);

    let k2 = Rational::from_integer((k * k) as i64);
    let certified_bound = Rational::from_integer(20) * k2 * eps.to_rational() / lambda;
    let four_k_eps = Rational::from_integer(4 * k as i64) * eps.to_rational();
    let block_sums_ok = row_score.le(&four_k_eps);
    let expander_certified = y_cert.map_or(false, |c| {
        c.verdict == Verdict::ExactPass && c.lambda >= *lambda && c.min_ratio.map_or(false, |m| m > *lambda)
    });
    let half = Rational::new(1, 2);
    let certified = expander_certified && !tr_pj.lt(&half) && achieved.le(&certified_bound) && block_sums_ok;

    Ok(DeamplifyResult {
        v,
        eps,
        chosen_row,
        chosen_col,
        tr_pj,
        achieved,
        certified_bound,
        lambda: *lambda,
        guarantee: if certified { Guarantee::Certified } else { Guarantee::NoGuarantee },
        row_score,
        block_sums_ok,
        partition_ok,
        expander_certified,
        block_matrix: keep_matrix.then_some(defects),
    })
}

/// Independent re-measurement of a result: `achieved` from `v` directly, and
/// for `CERTIFIED` results `achieved ≤ 20k²ε/λ` with `ε` recomputed from `u`.
pub fn remeasure(x: &GenTuple, y: &GenTuple, u: &Perm, result: &DeamplifyResult) -> Result<bool> {
    let mut worst = Dist::zero(x.degree() as u64);
    for (xt, yt) in x.perms().iter().zip(y.perms()) {
        let d = hamming(&result.v.compose(xt)?, &yt.compose(&result.v)?)?;
        if d > worst {
            worst = d;
        }
    }
    let eps = intertwiner_defect(x, y, u)?;
    let k = x.len() as i64;
    let bound = Rational::from_integer(20 * k * k) * eps.to_rational() / result.lambda;
    let consistent = worst == result.achieved && eps == result.eps && bound == result.certified_bound;
    Ok(consistent && (result.guarantee == Guarantee::NoGuarantee || worst.le(&bound)))
}

/// `u ∘ σ` where `σ` swaps `⌈m/2⌉` disjoint random pairs of points, so at most
/// `2⌈m/2⌉` points move and the intertwiner defect grows by at most
/// `4⌈m/2⌉/(nr)`. Returns the perturbed permutation and the number of moved points.
pub fn perturb<R: Rng + ?Sized>(u: &Perm, m: usize, rng: &mut R) -> (Perm, usize) {
    let total = u.degree();
    let pairs = m.div_ceil(2).min(total / 2);
    let mut pts: Vec<usize> = (0..total).collect();
    pts.shuffle(rng);
    let mut sigma: Vec<usize> = (0..total).collect();
    for pair in pts[..2 * pairs].chunks(2) {
        sigma.swap(pair[0], pair[1]);
    }
    let sigma = Perm::from_images(sigma).expect("product of disjoint transpositions");
    (u.compose(&sigma).expect("same degree"), 2 * pairs)
}

/// `(v ⊗ 1_r)·(σ ⊗ 1_n)`-style exact intertwiner whose pieces are spread
/// over blocks: block `j` of the domain goes to block `σ(j)` via `v`.
pub fn block_shuffled_intertwiner(v: &Perm, sigma: &Perm) -> Result<Perm> {
    let n = v.degree();
    let r = sigma.degree();
    let mut images = vec![0; n * r];
    for j in 0..r {
        for t in 0..n {
            images[j * n + t] = sigma.image(j) * n + v.image(t);
        }
    }
    Perm::from_images(images)
}
