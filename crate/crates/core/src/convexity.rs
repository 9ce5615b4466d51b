//! Finite shadows of the convex structure: orbits as exact cutting
//! projections, cuts (restrictions), direct-sum convex combinations with
//! rational weights, and decomposition checks.

use num_integer::Integer;
use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};

use crate::conjugacy::{self, Conjugacy};
use crate::error::{Error, Result};
use crate::expansion::boundary_sum;
use crate::limits::Limits;
use crate::perm::{GenTuple, Perm, Subset};
use crate::rational::{self, Dist, Rational};

/// Orbits of the group generated by `t`, each a [`Subset`], ordered by least element.
pub fn orbit_subsets(t: &GenTuple) -> Vec<Subset> {
    let n = t.degree();
    let mut uf = UnionFind::<usize>::new(n);
    for p in t.perms() {
        for (i, &v) in p.images().iter().enumerate() {
            uf.union(i, v);
        }
    }
    let mut slot = vec![usize::MAX; n];
    let mut masks: Vec<Vec<bool>> = Vec::new();
    for i in 0..n {
        let root = uf.find(i);
        if slot[root] == usize::MAX {
            slot[root] = masks.len();
            masks.push(vec![false; n]);
        }
        masks[slot[root]][i] = true;
    }
    masks.into_iter().map(Subset::from_mask).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutResult {
    /// The generators restricted to `S`, with `S` relabeled to `0..|S|` in increasing order.
    pub restricted: GenTuple,
    /// `boundary_sum(t, S)` before any repair.
    pub defect: Dist,
    /// Points whose image left `S` and was rerouted, summed over generators.
    pub patched: usize,
    /// Members of `S` in increasing order; position `i` is relabeled to `i`.
    pub members: Vec<usize>,
}

impl CutResult {
    pub fn is_exact(&self) -> bool {
        self.defect.is_zero()
    }
}

/// Restriction of `t` to `S`. Exact when `S` is a union of orbits; otherwise
/// each escaping point, in increasing order, is sent to the smallest target in
/// `S` not yet hit.
pub fn cut(t: &GenTuple, s: &Subset) -> Result<CutResult> {
    Error::mismatch(t.degree(), s.degree())?;
    if s.is_empty() {
        return Err(Error::EmptySubset);
    }
    let members = s.members();
    let m = members.len();
    let mut index = vec![usize::MAX; t.degree()];
    for (k, &x) in members.iter().enumerate() {
        index[x] = k;
    }
    let mut patched = 0;
    let mut perms = Vec::with_capacity(t.len());
    for p in t.perms() {
        let mut images: Vec<Option<usize>> = members
            .iter()
            .map(|&x| Some(index[p.image(x)]).filter(|&v| v != usize::MAX))
            .collect();
        let mut used = vec![false; m];
        for v in images.iter().flatten() {
            used[*v] = true;
        }
        let mut free = (0..m).filter(|&v| !used[v]);
        for img in images.iter_mut().filter(|v| v.is_none()) {
            *img = free.next();
            patched += 1;
        }
        perms.push(Perm::from_images(images.into_iter().map(|v| v.expect("one free target per escape")).collect())?);
    }
    Ok(CutResult {
        restricted: GenTuple::new(perms)?,
        defect: boundary_sum(t, s)?,
        patched,
        members,
    })
}

/// The relabeling that lists `S` first and `S^c` after, each in increasing
/// order: `π(members[k]) = k`.
pub fn canonical_relabel(s: &Subset) -> Perm {
    let n = s.degree();
    let mut images = vec![0; n];
    for (k, x) in s.iter().chain(s.complement().iter()).enumerate() {
        images[x] = k;
    }
    Perm::from_images(images).expect("a listing of every point once")
}

/// `π t π* = cut(t, S) ⊕ cut(t, S^c)` bit-exactly, for `S` a union of orbits.
pub fn verify_decomposition(t: &GenTuple, s: &Subset) -> Result<bool> {
    let defect = boundary_sum(t, s)?;
    if !defect.is_zero() {
        return Err(Error::NotInvariant { boundary: defect.to_string() });
    }
    let pi = canonical_relabel(s);
    let relabeled = t.conjugate_by(&pi)?;
    let comp = s.complement();
    let expected = match (s.is_empty(), comp.is_empty()) {
        (false, false) => cut(t, s)?.restricted.direct_sum(&cut(t, &comp)?.restricted)?,
        (false, true) => cut(t, s)?.restricted,
        (true, _) => cut(t, &comp)?.restricted,
    };
    Ok(relabeled == expected)
}

/// Positive rational weights summing to exactly 1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct WeightVector {
    weights: Vec<Rational>,
}

impl WeightVector {
    pub fn new(weights: Vec<Rational>) -> Result<WeightVector> {
        if weights.is_empty() {
            return Err(Error::InvalidWeights("no weights".into()));
        }
        if let Some(w) = weights.iter().find(|w| **w <= Rational::from_integer(0)) {
            return Err(Error::InvalidWeights(format!("weight {w} is not positive")));
        }
        let total: Rational = weights.iter().sum();
        if total != Rational::from_integer(1) {
            return Err(Error::InvalidWeights(format!("weights sum to {total}, not 1")));
        }
        Ok(WeightVector { weights })
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Least common denominator.
    pub fn denominator(&self) -> i64 {
        self.weights.iter().fold(1, |acc, w| acc.lcm(w.denom()))
    }
}

impl TryFrom<Vec<String>> for WeightVector {
    type Error = Error;

    fn try_from(v: Vec<String>) -> Result<WeightVector> {
        WeightVector::new(v.iter().map(|s| rational::parse_rational(s)).collect::<Result<_>>()?)
    }
}

impl From<WeightVector> for Vec<String> {
    fn from(w: WeightVector) -> Vec<String> {
        w.weights.iter().map(rational::format_rational).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConvexCombination {
    pub tuple: GenTuple,
    /// Block `i` holds the copies of input `i`; its trace is weight `i`.
    pub blocks: Vec<Subset>,
    /// Copies of each input: `(L/n_i)·w_i·scale` with `L = lcm(n_i)`.
    pub multiplicities: Vec<usize>,
    /// Degree of each input.
    pub degrees: Vec<usize>,
}

impl ConvexCombination {
    /// Input `i` recovered by cutting its block and then its first copy.
    pub fn recover(&self, i: usize) -> Result<GenTuple> {
        let block = self.blocks.get(i).ok_or(Error::IndexOutOfRange { index: i, n: self.blocks.len() })?;
        let inner = cut(&self.tuple, block)?;
        let first = Subset::range(inner.restricted.degree(), 0, self.degrees[i])?;
        Ok(cut(&inner.restricted, &first)?.restricted)
    }
}

/// `⊕_i (t_i ⊗ 1_{c_i})` with `c_i = (L/n_i)·w_i·scale`, `L = lcm(n_i)`, so
/// block `i` has degree `L·w_i·scale` and trace exactly `w_i`.
pub fn convex_combine(ts: &[GenTuple], w: &WeightVector, scale: usize) -> Result<ConvexCombination> {
    if ts.is_empty() {
        return Err(Error::EmptyTuple);
    }
    if ts.len() != w.len() {
        return Err(Error::LengthMismatch { left: ts.len(), right: w.len() });
    }
    if scale == 0 {
        return Err(Error::InvalidParameter("scale must be positive".into()));
    }
    let k = ts[0].len();
    for t in ts {
        if t.len() != k {
            return Err(Error::LengthMismatch { left: k, right: t.len() });
        }
    }
    let lcm = ts.iter().fold(1usize, |acc, t| acc.lcm(&t.degree()));
    let mut multiplicities = Vec::with_capacity(ts.len());
    for (t, wi) in ts.iter().zip(w.weights()) {
        let copies = *wi * Rational::from_integer((lcm / t.degree()) as i64 * scale as i64);
        if !copies.is_integer() {
            return Err(Error::InvalidWeights(format!(
                "weight {wi} is not representable at scale {scale} (common denominator {})",
                w.denominator()
            )));
        }
        multiplicities.push(copies.to_integer() as usize);
    }
    let mut acc: Option<GenTuple> = None;
    let mut blocks = Vec::with_capacity(ts.len());
    let mut spans = Vec::with_capacity(ts.len());
    let mut offset = 0;
    for (t, &c) in ts.iter().zip(&multiplicities) {
        let amplified = t.tensor_id(c)?;
        let d = amplified.degree();
        spans.push((offset, offset + d));
        offset += d;
        acc = Some(match acc {
            None => amplified,
            Some(prev) => prev.direct_sum(&amplified)?,
        });
    }
    for (lo, hi) in spans {
        blocks.push(Subset::range(offset, lo, hi)?);
    }
    Ok(ConvexCombination {
        tuple: acc.expect("at least one input"),
        blocks,
        multiplicities,
        degrees: ts.iter().map(GenTuple::degree).collect(),
    })
}

/// Upper bound on `d_S(x, y)` by annealing, exact when `n ≤ limits.s_distance_exact`.
pub fn conjugacy_search(x: &GenTuple, y: &GenTuple, seed: u64, limits: &Limits) -> Result<Conjugacy> {
    conjugacy::search(x, y, limits.anneal_steps, seed, limits.s_distance_exact)
}

/// Unions of orbits of `t`, one per subset of the orbit list (at most `2^16`).
pub fn orbit_unions(t: &GenTuple) -> Result<Vec<Subset>> {
    let orbits = orbit_subsets(t);
    if orbits.len() > 16 {
        return Err(Error::BudgetExceeded {
            what: "orbit unions",
            needed: 1u128 << orbits.len().min(127),
            budget: 1 << 16,
        });
    }
    let n = t.degree();
    Ok((0..1u32 << orbits.len())
        .map(|bits| {
            let mut mask = vec![false; n];
            for (k, o) in orbits.iter().enumerate() {
                if bits >> k & 1 == 1 {
                    for x in o.iter() {
                        mask[x] = true;
                    }
                }
            }
            Subset::from_mask(mask)
        })
        .collect())
}
