//! Permutations, pieces of permutations, subsets, generator tuples and words.
//!
//! Everything acts on `{0, .., n-1}`. Composition follows function notation:
//! `compose(p, q)` maps `i` to `p(q(i))`, which is the matrix product `pq`
//! for permutation matrices with a 1 at `(p(j), j)`.

mod enumerate;
mod metric;
mod partial;
mod subset;
mod tuple;
mod word;

use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub(crate) use enumerate::{for_each_perm_with_first, par_filter_map_perms};
pub(crate) use metric::{commutator_count, mismatch_count, moved_count};
pub use enumerate::{factorial, for_each_perm, next_permutation, par_count_perms, LexPerms};
pub use metric::{coxeter, fix_trace, hamming, hamming_rows, inversions};
pub use partial::{block, complete, range_projection, PartialPerm};
pub use subset::Subset;
pub use tuple::GenTuple;
pub use word::{
    ball_size, eval_word, freeness, freeness_defect, visit_ball, Freeness, Letter, Word, DEFAULT_WORD_BUDGET,
};

/// Largest degree produced by amplification or direct sums.
pub const MAX_DEGREE: usize = 1 << 26;

/// A bijection of `{0, .., n-1}`, stored by its images.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Perm {
    images: Vec<usize>,
}

impl Perm {
    pub fn identity(n: usize) -> Perm {
        Perm { images: (0..n).collect() }
    }

    /// Validates that `images` is a bijection of `0..images.len()`.
    pub fn from_images(images: Vec<usize>) -> Result<Perm> {
        let n = images.len();
        if n == 0 {
            return Err(Error::ZeroDegree);
        }
        let mut seen = vec![false; n];
        for (i, &v) in images.iter().enumerate() {
            if v >= n {
                return Err(Error::InvalidPermutation {
                    n,
                    reason: format!("image {v} of {i} is out of range"),
                });
            }
            if std::mem::replace(&mut seen[v], true) {
                return Err(Error::InvalidPermutation {
                    n,
                    reason: format!("value {v} appears twice"),
                });
            }
        }
        Ok(Perm { images })
    }

    pub(crate) fn from_images_unchecked(images: Vec<usize>) -> Perm {
        debug_assert!(Perm::from_images(images.clone()).is_ok());
        Perm { images }
    }

    /// `i -> n-1-i`, the permutation of maximal Coxeter length.
    pub fn reversal(n: usize) -> Perm {
        Perm { images: (0..n).rev().collect() }
    }

    /// Transposition of `a` and `b`.
    pub fn transposition(n: usize, a: usize, b: usize) -> Result<Perm> {
        if a >= n || b >= n {
            return Err(Error::IndexOutOfRange { index: a.max(b), n });
        }
        let mut p = Perm::identity(n);
        p.images.swap(a, b);
        Ok(p)
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Perm {
        let mut images: Vec<usize> = (0..n).collect();
        images.shuffle(rng);
        Perm { images }
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    #[inline]
    pub fn image(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn into_images(self) -> Vec<usize> {
        self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &v)| i == v)
    }

    pub fn fixed_points(&self) -> usize {
        self.images.iter().enumerate().filter(|&(i, &v)| i == v).count()
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0; self.degree()];
        for (i, &v) in self.images.iter().enumerate() {
            inv[v] = i;
        }
        Perm { images: inv }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Perm) -> Result<Perm> {
        Error::mismatch(self.degree(), other.degree())?;
        Ok(Perm {
            images: other.images.iter().map(|&j| self.images[j]).collect(),
        })
    }

    /// `q ∘ self ∘ q⁻¹`.
    pub fn conjugate_by(&self, q: &Perm) -> Result<Perm> {
        Error::mismatch(self.degree(), q.degree())?;
        let mut images = vec![0; self.degree()];
        for (i, &v) in self.images.iter().enumerate() {
            images[q.images[i]] = q.images[v];
        }
        Ok(Perm { images })
    }

    pub fn pow(&self, e: i64) -> Perm {
        let base = if e < 0 { self.inverse() } else { self.clone() };
        let mut out = Perm::identity(self.degree());
        for _ in 0..e.unsigned_abs() {
            out = base.compose(&out).expect("same degree");
        }
        out
    }

    /// Orbits of `<self>` listed as cycles, each starting at its least element.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.degree()];
        let mut out = Vec::new();
        for start in 0..self.degree() {
            if seen[start] {
                continue;
            }
            let mut cyc = Vec::new();
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                cyc.push(i);
                i = self.images[i];
            }
            out.push(cyc);
        }
        out
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm{:?}", self.images)
    }
}

impl TryFrom<Vec<usize>> for Perm {
    type Error = Error;

    fn try_from(images: Vec<usize>) -> Result<Perm> {
        Perm::from_images(images)
    }
}

impl From<Perm> for Vec<usize> {
    fn from(p: Perm) -> Vec<usize> {
        p.images
    }
}

/// `p ∘ q`.
pub fn compose(p: &Perm, q: &Perm) -> Result<Perm> {
    p.compose(q)
}

/// The cycle `a_n : i -> i+1 (mod n)`.
pub fn cycle(n: usize) -> Result<Perm> {
    if n == 0 {
        return Err(Error::ZeroDegree);
    }
    Ok(Perm {
        images: (0..n).map(|i| (i + 1) % n).collect(),
    })
}

/// Amplification `p ⊗ 1_r` on `n·r` points: position `b·n + t` (block `b`,
/// inner index `t`) goes to `b·n + p(t)`.
pub fn tensor_id(p: &Perm, r: usize) -> Result<Perm> {
    if r == 0 {
        return Err(Error::InvalidParameter("amplification factor must be positive".into()));
    }
    let n = p.degree();
    let total = n as u128 * r as u128;
    if total > MAX_DEGREE as u128 {
        return Err(Error::DegreeOverflow { requested: total, max: MAX_DEGREE });
    }
    let mut images = Vec::with_capacity(n * r);
    for b in 0..r {
        images.extend(p.images.iter().map(|&v| b * n + v));
    }
    Ok(Perm { images })
}

/// `p ⊕ q`: `p` on the first `p.degree()` points, `q` shifted on the rest.
pub fn direct_sum(p: &Perm, q: &Perm) -> Perm {
    let shift = p.degree();
    let mut images = p.images.clone();
    images.extend(q.images.iter().map(|&v| v + shift));
    Perm { images }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn compose_examples() {
        let id4 = Perm::identity(4);
        assert_eq!(compose(&id4, &id4).unwrap(), id4);
        let a4 = cycle(4).unwrap();
        assert_eq!(compose(&a4, &a4.inverse()).unwrap(), id4);
        let a3 = cycle(3).unwrap();
        assert_eq!(compose(&a3, &a3).unwrap().images(), &[2, 0, 1]);
        assert!(matches!(
            compose(&a3, &a4),
            Err(Error::DegreeMismatch { left: 3, right: 4 })
        ));
    }

    #[test]
    fn cycle_examples() {
        assert_eq!(cycle(1).unwrap(), Perm::identity(1));
        assert_eq!(cycle(4).unwrap().images(), &[1, 2, 3, 0]);
        assert_eq!(cycle(5).unwrap().fixed_points(), 0);
        assert_eq!(cycle(0), Err(Error::ZeroDegree));
    }

    #[test]
    fn tensor_and_direct_sum_examples() {
        let a2 = cycle(2).unwrap();
        assert_eq!(tensor_id(&a2, 2).unwrap().images(), &[1, 0, 3, 2]);
        let a5 = cycle(5).unwrap();
        assert_eq!(tensor_id(&a5, 1).unwrap(), a5);
        assert_eq!(
            direct_sum(&Perm::identity(2), &Perm::identity(3)),
            Perm::identity(5)
        );
        assert!(matches!(
            tensor_id(&a5, MAX_DEGREE),
            Err(Error::DegreeOverflow { .. })
        ));
    }

    #[test]
    fn rejects_non_bijections() {
        assert!(Perm::from_images(vec![0, 0]).is_err());
        assert!(Perm::from_images(vec![1, 2]).is_err());
        assert_eq!(Perm::from_images(vec![]), Err(Error::ZeroDegree));
        assert!(serde_json::from_str::<Perm>("[0,2,2]").is_err());
        let p: Perm = serde_json::from_str("[2,0,1]").unwrap();
        assert_eq!(serde_json::to_string(&p).unwrap(), "[2,0,1]");
    }

    #[test]
    fn conjugation_and_powers() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = Perm::random(9, &mut rng);
        let q = Perm::random(9, &mut rng);
        let direct = q.compose(&p).unwrap().compose(&q.inverse()).unwrap();
        assert_eq!(p.conjugate_by(&q).unwrap(), direct);
        let a = cycle(7).unwrap();
        assert_eq!(a.pow(7), Perm::identity(7));
        assert_eq!(a.pow(-1), a.inverse());
        assert_eq!(a.cycles().len(), 1);
        assert_eq!(Perm::identity(3).cycles().len(), 3);
    }
}
