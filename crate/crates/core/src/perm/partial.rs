use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Perm, Subset};
use crate::error::{Error, Result};

/// A piece of permutation: an injective partial map on `{0, .., n-1}`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Option<usize>>", into = "Vec<Option<usize>>")]
pub struct PartialPerm {
    images: Vec<Option<usize>>,
}

impl PartialPerm {
    pub fn empty(n: usize) -> PartialPerm {
        PartialPerm { images: vec![None; n] }
    }

    pub fn from_images(images: Vec<Option<usize>>) -> Result<PartialPerm> {
        let n = images.len();
        if n == 0 {
            return Err(Error::ZeroDegree);
        }
        let mut seen = vec![false; n];
        for &v in images.iter().flatten() {
            if v >= n {
                return Err(Error::IndexOutOfRange { index: v, n });
            }
            if std::mem::replace(&mut seen[v], true) {
                return Err(Error::NotInjective { value: v });
            }
        }
        Ok(PartialPerm { images })
    }

    /// A random permutation with each point independently left undefined with probability 1/2.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> PartialPerm {
        let p = Perm::random(n, rng);
        PartialPerm {
            images: p
                .images()
                .iter()
                .map(|&v| if rng.gen_bool(0.5) { Some(v) } else { None })
                .collect(),
        }
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[Option<usize>] {
        &self.images
    }

    pub fn image(&self, i: usize) -> Option<usize> {
        self.images[i]
    }

    pub fn defined_count(&self) -> usize {
        self.images.iter().filter(|v| v.is_some()).count()
    }

    pub fn is_total(&self) -> bool {
        self.images.iter().all(Option::is_some)
    }

    pub fn to_perm(&self) -> Option<Perm> {
        let images: Option<Vec<usize>> = self.images.iter().copied().collect();
        images.map(Perm::from_images_unchecked)
    }

    /// `self ∘ other`, defined where `other` is defined and lands in the domain of `self`.
    pub fn compose(&self, other: &PartialPerm) -> Result<PartialPerm> {
        Error::mismatch(self.degree(), other.degree())?;
        Ok(PartialPerm {
            images: other
                .images
                .iter()
                .map(|v| v.and_then(|j| self.images[j]))
                .collect(),
        })
    }

    /// The relational inverse; for a piece of permutation matrix this is the transpose.
    pub fn adjoint(&self) -> PartialPerm {
        let mut images = vec![None; self.degree()];
        for (i, v) in self.images.iter().enumerate() {
            if let Some(v) = *v {
                images[v] = Some(i);
            }
        }
        PartialPerm { images }
    }
}

impl From<&Perm> for PartialPerm {
    fn from(p: &Perm) -> PartialPerm {
        PartialPerm {
            images: p.images().iter().map(|&v| Some(v)).collect(),
        }
    }
}

impl TryFrom<Vec<Option<usize>>> for PartialPerm {
    type Error = Error;

    fn try_from(images: Vec<Option<usize>>) -> Result<PartialPerm> {
        PartialPerm::from_images(images)
    }
}

impl From<PartialPerm> for Vec<Option<usize>> {
    fn from(p: PartialPerm) -> Self {
        p.images
    }
}

impl fmt::Debug for PartialPerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("PartialPerm[")?;
        for (i, v) in self.images.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            match v {
                Some(v) => write!(f, "{v}")?,
                None => f.write_str("_")?,
            }
        }
        f.write_str("]")
    }
}

/// The `(i, j)` block of `u ∈ P_{nr}` viewed as an `r × r` matrix of `n × n`
/// pieces: `t ↦ t'` whenever `u(j·n + t) = i·n + t'`.
pub fn block(u: &Perm, i: usize, j: usize, n: usize, r: usize) -> Result<PartialPerm> {
    if n == 0 || r == 0 || u.degree() != n * r {
        return Err(Error::NotDivisible { n: u.degree(), by: n.max(1) });
    }
    if i >= r || j >= r {
        return Err(Error::IndexOutOfRange { index: i.max(j), n: r });
    }
    let lo = i * n;
    let hi = lo + n;
    let images = u.images()[j * n..(j + 1) * n]
        .iter()
        .map(|&v| (lo..hi).contains(&v).then(|| v - lo))
        .collect();
    Ok(PartialPerm { images })
}

/// Extends `q` to a permutation: undefined points, in ascending order, take
/// the unused values in ascending order.
pub fn complete(q: &PartialPerm) -> Perm {
    let n = q.degree();
    let mut used = vec![false; n];
    for v in q.images.iter().flatten() {
        used[*v] = true;
    }
    let mut free = (0..n).filter(|&v| !used[v]);
    let images = q
        .images
        .iter()
        .map(|v| v.unwrap_or_else(|| free.next().expect("as many free values as undefined points")))
        .collect();
    Perm::from_images_unchecked(images)
}

/// The set of values attained by `q`; as a diagonal projection, `q q*`.
pub fn range_projection(q: &PartialPerm) -> Subset {
    let mut mask = vec![false; q.degree()];
    for v in q.images.iter().flatten() {
        mask[*v] = true;
    }
    Subset::from_mask(mask)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::{cycle, hamming_rows, tensor_id};
    use crate::rational::Dist;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn blocks_of_an_amplification() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let p = Perm::random(6, &mut rng);
        let u = tensor_id(&p, 3).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let b = block(&u, i, j, 6, 3).unwrap();
                if i == j {
                    assert_eq!(b.to_perm().unwrap(), p);
                } else {
                    assert_eq!(b, PartialPerm::empty(6));
                }
            }
        }
        assert!(block(&u, 0, 0, 5, 3).is_err());
        assert!(block(&u, 3, 0, 6, 3).is_err());
    }

    #[test]
    fn blocks_cover_a_bijection() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let (n, r) = (5, 4);
        let u = Perm::random(n * r, &mut rng);
        let mut total = 0;
        for i in 0..r {
            let mut cover = vec![0; n];
            for j in 0..r {
                let b = block(&u, i, j, n, r).unwrap();
                total += b.defined_count();
                for v in range_projection(&b).iter() {
                    cover[v] += 1;
                }
            }
            assert!(cover.iter().all(|&c| c == 1), "ranges partition the block");
        }
        assert_eq!(total, n * r);
    }

    #[test]
    fn adjoint_of_block_is_block_of_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let (n, r) = (6, 3);
        for _ in 0..20 {
            let u = Perm::random(n * r, &mut rng);
            let uinv = u.inverse();
            for i in 0..r {
                for j in 0..r {
                    assert_eq!(
                        block(&u, i, j, n, r).unwrap().adjoint(),
                        block(&uinv, j, i, n, r).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn completion_examples() {
        let a = cycle(5).unwrap();
        assert_eq!(complete(&PartialPerm::from(&a)), a);
        assert_eq!(complete(&PartialPerm::empty(4)), Perm::identity(4));
        let q = PartialPerm::from_images(vec![Some(2), None, Some(0)]).unwrap();
        let c = complete(&q);
        assert_eq!(c.images(), &[2, 1, 0]);
        assert_eq!(hamming_rows(&c.clone().into_partial(), &q).unwrap(), Dist::new(1, 3));
    }

    #[test]
    fn range_projection_examples() {
        let a = cycle(4).unwrap();
        assert_eq!(range_projection(&PartialPerm::from(&a)).trace(), Dist::one(4));
        assert!(range_projection(&PartialPerm::empty(4)).is_empty());
        let q = PartialPerm::from_images(vec![None, Some(3), Some(1), None]).unwrap();
        assert_eq!(range_projection(&q).members(), vec![1, 3]);
        assert_eq!(
            range_projection(&q),
            range_projection(&q.compose(&q.adjoint()).unwrap())
        );
    }

    #[test]
    fn rejects_non_injective() {
        assert_eq!(
            PartialPerm::from_images(vec![Some(1), Some(1)]),
            Err(Error::NotInjective { value: 1 })
        );
        assert!(serde_json::from_str::<PartialPerm>("[null, 0, 0]").is_err());
        let q: PartialPerm = serde_json::from_str("[null, 0, 1]").unwrap();
        assert_eq!(q.defined_count(), 2);
    }

    impl Perm {
        fn into_partial(self) -> PartialPerm {
            PartialPerm::from(&self)
        }
    }
}
