use std::fmt;

use serde::{Deserialize, Serialize};

use super::Perm;
use crate::error::{Error, Result};
use crate::rational::Dist;

/// A subset of `{0, .., n-1}`, i.e. a diagonal projection in `D_n`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "SubsetRepr", into = "SubsetRepr")]
pub struct Subset {
    mask: Vec<bool>,
}

#[derive(Serialize, Deserialize)]
struct SubsetRepr {
    n: usize,
    members: Vec<usize>,
}

impl Subset {
    pub fn empty(n: usize) -> Subset {
        Subset { mask: vec![false; n] }
    }

    pub fn full(n: usize) -> Subset {
        Subset { mask: vec![true; n] }
    }

    pub fn from_mask(mask: Vec<bool>) -> Subset {
        Subset { mask }
    }

    pub fn from_members<I: IntoIterator<Item = usize>>(n: usize, members: I) -> Result<Subset> {
        let mut mask = vec![false; n];
        for m in members {
            if m >= n {
                return Err(Error::IndexOutOfRange { index: m, n });
            }
            mask[m] = true;
        }
        Ok(Subset { mask })
    }

    /// `{lo, .., hi-1}`.
    pub fn range(n: usize, lo: usize, hi: usize) -> Result<Subset> {
        Subset::from_members(n, lo..hi)
    }

    pub(crate) fn from_bits(n: usize, bits: u64) -> Subset {
        Subset {
            mask: (0..n).map(|i| bits >> i & 1 == 1).collect(),
        }
    }

    pub fn degree(&self) -> usize {
        self.mask.len()
    }

    pub fn len(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.mask.iter().any(|&b| b)
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        self.mask[i]
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.mask.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i)
    }

    pub fn members(&self) -> Vec<usize> {
        self.iter().collect()
    }

    /// `|S| / n`.
    pub fn trace(&self) -> Dist {
        Dist::new(self.len() as u64, self.degree() as u64)
    }

    pub fn complement(&self) -> Subset {
        Subset {
            mask: self.mask.iter().map(|b| !b).collect(),
        }
    }

    pub fn intersection(&self, other: &Subset) -> Result<Subset> {
        Error::mismatch(self.degree(), other.degree())?;
        Ok(Subset {
            mask: self.mask.iter().zip(&other.mask).map(|(a, b)| *a && *b).collect(),
        })
    }

    pub fn union(&self, other: &Subset) -> Result<Subset> {
        Error::mismatch(self.degree(), other.degree())?;
        Ok(Subset {
            mask: self.mask.iter().zip(&other.mask).map(|(a, b)| *a || *b).collect(),
        })
    }

    /// `p(S)`.
    pub fn image_under(&self, p: &Perm) -> Result<Subset> {
        Error::mismatch(self.degree(), p.degree())?;
        let mut mask = vec![false; self.degree()];
        for i in self.iter() {
            mask[p.image(i)] = true;
        }
        Ok(Subset { mask })
    }

    /// `|S Δ p(S)|`, which is `n · d_H(e, p e p*)` for the projection `e` onto `S`.
    pub fn boundary_count(&self, p: &Perm) -> Result<usize> {
        Error::mismatch(self.degree(), p.degree())?;
        // |S Δ p(S)| = 2 |{i ∈ S : p(i) ∉ S}| since |p(S)| = |S|.
        let escaping = self.iter().filter(|&i| !self.mask[p.image(i)]).count();
        Ok(2 * escaping)
    }
}

impl TryFrom<SubsetRepr> for Subset {
    type Error = Error;

    fn try_from(r: SubsetRepr) -> Result<Subset> {
        if r.n == 0 {
            return Err(Error::ZeroDegree);
        }
        Subset::from_members(r.n, r.members)
    }
}

impl From<Subset> for SubsetRepr {
    fn from(s: Subset) -> SubsetRepr {
        SubsetRepr { n: s.degree(), members: s.members() }
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subset(n={}, {:?})", self.degree(), self.members())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::cycle;

    #[test]
    fn boundary_of_an_interval_under_the_cycle() {
        let a8 = cycle(8).unwrap();
        let s = Subset::range(8, 0, 4).unwrap();
        assert_eq!(s.image_under(&a8).unwrap().members(), vec![1, 2, 3, 4]);
        assert_eq!(s.boundary_count(&a8).unwrap(), 2);
        assert_eq!(Subset::full(8).boundary_count(&a8).unwrap(), 0);
    }

    #[test]
    fn set_algebra() {
        let a = Subset::from_members(6, [0, 2, 4]).unwrap();
        let b = Subset::from_members(6, [2, 3]).unwrap();
        assert_eq!(a.intersection(&b).unwrap().members(), vec![2]);
        assert_eq!(a.union(&b).unwrap().members(), vec![0, 2, 3, 4]);
        assert_eq!(a.complement().members(), vec![1, 3, 5]);
        assert_eq!(a.trace(), Dist::new(1, 2));
        assert_eq!(Subset::from_bits(4, 0b1010).members(), vec![1, 3]);
        assert!(Subset::from_members(3, [3]).is_err());
    }

    #[test]
    fn json_shape() {
        let a = Subset::from_members(5, [4, 1]).unwrap();
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, r#"{"n":5,"members":[1,4]}"#);
        assert_eq!(serde_json::from_str::<Subset>(&s).unwrap(), a);
        assert!(serde_json::from_str::<Subset>(r#"{"n":2,"members":[2]}"#).is_err());
    }
}
