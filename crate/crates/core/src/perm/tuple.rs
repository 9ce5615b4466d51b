use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{direct_sum, tensor_id, Perm};
use crate::error::{Error, Result};

/// `k ≥ 1` permutations of a common degree `n`: the image of the free
/// generators `x_1, .., x_k` at one finite level.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "TupleRepr", into = "TupleRepr")]
pub struct GenTuple {
    perms: Vec<Perm>,
}

#[derive(Serialize, Deserialize)]
struct TupleRepr {
    n: usize,
    perms: Vec<Perm>,
}

impl GenTuple {
    pub fn new(perms: Vec<Perm>) -> Result<GenTuple> {
        let first = perms.first().ok_or(Error::EmptyTuple)?;
        let n = first.degree();
        for p in &perms[1..] {
            Error::mismatch(n, p.degree())?;
        }
        Ok(GenTuple { perms })
    }

    pub fn single(p: Perm) -> GenTuple {
        GenTuple { perms: vec![p] }
    }

    pub fn random<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> GenTuple {
        assert!(k >= 1 && n >= 1);
        GenTuple {
            perms: (0..k).map(|_| Perm::random(n, rng)).collect(),
        }
    }

    pub fn degree(&self) -> usize {
        self.perms[0].degree()
    }

    pub fn len(&self) -> usize {
        self.perms.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn perms(&self) -> &[Perm] {
        &self.perms
    }

    pub fn perm(&self, i: usize) -> &Perm {
        &self.perms[i]
    }

    /// `(q x_1 q*, .., q x_k q*)`.
    pub fn conjugate_by(&self, q: &Perm) -> Result<GenTuple> {
        let perms = self
            .perms
            .iter()
            .map(|p| p.conjugate_by(q))
            .collect::<Result<_>>()?;
        Ok(GenTuple { perms })
    }

    pub fn tensor_id(&self, r: usize) -> Result<GenTuple> {
        let perms = self
            .perms
            .iter()
            .map(|p| tensor_id(p, r))
            .collect::<Result<_>>()?;
        Ok(GenTuple { perms })
    }

    pub fn direct_sum(&self, other: &GenTuple) -> Result<GenTuple> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch { left: self.len(), right: other.len() });
        }
        Ok(GenTuple {
            perms: self
                .perms
                .iter()
                .zip(&other.perms)
                .map(|(p, q)| direct_sum(p, q))
                .collect(),
        })
    }

    pub(crate) fn check_compatible(&self, other: &GenTuple) -> Result<()> {
        Error::mismatch(self.degree(), other.degree())?;
        if self.len() != other.len() {
            return Err(Error::LengthMismatch { left: self.len(), right: other.len() });
        }
        Ok(())
    }
}

impl TryFrom<TupleRepr> for GenTuple {
    type Error = Error;

    fn try_from(r: TupleRepr) -> Result<GenTuple> {
        let t = GenTuple::new(r.perms)?;
        Error::mismatch(r.n, t.degree())?;
        Ok(t)
    }
}

impl From<GenTuple> for TupleRepr {
    fn from(t: GenTuple) -> TupleRepr {
        TupleRepr { n: t.degree(), perms: t.perms }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::cycle;

    #[test]
    fn validation() {
        assert_eq!(GenTuple::new(vec![]), Err(Error::EmptyTuple));
        assert!(GenTuple::new(vec![Perm::identity(3), Perm::identity(4)]).is_err());
        let t = GenTuple::new(vec![cycle(4).unwrap(), Perm::identity(4)]).unwrap();
        assert_eq!((t.degree(), t.len()), (4, 2));
    }

    #[test]
    fn json_shape() {
        let t = GenTuple::new(vec![cycle(3).unwrap(), Perm::identity(3)]).unwrap();
        let s = serde_json::to_string(&t).unwrap();
        assert_eq!(s, r#"{"n":3,"perms":[[1,2,0],[0,1,2]]}"#);
        assert_eq!(serde_json::from_str::<GenTuple>(&s).unwrap(), t);
        assert!(serde_json::from_str::<GenTuple>(r#"{"n":4,"perms":[[1,2,0]]}"#).is_err());
        assert!(serde_json::from_str::<GenTuple>(r#"{"n":3,"perms":[]}"#).is_err());
    }
}
