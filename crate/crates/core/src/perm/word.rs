use std::fmt;
use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use super::{GenTuple, Perm};
use crate::error::{Error, Result};
use crate::rational::Dist;

/// Default cap on the number of words visited when enumerating a ball.
pub const DEFAULT_WORD_BUDGET: u128 = 2_000_000;

/// One letter `x_g` or `x_g⁻¹` (generators are 0-based internally, 1-based when displayed).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Letter {
    pub gen: usize,
    pub inverse: bool,
}

impl Letter {
    pub fn new(gen: usize, inverse: bool) -> Letter {
        Letter { gen, inverse }
    }

    pub fn inv(self) -> Letter {
        Letter { gen: self.gen, inverse: !self.inverse }
    }

    fn index(self) -> usize {
        2 * self.gen + self.inverse as usize
    }
}

/// A reduced word in the free group. Serializes as signed 1-based generator
/// indices: `[1, -2]` is `x1 x2⁻¹`.
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<i64>")]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    pub fn identity() -> Word {
        Word::default()
    }

    pub fn new(letters: Vec<Letter>) -> Result<Word> {
        for (pos, w) in letters.windows(2).enumerate() {
            if w[1] == w[0].inv() {
                return Err(Error::NotReduced { position: pos + 1 });
            }
        }
        Ok(Word { letters })
    }

    /// From signed 1-based indices, e.g. `&[1, -2]` for `x1 x2⁻¹`.
    pub fn from_signed(signed: &[i64]) -> Result<Word> {
        let letters = signed
            .iter()
            .map(|&s| {
                if s == 0 {
                    Err(Error::InvalidParameter("generator index 0 in word".into()))
                } else {
                    Ok(Letter::new(s.unsigned_abs() as usize - 1, s < 0))
                }
            })
            .collect::<Result<_>>()?;
        Word::new(letters)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Free reduction of the concatenation `self · other`.
    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.letters.clone();
        for &l in &other.letters {
            if letters.last() == Some(&l.inv()) {
                letters.pop();
            } else {
                letters.push(l);
            }
        }
        Word { letters }
    }

    pub fn inverse(&self) -> Word {
        Word {
            letters: self.letters.iter().rev().map(|l| l.inv()).collect(),
        }
    }
}

impl TryFrom<Vec<i64>> for Word {
    type Error = Error;

    fn try_from(v: Vec<i64>) -> Result<Word> {
        Word::from_signed(&v)
    }
}

impl From<Word> for Vec<i64> {
    fn from(w: Word) -> Vec<i64> {
        w.letters
            .iter()
            .map(|l| {
                let g = l.gen as i64 + 1;
                if l.inverse {
                    -g
                } else {
                    g
                }
            })
            .collect()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return f.write_str("1");
        }
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "x{}", l.gen + 1)?;
            if l.inverse {
                f.write_str("^-1")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}

/// Evaluates `w` at `t`: the product of generators in order, so `x1 x2`
/// becomes `compose(t_1, t_2)`. The empty word evaluates to the identity.
pub fn eval_word(t: &GenTuple, w: &Word) -> Result<Perm> {
    let k = t.len();
    if let Some(l) = w.letters.iter().find(|l| l.gen >= k) {
        return Err(Error::GeneratorOutOfRange { index: l.gen + 1, k });
    }
    let n = t.degree();
    let inverses: Vec<Perm> = t.perms().iter().map(Perm::inverse).collect();
    let mut acc: Vec<usize> = (0..n).collect();
    for l in &w.letters {
        let g = if l.inverse { &inverses[l.gen] } else { t.perm(l.gen) };
        acc = g.images().iter().map(|&j| acc[j]).collect();
    }
    Ok(Perm::from_images_unchecked(acc))
}

/// Number of nontrivial reduced words of length at most `radius` in the free
/// group on `k` generators.
pub fn ball_size(k: usize, radius: usize) -> u128 {
    let mut total: u128 = 0;
    let mut level: u128 = 2 * k as u128;
    for _ in 0..radius {
        total = total.saturating_add(level);
        level = level.saturating_mul(2 * k as u128 - 1);
    }
    total
}

/// Depth-first visit of every nontrivial reduced word of length `1..=radius`
/// together with its evaluation at `t`. Returns the number of words visited.
pub fn visit_ball<F>(t: &GenTuple, radius: usize, budget: u128, mut f: F) -> Result<u64>
where
    F: FnMut(&[Letter], &[usize]) -> ControlFlow<()>,
{
    let needed = ball_size(t.len(), radius);
    if needed > budget {
        return Err(Error::BudgetExceeded { what: "word ball", needed, budget });
    }
    let n = t.degree();
    let mut gens: Vec<Vec<usize>> = Vec::with_capacity(2 * t.len());
    for p in t.perms() {
        gens.push(p.images().to_vec());
        gens.push(p.inverse().into_images());
    }
    let mut levels: Vec<Vec<usize>> = vec![(0..n).collect(); radius + 1];
    let mut word: Vec<Letter> = Vec::with_capacity(radius);
    let mut visited = 0u64;
    let all: Vec<Letter> = (0..t.len())
        .flat_map(|g| [Letter::new(g, false), Letter::new(g, true)])
        .collect();
    let _ = dfs(&gens, &all, &mut levels, &mut word, radius, &mut visited, &mut f);
    Ok(visited)
}

fn dfs<F>(
    gens: &[Vec<usize>],
    all: &[Letter],
    levels: &mut [Vec<usize>],
    word: &mut Vec<Letter>,
    radius: usize,
    visited: &mut u64,
    f: &mut F,
) -> ControlFlow<()>
where
    F: FnMut(&[Letter], &[usize]) -> ControlFlow<()>,
{
    let depth = word.len();
    if depth == radius {
        return ControlFlow::Continue(());
    }
    for &l in all {
        if word.last().map(|last| last.inv()) == Some(l) {
            continue;
        }
        {
            let (lo, hi) = levels.split_at_mut(depth + 1);
            let cur = &lo[depth];
            let g = &gens[l.index()];
            for (dst, &j) in hi[0].iter_mut().zip(g) {
                *dst = cur[j];
            }
        }
        word.push(l);
        *visited += 1;
        let flow = match f(word, &levels[depth + 1]) {
            ControlFlow::Continue(()) => dfs(gens, all, levels, word, radius, visited, f),
            stop => stop,
        };
        word.pop();
        if flow.is_break() {
            return flow;
        }
    }
    ControlFlow::Continue(())
}

/// Worst fixed-point trace over the nontrivial words of a ball.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Freeness {
    pub radius: usize,
    /// `max fix_trace(eval_word(t, w))` over nontrivial reduced `w` with `|w| ≤ radius`.
    pub defect: Dist,
    /// First word (in enumeration order) attaining `defect`.
    pub worst: Word,
    pub words: u64,
}

pub fn freeness(t: &GenTuple, radius: usize, budget: u128) -> Result<Freeness> {
    if radius == 0 {
        return Err(Error::InvalidParameter("radius must be at least 1".into()));
    }
    let n = t.degree();
    let mut best = 0usize;
    let mut worst: Option<Vec<Letter>> = None;
    let words = visit_ball(t, radius, budget, |w, p| {
        let fixed = p.iter().enumerate().filter(|&(i, &v)| i == v).count();
        if worst.is_none() || fixed > best {
            best = fixed;
            worst = Some(w.to_vec());
        }
        ControlFlow::Continue(())
    })?;
    Ok(Freeness {
        radius,
        defect: Dist::new(best as u64, n as u64),
        worst: Word { letters: worst.unwrap_or_default() },
        words,
    })
}

/// `max fix_trace(eval_word(t, w))` over nontrivial reduced words of length ≤ `radius`.
pub fn freeness_defect(t: &GenTuple, radius: usize) -> Result<Dist> {
    freeness(t, radius, DEFAULT_WORD_BUDGET).map(|f| f.defect)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::{compose, cycle, fix_trace};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pair(a: Perm, c: Perm) -> GenTuple {
        GenTuple::new(vec![a, c]).unwrap()
    }

    #[test]
    fn eval_examples() {
        let a4 = cycle(4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let t = pair(a4.clone(), Perm::random(4, &mut rng));
        assert_eq!(eval_word(&t, &Word::identity()).unwrap(), Perm::identity(4));
        assert_eq!(eval_word(&t, &Word::from_signed(&[1]).unwrap()).unwrap(), a4);
        assert_eq!(
            Word::from_signed(&[1, -1]),
            Err(Error::NotReduced { position: 1 })
        );
        assert!(matches!(
            eval_word(&t, &Word::from_signed(&[3]).unwrap()),
            Err(Error::GeneratorOutOfRange { .. })
        ));
    }

    #[test]
    fn word_json_and_display() {
        let w = Word::from_signed(&[1, -2, 2]).is_err();
        assert!(w);
        let w = Word::from_signed(&[1, -2, -2]).unwrap();
        assert_eq!(w.to_string(), "x1 x2^-1 x2^-1");
        assert_eq!(serde_json::to_string(&w).unwrap(), "[1,-2,-2]");
        assert!(serde_json::from_str::<Word>("[2,-2]").is_err());
    }

    #[test]
    fn ball_sizes() {
        assert_eq!(ball_size(2, 1), 4);
        assert_eq!(ball_size(2, 3), 4 + 12 + 36);
        assert_eq!(ball_size(1, 5), 10);
        let t = pair(cycle(5).unwrap(), Perm::identity(5));
        let mut seen = std::collections::HashSet::new();
        let visited = visit_ball(&t, 3, u128::MAX, |w, _| {
            assert!(seen.insert(w.to_vec()));
            ControlFlow::Continue(())
        })
        .unwrap();
        assert_eq!(visited, 52);
        assert!(matches!(
            visit_ball(&t, 30, 1000, |_, _| ControlFlow::Continue(())),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn ball_evaluations_match_eval_word() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let t = GenTuple::random(7, 2, &mut rng);
        visit_ball(&t, 4, u128::MAX, |w, p| {
            let word = Word::new(w.to_vec()).unwrap();
            assert_eq!(eval_word(&t, &word).unwrap().images(), p);
            ControlFlow::Continue(())
        })
        .unwrap();
    }

    #[test]
    fn freeness_examples() {
        let id = Perm::identity(6);
        let t = pair(id.clone(), id);
        assert_eq!(freeness_defect(&t, 1).unwrap(), Dist::one(6));

        let a5 = cycle(5).unwrap();
        let t = pair(a5.clone(), a5);
        let f = freeness(&t, 2, u128::MAX).unwrap();
        assert_eq!(f.defect, Dist::one(5));
        assert_eq!(fix_trace(&eval_word(&t, &f.worst).unwrap()), Dist::one(5));
        assert!(freeness(&t, 0, 10).is_err());
    }

    proptest! {
        #[test]
        fn evaluation_is_a_homomorphism(seed: u64, a in proptest::collection::vec(prop_oneof![-2i64..=-1, 1i64..=2], 0..6),
                                        b in proptest::collection::vec(prop_oneof![-2i64..=-1, 1i64..=2], 0..6)) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let t = GenTuple::random(9, 2, &mut rng);
            let reduce = |v: &[i64]| Word::identity().concat(&Word { letters: v.iter().map(|&s| Letter::new(s.unsigned_abs() as usize - 1, s < 0)).collect() });
            let w1 = reduce(&a);
            let w2 = reduce(&b);
            let lhs = eval_word(&t, &w1.concat(&w2)).unwrap();
            let rhs = compose(&eval_word(&t, &w1).unwrap(), &eval_word(&t, &w2).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
            let inv = eval_word(&t, &w1.inverse()).unwrap();
            prop_assert_eq!(inv, eval_word(&t, &w1).unwrap().inverse());
        }
    }
}
