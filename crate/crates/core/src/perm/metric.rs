use super::{PartialPerm, Perm};
use crate::error::{Error, Result};
use crate::rational::Dist;

#[inline]
pub(crate) fn mismatch_count(a: &[usize], b: &[usize]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

/// `|{i : a(b(i)) != b(a(i))}|`, the unnormalized `d_H(ab, ba)`.
#[inline]
pub(crate) fn commutator_count(a: &[usize], b: &[usize]) -> usize {
    (0..a.len()).filter(|&i| a[b[i]] != b[a[i]]).count()
}

#[inline]
pub(crate) fn moved_count(p: &[usize]) -> usize {
    p.iter().enumerate().filter(|&(i, &v)| i != v).count()
}

/// Normalized Hamming distance `|{i : p(i) != q(i)}| / n`.
pub fn hamming(p: &Perm, q: &Perm) -> Result<Dist> {
    Error::mismatch(p.degree(), q.degree())?;
    Ok(Dist::new(
        mismatch_count(p.images(), q.images()) as u64,
        p.degree() as u64,
    ))
}

/// Hamming distance on pieces of permutations: the fraction of points whose
/// image differs, where "undefined" counts as a distinct image. Agrees with
/// [`hamming`] on total maps.
pub fn hamming_rows(x: &PartialPerm, y: &PartialPerm) -> Result<Dist> {
    Error::mismatch(x.degree(), y.degree())?;
    let diff = x.images().iter().zip(y.images()).filter(|(a, b)| a != b).count();
    Ok(Dist::new(diff as u64, x.degree() as u64))
}

/// `|Fix(p)| / n`, which equals `1 - hamming(p, id)`.
pub fn fix_trace(p: &Perm) -> Dist {
    Dist::new(p.fixed_points() as u64, p.degree() as u64)
}

/// Normalized inversion count `|{i<j : p(i)>p(j)}| · 2/(n(n-1))`; degree 1 gives 0.
pub fn coxeter(p: &Perm) -> Dist {
    let n = p.degree() as u64;
    if n < 2 {
        return Dist::zero(1);
    }
    Dist::new(inversions(p.images()), n * (n - 1) / 2)
}

/// Exact inversion count of a sequence of distinct values.
///
/// Natural merge sort: maximal ascending runs are kept, maximal descending
/// runs are reversed (contributing `len·(len-1)/2` each), then runs are merged
/// pairwise while counting cross inversions. `O(n log r)` for `r` runs.
pub fn inversions(values: &[usize]) -> u64 {
    let n = values.len();
    if n < 2 {
        return 0;
    }
    let mut buf: Vec<usize> = values.to_vec();
    let mut total = 0u64;
    let mut bounds = vec![0usize];
    let mut i = 0;
    while i < n {
        let start = i;
        i += 1;
        if i < n && buf[i] < buf[i - 1] {
            while i < n && buf[i] < buf[i - 1] {
                i += 1;
            }
            let len = (i - start) as u64;
            total += len * (len - 1) / 2;
            buf[start..i].reverse();
        } else {
            while i < n && buf[i] > buf[i - 1] {
                i += 1;
            }
        }
        bounds.push(i);
    }

    let mut scratch = vec![0usize; n];
    while bounds.len() > 2 {
        let mut merged = vec![0usize];
        let mut r = 0;
        while r + 1 < bounds.len() {
            let lo = bounds[r];
            let mid = bounds[r + 1];
            if r + 2 < bounds.len() {
                let hi = bounds[r + 2];
                total += merge_count(&buf[lo..mid], &buf[mid..hi], &mut scratch[lo..hi]);
                merged.push(hi);
                r += 2;
            } else {
                scratch[lo..mid].copy_from_slice(&buf[lo..mid]);
                merged.push(mid);
                r += 1;
            }
        }
        std::mem::swap(&mut buf, &mut scratch);
        bounds = merged;
    }
    total
}

fn merge_count(left: &[usize], right: &[usize], out: &mut [usize]) -> u64 {
    let (mut a, mut b, mut k) = (0, 0, 0);
    let mut inv = 0u64;
    while a < left.len() && b < right.len() {
        if left[a] < right[b] {
            out[k] = left[a];
            a += 1;
        } else {
            out[k] = right[b];
            b += 1;
            inv += (left.len() - a) as u64;
        }
        k += 1;
    }
    out[k..k + left.len() - a].copy_from_slice(&left[a..]);
    k += left.len() - a;
    out[k..].copy_from_slice(&right[b..]);
    inv
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::{compose, cycle, direct_sum, tensor_id, LexPerms};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn brute_inversions(v: &[usize]) -> u64 {
        let mut c = 0;
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                if v[i] > v[j] {
                    c += 1;
                }
            }
        }
        c
    }

    #[test]
    fn hamming_examples() {
        let a4 = cycle(4).unwrap();
        assert_eq!(hamming(&a4, &a4).unwrap(), Dist::zero(4));
        assert_eq!(hamming(&a4, &Perm::identity(4)).unwrap(), Dist::one(4));
        let a4sq = compose(&a4, &a4).unwrap();
        assert_eq!(hamming(&a4, &a4sq).unwrap(), Dist::one(4));
        assert!(hamming(&a4, &Perm::identity(5)).is_err());
    }

    #[test]
    fn hamming_rows_examples() {
        let id = PartialPerm::from(&Perm::identity(4));
        assert_eq!(hamming_rows(&id, &id).unwrap(), Dist::zero(4));
        assert_eq!(
            hamming_rows(&PartialPerm::empty(4), &id).unwrap(),
            Dist::one(4)
        );
    }

    #[test]
    fn fix_trace_examples() {
        assert_eq!(fix_trace(&Perm::identity(6)), Dist::one(6));
        assert_eq!(fix_trace(&cycle(6).unwrap()), Dist::zero(6));
        let p = direct_sum(&Perm::identity(1), &cycle(3).unwrap());
        assert_eq!(fix_trace(&p), Dist::new(1, 4));
        let q = direct_sum(&cycle(3).unwrap(), &Perm::identity(3));
        assert_eq!(fix_trace(&q), Dist::new(1, 2));
    }

    #[test]
    fn coxeter_examples() {
        assert_eq!(coxeter(&Perm::identity(9)), Dist::zero(1));
        assert_eq!(coxeter(&Perm::identity(1)), Dist::zero(1));
        for n in 2..40 {
            assert_eq!(coxeter(&Perm::reversal(n)), Dist::one(1));
            assert_eq!(coxeter(&cycle(n).unwrap()), Dist::new(2, n as u64));
        }
    }

    #[test]
    fn inversions_match_brute_force_exhaustively() {
        for n in 1..=6 {
            for p in LexPerms::new(n) {
                assert_eq!(inversions(p.images()), brute_inversions(p.images()));
            }
        }
    }

    #[test]
    fn metric_axioms_exhaustive_small() {
        for n in 1..=4 {
            let all: Vec<Perm> = LexPerms::new(n).collect();
            for x in &all {
                for y in &all {
                    let dxy = hamming(x, y).unwrap();
                    assert_eq!(dxy, hamming(y, x).unwrap());
                    assert_eq!(dxy.is_zero(), x == y);
                    if x != y {
                        assert!(dxy >= Dist::new(2, n as u64));
                    }
                    for z in &all {
                        let lhs = hamming(x, z).unwrap().numer();
                        assert!(lhs <= dxy.numer() + hamming(y, z).unwrap().numer());
                    }
                }
            }
        }
    }

    fn perm_strategy(max_n: usize) -> impl Strategy<Value = (Perm, Perm, Perm)> {
        (1..=max_n, any::<u64>()).prop_map(|(n, seed)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (
                Perm::random(n, &mut rng),
                Perm::random(n, &mut rng),
                Perm::random(n, &mut rng),
            )
        })
    }

    proptest! {
        #[test]
        fn triangle_and_bi_invariance((x, y, r) in perm_strategy(40)) {
            let d = hamming(&x, &y).unwrap();
            prop_assert_eq!(hamming(&compose(&r, &x).unwrap(), &compose(&r, &y).unwrap()).unwrap(), d);
            prop_assert_eq!(hamming(&compose(&x, &r).unwrap(), &compose(&y, &r).unwrap()).unwrap(), d);
            let via = hamming(&x, &r).unwrap().numer() + hamming(&r, &y).unwrap().numer();
            prop_assert!(d.numer() <= via);
            prop_assert_eq!(fix_trace(&x), hamming(&x, &Perm::identity(x.degree())).unwrap().complement());
        }

        #[test]
        fn amplification_and_sums_preserve_distance((x, y, z) in perm_strategy(12), r in 1usize..5) {
            let d = hamming(&x, &y).unwrap();
            prop_assert_eq!(hamming(&tensor_id(&x, r).unwrap(), &tensor_id(&y, r).unwrap()).unwrap(), d);
            let left = hamming(&direct_sum(&z, &x), &direct_sum(&z, &y)).unwrap();
            let n1 = z.degree() as u64;
            let n2 = x.degree() as u64;
            prop_assert_eq!(left, Dist::new(d.numer() * n2 / d.denom(), n1 + n2));
        }

        #[test]
        fn coxeter_is_exact_and_bounded((x, _, _) in perm_strategy(300)) {
            prop_assert_eq!(inversions(x.images()), brute_inversions(x.images()));
            let c = coxeter(&x);
            prop_assert!(c <= Dist::one(1));
        }

        #[test]
        fn hamming_rows_contracts_under_pieces(n in 1usize..20, seed: u64) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x = PartialPerm::random(n, &mut rng);
            let y = PartialPerm::random(n, &mut rng);
            let q = PartialPerm::random(n, &mut rng);
            let d = hamming_rows(&x, &y).unwrap();
            prop_assert!(hamming_rows(&q.compose(&x).unwrap(), &q.compose(&y).unwrap()).unwrap() <= d);
            prop_assert!(hamming_rows(&x.compose(&q).unwrap(), &y.compose(&q).unwrap()).unwrap() <= d);
            let r = PartialPerm::from(&Perm::random(n, &mut rng));
            prop_assert_eq!(hamming_rows(&r.compose(&x).unwrap(), &r.compose(&y).unwrap()).unwrap(), d);
            prop_assert_eq!(hamming_rows(&x.compose(&r).unwrap(), &y.compose(&r).unwrap()).unwrap(), d);
        }
    }

    #[test]
    fn hamming_rows_equals_hamming_on_total_maps() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let p = Perm::random(13, &mut rng);
            let q = Perm::random(13, &mut rng);
            assert_eq!(
                hamming_rows(&(&p).into(), &(&q).into()).unwrap(),
                hamming(&p, &q).unwrap()
            );
        }
    }
}
