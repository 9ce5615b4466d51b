use rayon::prelude::*;

use super::Perm;

/// Rearranges `xs` into the next permutation in lexicographic order.
/// Returns `false` (leaving `xs` sorted ascending) after the last one.
pub fn next_permutation(xs: &mut [usize]) -> bool {
    let n = xs.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && xs[i - 1] >= xs[i] {
        i -= 1;
    }
    if i == 0 {
        xs.reverse();
        return false;
    }
    let mut j = n - 1;
    while xs[j] <= xs[i - 1] {
        j -= 1;
    }
    xs.swap(i - 1, j);
    xs[i..].reverse();
    true
}

pub fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

/// All permutations of degree `n` in lexicographic image order.
pub struct LexPerms {
    current: Vec<usize>,
    done: bool,
}

impl LexPerms {
    pub fn new(n: usize) -> LexPerms {
        LexPerms { current: (0..n).collect(), done: n == 0 }
    }
}

impl Iterator for LexPerms {
    type Item = Perm;

    fn next(&mut self) -> Option<Perm> {
        if self.done {
            return None;
        }
        let out = Perm::from_images_unchecked(self.current.clone());
        self.done = !next_permutation(&mut self.current);
        Some(out)
    }
}

/// Calls `f` on the image array of every permutation of degree `n`, in
/// lexicographic order, without allocating per permutation.
pub fn for_each_perm<F: FnMut(&[usize])>(n: usize, mut f: F) {
    if n == 0 {
        return;
    }
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        f(&cur);
        if !next_permutation(&mut cur) {
            break;
        }
    }
}

/// Permutations whose first image is `first`, in lexicographic order.
pub(crate) fn for_each_perm_with_first<F: FnMut(&[usize])>(n: usize, first: usize, mut f: F) {
    let mut cur = Vec::with_capacity(n);
    cur.push(first);
    cur.extend((0..n).filter(|&v| v != first));
    loop {
        f(&cur);
        if !next_permutation(&mut cur[1..]) {
            break;
        }
    }
}

/// Counts permutations of degree `n` satisfying `pred`. The enumeration is
/// split into `n` disjoint ranges by first image; the sum does not depend on
/// scheduling.
pub fn par_count_perms<F>(n: usize, pred: F) -> u64
where
    F: Fn(&[usize]) -> bool + Sync,
{
    if n == 0 {
        return 0;
    }
    (0..n)
        .into_par_iter()
        .map(|first| {
            let mut count = 0u64;
            for_each_perm_with_first(n, first, |p| {
                if pred(p) {
                    count += 1;
                }
            });
            count
        })
        .sum()
}

/// Collects, in lexicographic order, `g(p)` for every permutation where it is `Some`.
pub(crate) fn par_filter_map_perms<T, G>(n: usize, g: G) -> Vec<T>
where
    T: Send,
    G: Fn(&[usize]) -> Option<T> + Sync,
{
    if n == 0 {
        return Vec::new();
    }
    let chunks: Vec<Vec<T>> = (0..n)
        .into_par_iter()
        .map(|first| {
            let mut out = Vec::new();
            for_each_perm_with_first(n, first, |p| {
                if let Some(v) = g(p) {
                    out.push(v);
                }
            });
            out
        })
        .collect();
    chunks.into_iter().flatten().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lex_order_and_count() {
        let all: Vec<Perm> = LexPerms::new(4).collect();
        assert_eq!(all.len(), 24);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(all[0], Perm::identity(4));
        assert_eq!(all[23], Perm::reversal(4));
    }

    #[test]
    fn partitioned_count_matches_serial() {
        let mut serial = 0;
        for_each_perm(6, |p| {
            if p[0] < p[5] {
                serial += 1;
            }
        });
        assert_eq!(par_count_perms(6, |p| p[0] < p[5]), serial);
        assert_eq!(par_count_perms(7, |_| true) as u128, factorial(7));
    }

    #[test]
    fn filter_map_keeps_lex_order() {
        let fixed: Vec<Vec<usize>> = par_filter_map_perms(5, |p| {
            (p.iter().enumerate().filter(|&(i, &v)| i == v).count() == 3).then(|| p.to_vec())
        });
        assert_eq!(fixed.len(), 10);
        assert!(fixed.windows(2).all(|w| w[0] < w[1]));
    }
}
