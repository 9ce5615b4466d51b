//! Seeded fixtures shared by the criterion benches.

use sofic_core::perm::cycle;
use sofic_core::{rng, GenTuple, Perm};

/// A uniformly random permutation of degree `n`, fixed by `seed`.
pub fn random_perm(n: usize, seed: u64) -> Perm {
    Perm::random(n, &mut rng::stream(seed, n as u64))
}

/// `(a_n, c)` with `c` uniformly random.
pub fn cycle_pair(n: usize, seed: u64) -> GenTuple {
    GenTuple::new(vec![cycle(n).expect("n >= 1"), random_perm(n, seed)]).expect("same degree")
}

/// `x`, a conjugate `q x q*` and an amplified intertwiner `u = q ⊗ 1_r` between them.
pub fn intertwined(n: usize, r: usize, seed: u64) -> (GenTuple, GenTuple, Perm) {
    let x = cycle_pair(n, seed);
    let q = random_perm(n, seed.wrapping_add(1));
    let y = x.conjugate_by(&q).expect("same degree");
    let u = sofic_core::perm::tensor_id(&q, r).expect("r >= 1");
    (x, y, u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use sofic_core::deamplify::intertwiner_defect;

    #[test]
    fn fixtures_are_consistent() {
        let (x, y, u) = intertwined(8, 3, 1);
        assert!(intertwiner_defect(&x, &y, &u).unwrap().is_zero());
        assert_eq!(random_perm(10, 4), random_perm(10, 4));
    }
}
