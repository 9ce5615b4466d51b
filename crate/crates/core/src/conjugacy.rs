//! Conjugacy distance `d_S(x, y) = min_p Σ_i d_H(x_i, p y_i p*)`.
//!
//! Exact minimization enumerates `P_n`; the heuristic is simulated annealing
//! over conjugators with transposition moves `p ↦ τ p`, which turn each
//! `z_i = p y_i p*` into `τ z_i τ` and change it on at most four points.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::{for_each_perm_with_first, GenTuple, Perm};
use crate::rational::Dist;
use crate::rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SearchMode {
    Exact,
    Heuristic,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Conjugacy {
    /// `Σ_i d_H(x_i, p y_i p*)` at the witness, over denominator `n`.
    pub value: Dist,
    pub witness: Perm,
    /// `Exact` means `value` is the true minimum; `Heuristic` means an upper bound.
    pub mode: SearchMode,
}

/// Unnormalized `Σ_i |{a : x_i(a) ≠ p y_i p*(a)}|`.
pub fn conjugation_cost(x: &GenTuple, y: &GenTuple, p: &Perm) -> Result<u64> {
    x.check_compatible(y)?;
    Error::mismatch(x.degree(), p.degree())?;
    Ok(cost_of(x, y, p.images()))
}

fn cost_of(x: &GenTuple, y: &GenTuple, p: &[usize]) -> u64 {
    let mut total = 0u64;
    for (xi, yi) in x.perms().iter().zip(y.perms()) {
        let (xi, yi) = (xi.images(), yi.images());
        // p y p*(p(a)) = p(y(a)), compared with x(p(a))
        for a in 0..p.len() {
            if xi[p[a]] != p[yi[a]] {
                total += 1;
            }
        }
    }
    total
}

/// True minimum over all of `P_n`; the witness is the first minimizer in
/// lexicographic order.
pub fn exact(x: &GenTuple, y: &GenTuple, limit: usize) -> Result<Conjugacy> {
    x.check_compatible(y)?;
    let n = x.degree();
    if n > limit {
        return Err(Error::OverLimit { what: "exact conjugacy distance", n, limit });
    }
    let best = (0..n)
        .into_par_iter()
        .map(|first| {
            let mut best: Option<(u64, Vec<usize>)> = None;
            for_each_perm_with_first(n, first, |p| {
                let c = cost_of(x, y, p);
                if best.as_ref().map_or(true, |(b, _)| c < *b) {
                    best = Some((c, p.to_vec()));
                }
            });
            best.expect("nonempty range")
        })
        .collect::<Vec<_>>()
        .into_iter()
        .reduce(|a, b| if b.0 < a.0 { b } else { a })
        .expect("n >= 1");
    Ok(Conjugacy {
        value: Dist::new(best.0, n as u64),
        witness: Perm::from_images(best.1)?,
        mode: SearchMode::Exact,
    })
}

struct AnnealState<'a> {
    x: &'a GenTuple,
    p: Vec<usize>,
    pinv: Vec<usize>,
    z: Vec<Vec<usize>>,
    zinv: Vec<Vec<usize>>,
    cost: u64,
}

impl<'a> AnnealState<'a> {
    fn new(x: &'a GenTuple, y: &GenTuple, p: Perm) -> AnnealState<'a> {
        let z: Vec<Perm> = y.perms().iter().map(|yi| yi.conjugate_by(&p).expect("same degree")).collect();
        let cost = z
            .iter()
            .zip(x.perms())
            .map(|(zi, xi)| zi.images().iter().zip(xi.images()).filter(|(a, b)| a != b).count() as u64)
            .sum();
        AnnealState {
            x,
            pinv: p.inverse().into_images(),
            p: p.into_images(),
            zinv: z.iter().map(|zi| zi.inverse().into_images()).collect(),
            z: z.into_iter().map(Perm::into_images).collect(),
            cost,
        }
    }

    /// Points where some `z_i` changes under `z ↦ τ z τ`, `τ = (α β)`, with
    /// their new images.
    fn swap_effect(&self, alpha: usize, beta: usize, out: &mut Vec<(usize, usize, usize)>) -> i64 {
        out.clear();
        let tau = |v: usize| if v == alpha { beta } else if v == beta { alpha } else { v };
        let mut delta = 0i64;
        for (i, (z, zinv)) in self.z.iter().zip(&self.zinv).enumerate() {
            let xi = self.x.perm(i).images();
            let mut pts = [alpha, beta, zinv[alpha], zinv[beta]];
            pts.sort_unstable();
            for (idx, &a) in pts.iter().enumerate() {
                if idx > 0 && pts[idx - 1] == a {
                    continue;
                }
                let new = tau(z[tau(a)]);
                delta += (xi[a] != new) as i64 - (xi[a] != z[a]) as i64;
                out.push((i, a, new));
            }
        }
        delta
    }

    fn apply(&mut self, alpha: usize, beta: usize, changes: &[(usize, usize, usize)], delta: i64) {
        for &(i, a, new) in changes {
            self.z[i][a] = new;
        }
        for &(i, a, _) in changes {
            let v = self.z[i][a];
            self.zinv[i][v] = a;
        }
        let (u, v) = (self.pinv[alpha], self.pinv[beta]);
        self.p[u] = beta;
        self.p[v] = alpha;
        self.pinv.swap(alpha, beta);
        self.cost = (self.cost as i64 + delta) as u64;
    }
}

/// Simulated annealing from the identity conjugator, cooling geometrically from
/// temperature 1 to 0.1; returns the best conjugator visited. Stops early at cost 0.
pub fn anneal(x: &GenTuple, y: &GenTuple, steps: usize, seed: u64) -> Result<Conjugacy> {
    anneal_with(x, y, steps, seed, 1.0, 0.1)
}

fn anneal_with(x: &GenTuple, y: &GenTuple, steps: usize, seed: u64, t0: f64, t1: f64) -> Result<Conjugacy> {
    x.check_compatible(y)?;
    let n = x.degree();
    let mut state = AnnealState::new(x, y, Perm::identity(n));
    let mut best_cost = state.cost;
    let mut best_p = state.p.clone();
    if n >= 2 && best_cost > 0 {
        let mut rng = rng::stream(seed, 0);
        let ratio = (t1 / t0).powf(1.0 / steps.max(1) as f64);
        let mut temp = t0;
        let mut changes = Vec::with_capacity(4 * x.len());
        for _ in 0..steps {
            let alpha = rng.gen_range(0..n);
            let mut beta = rng.gen_range(0..n - 1);
            if beta >= alpha {
                beta += 1;
            }
            let delta = state.swap_effect(alpha, beta, &mut changes);
            if delta <= 0 || rng.gen::<f64>() < (-(delta as f64) / temp).exp() {
                state.apply(alpha, beta, &changes, delta);
                if state.cost < best_cost {
                    best_cost = state.cost;
                    best_p.clone_from(&state.p);
                    if best_cost == 0 {
                        break;
                    }
                }
            }
            temp *= ratio;
        }
    }
    Ok(Conjugacy {
        value: Dist::new(best_cost, n as u64),
        witness: Perm::from_images(best_p)?,
        mode: SearchMode::Heuristic,
    })
}

/// Annealing, replaced by the exact minimum when `n ≤ exact_limit`.
pub fn search(x: &GenTuple, y: &GenTuple, steps: usize, seed: u64, exact_limit: usize) -> Result<Conjugacy> {
    x.check_compatible(y)?;
    if x.degree() <= exact_limit {
        return exact(x, y, exact_limit);
    }
    anneal(x, y, steps, seed)
}
