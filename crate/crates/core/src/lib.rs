//! Finite-level permutation constructions around sofic representations of
//! free groups.
//!
//! Everything here works with honest finite objects: permutations of
//! `{0, .., n-1}`, tuples of them, subsets (diagonal projections) and pieces of
//! permutations. Distances are exact integer counts over the degree.
//!
//! - [`perm`]: permutations, Hamming and Coxeter metrics, words, blocks.
//! - [`expansion`]: λ-expander checks, exact and sampled.
//! - [`census`]: exhaustive counts at small degree.
//! - [`convexity`]: orbit cuts, direct-sum convex combinations.
//! - [`deamplify`]: extracting a conjugator from an amplified intertwiner.
//! - [`strange`]: builders for far expander families and the
//!   small-Coxeter trivial-commutant candidate.
//! - [`evidence`]: persisted evidence and its independent re-validation.

pub mod census;
pub mod conjugacy;
pub mod convexity;
pub mod deamplify;
pub mod error;
pub mod evidence;
pub mod expansion;
pub mod limits;
pub mod perm;
pub mod rational;
pub mod rng;
pub mod strange;

pub use error::{Error, Result};
pub use limits::Limits;
pub use perm::{GenTuple, PartialPerm, Perm, Subset, Word};
pub use rational::{parse_rational, Dist, Rational};

/// Library version embedded in emitted artifacts.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
