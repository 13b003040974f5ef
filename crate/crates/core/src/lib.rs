//! Exact disproportionate division of the cake `[0,1]`.
//!
//! Given `n` non-atomic probability measures with piecewise-constant densities
//! and rational demands `α₁, …, αₙ` summing to 1, [`solver::solve`] returns a
//! partition of `[0,1]` in which every agent `i` receives a piece set of
//! `μᵢ`-mass at least `αᵢ`, using at most `3n − 4` cuts. All arithmetic is
//! over arbitrary-precision rationals, so every equality the construction
//! branches on is decided exactly.
//!
//! Besides the solver the crate carries:
//! - [`baseline`]: the moving-knife fair division and the common-denominator
//!   reduction;
//! - [`pair`]: the two-agent circle lemma behind the two-cut base case;
//! - [`instances`]: lower-bound and random instance generators plus a grid
//!   brute-force oracle for minimal cut counts;
//! - [`conjecture`]: an exact per-instance decision procedure for the
//!   two-interval circle partition conjecture.

pub mod baseline;
pub mod conjecture;
pub mod division;
pub mod error;
pub mod instances;
pub mod measure;
pub mod pair;
pub mod rational;
pub mod solver;

pub use division::{cut_count_bound, verify, Division, Instance, VerificationReport};
pub use error::{Error, Result};
pub use measure::{crossings, CircleArc, Crossing, Measure};
pub use rational::Rational;
