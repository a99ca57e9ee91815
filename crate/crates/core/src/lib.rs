//! Exact and certified verification of the sieve constants behind the
//! `H_m << exp(3.815 m)` bound on gaps between primes.
//!
//! The pipeline is: the discard region E(η) as an exact polytope, a certified
//! enclosure of the density loss `c1(η) = 6 ∫_E f`, the exponent of
//! distribution `θ0(η)`, and the final exponent `2 / (θ0 (1 - c1))`, together
//! with the exact η-threshold ledger and the combinatorial lemmas.

pub mod cli;
pub mod combinatorics;
pub mod constants;
pub mod error;
pub mod integrator;
pub mod ledger;
pub mod polytope;
pub mod rational;

pub use error::{Error, Result};
pub use rational::Rational;
