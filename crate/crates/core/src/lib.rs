//! A workbench for probabilistic propositional logic.
//!
//! The crate computes probabilities of classical formulas under stochastic
//! valuations, decides Hailperin entailment and pq-entailment by exact linear
//! feasibility, decides validity of PPL formulas by reduction to universal
//! sentences over real closed ordered fields, and checks Hilbert-style
//! derivations in the PPL calculus.
//!
//! All arithmetic is exact ([`Rational`] is an arbitrary-precision fraction).
//!
//! Module map:
//!
//! * [`prop`]: classical syntax, truth tables, `phi(A, U)` and model-enumeration DNF.
//! * [`dist`]: finite-carrier stochastic valuations, marginals, `Prob_V`, Adams checks.
//! * [`linear`]: Fourier–Motzkin feasibility with strict bounds and witness recovery.
//! * [`pq`]: Hailperin entailment and pq-entailment.
//! * [`ppl`]: PPL terms, formulas, satisfaction, the Q-formula and the translation.
//! * [`rcof`]: the universal-sentence decider, SMT-LIB bridge and the `a_ppl` procedure.
//! * [`calculus`]: proof checking for TAUT / RR / MP and the admissible rules.
//! * [`pool`], [`batch`], [`exec`]: formula pools and data-parallel suites.

pub mod batch;
pub mod calculus;
pub mod dist;
mod error;
pub mod exec;
pub mod linear;
pub mod parse;
pub mod pool;
pub mod ppl;
pub mod pq;
pub mod prop;
pub mod rational;
pub mod rcof;
pub mod simplex;

pub use error::{Error, Result};
pub use rational::Rational;
