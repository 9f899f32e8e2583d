//! Synthesis and analysis of finite-state reactive systems that satisfy a
//! safety specification almost surely and minimize the expected long-run
//! ratio of two costs under a probabilistic environment.
//!
//! The pipeline: specifications are deterministic automata with two cost
//! functions over a joint input/output alphabet; the environment is a
//! labeled MDP over the input alphabet. Product constructions reduce both
//! checking a given system and synthesizing an optimal one to long-run ratio
//! analysis of Markov chains and MDPs; the MDP optimization runs as a linear
//! fractional program solved by a sequence of linear programs. A seeded
//! simulator cross-validates every analytic value.

pub mod analysis;
pub mod error;
pub mod lfp;
pub mod lp;
pub mod model;
pub mod product;
pub mod sim;

pub use error::Error;
