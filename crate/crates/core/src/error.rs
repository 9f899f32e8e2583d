//! Error type shared across the library.

use thiserror::Error;

use crate::analysis::ChainStructure;

#[derive(Debug, Error)]
pub enum Error {
    /// Alphabets of two models that must agree do not.
    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),

    /// A state, letter, or action argument is out of range or disabled.
    #[error("invalid input: {0}")]
    Input(String),

    /// A chain has more than one recurrent class where exactly one is needed.
    #[error("chain is not unichain: {} recurrent classes", .0.recurrent_classes.len())]
    Multichain(ChainStructure),

    /// The MDP failed the cheap necessary unichain check (more than one
    /// bottom SCC in the full transition graph).
    #[error("MDP may be multichain: {0} bottom strongly connected components")]
    MultichainSuspect(usize),

    /// No system can satisfy the qualitative specification almost surely.
    #[error("specification is unrealizable")]
    Unrealizable,

    /// The fractional-program iteration hit its cap without converging.
    #[error("no convergence after {0} iterations")]
    NonConvergence(usize),

    /// Numerical breakdown in a solver, with diagnostics.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Two independently computed results disagree; indicates a bug.
    #[error("internal consistency failure: {0}")]
    Internal(String),
}
