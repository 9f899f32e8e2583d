//! Synchronous product constructions: the satisfaction and value chains for
//! a fixed system, the synthesis MDP, almost-sure safety pruning, strategy
//! application, and strategy-to-system extraction.

mod chain;
mod compose;
mod synthesis;

pub use chain::{
    build_satisfaction_chain, build_value_chain, unsafe_states, CostMarkovChain,
};
pub use compose::{compose_cost_automata, compose_environments};
pub use synthesis::{
    build_synthesis_mdp, extract_system, prune_unsafe, strategy_chain, SynthesisMdp,
    SystemExtraction,
};
