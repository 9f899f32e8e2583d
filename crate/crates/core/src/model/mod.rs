//! Domain types: alphabets, automata with cost functions, environment MDPs,
//! finite-state systems, strategies, and the extended value domain.
//!
//! All types are immutable after construction and safe to share across
//! threads.

mod alphabet;
mod automaton;
mod mdp;
mod strategy;
mod system;
mod validate;
mod value;

pub use alphabet::{Alphabet, JointAlphabet, Letter};
pub use automaton::{normalize_automaton, CostAutomaton};
pub use mdp::LabeledMdp;
pub use strategy::Strategy;
pub use system::{system_step, FiniteStateSystem};
pub use validate::{validate_automaton, validate_mdp, validate_system, Violation};
pub use value::{finite_ratio, rational_to_f64, ExtendedValue};
