//! Labeled Markov decision processes used as environment models.

use num::BigRational;

use crate::model::alphabet::{Alphabet, Letter};

/// A finite MDP whose states carry input letters. The environment reacts to
/// the system's output letters (the MDP actions); the labels of the visited
/// states form the input word the system reads.
///
/// Environment models have every action enabled in every state, so the
/// transition table is total. Probabilities are exact rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledMdp {
    /// Label alphabet L.
    pub inputs: Alphabet,
    /// Action alphabet A.
    pub actions: Alphabet,
    pub states: Vec<String>,
    pub initial: usize,
    pub labels: Vec<Letter>,
    /// `trans[state][action]` is a sparse distribution over successors,
    /// sorted by successor index.
    pub trans: Vec<Vec<Vec<(usize, BigRational)>>>,
}

impl LabeledMdp {
    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn successors(&self, state: usize, action: Letter) -> &[(usize, BigRational)] {
        &self.trans[state][action.0]
    }

    pub fn label(&self, state: usize) -> Letter {
        self.labels[state]
    }
}
