//! Pure memoryless strategies.

use crate::model::alphabet::Letter;

/// A pure memoryless strategy: one action per MDP state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Strategy {
    /// `choice[state]` is the chosen action letter.
    pub choice: Vec<Letter>,
}

impl Strategy {
    pub fn action(&self, state: usize) -> Letter {
        self.choice[state]
    }
}
