//! Deterministic safety automata with two per-transition cost functions.

use crate::model::alphabet::{JointAlphabet, Letter};

/// A deterministic automaton over a joint input/output alphabet with a set
/// of safe states and two nonnegative integer cost functions on transitions.
///
/// A run is accepting while it stays inside the safe set. The two cost
/// functions feed the long-run ratio objective.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostAutomaton {
    pub alphabet: JointAlphabet,
    pub states: Vec<String>,
    pub initial: usize,
    /// `delta[state][joint letter]` is the unique successor.
    pub delta: Vec<Vec<usize>>,
    pub safe: Vec<bool>,
    pub cost1: Vec<Vec<u64>>,
    pub cost2: Vec<Vec<u64>>,
}

impl CostAutomaton {
    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn step(&self, state: usize, letter: Letter) -> usize {
        self.delta[state][letter.0]
    }

    pub fn costs(&self, state: usize, letter: Letter) -> (u64, u64) {
        (self.cost1[state][letter.0], self.cost2[state][letter.0])
    }

    /// True iff every transition leaving an unsafe state stays unsafe.
    pub fn unsafe_closed(&self) -> bool {
        self.delta.iter().enumerate().all(|(q, row)| {
            self.safe[q] || row.iter().all(|&q2| !self.safe[q2])
        })
    }
}

/// Closes the unsafe set under the transition function by redirecting every
/// transition that leaves an unsafe state to a fresh rejecting sink.
///
/// The returned automaton accepts the same language. If the input is already
/// closed it is returned unchanged. Redirected transitions keep their
/// original costs; the sink's self-loops cost (0, 0).
pub fn normalize_automaton(aut: &CostAutomaton) -> CostAutomaton {
    if aut.unsafe_closed() {
        return aut.clone();
    }
    let mut out = aut.clone();
    let sink = out.states.len();
    let mut sink_name = String::from("_bot");
    while out.states.contains(&sink_name) {
        sink_name.push('_');
    }
    out.states.push(sink_name);
    out.safe.push(false);
    let width = aut.alphabet.len();
    out.delta.push(vec![sink; width]);
    out.cost1.push(vec![0; width]);
    out.cost2.push(vec![0; width]);
    for q in 0..sink {
        if out.safe[q] {
            continue;
        }
        for letter in 0..width {
            if out.safe[out.delta[q][letter]] {
                out.delta[q][letter] = sink;
            }
        }
    }
    out
}
