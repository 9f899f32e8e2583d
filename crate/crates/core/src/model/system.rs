//! Finite-state systems (Moore machines).

use crate::error::Error;
use crate::model::alphabet::{Alphabet, Letter};

/// A Moore machine: a deterministic automaton over the input alphabet plus
/// an output letter per state. Running it on an input word produces the
/// joint input/output word evaluated by the specification automata.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteStateSystem {
    pub inputs: Alphabet,
    pub outputs: Alphabet,
    pub states: Vec<String>,
    pub initial: usize,
    /// `delta[state][input letter]` is the unique successor.
    pub delta: Vec<Vec<usize>>,
    /// Output letter per state.
    pub output: Vec<Letter>,
}

impl FiniteStateSystem {
    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn output_of(&self, state: usize) -> Letter {
        self.output[state]
    }
}

/// Advances the system one step on `input`, returning the successor state
/// and the successor's output letter.
///
/// Iterating from the initial state reproduces the joint word: the output
/// at step 0 is the initial state's, and the output paired with the i-th
/// input is the one computed from the first i inputs.
pub fn system_step(
    sys: &FiniteStateSystem,
    state: usize,
    input: Letter,
) -> Result<(usize, Letter), Error> {
    if state >= sys.num_states() {
        return Err(Error::Input(format!("unknown system state {state}")));
    }
    if input.0 >= sys.inputs.len() {
        return Err(Error::Input(format!(
            "input letter {} out of range for alphabet of size {}",
            input.0,
            sys.inputs.len()
        )));
    }
    let next = sys.delta[state][input.0];
    Ok((next, sys.output[next]))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// The two-state server of the worked example: outputs ack1 in m0 and
    /// ack2 in m1, switching to m1 exactly on input (!r1, r2).
    pub(crate) fn example_server() -> FiniteStateSystem {
        let inputs = Alphabet::from_bits(vec!["r1", "r2"]);
        let outputs = Alphabet::from_bits(vec!["a1", "a2"]);
        // inputs: 0=!r1!r2 1=!r1r2 2=r1!r2 3=r1r2
        let to = |l: usize| if l == 1 { 1 } else { 0 };
        FiniteStateSystem {
            inputs,
            outputs,
            states: vec!["m0".into(), "m1".into()],
            initial: 0,
            delta: vec![(0..4).map(to).collect(), (0..4).map(to).collect()],
            output: vec![Letter(0b10), Letter(0b01)],
        }
    }

    #[test]
    fn server_switches_on_lone_second_request() {
        let sys = example_server();
        // input !r1 r2 moves to m1, whose output is !a1 a2
        let (next, out) = system_step(&sys, 0, Letter(0b01)).unwrap();
        assert_eq!(next, 1);
        assert_eq!(out, Letter(0b01));
        // input r1 (with !r2) self-loops in m0
        let (next, out) = system_step(&sys, 0, Letter(0b10)).unwrap();
        assert_eq!(next, 0);
        assert_eq!(out, Letter(0b10));
    }

    #[test]
    fn one_state_system_is_constant() {
        let sys = FiniteStateSystem {
            inputs: Alphabet::from_bits(vec!["r"]),
            outputs: Alphabet::from_bits(vec!["a"]),
            states: vec!["s".into()],
            initial: 0,
            delta: vec![vec![0, 0]],
            output: vec![Letter(1)],
        };
        for l in 0..2 {
            assert_eq!(system_step(&sys, 0, Letter(l)).unwrap(), (0, Letter(1)));
        }
    }

    #[test]
    fn bad_arguments_are_input_errors() {
        let sys = example_server();
        assert!(matches!(
            system_step(&sys, 7, Letter(0)),
            Err(Error::Input(_))
        ));
        assert!(matches!(
            system_step(&sys, 0, Letter(9)),
            Err(Error::Input(_))
        ));
    }
}
