//! Structural validation. Violations are data, not failures: callers decide
//! whether a non-empty list is fatal.

use std::fmt;

use num::{One, Zero};

use crate::model::automaton::CostAutomaton;
use crate::model::mdp::LabeledMdp;
use crate::model::system::FiniteStateSystem;

/// A broken invariant together with the offending element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub invariant: &'static str,
    pub detail: String,
}

impl Violation {
    fn new(invariant: &'static str, detail: impl Into<String>) -> Self {
        Violation {
            invariant,
            detail: detail.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.invariant, self.detail)
    }
}

pub fn validate_automaton(aut: &CostAutomaton) -> Vec<Violation> {
    let mut out = Vec::new();
    let n = aut.states.len();
    let width = aut.alphabet.len();
    if aut.initial >= n {
        out.push(Violation::new("initial state", format!("index {} out of range", aut.initial)));
    }
    for (name, table) in [("delta", &aut.delta)] {
        if table.len() != n {
            out.push(Violation::new("transition totality", format!("{name} has {} rows, expected {n}", table.len())));
        }
    }
    if aut.safe.len() != n {
        out.push(Violation::new("safe set", format!("{} flags for {n} states", aut.safe.len())));
    }
    for (q, row) in aut.delta.iter().enumerate() {
        if row.len() != width {
            out.push(Violation::new(
                "transition totality",
                format!("state {} has {} transitions, expected {width}", aut.states[q], row.len()),
            ));
            continue;
        }
        for (letter, &succ) in row.iter().enumerate() {
            if succ >= n {
                out.push(Violation::new(
                    "transition target",
                    format!("state {}, letter {letter}: target {succ} out of range", aut.states[q]),
                ));
            }
        }
    }
    for (name, costs) in [("cost1", &aut.cost1), ("cost2", &aut.cost2)] {
        if costs.len() != n || costs.iter().any(|row| row.len() != width) {
            out.push(Violation::new("cost totality", format!("{name} table shape mismatch")));
        }
    }
    if out.is_empty() && !aut.unsafe_closed() {
        out.push(Violation::new(
            "unsafe closure",
            "a transition leaves the unsafe set; run normalization first".to_string(),
        ));
    }
    out
}

pub fn validate_mdp(mdp: &LabeledMdp) -> Vec<Violation> {
    let mut out = Vec::new();
    let n = mdp.states.len();
    let num_actions = mdp.actions.len();
    if mdp.initial >= n {
        out.push(Violation::new("initial state", format!("index {} out of range", mdp.initial)));
    }
    if mdp.labels.len() != n {
        out.push(Violation::new("labeling totality", format!("{} labels for {n} states", mdp.labels.len())));
    }
    for (s, &label) in mdp.labels.iter().enumerate() {
        if !mdp.inputs.contains(label) {
            out.push(Violation::new(
                "label range",
                format!("state {}: label {} out of range", mdp.states[s], label.0),
            ));
        }
    }
    if mdp.trans.len() != n {
        out.push(Violation::new("transition totality", format!("{} rows for {n} states", mdp.trans.len())));
        return out;
    }
    for (s, row) in mdp.trans.iter().enumerate() {
        if row.len() != num_actions {
            out.push(Violation::new(
                "enabled actions",
                format!("state {}: {} actions, environment models enable all {num_actions}", mdp.states[s], row.len()),
            ));
            continue;
        }
        for (a, dist) in row.iter().enumerate() {
            if dist.is_empty() {
                out.push(Violation::new(
                    "enabled actions",
                    format!("state {}, action {}: empty distribution", mdp.states[s], mdp.actions.letter_names()[a]),
                ));
                continue;
            }
            let mass: num::BigRational = dist.iter().map(|(_, p)| p.clone()).sum();
            if !mass.is_one() {
                out.push(Violation::new(
                    "distribution mass",
                    format!("state {}, action {}: mass {} != 1", mdp.states[s], mdp.actions.letter_names()[a], mass),
                ));
            }
            let mut seen_labels = Vec::new();
            for (succ, p) in dist {
                if *succ >= n {
                    out.push(Violation::new(
                        "transition target",
                        format!("state {}, action {a}: target {succ} out of range", mdp.states[s]),
                    ));
                    continue;
                }
                if p.is_zero() || p < &num::BigRational::zero() {
                    out.push(Violation::new(
                        "probability positivity",
                        format!("state {}, action {a}: successor {} with probability {p}", mdp.states[s], mdp.states[*succ]),
                    ));
                }
                let label = mdp.labels.get(*succ).copied();
                if let Some(label) = label {
                    if seen_labels.contains(&label) {
                        out.push(Violation::new(
                            "label-determinism",
                            format!(
                                "state {}, action {}: two positive-probability successors share label {}",
                                mdp.states[s],
                                mdp.actions.letter_names()[a],
                                mdp.inputs.letter_name(label)
                            ),
                        ));
                    }
                    seen_labels.push(label);
                }
            }
        }
    }
    out
}

pub fn validate_system(sys: &FiniteStateSystem) -> Vec<Violation> {
    let mut out = Vec::new();
    let n = sys.states.len();
    if sys.initial >= n {
        out.push(Violation::new("initial state", format!("index {} out of range", sys.initial)));
    }
    if sys.output.len() != n {
        out.push(Violation::new("output totality", format!("{} outputs for {n} states", sys.output.len())));
    }
    for (s, &o) in sys.output.iter().enumerate() {
        if !sys.outputs.contains(o) {
            out.push(Violation::new("output range", format!("state {}: output {} out of range", sys.states[s], o.0)));
        }
    }
    if sys.delta.len() != n {
        out.push(Violation::new("transition totality", format!("{} rows for {n} states", sys.delta.len())));
        return out;
    }
    for (s, row) in sys.delta.iter().enumerate() {
        if row.len() != sys.inputs.len() {
            out.push(Violation::new(
                "transition totality",
                format!("state {}: {} transitions for {} input letters", sys.states[s], row.len(), sys.inputs.len()),
            ));
        }
        for &succ in row {
            if succ >= n {
                out.push(Violation::new("transition target", format!("state {}: target {succ} out of range", sys.states[s])));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::alphabet::{Alphabet, Letter};
    use num::BigRational;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn tiny_mdp() -> LabeledMdp {
        LabeledMdp {
            inputs: Alphabet::from_bits(vec!["r"]),
            actions: Alphabet::from_bits(vec!["a"]),
            states: vec!["n".into(), "y".into()],
            initial: 0,
            labels: vec![Letter(0), Letter(1)],
            trans: vec![
                vec![
                    vec![(0, rat(1, 2)), (1, rat(1, 2))],
                    vec![(0, rat(1, 2)), (1, rat(1, 2))],
                ],
                vec![
                    vec![(0, rat(1, 2)), (1, rat(1, 2))],
                    vec![(0, rat(1, 2)), (1, rat(1, 2))],
                ],
            ],
        }
    }

    #[test]
    fn well_formed_mdp_passes() {
        assert!(validate_mdp(&tiny_mdp()).is_empty());
    }

    #[test]
    fn short_mass_is_reported() {
        let mut mdp = tiny_mdp();
        mdp.trans[0][0] = vec![(0, rat(9, 10))];
        let violations = validate_mdp(&mdp);
        assert!(violations.iter().any(|v| v.invariant == "distribution mass"));
    }

    #[test]
    fn equal_labels_break_determinism() {
        let mut mdp = tiny_mdp();
        mdp.labels[1] = Letter(0);
        let violations = validate_mdp(&mdp);
        assert!(violations.iter().any(|v| v.invariant == "label-determinism"));
    }
}
