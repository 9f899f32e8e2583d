//! Markov chains with per-state step costs, and the synchronous products
//! that reduce satisfaction checking and value computation to them.

use std::collections::HashMap;

use num::{BigRational, FromPrimitive, Zero};

use crate::error::Error;
use crate::model::{CostAutomaton, FiniteStateSystem, LabeledMdp};

/// A finite Markov chain with two nonnegative per-state step costs.
///
/// The cost of a state is the expected cost of the single step taken there,
/// so products whose transition costs depend on the sampled successor store
/// the probability-weighted cost as an exact rational. Only states reachable
/// from the initial state are retained.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostMarkovChain {
    /// State names record the origin tuple of product constructions.
    pub states: Vec<String>,
    pub initial: usize,
    /// Sparse distribution per state, sorted by successor index.
    pub trans: Vec<Vec<(usize, BigRational)>>,
    pub cost1: Vec<BigRational>,
    pub cost2: Vec<BigRational>,
}

impl CostMarkovChain {
    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    /// States reachable through positive-probability edges from `from`.
    pub fn reachable_from(&self, from: usize) -> Vec<bool> {
        let mut seen = vec![false; self.num_states()];
        let mut stack = vec![from];
        seen[from] = true;
        while let Some(s) = stack.pop() {
            for &(succ, _) in &self.trans[s] {
                if !seen[succ] {
                    seen[succ] = true;
                    stack.push(succ);
                }
            }
        }
        seen
    }
}

fn check_alphabets(
    sys: &FiniteStateSystem,
    aut: &CostAutomaton,
    env: &LabeledMdp,
) -> Result<(), Error> {
    if env.inputs != sys.inputs {
        return Err(Error::AlphabetMismatch(
            "environment labels and system inputs differ".into(),
        ));
    }
    if env.actions != sys.outputs {
        return Err(Error::AlphabetMismatch(
            "environment actions and system outputs differ".into(),
        ));
    }
    if aut.alphabet.input != env.inputs || aut.alphabet.output != env.actions {
        return Err(Error::AlphabetMismatch(
            "automaton alphabet is not the joint input/output alphabet".into(),
        ));
    }
    Ok(())
}

/// How the product assigns step costs.
enum CostRule {
    /// Cost pair (0,1) at safe automaton states and (1,0) at unsafe ones;
    /// the long-run ratio of the resulting chain is 0 exactly when no
    /// unsafe state is reachable.
    Safety,
    /// Costs copied from the automaton transition taken, averaged over the
    /// sampled successor letter.
    Copy,
}

fn build_product_chain(
    sys: &FiniteStateSystem,
    aut: &CostAutomaton,
    env: &LabeledMdp,
    rule: CostRule,
) -> Result<CostMarkovChain, Error> {
    check_alphabets(sys, aut, env)?;
    let initial = (sys.initial, aut.initial, env.initial);
    let mut index: HashMap<(usize, usize, usize), usize> = HashMap::new();
    let mut order = vec![initial];
    index.insert(initial, 0);
    let mut trans: Vec<Vec<(usize, BigRational)>> = Vec::new();
    let mut cost1 = Vec::new();
    let mut cost2 = Vec::new();

    let mut cursor = 0;
    while cursor < order.len() {
        let (s, q, m) = order[cursor];
        let action = sys.output_of(s);
        let mut dist: Vec<(usize, BigRational)> = Vec::new();
        let mut c1 = BigRational::zero();
        let mut c2 = BigRational::zero();
        for (m_next, p) in env.successors(m, action) {
            // the environment's move reveals the next input letter; system
            // and automaton advance on it together with the current output
            let input = env.label(*m_next);
            let joint = aut.alphabet.joint(input, action);
            let s_next = sys.delta[s][input.0];
            let q_next = aut.step(q, joint);
            match rule {
                CostRule::Safety => {}
                CostRule::Copy => {
                    let (t1, t2) = aut.costs(q, joint);
                    c1 += p * BigRational::from_u64(t1).unwrap();
                    c2 += p * BigRational::from_u64(t2).unwrap();
                }
            }
            let key = (s_next, q_next, *m_next);
            let target = *index.entry(key).or_insert_with(|| {
                order.push(key);
                order.len() - 1
            });
            match dist.iter_mut().find(|(t, _)| *t == target) {
                Some((_, mass)) => *mass += p,
                None => dist.push((target, p.clone())),
            }
        }
        if let CostRule::Safety = rule {
            if aut.safe[q] {
                c2 = BigRational::from_u64(1).unwrap();
            } else {
                c1 = BigRational::from_u64(1).unwrap();
            }
        }
        dist.sort_by_key(|(t, _)| *t);
        trans.push(dist);
        cost1.push(c1);
        cost2.push(c2);
        cursor += 1;
    }

    let states = order
        .iter()
        .map(|(s, q, m)| {
            format!(
                "({},{},{})",
                sys.states[*s], aut.states[*q], env.states[*m]
            )
        })
        .collect();
    Ok(CostMarkovChain {
        states,
        initial: 0,
        trans,
        cost1,
        cost2,
    })
}

/// Product of a system, a safety automaton, and an environment, with the
/// safety cost rule: the chain's expected ratio is 0 iff the system
/// satisfies the automaton almost surely under the environment.
pub fn build_satisfaction_chain(
    sys: &FiniteStateSystem,
    qual: &CostAutomaton,
    env: &LabeledMdp,
) -> Result<CostMarkovChain, Error> {
    build_product_chain(sys, qual, env, CostRule::Safety)
}

/// Product of a system, a cost automaton, and an environment, with costs
/// copied from the automaton: the chain's expected ratio equals the value
/// of the system for the automaton's quantitative language.
pub fn build_value_chain(
    sys: &FiniteStateSystem,
    quant: &CostAutomaton,
    env: &LabeledMdp,
) -> Result<CostMarkovChain, Error> {
    build_product_chain(sys, quant, env, CostRule::Copy)
}

/// States of a satisfaction chain that carry an unsafe automaton component.
/// The safety cost rule makes these exactly the states with positive first
/// cost, which gives an implementation-independent way to find them.
pub fn unsafe_states(chain: &CostMarkovChain) -> Vec<bool> {
    chain.cost1.iter().map(|c| !c.is_zero()).collect()
}
