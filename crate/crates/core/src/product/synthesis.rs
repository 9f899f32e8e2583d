//! The synthesis MDP, almost-sure safety pruning, the chain induced by a
//! strategy, and strategy-to-system extraction.

use std::collections::HashMap;

use num::{BigRational, FromPrimitive, Zero};

use crate::error::Error;
use crate::model::{
    Alphabet, CostAutomaton, FiniteStateSystem, LabeledMdp, Letter, Strategy,
};
use crate::product::chain::CostMarkovChain;

/// Product of the qualitative automaton, the quantitative automaton, and
/// the environment. The system player picks an output letter per step; the
/// environment component resolves probabilistically; the automata track the
/// joint word. Costs come from the quantitative component, the unsafe flag
/// from the qualitative one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynthesisMdp {
    pub inputs: Alphabet,
    pub actions: Alphabet,
    pub states: Vec<String>,
    pub initial: usize,
    /// Enabled actions per state, sorted; all actions before pruning.
    pub enabled: Vec<Vec<Letter>>,
    /// `trans[state][i]` is the distribution for `enabled[state][i]`.
    pub trans: Vec<Vec<Vec<(usize, BigRational)>>>,
    /// Expected step costs per (state, enabled action), from the
    /// quantitative automaton component.
    pub cost1: Vec<Vec<BigRational>>,
    pub cost2: Vec<Vec<BigRational>>,
    pub unsafe_flag: Vec<bool>,
    /// Environment label of each product state's environment component.
    pub state_labels: Vec<Letter>,
}

impl SynthesisMdp {
    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    /// Number of positive-probability (state, action, successor) triples.
    pub fn num_edges(&self) -> usize {
        self.trans.iter().map(|row| row.iter().map(Vec::len).sum::<usize>()).sum()
    }

    pub fn action_position(&self, state: usize, action: Letter) -> Option<usize> {
        self.enabled[state].iter().position(|a| *a == action)
    }
}

pub fn build_synthesis_mdp(
    qual: &CostAutomaton,
    quant: &CostAutomaton,
    env: &LabeledMdp,
) -> Result<SynthesisMdp, Error> {
    if qual.alphabet.input != env.inputs || qual.alphabet.output != env.actions {
        return Err(Error::AlphabetMismatch(
            "qualitative automaton alphabet is not the joint environment alphabet".into(),
        ));
    }
    if quant.alphabet != qual.alphabet {
        return Err(Error::AlphabetMismatch(
            "qualitative and quantitative automata have different alphabets".into(),
        ));
    }
    let num_actions = env.actions.len();
    let initial = (qual.initial, quant.initial, env.initial);
    let mut index: HashMap<(usize, usize, usize), usize> = HashMap::new();
    let mut order = vec![initial];
    index.insert(initial, 0);
    let mut trans = Vec::new();
    let mut cost1 = Vec::new();
    let mut cost2 = Vec::new();

    let mut cursor = 0;
    while cursor < order.len() {
        let (q, u, m) = order[cursor];
        let mut state_trans = Vec::with_capacity(num_actions);
        let mut state_c1 = Vec::with_capacity(num_actions);
        let mut state_c2 = Vec::with_capacity(num_actions);
        for a in 0..num_actions {
            let action = Letter(a);
            let mut dist: Vec<(usize, BigRational)> = Vec::new();
            let mut c1 = BigRational::zero();
            let mut c2 = BigRational::zero();
            for (m_next, p) in env.successors(m, action) {
                let input = env.label(*m_next);
                let joint = qual.alphabet.joint(input, action);
                let q_next = qual.step(q, joint);
                let u_next = quant.step(u, joint);
                let (t1, t2) = quant.costs(u, joint);
                c1 += p * BigRational::from_u64(t1).unwrap();
                c2 += p * BigRational::from_u64(t2).unwrap();
                let key = (q_next, u_next, *m_next);
                let target = *index.entry(key).or_insert_with(|| {
                    order.push(key);
                    order.len() - 1
                });
                match dist.iter_mut().find(|(t, _)| *t == target) {
                    Some((_, mass)) => *mass += p,
                    None => dist.push((target, p.clone())),
                }
            }
            dist.sort_by_key(|(t, _)| *t);
            state_trans.push(dist);
            state_c1.push(c1);
            state_c2.push(c2);
        }
        trans.push(state_trans);
        cost1.push(state_c1);
        cost2.push(state_c2);
        cursor += 1;
    }

    let states: Vec<String> = order
        .iter()
        .map(|(q, u, m)| {
            format!("({},{},{})", qual.states[*q], quant.states[*u], env.states[*m])
        })
        .collect();
    let unsafe_flag = order.iter().map(|(q, _, _)| !qual.safe[*q]).collect();
    let state_labels = order.iter().map(|(_, _, m)| env.label(*m)).collect();
    let enabled = (0..order.len())
        .map(|_| (0..num_actions).map(Letter).collect())
        .collect();
    Ok(SynthesisMdp {
        inputs: env.inputs.clone(),
        actions: env.actions.clone(),
        states,
        initial: 0,
        enabled,
        trans,
        cost1,
        cost2,
        unsafe_flag,
        state_labels,
    })
}

/// Removes unsafe-flagged states and restricts enabled actions to the
/// greatest set under which every retained action's positive-probability
/// successors stay retained. A strategy on the result keeps the run inside
/// the safe set with probability 1.
///
/// Returns `Error::Unrealizable` when the initial state does not survive.
pub fn prune_unsafe(mdp: &SynthesisMdp) -> Result<SynthesisMdp, Error> {
    let n = mdp.num_states();
    let mut alive: Vec<bool> = mdp.unsafe_flag.iter().map(|u| !u).collect();
    let mut enabled: Vec<Vec<usize>> = (0..n)
        .map(|s| (0..mdp.enabled[s].len()).collect())
        .collect();
    loop {
        let mut changed = false;
        for s in 0..n {
            if !alive[s] {
                continue;
            }
            let before = enabled[s].len();
            enabled[s].retain(|&i| mdp.trans[s][i].iter().all(|(t, _)| alive[*t]));
            if enabled[s].len() != before {
                changed = true;
            }
            if enabled[s].is_empty() {
                alive[s] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    if !alive[mdp.initial] {
        return Err(Error::Unrealizable);
    }

    // restrict to states reachable under the surviving actions
    let mut keep = vec![false; n];
    let mut stack = vec![mdp.initial];
    keep[mdp.initial] = true;
    while let Some(s) = stack.pop() {
        for &i in &enabled[s] {
            for (t, _) in &mdp.trans[s][i] {
                if !keep[*t] {
                    keep[*t] = true;
                    stack.push(*t);
                }
            }
        }
    }
    let mut remap = vec![usize::MAX; n];
    let mut kept = Vec::new();
    for s in 0..n {
        if keep[s] {
            remap[s] = kept.len();
            kept.push(s);
        }
    }
    let states = kept.iter().map(|&s| mdp.states[s].clone()).collect();
    let mut new_enabled = Vec::with_capacity(kept.len());
    let mut new_trans = Vec::with_capacity(kept.len());
    let mut new_c1 = Vec::with_capacity(kept.len());
    let mut new_c2 = Vec::with_capacity(kept.len());
    for &s in &kept {
        let mut acts = Vec::new();
        let mut trans = Vec::new();
        let mut c1 = Vec::new();
        let mut c2 = Vec::new();
        for &i in &enabled[s] {
            acts.push(mdp.enabled[s][i]);
            trans.push(
                mdp.trans[s][i]
                    .iter()
                    .map(|(t, p)| (remap[*t], p.clone()))
                    .collect(),
            );
            c1.push(mdp.cost1[s][i].clone());
            c2.push(mdp.cost2[s][i].clone());
        }
        new_enabled.push(acts);
        new_trans.push(trans);
        new_c1.push(c1);
        new_c2.push(c2);
    }
    Ok(SynthesisMdp {
        inputs: mdp.inputs.clone(),
        actions: mdp.actions.clone(),
        states,
        initial: remap[mdp.initial],
        enabled: new_enabled,
        trans: new_trans,
        cost1: new_c1,
        cost2: new_c2,
        unsafe_flag: kept.iter().map(|&s| mdp.unsafe_flag[s]).collect(),
        state_labels: kept.iter().map(|&s| mdp.state_labels[s]).collect(),
    })
}

fn strategy_positions(mdp: &SynthesisMdp, strat: &Strategy) -> Result<Vec<usize>, Error> {
    if strat.choice.len() != mdp.num_states() {
        return Err(Error::Input(format!(
            "strategy covers {} states, MDP has {}",
            strat.choice.len(),
            mdp.num_states()
        )));
    }
    (0..mdp.num_states())
        .map(|s| {
            mdp.action_position(s, strat.action(s)).ok_or_else(|| {
                Error::Input(format!(
                    "strategy picks disabled action {} in state {}",
                    mdp.actions.letter_name(strat.action(s)),
                    mdp.states[s]
                ))
            })
        })
        .collect()
}

fn reach_under(mdp: &SynthesisMdp, position: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let mut remap = vec![usize::MAX; mdp.num_states()];
    let mut kept = vec![mdp.initial];
    remap[mdp.initial] = 0;
    let mut cursor = 0;
    while cursor < kept.len() {
        let s = kept[cursor];
        for (t, _) in &mdp.trans[s][position[s]] {
            if remap[*t] == usize::MAX {
                remap[*t] = kept.len();
                kept.push(*t);
            }
        }
        cursor += 1;
    }
    (kept, remap)
}

/// The Markov chain obtained by fixing a pure memoryless strategy, restricted
/// to the states it reaches. Step costs are the MDP's costs of the chosen
/// actions.
pub fn strategy_chain(mdp: &SynthesisMdp, strat: &Strategy) -> Result<CostMarkovChain, Error> {
    let position = strategy_positions(mdp, strat)?;
    let (kept, remap) = reach_under(mdp, &position);
    let trans = kept
        .iter()
        .map(|&s| {
            let mut dist: Vec<(usize, BigRational)> = mdp.trans[s][position[s]]
                .iter()
                .map(|(t, p)| (remap[*t], p.clone()))
                .collect();
            dist.sort_by_key(|(t, _)| *t);
            dist
        })
        .collect();
    Ok(CostMarkovChain {
        states: kept.iter().map(|&s| mdp.states[s].clone()).collect(),
        initial: 0,
        trans,
        cost1: kept.iter().map(|&s| mdp.cost1[s][position[s]].clone()).collect(),
        cost2: kept.iter().map(|&s| mdp.cost2[s][position[s]].clone()).collect(),
    })
}

/// A finite-state system extracted from a strategy, plus notes about inputs
/// the environment can never produce at some state (those transitions fall
/// back to a self-loop to keep the machine total).
#[derive(Debug, Clone)]
pub struct SystemExtraction {
    pub system: FiniteStateSystem,
    pub notes: Vec<String>,
}

/// Turns a strategy on a (pruned) synthesis MDP into a finite-state system.
///
/// System states are the MDP states the strategy reaches; the output is the
/// chosen action; reading input letter `l` moves to the unique successor
/// whose environment component is labeled `l`.
pub fn extract_system(mdp: &SynthesisMdp, strat: &Strategy) -> Result<SystemExtraction, Error> {
    let position = strategy_positions(mdp, strat)?;
    let (kept, remap) = reach_under(mdp, &position);
    let num_inputs = mdp.inputs.len();
    let mut delta = Vec::with_capacity(kept.len());
    let mut notes = Vec::new();
    for (new_idx, &s) in kept.iter().enumerate() {
        let mut row = vec![usize::MAX; num_inputs];
        for (t, _) in &mdp.trans[s][position[s]] {
            let slot = &mut row[mdp.state_labels[*t].0];
            if *slot != usize::MAX && *slot != remap[*t] {
                return Err(Error::Internal(format!(
                    "two successors of {} share a label; environment is not label-deterministic",
                    mdp.states[s]
                )));
            }
            *slot = remap[*t];
        }
        for (l, entry) in row.iter_mut().enumerate() {
            if *entry == usize::MAX {
                *entry = new_idx;
                notes.push(format!(
                    "state {}: input {} cannot occur here; transition falls back to a self-loop",
                    mdp.states[s],
                    mdp.inputs.letter_names()[l]
                ));
            }
        }
        delta.push(row);
    }
    let system = FiniteStateSystem {
        inputs: mdp.inputs.clone(),
        outputs: mdp.actions.clone(),
        states: kept.iter().map(|&s| mdp.states[s].clone()).collect(),
        initial: 0,
        delta,
        output: kept.iter().map(|&s| strat.action(s)).collect(),
    };
    Ok(SystemExtraction { system, notes })
}
