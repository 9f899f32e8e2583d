//! Shared fixtures: the two-client server benchmark and seeded random model
//! generators.

use num::{BigRational, FromPrimitive};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use ratiosynth::model::{
    Alphabet, CostAutomaton, FiniteStateSystem, JointAlphabet, LabeledMdp, Letter,
};
use ratiosynth::product::{compose_cost_automata, compose_environments};

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// Mutual exclusion over the two acknowledgment bits: the sole unsafe move
/// is raising both at once.
pub fn mutex_automaton() -> CostAutomaton {
    let sigma = JointAlphabet::new(
        Alphabet::from_bits(vec!["r1", "r2"]),
        Alphabet::from_bits(vec!["a1", "a2"]),
    );
    let width = sigma.len();
    let both_acks = 0b11;
    let delta0: Vec<usize> = (0..width)
        .map(|j| {
            let (_, a) = sigma.split(Letter(j));
            usize::from(a.0 == both_acks)
        })
        .collect();
    CostAutomaton {
        alphabet: sigma,
        states: vec!["q0".into(), "q1".into()],
        initial: 0,
        delta: vec![delta0, vec![1; width]],
        safe: vec![true, false],
        cost1: vec![vec![0; width]; 2],
        cost2: vec![vec![0; width]; 2],
    }
}

/// Per-client request/acknowledgment bookkeeping: first cost counts
/// requests, second cost counts useful acknowledgments; state s1 remembers
/// one pending request.
pub fn client_cost_automaton(client: usize) -> CostAutomaton {
    let sigma = JointAlphabet::new(
        Alphabet::from_bits(vec![format!("r{client}")]),
        Alphabet::from_bits(vec![format!("a{client}")]),
    );
    // joint letters: 0 = (!r,!a), 1 = (!r,a), 2 = (r,!a), 3 = (r,a)
    CostAutomaton {
        alphabet: sigma,
        states: vec!["s0".into(), "s1".into()],
        initial: 0,
        delta: vec![vec![0, 0, 1, 0], vec![0, 0, 1, 1]],
        safe: vec![true, true],
        cost1: vec![vec![0, 0, 1, 1], vec![0, 0, 1, 1]],
        cost2: vec![vec![0, 0, 0, 1], vec![0, 1, 0, 1]],
    }
}

/// Client 1 requests with probability 1/2 regardless of acknowledgments.
pub fn client1_mdp() -> LabeledMdp {
    let half = || vec![(0, rat(1, 2)), (1, rat(1, 2))];
    LabeledMdp {
        inputs: Alphabet::from_bits(vec!["r1"]),
        actions: Alphabet::from_bits(vec!["a1"]),
        states: vec!["n".into(), "y".into()],
        initial: 0,
        labels: vec![Letter(0), Letter(1)],
        trans: vec![vec![half(), half()], vec![half(), half()]],
    }
}

/// Client 2 escalates: unacknowledged requests repeat with probability 3/4,
/// and after a one-step pause return with probability 7/8.
pub fn client2_mdp() -> LabeledMdp {
    LabeledMdp {
        inputs: Alphabet::from_bits(vec!["r2"]),
        actions: Alphabet::from_bits(vec!["a2"]),
        states: vec!["init".into(), "req".into(), "idle".into()],
        initial: 0,
        labels: vec![Letter(0), Letter(1), Letter(0)],
        trans: vec![
            vec![
                vec![(0, rat(1, 2)), (1, rat(1, 2))],
                vec![(0, rat(1, 2)), (1, rat(1, 2))],
            ],
            vec![
                vec![(1, rat(3, 4)), (2, rat(1, 4))],
                vec![(0, rat(1, 2)), (1, rat(1, 2))],
            ],
            vec![
                vec![(1, rat(7, 8)), (2, rat(1, 8))],
                vec![(0, rat(1, 2)), (1, rat(1, 2))],
            ],
        ],
    }
}

/// The full two-client benchmark: mutex as the qualitative spec, the summed
/// per-client cost automata as the quantitative spec, and the independent
/// client product as the environment.
pub fn benchmark() -> (CostAutomaton, CostAutomaton, LabeledMdp) {
    let qual = mutex_automaton();
    let quant =
        compose_cost_automata(&client_cost_automaton(1), &client_cost_automaton(2)).unwrap();
    let env = compose_environments(&client1_mdp(), &client2_mdp()).unwrap();
    (qual, quant, env)
}

/// The handwritten two-state server: acknowledges client 1 by default and
/// switches to client 2 exactly while only client 2 requests.
pub fn handwritten_server() -> FiniteStateSystem {
    let inputs = Alphabet::from_bits(vec!["r1", "r2"]);
    let outputs = Alphabet::from_bits(vec!["a1", "a2"]);
    let row: Vec<usize> = (0..4).map(|l| usize::from(l == 0b01)).collect();
    FiniteStateSystem {
        inputs,
        outputs,
        states: vec!["m0".into(), "m1".into()],
        initial: 0,
        delta: vec![row.clone(), row],
        output: vec![Letter(0b10), Letter(0b01)],
    }
}

/// A system that always raises both acknowledgments, violating mutex from
/// the first step.
pub fn greedy_server() -> FiniteStateSystem {
    FiniteStateSystem {
        inputs: Alphabet::from_bits(vec!["r1", "r2"]),
        outputs: Alphabet::from_bits(vec!["a1", "a2"]),
        states: vec!["g".into()],
        initial: 0,
        delta: vec![vec![0; 4]],
        output: vec![Letter(0b11)],
    }
}

/// Random label-deterministic environment MDP over one input bit and one
/// action bit.
pub fn random_env(rng: &mut StdRng, max_states: usize) -> LabeledMdp {
    let n = rng.random_range(2..=max_states);
    let labels: Vec<Letter> = (0..n)
        .map(|s| Letter(if s == 0 { 0 } else { rng.random_range(0..2) }))
        .collect();
    // label-determinism over a binary label alphabet: at most one successor
    // per label value
    let probs = [rat(1, 4), rat(1, 2), rat(3, 4)];
    let mut trans = Vec::with_capacity(n);
    for _ in 0..n {
        let mut per_action = Vec::with_capacity(2);
        for _ in 0..2 {
            let zero_labelled: Vec<usize> =
                (0..n).filter(|&t| labels[t] == Letter(0)).collect();
            let one_labelled: Vec<usize> =
                (0..n).filter(|&t| labels[t] == Letter(1)).collect();
            let t0 = zero_labelled[rng.random_range(0..zero_labelled.len())];
            let dist = if one_labelled.is_empty() || rng.random_range(0..4) == 0 {
                vec![(t0, rat(1, 1))]
            } else {
                let t1 = one_labelled[rng.random_range(0..one_labelled.len())];
                let p = probs[rng.random_range(0..probs.len())].clone();
                let q = rat(1, 1) - p.clone();
                let mut d = vec![(t0, p), (t1, q)];
                d.sort_by_key(|(t, _)| *t);
                d
            };
            per_action.push(dist);
        }
        trans.push(per_action);
    }
    LabeledMdp {
        inputs: Alphabet::from_bits(vec!["r"]),
        actions: Alphabet::from_bits(vec!["a"]),
        states: (0..n).map(|s| format!("e{s}")).collect(),
        initial: 0,
        labels,
        trans,
    }
}

/// Random deterministic safety automaton over one input and one output bit.
pub fn random_safety_automaton(rng: &mut StdRng, max_states: usize) -> CostAutomaton {
    let n = rng.random_range(1..=max_states);
    let width = 4;
    let delta = (0..n)
        .map(|_| (0..width).map(|_| rng.random_range(0..n)).collect())
        .collect();
    let safe = (0..n)
        .map(|q| q == 0 || rng.random_range(0..3) > 0)
        .collect();
    CostAutomaton {
        alphabet: JointAlphabet::new(
            Alphabet::from_bits(vec!["r"]),
            Alphabet::from_bits(vec!["a"]),
        ),
        states: (0..n).map(|q| format!("q{q}")).collect(),
        initial: 0,
        delta,
        safe,
        cost1: vec![vec![0; width]; n],
        cost2: vec![vec![0; width]; n],
    }
}

/// Random Moore machine over one input and one output bit.
pub fn random_system(rng: &mut StdRng, max_states: usize) -> FiniteStateSystem {
    let n = rng.random_range(1..=max_states);
    FiniteStateSystem {
        inputs: Alphabet::from_bits(vec!["r"]),
        outputs: Alphabet::from_bits(vec!["a"]),
        states: (0..n).map(|s| format!("m{s}")).collect(),
        initial: 0,
        delta: (0..n)
            .map(|_| (0..2).map(|_| rng.random_range(0..n)).collect())
            .collect(),
        output: (0..n).map(|_| Letter(rng.random_range(0..2))).collect(),
    }
}

/// Seeded generator matching the brute-force optimality criterion: up to 3
/// states, 2 actions, probabilities from {1/4, 1/2, 3/4, 1}, costs in
/// {0, 1, 2}.
pub fn random_small_mdp(rng: &mut StdRng) -> ratiosynth::product::SynthesisMdp {
    use ratiosynth::product::SynthesisMdp;
    let n = rng.random_range(1..=3);
    let num_actions = rng.random_range(1..=2);
    let probs = [rat(1, 4), rat(1, 2), rat(3, 4)];
    let mut trans = Vec::with_capacity(n);
    let mut cost1 = Vec::with_capacity(n);
    let mut cost2 = Vec::with_capacity(n);
    for _ in 0..n {
        let mut row_t = Vec::new();
        let mut row_1 = Vec::new();
        let mut row_2 = Vec::new();
        for _ in 0..num_actions {
            let t0 = rng.random_range(0..n);
            let dist = if n == 1 || rng.random_range(0..3) == 0 {
                vec![(t0, rat(1, 1))]
            } else {
                let mut t1 = rng.random_range(0..n);
                while t1 == t0 {
                    t1 = rng.random_range(0..n);
                }
                let p = probs[rng.random_range(0..probs.len())].clone();
                let q = rat(1, 1) - p.clone();
                let mut d = vec![(t0, p), (t1, q)];
                d.sort_by_key(|(t, _)| *t);
                d
            };
            row_t.push(dist);
            row_1.push(BigRational::from_i64(rng.random_range(0..=2)).unwrap());
            row_2.push(BigRational::from_i64(rng.random_range(0..=2)).unwrap());
        }
        trans.push(row_t);
        cost1.push(row_1);
        cost2.push(row_2);
    }
    let action_names: Vec<String> = (0..num_actions).map(|i| format!("act{i}")).collect();
    SynthesisMdp {
        inputs: Alphabet::from_letters(vec!["l"]),
        actions: Alphabet::from_letters(action_names),
        states: (0..n).map(|s| format!("s{s}")).collect(),
        initial: 0,
        enabled: (0..n)
            .map(|_| (0..num_actions).map(Letter).collect())
            .collect(),
        trans,
        cost1,
        cost2,
        unsafe_flag: vec![false; n],
        state_labels: vec![Letter(0); n],
    }
}

/// All pure memoryless strategies of a synthesis MDP.
pub fn all_strategies(mdp: &ratiosynth::product::SynthesisMdp) -> Vec<ratiosynth::model::Strategy> {
    let mut out = vec![ratiosynth::model::Strategy { choice: Vec::new() }];
    for s in 0..mdp.num_states() {
        let mut next = Vec::new();
        for partial in &out {
            for &a in &mdp.enabled[s] {
                let mut extended = partial.choice.clone();
                extended.push(a);
                next.push(ratiosynth::model::Strategy { choice: extended });
            }
        }
        out = next;
    }
    out
}

pub fn seeded(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}
