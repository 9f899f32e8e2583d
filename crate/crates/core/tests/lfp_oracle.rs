//! Brute-force optimality oracle: on small MDPs the solver's value must
//! equal the minimum over all pure memoryless strategies of the analytic
//! chain value.

mod common;

use common::{all_strategies, random_small_mdp, seeded};
use num::Zero;
use ratiosynth::analysis::{classify, expected_ratio, AnalysisConfig};
use ratiosynth::lfp::{solve_lfp, LfpConfig};
use ratiosynth::model::{ExtendedValue, Strategy};
use ratiosynth::product::{strategy_chain, CostMarkovChain, SynthesisMdp};

/// Chain over the full state space (no reachability restriction), used to
/// decide unichain-ness the way the MDP definition does.
fn full_space_chain(mdp: &SynthesisMdp, strat: &Strategy) -> CostMarkovChain {
    let trans = (0..mdp.num_states())
        .map(|s| {
            let i = mdp.action_position(s, strat.action(s)).unwrap();
            mdp.trans[s][i].clone()
        })
        .collect();
    CostMarkovChain {
        states: mdp.states.clone(),
        initial: mdp.initial,
        trans,
        cost1: vec![num::BigRational::zero(); mdp.num_states()],
        cost2: vec![num::BigRational::zero(); mdp.num_states()],
    }
}

fn mdp_is_unichain(mdp: &SynthesisMdp) -> bool {
    all_strategies(mdp)
        .iter()
        .all(|strat| classify(&full_space_chain(mdp, strat)).unichain)
}

fn brute_force_value(mdp: &SynthesisMdp) -> ExtendedValue {
    all_strategies(mdp)
        .iter()
        .map(|strat| {
            let chain = strategy_chain(mdp, strat).unwrap();
            expected_ratio(&chain, &AnalysisConfig::default()).unwrap()
        })
        .min_by(|a, b| a.partial_cmp(b).unwrap())
        .unwrap()
}

fn agree(solver: &ExtendedValue, brute: &ExtendedValue) -> bool {
    match (solver.as_f64(), brute.as_f64()) {
        (None, None) => true,
        (Some(a), Some(b)) => (a - b).abs() <= 1e-6 * (1.0 + b.abs()),
        _ => false,
    }
}

#[test]
fn solver_matches_brute_force_on_generated_mdps() {
    let mut rng = seeded(0xB0B);
    let mut tested = 0;
    let mut attempts = 0;
    while tested < 60 {
        attempts += 1;
        assert!(attempts < 10_000, "generator starved");
        let mdp = random_small_mdp(&mut rng);
        if !mdp_is_unichain(&mdp) {
            continue;
        }
        let brute = brute_force_value(&mdp);
        let result = solve_lfp(&mdp, &LfpConfig::default())
            .unwrap_or_else(|e| panic!("solver failed on instance {tested}: {e}"));
        assert!(
            agree(&result.value, &brute),
            "instance {tested}: solver {:?} vs brute force {:?}",
            result.value,
            brute
        );
        // the solver's own history obeys the monotone-descent contract
        for pair in result.history.windows(2) {
            assert!(pair[1] <= pair[0]);
        }
        tested += 1;
    }
}

#[test]
fn occupation_measure_identity_for_unichain_strategies() {
    // for a pure strategy with unichain chain, x(s, pi(s)) = p*(s) is
    // feasible for the program
    let mut rng = seeded(77);
    let mut checked = 0;
    while checked < 25 {
        let mdp = random_small_mdp(&mut rng);
        let program = ratiosynth::lfp::build_lfp(&mdp);
        for strat in all_strategies(&mdp) {
            let chain = match strategy_chain(&mdp, &strat) {
                Ok(c) => c,
                Err(_) => continue,
            };
            let dist = match ratiosynth::analysis::cesaro_limit(&chain, &AnalysisConfig::default())
            {
                Ok(d) => d,
                Err(_) => continue,
            };
            let mut x = vec![0.0; program.vars.len()];
            for (chain_idx, name) in chain.states.iter().enumerate() {
                let s = mdp.states.iter().position(|n| n == name).unwrap();
                let var = program
                    .vars
                    .iter()
                    .position(|&(vs, va)| vs == s && va == strat.action(s))
                    .unwrap();
                x[var] = dist.approx[chain_idx];
            }
            let residual = ratiosynth::lfp::constraint_residual(&program, &x);
            assert!(residual <= 1e-9, "residual {residual}");
            checked += 1;
        }
    }
}
