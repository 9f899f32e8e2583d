//! Seeded Monte-Carlo simulation of cost chains and MDP/strategy pairs.
//!
//! Runs sample finite trajectories and evaluate the finite-window ratio, the
//! empirical counterpart of the analytic expected ratio. The generator is
//! ChaCha12; run `i` draws from stream `i` of the seeded generator, so
//! estimates are bit-identical for a fixed config regardless of how runs are
//! scheduled.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;

use crate::error::Error;
use crate::model::{rational_to_f64, Strategy};
use crate::product::{strategy_chain, CostMarkovChain, SynthesisMdp};

/// Simulation parameters. The burn-in prefix is discarded from the ratio
/// window, mirroring the prefix-independence of the objective.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimConfig {
    pub seed: u64,
    pub horizon: usize,
    pub burn_in: usize,
    pub runs: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            seed: 1,
            horizon: 1_000_000,
            burn_in: 1_000,
            runs: 32,
        }
    }
}

/// Aggregated simulation outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct SimEstimate {
    pub mean: f64,
    /// Standard error of the mean across runs (0 for a single run).
    pub stderr: f64,
    pub per_run: Vec<f64>,
    /// Visit fractions over the full horizon, averaged across runs.
    pub visit_fractions: Vec<f64>,
}

struct CompiledChain {
    /// Cumulative transition probabilities per state.
    cumulative: Vec<Vec<(f64, usize)>>,
    cost1: Vec<f64>,
    cost2: Vec<f64>,
}

fn compile(chain: &CostMarkovChain) -> CompiledChain {
    let cumulative = chain
        .trans
        .iter()
        .map(|dist| {
            let mut acc = 0.0;
            let mut row: Vec<(f64, usize)> = dist
                .iter()
                .map(|(t, p)| {
                    acc += rational_to_f64(p);
                    (acc, *t)
                })
                .collect();
            // guard the last entry against rounding shortfall
            if let Some(last) = row.last_mut() {
                last.0 = f64::MAX;
            }
            row
        })
        .collect();
    CompiledChain {
        cumulative,
        cost1: chain.cost1.iter().map(rational_to_f64).collect(),
        cost2: chain.cost2.iter().map(rational_to_f64).collect(),
    }
}

fn run_trajectory(
    compiled: &CompiledChain,
    initial: usize,
    cfg: &SimConfig,
    run: usize,
) -> (f64, Vec<f64>) {
    let mut rng = ChaCha12Rng::seed_from_u64(cfg.seed);
    rng.set_stream(run as u64);
    let mut state = initial;
    let mut visits = vec![0u64; compiled.cost1.len()];
    let mut num = 0.0;
    let mut den = 1.0;
    for step in 0..cfg.horizon {
        visits[state] += 1;
        if step >= cfg.burn_in {
            num += compiled.cost1[state];
            den += compiled.cost2[state];
        }
        let u: f64 = rng.random();
        let row = &compiled.cumulative[state];
        state = row
            .iter()
            .find(|(acc, _)| u < *acc)
            .map(|(_, t)| *t)
            .unwrap_or(row.last().unwrap().1);
    }
    let fractions = visits
        .iter()
        .map(|&v| v as f64 / cfg.horizon as f64)
        .collect();
    (num / den, fractions)
}

/// Samples `cfg.runs` trajectories of the chain and evaluates the ratio over
/// the window after burn-in. Deterministic for a fixed config.
pub fn simulate_chain(chain: &CostMarkovChain, cfg: &SimConfig) -> SimEstimate {
    assert!(cfg.burn_in < cfg.horizon, "burn-in must precede the horizon");
    assert!(cfg.runs >= 1);
    let compiled = compile(chain);
    let results: Vec<(f64, Vec<f64>)> = (0..cfg.runs)
        .into_par_iter()
        .map(|run| run_trajectory(&compiled, chain.initial, cfg, run))
        .collect();
    let per_run: Vec<f64> = results.iter().map(|(v, _)| *v).collect();
    let mean = per_run.iter().sum::<f64>() / per_run.len() as f64;
    let stderr = if per_run.len() > 1 {
        let var = per_run.iter().map(|v| (v - mean).powi(2)).sum::<f64>()
            / (per_run.len() - 1) as f64;
        (var / per_run.len() as f64).sqrt()
    } else {
        0.0
    };
    let mut visit_fractions = vec![0.0; chain.num_states()];
    for (_, fractions) in &results {
        for (slot, f) in visit_fractions.iter_mut().zip(fractions) {
            *slot += f / cfg.runs as f64;
        }
    }
    SimEstimate {
        mean,
        stderr,
        per_run,
        visit_fractions,
    }
}

/// Simulates the chain induced by a strategy on the MDP; identical to
/// `simulate_chain` on that chain.
pub fn simulate_mdp(
    mdp: &SynthesisMdp,
    strat: &Strategy,
    cfg: &SimConfig,
) -> Result<SimEstimate, Error> {
    let chain = strategy_chain(mdp, strat)?;
    Ok(simulate_chain(&chain, cfg))
}
