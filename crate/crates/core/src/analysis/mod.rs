//! Exact long-run analysis of cost Markov chains: recurrence structure,
//! Cesàro limits, and the expected ratio payoff.

mod linsolve;
mod scc;

use num::{BigRational, One, Zero};

pub use linsolve::{solve_float, solve_rational};
pub use scc::strongly_connected_components;

use crate::error::Error;
use crate::model::{
    normalize_automaton, rational_to_f64, CostAutomaton, ExtendedValue, FiniteStateSystem,
    LabeledMdp,
};
use crate::product::{build_satisfaction_chain, build_value_chain, unsafe_states, CostMarkovChain};

/// Recurrence structure of a chain: the closed strongly connected classes
/// and everything else.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainStructure {
    pub recurrent_classes: Vec<Vec<usize>>,
    pub transient: Vec<usize>,
    pub unichain: bool,
}

/// The Cesàro limit of the state occupation probabilities. Weights are zero
/// on transient states and form the stationary distribution of the single
/// recurrent class.
#[derive(Debug, Clone)]
pub struct CesaroDistribution {
    pub approx: Vec<f64>,
    pub exact: Option<Vec<BigRational>>,
    pub mode: SolveMode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMode {
    Exact,
    Float,
}

/// Knobs for the stationary solver.
#[derive(Debug, Clone)]
pub struct AnalysisConfig {
    /// Chains up to this many states are solved with exact rationals,
    /// larger ones in floating point.
    pub exact_threshold: usize,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            exact_threshold: 2000,
        }
    }
}

/// Splits the chain's states into recurrent classes (the bottom strongly
/// connected components of the positive-probability graph) and transient
/// states.
pub fn classify(chain: &CostMarkovChain) -> ChainStructure {
    let adj: Vec<Vec<usize>> = chain
        .trans
        .iter()
        .map(|dist| dist.iter().map(|(t, _)| *t).collect())
        .collect();
    let sccs = strongly_connected_components(&adj);
    let mut recurrent_classes = Vec::new();
    let mut transient = Vec::new();
    for component in sccs {
        let closed = component
            .iter()
            .all(|&s| adj[s].iter().all(|t| component.binary_search(t).is_ok()));
        if closed {
            recurrent_classes.push(component);
        } else {
            transient.extend(component);
        }
    }
    recurrent_classes.sort();
    transient.sort_unstable();
    let unichain = recurrent_classes.len() == 1;
    ChainStructure {
        recurrent_classes,
        transient,
        unichain,
    }
}

/// Stationary distribution of the single recurrent class, extended by zero
/// to the transient states.
///
/// Solved by Gaussian elimination, exactly for chains up to the configured
/// threshold and in floating point above it.
pub fn cesaro_limit(
    chain: &CostMarkovChain,
    cfg: &AnalysisConfig,
) -> Result<CesaroDistribution, Error> {
    let structure = classify(chain);
    if !structure.unichain {
        return Err(Error::Multichain(structure));
    }
    let class = &structure.recurrent_classes[0];
    let k = class.len();
    let pos = |s: usize| class.binary_search(&s).ok();
    let n = chain.num_states();

    if n <= cfg.exact_threshold {
        // rows: normalization, then balance at every class state but the first
        let mut m = vec![vec![BigRational::zero(); k]; k];
        let mut b = vec![BigRational::zero(); k];
        for cell in m[0].iter_mut() {
            *cell = BigRational::one();
        }
        b[0] = BigRational::one();
        for (i, &s) in class.iter().enumerate() {
            for (t, p) in &chain.trans[s] {
                if let Some(j) = pos(*t) {
                    if j > 0 {
                        m[j][i] += p;
                    }
                }
            }
            if i > 0 {
                m[i][i] -= BigRational::one();
            }
        }
        let pi = solve_rational(m, b).ok_or_else(|| {
            Error::Internal("stationary system is singular on a recurrent class".into())
        })?;
        let mut exact = vec![BigRational::zero(); n];
        for (i, &s) in class.iter().enumerate() {
            exact[s] = pi[i].clone();
        }
        let approx = exact.iter().map(rational_to_f64).collect();
        Ok(CesaroDistribution {
            approx,
            exact: Some(exact),
            mode: SolveMode::Exact,
        })
    } else {
        let mut m = vec![vec![0.0; k]; k];
        let mut b = vec![0.0; k];
        for cell in m[0].iter_mut() {
            *cell = 1.0;
        }
        b[0] = 1.0;
        for (i, &s) in class.iter().enumerate() {
            for (t, p) in &chain.trans[s] {
                if let Some(j) = pos(*t) {
                    if j > 0 {
                        m[j][i] += rational_to_f64(p);
                    }
                }
            }
            if i > 0 {
                m[i][i] -= 1.0;
            }
        }
        let pi = solve_float(m, b, 1e-14).ok_or_else(|| {
            Error::Numerical("stationary solve: pivot below 1e-14".into())
        })?;
        let mut approx = vec![0.0; n];
        for (i, &s) in class.iter().enumerate() {
            approx[s] = pi[i];
        }
        Ok(CesaroDistribution {
            approx,
            exact: None,
            mode: SolveMode::Float,
        })
    }
}

/// Expected long-run ratio of the two accumulated costs.
///
/// With stationary weights p*, the value is the ratio of the weighted first
/// costs to the weighted second costs; a zero numerator gives 0, a positive
/// numerator over a zero denominator diverges to infinity.
pub fn expected_ratio(
    chain: &CostMarkovChain,
    cfg: &AnalysisConfig,
) -> Result<ExtendedValue, Error> {
    let dist = cesaro_limit(chain, cfg)?;
    match &dist.exact {
        Some(weights) => {
            let num: BigRational = weights
                .iter()
                .zip(&chain.cost1)
                .map(|(w, c)| w * c)
                .sum();
            let den: BigRational = weights
                .iter()
                .zip(&chain.cost2)
                .map(|(w, c)| w * c)
                .sum();
            if num.is_zero() {
                Ok(ExtendedValue::zero())
            } else if den.is_zero() {
                Ok(ExtendedValue::Infinity)
            } else {
                Ok(ExtendedValue::exact(num / den))
            }
        }
        None => {
            let num: f64 = dist
                .approx
                .iter()
                .zip(&chain.cost1)
                .map(|(w, c)| w * rational_to_f64(c))
                .sum();
            let den: f64 = dist
                .approx
                .iter()
                .zip(&chain.cost2)
                .map(|(w, c)| w * rational_to_f64(c))
                .sum();
            if num.abs() <= 1e-12 {
                Ok(ExtendedValue::approx(0.0))
            } else if den.abs() <= 1e-12 {
                Ok(ExtendedValue::Infinity)
            } else {
                Ok(ExtendedValue::approx(num / den))
            }
        }
    }
}

/// True iff the system satisfies the safety automaton almost surely under
/// the environment.
///
/// Computed two independent ways: the expected ratio of the satisfaction
/// chain must be zero, and no unsafe product state may be reachable. The two
/// must agree on unichain products; on multichain products only the
/// reachability criterion applies.
pub fn check_satisfaction(
    sys: &FiniteStateSystem,
    qual: &CostAutomaton,
    env: &LabeledMdp,
) -> Result<bool, Error> {
    let qual = normalize_automaton(qual);
    let chain = build_satisfaction_chain(sys, &qual, env)?;
    let unsafe_flags = unsafe_states(&chain);
    let reachable = chain.reachable_from(chain.initial);
    let unsafe_reachable = unsafe_flags
        .iter()
        .zip(&reachable)
        .any(|(u, r)| *u && *r);

    match expected_ratio(&chain, &AnalysisConfig::default()) {
        Ok(value) => {
            let zero_value = value.is_zero();
            if zero_value == unsafe_reachable {
                return Err(Error::Internal(format!(
                    "satisfaction check disagreement: ratio value {value}, unsafe reachable {unsafe_reachable}"
                )));
            }
            Ok(!unsafe_reachable)
        }
        // the safety reduction holds regardless of recurrence structure;
        // fall back to reachability alone
        Err(Error::Multichain(_)) => Ok(!unsafe_reachable),
        Err(e) => Err(e),
    }
}

/// Value of a system: infinity when it violates the safety specification
/// with positive probability, otherwise the expected ratio of its value
/// chain.
pub fn system_value(
    sys: &FiniteStateSystem,
    qual: &CostAutomaton,
    quant: &CostAutomaton,
    env: &LabeledMdp,
    cfg: &AnalysisConfig,
) -> Result<ExtendedValue, Error> {
    if !check_satisfaction(sys, qual, env)? {
        return Ok(ExtendedValue::Infinity);
    }
    let chain = build_value_chain(sys, quant, env)?;
    expected_ratio(&chain, cfg)
}

/// Largest absolute residual of `pi = pi P` plus the normalization defect,
/// for tests and diagnostics.
pub fn stationarity_residual(chain: &CostMarkovChain, weights: &[f64]) -> f64 {
    let n = chain.num_states();
    let mut residual: f64 = (weights.iter().sum::<f64>() - 1.0).abs();
    let mut incoming = vec![0.0; n];
    for (s, dist) in chain.trans.iter().enumerate() {
        for (t, p) in dist {
            incoming[*t] += weights[s] * rational_to_f64(p);
        }
    }
    for s in 0..n {
        residual = residual.max((incoming[s] - weights[s]).abs());
    }
    residual
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::BigRational;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn chain(
        trans: Vec<Vec<(usize, BigRational)>>,
        cost1: Vec<i64>,
        cost2: Vec<i64>,
    ) -> CostMarkovChain {
        CostMarkovChain {
            states: (0..trans.len()).map(|i| format!("s{i}")).collect(),
            initial: 0,
            trans,
            cost1: cost1.into_iter().map(|c| rat(c, 1)).collect(),
            cost2: cost2.into_iter().map(|c| rat(c, 1)).collect(),
        }
    }

    #[test]
    fn absorbing_state_with_feeder() {
        let c = chain(
            vec![vec![(1, rat(1, 1))], vec![(1, rat(1, 1))]],
            vec![0, 0],
            vec![1, 1],
        );
        let s = classify(&c);
        assert_eq!(s.recurrent_classes, vec![vec![1]]);
        assert_eq!(s.transient, vec![0]);
        assert!(s.unichain);
        let pi = cesaro_limit(&c, &AnalysisConfig::default()).unwrap();
        assert_eq!(pi.exact.unwrap(), vec![rat(0, 1), rat(1, 1)]);
    }

    #[test]
    fn two_cycle_is_uniform() {
        let c = chain(
            vec![vec![(1, rat(1, 1))], vec![(0, rat(1, 1))]],
            vec![1, 3],
            vec![1, 1],
        );
        let s = classify(&c);
        assert!(s.unichain);
        assert_eq!(s.recurrent_classes[0].len(), 2);
        let pi = cesaro_limit(&c, &AnalysisConfig::default()).unwrap();
        assert_eq!(pi.exact.as_ref().unwrap()[0], rat(1, 2));
        let v = expected_ratio(&c, &AnalysisConfig::default()).unwrap();
        assert_eq!(v.exact_value().unwrap(), &rat(2, 1));
    }

    #[test]
    fn split_start_is_multichain() {
        let c = chain(
            vec![
                vec![(1, rat(1, 2)), (2, rat(1, 2))],
                vec![(1, rat(1, 1))],
                vec![(2, rat(1, 1))],
            ],
            vec![0, 0, 0],
            vec![1, 1, 1],
        );
        let s = classify(&c);
        assert_eq!(s.recurrent_classes.len(), 2);
        assert!(!s.unichain);
        assert!(matches!(
            cesaro_limit(&c, &AnalysisConfig::default()),
            Err(Error::Multichain(_))
        ));
    }

    #[test]
    fn biased_two_state_stationary() {
        // stay in s0 with 2/3, hop with 1/3; s1 always returns
        let c = chain(
            vec![
                vec![(0, rat(2, 3)), (1, rat(1, 3))],
                vec![(0, rat(1, 1))],
            ],
            vec![1, 1],
            vec![0, 1],
        );
        let pi = cesaro_limit(&c, &AnalysisConfig::default()).unwrap();
        assert_eq!(
            pi.exact.unwrap(),
            vec![rat(3, 4), rat(1, 4)]
        );
        assert_eq!(pi.mode, SolveMode::Exact);
    }

    #[test]
    fn float_mode_kicks_in_above_threshold() {
        let c = chain(
            vec![
                vec![(0, rat(2, 3)), (1, rat(1, 3))],
                vec![(0, rat(1, 1))],
            ],
            vec![1, 1],
            vec![0, 1],
        );
        let cfg = AnalysisConfig { exact_threshold: 1 };
        let pi = cesaro_limit(&c, &cfg).unwrap();
        assert_eq!(pi.mode, SolveMode::Float);
        assert!(pi.exact.is_none());
        assert!((pi.approx[0] - 0.75).abs() < 1e-12);
        assert!(stationarity_residual(&c, &pi.approx) <= 1e-10);
    }

    #[test]
    fn divergence_when_second_costs_vanish() {
        let c = chain(
            vec![vec![(1, rat(1, 1))], vec![(0, rat(1, 1))]],
            vec![1, 1],
            vec![0, 0],
        );
        let v = expected_ratio(&c, &AnalysisConfig::default()).unwrap();
        assert!(v.is_infinite());
    }

    #[test]
    fn zero_numerator_dominates() {
        let c = chain(
            vec![vec![(0, rat(1, 1))]],
            vec![0],
            vec![0],
        );
        let v = expected_ratio(&c, &AnalysisConfig::default()).unwrap();
        assert!(v.is_zero());
    }

    #[test]
    fn constant_costs_give_their_ratio() {
        let c = chain(
            vec![
                vec![(0, rat(1, 2)), (1, rat(1, 2))],
                vec![(0, rat(1, 1))],
            ],
            vec![3, 3],
            vec![2, 2],
        );
        let v = expected_ratio(&c, &AnalysisConfig::default()).unwrap();
        assert_eq!(v.exact_value().unwrap(), &rat(3, 2));
    }

    #[test]
    fn prefix_independence_of_the_start_state() {
        // two different transient entry points into the same cycle
        let cycle = |initial: usize| CostMarkovChain {
            states: vec!["t".into(), "a".into(), "b".into()],
            initial,
            trans: vec![
                vec![(1, rat(1, 1))],
                vec![(2, rat(1, 1))],
                vec![(1, rat(1, 1))],
            ],
            cost1: vec![rat(7, 1), rat(1, 1), rat(3, 1)],
            cost2: vec![rat(1, 1), rat(1, 1), rat(1, 1)],
        };
        let v0 = expected_ratio(&cycle(0), &AnalysisConfig::default()).unwrap();
        let v1 = expected_ratio(&cycle(1), &AnalysisConfig::default()).unwrap();
        assert_eq!(v0, v1);
    }
}
