//! The linear fractional program over occupation measures and its solution
//! by a sequence of linear programs.
//!
//! Variables x(s,a) range over state/enabled-action pairs of a pruned
//! synthesis MDP; they are constrained to sum to one and to satisfy flow
//! balance at every state, and the objective is the ratio of the two
//! cost-weighted sums. The iteration solves `minimize c1·x - g·(c2·x)` with
//! `g` set to the previous ratio until the ratio stops improving.

use num::{BigRational, Zero};

use crate::analysis::{
    cesaro_limit, classify, expected_ratio, strongly_connected_components, AnalysisConfig,
};
use crate::error::Error;
use crate::lp::{solve_lp, LinearProgram, LpStatus};
use crate::model::{rational_to_f64, ExtendedValue, Letter, Strategy};
use crate::product::{strategy_chain, SynthesisMdp};

/// The fractional program: objective cost vectors over the (state, action)
/// variables and the shared equality constraints.
#[derive(Debug, Clone)]
pub struct LfpProgram {
    /// Variable order: states ascending, enabled actions in enabled order.
    pub vars: Vec<(usize, Letter)>,
    pub cost1: Vec<BigRational>,
    pub cost2: Vec<BigRational>,
    /// Normalization row followed by one flow-balance row per state.
    pub rows: Vec<Vec<f64>>,
    pub rhs: Vec<f64>,
}

/// Nonnegative weights over (state, action) pairs satisfying the program's
/// constraints: the long-run probability of being in a state and choosing an
/// action.
#[derive(Debug, Clone)]
pub struct OccupationMeasure {
    pub vars: Vec<(usize, Letter)>,
    pub x: Vec<f64>,
    /// Whether the weights came from a basic (vertex) LP solution.
    pub from_basic: bool,
}

/// Which construction produced the initial feasible point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialPath {
    /// Stationary distribution of the lowest-index-action strategy.
    LowestIndexChain,
    /// The induced chain was multichain; a feasibility LP ran instead.
    FeasibilityLp,
}

#[derive(Debug, Clone)]
pub struct LfpResult {
    pub value: ExtendedValue,
    pub measure: OccupationMeasure,
    pub strategy: Strategy,
    pub iterations: usize,
    /// Ratio value before each iteration and after the last.
    pub history: Vec<ExtendedValue>,
    /// Optimum of each parametric LP; theory puts these at or below zero.
    pub lp_optima: Vec<f64>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct LfpConfig {
    /// Relative termination tolerance on the ratio sequence.
    pub epsilon: f64,
    pub max_iterations: usize,
    /// Threshold below which an occupation weight or denominator counts as
    /// zero.
    pub zero_tol: f64,
    /// Proceed even when the cheap unichain check fails.
    pub allow_multichain: bool,
    pub analysis: AnalysisConfig,
}

impl Default for LfpConfig {
    fn default() -> Self {
        LfpConfig {
            epsilon: 1e-9,
            max_iterations: 100,
            zero_tol: 1e-9,
            allow_multichain: false,
            analysis: AnalysisConfig::default(),
        }
    }
}

/// Builds the fractional program for a pruned MDP: one variable per
/// (state, enabled action), the normalization row, and one balance row per
/// state.
pub fn build_lfp(mdp: &SynthesisMdp) -> LfpProgram {
    let mut vars = Vec::new();
    let mut cost1 = Vec::new();
    let mut cost2 = Vec::new();
    for s in 0..mdp.num_states() {
        for (i, &a) in mdp.enabled[s].iter().enumerate() {
            vars.push((s, a));
            cost1.push(mdp.cost1[s][i].clone());
            cost2.push(mdp.cost2[s][i].clone());
        }
    }
    let nvars = vars.len();
    let n = mdp.num_states();
    let mut rows = vec![vec![0.0; nvars]; 1 + n];
    let mut rhs = vec![0.0; 1 + n];
    rhs[0] = 1.0;
    for cell in rows[0].iter_mut() {
        *cell = 1.0;
    }
    for (v, &(s, a)) in vars.iter().enumerate() {
        rows[1 + s][v] += 1.0;
        let i = mdp.action_position(s, a).unwrap();
        for (t, p) in &mdp.trans[s][i] {
            rows[1 + t][v] -= rational_to_f64(p);
        }
    }
    LfpProgram {
        vars,
        cost1,
        cost2,
        rows,
        rhs,
    }
}

/// Largest constraint violation of a candidate measure.
pub fn constraint_residual(program: &LfpProgram, x: &[f64]) -> f64 {
    program
        .rows
        .iter()
        .zip(&program.rhs)
        .map(|(row, rhs)| {
            let lhs: f64 = row.iter().zip(x).map(|(a, v)| a * v).sum();
            (lhs - rhs).abs()
        })
        .fold(0.0, f64::max)
}

fn lowest_index_strategy(mdp: &SynthesisMdp) -> Strategy {
    Strategy {
        choice: (0..mdp.num_states()).map(|s| mdp.enabled[s][0]).collect(),
    }
}

/// A feasible occupation measure: the stationary distribution of the
/// lowest-index-action strategy when its chain is unichain, otherwise the
/// result of a pure feasibility LP.
pub fn initial_feasible(
    mdp: &SynthesisMdp,
    program: &LfpProgram,
    analysis: &AnalysisConfig,
) -> Result<(OccupationMeasure, InitialPath), Error> {
    let strat = lowest_index_strategy(mdp);
    let (chain, kept) = strategy_chain_mapped(mdp, &strat)?;
    match cesaro_limit(&chain, analysis) {
        Ok(dist) => {
            let mut x = vec![0.0; program.vars.len()];
            for (chain_idx, &mdp_idx) in kept.iter().enumerate() {
                let var = program
                    .vars
                    .iter()
                    .position(|&(s, a)| s == mdp_idx && a == strat.action(mdp_idx))
                    .expect("strategy action is enabled");
                x[var] = dist.approx[chain_idx];
            }
            let residual = constraint_residual(program, &x);
            if residual > 1e-7 {
                return Err(Error::Internal(format!(
                    "initial stationary measure violates constraints by {residual:.3e}"
                )));
            }
            Ok((
                OccupationMeasure {
                    vars: program.vars.clone(),
                    x,
                    from_basic: false,
                },
                InitialPath::LowestIndexChain,
            ))
        }
        Err(Error::Multichain(_)) => {
            let lp = LinearProgram {
                objective: vec![0.0; program.vars.len()],
                rows: program.rows.clone(),
                rhs: program.rhs.clone(),
            };
            let sol = solve_lp(&lp)?;
            if sol.status != LpStatus::Optimal {
                return Err(Error::Internal(
                    "occupation polytope is empty; every MDP admits a stationary measure".into(),
                ));
            }
            Ok((
                OccupationMeasure {
                    vars: program.vars.clone(),
                    x: sol.x,
                    from_basic: true,
                },
                InitialPath::FeasibilityLp,
            ))
        }
        Err(e) => Err(e),
    }
}

/// `strategy_chain` plus the map from chain states back to MDP states.
fn strategy_chain_mapped(
    mdp: &SynthesisMdp,
    strat: &Strategy,
) -> Result<(crate::product::CostMarkovChain, Vec<usize>), Error> {
    let chain = strategy_chain(mdp, strat)?;
    // chain state names are the MDP state names, which are unique
    let kept = chain
        .states
        .iter()
        .map(|name| {
            mdp.states
                .iter()
                .position(|n| n == name)
                .expect("chain state names come from the MDP")
        })
        .collect();
    Ok((chain, kept))
}

/// Strategy read off an occupation measure: the maximal-weight action where
/// any weight is positive, the lowest-index enabled action elsewhere (all
/// retained actions keep the run inside the pruned safe set).
///
/// A basic solution supports at most one action per state; two positive
/// actions in one state then indicate an internal inconsistency.
pub fn extract_strategy(
    measure: &OccupationMeasure,
    mdp: &SynthesisMdp,
) -> Result<Strategy, Error> {
    extract_strategy_with_tol(measure, mdp, LfpConfig::default().zero_tol)
}

fn extract_strategy_with_tol(
    measure: &OccupationMeasure,
    mdp: &SynthesisMdp,
    zero_tol: f64,
) -> Result<Strategy, Error> {
    let mut choice: Vec<Option<Letter>> = vec![None; mdp.num_states()];
    let mut best = vec![0.0; mdp.num_states()];
    let mut positives = vec![0usize; mdp.num_states()];
    for (v, &(s, a)) in measure.vars.iter().enumerate() {
        let weight = measure.x[v];
        if weight > zero_tol {
            positives[s] += 1;
            if weight > best[s] {
                best[s] = weight;
                choice[s] = Some(a);
            }
        }
    }
    for s in 0..mdp.num_states() {
        if measure.from_basic && positives[s] > 1 {
            return Err(Error::Internal(format!(
                "basic occupation measure supports {} actions in state {}",
                positives[s], mdp.states[s]
            )));
        }
    }
    let choice = choice
        .into_iter()
        .enumerate()
        .map(|(s, c)| c.unwrap_or(mdp.enabled[s][0]))
        .collect();
    Ok(Strategy { choice })
}

/// Greatest set of states with an action passing `keep` whose successors all
/// stay in the set. The returned per-state action is the lowest-index such
/// action. Empty result means no strategy can confine the run this way.
fn closed_end_set(
    mdp: &SynthesisMdp,
    keep: impl Fn(usize, usize) -> bool,
) -> (Vec<bool>, Vec<Option<usize>>) {
    let n = mdp.num_states();
    let mut inside = vec![true; n];
    loop {
        let mut changed = false;
        for s in 0..n {
            if !inside[s] {
                continue;
            }
            let ok = (0..mdp.enabled[s].len()).find(|&i| {
                keep(s, i) && mdp.trans[s][i].iter().all(|(t, _)| inside[*t])
            });
            if ok.is_none() {
                inside[s] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let action = (0..n)
        .map(|s| {
            if !inside[s] {
                return None;
            }
            (0..mdp.enabled[s].len())
                .find(|&i| keep(s, i) && mdp.trans[s][i].iter().all(|(t, _)| inside[*t]))
        })
        .collect();
    (inside, action)
}

/// States from which the target set can be reached with probability one,
/// together with a progress action for each such state outside the target.
fn almost_sure_reach(
    mdp: &SynthesisMdp,
    target: &[bool],
) -> (Vec<bool>, Vec<Option<usize>>) {
    let n = mdp.num_states();
    let mut w: Vec<bool> = vec![true; n];
    loop {
        // actions allowed inside the candidate set
        let allowed: Vec<Vec<usize>> = (0..n)
            .map(|s| {
                (0..mdp.enabled[s].len())
                    .filter(|&i| mdp.trans[s][i].iter().all(|(t, _)| w[*t]))
                    .collect()
            })
            .collect();
        // backward closure of the target through allowed edges
        let mut can = vec![false; n];
        let mut stack: Vec<usize> = (0..n).filter(|&s| w[s] && target[s]).collect();
        for &s in &stack {
            can[s] = true;
        }
        let mut incoming: Vec<Vec<usize>> = vec![Vec::new(); n];
        for s in 0..n {
            if !w[s] {
                continue;
            }
            for &i in &allowed[s] {
                for (t, _) in &mdp.trans[s][i] {
                    incoming[*t].push(s);
                }
            }
        }
        while let Some(t) = stack.pop() {
            for &s in &incoming[t] {
                if !can[s] {
                    can[s] = true;
                    stack.push(s);
                }
            }
        }
        if can == w {
            break;
        }
        w = can;
    }
    // distances through allowed edges, then pick descending actions
    let allowed: Vec<Vec<usize>> = (0..n)
        .map(|s| {
            (0..mdp.enabled[s].len())
                .filter(|&i| w[s] && mdp.trans[s][i].iter().all(|(t, _)| w[*t]))
                .collect()
        })
        .collect();
    let mut dist = vec![usize::MAX; n];
    let mut queue: std::collections::VecDeque<usize> =
        (0..n).filter(|&s| w[s] && target[s]).collect();
    for &s in &queue {
        dist[s] = 0;
    }
    let mut incoming: Vec<Vec<usize>> = vec![Vec::new(); n];
    for s in 0..n {
        for &i in &allowed[s] {
            for (t, _) in &mdp.trans[s][i] {
                incoming[*t].push(s);
            }
        }
    }
    while let Some(t) = queue.pop_front() {
        for &s in &incoming[t] {
            if dist[s] == usize::MAX {
                dist[s] = dist[t] + 1;
                queue.push_back(s);
            }
        }
    }
    let action = (0..n)
        .map(|s| {
            if !w[s] || target[s] {
                return None;
            }
            allowed[s].iter().copied().find(|&i| {
                mdp.trans[s][i]
                    .iter()
                    .any(|(t, _)| dist[*t] < dist[s])
            })
        })
        .collect();
    (w, action)
}

fn ratio_value(program: &LfpProgram, x: &[f64], zero_tol: f64) -> ExtendedValue {
    let num: f64 = program
        .cost1
        .iter()
        .zip(x)
        .map(|(c, v)| rational_to_f64(c) * v)
        .sum();
    let den: f64 = program
        .cost2
        .iter()
        .zip(x)
        .map(|(c, v)| rational_to_f64(c) * v)
        .sum();
    if num <= zero_tol {
        ExtendedValue::approx(0.0)
    } else if den <= zero_tol {
        ExtendedValue::Infinity
    } else {
        ExtendedValue::approx(num / den)
    }
}

/// Bottom strongly connected components of the everything-enabled graph; a
/// count above one means some strategies can separate into different
/// recurrent regions and the unichain reduction may not apply.
pub fn bottom_scc_count(mdp: &SynthesisMdp) -> usize {
    let adj: Vec<Vec<usize>> = (0..mdp.num_states())
        .map(|s| {
            let mut succ: Vec<usize> = mdp.trans[s]
                .iter()
                .flat_map(|dist| dist.iter().map(|(t, _)| *t))
                .collect();
            succ.sort_unstable();
            succ.dedup();
            succ
        })
        .collect();
    let sccs = strongly_connected_components(&adj);
    sccs.iter()
        .filter(|component| {
            component
                .iter()
                .all(|&s| adj[s].iter().all(|t| component.binary_search(t).is_ok()))
        })
        .count()
}

/// Computes an optimal pure memoryless strategy and the optimal ratio value
/// for a pruned synthesis MDP.
pub fn solve_lfp(mdp: &SynthesisMdp, cfg: &LfpConfig) -> Result<LfpResult, Error> {
    if mdp.num_states() == 0 || mdp.enabled.iter().any(Vec::is_empty) {
        return Err(Error::Input(
            "LFP needs a pruned MDP with an enabled action in every state".into(),
        ));
    }
    let bottoms = bottom_scc_count(mdp);
    if bottoms != 1 && !cfg.allow_multichain {
        return Err(Error::MultichainSuspect(bottoms));
    }
    let program = build_lfp(mdp);
    let mut warnings = Vec::new();

    // denominator assumption: can some strategy trap the run among
    // zero-second-cost actions?
    let (zero_den_set, _) = closed_end_set(mdp, |s, i| mdp.cost2[s][i].is_zero());
    if zero_den_set.iter().any(|&b| b) {
        let (zero_zero_set, inside_action) =
            closed_end_set(mdp, |s, i| mdp.cost1[s][i].is_zero() && mdp.cost2[s][i].is_zero());
        if zero_zero_set.iter().any(|&b| b) {
            let (w, progress) = almost_sure_reach(mdp, &zero_zero_set);
            if w[mdp.initial] {
                return finish_zero_value(
                    mdp,
                    &program,
                    &zero_zero_set,
                    &inside_action,
                    &progress,
                    cfg,
                    warnings,
                );
            }
        }
        // no almost-surely reachable free set; see whether any strategy has
        // a positive long-run denominator at all
        let max_den = solve_lp(&LinearProgram {
            objective: program.cost2.iter().map(|c| -rational_to_f64(c)).collect(),
            rows: program.rows.clone(),
            rhs: program.rhs.clone(),
        })?;
        if max_den.status != LpStatus::Optimal {
            return Err(Error::Internal("denominator LP must be solvable".into()));
        }
        if -max_den.objective_value <= cfg.zero_tol {
            // every strategy accumulates no second cost; first costs decide
            let (zero_num_set, inside_action) =
                closed_end_set(mdp, |s, i| mdp.cost1[s][i].is_zero());
            if zero_num_set.iter().any(|&b| b) {
                let (w, progress) = almost_sure_reach(mdp, &zero_num_set);
                if w[mdp.initial] {
                    warnings.push(
                        "all strategies have zero long-run second cost; a zero-first-cost class decides the value"
                            .into(),
                    );
                    return finish_zero_value(
                        mdp,
                        &program,
                        &zero_num_set,
                        &inside_action,
                        &progress,
                        cfg,
                        warnings,
                    );
                }
            }
            warnings.push(
                "all strategies have zero long-run second cost and positive first cost: the value diverges"
                    .into(),
            );
            return Ok(LfpResult {
                value: ExtendedValue::Infinity,
                measure: OccupationMeasure {
                    vars: program.vars.clone(),
                    x: max_den.x,
                    from_basic: true,
                },
                strategy: lowest_index_strategy(mdp),
                iterations: 0,
                history: vec![ExtendedValue::Infinity],
                lp_optima: Vec::new(),
                warnings,
            });
        }
        warnings.push(
            "some strategies confine the run to zero-second-cost actions; the minimization avoids them"
                .into(),
        );
    }

    let (initial, path) = initial_feasible(mdp, &program, &cfg.analysis)?;
    if path == InitialPath::FeasibilityLp {
        warnings.push("initial point came from a feasibility LP because the lowest-index strategy is multichain".into());
    }
    let mut x = initial.x.clone();
    let mut g = ratio_value(&program, &x, cfg.zero_tol);
    let mut history = vec![g.clone()];
    let mut lp_optima = Vec::new();
    let mut iterations = 0;

    if g.is_infinite() {
        // the stated iteration needs a finite starting ratio; maximize the
        // denominator once to land on one
        let sol = solve_lp(&LinearProgram {
            objective: program.cost2.iter().map(|c| -rational_to_f64(c)).collect(),
            rows: program.rows.clone(),
            rhs: program.rhs.clone(),
        })?;
        if sol.status != LpStatus::Optimal || -sol.objective_value <= cfg.zero_tol {
            return Err(Error::Internal(
                "initial ratio is infinite but no positive-denominator measure exists".into(),
            ));
        }
        warnings.push(
            "initial feasible point has zero long-run second cost; restarted from the maximal-denominator measure"
                .into(),
        );
        x = sol.x;
        g = ratio_value(&program, &x, cfg.zero_tol);
        history.push(g.clone());
    }

    loop {
        if iterations >= cfg.max_iterations {
            return Err(Error::NonConvergence(cfg.max_iterations));
        }
        let g_val = g.as_f64().expect("loop ratio is finite");
        let objective: Vec<f64> = program
            .cost1
            .iter()
            .zip(&program.cost2)
            .map(|(c1, c2)| rational_to_f64(c1) - g_val * rational_to_f64(c2))
            .collect();
        let sol = solve_lp(&LinearProgram {
            objective,
            rows: program.rows.clone(),
            rhs: program.rhs.clone(),
        })?;
        if sol.status != LpStatus::Optimal {
            return Err(Error::Numerical(format!(
                "parametric LP returned {:?} at g = {g_val}",
                sol.status
            )));
        }
        lp_optima.push(sol.objective_value);
        iterations += 1;
        let next = ratio_value(&program, &sol.x, cfg.zero_tol);
        if next.is_infinite() {
            return Err(Error::Internal(
                "parametric LP produced an infinite-ratio iterate".into(),
            ));
        }
        let next_val = next.as_f64().unwrap();
        x = sol.x;
        history.push(next.clone());
        let done = (g_val - next_val).abs() <= cfg.epsilon * (1.0 + next_val.abs());
        g = next;
        if done {
            break;
        }
    }

    // the loop always ran at least once, so x is a vertex solution
    let measure = OccupationMeasure {
        vars: program.vars.clone(),
        x,
        from_basic: true,
    };
    let strategy = extract_strategy_with_tol(&measure, mdp, cfg.zero_tol)?;
    let value = verify_against_chain(mdp, &strategy, &g, cfg)?;
    Ok(LfpResult {
        value,
        measure,
        strategy,
        iterations,
        history,
        lp_optima,
        warnings,
    })
}

/// Wraps up the zero-optimum case: a strategy that reaches and then stays in
/// a zero-first-cost closed set, plus a measure from the minimum-numerator
/// LP (a valid Dinkelbach step at g = 0).
fn finish_zero_value(
    mdp: &SynthesisMdp,
    program: &LfpProgram,
    inside_set: &[bool],
    inside_action: &[Option<usize>],
    progress_action: &[Option<usize>],
    cfg: &LfpConfig,
    mut warnings: Vec<String>,
) -> Result<LfpResult, Error> {
    let choice = (0..mdp.num_states())
        .map(|s| {
            let i = if inside_set[s] {
                inside_action[s].expect("inside states keep a confined action")
            } else {
                progress_action[s].unwrap_or(0)
            };
            mdp.enabled[s][i]
        })
        .collect();
    let strategy = Strategy { choice };
    let sol = solve_lp(&LinearProgram {
        objective: program.cost1.iter().map(rational_to_f64).collect(),
        rows: program.rows.clone(),
        rhs: program.rhs.clone(),
    })?;
    if sol.status != LpStatus::Optimal || sol.objective_value > cfg.zero_tol {
        return Err(Error::Internal(format!(
            "zero value detected structurally but the numerator LP reports {:?} / {}",
            sol.status, sol.objective_value
        )));
    }
    warnings.push("optimal value is zero: a zero-first-cost closed set is reachable almost surely".into());
    // the induced chain may split into several classes inside the free set;
    // all of them must carry zero first costs
    let chain = strategy_chain(mdp, &strategy)?;
    let structure = classify(&chain);
    for class in &structure.recurrent_classes {
        if class.iter().any(|&s| !chain.cost1[s].is_zero()) {
            return Err(Error::Internal(
                "zero-value strategy has a recurrent class with positive first cost".into(),
            ));
        }
    }
    Ok(LfpResult {
        value: ExtendedValue::zero(),
        measure: OccupationMeasure {
            vars: program.vars.clone(),
            x: sol.x,
            from_basic: true,
        },
        strategy,
        iterations: 1,
        history: vec![ExtendedValue::zero()],
        lp_optima: vec![sol.objective_value],
        warnings,
    })
}

/// Cross-checks the converged ratio against the exact analytic value of the
/// extracted strategy's chain and returns the exact value on success.
fn verify_against_chain(
    mdp: &SynthesisMdp,
    strategy: &Strategy,
    g: &ExtendedValue,
    cfg: &LfpConfig,
) -> Result<ExtendedValue, Error> {
    let chain = strategy_chain(mdp, strategy)?;
    let g_val = g.as_f64().expect("verified ratio is finite");
    match expected_ratio(&chain, &cfg.analysis) {
        Ok(analytic) => match analytic.as_f64() {
            Some(a) if (a - g_val).abs() <= 1e-6 * (1.0 + g_val.abs()) => Ok(analytic),
            Some(a) => Err(Error::Internal(format!(
                "extracted strategy's chain has value {a}, solver converged to {g_val}"
            ))),
            None => Err(Error::Internal(format!(
                "extracted strategy's chain diverges, solver converged to {g_val}"
            ))),
        },
        Err(Error::Multichain(structure)) => {
            // tolerated only in the zero-value case where every class is free
            let chain = strategy_chain(mdp, strategy)?;
            let all_zero = structure
                .recurrent_classes
                .iter()
                .all(|class| class.iter().all(|&s| chain.cost1[s].is_zero()));
            if all_zero && g_val.abs() <= 1e-6 {
                Ok(ExtendedValue::zero())
            } else {
                Err(Error::Internal(format!(
                    "extracted strategy induces a multichain with {} classes at value {g_val}",
                    structure.recurrent_classes.len()
                )))
            }
        }
        Err(e) => Err(e),
    }
}
