//! Equality-form linear programs and a dense two-phase revised simplex.
//!
//! Solves `minimize c·x  subject to  A x = b, x >= 0` and returns a basic
//! feasible optimal solution. Pricing is Dantzig's rule, switching to
//! Bland's rule after a streak of degenerate pivots so the method cannot
//! cycle; all remaining ties break on the lowest variable index, which makes
//! results deterministic across runs and platforms.

use crate::error::Error;

/// `minimize objective · x` subject to `rows · x = rhs` and `x >= 0`.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub rows: Vec<Vec<f64>>,
    pub rhs: Vec<f64>,
}

impl LinearProgram {
    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Result of a solve. For non-optimal statuses `x` is all zeros and the
/// objective value is NaN.
#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: Vec<f64>,
    pub objective_value: f64,
    /// Per-variable flag: in the final basis. Optimal solutions are vertices
    /// of the feasible polytope.
    pub basic: Vec<bool>,
}

/// Backend interface so an external LP solver can be swapped in behind the
/// same contract.
pub trait LpBackend {
    fn solve(&self, lp: &LinearProgram) -> Result<LpSolution, Error>;
}

#[derive(Debug, Clone)]
pub struct SimplexConfig {
    /// Absolute tolerance on constraint residuals and phase-1 leftovers.
    pub feasibility_tol: f64,
    /// Reduced costs above minus this are treated as nonnegative.
    pub optimality_tol: f64,
    pub max_iterations: usize,
    /// Consecutive degenerate pivots before switching to Bland's rule.
    pub degenerate_switch: usize,
    /// Pivots between basis-inverse refactorizations.
    pub refactor_every: usize,
}

impl Default for SimplexConfig {
    fn default() -> Self {
        SimplexConfig {
            feasibility_tol: 1e-9,
            optimality_tol: 1e-9,
            max_iterations: 50_000,
            degenerate_switch: 40,
            refactor_every: 50,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct RevisedSimplex {
    pub config: SimplexConfig,
}

/// Solves with the default revised simplex backend.
pub fn solve_lp(lp: &LinearProgram) -> Result<LpSolution, Error> {
    RevisedSimplex::default().solve(lp)
}

impl LpBackend for RevisedSimplex {
    fn solve(&self, lp: &LinearProgram) -> Result<LpSolution, Error> {
        Solver::new(lp, &self.config)?.run()
    }
}

struct Solver<'a> {
    cfg: &'a SimplexConfig,
    n: usize,
    m: usize,
    /// Column-major constraint matrix including artificial columns.
    cols: Vec<Vec<f64>>,
    b: Vec<f64>,
    objective: Vec<f64>,
    basis: Vec<usize>,
    binv: Vec<Vec<f64>>,
    x_b: Vec<f64>,
    /// Artificials may never re-enter once they left the basis.
    banned: Vec<bool>,
    degenerate_streak: usize,
    bland: bool,
    pivots_since_refactor: usize,
}

impl<'a> Solver<'a> {
    fn new(lp: &'a LinearProgram, cfg: &'a SimplexConfig) -> Result<Self, Error> {
        let n = lp.num_vars();
        let m = lp.num_rows();
        for (i, row) in lp.rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Input(format!(
                    "constraint row {i} has {} coefficients for {n} variables",
                    row.len()
                )));
            }
        }
        if lp.rhs.len() != m {
            return Err(Error::Input("rhs length differs from row count".into()));
        }
        if lp.rhs.iter().any(|v| !v.is_finite()) {
            return Err(Error::Input("rhs must be finite".into()));
        }
        // orient rows so b >= 0, then append one artificial per row
        let mut cols = vec![vec![0.0; m]; n + m];
        let mut b = vec![0.0; m];
        for i in 0..m {
            let flip = lp.rhs[i] < 0.0;
            let sign = if flip { -1.0 } else { 1.0 };
            b[i] = sign * lp.rhs[i];
            for j in 0..n {
                cols[j][i] = sign * lp.rows[i][j];
            }
            cols[n + i][i] = 1.0;
        }
        let basis: Vec<usize> = (n..n + m).collect();
        let binv: Vec<Vec<f64>> = (0..m)
            .map(|i| (0..m).map(|j| f64::from(u8::from(i == j))).collect())
            .collect();
        let x_b = b.clone();
        Ok(Solver {
            cfg,
            n,
            m,
            cols,
            b,
            objective: lp.objective.clone(),
            basis,
            binv,
            x_b,
            banned: vec![false; n + m],
            degenerate_streak: 0,
            bland: false,
            pivots_since_refactor: 0,
        })
    }

    fn run(mut self) -> Result<LpSolution, Error> {
        // phase 1: minimize the artificial mass
        let phase1_cost: Vec<f64> = (0..self.n + self.m)
            .map(|j| f64::from(u8::from(j >= self.n)))
            .collect();
        self.iterate(&phase1_cost)?;
        let artificial_mass: f64 = (0..self.m)
            .filter(|&r| self.basis[r] >= self.n)
            .map(|r| self.x_b[r])
            .sum();
        let scale = 1.0 + self.b.iter().map(|v| v.abs()).fold(0.0, f64::max);
        if artificial_mass > self.cfg.feasibility_tol * scale {
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                x: vec![0.0; self.n],
                objective_value: f64::NAN,
                basic: vec![false; self.n],
            });
        }
        self.evict_artificials()?;

        // phase 2: minimize the real objective; artificial columns are
        // banned from entering, surviving ones sit on redundant rows at 0
        let mut phase2_cost = self.objective.clone();
        phase2_cost.resize(self.n + self.m, 0.0);
        for j in self.n..self.n + self.m {
            self.banned[j] = true;
        }
        self.degenerate_streak = 0;
        self.bland = false;
        let unbounded = !self.iterate(&phase2_cost)?;
        if unbounded {
            return Ok(LpSolution {
                status: LpStatus::Unbounded,
                x: vec![0.0; self.n],
                objective_value: f64::NAN,
                basic: vec![false; self.n],
            });
        }

        let mut x = vec![0.0; self.n];
        let mut basic = vec![false; self.n];
        for r in 0..self.m {
            if self.basis[r] < self.n {
                x[self.basis[r]] = self.x_b[r].max(0.0);
                basic[self.basis[r]] = true;
            }
        }
        let objective_value = self
            .objective
            .iter()
            .zip(&x)
            .map(|(c, v)| c * v)
            .sum();
        Ok(LpSolution {
            status: LpStatus::Optimal,
            x,
            objective_value,
            basic,
        })
    }

    /// Runs simplex iterations for the given cost vector. Returns false when
    /// the problem is unbounded in this phase.
    fn iterate(&mut self, cost: &[f64]) -> Result<bool, Error> {
        for _ in 0..self.cfg.max_iterations {
            let y = self.dual_prices(cost);
            let entering = match self.choose_entering(cost, &y) {
                Some(j) => j,
                None => return Ok(true),
            };
            let direction = self.ftran(entering);
            let leaving = match self.choose_leaving(&direction) {
                Some(r) => r,
                None => return Ok(false),
            };
            self.pivot(entering, leaving, &direction)?;
        }
        Err(Error::NonConvergence(self.cfg.max_iterations))
    }

    fn dual_prices(&self, cost: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.m];
        for (r, &j) in self.basis.iter().enumerate() {
            let cj = cost[j];
            if cj != 0.0 {
                for i in 0..self.m {
                    y[i] += cj * self.binv[r][i];
                }
            }
        }
        y
    }

    fn reduced_cost(&self, cost: &[f64], y: &[f64], j: usize) -> f64 {
        let mut d = cost[j];
        for i in 0..self.m {
            d -= y[i] * self.cols[j][i];
        }
        d
    }

    fn choose_entering(&self, cost: &[f64], y: &[f64]) -> Option<usize> {
        let tol = self.cfg.optimality_tol;
        let mut best: Option<(usize, f64)> = None;
        for j in 0..self.n + self.m {
            if self.banned[j] || self.basis.contains(&j) {
                continue;
            }
            let d = self.reduced_cost(cost, y, j);
            if d < -tol {
                if self.bland {
                    return Some(j);
                }
                match best {
                    Some((_, bd)) if d >= bd => {}
                    _ => best = Some((j, d)),
                }
            }
        }
        best.map(|(j, _)| j)
    }

    fn ftran(&self, j: usize) -> Vec<f64> {
        let mut u = vec![0.0; self.m];
        for r in 0..self.m {
            let mut acc = 0.0;
            for i in 0..self.m {
                acc += self.binv[r][i] * self.cols[j][i];
            }
            u[r] = acc;
        }
        u
    }

    fn choose_leaving(&self, u: &[f64]) -> Option<usize> {
        let eps = 1e-11;
        // rows holding an artificial at level zero must not drift positive:
        // pivot the artificial out immediately when the direction touches it
        for r in 0..self.m {
            if self.basis[r] >= self.n
                && self.x_b[r].abs() <= self.cfg.feasibility_tol
                && u[r].abs() > eps
            {
                return Some(r);
            }
        }
        let mut best: Option<(usize, f64)> = None;
        for r in 0..self.m {
            if u[r] > eps {
                let ratio = self.x_b[r] / u[r];
                match best {
                    None => best = Some((r, ratio)),
                    Some((br, bratio)) => {
                        if ratio < bratio - 1e-12
                            || (ratio <= bratio + 1e-12 && self.basis[r] < self.basis[br])
                        {
                            best = Some((r, ratio));
                        }
                    }
                }
            }
        }
        best.map(|(r, _)| r)
    }

    fn pivot(&mut self, entering: usize, leaving: usize, u: &[f64]) -> Result<(), Error> {
        let pivot = u[leaving];
        if pivot.abs() < 1e-12 {
            return Err(Error::Numerical(format!(
                "simplex pivot magnitude {pivot:.3e} below 1e-12 (row {leaving})"
            )));
        }
        let theta = self.x_b[leaving] / pivot;
        if theta.abs() <= self.cfg.feasibility_tol {
            self.degenerate_streak += 1;
            if self.degenerate_streak >= self.cfg.degenerate_switch {
                self.bland = true;
            }
        } else {
            self.degenerate_streak = 0;
        }
        if self.basis[leaving] >= self.n {
            self.banned[self.basis[leaving]] = true;
        }
        self.basis[leaving] = entering;
        let inv = 1.0 / pivot;
        for i in 0..self.m {
            self.binv[leaving][i] *= inv;
        }
        for r in 0..self.m {
            if r != leaving && u[r] != 0.0 {
                let factor = u[r];
                for i in 0..self.m {
                    self.binv[r][i] -= factor * self.binv[leaving][i];
                }
            }
        }
        self.pivots_since_refactor += 1;
        if self.pivots_since_refactor >= self.cfg.refactor_every {
            self.refactor()?;
        }
        self.recompute_x()?;
        Ok(())
    }

    fn recompute_x(&mut self) -> Result<(), Error> {
        for r in 0..self.m {
            let mut acc = 0.0;
            for i in 0..self.m {
                acc += self.binv[r][i] * self.b[i];
            }
            if acc < -1e-7 {
                return Err(Error::Numerical(format!(
                    "basic solution drifted infeasible: x_B[{r}] = {acc:.3e}"
                )));
            }
            self.x_b[r] = acc.max(0.0);
        }
        Ok(())
    }

    /// Recomputes the basis inverse from scratch by Gauss-Jordan with
    /// partial pivoting.
    fn refactor(&mut self) -> Result<(), Error> {
        self.pivots_since_refactor = 0;
        let m = self.m;
        let mut a: Vec<Vec<f64>> = (0..m)
            .map(|i| self.basis.iter().map(|&j| self.cols[j][i]).collect())
            .collect();
        let mut inv: Vec<Vec<f64>> = (0..m)
            .map(|i| (0..m).map(|j| f64::from(u8::from(i == j))).collect())
            .collect();
        for col in 0..m {
            let pivot_row = (col..m)
                .max_by(|&x, &y| a[x][col].abs().partial_cmp(&a[y][col].abs()).unwrap())
                .unwrap();
            let magnitude = a[pivot_row][col].abs();
            if magnitude < 1e-12 {
                return Err(Error::Numerical(format!(
                    "basis refactorization: pivot magnitude {magnitude:.3e} below 1e-12 in column {col}"
                )));
            }
            a.swap(col, pivot_row);
            inv.swap(col, pivot_row);
            let scale = 1.0 / a[col][col];
            for k in 0..m {
                a[col][k] *= scale;
                inv[col][k] *= scale;
            }
            for r in 0..m {
                if r != col && a[r][col] != 0.0 {
                    let f = a[r][col];
                    for k in 0..m {
                        a[r][k] -= f * a[col][k];
                        inv[r][k] -= f * inv[col][k];
                    }
                }
            }
        }
        self.binv = inv;
        Ok(())
    }

    /// After phase 1, swap basic artificials for original columns where
    /// possible; rows that admit no swap are redundant and keep their
    /// artificial pinned at zero.
    fn evict_artificials(&mut self) -> Result<(), Error> {
        for r in 0..self.m {
            if self.basis[r] < self.n {
                continue;
            }
            let mut replacement = None;
            for j in 0..self.n {
                if self.basis.contains(&j) {
                    continue;
                }
                let mut coeff = 0.0;
                for i in 0..self.m {
                    coeff += self.binv[r][i] * self.cols[j][i];
                }
                if coeff.abs() > 1e-9 {
                    replacement = Some(j);
                    break;
                }
            }
            if let Some(j) = replacement {
                let u = self.ftran(j);
                self.pivot(j, r, &u)?;
            }
        }
        Ok(())
    }
}
