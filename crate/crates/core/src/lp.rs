//! LP relaxation of the knapsack model, solved with a dense bounded-variable
//! revised simplex.
//!
//! The relaxation is `max p.x  s.t.  Wx <= r, 0 <= x <= 1`. Slack variables
//! turn the rows into equalities, the all-slack basis is primal feasible
//! (capacities are positive), and nonbasic variables rest at one of their
//! bounds. Dantzig pricing runs first and the solver falls back to Bland's
//! rule after `5 (n + m)` iterations to rule out cycling; the hard stop is
//! `50 (n + m)` iterations.
//!
//! The capacity-row duals are the weight vector consumed by the efficiency
//! computation, so every solve is certified before it is reported optimal:
//! primal feasibility of the extracted point and the strong-duality identity
//! `obj = lambda.r + sum_j max(0, p_j - lambda.w_j)` must hold within
//! tolerance, otherwise the solve is downgraded to `Failed` and the caller
//! falls back to uniform weights.

use crate::instance::Instance;

/// Feasibility and reduced-cost tolerance.
const TOL: f64 = 1e-9;
/// Smallest pivot magnitude accepted during the ratio test.
const PIVOT_TOL: f64 = 1e-9;
/// Relative tolerance of the final strong-duality certificate.
const CERT_TOL: f64 = 1e-6;
/// Pivots between refactorizations of the basis inverse.
const REFACTOR_EVERY: u32 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Failed,
}

/// Solution of the LP relaxation, including the capacity-row duals.
#[derive(Debug, Clone)]
pub struct LpSolution {
    /// Relaxed selection levels, each in `[0, 1]`.
    pub primal_values: Vec<f64>,
    pub primal_objective: f64,
    /// Non-negative duals of the `m` capacity rows.
    pub duals: Vec<f64>,
    pub status: LpStatus,
    pub iterations: u32,
}

impl LpSolution {
    fn failed(n: usize, m: usize, iterations: u32) -> Self {
        Self {
            primal_values: vec![0.0; n],
            primal_objective: 0.0,
            duals: vec![0.0; m],
            status: LpStatus::Failed,
            iterations,
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum VarState {
    Basic(usize),
    AtLower,
    AtUpper,
}

/// Working state of one solve. Variables `0..n` are the structural items
/// (bounds `[0, 1]`), variables `n..n+m` the row slacks (bounds `[0, inf)`).
struct Simplex<'a> {
    inst: &'a Instance,
    n: usize,
    m: usize,
    state: Vec<VarState>,
    basis: Vec<usize>,
    /// Dense basis inverse, row-major m x m.
    b_inv: Vec<f64>,
    /// Values of the basic variables, aligned with `basis`.
    x_basic: Vec<f64>,
}

impl<'a> Simplex<'a> {
    fn new(inst: &'a Instance) -> Self {
        let n = inst.n();
        let m = inst.m();
        let mut state = vec![VarState::AtLower; n + m];
        let mut basis = Vec::with_capacity(m);
        let mut b_inv = vec![0.0; m * m];
        for i in 0..m {
            state[n + i] = VarState::Basic(i);
            basis.push(n + i);
            b_inv[i * m + i] = 1.0;
        }
        let x_basic = inst.capacities().iter().map(|&r| r as f64).collect();
        Self {
            inst,
            n,
            m,
            state,
            basis,
            b_inv,
            x_basic,
        }
    }

    fn cost(&self, var: usize) -> f64 {
        if var < self.n {
            self.inst.profit(var) as f64
        } else {
            0.0
        }
    }

    fn upper(&self, var: usize) -> f64 {
        if var < self.n {
            1.0
        } else {
            f64::INFINITY
        }
    }

    /// `B^-1 a_var`; slack columns are unit vectors, so theirs is a column
    /// of the inverse.
    fn ftran(&self, var: usize) -> Vec<f64> {
        let m = self.m;
        if var >= self.n {
            let k = var - self.n;
            return (0..m).map(|i| self.b_inv[i * m + k]).collect();
        }
        let col = self.inst.item_weights(var);
        (0..m)
            .map(|i| {
                let row = &self.b_inv[i * m..(i + 1) * m];
                row.iter().zip(col).map(|(&b, &w)| b * w as f64).sum()
            })
            .collect()
    }

    /// Simplex multipliers `y = c_B B^-1`.
    fn multipliers(&self) -> Vec<f64> {
        let m = self.m;
        let mut y = vec![0.0; m];
        for (row, &var) in self.basis.iter().enumerate() {
            let c = self.cost(var);
            if c != 0.0 {
                for (yk, &b) in y.iter_mut().zip(&self.b_inv[row * m..(row + 1) * m]) {
                    *yk += c * b;
                }
            }
        }
        y
    }

    fn reduced_cost(&self, var: usize, y: &[f64]) -> f64 {
        if var >= self.n {
            return -y[var - self.n];
        }
        let dot: f64 = y
            .iter()
            .zip(self.inst.item_weights(var))
            .map(|(&yi, &w)| yi * w as f64)
            .sum();
        self.cost(var) - dot
    }

    /// Picks the entering variable, or None when optimal. `bland` switches
    /// from largest-violation pricing to least-index anti-cycling.
    fn price(&self, y: &[f64], bland: bool) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for var in 0..self.n + self.m {
            let score = match self.state[var] {
                VarState::Basic(_) => continue,
                VarState::AtLower => self.reduced_cost(var, y),
                VarState::AtUpper => -self.reduced_cost(var, y),
            };
            if score > TOL {
                if bland {
                    return Some(var);
                }
                if best.is_none_or(|(_, s)| score > s) {
                    best = Some((var, score));
                }
            }
        }
        best.map(|(var, _)| var)
    }

    /// One pivot (or bound flip) on entering variable `q`. Returns false on
    /// numerical breakdown.
    fn step(&mut self, q: usize) -> bool {
        // Direction: +1 when q rises off its lower bound, -1 off its upper.
        let sigma = match self.state[q] {
            VarState::AtLower => 1.0,
            VarState::AtUpper => -1.0,
            VarState::Basic(_) => unreachable!("entering variable is basic"),
        };
        let alpha = self.ftran(q);

        // Ratio test: first basic variable to hit a bound, or q's own
        // opposite bound (a flip). Leaving ties break on the smallest
        // variable index, as Bland's rule requires.
        let t_flip = self.upper(q); // flip distance; inf for slacks
        let mut t_row = f64::INFINITY;
        let mut leave: Option<(usize, bool)> = None; // (row, exits_at_lower)
        for (i, &a) in alpha.iter().enumerate() {
            let v = sigma * a;
            let (t, at_lower) = if v > PIVOT_TOL {
                (self.x_basic[i] / v, true)
            } else if v < -PIVOT_TOL {
                let ub = self.upper(self.basis[i]);
                if ub.is_infinite() {
                    continue;
                }
                ((ub - self.x_basic[i]) / -v, false)
            } else {
                continue;
            };
            let t = t.max(0.0);
            let take = match leave {
                None => true,
                Some((row, _)) => {
                    t < t_row - TOL || (t <= t_row + TOL && self.basis[i] < self.basis[row])
                }
            };
            if take {
                t_row = t.min(t_row);
                leave = Some((i, at_lower));
            }
        }

        if t_flip.is_infinite() && leave.is_none() {
            // Unbounded ray; cannot happen for a box-bounded objective.
            return false;
        }

        if t_flip <= t_row {
            // Bound flip: q crosses to its opposite bound, basis unchanged.
            for (i, &a) in alpha.iter().enumerate() {
                self.x_basic[i] -= sigma * t_flip * a;
            }
            self.state[q] = match self.state[q] {
                VarState::AtLower => VarState::AtUpper,
                VarState::AtUpper => VarState::AtLower,
                VarState::Basic(_) => unreachable!(),
            };
            true
        } else {
            let (row, exits_at_lower) = leave.expect("bounded step must have a leaving row");
            let t_best = t_row;
            let pivot = alpha[row];
            if pivot.abs() <= PIVOT_TOL {
                return false;
            }
            let old = self.basis[row];
            self.state[old] = if exits_at_lower {
                VarState::AtLower
            } else {
                VarState::AtUpper
            };
            let entering_value = match self.state[q] {
                VarState::AtLower => t_best,
                VarState::AtUpper => self.upper(q) - t_best,
                VarState::Basic(_) => unreachable!(),
            };
            for (i, &a) in alpha.iter().enumerate() {
                if i != row {
                    self.x_basic[i] -= sigma * t_best * a;
                }
            }
            self.x_basic[row] = entering_value;
            self.basis[row] = q;
            self.state[q] = VarState::Basic(row);

            // Product-form update of the inverse.
            let m = self.m;
            let inv_pivot = 1.0 / pivot;
            for k in 0..m {
                self.b_inv[row * m + k] *= inv_pivot;
            }
            for (i, &f) in alpha.iter().enumerate() {
                if i == row || f == 0.0 {
                    continue;
                }
                for k in 0..m {
                    self.b_inv[i * m + k] -= f * self.b_inv[row * m + k];
                }
            }
            true
        }
    }

    /// Rebuilds `b_inv` and `x_basic` from scratch (Gauss-Jordan with
    /// partial pivoting), clearing accumulated update error.
    fn refactorize(&mut self) -> bool {
        let m = self.m;
        let mut a = vec![0.0; m * m]; // basis matrix, row-major
        for (col, &var) in self.basis.iter().enumerate() {
            if var >= self.n {
                a[(var - self.n) * m + col] = 1.0;
            } else {
                for (i, &w) in self.inst.item_weights(var).iter().enumerate() {
                    a[i * m + col] = w as f64;
                }
            }
        }
        let mut inv = vec![0.0; m * m];
        for i in 0..m {
            inv[i * m + i] = 1.0;
        }
        for col in 0..m {
            let pivot_row = (col..m)
                .max_by(|&p, &q| {
                    a[p * m + col]
                        .abs()
                        .partial_cmp(&a[q * m + col].abs())
                        .unwrap()
                })
                .unwrap();
            if a[pivot_row * m + col].abs() <= PIVOT_TOL {
                return false; // singular basis
            }
            if pivot_row != col {
                for k in 0..m {
                    a.swap(pivot_row * m + k, col * m + k);
                    inv.swap(pivot_row * m + k, col * m + k);
                }
            }
            let p = a[col * m + col];
            for k in 0..m {
                a[col * m + k] /= p;
                inv[col * m + k] /= p;
            }
            for i in 0..m {
                if i == col {
                    continue;
                }
                let f = a[i * m + col];
                if f != 0.0 {
                    for k in 0..m {
                        a[i * m + k] -= f * a[col * m + k];
                        inv[i * m + k] -= f * inv[col * m + k];
                    }
                }
            }
        }
        self.b_inv = inv;

        // x_B = B^-1 (r - sum of at-upper columns)
        let mut rhs: Vec<f64> = self.inst.capacities().iter().map(|&r| r as f64).collect();
        for var in 0..self.n {
            if self.state[var] == VarState::AtUpper {
                for (i, &w) in self.inst.item_weights(var).iter().enumerate() {
                    rhs[i] -= w as f64;
                }
            }
        }
        for i in 0..m {
            let row = &self.b_inv[i * m..(i + 1) * m];
            self.x_basic[i] = row.iter().zip(&rhs).map(|(&b, &v)| b * v).sum();
        }
        true
    }

    fn extract(&self, iterations: u32) -> LpSolution {
        let x: Vec<f64> = self.state[..self.n]
            .iter()
            .map(|state| match state {
                VarState::AtLower => 0.0,
                VarState::AtUpper => 1.0,
                VarState::Basic(row) => self.x_basic[*row].clamp(0.0, 1.0),
            })
            .collect();
        let duals: Vec<f64> = self.multipliers().iter().map(|&y| y.max(0.0)).collect();
        let objective = self
            .inst
            .profits()
            .iter()
            .zip(&x)
            .map(|(&p, &xv)| p as f64 * xv)
            .sum();
        LpSolution {
            primal_values: x,
            primal_objective: objective,
            duals,
            status: LpStatus::Optimal,
            iterations,
        }
    }
}

/// Certificate check run on every solve before it is reported optimal.
fn certify(inst: &Instance, sol: &LpSolution) -> bool {
    let feas_tol = CERT_TOL
        * (1.0
            + inst
                .capacities()
                .iter()
                .fold(0.0f64, |acc, &r| acc.max(r as f64)));
    for i in 0..inst.m() {
        let used: f64 = inst
            .resource_weights(i)
            .iter()
            .zip(&sol.primal_values)
            .map(|(&w, &x)| w as f64 * x)
            .sum();
        if used > inst.capacity(i) as f64 + feas_tol {
            return false;
        }
    }
    if sol.primal_values.iter().any(|&x| !(-TOL..=1.0 + TOL).contains(&x)) {
        return false;
    }
    // Strong duality with the implied upper-bound duals mu_j.
    let mut dual_obj: f64 = sol
        .duals
        .iter()
        .zip(inst.capacities())
        .map(|(&l, &r)| l * r as f64)
        .sum();
    for j in 0..inst.n() {
        let priced: f64 = sol
            .duals
            .iter()
            .zip(inst.item_weights(j))
            .map(|(&l, &w)| l * w as f64)
            .sum();
        dual_obj += (inst.profit(j) as f64 - priced).max(0.0);
    }
    (sol.primal_objective - dual_obj).abs() <= CERT_TOL * (1.0 + sol.primal_objective.abs())
}

/// Solves the LP relaxation `max p.x, Wx <= r, 0 <= x <= 1`.
///
/// Returns duals of the capacity rows alongside the primal point. On
/// iteration-limit or numerical breakdown the status is `Failed` and the
/// caller is expected to fall back to uniform weights.
pub fn solve_lp_relaxation(inst: &Instance) -> LpSolution {
    let n = inst.n();
    let m = inst.m();
    let bland_after = 5 * (n + m) as u32;
    let max_iterations = 50 * (n + m) as u32;

    let mut sx = Simplex::new(inst);
    let mut iterations = 0u32;
    let mut pivots_since_refactor = 0u32;
    loop {
        let y = sx.multipliers();
        let entering = sx.price(&y, iterations >= bland_after);
        let Some(q) = entering else {
            break;
        };
        iterations += 1;
        if iterations > max_iterations {
            return LpSolution::failed(n, m, iterations);
        }
        if !sx.step(q) {
            return LpSolution::failed(n, m, iterations);
        }
        pivots_since_refactor += 1;
        if pivots_since_refactor >= REFACTOR_EVERY {
            if !sx.refactorize() {
                return LpSolution::failed(n, m, iterations);
            }
            pivots_since_refactor = 0;
        }
    }

    // Final clean factorization before extracting the certificate data.
    if pivots_since_refactor > 0 && !sx.refactorize() {
        return LpSolution::failed(n, m, iterations);
    }
    let sol = sx.extract(iterations);
    if certify(inst, &sol) {
        sol
    } else {
        LpSolution::failed(n, m, iterations)
    }
}
