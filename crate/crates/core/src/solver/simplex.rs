//! Dense two-phase primal simplex with explicit variable bounds.
//!
//! Rows are converted to equalities `a.x + s_i = b_i` where the row slack
//! `s_i` has bounds `[0, inf)` for `<=`, `(-inf, 0]` for `>=`, and `[0, 0]`
//! for `=`. Infeasible starting rows get an artificial column driven to zero
//! in phase 1. Dantzig pricing with a Bland fallback after a budget of
//! degenerate pivots; all choices are deterministic in the model order.

use crate::scalar::Scalar;

use super::{LpStatus, SolveError};

pub(crate) const FEAS_TOL: f64 = 1e-7;
pub(crate) const OPT_TOL: f64 = 1e-7;
const PIVOT_TOL: f64 = 1e-9;
const STEP_TOL: f64 = 1e-9;

/// One linear row over structural variables.
pub(crate) struct StdRow<S> {
    pub terms: Vec<(usize, S)>,
    pub sense: StdSense,
    pub rhs: S,
}

#[derive(Clone, Copy, PartialEq, Eq)]
pub(crate) enum StdSense {
    Le,
    Eq,
    Ge,
}

/// A bounded LP in computational form: maximize `obj . x`.
pub(crate) struct StdProblem<S> {
    pub obj: Vec<S>,
    pub lower: Vec<S>,
    pub upper: Vec<S>,
    pub rows: Vec<StdRow<S>>,
}

pub(crate) struct StdSolution<S> {
    pub status: LpStatus,
    pub value: S,
    pub primal: Vec<S>,
    /// One dual per row, in row order. Empty unless optimal.
    pub duals: Vec<S>,
}

#[derive(Clone, Copy, PartialEq)]
enum VarState {
    Basic(usize),
    AtLower,
    AtUpper,
}

struct Tableau<S> {
    m: usize,
    cols: usize,
    /// `rows[i]` is row i of B^-1 A over all columns.
    rows: Vec<Vec<S>>,
    lower: Vec<S>,
    upper: Vec<S>,
    state: Vec<VarState>,
    basis: Vec<usize>,
    /// Value of the basic variable of each row.
    xb: Vec<S>,
    /// Reduced costs for the current phase.
    zrow: Vec<S>,
    /// Column index of each row's slack (dual extraction anchor).
    slack_col: Vec<usize>,
    /// Row sign applied during construction (-1 where the artificial
    /// required flipping); `B^-1` column `i` is `sign[i] * rows[.][slack_i]`.
    row_sign: Vec<S>,
    /// The constraint matrix in column-sparse form, after row scaling,
    /// including slack and artificial entries. Never mutated by pivots;
    /// the drift-correcting refresh recomputes state from it.
    scaled_cols: Vec<Vec<(usize, S)>>,
    scaled_b: Vec<S>,
    artificial_start: usize,
}

pub(crate) fn solve_std<S: Scalar>(prob: &StdProblem<S>) -> Result<StdSolution<S>, SolveError> {
    let n = prob.obj.len();
    let m = prob.rows.len();
    for j in 0..n {
        if prob.lower[j] > prob.upper[j] + S::val(FEAS_TOL) {
            return Ok(StdSolution {
                status: LpStatus::Infeasible,
                value: S::zero(),
                primal: vec![],
                duals: vec![],
            });
        }
    }

    let mut t = build_tableau(prob);

    // Phase 1: maximize minus the sum of artificials.
    if t.cols > t.artificial_start {
        let mut phase1 = vec![S::zero(); t.cols];
        for cost in phase1[t.artificial_start..].iter_mut() {
            *cost = -S::one();
        }
        run_to_clean_optimum(&mut t, &phase1, true)?;
        let infeas: S = t.objective(&phase1);
        if infeas < -S::val(FEAS_TOL) {
            return Ok(StdSolution {
                status: LpStatus::Infeasible,
                value: S::zero(),
                primal: vec![],
                duals: vec![],
            });
        }
        // Artificials are pinned at zero for phase 2.
        for c in t.artificial_start..t.cols {
            t.lower[c] = S::zero();
            t.upper[c] = S::zero();
        }
    }

    // Phase 2: the real objective.
    let mut phase2 = vec![S::zero(); t.cols];
    phase2[..n].copy_from_slice(&prob.obj);
    let unbounded = run_to_clean_optimum(&mut t, &phase2, false)?;
    if unbounded {
        return Ok(StdSolution {
            status: LpStatus::Unbounded,
            value: S::infinity(),
            primal: vec![],
            duals: vec![],
        });
    }

    let primal: Vec<S> = (0..n).map(|j| t.col_value(j)).collect();
    let value = (0..n).fold(S::zero(), |acc, j| acc + prob.obj[j] * primal[j]);
    let duals: Vec<S> = (0..m).map(|i| -t.zrow[t.slack_col[i]]).collect();

    // Defensive residual check; a violation here is a solver bug surfacing.
    let resid_tol = S::val(1e-6);
    for (i, row) in prob.rows.iter().enumerate() {
        let lhs = row
            .terms
            .iter()
            .fold(S::zero(), |acc, &(j, a)| acc + a * primal[j]);
        let violated = match row.sense {
            StdSense::Le => lhs > row.rhs + resid_tol,
            StdSense::Eq => (lhs - row.rhs).abs() > resid_tol,
            StdSense::Ge => lhs < row.rhs - resid_tol,
        };
        if violated {
            return Err(SolveError::NumericalFailure(format!(
                "primal residual on row {i} exceeds tolerance"
            )));
        }
    }

    Ok(StdSolution {
        status: LpStatus::Optimal,
        value,
        primal,
        duals,
    })
}

fn build_tableau<S: Scalar>(prob: &StdProblem<S>) -> Tableau<S> {
    let n = prob.obj.len();
    let m = prob.rows.len();
    let feas = S::val(FEAS_TOL);

    let mut lower = prob.lower.clone();
    let mut upper = prob.upper.clone();
    let mut state = vec![VarState::AtLower; n];
    // Nonbasic structurals start at a finite bound; prefer the lower one.
    for j in 0..n {
        if lower[j].is_infinite() {
            state[j] = VarState::AtUpper;
        }
    }

    let mut slack_col = Vec::with_capacity(m);
    for row in &prob.rows {
        let col = n + slack_col.len();
        slack_col.push(col);
        match row.sense {
            StdSense::Le => {
                lower.push(S::zero());
                upper.push(S::infinity());
                state.push(VarState::AtLower);
            }
            StdSense::Ge => {
                lower.push(S::neg_infinity());
                upper.push(S::zero());
                state.push(VarState::AtUpper);
            }
            StdSense::Eq => {
                lower.push(S::zero());
                upper.push(S::zero());
                state.push(VarState::AtLower);
            }
        }
    }
    let artificial_start = n + m;

    // Initial residuals with structurals at their bounds.
    let nonbasic_value = |j: usize, st: &[VarState]| {
        if st[j] == VarState::AtUpper {
            upper[j]
        } else {
            lower[j]
        }
    };
    let mut residual = Vec::with_capacity(m);
    for row in &prob.rows {
        let mut r = row.rhs;
        for &(j, a) in &row.terms {
            r -= a * nonbasic_value(j, &state);
        }
        residual.push(r);
    }

    // Decide basis per row: the slack when its bounds admit the residual,
    // otherwise an artificial.
    let mut basis = vec![0usize; m];
    let mut xb = vec![S::zero(); m];
    let mut art_sign: Vec<(usize, S)> = Vec::new(); // (row, +-1)
    for i in 0..m {
        let slack_ok = match prob.rows[i].sense {
            StdSense::Le => residual[i] >= -feas,
            StdSense::Ge => residual[i] <= feas,
            StdSense::Eq => false,
        };
        if slack_ok {
            basis[i] = slack_col[i];
            xb[i] = residual[i];
            state[slack_col[i]] = VarState::Basic(i);
        } else {
            let sign = if residual[i] >= S::zero() {
                S::one()
            } else {
                -S::one()
            };
            art_sign.push((i, sign));
            xb[i] = residual[i].abs();
        }
    }

    let cols = artificial_start + art_sign.len();
    let mut rows_mat = vec![vec![S::zero(); cols]; m];
    let mut row_sign = vec![S::one(); m];
    let mut scaled_b: Vec<S> = prob.rows.iter().map(|r| r.rhs).collect();
    for (i, row) in prob.rows.iter().enumerate() {
        for &(j, a) in &row.terms {
            rows_mat[i][j] += a;
        }
        rows_mat[i][slack_col[i]] = S::one();
    }
    for (k, &(i, sign)) in art_sign.iter().enumerate() {
        let col = artificial_start + k;
        basis[i] = col;
        state.push(VarState::Basic(i));
        lower.push(S::zero());
        upper.push(S::infinity());
        // Keep B^-1 = identity by scaling the row when the artificial is -e_i.
        if sign < S::zero() {
            for v in rows_mat[i].iter_mut() {
                *v = -*v;
            }
            row_sign[i] = -S::one();
            scaled_b[i] = -scaled_b[i];
        }
        rows_mat[i][col] = S::one();
    }

    let mut scaled_cols = vec![Vec::new(); cols];
    for (i, row) in rows_mat.iter().enumerate() {
        for (j, &a) in row.iter().enumerate() {
            if a != S::zero() {
                scaled_cols[j].push((i, a));
            }
        }
    }

    Tableau {
        m,
        cols,
        rows: rows_mat,
        lower,
        upper,
        state,
        basis,
        xb,
        zrow: vec![S::zero(); cols],
        slack_col,
        row_sign,
        scaled_cols,
        scaled_b,
        artificial_start,
    }
}

impl<S: Scalar> Tableau<S> {
    fn col_value(&self, j: usize) -> S {
        match self.state[j] {
            VarState::Basic(i) => self.xb[i],
            VarState::AtLower => self.lower[j],
            VarState::AtUpper => self.upper[j],
        }
    }

    fn objective(&self, cost: &[S]) -> S {
        (0..self.cols).fold(S::zero(), |acc, j| {
            let c = cost[j];
            if c == S::zero() {
                acc
            } else {
                acc + c * self.col_value(j)
            }
        })
    }

    /// Recomputes the basic values and reduced costs exactly from the
    /// original (pivot-untouched) column data and the current `B^-1`,
    /// discarding the drift the incremental pivot updates accumulate. The
    /// columns of `B^-1` are read off the slack columns of the tableau.
    fn refresh(&mut self, cost: &[S]) {
        // Effective right-hand side: b minus the nonbasic bound values.
        let mut rhs = self.scaled_b.clone();
        for j in 0..self.cols {
            let v = match self.state[j] {
                VarState::Basic(_) => continue,
                VarState::AtLower => self.lower[j],
                VarState::AtUpper => self.upper[j],
            };
            if v != S::zero() {
                for &(i, a) in &self.scaled_cols[j] {
                    rhs[i] -= a * v;
                }
            }
        }
        // xb = B^-1 rhs.
        let mut xb = vec![S::zero(); self.m];
        for k in 0..self.m {
            let r = rhs[k];
            if r == S::zero() {
                continue;
            }
            let scale = self.row_sign[k] * r;
            let col = self.slack_col[k];
            for (i, v) in xb.iter_mut().enumerate() {
                let binv = self.rows[i][col];
                if binv != S::zero() {
                    *v += binv * scale;
                }
            }
        }
        self.xb = xb;
        // y = c_B B^-1, then rc_j = c_j - y . A_j over the sparse columns.
        let mut y = vec![S::zero(); self.m];
        for i in 0..self.m {
            let cb = cost[self.basis[i]];
            if cb == S::zero() {
                continue;
            }
            for (k, entry) in y.iter_mut().enumerate() {
                let binv = self.rows[i][self.slack_col[k]] * self.row_sign[k];
                if binv != S::zero() {
                    *entry += cb * binv;
                }
            }
        }
        for j in 0..self.cols {
            let mut rc = cost[j];
            for &(i, a) in &self.scaled_cols[j] {
                rc -= y[i] * a;
            }
            self.zrow[j] = rc;
        }
        for i in 0..self.m {
            self.zrow[self.basis[i]] = S::zero();
        }
    }

    /// Whether any nonbasic variable could still improve the objective.
    fn has_improving_column(&self, tol: S) -> bool {
        (0..self.cols).any(|j| {
            if self.lower[j] >= self.upper[j] {
                return false;
            }
            match self.state[j] {
                VarState::Basic(_) => false,
                VarState::AtLower => self.zrow[j] > tol,
                VarState::AtUpper => self.zrow[j] < -tol,
            }
        })
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let piv = self.rows[row][col];
        let inv = S::one() / piv;
        for v in self.rows[row].iter_mut() {
            *v *= inv;
        }
        self.rows[row][col] = S::one();
        for i in 0..self.m {
            if i != row {
                let factor = self.rows[i][col];
                if factor != S::zero() {
                    for j in 0..self.cols {
                        let upd = self.rows[row][j];
                        if upd != S::zero() {
                            self.rows[i][j] -= factor * upd;
                        }
                    }
                    self.rows[i][col] = S::zero();
                }
            }
        }
        let factor = self.zrow[col];
        if factor != S::zero() {
            for j in 0..self.cols {
                let upd = self.rows[row][j];
                if upd != S::zero() {
                    self.zrow[j] -= factor * upd;
                }
            }
            self.zrow[col] = S::zero();
        }
    }
}

/// Pivots between exact refreshes of the basic values and reduced costs.
const REFRESH_INTERVAL: usize = 128;

/// Optimizes, then refreshes; a refresh can expose residual improving
/// columns hidden by drift, so alternate until the fresh reduced costs are
/// clean. Returns `Ok(true)` on an unbounded ray.
fn run_to_clean_optimum<S: Scalar>(
    t: &mut Tableau<S>,
    cost: &[S],
    phase1: bool,
) -> Result<bool, SolveError> {
    t.refresh(cost);
    for _ in 0..4 {
        if run_simplex(t, cost, phase1)? {
            return Ok(true);
        }
        t.refresh(cost);
        if !t.has_improving_column(S::val(OPT_TOL)) {
            return Ok(false);
        }
    }
    Err(SolveError::NumericalFailure(
        "reduced costs would not stabilize across refreshes".to_string(),
    ))
}

/// Runs the simplex loop against the current zrow. Returns `Ok(true)` when
/// an unbounded ray is detected (phase 2 only).
fn run_simplex<S: Scalar>(
    t: &mut Tableau<S>,
    cost: &[S],
    phase1: bool,
) -> Result<bool, SolveError> {
    let opt_tol = S::val(OPT_TOL);
    let pivot_tol = S::val(PIVOT_TOL);
    let step_tol = S::val(STEP_TOL);
    let mut bland = false;
    let mut degenerate_run = 0usize;
    let mut pivots_since_refresh = 0usize;
    let bland_budget = 10 * (t.m + t.cols);
    let iter_cap = 200 * (t.m + t.cols) + 1000;

    for _ in 0..iter_cap {
        // Entering column: nonbasic, free to move, with an improving
        // reduced cost. Dantzig by default, Bland under the fallback.
        let mut entering: Option<(usize, S, bool)> = None; // (col, |rc|, from_lower)
        for j in 0..t.cols {
            if matches!(t.state[j], VarState::Basic(_)) || t.lower[j] >= t.upper[j] {
                continue;
            }
            let rc = t.zrow[j];
            let eligible = match t.state[j] {
                VarState::AtLower => rc > opt_tol,
                VarState::AtUpper => rc < -opt_tol,
                VarState::Basic(_) => false,
            };
            if !eligible {
                continue;
            }
            let from_lower = t.state[j] == VarState::AtLower;
            if bland {
                entering = Some((j, rc.abs(), from_lower));
                break;
            }
            match entering {
                Some((_, best, _)) if rc.abs() <= best => {}
                _ => entering = Some((j, rc.abs(), from_lower)),
            }
        }
        let Some((col, _, from_lower)) = entering else {
            return Ok(false); // optimal for this phase
        };

        let dir = if from_lower { S::one() } else { -S::one() };
        // Step length: the entering variable's own range, then each basic
        // variable hitting one of its bounds.
        let mut best_t = t.upper[col] - t.lower[col];
        let mut leaving: Option<(usize, bool)> = None; // (row, leaves_at_lower)
        for i in 0..t.m {
            let alpha = t.rows[i][col] * dir;
            if alpha > pivot_tol {
                let lb = t.lower[t.basis[i]];
                if lb.is_infinite() {
                    continue;
                }
                let limit = (t.xb[i] - lb) / alpha;
                if limit < best_t - step_tol
                    || (limit < best_t + step_tol && better_leaving(t, &leaving, i))
                {
                    best_t = limit.max(S::zero());
                    leaving = Some((i, true));
                }
            } else if alpha < -pivot_tol {
                let ub = t.upper[t.basis[i]];
                if ub.is_infinite() {
                    continue;
                }
                let limit = (ub - t.xb[i]) / (-alpha);
                if limit < best_t - step_tol
                    || (limit < best_t + step_tol && better_leaving(t, &leaving, i))
                {
                    best_t = limit.max(S::zero());
                    leaving = Some((i, false));
                }
            }
        }

        if best_t.is_infinite() {
            if phase1 {
                return Err(SolveError::NumericalFailure(
                    "phase-1 subproblem reported unbounded".to_string(),
                ));
            }
            return Ok(true);
        }
        let step = best_t.max(S::zero());
        if step <= step_tol {
            degenerate_run += 1;
            if degenerate_run > bland_budget {
                bland = true;
            }
        } else {
            degenerate_run = 0;
        }

        // Apply the step to all basic values.
        for i in 0..t.m {
            let alpha = t.rows[i][col];
            if alpha != S::zero() {
                t.xb[i] -= step * dir * alpha;
            }
        }

        match leaving {
            None => {
                // Bound flip: the entering variable crosses to its other bound.
                t.state[col] = if from_lower {
                    VarState::AtUpper
                } else {
                    VarState::AtLower
                };
            }
            Some((row, leaves_at_lower)) => {
                let entering_value = if from_lower {
                    t.lower[col] + step
                } else {
                    t.upper[col] - step
                };
                let old = t.basis[row];
                t.state[old] = if leaves_at_lower {
                    VarState::AtLower
                } else {
                    VarState::AtUpper
                };
                t.basis[row] = col;
                t.state[col] = VarState::Basic(row);
                t.xb[row] = entering_value;
                t.pivot(row, col);
                pivots_since_refresh += 1;
                if pivots_since_refresh >= REFRESH_INTERVAL {
                    t.refresh(cost);
                    pivots_since_refresh = 0;
                }
            }
        }
    }

    Err(SolveError::NumericalFailure(
        "simplex iteration cap exceeded (cycling or ill-conditioning)".to_string(),
    ))
}

/// Tie-break for the leaving row: prefer the lowest basis column index
/// (required under Bland; also keeps plain pivoting deterministic).
fn better_leaving<S: Scalar>(
    t: &Tableau<S>,
    current: &Option<(usize, bool)>,
    candidate_row: usize,
) -> bool {
    match current {
        None => true,
        Some((row, _)) => t.basis[candidate_row] < t.basis[*row],
    }
}
