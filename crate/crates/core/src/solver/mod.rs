//! Self-contained LP solver (primal simplex) and MIP solver (LP-based
//! branch-and-bound) over [`MipModel`], plus a pluggable backend registry.
//!
//! The built-in solver is deterministic: identical models and configs give
//! identical outcomes within one build.

mod branch_bound;
mod simplex;

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};
use std::time::Duration;

use thiserror::Error;

use crate::model::{MipModel, Sense};
use crate::scalar::Scalar;

pub(crate) use simplex::{solve_std, StdProblem, StdRow, StdSense};

/// Integrality tolerance used by branch-and-bound and decoders.
pub const INT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// The outcome of an LP solve: optimal value, primal point, and one dual
/// value per constraint (in model constraint order).
#[derive(Debug, Clone)]
pub struct LpOutcome<S: Scalar = f64> {
    pub status: LpStatus,
    pub value: S,
    pub primal: Vec<S>,
    pub duals: Vec<S>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MipStatus {
    Optimal,
    Infeasible,
}

/// The outcome of a MIP solve.
#[derive(Debug, Clone)]
pub struct MipOutcome<S: Scalar = f64> {
    pub status: MipStatus,
    pub value: S,
    pub assignment: Vec<bool>,
    pub nodes_explored: u64,
    /// Proven upper bound; equals `value` at optimality.
    pub bound: S,
    /// LP relaxation value at the root node.
    pub root_lp_value: S,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SearchOrder {
    #[default]
    DepthFirst,
    BestBound,
}

#[derive(Debug, Clone, Default)]
pub struct MipConfig {
    pub node_limit: Option<u64>,
    pub time_limit: Option<Duration>,
    pub search: SearchOrder,
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("node or time limit reached after {nodes} nodes")]
    LimitReached {
        /// Best incumbent objective found before the limit, if any.
        incumbent: Option<f64>,
        /// Valid upper bound at the moment the limit fired.
        bound: f64,
        nodes: u64,
    },
    #[error("MIP solve requires every variable to be binary")]
    ModelNotBinary,
    #[error("unknown backend {0:?}")]
    UnknownBackend(String),
    #[error("backend divergence: {0}")]
    BackendDivergence(String),
}

/// Converts a model into computational standard form with the given bounds.
fn to_std<S: Scalar>(model: &MipModel<S>, lower: &[S], upper: &[S]) -> StdProblem<S> {
    let rows = model
        .constraints()
        .iter()
        .map(|con| StdRow {
            terms: con.terms.clone(),
            sense: match con.sense {
                Sense::Le => StdSense::Le,
                Sense::Eq => StdSense::Eq,
                Sense::Ge => StdSense::Ge,
            },
            rhs: con.rhs,
        })
        .collect();
    StdProblem {
        obj: model.vars().iter().map(|v| v.objective).collect(),
        lower: lower.to_vec(),
        upper: upper.to_vec(),
        rows,
    }
}

/// Solves the LP relaxation of a model (integrality flags ignored), all
/// variables bounded to `[0, 1]`.
pub fn solve_lp<S: Scalar>(model: &MipModel<S>) -> Result<LpOutcome<S>, SolveError> {
    let n = model.num_vars();
    solve_lp_with_bounds(model, &vec![S::zero(); n], &vec![S::one(); n])
}

/// Solves the LP relaxation under per-variable bound overrides (used by
/// branch-and-bound and branch-and-price node fixings).
pub fn solve_lp_with_bounds<S: Scalar>(
    model: &MipModel<S>,
    lower: &[S],
    upper: &[S],
) -> Result<LpOutcome<S>, SolveError> {
    assert_eq!(lower.len(), model.num_vars());
    assert_eq!(upper.len(), model.num_vars());
    let sol = solve_std(&to_std(model, lower, upper))?;
    Ok(LpOutcome {
        status: sol.status,
        value: sol.value,
        primal: sol.primal,
        duals: sol.duals,
    })
}

/// Solves the model to proven optimality by LP-based branch-and-bound.
pub fn solve_mip<S: Scalar>(
    model: &MipModel<S>,
    config: &MipConfig,
) -> Result<MipOutcome<S>, SolveError> {
    branch_bound::solve(model, config)
}

/// A pluggable LP/MIP solving backend. The built-in solver implements this
/// and remains the reference implementation in tests.
pub trait MipBackend<S: Scalar>: Send + Sync {
    fn name(&self) -> &str;
    fn solve_lp(&self, model: &MipModel<S>) -> Result<LpOutcome<S>, SolveError>;
    fn solve_mip(
        &self,
        model: &MipModel<S>,
        config: &MipConfig,
    ) -> Result<MipOutcome<S>, SolveError>;
}

/// The built-in simplex + branch-and-bound engine as a backend.
pub struct BuiltinSolver;

pub const BUILTIN_BACKEND: &str = "builtin";

impl<S: Scalar> MipBackend<S> for BuiltinSolver {
    fn name(&self) -> &str {
        BUILTIN_BACKEND
    }

    fn solve_lp(&self, model: &MipModel<S>) -> Result<LpOutcome<S>, SolveError> {
        solve_lp(model)
    }

    fn solve_mip(
        &self,
        model: &MipModel<S>,
        config: &MipConfig,
    ) -> Result<MipOutcome<S>, SolveError> {
        solve_mip(model, config)
    }
}

type Registry = HashMap<String, Box<dyn MipBackend<f64>>>;

struct BackendState {
    registry: Registry,
    active: String,
}

fn backend_state() -> &'static RwLock<BackendState> {
    static STATE: OnceLock<RwLock<BackendState>> = OnceLock::new();
    STATE.get_or_init(|| {
        let mut registry: Registry = HashMap::new();
        registry.insert(BUILTIN_BACKEND.to_string(), Box::new(BuiltinSolver));
        RwLock::new(BackendState {
            registry,
            active: BUILTIN_BACKEND.to_string(),
        })
    })
}

/// Registers an `f64` backend and makes it the active one. Subsequent
/// [`routed_solve_lp`]/[`routed_solve_mip`] calls go through it.
pub fn register_backend(backend: Box<dyn MipBackend<f64>>) {
    let mut state = backend_state().write().unwrap();
    let name = backend.name().to_string();
    state.registry.insert(name.clone(), backend);
    state.active = name;
}

/// Selects a previously registered backend by name.
pub fn select_backend(name: &str) -> Result<(), SolveError> {
    let mut state = backend_state().write().unwrap();
    if !state.registry.contains_key(name) {
        return Err(SolveError::UnknownBackend(name.to_string()));
    }
    state.active = name.to_string();
    Ok(())
}

/// Name of the currently active backend.
pub fn active_backend() -> String {
    backend_state().read().unwrap().active.clone()
}

/// LP solve routed through the active backend.
pub fn routed_solve_lp(model: &MipModel<f64>) -> Result<LpOutcome<f64>, SolveError> {
    let state = backend_state().read().unwrap();
    state.registry[&state.active].solve_lp(model)
}

/// MIP solve routed through the active backend.
pub fn routed_solve_mip(
    model: &MipModel<f64>,
    config: &MipConfig,
) -> Result<MipOutcome<f64>, SolveError> {
    let state = backend_state().read().unwrap();
    state.registry[&state.active].solve_mip(model, config)
}

/// Runs a model through both the built-in solver and the given backend and
/// flags any disagreement beyond `tol` (dual-run comparison harness).
pub fn cross_check<S: Scalar>(
    model: &MipModel<S>,
    config: &MipConfig,
    backend: &dyn MipBackend<S>,
    tol: S,
) -> Result<(), SolveError> {
    let ours = solve_mip(model, config)?;
    let theirs = backend.solve_mip(model, config)?;
    if ours.status != theirs.status {
        return Err(SolveError::BackendDivergence(format!(
            "status mismatch: builtin {:?} vs {} {:?}",
            ours.status,
            backend.name(),
            theirs.status
        )));
    }
    if ours.status == MipStatus::Optimal && (ours.value - theirs.value).abs() > tol {
        return Err(SolveError::BackendDivergence(format!(
            "objective mismatch: builtin {} vs {} {}",
            ours.value,
            backend.name(),
            theirs.value
        )));
    }
    if !model.assignment_feasible(&theirs.assignment) && ours.status == MipStatus::Optimal {
        return Err(SolveError::BackendDivergence(format!(
            "backend {} returned an infeasible assignment",
            backend.name()
        )));
    }
    Ok(())
}
