//! Machine-readable JSON reports. Field order is fixed by the struct
//! definitions, so identical runs produce byte-identical output except for
//! `wall_time_ms`.

use std::collections::BTreeMap;

use exchange_clear::formulations::Solution;
use exchange_clear::instance::Instance;
use serde::{Deserialize, Serialize};

#[derive(Debug, Serialize, Deserialize)]
pub struct InstanceSummary {
    pub ndds: usize,
    pub pairs: usize,
    pub arcs: usize,
    pub cycle_cap: usize,
    pub chain_cap: usize,
    pub failure_prob: Option<f64>,
}

impl InstanceSummary {
    pub fn of(instance: &Instance<f64>) -> Self {
        InstanceSummary {
            ndds: instance.num_ndds(),
            pairs: instance.num_pairs(),
            arcs: instance.num_arcs(),
            cycle_cap: instance.cycle_cap(),
            chain_cap: instance.chain_cap(),
            failure_prob: instance.failure_prob(),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ModelStats {
    pub variables: usize,
    pub constraints: usize,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SolverStats {
    pub nodes: u64,
    pub lp_value: f64,
    pub columns_generated: Option<usize>,
    pub pricing_calls: Option<u64>,
}

/// The report emitted by `solve` (and `relax`).
#[derive(Debug, Serialize, Deserialize)]
pub struct SolveReport {
    pub instance: InstanceSummary,
    pub formulation: String,
    pub relaxation: bool,
    /// The optimized objective: expected weight under a failure-aware
    /// objective, deterministic weight otherwise; the LP optimum in
    /// relaxation mode.
    pub objective: f64,
    pub expected_objective: Option<f64>,
    pub cycles: Vec<Vec<usize>>,
    pub chains: Vec<Vec<usize>>,
    pub model: ModelStats,
    pub solver: SolverStats,
    pub wall_time_ms: u128,
}

impl SolveReport {
    pub fn structures(&mut self, solution: &Solution<f64>) {
        self.cycles = solution
            .cycles
            .iter()
            .map(|c| c.vertices().to_vec())
            .collect();
        self.chains = solution
            .chains
            .iter()
            .map(|c| c.vertices().to_vec())
            .collect();
        self.expected_objective = solution.expected_weight;
    }
}

/// The report emitted by `compare`.
#[derive(Debug, Serialize, Deserialize)]
pub struct CompareReport {
    pub instance: InstanceSummary,
    pub lpr: BTreeMap<String, f64>,
    /// Pairwise differences `first - second` keyed as "first-second".
    pub gaps: BTreeMap<String, f64>,
    pub wall_time_ms: u128,
}

/// The report emitted by `verify`.
#[derive(Debug, Serialize, Deserialize)]
pub struct VerifyReport {
    pub feasible: bool,
    pub objective: f64,
    pub expected_objective: Option<f64>,
    pub detail: String,
}
