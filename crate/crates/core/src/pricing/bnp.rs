//! Branch-and-price for the chain-edge formulation: the restricted master
//! keeps every chain-arc variable and grows cycle columns on demand. At
//! every search node the LP is priced to completion before bounding or
//! branching, so node bounds are true relaxation bounds.

use std::collections::HashSet;

use crate::formulations::{decode_solution, Solution};
use crate::indexsets::enumerate_cycles;
use crate::instance::{Cycle, Instance};
use crate::model::{ConTag, MipModel, ModelKind, VarTag};
use crate::scalar::Scalar;
use crate::solver::{solve_lp_with_bounds, LpStatus, INT_TOL};

use super::{
    deterministic_price, discounted_price, price_cycles_deterministic, price_cycles_discounted,
    PricedCycle, PricingDuals, PricingError, PRICE_EPS,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InitialColumns {
    #[default]
    None,
    /// Seed the pool with vertex-disjoint positive-weight cycles.
    Greedy,
}

#[derive(Debug, Clone, Default)]
pub struct BnpConfig {
    pub initial_columns: InitialColumns,
    /// Hard cap on pool size; exceeding it aborts with `LimitReached`.
    pub column_cap: Option<usize>,
}

/// Solve statistics, reported alongside the solution.
#[derive(Debug, Clone)]
pub struct BnpStats<S: Scalar = f64> {
    pub nodes: u64,
    pub pricing_calls: u64,
    pub columns_generated: usize,
    /// Master LP value at the root after pricing out: the relaxation bound.
    pub root_bound: S,
}

struct Node<S> {
    lower: Vec<S>,
    upper: Vec<S>,
    parent_bound: S,
}

/// Solves the instance by branch-and-price over the chain-edge formulation;
/// routes to discounted pricing when the instance carries a failure
/// probability. Returns the optimal packing and solve statistics.
pub fn solve_picef_bnp<S: Scalar>(
    instance: &Instance<S>,
    config: &BnpConfig,
) -> Result<(Solution<S>, BnpStats<S>), PricingError> {
    let p = instance.failure_prob();
    let mut master = build_master(instance);
    let mut pool: HashSet<Cycle> = HashSet::new();
    let mut stats = BnpStats {
        nodes: 0,
        pricing_calls: 0,
        columns_generated: 0,
        root_bound: S::zero(),
    };

    if config.initial_columns == InitialColumns::Greedy {
        for cycle in greedy_seed(instance) {
            append_column(&mut master, instance, &cycle, p);
            pool.insert(cycle);
            stats.columns_generated += 1;
        }
    }

    let int_tol = S::val(INT_TOL);
    let prune_eps = S::val(PRICE_EPS);
    let mut incumbent: Option<(S, Vec<bool>)> = None;
    let mut stack: Vec<Node<S>> = vec![Node {
        lower: vec![S::zero(); master.num_vars()],
        upper: vec![S::one(); master.num_vars()],
        parent_bound: S::infinity(),
    }];

    while let Some(mut node) = stack.pop() {
        if let Some((best, _)) = &incumbent {
            if node.parent_bound <= *best + prune_eps {
                continue;
            }
        }
        stats.nodes += 1;

        // Price the node LP to completion: repeat (solve, generate columns)
        // until no positive-price cycle is missing from the pool.
        let lp = loop {
            node.lower.resize(master.num_vars(), S::zero());
            node.upper.resize(master.num_vars(), S::one());
            let lp = solve_lp_with_bounds(&master, &node.lower, &node.upper)
                .map_err(|e| PricingError::Master(e.to_string()))?;
            if lp.status != LpStatus::Optimal {
                break None;
            }
            let duals = PricingDuals::from_lp(&master, &lp, instance);
            stats.pricing_calls += 1;
            let priced = match p {
                Some(p) => price_cycles_discounted(instance, &duals, p)?,
                None => price_cycles_deterministic(instance, &duals),
            };
            let mut fresh: Vec<PricedCycle<S>> = priced
                .iter()
                .filter(|pc| !pool.contains(&pc.cycle))
                .cloned()
                .collect();
            if fresh.is_empty() && !priced.is_empty() {
                // Every priced cycle is already pooled (typically fixed to
                // zero by branching). The fast pricer may hide other
                // profitable cycles behind them, so fall back to an
                // exhaustive scan before declaring the node priced out.
                fresh = all_positive_price_cycles(instance, &duals, p)
                    .into_iter()
                    .filter(|pc| !pool.contains(&pc.cycle))
                    .collect();
            }
            if fresh.is_empty() {
                break Some(lp);
            }
            for pc in fresh {
                if let Some(cap) = config.column_cap {
                    if pool.len() >= cap {
                        return Err(PricingError::LimitReached {
                            columns: pool.len(),
                        });
                    }
                }
                append_column(&mut master, instance, &pc.cycle, p);
                pool.insert(pc.cycle);
                stats.columns_generated += 1;
            }
        };
        let Some(lp) = lp else { continue };

        if stats.nodes == 1 {
            stats.root_bound = lp.value;
        }
        if let Some((best, _)) = &incumbent {
            if lp.value <= *best + prune_eps {
                continue;
            }
        }

        match branch_variable(&master, &lp.primal, int_tol) {
            None => {
                let assignment: Vec<bool> = lp.primal.iter().map(|&x| x > S::val(0.5)).collect();
                let better = incumbent
                    .as_ref()
                    .is_none_or(|(best, _)| lp.value > *best + prune_eps);
                if better {
                    incumbent = Some((lp.value, assignment));
                }
            }
            Some(var) => {
                let mut zero = Node {
                    lower: node.lower.clone(),
                    upper: node.upper.clone(),
                    parent_bound: lp.value,
                };
                zero.upper[var] = S::zero();
                stack.push(zero);
                let mut one = Node {
                    lower: node.lower,
                    upper: node.upper,
                    parent_bound: lp.value,
                };
                one.lower[var] = S::one();
                stack.push(one);
            }
        }
    }

    let solution = match incumbent {
        Some((_, mut assignment)) => {
            assignment.resize(master.num_vars(), false);
            decode_solution(&master, &assignment, instance)
                .map_err(|e| PricingError::Master(e.to_string()))?
        }
        None => Solution::empty(),
    };
    Ok((solution, stats))
}

/// The restricted master: all chain-arc variables, no cycle columns, and a
/// capacity row for every pair vertex so columns always have rows to join.
fn build_master<S: Scalar>(instance: &Instance<S>) -> MipModel<S> {
    use crate::formulations::picef_master_parts;
    let mut master = MipModel::new(ModelKind::Picef { reduced: false });
    picef_master_parts(&mut master, instance);
    if let Some(p) = instance.failure_prob() {
        for idx in 0..master.num_vars() {
            if let VarTag::PicefArc { src, dst, pos } = master.var(idx).tag.clone() {
                let w = instance.weight(src, dst).expect("master arc");
                master.set_objective_coeff(idx, p.powi(pos as i32) * w);
            }
        }
        master.set_discount(p);
    }
    master
}

fn append_column<S: Scalar>(
    master: &mut MipModel<S>,
    instance: &Instance<S>,
    cycle: &Cycle,
    p: Option<S>,
) -> usize {
    let weight = instance.cycle_weight(cycle).expect("column cycle");
    let objective = match p {
        Some(p) => p.powi(cycle.len() as i32) * weight,
        None => weight,
    };
    let var = master.add_var(VarTag::Cycle(cycle.clone()), objective, true);
    for &v in cycle.vertices() {
        let row = master
            .constraint_index(&ConTag::VertexCap(v))
            .expect("master has capacity rows for every pair vertex");
        master.add_term_to_constraint(row, var, S::one());
    }
    var
}

/// Most-fractional branching: cycle columns first, then arc variables.
fn branch_variable<S: Scalar>(master: &MipModel<S>, primal: &[S], int_tol: S) -> Option<usize> {
    let scan = |want_cycles: bool| -> Option<usize> {
        let mut best: Option<(usize, S)> = None;
        for (idx, &x) in primal.iter().enumerate() {
            if matches!(master.var(idx).tag, VarTag::Cycle(_)) != want_cycles {
                continue;
            }
            let frac = x.min(S::one() - x);
            if frac > int_tol {
                match best {
                    Some((_, top)) if frac <= top => {}
                    _ => best = Some((idx, frac)),
                }
            }
        }
        best.map(|(idx, _)| idx)
    };
    scan(true).or_else(|| scan(false))
}

/// Every cycle whose exact price clears the threshold; the complete (and
/// expensive) reference used when the fast pricer only reproduces cycles
/// already in the pool.
fn all_positive_price_cycles<S: Scalar>(
    instance: &Instance<S>,
    duals: &PricingDuals<S>,
    p: Option<S>,
) -> Vec<PricedCycle<S>> {
    let eps = S::val(PRICE_EPS);
    enumerate_cycles(instance)
        .into_iter()
        .filter_map(|cycle| {
            let price = match p {
                Some(p) => discounted_price(instance, duals, &cycle, p),
                None => deterministic_price(instance, duals, &cycle),
            };
            (price > eps).then_some(PricedCycle { cycle, price })
        })
        .collect()
}

/// Vertex-disjoint positive-weight cycles, greedily by price.
fn greedy_seed<S: Scalar>(instance: &Instance<S>) -> Vec<Cycle> {
    let zero = PricingDuals::uniform(instance, 0.0);
    let mut priced = price_cycles_deterministic(instance, &zero);
    priced.sort_by(|a, b| {
        b.price
            .partial_cmp(&a.price)
            .unwrap()
            .then(a.cycle.cmp(&b.cycle))
    });
    let mut used = vec![false; instance.num_vertices() + 1];
    let mut seed = Vec::new();
    for pc in priced {
        if pc.cycle.vertices().iter().all(|&v| !used[v]) {
            for &v in pc.cycle.vertices() {
                used[v] = true;
            }
            seed.push(pc.cycle);
        }
    }
    seed
}
