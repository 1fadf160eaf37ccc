//! Verification toolkit: brute-force packing and pricing oracles, the LPR
//! comparison runner, adversarial instance families, and the closed-walk
//! decomposition.
//!
//! The oracles deliberately use their own enumeration and expected-value
//! code rather than the engine's, so a bug shared with the main path cannot
//! hide from the tests.

use std::collections::HashSet;

use thiserror::Error;

use crate::formulations::{BuildError, Formulation, Solution};
use crate::instance::{build_instance, Arc, Chain, Cycle, Instance};
use crate::pricing::{PricedCycle, PricingDuals, PRICE_EPS};
use crate::scalar::Scalar;
use crate::solver::{solve_lp, LpStatus, SolveError};

/// Largest structure count the subset-search oracle accepts.
pub const ORACLE_BUDGET: usize = 22;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{structures} cycles+chains exceed the oracle budget of {budget}")]
    TooLargeForOracle { structures: usize, budget: usize },
    #[error("bad family parameters: {0}")]
    BadFamilyParams(String),
    #[error("not a closed walk: {0}")]
    NotAClosedWalk(String),
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error(transparent)]
    Solve(#[from] SolveError),
}

/// Independent cycle enumeration: depth-first from *every* vertex (not just
/// the minimum), deduplicated afterwards.
fn oracle_cycles<S: Scalar>(instance: &Instance<S>) -> Vec<Cycle> {
    let cap = instance.cycle_cap();
    let mut seen: HashSet<Cycle> = HashSet::new();
    if cap < 2 {
        return vec![];
    }
    for start in instance.pair_vertices() {
        // Iterative stack of (path, next arc targets to try).
        let mut stack: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
        let succ = |v: usize| instance.arcs_from(v).map(|a| a.dst).collect::<Vec<_>>();
        stack.push((vec![start], succ(start)));
        while let Some((path, mut todo)) = stack.pop() {
            let Some(next) = todo.pop() else { continue };
            stack.push((path.clone(), todo));
            if next == start && path.len() >= 2 {
                seen.insert(Cycle::new(path.clone()));
            }
            if next != start && !path.contains(&next) && path.len() < cap {
                let mut extended = path.clone();
                extended.push(next);
                let succs = succ(next);
                stack.push((extended, succs));
            }
        }
    }
    let mut cycles: Vec<Cycle> = seen.into_iter().collect();
    cycles.sort();
    cycles
}

/// Independent chain enumeration, breadth-first.
fn oracle_chains<S: Scalar>(instance: &Instance<S>) -> Vec<Chain> {
    let cap = instance.chain_cap();
    let mut chains = Vec::new();
    if cap < 1 {
        return chains;
    }
    let mut frontier: Vec<Vec<usize>> = instance.ndd_vertices().map(|ndd| vec![ndd]).collect();
    while let Some(path) = frontier.pop() {
        let last = *path.last().unwrap();
        for arc in instance.arcs_from(last) {
            if path.contains(&arc.dst) {
                continue;
            }
            let mut extended = path.clone();
            extended.push(arc.dst);
            chains.push(Chain::new(extended.clone()));
            if extended.len() <= cap {
                frontier.push(extended);
            }
        }
    }
    chains.sort();
    chains
}

/// Oracle-side value of one structure (its own expected-value arithmetic).
fn oracle_value<S: Scalar>(instance: &Instance<S>, structure: &OracleStructure) -> S {
    match structure {
        OracleStructure::Cycle(c) => {
            let mut w = S::zero();
            for (u, v) in c.arcs() {
                w += instance.weight(u, v).expect("oracle cycle arc");
            }
            match instance.failure_prob() {
                None => w,
                Some(p) => {
                    let mut factor = S::one();
                    for _ in 0..c.len() {
                        factor *= p;
                    }
                    factor * w
                }
            }
        }
        OracleStructure::Chain(c) => {
            let mut total = S::zero();
            let mut factor = S::one();
            for (u, v) in c.arcs() {
                let w = instance.weight(u, v).expect("oracle chain arc");
                match instance.failure_prob() {
                    None => total += w,
                    Some(p) => {
                        factor *= p;
                        total += factor * w;
                    }
                }
            }
            total
        }
    }
}

enum OracleStructure {
    Cycle(Cycle),
    Chain(Chain),
}

/// Exact maximum-value vertex-disjoint packing by exhaustive subset search
/// with conflict and bound pruning. Maximizes expected weight when the
/// instance carries a failure probability, deterministic weight otherwise.
pub fn brute_force_optimum<S: Scalar>(instance: &Instance<S>) -> Result<Solution<S>, HarnessError> {
    let cycles = oracle_cycles(instance);
    let chains = oracle_chains(instance);
    let total = cycles.len() + chains.len();
    if total > ORACLE_BUDGET {
        return Err(HarnessError::TooLargeForOracle {
            structures: total,
            budget: ORACLE_BUDGET,
        });
    }
    assert!(
        instance.num_vertices() <= 64,
        "oracle uses 64-bit vertex masks"
    );

    let mut structures: Vec<(OracleStructure, S, u64)> = Vec::with_capacity(total);
    for c in cycles {
        let mask = c.vertices().iter().fold(0u64, |m, &v| m | 1 << (v - 1));
        let value = oracle_value(instance, &OracleStructure::Cycle(c.clone()));
        structures.push((OracleStructure::Cycle(c), value, mask));
    }
    for c in chains {
        let mask = c.vertices().iter().fold(0u64, |m, &v| m | 1 << (v - 1));
        let value = oracle_value(instance, &OracleStructure::Chain(c.clone()));
        structures.push((OracleStructure::Chain(c), value, mask));
    }
    structures.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());

    // Suffix sums bound what the remaining structures could still add.
    let mut suffix = vec![S::zero(); structures.len() + 1];
    for i in (0..structures.len()).rev() {
        suffix[i] = suffix[i + 1] + structures[i].1;
    }

    let mut best_value = S::zero();
    let mut best_pick: Vec<usize> = vec![];
    let mut pick: Vec<usize> = vec![];

    #[allow(clippy::too_many_arguments)]
    fn search<S: Scalar>(
        idx: usize,
        used: u64,
        value: S,
        structures: &[(OracleStructure, S, u64)],
        suffix: &[S],
        pick: &mut Vec<usize>,
        best_value: &mut S,
        best_pick: &mut Vec<usize>,
    ) {
        if value > *best_value {
            *best_value = value;
            *best_pick = pick.clone();
        }
        if idx == structures.len() || value + suffix[idx] <= *best_value {
            return;
        }
        let (_, item_value, mask) = &structures[idx];
        if used & mask == 0 {
            pick.push(idx);
            search(
                idx + 1,
                used | mask,
                value + *item_value,
                structures,
                suffix,
                pick,
                best_value,
                best_pick,
            );
            pick.pop();
        }
        search(
            idx + 1,
            used,
            value,
            structures,
            suffix,
            pick,
            best_value,
            best_pick,
        );
    }
    search(
        0,
        0,
        S::zero(),
        &structures,
        &suffix,
        &mut pick,
        &mut best_value,
        &mut best_pick,
    );

    let mut picked_cycles = Vec::new();
    let mut picked_chains = Vec::new();
    for &i in &best_pick {
        match &structures[i].0 {
            OracleStructure::Cycle(c) => picked_cycles.push(c.clone()),
            OracleStructure::Chain(c) => picked_chains.push(c.clone()),
        }
    }
    Solution::build(instance, picked_cycles, picked_chains)
        .map_err(|e| HarnessError::BadFamilyParams(format!("oracle built invalid packing: {e}")))
}

/// The maximum-price cycle under the deterministic or discounted price, or
/// `None` when no cycle prices above the positive threshold. This is the
/// reference the polynomial pricers are tested against.
pub fn brute_force_pricing<S: Scalar>(
    instance: &Instance<S>,
    duals: &PricingDuals<S>,
    p: Option<S>,
) -> Result<Option<PricedCycle<S>>, HarnessError> {
    let cycles = oracle_cycles(instance);
    if cycles.len() > ORACLE_BUDGET * 50 {
        return Err(HarnessError::TooLargeForOracle {
            structures: cycles.len(),
            budget: ORACLE_BUDGET * 50,
        });
    }
    let mut best: Option<PricedCycle<S>> = None;
    for cycle in cycles {
        let mut weight = S::zero();
        let mut dual_sum = S::zero();
        for (u, v) in cycle.arcs() {
            weight += instance.weight(u, v).expect("oracle cycle arc");
            dual_sum += duals.get(u);
        }
        let price = match p {
            None => weight - dual_sum,
            Some(p) => {
                let mut factor = S::one();
                for _ in 0..cycle.len() {
                    factor *= p;
                }
                factor * weight - dual_sum
            }
        };
        if price > S::val(PRICE_EPS) && best.as_ref().is_none_or(|b| price > b.price) {
            best = Some(PricedCycle { cycle, price });
        }
    }
    Ok(best)
}

/// Parameters for the adversarial instance families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyParams {
    /// The fixed 7-vertex two-chain instance (caps K=2, L=4) whose chain-edge
    /// LP relaxation is 7/2 against a cycle-formulation LP of 3.
    TwoArm,
    /// One NDD feeding a spine of overlapping (K+1)-cycles; the unique
    /// optimal packing is the full-length chain of exactly L arcs.
    Udders { cycle_cap: usize, chain_cap: usize },
}

/// Builds a family instance with unit weights.
pub fn make_family<S: Scalar>(params: FamilyParams) -> Result<Instance<S>, HarnessError> {
    match params {
        FamilyParams::TwoArm => {
            let arcs = [(1, 2), (2, 3), (3, 4), (1, 5), (5, 6), (6, 7), (7, 5)]
                .iter()
                .map(|&(src, dst)| Arc {
                    src,
                    dst,
                    weight: S::one(),
                })
                .collect();
            Ok(build_instance(1, 6, arcs, 2, 4, None).expect("fixed family instance"))
        }
        FamilyParams::Udders {
            cycle_cap: k,
            chain_cap: l,
        } => {
            if k < 2 || l < k + 2 {
                return Err(HarnessError::BadFamilyParams(format!(
                    "udders needs K >= 2 and L >= K + 2, got K={k}, L={l}"
                )));
            }
            // Gadget cycles of length K+1, consecutive ones sharing a spine
            // vertex; enough gadgets that the through-chain has exactly L arcs.
            let gadgets = l - k;
            let mut arcs: Vec<(usize, usize)> = Vec::new();
            let mut next_id = 2usize;
            let mut spine_head = next_id; // v^i_1 of the current gadget
            next_id += 1;
            arcs.push((1, spine_head));
            for _ in 0..gadgets {
                let spine_next = next_id; // v^i_2 = v^{i+1}_1
                next_id += 1;
                arcs.push((spine_head, spine_next));
                let mut prev = spine_next;
                for _ in 0..k - 1 {
                    let u = next_id;
                    next_id += 1;
                    arcs.push((prev, u));
                    prev = u;
                }
                arcs.push((prev, spine_head));
                spine_head = spine_next;
            }
            let num_pairs = next_id - 2;
            let arcs = arcs
                .into_iter()
                .map(|(src, dst)| Arc {
                    src,
                    dst,
                    weight: S::one(),
                })
                .collect();
            Ok(build_instance(1, num_pairs, arcs, k, l, None).expect("constructed family"))
        }
    }
}

/// Solves the LP relaxation of each formulation applicable to the instance
/// and reports the values in input order.
pub fn compare_lprs<S: Scalar>(
    instance: &Instance<S>,
    formulations: &[Formulation],
) -> Result<Vec<(Formulation, S)>, HarnessError> {
    let mut results = Vec::with_capacity(formulations.len());
    for &f in formulations {
        let model = f.build(instance)?;
        let lp = solve_lp(&model)?;
        if lp.status != LpStatus::Optimal {
            return Err(HarnessError::Solve(SolveError::NumericalFailure(format!(
                "LP relaxation of {} did not solve to optimality",
                f.label()
            ))));
        }
        results.push((f, lp.value));
    }
    Ok(results)
}

/// Partitions a closed walk's arc multiset into elementary cycles by
/// repeatedly extracting the first repeated-vertex segment.
pub fn decompose_closed_walk(walk: &[(usize, usize)]) -> Result<Vec<Cycle>, HarnessError> {
    if walk.is_empty() {
        return Err(HarnessError::NotAClosedWalk("empty walk".to_string()));
    }
    for pair in walk.windows(2) {
        if pair[0].1 != pair[1].0 {
            return Err(HarnessError::NotAClosedWalk(format!(
                "arc ({}, {}) is not followed from its target",
                pair[0].0, pair[0].1
            )));
        }
    }
    if walk.last().unwrap().1 != walk[0].0 {
        return Err(HarnessError::NotAClosedWalk(
            "walk does not return to its starting vertex".to_string(),
        ));
    }

    let mut remaining: Vec<(usize, usize)> = walk.to_vec();
    let mut cycles = Vec::new();
    'outer: loop {
        let sources: Vec<usize> = remaining.iter().map(|a| a.0).collect();
        // First repeat: smallest j whose source already occurred.
        for j in 0..sources.len() {
            if let Some(i) = (0..j).find(|&i| sources[i] == sources[j]) {
                let segment: Vec<(usize, usize)> = remaining.drain(i..j).collect();
                cycles.push(Cycle::new(segment.iter().map(|a| a.0).collect()));
                continue 'outer;
            }
        }
        // No repeats: the remainder is itself a cycle.
        cycles.push(Cycle::new(sources));
        return Ok(cycles);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::WeightMode;
    use approx::assert_abs_diff_eq;

    fn unit_instance(
        ndds: usize,
        pairs: usize,
        arcs: &[(usize, usize)],
        k: usize,
        l: usize,
    ) -> Instance<f64> {
        let arcs = arcs
            .iter()
            .map(|&(src, dst)| Arc {
                src,
                dst,
                weight: 1.0,
            })
            .collect();
        build_instance(ndds, pairs, arcs, k, l, None).unwrap()
    }

    #[test]
    fn oracle_on_worked_examples() {
        let fig1 = unit_instance(
            2,
            5,
            &[
                (3, 4),
                (4, 5),
                (5, 3),
                (3, 7),
                (1, 3),
                (6, 5),
                (2, 4),
                (1, 7),
                (7, 6),
            ],
            3,
            3,
        );
        assert_abs_diff_eq!(brute_force_optimum(&fig1).unwrap().weight, 5.0);

        let fig4 = unit_instance(
            2,
            4,
            &[
                (1, 3),
                (1, 4),
                (2, 4),
                (3, 4),
                (4, 5),
                (5, 6),
                (6, 4),
                (6, 5),
            ],
            3,
            4,
        );
        assert_abs_diff_eq!(brute_force_optimum(&fig4).unwrap().weight, 4.0);

        let two_arm = make_family::<f64>(FamilyParams::TwoArm).unwrap();
        assert_abs_diff_eq!(brute_force_optimum(&two_arm).unwrap().weight, 3.0);
    }

    #[test]
    fn oracle_budget_enforced() {
        let inst: Instance<f64> =
            crate::instance::generate_random(2, 10, 0.8, WeightMode::Unit, 4, 5, 11);
        assert!(matches!(
            brute_force_optimum(&inst),
            Err(HarnessError::TooLargeForOracle { .. })
        ));
    }

    #[test]
    fn oracle_enumerators_match_engine() {
        for seed in 0..30u64 {
            let inst: Instance<f64> =
                crate::instance::generate_random(2, 7, 0.25, WeightMode::Unit, 3, 3, seed);
            let mut engine_cycles = crate::indexsets::enumerate_cycles(&inst);
            engine_cycles.sort();
            assert_eq!(oracle_cycles(&inst), engine_cycles, "seed {seed}");
            let mut engine_chains = crate::indexsets::enumerate_chains(&inst);
            engine_chains.sort();
            assert_eq!(oracle_chains(&inst), engine_chains, "seed {seed}");
        }
    }

    #[test]
    fn pricing_oracle_examples() {
        let triangle = unit_instance(0, 3, &[(1, 2), (2, 3), (3, 1)], 3, 0);
        let zero = PricingDuals::uniform(&triangle, 0.0);
        let best = brute_force_pricing(&triangle, &zero, None)
            .unwrap()
            .unwrap();
        assert_abs_diff_eq!(best.price, 3.0);

        let heavy = PricingDuals::uniform(&triangle, 10.0);
        assert!(brute_force_pricing(&triangle, &heavy, None)
            .unwrap()
            .is_none());
    }

    #[test]
    fn two_arm_family_shape() {
        let inst = make_family::<f64>(FamilyParams::TwoArm).unwrap();
        assert_eq!(inst.num_ndds(), 1);
        assert_eq!(inst.num_pairs(), 6);
        assert_eq!(inst.cycle_cap(), 2);
        assert_eq!(inst.chain_cap(), 4);
        assert!(crate::indexsets::enumerate_cycles(&inst).is_empty());
    }

    #[test]
    fn udders_family_shape() {
        let inst = make_family::<f64>(FamilyParams::Udders {
            cycle_cap: 3,
            chain_cap: 6,
        })
        .unwrap();
        // No cycles of length <= K exist; the optimum is the unique chain of
        // exactly L arcs.
        assert!(crate::indexsets::enumerate_cycles(&inst).is_empty());
        let opt = brute_force_optimum(&inst).unwrap();
        assert_abs_diff_eq!(opt.weight, 6.0);
        assert_eq!(opt.chains.len(), 1);
        assert_eq!(opt.chains[0].len(), 6);

        assert!(matches!(
            make_family::<f64>(FamilyParams::Udders {
                cycle_cap: 3,
                chain_cap: 4
            }),
            Err(HarnessError::BadFamilyParams(_))
        ));
    }

    #[test]
    fn decompose_simple_triangle() {
        let walk = vec![(1, 2), (2, 3), (3, 1)];
        let cycles = decompose_closed_walk(&walk).unwrap();
        assert_eq!(cycles, vec![Cycle::new(vec![1, 2, 3])]);
    }

    #[test]
    fn decompose_figure_eight() {
        let walk = vec![(1, 2), (2, 1), (1, 3), (3, 1)];
        let cycles = decompose_closed_walk(&walk).unwrap();
        assert_eq!(cycles.len(), 2);
        let mut arcs: Vec<(usize, usize)> = cycles
            .iter()
            .flat_map(|c| c.arcs().collect::<Vec<_>>())
            .collect();
        arcs.sort();
        let mut expect = walk.clone();
        expect.sort();
        assert_eq!(arcs, expect);
    }

    #[test]
    fn decompose_rejects_open_walks() {
        assert!(matches!(
            decompose_closed_walk(&[(1, 2), (2, 3)]),
            Err(HarnessError::NotAClosedWalk(_))
        ));
        assert!(matches!(
            decompose_closed_walk(&[(1, 2), (3, 1)]),
            Err(HarnessError::NotAClosedWalk(_))
        ));
    }
}
