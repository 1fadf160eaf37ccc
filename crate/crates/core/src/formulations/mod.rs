//! Compilation of instances into MIP models — the cycle formulation, the
//! position-indexed edge formulation family, the position-indexed chain-edge
//! formulation, and the hybrid — plus the failure-aware objective rewrite
//! and decoding of solver assignments back into vertex-disjoint packings.

mod cf;
mod hpief;
mod picef;
mod pief;

pub use cf::build_cf;
pub use hpief::build_hpief;
pub use picef::build_picef;
pub(crate) use picef::picef_master_parts;
pub use pief::{adjusted_weight, build_pief};

use thiserror::Error;

use crate::indexsets::PiefVariant;
use crate::instance::{Chain, Cycle, Instance};
use crate::model::{MipModel, ModelKind, VarTag};
use crate::scalar::Scalar;

#[derive(Debug, Error, PartialEq)]
pub enum BuildError {
    #[error("this formulation requires an instance without NDDs")]
    NddsPresent,
    #[error("the twice-reduced variant requires a cycle cap of at least 3")]
    CapTooSmallForReduced2,
    #[error("model would need {vars} variables, over the budget of {budget}")]
    ModelTooLarge { vars: usize, budget: usize },
    #[error("failure probability must lie in (0, 1]")]
    BadProbability,
    #[error("position outside the twice-reduced position set")]
    PositionOutOfSet,
    #[error("unsupported: {0}")]
    Unsupported(&'static str),
}

#[derive(Debug, Error, PartialEq)]
pub enum DecodeError {
    #[error("infeasible assignment: {0}")]
    InfeasibleAssignment(String),
    #[error("cannot decode an assignment for a hand-built model")]
    UnsupportedModel,
}

/// Build-time limits. The variable budget protects against the exponential
/// cycle count in the cycle formulation and PICEF at large caps.
#[derive(Debug, Clone, Copy)]
pub struct BuildOptions {
    pub var_budget: usize,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            var_budget: 5_000_000,
        }
    }
}

/// A named formulation, the unit of dispatch for the CLI and the LPR
/// comparison harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Formulation {
    Cf,
    Pief(PiefVariant),
    Picef { reduced: bool },
    Hpief(PiefVariant),
}

impl Formulation {
    pub const ALL: [Formulation; 7] = [
        Formulation::Cf,
        Formulation::Pief(PiefVariant::Full),
        Formulation::Pief(PiefVariant::Reduced),
        Formulation::Pief(PiefVariant::Reduced2),
        Formulation::Picef { reduced: false },
        Formulation::Picef { reduced: true },
        Formulation::Hpief(PiefVariant::Full),
    ];

    pub fn label(&self) -> &'static str {
        match self {
            Formulation::Cf => "cf",
            Formulation::Pief(PiefVariant::Full) => "pief",
            Formulation::Pief(PiefVariant::Reduced) => "piefr",
            Formulation::Pief(PiefVariant::Reduced2) => "pief2",
            Formulation::Picef { reduced: false } => "picef",
            Formulation::Picef { reduced: true } => "picef-red",
            Formulation::Hpief(_) => "hpief",
        }
    }

    /// Whether the formulation can model the given instance at all.
    pub fn applicable<S: Scalar>(&self, instance: &Instance<S>) -> bool {
        match self {
            Formulation::Pief(variant) => {
                instance.num_ndds() == 0
                    && (*variant != PiefVariant::Reduced2 || instance.cycle_cap() >= 3)
            }
            Formulation::Hpief(variant) => {
                *variant != PiefVariant::Reduced2 || instance.cycle_cap() >= 3
            }
            _ => true,
        }
    }

    pub fn build<S: Scalar>(&self, instance: &Instance<S>) -> Result<MipModel<S>, BuildError> {
        self.build_with(instance, &BuildOptions::default())
    }

    pub fn build_with<S: Scalar>(
        &self,
        instance: &Instance<S>,
        options: &BuildOptions,
    ) -> Result<MipModel<S>, BuildError> {
        match *self {
            Formulation::Cf => cf::build_cf_with(instance, options),
            Formulation::Pief(variant) => pief::build_pief(instance, variant),
            Formulation::Picef { reduced } => picef::build_picef_with(instance, reduced, options),
            Formulation::Hpief(variant) => hpief::build_hpief_variant(instance, variant),
        }
    }
}

/// A vertex-disjoint set of cycles and chains with its deterministic weight
/// and, when the instance carries a failure probability, its expected weight.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution<S: Scalar = f64> {
    pub cycles: Vec<Cycle>,
    pub chains: Vec<Chain>,
    pub weight: S,
    pub expected_weight: Option<S>,
}

impl<S: Scalar> Solution<S> {
    pub fn empty() -> Self {
        Solution {
            cycles: vec![],
            chains: vec![],
            weight: S::zero(),
            expected_weight: None,
        }
    }

    /// Validates the structures against the instance and computes weights.
    pub fn build(
        instance: &Instance<S>,
        mut cycles: Vec<Cycle>,
        mut chains: Vec<Chain>,
    ) -> Result<Self, String> {
        cycles.sort();
        chains.sort();
        let mut used = vec![false; instance.num_vertices() + 1];
        let mut claim = |v: usize| -> Result<(), String> {
            if v == 0 || v > instance.num_vertices() {
                return Err(format!("vertex {v} out of range"));
            }
            if used[v] {
                return Err(format!("vertex {v} used by two structures"));
            }
            used[v] = true;
            Ok(())
        };

        let mut weight = S::zero();
        for cycle in &cycles {
            if cycle.len() < 2 || cycle.len() > instance.cycle_cap() {
                return Err(format!("cycle {cycle} violates the cycle cap"));
            }
            for &v in cycle.vertices() {
                if !instance.is_pair(v) {
                    return Err(format!("cycle {cycle} visits non-pair vertex {v}"));
                }
                claim(v)?;
            }
            weight += instance
                .cycle_weight(cycle)
                .ok_or_else(|| format!("cycle {cycle} uses a missing arc"))?;
        }
        for chain in &chains {
            if chain.is_empty() || chain.len() > instance.chain_cap() {
                return Err(format!("chain {chain} violates the chain cap"));
            }
            if !instance.is_ndd(chain.ndd()) {
                return Err(format!("chain {chain} does not start at an NDD"));
            }
            for (idx, &v) in chain.vertices().iter().enumerate() {
                if idx > 0 && !instance.is_pair(v) {
                    return Err(format!("chain {chain} visits non-pair vertex {v}"));
                }
                claim(v)?;
            }
            weight += instance
                .chain_weight(chain)
                .ok_or_else(|| format!("chain {chain} uses a missing arc"))?;
        }

        let expected_weight = instance
            .failure_prob()
            .map(|p| expected_weight(instance, &cycles, &chains, p));
        Ok(Solution {
            cycles,
            chains,
            weight,
            expected_weight,
        })
    }

    /// The value the optimizer saw: expected weight under a failure-aware
    /// objective, deterministic weight otherwise.
    pub fn objective_value(&self) -> S {
        self.expected_weight.unwrap_or(self.weight)
    }
}

/// Expected weight of a packing under uniform arc-success probability `p`:
/// a cycle survives only as a whole (`p^{|c|} w_c`); a chain pays out
/// prefix-wise (`sum_k p^k w(a_k)`).
pub fn expected_weight<S: Scalar>(
    instance: &Instance<S>,
    cycles: &[Cycle],
    chains: &[Chain],
    p: S,
) -> S {
    let mut total = S::zero();
    for cycle in cycles {
        let w = instance.cycle_weight(cycle).expect("validated cycle");
        total += p.powi(cycle.len() as i32) * w;
    }
    for chain in chains {
        for (k, (u, v)) in chain.arcs().enumerate() {
            let w = instance.weight(u, v).expect("validated chain arc");
            total += p.powi((k + 1) as i32) * w;
        }
    }
    total
}

/// Rewrites a PICEF model's objective for failure-aware matching: an arc at
/// chain position `k` is worth `p^k w`, a cycle `p^{|c|} w_c`.
pub fn apply_failure_objective<S: Scalar>(
    mut model: MipModel<S>,
    instance: &Instance<S>,
) -> Result<MipModel<S>, BuildError> {
    let Some(p) = instance.failure_prob() else {
        return Err(BuildError::BadProbability);
    };
    if !(p > S::zero() && p <= S::one()) {
        return Err(BuildError::BadProbability);
    }
    match model.kind() {
        ModelKind::Picef { .. } => {}
        ModelKind::Hpief(_) => {
            return Err(BuildError::Unsupported(
                "failure-aware objectives require explicit cycle lengths; use PICEF",
            ))
        }
        _ => {
            return Err(BuildError::Unsupported(
                "failure-aware objectives are defined for PICEF models only",
            ))
        }
    }
    for idx in 0..model.num_vars() {
        let coeff = match &model.var(idx).tag {
            VarTag::PicefArc { src, dst, pos } => {
                let w = instance.weight(*src, *dst).expect("model arc exists");
                p.powi(*pos as i32) * w
            }
            VarTag::Cycle(c) => {
                let w = instance.cycle_weight(c).expect("model cycle exists");
                p.powi(c.len() as i32) * w
            }
            tag => {
                debug_assert!(false, "unexpected variable {tag} in a PICEF model");
                model.var(idx).objective
            }
        };
        model.set_objective_coeff(idx, coeff);
    }
    model.set_discount(p);
    Ok(model)
}

/// Reconstructs the packing encoded by an integral assignment, verifies it,
/// and checks that its (possibly discounted) value matches the model
/// objective at the assignment.
pub fn decode_solution<S: Scalar>(
    model: &MipModel<S>,
    assignment: &[bool],
    instance: &Instance<S>,
) -> Result<Solution<S>, DecodeError> {
    if assignment.len() != model.num_vars() {
        return Err(DecodeError::InfeasibleAssignment(
            "assignment length does not match the model".to_string(),
        ));
    }
    if !model.assignment_feasible(assignment) {
        return Err(DecodeError::InfeasibleAssignment(
            "assignment violates model constraints".to_string(),
        ));
    }

    let (cycles, chains) = match model.kind() {
        ModelKind::CycleFormulation => decode_cf(model, assignment),
        ModelKind::Picef { .. } => decode_picef(model, assignment, instance),
        ModelKind::Pief(variant) => {
            decode_pief_side(model, assignment, instance, variant).map(|c| (c, vec![]))
        }
        ModelKind::Hpief(variant) => {
            let cycles = decode_pief_side(model, assignment, instance, variant)?;
            let (_, chains) = decode_picef(model, assignment, instance)?;
            Ok((cycles, chains))
        }
        ModelKind::Custom => return Err(DecodeError::UnsupportedModel),
    }?;

    let solution =
        Solution::build(instance, cycles, chains).map_err(DecodeError::InfeasibleAssignment)?;

    // The reconstructed packing must be worth exactly what the model says.
    let model_value = model.objective_value(assignment);
    let solution_value = match model.discount() {
        Some(_) => solution
            .expected_weight
            .expect("discounted model implies instance failure probability"),
        None => solution.weight,
    };
    if (model_value - solution_value).abs() > S::val(1e-6) * (S::one() + model_value.abs()) {
        return Err(DecodeError::InfeasibleAssignment(format!(
            "decoded value {solution_value} does not match model objective {model_value}"
        )));
    }
    Ok(solution)
}

fn decode_cf<S: Scalar>(
    model: &MipModel<S>,
    assignment: &[bool],
) -> Result<(Vec<Cycle>, Vec<Chain>), DecodeError> {
    let mut cycles = Vec::new();
    let mut chains = Vec::new();
    for (idx, var) in model.vars().iter().enumerate() {
        if !assignment[idx] {
            continue;
        }
        match &var.tag {
            VarTag::Cycle(c) => cycles.push(c.clone()),
            VarTag::Chain(c) => chains.push(c.clone()),
            tag => {
                return Err(DecodeError::InfeasibleAssignment(format!(
                    "unexpected selected variable {tag} in a cycle-formulation model"
                )))
            }
        }
    }
    Ok((cycles, chains))
}

/// Follows selected chain-arc variables position by position from each NDD.
fn decode_picef<S: Scalar>(
    model: &MipModel<S>,
    assignment: &[bool],
    instance: &Instance<S>,
) -> Result<(Vec<Cycle>, Vec<Chain>), DecodeError> {
    use std::collections::HashMap;

    let mut cycles = Vec::new();
    let mut selected: HashMap<(usize, usize), usize> = HashMap::new();
    let mut selected_count = 0usize;
    for (idx, var) in model.vars().iter().enumerate() {
        if !assignment[idx] {
            continue;
        }
        match &var.tag {
            VarTag::Cycle(c) => cycles.push(c.clone()),
            VarTag::PicefArc { src, dst, pos } => {
                if selected.insert((*src, *pos), *dst).is_some() {
                    return Err(DecodeError::InfeasibleAssignment(format!(
                        "two chain arcs leave vertex {src} at position {pos}"
                    )));
                }
                selected_count += 1;
            }
            VarTag::PiefArc { .. } => {} // handled by the cycle-side decoder
            tag => {
                return Err(DecodeError::InfeasibleAssignment(format!(
                    "unexpected selected variable {tag}"
                )))
            }
        }
    }

    let mut chains = Vec::new();
    let mut consumed = 0usize;
    for ndd in instance.ndd_vertices() {
        let Some(&first) = selected.get(&(ndd, 1)) else {
            continue;
        };
        consumed += 1;
        let mut vertices = vec![ndd, first];
        let mut current = first;
        let mut pos = 2;
        while let Some(&next) = selected.get(&(current, pos)) {
            consumed += 1;
            vertices.push(next);
            current = next;
            pos += 1;
        }
        chains.push(Chain::new(vertices));
    }
    if consumed != selected_count {
        return Err(DecodeError::InfeasibleAssignment(
            "selected chain arcs do not form NDD-initiated chains".to_string(),
        ));
    }
    Ok((cycles, chains))
}

/// Reconstructs cycles from per-copy position chains; for the twice-reduced
/// variant the implicit position-1 and position-K arcs are re-materialized.
fn decode_pief_side<S: Scalar>(
    model: &MipModel<S>,
    assignment: &[bool],
    instance: &Instance<S>,
    variant: PiefVariant,
) -> Result<Vec<Cycle>, DecodeError> {
    use std::collections::BTreeMap;

    let cap = instance.cycle_cap();
    let mut per_copy: BTreeMap<usize, Vec<(usize, usize, usize)>> = BTreeMap::new();
    for (idx, var) in model.vars().iter().enumerate() {
        if !assignment[idx] {
            continue;
        }
        if let VarTag::PiefArc {
            src,
            dst,
            pos,
            copy,
        } = &var.tag
        {
            per_copy.entry(*copy).or_default().push((*pos, *src, *dst));
        }
    }

    let infeasible = |msg: String| DecodeError::InfeasibleAssignment(msg);
    let mut cycles = Vec::new();
    for (copy, mut arcs) in per_copy {
        arcs.sort();
        for pair in arcs.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(infeasible(format!(
                    "two arcs selected at position {} of copy {copy}",
                    pair[0].0
                )));
            }
        }
        if variant == PiefVariant::Reduced2 {
            let (first_pos, first_src, _) = arcs[0];
            if first_pos != 2 {
                return Err(infeasible(format!(
                    "copy {copy} selection starts at position {first_pos}, expected 2"
                )));
            }
            if !instance.has_arc(copy, first_src) {
                return Err(infeasible(format!(
                    "implicit opening arc ({copy}, {first_src}) does not exist"
                )));
            }
            arcs.insert(0, (1, copy, first_src));
            let (last_pos, _, last_dst) = *arcs.last().unwrap();
            if last_dst != copy {
                if last_pos != cap - 1 {
                    return Err(infeasible(format!(
                        "copy {copy} selection ends at position {last_pos} without closing"
                    )));
                }
                if !instance.has_arc(last_dst, copy) {
                    return Err(infeasible(format!(
                        "implicit closing arc ({last_dst}, {copy}) does not exist"
                    )));
                }
                arcs.push((cap, last_dst, copy));
            }
        }
        let mut vertices = Vec::with_capacity(arcs.len());
        for (offset, &(pos, src, dst)) in arcs.iter().enumerate() {
            if pos != offset + 1 {
                return Err(infeasible(format!(
                    "copy {copy} has a gap at position {}",
                    offset + 1
                )));
            }
            if offset == 0 && src != copy {
                return Err(infeasible(format!(
                    "copy {copy} cycle does not start at the copy root"
                )));
            }
            if offset > 0 && arcs[offset - 1].2 != src {
                return Err(infeasible(format!(
                    "copy {copy} arcs do not chain at position {pos}"
                )));
            }
            vertices.push(src);
            let _ = dst;
        }
        if arcs.last().unwrap().2 != copy {
            return Err(infeasible(format!(
                "copy {copy} cycle does not close at its root"
            )));
        }
        cycles.push(Cycle::new(vertices));
    }
    Ok(cycles)
}
