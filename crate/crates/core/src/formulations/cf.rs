//! Cycle formulation: one binary variable per feasible cycle or chain, one
//! capacity row per vertex.

use crate::indexsets::{enumerate_chains_bounded, enumerate_cycles_bounded};
use crate::instance::Instance;
use crate::model::{ConTag, MipModel, ModelKind, Sense, VarTag};
use crate::scalar::Scalar;

use super::{BuildError, BuildOptions};

pub fn build_cf<S: Scalar>(instance: &Instance<S>) -> Result<MipModel<S>, BuildError> {
    build_cf_with(instance, &BuildOptions::default())
}

pub(super) fn build_cf_with<S: Scalar>(
    instance: &Instance<S>,
    options: &BuildOptions,
) -> Result<MipModel<S>, BuildError> {
    let budget = options.var_budget;
    let too_large = |_| BuildError::ModelTooLarge {
        vars: budget + 1,
        budget,
    };
    let cycles = enumerate_cycles_bounded(instance, Some(budget)).map_err(too_large)?;
    let chain_budget = budget - cycles.len();
    let chains = enumerate_chains_bounded(instance, Some(chain_budget)).map_err(|_| {
        BuildError::ModelTooLarge {
            vars: budget + 1,
            budget,
        }
    })?;

    let mut model = MipModel::new(ModelKind::CycleFormulation);
    let mut vertex_terms: Vec<Vec<(usize, S)>> = vec![Vec::new(); instance.num_vertices() + 1];

    for cycle in cycles {
        let weight = instance.cycle_weight(&cycle).expect("enumerated cycle");
        let var = model.add_var(VarTag::Cycle(cycle.clone()), weight, true);
        for &v in cycle.vertices() {
            vertex_terms[v].push((var, S::one()));
        }
    }
    for chain in chains {
        let weight = instance.chain_weight(&chain).expect("enumerated chain");
        let var = model.add_var(VarTag::Chain(chain.clone()), weight, true);
        for &v in chain.vertices() {
            vertex_terms[v].push((var, S::one()));
        }
    }

    for (v, slot) in vertex_terms.iter_mut().enumerate().skip(1) {
        let terms = std::mem::take(slot);
        if !terms.is_empty() {
            model.add_constraint(ConTag::VertexCap(v), terms, Sense::Le, S::one());
        }
    }
    Ok(model)
}
