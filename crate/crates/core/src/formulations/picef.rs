//! Position-indexed chain-edge formulation: position-indexed arc variables
//! for chains plus one explicit binary variable per feasible cycle.

use crate::indexsets::{enumerate_cycles_bounded, ndd_distances, picef_positions_with};
use crate::instance::Instance;
use crate::model::{ConTag, MipModel, ModelKind, Sense, VarTag};
use crate::scalar::Scalar;

use super::{BuildError, BuildOptions};

pub fn build_picef<S: Scalar>(
    instance: &Instance<S>,
    reduced: bool,
) -> Result<MipModel<S>, BuildError> {
    build_picef_with(instance, reduced, &BuildOptions::default())
}

pub(super) fn build_picef_with<S: Scalar>(
    instance: &Instance<S>,
    reduced: bool,
    options: &BuildOptions,
) -> Result<MipModel<S>, BuildError> {
    let mut model = MipModel::new(ModelKind::Picef { reduced });
    let side = add_picef_chain_side(&mut model, instance, reduced);

    let budget = options.var_budget.saturating_sub(model.num_vars());
    let cycles = enumerate_cycles_bounded(instance, Some(budget)).map_err(|_| {
        BuildError::ModelTooLarge {
            vars: options.var_budget + 1,
            budget: options.var_budget,
        }
    })?;

    let n = instance.num_vertices();
    let mut cycle_terms: Vec<Vec<(usize, S)>> = vec![Vec::new(); n + 1];
    for cycle in cycles {
        let weight = instance.cycle_weight(&cycle).expect("enumerated cycle");
        let var = model.add_var(VarTag::Cycle(cycle.clone()), weight, true);
        for &v in cycle.vertices() {
            cycle_terms[v].push((var, S::one()));
        }
    }

    finish_picef_constraints(&mut model, instance, side, cycle_terms, false);
    Ok(model)
}

/// Chain-arc variables plus the constraint skeleton for the
/// column-generation master: capacity rows exist for every pair vertex so
/// that cycle columns always have rows to join.
pub(crate) fn picef_master_parts<S: Scalar>(model: &mut MipModel<S>, instance: &Instance<S>) {
    let side = add_picef_chain_side(model, instance, false);
    let n = instance.num_vertices();
    finish_picef_constraints(model, instance, side, vec![Vec::new(); n + 1], true);
}

/// Variable indices bucketed by vertex and chain position.
type PositionVars = Vec<Vec<Vec<usize>>>;

/// Chain-side state handed from variable creation to constraint assembly.
pub(crate) struct ChainSide<S> {
    /// Incoming chain-arc terms per pair vertex (the capacity-row share).
    pub incoming_terms: Vec<Vec<(usize, S)>>,
    /// Position-1 variables per NDD.
    pub ndd_terms: Vec<Vec<(usize, S)>>,
    /// `in_vars[v][k]`: variables for arcs entering `v` at position `k`.
    in_vars: PositionVars,
    /// `out_vars[v][k]`: variables for arcs leaving `v` at position `k`.
    out_vars: PositionVars,
}

/// Adds the `y` chain-arc variables. Shared with the hybrid formulation and
/// the branch-and-price master.
pub(crate) fn add_picef_chain_side<S: Scalar>(
    model: &mut MipModel<S>,
    instance: &Instance<S>,
    reduced: bool,
) -> ChainSide<S> {
    let n = instance.num_vertices();
    let l_cap = instance.chain_cap();
    let dist = ndd_distances(instance);
    let mut side = ChainSide {
        incoming_terms: vec![Vec::new(); n + 1],
        ndd_terms: vec![Vec::new(); n + 1],
        in_vars: vec![vec![Vec::new(); l_cap + 2]; n + 1],
        out_vars: vec![vec![Vec::new(); l_cap + 2]; n + 1],
    };
    for arc in instance.arcs() {
        let (i, j) = (arc.src, arc.dst);
        let set = picef_positions_with(l_cap, &dist, instance.num_ndds(), i, j, reduced);
        for &pos in &set.positions {
            let var = model.add_var(
                VarTag::PicefArc {
                    src: i,
                    dst: j,
                    pos,
                },
                arc.weight,
                true,
            );
            side.in_vars[j][pos].push(var);
            side.out_vars[i][pos].push(var);
            side.incoming_terms[j].push((var, S::one()));
            if pos == 1 {
                side.ndd_terms[i].push((var, S::one()));
            }
        }
    }
    side
}

/// Adds the capacity, NDD-capacity, and chain-flow constraints. The flow
/// inequality links every position `k` to `k + 1` for `k` up to the chain
/// cap minus one. `force_capacity_rows` keeps vacuous capacity rows, which
/// the column-generation master needs as landing spots for new columns.
pub(crate) fn finish_picef_constraints<S: Scalar>(
    model: &mut MipModel<S>,
    instance: &Instance<S>,
    side: ChainSide<S>,
    extra_capacity_terms: Vec<Vec<(usize, S)>>,
    force_capacity_rows: bool,
) {
    let l_cap = instance.chain_cap();
    for v in instance.pair_vertices() {
        let mut terms = side.incoming_terms[v].clone();
        terms.extend(extra_capacity_terms[v].iter().copied());
        if !terms.is_empty() || force_capacity_rows {
            model.add_constraint(ConTag::VertexCap(v), terms, Sense::Le, S::one());
        }
    }
    for v in instance.ndd_vertices() {
        let terms = side.ndd_terms[v].clone();
        if !terms.is_empty() {
            model.add_constraint(ConTag::NddCap(v), terms, Sense::Le, S::one());
        }
    }
    for v in instance.pair_vertices() {
        for pos in 1..l_cap.max(1) {
            let rhs = &side.out_vars[v][pos + 1];
            if rhs.is_empty() {
                continue;
            }
            let mut terms: Vec<(usize, S)> = side.in_vars[v][pos]
                .iter()
                .map(|&var| (var, S::one()))
                .collect();
            terms.extend(rhs.iter().map(|&var| (var, -S::one())));
            model.add_constraint(
                ConTag::ChainFlow { vertex: v, pos },
                terms,
                Sense::Ge,
                S::zero(),
            );
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{build_instance, Arc};
    use crate::model::VarTag;
    use crate::solver::{solve_lp, solve_mip, MipConfig};
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

    fn figure4() -> Instance<f64> {
        unit_instance(
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
        )
    }

    fn two_arm() -> Instance<f64> {
        unit_instance(
            1,
            6,
            &[(1, 2), (2, 3), (3, 4), (1, 5), (5, 6), (6, 7), (7, 5)],
            2,
            4,
        )
    }

    #[test]
    fn figure4_optimum_is_four() {
        for reduced in [false, true] {
            let model = build_picef(&figure4(), reduced).unwrap();
            let out = solve_mip(&model, &MipConfig::default()).unwrap();
            assert_abs_diff_eq!(out.value, 4.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn figure4_variable_layout() {
        let model = build_picef(&figure4(), false).unwrap();
        // 3 NDD arcs at position 1, 5 pair arcs at positions {2,3,4}, 2 cycles.
        assert_eq!(model.num_vars(), 3 + 5 * 3 + 2);
        assert!(model
            .var_index(&VarTag::PicefArc {
                src: 3,
                dst: 4,
                pos: 4
            })
            .is_some());
        let reduced = build_picef(&figure4(), true).unwrap();
        assert!(reduced.num_vars() <= model.num_vars());
        // d(5) = 2 rules out position 2 for arc (5, 6).
        assert!(reduced
            .var_index(&VarTag::PicefArc {
                src: 5,
                dst: 6,
                pos: 2
            })
            .is_none());
    }

    #[test]
    fn two_arm_lpr_is_seven_halves() {
        let model = build_picef(&two_arm(), false).unwrap();
        let lp = solve_lp(&model).unwrap();
        assert_abs_diff_eq!(lp.value, 3.5, epsilon = 1e-9);
        let ip = solve_mip(&model, &MipConfig::default()).unwrap();
        assert_abs_diff_eq!(ip.value, 3.0, epsilon = 1e-9);
    }

    #[test]
    fn chains_longer_than_cycle_cap_are_reachable() {
        // A single chain of length 4 with K = 2: the flow rows must link
        // positions up to L - 1, not K - 1.
        let inst = unit_instance(1, 4, &[(1, 2), (2, 3), (3, 4), (4, 5)], 2, 4);
        let model = build_picef(&inst, false).unwrap();
        let out = solve_mip(&model, &MipConfig::default()).unwrap();
        assert_abs_diff_eq!(out.value, 4.0, epsilon = 1e-9);
    }
}
