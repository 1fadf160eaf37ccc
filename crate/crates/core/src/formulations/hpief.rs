//! Hybrid formulation: PIEF position-indexed variables for cycles over the
//! pair subgraph, PICEF position-indexed variables for chains, and a joint
//! per-pair capacity row. Fully compact: no explicit cycle variables.

use crate::indexsets::PiefVariant;
use crate::instance::Instance;
use crate::model::{MipModel, ModelKind};
use crate::scalar::Scalar;

use super::picef::{add_picef_chain_side, finish_picef_constraints};
use super::pief::add_pief_side;
use super::BuildError;

/// Builds the hybrid model with the shortest-path reduction on the cycle
/// side. The reduction only removes positions no feasible cycle uses, and
/// any fractional point decomposes into feasible-cycle mass, so the LP
/// relaxation value is unchanged; the model is often far smaller.
pub fn build_hpief<S: Scalar>(instance: &Instance<S>) -> Result<MipModel<S>, BuildError> {
    build_hpief_variant(instance, PiefVariant::Reduced)
}

/// Builds the hybrid model with either PIEF reduction applied to the cycle
/// side; the chain side is unaffected.
pub fn build_hpief_variant<S: Scalar>(
    instance: &Instance<S>,
    variant: PiefVariant,
) -> Result<MipModel<S>, BuildError> {
    if variant == PiefVariant::Reduced2 && instance.cycle_cap() < 3 {
        return Err(BuildError::CapTooSmallForReduced2);
    }
    let mut model = MipModel::new(ModelKind::Hpief(variant));
    let cycle_capacity = add_pief_side(&mut model, instance, variant)?;
    let chain_side = add_picef_chain_side(&mut model, instance, false);
    finish_picef_constraints(&mut model, instance, chain_side, cycle_capacity, false);
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formulations::build_pief;
    use crate::instance::{build_instance, Arc};
    use crate::solver::{solve_mip, MipConfig};
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
    fn figure1_optimum_is_five() {
        let inst = unit_instance(
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
        let model = build_hpief(&inst).unwrap();
        let out = solve_mip(&model, &MipConfig::default()).unwrap();
        assert_abs_diff_eq!(out.value, 5.0, epsilon = 1e-9);
    }

    #[test]
    fn reduces_to_pief_without_chains() {
        let inst = unit_instance(0, 4, &[(1, 2), (2, 1), (2, 3), (3, 4), (4, 2)], 3, 0);
        let hybrid = solve_mip(&build_hpief(&inst).unwrap(), &MipConfig::default()).unwrap();
        let pief = solve_mip(
            &build_pief(&inst, PiefVariant::Full).unwrap(),
            &MipConfig::default(),
        )
        .unwrap();
        assert_abs_diff_eq!(hybrid.value, pief.value, epsilon = 1e-9);
    }

    #[test]
    fn reduced_cycle_sides_agree() {
        let inst = unit_instance(
            1,
            5,
            &[
                (1, 2),
                (2, 3),
                (3, 4),
                (4, 2),
                (3, 2),
                (5, 6),
                (6, 5),
                (2, 6),
            ],
            3,
            3,
        );
        let full = solve_mip(&build_hpief(&inst).unwrap(), &MipConfig::default()).unwrap();
        for variant in [PiefVariant::Reduced, PiefVariant::Reduced2] {
            let model = build_hpief_variant(&inst, variant).unwrap();
            let out = solve_mip(&model, &MipConfig::default()).unwrap();
            assert_abs_diff_eq!(out.value, full.value, epsilon = 1e-9);
        }
    }
}
