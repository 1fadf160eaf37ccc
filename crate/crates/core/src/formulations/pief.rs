//! Position-indexed edge formulation over graph copies, in three variants:
//! the full position rule, the shortest-path reduction, and the
//! twice-reduced variant that drops positions 1 and K and carries the
//! implicit arcs in adjusted weights.

use crate::indexsets::{copy_distances, pief_positions_with, PiefVariant};
use crate::instance::Instance;
use crate::model::{ConTag, MipModel, ModelKind, Sense, VarTag};
use crate::scalar::Scalar;

use super::BuildError;

/// Builds the PIEF model. Requires an instance without NDDs; the hybrid
/// formulation handles instances with NDDs.
pub fn build_pief<S: Scalar>(
    instance: &Instance<S>,
    variant: PiefVariant,
) -> Result<MipModel<S>, BuildError> {
    if instance.num_ndds() > 0 {
        return Err(BuildError::NddsPresent);
    }
    if variant == PiefVariant::Reduced2 && instance.cycle_cap() < 3 {
        return Err(BuildError::CapTooSmallForReduced2);
    }
    let mut model = MipModel::new(ModelKind::Pief(variant));
    let capacity = add_pief_side(&mut model, instance, variant)?;
    for v in instance.pair_vertices() {
        if !capacity[v].is_empty() {
            model.add_constraint(
                ConTag::VertexCap(v),
                capacity[v].clone(),
                Sense::Le,
                S::one(),
            );
        }
    }
    Ok(model)
}

/// The modified weight carried by a twice-reduced variable: the arc's own
/// weight plus the implicitly selected position-1 arc at position 2 and the
/// implicitly selected closing arc at position K-1 (when the arc does not
/// itself enter the copy root).
pub fn adjusted_weight<S: Scalar>(
    instance: &Instance<S>,
    i: usize,
    j: usize,
    k: usize,
    l: usize,
) -> Result<S, BuildError> {
    if instance.cycle_cap() < 3
        || i < l
        || j < l
        || !instance.is_pair(i)
        || !instance.is_pair(j)
        || !instance.has_arc(i, j)
    {
        return Err(BuildError::PositionOutOfSet);
    }
    let dist = copy_distances(instance, l);
    let set = pief_positions_with(instance.cycle_cap(), &dist, i, j, PiefVariant::Reduced2);
    if !set.positions.contains(&k) {
        return Err(BuildError::PositionOutOfSet);
    }
    Ok(adjusted_weight_unchecked(instance, i, j, k, l))
}

/// As [`adjusted_weight`] for a position already known to lie in the
/// twice-reduced set, which guarantees the implicit arcs exist.
fn adjusted_weight_unchecked<S: Scalar>(
    instance: &Instance<S>,
    i: usize,
    j: usize,
    k: usize,
    l: usize,
) -> S {
    let cap = instance.cycle_cap();
    let mut w = instance.weight(i, j).expect("arc exists");
    if k == 2 {
        w += instance.weight(l, i).expect("implicit opening arc exists");
    }
    if k == cap - 1 && j != l {
        w += instance.weight(j, l).expect("implicit closing arc exists");
    }
    w
}

/// Adds the PIEF cycle-side variables and per-copy flow constraints over the
/// pair subgraph, returning the capacity terms each vertex accumulates
/// (including, for the twice-reduced variant, the implicit-arc terms).
pub(super) fn add_pief_side<S: Scalar>(
    model: &mut MipModel<S>,
    instance: &Instance<S>,
    variant: PiefVariant,
) -> Result<Vec<Vec<(usize, S)>>, BuildError> {
    let cap = instance.cycle_cap();
    let n = instance.num_vertices();
    let mut capacity: Vec<Vec<(usize, S)>> = vec![Vec::new(); n + 1];
    if cap < 2 {
        return Ok(capacity);
    }
    let flow_range = match variant {
        PiefVariant::Full | PiefVariant::Reduced => 1..cap,
        PiefVariant::Reduced2 => 2..cap.saturating_sub(1),
    };

    for copy in instance.pair_vertices() {
        let dist = copy_distances(instance, copy);
        // in/out variable lists per (vertex, position) for this copy.
        let mut incoming: Vec<Vec<Vec<usize>>> = vec![vec![Vec::new(); cap + 2]; n + 1];
        let mut outgoing: Vec<Vec<Vec<usize>>> = vec![vec![Vec::new(); cap + 2]; n + 1];

        for arc in instance.arcs() {
            let (i, j) = (arc.src, arc.dst);
            if i < copy || j < copy || !instance.is_pair(i) {
                continue;
            }
            let set = pief_positions_with(cap, &dist, i, j, variant);
            for &pos in &set.positions {
                let objective = match variant {
                    PiefVariant::Reduced2 => adjusted_weight_unchecked(instance, i, j, pos, copy),
                    _ => arc.weight,
                };
                let var = model.add_var(
                    VarTag::PiefArc {
                        src: i,
                        dst: j,
                        pos,
                        copy,
                    },
                    objective,
                    true,
                );
                incoming[j][pos].push(var);
                outgoing[i][pos].push(var);
                capacity[j].push((var, S::one()));
                if variant == PiefVariant::Reduced2 {
                    if pos == 2 {
                        // Implicit opening arc (copy, i) targets i.
                        capacity[i].push((var, S::one()));
                    }
                    if pos == cap - 1 && j != copy {
                        // Implicit closing arc (j, copy) targets the root.
                        capacity[copy].push((var, S::one()));
                    }
                }
            }
        }

        for vertex in copy + 1..=n {
            for pos in flow_range.clone() {
                let lhs = &incoming[vertex][pos];
                let rhs = &outgoing[vertex][pos + 1];
                if lhs.is_empty() && rhs.is_empty() {
                    continue;
                }
                let mut terms: Vec<(usize, S)> = lhs.iter().map(|&v| (v, S::one())).collect();
                terms.extend(rhs.iter().map(|&v| (v, -S::one())));
                model.add_constraint(
                    ConTag::CopyFlow { copy, vertex, pos },
                    terms,
                    Sense::Eq,
                    S::zero(),
                );
            }
        }
    }
    Ok(capacity)
}
