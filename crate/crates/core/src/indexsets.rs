//! Enumeration kernel: bounded cycles and chains, per-copy shortest-path
//! distances, and the position-index sets used by the position-indexed
//! formulations.
//!
//! The graph copy `D^l` is the subgraph induced by vertices `>= l`. A cycle
//! selected in copy `l` contains `l` and its arc positions are counted from
//! the arc leaving `l`.

use std::collections::VecDeque;

use thiserror::Error;

use crate::instance::{Chain, Cycle, Instance};
use crate::scalar::Scalar;

/// Sentinel for an unreachable vertex in [`CopyDistances`].
pub const UNREACHABLE: usize = usize::MAX;

#[derive(Debug, Error, PartialEq)]
pub enum IndexSetError {
    #[error("arc ({0}, {1}) does not lie in graph copy D^{2}")]
    ArcNotInCopy(usize, usize, usize),
}

/// BFS distances within the graph copy `D^l`, forward from the copy root
/// and backward to it. Unreachable vertices hold [`UNREACHABLE`].
#[derive(Debug, Clone)]
pub struct CopyDistances {
    pub copy_root: usize,
    dist_from_root: Vec<usize>,
    dist_to_root: Vec<usize>,
}

impl CopyDistances {
    pub fn from_root(&self, v: usize) -> usize {
        self.dist_from_root[v]
    }

    pub fn to_root(&self, v: usize) -> usize {
        self.dist_to_root[v]
    }
}

/// The positions at which one arc may be selected, for one formulation
/// variant (and one graph copy, for the cycle-side sets).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PositionSet {
    pub arc: (usize, usize),
    pub copy: Option<usize>,
    pub positions: Vec<usize>,
}

/// PIEF position-set variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PiefVariant {
    /// The plain position rule: position 1 iff the arc leaves the copy root,
    /// position K only entering it.
    Full,
    /// Shortest-path reduction: position `k` kept only if the root reaches
    /// the source in fewer than `k` arcs and the target reaches the root in
    /// at most `K - k`.
    Reduced,
    /// The twice-reduced variant: positions 1 and K eliminated, their arcs
    /// carried implicitly by adjusted weights.
    Reduced2,
}

/// Enumerates every elementary cycle over pair vertices with length in
/// `[2, K]`, each exactly once in canonical rotation, in lexicographic
/// order of the vertex sequence.
pub fn enumerate_cycles<S: Scalar>(instance: &Instance<S>) -> Vec<Cycle> {
    enumerate_cycles_bounded(instance, None).expect("no limit given")
}

/// As [`enumerate_cycles`], bailing out with `Err(count_so_far)` once more
/// than `limit` cycles have been found.
pub fn enumerate_cycles_bounded<S: Scalar>(
    instance: &Instance<S>,
    limit: Option<usize>,
) -> Result<Vec<Cycle>, usize> {
    let k = instance.cycle_cap();
    let mut cycles = Vec::new();
    if k < 2 {
        return Ok(cycles);
    }
    // DFS from each root over vertices strictly greater than the root, so
    // each cycle is discovered exactly once, rooted at its minimum vertex.
    let mut path = Vec::with_capacity(k);
    for root in instance.pair_vertices() {
        path.push(root);
        dfs_cycles(instance, root, root, k, &mut path, &mut cycles, limit)?;
        path.pop();
    }
    Ok(cycles)
}

fn dfs_cycles<S: Scalar>(
    instance: &Instance<S>,
    root: usize,
    current: usize,
    cap: usize,
    path: &mut Vec<usize>,
    cycles: &mut Vec<Cycle>,
    limit: Option<usize>,
) -> Result<(), usize> {
    for arc in instance.arcs_from(current) {
        let next = arc.dst;
        if next == root {
            if path.len() >= 2 {
                if let Some(max) = limit {
                    if cycles.len() >= max {
                        return Err(cycles.len());
                    }
                }
                cycles.push(Cycle::new(path.clone()));
            }
            continue;
        }
        if next > root && path.len() < cap && !path.contains(&next) {
            path.push(next);
            dfs_cycles(instance, root, next, cap, path, cycles, limit)?;
            path.pop();
        }
    }
    Ok(())
}

/// Enumerates every NDD-initiated simple path with length in `[1, L]`, each
/// exactly once, in lexicographic order of the vertex sequence.
pub fn enumerate_chains<S: Scalar>(instance: &Instance<S>) -> Vec<Chain> {
    enumerate_chains_bounded(instance, None).expect("no limit given")
}

/// As [`enumerate_chains`], bailing out once more than `limit` chains exist.
pub fn enumerate_chains_bounded<S: Scalar>(
    instance: &Instance<S>,
    limit: Option<usize>,
) -> Result<Vec<Chain>, usize> {
    let l = instance.chain_cap();
    let mut chains = Vec::new();
    if l < 1 {
        return Ok(chains);
    }
    let mut path = Vec::with_capacity(l + 1);
    for ndd in instance.ndd_vertices() {
        path.push(ndd);
        dfs_chains(instance, l, &mut path, &mut chains, limit)?;
        path.pop();
    }
    Ok(chains)
}

fn dfs_chains<S: Scalar>(
    instance: &Instance<S>,
    cap: usize,
    path: &mut Vec<usize>,
    chains: &mut Vec<Chain>,
    limit: Option<usize>,
) -> Result<(), usize> {
    let current = *path.last().unwrap();
    for arc in instance.arcs_from(current) {
        let next = arc.dst;
        if path.contains(&next) {
            continue;
        }
        path.push(next);
        if let Some(max) = limit {
            if chains.len() >= max {
                return Err(chains.len());
            }
        }
        chains.push(Chain::new(path.clone()));
        if path.len() <= cap {
            dfs_chains(instance, cap, path, chains, limit)?;
        }
        path.pop();
    }
    Ok(())
}

/// BFS distances in the copy `D^l`, from `l` to every vertex and from every
/// vertex back to `l`. `l` must be a pair vertex.
pub fn copy_distances<S: Scalar>(instance: &Instance<S>, l: usize) -> CopyDistances {
    debug_assert!(instance.is_pair(l));
    let n = instance.num_vertices();
    let in_copy = |v: usize| v >= l;

    let forward = bfs(n, l, |v, out| {
        for arc in instance.arcs_from(v) {
            if in_copy(arc.dst) {
                out.push(arc.dst);
            }
        }
    });
    let backward = bfs(n, l, |v, out| {
        for arc in instance.arcs_into(v) {
            if in_copy(arc.src) {
                out.push(arc.src);
            }
        }
    });
    CopyDistances {
        copy_root: l,
        dist_from_root: forward,
        dist_to_root: backward,
    }
}

fn bfs(n: usize, start: usize, mut neighbors: impl FnMut(usize, &mut Vec<usize>)) -> Vec<usize> {
    let mut dist = vec![UNREACHABLE; n + 1];
    let mut queue = VecDeque::new();
    dist[start] = 0;
    queue.push_back(start);
    let mut buf = Vec::new();
    while let Some(v) = queue.pop_front() {
        buf.clear();
        neighbors(v, &mut buf);
        for &next in &buf {
            if dist[next] == UNREACHABLE {
                dist[next] = dist[v] + 1;
                queue.push_back(next);
            }
        }
    }
    dist
}

/// Shortest arc-distance from any NDD to each vertex (multi-source BFS over
/// the whole digraph). NDD vertices themselves get distance 0.
pub fn ndd_distances<S: Scalar>(instance: &Instance<S>) -> Vec<usize> {
    let n = instance.num_vertices();
    let mut dist = vec![UNREACHABLE; n + 1];
    let mut queue = VecDeque::new();
    for ndd in instance.ndd_vertices() {
        dist[ndd] = 0;
        queue.push_back(ndd);
    }
    while let Some(v) = queue.pop_front() {
        for arc in instance.arcs_from(v) {
            if dist[arc.dst] == UNREACHABLE {
                dist[arc.dst] = dist[v] + 1;
                queue.push_back(arc.dst);
            }
        }
    }
    dist
}

/// The full PIEF position rule for arc `(i, j)` in copy `D^l`: `{1}` if the
/// arc leaves the root, `{2..K}` if it enters the root, `{2..K-1}` otherwise.
fn pief_full_positions(i: usize, j: usize, l: usize, cap: usize) -> Vec<usize> {
    if cap < 2 {
        return vec![];
    }
    if i == l {
        vec![1]
    } else if j == l {
        (2..=cap).collect()
    } else {
        (2..=cap.saturating_sub(1)).collect()
    }
}

/// The PIEF position set for arc `(i, j)` in graph copy `D^l`.
///
/// `Reduced` intersects the full rule with the shortest-path conditions
/// (root reaches `i` in fewer than `k` arcs; `j` reaches the root within
/// `K - k`); `Reduced2` further removes positions 1 and `K`.
pub fn pief_positions<S: Scalar>(
    instance: &Instance<S>,
    i: usize,
    j: usize,
    l: usize,
    variant: PiefVariant,
) -> Result<PositionSet, IndexSetError> {
    if i < l || j < l || !instance.has_arc(i, j) || !instance.is_pair(i) || !instance.is_pair(j) {
        return Err(IndexSetError::ArcNotInCopy(i, j, l));
    }
    let dist = copy_distances(instance, l);
    Ok(pief_positions_with(
        instance.cycle_cap(),
        &dist,
        i,
        j,
        variant,
    ))
}

/// As [`pief_positions`], reusing precomputed copy distances. Used by the
/// model builders, which need every arc of a copy.
pub(crate) fn pief_positions_with(
    cap: usize,
    dist: &CopyDistances,
    i: usize,
    j: usize,
    variant: PiefVariant,
) -> PositionSet {
    let l = dist.copy_root;
    let full = pief_full_positions(i, j, l, cap);
    let positions = match variant {
        PiefVariant::Full => full,
        PiefVariant::Reduced | PiefVariant::Reduced2 => {
            let d_li = dist.from_root(i);
            let d_jl = dist.to_root(j);
            let mut kept: Vec<usize> = full
                .into_iter()
                .filter(|&k| {
                    d_li != UNREACHABLE && d_jl != UNREACHABLE && d_li < k && d_jl <= cap - k
                })
                .collect();
            if variant == PiefVariant::Reduced2 {
                kept.retain(|&k| k != 1 && k != cap);
            }
            kept
        }
    };
    PositionSet {
        arc: (i, j),
        copy: Some(l),
        positions,
    }
}

/// The PICEF chain position set for arc `(i, j)`: `{1}` for arcs leaving an
/// NDD, `{2..L}` otherwise; the reduced variant starts at `d(i) + 1` where
/// `d(i)` is the shortest arc-distance from any NDD to `i`.
pub fn picef_positions<S: Scalar>(
    instance: &Instance<S>,
    i: usize,
    j: usize,
    reduced: bool,
) -> PositionSet {
    let dist = ndd_distances(instance);
    picef_positions_with(
        instance.chain_cap(),
        &dist,
        instance.num_ndds(),
        i,
        j,
        reduced,
    )
}

pub(crate) fn picef_positions_with(
    chain_cap: usize,
    ndd_dist: &[usize],
    num_ndds: usize,
    i: usize,
    j: usize,
    reduced: bool,
) -> PositionSet {
    let positions = if i <= num_ndds {
        if chain_cap >= 1 {
            vec![1]
        } else {
            vec![]
        }
    } else {
        let lo = if reduced {
            match ndd_dist[i] {
                UNREACHABLE => chain_cap + 1, // empty set
                d => d + 1,
            }
        } else {
            2
        };
        (lo.max(2)..=chain_cap).collect()
    };
    PositionSet {
        arc: (i, j),
        copy: None,
        positions,
    }
}
