//! Cycle pricing for branch-and-price: hop-limited negative-cycle search,
//! deterministic and discounted (failure-aware) pricers, and the
//! branch-and-price solver for the chain-edge formulation.

mod bnp;

pub use bnp::{solve_picef_bnp, BnpConfig, BnpStats, InitialColumns};

use thiserror::Error;

use crate::instance::{Cycle, Instance};
use crate::model::{ConTag, MipModel};
use crate::scalar::Scalar;
use crate::solver::LpOutcome;

/// Positive-price threshold: prices at or below this count as zero, which
/// keeps column generation from tailing off on numerical noise.
pub const PRICE_EPS: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum PricingError {
    #[error("discounted pricing requires nonnegative arc weights")]
    NegativeWeightInput,
    #[error("success probability must lie in (0, 1]")]
    BadProbability,
    #[error("column cap reached after generating {columns} columns")]
    LimitReached { columns: usize },
    #[error("master solve failed: {0}")]
    Master(String),
}

/// Per-pair-vertex dual values of the master LP's capacity constraints.
#[derive(Debug, Clone)]
pub struct PricingDuals<S: Scalar = f64> {
    delta: Vec<S>,
}

impl<S: Scalar> PricingDuals<S> {
    /// Duals indexed by vertex id (index 0 unused).
    pub fn new(delta: Vec<S>) -> Self {
        PricingDuals { delta }
    }

    /// The same value on every vertex.
    pub fn uniform(instance: &Instance<S>, value: impl Into<f64>) -> Self {
        PricingDuals {
            delta: vec![S::val(value.into()); instance.num_vertices() + 1],
        }
    }

    /// Extracts capacity-row duals from a solved master LP. Vertices whose
    /// capacity row was omitted as vacuous get zero.
    pub fn from_lp(model: &MipModel<S>, lp: &LpOutcome<S>, instance: &Instance<S>) -> Self {
        let mut delta = vec![S::zero(); instance.num_vertices() + 1];
        for v in instance.pair_vertices() {
            if let Some(idx) = model.constraint_index(&ConTag::VertexCap(v)) {
                delta[v] = lp.duals[idx];
            }
        }
        PricingDuals { delta }
    }

    pub fn get(&self, v: usize) -> S {
        self.delta.get(v).copied().unwrap_or_else(S::zero)
    }
}

/// A cycle together with its (deterministic or discounted) price.
#[derive(Debug, Clone, PartialEq)]
pub struct PricedCycle<S: Scalar = f64> {
    pub cycle: Cycle,
    pub price: S,
}

/// Finds elementary cycles of length at most `cycle_cap` whose total weight
/// is strictly negative (below `-PRICE_EPS`). Two stages: a fast
/// position-indexed Bellman-Ford sweep per source restricted to vertices
/// above the source, whose candidate walks are verified elementary; then,
/// only if that stage finds nothing, an exact bounded-depth search over
/// simple paths, so an empty result proves no such cycle exists.
pub fn find_negative_cycles<S: Scalar>(
    num_vertices: usize,
    arcs: &[(usize, usize, S)],
    cycle_cap: usize,
) -> Vec<Cycle> {
    if cycle_cap < 2 {
        return vec![];
    }
    let mut out_adj: Vec<Vec<(usize, S)>> = vec![Vec::new(); num_vertices + 1];
    for &(u, v, w) in arcs {
        out_adj[u].push((v, w));
    }
    for adj in &mut out_adj {
        adj.sort_by_key(|a| a.0);
    }

    let mut found = sweep_stage(num_vertices, &out_adj, cycle_cap);
    if found.is_empty() {
        found = exact_stage(num_vertices, &out_adj, cycle_cap);
    }
    found.sort();
    found.dedup();
    found
}

/// Bellman-Ford-style labels `dist[k][v]`: cheapest walk of exactly `k` arcs
/// from the source through vertices above it. Candidate closing arcs yield
/// walks that are kept only when elementary.
#[allow(clippy::needless_range_loop)]
fn sweep_stage<S: Scalar>(
    num_vertices: usize,
    out_adj: &[Vec<(usize, S)>],
    cycle_cap: usize,
) -> Vec<Cycle> {
    let eps = S::val(PRICE_EPS);
    let mut cycles = Vec::new();
    for source in 1..=num_vertices {
        let steps = cycle_cap - 1;
        let mut dist = vec![vec![S::infinity(); num_vertices + 1]; steps + 1];
        let mut parent = vec![vec![0usize; num_vertices + 1]; steps + 1];
        for &(v, w) in &out_adj[source] {
            if v > source && w < dist[1][v] {
                dist[1][v] = w;
                parent[1][v] = source;
            }
        }
        for k in 2..=steps {
            for u in source + 1..=num_vertices {
                if dist[k - 1][u].is_infinite() {
                    continue;
                }
                for &(v, w) in &out_adj[u] {
                    if v > source && dist[k - 1][u] + w < dist[k][v] {
                        dist[k][v] = dist[k - 1][u] + w;
                        parent[k][v] = u;
                    }
                }
            }
        }
        for k in 1..=steps {
            for v in source + 1..=num_vertices {
                if dist[k][v].is_infinite() {
                    continue;
                }
                let Some(&(_, closing)) = out_adj[v].iter().find(|&&(dst, _)| dst == source) else {
                    continue;
                };
                if dist[k][v] + closing >= -eps {
                    continue;
                }
                // Reconstruct the walk and keep it only if elementary.
                let mut vertices = vec![0usize; k + 1];
                vertices[0] = source;
                let mut at = v;
                for step in (1..=k).rev() {
                    vertices[step] = at;
                    at = parent[step][at];
                }
                let mut sorted = vertices.clone();
                sorted.sort_unstable();
                sorted.dedup();
                if sorted.len() == vertices.len() {
                    cycles.push(Cycle::new(vertices));
                }
            }
        }
    }
    cycles
}

/// Exhaustive search over simple paths (depth capped by the cycle cap),
/// collecting every strictly negative elementary cycle.
fn exact_stage<S: Scalar>(
    num_vertices: usize,
    out_adj: &[Vec<(usize, S)>],
    cycle_cap: usize,
) -> Vec<Cycle> {
    let eps = S::val(PRICE_EPS);
    let mut cycles = Vec::new();
    let mut path: Vec<usize> = Vec::with_capacity(cycle_cap);
    #[allow(clippy::too_many_arguments)]
    fn dfs<S: Scalar>(
        source: usize,
        current: usize,
        weight: S,
        cap: usize,
        out_adj: &[Vec<(usize, S)>],
        path: &mut Vec<usize>,
        cycles: &mut Vec<Cycle>,
        eps: S,
    ) {
        for &(next, w) in &out_adj[current] {
            if next == source {
                if path.len() >= 2 && weight + w < -eps {
                    cycles.push(Cycle::new(path.clone()));
                }
                continue;
            }
            if next > source && path.len() < cap && !path.contains(&next) {
                path.push(next);
                dfs(source, next, weight + w, cap, out_adj, path, cycles, eps);
                path.pop();
            }
        }
    }
    for source in 1..=num_vertices {
        path.push(source);
        dfs(
            source,
            source,
            S::zero(),
            cycle_cap,
            out_adj,
            &mut path,
            &mut cycles,
            eps,
        );
        path.pop();
    }
    cycles
}

/// Reduced pair-subgraph arcs `delta(target) - scale * weight`, the
/// transformation that turns positive-price cycle search into
/// negative-cycle search.
fn reduced_arcs<S: Scalar>(
    instance: &Instance<S>,
    duals: &PricingDuals<S>,
    scale: S,
) -> Vec<(usize, usize, S)> {
    instance
        .arcs()
        .iter()
        .filter(|a| instance.is_pair(a.src))
        .map(|a| (a.src, a.dst, duals.get(a.dst) - scale * a.weight))
        .collect()
}

/// Finds cycles with strictly positive deterministic price
/// `sum(w_ij) - sum(delta_i)`, or proves none exist.
pub fn price_cycles_deterministic<S: Scalar>(
    instance: &Instance<S>,
    duals: &PricingDuals<S>,
) -> Vec<PricedCycle<S>> {
    let arcs = reduced_arcs(instance, duals, S::one());
    let cycles = find_negative_cycles(instance.num_vertices(), &arcs, instance.cycle_cap());
    cycles
        .into_iter()
        .map(|cycle| {
            let price = deterministic_price(instance, duals, &cycle);
            PricedCycle { cycle, price }
        })
        .collect()
}

/// Finds cycles with strictly positive discounted price
/// `p^{|c|} sum(w_ij) - sum(delta_i)` by running the negative-cycle search
/// once per candidate cycle length with length-specific reduced weights.
/// With nonnegative weights, a cycle found at length `k` is profitable at
/// its true (shorter or equal) length too, so the union over lengths is
/// complete.
pub fn price_cycles_discounted<S: Scalar>(
    instance: &Instance<S>,
    duals: &PricingDuals<S>,
    p: S,
) -> Result<Vec<PricedCycle<S>>, PricingError> {
    if !(p > S::zero() && p <= S::one()) {
        return Err(PricingError::BadProbability);
    }
    if instance.arcs().iter().any(|a| a.weight < S::zero()) {
        return Err(PricingError::NegativeWeightInput);
    }
    let eps = S::val(PRICE_EPS);
    let mut priced: Vec<PricedCycle<S>> = Vec::new();
    for length in 2..=instance.cycle_cap() {
        let scale = p.powi(length as i32);
        let arcs = reduced_arcs(instance, duals, scale);
        for cycle in find_negative_cycles(instance.num_vertices(), &arcs, length) {
            if priced.iter().any(|pc| pc.cycle == cycle) {
                continue;
            }
            let price = discounted_price(instance, duals, &cycle, p);
            debug_assert!(price > eps, "discounted price must stay positive");
            if price > eps {
                priced.push(PricedCycle { cycle, price });
            }
        }
    }
    priced.sort_by(|a, b| a.cycle.cmp(&b.cycle));
    Ok(priced)
}

pub(crate) fn deterministic_price<S: Scalar>(
    instance: &Instance<S>,
    duals: &PricingDuals<S>,
    cycle: &Cycle,
) -> S {
    let mut price = S::zero();
    for (u, v) in cycle.arcs() {
        price += instance.weight(u, v).expect("priced cycle arc") - duals.get(u);
    }
    price
}

pub(crate) fn discounted_price<S: Scalar>(
    instance: &Instance<S>,
    duals: &PricingDuals<S>,
    cycle: &Cycle,
    p: S,
) -> S {
    let weight = instance.cycle_weight(cycle).expect("priced cycle");
    let dual_sum = cycle
        .vertices()
        .iter()
        .fold(S::zero(), |acc, &v| acc + duals.get(v));
    p.powi(cycle.len() as i32) * weight - dual_sum
}
