//! Compatibility-graph domain model: instance validation, JSON I/O, the
//! seeded synthetic generator, and the degree-ordering relabel heuristic.
//!
//! Vertices are 1-based. NDDs occupy `1..=num_ndds`, patient-donor pairs
//! occupy `num_ndds+1..=num_ndds+num_pairs`. NDD vertices never have
//! incoming arcs and the digraph has no loops.

use std::collections::HashMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;

/// A weighted directed arc between two vertices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arc<S> {
    pub src: usize,
    pub dst: usize,
    pub weight: S,
}

#[derive(Debug, Error, PartialEq)]
pub enum InstanceError {
    #[error("arc ({0}, {0}) is a loop")]
    LoopArc(usize),
    #[error("arc ({src}, {dst}) targets NDD vertex {dst}")]
    ArcIntoNdd { src: usize, dst: usize },
    #[error("duplicate arc ({0}, {1})")]
    DuplicateArc(usize, usize),
    #[error("vertex {0} out of range 1..={1}")]
    VertexOutOfRange(usize, usize),
    #[error("arc ({0}, {1}) has negative weight")]
    NegativeWeight(usize, usize),
    #[error("failure probability must lie in (0, 1]")]
    BadProbability,
    #[error("syntax error: {0}")]
    Syntax(String),
}

/// An immutable kidney-exchange instance: the compatibility digraph with its
/// NDD/pair vertex partition, the cycle cap `K`, the chain cap `L`, and an
/// optional uniform arc-success probability `p`.
#[derive(Debug, Clone)]
pub struct Instance<S: Scalar = f64> {
    num_ndds: usize,
    num_pairs: usize,
    arcs: Vec<Arc<S>>,
    out_arcs: Vec<Vec<usize>>,
    in_arcs: Vec<Vec<usize>>,
    arc_index: HashMap<(usize, usize), usize>,
    cycle_cap: usize,
    chain_cap: usize,
    failure_prob: Option<S>,
}

impl<S: Scalar> PartialEq for Instance<S> {
    fn eq(&self, other: &Self) -> bool {
        self.num_ndds == other.num_ndds
            && self.num_pairs == other.num_pairs
            && self.arcs == other.arcs
            && self.cycle_cap == other.cycle_cap
            && self.chain_cap == other.chain_cap
            && self.failure_prob == other.failure_prob
    }
}

/// Validates and builds an [`Instance`]. Arcs may be given in any order;
/// they are stored sorted by `(src, dst)`. Duplicate arcs are an error, not
/// a weight merge: silent merging hides data errors.
pub fn build_instance<S: Scalar>(
    num_ndds: usize,
    num_pairs: usize,
    arcs: Vec<Arc<S>>,
    cycle_cap: usize,
    chain_cap: usize,
    failure_prob: Option<S>,
) -> Result<Instance<S>, InstanceError> {
    let n = num_ndds + num_pairs;
    if let Some(p) = failure_prob {
        if !(p > S::zero() && p <= S::one()) {
            return Err(InstanceError::BadProbability);
        }
    }
    let mut arcs = arcs;
    arcs.sort_by_key(|a| (a.src, a.dst));
    let mut arc_index = HashMap::with_capacity(arcs.len());
    let mut out_arcs = vec![Vec::new(); n + 1];
    let mut in_arcs = vec![Vec::new(); n + 1];
    for (idx, a) in arcs.iter().enumerate() {
        if a.src == 0 || a.src > n {
            return Err(InstanceError::VertexOutOfRange(a.src, n));
        }
        if a.dst == 0 || a.dst > n {
            return Err(InstanceError::VertexOutOfRange(a.dst, n));
        }
        if a.src == a.dst {
            return Err(InstanceError::LoopArc(a.src));
        }
        if a.dst <= num_ndds {
            return Err(InstanceError::ArcIntoNdd {
                src: a.src,
                dst: a.dst,
            });
        }
        if a.weight < S::zero() {
            return Err(InstanceError::NegativeWeight(a.src, a.dst));
        }
        if arc_index.insert((a.src, a.dst), idx).is_some() {
            return Err(InstanceError::DuplicateArc(a.src, a.dst));
        }
        out_arcs[a.src].push(idx);
        in_arcs[a.dst].push(idx);
    }
    Ok(Instance {
        num_ndds,
        num_pairs,
        arcs,
        out_arcs,
        in_arcs,
        arc_index,
        cycle_cap,
        chain_cap,
        failure_prob,
    })
}

impl<S: Scalar> Instance<S> {
    pub fn num_ndds(&self) -> usize {
        self.num_ndds
    }

    pub fn num_pairs(&self) -> usize {
        self.num_pairs
    }

    pub fn num_vertices(&self) -> usize {
        self.num_ndds + self.num_pairs
    }

    pub fn cycle_cap(&self) -> usize {
        self.cycle_cap
    }

    pub fn chain_cap(&self) -> usize {
        self.chain_cap
    }

    pub fn failure_prob(&self) -> Option<S> {
        self.failure_prob
    }

    /// Returns a copy of the instance with different caps and/or probability.
    pub fn with_params(
        &self,
        cycle_cap: usize,
        chain_cap: usize,
        failure_prob: Option<S>,
    ) -> Result<Instance<S>, InstanceError> {
        build_instance(
            self.num_ndds,
            self.num_pairs,
            self.arcs.clone(),
            cycle_cap,
            chain_cap,
            failure_prob,
        )
    }

    pub fn is_ndd(&self, v: usize) -> bool {
        v >= 1 && v <= self.num_ndds
    }

    pub fn is_pair(&self, v: usize) -> bool {
        v > self.num_ndds && v <= self.num_vertices()
    }

    /// NDD vertex ids, ascending.
    pub fn ndd_vertices(&self) -> impl Iterator<Item = usize> {
        1..=self.num_ndds
    }

    /// Pair vertex ids, ascending.
    pub fn pair_vertices(&self) -> impl Iterator<Item = usize> {
        self.num_ndds + 1..=self.num_ndds + self.num_pairs
    }

    /// All arcs, sorted by `(src, dst)`.
    pub fn arcs(&self) -> &[Arc<S>] {
        &self.arcs
    }

    pub fn num_arcs(&self) -> usize {
        self.arcs.len()
    }

    pub fn has_arc(&self, src: usize, dst: usize) -> bool {
        self.arc_index.contains_key(&(src, dst))
    }

    pub fn weight(&self, src: usize, dst: usize) -> Option<S> {
        self.arc_index
            .get(&(src, dst))
            .map(|&i| self.arcs[i].weight)
    }

    /// Arcs leaving `v`, ordered by target.
    pub fn arcs_from(&self, v: usize) -> impl Iterator<Item = &Arc<S>> {
        self.out_arcs[v].iter().map(move |&i| &self.arcs[i])
    }

    /// Arcs entering `v`, ordered by source.
    pub fn arcs_into(&self, v: usize) -> impl Iterator<Item = &Arc<S>> {
        self.in_arcs[v].iter().map(move |&i| &self.arcs[i])
    }

    /// Total (in + out) degree of `v`.
    pub fn degree(&self, v: usize) -> usize {
        self.out_arcs[v].len() + self.in_arcs[v].len()
    }

    /// Sum of arc weights along a cycle, or `None` if an arc is missing.
    pub fn cycle_weight(&self, cycle: &Cycle) -> Option<S> {
        let mut total = S::zero();
        for (u, v) in cycle.arcs() {
            total += self.weight(u, v)?;
        }
        Some(total)
    }

    /// Sum of arc weights along a chain, or `None` if an arc is missing.
    pub fn chain_weight(&self, chain: &Chain) -> Option<S> {
        let mut total = S::zero();
        for (u, v) in chain.arcs() {
            total += self.weight(u, v)?;
        }
        Some(total)
    }
}

/// A directed cycle over pair vertices, held in canonical rotation: the
/// vertex sequence starts at the lowest-numbered vertex of the cycle.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cycle {
    vertices: Vec<usize>,
}

impl Cycle {
    /// Builds a cycle from its vertex sequence, rotating so the minimum
    /// vertex comes first. The sequence must not repeat vertices.
    pub fn new(vertices: Vec<usize>) -> Self {
        debug_assert!(vertices.len() >= 2);
        let min_pos = vertices
            .iter()
            .enumerate()
            .min_by_key(|(_, &v)| v)
            .map(|(i, _)| i)
            .unwrap_or(0);
        let mut rotated = Vec::with_capacity(vertices.len());
        rotated.extend_from_slice(&vertices[min_pos..]);
        rotated.extend_from_slice(&vertices[..min_pos]);
        Cycle { vertices: rotated }
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    /// Number of arcs (= number of vertices).
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn min_vertex(&self) -> usize {
        self.vertices[0]
    }

    pub fn contains(&self, v: usize) -> bool {
        self.vertices.contains(&v)
    }

    /// Arcs in position order: position `k` is `self.arcs().nth(k-1)`.
    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }
}

impl fmt::Display for Cycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_vertex_seq(f, &self.vertices)
    }
}

/// An NDD-initiated simple path: the first vertex is an NDD, all others are
/// pair vertices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Chain {
    vertices: Vec<usize>,
}

impl Chain {
    pub fn new(vertices: Vec<usize>) -> Self {
        debug_assert!(vertices.len() >= 2);
        Chain { vertices }
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    /// Number of arcs (= vertices − 1).
    pub fn len(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.len() < 2
    }

    pub fn ndd(&self) -> usize {
        self.vertices[0]
    }

    pub fn contains(&self, v: usize) -> bool {
        self.vertices.contains(&v)
    }

    /// Arcs in position order: the arc at chain position `k` (1-based) is
    /// `self.arcs().nth(k-1)`.
    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.vertices.windows(2).map(|w| (w[0], w[1]))
    }
}

impl fmt::Display for Chain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_vertex_seq(f, &self.vertices)
    }
}

fn write_vertex_seq(f: &mut fmt::Formatter<'_>, vertices: &[usize]) -> fmt::Result {
    let mut first = true;
    for v in vertices {
        if !first {
            write!(f, "-")?;
        }
        write!(f, "{v}")?;
        first = false;
    }
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct InstanceFile {
    ndds: i64,
    pairs: i64,
    cycle_cap: i64,
    chain_cap: i64,
    failure_prob: Option<f64>,
    arcs: Vec<(i64, i64, f64)>,
}

/// Parses the UTF-8 JSON instance format.
pub fn parse_instance<S: Scalar>(text: &str) -> Result<Instance<S>, InstanceError> {
    let file: InstanceFile =
        serde_json::from_str(text).map_err(|e| InstanceError::Syntax(e.to_string()))?;
    let as_count = |x: i64, field: &str| -> Result<usize, InstanceError> {
        usize::try_from(x).map_err(|_| InstanceError::Syntax(format!("{field} must be >= 0")))
    };
    let num_ndds = as_count(file.ndds, "ndds")?;
    let num_pairs = as_count(file.pairs, "pairs")?;
    let cycle_cap = as_count(file.cycle_cap, "cycle_cap")?;
    let chain_cap = as_count(file.chain_cap, "chain_cap")?;
    let n = num_ndds + num_pairs;
    let mut arcs = Vec::with_capacity(file.arcs.len());
    for (src, dst, w) in file.arcs {
        let src = usize::try_from(src).map_err(|_| InstanceError::VertexOutOfRange(0, n))?;
        let dst = usize::try_from(dst).map_err(|_| InstanceError::VertexOutOfRange(0, n))?;
        arcs.push(Arc {
            src,
            dst,
            weight: S::val(w),
        });
    }
    build_instance(
        num_ndds,
        num_pairs,
        arcs,
        cycle_cap,
        chain_cap,
        file.failure_prob.map(S::val),
    )
}

/// Serializes an instance to the JSON format. Arcs are emitted sorted by
/// `(src, dst)` so that serialization is a bit-exact round trip.
pub fn serialize_instance<S: Scalar>(instance: &Instance<S>) -> String {
    let file = InstanceFile {
        ndds: instance.num_ndds as i64,
        pairs: instance.num_pairs as i64,
        cycle_cap: instance.cycle_cap as i64,
        chain_cap: instance.chain_cap as i64,
        failure_prob: instance.failure_prob.map(|p| p.to_f64().unwrap()),
        arcs: instance
            .arcs
            .iter()
            .map(|a| (a.src as i64, a.dst as i64, a.weight.to_f64().unwrap()))
            .collect(),
    };
    serde_json::to_string(&file).expect("instance serialization cannot fail")
}

/// Weight distribution for the synthetic generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightMode {
    Unit,
    UniformInt { lo: u32, hi: u32 },
}

/// Generates a random instance: every admissible ordered pair (any source,
/// pair-vertex target, no loop) receives an arc independently with
/// probability `arc_density`. The generator is fully determined by `seed`.
pub fn generate_random<S: Scalar>(
    num_ndds: usize,
    num_pairs: usize,
    arc_density: f64,
    weight_mode: WeightMode,
    cycle_cap: usize,
    chain_cap: usize,
    seed: u64,
) -> Instance<S> {
    assert!(
        (0.0..=1.0).contains(&arc_density),
        "arc_density must lie in [0, 1]"
    );
    if let WeightMode::UniformInt { lo, hi } = weight_mode {
        assert!(lo <= hi, "uniform-int weight range is empty");
    }
    let n = num_ndds + num_pairs;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut arcs = Vec::new();
    for src in 1..=n {
        for dst in num_ndds + 1..=n {
            if src == dst {
                continue;
            }
            if rng.random::<f64>() < arc_density {
                let weight = match weight_mode {
                    WeightMode::Unit => S::one(),
                    WeightMode::UniformInt { lo, hi } => {
                        S::from_u32(rng.random_range(lo..=hi)).unwrap()
                    }
                };
                arcs.push(Arc { src, dst, weight });
            }
        }
    }
    build_instance(num_ndds, num_pairs, arcs, cycle_cap, chain_cap, None)
        .expect("generated arcs are admissible by construction")
}

/// Relabels pair vertices in nonincreasing total degree (ties broken by
/// original index ascending); the NDD block is unchanged. Returns the
/// relabeled instance and the permutation mapping new id -> old id
/// (index 0 unused).
pub fn relabel_by_degree<S: Scalar>(instance: &Instance<S>) -> (Instance<S>, Vec<usize>) {
    let mut order: Vec<usize> = instance.pair_vertices().collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(instance.degree(v)), v));

    let n = instance.num_vertices();
    let mut new_to_old = vec![0; n + 1];
    let mut old_to_new = vec![0; n + 1];
    for v in instance.ndd_vertices() {
        new_to_old[v] = v;
        old_to_new[v] = v;
    }
    for (offset, &old) in order.iter().enumerate() {
        let new = instance.num_ndds + 1 + offset;
        new_to_old[new] = old;
        old_to_new[old] = new;
    }

    let arcs = instance
        .arcs
        .iter()
        .map(|a| Arc {
            src: old_to_new[a.src],
            dst: old_to_new[a.dst],
            weight: a.weight,
        })
        .collect();
    let relabeled = build_instance(
        instance.num_ndds,
        instance.num_pairs,
        arcs,
        instance.cycle_cap,
        instance.chain_cap,
        instance.failure_prob,
    )
    .expect("relabeling preserves validity");
    (relabeled, new_to_old)
}
