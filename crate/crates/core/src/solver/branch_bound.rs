//! LP-based branch-and-bound over binary models: branch on the most
//! fractional variable (ties by variable order), explore the 1-branch first,
//! depth-first by default.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::Instant;

use crate::model::MipModel;
use crate::scalar::Scalar;

use super::{
    solve_lp_with_bounds, LpStatus, MipConfig, MipOutcome, MipStatus, SearchOrder, SolveError,
    INT_TOL,
};

/// Prune margin: nodes whose LP bound cannot beat the incumbent by more
/// than this are fathomed.
const PRUNE_EPS: f64 = 1e-9;

struct Node<S> {
    lower: Vec<S>,
    upper: Vec<S>,
    /// LP bound of the parent, used for best-bound ordering.
    parent_bound: S,
}

struct HeapEntry<S> {
    bound: S,
    seq: u64,
    node: Node<S>,
}

impl<S: Scalar> PartialEq for HeapEntry<S> {
    fn eq(&self, other: &Self) -> bool {
        self.bound == other.bound && self.seq == other.seq
    }
}
impl<S: Scalar> Eq for HeapEntry<S> {}
impl<S: Scalar> PartialOrd for HeapEntry<S> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<S: Scalar> Ord for HeapEntry<S> {
    fn cmp(&self, other: &Self) -> Ordering {
        // Max-heap on bound; FIFO on ties for determinism.
        self.bound
            .partial_cmp(&other.bound)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

enum Frontier<S> {
    Stack(Vec<Node<S>>),
    Heap(BinaryHeap<HeapEntry<S>>),
}

impl<S: Scalar> Frontier<S> {
    fn push(&mut self, node: Node<S>, seq: u64) {
        match self {
            Frontier::Stack(v) => v.push(node),
            Frontier::Heap(h) => h.push(HeapEntry {
                bound: node.parent_bound,
                seq,
                node,
            }),
        }
    }

    fn pop(&mut self) -> Option<Node<S>> {
        match self {
            Frontier::Stack(v) => v.pop(),
            Frontier::Heap(h) => h.pop().map(|e| e.node),
        }
    }

    fn max_bound(&self) -> Option<S> {
        match self {
            Frontier::Stack(v) => v
                .iter()
                .map(|n| n.parent_bound)
                .fold(None, |acc, b| Some(acc.map_or(b, |m: S| m.max(b)))),
            Frontier::Heap(h) => h.peek().map(|e| e.bound),
        }
    }
}

pub(super) fn solve<S: Scalar>(
    model: &MipModel<S>,
    config: &MipConfig,
) -> Result<MipOutcome<S>, SolveError> {
    if model.vars().iter().any(|v| !v.integral) {
        return Err(SolveError::ModelNotBinary);
    }
    let n = model.num_vars();
    let int_tol = S::val(INT_TOL);
    let prune_eps = S::val(PRUNE_EPS);
    let started = Instant::now();

    let mut frontier = match config.search {
        SearchOrder::DepthFirst => Frontier::Stack(Vec::new()),
        SearchOrder::BestBound => Frontier::Heap(BinaryHeap::new()),
    };
    let mut seq = 0u64;
    frontier.push(
        Node {
            lower: vec![S::zero(); n],
            upper: vec![S::one(); n],
            parent_bound: S::infinity(),
        },
        seq,
    );

    let mut incumbent: Option<(S, Vec<bool>)> = None;
    let mut nodes: u64 = 0;
    let mut root_lp_value: Option<S> = None;

    while let Some(node) = frontier.pop() {
        let limit_hit = config.node_limit.is_some_and(|cap| nodes >= cap)
            || config
                .time_limit
                .is_some_and(|cap| started.elapsed() >= cap);
        if limit_hit {
            let open = frontier.max_bound().unwrap_or(S::neg_infinity());
            let open = open.max(node.parent_bound);
            let bound = match &incumbent {
                Some((v, _)) => open.max(*v),
                None => open,
            };
            return Err(SolveError::LimitReached {
                incumbent: incumbent.map(|(v, _)| v.to_f64().unwrap_or(f64::NAN)),
                bound: bound.to_f64().unwrap_or(f64::NAN),
                nodes,
            });
        }

        // Bound check against the parent LP before re-solving.
        if let Some((best, _)) = &incumbent {
            if node.parent_bound <= *best + prune_eps {
                continue;
            }
        }

        nodes += 1;
        let lp = solve_lp_with_bounds(model, &node.lower, &node.upper)?;
        if root_lp_value.is_none() {
            root_lp_value = Some(if lp.status == LpStatus::Optimal {
                lp.value
            } else {
                S::neg_infinity()
            });
        }
        if lp.status != LpStatus::Optimal {
            continue; // infeasible node
        }
        if let Some((best, _)) = &incumbent {
            if lp.value <= *best + prune_eps {
                continue;
            }
        }

        // Most-fractional branching variable, ties by variable order.
        let mut branch: Option<(usize, S)> = None;
        for (j, &x) in lp.primal.iter().enumerate() {
            let frac = x.min(S::one() - x).abs();
            if frac > int_tol {
                match branch {
                    Some((_, best_frac)) if frac <= best_frac => {}
                    _ => branch = Some((j, frac)),
                }
            }
        }

        match branch {
            None => {
                let assignment: Vec<bool> = lp.primal.iter().map(|&x| x > S::val(0.5)).collect();
                let better = match &incumbent {
                    Some((best, _)) => lp.value > *best + prune_eps,
                    None => true,
                };
                if better {
                    incumbent = Some((lp.value, assignment));
                }
            }
            Some((j, _)) => {
                // Push the 0-branch first so the 1-branch is explored first
                // under depth-first order.
                let mut zero = Node {
                    lower: node.lower.clone(),
                    upper: node.upper.clone(),
                    parent_bound: lp.value,
                };
                zero.upper[j] = S::zero();
                seq += 1;
                frontier.push(zero, seq);
                let mut one = Node {
                    lower: node.lower,
                    upper: node.upper,
                    parent_bound: lp.value,
                };
                one.lower[j] = S::one();
                seq += 1;
                frontier.push(one, seq);
            }
        }
    }

    match incumbent {
        Some((value, assignment)) => Ok(MipOutcome {
            status: MipStatus::Optimal,
            value,
            assignment,
            nodes_explored: nodes,
            bound: value,
            root_lp_value: root_lp_value.unwrap_or(value),
        }),
        None => Ok(MipOutcome {
            status: MipStatus::Infeasible,
            value: S::neg_infinity(),
            assignment: vec![],
            nodes_explored: nodes,
            bound: S::neg_infinity(),
            root_lp_value: root_lp_value.unwrap_or(S::neg_infinity()),
        }),
    }
}
