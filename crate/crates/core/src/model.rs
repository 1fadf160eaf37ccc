//! Abstract MIP model: a maximize objective over binary `[0, 1]` variables
//! plus linear constraints. Every formulation compiles to this, the solvers
//! consume it, and the dump format exists for diff-based debugging.

use std::collections::HashMap;
use std::fmt;
use std::fmt::Write as _;

use crate::instance::{Chain, Cycle};
use crate::scalar::Scalar;

/// Structured variable identity. Tags are unique within a model.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum VarTag {
    /// Cycle-formulation / PICEF cycle variable `z_c`.
    Cycle(Cycle),
    /// Cycle-formulation chain variable `z_c`.
    Chain(Chain),
    /// PICEF chain-arc variable `y_{ijk}`: arc at chain position `pos`.
    PicefArc { src: usize, dst: usize, pos: usize },
    /// PIEF arc variable `x^l_{ijk}`: arc at cycle position `pos` in copy `copy`.
    PiefArc {
        src: usize,
        dst: usize,
        pos: usize,
        copy: usize,
    },
    /// Free-form tag for hand-built models (tests, adapters).
    Named(String),
}

impl fmt::Display for VarTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VarTag::Cycle(c) => write!(f, "z[{c}]"),
            VarTag::Chain(c) => write!(f, "z[{c}]"),
            VarTag::PicefArc { src, dst, pos } => write!(f, "y[{src},{dst}@{pos}]"),
            VarTag::PiefArc {
                src,
                dst,
                pos,
                copy,
            } => {
                write!(f, "x[{src},{dst}@{pos}^{copy}]")
            }
            VarTag::Named(name) => write!(f, "{name}"),
        }
    }
}

/// Structured constraint identity. Tags are unique within a model.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ConTag {
    /// Vertex capacity: at most one structure uses the vertex.
    VertexCap(usize),
    /// NDD capacity: at most one outgoing position-1 arc.
    NddCap(usize),
    /// PICEF chain-flow link at `(vertex, pos)`.
    ChainFlow { vertex: usize, pos: usize },
    /// PIEF per-copy flow conservation at `(copy, vertex, pos)`.
    CopyFlow {
        copy: usize,
        vertex: usize,
        pos: usize,
    },
    /// Free-form tag for hand-built models.
    Named(String),
}

impl fmt::Display for ConTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConTag::VertexCap(v) => write!(f, "cap[{v}]"),
            ConTag::NddCap(v) => write!(f, "ndd_cap[{v}]"),
            ConTag::ChainFlow { vertex, pos } => write!(f, "flow[{vertex}@{pos}]"),
            ConTag::CopyFlow { copy, vertex, pos } => write!(f, "flow[{vertex}@{pos}^{copy}]"),
            ConTag::Named(name) => write!(f, "{name}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sense::Le => write!(f, "<="),
            Sense::Eq => write!(f, "="),
            Sense::Ge => write!(f, ">="),
        }
    }
}

/// A `[0, 1]`-bounded decision variable.
#[derive(Debug, Clone)]
pub struct MipVar<S> {
    pub tag: VarTag,
    pub objective: S,
    pub integral: bool,
}

/// A linear constraint: `sum(coeff * var) sense rhs`.
#[derive(Debug, Clone)]
pub struct MipConstraint<S> {
    pub tag: ConTag,
    pub terms: Vec<(usize, S)>,
    pub sense: Sense,
    pub rhs: S,
}

/// Which formulation produced a model; drives solution decoding and the
/// failure-aware objective rewrite.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    CycleFormulation,
    Pief(crate::indexsets::PiefVariant),
    Picef { reduced: bool },
    Hpief(crate::indexsets::PiefVariant),
    Custom,
}

/// A compiled model: maximize the objective subject to the constraints,
/// every variable bounded to `[0, 1]`.
#[derive(Debug, Clone)]
pub struct MipModel<S: Scalar = f64> {
    kind: ModelKind,
    /// Uniform arc-success probability when the objective is discounted.
    discount: Option<S>,
    vars: Vec<MipVar<S>>,
    constraints: Vec<MipConstraint<S>>,
    var_index: HashMap<VarTag, usize>,
    con_index: HashMap<ConTag, usize>,
}

impl<S: Scalar> MipModel<S> {
    pub fn new(kind: ModelKind) -> Self {
        MipModel {
            kind,
            discount: None,
            vars: Vec::new(),
            constraints: Vec::new(),
            var_index: HashMap::new(),
            con_index: HashMap::new(),
        }
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn discount(&self) -> Option<S> {
        self.discount
    }

    pub(crate) fn set_discount(&mut self, p: S) {
        self.discount = Some(p);
    }

    /// Adds a variable; panics on a duplicate tag (a builder bug).
    pub fn add_var(&mut self, tag: VarTag, objective: S, integral: bool) -> usize {
        let idx = self.vars.len();
        let prev = self.var_index.insert(tag.clone(), idx);
        assert!(prev.is_none(), "duplicate variable tag {tag}");
        self.vars.push(MipVar {
            tag,
            objective,
            integral,
        });
        idx
    }

    /// Adds a constraint; panics on a duplicate tag or an unknown variable.
    pub fn add_constraint(
        &mut self,
        tag: ConTag,
        terms: Vec<(usize, S)>,
        sense: Sense,
        rhs: S,
    ) -> usize {
        let idx = self.constraints.len();
        for &(var, _) in &terms {
            assert!(
                var < self.vars.len(),
                "constraint {tag} references unknown variable"
            );
        }
        let prev = self.con_index.insert(tag.clone(), idx);
        assert!(prev.is_none(), "duplicate constraint tag {tag}");
        self.constraints.push(MipConstraint {
            tag,
            terms,
            sense,
            rhs,
        });
        idx
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn vars(&self) -> &[MipVar<S>] {
        &self.vars
    }

    pub fn constraints(&self) -> &[MipConstraint<S>] {
        &self.constraints
    }

    pub fn var(&self, idx: usize) -> &MipVar<S> {
        &self.vars[idx]
    }

    pub fn var_index(&self, tag: &VarTag) -> Option<usize> {
        self.var_index.get(tag).copied()
    }

    pub fn constraint_index(&self, tag: &ConTag) -> Option<usize> {
        self.con_index.get(tag).copied()
    }

    /// Objective coefficient of variable `idx`.
    pub fn objective_coeff(&self, idx: usize) -> S {
        self.vars[idx].objective
    }

    /// Overwrites the objective coefficient (failure-aware rewrite).
    pub(crate) fn set_objective_coeff(&mut self, idx: usize, coeff: S) {
        self.vars[idx].objective = coeff;
    }

    /// Appends a term to an existing constraint (column generation).
    pub(crate) fn add_term_to_constraint(&mut self, con: usize, var: usize, coeff: S) {
        assert!(var < self.vars.len());
        self.constraints[con].terms.push((var, coeff));
    }

    /// Evaluates the objective at a 0/1 assignment.
    pub fn objective_value(&self, assignment: &[bool]) -> S {
        assert_eq!(assignment.len(), self.vars.len());
        let mut total = S::zero();
        for (var, &on) in self.vars.iter().zip(assignment) {
            if on {
                total += var.objective;
            }
        }
        total
    }

    /// Checks a 0/1 assignment against every constraint.
    pub fn assignment_feasible(&self, assignment: &[bool]) -> bool {
        if assignment.len() != self.vars.len() {
            return false;
        }
        let tol = S::val(1e-9);
        self.constraints.iter().all(|con| {
            let mut lhs = S::zero();
            for &(var, coeff) in &con.terms {
                if assignment[var] {
                    lhs += coeff;
                }
            }
            match con.sense {
                Sense::Le => lhs <= con.rhs + tol,
                Sense::Eq => (lhs - con.rhs).abs() <= tol,
                Sense::Ge => lhs >= con.rhs - tol,
            }
        })
    }

    /// LP-style text dump with stable ordering, for diff-based tests.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "Maximize");
        let mut first = true;
        let _ = write!(out, " obj:");
        for var in &self.vars {
            if var.objective != S::zero() {
                let _ = write!(
                    out,
                    " {}{} {}",
                    if first { "" } else { "+ " },
                    var.objective,
                    var.tag
                );
                first = false;
            }
        }
        if first {
            let _ = write!(out, " 0");
        }
        let _ = writeln!(out);
        let _ = writeln!(out, "Subject To");
        for con in &self.constraints {
            let _ = write!(out, " {}:", con.tag);
            let mut first = true;
            for &(var, coeff) in &con.terms {
                let _ = write!(
                    out,
                    " {}{} {}",
                    if first { "" } else { "+ " },
                    coeff,
                    self.vars[var].tag
                );
                first = false;
            }
            let _ = writeln!(out, " {} {}", con.sense, con.rhs);
        }
        let _ = writeln!(out, "Bounds");
        for var in &self.vars {
            let _ = writeln!(out, " 0 <= {} <= 1", var.tag);
        }
        let _ = writeln!(out, "Binaries");
        for var in &self.vars {
            if var.integral {
                let _ = writeln!(out, " {}", var.tag);
            }
        }
        let _ = writeln!(out, "End");
        out
    }
}
