// Copyright 2026 The qualmod Authors. All rights reserved.
// Use of this source code is governed by the Apache License,
// Version 2.0, that can be found in the LICENSE file.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

pub type VarId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Origin {
    Declared,
    Auxiliary,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarInfo {
    pub name: String,
    pub lo: i64,
    pub hi: i64,
    pub origin: Origin,
}

/// A declared matrix (or scalar) and the contiguous block of cells it owns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixInfo {
    pub name: String,
    pub index: Option<(i64, i64)>,
    pub first: VarId,
}

impl MatrixInfo {
    pub fn len(&self) -> usize {
        match self.index {
            Some((lo, hi)) => (hi - lo + 1) as usize,
            None => 1,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell(&self, index: Option<i64>) -> Option<VarId> {
        match (self.index, index) {
            (Some((lo, hi)), Some(i)) if (lo..=hi).contains(&i) => Some(self.first + (i - lo) as usize),
            (None, None) => Some(self.first),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Eq,
    Ne,
    Le,
}

impl CmpOp {
    fn keyword(self) -> &'static str {
        match self {
            CmpOp::Eq => "eq",
            CmpOp::Ne => "ne",
            CmpOp::Le => "le",
        }
    }
}

/// A 0/1 variable read positively or negated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit {
    pub var: VarId,
    pub positive: bool,
}

impl Lit {
    pub fn pos(var: VarId) -> Lit {
        Lit { var, positive: true }
    }

    pub fn negate(self) -> Lit {
        Lit {
            var: self.var,
            positive: !self.positive,
        }
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.positive {
            write!(f, "v{}", self.var)
        } else {
            write!(f, "!v{}", self.var)
        }
    }
}

/// Primitive constraints understood by the solver.
///
/// Linear terms are `(coefficient, var)` pairs sorted by var with nonzero
/// coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FlatConstraint {
    /// `Σ c·v = rhs`
    LinearEq {
        terms: Vec<(i64, VarId)>,
        rhs: i64,
    },
    /// `Σ c·v ≤ rhs`
    LinearLeq {
        terms: Vec<(i64, VarId)>,
        rhs: i64,
    },
    /// `result = |arg|`
    AbsEq {
        result: VarId,
        arg: VarId,
    },
    /// `result = lhs · rhs`
    ProductEq {
        result: VarId,
        lhs: VarId,
        rhs: VarId,
    },
    AllDiff(Vec<VarId>),
    /// `reif ⇔ (Σ c·v op rhs)`, `reif` a 0/1 variable.
    ReifEq {
        reif: VarId,
        terms: Vec<(i64, VarId)>,
        op: CmpOp,
        rhs: i64,
    },
    /// At least one literal true.
    Disjunction(Vec<Lit>),
    /// Every literal true.
    Conjunction(Vec<Lit>),
}

impl FlatConstraint {
    pub fn kind(&self) -> &'static str {
        match self {
            FlatConstraint::LinearEq { .. } => "linear_eq",
            FlatConstraint::LinearLeq { .. } => "linear_le",
            FlatConstraint::AbsEq { .. } => "abs_eq",
            FlatConstraint::ProductEq { .. } => "product_eq",
            FlatConstraint::AllDiff(_) => "alldiff",
            FlatConstraint::ReifEq { .. } => "reif",
            FlatConstraint::Disjunction(_) => "or",
            FlatConstraint::Conjunction(_) => "and",
        }
    }

    /// Variables in the constraint's scope, in a fixed order, possibly repeated.
    pub fn scope(&self) -> Vec<VarId> {
        match self {
            FlatConstraint::LinearEq { terms, .. } | FlatConstraint::LinearLeq { terms, .. } => {
                terms.iter().map(|t| t.1).collect()
            }
            FlatConstraint::AbsEq { result, arg } => vec![*result, *arg],
            FlatConstraint::ProductEq { result, lhs, rhs } => vec![*result, *lhs, *rhs],
            FlatConstraint::AllDiff(vs) => vs.clone(),
            FlatConstraint::ReifEq { reif, terms, .. } => {
                let mut v = vec![*reif];
                v.extend(terms.iter().map(|t| t.1));
                v
            }
            FlatConstraint::Disjunction(lits) | FlatConstraint::Conjunction(lits) => {
                lits.iter().map(|l| l.var).collect()
            }
        }
    }
}

fn write_terms(out: &mut String, terms: &[(i64, VarId)]) {
    for (c, v) in terms {
        let _ = write!(out, " {c}*v{v}");
    }
}

impl fmt::Display for FlatConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        s.push_str(self.kind());
        match self {
            FlatConstraint::LinearEq { terms, rhs } | FlatConstraint::LinearLeq { terms, rhs } => {
                let _ = write!(s, " {rhs}");
                write_terms(&mut s, terms);
            }
            FlatConstraint::AbsEq { result, arg } => {
                let _ = write!(s, " v{result} v{arg}");
            }
            FlatConstraint::ProductEq { result, lhs, rhs } => {
                let _ = write!(s, " v{result} v{lhs} v{rhs}");
            }
            FlatConstraint::AllDiff(vs) => {
                for v in vs {
                    let _ = write!(s, " v{v}");
                }
            }
            FlatConstraint::ReifEq { reif, terms, op, rhs } => {
                let _ = write!(s, " v{reif} {} {rhs}", op.keyword());
                write_terms(&mut s, terms);
            }
            FlatConstraint::Disjunction(lits) | FlatConstraint::Conjunction(lits) => {
                for l in lits {
                    let _ = write!(s, " {l}");
                }
            }
        }
        f.write_str(&s)
    }
}

/// A flat integer constraint problem.
///
/// Declared cells occupy ids `0..declared_count()` in declaration order;
/// auxiliary variables follow. Every auxiliary variable is functionally
/// defined by exactly one constraint, recorded in `definers`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CspInstance {
    pub vars: Vec<VarInfo>,
    pub constraints: Vec<FlatConstraint>,
    pub matrices: Vec<MatrixInfo>,
    pub definers: Vec<Option<usize>>,
}

impl CspInstance {
    pub fn declared_count(&self) -> usize {
        self.vars.iter().take_while(|v| v.origin == Origin::Declared).count()
    }

    pub fn aux_count(&self) -> usize {
        self.vars.len() - self.declared_count()
    }

    /// Map from declared cell name to var id.
    pub fn name_map(&self) -> BTreeMap<&str, VarId> {
        self.vars
            .iter()
            .enumerate()
            .filter(|(_, v)| v.origin == Origin::Declared)
            .map(|(i, v)| (v.name.as_str(), i))
            .collect()
    }

    pub fn matrix(&self, name: &str) -> Option<&MatrixInfo> {
        self.matrices.iter().find(|m| m.name == name)
    }

    /// Cells of a declared matrix in index order.
    pub fn series(&self, name: &str) -> Option<Vec<VarId>> {
        let m = self.matrix(name)?;
        Some((m.first..m.first + m.len()).collect())
    }

    /// Stable line-oriented dump: `var <id> <lo> <hi> <name>` then
    /// `con <kind> <args…>` in posting order.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (id, v) in self.vars.iter().enumerate() {
            let name = match v.origin {
                Origin::Declared => v.name.as_str(),
                Origin::Auxiliary => "_",
            };
            let _ = writeln!(out, "var {id} {} {} {name}", v.lo, v.hi);
        }
        for c in &self.constraints {
            let _ = writeln!(out, "con {c}");
        }
        out
    }

    /// Checks the structural invariants: every referenced var exists,
    /// literal and term lists are nonempty, literals range over 0/1 vars,
    /// and each auxiliary var has exactly one definer.
    pub fn well_formed(&self) -> Result<(), String> {
        let n = self.vars.len();
        for (k, c) in self.constraints.iter().enumerate() {
            let scope = c.scope();
            if scope.is_empty() {
                return Err(format!("constraint {k} ({}) has an empty scope", c.kind()));
            }
            if let Some(v) = scope.iter().find(|v| **v >= n) {
                return Err(format!("constraint {k} references missing var {v}"));
            }
            if let FlatConstraint::Disjunction(lits) | FlatConstraint::Conjunction(lits) = c {
                for l in lits {
                    let var = &self.vars[l.var];
                    if var.lo < 0 || var.hi > 1 {
                        return Err(format!("literal v{} is not a 0/1 variable", l.var));
                    }
                }
            }
        }
        if self.definers.len() != n {
            return Err("definer table length mismatch".into());
        }
        for (id, v) in self.vars.iter().enumerate() {
            match (v.origin, self.definers[id]) {
                (Origin::Auxiliary, None) => return Err(format!("auxiliary v{id} has no definer")),
                (Origin::Declared, Some(_)) => return Err(format!("declared v{id} has a definer")),
                (_, Some(c)) if c >= self.constraints.len() => return Err(format!("definer of v{id} out of range")),
                _ => {}
            }
        }
        let mut seen = vec![false; self.constraints.len()];
        for c in self.definers.iter().flatten() {
            if std::mem::replace(&mut seen[*c], true) {
                return Err(format!("constraint {c} defines more than one variable"));
            }
        }
        Ok(())
    }
}
