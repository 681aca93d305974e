// Copyright 2026 The qualmod Authors. All rights reserved.
// Use of this source code is governed by the Apache License,
// Version 2.0, that can be found in the LICENSE file.

//! Quantifier and comprehension unrolling.

use std::collections::HashMap;
use std::fmt;

use crate::dsl::{cell_name, BinOp, Clause, Expr, ListExpr, Quantifier, TypedModel};

use super::instance::{MatrixInfo, Origin, VarId, VarInfo};
use super::FlattenError;

pub const DEFAULT_EXPANSION_CAP: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rel {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl Rel {
    pub fn negate(self) -> Rel {
        match self {
            Rel::Eq => Rel::Ne,
            Rel::Ne => Rel::Eq,
            Rel::Lt => Rel::Ge,
            Rel::Le => Rel::Gt,
            Rel::Gt => Rel::Le,
            Rel::Ge => Rel::Lt,
        }
    }

    pub fn holds(self, a: i64, b: i64) -> bool {
        match self {
            Rel::Eq => a == b,
            Rel::Ne => a != b,
            Rel::Lt => a < b,
            Rel::Le => a <= b,
            Rel::Gt => a > b,
            Rel::Ge => a >= b,
        }
    }

    fn from_op(op: BinOp) -> Option<Rel> {
        Some(match op {
            BinOp::Eq => Rel::Eq,
            BinOp::Ne => Rel::Ne,
            BinOp::Lt => Rel::Lt,
            BinOp::Le => Rel::Le,
            BinOp::Gt => Rel::Gt,
            BinOp::Ge => Rel::Ge,
            _ => return None,
        })
    }

    fn symbol(self) -> &'static str {
        match self {
            Rel::Eq => "=",
            Rel::Ne => "!=",
            Rel::Lt => "<",
            Rel::Le => "<=",
            Rel::Gt => ">",
            Rel::Ge => ">=",
        }
    }
}

/// Quantifier-free expression over scalar variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FExpr {
    Const(i64),
    Bool(bool),
    Var(VarId),
    Neg(Box<FExpr>),
    Abs(Box<FExpr>),
    Add(Box<FExpr>, Box<FExpr>),
    Sub(Box<FExpr>, Box<FExpr>),
    Mul(Box<FExpr>, Box<FExpr>),
    Cmp(Rel, Box<FExpr>, Box<FExpr>),
    Not(Box<FExpr>),
    And(Vec<FExpr>),
    Or(Vec<FExpr>),
    Implies(Box<FExpr>, Box<FExpr>),
    AllDiff(Vec<FExpr>),
}

impl FExpr {
    pub fn node_count(&self) -> usize {
        match self {
            FExpr::Const(_) | FExpr::Bool(_) | FExpr::Var(_) => 1,
            FExpr::Neg(a) | FExpr::Abs(a) | FExpr::Not(a) => 1 + a.node_count(),
            FExpr::Add(a, b) | FExpr::Sub(a, b) | FExpr::Mul(a, b) | FExpr::Cmp(_, a, b) | FExpr::Implies(a, b) => {
                1 + a.node_count() + b.node_count()
            }
            FExpr::And(v) | FExpr::Or(v) | FExpr::AllDiff(v) => 1 + v.iter().map(FExpr::node_count).sum::<usize>(),
        }
    }

    pub fn is_integer(&self) -> bool {
        matches!(
            self,
            FExpr::Const(_)
                | FExpr::Var(_)
                | FExpr::Neg(_)
                | FExpr::Abs(_)
                | FExpr::Add(..)
                | FExpr::Sub(..)
                | FExpr::Mul(..)
        )
    }

    pub fn cmp(rel: Rel, a: FExpr, b: FExpr) -> FExpr {
        if let (FExpr::Const(x), FExpr::Const(y)) = (&a, &b) {
            return FExpr::Bool(rel.holds(*x, *y));
        }
        FExpr::Cmp(rel, Box::new(a), Box::new(b))
    }

    pub fn sum(a: FExpr, b: FExpr) -> FExpr {
        match (&a, &b) {
            (FExpr::Const(x), FExpr::Const(y)) => FExpr::Const(x + y),
            _ => FExpr::Add(Box::new(a), Box::new(b)),
        }
    }

    pub fn difference(a: FExpr, b: FExpr) -> FExpr {
        match (&a, &b) {
            (FExpr::Const(x), FExpr::Const(y)) => FExpr::Const(x - y),
            _ => FExpr::Sub(Box::new(a), Box::new(b)),
        }
    }

    pub fn product(a: FExpr, b: FExpr) -> FExpr {
        match (&a, &b) {
            (FExpr::Const(x), FExpr::Const(y)) => FExpr::Const(x * y),
            _ => FExpr::Mul(Box::new(a), Box::new(b)),
        }
    }

    pub fn negated(a: FExpr) -> FExpr {
        match a {
            FExpr::Const(x) => FExpr::Const(-x),
            a => FExpr::Neg(Box::new(a)),
        }
    }

    pub fn abs(a: FExpr) -> FExpr {
        match a {
            FExpr::Const(x) => FExpr::Const(x.abs()),
            a => FExpr::Abs(Box::new(a)),
        }
    }

    pub fn negation(a: FExpr) -> FExpr {
        match a {
            FExpr::Bool(b) => FExpr::Bool(!b),
            FExpr::Not(inner) => *inner,
            a => FExpr::Not(Box::new(a)),
        }
    }

    /// Conjunction with constants folded and nested conjunctions spliced.
    pub fn and(parts: Vec<FExpr>) -> FExpr {
        let mut out = Vec::with_capacity(parts.len());
        for p in parts {
            match p {
                FExpr::Bool(true) => {}
                FExpr::Bool(false) => return FExpr::Bool(false),
                FExpr::And(inner) => out.extend(inner),
                p => out.push(p),
            }
        }
        match out.len() {
            0 => FExpr::Bool(true),
            1 => out.pop().unwrap(),
            _ => FExpr::And(out),
        }
    }

    pub fn or(parts: Vec<FExpr>) -> FExpr {
        let mut out = Vec::with_capacity(parts.len());
        for p in parts {
            match p {
                FExpr::Bool(false) => {}
                FExpr::Bool(true) => return FExpr::Bool(true),
                FExpr::Or(inner) => out.extend(inner),
                p => out.push(p),
            }
        }
        match out.len() {
            0 => FExpr::Bool(false),
            1 => out.pop().unwrap(),
            _ => FExpr::Or(out),
        }
    }

    pub fn implies(a: FExpr, b: FExpr) -> FExpr {
        match (a, b) {
            (FExpr::Bool(true), b) => b,
            (FExpr::Bool(false), _) | (_, FExpr::Bool(true)) => FExpr::Bool(true),
            (a, FExpr::Bool(false)) => FExpr::negation(a),
            (a, b) => FExpr::Implies(Box::new(a), Box::new(b)),
        }
    }

    /// Visits every subexpression in post-order.
    pub fn for_each<'a>(&'a self, f: &mut impl FnMut(&'a FExpr)) {
        match self {
            FExpr::Const(_) | FExpr::Bool(_) | FExpr::Var(_) => {}
            FExpr::Neg(a) | FExpr::Abs(a) | FExpr::Not(a) => a.for_each(f),
            FExpr::Add(a, b) | FExpr::Sub(a, b) | FExpr::Mul(a, b) | FExpr::Cmp(_, a, b) | FExpr::Implies(a, b) => {
                a.for_each(f);
                b.for_each(f);
            }
            FExpr::And(v) | FExpr::Or(v) | FExpr::AllDiff(v) => v.iter().for_each(|e| e.for_each(f)),
        }
        f(self);
    }
}

impl fmt::Display for FExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn list(f: &mut fmt::Formatter<'_>, sep: &str, v: &[FExpr]) -> fmt::Result {
            write!(f, "(")?;
            for (k, e) in v.iter().enumerate() {
                if k > 0 {
                    write!(f, " {sep} ")?;
                }
                write!(f, "{e}")?;
            }
            write!(f, ")")
        }
        match self {
            FExpr::Const(c) => write!(f, "{c}"),
            FExpr::Bool(b) => write!(f, "{b}"),
            FExpr::Var(v) => write!(f, "v{v}"),
            FExpr::Neg(a) => write!(f, "-({a})"),
            FExpr::Abs(a) => write!(f, "abs({a})"),
            FExpr::Not(a) => write!(f, "!({a})"),
            FExpr::Add(a, b) => write!(f, "({a} + {b})"),
            FExpr::Sub(a, b) => write!(f, "({a} - {b})"),
            FExpr::Mul(a, b) => write!(f, "({a} * {b})"),
            FExpr::Cmp(r, a, b) => write!(f, "({a} {} {b})", r.symbol()),
            FExpr::Implies(a, b) => write!(f, "({a} -> {b})"),
            FExpr::And(v) => list(f, "/\\", v),
            FExpr::Or(v) => list(f, "\\/", v),
            FExpr::AllDiff(v) => {
                write!(f, "allDiff")?;
                list(f, ",", v)
            }
        }
    }
}

/// Quantifier-free model over scalar variables.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ExpandedModel {
    pub vars: Vec<VarInfo>,
    pub matrices: Vec<MatrixInfo>,
    pub constraints: Vec<FExpr>,
    /// Auxiliary variables introduced by subexpression elimination, each
    /// equal to its defining expression.
    pub defs: Vec<(VarId, FExpr)>,
}

impl ExpandedModel {
    pub fn node_count(&self) -> usize {
        self.constraints.iter().map(FExpr::node_count).sum::<usize>()
            + self.defs.iter().map(|(_, e)| e.node_count()).sum::<usize>()
    }

    pub fn declared_count(&self) -> usize {
        self.vars.iter().take_while(|v| v.origin == Origin::Declared).count()
    }

    /// Interval bounds of an integer expression over the variable domains.
    pub fn bounds(&self, e: &FExpr) -> (i64, i64) {
        bounds(&self.vars, e)
    }
}

pub(crate) fn bounds(vars: &[VarInfo], e: &FExpr) -> (i64, i64) {
    match e {
        FExpr::Const(c) => (*c, *c),
        FExpr::Var(v) => (vars[*v].lo, vars[*v].hi),
        FExpr::Neg(a) => {
            let (lo, hi) = bounds(vars, a);
            (hi.saturating_neg(), lo.saturating_neg())
        }
        FExpr::Abs(a) => {
            let (lo, hi) = bounds(vars, a);
            if lo >= 0 {
                (lo, hi)
            } else if hi <= 0 {
                (hi.saturating_neg(), lo.saturating_neg())
            } else {
                (0, hi.max(lo.saturating_neg()))
            }
        }
        FExpr::Add(a, b) => {
            let (a, b) = (bounds(vars, a), bounds(vars, b));
            (a.0.saturating_add(b.0), a.1.saturating_add(b.1))
        }
        FExpr::Sub(a, b) => {
            let (a, b) = (bounds(vars, a), bounds(vars, b));
            (a.0.saturating_sub(b.1), a.1.saturating_sub(b.0))
        }
        FExpr::Mul(a, b) => {
            let (a, b) = (bounds(vars, a), bounds(vars, b));
            let corners = [
                a.0.saturating_mul(b.0),
                a.0.saturating_mul(b.1),
                a.1.saturating_mul(b.0),
                a.1.saturating_mul(b.1),
            ];
            (*corners.iter().min().unwrap(), *corners.iter().max().unwrap())
        }
        _ => (0, 1),
    }
}

/// Expands every quantifier and comprehension of a typed model, folding
/// constant subexpressions as binders become concrete.
pub fn unroll(model: &TypedModel, cap: usize) -> Result<ExpandedModel, FlattenError> {
    let mut vars = Vec::new();
    let mut matrices = Vec::new();
    for d in &model.decls {
        matrices.push(MatrixInfo {
            name: d.name.clone(),
            index: d.index,
            first: vars.len(),
        });
        let (lo, hi) = d.domain;
        match d.index {
            Some((ilo, ihi)) => {
                for i in ilo..=ihi {
                    vars.push(VarInfo {
                        name: cell_name(&d.name, Some(i)),
                        lo,
                        hi,
                        origin: Origin::Declared,
                    });
                }
            }
            None => vars.push(VarInfo {
                name: d.name.clone(),
                lo,
                hi,
                origin: Origin::Declared,
            }),
        }
    }

    let lookup = matrices.iter().enumerate().map(|(k, m)| (m.name.clone(), k)).collect();
    let mut unroller = Unroller {
        matrices: &matrices,
        lookup,
        env: Vec::new(),
        nodes: 0,
        cap,
    };
    let mut constraints = Vec::new();
    for c in &model.constraints {
        match unroller.boolean(c)? {
            FExpr::Bool(true) => {}
            FExpr::And(parts) => constraints.extend(parts),
            e => constraints.push(e),
        }
    }
    Ok(ExpandedModel {
        vars,
        matrices,
        constraints,
        defs: Vec::new(),
    })
}

struct Unroller<'a> {
    matrices: &'a [MatrixInfo],
    lookup: HashMap<String, usize>,
    env: Vec<(String, i64)>,
    nodes: usize,
    cap: usize,
}

impl Unroller<'_> {
    fn tick(&mut self) -> Result<(), FlattenError> {
        self.nodes += 1;
        if self.nodes > self.cap {
            return Err(FlattenError::ExpansionTooLarge { limit: self.cap });
        }
        Ok(())
    }

    fn constant(&mut self, e: &Expr) -> Result<i64, FlattenError> {
        match self.integer(e)? {
            FExpr::Const(c) => Ok(c),
            other => Err(FlattenError::UnsupportedConstruct {
                node: format!("non-constant bound or index `{other}`"),
            }),
        }
    }

    fn integer(&mut self, e: &Expr) -> Result<FExpr, FlattenError> {
        self.tick()?;
        Ok(match e {
            Expr::Int(n) => FExpr::Const(*n),
            Expr::Name(n) => {
                if let Some((_, v)) = self.env.iter().rev().find(|(b, _)| b == n) {
                    FExpr::Const(*v)
                } else {
                    let m = self.matrix(n)?;
                    FExpr::Var(m.cell(None).ok_or_else(|| FlattenError::UnsupportedConstruct {
                        node: format!("matrix `{n}` used without an index"),
                    })?)
                }
            }
            Expr::Index(name, idx) => {
                let i = self.constant(idx)?;
                let m = self.matrix(name)?;
                let range = m.index.unwrap_or((0, -1));
                FExpr::Var(m.cell(Some(i)).ok_or_else(|| FlattenError::IndexOutOfRange {
                    access: format!("{name}[{i}]"),
                    range,
                })?)
            }
            Expr::Neg(a) => FExpr::negated(self.integer(a)?),
            Expr::Abs(a) => FExpr::abs(self.integer(a)?),
            Expr::Binary(BinOp::Add, a, b) => FExpr::sum(self.integer(a)?, self.integer(b)?),
            Expr::Binary(BinOp::Sub, a, b) => FExpr::difference(self.integer(a)?, self.integer(b)?),
            Expr::Binary(BinOp::Mul, a, b) => FExpr::product(self.integer(a)?, self.integer(b)?),
            other => {
                return Err(FlattenError::UnsupportedConstruct {
                    node: format!("`{other}` in integer position"),
                })
            }
        })
    }

    fn matrix(&self, name: &str) -> Result<&MatrixInfo, FlattenError> {
        self.lookup
            .get(name)
            .map(|k| &self.matrices[*k])
            .ok_or_else(|| FlattenError::UnsupportedConstruct {
                node: format!("unknown identifier `{name}`"),
            })
    }

    fn boolean(&mut self, e: &Expr) -> Result<FExpr, FlattenError> {
        self.tick()?;
        Ok(match e {
            Expr::Bool(b) => FExpr::Bool(*b),
            Expr::Not(a) => FExpr::negation(self.boolean(a)?),
            Expr::Binary(op, a, b) => {
                if let Some(rel) = Rel::from_op(*op) {
                    FExpr::cmp(rel, self.integer(a)?, self.integer(b)?)
                } else {
                    let (a, b) = (self.boolean(a)?, self.boolean(b)?);
                    match op {
                        BinOp::And => FExpr::and(vec![a, b]),
                        BinOp::Or => FExpr::or(vec![a, b]),
                        BinOp::Implies => FExpr::implies(a, b),
                        _ => {
                            return Err(FlattenError::UnsupportedConstruct {
                                node: format!("`{e}` in boolean position"),
                            })
                        }
                    }
                }
            }
            Expr::Quant {
                kind,
                binder,
                range,
                body,
            } => {
                let lo = self.constant(&range.lo)?;
                let hi = self.constant(&range.hi)?;
                let mut parts = Vec::new();
                for v in lo..=hi {
                    self.env.push((binder.clone(), v));
                    let part = self.boolean(body);
                    self.env.pop();
                    parts.push(part?);
                }
                match kind {
                    Quantifier::ForAll => FExpr::and(parts),
                    Quantifier::Exists => FExpr::or(parts),
                }
            }
            Expr::AllDiff(list) => {
                let mut items = Vec::new();
                match list {
                    ListExpr::Explicit(xs) => {
                        for x in xs {
                            items.push(self.integer(x)?);
                        }
                    }
                    ListExpr::Comprehension { element, clauses } => self.generate(element, clauses, &mut items)?,
                }
                if items.len() < 2 {
                    FExpr::Bool(true)
                } else {
                    FExpr::AllDiff(items)
                }
            }
            other => {
                return Err(FlattenError::UnsupportedConstruct {
                    node: format!("`{other}` in boolean position"),
                })
            }
        })
    }

    fn generate(&mut self, element: &Expr, clauses: &[Clause], out: &mut Vec<FExpr>) -> Result<(), FlattenError> {
        let Some((first, rest)) = clauses.split_first() else {
            out.push(self.integer(element)?);
            return Ok(());
        };
        match first {
            Clause::Guard(g) => match self.boolean(g)? {
                FExpr::Bool(true) => self.generate(element, rest, out),
                FExpr::Bool(false) => Ok(()),
                other => Err(FlattenError::UnsupportedConstruct {
                    node: format!("non-constant comprehension guard `{other}`"),
                }),
            },
            Clause::Generator { binder, range } => {
                let lo = self.constant(&range.lo)?;
                let hi = self.constant(&range.hi)?;
                for v in lo..=hi {
                    self.env.push((binder.clone(), v));
                    let r = self.generate(element, rest, out);
                    self.env.pop();
                    r?;
                }
                Ok(())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::{parse_model, validate};
    use std::collections::BTreeMap;

    fn expand(src: &str) -> ExpandedModel {
        let ast = parse_model(src).unwrap();
        let typed = validate(&ast, &BTreeMap::new()).unwrap();
        unroll(&typed, DEFAULT_EXPANSION_CAP).unwrap()
    }

    fn var(m: &ExpandedModel, name: &str) -> FExpr {
        FExpr::Var(m.vars.iter().position(|v| v.name == name).unwrap())
    }

    #[test]
    fn forall_becomes_one_constraint_per_value() {
        let m = expand(
            "find x : [int(0..2)] of int(0..5)\nfind y : [int(1..2)] of int(-5..5)\nforAll i : int(1..2). y[i]=x[i]-x[i-1]",
        );
        assert_eq!(m.constraints.len(), 2);
        assert_eq!(
            m.constraints[0],
            FExpr::cmp(
                Rel::Eq,
                var(&m, "y[1]"),
                FExpr::difference(var(&m, "x[1]"), var(&m, "x[0]"))
            )
        );
        assert_eq!(
            m.constraints[1],
            FExpr::cmp(
                Rel::Eq,
                var(&m, "y[2]"),
                FExpr::difference(var(&m, "x[2]"), var(&m, "x[1]"))
            )
        );
    }

    #[test]
    fn exists_becomes_disjunction() {
        let m = expand("find x : [int(0..2)] of int(0..9)\nexists i : int(0..2). x[i]=5");
        let expected = FExpr::Or(
            ["x[0]", "x[1]", "x[2]"]
                .iter()
                .map(|n| FExpr::cmp(Rel::Eq, var(&m, n), FExpr::Const(5)))
                .collect(),
        );
        assert_eq!(m.constraints, vec![expected]);
    }

    #[test]
    fn comprehension_guards_filter_elements() {
        let m = expand("find x : [int(0..3)] of int(0..9)\nallDiff([x[j] | j : int(0..3), j<2])");
        assert_eq!(
            m.constraints,
            vec![FExpr::AllDiff(vec![var(&m, "x[0]"), var(&m, "x[1]")])]
        );
    }

    #[test]
    fn binder_guards_fold_away() {
        let m = expand(
            "find y : [int(1..4)] of int(-3..3)\nforAll i : int(1..4) . (i < 2 -> y[i] > 0) /\\ (i > 2 -> y[i] < 0)",
        );
        assert_eq!(m.constraints.len(), 3);
    }

    #[test]
    fn expansion_cap() {
        let ast =
            parse_model("find x : [int(0..9)] of int(0..9)\nforAll i, j, k : int(0..9) . x[i] + x[j] != x[k]").unwrap();
        let typed = validate(&ast, &BTreeMap::new()).unwrap();
        assert_eq!(
            unroll(&typed, 1000),
            Err(FlattenError::ExpansionTooLarge { limit: 1000 })
        );
    }

    #[test]
    fn non_affine_index_checked_at_expansion() {
        let ast = parse_model("find x : [int(0..3)] of int(0..9)\nforAll i : int(0..3) . x[i*i] >= 0").unwrap();
        let typed = validate(&ast, &BTreeMap::new()).unwrap();
        assert!(matches!(
            unroll(&typed, DEFAULT_EXPANSION_CAP),
            Err(FlattenError::IndexOutOfRange { .. })
        ));
    }
}
