// Copyright 2026 The qualmod Authors. All rights reserved.
// Use of this source code is governed by the Apache License,
// Version 2.0, that can be found in the LICENSE file.

//! Lowering of expanded models to the primitive constraint catalogue.
//!
//! Top-level disjunctions become `Disjunction` metaconstraints over
//! reified literals. Nested connectives are reified as counting
//! comparisons: `b ⇔ (Σ lits ≥ n)` for a conjunction of `n` literals and
//! `b ⇔ (Σ lits ≥ 1)` for a disjunction. Strict integer comparisons are
//! rewritten to non-strict ones.

use std::collections::BTreeMap;

use super::expand::{bounds, ExpandedModel, FExpr, Rel};
use super::instance::{CmpOp, CspInstance, FlatConstraint, Lit, Origin, VarId, VarInfo};
use super::FlattenError;

pub fn encode(model: &ExpandedModel) -> Result<CspInstance, FlattenError> {
    let mut enc = Encoder {
        definers: vec![None; model.vars.len()],
        vars: model.vars.clone(),
        constraints: Vec::new(),
    };
    for (aux, expr) in &model.defs {
        enc.define_as(*aux, expr)?;
    }
    for c in &model.constraints {
        enc.post_true(c)?;
    }
    Ok(CspInstance {
        vars: enc.vars,
        constraints: enc.constraints,
        matrices: model.matrices.clone(),
        definers: enc.definers,
    })
}

/// `Σ coef·var + constant`
#[derive(Debug, Clone, Default, PartialEq, Eq)]
struct Linear {
    terms: BTreeMap<VarId, i64>,
    constant: i64,
}

impl Linear {
    fn constant(c: i64) -> Linear {
        Linear {
            terms: BTreeMap::new(),
            constant: c,
        }
    }

    fn var(v: VarId) -> Linear {
        Linear {
            terms: BTreeMap::from([(v, 1)]),
            constant: 0,
        }
    }

    fn as_constant(&self) -> Option<i64> {
        self.terms.is_empty().then_some(self.constant)
    }

    fn add_scaled(mut self, other: &Linear, k: i64) -> Linear {
        self.constant += k * other.constant;
        for (v, c) in &other.terms {
            let slot = self.terms.entry(*v).or_insert(0);
            *slot += k * c;
            if *slot == 0 {
                self.terms.remove(v);
            }
        }
        self
    }

    fn scale(self, k: i64) -> Linear {
        Linear::constant(0).add_scaled(&self, k)
    }

    fn term_list(&self) -> Vec<(i64, VarId)> {
        self.terms.iter().map(|(v, c)| (*c, *v)).collect()
    }

    fn bounds(&self, vars: &[VarInfo]) -> (i64, i64) {
        let (mut lo, mut hi) = (self.constant, self.constant);
        for (v, c) in &self.terms {
            let (p, q) = (c.saturating_mul(vars[*v].lo), c.saturating_mul(vars[*v].hi));
            lo = lo.saturating_add(p.min(q));
            hi = hi.saturating_add(p.max(q));
        }
        (lo, hi)
    }
}

/// A reified truth value: a literal, or a constant when the expression folds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Truth {
    Const(bool),
    Lit(Lit),
}

impl Truth {
    fn negate(self) -> Truth {
        match self {
            Truth::Const(b) => Truth::Const(!b),
            Truth::Lit(l) => Truth::Lit(l.negate()),
        }
    }
}

/// A linear comparison in catalogue form: `terms op rhs`, or a constant.
enum Comparison {
    Const(bool),
    Linear {
        terms: Vec<(i64, VarId)>,
        op: CmpOp,
        rhs: i64,
    },
}

struct Encoder {
    vars: Vec<VarInfo>,
    constraints: Vec<FlatConstraint>,
    definers: Vec<Option<usize>>,
}

impl Encoder {
    fn new_aux(&mut self, lo: i64, hi: i64) -> VarId {
        let id = self.vars.len();
        self.vars.push(VarInfo {
            name: format!("_aux{id}"),
            lo,
            hi,
            origin: Origin::Auxiliary,
        });
        self.definers.push(None);
        id
    }

    fn post(&mut self, c: FlatConstraint) {
        self.constraints.push(c);
    }

    fn define(&mut self, var: VarId, c: FlatConstraint) {
        self.definers[var] = Some(self.constraints.len());
        self.constraints.push(c);
    }

    /// Posts the defining constraint `aux = expr` for a CSE variable.
    fn define_as(&mut self, aux: VarId, expr: &FExpr) -> Result<(), FlattenError> {
        match expr {
            FExpr::Abs(a) => {
                let arg = self.var_of(a)?;
                self.define(aux, FlatConstraint::AbsEq { result: aux, arg });
            }
            FExpr::Mul(a, b) => {
                let (la, lb) = (self.linear(a)?, self.linear(b)?);
                let lin = match (la.as_constant(), lb.as_constant()) {
                    (Some(k), _) => lb.scale(k),
                    (_, Some(k)) => la.scale(k),
                    _ => {
                        let lhs = self.var_of_linear(la);
                        let rhs = self.var_of_linear(lb);
                        self.define(aux, FlatConstraint::ProductEq { result: aux, lhs, rhs });
                        return Ok(());
                    }
                };
                self.define_linear(aux, lin);
            }
            _ => {
                let lin = self.linear(expr)?;
                self.define_linear(aux, lin);
            }
        }
        Ok(())
    }

    fn define_linear(&mut self, aux: VarId, lin: Linear) {
        let lin = lin.add_scaled(&Linear::var(aux), -1);
        let rhs = -lin.constant;
        self.define(
            aux,
            FlatConstraint::LinearEq {
                terms: lin.term_list(),
                rhs,
            },
        );
    }

    fn linear(&mut self, e: &FExpr) -> Result<Linear, FlattenError> {
        Ok(match e {
            FExpr::Const(c) => Linear::constant(*c),
            FExpr::Var(v) => Linear::var(*v),
            FExpr::Neg(a) => self.linear(a)?.scale(-1),
            FExpr::Add(a, b) => {
                let b = self.linear(b)?;
                self.linear(a)?.add_scaled(&b, 1)
            }
            FExpr::Sub(a, b) => {
                let b = self.linear(b)?;
                self.linear(a)?.add_scaled(&b, -1)
            }
            FExpr::Mul(a, b) => {
                let (la, lb) = (self.linear(a)?, self.linear(b)?);
                match (la.as_constant(), lb.as_constant()) {
                    (Some(k), _) => lb.scale(k),
                    (_, Some(k)) => la.scale(k),
                    _ => {
                        let lhs = self.var_of_linear(la);
                        let rhs = self.var_of_linear(lb);
                        let (lo, hi) = bounds(&self.vars, &FExpr::product(FExpr::Var(lhs), FExpr::Var(rhs)));
                        let result = self.new_aux(lo, hi);
                        self.define(result, FlatConstraint::ProductEq { result, lhs, rhs });
                        Linear::var(result)
                    }
                }
            }
            FExpr::Abs(a) => {
                let la = self.linear(a)?;
                if let Some(k) = la.as_constant() {
                    return Ok(Linear::constant(k.abs()));
                }
                let arg = self.var_of_linear(la);
                let (lo, hi) = bounds(&self.vars, &FExpr::abs(FExpr::Var(arg)));
                let result = self.new_aux(lo, hi);
                self.define(result, FlatConstraint::AbsEq { result, arg });
                Linear::var(result)
            }
            other => {
                return Err(FlattenError::UnsupportedConstruct {
                    node: format!("`{other}` in integer position"),
                })
            }
        })
    }

    fn var_of(&mut self, e: &FExpr) -> Result<VarId, FlattenError> {
        let lin = self.linear(e)?;
        Ok(self.var_of_linear(lin))
    }

    /// A variable equal to the linear expression, introducing one if needed.
    fn var_of_linear(&mut self, lin: Linear) -> VarId {
        if lin.constant == 0 && lin.terms.len() == 1 {
            if let Some((v, 1)) = lin.terms.iter().next().map(|(v, c)| (*v, *c)) {
                return v;
            }
        }
        let (lo, hi) = lin.bounds(&self.vars);
        let aux = self.new_aux(lo, hi);
        let eq = lin.add_scaled(&Linear::var(aux), -1);
        let rhs = -eq.constant;
        self.define(
            aux,
            FlatConstraint::LinearEq {
                terms: eq.term_list(),
                rhs,
            },
        );
        aux
    }

    fn comparison(&mut self, rel: Rel, a: &FExpr, b: &FExpr) -> Result<Comparison, FlattenError> {
        let lb = self.linear(b)?;
        let diff = self.linear(a)?.add_scaled(&lb, -1);
        if let Some(k) = diff.as_constant() {
            return Ok(Comparison::Const(rel.holds(k, 0)));
        }
        // diff rel 0  with diff = terms + k
        let k = diff.constant;
        let (terms, op, rhs) = match rel {
            Rel::Eq => (diff.term_list(), CmpOp::Eq, -k),
            Rel::Ne => (diff.term_list(), CmpOp::Ne, -k),
            Rel::Le => (diff.term_list(), CmpOp::Le, -k),
            Rel::Lt => (diff.term_list(), CmpOp::Le, -k - 1),
            Rel::Ge => (diff.scale(-1).term_list(), CmpOp::Le, k),
            Rel::Gt => (diff.scale(-1).term_list(), CmpOp::Le, k - 1),
        };
        Ok(Comparison::Linear { terms, op, rhs })
    }

    fn post_false(&mut self) {
        let b = self.new_aux(0, 1);
        self.define(
            b,
            FlatConstraint::LinearEq {
                terms: vec![(1, b)],
                rhs: 0,
            },
        );
        self.post(FlatConstraint::Conjunction(vec![Lit::pos(b)]));
    }

    fn post_lits_or(&mut self, parts: &[FExpr]) -> Result<(), FlattenError> {
        let mut lits = Vec::with_capacity(parts.len());
        for p in parts {
            match self.reify(p)? {
                Truth::Const(true) => return Ok(()),
                Truth::Const(false) => {}
                Truth::Lit(l) => lits.push(l),
            }
        }
        if lits.is_empty() {
            self.post_false();
        } else {
            self.post(FlatConstraint::Disjunction(lits));
        }
        Ok(())
    }

    fn post_true(&mut self, e: &FExpr) -> Result<(), FlattenError> {
        match e {
            FExpr::Bool(true) => {}
            FExpr::Bool(false) => self.post_false(),
            FExpr::And(parts) => {
                for p in parts {
                    self.post_true(p)?;
                }
            }
            FExpr::Or(parts) => self.post_lits_or(parts)?,
            FExpr::Implies(a, b) => {
                self.post_lits_or(&[FExpr::negation((**a).clone()), (**b).clone()])?;
            }
            FExpr::Not(inner) => match &**inner {
                FExpr::Cmp(r, a, b) => self.post_true(&FExpr::Cmp(r.negate(), a.clone(), b.clone()))?,
                FExpr::And(parts) => {
                    let negs = parts.iter().cloned().map(FExpr::negation).collect::<Vec<_>>();
                    self.post_lits_or(&negs)?;
                }
                FExpr::Or(parts) => {
                    for p in parts {
                        self.post_true(&FExpr::negation(p.clone()))?;
                    }
                }
                FExpr::Implies(a, b) => {
                    self.post_true(a)?;
                    self.post_true(&FExpr::negation((**b).clone()))?;
                }
                FExpr::Not(x) => self.post_true(x)?,
                FExpr::Bool(b) => self.post_true(&FExpr::Bool(!b))?,
                other => match self.reify(other)? {
                    Truth::Const(true) => self.post_false(),
                    Truth::Const(false) => {}
                    Truth::Lit(l) => self.post(FlatConstraint::Conjunction(vec![l.negate()])),
                },
            },
            FExpr::Cmp(rel, a, b) => match self.comparison(*rel, a, b)? {
                Comparison::Const(true) => {}
                Comparison::Const(false) => self.post_false(),
                Comparison::Linear { terms, op, rhs } => match op {
                    CmpOp::Eq => self.post(FlatConstraint::LinearEq { terms, rhs }),
                    CmpOp::Le => self.post(FlatConstraint::LinearLeq { terms, rhs }),
                    CmpOp::Ne => {
                        let b = self.new_aux(0, 1);
                        self.define(
                            b,
                            FlatConstraint::ReifEq {
                                reif: b,
                                terms,
                                op,
                                rhs,
                            },
                        );
                        self.post(FlatConstraint::Conjunction(vec![Lit::pos(b)]));
                    }
                },
            },
            FExpr::AllDiff(items) => {
                let mut vs = Vec::with_capacity(items.len());
                for i in items {
                    vs.push(self.var_of(i)?);
                }
                if vs.len() >= 2 {
                    self.post(FlatConstraint::AllDiff(vs));
                }
            }
            other => {
                return Err(FlattenError::UnsupportedConstruct {
                    node: format!("`{other}` as a constraint"),
                })
            }
        }
        Ok(())
    }

    /// Reified truth of a boolean expression.
    fn reify(&mut self, e: &FExpr) -> Result<Truth, FlattenError> {
        Ok(match e {
            FExpr::Bool(b) => Truth::Const(*b),
            FExpr::Not(a) => self.reify(a)?.negate(),
            FExpr::Cmp(rel, a, b) => match self.comparison(*rel, a, b)? {
                Comparison::Const(b) => Truth::Const(b),
                Comparison::Linear { terms, op, rhs } => {
                    let reif = self.new_aux(0, 1);
                    self.define(reif, FlatConstraint::ReifEq { reif, terms, op, rhs });
                    Truth::Lit(Lit::pos(reif))
                }
            },
            FExpr::And(parts) => {
                let mut truths = Vec::with_capacity(parts.len());
                for p in parts {
                    truths.push(self.reify(p)?);
                }
                self.reify_count(truths, true)
            }
            FExpr::Or(parts) => {
                let mut truths = Vec::with_capacity(parts.len());
                for p in parts {
                    truths.push(self.reify(p)?);
                }
                self.reify_count(truths, false)
            }
            FExpr::Implies(a, b) => {
                let ta = self.reify(a)?.negate();
                let tb = self.reify(b)?;
                self.reify_count(vec![ta, tb], false)
            }
            FExpr::AllDiff(items) => {
                let mut truths = Vec::new();
                for (i, a) in items.iter().enumerate() {
                    for b in &items[i + 1..] {
                        truths.push(self.reify(&FExpr::cmp(Rel::Ne, a.clone(), b.clone()))?);
                    }
                }
                self.reify_count(truths, true)
            }
            other => {
                return Err(FlattenError::UnsupportedConstruct {
                    node: format!("`{other}` in boolean position"),
                })
            }
        })
    }

    /// `b ⇔ all(truths)` when `all`, else `b ⇔ any(truths)`.
    fn reify_count(&mut self, truths: Vec<Truth>, all: bool) -> Truth {
        let mut lits = Vec::with_capacity(truths.len());
        for t in truths {
            match t {
                Truth::Const(b) if b == all => {}
                Truth::Const(b) => return Truth::Const(b),
                Truth::Lit(l) => lits.push(l),
            }
        }
        match lits.len() {
            0 => return Truth::Const(all),
            1 => return Truth::Lit(lits[0]),
            _ => {}
        }
        // Σ value(lit) where value(¬v) = 1 - v
        let mut sum = Linear::constant(0);
        for l in &lits {
            if l.positive {
                sum = sum.add_scaled(&Linear::var(l.var), 1);
            } else {
                sum = sum
                    .add_scaled(&Linear::var(l.var), -1)
                    .add_scaled(&Linear::constant(1), 1);
            }
        }
        let need = if all { lits.len() as i64 } else { 1 };
        // sum ≥ need  ⇔  -terms ≤ constant - need
        let neg = sum.scale(-1);
        let rhs = -neg.constant - need;
        if neg.terms.is_empty() {
            return Truth::Const(0 <= rhs);
        }
        let reif = self.new_aux(0, 1);
        self.define(
            reif,
            FlatConstraint::ReifEq {
                reif,
                terms: neg.term_list(),
                op: CmpOp::Le,
                rhs,
            },
        );
        Truth::Lit(Lit::pos(reif))
    }
}
