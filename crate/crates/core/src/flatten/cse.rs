// Copyright 2026 The qualmod Authors. All rights reserved.
// Use of this source code is governed by the Apache License,
// Version 2.0, that can be found in the LICENSE file.

//! Identical common subexpression elimination over integer expressions.
//!
//! Subexpressions are compared after sorting the operands of `+` and `*`.
//! Every non-leaf integer subexpression occurring at least twice is bound to
//! a fresh auxiliary variable, innermost first. With `k ≥ 2` occurrences of
//! a subtree of size `s ≥ 2`, the rewrite trades `k·s` nodes for `k + s`, so
//! the node count never grows.

use std::collections::HashMap;

use super::expand::{bounds, ExpandedModel, FExpr};
use super::instance::{Origin, VarId, VarInfo};

pub fn eliminate_cse(mut model: ExpandedModel) -> ExpandedModel {
    let mut counts: HashMap<FExpr, usize> = HashMap::new();
    for e in model.constraints.iter().chain(model.defs.iter().map(|(_, e)| e)) {
        canonical(e, &mut |c| *counts.entry(c.clone()).or_default() += 1);
    }
    if !counts.values().any(|&n| n >= 2) {
        return model;
    }

    let mut rewriter = Rewriter {
        counts: &counts,
        memo: HashMap::new(),
        vars: &mut model.vars,
        new_defs: Vec::new(),
    };
    let constraints: Vec<FExpr> = model.constraints.iter().map(|e| rewriter.rewrite(e).1).collect();
    let old_defs: Vec<(VarId, FExpr)> = model.defs.iter().map(|(v, e)| (*v, rewriter.rewrite(e).1)).collect();
    let new_defs = rewriter.new_defs;

    model.constraints = constraints;
    model.defs = old_defs;
    model.defs.extend(new_defs);
    model
}

fn is_candidate(e: &FExpr) -> bool {
    e.is_integer() && !matches!(e, FExpr::Const(_) | FExpr::Var(_))
}

/// Canonical form with commutative operands sorted; reports each candidate
/// subexpression's canonical form to `seen`.
fn canonical(e: &FExpr, seen: &mut impl FnMut(&FExpr)) -> FExpr {
    let c = match e {
        FExpr::Const(_) | FExpr::Bool(_) | FExpr::Var(_) => e.clone(),
        FExpr::Neg(a) => FExpr::Neg(Box::new(canonical(a, seen))),
        FExpr::Abs(a) => FExpr::Abs(Box::new(canonical(a, seen))),
        FExpr::Not(a) => FExpr::Not(Box::new(canonical(a, seen))),
        FExpr::Add(a, b) => {
            let (a, b) = sorted(canonical(a, seen), canonical(b, seen));
            FExpr::Add(Box::new(a), Box::new(b))
        }
        FExpr::Mul(a, b) => {
            let (a, b) = sorted(canonical(a, seen), canonical(b, seen));
            FExpr::Mul(Box::new(a), Box::new(b))
        }
        FExpr::Sub(a, b) => FExpr::Sub(Box::new(canonical(a, seen)), Box::new(canonical(b, seen))),
        FExpr::Cmp(r, a, b) => FExpr::Cmp(*r, Box::new(canonical(a, seen)), Box::new(canonical(b, seen))),
        FExpr::Implies(a, b) => FExpr::Implies(Box::new(canonical(a, seen)), Box::new(canonical(b, seen))),
        FExpr::And(v) => FExpr::And(v.iter().map(|x| canonical(x, seen)).collect()),
        FExpr::Or(v) => FExpr::Or(v.iter().map(|x| canonical(x, seen)).collect()),
        FExpr::AllDiff(v) => FExpr::AllDiff(v.iter().map(|x| canonical(x, seen)).collect()),
    };
    if is_candidate(&c) {
        seen(&c);
    }
    c
}

fn sorted(a: FExpr, b: FExpr) -> (FExpr, FExpr) {
    if b < a {
        (b, a)
    } else {
        (a, b)
    }
}

struct Rewriter<'a> {
    counts: &'a HashMap<FExpr, usize>,
    memo: HashMap<FExpr, VarId>,
    vars: &'a mut Vec<VarInfo>,
    new_defs: Vec<(VarId, FExpr)>,
}

impl Rewriter<'_> {
    /// Returns (canonical form of the original, rewritten expression).
    fn rewrite(&mut self, e: &FExpr) -> (FExpr, FExpr) {
        let (canon, rewritten) = match e {
            FExpr::Const(_) | FExpr::Bool(_) | FExpr::Var(_) => (e.clone(), e.clone()),
            FExpr::Neg(a) => self.unary(a, FExpr::Neg),
            FExpr::Abs(a) => self.unary(a, FExpr::Abs),
            FExpr::Not(a) => self.unary(a, FExpr::Not),
            FExpr::Add(a, b) => self.binary(a, b, true, FExpr::Add),
            FExpr::Mul(a, b) => self.binary(a, b, true, FExpr::Mul),
            FExpr::Sub(a, b) => self.binary(a, b, false, FExpr::Sub),
            FExpr::Implies(a, b) => self.binary(a, b, false, FExpr::Implies),
            FExpr::Cmp(r, a, b) => {
                let r = *r;
                self.binary(a, b, false, move |x, y| FExpr::Cmp(r, x, y))
            }
            FExpr::And(v) => self.nary(v, FExpr::And),
            FExpr::Or(v) => self.nary(v, FExpr::Or),
            FExpr::AllDiff(v) => self.nary(v, FExpr::AllDiff),
        };
        if is_candidate(&canon) && self.counts.get(&canon).copied().unwrap_or(0) >= 2 {
            let var = match self.memo.get(&canon) {
                Some(v) => *v,
                None => {
                    let (lo, hi) = bounds(self.vars, &rewritten);
                    let v = self.vars.len();
                    self.vars.push(VarInfo {
                        name: format!("_cse{}", self.new_defs.len()),
                        lo,
                        hi,
                        origin: Origin::Auxiliary,
                    });
                    self.new_defs.push((v, rewritten));
                    self.memo.insert(canon.clone(), v);
                    v
                }
            };
            return (canon, FExpr::Var(var));
        }
        (canon, rewritten)
    }

    fn unary(&mut self, a: &FExpr, mk: fn(Box<FExpr>) -> FExpr) -> (FExpr, FExpr) {
        let (ca, ra) = self.rewrite(a);
        (mk(Box::new(ca)), mk(Box::new(ra)))
    }

    fn binary(
        &mut self,
        a: &FExpr,
        b: &FExpr,
        commutative: bool,
        mk: impl Fn(Box<FExpr>, Box<FExpr>) -> FExpr,
    ) -> (FExpr, FExpr) {
        let (ca, ra) = self.rewrite(a);
        let (cb, rb) = self.rewrite(b);
        let (ca, cb, ra, rb) = if commutative && cb < ca {
            (cb, ca, rb, ra)
        } else {
            (ca, cb, ra, rb)
        };
        (mk(Box::new(ca), Box::new(cb)), mk(Box::new(ra), Box::new(rb)))
    }

    fn nary(&mut self, v: &[FExpr], mk: fn(Vec<FExpr>) -> FExpr) -> (FExpr, FExpr) {
        let (c, r): (Vec<_>, Vec<_>) = v.iter().map(|x| self.rewrite(x)).unzip();
        (mk(c), mk(r))
    }
}
