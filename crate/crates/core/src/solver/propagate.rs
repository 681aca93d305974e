// Copyright 2026 The qualmod Authors. All rights reserved.
// Use of this source code is governed by the Apache License,
// Version 2.0, that can be found in the LICENSE file.

//! Constraint filtering to a fixpoint.
//!
//! Arithmetic constraints enforce bounds consistency, `AllDiff` removes the
//! values of fixed variables from the others, and the boolean constraints
//! propagate like clauses. Every filter is exact once its scope is fixed:
//! it fails iff the constraint is violated.

use std::collections::VecDeque;

use crate::flatten::{CmpOp, CspInstance, FlatConstraint, Lit, VarId};

use super::domain::{Conflict, DomainStore, Prop};

/// Runs every constraint of `instance` on `store` to a fixpoint.
pub fn propagate(instance: &CspInstance, store: &mut DomainStore) -> Prop {
    let mut engine = Engine::new(instance);
    engine.propagate_all(store)
}

/// Reusable propagation state for one search.
pub struct Engine<'a> {
    instance: &'a CspInstance,
    watches: Vec<Vec<usize>>,
    queue: VecDeque<usize>,
    queued: Vec<bool>,
    /// Two watched positions per disjunction; never trailed.
    disj_watch: Vec<(usize, usize)>,
}

impl<'a> Engine<'a> {
    pub fn new(instance: &'a CspInstance) -> Self {
        let mut watches = vec![Vec::new(); instance.vars.len()];
        for (k, c) in instance.constraints.iter().enumerate() {
            let mut scope = c.scope();
            scope.sort_unstable();
            scope.dedup();
            for v in scope {
                watches[v].push(k);
            }
        }
        let disj_watch = instance
            .constraints
            .iter()
            .map(|c| match c {
                FlatConstraint::Disjunction(lits) => (0, if lits.len() > 1 { 1 } else { 0 }),
                _ => (0, 0),
            })
            .collect();
        Engine {
            instance,
            watches,
            queue: VecDeque::new(),
            queued: vec![false; instance.constraints.len()],
            disj_watch,
        }
    }

    pub fn propagate_all(&mut self, store: &mut DomainStore) -> Prop {
        store.take_modified();
        for k in 0..self.instance.constraints.len() {
            self.enqueue(k);
        }
        self.run(store)
    }

    /// Propagates the consequences of domain changes since the last run.
    pub fn propagate_changes(&mut self, store: &mut DomainStore) -> Prop {
        self.wake(store);
        self.run(store)
    }

    fn enqueue(&mut self, k: usize) {
        if !self.queued[k] {
            self.queued[k] = true;
            self.queue.push_back(k);
        }
    }

    fn wake(&mut self, store: &mut DomainStore) {
        for v in store.take_modified() {
            for i in 0..self.watches[v].len() {
                let k = self.watches[v][i];
                self.enqueue(k);
            }
        }
    }

    fn run(&mut self, store: &mut DomainStore) -> Prop {
        while let Some(k) = self.queue.pop_front() {
            self.queued[k] = false;
            if let Err(e) = self.filter(k, store) {
                self.clear();
                store.take_modified();
                return Err(e);
            }
            self.wake(store);
        }
        Ok(())
    }

    fn clear(&mut self) {
        for k in self.queue.drain(..) {
            self.queued[k] = false;
        }
    }

    fn filter(&mut self, k: usize, s: &mut DomainStore) -> Prop {
        match &self.instance.constraints[k] {
            FlatConstraint::LinearEq { terms, rhs } => linear_eq(s, terms, 1, *rhs),
            FlatConstraint::LinearLeq { terms, rhs } => linear_le(s, terms, 1, *rhs),
            FlatConstraint::AbsEq { result, arg } => abs_eq(s, *result, *arg),
            FlatConstraint::ProductEq { result, lhs, rhs } => product_eq(s, *result, *lhs, *rhs),
            FlatConstraint::AllDiff(vs) => all_diff(s, vs),
            FlatConstraint::ReifEq { reif, terms, op, rhs } => reif_eq(s, *reif, terms, *op, *rhs),
            FlatConstraint::Conjunction(lits) => {
                for l in lits {
                    make_true(s, *l)?;
                }
                Ok(())
            }
            FlatConstraint::Disjunction(lits) => {
                let w = self.disj_watch[k];
                self.disj_watch[k] = disjunction(s, lits, w)?;
                Ok(())
            }
        }
    }
}

fn floor_div(a: i128, b: i128) -> i128 {
    let q = a / b;
    if (a % b != 0) && ((a < 0) != (b < 0)) {
        q - 1
    } else {
        q
    }
}

fn ceil_div(a: i128, b: i128) -> i128 {
    -floor_div(-a, b)
}

fn clamp64(x: i128) -> i64 {
    x.clamp(i64::MIN as i128, i64::MAX as i128) as i64
}

/// Bounds of `sign·c·v`.
fn term_bounds(s: &DomainStore, sign: i64, c: i64, v: VarId) -> (i128, i128) {
    let c = (sign * c) as i128;
    let (a, b) = (c * s.lo(v) as i128, c * s.hi(v) as i128);
    (a.min(b), a.max(b))
}

fn sum_bounds(s: &DomainStore, terms: &[(i64, VarId)], sign: i64) -> (i128, i128) {
    terms.iter().fold((0, 0), |(lo, hi), (c, v)| {
        let (a, b) = term_bounds(s, sign, *c, *v);
        (lo + a, hi + b)
    })
}

/// `lo ≤ c·v ≤ hi` as bounds on `v`; `None` leaves that side open.
fn restrict_term(s: &mut DomainStore, c: i128, v: VarId, lo: Option<i128>, hi: Option<i128>) -> Prop {
    let (vlo, vhi) = if c > 0 {
        (lo.map(|l| ceil_div(l, c)), hi.map(|h| floor_div(h, c)))
    } else {
        (hi.map(|h| ceil_div(h, c)), lo.map(|l| floor_div(l, c)))
    };
    if let Some(x) = vlo {
        s.set_lo(v, clamp64(x))?;
    }
    if let Some(x) = vhi {
        s.set_hi(v, clamp64(x))?;
    }
    Ok(())
}

/// `Σ sign·c·v ≤ rhs`
fn linear_le(s: &mut DomainStore, terms: &[(i64, VarId)], sign: i64, rhs: i64) -> Prop {
    let rhs = rhs as i128;
    let (min, _) = sum_bounds(s, terms, sign);
    if min > rhs {
        return Err(Conflict);
    }
    for (c, v) in terms {
        let (tmin, _) = term_bounds(s, sign, *c, *v);
        let slack = rhs - (min - tmin);
        restrict_term(s, (sign * c) as i128, *v, None, Some(slack))?;
    }
    Ok(())
}

/// `Σ sign·c·v = rhs`
fn linear_eq(s: &mut DomainStore, terms: &[(i64, VarId)], sign: i64, rhs: i64) -> Prop {
    loop {
        let r = rhs as i128;
        let (min, max) = sum_bounds(s, terms, sign);
        if r < min || r > max {
            return Err(Conflict);
        }
        let mut changed = false;
        for (c, v) in terms {
            let (tmin, tmax) = term_bounds(s, sign, *c, *v);
            let lo = r - (max - tmax);
            let hi = r - (min - tmin);
            let before = (s.lo(*v), s.hi(*v));
            restrict_term(s, (sign * c) as i128, *v, Some(lo), Some(hi))?;
            changed |= before != (s.lo(*v), s.hi(*v));
        }
        if !changed {
            return Ok(());
        }
    }
}

/// `Σ sign·c·v ≠ rhs`: prunes only when one variable is left.
fn linear_ne(s: &mut DomainStore, terms: &[(i64, VarId)], sign: i64, rhs: i64) -> Prop {
    let mut free = None;
    let mut fixed_sum: i128 = 0;
    for (c, v) in terms {
        match s.value(*v) {
            Some(x) => fixed_sum += (sign * c) as i128 * x as i128,
            None if free.is_none() => free = Some((sign * c, *v)),
            None => return Ok(()),
        }
    }
    let rest = rhs as i128 - fixed_sum;
    match free {
        None if rest == 0 => Err(Conflict),
        None => Ok(()),
        Some((c, v)) => {
            let c = c as i128;
            if rest % c == 0 {
                s.remove(v, clamp64(rest / c))?;
            }
            Ok(())
        }
    }
}

fn abs_eq(s: &mut DomainStore, r: VarId, a: VarId) -> Prop {
    let (alo, ahi) = (s.lo(a), s.hi(a));
    let min_abs = if alo <= 0 && ahi >= 0 {
        0
    } else {
        alo.abs().min(ahi.abs())
    };
    s.set_lo(r, min_abs.max(0))?;
    s.set_hi(r, alo.saturating_abs().max(ahi.saturating_abs()))?;
    let (rlo, rhi) = (s.lo(r), s.hi(r));
    s.set_lo(a, -rhi)?;
    s.set_hi(a, rhi)?;
    if s.lo(a) > -rlo {
        s.set_lo(a, rlo)?;
    }
    if s.hi(a) < rlo {
        s.set_hi(a, -rlo)?;
    }
    if s.lo(a) != alo || s.hi(a) != ahi {
        // the argument moved; tighten the result again
        return abs_eq(s, r, a);
    }
    if let Some(x) = s.value(a) {
        s.assign(r, x.abs())?;
    }
    Ok(())
}

fn product_eq(s: &mut DomainStore, r: VarId, x: VarId, y: VarId) -> Prop {
    loop {
        let before = [s.lo(r), s.hi(r), s.lo(x), s.hi(x), s.lo(y), s.hi(y)];
        let corners = [
            s.lo(x) as i128 * s.lo(y) as i128,
            s.lo(x) as i128 * s.hi(y) as i128,
            s.hi(x) as i128 * s.lo(y) as i128,
            s.hi(x) as i128 * s.hi(y) as i128,
        ];
        s.set_lo(r, clamp64(*corners.iter().min().unwrap()))?;
        s.set_hi(r, clamp64(*corners.iter().max().unwrap()))?;
        divide_bounds(s, r, y, x)?;
        divide_bounds(s, r, x, y)?;
        let after = [s.lo(r), s.hi(r), s.lo(x), s.hi(x), s.lo(y), s.hi(y)];
        if after == before {
            return Ok(());
        }
    }
}

/// Tightens `target` from `r = target · divisor` when `divisor` excludes 0.
fn divide_bounds(s: &mut DomainStore, r: VarId, divisor: VarId, target: VarId) -> Prop {
    let (dlo, dhi) = (s.lo(divisor) as i128, s.hi(divisor) as i128);
    if dlo <= 0 && dhi >= 0 {
        return Ok(());
    }
    let (rlo, rhi) = (s.lo(r) as i128, s.hi(r) as i128);
    let mut lo = i128::MAX;
    let mut hi = i128::MIN;
    for n in [rlo, rhi] {
        for d in [dlo, dhi] {
            lo = lo.min(ceil_div(n, d));
            hi = hi.max(floor_div(n, d));
        }
    }
    s.set_lo(target, clamp64(lo))?;
    s.set_hi(target, clamp64(hi))?;
    Ok(())
}

fn all_diff(s: &mut DomainStore, vs: &[VarId]) -> Prop {
    let mut done = vec![false; vs.len()];
    loop {
        let mut progress = false;
        for i in 0..vs.len() {
            if done[i] {
                continue;
            }
            if let Some(x) = s.value(vs[i]) {
                done[i] = true;
                progress = true;
                for (j, w) in vs.iter().enumerate() {
                    if j != i {
                        if *w == vs[i] {
                            return Err(Conflict);
                        }
                        s.remove(*w, x)?;
                    }
                }
            }
        }
        if !progress {
            return Ok(());
        }
    }
}

fn negated(op: CmpOp, rhs: i64) -> (CmpOp, i64, i64) {
    // returns (op', sign, rhs') with  ¬(Σ op rhs)  ≡  (Σ sign· op' rhs')
    match op {
        CmpOp::Eq => (CmpOp::Ne, 1, rhs),
        CmpOp::Ne => (CmpOp::Eq, 1, rhs),
        CmpOp::Le => (CmpOp::Le, -1, -rhs - 1),
    }
}

/// Some(true) entailed, Some(false) disentailed.
fn entailment(s: &DomainStore, terms: &[(i64, VarId)], op: CmpOp, rhs: i64) -> Option<bool> {
    let (min, max) = sum_bounds(s, terms, 1);
    let r = rhs as i128;
    let eq = if min == max && min == r {
        Some(true)
    } else if r < min || r > max {
        Some(false)
    } else {
        None
    };
    match op {
        CmpOp::Eq => eq,
        CmpOp::Ne => eq.map(|b| !b),
        CmpOp::Le if max <= r => Some(true),
        CmpOp::Le if min > r => Some(false),
        CmpOp::Le => None,
    }
}

fn post(s: &mut DomainStore, terms: &[(i64, VarId)], sign: i64, op: CmpOp, rhs: i64) -> Prop {
    match op {
        CmpOp::Eq => linear_eq(s, terms, sign, rhs),
        CmpOp::Ne => linear_ne(s, terms, sign, rhs),
        CmpOp::Le => linear_le(s, terms, sign, rhs),
    }
}

fn reif_eq(s: &mut DomainStore, b: VarId, terms: &[(i64, VarId)], op: CmpOp, rhs: i64) -> Prop {
    s.set_lo(b, 0)?;
    s.set_hi(b, 1)?;
    if let Some(truth) = entailment(s, terms, op, rhs) {
        s.assign(b, truth as i64)?;
        return Ok(());
    }
    match s.value(b) {
        Some(1) => post(s, terms, 1, op, rhs),
        Some(_) => {
            let (op, sign, rhs) = negated(op, rhs);
            post(s, terms, sign, op, rhs)
        }
        None => Ok(()),
    }
}

fn lit_value(s: &DomainStore, l: Lit) -> Option<bool> {
    s.value(l.var).map(|x| (x != 0) == l.positive)
}

fn make_true(s: &mut DomainStore, l: Lit) -> Prop {
    s.assign(l.var, l.positive as i64)?;
    Ok(())
}

/// Watched-literal filtering. Returns the new watch pair.
fn disjunction(s: &mut DomainStore, lits: &[Lit], watch: (usize, usize)) -> Prop<(usize, usize)> {
    if lits.len() == 1 {
        make_true(s, lits[0])?;
        return Ok((0, 0));
    }
    let mut w = [watch.0, watch.1];
    for k in 0..2 {
        match lit_value(s, lits[w[k]]) {
            Some(true) => return Ok((w[0], w[1])),
            None => {}
            Some(false) => {
                let other = w[1 - k];
                if let Some(i) = (0..lits.len()).find(|&i| i != other && lit_value(s, lits[i]) != Some(false)) {
                    w[k] = i;
                }
            }
        }
    }
    match (lit_value(s, lits[w[0]]), lit_value(s, lits[w[1]])) {
        (Some(true), _) | (_, Some(true)) => {}
        (Some(false), Some(false)) => return Err(Conflict),
        (Some(false), None) => make_true(s, lits[w[1]])?,
        (None, Some(false)) => make_true(s, lits[w[0]])?,
        (None, None) => {}
    }
    Ok((w[0], w[1]))
}
