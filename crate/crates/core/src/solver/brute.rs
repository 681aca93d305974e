// Copyright 2026 The qualmod Authors. All rights reserved.
// Use of this source code is governed by the Apache License,
// Version 2.0, that can be found in the LICENSE file.

//! Exhaustive reference enumeration.
//!
//! Variables whose value is a function of already-known ones (the target
//! of an equality with everything else known, or the result of an
//! `abs`/product/reification) are computed rather than enumerated. Every
//! remaining variable is enumerated over its full declared domain, and
//! each constraint is evaluated directly as soon as its scope is known.

use crate::flatten::{CspInstance, FlatConstraint, VarId};

use super::check::{constraint_holds, defined_value};
use super::SolverError;

pub const DEFAULT_BRUTE_FORCE_CAP: u128 = 10_000_000;

#[derive(Debug, Clone, Copy)]
enum Step {
    Enumerate(VarId),
    Derive(VarId, usize),
}

impl Step {
    fn var(self) -> VarId {
        match self {
            Step::Enumerate(v) | Step::Derive(v, _) => v,
        }
    }
}

fn derivable(c: &FlatConstraint, known: &[bool]) -> Option<VarId> {
    let unknown = |v: &VarId| !known[*v];
    match c {
        FlatConstraint::LinearEq { terms, .. } => {
            let mut it = terms.iter().map(|t| t.1).filter(unknown);
            match (it.next(), it.next()) {
                (Some(v), None) => Some(v),
                _ => None,
            }
        }
        FlatConstraint::AbsEq { result, arg } => (unknown(result) && known[*arg]).then_some(*result),
        FlatConstraint::ProductEq { result, lhs, rhs } => {
            (unknown(result) && known[*lhs] && known[*rhs]).then_some(*result)
        }
        FlatConstraint::ReifEq { reif, terms, .. } => {
            (unknown(reif) && terms.iter().all(|t| known[t.1])).then_some(*reif)
        }
        _ => None,
    }
}

fn plan(instance: &CspInstance) -> Vec<Step> {
    let n = instance.vars.len();
    let mut known = vec![false; n];
    let mut steps = Vec::with_capacity(n);
    while steps.len() < n {
        let mut progress = true;
        while progress {
            progress = false;
            for (k, c) in instance.constraints.iter().enumerate() {
                if let Some(v) = derivable(c, &known) {
                    known[v] = true;
                    steps.push(Step::Derive(v, k));
                    progress = true;
                }
            }
        }
        if let Some(v) = (0..n).find(|v| !known[*v]) {
            known[v] = true;
            steps.push(Step::Enumerate(v));
        }
    }
    steps
}

/// Every solution of `instance`, as declared-variable assignments in
/// lexicographic order.
///
/// Fails with `SpaceTooLarge` when the product of the enumerated
/// variables' domain sizes exceeds `cap`.
pub fn brute_force(instance: &CspInstance, cap: u128) -> Result<Vec<Vec<i64>>, SolverError> {
    let steps = plan(instance);
    let mut space: u128 = 1;
    for s in &steps {
        if let Step::Enumerate(v) = s {
            let info = &instance.vars[*v];
            space = space.saturating_mul((info.hi as i128 - info.lo as i128 + 1) as u128);
        }
    }
    if space > cap {
        return Err(SolverError::SpaceTooLarge { size: space, cap });
    }

    let mut position = vec![0; instance.vars.len()];
    for (i, s) in steps.iter().enumerate() {
        position[s.var()] = i;
    }
    let mut checks = vec![Vec::new(); steps.len()];
    for (k, c) in instance.constraints.iter().enumerate() {
        let last = c.scope().into_iter().map(|v| position[v]).max().unwrap_or(0);
        checks[last].push(k);
    }

    let mut search = Enumeration {
        instance,
        steps: &steps,
        checks: &checks,
        values: vec![0; instance.vars.len()],
        found: Vec::new(),
    };
    search.descend(0);
    let mut found = search.found;
    found.sort();
    found.dedup();
    Ok(found)
}

struct Enumeration<'a> {
    instance: &'a CspInstance,
    steps: &'a [Step],
    checks: &'a [Vec<usize>],
    values: Vec<i64>,
    found: Vec<Vec<i64>>,
}

impl Enumeration<'_> {
    fn descend(&mut self, depth: usize) {
        if depth == self.steps.len() {
            let declared = self.instance.declared_count();
            self.found.push(self.values[..declared].to_vec());
            return;
        }
        match self.steps[depth] {
            Step::Enumerate(v) => {
                let info = &self.instance.vars[v];
                for x in info.lo..=info.hi {
                    self.values[v] = x;
                    if self.consistent(depth) {
                        self.descend(depth + 1);
                    }
                }
            }
            Step::Derive(v, k) => {
                let info = &self.instance.vars[v];
                if let Some(x) = defined_value(&self.instance.constraints[k], v, &self.values) {
                    if info.lo <= x && x <= info.hi {
                        self.values[v] = x;
                        if self.consistent(depth) {
                            self.descend(depth + 1);
                        }
                    }
                }
            }
        }
    }

    fn consistent(&self, depth: usize) -> bool {
        self.checks[depth]
            .iter()
            .all(|k| constraint_holds(&self.instance.constraints[*k], &self.values))
    }
}
