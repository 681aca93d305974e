// Copyright 2026 The qualmod Authors. All rights reserved.
// Use of this source code is governed by the Apache License,
// Version 2.0, that can be found in the LICENSE file.

//! Direct evaluation of flat constraints, independent of the propagators.

use std::collections::BTreeMap;

use crate::flatten::{CmpOp, CspInstance, FlatConstraint, Lit, Origin, VarId};

use super::SolverError;

fn linear_sum(terms: &[(i64, VarId)], values: &[i64]) -> i128 {
    terms.iter().map(|(c, v)| *c as i128 * values[*v] as i128).sum()
}

fn compare(sum: i128, op: CmpOp, rhs: i64) -> bool {
    let rhs = rhs as i128;
    match op {
        CmpOp::Eq => sum == rhs,
        CmpOp::Ne => sum != rhs,
        CmpOp::Le => sum <= rhs,
    }
}

fn lit_holds(l: Lit, values: &[i64]) -> bool {
    (values[l.var] != 0) == l.positive
}

/// Truth of one constraint under a total assignment.
pub fn constraint_holds(c: &FlatConstraint, values: &[i64]) -> bool {
    match c {
        FlatConstraint::LinearEq { terms, rhs } => compare(linear_sum(terms, values), CmpOp::Eq, *rhs),
        FlatConstraint::LinearLeq { terms, rhs } => compare(linear_sum(terms, values), CmpOp::Le, *rhs),
        FlatConstraint::AbsEq { result, arg } => values[*result] as i128 == (values[*arg] as i128).abs(),
        FlatConstraint::ProductEq { result, lhs, rhs } => {
            values[*result] as i128 == values[*lhs] as i128 * values[*rhs] as i128
        }
        FlatConstraint::AllDiff(vs) => {
            let mut seen: Vec<i64> = vs.iter().map(|v| values[*v]).collect();
            seen.sort_unstable();
            seen.windows(2).all(|w| w[0] != w[1])
        }
        FlatConstraint::ReifEq { reif, terms, op, rhs } => {
            let b = values[*reif];
            (b == 0 || b == 1) && (b == 1) == compare(linear_sum(terms, values), *op, *rhs)
        }
        FlatConstraint::Disjunction(lits) => lits.iter().any(|l| lit_holds(*l, values)),
        FlatConstraint::Conjunction(lits) => lits.iter().all(|l| lit_holds(*l, values)),
    }
}

/// The value a defining constraint gives its defined variable, given
/// values for the rest of its scope. `None` if no integer value exists.
pub(crate) fn defined_value(c: &FlatConstraint, var: VarId, values: &[i64]) -> Option<i64> {
    match c {
        FlatConstraint::LinearEq { terms, rhs } => {
            let coef = terms.iter().find(|t| t.1 == var)?.0 as i128;
            let rest: i128 = terms
                .iter()
                .filter(|t| t.1 != var)
                .map(|(c, v)| *c as i128 * values[*v] as i128)
                .sum();
            let num = *rhs as i128 - rest;
            (num % coef == 0)
                .then(|| num / coef)
                .and_then(|x| i64::try_from(x).ok())
        }
        FlatConstraint::AbsEq { result, arg } if *result == var => values[*arg].checked_abs(),
        FlatConstraint::ProductEq { result, lhs, rhs } if *result == var => values[*lhs].checked_mul(values[*rhs]),
        FlatConstraint::ReifEq {
            reif, terms, op, rhs, ..
        } if *reif == var => Some(compare(linear_sum(terms, values), *op, *rhs) as i64),
        _ => None,
    }
}

/// Completes a declared-only assignment with auxiliary values computed
/// from their defining constraints. `None` if some auxiliary has no value.
pub fn complete_assignment(instance: &CspInstance, declared: &[i64]) -> Option<Vec<i64>> {
    let n = instance.vars.len();
    let mut values = vec![0; n];
    let mut known = vec![false; n];
    for (v, x) in declared.iter().enumerate() {
        values[v] = *x;
        known[v] = true;
    }
    for v in declared.len()..n {
        resolve(instance, v, &mut values, &mut known)?;
    }
    Some(values)
}

fn resolve(instance: &CspInstance, v: VarId, values: &mut [i64], known: &mut [bool]) -> Option<()> {
    if known[v] {
        return Some(());
    }
    let c = &instance.constraints[instance.definers[v]?];
    for w in c.scope() {
        if w != v {
            resolve(instance, w, values, known)?;
        }
    }
    values[v] = defined_value(c, v, values)?;
    known[v] = true;
    Some(())
}

/// True iff the assignment respects every domain and constraint.
///
/// `assignment` lists values by var id. It may cover every variable, or
/// only the declared ones, in which case auxiliaries are recomputed.
pub fn check_solution(instance: &CspInstance, assignment: &[i64]) -> Result<bool, SolverError> {
    let declared = instance.declared_count();
    if assignment.len() < declared {
        return Err(SolverError::IncompleteAssignment {
            var: instance.vars[assignment.len()].name.clone(),
        });
    }
    let full;
    let values = if assignment.len() >= instance.vars.len() {
        &assignment[..instance.vars.len()]
    } else {
        match complete_assignment(instance, &assignment[..declared]) {
            Some(v) => {
                full = v;
                &full[..]
            }
            None => return Ok(false),
        }
    };
    let in_domain = instance
        .vars
        .iter()
        .zip(values)
        .all(|(info, x)| info.lo <= *x && *x <= info.hi);
    Ok(in_domain && instance.constraints.iter().all(|c| constraint_holds(c, values)))
}

/// Declared values by var id from a `name → value` map.
pub fn assignment_from_names(instance: &CspInstance, named: &BTreeMap<String, i64>) -> Result<Vec<i64>, SolverError> {
    instance
        .vars
        .iter()
        .filter(|v| v.origin == Origin::Declared)
        .map(|v| {
            named
                .get(&v.name)
                .copied()
                .ok_or_else(|| SolverError::IncompleteAssignment { var: v.name.clone() })
        })
        .collect()
}
