// Copyright 2026 The qualmod Authors. All rights reserved.
// Use of this source code is governed by the Apache License,
// Version 2.0, that can be found in the LICENSE file.

use std::collections::BTreeSet;

use crate::flatten::{CspInstance, VarId};

/// A domain became empty.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Conflict;

pub type Prop<T = ()> = Result<T, Conflict>;

#[derive(Debug, Clone, Copy)]
enum Undo {
    Lo(VarId, i64),
    Hi(VarId, i64),
    Hole(VarId, i64),
}

/// Per-variable integer domains: an interval `lo..=hi` minus a set of
/// removed interior values, with a trail for backtracking.
///
/// Bounds always sit on members of the domain. Removed values outside the
/// current bounds may linger in the hole set; they are never counted.
#[derive(Debug, Clone)]
pub struct DomainStore {
    lo: Vec<i64>,
    hi: Vec<i64>,
    holes: Vec<BTreeSet<i64>>,
    trail: Vec<Undo>,
    levels: Vec<usize>,
    modified: Vec<VarId>,
}

impl DomainStore {
    pub fn new(instance: &CspInstance) -> Self {
        let n = instance.vars.len();
        DomainStore {
            lo: instance.vars.iter().map(|v| v.lo).collect(),
            hi: instance.vars.iter().map(|v| v.hi).collect(),
            holes: vec![BTreeSet::new(); n],
            trail: Vec::new(),
            levels: Vec::new(),
            modified: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.lo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lo.is_empty()
    }

    pub fn lo(&self, v: VarId) -> i64 {
        self.lo[v]
    }

    pub fn hi(&self, v: VarId) -> i64 {
        self.hi[v]
    }

    pub fn is_fixed(&self, v: VarId) -> bool {
        self.lo[v] == self.hi[v]
    }

    /// The value of a fixed variable.
    pub fn value(&self, v: VarId) -> Option<i64> {
        self.is_fixed(v).then_some(self.lo[v])
    }

    pub fn contains(&self, v: VarId, x: i64) -> bool {
        self.lo[v] <= x && x <= self.hi[v] && !self.holes[v].contains(&x)
    }

    pub fn size(&self, v: VarId) -> u64 {
        let span = (self.hi[v] as i128 - self.lo[v] as i128 + 1) as u64;
        span - self.holes[v].range(self.lo[v]..=self.hi[v]).count() as u64
    }

    /// Domain members in ascending order.
    pub fn values(&self, v: VarId) -> impl Iterator<Item = i64> + '_ {
        (self.lo[v]..=self.hi[v]).filter(move |x| !self.holes[v].contains(x))
    }

    /// The `k`-th smallest member, `k < size(v)`.
    pub fn nth_value(&self, v: VarId, k: u64) -> i64 {
        self.values(v).nth(k as usize).expect("index within domain size")
    }

    /// Vars whose domain changed since the last call.
    pub fn take_modified(&mut self) -> Vec<VarId> {
        std::mem::take(&mut self.modified)
    }

    pub fn set_lo(&mut self, v: VarId, x: i64) -> Prop<bool> {
        if x <= self.lo[v] {
            return Ok(false);
        }
        let mut x = x;
        while x <= self.hi[v] && self.holes[v].contains(&x) {
            x += 1;
        }
        if x > self.hi[v] {
            return Err(Conflict);
        }
        self.trail.push(Undo::Lo(v, self.lo[v]));
        self.lo[v] = x;
        self.modified.push(v);
        Ok(true)
    }

    pub fn set_hi(&mut self, v: VarId, x: i64) -> Prop<bool> {
        if x >= self.hi[v] {
            return Ok(false);
        }
        let mut x = x;
        while x >= self.lo[v] && self.holes[v].contains(&x) {
            x -= 1;
        }
        if x < self.lo[v] {
            return Err(Conflict);
        }
        self.trail.push(Undo::Hi(v, self.hi[v]));
        self.hi[v] = x;
        self.modified.push(v);
        Ok(true)
    }

    pub fn assign(&mut self, v: VarId, x: i64) -> Prop<bool> {
        if !self.contains(v, x) {
            return Err(Conflict);
        }
        let a = self.set_lo(v, x)?;
        let b = self.set_hi(v, x)?;
        Ok(a || b)
    }

    pub fn remove(&mut self, v: VarId, x: i64) -> Prop<bool> {
        if !self.contains(v, x) {
            return Ok(false);
        }
        if x == self.lo[v] {
            self.set_lo(v, x + 1)
        } else if x == self.hi[v] {
            self.set_hi(v, x - 1)
        } else {
            self.holes[v].insert(x);
            self.trail.push(Undo::Hole(v, x));
            self.modified.push(v);
            Ok(true)
        }
    }

    pub fn push_level(&mut self) {
        self.levels.push(self.trail.len());
    }

    /// Restores the state at the matching `push_level`.
    pub fn pop_level(&mut self) {
        let mark = self.levels.pop().expect("pop_level without push_level");
        while self.trail.len() > mark {
            match self.trail.pop().unwrap() {
                Undo::Lo(v, x) => self.lo[v] = x,
                Undo::Hi(v, x) => self.hi[v] = x,
                Undo::Hole(v, x) => {
                    self.holes[v].remove(&x);
                }
            }
        }
        self.modified.clear();
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    /// Snapshot of every domain, for comparisons in tests.
    pub fn snapshot(&self) -> Vec<Vec<i64>> {
        (0..self.len()).map(|v| self.values(v).collect()).collect()
    }
}
