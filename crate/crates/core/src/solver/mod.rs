// Copyright 2026 The qualmod Authors. All rights reserved.
// Use of this source code is governed by the Apache License,
// Version 2.0, that can be found in the LICENSE file.

//! Finite-domain search over a [`CspInstance`].
//!
//! Depth-first with binary branching (`v = a`, then `v ≠ a`) and
//! propagation at every node. Sampling runs independent restarts with
//! seeds `seed, seed+1, …`, each with its own random variable and value
//! order, keeping the first solution of each. Which solutions sampling
//! favours is a property of the search tree, not a target distribution.

mod brute;
mod check;
mod domain;
mod propagate;
mod records;
mod rng;
mod search;

use thiserror::Error;

pub use brute::{brute_force, DEFAULT_BRUTE_FORCE_CAP};
pub use check::{assignment_from_names, check_solution, complete_assignment, constraint_holds};
pub use domain::{Conflict, DomainStore};
pub use propagate::{propagate, Engine};
pub use records::{format_solution, format_stats, parse_solution, SolutionRecord};
pub use rng::XorShift64Star;
pub use search::{solve, solve_each};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolverError {
    #[error("assignment has no value for `{var}`")]
    IncompleteAssignment { var: String },
    #[error("search space of {size} assignments exceeds the cap of {cap}")]
    SpaceTooLarge { size: u128, cap: u128 },
    #[error("invalid search configuration: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarOrder {
    Declaration,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValueOrder {
    Ascending,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    First,
    All,
    /// `n` restarts, first solution of each; always uses random orders.
    Sample(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchConfig {
    pub var_order: VarOrder,
    pub value_order: ValueOrder,
    pub seed: u64,
    pub mode: Mode,
    /// Per search; each sampling restart gets its own budget.
    pub node_limit: Option<u64>,
    pub time_limit: Option<std::time::Duration>,
    /// Worker threads for sampling restarts; `None` uses all cores.
    pub jobs: Option<usize>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            var_order: VarOrder::Declaration,
            value_order: ValueOrder::Ascending,
            seed: 0,
            mode: Mode::First,
            node_limit: None,
            time_limit: None,
            jobs: None,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<(), SolverError> {
        if self.mode == Mode::Sample(0) {
            return Err(SolverError::InvalidConfig("sample count must be at least 1".into()));
        }
        if self.node_limit == Some(0) {
            return Err(SolverError::InvalidConfig("node limit must be positive".into()));
        }
        if self.time_limit.is_some_and(|t| t.is_zero()) {
            return Err(SolverError::InvalidConfig("time limit must be positive".into()));
        }
        if self.jobs == Some(0) {
            return Err(SolverError::InvalidConfig("jobs must be positive".into()));
        }
        Ok(())
    }
}

/// A solution over the declared variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    /// 0-based position in the emitted sequence.
    pub index: usize,
    pub seed: u64,
    /// Declared values by var id.
    pub values: Vec<i64>,
    /// Nodes explored by the search that produced it, up to this solution.
    pub nodes: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Limit {
    Nodes,
    Time,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    /// The search space was exhausted (mode all, or proof of
    /// unsatisfiability) or every requested solution was found.
    Complete,
    /// Stopped early; the solutions found so far are still reported.
    LimitExceeded(Limit),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchStats {
    pub nodes: u64,
    pub solutions: usize,
    pub time_ms: u128,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchOutcome {
    pub solutions: Vec<Solution>,
    pub stats: SearchStats,
    pub status: Status,
}

impl SearchOutcome {
    /// Complete search that found nothing.
    pub fn is_unsat(&self) -> bool {
        self.status == Status::Complete && self.solutions.is_empty()
    }
}
