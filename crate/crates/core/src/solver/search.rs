// Copyright 2026 The qualmod Authors. All rights reserved.
// Use of this source code is governed by the Apache License,
// Version 2.0, that can be found in the LICENSE file.

use std::time::Instant;

use rayon::prelude::*;

use crate::flatten::{CspInstance, FlatConstraint, VarId};

use super::domain::DomainStore;
use super::propagate::Engine;
use super::rng::XorShift64Star;
use super::{
    Limit, Mode, SearchConfig, SearchOutcome, SearchStats, Solution, SolverError, Status, ValueOrder, VarOrder,
};

/// Runs the configured search and collects its solutions.
pub fn solve(instance: &CspInstance, config: &SearchConfig) -> Result<SearchOutcome, SolverError> {
    let mut solutions = Vec::new();
    let (stats, status) = solve_each(instance, config, |s| solutions.push(s.clone()))?;
    Ok(SearchOutcome {
        solutions,
        stats,
        status,
    })
}

/// Runs the configured search, handing each solution to `emit` in order.
pub fn solve_each(
    instance: &CspInstance,
    config: &SearchConfig,
    mut emit: impl FnMut(&Solution),
) -> Result<(SearchStats, Status), SolverError> {
    config.validate()?;
    let start = Instant::now();
    let deadline = config.time_limit.map(|t| start + t);
    let mut count = 0;
    let (nodes, status) = match config.mode {
        Mode::First | Mode::All => {
            let mut search = Search::new(
                instance,
                config.var_order,
                config.value_order,
                config.seed,
                config,
                deadline,
            );
            let status = search.run(config.mode == Mode::First, &mut |values, nodes| {
                emit(&Solution {
                    index: count,
                    seed: config.seed,
                    values: values.to_vec(),
                    nodes,
                });
                count += 1;
            });
            (search.nodes, status)
        }
        Mode::Sample(n) => {
            let restart = |i: usize| {
                let seed = config.seed.wrapping_add(i as u64);
                sample_one(instance, seed, config, deadline)
            };
            let first = restart(0);
            let mut runs = vec![first];
            let unsat = runs[0].1.is_none() && runs[0].3 == Status::Complete;
            if !unsat && n > 1 {
                let rest = |range: std::ops::Range<usize>| range.into_par_iter().map(restart).collect::<Vec<_>>();
                let more = match config.jobs {
                    Some(j) => rayon::ThreadPoolBuilder::new()
                        .num_threads(j)
                        .build()
                        .map_err(|e| SolverError::InvalidConfig(e.to_string()))?
                        .install(|| rest(1..n)),
                    None => rest(1..n),
                };
                runs.extend(more);
            }
            let mut nodes = 0;
            let mut status = Status::Complete;
            for (seed, found, run_nodes, run_status) in runs {
                nodes += run_nodes;
                if let Status::LimitExceeded(l) = run_status {
                    status = Status::LimitExceeded(l);
                }
                if let Some((values, at)) = found {
                    emit(&Solution {
                        index: count,
                        seed,
                        values,
                        nodes: at,
                    });
                    count += 1;
                }
            }
            (nodes, status)
        }
    };
    Ok((
        SearchStats {
            nodes,
            solutions: count,
            time_ms: start.elapsed().as_millis(),
        },
        status,
    ))
}

/// Node budget of the first attempt inside one sample; later attempts
/// get multiples following the Luby sequence.
const RESTART_BASE: u64 = 64;

/// `1, 1, 2, 1, 1, 2, 4, 1, 1, 2, ...` for `k = 1, 2, ...`
fn luby(k: u64) -> u64 {
    let mut k = k;
    loop {
        let mut p = 1u64;
        while (1 << p) - 1 < k {
            p += 1;
        }
        if k == (1 << p) - 1 {
            return 1 << (p - 1);
        }
        k -= (1 << (p - 1)) - 1;
    }
}

/// One sample: randomised first-solution searches with growing node
/// cutoffs, each with a fresh order drawn from the same generator, until
/// one finds a solution or proves there is none.
fn sample_one(
    instance: &CspInstance,
    seed: u64,
    config: &SearchConfig,
    deadline: Option<Instant>,
) -> (u64, Option<(Vec<i64>, u64)>, u64, Status) {
    let mut rng = XorShift64Star::new(seed);
    let mut nodes = 0u64;
    for attempt in 1.. {
        let cutoff = RESTART_BASE * luby(attempt);
        let remaining = config.node_limit.map(|l| l.saturating_sub(nodes));
        let budget = remaining.map_or(cutoff, |r| r.min(cutoff));
        let mut search = Search::with_rng(
            instance,
            VarOrder::Random,
            ValueOrder::Random,
            rng,
            Some(budget),
            deadline,
        );
        let mut found = None;
        let status = search.run(true, &mut |values, at| found = Some((values.to_vec(), nodes + at)));
        nodes += search.nodes.min(budget);
        rng = search.rng;
        match status {
            Status::Complete => return (seed, found, nodes, Status::Complete),
            Status::LimitExceeded(Limit::Time) => return (seed, None, nodes, status),
            Status::LimitExceeded(Limit::Nodes) => {
                if remaining.is_some_and(|r| r <= cutoff) {
                    return (seed, None, nodes, status);
                }
            }
        }
    }
    unreachable!("the attempt counter is unbounded")
}

struct Search<'a> {
    store: DomainStore,
    engine: Engine<'a>,
    order: Vec<VarId>,
    declared: usize,
    /// Disjunct literals tried before each branching decision.
    probes: Vec<VarId>,
    rng: XorShift64Star,
    random_values: bool,
    nodes: u64,
    node_limit: Option<u64>,
    deadline: Option<Instant>,
}

impl<'a> Search<'a> {
    fn new(
        instance: &'a CspInstance,
        var_order: VarOrder,
        value_order: ValueOrder,
        seed: u64,
        config: &SearchConfig,
        deadline: Option<Instant>,
    ) -> Self {
        Self::with_rng(
            instance,
            var_order,
            value_order,
            XorShift64Star::new(seed),
            config.node_limit,
            deadline,
        )
    }

    fn with_rng(
        instance: &'a CspInstance,
        var_order: VarOrder,
        value_order: ValueOrder,
        mut rng: XorShift64Star,
        node_limit: Option<u64>,
        deadline: Option<Instant>,
    ) -> Self {
        let declared = instance.declared_count();
        let mut order: Vec<VarId> = (0..instance.vars.len()).collect();
        if var_order == VarOrder::Random {
            rng.shuffle(&mut order[..declared]);
        }
        Search {
            store: DomainStore::new(instance),
            engine: Engine::new(instance),
            order,
            declared,
            probes: probe_literals(instance),
            rng,
            random_values: value_order == ValueOrder::Random,
            nodes: 0,
            node_limit,
            deadline,
        }
    }

    /// Sets each probe literal whose truth fails under propagation to false,
    /// until nothing changes. `false` if that empties a domain.
    fn probe(&mut self) -> bool {
        loop {
            let mut changed = false;
            for k in 0..self.probes.len() {
                let b = self.probes[k];
                if self.store.is_fixed(b) {
                    continue;
                }
                self.store.push_level();
                let ok = self.store.assign(b, 1).is_ok() && self.engine.propagate_changes(&mut self.store).is_ok();
                self.store.pop_level();
                if !ok {
                    if self.store.assign(b, 0).is_err() || self.engine.propagate_changes(&mut self.store).is_err() {
                        return false;
                    }
                    changed = true;
                }
            }
            if !changed {
                return true;
            }
        }
    }

    /// Counts a node; reports an exhausted budget.
    fn tick(&mut self) -> Option<Limit> {
        self.nodes += 1;
        if self.node_limit.is_some_and(|l| self.nodes > l) {
            return Some(Limit::Nodes);
        }
        if self.nodes.is_multiple_of(256) && self.deadline.is_some_and(|d| Instant::now() >= d) {
            return Some(Limit::Time);
        }
        None
    }

    fn choose(&mut self) -> Option<(VarId, i64)> {
        let v = *self.order.iter().find(|v| !self.store.is_fixed(**v))?;
        let a = if self.random_values {
            let k = self.rng.below(self.store.size(v));
            self.store.nth_value(v, k)
        } else {
            self.store.lo(v)
        };
        Some((v, a))
    }

    /// Depth-first search; `emit` receives declared values and the node count.
    fn run(&mut self, first_only: bool, emit: &mut dyn FnMut(&[i64], u64)) -> Status {
        if let Some(l) = self.tick() {
            return Status::LimitExceeded(l);
        }
        let mut consistent = self.engine.propagate_all(&mut self.store).is_ok();
        // (var, value, exclusion branch taken)
        let mut stack: Vec<(VarId, i64, bool)> = Vec::new();
        loop {
            if consistent {
                consistent = self.probe();
            }
            if consistent {
                match self.choose() {
                    None => {
                        let values: Vec<i64> = (0..self.declared).map(|v| self.store.lo(v)).collect();
                        emit(&values, self.nodes);
                        if first_only {
                            return Status::Complete;
                        }
                    }
                    Some((v, a)) => {
                        if let Some(l) = self.tick() {
                            return Status::LimitExceeded(l);
                        }
                        self.store.push_level();
                        stack.push((v, a, false));
                        consistent =
                            self.store.assign(v, a).is_ok() && self.engine.propagate_changes(&mut self.store).is_ok();
                        continue;
                    }
                }
            }
            loop {
                match stack.pop() {
                    None => return Status::Complete,
                    Some((v, a, false)) => {
                        self.store.pop_level();
                        if let Some(l) = self.tick() {
                            return Status::LimitExceeded(l);
                        }
                        self.store.push_level();
                        stack.push((v, a, true));
                        consistent =
                            self.store.remove(v, a).is_ok() && self.engine.propagate_changes(&mut self.store).is_ok();
                        break;
                    }
                    Some((_, _, true)) => self.store.pop_level(),
                }
            }
        }
    }
}

/// Positive disjunct literals that stand for a conjunction of at least two
/// 0/1 literals, as produced for the bodies of `exists`.
fn probe_literals(instance: &CspInstance) -> Vec<VarId> {
    let mut is_conjunction = vec![false; instance.vars.len()];
    for c in &instance.constraints {
        if let FlatConstraint::ReifEq { reif, terms, .. } = c {
            is_conjunction[*reif] = terms.len() >= 2
                && terms.iter().all(|(_, v)| {
                    let info = &instance.vars[*v];
                    info.lo >= 0 && info.hi <= 1
                });
        }
    }
    let mut out = Vec::new();
    for c in &instance.constraints {
        if let FlatConstraint::Disjunction(lits) = c {
            for l in lits {
                if l.positive && is_conjunction[l.var] && !out.contains(&l.var) {
                    out.push(l.var);
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::{parse_model, validate};
    use crate::flatten::{compile, FlattenOptions};
    use crate::solver::{brute_force, check_solution, DEFAULT_BRUTE_FORCE_CAP};

    fn instance(src: &str) -> CspInstance {
        let typed = validate(&parse_model(src).unwrap(), &Default::default()).unwrap();
        compile(&typed, &FlattenOptions::default()).unwrap()
    }

    fn all(inst: &CspInstance) -> Vec<Vec<i64>> {
        let cfg = SearchConfig {
            mode: Mode::All,
            ..Default::default()
        };
        solve(inst, &cfg)
            .unwrap()
            .solutions
            .into_iter()
            .map(|s| s.values)
            .collect()
    }

    #[test]
    fn forced_chain() {
        let inst = instance("find x : [int(1..3)] of int(0..2)\nx[1] < x[2] /\\ x[2] < x[3]");
        assert_eq!(all(&inst), vec![vec![0, 1, 2]]);
    }

    #[test]
    fn x_ne_y() {
        let inst = instance("find x : int(0..1)\nfind y : int(0..1)\nx != y");
        assert_eq!(all(&inst), vec![vec![0, 1], vec![1, 0]]);
        assert_eq!(
            brute_force(&inst, DEFAULT_BRUTE_FORCE_CAP).unwrap(),
            vec![vec![0, 1], vec![1, 0]]
        );
    }

    #[test]
    fn contradiction_is_unsat() {
        let inst = instance("find x : int(0..3)\nx = 0 /\\ x = 1");
        let out = solve(&inst, &SearchConfig::default()).unwrap();
        assert!(out.is_unsat());
        assert!(brute_force(&inst, DEFAULT_BRUTE_FORCE_CAP).unwrap().is_empty());
    }

    #[test]
    fn sampling_is_deterministic_and_sound() {
        let inst = instance("find x : [int(1..4)] of int(0..5)\nallDiff([x[i] | i : int(1..4)])");
        let cfg = SearchConfig {
            mode: Mode::Sample(5),
            seed: 1,
            ..Default::default()
        };
        let a = solve(&inst, &cfg).unwrap();
        let b = solve(&inst, &cfg).unwrap();
        assert_eq!(a.solutions, b.solutions);
        assert_eq!(a.solutions.len(), 5);
        for (i, s) in a.solutions.iter().enumerate() {
            assert_eq!(s.seed, 1 + i as u64);
            assert!(check_solution(&inst, &s.values).unwrap());
        }
    }

    #[test]
    fn node_limit_reports_partial() {
        let inst = instance("find x : [int(1..6)] of int(0..5)\nallDiff([x[i] | i : int(1..6)])");
        let cfg = SearchConfig {
            mode: Mode::All,
            node_limit: Some(50),
            ..Default::default()
        };
        let out = solve(&inst, &cfg).unwrap();
        assert_eq!(out.status, Status::LimitExceeded(Limit::Nodes));
        assert!(out.solutions.len() < 720);
    }

    #[test]
    fn luby_sequence() {
        let seq: Vec<u64> = (1..=15).map(luby).collect();
        assert_eq!(seq, vec![1, 1, 2, 1, 1, 2, 4, 1, 1, 2, 1, 1, 2, 4, 8]);
    }

    #[test]
    fn empty_instance_has_one_solution() {
        let inst = CspInstance::default();
        let cfg = SearchConfig {
            mode: Mode::All,
            ..Default::default()
        };
        assert_eq!(solve(&inst, &cfg).unwrap().solutions.len(), 1);
    }
}
