// Copyright 2026 The qualmod Authors. All rights reserved.
// Use of this source code is governed by the Apache License,
// Version 2.0, that can be found in the LICENSE file.

//! Line-oriented solution records.
//!
//! ```text
//! sol 0 7 x[0]=0 x[1]=12 ...
//! stats nodes=418 solutions=20
//! ```
//!
//! Names appear in declaration order.

use crate::flatten::CspInstance;

use super::{SearchStats, Solution};

pub fn format_solution(instance: &CspInstance, sol: &Solution) -> String {
    let mut line = format!("sol {} {}", sol.index, sol.seed);
    for (info, x) in instance.vars.iter().zip(&sol.values) {
        line.push(' ');
        line.push_str(&info.name);
        line.push('=');
        line.push_str(&x.to_string());
    }
    line
}

/// The stats line; `time_ms` is included only when asked for, so that
/// files can stay byte-identical across runs.
pub fn format_stats(stats: &SearchStats, with_time: bool) -> String {
    let mut line = format!("stats nodes={} solutions={}", stats.nodes, stats.solutions);
    if with_time {
        line.push_str(&format!(" time_ms={}", stats.time_ms));
    }
    line
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolutionRecord {
    pub index: usize,
    pub seed: u64,
    pub values: Vec<(String, i64)>,
}

/// Parses one `sol` line; `None` for any other line.
pub fn parse_solution(line: &str) -> Option<SolutionRecord> {
    let mut parts = line.split_whitespace();
    if parts.next()? != "sol" {
        return None;
    }
    let index = parts.next()?.parse().ok()?;
    let seed = parts.next()?.parse().ok()?;
    let values = parts
        .map(|p| {
            let (name, value) = p.rsplit_once('=')?;
            Some((name.to_string(), value.parse().ok()?))
        })
        .collect::<Option<Vec<_>>>()?;
    Some(SolutionRecord { index, seed, values })
}
