// Copyright 2026 The qualmod Authors. All rights reserved.
// Use of this source code is governed by the Apache License,
// Version 2.0, that can be found in the LICENSE file.

//! Direct evaluation of the qualitative predicates over explicit series
//! vectors, for comparison with the compiled builders.

use std::collections::{BTreeMap, BTreeSet};

use qualmod::dsl::{validate, ModelAST};
use qualmod::flatten::{compile, FlattenOptions};
use qualmod::qm::{derivative_chain, SeriesSpec};
use qualmod::solver::{solve, Mode, SearchConfig, Status};

pub fn first(x: &[i64]) -> Vec<i64> {
    // index 0 unused so y[i] lines up with x[i] - x[i-1]
    let mut y = vec![0];
    y.extend(x.windows(2).map(|w| w[1] - w[0]));
    y
}

pub fn second(y: &[i64]) -> Vec<i64> {
    let mut z = vec![0];
    z.extend((1..y.len() - 1).map(|j| y[j + 1] - y[j]));
    z
}

/// Every value vector of `s` whose differences stay within `-r..r` up to
/// `order`.
pub fn chain_vectors(s: &SeriesSpec, order: u8) -> Vec<Vec<i64>> {
    let n = (s.max + 1) as usize;
    let mut out = Vec::new();
    let mut x = vec![0; n];
    loop {
        let y = first(&x);
        let z = second(&y);
        let ok = (order < 1 || y[1..].iter().all(|d| d.abs() <= s.r))
            && (order < 2 || z[1..].iter().all(|d| d.abs() <= s.r));
        if ok {
            out.push(x.clone());
        }
        let mut k = 0;
        loop {
            if k == n {
                return out;
            }
            if x[k] < s.scale {
                x[k] += 1;
                break;
            }
            x[k] = 0;
            k += 1;
        }
    }
}

pub fn peak(s: &SeriesSpec, x: &[i64], lo: i64, hi: i64) -> bool {
    let y = first(x);
    (lo..=hi).any(|p| {
        let p = p as usize;
        (1..=s.max as usize).all(|i| (i >= p || y[i] > 0) && (i <= p || y[i] < 0)) && x[p] == s.scale && y[p] == 0
    })
}

pub fn zero_until(x: &[i64], t: i64) -> bool {
    x[..=t as usize].iter().all(|v| *v == 0)
}

pub fn smooth(s: &SeriesSpec, x: &[i64], bound: i64, from: i64) -> bool {
    let z = second(&first(x));
    ((from + 1).max(1)..s.max).all(|i| z[i as usize].abs() < bound)
}

pub fn coupled(a: &SeriesSpec, xa: &[i64], b: &SeriesSpec, xb: &[i64], lag: i64, pct: i64, slack: i64) -> bool {
    let (ya, yb) = (first(xa), first(xb));
    let last = b.max.min(a.max + lag);
    let signs = (lag + 1..=last).all(|i| ya[(i - lag) as usize].signum() == yb[i as usize].signum());
    let cap = (lag..=last).all(|i| 100 * xb[i as usize] <= pct * xa[(i - lag) as usize] + slack);
    signs && cap
}

/// Value vectors of the named series over all solutions of `model`, one
/// entry per solution (duplicates kept so counts can be compared).
pub fn solved_series(model: &ModelAST, series: &[&str]) -> Vec<Vec<i64>> {
    let typed = validate(model, &BTreeMap::new()).unwrap();
    let inst = compile(&typed, &FlattenOptions::default()).unwrap();
    let cfg = SearchConfig {
        mode: Mode::All,
        ..Default::default()
    };
    let out = solve(&inst, &cfg).unwrap();
    assert_eq!(out.status, Status::Complete);
    let cells: Vec<usize> = series.iter().flat_map(|s| inst.series(s).unwrap()).collect();
    out.solutions
        .iter()
        .map(|sol| cells.iter().map(|v| sol.values[*v]).collect())
        .collect()
}

/// Builder output versus oracle: equal counts and equal sets.
pub fn same(builder: Vec<Vec<i64>>, oracle: Vec<Vec<i64>>) -> Result<usize, String> {
    let bset: BTreeSet<_> = builder.iter().cloned().collect();
    let oset: BTreeSet<_> = oracle.iter().cloned().collect();
    if builder.len() != oracle.len() {
        return Err(format!(
            "counts differ: builder {} oracle {}",
            builder.len(),
            oracle.len()
        ));
    }
    if bset != oset {
        return Err(format!(
            "sets differ: {} only in builder, {} only in oracle",
            bset.difference(&oset).count(),
            oset.difference(&bset).count()
        ));
    }
    Ok(builder.len())
}

pub fn with_chain(s: &SeriesSpec, order: u8, extra: ModelAST) -> ModelAST {
    let mut m = derivative_chain(s, order).unwrap();
    m.extend(extra);
    m
}

/// Checks every builder against direct evaluation for the horizons
/// 2..=max_horizon. Returns one line per comparison.
pub fn check_all_builders(max_horizon: i64) -> Result<Vec<String>, String> {
    use qualmod::qm::{lagged_coupling, smoothness_bound, unique_peak, zero_until as zero_builder};

    let mut report = Vec::new();
    let mut record = |what: String, result: Result<usize, String>| match result {
        Ok(n) => {
            report.push(format!("{what}: {n} solutions"));
            Ok(())
        }
        Err(e) => Err(format!("{what}: {e}")),
    };
    for max in 2..=max_horizon {
        let scale = if max <= 4 { 3 } else { 2 };
        let s = SeriesSpec::new("F", max, scale).with_scale(scale);
        for order in 0..=2u8 {
            if max < order as i64 + 1 {
                continue;
            }
            let built = solved_series(&derivative_chain(&s, order).unwrap(), &["F"]);
            record(
                format!("chain max={max} order={order}"),
                same(built, chain_vectors(&s, order)),
            )?;
        }
        let ord = if max >= 3 { 2 } else { 1 };
        let base = chain_vectors(&s, ord);
        for (lo, hi) in [(1, max), (1, 1), (max / 2, max - 1)] {
            if lo < 1 || lo > hi {
                continue;
            }
            let built = solved_series(&with_chain(&s, ord, unique_peak(&s, (lo, hi)).unwrap()), &["F"]);
            let want = base.iter().filter(|x| peak(&s, x, lo, hi)).cloned().collect();
            record(format!("peak max={max} window={lo}..{hi}"), same(built, want))?;
        }
        for t in [0, max / 2, max] {
            let built = solved_series(&with_chain(&s, ord, zero_builder(&s, t).unwrap()), &["F"]);
            let want = base.iter().filter(|x| zero_until(x, t)).cloned().collect();
            record(format!("zero_until max={max} t={t}"), same(built, want))?;
        }
        for (bound, from) in [(1, 0), (2, 1), (1, max)].into_iter().filter(|_| ord == 2) {
            let built = solved_series(&with_chain(&s, 2, smoothness_bound(&s, bound, from).unwrap()), &["F"]);
            let want = base.iter().filter(|x| smooth(&s, x, bound, from)).cloned().collect();
            record(format!("smooth max={max} bound={bound} from={from}"), same(built, want))?;
        }
        // two series: keep the joint space small
        let cscale = if max <= 3 { 2 } else { 1 };
        let a = SeriesSpec::new("A", max, cscale).with_scale(cscale).with_order(1);
        let b = SeriesSpec::new("B", max, cscale).with_scale(cscale).with_order(1);
        let (va, vb) = (chain_vectors(&a, 1), chain_vectors(&b, 1));
        for (lag, pct, slack) in [(0, 100, 0), (1, 50, 0), (1, 100, 40), (max - 1, 100, 0)] {
            let mut m = with_chain(&a, 1, derivative_chain(&b, 1).unwrap());
            m.extend(lagged_coupling(&a, &b, lag, pct, slack).unwrap());
            let built = solved_series(&m, &["A", "B"]);
            let mut want = Vec::new();
            for xa in &va {
                for xb in &vb {
                    if coupled(&a, xa, &b, xb, lag, pct, slack) {
                        want.push(xa.iter().chain(xb).copied().collect());
                    }
                }
            }
            record(
                format!("coupling max={max} lag={lag} scale={pct} slack={slack}"),
                same(built, want),
            )?;
        }
    }
    Ok(report)
}
