// Copyright 2026 The qualmod Authors. All rights reserved.
// Use of this source code is governed by the Apache License,
// Version 2.0, that can be found in the LICENSE file.

//! Text formats: fit records and facts files.
//!
//! ```text
//! fit 3:12 kT0=0.25 kL0=0.25 kT1=0.5 kL1=0 residual=0 realism=1 grade=1
//! ```
//!
//! After ranking each record ends with `front=1` or `front=0`.

use std::collections::BTreeMap;

use super::{Fact, FactIndex};

#[derive(Debug, Clone, PartialEq)]
pub struct FitRecord {
    /// `solution:seed`
    pub provenance: String,
    pub rates: Vec<(String, f64)>,
    pub residual: f64,
    pub realism: f64,
    pub grade: u8,
    pub front: Option<bool>,
}

/// Plain decimal for ordinary magnitudes, exponent form otherwise; both
/// round-trip exactly.
fn number(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-4..1e15).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

pub fn format_fit_record(r: &FitRecord) -> String {
    let mut line = format!("fit {}", r.provenance);
    for (name, v) in &r.rates {
        line.push_str(&format!(" {name}={}", number(*v)));
    }
    line.push_str(&format!(
        " residual={} realism={} grade={}",
        number(r.residual),
        number(r.realism),
        r.grade
    ));
    if let Some(front) = r.front {
        line.push_str(if front { " front=1" } else { " front=0" });
    }
    line
}

pub fn parse_fit_record(line: &str) -> Result<FitRecord, String> {
    let mut words = line.split_whitespace();
    if words.next() != Some("fit") {
        return Err("expected a `fit` record".into());
    }
    let provenance = words.next().ok_or("missing provenance")?.to_string();
    let mut rates = Vec::new();
    let (mut residual, mut realism, mut grade, mut front) = (None, None, None, None);
    for w in words {
        let (k, v) = w.split_once('=').ok_or_else(|| format!("`{w}` is not key=value"))?;
        let real = || {
            v.parse::<f64>()
                .map_err(|_| format!("`{k}` has a malformed number `{v}`"))
        };
        match k {
            "residual" => residual = Some(real()?),
            "realism" => realism = Some(real()?),
            "grade" => grade = Some(v.parse::<u8>().map_err(|_| format!("malformed grade `{v}`"))?),
            "front" => {
                front = Some(match v {
                    "1" => true,
                    "0" => false,
                    _ => return Err(format!("malformed front flag `{v}`")),
                })
            }
            _ if k.starts_with("kT") || k.starts_with("kL") => rates.push((k.to_string(), real()?)),
            _ => return Err(format!("unknown field `{k}`")),
        }
    }
    Ok(FitRecord {
        provenance,
        rates,
        residual: residual.ok_or("missing residual")?,
        realism: realism.ok_or("missing realism")?,
        grade: grade.ok_or("missing grade")?,
        front,
    })
}

/// Peak absolutes for scaling plus boundary facts for scoring.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FactsFile {
    pub peaks: BTreeMap<String, f64>,
    pub facts: Vec<Fact>,
}

/// Parses `peak S abs`, `zero_at S i`, `value_at S i v`, `below S i|end v`
/// and `peak_window S lo hi` lines. `#` starts a comment.
pub fn parse_facts(text: &str) -> Result<FactsFile, String> {
    let mut out = FactsFile::default();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let at = |m: String| format!("line {}: {m}", n + 1);
        let w: Vec<&str> = line.split_whitespace().collect();
        let arity = |k: usize| {
            if w.len() == k + 1 {
                Ok(())
            } else {
                Err(at(format!("`{}` takes {k} arguments", w[0])))
            }
        };
        let real = |s: &str| s.parse::<f64>().map_err(|_| at(format!("malformed number `{s}`")));
        let int = |s: &str| s.parse::<i64>().map_err(|_| at(format!("malformed index `{s}`")));
        let index = |s: &str| {
            if s == "end" {
                Ok(FactIndex::End)
            } else {
                int(s).map(FactIndex::At)
            }
        };
        let series = || w[1].to_string();
        match w[0] {
            "peak" => {
                arity(2)?;
                out.peaks.insert(series(), real(w[2])?);
            }
            "zero_at" => {
                arity(2)?;
                out.facts.push(Fact::ValueAt {
                    series: series(),
                    index: index(w[2])?,
                    value: 0.0,
                });
            }
            "value_at" => {
                arity(3)?;
                out.facts.push(Fact::ValueAt {
                    series: series(),
                    index: index(w[2])?,
                    value: real(w[3])?,
                });
            }
            "below" => {
                arity(3)?;
                out.facts.push(Fact::Below {
                    series: series(),
                    index: index(w[2])?,
                    value: real(w[3])?,
                });
            }
            "peak_window" => {
                arity(3)?;
                out.facts.push(Fact::PeakWindow {
                    series: series(),
                    lo: int(w[2])?,
                    hi: int(w[3])?,
                });
            }
            other => return Err(at(format!("unknown fact `{other}`"))),
        }
    }
    Ok(out)
}
