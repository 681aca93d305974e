// Copyright 2026 The qualmod Authors. All rights reserved.
// Use of this source code is governed by the Apache License,
// Version 2.0, that can be found in the LICENSE file.

use std::collections::BTreeMap;

use super::{Provenance, QuantError, TrajectoryBundle};

/// A percent-of-peak series taken from a solution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PercentSeries {
    pub name: String,
    pub values: Vec<i64>,
}

/// `absolute[i] = percent[i] · peak / 100` for every series, using the
/// peak absolute value given for that series.
pub fn scale_trajectory(
    series: &[PercentSeries],
    peaks: &BTreeMap<String, f64>,
    provenance: Provenance,
) -> Result<TrajectoryBundle, QuantError> {
    let mut out: Vec<(String, Vec<f64>)> = Vec::with_capacity(series.len());
    for s in series {
        let peak = *peaks
            .get(&s.name)
            .ok_or_else(|| QuantError::MissingFact { series: s.name.clone() })?;
        if !(peak.is_finite() && peak >= 0.0) {
            return Err(QuantError::InvalidInput(format!(
                "peak of `{}` must be nonnegative",
                s.name
            )));
        }
        if s.values.iter().any(|v| *v < 0) {
            return Err(QuantError::InvalidInput(format!("negative percentage in `{}`", s.name)));
        }
        out.push((
            s.name.clone(),
            s.values.iter().map(|p| *p as f64 * peak / 100.0).collect(),
        ));
    }
    if out.windows(2).any(|w| w[0].1.len() != w[1].1.len()) {
        return Err(QuantError::InvalidInput("series lengths differ".into()));
    }
    Ok(TrajectoryBundle {
        series: out,
        provenance,
    })
}
