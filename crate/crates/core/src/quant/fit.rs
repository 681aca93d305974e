// Copyright 2026 The qualmod Authors. All rights reserved.
// Use of this source code is governed by the Apache License,
// Version 2.0, that can be found in the LICENSE file.

//! Least-squares rate fitting.
//!
//! The Euler step equations are linear in the rates, so each observed
//! difference `F[i](t+1) - F[i](t)` gives one row of a linear system in the
//! free rates. The system is solved by SVD; rates driven negative are
//! pinned to zero and the rest refitted until all are nonnegative.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};

use super::{CompartmentModel, QuantError, TrajectoryBundle};

/// Relative singular-value cutoff for rank decisions.
const RANK_TOL: f64 = 1e-10;
/// A null-space component above this marks a rate as unidentifiable.
const NULL_TOL: f64 = 1e-6;
/// Negative estimates above this are treated as round-off zeros.
const CLIP_TOL: f64 = 1e-12;

/// Which rates are free, per compartment in chain order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FitStructure {
    pub compartments: Vec<CompartmentFit>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompartmentFit {
    pub series: String,
    pub transfer: bool,
    pub loss: bool,
}

impl FitStructure {
    /// Names of the free rates, `kT<i>` before `kL<i>`.
    pub fn free_params(&self) -> Vec<String> {
        self.params().into_iter().map(|(n, _, _)| n).collect()
    }

    fn params(&self) -> Vec<(String, usize, bool)> {
        let mut out = Vec::new();
        for (i, c) in self.compartments.iter().enumerate() {
            if c.transfer {
                out.push((format!("kT{i}"), i, true));
            }
            if c.loss {
                out.push((format!("kL{i}"), i, false));
            }
        }
        out
    }
}

/// `F0:TL,F1:T,F2:T`: series names in chain order, each with the letters
/// of its free rates (`-` for none).
impl FromStr for FitStructure {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let mut compartments = Vec::new();
        for part in s.split(',') {
            let (series, flags) = part
                .split_once(':')
                .ok_or_else(|| format!("`{part}` is not series:flags"))?;
            if series.is_empty() {
                return Err(format!("missing series name in `{part}`"));
            }
            if !flags.chars().all(|c| matches!(c, 'T' | 'L' | '-')) {
                return Err(format!("flags `{flags}` may only contain T, L or -"));
            }
            compartments.push(CompartmentFit {
                series: series.to_string(),
                transfer: flags.contains('T'),
                loss: flags.contains('L'),
            });
        }
        Ok(FitStructure { compartments })
    }
}

impl fmt::Display for FitStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, c) in self.compartments.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            let flags = match (c.transfer, c.loss) {
                (true, true) => "TL",
                (true, false) => "T",
                (false, true) => "L",
                (false, false) => "-",
            };
            write!(f, "{}:{flags}", c.series)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateFit {
    pub model: CompartmentModel,
    pub structure: FitStructure,
    /// Root-mean-square residual over all fitted step equations.
    pub residual: f64,
    /// Free rates pinned to zero by the nonnegativity refits.
    pub clipped: Vec<String>,
}

/// Fits the free rates of `structure` to the trajectory.
///
/// When some free rates cannot be separated (for example transfer and
/// loss out of a compartment whose successor is not observed), returns
/// `Unidentifiable` carrying the minimum-norm fit.
pub fn fit_rates(traj: &TrajectoryBundle, structure: &FitStructure) -> Result<RateFit, QuantError> {
    let n = structure.compartments.len();
    if n == 0 {
        return Err(QuantError::InvalidInput("structure has no compartments".into()));
    }
    let series: Vec<&[f64]> = structure
        .compartments
        .iter()
        .map(|c| {
            traj.get(&c.series)
                .ok_or_else(|| QuantError::InvalidInput(format!("trajectory has no series `{}`", c.series)))
        })
        .collect::<Result<_, _>>()?;
    let len = series[0].len();
    if series.iter().any(|s| s.len() != len) {
        return Err(QuantError::InvalidInput("series lengths differ".into()));
    }
    if len < 3 {
        return Err(QuantError::InvalidInput(format!(
            "trajectory of length {len} is shorter than 3"
        )));
    }
    if series.iter().any(|s| s.iter().any(|x| !x.is_finite())) {
        return Err(QuantError::InvalidInput("trajectory has non-finite values".into()));
    }

    let params = structure.params();
    let rows = n * (len - 1);
    let mut design = DMatrix::<f64>::zeros(rows.max(params.len()), params.len());
    let mut target = DVector::<f64>::zeros(rows.max(params.len()));
    for i in 0..n {
        for t in 0..len - 1 {
            let row = i * (len - 1) + t;
            target[row] = series[i][t + 1] - series[i][t];
            for (col, (_, c, is_transfer)) in params.iter().enumerate() {
                if *c == i {
                    design[(row, col)] = -series[i][t];
                } else if *is_transfer && *c + 1 == i {
                    design[(row, col)] = series[*c][t];
                }
            }
        }
    }

    let unidentifiable = null_space_params(&design)
        .into_iter()
        .map(|k| params[k].0.clone())
        .collect::<Vec<_>>();

    let mut active: Vec<usize> = (0..params.len()).collect();
    let mut clipped = Vec::new();
    let estimate = loop {
        let x = least_squares(&design, &target, &active);
        let worst = active
            .iter()
            .zip(x.iter())
            .filter(|(_, v)| **v < -CLIP_TOL)
            .min_by(|a, b| a.1.total_cmp(b.1))
            .map(|(k, _)| *k);
        match worst {
            Some(k) => {
                active.retain(|a| *a != k);
                clipped.push(params[k].0.clone());
            }
            None => {
                let mut full = vec![0.0; params.len()];
                for (k, v) in active.iter().zip(x.iter()) {
                    full[*k] = v.max(0.0);
                }
                break full;
            }
        }
    };

    let mut model = CompartmentModel::new(vec![0.0; n], vec![0.0; n]);
    for ((_, c, is_transfer), v) in params.iter().zip(&estimate) {
        if *is_transfer {
            model.transfer[*c] = *v;
        } else {
            model.loss[*c] = *v;
        }
    }
    let fitted = &design * DVector::from_vec(estimate);
    let sq: f64 = (0..rows).map(|r| (target[r] - fitted[r]).powi(2)).sum();
    let fit = RateFit {
        model,
        structure: structure.clone(),
        residual: (sq / rows as f64).sqrt(),
        clipped,
    };
    if unidentifiable.is_empty() {
        Ok(fit)
    } else {
        Err(QuantError::Unidentifiable {
            params: unidentifiable,
            partial: Box::new(fit),
        })
    }
}

/// Column indices with a component in the numerical null space.
fn null_space_params(design: &DMatrix<f64>) -> Vec<usize> {
    let p = design.ncols();
    if p == 0 {
        return Vec::new();
    }
    let svd = design.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let smax = svd.singular_values.max();
    let mut flagged = vec![false; p];
    for (k, s) in svd.singular_values.iter().enumerate() {
        if *s <= RANK_TOL * smax.max(f64::MIN_POSITIVE) {
            for (j, f) in flagged.iter_mut().enumerate() {
                *f |= v_t[(k, j)].abs() > NULL_TOL;
            }
        }
    }
    (0..p).filter(|j| flagged[*j]).collect()
}

/// Minimum-norm least squares on the chosen columns.
fn least_squares(design: &DMatrix<f64>, target: &DVector<f64>, columns: &[usize]) -> Vec<f64> {
    if columns.is_empty() {
        return Vec::new();
    }
    let sub = design.select_columns(columns);
    let svd = sub.svd(true, true);
    let smax = svd.singular_values.max();
    if smax == 0.0 {
        return vec![0.0; columns.len()];
    }
    let x = svd.solve(target, RANK_TOL * smax).expect("U and V^T were computed");
    x.iter().copied().collect()
}
