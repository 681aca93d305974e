// Copyright 2026 The qualmod Authors. All rights reserved.
// Use of this source code is governed by the Apache License,
// Version 2.0, that can be found in the LICENSE file.

use super::{CompartmentModel, Provenance, QuantError, TrajectoryBundle};

/// An Euler run with its per-step flows.
///
/// For every compartment `i` and unit step `t`,
/// `values[i][t+1] - values[i][t] + loss[i][t] + transfer[i][t] -
/// transfer[i-1][t] = 0` unless a clamp event zeroed `values[i][t+1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Simulation {
    pub values: Vec<Vec<f64>>,
    /// Amount moved from compartment `i` to `i+1` during step `t`.
    pub transfer: Vec<Vec<f64>>,
    /// Amount leaving the system from compartment `i` during step `t`.
    pub loss: Vec<Vec<f64>>,
    /// Sub-steps whose result went negative and was set to 0.
    pub clamp_events: usize,
}

impl Simulation {
    pub fn into_bundle(self, names: &[&str], provenance: Provenance) -> TrajectoryBundle {
        TrajectoryBundle {
            series: names.iter().map(|n| n.to_string()).zip(self.values).collect(),
            provenance,
        }
    }
}

/// Unit-step forward Euler for `steps` steps.
pub fn euler_simulate(m: &CompartmentModel, init: &[f64], steps: usize) -> Result<Simulation, QuantError> {
    euler_simulate_substeps(m, init, steps, 1)
}

/// Forward Euler with `substeps` equal sub-steps per unit step. Values and
/// flows are reported at unit steps.
pub fn euler_simulate_substeps(
    m: &CompartmentModel,
    init: &[f64],
    steps: usize,
    substeps: usize,
) -> Result<Simulation, QuantError> {
    let n = m.compartments();
    if init.len() != n {
        return Err(QuantError::InvalidInput(format!(
            "{} initial values for {n} compartments",
            init.len()
        )));
    }
    if steps == 0 || substeps == 0 {
        return Err(QuantError::InvalidInput("steps and substeps must be at least 1".into()));
    }
    if init.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
        return Err(QuantError::InvalidInput("initial values must be nonnegative".into()));
    }
    for i in 0..n {
        let (kt, kl) = (m.transfer[i], m.loss[i]);
        if !(kt >= 0.0 && kl >= 0.0) {
            return Err(QuantError::InvalidInput(format!("negative rate in compartment {i}")));
        }
        if kt + kl > 1.0 {
            return Err(QuantError::UnstableStep {
                compartment: i,
                sum: kt + kl,
            });
        }
    }

    let h = 1.0 / substeps as f64;
    let mut values: Vec<Vec<f64>> = init.iter().map(|x| vec![*x]).collect();
    let mut transfer = vec![Vec::with_capacity(steps); n];
    let mut loss = vec![Vec::with_capacity(steps); n];
    let mut current = init.to_vec();
    let mut clamp_events = 0;
    for _ in 0..steps {
        let mut moved = vec![0.0; n];
        let mut lost = vec![0.0; n];
        for _ in 0..substeps {
            let out: Vec<f64> = (0..n).map(|i| h * m.transfer[i] * current[i]).collect();
            let gone: Vec<f64> = (0..n).map(|i| h * m.loss[i] * current[i]).collect();
            for i in 0..n {
                let inflow = if i > 0 { out[i - 1] } else { 0.0 };
                let next = current[i] - out[i] - gone[i] + inflow;
                if next < 0.0 {
                    clamp_events += 1;
                    current[i] = 0.0;
                } else {
                    current[i] = next;
                }
                moved[i] += out[i];
                lost[i] += gone[i];
            }
        }
        for i in 0..n {
            values[i].push(current[i]);
            transfer[i].push(moved[i]);
            loss[i].push(lost[i]);
        }
    }
    Ok(Simulation {
        values,
        transfer,
        loss,
        clamp_events,
    })
}
