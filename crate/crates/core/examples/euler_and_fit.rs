// Copyright 2026 The qualmod Authors. All rights reserved.
// Use of this source code is governed by the Apache License,
// Version 2.0, that can be found in the LICENSE file.

//! Simulate a three-compartment chain and recover its rates.
//!
//! cargo run --example euler_and_fit

use qualmod::quant::{
    euler_simulate, euler_simulate_substeps, fit_rates, CompartmentModel, FitStructure, Provenance, QuantError,
};

fn main() -> Result<(), QuantError> {
    let truth = CompartmentModel::new(vec![0.08, 0.05, 0.1], vec![0.02, 0.01, 0.0]);
    let init = [1000.0, 0.0, 0.0];
    let sim = euler_simulate(&truth, &init, 15)?;
    for (t, f0) in sim.values[0].iter().enumerate().step_by(5) {
        println!(
            "t={t:>2} F0={f0:8.2} F1={:8.2} F2={:8.2}",
            sim.values[1][t], sim.values[2][t]
        );
    }

    // finer internal steps approach the exact exponential decay
    let exact = 1000.0 * (-0.1f64 * 15.0).exp();
    for substeps in [1, 2, 4, 8] {
        let v = euler_simulate_substeps(&truth, &init, 15, substeps)?.values[0][15];
        println!("substeps={substeps}: error {:.4}", (v - exact).abs());
    }

    let structure: FitStructure = "F0:TL,F1:TL,F2:T".parse().unwrap();
    let traj = sim.into_bundle(&["F0", "F1", "F2"], Provenance::default());
    let fit = fit_rates(&traj, &structure)?;
    println!("fitted transfer {:?}", fit.model.transfer);
    println!("fitted loss     {:?}", fit.model.loss);
    println!("residual {:e}", fit.residual);

    // one compartment alone cannot separate transfer from loss
    let lone = euler_simulate(&CompartmentModel::new(vec![0.05], vec![0.05]), &[100.0], 10)?
        .into_bundle(&["F0"], Provenance::default());
    if let Err(QuantError::Unidentifiable { params, partial }) = fit_rates(&lone, &"F0:TL".parse().unwrap()) {
        println!(
            "unidentifiable {params:?}; total outflow {:.3}",
            partial.model.transfer[0] + partial.model.loss[0]
        );
    }
    Ok(())
}
