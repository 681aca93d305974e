// Copyright 2026 The qualmod Authors. All rights reserved.
// Use of this source code is governed by the Apache License,
// Version 2.0, that can be found in the LICENSE file.

//! From sampled qualitative solutions to graded quantitative candidates.
//!
//! The quantitative models are compartmental: populations `F0..F(n-1)`
//! where a fraction `kT[i]` of `F[i]` moves to `F[i+1]` each step and a
//! fraction `kL[i]` leaves the system. One unit Euler step is
//!
//! ```text
//! F[i](t+1) = F[i](t) - (kT[i] + kL[i])·F[i](t) + kT[i-1]·F[i-1](t)
//! ```
//!
//! with the inflow term absent for `F0`, and `kT` of the last compartment
//! an outflow to a released sink.

mod fit;
mod rank;
mod realism;
mod report;
mod scale;
mod simulate;

use thiserror::Error;

pub use fit::{fit_rates, FitStructure, RateFit};
pub use rank::{dominates, rank_candidates, Ranking};
pub use realism::{complexity_grade, realism_score, Fact, FactIndex, ModelClass, RealismReport};
pub use report::{format_fit_record, parse_facts, parse_fit_record, FactsFile, FitRecord};
pub use scale::{scale_trajectory, PercentSeries};
pub use simulate::{euler_simulate, euler_simulate_substeps, Simulation};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuantError {
    #[error("no peak value for series `{series}`")]
    MissingFact { series: String },
    #[error("rate sum {sum} of compartment {compartment} exceeds 1")]
    UnstableStep { compartment: usize, sum: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("rates {params:?} are not identifiable from this trajectory")]
    Unidentifiable {
        params: Vec<String>,
        /// Minimum-norm fit on the identifiable subspace.
        partial: Box<RateFit>,
    },
    #[error("fact set is empty")]
    EmptyFactSet,
    #[error("fact index {index} outside 0..{len} for `{series}`")]
    FactIndexOutOfRange { series: String, index: i64, len: usize },
    #[error("unknown model class `{0}`")]
    UnknownClass(String),
}

/// Transfer and loss fractions per step, one pair per compartment.
#[derive(Debug, Clone, PartialEq)]
pub struct CompartmentModel {
    pub transfer: Vec<f64>,
    pub loss: Vec<f64>,
}

impl CompartmentModel {
    pub fn new(transfer: Vec<f64>, loss: Vec<f64>) -> Self {
        assert_eq!(
            transfer.len(),
            loss.len(),
            "one transfer and one loss rate per compartment"
        );
        CompartmentModel { transfer, loss }
    }

    pub fn compartments(&self) -> usize {
        self.transfer.len()
    }
}

/// Where a trajectory came from.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Provenance {
    pub solution: Option<usize>,
    pub seed: Option<u64>,
    /// Facts used to scale it, as written in the facts file.
    pub facts: Vec<String>,
}

impl Provenance {
    /// `index:seed`, `-` for unknown parts.
    pub fn label(&self) -> String {
        let part = |x: Option<String>| x.unwrap_or_else(|| "-".into());
        format!(
            "{}:{}",
            part(self.solution.map(|s| s.to_string())),
            part(self.seed.map(|s| s.to_string()))
        )
    }
}

/// Named absolute-valued series of equal length.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrajectoryBundle {
    pub series: Vec<(String, Vec<f64>)>,
    pub provenance: Provenance,
}

impl TrajectoryBundle {
    pub fn get(&self, name: &str) -> Option<&[f64]> {
        self.series.iter().find(|(n, _)| n == name).map(|(_, v)| v.as_slice())
    }

    pub fn len(&self) -> usize {
        self.series.first().map_or(0, |(_, v)| v.len())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// A scored quantitative candidate.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub fit: RateFit,
    pub realism: f64,
    pub grade: u8,
    pub provenance: Provenance,
    /// Non-fatal problems, such as unidentifiable rates.
    pub warnings: Vec<String>,
}
