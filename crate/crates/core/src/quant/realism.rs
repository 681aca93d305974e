// Copyright 2026 The qualmod Authors. All rights reserved.
// Use of this source code is governed by the Apache License,
// Version 2.0, that can be found in the LICENSE file.

use std::fmt;
use std::str::FromStr;

use super::{QuantError, TrajectoryBundle};

/// Tolerance for "equals" facts on real-valued trajectories.
const VALUE_TOL: f64 = 1e-9;

/// A time index, counted from the start or pinned to the last step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactIndex {
    At(i64),
    End,
}

impl FactIndex {
    fn resolve(self, series: &str, len: usize) -> Result<usize, QuantError> {
        let index = match self {
            FactIndex::At(i) => i,
            FactIndex::End => len as i64 - 1,
        };
        if index < 0 || index as usize >= len {
            return Err(QuantError::FactIndexOutOfRange {
                series: series.to_string(),
                index,
                len,
            });
        }
        Ok(index as usize)
    }
}

impl fmt::Display for FactIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FactIndex::At(i) => write!(f, "{i}"),
            FactIndex::End => f.write_str("end"),
        }
    }
}

/// A checkable boundary fact about one series.
#[derive(Debug, Clone, PartialEq)]
pub enum Fact {
    /// The value at `index` equals `value`.
    ValueAt {
        series: String,
        index: FactIndex,
        value: f64,
    },
    /// The value at `index` is strictly below `value`.
    Below {
        series: String,
        index: FactIndex,
        value: f64,
    },
    /// The first index of the maximum lies in `lo..=hi`.
    PeakWindow { series: String, lo: i64, hi: i64 },
}

impl Fact {
    fn series(&self) -> &str {
        match self {
            Fact::ValueAt { series, .. } | Fact::Below { series, .. } | Fact::PeakWindow { series, .. } => series,
        }
    }

    fn holds(&self, values: &[f64]) -> Result<bool, QuantError> {
        let name = self.series();
        Ok(match self {
            Fact::ValueAt { index, value, .. } => {
                (values[index.resolve(name, values.len())?] - value).abs() <= VALUE_TOL
            }
            Fact::Below { index, value, .. } => values[index.resolve(name, values.len())?] < *value,
            Fact::PeakWindow { lo, hi, .. } => {
                FactIndex::At(*lo).resolve(name, values.len())?;
                FactIndex::At(*hi).resolve(name, values.len())?;
                let mut arg = 0;
                for (i, v) in values.iter().enumerate() {
                    if *v > values[arg] {
                        arg = i;
                    }
                }
                (*lo..=*hi).contains(&(arg as i64))
            }
        })
    }
}

impl fmt::Display for Fact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Fact::ValueAt { series, index, value } if *value == 0.0 => write!(f, "zero_at {series} {index}"),
            Fact::ValueAt { series, index, value } => write!(f, "value_at {series} {index} {value}"),
            Fact::Below { series, index, value } => write!(f, "below {series} {index} {value}"),
            Fact::PeakWindow { series, lo, hi } => write!(f, "peak_window {series} {lo} {hi}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RealismReport {
    /// Satisfied facts over all facts.
    pub score: f64,
    /// Per-fact outcome, in the order given.
    pub satisfied: Vec<bool>,
}

pub fn realism_score(traj: &TrajectoryBundle, facts: &[Fact]) -> Result<RealismReport, QuantError> {
    if facts.is_empty() {
        return Err(QuantError::EmptyFactSet);
    }
    let mut satisfied = Vec::with_capacity(facts.len());
    for fact in facts {
        let values = traj.get(fact.series()).ok_or_else(|| QuantError::MissingFact {
            series: fact.series().to_string(),
        })?;
        satisfied.push(fact.holds(values)?);
    }
    let hits = satisfied.iter().filter(|s| **s).count();
    Ok(RealismReport {
        score: hits as f64 / facts.len() as f64,
        satisfied,
    })
}

/// Equation classes of candidate models, from easiest to hardest to solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ModelClass {
    LinearOde,
    PiecewiseLinearOde,
    QuadraticOde,
    NonlinearOde,
    Pde,
}

impl ModelClass {
    pub const ALL: [ModelClass; 5] = [
        ModelClass::LinearOde,
        ModelClass::PiecewiseLinearOde,
        ModelClass::QuadraticOde,
        ModelClass::NonlinearOde,
        ModelClass::Pde,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            ModelClass::LinearOde => "linear-ODE",
            ModelClass::PiecewiseLinearOde => "piecewise-linear-ODE",
            ModelClass::QuadraticOde => "quadratic-ODE",
            ModelClass::NonlinearOde => "nonlinear-ODE",
            ModelClass::Pde => "PDE",
        }
    }

    /// 1 for linear ODEs up to 5 for PDEs.
    pub fn grade(self) -> u8 {
        self as u8 + 1
    }
}

impl FromStr for ModelClass {
    type Err = QuantError;

    fn from_str(s: &str) -> Result<Self, QuantError> {
        ModelClass::ALL
            .into_iter()
            .find(|c| c.tag() == s)
            .ok_or_else(|| QuantError::UnknownClass(s.to_string()))
    }
}

pub fn complexity_grade(class: &str) -> Result<u8, QuantError> {
    Ok(class.parse::<ModelClass>()?.grade())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quant::Provenance;

    fn traj(values: Vec<f64>) -> TrajectoryBundle {
        TrajectoryBundle {
            series: vec![("F0".into(), values)],
            provenance: Provenance::default(),
        }
    }

    fn defaults() -> Vec<Fact> {
        vec![
            Fact::ValueAt {
                series: "F0".into(),
                index: FactIndex::At(0),
                value: 0.0,
            },
            Fact::Below {
                series: "F0".into(),
                index: FactIndex::End,
                value: 1000.0,
            },
            Fact::PeakWindow {
                series: "F0".into(),
                lo: 1,
                hi: 2,
            },
        ]
    }

    #[test]
    fn scores() {
        let good = traj(vec![0.0, 300000.0, 300000.0, 500.0]);
        assert_eq!(realism_score(&good, &defaults()).unwrap().score, 1.0);
        let late = traj(vec![0.0, 300000.0, 300000.0, 5000.0]);
        let r = realism_score(&late, &defaults()).unwrap();
        assert!((r.score - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(r.satisfied, vec![true, false, true]);
        assert_eq!(realism_score(&good, &[]), Err(QuantError::EmptyFactSet));
    }

    #[test]
    fn index_out_of_range() {
        let fact = Fact::ValueAt {
            series: "F0".into(),
            index: FactIndex::At(9),
            value: 0.0,
        };
        assert!(matches!(
            realism_score(&traj(vec![0.0; 3]), &[fact]),
            Err(QuantError::FactIndexOutOfRange { index: 9, .. })
        ));
    }

    #[test]
    fn grades_are_ordered() {
        assert_eq!(complexity_grade("linear-ODE").unwrap(), 1);
        assert_eq!(complexity_grade("PDE").unwrap(), 5);
        assert!(complexity_grade("linear-ODE").unwrap() < complexity_grade("nonlinear-ODE").unwrap());
        assert_eq!(complexity_grade("SDE"), Err(QuantError::UnknownClass("SDE".into())));
    }
}
