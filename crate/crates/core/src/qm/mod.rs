// Copyright 2026 The qualmod Authors. All rights reserved.
// Use of this source code is governed by the Apache License,
// Version 2.0, that can be found in the LICENSE file.

//! Builders for behavioural idioms over named population series.
//!
//! A series `F` over time steps `0..=max` is declared as `F` (percent of
//! peak, `0..=scale`), its backward first difference `F_d1[i] = F[i] -
//! F[i-1]` over `1..=max`, and its second difference `F_d2[j] = F_d1[j+1] -
//! F_d1[j]` over `1..=max-1`, both with domain `-r..=r`. The builders
//! return model fragments that [`assemble`] joins into one model.
//!
//! [`unique_peak`] pins `F_d1[p] = 0` at the peak, so every accepted peak
//! is a plateau of at least two steps; a sharp single-step peak is never
//! a solution.

mod builders;
mod spec_file;

use std::collections::BTreeMap;

use thiserror::Error;

pub use builders::{assemble, derivative_chain, lagged_coupling, smoothness_bound, unique_peak, zero_until};
pub use spec_file::parse_qualspec;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QmError {
    #[error("series `{series}`: horizon {max} too short for derivative order {order}")]
    HorizonTooShort { series: String, max: i64, order: u8 },
    #[error("series `{series}` has no first difference declared")]
    RequiresFirstDerivative { series: String },
    #[error("series `{series}` has no second difference declared")]
    RequiresSecondDerivative { series: String },
    #[error("lag {lag} is not below the shorter horizon {horizon}")]
    LagTooLarge { lag: i64, horizon: i64 },
    #[error("unknown series `{name}`")]
    UnknownSeries { name: String },
    #[error("series `{name}` declared twice")]
    DuplicateSeries { name: String },
    #[error("series `{series}` has no landmark `{name}`")]
    UnknownLandmark { series: String, name: String },
    #[error("{0}")]
    OutOfRange(String),
    #[error("invalid series: {0}")]
    InvalidSeries(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// A discretised population series.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeriesSpec {
    pub name: String,
    /// Last time index; values exist at `0..=max`.
    pub max: i64,
    /// Bound on first and second differences.
    pub r: i64,
    /// Value at the peak; the domain is `0..=scale`.
    pub scale: i64,
    /// Number of difference series declared (0, 1 or 2).
    pub order: u8,
    pub landmarks: BTreeMap<String, i64>,
}

impl SeriesSpec {
    /// A series with scale 100, both differences, and no landmarks.
    pub fn new(name: impl Into<String>, max: i64, r: i64) -> Self {
        SeriesSpec {
            name: name.into(),
            max,
            r,
            scale: 100,
            order: 2,
            landmarks: BTreeMap::new(),
        }
    }

    pub fn with_scale(mut self, scale: i64) -> Self {
        self.scale = scale;
        self
    }

    pub fn with_order(mut self, order: u8) -> Self {
        self.order = order;
        self
    }

    pub fn with_landmark(mut self, name: impl Into<String>, index: i64) -> Self {
        self.landmarks.insert(name.into(), index);
        self
    }

    /// Name of the value matrix.
    pub fn values(&self) -> String {
        self.name.clone()
    }

    /// Name of the first-difference matrix.
    pub fn first_difference(&self) -> String {
        format!("{}_d1", self.name)
    }

    /// Name of the second-difference matrix.
    pub fn second_difference(&self) -> String {
        format!("{}_d2", self.name)
    }

    pub fn check(&self) -> Result<(), QmError> {
        if self.max < 2 {
            return Err(QmError::InvalidSeries(format!("`{}` needs max >= 2", self.name)));
        }
        if self.r < 1 {
            return Err(QmError::InvalidSeries(format!("`{}` needs r >= 1", self.name)));
        }
        if self.scale < 1 {
            return Err(QmError::InvalidSeries(format!("`{}` needs scale >= 1", self.name)));
        }
        if self.order > 2 {
            return Err(QmError::InvalidSeries(format!("`{}` has order above 2", self.name)));
        }
        for (l, i) in &self.landmarks {
            if !(0..=self.max).contains(i) {
                return Err(QmError::OutOfRange(format!(
                    "landmark `{l}` = {i} of `{}` outside 0..{}",
                    self.name, self.max
                )));
            }
        }
        Ok(())
    }

    pub fn landmark(&self, at: &Landmark) -> Result<i64, QmError> {
        match at {
            Landmark::Index(i) => Ok(*i),
            Landmark::Named(n) => self.landmarks.get(n).copied().ok_or_else(|| QmError::UnknownLandmark {
                series: self.name.clone(),
                name: n.clone(),
            }),
        }
    }
}

/// A time index given directly or by landmark name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Landmark {
    Index(i64),
    Named(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Predicate {
    Peak {
        series: String,
        window: (Landmark, Landmark),
    },
    ZeroUntil {
        series: String,
        until: Landmark,
    },
    Smooth {
        series: String,
        bound: i64,
        from: Landmark,
    },
}

/// `to` follows `from` with a delay of `lag` steps at `scale_pct` percent
/// of its amplitude (plus `slack`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coupling {
    pub from: String,
    pub to: String,
    pub lag: i64,
    pub scale_pct: i64,
    pub slack: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct QualSpec {
    pub series: Vec<SeriesSpec>,
    pub predicates: Vec<Predicate>,
    pub couplings: Vec<Coupling>,
}

impl QualSpec {
    pub fn series(&self, name: &str) -> Result<&SeriesSpec, QmError> {
        self.series
            .iter()
            .find(|s| s.name == name)
            .ok_or_else(|| QmError::UnknownSeries { name: name.into() })
    }
}
