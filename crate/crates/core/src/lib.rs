// Copyright 2026 The qualmod Authors. All rights reserved.
// Use of this source code is governed by the Apache License,
// Version 2.0, that can be found in the LICENSE file.

//! Qualitative modelling of dynamical systems with finite-domain constraints.
//!
//! Behaviour is described in a small declarative language (peaks,
//! monotonicity, smoothness, lags over discretised series), compiled to a
//! flat integer constraint problem, and sampled by randomised backtracking.
//! Sampled trajectories are scaled to absolute values and fitted with
//! compartmental transfer/loss models, then ranked on realism against
//! model complexity.
//!
//! The pipeline, module by module:
//!
//! - [`dsl`]: parse and validate `.qm` model text.
//! - [`flatten`]: unroll quantifiers, eliminate common subexpressions and
//!   encode to a [`flatten::CspInstance`].
//! - [`solver`]: propagation + backtracking search, plus an exhaustive
//!   reference enumerator.
//! - [`qm`]: builders for common behavioural idioms over named series.
//! - [`quant`]: scaling, Euler simulation, rate fitting, realism scoring
//!   and Pareto ranking.
//! - [`cli`]: the `qualmod` command-line front end.

pub mod cli;
pub mod dsl;
pub mod flatten;
pub mod qm;
pub mod quant;
pub mod solver;
