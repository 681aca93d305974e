// Copyright 2026 The qualmod Authors. All rights reserved.
// Use of this source code is governed by the Apache License,
// Version 2.0, that can be found in the LICENSE file.

//! Compilation of a validated model to a flat constraint problem.
//!
//! Three passes: quantifier unrolling with constant folding, optional
//! common subexpression elimination, and encoding into the primitive
//! constraint catalogue of [`FlatConstraint`].

mod cse;
mod encode;
mod expand;
mod instance;

use thiserror::Error;

use crate::dsl::TypedModel;

pub use cse::eliminate_cse;
pub use encode::encode;
pub use expand::{unroll, ExpandedModel, FExpr, Rel, DEFAULT_EXPANSION_CAP};
pub use instance::{CmpOp, CspInstance, FlatConstraint, Lit, MatrixInfo, Origin, VarId, VarInfo};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FlattenError {
    #[error("quantifier expansion exceeds {limit} nodes")]
    ExpansionTooLarge { limit: usize },
    #[error("`{access}` outside index range {}..{}", range.0, range.1)]
    IndexOutOfRange { access: String, range: (i64, i64) },
    #[error("unsupported construct: {node}")]
    UnsupportedConstruct { node: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FlattenOptions {
    pub cse: bool,
    /// Upper bound on nodes produced while unrolling.
    pub expansion_cap: usize,
}

impl Default for FlattenOptions {
    fn default() -> Self {
        FlattenOptions {
            cse: true,
            expansion_cap: DEFAULT_EXPANSION_CAP,
        }
    }
}

/// Runs the full pipeline on a validated model.
pub fn compile(model: &TypedModel, opts: &FlattenOptions) -> Result<CspInstance, FlattenError> {
    let expanded = expand_model(model, opts)?;
    encode(&expanded)
}

/// Unrolls and, if enabled, eliminates common subexpressions, stopping
/// before encoding. Useful for measuring the effect of CSE.
pub fn expand_model(model: &TypedModel, opts: &FlattenOptions) -> Result<ExpandedModel, FlattenError> {
    let expanded = unroll(model, opts.expansion_cap)?;
    Ok(if opts.cse { eliminate_cse(expanded) } else { expanded })
}
