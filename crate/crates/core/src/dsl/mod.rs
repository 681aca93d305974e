// Copyright 2026 The qualmod Authors. All rights reserved.
// Use of this source code is governed by the Apache License,
// Version 2.0, that can be found in the LICENSE file.

//! The qualitative modelling language: lexer, parser, type checker and a
//! direct reference evaluator.
//!
//! ```text
//! find x : [int(0..max)] of int(0..100)
//! find y : [int(1..max)] of int(-r..r)
//! forAll i : int(1..max) . y[i] = x[i] - x[i-1]
//! ```
//!
//! Connectives are written `/\`, `\/`, `->` and `!`; absolute value is
//! `abs(e)`. Free identifiers that are not declared with `find` and not
//! bound by a quantifier are integer parameters supplied at validation.

pub mod ast;
mod eval;
pub mod lexer;
pub mod parser;
mod print;
pub mod validate;

use thiserror::Error;

pub use ast::{BinOp, Clause, Expr, ListExpr, ModelAST, Quantifier, Range, VarDecl};
pub use eval::cell_name;
pub use lexer::{tokenize, Pos, Token, TokenKind};
pub use parser::{error_pos, parse, parse_expr};
pub use validate::{validate, ConcreteDecl, TypedModel};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DslError {
    #[error("{pos}: illegal character `{ch}`")]
    IllegalCharacter { ch: char, pos: Pos },
    #[error("{pos}: integer literal out of range")]
    IntegerOverflow { pos: Pos },
    #[error("{}: syntax error: found {found}, expected {}", pos.map_or("end".to_string(), |p| p.to_string()), expected.join(" or "))]
    Syntax {
        pos: Option<Pos>,
        found: String,
        expected: Vec<String>,
    },
    #[error("duplicate declaration of `{name}`")]
    DuplicateDeclaration { name: String },
    #[error("binder `{name}` shadows a parameter or variable")]
    ShadowedName { name: String },
    #[error("unbound parameter `{name}`")]
    UnboundParameter { name: String },
    #[error("index of `{access}` reaches {}..{} outside {}..{}", reach.0, reach.1, range.0, range.1)]
    IndexOutOfRange {
        access: String,
        reach: (i64, i64),
        range: (i64, i64),
    },
    #[error("empty range {lo}..{hi} in declaration of `{decl}`")]
    EmptyDomain { decl: String, lo: i64, hi: i64 },
    #[error("type error: {message}")]
    TypeError { message: String },
    #[error("matrix access `{access}` indexed by a decision variable")]
    VariableIndex { access: String },
    #[error("no value for cell `{cell}`")]
    MissingCell { cell: String },
}

/// Tokenizes and parses model source text.
pub fn parse_model(source: &str) -> Result<ModelAST, DslError> {
    parse(&tokenize(source)?)
}
