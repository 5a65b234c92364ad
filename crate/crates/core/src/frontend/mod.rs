//! Specification files: lexing, parsing, literal extraction and the safety
//! fragment check.

mod ast;
mod lexer;
mod normalize;
mod parser;

pub use ast::{Formula, SpecAst};
pub use normalize::{extract_literals, lookup_literal, normalize_safety, BoolExpr, SafetyMatrix};
pub use parser::{parse_boolean_ltl, parse_literal, parse_spec};

use crate::error::Result;
use crate::theory::{Literal, Signature};

/// A specification ready for Booleanization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompiledSpec {
    pub signature: Signature,
    pub literals: Vec<Literal>,
    pub matrix: SafetyMatrix,
}

impl CompiledSpec {
    pub fn from_ast(ast: &SpecAst) -> Result<Self> {
        Ok(CompiledSpec {
            signature: ast.signature.clone(),
            literals: extract_literals(ast),
            matrix: normalize_safety(ast)?,
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::from_ast(&parse_spec(text)?)
    }
}
