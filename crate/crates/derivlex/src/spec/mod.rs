//! `.vl` lexer specifications: syntax tree, parser, desugaring to core
//! regexps, compilation to lexer tables and pretty-printing.

pub mod ast;
pub mod compile;
pub mod desugar;
pub mod parse;
pub mod render;

use derivlex_core::LexerTable;

pub use ast::{LexerDef, Pattern, Pos, RegexpDef, RuleDef, SetItem, SpecFile, Surface};
pub use compile::compile_spec;
pub use desugar::desugar;
pub use parse::parse_spec;
pub use render::{render, render_surface};

/// A diagnostic at a position of the specification text. Position `0:0`
/// means the whole file.
#[derive(Clone, PartialEq, Eq, Debug, thiserror::Error)]
#[error("{pos}: {message}")]
pub struct SpecError {
    pub pos: Pos,
    pub message: String,
}

impl SpecError {
    pub fn at(pos: Pos, message: impl Into<String>) -> Self {
        SpecError {
            pos,
            message: message.into(),
        }
    }
}

/// Parses and compiles a specification.
pub fn load_spec(text: &str) -> Result<LexerTable, SpecError> {
    compile_spec(&parse_spec(text)?)
}
