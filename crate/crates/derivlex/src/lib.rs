//! Lexer specifications, IR files, benchmarks and the `derivlex` command.

pub mod action_text;
pub mod bench;
pub mod ir;
pub mod output;
pub mod spec;

pub use ir::{load_ir, save_ir, IrError};
pub use spec::{compile_spec, load_spec, parse_spec, render, SpecError};
