//! Regular expressions with Brzozowski derivatives, longest and shortest
//! prefix scoring, rule election and a fuel-bounded lexing engine.
//!
//! The crate is `no_std` and only needs `alloc`.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod engine;
pub mod lexbuf;
pub mod regex;
pub mod score;
pub mod select;
pub mod simplify;

#[cfg(any(test, feature = "oracle"))]
pub mod oracle;

pub use engine::{
    Action, CompiledLexer, Halt, KindId, LexOutcome, LexerId, LexerTable, Runner, Spanned, Storage,
    TableError, Template, TemplatePart, Token, TokenStream, DEFAULT_FUEL,
};
pub use lexbuf::{update_lexbuf, Lexbuf, Position};
pub use regex::{derive, derive_str, matches, nullable, parse_canonical, Kind, Regexp, Symbol};
pub use score::{
    l_score, l_score_fast, s_score, s_score_fast, LScore, ReadCounter, ReadMeter, SScore,
    ScoredSplit,
};
pub use select::{
    elect_longest, elect_shortest, generalizing_elector, select_fn, ActionRef, Election, FnRule,
    Policy, Predicate, PredicateContext, RegexpRule, ScoreMode,
};
pub use simplify::{simp_alt, simp_cat, simp_derive, simp_diff, simp_star};
