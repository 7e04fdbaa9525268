//! Syntax tree of `.vl` lexer specifications.

use derivlex_core::{Policy, Predicate};

use crate::action_text::ActionAst;

/// 1-based line and column in the specification text.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl std::fmt::Display for Pos {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct SpecFile {
    pub kinds: Vec<String>,
    pub eof: Option<String>,
    pub regexp_defs: Vec<RegexpDef>,
    /// `then`-separated sections; the lexers of a section are joined by `and`.
    pub sections: Vec<Vec<LexerDef>>,
    /// Text of the trailing `{ ... }` block, kept as written.
    pub trailer: Option<String>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RegexpDef {
    pub name: String,
    pub body: Surface,
    pub pos: Pos,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LexerDef {
    pub name: String,
    pub policy: Policy,
    pub rules: Vec<RuleDef>,
    pub pos: Pos,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RuleDef {
    pub pattern: Pattern,
    pub action: ActionAst,
    /// Position of the opening brace of the action.
    pub pos: Pos,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Pattern {
    Regexp(Surface),
    Eof,
    Predicate(Predicate),
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum SetItem {
    Char(u8),
    Range(u8, u8),
}

/// Surface regexp syntax, before desugaring.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Surface {
    Char(u8),
    Str(Vec<u8>),
    Any,
    Set { negated: bool, items: Vec<SetItem> },
    Alt(Box<Surface>, Box<Surface>),
    Cat(Box<Surface>, Box<Surface>),
    Diff(Box<Surface>, Box<Surface>),
    Star(Box<Surface>),
    Plus(Box<Surface>),
    Opt(Box<Surface>),
    Name(String),
}

impl SpecFile {
    pub fn lexers(&self) -> impl Iterator<Item = &LexerDef> {
        self.sections.iter().flatten()
    }

    /// Resets every recorded position, for comparisons that ignore layout.
    pub fn clear_positions(&mut self) {
        for d in &mut self.regexp_defs {
            d.pos = Pos::default();
        }
        for lx in self.sections.iter_mut().flatten() {
            lx.pos = Pos::default();
            for r in &mut lx.rules {
                r.pos = Pos::default();
            }
        }
    }
}
