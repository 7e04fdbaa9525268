//! Compiled lexers and the fuel-bounded lexing step.
//!
//! One lexing step elects a rule on the remaining input and runs its action.
//! Actions are a small closed language: they can return a token, raise an
//! error, bump the line counter, write to the storage and call a lexer.
//! A call to a lexer of the same recursion group costs one unit of fuel, a
//! call to an earlier group costs nothing, and the step fails with
//! [`LexOutcome::NoFuel`] once the fuel reaches zero.
//!
//! Calls are always in tail position, so [`Runner::run_step`] runs them in a
//! loop rather than on the native stack.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::lexbuf::{Lexbuf, Position};
use crate::score::ReadMeter;
use crate::select::{
    generalizing_elector_with, ActionRef, Election, FnRule, Policy, Predicate, PredicateContext,
    RegexpRule, ScoreMode,
};

/// Starting fuel when none is configured.
pub const DEFAULT_FUEL: u64 = 1_000_000;

/// Consecutive zero-width, non-eof tokens after which [`Runner::tokenize_all`]
/// gives up.
pub const MAX_STALLED_TOKENS: usize = 1024;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct KindId(pub u32);

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct LexerId(pub u32);

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Token {
    pub kind: KindId,
    pub payload: Option<Vec<u8>>,
}

/// String-keyed user state threaded through a lexing run.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Storage {
    vars: BTreeMap<String, Vec<u8>>,
}

impl Storage {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, key: &str) -> Option<&[u8]> {
        self.vars.get(key).map(Vec::as_slice)
    }

    pub fn set(&mut self, key: &str, value: Vec<u8>) {
        self.vars.insert(key.into(), value);
    }

    pub fn append(&mut self, key: &str, bytes: &[u8]) {
        self.vars
            .entry(key.into())
            .or_default()
            .extend_from_slice(bytes);
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[u8])> {
        self.vars.iter().map(|(k, v)| (k.as_str(), v.as_slice()))
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum TemplatePart {
    Text(Vec<u8>),
    Lexeme,
}

/// A storage value built from literal text and the current lexeme.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Template(pub Vec<TemplatePart>);

impl Template {
    pub fn expand(&self, lexeme: &[u8]) -> Vec<u8> {
        let mut out = Vec::new();
        for part in &self.0 {
            match part {
                TemplatePart::Text(t) => out.extend_from_slice(t),
                TemplatePart::Lexeme => out.extend_from_slice(lexeme),
            }
        }
        out
    }
}

/// A semantic action.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Action {
    Ret(KindId),
    /// Return a token carrying the lexeme.
    RetL(KindId),
    Raise(String),
    /// Raise with the lexeme attached.
    RaiseL(String),
    NewLine,
    /// State updates followed by exactly one producing action.
    Seq(Vec<Action>),
    Call(LexerId),
    SetVar(String, Template),
    AppendLexeme(String),
}

impl Action {
    /// Ends the action: produces a token or an error, or hands over to a
    /// lexer.
    pub fn is_producer(&self) -> bool {
        matches!(
            self,
            Action::Ret(_)
                | Action::RetL(_)
                | Action::Raise(_)
                | Action::RaiseL(_)
                | Action::Call(_)
        )
    }

    pub fn is_update(&self) -> bool {
        matches!(
            self,
            Action::NewLine | Action::SetVar(..) | Action::AppendLexeme(_)
        )
    }

    fn steps(&self) -> &[Action] {
        match self {
            Action::Seq(steps) => steps,
            single => core::slice::from_ref(single),
        }
    }

    /// The producing step of a well-formed action.
    pub fn last_step(&self) -> &Action {
        self.steps().last().unwrap_or(self)
    }

    /// A single producing action, or a sequence of updates ending in one.
    pub fn check_shape(&self) -> Result<(), &'static str> {
        let Some((last, updates)) = self.steps().split_last() else {
            return Err("empty sequence");
        };
        if !last.is_producer() {
            return Err("action does not end with ret, raise or a lexer call");
        }
        if updates.iter().any(|a| !a.is_update()) {
            return Err("only new_line, set_var and append_lexeme may precede the last action");
        }
        Ok(())
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CompiledLexer {
    pub name: String,
    pub policy: Policy,
    pub re_rules: Vec<RegexpRule>,
    pub fn_rules: Vec<FnRule>,
    /// Indexed by [`ActionRef`], in source rule order.
    pub actions: Vec<Action>,
    /// Lexers joined by `and` share a group; `then` starts a new one.
    pub group: u32,
}

/// A set of compiled lexers plus the declared token kinds.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct LexerTable {
    pub kinds: Vec<String>,
    /// The kind that ends [`Runner::tokenize_all`].
    pub eof: Option<KindId>,
    pub lexers: Vec<CompiledLexer>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum TableError {
    DuplicateLexer(String),
    DuplicateKind(String),
    UnknownKind {
        lexer: String,
        kind: KindId,
    },
    UnknownLexer {
        lexer: String,
        callee: LexerId,
    },
    ForwardCall {
        lexer: String,
        callee: String,
    },
    BadActionRef {
        lexer: String,
        action: ActionRef,
    },
    UnusedAction {
        lexer: String,
        action: ActionRef,
    },
    MalformedAction {
        lexer: String,
        action: ActionRef,
        reason: &'static str,
    },
    EofOutOfRange(KindId),
}

impl fmt::Display for TableError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TableError::DuplicateLexer(n) => write!(f, "lexer `{n}` is defined twice"),
            TableError::DuplicateKind(n) => write!(f, "token kind `{n}` is declared twice"),
            TableError::UnknownKind { lexer, kind } => {
                write!(f, "lexer `{lexer}` uses undeclared token kind #{}", kind.0)
            }
            TableError::UnknownLexer { lexer, callee } => {
                write!(f, "lexer `{lexer}` calls unknown lexer #{}", callee.0)
            }
            TableError::ForwardCall { lexer, callee } => write!(
                f,
                "lexer `{lexer}` calls `{callee}`, which is defined in a later `then` section"
            ),
            TableError::BadActionRef { lexer, action } => {
                write!(f, "lexer `{lexer}` refers to missing action #{}", action.0)
            }
            TableError::UnusedAction { lexer, action } => {
                write!(f, "lexer `{lexer}` has action #{} with no rule", action.0)
            }
            TableError::MalformedAction {
                lexer,
                action,
                reason,
            } => write!(f, "lexer `{lexer}`, action #{}: {reason}", action.0),
            TableError::EofOutOfRange(k) => write!(f, "eof kind #{} is not declared", k.0),
        }
    }
}

impl LexerTable {
    pub fn lexer_id(&self, name: &str) -> Option<LexerId> {
        self.lexers
            .iter()
            .position(|l| l.name == name)
            .map(|i| LexerId(i as u32))
    }

    pub fn kind_id(&self, name: &str) -> Option<KindId> {
        self.kinds
            .iter()
            .position(|k| k == name)
            .map(|i| KindId(i as u32))
    }

    pub fn kind_name(&self, kind: KindId) -> &str {
        &self.kinds[kind.0 as usize]
    }

    pub fn lexer(&self, id: LexerId) -> &CompiledLexer {
        &self.lexers[id.0 as usize]
    }

    /// Checks every cross reference and action shape. Tables that pass can
    /// be run without panicking, and every run terminates.
    pub fn validate(&self) -> Result<(), TableError> {
        for (i, k) in self.kinds.iter().enumerate() {
            if self.kinds[..i].contains(k) {
                return Err(TableError::DuplicateKind(k.clone()));
            }
        }
        if let Some(k) = self.eof {
            if k.0 as usize >= self.kinds.len() {
                return Err(TableError::EofOutOfRange(k));
            }
        }
        for (i, lx) in self.lexers.iter().enumerate() {
            if self.lexers[..i].iter().any(|l| l.name == lx.name) {
                return Err(TableError::DuplicateLexer(lx.name.clone()));
            }
            let mut used = alloc::vec![false; lx.actions.len()];
            let refs = lx
                .re_rules
                .iter()
                .map(|r| r.action)
                .chain(lx.fn_rules.iter().map(|r| r.action));
            for action in refs {
                match used.get_mut(action.0 as usize) {
                    Some(slot) => *slot = true,
                    None => {
                        return Err(TableError::BadActionRef {
                            lexer: lx.name.clone(),
                            action,
                        })
                    }
                }
            }
            if let Some(idx) = used.iter().position(|u| !u) {
                return Err(TableError::UnusedAction {
                    lexer: lx.name.clone(),
                    action: ActionRef(idx as u32),
                });
            }
            for (idx, action) in lx.actions.iter().enumerate() {
                self.validate_action(lx, ActionRef(idx as u32), action)?;
            }
        }
        Ok(())
    }

    fn validate_action(
        &self,
        lx: &CompiledLexer,
        at: ActionRef,
        action: &Action,
    ) -> Result<(), TableError> {
        let malformed = |reason| TableError::MalformedAction {
            lexer: lx.name.clone(),
            action: at,
            reason,
        };
        action.check_shape().map_err(malformed)?;
        let last = action.last_step();
        match last {
            Action::Ret(k) | Action::RetL(k) if k.0 as usize >= self.kinds.len() => {
                Err(TableError::UnknownKind {
                    lexer: lx.name.clone(),
                    kind: *k,
                })
            }
            Action::Call(callee) => match self.lexers.get(callee.0 as usize) {
                None => Err(TableError::UnknownLexer {
                    lexer: lx.name.clone(),
                    callee: *callee,
                }),
                Some(target) if target.group > lx.group => Err(TableError::ForwardCall {
                    lexer: lx.name.clone(),
                    callee: target.name.clone(),
                }),
                Some(_) => Ok(()),
            },
            _ => Ok(()),
        }
    }
}

/// Result of one lexing step.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum LexOutcome<'a> {
    Success {
        token: Token,
        buf: Lexbuf<'a>,
        storage: Storage,
    },
    NoFuel(Lexbuf<'a>),
    /// No rule applies to the remaining input.
    NoRuleMatched(Lexbuf<'a>),
    /// Raised by an action.
    UserError {
        message: String,
        lexeme: Vec<u8>,
        position: Position,
    },
}

/// A token with the lexbuf positions it was returned with.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Spanned {
    pub token: Token,
    pub start: Position,
    pub end: Position,
}

/// Why [`Runner::tokenize_all`] stopped.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Halt<'a> {
    /// The eof token was produced (and is the last token of the stream).
    Eof,
    NoFuel(Lexbuf<'a>),
    NoRuleMatched(Lexbuf<'a>),
    UserError {
        message: String,
        lexeme: Vec<u8>,
        position: Position,
    },
    /// Too many consecutive zero-width tokens at one offset.
    Stalled(Lexbuf<'a>),
}

impl Halt<'_> {
    pub fn is_eof(&self) -> bool {
        matches!(self, Halt::Eof)
    }

    /// Position of the failure: the error's start or the unread input.
    pub fn position(&self) -> Option<Position> {
        match self {
            Halt::Eof => None,
            Halt::NoFuel(b) | Halt::NoRuleMatched(b) | Halt::Stalled(b) => Some(b.end_pos()),
            Halt::UserError { position, .. } => Some(*position),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TokenStream<'a> {
    pub tokens: Vec<Spanned>,
    pub halt: Halt<'a>,
    /// Storage after the last successful step.
    pub storage: Storage,
    /// Offset reached when the run stopped.
    pub consumed: usize,
}

enum Flow<'a> {
    Done(LexOutcome<'a>),
    Call(LexerId, Lexbuf<'a>, Storage),
}

/// Runs lexers from a validated table.
pub struct Runner<'t, M = ()> {
    table: &'t LexerTable,
    mode: ScoreMode,
    meter: M,
}

impl<'t> Runner<'t, ()> {
    pub fn new(table: &'t LexerTable) -> Self {
        Runner {
            table,
            mode: ScoreMode::Fast,
            meter: (),
        }
    }
}

impl<'t, M: ReadMeter> Runner<'t, M> {
    pub fn with_meter(table: &'t LexerTable, mode: ScoreMode, meter: M) -> Self {
        Runner { table, mode, meter }
    }

    pub fn table(&self) -> &'t LexerTable {
        self.table
    }

    pub fn meter(&self) -> &M {
        &self.meter
    }

    /// One lexing step of `lexer` on `buf`.
    pub fn run_step<'a>(
        &self,
        lexer: LexerId,
        fuel: u64,
        buf: Lexbuf<'a>,
        storage: Storage,
    ) -> LexOutcome<'a> {
        let (mut lexer, mut fuel, mut buf, mut storage) = (lexer, fuel, buf, storage);
        loop {
            if fuel == 0 {
                return LexOutcome::NoFuel(buf);
            }
            let lx = self.table.lexer(lexer);
            let ctx = PredicateContext {
                remaining: buf.remaining(),
                position: buf.end_pos(),
            };
            let election = generalizing_elector_with(
                lx.policy,
                &lx.re_rules,
                &lx.fn_rules,
                &ctx,
                self.mode,
                &self.meter,
            );
            let (action, next) = match election {
                Election::FnChoice(rule) => (rule.action, buf),
                Election::ReChoice { rule, len, .. } => (rule.action, buf.advance(len)),
                Election::NotSelected => return LexOutcome::NoRuleMatched(buf),
            };
            match perform(&lx.actions[action.0 as usize], next, storage) {
                Flow::Done(outcome) => return outcome,
                Flow::Call(callee, b, st) => {
                    if self.table.lexer(callee).group == lx.group {
                        fuel -= 1;
                    }
                    lexer = callee;
                    buf = b;
                    storage = st;
                }
            }
        }
    }

    /// Runs an action program with `fuel` on an already updated buffer, on
    /// behalf of a lexer of `caller_group`.
    pub fn exec_action<'a>(
        &self,
        prog: &Action,
        fuel: u64,
        buf: Lexbuf<'a>,
        storage: Storage,
        caller_group: u32,
    ) -> LexOutcome<'a> {
        match perform(prog, buf, storage) {
            Flow::Done(outcome) => outcome,
            Flow::Call(callee, b, st) => {
                let fuel = if self.table.lexer(callee).group == caller_group {
                    fuel.saturating_sub(1)
                } else {
                    fuel
                };
                self.run_step(callee, fuel, b, st)
            }
        }
    }

    /// Repeats [`Self::run_step`] from the start of `input`, each step with
    /// the full `fuel`, until the eof token or an error.
    ///
    /// Without a declared eof kind the run ends with `NoRuleMatched` as soon
    /// as the input is exhausted.
    pub fn tokenize_all<'a>(
        &self,
        entry: LexerId,
        input: &'a [u8],
        fuel: u64,
        storage: Storage,
    ) -> TokenStream<'a> {
        let mut buf = Lexbuf::new(input);
        let mut storage = storage;
        let mut tokens = Vec::new();
        let mut stalled = 0;
        let halt = loop {
            if self.table.eof.is_none() && buf.remaining().is_empty() {
                break Halt::NoRuleMatched(buf);
            }
            match self.run_step(entry, fuel, buf, storage.clone()) {
                LexOutcome::Success {
                    token,
                    buf: next,
                    storage: st,
                } => {
                    let eof = Some(token.kind) == self.table.eof;
                    if !eof && next.end_pos().offset == buf.end_pos().offset {
                        stalled += 1;
                        if stalled > MAX_STALLED_TOKENS {
                            break Halt::Stalled(next);
                        }
                    } else {
                        stalled = 0;
                    }
                    tokens.push(Spanned {
                        token,
                        start: next.start_pos(),
                        end: next.end_pos(),
                    });
                    buf = next;
                    storage = st;
                    if eof {
                        break Halt::Eof;
                    }
                }
                LexOutcome::NoFuel(b) => {
                    buf = b;
                    break Halt::NoFuel(b);
                }
                LexOutcome::NoRuleMatched(b) => {
                    buf = b;
                    break Halt::NoRuleMatched(b);
                }
                LexOutcome::UserError {
                    message,
                    lexeme,
                    position,
                } => {
                    break Halt::UserError {
                        message,
                        lexeme,
                        position,
                    }
                }
            }
        };
        TokenStream {
            tokens,
            halt,
            storage,
            consumed: buf.end_pos().offset,
        }
    }
}

/// Applies the updates of an action and stops at its producing step.
fn perform<'a>(prog: &Action, buf: Lexbuf<'a>, mut storage: Storage) -> Flow<'a> {
    let mut buf = buf;
    for step in prog.steps() {
        match step {
            Action::NewLine => buf = buf.new_line(),
            Action::SetVar(key, template) => storage.set(key, template.expand(buf.lexeme())),
            Action::AppendLexeme(key) => storage.append(key, buf.lexeme()),
            Action::Ret(kind) => {
                return Flow::Done(LexOutcome::Success {
                    token: Token {
                        kind: *kind,
                        payload: None,
                    },
                    buf,
                    storage,
                })
            }
            Action::RetL(kind) => {
                return Flow::Done(LexOutcome::Success {
                    token: Token {
                        kind: *kind,
                        payload: Some(buf.lexeme().to_vec()),
                    },
                    buf,
                    storage,
                })
            }
            Action::Raise(message) => {
                return Flow::Done(LexOutcome::UserError {
                    message: message.clone(),
                    lexeme: Vec::new(),
                    position: buf.start_pos(),
                })
            }
            Action::RaiseL(message) => {
                return Flow::Done(LexOutcome::UserError {
                    message: message.clone(),
                    lexeme: buf.lexeme().to_vec(),
                    position: buf.start_pos(),
                })
            }
            Action::Call(callee) => return Flow::Call(*callee, buf, storage),
            Action::Seq(inner) => return perform(&Action::Seq(inner.clone()), buf, storage),
        }
    }
    // Validated tables never get here; an action with no producer yields
    // no rule.
    Flow::Done(LexOutcome::NoRuleMatched(buf))
}

/// Free-function form of [`Runner::run_step`] with the fast scorers.
pub fn run_step<'a>(
    table: &LexerTable,
    lexer: LexerId,
    fuel: u64,
    buf: Lexbuf<'a>,
    storage: Storage,
) -> LexOutcome<'a> {
    Runner::new(table).run_step(lexer, fuel, buf, storage)
}

/// Free-function form of [`Runner::tokenize_all`] with the fast scorers.
pub fn tokenize_all<'a>(
    table: &LexerTable,
    entry: LexerId,
    input: &'a [u8],
    fuel: u64,
    storage: Storage,
) -> TokenStream<'a> {
    Runner::new(table).tokenize_all(entry, input, fuel, storage)
}

/// Writes `bytes` as a double-quoted literal: `\"`, `\\`, `\n`, `\t` and
/// `\xNN` for anything outside printable ASCII.
pub fn write_quoted(f: &mut impl fmt::Write, bytes: &[u8]) -> fmt::Result {
    f.write_char('"')?;
    for &b in bytes {
        match b {
            b'"' => f.write_str("\\\"")?,
            b'\\' => f.write_str("\\\\")?,
            b'\n' => f.write_str("\\n")?,
            b'\t' => f.write_str("\\t")?,
            0x20..=0x7e => f.write_char(b as char)?,
            _ => write!(f, "\\x{:02x}", b)?,
        }
    }
    f.write_char('"')
}

/// Canonical action text, resolving kinds and lexers through a table.
pub struct ActionText<'t> {
    pub action: &'t Action,
    pub table: &'t LexerTable,
}

impl fmt::Display for ActionText<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t = self.table;
        match self.action {
            Action::Ret(k) => write!(f, "ret {}", t.kind_name(*k)),
            Action::RetL(k) => write!(f, "ret_l {}", t.kind_name(*k)),
            Action::Raise(m) => {
                f.write_str("raise ")?;
                write_quoted(f, m.as_bytes())
            }
            Action::RaiseL(m) => {
                f.write_str("raise_l ")?;
                write_quoted(f, m.as_bytes())
            }
            Action::NewLine => f.write_str("new_line"),
            Action::Seq(steps) => {
                f.write_str("sequence [")?;
                for (i, step) in steps.iter().enumerate() {
                    if i > 0 {
                        f.write_str("; ")?;
                    }
                    write!(
                        f,
                        "{}",
                        ActionText {
                            action: step,
                            table: t
                        }
                    )?;
                }
                f.write_str("]")
            }
            Action::Call(l) => f.write_str(&t.lexer(*l).name),
            Action::SetVar(key, template) => {
                write!(f, "set_var {key} ")?;
                let mut text = Vec::new();
                for part in &template.0 {
                    match part {
                        TemplatePart::Text(bytes) => {
                            for &b in bytes {
                                if b == b'$' {
                                    text.push(b'$');
                                }
                                text.push(b);
                            }
                        }
                        TemplatePart::Lexeme => text.extend_from_slice(b"$lexeme"),
                    }
                }
                write_quoted(f, &text)
            }
            Action::AppendLexeme(key) => write!(f, "append_lexeme {key}"),
        }
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Predicate::Eof => f.write_str("eof"),
            Predicate::Always => f.write_str("always"),
            Predicate::StartsWith(lit) => {
                f.write_str("starts_with ")?;
                write_quoted(f, lit)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regex::Regexp;
    use alloc::string::ToString;
    use alloc::vec;

    fn re(pattern: Regexp, action: u32) -> RegexpRule {
        RegexpRule {
            pattern,
            action: ActionRef(action),
        }
    }

    /// `'a' { ret A } | '\n' { sequence [new_line; self] } | eof { ret EOF }
    ///  | _ { raise_l "bad" }`
    fn small_table() -> LexerTable {
        LexerTable {
            kinds: vec!["A".into(), "EOF".into()],
            eof: Some(KindId(1)),
            lexers: vec![CompiledLexer {
                name: "main".into(),
                policy: Policy::Longest,
                re_rules: vec![
                    re(Regexp::sym(b'a'), 0),
                    re(Regexp::sym(b'\n'), 1),
                    re(Regexp::wildcard(), 3),
                ],
                fn_rules: vec![FnRule {
                    predicate: Predicate::Eof,
                    action: ActionRef(2),
                }],
                actions: vec![
                    Action::RetL(KindId(0)),
                    Action::Seq(vec![Action::NewLine, Action::Call(LexerId(0))]),
                    Action::Ret(KindId(1)),
                    Action::RaiseL("bad".into()),
                ],
                group: 0,
            }],
        }
    }

    #[test]
    fn zero_fuel_is_immediate() {
        let t = small_table();
        let out = run_step(&t, LexerId(0), 0, Lexbuf::new(b"a"), Storage::new());
        assert_eq!(out, LexOutcome::NoFuel(Lexbuf::new(b"a")));
    }

    #[test]
    fn newline_then_recursive_call() {
        let t = small_table();
        let out = run_step(&t, LexerId(0), 5, Lexbuf::new(b"\na"), Storage::new());
        let LexOutcome::Success { token, buf, .. } = out else {
            panic!("{out:?}")
        };
        assert_eq!(token.payload.as_deref(), Some(&b"a"[..]));
        assert_eq!(buf.start_pos(), Position::new(2, 0, 1));
        assert_eq!(buf.end_pos(), Position::new(2, 1, 2));
        // One unit of fuel per recursive call.
        let out = run_step(&t, LexerId(0), 1, Lexbuf::new(b"\na"), Storage::new());
        assert!(matches!(out, LexOutcome::NoFuel(_)));
    }

    #[test]
    fn raise_l_reports_lexeme_and_start() {
        let t = small_table();
        let b = Lexbuf::new(b"a?").advance(1);
        let out = run_step(&t, LexerId(0), 3, b, Storage::new());
        assert_eq!(
            out,
            LexOutcome::UserError {
                message: "bad".into(),
                lexeme: b"?".to_vec(),
                position: Position::new(1, 1, 1),
            }
        );
    }

    #[test]
    fn exec_action_fuel_by_group() {
        let mut t = small_table();
        t.lexers.push(CompiledLexer {
            name: "other".into(),
            group: 1,
            ..t.lexers[0].clone()
        });
        // Re-point the second lexer's recursion at itself.
        t.lexers[1].actions[1] = Action::Seq(vec![Action::NewLine, Action::Call(LexerId(1))]);
        let r = Runner::new(&t);
        let call_main = Action::Call(LexerId(0));
        // Calling main from group 1 keeps fuel 1; from group 0 it drops to 0.
        let b = Lexbuf::new(b"a");
        assert!(matches!(
            r.exec_action(&call_main, 1, b, Storage::new(), 1),
            LexOutcome::Success { .. }
        ));
        assert!(matches!(
            r.exec_action(&call_main, 1, b, Storage::new(), 0),
            LexOutcome::NoFuel(_)
        ));
        t.validate().unwrap();
    }

    #[test]
    fn fn_choice_does_not_consume() {
        let t = small_table();
        let b = Lexbuf::new(b"aa").advance(2);
        let LexOutcome::Success { token, buf, .. } = run_step(&t, LexerId(0), 1, b, Storage::new())
        else {
            panic!()
        };
        assert_eq!(token.kind, KindId(1));
        assert_eq!(buf, b);
    }

    #[test]
    fn tokenize_stops_at_eof_token() {
        let t = small_table();
        let s = tokenize_all(&t, LexerId(0), b"a\na", DEFAULT_FUEL, Storage::new());
        assert!(s.halt.is_eof());
        let kinds: Vec<_> = s.tokens.iter().map(|t| t.token.kind.0).collect();
        assert_eq!(kinds, vec![0, 0, 1]);
        assert_eq!(s.tokens[1].start, Position::new(2, 0, 2));
        assert_eq!(s.consumed, 3);
        let s = tokenize_all(&t, LexerId(0), b"", DEFAULT_FUEL, Storage::new());
        assert_eq!(s.tokens.len(), 1);
    }

    #[test]
    fn tokenize_without_eof_kind_ends_with_no_rule() {
        let mut t = small_table();
        t.eof = None;
        let s = tokenize_all(&t, LexerId(0), b"aa", DEFAULT_FUEL, Storage::new());
        assert_eq!(s.tokens.len(), 2);
        assert!(matches!(s.halt, Halt::NoRuleMatched(b) if b.remaining().is_empty()));
    }

    #[test]
    fn zero_width_loop_stalls() {
        let t = LexerTable {
            kinds: vec!["Z".into(), "EOF".into()],
            eof: Some(KindId(1)),
            lexers: vec![CompiledLexer {
                name: "z".into(),
                policy: Policy::Longest,
                re_rules: vec![re(Regexp::star(Regexp::sym(b'a')), 0)],
                fn_rules: vec![],
                actions: vec![Action::Ret(KindId(0))],
                group: 0,
            }],
        };
        let s = tokenize_all(&t, LexerId(0), b"b", 10, Storage::new());
        assert!(matches!(s.halt, Halt::Stalled(_)));
        assert_eq!(s.tokens.len(), MAX_STALLED_TOKENS);
    }

    #[test]
    fn storage_actions() {
        let mut t = small_table();
        t.lexers[0].actions[0] = Action::Seq(vec![
            Action::AppendLexeme("seen".into()),
            Action::SetVar(
                "last".into(),
                Template(vec![
                    TemplatePart::Text(b"<".to_vec()),
                    TemplatePart::Lexeme,
                ]),
            ),
            Action::RetL(KindId(0)),
        ]);
        let s = tokenize_all(&t, LexerId(0), b"aa", DEFAULT_FUEL, Storage::new());
        assert_eq!(s.storage.get("seen"), Some(&b"aa"[..]));
        assert_eq!(s.storage.get("last"), Some(&b"<a"[..]));
    }

    #[test]
    fn validation_rejects_bad_tables() {
        let mut t = small_table();
        t.lexers[0].actions[2] = Action::NewLine;
        assert!(matches!(
            t.validate(),
            Err(TableError::MalformedAction { .. })
        ));
        let mut t = small_table();
        t.lexers[0].actions[2] = Action::Seq(vec![]);
        assert!(t.validate().is_err());
        let mut t = small_table();
        t.lexers[0].actions[0] = Action::Ret(KindId(7));
        assert!(matches!(t.validate(), Err(TableError::UnknownKind { .. })));
        let mut t = small_table();
        t.lexers[0].actions[0] = Action::Call(LexerId(3));
        assert!(matches!(t.validate(), Err(TableError::UnknownLexer { .. })));
        let mut t = small_table();
        t.lexers[0].re_rules[0].action = ActionRef(9);
        assert!(matches!(t.validate(), Err(TableError::BadActionRef { .. })));
        let mut t = small_table();
        t.lexers[0].group = 0;
        let mut later = t.lexers[0].clone();
        later.name = "later".into();
        later.group = 1;
        t.lexers.push(later);
        t.lexers[0].actions[0] = Action::Call(LexerId(1));
        assert!(matches!(t.validate(), Err(TableError::ForwardCall { .. })));
        small_table().validate().unwrap();
    }

    #[test]
    fn action_text_is_canonical() {
        let t = small_table();
        let text = |a: &Action| {
            ActionText {
                action: a,
                table: &t,
            }
            .to_string()
        };
        assert_eq!(text(&t.lexers[0].actions[1]), "sequence [new_line; main]");
        assert_eq!(text(&t.lexers[0].actions[3]), "raise_l \"bad\"");
        let set = Action::SetVar(
            "k".into(),
            Template(vec![
                TemplatePart::Text(b"$1\n".to_vec()),
                TemplatePart::Lexeme,
            ]),
        );
        assert_eq!(text(&set), "set_var k \"$$1\\n$lexeme\"");
        assert_eq!(
            Predicate::StartsWith(b"\x01".to_vec()).to_string(),
            "starts_with \"\\x01\""
        );
    }
}
