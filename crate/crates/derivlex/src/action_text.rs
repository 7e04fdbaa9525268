//! The action language as text: `ret K`, `ret_l K`, `raise "m"`,
//! `raise_l "m"`, `new_line`, `sequence [a; b]`, `set_var key "tmpl"`,
//! `append_lexeme key` and a bare lexer name for a call.
//!
//! Used both inside `{ ... }` action braces of `.vl` files and on the
//! `action` lines of IR files.

use std::fmt;

use derivlex_core::engine::write_quoted;
use derivlex_core::{Action, KindId, LexerId, Predicate, Template, TemplatePart};

/// An action with kinds and lexers still named.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ActionAst {
    Ret(String),
    RetL(String),
    Raise(String),
    RaiseL(String),
    NewLine,
    Seq(Vec<ActionAst>),
    Call(String),
    SetVar(String, Template),
    AppendLexeme(String),
}

pub const KEYWORDS: &[&str] = &[
    "ret",
    "ret_l",
    "raise",
    "raise_l",
    "new_line",
    "sequence",
    "set_var",
    "append_lexeme",
];

/// A syntax error at a byte offset of the parsed text.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TextError {
    pub offset: usize,
    pub message: String,
}

impl TextError {
    fn new(offset: usize, message: impl Into<String>) -> Self {
        TextError {
            offset,
            message: message.into(),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
enum Tok {
    Word(String),
    Str(Vec<u8>),
    Open,
    Close,
    Semi,
    End,
}

struct Scanner<'a> {
    src: &'a [u8],
    at: usize,
}

pub fn is_word_byte(b: u8) -> bool {
    b.is_ascii_alphanumeric() || b == b'_' || b == b'\''
}

/// Decodes one escape sequence after a backslash at `src[at]`; returns the
/// byte and the number of source bytes used (including the backslash).
pub fn unescape(src: &[u8], at: usize) -> Result<(u8, usize), TextError> {
    let bad = || TextError::new(at, "invalid escape sequence");
    match src.get(at + 1) {
        Some(b'n') => Ok((b'\n', 2)),
        Some(b't') => Ok((b'\t', 2)),
        Some(b'r') => Ok((b'\r', 2)),
        Some(b'\\') => Ok((b'\\', 2)),
        Some(b'\'') => Ok((b'\'', 2)),
        Some(b'"') => Ok((b'"', 2)),
        Some(b'x') => {
            let hex = src.get(at + 2..at + 4).ok_or_else(bad)?;
            let hex = std::str::from_utf8(hex).map_err(|_| bad())?;
            u8::from_str_radix(hex, 16)
                .map(|b| (b, 4))
                .map_err(|_| bad())
        }
        _ => Err(bad()),
    }
}

/// Reads a double-quoted literal starting at `src[at] == '"'`; returns its
/// bytes and the offset just past the closing quote.
pub fn read_quoted(src: &[u8], at: usize) -> Result<(Vec<u8>, usize), TextError> {
    let mut out = Vec::new();
    let mut i = at + 1;
    loop {
        match src.get(i) {
            None => return Err(TextError::new(at, "unterminated string")),
            Some(b'"') => return Ok((out, i + 1)),
            Some(b'\\') => {
                let (b, used) = unescape(src, i)?;
                out.push(b);
                i += used;
            }
            Some(&b) => {
                out.push(b);
                i += 1;
            }
        }
    }
}

impl<'a> Scanner<'a> {
    fn new(text: &'a str) -> Self {
        Scanner {
            src: text.as_bytes(),
            at: 0,
        }
    }

    fn skip_ws(&mut self) {
        while self.src.get(self.at).is_some_and(u8::is_ascii_whitespace) {
            self.at += 1;
        }
    }

    /// Next token and its offset.
    fn next(&mut self) -> Result<(Tok, usize), TextError> {
        self.skip_ws();
        let start = self.at;
        let Some(&b) = self.src.get(start) else {
            return Ok((Tok::End, start));
        };
        let tok = match b {
            b'[' => {
                self.at += 1;
                Tok::Open
            }
            b']' => {
                self.at += 1;
                Tok::Close
            }
            b';' => {
                self.at += 1;
                Tok::Semi
            }
            b'"' => {
                let (bytes, end) = read_quoted(self.src, start)?;
                self.at = end;
                Tok::Str(bytes)
            }
            _ if is_word_byte(b) => {
                while self.src.get(self.at).copied().is_some_and(is_word_byte) {
                    self.at += 1;
                }
                Tok::Word(String::from_utf8_lossy(&self.src[start..self.at]).into_owned())
            }
            _ => {
                return Err(TextError::new(
                    start,
                    format!("unexpected character `{}`", b.escape_ascii()),
                ))
            }
        };
        Ok((tok, start))
    }

    fn peek(&mut self) -> Result<(Tok, usize), TextError> {
        let save = self.at;
        let t = self.next();
        self.at = save;
        t
    }
}

fn expect_word(sc: &mut Scanner<'_>, what: &str) -> Result<String, TextError> {
    match sc.next()? {
        (Tok::Word(w), _) => Ok(w),
        (_, at) => Err(TextError::new(at, format!("expected {what}"))),
    }
}

fn expect_string(sc: &mut Scanner<'_>) -> Result<(Vec<u8>, usize), TextError> {
    match sc.next()? {
        (Tok::Str(s), at) => Ok((s, at)),
        (_, at) => Err(TextError::new(at, "expected a string literal")),
    }
}

fn expect_message(sc: &mut Scanner<'_>) -> Result<String, TextError> {
    let (bytes, at) = expect_string(sc)?;
    String::from_utf8(bytes).map_err(|_| TextError::new(at, "message is not valid UTF-8"))
}

/// `$lexeme` is the current lexeme and `$$` a literal dollar sign.
pub fn parse_template(bytes: &[u8], at: usize) -> Result<Template, TextError> {
    let mut parts = Vec::new();
    let mut text = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] != b'$' {
            text.push(bytes[i]);
            i += 1;
        } else if bytes[i + 1..].starts_with(b"$") {
            text.push(b'$');
            i += 2;
        } else if bytes[i + 1..].starts_with(b"lexeme") {
            if !text.is_empty() {
                parts.push(TemplatePart::Text(std::mem::take(&mut text)));
            }
            parts.push(TemplatePart::Lexeme);
            i += 7;
        } else {
            return Err(TextError::new(
                at,
                "`$` must be followed by `lexeme` or `$`",
            ));
        }
    }
    if !text.is_empty() {
        parts.push(TemplatePart::Text(text));
    }
    Ok(Template(parts))
}

fn parse_one(sc: &mut Scanner<'_>) -> Result<ActionAst, TextError> {
    let (tok, at) = sc.next()?;
    let Tok::Word(word) = tok else {
        return Err(TextError::new(at, "expected an action"));
    };
    Ok(match word.as_str() {
        "ret" => ActionAst::Ret(expect_word(sc, "a token kind")?),
        "ret_l" => ActionAst::RetL(expect_word(sc, "a token kind")?),
        "raise" => ActionAst::Raise(expect_message(sc)?),
        "raise_l" => ActionAst::RaiseL(expect_message(sc)?),
        "new_line" => ActionAst::NewLine,
        "append_lexeme" => ActionAst::AppendLexeme(expect_word(sc, "a storage key")?),
        "set_var" => {
            let key = expect_word(sc, "a storage key")?;
            let (bytes, at) = expect_string(sc)?;
            ActionAst::SetVar(key, parse_template(&bytes, at)?)
        }
        "sequence" => {
            match sc.next()? {
                (Tok::Open, _) => {}
                (_, at) => return Err(TextError::new(at, "expected `[` after `sequence`")),
            }
            let mut steps = Vec::new();
            loop {
                if let (Tok::Close, _) = sc.peek()? {
                    sc.next()?;
                    break;
                }
                steps.push(parse_one(sc)?);
                match sc.next()? {
                    (Tok::Semi, _) => {}
                    (Tok::Close, _) => break,
                    (_, at) => return Err(TextError::new(at, "expected `;` or `]`")),
                }
            }
            ActionAst::Seq(steps)
        }
        _ => match sc.peek()? {
            (Tok::End | Tok::Semi | Tok::Close, _) => ActionAst::Call(word),
            _ => {
                return Err(TextError::new(
                    at,
                    format!("unknown action keyword `{word}`"),
                ))
            }
        },
    })
}

pub fn parse_action(text: &str) -> Result<ActionAst, TextError> {
    let mut sc = Scanner::new(text);
    let action = parse_one(&mut sc)?;
    match sc.next()? {
        (Tok::End, _) => Ok(action),
        (_, at) => Err(TextError::new(at, "unexpected text after the action")),
    }
}

/// `eof`, `always` or `starts_with "lit"`.
pub fn parse_predicate(text: &str) -> Result<Predicate, TextError> {
    let mut sc = Scanner::new(text);
    let (tok, at) = sc.next()?;
    let pred = match tok {
        Tok::Word(w) if w == "eof" => Predicate::Eof,
        Tok::Word(w) if w == "always" => Predicate::Always,
        Tok::Word(w) if w == "starts_with" => Predicate::StartsWith(expect_string(&mut sc)?.0),
        Tok::Word(w) => return Err(TextError::new(at, format!("unknown predicate `{w}`"))),
        _ => return Err(TextError::new(at, "expected a predicate")),
    };
    match sc.next()? {
        (Tok::End, _) => Ok(pred),
        (_, at) => Err(TextError::new(at, "unexpected text after the predicate")),
    }
}

/// Resolves names and checks the action shape.
pub fn resolve(
    ast: &ActionAst,
    kind: &dyn Fn(&str) -> Option<KindId>,
    lexer: &dyn Fn(&str) -> Option<LexerId>,
) -> Result<Action, String> {
    let action = resolve_names(ast, kind, lexer)?;
    action.check_shape()?;
    Ok(action)
}

fn resolve_names(
    ast: &ActionAst,
    kind: &dyn Fn(&str) -> Option<KindId>,
    lexer: &dyn Fn(&str) -> Option<LexerId>,
) -> Result<Action, String> {
    let kind_of = |k: &str| kind(k).ok_or_else(|| format!("token kind `{k}` is not declared"));
    Ok(match ast {
        ActionAst::Ret(k) => Action::Ret(kind_of(k)?),
        ActionAst::RetL(k) => Action::RetL(kind_of(k)?),
        ActionAst::Raise(m) => Action::Raise(m.clone()),
        ActionAst::RaiseL(m) => Action::RaiseL(m.clone()),
        ActionAst::NewLine => Action::NewLine,
        ActionAst::Seq(steps) => Action::Seq(
            steps
                .iter()
                .map(|s| resolve_names(s, kind, lexer))
                .collect::<Result<_, _>>()?,
        ),
        ActionAst::Call(name) => {
            Action::Call(lexer(name).ok_or_else(|| format!("unknown lexer `{name}`"))?)
        }
        ActionAst::SetVar(k, t) => Action::SetVar(k.clone(), t.clone()),
        ActionAst::AppendLexeme(k) => Action::AppendLexeme(k.clone()),
    })
}

pub struct Quoted<'a>(pub &'a [u8]);

impl fmt::Display for Quoted<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_quoted(f, self.0)
    }
}

fn template_text(t: &Template) -> Vec<u8> {
    let mut out = Vec::new();
    for part in &t.0 {
        match part {
            TemplatePart::Text(bytes) => {
                for &b in bytes {
                    if b == b'$' {
                        out.push(b'$');
                    }
                    out.push(b);
                }
            }
            TemplatePart::Lexeme => out.extend_from_slice(b"$lexeme"),
        }
    }
    out
}

/// Same text as [`derivlex_core::engine::ActionText`] for the resolved
/// action.
impl fmt::Display for ActionAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ActionAst::Ret(k) => write!(f, "ret {k}"),
            ActionAst::RetL(k) => write!(f, "ret_l {k}"),
            ActionAst::Raise(m) => write!(f, "raise {}", Quoted(m.as_bytes())),
            ActionAst::RaiseL(m) => write!(f, "raise_l {}", Quoted(m.as_bytes())),
            ActionAst::NewLine => f.write_str("new_line"),
            ActionAst::Seq(steps) => {
                f.write_str("sequence [")?;
                for (i, s) in steps.iter().enumerate() {
                    if i > 0 {
                        f.write_str("; ")?;
                    }
                    write!(f, "{s}")?;
                }
                f.write_str("]")
            }
            ActionAst::Call(l) => f.write_str(l),
            ActionAst::SetVar(k, t) => write!(f, "set_var {k} {}", Quoted(&template_text(t))),
            ActionAst::AppendLexeme(k) => write!(f, "append_lexeme {k}"),
        }
    }
}
