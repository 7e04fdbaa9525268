//! Recursive-descent parser for `.vl` files.
//!
//! ```text
//! file     := header? item*
//! header   := '{' directive* '}'
//! item     := directive | 'let' NAME '=' re | rules
//! rules    := 'rule' lexer (('and' | 'then' | 'rule') lexer)* trailer?
//! lexer    := NAME '=' ('parse' | 'shortest') rule+
//! rule     := '|'? pattern '{' action '}'
//! pattern  := 'eof' | '$' '(' predicate ')' | re
//! re       := diff ('|' diff)*
//! diff     := cat ('-' cat)*
//! cat      := post post*
//! post     := atom ('*' | '+' | '?')*
//! atom     := CHAR | STRING | '_' | '[' '^'? item* ']' | '(' re ')' | NAME
//! ```

use std::collections::HashSet;

use derivlex_core::Policy;

use super::ast::{LexerDef, Pattern, Pos, RegexpDef, RuleDef, SetItem, SpecFile, Surface};
use super::SpecError;
use crate::action_text::{self, is_word_byte, read_quoted, unescape, TextError};

const RESERVED: &[&str] = &["rule", "parse", "shortest", "and", "then", "let", "eof"];

#[derive(Clone, PartialEq, Eq, Debug)]
enum Tok {
    Word(String),
    Directive(String),
    Char(u8),
    Str(Vec<u8>),
    Punct(u8),
    LBrace,
    RBrace,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Word(w) => format!("`{w}`"),
            Tok::Directive(d) => format!("`%{d}`"),
            Tok::Char(_) => "a character literal".into(),
            Tok::Str(_) => "a string literal".into(),
            Tok::Punct(p) => format!("`{}`", *p as char),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

struct Lexer<'a> {
    src: &'a [u8],
    at: usize,
    line_starts: Vec<usize>,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        let src = text.as_bytes();
        let mut line_starts = vec![0];
        line_starts.extend(
            src.iter()
                .enumerate()
                .filter(|(_, &b)| b == b'\n')
                .map(|(i, _)| i + 1),
        );
        Lexer {
            src,
            at: 0,
            line_starts,
        }
    }

    fn pos(&self, offset: usize) -> Pos {
        let line = self.line_starts.partition_point(|&s| s <= offset);
        Pos {
            line,
            col: offset - self.line_starts[line - 1] + 1,
        }
    }

    fn err(&self, offset: usize, message: impl Into<String>) -> SpecError {
        SpecError {
            pos: self.pos(offset),
            message: message.into(),
        }
    }

    fn text_err(&self, base: usize, e: TextError) -> SpecError {
        self.err(base + e.offset, e.message)
    }

    fn skip_trivia(&mut self) -> Result<(), SpecError> {
        loop {
            match self.src.get(self.at) {
                Some(b) if b.is_ascii_whitespace() => self.at += 1,
                Some(b'(') if self.src.get(self.at + 1) == Some(&b'*') => {
                    let start = self.at;
                    let mut depth = 0;
                    loop {
                        if self.src[self.at..].starts_with(b"(*") {
                            depth += 1;
                            self.at += 2;
                        } else if self.src[self.at..].starts_with(b"*)") {
                            depth -= 1;
                            self.at += 2;
                            if depth == 0 {
                                break;
                            }
                        } else if self.at >= self.src.len() {
                            return Err(self.err(start, "unterminated comment"));
                        } else {
                            self.at += 1;
                        }
                    }
                }
                _ => return Ok(()),
            }
        }
    }

    /// Next token and the offset it starts at.
    fn next(&mut self) -> Result<(Tok, usize), SpecError> {
        self.skip_trivia()?;
        let start = self.at;
        let Some(&b) = self.src.get(start) else {
            return Ok((Tok::End, start));
        };
        let tok = match b {
            b'\'' => {
                let (c, used) = match self.src.get(start + 1) {
                    Some(b'\\') => {
                        unescape(self.src, start + 1).map_err(|e| self.text_err(0, e))?
                    }
                    Some(&c) if c != b'\'' => (c, 1),
                    _ => return Err(self.err(start, "malformed character literal")),
                };
                if self.src.get(start + 1 + used) != Some(&b'\'') {
                    return Err(self.err(start, "malformed character literal"));
                }
                self.at = start + used + 2;
                Tok::Char(c)
            }
            b'"' => {
                let (bytes, end) = read_quoted(self.src, start).map_err(|e| self.text_err(0, e))?;
                self.at = end;
                Tok::Str(bytes)
            }
            b'{' => {
                self.at += 1;
                Tok::LBrace
            }
            b'}' => {
                self.at += 1;
                Tok::RBrace
            }
            b'%' => {
                self.at += 1;
                let w = self.word();
                if w.is_empty() {
                    return Err(self.err(start, "expected a directive name after `%`"));
                }
                Tok::Directive(w)
            }
            b'=' | b'|' | b'(' | b')' | b'[' | b']' | b'^' | b'-' | b'*' | b'+' | b'?' | b'$' => {
                self.at += 1;
                Tok::Punct(b)
            }
            _ if is_word_byte(b) => {
                let w = self.word();
                if w == "_" {
                    Tok::Punct(b'_')
                } else {
                    Tok::Word(w)
                }
            }
            _ => {
                return Err(self.err(
                    start,
                    format!("unexpected character `{}`", b.escape_ascii()),
                ))
            }
        };
        Ok((tok, start))
    }

    fn word(&mut self) -> String {
        let start = self.at;
        while self.src.get(self.at).copied().is_some_and(is_word_byte) {
            self.at += 1;
        }
        String::from_utf8_lossy(&self.src[start..self.at]).into_owned()
    }

    fn peek(&mut self) -> Result<(Tok, usize), SpecError> {
        let save = self.at;
        let t = self.next();
        self.at = save;
        t
    }

    /// Raw text up to the `close` byte that balances `open`, skipping over
    /// string literals. The cursor must be just past the opening byte.
    fn raw_until(
        &mut self,
        open: u8,
        close: u8,
        start: usize,
    ) -> Result<(String, usize), SpecError> {
        let body = self.at;
        let mut depth = 1;
        loop {
            match self.src.get(self.at) {
                None => return Err(self.err(start, format!("unclosed `{}`", open as char))),
                Some(b'"') => {
                    let (_, end) =
                        read_quoted(self.src, self.at).map_err(|e| self.text_err(0, e))?;
                    self.at = end;
                }
                Some(&b) if b == open => {
                    depth += 1;
                    self.at += 1;
                }
                Some(&b) if b == close => {
                    depth -= 1;
                    self.at += 1;
                    if depth == 0 {
                        let text = &self.src[body..self.at - 1];
                        return Ok((String::from_utf8_lossy(text).into_owned(), body));
                    }
                }
                Some(_) => self.at += 1,
            }
        }
    }
}

struct Parser<'a> {
    lx: Lexer<'a>,
    spec: SpecFile,
    names: HashSet<String>,
}

fn starts_atom(tok: &Tok) -> bool {
    match tok {
        Tok::Char(_) | Tok::Str(_) => true,
        Tok::Punct(p) => matches!(p, b'_' | b'[' | b'('),
        Tok::Word(w) => !RESERVED.contains(&w.as_str()) || w == "eof",
        _ => false,
    }
}

impl<'a> Parser<'a> {
    fn expect_punct(&mut self, p: u8) -> Result<usize, SpecError> {
        match self.lx.next()? {
            (Tok::Punct(q), at) if q == p => Ok(at),
            (t, at) => Err(self.lx.err(
                at,
                format!("expected `{}`, found {}", p as char, t.describe()),
            )),
        }
    }

    fn expect_name(&mut self, what: &str) -> Result<(String, usize), SpecError> {
        match self.lx.next()? {
            (Tok::Word(w), at) if !RESERVED.contains(&w.as_str()) => Ok((w, at)),
            (t, at) => Err(self
                .lx
                .err(at, format!("expected {what}, found {}", t.describe()))),
        }
    }

    fn is_eof_word(&self, w: &str) -> bool {
        w == "eof" || (w == "EOF" && !self.names.contains("EOF"))
    }

    fn file(&mut self) -> Result<(), SpecError> {
        if let (Tok::LBrace, _) = self.lx.peek()? {
            self.lx.next()?;
            loop {
                match self.lx.peek()? {
                    (Tok::RBrace, _) => {
                        self.lx.next()?;
                        break;
                    }
                    (Tok::Directive(_), _) => self.directive()?,
                    (Tok::End, at) => return Err(self.lx.err(at, "unclosed header block")),
                    (t, at) => {
                        return Err(self.lx.err(
                            at,
                            format!("expected a directive in the header, found {}", t.describe()),
                        ));
                    }
                }
            }
        }
        loop {
            match self.lx.peek()? {
                (Tok::End, _) => return Ok(()),
                (Tok::Directive(_), _) => self.directive()?,
                (Tok::Word(w), _) if w == "let" => self.let_def()?,
                (Tok::Word(w), _) if w == "rule" => return self.rules(),
                (t, at) => {
                    return Err(self.lx.err(
                        at,
                        format!(
                            "expected `let`, `rule` or a directive, found {}",
                            t.describe()
                        ),
                    ))
                }
            }
        }
    }

    fn directive(&mut self) -> Result<(), SpecError> {
        let (Tok::Directive(d), at) = self.lx.next()? else {
            unreachable!()
        };
        match d.as_str() {
            "token" => {
                let mut any = false;
                while let (Tok::Word(w), wat) = self.lx.peek()? {
                    if RESERVED.contains(&w.as_str()) {
                        break;
                    }
                    self.lx.next()?;
                    if self.spec.kinds.contains(&w) {
                        return Err(self
                            .lx
                            .err(wat, format!("token kind `{w}` is declared twice")));
                    }
                    self.spec.kinds.push(w);
                    any = true;
                }
                if !any {
                    return Err(self.lx.err(at, "`%token` needs at least one kind"));
                }
            }
            "eof" => {
                let (w, wat) = match self.lx.next()? {
                    (Tok::Word(w), wat) => (w, wat),
                    (t, wat) => {
                        return Err(self.lx.err(
                            wat,
                            format!("expected a token kind, found {}", t.describe()),
                        ))
                    }
                };
                if !self.spec.kinds.contains(&w) {
                    return Err(self
                        .lx
                        .err(wat, format!("`%eof` names undeclared token kind `{w}`")));
                }
                if self.spec.eof.is_some() {
                    return Err(self.lx.err(at, "`%eof` is given twice"));
                }
                self.spec.eof = Some(w);
            }
            _ => return Err(self.lx.err(at, format!("unknown directive `%{d}`"))),
        }
        Ok(())
    }

    fn let_def(&mut self) -> Result<(), SpecError> {
        self.lx.next()?;
        let (name, at) = self.expect_name("a regexp name")?;
        if self.names.contains(&name) {
            return Err(self.lx.err(at, format!("regexp `{name}` is defined twice")));
        }
        self.expect_punct(b'=')?;
        let body = self.regexp()?;
        self.names.insert(name.clone());
        self.spec.regexp_defs.push(RegexpDef {
            name,
            body,
            pos: self.lx.pos(at),
        });
        Ok(())
    }

    fn rules(&mut self) -> Result<(), SpecError> {
        self.lx.next()?;
        let mut section = vec![self.lexer_def(&[])?];
        loop {
            match self.lx.peek()? {
                (Tok::Word(w), _) if w == "and" => {
                    self.lx.next()?;
                    let def = self.lexer_def(&section)?;
                    section.push(def);
                }
                (Tok::Word(w), _) if w == "then" || w == "rule" => {
                    self.lx.next()?;
                    self.spec.sections.push(std::mem::take(&mut section));
                    section.push(self.lexer_def(&[])?);
                }
                (Tok::LBrace, at) => {
                    self.spec.sections.push(section);
                    self.lx.at = at + 1;
                    let (text, _) = self.lx.raw_until(b'{', b'}', at)?;
                    self.spec.trailer = Some(text);
                    return match self.lx.next()? {
                        (Tok::End, _) => Ok(()),
                        (t, at) => Err(self.lx.err(
                            at,
                            format!(
                                "expected end of input after the trailer, found {}",
                                t.describe()
                            ),
                        )),
                    };
                }
                (Tok::End, _) => {
                    self.spec.sections.push(section);
                    return Ok(());
                }
                (t, at) => {
                    return Err(self.lx.err(
                        at,
                        format!(
                            "expected a rule, `and`, `then` or end of input, found {}",
                            t.describe()
                        ),
                    ))
                }
            }
        }
    }

    /// `open` holds the lexers of the section still being read.
    fn lexer_def(&mut self, open: &[LexerDef]) -> Result<LexerDef, SpecError> {
        let (name, at) = self.expect_name("a lexer name")?;
        if action_text::KEYWORDS.contains(&name.as_str()) {
            return Err(self.lx.err(
                at,
                format!("`{name}` is an action keyword and cannot name a lexer"),
            ));
        }
        if self.spec.lexers().chain(open).any(|l| l.name == name) {
            return Err(self.lx.err(at, format!("lexer `{name}` is defined twice")));
        }
        self.expect_punct(b'=')?;
        let policy = match self.lx.next()? {
            (Tok::Word(w), _) if w == "parse" => Policy::Longest,
            (Tok::Word(w), _) if w == "shortest" => Policy::Shortest,
            (t, at) => {
                return Err(self.lx.err(
                    at,
                    format!("expected `parse` or `shortest`, found {}", t.describe()),
                ))
            }
        };
        let mut rules = Vec::new();
        loop {
            let (tok, _) = self.lx.peek()?;
            if tok == Tok::Punct(b'|') {
                self.lx.next()?;
            } else if !(starts_atom(&tok) || tok == Tok::Punct(b'$')) {
                break;
            }
            rules.push(self.rule()?);
        }
        if rules.is_empty() {
            return Err(self.lx.err(at, format!("lexer `{name}` has no rules")));
        }
        Ok(LexerDef {
            name,
            policy,
            rules,
            pos: self.lx.pos(at),
        })
    }

    fn rule(&mut self) -> Result<RuleDef, SpecError> {
        let pattern = match self.lx.peek()? {
            (Tok::Word(w), _) if self.is_eof_word(&w) => {
                self.lx.next()?;
                Pattern::Eof
            }
            (Tok::Punct(b'$'), _) => {
                self.lx.next()?;
                let open = self.expect_punct(b'(')?;
                let (text, base) = self.lx.raw_until(b'(', b')', open)?;
                let pred =
                    action_text::parse_predicate(&text).map_err(|e| self.lx.text_err(base, e))?;
                Pattern::Predicate(pred)
            }
            _ => Pattern::Regexp(self.regexp()?),
        };
        let (tok, at) = self.lx.next()?;
        if tok != Tok::LBrace {
            return Err(self.lx.err(
                at,
                format!("expected `{{` to start an action, found {}", tok.describe()),
            ));
        }
        let (text, base) = self.lx.raw_until(b'{', b'}', at)?;
        let action = action_text::parse_action(&text).map_err(|e| self.lx.text_err(base, e))?;
        Ok(RuleDef {
            pattern,
            action,
            pos: self.lx.pos(at),
        })
    }

    fn regexp(&mut self) -> Result<Surface, SpecError> {
        let mut left = self.diff()?;
        while let (Tok::Punct(b'|'), _) = self.lx.peek()? {
            self.lx.next()?;
            left = Surface::Alt(Box::new(left), Box::new(self.diff()?));
        }
        Ok(left)
    }

    fn diff(&mut self) -> Result<Surface, SpecError> {
        let mut left = self.cat()?;
        while let (Tok::Punct(b'-'), _) = self.lx.peek()? {
            self.lx.next()?;
            left = Surface::Diff(Box::new(left), Box::new(self.cat()?));
        }
        Ok(left)
    }

    fn cat(&mut self) -> Result<Surface, SpecError> {
        let mut left = self.postfix()?;
        while starts_atom(&self.lx.peek()?.0) {
            left = Surface::Cat(Box::new(left), Box::new(self.postfix()?));
        }
        Ok(left)
    }

    fn postfix(&mut self) -> Result<Surface, SpecError> {
        let mut e = self.atom()?;
        loop {
            e = match self.lx.peek()?.0 {
                Tok::Punct(b'*') => Surface::Star(Box::new(e)),
                Tok::Punct(b'+') => Surface::Plus(Box::new(e)),
                Tok::Punct(b'?') => Surface::Opt(Box::new(e)),
                _ => return Ok(e),
            };
            self.lx.next()?;
        }
    }

    fn atom(&mut self) -> Result<Surface, SpecError> {
        let (tok, at) = self.lx.next()?;
        Ok(match tok {
            Tok::Char(c) => Surface::Char(c),
            Tok::Str(s) => Surface::Str(s),
            Tok::Punct(b'_') => Surface::Any,
            Tok::Punct(b'(') => {
                let e = self.regexp()?;
                self.expect_punct(b')')?;
                e
            }
            Tok::Punct(b'[') => self.set()?,
            Tok::Word(w) if self.is_eof_word(&w) => {
                return Err(self
                    .lx
                    .err(at, "`eof` can only be used as the whole pattern of a rule"))
            }
            Tok::Word(w) if !RESERVED.contains(&w.as_str()) => {
                if !self.names.contains(&w) {
                    return Err(self.lx.err(at, format!("regexp `{w}` is not defined")));
                }
                Surface::Name(w)
            }
            t => {
                return Err(self
                    .lx
                    .err(at, format!("expected a regexp, found {}", t.describe())))
            }
        })
    }

    fn set(&mut self) -> Result<Surface, SpecError> {
        let negated = if let (Tok::Punct(b'^'), _) = self.lx.peek()? {
            self.lx.next()?;
            true
        } else {
            false
        };
        let mut items = Vec::new();
        loop {
            match self.lx.next()? {
                (Tok::Punct(b']'), _) => break,
                (Tok::Char(lo), _) => {
                    if let (Tok::Punct(b'-'), _) = self.lx.peek()? {
                        self.lx.next()?;
                        match self.lx.next()? {
                            (Tok::Char(hi), _) => items.push(SetItem::Range(lo, hi)),
                            (t, at) => {
                                return Err(self.lx.err(
                                    at,
                                    format!(
                                        "expected a character after `-`, found {}",
                                        t.describe()
                                    ),
                                ))
                            }
                        }
                    } else {
                        items.push(SetItem::Char(lo));
                    }
                }
                (t, at) => {
                    return Err(self.lx.err(
                        at,
                        format!(
                            "expected a character, a range or `]`, found {}",
                            t.describe()
                        ),
                    ))
                }
            }
        }
        Ok(Surface::Set { negated, items })
    }
}

/// Parses a `.vl` specification.
pub fn parse_spec(text: &str) -> Result<SpecFile, SpecError> {
    let mut p = Parser {
        lx: Lexer::new(text),
        spec: SpecFile::default(),
        names: HashSet::new(),
    };
    p.file()?;
    Ok(p.spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action_text::ActionAst;
    use derivlex_core::Predicate;

    fn parse(text: &str) -> SpecFile {
        parse_spec(text).unwrap_or_else(|e| panic!("{e}"))
    }

    #[test]
    fn precedence() {
        let s = parse("let x = 'a' 'b' * - 'c' | 'd'\n");
        let b = |s: Surface| Box::new(s);
        assert_eq!(
            s.regexp_defs[0].body,
            Surface::Alt(
                b(Surface::Diff(
                    b(Surface::Cat(
                        b(Surface::Char(b'a')),
                        b(Surface::Star(b(Surface::Char(b'b'))))
                    )),
                    b(Surface::Char(b'c'))
                )),
                b(Surface::Char(b'd'))
            )
        );
    }

    #[test]
    fn sets_and_escapes() {
        let s = parse(r#"let x = [^ 'a'-'z' '\n' '\x41'] "q\"" _"#);
        let Surface::Cat(set, _) = &s.regexp_defs[0].body else {
            panic!()
        };
        let Surface::Cat(set, q) = &**set else {
            panic!()
        };
        assert_eq!(
            **set,
            Surface::Set {
                negated: true,
                items: vec![
                    SetItem::Range(b'a', b'z'),
                    SetItem::Char(b'\n'),
                    SetItem::Char(b'A')
                ]
            }
        );
        assert_eq!(**q, Surface::Str(b"q\"".to_vec()));
    }

    #[test]
    fn groups_patterns_and_trailer() {
        let s = parse(
            "{ %token A B %eof B }\n\
             (* a (* nested *) comment *)\n\
             rule one = parse 'a' { ret A } | eof { ret B }\n\
             and two = shortest | $(starts_with \"}\") { one } $(always) { raise \"x\" }\n\
             then three = parse _ { two }\n\
             { trailing { text } }",
        );
        assert_eq!(s.kinds, vec!["A", "B"]);
        assert_eq!(s.eof.as_deref(), Some("B"));
        assert_eq!(s.sections.len(), 2);
        assert_eq!(s.sections[0].len(), 2);
        assert_eq!(s.sections[0][1].policy, Policy::Shortest);
        assert_eq!(
            s.sections[0][1].rules[0].pattern,
            Pattern::Predicate(Predicate::StartsWith(b"}".to_vec()))
        );
        assert_eq!(s.sections[0][0].rules[1].pattern, Pattern::Eof);
        assert_eq!(
            s.sections[1][0].rules[0].action,
            ActionAst::Call("two".into())
        );
        assert_eq!(s.trailer.as_deref(), Some(" trailing { text } "));
    }

    #[test]
    fn eof_alias_unless_bound() {
        let s = parse("%token T\nrule r = parse EOF { ret T }");
        assert_eq!(s.sections[0][0].rules[0].pattern, Pattern::Eof);
        let s = parse("%token T\nlet EOF = 'e'\nrule r = parse EOF { ret T }");
        assert_eq!(
            s.sections[0][0].rules[0].pattern,
            Pattern::Regexp(Surface::Name("EOF".into()))
        );
    }

    fn error_at(text: &str) -> (Pos, String) {
        let e = parse_spec(text).unwrap_err();
        (e.pos, e.message)
    }

    #[test]
    fn diagnostics() {
        let (pos, msg) = error_at("%token X\nrule r = parse\n| 'a' { bogus X }");
        assert_eq!(pos, Pos { line: 3, col: 9 });
        assert!(msg.contains("bogus"));
        let (pos, _) = error_at("rule r = parse 'a' { ret A }\nand r = parse 'b' { ret A }");
        assert_eq!(pos.line, 2);
        assert!(error_at("let x = y").1.contains("not defined"));
        assert!(error_at("%eof E").1.contains("undeclared"));
        assert!(error_at("rule r = parse").1.contains("no rules"));
        assert!(error_at("rule r = parse 'a' eof { ret A }")
            .1
            .contains("eof"));
        assert!(error_at("rule r = parse 'a { ret A }")
            .1
            .contains("character literal"));
        assert!(error_at("rule r = parse 'a' { ret A ")
            .1
            .contains("unclosed"));
        assert!(error_at("(* open").1.contains("comment"));
        assert!(error_at("let x = 'a'\nlet x = 'b'").1.contains("twice"));
        assert!(error_at("%token A A").1.contains("twice"));
        assert!(error_at("rule ret = parse 'a' { ret A }")
            .1
            .contains("keyword"));
        assert!(error_at("rule r = parse $(odd) { ret A }")
            .1
            .contains("odd"));
    }
}
