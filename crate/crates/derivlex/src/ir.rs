//! Line-oriented text format for compiled lexer tables.
//!
//! ```text
//! derivlex-ir 1
//! kinds ID Number Eof
//! eof Eof
//! lexer minlexer longest 0
//! action 0 sequence [new_line; minlexer]
//! re 0 sym(0a)
//! fn 1 eof
//! end
//! ```
//!
//! `eof -` marks a table without an eof kind. Actions are listed in index
//! order, then regexp rules, then function rules. See `docs/ir-format.md`.

use std::fmt::Write;

use derivlex_core::engine::ActionText;
use derivlex_core::{
    parse_canonical, ActionRef, CompiledLexer, FnRule, LexerId, LexerTable, Policy, RegexpRule,
};

use crate::action_text;

pub const MAGIC: &str = "derivlex-ir";
pub const VERSION: u32 = 1;

#[derive(Clone, PartialEq, Eq, Debug, thiserror::Error)]
pub enum IrError {
    #[error("not a derivlex IR file (expected `{MAGIC} {VERSION}` on the first line)")]
    Missing,
    #[error("unsupported IR version {0} (this build reads version {VERSION})")]
    Version(String),
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
}

fn malformed(line: usize, message: impl Into<String>) -> IrError {
    IrError::Malformed {
        line,
        message: message.into(),
    }
}

pub fn save_ir(table: &LexerTable) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{MAGIC} {VERSION}");
    out.push_str("kinds");
    for k in &table.kinds {
        out.push(' ');
        out.push_str(k);
    }
    out.push('\n');
    match table.eof {
        Some(k) => {
            let _ = writeln!(out, "eof {}", table.kind_name(k));
        }
        None => out.push_str("eof -\n"),
    }
    for lx in &table.lexers {
        let policy = match lx.policy {
            Policy::Longest => "longest",
            Policy::Shortest => "shortest",
        };
        let _ = writeln!(out, "lexer {} {policy} {}", lx.name, lx.group);
        for (i, action) in lx.actions.iter().enumerate() {
            let _ = writeln!(out, "action {i} {}", ActionText { action, table });
        }
        for r in &lx.re_rules {
            let _ = writeln!(out, "re {} {}", r.action.0, r.pattern);
        }
        for r in &lx.fn_rules {
            let _ = writeln!(out, "fn {} {}", r.action.0, r.predicate);
        }
        out.push_str("end\n");
    }
    out
}

fn split_word(s: &str) -> (&str, &str) {
    match s.split_once(' ') {
        Some((w, rest)) => (w, rest),
        None => (s, ""),
    }
}

fn index(line: usize, text: &str) -> Result<u32, IrError> {
    text.parse()
        .map_err(|_| malformed(line, format!("expected an index, found `{text}`")))
}

pub fn load_ir(text: &str) -> Result<LexerTable, IrError> {
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim().is_empty())
        .collect();
    let mut it = lines.iter().copied();
    match it.next().map(|(_, l)| split_word(l.trim())) {
        Some((MAGIC, v)) if v == VERSION.to_string() => {}
        Some((MAGIC, v)) => return Err(IrError::Version(v.to_string())),
        _ => return Err(IrError::Missing),
    }
    let mut table = LexerTable::default();
    match it.next() {
        Some((n, l)) => match split_word(l) {
            ("kinds", rest) => table.kinds = rest.split_whitespace().map(String::from).collect(),
            _ => return Err(malformed(n, "expected `kinds`")),
        },
        None => return Err(malformed(0, "missing `kinds` line")),
    }
    match it.next() {
        Some((n, l)) => match split_word(l) {
            ("eof", "-") => {}
            ("eof", k) => {
                table.eof = Some(
                    table
                        .kind_id(k)
                        .ok_or_else(|| malformed(n, format!("eof kind `{k}` is not declared")))?,
                )
            }
            _ => return Err(malformed(n, "expected `eof`")),
        },
        None => return Err(malformed(0, "missing `eof` line")),
    }
    // Lexer names are needed to resolve calls before the bodies are read.
    let names: Vec<&str> = lines
        .iter()
        .filter_map(|(_, l)| l.strip_prefix("lexer "))
        .map(|rest| split_word(rest).0)
        .collect();
    let lexer_of = |name: &str| {
        names
            .iter()
            .position(|n| *n == name)
            .map(|i| LexerId(i as u32))
    };
    let mut current: Option<CompiledLexer> = None;
    for (n, line) in it {
        let (word, rest) = split_word(line);
        if word == "lexer" {
            if current.is_some() {
                return Err(malformed(n, "`lexer` before `end`"));
            }
            let parts: Vec<&str> = rest.split(' ').collect();
            let [name, policy, group] = parts[..] else {
                return Err(malformed(n, "expected `lexer NAME POLICY GROUP`"));
            };
            let policy = match policy {
                "longest" => Policy::Longest,
                "shortest" => Policy::Shortest,
                _ => return Err(malformed(n, format!("unknown policy `{policy}`"))),
            };
            current = Some(CompiledLexer {
                name: name.into(),
                policy,
                re_rules: Vec::new(),
                fn_rules: Vec::new(),
                actions: Vec::new(),
                group: index(n, group)?,
            });
            continue;
        }
        let Some(lx) = current.as_mut() else {
            return Err(malformed(n, format!("`{word}` outside a lexer block")));
        };
        match word {
            "end" => table.lexers.push(current.take().unwrap()),
            "action" => {
                let (i, body) = split_word(rest);
                if index(n, i)? as usize != lx.actions.len() {
                    return Err(malformed(n, "actions must be listed in index order"));
                }
                let ast = action_text::parse_action(body)
                    .map_err(|e| malformed(n, format!("column {}: {}", e.offset + 1, e.message)))?;
                let kind = |k: &str| {
                    table
                        .kinds
                        .iter()
                        .position(|x| x == k)
                        .map(|i| derivlex_core::KindId(i as u32))
                };
                let action =
                    action_text::resolve(&ast, &kind, &lexer_of).map_err(|m| malformed(n, m))?;
                lx.actions.push(action);
            }
            "re" => {
                let (i, body) = split_word(rest);
                let pattern = parse_canonical(body).map_err(|e| {
                    malformed(
                        n,
                        format!("column {}: expected {}", e.offset + 1, e.expected),
                    )
                })?;
                lx.re_rules.push(RegexpRule {
                    pattern,
                    action: ActionRef(index(n, i)?),
                });
            }
            "fn" => {
                let (i, body) = split_word(rest);
                let predicate =
                    action_text::parse_predicate(body).map_err(|e| malformed(n, e.message))?;
                lx.fn_rules.push(FnRule {
                    predicate,
                    action: ActionRef(index(n, i)?),
                });
            }
            _ => return Err(malformed(n, format!("unknown entry `{word}`"))),
        }
    }
    if current.is_some() {
        return Err(malformed(lines.last().map_or(0, |l| l.0), "missing `end`"));
    }
    table.validate().map_err(|e| malformed(0, e.to_string()))?;
    Ok(table)
}
