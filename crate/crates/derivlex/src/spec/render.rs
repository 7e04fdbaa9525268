//! Pretty-printer for spec files; parsing its output gives back the same
//! tree.

use std::fmt::Write;

use derivlex_core::Policy;

use super::ast::{Pattern, SetItem, SpecFile, Surface};
use crate::action_text::Quoted;

fn char_lit(out: &mut String, c: u8) {
    match c {
        b'\'' => out.push_str("'\\''"),
        b'\\' => out.push_str("'\\\\'"),
        b'\n' => out.push_str("'\\n'"),
        b'\t' => out.push_str("'\\t'"),
        0x20..=0x7e => {
            out.push('\'');
            out.push(c as char);
            out.push('\'');
        }
        _ => {
            let _ = write!(out, "'\\x{c:02x}'");
        }
    }
}

/// Binding strength: alternation 0, difference 1, concatenation 2,
/// postfix 3, atoms 4.
fn level(sr: &Surface) -> u8 {
    match sr {
        Surface::Alt(..) => 0,
        Surface::Diff(..) => 1,
        Surface::Cat(..) => 2,
        Surface::Star(_) | Surface::Plus(_) | Surface::Opt(_) => 3,
        _ => 4,
    }
}

fn surface_at(out: &mut String, sr: &Surface, min: u8) {
    if level(sr) < min {
        out.push('(');
        surface_at(out, sr, 0);
        out.push(')');
        return;
    }
    match sr {
        Surface::Char(c) => char_lit(out, *c),
        Surface::Str(s) => {
            let _ = write!(out, "{}", Quoted(s));
        }
        Surface::Any => out.push('_'),
        Surface::Set { negated, items } => {
            out.push('[');
            if *negated {
                out.push('^');
            }
            for (i, item) in items.iter().enumerate() {
                if i > 0 || *negated {
                    out.push(' ');
                }
                match *item {
                    SetItem::Char(c) => char_lit(out, c),
                    SetItem::Range(lo, hi) => {
                        char_lit(out, lo);
                        out.push('-');
                        char_lit(out, hi);
                    }
                }
            }
            out.push(']');
        }
        Surface::Alt(a, b) => {
            surface_at(out, a, 0);
            out.push_str(" | ");
            surface_at(out, b, 1);
        }
        Surface::Diff(a, b) => {
            surface_at(out, a, 1);
            out.push_str(" - ");
            surface_at(out, b, 2);
        }
        Surface::Cat(a, b) => {
            surface_at(out, a, 2);
            out.push(' ');
            surface_at(out, b, 3);
        }
        Surface::Star(e) | Surface::Plus(e) | Surface::Opt(e) => {
            surface_at(out, e, 3);
            out.push(match sr {
                Surface::Star(_) => '*',
                Surface::Plus(_) => '+',
                _ => '?',
            });
        }
        Surface::Name(n) => out.push_str(n),
    }
}

pub fn render_surface(sr: &Surface) -> String {
    let mut out = String::new();
    surface_at(&mut out, sr, 0);
    out
}

pub fn render(sf: &SpecFile) -> String {
    let mut out = String::new();
    if !sf.kinds.is_empty() || sf.eof.is_some() {
        out.push_str("{\n");
        if !sf.kinds.is_empty() {
            let _ = writeln!(out, "%token {}", sf.kinds.join(" "));
        }
        if let Some(eof) = &sf.eof {
            let _ = writeln!(out, "%eof {eof}");
        }
        out.push_str("}\n\n");
    }
    for def in &sf.regexp_defs {
        let _ = writeln!(out, "let {} = {}", def.name, render_surface(&def.body));
    }
    if !sf.regexp_defs.is_empty() {
        out.push('\n');
    }
    for (g, section) in sf.sections.iter().enumerate() {
        for (i, lx) in section.iter().enumerate() {
            let keyword = match (g, i) {
                (0, 0) => "rule",
                (_, 0) => "then",
                _ => "and",
            };
            let policy = match lx.policy {
                Policy::Longest => "parse",
                Policy::Shortest => "shortest",
            };
            let _ = writeln!(out, "{keyword} {} = {policy}", lx.name);
            for rule in &lx.rules {
                let pattern = match &rule.pattern {
                    Pattern::Regexp(sr) => render_surface(sr),
                    Pattern::Eof => "eof".into(),
                    Pattern::Predicate(p) => format!("$({p})"),
                };
                let _ = writeln!(out, "  | {pattern} {{ {} }}", rule.action);
            }
        }
    }
    if let Some(trailer) = &sf.trailer {
        let _ = writeln!(out, "\n{{{trailer}}}");
    }
    out
}
