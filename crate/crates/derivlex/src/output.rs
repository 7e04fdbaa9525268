//! Token and error lines printed by `derivlex run`.
//!
//! Tab-separated tokens are `KIND<TAB>payload<TAB>line:col<TAB>line:col`
//! with tabs, newlines, backslashes and non-printable bytes of the payload
//! escaped. Errors are `ERROR<TAB>variant<TAB>message<TAB>line:col`.

use derivlex_core::{Halt, LexerTable, Spanned};
use serde_json::json;

pub fn escape_payload(bytes: &[u8]) -> String {
    let mut out = String::with_capacity(bytes.len());
    for &b in bytes {
        match b {
            b'\t' => out.push_str("\\t"),
            b'\n' => out.push_str("\\n"),
            b'\\' => out.push_str("\\\\"),
            0x20..=0x7e => out.push(b as char),
            _ => out.push_str(&format!("\\x{b:02x}")),
        }
    }
    out
}

pub fn token_tsv(table: &LexerTable, t: &Spanned) -> String {
    format!(
        "{}\t{}\t{}\t{}",
        table.kind_name(t.token.kind),
        t.token
            .payload
            .as_deref()
            .map(escape_payload)
            .unwrap_or_default(),
        t.start,
        t.end
    )
}

fn payload_json(bytes: &[u8]) -> serde_json::Value {
    match std::str::from_utf8(bytes) {
        Ok(s) => json!(s),
        Err(_) => json!(bytes),
    }
}

/// One JSON object per token. Payloads that are not UTF-8 are given as an
/// array of byte values.
pub fn token_json(table: &LexerTable, t: &Spanned) -> String {
    let pos = |p: derivlex_core::Position| json!({"line": p.line, "column": p.column, "offset": p.offset});
    json!({
        "kind": table.kind_name(t.token.kind),
        "payload": t.token.payload.as_deref().map(payload_json),
        "start": pos(t.start),
        "end": pos(t.end),
    })
    .to_string()
}

/// Variant name and message of a failed run; `None` for a clean one.
pub fn halt_parts(halt: &Halt<'_>) -> Option<(&'static str, String)> {
    Some(match halt {
        Halt::Eof => return None,
        Halt::NoFuel(_) => ("NoFuel", "out of fuel".into()),
        Halt::NoRuleMatched(b) if b.remaining().is_empty() => {
            ("NoRuleMatched", "no rule matches at end of input".into())
        }
        Halt::NoRuleMatched(_) => ("NoRuleMatched", "no rule matches".into()),
        Halt::Stalled(_) => (
            "Stalled",
            "too many consecutive empty tokens at one position".into(),
        ),
        Halt::UserError {
            message, lexeme, ..
        } if lexeme.is_empty() => ("UserError", message.clone()),
        Halt::UserError {
            message, lexeme, ..
        } => ("UserError", format!("{message} {}", escape_payload(lexeme))),
    })
}

pub fn error_line(halt: &Halt<'_>) -> Option<String> {
    let (variant, message) = halt_parts(halt)?;
    let pos = halt.position().expect("failed runs have a position");
    Some(format!(
        "ERROR\t{variant}\t{}\t{pos}",
        escape_payload(message.as_bytes())
    ))
}
