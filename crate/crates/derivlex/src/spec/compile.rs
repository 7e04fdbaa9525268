//! Spec files to lexer tables.

use derivlex_core::{ActionRef, CompiledLexer, FnRule, LexerTable, Predicate, RegexpRule};

use super::ast::{Pattern, SpecFile};
use super::desugar::{desugar, Env};
use super::SpecError;
use crate::action_text;

/// Lexers are numbered in definition order; each `then` section is a new
/// recursion group. Regexp rules and function rules keep their relative
/// order, and each rule's action index is its position in the lexer.
pub fn compile_spec(sf: &SpecFile) -> Result<LexerTable, SpecError> {
    let mut env = Env::new();
    for def in &sf.regexp_defs {
        let re = desugar(&def.body, &env).map_err(|m| SpecError::at(def.pos, m))?;
        env.insert(def.name.clone(), re);
    }
    let mut table = LexerTable {
        kinds: sf.kinds.clone(),
        eof: None,
        lexers: Vec::new(),
    };
    if let Some(eof) = &sf.eof {
        table.eof = Some(table.kind_id(eof).ok_or_else(|| {
            SpecError::at(
                Default::default(),
                format!("`%eof` names undeclared token kind `{eof}`"),
            )
        })?);
    }
    let group_of: Vec<(String, u32)> = sf
        .sections
        .iter()
        .enumerate()
        .flat_map(|(g, sec)| sec.iter().map(move |l| (l.name.clone(), g as u32)))
        .collect();
    for (g, section) in sf.sections.iter().enumerate() {
        for lx in section {
            let mut compiled = CompiledLexer {
                name: lx.name.clone(),
                policy: lx.policy,
                re_rules: Vec::new(),
                fn_rules: Vec::new(),
                actions: Vec::new(),
                group: g as u32,
            };
            for (i, rule) in lx.rules.iter().enumerate() {
                let action = ActionRef(i as u32);
                match &rule.pattern {
                    Pattern::Regexp(sr) => compiled.re_rules.push(RegexpRule {
                        pattern: desugar(sr, &env).map_err(|m| SpecError::at(rule.pos, m))?,
                        action,
                    }),
                    Pattern::Eof => compiled.fn_rules.push(FnRule {
                        predicate: Predicate::Eof,
                        action,
                    }),
                    Pattern::Predicate(p) => compiled.fn_rules.push(FnRule {
                        predicate: p.clone(),
                        action,
                    }),
                }
                let kind = |k: &str| table.kind_id(k);
                let lexer = |l: &str| {
                    group_of
                        .iter()
                        .position(|(n, _)| n == l)
                        .map(|i| derivlex_core::LexerId(i as u32))
                };
                let resolved = action_text::resolve(&rule.action, &kind, &lexer)
                    .map_err(|m| SpecError::at(rule.pos, m))?;
                if let derivlex_core::Action::Call(callee) = resolved.last_step() {
                    let (name, cg) = &group_of[callee.0 as usize];
                    if *cg > g as u32 {
                        return Err(SpecError::at(
                            rule.pos,
                            format!("`{name}` is defined in a later `then` section and cannot be called here"),
                        ));
                    }
                }
                compiled.actions.push(resolved);
            }
            table.lexers.push(compiled);
        }
    }
    table
        .validate()
        .map_err(|e| SpecError::at(Default::default(), e.to_string()))?;
    Ok(table)
}
