//! Rule election.
//!
//! Function rules are tried first, head to tail, and the first whose
//! predicate holds wins. Otherwise the regexp rules are scored and the best
//! score wins, the earliest rule winning ties.

use alloc::vec::Vec;

use crate::lexbuf::Position;
use crate::regex::Regexp;
use crate::score::{
    l_score_fast_with, l_score_with, s_score_fast_with, s_score_with, LScore, ReadMeter, SScore,
};

/// Index of an action program in its lexer's action table.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct ActionRef(pub u32);

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RegexpRule {
    pub pattern: Regexp,
    pub action: ActionRef,
}

/// The closed set of predicates a function rule may use.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Predicate {
    /// The remaining input is empty.
    Eof,
    StartsWith(Vec<u8>),
    Always,
}

/// What a predicate may inspect.
#[derive(Clone, Copy, Debug)]
pub struct PredicateContext<'s> {
    pub remaining: &'s [u8],
    pub position: Position,
}

impl<'s> PredicateContext<'s> {
    pub fn new(remaining: &'s [u8]) -> Self {
        PredicateContext {
            remaining,
            position: Position::START,
        }
    }
}

impl Predicate {
    pub fn eval(&self, ctx: &PredicateContext<'_>) -> bool {
        match self {
            Predicate::Eof => ctx.remaining.is_empty(),
            Predicate::StartsWith(lit) => ctx.remaining.starts_with(lit),
            Predicate::Always => true,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FnRule {
    pub predicate: Predicate,
    pub action: ActionRef,
}

/// Which prefix a regexp rule is scored on.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Policy {
    Longest,
    Shortest,
}

/// Which scorer implementation the electors use. Both elect identically;
/// `Naive` exists as a reference and baseline.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default)]
pub enum ScoreMode {
    Naive,
    #[default]
    Fast,
}

/// The outcome of rule election.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Election<'r, 's> {
    NotSelected,
    FnChoice(&'r FnRule),
    ReChoice {
        rule: &'r RegexpRule,
        len: usize,
        lexeme: &'s [u8],
        remaining: &'s [u8],
    },
}

impl<'r, 's> Election<'r, 's> {
    fn re(rule: &'r RegexpRule, s: &'s [u8], len: usize) -> Self {
        let (lexeme, remaining) = s.split_at(len);
        Election::ReChoice {
            rule,
            len,
            lexeme,
            remaining,
        }
    }
}

/// First function rule whose predicate holds.
pub fn select_fn<'r, 's>(rules: &'r [FnRule], ctx: &PredicateContext<'s>) -> Election<'r, 's> {
    rules
        .iter()
        .find(|rule| rule.predicate.eval(ctx))
        .map_or(Election::NotSelected, Election::FnChoice)
}

pub fn elect_longest<'r, 's>(rules: &'r [RegexpRule], s: &'s [u8]) -> Election<'r, 's> {
    elect_longest_with(rules, s, ScoreMode::Fast, &())
}

pub fn elect_longest_with<'r, 's, M: ReadMeter>(
    rules: &'r [RegexpRule],
    s: &'s [u8],
    mode: ScoreMode,
    meter: &M,
) -> Election<'r, 's> {
    let mut best: Option<(&RegexpRule, usize)> = None;
    for rule in rules {
        let score = match mode {
            ScoreMode::Fast => l_score_fast_with(&rule.pattern, s, meter).score,
            ScoreMode::Naive => l_score_with(&rule.pattern, s, meter),
        };
        if let LScore::Len(n) = score {
            if best.is_none_or(|(_, m)| n > m) {
                best = Some((rule, n));
            }
        }
    }
    best.map_or(Election::NotSelected, |(rule, n)| Election::re(rule, s, n))
}

pub fn elect_shortest<'r, 's>(rules: &'r [RegexpRule], s: &'s [u8]) -> Election<'r, 's> {
    elect_shortest_with(rules, s, ScoreMode::Fast, &())
}

pub fn elect_shortest_with<'r, 's, M: ReadMeter>(
    rules: &'r [RegexpRule],
    s: &'s [u8],
    mode: ScoreMode,
    meter: &M,
) -> Election<'r, 's> {
    let mut best: Option<(&RegexpRule, usize)> = None;
    for rule in rules {
        let score = match mode {
            ScoreMode::Fast => s_score_fast_with(&rule.pattern, s, meter).score,
            ScoreMode::Naive => s_score_with(&rule.pattern, s, meter),
        };
        if let SScore::Len(n) = score {
            if best.is_none_or(|(_, m)| n < m) {
                best = Some((rule, n));
            }
        }
    }
    best.map_or(Election::NotSelected, |(rule, n)| Election::re(rule, s, n))
}

/// Function rules first; the policy's elector only when none applies.
pub fn generalizing_elector<'r, 's>(
    policy: Policy,
    re_rules: &'r [RegexpRule],
    fn_rules: &'r [FnRule],
    ctx: &PredicateContext<'s>,
) -> Election<'r, 's> {
    generalizing_elector_with(policy, re_rules, fn_rules, ctx, ScoreMode::Fast, &())
}

pub fn generalizing_elector_with<'r, 's, M: ReadMeter>(
    policy: Policy,
    re_rules: &'r [RegexpRule],
    fn_rules: &'r [FnRule],
    ctx: &PredicateContext<'s>,
    mode: ScoreMode,
    meter: &M,
) -> Election<'r, 's> {
    match select_fn(fn_rules, ctx) {
        Election::NotSelected => match policy {
            Policy::Longest => elect_longest_with(re_rules, ctx.remaining, mode, meter),
            Policy::Shortest => elect_shortest_with(re_rules, ctx.remaining, mode, meter),
        },
        chosen => chosen,
    }
}
