//! Longest (l-score) and shortest (s-score) matching prefix lengths.
//!
//! [`l_score`] and [`s_score`] follow the inductive definitions literally
//! with the unsimplified derivative: the l-score always walks to the end of
//! the input. The `_fast` variants derive through the smart constructors and
//! stop as soon as the current regexp is `∅` or (for the l-score) `ε`, and
//! return the lexeme/remaining split along with the score.
//!
//! Every variant has a `_with` form taking a [`ReadMeter`] that is told about
//! each input symbol the scorer consumes. The plain forms pass `()`, which
//! compiles to nothing.

use core::cell::Cell;
use core::cmp::Ordering;

use crate::regex::{derive, Regexp, Symbol};
use crate::simplify::simp_derive;

/// Length of the longest matching prefix, or `NoMatch` (−∞).
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum LScore {
    NoMatch,
    Len(usize),
}

/// Length of the shortest matching prefix, or `NoMatch` (∞).
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum SScore {
    NoMatch,
    Len(usize),
}

impl LScore {
    /// Matched length, `None` for no match.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(self) -> Option<usize> {
        match self {
            LScore::NoMatch => None,
            LScore::Len(n) => Some(n),
        }
    }
}

impl SScore {
    /// Matched length, `None` for no match.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(self) -> Option<usize> {
        match self {
            SScore::NoMatch => None,
            SScore::Len(n) => Some(n),
        }
    }
}

/// −∞ is below every length.
impl Ord for LScore {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (LScore::NoMatch, LScore::NoMatch) => Ordering::Equal,
            (LScore::NoMatch, _) => Ordering::Less,
            (_, LScore::NoMatch) => Ordering::Greater,
            (LScore::Len(a), LScore::Len(b)) => a.cmp(b),
        }
    }
}

impl PartialOrd for LScore {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// ∞ is above every length.
impl Ord for SScore {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (SScore::NoMatch, SScore::NoMatch) => Ordering::Equal,
            (SScore::NoMatch, _) => Ordering::Greater,
            (_, SScore::NoMatch) => Ordering::Less,
            (SScore::Len(a), SScore::Len(b)) => a.cmp(b),
        }
    }
}

impl PartialOrd for SScore {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A score together with the input split it induces.
///
/// `lexeme ++ remaining` is always the scored input; on `NoMatch` the lexeme
/// is empty.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct ScoredSplit<'s, S> {
    pub score: S,
    pub lexeme: &'s [u8],
    pub remaining: &'s [u8],
}

impl<'s, S> ScoredSplit<'s, S> {
    fn at(score: S, input: &'s [u8], n: usize) -> Self {
        let (lexeme, remaining) = input.split_at(n);
        ScoredSplit {
            score,
            lexeme,
            remaining,
        }
    }
}

/// Observer for the number of input symbols a scorer reads.
pub trait ReadMeter {
    #[inline]
    fn record(&self, _reads: usize) {}
}

impl ReadMeter for () {}

impl<M: ReadMeter + ?Sized> ReadMeter for &M {
    #[inline]
    fn record(&self, reads: usize) {
        (**self).record(reads)
    }
}

/// A single-run read counter.
#[derive(Default, Debug)]
pub struct ReadCounter {
    reads: Cell<u64>,
}

impl ReadCounter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self) -> u64 {
        self.reads.get()
    }

    pub fn reset(&self) {
        self.reads.set(0);
    }
}

impl ReadMeter for ReadCounter {
    #[inline]
    fn record(&self, reads: usize) {
        self.reads.set(self.reads.get() + reads as u64);
    }
}

/// The first `min(m, |s|)` symbols of `s`.
pub fn prefix(s: &[u8], m: usize) -> &[u8] {
    &s[..m.min(s.len())]
}

pub fn l_score(r: &Regexp, s: &[u8]) -> LScore {
    l_score_with(r, s, &())
}

/// Reads every symbol of `s`; the score is the last position at which the
/// running derivative is nullable (the tail score takes priority over 0).
pub fn l_score_with<M: ReadMeter>(r: &Regexp, s: &[u8], meter: &M) -> LScore {
    let mut best = if r.is_nullable() {
        LScore::Len(0)
    } else {
        LScore::NoMatch
    };
    let mut cur = r.clone();
    for (i, &c) in s.iter().enumerate() {
        cur = derive(&cur, Symbol(c));
        if cur.is_nullable() {
            best = LScore::Len(i + 1);
        }
    }
    meter.record(s.len());
    best
}

pub fn s_score(r: &Regexp, s: &[u8]) -> SScore {
    s_score_with(r, s, &())
}

/// Stops at the first nullable derivative; otherwise reads to the end.
pub fn s_score_with<M: ReadMeter>(r: &Regexp, s: &[u8], meter: &M) -> SScore {
    let mut cur = r.clone();
    for (i, &c) in s.iter().enumerate() {
        if cur.is_nullable() {
            meter.record(i);
            return SScore::Len(i);
        }
        cur = derive(&cur, Symbol(c));
    }
    meter.record(s.len());
    if cur.is_nullable() {
        SScore::Len(s.len())
    } else {
        SScore::NoMatch
    }
}

pub fn l_score_fast<'s>(r: &Regexp, s: &'s [u8]) -> ScoredSplit<'s, LScore> {
    l_score_fast_with(r, s, &())
}

pub fn l_score_fast_with<'s, M: ReadMeter>(
    r: &Regexp,
    s: &'s [u8],
    meter: &M,
) -> ScoredSplit<'s, LScore> {
    let mut best = if r.is_nullable() { Some(0) } else { None };
    let mut cur = r.clone();
    let mut read = 0;
    for (i, &c) in s.iter().enumerate() {
        // ∅ can no longer match; ε has already been recorded at offset i.
        if cur.is_empty_set() || cur.is_epsilon() {
            break;
        }
        read += 1;
        cur = simp_derive(&cur, Symbol(c));
        if cur.is_nullable() {
            best = Some(i + 1);
        }
    }
    meter.record(read);
    match best {
        Some(n) => ScoredSplit::at(LScore::Len(n), s, n),
        None => ScoredSplit::at(LScore::NoMatch, s, 0),
    }
}

pub fn s_score_fast<'s>(r: &Regexp, s: &'s [u8]) -> ScoredSplit<'s, SScore> {
    s_score_fast_with(r, s, &())
}

pub fn s_score_fast_with<'s, M: ReadMeter>(
    r: &Regexp,
    s: &'s [u8],
    meter: &M,
) -> ScoredSplit<'s, SScore> {
    let mut cur = r.clone();
    let mut i = 0;
    loop {
        if cur.is_nullable() {
            meter.record(i);
            return ScoredSplit::at(SScore::Len(i), s, i);
        }
        if cur.is_empty_set() || i == s.len() {
            meter.record(i);
            return ScoredSplit::at(SScore::NoMatch, s, 0);
        }
        cur = simp_derive(&cur, Symbol(s[i]));
        i += 1;
    }
}
