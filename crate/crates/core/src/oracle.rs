//! Reference deciders that never take a derivative, and random generators
//! for differential testing.
//!
//! [`MatchTable`] decides membership of every substring of an input by
//! dynamic programming over intervals, straight from the set semantics of
//! each constructor. It is cubic and only meant for short strings.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::regex::{Kind, Regexp, Symbol};
use crate::score::{LScore, SScore};

/// `at(i, j)` holds iff the regexp matches `s[i..j]`.
pub struct MatchTable {
    n: usize,
    cells: Vec<bool>,
}

impl MatchTable {
    fn blank(n: usize) -> Self {
        MatchTable {
            n,
            cells: vec![false; (n + 1) * (n + 1)],
        }
    }

    pub fn at(&self, i: usize, j: usize) -> bool {
        self.cells[i * (self.n + 1) + j]
    }

    fn set(&mut self, i: usize, j: usize, v: bool) {
        self.cells[i * (self.n + 1) + j] = v;
    }

    pub fn build(r: &Regexp, s: &[u8]) -> Self {
        let n = s.len();
        let mut t = MatchTable::blank(n);
        let single = |t: &mut MatchTable, ok: &dyn Fn(Symbol) -> bool| {
            for (i, &c) in s.iter().enumerate() {
                t.set(i, i + 1, ok(Symbol(c)));
            }
        };
        match r.kind() {
            Kind::Empty => {}
            Kind::Epsilon => (0..=n).for_each(|i| t.set(i, i, true)),
            Kind::Sym(a) => single(&mut t, &|c| c == *a),
            Kind::NotSym(a) => single(&mut t, &|c| c != *a),
            Kind::Wildcard => single(&mut t, &|_| true),
            Kind::Range(lo, hi) => single(&mut t, &|c| *lo <= c && c <= *hi),
            Kind::NotRange(lo, hi) => single(&mut t, &|c| !(*lo <= c && c <= *hi)),
            Kind::Alt(a, b) | Kind::Diff(a, b) => {
                let (ta, tb) = (Self::build(a, s), Self::build(b, s));
                let alt = matches!(r.kind(), Kind::Alt(..));
                for i in 0..=n {
                    for j in i..=n {
                        let v = if alt {
                            ta.at(i, j) || tb.at(i, j)
                        } else {
                            ta.at(i, j) && !tb.at(i, j)
                        };
                        t.set(i, j, v);
                    }
                }
            }
            Kind::Cat(a, b) => {
                let (ta, tb) = (Self::build(a, s), Self::build(b, s));
                for i in 0..=n {
                    for j in i..=n {
                        t.set(i, j, (i..=j).any(|k| ta.at(i, k) && tb.at(k, j)));
                    }
                }
            }
            Kind::Star(e) => {
                let te = Self::build(e, s);
                for i in (0..=n).rev() {
                    t.set(i, i, true);
                    for j in i + 1..=n {
                        let v = (i + 1..=j).any(|k| te.at(i, k) && t.at(k, j));
                        t.set(i, j, v);
                    }
                }
            }
        }
        t
    }
}

pub fn oracle_matches(r: &Regexp, s: &[u8]) -> bool {
    MatchTable::build(r, s).at(0, s.len())
}

/// Largest `j` such that `r` matches `s[..j]`.
pub fn oracle_l_score(r: &Regexp, s: &[u8]) -> LScore {
    let t = MatchTable::build(r, s);
    (0..=s.len())
        .rev()
        .find(|&j| t.at(0, j))
        .map_or(LScore::NoMatch, LScore::Len)
}

/// Smallest `j` such that `r` matches `s[..j]`.
pub fn oracle_s_score(r: &Regexp, s: &[u8]) -> SScore {
    let t = MatchTable::build(r, s);
    (0..=s.len())
        .find(|&j| t.at(0, j))
        .map_or(SScore::NoMatch, SScore::Len)
}

/// Symbols used by the generators.
pub const ALPHABET: &[u8] = b"abcd";

/// A random regexp over [`ALPHABET`] using every constructor, at most
/// `depth` levels deep.
pub fn random_regexp<R: Rng + ?Sized>(rng: &mut R, depth: u32) -> Regexp {
    let sym = |rng: &mut R| ALPHABET[rng.gen_range(0..ALPHABET.len())];
    let leaf = depth == 0 || rng.gen_range(0..4) == 0;
    if leaf {
        return match rng.gen_range(0..7) {
            0 => Regexp::empty(),
            1 => Regexp::epsilon(),
            2 => Regexp::not_sym(sym(rng)),
            3 => Regexp::wildcard(),
            4 => {
                let (x, y) = (sym(rng), sym(rng));
                if rng.gen_bool(0.5) {
                    Regexp::range(x.min(y), x.max(y))
                } else {
                    Regexp::not_range(x.min(y), x.max(y))
                }
            }
            _ => Regexp::sym(sym(rng)),
        };
    }
    let d = depth - 1;
    match rng.gen_range(0..4) {
        0 => Regexp::alt(random_regexp(rng, d), random_regexp(rng, d)),
        1 => Regexp::cat(random_regexp(rng, d), random_regexp(rng, d)),
        2 => Regexp::star(random_regexp(rng, d)),
        _ => Regexp::diff(random_regexp(rng, d), random_regexp(rng, d)),
    }
}

/// A random string over [`ALPHABET`] of length at most `max_len`.
pub fn random_string<R: Rng + ?Sized>(rng: &mut R, max_len: usize) -> Vec<u8> {
    let len = rng.gen_range(0..=max_len);
    (0..len)
        .map(|_| ALPHABET[rng.gen_range(0..ALPHABET.len())])
        .collect()
}
