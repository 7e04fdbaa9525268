//! Regular expressions over 8-bit symbols, nullability and Brzozowski
//! derivatives.
//!
//! A [`Regexp`] is an immutable, reference-counted tree. Every node caches its
//! nullability, its size and whether it is *inert* (the naive derivative of
//! the node by any symbol is structurally the node itself, e.g. `∅` or
//! `∅ · r`). Inert nodes are returned shared by [`derive`], which keeps the
//! unsimplified derivative usable on long inputs without changing its result.

use alloc::sync::Arc;
use core::fmt;

/// An 8-bit character code. Symbols are ordered by code.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Symbol(pub u8);

impl From<u8> for Symbol {
    fn from(b: u8) -> Self {
        Symbol(b)
    }
}

impl Symbol {
    /// `lo ≤ self ≤ hi` in code order.
    #[inline]
    pub fn within(self, lo: Symbol, hi: Symbol) -> bool {
        lo <= self && self <= hi
    }
}

/// The shape of a regexp node.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Kind {
    /// Matches nothing.
    Empty,
    /// Matches only the empty string.
    Epsilon,
    Sym(Symbol),
    /// Any single symbol other than the given one.
    NotSym(Symbol),
    /// Any single symbol.
    Wildcard,
    /// A single symbol `c` with `lo ≤ c ≤ hi`. Empty when `hi < lo`.
    Range(Symbol, Symbol),
    /// A single symbol outside `lo..=hi`. Same as the wildcard when `hi < lo`.
    NotRange(Symbol, Symbol),
    Alt(Regexp, Regexp),
    Cat(Regexp, Regexp),
    Star(Regexp),
    /// Strings matched by the left operand and not by the right one.
    Diff(Regexp, Regexp),
}

struct Node {
    kind: Kind,
    nullable: bool,
    inert: bool,
    size: usize,
}

/// A regular expression.
#[derive(Clone)]
pub struct Regexp(Arc<Node>);

impl Regexp {
    pub fn new(kind: Kind) -> Self {
        let (nullable, inert, size) = match &kind {
            Kind::Empty => (false, true, 1),
            Kind::Epsilon => (true, false, 1),
            Kind::Sym(_)
            | Kind::NotSym(_)
            | Kind::Wildcard
            | Kind::Range(..)
            | Kind::NotRange(..) => (false, false, 1),
            Kind::Alt(a, b) => (
                a.is_nullable() || b.is_nullable(),
                a.is_inert() && b.is_inert(),
                1 + a.size() + b.size(),
            ),
            Kind::Cat(a, b) => (
                a.is_nullable() && b.is_nullable(),
                !a.is_nullable() && a.is_inert(),
                1 + a.size() + b.size(),
            ),
            Kind::Star(e) => (true, false, 1 + e.size()),
            Kind::Diff(a, b) => (
                a.is_nullable() && !b.is_nullable(),
                a.is_inert() && b.is_inert(),
                1 + a.size() + b.size(),
            ),
        };
        Regexp(Arc::new(Node {
            kind,
            nullable,
            inert,
            size,
        }))
    }

    pub fn empty() -> Self {
        Self::new(Kind::Empty)
    }

    pub fn epsilon() -> Self {
        Self::new(Kind::Epsilon)
    }

    pub fn sym(c: u8) -> Self {
        Self::new(Kind::Sym(Symbol(c)))
    }

    pub fn not_sym(c: u8) -> Self {
        Self::new(Kind::NotSym(Symbol(c)))
    }

    pub fn wildcard() -> Self {
        Self::new(Kind::Wildcard)
    }

    pub fn range(lo: u8, hi: u8) -> Self {
        Self::new(Kind::Range(Symbol(lo), Symbol(hi)))
    }

    pub fn not_range(lo: u8, hi: u8) -> Self {
        Self::new(Kind::NotRange(Symbol(lo), Symbol(hi)))
    }

    pub fn alt(a: Regexp, b: Regexp) -> Self {
        Self::new(Kind::Alt(a, b))
    }

    pub fn cat(a: Regexp, b: Regexp) -> Self {
        Self::new(Kind::Cat(a, b))
    }

    pub fn star(e: Regexp) -> Self {
        Self::new(Kind::Star(e))
    }

    pub fn diff(a: Regexp, b: Regexp) -> Self {
        Self::new(Kind::Diff(a, b))
    }

    /// Right-nested concatenation of the symbols of `s`; `ε` for `""`.
    pub fn literal(s: &[u8]) -> Self {
        match s.split_last() {
            None => Self::epsilon(),
            Some((&last, init)) => init
                .iter()
                .rev()
                .fold(Self::sym(last), |acc, &c| Self::cat(Self::sym(c), acc)),
        }
    }

    #[inline]
    pub fn kind(&self) -> &Kind {
        &self.0.kind
    }

    #[inline]
    pub fn is_nullable(&self) -> bool {
        self.0.nullable
    }

    /// True when the naive derivative by any symbol is this very regexp.
    #[inline]
    pub fn is_inert(&self) -> bool {
        self.0.inert
    }

    /// Node count, at least 1.
    #[inline]
    pub fn size(&self) -> usize {
        self.0.size
    }

    #[inline]
    pub fn is_empty_set(&self) -> bool {
        matches!(self.kind(), Kind::Empty)
    }

    #[inline]
    pub fn is_epsilon(&self) -> bool {
        matches!(self.kind(), Kind::Epsilon)
    }

    pub fn ptr_eq(a: &Regexp, b: &Regexp) -> bool {
        Arc::ptr_eq(&a.0, &b.0)
    }
}

impl PartialEq for Regexp {
    fn eq(&self, other: &Self) -> bool {
        Regexp::ptr_eq(self, other) || (self.size() == other.size() && self.kind() == other.kind())
    }
}

impl Eq for Regexp {}

/// `true` iff the empty string belongs to the language of `r`.
#[inline]
pub fn nullable(r: &Regexp) -> bool {
    r.is_nullable()
}

/// The Brzozowski derivative of `r` by `c`, without any simplification.
pub fn derive(r: &Regexp, c: Symbol) -> Regexp {
    if r.is_inert() {
        return r.clone();
    }
    let accept = |ok: bool| {
        if ok {
            Regexp::epsilon()
        } else {
            Regexp::empty()
        }
    };
    match r.kind() {
        Kind::Empty | Kind::Epsilon => Regexp::empty(),
        Kind::Sym(a) => accept(*a == c),
        Kind::NotSym(a) => accept(*a != c),
        Kind::Wildcard => Regexp::epsilon(),
        Kind::Range(lo, hi) => accept(c.within(*lo, *hi)),
        Kind::NotRange(lo, hi) => accept(!c.within(*lo, *hi)),
        Kind::Alt(a, b) => Regexp::alt(derive(a, c), derive(b, c)),
        Kind::Cat(a, b) => {
            let head = Regexp::cat(derive(a, c), b.clone());
            if a.is_nullable() {
                Regexp::alt(head, derive(b, c))
            } else {
                head
            }
        }
        Kind::Star(e) => Regexp::cat(derive(e, c), r.clone()),
        Kind::Diff(a, b) => Regexp::diff(derive(a, c), derive(b, c)),
    }
}

/// Derivative by a whole string, folding [`derive`] from left to right.
pub fn derive_str(r: &Regexp, s: &[u8]) -> Regexp {
    s.iter().fold(r.clone(), |acc, &c| derive(&acc, Symbol(c)))
}

/// Membership by derivation: `s ∈ L(r)` iff `r ∥ s` is nullable.
pub fn matches(r: &Regexp, s: &[u8]) -> bool {
    derive_str(r, s).is_nullable()
}

/// Canonical prefix rendering, e.g. `cat(sym(61), star(range(61, 7a)))`.
impl fmt::Display for Regexp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind() {
            Kind::Empty => f.write_str("empty"),
            Kind::Epsilon => f.write_str("eps"),
            Kind::Sym(a) => write!(f, "sym({:02x})", a.0),
            Kind::NotSym(a) => write!(f, "nsym({:02x})", a.0),
            Kind::Wildcard => f.write_str("any"),
            Kind::Range(l, u) => write!(f, "range({:02x}, {:02x})", l.0, u.0),
            Kind::NotRange(l, u) => write!(f, "nrange({:02x}, {:02x})", l.0, u.0),
            Kind::Alt(a, b) => write!(f, "alt({}, {})", a, b),
            Kind::Cat(a, b) => write!(f, "cat({}, {})", a, b),
            Kind::Star(e) => write!(f, "star({})", e),
            Kind::Diff(a, b) => write!(f, "diff({}, {})", a, b),
        }
    }
}

impl fmt::Debug for Regexp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Error from [`parse_canonical`]: byte offset and what was expected there.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalError {
    pub offset: usize,
    pub expected: &'static str,
}

impl fmt::Display for CanonicalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "expected {} at offset {}", self.expected, self.offset)
    }
}

/// Parses the rendering produced by `Display`. Whitespace between tokens is
/// ignored.
pub fn parse_canonical(text: &str) -> Result<Regexp, CanonicalError> {
    let mut p = CanonParser {
        src: text.as_bytes(),
        pos: 0,
    };
    let r = p.regexp()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("end of input"));
    }
    Ok(r)
}

struct CanonParser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl CanonParser<'_> {
    fn err(&self, expected: &'static str) -> CanonicalError {
        CanonicalError {
            offset: self.pos,
            expected,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn eat(&mut self, b: u8, expected: &'static str) -> Result<(), CanonicalError> {
        self.skip_ws();
        if self.src.get(self.pos) == Some(&b) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(expected))
        }
    }

    fn word(&mut self) -> &[u8] {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_lowercase() {
            self.pos += 1;
        }
        &self.src[start..self.pos]
    }

    fn hex(&mut self) -> Result<u8, CanonicalError> {
        self.skip_ws();
        let digits = self
            .src
            .get(self.pos..self.pos + 2)
            .ok_or_else(|| self.err("two hex digits"))?;
        let val = |d: u8| match d {
            b'0'..=b'9' => Some(d - b'0'),
            b'a'..=b'f' => Some(d - b'a' + 10),
            b'A'..=b'F' => Some(d - b'A' + 10),
            _ => None,
        };
        match (val(digits[0]), val(digits[1])) {
            (Some(h), Some(l)) => {
                self.pos += 2;
                Ok(h * 16 + l)
            }
            _ => Err(self.err("two hex digits")),
        }
    }

    fn unary_sym(&mut self) -> Result<u8, CanonicalError> {
        self.eat(b'(', "'('")?;
        let a = self.hex()?;
        self.eat(b')', "')'")?;
        Ok(a)
    }

    fn binary_sym(&mut self) -> Result<(u8, u8), CanonicalError> {
        self.eat(b'(', "'('")?;
        let a = self.hex()?;
        self.eat(b',', "','")?;
        let b = self.hex()?;
        self.eat(b')', "')'")?;
        Ok((a, b))
    }

    fn binary(&mut self) -> Result<(Regexp, Regexp), CanonicalError> {
        self.eat(b'(', "'('")?;
        let a = self.regexp()?;
        self.eat(b',', "','")?;
        let b = self.regexp()?;
        self.eat(b')', "')'")?;
        Ok((a, b))
    }

    fn regexp(&mut self) -> Result<Regexp, CanonicalError> {
        let start = self.pos;
        let r = match self.word() {
            b"empty" => Regexp::empty(),
            b"eps" => Regexp::epsilon(),
            b"any" => Regexp::wildcard(),
            b"sym" => Regexp::sym(self.unary_sym()?),
            b"nsym" => Regexp::not_sym(self.unary_sym()?),
            b"range" => {
                let (l, u) = self.binary_sym()?;
                Regexp::range(l, u)
            }
            b"nrange" => {
                let (l, u) = self.binary_sym()?;
                Regexp::not_range(l, u)
            }
            b"alt" => {
                let (a, b) = self.binary()?;
                Regexp::alt(a, b)
            }
            b"cat" => {
                let (a, b) = self.binary()?;
                Regexp::cat(a, b)
            }
            b"diff" => {
                let (a, b) = self.binary()?;
                Regexp::diff(a, b)
            }
            b"star" => {
                self.eat(b'(', "'('")?;
                let e = self.regexp()?;
                self.eat(b')', "')'")?;
                Regexp::star(e)
            }
            _ => {
                self.pos = start;
                self.skip_ws();
                return Err(self.err("a regexp constructor"));
            }
        };
        Ok(r)
    }
}
