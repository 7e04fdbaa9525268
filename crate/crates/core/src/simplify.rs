//! Smart constructors and the simplifying derivative.
//!
//! Each constructor only inspects the node it is building; there is no global
//! rewriting. Clauses are tried in a fixed order so results are deterministic.

use crate::regex::{Kind, Regexp, Symbol};

/// `∅ + r ≡ r`, `r + ∅ ≡ r`.
pub fn simp_alt(e1: Regexp, e2: Regexp) -> Regexp {
    if e1.is_empty_set() {
        e2
    } else if e2.is_empty_set() {
        e1
    } else {
        Regexp::alt(e1, e2)
    }
}

/// `r · ∅ ≡ ∅`, `∅ · r ≡ ∅`, `r · ε ≡ r`, `ε · r ≡ r`, `r* · r* ≡ r*`.
///
/// The last identity fires only when both star bodies are structurally equal.
pub fn simp_cat(e1: Regexp, e2: Regexp) -> Regexp {
    if e2.is_empty_set() {
        return e2;
    }
    if e1.is_empty_set() {
        return e1;
    }
    if e2.is_epsilon() {
        return e1;
    }
    if e1.is_epsilon() {
        return e2;
    }
    if let (Kind::Star(a), Kind::Star(b)) = (e1.kind(), e2.kind()) {
        if a == b {
            return e1;
        }
    }
    Regexp::cat(e1, e2)
}

/// `∅* ≡ ε`, `(r*)* ≡ r*`, `ε* ≡ ε`.
pub fn simp_star(e: Regexp) -> Regexp {
    match e.kind() {
        Kind::Empty | Kind::Epsilon => Regexp::epsilon(),
        Kind::Star(_) => e,
        _ => Regexp::star(e),
    }
}

/// `r − ∅ ≡ r`, `∅ − r ≡ ∅`.
pub fn simp_diff(e1: Regexp, e2: Regexp) -> Regexp {
    if e2.is_empty_set() || e1.is_empty_set() {
        e1
    } else {
        Regexp::diff(e1, e2)
    }
}

/// Derivative with every rebuilt node passed through the smart constructors.
/// Language-equal to [`crate::regex::derive`] and never larger.
pub fn simp_derive(r: &Regexp, c: Symbol) -> Regexp {
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
        Kind::Alt(a, b) => simp_alt(simp_derive(a, c), simp_derive(b, c)),
        Kind::Cat(a, b) => {
            let head = simp_cat(simp_derive(a, c), b.clone());
            if a.is_nullable() {
                simp_alt(head, simp_derive(b, c))
            } else {
                head
            }
        }
        Kind::Star(e) => simp_cat(simp_derive(e, c), simp_star(e.clone())),
        Kind::Diff(a, b) => simp_diff(simp_derive(a, c), simp_derive(b, c)),
    }
}
