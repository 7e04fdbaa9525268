//! Surface regexps to core regexps.

use std::collections::HashMap;

use derivlex_core::{simp_alt, simp_cat, simp_diff, simp_star, Regexp};

use super::ast::{SetItem, Surface};

/// Named regexps, already desugared.
pub type Env = HashMap<String, Regexp>;

fn set_item(item: &SetItem) -> Regexp {
    match *item {
        SetItem::Char(c) => Regexp::sym(c),
        SetItem::Range(lo, hi) => Regexp::range(lo, hi),
    }
}

/// Builds every composite node through the smart constructors.
/// `e+` becomes `e · e*` and `e?` becomes `e + ε`; names are inlined.
pub fn desugar(sr: &Surface, env: &Env) -> Result<Regexp, String> {
    let d = |e: &Surface| desugar(e, env);
    Ok(match sr {
        Surface::Char(c) => Regexp::sym(*c),
        Surface::Str(s) => Regexp::literal(s),
        Surface::Any => Regexp::wildcard(),
        Surface::Set { negated, items } => {
            let union = items
                .iter()
                .map(set_item)
                .reduce(simp_alt)
                .unwrap_or_else(Regexp::empty);
            if *negated {
                simp_diff(Regexp::wildcard(), union)
            } else {
                union
            }
        }
        Surface::Alt(a, b) => simp_alt(d(a)?, d(b)?),
        Surface::Cat(a, b) => simp_cat(d(a)?, d(b)?),
        Surface::Diff(a, b) => simp_diff(d(a)?, d(b)?),
        Surface::Star(e) => simp_star(d(e)?),
        Surface::Plus(e) => {
            let e = d(e)?;
            simp_cat(e.clone(), simp_star(e))
        }
        Surface::Opt(e) => simp_alt(d(e)?, Regexp::epsilon()),
        Surface::Name(n) => env
            .get(n)
            .cloned()
            .ok_or_else(|| format!("regexp `{n}` is not defined"))?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes() {
        let env = Env::new();
        let az = Surface::Set {
            negated: false,
            items: vec![SetItem::Range(b'a', b'z')],
        };
        assert_eq!(
            desugar(&Surface::Plus(Box::new(az)), &env).unwrap(),
            Regexp::cat(
                Regexp::range(b'a', b'z'),
                Regexp::star(Regexp::range(b'a', b'z'))
            )
        );
        assert_eq!(
            desugar(&Surface::Str(vec![]), &env).unwrap(),
            Regexp::epsilon()
        );
        let not_ab = Surface::Set {
            negated: true,
            items: vec![SetItem::Char(b'a'), SetItem::Char(b'b')],
        };
        assert_eq!(
            desugar(&not_ab, &env).unwrap(),
            Regexp::diff(
                Regexp::wildcard(),
                Regexp::alt(Regexp::sym(b'a'), Regexp::sym(b'b'))
            )
        );
        assert!(desugar(&Surface::Name("x".into()), &env).is_err());
    }
}
