use std::collections::BTreeSet;

use super::{Expr, SyntaxError};

/// Prefix of generated capture names. User syntax cannot produce it.
pub const FRESH_PREFIX: &str = "%fresh";

/// Rewrites every capture `(?<x>E)` whose body mentions `x` into
/// `(?=(?<y>E))(?<x>\k<y>)` with `y` fresh, innermost captures first.
/// Afterwards no capture body mentions its own variable.
pub fn rename_captures(e: &Expr) -> Result<Expr, SyntaxError> {
    let mut used = BTreeSet::new();
    e.visit(&mut |n| match n {
        Expr::Capture(_, x) | Expr::Backref(x) => {
            used.insert(x.clone());
        }
        _ => {}
    });
    let mut fresh = Fresh { used, next: 0 };
    rename(e, &mut fresh)
}

struct Fresh {
    used: BTreeSet<String>,
    next: u32,
}

impl Fresh {
    fn take(&mut self) -> Result<String, SyntaxError> {
        loop {
            let name = format!("{FRESH_PREFIX}{}", self.next);
            self.next = self.next.checked_add(1).ok_or(SyntaxError::FreshNamesExhausted)?;
            if self.used.insert(name.clone()) {
                return Ok(name);
            }
        }
    }
}

fn rename(e: &Expr, fresh: &mut Fresh) -> Result<Expr, SyntaxError> {
    Ok(match e {
        Expr::Literal(_) | Expr::Epsilon | Expr::Backref(_) => e.clone(),
        Expr::Union(l, r) => Expr::alt(rename(l, fresh)?, rename(r, fresh)?),
        Expr::Concat(l, r) => Expr::cat(rename(l, fresh)?, rename(r, fresh)?),
        Expr::Star(b) => Expr::star(rename(b, fresh)?),
        Expr::PosLookahead(b) => Expr::pos(rename(b, fresh)?),
        Expr::NegLookahead(b) => Expr::neg(rename(b, fresh)?),
        Expr::Capture(b, x) => {
            let b = rename(b, fresh)?;
            if b.mentions(x) {
                let y = fresh.take()?;
                Expr::cat(
                    Expr::pos(Expr::capture(b, y.clone())),
                    Expr::capture(Expr::backref(y), x.clone()),
                )
            } else {
                Expr::capture(b, x.clone())
            }
        }
    })
}

/// Matches the shape produced by [`rename_captures`]:
/// `(?=(?<y>E))(?<x>\k<y>)` with `y` generated. Returns `(E, y, x)`.
pub fn as_rename_idiom(e: &Expr) -> Option<(&Expr, &str, &str)> {
    let Expr::Concat(l, r) = e else { return None };
    let Expr::PosLookahead(la) = &**l else { return None };
    let Expr::Capture(body, y) = &**la else { return None };
    let Expr::Capture(br, x) = &**r else { return None };
    match &**br {
        Expr::Backref(z) if z == y && y.starts_with(FRESH_PREFIX) => Some((body, y, x)),
        _ => None,
    }
}

/// Ensures every lookahead is the left operand of a concatenation by
/// rewriting a lookahead `L` found anywhere else into `Lε`.
pub fn normalize_lookahead_continuations(e: &Expr) -> Expr {
    match e {
        Expr::PosLookahead(_) | Expr::NegLookahead(_) => Expr::cat(normalize_la(e), Expr::Epsilon),
        _ => normalize_inner(e),
    }
}

fn normalize_la(e: &Expr) -> Expr {
    match e {
        Expr::PosLookahead(b) => Expr::pos(normalize_lookahead_continuations(b)),
        Expr::NegLookahead(b) => Expr::neg(normalize_lookahead_continuations(b)),
        _ => unreachable!("not a lookahead"),
    }
}

fn normalize_inner(e: &Expr) -> Expr {
    let n = normalize_lookahead_continuations;
    match e {
        Expr::Literal(_) | Expr::Epsilon | Expr::Backref(_) => e.clone(),
        Expr::Concat(l, r) if l.is_lookahead() => Expr::cat(normalize_la(l), n(r)),
        Expr::Concat(l, r) => Expr::cat(n(l), n(r)),
        Expr::Union(l, r) => Expr::alt(n(l), n(r)),
        Expr::Star(b) => Expr::star(n(b)),
        Expr::Capture(b, x) => Expr::capture(n(b), x.clone()),
        Expr::PosLookahead(_) | Expr::NegLookahead(_) => n(e),
    }
}

#[cfg(test)]
mod tests {
    use super::super::{parse, Alphabet};
    use super::*;

    fn p(t: &str) -> Expr {
        parse(t, &Alphabet::new("ab".chars()).unwrap()).unwrap()
    }

    #[test]
    fn renames_self_referencing_capture() {
        let e = p(r"(?<x>a\k<x>)");
        let r = rename_captures(&e).unwrap();
        let y = format!("{FRESH_PREFIX}0");
        let expected = Expr::cat(
            Expr::pos(Expr::capture(p(r"a\k<x>"), y.clone())),
            Expr::capture(Expr::backref(y.clone()), "x"),
        );
        assert_eq!(r, expected);
        assert_eq!(as_rename_idiom(&r).map(|(_, a, b)| (a.to_string(), b)), Some((y, "x")));
    }

    #[test]
    fn leaves_plain_captures() {
        let e = p(r"(?<x>a)\k<x>(?<y>\k<x>)");
        assert_eq!(rename_captures(&e).unwrap(), e);
    }

    #[test]
    fn innermost_first() {
        let e = p(r"(?<x>(?<x>\k<x>)\k<x>)");
        let r = rename_captures(&e).unwrap();
        let (outer_body, y, _) = as_rename_idiom(&r).unwrap();
        assert_eq!(y, "%fresh1");
        let Expr::Concat(inner, _) = outer_body else { panic!() };
        assert_eq!(as_rename_idiom(inner).unwrap().1, "%fresh0");
    }

    #[test]
    fn fresh_names_avoid_collisions() {
        let mut f = Fresh {
            used: ["%fresh0".to_string()].into_iter().collect(),
            next: 0,
        };
        assert_eq!(f.take().unwrap(), "%fresh1");
    }

    #[test]
    fn normalizes_bare_lookaheads() {
        let e = p("(?=a)|(?!b)a");
        let n = normalize_lookahead_continuations(&e);
        let expected = Expr::alt(
            Expr::cat(Expr::pos(Expr::lit('a')), Expr::Epsilon),
            Expr::cat(Expr::neg(Expr::lit('b')), Expr::lit('a')),
        );
        assert_eq!(n, expected);
        assert_eq!(normalize_lookahead_continuations(&n), n);
        let e = p("(?=(?=a))*");
        let n = normalize_lookahead_continuations(&e);
        let inner = Expr::cat(Expr::pos(Expr::lit('a')), Expr::Epsilon);
        assert_eq!(n, Expr::star(Expr::cat(Expr::pos(inner), Expr::Epsilon)));
    }
}
