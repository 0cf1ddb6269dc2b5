use super::Expr;

/// Prints `e` in the concrete syntax. For trees whose capture names are
/// valid identifiers, `parse(render(e))` gives back `e`.
pub fn render(e: &Expr) -> String {
    let mut out = String::new();
    match e {
        Expr::Epsilon => out.push_str("()"),
        _ => write(e, &mut out),
    }
    out
}

fn write(e: &Expr, out: &mut String) {
    match e {
        Expr::Literal(c) => {
            if matches!(c, '(' | ')' | '|' | '*' | '\\' | '$') {
                out.push('\\');
            }
            out.push(*c);
        }
        Expr::Epsilon => out.push_str("()"),
        Expr::Union(l, r) => {
            if matches!(**l, Expr::Union(..)) {
                group(l, out);
            } else {
                write_branch(l, out);
            }
            out.push('|');
            if matches!(**r, Expr::Union(..)) {
                write(r, out);
            } else {
                write_branch(r, out);
            }
        }
        Expr::Concat(l, r) => {
            if matches!(**l, Expr::Union(..) | Expr::Concat(..)) {
                group(l, out);
            } else {
                write(l, out);
            }
            if matches!(**r, Expr::Union(..)) {
                group(r, out);
            } else {
                write(r, out);
            }
        }
        Expr::Star(b) => {
            if matches!(**b, Expr::Union(..) | Expr::Concat(..)) {
                group(b, out);
            } else {
                write(b, out);
            }
            out.push('*');
        }
        Expr::Capture(b, x) => {
            out.push_str("(?<");
            out.push_str(x);
            out.push('>');
            body(b, out);
            out.push(')');
        }
        Expr::Backref(x) => {
            out.push_str("\\k<");
            out.push_str(x);
            out.push('>');
        }
        Expr::PosLookahead(b) => {
            out.push_str("(?=");
            body(b, out);
            out.push(')');
        }
        Expr::NegLookahead(b) => {
            out.push_str("(?!");
            body(b, out);
            out.push(')');
        }
    }
}

/// A union branch: a bare ε prints as nothing.
fn write_branch(e: &Expr, out: &mut String) {
    if *e != Expr::Epsilon {
        write(e, out);
    }
}

fn body(e: &Expr, out: &mut String) {
    if *e != Expr::Epsilon {
        write(e, out);
    }
}

fn group(e: &Expr, out: &mut String) {
    out.push('(');
    body(e, out);
    out.push(')');
}

#[cfg(test)]
mod tests {
    use super::super::{parse, Alphabet};
    use super::*;

    fn roundtrip(text: &str) {
        let sigma = Alphabet::new("ab#*(".chars()).unwrap();
        let e = parse(text, &sigma).unwrap();
        let r = render(&e);
        assert_eq!(parse(&r, &sigma).unwrap(), e, "{text} rendered as {r}");
    }

    #[test]
    fn renders_basic() {
        let sigma = Alphabet::new("ab#".chars()).unwrap();
        let e = parse(r"(?<x>(a|b)*)#\k<x>", &sigma).unwrap();
        assert_eq!(render(&e), r"(?<x>(a|b)*)#\k<x>");
        assert_eq!(render(&Expr::Epsilon), "()");
        assert_eq!(render(&Expr::pos(Expr::Epsilon)), "(?=)");
    }

    #[test]
    fn roundtrips() {
        for t in [
            "",
            "a|",
            "|a",
            "(ab)c",
            "(a|b)|a",
            "a(b|a)",
            "(ab)*",
            "a**",
            r"\*\(",
            "()()",
            "(?=a)(?!b)",
            "((a|b)(a|#))*",
            "(|)|",
        ] {
            let t = t.replace('c', "a");
            roundtrip(&t);
        }
    }

    #[test]
    fn left_nested_concat_keeps_shape() {
        let e = Expr::cat(Expr::cat(Expr::lit('a'), Expr::lit('b')), Expr::lit('a'));
        let sigma = Alphabet::new("ab".chars()).unwrap();
        assert_eq!(parse(&render(&e), &sigma).unwrap(), e);
    }
}
