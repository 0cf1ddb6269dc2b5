use super::{is_valid_name, Alphabet, Expr, SyntaxError};

/// Parses `text` over `sigma`.
///
/// Precedence is star > concatenation > union. Concatenation and union
/// chains nest to the right, and a group `(E)` yields `E` itself.
pub fn parse(text: &str, sigma: &Alphabet) -> Result<Expr, SyntaxError> {
    let mut p = Parser {
        src: text.chars().collect(),
        pos: 0,
        sigma,
    };
    let e = p.alternation()?;
    match p.peek() {
        None => Ok(e),
        Some(')') => Err(SyntaxError::Unbalanced { pos: p.pos }),
        Some(c) => Err(p.err(format!("unexpected {c:?}"))),
    }
}

/// Collects the literal symbols of `text` (plus `extra`) into a sorted
/// alphabet without checking the rest of the syntax.
pub fn infer_alphabet(text: &str, extra: &str) -> Result<Alphabet, SyntaxError> {
    let src: Vec<char> = text.chars().collect();
    let mut out: Vec<char> = extra.chars().collect();
    let mut i = 0;
    while i < src.len() {
        match src[i] {
            '\\' => {
                if src.get(i + 1) == Some(&'k') && src.get(i + 2) == Some(&'<') {
                    i = skip_name(&src, i + 3);
                } else if let Some(&c) = src.get(i + 1) {
                    out.push(c);
                    i += 2;
                } else {
                    i += 1;
                }
            }
            '(' => {
                if src.get(i + 1) == Some(&'?') {
                    if src.get(i + 2) == Some(&'<') {
                        i = skip_name(&src, i + 3);
                    } else {
                        i += 3;
                    }
                } else {
                    i += 1;
                }
            }
            ')' | '|' | '*' | '$' => i += 1,
            c => {
                out.push(c);
                i += 1;
            }
        }
    }
    Alphabet::from_set(out)
}

fn skip_name(src: &[char], mut i: usize) -> usize {
    while i < src.len() && src[i] != '>' {
        i += 1;
    }
    i + 1
}

struct Parser<'a> {
    src: Vec<char>,
    pos: usize,
    sigma: &'a Alphabet,
}

impl Parser<'_> {
    fn peek(&self) -> Option<char> {
        self.src.get(self.pos).copied()
    }

    fn err(&self, msg: impl Into<String>) -> SyntaxError {
        SyntaxError::Syntax {
            pos: self.pos,
            msg: msg.into(),
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn alternation(&mut self) -> Result<Expr, SyntaxError> {
        let mut branches = vec![self.concatenation()?];
        while self.eat('|') {
            branches.push(self.concatenation()?);
        }
        Ok(Expr::union_all(branches).expect("at least one branch"))
    }

    fn concatenation(&mut self) -> Result<Expr, SyntaxError> {
        let mut items = Vec::new();
        while let Some(c) = self.peek() {
            if c == '|' || c == ')' {
                break;
            }
            items.push(self.postfix()?);
        }
        Ok(Expr::concat_all(items))
    }

    fn postfix(&mut self) -> Result<Expr, SyntaxError> {
        if self.peek() == Some('*') {
            return Err(self.err("nothing to repeat"));
        }
        let mut e = self.atom()?;
        while self.eat('*') {
            e = Expr::star(e);
        }
        Ok(e)
    }

    fn atom(&mut self) -> Result<Expr, SyntaxError> {
        let start = self.pos;
        let c = self.peek().ok_or_else(|| self.err("unexpected end of input"))?;
        match c {
            '(' => {
                self.pos += 1;
                let kind = if self.eat('?') {
                    match self.peek() {
                        Some('=') => {
                            self.pos += 1;
                            Group::Pos
                        }
                        Some('!') => {
                            self.pos += 1;
                            Group::Neg
                        }
                        Some('<') => {
                            self.pos += 1;
                            Group::Capture(self.name()?)
                        }
                        _ => return Err(self.err("expected '=', '!' or '<' after '(?'")),
                    }
                } else {
                    Group::Plain
                };
                let body = self.alternation()?;
                if !self.eat(')') {
                    return Err(SyntaxError::Unbalanced { pos: start });
                }
                Ok(match kind {
                    Group::Plain => body,
                    Group::Pos => Expr::pos(body),
                    Group::Neg => Expr::neg(body),
                    Group::Capture(x) => Expr::capture(body, x),
                })
            }
            '\\' => {
                self.pos += 1;
                match self.peek() {
                    None => Err(self.err("dangling escape")),
                    Some('k') if self.src.get(self.pos + 1) == Some(&'<') => {
                        self.pos += 2;
                        Ok(Expr::backref(self.name()?))
                    }
                    Some(c) => {
                        self.pos += 1;
                        self.symbol(c, start)
                    }
                }
            }
            '$' => {
                self.pos += 1;
                Ok(Expr::end_of_input(self.sigma))
            }
            c => {
                self.pos += 1;
                self.symbol(c, start)
            }
        }
    }

    fn symbol(&self, c: char, pos: usize) -> Result<Expr, SyntaxError> {
        if self.sigma.contains(c) {
            Ok(Expr::Literal(c))
        } else {
            Err(SyntaxError::UnknownSymbol { pos, sym: c })
        }
    }

    /// Reads `name>` with the opening `<` already consumed.
    fn name(&mut self) -> Result<String, SyntaxError> {
        let start = self.pos;
        let mut s = String::new();
        loop {
            match self.peek() {
                Some('>') => {
                    self.pos += 1;
                    break;
                }
                Some(c) => {
                    s.push(c);
                    self.pos += 1;
                }
                None => {
                    return Err(SyntaxError::Syntax {
                        pos: start,
                        msg: "unterminated variable name".into(),
                    })
                }
            }
        }
        if !is_valid_name(&s) {
            return Err(SyntaxError::Syntax {
                pos: start,
                msg: format!("invalid variable name {s:?}"),
            });
        }
        Ok(s)
    }
}

enum Group {
    Plain,
    Pos,
    Neg,
    Capture(String),
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sigma(s: &str) -> Alphabet {
        Alphabet::new(s.chars()).unwrap()
    }

    #[test]
    fn parses_w_hash_w() {
        let e = parse(r"(?<x>(a|b)*)#\k<x>", &sigma("ab#")).unwrap();
        let expected = Expr::cat(
            Expr::capture(Expr::star(Expr::alt(Expr::lit('a'), Expr::lit('b'))), "x"),
            Expr::cat(Expr::lit('#'), Expr::backref("x")),
        );
        assert_eq!(e, expected);
    }

    #[test]
    fn empty_is_epsilon() {
        assert_eq!(parse("", &sigma("a")).unwrap(), Expr::Epsilon);
        assert_eq!(parse("()", &sigma("a")).unwrap(), Expr::Epsilon);
    }

    #[test]
    fn dollar_expands_over_sigma() {
        let e = parse("(?!a$|b)", &sigma("ab")).unwrap();
        let dollar = Expr::neg(Expr::alt(Expr::lit('a'), Expr::lit('b')));
        let expected = Expr::neg(Expr::alt(Expr::cat(Expr::lit('a'), dollar), Expr::lit('b')));
        assert_eq!(e, expected);
    }

    #[test]
    fn empty_branch_is_epsilon() {
        let e = parse("(|a)", &sigma("a")).unwrap();
        assert_eq!(e, Expr::alt(Expr::Epsilon, Expr::lit('a')));
    }

    #[test]
    fn star_binds_tighter_than_concat() {
        let e = parse("ab*", &sigma("ab")).unwrap();
        assert_eq!(e, Expr::cat(Expr::lit('a'), Expr::star(Expr::lit('b'))));
        let e = parse("a**", &sigma("a")).unwrap();
        assert_eq!(e, Expr::star(Expr::star(Expr::lit('a'))));
    }

    #[test]
    fn escapes() {
        let e = parse(r"\*\(", &sigma("*(")).unwrap();
        assert_eq!(e, Expr::word("*("));
    }

    #[test]
    fn errors() {
        assert!(matches!(parse("(a", &sigma("a")), Err(SyntaxError::Unbalanced { pos: 0 })));
        assert!(matches!(parse("a)", &sigma("a")), Err(SyntaxError::Unbalanced { pos: 1 })));
        assert!(matches!(
            parse("ac", &sigma("a")),
            Err(SyntaxError::UnknownSymbol { pos: 1, sym: 'c' })
        ));
        assert!(matches!(parse("*a", &sigma("a")), Err(SyntaxError::Syntax { .. })));
        assert!(matches!(parse(r"\k<1x>", &sigma("a")), Err(SyntaxError::Syntax { .. })));
        assert!(matches!(parse("(?<%fresh0>a)", &sigma("a")), Err(SyntaxError::Syntax { .. })));
        assert!(matches!(parse("(?x)", &sigma("ax")), Err(SyntaxError::Syntax { .. })));
    }

    #[test]
    fn infers_alphabet() {
        let s = infer_alphabet(r"(?<xy>(a|b)*)#\k<xy>\*$", "c").unwrap();
        assert_eq!(s.symbols(), &['#', '*', 'a', 'b', 'c']);
    }
}
