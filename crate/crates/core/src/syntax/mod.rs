//! Abstract syntax for regular expressions with backreferences and
//! lookaheads, together with the concrete text syntax and the two
//! source-to-source rewrites used by the machine compiler.
//!
//! Concrete syntax:
//!
//! | construct            | text            |
//! |----------------------|-----------------|
//! | union                | `E|F`           |
//! | concatenation        | `EF`            |
//! | Kleene star          | `E*`            |
//! | group                | `(E)`           |
//! | capture into `x`     | `(?<x>E)`       |
//! | backreference to `x` | `\k<x>`         |
//! | positive lookahead   | `(?=E)`         |
//! | negative lookahead   | `(?!E)`         |
//! | end of input         | `$`             |
//! | escaped operator     | `\(`, `\*`, ... |
//!
//! Positive lookaheads are *destructive*: the input position is restored
//! after the lookahead succeeds but captures made inside it persist. This
//! differs from PCRE and ECMAScript.
//!
//! `$` is sugar for `(?!σ₁|…|σₙ)` over the declared alphabet and is expanded
//! while parsing, so the tree never contains an end-of-input node.

mod parse;
mod render;
mod transform;

use std::collections::BTreeSet;
use std::fmt;

pub use parse::{infer_alphabet, parse};
pub use render::render;
pub use transform::{as_rename_idiom, normalize_lookahead_continuations, rename_captures, FRESH_PREFIX};

/// Errors raised while reading expressions or alphabets.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SyntaxError {
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("symbol {sym:?} at {pos} is not in the alphabet")]
    UnknownSymbol { pos: usize, sym: char },
    #[error("unbalanced group at {pos}")]
    Unbalanced { pos: usize },
    #[error("invalid alphabet: {0}")]
    Alphabet(String),
    #[error("fresh variable pool exhausted")]
    FreshNamesExhausted,
}

/// Expression tree. Concatenation and union chains produced by the parser
/// are nested to the right.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Expr {
    Literal(char),
    Epsilon,
    Union(Box<Expr>, Box<Expr>),
    Concat(Box<Expr>, Box<Expr>),
    Star(Box<Expr>),
    Capture(Box<Expr>, String),
    Backref(String),
    PosLookahead(Box<Expr>),
    NegLookahead(Box<Expr>),
}

impl Expr {
    pub fn lit(c: char) -> Expr {
        Expr::Literal(c)
    }

    pub fn cat(l: Expr, r: Expr) -> Expr {
        Expr::Concat(Box::new(l), Box::new(r))
    }

    pub fn alt(l: Expr, r: Expr) -> Expr {
        Expr::Union(Box::new(l), Box::new(r))
    }

    pub fn star(e: Expr) -> Expr {
        Expr::Star(Box::new(e))
    }

    pub fn capture(e: Expr, name: impl Into<String>) -> Expr {
        Expr::Capture(Box::new(e), name.into())
    }

    pub fn backref(name: impl Into<String>) -> Expr {
        Expr::Backref(name.into())
    }

    pub fn pos(e: Expr) -> Expr {
        Expr::PosLookahead(Box::new(e))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(e: Expr) -> Expr {
        Expr::NegLookahead(Box::new(e))
    }

    /// Right-nested concatenation; the empty sequence is ε.
    pub fn concat_all<I>(items: I) -> Expr
    where
        I: IntoIterator<Item = Expr>,
        I::IntoIter: DoubleEndedIterator,
    {
        let mut it = items.into_iter().rev();
        match it.next() {
            None => Expr::Epsilon,
            Some(last) => it.fold(last, |acc, e| Expr::cat(e, acc)),
        }
    }

    /// Right-nested union. Returns `None` for an empty sequence since the
    /// empty union has no syntax of its own.
    pub fn union_all<I>(items: I) -> Option<Expr>
    where
        I: IntoIterator<Item = Expr>,
        I::IntoIter: DoubleEndedIterator,
    {
        let mut it = items.into_iter().rev();
        let last = it.next()?;
        Some(it.fold(last, |acc, e| Expr::alt(e, acc)))
    }

    /// The literal word `s` as a concatenation of symbols.
    pub fn word(s: &str) -> Expr {
        Expr::concat_all(s.chars().map(Expr::Literal).collect::<Vec<_>>())
    }

    /// `$`, i.e. `(?!σ₁|…|σₙ)`. Over the empty alphabet it is `(?=)`.
    pub fn end_of_input(sigma: &Alphabet) -> Expr {
        match Expr::union_all(sigma.symbols().iter().map(|&c| Expr::Literal(c)).collect::<Vec<_>>()) {
            Some(u) => Expr::neg(u),
            None => Expr::pos(Expr::Epsilon),
        }
    }

    /// `(σ₁|…|σₙ)*`.
    pub fn any_star(sigma: &Alphabet) -> Expr {
        match Expr::any_symbol(sigma) {
            Some(u) => Expr::star(u),
            None => Expr::Epsilon,
        }
    }

    pub fn any_symbol(sigma: &Alphabet) -> Option<Expr> {
        Expr::union_all(sigma.symbols().iter().map(|&c| Expr::Literal(c)).collect::<Vec<_>>())
    }

    pub fn is_lookahead(&self) -> bool {
        matches!(self, Expr::PosLookahead(_) | Expr::NegLookahead(_))
    }

    /// True when `x` occurs in `self` as a capture name or a backreference.
    pub fn mentions(&self, x: &str) -> bool {
        match self {
            Expr::Literal(_) | Expr::Epsilon => false,
            Expr::Backref(y) => y == x,
            Expr::Capture(b, y) => y == x || b.mentions(x),
            Expr::Union(l, r) | Expr::Concat(l, r) => l.mentions(x) || r.mentions(x),
            Expr::Star(b) | Expr::PosLookahead(b) | Expr::NegLookahead(b) => b.mentions(x),
        }
    }

    pub fn children(&self) -> Vec<&Expr> {
        match self {
            Expr::Literal(_) | Expr::Epsilon | Expr::Backref(_) => vec![],
            Expr::Union(l, r) | Expr::Concat(l, r) => vec![l, r],
            Expr::Star(b) | Expr::Capture(b, _) | Expr::PosLookahead(b) | Expr::NegLookahead(b) => {
                vec![b]
            }
        }
    }

    /// Symbols occurring as literals.
    pub fn literals(&self) -> BTreeSet<char> {
        let mut out = BTreeSet::new();
        self.visit(&mut |e| {
            if let Expr::Literal(c) = e {
                out.insert(*c);
            }
        });
        out
    }

    /// Pre-order traversal.
    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Expr)) {
        f(self);
        for c in self.children() {
            c.visit(f);
        }
    }

    pub fn metrics(&self) -> Metrics {
        metrics(self)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(self))
    }
}

/// An ordered set of input symbols.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Alphabet {
    symbols: Vec<char>,
}

impl Alphabet {
    /// Builds an alphabet, rejecting duplicate and whitespace symbols.
    pub fn new<I: IntoIterator<Item = char>>(symbols: I) -> Result<Alphabet, SyntaxError> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for c in symbols {
            if c.is_whitespace() || c.is_control() {
                return Err(SyntaxError::Alphabet(format!("symbol {c:?} is reserved")));
            }
            if !seen.insert(c) {
                return Err(SyntaxError::Alphabet(format!("duplicate symbol {c:?}")));
            }
            out.push(c);
        }
        Ok(Alphabet { symbols: out })
    }

    /// Sorted, deduplicated alphabet over the given symbols.
    pub fn from_set<I: IntoIterator<Item = char>>(symbols: I) -> Result<Alphabet, SyntaxError> {
        let set: BTreeSet<char> = symbols.into_iter().collect();
        Alphabet::new(set)
    }

    pub fn symbols(&self) -> &[char] {
        &self.symbols
    }

    pub fn contains(&self, c: char) -> bool {
        self.symbols.contains(&c)
    }

    pub fn index_of(&self, c: char) -> Option<usize> {
        self.symbols.iter().position(|&s| s == c)
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Union with further symbols, preserving the existing order.
    pub fn extended<I: IntoIterator<Item = char>>(&self, extra: I) -> Alphabet {
        let mut symbols = self.symbols.clone();
        for c in extra {
            if !symbols.contains(&c) {
                symbols.push(c);
            }
        }
        Alphabet { symbols }
    }

    /// All words of length exactly `n`, in lexicographic order of the
    /// alphabet.
    pub fn words_of_len(&self, n: usize) -> Vec<String> {
        let mut out = vec![String::new()];
        for _ in 0..n {
            let mut next = Vec::with_capacity(out.len() * self.symbols.len());
            for w in &out {
                for &c in &self.symbols {
                    let mut v = w.clone();
                    v.push(c);
                    next.push(v);
                }
            }
            out = next;
        }
        out
    }

    /// All words of length at most `n`, shortest first.
    pub fn words_up_to(&self, n: usize) -> Vec<String> {
        (0..=n).flat_map(|k| self.words_of_len(k)).collect()
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.symbols {
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Metrics {
    /// Number of nodes in the tree.
    pub size: usize,
    pub star_height: usize,
    pub variables: BTreeSet<String>,
    pub lookahead_depth: usize,
}

pub fn metrics(e: &Expr) -> Metrics {
    fn go(e: &Expr, m: &mut Metrics) -> (usize, usize) {
        m.size += 1;
        match e {
            Expr::Capture(_, x) | Expr::Backref(x) => {
                m.variables.insert(x.clone());
            }
            _ => {}
        }
        let (mut sh, mut ld) = (0, 0);
        for c in e.children() {
            let (s, l) = go(c, m);
            sh = sh.max(s);
            ld = ld.max(l);
        }
        match e {
            Expr::Star(_) => (sh + 1, ld),
            Expr::PosLookahead(_) | Expr::NegLookahead(_) => (sh, ld + 1),
            _ => (sh, ld),
        }
    }
    let mut m = Metrics {
        size: 0,
        star_height: 0,
        variables: BTreeSet::new(),
        lookahead_depth: 0,
    };
    let (sh, ld) = go(e, &mut m);
    m.star_height = sh;
    m.lookahead_depth = ld;
    m
}

/// Identifier rule for capture names written by users.
pub fn is_valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}
