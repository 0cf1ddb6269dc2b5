use std::collections::BTreeSet;
use std::fmt::Write as _;

use super::{format_err, EncodeError};
use crate::syntax::{parse, Alphabet, Expr};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quant {
    Exists,
    Forall,
}

/// Prenex QBF with a CNF matrix. A literal is `(variable, positive)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Qbf {
    pub prefix: Vec<(Quant, String)>,
    pub clauses: Vec<Vec<(String, bool)>>,
}

const MAX_VARS: usize = 20;

impl Qbf {
    pub fn validate(&self) -> Result<(), EncodeError> {
        let mut seen = BTreeSet::new();
        for (_, v) in &self.prefix {
            if !seen.insert(v.as_str()) {
                return Err(EncodeError::Invalid(format!("variable {v:?} quantified twice")));
            }
        }
        for c in &self.clauses {
            for (v, _) in c {
                if !seen.contains(v.as_str()) {
                    return Err(EncodeError::UnboundVariable(v.clone()));
                }
            }
        }
        Ok(())
    }

    fn index(&self, v: &str) -> usize {
        self.prefix.iter().position(|(_, x)| x == v).expect("validated")
    }
}

/// Truth value by expanding every quantifier.
pub fn eval_qbf_bruteforce(q: &Qbf) -> Result<bool, EncodeError> {
    q.validate()?;
    if q.prefix.len() > MAX_VARS {
        return Err(EncodeError::TooLarge(format!("{} variables, limit {MAX_VARS}", q.prefix.len())));
    }
    let clauses: Vec<Vec<(usize, bool)>> = q
        .clauses
        .iter()
        .map(|c| c.iter().map(|(v, pos)| (q.index(v), *pos)).collect())
        .collect();
    fn go(q: &Qbf, clauses: &[Vec<(usize, bool)>], i: usize, val: &mut Vec<bool>) -> bool {
        if i == q.prefix.len() {
            return clauses.iter().all(|c| c.iter().any(|&(v, pos)| val[v] == pos));
        }
        let branch = |b: bool, val: &mut Vec<bool>| {
            val.push(b);
            let r = go(q, clauses, i + 1, val);
            val.pop();
            r
        };
        match q.prefix[i].0 {
            Quant::Exists => branch(true, val) || branch(false, val),
            Quant::Forall => branch(true, val) && branch(false, val),
        }
    }
    Ok(go(q, &clauses, 0, &mut Vec::new()))
}

/// Expression and witness word: `TF` per quantified variable, then `T`
/// per clause. `∀x.χ` is encoded as `¬∃x.¬χ`; double negations stay.
/// A trailing `(T|F)*` consumes whatever the lookaheads left unread.
pub fn encode_qbf(q: &Qbf) -> Result<(Expr, String), EncodeError> {
    q.validate()?;
    let name = |v: &str, pos: bool| format!("{}{}", if pos { "p" } else { "n" }, q.index(v));
    let mut matrix = String::new();
    for c in &q.clauses {
        if c.is_empty() {
            matrix.push_str("(?=T)F");
        } else {
            let alts: Vec<String> = c.iter().map(|(v, pos)| format!(r"\k<{}>", name(v, *pos))).collect();
            let _ = write!(matrix, "({})", alts.join("|"));
        }
    }
    let mut body = matrix;
    for (quant, v) in q.prefix.iter().rev() {
        let (p, n) = (name(v, true), name(v, false));
        let choose = format!("((?<{p}>T)(?<{n}>F)|(?<{n}>T)(?<{p}>F))");
        body = match quant {
            Quant::Exists => format!("{choose}{body}"),
            Quant::Forall => format!("(?!{choose}(?!{body}))"),
        };
    }
    let text = format!("{body}(T|F)*");
    let sigma = Alphabet::new(['F', 'T']).expect("two symbols");
    let word = "TF".repeat(q.prefix.len()) + &"T".repeat(q.clauses.len());
    Ok((parse(&text, &sigma)?, word))
}

/// `q e x a y …` prefix line, then one clause per line with `-` marking a
/// negative literal. Lines starting with `c` or `#` are comments.
pub fn read_qbf(text: &str) -> Result<Qbf, EncodeError> {
    let mut prefix = None;
    let mut clauses = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line == "c" || line.starts_with("c ") {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks[0] == "q" {
            if prefix.is_some() {
                return Err(format_err(i + 1, "duplicate prefix line"));
            }
            if toks.len().is_multiple_of(2) {
                return Err(format_err(i + 1, "expected quantifier/variable pairs"));
            }
            let mut p = Vec::new();
            for pair in toks[1..].chunks(2) {
                let quant = match pair[0] {
                    "e" => Quant::Exists,
                    "a" => Quant::Forall,
                    other => return Err(format_err(i + 1, format!("unknown quantifier {other:?}"))),
                };
                p.push((quant, pair[1].to_string()));
            }
            prefix = Some(p);
        } else {
            let clause = toks
                .iter()
                .map(|t| match t.strip_prefix('-') {
                    Some(v) => (v.to_string(), false),
                    None => (t.to_string(), true),
                })
                .collect();
            clauses.push(clause);
        }
    }
    let q = Qbf {
        prefix: prefix.ok_or_else(|| format_err(0, "missing `q` prefix line"))?,
        clauses,
    };
    q.validate()?;
    Ok(q)
}

pub fn write_qbf(q: &Qbf) -> String {
    let mut out = String::from("q");
    for (quant, v) in &q.prefix {
        let _ = write!(out, " {} {v}", if *quant == Quant::Exists { "e" } else { "a" });
    }
    out.push('\n');
    for c in &q.clauses {
        let lits: Vec<String> = c.iter().map(|(v, pos)| format!("{}{v}", if *pos { "" } else { "-" })).collect();
        let _ = writeln!(out, "{}", lits.join(" "));
    }
    out
}
