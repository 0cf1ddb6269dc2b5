//! Reference evaluator: the set-valued semantic function over
//! (position, assignment) pairs.
//!
//! Star is computed as a worklist closure over pairs rather than by
//! unfolding, so position-stationary loops such as
//! `(?=(?<x>\k<x>a))*` terminate and produce every reachable assignment.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::rc::Rc;
use std::time::{Duration, Instant};

use crate::syntax::{Alphabet, Expr};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("budget exceeded: {0}")]
    Budget(String),
}

/// Resource limits for one evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    /// Cap on distinct (position, assignment) pairs in a single star closure.
    pub max_pairs: usize,
    pub time_limit: Option<Duration>,
    /// Memoize results per (subexpression, position, assignment).
    pub memoize: bool,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_pairs: 1_000_000,
            time_limit: None,
            memoize: true,
        }
    }
}

/// Variable assignment. Absent names map to ε, and ε values are never
/// stored, so structural equality is equality of total maps.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Assignment(BTreeMap<String, String>);

impl Assignment {
    pub fn new() -> Assignment {
        Assignment::default()
    }

    pub fn get(&self, x: &str) -> &str {
        self.0.get(x).map(String::as_str).unwrap_or("")
    }

    pub fn set(&mut self, x: impl Into<String>, v: impl Into<String>) {
        let (x, v) = (x.into(), v.into());
        if v.is_empty() {
            self.0.remove(&x);
        } else {
            self.0.insert(x, v);
        }
    }

    pub fn with(mut self, x: impl Into<String>, v: impl Into<String>) -> Assignment {
        self.set(x, v);
        self
    }

    /// Non-ε entries in name order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.0.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, (k, v)) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k}↦{v:?}")?;
        }
        f.write_str("]")
    }
}

/// Result of an evaluation, ordered by position and then assignment.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MatchSet(pub BTreeSet<(usize, Assignment)>);

impl MatchSet {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, p: usize, lam: &Assignment) -> bool {
        self.0.contains(&(p, lam.clone()))
    }

    pub fn positions(&self) -> BTreeSet<usize> {
        self.0.iter().map(|(p, _)| *p).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(usize, Assignment)> {
        self.0.iter()
    }
}

/// `sem⟨e, w, p, lam⟩`.
pub fn eval(e: &Expr, w: &str, p: usize, lam: &Assignment, budget: Budget) -> Result<MatchSet, EvalError> {
    let mut ev = Evaluator::new(e, w, budget);
    assert!(p <= ev.word.len(), "position {p} outside 0..={}", ev.word.len());
    let env = ev.env_of(lam);
    let out = ev.eval(ev.root, p, &env)?;
    let extra: Vec<(&str, &str)> = lam.iter().filter(|(k, _)| !ev.var_ids.contains_key(*k)).collect();
    let set = out
        .iter()
        .map(|(q, env)| {
            let mut a = ev.assignment_of(env);
            for (k, v) in &extra {
                a.set(*k, *v);
            }
            (*q, a)
        })
        .collect();
    Ok(MatchSet(set))
}

/// `w ∈ L(e)` with the default budget.
pub fn accepts(e: &Expr, w: &str) -> Result<bool, EvalError> {
    accepts_with(e, w, Budget::default())
}

pub fn accepts_with(e: &Expr, w: &str, budget: Budget) -> Result<bool, EvalError> {
    let mut ev = Evaluator::new(e, w, budget);
    let env: Env = vec![0; ev.var_ids.len()].into();
    let n = ev.word.len();
    Ok(ev.eval(ev.root, 0, &env)?.iter().any(|(q, _)| *q == n))
}

/// Every word over `sigma` of length at most `max_len` accepted by `e`,
/// shortest first and then in alphabet order.
pub fn enumerate_members(e: &Expr, sigma: &Alphabet, max_len: usize, budget: Budget) -> Result<Vec<String>, EvalError> {
    let start = Instant::now();
    let mut out = Vec::new();
    for w in sigma.words_up_to(max_len) {
        let b = Budget {
            time_limit: budget.time_limit.map(|t| t.saturating_sub(start.elapsed())),
            ..budget
        };
        if accepts_with(e, &w, b)? {
            out.push(w);
        }
    }
    Ok(out)
}

type Env = Rc<[u32]>;
type Pairs = Rc<Vec<(usize, Env)>>;

#[derive(Debug)]
enum Node {
    Lit(char),
    Eps,
    Union(usize, usize),
    Concat(usize, usize),
    Star(usize),
    Capture(usize, usize),
    Backref(usize),
    Pos(usize),
    Neg(usize),
}

/// Evaluator for one (expression, word) pair. Variables are numbered and
/// each assignment is a vector of interned string ids, with id 0 for ε.
struct Evaluator {
    nodes: Vec<Node>,
    root: usize,
    var_ids: HashMap<String, usize>,
    var_names: Vec<String>,
    word: Vec<char>,
    strings: Vec<Vec<char>>,
    string_ids: HashMap<Vec<char>, u32>,
    memo: HashMap<(usize, usize, Env), Pairs>,
    budget: Budget,
    deadline: Option<Instant>,
}

impl Evaluator {
    fn new(e: &Expr, w: &str, budget: Budget) -> Evaluator {
        let mut ev = Evaluator {
            nodes: Vec::new(),
            root: 0,
            var_ids: HashMap::new(),
            var_names: Vec::new(),
            word: w.chars().collect(),
            strings: vec![Vec::new()],
            string_ids: HashMap::from([(Vec::new(), 0)]),
            memo: HashMap::new(),
            budget,
            deadline: budget.time_limit.map(|t| Instant::now() + t),
        };
        ev.root = ev.lower(e);
        ev
    }

    fn var(&mut self, x: &str) -> usize {
        if let Some(&i) = self.var_ids.get(x) {
            return i;
        }
        let i = self.var_names.len();
        self.var_ids.insert(x.to_string(), i);
        self.var_names.push(x.to_string());
        i
    }

    fn lower(&mut self, e: &Expr) -> usize {
        let node = match e {
            Expr::Literal(c) => Node::Lit(*c),
            Expr::Epsilon => Node::Eps,
            Expr::Union(l, r) => Node::Union(self.lower(l), self.lower(r)),
            Expr::Concat(l, r) => Node::Concat(self.lower(l), self.lower(r)),
            Expr::Star(b) => Node::Star(self.lower(b)),
            Expr::Capture(b, x) => {
                let b = self.lower(b);
                Node::Capture(b, self.var(x))
            }
            Expr::Backref(x) => Node::Backref(self.var(x)),
            Expr::PosLookahead(b) => Node::Pos(self.lower(b)),
            Expr::NegLookahead(b) => Node::Neg(self.lower(b)),
        };
        self.nodes.push(node);
        self.nodes.len() - 1
    }

    fn intern(&mut self, s: &[char]) -> u32 {
        if let Some(&id) = self.string_ids.get(s) {
            return id;
        }
        let id = self.strings.len() as u32;
        self.strings.push(s.to_vec());
        self.string_ids.insert(s.to_vec(), id);
        id
    }

    fn env_of(&mut self, lam: &Assignment) -> Env {
        let mut env = vec![0; self.var_names.len()];
        for (i, x) in self.var_names.clone().iter().enumerate() {
            let v: Vec<char> = lam.get(x).chars().collect();
            env[i] = self.intern(&v);
        }
        env.into()
    }

    fn assignment_of(&self, env: &[u32]) -> Assignment {
        let mut a = Assignment::new();
        for (i, &id) in env.iter().enumerate() {
            a.set(self.var_names[i].clone(), self.strings[id as usize].iter().collect::<String>());
        }
        a
    }

    fn check_time(&self) -> Result<(), EvalError> {
        match self.deadline {
            Some(d) if Instant::now() > d => Err(EvalError::Budget("time limit reached".into())),
            _ => Ok(()),
        }
    }

    fn eval(&mut self, n: usize, p: usize, env: &Env) -> Result<Pairs, EvalError> {
        let cacheable = self.budget.memoize && !matches!(self.nodes[n], Node::Lit(_) | Node::Eps);
        if cacheable {
            if let Some(r) = self.memo.get(&(n, p, env.clone())) {
                return Ok(r.clone());
            }
        }
        let out = Rc::new(self.eval_uncached(n, p, env)?);
        if cacheable {
            self.memo.insert((n, p, env.clone()), out.clone());
        }
        Ok(out)
    }

    fn eval_uncached(&mut self, n: usize, p: usize, env: &Env) -> Result<Vec<(usize, Env)>, EvalError> {
        Ok(match self.nodes[n] {
            Node::Lit(c) => {
                if self.word.get(p) == Some(&c) {
                    vec![(p + 1, env.clone())]
                } else {
                    vec![]
                }
            }
            Node::Eps => vec![(p, env.clone())],
            Node::Union(l, r) => {
                let a = self.eval(l, p, env)?;
                let b = self.eval(r, p, env)?;
                dedup(a.iter().chain(b.iter()).cloned())
            }
            Node::Concat(l, r) => {
                let a = self.eval(l, p, env)?;
                let mut out = Vec::new();
                for (q, e2) in a.iter() {
                    out.extend(self.eval(r, *q, e2)?.iter().cloned());
                }
                dedup(out)
            }
            Node::Star(b) => {
                let mut seen: HashSet<(usize, Env)> = HashSet::new();
                let mut order = Vec::new();
                let mut work = vec![(p, env.clone())];
                seen.insert((p, env.clone()));
                order.push((p, env.clone()));
                while let Some((q, e2)) = work.pop() {
                    self.check_time()?;
                    for item in self.eval(b, q, &e2)?.iter() {
                        if seen.insert(item.clone()) {
                            if seen.len() > self.budget.max_pairs {
                                return Err(EvalError::Budget(format!(
                                    "star closure exceeded {} pairs",
                                    self.budget.max_pairs
                                )));
                            }
                            order.push(item.clone());
                            work.push(item.clone());
                        }
                    }
                }
                order
            }
            Node::Capture(b, x) => {
                let inner = self.eval(b, p, env)?;
                let mut out = Vec::with_capacity(inner.len());
                for (q, e2) in inner.iter() {
                    let span = self.word[p..*q].to_vec();
                    let id = self.intern(&span);
                    let mut e3 = e2.to_vec();
                    e3[x] = id;
                    out.push((*q, Env::from(e3)));
                }
                dedup(out)
            }
            Node::Backref(x) => {
                let s = &self.strings[env[x] as usize];
                let end = p + s.len();
                if end <= self.word.len() && self.word[p..end] == s[..] {
                    vec![(end, env.clone())]
                } else {
                    vec![]
                }
            }
            Node::Pos(b) => dedup(self.eval(b, p, env)?.iter().map(|(_, e2)| (p, e2.clone()))),
            Node::Neg(b) => {
                if self.eval(b, p, env)?.is_empty() {
                    vec![(p, env.clone())]
                } else {
                    vec![]
                }
            }
        })
    }
}

fn dedup(items: impl IntoIterator<Item = (usize, Env)>) -> Vec<(usize, Env)> {
    let mut seen = HashSet::new();
    items.into_iter().filter(|i| seen.insert(i.clone())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    fn p(t: &str, s: &str) -> Expr {
        parse(t, &Alphabet::new(s.chars()).unwrap()).unwrap()
    }

    fn ev(e: &Expr, w: &str) -> MatchSet {
        eval(e, w, 0, &Assignment::new(), Budget::default()).unwrap()
    }

    #[test]
    fn literal() {
        let m = ev(&p("a", "a"), "a");
        assert_eq!(m.0, BTreeSet::from([(1, Assignment::new())]));
    }

    #[test]
    fn capture_union() {
        let m = ev(&p("(?<x>a|ab)", "ab"), "ab");
        let expected = BTreeSet::from([
            (1, Assignment::new().with("x", "a")),
            (2, Assignment::new().with("x", "ab")),
        ]);
        assert_eq!(m.0, expected);
    }

    #[test]
    fn negative_lookahead() {
        assert!(ev(&p("(?!a)", "ab"), "a").is_empty());
        assert_eq!(ev(&p("(?!b)", "ab"), "a").0, BTreeSet::from([(0, Assignment::new())]));
    }

    #[test]
    fn destructive_positive_lookahead() {
        let m = ev(&p("(?=(?<x>a))", "a"), "a");
        assert_eq!(m.0, BTreeSet::from([(0, Assignment::new().with("x", "a"))]));
    }

    #[test]
    fn acceptance() {
        let e = p(r"(?<x>(a|b)*)#\k<x>", "ab#");
        assert!(accepts(&e, "ab#ab").unwrap());
        assert!(!accepts(&e, "ab#ba").unwrap());
        let e = p("", "a");
        assert!(accepts(&e, "").unwrap());
        assert!(!accepts(&e, "a").unwrap());
    }

    #[test]
    fn stationary_star_terminates() {
        let e = p(r"(?=(?<x>\k<x>a))*\k<x>", "a");
        for n in 0..=10 {
            assert!(accepts(&e, &"a".repeat(n)).unwrap(), "a^{n}");
        }
    }

    #[test]
    fn initial_assignment_is_respected() {
        let e = p(r"\k<x>\k<y>", "ab");
        let lam = Assignment::new().with("x", "ab").with("z", "b");
        let m = eval(&e, "ab", 0, &lam, Budget::default()).unwrap();
        assert_eq!(m.0, BTreeSet::from([(2, lam)]));
    }

    #[test]
    fn budget_is_reported() {
        let e = p("(a|b)*", "ab");
        let b = Budget {
            max_pairs: 2,
            ..Budget::default()
        };
        assert!(matches!(accepts_with(&e, "abab", b), Err(EvalError::Budget(_))));
    }

    #[test]
    fn memo_is_transparent() {
        let e = p(r"((?<x>a*)(?=\k<x>b)|b)*", "ab");
        let no_memo = Budget {
            memoize: false,
            ..Budget::default()
        };
        for w in Alphabet::new("ab".chars()).unwrap().words_up_to(5) {
            let a = eval(&e, &w, 0, &Assignment::new(), Budget::default()).unwrap();
            let b = eval(&e, &w, 0, &Assignment::new(), no_memo).unwrap();
            assert_eq!(a, b, "{w}");
        }
    }

    #[test]
    fn enumerates() {
        let s = Alphabet::new("ab".chars()).unwrap();
        let e = p("(?!a|b)", "ab");
        assert_eq!(enumerate_members(&e, &s, 2, Budget::default()).unwrap(), vec![String::new()]);
    }
}
