//! The reference evaluator against a naive set-valued evaluator that
//! recomputes whole result sets and iterates star to a fixpoint.

mod common;

use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;
use rewbl::semantics::{accepts, accepts_with, Budget};
use rewbl::syntax::{parse, Alphabet, Expr};

type Env = BTreeMap<String, String>;
type Set = BTreeSet<(usize, Env)>;

fn set_var(env: &Env, x: &str, v: &str) -> Env {
    let mut e = env.clone();
    if v.is_empty() {
        e.remove(x);
    } else {
        e.insert(x.to_string(), v.to_string());
    }
    e
}

fn naive(e: &Expr, w: &[char], p: usize, env: &Env) -> Set {
    match e {
        Expr::Epsilon => [(p, env.clone())].into(),
        Expr::Literal(c) => {
            if w.get(p) == Some(c) {
                [(p + 1, env.clone())].into()
            } else {
                Set::new()
            }
        }
        Expr::Union(l, r) => naive(l, w, p, env).into_iter().chain(naive(r, w, p, env)).collect(),
        Expr::Concat(l, r) => naive(l, w, p, env)
            .into_iter()
            .flat_map(|(q, m)| naive(r, w, q, &m))
            .collect(),
        Expr::Star(body) => {
            let mut s: Set = [(p, env.clone())].into();
            loop {
                let next: Set = s
                    .iter()
                    .flat_map(|(q, m)| naive(body, w, *q, m))
                    .chain(s.iter().cloned())
                    .collect();
                if next == s {
                    return s;
                }
                s = next;
            }
        }
        Expr::Capture(body, x) => naive(body, w, p, env)
            .into_iter()
            .map(|(q, m)| {
                let v: String = w[p..q].iter().collect();
                (q, set_var(&m, x, &v))
            })
            .collect(),
        Expr::Backref(x) => {
            let v: Vec<char> = env.get(x).map(|s| s.chars().collect()).unwrap_or_default();
            if w[p..].starts_with(&v) {
                [(p + v.len(), env.clone())].into()
            } else {
                Set::new()
            }
        }
        Expr::PosLookahead(body) => naive(body, w, p, env).into_iter().map(|(_, m)| (p, m)).collect(),
        Expr::NegLookahead(body) => {
            if naive(body, w, p, env).is_empty() {
                [(p, env.clone())].into()
            } else {
                Set::new()
            }
        }
    }
}

fn naive_accepts(e: &Expr, w: &str) -> bool {
    let w: Vec<char> = w.chars().collect();
    naive(e, &w, 0, &Env::new()).iter().any(|(p, _)| *p == w.len())
}

#[test]
fn fixed_examples() {
    let sigma = Alphabet::new(['a', 'b', '#']).unwrap();
    for (text, word) in [
        (r"(?<x>(a|b)*)#\k<x>", "ab#ab"),
        (r"(?<x>(a|b)*)#\k<x>", "ab#ba"),
        (r"(?=(?<x>\k<x>a))*\k<x>", "aaa"),
        (r"(?=(?<x>a))(?=(?<x>\k<x>\k<x>))*\k<x>", "aaaa"),
        (r"(?=(?<x>a))(?=(?<x>\k<x>\k<x>))*\k<x>", "aaa"),
        ("(?!a)b", "b"),
        ("(?!a)b", "ab"),
        ("", ""),
        ("", "a"),
    ] {
        let e = parse(text, &sigma).unwrap();
        assert_eq!(accepts(&e, word).unwrap(), naive_accepts(&e, word), "{text} on {word:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn reference_matches_naive(e in common::expr_strategy(), w in common::word_strategy(6)) {
        let budget = Budget { memoize: false, ..Budget::default() };
        prop_assert_eq!(accepts(&e, &w).unwrap(), naive_accepts(&e, &w));
        prop_assert_eq!(accepts_with(&e, &w, budget).unwrap(), naive_accepts(&e, &w));
    }
}
