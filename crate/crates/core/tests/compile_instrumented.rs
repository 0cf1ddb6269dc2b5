//! Compiled machines against the reference evaluator, with instrumented
//! runs checking the POS mirror and capture tape ownership.

mod common;

use std::cell::RefCell;

use proptest::prelude::*;
use rewbl::compile::{compile, Compiled, POS};
use rewbl::decision::{decide_membership, DecideOptions};
use rewbl::machine::{Bfs, ExecOptions, Rule, Run};
use rewbl::semantics::accepts;
use rewbl::syntax::{parse, Alphabet, Expr};

#[derive(Default, Debug)]
struct Violations {
    pos: Vec<String>,
    owner: Vec<String>,
    observed: usize,
}

fn instrumented_accepts(c: &Compiled, w: &str) -> (bool, Violations) {
    let run = Run::new(&c.set, w).unwrap();
    let v = RefCell::new(Violations::default());
    let verdict = {
        let mut bfs = Bfs::new(ExecOptions::default()).with_observer(|m, from, t| {
            let mut v = v.borrow_mut();
            v.observed += 1;
            let to = &t.to;
            if c.info.sync_states[m].contains(&(to.state as usize)) {
                let pos = to.tape_value(&run, POS) as usize;
                if pos != to.head as usize {
                    v.pos.push(format!("machine {m} state {} head {} POS {pos}", to.state, to.head));
                }
            }
            if let Rule::Tape { tape, read, write, .. } = &c.set.get(m).rules[t.rule] {
                if read != write {
                    if let Some(x) = c.info.owner_of_tape(*tape) {
                        let owner = c.info.writers[m].get(&(from.state as usize));
                        if owner.map(String::as_str) != Some(x) {
                            v.owner.push(format!("machine {m} state {} wrote tape of {x}", from.state));
                        }
                    }
                }
            }
        });
        bfs.accepts(&run, 0).unwrap()
    };
    (verdict, v.into_inner())
}

fn check(e: &Expr, sigma: &Alphabet, w: &str) -> Result<(), TestCaseError> {
    let c = compile(e, sigma).unwrap();
    let (bfs, v) = instrumented_accepts(&c, w);
    prop_assert!(v.pos.is_empty(), "{e} on {w:?}: {:?}", &v.pos[..v.pos.len().min(3)]);
    prop_assert!(v.owner.is_empty(), "{e} on {w:?}: {:?}", &v.owner[..v.owner.len().min(3)]);
    let reference = accepts(e, w).unwrap();
    prop_assert_eq!(bfs, reference, "bfs on {} {:?}", e, w);
    let interp = decide_membership(&c.set, 0, w, DecideOptions::default()).unwrap();
    prop_assert_eq!(interp, reference, "interpreter on {} {:?}", e, w);
    Ok(())
}

#[test]
fn fixed_examples_instrumented() {
    let sigma = Alphabet::new(['a', 'b', '#']).unwrap();
    for text in [
        r"(?<x>a|ab)#\k<x>",
        r"(?<x>ab)\k<x>",
        r"(?=(?<x>a))\k<x>",
        r"(?<x>aa)(?<x>\k<x>\k<x>)",
        r"(?<x>a)(?<y>b)(?<x>(?=(?<x>\k<x>\k<x>))aa\k<y>)",
        r"(?=(?<x>\k<x>a))*\k<x>",
        "(?!a)(a|b)",
        "(?=a)(a|b)",
    ] {
        let e = parse(text, &sigma).unwrap();
        for w in sigma.words_up_to(4) {
            check(&e, &sigma, &w).unwrap();
        }
    }
}

#[test]
fn observer_sees_transitions() {
    let sigma = Alphabet::new(['a', 'b']).unwrap();
    let e = parse(r"(?<x>a)\k<x>", &sigma).unwrap();
    let c = compile(&e, &sigma).unwrap();
    let (ok, v) = instrumented_accepts(&c, "aa");
    assert!(ok);
    assert!(v.observed > 10);
}

#[test]
fn depth_and_tape_bound() {
    let sigma = Alphabet::new(['a', 'b']).unwrap();
    for (text, depth) in [("(?=a)b", 1), ("(?!(?=a))b", 2), ("a*", 0), ("(?=(?!a)(?=b))a", 2)] {
        let e = parse(text, &sigma).unwrap();
        let c = compile(&e, &sigma).unwrap();
        assert_eq!(c.set.depth(0), depth, "{text}");
        assert_eq!(c.info.depth, depth, "{text}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn compiled_agrees_with_reference(e in common::expr_strategy(), w in common::word_strategy(4)) {
        let sigma = Alphabet::new(['a', 'b']).unwrap();
        check(&e, &sigma, &w)?;
        let c = compile(&e, &sigma).unwrap();
        prop_assert_eq!(c.set.depth(0), e.metrics().lookahead_depth);
        prop_assert_eq!(c.info.c, 1);
        prop_assert!(c.info.k <= 4 * e.metrics().size + 8);
    }
}
