//! Generator for the shipped corpus. Expected verdicts come from
//! independent oracles (graph search, QBF expansion, automaton simulation,
//! closed forms, sieves) rather than from any of the three checked backends.

use rand::Rng;

use super::{CorpusEntry, Expect};
use crate::encoders::{
    encode_power_language, encode_qbf, encode_reach, encode_tagap, encode_two_way_automaton, eval_qbf_bruteforce,
    prime_expr, read_qbf, reach_word, reference_automata, simulate_two_way_automaton, tagap_word, Digraph, PowerKind,
};
use crate::gen::{random_digraph, random_expr, random_qbf, random_tagap, rng};
use crate::syntax::{render, Alphabet, Expr};

pub const RANDOM_EXPRESSIONS: usize = 100;
pub const RANDOM_SEED: u64 = 0x5eed;

fn entry(name: &str, e: &Expr, sigma: &Alphabet) -> CorpusEntry {
    let mut c = CorpusEntry::new(render(e));
    c.name = Some(name.to_string());
    c.sigma = Some(sigma.symbols().iter().collect());
    c
}

fn text_entry(name: &str, expr: &str, sigma: &str, words: &[(&str, Expect)]) -> CorpusEntry {
    let mut c = CorpusEntry::new(expr);
    c.name = Some(name.to_string());
    c.sigma = Some(sigma.to_string());
    c.words = words.iter().map(|(w, x)| (w.to_string(), *x)).collect();
    c
}

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

fn is_w_hash_w(w: &str) -> bool {
    match w.split_once('#') {
        Some((l, r)) => l == r,
        None => false,
    }
}

fn graph_entries(out: &mut Vec<CorpusEntry>) {
    let seven_edge_dag = Digraph::new("s", "t")
        .edge("s", "a")
        .edge("a", "d")
        .edge("a", "e")
        .edge("d", "t")
        .edge("a", "b")
        .edge("d", "e")
        .edge("b", "c");
    let mut tagap = vec![
        ("tagap-dag".to_string(), seven_edge_dag.clone()),
        ("tagap-dag-to-c".to_string(), Digraph { t: "c".into(), ..seven_edge_dag.clone() }),
        ("tagap-dag-from-e".to_string(), Digraph { s: "e".into(), ..seven_edge_dag }),
        ("tagap-single".to_string(), Digraph::new("s", "s")),
    ];
    let mut r = rng(RANDOM_SEED + 1);
    for i in 0..6 {
        tagap.push((format!("tagap-random-{i}"), random_tagap(&mut r, 4)));
    }
    for (name, g) in tagap {
        let (e, sigma) = encode_tagap(&g.vertex_alphabet().expect("vertex names")).expect("encodes");
        let mut c = entry(&name, &e, &sigma);
        c.words.push((tagap_word(&g).expect("word"), Expect::from_bool(g.reachable())));
        out.push(c);
    }

    let star = Alphabet::new(['*']).expect("one symbol");
    let (e, sigma) = encode_reach(&star).expect("encodes");
    let mut c = entry("reach-unary", &e, &sigma);
    for g in [
        Digraph::new("*", "**").edge("*", "**"),
        Digraph::new("*", "**").edge("**", "*"),
        Digraph::new("*", "*"),
        Digraph::new("*", "***").edge("*", "**").edge("**", "***"),
    ] {
        c.words.push((reach_word(&g).expect("word"), Expect::from_bool(g.reachable())));
    }
    c.words.push(("*#**→*#**".to_string(), Expect::NoMatch));
    out.push(c);

    let mut graphs = vec![
        Digraph::new("s", "t").edge("s", "a").edge("a", "s").edge("a", "t"),
        Digraph::new("s", "t").edge("s", "a").edge("t", "a"),
        Digraph::new("s", "t").edge("s", "t"),
    ];
    for _ in 0..6 {
        graphs.push(random_digraph(&mut r, 3));
    }
    for (i, g) in graphs.iter().enumerate() {
        let (e, sigma) = encode_reach(&g.vertex_alphabet().expect("vertex names")).expect("encodes");
        let mut c = entry(&format!("reach-{i}"), &e, &sigma);
        c.words.push((reach_word(g).expect("word"), Expect::from_bool(g.reachable())));
        out.push(c);
    }
}

fn qbf_entries(out: &mut Vec<CorpusEntry>) {
    let mut qs = vec![
        read_qbf("q a a e b a c a d\na b c\n-b c d\n").expect("fixed"),
        read_qbf("q e a\na").expect("fixed"),
        read_qbf("q a a\na").expect("fixed"),
        read_qbf("q a a e b\na b\n-a -b").expect("fixed"),
    ];
    let mut r = rng(RANDOM_SEED + 2);
    for _ in 0..6 {
        qs.push(random_qbf(&mut r, 3, 3));
    }
    for (i, q) in qs.iter().enumerate() {
        let (e, w) = encode_qbf(q).expect("encodes");
        let sigma = Alphabet::new(['F', 'T']).expect("two symbols");
        let mut c = entry(&format!("qbf-{i}"), &e, &sigma);
        let truth = eval_qbf_bruteforce(q).expect("small");
        c.words.push((w, Expect::from_bool(truth)));
        out.push(c);
    }
}

fn automaton_entries(out: &mut Vec<CorpusEntry>) {
    for m in reference_automata() {
        let e = encode_two_way_automaton(&m).expect("encodes");
        let sigma = m.alphabet().expect("alphabet");
        let mut c = entry(&format!("automaton-{}", m.name), &e, &sigma);
        let max_len = if m.heads > 1 { 3 } else { 4 };
        for w in sigma.words_up_to(max_len) {
            let v = simulate_two_way_automaton(&m, &w).expect("simulates");
            c.words.push((w, Expect::from_bool(v)));
        }
        out.push(c);
    }
}

fn power_entries(out: &mut Vec<CorpusEntry>) {
    let a = Alphabet::new(['a']).expect("one symbol");
    for (kind, max_n) in [
        (PowerKind::OneExp, 9),
        (PowerKind::TwoExp, 6),
        (PowerKind::TwoExpNeg, 6),
        (PowerKind::Halving, 7),
    ] {
        let mut c = entry(kind.name(), &encode_power_language(kind), &a);
        for n in 0..=max_n {
            let x = kind.contains(n).map_or(Expect::CrossCheck, Expect::from_bool);
            c.words.push(("a".repeat(n as usize), x));
        }
        out.push(c);
    }
    let mut c = entry("prime", &prime_expr(), &a);
    for n in 0..=12u64 {
        // ε passes because `a*$` has nothing to reject
        let x = if n == 0 { Expect::Match } else { Expect::from_bool(is_prime(n)) };
        c.words.push(("a".repeat(n as usize), x));
    }
    out.push(c);
}

fn example_entries(out: &mut Vec<CorpusEntry>) {
    use Expect::*;
    let sigma_ab = Alphabet::new(['a', 'b']).expect("two symbols");
    let mut w = text_entry("w#w", r"(?<x>(a|b)*)#\k<x>", "ab#", &[("ab#ab", Match), ("ab#ba", NoMatch)]);
    for word in Alphabet::new(['a', 'b', '#']).expect("three symbols").words_up_to(3) {
        let x = Expect::from_bool(is_w_hash_w(&word));
        w.words.push((word, x));
    }
    out.push(w);

    let mut fix = text_entry("fixpoint-star", r"(?=(?<x>\k<x>a))*\k<x>", "a", &[]);
    for n in 0..=10 {
        fix.words.push(("a".repeat(n), Match));
    }
    out.push(fix);

    out.push(text_entry("empty", "", "a", &[("", Match), ("a", NoMatch)]));
    out.push(text_entry("literal", "a", "a", &[("a", Match), ("", NoMatch), ("aa", NoMatch)]));
    out.push(text_entry(
        "capture-union",
        "(?<x>a|ab)",
        "ab",
        &[("a", Match), ("ab", Match), ("b", NoMatch), ("", NoMatch)],
    ));
    out.push(text_entry("neg-a", "(?!a)", "ab", &[("a", NoMatch), ("", Match), ("b", NoMatch)]));
    out.push(text_entry("neg-b", "(?!b)", "ab", &[("a", NoMatch), ("", Match)]));
    out.push(text_entry(
        "pos-capture",
        "(?=(?<x>a))",
        "a",
        &[("a", NoMatch), ("", NoMatch)],
    ));
    out.push(text_entry(
        "pos-capture-reuse",
        r"(?=(?<x>a))\k<x>",
        "a",
        &[("a", Match), ("aa", NoMatch), ("", NoMatch)],
    ));
    out.push(text_entry(
        "neg-then-b",
        "(?!a)b",
        "ab",
        &[("b", Match), ("ab", NoMatch), ("a", NoMatch), ("bb", NoMatch)],
    ));
    out.push(text_entry("end-only", "(?!a|b)", "ab", &[("", Match), ("a", NoMatch), ("ab", NoMatch)]));
    out.push(text_entry(
        "double-negation",
        "(?!(?!a))a",
        "ab",
        &[("a", Match), ("b", NoMatch), ("aa", NoMatch)],
    ));
    out.push(text_entry(
        "destructive-pos",
        "(?=a)b",
        "ab",
        &[("b", NoMatch), ("ab", NoMatch), ("a", NoMatch)],
    ));
    out.push(text_entry(
        "dollar",
        "a*$",
        "ab",
        &[("", Match), ("aaa", Match), ("ab", NoMatch)],
    ));
    let mut rename = text_entry(r"rename-twice", r"(?<x>aa)(?<x>\k<x>\k<x>)", "a", &[]);
    for n in 0..=7 {
        rename.words.push(("a".repeat(n), Expect::from_bool(n == 6)));
    }
    out.push(rename);
    let mut nested = text_entry(
        "rename-in-lookahead",
        r"(?<x>a)(?<y>b)(?<x>(?=(?<x>\k<x>\k<x>))aa\k<y>)",
        "ab",
        &[],
    );
    for word in sigma_ab.words_up_to(4) {
        nested.words.push((word, CrossCheck));
    }
    out.push(nested);
    let mut star_star = text_entry("star-of-star", "(a*)*", "ab", &[]);
    for word in sigma_ab.words_up_to(3) {
        let x = Expect::from_bool(!word.contains('b'));
        star_star.words.push((word, x));
    }
    out.push(star_star);
}

fn random_entries(out: &mut Vec<CorpusEntry>) {
    let mut r = rng(RANDOM_SEED);
    let sigma = ['a', 'b'];
    for i in 0..RANDOM_EXPRESSIONS {
        let e = random_expr(&mut r, &sigma, 12, 2);
        let mut c = entry(&format!("random-{i:03}"), &e, &Alphabet::new(sigma).expect("two symbols"));
        for _ in 0..2 {
            let len = r.gen_range(0..=10);
            let w: String = (0..len).map(|_| sigma[r.gen_range(0..2)]).collect();
            c.words.push((w, Expect::CrossCheck));
        }
        out.push(c);
    }
}

/// The shipped corpus, generated deterministically.
pub fn builtin_corpus() -> Vec<CorpusEntry> {
    let mut out = Vec::new();
    example_entries(&mut out);
    power_entries(&mut out);
    graph_entries(&mut out);
    qbf_entries(&mut out);
    automaton_entries(&mut out);
    random_entries(&mut out);
    out
}
