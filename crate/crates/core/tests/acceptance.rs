//! Acceptance gate: one PASS/FAIL line per criterion. Runs without the
//! libtest harness so the lines are always shown.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rewbl::compile::compile;
use rewbl::corpus::{check_corpus, default_threads, parse_corpus, CorpusEntry, RANDOM_EXPRESSIONS};
use rewbl::decision::{complement_accepts, decide_membership, ChoiceStrategy, DecideOptions, Decider};
use rewbl::encoders::{
    encode_power_language, encode_qbf, encode_reach, encode_tagap, encode_two_way_automaton, eval_qbf_bruteforce,
    prime_expr, read_qbf, reach_word, reference_automata, simulate_two_way_automaton, tagap_word, Digraph, PowerKind,
};
use rewbl::gen::{random_digraph, random_machine, random_qbf, random_tagap, rng};
use rewbl::machine::{read_machines, write_machines, Bfs, ExecOptions, MachineSet, Run};
use rewbl::semantics::accepts;
use rewbl::syntax::{parse, render, Alphabet, Expr};

const SHIPPED: &str = include_str!("../corpus/builtin.corpus");

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn bfs_accepts(set: &MachineSet, w: &str) -> Result<bool, String> {
    let run = Run::new(set, w).map_err(|e| e.to_string())?;
    Bfs::new(ExecOptions::default()).accepts(&run, 0).map_err(|e| e.to_string())
}

fn reference(e: &Expr, w: &str) -> Result<bool, String> {
    accepts(e, w).map_err(|e| e.to_string())
}

fn corpus() -> Vec<CorpusEntry> {
    parse_corpus(SHIPPED).expect("shipped corpus parses")
}

fn differential_backbone() -> Outcome {
    let start = Instant::now();
    let entries = corpus();
    let pairs: usize = entries.iter().map(|e| e.words.len()).sum();
    ensure(pairs >= 200, || format!("only {pairs} pairs"))?;
    let random = entries.iter().filter(|e| e.label().starts_with("random-")).count();
    ensure(random == RANDOM_EXPRESSIONS, || format!("{random} random expressions"))?;
    let reports = check_corpus(&entries, default_threads());
    let mut agree = 0;
    let mut first_bad = None;
    for r in &reports {
        if let Some(e) = &r.error {
            first_bad.get_or_insert_with(|| format!("{}: {e}", r.label));
            continue;
        }
        agree += r.agreeing();
        if let Some(p) = r.pairs.iter().find(|p| !p.agree()) {
            first_bad.get_or_insert_with(|| format!("{}: {p}", r.label));
        }
    }
    let elapsed = start.elapsed();
    ensure(agree == pairs, || format!("agree {agree}/{pairs}; first: {}", first_bad.unwrap_or_default()))?;
    ensure(elapsed < Duration::from_secs(600), || format!("took {elapsed:?}"))?;
    Ok(format!("agree {agree}/{pairs} in {:.1}s", elapsed.as_secs_f64()))
}

fn w_hash_w() -> Outcome {
    let sigma = Alphabet::new(['a', 'b', '#']).unwrap();
    let e = parse(r"(?<x>(a|b)*)#\k<x>", &sigma).unwrap();
    let shape = |w: &str| w.split_once('#').is_some_and(|(l, r)| l == r);
    let words = sigma.words_up_to(9);
    for w in &words {
        ensure(reference(&e, w)? == shape(w), || format!("reference wrong on {w:?}"))?;
    }
    let c = compile(&e, &sigma).map_err(|e| e.to_string())?;
    let small = sigma.words_up_to(5);
    for w in &small {
        ensure(bfs_accepts(&c.set, w)? == shape(w), || format!("compiled wrong on {w:?}"))?;
    }
    Ok(format!(
        "{} words over {{a,b,#}} with reference, {} with compiled BFS, 0 mismatches",
        words.len(),
        small.len()
    ))
}

fn fixpoint_star() -> Outcome {
    let sigma = Alphabet::new(['a']).unwrap();
    let e = parse(r"(?=(?<x>\k<x>a))*\k<x>", &sigma).unwrap();
    let c = compile(&e, &sigma).map_err(|e| e.to_string())?;
    for n in 0..=10 {
        let w = "a".repeat(n);
        ensure(reference(&e, &w)?, || format!("reference rejects a^{n}"))?;
        ensure(bfs_accepts(&c.set, &w)?, || format!("compiled BFS rejects a^{n}"))?;
        let d = decide_membership(&c.set, 0, &w, DecideOptions::default()).map_err(|e| e.to_string())?;
        ensure(d, || format!("interpreter rejects a^{n}"))?;
    }
    Ok("a^n accepted for 0 <= n <= 10 by all three backends".into())
}

fn power_languages() -> Outcome {
    let sigma = Alphabet::new(['a']).unwrap();
    let mut detail = Vec::new();
    for (kind, max_n, expected, bfs_max) in [
        (PowerKind::OneExp, 33u64, vec![1u64, 2, 4, 8, 16, 32], 16),
        (PowerKind::TwoExp, 20, vec![2, 4, 16], 8),
        (PowerKind::Halving, 25, vec![3, 6, 20], 8),
    ] {
        let e = encode_power_language(kind);
        let c = compile(&e, &sigma).map_err(|e| e.to_string())?;
        let mut members = Vec::new();
        for n in 0..=max_n {
            let w = "a".repeat(n as usize);
            let r = reference(&e, &w)?;
            ensure(kind.contains(n) == Some(r), || format!("{kind} closed form disagrees at n={n}"))?;
            if n <= bfs_max {
                ensure(bfs_accepts(&c.set, &w)? == r, || format!("{kind} compiled BFS disagrees at n={n}"))?;
            }
            if r {
                members.push(n);
            }
        }
        ensure(members == expected, || format!("{kind} members {members:?}, expected {expected:?}"))?;
        detail.push(format!("{kind} n<={max_n}: {members:?}"));
    }
    Ok(detail.join("; "))
}

fn tqbf() -> Outcome {
    let q = read_qbf("q a a e b a c a d\na b c\n-b c d\n").unwrap();
    let (e, w) = encode_qbf(&q).map_err(|e| e.to_string())?;
    let ft = Alphabet::new(['F', 'T']).unwrap();
    let c = compile(&e, &ft).map_err(|e| e.to_string())?;
    ensure(!reference(&e, &w)?, || "reference accepts the false QBF".into())?;
    ensure(!bfs_accepts(&c.set, &w)?, || "compiled BFS accepts the false QBF".into())?;
    let mut r = rng(500);
    let mut truths = 0;
    for i in 0..50 {
        let q = random_qbf(&mut r, 4, 3);
        let truth = eval_qbf_bruteforce(&q).map_err(|e| e.to_string())?;
        let (e, w) = encode_qbf(&q).map_err(|e| e.to_string())?;
        ensure(reference(&e, &w)? == truth, || format!("instance {i}: reference differs from brute force"))?;
        let c = compile(&e, &ft).map_err(|e| e.to_string())?;
        ensure(bfs_accepts(&c.set, &w)? == truth, || format!("instance {i}: compiled BFS differs from brute force"))?;
        truths += truth as usize;
    }
    Ok(format!("fixed Q rejected; 50 random instances agree on both backends ({truths} true)"))
}

fn tagap_and_reach() -> Outcome {
    let mut r = rng(600);
    let mut instances: Vec<(Digraph, bool)> = (0..100).map(|_| (random_tagap(&mut r, 6), true)).collect();
    instances.extend((0..50).map(|_| (random_digraph(&mut r, 5), false)));
    let mut reachable = 0;
    for (i, (g, tagap)) in instances.iter().enumerate() {
        let v = g.vertex_alphabet().map_err(|e| e.to_string())?;
        let (enc, w) = if *tagap {
            (encode_tagap(&v), tagap_word(g))
        } else {
            (encode_reach(&v), reach_word(g))
        };
        let (e, sigma) = enc.map_err(|e| e.to_string())?;
        let w = w.map_err(|e| e.to_string())?;
        let truth = g.reachable();
        reachable += truth as usize;
        ensure(reference(&e, &w)? == truth, || format!("instance {i}: reference differs from graph search"))?;
        let c = compile(&e, &sigma).map_err(|e| e.to_string())?;
        ensure(bfs_accepts(&c.set, &w)? == truth, || format!("instance {i}: compiled BFS differs from graph search"))?;
    }
    Ok(format!("100 DAGs and 50 digraphs agree on both backends ({reachable} reachable)"))
}

fn counts_within(dist: &[(rewbl::machine::Config, usize)], d: usize) -> BigUint {
    BigUint::from(dist.iter().filter(|(_, k)| *k <= d).count())
}

fn immerman_szelepcsenyi() -> Outcome {
    let mut r = rng(700);
    let machines: Vec<MachineSet> = (0..20)
        .map(|_| MachineSet::single(random_machine(&mut r, &['a', 'b'], 4, 1, 2)).expect("valid"))
        .collect();
    let sigma = Alphabet::new(['a', 'b']).unwrap();
    let words = sigma.words_up_to(4);
    let mut tiny: Vec<usize> = (0..machines.len()).collect();
    tiny.sort_by_key(|&i| (machines[i].get(0).k, machines[i].total_states(), i));
    tiny.truncate(3);
    let (mut phases_checked, mut accepted) = (0, 0);
    for (mi, set) in machines.iter().enumerate() {
        for w in &words {
            let run = Run::new(set, w).map_err(|e| e.to_string())?;
            let start = run.initial(0);
            let mut bfs = Bfs::new(ExecOptions::default());
            let dist = bfs.distances(&run, 0, &start).map_err(|e| e.to_string())?;
            let acc = !bfs.reach_accepting(&run, 0, &start).map_err(|e| e.to_string())?.is_empty();
            accepted += acc as usize;
            let mut d = Decider::new(&run, DecideOptions::default());
            let count = d.counting(0, &start, ChoiceStrategy::DistanceGuided).map_err(|e| e.to_string())?;
            for (ph, cur) in count.phases.iter().enumerate() {
                ensure(*cur == counts_within(&dist, ph), || format!("machine {mi} {w:?}: phase {ph} cur {cur}"))?;
                phases_checked += 1;
            }
            let total = BigUint::from(dist.len());
            ensure(count.values == BTreeSet::from([total.clone()]), || format!("machine {mi} {w:?}: count"))?;
            let judge = d.judge(0, &start, ChoiceStrategy::DistanceGuided).map_err(|e| e.to_string())?;
            ensure(judge.verdict() == Some(acc), || format!("machine {mi} {w:?}: judge {:?}", judge.verdict()))?;
            let comp = complement_accepts(set, 0, w, DecideOptions::default()).map_err(|e| e.to_string())?;
            ensure(acc ^ comp, || format!("machine {mi} {w:?}: accepts and complement agree"))?;
            if tiny.contains(&mi) {
                let ex = d.counting(0, &start, ChoiceStrategy::ExhaustiveBranch).map_err(|e| e.to_string())?;
                ensure(ex.values == BTreeSet::from([total]), || format!("machine {mi} {w:?}: exhaustive count"))?;
                let j = d.judge(0, &start, ChoiceStrategy::ExhaustiveBranch).map_err(|e| e.to_string())?;
                ensure(j.verdict() == Some(acc), || format!("machine {mi} {w:?}: exhaustive judge"))?;
            }
        }
    }
    Ok(format!(
        "20 machines x {} words: {phases_checked} phases match, {accepted} accepting runs, exhaustive on machines {tiny:?}",
        words.len()
    ))
}

fn halting_bound() -> Outcome {
    let mut pairs = 0;
    for entry in corpus() {
        let (e, sigma) = entry.parsed()?;
        let c = compile(&e, &sigma).map_err(|e| e.to_string())?;
        for (w, _) in &entry.words {
            let run = Run::new(&c.set, w).map_err(|e| e.to_string())?;
            let start = run.initial(0);
            let bound = run.valid_count(0);
            let mut bfs = Bfs::new(ExecOptions::default());
            let (bounded, _) = bfs.reach_accepting_bounded(&run, 0, &start, &bound).map_err(|e| e.to_string())?;
            let closure = !bfs.reach_accepting(&run, 0, &start).map_err(|e| e.to_string())?.is_empty();
            ensure(bounded.is_empty() != closure, || format!("{} on {w:?}", entry.label()))?;
            pairs += 1;
        }
    }
    Ok(format!("{pairs} corpus pairs agree"))
}

fn compilation_shape() -> Outcome {
    let mut points = Vec::new();
    for entry in corpus().iter().filter(|e| e.label().starts_with("random-")) {
        let (e, sigma) = entry.parsed()?;
        let c = compile(&e, &sigma).map_err(|e| e.to_string())?;
        let m = e.metrics();
        ensure(c.info.k <= 4 * m.size + 8, || format!("{}: k={} size={}", entry.expr, c.info.k, m.size))?;
        ensure(c.info.c == 1, || format!("{}: c={}", entry.expr, c.info.c))?;
        ensure(c.set.depth(0) == m.lookahead_depth, || format!("{}: depth", entry.expr))?;
        points.push((m.size as f64, c.info.k as f64));
    }
    let n = points.len() as f64;
    let (sx, sy) = points.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / n, sy / n);
    let sxy: f64 = points.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = points.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    Ok(format!(
        "{} expressions: fitted k = {slope:.2}*size + {:.2}; k <= 4*size+8, c = 1, depth = lookahead depth",
        points.len(),
        my - slope * mx
    ))
}

fn two_way_automata() -> Outcome {
    let mut detail = Vec::new();
    for m in reference_automata() {
        let e = encode_two_way_automaton(&m).map_err(|e| e.to_string())?;
        let sigma = m.alphabet().map_err(|e| e.to_string())?;
        let c = compile(&e, &sigma).map_err(|e| e.to_string())?;
        let words = sigma.words_up_to(8);
        let mut members = 0;
        for w in &words {
            let sim = simulate_two_way_automaton(&m, w).map_err(|e| e.to_string())?;
            ensure(reference(&e, w)? == sim, || format!("{} on {w:?}", m.name))?;
            if w.len() <= 5 {
                ensure(bfs_accepts(&c.set, w)? == sim, || format!("{} compiled BFS on {w:?}", m.name))?;
            }
            members += sim as usize;
        }
        detail.push(format!("{} {members}/{}", m.name, words.len()));
    }
    Ok(format!("reference on length <= 8, compiled BFS on length <= 5: {}", detail.join(", ")))
}

fn primes() -> Outcome {
    let mut sieve = [true; 51];
    sieve[0] = false;
    sieve[1] = false;
    for i in 2..=7 {
        for j in (i * i..=50).step_by(i) {
            sieve[j] = false;
        }
    }
    let e = prime_expr();
    for (n, &prime) in sieve.iter().enumerate().skip(1) {
        ensure(reference(&e, &"a".repeat(n))? == prime, || format!("a^{n}"))?;
    }
    ensure(reference(&e, "")?, || "ε rejected".into())?;
    Ok("a^n for 1 <= n <= 50 equals the sieve; ε is accepted".into())
}

fn round_trips() -> Outcome {
    let entries = corpus();
    let mut machines = 0;
    for entry in &entries {
        let (e, sigma) = entry.parsed()?;
        let text = render(&e);
        let back = parse(&text, &sigma).map_err(|e| e.to_string())?;
        ensure(back == e, || format!("{}: render/parse", entry.label()))?;
        let c = compile(&e, &sigma).map_err(|e| e.to_string())?;
        let file = write_machines(c.set.machines());
        let read = read_machines(&file).map_err(|e| e.to_string())?;
        ensure(read.as_slice() == c.set.machines(), || format!("{}: machine file", entry.label()))?;
        machines += read.len();
    }
    Ok(format!("{} expressions, {machines} machines", entries.len()))
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("differential backbone", differential_backbone),
        ("w#w language", w_hash_w),
        ("fixpoint star", fixpoint_star),
        ("power languages", power_languages),
        ("TQBF", tqbf),
        ("TAGAP and reachability", tagap_and_reach),
        ("Immerman-Szelepcsenyi", immerman_szelepcsenyi),
        ("halting bound", halting_bound),
        ("compilation shape", compilation_shape),
        ("two-way automata", two_way_automata),
        ("primes", primes),
        ("round trips", round_trips),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let label = format!("criterion {:>2} {name}", i + 1);
        if !filter.is_empty() && !filter.iter().any(|x| label.contains(x.as_str())) {
            continue;
        }
        let t = Instant::now();
        let result = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t.elapsed().as_secs_f64();
        match result {
            Ok(msg) => println!("PASS {label}: {msg} [{secs:.1}s]"),
            Err(msg) => {
                failed += 1;
                println!("FAIL {label}: {msg} [{secs:.1}s]");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
