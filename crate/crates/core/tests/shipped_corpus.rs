use rewbl::corpus::{builtin_corpus, check_corpus, default_threads, parse_corpus, write_corpus};

const SHIPPED: &str = include_str!("../corpus/builtin.corpus");

#[test]
fn file_matches_generator() {
    // regenerate with `cargo run --example regen_corpus`
    assert_eq!(SHIPPED, write_corpus(&builtin_corpus()));
}

#[test]
fn backends_agree_on_every_pair() {
    let entries = parse_corpus(SHIPPED).unwrap();
    let reports = check_corpus(&entries, default_threads());
    let mut bad = Vec::new();
    for r in &reports {
        if let Some(e) = &r.error {
            bad.push(format!("{}: {e}", r.label));
        }
        bad.extend(r.pairs.iter().filter(|p| !p.agree()).map(|p| format!("{}: {p}", r.label)));
    }
    assert!(bad.is_empty(), "{bad:#?}");
}
