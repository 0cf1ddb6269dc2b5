use std::path::PathBuf;

use rewbl::cli::run_cli;

fn cli(args: &[&str]) -> (i32, String) {
    run_cli(std::iter::once("rewbl").chain(args.iter().copied()))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("rewbl-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn w_hash_w() {
    let e = r"(?<x>(a|b)*)#\k<x>";
    assert_eq!(cli(&["match", "-e", e, "-i", "ab#ab"]), (0, "MATCH\n".to_string()));
    assert_eq!(cli(&["match", "-e", e, "-i", "ab#ba"]), (1, "NO-MATCH\n".to_string()));
}

#[test]
fn compile_then_decide_with_each_engine() {
    let file = scratch("neg.machines");
    let path = file.to_str().unwrap();
    let (code, text) = cli(&["compile", "-e", "(?!a)(a|b)", "--sigma", "ab", "-o", path]);
    assert_eq!(code, 0, "{text}");
    assert!(text.contains("depth=1"), "{text}");
    for engine in ["bfs", "interpreter", "complement"] {
        assert_eq!(cli(&["decide", "--machine", path, "-i", "b", "--engine", engine]).0, 0, "{engine}");
        assert_eq!(cli(&["decide", "--machine", path, "-i", "a", "--engine", engine]).0, 1, "{engine}");
        assert_eq!(
            cli(&["decide", "--machine", path, "--entry", "main", "-i", "ab", "--engine", engine]).0,
            1,
            "{engine}"
        );
    }
    assert_eq!(cli(&["decide", "--machine", path, "--entry", "nope", "-i", "b"]).0, 2);
    assert_eq!(cli(&["decide", "--machine", path, "-i", "c"]).0, 2);
}

#[test]
fn encoders_print_stanzas() {
    let g = scratch("g.graph");
    std::fs::write(&g, "s s\nt t\nedge s a\nedge a t\n").unwrap();
    let (code, text) = cli(&["encode", "reach", g.to_str().unwrap()]);
    assert_eq!(code, 0, "{text}");
    assert!(text.contains("word: s#s→a#a→t#t"), "{text}");
    let (code, text) = cli(&["encode", "tagap", g.to_str().unwrap()]);
    assert_eq!(code, 0, "{text}");
    assert!(text.contains("word: s#⌜s→a⌝⌜a→t⌝#t"), "{text}");
    let q = scratch("q.qbf");
    std::fs::write(&q, "q e a\na\n").unwrap();
    let (code, text) = cli(&["encode", "qbf", q.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(text.ends_with("word: TFT\n"), "{text}");
    assert_eq!(cli(&["encode", "prime"]).0, 0);
    assert_eq!(cli(&["encode", "power", "nope"]).0, 2);
}

#[test]
fn shipped_corpus_agrees() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/corpus/builtin.corpus");
    let (code, text) = cli(&["corpus", path]);
    assert_eq!(code, 0, "{text}");
    let last = text.lines().last().unwrap();
    let (n, m) = last.strip_prefix("agree: ").unwrap().split_once('/').unwrap();
    assert_eq!(n, m);
}

#[test]
fn corpus_reports_disagreement() {
    let f = scratch("bad.corpus");
    std::fs::write(&f, "expr: a\nword: a expect: nomatch\nword: b expect: nomatch\n").unwrap();
    let (code, text) = cli(&["corpus", f.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(text.ends_with("agree: 1/2\n"), "{text}");
}
