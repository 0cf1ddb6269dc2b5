"""Smoke test for the rewbl_py extension.

Build and run from the repository root:

    cargo build -p rewbl-py --release --features extension-module
    cp target/release/librewbl_py.so python/rewbl_py.so
    python3 python/smoke_test.py
"""

import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import rewbl_py as r  # noqa: E402


def main():
    ww = r.Expr(r"(?<x>(a|b)*)#\k<x>")
    assert ww.accepts("ab#ab")
    assert not ww.accepts("ab#ba")
    assert ww.variables == ["x"]
    assert r.Expr(ww.render()).render() == ww.render()

    fix = r.Expr(r"(?=(?<x>\k<x>a))*\k<x>")
    assert all(fix.accepts("a" * n) for n in range(11))

    one = r.power_expr("1exp")
    assert one.enumerate(9) == ["a", "aa", "aaaa", "aaaaaaaa"]

    m = r.compile("(?!a)(a|b)", sigma="ab")
    assert m.depth == 1
    for engine in ("bfs", "interpreter", "complement"):
        assert m.accepts("b", engine=engine)
        assert not m.accepts("a", engine=engine)
    back = r.MachineSet.from_text(m.to_text())
    assert back.to_text() == m.to_text()

    expr, word, truth = r.encode_qbf("q e a\na\n")
    assert (word, truth) == ("TFT", True)
    assert expr.accepts(word)

    expr, word, reachable = r.encode_graph("s s\nt t\nedge s a\nedge a s\nedge a t\n")
    assert reachable and expr.accepts(word)
    assert expr.compile().accepts(word)

    primes = [n for n in range(1, 20) if r.prime_expr().accepts("a" * n)]
    assert primes == [2, 3, 5, 7, 11, 13, 17, 19]

    try:
        r.Expr("(")
    except ValueError:
        pass
    else:
        raise AssertionError("parse error expected")
    try:
        r.Expr("(a|aa)*(a|aa)*b").accepts("a" * 12, max_pairs=2)
    except r.BudgetExceeded:
        pass
    else:
        raise AssertionError("budget error expected")

    corpus = os.path.join(os.path.dirname(__file__), "..", "crates", "core", "corpus", "builtin.corpus")
    with open(corpus) as f:
        agree, total = r.check_corpus_text(f.read())
    assert agree == total, (agree, total)
    print(f"smoke test ok; corpus agree {agree}/{total}")


if __name__ == "__main__":
    main()
