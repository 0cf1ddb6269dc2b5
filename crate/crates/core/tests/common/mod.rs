#![allow(dead_code)]

use proptest::prelude::*;
use rewbl::syntax::Expr;

/// Expressions over `{a, b}` with captures named `x`, `y` and at most two
/// nested lookaheads.
pub fn expr_strategy() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        Just(Expr::Epsilon),
        Just(Expr::lit('a')),
        Just(Expr::lit('b')),
        prop_oneof![Just("x"), Just("y")].prop_map(Expr::backref),
    ];
    leaf.prop_recursive(4, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Expr::cat(l, r)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Expr::alt(l, r)),
            inner.clone().prop_map(Expr::star),
            (inner.clone(), prop_oneof![Just("x"), Just("y")]).prop_map(|(e, x)| Expr::capture(e, x)),
            inner.clone().prop_map(Expr::pos),
            inner.prop_map(Expr::neg),
        ]
    })
    .prop_filter("lookahead depth at most 2", |e| e.metrics().lookahead_depth <= 2)
}

pub fn word_strategy(max_len: usize) -> impl Strategy<Value = String> {
    proptest::collection::vec(prop_oneof![Just('a'), Just('b')], 0..=max_len).prop_map(|v| v.into_iter().collect())
}
