//! Seeded random instances: expressions, graphs, QBFs and small machines.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::encoders::{Digraph, Qbf, Quant};
use crate::machine::{Machine, Rule, LEND, REND};
use crate::syntax::Expr;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Expression over `sigma` with at most `max_size` nodes and lookahead
/// nesting at most `max_la`. Capture names come from `{x, y}`.
pub fn random_expr(r: &mut impl Rng, sigma: &[char], max_size: usize, max_la: usize) -> Expr {
    let size = r.gen_range(1..=max_size.max(1));
    expr_of_size(r, sigma, size, max_la)
}

fn expr_of_size(r: &mut impl Rng, sigma: &[char], size: usize, la: usize) -> Expr {
    const NAMES: [&str; 2] = ["x", "y"];
    if size <= 1 {
        return match r.gen_range(0..10) {
            0 => Expr::Epsilon,
            1 | 2 => Expr::backref(*NAMES.choose(r).unwrap()),
            _ => Expr::lit(*sigma.choose(r).unwrap()),
        };
    }
    let pick = if size >= 3 { r.gen_range(0..10) } else { r.gen_range(5..10) };
    match pick {
        0..=4 => {
            let left = r.gen_range(1..=size - 2);
            let a = expr_of_size(r, sigma, left, la);
            let b = expr_of_size(r, sigma, size - 1 - left, la);
            if pick < 3 {
                Expr::cat(a, b)
            } else {
                Expr::alt(a, b)
            }
        }
        5 => Expr::star(expr_of_size(r, sigma, size - 1, la)),
        6 | 7 => Expr::capture(expr_of_size(r, sigma, size - 1, la), *NAMES.choose(r).unwrap()),
        _ if la > 0 => {
            let body = expr_of_size(r, sigma, size - 1, la - 1);
            if r.gen_bool(0.5) {
                Expr::pos(body)
            } else {
                Expr::neg(body)
            }
        }
        _ => Expr::star(expr_of_size(r, sigma, size - 1, la)),
    }
}

fn vertex_name(i: usize) -> String {
    char::from(b'a' + i as u8).to_string()
}

/// Random DAG on `2..=max_vertices` vertices with edges listed in a
/// topological order; `s` and `t` are random vertices.
pub fn random_tagap(r: &mut impl Rng, max_vertices: usize) -> Digraph {
    let n = r.gen_range(2..=max_vertices.max(2));
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(r);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if r.gen_bool(0.35) {
                edges.push((order[i], order[j]));
            }
        }
    }
    // sorting by source rank lists every edge into v before any edge out of v
    edges.sort_by_key(|&(x, _)| order.iter().position(|&o| o == x));
    let s = order[r.gen_range(0..n)];
    let t = order[r.gen_range(0..n)];
    let mut g = Digraph::new(vertex_name(s), vertex_name(t));
    g.edges = edges.into_iter().map(|(x, y)| (vertex_name(x), vertex_name(y))).collect();
    g
}

/// Random digraph on `2..=max_vertices` vertices; cycles and self-loops
/// allowed.
pub fn random_digraph(r: &mut impl Rng, max_vertices: usize) -> Digraph {
    let n = r.gen_range(2..=max_vertices.max(2));
    let mut g = Digraph::new(vertex_name(r.gen_range(0..n)), vertex_name(r.gen_range(0..n)));
    for x in 0..n {
        for y in 0..n {
            if r.gen_bool(0.25) {
                g.edges.push((vertex_name(x), vertex_name(y)));
            }
        }
    }
    g.edges.shuffle(r);
    g
}

/// Random prenex CNF QBF with `1..=max_vars` variables and
/// `1..=max_clauses` nonempty clauses of up to three literals.
pub fn random_qbf(r: &mut impl Rng, max_vars: usize, max_clauses: usize) -> Qbf {
    let nv = r.gen_range(1..=max_vars.max(1));
    let names: Vec<String> = (0..nv).map(|i| format!("v{i}")).collect();
    let prefix = names
        .iter()
        .map(|v| (if r.gen_bool(0.5) { Quant::Exists } else { Quant::Forall }, v.clone()))
        .collect();
    let nc = r.gen_range(1..=max_clauses.max(1));
    let clauses = (0..nc)
        .map(|_| {
            let len = r.gen_range(1..=3.min(nv));
            let mut vars: Vec<&String> = names.iter().collect();
            vars.shuffle(r);
            vars[..len].iter().map(|v| ((*v).clone(), r.gen_bool(0.5))).collect()
        })
        .collect();
    Qbf { prefix, clauses }
}

/// Random depth-0 machine over `sigma` with `2..=max_states` states,
/// `0..=max_k` tapes and `1..=max_gamma` tape symbols. The last state
/// always accepts; each (state, scanned symbol) pair gets a rule with
/// probability one half, moving away from endmarkers.
pub fn random_machine(r: &mut impl Rng, sigma: &[char], max_states: usize, max_k: usize, max_gamma: usize) -> Machine {
    let nq = r.gen_range(2..=max_states.max(2));
    let k = r.gen_range(0..=max_k);
    let ng = r.gen_range(1..=max_gamma.max(1));
    let gamma: Vec<char> = "01".chars().take(ng).collect();
    let mut m = Machine::new("main", k, 1, sigma.to_vec(), gamma);
    for i in 0..nq {
        m.add_state(format!("q{i}"));
    }
    let mv_for = |r: &mut dyn rand::RngCore, sym: u8| match sym {
        LEND => r.gen_range(0..=1),
        REND => r.gen_range(-1..=0),
        _ => r.gen_range(-1..=1),
    };
    let input_syms: Vec<u8> = [LEND, REND].into_iter().chain((0..sigma.len() as u8).map(|i| i + 2)).collect();
    let tape_syms: Vec<u8> = [LEND, REND].into_iter().chain((0..ng as u8).map(|i| i + 2)).collect();
    for from in 0..nq {
        for &read in &input_syms {
            if r.gen_bool(0.5) {
                let mv = mv_for(r, read);
                m.rules.push(Rule::Input { from, read, mv, to: r.gen_range(0..nq) });
            }
        }
        for tape in 0..k {
            for &read in &tape_syms {
                if r.gen_bool(0.3) {
                    let write = if read < 2 { read } else { r.gen_range(2..2 + ng as u8) };
                    let mv = mv_for(r, read);
                    m.rules.push(Rule::Tape { from, tape, read, write, mv, to: r.gen_range(0..nq) });
                }
            }
        }
    }
    m.accept.insert(nq - 1);
    for q in 1..nq - 1 {
        if r.gen_bool(0.3) {
            m.accept.insert(q);
        }
    }
    m
}
