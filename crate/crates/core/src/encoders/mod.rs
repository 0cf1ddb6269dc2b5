//! Expressions for benchmark languages and reductions, together with the
//! brute-force oracles that validate them.

mod automaton;
mod graph;
mod power;
mod qbf;

pub use automaton::{
    encode_two_way_automaton, read_automaton, reference_automata, simulate_two_way_automaton, write_automaton, TwRule, TwoWayAutomaton,
};
pub use graph::{
    encode_reach, encode_tagap, non_reach_machines, reach_alphabet, reach_word, read_graph, tagap_alphabet,
    tagap_word, write_graph, Digraph,
};
pub use power::{encode_power_language, prime_expr, PowerKind};
pub use qbf::{encode_qbf, eval_qbf_bruteforce, read_qbf, write_qbf, Quant, Qbf};

use crate::syntax::{Alphabet, SyntaxError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EncodeError {
    #[error("symbol {0:?} is reserved")]
    Reserved(char),
    #[error("clause references unbound variable {0:?}")]
    UnboundVariable(String),
    #[error("invalid instance: {0}")]
    Invalid(String),
    #[error("size guard exceeded: {0}")]
    TooLarge(String),
    #[error("line {line}: {msg}")]
    Format { line: usize, msg: String },
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error(transparent)]
    Compile(#[from] crate::compile::CompileError),
    #[error(transparent)]
    Machine(#[from] crate::machine::MachineError),
}

/// Expression text for the literal `c`.
fn lit(c: char) -> String {
    if matches!(c, '(' | ')' | '|' | '*' | '\\' | '$') {
        format!("\\{c}")
    } else {
        c.to_string()
    }
}

/// `(σ₁|…|σₙ)`.
fn any(sigma: &Alphabet) -> String {
    let parts: Vec<String> = sigma.symbols().iter().map(|&c| lit(c)).collect();
    format!("({})", parts.join("|"))
}

/// `Σ` repeated `n` times.
fn any_n(sigma: &Alphabet, n: usize) -> String {
    any(sigma).repeat(n)
}

fn format_err(line: usize, msg: impl Into<String>) -> EncodeError {
    EncodeError::Format { line, msg: msg.into() }
}
