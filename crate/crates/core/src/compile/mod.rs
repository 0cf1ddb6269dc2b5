//! Translation of expressions into nested-oracle machines with `c = 1`.
//!
//! Tape layout (0-based): `POS` mirrors the input head as a binary counter,
//! `J` and `SAVE` are scratch counters for backreferences, then one
//! `(x_l, x_r)` pair per variable, then one save tape per positive
//! lookahead nesting level. Counters store the least significant bit in
//! the first cell, with Γ = {0, 1} and blank 0.
//!
//! Every gadget starts and ends with all tape heads on ⊢. Each lookahead
//! becomes a separate oracle machine; a positive lookahead body saves
//! `POS` on entry and restores it before accepting, since the caller keeps
//! the oracle's tapes but resumes at its own input position.

mod gadgets;

use std::collections::{BTreeMap, BTreeSet};

use crate::machine::{Machine, MachineError, MachineSet, Rule, LEND, REND};
use crate::syntax::{
    as_rename_idiom, normalize_lookahead_continuations, rename_captures, Alphabet, Expr, SyntaxError,
};

pub use gadgets::Builder;

pub const POS: usize = 0;
pub const J: usize = 1;
pub const SAVE: usize = 2;
const FIRST_VAR: usize = 3;
/// Γ code of the blank `0`.
pub const BIT0: u8 = 2;
/// Γ code of `1`.
pub const BIT1: u8 = 3;
/// The fixed space coefficient.
pub const C: usize = 1;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CompileError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("literal {0:?} is not in the alphabet")]
    UnknownSymbol(char),
    #[error(transparent)]
    Machine(#[from] MachineError),
}

/// Bookkeeping for the instrumented checks.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CompileInfo {
    pub k: usize,
    pub c: usize,
    pub depth: usize,
    /// Tapes `(x_l, x_r)` per variable of the renamed expression.
    pub var_tapes: BTreeMap<String, (usize, usize)>,
    /// Per machine: states at fragment boundaries, where `POS` equals the
    /// input head.
    pub sync_states: Vec<BTreeSet<usize>>,
    /// Per machine: states of the capture gadget owning each variable.
    pub writers: Vec<BTreeMap<usize, String>>,
}

impl CompileInfo {
    /// Variable whose tape is `t`, if any.
    pub fn owner_of_tape(&self, t: usize) -> Option<&str> {
        self.var_tapes
            .iter()
            .find(|(_, (l, r))| *l == t || *r == t)
            .map(|(x, _)| x.as_str())
    }
}

#[derive(Debug, Clone)]
pub struct Compiled {
    pub set: MachineSet,
    pub info: CompileInfo,
}

impl Compiled {
    pub fn machines(&self) -> &[Machine] {
        self.set.machines()
    }
}

/// Compiles `e` into a machine set whose first machine is named `main`.
pub fn compile(e: &Expr, sigma: &Alphabet) -> Result<Compiled, CompileError> {
    compile_named(e, sigma, "main", 0)
}

/// Compiles `e` with machine names derived from `prefix`, padding the tape
/// count to at least `min_k` so the result can be merged with other
/// compiled sets.
pub fn compile_named(e: &Expr, sigma: &Alphabet, prefix: &str, min_k: usize) -> Result<Compiled, CompileError> {
    for c in e.literals() {
        if !sigma.contains(c) {
            return Err(CompileError::UnknownSymbol(c));
        }
    }
    let renamed = rename_captures(e)?;
    let normal = normalize_lookahead_continuations(&renamed);
    let vars: Vec<String> = normal.metrics().variables.into_iter().collect();
    let var_tapes: BTreeMap<String, (usize, usize)> = vars
        .iter()
        .enumerate()
        .map(|(i, x)| (x.clone(), (FIRST_VAR + 2 * i, FIRST_VAR + 2 * i + 1)))
        .collect();
    let mut cx = Compiler {
        sigma: sigma.clone(),
        prefix: prefix.to_string(),
        var_tapes,
        la_base: FIRST_VAR + 2 * vars.len(),
        max_la: 0,
        machines: Vec::new(),
        sync: Vec::new(),
        writers: Vec::new(),
        next_la: 0,
    };
    let mut b = Builder::new(prefix, sigma);
    let init = b.state();
    let after_lend = b.state();
    b.input(init, LEND, 1, after_lend);
    let (s, t) = cx.translate(&mut b, &normal, 0)?;
    b.inc(POS, after_lend, s);
    let f = b.state();
    b.input(t, REND, 0, f);
    b.m.init = init;
    b.m.accept.insert(f);
    b.m.meta = vec![("source".into(), crate::syntax::render(e))];
    cx.push_machine(b);
    // the entry machine goes first
    cx.machines.rotate_right(1);
    cx.sync.rotate_right(1);
    cx.writers.rotate_right(1);

    let k = (cx.la_base + cx.max_la).max(min_k);
    for m in &mut cx.machines {
        m.k = k;
    }
    let set = MachineSet::new(cx.machines)?;
    let depth = set.depth(0);
    let mut machines = set.into_machines();
    for (i, m) in machines.iter_mut().enumerate() {
        let mut meta = std::mem::take(&mut m.meta);
        meta.push(("k".into(), k.to_string()));
        meta.push(("c".into(), C.to_string()));
        if i == 0 {
            meta.push(("depth".into(), depth.to_string()));
        }
        m.meta = meta;
    }
    let set = MachineSet::new(machines)?;
    Ok(Compiled {
        info: CompileInfo {
            k,
            c: C,
            depth,
            var_tapes: cx.var_tapes,
            sync_states: cx.sync,
            writers: cx.writers,
        },
        set,
    })
}

/// Thompson construction for an expression built from literals, ε, union,
/// concatenation and star. Returns the fragment's machine (with a `POS`
/// tape) and its source and sink.
pub fn translate_regex_core(e: &Expr, sigma: &Alphabet) -> Result<(Machine, usize, usize), CompileError> {
    let mut ok = true;
    e.visit(&mut |n| {
        if !matches!(
            n,
            Expr::Literal(_) | Expr::Epsilon | Expr::Union(..) | Expr::Concat(..) | Expr::Star(_)
        ) {
            ok = false;
        }
    });
    if !ok {
        return Err(CompileError::Syntax(SyntaxError::Syntax {
            pos: 0,
            msg: "not a classical regular expression".into(),
        }));
    }
    for c in e.literals() {
        if !sigma.contains(c) {
            return Err(CompileError::UnknownSymbol(c));
        }
    }
    let mut cx = Compiler {
        sigma: sigma.clone(),
        prefix: "core".into(),
        var_tapes: BTreeMap::new(),
        la_base: FIRST_VAR,
        max_la: 0,
        machines: Vec::new(),
        sync: Vec::new(),
        writers: Vec::new(),
        next_la: 0,
    };
    let mut b = Builder::new("core", sigma);
    let (s, t) = cx.translate(&mut b, e, 0)?;
    b.m.k = FIRST_VAR;
    b.m.init = s;
    b.m.accept.insert(t);
    Ok((b.m, s, t))
}

struct Compiler {
    sigma: Alphabet,
    prefix: String,
    var_tapes: BTreeMap<String, (usize, usize)>,
    la_base: usize,
    max_la: usize,
    machines: Vec<Machine>,
    sync: Vec<BTreeSet<usize>>,
    writers: Vec<BTreeMap<usize, String>>,
    next_la: usize,
}

impl Compiler {
    fn push_machine(&mut self, b: Builder) {
        self.sync.push(b.sync);
        self.writers.push(b.writers);
        self.machines.push(b.m);
    }

    /// Builds the fragment for `e` and returns its (source, sink).
    /// `depth` is the number of enclosing positive lookaheads.
    fn translate(&mut self, b: &mut Builder, e: &Expr, depth: usize) -> Result<(usize, usize), CompileError> {
        let (s, t) = match e {
            Expr::Literal(c) => {
                let s = b.state();
                let mid = b.state();
                let t = b.state();
                let code = b.m.input_code(*c).ok_or(CompileError::UnknownSymbol(*c))?;
                b.input(s, code, 1, mid);
                b.inc(POS, mid, t);
                (s, t)
            }
            Expr::Epsilon => {
                let s = b.state();
                let t = b.state();
                b.nop(s, t);
                (s, t)
            }
            Expr::Union(l, r) => {
                let s = b.state();
                let (ls, lt) = self.translate(b, l, depth)?;
                let (rs, rt) = self.translate(b, r, depth)?;
                let t = b.state();
                b.nop(s, ls);
                b.nop(s, rs);
                b.nop(lt, t);
                b.nop(rt, t);
                (s, t)
            }
            Expr::Concat(..) if as_rename_idiom(e).is_some() => {
                let (body, y, x) = as_rename_idiom(e).expect("checked");
                let (yl, yr) = self.var_tapes[y];
                let (xl, xr) = self.var_tapes[x];
                let (s, t) = self.capture(b, body, y, depth)?;
                let m1 = b.state();
                let t2 = b.state();
                b.nop(t, m1);
                b.owned(x, |b| b.copy(yl, xl, m1, t2));
                let t3 = b.state();
                b.owned(x, |b| b.copy(yr, xr, t2, t3));
                (s, t3)
            }
            Expr::Concat(l, r) if l.is_lookahead() => {
                let (body, positive) = match &**l {
                    Expr::PosLookahead(b) => (b, true),
                    Expr::NegLookahead(b) => (b, false),
                    _ => unreachable!(),
                };
                let name = self.lookahead_machine(body, positive, depth)?;
                let s = b.state();
                let (rs, rt) = self.translate(b, r, depth)?;
                b.m.rules.push(if positive {
                    Rule::OracleIn {
                        from: s,
                        oracle: name,
                        to: rs,
                    }
                } else {
                    Rule::OracleNotIn {
                        from: s,
                        oracle: name,
                        to: rs,
                    }
                });
                (s, rt)
            }
            Expr::Concat(l, r) => {
                let (ls, lt) = self.translate(b, l, depth)?;
                let (rs, rt) = self.translate(b, r, depth)?;
                b.nop(lt, rs);
                (ls, rt)
            }
            Expr::Star(body) => {
                let s = b.state();
                let (bs, bt) = self.translate(b, body, depth)?;
                let t = b.state();
                b.nop(s, bs);
                b.nop(bt, bs);
                b.nop(bt, t);
                b.nop(s, t);
                (s, t)
            }
            Expr::Capture(body, x) => self.capture(b, body, x, depth)?,
            Expr::Backref(x) => {
                let (xl, xr) = self.var_tapes[x];
                let s = b.state();
                let t = b.state();
                b.backref(xl, xr, s, t);
                (s, t)
            }
            Expr::PosLookahead(_) | Expr::NegLookahead(_) => {
                // normalization puts every lookahead in front of a continuation
                let e2 = Expr::cat(e.clone(), Expr::Epsilon);
                return self.translate(b, &e2, depth);
            }
        };
        b.sync.insert(s);
        b.sync.insert(t);
        Ok((s, t))
    }

    fn capture(&mut self, b: &mut Builder, body: &Expr, x: &str, depth: usize) -> Result<(usize, usize), CompileError> {
        let (xl, xr) = self.var_tapes[x];
        let s = b.state();
        let (bs, bt) = self.translate(b, body, depth)?;
        b.owned(x, |b| b.copy(POS, xl, s, bs));
        let t = b.state();
        b.owned(x, |b| b.copy(POS, xr, bt, t));
        Ok((s, t))
    }

    /// Emits the oracle machine for a lookahead body and returns its name.
    fn lookahead_machine(&mut self, body: &Expr, positive: bool, depth: usize) -> Result<String, CompileError> {
        let name = format!("{}_la{}", self.prefix, self.next_la);
        self.next_la += 1;
        let mut b = Builder::new(&name, &self.sigma);
        let inner_depth = if positive { depth + 1 } else { depth };
        let (s, t) = self.translate(&mut b, body, inner_depth)?;
        if positive {
            let save = self.la_base + depth;
            self.max_la = self.max_la.max(depth + 1);
            let init = b.state();
            let acc = b.state();
            b.copy(POS, save, init, s);
            b.copy(save, POS, t, acc);
            b.m.init = init;
            b.m.accept.insert(acc);
            // at `acc` POS already holds the caller's position
            b.sync.insert(init);
        } else {
            b.m.init = s;
            b.m.accept.insert(t);
        }
        self.push_machine(b);
        Ok(name)
    }
}

/// Tape count bound checked on compiled machines: `k ≤ 4·size + 3`.
pub fn tape_bound(size: usize) -> usize {
    4 * size + 3
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::{Bfs, ExecOptions, Run};
    use crate::semantics::accepts;
    use crate::syntax::parse;

    fn check_against_reference(text: &str, sigma: &str, max_len: usize) {
        let sigma = Alphabet::new(sigma.chars()).unwrap();
        let e = parse(text, &sigma).unwrap();
        let c = compile(&e, &sigma).unwrap();
        for w in sigma.words_up_to(max_len) {
            let run = Run::new(&c.set, &w).unwrap();
            let got = Bfs::new(ExecOptions::default()).accepts(&run, 0).unwrap();
            assert_eq!(got, accepts(&e, &w).unwrap(), "{text} on {w:?}");
        }
    }

    #[test]
    fn literal() {
        check_against_reference("a", "ab", 3);
    }

    #[test]
    fn regex_core() {
        check_against_reference("(a|b)*a", "ab", 4);
        check_against_reference("a*", "a", 4);
        check_against_reference("", "a", 2);
    }

    #[test]
    fn captures_and_backrefs() {
        check_against_reference(r"(?<x>ab)\k<x>", "ab", 4);
        check_against_reference(r"(?<x>a|ab)#\k<x>", "ab#", 5);
        check_against_reference(r"\k<x>a", "a", 2);
    }

    #[test]
    fn lookaheads() {
        check_against_reference("(?=a)(a|b)", "ab", 2);
        check_against_reference("(?!a)(a|b)", "ab", 2);
        check_against_reference(r"(?=(?<x>a))\k<x>", "ab", 2);
        check_against_reference("(?!(?=a))b", "ab", 2);
    }

    #[test]
    fn renaming() {
        check_against_reference(r"(?<x>aa)(?<x>\k<x>\k<x>)", "a", 6);
        check_against_reference(r"(?=(?<x>\k<x>a))*\k<x>", "a", 4);
    }

    #[test]
    fn depth_matches_nesting() {
        let sigma = Alphabet::new("ab".chars()).unwrap();
        let d = |t: &str| compile(&parse(t, &sigma).unwrap(), &sigma).unwrap().info.depth;
        assert_eq!(d("(?=a)b"), 1);
        assert_eq!(d("(?!(?=a))b"), 2);
        assert_eq!(d(r"(?<x>a\k<x>)"), 0);
    }

    #[test]
    fn union_fragment_shape() {
        let sigma = Alphabet::new("ab".chars()).unwrap();
        let (m, _, _) = translate_regex_core(&parse("a|b", &sigma).unwrap(), &sigma).unwrap();
        let consuming = m
            .rules
            .iter()
            .filter(|r| matches!(r, Rule::Input { mv: 1, .. }))
            .count();
        let fans: BTreeSet<(usize, usize)> = m
            .rules
            .iter()
            .filter_map(|r| match r {
                Rule::Input { from, mv: 0, to, .. } => Some((*from, *to)),
                _ => None,
            })
            .collect();
        assert_eq!(consuming, 2);
        assert_eq!(fans.len(), 4);
    }
}
