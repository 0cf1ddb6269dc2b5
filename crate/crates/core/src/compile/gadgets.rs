//! Rule-level building blocks: nop edges, binary counter operations and
//! the backreference shuttle. Every counter gadget expects the heads of the
//! tapes it touches on ⊢ and leaves them there.

use std::collections::{BTreeMap, BTreeSet};

use super::{BIT0, BIT1, C, J, POS, SAVE};
use crate::machine::{Machine, Move, Rule, LEND, REND};
use crate::syntax::Alphabet;

/// A machine under construction.
pub struct Builder {
    pub m: Machine,
    pub sync: BTreeSet<usize>,
    pub writers: BTreeMap<usize, String>,
    owner: Option<String>,
    sigma_codes: Vec<u8>,
}

impl Builder {
    pub fn new(name: &str, sigma: &Alphabet) -> Builder {
        let m = Machine::new(name, 0, C, sigma.symbols().to_vec(), vec!['0', '1']);
        let sigma_codes = (0..sigma.len() as u8).map(|i| i + 2).collect();
        Builder {
            m,
            sync: BTreeSet::new(),
            writers: BTreeMap::new(),
            owner: None,
            sigma_codes,
        }
    }

    pub fn state(&mut self) -> usize {
        let q = self.m.add_state(format!("q{}", self.m.states.len()));
        if let Some(x) = &self.owner {
            self.writers.insert(q, x.clone());
        }
        q
    }

    /// Runs `f` with every state it creates attributed to variable `x`.
    pub fn owned(&mut self, x: &str, f: impl FnOnce(&mut Builder)) {
        let prev = self.owner.replace(x.to_string());
        f(self);
        self.owner = prev;
    }

    pub fn input(&mut self, from: usize, read: u8, mv: Move, to: usize) {
        self.m.rules.push(Rule::Input { from, read, mv, to });
    }

    pub fn tape(&mut self, from: usize, tape: usize, read: u8, write: u8, mv: Move, to: usize) {
        self.m.rules.push(Rule::Tape {
            from,
            tape,
            read,
            write,
            mv,
            to,
        });
    }

    /// `p →(τ|0) q` for every τ ∈ Σ ∪ {⊢, ⊣}.
    pub fn nop(&mut self, from: usize, to: usize) {
        for tau in [LEND, REND].into_iter().chain(self.sigma_codes.clone()) {
            self.input(from, tau, 0, to);
        }
    }

    /// Moves the head of `t` left until it reads ⊢.
    fn home(&mut self, t: usize, from: usize, to: usize) {
        for s in [BIT0, BIT1, REND] {
            self.tape(from, t, s, s, -1, from);
        }
        self.tape(from, t, LEND, LEND, 0, to);
    }

    /// `t := t + 1`. Overflow has no successor.
    pub fn inc(&mut self, t: usize, from: usize, to: usize) {
        let carry = self.state();
        let back = self.state();
        self.tape(from, t, LEND, LEND, 1, carry);
        self.tape(carry, t, BIT1, BIT0, 1, carry);
        self.tape(carry, t, BIT0, BIT1, -1, back);
        self.home(t, back, to);
    }

    /// `b := a`.
    pub fn copy(&mut self, a: usize, b: usize, from: usize, to: usize) {
        let f1 = self.state();
        let c = self.state();
        let c0 = self.state();
        let c1 = self.state();
        let d = self.state();
        let d2 = self.state();
        self.tape(from, a, LEND, LEND, 1, f1);
        self.tape(f1, b, LEND, LEND, 1, c);
        self.tape(c, a, BIT0, BIT0, 1, c0);
        self.tape(c, a, BIT1, BIT1, 1, c1);
        self.tape(c, a, REND, REND, 0, d);
        for s in [BIT0, BIT1] {
            self.tape(c0, b, s, BIT0, 1, c);
            self.tape(c1, b, s, BIT1, 1, c);
        }
        self.home(a, d, d2);
        self.home(b, d2, to);
    }

    /// Branches to `on_eq` when `a = b` and to `on_ne` otherwise.
    pub fn eq(&mut self, a: usize, b: usize, from: usize, on_eq: usize, on_ne: usize) {
        let f1 = self.state();
        let c = self.state();
        let c0 = self.state();
        let c1 = self.state();
        let same = self.state();
        let same2 = self.state();
        let diff = self.state();
        let diff2 = self.state();
        self.tape(from, a, LEND, LEND, 1, f1);
        self.tape(f1, b, LEND, LEND, 1, c);
        self.tape(c, a, BIT0, BIT0, 1, c0);
        self.tape(c, a, BIT1, BIT1, 1, c1);
        self.tape(c, a, REND, REND, 0, same);
        self.tape(c0, b, BIT0, BIT0, 1, c);
        self.tape(c0, b, BIT1, BIT1, 0, diff);
        self.tape(c1, b, BIT1, BIT1, 1, c);
        self.tape(c1, b, BIT0, BIT0, 0, diff);
        self.home(a, same, same2);
        self.home(b, same2, on_eq);
        self.home(a, diff, diff2);
        self.home(b, diff2, on_ne);
    }

    /// `t := 0`.
    pub fn clear(&mut self, t: usize, from: usize, to: usize) {
        let c = self.state();
        let h = self.state();
        self.tape(from, t, LEND, LEND, 1, c);
        self.tape(c, t, BIT0, BIT0, 1, c);
        self.tape(c, t, BIT1, BIT0, 1, c);
        self.tape(c, t, REND, REND, 0, h);
        self.home(t, h, to);
    }

    /// Moves the input head to ⊢ and resets `POS` to match.
    fn rewind(&mut self, from: usize, to: usize) {
        let r = self.state();
        for tau in self.sigma_codes.clone().into_iter().chain([REND]) {
            self.input(from, tau, -1, from);
        }
        self.input(from, LEND, 0, r);
        self.clear(POS, r, to);
    }

    /// From ⊢ with `POS = 0`, advances the input head until `POS = target`.
    fn seek(&mut self, target: usize, from: usize, to: usize) {
        let adv = self.state();
        let adv2 = self.state();
        self.eq(POS, target, from, to, adv);
        for tau in self.sigma_codes.clone().into_iter().chain([LEND]) {
            self.input(adv, tau, 1, adv2);
        }
        self.inc(POS, adv2, from);
    }

    /// Matches `w[x_l..x_r)` at the input head, one symbol per round:
    /// seek to `J`, latch the symbol, seek back to `SAVE`, compare, advance.
    pub fn backref(&mut self, xl: usize, xr: usize, from: usize, to: usize) {
        let lp = self.state();
        let done = self.state();
        let go = self.state();
        let rw = self.state();
        let seek = self.state();
        let latch = self.state();
        self.copy(xl, J, from, lp);
        self.eq(J, xr, lp, done, go);
        self.clear(J, done, to);
        self.copy(POS, SAVE, go, rw);
        self.rewind(rw, seek);
        self.seek(J, seek, latch);
        for sigma in self.sigma_codes.clone() {
            let back = self.state();
            let seek_back = self.state();
            let chk = self.state();
            let m1 = self.state();
            let m2 = self.state();
            let m3 = self.state();
            self.input(latch, sigma, 0, back);
            self.rewind(back, seek_back);
            self.seek(SAVE, seek_back, chk);
            self.input(chk, sigma, 1, m1);
            self.inc(POS, m1, m2);
            self.inc(J, m2, m3);
            self.clear(SAVE, m3, lp);
        }
    }
}
