use std::collections::{HashMap, HashSet};
use std::fmt;
use std::rc::Rc;

use num_bigint::BigUint;

use super::{tape_capacity, valid_count_formula, MachineSet, Prepared, LEND, REND};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExecError {
    #[error("input symbol {0:?} is not in the machine alphabet")]
    BadInput(char),
    #[error("input too long for the tape layout")]
    InputTooLong,
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

/// `⟨q, i, (T₁,i₁)…(T_k,i_k)⟩`. `data` holds the k tape heads followed by
/// the k tapes of `C+2` cells each, so the derived order compares state,
/// input head, tape heads and then tape contents.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Config {
    pub state: u32,
    pub head: u32,
    pub data: Box<[u8]>,
}

impl Config {
    pub fn tape_head(&self, x: usize) -> usize {
        self.data[x] as usize
    }

    /// Cells of tape `x` including both endmarkers.
    pub fn tape<'a>(&'a self, run: &Run, x: usize) -> &'a [u8] {
        let w = run.cap + 2;
        let base = run.k + x * w;
        &self.data[base..base + w]
    }

    /// Binary value of the `C` cells of tape `x`, least significant bit in
    /// the first cell, reading Γ code `3` as 1 and anything else as 0.
    pub fn tape_value(&self, run: &Run, x: usize) -> u64 {
        let cells = &self.tape(run, x)[1..=run.cap];
        cells
            .iter()
            .enumerate()
            .map(|(i, &c)| if c == 3 { 1u64 << i } else { 0 })
            .sum()
    }
}

/// Input word and tape geometry for one machine set.
#[derive(Debug, Clone)]
pub struct Run<'a> {
    pub set: &'a MachineSet,
    /// `⊢ w ⊣` as codes.
    pub input: Vec<u8>,
    pub n: usize,
    pub cap: usize,
    pub k: usize,
}

impl<'a> Run<'a> {
    pub fn new(set: &'a MachineSet, w: &str) -> Result<Run<'a>, ExecError> {
        let m = set.get(0);
        let mut input = vec![LEND];
        for ch in w.chars() {
            input.push(m.input_code(ch).ok_or(ExecError::BadInput(ch))?);
        }
        input.push(REND);
        let n = input.len() - 2;
        let cap = tape_capacity(m.c, n);
        if cap + 2 > u8::MAX as usize || n + 2 > u32::MAX as usize {
            return Err(ExecError::InputTooLong);
        }
        Ok(Run {
            set,
            input,
            n,
            cap,
            k: m.k,
        })
    }

    /// `I(w)` for machine `m`.
    pub fn initial(&self, m: usize) -> Config {
        let mach = self.set.get(m);
        self.blank_config(mach.init as u32, 0)
    }

    fn blank_config(&self, state: u32, head: u32) -> Config {
        let blank = self.set.get(0).blank_code();
        let w = self.cap + 2;
        let mut data = vec![0u8; self.k + self.k * w];
        for x in 0..self.k {
            let base = self.k + x * w;
            data[base] = LEND;
            for c in &mut data[base + 1..base + 1 + self.cap] {
                *c = blank;
            }
            data[base + w - 1] = REND;
        }
        Config {
            state,
            head,
            data: data.into(),
        }
    }

    /// Checks membership in `Valid(w)` for machine `m`.
    pub fn check(&self, m: usize, x: &Config) -> Result<(), ExecError> {
        let mach = self.set.get(m);
        let bad = |s: &str| Err(ExecError::InvalidConfig(s.to_string()));
        if x.state as usize >= mach.states.len() {
            return bad("state out of range");
        }
        if x.head as usize >= self.n + 2 {
            return bad("input head out of range");
        }
        let w = self.cap + 2;
        if x.data.len() != self.k + self.k * w {
            return bad("wrong tape layout");
        }
        let top = mach.gamma.len() as u8 + 2;
        for t in 0..self.k {
            if x.tape_head(t) >= w {
                return bad("tape head out of range");
            }
            let cells = x.tape(self, t);
            if cells[0] != LEND || cells[w - 1] != REND {
                return bad("tape endmarkers damaged");
            }
            if cells[1..w - 1].iter().any(|&c| c < 2 || c >= top) {
                return bad("tape cell outside Γ");
            }
        }
        Ok(())
    }

    pub fn valid_count(&self, m: usize) -> BigUint {
        let mach = self.set.get(m);
        valid_count_formula(mach.states.len(), self.n, mach.gamma.len(), self.k, self.cap)
    }
}

/// Answers oracle queries: the accepting configurations reachable by
/// machine `oracle` from `start`.
pub trait OracleAnswerer {
    fn accepting(&mut self, run: &Run, oracle: usize, start: &Config) -> Result<Rc<Vec<Config>>, ExecError>;
}

/// One labelled move.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transition {
    pub rule: usize,
    pub to: Config,
}

/// All `⇒`-successors of `x` in machine `m`, with the rule that produced
/// each one, in rule order.
pub fn step_detailed(
    run: &Run,
    m: usize,
    x: &Config,
    oracle: &mut dyn OracleAnswerer,
) -> Result<Vec<Transition>, ExecError> {
    let mut out = Vec::new();
    let w = run.cap + 2;
    for (ri, r) in &run.set.by_state[m][x.state as usize] {
        match r {
            Prepared::Input { read, mv, to } => {
                if run.input[x.head as usize] != *read {
                    continue;
                }
                let h = x.head as i64 + *mv as i64;
                if h < 0 || h >= run.input.len() as i64 {
                    continue;
                }
                out.push(Transition {
                    rule: *ri,
                    to: Config {
                        state: *to,
                        head: h as u32,
                        data: x.data.clone(),
                    },
                });
            }
            Prepared::Tape {
                tape,
                read,
                write,
                mv,
                to,
            } => {
                let hx = x.data[*tape] as usize;
                let cell = run.k + tape * w + hx;
                if x.data[cell] != *read {
                    continue;
                }
                let h = hx as i64 + *mv as i64;
                if h < 0 || h >= w as i64 {
                    continue;
                }
                let mut data = x.data.clone();
                data[cell] = *write;
                data[*tape] = h as u8;
                out.push(Transition {
                    rule: *ri,
                    to: Config {
                        state: *to,
                        head: x.head,
                        data,
                    },
                });
            }
            Prepared::OracleIn { oracle: n, to } => {
                let start = Config {
                    state: run.set.get(*n).init as u32,
                    head: x.head,
                    data: x.data.clone(),
                };
                for acc in oracle.accepting(run, *n, &start)?.iter() {
                    out.push(Transition {
                        rule: *ri,
                        to: Config {
                            state: *to,
                            head: x.head,
                            data: acc.data.clone(),
                        },
                    });
                }
            }
            Prepared::OracleNotIn { oracle: n, to } => {
                let start = Config {
                    state: run.set.get(*n).init as u32,
                    head: x.head,
                    data: x.data.clone(),
                };
                if oracle.accepting(run, *n, &start)?.is_empty() {
                    out.push(Transition {
                        rule: *ri,
                        to: Config {
                            state: *to,
                            head: x.head,
                            data: x.data.clone(),
                        },
                    });
                }
            }
        }
    }
    Ok(out)
}

/// Successor set of `x`, sorted and deduplicated.
pub fn step(run: &Run, m: usize, x: &Config, oracle: &mut dyn OracleAnswerer) -> Result<Vec<Config>, ExecError> {
    let mut v: Vec<Config> = step_detailed(run, m, x, oracle)?.into_iter().map(|t| t.to).collect();
    v.sort();
    v.dedup();
    Ok(v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExecOptions {
    /// Memoize oracle answers per (machine, start configuration).
    pub memoize: bool,
    /// Cap on configurations visited by a single search.
    pub max_configs: usize,
}

impl Default for ExecOptions {
    fn default() -> Self {
        ExecOptions {
            memoize: true,
            max_configs: 20_000_000,
        }
    }
}

type Observer<'o> = Box<dyn FnMut(usize, &Config, &Transition) + 'o>;

/// Breadth-first executor. Oracle queries are answered by recursive
/// searches on the referenced machine.
pub struct Bfs<'o> {
    pub opts: ExecOptions,
    memo: HashMap<(usize, Config), Rc<Vec<Config>>>,
    observer: Option<Observer<'o>>,
    /// Number of configurations expanded so far, across all searches.
    pub expanded: u64,
    pub oracle_calls: u64,
}

impl<'o> Bfs<'o> {
    pub fn new(opts: ExecOptions) -> Bfs<'o> {
        Bfs {
            opts,
            memo: HashMap::new(),
            observer: None,
            expanded: 0,
            oracle_calls: 0,
        }
    }

    /// Calls `f(machine, from, transition)` for every transition explored.
    pub fn with_observer(mut self, f: impl FnMut(usize, &Config, &Transition) + 'o) -> Bfs<'o> {
        self.observer = Some(Box::new(f));
        self
    }

    fn successors(&mut self, run: &Run, m: usize, x: &Config) -> Result<Vec<Config>, ExecError> {
        self.expanded += 1;
        let ts = step_detailed(run, m, x, self)?;
        if let Some(obs) = self.observer.as_mut() {
            for t in &ts {
                obs(m, x, t);
            }
        }
        Ok(ts.into_iter().map(|t| t.to).collect())
    }

    /// Configurations reachable from `start` with their BFS distance, in
    /// order of distance and then canonical order.
    pub fn distances(&mut self, run: &Run, m: usize, start: &Config) -> Result<Vec<(Config, usize)>, ExecError> {
        let mut seen: HashSet<Config> = HashSet::from([start.clone()]);
        let mut out = vec![(start.clone(), 0)];
        let mut layer = vec![start.clone()];
        let mut d = 0;
        while !layer.is_empty() {
            d += 1;
            let mut next = Vec::new();
            for x in &layer {
                for y in self.successors(run, m, x)? {
                    if !seen.contains(&y) {
                        seen.insert(y.clone());
                        next.push(y);
                    }
                }
                if seen.len() > self.opts.max_configs {
                    return Err(ExecError::Budget(format!("more than {} configurations", self.opts.max_configs)));
                }
            }
            next.sort();
            out.extend(next.iter().map(|c| (c.clone(), d)));
            layer = next;
        }
        Ok(out)
    }

    /// `M(w, start)`: accepting configurations reachable from `start`,
    /// sorted.
    pub fn reach_accepting(&mut self, run: &Run, m: usize, start: &Config) -> Result<Rc<Vec<Config>>, ExecError> {
        let key = (m, start.clone());
        if self.opts.memoize {
            if let Some(r) = self.memo.get(&key) {
                return Ok(r.clone());
            }
        }
        let mut seen: HashSet<Config> = HashSet::from([start.clone()]);
        let mut stack = vec![start.clone()];
        let mut acc = Vec::new();
        while let Some(x) = stack.pop() {
            if run.set.is_accepting(m, x.state as usize) {
                acc.push(x.clone());
            }
            for y in self.successors(run, m, &x)? {
                if !seen.contains(&y) {
                    seen.insert(y.clone());
                    stack.push(y);
                }
            }
            if seen.len() > self.opts.max_configs {
                return Err(ExecError::Budget(format!("more than {} configurations", self.opts.max_configs)));
            }
        }
        acc.sort();
        let r = Rc::new(acc);
        if self.opts.memoize {
            self.memo.insert(key, r.clone());
        }
        Ok(r)
    }

    /// Accepting configurations reachable from `start` by paths of at most
    /// `bound` steps, explored layer by layer. Also returns the number of
    /// layers actually explored.
    pub fn reach_accepting_bounded(
        &mut self,
        run: &Run,
        m: usize,
        start: &Config,
        bound: &BigUint,
    ) -> Result<(Vec<Config>, usize), ExecError> {
        let mut seen: HashSet<Config> = HashSet::from([start.clone()]);
        let mut layer = vec![start.clone()];
        let mut acc = Vec::new();
        let mut depth = 0usize;
        loop {
            for x in &layer {
                if run.set.is_accepting(m, x.state as usize) {
                    acc.push(x.clone());
                }
            }
            if layer.is_empty() || BigUint::from(depth) >= *bound {
                break;
            }
            let mut next = Vec::new();
            for x in &layer {
                for y in self.successors(run, m, x)? {
                    if seen.insert(y.clone()) {
                        next.push(y);
                    }
                }
            }
            if seen.len() > self.opts.max_configs {
                return Err(ExecError::Budget(format!("more than {} configurations", self.opts.max_configs)));
            }
            if !next.is_empty() {
                depth += 1;
            }
            layer = next;
        }
        acc.sort();
        Ok((acc, depth))
    }

    /// `w ∈ L(M)` for machine `m` of the run's set.
    pub fn accepts(&mut self, run: &Run, m: usize) -> Result<bool, ExecError> {
        let start = run.initial(m);
        Ok(!self.reach_accepting(run, m, &start)?.is_empty())
    }
}

impl OracleAnswerer for Bfs<'_> {
    fn accepting(&mut self, run: &Run, oracle: usize, start: &Config) -> Result<Rc<Vec<Config>>, ExecError> {
        self.oracle_calls += 1;
        self.reach_accepting(run, oracle, start)
    }
}

/// `|Valid(w)|` for machine `m`.
pub fn count_valid(set: &MachineSet, m: usize, w: &str) -> Result<BigUint, ExecError> {
    Ok(Run::new(set, w)?.valid_count(m))
}

/// Every member of `Valid(w)` for machine `m`, sorted. Exponential; for
/// tiny machines only.
pub fn enumerate_valid(run: &Run, m: usize) -> Vec<Config> {
    let mach = run.set.get(m);
    let w = run.cap + 2;
    let mut tapes: Vec<Vec<u8>> = vec![Vec::new()];
    for _ in 0..run.cap {
        tapes = tapes
            .into_iter()
            .flat_map(|t| {
                (0..mach.gamma.len() as u8).map(move |g| {
                    let mut t = t.clone();
                    t.push(g + 2);
                    t
                })
            })
            .collect();
    }
    let mut per_tape: Vec<(u8, Vec<u8>)> = Vec::new();
    for t in &tapes {
        for h in 0..w {
            let mut cells = vec![LEND];
            cells.extend_from_slice(t);
            cells.push(REND);
            per_tape.push((h as u8, cells));
        }
    }
    let mut datas: Vec<(Vec<u8>, Vec<u8>)> = vec![(Vec::new(), Vec::new())];
    for _ in 0..run.k {
        let mut next = Vec::new();
        for (hs, cs) in &datas {
            for (h, cells) in &per_tape {
                let mut hs2 = hs.clone();
                hs2.push(*h);
                let mut cs2 = cs.clone();
                cs2.extend_from_slice(cells);
                next.push((hs2, cs2));
            }
        }
        datas = next;
    }
    let mut out = Vec::new();
    for q in 0..mach.states.len() {
        for i in 0..run.n + 2 {
            for (hs, cs) in &datas {
                let mut data = hs.clone();
                data.extend_from_slice(cs);
                out.push(Config {
                    state: q as u32,
                    head: i as u32,
                    data: data.into(),
                });
            }
        }
    }
    out.sort();
    out
}

impl fmt::Display for Config {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "⟨{}, {}, {:?}⟩", self.state, self.head, self.data)
    }
}
