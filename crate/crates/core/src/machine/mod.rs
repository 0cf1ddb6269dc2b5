//! c-bounded k-tape nondeterministic machines with nested oracle rules.
//!
//! Symbols on the input and on working tapes are small codes: `0` is the
//! left endmarker ⊢, `1` the right endmarker ⊣, and `2 + i` the `i`-th
//! symbol of Σ (input) or Γ (tapes).

mod exec;
mod format;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_bigint::BigUint;
use num_traits::One;

pub use exec::{
    count_valid, enumerate_valid, step, step_detailed, Bfs, Config, ExecError, ExecOptions, OracleAnswerer, Run,
    Transition,
};
pub use format::{read_machines, write_machines, FormatError};

pub const LEND: u8 = 0;
pub const REND: u8 = 1;

/// Head movement.
pub type Move = i8;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Rule {
    /// `p →(τ|θ) q` on the input head.
    Input { from: usize, read: u8, mv: Move, to: usize },
    /// `p →_{T_x}(κ↦κ′|θ) q`; `tape` is 0-based.
    Tape { from: usize, tape: usize, read: u8, write: u8, mv: Move, to: usize },
    /// `p →(∈N) q`.
    OracleIn { from: usize, oracle: String, to: usize },
    /// `p →(∉N) q`.
    OracleNotIn { from: usize, oracle: String, to: usize },
}

impl Rule {
    pub fn from(&self) -> usize {
        match self {
            Rule::Input { from, .. }
            | Rule::Tape { from, .. }
            | Rule::OracleIn { from, .. }
            | Rule::OracleNotIn { from, .. } => *from,
        }
    }

    pub fn to(&self) -> usize {
        match self {
            Rule::Input { to, .. } | Rule::Tape { to, .. } | Rule::OracleIn { to, .. } | Rule::OracleNotIn { to, .. } => {
                *to
            }
        }
    }

    pub fn oracle(&self) -> Option<&str> {
        match self {
            Rule::OracleIn { oracle, .. } | Rule::OracleNotIn { oracle, .. } => Some(oracle),
            _ => None,
        }
    }
}

/// One machine. Oracle rules name other machines of the enclosing
/// [`MachineSet`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Machine {
    pub name: String,
    pub k: usize,
    pub c: usize,
    pub sigma: Vec<char>,
    pub gamma: Vec<char>,
    /// Index into `gamma`.
    pub blank: usize,
    pub states: Vec<String>,
    pub init: usize,
    pub accept: BTreeSet<usize>,
    pub rules: Vec<Rule>,
    /// `# key: value` header lines.
    pub meta: Vec<(String, String)>,
}

impl Machine {
    pub fn new(name: impl Into<String>, k: usize, c: usize, sigma: Vec<char>, gamma: Vec<char>) -> Machine {
        Machine {
            name: name.into(),
            k,
            c,
            sigma,
            gamma,
            blank: 0,
            states: Vec::new(),
            init: 0,
            accept: BTreeSet::new(),
            rules: Vec::new(),
            meta: Vec::new(),
        }
    }

    pub fn add_state(&mut self, name: impl Into<String>) -> usize {
        self.states.push(name.into());
        self.states.len() - 1
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    /// Input code of a Σ symbol.
    pub fn input_code(&self, c: char) -> Option<u8> {
        self.sigma.iter().position(|&s| s == c).map(|i| i as u8 + 2)
    }

    /// Tape code of a Γ symbol.
    pub fn tape_code(&self, c: char) -> Option<u8> {
        self.gamma.iter().position(|&s| s == c).map(|i| i as u8 + 2)
    }

    pub fn blank_code(&self) -> u8 {
        self.blank as u8 + 2
    }

    pub fn oracle_names(&self) -> BTreeSet<&str> {
        self.rules.iter().filter_map(Rule::oracle).collect()
    }

    pub fn meta_value(&self, key: &str) -> Option<&str> {
        self.meta.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

/// Validation failure with its location.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub machine: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.machine, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MachineError {
    #[error("invalid machine set:\n{}", .0.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("\n"))]
    Invalid(Vec<Diagnostic>),
    #[error("unknown machine {0:?}")]
    UnknownMachine(String),
}

/// Rule prepared for execution, with oracle names resolved.
#[derive(Debug, Clone)]
pub(crate) enum Prepared {
    Input { read: u8, mv: Move, to: u32 },
    Tape { tape: usize, read: u8, write: u8, mv: Move, to: u32 },
    OracleIn { oracle: usize, to: u32 },
    OracleNotIn { oracle: usize, to: u32 },
}

/// A validated collection of machines closed under oracle references.
#[derive(Debug, Clone)]
pub struct MachineSet {
    machines: Vec<Machine>,
    index: HashMap<String, usize>,
    /// Per machine, per state: (rule index, prepared rule).
    pub(crate) by_state: Vec<Vec<Vec<(usize, Prepared)>>>,
    accepting: Vec<Vec<bool>>,
}

impl MachineSet {
    pub fn new(machines: Vec<Machine>) -> Result<MachineSet, MachineError> {
        let diags = validate(&machines);
        if !diags.is_empty() {
            return Err(MachineError::Invalid(diags));
        }
        let index: HashMap<String, usize> = machines.iter().enumerate().map(|(i, m)| (m.name.clone(), i)).collect();
        let mut by_state = Vec::new();
        let mut accepting = Vec::new();
        for m in &machines {
            let mut table = vec![Vec::new(); m.states.len()];
            for (ri, r) in m.rules.iter().enumerate() {
                let p = match r {
                    Rule::Input { read, mv, to, .. } => Prepared::Input {
                        read: *read,
                        mv: *mv,
                        to: *to as u32,
                    },
                    Rule::Tape {
                        tape,
                        read,
                        write,
                        mv,
                        to,
                        ..
                    } => Prepared::Tape {
                        tape: *tape,
                        read: *read,
                        write: *write,
                        mv: *mv,
                        to: *to as u32,
                    },
                    Rule::OracleIn { oracle, to, .. } => Prepared::OracleIn {
                        oracle: index[oracle],
                        to: *to as u32,
                    },
                    Rule::OracleNotIn { oracle, to, .. } => Prepared::OracleNotIn {
                        oracle: index[oracle],
                        to: *to as u32,
                    },
                };
                table[r.from()].push((ri, p));
            }
            by_state.push(table);
            accepting.push((0..m.states.len()).map(|q| m.accept.contains(&q)).collect());
        }
        Ok(MachineSet {
            machines,
            index,
            by_state,
            accepting,
        })
    }

    pub fn single(m: Machine) -> Result<MachineSet, MachineError> {
        MachineSet::new(vec![m])
    }

    pub fn machines(&self) -> &[Machine] {
        &self.machines
    }

    pub fn into_machines(self) -> Vec<Machine> {
        self.machines
    }

    pub fn id(&self, name: &str) -> Result<usize, MachineError> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| MachineError::UnknownMachine(name.to_string()))
    }

    pub fn get(&self, id: usize) -> &Machine {
        &self.machines[id]
    }

    pub fn by_name(&self, name: &str) -> Option<&Machine> {
        self.index.get(name).map(|&i| &self.machines[i])
    }

    /// The first machine, which is the entry point by convention.
    pub fn entry(&self) -> usize {
        0
    }

    pub(crate) fn is_accepting(&self, m: usize, q: usize) -> bool {
        self.accepting[m][q]
    }

    /// Nesting depth: 0 without oracle rules, otherwise one more than the
    /// deepest referenced machine.
    pub fn depth(&self, id: usize) -> usize {
        fn go(set: &MachineSet, id: usize, memo: &mut HashMap<usize, usize>) -> usize {
            if let Some(&d) = memo.get(&id) {
                return d;
            }
            let d = set.machines[id]
                .oracle_names()
                .into_iter()
                .map(|n| 1 + go(set, set.index[n], memo))
                .max()
                .unwrap_or(0);
            memo.insert(id, d);
            d
        }
        go(self, id, &mut HashMap::new())
    }

    /// Machines reachable from `id` through oracle rules, including `id`.
    pub fn closure(&self, id: usize) -> BTreeSet<usize> {
        let mut seen = BTreeSet::new();
        let mut stack = vec![id];
        while let Some(i) = stack.pop() {
            if seen.insert(i) {
                stack.extend(self.machines[i].oracle_names().into_iter().map(|n| self.index[n]));
            }
        }
        seen
    }

    pub fn total_states(&self) -> usize {
        self.machines.iter().map(|m| m.states.len()).sum()
    }
}

/// Checks the well-formedness conditions on a list of machines. An empty
/// result means the list forms a valid [`MachineSet`].
pub fn validate(machines: &[Machine]) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let mut names: BTreeMap<&str, usize> = BTreeMap::new();
    for (i, m) in machines.iter().enumerate() {
        let mut d = |msg: String| {
            out.push(Diagnostic {
                machine: m.name.clone(),
                message: msg,
            })
        };
        if names.insert(&m.name, i).is_some() {
            d("duplicate machine name".into());
        }
        if m.name.is_empty() || m.name.chars().any(char::is_whitespace) {
            d("machine name must be a non-empty token".into());
        }
        if m.c == 0 {
            d("c must be at least 1".into());
        }
        if m.gamma.is_empty() {
            d("tape alphabet is empty".into());
        }
        if m.blank >= m.gamma.len() {
            d("blank symbol is not in the tape alphabet".into());
        }
        if m.sigma.len() + 2 > u8::MAX as usize || m.gamma.len() + 2 > u8::MAX as usize {
            d("alphabet too large".into());
        }
        if has_duplicates(&m.sigma) || has_duplicates(&m.gamma) {
            d("duplicate alphabet symbol".into());
        }
        if has_duplicates(&m.states) {
            d("duplicate state name".into());
        }
        if m.states.is_empty() {
            d("no states".into());
        }
        if m.init >= m.states.len() {
            d("initial state out of range".into());
        }
        for &q in &m.accept {
            if q >= m.states.len() {
                d(format!("accepting state {q} out of range"));
            }
        }
        let n_in = m.sigma.len() as u8 + 2;
        let n_tape = m.gamma.len() as u8 + 2;
        for (ri, r) in m.rules.iter().enumerate() {
            let at = format!("rule {ri}");
            if r.from() >= m.states.len() || r.to() >= m.states.len() {
                d(format!("{at}: state out of range"));
            }
            match r {
                Rule::Input { read, mv, .. } => {
                    if *read >= n_in {
                        d(format!("{at}: input symbol out of range"));
                    }
                    if !(-1..=1).contains(mv) {
                        d(format!("{at}: move out of range"));
                    }
                }
                Rule::Tape {
                    tape, read, write, mv, ..
                } => {
                    if *tape >= m.k {
                        d(format!("{at}: tape index {} out of range 1..={}", tape + 1, m.k));
                    }
                    if *read >= n_tape || *write >= n_tape {
                        d(format!("{at}: tape symbol out of range"));
                    }
                    if (*read <= REND || *write <= REND) && read != write {
                        d(format!("{at}: endmarker overwrite"));
                    }
                    if !(-1..=1).contains(mv) {
                        d(format!("{at}: move out of range"));
                    }
                }
                Rule::OracleIn { oracle, .. } | Rule::OracleNotIn { oracle, .. } => {
                    if !machines.iter().any(|n| &n.name == oracle) {
                        d(format!("{at}: unresolved oracle {oracle:?}"));
                    }
                }
            }
        }
    }
    if let Some(first) = machines.first() {
        for m in &machines[1..] {
            if (m.k, m.c, &m.sigma, &m.gamma, m.blank) != (first.k, first.c, &first.sigma, &first.gamma, first.blank) {
                out.push(Diagnostic {
                    machine: m.name.clone(),
                    message: format!("(c, k, Σ, Γ, blank) differs from machine {}", first.name),
                });
            }
        }
    }
    if out.is_empty() {
        if let Some(cycle) = find_cycle(machines, &names) {
            out.push(Diagnostic {
                machine: cycle.clone(),
                message: "cyclic oracle reference".into(),
            });
        }
    }
    out
}

fn has_duplicates<T: Ord>(xs: &[T]) -> bool {
    let set: BTreeSet<&T> = xs.iter().collect();
    set.len() != xs.len()
}

fn find_cycle(machines: &[Machine], names: &BTreeMap<&str, usize>) -> Option<String> {
    // 0 unvisited, 1 on stack, 2 done
    fn dfs(i: usize, machines: &[Machine], names: &BTreeMap<&str, usize>, mark: &mut [u8]) -> Option<usize> {
        mark[i] = 1;
        for n in machines[i].oracle_names() {
            let j = names[n];
            if mark[j] == 1 {
                return Some(j);
            }
            if mark[j] == 0 {
                if let Some(c) = dfs(j, machines, names, mark) {
                    return Some(c);
                }
            }
        }
        mark[i] = 2;
        None
    }
    let mut mark = vec![0u8; machines.len()];
    for i in 0..machines.len() {
        if mark[i] == 0 {
            if let Some(j) = dfs(i, machines, names, &mut mark) {
                return Some(machines[j].name.clone());
            }
        }
    }
    None
}

/// `C = c·⌈log₂(n+2)⌉` for an input of length `n`.
pub fn tape_capacity(c: usize, n: usize) -> usize {
    let m = (n + 2) as u64;
    let bits = 64 - (m - 1).leading_zeros() as usize;
    c * bits
}

/// `|Valid(w)| = |Q|·(n+2)·(|Γ|^C·(C+2))^k`.
pub fn valid_count_formula(states: usize, n: usize, gamma: usize, k: usize, cap: usize) -> BigUint {
    let per_tape = BigUint::from(gamma).pow(cap as u32) * BigUint::from(cap + 2);
    let mut tapes = BigUint::one();
    for _ in 0..k {
        tapes *= &per_tape;
    }
    BigUint::from(states) * BigUint::from(n + 2) * tapes
}
