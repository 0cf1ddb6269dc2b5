//! Inductive counting and `judge`, complement queries, and the
//! interpreter-style membership decider for nested-oracle machines.
//!
//! The nondeterministic guesses of the counting and judge procedures are
//! resolved by a [`ChoiceStrategy`]. `DistanceGuided` follows a
//! breadth-first spanning tree and is deterministic. `ExhaustiveBranch`
//! computes the set of every outcome a non-rejecting run can produce, by
//! exploring all guesses over the enumerated `Valid(w)`; it is exponential
//! and meant for tiny machines.
//!
//! Both procedures include the reflexive case: a configuration is reachable
//! from itself in zero steps. Counting credits `x` when `y = x` or
//! `y ⇒ x`, and judge inspects `Start` itself before taking a step.
//!
//! Oracle rules are answered with the set of configurations judge may
//! return `Some` with: accepting configurations reachable along a path
//! that meets no earlier accepting configuration.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::rc::Rc;

use num_bigint::BigUint;

use crate::machine::{enumerate_valid, step, Config, ExecError, MachineSet, OracleAnswerer, Run};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChoiceStrategy {
    DistanceGuided,
    ExhaustiveBranch,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DecideError {
    #[error(transparent)]
    Exec(#[from] ExecError),
    #[error("every branch rejected")]
    Rejected,
    #[error("budget exceeded: {0}")]
    Budget(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecideOptions {
    pub memoize: bool,
    /// Cap on configurations visited by one search.
    pub max_configs: usize,
    /// Cap on `|Valid(w)|` for exhaustive exploration.
    pub max_valid: usize,
}

impl Default for DecideOptions {
    fn default() -> Self {
        DecideOptions {
            memoize: true,
            max_configs: 20_000_000,
            max_valid: 4096,
        }
    }
}

/// Values returned by non-rejecting runs of `counting`, and for the
/// guided strategy the value of `cur` at the start of each phase.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountReport {
    pub values: BTreeSet<BigUint>,
    pub phases: Vec<BigUint>,
}

/// Outcomes of non-rejecting runs of `judge`. Empty when every run rejects.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JudgeReport {
    pub outcomes: BTreeSet<Option<Config>>,
}

impl JudgeReport {
    /// `Some(true)` when all outcomes are `Some(_)`, `Some(false)` when the
    /// only outcome is `None`, and `None` when outcomes disagree or every
    /// run rejected.
    pub fn verdict(&self) -> Option<bool> {
        let somes = self.outcomes.iter().filter(|o| o.is_some()).count();
        if self.outcomes.is_empty() || (somes > 0 && somes < self.outcomes.len()) {
            None
        } else {
            Some(somes > 0)
        }
    }
}

/// Breadth-first spanning tree from one start configuration.
struct Tree {
    /// Reachable configurations in BFS order.
    order: Vec<Config>,
    index: HashMap<Config, usize>,
    parent: Vec<usize>,
    dist: Vec<usize>,
}

/// Interpreter over one machine set and word.
pub struct Decider<'r, 'a> {
    run: &'r Run<'a>,
    opts: DecideOptions,
    outcomes_memo: HashMap<(usize, Config), Rc<Vec<Config>>>,
    /// Number of `judge_outcomes` evaluations, memo hits excluded.
    pub judge_calls: u64,
    /// Deepest nesting of oracle queries seen.
    pub max_nesting: usize,
    nesting: usize,
}

impl<'r, 'a> Decider<'r, 'a> {
    pub fn new(run: &'r Run<'a>, opts: DecideOptions) -> Decider<'r, 'a> {
        Decider {
            run,
            opts,
            outcomes_memo: HashMap::new(),
            judge_calls: 0,
            max_nesting: 0,
            nesting: 0,
        }
    }

    fn set(&self) -> &'a MachineSet {
        self.run.set
    }

    fn is_acc(&self, m: usize, x: &Config) -> bool {
        self.set().get(m).accept.contains(&(x.state as usize))
    }

    /// Interpreter successors, with oracle rules answered by judge.
    pub fn successors(&mut self, m: usize, x: &Config) -> Result<Vec<Config>, DecideError> {
        let run = self.run;
        Ok(step(run, m, x, self)?)
    }

    /// `x ⇒ x′`, oracle rules answered by judge on the referenced machine.
    pub fn one_step(&mut self, m: usize, x: &Config, x2: &Config) -> Result<bool, DecideError> {
        Ok(self.successors(m, x)?.binary_search(x2).is_ok())
    }

    /// Every `y` that judge can return as `Some(y)` from `start`.
    pub fn judge_outcomes(&mut self, m: usize, start: &Config) -> Result<Rc<Vec<Config>>, DecideError> {
        let key = (m, start.clone());
        if self.opts.memoize {
            if let Some(r) = self.outcomes_memo.get(&key) {
                return Ok(r.clone());
            }
        }
        self.judge_calls += 1;
        self.nesting += 1;
        self.max_nesting = self.max_nesting.max(self.nesting);
        let res = self.first_hits(m, start);
        self.nesting -= 1;
        let r = Rc::new(res?);
        if self.opts.memoize {
            self.outcomes_memo.insert(key, r.clone());
        }
        Ok(r)
    }

    fn first_hits(&mut self, m: usize, start: &Config) -> Result<Vec<Config>, DecideError> {
        if self.is_acc(m, start) {
            return Ok(vec![start.clone()]);
        }
        let mut seen: HashSet<Config> = HashSet::from([start.clone()]);
        let mut stack = vec![start.clone()];
        let mut hits = Vec::new();
        while let Some(x) = stack.pop() {
            for y in self.successors(m, &x)? {
                if seen.insert(y.clone()) {
                    if self.is_acc(m, &y) {
                        hits.push(y);
                    } else {
                        stack.push(y);
                    }
                }
            }
            if seen.len() > self.opts.max_configs {
                return Err(DecideError::Budget(format!("more than {} configurations", self.opts.max_configs)));
            }
        }
        hits.sort();
        Ok(hits)
    }

    fn tree(&mut self, m: usize, start: &Config) -> Result<Tree, DecideError> {
        let mut t = Tree {
            order: vec![start.clone()],
            index: HashMap::from([(start.clone(), 0)]),
            parent: vec![0],
            dist: vec![0],
        };
        let mut i = 0;
        while i < t.order.len() {
            let x = t.order[i].clone();
            for y in self.successors(m, &x)? {
                if !t.index.contains_key(&y) {
                    t.index.insert(y.clone(), t.order.len());
                    t.order.push(y);
                    t.parent.push(i);
                    t.dist.push(t.dist[i] + 1);
                }
            }
            if t.order.len() > self.opts.max_configs {
                return Err(DecideError::Budget(format!("more than {} configurations", self.opts.max_configs)));
            }
            i += 1;
        }
        Ok(t)
    }

    /// Guided counting. Phase `d` credits every `x` within distance `d + 1`:
    /// those within `d` through `y = x`, the others through their tree
    /// parent, whose edge is checked with `one_step`. The walk to each `y`
    /// follows tree edges, so `count` after the sweep over `y` is the
    /// number of configurations within distance `d`, which must equal
    /// `cur`. Phases stop at the fixpoint, after which `cur` cannot change.
    fn counting_guided(&mut self, m: usize, start: &Config) -> Result<(Tree, CountReport), DecideError> {
        let t = self.tree(m, start)?;
        let mut phases = Vec::new();
        let mut cur = 1usize;
        let mut d = 0;
        loop {
            phases.push(BigUint::from(cur));
            let within_d = t.dist.partition_point(|&x| x <= d);
            if within_d != cur {
                return Err(DecideError::Rejected);
            }
            let mut next = within_d;
            for x in within_d..t.order.len() {
                if t.dist[x] != d + 1 {
                    break;
                }
                let y = t.parent[x];
                let (yc, xc) = (t.order[y].clone(), t.order[x].clone());
                if !self.one_step(m, &yc, &xc)? {
                    return Err(DecideError::Rejected);
                }
                next += 1;
            }
            if next == cur {
                break;
            }
            cur = next;
            d += 1;
        }
        Ok((
            t,
            CountReport {
                values: BTreeSet::from([BigUint::from(cur)]),
                phases,
            },
        ))
    }

    pub fn counting(&mut self, m: usize, start: &Config, strategy: ChoiceStrategy) -> Result<CountReport, DecideError> {
        match strategy {
            ChoiceStrategy::DistanceGuided => Ok(self.counting_guided(m, start)?.1),
            ChoiceStrategy::ExhaustiveBranch => {
                let g = self.graph(m)?;
                let values = g.counting_outcomes(start);
                Ok(CountReport {
                    values: values.into_iter().map(BigUint::from).collect(),
                    phases: Vec::new(),
                })
            }
        }
    }

    pub fn judge(&mut self, m: usize, start: &Config, strategy: ChoiceStrategy) -> Result<JudgeReport, DecideError> {
        match strategy {
            ChoiceStrategy::DistanceGuided => {
                let (t, count) = self.counting_guided(m, start)?;
                let c = count.values.into_iter().next().expect("one value");
                let mut counted = 0usize;
                if self.is_acc(m, start) {
                    return Ok(JudgeReport {
                        outcomes: BTreeSet::from([Some(start.clone())]),
                    });
                }
                // first accepting configuration on the tree path to each node
                let mut first_acc: Vec<Option<usize>> = vec![None; t.order.len()];
                for i in 1..t.order.len() {
                    let p = t.parent[i];
                    first_acc[i] = first_acc[p].or(if self.is_acc(m, &t.order[i]) { Some(i) } else { None });
                }
                let mut xs: Vec<usize> = (0..t.order.len()).collect();
                xs.sort_by(|&a, &b| t.order[a].cmp(&t.order[b]));
                for x in xs {
                    if let Some(a) = first_acc[x] {
                        return Ok(JudgeReport {
                            outcomes: BTreeSet::from([Some(t.order[a].clone())]),
                        });
                    }
                    counted += 1;
                }
                if BigUint::from(counted) == c {
                    Ok(JudgeReport {
                        outcomes: BTreeSet::from([None]),
                    })
                } else {
                    Err(DecideError::Rejected)
                }
            }
            ChoiceStrategy::ExhaustiveBranch => {
                let g = self.graph(m)?;
                Ok(JudgeReport {
                    outcomes: g.judge_outcomes(start),
                })
            }
        }
    }

    /// One-step relation over all of `Valid(w)` for exhaustive runs.
    fn graph(&mut self, m: usize) -> Result<Graph, DecideError> {
        let count = self.run.valid_count(m);
        if count > BigUint::from(self.opts.max_valid) {
            return Err(DecideError::Budget(format!("|Valid(w)| = {count} exceeds {}", self.opts.max_valid)));
        }
        let valid = enumerate_valid(self.run, m);
        let index: HashMap<Config, usize> = valid.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect();
        let mut succ = Vec::with_capacity(valid.len());
        for x in &valid {
            let mut s: Vec<usize> = self.successors(m, x)?.iter().map(|y| index[y]).collect();
            s.sort_unstable();
            succ.push(s);
        }
        let accepting = valid.iter().map(|x| self.is_acc(m, x)).collect();
        Ok(Graph {
            valid,
            index,
            succ,
            accepting,
        })
    }
}

impl OracleAnswerer for Decider<'_, '_> {
    fn accepting(&mut self, _run: &Run, oracle: usize, start: &Config) -> Result<Rc<Vec<Config>>, ExecError> {
        self.judge_outcomes(oracle, start).map_err(|e| match e {
            DecideError::Exec(e) => e,
            other => ExecError::Budget(other.to_string()),
        })
    }
}

/// Explicit one-step graph over `Valid(w)`.
struct Graph {
    valid: Vec<Config>,
    index: HashMap<Config, usize>,
    succ: Vec<Vec<usize>>,
    accepting: Vec<bool>,
}

impl Graph {
    fn n(&self) -> usize {
        self.valid.len()
    }

    fn adj(&self, y: usize, x: usize) -> bool {
        self.succ[y].binary_search(&x).is_ok()
    }

    fn has_non_successor(&self, z: usize) -> bool {
        self.succ[z].len() < self.n()
    }

    fn distances(&self, start: usize) -> Vec<Option<usize>> {
        let mut d = vec![None; self.n()];
        d[start] = Some(0);
        let mut q = std::collections::VecDeque::from([start]);
        while let Some(z) = q.pop_front() {
            for &s in &self.succ[z] {
                if d[s].is_none() {
                    d[s] = Some(d[z].unwrap() + 1);
                    q.push_back(s);
                }
            }
        }
        d
    }

    /// Possible results `(reached y, missed y)` of the walk
    /// `z ← Start; up to dist guesses, stop when z = y`.
    fn walk_outcomes(&self, start: usize, y: usize, dist: usize, d_from_start: &[Option<usize>]) -> (bool, bool) {
        if y == start {
            return (true, false);
        }
        if dist == 0 {
            return (false, true);
        }
        let hit = matches!(d_from_start[y], Some(k) if k >= 1 && k <= dist);
        let miss = self.has_non_successor(start) || self.walk_can_miss(start, y, dist);
        (hit, miss)
    }

    fn walk_can_miss(&self, start: usize, y: usize, dist: usize) -> bool {
        let mut layer: BTreeSet<usize> = BTreeSet::from([start]);
        for _ in 0..dist {
            let mut next = BTreeSet::new();
            for &z in &layer {
                if self.has_non_successor(z) {
                    return true;
                }
                next.extend(self.succ[z].iter().copied().filter(|&s| s != y));
            }
            if next.is_empty() {
                return false;
            }
            layer = next;
        }
        true
    }

    /// Every value returned by a non-rejecting run of counting.
    fn counting_outcomes(&self, start: &Config) -> BTreeSet<usize> {
        let s = self.index[start];
        let ds = self.distances(s);
        let n = self.n();
        let mut curs: BTreeSet<usize> = BTreeSet::from([1]);
        for dist in 0..n {
            let walks: Vec<(bool, bool)> = (0..n).map(|y| self.walk_outcomes(s, y, dist, &ds)).collect();
            let mut nexts = BTreeSet::new();
            for &cur in &curs {
                // per x: can the run end this x with found, and without
                let mut lo = 0usize;
                let mut hi = 0usize;
                let mut dead = false;
                for x in 0..n {
                    let mut nf: Option<(usize, usize)> = Some((0, 0));
                    let mut found = false;
                    for (y, &(hit, miss)) in walks.iter().enumerate() {
                        let Some((a, b)) = nf else { break };
                        if y == x || self.adj(y, x) {
                            if hit {
                                found = true;
                            }
                            nf = if miss { Some((a, b)) } else { None };
                        } else {
                            nf = match (hit, miss) {
                                (true, true) => Some((a, b + 1)),
                                (true, false) => Some((a + 1, b + 1)),
                                _ => Some((a, b)),
                            };
                        }
                    }
                    let not_found_ok = matches!(nf, Some((a, b)) if a <= cur && cur <= b);
                    match (found, not_found_ok) {
                        (true, true) => hi += 1,
                        (true, false) => {
                            lo += 1;
                            hi += 1;
                        }
                        (false, true) => {}
                        (false, false) => {
                            dead = true;
                            break;
                        }
                    }
                }
                if !dead {
                    nexts.extend(lo..=hi);
                }
            }
            if nexts == curs {
                break;
            }
            curs = nexts;
            if curs.is_empty() {
                break;
            }
        }
        curs
    }

    /// Every outcome of a non-rejecting run of judge.
    fn judge_outcomes(&self, start: &Config) -> BTreeSet<Option<Config>> {
        let s = self.index[start];
        let mut out = BTreeSet::new();
        if self.accepting[s] {
            out.insert(Some(start.clone()));
            return out;
        }
        for c in self.counting_outcomes(start) {
            // counts reachable by runs still alive, as an interval
            let mut alive: Option<(usize, usize)> = Some((0, 0));
            for x in 0..self.n() {
                let Some((a, b)) = alive else { break };
                let (hits, can_count, can_skip) = self.judge_walk(s, x, c);
                for h in hits {
                    out.insert(Some(self.valid[h].clone()));
                }
                alive = match (can_count, can_skip) {
                    (true, true) => Some((a, b + 1)),
                    (true, false) => Some((a + 1, b + 1)),
                    (false, true) => Some((a, b)),
                    (false, false) => None,
                };
            }
            if let Some((a, b)) = alive {
                if a <= c && c <= b {
                    out.insert(None);
                }
            }
        }
        out
    }

    /// Walk of judge towards `x` with at most `c + 1` guesses: accepting
    /// configurations it can stop at, whether it can count `x`, and whether
    /// it can end without either.
    fn judge_walk(&self, s: usize, x: usize, c: usize) -> (BTreeSet<usize>, bool, bool) {
        if x == s {
            return (BTreeSet::new(), true, false);
        }
        let mut hits = BTreeSet::new();
        let (mut can_count, mut can_skip) = (false, false);
        let mut layer: BTreeSet<usize> = BTreeSet::from([s]);
        for _ in 0..=c {
            let mut next = BTreeSet::new();
            for &z in &layer {
                if self.has_non_successor(z) {
                    can_skip = true;
                }
                for &y in &self.succ[z] {
                    if self.accepting[y] {
                        hits.insert(y);
                    } else if y == x {
                        can_count = true;
                    } else {
                        next.insert(y);
                    }
                }
            }
            layer = next;
            if layer.is_empty() {
                break;
            }
        }
        if !layer.is_empty() {
            can_skip = true;
        }
        (hits, can_count, can_skip)
    }
}

/// `w ∉ L(M)`, decided by guided judge on `I(w)`.
pub fn complement_accepts(set: &MachineSet, m: usize, w: &str, opts: DecideOptions) -> Result<bool, DecideError> {
    let run = Run::new(set, w)?;
    let mut d = Decider::new(&run, opts);
    let start = run.initial(m);
    let r = d.judge(m, &start, ChoiceStrategy::DistanceGuided)?;
    Ok(r.outcomes.contains(&None))
}

/// `w ∈ L(M)` by the interpreter: guided judge on `I(w)`, with oracle
/// rules answered by judge on the referenced machines.
pub fn decide_membership(set: &MachineSet, m: usize, w: &str, opts: DecideOptions) -> Result<bool, DecideError> {
    let run = Run::new(set, w)?;
    let mut d = Decider::new(&run, opts);
    let start = run.initial(m);
    let r = d.judge(m, &start, ChoiceStrategy::DistanceGuided)?;
    r.verdict().ok_or(DecideError::Rejected)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::{Bfs, ExecOptions, Machine, Rule, LEND};

    /// q0 → q1 → q2 on ⊢ without moving; `acc` selects the accepting state.
    fn chain(acc: Option<usize>) -> MachineSet {
        let mut m = Machine::new("m", 0, 1, vec!['a'], vec!['0']);
        for i in 0..3 {
            m.add_state(format!("q{i}"));
        }
        for i in 0..2 {
            m.rules.push(Rule::Input {
                from: i,
                read: LEND,
                mv: 0,
                to: i + 1,
            });
        }
        m.accept = acc.into_iter().collect();
        MachineSet::single(m).unwrap()
    }

    #[test]
    fn one_step_on_chain() {
        let set = chain(None);
        let run = Run::new(&set, "").unwrap();
        let mut d = Decider::new(&run, DecideOptions::default());
        let x0 = run.initial(0);
        let mut x1 = x0.clone();
        x1.state = 1;
        assert!(d.one_step(0, &x0, &x1).unwrap());
        assert!(!d.one_step(0, &x1, &x0).unwrap());
        assert!(!d.one_step(0, &x0, &x0).unwrap());
    }

    #[test]
    fn counting_chain() {
        let set = chain(None);
        let run = Run::new(&set, "").unwrap();
        let mut d = Decider::new(&run, DecideOptions::default());
        let x0 = run.initial(0);
        for s in [ChoiceStrategy::DistanceGuided, ChoiceStrategy::ExhaustiveBranch] {
            let r = d.counting(0, &x0, s).unwrap();
            assert_eq!(r.values, BTreeSet::from([BigUint::from(3u32)]), "{s:?}");
        }
        let r = d.counting(0, &x0, ChoiceStrategy::DistanceGuided).unwrap();
        let phases: Vec<u32> = r.phases.iter().map(|p| p.try_into().unwrap()).collect();
        assert_eq!(phases, vec![1, 2, 3]);
        let mut isolated = x0.clone();
        isolated.state = 2;
        let r = d.counting(0, &isolated, ChoiceStrategy::DistanceGuided).unwrap();
        assert_eq!(r.values, BTreeSet::from([BigUint::from(1u32)]));
    }

    #[test]
    fn judge_chain() {
        for (acc, expect) in [(None, false), (Some(2), true), (Some(0), true)] {
            let set = chain(acc);
            let run = Run::new(&set, "").unwrap();
            let mut d = Decider::new(&run, DecideOptions::default());
            let x0 = run.initial(0);
            for s in [ChoiceStrategy::DistanceGuided, ChoiceStrategy::ExhaustiveBranch] {
                let r = d.judge(0, &x0, s).unwrap();
                assert_eq!(r.verdict(), Some(expect), "{acc:?} {s:?} {r:?}");
            }
            if acc == Some(0) {
                let r = d.judge(0, &x0, ChoiceStrategy::DistanceGuided).unwrap();
                assert_eq!(r.outcomes, BTreeSet::from([Some(x0.clone())]));
            }
            let bfs = Bfs::new(ExecOptions::default()).accepts(&run, 0).unwrap();
            assert_eq!(bfs, expect);
            assert_eq!(complement_accepts(&set, 0, "", DecideOptions::default()).unwrap(), !expect);
            assert_eq!(decide_membership(&set, 0, "", DecideOptions::default()).unwrap(), expect);
        }
    }

    #[test]
    fn oracle_not_in_with_empty_oracle() {
        let mut top = Machine::new("top", 0, 1, vec!['a'], vec!['0']);
        let p = top.add_state("p");
        let r = top.add_state("r");
        top.rules.push(Rule::OracleNotIn {
            from: p,
            oracle: "empty".into(),
            to: r,
        });
        top.accept.insert(r);
        let mut empty = Machine::new("empty", 0, 1, vec!['a'], vec!['0']);
        empty.add_state("e");
        let set = MachineSet::new(vec![top, empty]).unwrap();
        let run = Run::new(&set, "a").unwrap();
        let mut d = Decider::new(&run, DecideOptions::default());
        let x = run.initial(0);
        let mut target = x.clone();
        target.state = r as u32;
        assert!(d.one_step(0, &x, &target).unwrap());
        let mut other = target.clone();
        other.head = 1;
        assert!(!d.one_step(0, &x, &other).unwrap());
        assert!(decide_membership(&set, 0, "a", DecideOptions::default()).unwrap());
    }
}
