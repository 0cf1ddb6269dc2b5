//! Differential corpus: expressions with words, checked by the reference
//! evaluator, breadth-first search on the compiled machine, and the
//! interpreter decider.
//!
//! ```text
//! # comment
//! name: w#w
//! expr: (?<x>(a|b)*)#\k<x>
//! sigma: ab#
//! word: ab#ab expect: match
//! word: ab#ba expect: nomatch
//! word: # expect: crosscheck
//! ```
//!
//! Stanzas are separated by blank lines. `name`, `sigma` and `budget`
//! (maximum evaluator pairs) are optional; without `sigma` the alphabet is
//! inferred from the expression and its words.

mod builtin;

pub use builtin::{builtin_corpus, RANDOM_EXPRESSIONS, RANDOM_SEED};

use std::fmt::{self, Write as _};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use crate::compile::compile;
use crate::decision::{decide_membership, DecideOptions};
use crate::machine::{Bfs, ExecOptions, Run};
use crate::semantics::{accepts_with, Budget};
use crate::syntax::{infer_alphabet, parse, Alphabet, Expr};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Expect {
    Match,
    NoMatch,
    CrossCheck,
}

impl Expect {
    pub fn from_bool(b: bool) -> Expect {
        if b {
            Expect::Match
        } else {
            Expect::NoMatch
        }
    }

    fn name(self) -> &'static str {
        match self {
            Expect::Match => "match",
            Expect::NoMatch => "nomatch",
            Expect::CrossCheck => "crosscheck",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusEntry {
    pub name: Option<String>,
    pub expr: String,
    pub sigma: Option<String>,
    pub budget: Option<usize>,
    pub words: Vec<(String, Expect)>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {msg}")]
pub struct CorpusError {
    pub line: usize,
    pub msg: String,
}

impl CorpusEntry {
    pub fn new(expr: impl Into<String>) -> CorpusEntry {
        CorpusEntry {
            name: None,
            expr: expr.into(),
            sigma: None,
            budget: None,
            words: Vec::new(),
        }
    }

    pub fn label(&self) -> &str {
        self.name.as_deref().unwrap_or(&self.expr)
    }

    pub fn alphabet(&self) -> Result<Alphabet, String> {
        let r = match &self.sigma {
            Some(s) => Alphabet::from_set(s.chars().filter(|c| !c.is_whitespace())),
            None => {
                let words: String = self.words.iter().map(|(w, _)| w.as_str()).collect();
                infer_alphabet(&self.expr, &words)
            }
        };
        r.map_err(|e| e.to_string())
    }

    pub fn parsed(&self) -> Result<(Expr, Alphabet), String> {
        let sigma = self.alphabet()?;
        let e = parse(&self.expr, &sigma).map_err(|e| e.to_string())?;
        Ok((e, sigma))
    }
}

pub fn parse_corpus(text: &str) -> Result<Vec<CorpusEntry>, CorpusError> {
    let mut out = Vec::new();
    let mut cur: Option<CorpusEntry> = None;
    let mut pending_name = None;
    let finish = |cur: &mut Option<CorpusEntry>, out: &mut Vec<CorpusEntry>| {
        if let Some(e) = cur.take() {
            out.push(e);
        }
    };
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let err = |msg: &str| CorpusError {
            line: line_no,
            msg: msg.to_string(),
        };
        let line = raw.trim_end();
        if line.trim().is_empty() {
            finish(&mut cur, &mut out);
            continue;
        }
        if line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once(':').ok_or_else(|| err("expected `key: value`"))?;
        let value = value.strip_prefix(' ').unwrap_or(value);
        match key {
            "name" => {
                finish(&mut cur, &mut out);
                pending_name = Some(value.to_string());
            }
            "expr" => {
                finish(&mut cur, &mut out);
                let mut e = CorpusEntry::new(value);
                e.name = pending_name.take();
                cur = Some(e);
            }
            "sigma" | "budget" | "word" => {
                let e = cur.as_mut().ok_or_else(|| err("`expr:` must start a stanza"))?;
                match key {
                    "sigma" => e.sigma = Some(value.to_string()),
                    "budget" => e.budget = Some(value.trim().parse().map_err(|_| err("bad budget"))?),
                    _ => {
                        let (w, ex) = value.rsplit_once("expect:").ok_or_else(|| err("expected `expect:`"))?;
                        let expect = match ex.trim() {
                            "match" => Expect::Match,
                            "nomatch" => Expect::NoMatch,
                            "crosscheck" => Expect::CrossCheck,
                            _ => return Err(err("expect must be match, nomatch or crosscheck")),
                        };
                        e.words.push((w.trim().to_string(), expect));
                    }
                }
            }
            _ => return Err(err("unknown key")),
        }
    }
    finish(&mut cur, &mut out);
    Ok(out)
}

pub fn write_corpus(entries: &[CorpusEntry]) -> String {
    let mut out = String::new();
    for (i, e) in entries.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        if let Some(n) = &e.name {
            let _ = writeln!(out, "name: {n}");
        }
        let _ = writeln!(out, "expr: {}", e.expr);
        if let Some(s) = &e.sigma {
            let _ = writeln!(out, "sigma: {s}");
        }
        if let Some(b) = e.budget {
            let _ = writeln!(out, "budget: {b}");
        }
        for (w, ex) in &e.words {
            let _ = writeln!(out, "word: {w} expect: {}", ex.name());
        }
    }
    out
}

/// Verdicts of the three backends on one word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairOutcome {
    pub word: String,
    pub expect: Expect,
    pub reference: Result<bool, String>,
    pub bfs: Result<bool, String>,
    pub interpreter: Result<bool, String>,
}

impl PairOutcome {
    pub fn agree(&self) -> bool {
        let (Ok(r), Ok(b), Ok(i)) = (&self.reference, &self.bfs, &self.interpreter) else {
            return false;
        };
        r == b
            && b == i
            && match self.expect {
                Expect::Match => *r,
                Expect::NoMatch => !*r,
                Expect::CrossCheck => true,
            }
    }
}

impl fmt::Display for PairOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = |r: &Result<bool, String>| match r {
            Ok(true) => "match".to_string(),
            Ok(false) => "nomatch".to_string(),
            Err(e) => format!("error({e})"),
        };
        write!(
            f,
            "{:?} expect={} reference={} bfs={} interpreter={}",
            self.word,
            self.expect.name(),
            v(&self.reference),
            v(&self.bfs),
            v(&self.interpreter)
        )
    }
}

#[derive(Debug, Clone)]
pub struct EntryReport {
    pub label: String,
    /// Set when the entry could not be parsed or compiled.
    pub error: Option<String>,
    pub pairs: Vec<PairOutcome>,
}

impl EntryReport {
    pub fn agreeing(&self) -> usize {
        self.pairs.iter().filter(|p| p.agree()).count()
    }
}

pub fn check_entry(entry: &CorpusEntry) -> EntryReport {
    let mut report = EntryReport {
        label: entry.label().to_string(),
        error: None,
        pairs: Vec::new(),
    };
    let (e, sigma) = match entry.parsed() {
        Ok(x) => x,
        Err(msg) => {
            report.error = Some(msg);
            return report;
        }
    };
    let compiled = match compile(&e, &sigma) {
        Ok(c) => c,
        Err(err) => {
            report.error = Some(err.to_string());
            return report;
        }
    };
    let mut budget = Budget::default();
    if let Some(b) = entry.budget {
        budget.max_pairs = b;
    }
    for (w, expect) in &entry.words {
        let reference = accepts_with(&e, w, budget).map_err(|e| e.to_string());
        let bfs = Run::new(&compiled.set, w)
            .and_then(|run| Bfs::new(ExecOptions::default()).accepts(&run, 0))
            .map_err(|e| e.to_string());
        let interpreter =
            decide_membership(&compiled.set, 0, w, DecideOptions::default()).map_err(|e| e.to_string());
        report.pairs.push(PairOutcome {
            word: w.clone(),
            expect: *expect,
            reference,
            bfs,
            interpreter,
        });
    }
    report
}

/// Checks every entry, using up to `threads` workers; reports keep input
/// order.
pub fn check_corpus(entries: &[CorpusEntry], threads: usize) -> Vec<EntryReport> {
    let slots: Vec<Mutex<Option<EntryReport>>> = entries.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    std::thread::scope(|s| {
        for _ in 0..threads.max(1) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= entries.len() {
                    break;
                }
                let r = check_entry(&entries[i]);
                *slots[i].lock().expect("no poisoning") = Some(r);
            });
        }
    });
    slots
        .into_iter()
        .map(|m| m.into_inner().expect("no poisoning").expect("filled"))
        .collect()
}

pub fn default_threads() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}
