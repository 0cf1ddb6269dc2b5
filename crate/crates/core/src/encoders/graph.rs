use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;

use super::{any, format_err, lit, EncodeError};
use crate::compile::compile_named;
use crate::machine::{Machine, MachineSet, Rule, LEND, REND};
use crate::syntax::{parse, Alphabet, Expr};

pub const EDGE_OPEN: char = '⌜';
pub const EDGE_CLOSE: char = '⌝';
pub const ARROW: char = '→';
pub const SEP: char = '#';

/// Directed graph with a source and a target. Vertex names are nonempty
/// words over a vertex alphabet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Digraph {
    pub edges: Vec<(String, String)>,
    pub s: String,
    pub t: String,
}

impl Digraph {
    pub fn new(s: impl Into<String>, t: impl Into<String>) -> Digraph {
        Digraph {
            edges: Vec::new(),
            s: s.into(),
            t: t.into(),
        }
    }

    pub fn edge(mut self, x: impl Into<String>, y: impl Into<String>) -> Digraph {
        self.edges.push((x.into(), y.into()));
        self
    }

    pub fn vertices(&self) -> BTreeSet<&str> {
        let mut v: BTreeSet<&str> = [self.s.as_str(), self.t.as_str()].into();
        for (x, y) in &self.edges {
            v.insert(x);
            v.insert(y);
        }
        v
    }

    /// Every symbol used in a vertex name.
    pub fn vertex_alphabet(&self) -> Result<Alphabet, EncodeError> {
        Ok(Alphabet::from_set(self.vertices().iter().flat_map(|v| v.chars()))?)
    }

    /// Whether `t` is reachable from `s`, by breadth-first search.
    pub fn reachable(&self) -> bool {
        let mut adj: HashMap<&str, Vec<&str>> = HashMap::new();
        for (x, y) in &self.edges {
            adj.entry(x).or_default().push(y);
        }
        let mut seen: BTreeSet<&str> = [self.s.as_str()].into();
        let mut queue = VecDeque::from([self.s.as_str()]);
        while let Some(x) = queue.pop_front() {
            if x == self.t {
                return true;
            }
            for &y in adj.get(x).into_iter().flatten() {
                if seen.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        false
    }

    /// Whether every edge `a→b` precedes every edge `b→c`.
    pub fn is_topologically_sorted(&self) -> bool {
        self.edges
            .iter()
            .enumerate()
            .all(|(i, (_, b))| self.edges[..i].iter().all(|(x, _)| x != b))
    }

    fn check(&self, reserved: &[char]) -> Result<(), EncodeError> {
        for v in self.vertices() {
            if v.is_empty() {
                return Err(EncodeError::Invalid("empty vertex name".into()));
            }
            if let Some(c) = v.chars().find(|c| reserved.contains(c)) {
                return Err(EncodeError::Reserved(c));
            }
        }
        Ok(())
    }
}

fn with_reserved(v: &Alphabet, reserved: &[char]) -> Result<Alphabet, EncodeError> {
    if let Some(&c) = v.symbols().iter().find(|c| reserved.contains(c)) {
        return Err(EncodeError::Reserved(c));
    }
    Ok(v.extended(reserved.iter().copied()))
}

pub fn tagap_alphabet(v: &Alphabet) -> Result<Alphabet, EncodeError> {
    with_reserved(v, &[SEP, EDGE_OPEN, EDGE_CLOSE, ARROW])
}

pub fn reach_alphabet(v: &Alphabet) -> Result<Alphabet, EncodeError> {
    with_reserved(v, &[SEP, ARROW])
}

/// `s#⌜x₁→y₁⌝…⌜xₙ→yₙ⌝#t`.
pub fn tagap_word(g: &Digraph) -> Result<String, EncodeError> {
    g.check(&[SEP, EDGE_OPEN, EDGE_CLOSE, ARROW])?;
    let mut w = format!("{}{SEP}", g.s);
    for (x, y) in &g.edges {
        let _ = write!(w, "{EDGE_OPEN}{x}{ARROW}{y}{EDGE_CLOSE}");
    }
    let _ = write!(w, "{SEP}{}", g.t);
    Ok(w)
}

/// `s#x₁→y₁#…#xₙ→yₙ#t`, or `s#t` without edges.
pub fn reach_word(g: &Digraph) -> Result<String, EncodeError> {
    g.check(&[SEP, ARROW])?;
    let mut w = format!("{}{SEP}", g.s);
    for (x, y) in &g.edges {
        let _ = write!(w, "{x}{ARROW}{y}{SEP}");
    }
    w.push_str(&g.t);
    Ok(w)
}

/// One-way scan over topologically sorted edges, following `Cur`.
pub fn encode_tagap(v: &Alphabet) -> Result<(Expr, Alphabet), EncodeError> {
    let sigma = tagap_alphabet(v)?;
    let (vs, ss) = (format!("{}*", any(v)), format!("{}*", any(&sigma)));
    let text = format!(
        r"(?<Cur>{vs}){sep}({ss}{o}\k<Cur>{a}(?<Cur>{vs}){c})*{ss}{sep}\k<Cur>",
        sep = lit(SEP),
        o = lit(EDGE_OPEN),
        a = lit(ARROW),
        c = lit(EDGE_CLOSE),
    );
    Ok((parse(&text, &sigma)?, sigma))
}

/// Each star iteration takes one graph step inside a lookahead, so edges
/// may appear in any order. The separator after `s` is asserted rather
/// than consumed, which keeps the first edge visible to the lookahead.
pub fn encode_reach(v: &Alphabet) -> Result<(Expr, Alphabet), EncodeError> {
    let sigma = reach_alphabet(v)?;
    let (vs, ss) = (format!("{}*", any(v)), format!("{}*", any(&sigma)));
    let text = format!(
        r"(?<Cur>{vs})(?={sep})((?={ss}{sep}\k<Cur>{a}(?<Cur>{vs}){sep}))*{ss}{sep}\k<Cur>",
        sep = lit(SEP),
        a = lit(ARROW),
    );
    Ok((parse(&text, &sigma)?, sigma))
}

/// Machine set recognizing the reach words of graphs where `t` is not
/// reachable from `s`: a tape-free format check as a positive oracle,
/// then the compiled reach machine as a negative oracle.
pub fn non_reach_machines(v: &Alphabet) -> Result<MachineSet, EncodeError> {
    let (e, sigma) = encode_reach(v)?;
    let reach = compile_named(&e, &sigma, "reach", 0)?;
    let k = reach.info.k;
    let c = reach.info.c;
    let gamma = reach.set.get(0).gamma.clone();
    let syms = sigma.symbols().to_vec();
    let code = |ch: char| sigma.index_of(ch).expect("in alphabet") as u8 + 2;

    // V* # (V* → V* #)* V*
    let mut fmt = Machine::new("format", k, c, syms.clone(), gamma.clone());
    let [init, a, b, cc, acc] = ["init", "s", "vertex", "head", "acc"].map(|n| fmt.add_state(n));
    fmt.init = init;
    fmt.accept.insert(acc);
    let input = |m: &mut Machine, from, read, mv, to| m.rules.push(Rule::Input { from, read, mv, to });
    input(&mut fmt, init, LEND, 1, a);
    for &x in v.symbols() {
        for q in [a, b, cc] {
            input(&mut fmt, q, code(x), 1, q);
        }
    }
    input(&mut fmt, a, code(SEP), 1, b);
    input(&mut fmt, b, code(ARROW), 1, cc);
    input(&mut fmt, cc, code(SEP), 1, b);
    input(&mut fmt, b, REND, 0, acc);

    let mut top = Machine::new("non_reach", k, c, syms, gamma);
    let [q_init, q0, q1, q_acc] = ["init", "q0", "q1", "acc"].map(|n| top.add_state(n));
    top.init = q_init;
    top.accept.insert(q_acc);
    input(&mut top, q_init, LEND, 0, q0);
    top.rules.push(Rule::OracleIn {
        from: q0,
        oracle: "format".into(),
        to: q1,
    });
    top.rules.push(Rule::OracleNotIn {
        from: q1,
        oracle: "reach".into(),
        to: q_acc,
    });
    let mut machines = vec![top, fmt];
    machines.extend(reach.set.into_machines());
    Ok(MachineSet::new(machines)?)
}

/// Lines `s <v>`, `t <v>` and `edge <u> <v>`; `#` starts a comment line.
pub fn read_graph(text: &str) -> Result<Digraph, EncodeError> {
    let (mut s, mut t) = (None, None);
    let mut edges = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks.as_slice() {
            ["s", v] => s = Some(v.to_string()),
            ["t", v] => t = Some(v.to_string()),
            ["edge", x, y] => edges.push((x.to_string(), y.to_string())),
            _ => return Err(format_err(i + 1, format!("unrecognized line {line:?}"))),
        }
    }
    Ok(Digraph {
        edges,
        s: s.ok_or_else(|| format_err(0, "missing `s` line"))?,
        t: t.ok_or_else(|| format_err(0, "missing `t` line"))?,
    })
}

pub fn write_graph(g: &Digraph) -> String {
    let mut out = format!("s {}\nt {}\n", g.s, g.t);
    for (x, y) in &g.edges {
        let _ = writeln!(out, "edge {x} {y}");
    }
    out
}
