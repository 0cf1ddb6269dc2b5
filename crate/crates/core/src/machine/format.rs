//! Line-oriented machine file format.
//!
//! ```text
//! # source: (?=a)b
//! machine main
//! k 1
//! c 1
//! sigma a b
//! gamma 0 1
//! blank 0
//! states q0 q1
//! init q0
//! accept q1
//! trans q0 read LEND move +1 q1
//! trans q0 tape 1 read 0 write 1 move 0 q1
//! trans q0 oracle-in other q1
//! ```
//!
//! `# key: value` lines directly above a `machine` line are kept as
//! metadata of that machine. Other comments and blank lines are ignored.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use super::{Machine, Move, Rule, LEND, REND};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {msg}")]
pub struct FormatError {
    pub line: usize,
    pub msg: String,
}

pub fn write_machines(machines: &[Machine]) -> String {
    let mut out = String::new();
    for (i, m) in machines.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        for (k, v) in &m.meta {
            let _ = writeln!(out, "# {k}: {v}");
        }
        let _ = writeln!(out, "machine {}", m.name);
        let _ = writeln!(out, "k {}", m.k);
        let _ = writeln!(out, "c {}", m.c);
        let _ = writeln!(out, "sigma{}", symbols(&m.sigma));
        let _ = writeln!(out, "gamma{}", symbols(&m.gamma));
        let _ = writeln!(out, "blank {}", m.gamma.get(m.blank).copied().unwrap_or('?'));
        let _ = writeln!(out, "states {}", m.states.join(" "));
        let _ = writeln!(out, "init {}", m.states[m.init]);
        let acc: Vec<&str> = m.accept.iter().map(|&q| m.states[q].as_str()).collect();
        let _ = writeln!(out, "accept{}", acc.iter().map(|s| format!(" {s}")).collect::<String>());
        for r in &m.rules {
            let st = |q: usize| m.states[q].as_str();
            match r {
                Rule::Input { from, read, mv, to } => {
                    let _ = writeln!(
                        out,
                        "trans {} read {} move {} {}",
                        st(*from),
                        sym(*read, &m.sigma),
                        mv_str(*mv),
                        st(*to)
                    );
                }
                Rule::Tape {
                    from,
                    tape,
                    read,
                    write,
                    mv,
                    to,
                } => {
                    let _ = writeln!(
                        out,
                        "trans {} tape {} read {} write {} move {} {}",
                        st(*from),
                        tape + 1,
                        sym(*read, &m.gamma),
                        sym(*write, &m.gamma),
                        mv_str(*mv),
                        st(*to)
                    );
                }
                Rule::OracleIn { from, oracle, to } => {
                    let _ = writeln!(out, "trans {} oracle-in {} {}", st(*from), oracle, st(*to));
                }
                Rule::OracleNotIn { from, oracle, to } => {
                    let _ = writeln!(out, "trans {} oracle-notin {} {}", st(*from), oracle, st(*to));
                }
            }
        }
    }
    out
}

fn symbols(s: &[char]) -> String {
    s.iter().map(|c| format!(" {c}")).collect()
}

fn sym(code: u8, alphabet: &[char]) -> String {
    match code {
        LEND => "LEND".into(),
        REND => "REND".into(),
        c => alphabet.get(c as usize - 2).map(|c| c.to_string()).unwrap_or_else(|| "?".into()),
    }
}

fn mv_str(mv: Move) -> &'static str {
    match mv {
        -1 => "-1",
        0 => "0",
        _ => "+1",
    }
}

/// Parses every machine block of `text`, in file order. Structural
/// validity across machines is checked by `MachineSet::new`.
pub fn read_machines(text: &str) -> Result<Vec<Machine>, FormatError> {
    let mut out: Vec<Block> = Vec::new();
    let mut pending_meta = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line_no = ln + 1;
        let err = |msg: String| FormatError { line: line_no, msg };
        let line = raw.trim();
        if line.is_empty() {
            pending_meta.clear();
            continue;
        }
        if let Some(c) = line.strip_prefix('#') {
            if let Some((k, v)) = c.trim_start().split_once(": ") {
                if !k.is_empty() && !k.contains(char::is_whitespace) {
                    pending_meta.push((k.to_string(), v.to_string()));
                }
            }
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        let (key, args) = (toks[0], &toks[1..]);
        if key == "machine" {
            let [name] = args else {
                return Err(err("expected `machine <name>`".into()));
            };
            let mut m = Machine::new(*name, 0, 1, Vec::new(), Vec::new());
            m.meta = std::mem::take(&mut pending_meta);
            out.push(Block {
                m,
                init: None,
                blank: None,
                accept: Vec::new(),
                trans: Vec::new(),
                seen: BTreeSet::new(),
            });
            continue;
        }
        pending_meta.clear();
        let b = out.last_mut().ok_or_else(|| err("expected `machine <name>` first".into()))?;
        if key != "trans" && !b.seen.insert(key.to_string()) {
            return Err(err(format!("duplicate `{key}` line")));
        }
        match key {
            "k" => b.m.k = one_int(args).map_err(err)?,
            "c" => b.m.c = one_int(args).map_err(err)?,
            "sigma" => b.m.sigma = chars(args).map_err(err)?,
            "gamma" => b.m.gamma = chars(args).map_err(err)?,
            "blank" => {
                let [s] = args else {
                    return Err(err("expected one blank symbol".into()));
                };
                b.blank = Some(single_char(s).map_err(err)?);
            }
            "states" => b.m.states = args.iter().map(|s| s.to_string()).collect(),
            "init" => {
                let [s] = args else {
                    return Err(err("expected one initial state".into()));
                };
                b.init = Some((s.to_string(), line_no));
            }
            "accept" => b.accept = args.iter().map(|s| (s.to_string(), line_no)).collect(),
            "trans" => b.trans.push((args.iter().map(|s| s.to_string()).collect(), line_no)),
            other => return Err(err(format!("unknown keyword `{other}`"))),
        }
    }
    out.into_iter().map(Block::finish).collect()
}

struct Block {
    m: Machine,
    init: Option<(String, usize)>,
    blank: Option<char>,
    accept: Vec<(String, usize)>,
    trans: Vec<(Vec<String>, usize)>,
    seen: BTreeSet<String>,
}

impl Block {
    fn finish(self) -> Result<Machine, FormatError> {
        let mut m = self.m;
        let state = |m: &Machine, s: &str, line: usize| {
            m.state_index(s).ok_or_else(|| FormatError {
                line,
                msg: format!("unknown state {s:?}"),
            })
        };
        let (init, line) = self.init.ok_or_else(|| FormatError {
            line: 0,
            msg: format!("machine {}: missing `init`", m.name),
        })?;
        m.init = state(&m, &init, line)?;
        let blank = self.blank.ok_or_else(|| FormatError {
            line: 0,
            msg: format!("machine {}: missing `blank`", m.name),
        })?;
        m.blank = m.gamma.iter().position(|&g| g == blank).ok_or_else(|| FormatError {
            line: 0,
            msg: format!("machine {}: blank not in gamma", m.name),
        })?;
        for (s, line) in &self.accept {
            let q = state(&m, s, *line)?;
            m.accept.insert(q);
        }
        for (toks, line) in &self.trans {
            let err = |msg: &str| FormatError {
                line: *line,
                msg: msg.to_string(),
            };
            let t: Vec<&str> = toks.iter().map(String::as_str).collect();
            let rule = match t.as_slice() {
                [p, "read", tau, "move", mv, q] => Rule::Input {
                    from: state(&m, p, *line)?,
                    read: code(tau, &m.sigma).ok_or_else(|| err("unknown input symbol"))?,
                    mv: parse_move(mv).ok_or_else(|| err("bad move"))?,
                    to: state(&m, q, *line)?,
                },
                [p, "tape", x, "read", r, "write", w, "move", mv, q] => {
                    let x: usize = x.parse().map_err(|_| err("bad tape index"))?;
                    if x == 0 {
                        return Err(err("tape indices start at 1"));
                    }
                    Rule::Tape {
                        from: state(&m, p, *line)?,
                        tape: x - 1,
                        read: code(r, &m.gamma).ok_or_else(|| err("unknown tape symbol"))?,
                        write: code(w, &m.gamma).ok_or_else(|| err("unknown tape symbol"))?,
                        mv: parse_move(mv).ok_or_else(|| err("bad move"))?,
                        to: state(&m, q, *line)?,
                    }
                }
                [p, "oracle-in", n, q] => Rule::OracleIn {
                    from: state(&m, p, *line)?,
                    oracle: n.to_string(),
                    to: state(&m, q, *line)?,
                },
                [p, "oracle-notin", n, q] => Rule::OracleNotIn {
                    from: state(&m, p, *line)?,
                    oracle: n.to_string(),
                    to: state(&m, q, *line)?,
                },
                _ => return Err(err("malformed `trans` line")),
            };
            m.rules.push(rule);
        }
        Ok(m)
    }
}

fn one_int(args: &[&str]) -> Result<usize, String> {
    match args {
        [s] => s.parse().map_err(|_| format!("expected an integer, got {s:?}")),
        _ => Err("expected one integer".into()),
    }
}

fn single_char(s: &str) -> Result<char, String> {
    let mut it = s.chars();
    match (it.next(), it.next()) {
        (Some(c), None) => Ok(c),
        _ => Err(format!("expected a single symbol, got {s:?}")),
    }
}

fn chars(args: &[&str]) -> Result<Vec<char>, String> {
    args.iter().map(|s| single_char(s)).collect()
}

fn code(tok: &str, alphabet: &[char]) -> Option<u8> {
    match tok {
        "LEND" => Some(LEND),
        "REND" => Some(REND),
        s => {
            let c = single_char(s).ok()?;
            alphabet.iter().position(|&a| a == c).map(|i| i as u8 + 2)
        }
    }
}

fn parse_move(s: &str) -> Option<Move> {
    match s {
        "-1" => Some(-1),
        "0" => Some(0),
        "+1" | "1" => Some(1),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
# source: (?=a)b
machine main
k 1
c 1
sigma a b
gamma 0 1
blank 0
states q0 q1 q2
init q0
accept q2
trans q0 read LEND move +1 q1
trans q1 tape 1 read LEND write LEND move +1 q1
trans q1 tape 1 read 0 write 1 move -1 q1
trans q1 oracle-in sub q2

machine sub
k 1
c 1
sigma a b
gamma 0 1
blank 0
states s
init s
accept s
trans s oracle-notin sub2 s
";

    #[test]
    fn reads_and_writes() {
        let ms = read_machines(SAMPLE).unwrap();
        assert_eq!(ms.len(), 2);
        assert_eq!(ms[0].meta_value("source"), Some("(?=a)b"));
        assert_eq!(ms[0].rules.len(), 4);
        let text = write_machines(&ms);
        assert_eq!(text, SAMPLE);
        assert_eq!(read_machines(&text).unwrap(), ms);
    }

    #[test]
    fn reports_errors() {
        assert!(read_machines("k 1").is_err());
        let bad = SAMPLE.replace("read 0 write 1", "read 7 write 1");
        assert_eq!(read_machines(&bad).unwrap_err().line, 13);
        let bad = SAMPLE.replace("init q0", "init zz");
        assert!(read_machines(&bad).is_err());
    }
}
