use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write as _;

use super::{any, any_n, format_err, lit, EncodeError};
use crate::machine::{Move, LEND, REND};
use crate::syntax::{parse, Alphabet, Expr};

/// `p →(τ₁..τ_K)/(θ₁..θ_K) q`. Symbols use the machine codes: `LEND`,
/// `REND`, and `2 + i` for the i-th input symbol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwRule {
    pub from: usize,
    pub read: Vec<u8>,
    pub mv: Vec<Move>,
    pub to: usize,
}

/// Two-way automaton with `heads ≥ 1` input heads and one accepting state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoWayAutomaton {
    pub name: String,
    pub heads: usize,
    pub sigma: Vec<char>,
    pub states: Vec<String>,
    pub init: usize,
    pub accept: usize,
    pub rules: Vec<TwRule>,
}

impl TwoWayAutomaton {
    pub fn validate(&self) -> Result<(), EncodeError> {
        let bad = |m: String| Err(EncodeError::Invalid(m));
        if self.heads == 0 {
            return bad("at least one head is required".into());
        }
        let n = self.states.len();
        if self.init >= n || self.accept >= n {
            return bad("initial or accepting state out of range".into());
        }
        for r in &self.rules {
            if r.from >= n || r.to >= n {
                return bad("rule state out of range".into());
            }
            if r.read.len() != self.heads || r.mv.len() != self.heads {
                return bad(format!("rule arity differs from {} heads", self.heads));
            }
            if r.read.iter().any(|&c| c as usize >= self.sigma.len() + 2) {
                return bad("rule reads an unknown symbol".into());
            }
            if r.mv.iter().any(|m| !(-1..=1).contains(m)) {
                return bad("moves must be -1, 0 or +1".into());
            }
        }
        Ok(())
    }

    pub fn alphabet(&self) -> Result<Alphabet, EncodeError> {
        Ok(Alphabet::new(self.sigma.iter().copied())?)
    }
}

/// Breadth-first search over `(q, i₁..i_K)`; accepts as soon as the
/// accepting state is entered.
pub fn simulate_two_way_automaton(m: &TwoWayAutomaton, w: &str) -> Result<bool, EncodeError> {
    m.validate()?;
    let mut tape = vec![LEND];
    for c in w.chars() {
        let i = m.sigma.iter().position(|&s| s == c).ok_or_else(|| EncodeError::Invalid(format!("symbol {c:?} not in alphabet")))?;
        tape.push(i as u8 + 2);
    }
    tape.push(REND);
    let start = (m.init, vec![0usize; m.heads]);
    let mut seen = BTreeSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    while let Some((q, pos)) = queue.pop_front() {
        if q == m.accept {
            return Ok(true);
        }
        for r in m.rules.iter().filter(|r| r.from == q) {
            if !pos.iter().zip(&r.read).all(|(&i, &t)| tape[i] == t) {
                continue;
            }
            let next: Option<Vec<usize>> = pos
                .iter()
                .zip(&r.mv)
                .map(|(&i, &d)| {
                    let j = i as isize + d as isize;
                    (0..tape.len() as isize).contains(&j).then_some(j as usize)
                })
                .collect();
            if let Some(next) = next {
                if seen.insert((r.to, next.clone())) {
                    queue.push_back((r.to, next));
                }
            }
        }
    }
    Ok(false)
}

/// Expression over the automaton's alphabet with the same language.
///
/// Head `j` is tracked by `Lj Cj Rj` with `w = Lj Cj Rj`, where `Cj` is
/// the scanned symbol or ε on an endmarker; the state index is `|S|`, with
/// the initial state numbered 0. The simulation needs `|w| ≥ |Q| − 1`,
/// so it is guarded by that length and shorter members are listed
/// literally.
pub fn encode_two_way_automaton(m: &TwoWayAutomaton) -> Result<Expr, EncodeError> {
    m.validate()?;
    let sigma = m.alphabet()?;
    for &c in &m.sigma {
        if matches!(c, '?' | '<' | '>' | '=' | '!') {
            return Err(EncodeError::Reserved(c));
        }
    }
    let n = m.states.len();
    // initial state first
    let idx = |q: usize| {
        if q == m.init {
            0
        } else if q < m.init {
            q + 1
        } else {
            q
        }
    };
    let s_any = any(&sigma);
    let s_star = format!("{s_any}*");
    let l = |j: usize| format!("L{j}");
    let c = |j: usize| format!("C{j}");
    let r = |j: usize| format!("R{j}");
    let bk = |x: String| format!(r"\k<{x}>");

    let state_is = |i: usize| format!("(?={s_star}(?={}$)(?={}$))", bk("S".into()), any_n(&sigma, i));
    let goto = |i: usize, j: usize| format!("{}(?={s_star}(?<S>{})$)", state_is(i), any_n(&sigma, j));
    let reads = |j: usize, tau: u8| match tau {
        LEND => format!("(?={}$)", bk(r(j))),
        REND => format!("(?={}$)", bk(l(j))),
        code => format!(
            "(?!{L}$)(?!{R}$)(?={L}{sym}{R}$)",
            L = bk(l(j)),
            R = bk(r(j)),
            sym = lit(m.sigma[code as usize - 2])
        ),
    };
    let right = |j: usize| {
        format!(
            "(?!{L}$)(?=(?<{l}>{L}{C})(?<{c}>{s_any})(?<{r}>{s_star})$|(?<{l}>{L}{C})(?<{c}>)(?<{r}>)$)",
            L = bk(l(j)),
            C = bk(c(j)),
            l = l(j),
            c = c(j),
            r = r(j),
        )
    };
    // R is rebuilt before C changes, so the backreference sees the old C.
    let left = |j: usize| {
        format!(
            "(?!{R}$)((?={s_star}{s_any}(?<{r}>{C}{R})$)(?=(?<{l}>{s_star})(?<{c}>{s_any}){R}$)|(?=(?<{r}>{C}{R})$)(?<{l}>)(?<{c}>))",
            R = bk(r(j)),
            C = bk(c(j)),
            l = l(j),
            c = c(j),
            r = r(j),
        )
    };

    let mut init = String::new();
    for j in 1..=m.heads {
        let _ = write!(init, "(?<{}>)(?<{}>)(?=(?<{}>{s_star})$)", l(j), c(j), r(j));
    }
    init.push_str("(?<S>)");
    let rules: Vec<String> = m
        .rules
        .iter()
        .map(|rule| {
            let mut e = goto(idx(rule.from), idx(rule.to));
            for (j, &tau) in rule.read.iter().enumerate() {
                e.push_str(&reads(j + 1, tau));
            }
            for (j, &d) in rule.mv.iter().enumerate() {
                match d {
                    1 => e.push_str(&right(j + 1)),
                    -1 => e.push_str(&left(j + 1)),
                    _ => {}
                }
            }
            e
        })
        .collect();
    let steps = if rules.is_empty() {
        String::new()
    } else {
        format!("({})*", rules.join("|"))
    };
    let guard = if n > 1 { format!("(?={})", any_n(&sigma, n - 1)) } else { String::new() };
    let main = format!(
        "{guard}(?={init}{}{steps}{}){s_star}",
        state_is(0),
        state_is(idx(m.accept))
    );

    let mut short = Vec::new();
    for len in 0..n.saturating_sub(1) {
        for w in sigma.words_of_len(len) {
            if simulate_two_way_automaton(m, &w)? {
                short.push(w.chars().map(lit).collect::<String>());
            }
        }
    }
    let finite = if short.is_empty() {
        let a = lit(m.sigma[0]);
        format!("(?={a})(?!{a})")
    } else {
        short.join("|")
    };
    Ok(parse(&format!("{finite}|{main}"), &sigma)?)
}

fn sym_token(code: u8, sigma: &[char]) -> String {
    match code {
        LEND => "LEND".into(),
        REND => "REND".into(),
        c => sigma[c as usize - 2].to_string(),
    }
}

/// Same layout as the machine file format, without tapes:
///
/// ```text
/// automaton first_eq_last
/// heads 1
/// sigma a b
/// states q0 q1 acc
/// init q0
/// accept acc
/// trans q0 read LEND move +1 q1
/// ```
///
/// With several heads, `read` and `move` take one token per head.
pub fn write_automaton(m: &TwoWayAutomaton) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "automaton {}", m.name);
    let _ = writeln!(out, "heads {}", m.heads);
    let _ = writeln!(out, "sigma {}", m.sigma.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" "));
    let _ = writeln!(out, "states {}", m.states.join(" "));
    let _ = writeln!(out, "init {}", m.states[m.init]);
    let _ = writeln!(out, "accept {}", m.states[m.accept]);
    for r in &m.rules {
        let reads: Vec<String> = r.read.iter().map(|&t| sym_token(t, &m.sigma)).collect();
        let moves: Vec<&str> = r
            .mv
            .iter()
            .map(|&d| match d {
                -1 => "-1",
                0 => "0",
                _ => "+1",
            })
            .collect();
        let _ = writeln!(
            out,
            "trans {} read {} move {} {}",
            m.states[r.from],
            reads.join(" "),
            moves.join(" "),
            m.states[r.to]
        );
    }
    out
}

pub fn read_automaton(text: &str) -> Result<TwoWayAutomaton, EncodeError> {
    let mut m = TwoWayAutomaton {
        name: String::new(),
        heads: 1,
        sigma: Vec::new(),
        states: Vec::new(),
        init: 0,
        accept: 0,
        rules: Vec::new(),
    };
    let (mut init, mut accept) = (None, None);
    let mut trans = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks.as_slice() {
            ["automaton", name] => m.name = name.to_string(),
            ["heads", k] => m.heads = k.parse().map_err(|_| format_err(line_no, "bad head count"))?,
            ["sigma", syms @ ..] => {
                m.sigma = syms
                    .iter()
                    .map(|s| {
                        let mut it = s.chars();
                        match (it.next(), it.next()) {
                            (Some(c), None) => Ok(c),
                            _ => Err(format_err(line_no, format!("expected a single symbol, got {s:?}"))),
                        }
                    })
                    .collect::<Result<_, _>>()?
            }
            ["states", names @ ..] => m.states = names.iter().map(|s| s.to_string()).collect(),
            ["init", q] => init = Some((q.to_string(), line_no)),
            ["accept", q] => accept = Some((q.to_string(), line_no)),
            ["trans", rest @ ..] => trans.push((rest.iter().map(|s| s.to_string()).collect::<Vec<_>>(), line_no)),
            _ => return Err(format_err(line_no, format!("unrecognized line {line:?}"))),
        }
    }
    let state = |m: &TwoWayAutomaton, q: &str, line: usize| {
        m.states
            .iter()
            .position(|s| s == q)
            .ok_or_else(|| format_err(line, format!("unknown state {q:?}")))
    };
    let (q, line) = init.ok_or_else(|| format_err(0, "missing `init`"))?;
    m.init = state(&m, &q, line)?;
    let (q, line) = accept.ok_or_else(|| format_err(0, "missing `accept`"))?;
    m.accept = state(&m, &q, line)?;
    let k = m.heads;
    for (t, line) in trans {
        if t.len() != 2 * k + 4 || t[1] != "read" || t[k + 2] != "move" {
            return Err(format_err(line, "expected `trans p read τ.. move θ.. q`"));
        }
        let read = t[2..k + 2]
            .iter()
            .map(|s| match s.as_str() {
                "LEND" => Ok(LEND),
                "REND" => Ok(REND),
                s => m
                    .sigma
                    .iter()
                    .position(|c| s.chars().eq(std::iter::once(*c)))
                    .map(|i| i as u8 + 2)
                    .ok_or_else(|| format_err(line, format!("unknown symbol {s:?}"))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        let mv = t[k + 3..2 * k + 3]
            .iter()
            .map(|s| match s.as_str() {
                "-1" => Ok(-1),
                "0" => Ok(0),
                "+1" | "1" => Ok(1),
                _ => Err(format_err(line, format!("bad move {s:?}"))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        let rule = TwRule {
            from: state(&m, &t[0], line)?,
            read,
            mv,
            to: state(&m, &t[2 * k + 3], line)?,
        };
        m.rules.push(rule);
    }
    m.validate()?;
    Ok(m)
}

/// The three reference automata over `{a, b}`: `a*`, first symbol equals
/// last symbol, and the two-head `aⁿbⁿ`.
pub fn reference_automata() -> Vec<TwoWayAutomaton> {
    const A_STAR: &str = "\
automaton a_star
heads 1
sigma a b
states q0 acc
init q0
accept acc
trans q0 read LEND move +1 q0
trans q0 read a move +1 q0
trans q0 read REND move 0 acc
";
    const FIRST_LAST: &str = "\
automaton first_eq_last
heads 1
sigma a b
states q0 q1 ra rb la lb acc
init q0
accept acc
trans q0 read LEND move +1 q1
trans q1 read a move +1 ra
trans q1 read b move +1 rb
trans ra read a move +1 ra
trans ra read b move +1 ra
trans ra read REND move -1 la
trans rb read a move +1 rb
trans rb read b move +1 rb
trans rb read REND move -1 lb
trans la read a move 0 acc
trans lb read b move 0 acc
";
    const AN_BN: &str = "\
automaton an_bn
heads 2
sigma a b
states q0 skip pair acc
init q0
accept acc
trans q0 read LEND LEND move +1 +1 skip
trans skip read a a move 0 +1 skip
trans skip read a b move 0 0 pair
trans skip read REND REND move 0 0 acc
trans pair read a b move +1 +1 pair
trans pair read b REND move 0 0 acc
";
    [A_STAR, FIRST_LAST, AN_BN]
        .iter()
        .map(|t| read_automaton(t).expect("fixed automaton"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::accepts;

    fn oracle(name: &str, w: &str) -> bool {
        match name {
            "a_star" => w.chars().all(|c| c == 'a'),
            "first_eq_last" => !w.is_empty() && w.chars().next() == w.chars().last(),
            "an_bn" => {
                let n = w.len() / 2;
                w.len().is_multiple_of(2) && w[..n].chars().all(|c| c == 'a') && w[n..].chars().all(|c| c == 'b')
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn simulator_matches_languages() {
        let sigma = Alphabet::new(['a', 'b']).unwrap();
        for m in reference_automata() {
            for w in sigma.words_up_to(6) {
                assert_eq!(simulate_two_way_automaton(&m, &w).unwrap(), oracle(&m.name, &w), "{} {w}", m.name);
            }
        }
    }

    #[test]
    fn trivial_automata() {
        let mut m = reference_automata().remove(0);
        m.rules.clear();
        assert!(!simulate_two_way_automaton(&m, "a").unwrap());
        m.accept = m.init;
        assert!(simulate_two_way_automaton(&m, "ab").unwrap());
    }

    #[test]
    fn encoder_agrees_on_short_words() {
        let sigma = Alphabet::new(['a', 'b']).unwrap();
        for m in reference_automata() {
            let e = encode_two_way_automaton(&m).unwrap();
            for w in sigma.words_up_to(4) {
                assert_eq!(accepts(&e, &w).unwrap(), oracle(&m.name, &w), "{} {w}", m.name);
            }
        }
    }

    #[test]
    fn format_roundtrip() {
        for m in reference_automata() {
            assert_eq!(read_automaton(&write_automaton(&m)).unwrap(), m);
        }
        assert!(read_automaton("automaton x\nstates q\ninit q\naccept q\ntrans q read a move 0 q").is_err());
    }
}
