//! Command-line front end. `run_cli` returns the exit code and the text
//! for standard output; errors are rendered into the same text.
//!
//! Exit codes: 0 match / success, 1 no match / disagreement, 2 usage or
//! input error, 3 budget exhausted.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};

use crate::compile::compile;
use crate::corpus::{check_corpus, default_threads, parse_corpus};
use crate::decision::{complement_accepts, decide_membership, DecideError, DecideOptions};
use crate::encoders::{
    encode_power_language, encode_qbf, encode_reach, encode_tagap, encode_two_way_automaton, prime_expr, read_automaton,
    read_graph, read_qbf, reach_word, tagap_word, EncodeError, PowerKind,
};
use crate::machine::{read_machines, write_machines, Bfs, ExecError, ExecOptions, MachineSet, Run};
use crate::semantics::{accepts_with, enumerate_members, Budget, EvalError};
use crate::syntax::{infer_alphabet, parse, render, Alphabet, Expr};

pub const EXIT_NO: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "rewbl", about = "Regular expressions with backreferences and lookaheads")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(clap::Args, Debug)]
struct ExprArgs {
    /// Expression text.
    #[arg(short = 'e', long = "expr", allow_hyphen_values = true)]
    expr: String,
    /// Alphabet symbols; defaults to the symbols of the expression and word.
    #[arg(long)]
    sigma: Option<String>,
}

#[derive(clap::Args, Debug)]
struct BudgetArgs {
    /// Cap on (position, assignment) pairs in one star closure.
    #[arg(long)]
    max_pairs: Option<usize>,
    /// Wall-clock limit in milliseconds.
    #[arg(long)]
    timeout_ms: Option<u64>,
}

impl BudgetArgs {
    fn budget(&self) -> Budget {
        let mut b = Budget::default();
        if let Some(p) = self.max_pairs {
            b.max_pairs = p;
        }
        b.time_limit = self.timeout_ms.map(Duration::from_millis);
        b
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Engine {
    Bfs,
    Interpreter,
    Complement,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum EncodeKind {
    Tagap,
    Reach,
    Qbf,
    Automaton,
    Power,
    Prime,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Match a word with the reference evaluator.
    Match {
        #[command(flatten)]
        expr: ExprArgs,
        #[arg(short = 'i', long = "input", allow_hyphen_values = true)]
        input: String,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Compile an expression to a machine file.
    Compile {
        #[command(flatten)]
        expr: ExprArgs,
        /// Output file; standard output when omitted.
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
    /// Decide a word on a machine file.
    Decide {
        #[arg(long)]
        machine: PathBuf,
        /// Entry machine; defaults to the first block.
        #[arg(long)]
        entry: Option<String>,
        #[arg(short = 'i', long = "input", allow_hyphen_values = true)]
        input: String,
        #[arg(long, value_enum, default_value = "bfs")]
        engine: Engine,
        /// Cap on configurations visited by one search.
        #[arg(long)]
        max_configs: Option<usize>,
    },
    /// Print the expression for an encoded problem instance.
    ///
    /// `tagap` and `reach` read a graph file, `qbf` a QBF file and
    /// `automaton` an automaton file. For `power` the argument names the
    /// language (1exp, 2exp, 2exp-neg, halving; default 1exp).
    Encode {
        #[arg(value_enum)]
        kind: EncodeKind,
        instance: Option<String>,
    },
    /// List members up to a length.
    Enumerate {
        #[command(flatten)]
        expr: ExprArgs,
        #[arg(long)]
        max_len: usize,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Differential check of a corpus file.
    Corpus {
        file: PathBuf,
        #[arg(long)]
        threads: Option<usize>,
        /// Print every pair, not only disagreements.
        #[arg(short, long)]
        verbose: bool,
    },
}

enum Failure {
    Usage(String),
    Budget(String),
}

impl From<EvalError> for Failure {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::Budget(m) => Failure::Budget(m),
        }
    }
}

impl From<ExecError> for Failure {
    fn from(e: ExecError) -> Self {
        match e {
            ExecError::Budget(m) => Failure::Budget(m),
            other => Failure::Usage(other.to_string()),
        }
    }
}

impl From<DecideError> for Failure {
    fn from(e: DecideError) -> Self {
        match e {
            DecideError::Budget(m) | DecideError::Exec(ExecError::Budget(m)) => Failure::Budget(m),
            other => Failure::Usage(other.to_string()),
        }
    }
}

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

pub fn run_cli<I, T>(argv: I) -> (i32, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            return (code, e.render().to_string());
        }
    };
    let mut out = String::new();
    match run(cli.cmd, &mut out) {
        Ok(code) => (code, out),
        Err(Failure::Usage(m)) => (EXIT_USAGE, format!("{out}error: {m}\n")),
        Err(Failure::Budget(m)) => (EXIT_BUDGET, format!("{out}budget exhausted: {m}\n")),
    }
}

fn parse_expr(args: &ExprArgs, word: &str) -> Result<(Expr, Alphabet), Failure> {
    let sigma = match &args.sigma {
        Some(s) => Alphabet::from_set(s.chars()).map_err(usage)?,
        None => infer_alphabet(&args.expr, word).map_err(usage)?,
    };
    let e = parse(&args.expr, &sigma).map_err(usage)?;
    Ok((e, sigma))
}

fn read_file(path: &std::path::Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn verdict(b: bool) -> &'static str {
    if b {
        "MATCH"
    } else {
        "NO-MATCH"
    }
}

fn code_of(b: bool) -> i32 {
    if b {
        0
    } else {
        EXIT_NO
    }
}

fn run(cmd: Cmd, out: &mut String) -> Result<i32, Failure> {
    match cmd {
        Cmd::Match { expr, input, budget } => {
            let (e, _) = parse_expr(&expr, &input)?;
            let b = accepts_with(&e, &input, budget.budget())?;
            let _ = writeln!(out, "{}", verdict(b));
            Ok(code_of(b))
        }
        Cmd::Compile { expr, output } => {
            let (e, sigma) = parse_expr(&expr, "")?;
            let c = compile(&e, &sigma).map_err(usage)?;
            let text = write_machines(c.set.machines());
            match output {
                Some(path) => {
                    std::fs::write(&path, text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
                    let i = &c.info;
                    let _ = writeln!(
                        out,
                        "machines={} states={} k={} c={} depth={}",
                        c.set.machines().len(),
                        c.set.total_states(),
                        i.k,
                        i.c,
                        i.depth
                    );
                }
                None => out.push_str(&text),
            }
            Ok(0)
        }
        Cmd::Decide {
            machine,
            entry,
            input,
            engine,
            max_configs,
        } => {
            let machines = read_machines(&read_file(&machine)?).map_err(usage)?;
            let set = MachineSet::new(machines).map_err(usage)?;
            let m = match entry {
                Some(name) => set.id(&name).map_err(usage)?,
                None => set.entry(),
            };
            let mut exec = ExecOptions::default();
            let mut dec = DecideOptions::default();
            if let Some(n) = max_configs {
                exec.max_configs = n;
                dec.max_configs = n;
            }
            let b = match engine {
                Engine::Bfs => {
                    let run = Run::new(&set, &input)?;
                    Bfs::new(exec).accepts(&run, m)?
                }
                Engine::Interpreter => decide_membership(&set, m, &input, dec)?,
                Engine::Complement => !complement_accepts(&set, m, &input, dec)?,
            };
            let _ = writeln!(out, "{}", verdict(b));
            Ok(code_of(b))
        }
        Cmd::Encode { kind, instance } => encode(kind, instance, out),
        Cmd::Enumerate { expr, max_len, budget } => {
            let (e, sigma) = parse_expr(&expr, "")?;
            let members = enumerate_members(&e, &sigma, max_len, budget.budget())?;
            for w in &members {
                let _ = writeln!(out, "{}", if w.is_empty() { "ε" } else { w });
            }
            let _ = writeln!(out, "members: {}", members.len());
            Ok(0)
        }
        Cmd::Corpus { file, threads, verbose } => {
            let entries = parse_corpus(&read_file(&file)?).map_err(usage)?;
            let reports = check_corpus(&entries, threads.unwrap_or_else(default_threads));
            let (mut agree, mut total) = (0, 0);
            for (entry, r) in entries.iter().zip(&reports) {
                let n = entry.words.len();
                let ok = if r.error.is_some() { 0 } else { r.agreeing() };
                agree += ok;
                total += n;
                let _ = writeln!(out, "{:<24} {ok:>4}/{n:<4} {}", r.label, if ok == n { "ok" } else { "FAIL" });
                if let Some(err) = &r.error {
                    let _ = writeln!(out, "  error: {err}");
                }
                for p in &r.pairs {
                    if verbose || !p.agree() {
                        let _ = writeln!(out, "  {p}");
                    }
                }
            }
            let _ = writeln!(out, "agree: {agree}/{total}");
            Ok(if agree == total { 0 } else { EXIT_NO })
        }
    }
}

fn stanza(out: &mut String, e: &Expr, sigma: &Alphabet) {
    let _ = writeln!(out, "expr: {}", render(e));
    let _ = writeln!(out, "sigma: {}", sigma.symbols().iter().collect::<String>());
}

fn encode(kind: EncodeKind, instance: Option<String>, out: &mut String) -> Result<i32, Failure> {
    let need_file = || -> Result<String, Failure> {
        let path = instance.as_deref().ok_or_else(|| usage("this encoder needs an instance file"))?;
        read_file(std::path::Path::new(path))
    };
    let enc = |e: EncodeError| usage(e);
    match kind {
        EncodeKind::Tagap | EncodeKind::Reach => {
            let g = read_graph(&need_file()?).map_err(enc)?;
            let v = g.vertex_alphabet().map_err(enc)?;
            let ((e, sigma), w) = if matches!(kind, EncodeKind::Tagap) {
                if !g.is_topologically_sorted() {
                    return Err(usage("edges are not topologically sorted"));
                }
                (encode_tagap(&v).map_err(enc)?, tagap_word(&g).map_err(enc)?)
            } else {
                (encode_reach(&v).map_err(enc)?, reach_word(&g).map_err(enc)?)
            };
            stanza(out, &e, &sigma);
            let _ = writeln!(out, "word: {w}");
        }
        EncodeKind::Qbf => {
            let q = read_qbf(&need_file()?).map_err(enc)?;
            let (e, w) = encode_qbf(&q).map_err(enc)?;
            stanza(out, &e, &Alphabet::new(['F', 'T']).expect("two symbols"));
            let _ = writeln!(out, "word: {w}");
        }
        EncodeKind::Automaton => {
            let m = read_automaton(&need_file()?).map_err(enc)?;
            let e = encode_two_way_automaton(&m).map_err(enc)?;
            stanza(out, &e, &m.alphabet().map_err(enc)?);
        }
        EncodeKind::Power => {
            let k: PowerKind = instance.as_deref().unwrap_or("1exp").parse().map_err(enc)?;
            stanza(out, &encode_power_language(k), &Alphabet::new(['a']).expect("one symbol"));
        }
        EncodeKind::Prime => stanza(out, &prime_expr(), &Alphabet::new(['a']).expect("one symbol")),
    }
    Ok(0)
}
