// pyo3 0.22 macro expansions trip this lint on every `PyResult` function
#![allow(clippy::useless_conversion)]

use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use rewbl::compile::compile as compile_expr;
use rewbl::corpus::{check_corpus, default_threads, parse_corpus};
use rewbl::decision::{complement_accepts, decide_membership, DecideError, DecideOptions};
use rewbl::encoders;
use rewbl::machine::{read_machines, write_machines, Bfs, ExecError, ExecOptions, MachineSet as CoreSet, Run};
use rewbl::semantics::{self, EvalError};
use rewbl::syntax::{self, infer_alphabet, Alphabet};

create_exception!(rewbl_py, BudgetExceeded, PyRuntimeError);

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn eval_err(e: EvalError) -> PyErr {
    BudgetExceeded::new_err(e.to_string())
}

fn exec_err(e: ExecError) -> PyErr {
    match e {
        ExecError::Budget(_) => BudgetExceeded::new_err(e.to_string()),
        other => value_err(other),
    }
}

fn decide_err(e: DecideError) -> PyErr {
    match e {
        DecideError::Exec(x) => exec_err(x),
        DecideError::Budget(_) => BudgetExceeded::new_err(e.to_string()),
        other => value_err(other),
    }
}

fn alphabet(text: &str, sigma: Option<&str>, extra: &str) -> PyResult<Alphabet> {
    match sigma {
        Some(s) => Alphabet::from_set(s.chars()).map_err(value_err),
        None => infer_alphabet(text, extra).map_err(value_err),
    }
}

/// A parsed expression over a fixed alphabet.
#[pyclass(module = "rewbl_py")]
#[derive(Clone)]
struct Expr {
    inner: syntax::Expr,
    sigma: Alphabet,
}

#[pymethods]
impl Expr {
    /// Without `sigma` the alphabet is the set of literals in `text`.
    #[new]
    #[pyo3(signature = (text, sigma=None))]
    fn new(text: &str, sigma: Option<&str>) -> PyResult<Self> {
        let sigma = alphabet(text, sigma, "")?;
        let inner = syntax::parse(text, &sigma).map_err(value_err)?;
        Ok(Expr { inner, sigma })
    }

    fn render(&self) -> String {
        syntax::render(&self.inner)
    }

    #[getter]
    fn sigma(&self) -> String {
        self.sigma.symbols().iter().collect()
    }

    #[getter]
    fn size(&self) -> usize {
        self.inner.metrics().size
    }

    #[getter]
    fn star_height(&self) -> usize {
        self.inner.metrics().star_height
    }

    #[getter]
    fn lookahead_depth(&self) -> usize {
        self.inner.metrics().lookahead_depth
    }

    #[getter]
    fn variables(&self) -> Vec<String> {
        self.inner.metrics().variables.into_iter().collect()
    }

    /// Membership by the reference evaluator.
    #[pyo3(signature = (word, max_pairs=None))]
    fn accepts(&self, word: &str, max_pairs: Option<usize>) -> PyResult<bool> {
        let mut b = semantics::Budget::default();
        if let Some(p) = max_pairs {
            b.max_pairs = p;
        }
        semantics::accepts_with(&self.inner, word, b).map_err(eval_err)
    }

    /// Members of length at most `max_len`, shortest first.
    fn enumerate(&self, max_len: usize) -> PyResult<Vec<String>> {
        semantics::enumerate_members(&self.inner, &self.sigma, max_len, semantics::Budget::default()).map_err(eval_err)
    }

    fn compile(&self) -> PyResult<MachineSet> {
        let c = compile_expr(&self.inner, &self.sigma).map_err(value_err)?;
        Ok(MachineSet { inner: c.set, k: Some(c.info.k) })
    }

    fn __repr__(&self) -> String {
        format!("Expr({:?})", self.render())
    }

    fn __str__(&self) -> String {
        self.render()
    }
}

/// A set of machines; the first one is the entry point.
#[pyclass(module = "rewbl_py")]
struct MachineSet {
    inner: CoreSet,
    k: Option<usize>,
}

#[pymethods]
impl MachineSet {
    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        let machines = read_machines(text).map_err(value_err)?;
        let inner = CoreSet::new(machines).map_err(value_err)?;
        Ok(MachineSet { inner, k: None })
    }

    fn to_text(&self) -> String {
        write_machines(self.inner.machines())
    }

    #[getter]
    fn names(&self) -> Vec<String> {
        self.inner.machines().iter().map(|m| m.name.clone()).collect()
    }

    #[getter]
    fn depth(&self) -> usize {
        self.inner.depth(self.inner.entry())
    }

    #[getter]
    fn k(&self) -> usize {
        self.k.unwrap_or_else(|| self.inner.get(0).k)
    }

    #[getter]
    fn total_states(&self) -> usize {
        self.inner.total_states()
    }

    /// `engine` is `bfs`, `interpreter` or `complement`.
    #[pyo3(signature = (word, engine="bfs", entry=None))]
    fn accepts(&self, py: Python<'_>, word: &str, engine: &str, entry: Option<&str>) -> PyResult<bool> {
        let m = match entry {
            Some(name) => self.inner.id(name).map_err(value_err)?,
            None => self.inner.entry(),
        };
        let set = &self.inner;
        py.allow_threads(|| match engine {
            "bfs" => {
                let run = Run::new(set, word).map_err(exec_err)?;
                Bfs::new(ExecOptions::default()).accepts(&run, m).map_err(exec_err)
            }
            "interpreter" => decide_membership(set, m, word, DecideOptions::default()).map_err(decide_err),
            "complement" => complement_accepts(set, m, word, DecideOptions::default())
                .map(|c| !c)
                .map_err(decide_err),
            other => Err(value_err(format!("unknown engine {other:?}"))),
        })
    }

    fn __repr__(&self) -> String {
        format!("MachineSet(names={:?})", self.names())
    }
}

/// Membership by the reference evaluator.
#[pyfunction]
#[pyo3(signature = (expr, word, sigma=None))]
fn accepts(expr: &str, word: &str, sigma: Option<&str>) -> PyResult<bool> {
    let sigma = alphabet(expr, sigma, word)?;
    let e = syntax::parse(expr, &sigma).map_err(value_err)?;
    semantics::accepts(&e, word).map_err(eval_err)
}

#[pyfunction]
#[pyo3(signature = (expr, sigma=None))]
fn compile(expr: &str, sigma: Option<&str>) -> PyResult<MachineSet> {
    Expr::new(expr, sigma)?.compile()
}

/// `1exp`, `2exp`, `2exp-neg` or `halving`.
#[pyfunction]
fn power_expr(kind: &str) -> PyResult<Expr> {
    let k: encoders::PowerKind = kind.parse().map_err(value_err)?;
    Ok(Expr {
        inner: encoders::encode_power_language(k),
        sigma: Alphabet::new(['a']).expect("one symbol"),
    })
}

#[pyfunction]
fn prime_expr() -> Expr {
    Expr {
        inner: encoders::prime_expr(),
        sigma: Alphabet::new(['a']).expect("one symbol"),
    }
}

/// Expression, witness word and brute-force truth value of a QBF file.
#[pyfunction]
fn encode_qbf(text: &str) -> PyResult<(Expr, String, bool)> {
    let q = encoders::read_qbf(text).map_err(value_err)?;
    let (inner, w) = encoders::encode_qbf(&q).map_err(value_err)?;
    let truth = encoders::eval_qbf_bruteforce(&q).map_err(value_err)?;
    let sigma = Alphabet::new(['F', 'T']).expect("two symbols");
    Ok((Expr { inner, sigma }, w, truth))
}

/// Expression, word and graph-search verdict for a graph file. `kind` is
/// `reach` or `tagap`.
#[pyfunction]
#[pyo3(signature = (text, kind="reach"))]
fn encode_graph(text: &str, kind: &str) -> PyResult<(Expr, String, bool)> {
    let g = encoders::read_graph(text).map_err(value_err)?;
    let v = g.vertex_alphabet().map_err(value_err)?;
    let (enc, w) = match kind {
        "reach" => (encoders::encode_reach(&v), encoders::reach_word(&g)),
        "tagap" => (encoders::encode_tagap(&v), encoders::tagap_word(&g)),
        other => return Err(value_err(format!("unknown graph encoding {other:?}"))),
    };
    let (inner, sigma) = enc.map_err(value_err)?;
    Ok((Expr { inner, sigma }, w.map_err(value_err)?, g.reachable()))
}

/// Expression for an automaton file.
#[pyfunction]
fn encode_automaton(text: &str) -> PyResult<Expr> {
    let m = encoders::read_automaton(text).map_err(value_err)?;
    let inner = encoders::encode_two_way_automaton(&m).map_err(value_err)?;
    let sigma = m.alphabet().map_err(value_err)?;
    Ok(Expr { inner, sigma })
}

/// Configuration-space simulation of an automaton file.
#[pyfunction]
fn simulate_automaton(text: &str, word: &str) -> PyResult<bool> {
    let m = encoders::read_automaton(text).map_err(value_err)?;
    encoders::simulate_two_way_automaton(&m, word).map_err(value_err)
}

/// Differential check of corpus text; returns `(agreeing, total)` pairs.
#[pyfunction]
fn check_corpus_text(py: Python<'_>, text: &str) -> PyResult<(usize, usize)> {
    let entries = parse_corpus(text).map_err(value_err)?;
    let reports = py.allow_threads(|| check_corpus(&entries, default_threads()));
    let total = entries.iter().map(|e| e.words.len()).sum();
    let agree = reports.iter().filter(|r| r.error.is_none()).map(|r| r.agreeing()).sum();
    Ok((agree, total))
}

#[pymodule]
fn rewbl_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("BudgetExceeded", m.py().get_type_bound::<BudgetExceeded>())?;
    m.add_class::<Expr>()?;
    m.add_class::<MachineSet>()?;
    m.add_function(wrap_pyfunction!(accepts, m)?)?;
    m.add_function(wrap_pyfunction!(compile, m)?)?;
    m.add_function(wrap_pyfunction!(power_expr, m)?)?;
    m.add_function(wrap_pyfunction!(prime_expr, m)?)?;
    m.add_function(wrap_pyfunction!(encode_qbf, m)?)?;
    m.add_function(wrap_pyfunction!(encode_graph, m)?)?;
    m.add_function(wrap_pyfunction!(encode_automaton, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_automaton, m)?)?;
    m.add_function(wrap_pyfunction!(check_corpus_text, m)?)?;
    Ok(())
}
