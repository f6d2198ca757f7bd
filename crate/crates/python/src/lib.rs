//! Python bindings: programs in either notation, canonical forms,
//! congruence checks, thread extraction and the pgla2pga projection.
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use pga_core::cli::{infer_dialect, DialectArg};
use pga_core::{CanonSpi, LCanon, RegularThread};

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_dialect(text: &str, dialect: Option<&str>) -> PyResult<DialectArg> {
    match dialect {
        None => infer_dialect(text).map_err(value_error),
        Some("pga") => Ok(DialectArg::Pga),
        Some("pgla") => Ok(DialectArg::Pgla),
        Some(other) => Err(value_error(format!("unknown dialect {other:?}; expected 'pga' or 'pgla'"))),
    }
}

/// A program denoting a finite or eventually periodic instruction sequence.
#[pyclass(frozen, eq, hash, skip_from_py_object)]
#[derive(Clone, PartialEq, Eq, Hash)]
struct Program {
    spi: CanonSpi,
}

#[pymethods]
impl Program {
    /// Parses PGA (`^w`) or PGLA (`\##n`) text. PGLA input must lie in K.
    #[new]
    #[pyo3(signature = (text, dialect=None))]
    fn new(text: &str, dialect: Option<&str>) -> PyResult<Self> {
        let spi = match parse_dialect(text, dialect)? {
            DialectArg::Pga => pga_core::to_canon_pga(&pga_core::parse_pga(text).map_err(value_error)?),
            DialectArg::Pgla => match pga_core::to_canon_l(&pga_core::parse_l(text).map_err(value_error)?) {
                LCanon::Kernel(c) => c,
                LCanon::NotInK(n) => {
                    return Err(value_error(format!("{} is not in K (deficit {})", n.first_form, n.deficit)))
                }
            },
        };
        Ok(Program { spi })
    }

    #[getter]
    fn preperiod(&self) -> Vec<String> {
        self.spi.preperiod().iter().map(ToString::to_string).collect()
    }

    #[getter]
    fn period(&self) -> Option<Vec<String>> {
        self.spi.period().map(|p| p.iter().map(ToString::to_string).collect())
    }

    fn minimize_first(&self) -> Program {
        Program { spi: pga_core::minimize_first(&self.spi) }
    }

    fn second_canonical(&self) -> Program {
        Program { spi: pga_core::second_canonical(&self.spi) }
    }

    fn minimize_second(&self) -> Program {
        Program { spi: pga_core::minimize_second(&self.spi) }
    }

    fn unfold(&self, length: usize) -> Vec<String> {
        pga_core::unfold(&self.spi, length).iter().map(ToString::to_string).collect()
    }

    fn to_pga(&self) -> String {
        self.spi.to_pga_term().to_string()
    }

    fn to_kform(&self) -> String {
        self.spi.to_kform().to_string()
    }

    fn thread(&self) -> Thread {
        Thread { inner: pga_core::extract(&self.spi) }
    }

    fn __str__(&self) -> String {
        self.to_pga()
    }

    fn __repr__(&self) -> String {
        format!("Program({:?})", self.to_pga())
    }
}

/// A regular thread.
#[pyclass(frozen, skip_from_py_object)]
#[derive(Clone)]
struct Thread {
    inner: RegularThread,
}

#[pymethods]
impl Thread {
    fn minimize(&self) -> Thread {
        Thread { inner: pga_core::minimize(&self.inner) }
    }

    #[getter]
    fn state_count(&self) -> usize {
        self.inner.state_count()
    }

    #[pyo3(signature = (ascii=false))]
    fn equations(&self, ascii: bool) -> String {
        let eqs = pga_core::to_equations(&self.inner);
        if ascii {
            eqs.to_ascii()
        } else {
            eqs.to_string()
        }
    }

    fn dot(&self) -> String {
        pga_core::to_dot(&self.inner)
    }
}

/// Outcome of an equivalence query; truthy when equal.
#[pyclass(frozen, get_all)]
struct Verdict {
    equal: bool,
    relation: String,
    witness: Option<String>,
}

impl From<pga_core::Verdict> for Verdict {
    fn from(v: pga_core::Verdict) -> Self {
        Verdict { equal: v.equal, relation: v.relation.to_string(), witness: v.witness.map(|w| w.to_string()) }
    }
}

#[pymethods]
impl Verdict {
    fn __bool__(&self) -> bool {
        self.equal
    }

    fn __repr__(&self) -> String {
        match &self.witness {
            None => format!("Verdict(equal ({}))", self.relation),
            Some(w) => format!("Verdict(not equal ({}): {w})", self.relation),
        }
    }
}

#[pyclass(frozen, get_all)]
struct ProjectionReport {
    input: String,
    first_canonical_l: String,
    in_kernel: bool,
    padding_added: usize,
    result: String,
}

#[pymethods]
impl ProjectionReport {
    fn program(&self) -> PyResult<Program> {
        Program::new(&self.result, Some("pga"))
    }

    fn __str__(&self) -> String {
        format!(
            "input: {}\nfirst_canonical_l: {}\nin_kernel: {}\npadding_added: {}\nresult: {}\n",
            self.input, self.first_canonical_l, self.in_kernel, self.padding_added, self.result
        )
    }
}

#[pyfunction]
fn parse_pga(text: &str) -> PyResult<String> {
    pga_core::parse_pga(text).map(|t| t.to_string()).map_err(value_error)
}

#[pyfunction]
fn parse_l(text: &str) -> PyResult<String> {
    pga_core::parse_l(text).map(|s| s.to_string()).map_err(value_error)
}

#[pyfunction]
fn spi_equal(a: &Program, b: &Program) -> bool {
    pga_core::spi_equal_oracle(&a.spi, &b.spi)
}

#[pyfunction]
fn decide_spc(a: &Program, b: &Program) -> Verdict {
    pga_core::decide_spc(&a.spi, &b.spi).into()
}

#[pyfunction]
fn decide_sc(a: &Program, b: &Program) -> Verdict {
    pga_core::decide_sc(&a.spi, &b.spi).into()
}

#[pyfunction]
fn thread_equal(a: &Thread, b: &Thread) -> Verdict {
    pga_core::thread_equal(&a.inner, &b.inner).into()
}

#[pyfunction]
fn pgla2pga(text: &str) -> PyResult<ProjectionReport> {
    let seq = pga_core::parse_l(text).map_err(value_error)?;
    let r = pga_core::pgla2pga(&seq);
    Ok(ProjectionReport {
        input: r.input.to_string(),
        first_canonical_l: r.first_canonical_l.to_string(),
        in_kernel: r.in_kernel,
        padding_added: r.padding_added,
        result: r.result.to_string(),
    })
}

/// Returns `(member, deficit)`.
#[pyfunction]
fn kernel_check(text: &str) -> PyResult<(bool, usize)> {
    let seq = pga_core::parse_l(text).map_err(value_error)?;
    let check = pga_core::kernel_check(&seq);
    Ok((check.member, check.deficit))
}

#[pymodule]
fn pgakit(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Program>()?;
    m.add_class::<Thread>()?;
    m.add_class::<Verdict>()?;
    m.add_class::<ProjectionReport>()?;
    m.add_function(wrap_pyfunction!(parse_pga, m)?)?;
    m.add_function(wrap_pyfunction!(parse_l, m)?)?;
    m.add_function(wrap_pyfunction!(spi_equal, m)?)?;
    m.add_function(wrap_pyfunction!(decide_spc, m)?)?;
    m.add_function(wrap_pyfunction!(decide_sc, m)?)?;
    m.add_function(wrap_pyfunction!(thread_equal, m)?)?;
    m.add_function(wrap_pyfunction!(pgla2pga, m)?)?;
    m.add_function(wrap_pyfunction!(kernel_check, m)?)?;
    Ok(())
}
