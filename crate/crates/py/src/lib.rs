//! Python bindings: `import pysymext`.

use std::path::PathBuf;

use num_complex::Complex64 as C64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use symext::convert::{self, Extension};
use symext::extend::{self, Certificate, Profile};
use symext::io::{self, LoadedState, Metadata};
use symext::linalg::{ComplexMatrix, SystemLayout};
use symext::schur::{self, build_schur_basis, HalfInt, YoungDiagram};

fn err(e: symext::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_rows(m: &ComplexMatrix) -> Vec<Vec<C64>> {
    (0..m.rows()).map(|i| m.row(i).to_vec()).collect()
}

fn from_rows(rows: Vec<Vec<C64>>) -> PyResult<ComplexMatrix> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(PyValueError::new_err("matrix must be square"));
    }
    ComplexMatrix::from_vec(n, n, rows.into_iter().flatten().collect()).map_err(err)
}

fn diagram(lambda: (usize, usize)) -> PyResult<YoungDiagram> {
    YoungDiagram::new(lambda.0, lambda.1).map_err(err)
}

/// Density matrix on an ordered tensor product.
#[pyclass(name = "DensityMatrix", module = "pysymext")]
#[derive(Clone)]
struct PyDensityMatrix(symext::linalg::DensityMatrix);

#[pymethods]
impl PyDensityMatrix {
    #[new]
    fn new(matrix: Vec<Vec<C64>>, layout: Vec<usize>) -> PyResult<Self> {
        let layout = SystemLayout::new(layout).map_err(err)?;
        symext::linalg::DensityMatrix::new(from_rows(matrix)?, layout).map(Self).map_err(err)
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        io::load_state(&path).map(Self).map_err(err)
    }

    #[pyo3(signature = (path, seed=None, provenance=None))]
    fn save(&self, path: PathBuf, seed: Option<u64>, provenance: Option<String>) -> PyResult<()> {
        io::save_state(&self.0, &path, Metadata { seed, provenance }).map_err(err)
    }

    #[getter]
    fn layout(&self) -> Vec<usize> {
        self.0.layout().dims().to_vec()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn matrix(&self) -> Vec<Vec<C64>> {
        to_rows(self.0.matrix())
    }

    fn reduce(&self, keep: Vec<usize>) -> PyResult<Self> {
        self.0.reduce(&keep).map(Self).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("DensityMatrix(layout={:?})", self.0.layout().dims())
    }
}

/// Block-diagonal extension: one `d_A d^λ` block per Young diagram.
#[pyclass(name = "BlockState", module = "pysymext")]
#[derive(Clone)]
struct PyBlockState(extend::BlockState);

#[pymethods]
impl PyBlockState {
    #[getter]
    fn k(&self) -> usize {
        self.0.k()
    }

    #[getter]
    fn d_a(&self) -> usize {
        self.0.d_a()
    }

    fn diagrams(&self) -> Vec<(usize, usize)> {
        self.0.blocks().iter().map(|(l, _)| (l.lambda1(), l.lambda2())).collect()
    }

    fn block(&self, lam: (usize, usize)) -> PyResult<Option<Vec<Vec<C64>>>> {
        Ok(self.0.block(&diagram(lam)?).map(to_rows))
    }

    fn marginal(&self) -> PyDensityMatrix {
        PyDensityMatrix(extend::marginal_from_blocks(&self.0))
    }

    /// Extension on `A ⊗ (C^2)^{⊗k}`.
    fn to_global(&self) -> PyResult<PyDensityMatrix> {
        let basis = build_schur_basis(self.0.k()).map_err(err)?;
        extend::blocks_to_global(&self.0, &basis).map(PyDensityMatrix).map_err(err)
    }

    #[staticmethod]
    fn from_global(rho: &PyDensityMatrix, k: usize) -> PyResult<Self> {
        let basis = build_schur_basis(k).map_err(err)?;
        extend::global_to_blocks(&rho.0, &basis).map(Self).map_err(err)
    }
}

/// State on `A ⊗ Sym^k(C^2)` in the Dicke basis.
#[pyclass(name = "BosonicState", module = "pysymext")]
#[derive(Clone)]
struct PyBosonicState(convert::BosonicState);

#[pymethods]
impl PyBosonicState {
    #[new]
    fn new(d_a: usize, k: usize, matrix: Vec<Vec<C64>>) -> PyResult<Self> {
        convert::BosonicState::new(d_a, k, from_rows(matrix)?).map(Self).map_err(err)
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        match io::load_any(&path).map_err(err)? {
            LoadedState::Bosonic(s) => Ok(Self(s)),
            LoadedState::Dense(_) => Err(PyValueError::new_err("file holds a dense state")),
        }
    }

    #[pyo3(signature = (path, seed=None, provenance=None))]
    fn save(&self, path: PathBuf, seed: Option<u64>, provenance: Option<String>) -> PyResult<()> {
        io::save_bosonic(&self.0, &path, Metadata { seed, provenance }).map_err(err)
    }

    #[getter]
    fn k(&self) -> usize {
        self.0.k()
    }

    #[getter]
    fn d_a(&self) -> usize {
        self.0.d_a()
    }

    fn matrix(&self) -> Vec<Vec<C64>> {
        to_rows(self.0.matrix())
    }

    fn embed(&self) -> PyResult<PyDensityMatrix> {
        self.0.embed().map(PyDensityMatrix).map_err(err)
    }

    fn marginal(&self) -> PyDensityMatrix {
        PyDensityMatrix(extend::marginal_from_blocks(&self.0.to_block_state()))
    }
}

#[pyclass(name = "SolverConfig", module = "pysymext")]
#[derive(Clone)]
struct PySolverConfig(extend::SolverConfig);

#[pymethods]
impl PySolverConfig {
    #[new]
    #[pyo3(signature = (tol_feasible=1e-8, tol_infeasible_gap=1e-6, max_iter=20000, seed=0))]
    fn new(tol_feasible: f64, tol_infeasible_gap: f64, max_iter: usize, seed: u64) -> PyResult<Self> {
        let cfg = extend::SolverConfig { tol_feasible, tol_infeasible_gap, max_iter, seed };
        cfg.validate().map_err(err)?;
        Ok(Self(cfg))
    }
}

#[pyclass(name = "SolverReport", module = "pysymext")]
struct PySolverReport(extend::SolverReport);

#[pymethods]
impl PySolverReport {
    #[getter]
    fn status(&self) -> &'static str {
        self.0.status.as_str()
    }

    #[getter]
    fn residual(&self) -> f64 {
        self.0.residual
    }

    #[getter]
    fn gap_estimate(&self) -> f64 {
        self.0.gap_estimate
    }

    #[getter]
    fn iterations(&self) -> usize {
        self.0.iterations
    }

    /// `BlockState`, `DensityMatrix`, or `None`.
    fn certificate(&self, py: Python<'_>) -> PyResult<PyObject> {
        Ok(match &self.0.certificate {
            Some(Certificate::Blocks(bs)) => Py::new(py, PyBlockState(bs.clone()))?.into_any(),
            Some(Certificate::Global(g)) => Py::new(py, PyDensityMatrix(g.clone()))?.into_any(),
            None => py.None(),
        })
    }

    fn __str__(&self) -> String {
        self.0.to_text(None)
    }
}

fn config(cfg: Option<PySolverConfig>) -> extend::SolverConfig {
    cfg.map(|c| c.0).unwrap_or_default()
}

#[pyfunction]
#[pyo3(signature = (rho, k, config=None))]
fn solve_symmetric(py: Python<'_>, rho: PyDensityMatrix, k: usize, config: Option<PySolverConfig>) -> PyResult<PySolverReport> {
    let cfg = self::config(config);
    py.allow_threads(|| extend::solve_symmetric(&rho.0, k, &cfg)).map(PySolverReport).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (rho, k, config=None))]
fn solve_bosonic(py: Python<'_>, rho: PyDensityMatrix, k: usize, config: Option<PySolverConfig>) -> PyResult<PySolverReport> {
    let cfg = self::config(config);
    py.allow_threads(|| extend::solve_bosonic(&rho.0, k, &cfg)).map(PySolverReport).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (rho, d_b, config=None))]
fn solve_bosonic_k2_generic(py: Python<'_>, rho: PyDensityMatrix, d_b: usize, config: Option<PySolverConfig>) -> PyResult<PySolverReport> {
    let cfg = self::config(config);
    py.allow_threads(|| extend::solve_bosonic_k2_generic(&rho.0, d_b, &cfg)).map(PySolverReport).map_err(err)
}

#[pyfunction]
fn sym_to_bos(blocks: &PyBlockState) -> PyResult<PyBosonicState> {
    convert::sym_to_bos(&blocks.0).map(PyBosonicState).map_err(err)
}

/// Returns a dict of `(passed, value)` per check, plus the two verdicts.
#[pyfunction]
#[pyo3(signature = (ext, rho, k, tol=1e-8))]
fn verify_extension(py: Python<'_>, ext: &Bound<'_, PyAny>, rho: &PyDensityMatrix, k: usize, tol: f64) -> PyResult<PyObject> {
    let report = if let Ok(b) = ext.downcast::<PyBosonicState>() {
        convert::verify_extension(Extension::Bosonic(&b.borrow().0), &rho.0, k, tol)
    } else if let Ok(d) = ext.downcast::<PyDensityMatrix>() {
        convert::verify_extension(Extension::Full(&d.borrow().0), &rho.0, k, tol)
    } else {
        return Err(PyValueError::new_err("ext must be a BosonicState or DensityMatrix"));
    }
    .map_err(err)?;
    let d = pyo3::types::PyDict::new(py);
    for (name, c) in [
        ("psd", &report.psd),
        ("trace", &report.trace),
        ("marginals", &report.marginals),
        ("permutation", &report.permutation),
        ("symmetric_support", &report.symmetric_support),
    ] {
        d.set_item(name, (c.passed, c.value))?;
    }
    d.set_item("symmetric_extension", report.is_symmetric_extension())?;
    d.set_item("bosonic_extension", report.is_bosonic_extension())?;
    Ok(d.into_any().unbind())
}

/// `(state, ppt, min_pt_eigenvalue)`.
#[pyfunction]
fn tilde_state(rho: &PyDensityMatrix, k: usize) -> PyResult<(PyDensityMatrix, bool, f64)> {
    let t = convert::tilde_state(&rho.0, k).map_err(err)?;
    Ok((PyDensityMatrix(t.state), t.ppt, t.min_pt_eigenvalue))
}

#[pyfunction]
#[pyo3(signature = (k, d_a, seed, profile="all"))]
fn gen_random_extendible(k: usize, d_a: usize, seed: u64, profile: &str) -> PyResult<(PyDensityMatrix, PyBlockState)> {
    let profile: Profile = profile.parse().map_err(err)?;
    let (rho, bs) = extend::gen_random_extendible(k, d_a, seed, profile).map_err(err)?;
    Ok((PyDensityMatrix(rho), PyBlockState(bs)))
}

#[pyfunction]
fn list_diagrams(k: usize) -> PyResult<Vec<(usize, usize)>> {
    Ok(schur::list_diagrams(k).map_err(err)?.iter().map(|l| (l.lambda1(), l.lambda2())).collect())
}

#[pyfunction]
fn hook_dim(lam: (usize, usize)) -> PyResult<u128> {
    Ok(schur::hook_dim(&diagram(lam)?))
}

/// `α` between weights given as twice their value.
#[pyfunction]
fn alpha_coeff(lam: (usize, usize), two_omega: i32, two_omega_p: i32) -> PyResult<f64> {
    schur::alpha_coeff(&diagram(lam)?, HalfInt::from_twice(two_omega), HalfInt::from_twice(two_omega_p)).map_err(err)
}

/// Marginal on `A ⊗ B` of the antisymmetric three-qutrit counterexample.
#[pyfunction]
#[pyo3(signature = (coeffs=None))]
fn qutrit_marginal(coeffs: Option<[f64; 3]>) -> PyResult<PyDensityMatrix> {
    let c = coeffs.unwrap_or_else(symext::fixtures::qutrit_coefficients);
    symext::fixtures::qutrit_marginal(c).map(PyDensityMatrix).map_err(err)
}

/// Acceptance suite as `(id, title, passed, detail)` tuples.
#[pyfunction]
#[pyo3(signature = (seed=symext::acceptance::DEFAULT_SEED))]
fn selftest(py: Python<'_>, seed: u64) -> Vec<(u32, &'static str, bool, String)> {
    py.allow_threads(|| symext::acceptance::run_all(seed))
        .into_iter()
        .map(|r| (r.id, r.title, r.passed, r.detail))
        .collect()
}

#[pymodule]
fn pysymext(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDensityMatrix>()?;
    m.add_class::<PyBlockState>()?;
    m.add_class::<PyBosonicState>()?;
    m.add_class::<PySolverConfig>()?;
    m.add_class::<PySolverReport>()?;
    m.add_function(wrap_pyfunction!(solve_symmetric, m)?)?;
    m.add_function(wrap_pyfunction!(solve_bosonic, m)?)?;
    m.add_function(wrap_pyfunction!(solve_bosonic_k2_generic, m)?)?;
    m.add_function(wrap_pyfunction!(sym_to_bos, m)?)?;
    m.add_function(wrap_pyfunction!(verify_extension, m)?)?;
    m.add_function(wrap_pyfunction!(tilde_state, m)?)?;
    m.add_function(wrap_pyfunction!(gen_random_extendible, m)?)?;
    m.add_function(wrap_pyfunction!(list_diagrams, m)?)?;
    m.add_function(wrap_pyfunction!(hook_dim, m)?)?;
    m.add_function(wrap_pyfunction!(alpha_coeff, m)?)?;
    m.add_function(wrap_pyfunction!(qutrit_marginal, m)?)?;
    m.add_function(wrap_pyfunction!(selftest, m)?)?;
    Ok(())
}
