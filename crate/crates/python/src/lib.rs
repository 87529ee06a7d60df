//! Python bindings. Rationals cross the boundary as strings (`"p/q"`) or
//! Python ints; structured results are returned as JSON strings.

use std::str::FromStr;

use grassmannian_strata as gs;
use gs::arrangement::DEFAULT_CHAIN_CAP;
use gs::exactlin::{Rational, Subspace};
use gs::matroid::MAX_LATTICE_SIZE;
use num_rational::BigRational;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde_json::Value;

fn py_err(e: gs::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Parses one row of rational literals.
pub fn parse_rational_row(row: &[String]) -> Result<Vec<Rational>, String> {
    row.iter()
        .map(|s| BigRational::from_str(s.trim()).map_err(|_| format!("not a rational: {s:?}")))
        .collect()
}

fn rows_from_py(rows: &Bound<'_, PyAny>) -> PyResult<Vec<Vec<Rational>>> {
    let rows: Vec<Vec<Bound<'_, PyAny>>> = rows.extract()?;
    rows.iter()
        .map(|row| {
            let text: Vec<String> = row
                .iter()
                .map(|x| Ok(x.str()?.to_string()))
                .collect::<PyResult<_>>()?;
            parse_rational_row(&text).map_err(PyValueError::new_err)
        })
        .collect()
}

fn rows_to_strings(s: &Subspace) -> Vec<Vec<String>> {
    (0..s.dim())
        .map(|r| s.basis().row(r).iter().map(|x| x.to_string()).collect())
        .collect()
}

fn subspace_from_py(n: usize, rows: &Bound<'_, PyAny>) -> PyResult<Subspace> {
    Subspace::span(n, rows_from_py(rows)?).map_err(py_err)
}

fn to_json(v: &Value) -> String {
    serde_json::to_string(v).expect("plain data")
}

/// A rational hyperplane arrangement given by its normals.
#[pyclass(frozen, name = "Arrangement")]
struct PyArrangement {
    inner: gs::Arrangement,
}

#[pymethods]
impl PyArrangement {
    #[new]
    fn new(n: usize, normals: &Bound<'_, PyAny>) -> PyResult<Self> {
        let inner = gs::build_arrangement(n, rows_from_py(normals)?).map_err(py_err)?;
        Ok(Self { inner })
    }

    /// Parses the text format: `n`, then one normal per line.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: gs::parse_arrangement(text).map_err(py_err)?,
        })
    }

    #[getter]
    fn ambient_dim(&self) -> usize {
        self.inner.ambient_dim()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    /// Canonical integer normals as strings.
    fn normals(&self) -> Vec<Vec<String>> {
        self.inner
            .normals()
            .iter()
            .map(|v| v.iter().map(|x| x.to_string()).collect())
            .collect()
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    fn digest(&self) -> String {
        gs::cli::arrangement_digest(&self.inner)
    }

    /// Basis of the center T.
    fn center(&self) -> Vec<Vec<String>> {
        rows_to_strings(&gs::center(&self.inner))
    }

    fn is_essential(&self) -> bool {
        gs::arrangement::is_essential(&self.inner)
    }

    fn lattice(&self) -> PyIntersectionLattice {
        PyIntersectionLattice {
            inner: gs::intersection_lattice(&self.inner),
        }
    }

    /// Restriction to the row space of `basis`, in the coordinates of that
    /// row space's canonical basis.
    fn restrict(&self, basis: &Bound<'_, PyAny>) -> PyResult<Self> {
        let u = subspace_from_py(self.inner.ambient_dim(), basis)?;
        Ok(Self {
            inner: gs::restriction(&self.inner, &u).map_err(py_err)?,
        })
    }

    /// Coefficient table of the k-adjoint arrangement, as JSON.
    fn adjoint(&self, k: usize) -> PyResult<String> {
        let l = gs::intersection_lattice(&self.inner);
        let hs = gs::k_adjoint(&l, k).map_err(py_err)?;
        Ok(to_json(&gs::pluecker::adjoint_table_json(
            self.inner.ambient_dim(),
            k,
            &hs,
        )))
    }

    fn __repr__(&self) -> String {
        format!(
            "Arrangement(n={}, m={})",
            self.inner.ambient_dim(),
            self.inner.len()
        )
    }
}

#[pyclass(frozen, name = "IntersectionLattice")]
struct PyIntersectionLattice {
    inner: gs::IntersectionLattice,
}

#[pymethods]
impl PyIntersectionLattice {
    fn __len__(&self) -> usize {
        self.inner.len()
    }

    #[getter]
    fn rank(&self) -> usize {
        self.inner.rank()
    }

    /// `(generators, rank, basis)` per flat; generators are 1-based.
    fn flats(&self) -> Vec<(Vec<usize>, usize, Vec<Vec<String>>)> {
        self.inner
            .flats()
            .iter()
            .map(|f| {
                (
                    f.generators.iter().map(|g| g + 1).collect(),
                    f.rank,
                    rows_to_strings(&f.subspace),
                )
            })
            .collect()
    }

    /// Maximal chains as flat indices, top flat first.
    #[pyo3(signature = (cap = DEFAULT_CHAIN_CAP))]
    fn chains(&self, cap: usize) -> PyResult<Vec<Vec<usize>>> {
        gs::maximal_chains(&self.inner, cap).map_err(py_err)
    }
}

/// Labels k-subspaces of one arrangement.
#[pyclass(frozen, name = "Stratifier")]
struct PyStratifier {
    inner: gs::Stratifier,
}

#[pymethods]
impl PyStratifier {
    #[new]
    #[pyo3(signature = (arrangement, k, chain_cap = DEFAULT_CHAIN_CAP, lattice_cap = MAX_LATTICE_SIZE))]
    fn new(
        arrangement: &PyArrangement,
        k: usize,
        chain_cap: usize,
        lattice_cap: usize,
    ) -> PyResult<Self> {
        let inner = gs::Stratifier::new(&arrangement.inner, k, chain_cap)
            .map_err(py_err)?
            .with_lattice_cap(lattice_cap);
        Ok(Self { inner })
    }

    #[getter]
    fn k(&self) -> usize {
        self.inner.k()
    }

    /// Matroid, adjoint and Schubert labels of the row space of `basis`.
    fn labels(&self, basis: &Bound<'_, PyAny>) -> PyResult<String> {
        let u = subspace_from_py(self.inner.arrangement().ambient_dim(), basis)?;
        let labels = self.inner.labels(&u).map_err(py_err)?;
        Ok(to_json(&self.inner.labels_json(&labels)))
    }

    /// Whether two subspaces have isomorphic restriction lattices.
    fn restrictions_isomorphic(
        &self,
        u: &Bound<'_, PyAny>,
        v: &Bound<'_, PyAny>,
    ) -> PyResult<bool> {
        let a = self.inner.arrangement();
        let u = subspace_from_py(a.ambient_dim(), u)?;
        let v = subspace_from_py(a.ambient_dim(), v)?;
        let lu = gs::restriction_lattice(a, &u).map_err(py_err)?;
        let lv = gs::restriction_lattice(a, &v).map_err(py_err)?;
        gs::lattice_isomorphic(&lu, &lv).map_err(py_err)
    }
}

/// Seeded random k-subspace of R^n with entries in [-bound, bound].
#[pyfunction]
fn sample_subspace(
    n: usize,
    k: usize,
    bound: u64,
    seed: u64,
    index: u64,
) -> PyResult<Vec<Vec<String>>> {
    Ok(rows_to_strings(
        &gs::sample_subspace(n, k, bound, seed, index).map_err(py_err)?,
    ))
}

/// Full verification report (as produced by `grstrata verify`), as JSON.
#[pyfunction]
#[pyo3(signature = (arrangement, k, samples, include_flats = true, seed = 0, bound = 3, jobs = 1))]
fn verify(
    arrangement: &PyArrangement,
    k: usize,
    samples: usize,
    include_flats: bool,
    seed: u64,
    bound: u64,
    jobs: usize,
) -> PyResult<String> {
    if bound == 0 {
        return Err(PyValueError::new_err("bound must be at least 1"));
    }
    let mut config = gs::cli::RunConfig::new(
        gs::cli::Command::Verify {
            k,
            samples,
            include_flats,
        },
        "<python>",
    );
    config.seed = seed;
    config.bound = bound;
    config.jobs = jobs;
    let report = gs::cli::verify_report(&config, &arrangement.inner, k, samples, include_flats)
        .map_err(py_err)?;
    Ok(to_json(&report))
}

#[pymodule(name = "grassmannian_strata")]
fn grassmannian_strata_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyArrangement>()?;
    m.add_class::<PyIntersectionLattice>()?;
    m.add_class::<PyStratifier>()?;
    m.add_function(wrap_pyfunction!(sample_subspace, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
