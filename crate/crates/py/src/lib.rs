//! Python bindings: `adhm_lab.Datum` plus module-level constructors and the
//! acceptance runner. Structured results come back as plain dicts.

use adhm_core::datum::{AdhmDatum, DimVector, GenerationStyle, MATRIX_KEYS};
use adhm_core::deformation::{build_complex, cohomology_dims, stabilizer_dim, Variant};
use adhm_core::geometry::{self, FlowOptions, OmegaOptions};
use adhm_core::linalg::DEFAULT_RTOL;
use adhm_core::moduli_maps::{self, PointConfiguration};
use adhm_core::{acceptance, CMat, EnhancedDatum, C64};
use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use pyo3::types::PyDict;
use serde_json::Value;

create_exception!(adhm_lab, AdhmError, PyException);

fn err(e: adhm_core::Error) -> PyErr {
    AdhmError::new_err(e.to_string())
}

fn to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (v.to_string(),))
}

fn rows(m: &CMat) -> Vec<Vec<C64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

/// `(x, y, multiplicity)` triples.
type PointList = Vec<(C64, C64, usize)>;

fn points(pts: &PointConfiguration) -> PointList {
    pts.points.iter().map(|p| (p.x, p.y, p.mult)).collect()
}

fn reduced(coords: Vec<(C64, C64)>) -> PointConfiguration {
    PointConfiguration::reduced(&coords)
}

/// An enhanced ADHM datum `(A, B, I, J, A', B', F, G)`.
#[pyclass(name = "Datum", module = "adhm_lab", frozen)]
struct PyDatum {
    inner: EnhancedDatum,
}

#[pymethods]
impl PyDatum {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        EnhancedDatum::from_json_str(text).map(|inner| PyDatum { inner }).map_err(err)
    }

    fn to_json(&self) -> String {
        self.inner.to_json_string()
    }

    /// `(r, c, c')`.
    #[getter]
    fn dims(&self) -> (usize, usize, usize) {
        let d = self.inner.dims();
        (d.r, d.c, d.cprime)
    }

    /// Matrix by key: one of A, B, I, J, Aprime, Bprime, F, G.
    fn matrix(&self, key: &str) -> PyResult<Vec<Vec<C64>>> {
        let m = self.inner.maps();
        let found = match key {
            "A" => &m.a,
            "B" => &m.b,
            "I" => &m.i,
            "J" => &m.j,
            "Aprime" => &m.aprime,
            "Bprime" => &m.bprime,
            "F" => &m.f,
            "G" => &m.g,
            _ => {
                return Err(AdhmError::new_err(format!(
                    "unknown matrix {key:?}, expected one of {MATRIX_KEYS:?}"
                )))
            }
        };
        Ok(rows(found))
    }

    /// The nine equation residuals by name.
    fn residuals(&self) -> Vec<(&'static str, f64)> {
        self.inner.residuals().iter().collect()
    }

    #[pyo3(signature = (tau = adhm_core::datum::DEFAULT_TAU))]
    fn is_valid(&self, tau: f64) -> bool {
        self.inner.is_valid(tau)
    }

    fn stability<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let report = adhm_core::is_stable(&self.inner);
        to_py(py, &serde_json::to_value(report).expect("report serializes"))
    }

    fn is_stable(&self) -> bool {
        adhm_core::is_stable(&self.inner).is_stable()
    }

    #[pyo3(signature = (variant = "reduced", rtol = DEFAULT_RTOL))]
    fn cohomology<'py>(&self, py: Python<'py>, variant: &str, rtol: f64) -> PyResult<Bound<'py, PyAny>> {
        let variant: Variant = variant.parse().map_err(err)?;
        let k = build_complex(&self.inner, variant).map_err(err)?;
        to_py(py, &serde_json::to_value(cohomology_dims(&k, rtol)).expect("report serializes"))
    }

    fn stabilizer_dim(&self) -> usize {
        stabilizer_dim(&self.inner)
    }

    /// The induced ADHM datum on `V / Im F`, as JSON.
    fn quotient(&self) -> PyResult<String> {
        let q = moduli_maps::quotient_rep(&self.inner).map_err(err)?;
        Ok(q.to_json().to_string())
    }

    /// Support of the quotient sheaf as `(x, y, multiplicity)` triples.
    fn support(&self) -> PyResult<PointList> {
        moduli_maps::quotient_support(&self.inner).map(|p| points(&p)).map_err(err)
    }

    /// `(Z1, Z2)` for an `r = 1` datum.
    fn nested_points(&self) -> PyResult<(PointList, PointList)> {
        let (z1, z2) = moduli_maps::nested_hilbert_points(&self.inner).map_err(err)?;
        Ok((points(&z1.sorted()), points(&z2.sorted())))
    }

    /// Norms of the real and complex moment maps.
    fn moment_norms(&self) -> (f64, f64) {
        let mu = geometry::moment_map(&self.inner);
        (mu.real_norm(), mu.complex_norm())
    }

    /// Runs the balancing flow; returns the balanced datum and a summary.
    #[pyo3(signature = (tol = 1e-8, max_iters = 100_000))]
    fn balance<'py>(&self, py: Python<'py>, tol: f64, max_iters: usize) -> PyResult<(PyDatum, Bound<'py, PyDict>)> {
        let mut opts = FlowOptions::new(self.inner.dims());
        opts.tol = tol;
        opts.max_iters = max_iters;
        let out = py.detach(|| geometry::balance_flow(&self.inner, &opts));
        let summary = PyDict::new(py);
        summary.set_item("iterations", out.iterations)?;
        summary.set_item("converged", out.converged)?;
        summary.set_item("initial_norm", out.initial_norm)?;
        summary.set_item("final_norm", out.final_norm)?;
        summary.set_item("monotone", out.is_monotone())?;
        Ok((PyDatum { inner: out.datum }, summary))
    }

    fn ambient_dim(&self) -> (i64, i64) {
        let a = geometry::ambient_tangent_dim(&self.inner, DEFAULT_RTOL);
        (a.value, a.expected)
    }

    #[pyo3(signature = (samples = 100, seed = 0))]
    fn omega<'py>(&self, py: Python<'py>, samples: usize, seed: u64) -> PyResult<Bound<'py, PyAny>> {
        let opts = OmegaOptions {
            samples,
            seed,
            ..OmegaOptions::default()
        };
        let om = geometry::omega_on_h1(&self.inner, &opts).map_err(err)?;
        to_py(py, &om.to_json())
    }

    fn __repr__(&self) -> String {
        format!("Datum(dims={})", self.inner.dims())
    }
}

fn parse_dims(dims: (usize, usize, usize)) -> PyResult<DimVector> {
    DimVector::new(dims.0, dims.1, dims.2).map_err(err)
}

/// Seeded stable datum; `style` is diagonal, jordan, jordan-mixed or lifted.
#[pyfunction]
#[pyo3(signature = (dims, seed = 0, style = "diagonal"))]
fn generate(dims: (usize, usize, usize), seed: u64, style: &str) -> PyResult<PyDatum> {
    let style: GenerationStyle = style.parse().map_err(err)?;
    adhm_core::generate_stable(parse_dims(dims)?, seed, style)
        .map(|inner| PyDatum { inner })
        .map_err(err)
}

/// Lifts the plain ADHM datum in `adhm_json` with a seeded diagonal frame of size `cprime`.
#[pyfunction]
#[pyo3(signature = (adhm_json, cprime = 1, seed = 0))]
fn fiber_lift(adhm_json: &str, cprime: usize, seed: u64) -> PyResult<PyDatum> {
    let v: Value = serde_json::from_str(adhm_json).map_err(|e| err(e.into()))?;
    let x2 = AdhmDatum::from_json(&v).map_err(err)?;
    let frame = moduli_maps::vandermonde_frame(cprime, seed).map_err(err)?;
    moduli_maps::fiber_lift(&x2, &frame.aprime, &frame.bprime, seed)
        .map(|inner| PyDatum { inner })
        .map_err(err)
}

/// Datum of the nested pair `Z1 ⊆ Z2` given as lists of `(x, y)` points.
#[pyfunction]
fn nested_hilbert(z1: Vec<(C64, C64)>, z2: Vec<(C64, C64)>) -> PyResult<PyDatum> {
    moduli_maps::nested_hilbert_datum(&reduced(z1), &reduced(z2))
        .map(|inner| PyDatum { inner })
        .map_err(err)
}

/// Runs the acceptance suite; returns `(all_passed, rendered table)`.
#[pyfunction]
#[pyo3(signature = (seed = 0, criteria = None))]
fn run_acceptance(py: Python<'_>, seed: u64, criteria: Option<Vec<u8>>) -> (bool, String) {
    let report = py.detach(|| match criteria {
        Some(ids) => acceptance::run_selected(seed, &ids),
        None => acceptance::run(seed),
    });
    (report.all_passed(), report.render())
}

#[pymodule]
fn adhm_lab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDatum>()?;
    m.add("AdhmError", m.py().get_type::<AdhmError>())?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    m.add_function(wrap_pyfunction!(fiber_lift, m)?)?;
    m.add_function(wrap_pyfunction!(nested_hilbert, m)?)?;
    m.add_function(wrap_pyfunction!(run_acceptance, m)?)?;
    Ok(())
}
