//! Python bindings: layers, coupled systems, spectra, predictions, sweeps.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use interlink::coupling::{CoupledSystem, Strategy};
use interlink::gen::{GenSpec, Model};
use interlink::metrics::partition_report;
use interlink::spectral::{fiedler_pair_with, full_spectrum, Solver, DEFAULT_TOL};
use interlink::sweep::{aggregate, aggregates_to_csv, records_to_csv, run_sweep, SweepConfig};
use interlink::theory::{
    layer_spectrum, meanfield_diagonal, meanfield_general, perturbation_estimate,
};

fn err(e: interlink::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_strategy(s: &str) -> PyResult<Strategy> {
    match s {
        "diagonal" => Ok(Strategy::Diagonal),
        "general" => Ok(Strategy::General),
        "mf-diagonal" => Ok(Strategy::MeanFieldDiagonal),
        "mf-general" => Ok(Strategy::MeanFieldGeneral),
        _ => Err(PyValueError::new_err(format!(
            "unknown strategy `{s}` (diagonal, general, mf-diagonal, mf-general)"
        ))),
    }
}

fn parse_solver(s: &str) -> PyResult<Solver> {
    match s {
        "dense" => Ok(Solver::Dense),
        "iterative" => Ok(Solver::Iterative),
        "auto" => Ok(Solver::Auto),
        _ => Err(PyValueError::new_err(format!("unknown solver `{s}`"))),
    }
}

/// An undirected simple graph used as the layer of a two-layer system.
#[pyclass(name = "Graph", from_py_object)]
#[derive(Clone)]
struct PyGraph {
    inner: interlink::Graph,
}

#[pymethods]
impl PyGraph {
    #[new]
    fn new(n: usize, edges: Vec<(usize, usize)>) -> PyResult<Self> {
        Ok(PyGraph {
            inner: interlink::Graph::new(n, edges).map_err(err)?,
        })
    }

    /// Generate a model graph: rr (n, k), ba (n, m), ws (n, k, p), la (side).
    #[staticmethod]
    #[pyo3(signature = (model, n=None, k=None, m=None, p=None, side=None, seed=0))]
    #[allow(clippy::too_many_arguments)]
    fn generate(
        model: &str,
        n: Option<usize>,
        k: Option<usize>,
        m: Option<usize>,
        p: Option<f64>,
        side: Option<usize>,
        seed: u64,
    ) -> PyResult<Self> {
        let model: Model = model.parse().map_err(err)?;
        let spec = GenSpec {
            model,
            n,
            k,
            m,
            p,
            side,
            seed,
        };
        Ok(PyGraph {
            inner: spec.generate().map_err(err)?,
        })
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        Ok(PyGraph {
            inner: interlink::Graph::load_edge_list(path).map_err(err)?,
        })
    }

    fn save(&self, path: &str) -> PyResult<()> {
        self.inner.save_edge_list(path).map_err(err)
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    fn edges(&self) -> Vec<(usize, usize)> {
        self.inner.edges().to_vec()
    }

    fn degrees(&self) -> Vec<usize> {
        self.inner.degrees()
    }

    fn is_connected(&self) -> bool {
        self.inner.is_connected()
    }

    /// Ascending Laplacian spectrum of the single layer.
    fn laplacian_spectrum(&self) -> PyResult<Vec<f64>> {
        layer_spectrum(&self.inner).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("Graph(n={}, edges={})", self.inner.n(), self.inner.edge_count())
    }
}

/// Two copies of a layer joined by interlinks; `Q = Q_A + alpha * Q_B`.
#[pyclass(name = "System", from_py_object)]
#[derive(Clone)]
struct PySystem {
    inner: CoupledSystem,
}

#[pymethods]
impl PySystem {
    /// Sample `count` interlinks of the given strategy (`diagonal` or
    /// `general`), or build the dense mean-field pattern (`mf-diagonal`,
    /// `mf-general`) where `count` is ignored.
    #[new]
    #[pyo3(signature = (layer, strategy, count=None, alpha=1.0, seed=0))]
    fn new(
        layer: PyGraph,
        strategy: &str,
        count: Option<usize>,
        alpha: f64,
        seed: u64,
    ) -> PyResult<Self> {
        let strategy = parse_strategy(strategy)?;
        let inner = match strategy {
            Strategy::MeanFieldDiagonal => CoupledSystem::mean_field_diagonal(layer.inner, alpha),
            Strategy::MeanFieldGeneral => CoupledSystem::mean_field_general(layer.inner, alpha),
            Strategy::Diagonal | Strategy::General => {
                let count = count
                    .ok_or_else(|| PyValueError::new_err("explicit strategies need `count`"))?;
                let sys = match strategy {
                    Strategy::Diagonal => CoupledSystem::diagonal(layer.inner, count, seed),
                    _ => CoupledSystem::general(layer.inner, count, seed),
                }
                .map_err(err)?;
                sys.with_alpha(alpha)
            }
        };
        Ok(PySystem { inner })
    }

    /// The same system with fixed interlinks and a given set of pairs.
    #[staticmethod]
    fn explicit(layer: PyGraph, strategy: &str, pairs: Vec<(usize, usize)>) -> PyResult<Self> {
        Ok(PySystem {
            inner: CoupledSystem::explicit(layer.inner, parse_strategy(strategy)?, pairs)
                .map_err(err)?,
        })
    }

    fn with_alpha(&self, alpha: f64) -> Self {
        PySystem {
            inner: self.inner.clone().with_alpha(alpha),
        }
    }

    #[getter]
    fn alpha(&self) -> f64 {
        self.inner.alpha()
    }

    #[getter]
    fn n1(&self) -> usize {
        self.inner.n1()
    }

    fn interlinks(&self) -> Vec<(usize, usize)> {
        self.inner.interlinks().pairs.clone()
    }

    /// Full ascending spectrum of the supra-Laplacian (dense solve).
    fn supra_spectrum(&self) -> PyResult<Vec<f64>> {
        Ok(full_spectrum(&self.inner.supra_laplacian())
            .map_err(err)?
            .eigenvalues)
    }

    /// `(mu, vector, gap, degenerate)` of the Fiedler pair.
    #[pyo3(signature = (solver="auto"))]
    fn fiedler(&self, solver: &str) -> PyResult<(f64, Vec<f64>, Option<f64>, bool)> {
        let f = fiedler_pair_with(
            &self.inner.supra_laplacian(),
            parse_solver(solver)?,
            DEFAULT_TOL,
        )
        .map_err(err)?;
        Ok((f.mu, f.vector, f.gap, f.degenerate))
    }

    /// Fiedler partition and quality metrics as a dict.
    #[pyo3(signature = (solver="auto"))]
    fn partition<'py>(&self, py: Python<'py>, solver: &str) -> PyResult<Bound<'py, PyDict>> {
        let f = fiedler_pair_with(
            &self.inner.supra_laplacian(),
            parse_solver(solver)?,
            DEFAULT_TOL,
        )
        .map_err(err)?;
        let rep = partition_report(&self.inner, &f);
        let d = PyDict::new(py);
        d.set_item("mu", f.mu)?;
        d.set_item("set_r", rep.set_r)?;
        d.set_item("set_s", rep.set_s)?;
        d.set_item("cut_size", rep.cut_size)?;
        d.set_item("interlink_cut_fraction", rep.interlink_cut_fraction)?;
        d.set_item("intralink_cut_fraction", rep.intralink_cut_fraction)?;
        d.set_item("angle", rep.angle)?;
        d.set_item("entropy", rep.entropy)?;
        d.set_item("degenerate", rep.degenerate)?;
        Ok(d)
    }

    /// First and second perturbation coefficients and the two variational
    /// upper bounds at `alpha`: `(mu1, mu2, bound0, bound1)`.
    fn perturbation(&self, alpha: f64) -> PyResult<(f64, f64, f64, f64)> {
        let est = perturbation_estimate(&self.inner).map_err(err)?;
        let (b0, b1) = est.bounds(alpha);
        Ok((est.mu1, est.mu2, b0, b1))
    }

    fn __repr__(&self) -> String {
        format!(
            "System(n1={}, strategy={}, alpha={})",
            self.inner.n1(),
            self.inner.interlinks().strategy.as_str(),
            self.inner.alpha()
        )
    }
}

/// Mean-field closed forms for one layer and strategy, as a dict with
/// `omega_fiedler`, `alpha_threshold`, `link_threshold`, and `mu(alpha)`
/// evaluated at the optional `alpha`.
#[pyfunction]
#[pyo3(signature = (layer, strategy, alpha=None))]
fn mean_field<'py>(
    py: Python<'py>,
    layer: &PyGraph,
    strategy: &str,
    alpha: Option<f64>,
) -> PyResult<Bound<'py, PyDict>> {
    let omega = layer_spectrum(&layer.inner).map_err(err)?;
    let pred = match parse_strategy(strategy)? {
        Strategy::Diagonal | Strategy::MeanFieldDiagonal => meanfield_diagonal(&omega),
        _ => meanfield_general(&omega),
    }
    .map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("omega_fiedler", pred.omega_fiedler())?;
    d.set_item("alpha_threshold", pred.alpha_threshold)?;
    d.set_item("link_threshold", pred.link_threshold)?;
    if let Some(a) = alpha {
        d.set_item("mu", pred.mu_at(a))?;
    }
    Ok(d)
}

/// Run a sweep from a JSON config string; returns `(records_csv,
/// aggregates_csv)`.
#[pyfunction]
fn sweep(config_json: &str) -> PyResult<(String, String)> {
    let cfg = SweepConfig::from_json(config_json).map_err(err)?;
    let records = run_sweep(&cfg).map_err(err)?;
    let aggregates = aggregate(&records);
    Ok((records_to_csv(&records), aggregates_to_csv(&aggregates)))
}

#[pymodule]
fn interlink_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_class::<PySystem>()?;
    m.add_function(wrap_pyfunction!(mean_field, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    Ok(())
}
