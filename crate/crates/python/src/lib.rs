use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use mc_mosaic::config::{ClockAssignment, RngStream, StreamPurpose};
use mc_mosaic::surplus::SurplusVariant;
use mc_mosaic::Edge;

fn err(e: mc_mosaic::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<'py, T: serde::Serialize>(py: Python<'py>, v: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(v).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

type EdgeTuple = (usize, usize, f64, String);

fn edge_tuples<'a>(edges: impl Iterator<Item = &'a Edge>) -> Vec<EdgeTuple> {
    edges.map(|e| (e.source, e.target, e.q, e.kind.as_str().to_string())).collect()
}

#[pyclass(name = "WeightedConfig", frozen)]
pub struct PyConfig {
    inner: mc_mosaic::WeightedConfig,
}

#[pymethods]
impl PyConfig {
    #[new]
    fn new(masses: Vec<f64>) -> PyResult<Self> {
        Ok(Self {
            inner: mc_mosaic::WeightedConfig::new(masses).map_err(err)?,
        })
    }

    /// `n` masses equal to n^{-2/3}.
    #[staticmethod]
    fn critical_uniform(n: usize) -> PyResult<Self> {
        Ok(Self {
            inner: mc_mosaic::WeightedConfig::critical_uniform(n).map_err(err)?,
        })
    }

    #[getter]
    fn masses(&self) -> Vec<f64> {
        self.inner.masses().to_vec()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn sigma(&self, r: u32) -> PyResult<f64> {
        self.inner.sigma(r).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("WeightedConfig(len={})", self.inner.len())
    }
}

#[pyclass(name = "Trajectory", frozen)]
pub struct PyTrajectory {
    inner: mc_mosaic::Trajectory,
}

#[pymethods]
impl PyTrajectory {
    #[getter]
    fn q_max(&self) -> f64 {
        self.inner.q_max
    }

    /// Vertex labels in clock order.
    #[getter]
    fn order(&self) -> Vec<usize> {
        self.inner.ranked.vertex.clone()
    }

    /// `(time, left_first, left_last, right_first, right_last, edge_source, edge_target)` per merger.
    fn events(&self) -> Vec<(f64, usize, usize, usize, usize, usize, usize)> {
        self.inner
            .events
            .iter()
            .map(|e| (e.time, e.left.first, e.left.last, e.right.first, e.right.last, e.edge.0, e.edge.1))
            .collect()
    }

    fn partition_at(&self, q: f64) -> Vec<Vec<usize>> {
        self.inner.partition_at(q).blocks
    }

    fn f1_edges(&self) -> Vec<EdgeTuple> {
        edge_tuples(mc_mosaic::build_f1(&self.inner).edges.iter())
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }
}

/// Exponential clocks `xi` indexed by vertex.
#[pyfunction]
#[pyo3(signature = (config, seed, rep = 0))]
fn sample_clocks(config: &PyConfig, seed: u64, rep: u64) -> Vec<f64> {
    mc_mosaic::sample_clocks(&config.inner, RngStream::for_purpose(seed, StreamPurpose::Clocks, rep)).xi
}

/// Parents by vertex (None for roots) and component masses in exploration order.
#[pyfunction]
fn breadth_first_forest(config: &PyConfig, xi: Vec<f64>, q: f64) -> PyResult<(Vec<Option<usize>>, Vec<f64>)> {
    let clocks = ClockAssignment::from_xi(&config.inner, xi).map_err(err)?;
    let (forest, y) = mc_mosaic::breadth_first_forest(&config.inner, &clocks, q).map_err(err)?;
    Ok((forest.parent, y))
}

#[pyfunction]
#[pyo3(signature = (config, q_max, seed, rep = 0))]
fn run_trajectory(config: &PyConfig, q_max: f64, seed: u64, rep: u64) -> PyResult<PyTrajectory> {
    let clocks = mc_mosaic::sample_clocks(&config.inner, RngStream::for_purpose(seed, StreamPurpose::Clocks, rep));
    let mut rng = RngStream::for_purpose(seed, StreamPurpose::MergeEdges, rep).rng();
    let inner = mc_mosaic::run_trajectory(&config.inner, &clocks, &mut rng, q_max).map_err(err)?;
    Ok(PyTrajectory { inner })
}

/// Edges `(source, target, q, kind)` of the static graph at `q`.
#[pyfunction]
#[pyo3(signature = (config, xi, q, seed, rep = 0))]
fn static_surplus(config: &PyConfig, xi: Vec<f64>, q: f64, seed: u64, rep: u64) -> PyResult<Vec<EdgeTuple>> {
    let clocks = ClockAssignment::from_xi(&config.inner, xi).map_err(err)?;
    let mut rng = RngStream::for_purpose(seed, StreamPurpose::StaticSurplus, rep).rng();
    let g = mc_mosaic::surplus::static_graph(&config.inner, &clocks, q, &mut rng).map_err(err)?;
    Ok(edge_tuples(g.edges()))
}

/// Edges of the dynamic graph up to `q_max`; `variant` is "simple" or "multigraph".
#[pyfunction]
#[pyo3(signature = (trajectory, q_max, seed, variant = "simple", rep = 0))]
fn dynamic_surplus(
    trajectory: &PyTrajectory,
    q_max: f64,
    seed: u64,
    variant: &str,
    rep: u64,
) -> PyResult<Vec<EdgeTuple>> {
    let variant = match variant {
        "simple" => SurplusVariant::Simple,
        "multigraph" => SurplusVariant::Multigraph,
        other => return Err(PyValueError::new_err(format!("unknown variant `{other}`"))),
    };
    let mut rng = RngStream::for_purpose(seed, StreamPurpose::DynamicSurplus, rep).rng();
    let g = mc_mosaic::surplus::dynamic_surplus(&trajectory.inner, &mut rng, q_max, variant).map_err(err)?;
    Ok(edge_tuples(g.graph.edges()))
}

/// Ornamented excursions at `q` as dictionaries.
#[pyfunction]
fn build_mosaic<'py>(py: Python<'py>, trajectory: &PyTrajectory, q: f64) -> PyResult<Bound<'py, PyAny>> {
    let m = mc_mosaic::mosaic::build_mosaic(&trajectory.inner, q).map_err(err)?;
    for exc in &m {
        if let Err(report) = mc_mosaic::mosaic::validate(exc) {
            return Err(PyValueError::new_err(report.to_string()));
        }
    }
    to_py(py, &m)
}

#[pyfunction]
fn sigma(config: &PyConfig, r: u32) -> PyResult<f64> {
    config.inner.sigma(r).map_err(err)
}

/// Law of the sorted component sizes for `n` unit vertices and edge probability `p`.
#[pyfunction]
fn exact_partition_law<'py>(py: Python<'py>, n: usize, p: f64) -> PyResult<Bound<'py, PyDict>> {
    let law = mc_mosaic::oracle::exact_partition_law(n, p).map_err(err)?;
    let d = PyDict::new(py);
    for (shape, prob) in law {
        d.set_item(pyo3::types::PyTuple::new(py, shape)?, prob)?;
    }
    Ok(d)
}

#[pymodule]
fn mcmosaic(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyConfig>()?;
    m.add_class::<PyTrajectory>()?;
    m.add_function(wrap_pyfunction!(sample_clocks, m)?)?;
    m.add_function(wrap_pyfunction!(breadth_first_forest, m)?)?;
    m.add_function(wrap_pyfunction!(run_trajectory, m)?)?;
    m.add_function(wrap_pyfunction!(static_surplus, m)?)?;
    m.add_function(wrap_pyfunction!(dynamic_surplus, m)?)?;
    m.add_function(wrap_pyfunction!(build_mosaic, m)?)?;
    m.add_function(wrap_pyfunction!(sigma, m)?)?;
    m.add_function(wrap_pyfunction!(exact_partition_law, m)?)?;
    Ok(())
}
