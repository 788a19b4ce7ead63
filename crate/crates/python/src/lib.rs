use std::collections::BTreeMap;

use pyo3::exceptions::{PyIOError, PyIndexError, PyTypeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyBool, PyDict, PyFloat, PyInt, PyString};

use matgraph::bench;
use matgraph::cypher;
use matgraph::exec::{self, Cell};
use matgraph::khop::{self, KHopMode, KHopQuery};
use matgraph::plan;
use matgraph::server::{handle_request, GraphRegistry};
use matgraph::snapshot;
use matgraph::{Properties, PropertyGraph, PropertyValue};

fn to_value(ob: &Bound<'_, PyAny>) -> PyResult<PropertyValue> {
    // bool first: Python bools are ints too
    if ob.is_instance_of::<PyBool>() {
        Ok(PropertyValue::Bool(ob.extract()?))
    } else if ob.is_instance_of::<PyInt>() {
        Ok(PropertyValue::Int(ob.extract()?))
    } else if ob.is_instance_of::<PyFloat>() {
        Ok(PropertyValue::Float(ob.extract()?))
    } else if ob.is_instance_of::<PyString>() {
        Ok(PropertyValue::Str(ob.extract()?))
    } else {
        Err(PyTypeError::new_err("property values must be int, float, bool or str"))
    }
}

fn to_props(dict: Option<&Bound<'_, PyDict>>) -> PyResult<Properties> {
    let mut props = BTreeMap::new();
    if let Some(dict) = dict {
        for (k, v) in dict.iter() {
            props.insert(k.extract::<String>()?, to_value(&v)?);
        }
    }
    Ok(props)
}

fn value_to_py<'py>(py: Python<'py>, v: &PropertyValue) -> PyResult<Bound<'py, PyAny>> {
    Ok(match v {
        PropertyValue::Int(i) => i.into_pyobject(py)?.into_any(),
        PropertyValue::Float(f) => f.into_pyobject(py)?.into_any(),
        PropertyValue::Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        PropertyValue::Str(s) => s.into_pyobject(py)?.into_any(),
    })
}

fn props_to_py<'py>(py: Python<'py>, props: &Properties) -> PyResult<Bound<'py, PyDict>> {
    let dict = PyDict::new(py);
    for (k, v) in props {
        dict.set_item(k, value_to_py(py, v)?)?;
    }
    Ok(dict)
}

type Rows<'py> = Vec<Vec<Bound<'py, PyAny>>>;

fn parse_mode(mode: &str) -> PyResult<KHopMode> {
    mode.parse().map_err(PyValueError::new_err)
}

/// In-memory property graph.
#[pyclass(name = "Graph", module = "pymatgraph")]
struct PyGraph {
    inner: PropertyGraph,
}

#[pymethods]
impl PyGraph {
    #[new]
    fn new() -> Self {
        PyGraph {
            inner: PropertyGraph::new(),
        }
    }

    #[pyo3(signature = (labels=Vec::new(), props=None))]
    fn create_node(&mut self, labels: Vec<String>, props: Option<&Bound<'_, PyDict>>) -> PyResult<usize> {
        Ok(self.inner.create_node(&labels, to_props(props)?))
    }

    #[pyo3(signature = (src, relation, dst, props=None))]
    fn create_edge(
        &mut self,
        src: usize,
        relation: &str,
        dst: usize,
        props: Option<&Bound<'_, PyDict>>,
    ) -> PyResult<()> {
        self.inner
            .create_edge(src, relation, dst, to_props(props)?)
            .map_err(|e| PyIndexError::new_err(e.to_string()))?;
        self.inner.flush();
        Ok(())
    }

    #[getter]
    fn node_count(&self) -> usize {
        self.inner.node_count()
    }

    #[getter]
    fn edge_count(&self) -> usize {
        self.inner.edge_record_count()
    }

    fn node_labels(&self, id: usize) -> Vec<String> {
        self.inner.node_labels(id).into_iter().map(String::from).collect()
    }

    fn node_properties<'py>(&self, py: Python<'py>, id: usize) -> PyResult<Bound<'py, PyDict>> {
        match self.inner.node_properties(id) {
            Some(p) => props_to_py(py, p),
            None => Err(PyIndexError::new_err(format!("unknown node {id}"))),
        }
    }

    /// Runs a Cypher query. Returns `(columns, rows)`; node cells are
    /// node ids, missing properties are `None`.
    fn query<'py>(&mut self, py: Python<'py>, text: &str) -> PyResult<(Vec<String>, Rows<'py>)> {
        let ast = cypher::parse(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        let plan = plan::plan(&ast, &self.inner).map_err(|e| PyValueError::new_err(e.to_string()))?;
        let table = if plan.is_write() {
            exec::execute_mut(&plan, &mut self.inner)
        } else {
            exec::execute(&plan, &self.inner)
        }
        .map_err(|e| PyValueError::new_err(e.to_string()))?;
        let rows = table
            .rows
            .iter()
            .map(|row| {
                row.iter()
                    .map(|cell| match cell {
                        Cell::Node(id) => Ok(id.into_pyobject(py)?.into_any()),
                        Cell::Value(v) => value_to_py(py, v),
                        Cell::Null => Ok(py.None().into_bound(py)),
                    })
                    .collect::<PyResult<Vec<_>>>()
            })
            .collect::<PyResult<Vec<_>>>()?;
        Ok((table.columns, rows))
    }

    /// Text of the physical plan for a query.
    fn explain(&self, text: &str) -> PyResult<String> {
        let ast = cypher::parse(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        let plan = plan::plan(&ast, &self.inner).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(plan.to_string())
    }

    #[pyo3(signature = (seed, k, mode="exact", relation=None))]
    fn k_hop_count(&self, seed: usize, k: usize, mode: &str, relation: Option<String>) -> PyResult<usize> {
        let mut q = KHopQuery::new(seed, k, parse_mode(mode)?);
        q.relation = relation;
        khop::k_hop_count(&self.inner, &q).map_err(|e| PyValueError::new_err(e.to_string()))
    }

    #[pyo3(signature = (seed, k, mode="exact"))]
    fn bfs_oracle(&self, seed: usize, k: usize, mode: &str) -> PyResult<usize> {
        if !self.inner.contains_node(seed) {
            return Err(PyIndexError::new_err(format!("unknown node {seed}")));
        }
        Ok(bench::bfs_oracle(&self.inner, seed, k, parse_mode(mode)?))
    }

    fn save(&self, path: &str) -> PyResult<()> {
        snapshot::save(&self.inner, path).map_err(|e| PyIOError::new_err(e.to_string()))
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        snapshot::load(path)
            .map(|inner| PyGraph { inner })
            .map_err(|e| PyIOError::new_err(e.to_string()))
    }

    fn to_snapshot(&self) -> String {
        snapshot::to_string(&self.inner)
    }

    #[staticmethod]
    fn from_snapshot(text: &str) -> PyResult<Self> {
        snapshot::parse(text)
            .map(|inner| PyGraph { inner })
            .map_err(|e| PyValueError::new_err(e.to_string()))
    }

    #[staticmethod]
    fn from_edges(n: usize, edges: Vec<(usize, usize)>) -> PyResult<Self> {
        if let Some(&(s, d)) = edges.iter().find(|&&(s, d)| s >= n || d >= n) {
            return Err(PyIndexError::new_err(format!("edge ({s}, {d}) outside {n} vertices")));
        }
        Ok(PyGraph {
            inner: bench::graph_from_edges(n, &edges),
        })
    }

    fn __eq__(&self, other: &PyGraph) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!(
            "Graph(nodes={}, edges={})",
            self.inner.node_count(),
            self.inner.edge_record_count()
        )
    }
}

/// Named graphs behind the line protocol.
#[pyclass(name = "Registry", module = "pymatgraph")]
struct PyRegistry {
    inner: GraphRegistry,
}

#[pymethods]
impl PyRegistry {
    #[new]
    fn new() -> Self {
        PyRegistry {
            inner: GraphRegistry::new(),
        }
    }

    fn handle_request(&self, line: &str) -> String {
        handle_request(line, &self.inner).text
    }

    fn names(&self) -> Vec<String> {
        self.inner.names()
    }
}

/// Parses a query and returns its canonical text.
#[pyfunction]
fn parse(text: &str) -> PyResult<String> {
    cypher::parse(text)
        .map(|q| cypher::pretty_print(&q))
        .map_err(|e| PyValueError::new_err(e.to_string()))
}

#[pyfunction]
#[pyo3(signature = (scale, edge_factor=16, rng_seed=1))]
fn rmat(scale: u32, edge_factor: usize, rng_seed: u64) -> PyResult<Vec<(usize, usize)>> {
    bench::rmat_generate(&bench::RmatParams::new(scale, edge_factor, rng_seed))
        .map_err(|e| PyValueError::new_err(e.to_string()))
}

#[pymodule]
fn pymatgraph(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_class::<PyRegistry>()?;
    m.add_function(wrap_pyfunction!(parse, m)?)?;
    m.add_function(wrap_pyfunction!(rmat, m)?)?;
    Ok(())
}
