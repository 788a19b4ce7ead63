//! Property graph on top of boolean adjacency matrices.
//!
//! Each relation type owns one `capacity x capacity` matrix, and a union
//! matrix over all types answers untyped patterns. Edge insertions go to a
//! pending-tuple buffer that is merged into the matrix the next time the
//! matrix is read.
//!
//! The graph is not a concurrent data structure. Writes take `&mut self`;
//! reads take `&self` and may run concurrently with other reads. Callers
//! sharing a graph across threads must hold a reader-writer guard around it.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use parking_lot::Mutex;
use thiserror::Error;

use crate::sparse::{BitVector, SparseMatrix};
use crate::value::{Properties, ValueType};

pub type NodeId = usize;

const INITIAL_CAPACITY: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("unknown node id {0}")]
    UnknownNode(NodeId),
}

/// Selects one relation type, or the union of all of them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation<'a> {
    Any,
    Named(&'a str),
}

impl<'a> From<Option<&'a str>> for Relation<'a> {
    fn from(name: Option<&'a str>) -> Self {
        name.map_or(Relation::Any, Relation::Named)
    }
}

#[derive(Clone)]
struct CellState {
    matrix: Arc<SparseMatrix>,
    pending: Vec<(NodeId, NodeId)>,
    transposed: Option<Arc<SparseMatrix>>,
}

/// An adjacency matrix plus its pending tuples and cached transpose.
struct MatrixCell {
    state: Mutex<CellState>,
}

impl Clone for MatrixCell {
    fn clone(&self) -> Self {
        MatrixCell {
            state: Mutex::new(self.state.lock().clone()),
        }
    }
}

impl MatrixCell {
    fn new(capacity: usize) -> Self {
        MatrixCell {
            state: Mutex::new(CellState {
                matrix: Arc::new(SparseMatrix::empty(capacity, capacity)),
                pending: Vec::new(),
                transposed: None,
            }),
        }
    }

    fn push(&mut self, src: NodeId, dst: NodeId) {
        let state = self.state.get_mut();
        state.pending.push((src, dst));
        state.transposed = None;
    }

    fn grow(&mut self, capacity: usize) {
        let state = self.state.get_mut();
        state.matrix = Arc::new(state.matrix.resize(capacity, capacity));
        state.transposed = None;
    }

    fn flush(state: &mut CellState) {
        if state.pending.is_empty() {
            return;
        }
        let n = state.matrix.nrows();
        let added = SparseMatrix::build(n, n, &state.pending)
            .expect("pending tuples are bounds-checked on insertion");
        state.matrix = Arc::new(
            state
                .matrix
                .union_pattern(&added)
                .expect("pending matrix shares the cell shape"),
        );
        state.pending.clear();
        state.transposed = None;
    }

    fn matrix(&self) -> Arc<SparseMatrix> {
        let mut state = self.state.lock();
        Self::flush(&mut state);
        Arc::clone(&state.matrix)
    }

    fn transposed(&self) -> Arc<SparseMatrix> {
        let mut state = self.state.lock();
        Self::flush(&mut state);
        if state.transposed.is_none() {
            state.transposed = Some(Arc::new(state.matrix.transpose()));
        }
        Arc::clone(state.transposed.as_ref().unwrap())
    }
}

/// Interned names with dense ids.
#[derive(Default, Clone)]
struct Names {
    names: Vec<String>,
    index: HashMap<String, u32>,
}

impl Names {
    fn intern(&mut self, name: &str) -> (u32, bool) {
        if let Some(&id) = self.index.get(name) {
            return (id, false);
        }
        let id = self.names.len() as u32;
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), id);
        (id, true)
    }

    fn get(&self, name: &str) -> Option<u32> {
        self.index.get(name).copied()
    }

    fn name(&self, id: u32) -> &str {
        &self.names[id as usize]
    }
}

/// One stored edge record as seen through the property table.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeRecord<'a> {
    pub src: NodeId,
    pub relation: &'a str,
    pub dst: NodeId,
    pub props: &'a Properties,
}

#[derive(Clone)]
pub struct PropertyGraph {
    capacity: usize,
    node_labels: Vec<Vec<u32>>,
    node_props: Vec<Properties>,
    label_names: Names,
    labels: Vec<BitVector>,
    relation_names: Names,
    relations: Vec<MatrixCell>,
    any: MatrixCell,
    edges: BTreeMap<(NodeId, u32, NodeId), Properties>,
    prop_types: BTreeMap<String, BTreeSet<ValueType>>,
}

impl Default for PropertyGraph {
    fn default() -> Self {
        Self::new()
    }
}

impl std::fmt::Debug for PropertyGraph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PropertyGraph")
            .field("capacity", &self.capacity)
            .field("node_count", &self.node_count())
            .field("edge_records", &self.edges.len())
            .field("labels", &self.label_names.names)
            .field("relations", &self.relation_names.names)
            .finish()
    }
}

impl PropertyGraph {
    pub fn new() -> Self {
        Self::with_capacity(INITIAL_CAPACITY)
    }

    pub fn with_capacity(capacity: usize) -> Self {
        let capacity = capacity.max(1);
        PropertyGraph {
            capacity,
            node_labels: Vec::new(),
            node_props: Vec::new(),
            label_names: Names::default(),
            labels: Vec::new(),
            relation_names: Names::default(),
            relations: Vec::new(),
            any: MatrixCell::new(capacity),
            edges: BTreeMap::new(),
            prop_types: BTreeMap::new(),
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn node_count(&self) -> usize {
        self.node_props.len()
    }

    pub fn edge_record_count(&self) -> usize {
        self.edges.len()
    }

    fn grow(&mut self) {
        let capacity = self.capacity * 2;
        self.capacity = capacity;
        for v in &mut self.labels {
            v.grow(capacity);
        }
        for cell in &mut self.relations {
            cell.grow(capacity);
        }
        self.any.grow(capacity);
    }

    pub fn create_node<S: AsRef<str>>(&mut self, labels: &[S], props: Properties) -> NodeId {
        let id = self.node_count();
        if id == self.capacity {
            self.grow();
        }
        let mut ids: Vec<u32> = Vec::with_capacity(labels.len());
        for label in labels {
            let (lid, fresh) = self.label_names.intern(label.as_ref());
            if fresh {
                self.labels.push(BitVector::empty(self.capacity));
            }
            if !ids.contains(&lid) {
                ids.push(lid);
                self.labels[lid as usize].push(id);
            }
        }
        for (key, value) in &props {
            self.prop_types
                .entry(key.clone())
                .or_default()
                .insert(value.value_type());
        }
        self.node_labels.push(ids);
        self.node_props.push(props);
        id
    }

    /// Adds a directed edge. A repeated `(src, relation, dst)` leaves the
    /// matrices unchanged and replaces the edge's properties.
    pub fn create_edge(
        &mut self,
        src: NodeId,
        relation: &str,
        dst: NodeId,
        props: Properties,
    ) -> Result<(), GraphError> {
        for id in [src, dst] {
            if id >= self.node_count() {
                return Err(GraphError::UnknownNode(id));
            }
        }
        let (rid, fresh) = self.relation_names.intern(relation);
        if fresh {
            self.relations.push(MatrixCell::new(self.capacity));
        }
        self.relations[rid as usize].push(src, dst);
        self.any.push(src, dst);
        self.edges.insert((src, rid, dst), props);
        Ok(())
    }

    /// Merges all pending tuples into their matrices.
    pub fn flush(&mut self) {
        for cell in self.relations.iter_mut().chain(std::iter::once(&mut self.any)) {
            MatrixCell::flush(cell.state.get_mut());
        }
    }

    fn cell(&self, relation: Relation<'_>) -> Option<&MatrixCell> {
        match relation {
            Relation::Any => Some(&self.any),
            Relation::Named(name) => self
                .relation_names
                .get(name)
                .map(|id| &self.relations[id as usize]),
        }
    }

    /// Current adjacency matrix for a relation type (or the union matrix).
    /// Unknown relation types read as the empty matrix.
    pub fn relation_matrix(&self, relation: Relation<'_>) -> Arc<SparseMatrix> {
        match self.cell(relation) {
            Some(cell) => cell.matrix(),
            None => Arc::new(SparseMatrix::empty(self.capacity, self.capacity)),
        }
    }

    /// Transpose of [`relation_matrix`](Self::relation_matrix), cached until
    /// the next write to that relation.
    pub fn transposed_relation_matrix(&self, relation: Relation<'_>) -> Arc<SparseMatrix> {
        match self.cell(relation) {
            Some(cell) => cell.transposed(),
            None => Arc::new(SparseMatrix::empty(self.capacity, self.capacity)),
        }
    }

    /// Members of a label; empty for unknown labels.
    pub fn label_vector(&self, label: &str) -> BitVector {
        match self.label_names.get(label) {
            Some(id) => self.labels[id as usize].clone(),
            None => BitVector::empty(self.capacity),
        }
    }

    /// Every allocated node id.
    pub fn all_nodes(&self) -> BitVector {
        BitVector::from_sorted_unchecked(self.capacity, (0..self.node_count()).collect())
    }

    pub fn has_label(&self, id: NodeId, label: &str) -> bool {
        match (self.label_names.get(label), self.node_labels.get(id)) {
            (Some(lid), Some(ids)) => ids.contains(&lid),
            _ => false,
        }
    }

    pub fn contains_node(&self, id: NodeId) -> bool {
        id < self.node_count()
    }

    pub fn node_properties(&self, id: NodeId) -> Option<&Properties> {
        self.node_props.get(id)
    }

    pub fn node_labels(&self, id: NodeId) -> Vec<&str> {
        self.node_labels
            .get(id)
            .map(|ids| ids.iter().map(|&l| self.label_names.name(l)).collect())
            .unwrap_or_default()
    }

    pub fn edge_properties(&self, src: NodeId, relation: &str, dst: NodeId) -> Option<&Properties> {
        let rid = self.relation_names.get(relation)?;
        self.edges.get(&(src, rid, dst))
    }

    /// Edge records ordered by `(src, relation name, dst)`.
    pub fn edge_records(&self) -> Vec<EdgeRecord<'_>> {
        let mut out: Vec<_> = self
            .edges
            .iter()
            .map(|(&(src, rid, dst), props)| EdgeRecord {
                src,
                relation: self.relation_names.name(rid),
                dst,
                props,
            })
            .collect();
        out.sort_by(|a, b| (a.src, a.relation, a.dst).cmp(&(b.src, b.relation, b.dst)));
        out
    }

    pub fn label_names(&self) -> &[String] {
        &self.label_names.names
    }

    pub fn relation_names(&self) -> &[String] {
        &self.relation_names.names
    }

    /// Value types observed for a node property key.
    pub fn property_types(&self, key: &str) -> Option<&BTreeSet<ValueType>> {
        self.prop_types.get(key)
    }

    pub fn out_degree(&self, id: NodeId, relation: Relation<'_>) -> usize {
        if !self.contains_node(id) {
            return 0;
        }
        self.relation_matrix(relation).out_degree(id)
    }

    /// Verifies the structural invariants, flushing pending tuples first.
    pub fn check_invariants(&self) -> Result<(), String> {
        let n = self.node_count();
        if n > self.capacity {
            return Err(format!("node_count {n} exceeds capacity {}", self.capacity));
        }
        for (i, v) in self.labels.iter().enumerate() {
            v.check_invariants()?;
            if v.dimension() != self.capacity {
                return Err(format!("label {i} has dimension {}", v.dimension()));
            }
            if v.iter().any(|id| id >= n) {
                return Err(format!("label {i} references unallocated node"));
            }
        }
        let any = self.relation_matrix(Relation::Any);
        let mut union = SparseMatrix::empty(self.capacity, self.capacity);
        for name in self.relation_names() {
            let m = self.relation_matrix(Relation::Named(name));
            m.check_invariants()?;
            if m.nrows() != self.capacity || m.ncols() != self.capacity {
                return Err(format!("relation {name} has wrong shape"));
            }
            if m.iter_pattern().any(|(r, c)| r >= n || c >= n) {
                return Err(format!("relation {name} has an edge to an unallocated node"));
            }
            union = union.union_pattern(&m).map_err(|e| e.to_string())?;
        }
        any.check_invariants()?;
        if any.extract_tuples() != union.extract_tuples() {
            return Err("any-relation matrix differs from the union of relations".into());
        }
        Ok(())
    }
}

impl PartialEq for PropertyGraph {
    /// Same node ids, labels, properties, and edge records. Capacity and
    /// interning order are not compared.
    fn eq(&self, other: &Self) -> bool {
        if self.node_count() != other.node_count() || self.node_props != other.node_props {
            return false;
        }
        let labels_match = (0..self.node_count()).all(|id| {
            let mut a = self.node_labels(id);
            let mut b = other.node_labels(id);
            a.sort_unstable();
            b.sort_unstable();
            a == b
        });
        labels_match && self.edge_records() == other.edge_records()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::value::PropertyValue;

    fn props(pairs: &[(&str, PropertyValue)]) -> Properties {
        pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
    }

    #[test]
    fn first_ids_are_dense() {
        let mut g = PropertyGraph::new();
        assert_eq!(g.create_node(&["Person"], props(&[("name", "ann".into())])), 0);
        assert_eq!(g.create_node::<&str>(&[], Properties::new()), 1);
        assert_eq!(g.node_count(), 2);
    }

    #[test]
    fn label_counts_follow_creation_log() {
        let mut g = PropertyGraph::new();
        let mut expected = 0;
        for i in 0..100 {
            if i % 3 == 0 {
                g.create_node(&["Person"], Properties::new());
                expected += 1;
            } else {
                g.create_node(&["Thing"], Properties::new());
            }
        }
        assert_eq!(g.label_vector("Person").nvals(), expected);
        assert_eq!(g.label_vector("Nope").nvals(), 0);
        assert_eq!(g.label_vector("Nope").dimension(), g.capacity());
        assert!(g.capacity() >= 100);
        g.check_invariants().unwrap();
    }

    #[test]
    fn edges_and_union_matrix() {
        let mut g = PropertyGraph::new();
        for _ in 0..3 {
            g.create_node::<&str>(&[], Properties::new());
        }
        g.create_edge(0, "KNOWS", 1, Properties::new()).unwrap();
        assert_eq!(g.relation_matrix(Relation::Named("KNOWS")).nvals(), 1);
        assert!(g.relation_matrix(Relation::Named("KNOWS")).contains(0, 1));

        g.create_edge(0, "KNOWS", 1, props(&[("w", 2i64.into())])).unwrap();
        assert_eq!(g.relation_matrix(Relation::Named("KNOWS")).nvals(), 1);
        assert_eq!(
            g.edge_properties(0, "KNOWS", 1).unwrap().get("w"),
            Some(&PropertyValue::Int(2))
        );

        g.create_edge(0, "LIKES", 1, Properties::new()).unwrap();
        g.create_edge(1, "LIKES", 2, Properties::new()).unwrap();
        assert!(g.relation_matrix(Relation::Named("LIKES")).contains(0, 1));
        assert_eq!(g.relation_matrix(Relation::Any).nvals(), 2);
        g.check_invariants().unwrap();
    }

    #[test]
    fn unknown_relation_and_node() {
        let mut g = PropertyGraph::new();
        let m = g.relation_matrix(Relation::Named("X"));
        assert_eq!((m.nrows(), m.nvals()), (16, 0));
        assert_eq!(g.create_edge(0, "R", 1, Properties::new()), Err(GraphError::UnknownNode(0)));
    }

    #[test]
    fn growth_keeps_edges() {
        let mut g = PropertyGraph::with_capacity(2);
        let a = g.create_node(&["A"], Properties::new());
        let b = g.create_node(&["A"], Properties::new());
        g.create_edge(a, "R", b, Properties::new()).unwrap();
        assert_eq!(g.relation_matrix(Relation::Named("R")).nrows(), 2);
        for _ in 0..5 {
            g.create_node(&["A"], Properties::new());
        }
        assert_eq!(g.capacity(), 8);
        let m = g.relation_matrix(Relation::Named("R"));
        assert_eq!(m.nrows(), 8);
        assert!(m.contains(0, 1));
        g.create_edge(6, "R", 0, Properties::new()).unwrap();
        assert_eq!(g.transposed_relation_matrix(Relation::Named("R")).extract_tuples(), vec![(0, 6), (1, 0)]);
        g.check_invariants().unwrap();
    }

    #[test]
    fn reads_are_pure() {
        let mut g = PropertyGraph::new();
        g.create_node(&["L"], Properties::new());
        g.create_node(&["L"], Properties::new());
        g.create_edge(0, "R", 1, Properties::new()).unwrap();
        let first = g.relation_matrix(Relation::Any);
        let second = g.relation_matrix(Relation::Any);
        assert_eq!(*first, *second);
        assert_eq!(g.label_vector("L"), g.label_vector("L"));
    }

    #[test]
    fn transposed_cache_invalidated_by_write() {
        let mut g = PropertyGraph::new();
        for _ in 0..3 {
            g.create_node::<&str>(&[], Properties::new());
        }
        g.create_edge(0, "R", 1, Properties::new()).unwrap();
        assert_eq!(g.transposed_relation_matrix(Relation::Named("R")).extract_tuples(), vec![(1, 0)]);
        g.create_edge(1, "R", 2, Properties::new()).unwrap();
        assert_eq!(
            g.transposed_relation_matrix(Relation::Named("R")).extract_tuples(),
            vec![(1, 0), (2, 1)]
        );
    }
}
