//! Masked-BFS k-hop neighborhoods.
//!
//! Starting from `frontier = visited = {seed}`, each hop computes
//! `frontier <- frontier x A` under the complement of `visited`, then adds
//! the new frontier to `visited`. Frontiers are therefore disjoint and the
//! frontier after hop `k` holds exactly the vertices at shortest distance
//! `k` from the seed.

use thiserror::Error;

use crate::cypher::ast::Direction;
use crate::cypher::MAX_HOPS;
use crate::graph::{NodeId, PropertyGraph, Relation};
use crate::sparse::{ewise_union, vxm, BitVector, SparseMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KHopMode {
    /// Vertices at shortest distance exactly `k`.
    Exact,
    /// Vertices at shortest distance `1..=k`.
    Cumulative,
}

impl std::str::FromStr for KHopMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact" => Ok(KHopMode::Exact),
            "cumulative" => Ok(KHopMode::Cumulative),
            other => Err(format!("unknown k-hop mode '{other}' (expected exact or cumulative)")),
        }
    }
}

impl std::fmt::Display for KHopMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            KHopMode::Exact => "exact",
            KHopMode::Cumulative => "cumulative",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KHopError {
    #[error("unknown seed node {0}")]
    UnknownSeed(NodeId),
    #[error("hop count {0} outside 1..={MAX_HOPS}")]
    InvalidK(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KHopQuery {
    pub seed: NodeId,
    pub k: usize,
    /// `None` traverses every relation type.
    pub relation: Option<String>,
    pub mode: KHopMode,
}

impl KHopQuery {
    pub fn new(seed: NodeId, k: usize, mode: KHopMode) -> Self {
        KHopQuery {
            seed,
            k,
            relation: None,
            mode,
        }
    }
}

/// Per-hop frontiers `[F1, F2, ...]` of a masked BFS. Stops after
/// `max_hops` or at the first empty frontier, so the result may be shorter
/// than `max_hops`.
pub fn frontiers(matrix: &SparseMatrix, seed: NodeId, max_hops: usize) -> Vec<BitVector> {
    let n = matrix.nrows();
    let mut frontier = BitVector::singleton(n, seed).expect("seed checked by caller");
    let mut visited = frontier.clone();
    let mut levels = Vec::new();
    for _ in 0..max_hops {
        frontier = vxm(&frontier, matrix, Some(&visited), true).expect("square matrix");
        if frontier.is_empty() {
            break;
        }
        visited = ewise_union(&visited, &frontier).expect("same dimension");
        levels.push(frontier.clone());
    }
    levels
}

pub(crate) fn traversal_matrix(
    graph: &PropertyGraph,
    relation: Option<&str>,
    direction: Direction,
) -> std::sync::Arc<SparseMatrix> {
    let relation = Relation::from(relation);
    match direction {
        Direction::Outgoing => graph.relation_matrix(relation),
        Direction::Incoming => graph.transposed_relation_matrix(relation),
    }
}

fn check(graph: &PropertyGraph, q: &KHopQuery) -> Result<(), KHopError> {
    if !graph.contains_node(q.seed) {
        return Err(KHopError::UnknownSeed(q.seed));
    }
    if q.k == 0 || q.k > MAX_HOPS as usize {
        return Err(KHopError::InvalidK(q.k));
    }
    Ok(())
}

/// Combines BFS levels into the exact or cumulative neighborhood.
pub fn combine_levels(levels: &[BitVector], dimension: usize, min: usize, max: usize) -> BitVector {
    let mut out = BitVector::empty(dimension);
    for level in levels.iter().take(max).skip(min - 1) {
        out = ewise_union(&out, level).expect("same dimension");
    }
    out
}

/// Out-neighborhood of `q.seed` at distance `k` (or within `k`).
pub fn k_hop_frontier(graph: &PropertyGraph, q: &KHopQuery) -> Result<BitVector, KHopError> {
    check(graph, q)?;
    let matrix = traversal_matrix(graph, q.relation.as_deref(), Direction::Outgoing);
    let levels = frontiers(&matrix, q.seed, q.k);
    let min = match q.mode {
        KHopMode::Exact => q.k,
        KHopMode::Cumulative => 1,
    };
    Ok(combine_levels(&levels, matrix.ncols(), min, q.k))
}

pub fn k_hop_count(graph: &PropertyGraph, q: &KHopQuery) -> Result<usize, KHopError> {
    k_hop_frontier(graph, q).map(|f| f.nvals())
}
