//! Plain queue BFS used to cross-check the matrix traversal.

use std::collections::VecDeque;

use crate::graph::PropertyGraph;
use crate::khop::KHopMode;

/// Counts vertices at distance `k` (or `1..=k`) from `seed` in the directed
/// graph given by `edges` over `n` vertices.
pub fn bfs_count(n: usize, edges: &[(usize, usize)], seed: usize, k: usize, mode: KHopMode) -> usize {
    let mut adj = vec![Vec::new(); n];
    for &(s, d) in edges {
        adj[s].push(d);
    }
    let mut dist = vec![usize::MAX; n];
    dist[seed] = 0;
    let mut queue = VecDeque::from([seed]);
    let mut count = 0;
    while let Some(u) = queue.pop_front() {
        if dist[u] == k {
            continue;
        }
        for &v in &adj[u] {
            if dist[v] == usize::MAX {
                dist[v] = dist[u] + 1;
                if mode == KHopMode::Cumulative || dist[v] == k {
                    count += 1;
                }
                queue.push_back(v);
            }
        }
    }
    count
}

/// Same semantics as `k_hop_count` over all relation types, computed from
/// the store's edge records.
pub fn bfs_oracle(graph: &PropertyGraph, seed: usize, k: usize, mode: KHopMode) -> usize {
    let edges: Vec<(usize, usize)> = graph.edge_records().iter().map(|e| (e.src, e.dst)).collect();
    bfs_count(graph.node_count(), &edges, seed, k, mode)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_graph() {
        let edges = [(0, 1), (1, 2), (2, 3)];
        assert_eq!(bfs_count(4, &edges, 0, 1, KHopMode::Exact), 1);
        assert_eq!(bfs_count(4, &edges, 0, 2, KHopMode::Exact), 1);
        assert_eq!(bfs_count(4, &edges, 0, 3, KHopMode::Cumulative), 3);
        assert_eq!(bfs_count(4, &edges, 0, 6, KHopMode::Exact), 0);
    }

    #[test]
    fn shortcut_wins() {
        // 0->2 directly and via 1; 2 is at distance 1 only
        let edges = [(0, 1), (1, 2), (0, 2), (2, 0)];
        assert_eq!(bfs_count(3, &edges, 0, 2, KHopMode::Exact), 0);
        assert_eq!(bfs_count(3, &edges, 0, 2, KHopMode::Cumulative), 2);
    }
}
