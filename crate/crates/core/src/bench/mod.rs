//! k-hop benchmark harness: synthetic graphs, seed selection, sequential
//! timing and CSV reports.

mod oracle;
mod report;
mod rmat;

use std::io::{self, BufRead, BufReader, Read, Write};
use std::net::TcpStream;
use std::path::Path;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{NodeId, PropertyGraph, Relation};
use crate::khop::{k_hop_count, KHopError, KHopMode, KHopQuery};
use crate::value::{Properties, PropertyValue};

pub use oracle::{bfs_count, bfs_oracle};
pub use report::{
    report_csv, KHopGroup, KHopReport, KHopSummary, Sample, DETAIL_HEADER, SUMMARY_HEADER,
};
pub use rmat::{rmat_generate, RmatParams, MAX_SCALE};

pub const NODE_LABEL: &str = "Node";
pub const EDGE_RELATION: &str = "LINK";
pub const ID_KEY: &str = "id";

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid parameters: {0}")]
    Params(String),
    #[error("need {needed} seeds but only {eligible} vertices have outgoing edges")]
    NotEnoughSeeds { needed: usize, eligible: usize },
    #[error("k={k} seed={seed}: {source}")]
    KHop {
        k: usize,
        seed: NodeId,
        source: KHopError,
    },
    #[error("edge list line {line}: {message}")]
    EdgeList { line: usize, message: String },
    #[error("server: {0}")]
    Wire(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Builds a store with `n` nodes (each carrying an `id` property equal to
/// its node id) and one `LINK` edge per tuple.
pub fn graph_from_edges(n: usize, edges: &[(usize, usize)]) -> PropertyGraph {
    let mut g = PropertyGraph::with_capacity(n.max(1));
    for i in 0..n {
        let mut props = Properties::new();
        props.insert(ID_KEY.into(), PropertyValue::Int(i as i64));
        g.create_node(&[NODE_LABEL], props);
    }
    for &(s, d) in edges {
        g.create_edge(s, EDGE_RELATION, d, Properties::new())
            .expect("endpoints below n");
    }
    g.flush();
    g
}

/// Reads a `src<TAB>dst` edge list. Blank lines and `#` comments are
/// skipped. Returns the vertex count (max id + 1) and the tuples.
pub fn read_edge_list<R: Read>(input: R) -> Result<(usize, Vec<(usize, usize)>), BenchError> {
    let mut edges = Vec::new();
    let mut n = 0;
    for (i, line) in BufReader::new(input).lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |message: String| BenchError::EdgeList {
            line: i + 1,
            message,
        };
        let mut fields = line.split_whitespace();
        let (Some(s), Some(d), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(bad("expected two vertex ids".into()));
        };
        let s: usize = s.parse().map_err(|_| bad(format!("bad vertex id '{s}'")))?;
        let d: usize = d.parse().map_err(|_| bad(format!("bad vertex id '{d}'")))?;
        n = n.max(s + 1).max(d + 1);
        edges.push((s, d));
    }
    Ok((n, edges))
}

pub fn load_edge_list(path: impl AsRef<Path>) -> Result<(usize, Vec<(usize, usize)>), BenchError> {
    read_edge_list(std::fs::File::open(path)?)
}

/// `n` distinct vertices with out-degree at least 1, chosen uniformly.
pub fn pick_seeds(graph: &PropertyGraph, n: usize, rng_seed: u64) -> Result<Vec<NodeId>, BenchError> {
    let eligible: Vec<NodeId> = (0..graph.node_count())
        .filter(|&v| graph.out_degree(v, Relation::Any) > 0)
        .collect();
    if eligible.len() < n {
        return Err(BenchError::NotEnoughSeeds {
            needed: n,
            eligible: eligible.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    Ok(rand::seq::index::sample(&mut rng, eligible.len(), n)
        .into_iter()
        .map(|i| eligible[i])
        .collect())
}

/// Seed list for each k; seeds for different k are drawn independently.
pub fn seed_schedule(
    graph: &PropertyGraph,
    schedule: &[(usize, usize)],
    rng_seed: u64,
) -> Result<Vec<(usize, Vec<NodeId>)>, BenchError> {
    schedule
        .iter()
        .map(|&(k, n)| Ok((k, pick_seeds(graph, n, rng_seed.wrapping_add(k as u64))?)))
        .collect()
}

/// Runs `query(k, seed)` once per scheduled seed, strictly in order, timing
/// each call.
pub fn run_timed<F>(
    seeds: &[(usize, Vec<NodeId>)],
    mode: KHopMode,
    mut query: F,
) -> Result<KHopReport, BenchError>
where
    F: FnMut(usize, NodeId) -> Result<usize, BenchError>,
{
    let mut groups = Vec::with_capacity(seeds.len());
    for (k, list) in seeds {
        let mut samples = Vec::with_capacity(list.len());
        for &seed in list {
            let start = Instant::now();
            let count = query(*k, seed)?;
            let elapsed_ns = start.elapsed().as_nanos() as u64;
            samples.push(Sample {
                seed,
                count,
                elapsed_ns,
            });
        }
        groups.push(KHopGroup { k: *k, samples });
    }
    Ok(KHopReport { mode, groups })
}

/// In-process benchmark: `schedule` lists `(k, number of seeds)`.
pub fn run_khop_benchmark(
    graph: &PropertyGraph,
    schedule: &[(usize, usize)],
    mode: KHopMode,
    rng_seed: u64,
) -> Result<KHopReport, BenchError> {
    let seeds = seed_schedule(graph, schedule, rng_seed)?;
    run_timed(&seeds, mode, |k, seed| {
        k_hop_count(graph, &KHopQuery::new(seed, k, mode))
            .map_err(|source| BenchError::KHop { k, seed, source })
    })
}

/// Cypher text the wire benchmark sends for one (seed, k).
pub fn khop_cypher(seed: NodeId, k: usize, mode: KHopMode) -> String {
    let min = match mode {
        KHopMode::Exact => k,
        KHopMode::Cumulative => 1,
    };
    format!("MATCH (a {{{ID_KEY}: {seed}}})-[*{min}..{k}]->(b) RETURN count(b)")
}

/// A line-protocol client, enough for the benchmark and the tests.
pub struct WireClient {
    reader: BufReader<TcpStream>,
    writer: TcpStream,
}

impl WireClient {
    pub fn connect(addr: &str) -> Result<Self, BenchError> {
        let stream = TcpStream::connect(addr)?;
        stream.set_nodelay(true)?;
        Ok(WireClient {
            reader: BufReader::new(stream.try_clone()?),
            writer: stream,
        })
    }

    /// Sends one request and returns the full response text.
    pub fn request(&mut self, line: &str) -> Result<String, BenchError> {
        self.writer.write_all(line.as_bytes())?;
        self.writer.write_all(b"\n")?;
        let mut out = String::new();
        let first = self.read_line()?;
        out.push_str(&first);
        if first.starts_with("OK ") {
            loop {
                let next = self.read_line()?;
                out.push_str(&next);
                if next == "END\n" {
                    break;
                }
            }
        }
        Ok(out)
    }

    fn read_line(&mut self) -> Result<String, BenchError> {
        let mut line = String::new();
        if self.reader.read_line(&mut line)? == 0 {
            return Err(BenchError::Wire("connection closed".into()));
        }
        Ok(line)
    }
}

/// Parses the single value of a one-row, one-column integer result.
pub fn parse_count_response(text: &str) -> Result<usize, BenchError> {
    let lines: Vec<&str> = text.lines().collect();
    match lines.as_slice() {
        ["OK 1", _, value, "END"] => value
            .parse()
            .map_err(|_| BenchError::Wire(format!("unexpected value '{value}'"))),
        _ => Err(BenchError::Wire(format!("unexpected response {text:?}"))),
    }
}

/// Same measurement as [`run_khop_benchmark`] but through a running server:
/// the graph is shipped as a snapshot and each query is a Cypher request.
pub fn run_khop_benchmark_over_wire(
    graph: &PropertyGraph,
    schedule: &[(usize, usize)],
    mode: KHopMode,
    rng_seed: u64,
    addr: &str,
) -> Result<KHopReport, BenchError> {
    let seeds = seed_schedule(graph, schedule, rng_seed)?;
    let path = std::env::temp_dir().join(format!("matgraph-bench-{}.graphsnap", std::process::id()));
    crate::snapshot::save(graph, &path).map_err(|e| BenchError::Wire(e.to_string()))?;
    let mut client = WireClient::connect(addr)?;
    let loaded = client.request(&format!("LOAD bench {}", path.display()));
    let _ = std::fs::remove_file(&path);
    let loaded = loaded?;
    if loaded != "OK 0\nEND\n" {
        return Err(BenchError::Wire(format!("LOAD failed: {}", loaded.trim_end())));
    }
    run_timed(&seeds, mode, |k, seed| {
        let text = client.request(&format!("QUERY bench {}", khop_cypher(seed, k, mode)))?;
        parse_count_response(&text)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_edge_seed() {
        let g = graph_from_edges(3, &[(2, 0)]);
        assert_eq!(pick_seeds(&g, 1, 5).unwrap(), vec![2]);
        assert!(matches!(
            pick_seeds(&g, 2, 5),
            Err(BenchError::NotEnoughSeeds { needed: 2, eligible: 1 })
        ));
    }

    #[test]
    fn path_benchmark() {
        let g = graph_from_edges(4, &[(0, 1), (1, 2), (2, 3)]);
        let r = run_timed(&[(1, vec![0])], KHopMode::Exact, |k, seed| {
            Ok(k_hop_count(&g, &KHopQuery::new(seed, k, KHopMode::Exact)).unwrap())
        })
        .unwrap();
        assert_eq!(r.groups[0].samples[0].count, bfs_oracle(&g, 0, 1, KHopMode::Exact));
        assert_eq!(r.groups[0].samples[0].count, 1);
        let empty = run_khop_benchmark(&g, &[], KHopMode::Exact, 0).unwrap();
        assert!(empty.groups.is_empty());
    }

    #[test]
    fn edge_list_parsing() {
        let (n, edges) = read_edge_list("# c\n0\t3\n\n2 1\n".as_bytes()).unwrap();
        assert_eq!(n, 4);
        assert_eq!(edges, vec![(0, 3), (2, 1)]);
        let err = read_edge_list("0\t1\nx\t2\n".as_bytes()).unwrap_err();
        assert_eq!(err.to_string(), "edge list line 2: bad vertex id 'x'");
    }

    #[test]
    fn cypher_text() {
        assert_eq!(
            khop_cypher(7, 2, KHopMode::Exact),
            "MATCH (a {id: 7})-[*2..2]->(b) RETURN count(b)"
        );
        assert_eq!(
            khop_cypher(7, 3, KHopMode::Cumulative),
            "MATCH (a {id: 7})-[*1..3]->(b) RETURN count(b)"
        );
    }
}
