//! Named graphs behind a line-oriented text protocol.
//!
//! ```text
//! PING                      -> PONG
//! QUERY <graph> <cypher>    -> OK <nrows> / [header] / rows... / END
//! SAVE <graph> <path>       -> OK 0 / END
//! LOAD <graph> <path>       -> OK 0 / END
//! SHUTDOWN                  -> OK 0 / END, then the server exits
//! ```
//!
//! Any failure is a single `ERR <message>` line. [`handle_request`] is the
//! whole protocol; the TCP server and the REPL only move lines around.

mod net;
mod repl;

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use parking_lot::RwLock;

use crate::cypher;
use crate::exec::{self, ExecTrace, ResultTable};
use crate::graph::PropertyGraph;
use crate::plan;
use crate::snapshot;

pub use net::{Server, ServerHandle};
pub use repl::repl;

pub const DEFAULT_PORT: u16 = 6380;
pub const DEFAULT_WORKERS: usize = 4;
pub const DEFAULT_MAX_LINE: usize = 1 << 20;
pub const SNAPSHOT_EXTENSION: &str = "graphsnap";

#[derive(Debug, Clone)]
pub struct ServerConfig {
    pub host: String,
    pub port: u16,
    /// Size of the query worker pool; at least 1.
    pub workers: usize,
    pub snapshot_dir: Option<PathBuf>,
    /// Longest accepted request line in bytes, excluding the LF.
    pub max_line: usize,
}

impl Default for ServerConfig {
    fn default() -> Self {
        ServerConfig {
            host: "127.0.0.1".into(),
            port: DEFAULT_PORT,
            workers: DEFAULT_WORKERS,
            snapshot_dir: None,
            max_line: DEFAULT_MAX_LINE,
        }
    }
}

/// Counters fed by every executed query.
#[derive(Debug, Default)]
pub struct QueryStats {
    queries: AtomicU64,
    multi_threaded: AtomicU64,
}

impl QueryStats {
    fn record(&self, trace: &ExecTrace) {
        self.queries.fetch_add(1, Ordering::Relaxed);
        if trace.distinct_threads() > 1 {
            self.multi_threaded.fetch_add(1, Ordering::Relaxed);
        }
    }

    pub fn queries(&self) -> u64 {
        self.queries.load(Ordering::Relaxed)
    }

    /// Queries whose operators did not all run on the same thread.
    pub fn multi_threaded(&self) -> u64 {
        self.multi_threaded.load(Ordering::Relaxed)
    }
}

pub type SharedGraph = Arc<RwLock<PropertyGraph>>;

/// Graph name -> graph, each behind its own reader-writer lock.
#[derive(Debug, Default)]
pub struct GraphRegistry {
    graphs: RwLock<HashMap<String, SharedGraph>>,
    snapshot_dir: Option<PathBuf>,
    stats: QueryStats,
}

pub fn valid_graph_name(name: &str) -> bool {
    (1..=64).contains(&name.len())
        && name
            .bytes()
            .all(|b| b.is_ascii_alphanumeric() || b == b'_' || b == b'-')
}

impl GraphRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_snapshot_dir(dir: Option<PathBuf>) -> Self {
        GraphRegistry {
            snapshot_dir: dir,
            ..Self::default()
        }
    }

    pub fn stats(&self) -> &QueryStats {
        &self.stats
    }

    pub fn get(&self, name: &str) -> Option<SharedGraph> {
        self.graphs.read().get(name).cloned()
    }

    pub fn get_or_create(&self, name: &str) -> SharedGraph {
        if let Some(g) = self.get(name) {
            return g;
        }
        self.graphs.write().entry(name.to_string()).or_default().clone()
    }

    pub fn insert(&self, name: &str, graph: PropertyGraph) {
        let mut graphs = self.graphs.write();
        match graphs.get(name) {
            // swap in place so holders of the old handle see the new graph
            Some(existing) => *existing.write() = graph,
            None => {
                graphs.insert(name.to_string(), Arc::new(RwLock::new(graph)));
            }
        }
    }

    pub fn names(&self) -> Vec<String> {
        let mut names: Vec<String> = self.graphs.read().keys().cloned().collect();
        names.sort();
        names
    }

    /// Loads every `<name>.graphsnap` in the snapshot directory.
    pub fn load_snapshot_dir(&self) -> Result<usize, snapshot::SnapshotError> {
        let Some(dir) = &self.snapshot_dir else {
            return Ok(0);
        };
        if !dir.exists() {
            return Ok(0);
        }
        let mut loaded = 0;
        for entry in std::fs::read_dir(dir)? {
            let path = entry?.path();
            if path.extension().and_then(|e| e.to_str()) != Some(SNAPSHOT_EXTENSION) {
                continue;
            }
            let Some(name) = path.file_stem().and_then(|s| s.to_str()) else {
                continue;
            };
            if valid_graph_name(name) {
                self.insert(name, snapshot::load(&path)?);
                loaded += 1;
            }
        }
        Ok(loaded)
    }

    /// Writes every graph to the snapshot directory, if one is configured.
    pub fn save_snapshot_dir(&self) -> Result<usize, snapshot::SnapshotError> {
        let Some(dir) = &self.snapshot_dir else {
            return Ok(0);
        };
        std::fs::create_dir_all(dir)?;
        let names = self.names();
        for name in &names {
            let graph = self.get(name).expect("name listed from the registry");
            let path = dir.join(format!("{name}.{SNAPSHOT_EXTENSION}"));
            snapshot::save(&graph.read(), path)?;
        }
        Ok(names.len())
    }
}

/// Reply to one request line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Response {
    pub text: String,
    /// Set after `SHUTDOWN`; the transport stops once this is delivered.
    pub shutdown: bool,
}

impl Response {
    fn text(text: String) -> Self {
        Response {
            text,
            shutdown: false,
        }
    }

    fn err(message: impl std::fmt::Display) -> Self {
        // single line, whatever the message contains
        let message = message.to_string().replace(['\n', '\r'], " ");
        Response::text(format!("ERR {message}\n"))
    }

    fn ok_empty() -> Self {
        Response::text("OK 0\nEND\n".into())
    }
}

/// Serializes a result block.
pub fn format_result(table: &ResultTable) -> String {
    let mut out = format!("OK {}\n", table.rows.len());
    if !table.rows.is_empty() || !table.columns.is_empty() {
        out.push_str(&table.columns.join("\t"));
        out.push('\n');
    }
    for row in &table.rows {
        for (i, cell) in row.iter().enumerate() {
            if i > 0 {
                out.push('\t');
            }
            let _ = write!(out, "{cell}");
        }
        out.push('\n');
    }
    out.push_str("END\n");
    out
}

fn split_word(s: &str) -> (&str, &str) {
    match s.split_once(' ') {
        Some((word, rest)) => (word, rest.trim_start_matches(' ')),
        None => (s, ""),
    }
}

fn run_query(registry: &GraphRegistry, graph_name: &str, text: &str) -> Response {
    let ast = match cypher::parse(text) {
        Ok(ast) => ast,
        Err(e) => return Response::err(e),
    };
    let graph = registry.get_or_create(graph_name);
    let result = if ast.is_write() {
        let mut g = graph.write();
        plan::plan(&ast, &g)
            .map_err(|e| e.to_string())
            .and_then(|p| exec::execute_mut_traced(&p, &mut g).map_err(|e| e.to_string()))
    } else {
        let g = graph.read();
        plan::plan(&ast, &g)
            .map_err(|e| e.to_string())
            .and_then(|p| exec::execute_traced(&p, &g).map_err(|e| e.to_string()))
    };
    match result {
        Ok((table, trace)) => {
            registry.stats.record(&trace);
            Response::text(format_result(&table))
        }
        Err(message) => Response::err(message),
    }
}

fn graph_and_path<'a>(command: &str, args: &'a str) -> Result<(&'a str, &'a str), Response> {
    let (name, path) = split_word(args);
    if name.is_empty() || path.is_empty() {
        return Err(Response::err(format!("usage: {command} <graph> <path>")));
    }
    if !valid_graph_name(name) {
        return Err(Response::err(format!("invalid graph name '{name}'")));
    }
    Ok((name, path))
}

/// Executes one protocol request against the registry.
pub fn handle_request(line: &str, registry: &GraphRegistry) -> Response {
    let line = line.strip_suffix('\n').unwrap_or(line);
    let line = line.strip_suffix('\r').unwrap_or(line);
    let (command, args) = split_word(line);
    match command.to_ascii_uppercase().as_str() {
        "PING" if args.is_empty() => Response::text("PONG\n".into()),
        "QUERY" => {
            let (name, text) = split_word(args);
            if name.is_empty() || text.is_empty() {
                return Response::err("usage: QUERY <graph> <cypher>");
            }
            if !valid_graph_name(name) {
                return Response::err(format!("invalid graph name '{name}'"));
            }
            run_query(registry, name, text)
        }
        "SAVE" => match graph_and_path("SAVE", args) {
            Ok((name, path)) => match registry.get(name) {
                None => Response::err(format!("unknown graph '{name}'")),
                Some(graph) => match snapshot::save(&graph.read(), Path::new(path)) {
                    Ok(()) => Response::ok_empty(),
                    Err(e) => Response::err(e),
                },
            },
            Err(resp) => resp,
        },
        "LOAD" => match graph_and_path("LOAD", args) {
            Ok((name, path)) => match snapshot::load(Path::new(path)) {
                Ok(graph) => {
                    registry.insert(name, graph);
                    Response::ok_empty()
                }
                Err(e) => Response::err(e),
            },
            Err(resp) => resp,
        },
        "SHUTDOWN" if args.is_empty() => match registry.save_snapshot_dir() {
            Ok(_) => Response {
                text: "OK 0\nEND\n".into(),
                shutdown: true,
            },
            Err(e) => Response::err(e),
        },
        "" => Response::err("empty command"),
        "PING" | "SHUTDOWN" => Response::err(format!("{command} takes no arguments")),
        _ => Response::err("unknown command"),
    }
}
