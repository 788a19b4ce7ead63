use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use log::info;

use matgraph::bench::{self, RmatParams};
use matgraph::khop::KHopMode;
use matgraph::server::{self, GraphRegistry, Server, ServerConfig};

#[derive(Parser)]
#[command(name = "matgraph", version, about = "Sparse-matrix property graph server")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Serve the line protocol over TCP.
    Serve(ServeArgs),
    /// Read requests from stdin, write responses to stdout.
    Repl,
    /// Time k-hop neighborhood counts on a synthetic or loaded graph.
    Bench(BenchArgs),
}

#[derive(Args)]
struct ServeArgs {
    #[arg(long, default_value = "127.0.0.1")]
    host: String,
    #[arg(long, default_value_t = server::DEFAULT_PORT)]
    port: u16,
    #[arg(long, env = "MATGRAPH_WORKERS", default_value_t = server::DEFAULT_WORKERS,
          value_parser = clap::builder::RangedU64ValueParser::<usize>::new().range(1..))]
    workers: usize,
    #[arg(long)]
    snapshot_dir: Option<PathBuf>,
    #[arg(long, default_value_t = server::DEFAULT_MAX_LINE)]
    max_line: usize,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, default_value_t = 14)]
    scale: u32,
    #[arg(long, default_value_t = 16)]
    edge_factor: usize,
    #[arg(long, value_delimiter = ',', default_values_t = [1usize, 2, 3, 6])]
    ks: Vec<usize>,
    /// Seeds per k, matching `--ks` position by position.
    #[arg(long, value_delimiter = ',', default_values_t = [300usize, 300, 10, 10])]
    seeds: Vec<usize>,
    #[arg(long, default_value = "exact")]
    mode: KHopMode,
    #[arg(long, default_value_t = 1)]
    rng_seed: u64,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Time queries through a running server at host:port.
    #[arg(long)]
    over_wire: Option<String>,
    /// Use a `src<TAB>dst` edge list instead of an RMAT graph.
    #[arg(long)]
    edge_list: Option<PathBuf>,
}

fn serve(args: ServeArgs) -> Result<(), String> {
    let config = ServerConfig {
        host: args.host,
        port: args.port,
        workers: args.workers,
        snapshot_dir: args.snapshot_dir,
        max_line: args.max_line,
    };
    let registry = Arc::new(GraphRegistry::with_snapshot_dir(config.snapshot_dir.clone()));
    let loaded = registry.load_snapshot_dir().map_err(|e| e.to_string())?;
    if loaded > 0 {
        info!("loaded {loaded} graphs from snapshots");
    }
    let server = Server::bind_with_registry(config, registry)
        .map_err(|e| format!("cannot start server: {e}"))?;
    server.run().map_err(|e| e.to_string())
}

fn run_bench(args: BenchArgs) -> Result<(), String> {
    if args.ks.len() != args.seeds.len() {
        return Err(format!(
            "--ks has {} entries but --seeds has {}",
            args.ks.len(),
            args.seeds.len()
        ));
    }
    let started = Instant::now();
    let (n, edges) = match &args.edge_list {
        Some(path) => bench::load_edge_list(path).map_err(|e| e.to_string())?,
        None => {
            let p = RmatParams::new(args.scale, args.edge_factor, args.rng_seed);
            let edges = bench::rmat_generate(&p).map_err(|e| e.to_string())?;
            (p.vertex_count(), edges)
        }
    };
    let graph = bench::graph_from_edges(n, &edges);
    info!(
        "graph: {} vertices, {} distinct edges, built in {:.2?}",
        graph.node_count(),
        graph.edge_record_count(),
        started.elapsed()
    );
    let schedule: Vec<(usize, usize)> = args.ks.iter().copied().zip(args.seeds.iter().copied()).collect();
    let report = match &args.over_wire {
        Some(addr) => bench::run_khop_benchmark_over_wire(&graph, &schedule, args.mode, args.rng_seed, addr),
        None => bench::run_khop_benchmark(&graph, &schedule, args.mode, args.rng_seed),
    }
    .map_err(|e| e.to_string())?;
    for s in report.summaries() {
        info!(
            "k={} seeds={} mean={}ns median={}ns p99={}ns",
            s.k, s.n_seeds, s.mean_ns, s.median_ns, s.p99_ns
        );
    }
    match &args.out {
        Some(path) => bench::report_csv(&report, path).map_err(|e| format!("{}: {e}", path.display()))?,
        None => print!("{}", report.to_csv()),
    }
    info!("done in {:.2?}", started.elapsed());
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Serve(args) => serve(args),
        Command::Repl => {
            let registry = GraphRegistry::new();
            let stdin = std::io::stdin();
            server::repl(&registry, stdin.lock(), std::io::stdout()).map_err(|e| e.to_string())
        }
        Command::Bench(args) => run_bench(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
