//! TCP transport: one dispatcher thread and a fixed pool of query workers.
//!
//! The dispatcher owns every socket. It accepts connections, splits input
//! into lines and hands each line to exactly one worker. A connection has
//! at most one request in flight, so replies go out in request order.
//! Workers report back over a channel and wake the dispatcher, which
//! writes the reply.

use std::collections::{HashMap, VecDeque};
use std::io::{self, ErrorKind, Read, Write};
use std::net::{SocketAddr, ToSocketAddrs};
use std::sync::Arc;
use std::thread::{self, JoinHandle};

use crossbeam_channel::{unbounded, Receiver, Sender};
use log::{debug, info, warn};
use mio::net::{TcpListener, TcpStream};
use mio::{Events, Interest, Poll, Token, Waker};

use super::{handle_request, GraphRegistry, Response, ServerConfig};

const LISTENER: Token = Token(0);
const WAKER: Token = Token(1);
const FIRST_CONN: usize = 2;

struct Job {
    conn: Token,
    line: String,
}

enum Pending {
    Line(String),
    /// Answer locally without a worker; optionally close afterwards.
    Reject { message: &'static str, close: bool },
}

struct Conn {
    stream: TcpStream,
    input: Vec<u8>,
    output: Vec<u8>,
    queue: VecDeque<Pending>,
    busy: bool,
    read_closed: bool,
    close_after_flush: bool,
}

impl Conn {
    fn finished(&self) -> bool {
        let drained = !self.busy && self.output.is_empty();
        drained && (self.close_after_flush || (self.read_closed && self.queue.is_empty()))
    }
}

pub struct Server {
    listener: TcpListener,
    poll: Poll,
    registry: Arc<GraphRegistry>,
    config: ServerConfig,
}

/// A server running on a background thread.
pub struct ServerHandle {
    addr: SocketAddr,
    registry: Arc<GraphRegistry>,
    thread: JoinHandle<io::Result<()>>,
}

impl ServerHandle {
    pub fn addr(&self) -> SocketAddr {
        self.addr
    }

    pub fn registry(&self) -> &Arc<GraphRegistry> {
        &self.registry
    }

    /// Waits for the server to stop (after a `SHUTDOWN` request).
    pub fn join(self) -> io::Result<()> {
        self.thread
            .join()
            .unwrap_or_else(|_| Err(io::Error::other("server thread panicked")))
    }
}

impl Server {
    pub fn bind(config: ServerConfig) -> io::Result<Server> {
        let registry = Arc::new(GraphRegistry::with_snapshot_dir(config.snapshot_dir.clone()));
        Self::bind_with_registry(config, registry)
    }

    pub fn bind_with_registry(config: ServerConfig, registry: Arc<GraphRegistry>) -> io::Result<Server> {
        if config.workers == 0 {
            return Err(io::Error::new(ErrorKind::InvalidInput, "workers must be at least 1"));
        }
        let addr = (config.host.as_str(), config.port)
            .to_socket_addrs()?
            .next()
            .ok_or_else(|| io::Error::new(ErrorKind::InvalidInput, "no address to bind"))?;
        let mut listener = TcpListener::bind(addr)?;
        let poll = Poll::new()?;
        poll.registry()
            .register(&mut listener, LISTENER, Interest::READABLE)?;
        Ok(Server {
            listener,
            poll,
            registry,
            config,
        })
    }

    pub fn local_addr(&self) -> io::Result<SocketAddr> {
        self.listener.local_addr()
    }

    pub fn registry(&self) -> &Arc<GraphRegistry> {
        &self.registry
    }

    pub fn spawn(self) -> io::Result<ServerHandle> {
        let addr = self.local_addr()?;
        let registry = Arc::clone(&self.registry);
        let thread = thread::Builder::new()
            .name("matgraph-dispatch".into())
            .spawn(move || self.run())?;
        Ok(ServerHandle {
            addr,
            registry,
            thread,
        })
    }

    fn start_workers(
        &self,
        jobs: Receiver<Job>,
        done: Sender<(Token, Response)>,
        waker: Arc<Waker>,
    ) -> io::Result<Vec<JoinHandle<()>>> {
        (0..self.config.workers)
            .map(|i| {
                let jobs = jobs.clone();
                let done = done.clone();
                let waker = Arc::clone(&waker);
                let registry = Arc::clone(&self.registry);
                thread::Builder::new()
                    .name(format!("matgraph-worker-{i}"))
                    .spawn(move || {
                        for job in jobs.iter() {
                            let response = handle_request(&job.line, &registry);
                            if done.send((job.conn, response)).is_err() {
                                break;
                            }
                            let _ = waker.wake();
                        }
                    })
            })
            .collect()
    }

    /// Serves until a client sends `SHUTDOWN`.
    pub fn run(mut self) -> io::Result<()> {
        let waker = Arc::new(Waker::new(self.poll.registry(), WAKER)?);
        let (job_tx, job_rx) = unbounded::<Job>();
        let (done_tx, done_rx) = unbounded::<(Token, Response)>();
        let workers = self.start_workers(job_rx, done_tx, waker)?;
        info!(
            "listening on {} with {} workers",
            self.local_addr()?,
            self.config.workers
        );

        let mut conns: HashMap<Token, Conn> = HashMap::new();
        let mut next_token = FIRST_CONN;
        let mut events = Events::with_capacity(256);
        let mut shutting_down = false;

        while !shutting_down {
            if let Err(e) = self.poll.poll(&mut events, None) {
                if e.kind() == ErrorKind::Interrupted {
                    continue;
                }
                return Err(e);
            }
            for event in events.iter() {
                match event.token() {
                    LISTENER => loop {
                        match self.listener.accept() {
                            Ok((mut stream, peer)) => {
                                let token = Token(next_token);
                                next_token += 1;
                                self.poll.registry().register(
                                    &mut stream,
                                    token,
                                    Interest::READABLE | Interest::WRITABLE,
                                )?;
                                debug!("connection {} from {peer}", token.0);
                                conns.insert(
                                    token,
                                    Conn {
                                        stream,
                                        input: Vec::new(),
                                        output: Vec::new(),
                                        queue: VecDeque::new(),
                                        busy: false,
                                        read_closed: false,
                                        close_after_flush: false,
                                    },
                                );
                            }
                            Err(e) if e.kind() == ErrorKind::WouldBlock => break,
                            Err(e) => {
                                warn!("accept failed: {e}");
                                break;
                            }
                        }
                    },
                    WAKER => {
                        for (token, response) in done_rx.try_iter() {
                            shutting_down |= response.shutdown;
                            if let Some(conn) = conns.get_mut(&token) {
                                conn.busy = false;
                                conn.output.extend_from_slice(response.text.as_bytes());
                                if response.shutdown {
                                    conn.close_after_flush = true;
                                }
                                dispatch(token, conn, &job_tx);
                                flush(conn);
                            }
                        }
                    }
                    token => {
                        let Some(conn) = conns.get_mut(&token) else {
                            continue;
                        };
                        if event.is_readable() {
                            read_lines(conn, self.config.max_line);
                            dispatch(token, conn, &job_tx);
                        }
                        flush(conn);
                    }
                }
            }
            let finished: Vec<Token> = conns
                .iter()
                .filter(|(_, c)| c.finished())
                .map(|(t, _)| *t)
                .collect();
            for token in finished {
                if let Some(mut conn) = conns.remove(&token) {
                    let _ = self.poll.registry().deregister(&mut conn.stream);
                    debug!("connection {} closed", token.0);
                }
            }
        }

        // deliver the SHUTDOWN reply before tearing down
        for conn in conns.values_mut() {
            let _ = conn.stream.set_nodelay(true);
            for _ in 0..1000 {
                flush(conn);
                if conn.output.is_empty() {
                    break;
                }
                thread::sleep(std::time::Duration::from_millis(1));
            }
        }
        drop(job_tx);
        for w in workers {
            let _ = w.join();
        }
        info!("shut down");
        Ok(())
    }
}

fn read_lines(conn: &mut Conn, max_line: usize) {
    if conn.read_closed || conn.close_after_flush {
        return;
    }
    let mut buf = [0u8; 64 * 1024];
    loop {
        match conn.stream.read(&mut buf) {
            Ok(0) => {
                conn.read_closed = true;
                break;
            }
            Ok(n) => conn.input.extend_from_slice(&buf[..n]),
            Err(e) if e.kind() == ErrorKind::WouldBlock => break,
            Err(e) if e.kind() == ErrorKind::Interrupted => continue,
            Err(_) => {
                conn.read_closed = true;
                break;
            }
        }
    }
    let mut start = 0;
    while let Some(pos) = conn.input[start..].iter().position(|&b| b == b'\n') {
        let line = &conn.input[start..start + pos];
        start += pos + 1;
        if line.len() > max_line {
            conn.queue.push_back(Pending::Reject {
                message: "ERR line too long\n",
                close: true,
            });
            conn.read_closed = true;
            conn.input.clear();
            return;
        }
        match std::str::from_utf8(line) {
            Ok(text) => conn.queue.push_back(Pending::Line(text.to_string())),
            Err(_) => conn.queue.push_back(Pending::Reject {
                message: "ERR request is not valid UTF-8\n",
                close: false,
            }),
        }
    }
    conn.input.drain(..start);
    if conn.input.len() > max_line {
        conn.queue.push_back(Pending::Reject {
            message: "ERR line too long\n",
            close: true,
        });
        conn.read_closed = true;
        conn.input.clear();
    }
}

/// Sends the next queued request to the pool if none is in flight.
fn dispatch(token: Token, conn: &mut Conn, jobs: &Sender<Job>) {
    while !conn.busy && !conn.close_after_flush {
        match conn.queue.pop_front() {
            None => break,
            Some(Pending::Line(line)) => {
                conn.busy = true;
                jobs.send(Job { conn: token, line })
                    .expect("workers outlive the dispatch loop");
            }
            Some(Pending::Reject { message, close }) => {
                conn.output.extend_from_slice(message.as_bytes());
                if close {
                    conn.close_after_flush = true;
                    conn.queue.clear();
                }
            }
        }
    }
}

fn flush(conn: &mut Conn) {
    while !conn.output.is_empty() {
        match conn.stream.write(&conn.output) {
            Ok(0) => {
                conn.output.clear();
                conn.close_after_flush = true;
            }
            Ok(n) => {
                conn.output.drain(..n);
            }
            Err(e) if e.kind() == ErrorKind::WouldBlock => break,
            Err(e) if e.kind() == ErrorKind::Interrupted => continue,
            Err(_) => {
                // peer is gone; drop whatever is left
                conn.output.clear();
                conn.read_closed = true;
                conn.close_after_flush = true;
            }
        }
    }
}
