//! Text snapshot format.
//!
//! ```text
//! GRAPHSNAP1
//! NODES <node_count>
//! <id>\t<label1,label2,...>\t<props>
//! EDGES <edge_record_count>
//! <src>\t<relation>\t<dst>\t<props>
//! ```
//!
//! Labels, relation names, property keys and string values are
//! percent-encoded. Output is deterministic: nodes in id order, edges
//! ordered by `(src, relation, dst)`.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use thiserror::Error;

use crate::graph::PropertyGraph;
use crate::value::{decode_properties, encode_properties, percent_decode, percent_encode};

const MAGIC: &str = "GRAPHSNAP1";

#[derive(Debug, Error)]
pub enum SnapshotError {
    #[error("snapshot I/O error: {0}")]
    Io(#[from] io::Error),
    #[error("malformed snapshot at line {line}: {message}")]
    Malformed { line: usize, message: String },
}

fn malformed(line: usize, message: impl Into<String>) -> SnapshotError {
    SnapshotError::Malformed {
        line,
        message: message.into(),
    }
}

pub fn write_snapshot<W: Write>(graph: &PropertyGraph, mut out: W) -> io::Result<()> {
    writeln!(out, "{MAGIC}")?;
    writeln!(out, "NODES {}", graph.node_count())?;
    for id in 0..graph.node_count() {
        let labels: Vec<String> = graph.node_labels(id).into_iter().map(percent_encode).collect();
        let props = graph.node_properties(id).expect("id is allocated");
        writeln!(out, "{id}\t{}\t{}", labels.join(","), encode_properties(props))?;
    }
    let edges = graph.edge_records();
    writeln!(out, "EDGES {}", edges.len())?;
    for e in edges {
        writeln!(
            out,
            "{}\t{}\t{}\t{}",
            e.src,
            percent_encode(e.relation),
            e.dst,
            encode_properties(e.props)
        )?;
    }
    Ok(())
}

pub fn to_string(graph: &PropertyGraph) -> String {
    let mut buf = Vec::new();
    write_snapshot(graph, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("snapshot text is UTF-8")
}

pub fn save(graph: &PropertyGraph, path: impl AsRef<Path>) -> Result<(), SnapshotError> {
    let mut file = io::BufWriter::new(fs::File::create(path)?);
    write_snapshot(graph, &mut file)?;
    file.flush()?;
    Ok(())
}

pub fn load(path: impl AsRef<Path>) -> Result<PropertyGraph, SnapshotError> {
    let bytes = fs::read(path)?;
    let text = String::from_utf8(bytes).map_err(|e| {
        let line = 1 + e.as_bytes()[..e.utf8_error().valid_up_to()]
            .iter()
            .filter(|&&b| b == b'\n')
            .count();
        malformed(line, "invalid UTF-8")
    })?;
    parse(&text)
}

fn parse_count(line_no: usize, line: Option<&str>, keyword: &str) -> Result<usize, SnapshotError> {
    let line = line.ok_or_else(|| malformed(line_no, format!("missing {keyword} header")))?;
    let rest = line
        .strip_prefix(keyword)
        .and_then(|r| r.strip_prefix(' '))
        .ok_or_else(|| malformed(line_no, format!("expected '{keyword} <count>'")))?;
    rest.parse()
        .map_err(|_| malformed(line_no, format!("bad {keyword} count '{rest}'")))
}

fn parse_id(line_no: usize, field: &str) -> Result<usize, SnapshotError> {
    field
        .parse()
        .map_err(|_| malformed(line_no, format!("bad node id '{field}'")))
}

/// Parses snapshot text. Errors carry 1-based line numbers.
pub fn parse(text: &str) -> Result<PropertyGraph, SnapshotError> {
    let body = text.strip_suffix('\n').unwrap_or(text);
    let mut lines = body.split('\n').enumerate().map(|(i, l)| (i + 1, l));
    let mut next = || lines.next();

    match next() {
        Some((_, MAGIC)) => {}
        _ => return Err(malformed(1, format!("expected '{MAGIC}'"))),
    }
    let (line_no, line) = next().map_or((2, None), |(n, l)| (n, Some(l)));
    let node_count = parse_count(line_no, line, "NODES")?;

    let mut graph = PropertyGraph::new();
    for expected_id in 0..node_count {
        let (line_no, line) = next().ok_or_else(|| malformed(line_no + expected_id + 1, "missing node line"))?;
        let fields: Vec<&str> = line.split('\t').collect();
        let [id, labels, props] = fields[..] else {
            return Err(malformed(line_no, "node line needs 3 tab-separated fields"));
        };
        if parse_id(line_no, id)? != expected_id {
            return Err(malformed(line_no, format!("expected node id {expected_id}")));
        }
        let labels = if labels.is_empty() {
            Vec::new()
        } else {
            labels
                .split(',')
                .map(|l| percent_decode(l).map_err(|_| malformed(line_no, "bad label encoding")))
                .collect::<Result<Vec<_>, _>>()?
        };
        if labels.iter().any(String::is_empty) {
            return Err(malformed(line_no, "empty label"));
        }
        let props = decode_properties(props).map_err(|m| malformed(line_no, m))?;
        graph.create_node(&labels, props);
    }

    let header = next();
    let line_no = header.map_or(node_count + 3, |(n, _)| n);
    let edge_count = parse_count(line_no, header.map(|(_, l)| l), "EDGES")?;
    for i in 0..edge_count {
        let (line_no, line) = next().ok_or_else(|| malformed(line_no + i + 1, "missing edge line"))?;
        let fields: Vec<&str> = line.split('\t').collect();
        let [src, relation, dst, props] = fields[..] else {
            return Err(malformed(line_no, "edge line needs 4 tab-separated fields"));
        };
        let (src, dst) = (parse_id(line_no, src)?, parse_id(line_no, dst)?);
        let relation = percent_decode(relation).map_err(|_| malformed(line_no, "bad relation encoding"))?;
        if relation.is_empty() {
            return Err(malformed(line_no, "empty relation name"));
        }
        let props = decode_properties(props).map_err(|m| malformed(line_no, m))?;
        if graph.edge_properties(src, &relation, dst).is_some() {
            return Err(malformed(line_no, "duplicate edge record"));
        }
        graph
            .create_edge(src, &relation, dst, props)
            .map_err(|e| malformed(line_no, e.to_string()))?;
    }
    if let Some((line_no, _)) = next() {
        return Err(malformed(line_no, "trailing content after edges"));
    }
    graph.flush();
    Ok(graph)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::value::{Properties, PropertyValue};

    fn two_node_graph() -> PropertyGraph {
        let mut g = PropertyGraph::new();
        let mut p = Properties::new();
        p.insert("name".into(), PropertyValue::Str("ann b".into()));
        p.insert("age".into(), PropertyValue::Int(41));
        g.create_node(&["Person"], p);
        g.create_node(&["Person", "Admin"], Properties::new());
        let mut e = Properties::new();
        e.insert("since".into(), PropertyValue::Float(2.5));
        g.create_edge(0, "KNOWS", 1, e).unwrap();
        g
    }

    #[test]
    fn empty_graph_round_trips() {
        let g = PropertyGraph::new();
        let text = to_string(&g);
        assert_eq!(text, "GRAPHSNAP1\nNODES 0\nEDGES 0\n");
        assert_eq!(parse(&text).unwrap(), g);
    }

    #[test]
    fn exact_text_and_stable_resave() {
        let g = two_node_graph();
        let text = to_string(&g);
        assert_eq!(
            text,
            "GRAPHSNAP1\nNODES 2\n0\tPerson\tage:i:41;name:s:ann%20b\n1\tPerson,Admin\t\n\
             EDGES 1\n0\tKNOWS\t1\tsince:f:2.5\n"
        );
        let loaded = parse(&text).unwrap();
        assert_eq!(loaded, g);
        assert_eq!(to_string(&loaded), text);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let cases = [
            ("NOPE\n", 1),
            ("GRAPHSNAP1\nNODES x\n", 2),
            ("GRAPHSNAP1\nNODES 1\n0\t\n", 3),
            ("GRAPHSNAP1\nNODES 1\n1\t\t\nEDGES 0\n", 3),
            ("GRAPHSNAP1\nNODES 1\n0\t\ta:z:1\nEDGES 0\n", 3),
            ("GRAPHSNAP1\nNODES 1\n0\t\t\nEDGES 1\n0\tR\t5\t\n", 5),
            ("GRAPHSNAP1\nNODES 1\n0\t\t\nEDGES 2\n0\tR\t0\t\n", 6),
            ("GRAPHSNAP1\nNODES 0\nEDGES 0\nextra\n", 4),
            ("GRAPHSNAP1\nNODES 2\n0\t\t\n", 4),
        ];
        for (text, line) in cases {
            match parse(text) {
                Err(SnapshotError::Malformed { line: got, .. }) => assert_eq!(got, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn file_round_trip_and_io_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.snap");
        let g = two_node_graph();
        save(&g, &path).unwrap();
        assert_eq!(load(&path).unwrap(), g);
        assert!(matches!(load(dir.path().join("missing")), Err(SnapshotError::Io(_))));
    }
}
