//! Plan execution.
//!
//! Rows are tuples of node ids, one column per pattern variable in binding
//! order. Scans and traversals emit targets in ascending id order and
//! expand rows in place, so the binding rows stay sorted lexicographically
//! without an explicit sort.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::thread::{self, ThreadId};

use thiserror::Error;

use crate::cypher::ast::{CountArg, Operand, PatternPath, Projection};
use crate::graph::{GraphError, NodeId, PropertyGraph};
use crate::khop::{combine_levels, frontiers, traversal_matrix};
use crate::plan::{Operator, PhysicalPlan, Predicate};
use crate::sparse::{vxm, BitVector};
use crate::value::{Properties, PropertyValue};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExecError {
    #[error("write query needs exclusive access to the graph")]
    WriteNeedsExclusive,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Node(NodeId),
    Value(PropertyValue),
    Null,
}

/// Wire encoding: `#<id>` for nodes, percent-encoded strings.
impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Node(id) => write!(f, "#{id}"),
            Cell::Value(v) => f.write_str(&v.encode()),
            Cell::Null => f.write_str("null"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ResultTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl ResultTable {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// Thread on which each operator ran.
#[derive(Debug, Clone, Default)]
pub struct ExecTrace {
    pub operator_threads: Vec<ThreadId>,
}

impl ExecTrace {
    pub fn distinct_threads(&self) -> usize {
        self.operator_threads.iter().collect::<HashSet<_>>().len()
    }
}

struct Bindings {
    vars: Vec<String>,
    rows: Vec<Vec<NodeId>>,
}

impl Bindings {
    fn column(&self, var: &str) -> usize {
        self.vars
            .iter()
            .position(|v| v == var)
            .unwrap_or_else(|| panic!("planner bound variable '{var}' before use"))
    }
}

fn property<'g>(graph: &'g PropertyGraph, id: NodeId, key: &str) -> Option<&'g PropertyValue> {
    graph.node_properties(id).and_then(|p| p.get(key))
}

fn operand_value<'a>(
    graph: &'a PropertyGraph,
    b: &Bindings,
    row: &[NodeId],
    operand: &'a Operand,
) -> Option<&'a PropertyValue> {
    match operand {
        Operand::Literal(lit) => Some(lit),
        Operand::Property { var, key } => property(graph, row[b.column(var)], key),
    }
}

fn predicate_holds(graph: &PropertyGraph, b: &Bindings, row: &[NodeId], pred: &Predicate) -> bool {
    match pred {
        Predicate::HasLabel { var, label } => graph.has_label(row[b.column(var)], label),
        Predicate::Compare(cmp) => {
            let left = operand_value(graph, b, row, &cmp.left);
            let right = operand_value(graph, b, row, &cmp.right);
            // a missing property or incomparable pair never satisfies a comparison
            match (left, right) {
                (Some(l), Some(r)) => l.compare(r).is_some_and(|ord| cmp.op.holds(ord)),
                _ => false,
            }
        }
    }
}

fn expand(b: &mut Bindings, src_col: usize, dst: &str, into: bool, mut reach: impl FnMut(NodeId) -> BitVector) {
    let rows = std::mem::take(&mut b.rows);
    if into {
        let dst_col = b.column(dst);
        b.rows = rows
            .into_iter()
            .filter(|row| reach(row[src_col]).contains(row[dst_col]))
            .collect();
    } else {
        b.vars.push(dst.to_string());
        for row in rows {
            for target in reach(row[src_col]).iter() {
                let mut next = row.clone();
                next.push(target);
                b.rows.push(next);
            }
        }
    }
}

fn count(graph: &PropertyGraph, b: &Bindings, arg: &CountArg) -> i64 {
    let n = match arg {
        CountArg::Star | CountArg::Variable(_) => b.rows.len(),
        CountArg::Property { var, key } => {
            let col = b.column(var);
            b.rows.iter().filter(|row| property(graph, row[col], key).is_some()).count()
        }
    };
    n as i64
}

fn project(graph: &PropertyGraph, b: &Bindings, items: &[Projection]) -> ResultTable {
    let rows = b
        .rows
        .iter()
        .map(|row| {
            items
                .iter()
                .map(|item| match item {
                    Projection::Variable(v) => Cell::Node(row[b.column(v)]),
                    Projection::Property { var, key } => property(graph, row[b.column(var)], key)
                        .map_or(Cell::Null, |v| Cell::Value(v.clone())),
                    Projection::Count(_) => unreachable!("aggregates are planned separately"),
                })
                .collect()
        })
        .collect();
    ResultTable {
        columns: items.iter().map(|p| p.to_string()).collect(),
        rows,
    }
}

fn run_read(plan: &PhysicalPlan, graph: &PropertyGraph, trace: &mut ExecTrace) -> ResultTable {
    let mut b = Bindings {
        vars: Vec::new(),
        rows: vec![Vec::new()],
    };
    let mut table: Option<ResultTable> = None;
    let n = graph.capacity();

    for op in &plan.operators {
        trace.operator_threads.push(thread::current().id());
        match op {
            Operator::NodeScan { var, label } => {
                let scan = match label {
                    Some(label) => graph.label_vector(label),
                    None => graph.all_nodes(),
                };
                b.vars.push(var.clone());
                let rows = std::mem::take(&mut b.rows);
                for row in rows {
                    for id in scan.iter() {
                        let mut next = row.clone();
                        next.push(id);
                        b.rows.push(next);
                    }
                }
            }
            Operator::Traverse {
                src,
                relation,
                direction,
                dst,
                dst_label,
                into,
            } => {
                let matrix = traversal_matrix(graph, relation.as_deref(), *direction);
                let mask = dst_label.as_ref().map(|l| graph.label_vector(l));
                let src_col = b.column(src);
                expand(&mut b, src_col, dst, *into, |source| {
                    let seed = BitVector::singleton(n, source).expect("bound ids are allocated");
                    vxm(&seed, &matrix, mask.as_ref(), false).expect("square matrix")
                });
            }
            Operator::VarLenTraverse {
                src,
                relation,
                direction,
                min,
                max,
                dst,
                dst_label,
                into,
                ..
            } => {
                let matrix = traversal_matrix(graph, relation.as_deref(), *direction);
                let label = dst_label.as_ref().map(|l| graph.label_vector(l));
                let src_col = b.column(src);
                let (min, max) = (*min as usize, *max as usize);
                let mut cache: HashMap<NodeId, BitVector> = HashMap::new();
                expand(&mut b, src_col, dst, *into, |source| {
                    cache
                        .entry(source)
                        .or_insert_with(|| {
                            let levels = frontiers(&matrix, source, max);
                            let reached = combine_levels(&levels, n, min, max);
                            match &label {
                                Some(label) => BitVector::from_sorted_unchecked(
                                    n,
                                    reached.iter().filter(|&v| label.contains(v)).collect(),
                                ),
                                None => reached,
                            }
                        })
                        .clone()
                });
            }
            Operator::Filter(preds) => {
                let rows = std::mem::take(&mut b.rows);
                b.rows = rows
                    .into_iter()
                    .filter(|row| preds.iter().all(|p| predicate_holds(graph, &b, row, p)))
                    .collect();
            }
            Operator::Project(items) => table = Some(project(graph, &b, items)),
            Operator::Aggregate(args) => {
                let row = args
                    .iter()
                    .map(|a| Cell::Value(PropertyValue::Int(count(graph, &b, a))))
                    .collect();
                table = Some(ResultTable {
                    columns: plan.columns(),
                    rows: vec![row],
                });
            }
            Operator::Limit(limit) => {
                if let Some(t) = table.as_mut() {
                    t.rows.truncate(usize::try_from(*limit).unwrap_or(usize::MAX));
                }
            }
            Operator::Create(_) => unreachable!("write plans are rejected before execution"),
        }
    }
    table.unwrap_or_default()
}

/// Runs a read-only plan. Safe to call concurrently with other readers.
pub fn execute(plan: &PhysicalPlan, graph: &PropertyGraph) -> Result<ResultTable, ExecError> {
    execute_traced(plan, graph).map(|(table, _)| table)
}

/// [`execute`], also reporting the thread each operator ran on.
pub fn execute_traced(
    plan: &PhysicalPlan,
    graph: &PropertyGraph,
) -> Result<(ResultTable, ExecTrace), ExecError> {
    if plan.is_write() {
        return Err(ExecError::WriteNeedsExclusive);
    }
    let mut trace = ExecTrace::default();
    let table = run_read(plan, graph, &mut trace);
    Ok((table, trace))
}

fn create_paths(graph: &mut PropertyGraph, paths: &[PatternPath]) -> Result<(), ExecError> {
    let mut created: HashMap<&str, NodeId> = HashMap::new();
    fn node_id<'q>(
        graph: &mut PropertyGraph,
        created: &mut HashMap<&'q str, NodeId>,
        node: &'q crate::cypher::ast::NodePattern,
    ) -> NodeId {
        if let Some(id) = node.var.as_deref().and_then(|v| created.get(v)) {
            return *id;
        }
        let labels: Vec<&str> = node.label.iter().map(String::as_str).collect();
        let props: Properties = node.props.iter().cloned().collect();
        let id = graph.create_node(&labels, props);
        if let Some(v) = node.var.as_deref() {
            created.insert(v, id);
        }
        id
    }
    for path in paths {
        let mut current = node_id(graph, &mut created, &path.start);
        for step in &path.steps {
            let next = node_id(graph, &mut created, &step.node);
            let (src, dst) = match step.edge.direction {
                crate::cypher::ast::Direction::Outgoing => (current, next),
                crate::cypher::ast::Direction::Incoming => (next, current),
            };
            let relation = step
                .edge
                .rel_type
                .as_deref()
                .expect("parser requires typed relationships in CREATE");
            let props: Properties = step.edge.props.iter().cloned().collect();
            graph.create_edge(src, relation, dst, props)?;
            current = next;
        }
    }
    Ok(())
}

/// Runs any plan, including writes. Needs exclusive access.
pub fn execute_mut(plan: &PhysicalPlan, graph: &mut PropertyGraph) -> Result<ResultTable, ExecError> {
    execute_mut_traced(plan, graph).map(|(table, _)| table)
}

pub fn execute_mut_traced(
    plan: &PhysicalPlan,
    graph: &mut PropertyGraph,
) -> Result<(ResultTable, ExecTrace), ExecError> {
    if !plan.is_write() {
        return execute_traced(plan, graph);
    }
    let mut trace = ExecTrace::default();
    for op in &plan.operators {
        trace.operator_threads.push(thread::current().id());
        if let Operator::Create(paths) = op {
            create_paths(graph, paths)?;
        }
    }
    graph.flush();
    Ok((ResultTable::default(), trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cypher::parse;
    use crate::plan::plan;

    fn run(g: &mut PropertyGraph, q: &str) -> ResultTable {
        let p = plan(&parse(q).unwrap(), g).unwrap();
        execute_mut(&p, g).unwrap()
    }

    fn with_ids(n: usize, edges: &[(usize, usize)]) -> PropertyGraph {
        let mut g = PropertyGraph::new();
        for i in 0..n {
            let mut p = Properties::new();
            p.insert("id".into(), PropertyValue::Int(i as i64));
            g.create_node(&["N"], p);
        }
        for &(s, d) in edges {
            g.create_edge(s, "R", d, Properties::new()).unwrap();
        }
        g
    }

    fn scalar(t: &ResultTable) -> i64 {
        match &t.rows[..] {
            [row] => match &row[..] {
                [Cell::Value(PropertyValue::Int(v))] => *v,
                other => panic!("{other:?}"),
            },
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn path_edge_count() {
        let mut g = with_ids(4, &[(0, 1), (1, 2), (2, 3)]);
        assert_eq!(scalar(&run(&mut g, "MATCH (a)-[:R]->(b) RETURN count(b)")), 3);
    }

    #[test]
    fn empty_graph_has_no_rows() {
        let mut g = PropertyGraph::new();
        let t = run(&mut g, "MATCH (a)-[:R]->(b) RETURN a, b");
        assert!(t.is_empty());
        assert_eq!(t.columns, vec!["a", "b"]);
        assert_eq!(scalar(&run(&mut g, "MATCH (n) RETURN count(n)")), 0);
    }

    #[test]
    fn triangle_two_hops_from_zero() {
        let mut g = with_ids(3, &[(0, 1), (1, 2), (2, 0)]);
        let t = run(&mut g, "MATCH (a)-[:R*2..2]->(b) WHERE a.id = 0 RETURN count(b)");
        assert_eq!(scalar(&t), 1);
        let t = run(&mut g, "MATCH (a)-[:R*2..2]->(b) WHERE a.id = 0 RETURN b");
        assert_eq!(t.rows, vec![vec![Cell::Node(2)]]);
    }

    #[test]
    fn rows_sorted_by_binding_tuple() {
        let mut g = with_ids(4, &[(2, 0), (0, 3), (0, 1), (1, 0), (3, 2)]);
        let t = run(&mut g, "MATCH (a)-->(b) RETURN a, b");
        let pairs: Vec<(usize, usize)> = t
            .rows
            .iter()
            .map(|r| match (&r[0], &r[1]) {
                (Cell::Node(a), Cell::Node(b)) => (*a, *b),
                _ => unreachable!(),
            })
            .collect();
        assert_eq!(pairs, vec![(0, 1), (0, 3), (1, 0), (2, 0), (3, 2)]);
    }

    #[test]
    fn incoming_and_into() {
        let mut g = with_ids(3, &[(0, 1), (1, 0), (1, 2)]);
        let t = run(&mut g, "MATCH (a)<-[:R]-(b) WHERE a.id = 0 RETURN b.id");
        assert_eq!(t.rows, vec![vec![Cell::Value(PropertyValue::Int(1))]]);
        // mutual edges only
        let t = run(&mut g, "MATCH (a)-->(b)-->(a) RETURN count(*)");
        assert_eq!(scalar(&t), 2);
    }

    #[test]
    fn labels_mask_traversals() {
        let mut g = PropertyGraph::new();
        run(&mut g, "CREATE (a:P {name: 'x'})-[:R]->(b:Q), (a)-[:R]->(c:P)");
        assert_eq!(g.node_count(), 3);
        let t = run(&mut g, "MATCH (a:P)-[:R]->(b:P) RETURN a.name, b");
        assert_eq!(
            t.rows,
            vec![vec![Cell::Value(PropertyValue::Str("x".into())), Cell::Node(2)]]
        );
    }

    #[test]
    fn projections_nulls_and_limit() {
        let mut g = PropertyGraph::new();
        run(&mut g, "CREATE (:A {v: 1}), (:A), (:A {v: 3})");
        let t = run(&mut g, "MATCH (a:A) RETURN a.v LIMIT 2");
        assert_eq!(
            t.rows,
            vec![vec![Cell::Value(PropertyValue::Int(1))], vec![Cell::Null]]
        );
        let t = run(&mut g, "MATCH (a:A) RETURN count(a.v), count(*)");
        assert_eq!(
            t.rows,
            vec![vec![
                Cell::Value(PropertyValue::Int(2)),
                Cell::Value(PropertyValue::Int(3))
            ]]
        );
        assert_eq!(t.columns, vec!["count(a.v)", "count(*)"]);
    }

    #[test]
    fn write_plans_need_mut() {
        let g = PropertyGraph::new();
        let p = plan(&parse("CREATE (:A)").unwrap(), &g).unwrap();
        assert_eq!(execute(&p, &g), Err(ExecError::WriteNeedsExclusive));
    }

    #[test]
    fn create_incoming_edge() {
        let mut g = PropertyGraph::new();
        run(&mut g, "CREATE (a:X)<-[:R {w: 2}]-(b:Y)");
        assert_eq!(g.edge_records().len(), 1);
        let e = &g.edge_records()[0];
        assert_eq!((e.src, e.relation, e.dst), (1, "R", 0));
    }

    #[test]
    fn trace_single_thread() {
        let mut g = with_ids(3, &[(0, 1)]);
        let p = plan(&parse("MATCH (a)-->(b) RETURN count(b)").unwrap(), &g).unwrap();
        let (_, trace) = execute_traced(&p, &g).unwrap();
        assert_eq!(trace.operator_threads.len(), 3);
        assert_eq!(trace.distinct_threads(), 1);
        let _ = run(&mut g, "CREATE (:Z)");
    }
}
