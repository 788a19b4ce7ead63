//! Translation of a parsed query into a pipeline of algebraic operators.
//!
//! Planning is syntactic: the first node of the first path becomes the
//! scan, every following edge becomes a traversal in path order, WHERE
//! becomes a filter above the traversals, and RETURN/LIMIT sit at the top.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use thiserror::Error;

use crate::cypher::ast::{
    CmpOp, Comparison, CountArg, Direction, Hops, NodePattern, Operand,
    PatternPath, Projection, Query,
};
use crate::graph::PropertyGraph;
use crate::khop::KHopMode;
use crate::value::ValueType;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlanError {
    #[error("type error: cannot compare {left} with {right} in '{expression}'")]
    TypeMismatch {
        expression: String,
        left: String,
        right: String,
    },
    #[error("invalid query: {0}")]
    InvalidQuery(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Predicate {
    Compare(Comparison),
    HasLabel { var: String, label: String },
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Predicate::Compare(c) => write!(f, "{c}"),
            Predicate::HasLabel { var, label } => write!(f, "{var}:{label}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Operator {
    NodeScan {
        var: String,
        label: Option<String>,
    },
    /// One hop: `vxm({src}, A)`, masked by the destination label if any.
    /// With `into`, `dst` is already bound and the row is kept only if it
    /// is reached.
    Traverse {
        src: String,
        relation: Option<String>,
        direction: Direction,
        dst: String,
        dst_label: Option<String>,
        into: bool,
    },
    VarLenTraverse {
        src: String,
        relation: Option<String>,
        direction: Direction,
        min: u32,
        max: u32,
        dst: String,
        dst_label: Option<String>,
        into: bool,
        mode: KHopMode,
    },
    Filter(Vec<Predicate>),
    Project(Vec<Projection>),
    Aggregate(Vec<CountArg>),
    Limit(u64),
    Create(Vec<PatternPath>),
}

fn arrow(direction: Direction) -> &'static str {
    match direction {
        Direction::Outgoing => "→",
        Direction::Incoming => "←",
    }
}

fn dst_text(dst: &str, label: &Option<String>, into: bool) -> String {
    let mut s = dst.to_string();
    if let Some(label) = label {
        s.push(':');
        s.push_str(label);
    }
    if into {
        s.push_str(",into");
    }
    s
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |items: Vec<String>, sep: &str| items.join(sep);
        match self {
            Operator::NodeScan { var, label: None } => write!(f, "NodeScan({var})"),
            Operator::NodeScan {
                var,
                label: Some(label),
            } => write!(f, "NodeScan({var},{label})"),
            Operator::Traverse {
                src,
                relation,
                direction,
                dst,
                dst_label,
                into,
            } => write!(
                f,
                "Traverse({src},{},{},{})",
                relation.as_deref().unwrap_or("ANY"),
                arrow(*direction),
                dst_text(dst, dst_label, *into)
            ),
            Operator::VarLenTraverse {
                src,
                relation,
                direction,
                min,
                max,
                dst,
                dst_label,
                into,
                mode,
            } => write!(
                f,
                "VarLenTraverse({src},{},{},{min},{max},{},{mode})",
                relation.as_deref().unwrap_or("ANY"),
                arrow(*direction),
                dst_text(dst, dst_label, *into)
            ),
            Operator::Filter(preds) => write!(
                f,
                "Filter({})",
                join(preds.iter().map(|p| p.to_string()).collect(), " AND ")
            ),
            Operator::Project(items) => write!(
                f,
                "Project({})",
                join(items.iter().map(|p| p.to_string()).collect(), ", ")
            ),
            Operator::Aggregate(items) => write!(
                f,
                "Aggregate({})",
                join(items.iter().map(|a| format!("count {a}")).collect(), ", ")
            ),
            Operator::Limit(n) => write!(f, "Limit({n})"),
            Operator::Create(paths) => write!(
                f,
                "Create({})",
                join(paths.iter().map(|p| p.to_string()).collect(), ", ")
            ),
        }
    }
}

/// Operators listed leaf first; each consumes the output of the previous one.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalPlan {
    pub operators: Vec<Operator>,
}

impl PhysicalPlan {
    pub fn is_write(&self) -> bool {
        self.operators.iter().any(|op| matches!(op, Operator::Create(_)))
    }

    /// Result column names.
    pub fn columns(&self) -> Vec<String> {
        self.operators
            .iter()
            .find_map(|op| match op {
                Operator::Project(items) => Some(items.iter().map(|p| p.to_string()).collect()),
                Operator::Aggregate(items) => {
                    Some(items.iter().map(|a| Projection::Count(a.clone()).to_string()).collect())
                }
                _ => None,
            })
            .unwrap_or_default()
    }
}

impl fmt::Display for PhysicalPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, op) in self.operators.iter().enumerate() {
            if i > 0 {
                f.write_str(" → ")?;
            }
            write!(f, "{op}")?;
        }
        Ok(())
    }
}

struct Planner<'g> {
    graph: &'g PropertyGraph,
    ops: Vec<Operator>,
    bound: HashSet<String>,
    anon: usize,
}

impl Planner<'_> {
    fn var_name(&mut self, node: &NodePattern) -> String {
        match &node.var {
            Some(v) => v.clone(),
            None => {
                // '@' cannot start an identifier, so these never collide
                let name = format!("@{}", self.anon);
                self.anon += 1;
                name
            }
        }
    }

    fn inline_props(&mut self, var: &str, node: &NodePattern) -> Result<(), PlanError> {
        if node.props.is_empty() {
            return Ok(());
        }
        let mut preds = Vec::new();
        for (key, value) in &node.props {
            let cmp = Comparison {
                left: Operand::Property {
                    var: var.to_string(),
                    key: key.clone(),
                },
                op: CmpOp::Eq,
                right: Operand::Literal(value.clone()),
            };
            self.type_check(&cmp)?;
            preds.push(Predicate::Compare(cmp));
        }
        self.ops.push(Operator::Filter(preds));
        Ok(())
    }

    fn operand_types(&self, operand: &Operand) -> BTreeSet<ValueType> {
        match operand {
            Operand::Literal(lit) => BTreeSet::from([lit.value_type()]),
            Operand::Property { key, .. } => self.graph.property_types(key).cloned().unwrap_or_default(),
        }
    }

    fn type_check(&self, cmp: &Comparison) -> Result<(), PlanError> {
        let left = self.operand_types(&cmp.left);
        let right = self.operand_types(&cmp.right);
        if left.is_empty() || right.is_empty() {
            return Ok(());
        }
        let compatible = left.iter().any(|l| right.iter().any(|r| l.comparable(*r)));
        if compatible {
            return Ok(());
        }
        let names = |set: &BTreeSet<ValueType>| {
            set.iter().map(|t| t.name()).collect::<Vec<_>>().join("/")
        };
        Err(PlanError::TypeMismatch {
            expression: cmp.to_string(),
            left: names(&left),
            right: names(&right),
        })
    }

    fn path(&mut self, path: &PatternPath) -> Result<(), PlanError> {
        let mut current = self.var_name(&path.start);
        if self.bound.insert(current.clone()) {
            self.ops.push(Operator::NodeScan {
                var: current.clone(),
                label: path.start.label.clone(),
            });
        } else if let Some(label) = &path.start.label {
            self.ops.push(Operator::Filter(vec![Predicate::HasLabel {
                var: current.clone(),
                label: label.clone(),
            }]));
        }
        self.inline_props(&current, &path.start)?;

        for step in &path.steps {
            let dst = self.var_name(&step.node);
            let into = !self.bound.insert(dst.clone());
            let (dst_label, post_label) = if into {
                (None, step.node.label.clone())
            } else {
                (step.node.label.clone(), None)
            };
            let edge = &step.edge;
            let op = match edge.hops {
                Hops::One => Operator::Traverse {
                    src: current.clone(),
                    relation: edge.rel_type.clone(),
                    direction: edge.direction,
                    dst: dst.clone(),
                    dst_label,
                    into,
                },
                Hops::Range { min, max } => Operator::VarLenTraverse {
                    src: current.clone(),
                    relation: edge.rel_type.clone(),
                    direction: edge.direction,
                    min,
                    max,
                    dst: dst.clone(),
                    dst_label,
                    into,
                    mode: if min == max {
                        KHopMode::Exact
                    } else {
                        KHopMode::Cumulative
                    },
                },
            };
            self.ops.push(op);
            if let Some(label) = post_label {
                self.ops.push(Operator::Filter(vec![Predicate::HasLabel {
                    var: dst.clone(),
                    label,
                }]));
            }
            self.inline_props(&dst, &step.node)?;
            current = dst;
        }
        Ok(())
    }
}

/// Compiles a query against the graph's current property schema.
pub fn plan(query: &Query, graph: &PropertyGraph) -> Result<PhysicalPlan, PlanError> {
    if let Some(create) = query.create_clause() {
        return Ok(PhysicalPlan {
            operators: vec![Operator::Create(create.patterns.clone())],
        });
    }
    let (Some(m), Some(ret)) = (query.match_clause(), query.return_clause()) else {
        return Err(PlanError::InvalidQuery("expected CREATE or MATCH ... RETURN".into()));
    };
    let mut planner = Planner {
        graph,
        ops: Vec::new(),
        bound: HashSet::new(),
        anon: 0,
    };
    for path in &m.patterns {
        planner.path(path)?;
    }
    if let Some(w) = &m.where_clause {
        for cmp in &w.comparisons {
            planner.type_check(cmp)?;
        }
        planner.ops.push(Operator::Filter(
            w.comparisons.iter().cloned().map(Predicate::Compare).collect(),
        ));
    }
    if ret.projections.iter().all(Projection::is_aggregate) {
        let args = ret
            .projections
            .iter()
            .map(|p| match p {
                Projection::Count(arg) => arg.clone(),
                _ => unreachable!("all projections are aggregates"),
            })
            .collect();
        planner.ops.push(Operator::Aggregate(args));
    } else {
        planner.ops.push(Operator::Project(ret.projections.clone()));
    }
    if let Some(n) = ret.limit {
        planner.ops.push(Operator::Limit(n));
    }
    Ok(PhysicalPlan {
        operators: planner.ops,
    })
}
