//! Query AST and its canonical text form.
//!
//! `Display` on [`Query`] is the pretty printer: parsing its output yields
//! an equal AST.

use std::fmt;

use crate::value::PropertyValue;

pub type Literal = PropertyValue;

#[derive(Debug, Clone, PartialEq)]
pub struct Query {
    pub clauses: Vec<Clause>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Clause {
    Create(CreateClause),
    Match(MatchClause),
    Return(ReturnClause),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CreateClause {
    pub patterns: Vec<PatternPath>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchClause {
    pub patterns: Vec<PatternPath>,
    pub where_clause: Option<WhereExpr>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReturnClause {
    pub projections: Vec<Projection>,
    pub limit: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PatternPath {
    pub start: NodePattern,
    pub steps: Vec<PathStep>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathStep {
    pub edge: EdgePattern,
    pub node: NodePattern,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct NodePattern {
    pub var: Option<String>,
    pub label: Option<String>,
    pub props: Vec<(String, Literal)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Outgoing,
    Incoming,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hops {
    One,
    Range { min: u32, max: u32 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdgePattern {
    pub var: Option<String>,
    pub rel_type: Option<String>,
    pub direction: Direction,
    pub hops: Hops,
    pub props: Vec<(String, Literal)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WhereExpr {
    /// Conjunction.
    pub comparisons: Vec<Comparison>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmpOp {
    Eq,
    Neq,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Neq => "<>",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }

    pub fn holds(self, ord: std::cmp::Ordering) -> bool {
        use std::cmp::Ordering::*;
        match self {
            CmpOp::Eq => ord == Equal,
            CmpOp::Neq => ord != Equal,
            CmpOp::Lt => ord == Less,
            CmpOp::Le => ord != Greater,
            CmpOp::Gt => ord == Greater,
            CmpOp::Ge => ord != Less,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub left: Operand,
    pub op: CmpOp,
    pub right: Operand,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Operand {
    Property { var: String, key: String },
    Literal(Literal),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Projection {
    Variable(String),
    Property { var: String, key: String },
    Count(CountArg),
}

impl Projection {
    pub fn is_aggregate(&self) -> bool {
        matches!(self, Projection::Count(_))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CountArg {
    Star,
    Variable(String),
    Property { var: String, key: String },
}

impl Query {
    pub fn match_clause(&self) -> Option<&MatchClause> {
        self.clauses.iter().find_map(|c| match c {
            Clause::Match(m) => Some(m),
            _ => None,
        })
    }

    pub fn return_clause(&self) -> Option<&ReturnClause> {
        self.clauses.iter().find_map(|c| match c {
            Clause::Return(r) => Some(r),
            _ => None,
        })
    }

    pub fn create_clause(&self) -> Option<&CreateClause> {
        self.clauses.iter().find_map(|c| match c {
            Clause::Create(c) => Some(c),
            _ => None,
        })
    }

    pub fn is_write(&self) -> bool {
        self.create_clause().is_some()
    }
}

/// Literal in re-parseable form.
pub fn format_literal(lit: &Literal) -> String {
    match lit {
        PropertyValue::Int(i) => i.to_string(),
        PropertyValue::Float(x) => {
            // plain decimal, since the lexer has no exponent syntax
            let s = format!("{x}");
            if s.contains('.') || !x.is_finite() {
                s
            } else {
                format!("{s}.0")
            }
        }
        PropertyValue::Bool(b) => b.to_string(),
        PropertyValue::Str(s) => format!("'{}'", s.replace('\'', "''")),
    }
}

fn write_props(f: &mut fmt::Formatter<'_>, props: &[(String, Literal)]) -> fmt::Result {
    f.write_str("{")?;
    for (i, (key, value)) in props.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{key}: {}", format_literal(value))?;
    }
    f.write_str("}")
}

fn write_list<T: fmt::Display>(f: &mut fmt::Formatter<'_>, items: &[T], sep: &str) -> fmt::Result {
    for (i, item) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(sep)?;
        }
        write!(f, "{item}")?;
    }
    Ok(())
}

impl fmt::Display for NodePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        if let Some(var) = &self.var {
            f.write_str(var)?;
        }
        if let Some(label) = &self.label {
            write!(f, ":{label}")?;
        }
        if !self.props.is_empty() {
            if self.var.is_some() || self.label.is_some() {
                f.write_str(" ")?;
            }
            write_props(f, &self.props)?;
        }
        f.write_str(")")
    }
}

impl fmt::Display for EdgePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (open, close) = match self.direction {
            Direction::Outgoing => ("-[", "]->"),
            Direction::Incoming => ("<-[", "]-"),
        };
        f.write_str(open)?;
        if let Some(var) = &self.var {
            f.write_str(var)?;
        }
        if let Some(rel) = &self.rel_type {
            write!(f, ":{rel}")?;
        }
        if let Hops::Range { min, max } = self.hops {
            write!(f, "*{min}..{max}")?;
        }
        if !self.props.is_empty() {
            f.write_str(" ")?;
            write_props(f, &self.props)?;
        }
        f.write_str(close)
    }
}

impl fmt::Display for PatternPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.start)?;
        for step in &self.steps {
            write!(f, "{}{}", step.edge, step.node)?;
        }
        Ok(())
    }
}

impl fmt::Display for Operand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Operand::Property { var, key } => write!(f, "{var}.{key}"),
            Operand::Literal(lit) => f.write_str(&format_literal(lit)),
        }
    }
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.left, self.op.symbol(), self.right)
    }
}

impl fmt::Display for CountArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CountArg::Star => f.write_str("*"),
            CountArg::Variable(v) => f.write_str(v),
            CountArg::Property { var, key } => write!(f, "{var}.{key}"),
        }
    }
}

/// Also the result column name.
impl fmt::Display for Projection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Projection::Variable(v) => f.write_str(v),
            Projection::Property { var, key } => write!(f, "{var}.{key}"),
            Projection::Count(arg) => write!(f, "count({arg})"),
        }
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Clause::Create(c) => {
                f.write_str("CREATE ")?;
                write_list(f, &c.patterns, ", ")
            }
            Clause::Match(m) => {
                f.write_str("MATCH ")?;
                write_list(f, &m.patterns, ", ")?;
                if let Some(w) = &m.where_clause {
                    f.write_str(" WHERE ")?;
                    write_list(f, &w.comparisons, " AND ")?;
                }
                Ok(())
            }
            Clause::Return(r) => {
                f.write_str("RETURN ")?;
                write_list(f, &r.projections, ", ")?;
                if let Some(n) = r.limit {
                    write!(f, " LIMIT {n}")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_list(f, &self.clauses, " ")
    }
}

/// Canonical text for a query.
pub fn pretty_print(query: &Query) -> String {
    query.to_string()
}
