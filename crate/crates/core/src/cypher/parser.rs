use std::collections::HashMap;

use super::ast::*;
use super::lexer::{tokenize, Token, TokenKind};
use super::{ParseError, MAX_HOPS};
use crate::value::PropertyValue;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Binding {
    Node,
    Edge,
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    bindings: HashMap<String, Binding>,
}

/// Parses one query and checks that every referenced variable is bound.
pub fn parse(text: &str) -> Result<Query, ParseError> {
    let mut p = Parser {
        tokens: tokenize(text)?,
        pos: 0,
        bindings: HashMap::new(),
    };
    let query = p.query()?;
    p.expect_eof()?;
    Ok(query)
}

fn describe(kind: &TokenKind) -> String {
    use TokenKind::*;
    match kind {
        LParen => "'('",
        RParen => "')'",
        LBracket => "'['",
        RBracket => "']'",
        LBrace => "'{'",
        RBrace => "'}'",
        Colon => "':'",
        Comma => "','",
        Dot => "'.'",
        DotDot => "'..'",
        Star => "'*'",
        Minus => "'-'",
        Lt => "'<'",
        Gt => "'>'",
        Match => "'MATCH'",
        Create => "'CREATE'",
        Where => "'WHERE'",
        Return => "'RETURN'",
        Limit => "'LIMIT'",
        And => "'AND'",
        Count => "'COUNT'",
        Eof => "end of input",
        _ => "token",
    }
    .to_string()
}

impl Parser {
    fn peek(&self) -> &TokenKind {
        &self.tokens[self.pos].kind
    }

    fn peek_at(&self, ahead: usize) -> &TokenKind {
        let i = (self.pos + ahead).min(self.tokens.len() - 1);
        &self.tokens[i].kind
    }

    fn offset(&self) -> usize {
        self.tokens[self.pos].offset
    }

    fn advance(&mut self) -> &Token {
        let tok = &self.tokens[self.pos];
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        tok
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.peek() == kind {
            self.advance();
            true
        } else {
            false
        }
    }

    fn error(&self, expected: &[&str]) -> ParseError {
        ParseError::Syntax {
            offset: self.offset(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn expect(&mut self, kind: TokenKind) -> Result<usize, ParseError> {
        let offset = self.offset();
        if self.eat(&kind) {
            Ok(offset)
        } else {
            Err(ParseError::Syntax {
                offset,
                expected: vec![describe(&kind)],
            })
        }
    }

    fn expect_eof(&mut self) -> Result<(), ParseError> {
        if *self.peek() == TokenKind::Eof {
            Ok(())
        } else {
            Err(self.error(&["end of input"]))
        }
    }

    fn semantic(&self, offset: usize, message: impl Into<String>) -> ParseError {
        ParseError::Semantic {
            offset,
            message: message.into(),
        }
    }

    /// Variable name: identifiers only, keywords excluded.
    fn variable(&mut self) -> Result<(String, usize), ParseError> {
        let offset = self.offset();
        match self.peek().clone() {
            TokenKind::Ident(name) => {
                self.advance();
                Ok((name, offset))
            }
            _ => Err(self.error(&["identifier"])),
        }
    }

    /// Label, relation type, or property key. Keywords are accepted here
    /// with their original spelling.
    fn name(&mut self) -> Result<String, ParseError> {
        let tok = &self.tokens[self.pos];
        if matches!(tok.kind, TokenKind::Ident(_)) || tok.kind.is_keyword() {
            let lexeme = tok.lexeme.clone();
            self.advance();
            Ok(lexeme)
        } else {
            Err(self.error(&["name"]))
        }
    }

    fn query(&mut self) -> Result<Query, ParseError> {
        match self.peek() {
            TokenKind::Create => {
                self.advance();
                let patterns = self.pattern_list(true)?;
                Ok(Query {
                    clauses: vec![Clause::Create(CreateClause { patterns })],
                })
            }
            TokenKind::Match => {
                self.advance();
                let patterns = self.pattern_list(false)?;
                let where_clause = if self.eat(&TokenKind::Where) {
                    Some(self.where_expr()?)
                } else {
                    None
                };
                if *self.peek() != TokenKind::Return {
                    let mut expected = vec!["','", "'RETURN'"];
                    if where_clause.is_none() {
                        expected.insert(1, "'WHERE'");
                    } else {
                        expected[0] = "'AND'";
                    }
                    return Err(self.error(&expected));
                }
                self.advance();
                let ret = self.return_clause()?;
                Ok(Query {
                    clauses: vec![
                        Clause::Match(MatchClause {
                            patterns,
                            where_clause,
                        }),
                        Clause::Return(ret),
                    ],
                })
            }
            _ => Err(self.error(&["'MATCH'", "'CREATE'"])),
        }
    }

    fn pattern_list(&mut self, create: bool) -> Result<Vec<PatternPath>, ParseError> {
        let mut patterns = vec![self.pattern(create)?];
        while self.eat(&TokenKind::Comma) {
            patterns.push(self.pattern(create)?);
        }
        Ok(patterns)
    }

    fn pattern(&mut self, create: bool) -> Result<PatternPath, ParseError> {
        let start = self.node(create)?;
        let mut steps = Vec::new();
        while matches!(self.peek(), TokenKind::Minus | TokenKind::Lt) {
            let edge = self.edge(create)?;
            let node = self.node(create)?;
            steps.push(PathStep { edge, node });
        }
        Ok(PatternPath { start, steps })
    }

    fn bind(&mut self, name: &str, offset: usize, kind: Binding) -> Result<bool, ParseError> {
        match self.bindings.get(name) {
            None => {
                self.bindings.insert(name.to_string(), kind);
                Ok(true)
            }
            Some(&existing) if existing == kind && kind == Binding::Node => Ok(false),
            Some(Binding::Edge) if kind == Binding::Edge => {
                Err(self.semantic(offset, format!("relationship variable '{name}' is bound twice")))
            }
            Some(_) => Err(self.semantic(
                offset,
                format!("variable '{name}' is bound to both a node and a relationship"),
            )),
        }
    }

    fn node(&mut self, create: bool) -> Result<NodePattern, ParseError> {
        self.expect(TokenKind::LParen)?;
        let mut node = NodePattern::default();
        let mut var_offset = 0;
        let mut fresh = true;
        if let TokenKind::Ident(_) = self.peek() {
            let (var, offset) = self.variable()?;
            fresh = self.bind(&var, offset, Binding::Node)?;
            var_offset = offset;
            node.var = Some(var);
        }
        if self.eat(&TokenKind::Colon) {
            node.label = Some(self.name()?);
        }
        if *self.peek() == TokenKind::LBrace {
            node.props = self.props()?;
        }
        self.expect(TokenKind::RParen)?;
        if create && !fresh && (node.label.is_some() || !node.props.is_empty()) {
            return Err(self.semantic(
                var_offset,
                format!("variable '{}' already declared", node.var.as_deref().unwrap_or_default()),
            ));
        }
        Ok(node)
    }

    fn edge(&mut self, create: bool) -> Result<EdgePattern, ParseError> {
        let start = self.offset();
        let incoming = self.eat(&TokenKind::Lt);
        self.expect(TokenKind::Minus)?;
        let mut edge = EdgePattern {
            var: None,
            rel_type: None,
            direction: if incoming {
                Direction::Incoming
            } else {
                Direction::Outgoing
            },
            hops: Hops::One,
            props: Vec::new(),
        };
        let mut star_offset = None;
        if self.eat(&TokenKind::LBracket) {
            if let TokenKind::Ident(_) = self.peek() {
                let (var, offset) = self.variable()?;
                self.bind(&var, offset, Binding::Edge)?;
                edge.var = Some(var);
            }
            if self.eat(&TokenKind::Colon) {
                edge.rel_type = Some(self.name()?);
            }
            if *self.peek() == TokenKind::Star {
                star_offset = Some(self.offset());
                self.advance();
                edge.hops = self.hop_range()?;
            }
            if *self.peek() == TokenKind::LBrace {
                let offset = self.offset();
                edge.props = self.props()?;
                if !create {
                    return Err(self.semantic(
                        offset,
                        "property constraints on relationships are not supported in MATCH",
                    ));
                }
            }
            self.expect(TokenKind::RBracket)?;
        }
        self.expect(TokenKind::Minus)?;
        if !incoming {
            self.expect(TokenKind::Gt)?;
        }
        if create {
            if edge.rel_type.is_none() {
                return Err(self.semantic(start, "relationships in CREATE need a type"));
            }
            if let Some(offset) = star_offset {
                return Err(self.semantic(offset, "variable-length relationships cannot be created"));
            }
        }
        Ok(edge)
    }

    fn hop_count(&mut self) -> Result<u32, ParseError> {
        let offset = self.offset();
        match *self.peek() {
            TokenKind::Int(v) => {
                self.advance();
                u32::try_from(v).map_err(|_| self.semantic(offset, "hop count out of range"))
            }
            _ => Err(self.error(&["integer"])),
        }
    }

    fn hop_range(&mut self) -> Result<Hops, ParseError> {
        let offset = self.offset();
        let min = self.hop_count()?;
        let max = if self.eat(&TokenKind::DotDot) {
            self.hop_count()?
        } else {
            min
        };
        if min < 1 {
            return Err(self.semantic(offset, "minimum hop count must be at least 1"));
        }
        if max < min {
            return Err(self.semantic(offset, format!("invalid hop range {min}..{max}")));
        }
        if max > MAX_HOPS {
            return Err(self.semantic(offset, format!("maximum hop count {max} exceeds {MAX_HOPS}")));
        }
        Ok(Hops::Range { min, max })
    }

    fn props(&mut self) -> Result<Vec<(String, Literal)>, ParseError> {
        self.expect(TokenKind::LBrace)?;
        let mut props: Vec<(String, Literal)> = Vec::new();
        if self.eat(&TokenKind::RBrace) {
            return Ok(props);
        }
        loop {
            let offset = self.offset();
            let key = self.name()?;
            if props.iter().any(|(k, _)| *k == key) {
                return Err(self.semantic(offset, format!("duplicate property key '{key}'")));
            }
            self.expect(TokenKind::Colon)?;
            let value = self.literal()?;
            props.push((key, value));
            if !self.eat(&TokenKind::Comma) {
                break;
            }
        }
        if *self.peek() != TokenKind::RBrace {
            return Err(self.error(&["','", "'}'"]));
        }
        self.advance();
        Ok(props)
    }

    fn literal(&mut self) -> Result<Literal, ParseError> {
        let offset = self.offset();
        let negative = self.eat(&TokenKind::Minus);
        let value = match self.peek().clone() {
            TokenKind::Int(v) => {
                let v = if negative {
                    0i64.checked_sub_unsigned(v)
                } else {
                    i64::try_from(v).ok()
                };
                match v {
                    Some(v) => PropertyValue::Int(v),
                    None => return Err(self.semantic(offset, "integer literal out of range")),
                }
            }
            TokenKind::Float(x) => PropertyValue::Float(if negative { -x } else { x }),
            TokenKind::Str(s) if !negative => PropertyValue::Str(s),
            TokenKind::True if !negative => PropertyValue::Bool(true),
            TokenKind::False if !negative => PropertyValue::Bool(false),
            _ if negative => return Err(self.error(&["number"])),
            _ => return Err(self.error(&["literal"])),
        };
        self.advance();
        Ok(value)
    }

    fn node_reference(&mut self) -> Result<String, ParseError> {
        let (var, offset) = self.variable()?;
        match self.bindings.get(&var) {
            Some(Binding::Node) => Ok(var),
            Some(Binding::Edge) => Err(self.semantic(
                offset,
                format!("relationship variable '{var}' cannot be referenced"),
            )),
            None => Err(ParseError::UnboundVariable { name: var, offset }),
        }
    }

    fn operand(&mut self) -> Result<Operand, ParseError> {
        if let TokenKind::Ident(_) = self.peek() {
            let var = self.node_reference()?;
            self.expect(TokenKind::Dot)?;
            let key = self.name()?;
            Ok(Operand::Property { var, key })
        } else {
            match self.peek() {
                TokenKind::Int(_)
                | TokenKind::Float(_)
                | TokenKind::Str(_)
                | TokenKind::True
                | TokenKind::False
                | TokenKind::Minus => Ok(Operand::Literal(self.literal()?)),
                _ => Err(self.error(&["property access", "literal"])),
            }
        }
    }

    fn where_expr(&mut self) -> Result<WhereExpr, ParseError> {
        let mut comparisons = Vec::new();
        loop {
            let left = self.operand()?;
            let op = match self.peek() {
                TokenKind::Eq => CmpOp::Eq,
                TokenKind::Neq => CmpOp::Neq,
                TokenKind::Lt => CmpOp::Lt,
                TokenKind::Le => CmpOp::Le,
                TokenKind::Gt => CmpOp::Gt,
                TokenKind::Ge => CmpOp::Ge,
                _ => return Err(self.error(&["comparison operator"])),
            };
            self.advance();
            let right = self.operand()?;
            comparisons.push(Comparison { left, op, right });
            if !self.eat(&TokenKind::And) {
                break;
            }
        }
        Ok(WhereExpr { comparisons })
    }

    fn projection(&mut self) -> Result<Projection, ParseError> {
        if *self.peek() == TokenKind::Count && *self.peek_at(1) == TokenKind::LParen {
            self.advance();
            self.advance();
            let arg = if self.eat(&TokenKind::Star) {
                CountArg::Star
            } else {
                let var = self.node_reference()?;
                if self.eat(&TokenKind::Dot) {
                    CountArg::Property {
                        var,
                        key: self.name()?,
                    }
                } else {
                    CountArg::Variable(var)
                }
            };
            self.expect(TokenKind::RParen)?;
            return Ok(Projection::Count(arg));
        }
        if !matches!(self.peek(), TokenKind::Ident(_)) {
            return Err(self.error(&["identifier", "'count'"]));
        }
        let var = self.node_reference()?;
        if self.eat(&TokenKind::Dot) {
            Ok(Projection::Property {
                var,
                key: self.name()?,
            })
        } else {
            Ok(Projection::Variable(var))
        }
    }

    fn return_clause(&mut self) -> Result<ReturnClause, ParseError> {
        let first_offset = self.offset();
        let mut projections = vec![self.projection()?];
        while self.eat(&TokenKind::Comma) {
            projections.push(self.projection()?);
        }
        let aggregates = projections.iter().filter(|p| p.is_aggregate()).count();
        if aggregates > 0 && aggregates < projections.len() {
            return Err(self.semantic(
                first_offset,
                "aggregate and non-aggregate projections cannot be mixed",
            ));
        }
        let limit = if self.eat(&TokenKind::Limit) {
            match *self.peek() {
                TokenKind::Int(n) => {
                    self.advance();
                    Some(n)
                }
                _ => return Err(self.error(&["integer"])),
            }
        } else {
            None
        };
        if *self.peek() != TokenKind::Eof {
            let expected: &[&str] = if limit.is_none() {
                &["','", "'LIMIT'", "end of input"]
            } else {
                &["end of input"]
            };
            return Err(self.error(expected));
        }
        Ok(ReturnClause { projections, limit })
    }
}
