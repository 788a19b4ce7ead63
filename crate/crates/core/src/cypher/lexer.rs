use std::fmt;

use super::ParseError;

#[derive(Debug, Clone, PartialEq)]
pub enum TokenKind {
    Match,
    Create,
    Where,
    Return,
    Limit,
    And,
    Count,
    True,
    False,
    Ident(String),
    /// Unsigned; sign and range are checked by the parser.
    Int(u64),
    Float(f64),
    Str(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Colon,
    Comma,
    Dot,
    DotDot,
    Star,
    Minus,
    Lt,
    Gt,
    Le,
    Ge,
    Eq,
    Neq,
    Eof,
}

impl TokenKind {
    pub fn is_keyword(&self) -> bool {
        use TokenKind::*;
        matches!(self, Match | Create | Where | Return | Limit | And | Count | True | False)
    }
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use TokenKind::*;
        let s = match self {
            Match => "MATCH",
            Create => "CREATE",
            Where => "WHERE",
            Return => "RETURN",
            Limit => "LIMIT",
            And => "AND",
            Count => "COUNT",
            True => "TRUE",
            False => "FALSE",
            Ident(name) => return write!(f, "IDENT {name}"),
            Int(i) => return write!(f, "INT {i}"),
            Float(x) => return write!(f, "FLOAT {x:?}"),
            Str(s) => return write!(f, "STRING {s:?}"),
            LParen => "LPAREN",
            RParen => "RPAREN",
            LBracket => "LBRACKET",
            RBracket => "RBRACKET",
            LBrace => "LBRACE",
            RBrace => "RBRACE",
            Colon => "COLON",
            Comma => "COMMA",
            Dot => "DOT",
            DotDot => "DOTDOT",
            Star => "STAR",
            Minus => "MINUS",
            Lt => "LT",
            Gt => "GT",
            Le => "LE",
            Ge => "GE",
            Eq => "EQ",
            Neq => "NEQ",
            Eof => "EOF",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub lexeme: String,
    pub offset: usize,
}

fn keyword(word: &str) -> Option<TokenKind> {
    let kind = match word.to_ascii_uppercase().as_str() {
        "MATCH" => TokenKind::Match,
        "CREATE" => TokenKind::Create,
        "WHERE" => TokenKind::Where,
        "RETURN" => TokenKind::Return,
        "LIMIT" => TokenKind::Limit,
        "AND" => TokenKind::And,
        "COUNT" => TokenKind::Count,
        "TRUE" => TokenKind::True,
        "FALSE" => TokenKind::False,
        _ => return None,
    };
    Some(kind)
}

/// Splits `text` into tokens. The final token is always `Eof` at
/// `text.len()`.
pub fn tokenize(text: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let start = i;
        let b = bytes[i];
        let kind = match b {
            b' ' | b'\t' | b'\r' | b'\n' => {
                i += 1;
                continue;
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                let word = &text[start..i];
                keyword(word).unwrap_or_else(|| TokenKind::Ident(word.to_string()))
            }
            b'0'..=b'9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let is_float = i + 1 < bytes.len() && bytes[i] == b'.' && bytes[i + 1].is_ascii_digit();
                if is_float {
                    i += 1;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                    TokenKind::Float(text[start..i].parse().expect("digits.digits is a valid float"))
                } else {
                    match text[start..i].parse() {
                        Ok(v) => TokenKind::Int(v),
                        Err(_) => {
                            return Err(ParseError::Lex {
                                offset: start,
                                message: "integer literal out of range".into(),
                            })
                        }
                    }
                }
            }
            b'\'' => {
                let mut value = String::new();
                i += 1;
                loop {
                    let Some(rel) = text[i..].find('\'') else {
                        return Err(ParseError::Lex {
                            offset: start,
                            message: "unterminated string literal".into(),
                        });
                    };
                    value.push_str(&text[i..i + rel]);
                    i += rel + 1;
                    if bytes.get(i) == Some(&b'\'') {
                        value.push('\'');
                        i += 1;
                    } else {
                        break;
                    }
                }
                TokenKind::Str(value)
            }
            _ => {
                let two = bytes.get(i + 1).copied();
                let (kind, len) = match (b, two) {
                    (b'.', Some(b'.')) => (TokenKind::DotDot, 2),
                    (b'<', Some(b'=')) => (TokenKind::Le, 2),
                    (b'<', Some(b'>')) => (TokenKind::Neq, 2),
                    (b'>', Some(b'=')) => (TokenKind::Ge, 2),
                    (b'(', _) => (TokenKind::LParen, 1),
                    (b')', _) => (TokenKind::RParen, 1),
                    (b'[', _) => (TokenKind::LBracket, 1),
                    (b']', _) => (TokenKind::RBracket, 1),
                    (b'{', _) => (TokenKind::LBrace, 1),
                    (b'}', _) => (TokenKind::RBrace, 1),
                    (b':', _) => (TokenKind::Colon, 1),
                    (b',', _) => (TokenKind::Comma, 1),
                    (b'.', _) => (TokenKind::Dot, 1),
                    (b'*', _) => (TokenKind::Star, 1),
                    (b'-', _) => (TokenKind::Minus, 1),
                    (b'<', _) => (TokenKind::Lt, 1),
                    (b'>', _) => (TokenKind::Gt, 1),
                    (b'=', _) => (TokenKind::Eq, 1),
                    _ => {
                        let ch = text[i..].chars().next().expect("i is on a char boundary");
                        return Err(ParseError::Lex {
                            offset: start,
                            message: format!("illegal character {ch:?}"),
                        });
                    }
                };
                i += len;
                kind
            }
        };
        tokens.push(Token {
            kind,
            lexeme: text[start..i].to_string(),
            offset: start,
        });
    }
    tokens.push(Token {
        kind: TokenKind::Eof,
        lexeme: String::new(),
        offset: text.len(),
    });
    Ok(tokens)
}
