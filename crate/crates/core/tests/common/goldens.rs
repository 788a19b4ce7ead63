/// (input, canonical text or exact error message)
pub const PARSER_GOLDEN: &[(&str, Result<&str, &str>)] = &[
    ("MATCH (n) RETURN n", Ok("MATCH (n) RETURN n")),
    ("match (n) return count(n)", Ok("MATCH (n) RETURN count(n)")),
    ("MATCH (n:Person) RETURN n.name LIMIT 5", Ok("MATCH (n:Person) RETURN n.name LIMIT 5")),
    (
        "MATCH (a)-[:KNOWS]->(b) RETURN b",
        Ok("MATCH (a)-[:KNOWS]->(b) RETURN b"),
    ),
    ("MATCH (a)-->(b) RETURN a, b", Ok("MATCH (a)-[]->(b) RETURN a, b")),
    ("MATCH (a)<--(b) RETURN b", Ok("MATCH (a)<-[]-(b) RETURN b")),
    (
        "MATCH (a:Person {name: 'ann'})<-[:KNOWS]-(b) RETURN b.name",
        Ok("MATCH (a:Person {name: 'ann'})<-[:KNOWS]-(b) RETURN b.name"),
    ),
    (
        "MATCH (a)-[*2]->(b) RETURN count(b)",
        Ok("MATCH (a)-[*2..2]->(b) RETURN count(b)"),
    ),
    (
        "MATCH (a {id: 3})-[:R*1..6]->(b) RETURN count(b)",
        Ok("MATCH (a {id: 3})-[:R*1..6]->(b) RETURN count(b)"),
    ),
    (
        "MATCH (a) WHERE a.age >= 18 AND a.name <> 'x' RETURN a",
        Ok("MATCH (a) WHERE a.age >= 18 AND a.name <> 'x' RETURN a"),
    ),
    (
        "MATCH (a), (b) WHERE a.x = b.x RETURN count(*)",
        Ok("MATCH (a), (b) WHERE a.x = b.x RETURN count(*)"),
    ),
    (
        "MATCH (a) WHERE a.v < -2.5 RETURN a.v",
        Ok("MATCH (a) WHERE a.v < -2.5 RETURN a.v"),
    ),
    (
        "CREATE (:Person {name: 'it''s', age: 41, ok: true, w: 1.0})",
        Ok("CREATE (:Person {name: 'it''s', age: 41, ok: true, w: 1.0})"),
    ),
    (
        "CREATE (a:A)-[:R {since: 3}]->(b:B), (b)-[:S]->(a)",
        Ok("CREATE (a:A)-[:R {since: 3}]->(b:B), (b)-[:S]->(a)"),
    ),
    (
        "CREATE (a)<-[:R]-(b)",
        Ok("CREATE (a)<-[:R]-(b)"),
    ),
    (
        "MATCH (a)-[e:R]->(b) RETURN count(b.x)",
        Ok("MATCH (a)-[e:R]->(b) RETURN count(b.x)"),
    ),
    // malformed
    ("MATCH (a RETURN a", Err("syntax error at byte 9: expected ')'")),
    ("MATCH (a) RETURN b", Err("unbound variable 'b' at byte 17")),
    ("MATCH (a) WHERE c.x = 1 RETURN a", Err("unbound variable 'c' at byte 16")),
    ("", Err("syntax error at byte 0: expected 'MATCH' or 'CREATE'")),
    ("MATCH (a)", Err("syntax error at byte 9: expected ',' or 'WHERE' or 'RETURN'")),
    ("MATCH (a) RETURN a LIMIT", Err("syntax error at byte 24: expected integer")),
    ("MATCH (a) RETURN a, count(a)", Err("semantic error at byte 17: aggregate and non-aggregate projections cannot be mixed")),
    ("MATCH (a)-[*0..2]->(b) RETURN b", Err("semantic error at byte 12: minimum hop count must be at least 1")),
    ("MATCH (a)-[*1..33]->(b) RETURN b", Err("semantic error at byte 12: maximum hop count 33 exceeds 32")),
    ("CREATE (a)-[]->(b)", Err("semantic error at byte 10: relationships in CREATE need a type")),
    ("CREATE (a)-[:R*2]->(b)", Err("semantic error at byte 14: variable-length relationships cannot be created")),
    ("MATCH (a) RETURN a.name 'x'", Err("syntax error at byte 24: expected ',' or 'LIMIT' or end of input")),
    ("MATCH (a {x: 1, x: 2}) RETURN a", Err("semantic error at byte 16: duplicate property key 'x'")),
    ("MATCH (a) WHERE a.s = 'open RETURN a", Err("syntax error at byte 22: unterminated string literal")),
    ("MATCH (a) RETURN a # comment", Err("syntax error at byte 19: illegal character '#'")),
];

/// A protocol session against a fresh registry: (request, exact response).
pub const PROTOCOL_GOLDEN: &[(&str, &str)] = &[
    ("PING", "PONG\n"),
    ("ping", "PONG\n"),
    ("NOSUCH", "ERR unknown command\n"),
    ("", "ERR empty command\n"),
    ("PING now", "ERR PING takes no arguments\n"),
    ("QUERY g MATCH (n) RETURN count(n)", "OK 1\ncount(n)\n0\nEND\n"),
    ("QUERY g CREATE (:A)", "OK 0\nEND\n"),
    (
        "QUERY g CREATE (a:Person {name: 'Ann Lee', age: 41})-[:KNOWS {since: 2.5}]->(b:Person {name: 'bo', age: 7})",
        "OK 0\nEND\n",
    ),
    ("QUERY g MATCH (n) RETURN count(n)", "OK 1\ncount(n)\n3\nEND\n"),
    (
        "QUERY g MATCH (a:Person)-[:KNOWS]->(b) RETURN a.name, b, b.age",
        "OK 1\na.name\tb\tb.age\nAnn%20Lee\t#2\t7\nEND\n",
    ),
    (
        "QUERY g MATCH (n:Person) WHERE n.age > 10 RETURN n.name, n.missing",
        "OK 1\nn.name\tn.missing\nAnn%20Lee\tnull\nEND\n",
    ),
    ("QUERY g MATCH (n:Nobody) RETURN n", "OK 0\nn\nEND\n"),
    ("QUERY g MATCH (n) RETURN n LIMIT 2", "OK 2\nn\n#0\n#1\nEND\n"),
    ("QUERY g MATCH (a RETURN a", "ERR syntax error at byte 9: expected ')'\n"),
    ("QUERY g MATCH (a) RETURN b", "ERR unbound variable 'b' at byte 17\n"),
    (
        "QUERY g MATCH (a) WHERE a.age > 'x' RETURN a",
        "ERR type error: cannot compare integer with string in 'a.age > 'x''\n",
    ),
    ("QUERY bad/name MATCH (a) RETURN a", "ERR invalid graph name 'bad/name'\n"),
    ("QUERY g", "ERR usage: QUERY <graph> <cypher>\n"),
    ("SAVE g", "ERR usage: SAVE <graph> <path>\n"),
    ("QUERY other MATCH (a)-[*1..3]->(b) RETURN count(b)", "OK 1\ncount(b)\n0\nEND\n"),
];
