//! Machine description language: a line-oriented textual format for machine
//! graphs, with positioned diagnostics and a round-tripping pretty-printer.
//!
//! ```text
//! machine NAME over Z|Q|Ralg|Rstream [equational]
//! param NAME = <scalar literal> | stream(NAME)
//! node ID: input -> ID
//! node ID: compute CELL := EXPR [, CELL := EXPR ...] -> ID
//! node ID: branch EXPR >= 0 ? ID : ID     (sign machines)
//! node ID: branch EXPR = 0 ? ID : ID      (equational machines)
//! node ID: shift left|right -> ID
//! node ID: output [CELL, ...] | output
//! node ID: oracle [CELL, ...] -> CELL -> ID
//! ```
//!
//! Cells are written `x0`, `x1`, `x-1`, ... (the sign must be adjacent to
//! `x`); `#` starts a comment. Expressions use `+ - * / ^` with the usual
//! precedence; constants fold, so `1/1000` inside a branch test is a
//! rational constant rather than a division.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::machine::{
    validate, Edge, EdgeLabel, Expr, Machine, Node, NodePayload, Placement, ShiftDir, Violation,
};
use crate::scalar::stream::StreamVal;
use crate::scalar::{parse_literal, Backend, Scalar};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("parse error at {line}:{col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

#[derive(Debug, Error)]
pub enum DslError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("machine fails validation: {}", render_violations(.0))]
    Validation(Vec<Violation>),
}

fn render_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Int(BigInt),
    Cell(i64),
    Sym(&'static str),
}

#[derive(Clone, Debug)]
struct SpannedTok {
    tok: Tok,
    col: usize,
}

fn lex_line(line: &str, lineno: usize) -> Result<Vec<SpannedTok>, ParseError> {
    let mut out = Vec::new();
    let bytes: Vec<char> = line.chars().collect();
    let mut i = 0usize;
    while i < bytes.len() {
        let c = bytes[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c == '#' {
            break;
        }
        if c == 'x' {
            // cell reference: x immediately followed by digits or -digits
            let mut j = i + 1;
            let neg = j < bytes.len() && bytes[j] == '-';
            if neg {
                j += 1;
            }
            let start_digits = j;
            while j < bytes.len() && bytes[j].is_ascii_digit() {
                j += 1;
            }
            if j > start_digits {
                let text: String = bytes[i + 1..j].iter().collect();
                let v: i64 = text.parse().map_err(|_| ParseError {
                    line: lineno,
                    col,
                    message: format!("cell index out of range: x{text}"),
                })?;
                out.push(SpannedTok { tok: Tok::Cell(v), col });
                i = j;
                continue;
            }
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let mut j = i;
            while j < bytes.len() && (bytes[j].is_ascii_alphanumeric() || bytes[j] == '_') {
                j += 1;
            }
            let text: String = bytes[i..j].iter().collect();
            out.push(SpannedTok {
                tok: Tok::Ident(text),
                col,
            });
            i = j;
            continue;
        }
        if c.is_ascii_digit() {
            let mut j = i;
            while j < bytes.len() && bytes[j].is_ascii_digit() {
                j += 1;
            }
            let text: String = bytes[i..j].iter().collect();
            out.push(SpannedTok {
                tok: Tok::Int(text.parse().expect("digit run parses")),
                col,
            });
            i = j;
            continue;
        }
        let two: String = bytes[i..(i + 2).min(bytes.len())].iter().collect();
        let sym2 = match two.as_str() {
            ":=" => Some(":="),
            "->" => Some("->"),
            ">=" => Some(">="),
            _ => None,
        };
        if let Some(s) = sym2 {
            out.push(SpannedTok { tok: Tok::Sym(s), col });
            i += 2;
            continue;
        }
        let sym1 = match c {
            ':' => ":",
            '?' => "?",
            ',' => ",",
            '[' => "[",
            ']' => "]",
            '(' => "(",
            ')' => ")",
            '+' => "+",
            '-' => "-",
            '*' => "*",
            '/' => "/",
            '^' => "^",
            '=' => "=",
            _ => {
                return Err(ParseError {
                    line: lineno,
                    col,
                    message: format!("unexpected character `{c}`"),
                })
            }
        };
        out.push(SpannedTok { tok: Tok::Sym(sym1), col });
        i += 1;
    }
    Ok(out)
}

struct Cursor<'a> {
    toks: &'a [SpannedTok],
    pos: usize,
    line: usize,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn col(&self) -> usize {
        self.toks
            .get(self.pos)
            .map(|t| t.col)
            .unwrap_or_else(|| self.toks.last().map(|t| t.col + 1).unwrap_or(1))
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            line: self.line,
            col: self.col(),
            message: message.into(),
        })
    }

    fn next(&mut self) -> Option<&'a SpannedTok> {
        let t = self.toks.get(self.pos);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect_sym(&mut self, s: &'static str) -> Result<(), ParseError> {
        match self.peek() {
            Some(Tok::Sym(t)) if *t == s => {
                self.pos += 1;
                Ok(())
            }
            _ => self.err(format!("expected `{s}`")),
        }
    }

    fn expect_ident(&mut self) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Ident(name)) => {
                let name = name.clone();
                self.pos += 1;
                Ok(name)
            }
            _ => self.err("expected an identifier"),
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn expect_end(&self) -> Result<(), ParseError> {
        if self.at_end() {
            Ok(())
        } else {
            self.err("unexpected trailing tokens")
        }
    }
}

fn fold(e: Expr) -> Expr {
    fn as_const(e: &Expr) -> Option<&BigRational> {
        match e {
            Expr::Const(c) => Some(c),
            _ => None,
        }
    }
    match e {
        Expr::Add(a, b) => {
            let (a, b) = (fold(*a), fold(*b));
            if let (Some(x), Some(y)) = (as_const(&a), as_const(&b)) {
                return Expr::Const(x + y);
            }
            Expr::Add(Box::new(a), Box::new(b))
        }
        Expr::Sub(a, b) => {
            let (a, b) = (fold(*a), fold(*b));
            if let (Some(x), Some(y)) = (as_const(&a), as_const(&b)) {
                return Expr::Const(x - y);
            }
            Expr::Sub(Box::new(a), Box::new(b))
        }
        Expr::Mul(a, b) => {
            let (a, b) = (fold(*a), fold(*b));
            if let (Some(x), Some(y)) = (as_const(&a), as_const(&b)) {
                return Expr::Const(x * y);
            }
            Expr::Mul(Box::new(a), Box::new(b))
        }
        Expr::Div(a, b) => {
            let (a, b) = (fold(*a), fold(*b));
            if let (Some(x), Some(y)) = (as_const(&a), as_const(&b)) {
                if !y.is_zero() {
                    return Expr::Const(x / y);
                }
            }
            Expr::Div(Box::new(a), Box::new(b))
        }
        Expr::Neg(a) => {
            let a = fold(*a);
            if let Some(x) = as_const(&a) {
                return Expr::Const(-x.clone());
            }
            Expr::Neg(Box::new(a))
        }
        Expr::Pow(a, k) => {
            let a = fold(*a);
            if let Some(x) = as_const(&a) {
                let mut acc = BigRational::from_integer(1.into());
                for _ in 0..k {
                    acc *= x;
                }
                return Expr::Const(acc);
            }
            Expr::Pow(Box::new(a), k)
        }
        other => other,
    }
}

const MAX_DSL_POW: u32 = 1_000;

fn parse_expr(c: &mut Cursor, params: &[(String, Scalar)]) -> Result<Expr, ParseError> {
    let e = parse_sum(c, params)?;
    Ok(fold(e))
}

fn parse_sum(c: &mut Cursor, params: &[(String, Scalar)]) -> Result<Expr, ParseError> {
    let mut acc = parse_term(c, params)?;
    loop {
        match c.peek() {
            Some(Tok::Sym("+")) => {
                c.pos += 1;
                let rhs = parse_term(c, params)?;
                acc = Expr::Add(Box::new(acc), Box::new(rhs));
            }
            Some(Tok::Sym("-")) => {
                c.pos += 1;
                let rhs = parse_term(c, params)?;
                acc = Expr::Sub(Box::new(acc), Box::new(rhs));
            }
            _ => return Ok(acc),
        }
    }
}

fn parse_term(c: &mut Cursor, params: &[(String, Scalar)]) -> Result<Expr, ParseError> {
    let mut acc = parse_factor(c, params)?;
    loop {
        match c.peek() {
            Some(Tok::Sym("*")) => {
                c.pos += 1;
                let rhs = parse_factor(c, params)?;
                acc = Expr::Mul(Box::new(acc), Box::new(rhs));
            }
            Some(Tok::Sym("/")) => {
                c.pos += 1;
                let rhs = parse_factor(c, params)?;
                acc = Expr::Div(Box::new(acc), Box::new(rhs));
            }
            _ => return Ok(acc),
        }
    }
}

fn parse_factor(c: &mut Cursor, params: &[(String, Scalar)]) -> Result<Expr, ParseError> {
    if let Some(Tok::Sym("-")) = c.peek() {
        c.pos += 1;
        let inner = parse_factor(c, params)?;
        return Ok(Expr::Neg(Box::new(inner)));
    }
    let mut base = parse_primary(c, params)?;
    if let Some(Tok::Sym("^")) = c.peek() {
        c.pos += 1;
        let col = c.col();
        match c.next().map(|t| &t.tok) {
            Some(Tok::Int(k)) => {
                let k: u32 = k.try_into().map_err(|_| ParseError {
                    line: c.line,
                    col,
                    message: "exponent out of range".into(),
                })?;
                if k > MAX_DSL_POW {
                    return Err(ParseError {
                        line: c.line,
                        col,
                        message: format!("exponent {k} exceeds the limit {MAX_DSL_POW}"),
                    });
                }
                base = Expr::Pow(Box::new(base), k);
            }
            _ => {
                return Err(ParseError {
                    line: c.line,
                    col,
                    message: "expected a nonnegative integer exponent".into(),
                })
            }
        }
    }
    Ok(base)
}

fn parse_primary(c: &mut Cursor, params: &[(String, Scalar)]) -> Result<Expr, ParseError> {
    let col = c.col();
    match c.peek().cloned() {
        Some(Tok::Sym("(")) => {
            c.pos += 1;
            let e = parse_sum(c, params)?;
            c.expect_sym(")")?;
            Ok(e)
        }
        Some(Tok::Int(v)) => {
            c.pos += 1;
            Ok(Expr::Const(BigRational::from_integer(v)))
        }
        Some(Tok::Cell(i)) => {
            c.pos += 1;
            Ok(Expr::Cell(i))
        }
        Some(Tok::Ident(name)) => {
            c.pos += 1;
            match params.iter().position(|(n, _)| *n == name) {
                Some(i) => Ok(Expr::Param(i)),
                None => Err(ParseError {
                    line: c.line,
                    col,
                    message: format!("unknown parameter `{name}`"),
                }),
            }
        }
        _ => c.err("expected an expression"),
    }
}

fn parse_cell_list(c: &mut Cursor) -> Result<Vec<i64>, ParseError> {
    c.expect_sym("[")?;
    let mut cells = Vec::new();
    if let Some(Tok::Sym("]")) = c.peek() {
        c.pos += 1;
        return Ok(cells);
    }
    loop {
        match c.next().map(|t| &t.tok) {
            Some(Tok::Cell(i)) => cells.push(*i),
            _ => return c.err("expected a cell like x1"),
        }
        match c.peek() {
            Some(Tok::Sym(",")) => {
                c.pos += 1;
            }
            Some(Tok::Sym("]")) => {
                c.pos += 1;
                return Ok(cells);
            }
            _ => return c.err("expected `,` or `]`"),
        }
    }
}

enum PendingEdge {
    Next(String),
    Branch { yes: String, no: String },
    None,
}

/// Parse a machine description. The result may still carry unbound stream
/// parameters (budget-0 placeholders) until [`Machine::bind_stream`] is
/// called; everything else is fully validated.
pub fn parse_machine(src: &str) -> Result<Machine, DslError> {
    let mut name = String::new();
    let mut backend = None;
    let mut equational = false;
    let mut params: Vec<(String, Scalar)> = Vec::new();
    let mut nodes: Vec<Node> = Vec::new();
    let mut node_names: Vec<String> = Vec::new();
    let mut pendings: Vec<(PendingEdge, usize)> = Vec::new();

    for (idx, raw) in src.lines().enumerate() {
        let lineno = idx + 1;
        let toks = lex_line(raw, lineno)?;
        if toks.is_empty() {
            continue;
        }
        // bounds recursion depth in the expression parser
        if toks.len() > 1000 {
            return Err(ParseError {
                line: lineno,
                col: 1,
                message: "line has too many tokens".into(),
            }
            .into());
        }
        let mut c = Cursor {
            toks: &toks,
            pos: 0,
            line: lineno,
        };
        let head = c.expect_ident()?;
        match head.as_str() {
            "machine" => {
                if backend.is_some() {
                    return Err(c.err::<()>("duplicate machine header").unwrap_err().into());
                }
                name = c.expect_ident()?;
                let over = c.expect_ident()?;
                if over != "over" {
                    return Err(ParseError {
                        line: lineno,
                        col: c.col(),
                        message: "expected `over`".into(),
                    }
                    .into());
                }
                let col = c.col();
                let b = c.expect_ident()?;
                backend = Some(Backend::parse(&b).ok_or(ParseError {
                    line: lineno,
                    col,
                    message: format!("unknown backend `{b}` (use Z, Q, Ralg, Rstream)"),
                })?);
                if let Some(Tok::Ident(e)) = c.peek() {
                    if e == "equational" {
                        equational = true;
                        c.pos += 1;
                    }
                }
                c.expect_end()?;
            }
            "param" => {
                let pname = c.expect_ident()?;
                c.expect_sym("=")?;
                // the literal may contain commas/parens: take the raw remainder
                let eq_pos = raw.find('=').expect("lexer saw `=`");
                let rest = raw[eq_pos + 1..].trim();
                let rest = rest.split('#').next().unwrap_or("").trim();
                let value = if let Some(inner) =
                    rest.strip_prefix("stream(").and_then(|r| r.strip_suffix(')'))
                {
                    // placeholder until bind_stream supplies real digits
                    Scalar::make_stream(inner.trim(), BigInt::zero(), |_| 0, 0)
                } else {
                    parse_literal(rest).map_err(|e| ParseError {
                        line: lineno,
                        col: eq_pos + 2,
                        message: e.to_string(),
                    })?
                };
                if params.iter().any(|(n, _)| *n == pname) {
                    return Err(ParseError {
                        line: lineno,
                        col: 1,
                        message: format!("duplicate parameter `{pname}`"),
                    }
                    .into());
                }
                params.push((pname, value));
            }
            "node" => {
                let nname = c.expect_ident()?;
                if node_names.contains(&nname) {
                    return Err(ParseError {
                        line: lineno,
                        col: 1,
                        message: format!("duplicate node `{nname}`"),
                    }
                    .into());
                }
                c.expect_sym(":")?;
                let kind_col = c.col();
                let kind = c.expect_ident()?;
                let (payload, pending) = match kind.as_str() {
                    "input" => {
                        c.expect_sym("->")?;
                        let target = c.expect_ident()?;
                        (NodePayload::Input, PendingEdge::Next(target))
                    }
                    "compute" => {
                        let mut assigns = Vec::new();
                        loop {
                            let cell = match c.next().map(|t| &t.tok) {
                                Some(Tok::Cell(i)) => *i,
                                _ => {
                                    return Err(c
                                        .err::<()>("expected a target cell")
                                        .unwrap_err()
                                        .into())
                                }
                            };
                            c.expect_sym(":=")?;
                            let e = parse_expr(&mut c, &params)?;
                            assigns.push((cell, e));
                            match c.peek() {
                                Some(Tok::Sym(",")) => {
                                    c.pos += 1;
                                }
                                Some(Tok::Sym("->")) => {
                                    c.pos += 1;
                                    break;
                                }
                                _ => {
                                    return Err(c
                                        .err::<()>("expected `,` or `->`")
                                        .unwrap_err()
                                        .into())
                                }
                            }
                        }
                        let target = c.expect_ident()?;
                        (NodePayload::Compute { assigns }, PendingEdge::Next(target))
                    }
                    "branch" => {
                        let test = parse_expr(&mut c, &params)?;
                        let op_col = c.col();
                        let op = match c.next().map(|t| &t.tok) {
                            Some(Tok::Sym(">=")) => ">=",
                            Some(Tok::Sym("=")) => "=",
                            _ => {
                                return Err(ParseError {
                                    line: lineno,
                                    col: op_col,
                                    message: "expected `>=` or `=`".into(),
                                }
                                .into())
                            }
                        };
                        if equational && op == ">=" {
                            return Err(ParseError {
                                line: lineno,
                                col: op_col,
                                message: "equational machines branch on `= 0`, not `>= 0`".into(),
                            }
                            .into());
                        }
                        if !equational && op == "=" {
                            return Err(ParseError {
                                line: lineno,
                                col: op_col,
                                message:
                                    "sign machines branch on `>= 0`; declare the machine `equational` for `= 0`"
                                        .into(),
                            }
                            .into());
                        }
                        match c.next().map(|t| &t.tok) {
                            Some(Tok::Int(z)) if z.is_zero() => {}
                            _ => {
                                return Err(ParseError {
                                    line: lineno,
                                    col: op_col,
                                    message: "branch tests compare against 0".into(),
                                }
                                .into())
                            }
                        }
                        c.expect_sym("?")?;
                        let yes = c.expect_ident()?;
                        c.expect_sym(":")?;
                        let no = c.expect_ident()?;
                        (NodePayload::Branch { test }, PendingEdge::Branch { yes, no })
                    }
                    "shift" => {
                        let dcol = c.col();
                        let d = c.expect_ident()?;
                        let dir = match d.as_str() {
                            "left" => ShiftDir::Left,
                            "right" => ShiftDir::Right,
                            _ => {
                                return Err(ParseError {
                                    line: lineno,
                                    col: dcol,
                                    message: "expected `left` or `right`".into(),
                                }
                                .into())
                            }
                        };
                        c.expect_sym("->")?;
                        let target = c.expect_ident()?;
                        (NodePayload::Shift { dir }, PendingEdge::Next(target))
                    }
                    "output" => {
                        let cells = if let Some(Tok::Sym("[")) = c.peek() {
                            Some(parse_cell_list(&mut c)?)
                        } else {
                            None
                        };
                        (NodePayload::Output { cells }, PendingEdge::None)
                    }
                    "oracle" => {
                        let query = parse_cell_list(&mut c)?;
                        c.expect_sym("->")?;
                        let target = match c.next().map(|t| &t.tok) {
                            Some(Tok::Cell(i)) => *i,
                            _ => {
                                return Err(c
                                    .err::<()>("expected a target cell")
                                    .unwrap_err()
                                    .into())
                            }
                        };
                        c.expect_sym("->")?;
                        let next = c.expect_ident()?;
                        (
                            NodePayload::Oracle { query, target },
                            PendingEdge::Next(next),
                        )
                    }
                    other => {
                        return Err(ParseError {
                            line: lineno,
                            col: kind_col,
                            message: format!("unknown node kind `{other}`"),
                        }
                        .into())
                    }
                };
                c.expect_end()?;
                nodes.push(Node {
                    label: nname.clone(),
                    payload,
                });
                node_names.push(nname);
                pendings.push((pending, lineno));
            }
            other => {
                return Err(ParseError {
                    line: lineno,
                    col: 1,
                    message: format!("expected `machine`, `param`, or `node`, got `{other}`"),
                }
                .into())
            }
        }
    }

    let backend = backend.ok_or(ParseError {
        line: 1,
        col: 1,
        message: "missing `machine NAME over BACKEND` header".into(),
    })?;

    let mut edges = Vec::new();
    let resolve = |name: &str, line: usize| -> Result<usize, ParseError> {
        node_names.iter().position(|n| n == name).ok_or(ParseError {
            line,
            col: 1,
            message: format!("unknown node `{name}`"),
        })
    };
    for (from, (pending, line)) in pendings.iter().enumerate() {
        match pending {
            PendingEdge::Next(t) => edges.push(Edge {
                from,
                label: EdgeLabel::Next,
                to: resolve(t, *line)?,
            }),
            PendingEdge::Branch { yes, no } => {
                edges.push(Edge {
                    from,
                    label: EdgeLabel::BranchTrue,
                    to: resolve(yes, *line)?,
                });
                edges.push(Edge {
                    from,
                    label: EdgeLabel::BranchFalse,
                    to: resolve(no, *line)?,
                });
            }
            PendingEdge::None => {}
        }
    }

    let m = Machine {
        name,
        backend,
        equational,
        nodes,
        edges,
        params,
        placement: Placement::LengthPrefixed,
    };
    let violations = validate(&m);
    if !violations.is_empty() {
        return Err(DslError::Validation(violations));
    }
    Ok(m)
}

/// Render a machine back into the description language. Parsing the output
/// yields a structurally equal machine.
pub fn print_machine(m: &Machine) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "machine {} over {}{}\n",
        if m.name.is_empty() { "unnamed" } else { &m.name },
        m.backend.name(),
        if m.equational { " equational" } else { "" }
    ));
    let param_names: Vec<String> = m.params.iter().map(|(n, _)| n.clone()).collect();
    for (name, value) in &m.params {
        let lit = match value {
            Scalar::Stream(StreamVal::Affine { src, scale, shift })
                if scale.is_one() && shift.is_zero() =>
            {
                format!("stream({})", src.name())
            }
            other => other.render(),
        };
        out.push_str(&format!("param {name} = {lit}\n"));
    }
    let next_of = |i: usize, label: EdgeLabel| -> Option<&str> {
        m.edges
            .iter()
            .find(|e| e.from == i && e.label == label)
            .map(|e| m.nodes[e.to].label.as_str())
    };
    for (i, node) in m.nodes.iter().enumerate() {
        let l = &node.label;
        match &node.payload {
            NodePayload::Input => {
                out.push_str(&format!(
                    "node {l}: input -> {}\n",
                    next_of(i, EdgeLabel::Next).unwrap_or("?")
                ));
            }
            NodePayload::Compute { assigns } => {
                let body = assigns
                    .iter()
                    .map(|(c, e)| format!("x{c} := {}", e.render(&param_names)))
                    .collect::<Vec<_>>()
                    .join(", ");
                out.push_str(&format!(
                    "node {l}: compute {body} -> {}\n",
                    next_of(i, EdgeLabel::Next).unwrap_or("?")
                ));
            }
            NodePayload::Branch { test } => {
                let op = if m.equational { "=" } else { ">=" };
                out.push_str(&format!(
                    "node {l}: branch {} {op} 0 ? {} : {}\n",
                    test.render(&param_names),
                    next_of(i, EdgeLabel::BranchTrue).unwrap_or("?"),
                    next_of(i, EdgeLabel::BranchFalse).unwrap_or("?"),
                ));
            }
            NodePayload::Shift { dir } => {
                out.push_str(&format!(
                    "node {l}: shift {} -> {}\n",
                    match dir {
                        ShiftDir::Left => "left",
                        ShiftDir::Right => "right",
                    },
                    next_of(i, EdgeLabel::Next).unwrap_or("?")
                ));
            }
            NodePayload::Output { cells } => match cells {
                None => out.push_str(&format!("node {l}: output\n")),
                Some(cs) => {
                    let body = cs
                        .iter()
                        .map(|c| format!("x{c}"))
                        .collect::<Vec<_>>()
                        .join(", ");
                    out.push_str(&format!("node {l}: output [{body}]\n"));
                }
            },
            NodePayload::Oracle { query, target } => {
                let body = query
                    .iter()
                    .map(|c| format!("x{c}"))
                    .collect::<Vec<_>>()
                    .join(", ");
                out.push_str(&format!(
                    "node {l}: oracle [{body}] -> x{target} -> {}\n",
                    next_of(i, EdgeLabel::Next).unwrap_or("?")
                ));
            }
        }
    }
    out
}

/// True when the machine still carries an unbound stream placeholder
/// (a budget-0 stream parameter produced by `param NAME = stream(...)`).
pub fn has_unbound_stream(m: &Machine) -> bool {
    m.params.iter().any(|(_, v)| {
        matches!(
            v,
            Scalar::Stream(StreamVal::Affine { src, .. }) if src.budget() == 0
        )
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::machine::{run, RunOutcome, Word};

    #[test]
    fn identity_machine_parses_to_two_nodes() {
        let m = parse_machine(corpus::IDENTITY).unwrap();
        assert_eq!(m.nodes.len(), 2);
        let out = run(&m, Word::from_ints(&[3, 5]), 100, None).unwrap();
        assert!(out
            .halted_output()
            .unwrap()
            .eq_exact(&Word::from_ints(&[3, 5]))
            .unwrap());
    }

    #[test]
    fn duplicate_branch_targets_are_accepted() {
        let src = "machine dup over Q\n\
                   node a: input -> b\n\
                   node b: branch x1 >= 0 ? c : c\n\
                   node c: output\n";
        let m = parse_machine(src).unwrap();
        assert_eq!(m.nodes.len(), 3);
    }

    #[test]
    fn sign_branch_under_equational_is_rejected() {
        let src = "machine bad over Q equational\n\
                   node a: input -> b\n\
                   node b: branch x1 >= 0 ? c : c\n\
                   node c: output\n";
        match parse_machine(src) {
            Err(DslError::Parse(e)) => {
                assert_eq!(e.line, 3);
                assert!(e.message.contains("equational"));
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn diagnostics_carry_positions() {
        let src =
            "machine m over Q\nnode a: input -> b\nnode b: compute x1 := @ -> c\nnode c: output\n";
        match parse_machine(src) {
            Err(DslError::Parse(e)) => {
                assert_eq!(e.line, 3);
                assert!(e.col > 0);
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn newton_runs_to_577_408() {
        let m = parse_machine(corpus::NEWTON_SQRT2).unwrap();
        let out = run(&m, Word::from_ints(&[1]), 1000, None).unwrap();
        match out {
            RunOutcome::Halted { output, .. } => {
                assert!(output
                    .eq_exact(&Word::new(vec![crate::scalar::Scalar::rat(577, 408)]).unwrap())
                    .unwrap());
            }
            other => panic!("expected halt, got {other:?}"),
        }
    }

    #[test]
    fn mandelbrot_origin_never_escapes() {
        let m = parse_machine(corpus::MANDELBROT).unwrap();
        let out = run(&m, Word::from_ints(&[0, 0]), 10_000, None).unwrap();
        assert!(matches!(out, RunOutcome::OutOfBudget { .. }));
    }

    #[test]
    fn corpus_round_trips_through_printer() {
        for (name, src) in corpus::ALL {
            let m = parse_machine(src).unwrap_or_else(|e| panic!("{name}: {e}"));
            let printed = print_machine(&m);
            let back = parse_machine(&printed).unwrap_or_else(|e| panic!("{name} reparse: {e}"));
            assert!(m.structurally_eq(&back), "{name} did not round trip");
        }
    }

    #[test]
    fn negative_cell_indices_lex_adjacent() {
        let src = "machine neg over Q\n\
                   node a: input -> b\n\
                   node b: compute x-1 := x1+1 -> c\n\
                   node c: output [x-1]\n";
        let m = parse_machine(src).unwrap();
        let out = run(&m, Word::from_ints(&[4]), 100, None).unwrap();
        assert!(out
            .halted_output()
            .unwrap()
            .eq_exact(&Word::from_ints(&[5]))
            .unwrap());
    }
}
