//! Machine <-> word coding: a machine is a finite object with ring-element
//! parameters, so it flattens into a self-delimiting word whose entries are
//! scalars. Node ids are canonicalized before encoding, making the code
//! deterministic.

use std::collections::VecDeque;

use num_bigint::BigInt;
use thiserror::Error;

use super::{
    validate, Edge, EdgeLabel, Expr, Machine, Node, NodePayload, Placement, ShiftDir, Word,
};
use crate::scalar::{Backend, Scalar, ScalarKind};

pub const FORMAT_VERSION: i64 = 1;

const MAX_COUNT: usize = 10_000;
const MAX_EXPR_NODES: usize = 10_000;
const MAX_EXPR_DEPTH: usize = 64;
const MAX_POW: u32 = 1_000;
const MAX_CELL: i64 = 1 << 32;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum EncodeError {
    #[error("parameter `{0}` is a stream scalar and cannot be encoded")]
    UnencodableParameter(String),
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("decode error at entry {pos}: {reason}")]
pub struct DecodeError {
    pub pos: usize,
    pub reason: String,
}

/// Canonical node order: breadth-first from the input node following
/// Next, then 1-edges, then 0-edges; unreachable nodes keep insertion order.
pub fn canonical_order(m: &Machine) -> Vec<usize> {
    let n = m.nodes.len();
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    if let Some(start) = m.input_node() {
        let mut next = vec![None; n];
        let mut btrue = vec![None; n];
        let mut bfalse = vec![None; n];
        for e in &m.edges {
            match e.label {
                EdgeLabel::Next => next[e.from] = Some(e.to),
                EdgeLabel::BranchTrue => btrue[e.from] = Some(e.to),
                EdgeLabel::BranchFalse => bfalse[e.from] = Some(e.to),
            }
        }
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for succ in [next[v], btrue[v], bfalse[v]].into_iter().flatten() {
                if !seen[succ] {
                    seen[succ] = true;
                    queue.push_back(succ);
                }
            }
        }
    }
    for i in 0..n {
        if !seen[i] {
            order.push(i);
        }
    }
    order
}

/// Renumber nodes into canonical order and sort edges; labels become n0, n1, ...
pub fn canonicalize(m: &Machine) -> Machine {
    let order = canonical_order(m);
    let mut rank = vec![0usize; m.nodes.len()];
    for (new, &old) in order.iter().enumerate() {
        rank[old] = new;
    }
    let nodes: Vec<Node> = order
        .iter()
        .enumerate()
        .map(|(new, &old)| Node {
            label: format!("n{new}"),
            payload: m.nodes[old].payload.clone(),
        })
        .collect();
    let mut edges: Vec<Edge> = m
        .edges
        .iter()
        .map(|e| Edge {
            from: rank[e.from],
            label: e.label,
            to: rank[e.to],
        })
        .collect();
    edges.sort_by_key(|e| (e.from, e.label, e.to));
    Machine {
        name: m.name.clone(),
        backend: m.backend,
        equational: m.equational,
        nodes,
        edges,
        params: m.params.clone(),
        placement: m.placement,
    }
}

/// Structural equality of canonicalized machines, ignoring labels, the
/// machine name, and parameter names.
pub fn structural_eq_canonical(a: &Machine, b: &Machine) -> bool {
    if a.backend != b.backend
        || a.equational != b.equational
        || a.placement != b.placement
        || a.nodes.len() != b.nodes.len()
        || a.edges != b.edges
        || a.params.len() != b.params.len()
    {
        return false;
    }
    for ((_, x), (_, y)) in a.params.iter().zip(&b.params) {
        if !x.repr_eq(y) {
            return false;
        }
    }
    a.nodes
        .iter()
        .zip(&b.nodes)
        .all(|(x, y)| payload_eq(&x.payload, &y.payload))
}

fn payload_eq(a: &NodePayload, b: &NodePayload) -> bool {
    match (a, b) {
        (NodePayload::Input, NodePayload::Input) => true,
        (NodePayload::Compute { assigns: x }, NodePayload::Compute { assigns: y }) => x == y,
        (NodePayload::Branch { test: x }, NodePayload::Branch { test: y }) => x == y,
        (NodePayload::Shift { dir: x }, NodePayload::Shift { dir: y }) => x == y,
        (NodePayload::Output { cells: x }, NodePayload::Output { cells: y }) => x == y,
        (
            NodePayload::Oracle { query: qx, target: tx },
            NodePayload::Oracle { query: qy, target: ty },
        ) => qx == qy && tx == ty,
        _ => false,
    }
}

fn push_int(out: &mut Vec<Scalar>, v: i64) {
    out.push(Scalar::int(v));
}

fn encode_expr(out: &mut Vec<Scalar>, e: &Expr) {
    match e {
        Expr::Const(c) => {
            push_int(out, 0);
            out.push(Scalar::Rat(c.clone()));
        }
        Expr::Cell(i) => {
            push_int(out, 1);
            push_int(out, *i);
        }
        Expr::Param(p) => {
            push_int(out, 2);
            push_int(out, *p as i64);
        }
        Expr::Add(a, b) => {
            push_int(out, 3);
            encode_expr(out, a);
            encode_expr(out, b);
        }
        Expr::Sub(a, b) => {
            push_int(out, 4);
            encode_expr(out, a);
            encode_expr(out, b);
        }
        Expr::Mul(a, b) => {
            push_int(out, 5);
            encode_expr(out, a);
            encode_expr(out, b);
        }
        Expr::Div(a, b) => {
            push_int(out, 6);
            encode_expr(out, a);
            encode_expr(out, b);
        }
        Expr::Neg(a) => {
            push_int(out, 7);
            encode_expr(out, a);
        }
        Expr::Pow(a, k) => {
            push_int(out, 8);
            push_int(out, *k as i64);
            encode_expr(out, a);
        }
    }
}

/// Flatten a machine into a word. Requires all parameters encodable
/// (integer, rational, or algebraic; streams are refused).
pub fn encode_machine(m: &Machine) -> Result<Word, EncodeError> {
    for (name, value) in &m.params {
        if value.kind() == ScalarKind::Stream {
            return Err(EncodeError::UnencodableParameter(name.clone()));
        }
    }
    let c = canonicalize(m);
    let mut out: Vec<Scalar> = Vec::new();
    push_int(&mut out, FORMAT_VERSION);
    push_int(
        &mut out,
        match c.backend {
            Backend::IntegerRing => 0,
            Backend::RationalField => 1,
            Backend::RealAlgebraicField => 2,
            Backend::StreamExtension => 3,
        },
    );
    push_int(&mut out, i64::from(c.equational));
    push_int(
        &mut out,
        match c.placement {
            Placement::LengthPrefixed => 0,
            Placement::Raw => 1,
        },
    );
    push_int(&mut out, c.nodes.len() as i64);
    push_int(&mut out, c.edges.len() as i64);
    push_int(&mut out, c.params.len() as i64);
    for node in &c.nodes {
        match &node.payload {
            NodePayload::Input => push_int(&mut out, 0),
            NodePayload::Compute { assigns } => {
                push_int(&mut out, 1);
                push_int(&mut out, assigns.len() as i64);
                for (cell, e) in assigns {
                    push_int(&mut out, *cell);
                    encode_expr(&mut out, e);
                }
            }
            NodePayload::Branch { test } => {
                push_int(&mut out, 2);
                encode_expr(&mut out, test);
            }
            NodePayload::Shift { dir } => {
                push_int(&mut out, 3);
                push_int(&mut out, matches!(dir, ShiftDir::Right).into());
            }
            NodePayload::Output { cells } => {
                push_int(&mut out, 4);
                match cells {
                    None => push_int(&mut out, 0),
                    Some(cs) => {
                        push_int(&mut out, 1);
                        push_int(&mut out, cs.len() as i64);
                        for c in cs {
                            push_int(&mut out, *c);
                        }
                    }
                }
            }
            NodePayload::Oracle { query, target } => {
                push_int(&mut out, 5);
                push_int(&mut out, query.len() as i64);
                for c in query {
                    push_int(&mut out, *c);
                }
                push_int(&mut out, *target);
            }
        }
    }
    for e in &c.edges {
        push_int(&mut out, e.from as i64);
        push_int(
            &mut out,
            match e.label {
                EdgeLabel::Next => 0,
                EdgeLabel::BranchTrue => 1,
                EdgeLabel::BranchFalse => 2,
            },
        );
        push_int(&mut out, e.to as i64);
    }
    for (_, value) in &c.params {
        out.push(value.clone());
    }
    Ok(Word::new(out).expect("encoded machines never mix algebraic and stream entries"))
}

/// Interpret raw bytes as a word of small integer scalars (little-endian
/// i16 chunks). This is the byte surface the machine-decode fuzz target
/// drives; integer-parameter machines survive the round trip through it.
pub fn word_of_i16_bytes(data: &[u8]) -> Word {
    let entries: Vec<Scalar> = data
        .chunks_exact(2)
        .map(|c| Scalar::Int(BigInt::from(i16::from_le_bytes([c[0], c[1]]))))
        .collect();
    Word::new(entries).expect("integer entries are uniform")
}

/// Inverse of [`word_of_i16_bytes`] on words of small integers; None when an
/// entry does not fit in an i16.
pub fn word_to_i16_bytes(w: &Word) -> Option<Vec<u8>> {
    let mut out = Vec::with_capacity(w.len() * 2);
    for s in w.entries() {
        let v: i16 = s.as_integer()?.try_into().ok()?;
        out.extend_from_slice(&v.to_le_bytes());
    }
    Some(out)
}

struct Reader<'a> {
    entries: &'a [Scalar],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn err<T>(&self, reason: impl Into<String>) -> Result<T, DecodeError> {
        Err(DecodeError {
            pos: self.pos,
            reason: reason.into(),
        })
    }

    fn next_scalar(&mut self) -> Result<&'a Scalar, DecodeError> {
        match self.entries.get(self.pos) {
            Some(s) => {
                self.pos += 1;
                Ok(s)
            }
            None => self.err("unexpected end of word"),
        }
    }

    fn next_int(&mut self) -> Result<BigInt, DecodeError> {
        let pos = self.pos;
        let s = self.next_scalar()?;
        match s.as_integer() {
            Some(i) => Ok(i),
            None => Err(DecodeError {
                pos,
                reason: "expected an integer entry".into(),
            }),
        }
    }

    fn next_i64(&mut self) -> Result<i64, DecodeError> {
        let pos = self.pos;
        let v = self.next_int()?;
        i64::try_from(v).map_err(|_| DecodeError {
            pos,
            reason: "integer entry out of range".into(),
        })
    }

    fn next_count(&mut self, cap: usize, what: &str) -> Result<usize, DecodeError> {
        let pos = self.pos;
        let v = self.next_i64()?;
        if v < 0 || v as usize > cap {
            return Err(DecodeError {
                pos,
                reason: format!("{what} count {v} out of range"),
            });
        }
        Ok(v as usize)
    }

    fn next_cell(&mut self) -> Result<i64, DecodeError> {
        let pos = self.pos;
        let v = self.next_i64()?;
        if v.abs() > MAX_CELL {
            return Err(DecodeError {
                pos,
                reason: format!("cell index {v} out of range"),
            });
        }
        Ok(v)
    }
}

fn decode_expr(r: &mut Reader, depth: usize, budget: &mut usize) -> Result<Expr, DecodeError> {
    if depth > MAX_EXPR_DEPTH {
        return r.err("expression nesting too deep");
    }
    if *budget == 0 {
        return r.err("expression too large");
    }
    *budget -= 1;
    let tag = r.next_i64()?;
    match tag {
        0 => {
            let pos = r.pos;
            let s = r.next_scalar()?;
            match s.as_rational() {
                Some(c) => Ok(Expr::Const(c)),
                None => Err(DecodeError {
                    pos,
                    reason: "constant must be integer or rational".into(),
                }),
            }
        }
        1 => Ok(Expr::Cell(r.next_cell()?)),
        2 => {
            let p = r.next_count(MAX_COUNT, "parameter index")?;
            Ok(Expr::Param(p))
        }
        3..=6 => {
            let a = decode_expr(r, depth + 1, budget)?;
            let b = decode_expr(r, depth + 1, budget)?;
            Ok(match tag {
                3 => Expr::Add(Box::new(a), Box::new(b)),
                4 => Expr::Sub(Box::new(a), Box::new(b)),
                5 => Expr::Mul(Box::new(a), Box::new(b)),
                _ => Expr::Div(Box::new(a), Box::new(b)),
            })
        }
        7 => Ok(Expr::Neg(Box::new(decode_expr(r, depth + 1, budget)?))),
        8 => {
            let pos = r.pos;
            let k = r.next_i64()?;
            if !(0..=MAX_POW as i64).contains(&k) {
                return Err(DecodeError {
                    pos,
                    reason: format!("exponent {k} out of range"),
                });
            }
            Ok(Expr::Pow(
                Box::new(decode_expr(r, depth + 1, budget)?),
                k as u32,
            ))
        }
        t => r.err(format!("unknown expression tag {t}")),
    }
}

/// Rebuild a machine from its code word and validate the result.
pub fn decode_machine(w: &Word) -> Result<Machine, DecodeError> {
    let mut r = Reader {
        entries: w.entries(),
        pos: 0,
    };
    let version = r.next_i64()?;
    if version != FORMAT_VERSION {
        return Err(DecodeError {
            pos: 0,
            reason: format!("unsupported format version {version}"),
        });
    }
    let backend = match r.next_i64()? {
        0 => Backend::IntegerRing,
        1 => Backend::RationalField,
        2 => Backend::RealAlgebraicField,
        3 => Backend::StreamExtension,
        t => {
            return Err(DecodeError {
                pos: r.pos - 1,
                reason: format!("unknown backend tag {t}"),
            })
        }
    };
    let equational = match r.next_i64()? {
        0 => false,
        1 => true,
        t => {
            return Err(DecodeError {
                pos: r.pos - 1,
                reason: format!("bad equational flag {t}"),
            })
        }
    };
    let placement = match r.next_i64()? {
        0 => Placement::LengthPrefixed,
        1 => Placement::Raw,
        t => {
            return Err(DecodeError {
                pos: r.pos - 1,
                reason: format!("bad placement tag {t}"),
            })
        }
    };
    let n_nodes = r.next_count(MAX_COUNT, "node")?;
    let n_edges = r.next_count(MAX_COUNT, "edge")?;
    let n_params = r.next_count(MAX_COUNT, "parameter")?;

    let mut nodes = Vec::with_capacity(n_nodes);
    let mut expr_budget = MAX_EXPR_NODES;
    for idx in 0..n_nodes {
        let tag = r.next_i64()?;
        let payload = match tag {
            0 => NodePayload::Input,
            1 => {
                let k = r.next_count(MAX_COUNT, "assignment")?;
                let mut assigns = Vec::with_capacity(k);
                for _ in 0..k {
                    let cell = r.next_cell()?;
                    let e = decode_expr(&mut r, 0, &mut expr_budget)?;
                    assigns.push((cell, e));
                }
                NodePayload::Compute { assigns }
            }
            2 => NodePayload::Branch {
                test: decode_expr(&mut r, 0, &mut expr_budget)?,
            },
            3 => NodePayload::Shift {
                dir: if r.next_i64()? == 1 {
                    ShiftDir::Right
                } else {
                    ShiftDir::Left
                },
            },
            4 => {
                let mode = r.next_i64()?;
                let cells = match mode {
                    0 => None,
                    1 => {
                        let k = r.next_count(MAX_COUNT, "output cell")?;
                        let mut cs = Vec::with_capacity(k);
                        for _ in 0..k {
                            cs.push(r.next_cell()?);
                        }
                        Some(cs)
                    }
                    t => {
                        return Err(DecodeError {
                            pos: r.pos - 1,
                            reason: format!("bad output mode {t}"),
                        })
                    }
                };
                NodePayload::Output { cells }
            }
            5 => {
                let k = r.next_count(MAX_COUNT, "query cell")?;
                let mut query = Vec::with_capacity(k);
                for _ in 0..k {
                    query.push(r.next_cell()?);
                }
                let target = r.next_cell()?;
                NodePayload::Oracle { query, target }
            }
            t => {
                return Err(DecodeError {
                    pos: r.pos - 1,
                    reason: format!("unknown node tag {t}"),
                })
            }
        };
        nodes.push(Node {
            label: format!("n{idx}"),
            payload,
        });
    }

    let mut edges = Vec::with_capacity(n_edges);
    for _ in 0..n_edges {
        let pos = r.pos;
        let from = r.next_count(MAX_COUNT, "edge endpoint")?;
        let label = match r.next_i64()? {
            0 => EdgeLabel::Next,
            1 => EdgeLabel::BranchTrue,
            2 => EdgeLabel::BranchFalse,
            t => {
                return Err(DecodeError {
                    pos: r.pos - 1,
                    reason: format!("unknown edge label {t}"),
                })
            }
        };
        let to = r.next_count(MAX_COUNT, "edge endpoint")?;
        if from >= n_nodes || to >= n_nodes {
            return Err(DecodeError {
                pos,
                reason: format!("edge {from} -> {to} references a missing node"),
            });
        }
        edges.push(Edge { from, label, to });
    }

    let mut params = Vec::with_capacity(n_params);
    for i in 0..n_params {
        let pos = r.pos;
        let s = r.next_scalar()?;
        if s.kind() == ScalarKind::Stream {
            return Err(DecodeError {
                pos,
                reason: "stream scalar in parameter section".into(),
            });
        }
        params.push((format!("p{i}"), s.clone()));
    }

    if r.pos != r.entries.len() {
        return Err(DecodeError {
            pos: r.pos,
            reason: "trailing entries after machine code".into(),
        });
    }

    let m = Machine {
        name: "decoded".into(),
        backend,
        equational,
        nodes,
        edges,
        params,
        placement,
    };
    let violations = validate(&m);
    if let Some(v) = violations.first() {
        return Err(DecodeError {
            pos: r.pos,
            reason: format!("decoded machine fails validation: {v}"),
        });
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::{run, RunOutcome};
    use crate::scalar::Scalar;

    fn node(label: &str, payload: NodePayload) -> Node {
        Node {
            label: label.into(),
            payload,
        }
    }

    fn identity() -> Machine {
        Machine {
            name: "id".into(),
            backend: Backend::RationalField,
            equational: false,
            nodes: vec![
                node("in", NodePayload::Input),
                node("out", NodePayload::Output { cells: None }),
            ],
            edges: vec![Edge {
                from: 0,
                label: EdgeLabel::Next,
                to: 1,
            }],
            params: vec![],
            placement: Placement::LengthPrefixed,
        }
    }

    #[test]
    fn encode_decode_identity() {
        let m = identity();
        let w = encode_machine(&m).unwrap();
        let back = decode_machine(&w).unwrap();
        assert!(m.structurally_eq(&back));
    }

    #[test]
    fn stream_parameter_is_unencodable() {
        let mut m = identity();
        m.backend = Backend::StreamExtension;
        m.params.push((
            "ell".into(),
            Scalar::make_stream("ell", 0.into(), |_| 0, 10),
        ));
        assert_eq!(
            encode_machine(&m).unwrap_err(),
            EncodeError::UnencodableParameter("ell".into())
        );
    }

    #[test]
    fn dangling_edge_reference_fails_decode() {
        let m = identity();
        let w = encode_machine(&m).unwrap();
        let mut entries = w.entries().to_vec();
        // edge records sit at the end here: ... from label to; corrupt `to`
        let last = entries.len() - 1;
        entries[last] = Scalar::int(99);
        let w2 = Word::new(entries).unwrap();
        assert!(decode_machine(&w2).is_err());
    }

    #[test]
    fn algebraic_parameter_round_trips() {
        let mut m = identity();
        m.backend = Backend::RealAlgebraicField;
        m.params.push((
            "r2".into(),
            crate::scalar::parse_literal("alg(x^2-2, 1, 2)").unwrap(),
        ));
        let w = encode_machine(&m).unwrap();
        let back = decode_machine(&w).unwrap();
        assert!(m.structurally_eq(&back));
    }

    #[test]
    fn decoded_machine_behaves_identically() {
        let m = identity();
        let back = decode_machine(&encode_machine(&m).unwrap()).unwrap();
        let a = run(&m, Word::from_ints(&[2, 9]), 10, None).unwrap();
        let b = run(&back, Word::from_ints(&[2, 9]), 10, None).unwrap();
        match (a, b) {
            (RunOutcome::Halted { output: x, .. }, RunOutcome::Halted { output: y, .. }) => {
                assert!(x.eq_exact(&y).unwrap())
            }
            other => panic!("expected two halts, got {other:?}"),
        }
    }
}
