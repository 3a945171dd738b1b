//! The machine model: finite labeled directed graphs with input, compute,
//! branch, shift, output (and oracle) nodes, operating on a bi-infinite,
//! finitely supported tape of exact scalars.

pub mod codec;
pub mod expr;
pub mod interp;
pub mod validate;

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use thiserror::Error;

use crate::scalar::{Backend, Scalar, ScalarError, ScalarKind};
pub use codec::{decode_machine, encode_machine, DecodeError, EncodeError};
pub use expr::Expr;
pub use interp::{run, step, StepResult};
pub use validate::{validate, Violation};

/// A finite word over the ring: the machine's input/output alphabet.
#[derive(Clone, Debug)]
pub struct Word(Vec<Scalar>);

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum WordError {
    #[error("word mixes algebraic and stream entries")]
    MixedBackends,
}

impl Word {
    pub fn new(entries: Vec<Scalar>) -> Result<Word, WordError> {
        let mut has_alg = false;
        let mut has_stream = false;
        for e in &entries {
            match e.kind() {
                ScalarKind::Algebraic => has_alg = true,
                ScalarKind::Stream => has_stream = true,
                _ => {}
            }
        }
        if has_alg && has_stream {
            return Err(WordError::MixedBackends);
        }
        Ok(Word(entries))
    }

    pub fn empty() -> Word {
        Word(Vec::new())
    }

    pub fn from_ints(vals: &[i64]) -> Word {
        Word(vals.iter().map(|&v| Scalar::int(v)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.0
    }

    pub fn eq_exact(&self, other: &Word) -> Result<bool, ScalarError> {
        if self.0.len() != other.0.len() {
            return Ok(false);
        }
        for (a, b) in self.0.iter().zip(&other.0) {
            if !a.eq_exact(b)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn render(&self) -> String {
        self.0
            .iter()
            .map(|s| s.render())
            .collect::<Vec<_>>()
            .join(",")
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Bi-infinite tape with finite support; logical cell i is stored at
/// key i + offset, so shifting moves only the offset.
#[derive(Clone, Debug, Default)]
pub struct Tape {
    offset: i64,
    support: BTreeMap<i64, Scalar>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum ShiftDir {
    Left,
    Right,
}

impl Tape {
    pub fn new() -> Tape {
        Tape::default()
    }

    pub fn get(&self, cell: i64) -> Scalar {
        self.support
            .get(&(cell + self.offset))
            .cloned()
            .unwrap_or_else(Scalar::zero)
    }

    pub fn set(&mut self, cell: i64, value: Scalar) {
        let key = cell + self.offset;
        // keep the support free of provable zeros; stream values whose
        // vanishing cannot be refuted stay in the support
        if value.eq_zero() == Some(true) {
            self.support.remove(&key);
        } else {
            self.support.insert(key, value);
        }
    }

    /// sigma_l shifts content left (cell i reads what was at i+1) and
    /// sigma_r the other way.
    pub fn shift(&mut self, dir: ShiftDir) {
        match dir {
            ShiftDir::Left => self.offset += 1,
            ShiftDir::Right => self.offset -= 1,
        }
    }

    /// Logical cells with nonzero content, in ascending order.
    pub fn support(&self) -> impl Iterator<Item = (i64, &Scalar)> {
        let off = self.offset;
        self.support.iter().map(move |(k, v)| (k - off, v))
    }
}

/// How the input word is laid out on the tape.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Placement {
    /// Length n at cell 0, entries at cells 1..=n. The default convention;
    /// the matching default output reads cell 0 as the output length.
    LengthPrefixed,
    /// Entries at cells 1..=n with no length tag.
    Raw,
}

/// Payload of a machine node. Edges are stored separately on the machine.
#[derive(Clone, Debug)]
pub enum NodePayload {
    Input,
    Compute { assigns: Vec<(i64, Expr)> },
    Branch { test: Expr },
    Shift { dir: ShiftDir },
    Output { cells: Option<Vec<i64>> },
    Oracle { query: Vec<i64>, target: i64 },
}

impl NodePayload {
    pub fn kind_name(&self) -> &'static str {
        match self {
            NodePayload::Input => "input",
            NodePayload::Compute { .. } => "compute",
            NodePayload::Branch { .. } => "branch",
            NodePayload::Shift { .. } => "shift",
            NodePayload::Output { .. } => "output",
            NodePayload::Oracle { .. } => "oracle",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Node {
    pub label: String,
    pub payload: NodePayload,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum EdgeLabel {
    /// The unique out-edge of input/compute/shift/oracle nodes.
    Next,
    /// Branch edge taken when the test polynomial is >= 0 (or = 0 in
    /// equational mode).
    BranchTrue,
    /// Branch edge taken otherwise.
    BranchFalse,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Edge {
    pub from: usize,
    pub label: EdgeLabel,
    pub to: usize,
}

/// A machine graph over one of the ring backends.
#[derive(Clone, Debug)]
pub struct Machine {
    pub name: String,
    pub backend: Backend,
    pub equational: bool,
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
    pub params: Vec<(String, Scalar)>,
    pub placement: Placement,
}

impl Machine {
    pub fn param_index(&self, name: &str) -> Option<usize> {
        self.params.iter().position(|(n, _)| n == name)
    }

    pub fn input_node(&self) -> Option<usize> {
        self.nodes
            .iter()
            .position(|n| matches!(n.payload, NodePayload::Input))
    }

    pub fn node_label(&self, id: usize) -> &str {
        &self.nodes[id].label
    }

    /// Rebind a stream parameter by name (stream digit sources are bound at
    /// load time, not parsed from text).
    pub fn bind_stream(&mut self, name: &str, value: Scalar) -> bool {
        if let Some(i) = self.param_index(name) {
            self.params[i].1 = value;
            true
        } else {
            false
        }
    }

    /// Structural equality up to node ids, labels, and parameter names.
    pub fn structurally_eq(&self, other: &Machine) -> bool {
        if self.backend != other.backend
            || self.equational != other.equational
            || self.placement != other.placement
            || self.nodes.len() != other.nodes.len()
            || self.edges.len() != other.edges.len()
            || self.params.len() != other.params.len()
        {
            return false;
        }
        match (encode_machine(self), encode_machine(other)) {
            (Ok(a), Ok(b)) => {
                a.len() == b.len()
                    && a.entries()
                        .iter()
                        .zip(b.entries())
                        .all(|(x, y)| x.repr_eq(y))
            }
            // stream parameters are unencodable: compare canonical forms field
            // by field instead
            _ => {
                let ca = codec::canonicalize(self);
                let cb = codec::canonicalize(other);
                codec::structural_eq_canonical(&ca, &cb)
            }
        }
    }
}

/// Reason a run aborted without reaching an output node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum StuckReason {
    /// A compute node divided by an exact zero.
    DivisionByZero,
    /// A branch test's sign could not be certified within a stream budget.
    IndeterminateBranch,
    /// A divisor involving a stream could not be certified nonzero.
    IndeterminateDivisor,
    /// An oracle node fired with no oracle supplied.
    OracleUnavailable,
    /// The default output convention read a malformed length from cell 0.
    MalformedOutput,
}

/// Machine configuration: current node, tape, and steps taken. The input
/// word rides along until the input node consumes it.
#[derive(Clone, Debug)]
pub struct Config {
    pub node: usize,
    pub tape: Tape,
    pub steps: u64,
    pub pending_input: Option<Word>,
}

impl Config {
    pub fn initial(machine: &Machine, input: Word) -> Option<Config> {
        Some(Config {
            node: machine.input_node()?,
            tape: Tape::new(),
            steps: 0,
            pending_input: Some(input),
        })
    }
}

/// Outcome of running a machine on an input with a step budget.
#[derive(Clone, Debug)]
pub enum RunOutcome {
    Halted { output: Word, steps: u64 },
    OutOfBudget { last: Config },
    Stuck { reason: StuckReason, at: Config },
}

impl RunOutcome {
    pub fn halted_output(&self) -> Option<&Word> {
        match self {
            RunOutcome::Halted { output, .. } => Some(output),
            _ => None,
        }
    }

    pub fn is_halted(&self) -> bool {
        matches!(self, RunOutcome::Halted { .. })
    }

    /// Same outcome class and, for halting runs, exactly the same output.
    pub fn agrees_with(&self, other: &RunOutcome) -> Result<bool, ScalarError> {
        match (self, other) {
            (
                RunOutcome::Halted { output: a, steps: sa },
                RunOutcome::Halted { output: b, steps: sb },
            ) => Ok(sa == sb && a.eq_exact(b)?),
            (RunOutcome::OutOfBudget { .. }, RunOutcome::OutOfBudget { .. }) => Ok(true),
            (RunOutcome::Stuck { reason: a, .. }, RunOutcome::Stuck { reason: b, .. }) => {
                Ok(a == b)
            }
            _ => Ok(false),
        }
    }
}

/// Deterministic membership oracle over words.
pub trait Oracle: Send + Sync {
    fn contains(&self, w: &Word) -> bool;
}

/// Finite oracle over single-integer words; used for the cycle structures.
#[derive(Clone, Debug, Default)]
pub struct NaturalSetOracle {
    members: std::collections::BTreeSet<BigInt>,
}

impl NaturalSetOracle {
    pub fn new(members: impl IntoIterator<Item = u64>) -> Self {
        NaturalSetOracle {
            members: members.into_iter().map(BigInt::from).collect(),
        }
    }

    pub fn contains_nat(&self, n: &BigInt) -> bool {
        self.members.contains(n)
    }
}

impl Oracle for NaturalSetOracle {
    fn contains(&self, w: &Word) -> bool {
        if w.len() != 1 {
            return false;
        }
        match w.entries()[0].as_integer() {
            Some(n) => self.members.contains(&n),
            None => false,
        }
    }
}

/// Finite oracle over explicit words.
pub struct FiniteWordOracle {
    members: Vec<Word>,
}

impl FiniteWordOracle {
    pub fn new(members: Vec<Word>) -> Self {
        FiniteWordOracle { members }
    }
}

impl Oracle for FiniteWordOracle {
    fn contains(&self, w: &Word) -> bool {
        self.members
            .iter()
            .any(|m| m.eq_exact(w).unwrap_or(false))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tape_shift_roundtrip() {
        let mut t = Tape::new();
        t.set(0, Scalar::int(7));
        t.set(3, Scalar::int(9));
        t.shift(ShiftDir::Left);
        assert!(t.get(2).eq_exact(&Scalar::int(9)).unwrap()); // old cell 3
        t.shift(ShiftDir::Right);
        assert!(t.get(0).eq_exact(&Scalar::int(7)).unwrap());
        assert!(t.get(3).eq_exact(&Scalar::int(9)).unwrap());
    }

    #[test]
    fn tape_drops_explicit_zeros() {
        let mut t = Tape::new();
        t.set(1, Scalar::int(5));
        t.set(1, Scalar::int(0));
        assert_eq!(t.support().count(), 0);
    }

    #[test]
    fn word_rejects_mixed_exotic_backends() {
        let alg = crate::scalar::parse_literal("alg(x^2-2, 1, 2)").unwrap();
        let stream = Scalar::make_stream("s", BigInt::from(0), |_| 0, 10);
        assert!(Word::new(vec![alg.clone(), Scalar::int(1)]).is_ok());
        assert_eq!(
            Word::new(vec![alg, stream]).unwrap_err(),
            WordError::MixedBackends
        );
    }
}
