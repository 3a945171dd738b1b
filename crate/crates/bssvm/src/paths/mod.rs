//! Symbolic execution of machine graphs: enumerate the semialgebraic cells
//! of the halting set up to a depth bound. Each cell is a path through the
//! machine together with the branch sign conditions taken along it (plus
//! divisor-nonzero side conditions); halting cells also carry the output as
//! rational expressions in the input variables.

pub mod mpoly;

use std::collections::BTreeMap;

use thiserror::Error;

pub use mpoly::{MPoly, Monomial, RationalExpr};

use crate::machine::{
    validate, EdgeLabel, Expr, Machine, NodePayload, Placement, Violation, Word,
};
use crate::scalar::{Scalar, ScalarKind, Sign};

/// Relation of a sign condition. Sign machines produce `>=0` / `<0`,
/// equational machines `=0` / `!=0`; divisor side conditions are `!=0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum Rel {
    Ge,
    Lt,
    Eq,
    Ne,
}

impl Rel {
    pub fn render(&self) -> &'static str {
        match self {
            Rel::Ge => ">=0",
            Rel::Lt => "<0",
            Rel::Eq => "=0",
            Rel::Ne => "!=0",
        }
    }

    fn contradicts(&self, other: Rel) -> bool {
        matches!(
            (self, other),
            (Rel::Ge, Rel::Lt)
                | (Rel::Lt, Rel::Ge)
                | (Rel::Eq, Rel::Ne)
                | (Rel::Ne, Rel::Eq)
                | (Rel::Eq, Rel::Lt)
                | (Rel::Lt, Rel::Eq)
        )
    }

    fn satisfied_by(&self, s: Sign) -> bool {
        match self {
            Rel::Ge => matches!(s, Sign::Zero | Sign::Positive),
            Rel::Lt => s == Sign::Negative,
            Rel::Eq => s == Sign::Zero,
            Rel::Ne => matches!(s, Sign::Negative | Sign::Positive),
        }
    }
}

/// One polynomial sign condition in canonical form.
#[derive(Clone, Debug)]
pub struct SignCondition {
    pub poly: MPoly,
    pub rel: Rel,
}

impl SignCondition {
    pub fn render(&self) -> String {
        format!("{} {}", self.poly.render(), self.rel.render())
    }
}

/// A semialgebraic path cell.
#[derive(Clone, Debug)]
pub struct Cell {
    pub input_dim: usize,
    /// Node ids of the executed path, in execution order.
    pub path: Vec<usize>,
    pub conditions: Vec<SignCondition>,
    /// Output expressions when the path reached an output node.
    pub output: Option<Vec<RationalExpr>>,
    pub truncated: bool,
}

#[derive(Debug, Error)]
pub enum PathsError {
    #[error("machine fails validation: {0:?}")]
    InvalidMachine(Vec<Violation>),
    #[error("machine parameter `{0}` is not encodable (stream scalar)")]
    ParameterNotEncodable(String),
    #[error("oracle nodes cannot be symbolically enumerated")]
    UnsupportedOracleNode,
    #[error("default output convention needs a constant length in cell 0 along every halting path")]
    UnsupportedDefaultOutput,
    #[error("path enumeration exceeded the state budget")]
    TooManyPaths,
    #[error("point dimension {got} does not match the cell's input dimension {want}")]
    DimensionMismatch { want: usize, got: usize },
    #[error("cell membership needs exact (non-stream) point scalars")]
    StreamPoint,
}

const STATE_BUDGET: u64 = 4_000_000;
const MAX_DEFAULT_OUTPUT: i64 = 1 << 16;

#[derive(Clone, Default)]
struct SymTape {
    offset: i64,
    support: BTreeMap<i64, RationalExpr>,
}

impl SymTape {
    fn get(&self, cell: i64) -> RationalExpr {
        self.support
            .get(&(cell + self.offset))
            .cloned()
            .unwrap_or_else(RationalExpr::zero)
    }

    fn set(&mut self, cell: i64, e: RationalExpr) {
        let key = cell + self.offset;
        if e.num.is_zero() {
            self.support.remove(&key);
        } else {
            self.support.insert(key, e);
        }
    }

    fn shift(&mut self, dir: crate::machine::ShiftDir) {
        match dir {
            crate::machine::ShiftDir::Left => self.offset += 1,
            crate::machine::ShiftDir::Right => self.offset -= 1,
        }
    }
}

/// Symbolic evaluation of a machine expression over the symbolic tape.
/// Division records the divisor's numerator as a side condition; a divisor
/// that is identically zero kills the path.
fn sym_eval(
    e: &Expr,
    tape: &SymTape,
    params: &[(String, Scalar)],
    sides: &mut Vec<MPoly>,
) -> Result<RationalExpr, mpoly::ZeroDivisor> {
    match e {
        Expr::Cell(i) => Ok(tape.get(*i)),
        Expr::Param(p) => Ok(RationalExpr::constant(params[*p].1.clone())),
        Expr::Const(c) => Ok(RationalExpr::constant(Scalar::Rat(c.clone()))),
        Expr::Add(a, b) => Ok(sym_eval(a, tape, params, sides)?.add(&sym_eval(b, tape, params, sides)?)),
        Expr::Sub(a, b) => Ok(sym_eval(a, tape, params, sides)?.sub(&sym_eval(b, tape, params, sides)?)),
        Expr::Mul(a, b) => Ok(sym_eval(a, tape, params, sides)?.mul(&sym_eval(b, tape, params, sides)?)),
        Expr::Div(a, b) => {
            let lhs = sym_eval(a, tape, params, sides)?;
            let rhs = sym_eval(b, tape, params, sides)?;
            let (out, side) = lhs.div(&rhs)?;
            if let Some(p) = side {
                let p = p.canonical_scaled();
                if !sides.iter().any(|q| q.struct_eq(&p)) {
                    sides.push(p);
                }
            }
            Ok(out)
        }
        Expr::Neg(a) => Ok(sym_eval(a, tape, params, sides)?.neg()),
        Expr::Pow(a, k) => Ok(sym_eval(a, tape, params, sides)?.pow(*k)),
    }
}

struct Enumerator<'m> {
    machine: &'m Machine,
    next: Vec<Option<usize>>,
    btrue: Vec<Option<usize>>,
    bfalse: Vec<Option<usize>>,
    depth: u64,
    input_dim: usize,
    states: u64,
    cells: Vec<Cell>,
}

impl<'m> Enumerator<'m> {
    fn explore(
        &mut self,
        node: usize,
        steps: u64,
        tape: SymTape,
        conds: Vec<SignCondition>,
        mut path: Vec<usize>,
    ) -> Result<(), PathsError> {
        if steps >= self.depth {
            self.cells.push(Cell {
                input_dim: self.input_dim,
                path,
                conditions: conds,
                output: None,
                truncated: true,
            });
            return Ok(());
        }
        self.states += 1;
        if self.states > STATE_BUDGET {
            return Err(PathsError::TooManyPaths);
        }
        path.push(node);
        let m = self.machine;
        match &m.nodes[node].payload {
            NodePayload::Input => {
                let mut t = tape;
                for i in 0..self.input_dim {
                    t.set(i as i64 + 1, RationalExpr::var(i));
                }
                if m.placement == Placement::LengthPrefixed {
                    t.set(0, RationalExpr::constant(Scalar::int(self.input_dim as i64)));
                }
                let succ = self.next[node].expect("validated input node");
                self.explore(succ, steps + 1, t, conds, path)
            }
            NodePayload::Compute { assigns } => {
                let mut staged = Vec::with_capacity(assigns.len());
                let mut sides = Vec::new();
                for (cell, e) in assigns {
                    match sym_eval(e, &tape, &m.params, &mut sides) {
                        Ok(v) => staged.push((*cell, v)),
                        // dividing by an identically-zero expression: the
                        // path is stuck for every input and yields no cell
                        Err(mpoly::ZeroDivisor) => return Ok(()),
                    }
                }
                let mut conds = conds;
                for p in sides {
                    if !conds
                        .iter()
                        .any(|c| c.rel == Rel::Ne && c.poly.struct_eq(&p))
                    {
                        conds.push(SignCondition { poly: p, rel: Rel::Ne });
                    }
                }
                let mut t = tape;
                for (cell, v) in staged {
                    t.set(cell, v);
                }
                let succ = self.next[node].expect("validated compute node");
                self.explore(succ, steps + 1, t, conds, path)
            }
            NodePayload::Branch { test } => {
                let mut sides = Vec::new();
                let value = match sym_eval(test, &tape, &m.params, &mut sides) {
                    Ok(v) => v,
                    Err(mpoly::ZeroDivisor) => return Ok(()),
                };
                debug_assert!(sides.is_empty(), "branch tests are division-free");
                // the test composed with the tape is num/den; its sign at any
                // point where den != 0 (guaranteed by recorded side
                // conditions) equals the sign of num*den
                let poly = if value.den.is_one() {
                    value.num.clone()
                } else {
                    value.num.mul(&value.den)
                }
                .canonical_scaled();
                let yes = self.btrue[node].expect("validated branch node");
                let no = self.bfalse[node].expect("validated branch node");
                let (yes_rel, no_rel) = if m.equational {
                    (Rel::Eq, Rel::Ne)
                } else {
                    (Rel::Ge, Rel::Lt)
                };
                if let Some(c) = poly.as_constant() {
                    // constant test: one side is taken, no condition recorded
                    let taken = if m.equational {
                        c.sign() == Sign::Zero
                    } else {
                        matches!(c.sign(), Sign::Zero | Sign::Positive)
                    };
                    let succ = if taken { yes } else { no };
                    return self.explore(succ, steps + 1, tape, conds, path);
                }
                for (succ, rel) in [(yes, yes_rel), (no, no_rel)] {
                    let contradictory = conds
                        .iter()
                        .any(|c| c.poly.struct_eq(&poly) && c.rel.contradicts(rel));
                    if contradictory {
                        continue;
                    }
                    let mut conds2 = conds.clone();
                    conds2.push(SignCondition {
                        poly: poly.clone(),
                        rel,
                    });
                    self.explore(succ, steps + 1, tape.clone(), conds2, path.clone())?;
                }
                Ok(())
            }
            NodePayload::Shift { dir } => {
                let mut t = tape;
                t.shift(*dir);
                let succ = self.next[node].expect("validated shift node");
                self.explore(succ, steps + 1, t, conds, path)
            }
            NodePayload::Oracle { .. } => Err(PathsError::UnsupportedOracleNode),
            NodePayload::Output { cells } => {
                let picked: Vec<i64> = match cells {
                    Some(cs) => cs.clone(),
                    None => {
                        let len_expr = tape.get(0);
                        let len = len_expr
                            .num
                            .as_constant()
                            .filter(|_| len_expr.den.is_one())
                            .and_then(|c| c.as_integer())
                            .ok_or(PathsError::UnsupportedDefaultOutput)?;
                        let len: i64 = len
                            .try_into()
                            .map_err(|_| PathsError::UnsupportedDefaultOutput)?;
                        if !(0..=MAX_DEFAULT_OUTPUT).contains(&len) {
                            return Err(PathsError::UnsupportedDefaultOutput);
                        }
                        (1..=len).collect()
                    }
                };
                let output = picked.iter().map(|&i| tape.get(i)).collect();
                self.cells.push(Cell {
                    input_dim: self.input_dim,
                    path,
                    conditions: conds,
                    output: Some(output),
                    truncated: false,
                });
                Ok(())
            }
        }
    }
}

/// Depth-bounded enumeration of all path cells, in canonical
/// path-lexicographic order. Depth counts node executions exactly like the
/// interpreter's budget, so membership in a halting cell at depth d
/// coincides with halting within budget d.
pub fn enumerate_paths(m: &Machine, input_dim: usize, depth: u64) -> Result<Vec<Cell>, PathsError> {
    let violations = validate(m);
    if !violations.is_empty() {
        return Err(PathsError::InvalidMachine(violations));
    }
    for (name, value) in &m.params {
        if value.kind() == ScalarKind::Stream {
            return Err(PathsError::ParameterNotEncodable(name.clone()));
        }
    }
    if m.nodes
        .iter()
        .any(|n| matches!(n.payload, NodePayload::Oracle { .. }))
    {
        return Err(PathsError::UnsupportedOracleNode);
    }
    let n = m.nodes.len();
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
    let mut en = Enumerator {
        machine: m,
        next,
        btrue,
        bfalse,
        depth,
        input_dim,
        states: 0,
        cells: Vec::new(),
    };
    let start = m.input_node().expect("validated machine has an input node");
    en.explore(start, 0, SymTape::default(), Vec::new(), Vec::new())?;
    let mut cells = en.cells;
    cells.sort_by(|a, b| a.path.cmp(&b.path));
    Ok(cells)
}

/// Exact membership of a point in a cell: every sign condition (including
/// divisor side conditions) holds under exact evaluation.
pub fn cell_contains(cell: &Cell, point: &Word) -> Result<bool, PathsError> {
    if point.len() != cell.input_dim {
        return Err(PathsError::DimensionMismatch {
            want: cell.input_dim,
            got: point.len(),
        });
    }
    for s in point.entries() {
        if s.kind() == ScalarKind::Stream {
            return Err(PathsError::StreamPoint);
        }
    }
    for cond in &cell.conditions {
        let v = cond.poly.eval(point.entries());
        if !cond.rel.satisfied_by(v.sign()) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Evaluate a halting cell's output expressions at a member point.
pub fn cell_output_at(cell: &Cell, point: &Word) -> Option<Word> {
    let exprs = cell.output.as_ref()?;
    let mut out = Vec::with_capacity(exprs.len());
    for e in exprs {
        out.push(e.eval(point.entries()).ok()?);
    }
    Word::new(out).ok()
}

/// True when every branch of the machine is an equality test (vacuously
/// true for branch-free machines).
pub fn check_equational(m: &Machine) -> bool {
    let has_branch = m
        .nodes
        .iter()
        .any(|n| matches!(n.payload, NodePayload::Branch { .. }));
    m.equational || !has_branch
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::dsl::parse_machine;
    use crate::machine::{run, RunOutcome};
    use crate::scalar::Scalar;

    fn halting(cells: &[Cell]) -> Vec<&Cell> {
        cells.iter().filter(|c| !c.truncated).collect()
    }

    #[test]
    fn sign_branch_cells() {
        let m = parse_machine(corpus::SIGN_BRANCH).unwrap();
        let cells = enumerate_paths(&m, 1, 10).unwrap();
        let halts = halting(&cells);
        assert_eq!(halts.len(), 1);
        let cell = halts[0];
        assert_eq!(cell.conditions.len(), 1);
        assert_eq!(cell.conditions[0].render(), "x1 >=0");
        let out = cell.output.as_ref().unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].render(), "x1");
        // exactly one truncated cell, for the spin on x1 < 0
        let trunc: Vec<_> = cells.iter().filter(|c| c.truncated).collect();
        assert_eq!(trunc.len(), 1);
        assert_eq!(trunc[0].conditions[0].render(), "x1 <0");
    }

    #[test]
    fn equational_zero_cells() {
        let m = parse_machine(corpus::EQUATIONAL_ZERO).unwrap();
        let cells = enumerate_paths(&m, 1, 10).unwrap();
        let halts = halting(&cells);
        assert_eq!(halts.len(), 1);
        assert_eq!(halts[0].conditions.len(), 1);
        assert_eq!(halts[0].conditions[0].render(), "x1 =0");
    }

    #[test]
    fn newton_gate_cell_matches_hand_expansion() {
        // One Newton step y = (x + 2/x)/2 = (x^2+2)/(2x) composed with the
        // threshold tests. y^2 - 2 = (x^4 - 4x^2 + 4)/(4x^2), so with the
        // numerator-times-denominator convention the two branch polynomials
        // expand and canonically scale (positive factor, content 1) to
        //   (x^4 - 1001/250 x^2 + 4) * 4x^2 -> 250x^6 - 1001x^4 + 1000x^2
        //   (x^4 -  999/250 x^2 + 4) * 4x^2 -> 250x^6 -  999x^4 + 1000x^2
        // and the division by x records the side condition x != 0.
        let m = parse_machine(corpus::NEWTON_GATE).unwrap();
        let cells = enumerate_paths(&m, 1, 50).unwrap();
        let halts = halting(&cells);
        assert_eq!(halts.len(), 1);
        let cell = halts[0];
        let rendered: Vec<String> = cell.conditions.iter().map(|c| c.render()).collect();
        assert_eq!(
            rendered,
            vec![
                "x1 !=0".to_string(),
                "250*x1^6-1001*x1^4+1000*x1^2 <0".to_string(),
                "250*x1^6-999*x1^4+1000*x1^2 >=0".to_string(),
            ]
        );
        let out = cell.output.as_ref().unwrap();
        assert_eq!(out[0].render(), "(x1^2+2)/(2*x1)");
    }

    #[test]
    fn zero_scan_cells_are_purely_equational() {
        let m = parse_machine(corpus::ZERO_SCAN).unwrap();
        assert!(check_equational(&m));
        let cells = enumerate_paths(&m, 3, 60).unwrap();
        let halts = halting(&cells);
        // found at position 1, 2, 3, or no zero at all
        assert_eq!(halts.len(), 4);
        for c in &cells {
            for cond in &c.conditions {
                assert!(matches!(cond.rel, Rel::Eq | Rel::Ne));
            }
        }
        let renders: Vec<Vec<String>> = halts
            .iter()
            .map(|c| c.conditions.iter().map(|d| d.render()).collect())
            .collect();
        assert!(renders.contains(&vec!["x1 =0".to_string()]));
        assert!(renders.contains(&vec!["x1 !=0".to_string(), "x2 =0".to_string()]));
        assert!(renders.contains(&vec![
            "x1 !=0".to_string(),
            "x2 !=0".to_string(),
            "x3 =0".to_string()
        ]));
        assert!(renders.contains(&vec![
            "x1 !=0".to_string(),
            "x2 !=0".to_string(),
            "x3 !=0".to_string()
        ]));
    }

    #[test]
    fn cell_contains_examples() {
        let m = parse_machine(corpus::SIGN_BRANCH).unwrap();
        let cells = enumerate_paths(&m, 1, 10).unwrap();
        let cell = halting(&cells)[0];
        let at = |v: Scalar| Word::new(vec![v]).unwrap();
        assert!(!cell_contains(cell, &at(Scalar::int(-1))).unwrap());
        assert!(cell_contains(cell, &at(Scalar::int(0))).unwrap());
        // an algebraic point satisfies an equational cell exactly
        let meq = parse_machine(
            "machine zsq over Ralg equational\n\
             node a: input -> b\n\
             node b: branch x1*x1-2 = 0 ? c : d\n\
             node c: output [x1]\n\
             node d: output []\n",
        )
        .unwrap();
        let cells = enumerate_paths(&meq, 1, 10).unwrap();
        let sqrt2 = crate::scalar::parse_literal("alg(x^2-2, 1, 2)").unwrap();
        let yes = cells
            .iter()
            .find(|c| c.conditions.iter().any(|d| d.rel == Rel::Eq))
            .unwrap();
        assert!(cell_contains(yes, &at(sqrt2)).unwrap());
        // dimension mismatch is an error
        assert!(matches!(
            cell_contains(yes, &Word::from_ints(&[1, 2])),
            Err(PathsError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn check_equational_examples() {
        assert!(check_equational(
            &parse_machine(corpus::EQUATIONAL_ZERO).unwrap()
        ));
        assert!(!check_equational(&parse_machine(corpus::SIGN_BRANCH).unwrap()));
        assert!(check_equational(&parse_machine(corpus::IDENTITY).unwrap()));
    }

    #[test]
    fn oracle_machines_are_rejected() {
        let src = "machine om over Z\n\
                   node a: input -> q\n\
                   node q: oracle [x1] -> x2 -> c\n\
                   node c: output [x2]\n";
        let m = parse_machine(src).unwrap();
        assert!(matches!(
            enumerate_paths(&m, 1, 10),
            Err(PathsError::UnsupportedOracleNode)
        ));
    }

    #[test]
    fn enumeration_is_deterministic() {
        let m = parse_machine(corpus::MANDELBROT_GATE5).unwrap();
        let a = enumerate_paths(&m, 2, 60).unwrap();
        let b = enumerate_paths(&m, 2, 60).unwrap();
        let render = |cells: &[Cell]| {
            cells
                .iter()
                .map(|c| {
                    format!(
                        "{:?}|{}|{}",
                        c.path,
                        c.conditions
                            .iter()
                            .map(|d| d.render())
                            .collect::<Vec<_>>()
                            .join("&"),
                        c.output
                            .as_ref()
                            .map(|o| o.iter().map(|e| e.render()).collect::<Vec<_>>().join(";"))
                            .unwrap_or_default()
                    )
                })
                .collect::<Vec<_>>()
                .join("\n")
        };
        assert_eq!(render(&a), render(&b));
    }

    #[test]
    fn run_cell_agreement_on_sampled_inputs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let depth = 60u64;
        for &(name, src, dim) in corpus::CELL_CORPUS {
            let m = parse_machine(src).unwrap();
            let cells = enumerate_paths(&m, dim, depth).unwrap();
            let halts: Vec<&Cell> = cells.iter().filter(|c| !c.truncated).collect();
            for trial in 0..100 {
                let word = Word::new(
                    (0..dim)
                        .map(|_| {
                            if rng.gen_bool(0.25) {
                                Scalar::int(0)
                            } else {
                                Scalar::rat(rng.gen_range(-20..=20), rng.gen_range(1..=9))
                            }
                        })
                        .collect(),
                )
                .unwrap();
                let outcome = run(&m, word.clone(), depth, None).unwrap();
                let members: Vec<&&Cell> = halts
                    .iter()
                    .filter(|c| cell_contains(c, &word).unwrap())
                    .collect();
                match outcome {
                    RunOutcome::Halted { output, .. } => {
                        assert_eq!(
                            members.len(),
                            1,
                            "{name} trial {trial}: halting input in {} cells",
                            members.len()
                        );
                        let cell_out = cell_output_at(members[0], &word).unwrap();
                        assert!(
                            cell_out.eq_exact(&output).unwrap(),
                            "{name} trial {trial}: output mismatch"
                        );
                    }
                    _ => {
                        assert!(
                            members.is_empty(),
                            "{name} trial {trial}: non-halting input in a halting cell"
                        );
                    }
                }
            }
        }
    }
}
