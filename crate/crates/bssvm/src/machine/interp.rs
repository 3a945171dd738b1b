//! The deterministic interpreter: single-step semantics and bounded runs.

use thiserror::Error;

use super::{
    validate, Config, EdgeLabel, Machine, NodePayload, Oracle, Placement, RunOutcome, Scalar,
    StuckReason, Violation, Word,
};
use crate::scalar::ScalarError;

/// Largest output length the default extraction convention will read.
const MAX_OUTPUT_LEN: u64 = 1 << 20;

/// Result of executing one node.
pub enum StepResult {
    Continue(Config),
    Halted { output: Word, steps: u64 },
    Stuck { reason: StuckReason, at: Config },
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error("machine fails validation: {0:?}")]
    Invalid(Vec<Violation>),
    #[error("input word contains entries outside the machine backend")]
    InputNotAdmitted,
}

struct Plan {
    next: Vec<Option<usize>>,
    btrue: Vec<Option<usize>>,
    bfalse: Vec<Option<usize>>,
}

fn build_plan(m: &Machine) -> Plan {
    let n = m.nodes.len();
    let mut plan = Plan {
        next: vec![None; n],
        btrue: vec![None; n],
        bfalse: vec![None; n],
    };
    for e in &m.edges {
        match e.label {
            EdgeLabel::Next => plan.next[e.from] = Some(e.to),
            EdgeLabel::BranchTrue => plan.btrue[e.from] = Some(e.to),
            EdgeLabel::BranchFalse => plan.bfalse[e.from] = Some(e.to),
        }
    }
    plan
}

fn place_input(tape: &mut super::Tape, word: &Word, placement: Placement) {
    for (i, v) in word.entries().iter().enumerate() {
        tape.set(i as i64 + 1, v.clone());
    }
    if placement == Placement::LengthPrefixed {
        tape.set(0, Scalar::int(word.len() as i64));
    }
}

fn extract_output(
    m: &Machine,
    cells: &Option<Vec<i64>>,
    c: &Config,
) -> Result<Word, StuckReason> {
    let _ = m;
    let picked: Vec<i64> = match cells {
        Some(cs) => cs.clone(),
        None => {
            let len = c
                .tape
                .get(0)
                .as_integer()
                .ok_or(StuckReason::MalformedOutput)?;
            if len < 0.into() || len > MAX_OUTPUT_LEN.into() {
                return Err(StuckReason::MalformedOutput);
            }
            let len: u64 = len.try_into().map_err(|_| StuckReason::MalformedOutput)?;
            (1..=len as i64).collect()
        }
    };
    let entries = picked.iter().map(|&i| c.tape.get(i)).collect();
    Word::new(entries).map_err(|_| StuckReason::MalformedOutput)
}

fn stuck_reason_of(e: ScalarError) -> StuckReason {
    match e {
        ScalarError::DivisionByZero => StuckReason::DivisionByZero,
        ScalarError::IndeterminateOperand => StuckReason::IndeterminateDivisor,
        // unreachable after validation and input admission checks
        _ => StuckReason::IndeterminateDivisor,
    }
}

fn step_with_plan(
    m: &Machine,
    plan: &Plan,
    mut c: Config,
    oracle: Option<&dyn Oracle>,
) -> StepResult {
    let node = &m.nodes[c.node];
    match &node.payload {
        NodePayload::Input => {
            let word = c.pending_input.take().unwrap_or_else(Word::empty);
            place_input(&mut c.tape, &word, m.placement);
            c.steps += 1;
            c.node = plan.next[c.node].expect("validated input node has a successor");
            StepResult::Continue(c)
        }
        NodePayload::Compute { assigns } => {
            // all right-hand sides read the pre-state
            let mut staged = Vec::with_capacity(assigns.len());
            for (cell, e) in assigns {
                match e.eval(&c.tape, &m.params) {
                    Ok(v) => staged.push((*cell, v)),
                    Err(err) => {
                        return StepResult::Stuck {
                            reason: stuck_reason_of(err),
                            at: c,
                        }
                    }
                }
            }
            for (cell, v) in staged {
                c.tape.set(cell, v);
            }
            c.steps += 1;
            c.node = plan.next[c.node].expect("validated compute node has a successor");
            StepResult::Continue(c)
        }
        NodePayload::Branch { test } => {
            let value = match test.eval(&c.tape, &m.params) {
                Ok(v) => v,
                Err(err) => {
                    return StepResult::Stuck {
                        reason: stuck_reason_of(err),
                        at: c,
                    }
                }
            };
            let taken = if m.equational {
                value.eq_zero()
            } else {
                value.ge_zero()
            };
            match taken {
                Some(true) => {
                    c.steps += 1;
                    c.node = plan.btrue[c.node].expect("validated branch has a 1-edge");
                    StepResult::Continue(c)
                }
                Some(false) => {
                    c.steps += 1;
                    c.node = plan.bfalse[c.node].expect("validated branch has a 0-edge");
                    StepResult::Continue(c)
                }
                None => StepResult::Stuck {
                    reason: StuckReason::IndeterminateBranch,
                    at: c,
                },
            }
        }
        NodePayload::Shift { dir } => {
            c.tape.shift(*dir);
            c.steps += 1;
            c.node = plan.next[c.node].expect("validated shift node has a successor");
            StepResult::Continue(c)
        }
        NodePayload::Oracle { query, target } => {
            let Some(oracle) = oracle else {
                return StepResult::Stuck {
                    reason: StuckReason::OracleUnavailable,
                    at: c,
                };
            };
            let entries = query.iter().map(|&i| c.tape.get(i)).collect();
            let Ok(word) = Word::new(entries) else {
                return StepResult::Stuck {
                    reason: StuckReason::OracleUnavailable,
                    at: c,
                };
            };
            let bit = i64::from(oracle.contains(&word));
            c.tape.set(*target, Scalar::int(bit));
            c.steps += 1;
            c.node = plan.next[c.node].expect("validated oracle node has a successor");
            StepResult::Continue(c)
        }
        NodePayload::Output { cells } => match extract_output(m, cells, &c) {
            Ok(output) => StepResult::Halted {
                output,
                steps: c.steps + 1,
            },
            Err(reason) => StepResult::Stuck { reason, at: c },
        },
    }
}

/// Execute exactly one node of a validated machine.
pub fn step(m: &Machine, c: Config, oracle: Option<&dyn Oracle>) -> StepResult {
    let plan = build_plan(m);
    step_with_plan(m, &plan, c, oracle)
}

/// Run a machine on an input word for at most `budget` node executions.
/// Two runs with identical inputs and oracle yield identical outcomes.
pub fn run(
    m: &Machine,
    input: Word,
    budget: u64,
    oracle: Option<&dyn Oracle>,
) -> Result<RunOutcome, RunError> {
    let violations = validate(m);
    if !violations.is_empty() {
        return Err(RunError::Invalid(violations));
    }
    for e in input.entries() {
        if !m.backend.admits(e.kind()) {
            return Err(RunError::InputNotAdmitted);
        }
    }
    let plan = build_plan(m);
    let mut c = Config::initial(m, input).expect("validated machine has an input node");
    loop {
        if c.steps >= budget {
            return Ok(RunOutcome::OutOfBudget { last: c });
        }
        match step_with_plan(m, &plan, c, oracle) {
            StepResult::Continue(next) => c = next,
            StepResult::Halted { output, steps } => {
                return Ok(RunOutcome::Halted { output, steps })
            }
            StepResult::Stuck { reason, at } => return Ok(RunOutcome::Stuck { reason, at }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::{Edge, Expr, Node, Tape};
    use crate::scalar::Backend;

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
    fn identity_run() {
        let m = identity();
        let out = run(&m, Word::from_ints(&[3, 5]), 100, None).unwrap();
        match out {
            RunOutcome::Halted { output, steps } => {
                assert_eq!(steps, 2);
                assert!(output.eq_exact(&Word::from_ints(&[3, 5])).unwrap());
            }
            other => panic!("expected halt, got {other:?}"),
        }
    }

    #[test]
    fn budget_boundary() {
        let m = identity();
        assert!(run(&m, Word::from_ints(&[1]), 2, None).unwrap().is_halted());
        assert!(!run(&m, Word::from_ints(&[1]), 1, None).unwrap().is_halted());
    }

    #[test]
    fn branch_at_zero_takes_true_edge() {
        // branch on x1 with x1 = 0: 0 >= 0 follows the 1-edge
        let m = Machine {
            name: "b".into(),
            backend: Backend::RationalField,
            equational: false,
            nodes: vec![
                node("in", NodePayload::Input),
                node("br", NodePayload::Branch { test: Expr::cell(1) }),
                node(
                    "yes",
                    NodePayload::Output {
                        cells: Some(vec![]),
                    },
                ),
                node(
                    "no",
                    NodePayload::Output {
                        cells: Some(vec![1]),
                    },
                ),
            ],
            edges: vec![
                Edge { from: 0, label: EdgeLabel::Next, to: 1 },
                Edge { from: 1, label: EdgeLabel::BranchTrue, to: 2 },
                Edge { from: 1, label: EdgeLabel::BranchFalse, to: 3 },
            ],
            params: vec![],
            placement: Placement::LengthPrefixed,
        };
        let out = run(&m, Word::from_ints(&[0]), 100, None).unwrap();
        match out {
            RunOutcome::Halted { output, .. } => assert_eq!(output.len(), 0),
            other => panic!("expected halt at yes, got {other:?}"),
        }
        let out = run(&m, Word::from_ints(&[-1]), 100, None).unwrap();
        match out {
            RunOutcome::Halted { output, .. } => assert_eq!(output.len(), 1),
            other => panic!("expected halt at no, got {other:?}"),
        }
    }

    #[test]
    fn division_by_zero_gets_stuck() {
        let m = Machine {
            name: "d".into(),
            backend: Backend::RationalField,
            equational: false,
            nodes: vec![
                node("in", NodePayload::Input),
                node(
                    "c",
                    NodePayload::Compute {
                        assigns: vec![(
                            1,
                            Expr::Div(Box::new(Expr::c_int(1)), Box::new(Expr::cell(2))),
                        )],
                    },
                ),
                node("out", NodePayload::Output { cells: None }),
            ],
            edges: vec![
                Edge { from: 0, label: EdgeLabel::Next, to: 1 },
                Edge { from: 1, label: EdgeLabel::Next, to: 2 },
            ],
            params: vec![],
            placement: Placement::LengthPrefixed,
        };
        let out = run(&m, Word::from_ints(&[7]), 100, None).unwrap();
        match out {
            RunOutcome::Stuck { reason, .. } => assert_eq!(reason, StuckReason::DivisionByZero),
            other => panic!("expected stuck, got {other:?}"),
        }
    }

    #[test]
    fn oracle_nodes_write_membership_bits() {
        let m = Machine {
            name: "o".into(),
            backend: Backend::IntegerRing,
            equational: false,
            nodes: vec![
                node("in", NodePayload::Input),
                node(
                    "q",
                    NodePayload::Oracle {
                        query: vec![1],
                        target: 2,
                    },
                ),
                node(
                    "out",
                    NodePayload::Output {
                        cells: Some(vec![2]),
                    },
                ),
            ],
            edges: vec![
                Edge { from: 0, label: EdgeLabel::Next, to: 1 },
                Edge { from: 1, label: EdgeLabel::Next, to: 2 },
            ],
            params: vec![],
            placement: Placement::LengthPrefixed,
        };
        let oracle = crate::machine::NaturalSetOracle::new([3, 5]);
        let out = run(&m, Word::from_ints(&[5]), 10, Some(&oracle)).unwrap();
        assert!(out
            .halted_output()
            .unwrap()
            .eq_exact(&Word::from_ints(&[1]))
            .unwrap());
        let out = run(&m, Word::from_ints(&[4]), 10, Some(&oracle)).unwrap();
        assert!(out
            .halted_output()
            .unwrap()
            .eq_exact(&Word::from_ints(&[0]))
            .unwrap());
        // no oracle supplied
        let out = run(&m, Word::from_ints(&[4]), 10, None).unwrap();
        match out {
            RunOutcome::Stuck { reason, .. } => {
                assert_eq!(reason, StuckReason::OracleUnavailable)
            }
            other => panic!("expected stuck, got {other:?}"),
        }
    }

    #[test]
    fn shift_pair_restores_tape() {
        let mut t = Tape::new();
        t.set(-2, Scalar::int(4));
        t.set(5, Scalar::rat(1, 3));
        let orig = t.clone();
        t.shift(crate::machine::ShiftDir::Left);
        t.shift(crate::machine::ShiftDir::Right);
        for (i, v) in orig.support() {
            assert!(t.get(i).eq_exact(v).unwrap());
        }
        assert_eq!(t.support().count(), orig.support().count());
    }
}
