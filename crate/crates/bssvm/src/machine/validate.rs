//! Structural validation of machine graphs against the machine-model
//! invariants: node degrees, edge labeling, connectivity, parameter and
//! backend admissibility.

use std::collections::VecDeque;

use num_traits::One;

use super::{EdgeLabel, Machine, NodePayload};
use crate::scalar::{Backend, ScalarKind};

/// One violated invariant, naming the node and the broken clause.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub node: Option<usize>,
    pub label: Option<String>,
    pub message: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.label {
            Some(l) => write!(f, "node {l}: {}", self.message),
            None => write!(f, "{}", self.message),
        }
    }
}

fn violation(m: &Machine, node: Option<usize>, message: impl Into<String>) -> Violation {
    Violation {
        node,
        label: node.map(|i| m.nodes[i].label.clone()),
        message: message.into(),
    }
}

/// Check every structural invariant; an empty list means the machine is
/// well-formed and runnable.
pub fn validate(m: &Machine) -> Vec<Violation> {
    let mut out = Vec::new();
    let n = m.nodes.len();

    if n == 0 {
        out.push(violation(m, None, "machine has no nodes"));
        return out;
    }

    // edge endpoint sanity first; later passes assume indices are in range
    for e in &m.edges {
        if e.from >= n || e.to >= n {
            out.push(violation(
                m,
                None,
                format!("edge {} -> {} references a missing node", e.from, e.to),
            ));
        }
    }
    if !out.is_empty() {
        return out;
    }

    let inputs: Vec<usize> = m
        .nodes
        .iter()
        .enumerate()
        .filter(|(_, nd)| matches!(nd.payload, NodePayload::Input))
        .map(|(i, _)| i)
        .collect();
    if inputs.len() != 1 {
        out.push(violation(
            m,
            None,
            format!("machine needs exactly one input node, found {}", inputs.len()),
        ));
    }

    let mut incoming = vec![0usize; n];
    let mut out_next = vec![0usize; n];
    let mut out_true = vec![0usize; n];
    let mut out_false = vec![0usize; n];
    for e in &m.edges {
        incoming[e.to] += 1;
        match e.label {
            EdgeLabel::Next => out_next[e.from] += 1,
            EdgeLabel::BranchTrue => out_true[e.from] += 1,
            EdgeLabel::BranchFalse => out_false[e.from] += 1,
        }
    }

    for (i, node) in m.nodes.iter().enumerate() {
        match &node.payload {
            NodePayload::Input => {
                if incoming[i] != 0 {
                    out.push(violation(m, Some(i), "input node has incoming edges"));
                }
                if out_next[i] != 1 || out_true[i] + out_false[i] != 0 {
                    out.push(violation(
                        m,
                        Some(i),
                        "input node needs exactly one outgoing edge",
                    ));
                }
            }
            NodePayload::Compute { assigns } => {
                if out_next[i] != 1 || out_true[i] + out_false[i] != 0 {
                    out.push(violation(
                        m,
                        Some(i),
                        "compute node needs exactly one outgoing edge",
                    ));
                }
                if assigns.is_empty() {
                    out.push(violation(m, Some(i), "compute node has no assignments"));
                }
                let mut seen = std::collections::BTreeSet::new();
                for (cell, _) in assigns {
                    if !seen.insert(*cell) {
                        out.push(violation(
                            m,
                            Some(i),
                            format!("compute node assigns cell x{cell} twice"),
                        ));
                    }
                }
            }
            NodePayload::Shift { .. } => {
                if out_next[i] != 1 || out_true[i] + out_false[i] != 0 {
                    out.push(violation(
                        m,
                        Some(i),
                        "shift node needs exactly one outgoing edge",
                    ));
                }
            }
            NodePayload::Oracle { .. } => {
                if out_next[i] != 1 || out_true[i] + out_false[i] != 0 {
                    out.push(violation(
                        m,
                        Some(i),
                        "oracle node needs exactly one outgoing edge",
                    ));
                }
            }
            NodePayload::Output { .. } => {
                if out_next[i] + out_true[i] + out_false[i] != 0 {
                    out.push(violation(m, Some(i), "output node has outgoing edges"));
                }
            }
            NodePayload::Branch { test } => {
                if out_true[i] != 1 || out_false[i] != 1 || out_next[i] != 0 {
                    out.push(violation(
                        m,
                        Some(i),
                        "branch node needs exactly two outgoing edges labeled 1 and 0",
                    ));
                }
                if test.uses_div() {
                    out.push(violation(m, Some(i), "branch test must be a polynomial"));
                }
            }
        }
    }

    // weak connectivity of the whole graph
    if n > 1 {
        let mut adj = vec![Vec::new(); n];
        for e in &m.edges {
            adj[e.from].push(e.to);
            adj[e.to].push(e.from);
        }
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        if seen.iter().any(|s| !s) {
            out.push(violation(m, None, "machine graph is not connected"));
        }
    }

    // parameter references, constants, and backend admissibility
    for (name, value) in &m.params {
        if !m.backend.admits(value.kind()) {
            out.push(violation(
                m,
                None,
                format!(
                    "parameter {name} of kind {:?} is not admitted by backend {}",
                    value.kind(),
                    m.backend.name()
                ),
            ));
        }
    }
    for (i, node) in m.nodes.iter().enumerate() {
        let mut exprs: Vec<&super::Expr> = Vec::new();
        match &node.payload {
            NodePayload::Compute { assigns } => exprs.extend(assigns.iter().map(|(_, e)| e)),
            NodePayload::Branch { test } => exprs.push(test),
            _ => {}
        }
        for e in exprs {
            let mut bad_param = false;
            e.visit_params(&mut |p| {
                if p >= m.params.len() {
                    bad_param = true;
                }
            });
            if bad_param {
                out.push(violation(m, Some(i), "expression references a missing parameter"));
            }
            if m.backend == Backend::IntegerRing {
                if e.uses_div() {
                    out.push(violation(
                        m,
                        Some(i),
                        "division is not available over the integer ring",
                    ));
                }
                let mut nonint = false;
                e.visit_consts(&mut |c| {
                    if !c.denom().is_one() {
                        nonint = true;
                    }
                });
                if nonint {
                    out.push(violation(
                        m,
                        Some(i),
                        "non-integer constant over the integer ring",
                    ));
                }
            }
        }
    }
    if m.backend == Backend::IntegerRing {
        for (name, value) in &m.params {
            if value.kind() != ScalarKind::Integer {
                out.push(violation(
                    m,
                    None,
                    format!("parameter {name} must be an integer over the integer ring"),
                ));
            }
        }
    }

    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::{Edge, Machine, Node, NodePayload, Placement};
    use crate::scalar::Backend;

    fn node(label: &str, payload: NodePayload) -> Node {
        Node {
            label: label.into(),
            payload,
        }
    }

    fn simple_machine() -> Machine {
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
    fn identity_machine_is_valid() {
        assert!(validate(&simple_machine()).is_empty());
    }

    #[test]
    fn branch_with_one_edge_is_flagged() {
        let mut m = simple_machine();
        m.nodes.push(node(
            "br",
            NodePayload::Branch {
                test: crate::machine::Expr::cell(1),
            },
        ));
        m.edges.push(Edge {
            from: 2,
            label: EdgeLabel::BranchTrue,
            to: 1,
        });
        let v = validate(&m);
        assert!(v.iter().any(|v| v.message.contains("two outgoing edges")));
    }

    #[test]
    fn two_input_nodes_are_flagged() {
        let mut m = simple_machine();
        m.nodes.push(node("in2", NodePayload::Input));
        m.edges.push(Edge {
            from: 2,
            label: EdgeLabel::Next,
            to: 1,
        });
        let v = validate(&m);
        assert!(v.iter().any(|v| v.message.contains("exactly one input node")));
    }

    #[test]
    fn disconnected_graph_is_flagged() {
        let mut m = simple_machine();
        m.nodes.push(node("stray", NodePayload::Output { cells: None }));
        let v = validate(&m);
        assert!(v.iter().any(|v| v.message.contains("not connected")));
    }
}
