//! Disjoint unions of cyclic graphs steered by an oracle set S: component n
//! is the even cycle C_{2n} when n is in S and the odd cycle C_{2n+1}
//! otherwise. Vertices are encoded as integer pairs (n, j); adjacency is an
//! equational machine that consults S through an oracle node.

use std::sync::Arc;

use super::{RStructure, RelationDecider, Signature};
use crate::dsl::parse_machine;
use crate::machine::{Machine, Oracle, Word};

/// Cycle length of component n: 2n if n in S, 2n+1 otherwise.
pub fn cycle_len(s: &dyn Oracle, n: u64) -> u64 {
    let w = Word::from_ints(&[n as i64]);
    if s.contains(&w) {
        2 * n
    } else {
        2 * n + 1
    }
}

fn adjacency_machine() -> Machine {
    // cells: x1=n x2=j x3=n' x4=j'; x5 = chi_S(n); x6 = len(n); x7 = j'-j
    let src = "\
machine cycle_adj over Z equational
node start: input -> eqn
node eqn: branch x1-x3 = 0 ? oq : no
node oq: oracle [x1] -> x5 -> len
node len: compute x6 := 2*x1+1-x5, x7 := x4-x2 -> d1
node d1: branch x7-1 = 0 ? yes : d2
node d2: branch x7+1 = 0 ? yes : d3
node d3: branch x7-x6+1 = 0 ? yes : d4
node d4: branch x7+x6-1 = 0 ? yes : no
node yes: compute x8 := 1 -> yesout
node yesout: output [x8]
node no: compute x8 := 0 -> noout
node noout: output [x8]
";
    parse_machine(src).expect("adjacency source is well-formed")
}

fn universe_machine(n_min: u64) -> Machine {
    // halts iff the input is (n, j) with n >= n_min and 0 <= j < len(n)
    let src = format!(
        "machine cycle_univ over Z
node start: input -> len2
node len2: branch x0-2 >= 0 ? len2b : spin
node len2b: branch 2-x0 >= 0 ? nmin : spin
node nmin: branch x1-{n_min} >= 0 ? oq : spin
node oq: oracle [x1] -> x5 -> clen
node clen: compute x6 := 2*x1+1-x5 -> jlo
node jlo: branch x2 >= 0 ? jhi : spin
node jhi: branch x6-x2-1 >= 0 ? ok : spin
node ok: output []
node spin: shift left -> spin
"
    );
    parse_machine(&src).expect("universe source is well-formed")
}

/// Build the cycle-union structure over the oracle S. The index floor
/// n_min >= 2 keeps every component a simple cycle (length >= 4).
pub fn cycle_graph_structure(s: Arc<dyn Oracle>, n_min: u64) -> RStructure {
    let mut sig = Signature::default();
    sig.relations.insert("E".into(), 2);
    let mut relations = std::collections::BTreeMap::new();
    relations.insert("E".to_string(), RelationDecider::Total(adjacency_machine()));
    RStructure {
        sig,
        universe: universe_machine(n_min),
        explicit_universe: None,
        relations,
        functions: std::collections::BTreeMap::new(),
        constants: std::collections::BTreeMap::new(),
        oracle: Some(s),
        default_budget: 10_000,
    }
}

/// Explicit list of the vertices with component index at most n_max;
/// used to drive finite-structure checks over the infinite union.
pub fn vertices_upto(s: &dyn Oracle, n_min: u64, n_max: u64) -> Vec<Word> {
    let mut out = Vec::new();
    for n in n_min..=n_max {
        for j in 0..cycle_len(s, n) {
            out.push(Word::from_ints(&[n as i64, j as i64]));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::NaturalSetOracle;
    use crate::structures::{atomic_truth, parse_atomic, universe_contains, Truth};

    fn structure(members: &[u64]) -> RStructure {
        cycle_graph_structure(
            Arc::new(NaturalSetOracle::new(members.iter().copied())),
            2,
        )
    }

    fn truth(s: &RStructure, sentence: &str) -> Truth {
        let a = parse_atomic(sentence, &s.sig).unwrap();
        atomic_truth(s, &a, 10_000).unwrap()
    }

    #[test]
    fn even_cycle_adjacency() {
        // 2 in S: component 2 is C_4
        let s = structure(&[2]);
        assert_eq!(truth(&s, "E((2,0),(2,1))"), Truth::True);
        assert_eq!(truth(&s, "E((2,0),(2,2))"), Truth::False);
        assert_eq!(truth(&s, "E((2,0),(2,3))"), Truth::True); // wrap-around
    }

    #[test]
    fn odd_cycle_adjacency() {
        // 3 not in S: component 3 is C_7, so 0 and 6 are adjacent
        let s = structure(&[2]);
        assert_eq!(truth(&s, "E((3,0),(3,6))"), Truth::True);
        assert_eq!(truth(&s, "E((3,0),(3,5))"), Truth::False);
    }

    #[test]
    fn cross_component_pairs_are_never_adjacent() {
        let s = structure(&[2, 4]);
        for j in 0..4 {
            for j2 in 0..7 {
                assert_eq!(
                    truth(&s, &format!("E((2,{j}),(3,{j2}))")),
                    Truth::False,
                    "({j},{j2}) crossed components"
                );
            }
        }
    }

    #[test]
    fn adjacency_is_symmetric_and_two_regular() {
        let s = structure(&[2, 5]);
        let oracle = s.oracle.clone().unwrap();
        for n in 2..=6u64 {
            let len = cycle_len(oracle.as_ref(), n);
            for j in 0..len {
                let mut neighbors = 0;
                for j2 in 0..len {
                    let fwd = truth(&s, &format!("E(({n},{j}),({n},{j2}))"));
                    let bwd = truth(&s, &format!("E(({n},{j2}),({n},{j}))"));
                    assert_eq!(fwd, bwd, "asymmetric at ({n},{j}),({n},{j2})");
                    if fwd == Truth::True {
                        neighbors += 1;
                    }
                }
                assert_eq!(neighbors, 2, "vertex ({n},{j}) has degree {neighbors}");
            }
        }
    }

    #[test]
    fn universe_checks_index_ranges() {
        let s = structure(&[2]);
        // (2, 3) is a C_4 vertex; (2, 4) is out of range; (1, 0) is below n_min
        assert_eq!(
            universe_contains(&s, &Word::from_ints(&[2, 3]), 10_000),
            Truth::True
        );
        assert_eq!(
            universe_contains(&s, &Word::from_ints(&[2, 4]), 10_000),
            Truth::Unknown
        );
        assert_eq!(
            universe_contains(&s, &Word::from_ints(&[1, 0]), 10_000),
            Truth::Unknown
        );
    }

    #[test]
    fn vertices_enumeration_matches_lengths() {
        let oracle = NaturalSetOracle::new([2]);
        let vs = vertices_upto(&oracle, 2, 3);
        // C_4 (n=2 in S) + C_7 (n=3 not in S)
        assert_eq!(vs.len(), 4 + 7);
    }
}
