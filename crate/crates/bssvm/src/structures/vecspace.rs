//! Finite-dimensional vector spaces as computable structures, and the
//! coordinate-map isomorphism onto a target basis (with an exact host-side
//! inverse for round-trip testing).

use super::{RStructure, Signature, StructureError};
use crate::dsl::parse_machine;
use crate::machine::{Machine, Word};
use crate::scalar::{arith, ArithOp, Backend, Scalar, ScalarKind, Sign};

fn backend_name(b: Backend) -> &'static str {
    b.name()
}

/// The vector space of dimension n over the given backend: universe = words
/// of length n, with `add` and the binary `scale(lambda, v)` as machines and
/// the unit coordinate words as designated basis constants.
pub fn vs_make(n: usize, backend: Backend) -> RStructure {
    let bname = backend_name(backend);
    let universe_src = format!(
        "machine universe over {bname}\n\
         node start: input -> c1\n\
         node c1: branch x0-{n} >= 0 ? c2 : spin\n\
         node c2: branch {n}-x0 >= 0 ? ok : spin\n\
         node ok: output []\n\
         node spin: shift left -> spin\n"
    );
    let universe = parse_machine(&universe_src).expect("universe source is well-formed");

    let add_src = if n == 0 {
        format!(
            "machine add over {bname}\n\
             node start: input -> done\n\
             node done: output []\n"
        )
    } else {
        let assigns = (1..=n)
            .map(|i| format!("x{i} := x{i}+x{}", n + i))
            .collect::<Vec<_>>()
            .join(", ");
        let outs = (1..=n)
            .map(|i| format!("x{i}"))
            .collect::<Vec<_>>()
            .join(", ");
        format!(
            "machine add over {bname}\n\
             node start: input -> sum\n\
             node sum: compute {assigns} -> done\n\
             node done: output [{outs}]\n"
        )
    };
    let add = parse_machine(&add_src).expect("add source is well-formed");

    let scale_src = if n == 0 {
        format!(
            "machine scale over {bname}\n\
             node start: input -> done\n\
             node done: output []\n"
        )
    } else {
        let assigns = (1..=n)
            .map(|i| format!("x{i} := x1*x{}", i + 1))
            .collect::<Vec<_>>()
            .join(", ");
        let outs = (1..=n)
            .map(|i| format!("x{i}"))
            .collect::<Vec<_>>()
            .join(", ");
        format!(
            "machine scale over {bname}\n\
             node start: input -> mul\n\
             node mul: compute {assigns} -> done\n\
             node done: output [{outs}]\n"
        )
    };
    let scale = parse_machine(&scale_src).expect("scale source is well-formed");

    let mut sig = Signature::default();
    sig.functions.insert("add".into(), 2);
    sig.functions.insert("scale".into(), 2);
    sig.constants.push("zero".into());
    let mut constants = std::collections::BTreeMap::new();
    constants.insert(
        "zero".to_string(),
        Word::new(vec![Scalar::zero(); n]).unwrap(),
    );
    for i in 1..=n {
        let name = format!("b{i}");
        sig.constants.push(name.clone());
        let mut entries = vec![Scalar::zero(); n];
        entries[i - 1] = Scalar::one();
        constants.insert(name, Word::new(entries).unwrap());
    }

    let mut functions = std::collections::BTreeMap::new();
    functions.insert("add".to_string(), add);
    functions.insert("scale".to_string(), scale);

    RStructure {
        sig,
        universe,
        explicit_universe: if n == 0 {
            Some(vec![Word::empty()])
        } else {
            None
        },
        relations: std::collections::BTreeMap::new(),
        functions,
        constants,
        oracle: None,
        default_budget: 10_000,
    }
}

/// Exact Gaussian-elimination rank of a scalar matrix (rows of equal length).
fn rank(rows: &[Vec<Scalar>]) -> usize {
    let mut m: Vec<Vec<Scalar>> = rows.to_vec();
    let ncols = m.first().map_or(0, |r| r.len());
    let mut r = 0usize;
    for col in 0..ncols {
        let Some(pivot) = (r..m.len()).find(|&i| m[i][col].sign() != Sign::Zero) else {
            continue;
        };
        m.swap(r, pivot);
        let pv = m[r][col].clone();
        for i in 0..m.len() {
            if i == r {
                continue;
            }
            if m[i][col].sign() == Sign::Zero {
                continue;
            }
            let f = arith(ArithOp::Div, &m[i][col], &pv).expect("pivot is nonzero");
            for j in col..ncols {
                let t = arith(ArithOp::Mul, &f, &m[r][j]).expect("exact arithmetic");
                m[i][j] = arith(ArithOp::Sub, &m[i][j], &t).expect("exact arithmetic");
            }
        }
        r += 1;
        if r == m.len() {
            break;
        }
    }
    r
}

/// The coordinate-map machine onto a target basis, with an exact host-side
/// inverse. The machine computes (l1, ..., ln) -> sum_i l_i * a_i; the
/// inverse solves the linear system by elimination and exists because the
/// basis is verified independent (exact rank = n).
pub struct VsIso {
    pub machine: Machine,
    basis: Vec<Word>,
    dim: usize,
    target_len: usize,
}

pub fn vs_iso(n: usize, target_basis: &[Word]) -> Result<VsIso, StructureError> {
    if target_basis.len() != n {
        return Err(StructureError::BasisShape(format!(
            "expected {n} basis vectors, got {}",
            target_basis.len()
        )));
    }
    let m = target_basis.first().map_or(0, |w| w.len());
    if target_basis.iter().any(|w| w.len() != m) {
        return Err(StructureError::BasisShape(
            "basis vectors have unequal lengths".into(),
        ));
    }
    if n > 0 && m == 0 {
        return Err(StructureError::BasisShape(
            "basis vectors must be nonempty".into(),
        ));
    }
    let rows: Vec<Vec<Scalar>> = target_basis
        .iter()
        .map(|w| w.entries().to_vec())
        .collect();
    if rank(&rows) != n {
        return Err(StructureError::DependentBasis);
    }

    let algebraic = target_basis
        .iter()
        .flat_map(|w| w.entries())
        .any(|s| s.kind() == ScalarKind::Algebraic);
    let bname = if algebraic { "Ralg" } else { "Q" };

    let mut src = format!("machine vs_iso over {bname}\n");
    for (i, w) in target_basis.iter().enumerate() {
        for (j, v) in w.entries().iter().enumerate() {
            src.push_str(&format!("param a{}_{} = {}\n", i + 1, j + 1, v.render()));
        }
    }
    src.push_str("node start: input -> lin\n");
    if n == 0 || m == 0 {
        src.push_str("node lin: output []\n");
        // replace the dangling compute reference: a zero-dimensional map
        src = format!(
            "machine vs_iso over {bname}\n\
             node start: input -> lin\n\
             node lin: output []\n"
        );
    } else {
        let assigns = (1..=m)
            .map(|j| {
                let terms = (1..=n)
                    .map(|i| format!("a{i}_{j}*x{i}"))
                    .collect::<Vec<_>>()
                    .join("+");
                format!("x{} := {terms}", n + j)
            })
            .collect::<Vec<_>>()
            .join(", ");
        let outs = (1..=m)
            .map(|j| format!("x{}", n + j))
            .collect::<Vec<_>>()
            .join(", ");
        src.push_str(&format!("node lin: compute {assigns} -> done\n"));
        src.push_str(&format!("node done: output [{outs}]\n"));
    }
    let machine =
        parse_machine(&src).map_err(|e| StructureError::MachineBuild(e.to_string()))?;
    Ok(VsIso {
        machine,
        basis: target_basis.to_vec(),
        dim: n,
        target_len: m,
    })
}

impl VsIso {
    /// Solve sum_i l_i a_i = w exactly; None when w is outside the span.
    /// Computed host-side by elimination (the paper's point stands: inverses
    /// of computable injections need not be computable by machines).
    pub fn invert(&self, w: &Word) -> Option<Word> {
        if w.len() != self.target_len {
            return None;
        }
        let n = self.dim;
        let m = self.target_len;
        // columns are basis vectors; augmented with w
        let mut mat: Vec<Vec<Scalar>> = (0..m)
            .map(|row| {
                let mut r: Vec<Scalar> = (0..n)
                    .map(|col| self.basis[col].entries()[row].clone())
                    .collect();
                r.push(w.entries()[row].clone());
                r
            })
            .collect();
        let mut pivot_rows: Vec<Option<usize>> = vec![None; n];
        let mut r = 0usize;
        for col in 0..n {
            let Some(p) = (r..m).find(|&i| mat[i][col].sign() != Sign::Zero) else {
                continue;
            };
            mat.swap(r, p);
            let pv = mat[r][col].clone();
            for i in 0..m {
                if i == r || mat[i][col].sign() == Sign::Zero {
                    continue;
                }
                let f = arith(ArithOp::Div, &mat[i][col], &pv).ok()?;
                for j in col..=n {
                    let t = arith(ArithOp::Mul, &f, &mat[r][j]).ok()?;
                    mat[i][j] = arith(ArithOp::Sub, &mat[i][j], &t).ok()?;
                }
            }
            pivot_rows[col] = Some(r);
            r += 1;
            if r == m {
                break;
            }
        }
        let mut lambda = vec![Scalar::zero(); n];
        for col in 0..n {
            // the basis is independent, so every column has a pivot
            let row = pivot_rows[col]?;
            lambda[col] = arith(ArithOp::Div, &mat[row][n], &mat[row][col]).ok()?;
        }
        // consistency: rows without pivots must have zero augmented entry
        for (i, row) in mat.iter().enumerate() {
            if pivot_rows.iter().flatten().any(|&pr| pr == i) {
                continue;
            }
            if row[n].sign() != Sign::Zero {
                return None;
            }
        }
        Word::new(lambda).ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::{run, RunOutcome};
    use crate::structures::{atomic_truth, parse_atomic, Truth};

    fn w(vals: &[i64]) -> Word {
        Word::from_ints(vals)
    }

    fn run_fn(m: &Machine, input: Word) -> Word {
        match run(m, input, 10_000, None).unwrap() {
            RunOutcome::Halted { output, .. } => output,
            other => panic!("expected halt, got {other:?}"),
        }
    }

    #[test]
    fn add_and_scale_in_v2() {
        let v2 = vs_make(2, Backend::RationalField);
        let add = v2.functions.get("add").unwrap();
        let sum = run_fn(add, w(&[1, 0, 0, 1]));
        assert!(sum.eq_exact(&w(&[1, 1])).unwrap());
        let scale = v2.functions.get("scale").unwrap();
        let scaled = run_fn(
            scale,
            Word::new(vec![
                Scalar::rat(3, 2),
                Scalar::int(2),
                Scalar::int(4),
            ])
            .unwrap(),
        );
        assert!(scaled.eq_exact(&w(&[3, 6])).unwrap());
        // the atomic diagram agrees
        let s = parse_atomic("add((1,0),(0,1)) = (1,1)", &v2.sig).unwrap();
        assert_eq!(atomic_truth(&v2, &s, 10_000).unwrap(), Truth::True);
    }

    #[test]
    fn zero_dimensional_space() {
        let v0 = vs_make(0, Backend::RationalField);
        assert_eq!(v0.explicit_universe.as_ref().unwrap().len(), 1);
        assert!(v0.explicit_universe.as_ref().unwrap()[0].is_empty());
        let add = v0.functions.get("add").unwrap();
        let out = run_fn(add, Word::empty());
        assert!(out.is_empty());
    }

    #[test]
    fn iso_on_triangular_basis() {
        // basis (1,1), (0,1): (l1, l2) -> (l1, l1 + l2)
        let basis = vec![w(&[1, 1]), w(&[0, 1])];
        let iso = vs_iso(2, &basis).unwrap();
        let out = run_fn(&iso.machine, w(&[2, 3]));
        assert!(out.eq_exact(&w(&[2, 5])).unwrap());
        let back = iso.invert(&out).unwrap();
        assert!(back.eq_exact(&w(&[2, 3])).unwrap());
    }

    #[test]
    fn dependent_basis_is_rejected() {
        let basis = vec![w(&[1, 1]), w(&[2, 2])];
        assert!(matches!(
            vs_iso(2, &basis),
            Err(StructureError::DependentBasis)
        ));
    }

    #[test]
    fn sqrt2_basis_scales_exactly() {
        let r2 = crate::scalar::parse_literal("alg(x^2-2, 1, 2)").unwrap();
        let basis = vec![Word::new(vec![r2]).unwrap()];
        let iso = vs_iso(1, &basis).unwrap();
        let out = run_fn(&iso.machine, w(&[3]));
        assert_eq!(out.len(), 1);
        // (3*sqrt2)^2 = 18 exactly
        let sq = arith(ArithOp::Mul, &out.entries()[0], &out.entries()[0]).unwrap();
        assert!(sq.eq_exact(&Scalar::int(18)).unwrap());
        let back = iso.invert(&out).unwrap();
        assert!(back.eq_exact(&w(&[3])).unwrap());
    }

    #[test]
    fn rank_detects_dependence() {
        let rows = vec![
            vec![Scalar::int(1), Scalar::int(2), Scalar::int(3)],
            vec![Scalar::int(2), Scalar::int(4), Scalar::int(6)],
            vec![Scalar::int(0), Scalar::int(1), Scalar::int(0)],
        ];
        assert_eq!(rank(&rows), 2);
    }
}
