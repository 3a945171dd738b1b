//! Finite-level infinitary formulas: leaves are (negated) atomic sentences;
//! connectives are finite and/or, quantifier blocks, and countable
//! disjunctions/conjunctions whose index sets are machine halting sets.
//! Evaluation is exact brute force on finite structures and budgeted
//! semi-evaluation at the first level elsewhere.

pub mod sexpr;

use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use crate::machine::{run, Machine, RunOutcome, Word};
use crate::scalar::Scalar;
use crate::structures::{atomic_truth, Atomic, RStructure, StructureError, Term, Truth};

/// A countable index set given as the halting set of a machine on inputs
/// [0], [1], [2], ...; `bound` declares a finite search range when one
/// exists (required for brute-force evaluation).
#[derive(Clone)]
pub struct IndexSet {
    pub machine: Arc<Machine>,
    pub bound: Option<u64>,
    /// Recorded parameter-field tag; metadata only.
    pub param_field: Option<String>,
}

impl std::fmt::Debug for IndexSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("IndexSet")
            .field("machine", &self.machine.name)
            .field("bound", &self.bound)
            .finish()
    }
}

impl IndexSet {
    /// An index set containing every natural below the bound (realized by a
    /// machine that halts on every input).
    pub fn full_range(bound: u64) -> IndexSet {
        let src = "machine all over Z\nnode a: input -> b\nnode b: output [x1]\n";
        IndexSet {
            machine: Arc::new(crate::dsl::parse_machine(src).expect("range machine parses")),
            bound: Some(bound),
            param_field: None,
        }
    }

    /// Semi-decide membership of i within a step budget.
    pub fn contains(&self, i: u64, budget: u64) -> bool {
        if let Some(b) = self.bound {
            if i >= b {
                return false;
            }
        }
        matches!(
            run(&self.machine, Word::from_ints(&[i as i64]), budget, None),
            Ok(RunOutcome::Halted { .. })
        )
    }
}

#[derive(Clone, Debug)]
pub enum Formula {
    /// Atomic or negated-atomic leaf.
    Literal(Atomic),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Exists(Vec<String>, Box<Formula>),
    Forall(Vec<String>, Box<Formula>),
    /// Countable disjunction over an index set; the index variable is bound
    /// to the word [i] in the body.
    CountableOr {
        index: IndexSet,
        var: String,
        body: Box<Formula>,
    },
    CountableAnd {
        index: IndexSet,
        var: String,
        body: Box<Formula>,
    },
    /// A transfinite (limit-level) construct: representable, never evaluable.
    Transfinite(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LevelKind {
    Delta0,
    Sigma,
    Pi,
}

/// Classification level: n = 0 exactly for the finitary quantifier-free
/// formulas.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Level {
    pub n: u32,
    pub kind: LevelKind,
}

impl Level {
    fn delta0() -> Level {
        Level {
            n: 0,
            kind: LevelKind::Delta0,
        }
    }

    fn sigma(n: u32) -> Level {
        Level {
            n,
            kind: LevelKind::Sigma,
        }
    }

    fn pi(n: u32) -> Level {
        Level {
            n,
            kind: LevelKind::Pi,
        }
    }

    /// Is every set defined at this level also Sigma_n?
    fn within_sigma(&self, n: u32) -> bool {
        self.n < n || (self.n == n && matches!(self.kind, LevelKind::Sigma | LevelKind::Delta0))
    }

    fn within_pi(&self, n: u32) -> bool {
        self.n < n || (self.n == n && matches!(self.kind, LevelKind::Pi | LevelKind::Delta0))
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ClassifyError {
    #[error("transfinite levels are not supported: {0}")]
    TransfiniteNotSupported(String),
}

/// Least finite level of the formula under the inductive definition, with
/// finite and/or and repeated quantifiers absorbed into the same level.
pub fn classify(f: &Formula) -> Result<Level, ClassifyError> {
    match f {
        Formula::Literal(_) => Ok(Level::delta0()),
        Formula::And(children) | Formula::Or(children) => {
            let levels = children
                .iter()
                .map(classify)
                .collect::<Result<Vec<_>, _>>()?;
            let mx = levels.iter().map(|l| l.n).max().unwrap_or(0);
            if mx == 0 {
                return Ok(Level::delta0());
            }
            let all_sigma = levels.iter().all(|l| l.within_sigma(mx));
            let all_pi = levels.iter().all(|l| l.within_pi(mx));
            match (all_sigma, all_pi) {
                (true, true) => Ok(Level::sigma(mx)), // cannot happen for mx > 0
                (true, false) => Ok(Level::sigma(mx)),
                (false, true) => Ok(Level::pi(mx)),
                (false, false) => {
                    // a genuine mix of Sigma_mx and Pi_mx parts
                    if matches!(f, Formula::Or(_)) {
                        Ok(Level::sigma(mx + 1))
                    } else {
                        Ok(Level::pi(mx + 1))
                    }
                }
            }
        }
        Formula::Exists(_, body) | Formula::CountableOr { body, .. } => {
            let b = classify(body)?;
            if b.n >= 1 && b.within_sigma(b.n) {
                Ok(Level::sigma(b.n))
            } else if b.n == 0 {
                Ok(Level::sigma(1))
            } else {
                Ok(Level::sigma(b.n + 1))
            }
        }
        Formula::Forall(_, body) | Formula::CountableAnd { body, .. } => {
            let b = classify(body)?;
            if b.n >= 1 && b.within_pi(b.n) {
                Ok(Level::pi(b.n))
            } else if b.n == 0 {
                Ok(Level::pi(1))
            } else {
                Ok(Level::pi(b.n + 1))
            }
        }
        Formula::Transfinite(d) => Err(ClassifyError::TransfiniteNotSupported(d.clone())),
    }
}

/// Push negation to the leaves (used for duality checks and refutation).
pub fn negate(f: &Formula) -> Formula {
    match f {
        Formula::Literal(a) => Formula::Literal(match a {
            Atomic::Not(inner) => (**inner).clone(),
            other => Atomic::Not(Box::new(other.clone())),
        }),
        Formula::And(cs) => Formula::Or(cs.iter().map(negate).collect()),
        Formula::Or(cs) => Formula::And(cs.iter().map(negate).collect()),
        Formula::Exists(vs, b) => Formula::Forall(vs.clone(), Box::new(negate(b))),
        Formula::Forall(vs, b) => Formula::Exists(vs.clone(), Box::new(negate(b))),
        Formula::CountableOr { index, var, body } => Formula::CountableAnd {
            index: index.clone(),
            var: var.clone(),
            body: Box::new(negate(body)),
        },
        Formula::CountableAnd { index, var, body } => Formula::CountableOr {
            index: index.clone(),
            var: var.clone(),
            body: Box::new(negate(body)),
        },
        Formula::Transfinite(d) => Formula::Transfinite(d.clone()),
    }
}

fn subst_term(t: &Term, var: &str, w: &Word) -> Term {
    match t {
        Term::Var(v) if v == var => Term::Word(w.clone()),
        Term::Apply(f, args) => Term::Apply(
            f.clone(),
            args.iter().map(|a| subst_term(a, var, w)).collect(),
        ),
        other => other.clone(),
    }
}

fn subst_atomic(a: &Atomic, var: &str, w: &Word) -> Atomic {
    match a {
        Atomic::Rel(r, ts) => Atomic::Rel(
            r.clone(),
            ts.iter().map(|t| subst_term(t, var, w)).collect(),
        ),
        Atomic::Eq(x, y) => Atomic::Eq(subst_term(x, var, w), subst_term(y, var, w)),
        Atomic::Not(inner) => Atomic::Not(Box::new(subst_atomic(inner, var, w))),
    }
}

/// Substitute a word for a free variable.
pub fn subst(f: &Formula, var: &str, w: &Word) -> Formula {
    match f {
        Formula::Literal(a) => Formula::Literal(subst_atomic(a, var, w)),
        Formula::And(cs) => Formula::And(cs.iter().map(|c| subst(c, var, w)).collect()),
        Formula::Or(cs) => Formula::Or(cs.iter().map(|c| subst(c, var, w)).collect()),
        Formula::Exists(vs, b) => {
            if vs.iter().any(|v| v == var) {
                f.clone()
            } else {
                Formula::Exists(vs.clone(), Box::new(subst(b, var, w)))
            }
        }
        Formula::Forall(vs, b) => {
            if vs.iter().any(|v| v == var) {
                f.clone()
            } else {
                Formula::Forall(vs.clone(), Box::new(subst(b, var, w)))
            }
        }
        Formula::CountableOr { index, var: iv, body } => {
            if iv == var {
                f.clone()
            } else {
                Formula::CountableOr {
                    index: index.clone(),
                    var: iv.clone(),
                    body: Box::new(subst(body, var, w)),
                }
            }
        }
        Formula::CountableAnd { index, var: iv, body } => {
            if iv == var {
                f.clone()
            } else {
                Formula::CountableAnd {
                    index: index.clone(),
                    var: iv.clone(),
                    body: Box::new(subst(body, var, w)),
                }
            }
        }
        Formula::Transfinite(d) => Formula::Transfinite(d.clone()),
    }
}

pub type Assignment = BTreeMap<String, Word>;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("structure has no explicit finite universe")]
    InfiniteUniverse,
    #[error("countable node has no declared finite bound")]
    UnboundedEnumerator,
    #[error("transfinite construct cannot be evaluated")]
    Transfinite,
    #[error("a decider machine returned unknown during brute-force evaluation")]
    MachineUnknown,
    #[error(transparent)]
    Structure(#[from] StructureError),
}

fn apply_assignment(f: &Formula, asg: &Assignment) -> Formula {
    let mut out = f.clone();
    for (v, w) in asg {
        out = subst(&out, v, w);
    }
    out
}

/// Classical Tarskian truth by exhaustive evaluation over the explicit
/// universe; the brute-force oracle for the budgeted evaluator.
pub fn eval_finite(s: &RStructure, f: &Formula, asg: &Assignment) -> Result<bool, EvalError> {
    let universe = s
        .explicit_universe
        .as_ref()
        .ok_or(EvalError::InfiniteUniverse)?;
    eval_finite_inner(s, &apply_assignment(f, asg), universe)
}

fn eval_finite_inner(s: &RStructure, f: &Formula, universe: &[Word]) -> Result<bool, EvalError> {
    match f {
        Formula::Literal(a) => match atomic_truth(s, a, s.default_budget)? {
            Truth::True => Ok(true),
            Truth::False => Ok(false),
            Truth::Unknown => Err(EvalError::MachineUnknown),
        },
        Formula::And(cs) => {
            for c in cs {
                if !eval_finite_inner(s, c, universe)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Formula::Or(cs) => {
            for c in cs {
                if eval_finite_inner(s, c, universe)? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
        Formula::Exists(vars, body) => {
            eval_quantifier(s, vars, body, universe, /*existential=*/ true)
        }
        Formula::Forall(vars, body) => {
            eval_quantifier(s, vars, body, universe, /*existential=*/ false)
        }
        Formula::CountableOr { index, var, body } => {
            let bound = index.bound.ok_or(EvalError::UnboundedEnumerator)?;
            for i in 0..bound {
                if !index.contains(i, s.default_budget) {
                    continue;
                }
                let inst = subst(body, var, &Word::from_ints(&[i as i64]));
                if eval_finite_inner(s, &inst, universe)? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
        Formula::CountableAnd { index, var, body } => {
            let bound = index.bound.ok_or(EvalError::UnboundedEnumerator)?;
            for i in 0..bound {
                if !index.contains(i, s.default_budget) {
                    continue;
                }
                let inst = subst(body, var, &Word::from_ints(&[i as i64]));
                if !eval_finite_inner(s, &inst, universe)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Formula::Transfinite(_) => Err(EvalError::Transfinite),
    }
}

fn eval_quantifier(
    s: &RStructure,
    vars: &[String],
    body: &Formula,
    universe: &[Word],
    existential: bool,
) -> Result<bool, EvalError> {
    // iterate universe^|vars| odometer-style
    if vars.is_empty() {
        return eval_finite_inner(s, body, universe);
    }
    if universe.is_empty() {
        return Ok(!existential);
    }
    let k = vars.len();
    let mut idx = vec![0usize; k];
    loop {
        let mut inst = body.clone();
        for (v, &i) in vars.iter().zip(&idx) {
            inst = subst(&inst, v, &universe[i]);
        }
        let val = eval_finite_inner(s, &inst, universe)?;
        if existential && val {
            return Ok(true);
        }
        if !existential && !val {
            return Ok(false);
        }
        // advance odometer
        let mut pos = 0;
        loop {
            idx[pos] += 1;
            if idx[pos] < universe.len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
            if pos == k {
                return Ok(!existential);
            }
        }
    }
}

/// Caller-supplied witness streams for quantifier search.
pub trait WitnessEnumerator {
    /// The idx-th candidate word, or None when the (finite) stream is
    /// exhausted.
    fn word(&self, idx: u64) -> Option<Word>;

    /// Total count for finite streams; None for infinite ones.
    fn finite_len(&self) -> Option<u64>;
}

/// A finite witness list.
pub struct WordListEnumerator(pub Vec<Word>);

impl WitnessEnumerator for WordListEnumerator {
    fn word(&self, idx: u64) -> Option<Word> {
        self.0.get(idx as usize).cloned()
    }

    fn finite_len(&self) -> Option<u64> {
        Some(self.0.len() as u64)
    }
}

/// The default infinite witness stream over real universes: length-`dim`
/// words of rationals, enumerated diagonally.
pub struct RationalGridEnumerator {
    pub dim: usize,
}

fn zigzag(n: u64) -> i64 {
    let half = (n / 2) as i64;
    if n % 2 == 0 {
        half
    } else {
        -half - 1
    }
}

impl WitnessEnumerator for RationalGridEnumerator {
    fn word(&self, idx: u64) -> Option<Word> {
        let mut rest = idx;
        let mut entries = Vec::with_capacity(self.dim);
        for k in 0..self.dim {
            let part = if k + 1 == self.dim {
                rest
            } else {
                let (a, b) = crate::structures::order::unpair(rest);
                rest = b;
                a
            };
            let (p, q) = crate::structures::order::unpair(part);
            entries.push(Scalar::Rat(num_rational::BigRational::new(
                zigzag(p).into(),
                ((q + 1) as i64).into(),
            )));
        }
        Some(Word::new(entries).expect("rational entries are uniform"))
    }

    fn finite_len(&self) -> Option<u64> {
        None
    }
}

#[derive(Debug, Error)]
pub enum BudgetedError {
    #[error("budgeted evaluation is only offered at the first level (got {0:?})")]
    LevelTooHigh(Level),
    #[error(transparent)]
    Classify(#[from] ClassifyError),
    #[error(transparent)]
    Structure(#[from] StructureError),
}

/// Budgeted semi-evaluation of a first-level formula: existential formulas
/// can only be confirmed (never refuted), universal ones only refuted —
/// except that a universal formula over certified-finite witness streams and
/// bounded index sets can be confirmed by exhaustion. A True result is
/// stable under any budget increase.
pub fn eval_budgeted(
    s: &RStructure,
    f: &Formula,
    asg: &Assignment,
    witnesses: &dyn WitnessEnumerator,
    budget: u64,
) -> Result<Truth, BudgetedError> {
    let level = classify(f)?;
    if level.n > 1 {
        return Err(BudgetedError::LevelTooHigh(level));
    }
    let g = apply_assignment(f, asg);
    match level.kind {
        LevelKind::Sigma | LevelKind::Delta0 => {
            let mut stage = 1u64;
            loop {
                if try_verify(s, &g, witnesses, stage) {
                    return Ok(Truth::True);
                }
                if stage >= budget {
                    return Ok(Truth::Unknown);
                }
                stage = (stage * 2).min(budget);
            }
        }
        LevelKind::Pi => {
            let mut stage = 1u64;
            loop {
                if try_refute(s, &g, witnesses, stage) {
                    return Ok(Truth::False);
                }
                if stage >= budget {
                    break;
                }
                stage = (stage * 2).min(budget);
            }
            // exhaustion path: finite witness stream and bounded index sets
            if witnesses.finite_len().is_some() {
                if let Some(t) = exhaustive_truth(s, &g, witnesses, budget) {
                    return Ok(t);
                }
            }
            Ok(Truth::Unknown)
        }
    }
}

/// Certified universe membership: the universe semi-decider halts within
/// the budget. Quantifier witnesses relativize to the universe through this.
fn certified_member(s: &RStructure, w: &Word, budget: u64) -> bool {
    matches!(
        run(&s.universe, w.clone(), budget, s.oracle.as_deref()),
        Ok(RunOutcome::Halted { .. })
    )
}

fn tuple_witnesses(
    s: &RStructure,
    witnesses: &dyn WitnessEnumerator,
    vars: &[String],
    mut code: u64,
    stage: u64,
) -> Option<Vec<Word>> {
    let mut out = Vec::with_capacity(vars.len());
    for k in 0..vars.len() {
        let part = if k + 1 == vars.len() {
            code
        } else {
            let (a, b) = crate::structures::order::unpair(code);
            code = b;
            a
        };
        let w = witnesses.word(part)?;
        if !certified_member(s, &w, stage) {
            return None;
        }
        out.push(w);
    }
    Some(out)
}

/// Monotone verification at a dovetail stage: indices, witness codes, and
/// machine budgets are all bounded by the stage.
fn try_verify(s: &RStructure, f: &Formula, witnesses: &dyn WitnessEnumerator, stage: u64) -> bool {
    match f {
        Formula::Literal(a) => {
            matches!(atomic_truth(s, a, stage), Ok(Truth::True))
        }
        Formula::And(cs) => cs.iter().all(|c| try_verify(s, c, witnesses, stage)),
        Formula::Or(cs) => cs.iter().any(|c| try_verify(s, c, witnesses, stage)),
        Formula::Exists(vars, body) => (0..=stage).any(|code| {
            let Some(words) = tuple_witnesses(s, witnesses, vars, code, stage) else {
                return false;
            };
            let mut inst = (**body).clone();
            for (v, w) in vars.iter().zip(&words) {
                inst = subst(&inst, v, w);
            }
            try_verify(s, &inst, witnesses, stage)
        }),
        Formula::CountableOr { index, var, body } => (0..=stage).any(|i| {
            index.contains(i, stage)
                && try_verify(
                    s,
                    &subst(body, var, &Word::from_ints(&[i as i64])),
                    witnesses,
                    stage,
                )
        }),
        // universal constructs cannot be confirmed within a budget
        Formula::Forall(..) | Formula::CountableAnd { .. } | Formula::Transfinite(_) => false,
    }
}

/// Monotone refutation at a dovetail stage (the dual search).
fn try_refute(s: &RStructure, f: &Formula, witnesses: &dyn WitnessEnumerator, stage: u64) -> bool {
    match f {
        Formula::Literal(a) => {
            matches!(atomic_truth(s, a, stage), Ok(Truth::False))
        }
        Formula::And(cs) => cs.iter().any(|c| try_refute(s, c, witnesses, stage)),
        Formula::Or(cs) => cs.iter().all(|c| try_refute(s, c, witnesses, stage)),
        Formula::Forall(vars, body) => (0..=stage).any(|code| {
            let Some(words) = tuple_witnesses(s, witnesses, vars, code, stage) else {
                return false;
            };
            let mut inst = (**body).clone();
            for (v, w) in vars.iter().zip(&words) {
                inst = subst(&inst, v, w);
            }
            try_refute(s, &inst, witnesses, stage)
        }),
        Formula::CountableAnd { index, var, body } => (0..=stage).any(|i| {
            index.contains(i, stage)
                && try_refute(
                    s,
                    &subst(body, var, &Word::from_ints(&[i as i64])),
                    witnesses,
                    stage,
                )
        }),
        Formula::Exists(..) | Formula::CountableOr { .. } | Formula::Transfinite(_) => false,
    }
}

/// Fully evaluate over a finite witness stream; None when an index set is
/// unbounded or a machine stays unknown at the budget.
fn exhaustive_truth(
    s: &RStructure,
    f: &Formula,
    witnesses: &dyn WitnessEnumerator,
    budget: u64,
) -> Option<Truth> {
    match f {
        Formula::Literal(a) => match atomic_truth(s, a, budget).ok()? {
            Truth::Unknown => None,
            t => Some(t),
        },
        Formula::And(cs) => {
            for c in cs {
                match exhaustive_truth(s, c, witnesses, budget)? {
                    Truth::False => return Some(Truth::False),
                    Truth::True => {}
                    Truth::Unknown => return None,
                }
            }
            Some(Truth::True)
        }
        Formula::Or(cs) => {
            for c in cs {
                match exhaustive_truth(s, c, witnesses, budget)? {
                    Truth::True => return Some(Truth::True),
                    Truth::False => {}
                    Truth::Unknown => return None,
                }
            }
            Some(Truth::False)
        }
        Formula::Forall(vars, body) | Formula::Exists(vars, body) => {
            let existential = matches!(f, Formula::Exists(..));
            let len = witnesses.finite_len()?;
            let k = vars.len();
            let total = len.checked_pow(k as u32)?;
            for code in 0..total {
                let mut rest = code;
                let mut inst = (**body).clone();
                for v in vars {
                    let i = rest % len;
                    rest /= len;
                    let w = witnesses.word(i)?;
                    // exhaustion is only sound over certified members
                    if !certified_member(s, &w, budget) {
                        return None;
                    }
                    inst = subst(&inst, v, &w);
                }
                match exhaustive_truth(s, &inst, witnesses, budget)? {
                    Truth::True if existential => return Some(Truth::True),
                    Truth::False if !existential => return Some(Truth::False),
                    Truth::Unknown => return None,
                    _ => {}
                }
            }
            Some(if existential { Truth::False } else { Truth::True })
        }
        Formula::CountableOr { index, var, body } | Formula::CountableAnd { index, var, body } => {
            let disjunctive = matches!(f, Formula::CountableOr { .. });
            let bound = index.bound?;
            for i in 0..bound {
                if !index.contains(i, budget) {
                    continue;
                }
                let inst = subst(body, var, &Word::from_ints(&[i as i64]));
                match exhaustive_truth(s, &inst, witnesses, budget)? {
                    Truth::True if disjunctive => return Some(Truth::True),
                    Truth::False if !disjunctive => return Some(Truth::False),
                    Truth::Unknown => return None,
                    _ => {}
                }
            }
            Some(if disjunctive { Truth::False } else { Truth::True })
        }
        Formula::Transfinite(_) => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_machine;
    use crate::structures::{RelationDecider, Signature};

    /// Triangle graph on {0, 1, 2}: E(a, b) iff a != b.
    fn triangle() -> RStructure {
        let adj = parse_machine(
            "machine tri over Z equational\n\
             node start: input -> eq\n\
             node eq: branch x1-x2 = 0 ? no : yes\n\
             node yes: compute x3 := 1 -> yo\n\
             node yo: output [x3]\n\
             node no: compute x3 := 0 -> noo\n\
             node noo: output [x3]\n",
        )
        .unwrap();
        let universe = parse_machine(
            "machine u over Z\nnode a: input -> b\nnode b: output\n",
        )
        .unwrap();
        let mut sig = Signature::default();
        sig.relations.insert("E".into(), 2);
        let mut relations = BTreeMap::new();
        relations.insert("E".to_string(), RelationDecider::Total(adj));
        RStructure {
            sig,
            universe,
            explicit_universe: Some(vec![
                Word::from_ints(&[0]),
                Word::from_ints(&[1]),
                Word::from_ints(&[2]),
            ]),
            relations,
            functions: BTreeMap::new(),
            constants: BTreeMap::new(),
            oracle: None,
            default_budget: 1000,
        }
    }

    fn atom_e(x: Term, y: Term) -> Formula {
        Formula::Literal(Atomic::Rel("E".into(), vec![x, y]))
    }

    fn var(v: &str) -> Term {
        Term::Var(v.into())
    }

    fn word1(v: i64) -> Term {
        Term::Word(Word::from_ints(&[v]))
    }

    #[test]
    fn classify_examples() {
        // atomic -> Delta0
        let atom = atom_e(var("x"), var("y"));
        assert_eq!(classify(&atom).unwrap(), Level::delta0());
        // countable-or of exists over quantifier-free -> Sigma_1
        let sigma1 = Formula::CountableOr {
            index: IndexSet::full_range(4),
            var: "i".into(),
            body: Box::new(Formula::Exists(
                vec!["y".into()],
                Box::new(Formula::And(vec![
                    Formula::Literal(Atomic::Eq(var("y"), var("i"))),
                    atom_e(var("x"), var("y")),
                ])),
            )),
        };
        assert_eq!(classify(&sigma1).unwrap(), Level::sigma(1));
        // countable-and of forall over Sigma_1 bodies -> Pi_2
        let pi2 = Formula::CountableAnd {
            index: IndexSet::full_range(2),
            var: "j".into(),
            body: Box::new(Formula::Forall(
                vec!["z".into()],
                Box::new(sigma1.clone()),
            )),
        };
        assert_eq!(classify(&pi2).unwrap(), Level::pi(2));
        // closure: disjunction of same-level Sigma formulas keeps the level
        let disj = Formula::Or(vec![sigma1.clone(), sigma1.clone()]);
        assert_eq!(classify(&disj).unwrap(), Level::sigma(1));
        // transfinite constructs are rejected
        assert!(matches!(
            classify(&Formula::Transfinite("limit".into())),
            Err(ClassifyError::TransfiniteNotSupported(_))
        ));
    }

    #[test]
    fn eval_finite_on_triangle() {
        let s = triangle();
        let asg = Assignment::new();
        // exists y E(0, y): true
        let f = Formula::Exists(vec!["y".into()], Box::new(atom_e(word1(0), var("y"))));
        assert!(eval_finite(&s, &f, &asg).unwrap());
        // forall y E(0, y): false (no self-loop)
        let g = Formula::Forall(vec!["y".into()], Box::new(atom_e(word1(0), var("y"))));
        assert!(!eval_finite(&s, &g, &asg).unwrap());
        // exists y forall z (not E(y,z) or z = z): vacuous implication, true
        let h = Formula::Exists(
            vec!["y".into()],
            Box::new(Formula::Forall(
                vec!["z".into()],
                Box::new(Formula::Or(vec![
                    Formula::Literal(Atomic::Not(Box::new(Atomic::Rel(
                        "E".into(),
                        vec![var("y"), var("z")],
                    )))),
                    Formula::Literal(Atomic::Eq(var("z"), var("z"))),
                ])),
            )),
        );
        assert!(eval_finite(&s, &h, &asg).unwrap());
    }

    #[test]
    fn negation_duality_on_finite_structures() {
        let s = triangle();
        let asg = Assignment::new();
        let formulas = vec![
            Formula::Exists(vec!["y".into()], Box::new(atom_e(word1(0), var("y")))),
            Formula::Forall(vec!["y".into()], Box::new(atom_e(word1(0), var("y")))),
            Formula::And(vec![
                atom_e(word1(0), word1(1)),
                Formula::Literal(Atomic::Not(Box::new(Atomic::Rel(
                    "E".into(),
                    vec![word1(0), word1(0)],
                )))),
            ]),
        ];
        for f in formulas {
            let lhs = eval_finite(&s, &negate(&f), &asg).unwrap();
            let rhs = !eval_finite(&s, &f, &asg).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn budgeted_on_order_structure() {
        let pairs: std::collections::BTreeSet<(u64, u64)> =
            [(0, 1), (1, 2), (0, 2)].into_iter().collect();
        let (_, s) = crate::structures::order::build_order_structure(&pairs, 1000).unwrap();
        let witnesses = WordListEnumerator(vec![
            Word::from_ints(&[0]),
            Word::from_ints(&[1]),
            Word::from_ints(&[2]),
        ]);
        // Sigma_1: exists y (x < y) at x = 0: witness found
        let f = Formula::Exists(
            vec!["y".into()],
            Box::new(Formula::Literal(Atomic::Rel(
                "<".into(),
                vec![var("x"), var("y")],
            ))),
        );
        let mut asg = Assignment::new();
        asg.insert("x".into(), Word::from_ints(&[0]));
        assert_eq!(
            eval_budgeted(&s, &f, &asg, &witnesses, 100_000).unwrap(),
            Truth::True
        );
        // at x = 2 there is no witness; Sigma_1 cannot refute
        asg.insert("x".into(), Word::from_ints(&[2]));
        assert_eq!(
            eval_budgeted(&s, &f, &asg, &witnesses, 1000).unwrap(),
            Truth::Unknown
        );
        // Pi_1: forall y not (y < 0): true by exhaustion over the finite list
        let g = Formula::Forall(
            vec!["y".into()],
            Box::new(Formula::Literal(Atomic::Not(Box::new(Atomic::Rel(
                "<".into(),
                vec![var("y"), word1(0)],
            ))))),
        );
        let asg = Assignment::new();
        assert_eq!(
            eval_budgeted(&s, &g, &asg, &witnesses, 100_000).unwrap(),
            Truth::True
        );
        // over the infinite rational grid the universal stays unknown
        let grid = RationalGridEnumerator { dim: 1 };
        assert_eq!(
            eval_budgeted(&s, &g, &asg, &grid, 200).unwrap(),
            Truth::Unknown
        );
        // a refutable universal: forall y not (y < 2)
        let h = Formula::Forall(
            vec!["y".into()],
            Box::new(Formula::Literal(Atomic::Not(Box::new(Atomic::Rel(
                "<".into(),
                vec![var("y"), word1(2)],
            ))))),
        );
        assert_eq!(
            eval_budgeted(&s, &h, &asg, &witnesses, 100_000).unwrap(),
            Truth::False
        );
    }

    #[test]
    fn budget_monotonicity() {
        let s = triangle();
        let witnesses = WordListEnumerator(vec![
            Word::from_ints(&[0]),
            Word::from_ints(&[1]),
            Word::from_ints(&[2]),
        ]);
        let f = Formula::Exists(vec!["y".into()], Box::new(atom_e(word1(0), var("y"))));
        let asg = Assignment::new();
        let mut first_true: Option<u64> = None;
        for budget in [1u64, 2, 8, 64, 512, 4096] {
            let t = eval_budgeted(&s, &f, &asg, &witnesses, budget).unwrap();
            if t == Truth::True && first_true.is_none() {
                first_true = Some(budget);
            }
            if let Some(b) = first_true {
                if budget >= b {
                    assert_eq!(t, Truth::True, "true at {b} flipped at {budget}");
                }
            }
        }
        assert!(first_true.is_some());
    }

    #[test]
    fn level_too_high_is_rejected() {
        let s = triangle();
        let pi2 = Formula::CountableAnd {
            index: IndexSet::full_range(2),
            var: "j".into(),
            body: Box::new(Formula::Forall(
                vec!["z".into()],
                Box::new(Formula::Exists(
                    vec!["y".into()],
                    Box::new(atom_e(var("y"), var("z"))),
                )),
            )),
        };
        let witnesses = WordListEnumerator(vec![Word::from_ints(&[0])]);
        assert!(matches!(
            eval_budgeted(&s, &pi2, &Assignment::new(), &witnesses, 100),
            Err(BudgetedError::LevelTooHigh(_))
        ));
    }

    #[test]
    fn budgeted_matches_finite_on_sigma1_family() {
        let s = triangle();
        let witnesses = WordListEnumerator(s.explicit_universe.clone().unwrap());
        let asg = Assignment::new();
        // small generated family: disjunctions of exists-atoms
        let mut family = Vec::new();
        for a in 0..3i64 {
            for b in 0..3i64 {
                family.push(Formula::Exists(
                    vec!["y".into()],
                    Box::new(Formula::And(vec![
                        atom_e(word1(a), var("y")),
                        atom_e(var("y"), word1(b)),
                    ])),
                ));
                family.push(Formula::Or(vec![
                    atom_e(word1(a), word1(b)),
                    Formula::Exists(vec!["y".into()], Box::new(atom_e(word1(a), var("y")))),
                ]));
            }
        }
        for f in &family {
            let brute = eval_finite(&s, f, &asg).unwrap();
            let budgeted = eval_budgeted(&s, f, &asg, &witnesses, 10_000).unwrap();
            assert_eq!(
                budgeted == Truth::True,
                brute,
                "sigma-1 agreement failed on {f:?}"
            );
        }
    }
}
