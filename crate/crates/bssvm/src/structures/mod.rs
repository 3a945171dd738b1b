//! Computable structures: a signature plus decider machines for relations,
//! functions, and constants. The atomic diagram is answered by running the
//! machines; relations may be decided either by a single total machine that
//! outputs 1/0 or by a pair of halting semi-deciders.

pub mod cycles;
pub mod order;
pub mod vecspace;

use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use crate::machine::{run, Machine, Oracle, RunOutcome, Word};
use crate::scalar::{parse_literal, Scalar};

/// Relation/function/constant names with arities (arity counts argument
/// words, i.e. universe elements).
#[derive(Clone, Debug, Default, serde::Serialize, serde::Deserialize)]
pub struct Signature {
    pub relations: BTreeMap<String, usize>,
    pub functions: BTreeMap<String, usize>,
    pub constants: Vec<String>,
}

impl Signature {
    pub fn check_names_unique(&self) -> Result<(), StructureError> {
        let mut seen = std::collections::BTreeSet::new();
        for name in self
            .relations
            .keys()
            .chain(self.functions.keys())
            .chain(self.constants.iter())
        {
            if !seen.insert(name.clone()) {
                return Err(StructureError::SignatureMismatch(format!(
                    "name `{name}` is used for more than one symbol"
                )));
            }
        }
        Ok(())
    }
}

/// How a relation is decided by machines.
#[derive(Clone, Debug)]
pub enum RelationDecider {
    /// One machine that always halts with output [1] or [0].
    Total(Machine),
    /// Two halting semi-deciders: `pos` halts exactly on related tuples,
    /// `neg` exactly on unrelated ones; together they decide the relation.
    HaltingPair { pos: Machine, neg: Machine },
}

/// A structure whose atomic diagram is computed by machines.
#[derive(Clone)]
pub struct RStructure {
    pub sig: Signature,
    /// Semi-decider for the universe: halts exactly on members.
    pub universe: Machine,
    /// Explicitly listed universe for finite structures (enables brute-force
    /// formula evaluation).
    pub explicit_universe: Option<Vec<Word>>,
    pub relations: BTreeMap<String, RelationDecider>,
    pub functions: BTreeMap<String, Machine>,
    pub constants: BTreeMap<String, Word>,
    pub oracle: Option<Arc<dyn Oracle>>,
    /// Step budget used by `atomic_truth` callers that do not pick their own.
    pub default_budget: u64,
}

impl std::fmt::Debug for RStructure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RStructure")
            .field("sig", &self.sig)
            .field("relations", &self.relations.keys().collect::<Vec<_>>())
            .field("functions", &self.functions.keys().collect::<Vec<_>>())
            .field("constants", &self.constants.keys().collect::<Vec<_>>())
            .finish()
    }
}

#[derive(Debug, Error)]
pub enum StructureError {
    #[error("not a strict total order: {0}")]
    NotAStrictOrder(String),
    #[error("target basis is linearly dependent")]
    DependentBasis,
    #[error("signature mismatch: {0}")]
    SignatureMismatch(String),
    #[error("bad basis shape: {0}")]
    BasisShape(String),
    #[error("internal machine construction failed: {0}")]
    MachineBuild(String),
}

/// Three-valued answer of a budgeted query.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Truth {
    True,
    False,
    Unknown,
}

impl Truth {
    pub fn not(self) -> Truth {
        match self {
            Truth::True => Truth::False,
            Truth::False => Truth::True,
            Truth::Unknown => Truth::Unknown,
        }
    }
}

/// Terms of atomic sentences: explicit words, named constants, applications
/// of the structure's function symbols, and (inside formulas) variables that
/// must be substituted away before the sentence can be decided.
#[derive(Clone, Debug)]
pub enum Term {
    Word(Word),
    Const(String),
    Apply(String, Vec<Term>),
    Var(String),
}

/// Atomic and negated-atomic sentences.
#[derive(Clone, Debug)]
pub enum Atomic {
    Rel(String, Vec<Term>),
    Eq(Term, Term),
    Not(Box<Atomic>),
}

fn concat_words(words: &[Word]) -> Word {
    let entries: Vec<Scalar> = words
        .iter()
        .flat_map(|w| w.entries().iter().cloned())
        .collect();
    Word::new(entries).expect("argument words share the structure backend")
}

impl RStructure {
    /// Evaluate a term to a word; None when a function machine ran out of
    /// budget or got stuck.
    pub fn eval_term(&self, t: &Term, budget: u64) -> Result<Option<Word>, StructureError> {
        match t {
            Term::Word(w) => Ok(Some(w.clone())),
            Term::Var(v) => Err(StructureError::SignatureMismatch(format!(
                "unbound variable `{v}` in an atomic sentence"
            ))),
            Term::Const(name) => self
                .constants
                .get(name)
                .cloned()
                .map(Some)
                .ok_or_else(|| {
                    StructureError::SignatureMismatch(format!("unknown constant `{name}`"))
                }),
            Term::Apply(f, args) => {
                let machine = self.functions.get(f).ok_or_else(|| {
                    StructureError::SignatureMismatch(format!("unknown function `{f}`"))
                })?;
                let declared = self.sig.functions.get(f).copied().unwrap_or(args.len());
                if declared != args.len() {
                    return Err(StructureError::SignatureMismatch(format!(
                        "function `{f}` has arity {declared}, got {} arguments",
                        args.len()
                    )));
                }
                let mut arg_words = Vec::with_capacity(args.len());
                for a in args {
                    match self.eval_term(a, budget)? {
                        Some(w) => arg_words.push(w),
                        None => return Ok(None),
                    }
                }
                let input = concat_words(&arg_words);
                let out = run(machine, input, budget, self.oracle.as_deref())
                    .map_err(|e| StructureError::MachineBuild(e.to_string()))?;
                match out {
                    RunOutcome::Halted { output, .. } => Ok(Some(output)),
                    _ => Ok(None),
                }
            }
        }
    }

    /// Run a relation decider on argument words.
    fn decide_relation(
        &self,
        name: &str,
        args: &[Word],
        budget: u64,
    ) -> Result<Truth, StructureError> {
        let decider = self.relations.get(name).ok_or_else(|| {
            StructureError::SignatureMismatch(format!("unknown relation `{name}`"))
        })?;
        let declared = self.sig.relations.get(name).copied().unwrap_or(args.len());
        if declared != args.len() {
            return Err(StructureError::SignatureMismatch(format!(
                "relation `{name}` has arity {declared}, got {} arguments",
                args.len()
            )));
        }
        let input = concat_words(args);
        match decider {
            RelationDecider::Total(m) => {
                let out = run(m, input, budget, self.oracle.as_deref())
                    .map_err(|e| StructureError::MachineBuild(e.to_string()))?;
                match out {
                    RunOutcome::Halted { output, .. } => {
                        if output.len() == 1 {
                            if let Some(b) = output.entries()[0].as_integer() {
                                if b == 1.into() {
                                    return Ok(Truth::True);
                                }
                                if b == 0.into() {
                                    return Ok(Truth::False);
                                }
                            }
                        }
                        Ok(Truth::Unknown)
                    }
                    _ => Ok(Truth::Unknown),
                }
            }
            RelationDecider::HaltingPair { pos, neg } => {
                let p = run(pos, input.clone(), budget, self.oracle.as_deref())
                    .map_err(|e| StructureError::MachineBuild(e.to_string()))?;
                if p.is_halted() {
                    return Ok(Truth::True);
                }
                let n = run(neg, input, budget, self.oracle.as_deref())
                    .map_err(|e| StructureError::MachineBuild(e.to_string()))?;
                if n.is_halted() {
                    return Ok(Truth::False);
                }
                Ok(Truth::Unknown)
            }
        }
    }
}

/// Truth of an atomic (or negated-atomic) sentence by running the relevant
/// machines; Unknown only when a machine exhausted the budget or got stuck.
pub fn atomic_truth(s: &RStructure, sentence: &Atomic, budget: u64) -> Result<Truth, StructureError> {
    match sentence {
        Atomic::Not(inner) => Ok(atomic_truth(s, inner, budget)?.not()),
        Atomic::Eq(a, b) => {
            let (wa, wb) = match (s.eval_term(a, budget)?, s.eval_term(b, budget)?) {
                (Some(wa), Some(wb)) => (wa, wb),
                _ => return Ok(Truth::Unknown),
            };
            match wa.eq_exact(&wb) {
                Ok(true) => Ok(Truth::True),
                Ok(false) => Ok(Truth::False),
                Err(_) => Ok(Truth::Unknown),
            }
        }
        Atomic::Rel(name, terms) => {
            let mut args = Vec::with_capacity(terms.len());
            for t in terms {
                match s.eval_term(t, budget)? {
                    Some(w) => args.push(w),
                    None => return Ok(Truth::Unknown),
                }
            }
            s.decide_relation(name, &args, budget)
        }
    }
}

/// Parse an atomic sentence like `0 < 2`, `E((2,0),(2,1))`,
/// `add((1,0),(0,1)) = (1,1)`, or a negation `!E((2,0),(2,2))`.
pub fn parse_atomic(src: &str, sig: &Signature) -> Result<Atomic, StructureError> {
    let s = src.trim();
    if let Some(rest) = s.strip_prefix('!') {
        return Ok(Atomic::Not(Box::new(parse_atomic(rest, sig)?)));
    }
    // top-level infix `=` means equality of terms
    if let Some((l, r)) = split_top_level_once(s, "=") {
        return Ok(Atomic::Eq(parse_term(l.trim(), sig)?, parse_term(r.trim(), sig)?));
    }
    // prefix relation R(t1, ..., tk)
    if let Some((head, inner)) = split_call(s) {
        if sig.relations.contains_key(head) {
            let args = split_args(inner)
                .into_iter()
                .map(|a| parse_term(a.trim(), sig))
                .collect::<Result<Vec<_>, _>>()?;
            return Ok(Atomic::Rel(head.to_string(), args));
        }
    }
    // infix binary relation, longest name first
    let mut names: Vec<&String> = sig.relations.keys().collect();
    names.sort_by_key(|n| std::cmp::Reverse(n.len()));
    for name in names {
        if let Some((l, r)) = split_top_level_once(s, name) {
            return Ok(Atomic::Rel(
                name.clone(),
                vec![parse_term(l.trim(), sig)?, parse_term(r.trim(), sig)?],
            ));
        }
    }
    Err(StructureError::SignatureMismatch(format!(
        "cannot parse atomic sentence `{src}`"
    )))
}

fn split_top_level_once<'a>(s: &'a str, sep: &str) -> Option<(&'a str, &'a str)> {
    let mut depth = 0usize;
    let chars: Vec<char> = s.chars().collect();
    let sep_chars: Vec<char> = sep.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        match chars[i] {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            _ => {}
        }
        if depth == 0 && chars[i..].starts_with(&sep_chars[..]) && !(i == 0) {
            let byte_i: usize = chars[..i].iter().map(|c| c.len_utf8()).sum();
            let byte_sep: usize = sep_chars.iter().map(|c| c.len_utf8()).sum();
            return Some((&s[..byte_i], &s[byte_i + byte_sep..]));
        }
        i += 1;
    }
    None
}

fn split_call(s: &str) -> Option<(&str, &str)> {
    let open = s.find('(')?;
    let head = s[..open].trim();
    if head.is_empty() || !s.ends_with(')') {
        return None;
    }
    if !head.chars().all(|c| c.is_alphanumeric() || c == '_') {
        return None;
    }
    Some((head, &s[open + 1..s.len() - 1]))
}

fn split_args(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut start = 0usize;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            ',' if depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    if !s[start..].trim().is_empty() || !out.is_empty() {
        out.push(&s[start..]);
    }
    out
}

fn parse_term(s: &str, sig: &Signature) -> Result<Term, StructureError> {
    let s = s.trim();
    if let Some((head, inner)) = split_call(s) {
        if sig.functions.contains_key(head) {
            let args = split_args(inner)
                .into_iter()
                .map(|a| parse_term(a.trim(), sig))
                .collect::<Result<Vec<_>, _>>()?;
            return Ok(Term::Apply(head.to_string(), args));
        }
    }
    if s.starts_with('(') && s.ends_with(')') {
        let inner = &s[1..s.len() - 1];
        let entries = split_args(inner)
            .into_iter()
            .map(|lit| {
                parse_literal(lit.trim())
                    .map_err(|e| StructureError::SignatureMismatch(e.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let w = Word::new(entries)
            .map_err(|e| StructureError::SignatureMismatch(e.to_string()))?;
        return Ok(Term::Word(w));
    }
    if sig.constants.iter().any(|c| c == s) {
        return Ok(Term::Const(s.to_string()));
    }
    // bare scalar literal = word of length 1
    let v = parse_literal(s).map_err(|e| StructureError::SignatureMismatch(e.to_string()))?;
    Ok(Term::Word(
        Word::new(vec![v]).map_err(|e| StructureError::SignatureMismatch(e.to_string()))?,
    ))
}

/// Semi-decide universe membership by running the universe machine.
pub fn universe_contains(s: &RStructure, w: &Word, budget: u64) -> Truth {
    match run(&s.universe, w.clone(), budget, s.oracle.as_deref()) {
        Ok(RunOutcome::Halted { .. }) => Truth::True,
        Ok(_) => Truth::Unknown,
        Err(_) => Truth::Unknown,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sentence_parsing() {
        let mut sig = Signature::default();
        sig.relations.insert("<".into(), 2);
        sig.relations.insert("E".into(), 2);
        sig.functions.insert("add".into(), 2);
        let a = parse_atomic("0 < 2", &sig).unwrap();
        match a {
            Atomic::Rel(name, args) => {
                assert_eq!(name, "<");
                assert_eq!(args.len(), 2);
            }
            other => panic!("expected relation, got {other:?}"),
        }
        let b = parse_atomic("E((2,0),(2,1))", &sig).unwrap();
        assert!(matches!(b, Atomic::Rel(ref n, ref a) if n == "E" && a.len() == 2));
        let c = parse_atomic("add((1,0),(0,1)) = (1,1)", &sig).unwrap();
        assert!(matches!(c, Atomic::Eq(_, _)));
        let d = parse_atomic("!E((2,0),(2,2))", &sig).unwrap();
        assert!(matches!(d, Atomic::Not(_)));
    }
}
