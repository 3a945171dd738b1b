//! S-expression formula files.
//!
//! ```text
//! f    ::= (atom REL t ...) | (eq t t) | (not f)
//!        | (and f ...) | (or f ...)
//!        | (exists (v ...) f) | (forall (v ...) f)
//!        | (or-enum enum IVAR f) | (and-enum enum IVAR f)
//!        | (sigma-lim ...)                ; parses, never classifies
//! enum ::= (machine "file.bss" [BOUND]) | (range BOUND)
//! t    ::= VAR | NUMBER | RATIONAL | "literal" | (w lit ...)
//!        | (const NAME) | (app FUNC t ...)
//! ```
//!
//! The index variable of `or-enum`/`and-enum` may be written bare or as a
//! one-element list `(i)`. `(range B)` is the index set {0, ..., B-1}
//! realized by an always-halting machine; `(machine "file")` loads a
//! machine whose halting set on inputs [i] is the index set.

use std::sync::Arc;

use thiserror::Error;

use super::{Formula, IndexSet};
use crate::machine::Machine;
use crate::scalar::parse_literal;
use crate::structures::{Atomic, Term};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("formula parse error at byte {offset}: {message}")]
pub struct SexprError {
    pub offset: usize,
    pub message: String,
}

#[derive(Clone, Debug)]
enum Sx {
    Atom(String, usize),
    Str(String, usize),
    List(Vec<Sx>, usize),
}

impl Sx {
    fn offset(&self) -> usize {
        match self {
            Sx::Atom(_, o) | Sx::Str(_, o) | Sx::List(_, o) => *o,
        }
    }
}

const MAX_SEXPR_DEPTH: usize = 256;

fn tokenize(src: &str) -> Result<Sx, SexprError> {
    let bytes: Vec<char> = src.chars().collect();
    let mut i = 0usize;
    let expr = parse_sx(&bytes, &mut i, 0)?;
    // allow trailing whitespace/comments
    while i < bytes.len() {
        if bytes[i].is_whitespace() {
            i += 1;
        } else if bytes[i] == ';' {
            while i < bytes.len() && bytes[i] != '\n' {
                i += 1;
            }
        } else {
            return Err(SexprError {
                offset: i,
                message: "trailing content after formula".into(),
            });
        }
    }
    Ok(expr)
}

fn skip_ws(bytes: &[char], i: &mut usize) {
    loop {
        while *i < bytes.len() && bytes[*i].is_whitespace() {
            *i += 1;
        }
        if *i < bytes.len() && bytes[*i] == ';' {
            while *i < bytes.len() && bytes[*i] != '\n' {
                *i += 1;
            }
        } else {
            return;
        }
    }
}

fn parse_sx(bytes: &[char], i: &mut usize, depth: usize) -> Result<Sx, SexprError> {
    skip_ws(bytes, i);
    let start = *i;
    if depth > MAX_SEXPR_DEPTH {
        return Err(SexprError {
            offset: start,
            message: "expression nesting too deep".into(),
        });
    }
    match bytes.get(*i) {
        None => Err(SexprError {
            offset: start,
            message: "unexpected end of input".into(),
        }),
        Some('(') => {
            *i += 1;
            let mut items = Vec::new();
            loop {
                skip_ws(bytes, i);
                match bytes.get(*i) {
                    Some(')') => {
                        *i += 1;
                        return Ok(Sx::List(items, start));
                    }
                    None => {
                        return Err(SexprError {
                            offset: start,
                            message: "unclosed parenthesis".into(),
                        })
                    }
                    _ => items.push(parse_sx(bytes, i, depth + 1)?),
                }
            }
        }
        Some(')') => Err(SexprError {
            offset: start,
            message: "unexpected `)`".into(),
        }),
        Some('"') => {
            *i += 1;
            let mut s = String::new();
            while let Some(&c) = bytes.get(*i) {
                *i += 1;
                if c == '"' {
                    return Ok(Sx::Str(s, start));
                }
                s.push(c);
            }
            Err(SexprError {
                offset: start,
                message: "unterminated string".into(),
            })
        }
        Some(_) => {
            let mut s = String::new();
            while let Some(&c) = bytes.get(*i) {
                if c.is_whitespace() || c == '(' || c == ')' || c == ';' {
                    break;
                }
                s.push(c);
                *i += 1;
            }
            Ok(Sx::Atom(s, start))
        }
    }
}

/// Loader callback resolving `(machine "file")` references.
pub type MachineLoader<'a> = dyn FnMut(&str) -> Result<Machine, String> + 'a;

/// Parse a formula file.
pub fn parse_formula(src: &str, loader: &mut MachineLoader) -> Result<Formula, SexprError> {
    let sx = tokenize(src)?;
    formula_of(&sx, loader)
}

fn err<T>(offset: usize, message: impl Into<String>) -> Result<T, SexprError> {
    Err(SexprError {
        offset,
        message: message.into(),
    })
}

fn formula_of(sx: &Sx, loader: &mut MachineLoader) -> Result<Formula, SexprError> {
    let Sx::List(items, off) = sx else {
        return err(sx.offset(), "expected a parenthesized formula");
    };
    let Some(Sx::Atom(head, _)) = items.first() else {
        return err(*off, "expected a formula head symbol");
    };
    match head.as_str() {
        "atom" => {
            if items.len() < 2 {
                return err(*off, "(atom REL t ...) needs a relation name");
            }
            let Sx::Atom(rel, _) = &items[1] else {
                return err(items[1].offset(), "expected a relation name");
            };
            let args = items[2..]
                .iter()
                .map(term_of)
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Formula::Literal(Atomic::Rel(rel.clone(), args)))
        }
        "eq" => {
            if items.len() != 3 {
                return err(*off, "(eq t t) needs exactly two terms");
            }
            Ok(Formula::Literal(Atomic::Eq(
                term_of(&items[1])?,
                term_of(&items[2])?,
            )))
        }
        "not" => {
            if items.len() != 2 {
                return err(*off, "(not f) needs exactly one formula");
            }
            match formula_of(&items[1], loader)? {
                Formula::Literal(a) => Ok(Formula::Literal(Atomic::Not(Box::new(a)))),
                _ => err(
                    items[1].offset(),
                    "negation applies to atomic formulas only (push it to the leaves)",
                ),
            }
        }
        "and" | "or" => {
            let children = items[1..]
                .iter()
                .map(|c| formula_of(c, loader))
                .collect::<Result<Vec<_>, _>>()?;
            if children.is_empty() {
                return err(*off, "empty connective");
            }
            Ok(if head == "and" {
                Formula::And(children)
            } else {
                Formula::Or(children)
            })
        }
        "exists" | "forall" => {
            if items.len() != 3 {
                return err(*off, "quantifier needs a variable list and a body");
            }
            let vars = var_list(&items[1])?;
            let body = Box::new(formula_of(&items[2], loader)?);
            Ok(if head == "exists" {
                Formula::Exists(vars, body)
            } else {
                Formula::Forall(vars, body)
            })
        }
        "or-enum" | "and-enum" => {
            if items.len() != 4 {
                return err(*off, "(or-enum ENUM IVAR f) needs three arguments");
            }
            let index = enum_of(&items[1], loader)?;
            let var = single_var(&items[2])?;
            let body = Box::new(formula_of(&items[3], loader)?);
            Ok(if head == "or-enum" {
                Formula::CountableOr { index, var, body }
            } else {
                Formula::CountableAnd { index, var, body }
            })
        }
        "sigma-lim" | "pi-lim" => Ok(Formula::Transfinite(format!(
            "{head} construct at byte {off}"
        ))),
        other => err(*off, format!("unknown formula head `{other}`")),
    }
}

fn var_list(sx: &Sx) -> Result<Vec<String>, SexprError> {
    match sx {
        Sx::List(items, _) => items
            .iter()
            .map(|v| match v {
                Sx::Atom(name, _) => Ok(name.clone()),
                _ => err(v.offset(), "expected a variable name"),
            })
            .collect(),
        Sx::Atom(name, _) => Ok(vec![name.clone()]),
        _ => err(sx.offset(), "expected a variable list"),
    }
}

fn single_var(sx: &Sx) -> Result<String, SexprError> {
    let vars = var_list(sx)?;
    if vars.len() != 1 {
        return err(sx.offset(), "expected exactly one index variable");
    }
    Ok(vars.into_iter().next().unwrap())
}

fn enum_of(sx: &Sx, loader: &mut MachineLoader) -> Result<IndexSet, SexprError> {
    let Sx::List(items, off) = sx else {
        return err(sx.offset(), "expected (machine ...) or (range ...)");
    };
    let Some(Sx::Atom(head, _)) = items.first() else {
        return err(*off, "expected an enumerator head");
    };
    match head.as_str() {
        "range" => {
            if items.len() != 2 {
                return err(*off, "(range BOUND) needs one bound");
            }
            let bound = atom_u64(&items[1])?;
            Ok(IndexSet::full_range(bound))
        }
        "machine" => {
            if items.len() < 2 || items.len() > 3 {
                return err(*off, "(machine \"file\" [BOUND]) expected");
            }
            let Sx::Str(path, poff) = &items[1] else {
                return err(items[1].offset(), "expected a quoted machine path");
            };
            let machine = loader(path).map_err(|m| SexprError {
                offset: *poff,
                message: m,
            })?;
            let bound = if items.len() == 3 {
                Some(atom_u64(&items[2])?)
            } else {
                None
            };
            Ok(IndexSet {
                machine: Arc::new(machine),
                bound,
                param_field: None,
            })
        }
        other => err(*off, format!("unknown enumerator `{other}`")),
    }
}

fn atom_u64(sx: &Sx) -> Result<u64, SexprError> {
    match sx {
        Sx::Atom(s, off) => s
            .parse::<u64>()
            .map_err(|_| SexprError {
                offset: *off,
                message: format!("expected a natural number, got `{s}`"),
            }),
        _ => err(sx.offset(), "expected a natural number"),
    }
}

fn term_of(sx: &Sx) -> Result<Term, SexprError> {
    match sx {
        Sx::Atom(s, off) => {
            // numbers and rationals are one-entry word literals; anything
            // else is a variable reference
            if s.chars().next().map_or(false, |c| {
                c.is_ascii_digit() || c == '-'
            }) {
                let v = parse_literal(s).map_err(|e| SexprError {
                    offset: *off,
                    message: e.to_string(),
                })?;
                let w = crate::machine::Word::new(vec![v]).map_err(|e| SexprError {
                    offset: *off,
                    message: e.to_string(),
                })?;
                Ok(Term::Word(w))
            } else {
                Ok(Term::Var(s.clone()))
            }
        }
        Sx::Str(s, off) => {
            let v = parse_literal(s).map_err(|e| SexprError {
                offset: *off,
                message: e.to_string(),
            })?;
            let w = crate::machine::Word::new(vec![v]).map_err(|e| SexprError {
                offset: *off,
                message: e.to_string(),
            })?;
            Ok(Term::Word(w))
        }
        Sx::List(items, off) => {
            let Some(Sx::Atom(head, _)) = items.first() else {
                return err(*off, "expected a term head");
            };
            match head.as_str() {
                "w" => {
                    let entries = items[1..]
                        .iter()
                        .map(|l| match l {
                            Sx::Atom(s, o) | Sx::Str(s, o) => {
                                parse_literal(s).map_err(|e| SexprError {
                                    offset: *o,
                                    message: e.to_string(),
                                })
                            }
                            _ => Err(SexprError {
                                offset: l.offset(),
                                message: "expected a scalar literal".into(),
                            }),
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                    let w = crate::machine::Word::new(entries).map_err(|e| SexprError {
                        offset: *off,
                        message: e.to_string(),
                    })?;
                    Ok(Term::Word(w))
                }
                "const" => {
                    if items.len() != 2 {
                        return err(*off, "(const NAME) needs one name");
                    }
                    match &items[1] {
                        Sx::Atom(name, _) => Ok(Term::Const(name.clone())),
                        _ => err(items[1].offset(), "expected a constant name"),
                    }
                }
                "app" => {
                    if items.len() < 2 {
                        return err(*off, "(app FUNC t ...) needs a function name");
                    }
                    let Sx::Atom(name, _) = &items[1] else {
                        return err(items[1].offset(), "expected a function name");
                    };
                    let args = items[2..]
                        .iter()
                        .map(term_of)
                        .collect::<Result<Vec<_>, _>>()?;
                    Ok(Term::Apply(name.clone(), args))
                }
                other => err(*off, format!("unknown term head `{other}`")),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formulas::{classify, ClassifyError, Level, LevelKind};

    fn no_loader(_: &str) -> Result<Machine, String> {
        Err("no machines available".into())
    }

    #[test]
    fn parses_enumerated_disjunction() {
        let src = r#"
            ; indices 0..3, one disjunct each
            (or-enum (range 4) (i)
              (exists (y) (and (eq y i) (atom E x y))))
        "#;
        let f = parse_formula(src, &mut no_loader).unwrap();
        assert_eq!(
            classify(&f).unwrap(),
            Level {
                n: 1,
                kind: LevelKind::Sigma
            }
        );
    }

    #[test]
    fn rejects_transfinite_constructs() {
        let src = "(sigma-lim (range 2) i (atom E x x))";
        let f = parse_formula(src, &mut no_loader).unwrap();
        assert!(matches!(
            classify(&f),
            Err(ClassifyError::TransfiniteNotSupported(_))
        ));
    }

    #[test]
    fn machine_loader_is_consulted() {
        let mut loader = |path: &str| {
            assert_eq!(path, "idx.bss");
            crate::dsl::parse_machine(
                "machine all over Z\nnode a: input -> b\nnode b: output [x1]\n",
            )
            .map_err(|e| e.to_string())
        };
        let src = r#"(or-enum (machine "idx.bss" 3) i (atom E i i))"#;
        let f = parse_formula(src, &mut loader).unwrap();
        match f {
            Formula::CountableOr { index, .. } => assert_eq!(index.bound, Some(3)),
            other => panic!("expected countable or, got {other:?}"),
        }
    }

    #[test]
    fn diagnostics_carry_offsets() {
        let e = parse_formula("(atom)", &mut no_loader).unwrap_err();
        assert!(e.message.contains("relation name"));
        let e = parse_formula("(unknown x)", &mut no_loader).unwrap_err();
        assert!(e.message.contains("unknown formula head"));
    }

    #[test]
    fn word_and_negation_terms() {
        let src = "(not (atom E (w 2 0) (w 2 2)))";
        let f = parse_formula(src, &mut no_loader).unwrap();
        assert!(matches!(
            f,
            Formula::Literal(crate::structures::Atomic::Not(_))
        ));
    }
}
