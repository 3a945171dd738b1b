//! Well-orderings as computable structures: a finite strict order D on the
//! naturals is packed into the real ell whose base-10 digit at index <a,b>
//! is the characteristic value of D, and the order relation is semi-decided
//! by a machine that extracts that digit and halts exactly when it is 1.

use std::collections::BTreeSet;

use num_bigint::BigInt;

use super::{RStructure, RelationDecider, Signature, StructureError};
use crate::dsl::parse_machine;
use crate::machine::{Machine, Word};
use crate::scalar::Scalar;

/// Cantor pairing <a,b> = (a+b)(a+b+1)/2 + b, a bijection omega^2 -> omega.
pub fn pair(a: u64, b: u64) -> u64 {
    let s = (a as u128) + (b as u128);
    let v = s * (s + 1) / 2 + (b as u128);
    u64::try_from(v).expect("pair index fits in u64")
}

/// Inverse of [`pair`].
pub fn unpair(n: u64) -> (u64, u64) {
    // largest s with s(s+1)/2 <= n
    let mut s = (((8.0 * n as f64 + 1.0).sqrt() - 1.0) / 2.0) as u64;
    while (s as u128 + 1) * (s as u128 + 2) / 2 <= n as u128 {
        s += 1;
    }
    while (s as u128) * (s as u128 + 1) / 2 > n as u128 {
        s -= 1;
    }
    let b = n - s * (s + 1) / 2;
    let a = s - b;
    (a, b)
}

/// A well-ordering presentation: the pair set D, the packed real, and the
/// digit budget used by comparisons.
#[derive(Clone)]
pub struct OrderPresentation {
    pub pairs: BTreeSet<(u64, u64)>,
    pub ell: Scalar,
    pub budget: u64,
}

/// Check that D is a strict total order on its field.
pub fn validate_strict_order(pairs: &BTreeSet<(u64, u64)>) -> Result<(), StructureError> {
    let mut field = BTreeSet::new();
    for &(a, b) in pairs {
        field.insert(a);
        field.insert(b);
        if a == b {
            return Err(StructureError::NotAStrictOrder(format!(
                "({a},{a}) violates irreflexivity"
            )));
        }
        if pairs.contains(&(b, a)) {
            return Err(StructureError::NotAStrictOrder(format!(
                "({a},{b}) and ({b},{a}) are both present"
            )));
        }
    }
    for &(a, b) in pairs {
        for &(c, d) in pairs {
            if b == c && !pairs.contains(&(a, d)) {
                return Err(StructureError::NotAStrictOrder(format!(
                    "missing ({a},{d}) for transitivity via {b}"
                )));
            }
        }
    }
    for &a in &field {
        for &b in &field {
            if a != b && !pairs.contains(&(a, b)) && !pairs.contains(&(b, a)) {
                return Err(StructureError::NotAStrictOrder(format!(
                    "{a} and {b} are incomparable"
                )));
            }
        }
    }
    Ok(())
}

/// The digit-stream real ell = sum over i of 10^-i * chi_D(unpair(i)).
/// The weight-1 digit (index 0) participates through the integer part's
/// position in the expansion; for strict orders chi_D(0,0) = 0.
pub fn order_stream(pairs: &BTreeSet<(u64, u64)>, budget: u64) -> Scalar {
    let pairs = pairs.clone();
    Scalar::make_stream(
        "ell",
        BigInt::from(0),
        move |i| u8::from(pairs.contains(&unpair(i))),
        budget,
    )
}

const EXTRACTOR_BODY: &str = "\
node init: compute x2 := ell, x3 := 1 -> ctr
node ctr: branch x1-1 >= 0 ? dig : fin
node dig: branch x2-x3 >= 0 ? strip : slide
node strip: compute x2 := x2-x3 -> slide
node slide: compute x3 := x3/10, x1 := x1-1 -> ctr
";

/// The digit extraction machine: on input (i) it halts with output 1 when
/// digit i of the stream parameter `ell` is 1 and diverges when it is 0.
/// It peels leading digits with threshold tests r >= 10^-j, which certify
/// one-sidedly because the tail of a 0/1-digit stream is strictly smaller
/// than the next threshold.
pub fn build_digit_extractor() -> Machine {
    let src = format!(
        "machine digit_extractor over Rstream\n\
         param ell = stream(ell)\n\
         node start: input -> init\n\
         {EXTRACTOR_BODY}\
         node fin: branch x2-x3 >= 0 ? one : spin\n\
         node one: compute x4 := 1 -> oneout\n\
         node oneout: output [x4]\n\
         node spin: shift left -> spin\n"
    );
    parse_machine(&src).expect("digit extractor source is well-formed")
}

fn build_lt_machine(complement: bool) -> Machine {
    let name = if complement { "order_ge" } else { "order_lt" };
    let (yes, no) = if complement {
        ("spin", "one")
    } else {
        ("one", "spin")
    };
    let src = format!(
        "machine {name} over Rstream\n\
         param ell = stream(ell)\n\
         node start: input -> pairidx\n\
         node pairidx: compute x1 := (x1+x2)*(x1+x2+1)/2+x2 -> init\n\
         {EXTRACTOR_BODY}\
         node fin: branch x2-x3 >= 0 ? {yes} : {no}\n\
         node one: compute x4 := 1 -> oneout\n\
         node oneout: output [x4]\n\
         node spin: shift left -> spin\n"
    );
    parse_machine(&src).expect("order machine source is well-formed")
}

/// Build the order presentation and the structure whose `<` relation is
/// semi-decided by digit extraction from ell, together with the complement
/// machine, so `<` is decidable in the halting-pair sense.
pub fn build_order_structure(
    pairs: &BTreeSet<(u64, u64)>,
    budget: u64,
) -> Result<(OrderPresentation, RStructure), StructureError> {
    validate_strict_order(pairs)?;
    let ell = order_stream(pairs, budget);
    let mut lt = build_lt_machine(false);
    lt.bind_stream("ell", ell.clone());
    let mut ge = build_lt_machine(true);
    ge.bind_stream("ell", ell.clone());

    // halts exactly on the naturals: repeated decrement reaches zero only
    // from a nonnegative integer
    let universe_src = "\
machine naturals over Rstream
node start: input -> ck
node ck: branch x0-1 >= 0 ? ck2 : spin
node ck2: branch 1-x0 >= 0 ? z1 : spin
node z1: branch x1 >= 0 ? z2 : spin
node z2: branch 0-x1 >= 0 ? ok : step
node step: compute x1 := x1-1 -> z1
node ok: output []
node spin: shift left -> spin
";
    let universe = parse_machine(universe_src).expect("universe source is well-formed");

    let mut sig = Signature::default();
    sig.relations.insert("<".into(), 2);

    let field_max = pairs
        .iter()
        .map(|&(a, b)| a.max(b))
        .max()
        .unwrap_or(0);
    let explicit = (0..=field_max)
        .map(|n| Word::new(vec![Scalar::int(n as i64)]).unwrap())
        .collect();

    let mut relations = std::collections::BTreeMap::new();
    relations.insert(
        "<".to_string(),
        RelationDecider::HaltingPair { pos: lt, neg: ge },
    );

    let presentation = OrderPresentation {
        pairs: pairs.clone(),
        ell,
        budget,
    };
    let structure = RStructure {
        sig,
        universe,
        explicit_universe: Some(explicit),
        relations,
        functions: std::collections::BTreeMap::new(),
        constants: std::collections::BTreeMap::new(),
        oracle: None,
        default_budget: 100_000,
    };
    Ok((presentation, structure))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::{run, RunOutcome};
    use crate::structures::{atomic_truth, parse_atomic, Truth};

    #[test]
    fn pairing_examples() {
        assert_eq!(pair(0, 0), 0);
        assert_eq!(pair(1, 2), 8);
        // the spec table: <0,2> = (2)(3)/2 + 2 = 5
        assert_eq!(pair(0, 2), 5);
    }

    #[test]
    fn pairing_is_injective_up_to_50() {
        let mut seen = std::collections::BTreeSet::new();
        for a in 0..=50u64 {
            for b in 0..=50u64 {
                assert!(seen.insert(pair(a, b)), "collision at ({a},{b})");
            }
        }
    }

    #[test]
    fn unpair_inverts_pair() {
        for n in 0..500u64 {
            let (a, b) = unpair(n);
            assert_eq!(pair(a, b), n);
        }
    }

    #[test]
    fn digit_extractor_on_alternating_digits() {
        // digits 1,0,1,0,...
        let mut m = build_digit_extractor();
        let ell = Scalar::make_stream("ell", BigInt::from(0), |i| u8::from(i % 2 == 0), 1000);
        m.bind_stream("ell", ell);
        // digit 0 is 1: halts with [1]
        let out = run(&m, Word::from_ints(&[0]), 10_000, None).unwrap();
        match out {
            RunOutcome::Halted { output, .. } => {
                assert!(output.eq_exact(&Word::from_ints(&[1])).unwrap())
            }
            other => panic!("expected halt, got {other:?}"),
        }
        // digit 1 is 0: diverges
        let out = run(&m, Word::from_ints(&[1]), 10_000, None).unwrap();
        assert!(matches!(out, RunOutcome::OutOfBudget { .. }));
    }

    #[test]
    fn digit_extractor_on_all_ones() {
        let mut m = build_digit_extractor();
        let ell = Scalar::make_stream("ell", BigInt::from(0), |_| 1, 1000);
        m.bind_stream("ell", ell);
        let out = run(&m, Word::from_ints(&[5]), 10_000, None).unwrap();
        match out {
            RunOutcome::Halted { output, .. } => {
                assert!(output.eq_exact(&Word::from_ints(&[1])).unwrap())
            }
            other => panic!("expected halt, got {other:?}"),
        }
    }

    #[test]
    fn single_pair_order() {
        let pairs: BTreeSet<(u64, u64)> = [(0, 1)].into_iter().collect();
        let (pres, s) = build_order_structure(&pairs, 1000).unwrap();
        assert_eq!(pres.pairs.len(), 1);
        let lt = match s.relations.get("<").unwrap() {
            RelationDecider::HaltingPair { pos, .. } => pos,
            other => panic!("expected halting pair, got {other:?}"),
        };
        // (0,1): digit at pair(0,1) = 2 is 1, so the machine halts
        let out = run(lt, Word::from_ints(&[0, 1]), 100_000, None).unwrap();
        assert!(out.is_halted());
        // (1,0): digit at pair(1,0) = 1 is 0, so it diverges and the
        // complement machine halts
        let out = run(lt, Word::from_ints(&[1, 0]), 100_000, None).unwrap();
        assert!(matches!(out, RunOutcome::OutOfBudget { .. }));
        let ge = match s.relations.get("<").unwrap() {
            RelationDecider::HaltingPair { neg, .. } => neg,
            other => panic!("expected halting pair, got {other:?}"),
        };
        let out = run(ge, Word::from_ints(&[1, 0]), 100_000, None).unwrap();
        assert!(out.is_halted());
    }

    #[test]
    fn empty_order_never_relates() {
        let pairs: BTreeSet<(u64, u64)> = BTreeSet::new();
        let (_, s) = build_order_structure(&pairs, 1000).unwrap();
        let (lt, ge) = match s.relations.get("<").unwrap() {
            RelationDecider::HaltingPair { pos, neg } => (pos, neg),
            other => panic!("expected halting pair, got {other:?}"),
        };
        for a in 0..3 {
            for b in 0..3 {
                let w = Word::from_ints(&[a, b]);
                assert!(!run(lt, w.clone(), 50_000, None).unwrap().is_halted());
                assert!(run(ge, w, 50_000, None).unwrap().is_halted());
            }
        }
    }

    #[test]
    fn three_chain_classifies_all_pairs() {
        // 0 < 1 < 2
        let pairs: BTreeSet<(u64, u64)> = [(0, 1), (1, 2), (0, 2)].into_iter().collect();
        let (_, s) = build_order_structure(&pairs, 1000).unwrap();
        let (lt, ge) = match s.relations.get("<").unwrap() {
            RelationDecider::HaltingPair { pos, neg } => (pos, neg),
            other => panic!("expected halting pair, got {other:?}"),
        };
        for a in 0..3u64 {
            for b in 0..3u64 {
                let expect = pairs.contains(&(a, b));
                let w = Word::from_ints(&[a as i64, b as i64]);
                assert_eq!(
                    run(lt, w.clone(), 100_000, None).unwrap().is_halted(),
                    expect,
                    "lt machine wrong on ({a},{b})"
                );
                assert_eq!(
                    run(ge, w, 100_000, None).unwrap().is_halted(),
                    !expect,
                    "complement machine wrong on ({a},{b})"
                );
            }
        }
        // through the atomic diagram
        let sentence = parse_atomic("0 < 2", &s.sig).unwrap();
        assert_eq!(atomic_truth(&s, &sentence, 100_000).unwrap(), Truth::True);
        let sentence = parse_atomic("2 < 0", &s.sig).unwrap();
        assert_eq!(atomic_truth(&s, &sentence, 100_000).unwrap(), Truth::False);
    }

    #[test]
    fn invalid_orders_are_rejected() {
        let refl: BTreeSet<(u64, u64)> = [(1, 1)].into_iter().collect();
        assert!(matches!(
            validate_strict_order(&refl),
            Err(StructureError::NotAStrictOrder(_))
        ));
        let sym: BTreeSet<(u64, u64)> = [(0, 1), (1, 0)].into_iter().collect();
        assert!(validate_strict_order(&sym).is_err());
        let intrans: BTreeSet<(u64, u64)> = [(0, 1), (1, 2)].into_iter().collect();
        assert!(validate_strict_order(&intrans).is_err());
    }
}
