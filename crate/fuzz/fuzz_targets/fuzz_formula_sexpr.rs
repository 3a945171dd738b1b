#![no_main]

use bssvm::dsl::parse_machine;
use bssvm::formulas::sexpr::parse_formula;
use bssvm::formulas::{classify, negate};
use bssvm::machine::Machine;
use libfuzzer_sys::fuzz_target;

fn stub_loader(_: &str) -> Result<Machine, String> {
    parse_machine("machine all over Z\nnode a: input -> b\nnode b: output [x1]\n")
        .map_err(|e| e.to_string())
}

fuzz_target!(|data: &str| {
    if data.len() > 1 << 14 {
        return;
    }
    let Ok(formula) = parse_formula(data, &mut stub_loader) else {
        return;
    };
    // classification terminates on every parsed formula, and negation is an
    // involution on the classified fragment
    match classify(&formula) {
        Ok(level) => {
            let neg = negate(&formula);
            let neg_level = classify(&neg).expect("negation preserves classifiability");
            assert_eq!(
                level.n, neg_level.n,
                "negation must mirror the level: {level:?} vs {neg_level:?}"
            );
        }
        Err(_) => {
            // transfinite constructs stay rejected under negation too
            assert!(classify(&negate(&formula)).is_err());
        }
    }
});
