#![no_main]

use bssvm::machine::codec::{word_of_i16_bytes, word_to_i16_bytes};
use bssvm::machine::{decode_machine, encode_machine, run, validate, Expr, NodePayload, Word};
use libfuzzer_sys::fuzz_target;

/// Upper bound on the work a single expression evaluation can do, to keep
/// the bounded smoke run below the fuzzer's timeout (towers of large powers
/// are exact-arithmetic-expensive but not bugs).
fn cheap_expr(e: &Expr) -> bool {
    match e {
        Expr::Cell(_) | Expr::Param(_) | Expr::Const(_) => true,
        Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
            cheap_expr(a) && cheap_expr(b)
        }
        Expr::Neg(a) => cheap_expr(a),
        Expr::Pow(a, k) => *k <= 8 && cheap_expr(a),
    }
}

fuzz_target!(|data: &[u8]| {
    if data.len() > 1 << 16 {
        return;
    }
    let word = word_of_i16_bytes(data);
    let Ok(machine) = decode_machine(&word) else {
        return;
    };
    // decoded machines are validated
    assert!(validate(&machine).is_empty(), "decoder accepted an invalid machine");
    // re-encoding is stable
    let code = encode_machine(&machine).expect("decoded machines have encodable parameters");
    let again = decode_machine(&code).expect("canonical code must decode");
    assert!(
        machine.structurally_eq(&again),
        "decode/encode/decode changed the machine"
    );
    if let Some(bytes) = word_to_i16_bytes(&code) {
        let _ = bytes;
    }
    // a short bounded run must not panic (skipped for machines whose single
    // steps are deliberately expensive)
    let affordable = machine.nodes.iter().all(|n| match &n.payload {
        NodePayload::Compute { assigns } => assigns.iter().all(|(_, e)| cheap_expr(e)),
        NodePayload::Branch { test } => cheap_expr(test),
        _ => true,
    });
    if affordable {
        let _ = run(&machine, Word::from_ints(&[1, 2]), 64, None);
    }
});
