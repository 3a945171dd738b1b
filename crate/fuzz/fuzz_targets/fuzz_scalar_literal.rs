#![no_main]

use bssvm::scalar::parse_literal;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if data.len() > 4096 {
        return;
    }
    let Ok(value) = parse_literal(data) else {
        return;
    };
    // rendering is lossless: the round trip preserves the exact value
    let rendered = value.render();
    let back = parse_literal(&rendered)
        .unwrap_or_else(|e| panic!("rendered literal `{rendered}` failed to reparse: {e}"));
    assert!(
        value.eq_exact(&back).unwrap_or(false),
        "literal round trip changed the value: `{data}` -> `{rendered}`"
    );
});
