#![no_main]

use bssvm::dsl::{parse_machine, print_machine};
use bssvm::machine::{decode_machine, encode_machine};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    let Ok(machine) = parse_machine(data) else {
        return;
    };
    // a parsed machine pretty-prints and reparses to the same structure
    let printed = print_machine(&machine);
    let reparsed = parse_machine(&printed).expect("printed machine must reparse");
    assert!(
        machine.structurally_eq(&reparsed),
        "print/parse round trip changed the machine"
    );
    // encodable machines survive the word codec
    if let Ok(word) = encode_machine(&machine) {
        let decoded = decode_machine(&word).expect("encoded machine must decode");
        assert!(
            machine.structurally_eq(&decoded),
            "encode/decode round trip changed the machine"
        );
    }
});
