#![no_main]

use bssvm::cli::Manifest;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if data.len() > 1 << 16 {
        return;
    }
    let Ok(manifest) = serde_json::from_str::<Manifest>(data) else {
        return;
    };
    // manifests re-serialize and re-parse stably
    let json = serde_json::to_string(&manifest).expect("manifests serialize");
    let again: Manifest = serde_json::from_str(&json).expect("serialized manifest reparses");
    assert_eq!(manifest.kind, again.kind);
    assert_eq!(manifest.machines, again.machines);
    assert_eq!(manifest.pairs, again.pairs);
});
