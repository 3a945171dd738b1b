//! Regenerates the fuzz seed corpus from the bundled machines, literals,
//! formulas, and manifests. Run from the repository root:
//!
//! ```text
//! cargo run -p bssvm --example gen_fuzz_seeds
//! ```

use std::fs;
use std::path::Path;

use bssvm::corpus;
use bssvm::dsl::parse_machine;
use bssvm::machine::codec::{encode_machine, word_to_i16_bytes};

fn main() -> std::io::Result<()> {
    let root = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "fuzz/corpus".to_string());
    let root = Path::new(&root);

    // machine description seeds
    let dsl = root.join("fuzz_dsl_parse");
    fs::create_dir_all(&dsl)?;
    for (name, src) in corpus::ALL {
        fs::write(dsl.join(format!("{name}.bss")), src)?;
    }
    let extractor = bssvm::structures::order::build_digit_extractor();
    fs::write(
        dsl.join("digit_extractor.bss"),
        bssvm::dsl::print_machine(&extractor),
    )?;

    // encoded-machine byte seeds (integer-parameter machines fit i16 entries)
    let dec = root.join("fuzz_machine_decode");
    fs::create_dir_all(&dec)?;
    for name in ["identity", "gcd", "sign_branch", "equational_zero", "abs", "zero_scan"] {
        let src = corpus::ALL.iter().find(|(n, _)| *n == name).unwrap().1;
        let m = parse_machine(src).unwrap();
        let word = encode_machine(&m).unwrap();
        let bytes = word_to_i16_bytes(&word)
            .unwrap_or_else(|| panic!("{name} has non-i16 entries"));
        fs::write(dec.join(format!("{name}.bin")), bytes)?;
    }

    // scalar literal seeds
    let lit = root.join("fuzz_scalar_literal");
    fs::create_dir_all(&lit)?;
    for (name, text) in [
        ("int", "-17"),
        ("rat", "5/6"),
        ("sqrt2", "alg(x^2-2, 1, 2)"),
        ("cubic", "alg(3*x^3-4*x+1, -2, 0)"),
        ("zero", "0"),
        ("big", "123456789123456789/987654321987654321"),
    ] {
        fs::write(lit.join(format!("{name}.txt")), text)?;
    }

    // formula seeds
    let fml = root.join("fuzz_formula_sexpr");
    fs::create_dir_all(&fml)?;
    for (name, text) in [
        (
            "sigma1",
            "(or-enum (range 4) (i)\n  (exists (y) (and (eq y i) (atom E x y))))",
        ),
        ("pi1", "(forall (y) (not (atom < y 0)))"),
        (
            "nested",
            "(and (atom E 0 1) (or (eq x 2) (exists (z) (atom E z x))))",
        ),
        ("machine-enum", "(or-enum (machine \"idx.bss\" 3) i (atom E i i))"),
        ("limit", "(sigma-lim (range 2) i (atom E x x))"),
    ] {
        fs::write(fml.join(format!("{name}.sexpr")), text)?;
    }

    // manifest seeds, produced by the structure builders themselves
    let man = root.join("fuzz_manifest_json");
    fs::create_dir_all(&man)?;
    let tmp = tempfile::tempdir()?;
    let build = |args: &[&str]| {
        let (code, out, err) = bssvm::cli::dispatch_str(args);
        assert_eq!(code, 0, "builder failed: {out} {err}");
    };
    let ord = tmp.path().join("ord");
    build(&[
        "structure",
        "order",
        "--pairs",
        "0<1,1<2,0<2",
        "--out",
        ord.to_str().unwrap(),
    ]);
    fs::copy(ord.join("manifest.json"), man.join("order.json"))?;
    let vs = tmp.path().join("vs");
    build(&["structure", "vectorspace", "--dim", "2", "--out", vs.to_str().unwrap()]);
    fs::copy(vs.join("manifest.json"), man.join("vectorspace.json"))?;
    let cyc = tmp.path().join("cyc");
    build(&[
        "structure",
        "cycles",
        "--set",
        "2,5",
        "--out",
        cyc.to_str().unwrap(),
    ]);
    fs::copy(cyc.join("manifest.json"), man.join("cycles.json"))?;

    println!("fuzz seed corpus written under {}", root.display());
    Ok(())
}
