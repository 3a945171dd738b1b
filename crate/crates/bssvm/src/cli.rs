//! Command-line surface: machine runs with optional JSON traces, path-cell
//! enumeration, the run/cell agreement harness, structure builders emitting
//! manifest + machine files, and budgeted formula evaluation.
//!
//! Exit codes: 0 success/true, 1 false/disagreement, 2 unknown/out-of-budget,
//! 64 usage error, 65 data error.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus;
use crate::dsl::{parse_machine, print_machine};
use crate::formulas::{
    eval_budgeted, Assignment, RationalGridEnumerator, WitnessEnumerator, WordListEnumerator,
};
use crate::machine::{
    step, Config, FiniteWordOracle, Machine, NodePayload, Oracle, RunOutcome, StepResult, Word,
};
use crate::paths::{cell_contains, cell_output_at, enumerate_paths, Cell};
use crate::scalar::{parse_literal, Backend, Scalar};
use crate::structures::cycles::{cycle_graph_structure, vertices_upto};
use crate::structures::order::{build_order_structure, order_stream};
use crate::structures::vecspace::vs_make;
use crate::structures::{parse_atomic, RStructure, RelationDecider, Signature, Truth};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FALSE: i32 = 1;
pub const EXIT_UNKNOWN: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_DATA: i32 = 65;

#[derive(Parser)]
#[command(name = "bssvm", version, about = "Exact machine runs over ordered rings")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a machine on an input word.
    Run {
        #[arg(long)]
        machine: PathBuf,
        /// Comma-separated scalar literals, e.g. "3,5" or "alg(x^2-2, 1, 2)".
        #[arg(long, default_value = "")]
        input: String,
        #[arg(long, default_value_t = 10_000)]
        budget: u64,
        /// JSON file with {"words": [["a", "b"], ...]} membership lists.
        #[arg(long)]
        oracle: Option<PathBuf>,
        /// Write a JSON step trace here.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Enumerate path cells of the halting set up to a depth bound.
    Paths {
        #[arg(long)]
        machine: PathBuf,
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        depth: u64,
        #[arg(long, default_value = "json")]
        format: String,
        /// Write the JSON here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cross-check run outcomes against cell membership on sampled inputs.
    CheckCells {
        #[arg(long)]
        machine: PathBuf,
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        depth: u64,
        #[arg(long, default_value_t = 1000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Build a structure: manifest plus machine files.
    Structure {
        #[command(subcommand)]
        which: StructureCmd,
    },
    /// Evaluate a first-level formula against a structure.
    Eval {
        /// Path to a structure manifest (manifest.json).
        #[arg(long)]
        structure: PathBuf,
        /// Path to an s-expression formula file.
        #[arg(long)]
        formula: PathBuf,
        #[arg(long, default_value_t = 100_000)]
        budget: u64,
        /// Variable assignments `x=0` or `y=1,2`, repeatable.
        #[arg(long)]
        assign: Vec<String>,
    },
    /// Print a bundled example machine description.
    Example {
        /// One of the corpus names, e.g. newton_sqrt2; lists names if omitted.
        name: Option<String>,
    },
}

#[derive(Subcommand)]
enum StructureCmd {
    /// Well-ordering structure from a strict order like "0<1,1<2,0<2".
    Order {
        #[arg(long)]
        pairs: String,
        #[arg(long, default_value_t = 1000)]
        budget: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Finite-dimensional vector space.
    Vectorspace {
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value = "Q")]
        backend: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Disjoint union of cycles steered by a finite set like "2,5".
    Cycles {
        #[arg(long, default_value = "")]
        set: String,
        #[arg(long, default_value_t = 2)]
        nmin: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Entry point shared by the binary and the test harnesses: parses argv
/// (including the program name) and runs one subcommand, writing artifacts
/// and diagnostics to the supplied streams.
pub fn dispatch(argv: &[String], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{e}");
                    EXIT_USAGE
                }
            };
        }
    };
    match run_cmd(cli.cmd, out, err) {
        Ok(code) => code,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_DATA
        }
    }
}

fn run_cmd(cmd: Cmd, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, String> {
    match cmd {
        Cmd::Run {
            machine,
            input,
            budget,
            oracle,
            trace,
        } => cmd_run(&machine, &input, budget, oracle.as_deref(), trace.as_deref(), out),
        Cmd::Paths {
            machine,
            dim,
            depth,
            format,
            out: out_path,
        } => cmd_paths(&machine, dim, depth, &format, out_path.as_deref(), out),
        Cmd::CheckCells {
            machine,
            dim,
            depth,
            samples,
            seed,
        } => cmd_check_cells(&machine, dim, depth, samples, seed, out, err),
        Cmd::Structure { which } => cmd_structure(which, out),
        Cmd::Eval {
            structure,
            formula,
            budget,
            assign,
        } => cmd_eval(&structure, &formula, budget, &assign, out),
        Cmd::Example { name } => {
            match name {
                None => {
                    for (n, _) in corpus::ALL {
                        let _ = writeln!(out, "{n}");
                    }
                    Ok(EXIT_OK)
                }
                Some(n) => match corpus::ALL.iter().find(|(name, _)| *name == n) {
                    Some((_, src)) => {
                        let _ = write!(out, "{src}");
                        Ok(EXIT_OK)
                    }
                    None => Err(format!("unknown example `{n}`")),
                },
            }
        }
    }
}

fn load_machine(path: &Path) -> Result<Machine, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    parse_machine(&text).map_err(|e| format!("{}: {e}", path.display()))
}

/// Parse a comma-separated word of scalar literals (commas inside alg(...)
/// literals do not split).
pub fn parse_word_csv(s: &str) -> Result<Word, String> {
    let t = s.trim();
    if t.is_empty() {
        return Ok(Word::empty());
    }
    let mut parts = Vec::new();
    let mut depth = 0usize;
    let mut start = 0usize;
    for (i, c) in t.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            ',' if depth == 0 => {
                parts.push(&t[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&t[start..]);
    let entries = parts
        .iter()
        .map(|p| parse_literal(p).map_err(|e| e.to_string()))
        .collect::<Result<Vec<_>, _>>()?;
    Word::new(entries).map_err(|e| e.to_string())
}

/// Deterministic sample word: entries are zero with probability 1/4 and
/// small rationals otherwise. Shared by check-cells and the test suites.
pub fn sample_rational_word(rng: &mut ChaCha8Rng, dim: usize) -> Word {
    Word::new(
        (0..dim)
            .map(|_| {
                if rng.gen_bool(0.25) {
                    Scalar::int(0)
                } else {
                    Scalar::rat(rng.gen_range(-20..=20), rng.gen_range(1..=9))
                }
            })
            .collect(),
    )
    .expect("rational entries are uniform")
}

#[derive(serde::Deserialize)]
struct OracleFile {
    #[serde(default)]
    words: Vec<Vec<String>>,
}

fn load_oracle(path: &Path) -> Result<FiniteWordOracle, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let parsed: OracleFile =
        serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut words = Vec::with_capacity(parsed.words.len());
    for lits in parsed.words {
        let entries = lits
            .iter()
            .map(|l| parse_literal(l).map_err(|e| e.to_string()))
            .collect::<Result<Vec<_>, _>>()?;
        words.push(Word::new(entries).map_err(|e| e.to_string())?);
    }
    Ok(FiniteWordOracle::new(words))
}

#[derive(serde::Serialize)]
struct TraceRecord {
    step: u64,
    node: String,
    kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    offset: Option<i64>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    cells: BTreeMap<String, String>,
}

#[derive(serde::Serialize)]
struct TraceFile {
    format_version: u32,
    machine: String,
    input: String,
    budget: u64,
    records: Vec<TraceRecord>,
    outcome: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    output: Option<String>,
    steps: u64,
}

fn run_traced(
    m: &Machine,
    input: Word,
    budget: u64,
    oracle: Option<&dyn Oracle>,
) -> Result<(RunOutcome, Vec<TraceRecord>), String> {
    let violations = crate::machine::validate(m);
    if !violations.is_empty() {
        return Err(format!("machine fails validation: {}", violations[0]));
    }
    let mut records = Vec::new();
    let mut c = Config::initial(m, input).ok_or("machine has no input node")?;
    loop {
        if c.steps >= budget {
            return Ok((RunOutcome::OutOfBudget { last: c }, records));
        }
        let node_idx = c.node;
        let payload = &m.nodes[node_idx].payload;
        let touched: Vec<i64> = match payload {
            NodePayload::Compute { assigns } => assigns.iter().map(|(c, _)| *c).collect(),
            NodePayload::Oracle { target, .. } => vec![*target],
            NodePayload::Input => {
                let n = c.pending_input.as_ref().map_or(0, |w| w.len()) as i64;
                (0..=n).collect()
            }
            _ => vec![],
        };
        match step(m, c, oracle) {
            StepResult::Continue(next) => {
                let mut cells = BTreeMap::new();
                for t in touched {
                    cells.insert(t.to_string(), next.tape.get(t).render());
                }
                records.push(TraceRecord {
                    step: next.steps,
                    node: m.nodes[node_idx].label.clone(),
                    kind: m.nodes[node_idx].payload.kind_name(),
                    offset: match payload {
                        NodePayload::Shift { .. } => Some(0),
                        _ => None,
                    },
                    cells,
                });
                c = next;
            }
            StepResult::Halted { output, steps } => {
                records.push(TraceRecord {
                    step: steps,
                    node: m.nodes[node_idx].label.clone(),
                    kind: "output",
                    offset: None,
                    cells: BTreeMap::new(),
                });
                return Ok((RunOutcome::Halted { output, steps }, records));
            }
            StepResult::Stuck { reason, at } => {
                return Ok((RunOutcome::Stuck { reason, at }, records));
            }
        }
    }
}

fn cmd_run(
    machine: &Path,
    input: &str,
    budget: u64,
    oracle: Option<&Path>,
    trace: Option<&Path>,
    out: &mut dyn Write,
) -> Result<i32, String> {
    let m = load_machine(machine)?;
    let word = parse_word_csv(input)?;
    let oracle_obj = oracle.map(load_oracle).transpose()?;
    let oracle_dyn: Option<&dyn Oracle> = oracle_obj.as_ref().map(|o| o as &dyn Oracle);
    let (outcome, records) = run_traced(&m, word, budget, oracle_dyn)?;
    if let Some(path) = trace {
        let file = TraceFile {
            format_version: 1,
            machine: m.name.clone(),
            input: input.to_string(),
            budget,
            records,
            outcome: match &outcome {
                RunOutcome::Halted { .. } => "halted".into(),
                RunOutcome::OutOfBudget { .. } => "out-of-budget".into(),
                RunOutcome::Stuck { reason, .. } => format!("stuck: {reason:?}"),
            },
            output: outcome.halted_output().map(|w| w.render()),
            steps: match &outcome {
                RunOutcome::Halted { steps, .. } => *steps,
                RunOutcome::OutOfBudget { last } => last.steps,
                RunOutcome::Stuck { at, .. } => at.steps,
            },
        };
        let json = serde_json::to_string_pretty(&file).map_err(|e| e.to_string())?;
        std::fs::write(path, json + "\n").map_err(|e| e.to_string())?;
    }
    match outcome {
        RunOutcome::Halted { output, steps } => {
            let _ = writeln!(out, "{}", output.render());
            let _ = writeln!(out, "halted in {steps} steps");
            Ok(EXIT_OK)
        }
        RunOutcome::OutOfBudget { last } => {
            let _ = writeln!(out, "out of budget after {} steps", last.steps);
            Ok(EXIT_UNKNOWN)
        }
        RunOutcome::Stuck { reason, at } => {
            let _ = writeln!(
                out,
                "stuck ({reason:?}) at node {} after {} steps",
                at.node, at.steps
            );
            Ok(EXIT_UNKNOWN)
        }
    }
}

#[derive(serde::Serialize)]
struct CellJson {
    path: Vec<String>,
    conditions: Vec<CondJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    output: Option<Vec<String>>,
    truncated: bool,
}

#[derive(serde::Serialize)]
struct CondJson {
    poly: String,
    rel: String,
}

#[derive(serde::Serialize)]
struct CellsFile {
    format_version: u32,
    machine: String,
    input_dim: usize,
    depth: u64,
    cells: Vec<CellJson>,
}

fn cells_to_json(m: &Machine, dim: usize, depth: u64, cells: &[Cell]) -> CellsFile {
    CellsFile {
        format_version: 1,
        machine: m.name.clone(),
        input_dim: dim,
        depth,
        cells: cells
            .iter()
            .map(|c| CellJson {
                path: c.path.iter().map(|&i| m.nodes[i].label.clone()).collect(),
                conditions: c
                    .conditions
                    .iter()
                    .map(|d| CondJson {
                        poly: d.poly.render(),
                        rel: d.rel.render().to_string(),
                    })
                    .collect(),
                output: c
                    .output
                    .as_ref()
                    .map(|o| o.iter().map(|e| e.render()).collect()),
                truncated: c.truncated,
            })
            .collect(),
    }
}

fn cmd_paths(
    machine: &Path,
    dim: usize,
    depth: u64,
    format: &str,
    out_path: Option<&Path>,
    out: &mut dyn Write,
) -> Result<i32, String> {
    if format != "json" {
        return Err(format!("unsupported format `{format}` (only json)"));
    }
    let m = load_machine(machine)?;
    let cells = enumerate_paths(&m, dim, depth).map_err(|e| e.to_string())?;
    let file = cells_to_json(&m, dim, depth, &cells);
    let json = serde_json::to_string_pretty(&file).map_err(|e| e.to_string())?;
    match out_path {
        Some(p) => std::fs::write(p, json + "\n").map_err(|e| e.to_string())?,
        None => {
            let _ = writeln!(out, "{json}");
        }
    }
    Ok(EXIT_OK)
}

fn cmd_check_cells(
    machine: &Path,
    dim: usize,
    depth: u64,
    samples: u64,
    seed: u64,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, String> {
    let m = load_machine(machine)?;
    let cells = enumerate_paths(&m, dim, depth).map_err(|e| e.to_string())?;
    let halting: Vec<&Cell> = cells.iter().filter(|c| !c.truncated).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut disagreements = 0u64;
    for i in 0..samples {
        let word = sample_rational_word(&mut rng, dim);
        let outcome = crate::machine::run(&m, word.clone(), depth, None)
            .map_err(|e| e.to_string())?;
        let members: Vec<&&Cell> = halting
            .iter()
            .filter(|c| cell_contains(c, &word).unwrap_or(false))
            .collect();
        let ok = match &outcome {
            RunOutcome::Halted { output, .. } => {
                members.len() == 1
                    && cell_output_at(members[0], &word)
                        .map(|w| w.eq_exact(output).unwrap_or(false))
                        .unwrap_or(false)
            }
            _ => members.is_empty(),
        };
        if !ok {
            disagreements += 1;
            let _ = writeln!(
                err,
                "disagreement on sample {i}: input {} runs to {:?} but lies in {} halting cells",
                word.render(),
                match outcome {
                    RunOutcome::Halted { .. } => "halt",
                    RunOutcome::OutOfBudget { .. } => "out-of-budget",
                    RunOutcome::Stuck { .. } => "stuck",
                },
                members.len()
            );
        }
    }
    let _ = writeln!(
        out,
        "{} samples, {} halting cells, {} disagreements",
        samples,
        halting.len(),
        disagreements
    );
    Ok(if disagreements == 0 { EXIT_OK } else { EXIT_FALSE })
}

#[derive(serde::Serialize, serde::Deserialize)]
pub struct Manifest {
    pub format_version: u32,
    pub kind: String,
    pub signature: Signature,
    /// Role name -> machine file path, relative to the manifest.
    pub machines: BTreeMap<String, String>,
    /// Constant name -> comma-separated word literal.
    #[serde(default)]
    pub constants: BTreeMap<String, String>,
    /// Stream parameter binding name for order structures.
    #[serde(default)]
    pub stream_binding: Option<String>,
    #[serde(default)]
    pub pairs: Option<Vec<(u64, u64)>>,
    #[serde(default)]
    pub budget: Option<u64>,
    #[serde(default)]
    pub dim: Option<usize>,
    #[serde(default)]
    pub backend: Option<String>,
    #[serde(default)]
    pub oracle_members: Option<Vec<u64>>,
    #[serde(default)]
    pub n_min: Option<u64>,
}

fn write_structure_files(
    dir: &Path,
    manifest: &Manifest,
    machines: &[(&str, &Machine)],
) -> Result<(), String> {
    std::fs::create_dir_all(dir).map_err(|e| e.to_string())?;
    for (role, m) in machines {
        let file = manifest
            .machines
            .get(*role)
            .ok_or_else(|| format!("missing machine role {role}"))?;
        std::fs::write(dir.join(file), print_machine(m)).map_err(|e| e.to_string())?;
    }
    let json = serde_json::to_string_pretty(manifest).map_err(|e| e.to_string())?;
    std::fs::write(dir.join("manifest.json"), json + "\n").map_err(|e| e.to_string())?;
    Ok(())
}

fn cmd_structure(which: StructureCmd, out: &mut dyn Write) -> Result<i32, String> {
    match which {
        StructureCmd::Order { pairs, budget, out: dir } => {
            let mut set = std::collections::BTreeSet::new();
            for item in pairs.split(',').filter(|s| !s.trim().is_empty()) {
                let (a, b) = item
                    .split_once('<')
                    .ok_or_else(|| format!("bad pair `{item}`, expected a<b"))?;
                let a: u64 = a.trim().parse().map_err(|_| format!("bad natural `{a}`"))?;
                let b: u64 = b.trim().parse().map_err(|_| format!("bad natural `{b}`"))?;
                set.insert((a, b));
            }
            let (pres, s) = build_order_structure(&set, budget).map_err(|e| e.to_string())?;
            let (lt, ge) = match s.relations.get("<").unwrap() {
                RelationDecider::HaltingPair { pos, neg } => (pos, neg),
                _ => unreachable!("order structures use halting pairs"),
            };
            let manifest = Manifest {
                format_version: 1,
                kind: "order".into(),
                signature: s.sig.clone(),
                machines: [
                    ("lt".to_string(), "lt.bss".to_string()),
                    ("lt_co".to_string(), "lt_co.bss".to_string()),
                    ("universe".to_string(), "universe.bss".to_string()),
                ]
                .into_iter()
                .collect(),
                constants: BTreeMap::new(),
                stream_binding: Some("ell".into()),
                pairs: Some(pres.pairs.iter().copied().collect()),
                budget: Some(budget),
                dim: None,
                backend: None,
                oracle_members: None,
                n_min: None,
            };
            write_structure_files(
                &dir,
                &manifest,
                &[("lt", lt), ("lt_co", ge), ("universe", &s.universe)],
            )?;
            let _ = writeln!(out, "wrote order structure to {}", dir.display());
            Ok(EXIT_OK)
        }
        StructureCmd::Vectorspace { dim, backend, out: dir } => {
            let b = Backend::parse(&backend).ok_or(format!("unknown backend `{backend}`"))?;
            let s = vs_make(dim, b);
            let mut machines_map = BTreeMap::new();
            machines_map.insert("add".to_string(), "add.bss".to_string());
            machines_map.insert("scale".to_string(), "scale.bss".to_string());
            machines_map.insert("universe".to_string(), "universe.bss".to_string());
            let constants = s
                .constants
                .iter()
                .map(|(k, w)| (k.clone(), w.render()))
                .collect();
            let manifest = Manifest {
                format_version: 1,
                kind: "vectorspace".into(),
                signature: s.sig.clone(),
                machines: machines_map,
                constants,
                stream_binding: None,
                pairs: None,
                budget: None,
                dim: Some(dim),
                backend: Some(backend),
                oracle_members: None,
                n_min: None,
            };
            write_structure_files(
                &dir,
                &manifest,
                &[
                    ("add", s.functions.get("add").unwrap()),
                    ("scale", s.functions.get("scale").unwrap()),
                    ("universe", &s.universe),
                ],
            )?;
            let _ = writeln!(out, "wrote vector space structure to {}", dir.display());
            Ok(EXIT_OK)
        }
        StructureCmd::Cycles { set, nmin, out: dir } => {
            let members: Vec<u64> = set
                .split(',')
                .filter(|s| !s.trim().is_empty())
                .map(|s| s.trim().parse().map_err(|_| format!("bad natural `{s}`")))
                .collect::<Result<Vec<_>, _>>()?;
            let oracle = Arc::new(crate::machine::NaturalSetOracle::new(members.clone()));
            let s = cycle_graph_structure(oracle, nmin);
            let adj = match s.relations.get("E").unwrap() {
                RelationDecider::Total(m) => m,
                _ => unreachable!("cycle adjacency is a total decider"),
            };
            let manifest = Manifest {
                format_version: 1,
                kind: "cycles".into(),
                signature: s.sig.clone(),
                machines: [
                    ("E".to_string(), "adjacency.bss".to_string()),
                    ("universe".to_string(), "universe.bss".to_string()),
                ]
                .into_iter()
                .collect(),
                constants: BTreeMap::new(),
                stream_binding: None,
                pairs: None,
                budget: None,
                dim: None,
                backend: None,
                oracle_members: Some(members),
                n_min: Some(nmin),
            };
            write_structure_files(
                &dir,
                &manifest,
                &[("E", adj), ("universe", &s.universe)],
            )?;
            let _ = writeln!(out, "wrote cycle structure to {}", dir.display());
            Ok(EXIT_OK)
        }
    }
}

/// Load a structure back from a manifest, rebinding stream parameters and
/// oracles as declared.
pub fn load_structure(manifest_path: &Path) -> Result<RStructure, String> {
    let text = std::fs::read_to_string(manifest_path)
        .map_err(|e| format!("cannot read {}: {e}", manifest_path.display()))?;
    let manifest: Manifest =
        serde_json::from_str(&text).map_err(|e| format!("{}: {e}", manifest_path.display()))?;
    if manifest.format_version != 1 {
        return Err(format!(
            "unsupported manifest format version {}",
            manifest.format_version
        ));
    }
    let dir = manifest_path.parent().unwrap_or(Path::new("."));
    let load_role = |role: &str| -> Result<Machine, String> {
        let file = manifest
            .machines
            .get(role)
            .ok_or_else(|| format!("manifest missing machine role `{role}`"))?;
        load_machine(&dir.join(file))
    };
    match manifest.kind.as_str() {
        "order" => {
            let pairs: std::collections::BTreeSet<(u64, u64)> = manifest
                .pairs
                .clone()
                .unwrap_or_default()
                .into_iter()
                .collect();
            let budget = manifest.budget.unwrap_or(1000);
            let ell = order_stream(&pairs, budget);
            let binding = manifest.stream_binding.as_deref().unwrap_or("ell");
            let mut lt = load_role("lt")?;
            lt.bind_stream(binding, ell.clone());
            let mut ge = load_role("lt_co")?;
            ge.bind_stream(binding, ell);
            let universe = load_role("universe")?;
            let field_max = pairs.iter().map(|&(a, b)| a.max(b)).max().unwrap_or(0);
            let explicit = (0..=field_max)
                .map(|n| Word::from_ints(&[n as i64]))
                .collect();
            let mut relations = BTreeMap::new();
            relations.insert(
                "<".to_string(),
                RelationDecider::HaltingPair { pos: lt, neg: ge },
            );
            Ok(RStructure {
                sig: manifest.signature,
                universe,
                explicit_universe: Some(explicit),
                relations,
                functions: BTreeMap::new(),
                constants: BTreeMap::new(),
                oracle: None,
                default_budget: 100_000,
            })
        }
        "vectorspace" => {
            let mut functions = BTreeMap::new();
            functions.insert("add".to_string(), load_role("add")?);
            functions.insert("scale".to_string(), load_role("scale")?);
            let universe = load_role("universe")?;
            let mut constants = BTreeMap::new();
            for (name, lit) in &manifest.constants {
                constants.insert(name.clone(), parse_word_csv(lit)?);
            }
            Ok(RStructure {
                sig: manifest.signature,
                universe,
                explicit_universe: None,
                relations: BTreeMap::new(),
                functions,
                constants,
                oracle: None,
                default_budget: 10_000,
            })
        }
        "cycles" => {
            let oracle = Arc::new(crate::machine::NaturalSetOracle::new(
                manifest.oracle_members.clone().unwrap_or_default(),
            ));
            let adj = load_role("E")?;
            let universe = load_role("universe")?;
            let mut relations = BTreeMap::new();
            relations.insert("E".to_string(), RelationDecider::Total(adj));
            Ok(RStructure {
                sig: manifest.signature,
                universe,
                explicit_universe: None,
                relations,
                functions: BTreeMap::new(),
                constants: BTreeMap::new(),
                oracle: Some(oracle),
                default_budget: 10_000,
            })
        }
        other => Err(format!("unknown structure kind `{other}`")),
    }
}

fn default_witnesses(manifest_kind: &str, s: &RStructure) -> Box<dyn WitnessEnumerator> {
    if let Some(u) = &s.explicit_universe {
        return Box::new(WordListEnumerator(u.clone()));
    }
    match manifest_kind {
        "cycles" => {
            let oracle = s.oracle.clone().expect("cycle structures carry an oracle");
            Box::new(WordListEnumerator(vertices_upto(oracle.as_ref(), 2, 8)))
        }
        _ => Box::new(RationalGridEnumerator { dim: 1 }),
    }
}

fn cmd_eval(
    structure: &Path,
    formula: &Path,
    budget: u64,
    assigns: &[String],
    out: &mut dyn Write,
) -> Result<i32, String> {
    let text = std::fs::read_to_string(structure)
        .map_err(|e| format!("cannot read {}: {e}", structure.display()))?;
    let manifest: Manifest = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    let s = load_structure(structure)?;
    let formula_text = std::fs::read_to_string(formula)
        .map_err(|e| format!("cannot read {}: {e}", formula.display()))?;
    let formula_dir = formula.parent().unwrap_or(Path::new(".")).to_path_buf();
    let mut loader = |path: &str| -> Result<Machine, String> {
        load_machine(&formula_dir.join(path))
    };
    let f = crate::formulas::sexpr::parse_formula(&formula_text, &mut loader)
        .map_err(|e| e.to_string())?;
    let mut asg = Assignment::new();
    for a in assigns {
        let (var, lit) = a
            .split_once('=')
            .ok_or_else(|| format!("bad assignment `{a}`, expected var=word"))?;
        asg.insert(var.trim().to_string(), parse_word_csv(lit)?);
    }
    let witnesses = default_witnesses(&manifest.kind, &s);
    let t = eval_budgeted(&s, &f, &asg, witnesses.as_ref(), budget)
        .map_err(|e| e.to_string())?;
    match t {
        Truth::True => {
            let _ = writeln!(out, "true");
            Ok(EXIT_OK)
        }
        Truth::False => {
            let _ = writeln!(out, "false");
            Ok(EXIT_FALSE)
        }
        Truth::Unknown => {
            let _ = writeln!(out, "unknown");
            Ok(EXIT_UNKNOWN)
        }
    }
}

/// Convenience used by tests: run the CLI against string arguments and
/// capture stdout/stderr.
pub fn dispatch_str(args: &[&str]) -> (i32, String, String) {
    let argv: Vec<String> = std::iter::once("bssvm".to_string())
        .chain(args.iter().map(|s| s.to_string()))
        .collect();
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = dispatch(&argv, &mut out, &mut err);
    (
        code,
        String::from_utf8_lossy(&out).into_owned(),
        String::from_utf8_lossy(&err).into_owned(),
    )
}

/// Parse an atomic sentence against a loaded structure (used by tests and
/// downstream tooling that wants the CLI's behavior without files).
pub fn atomic_for(s: &RStructure, sentence: &str) -> Result<crate::structures::Atomic, String> {
    parse_atomic(sentence, &s.sig).map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::tempdir;

    fn write_corpus(dir: &Path, name: &str) -> PathBuf {
        let src = corpus::ALL.iter().find(|(n, _)| *n == name).unwrap().1;
        let path = dir.join(format!("{name}.bss"));
        std::fs::write(&path, src).unwrap();
        path
    }

    #[test]
    fn run_newton_prints_exact_output() {
        let dir = tempdir().unwrap();
        let m = write_corpus(dir.path(), "newton_sqrt2");
        let (code, out, _) = dispatch_str(&[
            "run",
            "--machine",
            m.to_str().unwrap(),
            "--input",
            "1",
            "--budget",
            "1000",
        ]);
        assert_eq!(code, EXIT_OK);
        assert!(out.starts_with("577/408\n"), "stdout was {out}");
    }

    #[test]
    fn run_mandelbrot_exits_unknown() {
        let dir = tempdir().unwrap();
        let m = write_corpus(dir.path(), "mandelbrot");
        let (code, _, _) = dispatch_str(&[
            "run",
            "--machine",
            m.to_str().unwrap(),
            "--input",
            "0,0",
            "--budget",
            "100",
        ]);
        assert_eq!(code, EXIT_UNKNOWN);
    }

    #[test]
    fn check_cells_agrees_on_sign_branch() {
        let dir = tempdir().unwrap();
        let m = write_corpus(dir.path(), "sign_branch");
        let (code, out, err) = dispatch_str(&[
            "check-cells",
            "--machine",
            m.to_str().unwrap(),
            "--dim",
            "1",
            "--depth",
            "50",
            "--samples",
            "1000",
            "--seed",
            "42",
        ]);
        assert_eq!(code, EXIT_OK, "stdout: {out} stderr: {err}");
        assert!(out.contains("0 disagreements"));
    }

    #[test]
    fn paths_emits_deterministic_json() {
        let dir = tempdir().unwrap();
        let m = write_corpus(dir.path(), "abs");
        let args = [
            "paths",
            "--machine",
            m.to_str().unwrap(),
            "--dim",
            "1",
            "--depth",
            "20",
        ];
        let (c1, out1, _) = dispatch_str(&args);
        let (c2, out2, _) = dispatch_str(&args);
        assert_eq!(c1, EXIT_OK);
        assert_eq!(c2, EXIT_OK);
        assert_eq!(out1, out2);
        assert!(out1.contains("\"rel\": \">=0\""));
    }

    #[test]
    fn structure_order_round_trips_through_manifest() {
        let dir = tempdir().unwrap();
        let out_dir = dir.path().join("ord");
        let (code, _, err) = dispatch_str(&[
            "structure",
            "order",
            "--pairs",
            "0<1,1<2,0<2",
            "--out",
            out_dir.to_str().unwrap(),
        ]);
        assert_eq!(code, EXIT_OK, "stderr: {err}");
        let s = load_structure(&out_dir.join("manifest.json")).unwrap();
        let sentence = parse_atomic("0 < 2", &s.sig).unwrap();
        assert_eq!(
            crate::structures::atomic_truth(&s, &sentence, 100_000).unwrap(),
            Truth::True
        );
    }

    #[test]
    fn eval_formula_on_order_structure() {
        let dir = tempdir().unwrap();
        let out_dir = dir.path().join("ord");
        let (code, _, _) = dispatch_str(&[
            "structure",
            "order",
            "--pairs",
            "0<1,1<2,0<2",
            "--out",
            out_dir.to_str().unwrap(),
        ]);
        assert_eq!(code, EXIT_OK);
        let formula = dir.path().join("f.sexpr");
        std::fs::write(&formula, "(exists (y) (atom < x y))").unwrap();
        let (code, out, err) = dispatch_str(&[
            "eval",
            "--structure",
            out_dir.join("manifest.json").to_str().unwrap(),
            "--formula",
            formula.to_str().unwrap(),
            "--assign",
            "x=0",
            "--budget",
            "100000",
        ]);
        assert_eq!(code, EXIT_OK, "stderr: {err}");
        assert_eq!(out, "true\n");
        // no witness above 2: unknown
        let (code, out, _) = dispatch_str(&[
            "eval",
            "--structure",
            out_dir.join("manifest.json").to_str().unwrap(),
            "--formula",
            formula.to_str().unwrap(),
            "--assign",
            "x=2",
            "--budget",
            "2000",
        ]);
        assert_eq!(code, EXIT_UNKNOWN);
        assert_eq!(out, "unknown\n");
    }

    #[test]
    fn usage_errors_exit_64() {
        let (code, _, _) = dispatch_str(&["run", "--machine"]);
        assert_eq!(code, EXIT_USAGE);
        let (code, _, _) = dispatch_str(&["no-such-command"]);
        assert_eq!(code, EXIT_USAGE);
    }

    #[test]
    fn data_errors_exit_65() {
        let (code, _, err) = dispatch_str(&[
            "run",
            "--machine",
            "/nonexistent/machine.bss",
            "--input",
            "1",
        ]);
        assert_eq!(code, EXIT_DATA);
        assert!(err.contains("error:"));
    }

    #[test]
    fn trace_files_are_written_and_deterministic() {
        let dir = tempdir().unwrap();
        let m = write_corpus(dir.path(), "newton_sqrt2");
        let t1 = dir.path().join("t1.json");
        let t2 = dir.path().join("t2.json");
        for t in [&t1, &t2] {
            let (code, _, _) = dispatch_str(&[
                "run",
                "--machine",
                m.to_str().unwrap(),
                "--input",
                "1",
                "--budget",
                "1000",
                "--trace",
                t.to_str().unwrap(),
            ]);
            assert_eq!(code, EXIT_OK);
        }
        let b1 = std::fs::read(&t1).unwrap();
        let b2 = std::fs::read(&t2).unwrap();
        assert_eq!(b1, b2);
        let text = String::from_utf8(b1).unwrap();
        assert!(text.contains("\"outcome\": \"halted\""));
        assert!(text.contains("577/408"));
    }

    #[test]
    fn oracle_file_round_trip() {
        let dir = tempdir().unwrap();
        let src = "machine om over Z\n\
                   node a: input -> q\n\
                   node q: oracle [x1] -> x2 -> c\n\
                   node c: output [x2]\n";
        let mpath = dir.path().join("om.bss");
        std::fs::write(&mpath, src).unwrap();
        let opath = dir.path().join("oracle.json");
        std::fs::write(&opath, r#"{"words": [["3"], ["5"]]}"#).unwrap();
        let (code, out, _) = dispatch_str(&[
            "run",
            "--machine",
            mpath.to_str().unwrap(),
            "--input",
            "5",
            "--oracle",
            opath.to_str().unwrap(),
        ]);
        assert_eq!(code, EXIT_OK);
        assert!(out.starts_with("1\n"));
    }
}
