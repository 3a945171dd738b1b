//! Exact-arithmetic virtual machine and analysis toolkit for BSS machines
//! over ordered rings.
//!
//! The crate is organized around the machine model: [`scalar`] provides exact
//! ring/field arithmetic for the four supported backends (integers, rationals,
//! real algebraic numbers, digit-stream reals), [`machine`] defines machine
//! graphs and the deterministic interpreter, [`paths`] enumerates the
//! semialgebraic cells of halting sets by symbolic execution, [`structures`]
//! packages machines into computable structures (well-orderings, vector
//! spaces, cyclic-graph unions), [`formulas`] handles finite-level infinitary
//! formulas, and [`dsl`]/[`cli`] provide the textual machine format and the
//! command-line surface.

pub mod cli;
pub mod corpus;
pub mod dsl;
pub mod formulas;
pub mod machine;
pub mod paths;
pub mod scalar;
pub mod structures;
