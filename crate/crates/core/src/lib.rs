//! Iterated decision trees (IDTs) over counting modal logic.
//!
//! The crate learns sequences of decision trees whose splits are modal
//! counting tests, either directly from labeled graph datasets or by
//! distilling per-layer node representations exported from a trained GNN.
//! It also evaluates, compiles, compacts and pretty-prints the resulting
//! logical classifiers.
//!
//! Module map:
//!
//! * [`graph`]: graphs, binary node features, datasets and TU ingestion.
//! * [`logic`]: formula AST, parser, printer, evaluators and simplifier.
//! * [`tree`]: feature tables, variance-reduction trees and pruning.
//! * [`idt`]: layers, leaf sets, learning, prediction, compaction, compilation.
//! * [`synth`]: seeded synthetic benchmark generators.
//! * [`harness`]: metrics, cross-validation and experiment reports.
//! * [`activation`]: reader/writer for `idtact/1` activation dumps.

pub mod activation;
pub mod error;
pub mod graph;
pub mod harness;
pub mod idt;
pub mod logic;
pub mod par;
pub mod rng;
pub mod synth;
pub mod tree;

pub use error::{Error, Result};
