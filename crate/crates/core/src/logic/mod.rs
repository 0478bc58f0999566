//! Counting modal logic with relative thresholds: AST, concrete syntax,
//! evaluation and simplification.

mod eval;
pub mod fraction;
mod formula;
mod modal;
mod parse;
mod render;
mod simplify;

pub use eval::{eval_graph, eval_nodes, eval_nodes_reference};
pub use formula::{formula_depth, Formula};
pub use fraction::Fraction;
pub use modal::Modal;
pub use parse::parse_formula;
pub use render::{render_formula, render_formula_unicode};
pub use simplify::simplify;
