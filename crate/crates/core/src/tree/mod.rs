//! Feature tables and variance-reduction decision trees with modal split
//! tests.

mod fit;
mod prune;
mod table;

pub use fit::{fit_tree, tree_predict, DecisionTree, FitParams, NodeKind, TreeNode};
pub use prune::prune_ccp;
pub use table::{build_feature_table, column_layout, Cell, ColumnKind, FeatureColumn, FeatureTable, Threshold};
