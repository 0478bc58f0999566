//! Iterated decision trees.
//!
//! An [`Idt`] is a sequence of layers followed by a graph-level final tree.
//! All layers share one growing *feature pool*: pool indices
//! `0..base.len()` are the base formulas (the atoms `U0, U1, …` for learned
//! models), and every layer appends the formulas `χ_M` of its new leaf sets.
//! A split column's `source` is a pool index, and the layering constraint is
//! that a layer's splits only read indices emitted before it.
//!
//! Formulas are stored fully inlined over the atoms, so each pool entry is a
//! self-contained logical description. Evaluation does not interpret them,
//! though: membership of a node in `χ_M` is computed by routing it through
//! the tree and checking its leaf, which is exact and cheap.

mod compact;
mod compile;
mod explain;
mod leafsets;
mod learn;
mod replay;

use serde::{Deserialize, Serialize};

use crate::graph::{FeatureMatrix, Graph};
use crate::logic::{Formula, Modal};
use crate::tree::{DecisionTree, NodeKind};
use crate::{Error, Result};

pub use compact::compact;
pub use compile::{compile_formula_to_idt, CompiledFormula, GUARD_LIMIT};
pub use explain::{explain_dot, explain_text, class_rules};
pub use leafsets::{cluster_leaf_sets, leafset_formula};
pub use learn::{learn_idt, learn_idt_layer, FinalTarget, LayerParams};
pub use replay::{idt_predict, idt_predict_all, pool_matrix};

pub const VERSION: &str = "idt/1";

/// A set of leaves of one tree, with its formula and the pool column that
/// holds its indicator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LeafSet {
    /// leaf node ids, ascending
    pub leaves: Vec<usize>,
    #[serde(with = "formula_text")]
    pub formula: Formula,
    /// Pool index of this set's indicator column. Structurally equal
    /// formulas share one column, so this may point to an earlier entry.
    pub pool_index: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdtLayer {
    /// Pool size before this layer; `emitted[j]` has pool index `pool_start + j`.
    pub pool_start: usize,
    pub modals: Vec<Modal>,
    pub trees: Vec<DecisionTree>,
    /// per tree
    pub leaf_sets: Vec<Vec<LeafSet>>,
    #[serde(with = "formula_list_text")]
    pub emitted: Vec<Formula>,
}

impl IdtLayer {
    /// Pool size after this layer.
    pub fn pool_end(&self) -> usize {
        self.pool_start + self.emitted.len()
    }

    /// For each emitted formula, the first `(tree, leaf set)` producing it.
    pub fn producers(&self) -> Result<Vec<(usize, usize)>> {
        let mut out = vec![None; self.emitted.len()];
        for (t, sets) in self.leaf_sets.iter().enumerate() {
            for (s, ls) in sets.iter().enumerate() {
                if ls.pool_index >= self.pool_start && ls.pool_index < self.pool_end() {
                    let slot = &mut out[ls.pool_index - self.pool_start];
                    if slot.is_none() {
                        *slot = Some((t, s));
                    }
                }
            }
        }
        out.into_iter()
            .enumerate()
            .map(|(j, p)| {
                p.ok_or_else(|| Error::Invariant(format!("emitted formula {} has no producing leaf set", self.pool_start + j)))
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdtConfig {
    pub trees_per_layer: usize,
    /// depth cap of intermediate trees
    pub layer_depth: usize,
    pub min_rows_leaf: usize,
    pub final_min_rows_leaf: usize,
    pub ccp_alpha: f64,
    /// fraction of table columns offered to each intermediate tree
    pub feature_rate: f64,
    /// intermediate layer count when no activations fix it
    pub layers: usize,
    pub intermediate_modals: Vec<Modal>,
    pub seed: u64,
}

impl Default for IdtConfig {
    fn default() -> Self {
        IdtConfig {
            trees_per_layer: 4,
            layer_depth: 2,
            min_rows_leaf: 1,
            final_min_rows_leaf: 5,
            ccp_alpha: 0.005,
            feature_rate: 0.5,
            layers: 3,
            intermediate_modals: Modal::LOCAL.to_vec(),
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Idt {
    pub version: String,
    /// number of atom columns expected in input feature matrices
    pub atom_count: usize,
    pub num_classes: usize,
    /// depth-0 formulas forming the start of the pool
    #[serde(with = "formula_list_text")]
    pub base: Vec<Formula>,
    pub layers: Vec<IdtLayer>,
    /// graph-level tree over the whole pool; leaf class = argmax of its value
    pub final_tree: DecisionTree,
    pub config: IdtConfig,
}

impl Idt {
    /// Every pool formula, in pool order.
    pub fn pool_formulas(&self) -> Vec<Formula> {
        let mut out = self.base.clone();
        for layer in &self.layers {
            out.extend(layer.emitted.iter().cloned());
        }
        out
    }

    pub fn pool_len(&self) -> usize {
        self.layers.last().map_or(self.base.len(), |l| l.pool_end())
    }

    /// Class predicted at a final-tree node.
    pub fn node_class(&self, node: usize) -> usize {
        argmax(&self.final_tree.nodes[node].value)
    }

    /// `(layer, index within layer)` for an emitted pool index, `None` for
    /// base entries.
    pub fn locate(&self, pool_index: usize) -> Option<(usize, usize)> {
        self.layers
            .iter()
            .enumerate()
            .find(|(_, l)| pool_index >= l.pool_start && pool_index < l.pool_end())
            .map(|(i, l)| (i, pool_index - l.pool_start))
    }

    /// Checks structural well-formedness, in particular that every split
    /// reads only pool entries that exist before its layer.
    pub fn validate(&self) -> Result<()> {
        if self.version != VERSION {
            return Err(Error::Version {
                found: self.version.clone(),
                expected: VERSION.into(),
            });
        }
        let bad = |m: String| Err(Error::Invariant(m));
        if self.num_classes == 0 {
            return bad("num_classes must be positive".into());
        }
        for (j, f) in self.base.iter().enumerate() {
            if f.depth() != 0 {
                return bad(format!("base formula {j} has modal depth {}", f.depth()));
            }
            if f.atom_bound() > self.atom_count {
                return bad(format!("base formula {j} reads atoms beyond {}", self.atom_count));
            }
        }
        let mut start = self.base.len();
        for (i, layer) in self.layers.iter().enumerate() {
            if layer.pool_start != start {
                return bad(format!("layer {i} starts at pool index {} instead of {start}", layer.pool_start));
            }
            if layer.leaf_sets.len() != layer.trees.len() {
                return bad(format!("layer {i} has {} trees but {} leaf-set lists", layer.trees.len(), layer.leaf_sets.len()));
            }
            for (t, tree) in layer.trees.iter().enumerate() {
                check_tree(tree, |c| {
                    if c.source >= start {
                        return Err(format!("layer {i} tree {t} reads pool index {} emitted at or after its layer", c.source));
                    }
                    if !layer.modals.contains(&c.modal) {
                        return Err(format!("layer {i} tree {t} uses modal {} outside the layer's set", c.modal));
                    }
                    Ok(())
                })
                .or_else(bad)?;
                let leaves = tree.leaves();
                for ls in &layer.leaf_sets[t] {
                    if ls.leaves.iter().any(|l| !leaves.contains(l)) {
                        return bad(format!("layer {i} tree {t} has a leaf set naming a non-leaf"));
                    }
                    if ls.pool_index >= layer.pool_end() {
                        return bad(format!("layer {i} leaf set points past the layer's pool"));
                    }
                }
            }
            layer.producers()?;
            start = layer.pool_end();
        }
        check_tree(&self.final_tree, |c| {
            if c.source >= start {
                return Err(format!("final tree reads unknown pool index {}", c.source));
            }
            if !c.modal.is_global() {
                return Err(format!("final tree uses node-dependent modal {}", c.modal));
            }
            Ok(())
        })
        .or_else(bad)?;
        if self.final_tree.nodes.iter().any(|n| n.value.len() != self.num_classes) {
            return bad("final tree values do not match num_classes".into());
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Parses and validates a serialized IDT.
    pub fn from_json(text: &str) -> Result<Idt> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        match value.get("version").and_then(|v| v.as_str()) {
            Some(VERSION) => {}
            Some(other) => {
                return Err(Error::Version {
                    found: other.into(),
                    expected: VERSION.into(),
                })
            }
            None => return Err(Error::InvalidInput("IDT document lacks a version".into())),
        }
        let idt: Idt = serde_json::from_value(value)?;
        idt.validate()?;
        Ok(idt)
    }
}

fn check_tree(
    tree: &DecisionTree,
    mut check: impl FnMut(&crate::tree::FeatureColumn) -> std::result::Result<(), String>,
) -> std::result::Result<(), String> {
    if tree.nodes.is_empty() {
        return Err("tree has no nodes".into());
    }
    let n = tree.nodes.len();
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    while let Some(id) = stack.pop() {
        if id >= n || seen[id] {
            return Err(format!("tree node {id} is out of range or shared"));
        }
        seen[id] = true;
        if let NodeKind::Split { column, left, right, .. } = &tree.nodes[id].kind {
            check(column)?;
            stack.push(*left);
            stack.push(*right);
        }
    }
    Ok(())
}

pub(crate) fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = i;
        }
    }
    best
}

/// Pool matrix of a graph: base formulas followed by every layer's emitted
/// indicators.
pub(crate) fn base_columns(base: &[Formula], g: &Graph, u: &FeatureMatrix) -> Result<FeatureMatrix> {
    let mut cols = Vec::with_capacity(base.len());
    for f in base {
        cols.push(match f {
            Formula::Atom(j) if *j < u.cols() => u.column(*j).to_vec(),
            _ => crate::logic::eval_nodes(g, u, f)?,
        });
    }
    FeatureMatrix::from_columns(g.node_count(), cols)
}

mod formula_text {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::logic::{parse_formula, render_formula, Formula};

    pub fn serialize<S: Serializer>(f: &Formula, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&render_formula(f))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Formula, D::Error> {
        let text = String::deserialize(d)?;
        parse_formula(&text).map_err(serde::de::Error::custom)
    }
}

mod formula_list_text {
    use serde::ser::SerializeSeq;
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::logic::{parse_formula, render_formula, Formula};

    pub fn serialize<S: Serializer>(fs: &[Formula], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(fs.len()))?;
        for f in fs {
            seq.serialize_element(&render_formula(f))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Formula>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|t| parse_formula(t).map_err(serde::de::Error::custom))
            .collect()
    }
}
