//! Human-readable renderings: indented text trees and Graphviz DOT.

use std::fmt::Write;

use super::{leafset_formula, Idt};
use crate::logic::{render_formula, Formula};
use crate::tree::{DecisionTree, FeatureColumn, NodeKind, Threshold};

/// Short name of a pool entry: the base formula itself, or `χ^i_j` for the
/// `j`-th formula emitted by layer `i`.
fn pool_name(idt: &Idt, index: usize) -> String {
    match idt.locate(index) {
        Some((layer, j)) => format!("χ^{layer}_{j}"),
        None => match &idt.base[index] {
            f @ (Formula::Atom(_) | Formula::Top) => render_formula(f),
            f => format!("({})", render_formula(f)),
        },
    }
}

fn split_label(idt: &Idt, column: &FeatureColumn, threshold: &Threshold) -> String {
    let t = match threshold {
        Threshold::Count(n) => n.to_string(),
        Threshold::Ratio(p) => p.to_string(),
    };
    format!("{} {} > {t}", column.modal, pool_name(idt, column.source))
}

fn write_tree(
    out: &mut String,
    idt: &Idt,
    tree: &DecisionTree,
    indent: &str,
    leaf_label: &dyn Fn(usize) -> String,
) {
    fn go(
        out: &mut String,
        idt: &Idt,
        tree: &DecisionTree,
        id: usize,
        prefix: &str,
        leaf_label: &dyn Fn(usize) -> String,
    ) {
        match &tree.nodes[id].kind {
            NodeKind::Leaf => {
                let _ = writeln!(out, "{}", leaf_label(id));
            }
            NodeKind::Split {
                column,
                threshold,
                left,
                right,
            } => {
                let _ = writeln!(out, "{}", split_label(idt, column, threshold));
                let _ = write!(out, "{prefix}├─ False: ");
                go(out, idt, tree, *left, &format!("{prefix}│  "), leaf_label);
                let _ = write!(out, "{prefix}└─ True: ");
                go(out, idt, tree, *right, &format!("{prefix}   "), leaf_label);
            }
        }
    }
    out.push_str(indent);
    go(out, idt, tree, 0, indent, leaf_label);
}

/// Names of the emitting leaf sets containing `leaf` in tree `t` of layer
/// `li`, e.g. `[M^0_0, M^0_2]`.
fn leaf_names(idt: &Idt, li: usize, t: usize, leaf: usize) -> String {
    let layer = &idt.layers[li];
    let names: Vec<String> = layer.leaf_sets[t]
        .iter()
        .filter(|s| s.leaves.contains(&leaf))
        .filter_map(|s| idt.locate(s.pool_index).filter(|(l, _)| *l == li).map(|(_, j)| format!("M^{li}_{j}")))
        .collect();
    if names.is_empty() {
        "·".into()
    } else {
        format!("[{}]", names.join(", "))
    }
}

/// Per-class graph rule: the disjunction of final-tree paths ending in a
/// leaf of that class, with pool formulas inlined. Classes without leaves
/// are omitted.
pub fn class_rules(idt: &Idt) -> Vec<(usize, Formula)> {
    let pool = idt.pool_formulas();
    let leaves = idt.final_tree.leaves();
    (0..idt.num_classes)
        .filter_map(|c| {
            let members: Vec<usize> = leaves.iter().copied().filter(|&l| idt.node_class(l) == c).collect();
            if members.is_empty() {
                return None;
            }
            leafset_formula(&idt.final_tree, &members, &pool).ok().map(|f| (c, f))
        })
        .collect()
}

/// Indented text rendering: each layer's trees with leaf-set memberships,
/// the formulas they emit, the final tree and the per-class rules.
pub fn explain_text(idt: &Idt) -> String {
    let mut out = String::new();
    for (li, layer) in idt.layers.iter().enumerate() {
        let _ = writeln!(out, "Layer {li}");
        for (t, tree) in layer.trees.iter().enumerate() {
            let _ = writeln!(out, "  Tree {t}");
            write_tree(&mut out, idt, tree, "    ", &|leaf| leaf_names(idt, li, t, leaf));
        }
        for (j, f) in layer.emitted.iter().enumerate() {
            let _ = writeln!(out, "  χ^{li}_{j} ⇔ {}", render_formula(f));
        }
    }
    let _ = writeln!(out, "Layer {} (final)", idt.layers.len());
    write_tree(&mut out, idt, &idt.final_tree, "  ", &|leaf| format!("Class {}", idt.node_class(leaf)));
    let _ = writeln!(out, "Rules");
    for (c, f) in class_rules(idt) {
        let _ = writeln!(out, "  class {c}: {}", render_formula(&f));
    }
    out
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Graphviz rendering with one cluster per layer.
pub fn explain_dot(idt: &Idt) -> String {
    let mut out = String::from("digraph idt {\n  node [shape=box, fontname=\"monospace\"];\n");
    let emit_tree = |out: &mut String, prefix: &str, tree: &DecisionTree, leaf_label: &dyn Fn(usize) -> String| {
        for (id, node) in tree.nodes.iter().enumerate() {
            let label = match &node.kind {
                NodeKind::Leaf => leaf_label(id),
                NodeKind::Split { column, threshold, .. } => split_label(idt, column, threshold),
            };
            let shape = if matches!(node.kind, NodeKind::Leaf) { "box" } else { "plaintext" };
            let _ = writeln!(out, "    {prefix}_{id} [label=\"{}\", shape={shape}];", dot_escape(&label));
            if let NodeKind::Split { left, right, .. } = node.kind {
                let _ = writeln!(out, "    {prefix}_{id} -> {prefix}_{left} [label=\"False\"];");
                let _ = writeln!(out, "    {prefix}_{id} -> {prefix}_{right} [label=\"True\"];");
            }
        }
    };
    for (li, layer) in idt.layers.iter().enumerate() {
        let _ = writeln!(out, "  subgraph cluster_layer{li} {{\n    label=\"Layer {li}\";");
        for (t, tree) in layer.trees.iter().enumerate() {
            emit_tree(&mut out, &format!("l{li}t{t}"), tree, &|leaf| leaf_names(idt, li, t, leaf));
        }
        out.push_str("  }\n");
    }
    let _ = writeln!(out, "  subgraph cluster_final {{\n    label=\"Layer {} (final)\";", idt.layers.len());
    emit_tree(&mut out, "final", &idt.final_tree, &|leaf| format!("Class {}", idt.node_class(leaf)));
    out.push_str("  }\n}\n");
    out
}
