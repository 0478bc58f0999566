use std::collections::{BTreeMap, BTreeSet};

use super::{argmax, Idt, IdtLayer, LeafSet};
use crate::tree::{DecisionTree, NodeKind};

/// Drops everything the final tree does not transitively depend on.
///
/// Starting from the final tree's split sources, each needed emitted
/// formula keeps only the leaf set that produces it and pulls in the split
/// sources of that set's tree. Unused leaf sets, trees and layers are
/// removed and pool indices renumbered (base entries keep theirs). Splits
/// that no longer separate retained leaf sets, and final-tree splits whose
/// subtrees predict one class, are collapsed. Predictions are unchanged.
pub fn compact(idt: &Idt) -> Idt {
    let mut needed: BTreeSet<usize> = idt.final_tree.split_columns().iter().map(|c| c.source).collect();
    // (layer, tree) -> retained leaf-set indices
    let mut retained: BTreeMap<(usize, usize), BTreeSet<usize>> = BTreeMap::new();
    for (li, layer) in idt.layers.iter().enumerate().rev() {
        let producers = layer.producers().expect("validated IDT");
        let here: Vec<usize> = needed.range(layer.pool_start..layer.pool_end()).copied().collect();
        for p in here {
            let (t, s) = producers[p - layer.pool_start];
            retained.entry((li, t)).or_default().insert(s);
            needed.extend(layer.trees[t].split_columns().iter().map(|c| c.source));
        }
    }

    let mut remap: Vec<Option<usize>> = (0..idt.pool_len()).map(|i| (i < idt.base.len()).then_some(i)).collect();
    let mut next = idt.base.len();
    let mut layers = Vec::new();
    for (li, layer) in idt.layers.iter().enumerate() {
        let kept_trees: Vec<usize> = (0..layer.trees.len()).filter(|t| retained.contains_key(&(li, *t))).collect();
        if kept_trees.is_empty() {
            continue;
        }
        let pool_start = next;
        let mut emitted = Vec::new();
        let mut trees = Vec::new();
        let mut leaf_sets = Vec::new();
        // emitted order follows the original pool order
        let mut kept_sets: Vec<(usize, usize, usize)> = kept_trees
            .iter()
            .flat_map(|&t| retained[&(li, t)].iter().map(move |&s| (t, s)))
            .map(|(t, s)| (layer.leaf_sets[t][s].pool_index, t, s))
            .collect();
        kept_sets.sort_unstable();
        for &(p, _, _) in &kept_sets {
            remap[p] = Some(next);
            emitted.push(layer.emitted[p - layer.pool_start].clone());
            next += 1;
        }
        for &t in &kept_trees {
            let sets: Vec<&LeafSet> = retained[&(li, t)].iter().map(|&s| &layer.leaf_sets[t][s]).collect();
            let membership = |leaf: usize| -> Vec<bool> { sets.iter().map(|s| s.leaves.contains(&leaf)).collect() };
            let (mut tree, leaf_map) = collapse(&layer.trees[t], membership, |_, _| true);
            renumber_sources(&mut tree, &remap);
            leaf_sets.push(
                sets.iter()
                    .map(|s| {
                        let mut leaves: Vec<usize> = s.leaves.iter().map(|&l| leaf_map[l].expect("leaf")).collect();
                        leaves.sort_unstable();
                        leaves.dedup();
                        LeafSet {
                            leaves,
                            formula: s.formula.clone(),
                            pool_index: remap[s.pool_index].expect("retained"),
                        }
                    })
                    .collect(),
            );
            trees.push(tree);
        }
        layers.push(IdtLayer {
            pool_start,
            modals: layer.modals.clone(),
            trees,
            leaf_sets,
            emitted,
        });
    }

    let final_ref = &idt.final_tree;
    let (mut final_tree, _) = collapse(
        final_ref,
        |leaf| argmax(&final_ref.nodes[leaf].value),
        |node, class| argmax(&final_ref.nodes[node].value) == *class,
    );
    renumber_sources(&mut final_tree, &remap);

    Idt {
        version: idt.version.clone(),
        atom_count: idt.atom_count,
        num_classes: idt.num_classes,
        base: idt.base.clone(),
        layers,
        final_tree,
        config: idt.config.clone(),
    }
}

fn renumber_sources(tree: &mut DecisionTree, remap: &[Option<usize>]) {
    for node in &mut tree.nodes {
        if let NodeKind::Split { column, .. } = &mut node.kind {
            column.source = remap[column.source].expect("dependency closure covers every split");
        }
    }
}

/// Turns every split whose leaves all share one key into a leaf (when
/// `accept(node, key)` allows it). Returns the new tree and, for each old
/// leaf id, its new leaf id.
fn collapse<K: PartialEq>(
    tree: &DecisionTree,
    key: impl Fn(usize) -> K,
    accept: impl Fn(usize, &K) -> bool,
) -> (DecisionTree, Vec<Option<usize>>) {
    let n = tree.nodes.len();
    let mut uniform: Vec<Option<K>> = (0..n).map(|_| None).collect();
    // children follow parents in preorder, so a reverse sweep is bottom-up
    for id in (0..n).rev() {
        uniform[id] = match tree.nodes[id].kind {
            NodeKind::Leaf => Some(key(id)),
            NodeKind::Split { left, right, .. } => match (&uniform[left], &uniform[right]) {
                (Some(a), Some(b)) if a == b && accept(id, a) => Some(key(first_leaf(tree, id))),
                _ => None,
            },
        };
    }
    let mut out = tree.clone();
    let mut owner = vec![None; n];
    let mut stack = vec![0];
    while let Some(id) = stack.pop() {
        match tree.nodes[id].kind {
            NodeKind::Split { left, right, .. } if uniform[id].is_none() => {
                stack.push(left);
                stack.push(right);
            }
            _ => {
                out.nodes[id].kind = NodeKind::Leaf;
                let mut sub = vec![id];
                while let Some(x) = sub.pop() {
                    match tree.nodes[x].kind {
                        NodeKind::Leaf => owner[x] = Some(id),
                        NodeKind::Split { left, right, .. } => {
                            sub.push(left);
                            sub.push(right);
                        }
                    }
                }
            }
        }
    }
    let map = out.compact_nodes();
    let leaf_map = owner.iter().map(|o| o.and_then(|id| map[id])).collect();
    (out, leaf_map)
}

fn first_leaf(tree: &DecisionTree, mut id: usize) -> usize {
    while let NodeKind::Split { left, .. } = tree.nodes[id].kind {
        id = left;
    }
    id
}
