use super::fit::{DecisionTree, NodeKind};

/// Minimal cost-complexity pruning with cost `R(t) = SSE(t) / N`, where `N`
/// is the root sample count. Repeatedly collapses the weakest link (lowest
/// `(R(t) - R(T_t)) / (|leaves(T_t)| - 1)`, ties to the lowest node id)
/// while its value is at most `alpha`.
pub fn prune_ccp(tree: &DecisionTree, alpha: f64) -> DecisionTree {
    let mut tree = tree.clone();
    if alpha.is_nan() || alpha <= 0.0 || tree.nodes.len() <= 1 {
        return tree;
    }
    let total = tree.nodes[0].samples.max(1) as f64;
    loop {
        let n = tree.nodes.len();
        // subtree leaf-SSE sums and leaf counts, children after parents in preorder
        let mut sub_sse = vec![0.0; n];
        let mut sub_leaves = vec![0usize; n];
        let mut reachable = vec![false; n];
        reachable[0] = true;
        for id in 0..n {
            if let NodeKind::Split { left, right, .. } = tree.nodes[id].kind {
                if reachable[id] {
                    reachable[left] = true;
                    reachable[right] = true;
                }
            }
        }
        for id in (0..n).rev() {
            match tree.nodes[id].kind {
                NodeKind::Leaf => {
                    sub_sse[id] = tree.nodes[id].sse;
                    sub_leaves[id] = 1;
                }
                NodeKind::Split { left, right, .. } => {
                    sub_sse[id] = sub_sse[left] + sub_sse[right];
                    sub_leaves[id] = sub_leaves[left] + sub_leaves[right];
                }
            }
        }
        let mut weakest: Option<(usize, f64)> = None;
        for id in 0..n {
            if !reachable[id] || tree.is_leaf(id) {
                continue;
            }
            let g = (tree.nodes[id].sse - sub_sse[id]) / total / (sub_leaves[id] - 1) as f64;
            if weakest.is_none_or(|(_, best)| g < best) {
                weakest = Some((id, g));
            }
        }
        match weakest {
            Some((id, g)) if g <= alpha => tree.nodes[id].kind = NodeKind::Leaf,
            _ => break,
        }
    }
    tree.compact_nodes();
    tree
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::Modal;
    use crate::tree::fit::TreeNode;
    use crate::tree::{ColumnKind, FeatureColumn, Threshold};

    fn split(left: usize, right: usize) -> NodeKind {
        NodeKind::Split {
            column: FeatureColumn {
                modal: Modal::Id,
                source: 0,
                kind: ColumnKind::Count,
            },
            threshold: Threshold::Count(0),
            left,
            right,
        }
    }

    fn node(kind: NodeKind, value: f64, samples: usize, sse: f64) -> TreeNode {
        TreeNode {
            kind,
            value: vec![value],
            samples,
            sse,
        }
    }

    /// Two rows per leaf: leaves (0.50, 0.50), (0.51, 0.51), (0, 0), (1, 1).
    fn sample_tree() -> DecisionTree {
        let m: f64 = (0.5 + 0.51 + 0.0 + 1.0) / 4.0;
        let root_sse = 2.0 * [0.5, 0.51, 0.0, 1.0].iter().map(|v| (v - m) * (v - m)).sum::<f64>();
        DecisionTree {
            nodes: vec![
                node(split(1, 4), m, 8, root_sse),
                node(split(2, 3), 0.505, 4, 4.0 * 0.005 * 0.005),
                node(NodeKind::Leaf, 0.50, 2, 0.0),
                node(NodeKind::Leaf, 0.51, 2, 0.0),
                node(split(5, 6), 0.5, 4, 1.0),
                node(NodeKind::Leaf, 0.0, 2, 0.0),
                node(NodeKind::Leaf, 1.0, 2, 0.0),
            ],
        }
    }

    #[test]
    fn zero_alpha_is_identity() {
        let t = sample_tree();
        assert_eq!(prune_ccp(&t, 0.0), t);
    }

    #[test]
    fn infinite_alpha_leaves_the_root() {
        let t = prune_ccp(&sample_tree(), f64::INFINITY);
        assert_eq!(t.nodes.len(), 1);
        assert!((t.nodes[0].value[0] - 0.5025).abs() < 1e-12);
    }

    #[test]
    fn near_equal_subtree_collapses_first() {
        // weakest link: (4·0.005² − 0) / 8 / 1 = 1.25e-5
        let t = prune_ccp(&sample_tree(), 0.01);
        assert_eq!(t.leaf_count(), 3);
        let values: Vec<f64> = t.leaves().iter().map(|&l| t.nodes[l].value[0]).collect();
        assert_eq!(values, vec![0.505, 0.0, 1.0]);
        assert_eq!(prune_ccp(&sample_tree(), 1.2e-5).leaf_count(), 4);
        assert_eq!(prune_ccp(&sample_tree(), 1.3e-5).leaf_count(), 3);
    }
}
