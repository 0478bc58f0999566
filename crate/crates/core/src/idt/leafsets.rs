use crate::logic::{simplify, Formula};
use crate::tree::{DecisionTree, NodeKind};
use crate::{Error, Result};

/// `χ_M` for a set of leaves: the disjunction over member leaves of their
/// root-to-leaf path conjunctions, simplified. `pool` resolves split sources.
///
/// The disjunction is built factored along the tree (a subtree holding only
/// members contributes `⊤`, one without members `⊥`), which is equivalent
/// to the flat DNF and keeps formulas small.
pub fn leafset_formula(tree: &DecisionTree, members: &[usize], pool: &[Formula]) -> Result<Formula> {
    if members.is_empty() {
        return Err(Error::InvalidInput("leaf set is empty".into()));
    }
    let leaves = tree.leaves();
    if let Some(bad) = members.iter().find(|m| !leaves.contains(m)) {
        return Err(Error::InvalidInput(format!("node {bad} is not a leaf of the tree")));
    }
    let f = factored(tree, 0, members, pool)?;
    Ok(simplify(&f))
}

fn factored(tree: &DecisionTree, id: usize, members: &[usize], pool: &[Formula]) -> Result<Formula> {
    match &tree.nodes[id].kind {
        NodeKind::Leaf => Ok(if members.contains(&id) { Formula::Top } else { Formula::bottom() }),
        NodeKind::Split {
            column,
            threshold,
            left,
            right,
        } => {
            let l = factored(tree, *left, members, pool)?;
            let r = factored(tree, *right, members, pool)?;
            if l == r {
                return Ok(l);
            }
            let source = pool
                .get(column.source)
                .ok_or_else(|| Error::InvalidInput(format!("split reads unknown pool index {}", column.source)))?;
            let test = threshold.to_formula(column.modal, source.clone());
            let bottom = Formula::bottom();
            let branch = |lit: Formula, rest: Formula| if rest == Formula::Top { lit } else { Formula::and(lit, rest) };
            Ok(match (l == bottom, r == bottom) {
                (true, _) => branch(test, r),
                (_, true) => branch(Formula::not(test), l),
                _ => Formula::or(branch(Formula::not(test.clone()), l), branch(test, r)),
            })
        }
    }
}

/// Agglomerative clustering of the tree's leaves by prediction vector.
///
/// Starts from singletons (in leaf order) and repeatedly merges the two
/// clusters whose centroids (unweighted mean of member leaf predictions)
/// are closest in Euclidean distance, ties going to the lowest pair of
/// cluster indices. Returns every cluster ever formed: the `k` singletons,
/// then the `k - 1` merges in creation order, the last being all leaves.
pub fn cluster_leaf_sets(tree: &DecisionTree) -> Vec<Vec<usize>> {
    let leaves = tree.leaves();
    let mut sets: Vec<Vec<usize>> = leaves.iter().map(|&l| vec![l]).collect();
    let mut centroids: Vec<Vec<f64>> = leaves.iter().map(|&l| tree.nodes[l].value.clone()).collect();
    let mut active: Vec<usize> = (0..sets.len()).collect();
    while active.len() > 1 {
        let mut best: Option<(f64, usize, usize)> = None;
        for (ai, &a) in active.iter().enumerate() {
            for &b in &active[ai + 1..] {
                let d: f64 = centroids[a]
                    .iter()
                    .zip(&centroids[b])
                    .map(|(x, y)| (x - y) * (x - y))
                    .sum();
                if best.is_none_or(|(bd, _, _)| d < bd) {
                    best = Some((d, a, b));
                }
            }
        }
        let (_, a, b) = best.expect("two active clusters");
        let mut merged: Vec<usize> = sets[a].iter().chain(&sets[b]).copied().collect();
        merged.sort_unstable();
        let n = merged.len() as f64;
        let dim = centroids[a].len();
        let centroid = (0..dim)
            .map(|d| merged.iter().map(|&l| tree.nodes[l].value[d]).sum::<f64>() / n)
            .collect();
        active.retain(|&c| c != a && c != b);
        active.push(sets.len());
        sets.push(merged);
        centroids.push(centroid);
    }
    sets
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{render_formula, Modal};
    use crate::tree::{ColumnKind, FeatureColumn, Threshold, TreeNode};

    fn split(source: usize, n: u32, left: usize, right: usize) -> NodeKind {
        NodeKind::Split {
            column: FeatureColumn {
                modal: Modal::Adj,
                source,
                kind: ColumnKind::Count,
            },
            threshold: Threshold::Count(n),
            left,
            right,
        }
    }

    fn node(kind: NodeKind, v: f64) -> TreeNode {
        TreeNode {
            kind,
            value: vec![v],
            samples: 1,
            sse: 0.0,
        }
    }

    /// `A U1 > 0` → (left leaf | `A U1 > 1` → (middle | right)).
    pub(crate) fn layer_tree() -> DecisionTree {
        DecisionTree {
            nodes: vec![
                node(split(1, 0, 1, 2), 0.5),
                node(NodeKind::Leaf, 0.1),
                node(split(1, 1, 3, 4), 0.5),
                node(NodeKind::Leaf, 0.15),
                node(NodeKind::Leaf, 0.9),
            ],
        }
    }

    #[test]
    fn layer_formulas() {
        let t = layer_tree();
        let pool = [Formula::Atom(0), Formula::Atom(1)];
        let chi = |m: &[usize]| render_formula(&leafset_formula(&t, m, &pool).unwrap());
        assert_eq!(chi(&[1]), "A U1 = 0");
        assert_eq!(chi(&[4]), "A U1 > 1");
        assert_eq!(chi(&[1, 4]), "!(A U1 = 1)");
        assert_eq!(chi(&[3]), "A U1 = 1");
        assert_eq!(chi(&[1, 3, 4]), "T");
        assert!(leafset_formula(&t, &[2], &pool).is_err());
        assert!(leafset_formula(&t, &[], &pool).is_err());
    }

    #[test]
    fn clustering_merges_closest_first() {
        let t = layer_tree();
        assert_eq!(
            cluster_leaf_sets(&t),
            vec![vec![1], vec![3], vec![4], vec![1, 3], vec![1, 3, 4]]
        );
        let single = DecisionTree::leaf(vec![1.0], 3);
        assert_eq!(cluster_leaf_sets(&single), vec![vec![0]]);
        assert_eq!(leafset_formula(&single, &[0], &[]).unwrap(), Formula::Top);
    }
}
