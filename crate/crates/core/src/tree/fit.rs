use serde::{Deserialize, Serialize};

use super::table::{Cell, ColumnKind, FeatureColumn, FeatureTable, Threshold};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum NodeKind {
    Leaf,
    Split {
        column: FeatureColumn,
        threshold: Threshold,
        /// child for rows failing the test
        left: usize,
        /// child for rows passing the test
        right: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeNode {
    #[serde(flatten)]
    pub kind: NodeKind,
    /// mean target of the training rows reaching this node
    pub value: Vec<f64>,
    pub samples: usize,
    /// sum of squared deviations from `value` over those rows
    pub sse: f64,
}

/// Binary tree stored as a preorder node array; node 0 is the root and
/// leaves appear left to right.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub nodes: Vec<TreeNode>,
}

#[derive(Clone, Debug)]
pub struct FitParams {
    pub max_depth: Option<usize>,
    pub min_rows_leaf: usize,
    /// Column indices the tree may split on; `None` allows all.
    pub feature_mask: Option<Vec<usize>>,
}

impl Default for FitParams {
    fn default() -> Self {
        FitParams {
            max_depth: None,
            min_rows_leaf: 1,
            feature_mask: None,
        }
    }
}

impl DecisionTree {
    pub fn leaf(value: Vec<f64>, samples: usize) -> Self {
        DecisionTree {
            nodes: vec![TreeNode {
                kind: NodeKind::Leaf,
                value,
                samples,
                sse: 0.0,
            }],
        }
    }

    /// Leaf node ids, left to right.
    pub fn leaves(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.collect_leaves(0, &mut out);
        out
    }

    fn collect_leaves(&self, id: usize, out: &mut Vec<usize>) {
        match &self.nodes[id].kind {
            NodeKind::Leaf => out.push(id),
            NodeKind::Split { left, right, .. } => {
                self.collect_leaves(*left, out);
                self.collect_leaves(*right, out);
            }
        }
    }

    pub fn leaf_count(&self) -> usize {
        self.leaves().len()
    }

    pub fn is_leaf(&self, id: usize) -> bool {
        matches!(self.nodes.get(id).map(|n| &n.kind), Some(NodeKind::Leaf))
    }

    pub fn depth(&self) -> usize {
        fn go(t: &DecisionTree, id: usize) -> usize {
            match &t.nodes[id].kind {
                NodeKind::Leaf => 0,
                NodeKind::Split { left, right, .. } => 1 + go(t, *left).max(go(t, *right)),
            }
        }
        go(self, 0)
    }

    /// Root-to-leaf path of `(split node id, went right)` pairs.
    pub fn path(&self, leaf: usize) -> Option<Vec<(usize, bool)>> {
        fn go(t: &DecisionTree, id: usize, target: usize, acc: &mut Vec<(usize, bool)>) -> bool {
            if id == target {
                return true;
            }
            if let NodeKind::Split { left, right, .. } = &t.nodes[id].kind {
                for (child, dir) in [(*left, false), (*right, true)] {
                    acc.push((id, dir));
                    if go(t, child, target, acc) {
                        return true;
                    }
                    acc.pop();
                }
            }
            false
        }
        let mut acc = Vec::new();
        go(self, 0, leaf, &mut acc).then_some(acc)
    }

    /// Routes a row, given as a column lookup, to its leaf id.
    pub fn route<F>(&self, mut lookup: F) -> Result<usize>
    where
        F: FnMut(&FeatureColumn) -> Option<Cell>,
    {
        let mut id = 0;
        loop {
            match &self.nodes[id].kind {
                NodeKind::Leaf => return Ok(id),
                NodeKind::Split {
                    column,
                    threshold,
                    left,
                    right,
                } => {
                    let cell = lookup(column)
                        .ok_or_else(|| Error::InvalidInput(format!("row lacks column {column:?}")))?;
                    id = if threshold.passes(cell) { *right } else { *left };
                }
            }
        }
    }

    /// Split columns used anywhere in the tree.
    pub fn split_columns(&self) -> Vec<FeatureColumn> {
        self.nodes
            .iter()
            .filter_map(|n| match &n.kind {
                NodeKind::Split { column, .. } => Some(*column),
                NodeKind::Leaf => None,
            })
            .collect()
    }

    /// Rebuilds the node array in preorder from the root, dropping
    /// unreachable nodes. Returns the old-to-new id map.
    pub(crate) fn compact_nodes(&mut self) -> Vec<Option<usize>> {
        let mut map = vec![None; self.nodes.len()];
        let mut out = Vec::with_capacity(self.nodes.len());
        fn go(t: &DecisionTree, id: usize, out: &mut Vec<TreeNode>, map: &mut [Option<usize>]) -> usize {
            let new_id = out.len();
            map[id] = Some(new_id);
            out.push(t.nodes[id].clone());
            if let NodeKind::Split { left, right, .. } = &t.nodes[id].kind {
                let l = go(t, *left, out, map);
                let r = go(t, *right, out, map);
                if let NodeKind::Split { left, right, .. } = &mut out[new_id].kind {
                    *left = l;
                    *right = r;
                }
            }
            new_id
        }
        go(self, 0, &mut out, &mut map);
        self.nodes = out;
        map
    }
}

/// Routes a row (cells indexed by table column) and returns the leaf's
/// prediction vector.
pub fn tree_predict(tree: &DecisionTree, table: &FeatureTable, row: &[Cell]) -> Result<Vec<f64>> {
    let leaf = tree.route(|c| table.column_index(c).and_then(|i| row.get(i).copied()))?;
    Ok(tree.nodes[leaf].value.clone())
}

struct Stats {
    n: usize,
    sum: Vec<f64>,
    sumsq: Vec<f64>,
}

impl Stats {
    fn new(dim: usize) -> Self {
        Stats {
            n: 0,
            sum: vec![0.0; dim],
            sumsq: vec![0.0; dim],
        }
    }

    fn add(&mut self, y: &[f64]) {
        self.n += 1;
        for (d, &v) in y.iter().enumerate() {
            self.sum[d] += v;
            self.sumsq[d] += v * v;
        }
    }

    fn sse(&self) -> f64 {
        if self.n == 0 {
            return 0.0;
        }
        let n = self.n as f64;
        self.sum
            .iter()
            .zip(&self.sumsq)
            .map(|(s, q)| (q - s * s / n).max(0.0))
            .sum()
    }

    fn sse_of_complement(&self, total: &Stats) -> f64 {
        let n = (total.n - self.n) as f64;
        if n == 0.0 {
            return 0.0;
        }
        total
            .sum
            .iter()
            .zip(&self.sum)
            .zip(total.sumsq.iter().zip(&self.sumsq))
            .map(|((ts, s), (tq, q))| {
                let s = ts - s;
                let q = tq - q;
                (q - s * s / n).max(0.0)
            })
            .sum()
    }
}

/// Exact node statistics by a two-pass mean/deviation computation.
fn node_summary(table: &FeatureTable, rows: &[u32]) -> (Vec<f64>, f64) {
    let dim = table.target_dim();
    let mut mean = vec![0.0; dim];
    for &r in rows {
        for (m, v) in mean.iter_mut().zip(table.target(r as usize)) {
            *m += v;
        }
    }
    let n = rows.len().max(1) as f64;
    for m in &mut mean {
        *m /= n;
    }
    let sse = rows
        .iter()
        .map(|&r| {
            table
                .target(r as usize)
                .iter()
                .zip(&mean)
                .map(|(v, m)| (v - m) * (v - m))
                .sum::<f64>()
        })
        .sum();
    (mean, sse)
}

#[derive(Clone, Debug)]
pub(crate) struct SplitChoice {
    pub column: usize,
    pub threshold: Threshold,
    pub gain: f64,
}

/// Tolerance under which two gains count as tied and a gain counts as zero.
pub(crate) fn gain_tolerance(node_sse: f64) -> f64 {
    1e-9 * (1.0 + node_sse)
}

/// Best `(column, threshold)` on the given rows. `member` flags node rows.
/// Ties go to the lowest column index, then the lowest threshold.
pub(crate) fn best_split(
    table: &FeatureTable,
    rows: &[u32],
    member: &[bool],
    columns: &[usize],
    min_rows_leaf: usize,
    node_sse: f64,
) -> Option<SplitChoice> {
    let dim = table.target_dim();
    let mut total = Stats::new(dim);
    for &r in rows {
        total.add(table.target(r as usize));
    }
    let tol = gain_tolerance(node_sse);
    let mut best: Option<SplitChoice> = None;
    let mut node_rows: Vec<u32> = Vec::with_capacity(rows.len());
    for &c in columns {
        let kind = table.columns[c].kind;
        node_rows.clear();
        node_rows.extend(table.order(c).iter().copied().filter(|&r| member[r as usize]));
        let mut left = Stats::new(dim);
        for i in 0..node_rows.len().saturating_sub(1) {
            let r = node_rows[i] as usize;
            left.add(table.target(r));
            let here = table.cell(r, c);
            let next = table.cell(node_rows[i + 1] as usize, c);
            if here.cmp_as(next, kind).is_eq() {
                continue;
            }
            if left.n < min_rows_leaf || total.n - left.n < min_rows_leaf {
                continue;
            }
            let gain = node_sse - left.sse() - left.sse_of_complement(&total);
            if gain <= tol {
                continue;
            }
            if best.as_ref().is_some_and(|b| gain <= b.gain + tol) {
                continue;
            }
            let threshold = match kind {
                ColumnKind::Count => Threshold::Count((here.count + next.count) / 2),
                ColumnKind::Ratio => Threshold::Ratio(here.ratio().midpoint(next.ratio())),
            };
            best = Some(SplitChoice {
                column: c,
                threshold,
                gain,
            });
        }
    }
    best
}

/// Greedy top-down induction minimizing the summed per-dimension squared
/// error of the targets.
pub fn fit_tree(table: &FeatureTable, params: &FitParams) -> Result<DecisionTree> {
    if table.rows() == 0 {
        return Err(Error::InvalidInput("cannot fit a tree on an empty table".into()));
    }
    if table.target_dim() == 0 {
        return Err(Error::InvalidInput("table has no targets".into()));
    }
    let columns: Vec<usize> = match &params.feature_mask {
        Some(mask) => {
            if let Some(&bad) = mask.iter().find(|&&c| c >= table.columns.len()) {
                return Err(Error::InvalidInput(format!("feature mask column {bad} out of range")));
            }
            let mut m = mask.clone();
            m.sort_unstable();
            m.dedup();
            m
        }
        None => (0..table.columns.len()).collect(),
    };
    let min_rows_leaf = params.min_rows_leaf.max(1);
    let mut tree = DecisionTree { nodes: Vec::new() };
    let mut member = vec![false; table.rows()];
    let rows: Vec<u32> = (0..table.rows() as u32).collect();
    grow(table, &columns, params.max_depth, min_rows_leaf, &mut tree, &mut member, rows, 0);
    Ok(tree)
}

#[allow(clippy::too_many_arguments)]
fn grow(
    table: &FeatureTable,
    columns: &[usize],
    max_depth: Option<usize>,
    min_rows_leaf: usize,
    tree: &mut DecisionTree,
    member: &mut [bool],
    rows: Vec<u32>,
    depth: usize,
) -> usize {
    let (value, sse) = node_summary(table, &rows);
    let id = tree.nodes.len();
    tree.nodes.push(TreeNode {
        kind: NodeKind::Leaf,
        value,
        samples: rows.len(),
        sse,
    });
    let can_split = max_depth.is_none_or(|d| depth < d)
        && rows.len() >= 2 * min_rows_leaf
        && sse > gain_tolerance(0.0) * rows.len() as f64;
    if !can_split {
        return id;
    }
    for &r in &rows {
        member[r as usize] = true;
    }
    let choice = best_split(table, &rows, member, columns, min_rows_leaf, sse);
    for &r in &rows {
        member[r as usize] = false;
    }
    let Some(choice) = choice else { return id };
    let (right_rows, left_rows): (Vec<u32>, Vec<u32>) = rows
        .into_iter()
        .partition(|&r| choice.threshold.passes(table.cell(r as usize, choice.column)));
    let left = grow(table, columns, max_depth, min_rows_leaf, tree, member, left_rows, depth + 1);
    let right = grow(table, columns, max_depth, min_rows_leaf, tree, member, right_rows, depth + 1);
    tree.nodes[id].kind = NodeKind::Split {
        column: table.columns[choice.column],
        threshold: choice.threshold,
        left,
        right,
    };
    id
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{example_graph, FeatureMatrix, Graph};
    use crate::logic::{Formula, Modal};
    use crate::tree::build_feature_table;

    fn example_table(targets: Vec<f64>) -> FeatureTable {
        let (g, u) = example_graph();
        build_feature_table(&[(g, u)], &[Formula::Atom(0), Formula::Atom(1)], &[Modal::Id], false)
            .unwrap()
            .with_targets(targets, 1)
            .unwrap()
    }

    #[test]
    fn prefers_the_second_attribute() {
        let t = example_table(vec![0.2, 0.8, 0.9, 0.1]);
        let tree = fit_tree(&t, &FitParams { max_depth: Some(1), ..Default::default() }).unwrap();
        match &tree.nodes[0].kind {
            NodeKind::Split { column, threshold, .. } => {
                assert_eq!(column.source, 1);
                assert_eq!(column.modal, Modal::Id);
                assert_eq!(column.kind, ColumnKind::Count);
                assert_eq!(*threshold, Threshold::Count(0));
            }
            NodeKind::Leaf => panic!("expected a split"),
        }
    }

    #[test]
    fn constant_targets_give_a_leaf() {
        let t = example_table(vec![0.3; 4]);
        let tree = fit_tree(&t, &FitParams::default()).unwrap();
        assert_eq!(tree.nodes.len(), 1);
        assert!((tree.nodes[0].value[0] - 0.3).abs() < 1e-15);
    }

    #[test]
    fn perfect_split_on_two_rows() {
        let g = Graph::empty(2).unwrap();
        let u = FeatureMatrix::from_rows(&[vec![0], vec![1]], 1).unwrap();
        let t = build_feature_table(&[(g, u)], &[Formula::Atom(0)], &[Modal::Id], false)
            .unwrap()
            .with_targets(vec![0.0, 1.0], 1)
            .unwrap();
        let tree = fit_tree(&t, &FitParams::default()).unwrap();
        assert_eq!(tree.depth(), 1);
        let leaves = tree.leaves();
        assert_eq!(tree.nodes[leaves[0]].value, vec![0.0]);
        assert_eq!(tree.nodes[leaves[1]].value, vec![1.0]);
    }

    #[test]
    fn respects_min_rows_and_mask() {
        let t = example_table(vec![0.2, 0.8, 0.9, 0.1]);
        let tree = fit_tree(&t, &FitParams { min_rows_leaf: 3, ..Default::default() }).unwrap();
        assert_eq!(tree.nodes.len(), 1);
        // only U0 columns allowed
        let mask: Vec<usize> = (0..t.columns.len()).filter(|&c| t.columns[c].source == 0).collect();
        let tree = fit_tree(&t, &FitParams { feature_mask: Some(mask), ..Default::default() }).unwrap();
        assert!(tree.split_columns().iter().all(|c| c.source == 0));
        assert!(fit_tree(&t, &FitParams { feature_mask: Some(vec![99]), ..Default::default() }).is_err());
    }

    #[test]
    fn predict_routes_and_reports_missing_columns() {
        let t = example_table(vec![0.2, 0.8, 0.9, 0.1]);
        let tree = fit_tree(&t, &FitParams::default()).unwrap();
        for r in 0..4 {
            let p = tree_predict(&tree, &t, &t.row(r)).unwrap();
            assert!((p[0] - t.target(r)[0]).abs() < 1e-12);
        }
        assert!(tree_predict(&tree, &t, &[]).is_err());
        let leaf = DecisionTree::leaf(vec![4.0], 1);
        assert_eq!(tree_predict(&leaf, &t, &[]).unwrap(), vec![4.0]);
    }
}
