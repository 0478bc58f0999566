use std::cmp::Ordering;
use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::graph::{FeatureMatrix, Graph};
use crate::logic::{eval_nodes, Formula, Fraction, Modal};
use crate::{par, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ColumnKind {
    /// `|{w ∈ ε_S(v) : w ⊨ source}|`
    Count,
    /// count divided by `|ε_S(v)|` (0 on empty neighborhoods)
    Ratio,
}

/// Column `S·source` of a feature table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FeatureColumn {
    pub modal: Modal,
    /// Index into the feature pool.
    pub source: usize,
    pub kind: ColumnKind,
}

/// A table entry: satisfying count and neighborhood size.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Cell {
    pub count: u32,
    pub size: u32,
}

impl Cell {
    /// Ratio value; empty neighborhoods read as 0.
    pub fn ratio(self) -> Fraction {
        if self.size == 0 {
            Fraction::new(0, 1).expect("nonzero denominator")
        } else {
            Fraction::new(self.count as u64, self.size as u64).expect("nonzero denominator")
        }
    }

    pub fn value(self, kind: ColumnKind) -> f64 {
        match kind {
            ColumnKind::Count => self.count as f64,
            ColumnKind::Ratio => self.ratio().to_f64(),
        }
    }

    pub(crate) fn cmp_as(self, other: Cell, kind: ColumnKind) -> Ordering {
        match kind {
            ColumnKind::Count => self.count.cmp(&other.count),
            ColumnKind::Ratio => {
                // empty neighborhoods read as 0/1
                let (a, b) = (self.count as u64, self.size.max(1) as u64);
                let (c, d) = (other.count as u64, other.size.max(1) as u64);
                (a * d).cmp(&(c * b))
            }
        }
    }
}

/// Split threshold; a row goes right when its value exceeds it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Threshold {
    Count(u32),
    Ratio(Fraction),
}

impl Threshold {
    pub fn passes(self, cell: Cell) -> bool {
        match self {
            Threshold::Count(n) => cell.count > n,
            Threshold::Ratio(p) => p.exceeded_by(cell.count, cell.size),
        }
    }

    /// The split test as a formula over `source`.
    pub fn to_formula(self, modal: Modal, source: Formula) -> Formula {
        match self {
            Threshold::Count(n) => Formula::count_gt(modal, source, n),
            Threshold::Ratio(p) => Formula::ratio_gt(modal, source, p),
        }
    }
}

/// Rows are nodes (or graphs), columns are modal counts/ratios over pool
/// formulas, targets are real vectors.
#[derive(Clone, Debug)]
pub struct FeatureTable {
    pub columns: Vec<FeatureColumn>,
    rows: usize,
    /// per (modal, source) pair; both kinds share one vector
    counts: Vec<Vec<u32>>,
    count_slot: Vec<usize>,
    /// per column: index into `sizes`
    size_slot: Vec<usize>,
    sizes: Vec<Vec<u32>>,
    targets: Vec<f64>,
    target_dim: usize,
    order: Vec<Vec<u32>>,
    index: HashMap<FeatureColumn, usize>,
}

/// Column layout: modals × sources × {COUNT, RATIO}.
pub fn column_layout(modals: &[Modal], sources: &[usize]) -> Vec<FeatureColumn> {
    let mut out = Vec::with_capacity(modals.len() * sources.len() * 2);
    for &modal in modals {
        for &source in sources {
            for kind in [ColumnKind::Count, ColumnKind::Ratio] {
                out.push(FeatureColumn { modal, source, kind });
            }
        }
    }
    out
}

impl FeatureTable {
    /// Builds a table from per-graph pool indicator matrices.
    ///
    /// `per_graph` collapses each graph to one row; only global modals
    /// (`0`, `1`) are allowed there since their values are node-independent.
    pub fn from_pools(
        graphs: &[&Graph],
        pools: &[&FeatureMatrix],
        sources: &[usize],
        modals: &[Modal],
        per_graph: bool,
    ) -> Result<Self> {
        if graphs.len() != pools.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} graphs but {} feature matrices",
                graphs.len(),
                pools.len()
            )));
        }
        if sources.is_empty() {
            return Err(Error::InvalidInput("feature pool is empty".into()));
        }
        if per_graph && modals.iter().any(|m| !m.is_global()) {
            return Err(Error::InvalidInput("graph-level tables only admit the modals 0 and 1".into()));
        }
        for (g, u) in graphs.iter().zip(pools) {
            if u.rows() != g.node_count() {
                return Err(Error::ShapeMismatch("pool rows differ from node count".into()));
            }
            if let Some(&s) = sources.iter().find(|&&s| s >= u.cols()) {
                return Err(Error::AtomOutOfRange {
                    index: s,
                    columns: u.cols(),
                });
            }
        }
        let columns = column_layout(modals, sources);
        let rows: usize = if per_graph {
            graphs.len()
        } else {
            graphs.iter().map(|g| g.node_count()).sum()
        };

        let sizes: Vec<Vec<u32>> = modals
            .iter()
            .map(|m| {
                graphs
                    .iter()
                    .flat_map(|g| {
                        let s = m.sizes(g);
                        if per_graph {
                            vec![match m {
                                Modal::One => g.node_count() as u32,
                                _ => 0,
                            }]
                        } else {
                            s
                        }
                    })
                    .collect()
            })
            .collect();

        // counts depend only on (modal, source); the kind shares them
        let pairs: Vec<(usize, usize)> = (0..modals.len())
            .flat_map(|mi| sources.iter().map(move |&s| (mi, s)))
            .collect();
        let pair_counts: Vec<Vec<u32>> = par::map_slice(&pairs, |&(mi, s)| {
            let m = modals[mi];
            graphs
                .iter()
                .zip(pools)
                .flat_map(|(g, u)| {
                    let x = u.column(s);
                    if per_graph {
                        let total = x.iter().filter(|&&b| b).count() as u32;
                        vec![if m == Modal::One { total } else { 0 }]
                    } else {
                        m.counts(g, x)
                    }
                })
                .collect()
        });
        let mut count_slot = Vec::with_capacity(columns.len());
        let mut size_slot = Vec::with_capacity(columns.len());
        for (pi, (mi, _)) in pairs.iter().enumerate() {
            for _ in 0..2 {
                count_slot.push(pi);
                size_slot.push(*mi);
            }
        }
        let mut table = FeatureTable {
            index: columns.iter().enumerate().map(|(i, c)| (*c, i)).collect(),
            columns,
            rows,
            counts: pair_counts,
            count_slot,
            size_slot,
            sizes,
            targets: Vec::new(),
            target_dim: 0,
            order: Vec::new(),
        };
        let order = par::map_range(table.columns.len(), |c| table.sorted_rows(c));
        table.order = order;
        Ok(table)
    }

    fn sorted_rows(&self, column: usize) -> Vec<u32> {
        let kind = self.columns[column].kind;
        let mut idx: Vec<u32> = (0..self.rows as u32).collect();
        idx.sort_by(|&a, &b| {
            self.cell(a as usize, column)
                .cmp_as(self.cell(b as usize, column), kind)
                .then(a.cmp(&b))
        });
        idx
    }

    /// Attaches row-major targets of dimension `dim`.
    pub fn with_targets(mut self, targets: Vec<f64>, dim: usize) -> Result<Self> {
        if dim == 0 || targets.len() != self.rows * dim {
            return Err(Error::ShapeMismatch(format!(
                "{} target values for {} rows of dimension {dim}",
                targets.len(),
                self.rows
            )));
        }
        if targets.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidInput("non-finite target".into()));
        }
        self.targets = targets;
        self.target_dim = dim;
        Ok(self)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn target_dim(&self) -> usize {
        self.target_dim
    }

    pub fn target(&self, row: usize) -> &[f64] {
        &self.targets[row * self.target_dim..(row + 1) * self.target_dim]
    }

    pub fn cell(&self, row: usize, column: usize) -> Cell {
        Cell {
            count: self.counts[self.count_slot[column]][row],
            size: self.sizes[self.size_slot[column]][row],
        }
    }

    pub fn value(&self, row: usize, column: usize) -> f64 {
        self.cell(row, column).value(self.columns[column].kind)
    }

    pub fn column_index(&self, column: &FeatureColumn) -> Option<usize> {
        self.index.get(column).copied()
    }

    /// Rows sorted ascending by the column's value (ties by row index).
    pub(crate) fn order(&self, column: usize) -> &[u32] {
        &self.order[column]
    }

    /// Full row of cells, in column order.
    pub fn row(&self, row: usize) -> Vec<Cell> {
        (0..self.columns.len()).map(|c| self.cell(row, c)).collect()
    }
}

/// Builds a feature table by evaluating each pool formula on each graph.
pub fn build_feature_table(
    graphs: &[(Graph, FeatureMatrix)],
    feature_pool: &[Formula],
    modals: &[Modal],
    per_graph: bool,
) -> Result<FeatureTable> {
    if feature_pool.is_empty() {
        return Err(Error::InvalidInput("feature pool is empty".into()));
    }
    let pools: Vec<FeatureMatrix> = graphs
        .iter()
        .map(|(g, u)| {
            let cols = feature_pool
                .iter()
                .map(|f| eval_nodes(g, u, f))
                .collect::<Result<Vec<_>>>()?;
            FeatureMatrix::from_columns(g.node_count(), cols)
        })
        .collect::<Result<_>>()?;
    let gs: Vec<&Graph> = graphs.iter().map(|(g, _)| g).collect();
    let ps: Vec<&FeatureMatrix> = pools.iter().collect();
    let sources: Vec<usize> = (0..feature_pool.len()).collect();
    FeatureTable::from_pools(&gs, &ps, &sources, modals, per_graph)
}
