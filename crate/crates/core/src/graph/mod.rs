//! Graphs, binary node features and labeled datasets.

mod tu;

pub use tu::{load_tu_dataset, write_tu_dataset};


use crate::{Error, Result};

/// Largest graph stored densely.
pub const MAX_NODES: usize = 4096;

/// Simple undirected graph with dense bit-row adjacency.
///
/// Neighbor lists are cached alongside the bit rows; both are built once in
/// the constructor and never mutated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    node_count: usize,
    words_per_row: usize,
    bits: Vec<u64>,
    neighbors: Vec<Vec<u32>>,
}

impl Graph {
    pub fn empty(node_count: usize) -> Result<Self> {
        Self::from_edges(node_count, std::iter::empty())
    }

    /// Builds a graph from an edge list over `0..node_count`.
    ///
    /// Duplicate edges and both orientations of one edge are merged.
    /// Self-loops and out-of-range endpoints are rejected.
    pub fn from_edges<I>(node_count: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        if node_count > MAX_NODES {
            return Err(Error::InvalidGraph(format!(
                "{node_count} nodes exceeds the dense storage limit of {MAX_NODES}"
            )));
        }
        let words_per_row = node_count.div_ceil(64).max(1);
        let mut bits = vec![0u64; words_per_row * node_count];
        for (a, b) in edges {
            if a >= node_count || b >= node_count {
                return Err(Error::InvalidGraph(format!(
                    "edge ({a}, {b}) out of range for {node_count} nodes"
                )));
            }
            if a == b {
                return Err(Error::InvalidGraph(format!("self-loop on node {a}")));
            }
            bits[a * words_per_row + b / 64] |= 1 << (b % 64);
            bits[b * words_per_row + a / 64] |= 1 << (a % 64);
        }
        let neighbors = (0..node_count)
            .map(|v| {
                let row = &bits[v * words_per_row..(v + 1) * words_per_row];
                (0..node_count)
                    .filter(|&w| row[w / 64] >> (w % 64) & 1 == 1)
                    .map(|w| w as u32)
                    .collect()
            })
            .collect();
        Ok(Graph {
            node_count,
            words_per_row,
            bits,
            neighbors,
        })
    }

    /// Builds from a full 0/1 adjacency matrix, checking symmetry and the
    /// zero diagonal.
    pub fn from_adjacency(rows: &[Vec<u8>]) -> Result<Self> {
        let n = rows.len();
        let mut edges = Vec::new();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidGraph(format!("row {i} has length {}", row.len())));
            }
            for (j, &x) in row.iter().enumerate() {
                match x {
                    0 => {}
                    1 if i == j => return Err(Error::InvalidGraph(format!("self-loop on node {i}"))),
                    1 => {
                        if rows[j][i] != 1 {
                            return Err(Error::InvalidGraph(format!("asymmetric entry ({i}, {j})")));
                        }
                        if i < j {
                            edges.push((i, j));
                        }
                    }
                    _ => return Err(Error::InvalidGraph(format!("non-binary entry at ({i}, {j})"))),
                }
            }
        }
        Self::from_edges(n, edges)
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.bits[a * self.words_per_row + b / 64] >> (b % 64) & 1 == 1
    }

    /// N(v), sorted ascending.
    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.neighbors[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.neighbors[v].len()
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Edges as `(a, b)` with `a < b`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.node_count).flat_map(move |a| {
            self.neighbors[a]
                .iter()
                .map(|&b| b as usize)
                .filter(move |&b| a < b)
                .map(move |b| (a, b))
        })
    }

    /// Dense 0/1 adjacency rows.
    pub fn adjacency(&self) -> Vec<Vec<u8>> {
        (0..self.node_count)
            .map(|a| (0..self.node_count).map(|b| self.has_edge(a, b) as u8).collect())
            .collect()
    }
}

/// Row sums of the adjacency matrix.
pub fn degree_vector(g: &Graph) -> Vec<usize> {
    (0..g.node_count()).map(|v| g.degree(v)).collect()
}

/// Binary node-by-feature matrix; column `j` is the indicator of `U_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeatureMatrix {
    rows: usize,
    cols: usize,
    // column-major
    data: Vec<bool>,
}

impl FeatureMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        FeatureMatrix {
            rows,
            cols,
            data: vec![false; rows * cols],
        }
    }

    pub fn ones(rows: usize, cols: usize) -> Self {
        FeatureMatrix {
            rows,
            cols,
            data: vec![true; rows * cols],
        }
    }

    pub fn from_columns(rows: usize, columns: Vec<Vec<bool>>) -> Result<Self> {
        let cols = columns.len();
        let mut data = Vec::with_capacity(rows * cols);
        for (j, c) in columns.into_iter().enumerate() {
            if c.len() != rows {
                return Err(Error::ShapeMismatch(format!(
                    "feature column {j} has {} entries, expected {rows}",
                    c.len()
                )));
            }
            data.extend(c);
        }
        Ok(FeatureMatrix { rows, cols, data })
    }

    /// Builds from row-major 0/1 rows.
    pub fn from_rows(rows: &[Vec<u8>], cols: usize) -> Result<Self> {
        let mut m = FeatureMatrix::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(Error::ShapeMismatch(format!("feature row {i} has {} entries", r.len())));
            }
            for (j, &x) in r.iter().enumerate() {
                match x {
                    0 => {}
                    1 => m.set(i, j, true),
                    _ => return Err(Error::InvalidInput(format!("non-binary feature at ({i}, {j})"))),
                }
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.data[col * self.rows + row]
    }

    pub fn set(&mut self, row: usize, col: usize, value: bool) {
        self.data[col * self.rows + row] = value;
    }

    pub fn column(&self, col: usize) -> &[bool] {
        &self.data[col * self.rows..(col + 1) * self.rows]
    }

    pub fn push_column(&mut self, column: Vec<bool>) -> Result<()> {
        if column.len() != self.rows {
            return Err(Error::ShapeMismatch(format!(
                "appended column has {} entries, expected {}",
                column.len(),
                self.rows
            )));
        }
        self.data.extend(column);
        self.cols += 1;
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledGraph {
    pub graph: Graph,
    pub features: FeatureMatrix,
    pub label: usize,
}

impl LabeledGraph {
    pub fn new(graph: Graph, features: FeatureMatrix, label: usize) -> Result<Self> {
        if features.rows() != graph.node_count() {
            return Err(Error::ShapeMismatch(format!(
                "feature matrix has {} rows but graph has {} nodes",
                features.rows(),
                graph.node_count()
            )));
        }
        Ok(LabeledGraph {
            graph,
            features,
            label,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dataset {
    pub name: String,
    pub graphs: Vec<LabeledGraph>,
    pub num_classes: usize,
    pub feature_count: usize,
}

impl Dataset {
    pub fn new(name: impl Into<String>, graphs: Vec<LabeledGraph>, num_classes: usize, feature_count: usize) -> Result<Self> {
        if num_classes == 0 {
            return Err(Error::InvalidInput("num_classes must be positive".into()));
        }
        for (i, g) in graphs.iter().enumerate() {
            if g.features.cols() != feature_count {
                return Err(Error::ShapeMismatch(format!(
                    "graph {i} has {} features, dataset has {feature_count}",
                    g.features.cols()
                )));
            }
            if g.label >= num_classes {
                return Err(Error::InvalidInput(format!(
                    "graph {i} has label {} but num_classes is {num_classes}",
                    g.label
                )));
            }
        }
        Ok(Dataset {
            name: name.into(),
            graphs,
            num_classes,
            feature_count,
        })
    }

    pub fn len(&self) -> usize {
        self.graphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graphs.is_empty()
    }

    pub fn labels(&self) -> Vec<usize> {
        self.graphs.iter().map(|g| g.label).collect()
    }

    /// Dataset restricted to the given graph indices, in that order.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            name: self.name.clone(),
            graphs: indices.iter().map(|&i| self.graphs[i].clone()).collect(),
            num_classes: self.num_classes,
            feature_count: self.feature_count,
        }
    }
}

/// Example graph used throughout the docs and tests: edges v0v1, v0v2, v1v3,
/// v1v2 with `U0 = (0,1,0,1)` and `U1 = (1,0,0,1)`.
pub fn example_graph() -> (Graph, FeatureMatrix) {
    let g = Graph::from_edges(4, [(0, 1), (0, 2), (1, 3), (1, 2)]).expect("valid");
    let u = FeatureMatrix::from_rows(&[vec![0, 1], vec![1, 0], vec![0, 0], vec![1, 1]], 2).expect("valid");
    (g, u)
}
