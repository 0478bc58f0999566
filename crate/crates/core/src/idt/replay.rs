use std::collections::HashMap;

use super::{base_columns, Idt, IdtLayer};
use crate::graph::{FeatureMatrix, Graph, LabeledGraph};
use crate::logic::Modal;
use crate::tree::{Cell, DecisionTree, FeatureColumn};
use crate::{par, Error, Result};

/// Pool matrix of one graph under construction, with cached modal counts.
pub(crate) struct PoolState<'a> {
    g: &'a Graph,
    pub pool: FeatureMatrix,
    counts: HashMap<(Modal, usize), Vec<u32>>,
    sizes: HashMap<Modal, Vec<u32>>,
}

impl<'a> PoolState<'a> {
    pub fn new(g: &'a Graph, pool: FeatureMatrix) -> Self {
        PoolState {
            g,
            pool,
            counts: HashMap::new(),
            sizes: HashMap::new(),
        }
    }

    fn prepare(&mut self, tree: &DecisionTree) -> Result<()> {
        for c in tree.split_columns() {
            if c.source >= self.pool.cols() {
                return Err(Error::InvalidInput(format!(
                    "split reads pool index {} but only {} columns exist",
                    c.source,
                    self.pool.cols()
                )));
            }
            let g = self.g;
            let pool = &self.pool;
            self.counts
                .entry((c.modal, c.source))
                .or_insert_with(|| c.modal.counts(g, pool.column(c.source)));
            self.sizes.entry(c.modal).or_insert_with(|| c.modal.sizes(g));
        }
        Ok(())
    }

    fn node_cell(&self, c: &FeatureColumn, v: usize) -> Option<Cell> {
        Some(Cell {
            count: self.counts.get(&(c.modal, c.source))?[v],
            size: self.sizes.get(&c.modal)?[v],
        })
    }

    /// Leaf reached by every node.
    pub fn route_nodes(&mut self, tree: &DecisionTree) -> Result<Vec<usize>> {
        self.prepare(tree)?;
        (0..self.g.node_count())
            .map(|v| tree.route(|c| self.node_cell(c, v)))
            .collect()
    }

    /// Appends the indicator columns of a layer's emitted formulas.
    pub fn apply_layer(&mut self, layer: &IdtLayer, producers: &[(usize, usize)]) -> Result<()> {
        if self.pool.cols() != layer.pool_start {
            return Err(Error::Invariant(format!(
                "layer expects {} pool columns, found {}",
                layer.pool_start,
                self.pool.cols()
            )));
        }
        let mut routed: Vec<Option<Vec<usize>>> = vec![None; layer.trees.len()];
        for &(t, s) in producers {
            if routed[t].is_none() {
                routed[t] = Some(self.route_nodes(&layer.trees[t])?);
            }
            let leaves = &layer.leaf_sets[t][s].leaves;
            let col = routed[t]
                .as_ref()
                .expect("routed")
                .iter()
                .map(|l| leaves.binary_search(l).is_ok())
                .collect();
            self.pool.push_column(col)?;
        }
        Ok(())
    }

    /// Leaf of the graph-level tree.
    pub fn route_graph(&self, tree: &DecisionTree) -> Result<usize> {
        let n = self.g.node_count() as u32;
        tree.route(|c| {
            if c.source >= self.pool.cols() {
                return None;
            }
            let col = self.pool.column(c.source);
            match c.modal {
                Modal::One => Some(Cell {
                    count: col.iter().filter(|&&b| b).count() as u32,
                    size: n,
                }),
                Modal::Zero => Some(Cell { count: 0, size: 0 }),
                _ => None,
            }
        })
    }
}

fn check_atoms(idt: &Idt, u: &FeatureMatrix) -> Result<()> {
    if u.cols() != idt.atom_count {
        return Err(Error::ShapeMismatch(format!(
            "model expects {} node features, input has {}",
            idt.atom_count,
            u.cols()
        )));
    }
    Ok(())
}

fn replay<'a>(idt: &Idt, g: &'a Graph, u: &FeatureMatrix, producers: &[Vec<(usize, usize)>]) -> Result<PoolState<'a>> {
    check_atoms(idt, u)?;
    if u.rows() != g.node_count() {
        return Err(Error::ShapeMismatch("feature rows differ from node count".into()));
    }
    let mut state = PoolState::new(g, base_columns(&idt.base, g, u)?);
    for (layer, prod) in idt.layers.iter().zip(producers) {
        state.apply_layer(layer, prod)?;
    }
    Ok(state)
}

fn all_producers(idt: &Idt) -> Result<Vec<Vec<(usize, usize)>>> {
    idt.layers.iter().map(|l| l.producers()).collect()
}

/// Full pool matrix of a graph (base columns, then every emitted formula).
pub fn pool_matrix(idt: &Idt, g: &Graph, u: &FeatureMatrix) -> Result<FeatureMatrix> {
    Ok(replay(idt, g, u, &all_producers(idt)?)?.pool)
}

pub fn idt_predict(idt: &Idt, g: &Graph, u: &FeatureMatrix) -> Result<usize> {
    let state = replay(idt, g, u, &all_producers(idt)?)?;
    Ok(idt.node_class(state.route_graph(&idt.final_tree)?))
}

/// Predictions for many graphs, in order.
pub fn idt_predict_all(idt: &Idt, graphs: &[LabeledGraph]) -> Result<Vec<usize>> {
    let producers = all_producers(idt)?;
    par::try_map_range(graphs.len(), |i| {
        let lg = &graphs[i];
        let state = replay(idt, &lg.graph, &lg.features, &producers)?;
        Ok(idt.node_class(state.route_graph(&idt.final_tree)?))
    })
}
