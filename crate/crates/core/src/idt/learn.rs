use std::collections::HashMap;

use rand::seq::index::sample;
use serde::{Deserialize, Serialize};

use super::replay::PoolState;
use super::{cluster_leaf_sets, leafset_formula, Idt, IdtConfig, IdtLayer, LeafSet, VERSION};
use crate::activation::ActivationDumps;
use crate::graph::{Dataset, FeatureMatrix, Graph};
use crate::logic::{Formula, Modal};
use crate::tree::{fit_tree, prune_ccp, FeatureTable, FitParams};
use crate::{par, rng, Error, Result};

/// What the graph-level tree is fitted against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FinalTarget {
    /// the GNN's class scores from the activation dump
    GnnOutput,
    /// one-hot true labels
    TrueLabels,
}

#[derive(Clone, Debug)]
pub struct LayerParams {
    pub modals: Vec<Modal>,
    pub trees: usize,
    pub max_depth: Option<usize>,
    pub min_rows_leaf: usize,
    /// Fraction of columns offered to each tree; `>= 1` disables masking.
    pub feature_rate: f64,
    pub seed: u64,
    /// mixed into the per-tree seeds
    pub layer_index: u64,
}

/// Learns one node-level layer against row-major `targets` (one row of
/// width `dim` per node, graphs concatenated in order).
///
/// Emitted formulas are deduplicated against `pool_formulas` and against
/// each other; a leaf set whose formula already exists reuses that column.
pub fn learn_idt_layer(
    graphs: &[&Graph],
    pools: &[FeatureMatrix],
    pool_formulas: &[Formula],
    targets: &[f64],
    dim: usize,
    params: &LayerParams,
) -> Result<IdtLayer> {
    if params.trees == 0 {
        return Err(Error::InvalidInput("a layer needs at least one tree".into()));
    }
    let pool_refs: Vec<&FeatureMatrix> = pools.iter().collect();
    let sources: Vec<usize> = (0..pool_formulas.len()).collect();
    if pools.iter().any(|p| p.cols() != pool_formulas.len()) {
        return Err(Error::ShapeMismatch("pool matrices and pool formulas disagree".into()));
    }
    let table = FeatureTable::from_pools(graphs, &pool_refs, &sources, &params.modals, false)?
        .with_targets(targets.to_vec(), dim)?;
    let ncols = table.columns.len();
    let trees = par::try_map_range(params.trees, |t| {
        let feature_mask = (params.feature_rate < 1.0).then(|| {
            let mut r = rng::rng_for(params.seed, &[rng::STREAM_TREES, params.layer_index, t as u64]);
            let m = ((params.feature_rate * ncols as f64).round() as usize).clamp(1, ncols);
            let mut cols = sample(&mut r, ncols, m).into_vec();
            cols.sort_unstable();
            cols
        });
        fit_tree(
            &table,
            &FitParams {
                max_depth: params.max_depth,
                min_rows_leaf: params.min_rows_leaf,
                feature_mask,
            },
        )
    })?;

    let pool_start = pool_formulas.len();
    let mut known: HashMap<Formula, usize> = pool_formulas.iter().enumerate().map(|(i, f)| (f.clone(), i)).collect();
    let mut emitted = Vec::new();
    let mut leaf_sets = Vec::with_capacity(trees.len());
    for tree in &trees {
        let mut sets = Vec::new();
        for leaves in cluster_leaf_sets(tree) {
            let formula = leafset_formula(tree, &leaves, pool_formulas)?;
            let pool_index = *known.entry(formula.clone()).or_insert_with(|| {
                emitted.push(formula.clone());
                pool_start + emitted.len() - 1
            });
            sets.push(LeafSet {
                leaves,
                formula,
                pool_index,
            });
        }
        leaf_sets.push(sets);
    }
    Ok(IdtLayer {
        pool_start,
        modals: params.modals.clone(),
        trees,
        leaf_sets,
        emitted,
    })
}

fn one_hot(label: usize, classes: usize) -> impl Iterator<Item = f64> {
    (0..classes).map(move |c| if c == label { 1.0 } else { 0.0 })
}

/// Learns a full IDT.
///
/// With activations, intermediate layer `k` is fitted against the GNN's
/// node representations after `k + 1` rounds; without, every intermediate
/// layer is fitted against the one-hot graph label broadcast to all its
/// nodes, and `config.layers` sets the depth. The final graph-level tree
/// uses only the modal `1` over the whole pool and is cost-complexity
/// pruned.
pub fn learn_idt(
    dataset: &Dataset,
    activations: Option<&ActivationDumps>,
    final_target: FinalTarget,
    config: &IdtConfig,
) -> Result<Idt> {
    if dataset.is_empty() {
        return Err(Error::InvalidInput("cannot learn from an empty dataset".into()));
    }
    if let Some(a) = activations {
        if a.graphs.len() != dataset.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} activation records for {} graphs",
                a.graphs.len(),
                dataset.len()
            )));
        }
        for (i, (ga, lg)) in a.graphs.iter().zip(&dataset.graphs).enumerate() {
            if ga.nodes != lg.graph.node_count() {
                return Err(Error::ShapeMismatch(format!(
                    "graph {i}: activations cover {} nodes, graph has {}",
                    ga.nodes,
                    lg.graph.node_count()
                )));
            }
        }
    }
    if final_target == FinalTarget::GnnOutput {
        match activations {
            None => return Err(Error::InvalidInput("GNN-output final targets need activations".into())),
            Some(a) if a.num_classes != dataset.num_classes => {
                return Err(Error::ShapeMismatch(format!(
                    "activations have {} classes, dataset has {}",
                    a.num_classes, dataset.num_classes
                )))
            }
            Some(_) => {}
        }
    }
    let layer_count = activations.map_or(config.layers, |a| a.layer_count);
    let classes = dataset.num_classes;
    let atoms = dataset.feature_count;
    let graphs: Vec<&Graph> = dataset.graphs.iter().map(|g| &g.graph).collect();
    let mut pools: Vec<FeatureMatrix> = dataset.graphs.iter().map(|g| g.features.clone()).collect();
    let mut pool_formulas: Vec<Formula> = (0..atoms).map(Formula::Atom).collect();
    let base = pool_formulas.clone();

    let mut layers = Vec::with_capacity(layer_count);
    for k in 0..layer_count {
        let (targets, dim): (Vec<f64>, usize) = match activations {
            Some(a) => {
                let dim = a.dim(k);
                let t = a.graphs.iter().flat_map(|g| g.layers[k].iter().map(|&x| x as f64)).collect();
                (t, dim)
            }
            None => {
                let t = dataset
                    .graphs
                    .iter()
                    .flat_map(|g| (0..g.graph.node_count()).flat_map(move |_| one_hot(g.label, classes)))
                    .collect();
                (t, classes)
            }
        };
        let params = LayerParams {
            modals: config.intermediate_modals.clone(),
            trees: config.trees_per_layer,
            max_depth: Some(config.layer_depth),
            min_rows_leaf: config.min_rows_leaf,
            feature_rate: config.feature_rate,
            seed: config.seed,
            layer_index: k as u64,
        };
        let layer = learn_idt_layer(&graphs, &pools, &pool_formulas, &targets, dim, &params)?;
        let producers = layer.producers()?;
        pools = par::try_map_range(graphs.len(), |i| {
            let mut state = PoolState::new(graphs[i], pools[i].clone());
            state.apply_layer(&layer, &producers)?;
            Ok::<_, Error>(state.pool)
        })?;
        pool_formulas.extend(layer.emitted.iter().cloned());
        layers.push(layer);
    }

    let final_targets: Vec<f64> = match final_target {
        FinalTarget::GnnOutput => activations
            .expect("checked above")
            .graphs
            .iter()
            .flat_map(|g| g.output.iter().map(|&x| x as f64))
            .collect(),
        FinalTarget::TrueLabels => dataset.graphs.iter().flat_map(|g| one_hot(g.label, classes)).collect(),
    };
    let pool_refs: Vec<&FeatureMatrix> = pools.iter().collect();
    let sources: Vec<usize> = (0..pool_formulas.len()).collect();
    let table = FeatureTable::from_pools(&graphs, &pool_refs, &sources, &[Modal::One], true)?
        .with_targets(final_targets, classes)?;
    let tree = fit_tree(
        &table,
        &FitParams {
            max_depth: None,
            min_rows_leaf: config.final_min_rows_leaf,
            feature_mask: None,
        },
    )?;
    let final_tree = prune_ccp(&tree, config.ccp_alpha);

    let idt = Idt {
        version: VERSION.into(),
        atom_count: atoms,
        num_classes: classes,
        base,
        layers,
        final_tree,
        config: config.clone(),
    };
    debug_assert!(idt.validate().is_ok());
    Ok(idt)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{example_graph, LabeledGraph};
    use crate::logic::render_formula;

    fn params(trees: usize) -> LayerParams {
        LayerParams {
            modals: vec![Modal::Adj],
            trees,
            max_depth: Some(2),
            min_rows_leaf: 1,
            feature_rate: 1.0,
            seed: 1,
            layer_index: 0,
        }
    }

    #[test]
    fn example_layer_emits_the_expected_formulas() {
        let (g, u) = example_graph();
        // v0, v3 see no U1 neighbor, v2 one, v1 two
        let targets = [0.0, 1.0, 0.5, 0.0];
        // U1 alone, so no U0 column can tie with the count split
        let u1 = FeatureMatrix::from_columns(4, vec![u.column(1).to_vec()]).unwrap();
        let layer = learn_idt_layer(&[&g], &[u1], &[Formula::Atom(1)], &targets, 1, &params(1)).unwrap();
        let rendered: Vec<String> = layer.leaf_sets[0].iter().map(|s| render_formula(&s.formula)).collect();
        for want in ["A U1 = 0", "A U1 > 1", "A U1 = 1"] {
            assert!(rendered.iter().any(|r| r == want), "{want} missing from {rendered:?}");
        }
        assert_eq!(layer.trees[0].leaf_count(), 3);
        assert_eq!(layer.leaf_sets[0].len(), 5);
    }

    #[test]
    fn constant_targets_emit_top() {
        let (g, u) = example_graph();
        let layer = learn_idt_layer(&[&g], &[u], &[Formula::Atom(0), Formula::Atom(1)], &[0.5; 4], 1, &params(3)).unwrap();
        assert_eq!(layer.emitted, vec![Formula::Top]);
        assert!(layer.trees.iter().all(|t| t.nodes.len() == 1));
    }

    #[test]
    fn single_class_gives_a_leaf() {
        let (g, u) = example_graph();
        let ds = Dataset::new("one", vec![LabeledGraph::new(g, u, 0).unwrap(); 3], 1, 2).unwrap();
        let idt = learn_idt(&ds, None, FinalTarget::TrueLabels, &IdtConfig::default()).unwrap();
        assert_eq!(idt.final_tree.nodes.len(), 1);
        assert_eq!(idt.node_class(0), 0);
        assert!(learn_idt(&ds, None, FinalTarget::GnnOutput, &IdtConfig::default()).is_err());
    }
}
