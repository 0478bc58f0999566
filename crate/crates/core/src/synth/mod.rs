//! Seeded synthetic benchmarks: formula-labeled Erdős–Rényi graphs and
//! BAMultiShapes-style Barabási–Albert graphs with attached motifs.
//!
//! Every graph `i` draws from its own stream derived from `(seed, i)`, so
//! the output does not depend on thread count or generation order.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::graph::{Dataset, FeatureMatrix, Graph, LabeledGraph};
use crate::logic::{eval_graph, parse_formula, render_formula, Formula};
use crate::{par, rng, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShapeKind {
    Wheel,
    House,
    Grid,
}

impl ShapeKind {
    pub const ALL: [ShapeKind; 3] = [ShapeKind::Wheel, ShapeKind::House, ShapeKind::Grid];

    pub fn node_count(self) -> usize {
        match self {
            ShapeKind::Wheel => 6,
            ShapeKind::House => 5,
            ShapeKind::Grid => 9,
        }
    }

    /// Edges over `0..node_count()`.
    pub fn edges(self) -> Vec<(usize, usize)> {
        match self {
            // hub 0, rim 1..=5
            ShapeKind::Wheel => (1..=5).flat_map(|i| [(0, i), (i, i % 5 + 1)]).collect(),
            // square 0-1-2-3, apex 4 over the 0-1 side
            ShapeKind::House => vec![(0, 1), (1, 2), (2, 3), (3, 0), (0, 4), (1, 4)],
            ShapeKind::Grid => {
                let id = |r: usize, c: usize| 3 * r + c;
                let mut e = Vec::new();
                for r in 0..3 {
                    for c in 0..3 {
                        if c < 2 {
                            e.push((id(r, c), id(r, c + 1)));
                        }
                        if r < 2 {
                            e.push((id(r, c), id(r + 1, c)));
                        }
                    }
                }
                e
            }
        }
    }
}

/// Edges of a Barabási–Albert graph on `n` nodes: a star on the first
/// `m + 1` nodes, then each new node links to `m` distinct existing nodes
/// picked proportionally to degree.
pub fn barabasi_albert_edges<R: Rng>(n: usize, m: usize, rng: &mut R) -> Vec<(usize, usize)> {
    assert!(m >= 1, "attachment must be positive");
    if n <= m {
        return (1..n).map(|v| (0, v)).collect();
    }
    let mut edges: Vec<(usize, usize)> = (1..=m).map(|v| (0, v)).collect();
    // every endpoint once per incident edge
    let mut repeated: Vec<usize> = edges.iter().flat_map(|&(a, b)| [a, b]).collect();
    for v in m + 1..n {
        let mut targets: Vec<usize> = Vec::with_capacity(m);
        while targets.len() < m {
            let t = repeated[rng.gen_range(0..repeated.len())];
            if !targets.contains(&t) {
                targets.push(t);
            }
        }
        for t in targets {
            edges.push((t, v));
            repeated.extend([t, v]);
        }
    }
    edges
}

fn er_graph<R: Rng>(n: usize, p: f64, rng: &mut R) -> Result<(Graph, FeatureMatrix)> {
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(p) {
                edges.push((a, b));
            }
        }
    }
    let g = Graph::from_edges(n, edges)?;
    let u1: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();
    let u = FeatureMatrix::from_columns(n, vec![vec![true; n], u1])?;
    Ok((g, u))
}

/// `count` Erdős–Rényi graphs `G(n, p)` with atoms `U0 ≡ 1` and
/// `U1 ~ Bernoulli(1/2)`, labeled 1 exactly when the graph satisfies
/// `label_formula`.
pub fn gen_er_dataset(count: usize, n: usize, p: f64, label_formula: &Formula, seed: u64) -> Result<Dataset> {
    if n == 0 {
        return Err(Error::InvalidInput("graphs need at least one node".into()));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidInput(format!("edge probability {p} outside [0, 1]")));
    }
    if label_formula.atom_bound() > 2 {
        return Err(Error::AtomOutOfRange {
            index: label_formula.atom_bound() - 1,
            columns: 2,
        });
    }
    let graphs = par::try_map_range(count, |i| {
        let mut r = rng::rng_for(seed, &[rng::STREAM_SYNTH, i as u64]);
        let (g, u) = er_graph(n, p, &mut r)?;
        let label = eval_graph(&g, &u, label_formula)? as usize;
        LabeledGraph::new(g, u, label)
    })?;
    Dataset::new(format!("er-n{n}"), graphs, 2, 2)
}

/// Base graph size and attachment of the BAMultiShapes generator.
pub const BA_NODES: usize = 40;
pub const BA_ATTACH: usize = 1;

/// Shape subsets for graph `i`: even indices get exactly two shapes
/// (class 0), odd indices one of the other five subsets (class 1), each
/// uniformly within its class.
fn shape_subset<R: Rng>(i: usize, rng: &mut R) -> Vec<ShapeKind> {
    use ShapeKind::*;
    let pairs: [&[ShapeKind]; 3] = [&[Wheel, House], &[Wheel, Grid], &[House, Grid]];
    let others: [&[ShapeKind]; 5] = [&[], &[Wheel], &[House], &[Grid], &[Wheel, House, Grid]];
    let pick = if i.is_multiple_of(2) { pairs.choose(rng) } else { others.choose(rng) };
    pick.expect("non-empty").to_vec()
}

/// One BAMultiShapes graph with the given shapes attached, each by a single
/// edge from a random shape node to a random base node.
pub fn bamultishapes_graph<R: Rng>(shapes: &[ShapeKind], rng: &mut R) -> Result<(Graph, FeatureMatrix)> {
    let mut edges = barabasi_albert_edges(BA_NODES, BA_ATTACH, rng);
    let mut n = BA_NODES;
    for &s in shapes {
        edges.extend(s.edges().into_iter().map(|(a, b)| (a + n, b + n)));
        let from = n + rng.gen_range(0..s.node_count());
        let to = rng.gen_range(0..BA_NODES);
        edges.push((from, to));
        n += s.node_count();
    }
    Ok((Graph::from_edges(n, edges)?, FeatureMatrix::ones(n, 1)))
}

/// `count` BAMultiShapes-style graphs, classes alternating 0/1 by index;
/// class 0 means exactly two shapes are attached.
pub fn gen_bamultishapes(count: usize, seed: u64) -> Result<Dataset> {
    let graphs = par::try_map_range(count, |i| {
        let mut r = rng::rng_for(seed, &[rng::STREAM_SYNTH, i as u64]);
        let shapes = shape_subset(i, &mut r);
        let label = usize::from(shapes.len() != 2);
        let (g, u) = bamultishapes_graph(&shapes, &mut r)?;
        LabeledGraph::new(g, u, label)
    })?;
    Dataset::new("bamultishapes", graphs, 2, 1)
}

/// Generator parameters, recorded next to generated data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "generator", rename_all = "snake_case")]
pub enum GeneratorSpec {
    ErdosRenyi {
        count: usize,
        nodes: usize,
        p: f64,
        formula: String,
        seed: u64,
    },
    BaMultiShapes {
        count: usize,
        seed: u64,
        base_nodes: usize,
        attach: usize,
    },
}

impl GeneratorSpec {
    pub fn erdos_renyi(count: usize, nodes: usize, p: f64, formula: &Formula, seed: u64) -> Self {
        GeneratorSpec::ErdosRenyi {
            count,
            nodes,
            p,
            formula: render_formula(formula),
            seed,
        }
    }

    pub fn bamultishapes(count: usize, seed: u64) -> Self {
        GeneratorSpec::BaMultiShapes {
            count,
            seed,
            base_nodes: BA_NODES,
            attach: BA_ATTACH,
        }
    }

    pub fn generate(&self) -> Result<Dataset> {
        match self {
            GeneratorSpec::ErdosRenyi {
                count,
                nodes,
                p,
                formula,
                seed,
            } => gen_er_dataset(*count, *nodes, *p, &parse_formula(formula)?, *seed),
            GeneratorSpec::BaMultiShapes {
                count,
                seed,
                base_nodes,
                attach,
            } => {
                if (*base_nodes, *attach) != (BA_NODES, BA_ATTACH) {
                    return Err(Error::InvalidInput(format!(
                        "only the {BA_NODES}-node, m={BA_ATTACH} base graph is supported"
                    )));
                }
                gen_bamultishapes(*count, *seed)
            }
        }
    }
}
