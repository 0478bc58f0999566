use std::fmt;

use serde::{Deserialize, Serialize};

use crate::graph::Graph;

/// Neighborhood selector `S`; node `v` is mapped to the vertex set `ε_S(v)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Modal {
    /// `ε(v) = ∅`
    Zero,
    /// `ε(v) = V`
    One,
    /// `ε(v) = {v}`
    Id,
    /// `ε(v) = N(v)`
    Adj,
    /// `ε(v) = V \ {v}`
    OneMinusId,
    /// `ε(v) = V \ N(v)`
    OneMinusAdj,
    /// `ε(v) = {v} ∪ N(v)`
    IdPlusAdj,
    /// `ε(v) = V \ ({v} ∪ N(v))`
    OneMinusIdMinusAdj,
}

impl Modal {
    pub const ALL: [Modal; 8] = [
        Modal::Zero,
        Modal::One,
        Modal::Id,
        Modal::Adj,
        Modal::OneMinusId,
        Modal::OneMinusAdj,
        Modal::IdPlusAdj,
        Modal::OneMinusIdMinusAdj,
    ];

    /// Modals used by intermediate layers (local neighborhood only).
    pub const LOCAL: [Modal; 3] = [Modal::Id, Modal::Adj, Modal::IdPlusAdj];

    pub fn symbol(self) -> &'static str {
        match self {
            Modal::Zero => "0",
            Modal::One => "1",
            Modal::Id => "I",
            Modal::Adj => "A",
            Modal::OneMinusId => "1-I",
            Modal::OneMinusAdj => "1-A",
            Modal::IdPlusAdj => "I+A",
            Modal::OneMinusIdMinusAdj => "1-I-A",
        }
    }

    /// True when the count is the same for every node of a graph.
    pub fn is_global(self) -> bool {
        matches!(self, Modal::Zero | Modal::One)
    }

    /// `|ε_S(v)|` for every node.
    pub fn sizes(self, g: &Graph) -> Vec<u32> {
        let n = g.node_count() as u32;
        (0..g.node_count())
            .map(|v| {
                let d = g.degree(v) as u32;
                match self {
                    Modal::Zero => 0,
                    Modal::One => n,
                    Modal::Id => 1,
                    Modal::Adj => d,
                    Modal::OneMinusId => n - 1,
                    Modal::OneMinusAdj => n - d,
                    Modal::IdPlusAdj => d + 1,
                    Modal::OneMinusIdMinusAdj => n - d - 1,
                }
            })
            .collect()
    }

    /// Matrix-vector product `S·x` for an indicator vector `x`: entry `v` is
    /// the number of `w ∈ ε_S(v)` with `x[w]`. The all-ones family uses the
    /// global count instead of materializing the matrix.
    pub fn counts(self, g: &Graph, x: &[bool]) -> Vec<u32> {
        debug_assert_eq!(x.len(), g.node_count());
        let total = x.iter().filter(|&&b| b).count() as u32;
        let adj = |v: usize| g.neighbors(v).iter().filter(|&&w| x[w as usize]).count() as u32;
        (0..g.node_count())
            .map(|v| {
                let own = x[v] as u32;
                match self {
                    Modal::Zero => 0,
                    Modal::One => total,
                    Modal::Id => own,
                    Modal::Adj => adj(v),
                    Modal::OneMinusId => total - own,
                    Modal::OneMinusAdj => total - adj(v),
                    Modal::IdPlusAdj => own + adj(v),
                    Modal::OneMinusIdMinusAdj => total - own - adj(v),
                }
            })
            .collect()
    }

    /// Explicit `ε_S(v)` by enumeration over `V`. Used by the reference
    /// evaluator only.
    pub fn neighborhood(self, g: &Graph, v: usize) -> Vec<usize> {
        (0..g.node_count())
            .filter(|&w| {
                let is_self = w == v;
                let is_adj = g.has_edge(v, w);
                match self {
                    Modal::Zero => false,
                    Modal::One => true,
                    Modal::Id => is_self,
                    Modal::Adj => is_adj,
                    Modal::OneMinusId => !is_self,
                    Modal::OneMinusAdj => !is_adj,
                    Modal::IdPlusAdj => is_self || is_adj,
                    Modal::OneMinusIdMinusAdj => !is_self && !is_adj,
                }
            })
            .collect()
    }
}

impl fmt::Display for Modal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::example_graph;

    #[test]
    fn adjacency_count_vector() {
        let (g, u) = example_graph();
        assert_eq!(Modal::Adj.counts(&g, u.column(1)), vec![0, 2, 1, 0]);
        assert_eq!(Modal::Id.counts(&g, u.column(0)), vec![0, 1, 0, 1]);
    }

    #[test]
    fn partition_identities() {
        let (g, _) = example_graph();
        let n = g.node_count() as u32;
        for v in 0..4 {
            let s = |m: Modal| m.sizes(&g)[v];
            assert_eq!(s(Modal::Id) + s(Modal::OneMinusId), n);
            assert_eq!(s(Modal::IdPlusAdj) + s(Modal::OneMinusIdMinusAdj), n);
            assert_eq!(s(Modal::Adj) as usize, g.degree(v));
            for m in Modal::ALL {
                assert_eq!(m.neighborhood(&g, v).len() as u32, s(m));
            }
        }
    }
}
