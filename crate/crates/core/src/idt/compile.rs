//! Formula → IDT compiler.
//!
//! A formula of depth `k` becomes `k` layers. At level `L` (counted from 1)
//! the level's targets are viewed as Boolean combinations of *guards*
//! `S φ > t` with `φ` of depth `L - 1`; any non-Boolean subformula of depth
//! below `L` is wrapped as the guard `I φ > 0`, which is equivalent to `φ`. Guard
//! children become the targets of level `L - 1`, and at level 1 they are
//! depth-0 formulas placed in the base pool. Each level's layer is a single
//! perfect tree over its `h` guards (`2^h` leaves, one per truth
//! assignment); a target's leaf set is the set of assignments satisfying it.

use std::collections::HashMap;

use super::{pool_matrix, Idt, IdtConfig, IdtLayer, LeafSet, VERSION};
use crate::graph::{FeatureMatrix, Graph};
use crate::logic::{Formula, Fraction, Modal};
use crate::tree::{ColumnKind, DecisionTree, FeatureColumn, NodeKind, Threshold, TreeNode};
use crate::{Error, Result};

/// Most guards allowed at one level (the tree has `2^h` leaves).
pub const GUARD_LIMIT: usize = 16;

/// A compiled formula: the IDT classifies graphs by `G ⊨ f` (class 1 when
/// every node satisfies `f`), and pool column `formula_index` holds the
/// node-level truth of `f`.
#[derive(Clone, Debug)]
pub struct CompiledFormula {
    pub idt: Idt,
    pub formula_index: usize,
}

impl CompiledFormula {
    pub fn eval_nodes(&self, g: &Graph, u: &FeatureMatrix) -> Result<Vec<bool>> {
        Ok(pool_matrix(&self.idt, g, u)?.column(self.formula_index).to_vec())
    }

    pub fn eval_graph(&self, g: &Graph, u: &FeatureMatrix) -> Result<bool> {
        Ok(super::idt_predict(&self.idt, g, u)? == 1)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Guard {
    modal: Modal,
    child: Formula,
    threshold: GuardThreshold,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum GuardThreshold {
    Count(u32),
    Ratio(Fraction),
}

fn wrap(f: &Formula) -> Guard {
    Guard {
        modal: Modal::Id,
        child: f.clone(),
        threshold: GuardThreshold::Count(0),
    }
}

/// Connectives are always looked through, so `¬φ` and `φ` share a guard.
fn shallow(f: &Formula, level: usize) -> bool {
    f.depth() < level && !matches!(f, Formula::Not(_) | Formula::And(..) | Formula::Or(..))
}

/// Guards of `f` at `level`, in first-occurrence order.
fn collect_guards(f: &Formula, level: usize, out: &mut Vec<Guard>) {
    if shallow(f, level) {
        let g = wrap(f);
        if !out.contains(&g) {
            out.push(g);
        }
        return;
    }
    let guard = match f {
        Formula::Not(c) => return collect_guards(c, level, out),
        Formula::And(a, b) | Formula::Or(a, b) => {
            collect_guards(a, level, out);
            return collect_guards(b, level, out);
        }
        Formula::CountGt { modal, child, n } => Guard {
            modal: *modal,
            child: (**child).clone(),
            threshold: GuardThreshold::Count(*n),
        },
        Formula::RatioGt { modal, child, p } => Guard {
            modal: *modal,
            child: (**child).clone(),
            threshold: GuardThreshold::Ratio(*p),
        },
        Formula::Atom(_) | Formula::Top => unreachable!("depth-0 formulas are wrapped"),
    };
    if !out.contains(&guard) {
        out.push(guard);
    }
}

/// Truth of `f` under a guard assignment.
fn holds(f: &Formula, level: usize, guards: &[Guard], assignment: &[bool]) -> bool {
    let lookup = |g: &Guard| assignment[guards.iter().position(|x| x == g).expect("collected")];
    if shallow(f, level) {
        return lookup(&wrap(f));
    }
    match f {
        Formula::Not(c) => !holds(c, level, guards, assignment),
        Formula::And(a, b) => holds(a, level, guards, assignment) && holds(b, level, guards, assignment),
        Formula::Or(a, b) => holds(a, level, guards, assignment) || holds(b, level, guards, assignment),
        Formula::CountGt { modal, child, n } => lookup(&Guard {
            modal: *modal,
            child: (**child).clone(),
            threshold: GuardThreshold::Count(*n),
        }),
        Formula::RatioGt { modal, child, p } => lookup(&Guard {
            modal: *modal,
            child: (**child).clone(),
            threshold: GuardThreshold::Ratio(*p),
        }),
        Formula::Atom(_) | Formula::Top => unreachable!("depth-0 formulas are wrapped"),
    }
}

fn push_unique(list: &mut Vec<Formula>, f: &Formula) {
    if !list.contains(f) {
        list.push(f.clone());
    }
}

fn blank(kind: NodeKind) -> TreeNode {
    TreeNode {
        kind,
        value: vec![0.0],
        samples: 0,
        sse: 0.0,
    }
}

/// Perfect tree testing `columns[j]` at depth `j`; returns the tree and the
/// assignment (one bool per guard) of every leaf id.
fn perfect_tree(columns: &[(FeatureColumn, Threshold)]) -> (DecisionTree, Vec<(usize, Vec<bool>)>) {
    fn build(
        columns: &[(FeatureColumn, Threshold)],
        path: &mut Vec<bool>,
        nodes: &mut Vec<TreeNode>,
        leaves: &mut Vec<(usize, Vec<bool>)>,
    ) -> usize {
        let id = nodes.len();
        nodes.push(blank(NodeKind::Leaf));
        let depth = path.len();
        if depth == columns.len() {
            leaves.push((id, path.clone()));
            return id;
        }
        path.push(false);
        let left = build(columns, path, nodes, leaves);
        path.pop();
        path.push(true);
        let right = build(columns, path, nodes, leaves);
        path.pop();
        let (column, threshold) = columns[depth];
        nodes[id].kind = NodeKind::Split {
            column,
            threshold,
            left,
            right,
        };
        id
    }
    let mut nodes = Vec::new();
    let mut leaves = Vec::new();
    build(columns, &mut Vec::new(), &mut nodes, &mut leaves);
    (DecisionTree { nodes }, leaves)
}

/// Compiles `f` into an IDT over `atom_count` node features.
pub fn compile_formula_to_idt(f: &Formula, atom_count: usize) -> Result<CompiledFormula> {
    if f.atom_bound() > atom_count {
        return Err(Error::AtomOutOfRange {
            index: f.atom_bound() - 1,
            columns: atom_count,
        });
    }
    let k = f.depth().max(1);
    // targets[L] for L in 1..=k; index 0 unused
    let mut targets: Vec<Vec<Formula>> = vec![Vec::new(); k + 1];
    targets[k] = vec![f.clone(), Formula::not(f.clone())];
    let mut guards: Vec<Vec<Guard>> = vec![Vec::new(); k + 1];
    let mut base: Vec<Formula> = Vec::new();
    for level in (1..=k).rev() {
        let mut gs = Vec::new();
        for t in &targets[level] {
            collect_guards(t, level, &mut gs);
        }
        if gs.len() > GUARD_LIMIT {
            return Err(Error::GuardLimit {
                found: gs.len(),
                limit: GUARD_LIMIT,
            });
        }
        for g in &gs {
            if level == 1 {
                push_unique(&mut base, &g.child);
            } else {
                push_unique(&mut targets[level - 1], &g.child);
            }
        }
        guards[level] = gs;
    }

    let mut index: HashMap<Formula, usize> = base.iter().enumerate().map(|(i, f)| (f.clone(), i)).collect();
    let mut next = base.len();
    let mut layers = Vec::with_capacity(k);
    for level in 1..=k {
        let gs = &guards[level];
        let columns: Vec<(FeatureColumn, Threshold)> = gs
            .iter()
            .map(|g| {
                let (kind, threshold) = match g.threshold {
                    GuardThreshold::Count(n) => (ColumnKind::Count, Threshold::Count(n)),
                    GuardThreshold::Ratio(p) => (ColumnKind::Ratio, Threshold::Ratio(p)),
                };
                let column = FeatureColumn {
                    modal: g.modal,
                    source: index[&g.child],
                    kind,
                };
                (column, threshold)
            })
            .collect();
        let (tree, leaves) = perfect_tree(&columns);
        let pool_start = next;
        let mut emitted = Vec::new();
        let mut sets = Vec::new();
        for t in &targets[level] {
            let members: Vec<usize> = leaves
                .iter()
                .filter(|(_, a)| holds(t, level, gs, a))
                .map(|(id, _)| *id)
                .collect();
            let pool_index = *index.entry(t.clone()).or_insert_with(|| {
                emitted.push(t.clone());
                next += 1;
                next - 1
            });
            sets.push(LeafSet {
                leaves: members,
                formula: t.clone(),
                pool_index,
            });
        }
        let mut modals: Vec<Modal> = Modal::ALL.iter().copied().filter(|m| gs.iter().any(|g| g.modal == *m)).collect();
        modals.dedup();
        layers.push(IdtLayer {
            pool_start,
            modals,
            trees: vec![tree],
            leaf_sets: vec![sets],
            emitted,
        });
    }

    let complement = index[&Formula::not(f.clone())];
    let leaf = |class: usize| TreeNode {
        kind: NodeKind::Leaf,
        value: (0..2).map(|c| if c == class { 1.0 } else { 0.0 }).collect(),
        samples: 0,
        sse: 0.0,
    };
    // some node fails f → class 0, otherwise class 1
    let mut root = leaf(1);
    root.kind = NodeKind::Split {
        column: FeatureColumn {
            modal: Modal::One,
            source: complement,
            kind: ColumnKind::Count,
        },
        threshold: Threshold::Count(0),
        left: 1,
        right: 2,
    };
    let final_tree = DecisionTree {
        nodes: vec![root, leaf(1), leaf(0)],
    };
    let idt = Idt {
        version: VERSION.into(),
        atom_count,
        num_classes: 2,
        base,
        layers,
        final_tree,
        config: IdtConfig::default(),
    };
    idt.validate()?;
    Ok(CompiledFormula {
        formula_index: index[f],
        idt,
    })
}
