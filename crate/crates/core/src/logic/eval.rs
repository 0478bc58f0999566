use super::Formula;
use crate::graph::{FeatureMatrix, Graph};
use crate::{Error, Result};

fn check_atoms(u: &FeatureMatrix, f: &Formula) -> Result<()> {
    let bound = f.atom_bound();
    if bound > u.cols() {
        return Err(Error::AtomOutOfRange {
            index: bound - 1,
            columns: u.cols(),
        });
    }
    Ok(())
}

fn check_shape(g: &Graph, u: &FeatureMatrix) -> Result<()> {
    if u.rows() != g.node_count() {
        return Err(Error::ShapeMismatch(format!(
            "feature matrix has {} rows, graph has {} nodes",
            u.rows(),
            g.node_count()
        )));
    }
    Ok(())
}

/// Vectorized evaluation: entry `i` is true iff `(G, v_i)` satisfies `f`.
///
/// Modal comparisons compute `S·x` for the child's indicator vector `x` and
/// compare entrywise; relative comparisons divide by `|ε_S(v)|` and are false
/// on empty neighborhoods.
pub fn eval_nodes(g: &Graph, u: &FeatureMatrix, f: &Formula) -> Result<Vec<bool>> {
    check_shape(g, u)?;
    check_atoms(u, f)?;
    Ok(eval_unchecked(g, u, f))
}

fn eval_unchecked(g: &Graph, u: &FeatureMatrix, f: &Formula) -> Vec<bool> {
    let n = g.node_count();
    match f {
        Formula::Atom(j) => u.column(*j).to_vec(),
        Formula::Top => vec![true; n],
        Formula::Not(c) => eval_unchecked(g, u, c).into_iter().map(|b| !b).collect(),
        Formula::And(a, b) => {
            let mut x = eval_unchecked(g, u, a);
            for (x, y) in x.iter_mut().zip(eval_unchecked(g, u, b)) {
                *x &= y;
            }
            x
        }
        Formula::Or(a, b) => {
            let mut x = eval_unchecked(g, u, a);
            for (x, y) in x.iter_mut().zip(eval_unchecked(g, u, b)) {
                *x |= y;
            }
            x
        }
        Formula::CountGt { modal, child, n: threshold } => {
            let x = eval_unchecked(g, u, child);
            modal.counts(g, &x).into_iter().map(|c| c > *threshold).collect()
        }
        Formula::RatioGt { modal, child, p } => {
            let x = eval_unchecked(g, u, child);
            let sizes = modal.sizes(g);
            modal
                .counts(g, &x)
                .into_iter()
                .zip(sizes)
                .map(|(c, s)| p.exceeded_by(c, s))
                .collect()
        }
    }
}

/// Reference evaluator by explicit enumeration of `ε_S(v)` and recursive
/// satisfaction checks. Exponential in depth; meant as a test oracle.
pub fn eval_nodes_reference(g: &Graph, u: &FeatureMatrix, f: &Formula) -> Result<Vec<bool>> {
    check_shape(g, u)?;
    check_atoms(u, f)?;
    Ok((0..g.node_count()).map(|v| satisfies(g, u, v, f)).collect())
}

fn satisfies(g: &Graph, u: &FeatureMatrix, v: usize, f: &Formula) -> bool {
    match f {
        Formula::Atom(j) => u.get(v, *j),
        Formula::Top => true,
        Formula::Not(c) => !satisfies(g, u, v, c),
        Formula::And(a, b) => satisfies(g, u, v, a) && satisfies(g, u, v, b),
        Formula::Or(a, b) => satisfies(g, u, v, a) || satisfies(g, u, v, b),
        Formula::CountGt { modal, child, n } => {
            let hood = modal.neighborhood(g, v);
            let k = hood.iter().filter(|&&w| satisfies(g, u, w, child)).count();
            k > *n as usize
        }
        Formula::RatioGt { modal, child, p } => {
            let hood = modal.neighborhood(g, v);
            let k = hood.iter().filter(|&&w| satisfies(g, u, w, child)).count();
            // more than p·|ε| vertices, exactly: k·den > num·|ε|
            (k as u128) * (p.den() as u128) > (p.num() as u128) * (hood.len() as u128)
        }
    }
}

/// `G ⊨ f` iff every node satisfies `f`. The empty graph satisfies every
/// formula.
pub fn eval_graph(g: &Graph, u: &FeatureMatrix, f: &Formula) -> Result<bool> {
    Ok(eval_nodes(g, u, f)?.into_iter().all(|b| b))
}
