use crate::{Error, Result};

fn check(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::ShapeMismatch(format!("{a} predictions for {b} references")));
    }
    if a == 0 {
        return Err(Error::InvalidInput("no predictions to score".into()));
    }
    Ok(())
}

fn agreement(a: &[usize], b: &[usize]) -> Result<f64> {
    check(a.len(), b.len())?;
    Ok(a.iter().zip(b).filter(|(x, y)| x == y).count() as f64 / a.len() as f64)
}

pub fn accuracy(preds: &[usize], labels: &[usize]) -> Result<f64> {
    agreement(preds, labels)
}

/// Fraction of graphs on which a model agrees with the GNN.
pub fn fidelity(model_preds: &[usize], gnn_preds: &[usize]) -> Result<f64> {
    agreement(model_preds, gnn_preds)
}

/// Unweighted mean of per-class F1; a class with zero precision and recall
/// scores 0.
pub fn macro_f1(preds: &[usize], labels: &[usize], num_classes: usize) -> Result<f64> {
    check(preds.len(), labels.len())?;
    if num_classes == 0 {
        return Err(Error::InvalidInput("num_classes must be positive".into()));
    }
    let mut tp = vec![0usize; num_classes];
    let mut fp = vec![0usize; num_classes];
    let mut fneg = vec![0usize; num_classes];
    for (&p, &l) in preds.iter().zip(labels) {
        if p >= num_classes || l >= num_classes {
            return Err(Error::InvalidInput(format!("class {} out of range", p.max(l))));
        }
        if p == l {
            tp[p] += 1;
        } else {
            fp[p] += 1;
            fneg[l] += 1;
        }
    }
    let total: f64 = (0..num_classes)
        .map(|c| {
            // F1 = 2tp / (2tp + fp + fn), which is 0 exactly when P + R = 0
            let denom = 2 * tp[c] + fp[c] + fneg[c];
            if tp[c] == 0 {
                0.0
            } else {
                2.0 * tp[c] as f64 / denom as f64
            }
        })
        .sum();
    Ok(total / num_classes as f64)
}

/// Mean and population standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}
