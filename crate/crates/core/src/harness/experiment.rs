use std::fmt::{self, Write};

use serde::{Deserialize, Serialize};

use super::{accuracy, fidelity, macro_f1, mean_std, FoldPlan};
use crate::activation::ActivationDumps;
use crate::graph::Dataset;
use crate::idt::{class_rules, compact, idt_predict_all, learn_idt, FinalTarget, Idt, IdtConfig};
use crate::logic::render_formula;
use crate::{par, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// every layer fitted to the true labels
    True,
    /// layers fitted to GNN activations, final tree to GNN outputs
    Gnn,
    /// layers fitted to GNN activations, final tree to the true labels
    GnnTrue,
}

impl Variant {
    pub fn needs_activations(self) -> bool {
        self != Variant::True
    }

    fn final_target(self) -> FinalTarget {
        match self {
            Variant::Gnn => FinalTarget::GnnOutput,
            _ => FinalTarget::TrueLabels,
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::True => "IDT (True)",
            Variant::Gnn => "IDT (GNN)",
            Variant::GnnTrue => "IDT (GNN+True)",
        })
    }
}

#[derive(Clone, Debug, Default)]
pub struct ExperimentConfig {
    pub idt: IdtConfig,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FoldResult {
    pub fold: usize,
    pub train: usize,
    pub test: usize,
    pub accuracy: f64,
    pub macro_f1: f64,
    /// agreement with the GNN on the test fold, when predictions exist
    pub fidelity: Option<f64>,
    /// per-class rules of the compacted model
    pub rules: Vec<String>,
    #[serde(skip)]
    pub model: Option<Idt>,
    #[serde(skip)]
    pub compacted: Option<Idt>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub std: f64,
}

impl Summary {
    fn of(values: impl IntoIterator<Item = f64>) -> Summary {
        let v: Vec<f64> = values.into_iter().collect();
        let (mean, std) = mean_std(&v);
        Summary { mean, std }
    }
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.2}±{:.2}", self.mean, self.std)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VariantReport {
    pub variant: Variant,
    pub accuracy: Summary,
    pub macro_f1: Summary,
    pub fidelity: Option<Summary>,
    pub folds: Vec<FoldResult>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Report {
    pub dataset: String,
    pub graphs: usize,
    pub folds: FoldPlan,
    /// the GNN's own test-fold scores, when dumps were supplied
    pub gnn_accuracy: Option<Summary>,
    pub gnn_macro_f1: Option<Summary>,
    pub variants: Vec<VariantReport>,
}

impl Report {
    /// Table with one row per model: accuracy, macro-F1 and fidelity as
    /// mean±std over folds.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} ({} graphs, {}-fold)", self.dataset, self.graphs, self.folds.k);
        let _ = writeln!(out, "{:<16} {:>10} {:>10} {:>10}", "model", "accuracy", "macro-F1", "fidelity");
        if let (Some(a), Some(f)) = (self.gnn_accuracy, self.gnn_macro_f1) {
            let _ = writeln!(out, "{:<16} {:>10} {:>10} {:>10}", "GNN", a.to_string(), f.to_string(), "-");
        }
        for v in &self.variants {
            let fid = v.fidelity.map_or("-".to_string(), |s| s.to_string());
            let _ = writeln!(
                out,
                "{:<16} {:>10} {:>10} {:>10}",
                v.variant.to_string(),
                v.accuracy.to_string(),
                v.macro_f1.to_string(),
                fid
            );
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Cross-validates each variant on `dataset` with one shared fold plan.
///
/// `activations[f]` holds the dumps of the GNN trained for fold `f` (over
/// all graphs, in dataset order); it is required by the GNN-based variants
/// and enables the fidelity column. Folds run in parallel.
pub fn run_experiment(
    dataset: &Dataset,
    variants: &[Variant],
    plan: &FoldPlan,
    activations: Option<&[ActivationDumps]>,
    config: &ExperimentConfig,
) -> Result<Report> {
    if plan.len() != dataset.len() {
        return Err(Error::ShapeMismatch(format!(
            "fold plan covers {} graphs, dataset has {}",
            plan.len(),
            dataset.len()
        )));
    }
    if let Some(acts) = activations {
        if acts.len() != plan.k {
            return Err(Error::ShapeMismatch(format!("{} activation dumps for {} folds", acts.len(), plan.k)));
        }
        if let Some(bad) = acts.iter().position(|a| a.graphs.len() != dataset.len()) {
            return Err(Error::ShapeMismatch(format!(
                "activation dump for fold {bad} covers {} graphs, dataset has {}",
                acts[bad].graphs.len(),
                dataset.len()
            )));
        }
    } else if let Some(v) = variants.iter().find(|v| v.needs_activations()) {
        return Err(Error::InvalidInput(format!("{v} needs activation dumps")));
    }

    let labels = dataset.labels();
    let k = plan.k;
    let jobs = variants.len() * k;
    let results = par::try_map_range(jobs, |job| {
        let (vi, fold) = (job / k, job % k);
        let variant = variants[vi];
        let train = plan.train_indices(fold);
        let test = plan.test_indices(fold);
        assert!(
            train.iter().all(|&i| plan.assignment[i] != fold),
            "training set of fold {fold} contains held-out graphs"
        );
        let train_set = dataset.subset(&train);
        let test_set = dataset.subset(&test);
        let fold_acts = activations.map(|a| &a[fold]);
        let train_acts = fold_acts.filter(|_| variant.needs_activations()).map(|a| a.subset(&train));
        let model = learn_idt(&train_set, train_acts.as_ref(), variant.final_target(), &config.idt)?;
        let preds = idt_predict_all(&model, &test_set.graphs)?;
        let truth: Vec<usize> = test.iter().map(|&i| labels[i]).collect();
        let gnn: Option<Vec<usize>> = fold_acts.map(|a| test.iter().map(|&i| a.graphs[i].pred).collect());
        let compacted = compact(&model);
        Ok::<_, Error>(FoldResult {
            fold,
            train: train.len(),
            test: test.len(),
            accuracy: accuracy(&preds, &truth)?,
            macro_f1: macro_f1(&preds, &truth, dataset.num_classes)?,
            fidelity: gnn.as_deref().map(|g| fidelity(&preds, g)).transpose()?,
            rules: class_rules(&compacted)
                .into_iter()
                .map(|(c, f)| format!("class {c}: {}", render_formula(&f)))
                .collect(),
            model: Some(model),
            compacted: Some(compacted),
        })
    })?;

    let mut results = results.into_iter();
    let variants = variants
        .iter()
        .map(|&variant| {
            let folds: Vec<FoldResult> = results.by_ref().take(k).collect();
            VariantReport {
                variant,
                accuracy: Summary::of(folds.iter().map(|f| f.accuracy)),
                macro_f1: Summary::of(folds.iter().map(|f| f.macro_f1)),
                fidelity: folds
                    .iter()
                    .map(|f| f.fidelity)
                    .collect::<Option<Vec<f64>>>()
                    .map(Summary::of),
                folds,
            }
        })
        .collect();

    let gnn_scores = activations
        .map(|acts| {
            (0..k)
                .map(|fold| {
                    let test = plan.test_indices(fold);
                    let truth: Vec<usize> = test.iter().map(|&i| labels[i]).collect();
                    let preds: Vec<usize> = test.iter().map(|&i| acts[fold].graphs[i].pred).collect();
                    Ok((accuracy(&preds, &truth)?, macro_f1(&preds, &truth, dataset.num_classes)?))
                })
                .collect::<Result<Vec<(f64, f64)>>>()
        })
        .transpose()?;

    Ok(Report {
        dataset: dataset.name.clone(),
        graphs: dataset.len(),
        folds: plan.clone(),
        gnn_accuracy: gnn_scores.as_ref().map(|s| Summary::of(s.iter().map(|x| x.0))),
        gnn_macro_f1: gnn_scores.as_ref().map(|s| Summary::of(s.iter().map(|x| x.1))),
        variants,
    })
}
