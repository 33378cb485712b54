//! Binary soft-margin SVM: kernels, SMO training, Platt calibration, scoring
//! and evaluation.

pub mod dataset;
pub mod kernel;
pub mod metrics;
pub mod model;
pub mod platt;
pub mod smo;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use dataset::{LabeledCorpus, LabeledDataset, LabeledText};
pub use kernel::{KernelKind, KernelSpec};
pub use metrics::{ConfusionMatrix, Metrics};
pub use model::{Label, SentimentScore, SvmModel};
pub use platt::{fit_platt, PlattCoefficients, PlattFit};
pub use smo::{SmoParams, SmoSolution};

use crate::error::{Error, Result};
use crate::sparse::SparseVector;

/// Kernel selection; `Scale` derives the RBF width from the training data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum KernelChoice {
    #[default]
    Scale,
    Rbf {
        sigma: f64,
    },
    Linear,
}

impl KernelChoice {
    pub fn resolve(&self, vectors: &[SparseVector]) -> Result<KernelSpec> {
        match *self {
            KernelChoice::Scale => KernelSpec::rbf_scale(vectors),
            KernelChoice::Rbf { sigma } => KernelSpec::rbf(sigma),
            KernelChoice::Linear => Ok(KernelSpec::linear()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SvmConfig {
    pub kernel: KernelChoice,
    #[serde(flatten)]
    pub smo: SmoParams,
    /// Folds for out-of-fold Platt decision values; below 2 fits on the
    /// training decision values directly.
    pub platt_folds: usize,
}

impl Default for SvmConfig {
    fn default() -> Self {
        SvmConfig {
            kernel: KernelChoice::Scale,
            smo: SmoParams::default(),
            platt_folds: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmTrainReport {
    pub kernel: KernelSpec,
    pub iterations: usize,
    pub violation: f64,
    pub objective: f64,
    pub support_vectors: usize,
    pub platt_a: f64,
    pub platt_b: f64,
    pub platt_nll: f64,
    /// `"out-of-fold"` or `"in-sample"`.
    pub platt_source: String,
}

/// Trains the classifier and fits Platt coefficients.
///
/// Platt inputs are out-of-fold decision values when every fold's training
/// side holds both classes; otherwise the full model's own decision values
/// are used and the report says so.
/// `seed` fixes the fold assignment.
pub fn train(data: &LabeledDataset, config: &SvmConfig, seed: u64) -> Result<(SvmModel, SvmTrainReport)> {
    let kernel = config.kernel.resolve(&data.vectors)?;
    let solution = smo::train(&data.vectors, &data.labels, kernel, &config.smo)?;
    let mut model = SvmModel::from_solution(&data.vectors, &data.labels, kernel, config.smo.c, &solution);

    let (values, source) = match out_of_fold_values(data, kernel, config, seed)? {
        Some(values) => (values, "out-of-fold"),
        None => (model.decision_values(&data.vectors)?, "in-sample"),
    };
    let platt = fit_platt(&values, &data.labels)?;
    model.set_platt(platt.coefficients);
    let report = SvmTrainReport {
        kernel,
        iterations: solution.iterations,
        violation: solution.violation,
        objective: solution.objective,
        support_vectors: model.support_vectors().len(),
        platt_a: platt.coefficients.a,
        platt_b: platt.coefficients.b,
        platt_nll: platt.nll,
        platt_source: source.into(),
    };
    Ok((model, report))
}

fn out_of_fold_values(
    data: &LabeledDataset,
    kernel: KernelSpec,
    config: &SvmConfig,
    seed: u64,
) -> Result<Option<Vec<f64>>> {
    let k = config.platt_folds;
    if k < 2 || data.len() < 2 * k {
        return Ok(None);
    }
    let folds = dataset::stratified_folds(&data.labels, k, seed);
    let mut values = vec![0.0; data.len()];
    for f in 0..k {
        let train_idx: Vec<usize> = (0..data.len()).filter(|&i| folds[i] != f).collect();
        let held_out: Vec<usize> = (0..data.len()).filter(|&i| folds[i] == f).collect();
        let part = data.subset(&train_idx);
        if !part.labels.contains(&1) || !part.labels.contains(&-1) {
            return Ok(None);
        }
        let sol = smo::train(&part.vectors, &part.labels, kernel, &config.smo)?;
        let fold_model = SvmModel::from_solution(&part.vectors, &part.labels, kernel, config.smo.c, &sol);
        let fold_values: Vec<f64> = held_out
            .par_iter()
            .map(|&i| fold_model.decision_value(&data.vectors[i]))
            .collect::<Result<_>>()?;
        for (i, v) in held_out.into_iter().zip(fold_values) {
            values[i] = v;
        }
    }
    Ok(Some(values))
}

pub fn evaluate(model: &SvmModel, test: &LabeledDataset) -> Result<Metrics> {
    if test.is_empty() {
        return Err(Error::invalid("evaluation set is empty"));
    }
    let predicted: Vec<i8> = test
        .vectors
        .par_iter()
        .map(|x| model.predict(x).map(|s| s.label.sign()))
        .collect::<Result<_>>()?;
    Ok(Metrics::from_confusion(ConfusionMatrix::from_labels(&test.labels, &predicted)))
}
