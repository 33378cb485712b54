use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::kernel::KernelSpec;
use super::platt::PlattCoefficients;
use super::smo::SmoSolution;
use crate::error::{Error, Result};
use crate::sparse::SparseVector;

pub const FORMAT: &str = "airsent-svm";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Positive,
    Negative,
}

impl Label {
    pub fn from_sign(y: i8) -> Self {
        if y > 0 {
            Label::Positive
        } else {
            Label::Negative
        }
    }

    pub fn sign(self) -> i8 {
        match self {
            Label::Positive => 1,
            Label::Negative => -1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SentimentScore {
    pub p_positive: f64,
    pub p_negative: f64,
    pub label: Label,
}

impl SentimentScore {
    /// Positive iff `p_positive > 0.5`; ties go to negative.
    pub fn from_probabilities((p_positive, p_negative): (f64, f64)) -> Self {
        SentimentScore {
            p_positive,
            p_negative,
            label: if p_positive > 0.5 {
                Label::Positive
            } else {
                Label::Negative
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SvmDocument", into = "SvmDocument")]
pub struct SvmModel {
    dim: usize,
    kernel: KernelSpec,
    c: f64,
    bias: f64,
    support_vectors: Vec<SparseVector>,
    /// `α_i · y_i` per support vector.
    dual_coefficients: Vec<f64>,
    platt: Option<PlattCoefficients>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SvmDocument {
    format: String,
    version: u32,
    dim: usize,
    kernel: KernelSpec,
    c: f64,
    bias: f64,
    platt: Option<PlattCoefficients>,
    support_vectors: Vec<SparseVector>,
    dual_coefficients: Vec<f64>,
}

impl From<SvmModel> for SvmDocument {
    fn from(m: SvmModel) -> Self {
        SvmDocument {
            format: FORMAT.into(),
            version: VERSION,
            dim: m.dim,
            kernel: m.kernel,
            c: m.c,
            bias: m.bias,
            platt: m.platt,
            support_vectors: m.support_vectors,
            dual_coefficients: m.dual_coefficients,
        }
    }
}

impl TryFrom<SvmDocument> for SvmModel {
    type Error = Error;

    fn try_from(d: SvmDocument) -> Result<Self> {
        let corrupt = |message: String| Error::Corrupt {
            kind: "svm model",
            message,
        };
        if d.format != FORMAT {
            return Err(corrupt(format!("unexpected format tag {:?}", d.format)));
        }
        if d.version != VERSION {
            return Err(Error::UnsupportedVersion {
                kind: "svm model",
                found: d.version,
                expected: VERSION,
            });
        }
        d.kernel.validate()?;
        if d.support_vectors.len() != d.dual_coefficients.len() {
            return Err(corrupt("support vector and coefficient counts differ".into()));
        }
        if let Some(sv) = d.support_vectors.iter().find(|v| v.dim() != d.dim) {
            return Err(corrupt(format!("support vector of dimension {} in a {}-dimensional model", sv.dim(), d.dim)));
        }
        if d.dual_coefficients.iter().any(|a| *a == 0.0 || a.abs() > d.c * (1.0 + 1e-12)) {
            return Err(corrupt("dual coefficient outside (0, C]".into()));
        }
        if !d.bias.is_finite() {
            return Err(corrupt("non-finite bias".into()));
        }
        Ok(SvmModel {
            dim: d.dim,
            kernel: d.kernel,
            c: d.c,
            bias: d.bias,
            support_vectors: d.support_vectors,
            dual_coefficients: d.dual_coefficients,
            platt: d.platt,
        })
    }
}

impl SvmModel {
    /// Keeps the training points with `α > 0`.
    pub fn from_solution(
        data: &[SparseVector],
        labels: &[i8],
        kernel: KernelSpec,
        c: f64,
        solution: &SmoSolution,
    ) -> Self {
        let (support_vectors, dual_coefficients) = solution
            .alpha
            .iter()
            .enumerate()
            .filter(|(_, a)| **a > 0.0)
            .map(|(i, a)| (data[i].clone(), a * f64::from(labels[i])))
            .unzip();
        SvmModel {
            dim: data.first().map_or(0, SparseVector::dim),
            kernel,
            c,
            bias: solution.bias,
            support_vectors,
            dual_coefficients,
            platt: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kernel(&self) -> KernelSpec {
        self.kernel
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    pub fn support_vectors(&self) -> &[SparseVector] {
        &self.support_vectors
    }

    pub fn dual_coefficients(&self) -> &[f64] {
        &self.dual_coefficients
    }

    pub fn platt(&self) -> Option<PlattCoefficients> {
        self.platt
    }

    pub fn set_platt(&mut self, platt: PlattCoefficients) {
        self.platt = Some(platt);
    }

    /// `f(x) = Σ α_i y_i K(sv_i, x) + b`, summed in support-vector order.
    pub fn decision_value(&self, x: &SparseVector) -> Result<f64> {
        if x.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: x.dim(),
            });
        }
        let mut sum = 0.0;
        for (sv, coef) in self.support_vectors.iter().zip(&self.dual_coefficients) {
            sum += coef * self.kernel.eval(sv, x)?;
        }
        Ok(sum + self.bias)
    }

    pub fn decision_values(&self, xs: &[SparseVector]) -> Result<Vec<f64>> {
        xs.par_iter().map(|x| self.decision_value(x)).collect()
    }

    pub fn predict(&self, x: &SparseVector) -> Result<SentimentScore> {
        let platt = self.platt.ok_or(Error::MissingCalibration)?;
        Ok(SentimentScore::from_probabilities(platt.probabilities(self.decision_value(x)?)))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: SvmDocument = serde_json::from_str(text).map_err(|e| Error::Corrupt {
            kind: "svm model",
            message: e.to_string(),
        })?;
        SvmModel::try_from(doc)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}
