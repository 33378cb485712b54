use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sparse::SparseVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelKind {
    Rbf,
    Linear,
}

/// `sigma` is the RBF width; the linear kernel ignores it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub kind: KernelKind,
    pub sigma: f64,
}

impl KernelSpec {
    pub fn rbf(sigma: f64) -> Result<Self> {
        let spec = KernelSpec {
            kind: KernelKind::Rbf,
            sigma,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn linear() -> Self {
        KernelSpec {
            kind: KernelKind::Linear,
            sigma: 1.0,
        }
    }

    /// RBF kernel with `γ = 1 / (n_features · var(X))`, the variance taken
    /// over every cell of the dense `n × n_features` matrix. `σ` follows from
    /// `γ = 1 / (2σ²)`.
    pub fn rbf_scale(vectors: &[SparseVector]) -> Result<Self> {
        let dim = vectors.first().map_or(0, SparseVector::dim);
        let cells = (vectors.len() * dim) as f64;
        if cells == 0.0 {
            return Err(Error::invalid("cannot derive a kernel width from an empty design matrix"));
        }
        let sum: f64 = vectors.iter().flat_map(|v| v.values()).sum();
        let mean = sum / cells;
        let mut ss = 0.0;
        let mut nnz = 0usize;
        for v in vectors {
            for x in v.values() {
                ss += (x - mean) * (x - mean);
            }
            nnz += v.nnz();
        }
        ss += (cells - nnz as f64) * mean * mean;
        let var = ss / cells;
        if var.is_nan() || var <= 0.0 {
            return Err(Error::ZeroVariance);
        }
        let gamma = 1.0 / (dim as f64 * var);
        Self::rbf((1.0 / (2.0 * gamma)).sqrt())
    }

    pub fn gamma(&self) -> f64 {
        1.0 / (2.0 * self.sigma * self.sigma)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::invalid(format!("kernel sigma must be positive, got {}", self.sigma)));
        }
        Ok(())
    }

    pub fn eval(&self, x: &SparseVector, y: &SparseVector) -> Result<f64> {
        match self.kind {
            KernelKind::Rbf => Ok((-x.squared_distance(y)? * self.gamma()).exp()),
            KernelKind::Linear => x.dot(y),
        }
    }
}
