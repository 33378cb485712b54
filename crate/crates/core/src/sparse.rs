//! Sparse real vectors with sorted indices.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseVector {
    dim: usize,
    indices: Vec<u32>,
    values: Vec<f64>,
}

impl SparseVector {
    pub fn zeros(dim: usize) -> Self {
        SparseVector {
            dim,
            indices: Vec::new(),
            values: Vec::new(),
        }
    }

    /// Builds from `(index, value)` pairs in strictly increasing index order.
    pub fn new(dim: usize, entries: Vec<(u32, f64)>) -> Result<Self> {
        let mut indices = Vec::with_capacity(entries.len());
        let mut values = Vec::with_capacity(entries.len());
        for (i, v) in entries {
            if (i as usize) >= dim {
                return Err(Error::invalid(format!("index {i} out of range for dimension {dim}")));
            }
            if indices.last().is_some_and(|&last| last >= i) {
                return Err(Error::invalid("sparse indices must be strictly increasing"));
            }
            if !v.is_finite() {
                return Err(Error::invalid(format!("non-finite weight at index {i}")));
            }
            indices.push(i);
            values.push(v);
        }
        Ok(SparseVector { dim, indices, values })
    }

    /// Builds from a dense slice, dropping exact zeros.
    pub fn from_dense(dense: &[f64]) -> Self {
        let (indices, values) = dense
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(i, v)| (i as u32, *v))
            .unzip();
        SparseVector {
            dim: dense.len(),
            indices,
            values,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == 0.0)
    }

    pub fn indices(&self) -> &[u32] {
        &self.indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.indices.iter().copied().zip(self.values.iter().copied())
    }

    pub fn get(&self, index: u32) -> f64 {
        match self.indices.binary_search(&index) {
            Ok(pos) => self.values[pos],
            Err(_) => 0.0,
        }
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for (i, v) in self.iter() {
            out[i as usize] = v;
        }
        out
    }

    pub fn norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    /// Scales to unit Euclidean norm; the zero vector is left unchanged.
    pub fn normalize(&mut self) {
        let norm = self.norm_sq().sqrt();
        if norm > 0.0 {
            for v in &mut self.values {
                *v /= norm;
            }
        }
    }

    fn check_dim(&self, other: &SparseVector) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        Ok(())
    }

    pub fn dot(&self, other: &SparseVector) -> Result<f64> {
        self.check_dim(other)?;
        let (mut a, mut b, mut acc) = (0, 0, 0.0);
        while a < self.indices.len() && b < other.indices.len() {
            match self.indices[a].cmp(&other.indices[b]) {
                std::cmp::Ordering::Less => a += 1,
                std::cmp::Ordering::Greater => b += 1,
                std::cmp::Ordering::Equal => {
                    acc += self.values[a] * other.values[b];
                    a += 1;
                    b += 1;
                }
            }
        }
        Ok(acc)
    }

    /// `‖self − other‖²`, summed term by term over the merged index set.
    pub fn squared_distance(&self, other: &SparseVector) -> Result<f64> {
        self.check_dim(other)?;
        let (mut a, mut b, mut acc) = (0, 0, 0.0);
        loop {
            let d = match (self.indices.get(a), other.indices.get(b)) {
                (None, None) => break,
                (Some(_), None) => {
                    a += 1;
                    self.values[a - 1]
                }
                (None, Some(_)) => {
                    b += 1;
                    -other.values[b - 1]
                }
                (Some(i), Some(j)) => match i.cmp(j) {
                    std::cmp::Ordering::Less => {
                        a += 1;
                        self.values[a - 1]
                    }
                    std::cmp::Ordering::Greater => {
                        b += 1;
                        -other.values[b - 1]
                    }
                    std::cmp::Ordering::Equal => {
                        a += 1;
                        b += 1;
                        self.values[a - 1] - other.values[b - 1]
                    }
                },
            };
            acc += d * d;
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn construction_rules() {
        assert!(SparseVector::new(3, vec![(0, 1.0), (2, 2.0)]).is_ok());
        assert!(SparseVector::new(3, vec![(2, 1.0), (1, 2.0)]).is_err());
        assert!(SparseVector::new(3, vec![(1, 1.0), (1, 2.0)]).is_err());
        assert!(SparseVector::new(3, vec![(3, 1.0)]).is_err());
        assert!(SparseVector::new(3, vec![(0, f64::NAN)]).is_err());
    }

    #[test]
    fn dimension_mismatch() {
        let a = SparseVector::zeros(2);
        let b = SparseVector::zeros(3);
        assert!(matches!(a.dot(&b), Err(Error::DimensionMismatch { left: 2, right: 3 })));
        assert!(a.squared_distance(&b).is_err());
    }

    fn dense_pair() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
        (1usize..12).prop_flat_map(|n| {
            let cell = prop_oneof![Just(0.0), -5.0..5.0f64];
            (prop::collection::vec(cell.clone(), n), prop::collection::vec(cell, n))
        })
    }

    proptest! {
        #[test]
        fn matches_dense_arithmetic((x, y) in dense_pair()) {
            let (sx, sy) = (SparseVector::from_dense(&x), SparseVector::from_dense(&y));
            let dot: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
            let dist: f64 = x.iter().zip(&y).map(|(a, b)| (a - b) * (a - b)).sum();
            prop_assert!((sx.dot(&sy).unwrap() - dot).abs() <= 1e-12 * (1.0 + dot.abs()));
            prop_assert!((sx.squared_distance(&sy).unwrap() - dist).abs() <= 1e-12 * (1.0 + dist));
            prop_assert_eq!(sx.squared_distance(&sx).unwrap(), 0.0);
            prop_assert_eq!(sx.to_dense(), x);
        }

        #[test]
        fn normalize_gives_unit_or_zero(x in prop::collection::vec(-3.0..3.0f64, 1..10)) {
            let mut v = SparseVector::from_dense(&x);
            v.normalize();
            let n = v.norm_sq();
            prop_assert!(v.is_zero() || (n.sqrt() - 1.0).abs() < 1e-9);
        }
    }
}
