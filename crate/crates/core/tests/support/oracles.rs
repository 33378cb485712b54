//! Reference implementations used to check the library. Each one is the
//! most literal computation available, with no sharing of code paths.
#![allow(dead_code)]

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};

/// Exact optimum of the SVM dual
/// `max 1ᵀα − ½ αᵀQα, 0 ≤ α ≤ C, yᵀα = 0` by enumerating every assignment
/// of each variable to {lower bound, upper bound, free} and solving the
/// equality-constrained stationarity system on the free set. Returns the
/// best feasible objective and its α.
pub fn dual_qp_oracle(kernel: &DMatrix<f64>, y: &[f64], c: f64) -> (f64, Vec<f64>) {
    let n = y.len();
    let q = DMatrix::from_fn(n, n, |i, j| y[i] * y[j] * kernel[(i, j)]);
    let objective = |a: &[f64]| {
        let av = DVector::from_column_slice(a);
        av.sum() - 0.5 * (av.transpose() * &q * &av)[(0, 0)]
    };
    let mut best = (f64::NEG_INFINITY, vec![0.0; n]);
    for pattern in 0..3usize.pow(n as u32) {
        let mut code = pattern;
        let mut alpha = vec![0.0; n];
        let mut free = Vec::new();
        for (i, a) in alpha.iter_mut().enumerate() {
            match code % 3 {
                0 => *a = 0.0,
                1 => *a = c,
                _ => free.push(i),
            }
            code /= 3;
        }
        let bounded_sum: f64 = (0..n).filter(|i| !free.contains(i)).map(|i| y[i] * alpha[i]).sum();
        if free.is_empty() {
            if bounded_sum.abs() > 1e-12 {
                continue;
            }
        } else {
            let f = free.len();
            let mut m = DMatrix::zeros(f + 1, f + 1);
            let mut rhs = DVector::zeros(f + 1);
            for (r, &i) in free.iter().enumerate() {
                for (s, &j) in free.iter().enumerate() {
                    m[(r, s)] = q[(i, j)];
                }
                m[(r, f)] = y[i];
                m[(f, r)] = y[i];
                let qb: f64 = (0..n).filter(|t| !free.contains(t)).map(|t| q[(i, t)] * alpha[t]).sum();
                rhs[r] = 1.0 - qb;
            }
            rhs[f] = -bounded_sum;
            let svd = m.clone().svd(true, true);
            let Ok(sol) = svd.solve(&rhs, 1e-12) else {
                continue;
            };
            if (&m * &sol - &rhs).norm() > 1e-8 {
                continue;
            }
            if free.iter().enumerate().any(|(r, _)| sol[r] < -1e-12 || sol[r] > c + 1e-12) {
                continue;
            }
            for (r, &i) in free.iter().enumerate() {
                alpha[i] = sol[r].clamp(0.0, c);
            }
        }
        let w = objective(&alpha);
        if w > best.0 {
            best = (w, alpha);
        }
    }
    best
}

/// Dual objective `1ᵀα − ½ αᵀQα` by a literal double sum.
pub fn dual_objective(kernel: &DMatrix<f64>, y: &[f64], alpha: &[f64]) -> f64 {
    let n = y.len();
    let mut quad = 0.0;
    for i in 0..n {
        for j in 0..n {
            quad += alpha[i] * alpha[j] * y[i] * y[j] * kernel[(i, j)];
        }
    }
    alpha.iter().sum::<f64>() - 0.5 * quad
}

/// Maximal KKT violation `max_{I_up} −y_t ∇_t − min_{I_low} −y_t ∇_t` of the
/// minimization form, from a freshly computed gradient.
pub fn kkt_gap(kernel: &DMatrix<f64>, y: &[f64], c: f64, alpha: &[f64]) -> f64 {
    let n = y.len();
    let grad: Vec<f64> = (0..n)
        .map(|i| (0..n).map(|j| y[i] * y[j] * kernel[(i, j)] * alpha[j]).sum::<f64>() - 1.0)
        .collect();
    let mut up = f64::NEG_INFINITY;
    let mut low = f64::INFINITY;
    for t in 0..n {
        let v = -y[t] * grad[t];
        let (pos, neg) = (y[t] > 0.0, y[t] < 0.0);
        if (pos && alpha[t] < c) || (neg && alpha[t] > 0.0) {
            up = up.max(v);
        }
        if (pos && alpha[t] > 0.0) || (neg && alpha[t] < c) {
            low = low.min(v);
        }
    }
    (up - low).max(0.0)
}

pub fn rbf_dense(x: &[f64], z: &[f64], sigma: f64) -> f64 {
    let d2: f64 = x.iter().zip(z).map(|(a, b)| (a - b) * (a - b)).sum();
    (-d2 / (2.0 * sigma * sigma)).exp()
}

pub fn linear_dense(x: &[f64], z: &[f64]) -> f64 {
    x.iter().zip(z).map(|(a, b)| a * b).sum()
}

pub fn gram(points: &[Vec<f64>], k: impl Fn(&[f64], &[f64]) -> f64) -> DMatrix<f64> {
    let n = points.len();
    DMatrix::from_fn(n, n, |i, j| k(&points[i], &points[j]))
}

/// Platt negative log-likelihood by the textbook formula.
pub fn platt_nll(values: &[f64], labels: &[i8], a: f64, b: f64) -> f64 {
    let pos = labels.iter().filter(|&&l| l > 0).count() as f64;
    let neg = labels.len() as f64 - pos;
    let (hi, lo) = ((pos + 1.0) / (pos + 2.0), 1.0 / (neg + 2.0));
    values
        .iter()
        .zip(labels)
        .map(|(f, &l)| {
            let t = if l > 0 { hi } else { lo };
            let p = 1.0 / (1.0 + (a * f + b).exp());
            -(t * p.ln() + (1.0 - t) * (1.0 - p).ln())
        })
        .sum()
}

/// Grid search for the Platt minimum: a coarse pass over a wide box, then a
/// pass at resolution 1e-3 around the coarse winner. The objective is convex,
/// so the refined cell contains the global minimum.
pub fn platt_grid_oracle(values: &[f64], labels: &[i8]) -> (f64, f64, f64) {
    let mut best = (f64::INFINITY, 0.0, 0.0);
    let scan = |a0: f64, a1: f64, b0: f64, b1: f64, step: f64, best: &mut (f64, f64, f64)| {
        let na = ((a1 - a0) / step).round() as i64;
        let nb = ((b1 - b0) / step).round() as i64;
        for i in 0..=na {
            let a = a0 + i as f64 * step;
            for j in 0..=nb {
                let b = b0 + j as f64 * step;
                let v = platt_nll(values, labels, a, b);
                if v < best.0 {
                    *best = (v, a, b);
                }
            }
        }
    };
    scan(-20.0, 20.0, -20.0, 20.0, 0.1, &mut best);
    let (_, a, b) = best;
    scan(a - 0.1, a + 0.1, b - 0.1, b + 0.1, 1e-3, &mut best);
    best
}

/// TF-IDF weights by counting over the corpus directly for every token of
/// the document. Returns `token → weight` before normalization.
pub fn tfidf_oracle(corpus: &[Vec<String>], doc: &[String], additive: bool) -> BTreeMap<String, f64> {
    let n = corpus.len() as f64;
    let mut out = BTreeMap::new();
    for token in doc {
        let df = corpus.iter().filter(|d| d.contains(token)).count() as f64;
        if df == 0.0 {
            continue;
        }
        let tf = doc.iter().filter(|t| *t == token).count() as f64;
        let w = if additive {
            tf + (n / df).ln()
        } else {
            tf * (((1.0 + n) / (1.0 + df)).ln() + 1.0)
        };
        out.insert(token.clone(), w);
    }
    out
}

/// Trailing-window mean and population std, recomputed from scratch at
/// every position.
pub fn naive_rolling(values: &[f64], w: usize) -> (Vec<Option<f64>>, Vec<Option<f64>>) {
    let mut means = Vec::new();
    let mut stds = Vec::new();
    for d in 0..values.len() {
        if d + 1 < w {
            means.push(None);
            stds.push(None);
            continue;
        }
        let win = &values[d + 1 - w..=d];
        let m = win.iter().sum::<f64>() / w as f64;
        let v = win.iter().map(|x| (x - m).powi(2)).sum::<f64>() / w as f64;
        means.push(Some(m));
        stds.push(Some(v.sqrt()));
    }
    (means, stds)
}
