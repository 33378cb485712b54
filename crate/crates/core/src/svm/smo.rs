//! Sequential minimal optimization for the soft-margin SVM dual
//!
//! ```text
//! min_α  ½ αᵀQα − 1ᵀα    s.t.  0 ≤ α_i ≤ C,  yᵀα = 0,    Q_ij = y_i y_j K(x_i, x_j)
//! ```
//!
//! Working pairs are chosen by the maximal-violating-pair rule on the
//! gradient `G = Qα − 1`, which is the pair with the largest error gap
//! `E_j − E_i` among pairs that can move. Ties go to the lowest index, so
//! swapping the class labels replays the same sequence of updates with
//! flipped signs. Once the violation falls below `tol`, and the free set is
//! small, the equality-constrained subproblem on the free variables is solved
//! exactly; SMO resumes if the result is not a better KKT point.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::kernel::KernelSpec;
use crate::error::{Error, Result};
use crate::sparse::SparseVector;

/// Eta floor for non-positive-definite pairs.
const TAU: f64 = 1e-12;
const POLISH_MAX_FREE: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SmoParams {
    pub c: f64,
    pub tol: f64,
    pub max_iterations: usize,
    pub cache_bytes: usize,
}

impl Default for SmoParams {
    fn default() -> Self {
        SmoParams {
            c: 1.0,
            tol: 1e-3,
            max_iterations: 10_000_000,
            cache_bytes: 256 << 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmoSolution {
    pub alpha: Vec<f64>,
    pub bias: f64,
    /// Dual objective in maximization form, `1ᵀα − ½ αᵀQα`.
    pub objective: f64,
    pub iterations: usize,
    /// Final maximal KKT violation `m(α) − M(α)`.
    pub violation: f64,
}

/// Row cache with least-recently-used eviction.
struct KernelCache<'a> {
    data: &'a [SparseVector],
    kernel: KernelSpec,
    rows: HashMap<usize, (Vec<f64>, u64)>,
    capacity: usize,
    clock: u64,
}

impl<'a> KernelCache<'a> {
    fn new(data: &'a [SparseVector], kernel: KernelSpec, cache_bytes: usize) -> Self {
        let row_bytes = (data.len() * std::mem::size_of::<f64>()).max(1);
        KernelCache {
            data,
            kernel,
            rows: HashMap::new(),
            capacity: (cache_bytes / row_bytes).max(2),
            clock: 0,
        }
    }

    fn ensure(&mut self, i: usize) {
        self.clock += 1;
        let clock = self.clock;
        if let Some(entry) = self.rows.get_mut(&i) {
            entry.1 = clock;
            return;
        }
        if self.rows.len() >= self.capacity {
            let oldest = *self
                .rows
                .iter()
                .min_by_key(|(_, (_, stamp))| *stamp)
                .map(|(k, _)| k)
                .expect("cache non-empty");
            self.rows.remove(&oldest);
        }
        let xi = &self.data[i];
        let kernel = self.kernel;
        let row: Vec<f64> = self
            .data
            .par_iter()
            .map(|xj| kernel.eval(xi, xj).expect("dimensions checked"))
            .collect();
        self.rows.insert(i, (row, clock));
    }

    /// Rows `i` and `j`, both resident.
    fn pair(&mut self, i: usize, j: usize) -> (&[f64], &[f64]) {
        self.ensure(i);
        self.ensure(j);
        (&self.rows[&i].0, &self.rows[&j].0)
    }

    fn row(&mut self, i: usize) -> &[f64] {
        self.ensure(i);
        &self.rows[&i].0
    }
}

struct State {
    y: Vec<f64>,
    alpha: Vec<f64>,
    grad: Vec<f64>,
    c: f64,
}

impl State {
    fn in_up(&self, t: usize) -> bool {
        (self.y[t] > 0.0 && self.alpha[t] < self.c) || (self.y[t] < 0.0 && self.alpha[t] > 0.0)
    }

    fn in_low(&self, t: usize) -> bool {
        (self.y[t] > 0.0 && self.alpha[t] > 0.0) || (self.y[t] < 0.0 && self.alpha[t] < self.c)
    }

    /// Maximal violating pair `(i, j, m − M)`.
    fn select(&self) -> Option<(usize, usize, f64)> {
        let mut up: Option<(usize, f64)> = None;
        let mut low: Option<(usize, f64)> = None;
        for t in 0..self.y.len() {
            let v = -self.y[t] * self.grad[t];
            if self.in_up(t) && up.is_none_or(|(_, best)| v > best) {
                up = Some((t, v));
            }
            if self.in_low(t) && low.is_none_or(|(_, best)| v < best) {
                low = Some((t, v));
            }
        }
        let ((i, m), (j, big_m)) = (up?, low?);
        Some((i, j, m - big_m))
    }

    fn violation(&self) -> f64 {
        self.select().map_or(0.0, |(_, _, gap)| gap)
    }

    fn objective(&self) -> f64 {
        -0.5 * self
            .alpha
            .iter()
            .zip(&self.grad)
            .map(|(a, g)| a * (g - 1.0))
            .sum::<f64>()
    }

    fn is_free(&self, t: usize) -> bool {
        self.alpha[t] > 0.0 && self.alpha[t] < self.c
    }

    fn bias(&self) -> f64 {
        let (mut sum, mut count) = (0.0, 0usize);
        for t in 0..self.y.len() {
            if self.is_free(t) {
                sum += self.y[t] * self.grad[t];
                count += 1;
            }
        }
        if count > 0 {
            return -sum / count as f64;
        }
        // No free vectors: b is any value in the feasible interval.
        let (mut lower, mut upper) = (f64::NEG_INFINITY, f64::INFINITY);
        for t in 0..self.y.len() {
            let v = -self.y[t] * self.grad[t];
            let at_zero = self.alpha[t] == 0.0;
            if (at_zero && self.y[t] > 0.0) || (!at_zero && self.y[t] < 0.0) {
                lower = lower.max(v);
            } else {
                upper = upper.min(v);
            }
        }
        match (lower.is_finite(), upper.is_finite()) {
            (true, true) => 0.5 * (lower + upper),
            (true, false) => lower,
            (false, true) => upper,
            (false, false) => 0.0,
        }
    }
}

/// Trains on `data` with labels in {+1, −1}.
pub fn train(
    data: &[SparseVector],
    labels: &[i8],
    kernel: KernelSpec,
    params: &SmoParams,
) -> Result<SmoSolution> {
    validate(data, labels, &kernel, params)?;
    let n = data.len();
    let mut cache = KernelCache::new(data, kernel, params.cache_bytes);
    let diag: Vec<f64> = data
        .par_iter()
        .map(|x| kernel.eval(x, x).expect("same vector"))
        .collect();
    let mut state = State {
        y: labels.iter().map(|&l| f64::from(l)).collect(),
        alpha: vec![0.0; n],
        grad: vec![-1.0; n],
        c: params.c,
    };

    let mut iterations = 0usize;
    let mut polish_attempts = 0usize;
    while let Some((i, j, gap)) = state.select() {
        if gap <= params.tol {
            if polish_attempts < 3 && polish(&mut state, &mut cache) {
                polish_attempts += 1;
                continue;
            }
            break;
        }
        if iterations >= params.max_iterations {
            return Err(Error::NotConverged {
                iterations,
                violation: gap,
            });
        }
        iterations += 1;
        step(&mut state, &mut cache, &diag, i, j);
    }

    Ok(SmoSolution {
        bias: state.bias(),
        objective: state.objective(),
        violation: state.violation(),
        iterations,
        alpha: state.alpha,
    })
}

fn validate(data: &[SparseVector], labels: &[i8], kernel: &KernelSpec, params: &SmoParams) -> Result<()> {
    kernel.validate()?;
    if data.len() != labels.len() {
        return Err(Error::invalid(format!(
            "{} vectors but {} labels",
            data.len(),
            labels.len()
        )));
    }
    if let Some(bad) = labels.iter().find(|&&l| l != 1 && l != -1) {
        return Err(Error::invalid(format!("labels must be +1 or -1, found {bad}")));
    }
    if !labels.contains(&1) || !labels.contains(&-1) {
        return Err(Error::invalid("training data must contain both classes"));
    }
    if !(params.c > 0.0 && params.c.is_finite()) {
        return Err(Error::invalid(format!("C must be positive, got {}", params.c)));
    }
    if params.tol.is_nan() || params.tol <= 0.0 {
        return Err(Error::invalid(format!("tol must be positive, got {}", params.tol)));
    }
    let dim = data[0].dim();
    if let Some(v) = data.iter().find(|v| v.dim() != dim) {
        return Err(Error::DimensionMismatch {
            left: dim,
            right: v.dim(),
        });
    }
    Ok(())
}

fn step(state: &mut State, cache: &mut KernelCache<'_>, diag: &[f64], i: usize, j: usize) {
    let (yi, yj, c) = (state.y[i], state.y[j], state.c);
    let (ki, kj) = cache.pair(i, j);
    let mut eta = diag[i] + diag[j] - 2.0 * ki[j];
    if eta <= 0.0 {
        eta = TAU;
    }
    // Move along α_i += y_i·s, α_j −= y_j·s; s > 0 decreases the objective.
    let mut s = -(yi * state.grad[i] - yj * state.grad[j]) / eta;
    let (lo_i, hi_i) = if yi > 0.0 {
        (-state.alpha[i], c - state.alpha[i])
    } else {
        (state.alpha[i] - c, state.alpha[i])
    };
    let (lo_j, hi_j) = if yj > 0.0 {
        (state.alpha[j] - c, state.alpha[j])
    } else {
        (-state.alpha[j], c - state.alpha[j])
    };
    s = s.min(hi_i).min(hi_j).max(lo_i.max(lo_j));
    let hit_i = s == hi_i || s == lo_i;
    let hit_j = s == hi_j || s == lo_j;

    let new_i = snap(state.alpha[i] + yi * s, c, hit_i);
    let new_j = snap(state.alpha[j] - yj * s, c, hit_j);
    state.alpha[i] = new_i;
    state.alpha[j] = new_j;
    let grad = &mut state.grad;
    let y = &state.y;
    grad.par_iter_mut().enumerate().for_each(|(k, g)| {
        *g += y[k] * s * (ki[k] - kj[k]);
    });
}

/// Rounds to the exact bound when the step was clipped there.
fn snap(value: f64, c: f64, clipped: bool) -> f64 {
    if clipped {
        if (value - c).abs() <= (value).abs() {
            c
        } else {
            0.0
        }
    } else {
        value.clamp(0.0, c)
    }
}

/// Solves the subproblem on the free set with bounded variables held fixed.
/// Keeps the result only if it stays in the box and does not increase the
/// KKT violation. Returns whether the state changed.
fn polish(state: &mut State, cache: &mut KernelCache<'_>) -> bool {
    let free: Vec<usize> = (0..state.y.len()).filter(|&t| state.is_free(t)).collect();
    if free.is_empty() || free.len() > POLISH_MAX_FREE {
        return false;
    }
    let f = free.len();
    // Bordered system [[Q_FF, y_F], [y_Fᵀ, 0]] [α_F; λ] = [1 − Q_FB α_B; −y_Bᵀ α_B].
    let mut m = vec![vec![0.0; f + 1]; f + 1];
    let mut rhs = vec![0.0; f + 1];
    let bounded_sum: f64 = (0..state.y.len())
        .filter(|t| !state.is_free(*t))
        .map(|t| state.y[t] * state.alpha[t])
        .sum();
    for (r, &i) in free.iter().enumerate() {
        let row = cache.row(i);
        let mut qb = 0.0;
        for (t, k_it) in row.iter().enumerate() {
            if !state.is_free(t) && state.alpha[t] != 0.0 {
                qb += state.y[i] * state.y[t] * k_it * state.alpha[t];
            }
        }
        for (col, &j) in free.iter().enumerate() {
            m[r][col] = state.y[i] * state.y[j] * row[j];
        }
        m[r][f] = state.y[i];
        m[f][r] = state.y[i];
        rhs[r] = 1.0 - qb;
    }
    rhs[f] = -bounded_sum;
    let Some(solution) = solve_dense(m, rhs) else {
        return false;
    };
    if solution[..f].iter().any(|a| !(*a > 0.0 && *a < state.c)) {
        return false;
    }
    let before = state.violation();
    let old_alpha = state.alpha.clone();
    let old_grad = state.grad.clone();
    for (r, &i) in free.iter().enumerate() {
        let delta = solution[r] - state.alpha[i];
        if delta == 0.0 {
            continue;
        }
        let row = cache.row(i).to_vec();
        let yi = state.y[i];
        for ((g, yk), k_ik) in state.grad.iter_mut().zip(&state.y).zip(&row) {
            *g += yk * yi * k_ik * delta;
        }
        state.alpha[i] = solution[r];
    }
    let after = state.violation();
    if after < before {
        true
    } else {
        state.alpha = old_alpha;
        state.grad = old_grad;
        false
    }
}

/// Gaussian elimination with partial pivoting; `None` when singular.
fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    let scale = a
        .iter()
        .flatten()
        .fold(0.0f64, |acc, v| acc.max(v.abs()))
        .max(1.0);
    for col in 0..n {
        let pivot = (col..n).max_by(|&p, &q| a[p][col].abs().total_cmp(&a[q][col].abs()).then(q.cmp(&p)))?;
        if a[pivot][col].abs() <= 1e-12 * scale {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for r in col + 1..n {
            let factor = a[r][col] / a[col][col];
            if factor == 0.0 {
                continue;
            }
            let (upper, lower) = a.split_at_mut(r);
            for (x, p) in lower[0][col..].iter_mut().zip(&upper[col][col..]) {
                *x -= factor * p;
            }
            b[r] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let tail: f64 = (r + 1..n).map(|k| a[r][k] * x[k]).sum();
        x[r] = (b[r] - tail) / a[r][r];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

/// Largest KKT violation of a given solution, measured the same way as the
/// solver's stopping rule; recomputes the gradient from scratch.
pub fn kkt_violation(
    data: &[SparseVector],
    labels: &[i8],
    kernel: KernelSpec,
    c: f64,
    alpha: &[f64],
) -> Result<f64> {
    let n = data.len();
    let y: Vec<f64> = labels.iter().map(|&l| f64::from(l)).collect();
    let mut grad = vec![-1.0; n];
    for i in 0..n {
        for j in 0..n {
            if alpha[j] != 0.0 {
                grad[i] += y[i] * y[j] * kernel.eval(&data[i], &data[j])? * alpha[j];
            }
        }
    }
    let state = State {
        y,
        alpha: alpha.to_vec(),
        grad,
        c,
    };
    Ok(state.violation())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn points(xs: &[&[f64]]) -> Vec<SparseVector> {
        xs.iter().map(|x| SparseVector::from_dense(x)).collect()
    }

    #[test]
    fn two_point_analytic_solution() {
        let data = points(&[&[1.0], &[-1.0]]);
        let params = SmoParams {
            c: 10.0,
            ..Default::default()
        };
        let sol = train(&data, &[1, -1], KernelSpec::rbf(1.0).unwrap(), &params).unwrap();
        let expected = 1.0 / (1.0 - (-2f64).exp());
        assert!((sol.alpha[0] - expected).abs() < 1e-6, "{:?}", sol.alpha);
        assert!((sol.alpha[1] - expected).abs() < 1e-6);
        assert!(sol.bias.abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_input() {
        let data = points(&[&[1.0], &[-1.0]]);
        let k = KernelSpec::rbf(1.0).unwrap();
        let p = SmoParams::default();
        assert!(train(&data, &[1, 1], k, &p).is_err());
        assert!(train(&data, &[1], k, &p).is_err());
        assert!(train(&data, &[1, 0], k, &p).is_err());
        let zero_c = SmoParams { c: 0.0, ..p };
        assert!(train(&data, &[1, -1], k, &zero_c).is_err());
        let mixed = vec![SparseVector::zeros(1), SparseVector::zeros(2)];
        assert!(train(&mixed, &[1, -1], k, &p).is_err());
    }

    #[test]
    fn iteration_guard_reports_diagnostics() {
        let data = points(&[&[0.0, 0.0], &[1.0, 1.0], &[0.0, 1.0], &[1.0, 0.0], &[0.5, 0.4]]);
        let params = SmoParams {
            c: 10.0,
            max_iterations: 1,
            ..Default::default()
        };
        let err = train(&data, &[-1, -1, 1, 1, 1], KernelSpec::rbf(0.5).unwrap(), &params).unwrap_err();
        assert!(matches!(err, Error::NotConverged { iterations: 1, .. }), "{err}");
    }

    #[test]
    fn tiny_cache_gives_identical_result() {
        let data = points(&[&[0.0, 0.0], &[1.0, 1.0], &[0.0, 1.0], &[1.0, 0.0], &[0.2, 0.7], &[0.9, 0.1]]);
        let labels = [-1, -1, 1, 1, 1, -1];
        let k = KernelSpec::rbf(0.7).unwrap();
        let big = train(&data, &labels, k, &SmoParams::default()).unwrap();
        let small = train(&data, &labels, k, &SmoParams { cache_bytes: 0, ..Default::default() }).unwrap();
        assert_eq!(big, small);
    }

    #[test]
    fn solve_dense_detects_singular() {
        assert!(solve_dense(vec![vec![1.0, 2.0], vec![2.0, 4.0]], vec![1.0, 2.0]).is_none());
        let x = solve_dense(vec![vec![0.0, 1.0], vec![2.0, 0.0]], vec![3.0, 4.0]).unwrap();
        assert_eq!(x, vec![2.0, 3.0]);
    }
}
