//! Platt scaling: `P(y = +1 | f) = 1 / (1 + exp(A·f + B))`.
//!
//! Fitted by Newton's method with backtracking on the negative
//! log-likelihood against the smoothed targets `t₊ = (N₊ + 1) / (N₊ + 2)` and
//! `t₋ = 1 / (N₋ + 2)`, following Lin, Lin and Weng's numerically stable
//! formulation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const MAX_ITERATIONS: usize = 200;
const MIN_STEP: f64 = 1e-10;
const RIDGE: f64 = 1e-12;
const GRADIENT_TOL: f64 = 1e-8;
/// Lower and upper clamp for reported probabilities.
const P_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlattCoefficients {
    pub a: f64,
    pub b: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlattFit {
    pub coefficients: PlattCoefficients,
    pub nll: f64,
    pub gradient_norm: f64,
    pub iterations: usize,
}

fn targets(labels: &[i8]) -> Result<Vec<f64>> {
    let pos = labels.iter().filter(|&&l| l > 0).count();
    let neg = labels.len() - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::invalid("Platt scaling needs both classes"));
    }
    let hi = (pos as f64 + 1.0) / (pos as f64 + 2.0);
    let lo = 1.0 / (neg as f64 + 2.0);
    Ok(labels.iter().map(|&l| if l > 0 { hi } else { lo }).collect())
}

/// `−Σ t·ln p + (1 − t)·ln(1 − p)` without forming `p`.
fn nll_with_targets(values: &[f64], targets: &[f64], a: f64, b: f64) -> f64 {
    values
        .iter()
        .zip(targets)
        .map(|(f, t)| {
            let z = f * a + b;
            if z >= 0.0 {
                t * z + (-z).exp().ln_1p()
            } else {
                (t - 1.0) * z + z.exp().ln_1p()
            }
        })
        .sum()
}

/// Negative log-likelihood of `(a, b)` on labelled decision values under the
/// smoothed targets.
pub fn negative_log_likelihood(values: &[f64], labels: &[i8], a: f64, b: f64) -> Result<f64> {
    Ok(nll_with_targets(values, &targets(labels)?, a, b))
}

struct Derivatives {
    g1: f64,
    g2: f64,
    h11: f64,
    h22: f64,
    h21: f64,
}

impl Derivatives {
    fn gradient_norm(&self) -> f64 {
        self.g1.hypot(self.g2)
    }
}

/// Gradient and (ridged) Hessian of the NLL at `(a, b)`.
fn derivatives(values: &[f64], targets: &[f64], a: f64, b: f64) -> Derivatives {
    let mut d = Derivatives {
        g1: 0.0,
        g2: 0.0,
        h11: RIDGE,
        h22: RIDGE,
        h21: 0.0,
    };
    for (f, t) in values.iter().zip(targets) {
        let z = f * a + b;
        let (p, q) = if z >= 0.0 {
            let e = (-z).exp();
            (e / (1.0 + e), 1.0 / (1.0 + e))
        } else {
            let e = z.exp();
            (1.0 / (1.0 + e), e / (1.0 + e))
        };
        let d2 = p * q;
        d.h11 += f * f * d2;
        d.h22 += d2;
        d.h21 += f * d2;
        let d1 = t - p;
        d.g1 += f * d1;
        d.g2 += d1;
    }
    d
}

pub fn fit_platt(values: &[f64], labels: &[i8]) -> Result<PlattFit> {
    if values.len() != labels.len() {
        return Err(Error::invalid(format!(
            "{} decision values but {} labels",
            values.len(),
            labels.len()
        )));
    }
    let t = targets(labels)?;
    if values.iter().any(|f| !f.is_finite()) {
        return Err(Error::invalid("decision values must be finite"));
    }
    if values.iter().all(|f| *f == values[0]) {
        return Err(Error::Degenerate("all decision values are identical".into()));
    }
    let pos = labels.iter().filter(|&&l| l > 0).count() as f64;
    let neg = labels.len() as f64 - pos;

    let mut a = 0.0;
    let mut b = ((neg + 1.0) / (pos + 1.0)).ln();
    let mut fval = nll_with_targets(values, &t, a, b);
    let mut d = derivatives(values, &t, a, b);
    let mut iterations = 0;
    while d.gradient_norm() >= GRADIENT_TOL && iterations < MAX_ITERATIONS {
        iterations += 1;
        let det = d.h11 * d.h22 - d.h21 * d.h21;
        let da = -(d.h22 * d.g1 - d.h21 * d.g2) / det;
        let db = -(-d.h21 * d.g1 + d.h11 * d.g2) / det;
        let gd = d.g1 * da + d.g2 * db;
        let mut step = 1.0;
        let mut accepted = false;
        while step >= MIN_STEP {
            let (na, nb) = (a + step * da, b + step * db);
            let nf = nll_with_targets(values, &t, na, nb);
            let sufficient = nf < fval + 1e-4 * step * gd;
            // Near the optimum the decrease drops below rounding; the
            // gradient still tells whether the step helped.
            let flat = (nf - fval).abs() <= 1e-12 * fval.abs().max(1.0);
            let nd = derivatives(values, &t, na, nb);
            if sufficient || (flat && nd.gradient_norm() < d.gradient_norm()) {
                a = na;
                b = nb;
                fval = nf;
                d = nd;
                accepted = true;
                break;
            }
            step /= 2.0;
        }
        if !accepted {
            break;
        }
    }
    Ok(PlattFit {
        coefficients: PlattCoefficients { a, b },
        nll: fval,
        gradient_norm: d.gradient_norm(),
        iterations,
    })
}

impl PlattCoefficients {
    /// `(p_positive, p_negative)`, each within `[1e-12, 1 − 1e-12]`. The
    /// larger probability is computed from the sigmoid and the smaller as its
    /// complement, so the two sum to exactly 1.
    pub fn probabilities(&self, decision_value: f64) -> (f64, f64) {
        let z = self.a * decision_value + self.b;
        // For z ≤ 0 the positive class is at least as likely.
        let major = if z <= 0.0 {
            1.0 / (1.0 + z.exp())
        } else {
            1.0 / (1.0 + (-z).exp())
        };
        let major = major.clamp(0.5, 1.0 - P_FLOOR);
        let minor = 1.0 - major;
        if z <= 0.0 {
            (major, minor)
        } else {
            (minor, major)
        }
    }

    /// Decision value where both classes have probability 0.5.
    pub fn midpoint(&self) -> f64 {
        -self.b / self.a
    }
}
