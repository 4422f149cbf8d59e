//! L2-regularized logistic regression fit by batch gradient descent.
//!
//! The objective is the summed log loss plus `lambda/2 * |w|^2`; the
//! intercept is not penalized. The step size is `1/L` with `L` an upper
//! bound on the Hessian's largest eigenvalue, `lambda_max([X 1]'[X 1]) / 4 + lambda`,
//! estimated by power iteration.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const LAMBDA: f64 = 1.0;
pub const GRADIENT_TOLERANCE: f64 = 1e-6;
pub const MAX_ITERATIONS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticModel {
    pub weights: Vec<f64>,
    pub intercept: f64,
    pub iterations: usize,
    pub gradient_norm: f64,
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^z)` without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

impl LogisticModel {
    pub fn linear(&self, x: &[f64]) -> f64 {
        self.intercept + self.weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>()
    }

    /// Probability of the positive (victim) class.
    pub fn probability(&self, x: &[f64]) -> f64 {
        sigmoid(self.linear(x))
    }
}

/// Penalized objective at `(weights, intercept)`.
pub fn objective(x: &[Vec<f64>], y: &[bool], weights: &[f64], intercept: f64, lambda: f64) -> f64 {
    let loss: f64 = x
        .iter()
        .zip(y)
        .map(|(r, &l)| {
            let z = intercept + weights.iter().zip(r).map(|(w, v)| w * v).sum::<f64>();
            softplus(z) - if l { z } else { 0.0 }
        })
        .sum();
    loss + 0.5 * lambda * weights.iter().map(|w| w * w).sum::<f64>()
}

/// Gradient of [`objective`]; the last component is the intercept.
pub fn gradient(x: &[Vec<f64>], y: &[bool], weights: &[f64], intercept: f64, lambda: f64) -> Vec<f64> {
    let d = weights.len();
    let mut g = vec![0.0; d + 1];
    for (r, &l) in x.iter().zip(y) {
        let z = intercept + weights.iter().zip(r).map(|(w, v)| w * v).sum::<f64>();
        let e = sigmoid(z) - if l { 1.0 } else { 0.0 };
        for j in 0..d {
            g[j] += e * r[j];
        }
        g[d] += e;
    }
    for j in 0..d {
        g[j] += lambda * weights[j];
    }
    g
}

fn lipschitz(x: &[Vec<f64>], lambda: f64) -> f64 {
    let d = x.first().map_or(0, Vec::len) + 1;
    let mut v = vec![1.0 / (d as f64).sqrt(); d];
    let mut eig = 0.0;
    for _ in 0..100 {
        let mut next = vec![0.0; d];
        for r in x {
            let s: f64 = r.iter().zip(&v).map(|(a, b)| a * b).sum::<f64>() + v[d - 1];
            for j in 0..d - 1 {
                next[j] += s * r[j];
            }
            next[d - 1] += s;
        }
        let norm = next.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm == 0.0 {
            break;
        }
        eig = norm;
        v = next.into_iter().map(|a| a / norm).collect();
    }
    // Power iteration approaches from below; pad a little.
    1.05 * eig / 4.0 + lambda
}

pub fn train_logreg(x: &[Vec<f64>], y: &[bool]) -> Result<LogisticModel> {
    train_logreg_with(x, y, LAMBDA)
}

pub fn train_logreg_with(x: &[Vec<f64>], y: &[bool], lambda: f64) -> Result<LogisticModel> {
    if x.len() != y.len() || x.is_empty() {
        return Err(Error::validation("logistic regression needs matching, non-empty inputs"));
    }
    if !(y.iter().any(|&v| v) && y.iter().any(|&v| !v)) {
        return Err(Error::Training("logistic regression needs both classes".into()));
    }
    let d = x[0].len();
    let step = 1.0 / lipschitz(x, lambda);
    let mut w = vec![0.0; d];
    let mut b = 0.0;
    let mut iterations = 0;
    let mut norm;
    loop {
        let g = gradient(x, y, &w, b, lambda);
        norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm < GRADIENT_TOLERANCE || iterations >= MAX_ITERATIONS {
            break;
        }
        for j in 0..d {
            w[j] -= step * g[j];
        }
        b -= step * g[d];
        iterations += 1;
    }
    Ok(LogisticModel {
        weights: w,
        intercept: b,
        iterations,
        gradient_norm: norm,
    })
}
