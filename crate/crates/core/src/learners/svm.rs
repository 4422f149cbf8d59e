//! Soft-margin binary C-SVM trained with sequential minimal optimization.
//!
//! We solve the dual
//!
//! ```text
//! min_a  1/2 a'Qa - e'a    s.t.  y'a = 0,  0 <= a_i <= C,   Q_ij = y_i y_j K(x_i, x_j)
//! ```
//!
//! picking the working pair by maximal violation for `i` and second-order
//! gain for `j`. The solver stops once the KKT gap `m(a) - M(a)` drops below
//! the tolerance.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const KKT_TOLERANCE: f64 = 1e-3;
/// Pair updates allowed per training point before giving up.
pub const MAX_PASSES: usize = 200;
const TAU: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kernel {
    Linear,
    Polynomial,
    Rbf,
    Sigmoid,
}

impl Kernel {
    pub fn eval(self, gamma: f64, a: &[f64], b: &[f64]) -> f64 {
        let dot = || a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        match self {
            Kernel::Linear => dot(),
            Kernel::Polynomial => (gamma * dot() + 1.0).powi(3),
            Kernel::Rbf => {
                let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
                (-gamma * d2).exp()
            }
            Kernel::Sigmoid => (gamma * dot()).tanh(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvmParams {
    pub c: f64,
    pub gamma: f64,
    pub kernel: Kernel,
}

/// Raw solver output.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoSolution {
    pub alpha: Vec<f64>,
    pub bias: f64,
    pub iterations: usize,
    /// KKT gap at exit.
    pub gap: f64,
}

/// Solves the dual for a precomputed kernel matrix (row-major `n x n`).
pub fn solve_smo(kernel: &[f64], y: &[bool], c: f64, tolerance: f64, max_iter: usize) -> Result<SmoSolution> {
    let n = y.len();
    let ys: Vec<f64> = y.iter().map(|&p| if p { 1.0 } else { -1.0 }).collect();
    let k = |i: usize, j: usize| kernel[i * n + j];
    let mut alpha = vec![0.0; n];
    let mut grad = vec![-1.0; n];
    let up = |a: f64, y: f64| (y > 0.0 && a < c) || (y < 0.0 && a > 0.0);
    let low = |a: f64, y: f64| (y > 0.0 && a > 0.0) || (y < 0.0 && a < c);

    let mut iterations = 0;
    loop {
        let mut gmax = f64::NEG_INFINITY;
        let mut i_sel = None;
        for t in 0..n {
            if up(alpha[t], ys[t]) {
                let v = -ys[t] * grad[t];
                if v > gmax {
                    gmax = v;
                    i_sel = Some(t);
                }
            }
        }
        let mut gmin = f64::INFINITY;
        let mut j_sel = None;
        let mut best_obj = f64::INFINITY;
        for t in 0..n {
            if !low(alpha[t], ys[t]) {
                continue;
            }
            let v = -ys[t] * grad[t];
            gmin = gmin.min(v);
            if let Some(i) = i_sel {
                let b = gmax - v;
                if b > 0.0 {
                    let mut a = k(i, i) + k(t, t) - 2.0 * k(i, t);
                    if a <= 0.0 {
                        a = TAU;
                    }
                    let obj = -(b * b) / a;
                    if obj < best_obj {
                        best_obj = obj;
                        j_sel = Some(t);
                    }
                }
            }
        }
        let gap = gmax - gmin;
        let (Some(i), Some(j)) = (i_sel, j_sel) else {
            return Ok(finish(alpha, &ys, &grad, c, iterations, gap.max(0.0)));
        };
        if gap < tolerance {
            return Ok(finish(alpha, &ys, &grad, c, iterations, gap));
        }
        if iterations >= max_iter {
            return Err(Error::NonConvergence {
                iterations,
                max_violation: gap,
                tolerance,
            });
        }
        iterations += 1;

        let (ai, aj) = (alpha[i], alpha[j]);
        let mut quad = k(i, i) + k(j, j) - 2.0 * k(i, j);
        if quad <= 0.0 {
            quad = TAU;
        }
        if ys[i] != ys[j] {
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }
        let (di, dj) = (alpha[i] - ai, alpha[j] - aj);
        for t in 0..n {
            grad[t] += ys[t] * (ys[i] * k(i, t) * di + ys[j] * k(j, t) * dj);
        }
    }
}

fn finish(alpha: Vec<f64>, ys: &[f64], grad: &[f64], c: f64, iterations: usize, gap: f64) -> SmoSolution {
    let (mut ub, mut lb) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut free, mut sum_free) = (0usize, 0.0);
    for t in 0..ys.len() {
        let yg = ys[t] * grad[t];
        if alpha[t] >= c {
            if ys[t] < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if alpha[t] <= 0.0 {
            if ys[t] > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            free += 1;
            sum_free += yg;
        }
    }
    let rho = if free > 0 {
        sum_free / free as f64
    } else {
        (ub + lb) / 2.0
    };
    SmoSolution {
        alpha,
        bias: -rho,
        iterations,
        gap,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Svm {
    pub params: SvmParams,
    pub support_vectors: Vec<Vec<f64>>,
    /// `alpha_i * y_i` per support vector.
    pub dual_coef: Vec<f64>,
    pub bias: f64,
}

impl Svm {
    /// Signed decision value; positive means victim.
    pub fn decision(&self, x: &[f64]) -> f64 {
        self.support_vectors
            .iter()
            .zip(&self.dual_coef)
            .map(|(sv, c)| c * self.params.kernel.eval(self.params.gamma, sv, x))
            .sum::<f64>()
            + self.bias
    }

    pub fn predict(&self, x: &[f64]) -> bool {
        self.decision(x) > 0.0
    }
}

pub fn kernel_matrix(x: &[Vec<f64>], params: &SvmParams) -> Vec<f64> {
    let n = x.len();
    let mut k = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let v = params.kernel.eval(params.gamma, &x[i], &x[j]);
            k[i * n + j] = v;
            k[j * n + i] = v;
        }
    }
    k
}

/// Expects standardized inputs.
pub fn train_svm(x: &[Vec<f64>], y: &[bool], params: &SvmParams) -> Result<Svm> {
    if x.len() != y.len() {
        return Err(Error::validation("feature rows and labels differ in length"));
    }
    if !(y.iter().any(|&v| v) && y.iter().any(|&v| !v)) {
        return Err(Error::Training("SVM needs both classes".into()));
    }
    let k = kernel_matrix(x, params);
    let sol = solve_smo(&k, y, params.c, KKT_TOLERANCE, MAX_PASSES * x.len())?;
    let mut support_vectors = Vec::new();
    let mut dual_coef = Vec::new();
    for (i, &a) in sol.alpha.iter().enumerate() {
        if a > 0.0 {
            support_vectors.push(x[i].clone());
            dual_coef.push(if y[i] { a } else { -a });
        }
    }
    Ok(Svm {
        params: *params,
        support_vectors,
        dual_coef,
        bias: sol.bias,
    })
}
