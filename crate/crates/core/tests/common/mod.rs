//! Independent reference implementations used as test oracles.
#![allow(dead_code)]

use std::collections::BTreeMap;

/// Kahan-summed mean.
pub fn mean(x: &[f64]) -> f64 {
    let (mut s, mut c) = (0.0f64, 0.0f64);
    for &v in x {
        let y = v - c;
        let t = s + y;
        c = (t - s) - y;
        s = t;
    }
    s / x.len() as f64
}

pub fn central(x: &[f64], k: i32) -> f64 {
    let mu = mean(x);
    x.iter().map(|v| (v - mu).powi(k)).sum::<f64>() / x.len() as f64
}

pub fn constant(x: &[f64]) -> bool {
    x.iter().all(|&v| v == x[0])
}

pub fn median(x: &[f64]) -> f64 {
    // Selection by counting: the k-th smallest is the value with exactly
    // enough elements below it.
    let n = x.len();
    let kth = |k: usize| {
        *x.iter()
            .find(|&&v| {
                let below = x.iter().filter(|&&u| u < v).count();
                let equal = x.iter().filter(|&&u| u == v).count();
                below <= k && k < below + equal
            })
            .unwrap()
    };
    if n % 2 == 1 {
        kth(n / 2)
    } else {
        (kth(n / 2 - 1) + kth(n / 2)) / 2.0
    }
}

pub fn var(x: &[f64]) -> f64 {
    if x.len() < 2 || constant(x) {
        0.0
    } else {
        central(x, 2)
    }
}

pub fn skewness(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    if x.len() < 3 || constant(x) {
        return 0.0;
    }
    let g1 = central(x, 3) / central(x, 2).powf(1.5);
    g1 * (n * (n - 1.0)).sqrt() / (n - 2.0)
}

pub fn kurtosis(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    if x.len() < 4 || constant(x) {
        return 0.0;
    }
    let g2 = central(x, 4) / central(x, 2).powi(2) - 3.0;
    ((n + 1.0) * g2 + 6.0) * (n - 1.0) / ((n - 2.0) * (n - 3.0))
}

pub fn shape_factor(x: &[f64]) -> f64 {
    let mean_abs = x.iter().map(|v| v.abs()).sum::<f64>() / x.len() as f64;
    if mean_abs == 0.0 {
        return 0.0;
    }
    (x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64).sqrt() / mean_abs
}

pub fn msdc(x: &[f64]) -> f64 {
    let n = x.len();
    if n < 3 {
        return 0.0;
    }
    // Telescoped: the sum of second differences is (x[n-1] - x[n-2]) - (x[1] - x[0]).
    let mut s = 0.0;
    for i in 0..n - 2 {
        s += x[i + 2] - 2.0 * x[i + 1] + x[i];
    }
    s / (2.0 * (n - 2) as f64)
}

pub fn peaks(x: &[f64]) -> f64 {
    let mut c = 0;
    for i in 1..x.len().saturating_sub(1) {
        if x[i - 1] < x[i] && x[i] > x[i + 1] {
            c += 1;
        }
    }
    c as f64
}

/// Direct O(n²) DFT of the mean-removed series.
pub fn fourier_entropy(x: &[f64]) -> f64 {
    let n = x.len();
    if n < 2 || constant(x) {
        return 0.0;
    }
    let mu = mean(x);
    let mut power = Vec::new();
    for k in 1..=n / 2 {
        let (mut re, mut im) = (0.0, 0.0);
        for (t, &v) in x.iter().enumerate() {
            let a = -2.0 * std::f64::consts::PI * (k * t % n) as f64 / n as f64;
            re += (v - mu) * a.cos();
            im += (v - mu) * a.sin();
        }
        power.push(re * re + im * im);
    }
    let total: f64 = power.iter().sum();
    if total <= 0.0 {
        return 0.0;
    }
    power
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -(p / total) * (p / total).ln())
        .sum()
}

/// Equal-frequency bin of every value, by counting smaller values.
pub fn bins(values: &[f64], b: usize) -> Vec<usize> {
    let n = values.len();
    let mut distinct: Vec<f64> = Vec::new();
    for &v in values {
        if !distinct.contains(&v) {
            distinct.push(v);
        }
    }
    values
        .iter()
        .map(|&v| {
            if distinct.len() <= b {
                distinct.iter().filter(|&&d| d < v).count()
            } else {
                let below = values.iter().filter(|&&u| u < v).count();
                below * b / n
            }
        })
        .collect()
}

/// Plug-in MI from the explicit joint count table.
pub fn joint_histogram_mi(values: &[f64], labels: &[usize], b: usize) -> f64 {
    let n = values.len() as f64;
    let bx = bins(values, b);
    let mut joint: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    let mut px: BTreeMap<usize, f64> = BTreeMap::new();
    let mut py: BTreeMap<usize, f64> = BTreeMap::new();
    for (&x, &y) in bx.iter().zip(labels) {
        *joint.entry((x, y)).or_default() += 1.0;
        *px.entry(x).or_default() += 1.0;
        *py.entry(y).or_default() += 1.0;
    }
    joint
        .iter()
        .map(|(&(x, y), &c)| (c / n) * ((c * n) / (px[&x] * py[&y])).ln())
        .sum::<f64>()
        .max(0.0)
}

pub fn entropy(labels: &[usize]) -> f64 {
    let n = labels.len() as f64;
    let mut c: BTreeMap<usize, f64> = BTreeMap::new();
    for &l in labels {
        *c.entry(l).or_default() += 1.0;
    }
    c.values().map(|&k| -(k / n) * (k / n).ln()).sum()
}

/// ROC by trying every threshold directly: `(threshold, far, frr)`.
pub fn roc_points(genuine: &[f64], impostor: &[f64]) -> Vec<(f64, f64, f64)> {
    let mut t: Vec<f64> = genuine.iter().chain(impostor).copied().collect();
    t.push(f64::INFINITY);
    t.sort_by(f64::total_cmp);
    t.dedup();
    t.into_iter()
        .map(|th| {
            let far = impostor.iter().filter(|&&s| s >= th).count() as f64 / impostor.len() as f64;
            let frr = genuine.iter().filter(|&&s| s < th).count() as f64 / genuine.len() as f64;
            (th, far, frr)
        })
        .collect()
}

/// FRR at the smallest threshold whose FAR does not exceed the target.
pub fn frr_at_far(genuine: &[f64], impostor: &[f64], target: f64) -> f64 {
    roc_points(genuine, impostor)
        .into_iter()
        .filter(|p| p.1 <= target)
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .unwrap()
        .2
}

/// Mann-Whitney AUC with ties counted as one half.
pub fn auc(genuine: &[f64], impostor: &[f64]) -> f64 {
    let mut s = 0.0;
    for &g in genuine {
        for &i in impostor {
            s += if g > i {
                1.0
            } else if g == i {
                0.5
            } else {
                0.0
            };
        }
    }
    s / (genuine.len() * impostor.len()) as f64
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
pub fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[p][c].abs() < 1e-12 {
            return None;
        }
        a.swap(c, p);
        b.swap(c, p);
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            for k in c..n {
                a[r][k] -= f * a[c][k];
            }
            b[r] -= f * b[c];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| a[r][k] * x[k]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

/// Hard-margin linear SVM by active-set enumeration: every candidate support
/// set of two or three points with both classes is solved from its KKT
/// equalities; the feasible candidate with the smallest `|w|` wins.
/// Returns `(w, b, support set)`.
pub fn hard_margin_svm(x: &[Vec<f64>], y: &[bool]) -> (Vec<f64>, f64, Vec<usize>) {
    let n = x.len();
    let d = x[0].len();
    let ys: Vec<f64> = y.iter().map(|&l| if l { 1.0 } else { -1.0 }).collect();
    let mut sets: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            sets.push(vec![i, j]);
            for k in j + 1..n {
                sets.push(vec![i, j, k]);
            }
        }
    }
    let mut best: Option<(f64, Vec<f64>, f64, Vec<usize>)> = None;
    for s in sets {
        if s.iter().all(|&i| y[i]) || s.iter().all(|&i| !y[i]) {
            continue;
        }
        // Unknowns: alpha_s, b. Equations: y_i (sum_j a_j y_j <x_j,x_i> + b) = 1, sum a_j y_j = 0.
        let m = s.len();
        let mut a = vec![vec![0.0; m + 1]; m + 1];
        let mut rhs = vec![0.0; m + 1];
        for (r, &i) in s.iter().enumerate() {
            for (c, &j) in s.iter().enumerate() {
                let dot: f64 = x[i].iter().zip(&x[j]).map(|(p, q)| p * q).sum();
                a[r][c] = ys[i] * ys[j] * dot;
            }
            a[r][m] = ys[i];
            rhs[r] = 1.0;
        }
        for (c, &j) in s.iter().enumerate() {
            a[m][c] = ys[j];
        }
        let Some(sol) = solve(a, rhs) else { continue };
        if sol[..m].iter().any(|&v| v < -1e-12) {
            continue;
        }
        let mut w = vec![0.0; d];
        for (c, &j) in s.iter().enumerate() {
            for k in 0..d {
                w[k] += sol[c] * ys[j] * x[j][k];
            }
        }
        let b = sol[m];
        let feasible = (0..n).all(|i| ys[i] * (w.iter().zip(&x[i]).map(|(p, q)| p * q).sum::<f64>() + b) >= 1.0 - 1e-9);
        if !feasible {
            continue;
        }
        let norm: f64 = w.iter().map(|v| v * v).sum();
        let support: Vec<usize> = s.iter().zip(&sol).filter(|(_, &a)| a > 1e-9).map(|(&i, _)| i).collect();
        if best.as_ref().map_or(true, |bst| norm < bst.0 - 1e-12) {
            best = Some((norm, w, b, support));
        }
    }
    let (_, w, b, s) = best.expect("separable data has a feasible support set");
    (w, b, s)
}

/// Penalized logistic regression (`lambda/2 |w|²`, free intercept) by
/// Newton-Raphson, i.e. iteratively reweighted least squares.
/// Returns `(weights, intercept)`.
pub fn irls(x: &[Vec<f64>], y: &[bool], lambda: f64) -> (Vec<f64>, f64) {
    let d = x[0].len();
    let mut beta = vec![0.0; d + 1];
    for _ in 0..100 {
        let mut g = vec![0.0; d + 1];
        let mut h = vec![vec![0.0; d + 1]; d + 1];
        for (r, &l) in x.iter().zip(y) {
            let mut z = beta[d];
            for k in 0..d {
                z += beta[k] * r[k];
            }
            let p = 1.0 / (1.0 + (-z).exp());
            let e = p - if l { 1.0 } else { 0.0 };
            let w = p * (1.0 - p);
            let row: Vec<f64> = r.iter().copied().chain([1.0]).collect();
            for a in 0..=d {
                g[a] += e * row[a];
                for b in 0..=d {
                    h[a][b] += w * row[a] * row[b];
                }
            }
        }
        for k in 0..d {
            g[k] += lambda * beta[k];
            h[k][k] += lambda;
        }
        let step = solve(h, g).expect("Hessian is positive definite");
        let mut change = 0.0f64;
        for k in 0..=d {
            beta[k] -= step[k];
            change = change.max(step[k].abs());
        }
        if change < 1e-12 {
            break;
        }
    }
    (beta[..d].to_vec(), beta[d])
}
