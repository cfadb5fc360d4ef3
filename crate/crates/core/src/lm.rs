//! Levenberg-Marquardt for small dense least-squares problems.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LmOptions {
    pub tolerance: f64,
    pub max_iterations: usize,
    pub initial_damping: f64,
    /// Largest per-coordinate step.
    pub max_step: f64,
    /// Iterates stay within `x0 ± max_excursion` per coordinate.
    pub max_excursion: f64,
}

impl Default for LmOptions {
    fn default() -> Self {
        Self { tolerance: 1e-6, max_iterations: 200, initial_damping: 1e-3, max_step: 0.5, max_excursion: f64::INFINITY }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LmReport {
    pub x: Vec<f64>,
    pub residuals: Vec<f64>,
    pub initial_norm: f64,
    pub norm: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LmError {
    /// Residual could not be evaluated at the starting point.
    BadStart,
    /// Stalled short of the tolerance with a rank-deficient Jacobian.
    Degenerate,
}

fn norm(r: &[f64]) -> f64 {
    r.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn jacobian<F>(f: &F, x: &[f64], m: usize) -> Option<DMatrix<f64>>
where
    F: Fn(&[f64]) -> Option<Vec<f64>>,
{
    let n = x.len();
    let mut j = DMatrix::zeros(m, n);
    let mut xp = x.to_vec();
    for c in 0..n {
        let h = 1e-6 * x[c].abs().max(1.0);
        xp[c] = x[c] + h;
        let fp = f(&xp)?;
        xp[c] = x[c] - h;
        let fm = f(&xp)?;
        xp[c] = x[c];
        for r in 0..m {
            j[(r, c)] = (fp[r] - fm[r]) / (2.0 * h);
        }
    }
    Some(j)
}

/// Minimizes `|f(x)|²`. `f` returns `None` where the model cannot be
/// evaluated; such trial points are treated as rejected steps.
/// Only strictly improving steps are accepted, so the returned norm never
/// exceeds the initial one.
pub fn minimize<F>(f: F, x0: &[f64], opts: &LmOptions) -> Result<LmReport, LmError>
where
    F: Fn(&[f64]) -> Option<Vec<f64>>,
{
    let mut x = x0.to_vec();
    let mut r = f(&x).ok_or(LmError::BadStart)?;
    if r.iter().any(|v| !v.is_finite()) {
        return Err(LmError::BadStart);
    }
    let m = r.len();
    let initial_norm = norm(&r);
    let mut cost = initial_norm;
    let mut lambda = opts.initial_damping;
    let mut iterations = 0;

    while cost >= opts.tolerance && iterations < opts.max_iterations {
        iterations += 1;
        let Some(j) = jacobian(&f, &x, m) else { break };
        let sv = j.clone().singular_values();
        let smax = sv.max();
        if !(smax > 0.0) {
            return Err(LmError::Degenerate);
        }
        let rank = sv.iter().filter(|s| **s > 1e-10 * smax).count();
        let jt = j.transpose();
        let jtj = &jt * &j;
        let g = &jt * DVector::from_column_slice(&r);
        let mut accepted = false;
        while lambda < 1e12 {
            // plain ridge damping: among equally good steps, the shortest wins
            let mut a = jtj.clone();
            for d in 0..x.len() {
                a[(d, d)] += lambda;
            }
            let Some(step) = a.lu().solve(&(-&g)) else {
                lambda *= 10.0;
                continue;
            };
            let big = step.amax();
            let scale = if big > opts.max_step { opts.max_step / big } else { 1.0 };
            let trial: Vec<f64> = x
                .iter()
                .zip(step.iter())
                .zip(x0)
                .map(|((xi, s), o)| (xi + scale * s).clamp(o - opts.max_excursion, o + opts.max_excursion))
                .collect();
            match f(&trial) {
                Some(rt) if rt.iter().all(|v| v.is_finite()) && norm(&rt) < cost => {
                    x = trial;
                    cost = norm(&rt);
                    r = rt;
                    lambda = (lambda / 10.0).max(1e-12);
                    accepted = true;
                    break;
                }
                _ => lambda *= 10.0,
            }
        }
        if !accepted {
            if rank < x.len() {
                return Err(LmError::Degenerate);
            }
            break;
        }
    }
    Ok(LmReport {
        converged: cost < opts.tolerance,
        x,
        residuals: r,
        initial_norm,
        norm: cost,
        iterations,
    })
}
