//! Lasso linear regression by cyclic coordinate descent, R² and repeated
//! k-fold cross-validation.
//!
//! The objective is `(1/2n) Σ (aᵢ - w·xᵢ - b)² + λ (Σ|wⱼ| + |b|)`; the bias
//! penalty can be switched off with [`LassoOptions::penalize_bias`].

mod cv;
mod model;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::Real;

pub use cv::{cross_validate, default_lambda_grid, select_lambda, CvOptions, CvReport, LambdaScore, LambdaSelection};
pub use model::{ModelError, TrainedModel};

#[derive(Debug, Error, PartialEq)]
pub enum RegressError {
    #[error("no training rows")]
    Empty,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("non-finite value in input")]
    NonFinite,
    #[error("targets have zero variance")]
    ZeroVariance,
    #[error("need at least {need} records, have {have}")]
    TooSmall { need: usize, have: usize },
    #[error("penalty must be finite and non-negative")]
    BadLambda,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hyperplane<T> {
    pub w: Vec<T>,
    pub b: T,
}

impl<T: Real> Hyperplane<T> {
    pub fn zeros(k: usize) -> Self {
        Hyperplane { w: vec![T::zero(); k], b: T::zero() }
    }

    pub fn nonzero_count(&self) -> usize {
        self.w.iter().filter(|w| !w.is_zero()).count()
    }

    pub fn predict(&self, x: &[T]) -> Result<T, RegressError> {
        if x.len() != self.w.len() {
            return Err(RegressError::Dimension { expected: self.w.len(), got: x.len() });
        }
        Ok(self.w.iter().zip(x).fold(self.b, |s, (&w, &x)| s + w * x))
    }
}

pub fn predict<T: Real>(h: &Hyperplane<T>, x: &[T]) -> Result<T, RegressError> {
    h.predict(x)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LassoOptions {
    /// Stop once no coordinate moves by more than this in a sweep.
    pub tol: f64,
    pub max_sweeps: usize,
    pub penalize_bias: bool,
}

impl Default for LassoOptions {
    fn default() -> Self {
        LassoOptions { tol: 1e-8, max_sweeps: 100_000, penalize_bias: true }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LassoFit<T> {
    pub hyperplane: Hyperplane<T>,
    pub sweeps: usize,
    pub converged: bool,
    /// Objective value before the first sweep and after each sweep.
    pub objective: Vec<T>,
}

fn check_inputs<T: Real>(x: &[Vec<T>], a: &[T]) -> Result<usize, RegressError> {
    if x.is_empty() {
        return Err(RegressError::Empty);
    }
    if a.len() != x.len() {
        return Err(RegressError::Dimension { expected: x.len(), got: a.len() });
    }
    let k = x[0].len();
    for r in x {
        if r.len() != k {
            return Err(RegressError::Dimension { expected: k, got: r.len() });
        }
        if r.iter().any(|v| !v.is_finite()) {
            return Err(RegressError::NonFinite);
        }
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(RegressError::NonFinite);
    }
    Ok(k)
}

fn soft_threshold<T: Real>(z: T, g: T) -> T {
    if z > g {
        z - g
    } else if z < -g {
        z + g
    } else {
        T::zero()
    }
}

pub fn lasso_objective<T: Real>(x: &[Vec<T>], a: &[T], h: &Hyperplane<T>, lambda: T, penalize_bias: bool) -> T {
    let n = T::from_usize(x.len()).unwrap();
    let err: T = x.iter().zip(a).map(|(r, &ai)| (ai - h.predict(r).unwrap()).powi(2)).sum();
    let mut pen: T = h.w.iter().map(|w| w.abs()).sum();
    if penalize_bias {
        pen = pen + h.b.abs();
    }
    err / (n + n) + lambda * pen
}

pub fn lasso_fit<T: Real>(
    x: &[Vec<T>],
    a: &[T],
    lambda: T,
    opts: &LassoOptions,
) -> Result<LassoFit<T>, RegressError> {
    let k = check_inputs(x, a)?;
    if !lambda.is_finite() || lambda < T::zero() {
        return Err(RegressError::BadLambda);
    }
    let n = T::from_usize(x.len()).unwrap();
    let tol = T::lit(opts.tol);
    let mut h = Hyperplane::zeros(k);
    let mut resid: Vec<T> = a.to_vec();
    let sq: Vec<T> = (0..k).map(|j| x.iter().map(|r| r[j] * r[j]).sum::<T>() / n).collect();
    let mut objective = vec![lasso_objective(x, a, &h, lambda, opts.penalize_bias)];
    let mut sweeps = 0;
    let mut converged = false;
    while sweeps < opts.max_sweeps {
        sweeps += 1;
        let mut biggest = T::zero();
        for j in 0..k {
            let old = h.w[j];
            let new = if sq[j].is_zero() {
                T::zero()
            } else {
                let rho = x.iter().zip(&resid).map(|(r, &e)| r[j] * (e + old * r[j])).sum::<T>() / n;
                soft_threshold(rho, lambda) / sq[j]
            };
            let delta = new - old;
            if !delta.is_zero() {
                for (r, e) in x.iter().zip(resid.iter_mut()) {
                    *e = *e - delta * r[j];
                }
                h.w[j] = new;
            }
            biggest = biggest.max(delta.abs());
        }
        let old = h.b;
        let rho = resid.iter().map(|&e| e + old).sum::<T>() / n;
        let new = if opts.penalize_bias { soft_threshold(rho, lambda) } else { rho };
        let delta = new - old;
        for e in resid.iter_mut() {
            *e = *e - delta;
        }
        h.b = new;
        biggest = biggest.max(delta.abs());
        objective.push(lasso_objective(x, a, &h, lambda, opts.penalize_bias));
        if biggest < tol {
            converged = true;
            break;
        }
    }
    Ok(LassoFit { hyperplane: h, sweeps, converged, objective })
}

/// Smallest penalty at which the all-zero hyperplane is optimal
/// (with a penalized bias).
pub fn lambda_max<T: Real>(x: &[Vec<T>], a: &[T]) -> T {
    let n = T::from_usize(x.len()).unwrap();
    let k = x.first().map_or(0, Vec::len);
    let mut m = (a.iter().copied().sum::<T>() / n).abs();
    for j in 0..k {
        m = m.max((x.iter().zip(a).map(|(r, &ai)| r[j] * ai).sum::<T>() / n).abs());
    }
    m
}

/// Largest violation of the Lasso optimality conditions at `h`.
pub fn kkt_violation<T: Real>(x: &[Vec<T>], a: &[T], h: &Hyperplane<T>, lambda: T, penalize_bias: bool) -> T {
    let n = T::from_usize(x.len()).unwrap();
    let resid: Vec<T> = x.iter().zip(a).map(|(r, &ai)| ai - h.predict(r).unwrap()).collect();
    let check = |grad: T, coef: T, lam: T| {
        if coef.is_zero() {
            (grad.abs() - lam).max(T::zero())
        } else {
            (grad + lam * coef.signum()).abs()
        }
    };
    let mut worst = T::zero();
    for j in 0..h.w.len() {
        let grad = -x.iter().zip(&resid).map(|(r, &e)| r[j] * e).sum::<T>() / n;
        worst = worst.max(check(grad, h.w[j], lambda));
    }
    let grad = -resid.iter().copied().sum::<T>() / n;
    let lam_b = if penalize_bias { lambda } else { T::zero() };
    worst.max(check(grad, h.b, lam_b))
}

/// `1 - Err / Σ(aᵢ - ā)²`.
pub fn r_squared<T: Real>(h: &Hyperplane<T>, x: &[Vec<T>], a: &[T]) -> Result<T, RegressError> {
    check_inputs(x, a)?;
    if x.len() < 2 {
        return Err(RegressError::TooSmall { need: 2, have: x.len() });
    }
    let mean = a.iter().copied().sum::<T>() / T::from_usize(a.len()).unwrap();
    let tot: T = a.iter().map(|&v| (v - mean).powi(2)).sum();
    if tot.is_zero() {
        return Err(RegressError::ZeroVariance);
    }
    let mut err = T::zero();
    for (r, &ai) in x.iter().zip(a) {
        err = err + (ai - h.predict(r)?).powi(2);
    }
    Ok(T::one() - err / tot)
}
