use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{lasso_fit, r_squared, LassoOptions, RegressError};
use crate::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CvOptions {
    pub runs: usize,
    pub folds: usize,
    pub seed: u64,
    pub lasso: LassoOptions,
    /// Median R² values within this distance of the best count as ties in
    /// `select_lambda`.
    pub r2_tolerance: f64,
}

impl Default for CvOptions {
    fn default() -> Self {
        CvOptions { runs: 10, folds: 5, seed: 0, lasso: LassoOptions::default(), r2_tolerance: 1e-6 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub lambda: f64,
    /// Test R² of every trial, run-major.
    pub trial_r2: Vec<f64>,
    pub median_r2: f64,
    /// Mean number of nonzero weights over the trials.
    pub k_prime: f64,
}

fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(|a, b| a.total_cmp(b));
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        (s[n / 2 - 1] + s[n / 2]) / 2.0
    }
}

/// Fold assignment of each run: a random permutation cut into `folds`
/// contiguous parts whose sizes differ by at most one.
pub fn fold_partitions(n: usize, opts: &CvOptions) -> Vec<Vec<Vec<usize>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    (0..opts.runs)
        .map(|_| {
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(&mut rng);
            let (q, r) = (n / opts.folds, n % opts.folds);
            let mut out = Vec::with_capacity(opts.folds);
            let mut start = 0;
            for k in 0..opts.folds {
                let len = q + usize::from(k < r);
                out.push(perm[start..start + len].to_vec());
                start += len;
            }
            out
        })
        .collect()
}

pub fn cross_validate<T: Real>(
    x: &[Vec<T>],
    a: &[T],
    lambda: T,
    opts: &CvOptions,
) -> Result<CvReport, RegressError> {
    if x.len() < opts.folds.max(2) {
        return Err(RegressError::TooSmall { need: opts.folds.max(2), have: x.len() });
    }
    let partitions = fold_partitions(x.len(), opts);
    let trials: Vec<(usize, usize)> =
        (0..opts.runs).flat_map(|r| (0..opts.folds).map(move |k| (r, k))).collect();
    let results: Result<Vec<(f64, usize)>, RegressError> = trials
        .par_iter()
        .map(|&(r, k)| {
            let test = &partitions[r][k];
            let mut in_test = vec![false; x.len()];
            for &i in test {
                in_test[i] = true;
            }
            let (tx, ta): (Vec<Vec<T>>, Vec<T>) =
                (0..x.len()).filter(|&i| !in_test[i]).map(|i| (x[i].clone(), a[i])).unzip();
            let (vx, va): (Vec<Vec<T>>, Vec<T>) = test.iter().map(|&i| (x[i].clone(), a[i])).unzip();
            let fit = lasso_fit(&tx, &ta, lambda, &opts.lasso)?;
            let r2 = r_squared(&fit.hyperplane, &vx, &va)?;
            Ok((r2.to_f64().unwrap(), fit.hyperplane.nonzero_count()))
        })
        .collect();
    let results = results?;
    let trial_r2: Vec<f64> = results.iter().map(|r| r.0).collect();
    let k_prime = results.iter().map(|r| r.1 as f64).sum::<f64>() / results.len() as f64;
    Ok(CvReport { lambda: lambda.to_f64().unwrap(), median_r2: median(&trial_r2), trial_r2, k_prime })
}

/// Zero followed by 36 geometrically spaced values from 1e-6 to 100.
pub fn default_lambda_grid() -> Vec<f64> {
    let (lo, hi) = (1e-6f64.ln(), 100f64.ln());
    std::iter::once(0.0).chain((0..36).map(|i| (lo + (hi - lo) * i as f64 / 35.0).exp())).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaScore {
    pub lambda: f64,
    pub median_r2: f64,
    pub k_prime: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaSelection {
    pub scores: Vec<LambdaScore>,
    pub best: CvReport,
}

/// Cross-validate every grid value and keep the largest penalty whose
/// median test R² is within `r2_tolerance` of the best.
pub fn select_lambda<T: Real>(
    x: &[Vec<T>],
    a: &[T],
    grid: &[f64],
    opts: &CvOptions,
) -> Result<LambdaSelection, RegressError> {
    let reports = grid
        .iter()
        .map(|&lam| cross_validate(x, a, T::lit(lam), opts))
        .collect::<Result<Vec<_>, _>>()?;
    let top = reports.iter().map(|r| r.median_r2).fold(f64::NEG_INFINITY, f64::max);
    let best = reports
        .iter()
        .filter(|r| r.median_r2 >= top - opts.r2_tolerance)
        .max_by(|p, q| p.lambda.total_cmp(&q.lambda))
        .cloned()
        .ok_or(RegressError::BadLambda)?;
    let scores = reports
        .iter()
        .map(|r| LambdaScore { lambda: r.lambda, median_r2: r.median_r2, k_prime: r.k_prime })
        .collect();
    Ok(LambdaSelection { scores, best })
}
