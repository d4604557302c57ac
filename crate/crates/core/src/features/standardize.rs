use serde::{Deserialize, Serialize};

use crate::Real;

/// Per-coordinate min-max scaling to `[0, 1]` for descriptors and values.
/// A coordinate with `max == min` is constant and always maps to 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer<T> {
    pub min: Vec<T>,
    pub max: Vec<T>,
    pub value_min: T,
    pub value_max: T,
}

impl<T: Real> Standardizer<T> {
    pub fn fit(rows: &[Vec<T>], values: &[T]) -> Self {
        let k = rows.first().map_or(0, Vec::len);
        let mut min = vec![T::infinity(); k];
        let mut max = vec![T::neg_infinity(); k];
        for r in rows {
            for j in 0..k {
                min[j] = min[j].min(r[j]);
                max[j] = max[j].max(r[j]);
            }
        }
        let value_min = values.iter().copied().fold(T::infinity(), T::min);
        let value_max = values.iter().copied().fold(T::neg_infinity(), T::max);
        Standardizer { min, max, value_min, value_max }
    }

    pub fn dim(&self) -> usize {
        self.min.len()
    }

    pub fn is_constant(&self, j: usize) -> bool {
        self.max[j] <= self.min[j]
    }

    pub fn range(&self, j: usize) -> T {
        self.max[j] - self.min[j]
    }

    pub fn forward(&self, x: &[T]) -> Vec<T> {
        (0..self.dim())
            .map(|j| if self.is_constant(j) { T::zero() } else { (x[j] - self.min[j]) / self.range(j) })
            .collect()
    }

    pub fn inverse(&self, xs: &[T]) -> Vec<T> {
        (0..self.dim()).map(|j| self.min[j] + xs[j] * self.range(j)).collect()
    }

    pub fn forward_value(&self, a: T) -> T {
        let r = self.value_max - self.value_min;
        if r <= T::zero() {
            T::zero()
        } else {
            (a - self.value_min) / r
        }
    }

    pub fn inverse_value(&self, s: T) -> T {
        self.value_min + s * (self.value_max - self.value_min)
    }
}

/// Fit a standardizer on `rows`/`values` and return the scaled copies.
pub fn standardize<T: Real>(rows: &[Vec<T>], values: &[T]) -> (Standardizer<T>, Vec<Vec<T>>, Vec<T>) {
    let s = Standardizer::fit(rows, values);
    let x = rows.iter().map(|r| s.forward(r)).collect();
    let a = values.iter().map(|&v| s.forward_value(v)).collect();
    (s, x, a)
}
