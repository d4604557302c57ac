use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::simplex::{rational, LpScalar};
use super::{abs_sum, solve, MilpError, MilpModel, MilpStatus, Relation, SolveLimits, VarKind};
use crate::regress::{Hyperplane, TrainedModel};

/// Constants of the inverse model. The window is in standardized units,
/// matching the hyperplane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InverseProblemSpec {
    pub hyperplane: Hyperplane<f64>,
    pub window: (f64, f64),
    pub integer: Vec<bool>,
    pub nonnegative: Vec<bool>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// Per-descriptor minimum and maximum over the training set.
    pub min: Vec<f64>,
    pub max: Vec<f64>,
    pub epsilon: f64,
}

impl InverseProblemSpec {
    /// Spec for a trained model with box bounds equal to the training
    /// ranges and a window given in original property units.
    pub fn from_model(model: &TrainedModel, window: (f64, f64), epsilon: f64) -> Self {
        let s = &model.standardizer;
        let descs = model.registry.descriptors();
        InverseProblemSpec {
            hyperplane: model.hyperplane.clone(),
            window: (s.forward_value(window.0), s.forward_value(window.1)),
            integer: descs.iter().map(|d| d.is_integer()).collect(),
            nonnegative: descs.iter().map(|d| d.is_nonnegative()).collect(),
            lower: s.min.clone(),
            upper: s.max.clone(),
            min: s.min.clone(),
            max: s.max.clone(),
            epsilon,
        }
    }

    pub fn dim(&self) -> usize {
        self.hyperplane.w.len()
    }

    pub fn is_constant(&self, j: usize) -> bool {
        self.max[j] <= self.min[j]
    }

    fn validate(&self) -> Result<(), MilpError> {
        let k = self.dim();
        for len in [self.integer.len(), self.nonnegative.len(), self.lower.len(), self.upper.len(), self.min.len(), self.max.len()] {
            if len != k {
                return Err(MilpError::Dimension { expected: k, got: len });
            }
        }
        if !(self.epsilon > 0.0) || !self.epsilon.is_finite() {
            return Err(MilpError::BadEpsilon);
        }
        if !(self.window.0 < self.window.1) {
            return Err(MilpError::BadWindow(self.window.0, self.window.1));
        }
        for j in 0..k {
            if self.lower[j] > self.upper[j] {
                return Err(MilpError::BadBounds(j));
            }
        }
        Ok(())
    }
}

/// Variable indices of the inverse model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InverseLayout {
    pub x: Vec<usize>,
    pub x_hat: Vec<usize>,
}

/// Descriptor variables `x` with box bounds, standardized variables `x̂`,
/// the target window on `w·x̂ + b`, and for every non-constant descriptor
/// `(1-ε)(x-min)/range <= x̂ <= (1+ε)(x-min)/range`.
pub fn build_inverse_milp(spec: &InverseProblemSpec) -> Result<(MilpModel, InverseLayout), MilpError> {
    spec.validate()?;
    let k = spec.dim();
    let mut m = MilpModel::new("inverse");
    let mut layout = InverseLayout { x: Vec::with_capacity(k), x_hat: Vec::with_capacity(k) };
    for j in 0..k {
        let mut lo = spec.lower[j];
        let mut hi = spec.upper[j];
        if spec.nonnegative[j] {
            lo = lo.max(0.0);
        }
        let kind = if spec.integer[j] {
            lo = lo.ceil();
            hi = hi.floor();
            VarKind::Integer
        } else {
            VarKind::Continuous
        };
        layout.x.push(m.add_var(&format!("x{j}"), Some(lo), Some(hi), kind));
    }
    for j in 0..k {
        let b = if spec.is_constant(j) { (Some(0.0), Some(0.0)) } else { (None, None) };
        layout.x_hat.push(m.add_var(&format!("xh{j}"), b.0, b.1, VarKind::Continuous));
    }
    let terms: Vec<(usize, f64)> =
        (0..k).filter(|&j| spec.hyperplane.w[j] != 0.0).map(|j| (layout.x_hat[j], spec.hyperplane.w[j])).collect();
    let b = spec.hyperplane.b;
    m.add_constraint("target_lo", terms.clone(), Relation::Ge, spec.window.0 - b);
    m.add_constraint("target_hi", terms, Relation::Le, spec.window.1 - b);
    let eps = spec.epsilon;
    for j in 0..k {
        if spec.is_constant(j) {
            continue;
        }
        let r = spec.max[j] - spec.min[j];
        let (lo, hi) = ((1.0 - eps) / r, (1.0 + eps) / r);
        m.add_constraint(
            &format!("norm_lo{j}"),
            vec![(layout.x[j], lo), (layout.x_hat[j], -1.0)],
            Relation::Le,
            product_rounded_up(lo, spec.min[j]),
        );
        m.add_constraint(
            &format!("norm_hi{j}"),
            vec![(layout.x_hat[j], 1.0), (layout.x[j], -hi)],
            Relation::Le,
            product_rounded_up(-hi, spec.min[j]),
        );
    }
    Ok((m, layout))
}

/// Smallest `f64` not below the exact product, so that `x = min` keeps
/// `x̂ = 0` feasible in exact arithmetic.
fn product_rounded_up(a: f64, b: f64) -> f64 {
    let p = a * b;
    if rational(p) >= rational(a) * rational(b) {
        p
    } else {
        p.next_up()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InverseSolution {
    pub status: MilpStatus,
    /// Descriptor values.
    pub x: Vec<f64>,
    pub x_hat: Vec<f64>,
    /// `w·x̂ + b` (standardized), computed exactly then rounded.
    pub y_hat: f64,
    /// Prediction on the exact standardization of `x`.
    pub y_of_x: f64,
    /// Bound on `|y_of_x - y_hat|` implied by the tolerance.
    pub slack_bound: f64,
    pub nodes: usize,
}

pub fn solve_inverse(spec: &InverseProblemSpec, limits: &SolveLimits) -> Result<InverseSolution, MilpError> {
    let (model, layout) = build_inverse_milp(spec)?;
    let sol = solve(&model, limits)?;
    let slack_bound = spec.epsilon * abs_sum(&spec.hyperplane.w);
    if sol.status != MilpStatus::Feasible {
        return Ok(InverseSolution {
            status: sol.status,
            x: vec![],
            x_hat: vec![],
            y_hat: f64::NAN,
            y_of_x: f64::NAN,
            slack_bound,
            nodes: sol.nodes,
        });
    }
    let q = &sol.exact;
    let w: Vec<BigRational> = spec.hyperplane.w.iter().map(|&v| rational(v)).collect();
    let b = rational(spec.hyperplane.b);
    let y_hat = (0..spec.dim()).fold(b.clone(), |s, j| s + &w[j] * &q[layout.x_hat[j]]);
    let y_of_x = (0..spec.dim()).fold(b, |s, j| {
        if spec.is_constant(j) {
            return s;
        }
        let t = (&q[layout.x[j]] - rational(spec.min[j])) / (rational(spec.max[j]) - rational(spec.min[j]));
        s + &w[j] * t
    });
    Ok(InverseSolution {
        status: sol.status,
        x: layout.x.iter().map(|&i| sol.values[i]).collect(),
        x_hat: layout.x_hat.iter().map(|&i| sol.values[i]).collect(),
        y_hat: y_hat.to_f64(),
        y_of_x: y_of_x.to_f64(),
        slack_bound,
        nodes: sol.nodes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_dim(window: (f64, f64)) -> InverseProblemSpec {
        InverseProblemSpec {
            hyperplane: Hyperplane { w: vec![1.0], b: 0.0 },
            window,
            integer: vec![true],
            nonnegative: vec![true],
            lower: vec![0.0],
            upper: vec![10.0],
            min: vec![0.0],
            max: vec![10.0],
            epsilon: 1e-5,
        }
    }

    #[test]
    fn construction_counts() {
        let (m, l) = build_inverse_milp(&one_dim((0.4, 0.6))).unwrap();
        assert_eq!(m.vars.len(), 2);
        assert_eq!(m.vars.iter().filter(|v| v.kind == VarKind::Integer).count(), 1);
        assert_eq!(m.constraints.len(), 4);
        assert!(m.constraints.iter().all(|c| c.rel != Relation::Eq));
        assert_eq!(m.vars[l.x[0]].upper, Some(10.0));
        assert!(m.objective.is_empty());
    }

    #[test]
    fn normalization_pins_endpoints() {
        let spec = one_dim((0.4, 0.6));
        let (m, l) = build_inverse_milp(&spec).unwrap();
        let q = |v: f64| rational(v);
        // x at the minimum: x̂ must be exactly 0
        let mut pt = vec![q(0.0), q(0.0)];
        let norm_only = MilpModel { constraints: m.constraints[2..].to_vec(), ..m.clone() };
        assert!(norm_only.verify(&pt));
        pt[l.x_hat[0]] = q(1e-9);
        assert!(!norm_only.verify(&pt));
        // x at the maximum: x̂ within [1-ε, 1+ε]
        let mut pt = vec![q(10.0), q(1.0 - 0.9e-5)];
        assert!(norm_only.verify(&pt));
        pt[1] = q(1.0 + 1.1e-5);
        assert!(!norm_only.verify(&pt));
    }

    #[test]
    fn solves_and_bounds_slack() {
        let s = solve_inverse(&one_dim((0.42, 0.58)), &SolveLimits::default()).unwrap();
        assert_eq!(s.status, MilpStatus::Feasible);
        assert_eq!(s.x, vec![5.0]);
        assert!((s.y_of_x - s.y_hat).abs() <= s.slack_bound);
        let s = solve_inverse(&one_dim((0.52, 0.58)), &SolveLimits::default()).unwrap();
        assert_eq!(s.status, MilpStatus::Infeasible);
    }

    #[test]
    fn rejects_bad_specs() {
        let mut s = one_dim((0.6, 0.4));
        assert_eq!(build_inverse_milp(&s).unwrap_err(), MilpError::BadWindow(0.6, 0.4));
        s.window = (0.1, 0.2);
        s.epsilon = 0.0;
        assert_eq!(build_inverse_milp(&s).unwrap_err(), MilpError::BadEpsilon);
    }
}
