//! Mixed-integer linear models, a feasibility branch-and-bound solver, the
//! inverse-prediction model and CPLEX LP export.
//!
//! Coefficients are stored as `f64`; every accepted solution is re-checked
//! in exact rational arithmetic against those coefficients.

mod inverse;
mod lp_format;
pub mod simplex;

use std::time::{Duration, Instant};

use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use simplex::{phase_one, rational, LpOutcome, LpRow, LpScalar};

pub use inverse::{build_inverse_milp, InverseLayout, InverseProblemSpec, InverseSolution, solve_inverse};
pub use lp_format::{emit_lp, parse_lp, LpParseError};

#[derive(Debug, Error, PartialEq)]
pub enum MilpError {
    #[error("integer variable {0} needs finite bounds")]
    UnboundedInteger(String),
    #[error("constraint {constraint} refers to variable {var} of {n}")]
    UnknownVariable { constraint: String, var: usize, n: usize },
    #[error("non-finite coefficient in {0}")]
    NonFinite(String),
    #[error("tolerance must be positive")]
    BadEpsilon,
    #[error("empty target window [{0}, {1}]")]
    BadWindow(f64, f64),
    #[error("descriptor {0}: lower bound above upper bound")]
    BadBounds(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VarKind {
    Integer,
    Continuous,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Variable {
    pub name: String,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub kind: VarKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub name: String,
    pub terms: Vec<(usize, f64)>,
    pub rel: Relation,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MilpModel {
    pub name: String,
    pub vars: Vec<Variable>,
    pub constraints: Vec<Constraint>,
    /// Minimization objective; empty means pure feasibility.
    pub objective: Vec<(usize, f64)>,
}

impl MilpModel {
    pub fn new(name: &str) -> Self {
        MilpModel { name: name.to_string(), ..Default::default() }
    }

    pub fn add_var(&mut self, name: &str, lower: Option<f64>, upper: Option<f64>, kind: VarKind) -> usize {
        self.vars.push(Variable { name: name.to_string(), lower, upper, kind });
        self.vars.len() - 1
    }

    pub fn add_constraint(&mut self, name: &str, terms: Vec<(usize, f64)>, rel: Relation, rhs: f64) {
        self.constraints.push(Constraint { name: name.to_string(), terms, rel, rhs });
    }

    pub fn validate(&self) -> Result<(), MilpError> {
        for v in &self.vars {
            if v.kind == VarKind::Integer && (v.lower.is_none() || v.upper.is_none()) {
                return Err(MilpError::UnboundedInteger(v.name.clone()));
            }
            if v.lower.is_some_and(|x| !x.is_finite()) || v.upper.is_some_and(|x| !x.is_finite()) {
                return Err(MilpError::NonFinite(v.name.clone()));
            }
        }
        for c in &self.constraints {
            for &(i, a) in &c.terms {
                if i >= self.vars.len() {
                    return Err(MilpError::UnknownVariable { constraint: c.name.clone(), var: i, n: self.vars.len() });
                }
                if !a.is_finite() {
                    return Err(MilpError::NonFinite(c.name.clone()));
                }
            }
            if !c.rhs.is_finite() {
                return Err(MilpError::NonFinite(c.name.clone()));
            }
        }
        Ok(())
    }

    /// Exact check of bounds, integrality and every constraint.
    pub fn verify(&self, x: &[BigRational]) -> bool {
        if x.len() != self.vars.len() {
            return false;
        }
        for (v, val) in self.vars.iter().zip(x) {
            if v.lower.is_some_and(|l| *val < rational(l)) || v.upper.is_some_and(|u| *val > rational(u)) {
                return false;
            }
            if v.kind == VarKind::Integer && !val.is_integer() {
                return false;
            }
        }
        self.constraints.iter().all(|c| {
            let lhs = c.terms.iter().fold(BigRational::zero(), |s, &(i, a)| s + rational(a) * &x[i]);
            let rhs = rational(c.rhs);
            match c.rel {
                Relation::Le => lhs <= rhs,
                Relation::Eq => lhs == rhs,
                Relation::Ge => lhs >= rhs,
            }
        })
    }

    fn rows<T: LpScalar>(&self) -> Vec<LpRow<T>> {
        self.constraints
            .iter()
            .map(|c| LpRow {
                terms: c.terms.iter().map(|&(i, a)| (i, T::from_f64(a))).collect(),
                rel: c.rel,
                rhs: T::from_f64(c.rhs),
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MilpStatus {
    Feasible,
    Infeasible,
    BoundLimit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MilpSolution {
    pub status: MilpStatus,
    /// Exact assignment when feasible.
    pub exact: Vec<BigRational>,
    pub values: Vec<f64>,
    pub nodes: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveLimits {
    pub max_nodes: usize,
    pub max_time: Option<Duration>,
    /// Solve node relaxations in rationals; `None` decides by model size.
    pub exact_relaxations: Option<bool>,
}

impl Default for SolveLimits {
    fn default() -> Self {
        SolveLimits { max_nodes: 200_000, max_time: None, exact_relaxations: None }
    }
}

/// Tableau cells below which node relaxations are solved exactly by default.
const EXACT_CELLS: usize = 4_000;
const MAX_PIVOTS: usize = 200_000;

type Bounds = Vec<(Option<f64>, Option<f64>)>;

enum Relax {
    Point(Vec<f64>, Option<Vec<BigRational>>),
    Infeasible,
    Limit,
}

struct Solver {
    rows_f: Vec<LpRow<f64>>,
    rows_q: Vec<LpRow<BigRational>>,
    exact: bool,
}

impl Solver {
    fn relax(&self, b: &Bounds) -> Relax {
        if self.exact {
            return match self.relax_exact(b) {
                LpOutcome::Feasible(q) => Relax::Point(q.iter().map(|v| v.to_f64()).collect(), Some(q)),
                LpOutcome::Infeasible(_) => Relax::Infeasible,
                LpOutcome::IterationLimit => Relax::Limit,
            };
        }
        match phase_one(b, &self.rows_f, MAX_PIVOTS) {
            LpOutcome::Feasible(x) => Relax::Point(x, None),
            // a near-zero phase-one optimum could be rounding; settle it exactly
            LpOutcome::Infeasible(r) if r < 1e-4 => match self.relax_exact(b) {
                LpOutcome::Feasible(q) => Relax::Point(q.iter().map(|v| v.to_f64()).collect(), Some(q)),
                LpOutcome::Infeasible(_) => Relax::Infeasible,
                LpOutcome::IterationLimit => Relax::Limit,
            },
            LpOutcome::Infeasible(_) => Relax::Infeasible,
            LpOutcome::IterationLimit => match self.relax_exact(b) {
                LpOutcome::Feasible(q) => Relax::Point(q.iter().map(|v| v.to_f64()).collect(), Some(q)),
                LpOutcome::Infeasible(_) => Relax::Infeasible,
                LpOutcome::IterationLimit => Relax::Limit,
            },
        }
    }

    fn relax_exact(&self, b: &Bounds) -> LpOutcome<BigRational> {
        let bq: Vec<_> = b.iter().map(|(l, u)| (l.map(rational), u.map(rational))).collect();
        phase_one(&bq, &self.rows_q, MAX_PIVOTS)
    }
}

/// Feasibility branch-and-bound: depth-first, branching on the most
/// fractional integer variable, floor side first.
pub fn solve(m: &MilpModel, limits: &SolveLimits) -> Result<MilpSolution, MilpError> {
    m.validate()?;
    let start = Instant::now();
    let cells = (m.constraints.len() + m.vars.len()) * (3 * m.vars.len() + m.constraints.len());
    let solver = Solver {
        rows_f: m.rows(),
        rows_q: m.rows(),
        exact: limits.exact_relaxations.unwrap_or(cells <= EXACT_CELLS),
    };
    let root: Bounds = m
        .vars
        .iter()
        .map(|v| match v.kind {
            // integral bounds for integer variables
            VarKind::Integer => (v.lower.map(f64::ceil), v.upper.map(f64::floor)),
            VarKind::Continuous => (v.lower, v.upper),
        })
        .collect();
    let mut stack = vec![root];
    let mut nodes = 0;
    let done = |status, exact: Vec<BigRational>, nodes| {
        let values = exact.iter().map(|v| v.to_f64()).collect();
        Ok(MilpSolution { status, exact, values, nodes })
    };
    while let Some(b) = stack.pop() {
        nodes += 1;
        if nodes > limits.max_nodes || limits.max_time.is_some_and(|t| start.elapsed() > t) {
            return done(MilpStatus::BoundLimit, vec![], nodes);
        }
        let (x, xq) = match solver.relax(&b) {
            Relax::Infeasible => continue,
            Relax::Limit => return done(MilpStatus::BoundLimit, vec![], nodes),
            Relax::Point(x, q) => (x, q),
        };
        let integral = |j: usize| match &xq {
            Some(q) => q[j].is_integer(),
            None => LpScalar::is_integral(&x[j]),
        };
        let frac = (0..m.vars.len())
            .filter(|&j| m.vars[j].kind == VarKind::Integer && !integral(j))
            .max_by(|&i, &j| {
                let f = |v: f64| (v - v.floor() - 0.5).abs();
                f(x[j]).total_cmp(&f(x[i])).then(j.cmp(&i))
            });
        if let Some(j) = frac {
            let (fl, ce) = match &xq {
                Some(q) => (q[j].floor().to_f64(), q[j].ceil().to_f64()),
                None => (x[j].floor(), x[j].ceil()),
            };
            let mut up = b.clone();
            up[j].0 = Some(ce);
            let mut down = b;
            down[j].1 = Some(fl);
            stack.push(up);
            stack.push(down);
            continue;
        }
        // integral point: fix integers and settle the rest exactly
        let mut fixed = b.clone();
        for (j, v) in m.vars.iter().enumerate() {
            if v.kind == VarKind::Integer {
                let r = x[j].round();
                fixed[j] = (Some(r), Some(r));
            }
        }
        let exact = match &xq {
            Some(q) if m.verify(q) => Some(q.clone()),
            _ => match solver.relax_exact(&fixed) {
                LpOutcome::Feasible(q) if m.verify(&q) => Some(q),
                _ => None,
            },
        };
        if let Some(q) = exact {
            return done(MilpStatus::Feasible, q, nodes);
        }
        // the rounded point failed; split on a free integer around it
        if let Some(j) = (0..m.vars.len()).find(|&j| m.vars[j].kind == VarKind::Integer && b[j].0 != b[j].1) {
            let r = x[j].round();
            let mut lo = b.clone();
            lo[j].1 = Some(r - 1.0);
            let mut hi = b.clone();
            hi[j].0 = Some(r + 1.0);
            let mut mid = b;
            mid[j] = (Some(r), Some(r));
            stack.push(hi);
            stack.push(lo);
            stack.push(mid);
        }
    }
    done(MilpStatus::Infeasible, vec![], nodes)
}

/// `Σ a·x` evaluated exactly.
pub fn exact_dot(terms: &[(usize, f64)], x: &[BigRational]) -> BigRational {
    terms.iter().fold(BigRational::zero(), |s, &(i, a)| s + rational(a) * &x[i])
}

pub(crate) fn abs_sum(w: &[f64]) -> f64 {
    w.iter().map(|v| v.abs()).sum()
}
