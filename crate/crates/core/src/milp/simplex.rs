//! Phase-one dense simplex over an ordered field.
//!
//! Only feasibility is decided: the LP is brought to `y >= 0` form, an
//! artificial variable is added for every row that has no slack to start
//! the basis, and their sum is minimized with Bland's rule.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive, Zero};

use super::Relation;

/// Scalar usable by the simplex: exact fields use zero tolerances.
pub trait LpScalar: Clone + Num + Signed + PartialOrd + Debug {
    /// Magnitudes at or below this count as zero during pivoting.
    fn pivot_tol() -> Self;
    /// Phase-one optimum at or below this counts as feasible.
    fn feas_tol() -> Self;
    fn from_f64(x: f64) -> Self;
    fn to_f64(&self) -> f64;
    fn is_integral(&self) -> bool;
    fn round(&self) -> Self;
}

impl LpScalar for f64 {
    fn pivot_tol() -> Self {
        1e-9
    }
    fn feas_tol() -> Self {
        1e-7
    }
    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn is_integral(&self) -> bool {
        (self - f64::round(*self)).abs() <= 1e-6
    }
    fn round(&self) -> Self {
        f64::round(*self)
    }
}

impl LpScalar for BigRational {
    fn pivot_tol() -> Self {
        BigRational::zero()
    }
    fn feas_tol() -> Self {
        BigRational::zero()
    }
    fn from_f64(x: f64) -> Self {
        BigRational::from_float(x).expect("finite coefficient")
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn is_integral(&self) -> bool {
        self.is_integer()
    }
    fn round(&self) -> Self {
        BigRational::round(self)
    }
}

pub fn rational(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite value")
}

pub fn rational_int(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from_i64(x).unwrap())
}

/// A row `Σ coef·x rel rhs` over original variables.
#[derive(Debug, Clone)]
pub struct LpRow<T> {
    pub terms: Vec<(usize, T)>,
    pub rel: Relation,
    pub rhs: T,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome<T> {
    Feasible(Vec<T>),
    /// Infeasible, with the phase-one optimum reached.
    Infeasible(T),
    IterationLimit,
}

/// Bounds are `None` for infinite.
pub fn phase_one<T: LpScalar>(
    bounds: &[(Option<T>, Option<T>)],
    rows: &[LpRow<T>],
    max_pivots: usize,
) -> LpOutcome<T> {
    // x_i = offset_i + Σ sign·y_c
    let mut map: Vec<(T, Vec<(usize, T)>)> = Vec::with_capacity(bounds.len());
    let mut ncols = 0;
    let mut all_rows: Vec<(Vec<(usize, T)>, Relation, T)> = Vec::new();
    for (l, u) in bounds {
        match (l, u) {
            (Some(l), u) => {
                if let Some(u) = u {
                    if u < l {
                        return LpOutcome::Infeasible(l.clone() - u.clone());
                    }
                    all_rows.push((vec![(ncols, T::one())], Relation::Le, u.clone() - l.clone()));
                }
                map.push((l.clone(), vec![(ncols, T::one())]));
                ncols += 1;
            }
            (None, Some(u)) => {
                map.push((u.clone(), vec![(ncols, -T::one())]));
                ncols += 1;
            }
            (None, None) => {
                map.push((T::zero(), vec![(ncols, T::one()), (ncols + 1, -T::one())]));
                ncols += 2;
            }
        }
    }
    for r in rows {
        let mut dense: Vec<T> = vec![T::zero(); ncols];
        let mut rhs = r.rhs.clone();
        for (i, a) in &r.terms {
            let (off, cols) = &map[*i];
            rhs = rhs - a.clone() * off.clone();
            for (c, s) in cols {
                dense[*c] = dense[*c].clone() + a.clone() * s.clone();
            }
        }
        let sparse = dense.into_iter().enumerate().filter(|(_, v)| !v.is_zero()).collect();
        all_rows.push((sparse, r.rel, rhs));
    }

    let m = all_rows.len();
    let n_slack = all_rows.iter().filter(|r| r.1 != Relation::Eq).count();
    // artificial needed unless the row is `<=` with non-negative rhs
    let needs_art: Vec<bool> =
        all_rows.iter().map(|(_, rel, b)| !(*rel == Relation::Le && !b.is_negative())).collect();
    let n_art = needs_art.iter().filter(|&&b| b).count();
    let width = ncols + n_slack + n_art;
    let mut tab: Vec<Vec<T>> = vec![vec![T::zero(); width + 1]; m];
    let mut basis = vec![0usize; m];
    let mut is_art = vec![false; width];
    let (mut s, mut a) = (ncols, ncols + n_slack);
    for (i, (terms, rel, b)) in all_rows.iter().enumerate() {
        let flip = b.is_negative();
        let sign = if flip { -T::one() } else { T::one() };
        for (c, v) in terms {
            tab[i][*c] = v.clone() * sign.clone();
        }
        tab[i][width] = b.clone() * sign.clone();
        let slack_col = match rel {
            Relation::Eq => None,
            Relation::Le => Some(T::one()),
            Relation::Ge => Some(-T::one()),
        };
        if let Some(sv) = slack_col {
            tab[i][s] = sv * sign.clone();
            if !needs_art[i] {
                basis[i] = s;
            }
            s += 1;
        }
        if needs_art[i] {
            tab[i][a] = T::one();
            is_art[a] = true;
            basis[i] = a;
            a += 1;
        }
    }
    // reduced costs of the phase-one objective Σ artificials
    let mut cost = vec![T::zero(); width + 1];
    for i in 0..m {
        if is_art[basis[i]] {
            for j in 0..=width {
                if j == width || !is_art[j] {
                    cost[j] = cost[j].clone() - tab[i][j].clone();
                }
            }
        }
    }
    let tol = T::pivot_tol();
    let mut pivots = 0;
    loop {
        let Some(enter) = (0..width).find(|&j| !is_art[j] && cost[j] < -tol.clone()) else {
            break;
        };
        let mut leave: Option<(usize, T)> = None;
        for i in 0..m {
            if tab[i][enter] > tol {
                let ratio = tab[i][width].clone() / tab[i][enter].clone();
                let better = match &leave {
                    None => true,
                    Some((l, r)) => ratio < *r || (ratio == *r && basis[i] < basis[*l]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        // phase one is bounded below, so a column with negative cost always has a pivot
        let Some((r, _)) = leave else { break };
        pivot(&mut tab, &mut cost, r, enter);
        basis[r] = enter;
        pivots += 1;
        if pivots > max_pivots {
            return LpOutcome::IterationLimit;
        }
    }
    let infeas = -cost[width].clone();
    if infeas > T::feas_tol() {
        return LpOutcome::Infeasible(infeas);
    }
    let mut y = vec![T::zero(); width];
    for i in 0..m {
        y[basis[i]] = tab[i][width].clone();
    }
    let x = map
        .iter()
        .map(|(off, cols)| cols.iter().fold(off.clone(), |acc, (c, s)| acc + s.clone() * y[*c].clone()))
        .collect();
    LpOutcome::Feasible(x)
}

fn pivot<T: LpScalar>(tab: &mut [Vec<T>], cost: &mut [T], r: usize, c: usize) {
    let p = tab[r][c].clone();
    for v in tab[r].iter_mut() {
        *v = v.clone() / p.clone();
    }
    let prow = tab[r].clone();
    let nz: Vec<usize> = (0..prow.len()).filter(|&j| !prow[j].is_zero()).collect();
    for (i, row) in tab.iter_mut().enumerate() {
        if i == r || row[c].is_zero() {
            continue;
        }
        let f = row[c].clone();
        for &j in &nz {
            row[j] = row[j].clone() - f.clone() * prow[j].clone();
        }
    }
    if !cost[c].is_zero() {
        let f = cost[c].clone();
        for &j in &nz {
            cost[j] = cost[j].clone() - f.clone() * prow[j].clone();
        }
    }
}
