//! Small dense helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};

/// Condition number above which a system is treated as singular.
pub const MAX_CONDITION: f64 = 1e12;

pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    let mut sv: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

pub fn smallest_singular_value(m: &DMatrix<f64>) -> f64 {
    singular_values(m).last().copied().unwrap_or(0.0)
}

pub fn condition_number(m: &DMatrix<f64>) -> f64 {
    let sv = singular_values(m);
    match (sv.first(), sv.last()) {
        (Some(&max), Some(&min)) if min > 0.0 => max / min,
        _ => f64::INFINITY,
    }
}

/// Inverse, or `None` when the matrix is singular or ill-conditioned.
pub fn checked_inverse(m: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    if m.nrows() != m.ncols() || condition_number(m) > MAX_CONDITION {
        return None;
    }
    m.clone().try_inverse()
}

/// Solve a square system with full pivoting; `None` if numerically singular.
pub fn solve_square(a: &DMatrix<f64>, b: &DVector<f64>) -> Option<DVector<f64>> {
    let n = a.nrows();
    if n == 0 {
        return Some(DVector::zeros(0));
    }
    let lu = a.clone().full_piv_lu();
    let u = lu.u();
    let max = (0..n).map(|i| u[(i, i)].abs()).fold(0.0, f64::max);
    let min = (0..n).map(|i| u[(i, i)].abs()).fold(f64::INFINITY, f64::min);
    if max == 0.0 || min <= max * 1e-12 {
        return None;
    }
    lu.solve(b)
}

/// Numerical rank with relative tolerance `tol`.
pub fn rank(m: &DMatrix<f64>, tol: f64) -> usize {
    let sv = singular_values(m);
    let scale = sv.first().copied().unwrap_or(0.0).max(1.0);
    sv.iter().filter(|s| **s > tol * scale).count()
}

/// Row vector times matrix, `x M`.
pub fn vec_mat(x: &[f64], m: &DMatrix<f64>) -> Vec<f64> {
    assert_eq!(x.len(), m.nrows());
    (0..m.ncols()).map(|j| crate::model::fsum((0..m.nrows()).map(|i| x[i] * m[(i, j)]))).collect()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    crate::model::fsum(a.iter().zip(b).map(|(x, y)| x * y))
}

pub fn linf_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn l1_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}
