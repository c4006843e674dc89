//! Combinatorial vertex enumeration for polytopes inside the probability
//! simplex: every vertex is the unique solution of the independent equalities
//! plus enough active inequalities to pin down a point.

use itertools::Itertools;
use nalgebra::{DMatrix, DVector};

use super::{Constraint, HForm};
use crate::error::{Error, Result};
use crate::linalg::{dot, linf_distance, solve_square};
use crate::model::EPS_GEOM;

/// Largest number of free directions handled (simplex of dimension 10).
pub const MAX_FREE_DIM: usize = 9;
const MAX_COMBINATIONS: u128 = 5_000_000;

/// Greedy selection of linearly independent rows (Gram-Schmidt on normals).
fn independent_rows(rows: &[Constraint]) -> Vec<usize> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut keep = Vec::new();
    for (idx, c) in rows.iter().enumerate() {
        let norm = dot(&c.normal, &c.normal).sqrt();
        if norm == 0.0 {
            continue;
        }
        let mut r = c.normal.clone();
        for q in &basis {
            let f = dot(&r, q);
            for (x, y) in r.iter_mut().zip(q) {
                *x -= f * y;
            }
        }
        let rn = dot(&r, &r).sqrt();
        if rn > 1e-9 * norm {
            basis.push(r.iter().map(|x| x / rn).collect());
            keep.push(idx);
        }
    }
    keep
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Vertices of the lifted polytope `{y >= 0, sum y = 1, halfspaces, equalities}`.
pub fn enumerate_lifted(h: &HForm) -> Result<Vec<Vec<f64>>> {
    let m = h.dim;
    let mut equalities = h.equalities.clone();
    equalities.push(Constraint { normal: vec![1.0; m], bound: 1.0 });
    let eq_idx = independent_rows(&equalities);
    let rank = eq_idx.len();
    let free = m.saturating_sub(rank);
    if free > MAX_FREE_DIM {
        return Err(Error::DimensionTooLarge(free + 1));
    }

    let mut inequalities: Vec<Constraint> = h.halfspaces.clone();
    for j in 0..m {
        let mut normal = vec![0.0; m];
        normal[j] = -1.0;
        inequalities.push(Constraint { normal, bound: 0.0 });
    }
    if binomial(inequalities.len(), free) > MAX_COMBINATIONS {
        return Err(Error::DimensionTooLarge(free + 1));
    }

    let mut points: Vec<Vec<f64>> = Vec::new();
    for active in (0..inequalities.len()).combinations(free) {
        let system: Vec<&Constraint> =
            eq_idx.iter().map(|&i| &equalities[i]).chain(active.iter().map(|&i| &inequalities[i])).collect();
        let a = DMatrix::from_fn(m, m, |i, j| system[i].normal[j]);
        let b = DVector::from_iterator(m, system.iter().map(|c| c.bound));
        let Some(y) = solve_square(&a, &b) else { continue };
        let y: Vec<f64> = y.iter().copied().collect();
        if !h.lifted_feasible(&y, EPS_GEOM) {
            continue;
        }
        let y: Vec<f64> = y.iter().map(|v| v.max(0.0)).collect();
        if !points.iter().any(|p| linf_distance(p, &y) <= EPS_GEOM) {
            points.push(y);
        }
    }
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn independent_rows_drops_duplicates() {
        let rows = vec![
            Constraint { normal: vec![1.0, 0.0], bound: 0.0 },
            Constraint { normal: vec![2.0, 0.0], bound: 0.0 },
            Constraint { normal: vec![1.0, 1.0], bound: 1.0 },
        ];
        assert_eq!(independent_rows(&rows), vec![0, 2]);
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(18, 8), 43758);
        assert_eq!(binomial(3, 5), 0);
    }
}
