//! Maintainability of plain Markov manpower systems under control by
//! recruitment, for a system whose total size grows by `1 + alpha` per period.
//!
//! A structure `s` is maintainable iff `r+ = (1+alpha) s - s P` is
//! nonnegative. The maintainable region is the intersection of the simplex with
//! the halfspaces `(s P)_i <= (1+alpha) s_i`; when `(1+alpha) I - P` is an
//! invertible M-matrix its vertices are the normalised rows of the inverse.

use nalgebra::DMatrix;
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use crate::error::{Error, Result};
use crate::linalg::{checked_inverse, rank, vec_mat};
use crate::model::{fsum, l1_normalize, ProbabilityStructure, SubstochasticMatrix, EPS_GEOM};
use crate::region::{canonical_vertices, enumerate_vertices, Constraint, HForm, Lift, Provenance, Region};

/// Growth factor `1 + alpha` with `alpha >= -1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthFactor(f64);

impl GrowthFactor {
    pub fn new(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha < -1.0 {
            return Err(Error::InvalidGrowth(alpha));
        }
        Ok(Self(alpha))
    }

    pub fn constant() -> Self {
        Self(0.0)
    }

    pub fn alpha(&self) -> f64 {
        self.0
    }

    /// `1 + alpha`.
    pub fn factor(&self) -> f64 {
        1.0 + self.0
    }
}

/// Witness that `s` is maintainable: `s P + r_plus = (1+alpha) s`.
#[derive(Debug, Clone, PartialEq)]
pub struct MaintainabilityCertificate {
    pub structure: Vec<f64>,
    pub alpha: f64,
    pub r_plus: Vec<f64>,
    pub zero_recruitment: bool,
}

impl MaintainabilityCertificate {
    /// Total recruitment `||r+||_1`, equal to `s w' + alpha`.
    pub fn recruitment_total(&self) -> f64 {
        fsum(self.r_plus.iter().copied())
    }

    /// Normalised recruitment vector, absent under zero recruitment.
    pub fn recruitment(&self) -> Option<Vec<f64>> {
        if self.zero_recruitment {
            None
        } else {
            l1_normalize(&self.r_plus).ok()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Maintainability {
    Certified(MaintainabilityCertificate),
    /// Components where `(s P)_i > (1+alpha) s_i`, with the shortfall.
    Refused {
        violations: Vec<(usize, f64)>,
    },
}

impl Maintainability {
    pub fn certificate(&self) -> Option<&MaintainabilityCertificate> {
        match self {
            Maintainability::Certified(c) => Some(c),
            Maintainability::Refused { .. } => None,
        }
    }
}

/// Check whether a structure is maintainable and compute its recruitment.
pub fn check_maintainable(s: &[f64], p: &SubstochasticMatrix, g: GrowthFactor) -> Result<Maintainability> {
    if s.len() != p.dim() {
        return Err(Error::DimensionMismatch { expected: p.dim(), found: s.len() });
    }
    let inflow = vec_mat(s, p.matrix());
    let raw: Vec<f64> = s.iter().zip(&inflow).map(|(si, fi)| g.factor() * si - fi).collect();
    let violations: Vec<(usize, f64)> =
        raw.iter().enumerate().filter(|(_, r)| **r < -EPS_GEOM).map(|(i, r)| (i, -r)).collect();
    if !violations.is_empty() {
        return Ok(Maintainability::Refused { violations });
    }
    let r_plus: Vec<f64> = raw.iter().map(|r| r.max(0.0)).collect();
    let zero_recruitment = fsum(r_plus.iter().copied()) <= EPS_GEOM;
    Ok(Maintainability::Certified(MaintainabilityCertificate {
        structure: s.to_vec(),
        alpha: g.alpha(),
        r_plus,
        zero_recruitment,
    }))
}

/// Convenience wrapper for a validated structure.
pub fn check_structure(s: &ProbabilityStructure, p: &SubstochasticMatrix, g: GrowthFactor) -> Result<Maintainability> {
    check_maintainable(s.as_slice(), p, g)
}

/// Spectral radius of a nonnegative matrix.
///
/// The matrix is split into strongly connected components (its Frobenius
/// normal form); the radius is the largest over the irreducible diagonal
/// blocks, each computed with Collatz-Wielandt bounds on `I + B`. A dense
/// eigenvalue solve is the fallback when the bounds fail to close.
pub fn spectral_radius(b: &DMatrix<f64>) -> f64 {
    let n = b.nrows();
    let mut graph = DiGraph::<(), ()>::new();
    let nodes: Vec<_> = (0..n).map(|_| graph.add_node(())).collect();
    for i in 0..n {
        for j in 0..n {
            if b[(i, j)] > 0.0 {
                graph.add_edge(nodes[i], nodes[j], ());
            }
        }
    }
    let mut rho: f64 = 0.0;
    for component in tarjan_scc(&graph) {
        let idx: Vec<usize> = component.iter().map(|v| v.index()).collect();
        let block_rho = if idx.len() == 1 {
            b[(idx[0], idx[0])].max(0.0)
        } else {
            let sub = DMatrix::from_fn(idx.len(), idx.len(), |i, j| b[(idx[i], idx[j])]);
            irreducible_radius(&sub)
        };
        rho = rho.max(block_rho);
    }
    rho
}

fn irreducible_radius(b: &DMatrix<f64>) -> f64 {
    let n = b.nrows();
    let shifted = b + DMatrix::identity(n, n);
    let mut x = vec![1.0; n];
    let mut best: (f64, f64) = (0.0, f64::INFINITY);
    for _ in 0..20_000 {
        let y: Vec<f64> = (0..n).map(|i| fsum((0..n).map(|j| shifted[(i, j)] * x[j]))).collect();
        let ratios = y.iter().zip(&x).map(|(a, b)| a / b);
        let lo = ratios.clone().fold(f64::INFINITY, f64::min);
        let hi = ratios.fold(0.0, f64::max);
        best = (best.0.max(lo), best.1.min(hi));
        if best.1 - best.0 <= 4.0 * f64::EPSILON * best.1 {
            return 0.5 * (best.0 + best.1) - 1.0;
        }
        let norm = y.iter().copied().fold(0.0, f64::max);
        x = y.iter().map(|v| v / norm).collect();
    }
    if best.1 - best.0 <= 1e-12 * best.1 {
        return 0.5 * (best.0 + best.1) - 1.0;
    }
    b.complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Feasibility diagnostics for a growth factor.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityReport {
    pub max_wastage: f64,
    /// `alpha < -max_i w_i`: the system cannot shrink that fast.
    pub below_wastage_bound: bool,
    /// Columns without zeros whose diagonal exceeds `1 + alpha`.
    pub empty_by_column: Vec<usize>,
    pub spectral_radius: f64,
    /// `alpha > rho(P) - 1`: `(1+alpha) I - P` is inverse-positive.
    pub inverse_positive: bool,
}

impl FeasibilityReport {
    /// False when either necessary condition already rules out every structure.
    pub fn feasible(&self) -> bool {
        !self.below_wastage_bound && self.empty_by_column.is_empty()
    }
}

pub fn alpha_feasibility(p: &SubstochasticMatrix, g: GrowthFactor) -> FeasibilityReport {
    let max_wastage = p.wastage().max();
    let m = p.matrix();
    let empty_by_column =
        (0..p.dim()).filter(|&i| (0..p.dim()).all(|r| m[(r, i)] > 0.0) && m[(i, i)] > g.factor() + EPS_GEOM).collect();
    let rho = spectral_radius(m);
    FeasibilityReport {
        max_wastage,
        below_wastage_bound: g.alpha() < -max_wastage - EPS_GEOM,
        empty_by_column,
        spectral_radius: rho,
        inverse_positive: g.alpha() > rho - 1.0,
    }
}

/// Zero-recruitment structures: probability left eigenvectors of `P` for
/// eigenvalue `1 + alpha`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroRecruitment {
    /// Extreme points of eigenspace ∩ simplex, sorted.
    pub structures: Vec<Vec<f64>>,
    /// Geometric multiplicity of `1 + alpha` (0 when it is not an eigenvalue).
    pub multiplicity: usize,
}

pub fn zero_recruitment_structures(p: &SubstochasticMatrix, g: GrowthFactor) -> Result<ZeroRecruitment> {
    let l = p.dim();
    let shifted = p.matrix() - DMatrix::identity(l, l) * g.factor();
    let multiplicity = l - rank(&shifted, 1e-9);
    if multiplicity == 0 {
        return Ok(ZeroRecruitment { structures: Vec::new(), multiplicity });
    }
    let equalities =
        (0..l).map(|i| Constraint { normal: shifted.column(i).iter().copied().collect(), bound: 0.0 }).collect();
    let h = HForm { dim: l, halfspaces: Vec::new(), equalities, lift: Lift::Identity };
    Ok(ZeroRecruitment { structures: enumerate_vertices(&h)?, multiplicity })
}

/// Halfspaces `(y P)_i - (1+alpha) y_i <= 0` (or `= 0` where `equal(i)`).
pub(crate) fn maintainability_constraints(
    p: &DMatrix<f64>,
    factor: f64,
    equal: impl Fn(usize) -> bool,
) -> (Vec<Constraint>, Vec<Constraint>) {
    let n = p.nrows();
    let mut halfspaces = Vec::new();
    let mut equalities = Vec::new();
    for i in 0..n {
        let mut normal: Vec<f64> = p.column(i).iter().copied().collect();
        normal[i] -= factor;
        let c = Constraint { normal, bound: 0.0 };
        if equal(i) {
            equalities.push(c);
        } else {
            halfspaces.push(c);
        }
    }
    (halfspaces, equalities)
}

/// Normalised rows of `((1+alpha) I - P)^{-1} M` at `rows`, or `None` when
/// the system is ill-conditioned. Rows with a negative component come back as
/// `Err(row)` so the caller can fall back to enumeration.
pub(crate) fn inverse_candidates(
    p: &DMatrix<f64>,
    factor: f64,
    post: Option<&DMatrix<f64>>,
    rows: &[usize],
) -> Option<Vec<std::result::Result<Vec<f64>, usize>>> {
    let n = p.nrows();
    let inv = checked_inverse(&(DMatrix::identity(n, n) * factor - p))?;
    let full = match post {
        Some(m) => inv * m,
        None => inv,
    };
    Some(
        rows.iter()
            .map(|&r| {
                let row: Vec<f64> = full.row(r).iter().copied().collect();
                if row.iter().any(|v| *v < -EPS_GEOM) {
                    return Err(r);
                }
                let clamped: Vec<f64> = row.iter().map(|v| v.max(0.0)).collect();
                l1_normalize(&clamped).map_err(|_| r)
            })
            .collect(),
    )
}

/// Maintainable region of a Markov system with growth factor `1 + alpha`.
pub fn markov_region(p: &SubstochasticMatrix, g: GrowthFactor) -> Result<Region> {
    region_with_provenance(p, g, Provenance::Markov)
}

pub(crate) fn region_with_provenance(
    p: &SubstochasticMatrix,
    g: GrowthFactor,
    provenance: Provenance,
) -> Result<Region> {
    let l = p.dim();
    let (halfspaces, equalities) = maintainability_constraints(p.matrix(), g.factor(), |_| false);
    let hform = HForm { dim: l, halfspaces, equalities, lift: Lift::Identity };

    let rows: Vec<usize> = (0..l).collect();
    let rho = spectral_radius(p.matrix());
    let candidates = inverse_candidates(p.matrix(), g.factor(), None, &rows);
    let vertices = match candidates {
        Some(c) if g.alpha() > rho - 1.0 && c.iter().all(|r| r.is_ok()) => {
            canonical_vertices(c.into_iter().map(|r| r.expect("checked above")).collect())
        }
        Some(c) => {
            let mut pts: Vec<Vec<f64>> = c.into_iter().filter_map(|r| r.ok()).collect();
            pts.extend(enumerate_vertices(&hform)?);
            canonical_vertices(crate::region::prune_non_extreme(canonical_vertices(pts))?)
        }
        None => enumerate_vertices(&hform)?,
    };
    Region::new(l, g.alpha(), provenance, Some(vertices), Some(hform))
}
