//! Convex maintainable regions inside the probability simplex.
//!
//! A [`Region`] carries up to two representations: a vertex list (V-form) and
//! a halfspace system (H-form). The H-form may live in a lifted space (the
//! seniority-based states) together with the linear map back to
//! organisational structures; membership then becomes an LP feasibility
//! question. When both forms are present the H-form is authoritative and the
//! vertices are checked against it on construction.

mod enumerate;
pub mod lp;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dot, linf_distance};
use crate::model::{fsum, EPS_GEOM};

pub use enumerate::MAX_FREE_DIM;
pub use lp::{find_feasible, solve_lp, LinearProgram, LpOptions, LpOutcome};

/// `normal . y <= bound` (halfspace) or `normal . y = bound` (equality).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub normal: Vec<f64>,
    pub bound: f64,
}

/// Linear map from the constraint space to organisational structures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Lift {
    Identity,
    /// Sum consecutive blocks of `max_seniority + 1` coordinates.
    ReUnion {
        max_seniority: usize,
    },
}

/// Halfspace system over `y` with implicit `y >= 0` and `sum y = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HForm {
    pub dim: usize,
    pub halfspaces: Vec<Constraint>,
    pub equalities: Vec<Constraint>,
    pub lift: Lift,
}

impl HForm {
    /// The bare simplex of the given dimension.
    pub fn simplex(dim: usize) -> Self {
        Self { dim, halfspaces: Vec::new(), equalities: Vec::new(), lift: Lift::Identity }
    }

    /// Dimension of the projected (organisational) structures.
    pub fn output_dim(&self) -> usize {
        match self.lift {
            Lift::Identity => self.dim,
            Lift::ReUnion { max_seniority } => self.dim / (max_seniority + 1),
        }
    }

    pub fn project(&self, y: &[f64]) -> Vec<f64> {
        match self.lift {
            Lift::Identity => y.to_vec(),
            Lift::ReUnion { max_seniority } => y.chunks(max_seniority + 1).map(|b| fsum(b.iter().copied())).collect(),
        }
    }

    /// Output coordinate that lifted coordinate `i` contributes to.
    fn lift_target(&self, i: usize) -> usize {
        match self.lift {
            Lift::Identity => i,
            Lift::ReUnion { max_seniority } => i / (max_seniority + 1),
        }
    }

    pub(crate) fn lifted_feasible(&self, y: &[f64], tol: f64) -> bool {
        y.iter().all(|v| *v >= -tol)
            && (fsum(y.iter().copied()) - 1.0).abs() <= tol
            && self.halfspaces.iter().all(|c| dot(&c.normal, y) <= c.bound + tol)
            && self.equalities.iter().all(|c| (dot(&c.normal, y) - c.bound).abs() <= tol)
    }

    fn validate(&self) -> Result<()> {
        if let Lift::ReUnion { max_seniority } = self.lift {
            if !self.dim.is_multiple_of(max_seniority + 1) {
                return Err(Error::DimensionMismatch { expected: max_seniority + 1, found: self.dim });
            }
        }
        for c in self.halfspaces.iter().chain(&self.equalities) {
            if c.normal.len() != self.dim {
                return Err(Error::DimensionMismatch { expected: self.dim, found: c.normal.len() });
            }
        }
        Ok(())
    }

    /// Membership of an organisational structure, within `EPS_GEOM`.
    pub fn contains(&self, s: &[f64]) -> Result<bool> {
        if s.len() != self.output_dim() {
            return Err(Error::DimensionMismatch { expected: self.output_dim(), found: s.len() });
        }
        if self.lift == Lift::Identity {
            return Ok(self.lifted_feasible(s, EPS_GEOM));
        }
        if s.iter().any(|v| *v < -EPS_GEOM) || (fsum(s.iter().copied()) - 1.0).abs() > EPS_GEOM {
            return Ok(false);
        }
        // y >= 0 plus one slack per halfspace; rows: equalities, halfspaces, projection
        let m = self.dim;
        let h = self.halfspaces.len();
        let width = m + h;
        let mut a = Vec::new();
        let mut b = Vec::new();
        for c in &self.equalities {
            let mut row = c.normal.clone();
            row.resize(width, 0.0);
            a.push(row);
            b.push(c.bound);
        }
        for (k, c) in self.halfspaces.iter().enumerate() {
            let mut row = c.normal.clone();
            row.resize(width, 0.0);
            row[m + k] = 1.0;
            a.push(row);
            b.push(c.bound + EPS_GEOM);
        }
        for (j, target) in s.iter().enumerate() {
            let row = (0..width).map(|i| if i < m && self.lift_target(i) == j { 1.0 } else { 0.0 }).collect();
            a.push(row);
            b.push(*target);
        }
        Ok(find_feasible(a, b, EPS_GEOM)?.is_some())
    }
}

/// Which construction produced a region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Markov,
    Sr,
    Induced,
}

impl std::fmt::Display for Provenance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Provenance::Markov => "markov",
            Provenance::Sr => "sr",
            Provenance::Induced => "induced",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    dimension: usize,
    alpha: f64,
    provenance: Provenance,
    vertices: Option<Vec<Vec<f64>>>,
    hform: Option<HForm>,
}

impl Region {
    /// Builds a region and cross-checks every vertex against the simplex and
    /// the H-form (when both are given).
    pub fn new(
        dimension: usize,
        alpha: f64,
        provenance: Provenance,
        vertices: Option<Vec<Vec<f64>>>,
        hform: Option<HForm>,
    ) -> Result<Self> {
        if let Some(h) = &hform {
            h.validate()?;
            if h.output_dim() != dimension {
                return Err(Error::DimensionMismatch { expected: dimension, found: h.output_dim() });
            }
        }
        if let Some(vs) = &vertices {
            for v in vs {
                if v.len() != dimension {
                    return Err(Error::DimensionMismatch { expected: dimension, found: v.len() });
                }
                if v.iter().any(|x| *x < -EPS_GEOM) || (fsum(v.iter().copied()) - 1.0).abs() > EPS_GEOM {
                    return Err(Error::NumericalInstability(format!("vertex {v:?} is not in the simplex")));
                }
                if let Some(h) = &hform {
                    if !h.contains(v)? {
                        return Err(Error::NumericalInstability(format!(
                            "vertex {v:?} violates the halfspace representation"
                        )));
                    }
                }
            }
        }
        Ok(Self { dimension, alpha, provenance, vertices, hform })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn vertices(&self) -> Option<&[Vec<f64>]> {
        self.vertices.as_deref()
    }

    pub fn hform(&self) -> Option<&HForm> {
        self.hform.as_ref()
    }

    /// Vertex list, enumerated from the H-form when no V-form is stored.
    pub fn vertex_list(&self) -> Result<Vec<Vec<f64>>> {
        match (&self.vertices, &self.hform) {
            (Some(v), _) => Ok(v.clone()),
            (None, Some(h)) => enumerate_vertices(h),
            (None, None) => Err(Error::NoRepresentation),
        }
    }

    pub fn is_empty(&self) -> Result<bool> {
        Ok(self.vertex_list()?.is_empty())
    }

    /// Membership within `EPS_GEOM`; boundary points count as inside.
    pub fn contains(&self, s: &[f64]) -> Result<bool> {
        if s.len() != self.dimension {
            return Err(Error::DimensionMismatch { expected: self.dimension, found: s.len() });
        }
        match (&self.hform, &self.vertices) {
            (Some(h), _) => h.contains(s),
            (None, Some(v)) => in_hull(v, s),
            (None, None) => Err(Error::NoRepresentation),
        }
    }

    /// Membership via the V-form only (LP over convex weights).
    pub fn contains_by_vertices(&self, s: &[f64]) -> Result<bool> {
        in_hull(&self.vertex_list()?, s)
    }
}

/// Whether `s` is a convex combination of `vertices`, within `EPS_GEOM`.
pub fn in_hull(vertices: &[Vec<f64>], s: &[f64]) -> Result<bool> {
    if vertices.is_empty() {
        return Ok(false);
    }
    let l = s.len();
    if let Some(v) = vertices.iter().find(|v| v.len() != l) {
        return Err(Error::DimensionMismatch { expected: l, found: v.len() });
    }
    let mut a: Vec<Vec<f64>> = (0..l).map(|i| vertices.iter().map(|v| v[i]).collect()).collect();
    a.push(vec![1.0; vertices.len()]);
    let mut b = s.to_vec();
    b.push(1.0);
    Ok(find_feasible(a, b, EPS_GEOM)?.is_some())
}

/// Dedupe within `EPS_GEOM` (L-infinity) and sort lexicographically.
/// Round-off below `ZERO_SNAP` is set to zero first.
pub fn canonical_vertices(points: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    const ZERO_SNAP: f64 = 1e-14;
    let mut out: Vec<Vec<f64>> = Vec::new();
    for mut p in points {
        for x in p.iter_mut().filter(|x| x.abs() < ZERO_SNAP) {
            *x = 0.0;
        }
        if !out.iter().any(|q| linf_distance(q, &p) <= EPS_GEOM) {
            out.push(p);
        }
    }
    out.sort_by(|a, b| {
        a.iter().zip(b).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal)
    });
    out
}

/// Drop points that are convex combinations of the remaining ones.
pub fn prune_non_extreme(points: Vec<Vec<f64>>) -> Result<Vec<Vec<f64>>> {
    let mut keep = points;
    let mut i = 0;
    while i < keep.len() {
        let others: Vec<Vec<f64>> = keep.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, p)| p.clone()).collect();
        if !others.is_empty() && in_hull(&others, &keep[i])? {
            keep.remove(i);
        } else {
            i += 1;
        }
    }
    Ok(keep)
}

/// All vertices of the (projected) polytope described by `h`.
pub fn enumerate_vertices(h: &HForm) -> Result<Vec<Vec<f64>>> {
    h.validate()?;
    let lifted = enumerate::enumerate_lifted(h)?;
    let projected: Vec<Vec<f64>> = lifted.iter().map(|y| h.project(y)).collect();
    let mut vertices = canonical_vertices(projected);
    if h.lift != Lift::Identity {
        vertices = canonical_vertices(prune_non_extreme(vertices)?);
    }
    Ok(vertices)
}

/// Result of an inclusion test, with a vertex of `A` outside `B` when it fails.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubsetCheck {
    pub holds: bool,
    pub witness: Option<Vec<f64>>,
}

/// `A ⊆ B` iff every vertex of `A` lies in `B`.
pub fn is_subset(a: &Region, b: &Region) -> Result<SubsetCheck> {
    if a.dimension() != b.dimension() {
        return Err(Error::DimensionMismatch { expected: a.dimension(), found: b.dimension() });
    }
    for v in a.vertex_list()? {
        if !b.contains(&v)? {
            return Ok(SubsetCheck { holds: false, witness: Some(v) });
        }
    }
    Ok(SubsetCheck { holds: true, witness: None })
}
