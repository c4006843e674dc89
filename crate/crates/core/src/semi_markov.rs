//! Seniority expansion of a semi-Markov system and State Re-union (SR)
//! maintainability.
//!
//! A structure `s` over organisational states is SR-maintainable when some
//! seniority-based path keeps the organisational totals in proportion `s`
//! while growing by `1 + alpha`, recruiting only into zero-seniority states.
//! Every such path converges to a constant path built from the fixed points of
//! the per-state block chains, so the region is that of the constant paths:
//! the seniority-based structures that are classically maintainable with
//! recruitment supported on zero seniority, projected through the re-union
//! matrix `U`.

use nalgebra::{DMatrix, DVector};
use petgraph::algo::condensation;
use petgraph::graph::DiGraph;
use petgraph::Direction;

use crate::error::{Error, Result};
use crate::estimation::{RowFlag, TransitionSequence};
use crate::linalg::{checked_inverse, l1_distance, solve_square, vec_mat};
use crate::markov::{inverse_candidates, maintainability_constraints, spectral_radius, GrowthFactor};
use crate::model::{
    build_reunion_matrix, fsum, l1_normalize, validate_model, ProbabilityStructure, ReUnionMatrix, Role, StateSpace,
    SubstochasticMatrix, WastageVector, EPS_GEOM, EPS_STOCH, EPS_STRICT,
};
use crate::region::{canonical_vertices, enumerate_vertices, prune_non_extreme, HForm, Lift, Provenance, Region};

/// Convergence threshold on the L1 step difference of a path.
pub const PATH_TOLERANCE: f64 = 1e-10;
/// Hard cap on simulated steps.
pub const MAX_PATH_STEPS: usize = 100_000;

/// `P_SM` over the seniority-based states, with `U` and `w_SB`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeniorityMatrix {
    p: SubstochasticMatrix,
    space: StateSpace,
    wastage: WastageVector,
    reunion: ReUnionMatrix,
    flags: Vec<RowFlag>,
}

/// Expand a transition sequence into `P_SM`.
///
/// Row `(b, k)` sends `P(k)_bb` to `(b, k+1)` and `P(k)_bc` to `(c, 0)`.
pub fn build_seniority_matrix(seq: &TransitionSequence) -> Result<SeniorityMatrix> {
    let space = seq.space().clone();
    let l = space.l();
    let k_max = space.max_seniority();
    let n = space.seniority_states();
    let mut p = DMatrix::zeros(n, n);
    for b in 0..l {
        for k in 0..=k_max {
            let pk = seq.internal(k);
            let row = space.flat_index(b, k);
            if pk[(b, b)] != 0.0 {
                if k == k_max {
                    return Err(Error::MaxSeniorityOverflow { state: b, value: pk[(b, b)] });
                }
                p[(row, space.flat_index(b, k + 1))] = pk[(b, b)];
            }
            for c in (0..l).filter(|&c| c != b) {
                p[(row, space.flat_index(c, 0))] = pk[(b, c)];
            }
        }
    }
    SeniorityMatrix::assemble(p, space, seq.flags().to_vec())
}

impl SeniorityMatrix {
    /// Wrap an explicit `P_SM`, checking the admissible sparsity pattern.
    pub fn new(p: DMatrix<f64>, space: StateSpace) -> Result<Self> {
        if p.nrows() != space.seniority_states() {
            return Err(Error::DimensionMismatch { expected: space.seniority_states(), found: p.nrows() });
        }
        let report = validate_model(&p, &space, false);
        if let Some(issue) = report.issues.first() {
            return Err(Error::InvalidMatrix(issue.to_string()));
        }
        for b in 0..space.l() {
            let row = space.flat_index(b, space.max_seniority());
            if space.max_seniority() == 0 && p[(row, row)] != 0.0 {
                return Err(Error::MaxSeniorityOverflow { state: b, value: p[(row, row)] });
            }
        }
        Self::assemble(p, space, Vec::new())
    }

    fn assemble(p: DMatrix<f64>, space: StateSpace, flags: Vec<RowFlag>) -> Result<Self> {
        let p = SubstochasticMatrix::new(p, false)?;
        // all-wastage rows are allowed; every other row must lose some mass
        for (i, sum) in p.row_sums().iter().enumerate() {
            if *sum > 1.0 - EPS_STRICT {
                return Err(Error::InvalidMatrix(format!(
                    "seniority-based row {i} has row sum {sum}; P_SM must be strictly substochastic"
                )));
            }
        }
        let wastage = p.wastage();
        let reunion = build_reunion_matrix(&space);
        Ok(Self { p, space, wastage, reunion, flags })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        self.p.matrix()
    }

    pub fn substochastic(&self) -> &SubstochasticMatrix {
        &self.p
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    /// `w_SB`.
    pub fn wastage(&self) -> &WastageVector {
        &self.wastage
    }

    pub fn reunion(&self) -> &ReUnionMatrix {
        &self.reunion
    }

    /// Rows inherited from unidentified or exhausted estimates.
    pub fn flags(&self) -> &[RowFlag] {
        &self.flags
    }

    /// Diagonal block `P_SM[b]` over the seniority classes of state `b`.
    pub fn block(&self, b: usize) -> DMatrix<f64> {
        let start = self.space.flat_index(b, 0);
        let len = self.space.block_len();
        self.p.matrix().view((start, start), (len, len)).into_owned()
    }

    /// `((1+alpha) I - P_SM)^{-1} U`.
    pub fn fundamental_reunion(&self, g: GrowthFactor) -> Result<DMatrix<f64>> {
        let n = self.space.seniority_states();
        let inv =
            checked_inverse(&(DMatrix::identity(n, n) * g.factor() - self.p.matrix())).ok_or(Error::SingularSystem)?;
        Ok(inv * self.reunion.to_matrix())
    }
}

/// `P[b]^(1+alpha)`: the seniority classes of one organisational state, with
/// every lost unit of mass re-entering at seniority zero.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockChain {
    block: usize,
    alpha: f64,
    matrix: DMatrix<f64>,
}

impl BlockChain {
    /// Custom chain; rows must sum to `1 + alpha`.
    pub fn from_matrix(block: usize, g: GrowthFactor, matrix: DMatrix<f64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::InvalidMatrix("block chain must be square".into()));
        }
        for i in 0..matrix.nrows() {
            let sum = fsum(matrix.row(i).iter().copied());
            if (sum - g.factor()).abs() > EPS_STOCH || matrix.row(i).iter().any(|v| *v < 0.0) {
                return Err(Error::InvalidMatrix(format!(
                    "block chain row {i} sums to {sum}, expected {}",
                    g.factor()
                )));
            }
        }
        Ok(Self { block, alpha: g.alpha(), matrix })
    }

    pub fn block(&self) -> usize {
        self.block
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }
}

pub fn build_block_chain(sm: &SeniorityMatrix, b: usize, g: GrowthFactor) -> Result<BlockChain> {
    if b >= sm.space.l() {
        return Err(Error::DimensionMismatch { expected: sm.space.l(), found: b });
    }
    let mut m = sm.block(b);
    for row in 0..m.nrows() {
        let replacement = crate::model::complement(g.factor(), m.row(row).iter().copied());
        if replacement < -EPS_GEOM {
            return Err(Error::NegativeReplacement { block: b, row, value: replacement });
        }
        m[(row, 0)] += replacement.max(0.0);
    }
    Ok(BlockChain { block: b, alpha: g.alpha(), matrix: m })
}

/// Recurrent-class analysis of a block chain.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedPointCheck {
    pub unique: bool,
    /// Number of recurrent classes (sink components).
    pub classes: usize,
    /// Stationary vector of the normalised chain when unique.
    pub witness: Option<Vec<f64>>,
}

/// Whether `P[b]^(1+alpha) / (1+alpha)` has a single recurrent class.
pub fn unique_fixed_point(bc: &BlockChain) -> FixedPointCheck {
    let n = bc.matrix.nrows();
    let factor = 1.0 + bc.alpha;
    if factor <= 0.0 {
        return FixedPointCheck { unique: false, classes: n, witness: None };
    }
    let q = &bc.matrix / factor;

    let mut graph = DiGraph::<(), ()>::new();
    let nodes: Vec<_> = (0..n).map(|_| graph.add_node(())).collect();
    for i in 0..n {
        for j in 0..n {
            if q[(i, j)] > 0.0 {
                graph.add_edge(nodes[i], nodes[j], ());
            }
        }
    }
    let condensed = condensation(graph, true);
    let classes = condensed
        .node_indices()
        .filter(|&c| condensed.neighbors_directed(c, Direction::Outgoing).next().is_none())
        .count();
    if classes != 1 {
        return FixedPointCheck { unique: false, classes, witness: None };
    }

    // pi (Q - I) = 0 with the last equation replaced by sum pi = 1
    let mut a = (&q - DMatrix::identity(n, n)).transpose();
    a.row_mut(n - 1).fill(1.0);
    let mut rhs = DVector::zeros(n);
    rhs[n - 1] = 1.0;
    let witness = solve_square(&a, &rhs).and_then(|pi| {
        let clamped: Vec<f64> = pi.iter().map(|v| v.max(0.0)).collect();
        l1_normalize(&clamped).ok()
    });
    FixedPointCheck { unique: true, classes, witness }
}

/// The constant seniority-based structure `s*_SB` with organisational
/// proportions `s`: block `b` is `s_b` times the fixed point of `P[b]^(1+alpha)`.
pub fn constant_path(sm: &SeniorityMatrix, s: &[f64], g: GrowthFactor) -> Result<Vec<f64>> {
    let l = sm.space.l();
    if s.len() != l {
        return Err(Error::DimensionMismatch { expected: l, found: s.len() });
    }
    let mut out = Vec::with_capacity(sm.space.seniority_states());
    for (b, sb) in s.iter().enumerate() {
        let check = unique_fixed_point(&build_block_chain(sm, b, g)?);
        let pi = match check.witness {
            Some(pi) if check.unique => pi,
            _ => return Err(Error::FixedPointNotUnique { block: b, classes: check.classes }),
        };
        out.extend(pi.iter().map(|p| sb * p));
    }
    Ok(out)
}

/// One recorded period of a seniority-based path, scaled to unit total.
#[derive(Debug, Clone, PartialEq)]
pub struct PathStep {
    pub t: usize,
    /// `s_SB(t)`.
    pub structure: Vec<f64>,
    /// `s_SB(t) U`.
    pub block_totals: Vec<f64>,
    /// Recruitment leading to period `t + 1`, supported on zero seniority.
    pub recruitment: Vec<f64>,
    /// `||s_SB(t) - s_SB(t-1)||_1`; absent at `t = 0`.
    pub delta: Option<f64>,
}

/// A simulated SR path.
///
/// The dynamics are linear, so stocks are rescaled to unit total every period:
/// `(1+alpha) s_SB(t+1) = s_SB(t) P_SM + r(t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PathTrace {
    pub target: Vec<f64>,
    pub alpha: f64,
    pub steps: Vec<PathStep>,
    pub converged: bool,
    pub limit: Vec<f64>,
}

/// Simulate the SR path started at `s0`, for at most `steps` periods
/// (capped at `MAX_PATH_STEPS`), stopping early on convergence.
pub fn simulate_sr_path(
    sm: &SeniorityMatrix,
    s0: &ProbabilityStructure,
    g: GrowthFactor,
    steps: usize,
) -> Result<PathTrace> {
    let space = &sm.space;
    let n = space.seniority_states();
    if s0.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: s0.len() });
    }
    if s0.role() != Role::SeniorityBased {
        return Err(Error::InvalidMatrix("path start must be a seniority-based structure".into()));
    }
    if steps == 0 {
        return Err(Error::InvalidMatrix("a path needs at least one step".into()));
    }
    let t_max = steps.min(MAX_PATH_STEPS);
    let target = sm.reunion.apply(s0);
    let block_len = space.block_len();

    let mut s = s0.to_vec();
    let mut delta = None;
    let mut trace = Vec::new();
    let mut converged = false;
    for t in 0..=t_max {
        let totals = sm.reunion.apply(&s);
        let mut next = vec_mat(&s, sm.matrix());
        let mut recruitment = vec![0.0; n];
        for (b, total) in totals.iter().enumerate() {
            let zero = space.flat_index(b, 0);
            let inflow = fsum(next[zero..zero + block_len].iter().copied());
            let required = g.factor() * total - inflow;
            if required < -EPS_GEOM {
                return Err(Error::NonMaintainable { step: t, block: b, required });
            }
            recruitment[zero] = required.max(0.0);
            next[zero] += recruitment[zero];
        }
        trace.push(PathStep { t, structure: s.clone(), block_totals: totals, recruitment, delta });
        if delta.is_some_and(|d| d < PATH_TOLERANCE) {
            converged = true;
            break;
        }
        if t == t_max {
            break;
        }
        let next = l1_normalize(&next)?;
        delta = Some(l1_distance(&next, &s));
        s = next;
    }
    Ok(PathTrace { target, alpha: g.alpha(), limit: s, steps: trace, converged })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RegionOptions {
    /// Compute regions for models with unidentified or exhausted rows.
    pub allow_unidentified: bool,
}

/// SR-maintainable region with default options (flagged models refused).
pub fn sr_region(sm: &SeniorityMatrix, g: GrowthFactor) -> Result<Region> {
    sr_region_with(sm, g, RegionOptions::default())
}

pub fn sr_region_with(sm: &SeniorityMatrix, g: GrowthFactor, opts: RegionOptions) -> Result<Region> {
    if !opts.allow_unidentified && !sm.flags.is_empty() {
        return Err(Error::Unidentified { rows: sm.flags.iter().map(|f| (f.state, f.seniority)).collect() });
    }
    let space = &sm.space;
    let l = space.l();
    if g.alpha() != 0.0 {
        for b in 0..l {
            let check = unique_fixed_point(&build_block_chain(sm, b, g)?);
            if !check.unique {
                return Err(Error::FixedPointNotUnique { block: b, classes: check.classes });
            }
        }
    }

    let (halfspaces, equalities) =
        maintainability_constraints(sm.matrix(), g.factor(), |i| space.split_index(i).1 != 0);
    let hform = HForm {
        dim: space.seniority_states(),
        halfspaces,
        equalities,
        lift: Lift::ReUnion { max_seniority: space.max_seniority() },
    };

    let zero_rows = space.zero_seniority_indices();
    let u = sm.reunion.to_matrix();
    let rho = spectral_radius(sm.matrix());
    let vertices = match inverse_candidates(sm.matrix(), g.factor(), Some(&u), &zero_rows) {
        Some(c) if g.alpha() > rho - 1.0 && c.iter().all(|r| r.is_ok()) => {
            let pts = c.into_iter().map(|r| r.expect("checked above")).collect();
            canonical_vertices(prune_non_extreme(canonical_vertices(pts))?)
        }
        Some(c) => {
            let mut pts: Vec<Vec<f64>> = c.into_iter().filter_map(|r| r.ok()).collect();
            pts.extend(enumerate_vertices(&hform)?);
            canonical_vertices(prune_non_extreme(canonical_vertices(pts))?)
        }
        None => enumerate_vertices(&hform)?,
    };
    Region::new(l, g.alpha(), Provenance::Sr, Some(vertices), Some(hform))
}

/// Extreme points of the lifted SR polytope, i.e. the constant seniority-based
/// structures at the vertices (before projection).
pub fn lifted_sr_vertices(sm: &SeniorityMatrix, g: GrowthFactor) -> Result<Vec<Vec<f64>>> {
    let space = &sm.space;
    let (halfspaces, equalities) =
        maintainability_constraints(sm.matrix(), g.factor(), |i| space.split_index(i).1 != 0);
    let h = HForm { dim: space.seniority_states(), halfspaces, equalities, lift: Lift::Identity };
    enumerate_vertices(&h)
}
