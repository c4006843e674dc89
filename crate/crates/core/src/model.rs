//! Domain types shared by every stage of the pipeline: state spaces,
//! probability and stock vectors, substochastic matrices, and the re-union
//! matrix that folds seniority-based states back onto organisational states.
//!
//! Indices are 0-based in code. Seniority-based state `(b, a)` (organisational
//! state `b`, seniority `a`) lives at flat index `b * (K + 1) + a`, which is the
//! state ordering `S_0(1), S_1(1), .., S_K(1), S_0(2), ..` used in file formats.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for stochasticity checks (row sums, normalisation).
pub const EPS_STOCH: f64 = 1e-9;
/// Margin below one that a strictly substochastic row sum must respect.
pub const EPS_STRICT: f64 = 1e-12;
/// Tolerance for geometric comparisons (membership, deduplication).
pub const EPS_GEOM: f64 = 1e-7;

/// Correctly rounded floating point sum (Shewchuk partials).
pub fn fsum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut partials: Vec<f64> = Vec::new();
    for mut x in values {
        let mut i = 0;
        for j in 0..partials.len() {
            let mut y = partials[j];
            if x.abs() < y.abs() {
                std::mem::swap(&mut x, &mut y);
            }
            let hi = x + y;
            let lo = y - (hi - x);
            if lo != 0.0 {
                partials[i] = lo;
                i += 1;
            }
            x = hi;
        }
        partials.truncate(i);
        partials.push(x);
    }

    let mut n = partials.len();
    if n == 0 {
        return 0.0;
    }
    n -= 1;
    let mut hi = partials[n];
    let mut lo = 0.0;
    while n > 0 {
        let x = hi;
        n -= 1;
        let y = partials[n];
        hi = x + y;
        let yr = hi - x;
        lo = y - yr;
        if lo != 0.0 {
            break;
        }
    }
    // round-half-even correction when the remaining partials push past a tie
    if n > 0 && ((lo < 0.0 && partials[n - 1] < 0.0) || (lo > 0.0 && partials[n - 1] > 0.0)) {
        let y = lo * 2.0;
        let x = hi + y;
        if y == x - hi {
            hi = x;
        }
    }
    hi
}

/// Complement `1 - sum(row)` snapped to 15 significant decimal digits, so that
/// decimal inputs such as `0.5, 0.45` give back the decimal `0.05`.
pub(crate) fn complement(target: f64, row: impl IntoIterator<Item = f64>) -> f64 {
    let raw = fsum(std::iter::once(target).chain(row.into_iter().map(|v| -v)));
    snap_decimal(raw)
}

fn snap_decimal(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.14e}").parse().unwrap_or(x)
}

/// Organisational states and the maximal seniority `K` tracked per state.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateSpace {
    l: usize,
    max_seniority: usize,
    labels: Vec<String>,
    wastage_label: String,
}

impl StateSpace {
    /// State space with default labels `1..=l` and wastage label `W`.
    pub fn new(l: usize, max_seniority: usize) -> Result<Self> {
        let labels = (1..=l).map(|i| i.to_string()).collect();
        Self::with_labels(labels, max_seniority, "W")
    }

    pub fn with_labels(labels: Vec<String>, max_seniority: usize, wastage_label: &str) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::InvalidStateSpace("at least one organisational state is required".into()));
        }
        let mut sorted = labels.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != labels.len() {
            return Err(Error::InvalidStateSpace("duplicate state labels".into()));
        }
        if labels.iter().any(|l| l == wastage_label) {
            return Err(Error::InvalidStateSpace(format!(
                "wastage label {wastage_label:?} collides with a state label"
            )));
        }
        Ok(Self { l: labels.len(), max_seniority, labels, wastage_label: wastage_label.to_string() })
    }

    /// Number of organisational states `l`.
    pub fn l(&self) -> usize {
        self.l
    }

    /// Maximal organisational-state seniority `K`.
    pub fn max_seniority(&self) -> usize {
        self.max_seniority
    }

    /// Seniority classes per organisational state, `K + 1`.
    pub fn block_len(&self) -> usize {
        self.max_seniority + 1
    }

    /// Number of seniority-based states, `(K + 1) * l`.
    pub fn seniority_states(&self) -> usize {
        self.block_len() * self.l
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn wastage_label(&self) -> &str {
        &self.wastage_label
    }

    pub fn label_index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Flat seniority-based index of `(state, seniority)`.
    pub fn flat_index(&self, state: usize, seniority: usize) -> usize {
        debug_assert!(state < self.l && seniority <= self.max_seniority);
        state * self.block_len() + seniority
    }

    /// Organisational state and seniority of a flat index.
    pub fn split_index(&self, index: usize) -> (usize, usize) {
        (index / self.block_len(), index % self.block_len())
    }

    /// Flat indices of the zero-seniority states, one per organisational state.
    pub fn zero_seniority_indices(&self) -> Vec<usize> {
        (0..self.l).map(|b| self.flat_index(b, 0)).collect()
    }
}

/// Whether a vector is indexed by organisational or seniority-based states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Organisational,
    SeniorityBased,
}

/// A point of the probability simplex.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityStructure {
    entries: Vec<f64>,
    role: Role,
}

impl ProbabilityStructure {
    /// Validates nonnegativity and unit L1 norm within `EPS_STOCH`.
    pub fn new(entries: Vec<f64>, role: Role) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::ZeroVector { sum: 0.0 });
        }
        if let Some(v) = entries.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::InvalidMatrix(format!("probability entry {v} is not a nonnegative number")));
        }
        let sum = fsum(entries.iter().copied());
        if (sum - 1.0).abs() > EPS_STOCH {
            return Err(Error::InvalidMatrix(format!("probability vector sums to {sum}")));
        }
        Ok(Self { entries, role })
    }

    pub fn organisational(entries: Vec<f64>) -> Result<Self> {
        Self::new(entries, Role::Organisational)
    }

    pub fn seniority_based(entries: Vec<f64>) -> Result<Self> {
        Self::new(entries, Role::SeniorityBased)
    }

    pub fn role(&self) -> Role {
        self.role
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.entries
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

impl std::ops::Deref for ProbabilityStructure {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.entries
    }
}

/// L1-normalise a nonnegative vector into a probability structure.
pub fn l1_normalize(v: &[f64]) -> Result<Vec<f64>> {
    let sum = fsum(v.iter().copied());
    if sum <= EPS_STRICT || v.iter().any(|x| *x < 0.0) {
        return Err(Error::ZeroVector { sum });
    }
    Ok(v.iter().map(|x| x / sum).collect())
}

/// Head counts per state; the total is always recomputed from the entries.
#[derive(Debug, Clone, PartialEq)]
pub struct StockVector {
    entries: Vec<f64>,
}

impl StockVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.iter().any(|v| v.is_nan() || *v < 0.0) {
            return Err(Error::InvalidMatrix("stock vectors must be nonnegative".into()));
        }
        Ok(Self { entries })
    }

    pub fn total(&self) -> f64 {
        fsum(self.entries.iter().copied())
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.entries
    }

    pub fn structure(&self) -> Result<Vec<f64>> {
        l1_normalize(&self.entries)
    }
}

/// Square nonnegative matrix with row sums at most one.
#[derive(Debug, Clone, PartialEq)]
pub struct SubstochasticMatrix {
    matrix: DMatrix<f64>,
    strict: bool,
}

impl SubstochasticMatrix {
    /// Validates entries in `[0, 1]` and row sums `<= 1 + EPS_STOCH`; with
    /// `strict`, row sums must also stay below `1 - EPS_STRICT`.
    pub fn new(matrix: DMatrix<f64>, strict: bool) -> Result<Self> {
        let report = check_matrix(&matrix, strict);
        if let Some(issue) = report.issues.first() {
            return Err(Error::InvalidMatrix(issue.to_string()));
        }
        Ok(Self { matrix, strict })
    }

    pub fn from_rows(rows: &[Vec<f64>], strict: bool) -> Result<Self> {
        Self::new(matrix_from_rows(rows)?, strict)
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn is_strict(&self) -> bool {
        self.strict
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| fsum(self.matrix.row(i).iter().copied())).collect()
    }

    /// Wastage `w_i = 1 - sum_j P_ij`.
    pub fn wastage(&self) -> WastageVector {
        WastageVector(
            (0..self.dim()).map(|i| complement(1.0, self.matrix.row(i).iter().copied()).clamp(0.0, 1.0)).collect(),
        )
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        matrix_to_rows(&self.matrix)
    }
}

/// Probability of leaving the system from each state.
#[derive(Debug, Clone, PartialEq)]
pub struct WastageVector(pub Vec<f64>);

impl WastageVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn max(&self) -> f64 {
        self.0.iter().copied().fold(0.0, f64::max)
    }
}

/// Non-normalised (or normalised) recruitment flows per state.
#[derive(Debug, Clone, PartialEq)]
pub struct RecruitmentVector {
    entries: Vec<f64>,
    normalized: bool,
}

impl RecruitmentVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.iter().any(|v| v.is_nan() || *v < 0.0) {
            return Err(Error::InvalidMatrix("recruitment must be nonnegative".into()));
        }
        Ok(Self { entries, normalized: false })
    }

    /// Seniority-based recruitment, which may only enter zero-seniority states.
    pub fn seniority_based(entries: Vec<f64>, space: &StateSpace) -> Result<Self> {
        if entries.len() != space.seniority_states() {
            return Err(Error::DimensionMismatch { expected: space.seniority_states(), found: entries.len() });
        }
        for (i, v) in entries.iter().enumerate() {
            if space.split_index(i).1 != 0 && *v != 0.0 {
                return Err(Error::InvalidMatrix(format!(
                    "recruitment into seniority-based state {i} with nonzero seniority"
                )));
            }
        }
        Self::new(entries)
    }

    pub fn normalized(&self) -> Result<Self> {
        Ok(Self { entries: l1_normalize(&self.entries)?, normalized: true })
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn total(&self) -> f64 {
        fsum(self.entries.iter().copied())
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.entries
    }
}

/// The `(K+1)l x l` block-of-ones matrix, stored implicitly by its shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReUnionMatrix {
    l: usize,
    max_seniority: usize,
}

pub fn build_reunion_matrix(space: &StateSpace) -> ReUnionMatrix {
    ReUnionMatrix { l: space.l(), max_seniority: space.max_seniority() }
}

impl ReUnionMatrix {
    pub fn rows(&self) -> usize {
        (self.max_seniority + 1) * self.l
    }

    pub fn cols(&self) -> usize {
        self.l
    }

    pub fn entry(&self, row: usize, col: usize) -> u8 {
        u8::from(row / (self.max_seniority + 1) == col)
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows(), self.cols(), |i, j| f64::from(self.entry(i, j)))
    }

    /// `v U`: sums every organisational block of a seniority-based vector.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.rows(), "re-union applied to vector of wrong length");
        v.chunks(self.max_seniority + 1).map(|block| fsum(block.iter().copied())).collect()
    }
}

/// One violated invariant found by [`validate_model`].
#[derive(Debug, Clone, PartialEq)]
pub enum Issue {
    NotSquare { rows: usize, cols: usize },
    DimensionMismatch { expected: Vec<usize>, found: usize },
    NegativeEntry { row: usize, col: usize, value: f64 },
    EntryAboveOne { row: usize, col: usize, value: f64 },
    NotFinite { row: usize, col: usize },
    RowSumExceedsOne { row: usize, sum: f64 },
    NotStrict { row: usize, sum: f64 },
    SparsityViolation { row: usize, col: usize, value: f64 },
}

impl std::fmt::Display for Issue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Issue::NotSquare { rows, cols } => write!(f, "matrix is {rows}x{cols}, not square"),
            Issue::DimensionMismatch { expected, found } => {
                write!(f, "dimension {found} does not match state space (expected one of {expected:?})")
            }
            Issue::NegativeEntry { row, col, value } => write!(f, "row {row}: entry ({row},{col}) = {value} < 0"),
            Issue::EntryAboveOne { row, col, value } => write!(f, "row {row}: entry ({row},{col}) = {value} > 1"),
            Issue::NotFinite { row, col } => write!(f, "row {row}: entry ({row},{col}) is not finite"),
            Issue::RowSumExceedsOne { row, sum } => write!(f, "row {row}: row sum {sum} > 1"),
            Issue::NotStrict { row, sum } => write!(f, "row {row}: row sum {sum} is not strictly below 1"),
            Issue::SparsityViolation { row, col, value } => {
                write!(f, "row {row}: entry ({row},{col}) = {value} is not an admissible seniority transition")
            }
        }
    }
}

/// Diagnostics report; empty iff the model is valid.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub issues: Vec<Issue>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }

    /// Rows mentioned by at least one issue, ascending.
    pub fn flagged_rows(&self) -> Vec<usize> {
        let mut rows: Vec<usize> = self
            .issues
            .iter()
            .filter_map(|issue| match issue {
                Issue::NegativeEntry { row, .. }
                | Issue::EntryAboveOne { row, .. }
                | Issue::NotFinite { row, .. }
                | Issue::RowSumExceedsOne { row, .. }
                | Issue::NotStrict { row, .. }
                | Issue::SparsityViolation { row, .. } => Some(*row),
                _ => None,
            })
            .collect();
        rows.sort_unstable();
        rows.dedup();
        rows
    }
}

fn check_matrix(p: &DMatrix<f64>, strict: bool) -> ValidationReport {
    let mut issues = Vec::new();
    if p.nrows() != p.ncols() {
        issues.push(Issue::NotSquare { rows: p.nrows(), cols: p.ncols() });
        return ValidationReport { issues };
    }
    for i in 0..p.nrows() {
        for j in 0..p.ncols() {
            let v = p[(i, j)];
            if !v.is_finite() {
                issues.push(Issue::NotFinite { row: i, col: j });
            } else if v < 0.0 {
                issues.push(Issue::NegativeEntry { row: i, col: j, value: v });
            } else if v > 1.0 {
                issues.push(Issue::EntryAboveOne { row: i, col: j, value: v });
            }
        }
        let sum = fsum(p.row(i).iter().copied());
        if sum > 1.0 + EPS_STOCH {
            issues.push(Issue::RowSumExceedsOne { row: i, sum });
        } else if strict && sum > 1.0 - EPS_STRICT {
            issues.push(Issue::NotStrict { row: i, sum });
        }
    }
    ValidationReport { issues }
}

/// Check a candidate internal transition matrix against the state space.
///
/// Accepts either an organisational (`l x l`) or a seniority-based
/// (`(K+1)l x (K+1)l`) matrix. For the latter, entries outside the admissible
/// pattern (advance one seniority class within the block, or jump to another
/// block's zero-seniority state) are reported as sparsity violations.
pub fn validate_model(p: &DMatrix<f64>, space: &StateSpace, require_strict: bool) -> ValidationReport {
    let mut report = check_matrix(p, require_strict);
    if p.nrows() != p.ncols() {
        return report;
    }
    let n = p.nrows();
    if n != space.l() && n != space.seniority_states() {
        report.issues.push(Issue::DimensionMismatch { expected: vec![space.l(), space.seniority_states()], found: n });
        return report;
    }
    if n == space.seniority_states() && space.max_seniority() > 0 {
        for i in 0..n {
            for j in 0..n {
                let v = p[(i, j)];
                if v != 0.0 && !admissible_seniority_move(space, i, j) {
                    report.issues.push(Issue::SparsityViolation { row: i, col: j, value: v });
                }
            }
        }
    }
    report
}

/// Whether `i -> j` is a possible one-step move between seniority-based states.
pub fn admissible_seniority_move(space: &StateSpace, i: usize, j: usize) -> bool {
    let (bi, ai) = space.split_index(i);
    let (bj, aj) = space.split_index(j);
    if bi == bj {
        ai < space.max_seniority() && aj == ai + 1
    } else {
        aj == 0
    }
}

pub(crate) fn matrix_from_rows(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    if let Some(bad) = rows.iter().find(|r| r.len() != m) {
        return Err(Error::DimensionMismatch { expected: m, found: bad.len() });
    }
    Ok(DMatrix::from_fn(n, m, |i, j| rows[i][j]))
}

pub(crate) fn matrix_to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reunion_matrix_k2_l3() {
        let space = StateSpace::new(3, 2).unwrap();
        let u = build_reunion_matrix(&space).to_matrix();
        assert_eq!(u.shape(), (9, 3));
        for i in 0..9 {
            for j in 0..3 {
                assert_eq!(u[(i, j)], if i / 3 == j { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn reunion_matrix_degenerate_and_small() {
        let u = build_reunion_matrix(&StateSpace::new(1, 0).unwrap()).to_matrix();
        assert_eq!(u, DMatrix::from_element(1, 1, 1.0));

        let u = build_reunion_matrix(&StateSpace::new(2, 1).unwrap()).to_matrix();
        let expected = DMatrix::from_row_slice(4, 2, &[1., 0., 1., 0., 0., 1., 0., 1.]);
        assert_eq!(u, expected);
    }

    #[test]
    fn normalize_decimal_row() {
        let v = [33.0 / 25.0, 287.0 / 250.0, 195391.0 / 250000.0];
        let s = l1_normalize(&v).unwrap();
        let expected = [110000.0 / 270797.0, 287000.0 / 812391.0, 195391.0 / 812391.0];
        for (a, b) in s.iter().zip(expected) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!((s[0] - 0.406208).abs() < 1e-6);
        assert!((s[1] - 0.353278).abs() < 1e-6);
        assert!((s[2] - 0.240513).abs() < 1e-6);
    }

    #[test]
    fn normalize_edge_cases() {
        assert_eq!(l1_normalize(&[1.0, 0.0, 0.0]).unwrap(), vec![1.0, 0.0, 0.0]);
        assert!(matches!(l1_normalize(&[0.0, 0.0, 0.0]), Err(Error::ZeroVector { .. })));
    }

    #[test]
    fn validate_identity_with_strictness() {
        let space = StateSpace::new(3, 0).unwrap();
        let report = validate_model(&DMatrix::identity(3, 3), &space, true);
        assert_eq!(report.flagged_rows(), vec![0, 1, 2]);
        assert!(report.issues.iter().all(|i| matches!(i, Issue::NotStrict { .. })));
        assert!(validate_model(&DMatrix::identity(3, 3), &space, false).is_valid());
    }

    #[test]
    fn validate_out_of_range_entry() {
        let space = StateSpace::new(2, 0).unwrap();
        let p = DMatrix::from_row_slice(2, 2, &[1.2, 0.0, 0.1, 0.2]);
        let report = validate_model(&p, &space, false);
        assert_eq!(report.flagged_rows(), vec![0]);
        assert!(report.issues.contains(&Issue::EntryAboveOne { row: 0, col: 0, value: 1.2 }));
    }

    #[test]
    fn validate_sparsity_pattern() {
        let space = StateSpace::new(2, 1).unwrap();
        let mut p = DMatrix::zeros(4, 4);
        p[(0, 1)] = 0.5; // advance seniority
        p[(0, 2)] = 0.2; // jump to block 2, seniority 0
        assert!(validate_model(&p, &space, true).is_valid());
        p[(0, 3)] = 0.1; // jump into nonzero seniority: inadmissible
        let report = validate_model(&p, &space, true);
        assert_eq!(report.issues, vec![Issue::SparsityViolation { row: 0, col: 3, value: 0.1 }]);
    }

    #[test]
    fn fsum_is_correctly_rounded() {
        assert_eq!(fsum([0.1; 10]), 1.0);
        assert_eq!(fsum([1e100, 1.0, -1e100]), 1.0);
        assert_eq!(complement(1.0, [0.5, 0.45]), 0.05);
        assert_eq!(complement(1.0, [0.2, 0.5]), 0.3);
    }

    #[test]
    fn recruitment_support_restricted() {
        let space = StateSpace::new(2, 1).unwrap();
        assert!(RecruitmentVector::seniority_based(vec![0.3, 0.0, 0.7, 0.0], &space).is_ok());
        assert!(RecruitmentVector::seniority_based(vec![0.3, 0.1, 0.6, 0.0], &space).is_err());
        let r = RecruitmentVector::new(vec![1.0, 3.0]).unwrap().normalized().unwrap();
        assert!(r.is_normalized());
        assert_eq!(r.as_slice(), &[0.25, 0.75]);
    }

    proptest! {
        #[test]
        fn reunion_sums(l in 1usize..6, k in 0usize..6) {
            let space = StateSpace::new(l, k).unwrap();
            let u = build_reunion_matrix(&space);
            for j in 0..u.cols() {
                let col: u32 = (0..u.rows()).map(|i| u32::from(u.entry(i, j))).sum();
                prop_assert_eq!(col as usize, k + 1);
            }
            for i in 0..u.rows() {
                let row: u32 = (0..u.cols()).map(|j| u32::from(u.entry(i, j))).sum();
                prop_assert_eq!(row, 1);
            }
        }

        #[test]
        fn index_map_bijection(l in 1usize..6, k in 0usize..6) {
            let space = StateSpace::new(l, k).unwrap();
            for i in 0..space.seniority_states() {
                let (b, a) = space.split_index(i);
                prop_assert!(b < l && a <= k);
                prop_assert_eq!(space.flat_index(b, a), i);
            }
        }

        #[test]
        fn normalize_idempotent(v in proptest::collection::vec(0.0f64..10.0, 1..8)) {
            prop_assume!(v.iter().sum::<f64>() > 1e-6);
            let once = l1_normalize(&v).unwrap();
            let twice = l1_normalize(&once).unwrap();
            for (a, b) in once.iter().zip(&twice) {
                prop_assert!((a - b).abs() <= EPS_STOCH);
            }
        }
    }
}
