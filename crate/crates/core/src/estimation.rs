//! Estimation of seniority-indexed transition matrices from longitudinal
//! personnel records, conversion from a semi-Markov kernel, and the seniority
//! mix weights behind induced Markov chains.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{complement, fsum, StateSpace, SubstochasticMatrix, EPS_STOCH, EPS_STRICT};

/// One observation: `person_id` was in `state` during period `time`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventRecord {
    pub person_id: String,
    pub time: u64,
    pub state: String,
    /// Seniority at the person's first observation, when known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seniority0: Option<usize>,
}

impl EventRecord {
    pub fn new(person_id: impl Into<String>, time: u64, state: impl Into<String>) -> Self {
        Self { person_id: person_id.into(), time, state: state.into(), seniority0: None }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CountOptions {
    /// Fail with `SeniorityOverflow` on a stay at maximal seniority.
    pub strict: bool,
    /// End of the observation window `M`; defaults to the latest record time.
    pub horizon: Option<u64>,
}

/// Integer counts behind the maximum likelihood estimator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitionCounts {
    space: StateSpace,
    /// `moves[k][i][j]`; column `l` counts wastage.
    moves: Vec<Vec<Vec<u64>>>,
    /// `exposure[k][i]` = `N_i(k)`.
    exposure: Vec<Vec<u64>>,
}

impl TransitionCounts {
    pub fn zeros(space: &StateSpace) -> Self {
        let l = space.l();
        let k = space.block_len();
        Self { space: space.clone(), moves: vec![vec![vec![0; l + 1]; l]; k], exposure: vec![vec![0; l]; k] }
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    /// `N_ij(k)`; `j = l` is the wastage destination.
    pub fn moves(&self, i: usize, j: usize, k: usize) -> u64 {
        self.moves[k][i][j]
    }

    pub fn wastage(&self, i: usize, k: usize) -> u64 {
        self.moves[k][i][self.space.l()]
    }

    /// `N_i(k)`.
    pub fn exposure(&self, i: usize, k: usize) -> u64 {
        self.exposure[k][i]
    }

    /// `N_i`.
    pub fn total_exposure(&self, i: usize) -> u64 {
        self.exposure.iter().map(|row| row[i]).sum()
    }

    /// `N_ij = sum_k N_ij(k)`.
    pub fn total_moves(&self, i: usize, j: usize) -> u64 {
        self.moves.iter().map(|m| m[i][j]).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.exposure.iter().flatten().all(|n| *n == 0)
    }

    /// Add counts from disjoint sets of people.
    pub fn merge(&mut self, other: &TransitionCounts) -> Result<()> {
        if self.space != other.space {
            return Err(Error::InvalidStateSpace("cannot merge counts over different state spaces".into()));
        }
        for (a, b) in self.moves.iter_mut().flatten().flatten().zip(other.moves.iter().flatten().flatten()) {
            *a += b;
        }
        for (a, b) in self.exposure.iter_mut().flatten().zip(other.exposure.iter().flatten()) {
            *a += b;
        }
        Ok(())
    }
}

fn malformed(reason: String) -> Error {
    Error::MalformedRecord { line: None, reason }
}

type Observation = (u64, usize, Option<usize>);

/// Count one-step moves and exposures per `(state, seniority)`.
///
/// Exposure is counted for periods `t <= M - 1` only. A person observed at
/// `t` but not at `t + 1`, or observed at `t + 1` with the wastage label, has
/// left. A later reappearance starts a new spell. Seniority grows by one per
/// consecutive period in the same state and resets on a move.
pub fn count_transitions(records: &[EventRecord], space: &StateSpace, opts: CountOptions) -> Result<TransitionCounts> {
    let mut counts = TransitionCounts::zeros(space);
    let Some(latest) = records.iter().map(|r| r.time).max() else {
        return Ok(counts);
    };
    let horizon = opts.horizon.unwrap_or(latest);
    let wastage = space.l();
    let k_max = space.max_seniority();

    // (time, state index, initial seniority) per person
    let mut people: BTreeMap<&str, Vec<Observation>> = BTreeMap::new();
    for r in records {
        let state = if r.state == space.wastage_label() {
            wastage
        } else {
            space
                .label_index(&r.state)
                .ok_or_else(|| malformed(format!("unknown state label {:?} for person {}", r.state, r.person_id)))?
        };
        if r.seniority0.is_some_and(|s| s > k_max) {
            return Err(malformed(format!("initial seniority above {k_max} for person {}", r.person_id)));
        }
        people.entry(&r.person_id).or_default().push((r.time, state, r.seniority0));
    }

    for (person, mut trace) in people {
        trace.sort_by_key(|r| r.0);
        if let Some(w) = trace.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(malformed(format!("duplicate record for person {person} at time {}", w[0].0)));
        }
        // seniority of the current spell; `None` once the spell is censored
        let mut seniority: Option<usize> = None;
        for (idx, &(t, state, s0)) in trace.iter().enumerate() {
            if state == wastage {
                seniority = None;
                continue;
            }
            let continues = idx > 0 && trace[idx - 1].0 + 1 == t && trace[idx - 1].1 == state;
            let k = if continues {
                match seniority {
                    Some(k) => k,
                    None => continue,
                }
            } else if idx == 0 {
                s0.unwrap_or(0)
            } else {
                0
            };
            seniority = Some(k);
            if t >= horizon {
                continue;
            }
            let next = trace.get(idx + 1).filter(|n| n.0 == t + 1 && n.0 <= horizon);
            let dest = next.map_or(wastage, |n| n.1);
            if dest == state {
                if k == k_max {
                    if opts.strict {
                        return Err(Error::SeniorityOverflow {
                            person: person.to_string(),
                            time: t,
                            max_seniority: k_max,
                        });
                    }
                    // no seniority-based destination: censor the rest of the spell
                    seniority = None;
                    continue;
                }
                seniority = Some(k + 1);
            }
            counts.exposure[k][state] += 1;
            counts.moves[k][state][dest] += 1;
        }
    }
    Ok(counts)
}

/// Why a row of a transition matrix carries no estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlagReason {
    /// No exposure in the data.
    Unidentified,
    /// The kernel's survival mass is used up before this seniority.
    Exhausted,
}

/// A row `(state, seniority)` filled with all-wastage for lack of information.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowFlag {
    pub state: usize,
    pub seniority: usize,
    pub reason: FlagReason,
}

/// The family `P(0), .., P(K)` of internal `l x l` one-step matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionSequence {
    space: StateSpace,
    matrices: Vec<DMatrix<f64>>,
    flags: Vec<RowFlag>,
}

impl TransitionSequence {
    pub fn new(space: StateSpace, matrices: Vec<DMatrix<f64>>, flags: Vec<RowFlag>) -> Result<Self> {
        if matrices.len() != space.block_len() {
            return Err(Error::DimensionMismatch { expected: space.block_len(), found: matrices.len() });
        }
        for m in &matrices {
            if m.nrows() != space.l() || m.ncols() != space.l() {
                return Err(Error::DimensionMismatch { expected: space.l(), found: m.nrows().max(m.ncols()) });
            }
            SubstochasticMatrix::new(m.clone(), false)?;
        }
        let mut flags = flags;
        flags.sort_by_key(|f| (f.state, f.seniority));
        flags.dedup_by_key(|f| (f.state, f.seniority));
        Ok(Self { space, matrices, flags })
    }

    /// Sequence from row lists, `rows[k][i][j]`, without flags.
    pub fn from_rows(space: StateSpace, rows: &[Vec<Vec<f64>>]) -> Result<Self> {
        let matrices = rows.iter().map(|m| crate::model::matrix_from_rows(m)).collect::<Result<_>>()?;
        Self::new(space, matrices, Vec::new())
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    /// Internal part of `P(k)`.
    pub fn internal(&self, k: usize) -> &DMatrix<f64> {
        &self.matrices[k]
    }

    pub fn matrices(&self) -> &[DMatrix<f64>] {
        &self.matrices
    }

    /// Wastage column of `P(k)`.
    pub fn wastage(&self, k: usize) -> Vec<f64> {
        let m = &self.matrices[k];
        (0..m.nrows()).map(|i| complement(1.0, m.row(i).iter().copied()).clamp(0.0, 1.0)).collect()
    }

    /// `P(k)` with the wastage column appended (`l x (l+1)`).
    pub fn completion(&self, k: usize) -> DMatrix<f64> {
        let l = self.space.l();
        let w = self.wastage(k);
        DMatrix::from_fn(l, l + 1, |i, j| if j < l { self.matrices[k][(i, j)] } else { w[i] })
    }

    pub fn flags(&self) -> &[RowFlag] {
        &self.flags
    }

    pub fn is_flagged(&self) -> bool {
        !self.flags.is_empty()
    }

    /// Error listing flagged rows, for callers that refuse them.
    pub fn require_identified(&self) -> Result<()> {
        if self.flags.is_empty() {
            Ok(())
        } else {
            Err(Error::Unidentified { rows: self.flags.iter().map(|f| (f.state, f.seniority)).collect() })
        }
    }

    /// The kernel this sequence corresponds to (`q_ij(k) = P_ij(k) * prod_{m<k} P_ii(m)`).
    pub fn to_kernel(&self) -> SemiMarkovKernel {
        let l = self.space.l();
        let mut survival = vec![1.0; l];
        let mut q = Vec::with_capacity(self.matrices.len());
        for k in 0..self.matrices.len() {
            let c = self.completion(k);
            q.push(DMatrix::from_fn(l, l + 1, |i, j| if i == j { 0.0 } else { c[(i, j)] * survival[i] }));
            for (i, s) in survival.iter_mut().enumerate() {
                *s *= c[(i, i)];
            }
        }
        SemiMarkovKernel { space: self.space.clone(), q }
    }
}

/// `q_ij(k)`: probability that the next jump goes to `j` after a sojourn of
/// `k` periods in `i`; the last column is wastage.
#[derive(Debug, Clone, PartialEq)]
pub struct SemiMarkovKernel {
    space: StateSpace,
    q: Vec<DMatrix<f64>>,
}

impl SemiMarkovKernel {
    /// Validates shapes, nonnegativity, zero self-jumps and total mass `<= 1`.
    pub fn new(space: StateSpace, q: Vec<DMatrix<f64>>) -> Result<Self> {
        let l = space.l();
        if q.len() != space.block_len() {
            return Err(Error::InvalidKernel(format!(
                "expected {} sojourn matrices, got {}",
                space.block_len(),
                q.len()
            )));
        }
        for (k, m) in q.iter().enumerate() {
            if m.nrows() != l || m.ncols() != l + 1 {
                return Err(Error::InvalidKernel(format!("q({k}) must be {l}x{}", l + 1)));
            }
            if m.iter().any(|v| !v.is_finite() || *v < 0.0) {
                return Err(Error::InvalidKernel(format!("q({k}) has a negative or non-finite entry")));
            }
            if let Some(i) = (0..l).find(|&i| m[(i, i)] != 0.0) {
                return Err(Error::InvalidKernel(format!("q({k}) has a self-jump in state {i}")));
            }
        }
        for i in 0..l {
            let total = fsum(q.iter().flat_map(|m| m.row(i).iter().copied().collect::<Vec<_>>()));
            if total > 1.0 + EPS_STOCH {
                return Err(Error::InvalidKernel(format!("state {i} has total mass {total} > 1")));
            }
        }
        Ok(Self { space, q })
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    pub fn q(&self, k: usize) -> &DMatrix<f64> {
        &self.q[k]
    }

    pub fn matrices(&self) -> &[DMatrix<f64>] {
        &self.q
    }
}

/// Convert a kernel into the sequence `P(k)`.
///
/// Off-diagonal entries are `q_ij(k)` divided by the survival mass
/// `1 - sum_h sum_{m<k} q_ih(m)` (wastage included); the diagonal takes the
/// complement. Rows whose survival mass is at most `EPS_STRICT` are flagged
/// exhausted and sent entirely to wastage.
pub fn kernel_to_transition_sequence(kernel: &SemiMarkovKernel) -> Result<TransitionSequence> {
    let space = kernel.space.clone();
    let l = space.l();
    let mut flags = Vec::new();
    let mut matrices = Vec::with_capacity(kernel.q.len());
    for k in 0..kernel.q.len() {
        let mut p = DMatrix::zeros(l, l);
        for i in 0..l {
            let used = fsum(kernel.q[..k].iter().flat_map(|m| m.row(i).iter().copied().collect::<Vec<_>>()));
            let survival = complement(1.0, [used]);
            if survival <= EPS_STRICT {
                flags.push(RowFlag { state: i, seniority: k, reason: FlagReason::Exhausted });
                continue;
            }
            let leave: Vec<f64> = (0..=l).filter(|&j| j != i).map(|j| kernel.q[k][(i, j)] / survival).collect();
            for j in (0..l).filter(|&j| j != i) {
                p[(i, j)] = kernel.q[k][(i, j)] / survival;
            }
            p[(i, i)] = complement(1.0, leave).max(0.0);
        }
        matrices.push(p);
    }
    TransitionSequence::new(space, matrices, flags)
}

/// `P_ij(k) = N_ij(k) / N_i(k)`; rows without exposure are flagged.
pub fn estimate_transition_sequence(counts: &TransitionCounts) -> Result<TransitionSequence> {
    let space = counts.space.clone();
    let l = space.l();
    let mut flags = Vec::new();
    let mut matrices = Vec::with_capacity(space.block_len());
    for k in 0..space.block_len() {
        let mut p = DMatrix::zeros(l, l);
        for i in 0..l {
            let n = counts.exposure(i, k);
            if n == 0 {
                flags.push(RowFlag { state: i, seniority: k, reason: FlagReason::Unidentified });
                continue;
            }
            for j in 0..l {
                p[(i, j)] = counts.moves(i, j, k) as f64 / n as f64;
            }
        }
        matrices.push(p);
    }
    TransitionSequence::new(space, matrices, flags)
}

/// Seniority mix `alpha_k^i`, indexed `[k][i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeniorityWeights {
    weights: Vec<Vec<f64>>,
    /// States without exposure; their weights are a placeholder.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    unidentified: Vec<usize>,
}

impl SeniorityWeights {
    /// Validates nonnegativity and per-state sums of one.
    pub fn new(weights: Vec<Vec<f64>>) -> Result<Self> {
        Self::with_unidentified(weights, Vec::new())
    }

    pub fn with_unidentified(weights: Vec<Vec<f64>>, unidentified: Vec<usize>) -> Result<Self> {
        let l = weights.first().map_or(0, Vec::len);
        if l == 0 || weights.iter().any(|w| w.len() != l) {
            return Err(Error::InvalidWeights("weights must form a non-empty (K+1) x l table".into()));
        }
        if weights.iter().flatten().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidWeights("weights must be nonnegative".into()));
        }
        for i in (0..l).filter(|i| !unidentified.contains(i)) {
            let sum = fsum(weights.iter().map(|w| w[i]));
            if (sum - 1.0).abs() > EPS_STOCH {
                return Err(Error::InvalidWeights(format!("weights of state {i} sum to {sum}")));
            }
        }
        Ok(Self { weights, unidentified })
    }

    pub fn l(&self) -> usize {
        self.weights[0].len()
    }

    /// Number of seniority classes, `K + 1`.
    pub fn classes(&self) -> usize {
        self.weights.len()
    }

    pub fn get(&self, k: usize, i: usize) -> f64 {
        self.weights[k][i]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.weights
    }

    pub fn unidentified(&self) -> &[usize] {
        &self.unidentified
    }
}

/// `alpha_k^i = N_i(k) / N_i`. States without exposure are flagged and get
/// all weight at seniority zero.
pub fn seniority_weights(counts: &TransitionCounts) -> SeniorityWeights {
    let l = counts.space.l();
    let classes = counts.space.block_len();
    let mut weights = vec![vec![0.0; l]; classes];
    let mut unidentified = Vec::new();
    for i in 0..l {
        let total = counts.total_exposure(i);
        if total == 0 {
            unidentified.push(i);
            weights[0][i] = 1.0;
            continue;
        }
        for (k, row) in weights.iter_mut().enumerate() {
            row[i] = counts.exposure(i, k) as f64 / total as f64;
        }
    }
    SeniorityWeights { weights, unidentified }
}

/// Direct Markov estimate `N_ij / N_i` that ignores seniority, with the states
/// lacking exposure.
pub fn estimate_markov_chain(counts: &TransitionCounts) -> Result<(SubstochasticMatrix, Vec<usize>)> {
    let l = counts.space.l();
    let mut p = DMatrix::zeros(l, l);
    let mut unidentified = Vec::new();
    for i in 0..l {
        let n = counts.total_exposure(i);
        if n == 0 {
            unidentified.push(i);
            continue;
        }
        for j in 0..l {
            p[(i, j)] = counts.total_moves(i, j) as f64 / n as f64;
        }
    }
    Ok((SubstochasticMatrix::new(p, false)?, unidentified))
}

/// Parameters for synthetic career data.
#[derive(Debug, Clone, PartialEq)]
pub struct CareerSimulation {
    pub persons: usize,
    /// Last observed period `M`.
    pub horizon: u64,
    /// Distribution of entrants over organisational states.
    pub entry: Vec<f64>,
}

/// Simulate careers under `seq`: everyone enters at time 0 with seniority 0
/// and is followed until wastage or the horizon. Leavers simply stop
/// appearing.
pub fn simulate_careers<R: Rng>(
    seq: &TransitionSequence,
    sim: &CareerSimulation,
    rng: &mut R,
) -> Result<Vec<EventRecord>> {
    let space = seq.space();
    let l = space.l();
    if sim.entry.len() != l {
        return Err(Error::DimensionMismatch { expected: l, found: sim.entry.len() });
    }
    let entry = crate::model::l1_normalize(&sim.entry)?;
    let rows: Vec<DMatrix<f64>> = (0..space.block_len()).map(|k| seq.completion(k)).collect();
    let width = (sim.persons.max(1) - 1).to_string().len();

    let draw = |weights: &mut dyn Iterator<Item = f64>, u: f64| -> usize {
        let mut acc = 0.0;
        let mut last = 0;
        for (j, w) in weights.enumerate() {
            acc += w;
            last = j;
            if u < acc {
                return j;
            }
        }
        last
    };

    let mut records = Vec::new();
    for p in 0..sim.persons {
        let id = format!("p{p:0width$}");
        let mut state = draw(&mut entry.iter().copied(), rng.random::<f64>());
        let mut k = 0usize;
        let mut t = 0u64;
        loop {
            records.push(EventRecord::new(id.clone(), t, space.labels()[state].clone()));
            if t >= sim.horizon {
                break;
            }
            let row = &rows[k.min(space.max_seniority())];
            let next = draw(&mut row.row(state).iter().copied(), rng.random::<f64>());
            if next == l {
                break;
            }
            if next == state {
                k += 1;
                if k > space.max_seniority() {
                    return Err(Error::MaxSeniorityOverflow { state, value: row[(state, state)] });
                }
            } else {
                state = next;
                k = 0;
            }
            t += 1;
        }
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rec(p: &str, t: u64, s: &str) -> EventRecord {
        EventRecord::new(p, t, s)
    }

    #[test]
    fn two_person_trace() {
        let space = StateSpace::new(2, 2).unwrap();
        let records = vec![rec("a", 0, "1"), rec("a", 1, "2"), rec("b", 0, "1"), rec("b", 1, "1")];
        let c = count_transitions(&records, &space, CountOptions::default()).unwrap();
        assert_eq!(c.moves(0, 1, 0), 1);
        assert_eq!(c.moves(0, 0, 0), 1);
        assert_eq!(c.exposure(0, 0), 2);
        // both observed only at M = 1 afterwards: censored
        assert_eq!(c.exposure(1, 0), 0);
        assert_eq!(c.exposure(0, 1), 0);

        let seq = estimate_transition_sequence(&c).unwrap();
        assert_eq!(seq.internal(0)[(0, 1)], 0.5);
        assert_eq!(seq.internal(0)[(0, 0)], 0.5);
        assert!(seq.flags().iter().any(|f| f.state == 1 && f.seniority == 0));
    }

    #[test]
    fn empty_and_censored_inputs() {
        let space = StateSpace::new(2, 1).unwrap();
        let c = count_transitions(&[], &space, CountOptions::default()).unwrap();
        assert!(c.is_empty());
        let c = count_transitions(&[rec("a", 5, "1")], &space, CountOptions::default()).unwrap();
        assert!(c.is_empty());
    }

    #[test]
    fn absence_and_label_count_as_wastage() {
        let space = StateSpace::new(2, 2).unwrap();
        let records = vec![
            rec("a", 0, "1"),
            rec("a", 1, "W"),
            rec("b", 0, "2"),
            rec("c", 0, "2"),
            rec("c", 1, "2"),
            rec("c", 2, "2"),
        ];
        let c = count_transitions(&records, &space, CountOptions::default()).unwrap();
        assert_eq!(c.wastage(0, 0), 1);
        assert_eq!(c.wastage(1, 0), 1);
        assert_eq!(c.moves(1, 1, 0), 1);
        assert_eq!(c.moves(1, 1, 1), 1);
        assert_eq!(c.exposure(1, 1), 1);
        for i in 0..2 {
            for k in 0..3 {
                let dest: u64 = (0..=2).map(|j| c.moves(i, j, k)).sum();
                assert_eq!(dest, c.exposure(i, k));
            }
        }
    }

    #[test]
    fn malformed_records() {
        let space = StateSpace::new(2, 1).unwrap();
        let dup = vec![rec("a", 0, "1"), rec("a", 0, "2")];
        assert!(matches!(count_transitions(&dup, &space, CountOptions::default()), Err(Error::MalformedRecord { .. })));
        let unknown = vec![rec("a", 0, "7")];
        assert!(matches!(
            count_transitions(&unknown, &space, CountOptions::default()),
            Err(Error::MalformedRecord { .. })
        ));
    }

    #[test]
    fn max_seniority_stay() {
        let space = StateSpace::new(1, 1).unwrap();
        let records = vec![rec("a", 0, "1"), rec("a", 1, "1"), rec("a", 2, "1"), rec("a", 3, "1")];
        let strict = CountOptions { strict: true, horizon: None };
        assert!(matches!(count_transitions(&records, &space, strict), Err(Error::SeniorityOverflow { time: 1, .. })));
        let c = count_transitions(&records, &space, CountOptions::default()).unwrap();
        assert_eq!(c.exposure(0, 0), 1);
        assert_eq!(c.exposure(0, 1), 0);
    }

    #[test]
    fn initial_seniority_column() {
        let space = StateSpace::new(1, 2).unwrap();
        let mut first = rec("a", 0, "1");
        first.seniority0 = Some(1);
        let c = count_transitions(&[first, rec("a", 1, "1")], &space, CountOptions { strict: false, horizon: Some(5) })
            .unwrap();
        assert_eq!(c.moves(0, 0, 1), 1);
        assert_eq!(c.wastage(0, 2), 1);
    }

    #[test]
    fn kernel_conversion() {
        let space = StateSpace::new(2, 1).unwrap();
        let q0 = DMatrix::from_row_slice(2, 3, &[0.0, 0.3, 0.0, 0.0, 0.0, 0.0]);
        let q1 = DMatrix::from_row_slice(2, 3, &[0.0, 0.35, 0.0, 0.0, 0.0, 0.0]);
        let kernel = SemiMarkovKernel::new(space, vec![q0, q1]).unwrap();
        let seq = kernel_to_transition_sequence(&kernel).unwrap();
        assert_eq!(seq.internal(0)[(0, 1)], 0.3);
        assert!((seq.internal(1)[(0, 1)] - 0.5).abs() < 1e-15);
        assert!((seq.internal(0)[(0, 0)] - 0.7).abs() < 1e-15);
    }

    #[test]
    fn exhausted_kernel_row() {
        let space = StateSpace::new(2, 1).unwrap();
        let q0 = DMatrix::from_row_slice(2, 3, &[0.0, 0.6, 0.4, 0.0, 0.0, 0.5]);
        let kernel = SemiMarkovKernel::new(space, vec![q0, DMatrix::zeros(2, 3)]).unwrap();
        let seq = kernel_to_transition_sequence(&kernel).unwrap();
        assert_eq!(seq.flags(), &[RowFlag { state: 0, seniority: 1, reason: FlagReason::Exhausted }]);
        assert_eq!(seq.wastage(1)[0], 1.0);
        assert!(seq.require_identified().is_err());
    }

    #[test]
    fn invalid_kernels() {
        let space = StateSpace::new(2, 0).unwrap();
        let self_jump = DMatrix::from_row_slice(2, 3, &[0.1, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert!(SemiMarkovKernel::new(space.clone(), vec![self_jump]).is_err());
        let too_much = DMatrix::from_row_slice(2, 3, &[0.0, 0.8, 0.3, 0.0, 0.0, 0.0]);
        assert!(SemiMarkovKernel::new(space, vec![too_much]).is_err());
    }

    #[test]
    fn weights_from_counts() {
        let space = StateSpace::new(1, 2).unwrap();
        let mut c = TransitionCounts::zeros(&space);
        c.exposure[0][0] = 1;
        c.exposure[1][0] = 3;
        let w = seniority_weights(&c);
        assert_eq!(w.get(0, 0), 0.25);
        assert_eq!(w.get(1, 0), 0.75);
        assert_eq!(w.get(2, 0), 0.0);

        let mut c = TransitionCounts::zeros(&StateSpace::new(2, 2).unwrap());
        c.exposure[0][0] = 4;
        let w = seniority_weights(&c);
        assert_eq!((w.get(0, 0), w.get(1, 0), w.get(2, 0)), (1.0, 0.0, 0.0));
        assert_eq!(w.unidentified(), &[1]);
    }

    #[test]
    fn example_weights_are_valid() {
        let alpha = vec![vec![0.01, 0.28, 0.39], vec![0.68, 0.12, 0.17], vec![0.31, 0.6, 0.44]];
        let beta = vec![vec![0.15, 0.11, 0.16], vec![0.6, 0.56, 0.64], vec![0.25, 0.33, 0.2]];
        let gamma = vec![vec![0.31, 0.29, 0.04], vec![0.27, 0.48, 0.57], vec![0.42, 0.23, 0.39]];
        for w in [alpha, beta, gamma] {
            assert!(SeniorityWeights::new(w).is_ok());
        }
        assert!(SeniorityWeights::new(vec![vec![0.5], vec![0.4]]).is_err());
    }

    fn kernel_strategy() -> impl Strategy<Value = (usize, usize, Vec<f64>)> {
        (1usize..4, 0usize..4)
            .prop_flat_map(|(l, k)| (Just(l), Just(k), proptest::collection::vec(0.0f64..1.0, (k + 1) * l * (l + 1))))
    }

    proptest! {
        #[test]
        fn kernel_round_trip((l, k, raw) in kernel_strategy()) {
            let space = StateSpace::new(l, k).unwrap();
            // per state: random split of a total mass below one over (sojourn, destination)
            let mut q: Vec<DMatrix<f64>> = (0..=k).map(|_| DMatrix::zeros(l, l + 1)).collect();
            for i in 0..l {
                let cells: Vec<(usize, usize)> =
                    (0..=k).flat_map(|m| (0..=l).filter(move |&j| j != i).map(move |j| (m, j))).collect();
                let mass: f64 = cells.iter().map(|&(m, j)| raw[(m * l + i) * (l + 1) + j]).sum();
                let scale = if mass > 0.0 { 0.95 / mass } else { 0.0 };
                for &(m, j) in &cells {
                    q[m][(i, j)] = raw[(m * l + i) * (l + 1) + j] * scale;
                }
            }
            let kernel = SemiMarkovKernel::new(space, q.clone()).unwrap();
            let seq = kernel_to_transition_sequence(&kernel).unwrap();
            let back = seq.to_kernel();
            for m in 0..=k {
                for i in 0..l {
                    for j in 0..=l {
                        prop_assert!((back.q(m)[(i, j)] - q[m][(i, j)]).abs() <= 1e-12);
                    }
                }
            }
        }
    }
}
