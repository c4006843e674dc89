//! Induced (seniority-weighted) Markov chains and how their maintainable
//! regions relate to the SR region.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimation::{SeniorityWeights, TransitionSequence};
use crate::markov::{region_with_provenance, GrowthFactor};
use crate::model::{fsum, SubstochasticMatrix};
use crate::region::{is_subset, Provenance, Region, SubsetCheck};
use crate::semi_markov::{sr_region_with, RegionOptions, SeniorityMatrix};

/// `P_M = sum_k diag(alpha_k) P(k)` together with its weights.
#[derive(Debug, Clone, PartialEq)]
pub struct InducedChain {
    matrix: SubstochasticMatrix,
    weights: SeniorityWeights,
    unidentified: Vec<usize>,
}

impl InducedChain {
    pub fn matrix(&self) -> &SubstochasticMatrix {
        &self.matrix
    }

    pub fn weights(&self) -> &SeniorityWeights {
        &self.weights
    }

    /// States whose row rests on no data.
    pub fn unidentified(&self) -> &[usize] {
        &self.unidentified
    }
}

pub fn induce_markov(seq: &TransitionSequence, w: &SeniorityWeights) -> Result<InducedChain> {
    let space = seq.space();
    let l = space.l();
    if w.l() != l {
        return Err(Error::DimensionMismatch { expected: l, found: w.l() });
    }
    if w.classes() != space.block_len() {
        return Err(Error::InvalidWeights(format!(
            "expected {} seniority classes, got {}",
            space.block_len(),
            w.classes()
        )));
    }
    let p = DMatrix::from_fn(l, l, |i, j| fsum((0..w.classes()).map(|k| w.get(k, i) * seq.internal(k)[(i, j)])));

    let mut unidentified: Vec<usize> = w.unidentified().to_vec();
    unidentified.extend(seq.flags().iter().filter(|f| w.get(f.seniority, f.state) > 0.0).map(|f| f.state));
    unidentified.sort_unstable();
    unidentified.dedup();
    Ok(InducedChain { matrix: SubstochasticMatrix::new(p, false)?, weights: w.clone(), unidentified })
}

/// Maintainable region of an induced chain.
pub fn induced_region(ic: &InducedChain, g: GrowthFactor, opts: RegionOptions) -> Result<Region> {
    if !opts.allow_unidentified && !ic.unidentified.is_empty() {
        return Err(Error::Unidentified { rows: ic.unidentified.iter().map(|&i| (i, 0)).collect() });
    }
    region_with_provenance(&ic.matrix, g, Provenance::Induced)
}

/// How the SR region `A` relates to another region `B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Equal,
    /// `A` is strictly inside `B`.
    SrSubset,
    /// `B` is strictly inside `A`.
    InducedSubset,
    Incomparable,
}

impl std::fmt::Display for Relation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Relation::Equal => "equal",
            Relation::SrSubset => "sr_subset",
            Relation::InducedSubset => "induced_subset",
            Relation::Incomparable => "incomparable",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub relation: Relation,
    /// `A ⊆ B`, with a vertex of `A` outside `B` when it fails.
    pub sr_in_other: SubsetCheck,
    /// `B ⊆ A`, with a vertex of `B` outside `A` when it fails.
    pub other_in_sr: SubsetCheck,
}

/// Decide the relation with two inclusion tests.
pub fn compare_regions(sr: &Region, other: &Region) -> Result<Comparison> {
    let sr_in_other = is_subset(sr, other)?;
    let other_in_sr = is_subset(other, sr)?;
    let relation = match (sr_in_other.holds, other_in_sr.holds) {
        (true, true) => Relation::Equal,
        (true, false) => Relation::SrSubset,
        (false, true) => Relation::InducedSubset,
        (false, false) => Relation::Incomparable,
    };
    Ok(Comparison { relation, sr_in_other, other_in_sr })
}

pub fn compare_sr_vs_induced(sm: &SeniorityMatrix, ic: &InducedChain, g: GrowthFactor) -> Result<Comparison> {
    compare_sr_vs_induced_with(sm, ic, g, RegionOptions::default())
}

pub fn compare_sr_vs_induced_with(
    sm: &SeniorityMatrix,
    ic: &InducedChain,
    g: GrowthFactor,
    opts: RegionOptions,
) -> Result<Comparison> {
    let sr = sr_region_with(sm, g, opts)?;
    let other = induced_region(ic, g, opts)?;
    compare_regions(&sr, &other)
}
