//! File formats: JSON model and region files, CSV records and path traces.
//!
//! Floats are written in their shortest round-trip decimal form, so reading a
//! file back reproduces every number bit for bit. Seniority-based vectors use
//! the state order `S_0(1), S_1(1), .., S_K(1), S_0(2), ..`.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimation::{
    kernel_to_transition_sequence, EventRecord, RowFlag, SemiMarkovKernel, SeniorityWeights, TransitionSequence,
};
use crate::model::{matrix_from_rows, matrix_to_rows, StateSpace, SubstochasticMatrix};
use crate::region::{HForm, Provenance, Region};
use crate::semi_markov::PathTrace;

pub const SCHEMA_VERSION: u32 = 1;

fn check_schema(found: u32) -> Result<()> {
    if found != SCHEMA_VERSION {
        return Err(Error::Format(format!("schema version {found} is not supported (expected {SCHEMA_VERSION})")));
    }
    Ok(())
}

fn to_pretty_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// State space as written to files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceSpec {
    pub labels: Vec<String>,
    pub max_seniority: usize,
    pub wastage_label: String,
}

impl SpaceSpec {
    pub fn from_space(space: &StateSpace) -> Self {
        Self {
            labels: space.labels().to_vec(),
            max_seniority: space.max_seniority(),
            wastage_label: space.wastage_label().to_string(),
        }
    }

    pub fn to_space(&self) -> Result<StateSpace> {
        StateSpace::with_labels(self.labels.clone(), self.max_seniority, &self.wastage_label)
    }
}

/// A model: state space plus either explicit matrices `P(k)` or a kernel,
/// optional seniority weights and an optional plain Markov matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub schema_version: u32,
    pub space: SpaceSpec,
    /// Internal parts of `P(k)`, indexed `[k][i][j]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transitions: Option<Vec<Vec<Vec<f64>>>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<RowFlag>,
    /// Kernel `q_ij(k)` indexed `[k][i][j]`, last column wastage.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel: Option<Vec<Vec<Vec<f64>>>>,
    /// Seniority weights indexed `[k][i]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<SeniorityWeights>,
    /// Internal Markov matrix (induced or estimated directly).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub markov: Option<Vec<Vec<f64>>>,
}

impl ModelFile {
    pub fn from_sequence(seq: &TransitionSequence, weights: Option<SeniorityWeights>) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            space: SpaceSpec::from_space(seq.space()),
            transitions: Some(seq.matrices().iter().map(matrix_to_rows).collect()),
            flags: seq.flags().to_vec(),
            kernel: None,
            weights,
            markov: None,
        }
    }

    pub fn from_kernel(kernel: &SemiMarkovKernel) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            space: SpaceSpec::from_space(kernel.space()),
            transitions: None,
            flags: Vec::new(),
            kernel: Some(kernel.matrices().iter().map(matrix_to_rows).collect()),
            weights: None,
            markov: None,
        }
    }

    pub fn space(&self) -> Result<StateSpace> {
        self.space.to_space()
    }

    /// The sequence `P(k)`, converting the kernel when no matrices are stored.
    pub fn sequence(&self) -> Result<TransitionSequence> {
        check_schema(self.schema_version)?;
        let space = self.space()?;
        match (&self.transitions, &self.kernel) {
            (Some(rows), _) => {
                let matrices = rows.iter().map(|m| matrix_from_rows(m)).collect::<Result<Vec<DMatrix<f64>>>>()?;
                TransitionSequence::new(space, matrices, self.flags.clone())
            }
            (None, Some(q)) => {
                let q = q.iter().map(|m| matrix_from_rows(m)).collect::<Result<Vec<DMatrix<f64>>>>()?;
                kernel_to_transition_sequence(&SemiMarkovKernel::new(space, q)?)
            }
            (None, None) => Err(Error::Format("model carries neither transition matrices nor a kernel".into())),
        }
    }

    pub fn seniority_weights(&self) -> Result<Option<SeniorityWeights>> {
        self.weights
            .as_ref()
            .map(|w| SeniorityWeights::with_unidentified(w.rows().to_vec(), w.unidentified().to_vec()))
            .transpose()
    }

    pub fn markov_matrix(&self) -> Result<Option<SubstochasticMatrix>> {
        self.markov.as_ref().map(|rows| SubstochasticMatrix::from_rows(rows, false)).transpose()
    }

    pub fn to_json(&self) -> Result<String> {
        to_pretty_json(self)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let m: Self = serde_json::from_str(s)?;
        check_schema(m.schema_version)?;
        Ok(m)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        Ok(fs::write(path, self.to_json()?)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Nonempty,
    Empty,
}

/// A region as written to disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionFile {
    pub schema_version: u32,
    pub alpha: f64,
    pub provenance: Provenance,
    pub dimension: usize,
    pub verdict: Verdict,
    pub vertices: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hform: Option<HForm>,
}

impl RegionFile {
    pub fn from_region(region: &Region) -> Result<Self> {
        let vertices = region.vertex_list()?;
        Ok(Self {
            schema_version: SCHEMA_VERSION,
            alpha: region.alpha(),
            provenance: region.provenance(),
            dimension: region.dimension(),
            verdict: if vertices.is_empty() { Verdict::Empty } else { Verdict::Nonempty },
            vertices,
            hform: region.hform().cloned(),
        })
    }

    /// Rebuild the region, re-checking vertices against the halfspaces.
    pub fn to_region(&self) -> Result<Region> {
        check_schema(self.schema_version)?;
        Region::new(self.dimension, self.alpha, self.provenance, Some(self.vertices.clone()), self.hform.clone())
    }

    pub fn to_json(&self) -> Result<String> {
        to_pretty_json(self)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let r: Self = serde_json::from_str(s)?;
        check_schema(r.schema_version)?;
        Ok(r)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        Ok(fs::write(path, self.to_json()?)?)
    }
}

/// A vector stored either as a bare JSON array or as `{"structure": [..]}`.
pub fn parse_vector(s: &str) -> Result<Vec<f64>> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum VectorFile {
        Bare(Vec<f64>),
        Wrapped { structure: Vec<f64> },
    }
    Ok(match serde_json::from_str::<VectorFile>(s)? {
        VectorFile::Bare(v) | VectorFile::Wrapped { structure: v } => v,
    })
}

/// Weights stored either as a bare `[k][i]` table or as a weights object.
pub fn parse_weights(s: &str) -> Result<SeniorityWeights> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum WeightsFile {
        Table(Vec<Vec<f64>>),
        Full(SeniorityWeights),
    }
    match serde_json::from_str::<WeightsFile>(s)? {
        WeightsFile::Table(t) => SeniorityWeights::new(t),
        WeightsFile::Full(w) => SeniorityWeights::with_unidentified(w.rows().to_vec(), w.unidentified().to_vec()),
    }
}

/// Read `person_id,time,state[,seniority0]` records.
pub fn read_records<R: Read>(input: R) -> Result<Vec<EventRecord>> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let headers = reader.headers()?.clone();
    let column = |name: &str| headers.iter().position(|h| h == name);
    let missing = |name: &str| Error::MalformedRecord { line: Some(1), reason: format!("missing column {name:?}") };
    let person = column("person_id").ok_or_else(|| missing("person_id"))?;
    let time = column("time").ok_or_else(|| missing("time"))?;
    let state = column("state").ok_or_else(|| missing("state"))?;
    let seniority0 = column("seniority0");

    let mut records = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| Error::MalformedRecord {
            line: e.position().map(|p| p.line() as usize),
            reason: e.to_string(),
        })?;
        let line = row.position().map(|p| p.line() as usize);
        let bad = |reason: String| Error::MalformedRecord { line, reason };
        let field = |i: usize| row.get(i).unwrap_or("");
        let id = field(person);
        if id.is_empty() {
            return Err(bad("empty person_id".into()));
        }
        let t: u64 =
            field(time).parse().map_err(|_| bad(format!("time {:?} is not a nonnegative integer", field(time))))?;
        let s0 = match seniority0.map(field) {
            None | Some("") => None,
            Some(v) => Some(v.parse().map_err(|_| bad(format!("seniority0 {v:?} is not a nonnegative integer")))?),
        };
        records.push(EventRecord {
            person_id: id.to_string(),
            time: t,
            state: field(state).to_string(),
            seniority0: s0,
        });
    }
    if records.is_empty() {
        return Err(Error::NoRecords);
    }
    Ok(records)
}

pub fn write_records<W: Write>(out: W, records: &[EventRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let with_s0 = records.iter().any(|r| r.seniority0.is_some());
    if with_s0 {
        w.write_record(["person_id", "time", "state", "seniority0"])?;
    } else {
        w.write_record(["person_id", "time", "state"])?;
    }
    for r in records {
        let t = r.time.to_string();
        if with_s0 {
            let s0 = r.seniority0.map(|s| s.to_string()).unwrap_or_default();
            w.write_record([r.person_id.as_str(), &t, &r.state, &s0])?;
        } else {
            w.write_record([r.person_id.as_str(), &t, &r.state])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Trace CSV: `t`, block totals, `s_SB(t)`, recruitment, step delta, then a
/// `# converged=..` comment line with the limit.
pub fn write_trace<W: Write>(mut out: W, trace: &PathTrace, space: &StateSpace) -> Result<()> {
    let mut header = vec!["t".to_string()];
    header.extend(space.labels().iter().map(|l| format!("total_{l}")));
    let sb_names: Vec<String> = (0..space.seniority_states())
        .map(|i| {
            let (b, a) = space.split_index(i);
            format!("{}_{a}", space.labels()[b])
        })
        .collect();
    header.extend(sb_names.iter().map(|n| format!("s_{n}")));
    header.extend(sb_names.iter().map(|n| format!("r_{n}")));
    header.push("delta".into());
    writeln!(out, "{}", header.join(","))?;
    for step in &trace.steps {
        let mut fields = vec![step.t.to_string()];
        fields.extend(step.block_totals.iter().map(f64::to_string));
        fields.extend(step.structure.iter().map(f64::to_string));
        fields.extend(step.recruitment.iter().map(f64::to_string));
        fields.push(step.delta.map(|d| d.to_string()).unwrap_or_default());
        writeln!(out, "{}", fields.join(","))?;
    }
    let limit: Vec<String> = trace.limit.iter().map(f64::to_string).collect();
    writeln!(out, "# converged={} limit={}", trace.converged, limit.join(";"))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::markov::{markov_region, GrowthFactor};

    fn example_sequence() -> TransitionSequence {
        TransitionSequence::from_rows(
            StateSpace::new(3, 2).unwrap(),
            &[
                vec![vec![0.2, 0.5, 0.0], vec![0.0, 0.7, 0.2], vec![0.0, 0.0, 0.9]],
                vec![vec![0.6, 0.3, 0.0], vec![0.0, 0.5, 0.45], vec![0.0, 0.0, 0.9]],
                vec![vec![0.0; 3]; 3],
            ],
        )
        .unwrap()
    }

    #[test]
    fn model_round_trip_is_exact() {
        let w =
            SeniorityWeights::new(vec![vec![0.01, 0.28, 0.39], vec![0.68, 0.12, 0.17], vec![0.31, 0.6, 0.44]]).unwrap();
        let mut m = ModelFile::from_sequence(&example_sequence(), Some(w));
        m.markov = Some(vec![vec![1.0 / 3.0, 0.1, 0.0], vec![0.0; 3], vec![0.0, 0.0, 0.7]]);
        let text = m.to_json().unwrap();
        let back = ModelFile::from_json(&text).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.to_json().unwrap(), text);
        assert_eq!(back.sequence().unwrap(), example_sequence());
    }

    #[test]
    fn region_round_trip() {
        let p = SubstochasticMatrix::from_rows(
            &[vec![0.39, 0.255, 0.0], vec![0.0, 0.357, 0.274], vec![0.0, 0.0, 0.72]],
            true,
        )
        .unwrap();
        let r = markov_region(&p, GrowthFactor::constant()).unwrap();
        let file = RegionFile::from_region(&r).unwrap();
        let back = RegionFile::from_json(&file.to_json().unwrap()).unwrap();
        assert_eq!(back, file);
        assert_eq!(back.to_region().unwrap(), r);
    }

    #[test]
    fn schema_version_is_checked() {
        let mut m = ModelFile::from_sequence(&example_sequence(), None);
        m.schema_version = 9;
        assert!(matches!(ModelFile::from_json(&m.to_json().unwrap()), Err(Error::Format(_))));
    }

    #[test]
    fn records_parse_and_report_lines() {
        let text = "person_id,time,state\na,0,1\na,1,2\n";
        let r = read_records(text.as_bytes()).unwrap();
        assert_eq!(r, vec![EventRecord::new("a", 0, "1"), EventRecord::new("a", 1, "2")]);

        let err = read_records("person_id,time,state\na,x,1\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::MalformedRecord { line: Some(2), .. }));
        assert!(matches!(read_records("person_id,time,state\n".as_bytes()), Err(Error::NoRecords)));
        assert!(matches!(read_records("".as_bytes()), Err(Error::NoRecords) | Err(Error::MalformedRecord { .. })));
    }

    #[test]
    fn records_with_initial_seniority() {
        let text = "person_id,time,state,seniority0\na,0,1,2\nb,0,2,\n";
        let r = read_records(text.as_bytes()).unwrap();
        assert_eq!(r[0].seniority0, Some(2));
        assert_eq!(r[1].seniority0, None);
        let mut out = Vec::new();
        write_records(&mut out, &r).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), text);
    }

    #[test]
    fn vectors_and_weights() {
        assert_eq!(parse_vector("[0.5, 0.5]").unwrap(), vec![0.5, 0.5]);
        assert_eq!(parse_vector("{\"structure\": [1.0]}").unwrap(), vec![1.0]);
        let w = parse_weights("[[0.5, 1.0], [0.5, 0.0]]").unwrap();
        assert_eq!(w.get(1, 0), 0.5);
        assert!(parse_weights("[[0.5], [0.4]]").is_err());
    }
}
