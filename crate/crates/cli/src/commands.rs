use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;
use srmaint_core::io::{
    parse_vector, parse_weights, read_records, write_records, write_trace, ModelFile, RegionFile, Verdict,
};
use srmaint_core::plot::{ternary_svg, PlotLayer};
use srmaint_core::{
    build_seniority_matrix, compare_regions, count_transitions, estimate_markov_chain, estimate_transition_sequence,
    induce_markov, induced_region, markov_region, seniority_weights, simulate_careers, simulate_sr_path,
    sr_region_with, CareerSimulation, CountOptions, Error, EventRecord, GrowthFactor, PathTrace, ProbabilityStructure,
    Region, RegionOptions, RowFlag, SeniorityWeights, StateSpace, SubsetCheck,
};

use crate::{
    BuildArgs, CompareArgs, EstimateArgs, Failure, InduceArgs, Mode, Output, PlotArgs, RegionArgs, SimulateArgs,
    SynthArgs,
};

type CmdResult = Result<(), Failure>;

fn read_model(path: &Path) -> Result<ModelFile, Failure> {
    Ok(ModelFile::read(path)?)
}

fn read_region(path: &Path) -> Result<RegionFile, Failure> {
    RegionFile::read(path).map_err(|e| Failure::RegionFile(path.to_path_buf(), e))
}

/// A vector given as a JSON file or inline as `0.2,0.3,0.5`.
fn vector_arg(arg: &str) -> Result<Vec<f64>, Failure> {
    let path = Path::new(arg);
    if path.is_file() {
        return Ok(parse_vector(&fs::read_to_string(path).map_err(Error::from)?)?);
    }
    arg.split(',')
        .map(|x| x.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| Failure::Core(Error::Format(format!("{arg:?} is neither a vector file nor a number list"))))
}

fn print_json<T: Serialize>(value: &T) -> CmdResult {
    let s = serde_json::to_string_pretty(value).map_err(Error::from)?;
    say!("{s}");
    Ok(())
}

fn fmt_row(values: impl IntoIterator<Item = f64>) -> String {
    values.into_iter().map(|v| format!("{v:>10.6}")).collect::<Vec<_>>().join("")
}

fn print_table(title: &str, cols: &[String], rows: &[(String, Vec<f64>)]) {
    let width = rows.iter().map(|(r, _)| r.len()).max().unwrap_or(0).max(6);
    say!("{title}");
    let header: String = cols.iter().map(|c| format!("{c:>10}")).collect();
    say!("{:width$}{header}", "");
    for (name, values) in rows {
        say!("{name:width$}{}", fmt_row(values.iter().copied()));
    }
}

fn seniority_names(space: &StateSpace) -> Vec<String> {
    (0..space.seniority_states())
        .map(|i| {
            let (b, a) = space.split_index(i);
            format!("{}_{a}", space.labels()[b])
        })
        .collect()
}

fn report_flags(flags: &[RowFlag], space: &StateSpace, warn: bool, out: Output) {
    if flags.is_empty() || (!warn && out.quiet) {
        return;
    }
    let rows: Vec<String> =
        flags.iter().map(|f| format!("{}@{} ({:?})", space.labels()[f.state], f.seniority, f.reason)).collect();
    let level = if warn { "warning" } else { "note" };
    eprintln!("{level}: rows without estimates, filled with wastage: {}", rows.join(", "));
}

fn print_vertices(region: &RegionFile, labels: &[String], out: Output) -> CmdResult {
    if out.json {
        return print_json(region);
    }
    if out.quiet {
        return Ok(());
    }
    let verdict = match region.verdict {
        Verdict::Nonempty => "nonempty",
        Verdict::Empty => "empty",
    };
    say!("{} region, alpha = {}, {verdict}", region.provenance, region.alpha);
    let rows: Vec<(String, Vec<f64>)> =
        region.vertices.iter().enumerate().map(|(i, v)| (format!("v{}", i + 1), v.clone())).collect();
    print_table("vertices", labels, &rows);
    Ok(())
}

/// Labels in numeric order when they all parse as integers, else lexicographic.
fn infer_labels(records: &[EventRecord], wastage: &str) -> Vec<String> {
    let mut labels: Vec<String> = records.iter().map(|r| r.state.clone()).filter(|s| s != wastage).collect();
    labels.sort();
    labels.dedup();
    if labels.iter().all(|l| l.parse::<i64>().is_ok()) {
        labels.sort_by_key(|l| l.parse::<i64>().unwrap_or_default());
    }
    labels
}

pub fn estimate(a: EstimateArgs, out: Output) -> CmdResult {
    let records = read_records(File::open(&a.input).map_err(Error::from)?)?;
    let labels = a.labels.unwrap_or_else(|| infer_labels(&records, &a.wastage_label));
    let space = StateSpace::with_labels(labels, a.max_seniority, &a.wastage_label)?;
    let counts = count_transitions(&records, &space, CountOptions { strict: a.strict, horizon: a.horizon })?;
    let seq = estimate_transition_sequence(&counts)?;
    let (direct, _) = estimate_markov_chain(&counts)?;
    let mut model = ModelFile::from_sequence(&seq, Some(seniority_weights(&counts)));
    model.markov = Some(direct.to_rows());
    model.write(&a.out)?;
    report_flags(seq.flags(), &space, !a.allow_unidentified, out);

    if out.json {
        return print_json(&model);
    }
    if !out.quiet {
        say!("{} records, {} persons", records.len(), {
            let mut ids: Vec<&str> = records.iter().map(|r| r.person_id.as_str()).collect();
            ids.sort_unstable();
            ids.dedup();
            ids.len()
        });
        for (k, m) in seq.matrices().iter().enumerate() {
            let rows = (0..space.l())
                .map(|i| (space.labels()[i].clone(), m.row(i).iter().copied().collect()))
                .collect::<Vec<_>>();
            print_table(&format!("P({k})"), space.labels(), &rows);
        }
        say!("model written to {}", a.out.display());
    }
    Ok(())
}

pub fn build(a: BuildArgs, out: Output) -> CmdResult {
    let seq = read_model(&a.model)?.sequence()?;
    let sm = build_seniority_matrix(&seq)?;
    let names = seniority_names(sm.space());
    let doc = json!({
        "states": names,
        "matrix": sm.substochastic().to_rows(),
        "wastage": sm.wastage().as_slice(),
        "flags": sm.flags(),
    });
    if let Some(path) = &a.out {
        let mut s = serde_json::to_string_pretty(&doc).map_err(Error::from)?;
        s.push('\n');
        fs::write(path, s).map_err(Error::from)?;
    }
    if out.json {
        return print_json(&doc);
    }
    if !out.quiet {
        let rows: Vec<(String, Vec<f64>)> =
            names.iter().enumerate().map(|(i, n)| (n.clone(), sm.matrix().row(i).iter().copied().collect())).collect();
        print_table("P_SM", &names, &rows);
        say!("w_SB{}", fmt_row(sm.wastage().as_slice().iter().copied()));
    }
    Ok(())
}

/// The plain Markov region of a model: induced from explicit weights, the
/// stored matrix, or the model's own weights, in that order.
fn markov_side(
    model: &ModelFile,
    weights: Option<&Path>,
    g: GrowthFactor,
    opts: RegionOptions,
) -> Result<Region, Failure> {
    let from_weights = |w: &SeniorityWeights| -> Result<Region, Failure> {
        let ic = induce_markov(&model.sequence()?, w)?;
        Ok(induced_region(&ic, g, opts)?)
    };
    if let Some(path) = weights {
        return from_weights(&parse_weights(&fs::read_to_string(path).map_err(Error::from)?)?);
    }
    let stored_weights = model.seniority_weights()?;
    if let Some(p) = model.markov_matrix()? {
        if let Some(w) = &stored_weights {
            if !opts.allow_unidentified && !w.unidentified().is_empty() {
                return Err(Error::Unidentified { rows: w.unidentified().iter().map(|&i| (i, 0)).collect() }.into());
            }
        }
        return Ok(markov_region(&p, g)?);
    }
    match stored_weights {
        Some(w) => from_weights(&w),
        None => Err(Failure::Usage("model has no Markov matrix or weights; pass --weights".into())),
    }
}

pub fn region(a: RegionArgs, out: Output) -> CmdResult {
    let model = read_model(&a.model)?;
    let space = model.space()?;
    let g = GrowthFactor::new(a.alpha)?;
    let opts = RegionOptions { allow_unidentified: a.allow_unidentified };
    let region = match a.mode {
        Mode::Sr => sr_region_with(&build_seniority_matrix(&model.sequence()?)?, g, opts)?,
        Mode::Markov => markov_side(&model, a.weights.as_deref(), g, opts)?,
    };
    let file = RegionFile::from_region(&region)?;
    if let Some(path) = &a.out {
        file.write(path)?;
    }
    print_vertices(&file, space.labels(), out)
}

/// Random seniority mix inside each block, scaled to the organisational `target`.
fn random_start(space: &StateSpace, target: &[f64], rng: &mut ChaCha8Rng) -> Vec<f64> {
    use rand::Rng;
    let mut start = Vec::with_capacity(space.seniority_states());
    for t in target {
        let draws: Vec<f64> = (0..space.block_len()).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
        let total: f64 = draws.iter().sum();
        start.extend(draws.iter().map(|d| t * d / total));
    }
    start
}

/// Draw random starts behind `target` until one gives a maintainable path.
fn path_behind_target(
    sm: &srmaint_core::SeniorityMatrix,
    target: &[f64],
    g: GrowthFactor,
    steps: usize,
    seed: u64,
) -> Result<PathTrace, Failure> {
    const ATTEMPTS: usize = 1000;
    let space = sm.space();
    if target.len() != space.l() {
        return Err(Error::DimensionMismatch { expected: space.l(), found: target.len() }.into());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut last = None;
    for attempt in 0..ATTEMPTS {
        let start = ProbabilityStructure::seniority_based(random_start(space, target, &mut rng))?;
        match simulate_sr_path(sm, &start, g, steps) {
            Ok(trace) => {
                if attempt > 0 {
                    eprintln!("note: {attempt} random starts were not maintainable and were redrawn");
                }
                return Ok(trace);
            }
            Err(e @ Error::NonMaintainable { .. }) => last = Some(e),
            Err(e) => return Err(e.into()),
        }
    }
    Err(last.expect("at least one attempt").into())
}

pub fn simulate(a: SimulateArgs, out: Output) -> CmdResult {
    let sm = build_seniority_matrix(&read_model(&a.model)?.sequence()?)?;
    let g = GrowthFactor::new(a.alpha)?;
    let trace = match (&a.start, &a.target) {
        (Some(s), _) => simulate_sr_path(&sm, &ProbabilityStructure::seniority_based(vector_arg(s)?)?, g, a.steps)?,
        (None, Some(t)) => path_behind_target(&sm, &vector_arg(t)?, g, a.steps, out.seed)?,
        (None, None) => return Err(Failure::Usage("pass --start or --target".into())),
    };
    match &a.out {
        Some(path) => write_trace(BufWriter::new(File::create(path).map_err(Error::from)?), &trace, sm.space())?,
        None => write_trace(io::stdout().lock(), &trace, sm.space())?,
    }
    if !trace.converged {
        eprintln!("warning: no convergence within {} steps", trace.steps.len() - 1);
    }
    if a.out.is_none() {
        return Ok(());
    }
    if out.json {
        return print_json(&json!({
            "converged": trace.converged,
            "steps": trace.steps.len() - 1,
            "target": trace.target,
            "limit": trace.limit,
        }));
    }
    if !out.quiet {
        let status = if trace.converged { "converged" } else { "stopped" };
        say!("{status} after {} steps", trace.steps.len() - 1);
        let names = seniority_names(sm.space());
        print_table("limit", &names, &[("s*".into(), trace.limit.clone())]);
    }
    Ok(())
}

pub fn induce(a: InduceArgs, out: Output) -> CmdResult {
    let mut model = read_model(&a.model)?;
    let weights = match &a.weights {
        Some(path) => parse_weights(&fs::read_to_string(path).map_err(Error::from)?)?,
        None => model
            .seniority_weights()?
            .ok_or_else(|| Failure::Usage("model carries no seniority weights; pass --weights".into()))?,
    };
    let ic = induce_markov(&model.sequence()?, &weights)?;
    model.markov = Some(ic.matrix().to_rows());
    model.weights = Some(weights);
    if let Some(path) = &a.out {
        model.write(path)?;
    }
    if out.json {
        return print_json(&model);
    }
    if !out.quiet {
        let space = model.space()?;
        let rows: Vec<(String, Vec<f64>)> =
            ic.matrix().to_rows().into_iter().enumerate().map(|(i, r)| (space.labels()[i].clone(), r)).collect();
        print_table("induced P", space.labels(), &rows);
    }
    Ok(())
}

fn describe(check: &SubsetCheck) -> String {
    match &check.witness {
        None if check.holds => "yes".into(),
        None => "no".into(),
        Some(w) => format!("no, witness {}", fmt_row(w.iter().copied()).trim_start()),
    }
}

pub fn compare(a: CompareArgs, out: Output) -> CmdResult {
    let model = read_model(&a.model)?;
    let g = GrowthFactor::new(a.alpha)?;
    let opts = RegionOptions { allow_unidentified: a.allow_unidentified };
    let sr = sr_region_with(&build_seniority_matrix(&model.sequence()?)?, g, opts)?;
    let other = match &a.against {
        Some(path) => read_region(path)?.to_region().map_err(|e| Failure::RegionFile(path.clone(), e))?,
        None => markov_side(&model, a.weights.as_deref(), g, opts)?,
    };
    let c = compare_regions(&sr, &other)?;
    if out.json {
        return print_json(&c);
    }
    if !out.quiet {
        say!("relation: {}", c.relation);
        say!("sr in {}: {}", other.provenance(), describe(&c.sr_in_other));
        say!("{} in sr: {}", other.provenance(), describe(&c.other_in_sr));
    }
    Ok(())
}

pub fn plot(a: PlotArgs, out: Output) -> CmdResult {
    let paths: Vec<&Path> = std::iter::once(a.region.as_path()).chain(a.overlay.iter().map(|p| p.as_path())).collect();
    let files = paths.iter().map(|p| read_region(p)).collect::<Result<Vec<_>, _>>()?;
    let labels: Vec<String> = match a.labels {
        Some(l) if l.len() == files.len() => l,
        Some(l) => return Err(Failure::Usage(format!("{} labels for {} regions", l.len(), files.len()))),
        None => {
            paths.iter().map(|p| p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()).collect()
        }
    };
    let layers: Vec<PlotLayer> =
        files.iter().zip(labels).map(|(f, label)| PlotLayer { label, vertices: f.vertices.clone() }).collect();

    if files.iter().any(|f| f.dimension != 3) {
        eprintln!("notice: ternary plots need three states; printing vertices as JSON instead");
        let dump: Vec<_> = layers
            .iter()
            .zip(&files)
            .map(|(l, f)| json!({ "label": l.label, "dimension": f.dimension, "vertices": l.vertices }))
            .collect();
        return print_json(&dump);
    }
    let corners: [&str; 3] = match a.corners.as_slice() {
        [x, y, z] => [x, y, z],
        _ => return Err(Failure::Usage("--corners needs exactly three names".into())),
    };
    let svg = ternary_svg(&layers, corners)?;
    fs::write(&a.out, svg).map_err(Error::from)?;
    if !out.quiet && !out.json {
        say!("plot written to {}", a.out.display());
    }
    Ok(())
}

pub fn synth(a: SynthArgs, out: Output) -> CmdResult {
    let seq = read_model(&a.model)?.sequence()?;
    let sim = CareerSimulation { persons: a.persons, horizon: a.horizon, entry: vector_arg(&a.entry)? };
    let mut rng = ChaCha8Rng::seed_from_u64(out.seed);
    let records = simulate_careers(&seq, &sim, &mut rng)?;
    let mut w = BufWriter::new(File::create(&a.out).map_err(Error::from)?);
    write_records(&mut w, &records)?;
    w.flush().map_err(Error::from)?;
    if !out.quiet && !out.json {
        say!("{} records for {} persons written to {}", records.len(), a.persons, a.out.display());
    }
    Ok(())
}
