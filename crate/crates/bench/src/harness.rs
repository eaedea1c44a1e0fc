use std::collections::HashMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rcslab::circuit::Circuit;
use rcslab::qasm::{lower_to_circuit, parse_qasm, QasmError};
use rcslab::rcs::generate;
use rcslab::sim::{sample, state_bytes, Engine, ErrorModel, SampleSet, StateVector};
use rcslab::xeb::{fidelity_prediction, linear_xeb, porter_thomas_fit, shannon_entropy, trajectory_sample_seed, XebReport};

use crate::amplitudes::{format_bitstring, write_amplitudes, write_samples, AmplitudeTable};
use crate::config::{max_qubits, read_text, LayoutSpec, RunSpec, Source, AMPLITUDE_DUMP_MAX_QUBITS};
use crate::error::HarnessError;
use crate::mem::{PeakTracker, ESTIMATE_OVERHEAD_BYTES};
use crate::record::{CsvRow, CsvSink, EntropySummary, NoiseSummary, PtSummary, ResultRecord, Timings, TopState, XebSummary};

/// Full-distribution statistics (entropy, Porter-Thomas fit) are computed up to this many qubits.
pub const ANALYSIS_MAX_QUBITS: usize = 24;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

pub const RECORD_FILE: &str = "record.json";
pub const SAMPLES_FILE: &str = "samples.txt";
pub const AMPLITUDES_FILE: &str = "amplitudes.txt";

/// A circuit together with the provenance fields reported for it.
pub struct LoadedCircuit {
    pub circuit: Circuit,
    pub source: &'static str,
    pub label: String,
    pub pattern: String,
    pub circuit_seed: Option<u64>,
    pub m: usize,
}

/// Builds the circuit of `source`. QASM warnings go to stderr.
pub fn load_circuit(source: &Source) -> Result<LoadedCircuit, HarnessError> {
    match source {
        Source::Qasm(path) => {
            let text = read_text(path)?;
            let file = path.display().to_string();
            let ast = parse_qasm(&text).map_err(|d| HarnessError::from_qasm(&file, QasmError::Parse(d)))?;
            for w in &ast.warnings {
                eprintln!("{}", w.render(&file));
            }
            let circuit = lower_to_circuit(&ast).map_err(|e| HarnessError::from_qasm(&file, QasmError::Lower(e)))?;
            Ok(LoadedCircuit {
                m: circuit.cycles().len(),
                circuit,
                source: "qasm",
                label: label_for_path(path),
                pattern: String::new(),
                circuit_seed: None,
            })
        }
        Source::Rcs(spec) => {
            let cfg = spec.to_config()?;
            Ok(LoadedCircuit {
                circuit: generate(&cfg),
                source: "rcs",
                label: cfg.label(),
                pattern: cfg.schedule_string(),
                circuit_seed: Some(cfg.seed()),
                m: cfg.m(),
            })
        }
    }
}

fn label_for_path(path: &Path) -> String {
    path.file_stem().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned())
}

/// Label and source kind without building the circuit; used for rows of failed runs.
pub fn describe(spec: &RunSpec) -> (String, String) {
    match &spec.source {
        Source::Qasm(path) => (label_for_path(path), "qasm".into()),
        Source::Rcs(r) => {
            let n = match &r.layout {
                LayoutSpec::Grid { rows, cols, .. } => format!("n{}_", rows * cols),
                LayoutSpec::File { .. } => String::new(),
            };
            (format!("rcs_{n}m{}_p{}_s{}", r.m, r.schedule, r.seed), "rcs".into())
        }
    }
}

pub struct RunOutcome {
    pub record: ResultRecord,
    pub samples: SampleSet,
}

/// Simulates, samples and scores one spec, then writes its outputs when `spec.out_dir` is set.
/// Noisy runs draw `k` samples from each trajectory and score all of them against the ideal state.
pub fn run(spec: &RunSpec) -> Result<RunOutcome, HarnessError> {
    spec.validate()?;
    let config_hash = spec.config_hash()?;
    let engine = Engine::new(max_qubits()?);
    let tracker = PeakTracker::start();
    let started = Instant::now();

    let t = Instant::now();
    let loaded = load_circuit(&spec.source)?;
    let parse_s = t.elapsed();
    let circuit = &loaded.circuit;
    let n = circuit.n();

    let mut simulate = Duration::ZERO;
    let mut sampling = Duration::ZERO;
    let t = Instant::now();
    let ideal = engine.run(circuit, None)?.state;
    simulate += t.elapsed();

    let (samples, ttfs, noise) = match spec.error_model {
        None => {
            let t = Instant::now();
            sample(&ideal, 1, spec.seed)?;
            let ttfs = simulate + t.elapsed();
            let t = Instant::now();
            let samples = sample(&ideal, spec.k, spec.seed)?;
            sampling += t.elapsed();
            (samples, ttfs, None)
        }
        Some(em) => {
            let model = ErrorModel::new(em.epsilon, em.seed)?;
            let mut all = Vec::with_capacity(spec.k.saturating_mul(em.trajectories));
            let mut errors = Vec::with_capacity(em.trajectories);
            let mut ttfs = Duration::ZERO;
            for traj in 0..em.trajectories as u64 {
                let t = Instant::now();
                let noisy = engine.run(circuit, Some(&model.for_trajectory(traj)))?;
                let run_time = t.elapsed();
                simulate += run_time;
                if traj == 0 {
                    let t = Instant::now();
                    sample(&noisy.state, 1, trajectory_sample_seed(spec.seed, 0))?;
                    ttfs = run_time + t.elapsed();
                }
                let t = Instant::now();
                all.extend(sample(&noisy.state, spec.k, trajectory_sample_seed(spec.seed, traj))?.into_bitstrings());
                sampling += t.elapsed();
                errors.push(noisy.log.errors_injected);
            }
            let noise = NoiseSummary {
                epsilon: em.epsilon,
                noise_seed: em.seed,
                trajectories: em.trajectories,
                predicted_fidelity: fidelity_prediction(em.epsilon, circuit.gate_count()),
                errors_per_trajectory: errors,
            };
            (SampleSet::from_bitstrings(n, spec.seed, all)?, ttfs, Some(noise))
        }
    };

    let report = linear_xeb(&ideal.probabilities_of(&samples)?, n)?;
    let (entropy, pt_fit) = if n <= ANALYSIS_MAX_QUBITS { analyse(&ideal)? } else { (None, None) };
    let top_states = top_states(&ideal, &samples, 10)?;

    let states = if spec.error_model.is_some() { 2 } else { 1 };
    let estimate = (state_bytes(n) as u64).saturating_mul(states).saturating_add(ESTIMATE_OVERHEAD_BYTES);
    let (peak_memory_bytes, peak_memory_source) = tracker.finish(estimate);

    let record = ResultRecord {
        label: loaded.label,
        source: loaded.source.into(),
        n,
        m: loaded.m,
        pattern: loaded.pattern,
        circuit_seed: loaded.circuit_seed,
        num_gates: circuit.gate_count(),
        sample_seed: spec.seed,
        xeb: summary(&report),
        entropy,
        pt_fit,
        noise,
        top_states,
        timings: Timings {
            parse_s: parse_s.as_secs_f64(),
            simulate_s: simulate.as_secs_f64(),
            sampling_s: sampling.as_secs_f64(),
            time_to_first_sample_s: ttfs.as_secs_f64(),
            total_wall_s: started.elapsed().as_secs_f64(),
        },
        peak_memory_bytes,
        peak_memory_source,
        engine_version: rcslab::VERSION.to_string(),
        config_hash,
    };
    if let Some(dir) = &spec.out_dir {
        persist(dir, &record, &samples, (spec.record_amplitudes && n <= AMPLITUDE_DUMP_MAX_QUBITS).then_some(&ideal))?;
    }
    Ok(RunOutcome { record, samples })
}

fn summary(r: &XebReport) -> XebSummary {
    XebSummary { f_xeb: r.f_xeb, std_dev: r.std_dev, std_error: r.std_error, k: r.k }
}

fn analyse(ideal: &StateVector) -> Result<(Option<EntropySummary>, Option<PtSummary>), HarnessError> {
    let probs = ideal.probabilities();
    let n = ideal.n();
    let ln_n = n as f64 * std::f64::consts::LN_2;
    let entropy = EntropySummary { ideal: shannon_entropy(&probs)?, max: ln_n, porter_thomas: ln_n - 1.0 + EULER_GAMMA };
    let pt = porter_thomas_fit(&probs)?;
    let pt = PtSummary {
        ks_statistic: pt.ks_statistic,
        ks_critical: pt.ks_critical,
        passed: pt.passed,
        num_probabilities: pt.num_probabilities,
    };
    Ok((Some(entropy), Some(pt)))
}

fn top_states(ideal: &StateVector, samples: &SampleSet, count: usize) -> Result<Vec<TopState>, HarnessError> {
    let mut counts: HashMap<u64, usize> = HashMap::new();
    for &b in samples.bitstrings() {
        *counts.entry(b).or_default() += 1;
    }
    let mut ranked: Vec<(u64, usize)> = counts.into_iter().collect();
    ranked.sort_unstable_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    let k = samples.k() as f64;
    ranked
        .into_iter()
        .take(count)
        .map(|(b, c)| {
            Ok(TopState {
                bitstring: format_bitstring(b, ideal.n()),
                count: c,
                frequency: c as f64 / k,
                ideal_probability: ideal.probability(b)?,
            })
        })
        .collect()
}

fn write_file(path: PathBuf, contents: &[u8]) -> Result<(), HarnessError> {
    std::fs::write(&path, contents).map_err(|e| HarnessError::io(path, e))
}

fn persist(dir: &Path, record: &ResultRecord, samples: &SampleSet, state: Option<&StateVector>) -> Result<(), HarnessError> {
    std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    let json = serde_json::to_vec_pretty(record).map_err(|e| HarnessError::Internal(e.to_string()))?;
    write_file(dir.join(RECORD_FILE), &json)?;
    write_file(dir.join(SAMPLES_FILE), write_samples(samples.bitstrings(), samples.n()).as_bytes())?;
    if let Some(state) = state {
        write_file(dir.join(AMPLITUDES_FILE), write_amplitudes(state).as_bytes())?;
    }
    Ok(())
}

/// What to do with a sample whose bitstring has no table entry.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MissingPolicy {
    /// Fail, naming the bitstring.
    Strict,
    /// Score it as probability 0 and count it.
    Lenient,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExternalScore {
    pub report: XebReport,
    /// Samples scored as zero under [`MissingPolicy::Lenient`].
    pub missing: usize,
}

/// Linear XEB of externally produced samples against table probabilities over `n` qubits.
pub fn score_external(
    samples: &[u64],
    table: &AmplitudeTable,
    n: usize,
    policy: MissingPolicy,
) -> Result<ExternalScore, HarnessError> {
    if table.n() > n || (table.has_explicit_width() && table.n() != n) {
        return Err(HarnessError::Scoring(format!("amplitude table has width {} but n = {n}", table.n())));
    }
    if n == 0 || n > 63 {
        return Err(HarnessError::Scoring(format!("n = {n} is outside 1..=63")));
    }
    let mut missing = 0;
    let mut probs = Vec::with_capacity(samples.len());
    for &s in samples {
        if s >> n != 0 {
            return Err(HarnessError::Scoring(format!("sample {s:#x} does not fit in {n} qubits")));
        }
        match table.probability(s) {
            Some(p) => probs.push(p),
            None if policy == MissingPolicy::Lenient => {
                missing += 1;
                probs.push(0.0);
            }
            None => {
                return Err(HarnessError::Scoring(format!(
                    "sample bitstring {} is missing from the amplitude table",
                    format_bitstring(s, n)
                )))
            }
        }
    }
    Ok(ExternalScore { report: linear_xeb(&probs, n)?.without_values(), missing })
}

/// Runs `specs` in order, streaming one CSV row per spec to `csv`. A failing spec is recorded as
/// an error row and the sweep continues.
pub fn bench_sweep<W: Write>(specs: &[RunSpec], csv: W) -> Result<Vec<Result<ResultRecord, HarnessError>>, HarnessError> {
    let csv_err = |e: csv::Error| HarnessError::Internal(format!("csv: {e}"));
    let mut sink = CsvSink::new(csv).map_err(csv_err)?;
    let mut results = Vec::with_capacity(specs.len());
    for spec in specs {
        let result = run(spec).map(|o| o.record);
        let row = match &result {
            Ok(record) => CsvRow::from(record),
            Err(e) => {
                let (label, source) = describe(spec);
                CsvRow::failed(label, source, e.exit_code(), &e.to_string())
            }
        };
        sink.push(&row).map_err(csv_err)?;
        results.push(result);
    }
    Ok(results)
}

/// [`bench_sweep`] into a file; per-spec output directories go under `out_root` when given.
pub fn bench_sweep_to_file(
    specs: &[RunSpec],
    csv_path: &Path,
    out_root: Option<&Path>,
) -> Result<Vec<Result<ResultRecord, HarnessError>>, HarnessError> {
    if let Some(parent) = csv_path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| HarnessError::io(parent, e))?;
    }
    let file = std::fs::File::create(csv_path).map_err(|e| HarnessError::io(csv_path, e))?;
    let specs: Vec<RunSpec> = specs
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let dir = out_root.map(|root| root.join(format!("{i:04}_{}", describe(s).0)));
            s.clone().with_out_dir(dir.or_else(|| s.out_dir.clone()))
        })
        .collect();
    bench_sweep(&specs, std::io::BufWriter::new(file))
}
