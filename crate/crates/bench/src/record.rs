use serde::{Deserialize, Serialize};

use crate::mem::MemorySource;

/// Wall-clock phases of one run, in seconds.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    /// Reading and lowering QASM, or generating the random circuit.
    pub parse_s: f64,
    /// Every state-vector evolution, ideal and noisy.
    pub simulate_s: f64,
    pub sampling_s: f64,
    /// First circuit execution plus one sample draw; parse time excluded.
    pub time_to_first_sample_s: f64,
    pub total_wall_s: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct XebSummary {
    pub f_xeb: f64,
    pub std_dev: f64,
    pub std_error: f64,
    /// Samples scored.
    pub k: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropySummary {
    /// Shannon entropy (nats) of the ideal output distribution.
    pub ideal: f64,
    /// `n ln 2`, the uniform distribution's entropy.
    pub max: f64,
    /// Expected entropy of a Porter-Thomas distributed state, `ln N − 1 + γ`.
    pub porter_thomas: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PtSummary {
    pub ks_statistic: f64,
    pub ks_critical: f64,
    pub passed: bool,
    pub num_probabilities: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseSummary {
    pub epsilon: f64,
    pub noise_seed: u64,
    pub trajectories: usize,
    /// `(1 − ε)^gates`.
    pub predicted_fidelity: f64,
    pub errors_per_trajectory: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TopState {
    pub bitstring: String,
    pub count: usize,
    pub frequency: f64,
    pub ideal_probability: f64,
}

/// Everything one run produced, written as `record.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub label: String,
    /// `qasm` or `rcs`.
    pub source: String,
    pub n: usize,
    /// Algorithm cycles for generated circuits, packed layer count for QASM input.
    pub m: usize,
    pub pattern: String,
    pub circuit_seed: Option<u64>,
    pub num_gates: usize,
    pub sample_seed: u64,
    pub xeb: XebSummary,
    pub entropy: Option<EntropySummary>,
    pub pt_fit: Option<PtSummary>,
    pub noise: Option<NoiseSummary>,
    /// Ten most frequent sampled bitstrings, most frequent first.
    pub top_states: Vec<TopState>,
    pub timings: Timings,
    pub peak_memory_bytes: u64,
    pub peak_memory_source: MemorySource,
    pub engine_version: String,
    pub config_hash: String,
}

impl ResultRecord {
    /// The record with timing and memory fields cleared; equal across repeated identical runs.
    pub fn scientific(&self) -> ResultRecord {
        ResultRecord {
            timings: Timings::default(),
            peak_memory_bytes: 0,
            peak_memory_source: MemorySource::Estimated,
            ..self.clone()
        }
    }
}

/// One row of the consolidated results CSV. Field order is the column order.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub label: String,
    pub source: String,
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub pattern: String,
    pub circuit_seed: Option<u64>,
    pub num_gates: Option<usize>,
    pub k: Option<usize>,
    pub sample_seed: Option<u64>,
    pub epsilon: Option<f64>,
    pub trajectories: Option<usize>,
    pub f_xeb: Option<f64>,
    pub std_dev: Option<f64>,
    pub std_error: Option<f64>,
    pub predicted_fidelity: Option<f64>,
    pub entropy_ideal: Option<f64>,
    pub entropy_max: Option<f64>,
    pub pt_ks_statistic: Option<f64>,
    pub pt_ks_critical: Option<f64>,
    pub pt_passed: Option<bool>,
    pub errors_injected: Option<usize>,
    pub parse_s: Option<f64>,
    pub simulate_s: Option<f64>,
    pub sampling_s: Option<f64>,
    pub time_to_first_sample_s: Option<f64>,
    pub total_wall_s: Option<f64>,
    pub peak_memory_bytes: Option<u64>,
    pub peak_memory_source: String,
    pub engine_version: String,
    pub config_hash: String,
    /// `ok`, or `error(<exit code>): <message>` for a failed run.
    pub status: String,
}

/// CSV header, in column order.
pub const CSV_COLUMNS: [&str; 31] = [
    "label",
    "source",
    "n",
    "m",
    "pattern",
    "circuit_seed",
    "num_gates",
    "k",
    "sample_seed",
    "epsilon",
    "trajectories",
    "f_xeb",
    "std_dev",
    "std_error",
    "predicted_fidelity",
    "entropy_ideal",
    "entropy_max",
    "pt_ks_statistic",
    "pt_ks_critical",
    "pt_passed",
    "errors_injected",
    "parse_s",
    "simulate_s",
    "sampling_s",
    "time_to_first_sample_s",
    "total_wall_s",
    "peak_memory_bytes",
    "peak_memory_source",
    "engine_version",
    "config_hash",
    "status",
];

impl From<&ResultRecord> for CsvRow {
    fn from(r: &ResultRecord) -> Self {
        let t = &r.timings;
        CsvRow {
            label: r.label.clone(),
            source: r.source.clone(),
            n: Some(r.n),
            m: Some(r.m),
            pattern: r.pattern.clone(),
            circuit_seed: r.circuit_seed,
            num_gates: Some(r.num_gates),
            k: Some(r.xeb.k),
            sample_seed: Some(r.sample_seed),
            epsilon: r.noise.as_ref().map(|x| x.epsilon),
            trajectories: r.noise.as_ref().map(|x| x.trajectories),
            f_xeb: Some(r.xeb.f_xeb),
            std_dev: Some(r.xeb.std_dev),
            std_error: Some(r.xeb.std_error),
            predicted_fidelity: r.noise.as_ref().map(|x| x.predicted_fidelity),
            entropy_ideal: r.entropy.as_ref().map(|e| e.ideal),
            entropy_max: r.entropy.as_ref().map(|e| e.max),
            pt_ks_statistic: r.pt_fit.as_ref().map(|p| p.ks_statistic),
            pt_ks_critical: r.pt_fit.as_ref().map(|p| p.ks_critical),
            pt_passed: r.pt_fit.as_ref().map(|p| p.passed),
            errors_injected: r.noise.as_ref().map(|x| x.errors_per_trajectory.iter().sum()),
            parse_s: Some(t.parse_s),
            simulate_s: Some(t.simulate_s),
            sampling_s: Some(t.sampling_s),
            time_to_first_sample_s: Some(t.time_to_first_sample_s),
            total_wall_s: Some(t.total_wall_s),
            peak_memory_bytes: Some(r.peak_memory_bytes),
            peak_memory_source: r.peak_memory_source.as_str().to_string(),
            engine_version: r.engine_version.clone(),
            config_hash: r.config_hash.clone(),
            status: "ok".into(),
        }
    }
}

impl CsvRow {
    pub fn failed(label: String, source: String, exit_code: i32, message: &str) -> Self {
        CsvRow {
            label,
            source,
            engine_version: rcslab::VERSION.to_string(),
            status: format!("error({exit_code}): {}", message.replace('\n', " | ")),
            ..Default::default()
        }
    }
}

/// Streams rows to a CSV file; the header is written on creation.
pub struct CsvSink<W: std::io::Write> {
    writer: csv::Writer<W>,
}

impl<W: std::io::Write> CsvSink<W> {
    pub fn new(inner: W) -> csv::Result<Self> {
        let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(inner);
        writer.write_record(CSV_COLUMNS)?;
        writer.flush()?;
        Ok(Self { writer })
    }

    pub fn push(&mut self, row: &CsvRow) -> csv::Result<()> {
        self.writer.serialize(row)?;
        self.writer.flush()?;
        Ok(())
    }

    pub fn into_inner(self) -> Result<W, String> {
        self.writer.into_inner().map_err(|e| e.to_string())
    }
}
