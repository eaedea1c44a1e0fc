//! Run and sweep configuration.
//!
//! A config file is TOML with up to four tables. `[layout]` and `[rcs]` describe a generated
//! circuit, `[run]` holds sampling and noise settings, and `[sweep]` expands into many runs for the
//! `bench` command. Unknown keys are rejected so typos surface as errors.

use std::path::{Path, PathBuf};

use rcslab::circuit::{grid_layout, near_square_grid, DeviceLayout, GridScheme, PatternLetter};
use rcslab::rcs::{RcsConfig, DEFAULT_FSIM_PHI, DEFAULT_FSIM_THETA};
use rcslab::sim::DEFAULT_MAX_QUBITS;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::HarnessError;

/// Environment variable overriding the engine's qubit capacity cap.
pub const MAX_QUBITS_ENV: &str = "RCSLAB_MAX_QUBITS";

/// Full amplitude dumps are written only up to this many qubits.
pub const AMPLITUDE_DUMP_MAX_QUBITS: usize = 20;

pub const DEFAULT_K: usize = 100_000;

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub layout: Option<LayoutSection>,
    pub rcs: Option<RcsSection>,
    #[serde(default)]
    pub run: RunSection,
    pub sweep: Option<SweepSection>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayoutSection {
    pub rows: Option<usize>,
    pub cols: Option<usize>,
    pub scheme: Option<String>,
    /// Layout text file, resolved relative to the config file.
    pub file: Option<PathBuf>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RcsSection {
    pub m: usize,
    pub schedule: Option<String>,
    #[serde(default)]
    pub seed: u64,
    pub fsim_theta: Option<f64>,
    pub fsim_phi: Option<f64>,
    #[serde(default)]
    pub no_repeat: bool,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub k: Option<usize>,
    pub seed: Option<u64>,
    pub epsilon: Option<f64>,
    pub noise_seed: Option<u64>,
    pub trajectories: Option<usize>,
    pub record_amplitudes: Option<bool>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    /// Qubit counts; each is laid out on the most nearly square grid.
    #[serde(default)]
    pub n: Vec<usize>,
    #[serde(default)]
    pub m: Vec<usize>,
    #[serde(default = "default_circuit_seeds")]
    pub circuit_seeds: Vec<u64>,
    #[serde(default)]
    pub epsilon: Vec<f64>,
    /// QASM files swept in addition to the generated circuits.
    #[serde(default)]
    pub qasm: Vec<PathBuf>,
    pub scheme: Option<String>,
    pub schedule: Option<String>,
    #[serde(default = "one")]
    pub repeats: usize,
}

fn default_circuit_seeds() -> Vec<u64> {
    vec![0]
}

fn one() -> usize {
    1
}

/// How the device layout of a generated circuit is obtained.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LayoutSpec {
    Grid { rows: usize, cols: usize, scheme: String },
    File { path: PathBuf },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RcsSpec {
    pub layout: LayoutSpec,
    pub m: usize,
    pub schedule: String,
    pub seed: u64,
    pub fsim_theta: f64,
    pub fsim_phi: f64,
    pub no_repeat: bool,
}

impl RcsSpec {
    /// Grid-based spec using the scheme's own letters as the schedule.
    pub fn grid(rows: usize, cols: usize, scheme: &str, m: usize, seed: u64) -> Self {
        Self {
            layout: LayoutSpec::Grid { rows, cols, scheme: scheme.to_ascii_uppercase() },
            m,
            schedule: scheme.to_ascii_uppercase(),
            seed,
            fsim_theta: DEFAULT_FSIM_THETA,
            fsim_phi: DEFAULT_FSIM_PHI,
            no_repeat: false,
        }
    }

    pub fn load_layout(&self) -> Result<DeviceLayout, HarnessError> {
        match &self.layout {
            LayoutSpec::Grid { rows, cols, scheme } => {
                let scheme: GridScheme = scheme.parse().map_err(|e| HarnessError::Config(format!("{e}")))?;
                grid_layout(*rows, *cols, scheme).map_err(|e| HarnessError::Config(e.to_string()))
            }
            LayoutSpec::File { path } => {
                let text = read_text(path)?;
                text.parse().map_err(|e| HarnessError::Format { path: path.display().to_string(), message: format!("{e}") })
            }
        }
    }

    pub fn to_config(&self) -> Result<RcsConfig, HarnessError> {
        let layout = self.load_layout()?;
        let schedule = PatternLetter::parse_schedule(&self.schedule).map_err(|e| HarnessError::Config(e.to_string()))?;
        Ok(RcsConfig::new(layout, self.m, schedule, self.seed)
            .map_err(|e| HarnessError::Config(e.to_string()))?
            .with_fsim(self.fsim_theta, self.fsim_phi)
            .with_no_repeat_rule(self.no_repeat))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Qasm(PathBuf),
    Rcs(RcsSpec),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ErrorModelSpec {
    pub epsilon: f64,
    pub seed: u64,
    /// Noisy executions; each contributes `k` samples.
    pub trajectories: usize,
}

/// One fully resolved experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct RunSpec {
    pub source: Source,
    pub k: usize,
    pub seed: u64,
    pub error_model: Option<ErrorModelSpec>,
    pub out_dir: Option<PathBuf>,
    /// Write every amplitude when `n` is at most [`AMPLITUDE_DUMP_MAX_QUBITS`].
    pub record_amplitudes: bool,
}

impl RunSpec {
    pub fn new(source: Source, k: usize, seed: u64) -> Self {
        Self { source, k, seed, error_model: None, out_dir: None, record_amplitudes: true }
    }

    pub fn with_error_model(mut self, model: Option<ErrorModelSpec>) -> Self {
        self.error_model = model;
        self
    }

    pub fn with_out_dir(mut self, dir: Option<PathBuf>) -> Self {
        self.out_dir = dir;
        self
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.k == 0 {
            return Err(HarnessError::Config("k must be at least 1".into()));
        }
        if let Some(em) = &self.error_model {
            if !(0.0..=1.0).contains(&em.epsilon) {
                return Err(HarnessError::Config(format!("epsilon {} is outside [0, 1]", em.epsilon)));
            }
            if em.trajectories == 0 {
                return Err(HarnessError::Config("trajectories must be at least 1".into()));
            }
        }
        if let Source::Rcs(r) = &self.source {
            if !r.fsim_theta.is_finite() || !r.fsim_phi.is_finite() {
                return Err(HarnessError::Config("FSim angles must be finite".into()));
            }
        }
        Ok(())
    }

    /// Hex SHA-256 over a canonical JSON rendering of the resolved spec. Input files enter by
    /// content digest, so moving a file keeps the hash and editing it changes the hash. The output
    /// directory does not take part.
    pub fn config_hash(&self) -> Result<String, HarnessError> {
        let source = match &self.source {
            Source::Qasm(path) => serde_json::json!({ "qasm_sha256": sha256_hex(read_text(path)?.as_bytes()) }),
            Source::Rcs(r) => {
                let layout = r.load_layout()?;
                serde_json::json!({
                    "layout_sha256": sha256_hex(layout.to_text().as_bytes()),
                    "m": r.m,
                    "schedule": r.schedule,
                    "seed": r.seed,
                    "fsim_theta": r.fsim_theta,
                    "fsim_phi": r.fsim_phi,
                    "no_repeat": r.no_repeat,
                })
            }
        };
        // serde_json's default map is ordered by key, which makes this rendering canonical.
        let doc = serde_json::json!({
            "source": source,
            "k": self.k,
            "seed": self.seed,
            "error_model": self.error_model,
            "record_amplitudes": self.record_amplitudes,
        });
        Ok(sha256_hex(doc.to_string().as_bytes()))
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub(crate) fn read_text(path: &Path) -> Result<String, HarnessError> {
    std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))
}

/// Noise seed used when none is configured: the sample seed mixed with the circuit seed, so
/// circuits in a sweep get independent error realizations.
pub fn default_noise_seed(sample_seed: u64, source: &Source) -> u64 {
    match source {
        Source::Rcs(r) => sample_seed ^ r.seed.wrapping_add(1).wrapping_mul(0xD1B5_4A32_D192_ED03),
        Source::Qasm(_) => sample_seed,
    }
}

/// Capacity cap: the environment override if set, the engine default otherwise.
pub fn max_qubits() -> Result<usize, HarnessError> {
    match std::env::var(MAX_QUBITS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&q| (1..=62).contains(&q))
            .ok_or_else(|| HarnessError::Config(format!("{MAX_QUBITS_ENV}={v:?} is not an integer in 1..=62"))),
        Err(_) => Ok(DEFAULT_MAX_QUBITS),
    }
}

/// Command-line values that take precedence over the `[run]` table.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub k: Option<usize>,
    pub seed: Option<u64>,
    pub epsilon: Option<f64>,
    pub noise_seed: Option<u64>,
    pub trajectories: Option<usize>,
    pub record_amplitudes: Option<bool>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, HarnessError> {
        toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))
    }

    /// Reads a config file; relative layout and QASM paths are resolved against its directory.
    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let mut cfg = Self::parse(&read_text(path)?)
            .map_err(|e| HarnessError::Config(format!("{}: {}", path.display(), e.to_string().trim_start_matches("config: "))))?;
        let base = path.parent().unwrap_or(Path::new("."));
        if let Some(file) = cfg.layout.as_mut().and_then(|l| l.file.as_mut()) {
            *file = base.join(&*file);
        }
        if let Some(sweep) = cfg.sweep.as_mut() {
            for q in &mut sweep.qasm {
                *q = base.join(&*q);
            }
        }
        Ok(cfg)
    }

    /// The generated-circuit source described by `[layout]` and `[rcs]`.
    pub fn rcs_spec(&self) -> Result<RcsSpec, HarnessError> {
        let rcs = self.rcs.as_ref().ok_or_else(|| HarnessError::Config("missing [rcs] table".into()))?;
        let layout = self.layout.as_ref().ok_or_else(|| HarnessError::Config("missing [layout] table".into()))?;
        let scheme = layout.scheme.clone().unwrap_or_else(|| "EFGH".into()).to_ascii_uppercase();
        let layout_spec = match (&layout.file, layout.rows, layout.cols) {
            (Some(path), None, None) => LayoutSpec::File { path: path.clone() },
            (None, Some(rows), Some(cols)) => LayoutSpec::Grid { rows, cols, scheme: scheme.clone() },
            _ => return Err(HarnessError::Config("[layout] needs either `file` or both `rows` and `cols`".into())),
        };
        let schedule = match (&rcs.schedule, &layout_spec) {
            (Some(s), _) => s.to_ascii_uppercase(),
            (None, LayoutSpec::Grid { .. }) => scheme,
            (None, LayoutSpec::File { .. }) => {
                return Err(HarnessError::Config("[rcs] schedule is required with a layout file".into()))
            }
        };
        Ok(RcsSpec {
            layout: layout_spec,
            m: rcs.m,
            schedule,
            seed: rcs.seed,
            fsim_theta: rcs.fsim_theta.unwrap_or(DEFAULT_FSIM_THETA),
            fsim_phi: rcs.fsim_phi.unwrap_or(DEFAULT_FSIM_PHI),
            no_repeat: rcs.no_repeat,
        })
    }

    /// Resolves `source` with the `[run]` table and command-line overrides into a validated spec.
    pub fn run_spec(&self, source: Source, ov: &Overrides) -> Result<RunSpec, HarnessError> {
        self.resolve(source, ov, ov.epsilon.or(self.run.epsilon))
    }

    fn resolve(&self, source: Source, ov: &Overrides, epsilon: Option<f64>) -> Result<RunSpec, HarnessError> {
        let run = &self.run;
        let seed = ov.seed.or(run.seed).unwrap_or(0);
        let error_model = epsilon.map(|epsilon| ErrorModelSpec {
            epsilon,
            seed: ov.noise_seed.or(run.noise_seed).unwrap_or_else(|| default_noise_seed(seed, &source)),
            trajectories: ov.trajectories.or(run.trajectories).unwrap_or(1),
        });
        let spec = RunSpec {
            source,
            k: ov.k.or(run.k).unwrap_or(DEFAULT_K),
            seed,
            error_model,
            out_dir: None,
            record_amplitudes: ov.record_amplitudes.or(run.record_amplitudes).unwrap_or(true),
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Expands `[sweep]` into run specs, ordered by QASM file, then n, m, circuit seed, epsilon
    /// and repeat. Without a `[sweep]` table the single `[rcs]` run is returned.
    pub fn sweep_specs(&self, ov: &Overrides) -> Result<Vec<RunSpec>, HarnessError> {
        let Some(sweep) = &self.sweep else {
            return Ok(vec![self.run_spec(Source::Rcs(self.rcs_spec()?), ov)?]);
        };
        if sweep.repeats == 0 {
            return Err(HarnessError::Config("[sweep] repeats must be at least 1".into()));
        }
        let epsilons: Vec<Option<f64>> = match (ov.epsilon, sweep.epsilon.is_empty()) {
            (Some(e), _) => vec![Some(e)],
            (None, true) => vec![self.run.epsilon],
            (None, false) => sweep.epsilon.iter().map(|&e| Some(e)).collect(),
        };
        let mut specs = Vec::new();
        for path in &sweep.qasm {
            for &eps in &epsilons {
                for _ in 0..sweep.repeats {
                    specs.push(self.resolve(Source::Qasm(path.clone()), ov, eps)?);
                }
            }
        }
        if sweep.n.is_empty() != sweep.m.is_empty() {
            return Err(HarnessError::Config("[sweep] needs both `n` and `m` lists, or neither".into()));
        }
        let scheme = sweep
            .scheme
            .clone()
            .or_else(|| self.layout.as_ref().and_then(|l| l.scheme.clone()))
            .unwrap_or_else(|| "EFGH".into());
        let base = self.rcs.as_ref();
        for &n in &sweep.n {
            let (rows, cols) = near_square_grid(n);
            for &m in &sweep.m {
                for &cseed in &sweep.circuit_seeds {
                    let mut r = RcsSpec::grid(rows, cols, &scheme, m, cseed);
                    if let Some(s) = sweep.schedule.clone().or_else(|| base.and_then(|b| b.schedule.clone())) {
                        r.schedule = s.to_ascii_uppercase();
                    }
                    if let Some(b) = base {
                        r.fsim_theta = b.fsim_theta.unwrap_or(DEFAULT_FSIM_THETA);
                        r.fsim_phi = b.fsim_phi.unwrap_or(DEFAULT_FSIM_PHI);
                        r.no_repeat = b.no_repeat;
                    }
                    for &eps in &epsilons {
                        for _ in 0..sweep.repeats {
                            specs.push(self.resolve(Source::Rcs(r.clone()), ov, eps)?);
                        }
                    }
                }
            }
        }
        Ok(specs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FULL: &str = r#"
[layout]
rows = 3
cols = 4
scheme = "abcd"

[rcs]
m = 10
seed = 4

[run]
k = 500
seed = 9
epsilon = 0.01
trajectories = 3
"#;

    #[test]
    fn resolves_defaults_and_overrides() {
        let cfg = ConfigFile::parse(FULL).unwrap();
        let r = cfg.rcs_spec().unwrap();
        assert_eq!(r.schedule, "ABCD");
        assert_eq!(r.layout, LayoutSpec::Grid { rows: 3, cols: 4, scheme: "ABCD".into() });
        let spec = cfg.run_spec(Source::Rcs(r.clone()), &Overrides::default()).unwrap();
        assert_eq!(spec.k, 500);
        let noise_seed = 9 ^ 5u64.wrapping_mul(0xD1B5_4A32_D192_ED03);
        assert_eq!(spec.error_model, Some(ErrorModelSpec { epsilon: 0.01, seed: noise_seed, trajectories: 3 }));
        let ov = Overrides { k: Some(7), seed: Some(1), ..Default::default() };
        let spec = cfg.run_spec(Source::Rcs(r), &ov).unwrap();
        assert_eq!((spec.k, spec.seed), (7, 1));
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(ConfigFile::parse("[run]\nkk = 3\n").is_err());
        let cfg = ConfigFile::parse("[layout]\nrows = 2\n[rcs]\nm = 1\n").unwrap();
        assert!(cfg.rcs_spec().is_err());
        let cfg = ConfigFile::parse(FULL).unwrap();
        let r = Source::Rcs(cfg.rcs_spec().unwrap());
        assert!(cfg.run_spec(r.clone(), &Overrides { k: Some(0), ..Default::default() }).is_err());
        assert!(cfg.run_spec(r, &Overrides { epsilon: Some(1.5), ..Default::default() }).is_err());
    }

    #[test]
    fn sweep_expansion_order() {
        let cfg = ConfigFile::parse("[sweep]\nn = [6, 8]\nm = [2, 3]\ncircuit_seeds = [1, 2]\nk = 1\n");
        assert!(cfg.is_err(), "k belongs in [run]");
        let cfg = ConfigFile::parse("[run]\nk = 5\n[sweep]\nn = [6, 8]\nm = [2, 3]\ncircuit_seeds = [1, 2]\n").unwrap();
        let specs = cfg.sweep_specs(&Overrides::default()).unwrap();
        assert_eq!(specs.len(), 8);
        let Source::Rcs(first) = &specs[0].source else { panic!() };
        assert_eq!(first.layout, LayoutSpec::Grid { rows: 2, cols: 3, scheme: "EFGH".into() });
        assert_eq!((first.m, first.seed), (2, 1));
        let Source::Rcs(last) = &specs[7].source else { panic!() };
        assert_eq!((last.m, last.seed), (3, 2));
        assert!(specs.iter().all(|s| s.k == 5));
    }

    #[test]
    fn sweep_circuits_get_distinct_noise_seeds() {
        let cfg = ConfigFile::parse("[run]\nepsilon = 0.01\n[sweep]\nn = [6]\nm = [2]\ncircuit_seeds = [0, 1, 2]\n").unwrap();
        let seeds: std::collections::HashSet<u64> =
            cfg.sweep_specs(&Overrides::default()).unwrap().iter().map(|s| s.error_model.unwrap().seed).collect();
        assert_eq!(seeds.len(), 3);
        let pinned = Overrides { noise_seed: Some(4), ..Default::default() };
        assert!(cfg.sweep_specs(&pinned).unwrap().iter().all(|s| s.error_model.unwrap().seed == 4));
    }

    #[test]
    fn hash_ignores_output_dir_and_tracks_fields() {
        let cfg = ConfigFile::parse(FULL).unwrap();
        let src = Source::Rcs(cfg.rcs_spec().unwrap());
        let a = cfg.run_spec(src.clone(), &Overrides::default()).unwrap();
        let b = a.clone().with_out_dir(Some("/tmp/elsewhere".into()));
        assert_eq!(a.config_hash().unwrap(), b.config_hash().unwrap());
        let c = cfg.run_spec(src, &Overrides { seed: Some(10), ..Default::default() }).unwrap();
        assert_ne!(a.config_hash().unwrap(), c.config_hash().unwrap());
        assert_eq!(a.config_hash().unwrap().len(), 64);
    }

    #[test]
    fn sha256_known_vector() {
        assert_eq!(sha256_hex(b"abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }
}
