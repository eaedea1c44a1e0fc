//! Random circuit generation.
//!
//! Each algorithm cycle `j` is two layer-cycles: single-qubit gates drawn uniformly from
//! `{√X, √Y, √W}` on every qubit, then `FSim(θ, φ)` on every edge labeled
//! `schedule[j mod |schedule|]`. Gate choices come from ChaCha8 keyed by the seed, with the
//! stream set to the cycle index and the word position set by the qubit, so each
//! `(cycle, qubit)` choice is independent of every other one.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::circuit::{Circuit, CircuitMeta, Cycle, DeviceLayout, Gate, GateKind, PatternLetter};

pub const DEFAULT_FSIM_THETA: f64 = std::f64::consts::FRAC_PI_2;
pub const DEFAULT_FSIM_PHI: f64 = std::f64::consts::FRAC_PI_6;

/// ChaCha words reserved per qubit within one cycle's stream.
const WORDS_PER_QUBIT: u128 = 16;

const SINGLE_QUBIT_SET: [GateKind; 3] = [GateKind::SqrtX, GateKind::SqrtY, GateKind::SqrtW];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RcsError {
    #[error("schedule letter {0} has no edges in the layout")]
    MissingLetter(PatternLetter),
    #[error("schedule is empty")]
    EmptySchedule,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RcsConfig {
    layout: DeviceLayout,
    m: usize,
    schedule: Vec<PatternLetter>,
    seed: u64,
    fsim_theta: f64,
    fsim_phi: f64,
    no_repeat_rule: bool,
}

impl RcsConfig {
    /// Config with the default FSim angles and repeats allowed.
    pub fn new(layout: DeviceLayout, m: usize, schedule: Vec<PatternLetter>, seed: u64) -> Result<Self, RcsError> {
        if schedule.is_empty() {
            return Err(RcsError::EmptySchedule);
        }
        if let Some(&missing) = schedule.iter().find(|&&l| !layout.has_letter(l)) {
            return Err(RcsError::MissingLetter(missing));
        }
        Ok(Self {
            layout,
            m,
            schedule,
            seed,
            fsim_theta: DEFAULT_FSIM_THETA,
            fsim_phi: DEFAULT_FSIM_PHI,
            no_repeat_rule: false,
        })
    }

    pub fn with_fsim(mut self, theta: f64, phi: f64) -> Self {
        self.fsim_theta = theta;
        self.fsim_phi = phi;
        self
    }

    pub fn with_no_repeat_rule(mut self, on: bool) -> Self {
        self.no_repeat_rule = on;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_m(mut self, m: usize) -> Self {
        self.m = m;
        self
    }

    pub fn layout(&self) -> &DeviceLayout {
        &self.layout
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn schedule(&self) -> &[PatternLetter] {
        &self.schedule
    }

    pub fn schedule_string(&self) -> String {
        self.schedule.iter().map(|l| l.as_char()).collect()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn fsim_theta(&self) -> f64 {
        self.fsim_theta
    }

    pub fn fsim_phi(&self) -> f64 {
        self.fsim_phi
    }

    pub fn no_repeat_rule(&self) -> bool {
        self.no_repeat_rule
    }

    fn letter_for_cycle(&self, j: usize) -> PatternLetter {
        self.schedule[j % self.schedule.len()]
    }

    pub fn label(&self) -> String {
        format!("rcs_n{}_m{}_p{}_s{}", self.layout.n(), self.m, self.schedule_string(), self.seed)
    }
}

/// Builds the random circuit described by `config`; a pure function of the config.
pub fn generate(config: &RcsConfig) -> Circuit {
    let n = config.layout.n();
    let fsim = GateKind::FSim { theta: config.fsim_theta, phi: config.fsim_phi };
    let base = ChaCha8Rng::seed_from_u64(config.seed);
    let mut previous: Vec<Option<usize>> = vec![None; n];
    let mut cycles = Vec::with_capacity(2 * config.m);

    for j in 0..config.m {
        let mut rng = base.clone();
        rng.set_stream(j as u64);
        let singles = (0..n)
            .map(|q| {
                rng.set_word_pos(q as u128 * WORDS_PER_QUBIT);
                let choice = match previous[q] {
                    Some(prev) if config.no_repeat_rule => {
                        let r = rng.random_range(0..2);
                        if r >= prev {
                            r + 1
                        } else {
                            r
                        }
                    }
                    _ => rng.random_range(0..3),
                };
                previous[q] = Some(choice);
                Gate::single(SINGLE_QUBIT_SET[choice].clone(), q).expect("single-qubit gate")
            })
            .collect();
        cycles.push(Cycle::new(singles).expect("one gate per qubit"));

        let pairs = config.layout.pattern(config.letter_for_cycle(j));
        let doubles = pairs.map(|(a, b)| Gate::two(fsim.clone(), a, b).expect("layout edge")).collect();
        cycles.push(Cycle::new(doubles).expect("layout patterns are matchings"));
    }

    let meta = CircuitMeta { m: config.m, pattern: config.schedule_string(), seed: config.seed, label: config.label() };
    Circuit::new(n, cycles, meta).expect("layout qubits are in range")
}

/// Number of gates `generate(config)` produces, computed from the layout alone.
pub fn gate_count(config: &RcsConfig) -> usize {
    let n = config.layout.n();
    (0..config.m).map(|j| n + config.layout.pattern_len(config.letter_for_cycle(j))).sum()
}
