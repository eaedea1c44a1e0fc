//! Error-injection experiments: XEB of noisy trajectories scored against the ideal state,
//! compared with the `(1 − ε)^{#gates}` no-error probability.

use rayon::prelude::*;

use super::{linear_xeb, XebError, XebReport};
use crate::circuit::Circuit;
use crate::sim::{sample, Engine, ErrorModel, FixedError};

/// `(1 − ε)^{num_gates}`.
pub fn fidelity_prediction(epsilon: f64, num_gates: usize) -> f64 {
    (1.0 - epsilon).powf(num_gates as f64)
}

/// Sampling seed for trajectory `t` of an experiment seeded with `seed`.
pub fn trajectory_sample_seed(seed: u64, t: u64) -> u64 {
    seed ^ (t.wrapping_add(1)).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InjectionConfig {
    pub epsilon: f64,
    pub trajectories: usize,
    pub k_per_trajectory: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InjectionReport {
    /// Pooled over all trajectories, in trajectory order.
    pub measured: XebReport,
    pub predicted: f64,
    pub num_gates: usize,
    pub errors_per_trajectory: Vec<usize>,
}

/// Runs `trajectories` noisy executions, samples each `k_per_trajectory` times and scores every
/// sample against the ideal (error-free) output distribution.
pub fn error_injection_xeb(
    engine: &Engine,
    circuit: &Circuit,
    config: InjectionConfig,
) -> Result<InjectionReport, XebError> {
    if config.trajectories == 0 || config.k_per_trajectory == 0 {
        return Err(XebError::Empty);
    }
    let model = ErrorModel::new(config.epsilon, config.seed)?;
    let ideal = engine.run(circuit, None)?.state;

    let per_trajectory: Vec<(Vec<f64>, usize)> = (0..config.trajectories as u64)
        .into_par_iter()
        .map(|t| {
            let run = engine.run(circuit, Some(&model.for_trajectory(t)))?;
            let samples = sample(&run.state, config.k_per_trajectory, trajectory_sample_seed(config.seed, t))?;
            Ok((ideal.probabilities_of(&samples)?, run.log.errors_injected))
        })
        .collect::<Result<_, XebError>>()?;

    let errors_per_trajectory = per_trajectory.iter().map(|(_, e)| *e).collect();
    let pooled: Vec<f64> = per_trajectory.into_iter().flat_map(|(p, _)| p).collect();
    Ok(InjectionReport {
        measured: linear_xeb(&pooled, circuit.n())?,
        predicted: fidelity_prediction(config.epsilon, circuit.gate_count()),
        num_gates: circuit.gate_count(),
        errors_per_trajectory,
    })
}

/// XEB of a circuit with exactly one Pauli placed at `error`, scored against the ideal state.
pub fn fixed_error_xeb(
    engine: &Engine,
    circuit: &Circuit,
    error: FixedError,
    k: usize,
    seed: u64,
) -> Result<XebReport, XebError> {
    let ideal = engine.run(circuit, None)?.state;
    let faulty = engine.run_with_fixed_error(circuit, error)?.state;
    let samples = sample(&faulty, k, seed)?;
    linear_xeb(&ideal.probabilities_of(&samples)?, circuit.n())
}
