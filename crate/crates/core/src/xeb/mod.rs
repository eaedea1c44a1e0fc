//! Verification statistics: linear cross-entropy benchmarking, Porter-Thomas goodness of fit,
//! error-model fidelity prediction and Shannon/cross entropy.

mod entropy;
mod injection;
mod porter_thomas;

use thiserror::Error;

use crate::sim::SimError;

pub use entropy::{cross_entropy, shannon_entropy};
pub use injection::{
    error_injection_xeb, fidelity_prediction, fixed_error_xeb, trajectory_sample_seed, InjectionConfig,
    InjectionReport,
};
pub use porter_thomas::{
    ks_critical, ks_statistic, porter_thomas_cdf, porter_thomas_fit, porter_thomas_pdf, PtFitReport, KS_C_ALPHA_001,
};

/// Tolerance on `Σ p = 1` for full distributions.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum XebError {
    #[error("no probabilities to score")]
    Empty,
    #[error("probability #{index} = {value} is outside [0, 1]")]
    ProbabilityOutOfRange { index: usize, value: f64 },
    #[error("distribution has {got} entries, expected {expected}")]
    WrongLength { expected: usize, got: usize },
    #[error("distribution sums to {sum}, not 1")]
    NotNormalized { sum: f64 },
    #[error("cross entropy is infinite: q[{index}] = 0 where p[{index}] > 0")]
    InfiniteCrossEntropy { index: usize },
    #[error("experiment plan misaligned: {0}")]
    Misaligned(String),
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// Linear XEB estimate over `k` scored samples.
#[derive(Clone, Debug, PartialEq)]
pub struct XebReport {
    pub n: usize,
    pub k: usize,
    pub f_xeb: f64,
    /// Sample standard deviation of the per-sample values `N·p(x_i) − 1`.
    pub std_dev: f64,
    /// `std_dev / √k`.
    pub std_error: f64,
    pub per_sample_values: Option<Vec<f64>>,
}

impl XebReport {
    pub fn without_values(mut self) -> Self {
        self.per_sample_values = None;
        self
    }
}

fn dimension(n: usize) -> f64 {
    (n as f64).exp2()
}

/// `F_XEB = N·(1/k)·Σ p(x_i) − 1` for the ideal probabilities of `k` sampled bitstrings.
pub fn linear_xeb(probs: &[f64], n: usize) -> Result<XebReport, XebError> {
    if probs.is_empty() {
        return Err(XebError::Empty);
    }
    if let Some((index, &value)) = probs.iter().enumerate().find(|(_, p)| !(0.0..=1.0).contains(*p)) {
        return Err(XebError::ProbabilityOutOfRange { index, value });
    }
    let big_n = dimension(n);
    let values: Vec<f64> = probs.iter().map(|p| big_n * p - 1.0).collect();
    Ok(report_from_values(n, values))
}

fn report_from_values(n: usize, values: Vec<f64>) -> XebReport {
    let k = values.len();
    let mean = values.iter().sum::<f64>() / k as f64;
    let std_dev = if k > 1 {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1) as f64).sqrt()
    } else {
        0.0
    };
    XebReport { n, k, f_xeb: mean, std_dev, std_error: std_dev / (k as f64).sqrt(), per_sample_values: Some(values) }
}

/// `S` circuits, each sampled `k` times with its own seed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExperimentPlan {
    pub n: usize,
    pub circuits: Vec<String>,
    pub k_per_circuit: usize,
    pub seeds: Vec<u64>,
}

impl ExperimentPlan {
    pub fn new(n: usize, circuits: Vec<String>, k_per_circuit: usize, seeds: Vec<u64>) -> Result<Self, XebError> {
        if circuits.is_empty() {
            return Err(XebError::Misaligned("plan needs at least one circuit".into()));
        }
        if seeds.len() != circuits.len() {
            return Err(XebError::Misaligned(format!("{} circuits but {} seeds", circuits.len(), seeds.len())));
        }
        if k_per_circuit == 0 {
            return Err(XebError::Empty);
        }
        Ok(Self { n, circuits, k_per_circuit, seeds })
    }

    pub fn len(&self) -> usize {
        self.circuits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.circuits.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlanReport {
    pub pooled: XebReport,
    pub per_circuit: Vec<XebReport>,
}

/// Pooled XEB over all `S·k` scored samples, plus one report per circuit.
pub fn xeb_over_plan(plan: &ExperimentPlan, per_circuit_probs: &[Vec<f64>]) -> Result<PlanReport, XebError> {
    if per_circuit_probs.len() != plan.len() {
        return Err(XebError::Misaligned(format!(
            "{} probability lists for {} circuits",
            per_circuit_probs.len(),
            plan.len()
        )));
    }
    if let Some((i, p)) = per_circuit_probs.iter().enumerate().find(|(_, p)| p.len() != plan.k_per_circuit) {
        return Err(XebError::Misaligned(format!(
            "circuit {} ({}) has {} samples, plan expects {}",
            i,
            plan.circuits[i],
            p.len(),
            plan.k_per_circuit
        )));
    }
    let per_circuit: Vec<XebReport> =
        per_circuit_probs.iter().map(|p| linear_xeb(p, plan.n)).collect::<Result<_, _>>()?;
    let pooled_values: Vec<f64> =
        per_circuit.iter().flat_map(|r| r.per_sample_values.iter().flatten().copied()).collect();
    Ok(PlanReport { pooled: report_from_values(plan.n, pooled_values), per_circuit })
}

pub(crate) fn check_distribution(probs: &[f64]) -> Result<(), XebError> {
    if probs.is_empty() {
        return Err(XebError::Empty);
    }
    if let Some((index, &value)) = probs.iter().enumerate().find(|(_, p)| !(0.0..=1.0).contains(*p)) {
        return Err(XebError::ProbabilityOutOfRange { index, value });
    }
    let sum: f64 = probs.iter().sum();
    if (sum - 1.0).abs() > NORMALIZATION_TOLERANCE {
        return Err(XebError::NotNormalized { sum });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_scores_zero() {
        let n = 5;
        let r = linear_xeb(&vec![1.0 / 32.0; 1000], n).unwrap();
        assert_eq!(r.f_xeb, 0.0);
        assert_eq!(r.std_dev, 0.0);
    }

    #[test]
    fn basis_state_scores_n_minus_one() {
        let r = linear_xeb(&[1.0], 3).unwrap();
        assert_eq!(r.f_xeb, 7.0);
        assert_eq!(r.k, 1);
        assert_eq!(r.std_error, 0.0);
    }

    #[test]
    fn errors() {
        assert_eq!(linear_xeb(&[], 2), Err(XebError::Empty));
        assert!(matches!(linear_xeb(&[0.2, 1.5], 2), Err(XebError::ProbabilityOutOfRange { index: 1, .. })));
        assert!(matches!(linear_xeb(&[f64::NAN], 2), Err(XebError::ProbabilityOutOfRange { index: 0, .. })));
    }

    #[test]
    fn report_fields_consistent() {
        let probs = [0.01, 0.2, 0.05, 0.0, 0.13];
        let r = linear_xeb(&probs, 4).unwrap();
        let vals = r.per_sample_values.as_ref().unwrap();
        let mean = vals.iter().sum::<f64>() / 5.0;
        assert_eq!(r.f_xeb, mean);
        assert!((r.f_xeb - (16.0 * probs.iter().sum::<f64>() / 5.0 - 1.0)).abs() < 1e-14);
        let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / 4.0;
        assert!((r.std_dev - var.sqrt()).abs() < 1e-14);
        assert!((r.std_error - r.std_dev / 5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn scaling_probabilities_scales_f_plus_one() {
        let probs = [0.01, 0.2, 0.05, 0.0, 0.13];
        let c = 0.5;
        let a = linear_xeb(&probs, 4).unwrap();
        let b = linear_xeb(&probs.map(|p| p * c), 4).unwrap();
        assert_eq!(b.f_xeb + 1.0, c * (a.f_xeb + 1.0));
    }

    #[test]
    fn plan_pooling() {
        let probs = vec![0.001, 0.004, 0.0002, 0.003];
        let plan = ExperimentPlan::new(8, vec!["a".into()], 4, vec![0]).unwrap();
        let single = xeb_over_plan(&plan, std::slice::from_ref(&probs)).unwrap();
        assert_eq!(single.pooled, linear_xeb(&probs, 8).unwrap());

        let plan2 = ExperimentPlan::new(8, vec!["a".into(), "b".into()], 4, vec![0, 1]).unwrap();
        let twice = xeb_over_plan(&plan2, &[probs.clone(), probs.clone()]).unwrap();
        assert!((twice.pooled.f_xeb - twice.per_circuit[0].f_xeb).abs() < 1e-15);
        assert_eq!(twice.pooled.k, 8);

        assert!(matches!(xeb_over_plan(&plan2, std::slice::from_ref(&probs)), Err(XebError::Misaligned(_))));
        assert!(matches!(xeb_over_plan(&plan2, &[probs.clone(), vec![0.1]]), Err(XebError::Misaligned(_))));
        assert!(ExperimentPlan::new(8, vec![], 4, vec![]).is_err());
        assert!(ExperimentPlan::new(8, vec!["a".into()], 4, vec![]).is_err());
    }

    #[test]
    fn distribution_checks() {
        assert!(check_distribution(&[0.5, 0.5]).is_ok());
        assert!(matches!(check_distribution(&[0.5, 0.4]), Err(XebError::NotNormalized { .. })));
        assert!(check_distribution(&[]).is_err());
    }
}
