//! Porter-Thomas density and a one-sample Kolmogorov–Smirnov fit of `{N·p}` against the unit
//! exponential.

use super::{check_distribution, dimension, XebError};

/// Asymptotic KS coefficient `c(α)` at `α = 0.01`.
pub const KS_C_ALPHA_001: f64 = 1.628;

/// `𝒫(p) = N·e^{−N·p}`.
pub fn porter_thomas_pdf(p: f64, n: usize) -> f64 {
    let big_n = dimension(n);
    big_n * (-big_n * p).exp()
}

/// CDF of the rescaled variable `u = N·p`: `1 − e^{−u}`.
pub fn porter_thomas_cdf(u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else {
        -(-u).exp_m1()
    }
}

/// Two-sided one-sample KS statistic `sup |F_emp − F|` of `values` against `cdf`.
pub fn ks_statistic(values: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let m = sorted.len() as f64;
    sorted.iter().enumerate().fold(0.0f64, |d, (i, &x)| {
        let f = cdf(x);
        let above = (i + 1) as f64 / m - f;
        let below = f - i as f64 / m;
        d.max(above).max(below)
    })
}

/// `c(0.01)/√M`.
pub fn ks_critical(m: usize) -> f64 {
    KS_C_ALPHA_001 / (m as f64).sqrt()
}

#[derive(Clone, Debug, PartialEq)]
pub struct PtFitReport {
    pub n: usize,
    pub num_probabilities: usize,
    pub ks_statistic: f64,
    pub ks_critical: f64,
    pub passed: bool,
}

/// KS fit of the full output distribution (all `2^n` probabilities) to Porter-Thomas.
pub fn porter_thomas_fit(all_probs: &[f64]) -> Result<PtFitReport, XebError> {
    let m = all_probs.len();
    if m < 2 || !m.is_power_of_two() {
        let expected = m.checked_next_power_of_two().unwrap_or(0).max(2);
        return Err(XebError::WrongLength { expected, got: m });
    }
    check_distribution(all_probs)?;
    let n = m.trailing_zeros() as usize;
    let big_n = m as f64;
    let scaled: Vec<f64> = all_probs.iter().map(|p| big_n * p).collect();
    let ks_statistic = ks_statistic(&scaled, porter_thomas_cdf);
    let ks_critical = ks_critical(m);
    Ok(PtFitReport { n, num_probabilities: m, ks_statistic, ks_critical, passed: ks_statistic < ks_critical })
}
