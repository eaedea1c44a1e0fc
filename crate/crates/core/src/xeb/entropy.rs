use super::{check_distribution, XebError};

/// `H(P) = −Σ p ln p` in nats; zero-probability terms contribute nothing.
pub fn shannon_entropy(probs: &[f64]) -> Result<f64, XebError> {
    check_distribution(probs)?;
    Ok(-probs.iter().filter(|&&p| p > 0.0).map(|p| p * p.ln()).sum::<f64>())
}

/// `H(P, Q) = −Σ p ln q` in nats. `q = 0` where `p > 0` is reported as
/// [`XebError::InfiniteCrossEntropy`].
pub fn cross_entropy(p_dist: &[f64], q_dist: &[f64]) -> Result<f64, XebError> {
    check_distribution(p_dist)?;
    check_distribution(q_dist)?;
    if p_dist.len() != q_dist.len() {
        return Err(XebError::WrongLength { expected: p_dist.len(), got: q_dist.len() });
    }
    let mut acc = 0.0;
    for (index, (&p, &q)) in p_dist.iter().zip(q_dist).enumerate() {
        if p == 0.0 {
            continue;
        }
        if q == 0.0 {
            return Err(XebError::InfiniteCrossEntropy { index });
        }
        acc -= p * q.ln();
    }
    Ok(acc)
}
