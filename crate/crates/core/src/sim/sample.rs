//! Bitstring sampling from `{|amp|²}` without a stored prefix-sum array.
//!
//! `k` uniforms are drawn, sorted, and matched against the running CDF in one pass over the
//! amplitudes, for `O(2^n + k log k)` time and `O(k)` extra memory. Draws come from ChaCha8
//! seeded with `seed` (via `seed_from_u64`) on stream [`SAMPLE_STREAM`], so a `(state, k, seed)`
//! triple yields the same bitstrings on every platform.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{SimError, StateVector};

/// ChaCha stream reserved for measurement sampling.
pub const SAMPLE_STREAM: u64 = 0x5A4D_504C;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampleSet {
    n: usize,
    seed: u64,
    bitstrings: Vec<u64>,
}

impl SampleSet {
    pub fn from_bitstrings(n: usize, seed: u64, bitstrings: Vec<u64>) -> Result<Self, SimError> {
        if let Some(&bad) = bitstrings.iter().find(|&&x| n < 64 && x >> n != 0) {
            return Err(SimError::BitstringOutOfRange { bitstring: bad, n });
        }
        Ok(Self { n, seed, bitstrings })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn k(&self) -> usize {
        self.bitstrings.len()
    }

    pub fn bitstrings(&self) -> &[u64] {
        &self.bitstrings
    }

    pub fn into_bitstrings(self) -> Vec<u64> {
        self.bitstrings
    }
}

/// Draws `k` i.i.d. bitstrings from `state`; sample order is the draw order.
pub fn sample(state: &StateVector, k: usize, seed: u64) -> Result<SampleSet, SimError> {
    if k == 0 {
        return Err(SimError::NoSamples);
    }
    let amps = state.amplitudes();
    let total: f64 = amps.iter().map(C64::norm_sqr).sum();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(SAMPLE_STREAM);
    let mut targets: Vec<(f64, u32)> = (0..k).map(|i| (rng.random::<f64>() * total, i as u32)).collect();
    targets.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));

    let mut out = vec![0u64; k];
    let mut next = 0;
    let mut cum = 0.0f64;
    let mut last_support = 0usize;
    for (idx, a) in amps.iter().enumerate() {
        let p = a.norm_sqr();
        if p == 0.0 {
            continue;
        }
        last_support = idx;
        cum += p;
        while next < k && targets[next].0 < cum {
            out[targets[next].1 as usize] = idx as u64;
            next += 1;
        }
        if next == k {
            break;
        }
    }
    // rounding can leave the accumulated CDF a hair below `total`
    for &(_, pos) in &targets[next..] {
        out[pos as usize] = last_support as u64;
    }
    Ok(SampleSet { n: state.n(), seed, bitstrings: out })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::init_state;

    fn state(probs: &[f64]) -> StateVector {
        StateVector::from_amplitudes(probs.iter().map(|p| C64::new(p.sqrt(), 0.0)).collect()).unwrap()
    }

    #[test]
    fn point_mass_always_zero() {
        let s = sample(&init_state(3).unwrap(), 100, 1).unwrap();
        assert_eq!(s.k(), 100);
        assert!(s.bitstrings().iter().all(|&x| x == 0));
    }

    #[test]
    fn equal_superposition_frequency() {
        let s = sample(&state(&[0.5, 0.5]), 100_000, 7).unwrap();
        let ones = s.bitstrings().iter().filter(|&&x| x == 1).count() as f64 / 1e5;
        assert!((0.494..=0.506).contains(&ones), "{ones}");
    }

    #[test]
    fn deterministic_and_seed_sensitive() {
        let st = state(&[0.1, 0.2, 0.3, 0.4]);
        assert_eq!(sample(&st, 1000, 5).unwrap(), sample(&st, 1000, 5).unwrap());
        assert_ne!(sample(&st, 1000, 5).unwrap(), sample(&st, 1000, 6).unwrap());
        // seed 0 is valid
        assert_eq!(sample(&st, 10, 0).unwrap().k(), 10);
    }

    #[test]
    fn never_samples_zero_probability_states() {
        let st = state(&[0.0, 0.5, 0.0, 0.5, 0.0, 0.0, 0.0, 0.0]);
        let s = sample(&st, 10_000, 3).unwrap();
        assert!(s.bitstrings().iter().all(|&x| x == 1 || x == 3));
    }

    #[test]
    fn k_zero_rejected() {
        assert_eq!(sample(&init_state(1).unwrap(), 0, 0), Err(SimError::NoSamples));
    }

    #[test]
    fn out_of_range_bitstring_rejected() {
        assert!(SampleSet::from_bitstrings(2, 0, vec![0, 4]).is_err());
        assert!(SampleSet::from_bitstrings(2, 0, vec![0, 3]).is_ok());
    }
}
