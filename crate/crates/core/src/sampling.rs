//! Random index selection and synthetic sparse signals.
//!
//! Randomness comes from ChaCha8 keyed by a [`RngSeed`]: a 64-bit seed plus a
//! stream id, so each Monte-Carlo trial can be replayed in isolation.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::profile::SamplingProfile;
use crate::transforms::BasisPair;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngSeed {
    pub seed: u64,
    pub stream: u64,
}

impl RngSeed {
    pub fn new(seed: u64, stream: u64) -> Self {
        RngSeed { seed, stream }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

/// Folds identifiers into one stream id (SplitMix64 finalizer per step).
pub fn derive_stream(parts: &[u64]) -> u64 {
    parts.iter().fold(0x9e37_79b9_7f4a_7c15u64, |acc, &part| {
        let mut z = acc ^ part.wrapping_add(0x9e37_79b9_7f4a_7c15).wrapping_add(acc << 6);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SamplingModel {
    /// Independent inclusion of each index, no repeats.
    Bernoulli,
    /// `m` draws with replacement from a probability measure.
    Iid,
}

/// `α` with support `S`; every entry in `S` is nonzero.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSignal {
    alpha: Vec<Complex64>,
    support: Vec<usize>,
}

impl SparseSignal {
    pub fn alpha(&self) -> &[Complex64] {
        &self.alpha
    }

    /// Sorted support.
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn s(&self) -> usize {
        self.support.len()
    }

    pub fn n(&self) -> usize {
        self.alpha.len()
    }

    pub fn into_alpha(self) -> Vec<Complex64> {
        self.alpha
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSet {
    pub omega: Vec<usize>,
    pub y: Vec<Complex64>,
    pub model: SamplingModel,
}

/// Bernoulli selection: index `i` is kept with probability `p_i`.
pub fn bernoulli_select<R: Rng + ?Sized>(p: &SamplingProfile, rng: &mut R) -> Vec<usize> {
    p.p()
        .iter()
        .enumerate()
        .filter_map(|(i, &pi)| (rng.random::<f64>() < pi).then_some(i))
        .collect()
}

/// `m` i.i.d. draws from `prob` by inverse-CDF lookup; repeats are kept.
pub fn iid_select<R: Rng + ?Sized>(prob: &[f64], m: usize, rng: &mut R) -> Result<Vec<usize>> {
    if let Some((index, &value)) = prob.iter().enumerate().find(|(_, &v)| !(v >= 0.0)) {
        return Err(Error::InvalidProbability { index, value });
    }
    let sum: f64 = prob.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::NotNormalized { sum });
    }
    let mut cdf = Vec::with_capacity(prob.len());
    let mut acc = 0.0;
    for &v in prob {
        acc += v;
        cdf.push(acc);
    }
    let last_positive = prob.iter().rposition(|&v| v > 0.0).unwrap_or(0);
    Ok((0..m)
        .map(|_| {
            let u = rng.random::<f64>() * acc;
            cdf.partition_point(|&c| c <= u).min(last_positive)
        })
        .collect())
}

/// Entry with amplitude in `(0, 1]` and a uniform phase (Steinhaus sign).
fn random_entry<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let amplitude = 1.0 - rng.random::<f64>();
    let phase = 2.0 * PI * rng.random::<f64>();
    Complex64::from_polar(amplitude, phase)
}

/// `s`-sparse signal with a uniformly random support.
pub fn gen_sparse_signal<R: Rng + ?Sized>(n: usize, s: usize, rng: &mut R) -> Result<SparseSignal> {
    if s > n {
        return Err(Error::InvalidParameter { name: "s", value: s as f64 });
    }
    let support = index::sample(rng, n, s).into_vec();
    Ok(signal_on_support(n, support, rng))
}

/// Random Steinhaus-signed entries on a given support.
pub fn signal_on_support<R: Rng + ?Sized>(n: usize, mut support: Vec<usize>, rng: &mut R) -> SparseSignal {
    let mut alpha = vec![Complex64::new(0.0, 0.0); n];
    for &j in &support {
        alpha[j] = random_entry(rng);
    }
    support.sort_unstable();
    SparseSignal { alpha, support }
}

/// `s` distinct indices drawn without replacement with probability
/// proportional to `weights` at each draw (exponential-key method).
pub fn weighted_support<R: Rng + ?Sized>(weights: &[f64], s: usize, rng: &mut R) -> Result<Vec<usize>> {
    let n = weights.len();
    if s > n {
        return Err(Error::InvalidParameter { name: "s", value: s as f64 });
    }
    if let Some((index, &value)) = weights.iter().enumerate().find(|(_, &w)| !(w > 0.0)) {
        return Err(Error::InvalidProbability { index, value });
    }
    let mut keys: Vec<(f64, usize)> = weights
        .iter()
        .enumerate()
        .map(|(i, &w)| (libm::log(1.0 - rng.random::<f64>()) / w, i))
        .collect();
    keys.sort_unstable_by(|a, b| b.0.total_cmp(&a.0));
    let mut support: Vec<usize> = keys[..s].iter().map(|&(_, i)| i).collect();
    support.sort_unstable();
    Ok(support)
}

/// Independent uniform signs, `true` meaning `-1`.
pub fn random_signs<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<bool> {
    (0..n).map(|_| rng.random::<bool>()).collect()
}

/// `y = A_Ω α` for a duplicate-free `Ω`.
pub fn measure(signal: &SparseSignal, omega: &[usize], pair: &BasisPair) -> Result<MeasurementSet> {
    let y = pair.apply_masked(omega, &signal.alpha)?;
    Ok(MeasurementSet { omega: omega.to_vec(), y, model: SamplingModel::Bernoulli })
}

/// `y = A_Ω α` for an index multiset; repeated indices give repeated rows.
pub fn measure_multiset(signal: &SparseSignal, omega: &[usize], pair: &BasisPair) -> Result<MeasurementSet> {
    let n = pair.n();
    if let Some(&index) = omega.iter().find(|&&i| i >= n) {
        return Err(Error::IndexOutOfRange { index, n });
    }
    let mut full = signal.alpha.clone();
    pair.forward_in_place(&mut full)?;
    let y = omega.iter().map(|&i| full[i]).collect();
    Ok(MeasurementSet { omega: omega.to_vec(), y, model: SamplingModel::Iid })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transforms::BasisKind;

    #[test]
    fn full_profile_selects_everything() {
        let p = SamplingProfile::new(vec![1.0; 50], 50.0).unwrap();
        let mut rng = RngSeed::new(3, 0).rng();
        for _ in 0..10 {
            assert_eq!(bernoulli_select(&p, &mut rng), (0..50).collect::<Vec<_>>());
        }
    }

    #[test]
    fn iid_point_mass_and_empty() {
        let mut prob = vec![0.0; 6];
        prob[4] = 1.0;
        let mut rng = RngSeed::new(1, 2).rng();
        assert_eq!(iid_select(&prob, 7, &mut rng).unwrap(), vec![4; 7]);
        assert!(iid_select(&prob, 0, &mut rng).unwrap().is_empty());
        assert!(matches!(iid_select(&[0.5, 0.4], 3, &mut rng), Err(Error::NotNormalized { .. })));
    }

    #[test]
    fn signal_edge_cases() {
        let mut rng = RngSeed::new(9, 9).rng();
        let zero = gen_sparse_signal(16, 0, &mut rng).unwrap();
        assert!(zero.support().is_empty());
        assert!(zero.alpha().iter().all(|v| v.norm() == 0.0));
        let full = gen_sparse_signal(16, 16, &mut rng).unwrap();
        assert_eq!(full.support(), (0..16).collect::<Vec<_>>().as_slice());
        assert!(full.alpha().iter().all(|v| v.norm() > 0.0 && v.norm() <= 1.0));
        assert!(gen_sparse_signal(4, 5, &mut rng).is_err());
    }

    #[test]
    fn steinhaus_signs_have_unit_modulus() {
        let mut rng = RngSeed::new(11, 0).rng();
        let sig = gen_sparse_signal(128, 40, &mut rng).unwrap();
        for &j in sig.support() {
            let a = sig.alpha()[j];
            assert!(((a / a.norm()).norm() - 1.0).abs() < 1e-15);
        }
        for j in 0..128 {
            assert_eq!(sig.support().binary_search(&j).is_ok(), sig.alpha()[j].norm() > 0.0);
        }
    }

    #[test]
    fn seeds_reproduce_and_streams_differ() {
        let a = gen_sparse_signal(64, 8, &mut RngSeed::new(5, 1).rng()).unwrap();
        let b = gen_sparse_signal(64, 8, &mut RngSeed::new(5, 1).rng()).unwrap();
        let c = gen_sparse_signal(64, 8, &mut RngSeed::new(5, 2).rng()).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_ne!(derive_stream(&[1, 2, 3]), derive_stream(&[1, 3, 2]));
    }

    #[test]
    fn weighted_support_prefers_heavy_indices() {
        let mut w = vec![1e-6; 32];
        w[3] = 1.0;
        w[17] = 1.0;
        let s = weighted_support(&w, 2, &mut RngSeed::new(0, 0).rng()).unwrap();
        assert_eq!(s, vec![3, 17]);
    }

    #[test]
    fn measurement_of_zero_and_full_mask() {
        let pair = BasisPair::new(BasisKind::Fourier, BasisKind::HAAR, 32).unwrap();
        let mut rng = RngSeed::new(2, 0).rng();
        let sig = gen_sparse_signal(32, 5, &mut rng).unwrap();
        let all: Vec<usize> = (0..32).collect();
        let meas = measure(&sig, &all, &pair).unwrap();
        let ny: f64 = meas.y.iter().map(|v| v.norm_sqr()).sum();
        let na: f64 = sig.alpha().iter().map(|v| v.norm_sqr()).sum();
        assert!((ny - na).abs() < 1e-12);
        let zero = gen_sparse_signal(32, 0, &mut rng).unwrap();
        assert!(measure(&zero, &[1, 5, 9], &pair).unwrap().y.iter().all(|v| v.norm() == 0.0));
        let multi = measure_multiset(&sig, &[2, 2, 7], &pair).unwrap();
        assert_eq!(multi.y[0], multi.y[1]);
        assert!(measure(&sig, &[2, 2], &pair).is_err());
    }
}
