//! Matrix-free orthonormal bases and the cross-Gram operator `A = Φ†Ψ`.
//!
//! Every basis is applied through two maps: [`Basis::analyze`] computes
//! `B†x` (inner products with the basis vectors) and [`Basis::synthesize`]
//! computes `Bc` (a linear combination of basis vectors). Both are unitary
//! and exact adjoints of each other.
//!
//! Conventions:
//!
//! * Fourier is the unitary DFT, forward kernel `exp(-2πikn/N)/√N`.
//! * Hadamard uses the natural (Sylvester) ordering scaled by `N^(-1/2)`.
//! * Haar and Daubechies-4 (four taps) are periodized, full depth unless a
//!   depth is given, with the coarsest approximation coefficient first.
//! * The modulated Fourier basis senses `F†(σ ⊙ x)` for a unit-magnitude
//!   sequence `σ`, i.e. the spread-spectrum pre-modulation.

mod fft;
mod wavelet;

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use fft::Fft;
use wavelet::FilterBank;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Tolerance on `|σ_i| = 1` for modulation sequences.
const MODULATION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum BasisKind {
    Dirac,
    Fourier,
    Hadamard,
    /// `levels = None` means full depth, `log2(N)`.
    Haar { levels: Option<u32> },
    Daubechies4 { levels: Option<u32> },
    ModulatedFourier { modulation: Vec<Complex64> },
}

impl BasisKind {
    pub const HAAR: BasisKind = BasisKind::Haar { levels: None };
    pub const DAUBECHIES4: BasisKind = BasisKind::Daubechies4 { levels: None };

    /// Short lowercase tag, e.g. `"haar"`.
    pub fn tag(&self) -> &'static str {
        match self {
            BasisKind::Dirac => "dirac",
            BasisKind::Fourier => "fourier",
            BasisKind::Hadamard => "hadamard",
            BasisKind::Haar { .. } => "haar",
            BasisKind::Daubechies4 { .. } => "daubechies4",
            BasisKind::ModulatedFourier { .. } => "modulated_fourier",
        }
    }

    /// Spread-spectrum sensing with a `±1` sequence.
    pub fn modulated_signs(signs: &[bool]) -> BasisKind {
        let modulation = signs
            .iter()
            .map(|&neg| Complex64::new(if neg { -1.0 } else { 1.0 }, 0.0))
            .collect();
        BasisKind::ModulatedFourier { modulation }
    }
}

impl fmt::Display for BasisKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisKind::Haar { levels: Some(l) } | BasisKind::Daubechies4 { levels: Some(l) } => {
                write!(f, "{}:{l}", self.tag())
            }
            _ => f.write_str(self.tag()),
        }
    }
}

/// Parses the [`Display`](fmt::Display) form. `d4` abbreviates
/// `daubechies4`; modulated kinds carry data and are not parseable.
impl core::str::FromStr for BasisKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, levels) = match s.split_once(':') {
            Some((name, l)) => (name, Some(l.trim().parse::<u32>().map_err(|_| Error::UnknownBasis)?)),
            None => (s, None),
        };
        match (name.trim().to_ascii_lowercase().as_str(), levels) {
            ("dirac", None) => Ok(BasisKind::Dirac),
            ("fourier", None) => Ok(BasisKind::Fourier),
            ("hadamard", None) => Ok(BasisKind::Hadamard),
            ("haar", levels) => Ok(BasisKind::Haar { levels }),
            ("daubechies4" | "d4", levels) => Ok(BasisKind::Daubechies4 { levels }),
            _ => Err(Error::UnknownBasis),
        }
    }
}

#[derive(Debug, Clone)]
enum Engine {
    Identity,
    Fourier(Fft),
    Hadamard,
    Wavelet(FilterBank),
    Modulated { fft: Fft, modulation: Vec<Complex64> },
}

/// A basis kind bound to a dimension, with its precomputed tables.
#[derive(Debug, Clone)]
pub struct Basis {
    kind: BasisKind,
    n: usize,
    scale: f64,
    engine: Engine,
}

impl Basis {
    pub fn new(kind: BasisKind, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDimension { n, reason: "dimension must be positive" });
        }
        if !matches!(kind, BasisKind::Dirac) && !n.is_power_of_two() {
            return Err(Error::InvalidDimension { n, reason: "not a power of two" });
        }
        let max_levels = n.trailing_zeros();
        let depth = |levels: Option<u32>| -> Result<u32> {
            let levels = levels.unwrap_or(max_levels);
            if levels == 0 || levels > max_levels {
                return Err(Error::InvalidLevels { levels, max: max_levels });
            }
            Ok(levels)
        };
        let engine = match &kind {
            BasisKind::Dirac => Engine::Identity,
            BasisKind::Fourier => Engine::Fourier(Fft::new(n)),
            BasisKind::Hadamard => Engine::Hadamard,
            BasisKind::Haar { levels } => Engine::Wavelet(FilterBank::new(&wavelet::HAAR, depth(*levels)?)),
            BasisKind::Daubechies4 { levels } => {
                Engine::Wavelet(FilterBank::new(&wavelet::daubechies4(), depth(*levels)?))
            }
            BasisKind::ModulatedFourier { modulation } => {
                if modulation.len() != n {
                    return Err(Error::DimensionMismatch { expected: n, found: modulation.len() });
                }
                if let Some((index, v)) = modulation
                    .iter()
                    .enumerate()
                    .find(|(_, v)| (v.norm() - 1.0).abs() > MODULATION_TOL)
                {
                    return Err(Error::InvalidModulation { index, magnitude: v.norm() });
                }
                Engine::Modulated { fft: Fft::new(n), modulation: modulation.clone() }
            }
        };
        Ok(Basis { kind, n, scale: 1.0 / libm::sqrt(n as f64), engine })
    }

    pub fn kind(&self) -> &BasisKind {
        &self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Coefficients `B†x`.
    pub fn analyze(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        let mut buf = x.to_vec();
        self.analyze_in_place(&mut buf)?;
        Ok(buf)
    }

    /// Signal `Bc`.
    pub fn synthesize(&self, c: &[Complex64]) -> Result<Vec<Complex64>> {
        let mut buf = c.to_vec();
        self.synthesize_in_place(&mut buf)?;
        Ok(buf)
    }

    pub fn analyze_in_place(&self, buf: &mut [Complex64]) -> Result<()> {
        self.check_len(buf.len())?;
        match &self.engine {
            Engine::Identity => {}
            Engine::Fourier(fft) => {
                fft.forward(buf);
                self.rescale(buf);
            }
            Engine::Hadamard => {
                fwht(buf);
                self.rescale(buf);
            }
            Engine::Wavelet(bank) => bank.analyze(buf),
            Engine::Modulated { fft, modulation } => {
                buf.iter_mut().zip(modulation).for_each(|(v, s)| *v *= s);
                fft.forward(buf);
                self.rescale(buf);
            }
        }
        Ok(())
    }

    pub fn synthesize_in_place(&self, buf: &mut [Complex64]) -> Result<()> {
        self.check_len(buf.len())?;
        match &self.engine {
            Engine::Identity => {}
            Engine::Fourier(fft) => {
                fft.inverse(buf);
                self.rescale(buf);
            }
            Engine::Hadamard => {
                fwht(buf);
                self.rescale(buf);
            }
            Engine::Wavelet(bank) => bank.synthesize(buf),
            Engine::Modulated { fft, modulation } => {
                fft.inverse(buf);
                self.rescale(buf);
                buf.iter_mut().zip(modulation).for_each(|(v, s)| *v *= s.conj());
            }
        }
        Ok(())
    }

    /// Basis vector `i` as a dense signal.
    pub fn vector(&self, i: usize) -> Result<Vec<Complex64>> {
        if i >= self.n {
            return Err(Error::IndexOutOfRange { index: i, n: self.n });
        }
        let mut e = vec![ZERO; self.n];
        e[i] = Complex64::new(1.0, 0.0);
        self.synthesize_in_place(&mut e)?;
        Ok(e)
    }

    /// Distance of index `i` from the lowest-frequency vector in the basis's
    /// natural ordering: `min(k, N-k)` for Fourier, the sequency for
    /// Hadamard, and the index itself otherwise.
    pub fn frequency_distance(&self, i: usize) -> usize {
        match self.kind {
            BasisKind::Fourier | BasisKind::ModulatedFourier { .. } => i.min(self.n - i),
            BasisKind::Hadamard => sequency(i, self.n),
            _ => i,
        }
    }

    fn rescale(&self, buf: &mut [Complex64]) {
        let s = self.scale;
        buf.iter_mut().for_each(|v| *v *= s);
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: len });
        }
        Ok(())
    }
}

/// Unnormalized in-place Walsh-Hadamard transform, natural ordering.
fn fwht(buf: &mut [Complex64]) {
    let n = buf.len();
    let mut h = 1;
    while h < n {
        for start in (0..n).step_by(2 * h) {
            for j in start..start + h {
                let a = buf[j];
                let b = buf[j + h];
                buf[j] = a + b;
                buf[j + h] = a - b;
            }
        }
        h *= 2;
    }
}

/// Number of sign changes of Sylvester-ordered Hadamard row `i`.
fn sequency(i: usize, n: usize) -> usize {
    let bits = n.trailing_zeros();
    if bits == 0 {
        return 0;
    }
    let mut g = i.reverse_bits() >> (usize::BITS - bits);
    let mut b = 0;
    while g != 0 {
        b ^= g;
        g >>= 1;
    }
    b
}

pub fn analyze(kind: &BasisKind, x: &[Complex64]) -> Result<Vec<Complex64>> {
    Basis::new(kind.clone(), x.len())?.analyze(x)
}

pub fn synthesize(kind: &BasisKind, c: &[Complex64]) -> Result<Vec<Complex64>> {
    Basis::new(kind.clone(), c.len())?.synthesize(c)
}

/// Sensing basis `Φ` and sparsity basis `Ψ` on a common dimension.
#[derive(Debug, Clone)]
pub struct BasisPair {
    sensing: Basis,
    sparsity: Basis,
}

impl BasisPair {
    pub fn new(sensing: BasisKind, sparsity: BasisKind, n: usize) -> Result<Self> {
        Ok(BasisPair { sensing: Basis::new(sensing, n)?, sparsity: Basis::new(sparsity, n)? })
    }

    pub fn n(&self) -> usize {
        self.sensing.n
    }

    pub fn sensing(&self) -> &Basis {
        &self.sensing
    }

    pub fn sparsity(&self) -> &Basis {
        &self.sparsity
    }

    /// Row `i` of `A`: entries `⟨φ_i, ψ_j⟩` for all `j`.
    pub fn gram_row(&self, i: usize) -> Result<Vec<Complex64>> {
        let mut row = self.sensing.vector(i)?;
        self.sparsity.analyze_in_place(&mut row)?;
        // Ψ†φ_i holds ⟨ψ_j, φ_i⟩, the conjugate of the row.
        row.iter_mut().for_each(|v| *v = v.conj());
        Ok(row)
    }

    /// Column `j` of `A`: entries `⟨φ_i, ψ_j⟩` for all `i`.
    pub fn gram_column(&self, j: usize) -> Result<Vec<Complex64>> {
        let mut col = self.sparsity.vector(j)?;
        self.sensing.analyze_in_place(&mut col)?;
        Ok(col)
    }

    /// `A α = Φ†Ψα`, in place.
    pub fn forward_in_place(&self, buf: &mut [Complex64]) -> Result<()> {
        self.sparsity.synthesize_in_place(buf)?;
        self.sensing.analyze_in_place(buf)
    }

    /// `A† u = Ψ†Φu`, in place.
    pub fn adjoint_in_place(&self, buf: &mut [Complex64]) -> Result<()> {
        self.sensing.synthesize_in_place(buf)?;
        self.sparsity.analyze_in_place(buf)
    }

    /// Rejects out-of-range and repeated indices.
    pub fn check_mask(&self, omega: &[usize]) -> Result<()> {
        let n = self.n();
        let mut seen = vec![false; n];
        for &i in omega {
            if i >= n {
                return Err(Error::IndexOutOfRange { index: i, n });
            }
            if core::mem::replace(&mut seen[i], true) {
                return Err(Error::DuplicateIndex { index: i });
            }
        }
        Ok(())
    }

    /// `y = A_Ω α`, the rows of `Φ†Ψα` listed in `omega`, in that order.
    pub fn apply_masked(&self, omega: &[usize], alpha: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check_mask(omega)?;
        let mut buf = alpha.to_vec();
        self.forward_in_place(&mut buf)?;
        Ok(omega.iter().map(|&i| buf[i]).collect())
    }

    /// `A_Ω† y`.
    pub fn apply_masked_adjoint(&self, omega: &[usize], y: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check_mask(omega)?;
        if y.len() != omega.len() {
            return Err(Error::DimensionMismatch { expected: omega.len(), found: y.len() });
        }
        let mut buf = vec![ZERO; self.n()];
        for (&i, &v) in omega.iter().zip(y) {
            buf[i] = v;
        }
        self.adjoint_in_place(&mut buf)?;
        Ok(buf)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn norm(x: &[Complex64]) -> f64 {
        libm::sqrt(x.iter().map(|v| v.norm_sqr()).sum())
    }

    #[test]
    fn descriptors_round_trip() {
        use alloc::string::ToString;
        for kind in [
            BasisKind::Dirac,
            BasisKind::Fourier,
            BasisKind::Hadamard,
            BasisKind::HAAR,
            BasisKind::Haar { levels: Some(3) },
            BasisKind::Daubechies4 { levels: Some(2) },
            BasisKind::DAUBECHIES4,
        ] {
            assert_eq!(kind.to_string().parse::<BasisKind>().unwrap(), kind);
        }
        assert_eq!("D4:1".parse::<BasisKind>().unwrap(), BasisKind::Daubechies4 { levels: Some(1) });
        assert!("fourier:2".parse::<BasisKind>().is_err());
        assert!("haar:x".parse::<BasisKind>().is_err());
        assert!("modulated_fourier".parse::<BasisKind>().is_err());
    }

    #[test]
    fn haar_constant_vector_lands_on_scaling_index() {
        let n = 32;
        let x = vec![c(2.5); n];
        let out = analyze(&BasisKind::HAAR, &x).unwrap();
        assert!((out[0].re - 2.5 * libm::sqrt(n as f64)).abs() < 1e-12);
        assert!(out[1..].iter().all(|v| v.norm() < 1e-12));
    }

    #[test]
    fn fourier_impulse_is_flat() {
        let n = 16;
        let mut x = vec![c(0.0); n];
        x[0] = c(1.0);
        let out = analyze(&BasisKind::Fourier, &x).unwrap();
        assert!(out.iter().all(|v| (v - c(0.25)).norm() < 1e-15));
    }

    #[test]
    fn hadamard_is_an_involution() {
        let x: Vec<Complex64> = (0..64).map(|i| Complex64::new(i as f64, 1.0 - i as f64)).collect();
        let once = analyze(&BasisKind::Hadamard, &x).unwrap();
        let twice = analyze(&BasisKind::Hadamard, &once).unwrap();
        for (a, b) in twice.iter().zip(&x) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn daubechies_impulse_has_unit_norm() {
        for i in [0, 5, 63] {
            let v = Basis::new(BasisKind::DAUBECHIES4, 64).unwrap().vector(i).unwrap();
            assert!((norm(&v) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn dirac_is_identity() {
        let x = vec![Complex64::new(1.0, 2.0), Complex64::new(-3.0, 0.5), c(7.0)];
        assert_eq!(synthesize(&BasisKind::Dirac, &x).unwrap(), x);
        assert_eq!(analyze(&BasisKind::Dirac, &x).unwrap(), x);
    }

    #[test]
    fn rejects_bad_dimensions_and_levels() {
        assert!(matches!(
            Basis::new(BasisKind::Fourier, 12),
            Err(Error::InvalidDimension { n: 12, .. })
        ));
        assert!(Basis::new(BasisKind::Dirac, 12).is_ok());
        assert!(matches!(
            Basis::new(BasisKind::Haar { levels: Some(5) }, 16),
            Err(Error::InvalidLevels { levels: 5, max: 4 })
        ));
        assert!(matches!(
            Basis::new(BasisKind::Haar { levels: Some(0) }, 16),
            Err(Error::InvalidLevels { .. })
        ));
        let basis = Basis::new(BasisKind::Hadamard, 8).unwrap();
        assert_eq!(
            basis.analyze(&[c(1.0); 4]),
            Err(Error::DimensionMismatch { expected: 8, found: 4 })
        );
        let bad = BasisKind::ModulatedFourier { modulation: vec![c(1.0), c(0.5)] };
        assert!(matches!(Basis::new(bad, 2), Err(Error::InvalidModulation { index: 1, .. })));
    }

    #[test]
    fn partial_depth_haar() {
        let n = 16;
        let x = vec![c(1.0); n];
        let out = analyze(&BasisKind::Haar { levels: Some(2) }, &x).unwrap();
        // Four approximation coefficients, each 1·√4.
        assert!(out[..4].iter().all(|v| (v.re - 2.0).abs() < 1e-12));
        assert!(out[4..].iter().all(|v| v.norm() < 1e-12));
    }

    #[test]
    fn sequency_matches_sign_changes() {
        let n = 16;
        let basis = Basis::new(BasisKind::Hadamard, n).unwrap();
        for i in 0..n {
            let v = basis.vector(i).unwrap();
            let changes = v.windows(2).filter(|w| (w[0].re > 0.0) != (w[1].re > 0.0)).count();
            assert_eq!(basis.frequency_distance(i), changes);
        }
    }

    #[test]
    fn fourier_haar_dc_row() {
        let pair = BasisPair::new(BasisKind::Fourier, BasisKind::HAAR, 64).unwrap();
        let row = pair.gram_row(0).unwrap();
        assert!((row[0] - c(1.0)).norm() < 1e-10);
        assert!(row[1..].iter().all(|v| v.norm() < 1e-10));
    }

    #[test]
    fn mask_validation() {
        let pair = BasisPair::new(BasisKind::Dirac, BasisKind::Fourier, 8).unwrap();
        let alpha = vec![c(1.0); 8];
        assert_eq!(pair.apply_masked(&[1, 3, 1], &alpha), Err(Error::DuplicateIndex { index: 1 }));
        assert_eq!(pair.apply_masked(&[8], &alpha), Err(Error::IndexOutOfRange { index: 8, n: 8 }));
        assert_eq!(pair.gram_row(9), Err(Error::IndexOutOfRange { index: 9, n: 8 }));
        assert!(pair.apply_masked(&[], &alpha).unwrap().is_empty());
    }
}
