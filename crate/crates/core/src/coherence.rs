//! Coherence diagonals `B`, `C` and the coherence functionals.
//!
//! `B_ii = max_j |⟨φ_i, ψ_j⟩|²` summarizes how strongly sensing vector `i`
//! correlates with the sparsity basis. `C_ii = s⁻¹ Σ_{j∈S} |⟨φ_i, ψ_j⟩|²`
//! does the same restricted to a support `S`, averaged over a dataset of
//! supports when one is available.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::profile::SamplingProfile;
use crate::transforms::BasisPair;

/// Entries below this are raised to it so that `1/B_ii` stays finite.
pub const DIAGONAL_FLOOR: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagonalKind {
    /// Per-row maximum squared Gram entry.
    MaxRow,
    /// Support-averaged squared Gram row energy.
    SupportAvg,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoherenceDiagonal {
    values: Vec<f64>,
    kind: DiagonalKind,
    /// Number of entries raised to [`DIAGONAL_FLOOR`].
    floored: usize,
    descriptor: String,
}

impl CoherenceDiagonal {
    /// Wraps caller-supplied values; every entry must be positive and finite.
    pub fn from_values(values: Vec<f64>, kind: DiagonalKind, descriptor: String) -> Result<Self> {
        if let Some((index, &value)) =
            values.iter().enumerate().find(|(_, &v)| !(v > 0.0 && v.is_finite()))
        {
            return Err(Error::InvalidProbability { index, value });
        }
        Ok(CoherenceDiagonal { values, kind, floored: 0, descriptor })
    }

    fn floored(mut values: Vec<f64>, kind: DiagonalKind, descriptor: String) -> Self {
        let mut floored = 0;
        for v in values.iter_mut() {
            if *v < DIAGONAL_FLOOR {
                *v = DIAGONAL_FLOOR;
                floored += 1;
            }
        }
        CoherenceDiagonal { values, kind, floored, descriptor }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn kind(&self) -> DiagonalKind {
        self.kind
    }

    pub fn floored_count(&self) -> usize {
        self.floored
    }

    pub fn descriptor(&self) -> &str {
        &self.descriptor
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

fn describe(pair: &BasisPair) -> String {
    alloc::format!("{}/{} n={}", pair.sensing().kind(), pair.sparsity().kind(), pair.n())
}

pub fn build_b(pair: &BasisPair) -> Result<CoherenceDiagonal> {
    let values = (0..pair.n())
        .map(|i| {
            let row = pair.gram_row(i)?;
            Ok(row.iter().map(|v| v.norm_sqr()).fold(0.0, f64::max))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CoherenceDiagonal::floored(values, DiagonalKind::MaxRow, describe(pair)))
}

/// `C` averaged over a dataset of supports, all of cardinality `s`.
///
/// The mean over supports of `s⁻¹ Σ_{j∈S} |A_ij|²` equals `Σ_j w_j |A_ij|²`
/// with `w_j` the fraction of supports containing `j`, divided by `s`; only
/// the columns with `w_j > 0` are computed.
pub fn build_c(pair: &BasisPair, supports: &[Vec<usize>], s: usize) -> Result<CoherenceDiagonal> {
    let n = pair.n();
    if supports.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if s == 0 {
        return Err(Error::InvalidParameter { name: "s", value: 0.0 });
    }
    let mut counts = vec![0usize; n];
    for (index, support) in supports.iter().enumerate() {
        if support.len() != s {
            return Err(Error::SupportSize { index, expected: s, found: support.len() });
        }
        for &j in support {
            if j >= n {
                return Err(Error::IndexOutOfRange { index: j, n });
            }
            counts[j] += 1;
        }
    }
    let denom = (supports.len() * s) as f64;
    let mut values = vec![0.0; n];
    for (j, &count) in counts.iter().enumerate() {
        if count == 0 {
            continue;
        }
        let w = count as f64 / denom;
        let col = pair.gram_column(j)?;
        for (acc, a) in values.iter_mut().zip(&col) {
            *acc += w * a.norm_sqr();
        }
    }
    let descriptor = alloc::format!("{} supports={} s={s}", describe(pair), supports.len());
    Ok(CoherenceDiagonal::floored(values, DiagonalKind::SupportAvg, descriptor))
}

fn check_positive(p: &[f64]) -> Result<()> {
    match p.iter().enumerate().find(|(_, &v)| !(v > 0.0)) {
        Some((index, &value)) => Err(Error::InvalidProbability { index, value }),
        None => Ok(()),
    }
}

fn max_ratio(num: &[f64], den: &[f64]) -> f64 {
    num.iter().zip(den).map(|(a, b)| a / b).fold(0.0, f64::max)
}

/// `μ(p) = (m/N)^{1/2} max_{i,j} |⟨φ_i,ψ_j⟩| / p_i^{1/2}`, evaluated from `B`.
pub fn mu_profile_from_b(p: &SamplingProfile, b: &CoherenceDiagonal) -> Result<f64> {
    if b.kind != DiagonalKind::MaxRow {
        return Err(Error::KindMismatch { expected: DiagonalKind::MaxRow, found: b.kind });
    }
    if p.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: b.len(), found: p.len() });
    }
    check_positive(p.p())?;
    let n = b.len() as f64;
    Ok(libm::sqrt(p.m() / n * max_ratio(&b.values, p.p())))
}

pub fn mu_profile(p: &SamplingProfile, pair: &BasisPair) -> Result<f64> {
    check_positive(p.p())?;
    mu_profile_from_b(p, &build_b(pair)?)
}

/// `μ(p, S) = ((m/N) max_i C_ii / p_i)^{1/2}`.
pub fn mu_profile_support(p: &SamplingProfile, c: &CoherenceDiagonal) -> Result<f64> {
    if c.kind != DiagonalKind::SupportAvg {
        return Err(Error::KindMismatch { expected: DiagonalKind::SupportAvg, found: c.kind });
    }
    if p.len() != c.len() {
        return Err(Error::DimensionMismatch { expected: c.len(), found: p.len() });
    }
    check_positive(p.p())?;
    let n = c.len() as f64;
    Ok(libm::sqrt(p.m() / n * max_ratio(&c.values, p.p())))
}

/// Tolerance on `Σ P_i = 1`.
const MEASURE_SUM_TOL: f64 = 1e-9;

/// `μ(P) = N^{-1/2} max_{i,j} |⟨φ_i,ψ_j⟩| / P_i^{1/2}` for an i.i.d. measure `P`.
pub fn mu_measure(prob: &[f64], pair: &BasisPair) -> Result<f64> {
    if prob.len() != pair.n() {
        return Err(Error::DimensionMismatch { expected: pair.n(), found: prob.len() });
    }
    check_positive(prob)?;
    let sum: f64 = prob.iter().sum();
    if (sum - 1.0).abs() > MEASURE_SUM_TOL {
        return Err(Error::NotNormalized { sum });
    }
    let b = build_b(pair)?;
    let n = pair.n() as f64;
    Ok(libm::sqrt(max_ratio(&b.values, prob) / n))
}
