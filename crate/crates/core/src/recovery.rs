//! Equality-constrained basis pursuit, `min ‖α‖₁ s.t. A_Ω α = y`.
//!
//! The rows of `A_Ω` are distinct rows of a unitary matrix, so
//! `A_Ω A_Ω† = I` and the projection onto the constraint set is
//! `α + A_Ω†(y − A_Ω α)`. In the sensing domain that is simply "overwrite
//! the entries in Ω with y", costing two transforms each way. Douglas–Rachford
//! alternates this projection with complex soft-thresholding.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::transforms::BasisPair;

/// Relative ℓ2 error accepted as exact recovery.
pub const RECOVERY_THRESHOLD: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct BPConfig {
    pub max_iters: usize,
    /// Bound on the relative Douglas–Rachford fixed-point residual.
    pub tol: f64,
    /// Relaxation in `(0, 2)`.
    pub relaxation: f64,
    /// Soft-threshold level relative to `‖y‖₂ / √|Ω|`.
    pub gamma_scale: f64,
}

impl Default for BPConfig {
    fn default() -> Self {
        BPConfig { max_iters: 20_000, tol: 1e-8, relaxation: 1.0, gamma_scale: 0.1 }
    }
}

impl BPConfig {
    fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::InvalidParameter { name: "max_iters", value: 0.0 });
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidParameter { name: "tol", value: self.tol });
        }
        if !(self.relaxation > 0.0 && self.relaxation < 2.0) {
            return Err(Error::InvalidParameter { name: "relaxation", value: self.relaxation });
        }
        if !(self.gamma_scale > 0.0) {
            return Err(Error::InvalidParameter { name: "gamma_scale", value: self.gamma_scale });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BPSolution {
    /// Feasible estimate: `A_Ω α̂ = y` up to round-off.
    pub alpha: Vec<Complex64>,
    pub iterations: usize,
    /// Final relative fixed-point residual.
    pub residual: f64,
    pub converged: bool,
}

/// Shrinks each magnitude by `threshold`, keeping the phase.
pub fn soft_threshold(u: &mut [Complex64], threshold: f64) {
    for v in u.iter_mut() {
        let mag = v.norm();
        if mag <= threshold {
            *v = Complex64::new(0.0, 0.0);
        } else {
            *v *= (mag - threshold) / mag;
        }
    }
}

/// Projection onto `{α : A_Ω α = y}`.
pub fn project_affine(pair: &BasisPair, omega: &[usize], y: &[Complex64], z: &[Complex64]) -> Result<Vec<Complex64>> {
    pair.check_mask(omega)?;
    check_lengths(omega, y)?;
    if z.len() != pair.n() {
        return Err(Error::DimensionMismatch { expected: pair.n(), found: z.len() });
    }
    let mut out = z.to_vec();
    affine_in_place(pair, omega, y, &mut out)?;
    Ok(out)
}

fn affine_in_place(pair: &BasisPair, omega: &[usize], y: &[Complex64], buf: &mut [Complex64]) -> Result<()> {
    pair.forward_in_place(buf)?;
    for (&i, &v) in omega.iter().zip(y) {
        buf[i] = v;
    }
    pair.adjoint_in_place(buf)
}

fn check_lengths(omega: &[usize], y: &[Complex64]) -> Result<()> {
    if y.len() != omega.len() {
        return Err(Error::DimensionMismatch { expected: omega.len(), found: y.len() });
    }
    Ok(())
}

fn norm(x: &[Complex64]) -> f64 {
    libm::sqrt(x.iter().map(|v| v.norm_sqr()).sum())
}

pub fn l1_norm(x: &[Complex64]) -> f64 {
    x.iter().map(|v| v.norm()).sum()
}

/// Douglas–Rachford splitting between `‖·‖₁` and the affine constraint.
///
/// `Ω` must be duplicate-free; use [`dedup_measurements`] for i.i.d. masks.
/// On hitting `max_iters` the last feasible iterate is returned with
/// `converged = false`.
pub fn basis_pursuit(y: &[Complex64], omega: &[usize], pair: &BasisPair, cfg: &BPConfig) -> Result<BPSolution> {
    cfg.validate()?;
    pair.check_mask(omega)?;
    check_lengths(omega, y)?;
    let n = pair.n();
    let y_norm = norm(y);
    if y_norm == 0.0 {
        return Ok(BPSolution { alpha: vec![Complex64::new(0.0, 0.0); n], iterations: 0, residual: 0.0, converged: true });
    }
    let mut z = pair.apply_masked_adjoint(omega, y)?;
    if omega.len() == n {
        // The constraint set is a single point.
        return Ok(BPSolution { alpha: z, iterations: 0, residual: 0.0, converged: true });
    }
    let gamma = cfg.gamma_scale * y_norm / libm::sqrt(omega.len() as f64);
    let mut x = z.clone();
    let mut v = vec![Complex64::new(0.0, 0.0); n];
    let mut residual = f64::INFINITY;
    for it in 1..=cfg.max_iters {
        x.copy_from_slice(&z);
        affine_in_place(pair, omega, y, &mut x)?;
        for i in 0..n {
            v[i] = x[i] * 2.0 - z[i];
        }
        soft_threshold(&mut v, gamma);
        let mut diff = 0.0;
        for i in 0..n {
            let d = v[i] - x[i];
            diff += d.norm_sqr();
            z[i] += d * cfg.relaxation;
        }
        residual = libm::sqrt(diff) / norm(&x).max(f64::MIN_POSITIVE);
        if residual <= cfg.tol {
            return Ok(BPSolution { alpha: x, iterations: it, residual, converged: true });
        }
    }
    Ok(BPSolution { alpha: x, iterations: cfg.max_iters, residual, converged: false })
}

/// Drops repeated indices (keeping the first measurement of each). For
/// consistent data the feasible set is unchanged, since repeated rows carry
/// the same equation.
pub fn dedup_measurements(omega: &[usize], y: &[Complex64]) -> (Vec<usize>, Vec<Complex64>) {
    let mut seen = alloc::collections::BTreeSet::new();
    omega
        .iter()
        .zip(y)
        .filter(|(&i, _)| seen.insert(i))
        .map(|(&i, &v)| (i, v))
        .unzip()
}

/// `‖α − α̂‖₂ ≤ 10⁻³ ‖α‖₂`; a zero `α` counts as recovered only by a zero `α̂`.
pub fn is_recovered(alpha: &[Complex64], alpha_hat: &[Complex64]) -> Result<bool> {
    if alpha.len() != alpha_hat.len() {
        return Err(Error::DimensionMismatch { expected: alpha.len(), found: alpha_hat.len() });
    }
    let err = libm::sqrt(alpha.iter().zip(alpha_hat).map(|(a, b)| (a - b).norm_sqr()).sum());
    let reference = norm(alpha);
    if reference == 0.0 {
        return Ok(err == 0.0);
    }
    Ok(err <= RECOVERY_THRESHOLD * reference)
}
