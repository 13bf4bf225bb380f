//! Sampling profiles: per-index Bernoulli inclusion probabilities.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Inclusion probabilities `p` together with the budget `m` they were built for.
///
/// A profile is *admissible* when every `p_i ∈ (0, 1]` and `Σ p_i = m`. The
/// constructor only enforces the entrywise range, because the optimizer may
/// return profiles that do not saturate the budget.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplingProfile {
    p: Vec<f64>,
    m: f64,
}

impl SamplingProfile {
    pub fn new(p: Vec<f64>, m: f64) -> Result<Self> {
        if !(m > 0.0) || !m.is_finite() {
            return Err(Error::InvalidParameter { name: "m", value: m });
        }
        if let Some((index, &value)) =
            p.iter().enumerate().find(|(_, &v)| !(v > 0.0 && v <= 1.0))
        {
            return Err(Error::InvalidProbability { index, value });
        }
        Ok(SamplingProfile { p, m })
    }

    /// `p_i = m/N` everywhere.
    pub fn uniform(n: usize, m: f64) -> Result<Self> {
        if m > n as f64 {
            return Err(Error::BudgetTooLarge { m, n });
        }
        SamplingProfile::new(vec![m / n as f64; n], m)
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    pub fn l1(&self) -> f64 {
        self.p.iter().sum()
    }

    pub fn is_admissible(&self, tol: f64) -> bool {
        (self.l1() - self.m).abs() <= tol
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.p
    }
}

/// Rescales positive weights into an admissible profile for budget `m`.
///
/// Alternates scaling and clipping at 1: entries that reach 1 stay there and
/// the remaining mass is spread proportionally over the others. Terminates in
/// at most `N` rounds because the clipped set only grows.
pub fn normalize_to_budget(weights: &[f64], m: f64) -> Result<SamplingProfile> {
    let n = weights.len();
    if !(m > 0.0) {
        return Err(Error::InvalidParameter { name: "m", value: m });
    }
    if m > n as f64 {
        return Err(Error::BudgetTooLarge { m, n });
    }
    if let Some((index, &value)) =
        weights.iter().enumerate().find(|(_, &v)| !(v > 0.0 && v.is_finite()))
    {
        return Err(Error::InvalidProbability { index, value });
    }
    let mut p = weights.to_vec();
    let mut clipped = vec![false; n];
    loop {
        let fixed = clipped.iter().filter(|&&c| c).count() as f64;
        let free_mass: f64 = p.iter().zip(&clipped).filter(|(_, &c)| !c).map(|(v, _)| v).sum();
        let target = m - fixed;
        if free_mass <= 0.0 || target <= 0.0 {
            break;
        }
        let scale = target / free_mass;
        let mut newly_clipped = false;
        for (v, c) in p.iter_mut().zip(clipped.iter_mut()) {
            if *c {
                continue;
            }
            *v *= scale;
            if *v >= 1.0 {
                *v = 1.0;
                *c = true;
                newly_clipped = true;
            }
        }
        if !newly_clipped {
            break;
        }
    }
    SamplingProfile::new(p, m)
}
