//! Sampling-profile optimization by coherence minimization.
//!
//! Solves
//!
//! ```text
//! min_{p,q}  ‖D q‖∞ + λ ‖p·q − 1‖₂²   s.t.  p ∈ K_τ = {p ∈ [τ,1]^N : ‖p‖₁ ≤ m}
//! ```
//!
//! for a coherence diagonal `D` (`B`, or `C` when a support prior exists),
//! by alternating exact-block updates from `p = m/N`: a forward-backward
//! solve in `q` and a projected-gradient solve in `p`. When `p·q = 1` the
//! first term equals `μ²(p)`, so the penalty drives `p` towards the profile
//! of least coherence.

use alloc::vec::Vec;

use crate::coherence::CoherenceDiagonal;
use crate::error::{Error, Result};
use crate::profile::{normalize_to_budget, SamplingProfile};
use crate::prox::{project_k_tau, prox_weighted_linf_diag};

#[derive(Debug, Clone, PartialEq)]
pub struct OptConfig {
    pub lambda: f64,
    pub tau: f64,
    pub m: f64,
    pub max_outer: usize,
    /// Relative objective change that ends the outer loop.
    pub outer_tol: f64,
    /// Relative iterate change that ends an inner solve.
    pub inner_tol: f64,
    pub max_inner: usize,
    /// Rescale the result onto the admissible set `‖p‖₁ = m`.
    pub strict_admissible: bool,
}

impl OptConfig {
    pub const DEFAULT_LAMBDA: f64 = 0.05;
    pub const DEFAULT_TAU: f64 = 1e-3;

    pub fn new(m: f64) -> Self {
        OptConfig {
            lambda: Self::DEFAULT_LAMBDA,
            tau: Self::DEFAULT_TAU,
            m,
            max_outer: 200,
            outer_tol: 1e-6,
            inner_tol: 1e-10,
            max_inner: 100_000,
            strict_admissible: false,
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::InvalidParameter { name: "lambda", value: self.lambda });
        }
        if !(self.tau > 0.0 && self.tau <= 1.0) {
            return Err(Error::InvalidParameter { name: "tau", value: self.tau });
        }
        if !(self.m > 0.0) {
            return Err(Error::InvalidParameter { name: "m", value: self.m });
        }
        if self.m > n as f64 {
            return Err(Error::BudgetTooLarge { m: self.m, n });
        }
        if n as f64 * self.tau > self.m {
            return Err(Error::Infeasible { n, tau: self.tau, m: self.m });
        }
        if !(self.inner_tol > 0.0) {
            return Err(Error::InvalidParameter { name: "inner_tol", value: self.inner_tol });
        }
        if self.max_inner == 0 {
            return Err(Error::InvalidParameter { name: "max_inner", value: 0.0 });
        }
        Ok(())
    }
}

/// One outer iteration, evaluated at `(p(t+1), q(t))`.
#[derive(Debug, Clone, PartialEq)]
pub struct OuterRecord {
    pub iteration: usize,
    pub objective: f64,
    /// `‖D q‖∞`.
    pub coherence_term: f64,
    /// `λ ‖p·q − 1‖₂²`.
    pub penalty_term: f64,
    pub budget: f64,
    /// `max(0, ‖p‖₁ − m)`.
    pub budget_excess: f64,
    /// Largest distance of an entry of `p` outside `[τ, 1]`.
    pub box_violation: f64,
    /// `‖p(t+1) − p(t)‖₂ / ‖p(t)‖₂`.
    pub change: f64,
    pub q_iterations: usize,
    pub p_iterations: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct OptTrace {
    pub records: Vec<OuterRecord>,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptOutcome {
    pub profile: SamplingProfile,
    /// Final `p̂` as returned by the alternation, before any rescaling.
    pub raw: Vec<f64>,
    pub q: Vec<f64>,
    pub trace: OptTrace,
    /// `m − ‖p̂‖₁` when the budget was not saturated (beyond 1e-6).
    pub budget_deficit: Option<f64>,
}

/// Result of an inner solve.
#[derive(Debug, Clone, PartialEq)]
pub struct InnerSolve {
    pub x: Vec<f64>,
    pub iterations: usize,
}

pub fn objective(diag: &[f64], p: &[f64], q: &[f64], lambda: f64) -> f64 {
    coherence_term(diag, q) + lambda * penalty(p, q)
}

fn coherence_term(diag: &[f64], q: &[f64]) -> f64 {
    diag.iter().zip(q).map(|(d, v)| d * v.abs()).fold(0.0, f64::max)
}

fn penalty(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).map(|(a, b)| (a * b - 1.0) * (a * b - 1.0)).sum()
}

fn norm(x: &[f64]) -> f64 {
    libm::sqrt(x.iter().map(|v| v * v).sum())
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    libm::sqrt(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum())
}

fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// `argmin_q ‖D q‖∞ + λ ‖p·q − 1‖₂²`, started from `q = 1/p`.
pub fn q_step(p: &[f64], diag: &CoherenceDiagonal, cfg: &OptConfig) -> Result<InnerSolve> {
    let start: Vec<f64> = p.iter().map(|v| 1.0 / v).collect();
    q_step_from(p, diag.values(), cfg, &start)
}

/// Forward-backward iterations on the q-subproblem from a warm start.
///
/// The smooth part has gradient `2λ p·(p·q − 1)` and Lipschitz constant
/// `L = 2λ max p_i²`; the backward step is the prox of `L⁻¹‖D·‖∞`.
pub fn q_step_from(p: &[f64], diag: &[f64], cfg: &OptConfig, start: &[f64]) -> Result<InnerSolve> {
    let n = diag.len();
    check_len(n, p.len())?;
    check_len(n, start.len())?;
    if let Some((index, &value)) = p.iter().enumerate().find(|(_, &v)| !(v > 0.0)) {
        return Err(Error::InvalidProbability { index, value });
    }
    let lambda = cfg.lambda;
    let lipschitz = 2.0 * lambda * p.iter().map(|v| v * v).fold(0.0, f64::max);
    let step = 1.0 / lipschitz;
    let mut q = start.to_vec();
    let mut forward = vec_zeros(n);
    let mut change = f64::INFINITY;
    for it in 1..=cfg.max_inner {
        for i in 0..n {
            let grad = 2.0 * lambda * p[i] * (p[i] * q[i] - 1.0);
            forward[i] = q[i] - step * grad;
        }
        let next = prox_weighted_linf_diag(&forward, step, diag)?;
        change = distance(&next, &q) / norm(&q).max(f64::MIN_POSITIVE);
        q = next;
        if change <= cfg.inner_tol {
            return Ok(InnerSolve { x: q, iterations: it });
        }
    }
    Err(Error::NonConvergence { iterations: cfg.max_inner, residual: change })
}

/// `argmin_{p ∈ K_τ} ‖p·q − 1‖₂²`, started from `p = m/N`.
pub fn p_step(q: &[f64], cfg: &OptConfig) -> Result<InnerSolve> {
    let n = q.len();
    let start = alloc::vec![cfg.m / n as f64; n];
    p_step_from(q, cfg, &start)
}

/// Projected gradient on the p-subproblem, step `1/L` with `L = 2 max q_i²`.
pub fn p_step_from(q: &[f64], cfg: &OptConfig, start: &[f64]) -> Result<InnerSolve> {
    let n = q.len();
    check_len(n, start.len())?;
    let mut p = project_k_tau(start, cfg.tau, cfg.m)?;
    let lipschitz = 2.0 * q.iter().map(|v| v * v).fold(0.0, f64::max);
    if lipschitz == 0.0 {
        // Constant objective: any feasible point is optimal.
        return Ok(InnerSolve { x: p, iterations: 0 });
    }
    let step = 1.0 / lipschitz;
    let mut trial = vec_zeros(n);
    let mut change = f64::INFINITY;
    for it in 1..=cfg.max_inner {
        for i in 0..n {
            let grad = 2.0 * q[i] * (p[i] * q[i] - 1.0);
            trial[i] = p[i] - step * grad;
        }
        let next = project_k_tau(&trial, cfg.tau, cfg.m)?;
        change = distance(&next, &p) / norm(&p).max(f64::MIN_POSITIVE);
        p = next;
        if change <= cfg.inner_tol {
            return Ok(InnerSolve { x: p, iterations: it });
        }
    }
    Err(Error::NonConvergence { iterations: cfg.max_inner, residual: change })
}

fn vec_zeros(n: usize) -> Vec<f64> {
    alloc::vec![0.0; n]
}

/// Alternating minimization from `p(0) = m/N`.
///
/// Inner solves are warm-started from the previous outer iterate, which
/// keeps the joint objective nonincreasing. The loop ends when the relative
/// objective change drops to `outer_tol` or after `max_outer` rounds.
pub fn optimize_profile(diag: &CoherenceDiagonal, cfg: &OptConfig) -> Result<OptOutcome> {
    let d = diag.values();
    let n = d.len();
    cfg.validate(n)?;
    let mut p = alloc::vec![cfg.m / n as f64; n];
    let mut q: Vec<f64> = p.iter().map(|v| 1.0 / v).collect();
    let mut trace = OptTrace::default();
    let mut previous: Option<f64> = None;
    for iteration in 0..cfg.max_outer {
        let qs = q_step_from(&p, d, cfg, &q)?;
        q = qs.x;
        let ps = p_step_from(&q, cfg, &p)?;
        let change = distance(&ps.x, &p) / norm(&p);
        p = ps.x;

        let coherence = coherence_term(d, &q);
        let pen = cfg.lambda * penalty(&p, &q);
        let objective = coherence + pen;
        let budget: f64 = p.iter().sum();
        let box_violation = p
            .iter()
            .map(|v| (cfg.tau - v).max(v - 1.0).max(0.0))
            .fold(0.0, f64::max);
        trace.records.push(OuterRecord {
            iteration,
            objective,
            coherence_term: coherence,
            penalty_term: pen,
            budget,
            budget_excess: (budget - cfg.m).max(0.0),
            box_violation,
            change,
            q_iterations: qs.iterations,
            p_iterations: ps.iterations,
        });
        if let Some(prev) = previous {
            if (prev - objective).abs() <= cfg.outer_tol * prev.abs() {
                trace.converged = true;
                break;
            }
        }
        previous = Some(objective);
    }
    let budget: f64 = p.iter().sum();
    let budget_deficit = (budget < cfg.m - 1e-6).then(|| cfg.m - budget);
    let profile = if cfg.strict_admissible {
        normalize_to_budget(&p, cfg.m)?
    } else {
        SamplingProfile::new(p.clone(), cfg.m)?
    };
    Ok(OptOutcome { profile, raw: p, q, trace, budget_deficit })
}

/// [`optimize_profile`] with a support-averaged diagonal `C` in place of `B`.
pub fn optimize_profile_with_prior(c: &CoherenceDiagonal, cfg: &OptConfig) -> Result<OptOutcome> {
    use crate::coherence::DiagonalKind;
    if c.kind() != DiagonalKind::SupportAvg {
        return Err(Error::KindMismatch { expected: DiagonalKind::SupportAvg, found: c.kind() });
    }
    optimize_profile(c, cfg)
}
