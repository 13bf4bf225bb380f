//! Projections and proximity operators used by the profile optimizer.
//!
//! All inputs here are real; the optimizer variables `p` and `q` never carry
//! a phase.

use alloc::vec;
use alloc::vec::Vec;

use crate::coherence::CoherenceDiagonal;
use crate::error::{Error, Result};

/// The set `{z : Σ w_i |z_i| ≤ radius}`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedL1Ball {
    weights: Vec<f64>,
    radius: f64,
}

impl WeightedL1Ball {
    pub fn new(weights: Vec<f64>, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::InvalidParameter { name: "radius", value: radius });
        }
        if let Some(&w) = weights.iter().find(|&&w| !(w > 0.0 && w.is_finite())) {
            return Err(Error::InvalidParameter { name: "weight", value: w });
        }
        Ok(WeightedL1Ball { weights, radius })
    }

    /// The dual-norm ball of `‖B·‖∞`: weights `1/B_ii`, radius 1.
    pub fn dual_of(diag: &[f64]) -> Result<Self> {
        WeightedL1Ball::new(diag.iter().map(|b| 1.0 / b).collect(), 1.0)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        weighted_l1(x, &self.weights) <= self.radius
    }
}

fn weighted_l1(x: &[f64], w: &[f64]) -> f64 {
    x.iter().zip(w).map(|(v, w)| w * v.abs()).sum()
}

/// Shrinks `|x_i|` by `θ w_i` with `θ` chosen so that the weighted ℓ1 norm
/// equals `radius`.
///
/// With `t_i = |x_i| / w_i` sorted decreasingly, the constraint function is
/// affine in `θ` between consecutive `t_i`; the first segment whose lower end
/// already meets the radius holds the threshold.
fn shrink_to_radius(x: &[f64], w: &[f64], radius: f64) -> Vec<f64> {
    if weighted_l1(x, w) <= radius {
        return x.to_vec();
    }
    let mut order: Vec<usize> = (0..x.len()).collect();
    let key = |i: usize| x[i].abs() / w[i];
    order.sort_unstable_by(|&a, &b| key(b).total_cmp(&key(a)));
    let mut s1 = 0.0;
    let mut s2 = 0.0;
    let mut theta = 0.0;
    for (k, &i) in order.iter().enumerate() {
        s1 += w[i] * x[i].abs();
        s2 += w[i] * w[i];
        theta = (s1 - radius) / s2;
        let next = order.get(k + 1).map_or(0.0, |&j| key(j));
        if theta >= next {
            break;
        }
    }
    x.iter()
        .zip(w)
        .map(|(&v, &wi)| {
            let mag = (v.abs() - theta * wi).max(0.0);
            if v < 0.0 { -mag } else { mag }
        })
        .collect()
}

/// Euclidean projection onto `{z : ‖z‖₁ ≤ r}`.
pub fn project_l1_ball(x: &[f64], r: f64) -> Result<Vec<f64>> {
    if !(r > 0.0) {
        return Err(Error::InvalidParameter { name: "radius", value: r });
    }
    Ok(shrink_to_radius(x, &vec![1.0; x.len()], r))
}

pub fn project_weighted_l1_ball(x: &[f64], ball: &WeightedL1Ball) -> Result<Vec<f64>> {
    if x.len() != ball.weights.len() {
        return Err(Error::DimensionMismatch { expected: ball.weights.len(), found: x.len() });
    }
    Ok(shrink_to_radius(x, &ball.weights, ball.radius))
}

/// `prox_{γ‖B·‖∞}(q) = q − γ proj_C(q/γ)` with `C = {x : ‖B⁻¹x‖₁ ≤ 1}`.
pub fn prox_weighted_linf(q: &[f64], gamma: f64, b: &CoherenceDiagonal) -> Result<Vec<f64>> {
    prox_weighted_linf_diag(q, gamma, b.values())
}

/// [`prox_weighted_linf`] on a raw positive diagonal.
pub fn prox_weighted_linf_diag(q: &[f64], gamma: f64, diag: &[f64]) -> Result<Vec<f64>> {
    if !(gamma > 0.0) {
        return Err(Error::InvalidParameter { name: "gamma", value: gamma });
    }
    let ball = WeightedL1Ball::dual_of(diag)?;
    let scaled: Vec<f64> = q.iter().map(|v| v / gamma).collect();
    let proj = project_weighted_l1_ball(&scaled, &ball)?;
    Ok(q.iter().zip(&proj).map(|(v, c)| v - gamma * c).collect())
}

pub fn project_box(x: &[f64], lo: f64, hi: f64) -> Result<Vec<f64>> {
    if !(lo <= hi) {
        return Err(Error::InvalidParameter { name: "lo", value: lo });
    }
    Ok(x.iter().map(|v| v.clamp(lo, hi)).collect())
}

fn check_k_tau(n: usize, tau: f64, m: f64) -> Result<()> {
    if !(tau > 0.0 && tau <= 1.0) {
        return Err(Error::InvalidParameter { name: "tau", value: tau });
    }
    if n as f64 * tau > m {
        return Err(Error::Infeasible { n, tau, m });
    }
    Ok(())
}

/// Euclidean projection onto `K_τ = {p ∈ [τ,1]^N : ‖p‖₁ ≤ m}`.
///
/// On the box every entry is positive, so the ℓ1 constraint is the halfspace
/// `Σ p_i ≤ m` and the projection is `clamp(x − θ, τ, 1)` for the smallest
/// `θ ≥ 0` meeting the budget. `θ` is located by sweeping the sorted points
/// where entries enter or leave the open box.
pub fn project_k_tau(x: &[f64], tau: f64, m: f64) -> Result<Vec<f64>> {
    check_k_tau(x.len(), tau, m)?;
    let clamp_at = |theta: f64| -> Vec<f64> { x.iter().map(|v| (v - theta).clamp(tau, 1.0)).collect() };
    let mut mass: f64 = x.iter().map(|v| v.clamp(tau, 1.0)).sum();
    if mass <= m {
        return Ok(clamp_at(0.0));
    }
    // (θ, slope change) events for θ > 0.
    let mut events: Vec<(f64, i64)> = Vec::with_capacity(2 * x.len());
    let mut free = 0i64;
    for &v in x {
        let (enter, leave) = (v - 1.0, v - tau);
        if enter > 0.0 {
            events.push((enter, 1));
        }
        if leave > 0.0 {
            events.push((leave, -1));
        }
        if enter <= 0.0 && leave > 0.0 {
            free += 1;
        }
    }
    events.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
    let mut theta = 0.0;
    for &(at, delta) in &events {
        let next = mass - free as f64 * (at - theta);
        if next <= m && free > 0 {
            break;
        }
        mass = next;
        theta = at;
        free += delta;
    }
    let theta = if free > 0 { theta + (mass - m) / free as f64 } else { theta };
    // Solve once more on the final active set to remove sweep round-off.
    let p = clamp_at(theta);
    let (mut fixed, mut free_sum, mut free_n) = (0.0, 0.0, 0usize);
    for (v, pi) in x.iter().zip(&p) {
        if *pi > tau && *pi < 1.0 {
            free_sum += v;
            free_n += 1;
        } else {
            fixed += pi;
        }
    }
    if free_n > 0 {
        let refined = (free_sum + fixed - m) / free_n as f64;
        let q = clamp_at(refined);
        if q.iter().zip(&p).all(|(a, b)| (*a > tau && *a < 1.0) == (*b > tau && *b < 1.0)) {
            return Ok(q);
        }
    }
    Ok(p)
}

/// Dykstra's alternating projections between `[τ,1]^N` and the ℓ1 ball of
/// radius `m`; converges to [`project_k_tau`]. Stops when successive iterates
/// move by at most `tol` (Euclidean) and the two half-steps agree to `tol`, or
/// after `max_iter` rounds.
pub fn project_k_tau_dykstra(x: &[f64], tau: f64, m: f64, tol: f64, max_iter: usize) -> Result<Vec<f64>> {
    check_k_tau(x.len(), tau, m)?;
    let n = x.len();
    let mut y = x.to_vec();
    let mut p = vec![0.0; n];
    let mut q = vec![0.0; n];
    for _ in 0..max_iter {
        let a: Vec<f64> = y.iter().zip(&p).map(|(y, p)| (y + p).clamp(tau, 1.0)).collect();
        for i in 0..n {
            p[i] += y[i] - a[i];
        }
        let shifted: Vec<f64> = a.iter().zip(&q).map(|(a, q)| a + q).collect();
        let b = shrink_to_radius(&shifted, &vec![1.0; n], m);
        for i in 0..n {
            q[i] = shifted[i] - b[i];
        }
        let change = libm::sqrt(b.iter().zip(&y).map(|(b, y)| (b - y) * (b - y)).sum());
        let gap = libm::sqrt(b.iter().zip(&a).map(|(b, a)| (b - a) * (b - a)).sum());
        y = b;
        if change <= tol && gap <= tol {
            break;
        }
    }
    Ok(y)
}
