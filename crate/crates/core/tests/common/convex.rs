//! Dense references for `min ‖α‖₁ s.t. Aα = y`.

use vds_core::recovery::soft_threshold;
use vds_core::Complex64;

type C = Complex64;

pub fn complex_solve(mut a: Vec<Vec<C>>, mut b: Vec<C>) -> Vec<C> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm())).unwrap();
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                let v = a[col][k];
                a[row][k] -= f * v;
            }
            let v = b[col];
            b[row] -= f * v;
        }
    }
    let mut x = vec![C::new(0.0, 0.0); n];
    for row in (0..n).rev() {
        let tail: C = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - tail) / a[row][row];
    }
    x
}

/// Iteratively reweighted least squares for `min ‖α‖₁ s.t. Aα = y`:
/// `α ← W A†u`, `u = (A W A†)⁻¹ y`, `W = diag(√(|α_j|² + ε²))`, `ε` shrinking.
///
/// Returns the primal iterate and a dual lower bound: `u` rescaled so that
/// `max_j |(A†u)_j| ≤ 1` gives `Re⟨u, y⟩ ≤ ‖α‖₁` for every feasible `α`.
pub fn irls(a: &[Vec<C>], y: &[C], iterations: usize) -> (Vec<C>, f64) {
    let (rows, n) = (a.len(), a[0].len());
    let mut alpha = vec![C::new(1.0, 0.0); n];
    let mut eps = 1.0;
    let mut lower = f64::NEG_INFINITY;
    for _ in 0..iterations {
        let w: Vec<f64> = alpha.iter().map(|v| (v.norm_sqr() + eps * eps).sqrt()).collect();
        let mut m = vec![vec![C::new(0.0, 0.0); rows]; rows];
        for r in 0..rows {
            for c in 0..rows {
                m[r][c] = (0..n).map(|j| a[r][j] * w[j] * a[c][j].conj()).sum();
            }
        }
        let u = complex_solve(m, y.to_vec());
        let back: Vec<C> = (0..n).map(|j| (0..rows).map(|r| a[r][j].conj() * u[r]).sum()).collect();
        for j in 0..n {
            alpha[j] = back[j] * w[j];
        }
        let scale = back.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let bound = u.iter().zip(y).map(|(u, y)| (u.conj() * y).re).sum::<f64>() / scale;
        lower = lower.max(bound);
        eps = (eps * 0.7).max(1e-13);
    }
    (alpha, lower)
}

/// `Re⟨λ, y⟩ / max(1, ‖A†λ‖∞)`, a lower bound on `min ‖α‖₁` for any `λ`.
pub fn dual_bound(a: &[Vec<C>], y: &[C], lambda: &[C]) -> f64 {
    let n = a[0].len();
    let scale = (0..n)
        .map(|j| a.iter().zip(lambda).map(|(row, l)| row[j].conj() * l).sum::<C>().norm())
        .fold(1.0, f64::max);
    lambda.iter().zip(y).map(|(l, y)| (l.conj() * y).re).sum::<f64>() / scale
}

/// Multiplier from Chambolle–Pock on the dense problem
/// `min ‖α‖₁ + ι{Aα = y}`; `‖A‖ = 1` since the rows are orthonormal.
pub fn primal_dual_multiplier(a: &[Vec<C>], y: &[C], iterations: usize) -> Vec<C> {
    let (rows, n) = (a.len(), a[0].len());
    let (tau, sigma) = (0.99, 0.99);
    let mut alpha = vec![C::new(0.0, 0.0); n];
    let mut lambda = vec![C::new(0.0, 0.0); rows];
    for _ in 0..iterations {
        let mut next: Vec<C> = (0..n)
            .map(|j| alpha[j] - (0..rows).map(|r| a[r][j].conj() * lambda[r]).sum::<C>() * tau)
            .collect();
        soft_threshold(&mut next, tau);
        for r in 0..rows {
            let extra: C = (0..n).map(|j| a[r][j] * (next[j] * 2.0 - alpha[j])).sum();
            lambda[r] += (extra - y[r]) * sigma;
        }
        alpha = next;
    }
    lambda.iter().map(|l| -l).collect()
}
