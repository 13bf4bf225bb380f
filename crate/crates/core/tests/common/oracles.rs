//! Brute-force references for the projections and prox operators.

use super::{dist2, solve};

/// Projection onto the weighted cross-polytope `conv{±(r/w_k) e_k}` by
/// projecting onto the affine hull of every face and keeping the closest
/// point whose barycentric weights are nonnegative.
pub fn polytope_projection(x: &[f64], w: &[f64], r: f64) -> Vec<f64> {
    let n = x.len();
    if x.iter().zip(w).map(|(v, w)| w * v.abs()).sum::<f64>() <= r {
        return x.to_vec();
    }
    let mut best: Option<(f64, Vec<f64>)> = None;
    // Each coordinate is absent, +vertex, or -vertex.
    for code in 1..3usize.pow(n as u32) {
        let mut verts: Vec<(usize, f64)> = Vec::new();
        let mut c = code;
        for k in 0..n {
            match c % 3 {
                1 => verts.push((k, r / w[k])),
                2 => verts.push((k, -r / w[k])),
                _ => {}
            }
            c /= 3;
        }
        let d = verts.len();
        // KKT of min ‖Σ c_k v_k − x‖² s.t. Σ c_k = 1.
        let mut a = vec![vec![0.0; d + 1]; d + 1];
        let mut b = vec![0.0; d + 1];
        for (i, &(ki, vi)) in verts.iter().enumerate() {
            for (j, &(kj, vj)) in verts.iter().enumerate() {
                a[i][j] = if ki == kj { vi * vj } else { 0.0 };
            }
            a[i][d] = 1.0;
            a[d][i] = 1.0;
            b[i] = vi * x[ki];
        }
        b[d] = 1.0;
        let Some(sol) = solve(a, b) else { continue };
        if sol[..d].iter().any(|&c| c < -1e-12) {
            continue;
        }
        let mut point = vec![0.0; n];
        for (&(k, v), c) in verts.iter().zip(&sol) {
            point[k] += c * v;
        }
        let dist = dist2(&point, x);
        if best.as_ref().map_or(true, |(bd, _)| dist < *bd) {
            best = Some((dist, point));
        }
    }
    best.unwrap().1
}

pub fn linf_objective(u: &[f64], q: &[f64], gamma: f64, b: &[f64]) -> f64 {
    0.5 * dist2(u, q) + gamma * u.iter().zip(b).map(|(u, b)| b * u.abs()).fold(0.0, f64::max)
}

/// Prox of `γ max_i b_i|u_i|` via its epigraph: for a level `t` the best `u`
/// clips `|q_i|` at `t/b_i`; the cost is convex in `t`, minimized by
/// ternary search.
pub fn linf_prox_oracle(q: &[f64], gamma: f64, b: &[f64]) -> Vec<f64> {
    let at = |t: f64| -> Vec<f64> {
        q.iter().zip(b).map(|(&v, &bi)| v.signum() * v.abs().min(t / bi)).collect()
    };
    let cost = |t: f64| {
        let u = at(t);
        0.5 * dist2(&u, q) + gamma * t
    };
    let (mut lo, mut hi) = (0.0, q.iter().zip(b).map(|(v, b)| v.abs() * b).fold(0.0, f64::max));
    for _ in 0..300 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if cost(m1) <= cost(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    at(0.5 * (lo + hi))
}

/// Projection onto `[τ,1]^N ∩ {Σ p ≤ m}`: every coordinate sits at τ, at 1, or
/// is free; the budget is either slack or tight. Each pattern fixes a unique
/// candidate; the closest feasible candidate is the projection.
pub fn k_tau_oracle(x: &[f64], tau: f64, m: f64) -> Vec<f64> {
    let n = x.len();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for code in 0..3usize.pow(n as u32) {
        let mut state = vec![0u8; n];
        let mut c = code;
        for s in state.iter_mut() {
            *s = (c % 3) as u8;
            c /= 3;
        }
        for tight in [false, true] {
            let fixed: f64 = state.iter().map(|&s| match s { 1 => tau, 2 => 1.0, _ => 0.0 }).sum();
            let free: Vec<usize> = (0..n).filter(|&i| state[i] == 0).collect();
            let theta = if tight {
                if free.is_empty() {
                    continue;
                }
                (free.iter().map(|&i| x[i]).sum::<f64>() + fixed - m) / free.len() as f64
            } else {
                0.0
            };
            let cand: Vec<f64> = (0..n)
                .map(|i| match state[i] { 1 => tau, 2 => 1.0, _ => x[i] - theta })
                .collect();
            let feasible = cand.iter().all(|&v| v >= tau - 1e-12 && v <= 1.0 + 1e-12)
                && cand.iter().sum::<f64>() <= m + 1e-12;
            if !feasible {
                continue;
            }
            let dist = dist2(&cand, x);
            if best.as_ref().map_or(true, |(bd, _)| dist < *bd) {
                best = Some((dist, cand));
            }
        }
    }
    best.unwrap().1
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
