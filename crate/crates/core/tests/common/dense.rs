//! Dense reference matrices built directly from each basis's closed form,
//! independent of the fast transforms.

use std::f64::consts::PI;

use vds_core::{BasisKind, Complex64};

/// Basis vectors as columns: `cols[k]` is the k-th basis vector.
pub fn basis_columns(kind: &BasisKind, n: usize) -> Vec<Vec<Complex64>> {
    let zero = Complex64::new(0.0, 0.0);
    match kind {
        BasisKind::Dirac => (0..n)
            .map(|k| {
                let mut e = vec![zero; n];
                e[k] = Complex64::new(1.0, 0.0);
                e
            })
            .collect(),
        BasisKind::Fourier => (0..n).map(|k| fourier_vector(k, n)).collect(),
        BasisKind::ModulatedFourier { modulation } => (0..n)
            .map(|k| {
                fourier_vector(k, n)
                    .into_iter()
                    .zip(modulation)
                    .map(|(f, s)| f * s.conj())
                    .collect()
            })
            .collect(),
        BasisKind::Hadamard => (0..n)
            .map(|k| {
                (0..n)
                    .map(|t| {
                        let sign = if (k & t).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                        Complex64::new(sign / (n as f64).sqrt(), 0.0)
                    })
                    .collect()
            })
            .collect(),
        BasisKind::Haar { levels: None } => haar_columns(n),
        BasisKind::Daubechies4 { levels: None } => {
            let s3 = 3f64.sqrt();
            let d = 4.0 * 2f64.sqrt();
            let h = [(1.0 + s3) / d, (3.0 + s3) / d, (3.0 - s3) / d, (1.0 - s3) / d];
            filter_bank_columns(&h, n)
        }
        other => panic!("no dense oracle for {other:?}"),
    }
}

fn fourier_vector(k: usize, n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|t| {
            let angle = 2.0 * PI * ((k * t) % n) as f64 / n as f64;
            Complex64::from_polar(1.0 / (n as f64).sqrt(), angle)
        })
        .collect()
}

/// Haar functions: index 0 is the constant, index `2^k + t` is the wavelet
/// of support length `N/2^k` starting at `t·N/2^k`, positive on its first half.
fn haar_columns(n: usize) -> Vec<Vec<Complex64>> {
    let mut cols = vec![vec![Complex64::new(1.0 / (n as f64).sqrt(), 0.0); n]];
    let levels = n.trailing_zeros();
    for k in 0..levels {
        let len = n >> k;
        let amp = 1.0 / (len as f64).sqrt();
        for t in 0..(1usize << k) {
            let mut v = vec![Complex64::new(0.0, 0.0); n];
            for (i, e) in v.iter_mut().enumerate().skip(t * len).take(len) {
                *e = Complex64::new(if i < t * len + len / 2 { amp } else { -amp }, 0.0);
            }
            cols.push(v);
        }
    }
    cols
}

/// Columns of the inverse of a full-depth periodized filter bank, from the
/// product of dense per-level analysis matrices.
fn filter_bank_columns(h: &[f64], n: usize) -> Vec<Vec<Complex64>> {
    let taps = h.len();
    let g: Vec<f64> = (0..taps)
        .map(|k| if k % 2 == 0 { h[taps - 1 - k] } else { -h[taps - 1 - k] })
        .collect();
    // Analysis matrix W, rows = coefficients.
    let mut w = identity(n);
    let mut len = n;
    while len >= 2 {
        let mut level = identity(n);
        for row in level.iter_mut().take(len) {
            row.iter_mut().for_each(|v| *v = 0.0);
        }
        let half = len / 2;
        for k in 0..half {
            for t in 0..taps {
                level[k][(2 * k + t) % len] += h[t];
                level[half + k][(2 * k + t) % len] += g[t];
            }
        }
        w = matmul(&level, &w);
        len /= 2;
    }
    // Orthonormal: synthesis columns are the rows of W.
    w.into_iter()
        .map(|row| row.into_iter().map(|v| Complex64::new(v, 0.0)).collect())
        .collect()
}

fn identity(n: usize) -> Vec<Vec<f64>> {
    (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect()
}

fn matmul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    (0..n)
        .map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum()).collect())
        .collect()
}

/// `⟨a, b⟩ = Σ conj(a_t) b_t`.
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// `A[i][j] = ⟨φ_i, ψ_j⟩`.
pub fn gram(sensing: &BasisKind, sparsity: &BasisKind, n: usize) -> Vec<Vec<Complex64>> {
    let phi = basis_columns(sensing, n);
    let psi = basis_columns(sparsity, n);
    phi.iter().map(|p| psi.iter().map(|q| inner(p, q)).collect()).collect()
}

pub fn matvec(a: &[Vec<Complex64>], x: &[Complex64]) -> Vec<Complex64> {
    a.iter().map(|row| row.iter().zip(x).map(|(r, v)| r * v).sum()).collect()
}
