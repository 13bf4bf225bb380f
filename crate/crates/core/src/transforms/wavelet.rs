//! Periodized orthonormal two-channel filter banks.
//!
//! Coefficients are laid out as `[a_L | d_L | d_{L-1} | ... | d_1]` where
//! `a_L` is the coarsest approximation band and `d_1` the finest detail band.
//! At full depth `a_L` is a single coefficient at index 0.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

const FRAC_1_SQRT_2: f64 = core::f64::consts::FRAC_1_SQRT_2;

pub(crate) const HAAR: [f64; 2] = [FRAC_1_SQRT_2, FRAC_1_SQRT_2];

/// Four-tap Daubechies scaling filter, `(1+√3, 3+√3, 3−√3, 1−√3) / (4√2)`.
pub(crate) fn daubechies4() -> [f64; 4] {
    let s3 = libm::sqrt(3.0);
    let d = 4.0 * core::f64::consts::SQRT_2;
    [(1.0 + s3) / d, (3.0 + s3) / d, (3.0 - s3) / d, (1.0 - s3) / d]
}

#[derive(Debug, Clone)]
pub(crate) struct FilterBank {
    low: Vec<f64>,
    high: Vec<f64>,
    levels: u32,
}

impl FilterBank {
    pub(crate) fn new(low: &[f64], levels: u32) -> Self {
        let len = low.len();
        // Quadrature mirror: g[k] = (-1)^k h[L-1-k].
        let high = (0..len)
            .map(|k| if k % 2 == 0 { low[len - 1 - k] } else { -low[len - 1 - k] })
            .collect();
        FilterBank { low: low.to_vec(), high, levels }
    }

    pub(crate) fn analyze(&self, buf: &mut [Complex64]) {
        let mut scratch = vec![Complex64::new(0.0, 0.0); buf.len()];
        let mut n = buf.len();
        for _ in 0..self.levels {
            self.split(&buf[..n], &mut scratch[..n]);
            buf[..n].copy_from_slice(&scratch[..n]);
            n /= 2;
        }
    }

    pub(crate) fn synthesize(&self, buf: &mut [Complex64]) {
        let mut scratch = vec![Complex64::new(0.0, 0.0); buf.len()];
        let mut n = buf.len() >> (self.levels - 1);
        for _ in 0..self.levels {
            self.merge(&buf[..n], &mut scratch[..n]);
            buf[..n].copy_from_slice(&scratch[..n]);
            n *= 2;
        }
    }

    /// One analysis level: `x` of length `n` into `[approx | detail]`.
    fn split(&self, x: &[Complex64], out: &mut [Complex64]) {
        let n = x.len();
        let half = n / 2;
        for k in 0..half {
            let mut a = Complex64::new(0.0, 0.0);
            let mut d = Complex64::new(0.0, 0.0);
            for (t, (&h, &g)) in self.low.iter().zip(&self.high).enumerate() {
                let v = x[(2 * k + t) % n];
                a += v * h;
                d += v * g;
            }
            out[k] = a;
            out[half + k] = d;
        }
    }

    /// Exact adjoint of [`split`](Self::split).
    fn merge(&self, c: &[Complex64], out: &mut [Complex64]) {
        let n = c.len();
        let half = n / 2;
        out.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        for k in 0..half {
            let a = c[k];
            let d = c[half + k];
            for (t, (&h, &g)) in self.low.iter().zip(&self.high).enumerate() {
                out[(2 * k + t) % n] += a * h + d * g;
            }
        }
    }
}
