//! Support datasets that supply prior information for the C diagonal.

use std::path::Path;

use rand::Rng;
use vds_core::sampling::weighted_support;
use vds_core::{Basis, BasisKind, Complex64};

use crate::error::{HarnessError, Result};
use crate::spec::DatasetFormat;

/// Supports of equal size `s`, 0-based, each sorted.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportDataset {
    pub supports: Vec<Vec<usize>>,
    pub s: usize,
    pub n: usize,
    /// Thresholded coefficient vectors, when the dataset came from values.
    pub coefficients: Option<Vec<Vec<f64>>>,
    pub note: String,
}

impl SupportDataset {
    pub fn from_supports(supports: Vec<Vec<usize>>, n: usize, note: impl Into<String>) -> Result<Self> {
        let first = supports.first().ok_or(vds_core::Error::EmptyDataset)?;
        let s = first.len();
        let mut sorted = Vec::with_capacity(supports.len());
        for (index, mut support) in supports.into_iter().enumerate() {
            if support.len() != s {
                return Err(vds_core::Error::SupportSize { index, expected: s, found: support.len() }.into());
            }
            if let Some(&index) = support.iter().find(|&&j| j >= n) {
                return Err(vds_core::Error::IndexOutOfRange { index, n }.into());
            }
            support.sort_unstable();
            if let Some(w) = support.windows(2).find(|w| w[0] == w[1]) {
                return Err(vds_core::Error::DuplicateIndex { index: w[0] }.into());
            }
            sorted.push(support);
        }
        Ok(SupportDataset { supports: sorted, s, n, coefficients: None, note: note.into() })
    }

    pub fn len(&self) -> usize {
        self.supports.len()
    }

    pub fn is_empty(&self) -> bool {
        self.supports.is_empty()
    }

    /// Removes entry `k`, returning the rest and the held-out support with
    /// its coefficients when available.
    pub fn split_holdout(&self, k: usize) -> Result<(SupportDataset, Vec<usize>, Option<Vec<f64>>)> {
        if k >= self.len() {
            return Err(HarnessError::Spec(format!("holdout {k} outside a dataset of {} entries", self.len())));
        }
        if self.len() < 2 {
            return Err(HarnessError::Spec("holdout needs at least two dataset entries".into()));
        }
        let mut rest = self.clone();
        let support = rest.supports.remove(k);
        let values = rest.coefficients.as_mut().map(|c| c.remove(k));
        rest.note = format!("{} (entry {k} held out)", self.note);
        Ok((rest, support, values))
    }
}

/// Indices of the `s` largest magnitudes; ties go to the lower index.
pub fn hard_threshold_support(values: &[f64], s: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].abs().total_cmp(&values[a].abs()).then(a.cmp(&b)));
    let mut support: Vec<usize> = order.into_iter().take(s).collect();
    support.sort_unstable();
    support
}

fn numbers<T: std::str::FromStr>(line: &str, origin: &str, k: usize) -> Result<Vec<T>> {
    line.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<T>().map_err(|_| HarnessError::parse(origin, k + 1, format!("cannot parse `{t}`"))))
        .collect()
}

/// Parses dataset text. Blank lines and `#` comments are skipped. Value
/// lines (coefficients or signals) that are identically zero are dropped as
/// background; `sparsity` is needed only for signals.
pub fn parse_support_dataset(
    text: &str,
    origin: &str,
    format: DatasetFormat,
    n: usize,
    s: usize,
    sparsity: &BasisKind,
) -> Result<SupportDataset> {
    let lines = text
        .lines()
        .enumerate()
        .map(|(k, l)| (k, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    match format {
        DatasetFormat::Indices => {
            let mut supports = Vec::new();
            for (k, line) in lines {
                let support: Vec<usize> = numbers(line, origin, k)?;
                if let Some(&j) = support.iter().find(|&&j| j >= n) {
                    return Err(HarnessError::parse(origin, k + 1, format!("index {j} outside 0..{n}")));
                }
                if let Some(first) = supports.first().map(Vec::len) {
                    if support.len() != first {
                        return Err(HarnessError::parse(
                            origin,
                            k + 1,
                            format!("support has {} indices, expected {first}", support.len()),
                        ));
                    }
                }
                supports.push(support);
            }
            SupportDataset::from_supports(supports, n, format!("{origin} (indices)"))
        }
        DatasetFormat::Coefficients | DatasetFormat::Signals => {
            if s > n {
                return Err(HarnessError::Spec(format!("threshold s = {s} exceeds n = {n}")));
            }
            let basis = match format {
                DatasetFormat::Signals => Some(Basis::new(sparsity.clone(), n)?),
                _ => None,
            };
            let mut supports = Vec::new();
            let mut kept = Vec::new();
            for (k, line) in lines {
                let values: Vec<f64> = numbers(line, origin, k)?;
                if values.len() != n {
                    return Err(HarnessError::parse(origin, k + 1, format!("{} values, expected {n}", values.len())));
                }
                if values.iter().all(|&v| v == 0.0) {
                    continue;
                }
                let coefficients = match &basis {
                    Some(b) => {
                        let x: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
                        // Real filters on a real line give real coefficients.
                        b.analyze(&x)?.iter().map(|c| c.re).collect()
                    }
                    None => values,
                };
                let support = hard_threshold_support(&coefficients, s);
                let mut thresholded = vec![0.0; n];
                for &j in &support {
                    thresholded[j] = coefficients[j];
                }
                supports.push(support);
                kept.push(thresholded);
            }
            let mut ds = SupportDataset::from_supports(supports, n, format!("{origin} ({}, s = {s})", format.tag()))?;
            ds.coefficients = Some(kept);
            Ok(ds)
        }
    }
}

pub fn ingest_support_dataset(
    path: &Path,
    format: DatasetFormat,
    n: usize,
    s: usize,
    sparsity: &BasisKind,
) -> Result<SupportDataset> {
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    parse_support_dataset(&text, &path.display().to_string(), format, n, s, sparsity)
}

/// Wavelet scale of a coefficient index in the `[a | d_coarse … d_fine]`
/// layout: 0 for the approximation entry, then `⌊log2 j⌋ + 1`.
pub fn wavelet_band(j: usize) -> u32 {
    if j == 0 { 0 } else { j.ilog2() + 1 }
}

/// Selection weights `2^(−decay·band(j))` of the MRI-like model.
pub fn scale_weights(n: usize, decay: f64) -> Vec<f64> {
    (0..n).map(|j| (-decay * wavelet_band(j) as f64).exp2()).collect()
}

/// Synthetic stand-in for wavelet supports of image lines: each support is
/// drawn without replacement with weights favouring coarse scales. Labeled
/// as synthetic in its note.
pub fn synthetic_mri_dataset<R: Rng + ?Sized>(
    n: usize,
    s: usize,
    lines: usize,
    decay: f64,
    rng: &mut R,
) -> Result<SupportDataset> {
    let weights = scale_weights(n, decay);
    let supports = (0..lines).map(|_| weighted_support(&weights, s, rng)).collect::<Result<Vec<_>, _>>()?;
    SupportDataset::from_supports(supports, n, format!("synthetic MRI-like supports (decay {decay}, {lines} lines)"))
}
