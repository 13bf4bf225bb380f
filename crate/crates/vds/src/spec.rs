//! Experiment specification: a line-oriented `key = value` file.
//!
//! Every key in [`KEYS`] is also a flag of the `experiment` subcommand, and
//! [`ExperimentSpec::manifest`] writes all keys back out, so a manifest is
//! itself a spec that reruns the experiment.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use vds_core::BasisKind;

use crate::error::{HarnessError, Result};

/// Environment variable that overrides the `seed` key.
pub const SEED_ENV: &str = "VDS_SEED";

/// Spec keys with their help text, in manifest order.
pub const KEYS: &[(&str, &str)] = &[
    ("sensing", "sensing basis: dirac, fourier or hadamard"),
    ("sparsity", "sparsity basis: dirac, fourier, hadamard, haar[:levels] or daubechies4[:levels]"),
    ("n", "signal dimension"),
    ("s", "sparsity of the test signals"),
    ("m_grid", "comma-separated, strictly increasing measurement budgets"),
    ("trials", "Monte-Carlo trials per budget"),
    ("arms", "comma-separated profile sources: uniform, optimized_b, optimized_c, file, powerlaw, spread_spectrum"),
    ("seed", "base RNG seed (overridden by VDS_SEED)"),
    ("shared_seeds", "reuse each trial's seed across arms (true/false)"),
    ("workers", "worker threads; 0 uses every core"),
    ("outdir", "output directory"),
    ("signal", "test signal supports: uniform, mri_like or holdout"),
    ("lambda", "penalty weight of the profile optimizer"),
    ("tau", "profile floor"),
    ("max_outer", "outer iterations of the profile optimizer"),
    ("outer_tol", "relative objective change ending the optimizer"),
    ("inner_tol", "relative iterate change ending each subproblem"),
    ("max_inner", "iteration cap of each subproblem"),
    ("bp_tol", "basis pursuit fixed-point tolerance"),
    ("bp_max_iters", "basis pursuit iteration cap"),
    ("bp_relaxation", "Douglas-Rachford relaxation in (0, 2)"),
    ("bp_gamma_scale", "soft-threshold level relative to |y|/sqrt(|omega|)"),
    ("powerlaw_decay", "exponent of the powerlaw arm"),
    ("profile_file", "profile CSV (index, p) for the file arm"),
    ("prior", "support dataset for the C diagonal; empty draws a synthetic MRI-like set"),
    ("prior_format", "dataset format: indices, coefficients or signals"),
    ("prior_lines", "entries of the synthetic dataset"),
    ("prior_decay", "scale decay of the synthetic MRI-like supports"),
    ("holdout", "dataset entry used as the test signal when signal = holdout"),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Arm {
    Uniform,
    OptimizedB,
    OptimizedC,
    File,
    Powerlaw,
    SpreadSpectrum,
}

impl Arm {
    pub const ALL: [Arm; 6] =
        [Arm::Uniform, Arm::OptimizedB, Arm::OptimizedC, Arm::File, Arm::Powerlaw, Arm::SpreadSpectrum];

    pub fn tag(self) -> &'static str {
        match self {
            Arm::Uniform => "uniform",
            Arm::OptimizedB => "optimized_b",
            Arm::OptimizedC => "optimized_c",
            Arm::File => "file",
            Arm::Powerlaw => "powerlaw",
            Arm::SpreadSpectrum => "spread_spectrum",
        }
    }

    /// Stream component separating arms; never 0, which marks shared seeds.
    pub fn stream_id(self) -> u64 {
        Arm::ALL.iter().position(|&a| a == self).unwrap() as u64 + 1
    }
}

impl fmt::Display for Arm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Arm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        Arm::ALL.into_iter().find(|a| a.tag() == s).ok_or_else(|| format!("unknown arm `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignalModel {
    /// Uniformly random supports.
    Uniform,
    /// Supports drawn per trial from the synthetic MRI-like model.
    MriLike,
    /// One dataset entry, left out of the C diagonal.
    Holdout,
}

impl SignalModel {
    pub fn tag(self) -> &'static str {
        match self {
            SignalModel::Uniform => "uniform",
            SignalModel::MriLike => "mri_like",
            SignalModel::Holdout => "holdout",
        }
    }
}

impl FromStr for SignalModel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "uniform" => Ok(SignalModel::Uniform),
            "mri_like" => Ok(SignalModel::MriLike),
            "holdout" => Ok(SignalModel::Holdout),
            other => Err(format!("unknown signal model `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DatasetFormat {
    /// One support per line, as indices.
    Indices,
    /// One dense coefficient vector per line, hard-thresholded at `s`.
    Coefficients,
    /// One real signal per line, decomposed in the sparsity basis, then
    /// thresholded.
    Signals,
}

impl DatasetFormat {
    pub fn tag(self) -> &'static str {
        match self {
            DatasetFormat::Indices => "indices",
            DatasetFormat::Coefficients => "coefficients",
            DatasetFormat::Signals => "signals",
        }
    }
}

impl FromStr for DatasetFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "indices" => Ok(DatasetFormat::Indices),
            "coefficients" => Ok(DatasetFormat::Coefficients),
            "signals" => Ok(DatasetFormat::Signals),
            other => Err(format!("unknown dataset format `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub sensing: BasisKind,
    pub sparsity: BasisKind,
    pub n: usize,
    pub s: usize,
    pub m_grid: Vec<usize>,
    pub trials: usize,
    pub arms: Vec<Arm>,
    pub seed: u64,
    pub shared_seeds: bool,
    pub workers: usize,
    pub outdir: PathBuf,
    pub signal: SignalModel,
    pub lambda: f64,
    pub tau: f64,
    pub max_outer: usize,
    pub outer_tol: f64,
    pub inner_tol: f64,
    pub max_inner: usize,
    pub bp_tol: f64,
    pub bp_max_iters: usize,
    pub bp_relaxation: f64,
    pub bp_gamma_scale: f64,
    pub powerlaw_decay: f64,
    pub profile_file: Option<PathBuf>,
    pub prior: Option<PathBuf>,
    pub prior_format: DatasetFormat,
    pub prior_lines: usize,
    pub prior_decay: f64,
    pub holdout: usize,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        ExperimentSpec {
            sensing: BasisKind::Fourier,
            sparsity: BasisKind::HAAR,
            n: 256,
            s: 12,
            m_grid: vec![32, 48, 64, 80, 96, 112, 128, 160],
            trials: 100,
            arms: vec![Arm::Uniform, Arm::OptimizedB],
            seed: 1,
            shared_seeds: false,
            workers: 0,
            outdir: PathBuf::from("vds-out"),
            signal: SignalModel::Uniform,
            lambda: 0.05,
            tau: 1e-3,
            max_outer: 200,
            outer_tol: 1e-6,
            inner_tol: 1e-10,
            max_inner: 100_000,
            bp_tol: 1e-8,
            bp_max_iters: 20_000,
            bp_relaxation: 1.0,
            bp_gamma_scale: 0.1,
            powerlaw_decay: 2.0,
            profile_file: None,
            prior: None,
            prior_format: DatasetFormat::Indices,
            prior_lines: 150,
            prior_decay: 1.0,
            holdout: 0,
        }
    }
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T, String>
where
    T::Err: fmt::Display,
{
    value.trim().parse::<T>().map_err(|e| format!("`{key}`: cannot parse `{value}`: {e}"))
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>, String>
where
    T::Err: fmt::Display,
{
    value
        .split(',')
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .map(|v| parse_value(key, v))
        .collect()
}

fn optional_path(value: &str) -> Option<PathBuf> {
    let v = value.trim();
    (!v.is_empty()).then(|| PathBuf::from(v))
}

fn join<T: fmt::Display>(items: &[T]) -> String {
    items.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

fn path_text(p: &Option<PathBuf>) -> String {
    p.as_ref().map(|p| p.display().to_string()).unwrap_or_default()
}

impl ExperimentSpec {
    /// Sets one key from its text form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let v = value.trim();
        match key {
            "sensing" => self.sensing = parse_value(key, v)?,
            "sparsity" => self.sparsity = parse_value(key, v)?,
            "n" => self.n = parse_value(key, v)?,
            "s" => self.s = parse_value(key, v)?,
            "m_grid" => self.m_grid = parse_list(key, v)?,
            "trials" => self.trials = parse_value(key, v)?,
            "arms" => self.arms = parse_list(key, v)?,
            "seed" => self.seed = parse_value(key, v)?,
            "shared_seeds" => self.shared_seeds = parse_value(key, v)?,
            "workers" => self.workers = parse_value(key, v)?,
            "outdir" => self.outdir = PathBuf::from(v),
            "signal" => self.signal = parse_value(key, v)?,
            "lambda" => self.lambda = parse_value(key, v)?,
            "tau" => self.tau = parse_value(key, v)?,
            "max_outer" => self.max_outer = parse_value(key, v)?,
            "outer_tol" => self.outer_tol = parse_value(key, v)?,
            "inner_tol" => self.inner_tol = parse_value(key, v)?,
            "max_inner" => self.max_inner = parse_value(key, v)?,
            "bp_tol" => self.bp_tol = parse_value(key, v)?,
            "bp_max_iters" => self.bp_max_iters = parse_value(key, v)?,
            "bp_relaxation" => self.bp_relaxation = parse_value(key, v)?,
            "bp_gamma_scale" => self.bp_gamma_scale = parse_value(key, v)?,
            "powerlaw_decay" => self.powerlaw_decay = parse_value(key, v)?,
            "profile_file" => self.profile_file = optional_path(v),
            "prior" => self.prior = optional_path(v),
            "prior_format" => self.prior_format = parse_value(key, v)?,
            "prior_lines" => self.prior_lines = parse_value(key, v)?,
            "prior_decay" => self.prior_decay = parse_value(key, v)?,
            "holdout" => self.holdout = parse_value(key, v)?,
            _ => return Err(format!("unknown key `{key}`")),
        }
        Ok(())
    }

    /// Text form of one key, as accepted by [`ExperimentSpec::set`].
    pub fn get(&self, key: &str) -> Option<String> {
        let v = match key {
            "sensing" => self.sensing.to_string(),
            "sparsity" => self.sparsity.to_string(),
            "n" => self.n.to_string(),
            "s" => self.s.to_string(),
            "m_grid" => join(&self.m_grid),
            "trials" => self.trials.to_string(),
            "arms" => join(&self.arms),
            "seed" => self.seed.to_string(),
            "shared_seeds" => self.shared_seeds.to_string(),
            "workers" => self.workers.to_string(),
            "outdir" => self.outdir.display().to_string(),
            "signal" => self.signal.tag().to_string(),
            "lambda" => format!("{:?}", self.lambda),
            "tau" => format!("{:?}", self.tau),
            "max_outer" => self.max_outer.to_string(),
            "outer_tol" => format!("{:?}", self.outer_tol),
            "inner_tol" => format!("{:?}", self.inner_tol),
            "max_inner" => self.max_inner.to_string(),
            "bp_tol" => format!("{:?}", self.bp_tol),
            "bp_max_iters" => self.bp_max_iters.to_string(),
            "bp_relaxation" => format!("{:?}", self.bp_relaxation),
            "bp_gamma_scale" => format!("{:?}", self.bp_gamma_scale),
            "powerlaw_decay" => format!("{:?}", self.powerlaw_decay),
            "profile_file" => path_text(&self.profile_file),
            "prior" => path_text(&self.prior),
            "prior_format" => self.prior_format.tag().to_string(),
            "prior_lines" => self.prior_lines.to_string(),
            "prior_decay" => format!("{:?}", self.prior_decay),
            "holdout" => self.holdout.to_string(),
            _ => return None,
        };
        Some(v)
    }

    /// Parses spec text on top of the defaults. `#` starts a comment.
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let mut spec = ExperimentSpec::default();
        for (k, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) =
                line.split_once('=').ok_or_else(|| HarnessError::parse(origin, k + 1, "expected `key = value`"))?;
            spec.set(key.trim(), value).map_err(|m| HarnessError::parse(origin, k + 1, m))?;
        }
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }

    /// Applies `VDS_SEED` if set.
    pub fn apply_env(&mut self) -> Result<()> {
        if let Ok(v) = std::env::var(SEED_ENV) {
            self.seed = v.trim().parse().map_err(|_| HarnessError::Spec(format!("{SEED_ENV}=`{v}` is not a u64")))?;
        }
        Ok(())
    }

    /// Every key with its current value; parses back to `self`.
    pub fn manifest(&self) -> String {
        let mut out = format!("# vds {} experiment manifest\n", env!("CARGO_PKG_VERSION"));
        for (key, _) in KEYS {
            out.push_str(&format!("{key} = {}\n", self.get(key).unwrap()));
        }
        out
    }

    pub fn has_arm(&self, arm: Arm) -> bool {
        self.arms.contains(&arm)
    }

    /// Whether the run needs a support dataset.
    pub fn needs_dataset(&self) -> bool {
        self.has_arm(Arm::OptimizedC) || self.signal != SignalModel::Uniform
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(HarnessError::Spec(m));
        if self.trials == 0 {
            return fail("trials must be at least 1".into());
        }
        if self.m_grid.is_empty() {
            return fail("m_grid is empty".into());
        }
        if self.m_grid.windows(2).any(|w| w[0] >= w[1]) {
            return fail("m_grid must be strictly increasing".into());
        }
        if self.m_grid[0] == 0 || *self.m_grid.last().unwrap() > self.n {
            return fail(format!("every m must lie in 1..={}", self.n));
        }
        if self.s > self.n {
            return fail(format!("s = {} exceeds n = {}", self.s, self.n));
        }
        if self.arms.is_empty() {
            return fail("no arms".into());
        }
        let mut seen = self.arms.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.arms.len() {
            return fail("an arm is listed twice".into());
        }
        if self.has_arm(Arm::OptimizedB) || self.has_arm(Arm::OptimizedC) {
            let floor = self.n as f64 * self.tau;
            if let Some(m) = self.m_grid.iter().find(|&&m| (m as f64) < floor) {
                return fail(format!("m = {m} is below n·tau = {floor}"));
            }
        }
        if self.has_arm(Arm::File) && self.profile_file.is_none() {
            return fail("the file arm needs profile_file".into());
        }
        if self.has_arm(Arm::SpreadSpectrum) && self.sensing != BasisKind::Fourier {
            return fail("spread_spectrum compares against fourier sensing".into());
        }
        if !(self.powerlaw_decay >= 0.0) {
            return fail("powerlaw_decay must be nonnegative".into());
        }
        if self.prior.is_none() && self.needs_dataset() && self.prior_lines < 1 + (self.signal == SignalModel::Holdout) as usize {
            return fail("prior_lines too small".into());
        }
        if matches!(self.sensing, BasisKind::ModulatedFourier { .. }) {
            return fail("modulated sensing is only used by the spread_spectrum arm".into());
        }
        Ok(())
    }
}
