//! Monte-Carlo phase-transition experiments.
//!
//! Every trial is a pure function of `(seed, arm, m, trial)`: its RNG stream
//! is derived from those identifiers, so trials run on any number of workers
//! and are aggregated in a fixed order.

use std::path::Path;

use rayon::prelude::*;
use vds_core::coherence::{build_b, build_c};
use vds_core::optimize::{optimize_profile, optimize_profile_with_prior, OptConfig, OuterRecord};
use vds_core::profile::normalize_to_budget;
use vds_core::recovery::{basis_pursuit, is_recovered, BPConfig};
use vds_core::sampling::{
    bernoulli_select, derive_stream, gen_sparse_signal, random_signs, signal_on_support, weighted_support, RngSeed,
};
use vds_core::{Basis, BasisKind, BasisPair, Complex64, SamplingProfile};

use crate::dataset::{ingest_support_dataset, scale_weights, synthetic_mri_dataset, SupportDataset};
use crate::error::{HarnessError, Result};
use crate::io;
use crate::spec::{Arm, ExperimentSpec, SignalModel};

/// Stream of the synthetic prior dataset, apart from every trial stream.
const PRIOR_STREAM: u64 = u64::MAX;

#[derive(Debug, Clone, PartialEq)]
pub struct CurveRow {
    pub m: usize,
    pub trials: usize,
    pub successes: usize,
    /// Trials whose solver did not converge; counted as failures.
    pub solver_failures: usize,
    pub epsilon: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryCurve {
    pub arm: Arm,
    pub rows: Vec<CurveRow>,
}

impl RecoveryCurve {
    pub fn epsilon_at(&self, m: usize) -> Option<f64> {
        self.rows.iter().find(|r| r.m == m).map(|r| r.epsilon)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub arm: Arm,
    pub m: usize,
    pub record: OuterRecord,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArmProfiles {
    pub arm: Arm,
    /// `(m, p)` per budget of the grid.
    pub profiles: Vec<(usize, Vec<f64>)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    pub spec: ExperimentSpec,
    pub curves: Vec<RecoveryCurve>,
    pub profiles: Vec<ArmProfiles>,
    pub traces: Vec<TraceRow>,
}

impl ExperimentOutput {
    pub fn curve(&self, arm: Arm) -> Option<&RecoveryCurve> {
        self.curves.iter().find(|c| c.arm == arm)
    }
}

/// Wilson score interval at 95% confidence.
pub fn wilson_interval(successes: usize, trials: usize) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959_963_984_540_054_f64;
    let n = trials as f64;
    let p = successes as f64 / n;
    let denom = 1.0 + z * z / n;
    let center = (p + z * z / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// `p_i ∝ (1 − dist_i/(dist_max + 1))^decay`, rescaled onto budget `m`.
/// `dist` is the sensing basis's distance to DC; the `+1` keeps the farthest
/// index strictly positive.
pub fn powerlaw_profile(sensing: &Basis, m: f64, decay: f64) -> Result<SamplingProfile> {
    if !(decay >= 0.0) {
        return Err(HarnessError::Spec(format!("powerlaw decay {decay} must be nonnegative")));
    }
    let dist: Vec<f64> = (0..sensing.n()).map(|i| sensing.frequency_distance(i) as f64).collect();
    let dmax = dist.iter().cloned().fold(0.0, f64::max);
    let weights: Vec<f64> = dist.iter().map(|d| (1.0 - d / (dmax + 1.0)).powf(decay)).collect();
    Ok(normalize_to_budget(&weights, m)?)
}

pub fn opt_config(spec: &ExperimentSpec, m: f64) -> OptConfig {
    OptConfig {
        lambda: spec.lambda,
        tau: spec.tau,
        m,
        max_outer: spec.max_outer,
        outer_tol: spec.outer_tol,
        inner_tol: spec.inner_tol,
        max_inner: spec.max_inner,
        strict_admissible: false,
    }
}

pub fn bp_config(spec: &ExperimentSpec) -> BPConfig {
    BPConfig {
        max_iters: spec.bp_max_iters,
        tol: spec.bp_tol,
        relaxation: spec.bp_relaxation,
        gamma_scale: spec.bp_gamma_scale,
    }
}

/// The support dataset named by the spec, or a synthetic MRI-like one.
pub fn load_dataset(spec: &ExperimentSpec) -> Result<SupportDataset> {
    match &spec.prior {
        Some(path) => ingest_support_dataset(path, spec.prior_format, spec.n, spec.s, &spec.sparsity),
        None => {
            let mut rng = RngSeed::new(spec.seed, PRIOR_STREAM).rng();
            synthetic_mri_dataset(spec.n, spec.s, spec.prior_lines, spec.prior_decay, &mut rng)
        }
    }
}

/// How each trial draws its signal.
enum SignalSource {
    Uniform,
    Weighted(Vec<f64>),
    Fixed(Vec<Complex64>),
    FixedSupport(Vec<usize>),
}

struct Prepared {
    pair: BasisPair,
    signal: SignalSource,
    profiles: Vec<(Arm, Vec<SamplingProfile>)>,
    traces: Vec<TraceRow>,
}

fn prepare(spec: &ExperimentSpec) -> Result<Prepared> {
    let n = spec.n;
    let pair = BasisPair::new(spec.sensing.clone(), spec.sparsity.clone(), n)?;

    let mut dataset = if spec.needs_dataset() { Some(load_dataset(spec)?) } else { None };
    let signal = match spec.signal {
        SignalModel::Uniform => SignalSource::Uniform,
        SignalModel::MriLike => SignalSource::Weighted(scale_weights(n, spec.prior_decay)),
        SignalModel::Holdout => {
            let (rest, support, values) = dataset.as_ref().unwrap().split_holdout(spec.holdout)?;
            dataset = Some(rest);
            if support.len() != spec.s {
                log::warn!("held-out support has {} entries; spec s = {} is ignored", support.len(), spec.s);
            }
            match values {
                Some(v) => SignalSource::Fixed(v.iter().map(|&x| Complex64::new(x, 0.0)).collect()),
                None => SignalSource::FixedSupport(support),
            }
        }
    };

    let b = if spec.has_arm(Arm::OptimizedB) { Some(build_b(&pair)?) } else { None };
    let c = match (&dataset, spec.has_arm(Arm::OptimizedC)) {
        (Some(ds), true) => {
            log::info!("C diagonal from {} ({} supports, s = {})", ds.note, ds.len(), ds.s);
            Some(build_c(&pair, &ds.supports, ds.s)?)
        }
        _ => None,
    };
    let file_weights = match (&spec.profile_file, spec.has_arm(Arm::File)) {
        (Some(path), true) => {
            let w = io::read_profile(path)?;
            if w.len() != n {
                return Err(HarnessError::Spec(format!("{} has {} entries, expected {n}", path.display(), w.len())));
            }
            Some(w)
        }
        _ => None,
    };

    let mut profiles = Vec::new();
    let mut traces = Vec::new();
    for &arm in &spec.arms {
        let mut per_m = Vec::new();
        for &m in &spec.m_grid {
            let mf = m as f64;
            let profile = match arm {
                Arm::Uniform | Arm::SpreadSpectrum => SamplingProfile::uniform(n, mf)?,
                Arm::OptimizedB | Arm::OptimizedC => {
                    let cfg = opt_config(spec, mf);
                    let out = match arm {
                        Arm::OptimizedB => optimize_profile(b.as_ref().unwrap(), &cfg)?,
                        _ => optimize_profile_with_prior(c.as_ref().unwrap(), &cfg)?,
                    };
                    if let Some(deficit) = out.budget_deficit {
                        log::warn!("{arm} m = {m}: optimizer left the budget unsaturated by {deficit:.3e}");
                    }
                    if !out.trace.converged {
                        log::warn!("{arm} m = {m}: optimizer hit max_outer = {}", spec.max_outer);
                    }
                    traces.extend(out.trace.records.iter().map(|r| TraceRow { arm, m, record: r.clone() }));
                    normalize_to_budget(&out.raw, mf)?
                }
                Arm::File => normalize_to_budget(file_weights.as_ref().unwrap(), mf)?,
                Arm::Powerlaw => powerlaw_profile(pair.sensing(), mf, spec.powerlaw_decay)?,
            };
            per_m.push(profile);
        }
        profiles.push((arm, per_m));
    }
    Ok(Prepared { pair, signal, profiles, traces })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Outcome {
    Recovered,
    Missed,
    SolverFailure,
}

/// Per-trial stream id. Shared seeds drop the arm so that every arm sees
/// the same signal for a given `(m, trial)`.
pub fn trial_stream(arm: Arm, m: usize, trial: usize, shared: bool) -> u64 {
    let arm_id = if shared { 0 } else { arm.stream_id() };
    derive_stream(&[arm_id, m as u64, trial as u64])
}

fn draw_signal<R: rand::Rng + ?Sized>(spec: &ExperimentSpec, source: &SignalSource, rng: &mut R) -> Result<Vec<Complex64>> {
    Ok(match source {
        SignalSource::Uniform => gen_sparse_signal(spec.n, spec.s, rng)?.into_alpha(),
        SignalSource::Weighted(w) => {
            let support = weighted_support(w, spec.s, rng)?;
            signal_on_support(spec.n, support, rng).into_alpha()
        }
        SignalSource::Fixed(alpha) => alpha.clone(),
        SignalSource::FixedSupport(support) => signal_on_support(spec.n, support.clone(), rng).into_alpha(),
    })
}

fn run_trial(spec: &ExperimentSpec, prep: &Prepared, arm: Arm, profile: &SamplingProfile, m: usize, trial: usize) -> Result<Outcome> {
    let mut rng = RngSeed::new(spec.seed, trial_stream(arm, m, trial, spec.shared_seeds)).rng();
    let alpha = draw_signal(spec, &prep.signal, &mut rng)?;
    let modulated;
    let pair = if arm == Arm::SpreadSpectrum {
        let signs = random_signs(spec.n, &mut rng);
        modulated = BasisPair::new(BasisKind::modulated_signs(&signs), spec.sparsity.clone(), spec.n)?;
        &modulated
    } else {
        &prep.pair
    };
    let omega = bernoulli_select(profile, &mut rng);
    let y = pair.apply_masked(&omega, &alpha)?;
    let sol = basis_pursuit(&y, &omega, pair, &bp_config(spec))?;
    if !sol.converged {
        log::warn!("{arm} m = {m} trial {trial}: solver stopped at residual {:.3e}", sol.residual);
        return Ok(Outcome::SolverFailure);
    }
    Ok(if is_recovered(&alpha, &sol.alpha)? { Outcome::Recovered } else { Outcome::Missed })
}

/// Runs every arm over the m-grid.
pub fn run_phase_transition(spec: &ExperimentSpec) -> Result<ExperimentOutput> {
    spec.validate()?;
    let prep = prepare(spec)?;
    let items: Vec<(usize, usize, usize)> = (0..prep.profiles.len())
        .flat_map(|a| (0..spec.m_grid.len()).flat_map(move |k| (0..spec.trials).map(move |t| (a, k, t))))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(spec.workers).build()?;
    let outcomes: Vec<Outcome> = pool.install(|| {
        items
            .par_iter()
            .map(|&(a, k, t)| {
                let (arm, profiles) = &prep.profiles[a];
                run_trial(spec, &prep, *arm, &profiles[k], spec.m_grid[k], t).unwrap_or_else(|e| {
                    log::error!("{arm} m = {} trial {t}: {e}", spec.m_grid[k]);
                    Outcome::SolverFailure
                })
            })
            .collect()
    });

    let mut curves = Vec::new();
    let mut chunks = outcomes.chunks(spec.trials);
    for (arm, _) in &prep.profiles {
        let mut rows = Vec::new();
        for &m in &spec.m_grid {
            let chunk = chunks.next().unwrap();
            let successes = chunk.iter().filter(|&&o| o == Outcome::Recovered).count();
            let solver_failures = chunk.iter().filter(|&&o| o == Outcome::SolverFailure).count();
            let (ci_low, ci_high) = wilson_interval(successes, spec.trials);
            let epsilon = successes as f64 / spec.trials as f64;
            log::info!("{arm} m = {m}: {successes}/{} recovered", spec.trials);
            rows.push(CurveRow { m, trials: spec.trials, successes, solver_failures, epsilon, ci_low, ci_high });
        }
        curves.push(RecoveryCurve { arm: *arm, rows });
    }
    let profiles = prep
        .profiles
        .iter()
        .map(|(arm, ps)| ArmProfiles {
            arm: *arm,
            profiles: spec.m_grid.iter().zip(ps).map(|(&m, p)| (m, p.p().to_vec())).collect(),
        })
        .collect();
    Ok(ExperimentOutput { spec: spec.clone(), curves, profiles, traces: prep.traces })
}

const TRACE_HEADER: [&str; 12] = [
    "arm",
    "m",
    "iteration",
    "objective",
    "coherence_term",
    "penalty_term",
    "budget",
    "budget_excess",
    "box_violation",
    "change",
    "q_iterations",
    "p_iterations",
];

pub fn write_trace(path: &Path, rows: &[TraceRow]) -> Result<()> {
    io::write_rows(
        path,
        &TRACE_HEADER,
        rows.iter().map(|t| {
            let r = &t.record;
            vec![
                t.arm.tag().to_string(),
                t.m.to_string(),
                r.iteration.to_string(),
                io::fmt_real(r.objective),
                io::fmt_real(r.coherence_term),
                io::fmt_real(r.penalty_term),
                io::fmt_real(r.budget),
                io::fmt_real(r.budget_excess),
                io::fmt_real(r.box_violation),
                io::fmt_real(r.change),
                r.q_iterations.to_string(),
                r.p_iterations.to_string(),
            ]
        }),
    )
}

pub fn write_curve(path: &Path, curve: &RecoveryCurve) -> Result<()> {
    io::write_rows(
        path,
        &["m", "trials", "successes", "solver_failures", "epsilon", "ci_low", "ci_high"],
        curve.rows.iter().map(|r| {
            vec![
                r.m.to_string(),
                r.trials.to_string(),
                r.successes.to_string(),
                r.solver_failures.to_string(),
                io::fmt_real(r.epsilon),
                io::fmt_real(r.ci_low),
                io::fmt_real(r.ci_high),
            ]
        }),
    )
}

/// Writes curves, profiles, the optimizer trace, the manifest and a plot
/// into `outdir`, creating it if needed.
pub fn emit_outputs(out: &ExperimentOutput, outdir: &Path) -> Result<()> {
    std::fs::create_dir_all(outdir).map_err(|e| HarnessError::io(outdir, e))?;
    for curve in &out.curves {
        write_curve(&outdir.join(format!("curve_{}.csv", curve.arm)), curve)?;
    }
    for p in &out.profiles {
        io::write_profiles_long(&outdir.join(format!("profile_{}.csv", p.arm)), &p.profiles)?;
    }
    write_trace(&outdir.join("trace.csv"), &out.traces)?;
    io::write_text(&outdir.join("manifest.txt"), &out.spec.manifest())?;
    io::write_text(&outdir.join("plot.svg"), &crate::plot::render(out))?;
    Ok(())
}
