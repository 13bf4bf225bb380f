use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{ArgMatches, Args, FromArgMatches, Parser, Subcommand};
use vds::dataset::{ingest_support_dataset, synthetic_mri_dataset, SupportDataset};
use vds::experiment::{emit_outputs, opt_config, run_phase_transition, write_trace, TraceRow};
use vds::spec::{Arm, DatasetFormat, ExperimentSpec, KEYS, SEED_ENV};
use vds::io;
use vds_core::coherence::{build_b, build_c, mu_profile_from_b, mu_profile_support, CoherenceDiagonal};
use vds_core::optimize::{optimize_profile, optimize_profile_with_prior, OptOutcome};
use vds_core::profile::normalize_to_budget;
use vds_core::recovery::{basis_pursuit, dedup_measurements, is_recovered, BPConfig};
use vds_core::sampling::{bernoulli_select, gen_sparse_signal, iid_select, RngSeed};
use vds_core::{BasisKind, BasisPair, Complex64, SamplingProfile};

#[derive(Parser)]
#[command(name = "vds", version, about = "Coherence-driven variable density sampling")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the B diagonal, and C when a support dataset is given.
    Coherence(CoherenceArgs),
    /// Optimize a sampling profile for a budget.
    Optimize(OptimizeArgs),
    /// Draw a sampling pattern from a profile.
    Sample(SampleArgs),
    /// Sample, measure and reconstruct one sparse signal.
    Recover(RecoverArgs),
    /// Run a phase-transition experiment from a spec file.
    Experiment(ExperimentArgs),
    /// Build C from a support dataset and optimize the profile with it.
    MriPrior(MriPriorArgs),
}

#[derive(Args)]
struct PairArgs {
    #[arg(long, default_value = "fourier")]
    sensing: BasisKind,
    #[arg(long, default_value = "haar")]
    sparsity: BasisKind,
    #[arg(long, default_value_t = 256)]
    n: usize,
}

impl PairArgs {
    fn pair(&self) -> anyhow::Result<BasisPair> {
        Ok(BasisPair::new(self.sensing.clone(), self.sparsity.clone(), self.n)?)
    }
}

#[derive(Args)]
struct PriorArgs {
    /// Support dataset; without it a synthetic MRI-like set is drawn.
    #[arg(long)]
    prior: Option<PathBuf>,
    #[arg(long, default_value = "indices")]
    prior_format: DatasetFormat,
    /// Threshold level for value datasets and size of synthetic supports.
    #[arg(long, default_value_t = 12)]
    s: usize,
    #[arg(long, default_value_t = 150)]
    prior_lines: usize,
    #[arg(long, default_value_t = 1.0)]
    prior_decay: f64,
    #[arg(long, default_value_t = 1, env = SEED_ENV)]
    seed: u64,
}

impl PriorArgs {
    fn dataset(&self, pair: &PairArgs) -> anyhow::Result<SupportDataset> {
        Ok(match &self.prior {
            Some(path) => ingest_support_dataset(path, self.prior_format, pair.n, self.s, &pair.sparsity)?,
            None => {
                let mut rng = RngSeed::new(self.seed, u64::MAX).rng();
                synthetic_mri_dataset(pair.n, self.s, self.prior_lines, self.prior_decay, &mut rng)?
            }
        })
    }
}

#[derive(Args)]
struct CoherenceArgs {
    #[command(flatten)]
    pair: PairArgs,
    /// Also build C from a support dataset file.
    #[arg(long)]
    prior: Option<PathBuf>,
    #[arg(long, default_value = "indices")]
    prior_format: DatasetFormat,
    #[arg(long, default_value_t = 12)]
    s: usize,
    #[arg(long, short)]
    out: PathBuf,
}

#[derive(Args)]
struct OptArgs {
    #[arg(long)]
    m: f64,
    #[arg(long, default_value_t = 0.05)]
    lambda: f64,
    #[arg(long, default_value_t = 1e-3)]
    tau: f64,
    #[arg(long, default_value_t = 200)]
    max_outer: usize,
    /// Rescale the result so that its entries sum to m.
    #[arg(long)]
    strict: bool,
}

impl OptArgs {
    fn config(&self) -> vds_core::optimize::OptConfig {
        let spec = ExperimentSpec { lambda: self.lambda, tau: self.tau, max_outer: self.max_outer, ..Default::default() };
        let mut cfg = opt_config(&spec, self.m);
        cfg.strict_admissible = self.strict;
        cfg
    }
}

#[derive(Args)]
struct OptimizeArgs {
    #[command(flatten)]
    pair: PairArgs,
    #[command(flatten)]
    opt: OptArgs,
    /// Support dataset; optimizes with C instead of B.
    #[arg(long)]
    prior: Option<PathBuf>,
    #[arg(long, default_value = "indices")]
    prior_format: DatasetFormat,
    #[arg(long, default_value_t = 12)]
    s: usize,
    #[arg(long, short)]
    out: PathBuf,
    /// Optimizer trace CSV.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum Model {
    Bernoulli,
    Iid,
}

#[derive(Args)]
struct SampleArgs {
    /// Profile CSV (index, p); uniform when absent.
    #[arg(long)]
    profile: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: f64,
    #[arg(long, value_enum, default_value = "bernoulli")]
    model: Model,
    #[arg(long, default_value_t = 1, env = SEED_ENV)]
    seed: u64,
    #[arg(long, default_value_t = 0)]
    stream: u64,
    #[arg(long, short)]
    out: PathBuf,
}

#[derive(Args)]
struct RecoverArgs {
    #[command(flatten)]
    pair: PairArgs,
    #[arg(long, default_value_t = 12)]
    s: usize,
    #[arg(long)]
    m: f64,
    /// Profile CSV (index, p), rescaled to m; uniform when absent.
    #[arg(long)]
    profile: Option<PathBuf>,
    /// Signal CSV (index, re, im) of sparsity coefficients; random when absent.
    #[arg(long)]
    signal: Option<PathBuf>,
    #[arg(long, default_value_t = 1, env = SEED_ENV)]
    seed: u64,
    #[arg(long, default_value_t = 0)]
    stream: u64,
    #[arg(long, default_value_t = 1e-8)]
    bp_tol: f64,
    #[arg(long, default_value_t = 20_000)]
    bp_max_iters: usize,
    /// Directory for signal.csv, estimate.csv and omega.csv.
    #[arg(long)]
    outdir: Option<PathBuf>,
}

/// Spec file plus one `--<key>` flag per spec key.
struct ExperimentArgs {
    spec: Option<PathBuf>,
    overrides: Vec<(String, String)>,
}

impl FromArgMatches for ExperimentArgs {
    fn from_arg_matches(m: &ArgMatches) -> Result<Self, clap::Error> {
        let overrides = KEYS
            .iter()
            .filter_map(|(k, _)| m.get_one::<String>(k).map(|v| (k.to_string(), v.clone())))
            .collect();
        Ok(ExperimentArgs { spec: m.get_one::<PathBuf>("spec").cloned(), overrides })
    }

    fn update_from_arg_matches(&mut self, m: &ArgMatches) -> Result<(), clap::Error> {
        *self = Self::from_arg_matches(m)?;
        Ok(())
    }
}

impl Args for ExperimentArgs {
    fn augment_args(cmd: clap::Command) -> clap::Command {
        let cmd = cmd.arg(
            clap::Arg::new("spec")
                .long("spec")
                .value_parser(clap::value_parser!(PathBuf))
                .help("spec file of `key = value` lines"),
        );
        KEYS.iter().fold(cmd, |cmd, (key, help)| cmd.arg(clap::Arg::new(*key).long(*key).value_name("VALUE").help(*help)))
    }

    fn augment_args_for_update(cmd: clap::Command) -> clap::Command {
        Self::augment_args(cmd)
    }
}

#[derive(Args)]
struct MriPriorArgs {
    #[command(flatten)]
    pair: PairArgs,
    #[command(flatten)]
    prior: PriorArgs,
    #[command(flatten)]
    opt: OptArgs,
    /// Output directory for profile_c.csv, profile_b.csv, coherence.csv and trace.csv.
    #[arg(long, short)]
    outdir: PathBuf,
}

fn main() -> anyhow::Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match Cli::parse().command {
        Command::Coherence(a) => coherence(a),
        Command::Optimize(a) => optimize(a),
        Command::Sample(a) => sample(a),
        Command::Recover(a) => recover(a),
        Command::Experiment(a) => experiment(a),
        Command::MriPrior(a) => mri_prior(a),
    }
}

fn coherence(a: CoherenceArgs) -> anyhow::Result<()> {
    let pair = a.pair.pair()?;
    let b = build_b(&pair)?;
    let uniform = SamplingProfile::uniform(a.pair.n, a.pair.n as f64)?;
    log::info!("mu(uniform) = {:.6e}", mu_profile_from_b(&uniform, &b)?);
    match &a.prior {
        Some(path) => {
            let ds = ingest_support_dataset(path, a.prior_format, a.pair.n, a.s, &a.pair.sparsity)?;
            let c = build_c(&pair, &ds.supports, ds.s)?;
            log::info!("C from {} supports of size {}", ds.len(), ds.s);
            io::write_columns(&a.out, &["b", "c"], &[b.values(), c.values()])?;
        }
        None => io::write_columns(&a.out, &["b"], &[b.values()])?,
    }
    Ok(())
}

fn report(outcome: &OptOutcome, diag: &CoherenceDiagonal) -> anyhow::Result<()> {
    let last = outcome.trace.records.last().context("optimizer ran no iterations")?;
    log::info!(
        "{} outer iterations, converged = {}, objective = {:.6e}, budget = {:.6}",
        outcome.trace.records.len(),
        outcome.trace.converged,
        last.objective,
        last.budget
    );
    if let Some(d) = outcome.budget_deficit {
        log::warn!("budget left unsaturated by {d:.3e}");
    }
    let mu = match diag.kind() {
        vds_core::coherence::DiagonalKind::MaxRow => mu_profile_from_b(&outcome.profile, diag)?,
        vds_core::coherence::DiagonalKind::SupportAvg => mu_profile_support(&outcome.profile, diag)?,
    };
    log::info!("coherence of the result: {mu:.6e}");
    Ok(())
}

fn traces(arm: Arm, m: f64, outcome: &OptOutcome) -> Vec<TraceRow> {
    outcome.trace.records.iter().map(|r| TraceRow { arm, m: m.round() as usize, record: r.clone() }).collect()
}

fn optimize(a: OptimizeArgs) -> anyhow::Result<()> {
    let pair = a.pair.pair()?;
    let cfg = a.opt.config();
    let (arm, diag) = match &a.prior {
        Some(path) => {
            let ds = ingest_support_dataset(path, a.prior_format, a.pair.n, a.s, &a.pair.sparsity)?;
            (Arm::OptimizedC, build_c(&pair, &ds.supports, ds.s)?)
        }
        None => (Arm::OptimizedB, build_b(&pair)?),
    };
    let outcome = match arm {
        Arm::OptimizedC => optimize_profile_with_prior(&diag, &cfg)?,
        _ => optimize_profile(&diag, &cfg)?,
    };
    report(&outcome, &diag)?;
    io::write_profile(&a.out, outcome.profile.p())?;
    if let Some(path) = &a.trace {
        write_trace(path, &traces(arm, a.opt.m, &outcome))?;
    }
    Ok(())
}

fn load_profile(path: Option<&Path>, n: Option<usize>, m: f64) -> anyhow::Result<SamplingProfile> {
    match (path, n) {
        (Some(p), _) => {
            let w = io::read_profile(p)?;
            if let Some(n) = n {
                if n != w.len() {
                    bail!("{} has {} entries, expected {n}", p.display(), w.len());
                }
            }
            Ok(normalize_to_budget(&w, m)?)
        }
        (None, Some(n)) => Ok(SamplingProfile::uniform(n, m)?),
        (None, None) => bail!("give --profile or --n"),
    }
}

fn sample(a: SampleArgs) -> anyhow::Result<()> {
    let profile = load_profile(a.profile.as_deref(), a.n, a.m)?;
    let mut rng = RngSeed::new(a.seed, a.stream).rng();
    let omega = match a.model {
        Model::Bernoulli => bernoulli_select(&profile, &mut rng),
        Model::Iid => {
            let prob: Vec<f64> = profile.p().iter().map(|v| v / profile.l1()).collect();
            iid_select(&prob, a.m.round() as usize, &mut rng)?
        }
    };
    log::info!("{} indices drawn", omega.len());
    io::write_indices(&a.out, &omega)?;
    Ok(())
}

fn recover(a: RecoverArgs) -> anyhow::Result<()> {
    let pair = a.pair.pair()?;
    let n = a.pair.n;
    let profile = load_profile(a.profile.as_deref(), Some(n), a.m)?;
    let mut rng = RngSeed::new(a.seed, a.stream).rng();
    let alpha: Vec<Complex64> = match &a.signal {
        Some(path) => {
            let x = io::read_signal(path)?;
            if x.len() != n {
                bail!("{} has {} entries, expected {n}", path.display(), x.len());
            }
            x
        }
        None => gen_sparse_signal(n, a.s, &mut rng)?.into_alpha(),
    };
    let omega = bernoulli_select(&profile, &mut rng);
    let y = pair.apply_masked(&omega, &alpha)?;
    let (omega, y) = dedup_measurements(&omega, &y);
    let cfg = BPConfig { tol: a.bp_tol, max_iters: a.bp_max_iters, ..BPConfig::default() };
    let sol = basis_pursuit(&y, &omega, &pair, &cfg)?;
    let err: f64 = alpha.iter().zip(&sol.alpha).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
    let reference: f64 = alpha.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    println!(
        "measurements = {}, iterations = {}, converged = {}, relative error = {:.3e}, recovered = {}",
        omega.len(),
        sol.iterations,
        sol.converged,
        err / reference.max(f64::MIN_POSITIVE),
        is_recovered(&alpha, &sol.alpha)?
    );
    if let Some(dir) = &a.outdir {
        std::fs::create_dir_all(dir).with_context(|| dir.display().to_string())?;
        io::write_signal(&dir.join("signal.csv"), &alpha)?;
        io::write_signal(&dir.join("estimate.csv"), &sol.alpha)?;
        io::write_indices(&dir.join("omega.csv"), &omega)?;
    }
    Ok(())
}

fn experiment(a: ExperimentArgs) -> anyhow::Result<()> {
    let mut spec = match &a.spec {
        Some(path) => ExperimentSpec::load(path)?,
        None => ExperimentSpec::default(),
    };
    for (key, value) in &a.overrides {
        spec.set(key, value).map_err(anyhow::Error::msg).with_context(|| format!("--{key}"))?;
    }
    spec.apply_env()?;
    let out = run_phase_transition(&spec)?;
    emit_outputs(&out, &spec.outdir)?;
    for curve in &out.curves {
        let eps: Vec<String> = curve.rows.iter().map(|r| format!("{}:{:.2}", r.m, r.epsilon)).collect();
        println!("{:<16} {}", curve.arm.tag(), eps.join(" "));
    }
    log::info!("outputs written to {}", spec.outdir.display());
    Ok(())
}

fn mri_prior(a: MriPriorArgs) -> anyhow::Result<()> {
    let pair = a.pair.pair()?;
    let ds = a.prior.dataset(&a.pair)?;
    log::info!("{}: {} supports of size {}", ds.note, ds.len(), ds.s);
    let c = build_c(&pair, &ds.supports, ds.s)?;
    let b = build_b(&pair)?;
    let cfg = a.opt.config();
    let with_c = optimize_profile_with_prior(&c, &cfg)?;
    report(&with_c, &c)?;
    let with_b = optimize_profile(&b, &cfg)?;
    std::fs::create_dir_all(&a.outdir).with_context(|| a.outdir.display().to_string())?;
    io::write_columns(&a.outdir.join("coherence.csv"), &["b", "c"], &[b.values(), c.values()])?;
    io::write_profile(&a.outdir.join("profile_c.csv"), with_c.profile.p())?;
    io::write_profile(&a.outdir.join("profile_b.csv"), with_b.profile.p())?;
    let mut rows = traces(Arm::OptimizedC, a.opt.m, &with_c);
    rows.extend(traces(Arm::OptimizedB, a.opt.m, &with_b));
    write_trace(&a.outdir.join("trace.csv"), &rows)?;
    Ok(())
}
