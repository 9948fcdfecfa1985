//! The `irl` command line.
//!
//! Data goes to stdout (or `--out`), diagnostics to stderr. Exit codes: 0 on
//! success, 1 when the inputs are well-formed but the request fails
//! (infeasible program, invalid model, unreadable file), 2 on usage errors.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use irl_core::estimation::{
    alpha_bound, dkw_bound, fconc_epsilon, mle_transition, simulate_dataset, theorem2_epsilon_threshold,
    theorem_sample_bound, transition_accuracy_for, witness_for_norm, BoundInputs, SamplingScheme,
};
use irl_core::generate::{gen_mdp, gen_separable_mdp, Generator, GeneratorConfig};
use irl_core::mdp::feature_rows;
use irl_core::solvers::{
    beta_certificate, classify_regime, solve_l1_svm, solve_lp_irl, Regime, DEFAULT_LAMBDA, DEFAULT_R_MAX, DEFAULT_TAU,
};

use crate::experiments::{run_experiment, write_curve_csv, write_trials_csv, ExperimentConfig, DEFAULT_MASTER_SEED};
use crate::io::{read_json, read_mdp, to_json_string, write_dataset_csv, EstimateReportFile, MdpFile, SolverReportFile};

/// Seed used by every stochastic subcommand when `--seed` is omitted.
pub const DEFAULT_SEED: u64 = DEFAULT_MASTER_SEED;

#[derive(Debug, Parser)]
#[command(name = "irl", version, about = "Reward recovery for finite MDPs from sampled dynamics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a random MDP as JSON.
    Gen(GenArgs),
    /// Recover a reward for an MDP.
    Solve(SolveArgs),
    /// Report the separability regime and margin.
    Classify(ClassifyArgs),
    /// Simulate transitions and write the maximum-likelihood estimate.
    Estimate(EstimateArgs),
    /// Print the sample-complexity bounds.
    Bounds(BoundsArgs),
    /// Post-hoc check of a recovered reward against the sampling error.
    Witness(WitnessArgs),
    /// Run the success-versus-samples experiment.
    Experiment(ExperimentArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum GeneratorArg {
    Uniform,
    Structured,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    gamma: f64,
    #[arg(long, value_enum, default_value = "uniform")]
    generator: GeneratorArg,
    #[arg(long, default_value_t = 1)]
    n1: usize,
    #[arg(long, default_value_t = 0.7)]
    follow_mass: f64,
    /// Redraw until the separation margin reaches this value.
    #[arg(long)]
    beta_min: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MethodArg {
    L1svm,
    Ngrussell,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    mdp: PathBuf,
    #[arg(long, value_enum, default_value = "l1svm")]
    method: MethodArg,
    #[arg(long, default_value_t = DEFAULT_LAMBDA)]
    lambda: f64,
    #[arg(long, default_value_t = DEFAULT_R_MAX)]
    r_max: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[arg(long)]
    mdp: PathBuf,
    #[arg(long, default_value_t = DEFAULT_TAU)]
    tau: f64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SchemeArg {
    PerStateAction,
    AlphaReachable,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[arg(long)]
    mdp: PathBuf,
    /// Draws per (action, state) pair, or episodes for `alpha-reachable`.
    #[arg(long)]
    m: usize,
    #[arg(long, value_enum, default_value = "per-state-action")]
    scheme: SchemeArg,
    #[arg(long, default_value_t = 10)]
    episode_len: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the sampled transitions as CSV.
    #[arg(long)]
    dataset: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    gamma: f64,
    #[arg(long)]
    beta: f64,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, default_value_t = 0.05)]
    delta: f64,
    /// Margin to keep on the true rows.
    #[arg(long, default_value_t = 0.0)]
    c: f64,
}

#[derive(Debug, Args)]
pub struct WitnessArgs {
    /// Solver report JSON produced by `irl solve`.
    #[arg(long, conflicts_with = "l1_norm", required_unless_present = "l1_norm")]
    report: Option<PathBuf>,
    #[arg(long)]
    l1_norm: Option<f64>,
    #[arg(long)]
    m: u64,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    gamma: f64,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, default_value_t = 0.05)]
    delta: f64,
    #[arg(long, default_value_t = 0.1)]
    threshold: f64,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    #[arg(long)]
    config: PathBuf,
    /// Success curve CSV; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-trial CSV.
    #[arg(long)]
    trials: Option<PathBuf>,
    /// Cap on worker threads.
    #[arg(long)]
    threads: Option<usize>,
    /// Overrides `master_seed` from the config.
    #[arg(long)]
    seed: Option<u64>,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return if code == 0 { 0 } else { 2 };
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            1
        }
    }
}

fn emit(out: &mut dyn Write, path: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Shortest decimal of `x` rounded to 12 significant digits, so LP
/// round-off does not leak into printed summaries.
pub fn fmt_num(x: f64) -> String {
    let rounded: f64 = format!("{x:.11e}").parse().unwrap_or(x);
    format!("{rounded}")
}

fn dispatch(command: Command, out: &mut dyn Write) -> anyhow::Result<()> {
    match command {
        Command::Gen(a) => gen(a, out),
        Command::Solve(a) => solve(a, out),
        Command::Classify(a) => classify(a, out),
        Command::Estimate(a) => estimate(a, out),
        Command::Bounds(a) => bounds(a, out),
        Command::Witness(a) => witness(a, out),
        Command::Experiment(a) => experiment(a, out),
    }
}

fn gen(a: GenArgs, out: &mut dyn Write) -> anyhow::Result<()> {
    let generator = match a.generator {
        GeneratorArg::Uniform => Generator::UniformSimplex,
        GeneratorArg::Structured => Generator::Structured { n1: a.n1, follow_mass: a.follow_mass },
    };
    let mut cfg = GeneratorConfig { n: a.n, k: a.k, gamma: a.gamma, generator, beta_min: 0.0 };
    let mdp = match a.beta_min {
        Some(beta_min) => {
            cfg.beta_min = beta_min;
            let (mdp, beta) = gen_separable_mdp(&cfg, a.seed)?;
            log::info!("separable instance with beta={beta}");
            mdp
        }
        None => gen_mdp(&cfg, a.seed)?,
    };
    emit(out, a.out.as_deref(), &to_json_string(&MdpFile::from_mdp(&mdp)))
}

fn solve(a: SolveArgs, out: &mut dyn Write) -> anyhow::Result<()> {
    let mdp = read_mdp(&a.mdp)?;
    let rows = feature_rows(&mdp)?;
    let report = match a.method {
        MethodArg::L1svm => solve_l1_svm(&rows)?,
        MethodArg::Ngrussell => solve_lp_irl(&rows, a.lambda, a.r_max)?,
    };
    log::info!("{} objective={}", report.method.name(), report.objective_value);
    emit(out, a.out.as_deref(), &to_json_string(&SolverReportFile::from(&report)))
}

fn classify(a: ClassifyArgs, out: &mut dyn Write) -> anyhow::Result<()> {
    let mdp = read_mdp(&a.mdp)?;
    let rows = feature_rows(&mdp)?;
    let regime = classify_regime(&rows, a.tau)?;
    let beta = match regime {
        Regime::Regime3 => beta_certificate(&rows)?.beta,
        _ => 0.0,
    };
    writeln!(out, "{regime:?} beta={}", fmt_num(beta))?;
    Ok(())
}

fn estimate(a: EstimateArgs, out: &mut dyn Write) -> anyhow::Result<()> {
    let mdp = read_mdp(&a.mdp)?;
    let scheme = match a.scheme {
        SchemeArg::PerStateAction => SamplingScheme::PerStateAction,
        SchemeArg::AlphaReachable => SamplingScheme::AlphaReachable { episode_len: a.episode_len },
    };
    let ds = simulate_dataset(&mdp, a.m, scheme, a.seed)?;
    if let Some(path) = &a.dataset {
        let file = std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
        write_dataset_csv(&ds.triples, std::io::BufWriter::new(file))?;
    }
    let report = mle_transition(&ds)?;
    if !report.unvisited_pairs.is_empty() {
        log::warn!("{} (action, state) pairs were never visited", report.unvisited_pairs.len());
    }
    emit(out, a.out.as_deref(), &to_json_string(&EstimateReportFile::new(&report, &mdp)))
}

fn bounds(a: BoundsArgs, out: &mut dyn Write) -> anyhow::Result<()> {
    let eps_f = theorem2_epsilon_threshold(a.beta, a.c)?;
    let eps_p = transition_accuracy_for(eps_f, a.n, a.gamma)?;
    let inputs = BoundInputs {
        n: a.n,
        k: a.k,
        gamma: a.gamma,
        beta: a.beta,
        alpha: a.alpha,
        delta: a.delta,
        ..BoundInputs::default()
    };
    writeln!(out, "epsilon_f={}", fmt_num(eps_f))?;
    writeln!(out, "epsilon_p={}", fmt_num(eps_p))?;
    writeln!(out, "dkw_bound={}", dkw_bound(a.n, eps_p, a.delta)?)?;
    writeln!(out, "alpha_bound={}", alpha_bound(a.n, a.k, a.alpha, eps_p, a.delta)?)?;
    writeln!(out, "fconc_epsilon={}", fmt_num(fconc_epsilon(eps_p, a.n, a.gamma)?))?;
    writeln!(out, "theorem_sample_bound={}", theorem_sample_bound(&inputs)?)?;
    Ok(())
}

fn witness(a: WitnessArgs, out: &mut dyn Write) -> anyhow::Result<()> {
    let l1_norm = match (&a.report, a.l1_norm) {
        (Some(path), _) => {
            let rep: SolverReportFile = read_json(path)?;
            if !rep.feasible {
                bail!("report {} is not feasible", path.display());
            }
            rep.l1_norm
        }
        (None, Some(v)) => v,
        (None, None) => unreachable!("clap requires one of --report or --l1-norm"),
    };
    let inputs = BoundInputs {
        n: a.n,
        k: a.k,
        gamma: a.gamma,
        alpha: a.alpha,
        delta: a.delta,
        m: a.m,
        ..BoundInputs::default()
    };
    let w = witness_for_norm(l1_norm, &inputs, a.threshold)?;
    writeln!(out, "epsilon={} ratio={} pass={}", fmt_num(w.epsilon), fmt_num(w.ratio), w.passes)?;
    Ok(())
}

fn experiment(a: ExperimentArgs, out: &mut dyn Write) -> anyhow::Result<()> {
    let mut config: ExperimentConfig = read_json(&a.config)?;
    if let Some(seed) = a.seed {
        config.master_seed = seed;
    }
    let outcome = run_experiment(&config, a.threads)?;
    log::info!("ran {} trials", outcome.trials.len());
    let mut buf = Vec::new();
    write_curve_csv(&outcome.curve, &mut buf)?;
    emit(out, a.out.as_deref(), std::str::from_utf8(&buf)?)?;
    if let Some(path) = &a.trials {
        let file = std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
        write_trials_csv(&outcome.trials, std::io::BufWriter::new(file))?;
    }
    Ok(())
}
