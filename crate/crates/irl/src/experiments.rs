//! Success-versus-samples experiment.
//!
//! A fixed set of separable MDPs is drawn once. For every sample count `m`
//! and every instance a dataset is simulated, the dynamics are estimated,
//! and each configured solver runs on the same estimated feature rows. A
//! recovered reward counts as a success when `a1` is Bellman-optimal for it
//! under the true dynamics.
//!
//! Seeds: instance `i` uses `derive_seed(master, [0, i])` and its dataset at
//! `m` uses `derive_seed(master, [1, i, m])`. Nothing depends on thread
//! scheduling, so results are identical for any `threads` setting.

use std::io::Write;
use std::path::Path;

use irl_core::estimation::{
    mle_from_counts, simulate_counts, theorem_sample_bound, BoundInputs, SamplingScheme,
};
use irl_core::generate::{gen_separable_mdp, Generator, GeneratorConfig, DEFAULT_BETA_MIN};
use irl_core::mdp::{bellman_margin, feature_rows, feature_rows_with, FeatureRows, Provenance};
use irl_core::rng::derive_seed;
use irl_core::solvers::{solve_l1_svm, solve_lp_irl, Method, SolverReport, DEFAULT_LAMBDA, DEFAULT_R_MAX};
use irl_core::Mdp;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{IrlError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorKind {
    Uniform,
    Structured,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SolverKind {
    #[serde(rename = "l1svm")]
    L1Svm,
    #[serde(rename = "ngrussell")]
    NgRussell,
}

impl SolverKind {
    pub fn method(self) -> Method {
        match self {
            SolverKind::L1Svm => Method::L1Svm,
            SolverKind::NgRussell => Method::NgRussellLp,
        }
    }

    pub fn name(self) -> &'static str {
        self.method().name()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeKind {
    /// `m` draws per `(action, state)` pair.
    PerStateAction,
    /// `m` episodes of `episode_len` uniformly random steps.
    AlphaReachable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub n: usize,
    pub k: usize,
    pub gamma: f64,
    pub generator: GeneratorKind,
    pub n1: usize,
    pub follow_mass: f64,
    /// Instances with a smaller separation margin are redrawn.
    pub beta_min: f64,
    pub num_mdps: usize,
    pub sample_grid: Vec<u64>,
    pub solvers: Vec<SolverKind>,
    pub lambda: f64,
    pub r_max: f64,
    pub scheme: SchemeKind,
    pub episode_len: usize,
    /// Reachability constant for the bound line; `None` means 1 for
    /// per-pair sampling and `1/n` for random episodes.
    pub alpha: Option<f64>,
    pub delta: f64,
    pub success_tolerance: f64,
    pub master_seed: u64,
}

pub const DEFAULT_MASTER_SEED: u64 = 20_240_601;

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            n: 5,
            k: 5,
            gamma: 0.1,
            generator: GeneratorKind::Uniform,
            n1: 1,
            follow_mass: 0.7,
            beta_min: DEFAULT_BETA_MIN,
            num_mdps: 30,
            sample_grid: vec![10, 100, 1_000, 10_000],
            solvers: vec![SolverKind::L1Svm, SolverKind::NgRussell],
            lambda: DEFAULT_LAMBDA,
            r_max: DEFAULT_R_MAX,
            scheme: SchemeKind::PerStateAction,
            episode_len: 10,
            alpha: None,
            delta: 0.05,
            success_tolerance: 1e-8,
            master_seed: DEFAULT_MASTER_SEED,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(IrlError::Config(msg.to_string()));
        if self.n < 2 || self.k < 2 {
            return bad("n and k must be at least 2");
        }
        if !(0.0..1.0).contains(&self.gamma) {
            return bad("gamma must lie in [0, 1)");
        }
        if self.num_mdps == 0 {
            return bad("num_mdps must be at least 1");
        }
        if self.sample_grid.is_empty() || self.sample_grid[0] == 0 {
            return bad("sample_grid must be nonempty with positive entries");
        }
        if self.sample_grid.windows(2).any(|w| w[0] >= w[1]) {
            return bad("sample_grid must be strictly increasing");
        }
        if self.solvers.is_empty() {
            return bad("at least one solver is required");
        }
        if !(self.follow_mass > 0.0 && self.follow_mass <= 1.0) {
            return bad("follow_mass must lie in (0, 1]");
        }
        if self.generator == GeneratorKind::Structured && !(1..self.n).contains(&self.n1) {
            return bad("n1 must satisfy 1 <= n1 < n");
        }
        if !(self.beta_min > 0.0) {
            return bad("beta_min must be positive");
        }
        if self.scheme == SchemeKind::AlphaReachable && self.episode_len == 0 {
            return bad("episode_len must be at least 1");
        }
        if !(self.success_tolerance >= 0.0) {
            return bad("success_tolerance must be nonnegative");
        }
        Ok(())
    }

    pub fn generator_config(&self) -> GeneratorConfig {
        let generator = match self.generator {
            GeneratorKind::Uniform => Generator::UniformSimplex,
            GeneratorKind::Structured => Generator::Structured { n1: self.n1, follow_mass: self.follow_mass },
        };
        GeneratorConfig { n: self.n, k: self.k, gamma: self.gamma, generator, beta_min: self.beta_min }
    }

    pub fn sampling_scheme(&self) -> SamplingScheme {
        match self.scheme {
            SchemeKind::PerStateAction => SamplingScheme::PerStateAction,
            SchemeKind::AlphaReachable => SamplingScheme::AlphaReachable { episode_len: self.episode_len },
        }
    }

    pub fn effective_alpha(&self) -> f64 {
        self.alpha.unwrap_or(match self.scheme {
            SchemeKind::PerStateAction => 1.0,
            SchemeKind::AlphaReachable => 1.0 / self.n as f64,
        })
    }

    fn bound_inputs(&self, beta: f64) -> BoundInputs {
        BoundInputs {
            n: self.n,
            k: self.k,
            gamma: self.gamma,
            beta,
            alpha: self.effective_alpha(),
            delta: self.delta,
            ..BoundInputs::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub mdp_index: usize,
    pub m: u64,
    pub solver: SolverKind,
    pub feasible: bool,
    pub success: bool,
    pub l1_norm: f64,
    /// `min F_ai·R̂` over the exact rows; NaN when infeasible.
    pub min_true_margin: f64,
    pub beta_of_instance: f64,
    pub unvisited_pairs: usize,
    /// Recovered reward when the solver succeeded in producing one.
    pub reward: Option<Vec<f64>>,
}

/// Judges a solver outcome against the exact rows.
///
/// Success needs a nonzero reward with every true margin at least
/// `-tolerance`. The zero reward satisfies every margin trivially and is
/// what the penalized baseline returns when its penalty dominates, so it is
/// counted as a failure.
pub fn judge(outcome: &irl_core::Result<SolverReport>, exact: &FeatureRows, tolerance: f64) -> (bool, bool, f64, f64) {
    match outcome {
        Ok(rep) if rep.feasible => {
            let r = rep.reward.as_slice();
            let margin = bellman_margin(exact, r).value;
            let nonzero = rep.l1_norm > tolerance;
            (true, nonzero && margin >= -tolerance, rep.l1_norm, margin)
        }
        _ => (false, false, f64::NAN, f64::NAN),
    }
}

fn run_solver(kind: SolverKind, rows: &FeatureRows, config: &ExperimentConfig) -> irl_core::Result<SolverReport> {
    match kind {
        SolverKind::L1Svm => solve_l1_svm(rows),
        SolverKind::NgRussell => solve_lp_irl(rows, config.lambda, config.r_max),
    }
}

fn records_for(
    index: usize,
    m: u64,
    beta: f64,
    estimated: irl_core::Result<FeatureRows>,
    exact: &FeatureRows,
    unvisited_pairs: usize,
    solvers: &[SolverKind],
    config: &ExperimentConfig,
) -> Vec<TrialRecord> {
    solvers
        .iter()
        .map(|&solver| {
            let outcome = estimated.clone().and_then(|rows| run_solver(solver, &rows, config));
            let (feasible, success, l1_norm, min_true_margin) = judge(&outcome, exact, config.success_tolerance);
            let reward = outcome.ok().map(|rep| rep.reward.into_inner());
            TrialRecord {
                mdp_index: index,
                m,
                solver,
                feasible,
                success,
                l1_norm,
                min_true_margin,
                beta_of_instance: beta,
                unvisited_pairs,
                reward,
            }
        })
        .collect()
}

/// One dataset of size `m` for instance `index`, shared by every solver in
/// `solvers`.
pub fn run_trial(
    mdp: &Mdp,
    index: usize,
    beta: f64,
    m: u64,
    solvers: &[SolverKind],
    config: &ExperimentConfig,
    dataset_seed: u64,
) -> Result<Vec<TrialRecord>> {
    let exact = feature_rows(mdp)?;
    let m_usize = usize::try_from(m).map_err(|_| IrlError::Config("sample count too large".into()))?;
    let counts = simulate_counts(mdp, m_usize, config.sampling_scheme(), dataset_seed)?;
    let est = mle_from_counts(&counts)?;
    let unvisited = est.unvisited_pairs.len();
    let estimated = mdp.with_transitions(est.p_hat).and_then(|m| feature_rows_with(&m, Provenance::Estimated));
    Ok(records_for(index, m, beta, estimated, &exact, unvisited, solvers, config))
}

/// Solvers run directly on the exact rows (zero estimation error).
pub fn run_trial_exact(mdp: &Mdp, index: usize, beta: f64, solvers: &[SolverKind], config: &ExperimentConfig) -> Result<Vec<TrialRecord>> {
    let exact = feature_rows(mdp)?;
    Ok(records_for(index, 0, beta, Ok(exact.clone()), &exact, 0, solvers, config))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvePoint {
    pub m: u64,
    pub solver: SolverKind,
    pub trials: u64,
    pub successes: u64,
}

impl CurvePoint {
    pub fn success_rate(&self) -> f64 {
        self.successes as f64 / self.trials as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuccessCurve {
    /// Sorted by `(m, solver)`.
    pub points: Vec<CurvePoint>,
    /// Sufficient sample count at the median instance margin.
    pub bound_line_m: Option<u64>,
}

impl SuccessCurve {
    pub fn from_records(records: &[TrialRecord], bound_line_m: Option<u64>) -> Self {
        let mut points: Vec<CurvePoint> = Vec::new();
        let mut sorted: Vec<&TrialRecord> = records.iter().collect();
        sorted.sort_by_key(|r| (r.m, r.solver));
        for r in sorted {
            match points.last_mut() {
                Some(p) if p.m == r.m && p.solver == r.solver => {
                    p.trials += 1;
                    p.successes += r.success as u64;
                }
                _ => points.push(CurvePoint { m: r.m, solver: r.solver, trials: 1, successes: r.success as u64 }),
            }
        }
        SuccessCurve { points, bound_line_m }
    }

    pub fn point(&self, m: u64, solver: SolverKind) -> Option<&CurvePoint> {
        self.points.iter().find(|p| p.m == m && p.solver == solver)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutcome {
    pub curve: SuccessCurve,
    /// Ordered by `(mdp_index, m)`, then by solver order in the config.
    pub trials: Vec<TrialRecord>,
    pub betas: Vec<f64>,
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    if v.len() % 2 == 1 {
        v[mid]
    } else {
        0.5 * (v[mid - 1] + v[mid])
    }
}

/// Draws the instance set for `config`.
pub fn generate_instances(config: &ExperimentConfig, threads: Option<usize>) -> Result<Vec<(Mdp, f64)>> {
    config.validate()?;
    let gen = config.generator_config();
    in_pool(threads, || {
        (0..config.num_mdps)
            .into_par_iter()
            .map(|i| Ok(gen_separable_mdp(&gen, derive_seed(config.master_seed, &[0, i as u64]))?))
            .collect::<Result<Vec<_>>>()
    })?
}

fn in_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        builder = builder.num_threads(t.max(1));
    }
    let pool = builder.build().map_err(|e| IrlError::Config(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

pub fn run_experiment(config: &ExperimentConfig, threads: Option<usize>) -> Result<ExperimentOutcome> {
    let instances = generate_instances(config, threads)?;
    run_on_instances(config, &instances, threads)
}

/// Runs the sample grid on a given instance set.
pub fn run_on_instances(config: &ExperimentConfig, instances: &[(Mdp, f64)], threads: Option<usize>) -> Result<ExperimentOutcome> {
    config.validate()?;
    let jobs: Vec<(usize, u64)> = (0..instances.len())
        .flat_map(|i| config.sample_grid.iter().map(move |&m| (i, m)))
        .collect();
    let per_job: Vec<Vec<TrialRecord>> = in_pool(threads, || {
        jobs.par_iter()
            .map(|&(i, m)| {
                let (mdp, beta) = &instances[i];
                let seed = derive_seed(config.master_seed, &[1, i as u64, m]);
                log::debug!("trial mdp={i} m={m}");
                run_trial(mdp, i, *beta, m, &config.solvers, config, seed)
            })
            .collect::<Result<Vec<_>>>()
    })??;
    let trials: Vec<TrialRecord> = per_job.into_iter().flatten().collect();
    let betas: Vec<f64> = instances.iter().map(|(_, b)| *b).collect();
    let bound_line_m = theorem_sample_bound(&config.bound_inputs(median(&betas))).ok();
    let curve = SuccessCurve::from_records(&trials, bound_line_m);
    Ok(ExperimentOutcome { curve, trials, betas })
}

pub fn write_curve_csv<W: Write>(curve: &SuccessCurve, mut out: W) -> Result<()> {
    if curve.points.is_empty() {
        return Err(IrlError::Format("cannot emit an empty success curve".into()));
    }
    let bound = curve.bound_line_m.map(|b| b.to_string()).unwrap_or_default();
    writeln!(out, "m,solver,trials,successes,success_rate,bound_line_m")?;
    for p in &curve.points {
        writeln!(out, "{},{},{},{},{:?},{}", p.m, p.solver.name(), p.trials, p.successes, p.success_rate(), bound)?;
    }
    Ok(())
}

pub fn emit_csv(curve: &SuccessCurve, path: &Path) -> Result<()> {
    let mut buf = Vec::new();
    write_curve_csv(curve, &mut buf)?;
    std::fs::write(path, buf).map_err(|e| IrlError::Io { path: path.to_path_buf(), source: e })
}

#[derive(Serialize)]
struct TrialRow {
    mdp_index: usize,
    m: u64,
    solver: &'static str,
    feasible: bool,
    success: bool,
    l1_norm: f64,
    min_true_margin: f64,
    beta_of_instance: f64,
    unvisited_pairs: usize,
}

pub fn write_trials_csv<W: Write>(trials: &[TrialRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for t in trials {
        w.serialize(TrialRow {
            mdp_index: t.mdp_index,
            m: t.m,
            solver: t.solver.name(),
            feasible: t.feasible,
            success: t.success,
            l1_norm: t.l1_norm,
            min_true_margin: t.min_true_margin,
            beta_of_instance: t.beta_of_instance,
            unvisited_pairs: t.unvisited_pairs,
        })?;
    }
    w.flush()?;
    Ok(())
}
