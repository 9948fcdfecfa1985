//! Trajectory simulation, maximum-likelihood dynamics and sample bounds.
//!
//! The closed-form bounds all use natural logarithms and round up, since
//! each one states a sufficient sample count `m ≥ …`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::mdp::{Mdp, TransitionModel};
use crate::rng::{rng_from_seed, sample_categorical, uniform_index};
use crate::solvers::SolverReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SamplingScheme {
    /// `m` independent next-state draws for every `(action, state)` pair.
    PerStateAction,
    /// `m` episodes from a uniformly random initial state, each taking
    /// `episode_len` steps with a uniformly random action per step.
    AlphaReachable { episode_len: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Transition {
    pub state: usize,
    pub action: usize,
    pub next_state: usize,
}

/// Visit tensor `counts[a][i][j]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VisitCounts {
    n: usize,
    k: usize,
    counts: Vec<u64>,
}

impl VisitCounts {
    pub fn new(n: usize, k: usize) -> Self {
        VisitCounts { n, k, counts: vec![0; k * n * n] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn record(&mut self, t: Transition) {
        self.counts[(t.action * self.n + t.state) * self.n + t.next_state] += 1;
    }

    pub fn get(&self, action: usize, state: usize, next_state: usize) -> u64 {
        self.counts[(action * self.n + state) * self.n + next_state]
    }

    pub fn row(&self, action: usize, state: usize) -> &[u64] {
        let start = (action * self.n + state) * self.n;
        &self.counts[start..start + self.n]
    }

    pub fn pair_total(&self, action: usize, state: usize) -> u64 {
        self.row(action, state).iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryDataset {
    pub triples: Vec<Transition>,
    pub seed: u64,
    pub scheme: SamplingScheme,
    pub counts: VisitCounts,
}

fn simulate_into(
    mdp: &Mdp,
    m: usize,
    scheme: SamplingScheme,
    seed: u64,
    mut sink: impl FnMut(Transition),
) -> Result<()> {
    if m == 0 {
        return Err(Error::InvalidParameter("sample count must be at least 1"));
    }
    let (n, k) = (mdp.n(), mdp.k());
    let p = mdp.transitions();
    let mut rng = rng_from_seed(seed);
    match scheme {
        SamplingScheme::PerStateAction => {
            for action in 0..k {
                for state in 0..n {
                    let row = p.row(action, state);
                    for _ in 0..m {
                        let next_state = sample_categorical(&mut rng, row);
                        sink(Transition { state, action, next_state });
                    }
                }
            }
        }
        SamplingScheme::AlphaReachable { episode_len } => {
            if episode_len == 0 {
                return Err(Error::InvalidParameter("episode length must be at least 1"));
            }
            for _ in 0..m {
                let mut state = uniform_index(&mut rng, n);
                for _ in 0..episode_len {
                    let action = uniform_index(&mut rng, k);
                    let next_state = sample_categorical(&mut rng, p.row(action, state));
                    sink(Transition { state, action, next_state });
                    state = next_state;
                }
            }
        }
    }
    Ok(())
}

/// Draws a dataset under the true dynamics; bit-identical for equal inputs.
pub fn simulate_dataset(mdp: &Mdp, m: usize, scheme: SamplingScheme, seed: u64) -> Result<TrajectoryDataset> {
    let mut counts = VisitCounts::new(mdp.n(), mdp.k());
    let mut triples = Vec::new();
    simulate_into(mdp, m, scheme, seed, |t| {
        counts.record(t);
        triples.push(t);
    })?;
    Ok(TrajectoryDataset { triples, seed, scheme, counts })
}

/// Same draws as [`simulate_dataset`], keeping only the visit tensor.
pub fn simulate_counts(mdp: &Mdp, m: usize, scheme: SamplingScheme, seed: u64) -> Result<VisitCounts> {
    let mut counts = VisitCounts::new(mdp.n(), mdp.k());
    simulate_into(mdp, m, scheme, seed, |t| counts.record(t))?;
    Ok(counts)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimateReport {
    pub p_hat: TransitionModel,
    /// `(action, state)` pairs never visited; their rows are uniform.
    pub unvisited_pairs: Vec<(usize, usize)>,
    /// `samples_per_pair[a][i]`.
    pub samples_per_pair: Vec<Vec<u64>>,
}

/// Empirical frequencies `count(i,a,j) / count(i,a,·)`, uniform for
/// unvisited pairs.
pub fn mle_transition(ds: &TrajectoryDataset) -> Result<EstimateReport> {
    mle_from_counts(&ds.counts)
}

pub fn mle_from_counts(counts: &VisitCounts) -> Result<EstimateReport> {
    let (n, k) = (counts.n(), counts.k());
    let mut raw = Vec::with_capacity(k);
    let mut unvisited_pairs = Vec::new();
    let mut samples_per_pair = vec![vec![0; n]; k];
    for a in 0..k {
        let mut mat = Vec::with_capacity(n);
        for i in 0..n {
            let row = counts.row(a, i);
            let total: u64 = row.iter().sum();
            samples_per_pair[a][i] = total;
            if total == 0 {
                unvisited_pairs.push((a, i));
                mat.push(unit_sum(vec![1.0 / n as f64; n]));
            } else {
                let t = total as f64;
                mat.push(unit_sum(row.iter().map(|&c| c as f64 / t).collect()));
            }
        }
        raw.push(mat);
    }
    Ok(EstimateReport { p_hat: TransitionModel::new(&raw)?, unvisited_pairs, samples_per_pair })
}

/// Nudges one entry, largest first, so the left-to-right floating-point sum
/// of the row is exactly 1.
fn unit_sum(row: Vec<f64>) -> Vec<f64> {
    let sum = |r: &[f64]| r.iter().sum::<f64>();
    let mut order: Vec<usize> = (0..row.len()).collect();
    order.sort_by(|&a, &b| row[b].total_cmp(&row[a]));
    for &idx in &order {
        let mut trial = row.clone();
        trial[idx] += 1.0 - sum(&trial);
        for _ in 0..8 {
            let s = sum(&trial);
            if s == 1.0 {
                break;
            }
            trial[idx] = if s < 1.0 { trial[idx].next_up() } else { trial[idx].next_down() };
        }
        if trial[idx] >= 0.0 && sum(&trial) == 1.0 {
            return trial;
        }
    }
    row
}

/// Parameters shared by the bound calculators; each function reads only
/// the fields it needs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundInputs {
    pub n: usize,
    pub k: usize,
    pub gamma: f64,
    /// Separation margin of the true instance.
    pub beta: f64,
    /// One-step reachability probability, in `(0, 1]`.
    pub alpha: f64,
    /// Failure probability, in `(0, 1)`.
    pub delta: f64,
    pub epsilon: f64,
    /// Margin level in `[0, 1]` guaranteed on the true rows.
    pub c: f64,
    pub m: u64,
}

impl Default for BoundInputs {
    fn default() -> Self {
        BoundInputs { n: 1, k: 2, gamma: 0.0, beta: 0.0, alpha: 1.0, delta: 0.05, epsilon: 0.0, c: 0.0, m: 0 }
    }
}

/// Rounds a sufficient sample count up, treating values within a few ulps
/// of an integer as that integer so logarithm round-off cannot
/// add a spurious sample.
fn ceil_count(x: f64) -> u64 {
    let r = libm::round(x);
    if (x - r).abs() <= 64.0 * f64::EPSILON * r.max(1.0) {
        r as u64
    } else {
        libm::ceil(x) as u64
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter("delta must lie in (0, 1)"))
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter("alpha must lie in (0, 1]"))
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if (0.0..1.0).contains(&gamma) {
        Ok(())
    } else {
        Err(Error::InvalidDiscount(gamma))
    }
}

fn check_positive(x: f64, what: &'static str) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(what))
    }
}

fn check_counts(n: usize, k: usize) -> Result<()> {
    if n == 0 || k == 0 {
        return Err(Error::InvalidParameter("n and k must be positive"));
    }
    Ok(())
}

/// `((n-1)γ + 1) / (1-γ)²`, the amplification from transition error to
/// feature-row error (up to the factor 2).
pub fn amplification(n: usize, gamma: f64) -> f64 {
    ((n as f64 - 1.0) * gamma + 1.0) / ((1.0 - gamma) * (1.0 - gamma))
}

/// Samples per row so that `‖P̂_a − P_a‖_∞ ≤ ε` with probability `1 − δ`:
/// `m ≥ 2/ε² · ln(2n/δ)`.
pub fn dkw_bound(n: usize, epsilon: f64, delta: f64) -> Result<u64> {
    check_counts(n, 1)?;
    check_positive(epsilon, "epsilon must be positive")?;
    check_delta(delta)?;
    Ok(ceil_count(2.0 / (epsilon * epsilon) * libm::log(2.0 * n as f64 / delta)))
}

/// Reachability version: `m ≥ 4/(αε²) · ln(4nk/δ)`.
pub fn alpha_bound(n: usize, k: usize, alpha: f64, epsilon: f64, delta: f64) -> Result<u64> {
    check_counts(n, k)?;
    check_alpha(alpha)?;
    check_positive(epsilon, "epsilon must be positive")?;
    check_delta(delta)?;
    let nk = (n * k) as f64;
    Ok(ceil_count(4.0 / (alpha * epsilon * epsilon) * libm::log(4.0 * nk / delta)))
}

/// Bound on `‖F̂_ai − F_ai‖_∞` given `‖P̂_a − P_a‖_∞ ≤ ε_P` for all actions:
/// `2ε_P((n-1)γ+1)/(1-γ)²`.
pub fn fconc_epsilon(epsilon_p: f64, n: usize, gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    if !(epsilon_p >= 0.0) {
        return Err(Error::InvalidParameter("epsilon must be nonnegative"));
    }
    Ok(2.0 * epsilon_p * amplification(n, gamma))
}

/// Transition accuracy `ε_P` at which [`fconc_epsilon`] equals `epsilon_f`.
pub fn transition_accuracy_for(epsilon_f: f64, n: usize, gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    Ok(epsilon_f / (2.0 * amplification(n, gamma)))
}

/// `‖P̂^j − P^j‖_∞ ≤ ((j-1)n + 1) ε_P` for right-stochastic `P`, `P̂`.
pub fn lemma_power_bound(n: usize, power: u32, epsilon_p: f64) -> Result<f64> {
    if power == 0 {
        return Err(Error::InvalidParameter("power must be at least 1"));
    }
    Ok(((power as f64 - 1.0) * n as f64 + 1.0) * epsilon_p)
}

/// Samples guaranteeing, with probability `1 − δ`, that the hard-margin
/// reward from estimated dynamics is optimal for the true ones:
/// `m ≥ 64/(αβ²) · (((n-1)γ+1)/(1-γ)²)² · ln(4nk/δ)`.
pub fn theorem_sample_bound(inputs: &BoundInputs) -> Result<u64> {
    let BoundInputs { n, k, gamma, beta, alpha, delta, .. } = *inputs;
    check_counts(n, k)?;
    check_gamma(gamma)?;
    check_positive(beta, "beta must be positive")?;
    check_alpha(alpha)?;
    check_delta(delta)?;
    let amp = amplification(n, gamma);
    let nk = (n * k) as f64;
    Ok(ceil_count(64.0 / (alpha * beta * beta) * amp * amp * libm::log(4.0 * nk / delta)))
}

/// Largest feature-row error `ε ≤ (1-c)/(2-c) · β` under which the hard
/// margin reward keeps every true margin at least `c`.
pub fn theorem2_epsilon_threshold(beta: f64, c: f64) -> Result<f64> {
    check_positive(beta, "beta must be positive")?;
    if !(0.0..=1.0).contains(&c) {
        return Err(Error::InvalidParameter("c must lie in [0, 1]"));
    }
    Ok((1.0 - c) / (2.0 - c) * beta)
}

/// `ε = 2·sqrt(4/(αm)·ln(4nk/δ)) · ((n-1)γ+1)/(1-γ)²`, the feature-row
/// accuracy implied by `m` samples.
pub fn witness_epsilon(inputs: &BoundInputs) -> Result<f64> {
    let BoundInputs { n, k, gamma, alpha, delta, m, .. } = *inputs;
    check_counts(n, k)?;
    check_gamma(gamma)?;
    check_alpha(alpha)?;
    check_delta(delta)?;
    if m == 0 {
        return Err(Error::InvalidParameter("m must be at least 1"));
    }
    let nk = (n * k) as f64;
    let eps_p = libm::sqrt(4.0 / (alpha * m as f64) * libm::log(4.0 * nk / delta));
    Ok(2.0 * eps_p * amplification(n, gamma))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WitnessOutcome {
    pub epsilon: f64,
    /// `‖R̂‖₁ · ε`; the true margins are at least `1 − ratio`.
    pub ratio: f64,
    pub passes: bool,
}

/// Post-hoc check that `‖R̂‖₁` is small against `1/ε`: passes when
/// `‖R̂‖₁ · ε ≤ ratio_threshold`.
pub fn witness_check(report: &SolverReport, inputs: &BoundInputs, ratio_threshold: f64) -> Result<WitnessOutcome> {
    witness_for_norm(report.l1_norm, inputs, ratio_threshold)
}

pub fn witness_for_norm(l1_norm: f64, inputs: &BoundInputs, ratio_threshold: f64) -> Result<WitnessOutcome> {
    let epsilon = witness_epsilon(inputs)?;
    let ratio = l1_norm * epsilon;
    Ok(WitnessOutcome { epsilon, ratio, passes: ratio <= ratio_threshold })
}
