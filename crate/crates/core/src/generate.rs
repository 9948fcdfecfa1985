//! Random MDP generators.
//!
//! Two row generators are provided. [`gen_mdp_uniform`] draws every row
//! uniformly from the probability simplex (Dirichlet(1, …, 1) via
//! normalized unit exponentials). [`gen_mdp_structured`] models an action
//! that is "followed" with high probability: `n1` random states share
//! `follow_mass` and the rest share what remains.

use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::mdp::{feature_rows, Mdp, TransitionModel};
use crate::rng::{derive_seed, rng_from_seed, IrlRng};
use crate::solvers::beta_certificate;

/// Attempts made by [`gen_separable_mdp`] before giving up.
pub const MAX_REJECTIONS: usize = 10_000;
pub const DEFAULT_BETA_MIN: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Generator {
    UniformSimplex,
    Structured { n1: usize, follow_mass: f64 },
}

impl Generator {
    /// One high-mass state carrying 0.7.
    pub const STRUCTURED_DEFAULT: Generator = Generator::Structured { n1: 1, follow_mass: 0.7 };
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorConfig {
    pub n: usize,
    pub k: usize,
    pub gamma: f64,
    pub generator: Generator,
    /// Instances with a smaller separation margin are rejected.
    pub beta_min: f64,
}

fn check_sizes(n: usize, k: usize) -> Result<()> {
    if n < 2 || k < 2 {
        return Err(Error::InvalidParameter("generators need n ≥ 2 and k ≥ 2"));
    }
    Ok(())
}

fn simplex_row(rng: &mut IrlRng, n: usize) -> Vec<f64> {
    let draws: Vec<f64> = (0..n)
        .map(|_| {
            let u: f64 = rng.random();
            -libm::log1p(-u)
        })
        .collect();
    let total: f64 = draws.iter().sum();
    draws.into_iter().map(|e| e / total).collect()
}

fn structured_row(rng: &mut IrlRng, n: usize, n1: usize, follow_mass: f64) -> Vec<f64> {
    let mut order: Vec<usize> = (0..n).collect();
    for t in 0..n1 {
        let j = rng.random_range(t..n);
        order.swap(t, j);
    }
    let low = (1.0 - follow_mass) / (n - n1) as f64;
    let high = follow_mass / n1 as f64;
    let mut row = alloc::vec![low; n];
    for &s in &order[..n1] {
        row[s] = high;
    }
    row
}

fn build(n: usize, k: usize, gamma: f64, mut row: impl FnMut() -> Vec<f64>) -> Result<Mdp> {
    let raw: Vec<Vec<Vec<f64>>> = (0..k).map(|_| (0..n).map(|_| row()).collect()).collect();
    Mdp::new(TransitionModel::new(&raw)?, gamma, 0)
}

/// Rows uniform on the simplex; `a1` is action 0.
pub fn gen_mdp_uniform(n: usize, k: usize, gamma: f64, seed: u64) -> Result<Mdp> {
    check_sizes(n, k)?;
    let mut rng = rng_from_seed(seed);
    build(n, k, gamma, || simplex_row(&mut rng, n))
}

/// Rows putting `follow_mass / n1` on `n1` random states and spreading the
/// remainder evenly; `a1` is action 0.
pub fn gen_mdp_structured(n: usize, k: usize, n1: usize, follow_mass: f64, gamma: f64, seed: u64) -> Result<Mdp> {
    check_sizes(n, k)?;
    if n1 == 0 || n1 >= n {
        return Err(Error::InvalidParameter("n1 must satisfy 1 ≤ n1 < n"));
    }
    if !(follow_mass > 0.0 && follow_mass <= 1.0) {
        return Err(Error::InvalidParameter("follow_mass must lie in (0, 1]"));
    }
    let mut rng = rng_from_seed(seed);
    build(n, k, gamma, || structured_row(&mut rng, n, n1, follow_mass))
}

pub fn gen_mdp(config: &GeneratorConfig, seed: u64) -> Result<Mdp> {
    match config.generator {
        Generator::UniformSimplex => gen_mdp_uniform(config.n, config.k, config.gamma, seed),
        Generator::Structured { n1, follow_mass } => {
            gen_mdp_structured(config.n, config.k, n1, follow_mass, config.gamma, seed)
        }
    }
}

/// Rejection-samples until the separation margin reaches `beta_min`;
/// returns the instance with its measured margin. Attempt `t` uses seed
/// `derive_seed(seed, [t])`.
pub fn gen_separable_mdp(config: &GeneratorConfig, seed: u64) -> Result<(Mdp, f64)> {
    if !(config.beta_min > 0.0) {
        return Err(Error::InvalidParameter("beta_min must be positive"));
    }
    for attempt in 0..MAX_REJECTIONS {
        let mdp = gen_mdp(config, derive_seed(seed, &[attempt as u64]))?;
        let rows = feature_rows(&mdp)?;
        if !rows.degenerate_rows().is_empty() {
            continue;
        }
        let cert = beta_certificate(&rows)?;
        if cert.beta >= config.beta_min {
            return Ok((mdp, cert.beta));
        }
    }
    Err(Error::GenerationExhausted { attempts: MAX_REJECTIONS })
}
