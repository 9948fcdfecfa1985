#![allow(dead_code)]

use irl_core::generate::{gen_separable_mdp, Generator, GeneratorConfig};
use irl_core::rng::{rng_from_seed, IrlRng};
use irl_core::{Matrix, Mdp};
use rand::Rng;

pub fn random_stochastic(rng: &mut IrlRng, n: usize) -> Matrix {
    let rows: Vec<Vec<f64>> = (0..n).map(|_| random_row(rng, n)).collect();
    Matrix::from_rows(&rows).unwrap()
}

pub fn random_row(rng: &mut IrlRng, n: usize) -> Vec<f64> {
    let draws: Vec<f64> = (0..n).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let total: f64 = draws.iter().sum();
    draws.into_iter().map(|d| d / total).collect()
}

/// A stochastic matrix within `eps` of `p` entrywise: each row moves
/// toward a random simplex point by the largest step keeping that bound.
pub fn perturb_stochastic(rng: &mut IrlRng, p: &Matrix, eps: f64) -> Matrix {
    let n = p.cols();
    let mut out = p.clone();
    for i in 0..p.rows() {
        let q = random_row(rng, n);
        let spread = q.iter().zip(p.row(i)).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        let t = if spread > 0.0 { (eps / spread).min(1.0) } else { 0.0 };
        for (dst, (&a, &b)) in out.row_mut(i).iter_mut().zip(q.iter().zip(p.row(i))) {
            *dst = (1.0 - t) * b + t * a;
        }
    }
    out
}

pub fn separable(n: usize, k: usize, gamma: f64, beta_min: f64, seed: u64) -> (Mdp, f64) {
    let cfg = GeneratorConfig { n, k, gamma, generator: Generator::UniformSimplex, beta_min };
    gen_separable_mdp(&cfg, seed).expect("separable instance")
}

pub fn rng(seed: u64) -> IrlRng {
    rng_from_seed(seed)
}
