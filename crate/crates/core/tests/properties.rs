//! Algebraic invariants over randomly generated instances.

mod common;

use common::{perturb_stochastic, random_stochastic, rng, separable};
use irl_core::estimation::{fconc_epsilon, lemma_power_bound, mle_from_counts, Transition, VisitCounts};
use irl_core::generate::gen_mdp_uniform;
use irl_core::mdp::{
    bellman_margin, discounted_resolvent, feature_rows, optimal_policy_oracle, Mdp, RewardVector, TransitionModel,
};
use irl_core::solvers::{beta_certificate, classify_regime, solve_l1_svm, Regime, DEFAULT_TAU};
use irl_core::{Error, FeatureRows, Matrix};
use proptest::prelude::*;
use rand::Rng;

fn sizes() -> impl Strategy<Value = (usize, usize, f64, u64)> {
    (2usize..=6, 2usize..=4, 0.0f64..0.95, any::<u64>())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn feature_rows_are_orthogonal_to_ones((n, k, gamma, seed) in sizes()) {
        let mdp = gen_mdp_uniform(n, k, gamma, seed).unwrap();
        let rows = feature_rows(&mdp).unwrap();
        prop_assert_eq!(rows.len(), (k - 1) * n);
        for (_, row) in rows.iter() {
            let scale = row.iter().map(|x| x.abs()).sum::<f64>().max(1.0);
            prop_assert!(row.iter().sum::<f64>().abs() <= 1e-12 * scale * n as f64);
        }
    }

    #[test]
    fn resolvent_inverts_and_matches_neumann_series((n, _k, gamma, seed) in sizes()) {
        let p = random_stochastic(&mut rng(seed), n);
        let res = discounted_resolvent(&p, gamma).unwrap();
        let system = Matrix::identity(n).sub(&p.scale(gamma));
        prop_assert!(system.mul(&res).sub(&Matrix::identity(n)).sup_norm() < 1e-10);
        // Truncation error of Σ γ^j P^j after J terms is γ^J / (1-γ).
        let terms = 800;
        let mut sum = Matrix::identity(n);
        let mut power = Matrix::identity(n);
        for _ in 1..terms {
            power = power.mul(&p).scale(gamma);
            sum = sum.add(&power);
        }
        let tail = gamma.powi(terms) / (1.0 - gamma);
        prop_assert!(res.sub(&sum).sup_norm() <= tail + 1e-9);
        // Rows of the resolvent sum to 1/(1-γ).
        for i in 0..n {
            prop_assert!((res.row(i).iter().sum::<f64>() - 1.0 / (1.0 - gamma)).abs() < 1e-9 / (1.0 - gamma));
        }
    }

    #[test]
    fn margins_agree_with_value_iteration((n, k, gamma, seed) in sizes(), r_seed in any::<u64>()) {
        let mdp = gen_mdp_uniform(n, k, gamma, seed).unwrap();
        let rows = feature_rows(&mdp).unwrap();
        let mut g = rng(r_seed);
        let r = RewardVector::new((0..n).map(|_| g.random_range(-1.0..1.0)).collect()).unwrap();
        let oracle = optimal_policy_oracle(&mdp, &r, 1e-11).unwrap();
        if oracle.min_q_gap(0) > 1e-6 {
            let margin = bellman_margin(&rows, r.as_slice()).value;
            prop_assert_eq!(margin >= 0.0, oracle.is_a1_optimal);
        }
    }

    #[test]
    fn separability_certificate_and_regimes_agree((n, k, gamma, seed) in sizes()) {
        let mdp = gen_mdp_uniform(n, k, gamma, seed).unwrap();
        let rows = feature_rows(&mdp).unwrap();
        let cert = beta_certificate(&rows).unwrap();
        let regime = classify_regime(&rows, DEFAULT_TAU).unwrap();
        // Rows orthogonal to the ones vector always admit w = 1.
        prop_assert_ne!(regime, Regime::Regime1);
        prop_assert_eq!(regime == Regime::Regime3, cert.beta > DEFAULT_TAU);
        match solve_l1_svm(&rows) {
            Ok(rep) => {
                prop_assert!(cert.beta > 0.0);
                prop_assert!(rows.margins(rep.reward.as_slice()).iter().all(|&m| m >= 1.0 - 1e-8));
                prop_assert!(rep.l1_norm <= 1.0 / cert.beta + 1e-6 * (1.0 + 1.0 / cert.beta));
            }
            Err(Error::InfeasibleProblem) => prop_assert!(cert.beta <= DEFAULT_TAU),
            Err(e) => prop_assert!(false, "unexpected {e:?}"),
        }
        if let Some(r) = cert.r_star {
            prop_assert!((r.l1_norm() - 1.0).abs() < 1e-12);
            prop_assert!(bellman_margin(&rows, r.as_slice()).value >= cert.beta - 1e-9);
        }
    }

    #[test]
    fn regime_and_margin_are_scale_covariant((n, k, gamma, seed) in sizes(), c in 0.01f64..100.0) {
        let rows = feature_rows(&gen_mdp_uniform(n, k, gamma, seed).unwrap()).unwrap();
        let scaled = rows.scaled(c);
        let (b0, b1) = (beta_certificate(&rows).unwrap().beta, beta_certificate(&scaled).unwrap().beta);
        prop_assert!((b1 - c * b0).abs() <= 1e-9 * c.max(1.0));
        // Compare away from the threshold so round-off cannot flip the label.
        if b0 > 1e-6 || b0 == 0.0 {
            prop_assert_eq!(classify_regime(&rows, DEFAULT_TAU).unwrap(), classify_regime(&scaled, DEFAULT_TAU * c).unwrap());
        }
    }

    #[test]
    fn mle_rows_sum_to_one(n in 1usize..8, k in 2usize..4, seed in any::<u64>()) {
        let mut g = rng(seed);
        let mut counts = VisitCounts::new(n, k);
        for _ in 0..g.random_range(0..200) {
            counts.record(Transition {
                state: g.random_range(0..n),
                action: g.random_range(0..k),
                next_state: g.random_range(0..n),
            });
        }
        let rep = mle_from_counts(&counts).unwrap();
        for a in 0..k {
            for i in 0..n {
                let row = rep.p_hat.row(a, i);
                prop_assert_eq!(row.iter().sum::<f64>(), 1.0);
                prop_assert!(row.iter().all(|&p| p >= 0.0));
                prop_assert_eq!(rep.unvisited_pairs.contains(&(a, i)), counts.pair_total(a, i) == 0);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn product_norm_inequality(n in 1usize..7, m in 1usize..7, p in 1usize..7, seed in any::<u64>()) {
        let mut g = rng(seed);
        let a = Matrix::from_fn(n, m, |_, _| g.random_range(-3.0..3.0));
        let b = Matrix::from_fn(m, p, |_, _| g.random_range(-3.0..3.0));
        prop_assert!(a.mul(&b).sup_norm() <= a.induced_row_norm() * b.sup_norm() * (1.0 + 1e-12));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn power_difference_bound(n in 2usize..7, eps in 1e-4f64..0.2, seed in any::<u64>()) {
        let mut g = rng(seed);
        let p = random_stochastic(&mut g, n);
        let q = perturb_stochastic(&mut g, &p, eps);
        prop_assert!(q.sub(&p).sup_norm() <= eps * (1.0 + 1e-12));
        for j in 1..=10u32 {
            let diff = q.pow(j).sub(&p.pow(j)).sup_norm();
            prop_assert!(diff <= lemma_power_bound(n, j, eps).unwrap() + 1e-12);
        }
    }

    #[test]
    fn feature_row_concentration((n, k, gamma, seed) in sizes(), eps in 1e-4f64..0.1) {
        let mut g = rng(seed);
        let mdp = gen_mdp_uniform(n, k, gamma, seed).unwrap();
        let perturbed: Vec<Matrix> = mdp
            .transitions()
            .matrices()
            .iter()
            .map(|p| perturb_stochastic(&mut g, p, eps))
            .collect();
        let est = mdp.with_transitions(TransitionModel::from_matrices(perturbed).unwrap()).unwrap();
        let (f, f_hat) = (feature_rows(&mdp).unwrap(), feature_rows(&est).unwrap());
        let bound = fconc_epsilon(eps, n, gamma).unwrap();
        prop_assert!(f_hat.matrix().sub(f.matrix()).sup_norm() <= bound * (1.0 + 1e-9));
    }

    #[test]
    fn hard_margin_survives_bounded_row_error(
        n in 2usize..=5,
        k in 2usize..=4,
        gamma in 0.0f64..0.9,
        seed in any::<u64>(),
        c_idx in 0usize..3,
    ) {
        let c = [0.0, 0.25, 0.5][c_idx];
        let (mdp, beta) = separable(n, k, gamma, 1e-3, seed);
        let exact = feature_rows(&mdp).unwrap();
        let eps = irl_core::estimation::theorem2_epsilon_threshold(beta, c).unwrap();
        // Worst case against the certificate direction: every row loses
        // exactly ε·‖R*‖₁ of margin.
        let r_star = beta_certificate(&exact).unwrap().r_star.unwrap();
        let rows: Vec<Vec<f64>> = exact
            .iter()
            .map(|(_, row)| row.iter().zip(r_star.as_slice()).map(|(f, r)| f - eps * sign(*r)).collect())
            .collect();
        let perturbed = FeatureRows::from_points(rows).unwrap();
        let rep = solve_l1_svm(&perturbed).unwrap();
        prop_assert!(bellman_margin(&exact, rep.reward.as_slice()).value >= c - 1e-7);
    }
}

fn sign(x: f64) -> f64 {
    if x < 0.0 { -1.0 } else { 1.0 }
}

#[test]
fn zero_rows_make_hard_margin_infeasible_and_block_classification() {
    let raw = vec![
        vec![vec![0.5, 0.5], vec![0.2, 0.8]],
        vec![vec![0.5, 0.5], vec![0.9, 0.1]],
    ];
    let mdp = Mdp::new(TransitionModel::new(&raw).unwrap(), 0.2, 0).unwrap();
    let rows = feature_rows(&mdp).unwrap();
    assert_eq!(rows.degenerate_rows().len(), 1);
    assert_eq!(solve_l1_svm(&rows), Err(Error::InfeasibleProblem));
    assert_eq!(classify_regime(&rows, DEFAULT_TAU), Err(Error::ZeroFeatureRow { action: 1, state: 0 }));
    assert_eq!(beta_certificate(&rows), Err(Error::ZeroFeatureRow { action: 1, state: 0 }));
}
