use irl::experiments::*;
use irl_core::generate::gen_separable_mdp;
use irl_core::mdp::optimal_policy_oracle;
use irl_core::rng::derive_seed;
use irl_core::RewardVector;

fn small() -> ExperimentConfig {
    ExperimentConfig { n: 3, k: 3, num_mdps: 6, sample_grid: vec![2, 20, 200], ..ExperimentConfig::default() }
}

fn render(out: &ExperimentOutcome) -> (Vec<u8>, Vec<u8>) {
    let (mut curve, mut trials) = (Vec::new(), Vec::new());
    write_curve_csv(&out.curve, &mut curve).unwrap();
    write_trials_csv(&out.trials, &mut trials).unwrap();
    (curve, trials)
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let cfg = small();
    let one = render(&run_experiment(&cfg, Some(1)).unwrap());
    for threads in [2, 3, 8] {
        assert_eq!(render(&run_experiment(&cfg, Some(threads)).unwrap()), one);
    }
    let other_seed = ExperimentConfig { master_seed: cfg.master_seed + 1, ..cfg };
    assert_ne!(render(&run_experiment(&other_seed, Some(2)).unwrap()), one);
}

#[test]
fn curve_shape_and_rates() {
    let cfg = small();
    let out = run_experiment(&cfg, None).unwrap();
    assert_eq!(out.trials.len(), 6 * 3 * 2);
    assert_eq!(out.curve.points.len(), 3 * 2);
    for p in &out.curve.points {
        assert_eq!(p.trials, 6);
        assert_eq!(p.success_rate(), p.successes as f64 / 6.0);
    }
    for t in &out.trials {
        assert!(!t.success || t.feasible);
    }
    assert!(out.curve.bound_line_m.is_some());
}

#[test]
fn single_point_grid() {
    let cfg = ExperimentConfig { sample_grid: vec![1], solvers: vec![SolverKind::L1Svm], ..small() };
    let out = run_experiment(&cfg, None).unwrap();
    assert_eq!(out.curve.points.len(), 1);
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    emit_csv(&out.curve, &a).unwrap();
    emit_csv(&out.curve, &b).unwrap();
    let text = std::fs::read(&a).unwrap();
    assert_eq!(text, std::fs::read(&b).unwrap());
    assert_eq!(String::from_utf8(text).unwrap().lines().count(), 2);
}

#[test]
fn many_samples_recover_a_well_separated_instance() {
    let cfg = ExperimentConfig { n: 3, k: 2, beta_min: 0.1, ..ExperimentConfig::default() };
    let (mdp, beta) = gen_separable_mdp(&cfg.generator_config(), 3).unwrap();
    assert!(beta >= 0.1);
    let recs = run_trial(&mdp, 0, beta, 1_000_000, &[SolverKind::L1Svm], &cfg, 4).unwrap();
    assert!(recs[0].success, "{:?}", recs[0]);
}

#[test]
fn exact_dynamics_always_succeed() {
    let cfg = ExperimentConfig { n: 4, k: 3, ..ExperimentConfig::default() };
    for seed in 0..20 {
        let (mdp, beta) = gen_separable_mdp(&cfg.generator_config(), seed).unwrap();
        let recs = run_trial_exact(&mdp, 0, beta, &[SolverKind::L1Svm], &cfg).unwrap();
        assert!(recs[0].success && recs[0].min_true_margin > 0.0);
    }
}

#[test]
fn failed_estimates_are_recorded_as_infeasible() {
    let cfg = ExperimentConfig { n: 4, k: 3, ..ExperimentConfig::default() };
    let mut seen = 0;
    for seed in 0..40 {
        let (mdp, beta) = gen_separable_mdp(&cfg.generator_config(), seed).unwrap();
        let recs = run_trial(&mdp, 0, beta, 1, &[SolverKind::L1Svm], &cfg, seed).unwrap();
        if !recs[0].feasible {
            assert!(!recs[0].success && recs[0].reward.is_none() && recs[0].l1_norm.is_nan());
            seen += 1;
        }
    }
    assert!(seen > 0, "one draw per pair should make some estimates infeasible");
}

#[test]
fn margin_verdicts_match_value_iteration() {
    // λ = 0 keeps the baseline away from the zero reward so both solvers
    // contribute verdicts.
    let cfg = ExperimentConfig {
        n: 4,
        k: 3,
        num_mdps: 8,
        sample_grid: vec![5, 50, 500],
        lambda: 0.0,
        ..ExperimentConfig::default()
    };
    let instances = generate_instances(&cfg, None).unwrap();
    let out = run_on_instances(&cfg, &instances, None).unwrap();
    let mut checked = 0;
    for t in out.trials.iter().filter(|t| t.feasible) {
        let reward = RewardVector::new(t.reward.clone().unwrap()).unwrap();
        if reward.l1_norm() <= cfg.success_tolerance {
            continue;
        }
        let oracle = optimal_policy_oracle(&instances[t.mdp_index].0, &reward, 1e-11).unwrap();
        if oracle.min_q_gap(0) > 1e-6 {
            assert_eq!(t.success, oracle.is_a1_optimal, "{t:?}");
            checked += 1;
        }
    }
    assert!(checked >= 30, "only {checked} trials checked");
}

#[test]
fn default_margins_have_the_expected_order_of_magnitude() {
    // Thirty default instances; the reference median margin is about 0.0032.
    let cfg = ExperimentConfig::default();
    let betas: Vec<f64> = (0..30)
        .map(|i| gen_separable_mdp(&cfg.generator_config(), derive_seed(9, &[i])).unwrap().1)
        .collect();
    let mut sorted = betas.clone();
    sorted.sort_by(f64::total_cmp);
    let median = 0.5 * (sorted[14] + sorted[15]);
    eprintln!("median separation margin over 30 default instances: {median:.5}");
    assert!(median > 0.00032 && median < 0.032, "median {median}");
}
