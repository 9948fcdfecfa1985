//! Reward recovery from feature rows.
//!
//! Two formulations are provided:
//!
//! - [`solve_l1_svm`]: the hard-margin one-class L1 problem
//!   `minimize ‖R‖₁  s.t.  F_ai·R ≥ 1`, feasible exactly when the points
//!   `F_ai` can be strictly separated from the origin.
//! - [`solve_lp_irl`]: the Ng–Russell linear program
//!   `maximize Σ_i min_a F_ai·R − λ‖R‖₁  s.t.  F_ai·R ≥ 0, ‖R‖_∞ ≤ R_max`.
//!
//! [`classify_regime`] places an instance in one of three geometric regimes
//! (origin inside, on the boundary of, or outside the convex hull of the
//! rows) and [`beta_certificate`] measures how far outside.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linprog::{self, Bounds, LinearProgram, LpSolution, Relation};
use crate::matrix::{dot, l1_norm, sup_norm};
use crate::mdp::{FeatureRows, RewardVector, RowLabel};

/// Default strictness tolerance for regime decisions.
pub const DEFAULT_TAU: f64 = 1e-8;
pub const DEFAULT_LAMBDA: f64 = 1.0;
pub const DEFAULT_R_MAX: f64 = 1.0;

/// Rows with sup norm below this are rejected by the geometric routines.
const ZERO_ROW: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Regime {
    /// Origin in the interior of the hull: only `R = 0` works.
    Regime1,
    /// Origin on the boundary: nonzero rewards exist but none is strict.
    Regime2,
    /// Origin outside the hull: strictly optimal rewards exist.
    Regime3,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeparabilityCertificate {
    /// Largest achievable `min_ai F_ai·R` over `‖R‖₁ ≤ 1`, clamped at zero.
    pub beta: f64,
    /// Unit-L1 reward attaining `beta`; `None` when `beta == 0`.
    pub r_star: Option<RewardVector>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    L1Svm,
    NgRussellLp,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::L1Svm => "l1svm",
            Method::NgRussellLp => "ngrussell",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverReport {
    pub method: Method,
    pub reward: RewardVector,
    pub objective_value: f64,
    pub l1_norm: f64,
    /// Only set for [`Method::NgRussellLp`].
    pub lambda: Option<f64>,
    pub r_max: Option<f64>,
    pub feasible: bool,
}

fn check_nonzero_rows(rows: &FeatureRows) -> Result<()> {
    match rows.iter().find(|(_, r)| sup_norm(r) < ZERO_ROW) {
        Some((RowLabel { action, state }, _)) => Err(Error::ZeroFeatureRow { action, state }),
        None => Ok(()),
    }
}

/// Variables `[u (n), v (n)]` with `R = u - v`, both nonnegative.
fn split_reward(x: &[f64], n: usize) -> Vec<f64> {
    (0..n).map(|j| x[j] - x[n + j]).collect()
}

fn split_row(row: &[f64], extra: usize) -> Vec<f64> {
    let mut coeffs = Vec::with_capacity(2 * row.len() + extra);
    coeffs.extend_from_slice(row);
    coeffs.extend(row.iter().map(|a| -a));
    coeffs.resize(2 * row.len() + extra, 0.0);
    coeffs
}

/// `minimize ‖R‖₁` subject to `F̂_ai·R ≥ 1` for every row.
///
/// Fails with [`Error::InfeasibleProblem`] when the rows cannot be strictly
/// separated from the origin (the instance is not in Regime 3).
pub fn solve_l1_svm(rows: &FeatureRows) -> Result<SolverReport> {
    let n = rows.dim();
    let mut lp = LinearProgram::minimize(vec![1.0; 2 * n]);
    for (_, row) in rows.iter() {
        lp.constrain(split_row(row, 0), Relation::Ge, 1.0);
    }
    match linprog::solve(&lp)? {
        LpSolution::Optimal { x, .. } => {
            let reward = RewardVector::new(split_reward(&x, n))?;
            let l1 = reward.l1_norm();
            Ok(SolverReport {
                method: Method::L1Svm,
                reward,
                objective_value: l1,
                l1_norm: l1,
                lambda: None,
                r_max: None,
                feasible: true,
            })
        }
        LpSolution::Infeasible => Err(Error::InfeasibleProblem),
        // Objective is a nonnegative sum.
        LpSolution::Unbounded => Err(Error::Lp(linprog::LpError::NumericalBreakdown)),
    }
}

/// The Ng–Russell program with explicit `lambda` and `r_max`.
///
/// Linearized with `t_i ≤ F_ai·R` for every non-optimal action `a` at state
/// `i` and `u ≥ |R|` componentwise; `R = 0` is always feasible.
pub fn solve_lp_irl(rows: &FeatureRows, lambda: f64, r_max: f64) -> Result<SolverReport> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidParameter("lambda must be finite and nonnegative"));
    }
    if !(r_max > 0.0 && r_max.is_finite()) {
        return Err(Error::InvalidParameter("r_max must be finite and positive"));
    }
    let n = rows.dim();
    let mut states: Vec<usize> = rows.labels().iter().map(|l| l.state).collect();
    states.sort_unstable();
    states.dedup();
    let nt = states.len();
    // Layout: R (n, boxed), u (n), t (nt).
    let total = 2 * n + nt;
    let mut cost = vec![0.0; total];
    cost[n..2 * n].iter_mut().for_each(|c| *c = lambda);
    cost[2 * n..].iter_mut().for_each(|c| *c = -1.0);
    let mut lp = LinearProgram::minimize(cost);
    for j in 0..n {
        lp.set_bounds(j, Bounds::new(-r_max, r_max));
    }
    for j in 0..nt {
        // t_i ≤ min_a F_ai·R and every F_ai·R ≥ 0, so t_i ≥ 0 loses nothing.
        lp.set_bounds(2 * n + j, Bounds::NONNEGATIVE);
    }
    for (label, row) in rows.iter() {
        let mut ge = vec![0.0; total];
        ge[..n].copy_from_slice(row);
        lp.constrain(ge.clone(), Relation::Ge, 0.0);
        let t = states.binary_search(&label.state).expect("state collected above");
        ge[2 * n + t] = -1.0;
        lp.constrain(ge, Relation::Ge, 0.0);
    }
    for j in 0..n {
        let mut plus = vec![0.0; total];
        plus[n + j] = 1.0;
        plus[j] = -1.0;
        lp.constrain(plus.clone(), Relation::Ge, 0.0);
        plus[j] = 1.0;
        lp.constrain(plus, Relation::Ge, 0.0);
    }
    let x = match linprog::solve(&lp)? {
        LpSolution::Optimal { x, .. } => x,
        _ => return Err(Error::Lp(linprog::LpError::NumericalBreakdown)),
    };
    let reward = RewardVector::new(x[..n].to_vec())?;
    let l1 = reward.l1_norm();
    Ok(SolverReport {
        method: Method::NgRussellLp,
        objective_value: lp_irl_objective(rows, reward.as_slice(), lambda),
        reward,
        l1_norm: l1,
        lambda: Some(lambda),
        r_max: Some(r_max),
        feasible: true,
    })
}

/// `Σ_i min_a F_ai·R − λ‖R‖₁`, evaluated directly.
pub fn lp_irl_objective(rows: &FeatureRows, r: &[f64], lambda: f64) -> f64 {
    let mut per_state: Vec<(usize, f64)> = Vec::new();
    for (label, row) in rows.iter() {
        let m = dot(row, r);
        match per_state.iter_mut().find(|(s, _)| *s == label.state) {
            Some((_, best)) => *best = best.min(m),
            None => per_state.push((label.state, m)),
        }
    }
    per_state.iter().map(|(_, m)| m).sum::<f64>() - lambda * l1_norm(r)
}

/// Maximizes `β` subject to `F·R ≥ β` and `‖R‖₁ ≤ 1`.
///
/// At an optimum with `β > 0` the norm constraint is active, so the returned
/// reward is rescaled to unit L1 norm (which can only raise its margins).
pub fn beta_certificate(rows: &FeatureRows) -> Result<SeparabilityCertificate> {
    check_nonzero_rows(rows)?;
    let n = rows.dim();
    // Layout: u (n), v (n), β (free).
    let mut cost = vec![0.0; 2 * n + 1];
    cost[2 * n] = -1.0;
    let mut lp = LinearProgram::minimize(cost);
    lp.set_bounds(2 * n, Bounds::FREE);
    for (_, row) in rows.iter() {
        let mut coeffs = split_row(row, 1);
        coeffs[2 * n] = -1.0;
        lp.constrain(coeffs, Relation::Ge, 0.0);
    }
    let mut norm = vec![1.0; 2 * n + 1];
    norm[2 * n] = 0.0;
    lp.constrain(norm, Relation::Le, 1.0);
    let x = match linprog::solve(&lp)? {
        LpSolution::Optimal { x, .. } => x,
        other => panic!("{:?}", other),
    };
    let beta = x[2 * n];
    let mut r = split_reward(&x, n);
    let norm = l1_norm(&r);
    // Round-off can leave a tiny positive β next to R = 0.
    if beta <= 0.0 || norm < ZERO_ROW {
        return Ok(SeparabilityCertificate { beta: 0.0, r_star: None });
    }
    r.iter_mut().for_each(|v| *v /= norm);
    Ok(SeparabilityCertificate { beta, r_star: Some(RewardVector::new(r)?) })
}

/// Places the rows in one of the three regimes.
///
/// Regime 3 when the separability margin exceeds `tau`. Otherwise Regime 2
/// when some nonzero `w` has `F·w ≥ 0` on every row, found by testing the
/// cone `{F·w ≥ 0}` for a point with `w_j ≥ 1` or `w_j ≤ -1` for some `j`;
/// Regime 1 when that cone is `{0}`.
pub fn classify_regime(rows: &FeatureRows, tau: f64) -> Result<Regime> {
    check_nonzero_rows(rows)?;
    if beta_certificate(rows)?.beta > tau {
        return Ok(Regime::Regime3);
    }
    let n = rows.dim();
    for j in 0..n {
        for sign in [1.0, -1.0] {
            let mut lp = LinearProgram::minimize(vec![0.0; n]);
            for v in 0..n {
                lp.set_bounds(v, Bounds::FREE);
            }
            for (_, row) in rows.iter() {
                lp.constrain(row.to_vec(), Relation::Ge, 0.0);
            }
            let mut pick = vec![0.0; n];
            pick[j] = sign;
            lp.constrain(pick, Relation::Ge, 1.0);
            if linprog::check_feasible(&lp)? {
                return Ok(Regime::Regime2);
            }
        }
    }
    Ok(Regime::Regime1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(points: &[&[f64]]) -> FeatureRows {
        FeatureRows::from_points(points.iter().map(|p| p.to_vec()).collect()).unwrap()
    }

    #[test]
    fn l1_svm_single_unit_row() {
        let rep = solve_l1_svm(&rows(&[&[1.0, 0.0]])).unwrap();
        assert!((rep.reward.as_slice()[0] - 1.0).abs() < 1e-12);
        assert!(rep.reward.as_slice()[1].abs() < 1e-12);
        assert!((rep.objective_value - 1.0).abs() < 1e-12);
        assert!(rep.feasible && rep.lambda.is_none());
    }

    #[test]
    fn l1_svm_binding_small_row() {
        let rep = solve_l1_svm(&rows(&[&[0.8, -0.8], &[0.1, -0.1]])).unwrap();
        let r = rep.reward.as_slice();
        assert!((rep.objective_value - 10.0).abs() < 1e-9);
        assert!((r[0] - r[1] - 10.0).abs() < 1e-9);
    }

    #[test]
    fn l1_svm_antipodal_infeasible() {
        assert_eq!(solve_l1_svm(&rows(&[&[1.0, -1.0], &[-1.0, 1.0]])), Err(Error::InfeasibleProblem));
    }

    #[test]
    fn lp_irl_examples() {
        let f = rows(&[&[0.8, -0.8], &[0.1, -0.1]]);
        let rep = solve_lp_irl(&f, 0.0, 1.0).unwrap();
        let r = rep.reward.as_slice();
        assert!((r[0] - r[1] - 2.0).abs() < 1e-9);
        assert!((rep.objective_value - 1.8).abs() < 1e-9);
        assert_eq!((rep.lambda, rep.r_max), (Some(0.0), Some(1.0)));

        let heavy = f.iter().map(|(_, r)| l1_norm(r)).sum::<f64>();
        let rep = solve_lp_irl(&f, heavy, 1.0).unwrap();
        assert!(rep.reward.l1_norm() < 1e-12);
        assert!(rep.objective_value.abs() < 1e-12);

        let anti = rows(&[&[1.0, -1.0], &[-1.0, 1.0]]);
        for lambda in [0.0, 0.5, 3.0] {
            let rep = solve_lp_irl(&anti, lambda, 2.0).unwrap();
            let r = rep.reward.as_slice();
            assert!((r[0] - r[1]).abs() < 1e-9);
            assert!(rep.objective_value <= 1e-9);
        }
        assert!(solve_lp_irl(&f, -1.0, 1.0).is_err());
        assert!(solve_lp_irl(&f, 1.0, 0.0).is_err());
    }

    #[test]
    fn regimes_of_reference_instances() {
        assert_eq!(classify_regime(&rows(&[&[0.8, -0.8], &[0.1, -0.1]]), DEFAULT_TAU), Ok(Regime::Regime3));
        assert_eq!(classify_regime(&rows(&[&[2.0, -2.0], &[-2.0, 2.0]]), DEFAULT_TAU), Ok(Regime::Regime2));
        assert_eq!(
            classify_regime(&rows(&[&[1.0, 0.0], &[-1.0, 1.0], &[0.0, -1.0]]), DEFAULT_TAU),
            Ok(Regime::Regime1)
        );
        assert_eq!(
            classify_regime(&rows(&[&[1.0, 0.0], &[0.0, 0.0]]), DEFAULT_TAU),
            Err(Error::ZeroFeatureRow { action: 1, state: 1 })
        );
    }

    #[test]
    fn certificates() {
        let c = beta_certificate(&rows(&[&[0.8, -0.8], &[0.1, -0.1]])).unwrap();
        assert!((c.beta - 0.1).abs() < 1e-12);
        let r = c.r_star.unwrap();
        assert!((r.as_slice()[0] - r.as_slice()[1] - 1.0).abs() < 1e-12);
        assert!((r.l1_norm() - 1.0).abs() < 1e-12);

        let c = beta_certificate(&rows(&[&[2.0, -2.0], &[-2.0, 2.0]])).unwrap();
        assert_eq!(c.beta, 0.0);
        assert!(c.r_star.is_none());

        let c = beta_certificate(&rows(&[&[1.0, 0.0]])).unwrap();
        assert!((c.beta - 1.0).abs() < 1e-12);
        let r = c.r_star.unwrap();
        assert!((r.as_slice()[0] - 1.0).abs() < 1e-12 && r.as_slice()[1].abs() < 1e-12);
    }

    #[test]
    fn certificate_matches_l1_sphere_grid() {
        // Unit L1 sphere in 2-D: R = (t, ±(1-|t|)), t on a 0.001 grid.
        let f = rows(&[&[0.8, -0.8], &[0.1, -0.1]]);
        let mut best = f64::NEG_INFINITY;
        for step in -1000..=1000 {
            let t = step as f64 / 1000.0;
            for s in [1.0, -1.0] {
                let r = [t, s * (1.0 - t.abs())];
                let m = f.iter().map(|(_, row)| dot(row, &r)).fold(f64::INFINITY, f64::min);
                best = best.max(m);
            }
        }
        let c = beta_certificate(&f).unwrap();
        assert!((c.beta - best).abs() < 1e-3);
    }
}
