//! MDP representation, feature rows and Bellman-optimality checks.
//!
//! Policies are deterministic maps from state to action index. The action
//! whose optimality is being explained is called `a1` throughout and is
//! stored as [`Mdp::optimal_action`].

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::matrix::{dot, Matrix};

/// Absolute tolerance on every row sum of a transition matrix.
pub const ROW_SUM_TOL: f64 = 1e-12;

/// Feature rows with sup norm below this are flagged as degenerate.
pub const ZERO_ROW_TOL: f64 = 1e-12;

/// Cap on value-iteration sweeps in [`optimal_policy_oracle`].
pub const MAX_VALUE_ITERATIONS: usize = 1_000_000;

/// `k` right-stochastic `n × n` matrices; `P[a][i][j]` is the probability of
/// moving from `i` to `j` under action `a`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionModel {
    n: usize,
    matrices: Vec<Matrix>,
}

impl TransitionModel {
    /// Validates a raw `[action][from][to]` array. Entries are kept verbatim;
    /// nothing is renormalized.
    pub fn new(raw: &[Vec<Vec<f64>>]) -> Result<Self> {
        validate_transition_model(raw)
    }

    pub fn from_matrices(matrices: Vec<Matrix>) -> Result<Self> {
        let raw: Vec<Vec<Vec<f64>>> = matrices.iter().map(Matrix::to_rows).collect();
        validate_transition_model(&raw)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.matrices.len()
    }

    pub fn action(&self, a: usize) -> &Matrix {
        &self.matrices[a]
    }

    pub fn matrices(&self) -> &[Matrix] {
        &self.matrices
    }

    /// `P_a(i)`, the next-state distribution of action `a` at state `i`.
    pub fn row(&self, a: usize, i: usize) -> &[f64] {
        self.matrices[a].row(i)
    }

    pub fn to_raw(&self) -> Vec<Vec<Vec<f64>>> {
        self.matrices.iter().map(Matrix::to_rows).collect()
    }
}

pub fn validate_transition_model(raw: &[Vec<Vec<f64>>]) -> Result<TransitionModel> {
    let k = raw.len();
    if k < 2 {
        return Err(Error::DimensionMismatch("at least two actions are required"));
    }
    let n = raw[0].len();
    if n == 0 {
        return Err(Error::DimensionMismatch("at least one state is required"));
    }
    let mut matrices = Vec::with_capacity(k);
    for (a, m) in raw.iter().enumerate() {
        if m.len() != n || m.iter().any(|row| row.len() != n) {
            return Err(Error::DimensionMismatch("every action needs an n × n matrix"));
        }
        for (i, row) in m.iter().enumerate() {
            for (j, &p) in row.iter().enumerate() {
                if !p.is_finite() {
                    return Err(Error::NonFiniteEntry { action: a, from: i, to: j });
                }
                if p < 0.0 {
                    return Err(Error::NegativeEntry { action: a, from: i, to: j });
                }
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > ROW_SUM_TOL {
                return Err(Error::RowSumViolation { action: a, state: i, actual_sum: sum });
            }
        }
        matrices.push(Matrix::from_rows(m)?);
    }
    Ok(TransitionModel { n, matrices })
}

/// Dynamics plus discount and the action `a1` whose optimality is explained.
#[derive(Debug, Clone, PartialEq)]
pub struct Mdp {
    transitions: TransitionModel,
    gamma: f64,
    optimal_action: usize,
}

impl Mdp {
    /// `gamma` must lie in `[0, 1)`: the resolvent `(I - γP)^{-1}` and every
    /// bound divide by `1 - γ`.
    pub fn new(transitions: TransitionModel, gamma: f64, optimal_action: usize) -> Result<Self> {
        if !(0.0..1.0).contains(&gamma) {
            return Err(Error::InvalidDiscount(gamma));
        }
        if optimal_action >= transitions.k() {
            return Err(Error::InvalidAction { action: optimal_action, k: transitions.k() });
        }
        Ok(Mdp { transitions, gamma, optimal_action })
    }

    pub fn transitions(&self) -> &TransitionModel {
        &self.transitions
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn optimal_action(&self) -> usize {
        self.optimal_action
    }

    pub fn n(&self) -> usize {
        self.transitions.n()
    }

    pub fn k(&self) -> usize {
        self.transitions.k()
    }

    /// Same discount and `a1`, different dynamics (e.g. estimated ones).
    pub fn with_transitions(&self, transitions: TransitionModel) -> Result<Mdp> {
        if transitions.n() != self.n() || transitions.k() != self.k() {
            return Err(Error::DimensionMismatch("replacement dynamics differ in shape"));
        }
        Mdp::new(transitions, self.gamma, self.optimal_action)
    }
}

/// A state reward `R: S → ℝ`.
#[derive(Debug, Clone, PartialEq)]
pub struct RewardVector(Vec<f64>);

impl RewardVector {
    pub fn new(r: Vec<f64>) -> Result<Self> {
        if r.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("reward entries must be finite"));
        }
        Ok(RewardVector(r))
    }

    pub fn zeros(n: usize) -> Self {
        RewardVector(vec![0.0; n])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn l1_norm(&self) -> f64 {
        crate::matrix::l1_norm(&self.0)
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValueVector(pub Vec<f64>);

impl ValueVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// Identifies the feature row for non-optimal action `action` at `state`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RowLabel {
    pub action: usize,
    pub state: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Exact,
    Estimated,
    /// Rows supplied directly rather than derived from dynamics.
    Supplied,
}

/// The `(k-1)·n` vectors `F_ai`, ordered by action then state.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRows {
    labels: Vec<RowLabel>,
    rows: Matrix,
    provenance: Provenance,
}

impl FeatureRows {
    pub fn new(labels: Vec<RowLabel>, rows: Vec<Vec<f64>>, provenance: Provenance) -> Result<Self> {
        if labels.len() != rows.len() {
            return Err(Error::DimensionMismatch("one label per feature row"));
        }
        if rows.is_empty() {
            return Err(Error::DimensionMismatch("feature rows must be nonempty"));
        }
        let rows = Matrix::from_rows(&rows)?;
        if rows.cols() == 0 {
            return Err(Error::DimensionMismatch("feature rows must have positive length"));
        }
        if !rows.is_finite() {
            return Err(Error::InvalidParameter("feature rows must be finite"));
        }
        Ok(FeatureRows { labels, rows, provenance })
    }

    /// Wraps an arbitrary point set, labelling point `t` as `(a=1, i=t)`.
    pub fn from_points(points: Vec<Vec<f64>>) -> Result<Self> {
        let labels = (0..points.len()).map(|state| RowLabel { action: 1, state }).collect();
        FeatureRows::new(labels, points, Provenance::Supplied)
    }

    pub fn len(&self) -> usize {
        self.rows.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Ambient dimension `n`.
    pub fn dim(&self) -> usize {
        self.rows.cols()
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn labels(&self) -> &[RowLabel] {
        &self.labels
    }

    pub fn row(&self, idx: usize) -> &[f64] {
        self.rows.row(idx)
    }

    pub fn matrix(&self) -> &Matrix {
        &self.rows
    }

    pub fn iter(&self) -> impl Iterator<Item = (RowLabel, &[f64])> + '_ {
        self.labels.iter().copied().zip((0..self.len()).map(move |t| self.rows.row(t)))
    }

    /// Rows whose sup norm is below [`ZERO_ROW_TOL`]: `P_a(i)` coincides with
    /// `P_{a1}(i)` and the row carries no information.
    pub fn degenerate_rows(&self) -> Vec<RowLabel> {
        self.iter()
            .filter(|(_, r)| crate::matrix::sup_norm(r) < ZERO_ROW_TOL)
            .map(|(l, _)| l)
            .collect()
    }

    /// Same labels, new row values.
    pub fn with_rows(&self, rows: Vec<Vec<f64>>, provenance: Provenance) -> Result<Self> {
        if rows.len() != self.len() {
            return Err(Error::DimensionMismatch("replacement rows differ in count"));
        }
        FeatureRows::new(self.labels.clone(), rows, provenance)
    }

    pub fn scaled(&self, c: f64) -> FeatureRows {
        FeatureRows { labels: self.labels.clone(), rows: self.rows.scale(c), provenance: self.provenance }
    }

    /// `F_ai · r` for every row.
    pub fn margins(&self, r: &[f64]) -> Vec<f64> {
        assert_eq!(r.len(), self.dim(), "reward length must match feature dimension");
        self.rows.mul_vec(r)
    }
}

/// `(I - γP)^{-1}` by a direct linear solve.
pub fn discounted_resolvent(p: &Matrix, gamma: f64) -> Result<Matrix> {
    if !p.is_square() {
        return Err(Error::DimensionMismatch("resolvent needs a square matrix"));
    }
    if !(0.0..1.0).contains(&gamma) {
        return Err(Error::InvalidDiscount(gamma));
    }
    let n = p.rows();
    let system = Matrix::identity(n).sub(&p.scale(gamma));
    system.solve(&Matrix::identity(n))
}

pub fn feature_rows(mdp: &Mdp) -> Result<FeatureRows> {
    feature_rows_with(mdp, Provenance::Exact)
}

/// Feature rows of `mdp`, tagged with the given provenance (use
/// [`Provenance::Estimated`] when the dynamics are MLE estimates).
pub fn feature_rows_with(mdp: &Mdp, provenance: Provenance) -> Result<FeatureRows> {
    let a1 = mdp.optimal_action();
    let p1 = mdp.transitions().action(a1);
    let resolvent = discounted_resolvent(p1, mdp.gamma())?;
    let n = mdp.n();
    let mut labels = Vec::with_capacity((mdp.k() - 1) * n);
    let mut rows = Vec::with_capacity((mdp.k() - 1) * n);
    for a in (0..mdp.k()).filter(|&a| a != a1) {
        let pa = mdp.transitions().action(a);
        for i in 0..n {
            let diff: Vec<f64> = p1.row(i).iter().zip(pa.row(i)).map(|(x, y)| x - y).collect();
            labels.push(RowLabel { action: a, state: i });
            rows.push(resolvent.left_mul_vec(&diff));
        }
    }
    FeatureRows::new(labels, rows, provenance)
}

/// Row `s` of the policy's transition matrix is `P_{π(s)}(s)`.
pub fn policy_matrix(mdp: &Mdp, policy: &[usize]) -> Result<Matrix> {
    if policy.len() != mdp.n() {
        return Err(Error::DimensionMismatch("policy needs one action per state"));
    }
    if let Some(&bad) = policy.iter().find(|&&a| a >= mdp.k()) {
        return Err(Error::InvalidAction { action: bad, k: mdp.k() });
    }
    Ok(Matrix::from_fn(mdp.n(), mdp.n(), |s, j| mdp.transitions().row(policy[s], s)[j]))
}

/// `V = (I - γP_π)^{-1} r`.
pub fn value_of_policy(mdp: &Mdp, policy: &[usize], r: &RewardVector) -> Result<ValueVector> {
    if r.len() != mdp.n() {
        return Err(Error::DimensionMismatch("reward length must equal n"));
    }
    let p_pi = policy_matrix(mdp, policy)?;
    let system = Matrix::identity(mdp.n()).sub(&p_pi.scale(mdp.gamma()));
    Ok(ValueVector(system.solve_vec(r.as_slice())?))
}

/// `Q[s][a] = r[s] + γ P_a(s) · v`, as an `n × k` matrix.
pub fn q_values(mdp: &Mdp, v: &ValueVector, r: &RewardVector) -> Result<Matrix> {
    if v.0.len() != mdp.n() || r.len() != mdp.n() {
        return Err(Error::DimensionMismatch("value and reward length must equal n"));
    }
    let g = mdp.gamma();
    Ok(Matrix::from_fn(mdp.n(), mdp.k(), |s, a| {
        r.as_slice()[s] + g * dot(mdp.transitions().row(a, s), v.as_slice())
    }))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Margin {
    pub value: f64,
    pub argmin: RowLabel,
}

/// Smallest `F_ai · r` over all rows, with the first row attaining it.
/// `a1` is Bellman-optimal for `r` exactly when the value is `≥ 0`.
pub fn bellman_margin(rows: &FeatureRows, r: &[f64]) -> Margin {
    let mut best = Margin { value: f64::INFINITY, argmin: rows.labels()[0] };
    for (label, row) in rows.iter() {
        let m = dot(row, r);
        if m < best.value {
            best = Margin { value: m, argmin: label };
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleOutcome {
    /// Greedy policy, lowest action index among ties within `tol`.
    pub policy: Vec<usize>,
    pub is_a1_optimal: bool,
    pub value: ValueVector,
    pub q: Matrix,
    pub iterations: usize,
}

impl OracleOutcome {
    /// Smallest `|Q(s, a1) - Q(s, a)|` over states and actions `a ≠ a1`.
    pub fn min_q_gap(&self, a1: usize) -> f64 {
        let mut gap = f64::INFINITY;
        for s in 0..self.q.rows() {
            for a in (0..self.q.cols()).filter(|&a| a != a1) {
                gap = gap.min((self.q[(s, a1)] - self.q[(s, a)]).abs());
            }
        }
        gap
    }
}

/// Value iteration to a fixed point, independent of the feature-row algebra.
///
/// Stops once the sup-norm change drops below `tol·(1-γ)/γ`, which puts the
/// iterate within `tol` of `V*`.
pub fn optimal_policy_oracle(mdp: &Mdp, r: &RewardVector, tol: f64) -> Result<OracleOutcome> {
    if r.len() != mdp.n() {
        return Err(Error::DimensionMismatch("reward length must equal n"));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter("tolerance must be positive"));
    }
    let g = mdp.gamma();
    let threshold = if g == 0.0 { f64::INFINITY } else { tol * (1.0 - g) / g };
    let mut v = ValueVector(vec![0.0; mdp.n()]);
    let mut iterations = 0;
    loop {
        if iterations >= MAX_VALUE_ITERATIONS {
            return Err(Error::NonConvergence { iterations });
        }
        iterations += 1;
        let q = q_values(mdp, &v, r)?;
        let next: Vec<f64> = (0..mdp.n())
            .map(|s| q.row(s).iter().copied().fold(f64::NEG_INFINITY, f64::max))
            .collect();
        let change = next.iter().zip(&v.0).fold(0.0, |m, (a, b)| f64::max(m, (a - b).abs()));
        v = ValueVector(next);
        if change < threshold {
            break;
        }
    }
    let q = q_values(mdp, &v, r)?;
    let a1 = mdp.optimal_action();
    let mut policy = Vec::with_capacity(mdp.n());
    let mut is_a1_optimal = true;
    for s in 0..mdp.n() {
        let row = q.row(s);
        let best = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let choice = row.iter().position(|&x| x >= best - tol).unwrap_or(0);
        policy.push(choice);
        if row[a1] < best - tol {
            is_a1_optimal = false;
        }
    }
    Ok(OracleOutcome { policy, is_a1_optimal, value: v, q, iterations })
}
