//! Dense two-phase primal simplex with Bland's anti-cycling rule.
//!
//! Problems are stated as `minimize c·x` subject to linear rows with a
//! relation each and per-variable bounds. Internally every variable is mapped
//! to nonnegative standard-form columns (shifted, mirrored, or split into
//! `x⁺ - x⁻` when free), rows get slack/surplus columns and, where no slack
//! can start in the basis, an artificial column for phase 1.
//!
//! The reported vertex is re-solved from the original standard-form data
//! once the optimal basis is known, so tableau round-off does not leak into
//! the returned point.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::matrix::Matrix;

/// Constraint residual allowed on a reported optimum (scaled by `max(1, |rhs|)`).
pub const FEASIBILITY_TOL: f64 = 1e-8;
/// Tableau entries at or below this magnitude are never pivoted on.
pub const PIVOT_TOL: f64 = 1e-9;
const OPTIMALITY_TOL: f64 = 1e-11;
const MAX_PIVOTS: usize = 200_000;
/// Rhs relaxation in the first pass of the ratio test.
const RATIO_SLACK: f64 = 1e-9;
/// Smallest acceptable pivot relative to the largest near-tied one.
const PIVOT_SHARE: f64 = 0.1;
/// Pivots between tableau rebuilds.
const REFACTOR_EVERY: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub lower: f64,
    pub upper: f64,
}

impl Bounds {
    pub const NONNEGATIVE: Bounds = Bounds { lower: 0.0, upper: f64::INFINITY };
    pub const FREE: Bounds = Bounds { lower: f64::NEG_INFINITY, upper: f64::INFINITY };

    pub fn new(lower: f64, upper: f64) -> Self {
        Bounds { lower, upper }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpError {
    DimensionMismatch,
    NonFiniteCoefficient,
    InvalidBounds { var: usize },
    /// No acceptable pivot, a singular final basis, or a vertex that fails
    /// the feasibility check.
    NumericalBreakdown,
}

impl fmt::Display for LpError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LpError::DimensionMismatch => write!(f, "constraint length differs from variable count"),
            LpError::NonFiniteCoefficient => write!(f, "non-finite coefficient"),
            LpError::InvalidBounds { var } => write!(f, "invalid bounds on variable {var}"),
            LpError::NumericalBreakdown => write!(f, "numerical breakdown"),
        }
    }
}

impl core::error::Error for LpError {}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    objective: Vec<f64>,
    constraints: Vec<Constraint>,
    bounds: Vec<Bounds>,
}

impl LinearProgram {
    /// `minimize objective·x` with every variable nonnegative until
    /// [`set_bounds`](Self::set_bounds) says otherwise.
    pub fn minimize(objective: Vec<f64>) -> Self {
        let bounds = vec![Bounds::NONNEGATIVE; objective.len()];
        LinearProgram { objective, constraints: Vec::new(), bounds }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn bounds(&self) -> &[Bounds] {
        &self.bounds
    }

    pub fn set_bounds(&mut self, var: usize, bounds: Bounds) -> &mut Self {
        self.bounds[var] = bounds;
        self
    }

    pub fn constrain(&mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) -> &mut Self {
        self.constraints.push(Constraint { coeffs, relation, rhs });
        self
    }

    pub fn validate(&self) -> Result<(), LpError> {
        let n = self.num_vars();
        if self.bounds.len() != n {
            return Err(LpError::DimensionMismatch);
        }
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err(LpError::NonFiniteCoefficient);
        }
        for c in &self.constraints {
            if c.coeffs.len() != n {
                return Err(LpError::DimensionMismatch);
            }
            if !c.rhs.is_finite() || c.coeffs.iter().any(|a| !a.is_finite()) {
                return Err(LpError::NonFiniteCoefficient);
            }
        }
        for (var, b) in self.bounds.iter().enumerate() {
            if b.lower.is_nan() || b.upper.is_nan() || b.lower == f64::INFINITY || b.upper == f64::NEG_INFINITY {
                return Err(LpError::InvalidBounds { var });
            }
        }
        Ok(())
    }

    /// Largest scaled violation of any row or bound by `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for c in &self.constraints {
            let lhs: f64 = c.coeffs.iter().zip(x).map(|(a, b)| a * b).sum();
            let scale = c.rhs.abs().max(1.0);
            let v = match c.relation {
                Relation::Le => lhs - c.rhs,
                Relation::Ge => c.rhs - lhs,
                Relation::Eq => (lhs - c.rhs).abs(),
            };
            worst = worst.max(v / scale);
        }
        for (xi, b) in x.iter().zip(&self.bounds) {
            worst = worst.max(b.lower - xi).max(xi - b.upper);
        }
        worst
    }

    pub fn evaluate(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpSolution {
    Optimal { x: Vec<f64>, objective_value: f64 },
    Infeasible,
    Unbounded,
}

impl LpSolution {
    pub fn status(&self) -> LpStatus {
        match self {
            LpSolution::Optimal { .. } => LpStatus::Optimal,
            LpSolution::Infeasible => LpStatus::Infeasible,
            LpSolution::Unbounded => LpStatus::Unbounded,
        }
    }
}

/// Solves to the first optimal vertex reached; degenerate problems may have
/// other optima.
pub fn solve(lp: &LinearProgram) -> Result<LpSolution, LpError> {
    lp.validate()?;
    let Some(std) = StandardForm::build(lp) else {
        return Ok(LpSolution::Infeasible);
    };
    let mut tab = Tableau::new(&std);
    if !tab.phase_one()? {
        return Ok(LpSolution::Infeasible);
    }
    if !tab.phase_two(&std.cost)? {
        return Ok(LpSolution::Unbounded);
    }
    let y = tab.basic_solution(&std);
    let x = std.recover(lp, &y);
    if lp.max_violation(&x) > FEASIBILITY_TOL {
        return Err(LpError::NumericalBreakdown);
    }
    let objective_value = lp.evaluate(&x);
    Ok(LpSolution::Optimal { x, objective_value })
}

/// Phase 1 only: is the feasible region nonempty?
pub fn check_feasible(lp: &LinearProgram) -> Result<bool, LpError> {
    lp.validate()?;
    let Some(std) = StandardForm::build(lp) else {
        return Ok(false);
    };
    Tableau::new(&std).phase_one()
}

#[derive(Debug, Clone, Copy)]
enum VarMap {
    /// `x = lower + y`
    Shift { col: usize, lower: f64 },
    /// `x = upper - y`
    Mirror { col: usize, upper: f64 },
    /// `x = y⁺ - y⁻`
    Split { pos: usize, neg: usize },
}

/// `minimize cost·y` s.t. `rows`, `y ≥ 0`, with every rhs made nonnegative.
struct StandardForm {
    maps: Vec<VarMap>,
    ncols: usize,
    cost: Vec<f64>,
    rows: Vec<(Vec<f64>, Relation, f64)>,
}

impl StandardForm {
    /// `None` when some variable has `lower > upper`.
    fn build(lp: &LinearProgram) -> Option<StandardForm> {
        let mut maps = Vec::with_capacity(lp.num_vars());
        let mut ncols = 0;
        let mut upper_rows = Vec::new();
        for b in lp.bounds() {
            if b.lower > b.upper {
                return None;
            }
            let map = if b.lower.is_finite() {
                if b.upper.is_finite() {
                    upper_rows.push((ncols, b.upper - b.lower));
                }
                VarMap::Shift { col: ncols, lower: b.lower }
            } else if b.upper.is_finite() {
                VarMap::Mirror { col: ncols, upper: b.upper }
            } else {
                ncols += 1;
                VarMap::Split { pos: ncols - 1, neg: ncols }
            };
            ncols += 1;
            maps.push(map);
        }

        let mut cost = vec![0.0; ncols];
        for (map, &c) in maps.iter().zip(lp.objective()) {
            match *map {
                VarMap::Shift { col, .. } => cost[col] += c,
                VarMap::Mirror { col, .. } => cost[col] -= c,
                VarMap::Split { pos, neg } => {
                    cost[pos] += c;
                    cost[neg] -= c;
                }
            }
        }

        let mut rows = Vec::with_capacity(lp.constraints().len() + upper_rows.len());
        for c in lp.constraints() {
            let mut coeffs = vec![0.0; ncols];
            let mut rhs = c.rhs;
            for (map, &a) in maps.iter().zip(&c.coeffs) {
                match *map {
                    VarMap::Shift { col, lower } => {
                        coeffs[col] += a;
                        rhs -= a * lower;
                    }
                    VarMap::Mirror { col, upper } => {
                        coeffs[col] -= a;
                        rhs -= a * upper;
                    }
                    VarMap::Split { pos, neg } => {
                        coeffs[pos] += a;
                        coeffs[neg] -= a;
                    }
                }
            }
            rows.push((coeffs, c.relation, rhs));
        }
        for (col, width) in upper_rows {
            let mut coeffs = vec![0.0; ncols];
            coeffs[col] = 1.0;
            rows.push((coeffs, Relation::Le, width));
        }
        for (coeffs, rel, rhs) in rows.iter_mut() {
            if *rhs < 0.0 {
                coeffs.iter_mut().for_each(|a| *a = -*a);
                *rhs = -*rhs;
                *rel = match *rel {
                    Relation::Le => Relation::Ge,
                    Relation::Ge => Relation::Le,
                    Relation::Eq => Relation::Eq,
                };
            }
        }
        Some(StandardForm { maps, ncols, cost, rows })
    }

    fn recover(&self, lp: &LinearProgram, y: &[f64]) -> Vec<f64> {
        self.maps
            .iter()
            .zip(lp.bounds())
            .map(|(map, b)| {
                let x = match *map {
                    VarMap::Shift { col, lower } => lower + y[col],
                    VarMap::Mirror { col, upper } => upper - y[col],
                    VarMap::Split { pos, neg } => y[pos] - y[neg],
                };
                x.max(b.lower).min(b.upper)
            })
            .collect()
    }
}

struct Tableau {
    width: usize,
    /// Columns `[0, structural)` are standard-form variables, then slacks,
    /// then artificials from `artificial_start`.
    structural: usize,
    artificial_start: usize,
    ncols: usize,
    /// Row-major, `width = ncols + 1`; last entry of each row is the rhs.
    a: Vec<f64>,
    /// Pristine copy of `a` before any pivot, used to re-solve the final basis.
    original: Vec<f64>,
    /// Original row index of each tableau row (rows may be dropped).
    row_ids: Vec<usize>,
    /// Reduced costs, last entry `-z`.
    d: Vec<f64>,
    /// Cost vector of the current phase, over all columns.
    cost: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    fn new(std: &StandardForm) -> Tableau {
        let m = std.rows.len();
        let nslack = std.rows.iter().filter(|r| r.1 != Relation::Eq).count();
        let nart = std.rows.iter().filter(|r| r.1 != Relation::Le).count();
        let structural = std.ncols;
        let artificial_start = structural + nslack;
        let ncols = artificial_start + nart;
        let width = ncols + 1;
        let mut a = vec![0.0; m * width];
        let mut basis = vec![0; m];
        let (mut slack, mut art) = (structural, artificial_start);
        for (i, (coeffs, rel, rhs)) in std.rows.iter().enumerate() {
            let row = &mut a[i * width..(i + 1) * width];
            row[..structural].copy_from_slice(coeffs);
            row[ncols] = *rhs;
            match rel {
                Relation::Le => {
                    row[slack] = 1.0;
                    basis[i] = slack;
                    slack += 1;
                }
                Relation::Ge => {
                    row[slack] = -1.0;
                    slack += 1;
                    row[art] = 1.0;
                    basis[i] = art;
                    art += 1;
                }
                Relation::Eq => {
                    row[art] = 1.0;
                    basis[i] = art;
                    art += 1;
                }
            }
        }
        Tableau {
            width,
            structural,
            artificial_start,
            ncols,
            original: a.clone(),
            a,
            row_ids: (0..m).collect(),
            d: vec![0.0; width],
            cost: vec![0.0; ncols],
            basis,
        }
    }

    fn rows(&self) -> usize {
        self.basis.len()
    }

    fn at(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.width + j]
    }

    fn rhs(&self, i: usize) -> f64 {
        self.a[i * self.width + self.ncols]
    }

    fn pivot(&mut self, r: usize, e: usize) {
        let w = self.width;
        let p = self.at(r, e);
        for v in &mut self.a[r * w..(r + 1) * w] {
            *v /= p;
        }
        self.a[r * w + e] = 1.0;
        let pivot_row: Vec<f64> = self.a[r * w..(r + 1) * w].to_vec();
        for i in 0..self.rows() {
            if i == r {
                continue;
            }
            let f = self.a[i * w + e];
            if f == 0.0 {
                continue;
            }
            let row = &mut self.a[i * w..(i + 1) * w];
            for (v, &pv) in row.iter_mut().zip(&pivot_row) {
                *v -= f * pv;
            }
            row[e] = 0.0;
            if row[w - 1] < 0.0 && row[w - 1] > -PIVOT_TOL {
                row[w - 1] = 0.0;
            }
        }
        let f = self.d[e];
        if f != 0.0 {
            for (v, &pv) in self.d.iter_mut().zip(&pivot_row) {
                *v -= f * pv;
            }
            self.d[e] = 0.0;
        }
        self.basis[r] = e;
    }

    /// Rebuilds the tableau and reduced costs from the original rows for the
    /// current basis, discarding accumulated round-off. Returns `false` (and
    /// leaves the tableau alone) when the basis matrix is singular.
    fn refactor(&mut self) -> bool {
        let m = self.rows();
        let w = self.width;
        let mut basis_mat = Matrix::zeros(m, m);
        let mut rest = Matrix::zeros(m, w);
        for (r, &orig) in self.row_ids.iter().enumerate() {
            let row = &self.original[orig * w..(orig + 1) * w];
            for (c, &b) in self.basis.iter().enumerate() {
                basis_mat[(r, c)] = row[b];
            }
            rest.row_mut(r).copy_from_slice(row);
        }
        let Ok(t) = basis_mat.solve(&rest) else {
            return false;
        };
        for i in 0..m {
            self.a[i * w..(i + 1) * w].copy_from_slice(t.row(i));
            for (c, &b) in self.basis.iter().enumerate() {
                self.a[i * w + b] = if c == i { 1.0 } else { 0.0 };
            }
        }
        let mut d = vec![0.0; w];
        d[..self.ncols].copy_from_slice(&self.cost);
        for i in 0..m {
            let cb = self.cost[self.basis[i]];
            if cb != 0.0 {
                for (dj, &tij) in d.iter_mut().zip(t.row(i)) {
                    *dj -= cb * tij;
                }
            }
        }
        for &b in &self.basis {
            d[b] = 0.0;
        }
        self.d = d;
        true
    }

    /// Ratio test for entering column `e`. A first pass finds the smallest
    /// ratio with every rhs relaxed by [`RATIO_SLACK`]; among rows within
    /// that bound whose pivot is at least [`PIVOT_SHARE`] of the largest
    /// one, the lowest basis index leaves (Bland's tie-break). Skipping
    /// tiny pivots on near-ties keeps degenerate problems well conditioned.
    fn leaving_row(&self, e: usize) -> Option<usize> {
        let mut bound = f64::INFINITY;
        for i in 0..self.rows() {
            let coef = self.at(i, e);
            if coef > PIVOT_TOL {
                bound = bound.min((self.rhs(i).max(0.0) + RATIO_SLACK) / coef);
            }
        }
        if bound.is_infinite() {
            return None;
        }
        let near = |i: usize| {
            let coef = self.at(i, e);
            coef > PIVOT_TOL && self.rhs(i).max(0.0) / coef <= bound
        };
        let largest = (0..self.rows()).filter(|&i| near(i)).map(|i| self.at(i, e)).fold(0.0, f64::max);
        (0..self.rows())
            .filter(|&i| near(i) && self.at(i, e) >= PIVOT_SHARE * largest)
            .min_by_key(|&i| self.basis[i])
    }

    /// Bland's rule over columns `< limit`. `Ok(true)` at optimality,
    /// `Ok(false)` when unbounded. Either verdict is confirmed on a freshly
    /// refactored tableau before it is returned.
    fn iterate(&mut self, limit: usize) -> Result<bool, LpError> {
        let mut fresh = false;
        for step in 0..MAX_PIVOTS {
            if step % REFACTOR_EVERY == REFACTOR_EVERY - 1 {
                fresh = self.refactor();
            }
            let Some(e) = (0..limit).find(|&j| self.d[j] < -OPTIMALITY_TOL) else {
                if fresh || !self.refactor() {
                    return Ok(true);
                }
                fresh = true;
                continue;
            };
            let leave = self.leaving_row(e);
            match leave {
                Some(r) => {
                    self.pivot(r, e);
                    fresh = false;
                }
                None if fresh || !self.refactor() => return Ok(false),
                None => fresh = true,
            }
        }
        Err(LpError::NumericalBreakdown)
    }

    /// Minimizes the sum of artificials, then drives any remaining artificial
    /// out of the basis (dropping rows that turn out redundant).
    fn phase_one(&mut self) -> Result<bool, LpError> {
        self.d.iter_mut().for_each(|v| *v = 0.0);
        for j in self.artificial_start..self.ncols {
            self.d[j] = 1.0;
            self.cost[j] = 1.0;
        }
        let mut rhs_scale: f64 = 1.0;
        for i in 0..self.rows() {
            rhs_scale = rhs_scale.max(self.rhs(i).abs());
            if self.basis[i] >= self.artificial_start {
                for j in 0..self.width {
                    self.d[j] -= self.a[i * self.width + j];
                }
            }
        }
        if !self.iterate(self.ncols)? {
            // The phase-1 objective is bounded below by zero.
            return Err(LpError::NumericalBreakdown);
        }
        let infeasibility = -self.d[self.ncols];
        if infeasibility > FEASIBILITY_TOL * rhs_scale {
            return Ok(false);
        }
        let mut i = 0;
        while i < self.rows() {
            if self.basis[i] < self.artificial_start {
                i += 1;
                continue;
            }
            let best = (0..self.artificial_start)
                .map(|j| (j, self.at(i, j).abs()))
                .filter(|&(_, v)| v > PIVOT_TOL)
                .fold(None, |acc: Option<(usize, f64)>, cur| match acc {
                    Some(b) if b.1 >= cur.1 => Some(b),
                    _ => Some(cur),
                });
            match best {
                Some((j, _)) => {
                    self.pivot(i, j);
                    i += 1;
                }
                None => self.drop_row(i),
            }
        }
        Ok(true)
    }

    fn drop_row(&mut self, i: usize) {
        let w = self.width;
        self.a.drain(i * w..(i + 1) * w);
        self.basis.remove(i);
        self.row_ids.remove(i);
    }

    fn phase_two(&mut self, cost: &[f64]) -> Result<bool, LpError> {
        let structural = self.structural;
        let c = |j: usize| if j < structural { cost[j] } else { 0.0 };
        let mut d = vec![0.0; self.width];
        for (j, dj) in d.iter_mut().enumerate().take(self.ncols) {
            *dj = c(j);
        }
        for i in 0..self.rows() {
            let cb = c(self.basis[i]);
            if cb != 0.0 {
                for (j, dj) in d.iter_mut().enumerate() {
                    *dj -= cb * self.at(i, j);
                }
            }
        }
        for &b in &self.basis {
            d[b] = 0.0;
        }
        self.d = d;
        self.cost = (0..self.ncols).map(c).collect();
        self.iterate(self.artificial_start)
    }

    /// Standard-form point of the current basis, re-solved against the
    /// original rows; falls back to the tableau values if that system is
    /// singular or yields a clearly negative component.
    fn basic_solution(&self, std: &StandardForm) -> Vec<f64> {
        let m = self.rows();
        let mut from_tableau = vec![0.0; self.ncols];
        for i in 0..m {
            from_tableau[self.basis[i]] = self.rhs(i).max(0.0);
        }
        let mut sys = Matrix::zeros(m, m);
        let mut rhs = vec![0.0; m];
        for (r, &orig) in self.row_ids.iter().enumerate() {
            let row = &self.original[orig * self.width..(orig + 1) * self.width];
            for (c, &b) in self.basis.iter().enumerate() {
                sys[(r, c)] = row[b];
            }
            rhs[r] = row[self.ncols];
        }
        let refined = match sys.solve_vec(&rhs) {
            Ok(vals) if vals.iter().all(|&v| v > -1e-9) => {
                let mut y = vec![0.0; self.ncols];
                for (&b, v) in self.basis.iter().zip(vals) {
                    y[b] = v.max(0.0);
                }
                Some(y)
            }
            _ => None,
        };
        let y = refined.unwrap_or(from_tableau);
        y[..std.ncols].to_vec()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn optimal(sol: LpSolution) -> (Vec<f64>, f64) {
        match sol {
            LpSolution::Optimal { x, objective_value } => (x, objective_value),
            other => panic!("expected optimum, got {other:?}"),
        }
    }

    #[test]
    fn single_variable_upper_row() {
        let mut lp = LinearProgram::minimize(vec![-1.0]);
        lp.constrain(vec![1.0], Relation::Le, 1.0);
        let (x, z) = optimal(solve(&lp).unwrap());
        assert!((x[0] - 1.0).abs() < 1e-12);
        assert!((z + 1.0).abs() < 1e-12);
    }

    #[test]
    fn covering_row_picks_cheaper_vertex() {
        // Candidate vertices (2,0) with cost 2 and (0,1) with cost 1.
        let mut lp = LinearProgram::minimize(vec![1.0, 1.0]);
        lp.constrain(vec![1.0, 2.0], Relation::Ge, 2.0);
        let (x, z) = optimal(solve(&lp).unwrap());
        assert!(x[0].abs() < 1e-12 && (x[1] - 1.0).abs() < 1e-12);
        assert!((z - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unbounded_ray() {
        let lp = LinearProgram::minimize(vec![-1.0]);
        assert_eq!(solve(&lp).unwrap(), LpSolution::Unbounded);
    }

    #[test]
    fn contradictory_rows_infeasible() {
        let mut lp = LinearProgram::minimize(vec![0.0]);
        lp.set_bounds(0, Bounds::FREE);
        lp.constrain(vec![1.0], Relation::Ge, 1.0).constrain(vec![1.0], Relation::Le, 0.0);
        assert!(!check_feasible(&lp).unwrap());
        assert_eq!(solve(&lp).unwrap(), LpSolution::Infeasible);

        let mut lp = LinearProgram::minimize(vec![0.0]);
        lp.set_bounds(0, Bounds::new(1.0, 0.0));
        assert!(!check_feasible(&lp).unwrap());
    }

    #[test]
    fn simplex_point_feasible() {
        let mut lp = LinearProgram::minimize(vec![0.0, 0.0]);
        lp.constrain(vec![1.0, 1.0], Relation::Eq, 1.0);
        assert!(check_feasible(&lp).unwrap());
    }

    #[test]
    fn antipodal_unit_margins_infeasible() {
        // F·R ≥ 1 on rows [1,-1] and [-1,1] would need 0 ≥ 2.
        let mut lp = LinearProgram::minimize(vec![0.0, 0.0]);
        lp.set_bounds(0, Bounds::FREE).set_bounds(1, Bounds::FREE);
        lp.constrain(vec![1.0, -1.0], Relation::Ge, 1.0).constrain(vec![-1.0, 1.0], Relation::Ge, 1.0);
        assert!(!check_feasible(&lp).unwrap());
    }

    #[test]
    fn free_and_boxed_variables() {
        // min x - y, x free with x ≥ -3 via a row, y in [-1, 2].
        let mut lp = LinearProgram::minimize(vec![1.0, -1.0]);
        lp.set_bounds(0, Bounds::FREE).set_bounds(1, Bounds::new(-1.0, 2.0));
        lp.constrain(vec![1.0, 0.0], Relation::Ge, -3.0);
        let (x, z) = optimal(solve(&lp).unwrap());
        assert_eq!(x, vec![-3.0, 2.0]);
        assert_eq!(z, -5.0);

        // Upper-only bound goes through the mirrored mapping.
        let mut lp = LinearProgram::minimize(vec![-1.0]);
        lp.set_bounds(0, Bounds::new(f64::NEG_INFINITY, 4.5));
        let (x, _) = optimal(solve(&lp).unwrap());
        assert_eq!(x, vec![4.5]);
    }

    #[test]
    fn redundant_equalities_are_dropped() {
        let mut lp = LinearProgram::minimize(vec![1.0, 2.0]);
        lp.constrain(vec![1.0, 1.0], Relation::Eq, 1.0)
            .constrain(vec![2.0, 2.0], Relation::Eq, 2.0);
        let (x, z) = optimal(solve(&lp).unwrap());
        assert!((x[0] - 1.0).abs() < 1e-12 && (z - 1.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_problem_terminates() {
        // A classic cycling example for the largest-coefficient rule.
        let mut lp = LinearProgram::minimize(vec![-10.0, 57.0, 9.0, 24.0]);
        lp.constrain(vec![0.5, -5.5, -2.5, 9.0], Relation::Le, 0.0)
            .constrain(vec![0.5, -1.5, -0.5, 1.0], Relation::Le, 0.0)
            .constrain(vec![1.0, 0.0, 0.0, 0.0], Relation::Le, 1.0);
        let (x, z) = optimal(solve(&lp).unwrap());
        assert!((z + 1.0).abs() < 1e-9, "z = {z}, x = {x:?}");
    }

    #[test]
    fn malformed_programs_rejected() {
        let mut lp = LinearProgram::minimize(vec![1.0, 1.0]);
        lp.constrain(vec![1.0], Relation::Le, 1.0);
        assert_eq!(solve(&lp), Err(LpError::DimensionMismatch));

        let mut lp = LinearProgram::minimize(vec![f64::NAN]);
        lp.constrain(vec![1.0], Relation::Le, 1.0);
        assert_eq!(solve(&lp), Err(LpError::NonFiniteCoefficient));
    }
}
