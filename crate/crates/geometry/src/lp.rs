//! Exact two-phase primal simplex with Bland's rule.
//!
//! Every optimum is returned with dual multipliers, and the solver checks strong duality and
//! complementary slackness in exact arithmetic before returning.

use num_traits::{One, Signed, Zero};

use crate::hyperplane::Hyperplane;
use crate::linalg::solve;
use crate::scalar::{dot, Scalar, Vector};
use crate::GeometryError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

/// One linear constraint `coeffs·x (relation) rhs`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpRow {
    pub coeffs: Vector,
    pub rhs: Scalar,
    pub relation: Relation,
}

impl LpRow {
    pub fn le(coeffs: Vector, rhs: Scalar) -> Self {
        LpRow { coeffs, rhs, relation: Relation::Le }
    }

    pub fn ge(coeffs: Vector, rhs: Scalar) -> Self {
        LpRow { coeffs, rhs, relation: Relation::Ge }
    }

    pub fn eq(coeffs: Vector, rhs: Scalar) -> Self {
        LpRow { coeffs, rhs, relation: Relation::Eq }
    }

    fn satisfied_by(&self, x: &[Scalar]) -> bool {
        let lhs = dot(&self.coeffs, x);
        match self.relation {
            Relation::Le => lhs <= self.rhs,
            Relation::Ge => lhs >= self.rhs,
            Relation::Eq => lhs == self.rhs,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
    Feasibility,
}

/// An optimal solution with its certificate.
///
/// With `s = +1` for maximisation and `s = -1` for minimisation, the multipliers satisfy
/// `s·objective = Σ yᵢ·coeffsᵢ` and `s·value = Σ yᵢ·rhsᵢ`, with `yᵢ >= 0` on `<=` rows,
/// `yᵢ <= 0` on `>=` rows and `yᵢ = 0` off the active set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpOptimum {
    pub value: Scalar,
    pub point: Vector,
    pub active: Vec<usize>,
    pub multipliers: Vec<Scalar>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Infeasible,
    /// `point + t·ray` is feasible for all `t >= 0` and improves the objective without bound.
    Unbounded {
        point: Vector,
        ray: Vector,
    },
    Optimal(LpOptimum),
}

impl LpOutcome {
    pub fn is_feasible(&self) -> bool {
        !matches!(self, LpOutcome::Infeasible)
    }

    pub fn optimum(&self) -> Option<&LpOptimum> {
        match self {
            LpOutcome::Optimal(o) => Some(o),
            _ => None,
        }
    }
}

/// Solves a linear program over free variables `x ∈ ℚⁿ`.
pub fn lp_solve(rows: &[LpRow], objective: &[Scalar], sense: Sense) -> Result<LpOutcome, GeometryError> {
    let n = objective.len();
    for r in rows {
        if r.coeffs.len() != n {
            return Err(GeometryError::DimensionMismatch { expected: n, found: r.coeffs.len() });
        }
    }
    let s = match sense {
        Sense::Maximize => Scalar::one(),
        Sense::Minimize => -Scalar::one(),
        Sense::Feasibility => Scalar::zero(),
    };
    let cost: Vector = objective.iter().map(|c| c * &s).collect();
    let mut tab = Tableau::build(rows, n);
    if !tab.phase_one() {
        return Ok(LpOutcome::Infeasible);
    }
    let outcome = tab.phase_two(&cost);
    match outcome {
        PhaseTwo::Unbounded { point, ray } => Ok(LpOutcome::Unbounded { point, ray }),
        PhaseTwo::Optimal => {
            let point = tab.primal_point();
            let y = tab.duals(&cost)?;
            let value = dot(objective, &point);
            let active: Vec<usize> =
                rows.iter().enumerate().filter(|(_, r)| dot(&r.coeffs, &point) == r.rhs).map(|(i, _)| i).collect();
            let opt = LpOptimum { value, point, active, multipliers: y };
            check_certificate(rows, &cost, &s, &opt)?;
            Ok(LpOutcome::Optimal(opt))
        }
    }
}

/// Convenience wrapper over halfspaces `normal·x <= offset`.
pub fn lp_solve_halfspaces(
    halfspaces: &[Hyperplane],
    objective: &[Scalar],
    sense: Sense,
) -> Result<LpOutcome, GeometryError> {
    let rows: Vec<LpRow> = halfspaces.iter().map(|h| LpRow::le(h.normal().to_vec(), h.offset().clone())).collect();
    lp_solve(&rows, objective, sense)
}

fn check_certificate(rows: &[LpRow], cost: &[Scalar], s: &Scalar, opt: &LpOptimum) -> Result<(), GeometryError> {
    let fail = |what: &str| Err(GeometryError::Internal(format!("LP certificate check failed: {what}")));
    if !rows.iter().all(|r| r.satisfied_by(&opt.point)) {
        return fail("primal point infeasible");
    }
    let n = cost.len();
    let mut combo = vec![Scalar::zero(); n];
    let mut dual_value = Scalar::zero();
    for (i, (r, y)) in rows.iter().zip(&opt.multipliers).enumerate() {
        if y.is_zero() {
            continue;
        }
        let sign_ok = match r.relation {
            Relation::Le => y.is_positive(),
            Relation::Ge => y.is_negative(),
            Relation::Eq => true,
        };
        if !sign_ok {
            return fail("dual sign");
        }
        if opt.active.binary_search(&i).is_err() {
            return fail("complementary slackness");
        }
        for (c, a) in combo.iter_mut().zip(&r.coeffs) {
            *c = &*c + y * a;
        }
        dual_value += y * &r.rhs;
    }
    if combo != cost {
        return fail("dual feasibility");
    }
    if dual_value != &opt.value * s {
        return fail("strong duality");
    }
    Ok(())
}

enum PhaseTwo {
    Optimal,
    Unbounded { point: Vector, ray: Vector },
}

/// Dense simplex tableau over nonnegative variables `[u (n) | v (n) | slacks | artificials]`,
/// with `x = u - v`.
struct Tableau {
    n: usize,
    ncols: usize,
    art_start: usize,
    rows: Vec<Vector>,
    rhs: Vec<Scalar>,
    basis: Vec<usize>,
    /// Original standard-form columns of the surviving rows, for dual recovery.
    original: Vec<Vector>,
    /// Index of the input row each tableau row came from, and the sign applied to it.
    origin: Vec<(usize, bool)>,
    input_rows: usize,
}

impl Tableau {
    fn build(input: &[LpRow], n: usize) -> Self {
        let m = input.len();
        let nslack = input.iter().filter(|r| r.relation != Relation::Eq).count();
        let art_start = 2 * n + nslack;
        let ncols = art_start + m;
        let mut rows = Vec::with_capacity(m);
        let mut rhs = Vec::with_capacity(m);
        let mut origin = Vec::with_capacity(m);
        let mut slack = 2 * n;
        for (i, r) in input.iter().enumerate() {
            let mut row = vec![Scalar::zero(); ncols];
            for (j, a) in r.coeffs.iter().enumerate() {
                row[2 * j] = a.clone();
                row[2 * j + 1] = -a.clone();
            }
            match r.relation {
                Relation::Le => {
                    row[slack] = Scalar::one();
                    slack += 1;
                }
                Relation::Ge => {
                    row[slack] = -Scalar::one();
                    slack += 1;
                }
                Relation::Eq => {}
            }
            let mut b = r.rhs.clone();
            let negate = b.is_negative();
            if negate {
                for x in row.iter_mut() {
                    *x = -x.clone();
                }
                b = -b;
            }
            row[art_start + i] = Scalar::one();
            rows.push(row);
            rhs.push(b);
            origin.push((i, negate));
        }
        let original = rows.clone();
        let basis = (0..m).map(|i| art_start + i).collect();
        Tableau { n, ncols, art_start, rows, rhs, basis, original, origin, input_rows: m }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let inv = Scalar::one() / &self.rows[r][c];
        for x in self.rows[r].iter_mut() {
            if !x.is_zero() {
                *x = &*x * &inv;
            }
        }
        self.rhs[r] = &self.rhs[r] * &inv;
        let prow = self.rows[r].clone();
        let prhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][c].is_zero() {
                continue;
            }
            let f = self.rows[i][c].clone();
            for (x, y) in self.rows[i].iter_mut().zip(&prow) {
                if !y.is_zero() {
                    *x = &*x - &f * y;
                }
            }
            self.rhs[i] = &self.rhs[i] - &f * &prhs;
        }
        self.basis[r] = c;
    }

    fn reduced_cost(&self, cost: &[Scalar], j: usize) -> Scalar {
        let mut r = cost[j].clone();
        for (i, &b) in self.basis.iter().enumerate() {
            if !cost[b].is_zero() && !self.rows[i][j].is_zero() {
                r -= &cost[b] * &self.rows[i][j];
            }
        }
        r
    }

    /// Runs the simplex method with Bland's rule on columns `< limit`.
    /// Returns `Some(column)` if that entering column is unbounded.
    fn optimise(&mut self, cost: &[Scalar], limit: usize) -> Option<usize> {
        loop {
            let entering =
                (0..limit).filter(|j| !self.basis.contains(j)).find(|&j| self.reduced_cost(cost, j).is_positive());
            let c = entering?;
            let mut leave: Option<(usize, Scalar)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][c];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / a;
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                None => return Some(c),
                Some((r, _)) => self.pivot(r, c),
            }
        }
    }

    fn phase_one(&mut self) -> bool {
        let mut cost = vec![Scalar::zero(); self.ncols];
        for c in cost.iter_mut().skip(self.art_start) {
            *c = -Scalar::one();
        }
        let unbounded = self.optimise(&cost, self.ncols);
        debug_assert!(unbounded.is_none(), "phase one is bounded");
        let infeasible = self.basis.iter().zip(&self.rhs).any(|(&b, v)| b >= self.art_start && v.is_positive());
        if infeasible {
            return false;
        }
        // Drive remaining zero-level artificials out of the basis; drop redundant rows.
        let mut i = 0;
        while i < self.rows.len() {
            if self.basis[i] >= self.art_start {
                if let Some(j) = (0..self.art_start).find(|&j| !self.rows[i][j].is_zero()) {
                    self.pivot(i, j);
                } else {
                    self.rows.remove(i);
                    self.rhs.remove(i);
                    self.basis.remove(i);
                    self.original.remove(i);
                    self.origin.remove(i);
                    continue;
                }
            }
            i += 1;
        }
        true
    }

    fn phase_two(&mut self, cost_x: &[Scalar]) -> PhaseTwo {
        let cost = self.standard_cost(cost_x);
        match self.optimise(&cost, self.art_start) {
            None => PhaseTwo::Optimal,
            Some(c) => {
                let point = self.primal_point();
                let mut z = vec![Scalar::zero(); self.ncols];
                z[c] = Scalar::one();
                for (i, &b) in self.basis.iter().enumerate() {
                    z[b] = -self.rows[i][c].clone();
                }
                let ray = (0..self.n).map(|j| &z[2 * j] - &z[2 * j + 1]).collect();
                PhaseTwo::Unbounded { point, ray }
            }
        }
    }

    fn standard_cost(&self, cost_x: &[Scalar]) -> Vector {
        let mut cost = vec![Scalar::zero(); self.ncols];
        for (j, c) in cost_x.iter().enumerate() {
            cost[2 * j] = c.clone();
            cost[2 * j + 1] = -c.clone();
        }
        cost
    }

    fn primal_point(&self) -> Vector {
        let mut z = vec![Scalar::zero(); self.ncols];
        for (i, &b) in self.basis.iter().enumerate() {
            z[b] = self.rhs[i].clone();
        }
        (0..self.n).map(|j| &z[2 * j] - &z[2 * j + 1]).collect()
    }

    /// Solves `Bᵀ y = c_B` on the original standard-form columns and maps back to input rows.
    fn duals(&self, cost_x: &[Scalar]) -> Result<Vector, GeometryError> {
        let cost = self.standard_cost(cost_x);
        let m = self.rows.len();
        let bt: Vec<Vector> =
            self.basis.iter().map(|&b| (0..m).map(|i| self.original[i][b].clone()).collect()).collect();
        let cb: Vector = self.basis.iter().map(|&b| cost[b].clone()).collect();
        let y = solve(&bt, &cb, m).ok_or_else(|| GeometryError::Internal("singular simplex basis".to_string()))?;
        let mut out = vec![Scalar::zero(); self.input_rows];
        for (yi, &(row, negate)) in y.into_iter().zip(&self.origin) {
            out[row] = if negate { -yi } else { yi };
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, ivec, ratio};

    fn square() -> Vec<LpRow> {
        vec![
            LpRow::le(ivec(&[1, 0]), int(1)),
            LpRow::le(ivec(&[0, 1]), int(1)),
            LpRow::ge(ivec(&[1, 0]), int(0)),
            LpRow::ge(ivec(&[0, 1]), int(0)),
        ]
    }

    #[test]
    fn max_x1_over_square() {
        let out = lp_solve(&square(), &ivec(&[1, 0]), Sense::Maximize).unwrap();
        let opt = out.optimum().unwrap();
        assert_eq!(opt.value, int(1));
        assert_eq!(opt.point[0], int(1));
        assert!(opt.active.contains(&0));
    }

    #[test]
    fn contradictory_equalities_are_infeasible() {
        let rows = vec![LpRow::eq(ivec(&[1]), int(0)), LpRow::eq(ivec(&[1]), int(1))];
        assert_eq!(lp_solve(&rows, &ivec(&[0]), Sense::Feasibility).unwrap(), LpOutcome::Infeasible);
    }

    #[test]
    fn simplex_facet_value() {
        let rows =
            vec![LpRow::ge(ivec(&[1, 0]), int(0)), LpRow::ge(ivec(&[0, 1]), int(0)), LpRow::le(ivec(&[1, 1]), int(1))];
        let out = lp_solve(&rows, &ivec(&[1, 1]), Sense::Maximize).unwrap();
        assert_eq!(out.optimum().unwrap().value, int(1));
        let min = lp_solve(&rows, &ivec(&[1, 1]), Sense::Minimize).unwrap();
        assert_eq!(min.optimum().unwrap().value, int(0));
    }

    #[test]
    fn unbounded_returns_improving_ray() {
        let rows = vec![LpRow::ge(ivec(&[1, 0]), int(0))];
        match lp_solve(&rows, &ivec(&[1, 0]), Sense::Maximize).unwrap() {
            LpOutcome::Unbounded { ray, .. } => assert!(ray[0].is_positive()),
            other => panic!("expected unbounded, got {other:?}"),
        }
    }

    #[test]
    fn redundant_equalities_and_negative_rhs() {
        let rows = vec![
            LpRow::eq(ivec(&[1, 1]), int(-1)),
            LpRow::eq(ivec(&[2, 2]), int(-2)),
            LpRow::le(ivec(&[1, 0]), ratio(-1, 3)),
            LpRow::ge(ivec(&[1, 0]), int(-5)),
        ];
        let out = lp_solve(&rows, &ivec(&[0, 1]), Sense::Maximize).unwrap();
        let opt = out.optimum().unwrap();
        assert_eq!(opt.value, int(4));
        assert_eq!(opt.point, ivec(&[-5, 4]));
    }

    #[test]
    fn dimension_mismatch_is_an_input_error() {
        let rows = vec![LpRow::le(ivec(&[1, 0, 0]), int(1))];
        assert!(lp_solve(&rows, &ivec(&[1, 0]), Sense::Maximize).is_err());
    }
}
