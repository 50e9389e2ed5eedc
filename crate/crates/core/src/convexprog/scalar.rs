use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::OnceLock;

use log::trace;

use super::{ConvexExpr, ProblemInstance};
use crate::error::{Error, Result};
use crate::geometry::FEAS_TOL;
use crate::linalg::{dot, mat_vec};
use crate::linprog::{solve_lp, LpProblem, LpSolution, LpStatus, RowSense};

pub const DEFAULT_GAP: f64 = 1e-7;
const KELLEY_CAP: usize = 500;
const BISECTION_STEPS: usize = 60;

/// Kelley gap used for a Benson run at tolerance `eps`.
pub fn kelley_gap(eps: f64) -> f64 {
    DEFAULT_GAP.min(eps * 1e-3)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalarSolution {
    /// Feasible point (after restoration).
    pub x: Vec<f64>,
    /// Objective at `x`: `wᵀΓ(x)` for `P₁`, `z` for `P₂`.
    pub value: f64,
    /// Certified lower bound on the optimal value.
    pub lower_bound: f64,
    pub z: Option<f64>,
    pub w_dual: Option<Vec<f64>>,
    pub iterations: usize,
    /// Largest constraint value at the final master point, before restoration.
    pub max_violation: f64,
}

struct KelleyRun {
    x: Vec<f64>,
    lower: f64,
    upper: f64,
    lp: LpSolution,
    iterations: usize,
    violation: f64,
}

/// Scalarization solver bound to one instance. Caches the objective matrix
/// and a Slater point, and counts solves.
pub struct Scalarizer<'a> {
    inst: &'a ProblemInstance,
    c: Vec<Vec<f64>>,
    gap: f64,
    nonlinear: Vec<&'a ConvexExpr>,
    slater: OnceLock<Result<Vec<f64>>>,
    solves: AtomicUsize,
}

impl<'a> Scalarizer<'a> {
    pub fn new(inst: &'a ProblemInstance, gap: f64) -> Result<Self> {
        inst.validate()?;
        if !(gap > 0.0) {
            return Err(Error::InvalidInput("Kelley gap must be positive".into()));
        }
        Ok(Scalarizer {
            inst,
            c: inst.objective_matrix(),
            gap,
            nonlinear: inst
                .constraints
                .iter()
                .filter(|g| g.as_affine().is_none())
                .collect(),
            slater: OnceLock::new(),
            solves: AtomicUsize::new(0),
        })
    }

    pub fn instance(&self) -> &ProblemInstance {
        self.inst
    }

    pub fn gap(&self) -> f64 {
        self.gap
    }

    pub fn q(&self) -> usize {
        self.inst.q
    }

    pub fn solves(&self) -> usize {
        self.solves.load(Ordering::Relaxed)
    }

    pub fn gamma(&self, x: &[f64]) -> Vec<f64> {
        mat_vec(&self.c, x)
    }

    /// `min wᵀΓ(x)` over `X`.
    pub fn p1(&self, w: &[f64]) -> Result<ScalarSolution> {
        self.check_len(w, "weight")?;
        self.solves.fetch_add(1, Ordering::Relaxed);
        let n = self.inst.n;
        let cost: Vec<f64> = (0..n)
            .map(|j| (0..w.len()).map(|i| w[i] * self.c[i][j]).sum())
            .collect();
        let lp = self.base_lp(cost.clone(), 0);
        let run = self.kelley(lp, None, &|x| dot(&cost, x))?;
        let mut x = run.x;
        if let Some(h) = self.inst.hint_for(w) {
            if self.inst.max_violation(h) <= FEAS_TOL && dot(&cost, h) - run.lower <= self.gap {
                x = h.to_vec();
            }
        }
        let value = dot(&cost, &x);
        trace!("P1 w={w:?} value={value} lower={}", run.lower);
        Ok(ScalarSolution {
            x,
            value,
            lower_bound: run.lower.min(value),
            z: None,
            w_dual: None,
            iterations: run.iterations,
            max_violation: run.violation,
        })
    }

    /// `min z  s.t.  Γ(x) − z·e ≤ v` over `X`, with the weights of the
    /// `Γ` rows recovered from the final master problem.
    pub fn p2(&self, v: &[f64]) -> Result<ScalarSolution> {
        self.check_len(v, "point")?;
        self.solves.fetch_add(1, Ordering::Relaxed);
        let n = self.inst.n;
        let mut cost = vec![0.0; n + 1];
        cost[n] = 1.0;
        let mut lp = LpProblem::minimize(cost);
        lp.lower = self.inst.bounds.lo.clone();
        lp.upper = self.inst.bounds.hi.clone();
        lp.lower.push(f64::NEG_INFINITY);
        lp.upper.push(f64::INFINITY);
        for (row, &vi) in self.c.iter().zip(v) {
            let mut r = row.clone();
            r.push(-1.0);
            lp.add_row(r, RowSense::Le, vi);
        }
        self.push_affine(&mut lp, 1);
        let shift = |x: &[f64]| {
            mat_vec(&self.c, x)
                .iter()
                .zip(v)
                .map(|(g, vi)| g - vi)
                .fold(f64::NEG_INFINITY, f64::max)
        };
        let run = self.kelley(lp, None, &shift)?;
        let mut w: Vec<f64> = run.lp.y_dual[..v.len()]
            .iter()
            .map(|y| (-y).max(0.0))
            .collect();
        let total: f64 = w.iter().sum();
        if !(total > 1e-12) {
            return Err(Error::NumericalBreakdown("P2 multipliers vanished".into()));
        }
        w.iter_mut().for_each(|wi| *wi /= total);
        trace!("P2 v={v:?} z={} lower={}", run.upper, run.lower);
        Ok(ScalarSolution {
            value: run.upper,
            lower_bound: run.lower.min(run.upper),
            z: Some(run.upper),
            x: run.x,
            w_dual: Some(w),
            iterations: run.iterations,
            max_violation: run.violation,
        })
    }

    /// A point with `maxᵢ gᵢ < 0`, computed once.
    pub fn slater_point(&self) -> Result<&[f64]> {
        self.slater
            .get_or_init(|| self.compute_slater())
            .as_ref()
            .map(Vec::as_slice)
            .map_err(Clone::clone)
    }

    pub fn restore(&self, x: &[f64]) -> Result<Vec<f64>> {
        if self.inst.max_g(x) <= 0.0 {
            return Ok(x.to_vec());
        }
        Ok(restore_feasibility(self.inst, x, self.slater_point()?))
    }

    fn compute_slater(&self) -> Result<Vec<f64>> {
        if let Some(x) = &self.inst.interior_point {
            return Ok(x.clone());
        }
        if self.inst.constraints.is_empty() {
            return Ok(self.inst.box_center());
        }
        let n = self.inst.n;
        let mut cost = vec![0.0; n + 1];
        cost[n] = 1.0;
        let mut lp = LpProblem::minimize(cost);
        lp.lower = self.inst.bounds.lo.clone();
        lp.upper = self.inst.bounds.hi.clone();
        lp.lower.push(-1.0);
        lp.upper.push(f64::INFINITY);
        for g in &self.inst.constraints {
            if let Some((c, d)) = g.as_affine() {
                let mut r = c.to_vec();
                r.push(-1.0);
                lp.add_row(r, RowSense::Le, -d);
            }
        }
        let run = self.kelley(lp, Some(n), &|x| self.inst.max_g(x))?;
        if run.upper >= -1e-9 {
            return Err(Error::NoInteriorPoint);
        }
        Ok(run.x)
    }

    fn check_len(&self, v: &[f64], what: &str) -> Result<()> {
        if v.len() != self.inst.q + 1 || v.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "{what} must have {} finite entries",
                self.inst.q + 1
            )));
        }
        Ok(())
    }

    fn base_lp(&self, cost: Vec<f64>, extra: usize) -> LpProblem {
        let mut lp = LpProblem::minimize(cost)
            .with_bounds(self.inst.bounds.lo.clone(), self.inst.bounds.hi.clone());
        self.push_affine(&mut lp, extra);
        lp
    }

    fn push_affine(&self, lp: &mut LpProblem, extra: usize) {
        for g in &self.inst.constraints {
            if let Some((c, d)) = g.as_affine() {
                let mut r = c.to_vec();
                r.resize(c.len() + extra, 0.0);
                lp.add_row(r, RowSense::Le, -d);
            }
        }
    }

    /// Cutting-plane loop over the box. With `t_col` the cuts read
    /// `g(x) ≤ t` and every master point is feasible; otherwise master
    /// points are pulled back into `X` before `upper` is evaluated.
    fn kelley(
        &self,
        mut lp: LpProblem,
        t_col: Option<usize>,
        upper: &dyn Fn(&[f64]) -> f64,
    ) -> Result<KelleyRun> {
        let n = self.inst.n;
        let mut best: Option<(Vec<f64>, f64)> = None;
        for iteration in 1..=KELLEY_CAP {
            let sol = solve_lp(&lp)?;
            match sol.status {
                LpStatus::Optimal => {}
                LpStatus::Infeasible => return Err(Error::InstanceInfeasible),
                LpStatus::Unbounded => {
                    return Err(Error::NumericalBreakdown("unbounded master problem".into()))
                }
            }
            let x = &sol.x[..n];
            let t = t_col.map_or(0.0, |c| sol.x[c]);
            let values: Vec<f64> = self.nonlinear.iter().map(|g| g.eval(x) - t).collect();
            let violation = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);

            let candidate = if t_col.is_some() || violation <= 0.0 {
                x.to_vec()
            } else {
                restore_feasibility(self.inst, x, self.slater_point()?)
            };
            let u = upper(&candidate);
            if best.as_ref().is_none_or(|(_, bu)| u < *bu) {
                best = Some((candidate, u));
            }
            let lower = sol.objective;
            let (bx, bu) = best.as_ref().expect("set above");

            let mut cut_idx: Vec<usize> = (0..values.len())
                .filter(|&i| values[i] > self.gap / 10.0)
                .collect();
            if cut_idx.is_empty() {
                cut_idx = (0..values.len()).filter(|&i| values[i] > 0.0).collect();
            }
            if bu - lower <= self.gap || cut_idx.is_empty() {
                return Ok(KelleyRun {
                    x: bx.clone(),
                    lower,
                    upper: *bu,
                    lp: sol,
                    iterations: iteration,
                    violation,
                });
            }
            for i in cut_idx {
                let g = self.nonlinear[i];
                let s = g.subgradient(x);
                let rhs = dot(&s, x) - g.eval(x);
                let mut row = s;
                row.resize(lp.num_vars(), 0.0);
                if let Some(c) = t_col {
                    row[c] = -1.0;
                }
                lp.add_row(row, RowSense::Le, rhs);
            }
        }
        Err(Error::NumericalBreakdown(format!(
            "Kelley did not close the gap in {KELLEY_CAP} iterations"
        )))
    }
}

/// `x_cand + λ(x_int − x_cand)` for the smallest `λ ∈ [0, 1]` (found by
/// bisection) that satisfies every constraint.
pub fn restore_feasibility(inst: &ProblemInstance, x_cand: &[f64], x_int: &[f64]) -> Vec<f64> {
    let at = |lambda: f64| -> Vec<f64> {
        x_cand
            .iter()
            .zip(x_int)
            .map(|(c, i)| c + lambda * (i - c))
            .collect()
    };
    if inst.max_g(x_cand) <= 0.0 {
        return x_cand.to_vec();
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if inst.max_g(&at(mid)) <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    at(hi)
}

pub fn solve_p1(inst: &ProblemInstance, w: &[f64]) -> Result<ScalarSolution> {
    Scalarizer::new(inst, DEFAULT_GAP)?.p1(w)
}

pub fn solve_p2(inst: &ProblemInstance, v: &[f64]) -> Result<ScalarSolution> {
    Scalarizer::new(inst, DEFAULT_GAP)?.p2(v)
}

pub fn find_slater_point(inst: &ProblemInstance) -> Result<Vec<f64>> {
    Scalarizer::new(inst, DEFAULT_GAP)?
        .slater_point()
        .map(<[f64]>::to_vec)
}
