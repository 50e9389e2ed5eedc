//! Dense two-phase primal simplex with Bland's rule.
//!
//! Small, degenerate problems are the norm here (master problems of the
//! cutting-plane solver, brute-force oracles), so the solver favors
//! anti-cycling over speed and keeps the full tableau.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::dot;

const PIVOT_TOL: f64 = 1e-9;
const COST_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RowSense {
    Le,
    Eq,
    Ge,
}

/// `min cᵀx  s.t.  aᵢᵀx (≤ | = | ≥) bᵢ,  lower ≤ x ≤ upper`.
#[derive(Clone, Debug, PartialEq)]
pub struct LpProblem {
    pub c: Vec<f64>,
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    pub senses: Vec<RowSense>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl LpProblem {
    /// Objective `c` with every variable in `[0, ∞)` and no rows.
    pub fn minimize(c: Vec<f64>) -> Self {
        let n = c.len();
        LpProblem {
            c,
            a: Vec::new(),
            b: Vec::new(),
            senses: Vec::new(),
            lower: vec![0.0; n],
            upper: vec![f64::INFINITY; n],
        }
    }

    pub fn with_bounds(mut self, lower: Vec<f64>, upper: Vec<f64>) -> Self {
        self.lower = lower;
        self.upper = upper;
        self
    }

    pub fn add_row(&mut self, coeffs: Vec<f64>, sense: RowSense, rhs: f64) {
        self.a.push(coeffs);
        self.senses.push(sense);
        self.b.push(rhs);
    }

    pub fn num_vars(&self) -> usize {
        self.c.len()
    }

    fn validate(&self) -> Result<()> {
        let n = self.c.len();
        let m = self.a.len();
        let bad = |msg: &str| Err(Error::InvalidInput(format!("LP: {msg}")));
        if n == 0 {
            return bad("no variables");
        }
        if self.b.len() != m || self.senses.len() != m {
            return bad("row count mismatch");
        }
        if self.lower.len() != n || self.upper.len() != n {
            return bad("bound count mismatch");
        }
        if self.a.iter().any(|r| r.len() != n) {
            return bad("row length mismatch");
        }
        let finite = self.c.iter().chain(self.a.iter().flatten()).chain(&self.b);
        if finite.into_iter().any(|x| !x.is_finite()) {
            return bad("non-finite data");
        }
        if self.lower.iter().zip(&self.upper).any(|(l, u)| {
            l.is_nan() || u.is_nan() || *l == f64::INFINITY || *u == f64::NEG_INFINITY
        }) {
            return bad("invalid bounds");
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Optimal point; for `Unbounded` an improving ray.
    pub x: Vec<f64>,
    pub objective: f64,
    /// One multiplier per row with `c = Aᵀy + reduced_costs`; `≤` rows carry
    /// `y ≤ 0`, `≥` rows `y ≥ 0`. For `Infeasible` a Farkas-type vector.
    pub y_dual: Vec<f64>,
    pub reduced_costs: Vec<f64>,
}

impl LpSolution {
    /// Largest row or bound violation of `x`.
    pub fn primal_residual(&self, p: &LpProblem) -> f64 {
        let rows = p.a.iter().zip(&p.b).zip(&p.senses).map(|((row, &b), s)| {
            let v = dot(row, &self.x) - b;
            match s {
                RowSense::Le => v.max(0.0),
                RowSense::Ge => (-v).max(0.0),
                RowSense::Eq => v.abs(),
            }
        });
        let bounds = self
            .x
            .iter()
            .zip(p.lower.iter().zip(&p.upper))
            .map(|(x, (l, u))| (l - x).max(x - u).max(0.0));
        rows.chain(bounds).fold(0.0, f64::max)
    }

    /// Largest sign violation of the multipliers and reduced costs.
    pub fn dual_residual(&self, p: &LpProblem) -> f64 {
        let rows = self.y_dual.iter().zip(&p.senses).map(|(y, s)| match s {
            RowSense::Le => y.max(0.0),
            RowSense::Ge => (-y).max(0.0),
            RowSense::Eq => 0.0,
        });
        let bounds = self
            .reduced_costs
            .iter()
            .zip(p.lower.iter().zip(&p.upper))
            .map(|(d, (l, u))| {
                let low = if l.is_finite() { 0.0 } else { d.max(0.0) };
                let up = if u.is_finite() { 0.0 } else { (-d).max(0.0) };
                low.max(up)
            });
        rows.chain(bounds).fold(0.0, f64::max)
    }

    /// `|cᵀx − (bᵀy + Σ dⱼ·boundⱼ)|` with each reduced cost paired to the
    /// bound it prices.
    pub fn duality_gap(&self, p: &LpProblem) -> f64 {
        let bound_term: f64 = self
            .reduced_costs
            .iter()
            .zip(p.lower.iter().zip(&p.upper))
            .zip(&self.x)
            .map(|((&d, (&l, &u)), &x)| {
                if d > 0.0 && l.is_finite() {
                    d * l
                } else if d < 0.0 && u.is_finite() {
                    d * u
                } else {
                    d * x
                }
            })
            .sum();
        (self.objective - dot(&p.b, &self.y_dual) - bound_term).abs()
    }
}

#[derive(Clone, Copy, Debug)]
enum VarMap {
    Shift { col: usize, lo: f64 },
    Flip { col: usize, hi: f64 },
    Split { pos: usize, neg: usize },
}

struct Tableau {
    rows: Vec<Vec<f64>>,
    obj: Vec<f64>,
    basis: Vec<usize>,
    ncols: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> f64 {
        self.rows[i][self.ncols]
    }

    fn pivot(&mut self, r: usize, e: usize) {
        let p = self.rows[r][e];
        self.rows[r].iter_mut().for_each(|x| *x /= p);
        let prow = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                let f = row[e];
                if f != 0.0 {
                    row.iter_mut().zip(&prow).for_each(|(x, pv)| *x -= f * pv);
                    row[e] = 0.0;
                }
            }
        }
        let f = self.obj[e];
        if f != 0.0 {
            self.obj
                .iter_mut()
                .zip(&prow)
                .for_each(|(x, pv)| *x -= f * pv);
            self.obj[e] = 0.0;
        }
        self.basis[r] = e;
    }

    fn set_costs(&mut self, cost: &[f64]) {
        let mut obj = cost.to_vec();
        obj.push(0.0);
        for (row, &bv) in self.rows.iter().zip(&self.basis) {
            let cb = cost[bv];
            if cb != 0.0 {
                obj.iter_mut().zip(row).for_each(|(o, a)| *o -= cb * a);
            }
        }
        self.obj = obj;
    }

    /// Runs Bland pivots until optimal (`Ok(None)`) or an unbounded column
    /// is found (`Ok(Some(col))`).
    fn optimize(&mut self, allowed: usize, max_iter: usize) -> Result<Option<usize>> {
        for _ in 0..max_iter {
            let Some(e) = (0..allowed).find(|&j| self.obj[j] < -COST_TOL) else {
                return Ok(None);
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows.len() {
                let a = self.rows[i][e];
                if a > PIVOT_TOL {
                    let ratio = self.rhs(i).max(0.0) / a;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((bi, br)) => {
                            let tie = (ratio - br).abs() <= 1e-12 * br.abs().max(1.0);
                            if ratio < br && !tie || tie && self.basis[i] < self.basis[bi] {
                                Some((i, ratio))
                            } else {
                                Some((bi, br))
                            }
                        }
                    };
                }
            }
            match leave {
                None => return Ok(Some(e)),
                Some((r, _)) => self.pivot(r, e),
            }
        }
        Err(Error::NumericalBreakdown(format!(
            "simplex exceeded {max_iter} pivots"
        )))
    }
}

/// Solves `p` to optimality or proves it infeasible or unbounded.
pub fn solve_lp(p: &LpProblem) -> Result<LpSolution> {
    p.validate()?;
    let n = p.num_vars();

    let mut maps = Vec::with_capacity(n);
    let mut ncols_struct = 0;
    let mut bound_rows: Vec<(usize, f64)> = Vec::new();
    for j in 0..n {
        let (lo, hi) = (p.lower[j], p.upper[j]);
        let map = if lo.is_finite() {
            if hi.is_finite() {
                if hi < lo {
                    return Ok(infeasible(p, Vec::new()));
                }
                bound_rows.push((ncols_struct, hi - lo));
            }
            VarMap::Shift {
                col: ncols_struct,
                lo,
            }
        } else if hi.is_finite() {
            VarMap::Flip {
                col: ncols_struct,
                hi,
            }
        } else {
            ncols_struct += 1;
            VarMap::Split {
                pos: ncols_struct - 1,
                neg: ncols_struct,
            }
        };
        ncols_struct += 1;
        maps.push(map);
    }

    // Standardized rows: (coefficients over structural columns, sense, rhs).
    let mut std_rows: Vec<(Vec<f64>, RowSense, f64)> = Vec::new();
    let mut cost = vec![0.0; ncols_struct];
    for (j, m) in maps.iter().enumerate() {
        match *m {
            VarMap::Shift { col, .. } => {
                cost[col] = p.c[j];
            }
            VarMap::Flip { col, .. } => {
                cost[col] = -p.c[j];
            }
            VarMap::Split { pos, neg } => {
                cost[pos] = p.c[j];
                cost[neg] = -p.c[j];
            }
        }
    }
    for ((row, &b), &s) in p.a.iter().zip(&p.b).zip(&p.senses) {
        let mut coeffs = vec![0.0; ncols_struct];
        let mut rhs = b;
        for (j, m) in maps.iter().enumerate() {
            let a = row[j];
            match *m {
                VarMap::Shift { col, lo } => {
                    coeffs[col] = a;
                    rhs -= a * lo;
                }
                VarMap::Flip { col, hi } => {
                    coeffs[col] = -a;
                    rhs -= a * hi;
                }
                VarMap::Split { pos, neg } => {
                    coeffs[pos] = a;
                    coeffs[neg] = -a;
                }
            }
        }
        std_rows.push((coeffs, s, rhs));
    }
    for &(col, width) in &bound_rows {
        let mut coeffs = vec![0.0; ncols_struct];
        coeffs[col] = 1.0;
        std_rows.push((coeffs, RowSense::Le, width));
    }

    let m = std_rows.len();
    let nslack = std_rows.iter().filter(|r| r.1 != RowSense::Eq).count();
    let art0 = ncols_struct + nslack;
    let ncols = art0 + m;
    let mut rows = Vec::with_capacity(m);
    let mut sigma = Vec::with_capacity(m);
    let mut slack = ncols_struct;
    for (i, (coeffs, s, rhs)) in std_rows.into_iter().enumerate() {
        let mut row = vec![0.0; ncols + 1];
        row[..ncols_struct].copy_from_slice(&coeffs);
        match s {
            RowSense::Le => {
                row[slack] = 1.0;
                slack += 1;
            }
            RowSense::Ge => {
                row[slack] = -1.0;
                slack += 1;
            }
            RowSense::Eq => {}
        }
        row[ncols] = rhs;
        let sg = if rhs < 0.0 { -1.0 } else { 1.0 };
        if sg < 0.0 {
            row.iter_mut().for_each(|x| *x = -*x);
        }
        row[art0 + i] = 1.0;
        rows.push(row);
        sigma.push(sg);
    }

    let max_iter = 200 * (m + ncols) + 1000;
    let mut t = Tableau {
        rows,
        obj: Vec::new(),
        basis: (art0..art0 + m).collect(),
        ncols,
    };

    // Phase 1.
    let mut phase1_cost = vec![0.0; ncols];
    phase1_cost[art0..].iter_mut().for_each(|c| *c = 1.0);
    t.set_costs(&phase1_cost);
    t.optimize(art0, max_iter)?;
    let infeas: f64 = t
        .basis
        .iter()
        .enumerate()
        .filter(|(_, &bv)| bv >= art0)
        .map(|(i, _)| t.rhs(i).max(0.0))
        .sum();
    let bscale = p.b.iter().fold(1.0_f64, |a, b| a.max(b.abs()));
    if infeas > 1e-9 * bscale {
        let y: Vec<f64> = (0..p.a.len())
            .map(|i| sigma[i] * (1.0 - t.obj[art0 + i]))
            .collect();
        return Ok(infeasible(p, y));
    }
    for r in 0..m {
        if t.basis[r] >= art0 {
            if let Some(e) = (0..art0).find(|&j| t.rows[r][j].abs() > PIVOT_TOL) {
                t.pivot(r, e);
            }
        }
    }

    // Phase 2.
    let mut phase2_cost = cost.clone();
    phase2_cost.resize(ncols, 0.0);
    t.set_costs(&phase2_cost);
    let unbounded_col = t.optimize(art0, max_iter)?;

    let mut xs = vec![0.0; ncols];
    for (i, &bv) in t.basis.iter().enumerate() {
        xs[bv] = t.rhs(i);
    }
    if let Some(e) = unbounded_col {
        let mut dir = vec![0.0; ncols];
        dir[e] = 1.0;
        for (i, &bv) in t.basis.iter().enumerate() {
            dir[bv] = -t.rows[i][e];
        }
        let ray = recover(&maps, &dir, false);
        return Ok(LpSolution {
            status: LpStatus::Unbounded,
            x: ray,
            objective: f64::NEG_INFINITY,
            y_dual: vec![0.0; p.a.len()],
            reduced_costs: vec![0.0; n],
        });
    }
    let x = recover(&maps, &xs, true);
    let y_dual: Vec<f64> = (0..p.a.len())
        .map(|i| -sigma[i] * t.obj[art0 + i])
        .collect();
    let aty = crate::linalg::mat_t_vec(&p.a, &y_dual);
    let reduced_costs = if p.a.is_empty() {
        p.c.clone()
    } else {
        p.c.iter().zip(&aty).map(|(c, a)| c - a).collect()
    };
    Ok(LpSolution {
        status: LpStatus::Optimal,
        objective: dot(&p.c, &x),
        x,
        y_dual,
        reduced_costs,
    })
}

fn recover(maps: &[VarMap], xs: &[f64], with_offset: bool) -> Vec<f64> {
    maps.iter()
        .map(|m| match *m {
            VarMap::Shift { col, lo } => xs[col] + if with_offset { lo } else { 0.0 },
            VarMap::Flip { col, hi } => (if with_offset { hi } else { 0.0 }) - xs[col],
            VarMap::Split { pos, neg } => xs[pos] - xs[neg],
        })
        .collect()
}

fn infeasible(p: &LpProblem, y: Vec<f64>) -> LpSolution {
    let y = if y.is_empty() {
        vec![0.0; p.a.len()]
    } else {
        y
    };
    LpSolution {
        status: LpStatus::Infeasible,
        x: vec![0.0; p.num_vars()],
        objective: f64::INFINITY,
        y_dual: y,
        reduced_costs: vec![0.0; p.num_vars()],
    }
}
