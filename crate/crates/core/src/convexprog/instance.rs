use serde::{Deserialize, Serialize};

use super::ConvexExpr;
use crate::error::{Error, Result};
use crate::linalg::{mat_vec, rank};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Cpp,
    Mocp,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

/// Preferred optimal point of `P₁(w)` for a specific weight `w`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hint {
    pub w: Vec<f64>,
    pub x: Vec<f64>,
}

/// `X = {x ∈ box : gᵢ(x) ≤ 0}` together with either a projection matrix `G`
/// (CPP) or a full objective matrix `C` (MOCP).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProblemInstance {
    pub mode: Mode,
    pub n: usize,
    pub q: usize,
    #[serde(rename = "G", default, skip_serializing_if = "Option::is_none")]
    pub g: Option<Vec<Vec<f64>>>,
    #[serde(rename = "C", default, skip_serializing_if = "Option::is_none")]
    pub c: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub constraints: Vec<ConvexExpr>,
    #[serde(rename = "box")]
    pub bounds: Bounds,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interior_point: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub hints: Vec<Hint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wbar: Option<Vec<f64>>,
}

impl ProblemInstance {
    pub fn cpp(g: Vec<Vec<f64>>, constraints: Vec<ConvexExpr>, bounds: Bounds) -> Result<Self> {
        let q = g.len();
        let n = g.first().map_or(0, Vec::len);
        let inst = ProblemInstance {
            mode: Mode::Cpp,
            n,
            q,
            g: Some(g),
            c: None,
            constraints,
            bounds,
            interior_point: None,
            hints: Vec::new(),
            wbar: None,
        };
        inst.validate()?;
        Ok(inst)
    }

    pub fn mocp(c: Vec<Vec<f64>>, constraints: Vec<ConvexExpr>, bounds: Bounds) -> Result<Self> {
        let q = c.len().saturating_sub(1);
        let n = c.first().map_or(0, Vec::len);
        let inst = ProblemInstance {
            mode: Mode::Mocp,
            n,
            q,
            g: None,
            c: Some(c),
            constraints,
            bounds,
            interior_point: None,
            hints: Vec::new(),
            wbar: None,
        };
        inst.validate()?;
        Ok(inst)
    }

    pub fn with_interior_point(mut self, x: Vec<f64>) -> Result<Self> {
        self.interior_point = Some(x);
        self.validate()?;
        Ok(self)
    }

    pub fn with_hint(mut self, w: Vec<f64>, x: Vec<f64>) -> Self {
        self.hints.push(Hint { w, x });
        self
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let inst: ProblemInstance = serde_json::from_str(s)
            .map_err(|e| Error::InvalidInput(format!("instance JSON: {e}")))?;
        inst.validate()?;
        Ok(inst)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidInput(m.to_string()));
        let (n, q) = (self.n, self.q);
        if n == 0 || q == 0 {
            return bad("n and q must be positive");
        }
        let matrix_ok = |m: &Vec<Vec<f64>>, rows: usize| {
            m.len() == rows
                && m.iter()
                    .all(|r| r.len() == n && r.iter().all(|v| v.is_finite()))
        };
        match self.mode {
            Mode::Cpp => {
                let Some(g) = &self.g else {
                    return bad("cpp instance needs G");
                };
                if !matrix_ok(g, q) {
                    return bad("G must be a finite q x n matrix");
                }
                if rank(g, 1e-8) < q {
                    return Err(Error::RankDeficient);
                }
            }
            Mode::Mocp => {
                let Some(c) = &self.c else {
                    return bad("mocp instance needs C");
                };
                if !matrix_ok(c, q + 1) {
                    return bad("C must be a finite (q+1) x n matrix");
                }
            }
        }
        let Bounds { lo, hi } = &self.bounds;
        if lo.len() != n || hi.len() != n {
            return bad("box dimension mismatch");
        }
        if lo
            .iter()
            .zip(hi)
            .any(|(l, h)| !l.is_finite() || !h.is_finite() || l > h)
        {
            return bad("box must be finite and nonempty");
        }
        for g in &self.constraints {
            g.validate(n)?;
        }
        if let Some(x) = &self.interior_point {
            if x.len() != n {
                return bad("interior point dimension mismatch");
            }
            if x.iter()
                .zip(lo.iter().zip(hi))
                .any(|(v, (l, h))| v <= l || v >= h)
            {
                return bad("interior point must lie strictly inside the box");
            }
            if self.max_violation(x) >= -1e-9 {
                return bad("interior point is not strictly feasible");
            }
        }
        for h in &self.hints {
            if h.w.len() != q + 1 || h.x.len() != n {
                return bad("hint dimension mismatch");
            }
        }
        if let Some(w) = &self.wbar {
            if w.len() != q + 1 {
                return bad("wbar dimension mismatch");
            }
        }
        Ok(())
    }

    /// The `(q+1) × n` matrix of `Γ`: `C` itself, or `[G; −eᵀG]`.
    pub fn objective_matrix(&self) -> Vec<Vec<f64>> {
        match self.mode {
            Mode::Mocp => self.c.clone().expect("validated"),
            Mode::Cpp => {
                let g = self.g.as_ref().expect("validated");
                let mut c = g.clone();
                let last = (0..self.n)
                    .map(|j| -g.iter().map(|r| r[j]).sum::<f64>())
                    .collect();
                c.push(last);
                c
            }
        }
    }

    pub fn gamma(&self, x: &[f64]) -> Vec<f64> {
        mat_vec(&self.objective_matrix(), x)
    }

    /// `max(maxᵢ gᵢ(x), box violation)`; `−∞` when there is nothing to violate.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        self.max_g(x).max(self.box_violation(x))
    }

    pub(crate) fn max_g(&self, x: &[f64]) -> f64 {
        self.constraints
            .iter()
            .map(|g| g.eval(x))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub(crate) fn box_violation(&self, x: &[f64]) -> f64 {
        let Bounds { lo, hi } = &self.bounds;
        x.iter()
            .zip(lo.iter().zip(hi))
            .map(|(v, (l, h))| (l - v).max(v - h))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn box_center(&self) -> Vec<f64> {
        let Bounds { lo, hi } = &self.bounds;
        lo.iter().zip(hi).map(|(l, h)| 0.5 * (l + h)).collect()
    }

    pub(crate) fn hint_for(&self, w: &[f64]) -> Option<&[f64]> {
        self.hints
            .iter()
            .find(|h| h.w.iter().zip(w).all(|(a, b)| (a - b).abs() <= 1e-9))
            .map(|h| h.x.as_slice())
    }
}
