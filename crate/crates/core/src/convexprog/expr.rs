use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dot, mat_t_vec, mat_vec, norm};

/// Convex function built from a fixed set of atoms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConvexExpr {
    /// `cᵀx + d`
    Affine {
        c: Vec<f64>,
        d: f64,
    },
    /// `½xᵀQx + cᵀx + d` with `Q` symmetric PSD.
    Quad {
        #[serde(rename = "Q")]
        q: Vec<Vec<f64>>,
        c: Vec<f64>,
        d: f64,
    },
    /// `‖Ax + b‖₂ − r`
    Norm2 {
        #[serde(rename = "A")]
        a: Vec<Vec<f64>>,
        b: Vec<f64>,
        r: f64,
    },
    Max(Vec<ConvexExpr>),
}

impl ConvexExpr {
    pub fn affine(c: Vec<f64>, d: f64) -> Self {
        ConvexExpr::Affine { c, d }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            ConvexExpr::Affine { c, d } => dot(c, x) + d,
            ConvexExpr::Quad { q, c, d } => 0.5 * dot(x, &mat_vec(q, x)) + dot(c, x) + d,
            ConvexExpr::Norm2 { a, b, r } => norm(&shifted(a, b, x)) - r,
            ConvexExpr::Max(args) => args
                .iter()
                .map(|g| g.eval(x))
                .fold(f64::NEG_INFINITY, f64::max),
        }
    }

    /// A subgradient at `x`. Zero at the kink of `Norm2`; the first maximal
    /// argument wins for `Max`.
    pub fn subgradient(&self, x: &[f64]) -> Vec<f64> {
        match self {
            ConvexExpr::Affine { c, .. } => c.clone(),
            ConvexExpr::Quad { q, c, .. } => {
                mat_vec(q, x).iter().zip(c).map(|(a, b)| a + b).collect()
            }
            ConvexExpr::Norm2 { a, b, .. } => {
                let u = shifted(a, b, x);
                let nu = norm(&u);
                if nu == 0.0 {
                    return vec![0.0; x.len()];
                }
                let u: Vec<f64> = u.iter().map(|v| v / nu).collect();
                mat_t_vec(a, &u)
            }
            ConvexExpr::Max(args) => {
                let mut best: Option<(f64, &ConvexExpr)> = None;
                for g in args {
                    let v = g.eval(x);
                    if best.is_none_or(|(bv, _)| v > bv) {
                        best = Some((v, g));
                    }
                }
                best.map_or_else(|| vec![0.0; x.len()], |(_, g)| g.subgradient(x))
            }
        }
    }

    /// `Some((c, d))` when the expression is a single affine atom.
    pub fn as_affine(&self) -> Option<(&[f64], f64)> {
        match self {
            ConvexExpr::Affine { c, d } => Some((c, *d)),
            _ => None,
        }
    }

    pub(crate) fn validate(&self, n: usize) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidInput(m));
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        match self {
            ConvexExpr::Affine { c, d } => {
                if c.len() != n || !finite(c) || !d.is_finite() {
                    return bad(format!("affine term needs {n} finite coefficients"));
                }
            }
            ConvexExpr::Quad { q, c, d } => {
                if c.len() != n || q.len() != n || q.iter().any(|r| r.len() != n) {
                    return bad(format!("quad term needs an {n}x{n} matrix"));
                }
                if !finite(c) || !d.is_finite() || q.iter().any(|r| !finite(r)) {
                    return bad("quad term has non-finite data".into());
                }
                for i in 0..n {
                    for j in 0..i {
                        if (q[i][j] - q[j][i]).abs() > 1e-10 {
                            return bad("quad matrix is not symmetric".into());
                        }
                    }
                }
                let m = nalgebra::DMatrix::from_fn(n, n, |i, j| 0.5 * (q[i][j] + q[j][i]));
                let min_eig = m
                    .symmetric_eigenvalues()
                    .iter()
                    .copied()
                    .fold(f64::INFINITY, f64::min);
                if min_eig < -1e-8 {
                    return bad(format!("quad matrix is not PSD (eigenvalue {min_eig:e})"));
                }
            }
            ConvexExpr::Norm2 { a, b, r } => {
                if a.is_empty() || a.len() != b.len() || a.iter().any(|row| row.len() != n) {
                    return bad(format!("norm2 term needs a k x {n} matrix and k offsets"));
                }
                if !finite(b) || !r.is_finite() || a.iter().any(|row| !finite(row)) {
                    return bad("norm2 term has non-finite data".into());
                }
            }
            ConvexExpr::Max(args) => {
                if args.is_empty() {
                    return bad("max of nothing".into());
                }
                for g in args {
                    g.validate(n)?;
                }
            }
        }
        Ok(())
    }
}

fn shifted(a: &[Vec<f64>], b: &[f64], x: &[f64]) -> Vec<f64> {
    mat_vec(a, x).iter().zip(b).map(|(u, v)| u + v).collect()
}
