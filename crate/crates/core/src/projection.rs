//! Convex projection driver: builds the multiobjective problem for
//! `Y = G[X]`, runs a Benson loop, and reads the approximation of `Y` off
//! the slice `eᵀy = 0`.

use serde::{Deserialize, Serialize};

use crate::benson::{dual, primal, BensonOptions, TraceRecord};
use crate::convexprog::{Mode, ProblemInstance};
use crate::error::{Error, Result};
use crate::geometry::{project_drop_last, slice_by_hyperplane, Polyhedron};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Outer,
    Inner,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Primal,
    Dual,
}

impl std::str::FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "primal" => Ok(Algorithm::Primal),
            "dual" => Ok(Algorithm::Dual),
            _ => Err(Error::InvalidInput(format!("unknown algorithm '{s}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Level {
    /// Upper image in `ℝ^{q+1}`.
    PLevel,
    /// Body `Y` in `ℝ^q`.
    YLevel,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApproxResult {
    pub kind: Kind,
    pub eps: f64,
    pub certified_bound: f64,
    pub p_level: Polyhedron,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y_level: Option<Polyhedron>,
    pub cuts: usize,
    pub solves: usize,
    #[serde(default)]
    pub trace: Vec<TraceRecord>,
    /// Final outer approximation of the lower image (dual runs only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_outer: Option<Polyhedron>,
}

impl ApproxResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("result serializes")
    }
}

/// `ε√(q+1)` at P-level, `ε√(q²+q−1)` at Y-level.
pub fn error_bound(q: usize, eps: f64, level: Level) -> f64 {
    let q = q as f64;
    match level {
        Level::PLevel => eps * (q + 1.0).sqrt(),
        Level::YLevel => eps * (q * q + q - 1.0).sqrt(),
    }
}

/// `√(q − 1/(q+1))`, the ratio of the Y-level to the P-level bound.
pub fn gamma_factor(q: usize) -> f64 {
    let q = q as f64;
    (q - 1.0 / (q + 1.0)).sqrt()
}

/// MOCP with `Γ(x) = (Gx; −eᵀGx)` over the same feasible set.
pub fn build_mocp(cpp: &ProblemInstance) -> Result<ProblemInstance> {
    if cpp.mode != Mode::Cpp {
        return Err(Error::InvalidInput(
            "build_mocp needs a cpp instance".into(),
        ));
    }
    cpp.validate()?;
    let mut m = cpp.clone();
    m.c = Some(cpp.objective_matrix());
    m.g = None;
    m.mode = Mode::Mocp;
    Ok(m)
}

/// `π[P ∩ {eᵀy = 0}]`.
pub fn extract_y(p_level: &Polyhedron, q: usize) -> Result<Polyhedron> {
    if p_level.dim() != q + 1 {
        return Err(Error::InvalidInput(
            "P-level set has the wrong dimension".into(),
        ));
    }
    let slice = slice_by_hyperplane(p_level, &vec![1.0; q + 1], 0.0)?;
    let v = project_drop_last(slice.vrep().expect("slice carries vertices"))?;
    Polyhedron::from_vrep(q, v)
}

/// Runs the chosen algorithm. CPP instances get a Y-level set and bound;
/// MOCP instances are passed through at P-level.
pub fn approximate_body(
    inst: &ProblemInstance,
    eps: f64,
    algorithm: Algorithm,
    options: &BensonOptions,
) -> Result<ApproxResult> {
    let mocp = match inst.mode {
        Mode::Cpp => build_mocp(inst)?,
        Mode::Mocp => inst.clone(),
    };
    let mut res = match algorithm {
        Algorithm::Primal => primal::run_primal(&mocp, eps, options)?,
        Algorithm::Dual => dual::run_dual(&mocp, eps, None, options)?,
    };
    if inst.mode == Mode::Cpp {
        res.y_level = Some(extract_y(&res.p_level, inst.q)?);
        res.certified_bound = error_bound(inst.q, eps, Level::YLevel);
    }
    Ok(res)
}

/// [`approximate_body`] over many instances, in parallel when enabled.
/// Results come back in input order.
pub fn approximate_many(
    jobs: &[(ProblemInstance, f64)],
    algorithm: Algorithm,
    options: &BensonOptions,
) -> Vec<Result<ApproxResult>> {
    crate::par::map_collect(jobs, |(inst, eps)| {
        approximate_body(inst, *eps, algorithm, options)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convexprog::Bounds;

    #[test]
    fn bounds() {
        assert!((error_bound(2, 0.25, Level::YLevel) - 5f64.sqrt() / 4.0).abs() < 1e-15);
        assert_eq!(error_bound(1, 0.3, Level::YLevel), 0.3);
        assert!((error_bound(3, 0.25, Level::PLevel) - 0.5).abs() < 1e-15);
        for q in 1..=10 {
            let r = error_bound(q, 0.7, Level::YLevel) / error_bound(q, 0.7, Level::PLevel);
            assert!((r - gamma_factor(q)).abs() < 1e-12);
        }
    }

    #[test]
    fn mocp_matrix() {
        let b = Bounds {
            lo: vec![0.0; 3],
            hi: vec![1.0; 3],
        };
        let g = vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]];
        let m = build_mocp(&ProblemInstance::cpp(g, vec![], b).unwrap()).unwrap();
        assert_eq!(
            m.c.unwrap(),
            vec![
                vec![1.0, 0.0, 0.0],
                vec![0.0, 1.0, 0.0],
                vec![-1.0, -1.0, 0.0]
            ]
        );
    }

    #[test]
    fn orthant_apex() {
        let y = extract_y(&Polyhedron::translated_orthant(&[0.0; 3]), 2).unwrap();
        assert_eq!(y.vertices(), &[vec![0.0, 0.0]]);
    }
}
