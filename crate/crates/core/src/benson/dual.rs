use log::debug;

use super::{check_eps, next_vertex, Action, BensonOptions, TraceRecord};
use crate::convexprog::{kelley_gap, ProblemInstance, Scalarizer};
use crate::error::{Error, Result};
use crate::geometry::{dd_add_halfspace, Halfspace, Polyhedron};
use crate::linalg::unit;
use crate::projection::{error_bound, ApproxResult, Kind, Level};

/// `φ(y, y*) = Σᵢ yᵢy*ᵢ + y_{q+1}(1 − Σᵢ y*ᵢ) − y*_{q+1}`, sums over `i ≤ q`.
pub fn coupling_phi(y: &[f64], ystar: &[f64]) -> f64 {
    let q = y.len() - 1;
    let head: f64 = (0..q).map(|i| y[i] * ystar[i]).sum();
    let tail = 1.0 - ystar[..q].iter().sum::<f64>();
    head + y[q] * tail - ystar[q]
}

/// `w(t) = (t₁, …, t_q, 1 − Σᵢ tᵢ)`.
pub fn weight_map_w(t: &[f64]) -> Vec<f64> {
    let q = t.len() - 1;
    let mut w = t[..q].to_vec();
    w.push(1.0 - t[..q].iter().sum::<f64>());
    w
}

/// `(t₁, …, t_q, min w(t)ᵀΓ(x))`, using a certified lower bound for the
/// last coordinate.
pub fn dual_point_dstar(sc: &Scalarizer, t: &[f64]) -> Result<Vec<f64>> {
    let s = sc.p1(&weight_map_w(t))?;
    let mut d = t[..t.len() - 1].to_vec();
    d.push(s.lower_bound);
    Ok(d)
}

/// `{y* : φ(y, y*) ≥ 0}` for a fixed `y`.
pub fn phi_halfspace(y: &[f64]) -> Result<Halfspace> {
    let q = y.len() - 1;
    let mut a: Vec<f64> = (0..q).map(|i| y[i] - y[q]).collect();
    a.push(-1.0);
    Halfspace::new(a, -y[q])
}

/// The lower-image outer approximation dual to `{Γ(x̄)} + ℝ^{q+1}₊`, where
/// `x̄` solves `P₁(wbar)`.
pub fn initialize_dual_outer(sc: &Scalarizer, wbar: &[f64]) -> Result<Polyhedron> {
    let d = sc.q() + 1;
    if wbar.len() != d
        || wbar.iter().any(|w| !(*w > 0.0))
        || (wbar.iter().sum::<f64>() - 1.0).abs() > 1e-9
    {
        return Err(Error::InvalidInput(
            "wbar must be positive and sum to one".into(),
        ));
    }
    let xbar = sc.p1(wbar)?.x;
    let mut hs: Vec<Halfspace> = (0..d - 1)
        .map(|i| Halfspace::new(unit(d, i), 0.0))
        .collect::<Result<_>>()?;
    let mut sum = vec![-1.0; d];
    sum[d - 1] = 0.0;
    hs.push(Halfspace::new(sum, -1.0)?);
    hs.push(phi_halfspace(&sc.gamma(&xbar))?);
    Polyhedron::from_hrep(d, hs)?.complete()
}

/// Inner approximation `{y : w(t)ᵀy ≥ t_{q+1} for every vertex t}`.
pub fn dual_to_primal_inner(d_outer: &Polyhedron) -> Result<Polyhedron> {
    let d = d_outer.dim();
    let vrep = d_outer
        .vrep()
        .ok_or_else(|| Error::InvalidInput("dual outer set needs vertices".into()))?;
    let hs = vrep
        .vertices
        .iter()
        .map(|t| Halfspace::new(weight_map_w(t), t[d - 1]))
        .collect::<Result<Vec<_>>>()?;
    Polyhedron::from_hrep(d, hs)?.complete()
}

/// Shrinks an outer approximation of the lower image until each vertex `t`
/// satisfies `φ(Γ(x_t), t) ≥ −eps`, then maps it to an inner approximation
/// of the upper image.
pub fn run_dual(
    inst: &ProblemInstance,
    eps: f64,
    wbar: Option<&[f64]>,
    opts: &BensonOptions,
) -> Result<ApproxResult> {
    check_eps(eps)?;
    let d = inst.q + 1;
    let sc = Scalarizer::new(inst, kelley_gap(eps))?;
    let default_w = vec![1.0 / d as f64; d];
    let wbar = wbar.or(inst.wbar.as_deref()).unwrap_or(&default_w);
    let mut dpoly = initialize_dual_outer(&sc, wbar)?;
    let mut confirmed: Vec<Vec<f64>> = Vec::new();
    let mut trace = Vec::new();
    let mut cuts = 0;
    while let Some(t) = next_vertex(dpoly.vertices(), &confirmed, opts.selection).cloned() {
        let s = sc.p1(&weight_map_w(&t))?;
        let y = sc.gamma(&s.x);
        let phi = coupling_phi(&y, &t);
        if phi < -eps - opts.tie_tol {
            let cut = phi_halfspace(&y)?;
            debug!("dual: cut vertex {t:?} (phi = {phi})");
            cuts += 1;
            if cuts > opts.max_cuts {
                return Err(Error::IterationCap(opts.max_cuts));
            }
            dpoly = dd_add_halfspace(&dpoly, &cut)?;
            trace.push(TraceRecord {
                vertex: t,
                z: None,
                phi: Some(phi),
                action: Action::Cut,
                cut: Some(cut),
                support: y,
            });
        } else {
            debug!("dual: confirm vertex {t:?} (phi = {phi})");
            trace.push(TraceRecord {
                vertex: t.clone(),
                z: None,
                phi: Some(phi),
                action: Action::Confirm,
                cut: None,
                support: y,
            });
            confirmed.push(t);
        }
    }
    let p_inner = dual_to_primal_inner(&dpoly)?;
    Ok(ApproxResult {
        kind: Kind::Inner,
        eps,
        certified_bound: error_bound(inst.q, eps, Level::PLevel),
        p_level: p_inner,
        y_level: None,
        cuts,
        solves: sc.solves(),
        trace,
        d_outer: Some(dpoly),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::dot;

    #[test]
    fn phi_identity() {
        let y = [0.3, -1.2, 0.7];
        let t = [0.2, 0.5, -0.4];
        let direct = coupling_phi(&y, &t);
        let via_w = dot(&weight_map_w(&t), &y) - t[2];
        assert!((direct - via_w).abs() < 1e-15);
        assert_eq!(coupling_phi(&y, &[0.0, 0.0, 0.0]), 0.7);
        let v = coupling_phi(&[1.0, 0.0, -1.0], &[1.0 / 3.0, 1.0 / 3.0, 0.0]);
        assert!(v.abs() < 1e-15);
    }

    #[test]
    fn weight_map() {
        assert_eq!(weight_map_w(&[0.0, 0.0, 5.0]), vec![0.0, 0.0, 1.0]);
        assert_eq!(weight_map_w(&[1.0, 0.0, 5.0]), vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn phi_halfspace_matches_phi() {
        let y = [0.3, -1.2, 0.7];
        let h = phi_halfspace(&y).unwrap();
        for t in [[0.2, 0.5, -0.4], [0.0, 1.0, 2.0], [0.6, 0.1, 0.0]] {
            let scale = coupling_phi(&y, &t) / h.slack(&t);
            assert!((scale - scale.abs()).abs() < 1e-12);
        }
    }

    #[test]
    fn inner_from_orthant_dual() {
        let d = Polyhedron::from_hrep(
            2,
            vec![
                Halfspace::new(vec![1.0, 0.0], 0.0).unwrap(),
                Halfspace::new(vec![-1.0, 0.0], -1.0).unwrap(),
                Halfspace::new(vec![0.0, -1.0], 0.0).unwrap(),
            ],
        )
        .unwrap()
        .complete()
        .unwrap();
        let p = dual_to_primal_inner(&d).unwrap();
        assert_eq!(p.vertices().len(), 1);
        assert!(p.vertices()[0].iter().all(|v| v.abs() < 1e-15));
        assert_eq!(p.vrep().unwrap().rays.len(), 2);
    }
}
