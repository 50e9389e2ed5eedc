use log::debug;

use super::{check_eps, next_vertex, Action, BensonOptions, TraceRecord};
use crate::convexprog::{kelley_gap, ProblemInstance, Scalarizer};
use crate::error::{Error, Result};
use crate::geometry::{dd_add_halfspace, Halfspace, Polyhedron};
use crate::linalg::unit;
use crate::projection::{error_bound, ApproxResult, Kind, Level};

/// `{y} + ℝ^{q+1}₊` with `yᵢ` a lower bound on `min eᵢᵀΓ(x)`.
pub fn initialize_outer(sc: &Scalarizer) -> Result<Polyhedron> {
    let d = sc.q() + 1;
    let y = (0..d)
        .map(|i| sc.p1(&unit(d, i)).map(|s| s.lower_bound))
        .collect::<Result<Vec<f64>>>()?;
    Ok(Polyhedron::translated_orthant(&y))
}

/// Shrinks an outer approximation of the upper image until every vertex is
/// within `eps·e` of a point of `Γ[X]`.
pub fn run_primal(inst: &ProblemInstance, eps: f64, opts: &BensonOptions) -> Result<ApproxResult> {
    check_eps(eps)?;
    let sc = Scalarizer::new(inst, kelley_gap(eps))?;
    let mut poly = initialize_outer(&sc)?;
    let mut confirmed: Vec<Vec<f64>> = Vec::new();
    let mut trace = Vec::new();
    let mut cuts = 0;
    while let Some(v) = next_vertex(poly.vertices(), &confirmed, opts.selection).cloned() {
        let s = sc.p2(&v)?;
        let z = s.z.expect("P2 sets z");
        let support = sc.gamma(&s.x);
        if z > eps + opts.tie_tol {
            let w = s.w_dual.expect("P2 sets weights");
            let beta = sc.p1(&w)?.lower_bound;
            let cut = Halfspace::new(w, beta)?;
            debug!("primal: cut vertex {v:?} (z = {z}) with {cut:?}");
            cuts += 1;
            if cuts > opts.max_cuts {
                return Err(Error::IterationCap(opts.max_cuts));
            }
            poly = dd_add_halfspace(&poly, &cut)?;
            trace.push(TraceRecord {
                vertex: v,
                z: Some(z),
                phi: None,
                action: Action::Cut,
                cut: Some(cut),
                support,
            });
        } else {
            debug!("primal: confirm vertex {v:?} (z = {z})");
            trace.push(TraceRecord {
                vertex: v.clone(),
                z: Some(z),
                phi: None,
                action: Action::Confirm,
                cut: None,
                support,
            });
            confirmed.push(v);
        }
    }
    Ok(ApproxResult {
        kind: Kind::Outer,
        eps,
        certified_bound: error_bound(inst.q, eps, Level::PLevel),
        p_level: poly,
        y_level: None,
        cuts,
        solves: sc.solves(),
        trace,
        d_outer: None,
    })
}
