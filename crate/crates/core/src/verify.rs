//! Reproduces the worked tightness examples and compares every measured
//! quantity with the expectations the generators embed.

use serde::Serialize;

use crate::benson::BensonOptions;
use crate::convexprog::Mode;
use crate::error::Result;
use crate::geometry::{same_vertex_set, Polyhedron, VRep};
use crate::instances::{generate, ExampleName, WorkedExample};
use crate::metrics::{hausdorff_nested, hausdorff_upper_images};
use crate::projection::{approximate_body, Algorithm, ApproxResult, Kind};

/// Tolerance for vertex coordinates and distances.
pub const VERIFY_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRow {
    pub example: String,
    pub q: usize,
    pub check: String,
    pub expected: f64,
    pub measured: f64,
    pub pass: bool,
}

/// Measured Hausdorff distance between a run's result and the reference
/// set carried by the example.
pub fn measured_distance(ex: &WorkedExample, res: &ApproxResult) -> Result<f64> {
    let q = ex.instance.q;
    let e = &ex.expect;
    if ex.instance.mode == Mode::Cpp {
        let reference = VRep::polytope(e.reference_y_vertices.clone());
        let got = res.y_level.as_ref().expect("cpp runs carry a Y-level set");
        let got = got.vrep().cloned().unwrap_or_default();
        let r = match res.kind {
            Kind::Outer => hausdorff_nested(&reference, &got)?,
            Kind::Inner => hausdorff_nested(&got, &reference)?,
        };
        return Ok(r.d_h);
    }
    let reference = Polyhedron::from_hrep(q + 1, e.reference_p_hrep.clone())?.complete()?;
    let r = match res.kind {
        Kind::Outer => hausdorff_upper_images(&reference, &res.p_level)?,
        Kind::Inner => hausdorff_upper_images(&res.p_level, &reference)?,
    };
    Ok(r.d_h)
}

fn row(ex: &WorkedExample, check: &str, expected: f64, measured: f64, pass: bool) -> CheckRow {
    CheckRow {
        example: ex.expect.name.clone(),
        q: ex.instance.q,
        check: check.into(),
        expected,
        measured,
        pass,
    }
}

/// Runs one example and returns its check rows. Solver failures surface
/// as `Err`.
pub fn verify_example(
    name: ExampleName,
    q: usize,
    options: &BensonOptions,
) -> Result<Vec<CheckRow>> {
    let ex = generate(name, q, None)?;
    let alg: Algorithm = ex.expect.algorithm.parse()?;
    let res = approximate_body(&ex.instance, ex.eps, alg, options)?;
    let mut rows = Vec::new();

    if let Some(c) = ex.expect.expected_cuts {
        rows.push(row(&ex, "cuts", c as f64, res.cuts as f64, res.cuts == c));
    }
    let (want, got) = if ex.instance.mode == Mode::Cpp {
        let y = res
            .y_level
            .as_ref()
            .map(|p| p.vertices().to_vec())
            .unwrap_or_default();
        (&ex.expect.expected_y_vertices, y)
    } else {
        (
            &ex.expect.expected_p_vertices,
            res.p_level.vertices().to_vec(),
        )
    };
    let same = same_vertex_set(want, &got, VERIFY_TOL);
    rows.push(row(
        &ex,
        "vertices",
        want.len() as f64,
        got.len() as f64,
        same,
    ));

    let d = measured_distance(&ex, &res)?;
    let dh = ex.expect.expected_dh;
    rows.push(row(&ex, "d_H", dh, d, (d - dh).abs() <= VERIFY_TOL));
    let bound = res.certified_bound;
    rows.push(row(
        &ex,
        "bound",
        dh,
        bound,
        (bound - dh).abs() <= VERIFY_TOL,
    ));
    Ok(rows)
}

/// All examples at each requested `q`. An example that fails to run is
/// reported as a single failing row.
pub fn verify_all(qs: &[usize], options: &BensonOptions) -> Vec<CheckRow> {
    let mut rows = Vec::new();
    for &q in qs {
        for name in ExampleName::ALL {
            if q < name.min_q() {
                continue;
            }
            match verify_example(name, q, options) {
                Ok(r) => rows.extend(r),
                Err(e) => {
                    log::error!("{} q={q}: {e}", name.as_str());
                    rows.push(CheckRow {
                        example: name.as_str().into(),
                        q,
                        check: "run".into(),
                        expected: 0.0,
                        measured: f64::NAN,
                        pass: false,
                    });
                }
            }
        }
    }
    rows
}
