//! Generators for the worked tightness examples and for random test
//! families. Worked examples come with machine-readable expectations.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::convexprog::{Bounds, ConvexExpr, ProblemInstance};
use crate::error::{Error, Result};
use crate::geometry::{dd_h_to_v, dd_v_to_h, Halfspace, Polyhedron, VRep};
use crate::linalg::{mat_vec, rank, unit};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Expectations {
    pub name: String,
    /// `"primal"` or `"dual"`.
    pub algorithm: String,
    pub q: usize,
    pub eps: f64,
    #[serde(default)]
    pub expected_y_vertices: Vec<Vec<f64>>,
    #[serde(default)]
    pub expected_p_vertices: Vec<Vec<f64>>,
    pub expected_dh: f64,
    pub expected_cuts: Option<usize>,
    pub reference_p_hrep: Vec<Halfspace>,
    #[serde(default)]
    pub reference_y_vertices: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WorkedExample {
    pub instance: ProblemInstance,
    pub eps: f64,
    pub expect: Expectations,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExampleName {
    PrimalMocp,
    PrimalCpp,
    DualCpp,
    DualMocp,
}

impl ExampleName {
    pub const ALL: [ExampleName; 4] = [
        ExampleName::PrimalMocp,
        ExampleName::PrimalCpp,
        ExampleName::DualCpp,
        ExampleName::DualMocp,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ExampleName::PrimalMocp => "primal-mocp",
            ExampleName::PrimalCpp => "primal-cpp",
            ExampleName::DualCpp => "dual-cpp",
            ExampleName::DualMocp => "dual-mocp",
        }
    }

    pub fn min_q(self) -> usize {
        match self {
            ExampleName::PrimalCpp => 2,
            _ => 1,
        }
    }
}

impl std::str::FromStr for ExampleName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ExampleName::ALL
            .into_iter()
            .find(|e| e.as_str() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown example '{s}'")))
    }
}

/// Default ε of the dual MOCP example.
pub const DUAL_MOCP_EPS: f64 = 1e-3;

pub fn generate(name: ExampleName, q: usize, eps: Option<f64>) -> Result<WorkedExample> {
    if q < name.min_q() {
        return Err(Error::InvalidInput(format!(
            "{} needs q >= {}",
            name.as_str(),
            name.min_q()
        )));
    }
    match name {
        ExampleName::PrimalMocp => gen_primal_tight_mocp(q),
        ExampleName::PrimalCpp => gen_primal_tight_cpp(q),
        ExampleName::DualCpp => gen_dual_tight_cpp(q),
        ExampleName::DualMocp => gen_dual_tight_mocp(q, eps.unwrap_or(DUAL_MOCP_EPS)),
    }
}

fn affine_le(c: Vec<f64>, rhs: f64) -> ConvexExpr {
    ConvexExpr::affine(c, -rhs)
}

fn identity(n: usize) -> Vec<Vec<f64>> {
    (0..n).map(|i| unit(n, i)).collect()
}

/// `[G; −eᵀG]` applied to `x`.
fn lift(g: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    let mut y = mat_vec(g, x);
    y.push(-y.iter().sum::<f64>());
    y
}

/// H-representation of `conv(points) + ℝᵈ₊`.
pub fn upper_image_hrep(points: &[Vec<f64>]) -> Result<Vec<Halfspace>> {
    let d = points.first().map_or(0, Vec::len);
    let vrep = VRep {
        vertices: points.to_vec(),
        rays: (0..d).map(|i| unit(d, i)).collect(),
    };
    dd_v_to_h(&vrep, d)
}

/// Upper image `Γ[X] + ℝ^{q+1}₊` of a polyhedral instance.
pub fn reference_upper_image(inst: &ProblemInstance) -> Result<Polyhedron> {
    let c = inst.objective_matrix();
    let images: Vec<Vec<f64>> = polyhedral_vertices(inst)?
        .iter()
        .map(|x| mat_vec(&c, x))
        .collect();
    let d = inst.q + 1;
    let vrep = VRep {
        vertices: images,
        rays: (0..d).map(|i| unit(d, i)).collect(),
    };
    Polyhedron::from_vrep(d, vrep)?.complete()
}

/// `Y = G[X]` of a polyhedral CPP instance, as the hull of the images of
/// the vertices of `X`, reduced to its extreme points.
pub fn exact_projection(inst: &ProblemInstance) -> Result<Polyhedron> {
    let g = inst
        .g
        .as_ref()
        .ok_or_else(|| Error::InvalidInput("exact projection needs a cpp instance".into()))?;
    let images: Vec<Vec<f64>> = polyhedral_vertices(inst)?
        .iter()
        .map(|x| mat_vec(g, x))
        .collect();
    let hrep = dd_v_to_h(&VRep::polytope(images), inst.q)?;
    let vrep = dd_h_to_v(&hrep, inst.q)?;
    Polyhedron::from_parts(inst.q, Some(hrep), Some(vrep))
}

/// Vertices of `X` when every constraint is affine.
pub fn polyhedral_vertices(inst: &ProblemInstance) -> Result<Vec<Vec<f64>>> {
    let n = inst.n;
    let mut hs = Vec::new();
    for g in &inst.constraints {
        let (c, d) = g
            .as_affine()
            .ok_or_else(|| Error::InvalidInput("instance is not polyhedral".into()))?;
        if c.iter().any(|v| *v != 0.0) {
            hs.push(Halfspace::new(c.iter().map(|v| -v).collect(), d)?);
        }
    }
    for j in 0..n {
        hs.push(Halfspace::new(unit(n, j), inst.bounds.lo[j])?);
        hs.push(Halfspace::new(
            unit(n, j).iter().map(|v| -v).collect(),
            -inst.bounds.hi[j],
        )?);
    }
    Ok(dd_h_to_v(&hs, n)?.vertices)
}

/// MOCP whose upper image is `{y : y ≥ −e/(q+1), eᵀy ≥ 0}`, with ε = 1/(q+1).
///
/// `X ⊂ ℝ^q` parametrizes the simplex `conv{eⁱ − e/(q+1)}` through its
/// first `q` coordinates and `Γ(x) = (x; −eᵀx)`.
pub fn gen_primal_tight_mocp(q: usize) -> Result<WorkedExample> {
    let s = 1.0 / (q + 1) as f64;
    let eps = s;
    let mut c = identity(q);
    c.push(vec![-1.0; q]);
    let mut constraints: Vec<ConvexExpr> = (0..q)
        .map(|i| affine_le(unit(q, i).iter().map(|v| -v).collect(), s))
        .collect();
    constraints.push(affine_le(vec![1.0; q], s));
    let instance = ProblemInstance::mocp(
        c,
        constraints,
        Bounds {
            lo: vec![-1.0; q],
            hi: vec![2.0; q],
        },
    )?
    .with_interior_point(vec![0.0; q])?;

    let d = q + 1;
    let mut hrep: Vec<Halfspace> = (0..d)
        .map(|i| Halfspace::new(unit(d, i), -s))
        .collect::<Result<_>>()?;
    hrep.push(Halfspace::new(vec![1.0; d], 0.0)?);
    let expect = Expectations {
        name: ExampleName::PrimalMocp.as_str().into(),
        algorithm: "primal".into(),
        q,
        eps,
        expected_y_vertices: Vec::new(),
        expected_p_vertices: vec![vec![-s; d]],
        expected_dh: eps * (d as f64).sqrt(),
        expected_cuts: Some(0),
        reference_p_hrep: hrep,
        reference_y_vertices: Vec::new(),
    };
    Ok(WorkedExample {
        instance,
        eps,
        expect,
    })
}

/// CPP with `G = I` whose body is the simplex with vertices `0`, `eⁱ`
/// (`i < q`) and `u = (1, …, 1, 2)/(q+2)`, at ε = 1/(q+2).
pub fn gen_primal_tight_cpp(q: usize) -> Result<WorkedExample> {
    if q < 2 {
        return Err(Error::InvalidInput("primal-cpp needs q >= 2".into()));
    }
    let qf = q as f64;
    let eps = 1.0 / (qf + 2.0);
    let mut constraints = vec![affine_le(unit(q, q - 1).iter().map(|v| -v).collect(), 0.0)];
    for i in 0..q - 1 {
        let mut c = vec![0.0; q];
        c[q - 1] = 1.0;
        c[i] = -2.0;
        constraints.push(affine_le(c, 0.0));
    }
    let mut c = vec![1.0; q];
    c[q - 1] = 1.5;
    constraints.push(affine_le(c, 1.0));
    let mut interior = vec![1.0 / (4.0 * qf); q];
    interior[q - 1] = 1.0 / (8.0 * qf);
    let instance = ProblemInstance::cpp(
        identity(q),
        constraints,
        Bounds {
            lo: vec![-1.0; q],
            hi: vec![2.0; q],
        },
    )?
    .with_interior_point(interior)?;

    let mut u = vec![eps; q];
    u[q - 1] = 2.0 * eps;
    let mut y_ref = vec![vec![0.0; q]];
    y_ref.extend((0..q - 1).map(|i| unit(q, i)));
    y_ref.push(u);
    let mut y_outer = vec![vec![0.0; q]];
    y_outer.extend((0..q).map(|i| unit(q, i)));
    let g = identity(q);
    let lifted: Vec<Vec<f64>> = y_ref.iter().map(|y| lift(&g, y)).collect();
    let expect = Expectations {
        name: ExampleName::PrimalCpp.as_str().into(),
        algorithm: "primal".into(),
        q,
        eps,
        expected_y_vertices: y_outer,
        expected_p_vertices: Vec::new(),
        expected_dh: eps * (qf * qf + qf - 1.0).sqrt(),
        expected_cuts: Some(1),
        reference_p_hrep: upper_image_hrep(&lifted)?,
        reference_y_vertices: y_ref,
    };
    Ok(WorkedExample {
        instance,
        eps,
        expect,
    })
}

/// The standard simplex as a CPP with `G = I` at ε = 1/(q+1), with the
/// centroid-like representative `e/(q+1)` attached as the `P₁(e/(q+1))`
/// hint.
pub fn gen_dual_tight_cpp(q: usize) -> Result<WorkedExample> {
    let qf = q as f64;
    let eps = 1.0 / (qf + 1.0);
    let mut constraints: Vec<ConvexExpr> = (0..q)
        .map(|i| affine_le(unit(q, i).iter().map(|v| -v).collect(), 0.0))
        .collect();
    constraints.push(affine_le(vec![1.0; q], 1.0));
    let wbar = vec![eps; q + 1];
    let mut instance = ProblemInstance::cpp(
        identity(q),
        constraints,
        Bounds {
            lo: vec![-0.5; q],
            hi: vec![1.5; q],
        },
    )?
    .with_interior_point(vec![1.0 / (2.0 * qf); q])?
    .with_hint(wbar.clone(), vec![eps; q]);
    instance.wbar = Some(wbar);

    let mut y_ref = vec![vec![0.0; q]];
    y_ref.extend((0..q).map(|i| unit(q, i)));
    let g = identity(q);
    let lifted: Vec<Vec<f64>> = y_ref.iter().map(|y| lift(&g, y)).collect();
    let expect = Expectations {
        name: ExampleName::DualCpp.as_str().into(),
        algorithm: "dual".into(),
        q,
        eps,
        expected_y_vertices: vec![vec![eps; q]],
        expected_p_vertices: vec![lift(&g, &vec![eps; q])],
        expected_dh: eps * (qf * qf + qf - 1.0).sqrt(),
        expected_cuts: Some(0),
        reference_p_hrep: upper_image_hrep(&lifted)?,
        reference_y_vertices: y_ref,
    };
    Ok(WorkedExample {
        instance,
        eps,
        expect,
    })
}

/// H-representation of the lower image of [`gen_dual_tight_cpp`].
pub fn dual_tight_cpp_lower_image(q: usize) -> Result<Vec<Halfspace>> {
    let d = q + 1;
    let mut hs = Vec::new();
    for j in 0..q {
        hs.push(Halfspace::new(unit(d, j), 0.0)?);
    }
    let mut sum = vec![-1.0; d];
    sum[q] = 0.0;
    hs.push(Halfspace::new(sum, -1.0)?);
    for j in 0..q {
        // y*_{q+1} ≤ y*_j + Σ y*_i − 1
        let mut a = vec![1.0; d];
        a[j] = 2.0;
        a[q] = -1.0;
        hs.push(Halfspace::new(a, 1.0)?);
    }
    hs.push(Halfspace::new(
        unit(d, q).iter().map(|v| -v).collect(),
        0.0,
    )?);
    Ok(hs)
}

/// Vertices `x¹, …, x^{q+1}` (`xⁱ = (1/i)Σ_{j≤i} eʲ`) and the apex `x⁰` of
/// the dual MOCP example, in that order with `x⁰` first.
pub fn dual_tight_mocp_points(q: usize, eps: f64) -> Vec<Vec<f64>> {
    let d = q + 1;
    let xs: Vec<Vec<f64>> = (1..=d)
        .map(|i| {
            (0..d)
                .map(|j| if j < i { 1.0 / i as f64 } else { 0.0 })
                .collect()
        })
        .collect();
    let x0: Vec<f64> = (0..d)
        .map(|j| xs.iter().map(|x| x[j]).sum::<f64>() / d as f64 - eps)
        .collect();
    std::iter::once(x0).chain(xs).collect()
}

/// MOCP with `Γ = I` on the simplex `S = conv{x⁰, …, x^{q+1}}`, a weight
/// `wbar` close to `e¹`, and hints `e^{k+1} ↦ x^k` for the tied weighted-sum
/// problems along the reference trace.
pub fn gen_dual_tight_mocp(q: usize, eps: f64) -> Result<WorkedExample> {
    if !(eps > 0.0) {
        return Err(Error::InvalidInput("eps must be positive".into()));
    }
    let d = q + 1;
    let pts = dual_tight_mocp_points(q, eps);
    let p_hrep = upper_image_hrep(&pts)?;
    let p_vertices = dd_h_to_v(&p_hrep, d)?.vertices;
    let all_vertices = pts.iter().all(|x| {
        p_vertices
            .iter()
            .any(|v| crate::linalg::max_abs_diff(v, x) <= 1e-9)
    });
    if !all_vertices || p_vertices.len() != pts.len() {
        return Err(Error::EpsTooLarge(eps));
    }

    let s_hrep = dd_v_to_h(&VRep::polytope(pts.clone()), d)?;
    let constraints = s_hrep
        .iter()
        .map(|h| ConvexExpr::affine(h.a.iter().map(|v| -v).collect(), h.b))
        .collect();
    let centroid: Vec<f64> = (0..d)
        .map(|j| pts.iter().map(|x| x[j]).sum::<f64>() / pts.len() as f64)
        .collect();
    let mut instance = ProblemInstance::mocp(
        identity(d),
        constraints,
        Bounds {
            lo: vec![-1.0; d],
            hi: vec![2.0; d],
        },
    )?
    .with_interior_point(centroid)?;
    let raw: Vec<f64> = (0..d)
        .map(|i| if i == 0 { 1.0 + 1e-3 } else { 1e-3 })
        .collect();
    let total: f64 = raw.iter().sum();
    instance.wbar = Some(raw.iter().map(|v| v / total).collect());
    for k in 1..=q {
        instance = instance.with_hint(unit(d, k), pts[k].clone());
    }

    let expect = Expectations {
        name: ExampleName::DualMocp.as_str().into(),
        algorithm: "dual".into(),
        q,
        eps,
        expected_y_vertices: Vec::new(),
        expected_p_vertices: pts[1..].to_vec(),
        expected_dh: eps * (d as f64).sqrt(),
        expected_cuts: Some(q),
        reference_p_hrep: p_hrep,
        reference_y_vertices: Vec::new(),
    };
    Ok(WorkedExample {
        instance,
        eps,
        expect,
    })
}

/// Random full-dimensional polytope `X ⊂ ℝⁿ` cut by `m` halfspaces around
/// an interior point (plus the faces of a unit-radius cube around it), and
/// a random full-row-rank `G`.
pub fn gen_random_polytope_cpp(q: usize, n: usize, m: usize, seed: u64) -> Result<ProblemInstance> {
    if q == 0 || q > n || m < n + 1 {
        return Err(Error::InvalidInput("need 1 <= q <= n and m >= n+1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let center: Vec<f64> = (0..n).map(|_| rng.gen_range(-0.5..0.5)).collect();
    let mut constraints = Vec::with_capacity(m + 2 * n);
    for _ in 0..m {
        let a = loop {
            let a: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let na = crate::linalg::norm(&a);
            if na > 0.1 {
                break a.iter().map(|v| v / na).collect::<Vec<f64>>();
            }
        };
        let offset = crate::linalg::dot(&a, &center) + rng.gen_range(0.2..0.8);
        constraints.push(affine_le(a, offset));
    }
    for j in 0..n {
        constraints.push(affine_le(unit(n, j), center[j] + 1.0));
        constraints.push(affine_le(
            unit(n, j).iter().map(|v| -v).collect(),
            1.0 - center[j],
        ));
    }
    let g = loop {
        let g: Vec<Vec<f64>> = (0..q)
            .map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        if rank(&g, 1e-3) == q {
            break g;
        }
    };
    let bounds = Bounds {
        lo: center.iter().map(|c| c - 1.5).collect(),
        hi: center.iter().map(|c| c + 1.5).collect(),
    };
    ProblemInstance::cpp(g, constraints, bounds)?.with_interior_point(center)
}

/// Unit ball `{‖x‖₂ ≤ 1}` with `G = I`.
pub fn unit_ball_cpp(q: usize) -> Result<ProblemInstance> {
    let ball = ConvexExpr::Norm2 {
        a: identity(q),
        b: vec![0.0; q],
        r: 1.0,
    };
    ProblemInstance::cpp(
        identity(q),
        vec![ball],
        Bounds {
            lo: vec![-1.5; q],
            hi: vec![1.5; q],
        },
    )?
    .with_interior_point(vec![0.0; q])
}

/// Instance with `X = {x0}`, encoded by a degenerate box.
pub fn singleton_cpp(g: Vec<Vec<f64>>, x0: Vec<f64>) -> Result<ProblemInstance> {
    ProblemInstance::cpp(
        g,
        Vec::new(),
        Bounds {
            lo: x0.clone(),
            hi: x0,
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::same_vertex_set;

    #[test]
    fn primal_mocp_vertices() {
        for q in [1, 2] {
            let ex = gen_primal_tight_mocp(q).unwrap();
            let s = 1.0 / (q + 1) as f64;
            let c = ex.instance.objective_matrix();
            let images: Vec<Vec<f64>> = polyhedral_vertices(&ex.instance)
                .unwrap()
                .iter()
                .map(|x| mat_vec(&c, x))
                .collect();
            let expected: Vec<Vec<f64>> = (0..=q)
                .map(|i| (0..=q).map(|j| if i == j { 1.0 - s } else { -s }).collect())
                .collect();
            assert!(same_vertex_set(&images, &expected, 1e-12));
            for y in &images {
                let tight = ex
                    .expect
                    .reference_p_hrep
                    .iter()
                    .filter(|h| h.slack(y).abs() < 1e-12)
                    .count();
                assert_eq!(tight, q + 1);
            }
            assert_eq!(ex.eps, s);
        }
    }

    #[test]
    fn primal_cpp_body() {
        let ex = gen_primal_tight_cpp(3).unwrap();
        let y = exact_projection(&ex.instance).unwrap();
        assert!(same_vertex_set(
            y.vertices(),
            &ex.expect.reference_y_vertices,
            1e-9
        ));
        assert!((ex.eps - 0.2).abs() < 1e-15);
        let back = dd_h_to_v(
            &dd_v_to_h(&VRep::polytope(y.vertices().to_vec()), 3).unwrap(),
            3,
        )
        .unwrap();
        assert!(same_vertex_set(&back.vertices, y.vertices(), 1e-9));
    }

    #[test]
    fn dual_cpp_lower_image_vertices() {
        let v = dd_h_to_v(&dual_tight_cpp_lower_image(2).unwrap(), 3).unwrap();
        let t = 1.0 / 3.0;
        let expected = vec![
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, -1.0],
            vec![t, t, 0.0],
        ];
        assert!(same_vertex_set(&v.vertices, &expected, 1e-12));
        assert_eq!(v.rays.len(), 1);
    }

    #[test]
    fn dual_mocp_points() {
        let pts = dual_tight_mocp_points(2, 1e-3);
        assert_eq!(pts[1], vec![1.0, 0.0, 0.0]);
        assert_eq!(pts[2], vec![0.5, 0.5, 0.0]);
        assert!(pts[3].iter().all(|v| (v - 1.0 / 3.0).abs() < 1e-15));
        assert!(gen_dual_tight_mocp(2, 1e-3).is_ok());
        assert!(matches!(
            gen_dual_tight_mocp(2, 0.5),
            Err(Error::EpsTooLarge(_))
        ));
    }

    #[test]
    fn random_instances_are_deterministic() {
        let a = gen_random_polytope_cpp(2, 4, 6, 7).unwrap();
        let b = gen_random_polytope_cpp(2, 4, 6, 7).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        let x0 = a.interior_point.clone().unwrap();
        assert!(a.max_violation(&x0) < 0.0);
        assert!(!polyhedral_vertices(&a).unwrap().is_empty());
    }
}
