//! Floating-point polyhedral kernel.
//!
//! Halfspaces are always stored as `aᵀy ≥ b` with `‖a‖₂ = 1`. A
//! [`Polyhedron`] keeps an H-representation, a V-representation, or both;
//! conversions run the double description method in [`dd`].

mod dd;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dot, max_abs_diff, norm};

use dd::Cone;
pub use dd::DEDUP_TOL;

/// Default slack for point-in-halfspace checks.
pub const FEAS_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Halfspace {
    pub a: Vec<f64>,
    pub b: f64,
}

impl Halfspace {
    /// `{y : aᵀy ≥ b}`, rescaled so that `‖a‖₂ = 1`.
    pub fn new(a: Vec<f64>, b: f64) -> Result<Self> {
        let n = norm(&a);
        if !(n > DEDUP_TOL) || !b.is_finite() || a.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "degenerate halfspace (‖a‖ = {n:e}, b = {b})"
            )));
        }
        Ok(Halfspace {
            a: a.into_iter().map(|x| x / n).collect(),
            b: b / n,
        })
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    /// Signed slack `aᵀy − b`; nonnegative inside.
    pub fn slack(&self, y: &[f64]) -> f64 {
        dot(&self.a, y) - self.b
    }

    pub fn contains(&self, y: &[f64], tol: f64) -> bool {
        self.slack(y) >= -tol
    }

    /// Homogenized row `(−b, a)` acting on `(λ, y)`.
    fn homogenized(&self) -> Vec<f64> {
        std::iter::once(-self.b)
            .chain(self.a.iter().copied())
            .collect()
    }

    fn same_as(&self, other: &Halfspace) -> bool {
        (self.b - other.b).abs() <= DEDUP_TOL && max_abs_diff(&self.a, &other.a) <= DEDUP_TOL
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct VRep {
    pub vertices: Vec<Vec<f64>>,
    #[serde(default)]
    pub rays: Vec<Vec<f64>>,
}

impl VRep {
    pub fn polytope(vertices: Vec<Vec<f64>>) -> Self {
        VRep {
            vertices,
            rays: Vec::new(),
        }
    }

    pub fn is_bounded(&self) -> bool {
        self.rays.is_empty()
    }

    fn generators(&self) -> Vec<Vec<f64>> {
        let vs = self
            .vertices
            .iter()
            .map(|v| std::iter::once(1.0).chain(v.iter().copied()).collect());
        let rs = self
            .rays
            .iter()
            .map(|r| std::iter::once(0.0).chain(r.iter().copied()).collect());
        vs.chain(rs).collect()
    }

    /// Merge vertices closer than the dedup tolerance and parallel rays.
    pub fn dedup(mut self) -> Self {
        self.vertices = dedup_points(self.vertices);
        let rays: Vec<Vec<f64>> = self
            .rays
            .into_iter()
            .filter_map(|r| {
                let n = norm(&r);
                (n > DEDUP_TOL).then(|| r.iter().map(|x| x / n).collect())
            })
            .collect();
        self.rays = dedup_points(rays);
        self
    }
}

pub(crate) fn dedup_points(points: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(points.len());
    for p in points {
        if !out.iter().any(|o| max_abs_diff(o, &p) <= DEDUP_TOL) {
            out.push(p);
        }
    }
    out
}

/// Convex polyhedron with lazily completed dual representation.
#[derive(Clone, Debug, PartialEq)]
pub struct Polyhedron {
    dim: usize,
    hrep: Option<Vec<Halfspace>>,
    vrep: Option<VRep>,
}

#[derive(Serialize, Deserialize)]
struct PolyhedronJson {
    dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    halfspaces: Option<Vec<Halfspace>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    vertices: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rays: Option<Vec<Vec<f64>>>,
}

impl Serialize for Polyhedron {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolyhedronJson {
            dim: self.dim,
            halfspaces: self.hrep.clone(),
            vertices: self.vrep.as_ref().map(|v| v.vertices.clone()),
            rays: self.vrep.as_ref().map(|v| v.rays.clone()),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Polyhedron {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = PolyhedronJson::deserialize(d)?;
        let hrep = raw
            .halfspaces
            .map(|hs| {
                hs.into_iter()
                    .map(|h| Halfspace::new(h.a, h.b))
                    .collect::<Result<Vec<_>>>()
            })
            .transpose()
            .map_err(D::Error::custom)?;
        let vrep = match (raw.vertices, raw.rays) {
            (None, None) => None,
            (v, r) => Some(VRep {
                vertices: v.unwrap_or_default(),
                rays: r.unwrap_or_default(),
            }),
        };
        Polyhedron::from_parts(raw.dim, hrep, vrep).map_err(D::Error::custom)
    }
}

impl Polyhedron {
    pub fn from_parts(
        dim: usize,
        hrep: Option<Vec<Halfspace>>,
        vrep: Option<VRep>,
    ) -> Result<Self> {
        if hrep.is_none() && vrep.is_none() {
            return Err(Error::InvalidInput(
                "polyhedron needs a representation".into(),
            ));
        }
        let dims_ok = hrep.iter().flatten().all(|h| h.dim() == dim)
            && vrep
                .iter()
                .all(|v| v.vertices.iter().chain(&v.rays).all(|p| p.len() == dim));
        if !dims_ok {
            return Err(Error::InvalidInput(format!(
                "vectors do not match dimension {dim}"
            )));
        }
        Ok(Polyhedron { dim, hrep, vrep })
    }

    /// H-representation only; vertices are computed on demand.
    pub fn from_hrep(dim: usize, hrep: Vec<Halfspace>) -> Result<Self> {
        Self::from_parts(dim, Some(hrep), None)
    }

    pub fn from_vrep(dim: usize, vrep: VRep) -> Result<Self> {
        Self::from_parts(dim, None, Some(vrep))
    }

    /// `{point} + R^dim_+` with both representations.
    pub fn translated_orthant(point: &[f64]) -> Self {
        let dim = point.len();
        let hrep = (0..dim)
            .map(|i| Halfspace {
                a: crate::linalg::unit(dim, i),
                b: point[i],
            })
            .collect();
        let vrep = VRep {
            vertices: vec![point.to_vec()],
            rays: (0..dim).map(|i| crate::linalg::unit(dim, i)).collect(),
        };
        Polyhedron {
            dim,
            hrep: Some(hrep),
            vrep: Some(vrep),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn hrep(&self) -> Option<&[Halfspace]> {
        self.hrep.as_deref()
    }

    pub fn vrep(&self) -> Option<&VRep> {
        self.vrep.as_ref()
    }

    /// Vertices; empty when the V-representation has not been computed.
    pub fn vertices(&self) -> &[Vec<f64>] {
        self.vrep.as_ref().map_or(&[], |v| &v.vertices)
    }

    /// Returns a copy carrying both representations.
    pub fn complete(&self) -> Result<Polyhedron> {
        let hrep = match &self.hrep {
            Some(h) => h.clone(),
            None => dd_v_to_h(self.vrep.as_ref().expect("one representation"), self.dim)?,
        };
        let vrep = match &self.vrep {
            Some(v) => v.clone(),
            None => dd_h_to_v(&hrep, self.dim)?,
        };
        Ok(Polyhedron {
            dim: self.dim,
            hrep: Some(hrep),
            vrep: Some(vrep),
        })
    }

    pub fn contains(&self, p: &[f64], tol: f64) -> Result<bool> {
        match &self.hrep {
            Some(h) => Ok(h.iter().all(|hs| hs.contains(p, tol))),
            None => Ok(contains_point(&self.complete()?, p, tol)),
        }
    }
}

/// Vertices and extreme rays of `⋂ {y : aᵀy ≥ b}`.
pub fn dd_h_to_v(hrep: &[Halfspace], dim: usize) -> Result<VRep> {
    if hrep.is_empty() {
        return Err(Error::LinealityDetected);
    }
    if hrep.iter().any(|h| h.dim() != dim) {
        return Err(Error::InvalidInput("halfspace dimension mismatch".into()));
    }
    let mut cone = Cone::full(dim + 1);
    cone.add(&crate::linalg::unit(dim + 1, 0));
    for h in hrep {
        cone.add(&h.homogenized());
    }
    let vrep = cone_to_vrep(cone.rays());
    if vrep.vertices.is_empty() {
        return Err(Error::EmptyPolyhedron);
    }
    if !cone.lineality().is_empty() {
        return Err(Error::LinealityDetected);
    }
    Ok(vrep)
}

/// Facet description of `conv(vertices) + cone(rays)`. Lower-dimensional
/// sets come back with each implicit equation as a pair of opposite
/// halfspaces.
pub fn dd_v_to_h(vrep: &VRep, dim: usize) -> Result<Vec<Halfspace>> {
    if vrep.vertices.is_empty() {
        return Err(Error::EmptyPolyhedron);
    }
    let gens = vrep.generators();
    let mut cone = Cone::full(dim + 1);
    for g in &gens {
        cone.add(g);
    }
    let mut out: Vec<Halfspace> = Vec::new();
    let mut push = |h: &[f64]| {
        if norm(&h[1..]) <= 1e-10 {
            return;
        }
        if let Ok(hs) = Halfspace::new(h[1..].to_vec(), -h[0]) {
            if !out.iter().any(|o| o.same_as(&hs)) {
                out.push(hs);
            }
        }
    };
    for l in cone.lineality() {
        push(l);
        let neg: Vec<f64> = l.iter().map(|x| -x).collect();
        push(&neg);
    }
    for r in cone.rays() {
        push(r);
    }
    if out.is_empty() {
        return Err(Error::LinealityDetected);
    }
    Ok(out)
}

fn cone_to_vrep(rays: &[Vec<f64>]) -> VRep {
    let mut vrep = VRep::default();
    for r in rays {
        if r[0] > 1e-12 {
            vrep.vertices
                .push(r[1..].iter().map(|x| x / r[0]).collect());
        } else {
            vrep.rays.push(r[1..].to_vec());
        }
    }
    vrep.dedup()
}

/// `poly ∩ h`, updating the vertex set incrementally.
pub fn dd_add_halfspace(poly: &Polyhedron, h: &Halfspace) -> Result<Polyhedron> {
    if h.dim() != poly.dim {
        return Err(Error::InvalidInput("halfspace dimension mismatch".into()));
    }
    let full = poly.complete()?;
    let hrep = full.hrep.expect("completed");
    let vrep = full.vrep.expect("completed");
    let mut constraints: Vec<Vec<f64>> = vec![crate::linalg::unit(poly.dim + 1, 0)];
    constraints.extend(hrep.iter().map(Halfspace::homogenized));
    let mut cone = Cone::from_generators(poly.dim + 1, vrep.generators(), &constraints);
    cone.add(&h.homogenized());
    let vrep = cone_to_vrep(cone.rays());
    if vrep.vertices.is_empty() {
        return Err(Error::EmptyPolyhedron);
    }
    let mut hrep = hrep;
    hrep.push(h.clone());
    Ok(Polyhedron {
        dim: poly.dim,
        hrep: Some(hrep),
        vrep: Some(vrep),
    })
}

/// `poly ∩ {y : normalᵀy = offset}` in the same ambient space.
pub fn slice_by_hyperplane(poly: &Polyhedron, normal: &[f64], offset: f64) -> Result<Polyhedron> {
    let upper = Halfspace::new(normal.to_vec(), offset)?;
    let lower = Halfspace::new(normal.iter().map(|x| -x).collect(), -offset)?;
    let half = dd_add_halfspace(poly, &upper)?;
    dd_add_halfspace(&half, &lower)
}

/// Drops the last coordinate of every vertex of a polytope.
pub fn project_drop_last(v: &VRep) -> Result<VRep> {
    if !v.rays.is_empty() {
        return Err(Error::RaysPresent);
    }
    let vertices = v
        .vertices
        .iter()
        .map(|p| {
            if p.len() < 2 {
                Err(Error::InvalidInput("projection needs dimension ≥ 2".into()))
            } else {
                Ok(p[..p.len() - 1].to_vec())
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(VRep::polytope(dedup_points(vertices)))
}

/// True iff every stored halfspace holds at `p` up to `tol`.
///
/// Panics if `poly` has no H-representation; use [`Polyhedron::contains`]
/// to convert on the fly.
pub fn contains_point(poly: &Polyhedron, p: &[f64], tol: f64) -> bool {
    poly.hrep
        .as_ref()
        .expect("contains_point needs an H-representation")
        .iter()
        .all(|h| h.contains(p, tol))
}

/// True iff both vertex sets agree up to `tol` (order-insensitive).
pub fn same_vertex_set(a: &[Vec<f64>], b: &[Vec<f64>], tol: f64) -> bool {
    a.len() == b.len()
        && a.iter()
            .all(|p| b.iter().any(|q| max_abs_diff(p, q) <= tol))
        && b.iter()
            .all(|p| a.iter().any(|q| max_abs_diff(p, q) <= tol))
}
