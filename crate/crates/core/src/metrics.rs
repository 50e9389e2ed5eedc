//! Hausdorff distances between nested convex sets given by vertices.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Polyhedron, VRep};
use crate::linalg::{dot, norm, sub};
use crate::par;

const NEST_TOL: f64 = 1e-7;
const GAP_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistanceReport {
    pub d_h: f64,
    pub witness_outer: Vec<f64>,
    pub witness_inner: Vec<f64>,
    #[serde(default)]
    pub per_vertex: Vec<(Vec<f64>, f64)>,
}

/// Distance from `p` to `conv(vertices)` and the nearest point, by Wolfe's
/// method.
pub fn dist_point_to_polytope(p: &[f64], m: &VRep) -> Result<(f64, Vec<f64>)> {
    if m.vertices.is_empty() || !m.rays.is_empty() {
        return Err(Error::InvalidInput(
            "nearest point needs a nonempty polytope".into(),
        ));
    }
    let pts: Vec<Vec<f64>> = m.vertices.iter().map(|v| sub(v, p)).collect();
    let x = wolfe(&pts);
    let a = x.iter().zip(p).map(|(xi, pi)| xi + pi).collect();
    Ok((norm(&x), a))
}

/// Minimum-norm point of `conv(pts)`.
fn wolfe(pts: &[Vec<f64>]) -> Vec<f64> {
    let k = pts.len();
    let scale = pts.iter().map(|p| norm(p)).fold(1.0, f64::max);
    let combine = |s: &[usize], lam: &[f64]| -> Vec<f64> {
        let mut x = vec![0.0; pts[0].len()];
        for (&i, &l) in s.iter().zip(lam) {
            x.iter_mut().zip(&pts[i]).for_each(|(a, b)| *a += l * b);
        }
        x
    };
    let first = (0..k)
        .min_by(|&a, &b| dot(&pts[a], &pts[a]).total_cmp(&dot(&pts[b], &pts[b])))
        .expect("nonempty");
    let mut s = vec![first];
    let mut lam = vec![1.0];
    let mut x = pts[first].clone();
    let cap = (10 * k * k).max(100);
    let mut steps = 0;
    'outer: while steps < cap {
        steps += 1;
        let xx = dot(&x, &x);
        let (j, xj) = (0..k)
            .map(|i| (i, dot(&x, &pts[i])))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("nonempty");
        // ‖x‖ exceeds the distance by at most (xᵀx − xᵀpⱼ)/‖x‖.
        let nx = xx.sqrt();
        if nx <= GAP_TOL * scale || xx - xj <= GAP_TOL * scale * nx || s.contains(&j) {
            break;
        }
        s.push(j);
        lam.push(0.0);
        loop {
            steps += 1;
            let Some(mu) = affine_min_norm(pts, &s) else {
                break 'outer;
            };
            if mu.iter().all(|&m| m > 1e-14) {
                lam = mu;
                x = combine(&s, &lam);
                break;
            }
            let theta = lam
                .iter()
                .zip(&mu)
                .filter(|(_, &m)| m <= 1e-14)
                .map(|(&l, &m)| if l - m > 0.0 { l / (l - m) } else { 0.0 })
                .fold(1.0, f64::min);
            lam = lam
                .iter()
                .zip(&mu)
                .map(|(l, m)| l + theta * (m - l))
                .collect();
            let keep: Vec<bool> = lam.iter().map(|&l| l > 1e-14).collect();
            let mut idx = 0;
            s.retain(|_| {
                idx += 1;
                keep[idx - 1]
            });
            lam.retain(|&l| l > 1e-14);
            let total: f64 = lam.iter().sum();
            lam.iter_mut().for_each(|l| *l /= total);
            x = combine(&s, &lam);
            if steps >= cap {
                break 'outer;
            }
        }
    }
    x
}

/// Weights of the minimum-norm point of the affine hull of `pts[s]`, from a
/// least-squares solve on the edge vectors out of the first point.
fn affine_min_norm(pts: &[Vec<f64>], s: &[usize]) -> Option<Vec<f64>> {
    let m = s.len();
    if m == 1 {
        return Some(vec![1.0]);
    }
    let base = &pts[s[0]];
    let dim = base.len();
    let d = DMatrix::from_fn(dim, m - 1, |r, c| pts[s[c + 1]][r] - base[r]);
    let rhs = DVector::from_iterator(dim, base.iter().map(|v| -v));
    let alpha = d.svd(true, true).solve(&rhs, 1e-13).ok()?;
    let mut mu = Vec::with_capacity(m);
    mu.push(1.0 - alpha.iter().sum::<f64>());
    mu.extend(alpha.iter().copied());
    mu.iter().all(|v| v.is_finite()).then_some(mu)
}

/// `d_H` for `conv(inner) ⊆ conv(outer)`: the largest distance from a vertex
/// of `outer` to `conv(inner)`.
pub fn hausdorff_nested(inner: &VRep, outer: &VRep) -> Result<DistanceReport> {
    if !inner.rays.is_empty() || !outer.rays.is_empty() || outer.vertices.is_empty() {
        return Err(Error::InvalidInput(
            "nested distance needs two nonempty polytopes".into(),
        ));
    }
    let excess = par::map_collect(&inner.vertices, |v| {
        dist_point_to_polytope(v, outer).map(|r| r.0)
    })
    .into_iter()
    .collect::<Result<Vec<f64>>>()?
    .into_iter()
    .fold(0.0, f64::max);
    if excess > NEST_TOL {
        return Err(Error::NotNested { excess });
    }
    vertex_max(&outer.vertices, inner)
}

fn vertex_max(candidates: &[Vec<f64>], inner: &VRep) -> Result<DistanceReport> {
    let per = par::map_collect(candidates, |v| {
        dist_point_to_polytope(v, inner).map(|(d, a)| (v.clone(), d, a))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let best = per
        .iter()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .expect("at least one vertex");
    Ok(DistanceReport {
        d_h: best.1,
        witness_outer: best.0.clone(),
        witness_inner: best.2.clone(),
        per_vertex: per.iter().map(|(v, d, _)| (v.clone(), *d)).collect(),
    })
}

/// Sampling lower bound on [`hausdorff_nested`]: points on segments between
/// random vertex pairs of `outer` (a pair may repeat, giving the vertex).
pub fn hausdorff_sampled(inner: &VRep, outer: &VRep, samples: usize, seed: u64) -> Result<f64> {
    if outer.vertices.is_empty() {
        return Err(Error::InvalidInput("outer set is empty".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = outer.vertices.len();
    let points: Vec<Vec<f64>> = (0..samples)
        .map(|_| {
            let a = &outer.vertices[rng.gen_range(0..k)];
            let b = &outer.vertices[rng.gen_range(0..k)];
            let t: f64 = rng.gen();
            a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect()
        })
        .collect();
    Ok(
        par::map_collect(&points, |p| dist_point_to_polytope(p, inner).map(|r| r.0))
            .into_iter()
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(0.0, f64::max),
    )
}

/// `d_H` between sets of the form `conv(V) + ℝᵈ₊` with `inner ⊆ outer`.
///
/// The supremum is attained at a vertex of `outer`, and the nearest point
/// of `inner` to a point `v` never moves more than `max(vᵢ − minᵢ, 0)` along
/// the recession cone, so `inner` is replaced by a polytope truncation.
pub fn hausdorff_upper_images(inner: &Polyhedron, outer: &Polyhedron) -> Result<DistanceReport> {
    let inner = inner.complete()?;
    let outer = outer.complete()?;
    let iv = inner.vertices();
    let ov = outer.vertices();
    if iv.is_empty() || ov.is_empty() {
        return Err(Error::InvalidInput("upper images need vertices".into()));
    }
    let excess = iv
        .iter()
        .flat_map(|v| {
            outer
                .hrep()
                .expect("complete")
                .iter()
                .map(move |h| -h.slack(v))
        })
        .fold(0.0, f64::max);
    if excess > NEST_TOL {
        return Err(Error::NotNested { excess });
    }
    let d = inner.dim();
    let lows: Vec<f64> = (0..d)
        .map(|i| iv.iter().map(|v| v[i]).fold(f64::INFINITY, f64::min))
        .collect();
    let reach: f64 = (0..d)
        .map(|i| {
            ov.iter()
                .map(|v| (v[i] - lows[i]).max(0.0))
                .fold(0.0, f64::max)
        })
        .sum::<f64>()
        + 1.0;
    let mut gens = iv.to_vec();
    for v in iv {
        for i in 0..d {
            let mut g = v.clone();
            g[i] += reach;
            gens.push(g);
        }
    }
    vertex_max(ov, &VRep::polytope(gens))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn simplex() -> VRep {
        VRep::polytope(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]])
    }

    #[test]
    fn nearest_points() {
        let (d, a) = dist_point_to_polytope(&[0.2, 0.2], &simplex()).unwrap();
        assert!(d < 1e-12 && (a[0] - 0.2).abs() < 1e-12);
        let (d, a) = dist_point_to_polytope(&[2.0, 0.0], &simplex()).unwrap();
        assert!((d - 1.0).abs() < 1e-12 && (a[0] - 1.0).abs() < 1e-12 && a[1].abs() < 1e-12);
        let (d, _) = dist_point_to_polytope(&[1.0, 1.0], &simplex()).unwrap();
        assert!((d - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn tight_pairs() {
        let y = VRep::polytope(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.25, 0.5]]);
        let r = hausdorff_nested(&y, &simplex()).unwrap();
        assert!((r.d_h - 5f64.sqrt() / 4.0).abs() < 1e-12);
        assert_eq!(r.witness_outer, vec![0.0, 1.0]);
        assert!(
            (r.witness_inner[0] - 0.25).abs() < 1e-12 && (r.witness_inner[1] - 0.5).abs() < 1e-12
        );

        let c = VRep::polytope(vec![vec![1.0 / 3.0; 2]]);
        let r = hausdorff_nested(&c, &simplex()).unwrap();
        assert!((r.d_h - 5f64.sqrt() / 3.0).abs() < 1e-12);
        assert!(r.witness_outer == vec![1.0, 0.0] || r.witness_outer == vec![0.0, 1.0]);

        assert_eq!(hausdorff_nested(&simplex(), &simplex()).unwrap().d_h, 0.0);
        assert!(matches!(
            hausdorff_nested(&simplex(), &y),
            Err(Error::NotNested { .. })
        ));
    }

    #[test]
    fn sampled_is_lower_bound() {
        let c = VRep::polytope(vec![vec![1.0 / 3.0; 2]]);
        let s = hausdorff_sampled(&c, &simplex(), 500, 3).unwrap();
        assert!(s <= 5f64.sqrt() / 3.0 + 1e-9);
        assert!((s - 5f64.sqrt() / 3.0).abs() < 1e-12);
        assert!(hausdorff_sampled(&simplex(), &simplex(), 200, 1).unwrap() < 1e-12);
    }

    #[test]
    fn orthant_translate() {
        let inner = Polyhedron::translated_orthant(&[0.0, 0.0]);
        let outer = Polyhedron::translated_orthant(&[-0.3, -0.4]);
        let r = hausdorff_upper_images(&inner, &outer).unwrap();
        assert!((r.d_h - 0.5).abs() < 1e-12);
        assert!(matches!(
            hausdorff_upper_images(&outer, &inner),
            Err(Error::NotNested { .. })
        ));
    }
}
