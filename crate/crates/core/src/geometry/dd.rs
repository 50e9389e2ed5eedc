//! Incremental double description on homogenized cones.
//!
//! A polyhedron `{y : aᵢᵀy ≥ bᵢ}` in R^d is handled as the cone
//! `{(λ, y) : -bᵢλ + aᵢᵀy ≥ 0, λ ≥ 0}` in R^{d+1}. Extreme rays with
//! `λ > 0` are vertices, rays with `λ = 0` are recession directions.
//! Constraints are inserted one at a time; lineality left over from the
//! starting cone is consumed first, after that the classic
//! positive/negative split with a combinatorial adjacency test applies.

use crate::linalg::{dot, norm};
use crate::par;

/// Values of `|hᵀr|` at or below this count as zero.
pub(crate) const ZERO_TOL: f64 = 1e-9;
/// Generators closer than this (max-norm) are merged.
pub const DEDUP_TOL: f64 = 1e-8;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub(crate) struct Bits(Vec<u64>);

impl Bits {
    fn set(&mut self, k: usize) {
        let (w, b) = (k / 64, k % 64);
        if self.0.len() <= w {
            self.0.resize(w + 1, 0);
        }
        self.0[w] |= 1 << b;
    }

    fn all_below(k: usize) -> Self {
        let mut bits = Bits::default();
        for i in 0..k {
            bits.set(i);
        }
        bits
    }

    fn and(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }

    fn or(&self, other: &Bits) -> Bits {
        let n = self.0.len().max(other.0.len());
        Bits(
            (0..n)
                .map(|i| self.0.get(i).copied().unwrap_or(0) | other.0.get(i).copied().unwrap_or(0))
                .collect(),
        )
    }

    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn is_subset_of(&self, other: &Bits) -> bool {
        self.0
            .iter()
            .enumerate()
            .all(|(i, &w)| w & !other.0.get(i).copied().unwrap_or(0) == 0)
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Cone {
    dim: usize,
    lineality: Vec<Vec<f64>>,
    rays: Vec<Vec<f64>>,
    zeros: Vec<Bits>,
    processed: usize,
}

fn normalize_ray(mut r: Vec<f64>) -> Option<Vec<f64>> {
    let n = norm(&r);
    if n <= 1e-14 {
        return None;
    }
    r.iter_mut().for_each(|x| *x /= n);
    if r[0].abs() <= 1e-14 {
        r[0] = 0.0;
    }
    Some(r)
}

fn normalize_unit(mut r: Vec<f64>) -> Option<Vec<f64>> {
    let n = norm(&r);
    if n <= 1e-14 {
        return None;
    }
    r.iter_mut().for_each(|x| *x /= n);
    Some(r)
}

impl Cone {
    /// The whole space R^dim, all lineality.
    pub(crate) fn full(dim: usize) -> Self {
        let lineality = (0..dim).map(|i| crate::linalg::unit(dim, i)).collect();
        Cone {
            dim,
            lineality,
            rays: Vec::new(),
            zeros: Vec::new(),
            processed: 0,
        }
    }

    /// A pointed cone given by its extreme rays together with the
    /// constraints that already describe it.
    pub(crate) fn from_generators(
        dim: usize,
        rays: Vec<Vec<f64>>,
        constraints: &[Vec<f64>],
    ) -> Self {
        let zeros = rays
            .iter()
            .map(|r| {
                let mut z = Bits::default();
                for (k, h) in constraints.iter().enumerate() {
                    if dot(h, r).abs() <= ZERO_TOL {
                        z.set(k);
                    }
                }
                z
            })
            .collect();
        Cone {
            dim,
            lineality: Vec::new(),
            rays,
            zeros,
            processed: constraints.len(),
        }
    }

    pub(crate) fn lineality(&self) -> &[Vec<f64>] {
        &self.lineality
    }

    pub(crate) fn rays(&self) -> &[Vec<f64>] {
        &self.rays
    }

    /// Intersect with `{r : hᵀr ≥ 0}`.
    pub(crate) fn add(&mut self, h: &[f64]) {
        debug_assert_eq!(h.len(), self.dim);
        let k = self.processed;
        self.processed += 1;

        let best = self
            .lineality
            .iter()
            .enumerate()
            .map(|(i, l)| (i, dot(h, l)))
            .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()));
        if let Some((idx, val)) = best.filter(|(_, v)| v.abs() > ZERO_TOL) {
            let mut l = self.lineality.remove(idx);
            let mut val = val;
            if val < 0.0 {
                l.iter_mut().for_each(|x| *x = -*x);
                val = -val;
            }
            let lineality = std::mem::take(&mut self.lineality);
            self.lineality = lineality
                .into_iter()
                .filter_map(|o| {
                    let c = dot(h, &o) / val;
                    normalize_unit(o.iter().zip(&l).map(|(a, b)| a - c * b).collect())
                })
                .collect();
            let rays = std::mem::take(&mut self.rays);
            let zeros = std::mem::take(&mut self.zeros);
            for (r, mut z) in rays.into_iter().zip(zeros) {
                let c = dot(h, &r) / val;
                if let Some(r) = normalize_ray(r.iter().zip(&l).map(|(a, b)| a - c * b).collect()) {
                    z.set(k);
                    self.rays.push(r);
                    self.zeros.push(z);
                }
            }
            if let Some(l) = normalize_ray(l) {
                self.rays.push(l);
                self.zeros.push(Bits::all_below(k));
            }
            return;
        }

        let values: Vec<f64> = self.rays.iter().map(|r| dot(h, r)).collect();
        let pos: Vec<usize> = (0..values.len())
            .filter(|&i| values[i] > ZERO_TOL)
            .collect();
        let neg: Vec<usize> = (0..values.len())
            .filter(|&i| values[i] < -ZERO_TOL)
            .collect();
        if neg.is_empty() {
            for (i, z) in self.zeros.iter_mut().enumerate() {
                if values[i].abs() <= ZERO_TOL {
                    z.set(k);
                }
            }
            return;
        }

        let pointed_dim = self.dim - self.lineality.len();
        let need = pointed_dim.saturating_sub(2);
        let rays = &self.rays;
        let zeros = &self.zeros;
        let np = pos.len();
        let created: Vec<(Vec<f64>, Bits)> = par::filter_map_range(np * neg.len(), |idx| {
            let (i, j) = (pos[idx % np], neg[idx / np]);
            let common = zeros[i].and(&zeros[j]);
            if common.count() < need {
                return None;
            }
            let adjacent =
                (0..rays.len()).all(|m| m == i || m == j || !common.is_subset_of(&zeros[m]));
            if !adjacent {
                return None;
            }
            let (si, sj) = (values[i], values[j]);
            let r: Vec<f64> = rays[j]
                .iter()
                .zip(&rays[i])
                .map(|(rj, ri)| si * rj - sj * ri)
                .collect();
            let r = normalize_ray(r)?;
            let mut z = common;
            z.set(k);
            Some((r, z))
        });

        let mut new_rays = Vec::with_capacity(self.rays.len() + created.len());
        let mut new_zeros = Vec::with_capacity(new_rays.capacity());
        for (i, (r, z)) in self.rays.drain(..).zip(self.zeros.drain(..)).enumerate() {
            if values[i] > ZERO_TOL {
                new_rays.push(r);
                new_zeros.push(z);
            } else if values[i] >= -ZERO_TOL {
                let mut z = z;
                z.set(k);
                new_rays.push(r);
                new_zeros.push(z);
            }
        }
        for (r, z) in created {
            new_rays.push(r);
            new_zeros.push(z);
        }
        let (rays, zeros) = dedup(new_rays, new_zeros);
        self.rays = rays;
        self.zeros = zeros;
    }
}

fn dedup(rays: Vec<Vec<f64>>, zeros: Vec<Bits>) -> (Vec<Vec<f64>>, Vec<Bits>) {
    let mut out_r: Vec<Vec<f64>> = Vec::with_capacity(rays.len());
    let mut out_z: Vec<Bits> = Vec::with_capacity(rays.len());
    for (r, z) in rays.into_iter().zip(zeros) {
        match out_r
            .iter()
            .position(|o| crate::linalg::max_abs_diff(o, &r) <= DEDUP_TOL)
        {
            Some(p) => out_z[p] = out_z[p].or(&z),
            None => {
                out_r.push(r);
                out_z.push(z);
            }
        }
    }
    (out_r, out_z)
}
