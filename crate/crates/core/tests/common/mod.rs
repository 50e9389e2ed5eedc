#![allow(dead_code)]

use benson_core::geometry::{dd_h_to_v, Halfspace};
use benson_core::linalg::dot;
use benson_core::linprog::{LpProblem, RowSense};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random LP over a box: `d` variables in `[-2, 2]`, `m` rows of mixed sense.
pub fn random_lp(seed: u64, d: usize, m: usize) -> LpProblem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mut p = LpProblem::minimize(c).with_bounds(vec![-2.0; d], vec![2.0; d]);
    for _ in 0..m {
        let a: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let sense = match rng.gen_range(0..6) {
            0 => RowSense::Ge,
            _ => RowSense::Le,
        };
        let b = rng.gen_range(-0.5..1.0);
        p.add_row(a, sense, b);
    }
    p
}

/// Minimum of the objective over all vertices of the feasible region, or
/// `None` if it is empty.
pub fn brute_force_lp(p: &LpProblem) -> Option<f64> {
    let d = p.num_vars();
    let mut hs = Vec::new();
    for ((a, &b), s) in p.a.iter().zip(&p.b).zip(&p.senses) {
        match s {
            RowSense::Ge => hs.push(Halfspace::new(a.clone(), b).unwrap()),
            RowSense::Le => hs.push(Halfspace::new(a.iter().map(|x| -x).collect(), -b).unwrap()),
            RowSense::Eq => {
                hs.push(Halfspace::new(a.clone(), b).unwrap());
                hs.push(Halfspace::new(a.iter().map(|x| -x).collect(), -b).unwrap());
            }
        }
    }
    for j in 0..d {
        let mut e = vec![0.0; d];
        e[j] = 1.0;
        hs.push(Halfspace::new(e.clone(), p.lower[j]).unwrap());
        e[j] = -1.0;
        hs.push(Halfspace::new(e, -p.upper[j]).unwrap());
    }
    let v = dd_h_to_v(&hs, d).ok()?;
    v.vertices
        .iter()
        .map(|x| dot(&p.c, x))
        .min_by(|a, b| a.total_cmp(b))
}

fn compositions(
    total: usize,
    parts: usize,
    prefix: &mut Vec<usize>,
    out: &mut dyn FnMut(&[usize]),
) {
    if parts == 1 {
        prefix.push(total);
        out(prefix);
        prefix.pop();
        return;
    }
    for k in 0..=total {
        prefix.push(k);
        compositions(total - k, parts - 1, prefix, out);
        prefix.pop();
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Smallest distance from `p` to the barycentric grid of step `1/N` over
/// `vertices` (at most `max_points` grid points), and a bound on how far
/// the grid can sit above the true distance.
pub fn barycentric_grid_distance(
    p: &[f64],
    vertices: &[Vec<f64>],
    max_points: usize,
) -> (f64, f64) {
    let m = vertices.len();
    let mut n = 1;
    while m > 1 && binomial(n + m, m - 1) <= max_points as f64 {
        n += 1;
    }
    let mut best = f64::INFINITY;
    compositions(n, m, &mut Vec::new(), &mut |c| {
        let mut x = vec![0.0; p.len()];
        for (k, v) in c.iter().zip(vertices) {
            let l = *k as f64 / n as f64;
            x.iter_mut().zip(v).for_each(|(a, b)| *a += l * b);
        }
        best = best.min(benson_core::linalg::dist(&x, p));
    });
    let diam = vertices
        .iter()
        .flat_map(|a| {
            vertices
                .iter()
                .map(move |b| benson_core::linalg::dist(a, b))
        })
        .fold(0.0, f64::max);
    (best, diam * m as f64 / n as f64)
}
