use benson_core::convexprog::{
    find_slater_point, restore_feasibility, solve_p1, solve_p2, Bounds, ConvexExpr,
    ProblemInstance, Scalarizer, DEFAULT_GAP,
};
use benson_core::instances::{
    gen_dual_tight_cpp, gen_primal_tight_cpp, gen_random_polytope_cpp, unit_ball_cpp,
};
use benson_core::linalg::{dot, norm};
use benson_core::linprog::{solve_lp, LpProblem, RowSense};
use benson_core::Error;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const T: f64 = 1.0 / 3.0;

#[test]
fn p1_on_standard_simplex() {
    let ex = gen_dual_tight_cpp(2).unwrap();
    let s = solve_p1(&ex.instance, &[T, T, T]).unwrap();
    assert!(s.value.abs() < 1e-12);
    assert!((s.x[0] - T).abs() < 1e-12 && (s.x[1] - T).abs() < 1e-12);

    let s = solve_p1(&ex.instance, &[1.0, 0.0, 0.0]).unwrap();
    assert!(s.value.abs() < 1e-12);

    let mut plain = ex.instance.clone();
    plain.hints.clear();
    let s = solve_p1(&plain, &[T, T, T]).unwrap();
    assert!(s.value.abs() < 1e-12);
}

#[test]
fn p1_on_unit_disc() {
    let inst = unit_ball_cpp(2).unwrap();
    let s = solve_p1(&inst, &[1.0, 0.0, 0.0]).unwrap();
    assert!((s.value + 1.0).abs() <= DEFAULT_GAP);
    assert!(s.lower_bound <= -1.0 + 1e-12);
    assert!((s.x[0] + 1.0).abs() < 1e-3 && s.x[1].abs() < 1e-3);
    assert!(norm(&s.x) <= 1.0);

    assert!(s.value - s.lower_bound <= DEFAULT_GAP);
}

#[test]
fn p2_values() {
    let ex = gen_primal_tight_cpp(2).unwrap();
    let s = solve_p2(&ex.instance, &[0.0, 0.0, -1.0]).unwrap();
    assert!((s.z.unwrap() - T).abs() < 1e-9);
    let w = s.w_dual.unwrap();
    assert!(w.iter().all(|v| (v - T).abs() < 1e-9));

    let x0 = ex.instance.interior_point.clone().unwrap();
    let v = ex.instance.gamma(&x0);
    assert!(solve_p2(&ex.instance, &v).unwrap().z.unwrap() <= 1e-12);

    let simplex = gen_dual_tight_cpp(2).unwrap();
    let s = solve_p2(&simplex.instance, &[1.0, 0.0, -1.0]).unwrap();
    assert!(s.z.unwrap().abs() <= DEFAULT_GAP);
    let s = solve_p2(&simplex.instance, &[1.0 - 1e-6, -1e-6, -1.0 - 1e-6]).unwrap();
    assert!(s.z.unwrap() > 0.0);
}

#[test]
fn p2_on_disc_certifies_support() {
    let inst = unit_ball_cpp(2).unwrap();
    let s = solve_p2(&inst, &[-1.0, -1.0, 0.0]).unwrap();
    let z = s.z.unwrap();
    let w = s.w_dual.unwrap();
    assert!(z > 0.0);
    assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    let y = inst.gamma(&s.x);
    assert!(y
        .iter()
        .zip([-1.0, -1.0, 0.0])
        .all(|(yi, vi)| yi - z - vi <= 1e-9));
    assert!(norm(&s.x) <= 1.0);
}

fn simplex(hi: f64) -> ProblemInstance {
    ProblemInstance::cpp(
        vec![vec![1.0, 0.0], vec![0.0, 1.0]],
        vec![
            ConvexExpr::affine(vec![-1.0, 0.0], 0.0),
            ConvexExpr::affine(vec![0.0, -1.0], 0.0),
            ConvexExpr::affine(vec![1.0, 1.0], -1.0),
        ],
        Bounds {
            lo: vec![-0.5; 2],
            hi: vec![hi; 2],
        },
    )
    .unwrap()
}

#[test]
fn slater_points() {
    let x = find_slater_point(&simplex(1.5)).unwrap();
    assert!(simplex(1.5).max_violation(&x) < 0.0);

    let given = simplex(1.5).with_interior_point(vec![0.1, 0.1]).unwrap();
    assert_eq!(find_slater_point(&given).unwrap(), vec![0.1, 0.1]);

    let flat = ProblemInstance::cpp(
        vec![vec![1.0]],
        vec![
            ConvexExpr::affine(vec![1.0], 0.0),
            ConvexExpr::affine(vec![-1.0], 0.0),
        ],
        Bounds {
            lo: vec![-1.0],
            hi: vec![1.0],
        },
    )
    .unwrap();
    assert_eq!(find_slater_point(&flat), Err(Error::NoInteriorPoint));
}

#[test]
fn restoration() {
    let inst = simplex(1.5);
    let inside = [0.2, 0.2];
    assert_eq!(
        restore_feasibility(&inst, &[0.5, 0.25], &inside),
        vec![0.5, 0.25]
    );
    let delta = 1e-7;
    let r = restore_feasibility(&inst, &[0.5 + delta, 0.5], &inside);
    assert!(inst.max_violation(&r) <= 0.0);
    assert!((r[0] + r[1] - 1.0).abs() < 1e-12);

    let ball = unit_ball_cpp(2).unwrap();
    let r = restore_feasibility(&ball, &[0.8, 0.6000001], &[0.0, 0.0]);
    assert!(norm(&r) <= 1.0 + 1e-12);
    assert!(norm(&r) >= 1.0 - 1e-12);
}

#[test]
fn infeasible_instance() {
    let inst = ProblemInstance::cpp(
        vec![vec![1.0]],
        vec![ConvexExpr::affine(vec![1.0], 5.0)],
        Bounds {
            lo: vec![-1.0],
            hi: vec![1.0],
        },
    )
    .unwrap();
    assert_eq!(solve_p1(&inst, &[0.5, 0.5]), Err(Error::InstanceInfeasible));
}

/// Direct LP for `P₁(w)` on a polyhedral instance.
fn lp_p1(inst: &ProblemInstance, w: &[f64]) -> f64 {
    let c = inst.objective_matrix();
    let cost = (0..inst.n)
        .map(|j| (0..w.len()).map(|i| w[i] * c[i][j]).sum())
        .collect();
    let mut lp =
        LpProblem::minimize(cost).with_bounds(inst.bounds.lo.clone(), inst.bounds.hi.clone());
    for g in &inst.constraints {
        let (a, d) = g.as_affine().unwrap();
        lp.add_row(a.to_vec(), RowSense::Le, -d);
    }
    solve_lp(&lp).unwrap().objective
}

fn random_expr(rng: &mut ChaCha8Rng, n: usize, depth: usize) -> ConvexExpr {
    let mut v = |k: usize| -> Vec<f64> { (0..k).map(|_| rng.gen_range(-1.0..1.0)).collect() };
    let kind = if depth == 0 { 0 } else { 3 };
    let pick = v(1)[0].abs() * (kind as f64 + 3.0);
    match pick as usize {
        0 => ConvexExpr::affine(v(n), v(1)[0]),
        1 => {
            let l: Vec<Vec<f64>> = (0..n).map(|_| v(n)).collect();
            let q = (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| (0..n).map(|k| l[k][i] * l[k][j]).sum())
                        .collect()
                })
                .collect();
            ConvexExpr::Quad {
                q,
                c: v(n),
                d: v(1)[0],
            }
        }
        2 => ConvexExpr::Norm2 {
            a: (0..2).map(|_| v(n)).collect(),
            b: v(2),
            r: v(1)[0].abs(),
        },
        _ => ConvexExpr::Max((0..3).map(|_| random_expr(rng, n, depth - 1)).collect()),
    }
}

fn is_smooth_atom(g: &ConvexExpr) -> bool {
    !matches!(g, ConvexExpr::Max(_))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn subgradient_inequality(seed in 0u64..100_000, n in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_expr(&mut rng, n, 2);
        for _ in 0..8 {
            let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let y: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let s = g.subgradient(&x);
            let d: Vec<f64> = y.iter().zip(&x).map(|(a, b)| a - b).collect();
            prop_assert!(g.eval(&y) >= g.eval(&x) + dot(&s, &d) - 1e-9);
        }
    }

    #[test]
    fn gradient_matches_central_differences(seed in 0u64..100_000, n in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_expr(&mut rng, n, 0);
        prop_assume!(is_smooth_atom(&g));
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        if let ConvexExpr::Norm2 { a, b, .. } = &g {
            let u: Vec<f64> = a.iter().zip(b).map(|(r, bi)| dot(r, &x) + bi).collect();
            prop_assume!(norm(&u) > 1e-2);
        }
        let s = g.subgradient(&x);
        let h = 1e-6;
        for i in 0..n {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[i] += h;
            xm[i] -= h;
            let fd = (g.eval(&xp) - g.eval(&xm)) / (2.0 * h);
            prop_assert!((fd - s[i]).abs() <= 1e-4 * s[i].abs().max(1.0));
        }
    }

    #[test]
    fn polyhedral_solves_match_lp(seed in 0u64..10_000, q in 1usize..4) {
        let inst = gen_random_polytope_cpp(q, q + 1, q + 3, seed).unwrap();
        let sc = Scalarizer::new(&inst, DEFAULT_GAP).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xabcd);
        let raw: Vec<f64> = (0..=q).map(|_| rng.gen_range(0.0..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let w: Vec<f64> = raw.iter().map(|v| v / total).collect();
        let s = sc.p1(&w).unwrap();
        prop_assert!((s.value - lp_p1(&inst, &w)).abs() <= 1e-8);

        let v: Vec<f64> = (0..=q).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let s = sc.p2(&v).unwrap();
        let w = s.w_dual.unwrap();
        prop_assert!(w.iter().all(|x| *x >= 0.0));
        prop_assert!((w.iter().sum::<f64>() - 1.0).abs() <= 1e-15);
        // Weak duality: the halfspace wᵀy ≥ opt P₁(w) passes through v + z·e.
        let beta = lp_p1(&inst, &w);
        let z = s.z.unwrap();
        let shifted: f64 = w.iter().zip(&v).map(|(wi, vi)| wi * (vi + z)).sum();
        prop_assert!((shifted - beta).abs() <= 1e-8);
    }
}
