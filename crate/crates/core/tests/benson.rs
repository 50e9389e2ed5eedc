use benson_core::benson::{dual, primal, Action, BensonOptions, Selection};
use benson_core::geometry::same_vertex_set;
use benson_core::instances::{
    gen_dual_tight_cpp, gen_random_polytope_cpp, reference_upper_image, unit_ball_cpp,
};
use benson_core::projection::{approximate_body, build_mocp, extract_y, Algorithm};
use benson_core::Error;
use proptest::prelude::*;

fn options(lexmin: bool) -> BensonOptions {
    BensonOptions::with_selection(if lexmin {
        Selection::Lexmin
    } else {
        Selection::Fifo
    })
}

#[test]
fn primal_trace_is_consistent() {
    let inst = build_mocp(&gen_random_polytope_cpp(2, 3, 5, 7).unwrap()).unwrap();
    let eps = 0.05;
    let res = primal::run_primal(&inst, eps, &BensonOptions::default()).unwrap();
    let p_ref = reference_upper_image(&inst_as_cpp(7)).unwrap();
    let mut cuts = 0;
    for t in &res.trace {
        let z = t.z.unwrap();
        match t.action {
            Action::Cut => {
                cuts += 1;
                assert!(z > eps);
                let h = t.cut.as_ref().unwrap();
                assert!(h.slack(&t.vertex) < 0.0, "cut keeps its vertex");
                for p in p_ref.vertices() {
                    assert!(h.slack(p) >= -1e-9, "cut removes part of P");
                }
            }
            Action::Confirm => assert!(z <= eps + 1e-9),
        }
    }
    assert_eq!(cuts, res.cuts);
    for v in res.p_level.vertices() {
        assert!(res.trace.iter().any(|t| t.action == Action::Confirm
            && benson_core::linalg::max_abs_diff(&t.vertex, v) <= 1e-8));
    }
}

fn inst_as_cpp(seed: u64) -> benson_core::convexprog::ProblemInstance {
    gen_random_polytope_cpp(2, 3, 5, seed).unwrap()
}

#[test]
fn dual_trace_is_consistent() {
    let inst = build_mocp(&inst_as_cpp(8)).unwrap();
    let eps = 0.05;
    let res = dual::run_dual(&inst, eps, None, &BensonOptions::default()).unwrap();
    for t in &res.trace {
        let phi = t.phi.unwrap();
        match t.action {
            Action::Cut => assert!(phi < -eps),
            Action::Confirm => assert!(phi >= -eps - 1e-9),
        }
    }
    // Inner vertices are images of feasible points.
    for v in res.p_level.vertices() {
        assert!(v.iter().sum::<f64>().abs() <= 1e-9);
    }
    assert!(res.d_outer.is_some());
}

#[test]
fn runs_are_deterministic() {
    let inst = unit_ball_cpp(2).unwrap();
    for alg in [Algorithm::Primal, Algorithm::Dual] {
        let a = approximate_body(&inst, 0.1, alg, &BensonOptions::default()).unwrap();
        let b = approximate_body(&inst, 0.1, alg, &BensonOptions::default()).unwrap();
        assert_eq!(a.to_json(), b.to_json());
    }
}

#[test]
fn bad_eps_is_rejected() {
    let inst = unit_ball_cpp(2).unwrap();
    for eps in [0.0, -1.0, f64::NAN] {
        for alg in [Algorithm::Primal, Algorithm::Dual] {
            assert!(matches!(
                approximate_body(&inst, eps, alg, &BensonOptions::default()),
                Err(Error::InvalidInput(_))
            ));
        }
    }
}

#[test]
fn cut_cap_is_enforced() {
    let inst = unit_ball_cpp(2).unwrap();
    let opts = BensonOptions {
        max_cuts: 2,
        ..BensonOptions::default()
    };
    assert!(matches!(
        approximate_body(&inst, 1e-3, Algorithm::Primal, &opts),
        Err(Error::IterationCap(2))
    ));
}

#[test]
fn explicit_wbar_overrides_instance() {
    let ex = gen_dual_tight_cpp(2).unwrap();
    let inst = build_mocp(&ex.instance).unwrap();
    let a = dual::run_dual(&inst, ex.eps, None, &BensonOptions::default()).unwrap();
    let b = dual::run_dual(
        &inst,
        ex.eps,
        Some(&[1.0 / 3.0; 3]),
        &BensonOptions::default(),
    )
    .unwrap();
    assert_eq!(a.p_level.vertices(), b.p_level.vertices());
    assert!(matches!(
        dual::run_dual(&inst, ex.eps, Some(&[0.5, 0.5]), &BensonOptions::default()),
        Err(Error::InvalidInput(_))
    ));
}

#[test]
fn smaller_eps_refines_the_disc() {
    let inst = unit_ball_cpp(2).unwrap();
    let mut last = usize::MAX;
    for eps in [0.2, 0.05, 0.01] {
        let r = approximate_body(&inst, eps, Algorithm::Primal, &BensonOptions::default()).unwrap();
        let y = r.y_level.unwrap();
        // Outer vertices lie outside the disc but within the certified bound.
        for v in y.vertices() {
            let n = benson_core::linalg::norm(v);
            assert!(n >= 1.0 - 1e-9 && n <= 1.0 + r.certified_bound + 1e-9);
        }
        let n = y.vertices().len();
        assert!(last == usize::MAX || n >= last);
        last = n;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn translate_and_sandwich(seed in 0u64..10_000, lexmin in any::<bool>(), eps in 0.02f64..0.3) {
        let n = 2 + (seed % 3) as usize;
        let cpp = gen_random_polytope_cpp(2, n, n + 2, seed).unwrap();
        let inst = build_mocp(&cpp).unwrap();
        let opts = options(lexmin);
        let p_ref = reference_upper_image(&cpp).unwrap();
        let outer = primal::run_primal(&inst, eps, &opts).unwrap();
        let inner = dual::run_dual(&inst, eps, None, &opts).unwrap();
        let inner_full = inner.p_level.complete().unwrap();
        for v in outer.p_level.vertices() {
            let t: Vec<f64> = v.iter().map(|x| x + eps).collect();
            prop_assert!(p_ref.contains(&t, 1e-7).unwrap());
        }
        for p in p_ref.vertices() {
            let t: Vec<f64> = p.iter().map(|x| x + eps).collect();
            prop_assert!(inner_full.contains(&t, 1e-7).unwrap());
        }
        let outer_full = outer.p_level.complete().unwrap();
        for v in inner.p_level.vertices() {
            prop_assert!(outer_full.contains(v, 1e-7).unwrap());
        }
        let y_in = extract_y(&inner.p_level, 2).unwrap();
        let y_out = extract_y(&outer.p_level, 2).unwrap().complete().unwrap();
        for v in y_in.vertices() {
            prop_assert!(y_out.contains(v, 1e-7).unwrap());
        }
    }
}

#[test]
fn fifo_and_lexmin_agree_on_small_examples() {
    let ex = gen_dual_tight_cpp(3).unwrap();
    let a = approximate_body(&ex.instance, ex.eps, Algorithm::Dual, &options(true)).unwrap();
    let b = approximate_body(&ex.instance, ex.eps, Algorithm::Dual, &options(false)).unwrap();
    assert!(same_vertex_set(
        a.y_level.unwrap().vertices(),
        b.y_level.unwrap().vertices(),
        1e-9
    ));
}
