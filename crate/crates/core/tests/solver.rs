use mlfrac::ab_operators::{TimeGrid, TimeSeries};
use mlfrac::fode::{solve_discrete, FodeProblem, Source};
use mlfrac::kernels::{FractionalOrder, SpatialKernelSpec};
use mlfrac::nonlocal_space::{FarField, SpaceGrid};
use mlfrac::parabolic_solver::{
    discrete_ibp_check, implicit_euler, manufactured_run, solve, weak_residual, Forcing, LatticeOperator, SolverConfig,
    SpaceTimeField,
};
use proptest::prelude::*;

fn config(alpha: f64, sigma: f64) -> SolverConfig {
    SolverConfig::new(
        FractionalOrder::new(alpha).unwrap(),
        SpatialKernelSpec::calibrated(sigma, 1.0, 1.0).unwrap(),
        Forcing::Zero,
    )
}

fn bump(xg: &SpaceGrid) -> Vec<f64> {
    xg.nodes().iter().map(|x| (-4.0 * x * x).exp()).collect()
}

fn gaussian(x: f64) -> f64 {
    (-4.0 * x * x).exp()
}

fn gaussian_d2(x: f64) -> f64 {
    (64.0 * x * x - 8.0) * (-4.0 * x * x).exp()
}

#[test]
fn constants_are_steady() {
    let cfg = config(0.3, 1.4);
    let xg = SpaceGrid::new(1.5, 31, FarField::Constant { value: -0.4 }).unwrap();
    let tg = TimeGrid::new(-1.0, 0.0, 20).unwrap();
    let sol = solve(&[-0.4; 31], &cfg, &tg, &xg).unwrap();
    assert!(sol.field.values.iter().flatten().all(|v| (v + 0.4).abs() < 1e-13));
    assert_eq!(sol.diagnostics.len(), 20);
    assert!(sol.diagnostics.iter().all(|d| d.w > 0.0));
}

#[test]
fn zero_steps_returns_initial_row() {
    let cfg = config(0.5, 1.0);
    let xg = SpaceGrid::new(1.0, 11, FarField::Zero).unwrap();
    let sol = solve(&bump(&xg), &cfg, &TimeGrid::new(0.0, 1.0, 0).unwrap(), &xg).unwrap();
    assert_eq!(sol.field.values.len(), 1);
    assert_eq!(sol.field.values[0], bump(&xg));
}

#[test]
fn bad_inputs_are_rejected() {
    let cfg = config(0.5, 1.0);
    let xg = SpaceGrid::new(1.0, 11, FarField::Zero).unwrap();
    let tg = TimeGrid::new(0.0, 1.0, 4).unwrap();
    assert!(solve(&[0.0; 10], &cfg, &tg, &xg).is_err());
    let mut bad = cfg.clone();
    bad.linear_solver_tol = 0.0;
    assert!(solve(&[0.0; 11], &bad, &tg, &xg).is_err());
    let mut bad = cfg.clone();
    bad.max_history = Some(0);
    assert!(solve(&[0.0; 11], &bad, &tg, &xg).is_err());
    let mut bad = cfg.clone();
    bad.forcing = Forcing::Sampled(vec![vec![0.0; 11]; 3]);
    assert!(solve(&[0.0; 11], &bad, &tg, &xg).is_err());
    let mut bad = cfg;
    bad.max_iterations = 1;
    assert!(solve(&bump(&xg), &bad, &tg, &xg).is_err());
}

#[test]
fn lattice_is_an_m_matrix() {
    for sigma in [0.3, 1.0, 1.8] {
        let spec = SpatialKernelSpec::calibrated(sigma, 1.0, 1.0).unwrap();
        let lat = LatticeOperator::new(
            &spec,
            &SpaceGrid::new(2.0, 33, FarField::Constant { value: 1.0 }).unwrap(),
        )
        .unwrap();
        lat.check_m_matrix(1e-3).unwrap();
        assert!(lat.check_m_matrix(0.0).is_err());
        let j1 = lat.apply(&[1.0; 33]).unwrap();
        assert!(j1.iter().all(|v| v.abs() < 1e-10 * lat.diag));
    }
}

#[test]
fn decay_without_forcing() {
    let cfg = config(0.5, 1.0);
    let xg = SpaceGrid::new(2.0, 65, FarField::Zero).unwrap();
    let sol = solve(&bump(&xg), &cfg, &TimeGrid::new(0.0, 1.0, 32).unwrap(), &xg).unwrap();
    let maxes: Vec<f64> = sol
        .field
        .values
        .iter()
        .map(|r| r.iter().cloned().fold(f64::MIN, f64::max))
        .collect();
    assert!(maxes.windows(2).all(|w| w[1] <= w[0] + 1e-14), "{maxes:?}");
    assert!(sol.field.values.iter().flatten().all(|v| *v >= -1e-14));
}

#[test]
fn single_point_reduces_to_fode() {
    let o = FractionalOrder::new(0.6).unwrap();
    let mut cfg = config(0.6, 1.0);
    cfg.forcing = Forcing::function(|t, _| (2.0 * t).cos());
    let xg = SpaceGrid::new(1.0, 1, FarField::Zero).unwrap();
    let tg = TimeGrid::new(0.0, 1.0, 50).unwrap();
    let pde = solve(&[0.3], &cfg, &tg, &xg).unwrap().field.column(0);
    let p = FodeProblem::new(o, 1.0, 0.0, Source::from_fn(|t| (2.0 * t).cos(), "cos"), 0.3, 0.0, 1.0).unwrap();
    let ode = solve_discrete(&p, &tg).unwrap();
    for (a, b) in pde.iter().zip(&ode.values) {
        assert!((a - b).abs() <= 1e-8, "{a} vs {b}");
    }
}

#[test]
fn self_convergence() {
    let cfg = config(0.5, 1.0);
    let xg = SpaceGrid::new(2.0, 65, FarField::Zero).unwrap();
    let u0 = bump(&xg);
    let run = |k| {
        solve(&u0, &cfg, &TimeGrid::new(0.0, 1.0, k).unwrap(), &xg)
            .unwrap()
            .field
    };
    let (a, b, c) = (run(32), run(64), run(128));
    let gap = |coarse: &SpaceTimeField, fine: &SpaceTimeField| {
        let kk = coarse.tgrid.kappa;
        coarse
            .row(kk)
            .iter()
            .zip(fine.row(2 * kk))
            .fold(0.0f64, |m, (p, q)| m.max((p - q).abs()))
    };
    let order_emp = (gap(&a, &b) / gap(&b, &c)).log2();
    assert!(order_emp > 0.0, "order {order_emp}");
}

#[test]
fn history_cap() {
    let cfg = config(0.5, 1.0);
    let xg = SpaceGrid::new(2.0, 65, FarField::Zero).unwrap();
    let tg = TimeGrid::new(0.0, 1.0, 64).unwrap();
    let u0 = bump(&xg);
    let full = solve(&u0, &cfg, &tg, &xg).unwrap().field;
    let mut capped = cfg.clone();
    capped.max_history = Some(64);
    assert_eq!(solve(&u0, &capped, &tg, &xg).unwrap().field.values, full.values);
    capped.max_history = Some(16);
    let approx = solve(&u0, &capped, &tg, &xg).unwrap().field;
    assert!(approx.max_abs_diff(&full).unwrap() < 1e-2);
    let steady = SpaceGrid::new(2.0, 65, FarField::Constant { value: 0.5 }).unwrap();
    let s = solve(&[0.5; 65], &capped, &tg, &steady).unwrap().field;
    assert!(s.values.iter().flatten().all(|v| (v - 0.5).abs() < 1e-13));
}

#[test]
fn near_classical_limit() {
    let cfg = config(0.95, 1.0);
    let xg = SpaceGrid::new(2.0, 65, FarField::Zero).unwrap();
    let tg = TimeGrid::new(0.0, 1.0, 64).unwrap();
    let u0 = bump(&xg);
    let frac = solve(&u0, &cfg, &tg, &xg).unwrap().field;
    let heat = implicit_euler(&u0, &cfg, &tg, &xg).unwrap();
    let scale = heat.values.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    assert!(frac.max_abs_diff(&heat).unwrap() <= 0.1 * scale);
}

#[test]
fn weak_form_terms() {
    let cfg = config(0.5, 1.0);
    let xg = SpaceGrid::new(2.0, 33, FarField::Zero).unwrap();
    let tg = TimeGrid::new(0.0, 1.0, 16).unwrap();
    let u = solve(&bump(&xg), &cfg, &tg, &xg).unwrap().field;
    let zero = weak_residual(&u, |_, _| 0.0, &cfg, 1e-9).unwrap();
    assert_eq!(zero.residual, 0.0);

    let flat = SpaceGrid::new(2.0, 33, FarField::Constant { value: 0.8 }).unwrap();
    let c = SpaceTimeField::constant_in_time(tg, flat, &[0.8; 33]).unwrap();
    let theta = |t: f64, x: f64| (1.0 - t) * (-x * x).exp();
    let w = weak_residual(&c, theta, &cfg, 1e-9).unwrap();
    assert_eq!(w.time_form, 0.0);
    assert_eq!(w.source, 0.0);
    assert!(w.space_form.abs() < 1e-9);
    assert!(w.boundary_history != 0.0);
    assert!((w.boundary_history + w.test_operator).abs() < 1e-12);
    assert!(w.residual.abs() < 1e-9);
}

#[test]
fn weak_residual_of_manufactured_solution() {
    let cfg = config(0.5, 1.0);
    let theta = |t: f64, x: f64| (1.0 + t) * (1.0 - x * x).max(0.0);
    let mut last = f64::INFINITY;
    for (k, n) in [(64, 65), (128, 129)] {
        let tg = TimeGrid::new(0.0, 1.0, k).unwrap();
        let xg = SpaceGrid::new(2.0, n, FarField::Zero).unwrap();
        let (sol, rep) = manufactured_run(&cfg, &tg, &xg, gaussian, gaussian_d2, 1e-10).unwrap();
        let mut run_cfg = cfg.clone();
        run_cfg.forcing =
            mlfrac::parabolic_solver::manufactured_forcing(&cfg, &tg, &xg, gaussian, gaussian_d2, 1e-10).unwrap();
        let r = weak_residual(&sol.field, theta, &run_cfg, 1e-9).unwrap().residual.abs();
        assert!(r <= 1e-2 && r < last, "kappa={k}: {r}");
        assert!(rep.max_error < 1e-3);
        last = r;
    }
}

#[test]
fn integration_by_parts_on_sine() {
    let o = FractionalOrder::new(0.5).unwrap();
    let s = TimeSeries::from_fn(TimeGrid::new(0.0, 1.0, 64).unwrap(), |t| t.sin()).unwrap();
    for j in [1, 10, 64] {
        assert!(discrete_ibp_check(&s, &o, j).unwrap().holds);
    }
    let z = TimeSeries::new(TimeGrid::new(0.0, 1.0, 8).unwrap(), vec![0.0; 9]).unwrap();
    let r = discrete_ibp_check(&z, &o, 8).unwrap();
    assert_eq!((r.lhs, r.rhs, r.holds), (0.0, 0.0, true));
    let shifted = TimeSeries::from_fn(TimeGrid::new(0.0, 1.0, 8).unwrap(), |t| t + 1.0).unwrap();
    assert!(discrete_ibp_check(&shifted, &o, 4).is_err());
    assert!(discrete_ibp_check(&z, &o, 9).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn comparison_principle(alpha in 0.1f64..0.9, sigma in 0.4f64..1.8,
                            u1 in prop::collection::vec(-1.0f64..1.0, 17),
                            du in prop::collection::vec(0.0f64..0.5, 17),
                            g1 in prop::collection::vec(-1.0f64..1.0, 17 * 9),
                            dg in prop::collection::vec(0.0f64..0.5, 17 * 9)) {
        let xg = SpaceGrid::new(1.0, 17, FarField::Zero).unwrap();
        let tg = TimeGrid::new(0.0, 1.0, 8).unwrap();
        let rows = |v: &[f64]| v.chunks(17).map(|c| c.to_vec()).collect::<Vec<_>>();
        let g2: Vec<f64> = g1.iter().zip(&dg).map(|(a, b)| a + b).collect();
        let u2: Vec<f64> = u1.iter().zip(&du).map(|(a, b)| a + b).collect();
        let mut c1 = config(alpha, sigma);
        c1.forcing = Forcing::Sampled(rows(&g1));
        let mut c2 = config(alpha, sigma);
        c2.forcing = Forcing::Sampled(rows(&g2));
        let s1 = solve(&u1, &c1, &tg, &xg).unwrap().field;
        let s2 = solve(&u2, &c2, &tg, &xg).unwrap().field;
        for (a, b) in s1.values.iter().flatten().zip(s2.values.iter().flatten()) {
            prop_assert!(*a <= b + 1e-10);
        }
    }

    #[test]
    fn integration_by_parts_random(alpha in 0.05f64..0.95, v in prop::collection::vec(-2.0f64..2.0, 32), j in 1usize..=32) {
        let mut vals = vec![0.0];
        vals.extend(v);
        let s = TimeSeries::new(TimeGrid::new(0.0, 1.0, 32).unwrap(), vals).unwrap();
        prop_assert!(discrete_ibp_check(&s, &FractionalOrder::new(alpha).unwrap(), j).unwrap().holds);
    }
}
