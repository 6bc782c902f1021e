use mlfrac::ab_operators::TimeGrid;
use mlfrac::diagnostics::{
    default_ratio, holder_seminorm, oscillation, oscillation_decay, point_estimate_scenario, ParabolicCylinder,
    PointEstimateSetup, Region,
};
use mlfrac::error::Error;
use mlfrac::kernels::{FractionalOrder, SpatialKernelSpec};
use mlfrac::nonlocal_space::{FarField, SpaceGrid};
use mlfrac::parabolic_solver::{Forcing, SolverConfig, SpaceTimeField};
use proptest::prelude::*;

fn field(kappa: usize, n: usize, f: impl Fn(f64, f64) -> f64) -> SpaceTimeField {
    SpaceTimeField::from_fn(
        TimeGrid::new(-1.0, 0.0, kappa).unwrap(),
        SpaceGrid::new(2.0, n, FarField::Zero).unwrap(),
        f,
    )
    .unwrap()
}

#[test]
fn ratio_choice() {
    assert_eq!(default_ratio(0.5, 1.0), 0.25);
    assert!((default_ratio(0.9, 0.3) - 4f64.powf(-1.5)).abs() < 1e-15);
}

#[test]
fn oscillation_is_translation_equivariant() {
    // spacing 1/32; shift by 8 nodes in x and 4 nodes in t
    let g = |t: f64, x: f64| (3.0 * x).sin() * (1.0 + t * t) + 0.3 * x * t;
    let u = field(64, 129, g);
    let v = field(64, 129, |t, x| g(t + 0.0625, x + 0.25));
    for radius in [0.5, 0.3, 0.1] {
        let a = ParabolicCylinder::new(0.25, -0.0625, radius, 1.0, 0.5).unwrap();
        let b = ParabolicCylinder::new(0.0, -0.125, radius, 1.0, 0.5).unwrap();
        let (oa, ob) = (oscillation(&u, &a).unwrap(), oscillation(&v, &b).unwrap());
        assert!((oa - ob).abs() < 1e-12, "radius {radius}: {oa} vs {ob}");
    }
}

#[test]
fn coarse_grids_are_reported() {
    let u = field(8, 17, |t, x| t + x);
    match oscillation_decay(&u, 0.25, 4, (0.0, 0.0), 1.0, 0.5) {
        Err(Error::Resolution { k, dimension, .. }) => {
            assert_eq!(dimension, "space");
            assert!(k >= 2);
        }
        other => panic!("expected a resolution error, got {other:?}"),
    }
    assert!(oscillation_decay(&u, 1.5, 2, (0.0, 0.0), 1.0, 0.5).is_err());
}

#[test]
fn synthetic_power_recovered() {
    let u = field(64, 513, |_, x| x.abs().sqrt());
    let rep = oscillation_decay(&u, 0.25, 3, (0.0, 0.0), 1.0, 0.5).unwrap();
    assert!((rep.fitted_kappa.unwrap() - 0.5).abs() < 1e-3);
    assert!(rep.nonincreasing);
    assert!(rep.bound_ok.iter().all(|b| *b));
}

#[test]
fn constant_field_has_no_fit() {
    let u = field(16, 65, |_, _| 3.0);
    let rep = oscillation_decay(&u, 0.25, 2, (0.0, 0.0), 1.0, 0.5).unwrap();
    assert_eq!(rep.fitted_kappa, None);
    assert!(rep.oscillations.iter().all(|o| *o == 0.0));
}

#[test]
fn holder_seminorm_of_power() {
    let u = field(4, 257, |_, x| x.abs().powf(0.4));
    let s = holder_seminorm(&u, 0.4, 0.5, 1.0, &Region::whole(&u)).unwrap();
    // |x|^κ is κ-Hölder with constant 2^{1−κ}, reached at x = −y
    assert!(s <= 2f64.powf(0.6) + 1e-12 && s >= 1.0, "{s}");
    assert!(holder_seminorm(&u, 0.0, 0.5, 1.0, &Region::whole(&u)).is_err());
    let tiny = Region {
        x_min: 0.001,
        x_max: 0.002,
        t_min: 0.0,
        t_max: 0.0,
    };
    assert!(holder_seminorm(&u, 0.4, 0.5, 1.0, &tiny).is_err());
}

#[test]
fn point_estimate_grows_with_dip() {
    let cfg = SolverConfig::new(
        FractionalOrder::new(0.5).unwrap(),
        SpatialKernelSpec::calibrated(1.0, 1.0, 1.0).unwrap(),
        Forcing::Zero,
    );
    let setup = PointEstimateSetup::default();
    let control = point_estimate_scenario(&cfg, 0.0, &setup).unwrap();
    assert_eq!(control.theta_emp, 0.0);
    assert!(!control.passed);
    let thetas: Vec<f64> = [0.25, 0.5, 1.0]
        .iter()
        .map(|&mu| point_estimate_scenario(&cfg, mu, &setup).unwrap().theta_emp)
        .collect();
    assert!(
        thetas[0] > 0.0 && thetas[1] > thetas[0] && thetas[2] > thetas[1],
        "{thetas:?}"
    );
    assert!(point_estimate_scenario(&cfg, 3.0, &setup).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn nested_cylinders_shrink_oscillation(a in -2.0f64..2.0, b in -2.0f64..2.0, c in 0.5f64..4.0,
                                           cx in -0.5f64..0.5) {
        let u = field(64, 257, |t, x| a * (c * x).sin() + b * t * x + (t + x).cos());
        let cx = (cx * 64.0).round() / 64.0;
        let rep = oscillation_decay(&u, 0.25, 2, (cx, 0.0), 1.0, 0.5).unwrap();
        prop_assert!(rep.nonincreasing);
    }

    #[test]
    fn seminorm_monotone_in_region(a in -2.0f64..2.0, kappa in 0.2f64..1.0, shift in -5.0f64..5.0, x0 in -1.5f64..0.5) {
        let u = field(16, 65, |t, x| a * (2.0 * x).sin() * (1.0 + t));
        let shifted = field(16, 65, |t, x| a * (2.0 * x).sin() * (1.0 + t) + shift);
        let whole = Region::whole(&u);
        let part = Region { x_min: x0, x_max: x0 + 1.0, t_min: -0.5, t_max: 0.0 };
        let big = holder_seminorm(&u, kappa, 0.5, 1.0, &whole).unwrap();
        let small = holder_seminorm(&u, kappa, 0.5, 1.0, &part).unwrap();
        prop_assert!(small <= big);
        let moved = holder_seminorm(&shifted, kappa, 0.5, 1.0, &whole).unwrap();
        prop_assert!((moved - big).abs() <= 1e-12 * (1.0 + big));
    }
}
