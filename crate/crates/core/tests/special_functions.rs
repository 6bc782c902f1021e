use mlfrac::special_functions::{gamma, ln_gamma, mittag_leffler, MLParams};
use proptest::prelude::*;

// (alpha, beta, z, value) from a 40-digit independent evaluation
const REFERENCE: &[(f64, f64, f64, f64)] = &[
    (0.5, 0.5, -1.0, 0.13660600739194928),
    (0.3, 1.0, -2.0, 0.29023222616787536),
    (0.5, 0.5, -2.0, 0.0533982309267448),
    (0.5, 1.0, -1.0, 0.427583576155807),
    (0.25, 0.25, -3.0, 0.014567819940323704),
    (0.75, 0.75, -5.0, 0.012140520971468212),
    (0.5, 0.5, -10.0, 0.0027796561095304283),
    (0.5, 1.0, -20.0, 0.02817434874105132),
    (0.9, 1.0, -10.0, 0.0128206060511021),
    (0.25, 1.0, -50.0, 0.016097508838799058),
    (0.75, 1.0, -40.0, 0.007075674755826428),
    (0.999, 1.0, -5.0, 0.007043956926684041),
    (0.999, 1.0, -30.0, 3.5830164124046636e-05),
    (0.5, 1.0, 2.0, 108.94090438997797),
    (0.5, 0.5, -4.0, 0.016191753047510728),
    (0.75, 0.75, -6.0, 0.008004705218181259),
    (0.25, 0.25, -12.0, 0.0012634038722397114),
    (0.5, 1.5, -7.0, 0.1314571350958353),
    (1.5, 1.0, -20.0, 0.019595747930187507),
    (0.6, 2.5, -25.0, 0.03985638355431804),
    (0.5, 0.5, -50.0, 0.00011277028156766193),
    (0.75, 0.75, -15.0, 0.001055655329729508),
    (0.5, 0.5, -15.0, 0.0012454877201698007),
    (0.25, 0.25, -15.0, 0.0008272035074121808),
    (0.5, 0.5, 3.0, 48618.53075158231),
    (0.75, 1.75, -8.0, 0.12008301824485773),
    // small orders, where the series is unusable and the expansion nearly hits Γ poles
    (0.1, 0.5, -10.972343107277513, 0.038_468_482_703_173_566),
    (0.1, 0.6, -10.972343107277513, 0.047_913_293_970_536_98),
    (0.20125316563075074, 1.0, -27.61691836514009, 0.030_207_993_867_764_578),
    // beta just below alpha + 1
    (
        0.8707304938264167,
        1.8706125256016637,
        -7.780316957321136,
        0.125_633_444_096_216_55,
    ),
];

fn ml(alpha: f64, beta: f64, z: f64) -> f64 {
    mittag_leffler(MLParams::new(alpha, beta).unwrap(), z).unwrap()
}

#[test]
fn matches_reference_values() {
    for &(a, b, z, want) in REFERENCE {
        let got = ml(a, b, z);
        let rel = (got - want).abs() / want.abs();
        assert!(rel <= 1e-12, "E_{{{a},{b}}}({z}) = {got}, want {want}, rel {rel:.2e}");
    }
}

#[test]
fn half_order_closed_form() {
    // E_{1/2,1}(-x) = exp(x^2) erfc(x); checked against a tabulated erfc product
    let cases = [(1.0, 0.427_583_576_155_807), (2.0, 0.255_395_676_310_505_74)];
    for (x, want) in cases {
        assert!((ml(0.5, 1.0, -x) - want).abs() < 1e-14);
    }
}

#[test]
fn rejects_bad_parameters() {
    assert!(MLParams::new(0.0, 1.0).is_err());
    assert!(MLParams::new(0.5, -1.0).is_err());
    assert!(MLParams::new(f64::NAN, 1.0).is_err());
}

proptest! {
    #[test]
    fn order_one_is_exponential(z in -30.0f64..30.0) {
        let got = ml(1.0, 1.0, z);
        prop_assert!((got - z.exp()).abs() <= 1e-12 * z.exp());
    }

    #[test]
    fn order_two_is_cosine(x in 0.0f64..10.0) {
        prop_assert!((ml(2.0, 1.0, -x * x) - x.cos()).abs() <= 1e-10);
    }

    #[test]
    fn beta_recurrence(alpha in 0.1f64..1.0, beta in 0.5f64..2.0, z in -20.0f64..1.0) {
        let lhs = ml(alpha, beta, z);
        let rhs = 1.0 / gamma(beta) + z * ml(alpha, alpha + beta, z);
        prop_assert!((lhs - rhs).abs() <= 1e-11 * (1.0 + z.abs()), "{lhs} vs {rhs}");
    }

    #[test]
    fn completely_monotone_on_negative_axis(alpha in 0.05f64..1.0, x in 0.0f64..40.0, dx in 0.01f64..5.0) {
        let a = ml(alpha, 1.0, -x);
        let b = ml(alpha, 1.0, -x - dx);
        prop_assert!(a > 0.0 && a <= 1.0);
        prop_assert!(b <= a);
    }

    #[test]
    fn gamma_functional_equation(x in 0.05f64..20.0) {
        let lhs = gamma(x + 1.0);
        let rhs = x * gamma(x);
        prop_assert!((lhs - rhs).abs() <= 1e-13 * lhs.abs());
        prop_assert!((ln_gamma(x) - gamma(x).ln()).abs() <= 1e-12 * (1.0 + ln_gamma(x).abs()));
    }
}
