use hmfp_core::casimir::{check_h3_ratio, positive_part_inverse_derivative};
use hmfp_core::CasimirSpec;
use proptest::prelude::*;

fn specs() -> Vec<CasimirSpec> {
    vec![
        CasimirSpec::entropy(),
        CasimirSpec::power(1.5).unwrap(),
        CasimirSpec::power(2.0).unwrap(),
        CasimirSpec::power(3.7).unwrap(),
    ]
}

proptest! {
    #[test]
    fn midpoint_convexity(a in 1e-4f64..50.0, gap in 1e-3f64..50.0) {
        let b = a + gap;
        for s in specs() {
            let mid = s.j(0.5 * (a + b));
            prop_assert!(mid < 0.5 * (s.j(a) + s.j(b)), "{s} at ({a}, {b})");
        }
    }

    #[test]
    fn power_growth_is_exactly_homogeneous(p in 1.05f64..6.0, b in 1.0f64..10.0, t in 1e-3f64..10.0) {
        let s = CasimirSpec::power(p).unwrap();
        let (lhs, rhs) = (b.powf(p) * s.j(t), s.j(b * t));
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs);
    }

    #[test]
    fn inverse_derivative_sandwich_is_tight(p in 1.05f64..6.0, t in 1e-3f64..1e3) {
        let s = CasimirSpec::power(p).unwrap();
        let (pp, q) = s.exponents().unwrap();
        let x = s.inverse_derivative(t);
        let mid = s.j(x);
        prop_assert!((mid - t * x / q).abs() <= 1e-12 * mid);
        prop_assert!((mid - t * x / pp).abs() <= 1e-12 * mid);
    }

    #[test]
    fn inverse_derivative_round_trips(t in 1e-6f64..1e6) {
        for s in specs() {
            let back = s.inverse_derivative(s.j_prime(t));
            prop_assert!((back - t).abs() <= 1e-12 * t, "{s}: {t} -> {back}");
        }
    }
}

#[test]
fn superlinear_growth() {
    for s in specs() {
        let ratios: Vec<f64> = (1..=6).map(|k| 10f64.powi(k)).map(|t| s.j(t) / t).collect();
        assert!(ratios.windows(2).all(|w| w[0] < w[1]), "{s}: {ratios:?}");
    }
}

#[test]
fn second_derivative_is_positive() {
    for s in specs() {
        for t in [1e-6, 1e-2, 1.0, 10.0, 1e4] {
            assert!(s.j_second(t) > 0.0);
        }
        assert_eq!(s.j(0.0), 0.0);
    }
}

#[test]
fn positive_part_examples() {
    let p2 = CasimirSpec::power(2.0).unwrap();
    assert_eq!(positive_part_inverse_derivative(&p2, 3.0).unwrap(), 1.5);
    assert_eq!(positive_part_inverse_derivative(&p2, -1.0).unwrap(), 0.0);
    assert_eq!(positive_part_inverse_derivative(&p2, 0.0).unwrap(), 0.0);
    let p3 = CasimirSpec::power(3.0).unwrap();
    assert!((positive_part_inverse_derivative(&p3, 12.0).unwrap() - 2.0).abs() < 1e-14);
    assert!(positive_part_inverse_derivative(&CasimirSpec::entropy(), 1.0).is_err());
}

#[test]
fn growth_ratio_of_entropy_is_unbounded() {
    let e = CasimirSpec::entropy();
    let (lo, hi) = check_h3_ratio(&e, &[0.5, 2.0]).unwrap();
    assert!((lo - (1.0 + 1.0 / 0.5f64.ln())).abs() < 1e-12);
    assert!((hi - (1.0 + 1.0 / 2f64.ln())).abs() < 1e-12);
    let (_, near_one) = check_h3_ratio(&e, &[1.0 + 1e-9]).unwrap();
    assert!(near_one > 1e8);
    assert!(!e.h3() && !e.h1() && e.h2());
    assert_eq!(check_h3_ratio(&CasimirSpec::power(1.5).unwrap(), &[0.1, 7.0]).unwrap(), (1.5, 1.5));
}
