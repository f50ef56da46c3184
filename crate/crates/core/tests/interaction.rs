mod common;

use std::f64::consts::PI;

use hmfp_core::interaction::{density, poisson_residual, solve_potential_direct, KERNEL_W_PRIME_SUP};
use hmfp_core::*;
use proptest::prelude::*;

fn grid() -> PhaseGrid {
    make_grid(64, 32, 5.0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn potential_has_zero_mean_and_bounded_slope(seed in any::<u64>()) {
        let f = common::random_field(grid(), &mut common::rng(seed));
        let phi = solve_potential(&f);
        let sup = phi.values().iter().fold(0.0f64, |m, x| m.max(x.abs()));
        prop_assert!(phi.mean().abs() <= 1e-12 * sup);
        let slope = phi.derivative().iter().fold(0.0f64, |m, x| m.max(x.abs()));
        prop_assert!(slope <= KERNEL_W_PRIME_SUP * integrate(&f) * (1.0 + 1e-12));
    }

    #[test]
    fn potential_is_linear(s1 in any::<u64>(), s2 in any::<u64>(), a in 0.1f64..3.0) {
        let mut r = common::rng(s1);
        let f = common::random_field(grid(), &mut r);
        let g = common::random_field(grid(), &mut common::rng(s2));
        let sum = DistributionField::new(*f.grid(), f.values().iter().zip(g.values()).map(|(x, y)| a * x + y).collect()).unwrap();
        let (pf, pg, ps) = (solve_potential(&f), solve_potential(&g), solve_potential(&sum));
        let scale = ps.values().iter().chain(ps.derivative()).fold(0.0f64, |m, x| m.max(x.abs()));
        for i in 0..ps.values().len() {
            prop_assert!((ps.values()[i] - a * pf.values()[i] - pg.values()[i]).abs() <= 1e-12 * scale);
            prop_assert!((ps.derivative()[i] - a * pf.derivative()[i] - pg.derivative()[i]).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn density_carries_the_mass(seed in any::<u64>()) {
        let f = common::random_field(grid(), &mut common::rng(seed));
        let m = integrate(&f);
        prop_assert!((density(&f).total() - m).abs() <= 1e-12 * m);
    }
}

#[test]
fn poisson_residual_is_second_order() {
    let res = |n: usize| {
        let g = make_grid(n, 32, 5.0).unwrap();
        let f = DistributionField::from_fn(g, |t, v| (1.0 + 0.6 * (2.0 * t).cos() + 0.3 * t.sin()) * (-v * v / 2.0).exp()).unwrap();
        poisson_residual(&solve_potential(&f), &density(&f))
    };
    let (a, b) = (res(32), res(64));
    assert!(a / b > 3.5, "{a} {b}");
}

#[test]
fn convolution_and_green_function_routes_agree() {
    let err = |n: usize| {
        let g = make_grid(n, 16, 4.0).unwrap();
        let f = DistributionField::from_fn(g, |t, _| (t.cos() + 0.5 * (3.0 * t).sin()).exp()).unwrap();
        let phi = solve_potential(&f);
        phi.sup_distance(&solve_potential_direct(&f)) / phi.max()
    };
    let (a, b) = (err(64), err(128));
    assert!(a < 1e-2 && (a / b).log2() > 1.8, "{a} {b}");
}

#[test]
fn cosine_density_in_closed_form() {
    let g = make_grid(256, 16, 1.0).unwrap();
    let f = DistributionField::from_fn(g, |t, _| (1.0 + t.cos()) / 2.0).unwrap();
    let phi = solve_potential(&f);
    for (i, &x) in phi.values().iter().enumerate() {
        assert!((x + g.theta(i).cos()).abs() < 1e-8);
    }
    assert!((integrate(&f) - 2.0 * PI).abs() < 1e-12);
}
