mod common;

use std::f64::consts::PI;

use approx::assert_relative_eq;
use hmfp_core::*;
use proptest::prelude::*;

fn field(grid: PhaseGrid, seed: u64) -> DistributionField {
    common::random_field(grid, &mut common::rng(seed))
}

fn combine(a: f64, f: &DistributionField, b: f64, g: &DistributionField) -> DistributionField {
    let values = f.values().iter().zip(g.values()).map(|(x, y)| a * x + b * y).collect();
    DistributionField::new(*f.grid(), values).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn integrate_is_linear(s1 in any::<u64>(), s2 in any::<u64>(), a in 0.0f64..5.0, b in 0.0f64..5.0) {
        let g = make_grid(16, 24, 5.0).unwrap();
        let (f, h) = (field(g, s1), field(g, s2));
        let lhs = integrate(&combine(a, &f, b, &h));
        let rhs = a * integrate(&f) + b * integrate(&h);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1e-300));
    }

    #[test]
    fn weighted_distance_is_a_metric(s1 in any::<u64>(), s2 in any::<u64>(), s3 in any::<u64>()) {
        let g = make_grid(16, 24, 5.0).unwrap();
        let (f, h, k) = (field(g, s1), field(g, s2), field(g, s3));
        let fh = weighted_l1_distance(&f, &h).unwrap();
        prop_assert_eq!(fh, weighted_l1_distance(&h, &f).unwrap());
        let via = weighted_l1_distance(&f, &k).unwrap() + weighted_l1_distance(&k, &h).unwrap();
        prop_assert!(fh <= via * (1.0 + 1e-12));
        prop_assert_eq!(weighted_l1_distance(&f, &f).unwrap(), 0.0);
    }
}

#[test]
fn unit_field_distance_approaches_the_analytic_value() {
    for n in [16, 64, 256] {
        let g = make_grid(8, n, 1.0).unwrap();
        let one = DistributionField::from_fn(g, |_, _| 1.0).unwrap();
        let d = weighted_l1_distance(&one, &DistributionField::zeros(g)).unwrap();
        assert!((d - 2.0 * PI * 8.0 / 3.0).abs() <= 2.0 * PI * g.d_v().powi(2) / 6.0 + 1e-12);
    }
}

#[test]
fn refinement_converges_at_second_order() {
    let smooth = |t: f64, v: f64| (2.0 + t.sin()) * (v / 2.0).exp();
    let values: Vec<f64> = [8usize, 16, 32]
        .iter()
        .map(|&n| integrate(&DistributionField::from_fn(make_grid(n, n, 2.0).unwrap(), smooth).unwrap()))
        .collect();
    let order = ((values[0] - values[1]) / (values[1] - values[2])).log2();
    assert!(order >= 1.9, "order {order}");
    let exact = 2.0 * PI * 2.0 * 2.0 * (1f64.exp() - (-1f64).exp());
    assert_relative_eq!(values[2], exact, max_relative = 1e-3);
}

#[test]
fn theta_nodes_wrap() {
    let g = make_grid(8, 8, 4.0).unwrap();
    assert_relative_eq!(g.theta(0) + 2.0 * PI, g.d_theta() * 8.0);
    let f = field(g, 1);
    assert_eq!(f.shift_theta_cells(8), f);
    assert_eq!(f.shift_theta_cells(-3).shift_theta_cells(3), f);
}
