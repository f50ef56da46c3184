mod common;

use std::f64::consts::PI;

use hmfp_core::functionals::{casimir_integral, hamiltonian};
use hmfp_core::rearrangement::*;
use hmfp_core::steady_states::{build_F_phi, energy_pairing, self_consistent_solve};
use hmfp_core::*;
use proptest::prelude::*;

fn l1(f: &DistributionField, g: &DistributionField) -> f64 {
    f.values().iter().zip(g.values()).map(|(a, b)| (a - b).abs()).sum::<f64>() * f.grid().cell_area()
}

fn grid() -> PhaseGrid {
    make_grid(32, 48, 5.0).unwrap()
}

/// Complete elliptic integral of the second kind with parameter `m = k^2`.
fn elliptic_e(m: f64) -> f64 {
    let (mut a, mut g) = (1.0f64, (1.0 - m).sqrt());
    let mut c = m.sqrt();
    let mut sum = 0.5 * c * c;
    let mut pow = 0.5;
    // quadratic convergence reaches full precision in a few steps
    for _ in 0..12 {
        let an = 0.5 * (a + g);
        c = 0.5 * (a - g);
        g = (a * g).sqrt();
        a = an;
        pow *= 2.0;
        sum += pow * c * c;
    }
    PI / (2.0 * a) * (1.0 - sum)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn rearrangement_keeps_mass_and_lowers_casimirs(seed in any::<u64>(), steppy in any::<bool>()) {
        let mut r = common::rng(seed);
        let f = if steppy { common::random_steppy_field(grid(), &mut r) } else { common::random_field(grid(), &mut r) };
        let phi = common::random_potential(grid(), &mut r);
        let g = rearrange_with_energy(&f, &phi).unwrap();
        prop_assert!((integrate(&g) - integrate(&f)).abs() <= 1e-12 * integrate(&f));
        // tie averaging over level sets can only lower a convex Casimir
        for spec in [CasimirSpec::power(2.0).unwrap(), CasimirSpec::power(3.5).unwrap(), CasimirSpec::entropy()] {
            let (a, b) = (casimir_integral(&g, &spec), casimir_integral(&f, &spec));
            prop_assert!(a <= b + 1e-12 * b.abs().max(1.0), "{spec}: {a} > {b}");
        }
        prop_assert!(g.values().iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn rearrangement_is_an_l1_contraction(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let f = common::random_field(grid(), &mut r);
        let g = common::random_field(grid(), &mut r);
        let phi = common::random_potential(grid(), &mut r);
        let d = l1(&rearrange_with_energy(&f, &phi).unwrap(), &rearrange_with_energy(&g, &phi).unwrap());
        prop_assert!(d <= l1(&f, &g) * (1.0 + 1e-12));
    }

    #[test]
    fn rearrangement_lowers_the_energy_pairing(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let f = common::random_field(grid(), &mut r);
        let phi = common::random_potential(grid(), &mut r);
        let g = rearrange_with_energy(&f, &phi).unwrap();
        let gain = energy_pairing(&f, &phi) - energy_pairing(&g, &phi);
        prop_assert!(gain >= -1e-8, "{gain}");
    }

    #[test]
    fn rearrangement_is_idempotent(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let f = common::random_field(grid(), &mut r);
        let phi = common::random_potential(grid(), &mut r);
        let g = rearrange_with_energy(&f, &phi).unwrap();
        let h = rearrange_with_energy(&g, &phi).unwrap();
        for (a, b) in g.values().iter().zip(h.values()) {
            prop_assert!((a - b).abs() <= 1e-14 * a.abs().max(1.0));
        }
    }

    #[test]
    fn functions_of_the_energy_are_fixed(seed in any::<u64>(), temp in 0.3f64..3.0) {
        let phi = common::random_potential(grid(), &mut common::rng(seed));
        let f = build_F_phi(&phi, &CasimirSpec::entropy(), &Multipliers { lambda: 0.0, mu: None }).unwrap();
        let f = DistributionField::new(*f.grid(), f.values().iter().map(|x| x.powf(1.0 / temp)).collect()).unwrap();
        let g = rearrange_with_energy(&f, &phi).unwrap();
        for (a, b) in f.values().iter().zip(g.values()) {
            prop_assert!((a - b).abs() <= 1e-13 * a.max(1e-300).max(1.0));
        }
    }

    #[test]
    fn b_is_convex(seed in any::<u64>(), lo in 0.5f64..40.0, width in 0.1f64..40.0) {
        let phi = common::random_potential(grid(), &mut common::rng(seed));
        let (a, c) = (lo, lo + width);
        let mid = convex_B(&phi, 0.5 * (a + c));
        prop_assert!(mid <= 0.5 * (convex_B(&phi, a) + convex_B(&phi, c)) + 1e-9 * mid.abs().max(1.0));
    }

    #[test]
    fn b_has_slope_a_inverse(seed in any::<u64>(), s in 1.0f64..40.0) {
        let phi = common::random_potential(grid(), &mut common::rng(seed));
        let h = 1e-4;
        let slope = (convex_B(&phi, s + h) - convex_B(&phi, s - h)) / (2.0 * h);
        prop_assert!((slope - a_inverse(&phi, s)).abs() < 1e-6 * (1.0 + slope.abs()));
    }

    #[test]
    fn beta_integrals_agree(seed in any::<u64>(), steppy in any::<bool>()) {
        let mut r = common::rng(seed);
        let (f, g) = if steppy {
            (common::random_steppy_field(grid(), &mut r), common::random_steppy_field(grid(), &mut r))
        } else {
            (common::random_field(grid(), &mut r), common::random_field(grid(), &mut r))
        };
        let a = beta_integral(&f, &g).unwrap();
        let b = beta_integral_direct(&f, &g).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * b.max(1.0));
        let back = beta_integral(&g, &f).unwrap();
        prop_assert!((a - back - (integrate(&g) - integrate(&f))).abs() <= 1e-10 * (1.0 + a + back));
    }

    #[test]
    fn pseudo_inverse_is_the_generalized_inverse(seed in any::<u64>()) {
        let f = common::random_field(grid(), &mut common::rng(seed));
        let top = f.max_value();
        let levels: Vec<f64> = (0..=60).map(|k| k as f64 * top / 50.0).collect();
        let mu = distribution_function(&f, &levels).unwrap();
        let sharp = pseudo_inverse(&mu).unwrap();
        for &t in &levels {
            for k in 0..80 {
                let s = k as f64 * mu.eval(0.0) / 70.0;
                prop_assert_eq!(sharp.eval(s) > t, mu.eval(t) > s);
            }
        }
    }

    #[test]
    fn minimization_iterates_are_equimeasurable(seed in any::<u64>()) {
        let g = make_grid(32, 48, 6.0).unwrap();
        let f0 = common::random_field(g, &mut common::rng(seed));
        let bound = 4.0 * g.n_theta() as f64 * g.cell_area();
        let phi = common::random_potential(g, &mut common::rng(seed ^ 1));
        let d = equimeasurability_defect(&f0, &rearrange_with_energy(&f0, &phi).unwrap()).unwrap();
        prop_assert!(d <= bound, "{d} > {bound}");
    }
}

#[test]
fn sublevel_measure_matches_the_elliptic_integral() {
    // a(2) for phi = -cos theta equals 8 sqrt 6 E(2/3)
    let exact = 8.0 * 6f64.sqrt() * elliptic_e(2.0 / 3.0);
    for n in [64, 256] {
        let phi = Potential::from_fn(make_grid(n, 8, 4.0).unwrap(), |t| -t.cos()).unwrap();
        let a = sublevel_measure_a(&phi, 2.0);
        assert!((a - exact).abs() < 1e-12 * exact, "{a} vs {exact}");
        assert!((a_inverse(&phi, exact) - 2.0).abs() < 1e-10);
    }
    assert!((elliptic_e(0.0) - PI / 2.0).abs() < 1e-15);
    assert!((elliptic_e(0.5) - 1.3506438810476755).abs() < 1e-15);
}

#[test]
fn support_of_a_power_state_matches_its_sublevel_set() {
    let g = make_grid(64, 256, 4.0).unwrap();
    let c = ConstraintSet::one(8.0).unwrap();
    let opts = SolverOptions { tol: 1e-12, ..SolverOptions::default() };
    let seed = Potential::from_fn(g, |t| 0.1 * t.cos()).unwrap();
    let r = self_consistent_solve(&CasimirSpec::power(2.0).unwrap(), &c, &seed, &opts).unwrap();
    let support = distribution_function(&r.field, &[0.0]).unwrap().values()[0];
    let exact = sublevel_measure_a(&r.potential, r.multipliers.lambda);
    // each theta row misses at most one cell at either edge
    let bound = 2.0 * g.d_v() * 2.0 * PI;
    assert!(r.potential.max() - r.potential.min() > 0.1);
    assert!((support - exact).abs() <= bound, "{support} vs {exact}");
}

#[test]
fn decreasing_profile_is_equimeasurable() {
    let f = common::random_steppy_field(grid(), &mut common::rng(4));
    let sharp = decreasing_profile(&f);
    let w = f.grid().cell_area();
    let levels: Vec<f64> = (0..40).map(|k| k as f64 * 0.05).collect();
    let mu = distribution_function(&f, &levels).unwrap();
    for &t in &levels {
        let measure = sharp.values().iter().filter(|&&x| x > t).count() as f64 * w;
        assert!((measure - mu.eval(t)).abs() < 1e-12);
    }
}

#[test]
fn homogeneous_data_is_already_minimizing() {
    let g = grid();
    let f0 = DistributionField::from_fn(g, |_, v| (-(v - 0.5).powi(2)).exp()).unwrap();
    let r = equimeasurable_minimize(&f0, 0.5, 1e-12, 50).unwrap();
    assert_eq!(r.iterations, 0);
    assert!(r.potential.values().iter().all(|x| x.abs() < 1e-14));
    assert_eq!(r.field, symmetric_rearrangement(&f0));
}

#[test]
fn undamped_minimization_lowers_the_hamiltonian() {
    for seed in 0..5 {
        let g = make_grid(32, 64, 6.0).unwrap();
        let f0 = common::random_field(g, &mut common::rng(100 + seed)).scaled(3.0);
        let r = match equimeasurable_minimize(&f0, 1.0, 1e-10, 60) {
            Ok(r) => r,
            Err(HmfError::NonConvergence { .. }) => continue,
            Err(e) => panic!("{e}"),
        };
        let h = &r.hamiltonian_history;
        assert!(h[0] <= hamiltonian(&f0) + 1e-8);
        for w in h.windows(2) {
            assert!(w[1] <= w[0] + 1e-9 * w[0].abs().max(1.0), "{h:?}");
        }
        let bound = 4.0 * g.n_theta() as f64 * g.cell_area();
        assert!(equimeasurability_defect(&f0, &r.field).unwrap() <= bound);
        assert!(solve_potential(&r.field).sup_distance(&r.potential) <= 1e-10);
    }
}

#[test]
fn energy_identity_holds_for_random_pairs() {
    let mut r = common::rng(9);
    for _ in 0..10 {
        let f = common::random_field(grid(), &mut r);
        let phi = common::random_potential(grid(), &mut r);
        let (lhs, rhs) = energy_identity_sides(&f, &phi).unwrap();
        assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0));
    }
}

#[test]
fn profile_csv_round_trip() {
    let f = common::random_field(grid(), &mut common::rng(2));
    let p = decreasing_profile(&f);
    let back = MonotoneProfile::from_csv(&p.to_csv(), StepRule::RightStep).unwrap();
    assert_eq!(back, p);
    assert!(MonotoneProfile::from_csv("breakpoint,value\n0,1\n1,2\n", StepRule::Linear).is_err());
    assert!(MonotoneProfile::from_csv("breakpoint,value\n0,x\n", StepRule::Linear).is_err());
}

#[test]
fn mismatched_grids_are_rejected() {
    let f = common::random_field(grid(), &mut common::rng(3));
    let phi = Potential::zero(make_grid(16, 48, 5.0).unwrap());
    assert!(matches!(rearrange_with_energy(&f, &phi), Err(HmfError::GridMismatch)));
    let other = DistributionField::zeros(make_grid(32, 24, 5.0).unwrap());
    assert!(beta_integral(&f, &other).is_err());
    assert!(equimeasurable_minimize(&DistributionField::zeros(grid()), 0.5, 1e-10, 10).is_err());
}
