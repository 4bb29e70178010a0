use nalgebra::Vector3;
use proptest::prelude::*;

use abtof::analysis::weighted_line_fit;
use abtof::experiment::{simulate_spectrum, ApparatusConfig, ForceMode};
use abtof::fields::{contour_integral_a, moving_charge_b_field, Contour};
use abtof::force::boyer_force_y;
use abtof::kinematics::{delta_y, displacement, velocity_perturbation, KinematicsOptions};
use abtof::model::{electron_speed_from_energy, flux, PhysicalConstants, Side, SolenoidSpec, TrajectorySpec};

fn c() -> PhysicalConstants {
    PhysicalConstants::codata2018()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn flux_is_linear_and_odd(i1 in -0.05f64..0.05, i2 in -0.05f64..0.05) {
        let c = c();
        let f = |i: f64| flux(&SolenoidSpec::bench(i), &c).unwrap().flux;
        let scale = f(0.05).abs();
        prop_assert!((f(i1 + i2) - f(i1) - f(i2)).abs() <= 1e-12 * scale);
        prop_assert_eq!(f(-i1), -f(i1));
    }

    #[test]
    fn moving_charge_field_is_divergence_free(
        x in -1.0f64..1.0, y in -1.0f64..1.0, z in -1.0f64..1.0,
        ex in -0.5f64..0.5, ez in -0.5f64..0.5,
    ) {
        let c = c();
        let e = Vector3::new(ex, 0.0, ez);
        let p = Vector3::new(x, y, z);
        let r = (p - e).norm();
        prop_assume!(r > 0.05);
        let b = |q: Vector3<f64>| moving_charge_b_field(&q, &e, 3.75e6, &c).unwrap();
        prop_assert_eq!(b(p).y, 0.0);
        let h = 1e-5 * r;
        let mut div = 0.0;
        for k in 0..3 {
            let mut dp = Vector3::zeros();
            dp[k] = h;
            div += (b(p + dp)[k] - b(p - dp)[k]) / (2.0 * h);
        }
        // |B| / r is the natural size of any single derivative
        prop_assert!(div.abs() <= 1e-6 * b(p).norm() / r);
    }

    #[test]
    fn enclosing_polygon_integral_is_shape_independent(
        radii in proptest::collection::vec(2.0f64..6.0, 5..9),
        offset in 0.0f64..1.0,
        z in proptest::collection::vec(-0.05f64..0.05, 9),
    ) {
        let c = c();
        let spec = SolenoidSpec::bench(3e-3);
        let a = spec.bore_radius;
        let n = radii.len();
        // star-shaped about the axis; every edge stays at least 1.6a from it
        let verts: Vec<Vector3<f64>> = radii.iter().enumerate().map(|(k, r)| {
            let th = 2.0 * std::f64::consts::PI * (k as f64 + offset * 0.4) / n as f64;
            Vector3::new(r * a * th.cos(), r * a * th.sin(), z[k])
        }).collect();
        let phi = flux(&spec, &c).unwrap().flux;
        let contour = Contour::polygon(verts);
        let ccw = contour_integral_a(&contour, &spec, &c, 1e-10).unwrap();
        let cw = contour_integral_a(&contour.reversed(), &spec, &c, 1e-10).unwrap();
        prop_assert!((ccw / phi - 1.0).abs() <= 1e-8);
        prop_assert!((cw / phi + 1.0).abs() <= 1e-8);
    }

    #[test]
    fn boyer_force_parity_and_inverse_square(x in 2e-3f64..0.1, y in 2e-3f64..0.1) {
        let c = c();
        let phi = 2.7758e-9;
        let v = 3.75e6;
        let f = |x: f64, y: f64| boyer_force_y(phi, (x, y), v, &c).unwrap();
        let f0 = f(x, y);
        prop_assert_eq!(f(-x, y), -f0);
        prop_assert_eq!(f(x, -y), -f0);
        prop_assert!((f(2.0 * x, 2.0 * y) * 4.0 / f0 - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn weighted_fit_recovers_exact_lines(
        slope in -1e-6f64..1e-6, intercept in -1e-9f64..1e-9,
        sig in proptest::collection::vec(1e-12f64..1e-10, 5),
    ) {
        let x: Vec<f64> = (0..5).map(|i| i as f64 * 2.5e-3).collect();
        let y: Vec<f64> = x.iter().map(|x| slope * x + intercept).collect();
        let fit = weighted_line_fit(&x, &y, &sig).unwrap();
        let scale = slope.abs() * 1e-2 + intercept.abs();
        prop_assert!((fit.slope - slope).abs() * 1e-2 <= 1e-9 * scale);
        prop_assert!((fit.intercept - intercept).abs() <= 1e-9 * scale);
        prop_assert!(fit.chi2 <= 1e-12);
    }

    #[test]
    fn spectra_are_reproducible(seed in any::<u64>(), current in 0.0f64..0.01) {
        let cfg = ApparatusConfig { rng_seed: seed, force_mode: ForceMode::ForcePresent, ..ApparatusConfig::default() };
        let a = simulate_spectrum(&cfg, current).unwrap();
        let b = simulate_spectrum(&cfg, current).unwrap();
        prop_assert_eq!(a.histogram.total() as usize, a.shots());
        prop_assert_eq!(a, b);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn lateral_impulse_cancels(energy in 10.0f64..200.0, d in 3e-3f64..0.1, current in 1e-4f64..0.02) {
        let c = c();
        let v = electron_speed_from_energy(energy, &c).unwrap();
        let phi = flux(&SolenoidSpec::bench(current), &c).unwrap().flux;
        let traj = TrajectorySpec::new(v, d, Side::Plus).unwrap();
        let window = 1e5 * traj.time_scale();
        let profile = velocity_perturbation(&traj, phi, &c, window, 1e-9).unwrap();
        let end = *profile.delta_v_y.last().unwrap();
        // the total unsigned impulse is twice the peak velocity change
        prop_assert!(end.abs() <= 1e-6 * 2.0 * profile.peak_abs_delta_v());
    }

    #[test]
    fn displacement_converges_under_window_doubling(energy in 10.0f64..200.0, d in 3e-3f64..0.1) {
        let c = c();
        let v = electron_speed_from_energy(energy, &c).unwrap();
        let phi = flux(&SolenoidSpec::bench(1e-3), &c).unwrap().flux;
        let traj = TrajectorySpec::new(v, d, Side::Minus).unwrap();
        let base = KinematicsOptions::default();
        let doubled = KinematicsOptions { window_over_time_scale: 2.0 * base.window_over_time_scale, ..base };
        let y1 = displacement(&traj, phi, &c, &base).unwrap();
        let y2 = displacement(&traj, phi, &c, &doubled).unwrap();
        prop_assert!((y2 / y1 - 1.0).abs() <= 1e-4);
    }

    #[test]
    fn displacement_sign_follows_flux(current in 1e-4f64..0.02, d in 3e-3f64..0.05) {
        let c = c();
        let v = electron_speed_from_energy(40.0, &c).unwrap();
        let phi = flux(&SolenoidSpec::bench(current), &c).unwrap().flux;
        let plus = TrajectorySpec::new(v, d, Side::Plus).unwrap();
        let pos = delta_y(&plus, &plus.mirrored(), phi, &c).unwrap();
        let neg = delta_y(&plus, &plus.mirrored(), -phi, &c).unwrap();
        prop_assert_eq!(pos.delay_sign, -neg.delay_sign);
        prop_assert!((pos.time_delay / neg.time_delay - 1.0).abs() <= 1e-12);
    }
}
