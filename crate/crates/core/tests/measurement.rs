use longi_core::dynamics::{longitudinal_trajectory, uniform_grid, LinearPointerModel};
use longi_core::measurement::{
    critical_photon_number, fidelity_from_snr, purcell_rate, quantum_limit_check, required_kappa_vs_photons,
    required_photons, required_tau, snr_dispersive, snr_longitudinal, snr_numeric, snr_squeezed, snr_for_fidelity,
    HomodyneSetup, Quadrature, SqueezePolicy,
};
use longi_core::model::mhz_to_rad;
use longi_core::{EnvelopeSpec, Error, ReadoutProtocol, SqueezeSpec, SystemParams};
use proptest::prelude::*;

/// The closed forms written out directly, without the series branch.
fn eq_long(a: f64, x: f64) -> f64 {
    8f64.sqrt() * a * x.sqrt() * (1.0 - 2.0 / x * (1.0 - (-x / 2.0).exp()))
}

fn eq_disp(a: f64, x: f64) -> f64 {
    8f64.sqrt() * a * x.sqrt() * (1.0 - 2.0 / x * (1.0 - (-x / 2.0).exp() * (x / 2.0).cos()))
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let num: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    num / den
}

#[test]
fn anchor_values_at_fifty_nanoseconds() {
    let kappa = mhz_to_rad(4.0);
    let tau = 50e-9;
    assert!((kappa * tau - 1.2566).abs() < 1e-4);
    let z = snr_longitudinal(kappa, kappa, tau).unwrap().snr;
    let d = snr_dispersive(kappa, kappa, tau).unwrap().snr;
    assert!((z - 0.817).abs() < 1e-3, "{z}");
    assert!((d - 0.303).abs() < 1e-3, "{d}");
}

#[test]
fn closed_forms_agree_with_direct_evaluation() {
    for x in [0.6, 1.0, 3.0, 10.0, 100.0] {
        for a in [0.3, 1.0, 7.0] {
            let z = snr_longitudinal(a, 1.0, x).unwrap().snr;
            let d = snr_dispersive(a, 1.0, x).unwrap().snr;
            assert!((z - eq_long(a, x)).abs() <= 1e-12 * z);
            assert!((d - eq_disp(a, x)).abs() <= 1e-12 * d);
        }
    }
}

#[test]
fn short_time_series() {
    let x = 1e-3;
    let z = snr_longitudinal(1.0, 1.0, x).unwrap().snr;
    assert!((z / (x.powf(1.5) / 2f64.sqrt()) - 1.0).abs() < 1e-3);
    let d = snr_dispersive(1.0, 1.0, x).unwrap().snr;
    assert!((d / (8f64.sqrt() * x.sqrt() * x * x / 12.0) - 1.0).abs() < 1e-3);
}

#[test]
fn short_time_exponents() {
    let xs: Vec<f64> = (0..=40).map(|k| 10f64.powf(-4.0 + 2.0 * k as f64 / 40.0)).collect();
    let z: Vec<f64> = xs.iter().map(|&x| snr_longitudinal(1.0, 1.0, x).unwrap().snr).collect();
    let d: Vec<f64> = xs.iter().map(|&x| snr_dispersive(1.0, 1.0, x).unwrap().snr).collect();
    assert!((slope(&xs, &z) - 1.5).abs() < 0.01);
    assert!((slope(&xs, &d) - 2.5).abs() < 0.01);
}

#[test]
fn longitudinal_beats_dispersive_at_equal_drive() {
    // Equal at κτ = 4πk and indistinguishable in double precision once the
    // e^{−κτ/2} terms underflow, so strict inequality is checked where it is
    // representable.
    for k in 0..=600 {
        let x = 10f64.powf(-3.0 + 6.0 * k as f64 / 600.0);
        let z = snr_longitudinal(1.0, 1.0, x).unwrap().snr;
        let d = snr_dispersive(1.0, 1.0, x).unwrap().snr;
        if x <= 12.0 {
            assert!(z > d, "κτ = {x}");
        } else {
            assert!(z >= d * (1.0 - 1e-15), "κτ = {x}");
        }
    }
    let x = 1e3;
    let ratio = snr_longitudinal(1.0, 1.0, x).unwrap().snr / (8f64.sqrt() * x.sqrt());
    assert!((ratio - 1.0).abs() < 3e-3);
}

#[test]
fn numeric_snr_reproduces_both_formulas() {
    for a in [0.1, 1.0, 13.0] {
        for x in [0.05, 0.7, 2.0, 9.0] {
            let times = uniform_grid(x, 1001).unwrap();
            let p = SystemParams::dimensionless().with_g_z_mod(a).with_epsilon(a).with_chi(0.5);
            let long = LinearPointerModel::longitudinal(&p.with_chi(0.0)).trajectory(&EnvelopeSpec::step(), &times).unwrap();
            let disp = LinearPointerModel::dispersive(&p).trajectory(&EnvelopeSpec::step(), &times).unwrap();
            let setup = HomodyneSetup::optimal(x);
            let nz = snr_numeric(&long, &setup).unwrap().snr;
            let nd = snr_numeric(&disp, &setup).unwrap().snr;
            assert!((nz / eq_long(a, x) - 1.0).abs() < 1e-6, "a={a} x={x}");
            assert!((nd / eq_disp(a, x) - 1.0).abs() < 1e-6, "a={a} x={x}");
        }
    }
}

#[test]
fn numeric_snr_on_a_partial_span() {
    let times = uniform_grid(10.0, 4001).unwrap();
    let traj = LinearPointerModel::longitudinal(&SystemParams::dimensionless().with_g_z_mod(1.0))
        .trajectory(&EnvelopeSpec::step(), &times)
        .unwrap();
    for x in [0.3333, 1.2566, 5.0, 10.0] {
        let n = snr_numeric(&traj, &HomodyneSetup::optimal(x)).unwrap().snr;
        assert!((n / eq_long(1.0, x) - 1.0).abs() < 1e-6);
    }
    assert!(matches!(snr_numeric(&traj, &HomodyneSetup::optimal(11.0)), Err(Error::TauOutOfRange { .. })));
}

#[test]
fn fixed_quadrature_projects_the_signal() {
    let times = uniform_grid(2.0, 801).unwrap();
    let traj = LinearPointerModel::longitudinal(&SystemParams::dimensionless().with_g_z_mod(1.0))
        .trajectory(&EnvelopeSpec::step(), &times)
        .unwrap();
    let best = snr_numeric(&traj, &HomodyneSetup::optimal(2.0)).unwrap().snr;
    for phi in [0.0, 0.4, 1.0, std::f64::consts::FRAC_PI_2] {
        let setup = HomodyneSetup { quadrature: Quadrature::Fixed(phi), ..HomodyneSetup::optimal(2.0) };
        let s = snr_numeric(&traj, &setup).unwrap().snr;
        // The separation is along the imaginary axis; the phase π/2 rotates it onto the real one.
        assert!((s - best * (phi - std::f64::consts::FRAC_PI_2).cos().abs()).abs() < 1e-9 * best);
    }
}

#[test]
fn zero_trajectory_has_zero_snr() {
    let traj = longitudinal_trajectory(&SystemParams::dimensionless(), &EnvelopeSpec::step(), 1.0, 11).unwrap();
    let r = snr_numeric(&traj, &HomodyneSetup::optimal(1.0)).unwrap();
    assert_eq!(r.signal, 0.0);
    assert!(r.noise > 0.0);
    assert_eq!(r.snr, 0.0);
}

#[test]
fn residual_chi_barely_changes_the_snr() {
    let times = uniform_grid(1.0, 2001).unwrap();
    let p = SystemParams::dimensionless().with_g_z_mod(1.0);
    let ideal = LinearPointerModel::longitudinal(&p).trajectory(&EnvelopeSpec::step(), &times).unwrap();
    let chi = LinearPointerModel::longitudinal(&p.with_chi(0.2)).trajectory(&EnvelopeSpec::step(), &times).unwrap();
    for k in 1..=20 {
        let x = k as f64 / 20.0;
        let a = snr_numeric(&ideal, &HomodyneSetup::optimal(x)).unwrap().snr;
        let b = snr_numeric(&chi, &HomodyneSetup::optimal(x)).unwrap().snr;
        assert!((b / a - 1.0).abs() < 0.05);
    }
}

#[test]
fn squeezing_gain() {
    let base = snr_longitudinal(1.0, 1.0, 1.2566).unwrap();
    let sq = snr_squeezed(&base, &SqueezeSpec::from_db(20.0, 1.0).unwrap()).unwrap();
    assert!((sq.snr / base.snr - 10.0).abs() < 1e-12);
    let mixed = snr_squeezed(&base, &SqueezeSpec::from_db(20.0, 0.81).unwrap()).unwrap();
    assert!((mixed.snr / base.snr - 9.0).abs() < 1e-12);
    assert_eq!(snr_squeezed(&base, &SqueezeSpec::vacuum()).unwrap().snr, base.snr);
    let disp = snr_dispersive(1.0, 1.0, 1.0).unwrap();
    assert!(matches!(snr_squeezed(&disp, &SqueezeSpec::vacuum()), Err(Error::Unsupported(_))));
}

#[test]
fn fidelity_map() {
    assert_eq!(fidelity_from_snr(0.0), 0.5);
    let star = snr_for_fidelity(0.9999).unwrap();
    assert!((star - 5.2598).abs() < 1e-3, "{star}");
    assert!((fidelity_from_snr(star) - 0.9999).abs() < 1e-12);
    assert!((1.0 - fidelity_from_snr(2.0) - 0.078_649_6).abs() < 1e-6);
    let mut last = 0.0;
    for k in 0..200 {
        let f = fidelity_from_snr(k as f64 * 0.05);
        assert!(f >= last);
        last = f;
    }
}

#[test]
fn photon_budgets_at_four_megahertz() {
    let kappa = mhz_to_rad(4.0);
    let long = required_photons(kappa, 50e-9, 0.9999, ReadoutProtocol::Longitudinal, &SqueezePolicy::None).unwrap();
    let disp = required_photons(kappa, 50e-9, 0.9999, ReadoutProtocol::Dispersive, &SqueezePolicy::None).unwrap();
    assert!((35.0..=50.0).contains(&long), "{long}");
    assert!((400.0..=650.0).contains(&disp), "{disp}");
    let sq = required_photons(
        kappa,
        50e-9,
        0.9999,
        ReadoutProtocol::Longitudinal,
        &SqueezePolicy::Optimized { max_db: 20.0, purity: 1.0 },
    )
    .unwrap();
    assert!((sq * 100.0 / long - 1.0).abs() < 1e-12);
}

#[test]
fn required_kappa_is_consistent_with_the_photon_budget() {
    let kappa = mhz_to_rad(4.0);
    let n = required_photons(kappa, 50e-9, 0.9999, ReadoutProtocol::Longitudinal, &SqueezePolicy::None).unwrap();
    let found = required_kappa_vs_photons(n * 1.0001, 50e-9, 0.9999, ReadoutProtocol::Longitudinal, &SqueezePolicy::None)
        .unwrap();
    assert!((found / kappa - 1.0).abs() < 2e-3, "{}", found / kappa);
    let tiny = required_kappa_vs_photons(1e-6, 50e-9, 0.9999, ReadoutProtocol::Longitudinal, &SqueezePolicy::None);
    assert!(matches!(tiny, Err(Error::NoBracket { .. })));
}

#[test]
fn purcell_and_critical_photons() {
    let kappa = mhz_to_rad(10.0);
    let delta = 2.0 * std::f64::consts::PI * 3e9;
    let gamma = purcell_rate(delta / 10.0, delta, kappa).unwrap();
    assert!((1.0 / gamma / 1.6e-6 - 1.0).abs() < 0.02);
    assert!((critical_photon_number(delta / 10.0, delta) - 25.0).abs() < 1e-12);
    assert_eq!(critical_photon_number(0.0, delta), f64::INFINITY);
    assert!(purcell_rate(1.0, 0.0, kappa).is_err());
}

#[test]
fn quantum_limit_is_saturated() {
    for (g, kappa) in [(1.0, 1.0), (2.0, 1.0), (0.3, 7.0), (mhz_to_rad(21.0), mhz_to_rad(4.0))] {
        let q = quantum_limit_check(g, kappa).unwrap();
        assert!((q.gamma_phi_m - 2.0 * g * g / kappa).abs() < 1e-12 * q.gamma_phi_m);
        assert!((q.ratio.unwrap() - 1.0).abs() < 1e-6);
    }
    let q = quantum_limit_check(2.0, 1.0).unwrap();
    assert!((q.gamma_meas - 8.0).abs() < 1e-5);
    let zero = quantum_limit_check(0.0, 1.0).unwrap();
    assert_eq!((zero.gamma_meas, zero.gamma_phi_m, zero.ratio), (0.0, 0.0, None));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn required_tau_lands_just_above_target(g in 0.2f64..30.0, f in 0.6f64..0.99999, disp in any::<bool>()) {
        let protocol = if disp { ReadoutProtocol::Dispersive } else { ReadoutProtocol::Longitudinal };
        let tau = required_tau(g, 1.0, f, protocol, None).unwrap();
        let reached = fidelity_from_snr(longi_core::measurement::snr_analytic(protocol, g, 1.0, tau).unwrap().snr);
        prop_assert!(reached - f >= 0.0 && reached - f <= 1e-8, "{}", reached - f);
    }

    #[test]
    fn squeezing_preserves_required_tau_order(g in 0.2f64..30.0, db in 0.0f64..20.0, p in 0.5f64..1.0) {
        let sq = SqueezeSpec::from_db(db, p).unwrap();
        let f = 0.9999;
        let lo = required_tau(g, 1.0, f, ReadoutProtocol::Longitudinal, Some(&sq)).unwrap();
        let hi = required_tau(g * 1.5, 1.0, f, ReadoutProtocol::Longitudinal, Some(&sq)).unwrap();
        prop_assert!(hi <= lo);
        let base = snr_longitudinal(g, 1.0, 2.0).unwrap();
        let gain = snr_squeezed(&base, &sq).unwrap().snr / base.snr;
        prop_assert!((gain - (sq.r).exp() * p.sqrt()).abs() < 1e-12 * gain);
    }

    #[test]
    fn longitudinal_never_needs_more_time(g in 0.2f64..30.0, f in 0.6f64..0.999999) {
        let t_long = required_tau(g, 1.0, f, ReadoutProtocol::Longitudinal, None).unwrap();
        let t_disp = required_tau(g, 1.0, f, ReadoutProtocol::Dispersive, None).unwrap();
        // The two SNR curves touch at κτ = 4πk, so strictness is only testable before the first contact.
        if t_disp <= 12.0 {
            prop_assert!(t_long < t_disp, "g {} f {}: {} vs {}", g, f, t_long, t_disp);
        } else {
            prop_assert!(t_long <= t_disp * (1.0 + 1e-9));
        }
    }

    #[test]
    fn snr_is_monotone_in_time(a in 0.01f64..10.0, x in 1e-3f64..200.0, dx in 1e-3f64..5.0) {
        for f in [snr_longitudinal, snr_dispersive] {
            let s0 = f(a, 1.0, x).unwrap().snr;
            let s1 = f(a, 1.0, x + dx).unwrap().snr;
            prop_assert!(s0 >= 0.0 && s1 >= s0);
        }
    }
}
