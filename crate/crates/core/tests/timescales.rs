use dotspin::analysis::gaussian_rate;
use dotspin::optimizer::{gamma_opt, tau_inv_sq_general, tau_inv_sq_pure, PureStateParam};
use dotspin::series::linspace;
use dotspin::{BathDistribution, CommonBathSystem, Complex64, Moment, NamedState};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn fitted_decay_matches_variance_rate(
        re in -2.0f64..2.0,
        im in -2.0f64..2.0,
        theta in 0.0f64..3.14,
        phi in 0.0f64..6.28,
        kb in -1.5f64..1.5,
        j in 0.0f64..5.0,
        n in 10u32..40,
    ) {
        let bath = BathDistribution::unpolarized_exact(n).unwrap();
        let scale = bath.moment(Moment::Casimir) * (1.0 + kb * kb) / 3.0;
        let sys = CommonBathSystem::new(1.0, kb, j, bath).unwrap();
        let s0 = NamedState::GeneralPure { gamma: Complex64::new(re, im), theta, phi }.state().unwrap();
        let rate = tau_inv_sq_general(&s0, &sys).unwrap();
        prop_assume!(rate > 0.05 * scale);
        let times = linspace(0.1 / rate.sqrt(), 21);
        let d: Vec<f64> = times.iter().map(|&t| sys.evolve(&s0, t).decoherence()).collect();
        let fitted = gaussian_rate(&times, &d).unwrap();
        prop_assert!((fitted / rate - 1.0).abs() <= 0.02, "fitted {} vs {}", fitted, rate);
    }
}

#[test]
fn figure_six_curves_are_ordered() {
    let real = |g: f64| PureStateParam::new(Complex64::new(g, 0.0), 0.0, 0.0);
    for k in 0..=200 {
        let d = -1.0 + 0.01 * k as f64;
        let sep = tau_inv_sq_pure(&real(0.0), d, 1.0);
        let singlet = tau_inv_sq_pure(&real(1.0), d, 1.0);
        let triplet = tau_inv_sq_pure(&real(-1.0), d, 1.0);
        let optimal = tau_inv_sq_pure(&real(gamma_opt(d)), d, 1.0);
        assert!(optimal <= sep.min(singlet).min(triplet) + 1e-15, "delta = {d}");
        assert!((singlet - 1.5 * (1.0 - d)).abs() < 1e-14);
        assert!((triplet - 0.5 * (3.0 + d)).abs() < 1e-14);
        assert_eq!(sep < singlet, d < 1.0 / 3.0, "delta = {d}");
    }
}

#[test]
fn optimal_state_decoheres_slowest_in_exact_dynamics() {
    let (ka, kb) = (1.0, 0.5);
    let delta = 2.0 * ka * kb / (ka * ka + kb * kb);
    let bath = BathDistribution::unpolarized_exact(30).unwrap();
    let sys = CommonBathSystem::new(ka, kb, 0.0, bath).unwrap();
    let g = gamma_opt(delta);
    let best = NamedState::GeneralPure { gamma: Complex64::new(g, 0.0), theta: 0.0, phi: 0.0 }.state().unwrap();
    let t = 0.02;
    let d_best = sys.evolve(&best, t).decoherence();
    for other in [-1.0, 0.0, 1.0, 2.0 * g, 0.5 * g] {
        let s = NamedState::GeneralPure { gamma: Complex64::new(other, 0.0), theta: 0.0, phi: 0.0 }.state().unwrap();
        assert!(d_best <= sys.evolve(&s, t).decoherence() + 1e-12, "gamma = {other}");
    }
}
