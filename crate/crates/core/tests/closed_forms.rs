use lqgsim_core::levy::{check_laplace_functional, StableLaw};
use lqgsim_core::qle::hitting_probability;
use lqgsim_core::sphere::fit_tail_exponent;
use proptest::prelude::*;

/// Classical RK4 for `du/dt = -ψ(u)`, independent of the closed form.
fn u_by_rk4(law: &StableLaw, lambda: f64, t: f64, steps: usize) -> f64 {
    let h = t / steps as f64;
    let f = |u: f64| -law.psi(u.max(0.0));
    let mut u = lambda;
    for _ in 0..steps {
        let k1 = f(u);
        let k2 = f(u + 0.5 * h * k1);
        let k3 = f(u + 0.5 * h * k2);
        let k4 = f(u + h * k3);
        u += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    u
}

#[test]
fn laplace_exponent_matches_the_ode() {
    let law = StableLaw::three_halves();
    for (lambda, t) in [(2.0, 0.5), (0.1, 3.0), (50.0, 0.2), (1.0, 1.0)] {
        let exact = law.u_t(lambda, t).unwrap();
        let rk = u_by_rk4(&law, lambda, t, 20_000);
        assert!((exact - rk).abs() <= 1e-9 * exact, "{lambda} {t}: {exact} vs {rk}");
    }
}

#[test]
fn frozen_targets() {
    let law = StableLaw::three_halves();
    // (λ^{-1/2} + t/2)^{-2}
    let u = (2f64.powf(-0.5) + 0.25).powi(-2);
    let target = (-u).exp();
    assert!((target - 0.335_666).abs() < 1e-6);
    assert!(((-law.u_t(2.0, 0.5).unwrap()).exp() - target).abs() < 1e-14);
    for t in [1.0, 2.0, 4.0] {
        assert!((law.u_t_infinity(t) - 4.0 / (t * t)).abs() < 1e-12);
        for y0 in [0.01, 0.1] {
            assert!((law.extinction_cdf(y0, t) - (-4.0 * y0 / (t * t)).exp()).abs() < 1e-15);
        }
    }
    assert!((law.phi(1.0).unwrap() - 1.0).abs() < 1e-15);
}

#[test]
fn dyadic_bins_of_the_levy_measure() {
    let law = StableLaw::three_halves();
    for a in [1e-3, 0.01, 0.5, 3.0] {
        let ratio = law.levy_measure(a, 2.0 * a) / law.levy_measure(2.0 * a, 4.0 * a);
        assert!((ratio - 2f64.powf(1.5)).abs() < 1e-12);
    }
}

#[test]
fn laplace_functional_at_other_parameters() {
    let law = StableLaw::three_halves();
    let c = check_laplace_functional(&law, 0.5, 1.0, 1.0, 20_000, 5).unwrap();
    assert!(c.within(4.0), "{c:?}");
}

#[test]
fn tail_fit_recovers_a_pareto_exponent() {
    // deterministic quantiles of P[V ≥ v] = v^{-3/2} on v ≥ 1
    let n = 50_000;
    let values: Vec<f64> = (0..n).map(|i| (1.0 - (i as f64 + 0.5) / n as f64).powf(-1.0 / 1.5)).collect();
    let fit = fit_tail_exponent(&values, &vec![1.0; n], (2.0, 20.0)).unwrap();
    assert!((fit.slope + 1.5).abs() < 0.01, "{fit:?}");
    // doubling every weight leaves the fit alone
    let fit2 = fit_tail_exponent(&values, &vec![2.0; n], (2.0, 20.0)).unwrap();
    assert!((fit.slope - fit2.slope).abs() < 1e-12);
}

proptest! {
    #[test]
    fn semigroup_holds(lambda in 1e-3f64..1e3, t in 0.0f64..10.0, s in 0.0f64..10.0) {
        let law = StableLaw::three_halves();
        let direct = law.u_t(lambda, t + s).unwrap();
        let composed = law.u_t(law.u_t(lambda, s).unwrap(), t).unwrap();
        prop_assert!((direct - composed).abs() <= 1e-10 * direct);
        prop_assert!(law.u_t(lambda, t).unwrap() <= lambda);
    }

    #[test]
    fn hitting_probability_is_a_capped_ratio(u in 1e-6f64..1e6, eps in 0.0f64..1e6, more in 0.0f64..10.0) {
        let p = hitting_probability(u, eps).unwrap();
        prop_assert!((0.0..=1.0).contains(&p));
        prop_assert!(hitting_probability(u, eps + more).unwrap() >= p);
        if eps >= u {
            prop_assert_eq!(p, 1.0);
        }
    }
}
