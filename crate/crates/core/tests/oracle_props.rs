use proptest::prelude::*;
use viscoshell::oracles::{
    ahat_ev, balloon_pressure, bhat_ev, convergence_order, pure_bend_solution, sphere_pressure, BalloonParams, PureBendParams,
    SphereParams,
};

fn d_dt(f: impl Fn(f64) -> f64, t: f64) -> f64 {
    let h = 1e-5 * (1.0 + t);
    (f(t + h) - f(t - h)) / (2.0 * h)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    // η_s dâ/dt = −μ₁ (â − a) with a = e^{−2t/τ}
    #[test]
    fn ahat_ev_solves_its_evolution_law(mu1 in 0.1f64..10.0, eta in 0.05f64..5.0, tau in 0.2f64..5.0, t in 0.01f64..3.0) {
        prop_assert_eq!(ahat_ev(mu1, eta, tau, 0.0), 1.0);
        let f = |t: f64| ahat_ev(mu1, eta, tau, t);
        let res = eta * d_dt(f, t) + mu1 * (f(t) - (-2.0 * t / tau).exp());
        prop_assert!(res.abs() <= 1e-6 * (1.0 + mu1), "residual {}", res);
    }

    // η_b db̂/dt = c₁ (b − b̂) with b = e^{t/τ}
    #[test]
    fn bhat_ev_solves_its_evolution_law(c1 in 0.1f64..10.0, eta in 0.05f64..5.0, tau in 0.2f64..5.0, t in 0.01f64..3.0) {
        prop_assert!((bhat_ev(c1, eta, tau, 0.0).unwrap() - 1.0).abs() <= 1e-15);
        let f = |t: f64| bhat_ev(c1, eta, tau, t).unwrap();
        let res = eta * d_dt(f, t) - c1 * ((t / tau).exp() - f(t));
        prop_assert!(res.abs() <= 1e-6 * (1.0 + c1) * (t / tau).exp(), "residual {}", res);
    }

    // η_b dκ_in/dt = c₁ (κ − κ_in) and M = c κ + c₁ (κ − κ_in)
    #[test]
    fn pure_bending_state_satisfies_its_equations(
        c in 0.2f64..5.0, c1 in 0.2f64..5.0, eta in 0.1f64..5.0, kappa_end in 0.05f64..1.0, t in 0.01f64..1.0,
    ) {
        let p = PureBendParams { c, c1, eta_b: eta, t_end: 1.0, kappa_end, length: std::f64::consts::PI };
        let s = pure_bend_solution(&p, t).unwrap();
        prop_assert!((s.moment - c * s.kappa - c1 * (s.kappa - s.kappa_in)).abs() <= 1e-12 * (1.0 + s.moment.abs()));
        let rate = d_dt(|t| pure_bend_solution(&p, t).unwrap().kappa_in, t);
        prop_assert!((eta * rate - c1 * (s.kappa - s.kappa_in)).abs() <= 1e-6);
        prop_assert!((pure_bend_solution(&p, 1.0).unwrap().kappa - kappa_end).abs() <= 1e-12);
        let s0 = pure_bend_solution(&p, 0.0).unwrap();
        prop_assert!(s0.kappa == 0.0 && s0.kappa_in == 0.0 && s0.u_y == 0.0);
    }

    #[test]
    fn pressure_splits_add_up(mu in 0.5f64..5.0, mu1 in 0.1f64..5.0, eta in 0.05f64..2.0, h0 in 0.0f64..2.0, t in 0.0f64..1.0) {
        let b = BalloonParams { radius: 1.0, mu, mu1, eta_s: eta, t_end: 1.0, lambda_end: 2.0 };
        let s = balloon_pressure(&b, t).unwrap();
        prop_assert!((s.p_total - s.p_el - s.p_visc).abs() <= 1e-14 * (1.0 + s.p_total.abs()));
        let sp = SphereParams {
            radius: 1.0, mu, mu1, c1: 1.0, k: 1.0, h0, eta_s: eta, eta_b: eta, t_end: 1.0, lambda_end: 4f64.cbrt(),
        };
        let s = sphere_pressure(&sp, t).unwrap();
        prop_assert!((s.p_total - s.p_el - s.p_visc).abs() <= 1e-14 * (1.0 + s.p_total.abs()));
        if t == 0.0 {
            prop_assert!(s.ahat_ev == 1.0 && s.bhat_ev == 1.0 && s.p_visc == 0.0);
        }
    }

    #[test]
    fn fitted_order_recovers_power_laws(order in 0.5f64..3.0, c in 1e-3f64..1e3) {
        let h = [1e-1f64, 1e-2, 1e-3, 1e-4];
        let e: Vec<f64> = h.iter().map(|h| c * h.powf(order)).collect();
        prop_assert!((convergence_order(&h, &e).unwrap() - order).abs() <= 1e-10);
    }
}
