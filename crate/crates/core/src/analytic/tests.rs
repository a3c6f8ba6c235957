use super::laplace::beyond_exponent;
use super::*;
use crate::math::PI;
use crate::model::{thinning_table, SuppressionMode, ThinningTable};

fn quad() -> QuadratureSpec {
    QuadratureSpec::default()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

fn base(rate: f64) -> NetworkConfig {
    NetworkConfig::default().with_rate(rate)
}

/// Trapezoid rule on `[a, b]` with `n` panels.
fn trapezoid(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = 0.5 * (f(a) + f(b));
    for i in 1..n {
        s += f(a + i as f64 * h);
    }
    s * h
}

/// `∫_ρ^∞ (1 − 1/(1 + c x^{−α})) 2πx dx` over `x = ρ eʷ`.
fn pgfl_beyond(rho: f64, c: f64, alpha: f64) -> f64 {
    trapezoid(
        |w| {
            let x = rho * w.exp();
            let t = c * x.powf(-alpha);
            t / (1.0 + t) * 2.0 * PI * x * x
        },
        0.0,
        60.0,
        6000,
    )
}

/// Nested-trapezoid oracle for a nearest-neighbour-protected field.
fn nested_oracle(lambda: f64, alpha: f64, table: &ThinningTable, sp: f64) -> f64 {
    trapezoid(
        |v| {
            if v == 0.0 {
                // ρ → 0 limit, approached by a tiny radius.
                let rho = 1e-9;
                let e: f64 = table.iter().map(|e| e.density * pgfl_beyond(rho, sp * e.power_gain, alpha)).sum();
                return (-e).exp();
            }
            let rho = (v / (lambda * PI)).sqrt();
            let e: f64 = table
                .iter()
                .filter(|e| e.density > 0.0)
                .map(|e| e.density * pgfl_beyond(rho, sp * e.power_gain, alpha))
                .sum();
            (-v - e).exp()
        },
        0.0,
        40.0,
        4000,
    )
}

#[test]
fn li_two_node_examples() {
    let ant = AntennaSystem::symmetric(1, 0.2);
    let cfg = base(1.0);
    assert_eq!(laplace_li_2node(3.0, &cfg, &ant, NodeKind::User), 1.0);
    let cfg = cfg.with_sigma_l2(1e-3);
    assert_eq!(laplace_li_2node(0.0, &cfg, &ant, NodeKind::Bs), 1.0);
    assert!((laplace_li_2node(1.0, &cfg, &ant, NodeKind::User) - 1.0 / 1.001).abs() < 1e-15);
}

#[test]
fn li_three_node_reduces_for_single_sector() {
    let cfg = base(1.0).with_sigma_l2(0.3);
    let ant = AntennaSystem::symmetric(1, 0.2);
    for s in [0.0, 0.1, 1.0, 7.0] {
        let a = laplace_li_3u(s, &cfg, &ant);
        let b = laplace_li_2node(s, &cfg, &ant, NodeKind::Bs);
        assert!((a - b).abs() < 1e-15);
    }
    assert_eq!(laplace_li_3u(2.0, &base(1.0), &AntennaSystem::symmetric(8, 0.2)), 1.0);
}

#[test]
fn li_three_node_eight_sectors_enumerated() {
    let ant = AntennaSystem::symmetric(8, 0.2);
    let (g, h) = (10.0 / 3.0, 2.0 / 3.0);
    let cfg = base(1.0).with_sigma_l2(1.0);
    let tm = 2.0 * PI / 3.0;
    let mut want = 1.0 / (1.0 + g * g);
    for theta in [PI / 4.0, PI / 2.0, 3.0 * PI / 4.0, -PI, -3.0 * PI / 4.0, -PI / 2.0, -PI / 4.0] {
        let f = (tm.cos() - (theta.abs() - tm).cos()).exp().min(1.0);
        want += 1.0 / (1.0 + g * h * f);
    }
    want /= 8.0;
    let got = laplace_li_3u(1.0, &cfg, &ant);
    assert!((got - want).abs() < 1e-14, "{got} vs {want}");
}

#[test]
fn bs_down_trivial_limits() {
    let cfg = base(1.0);
    let ant = AntennaSystem::symmetric(4, 0.2);
    assert_eq!(laplace_interference_bs_down(5.0, 0.0, &cfg, &ant), 1.0);
    assert_eq!(laplace_interference_bs_down(0.0, 1.0, &cfg, &ant), 1.0);
    assert!(laplace_interference_bs_down(1e-6, 1.0, &cfg, &ant) > 1.0 - 1e-12);
}

#[test]
fn bs_down_against_poisson_sampling() {
    use rand::{Rng, SeedableRng};
    let cfg = base(1.0);
    let ant = AntennaSystem::symmetric(1, 0.2);
    let (r, lambda, tau) = (5.0, 0.01, 1.0);
    let exact = laplace_interference_bs_down(r, tau, &cfg, &ant);
    let closed = (-2.0 * PI * lambda / 2.0 * (PI / 4.0) * 25.0f64).exp();
    assert!(rel(exact, closed) < 1e-13);

    let window = 300.0f64;
    let mut rng = rand::rngs::StdRng::seed_from_u64(7);
    let n = 4000;
    let (mut sum, mut sum2) = (0.0, 0.0);
    for _ in 0..n {
        let mut area = lambda * PI * r * r;
        let stop = lambda * PI * window * window;
        let mut prod = 1.0;
        loop {
            area += -(1.0 - rng.random::<f64>()).ln();
            if area > stop {
                break;
            }
            let x2 = area / (lambda * PI);
            prod *= 1.0 / (1.0 + tau * r.powi(4) / (x2 * x2));
        }
        sum += prod;
        sum2 += prod * prod;
    }
    let mean = sum / n as f64;
    let se = ((sum2 / n as f64 - mean * mean) / n as f64).sqrt();
    // Points beyond the window would lower the product by about 2e-4.
    assert!((mean - exact).abs() < 3.0 * se + 3e-4, "{mean} ± {se} vs {exact}");
}

#[test]
fn user_2d_trivial_and_monotone() {
    let cfg = base(1.0).with_alphas(4.0, 3.0);
    let ant = AntennaSystem::symmetric(4, 0.2);
    assert_eq!(laplace_interference_user_2d(0.0, &cfg, &ant, &quad()).unwrap(), 1.0);
    let mut prev = 1.0;
    for k in -6..5 {
        let s = 10f64.powi(k);
        let v = laplace_interference_user_2d(s, &cfg, &ant, &quad()).unwrap();
        assert!(v > 0.0 && v < prev, "s={s}");
        prev = v;
    }
}

#[test]
fn user_2d_against_nested_trapezoid() {
    let cfg = base(1.0).with_alphas(4.0, 3.0);
    let ant = AntennaSystem::symmetric(1, 0.2);
    let got = laplace_interference_user_2d(10.0, &cfg, &ant, &quad()).unwrap();
    let table = thinning_table(1, 0.2, 1, 0.2, 0.01).unwrap();
    let want = nested_oracle(0.01, 3.0, &table, 10.0);
    assert!(rel(got, want) < 2e-5, "{got} vs {want}");
}

#[test]
fn bs_up_mirrors_user_2d() {
    let cfg = base(1.0).with_alphas(4.0, 3.0);
    let ant = AntennaSystem::symmetric(4, 0.2);
    assert_eq!(laplace_interference_bs_up(0.0, &cfg, &ant, &quad()).unwrap(), 1.0);
    let mut prev = 1.0;
    for k in -6..5 {
        let v = laplace_interference_bs_up(10f64.powi(k), &cfg, &ant, &quad()).unwrap();
        assert!(v > 0.0 && v < prev);
        prev = v;
    }
    let got = laplace_interference_bs_up(10.0, &cfg, &ant, &quad()).unwrap();
    let table = thinning_table(4, 0.2, 4, 0.2, 0.01).unwrap();
    let want = nested_oracle(0.01, 3.0, &table, 10.0);
    assert!(rel(got, want) < 2e-5, "{got} vs {want}");
    let sym = laplace_interference_user_2d(10.0, &cfg, &ant, &quad()).unwrap();
    assert!(rel(got, sym) < 1e-12);
}

#[test]
fn user_3d_example() {
    let cfg = base(1.0);
    let ant = AntennaSystem::symmetric(1, 0.2);
    assert_eq!(laplace_interference_user_3d(0.0, &cfg, &ant), 1.0);
    let got = laplace_interference_user_3d(1.0, &cfg, &ant);
    assert!((got - (-0.049_348_022_005_446_79f64).exp()).abs() < 1e-12);
    assert!((got - 0.95185).abs() < 1e-5);
}

#[test]
fn unprotected_field_is_the_zero_radius_limit() {
    let cfg = base(1.0).with_alphas(4.0, 3.0);
    let ant = AntennaSystem::symmetric(8, 0.2);
    let table = ant.thinning(NodeKind::User, NodeKind::User, cfg.lambda);
    for s in [0.1, 1.0, 30.0] {
        let coeffs = table.entries.map(|e| (e.density, s * e.power_gain));
        let near_zero = (-beyond_exponent(1e-12, &coeffs, 3.0)).exp();
        let full = laplace_interference_user_3d(s, &cfg, &ant);
        assert!(rel(near_zero, full) < 1e-9, "s={s}: {near_zero} vs {full}");
    }
}

#[test]
fn user_3u_against_inhomogeneous_pgfl() {
    let cfg = base(1.0);
    let ant = AntennaSystem::symmetric(1, 0.2);
    assert_eq!(laplace_interference_user_3u(0.0, &cfg, &ant, &quad()).unwrap(), 1.0);
    let got = laplace_interference_user_3u(1.0, &cfg, &ant, &quad()).unwrap();
    let lambda = 0.01;
    let exponent = PI
        * lambda
        * trapezoid(
            |w| {
                let z = w.exp();
                (1.0 - (-PI * lambda * z).exp()) / (1.0 + z * z) * z
            },
            -40.0,
            40.0,
            80_000,
        );
    let want = (-exponent).exp();
    assert!(rel(got, want) < 1e-9, "{got} vs {want}");
    let homogeneous = (-PI * lambda * PI / 2.0f64).exp();
    assert!(got >= homogeneous);
}

#[test]
fn user_3u_dominates_homogeneous_field() {
    let cfg = base(1.0).with_alphas(4.0, 3.0);
    let ant = AntennaSystem::symmetric(4, 0.2);
    let table = ant.thinning(NodeKind::Bs, NodeKind::User, cfg.lambda);
    for s in [1e-3, 1.0, 1e3, 1e6] {
        let v = laplace_interference_user_3u(s, &cfg, &ant, &quad()).unwrap();
        let hom: f64 = table
            .iter()
            .map(|e| (-PI * e.density * PI / 2.0 * (s * e.power_gain).sqrt()).exp())
            .product();
        assert!(v >= hom * (1.0 - 1e-12) && v <= 1.0, "s={s}");
    }
}

#[test]
fn zero_threshold_has_no_outage() {
    let ant = AntennaSystem::symmetric(4, 0.2);
    for sc in Scenario::ALL {
        let e = outage(sc, &base(0.0).with_sigma_l2(0.1), &ant).unwrap();
        assert_eq!(e.value, 0.0);
        // The nearest-neighbour user field makes small-τ outage sub-linear.
        let e = outage(sc, &base(1e-6).with_sigma_l2(0.1), &ant).unwrap();
        assert!(e.value < 1e-3, "{sc}: {}", e.value);
    }
}

#[test]
fn three_node_downlink_anchor() {
    let want = 1.0 - 1.0 / (1.0 + 3.0 * PI / 4.0);
    let ant = AntennaSystem::symmetric(1, 0.2);
    let thm = outage(Scenario::ThreeNodeDown, &base(1.0), &ant).unwrap();
    assert_eq!(thm.method, Method::Quadrature);
    assert!(rel(thm.value, want) < 1e-6, "{}", thm.value);
    let sp = SpecialCaseParams::new(1, 0.2).unwrap();
    let prop = outage_3d_special(&base(1.0), &sp, &quad()).unwrap();
    assert_eq!(prop.method, Method::ClosedForm);
    assert!(rel(prop.value, want) < 1e-12);
    assert!((want - 0.70204).abs() < 1e-5);
}

#[test]
fn general_outage_grows_with_rate() {
    let ant = AntennaSystem::symmetric(4, 0.2);
    for sc in Scenario::ALL {
        let cfg = if sc.is_uplink() { base(1.0).with_alphas(4.0, 3.0) } else { base(1.0) }.with_sigma_l2(1e-3);
        let mut prev = 0.0;
        for rate in [0.1, 0.5, 1.0, 2.0, 4.0] {
            let v = outage(sc, &cfg.with_rate(rate), &ant).unwrap().value;
            assert!(v >= prev, "{sc} R={rate}");
            prev = v;
        }
    }
}

#[test]
fn perfect_cancellation_uplinks_coincide() {
    let cfg = base(1.0).with_alphas(4.0, 3.0);
    for m in [1, 4, 8] {
        let ant = AntennaSystem::symmetric(m, 0.2);
        let a = outage(Scenario::TwoNodeUp, &cfg, &ant).unwrap().value;
        let b = outage(Scenario::ThreeNodeUp, &cfg, &ant).unwrap().value;
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn scenario_labels_round_trip() {
    for sc in Scenario::ALL {
        assert_eq!(sc.label().parse::<Scenario>().unwrap(), sc);
        assert_eq!(sc.label().to_lowercase().parse::<Scenario>().unwrap(), sc);
    }
    assert!("4X".parse::<Scenario>().is_err());
}

#[test]
fn probability_clamp_contract() {
    assert_eq!(clamp_probability(-5e-10).unwrap(), 0.0);
    assert_eq!(clamp_probability(1.0 + 5e-10).unwrap(), 1.0);
    assert!(clamp_probability(-1e-8).is_err());
    assert!(clamp_probability(f64::NAN).is_err());
}

// Special cases.

fn sp(m: u32) -> SpecialCaseParams {
    SpecialCaseParams::new(m, 0.2).unwrap()
}

#[test]
fn closed_form_anchors() {
    let cfg = base(1.0);
    let two_d = 1.0 - 1.0 / (1.0 + PI / 2.0);
    let up = 1.0 - 1.0 / (1.0 + PI / 2.0 + PI / 4.0);
    assert!((two_d - 0.61102).abs() < 1e-5);
    for f in [outage_approx_fd, outage_alpha4_closed] {
        let v = f(Scenario::TwoNodeDown, &cfg, &sp(1), &quad()).unwrap().value;
        assert!(rel(v, two_d) < 1e-12, "{v}");
        for sc in [Scenario::TwoNodeUp, Scenario::ThreeNodeUp] {
            let v = f(sc, &cfg, &sp(1), &quad()).unwrap().value;
            assert!(rel(v, up) < 1e-12, "{v}");
        }
    }
}

#[test]
fn alpha4_routes_agree_with_loopback() {
    for m in [1, 4, 8] {
        for sl in [1e-3, 1e-2, 0.1] {
            let cfg = base(1.0).with_sigma_l2(sl);
            for sc in [Scenario::TwoNodeDown, Scenario::TwoNodeUp, Scenario::ThreeNodeUp] {
                let a = outage_alpha4_closed(sc, &cfg, &sp(m), &quad()).unwrap().value;
                let b = outage_approx_fd(sc, &cfg, &sp(m), &quad()).unwrap().value;
                assert!(rel(a, b) < 1e-8, "{sc} M={m}: {a} vs {b}");
            }
        }
    }
    assert!(outage_alpha4_closed(Scenario::TwoNodeDown, &base(1.0).with_alphas(4.0, 3.0), &sp(1), &quad()).is_err());
}

#[test]
fn density_independence_without_loopback() {
    for m in [1, 4, 8] {
        for sc in [Scenario::TwoNodeDown, Scenario::TwoNodeUp, Scenario::ThreeNodeUp] {
            let vals: alloc::vec::Vec<f64> = [1e-3, 1e-2, 1e-1]
                .iter()
                .map(|&l| outage_alpha4_closed(sc, &base(1.0).with_lambda(l), &sp(m), &quad()).unwrap().value)
                .collect();
            assert!(vals.iter().all(|v| (v - vals[0]).abs() < 1e-12));
        }
    }
}

#[test]
fn three_node_special_eight_sectors_enumerated() {
    let cfg = base(1.0);
    let lam = [1.0 / 64.0, 7.0 / 64.0, 7.0 / 64.0, 49.0 / 64.0];
    let gam = [1.0, 0.2, 0.2, 0.04];
    let mut sum = 0.0;
    for i in 0..4 {
        let x: f64 = gam[i];
        sum += lam[i] * ((x.sqrt()).atan() * x.sqrt() + PI / 2.0 * x.sqrt());
    }
    let want = 1.0 - 1.0 / (1.0 + sum);
    let got = outage_3d_special(&cfg, &sp(8), &quad()).unwrap().value;
    assert!(rel(got, want) < 1e-12, "{got} vs {want}");
}

#[test]
fn three_node_special_vanishes_without_side_lobes() {
    let cfg = base(1.0);
    let mut prev = 1.0;
    for m in [4, 16, 64, 256, 4096] {
        let v = outage_3d_special(&cfg, &SpecialCaseParams::new(m, 0.0).unwrap(), &quad()).unwrap().value;
        assert!(v < prev);
        prev = v;
    }
    assert!(prev < 1e-6);
    let v = outage_3d_special(&cfg, &SpecialCaseParams::new_asymptotic(0.0).unwrap(), &quad()).unwrap();
    assert_eq!(v.value, 0.0);
}

#[test]
fn three_node_special_quadrature_for_unequal_exponents() {
    let cfg = base(1.0).with_alphas(4.0, 3.0);
    let v = outage_3d_special(&cfg, &sp(4), &quad()).unwrap();
    assert_eq!(v.method, Method::Quadrature);
    assert!(v.value > 0.0 && v.value < 1.0);
}

#[test]
fn special_case_flags_are_enforced() {
    let cfg = NetworkConfig {
        sigma_n2: 1e-3,
        ..base(1.0)
    };
    let ant = AntennaSystem::symmetric(4, 0.2);
    let p = SpecialCaseParams::from_config(&cfg, &ant).unwrap();
    assert!(outage_approx_fd(Scenario::TwoNodeDown, &cfg, &p, &quad()).is_err());
    let ant = AntennaSystem { m_u: 2, ..ant };
    let p = SpecialCaseParams::from_config(&base(1.0), &ant).unwrap();
    assert!(p.require().is_err());
    let p = SpecialCaseParams::from_config(&base(1.0), &AntennaSystem::symmetric(4, 0.2)).unwrap();
    assert!(p.require().is_ok());
}

#[test]
fn asymptotic_three_node_uplink_vanishes_with_side_lobes() {
    let cfg = base(1.0).with_alphas(4.0, 3.0).with_sigma_l2(0.01);
    let p = SpecialCaseParams::new_asymptotic(1e-4).unwrap();
    let v = outage_asymptotic(Scenario::ThreeNodeUp, &cfg, &p, &quad()).unwrap().value;
    assert!(v < 1e-2, "{v}");
}

#[test]
fn asymptotic_two_node_is_loopback_limited() {
    let cfg = base(1.0).with_alphas(4.0, 3.0).with_sigma_l2(0.01);
    let p = SpecialCaseParams::new_asymptotic(1e-9).unwrap();
    let v = outage_asymptotic(Scenario::TwoNodeDown, &cfg, &p, &quad()).unwrap().value;
    let k = cfg.sigma_l2 * cfg.tau();
    let lambda = cfg.lambda;
    let li_only = 1.0
        - crate::specfun::integrate_semi_infinite(
            |u: f64| (-u).exp() / (1.0 + k * (u / (lambda * PI)).powi(2)),
            0.0,
            &quad(),
        )
        .unwrap();
    assert!((v - li_only).abs() < 1e-7, "{v} vs {li_only}");
    assert!(v > 0.05);
}

#[test]
fn asymptotic_loopback_average_matches_fine_grid() {
    for mode in [SuppressionMode::Clamped, SuppressionMode::Raw] {
        for tm in [PI / 3.0, 2.0 * PI / 3.0, PI] {
            let x = 3.0;
            let got = li_factor_asymptotic_3u(x, tm, mode, &quad()).unwrap();
            let n = 200_000;
            let grid: f64 = (0..n)
                .map(|k| {
                    let t = -PI + (k as f64 + 0.5) * 2.0 * PI / n as f64;
                    1.0 / (1.0 + x * mode.factor(t, tm))
                })
                .sum::<f64>()
                / n as f64;
            assert!((got - grid).abs() < 1e-8, "{mode:?} {tm}: {got} vs {grid}");
        }
    }
}

#[test]
fn finite_sectors_approach_the_asymptote() {
    for sl_db in [-30.0, -10.0] {
        for rate in [0.5, 1.0, 2.0] {
            let cfg = base(rate).with_alphas(4.0, 3.0).with_sigma_l2_db(sl_db);
            for sc in [Scenario::TwoNodeDown, Scenario::TwoNodeUp, Scenario::ThreeNodeUp] {
                let asym = outage_asymptotic(sc, &cfg, &sp(8), &quad()).unwrap().value;
                let d8 = (outage_approx_fd(sc, &cfg, &sp(8), &quad()).unwrap().value - asym).abs();
                let d64 = (outage_approx_fd(sc, &cfg, &sp(64), &quad()).unwrap().value - asym).abs();
                assert!(d64 < d8, "{sc} R={rate} σ={sl_db}: {d64} vs {d8}");
            }
        }
    }
}

#[test]
fn approximation_overestimates_uplink_outage() {
    for m in [1, 4, 8] {
        for rate in [0.5, 1.0, 2.0] {
            let cfg = base(rate).with_alphas(4.0, 3.0).with_sigma_l2_db(-30.0);
            let ant = AntennaSystem::symmetric(m, 0.2);
            for sc in [Scenario::TwoNodeUp, Scenario::ThreeNodeUp] {
                let approx = outage_approx_fd(sc, &cfg, &sp(m), &quad()).unwrap().value;
                let full = outage(sc, &cfg, &ant).unwrap().value;
                assert!(approx >= full - 1e-9, "{sc} M={m} R={rate}: {approx} vs {full}");
            }
        }
    }
}
